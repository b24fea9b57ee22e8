//! Closed-form minimum-variance layer.
//!
//! For a validated universe the frontier program — minimize `w' sigma w`
//! subject to `1'w = 1` and `r'w = target` — has the classical solution
//! `w(target) = g + h*target`, where `g` is the unit-capital portfolio
//! with zero expected return and `h` is the self-financing overlay with
//! unit expected return. Every frontier portfolio's random return is
//! therefore `target * (h'rho) + (g'rho)`: one fund carrying all the
//! return sensitivity (mean one) on top of an anchor with mean zero.
//!
//! All solves go through a symmetric positive-definite factorization of
//! the covariance, never an explicit inverse; a condition-number guard
//! rejects universes where the constraint identities could not hold to
//! the promised 1e-10.

use nalgebra::{Cholesky, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::market_model::{AssetUniverse, MarketLinePoint, MarketModelError};

/// Constraint identities (`1'g = 1`, `r'g = 0`, `1'h = 0`, `r'h = 1`)
/// hold at least this tightly for any decomposition that constructs.
pub const CONSTRAINT_TOL: f64 = 1e-10;

/// Covariance condition numbers above this forfeit more than six decimal
/// digits in the solves, so decomposition refuses them.
pub const CONDITION_LIMIT: f64 = 1e6;

/// Absolute tolerance under which the tangency denominator
/// `1' sigma^-1 (r - r0 1)` counts as zero.
pub const TANGENCY_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum FrontierError {
    #[error(
        "covariance condition number {0:.3e} exceeds {CONDITION_LIMIT:.0e}; frontier solves \
         would lose more than six decimal digits"
    )]
    NumericalFailure(f64),
    #[error(
        "no finite tangency portfolio: 1' sigma^-1 (r - r0*1) = {0:.3e} is zero within \
         {TANGENCY_TOL:.0e}"
    )]
    NoTangency(f64),
    #[error(transparent)]
    Market(#[from] MarketModelError),
}

/// The four scalars of the frontier closed form:
/// `a = 1'sigma^-1 1`, `b = 1'sigma^-1 r`, `c = r'sigma^-1 r`,
/// `d = a*c - b*b`. For a validated universe `a > 0`, `c > 0`, and
/// `d > 0` (strict Cauchy-Schwarz, since `r` is not proportional to 1).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FrontierScalars {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// The `g`/`h` pair realizing `w(target) = g + h*target`, together with
/// the frontier scalars and the cached covariance solves they came from.
#[derive(Debug, Clone)]
pub struct FrontierDecomposition {
    zero_return_anchor: DVector<f64>,
    unit_return_overlay: DVector<f64>,
    scalars: FrontierScalars,
    sigma_inv_ones: DVector<f64>,
    sigma_inv_returns: DVector<f64>,
}

impl FrontierDecomposition {
    /// Solves the two covariance systems and assembles `g` and `h`.
    pub fn from_universe(universe: &AssetUniverse) -> Result<Self, FrontierError> {
        let (eigen_min, eigen_max) = universe.eigenvalue_range();
        let condition = eigen_max / eigen_min;
        if !condition.is_finite() || condition > CONDITION_LIMIT {
            return Err(FrontierError::NumericalFailure(condition));
        }
        let chol = Cholesky::new(universe.covariance().clone())
            .ok_or(FrontierError::NumericalFailure(condition))?;
        let ones = DVector::from_element(universe.n_assets(), 1.0);
        let sigma_inv_ones = chol.solve(&ones);
        let sigma_inv_returns = chol.solve(universe.expected_returns());

        let a = ones.dot(&sigma_inv_ones);
        let b = ones.dot(&sigma_inv_returns);
        let c = universe.expected_returns().dot(&sigma_inv_returns);
        let d = a * c - b * b;
        if !(a > 0.0 && c > 0.0 && d > 0.0) {
            return Err(FrontierError::NumericalFailure(condition));
        }

        let zero_return_anchor = (&sigma_inv_ones * c - &sigma_inv_returns * b) / d;
        let unit_return_overlay = (&sigma_inv_returns * a - &sigma_inv_ones * b) / d;
        Ok(Self {
            zero_return_anchor,
            unit_return_overlay,
            scalars: FrontierScalars { a, b, c, d },
            sigma_inv_ones,
            sigma_inv_returns,
        })
    }

    /// The unit-capital, zero-expected-return fund `g`.
    pub fn zero_return_anchor(&self) -> &DVector<f64> {
        &self.zero_return_anchor
    }

    /// The zero-capital, unit-expected-return overlay `h`.
    pub fn unit_return_overlay(&self) -> &DVector<f64> {
        &self.unit_return_overlay
    }

    pub fn scalars(&self) -> FrontierScalars {
        self.scalars
    }

    /// Minimum-variance weights for a nonnegative target return:
    /// `g + h*target`.
    pub fn weights_for_return(&self, target: f64) -> Result<DVector<f64>, FrontierError> {
        if !target.is_finite() {
            return Err(MarketModelError::NonFinite.into());
        }
        if target < 0.0 {
            return Err(MarketModelError::NegativeTarget(target).into());
        }
        Ok(&self.zero_return_anchor + &self.unit_return_overlay * target)
    }

    /// Vertex of the frontier hyperbola, `sigma^-1 1 / a`; no other
    /// unit-sum portfolio has smaller variance.
    pub fn global_minimum_variance(&self) -> DVector<f64> {
        &self.sigma_inv_ones / self.scalars.a
    }

    /// Expected return of the global minimum-variance portfolio, `b/a`.
    pub fn minimum_variance_return(&self) -> f64 {
        self.scalars.b / self.scalars.a
    }

    /// Frontier variance at a target return:
    /// `(a*target^2 - 2*b*target + c) / d`.
    pub fn variance_at(&self, target: f64) -> f64 {
        let FrontierScalars { a, b, c, d } = self.scalars;
        (a * target * target - 2.0 * b * target + c) / d
    }

    pub(crate) fn tangency_weights(
        &self,
        risk_free_rate: f64,
    ) -> Result<DVector<f64>, FrontierError> {
        let denominator = self.scalars.b - self.scalars.a * risk_free_rate;
        if denominator.abs() < TANGENCY_TOL {
            return Err(FrontierError::NoTangency(denominator));
        }
        Ok((&self.sigma_inv_returns - &self.sigma_inv_ones * risk_free_rate) / denominator)
    }
}

/// The tangency (market) portfolio: the frontier point whose ray from
/// the risk-free point is steepest, with weights proportional to
/// `sigma^-1 (r - r0 1)`.
#[derive(Debug, Clone, Serialize)]
pub struct TangencyPortfolio {
    pub weights: Vec<f64>,
    pub expected_return: f64,
    pub volatility: f64,
}

impl TangencyPortfolio {
    /// The point `(1-alpha) risk-free + alpha market`; `alpha > 1`
    /// means a leveraged (borrowing) position and is permitted.
    pub fn market_line_point(
        &self,
        risk_free_rate: f64,
        alpha: f64,
    ) -> Result<MarketLinePoint, FrontierError> {
        if !alpha.is_finite() {
            return Err(MarketModelError::NonFinite.into());
        }
        if alpha < 0.0 {
            return Err(MarketModelError::NegativeAlpha(alpha).into());
        }
        Ok(MarketLinePoint {
            alpha,
            expected_return: (1.0 - alpha) * risk_free_rate + alpha * self.expected_return,
            volatility: alpha * self.volatility,
        })
    }
}

/// Computes the tangency portfolio of a universe, normalizing
/// `sigma^-1 (r - r0 1)` to unit capital.
pub fn tangency(universe: &AssetUniverse) -> Result<TangencyPortfolio, FrontierError> {
    let decomposition = FrontierDecomposition::from_universe(universe)?;
    let weights = decomposition.tangency_weights(universe.risk_free_rate())?;
    let (expected_return, volatility) = universe.moments(&weights)?;
    Ok(TangencyPortfolio {
        weights: weights.data.into(),
        expected_return,
        volatility,
    })
}
