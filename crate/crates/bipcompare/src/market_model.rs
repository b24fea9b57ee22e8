//! Market primitives shared by every other module: the expected-return
//! vector, covariance matrix and risk-free rate of the asset universe,
//! plus the three ways a portfolio can be described (explicit weights, a
//! market-line mix coefficient, or a frontier target return).
//!
//! Construction is validation: an [`AssetUniverse`] or [`PortfolioSpec`]
//! that exists has already passed every invariant, and all types are
//! immutable afterwards. Validation never repairs its input — an
//! asymmetric covariance is rejected, not symmetrized.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Entrywise absolute tolerance for covariance symmetry.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Positive-definiteness cutoff, relative to the largest eigenvalue.
/// Covariance scales vary by orders of magnitude across datasets, so the
/// test is `lambda_min > EIGEN_RATIO_TOL * lambda_max` rather than an
/// absolute floor.
pub const EIGEN_RATIO_TOL: f64 = 1e-10;

/// Tolerance on `sum(weights) - 1`. Violations are errors; weights are
/// never renormalized on the caller's behalf.
pub const WEIGHT_SUM_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum MarketModelError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(
        "covariance is not symmetric: |sigma[{row},{col}] - sigma[{col},{row}]| = {gap:.3e} \
         exceeds {SYMMETRY_TOL:.0e}"
    )]
    NonSymmetric { row: usize, col: usize, gap: f64 },
    #[error(
        "covariance is not positive definite: smallest eigenvalue {min_eigen:.6e} is not above \
         {EIGEN_RATIO_TOL:.0e} x largest eigenvalue {max_eigen:.6e}"
    )]
    NotPositiveDefinite { min_eigen: f64, max_eigen: f64 },
    #[error("expected returns are proportional to the all-ones vector; the frontier degenerates")]
    DegenerateReturns,
    #[error("input contains a non-finite value")]
    NonFinite,
    #[error("risk-free rate {0} must exceed -1 (gross return must stay positive)")]
    RiskFreeOutOfRange(f64),
    #[error("portfolio weights sum to {sum}, off unity by more than {WEIGHT_SUM_TOL:.0e}")]
    WeightSum { sum: f64 },
    #[error("market-line mix coefficient {0} must be nonnegative")]
    NegativeAlpha(f64),
    #[error("frontier target return {0} must be nonnegative")]
    NegativeTarget(f64),
    #[error("operation requires the explicit-weights portfolio form")]
    ExpectedWeights,
}

/// A validated market: per-period expected simple returns `r`, their
/// covariance `sigma`, and the risk-free rate, all dimensionless
/// (0.05 means 5% per period).
///
/// Guaranteed by construction:
/// * `sigma` is symmetric within [`SYMMETRY_TOL`] and positive definite
///   under the relative eigenvalue test;
/// * `r` is not proportional to the all-ones vector, so the
///   minimum-variance frontier is a nondegenerate hyperbola;
/// * the risk-free rate exceeds -1.
#[derive(Debug, Clone)]
pub struct AssetUniverse {
    asset_names: Vec<String>,
    expected_returns: DVector<f64>,
    covariance: DMatrix<f64>,
    risk_free_rate: f64,
    eigen_min: f64,
    eigen_max: f64,
}

impl AssetUniverse {
    /// Validates the raw bundle and returns the universe, or the first
    /// diagnostic hit. The covariance is stored exactly as given.
    pub fn new(
        asset_names: Vec<String>,
        expected_returns: DVector<f64>,
        covariance: DMatrix<f64>,
        risk_free_rate: f64,
    ) -> Result<Self, MarketModelError> {
        let n = expected_returns.len();
        if covariance.nrows() != n || covariance.ncols() != n {
            return Err(MarketModelError::DimensionMismatch(format!(
                "expected a {n}x{n} covariance for {n} assets, got {}x{}",
                covariance.nrows(),
                covariance.ncols()
            )));
        }
        if asset_names.len() != n {
            return Err(MarketModelError::DimensionMismatch(format!(
                "{} asset names for {n} assets",
                asset_names.len()
            )));
        }
        if n == 0 {
            return Err(MarketModelError::DimensionMismatch(
                "universe must contain at least one asset".into(),
            ));
        }
        if !risk_free_rate.is_finite()
            || expected_returns.iter().any(|x| !x.is_finite())
            || covariance.iter().any(|x| !x.is_finite())
        {
            return Err(MarketModelError::NonFinite);
        }
        if risk_free_rate <= -1.0 {
            return Err(MarketModelError::RiskFreeOutOfRange(risk_free_rate));
        }
        for row in 0..n {
            for col in (row + 1)..n {
                let gap = (covariance[(row, col)] - covariance[(col, row)]).abs();
                if gap > SYMMETRY_TOL {
                    return Err(MarketModelError::NonSymmetric { row, col, gap });
                }
            }
        }
        let eigenvalues = covariance.clone().symmetric_eigenvalues();
        let eigen_min = eigenvalues.min();
        let eigen_max = eigenvalues.max();
        if !(eigen_max > 0.0) || eigen_min <= EIGEN_RATIO_TOL * eigen_max {
            return Err(MarketModelError::NotPositiveDefinite {
                min_eigen: eigen_min,
                max_eigen: eigen_max,
            });
        }
        let spread = expected_returns.max() - expected_returns.min();
        let scale = expected_returns.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        if spread <= 1e-12 * scale {
            return Err(MarketModelError::DegenerateReturns);
        }
        Ok(Self {
            asset_names,
            expected_returns,
            covariance,
            risk_free_rate,
            eigen_min,
            eigen_max,
        })
    }

    pub fn n_assets(&self) -> usize {
        self.expected_returns.len()
    }

    pub fn asset_names(&self) -> &[String] {
        &self.asset_names
    }

    pub fn expected_returns(&self) -> &DVector<f64> {
        &self.expected_returns
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn risk_free_rate(&self) -> f64 {
        self.risk_free_rate
    }

    /// Smallest and largest covariance eigenvalues, as computed during
    /// validation. The frontier layer uses their ratio as its
    /// condition-number guard.
    pub(crate) fn eigenvalue_range(&self) -> (f64, f64) {
        (self.eigen_min, self.eigen_max)
    }

    /// Expected return and volatility of an arbitrary weight vector:
    /// `(r'w, sqrt(w' sigma w))`. The weights need not sum to one; the
    /// quadratic form is absolutely homogeneous, so scaling `w` by `c`
    /// scales the volatility by `|c|`.
    pub fn moments(&self, weights: &DVector<f64>) -> Result<(f64, f64), MarketModelError> {
        if weights.len() != self.n_assets() {
            return Err(MarketModelError::DimensionMismatch(format!(
                "{} weights for {} assets",
                weights.len(),
                self.n_assets()
            )));
        }
        let expected = self.expected_returns.dot(weights);
        let variance = (&self.covariance * weights).dot(weights);
        Ok((expected, variance.max(0.0).sqrt()))
    }

    /// [`moments`](Self::moments) for the explicit-weights form of a
    /// [`PortfolioSpec`]; the other forms must be resolved to weights by
    /// the frontier layer first.
    pub fn portfolio_moments(&self, spec: &PortfolioSpec) -> Result<(f64, f64), MarketModelError> {
        match spec {
            PortfolioSpec::Weights(w) => self.moments(w),
            _ => Err(MarketModelError::ExpectedWeights),
        }
    }
}

/// One of three portfolio descriptions: explicit capital fractions,
/// a market-line mix coefficient, or a frontier target return.
///
/// Use the checked constructors; they enforce the per-form invariants
/// (unit weight sum within [`WEIGHT_SUM_TOL`], nonnegative mix and
/// target). Short positions are allowed in the weights form.
#[derive(Debug, Clone)]
pub enum PortfolioSpec {
    Weights(DVector<f64>),
    MarketLineAlpha(f64),
    FrontierTarget(f64),
}

impl PortfolioSpec {
    pub fn weights(weights: DVector<f64>) -> Result<Self, MarketModelError> {
        if weights.is_empty() || weights.iter().any(|x| !x.is_finite()) {
            return Err(MarketModelError::NonFinite);
        }
        let sum: f64 = weights.sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(MarketModelError::WeightSum { sum });
        }
        Ok(Self::Weights(weights))
    }

    pub fn market_line_alpha(alpha: f64) -> Result<Self, MarketModelError> {
        if !alpha.is_finite() {
            return Err(MarketModelError::NonFinite);
        }
        if alpha < 0.0 {
            return Err(MarketModelError::NegativeAlpha(alpha));
        }
        Ok(Self::MarketLineAlpha(alpha))
    }

    pub fn frontier_target(target: f64) -> Result<Self, MarketModelError> {
        if !target.is_finite() {
            return Err(MarketModelError::NonFinite);
        }
        if target < 0.0 {
            return Err(MarketModelError::NegativeTarget(target));
        }
        Ok(Self::FrontierTarget(target))
    }

    pub fn as_weights(&self) -> Option<&DVector<f64>> {
        match self {
            Self::Weights(w) => Some(w),
            _ => None,
        }
    }
}

/// A point on the market line: the mix `(1-alpha)` risk-free plus
/// `alpha` market portfolio, carrying its expected return and risk.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MarketLinePoint {
    pub alpha: f64,
    pub expected_return: f64,
    pub volatility: f64,
}

/// On-disk JSON schema for a universe. Keys are fixed:
/// `asset_names`, `expected_returns`, `covariance` (array of row
/// arrays), `risk_free_rate`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniverseFile {
    pub asset_names: Vec<String>,
    pub expected_returns: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub risk_free_rate: f64,
}

impl UniverseFile {
    pub fn into_universe(self) -> Result<AssetUniverse, MarketModelError> {
        let n = self.expected_returns.len();
        if self.covariance.len() != n || self.covariance.iter().any(|row| row.len() != n) {
            return Err(MarketModelError::DimensionMismatch(format!(
                "covariance rows must form an {n}x{n} matrix"
            )));
        }
        let covariance = DMatrix::from_fn(n, n, |i, j| self.covariance[i][j]);
        AssetUniverse::new(
            self.asset_names,
            DVector::from_vec(self.expected_returns),
            covariance,
            self.risk_free_rate,
        )
    }
}

impl TryFrom<UniverseFile> for AssetUniverse {
    type Error = MarketModelError;

    fn try_from(file: UniverseFile) -> Result<Self, Self::Error> {
        file.into_universe()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn two_asset() -> AssetUniverse {
        AssetUniverse::new(
            vec!["a".into(), "b".into()],
            DVector::from_vec(vec![0.10, 0.20]),
            DMatrix::from_diagonal(&DVector::from_vec(vec![0.04, 0.09])),
            0.05,
        )
        .unwrap()
    }

    #[test]
    fn accepts_diagonal_pd_universe() {
        let u = two_asset();
        assert_eq!(u.n_assets(), 2);
        assert_eq!(u.risk_free_rate(), 0.05);
    }

    #[test]
    fn rejects_returns_proportional_to_ones() {
        let err = AssetUniverse::new(
            vec!["a".into(), "b".into()],
            DVector::from_vec(vec![0.1, 0.1]),
            DMatrix::from_diagonal(&DVector::from_vec(vec![0.04, 0.09])),
            0.05,
        )
        .unwrap_err();
        assert!(matches!(err, MarketModelError::DegenerateReturns));
    }

    #[test]
    fn rejects_asymmetric_covariance_without_repair() {
        let mut sigma = DMatrix::from_diagonal(&DVector::from_vec(vec![0.04, 0.09]));
        sigma[(0, 1)] = 0.01;
        sigma[(1, 0)] = 0.02;
        let err = AssetUniverse::new(
            vec!["a".into(), "b".into()],
            DVector::from_vec(vec![0.10, 0.20]),
            sigma,
            0.05,
        )
        .unwrap_err();
        assert!(matches!(err, MarketModelError::NonSymmetric { .. }));
    }

    #[test]
    fn rejects_indefinite_covariance() {
        let sigma = DMatrix::from_row_slice(2, 2, &[0.04, 0.07, 0.07, 0.09]);
        let err = AssetUniverse::new(
            vec!["a".into(), "b".into()],
            DVector::from_vec(vec![0.10, 0.20]),
            sigma,
            0.05,
        )
        .unwrap_err();
        assert!(matches!(err, MarketModelError::NotPositiveDefinite { .. }));
    }

    #[test]
    fn rejects_dimension_mismatch_and_bad_risk_free() {
        let err = AssetUniverse::new(
            vec!["a".into()],
            DVector::from_vec(vec![0.10, 0.20]),
            DMatrix::from_diagonal(&DVector::from_vec(vec![0.04, 0.09])),
            0.05,
        )
        .unwrap_err();
        assert!(matches!(err, MarketModelError::DimensionMismatch(_)));

        let err = AssetUniverse::new(
            vec!["a".into(), "b".into()],
            DVector::from_vec(vec![0.10, 0.20]),
            DMatrix::from_diagonal(&DVector::from_vec(vec![0.04, 0.09])),
            -1.0,
        )
        .unwrap_err();
        assert!(matches!(err, MarketModelError::RiskFreeOutOfRange(_)));
    }

    #[test]
    fn accepts_tiny_symmetric_pd_perturbation() {
        let base = DMatrix::from_row_slice(2, 2, &[0.04, 0.01, 0.01, 0.09]);
        let mut bumped = base.clone();
        for i in 0..2 {
            bumped[(i, i)] += 1e-13;
        }
        for sigma in [base, bumped] {
            AssetUniverse::new(
                vec!["a".into(), "b".into()],
                DVector::from_vec(vec![0.10, 0.20]),
                sigma,
                0.05,
            )
            .unwrap();
        }
    }

    #[test]
    fn moments_match_hand_values() {
        let u = two_asset();
        let (r, s) = u.moments(&DVector::from_vec(vec![1.0, 0.0])).unwrap();
        assert_eq!((r, s), (0.10, 0.20));
        let (r, s) = u.moments(&DVector::from_vec(vec![0.0, 1.0])).unwrap();
        assert_eq!((r, s), (0.20, 0.30));
        let (r, s) = u.moments(&DVector::from_vec(vec![0.5, 0.5])).unwrap();
        assert_relative_eq!(r, 0.15, max_relative = 1e-15);
        // sqrt(0.25*0.04 + 0.25*0.09)
        assert_relative_eq!(s, 0.180_277_563_773_199_46, max_relative = 1e-15);
    }

    #[test]
    fn moments_agree_with_sample_statistics_of_projected_rows() {
        // Universe built from the sample mean / sample covariance of a
        // small 3-asset record: portfolio moments must then equal the
        // mean/std of the exactly projected per-row returns.
        let rows = [
            [0.02, -0.01, 0.05],
            [0.01, 0.03, -0.02],
            [-0.03, 0.02, 0.04],
            [0.05, 0.00, 0.01],
            [0.00, -0.02, 0.03],
            [0.02, 0.04, -0.01],
        ];
        let n = rows.len();
        let mut mean = [0.0; 3];
        for row in &rows {
            for (m, x) in mean.iter_mut().zip(row) {
                *m += x / n as f64;
            }
        }
        let mut cov = DMatrix::zeros(3, 3);
        for row in &rows {
            for i in 0..3 {
                for j in 0..3 {
                    cov[(i, j)] += (row[i] - mean[i]) * (row[j] - mean[j]) / (n as f64 - 1.0);
                }
            }
        }
        // Symmetrize exactly: accumulation order above already matches
        // for (i,j) and (j,i), so this is a no-op guard.
        let u = AssetUniverse::new(
            vec!["a".into(), "b".into(), "c".into()],
            DVector::from_row_slice(&mean),
            cov,
            0.0,
        )
        .unwrap();

        let w = DVector::from_vec(vec![0.2, 0.3, 0.5]);
        let projected: Vec<f64> = rows
            .iter()
            .map(|row| row.iter().zip(w.iter()).map(|(x, wi)| x * wi).sum())
            .collect();
        let p_mean: f64 = projected.iter().sum::<f64>() / n as f64;
        let p_var: f64 =
            projected.iter().map(|x| (x - p_mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);

        let (r, s) = u.moments(&w).unwrap();
        assert_relative_eq!(r, p_mean, epsilon = 1e-12);
        assert_relative_eq!(s, p_var.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn weight_spec_enforces_unit_sum() {
        assert!(PortfolioSpec::weights(DVector::from_vec(vec![0.6, 0.4])).is_ok());
        assert!(PortfolioSpec::weights(DVector::from_vec(vec![1.5, -0.5])).is_ok());
        let err = PortfolioSpec::weights(DVector::from_vec(vec![0.6, 0.5])).unwrap_err();
        assert!(matches!(err, MarketModelError::WeightSum { .. }));
    }

    #[test]
    fn universe_file_round_trip() {
        let file = UniverseFile {
            asset_names: vec!["a".into(), "b".into()],
            expected_returns: vec![0.10, 0.20],
            covariance: vec![vec![0.04, 0.0], vec![0.0, 0.09]],
            risk_free_rate: 0.05,
        };
        let u = file.into_universe().unwrap();
        assert_eq!(u.covariance()[(1, 1)], 0.09);
    }

    proptest! {
        // Scaling weights by c scales volatility by |c|; the quadratic
        // form is exercised on arbitrary (non unit-sum) vectors.
        #[test]
        fn volatility_is_absolutely_homogeneous(
            w0 in -2.0..2.0f64,
            w1 in -2.0..2.0f64,
            c in -5.0..5.0f64,
        ) {
            let u = two_asset();
            let w = DVector::from_vec(vec![w0, w1]);
            let (_, vol) = u.moments(&w).unwrap();
            let (_, vol_scaled) = u.moments(&(&w * c)).unwrap();
            prop_assert!((vol_scaled - c.abs() * vol).abs() <= 1e-12 * (1.0 + vol_scaled.abs()));
        }
    }
}
