//! Decide which of two portfolios is *better in probability*: portfolio A
//! beats portfolio B when its realized return exceeds B's more than half
//! the time, i.e. when `P(return_a > return_b) > 1/2`.
//!
//! The crate evaluates that probability two ways:
//!
//! * **Analytically**, in three settings where it collapses to a closed
//!   form: mixes of a risk-free asset with a lognormal market portfolio
//!   (the market line), minimum-variance frontier portfolios under
//!   jointly Gaussian returns, and general elliptical return vectors.
//! * **Empirically**, from paired return samples — seeded Monte Carlo
//!   draws or historical records — with a Wilson score interval around
//!   the estimate.
//!
//! Alongside the probability verdict, [`comparators`] computes the
//! classical criteria (Sharpe ratio, certainty-equivalent return, value
//! at risk, expected return) and flags pairwise disagreements between
//! them, including the lognormal construction where a portfolio has the
//! larger expected return yet loses more than half the time.
//!
//! Module map:
//!
//! * [`market_model`] — validated market primitives: expected returns,
//!   covariance, risk-free rate, portfolio descriptions.
//! * [`frontier`] — closed-form minimum-variance frontier, the
//!   two-fund decomposition `w(r) = g + h·r`, tangency portfolio, and
//!   market line.
//! * [`sampling`] — seeded, reproducible return generators for the
//!   Gaussian, lognormal-market, and elliptical regimes.
//! * [`bip`] — the better-in-probability criterion: empirical estimator
//!   plus the per-regime closed forms.
//! * [`comparators`] — classical criteria panel and discordance
//!   analysis.

pub mod bip;
pub mod comparators;
pub mod frontier;
pub mod market_model;
pub mod sampling;

pub use bip::{estimate_bip, AnalyticBip, BipEstimate, Verdict};
pub use comparators::{CriteriaPanel, Counterexample, DiscordanceReport};
pub use frontier::{FrontierDecomposition, FrontierScalars, TangencyPortfolio};
pub use market_model::{AssetUniverse, MarketLinePoint, PortfolioSpec, UniverseFile};
pub use sampling::{AssetReturnSample, GeneratorConfig, PairedSample, RadialLaw, Regime};
