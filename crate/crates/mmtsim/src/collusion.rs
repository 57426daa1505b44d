//! Collusion criterion, reduced coordinates, and drift diagnostics.
//!
//! Relative to the zero-impact benchmark driven by the same noise, the price
//! ratio after `t` rounds is `prod eta_s`, where `eta = 1 + delta/P` takes
//! the value `1 + x` on buys (probability `phi`) and `1 - y` on sells, with
//! `x = v_alpha k_alpha` and `y = v_beta k_beta`. The profile is collusive,
//! meaning the ratio diverges almost surely, exactly when the per-round log
//! drift `mu_eta = phi ln(1+x) + (1-phi) ln(1-y)` is positive.
//!
//! In the reduced plane the same criterion is a threshold: `mu_eta > 0` iff
//! `x > r(y)` iff `y < g(x)`, with the inverse pair
//! `r(y) = (1-y)^(-(1-phi)/phi) - 1` and `g(x) = 1 - (1+x)^(-phi/(1-phi))`.
//! The learning dynamics are phrased entirely in these coordinates.
//!
//! A `boundary` class covers `|mu_eta| <= tol`: at exactly zero drift the
//! ratio has no almost-sure limit, and floating point cannot honestly take
//! sides there.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::params_feasible;
use crate::sim::RunResult;
use crate::strategy::StrategyParams;
use crate::util::Kahan;

/// Classification tolerance on `mu_eta`: inside it a profile is `Boundary`.
pub const DEFAULT_MU_TOL: f64 = 1e-12;

/// The reduced coordinates `(x, y) = (v_alpha k_alpha, v_beta k_beta)`.
///
/// `y < 1` for any price-positive profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedCoords {
    /// Buy-side product `v_alpha * k_alpha`.
    pub x: f64,
    /// Sell-side product `v_beta * k_beta`.
    pub y: f64,
}

impl ReducedCoords {
    /// The reduction of a parameter profile.
    #[must_use]
    pub fn of(params: &StrategyParams) -> Self {
        Self {
            x: params.x(),
            y: params.y(),
        }
    }
}

/// Where a profile sits relative to the collusion threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Outside the feasible region; the criterion does not apply.
    Infeasible,
    /// `mu_eta < -tol`: the price ratio collapses to zero.
    NonCollusive,
    /// `|mu_eta| <= tol`: no almost-sure limit, classification withheld.
    Boundary,
    /// `mu_eta > tol`: the price ratio diverges.
    Collusive,
}

/// Expected relative price impact per round,
/// `kappa = phi x - (1 - phi) y`.
#[must_use]
pub fn kappa(params: &StrategyParams) -> f64 {
    params.phi * params.x() - (1.0 - params.phi) * params.y()
}

/// Per-round log drift of the price ratio,
/// `mu_eta = phi ln(1+x) + (1-phi) ln(1-y)`.
///
/// Errors with [`Error::DomainError`] when `y >= 1`: such a profile crashes
/// the price on the first sell and has no drift to speak of.
pub fn mu_eta(params: &StrategyParams) -> Result<f64> {
    let (x, y) = (params.x(), params.y());
    if y >= 1.0 {
        return Err(Error::DomainError(format!(
            "mu_eta needs v_beta * k_beta < 1, got {y}"
        )));
    }
    Ok(params.phi * x.ln_1p() + (1.0 - params.phi) * (-y).ln_1p())
}

/// Standard deviation of the per-round log of `eta`, computed exactly from
/// its two-point distribution: `sqrt(phi (1-phi)) |ln(1+x) - ln(1-y)|`.
pub fn sigma_eta(params: &StrategyParams) -> Result<f64> {
    let (x, y) = (params.x(), params.y());
    if y >= 1.0 {
        return Err(Error::DomainError(format!(
            "sigma_eta needs v_beta * k_beta < 1, got {y}"
        )));
    }
    let spread = x.ln_1p() - (-y).ln_1p();
    Ok((params.phi * (1.0 - params.phi)).sqrt() * spread)
}

/// Classifies a profile with the default tolerance [`DEFAULT_MU_TOL`].
#[must_use]
pub fn classify(params: &StrategyParams) -> Classification {
    classify_with_tol(params, DEFAULT_MU_TOL)
}

/// Classifies a profile: infeasible profiles first, then the sign of
/// `mu_eta` against `tol`.
#[must_use]
pub fn classify_with_tol(params: &StrategyParams, tol: f64) -> Classification {
    if !params_feasible(params).feasible {
        return Classification::Infeasible;
    }
    // Feasibility implies price positivity, so y < 1 and mu_eta exists.
    let mu = mu_eta(params).expect("feasible profiles are price-positive");
    if mu > tol {
        Classification::Collusive
    } else if mu < -tol {
        Classification::NonCollusive
    } else {
        Classification::Boundary
    }
}

/// The threshold curve `r(y) = (1-y)^(-(1-phi)/phi) - 1`: the buy product
/// above which a profile with sell product `y` is collusive. Strictly
/// increasing and convex, `r(0) = 0`.
///
/// Errors with [`Error::DomainError`] outside `0 <= y < 1`.
pub fn r_of_y(y: f64, phi: f64) -> Result<f64> {
    debug_assert!(phi > 0.0 && phi < 1.0, "phi must lie in (0, 1)");
    if !(0.0..1.0).contains(&y) {
        return Err(Error::DomainError(format!(
            "r_of_y needs 0 <= y < 1, got {y}"
        )));
    }
    Ok((-(1.0 - phi) / phi * (-y).ln_1p()).exp_m1())
}

/// The inverse threshold `g(x) = 1 - (1+x)^(-phi/(1-phi))`: the sell product
/// below which a profile with buy product `x` is collusive. Strictly
/// increasing and concave, `g(0) = 0`, range `[0, 1)`.
#[must_use]
pub fn g_of_x(x: f64, phi: f64) -> f64 {
    debug_assert!(phi > 0.0 && phi < 1.0, "phi must lie in (0, 1)");
    debug_assert!(x >= 0.0);
    -(-phi / (1.0 - phi) * x.ln_1p()).exp_m1()
}

/// Per-run drift diagnostics: the realized `eta` path, its cumulative log
/// (the log price ratio `w_t` against the coupled benchmark), and the
/// empirical mean of `log eta` next to the analytic drift values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollusionDiagnostics {
    /// Analytic per-round log drift of the run's profile.
    pub mu_eta: f64,
    /// Analytic standard deviation of `log eta`.
    pub sigma_eta: f64,
    /// Analytic expected relative impact.
    pub kappa: f64,
    /// Empirical mean of `log eta` over the run.
    pub mean_log_eta: f64,
    /// Cumulative sums `w_t = sum_{s<=t} log eta_s`.
    pub log_ratio_path: Vec<f64>,
    /// Realized per-round `eta_t = 1 + delta_t / P_t`.
    pub eta_path: Vec<f64>,
}

/// Reconstructs the drift diagnostics from a recorded run.
///
/// The run stores the relative impact in exact product form, so each
/// reconstructed `eta_t` equals `1 + x`, `1 - y`, or (for a round that could
/// not trade) exactly one.
#[must_use]
pub fn drift_diagnostics(run: &RunResult) -> CollusionDiagnostics {
    let params = &run.config.params;
    let mu = mu_eta(params).expect("recorded runs have price-positive profiles");
    let sigma = sigma_eta(params).expect("recorded runs have price-positive profiles");
    let mut eta_path = Vec::with_capacity(run.rel_impact.len());
    let mut log_ratio_path = Vec::with_capacity(run.rel_impact.len());
    let mut w = Kahan::new();
    for &rel in &run.rel_impact {
        let eta = 1.0 + rel;
        eta_path.push(eta);
        w.add(rel.ln_1p());
        log_ratio_path.push(w.value());
    }
    let n = eta_path.len().max(1) as f64;
    CollusionDiagnostics {
        mu_eta: mu,
        sigma_eta: sigma,
        kappa: kappa(params),
        mean_log_eta: w.value() / n,
        log_ratio_path,
        eta_path,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::NoiseModel;
    use crate::rng;
    use crate::sim::{RunConfig, run_episode};
    use proptest::prelude::*;
    use rand::Rng;

    const PI_PLUS_MU: f64 = 0.069_895_864_184_412_54;
    const PI_MINUS_MU: f64 = -0.134_434_385_321_983_7;

    #[test]
    fn kappa_examples() {
        assert!((kappa(&StrategyParams::all_half(0.7)) - 0.1).abs() < 1e-15);
        assert_eq!(kappa(&StrategyParams::all_half(0.5)), 0.0);
        assert_eq!(kappa(&StrategyParams::benchmark(0.7)), 0.0);
    }

    #[test]
    fn mu_eta_examples() {
        let plus = mu_eta(&StrategyParams::all_half(0.7)).unwrap();
        assert!((plus - 0.069896).abs() < 1e-6);
        assert!((plus - (0.7 * 1.25f64.ln() + 0.3 * 0.75f64.ln())).abs() < 1e-15);
        assert!((plus - PI_PLUS_MU).abs() < 1e-15);

        let minus = mu_eta(&StrategyParams::all_half(0.3)).unwrap();
        assert!((minus - (-0.134434)).abs() < 1e-6);
        assert!((minus - PI_MINUS_MU).abs() < 1e-15);

        assert_eq!(mu_eta(&StrategyParams::benchmark(0.4)).unwrap(), 0.0);

        let crash = StrategyParams::new(0.5, 0.5, 0.6, 0.5, 2.0).unwrap();
        assert!(matches!(mu_eta(&crash), Err(Error::DomainError(_))));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify(&StrategyParams::all_half(0.7)),
            Classification::Collusive
        );
        assert_eq!(
            classify(&StrategyParams::all_half(0.3)),
            Classification::NonCollusive
        );
        assert_eq!(
            classify(&StrategyParams::benchmark(0.9)),
            Classification::Boundary
        );
        let crash = StrategyParams::new(0.5, 0.5, 0.6, 0.5, 2.0).unwrap();
        assert_eq!(classify(&crash), Classification::Infeasible);
    }

    #[test]
    fn threshold_examples() {
        assert!((r_of_y(0.5, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r_of_y(0.0, 0.3).unwrap(), 0.0);
        assert!((r_of_y(0.75, 0.5).unwrap() - 3.0).abs() < 1e-12);
        assert!(matches!(r_of_y(1.0, 0.5), Err(Error::DomainError(_))));

        assert!((g_of_x(1.0, 0.5) - 0.5).abs() < 1e-12);
        assert_eq!(g_of_x(0.0, 0.7), 0.0);
    }

    #[test]
    fn sigma_eta_matches_two_point_formula() {
        let params = StrategyParams::all_half(0.7);
        let expected = (0.7f64 * 0.3).sqrt() * (1.25f64.ln() - 0.75f64.ln());
        assert!((sigma_eta(&params).unwrap() - expected).abs() < 1e-15);
        assert_eq!(sigma_eta(&StrategyParams::benchmark(0.5)).unwrap(), 0.0);
    }

    proptest! {
        // r and g are inverse to each other.
        #[test]
        fn inverse_pair(y in 0.0f64..0.95, phi in 0.05f64..0.95) {
            let x = r_of_y(y, phi).unwrap();
            prop_assert!((g_of_x(x, phi) - y).abs() < 1e-10);
        }

        #[test]
        fn inverse_pair_other_way(x in 0.0f64..5.0, phi in 0.05f64..0.95) {
            let y = g_of_x(x, phi);
            // Near y = 1 the stored y keeps only ~1e-16/(1 - y) relative
            // information about 1 - y, so no inverse can recover x to 1e-10.
            prop_assume!(1.0 - y > 1e-6);
            prop_assert!((r_of_y(y, phi).unwrap() - x).abs() < 1e-10 * (1.0 + x));
        }

        // r is increasing and convex, g increasing and concave.
        #[test]
        fn curve_shapes(y in 0.0f64..0.8, phi in 0.1f64..0.9) {
            let h = 0.05;
            let (a, b, c) = (
                r_of_y(y, phi).unwrap(),
                r_of_y(y + h, phi).unwrap(),
                r_of_y(y + 2.0 * h, phi).unwrap(),
            );
            prop_assert!(b > a);
            prop_assert!(c - b > b - a);
            let (a, b, c) = (g_of_x(y, phi), g_of_x(y + h, phi), g_of_x(y + 2.0 * h, phi));
            prop_assert!(b > a);
            prop_assert!(c - b < b - a);
        }
    }

    #[test]
    fn criterion_equivalence_on_random_feasible_profiles() {
        let mut rng = rng::stream(21, 0, rng::CHECK);
        let mut kept = 0;
        while kept < 2000 {
            let phi = 0.05 + 0.9 * rng.random::<f64>();
            let params = StrategyParams::new(
                phi,
                rng.random::<f64>(),
                rng.random::<f64>(),
                rng.random::<f64>() * 2.0,
                rng.random::<f64>() * 2.0,
            )
            .unwrap();
            if !params_feasible(&params).feasible {
                continue;
            }
            let mu = mu_eta(&params).unwrap();
            if mu.abs() <= 1e-9 {
                continue;
            }
            kept += 1;
            let coords = ReducedCoords::of(&params);
            let by_r = coords.x > r_of_y(coords.y, phi).unwrap();
            let by_g = coords.y < g_of_x(coords.x, phi);
            assert_eq!(mu > 0.0, by_r, "mu/r disagree at {params:?}");
            assert_eq!(mu > 0.0, by_g, "mu/g disagree at {params:?}");
        }
    }

    #[test]
    fn nesting_collusive_feasible_price_positive() {
        let mut rng = rng::stream(22, 0, rng::CHECK);
        for _ in 0..3000 {
            let params = StrategyParams::new(
                0.05 + 0.9 * rng.random::<f64>(),
                rng.random::<f64>() * 1.5,
                rng.random::<f64>() * 1.5,
                rng.random::<f64>() * 2.0,
                rng.random::<f64>() * 2.0,
            )
            .unwrap();
            let verdict = params_feasible(&params);
            if classify(&params) == Classification::Collusive {
                assert!(verdict.feasible);
            }
            if verdict.feasible {
                assert!(verdict.price_positive);
            }
        }
    }

    #[test]
    fn diagnostics_on_benchmark_run_are_flat() {
        let cfg = RunConfig::new(
            StrategyParams::benchmark(0.7),
            NoiseModel::standard(),
            200,
            1,
            42,
        )
        .unwrap();
        let run = run_episode(&cfg, 0).unwrap();
        let diag = drift_diagnostics(&run);
        assert_eq!(diag.mu_eta, 0.0);
        assert_eq!(diag.kappa, 0.0);
        assert!(diag.eta_path.iter().all(|&e| e == 1.0));
        assert!(diag.log_ratio_path.iter().all(|&w| w == 0.0));
    }

    #[test]
    fn diagnostics_match_analytic_drift_within_clt_band() {
        for (phi, mu) in [(0.7, PI_PLUS_MU), (0.3, PI_MINUS_MU)] {
            let params = StrategyParams::all_half(phi);
            let cfg = RunConfig::new(params, NoiseModel::standard(), 3000, 1, 7).unwrap();
            let run = run_episode(&cfg, 0).unwrap();
            let diag = drift_diagnostics(&run);
            let band = 3.0 * diag.sigma_eta / 3000f64.sqrt();
            assert!(
                (diag.mean_log_eta - mu).abs() < band,
                "phi={phi}: {} vs {mu} (band {band})",
                diag.mean_log_eta
            );
            // Every realized eta sits exactly on the two-point support.
            let up = 1.0 + params.x();
            let down = 1.0 - params.y();
            assert!(diag.eta_path.iter().all(|&e| e == up || e == down));
        }
    }

    #[test]
    fn time_average_impact_converges_to_kappa() {
        let params = StrategyParams::all_half(0.7);
        let cfg = RunConfig::new(params, NoiseModel::standard(), 3000, 1, 97).unwrap();
        let run = run_episode(&cfg, 0).unwrap();
        let mut sum = Kahan::new();
        for &rel in &run.rel_impact {
            sum.add(rel);
        }
        let mean = sum.value() / run.rel_impact.len() as f64;
        // Two-point spread of rel impact: sd = sqrt(phi(1-phi)) * (x + y).
        let se = (0.7f64 * 0.3).sqrt() * 0.5 / 3000f64.sqrt();
        assert!((mean - kappa(&params)).abs() < 3.0 * se);
    }
}
