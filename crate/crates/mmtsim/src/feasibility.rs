//! The feasible parameter region and the per-trade feasibility predicates.
//!
//! A profile is playable forever exactly when the taker's fractions stay
//! strictly below two boundary curves: `k_alpha < f_alpha(v_alpha)` on the
//! buy side, where `f_alpha(v)` is the unique positive root of
//! `k^3 v + k^2 - 1 = 0`, and `k_beta < min(1, f_beta(v_beta))` with
//! `f_beta(v) = 1/v` on the sell side. The `f_beta` cap is the
//! price-positivity condition `v_beta * k_beta < 1` (a sell executes at
//! `P (1 - v_beta k_beta)`); the cap at one keeps the taker's inventory
//! positive; the buy-side cubic keeps the taker's cash positive. Boundary
//! points are infeasible: the region is open.
//!
//! [`f_alpha`] uses a safeguarded Newton iteration on the bracket `[0, 1]`
//! rather than the Cardano closed form, which needs complex intermediates
//! for `v < 2/sqrt(27)`. Where the discriminant is real the closed form is
//! available as [`cardano_f_alpha`], written as `t = a + 1/(3a)` with
//! `a = cbrt(v/2 + s)`: the second cube root `cbrt(v/2 - s)` equals
//! `1/(3a)` exactly because `(v/2 + s)(v/2 - s) = 1/27`, and that form
//! avoids the catastrophic cancellation in `v/2 - s` at large `v`.
//!
//! [`brute_force_region`] is the independent oracle: it plays each grid
//! point from the all-ones state and reports whether any trade ever throws.
//! Noise is held at one inside the oracle. That loses no information: the
//! tradable bounds at the first state are noise-free, an infeasible profile
//! violates its constraint on the first draw of the offending branch, and a
//! feasible profile violates under no noise path at all.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{MarketState, Quotes, impact_delta};
use crate::rng;
use crate::strategy::{StrategyParams, strategy_round, tradable_bounds};
use crate::util::linspace;

/// Truncation guard for the brute-force oracle: when the price or either
/// tradable bound falls below this, the episode is called early (as
/// feasible). The protocol's real-valued semantics have no range limits,
/// but `f64` does: a positive account shrinking geometrically eventually
/// hits subnormals where a strictly positive product rounds to zero, which
/// would read as a violation the protocol does not have. The guard is safe
/// because every violation condition is a scale-free ratio test, and the
/// all-ones start puts both arguments of each `min` in a tie, so every
/// binding pattern is exercised at healthy scale within the first draws of
/// its branch. Shrinking any scale by 250 decades takes dozens of surviving
/// repetitions of the very pattern that shrinks it, after which the
/// real-valued dynamics repeat themselves at smaller magnitude.
pub(crate) const EXHAUSTION_GUARD: f64 = 1e-250;

/// Upper bound for a taker fraction: a finite threshold or no constraint.
///
/// `f_beta(0)` is unbounded; encoding that as an explicit variant keeps the
/// sentinel out of float arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KBound {
    /// The fraction must stay strictly below this value.
    Finite(f64),
    /// No finite threshold.
    Unbounded,
}

impl KBound {
    /// True when `k` is strictly inside the bound.
    #[must_use]
    pub fn admits(self, k: f64) -> bool {
        match self {
            KBound::Finite(b) => k < b,
            KBound::Unbounded => k.is_finite(),
        }
    }

    /// The bound capped at `cap`: `min(bound, cap)`, with the unbounded
    /// variant collapsing to `cap`.
    #[must_use]
    pub fn min_finite(self, cap: f64) -> f64 {
        match self {
            KBound::Finite(b) => b.min(cap),
            KBound::Unbounded => cap,
        }
    }
}

/// The account or price condition a rejected trade would breach first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BindingConstraint {
    /// Nothing binds.
    None,
    /// The taker's cash would be exhausted (buys).
    CashTaker,
    /// The maker's inventory would be exhausted (buys).
    InvMaker,
    /// The maker's cash would be exhausted (sells).
    CashMaker,
    /// The taker's inventory would be exhausted (sells).
    InvTaker,
    /// The execution price would be driven to zero or below (sells).
    PricePositivity,
}

impl std::fmt::Display for BindingConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            BindingConstraint::None => "none",
            BindingConstraint::CashTaker => "cash_taker",
            BindingConstraint::InvMaker => "inv_maker",
            BindingConstraint::CashMaker => "cash_maker",
            BindingConstraint::InvTaker => "inv_taker",
            BindingConstraint::PricePositivity => "price_positivity",
        };
        f.write_str(name)
    }
}

/// Outcome of a feasibility test: overall verdict plus the first constraint
/// that binds. `feasible` implies `price_positive`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    /// Execution and post-trade prices stay strictly positive.
    pub price_positive: bool,
    /// All accounts stay strictly positive (and the price does too).
    pub feasible: bool,
    /// First violated constraint, `None` when feasible.
    pub binding_constraint: BindingConstraint,
}

impl FeasibilityVerdict {
    fn feasible() -> Self {
        Self {
            price_positive: true,
            feasible: true,
            binding_constraint: BindingConstraint::None,
        }
    }

    fn infeasible(binding: BindingConstraint) -> Self {
        Self {
            price_positive: binding != BindingConstraint::PricePositivity,
            feasible: false,
            binding_constraint: binding,
        }
    }
}

/// The buy-side boundary: the unique positive root of `k^3 v + k^2 - 1 = 0`.
///
/// Strictly decreasing, `f_alpha(0) = 1`, asymptotically `v^(-1/3)`.
/// Computed by Newton steps safeguarded by the bisection bracket `[0, 1]`
/// (the polynomial is `-1` at zero and `v` at one, and is strictly
/// increasing between, so the bracket never lies).
#[must_use]
pub fn f_alpha(v_alpha: f64) -> f64 {
    debug_assert!(v_alpha.is_finite() && v_alpha >= 0.0);
    if v_alpha == 0.0 {
        return 1.0;
    }
    let g = |k: f64| (k * v_alpha + 1.0) * k * k - 1.0;
    let dg = |k: f64| k * (3.0 * k * v_alpha + 2.0);
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    // Seed from the large-v asymptote, pulled inside the bracket.
    let mut k = (1.0 / v_alpha).cbrt().min(0.9);
    for _ in 0..128 {
        let gk = g(k);
        if gk == 0.0 {
            return k;
        }
        if gk > 0.0 {
            hi = k;
        } else {
            lo = k;
        }
        let mut next = k - gk / dg(k);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - k).abs() <= 4.0 * f64::EPSILON * next {
            return next;
        }
        k = next;
    }
    k
}

/// Closed-form buy-side boundary, valid where the discriminant
/// `v^2/4 - 1/27` is nonnegative (`v >= 2/sqrt(27)`).
///
/// With `s = sqrt(v^2/4 - 1/27)` and `a = cbrt(v/2 + s)`, the root of the
/// depressed cubic in `t = 1/k` is `t = a + 1/(3a)`; the usual second cube
/// root equals `1/(3a)` exactly since `(v/2 + s)(v/2 - s) = 1/27`.
pub fn cardano_f_alpha(v_alpha: f64) -> Result<f64> {
    if !v_alpha.is_finite() || v_alpha < 0.0 {
        return Err(Error::DomainError(format!(
            "cardano_f_alpha needs a finite nonnegative argument, got {v_alpha}"
        )));
    }
    let disc = v_alpha * v_alpha / 4.0 - 1.0 / 27.0;
    if disc < 0.0 {
        return Err(Error::DomainError(format!(
            "cardano_f_alpha needs v >= 2/sqrt(27), got {v_alpha}"
        )));
    }
    let a = (v_alpha / 2.0 + disc.sqrt()).cbrt();
    let t = a + 1.0 / (3.0 * a);
    Ok(1.0 / t)
}

/// The sell-side boundary `1/v_beta`, unbounded at zero.
#[must_use]
pub fn f_beta(v_beta: f64) -> KBound {
    debug_assert!(v_beta >= 0.0);
    if v_beta == 0.0 {
        KBound::Unbounded
    } else {
        KBound::Finite(1.0 / v_beta)
    }
}

/// Classifies a parameter profile against the analytic region.
///
/// Constraints are tested in the order price positivity, taker cash, maker
/// cash, taker inventory. The maker-inventory condition `k_alpha < 1` never
/// binds on its own because `f_alpha <= 1` everywhere, and the bracket in
/// [`f_alpha`] guarantees the computed root never exceeds one.
#[must_use]
pub fn params_feasible(params: &StrategyParams) -> FeasibilityVerdict {
    if params.v_beta * params.k_beta >= 1.0 {
        return FeasibilityVerdict::infeasible(BindingConstraint::PricePositivity);
    }
    if params.k_alpha >= f_alpha(params.v_alpha) {
        return FeasibilityVerdict::infeasible(BindingConstraint::CashTaker);
    }
    // Maker cash on sells: k^2 (1 - v k) < 1. Implied by k_beta < 1, so it
    // can only fire for profiles already beyond the inventory cap; tested
    // first to match the account enumeration order.
    let kb = params.k_beta;
    if kb * kb * (1.0 - params.v_beta * kb) >= 1.0 {
        return FeasibilityVerdict::infeasible(BindingConstraint::CashMaker);
    }
    if kb >= 1.0 {
        return FeasibilityVerdict::infeasible(BindingConstraint::InvTaker);
    }
    FeasibilityVerdict::feasible()
}

/// Checks a single proposed trade against the current state: would the
/// execution price stay positive and every account stay strictly positive?
///
/// Reports the first violated constraint, checking the price first for
/// sells (a quote can push the execution price to zero or below), then the
/// two accounts the trade drains.
#[must_use]
pub fn state_feasible_step(
    state: &MarketState,
    quotes: &Quotes,
    quantity: f64,
) -> FeasibilityVerdict {
    if quantity == 0.0 {
        return FeasibilityVerdict::feasible();
    }
    let delta = impact_delta(quotes, quantity);
    let exec = state.price + delta;
    if exec <= 0.0 {
        return FeasibilityVerdict::infeasible(BindingConstraint::PricePositivity);
    }
    let cash_exchanged = quantity * exec;
    if quantity > 0.0 {
        if cash_exchanged >= state.taker.cash {
            return FeasibilityVerdict::infeasible(BindingConstraint::CashTaker);
        }
        if quantity >= state.maker.inventory {
            return FeasibilityVerdict::infeasible(BindingConstraint::InvMaker);
        }
    } else {
        if -cash_exchanged >= state.maker.cash {
            return FeasibilityVerdict::infeasible(BindingConstraint::CashMaker);
        }
        if -quantity >= state.taker.inventory {
            return FeasibilityVerdict::infeasible(BindingConstraint::InvTaker);
        }
    }
    FeasibilityVerdict::feasible()
}

/// Shortest coordinate distance from a profile to the analytic region
/// boundary, measured along the `k` axes. Used to excuse disagreement
/// between the analytic region and the finite-horizon oracle at points the
/// horizon cannot resolve.
#[must_use]
pub fn boundary_distance(params: &StrategyParams) -> f64 {
    let mut d = (params.k_alpha - f_alpha(params.v_alpha)).abs();
    d = d.min((params.k_beta - 1.0).abs());
    if let KBound::Finite(b) = f_beta(params.v_beta) {
        d = d.min((params.k_beta - b).abs());
    }
    d
}

/// One evenly spaced axis of a parameter grid: `steps` points from `min` to
/// `max` inclusive (a single point when `steps == 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    /// First grid value.
    pub min: f64,
    /// Last grid value.
    pub max: f64,
    /// Number of points, at least one.
    pub steps: usize,
}

impl AxisSpec {
    /// Validates the axis: finite ordered endpoints, at least one point.
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() || min > max {
            return Err(Error::InvalidParameter(format!(
                "axis endpoints must be finite with min <= max, got [{min}, {max}]"
            )));
        }
        if steps == 0 || (steps > 1 && min == max) {
            return Err(Error::InvalidParameter(format!(
                "axis needs at least one point and distinct endpoints for several, got {steps}"
            )));
        }
        Ok(Self { min, max, steps })
    }

    /// An axis pinned to one value.
    #[must_use]
    pub fn fixed(value: f64) -> Self {
        Self {
            min: value,
            max: value,
            steps: 1,
        }
    }

    /// The axis values, endpoints exact.
    #[must_use]
    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.steps)
    }
}

/// A product grid over the four strategy coefficients. Points iterate with
/// `v_alpha` outermost and `k_beta` innermost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Maker ask coefficient axis.
    pub v_alpha: AxisSpec,
    /// Taker buy fraction axis.
    pub k_alpha: AxisSpec,
    /// Maker bid coefficient axis.
    pub v_beta: AxisSpec,
    /// Taker sell fraction axis.
    pub k_beta: AxisSpec,
}

impl GridSpec {
    /// All grid points as `(v_alpha, k_alpha, v_beta, k_beta)` tuples in
    /// row-major order.
    #[must_use]
    pub fn points(&self) -> Vec<(f64, f64, f64, f64)> {
        let mut out = Vec::with_capacity(
            self.v_alpha.steps * self.k_alpha.steps * self.v_beta.steps * self.k_beta.steps,
        );
        for &va in &self.v_alpha.values() {
            for &ka in &self.k_alpha.values() {
                for &vb in &self.v_beta.values() {
                    for &kb in &self.k_beta.values() {
                        out.push((va, ka, vb, kb));
                    }
                }
            }
        }
        out
    }
}

/// One grid point with its analytic verdict and the oracle's empirical one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionPoint {
    /// The profile played at this point.
    pub params: StrategyParams,
    /// Verdict of [`params_feasible`].
    pub analytic: FeasibilityVerdict,
    /// True when no trade threw in any trial episode.
    pub empirical: bool,
}

/// Plays one oracle episode; `Ok(true)` means it survived the horizon.
fn region_episode(
    params: &StrategyParams,
    horizon: u64,
    rng: &mut impl rand::Rng,
) -> Result<bool> {
    let mut state = MarketState::unit();
    for _ in 0..horizon {
        let bounds = tradable_bounds(&state);
        if state.price < EXHAUSTION_GUARD
            || bounds.ask_bound < EXHAUSTION_GUARD
            || bounds.bid_bound < EXHAUSTION_GUARD
        {
            return Ok(true);
        }
        let buy = rng.random::<f64>() < params.phi;
        match strategy_round(params, &state, 1.0, buy) {
            Ok((next, _)) => state = next,
            Err(Error::InfeasibleTrade { .. } | Error::NonPositivePrice { .. }) => {
                return Ok(false);
            }
            Err(other) => return Err(other),
        }
    }
    Ok(true)
}

/// Evaluates one grid point: all `trials` episodes on their own streams.
fn region_point(
    point: (f64, f64, f64, f64),
    index: u64,
    phi: f64,
    horizon: u64,
    trials: u64,
    seed: u64,
) -> Result<RegionPoint> {
    let (va, ka, vb, kb) = point;
    let params = StrategyParams::new(phi, ka, kb, va, vb)?;
    let analytic = params_feasible(&params);
    let mut empirical = true;
    for trial in 0..trials {
        let mut rng = rng::stream(seed, index * trials + trial, rng::REGION);
        if !region_episode(&params, horizon, &mut rng)? {
            empirical = false;
            break;
        }
    }
    Ok(RegionPoint {
        params,
        analytic,
        empirical,
    })
}

fn region_preconditions(phi: f64, horizon: u64, trials: u64) -> Result<()> {
    if !phi.is_finite() || !(0.0..=1.0).contains(&phi) {
        return Err(Error::InvalidParameter(format!(
            "phi must lie in [0, 1], got {phi}"
        )));
    }
    if horizon == 0 || trials == 0 {
        return Err(Error::InvalidParameter(
            "horizon and trials must be positive".into(),
        ));
    }
    Ok(())
}

/// Brute-force oracle for the analytic region: a grid point is empirically
/// feasible iff no trade throws in any of `trials` episodes of `horizon`
/// rounds. Trials are parallel when the `parallel` feature is on; results
/// are identical either way because every episode runs on its own stream.
pub fn brute_force_region(
    phi: f64,
    grid: &GridSpec,
    horizon: u64,
    trials: u64,
    seed: u64,
) -> Result<Vec<RegionPoint>> {
    region_preconditions(phi, horizon, trials)?;
    let points = grid.points();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        points
            .par_iter()
            .enumerate()
            .map(|(i, &p)| region_point(p, i as u64, phi, horizon, trials, seed))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        points
            .iter()
            .enumerate()
            .map(|(i, &p)| region_point(p, i as u64, phi, horizon, trials, seed))
            .collect()
    }
}

/// Single-threaded variant of [`brute_force_region`], bit-identical to it.
pub fn brute_force_region_sequential(
    phi: f64,
    grid: &GridSpec,
    horizon: u64,
    trials: u64,
    seed: u64,
) -> Result<Vec<RegionPoint>> {
    region_preconditions(phi, horizon, trials)?;
    grid.points()
        .iter()
        .enumerate()
        .map(|(i, &p)| region_point(p, i as u64, phi, horizon, trials, seed))
        .collect()
}
