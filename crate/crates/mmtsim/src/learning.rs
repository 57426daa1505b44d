//! Learning dynamics in the reduced coordinates and their stopping-time
//! bounds.
//!
//! Both dynamics live on the collusion geometry of the `(x, y)` plane: a
//! randomized block pick (the buy block with probability `phi`) either
//! increases `x` or decreases `y`, both moves can only help, and the
//! trajectory crosses the threshold `x = r(y)` after finitely many steps.
//! The stopping time `tau` is the first step with `mu_eta` above tolerance.
//!
//! The abstract block scheme specifies product changes only. Realizing an
//! `x` increase in the underlying `(v_alpha, k_alpha)` pair is this
//! module's choice: scale `k_alpha` while it fits under
//! `f_alpha(v_alpha)` minus a boundary margin, and otherwise grow
//! `v_alpha` along the boundary curve `v (f_alpha(v) - margin)`, which is
//! strictly increasing where it is used. A `y` decrease always scales
//! `k_beta` down (flooring at zero), which can never leave the region.
//!
//! The projected-gradient instance ascends `x = v k` with the partial
//! derivatives as directions and projects sequentially: move `v`, refresh
//! the `k` cap, clamp `k`. When the clamp eats too much of the step, the
//! state is pushed out along the boundary until the `x` gain reaches the
//! class minimum `eta_k (v_alpha^0)^2`, which the unclamped step always
//! attains because `v_alpha` never decreases.

use serde::Serialize;

use crate::collusion::{DEFAULT_MU_TOL, ReducedCoords, g_of_x, mu_eta, r_of_y};
use crate::error::{Error, Result};
use crate::feasibility::{f_alpha, params_feasible};
use crate::rng;
use crate::strategy::StrategyParams;

/// Margin keeping realized fractions strictly below their open bounds.
pub const BOUNDARY_MARGIN: f64 = 1e-9;

/// Per-block step bounds of the randomized block scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockUpdateSpec {
    /// Smallest `x` increase an alpha draw applies.
    pub delta_alpha_min: f64,
    /// Largest `x` increase an alpha draw applies.
    pub delta_alpha_max: f64,
    /// Smallest `y` decrease a beta draw applies (before the zero floor).
    pub delta_beta_min: f64,
    /// Largest `y` decrease a beta draw applies.
    pub delta_beta_max: f64,
}

impl BlockUpdateSpec {
    /// Validates `0 < min <= max` for both blocks.
    pub fn new(
        delta_alpha_min: f64,
        delta_alpha_max: f64,
        delta_beta_min: f64,
        delta_beta_max: f64,
    ) -> Result<Self> {
        for (name, min, max) in [
            ("alpha", delta_alpha_min, delta_alpha_max),
            ("beta", delta_beta_min, delta_beta_max),
        ] {
            if !min.is_finite() || !max.is_finite() || min <= 0.0 || min > max {
                return Err(Error::InvalidParameter(format!(
                    "{name} block needs 0 < min <= max, got [{min}, {max}]"
                )));
            }
        }
        Ok(Self {
            delta_alpha_min,
            delta_alpha_max,
            delta_beta_min,
            delta_beta_max,
        })
    }

    /// Fixed-size steps: `min = max = delta` on both blocks.
    pub fn fixed(delta: f64) -> Result<Self> {
        Self::new(delta, delta, delta, delta)
    }
}

/// Step sizes of the projected-gradient instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PgaConfig {
    /// Ascent rate of `v_alpha`.
    pub eta_v_alpha: f64,
    /// Ascent rate of `k_alpha`.
    pub eta_k_alpha: f64,
    /// Descent rate of `v_beta`.
    pub eta_v_beta: f64,
    /// Descent rate of `k_beta`.
    pub eta_k_beta: f64,
}

impl PgaConfig {
    /// Validates positivity, and caps the product of the beta rates at 4 so
    /// a beta step can never increase `y` through its second-order term.
    pub fn new(
        eta_v_alpha: f64,
        eta_k_alpha: f64,
        eta_v_beta: f64,
        eta_k_beta: f64,
    ) -> Result<Self> {
        for (name, eta) in [
            ("eta_v_alpha", eta_v_alpha),
            ("eta_k_alpha", eta_k_alpha),
            ("eta_v_beta", eta_v_beta),
            ("eta_k_beta", eta_k_beta),
        ] {
            if !eta.is_finite() || eta <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and positive, got {eta}"
                )));
            }
        }
        if eta_v_beta * eta_k_beta > 4.0 {
            return Err(Error::InvalidParameter(format!(
                "beta step product must stay at most 4, got {}",
                eta_v_beta * eta_k_beta
            )));
        }
        Ok(Self {
            eta_v_alpha,
            eta_k_alpha,
            eta_v_beta,
            eta_k_beta,
        })
    }

    /// One common rate for all four coordinates.
    pub fn uniform(eta: f64) -> Result<Self> {
        Self::new(eta, eta, eta, eta)
    }
}

/// Which dynamic drives a learning run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Dynamic {
    /// Randomized block-coordinate product updates.
    Block(BlockUpdateSpec),
    /// Projected gradient ascent on the reduced objective.
    Pga(PgaConfig),
}

/// A learner's position after some number of steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LearnerState {
    /// Current profile; feasible after every update.
    pub params: StrategyParams,
    /// Buy product `v_alpha k_alpha`; nondecreasing across steps.
    pub x: f64,
    /// Sell product `v_beta k_beta`; nonincreasing across steps.
    pub y: f64,
    /// Steps taken so far.
    pub step: u64,
    /// First step at which the profile was collusive, if reached.
    pub tau: Option<u64>,
    /// `v_alpha` at step zero; sets the gradient dynamic's minimum
    /// per-alpha-step gain.
    v_alpha_init: f64,
}

impl LearnerState {
    /// Starts a learner at a feasible profile. A profile that is already
    /// collusive gets `tau = 0`.
    pub fn new(params: StrategyParams) -> Result<Self> {
        let verdict = params_feasible(&params);
        if !verdict.feasible {
            return Err(Error::InvalidParameter(format!(
                "initial profile is infeasible ({})",
                verdict.binding_constraint
            )));
        }
        let mu = mu_eta(&params).expect("feasible profiles are price-positive");
        Ok(Self {
            params,
            x: params.x(),
            y: params.y(),
            step: 0,
            tau: (mu > DEFAULT_MU_TOL).then_some(0),
            v_alpha_init: params.v_alpha,
        })
    }

    /// `v_alpha` at initialization.
    #[must_use]
    pub fn v_alpha_init(&self) -> f64 {
        self.v_alpha_init
    }

    /// The successor state after one update to `params`.
    fn advanced(&self, params: StrategyParams) -> Self {
        let step = self.step + 1;
        let mu = mu_eta(&params).expect("updates keep profiles feasible");
        Self {
            params,
            x: params.x(),
            y: params.y(),
            step,
            tau: self.tau.or((mu > DEFAULT_MU_TOL).then_some(step)),
            v_alpha_init: self.v_alpha_init,
        }
    }
}

/// Finds `(v_alpha, k_alpha)` with product `x_target`, staying strictly
/// inside the region and never lowering `v_alpha` below `v_min`.
///
/// If the target fits under the cap at `v_min`, only `k` moves. Otherwise
/// `v` grows to the root of `v (f_alpha(v) - margin) = x_target`, bracketed
/// by doubling and resolved by bisection; the exact-boundary closed form
/// `v = x sqrt(1 + x)` seeds the upper bracket.
fn alpha_boundary_realization(x_target: f64, v_min: f64) -> Result<(f64, f64)> {
    debug_assert!(x_target > 0.0 && v_min >= 0.0);
    let h = |v: f64| v * (f_alpha(v) - BOUNDARY_MARGIN);
    if v_min > 0.0 && h(v_min) >= x_target {
        return Ok((v_min, x_target / v_min));
    }
    let mut lo = v_min;
    let mut hi = (x_target * (1.0 + x_target).sqrt()).max(v_min).max(1e-12) * 2.0;
    let mut doublings = 0;
    while h(hi) < x_target {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 || !hi.is_finite() {
            return Err(Error::InfeasibleUpdate(format!(
                "no feasible parameters reach the buy product {x_target}"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < x_target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok((hi, x_target / hi))
}

/// Realizes a buy-product increase to `x_target` from the current pair.
fn realize_alpha_increase(params: &StrategyParams, x_target: f64) -> Result<(f64, f64)> {
    if params.v_alpha == 0.0 && params.k_alpha > 0.0 {
        // Raising v with k fixed is feasible whenever k stays under the cap
        // at the new v; otherwise fall through to the boundary walk.
        let v_try = x_target / params.k_alpha;
        if params.k_alpha < f_alpha(v_try) - BOUNDARY_MARGIN {
            return Ok((v_try, params.k_alpha));
        }
    }
    alpha_boundary_realization(x_target, params.v_alpha)
}

/// One randomized block-coordinate update.
///
/// `alpha_draw` selects the block (true with probability `phi` in a run);
/// `magnitude_draw` in `[0, 1]` interpolates the step size between the
/// block's `min` and `max`. An alpha draw increases `x` by the drawn
/// amount; a beta draw decreases `y` by it, floored at zero.
pub fn block_coordinate_step(
    state: &LearnerState,
    spec: &BlockUpdateSpec,
    alpha_draw: bool,
    magnitude_draw: f64,
) -> Result<LearnerState> {
    if !(0.0..=1.0).contains(&magnitude_draw) {
        return Err(Error::InvalidParameter(format!(
            "magnitude draw must lie in [0, 1], got {magnitude_draw}"
        )));
    }
    let mut params = state.params;
    if alpha_draw {
        let delta = spec.delta_alpha_min
            + magnitude_draw * (spec.delta_alpha_max - spec.delta_alpha_min);
        let (v, k) = realize_alpha_increase(&params, state.x + delta)?;
        params.v_alpha = v;
        params.k_alpha = k;
    } else {
        let delta =
            spec.delta_beta_min + magnitude_draw * (spec.delta_beta_max - spec.delta_beta_min);
        let y_new = (state.y - delta).max(0.0);
        // y > 0 forces v_beta > 0, so the division is safe; scaling k down
        // can never leave the region.
        params.k_beta = if y_new == 0.0 { 0.0 } else { y_new / params.v_beta };
    }
    Ok(state.advanced(params))
}

/// One projected-gradient update.
///
/// An alpha draw ascends `(v, k)` along `(k, v)` and projects onto
/// `[0, inf) x [0, f_alpha(v'))`, `v` first; if the clamp leaves the `x`
/// gain under the class minimum `eta_k (v_alpha^0)^2`, the pair walks out
/// along the boundary to restore it. A beta draw descends and clamps at
/// zero; its upper cap only widens as `v_beta` shrinks.
///
/// Errors with [`Error::DegenerateInit`] when both alpha coordinates are
/// zero: the gradient vanishes there and the dynamic cannot move.
pub fn pga_step(state: &LearnerState, cfg: &PgaConfig, alpha_draw: bool) -> Result<LearnerState> {
    let p = state.params;
    if p.v_alpha == 0.0 && p.k_alpha == 0.0 {
        return Err(Error::DegenerateInit(
            "v_alpha and k_alpha are both zero: a stationary point of the gradient dynamic"
                .into(),
        ));
    }
    let mut params = p;
    if alpha_draw {
        let v_new = p.v_alpha + cfg.eta_v_alpha * p.k_alpha;
        let k_raw = p.k_alpha + cfg.eta_k_alpha * p.v_alpha;
        let cap = (f_alpha(v_new) - BOUNDARY_MARGIN).max(0.0);
        let k_new = k_raw.clamp(0.0, cap);
        let x_floor = state.x + cfg.eta_k_alpha * state.v_alpha_init * state.v_alpha_init;
        if v_new * k_new < x_floor {
            let (v, k) = alpha_boundary_realization(x_floor, v_new)?;
            params.v_alpha = v;
            params.k_alpha = k;
        } else {
            params.v_alpha = v_new;
            params.k_alpha = k_new;
        }
    } else {
        params.v_beta = (p.v_beta - cfg.eta_v_beta * p.k_beta).max(0.0);
        params.k_beta = (p.k_beta - cfg.eta_k_beta * p.v_beta).max(0.0);
    }
    Ok(state.advanced(params))
}

/// Runs one learner for exactly `max_steps` updates and returns the full
/// trajectory (initial state first) together with the stopping time.
///
/// The per-step draws come from the stream `(seed, 0)` of the learning
/// purpose tag: one uniform for the block coin, and for the block dynamic a
/// second uniform for the step magnitude.
pub fn run_learning(
    initial: StrategyParams,
    dynamic: &Dynamic,
    max_steps: u64,
    seed: u64,
) -> Result<(Vec<LearnerState>, Option<u64>)> {
    if max_steps == 0 {
        return Err(Error::InvalidParameter("max_steps must be positive".into()));
    }
    let mut state = LearnerState::new(initial)?;
    if matches!(dynamic, Dynamic::Pga(_)) && initial.v_alpha == 0.0 && initial.k_alpha == 0.0 {
        return Err(Error::DegenerateInit(
            "v_alpha and k_alpha are both zero: a stationary point of the gradient dynamic"
                .into(),
        ));
    }
    let mut rng = rng::stream(seed, 0, rng::LEARN);
    let mut trajectory = Vec::with_capacity(max_steps as usize + 1);
    trajectory.push(state);
    for _ in 0..max_steps {
        let alpha_draw = rand::Rng::random::<f64>(&mut rng) < state.params.phi;
        state = match dynamic {
            Dynamic::Block(spec) => {
                let magnitude = rand::Rng::random::<f64>(&mut rng);
                block_coordinate_step(&state, spec, alpha_draw, magnitude)?
            }
            Dynamic::Pga(cfg) => pga_step(&state, cfg, alpha_draw)?,
        };
        trajectory.push(state);
    }
    let tau = state.tau;
    Ok((trajectory, tau))
}

/// Expected-stopping-time bounds for the block scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauBounds {
    /// Upper bound on the expected stopping time.
    pub upper: f64,
    /// Lower bound on the expected stopping time.
    pub lower: f64,
    /// Initial horizontal gap `max(0, r(y0) - x0)`.
    pub gap_r: f64,
    /// Initial vertical gap `max(0, y0 - g(x0))`.
    pub gap_g: f64,
}

/// Evaluates the expected-time bounds at a starting point.
///
/// Upper: the cheaper of closing the horizontal gap with minimal alpha
/// steps or the vertical gap with minimal beta steps,
/// `min(ceil(G_r / d_a_min) / phi, ceil(G_g / d_b_min) / (1 - phi))`.
/// Lower: each step closes at most the named gap amounts,
/// `max(G_r / (phi d_a_max + (1-phi) Dr_max), G_g / (phi Dg_max + (1-phi) d_b_max))`
/// with `Dr_max = r(y0) - r(y0 - d_b_max)` and
/// `Dg_max = g(x0 + d_a_max) - g(x0)`. A collusive start has zero gaps and
/// zero bounds.
pub fn tau_bounds(initial: &ReducedCoords, phi: f64, spec: &BlockUpdateSpec) -> Result<TauBounds> {
    if !phi.is_finite() || phi <= 0.0 || phi >= 1.0 {
        return Err(Error::DomainError(format!(
            "tau bounds need phi strictly inside (0, 1), got {phi}"
        )));
    }
    if !initial.x.is_finite() || initial.x < 0.0 {
        return Err(Error::DomainError(format!(
            "x must be finite and nonnegative, got {}",
            initial.x
        )));
    }
    let r0 = r_of_y(initial.y, phi)?;
    let g0 = g_of_x(initial.x, phi);
    let gap_r = (r0 - initial.x).max(0.0);
    let gap_g = (initial.y - g0).max(0.0);

    let upper = ((gap_r / spec.delta_alpha_min).ceil() / phi)
        .min((gap_g / spec.delta_beta_min).ceil() / (1.0 - phi));

    let dr_max = r0 - r_of_y((initial.y - spec.delta_beta_max).max(0.0), phi)?;
    let dg_max = g_of_x(initial.x + spec.delta_alpha_max, phi) - g0;
    let lower = (gap_r / (phi * spec.delta_alpha_max + (1.0 - phi) * dr_max))
        .max(gap_g / (phi * dg_max + (1.0 - phi) * spec.delta_beta_max));

    Ok(TauBounds {
        upper,
        lower,
        gap_r,
        gap_g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collusion::{Classification, classify};
    use crate::rng;
    use crate::util::mean_std;
    use rand::Rng;

    /// The block example start: x = 0 via k_alpha = 0, y = 1/2.
    fn block_start(phi: f64) -> StrategyParams {
        StrategyParams::new(phi, 0.0, 0.5, 1.0, 1.0).unwrap()
    }

    /// The gradient example start: v_alpha = 1, k_alpha = 0, y = 1/2.
    fn pga_start(phi: f64) -> StrategyParams {
        StrategyParams::new(phi, 0.0, 0.5, 1.0, 1.0).unwrap()
    }

    #[test]
    fn block_alpha_step_moves_x_only() {
        let state = LearnerState::new(block_start(0.5)).unwrap();
        let spec = BlockUpdateSpec::fixed(0.1).unwrap();
        let next = block_coordinate_step(&state, &spec, true, 0.0).unwrap();
        assert!((next.x - 0.1).abs() < 1e-14);
        assert_eq!(next.y, 0.5);
        assert_eq!(next.step, 1);
        assert!(params_feasible(&next.params).feasible);
    }

    #[test]
    fn block_beta_step_floors_y_at_zero() {
        let params = StrategyParams::new(0.5, 0.0, 0.05, 1.0, 1.0).unwrap();
        let state = LearnerState::new(params).unwrap();
        let spec = BlockUpdateSpec::fixed(0.1).unwrap();
        let next = block_coordinate_step(&state, &spec, false, 0.0).unwrap();
        assert_eq!(next.y, 0.0);
        assert_eq!(next.params.k_beta, 0.0);
        assert_eq!(next.x, state.x);
    }

    #[test]
    fn block_magnitude_interpolates() {
        let state = LearnerState::new(block_start(0.5)).unwrap();
        let spec = BlockUpdateSpec::new(0.1, 0.3, 0.1, 0.3).unwrap();
        let next = block_coordinate_step(&state, &spec, true, 0.5).unwrap();
        assert!((next.x - 0.2).abs() < 1e-14);
        assert!(block_coordinate_step(&state, &spec, true, 1.5).is_err());
    }

    #[test]
    fn block_alpha_overflows_to_v_when_k_saturates() {
        // v_alpha = 0.5 caps the product at h(0.5) ~ 0.42; a +1.0 step must
        // grow v along the boundary.
        let params = StrategyParams::new(0.5, 0.5, 0.2, 0.5, 0.5).unwrap();
        let state = LearnerState::new(params).unwrap();
        let spec = BlockUpdateSpec::new(1.0, 1.0, 0.1, 0.1).unwrap();
        let next = block_coordinate_step(&state, &spec, true, 0.0).unwrap();
        assert!((next.x - (state.x + 1.0)).abs() < 1e-9 * (1.0 + next.x));
        assert!(next.params.v_alpha > 0.5);
        assert!(params_feasible(&next.params).feasible);
    }

    #[test]
    fn pga_alpha_example() {
        let state = LearnerState::new(pga_start(0.5)).unwrap();
        let cfg = PgaConfig::uniform(0.1).unwrap();
        let next = pga_step(&state, &cfg, true).unwrap();
        assert_eq!(next.params.v_alpha, 1.0);
        assert!((next.params.k_alpha - 0.1).abs() < 1e-15);
        assert!(next.x - state.x >= cfg.eta_k_alpha * 1.0 - 1e-12);
    }

    #[test]
    fn pga_beta_step_at_floor_is_identity() {
        let params = StrategyParams::new(0.5, 0.1, 0.0, 0.5, 1.0).unwrap();
        let state = LearnerState::new(params).unwrap();
        let cfg = PgaConfig::uniform(0.1).unwrap();
        let next = pga_step(&state, &cfg, false).unwrap();
        assert_eq!(next.params.v_beta, 1.0);
        assert_eq!(next.params.k_beta, 0.0);
        assert_eq!(next.y, 0.0);
    }

    #[test]
    fn pga_clamp_preserves_minimum_gain_via_v() {
        let v0 = 1.0;
        let k0 = f_alpha(v0) - 1e-7;
        let params = StrategyParams::new(0.5, k0, 0.2, v0, 0.5).unwrap();
        let state = LearnerState::new(params).unwrap();
        let cfg = PgaConfig::uniform(0.1).unwrap();
        let next = pga_step(&state, &cfg, true).unwrap();
        assert!(next.x - state.x >= 0.1 * v0 * v0 - 1e-12);
        assert!(next.params.v_alpha >= state.params.v_alpha);
        assert!(next.params.k_alpha < f_alpha(next.params.v_alpha));
        assert!(params_feasible(&next.params).feasible);
    }

    #[test]
    fn pga_rejects_degenerate_initialization() {
        let params = StrategyParams::new(0.5, 0.0, 0.2, 0.0, 0.5).unwrap();
        let state = LearnerState::new(params).unwrap();
        let cfg = PgaConfig::uniform(0.1).unwrap();
        assert!(matches!(
            pga_step(&state, &cfg, true),
            Err(Error::DegenerateInit(_))
        ));
        assert!(matches!(
            run_learning(params, &Dynamic::Pga(cfg), 10, 1),
            Err(Error::DegenerateInit(_))
        ));
    }

    #[test]
    fn collusive_start_has_tau_zero() {
        let params = StrategyParams::all_half(0.7);
        let state = LearnerState::new(params).unwrap();
        assert_eq!(state.tau, Some(0));
        let (_, tau) = run_learning(
            params,
            &Dynamic::Block(BlockUpdateSpec::fixed(0.1).unwrap()),
            5,
            3,
        )
        .unwrap();
        assert_eq!(tau, Some(0));
    }

    #[test]
    fn trajectories_are_monotone_feasible_and_invariant_after_tau() {
        let spec = BlockUpdateSpec::fixed(0.05).unwrap();
        let cfg = PgaConfig::uniform(0.05).unwrap();
        for (dynamic, start) in [
            (Dynamic::Block(spec), block_start(0.4)),
            (Dynamic::Pga(cfg), pga_start(0.4)),
        ] {
            for seed in 0..20 {
                let (trajectory, tau) = run_learning(start, &dynamic, 150, seed).unwrap();
                assert_eq!(trajectory.len(), 151);
                let tau = tau.expect("150 steps close a 0.5-ish gap");
                for pair in trajectory.windows(2) {
                    assert!(pair[1].x >= pair[0].x - 1e-12);
                    assert!(pair[1].y <= pair[0].y + 1e-12);
                    assert!(params_feasible(&pair[1].params).feasible);
                }
                for state in &trajectory[tau as usize..] {
                    assert_eq!(classify(&state.params), Classification::Collusive);
                }
            }
        }
    }

    #[test]
    fn slack_is_strictly_increasing_while_steps_move() {
        let spec = BlockUpdateSpec::fixed(0.05).unwrap();
        let (trajectory, _) =
            run_learning(block_start(0.5), &Dynamic::Block(spec), 100, 11).unwrap();
        for pair in trajectory.windows(2) {
            let moved = pair[1].x != pair[0].x || pair[1].y != pair[0].y;
            if moved {
                let s0 = pair[0].x - r_of_y(pair[0].y, 0.5).unwrap();
                let s1 = pair[1].x - r_of_y(pair[1].y, 0.5).unwrap();
                // The step that clears the last floating-point dust off the
                // y floor moves slack by less than one ulp of x; strictness
                // is only observable for resolvable moves.
                let resolvable =
                    pair[1].x - pair[0].x > 1e-9 || pair[0].y - pair[1].y > 1e-9;
                if resolvable {
                    assert!(s1 > s0);
                } else {
                    assert!(s1 >= s0 - 1e-12);
                }
            }
        }
    }

    #[test]
    fn tau_bounds_example() {
        let spec = BlockUpdateSpec::fixed(0.1).unwrap();
        let start = ReducedCoords { x: 0.0, y: 0.5 };
        let bounds = tau_bounds(&start, 0.5, &spec).unwrap();
        assert_eq!(bounds.upper, 10.0);
        assert!((bounds.lower - 5.238095238095238).abs() < 1e-12);
        assert!((bounds.gap_r - 1.0).abs() < 1e-12);
        assert!((bounds.gap_g - 0.5).abs() < 1e-12);
        assert!(bounds.lower <= bounds.upper);
    }

    #[test]
    fn tau_bounds_vanish_at_collusive_starts() {
        let spec = BlockUpdateSpec::fixed(0.1).unwrap();
        let start = ReducedCoords { x: 1.0, y: 0.1 };
        let bounds = tau_bounds(&start, 0.5, &spec).unwrap();
        assert_eq!(bounds.upper, 0.0);
        assert_eq!(bounds.lower, 0.0);
    }

    #[test]
    fn block_stopping_times_respect_the_bounds() {
        let spec = BlockUpdateSpec::fixed(0.1).unwrap();
        let start = block_start(0.5);
        let bounds =
            tau_bounds(&ReducedCoords { x: 0.0, y: 0.5 }, 0.5, &spec).unwrap();
        let mut taus = Vec::with_capacity(300);
        for seed in 0..300 {
            let (_, tau) =
                run_learning(start, &Dynamic::Block(spec), 200, seed).unwrap();
            taus.push(tau.expect("bounded gaps close within 200 steps") as f64);
        }
        let (mean, std) = mean_std(&taus);
        let se = std / (taus.len() as f64).sqrt();
        assert!(mean <= bounds.upper + 3.0 * se, "mean {mean} upper {}", bounds.upper);
        assert!(mean >= bounds.lower - 3.0 * se, "mean {mean} lower {}", bounds.lower);
    }

    #[test]
    fn pga_reaches_collusion_within_the_corollary_bound() {
        let cfg = PgaConfig::uniform(0.1).unwrap();
        let start = pga_start(0.5);
        let mut taus = Vec::with_capacity(200);
        for seed in 0..200 {
            let (trajectory, tau) =
                run_learning(start, &Dynamic::Pga(cfg), 400, seed).unwrap();
            taus.push(tau.expect("corollary guarantees finite tau") as f64);
            // Every alpha step gains at least eta_k (v0)^2 = 0.1.
            for pair in trajectory.windows(2) {
                let alpha_step = pair[1].x != pair[0].x;
                if alpha_step {
                    assert!(pair[1].x - pair[0].x >= 0.1 - 1e-12);
                }
            }
        }
        let (mean, std) = mean_std(&taus);
        let se = std / (taus.len() as f64).sqrt();
        assert!(mean <= 20.0 + 3.0 * se, "mean {mean}");
    }

    #[test]
    fn forward_invariance_under_random_admissible_updates() {
        let mut rng = rng::stream(41, 0, rng::CHECK);
        let mut checked = 0;
        while checked < 1000 {
            let params = StrategyParams::new(
                0.1 + 0.8 * rng.random::<f64>(),
                rng.random::<f64>(),
                rng.random::<f64>(),
                rng.random::<f64>() * 2.0,
                rng.random::<f64>() * 2.0,
            )
            .unwrap();
            if classify(&params) != Classification::Collusive {
                continue;
            }
            checked += 1;
            let state = LearnerState::new(params).unwrap();
            let alpha_draw = rng.random::<f64>() < 0.5;
            let magnitude = rng.random::<f64>();
            let next = if rng.random::<f64>() < 0.5 {
                let spec = BlockUpdateSpec::new(
                    0.01 + rng.random::<f64>() * 0.1,
                    0.2 + rng.random::<f64>() * 0.3,
                    0.01 + rng.random::<f64>() * 0.1,
                    0.2 + rng.random::<f64>() * 0.3,
                )
                .unwrap();
                block_coordinate_step(&state, &spec, alpha_draw, magnitude).unwrap()
            } else {
                if params.v_alpha == 0.0 && params.k_alpha == 0.0 {
                    continue;
                }
                let cfg = PgaConfig::uniform(0.01 + rng.random::<f64>() * 0.2).unwrap();
                pga_step(&state, &cfg, alpha_draw).unwrap()
            };
            assert_eq!(
                classify(&next.params),
                Classification::Collusive,
                "exit from the collusive region at {params:?}"
            );
            assert_eq!(next.tau, Some(0));
        }
    }
}
