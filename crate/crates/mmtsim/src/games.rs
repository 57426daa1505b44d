//! The one-shot games hiding inside a round: reward, competitive and
//! collaborative utilities, their exact decomposition, and best responses.
//!
//! Conditional on the current state, a player's expected one-round wealth
//! increase is `R^p = c P I^p` with the drift coefficient
//! `c = mu_eps (1 + kappa) - 1`: wealth moves only through the price, and
//! the price moves in expectation by that factor. Writing
//! `Z^p = c P (I^p - I^other)` (zero-sum) and `U = c P (I^T + I^M)`
//! (common interest) gives the exact split `R^p = Z^p / 2 + U / 2`.
//!
//! All three utilities are positive multiples of the same scalar `c`, and
//! `c` is increasing in `kappa`, which is linear in each taker fraction. So
//! best responses sit on the feasible-region boundary: the richer-in-
//! inventory taker pushes the buy product to the boundary and zeroes the
//! sell side, and the maker, minimizing what the taker can reach, zeroes
//! its own coefficient, landing the pair on the zero-drift benchmark.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::feasibility::{f_alpha, f_beta};
use crate::market::MarketState;
use crate::strategy::StrategyParams;

/// Everything a one-shot evaluation needs: the state, the profile, and the
/// mean of the exogenous noise factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GameContext {
    /// State the round starts from.
    pub state: MarketState,
    /// Profile both players follow.
    pub params: StrategyParams,
    /// `E[eps]` of the governing noise model.
    pub noise_mean: f64,
}

impl GameContext {
    /// Validates the noise mean: finite and strictly positive.
    pub fn new(state: MarketState, params: StrategyParams, noise_mean: f64) -> Result<Self> {
        if !noise_mean.is_finite() || noise_mean <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "noise mean must be finite and positive, got {noise_mean}"
            )));
        }
        Ok(Self {
            state,
            params,
            noise_mean,
        })
    }

    /// The shared drift coefficient `c = mu_eps (1 + kappa) - 1`.
    #[must_use]
    pub fn drift_coefficient(&self) -> f64 {
        self.noise_mean * (1.0 + crate::collusion::kappa(&self.params)) - 1.0
    }

    fn inventory(&self, player: crate::market::Player) -> f64 {
        self.state.account(player).inventory
    }
}

/// Expected one-round wealth increase `R^p = c P I^p`.
#[must_use]
pub fn reward_r(ctx: &GameContext, player: crate::market::Player) -> f64 {
    ctx.drift_coefficient() * ctx.state.price * ctx.inventory(player)
}

/// Competitive (zero-sum) utility `Z^p = c P (I^p - I^other)`.
///
/// The difference is computed once and negated for the maker, so
/// `Z^T + Z^M == 0` holds bit for bit.
#[must_use]
pub fn utility_z(ctx: &GameContext, player: crate::market::Player) -> f64 {
    let z_taker = ctx.drift_coefficient()
        * ctx.state.price
        * (ctx.state.taker.inventory - ctx.state.maker.inventory);
    match player {
        crate::market::Player::Taker => z_taker,
        crate::market::Player::Maker => -z_taker,
    }
}

/// Collaborative utility `U = c P (I^T + I^M)`, the expected one-round
/// increase of social welfare.
#[must_use]
pub fn utility_u(ctx: &GameContext) -> f64 {
    ctx.drift_coefficient() * ctx.state.price * ctx.state.total_inventory()
}

/// Residuals `R^p - Z^p/2 - U/2` for taker and maker. Identically zero in
/// exact arithmetic; in floats they stay below `1e-12 (|R^p| + 1)`.
#[must_use]
pub fn decomposition_residual(ctx: &GameContext) -> (f64, f64) {
    use crate::market::Player::{Maker, Taker};
    let taker = reward_r(ctx, Taker) - 0.5 * utility_z(ctx, Taker) - 0.5 * utility_u(ctx);
    let maker = reward_r(ctx, Maker) - 0.5 * utility_z(ctx, Maker) - 0.5 * utility_u(ctx);
    (taker, maker)
}

/// The taker's best response `(k_alpha, k_beta)` in the competitive game,
/// given the maker's coefficients `v = (v_alpha, v_beta)` and the current
/// inventories `(I^T, I^M)`.
///
/// `Z^T` is increasing in `kappa` times the sign of `I^T - I^M`, and
/// `kappa` is linear in each fraction, so the optimum sits on the region
/// boundary: holding more inventory than the maker, push the buy fraction
/// to `f_alpha(v_alpha) - margin` and zero the sell side; holding less,
/// mirror it under the sell-side cap `min(1, f_beta(v_beta)) - margin`;
/// at equal inventories every response is worth zero and the benchmark
/// `(0, 0)` is returned.
pub fn taker_best_response_z(
    v: (f64, f64),
    inventories: (f64, f64),
    epsilon_margin: f64,
) -> Result<(f64, f64)> {
    let (v_alpha, v_beta) = v;
    if !v_alpha.is_finite() || !v_beta.is_finite() || v_alpha < 0.0 || v_beta < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "maker coefficients must be finite and nonnegative, got ({v_alpha}, {v_beta})"
        )));
    }
    if !epsilon_margin.is_finite() || epsilon_margin <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "margin must be positive, got {epsilon_margin}"
        )));
    }
    let (inv_taker, inv_maker) = inventories;
    if inv_taker > inv_maker {
        Ok(((f_alpha(v_alpha) - epsilon_margin).max(0.0), 0.0))
    } else if inv_taker < inv_maker {
        let cap = f_beta(v_beta).min_finite(1.0);
        Ok((0.0, (cap - epsilon_margin).max(0.0)))
    } else {
        Ok((0.0, 0.0))
    }
}

/// The fixed point of the competitive game: the maker minimizes the value
/// the taker's best response can reach.
///
/// Returned as `(v, k) = ((v_alpha, v_beta), (k_alpha, k_beta))`. Whichever
/// side the taker would exploit, the maker zeroes its coefficient there, so
/// the taker's boundary response carries no impact product: both reduced
/// coordinates are zero and the profile sits on the zero-drift benchmark.
/// Coordinates the taker leaves unused are set to zero as well.
///
/// Errors with [`Error::DomainError`] at equal inventories, where the
/// competitive game is identically zero and no direction is distinguished.
pub fn competitive_fixed_point(
    inventories: (f64, f64),
    epsilon_margin: f64,
) -> Result<((f64, f64), (f64, f64))> {
    if !epsilon_margin.is_finite() || epsilon_margin <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "margin must be positive, got {epsilon_margin}"
        )));
    }
    let (inv_taker, inv_maker) = inventories;
    if inv_taker == inv_maker {
        return Err(Error::DomainError(
            "equal inventories make the competitive game identically zero".into(),
        ));
    }
    let v = (0.0, 0.0);
    let k = if inv_taker > inv_maker {
        ((f_alpha(0.0) - epsilon_margin).max(0.0), 0.0)
    } else {
        (0.0, (f_beta(0.0).min_finite(1.0) - epsilon_margin).max(0.0))
    };
    Ok((v, k))
}

/// True iff the argmax set of the player's reward `R` over the candidate
/// fraction pairs equals the argmax set of the collaborative utility `U`.
///
/// `R = (I^p / I_total) U` with a positive ratio whenever `I^p > 0`, so the
/// sets coincide: the two games are strategically equivalent. Exact value
/// ties scale together because equal inputs produce bit-equal outputs.
#[must_use]
pub fn strategic_equivalence_check(ctx: &GameContext, k_grid: &[(f64, f64)]) -> bool {
    fn argmax_set(values: &[f64]) -> Vec<usize> {
        let mut best = f64::NEG_INFINITY;
        for &v in values {
            if v > best {
                best = v;
            }
        }
        values
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v == best)
            .map(|(i, _)| i)
            .collect()
    }

    let mut rewards = Vec::with_capacity(k_grid.len());
    let mut utilities = Vec::with_capacity(k_grid.len());
    for &(k_alpha, k_beta) in k_grid {
        let mut params = ctx.params;
        params.k_alpha = k_alpha;
        params.k_beta = k_beta;
        let candidate = GameContext {
            state: ctx.state,
            params,
            noise_mean: ctx.noise_mean,
        };
        rewards.push(reward_r(&candidate, crate::market::Player::Taker));
        utilities.push(utility_u(&candidate));
    }
    argmax_set(&rewards) == argmax_set(&utilities)
}
