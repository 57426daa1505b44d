//! The parametric strategy family played on top of the protocol.
//!
//! The maker scales its quotes inversely with the square root of what can
//! actually trade: `alpha = v_alpha * P / sqrt(A)` and
//! `beta = -v_beta * P / sqrt(B)`, where `A = min(I_maker, C_taker / P)` is
//! the largest buy the pair can settle and `B = min(C_maker / P, I_taker)`
//! the largest sell. The taker responds with the bound fraction
//! `Q = +k_alpha^2 * A` with probability `phi` and `Q = -k_beta^2 * B`
//! otherwise.
//!
//! Substituting the quotes into the square-root impact collapses the bound:
//! `delta = alpha * sqrt(k_alpha^2 A) = v_alpha * k_alpha * P` on buys and
//! `-v_beta * k_beta * P` on sells. Every executed round therefore moves the
//! price by the exact relative amount `+v_alpha k_alpha` or
//! `-v_beta k_beta`, whatever the state. [`strategy_round`] computes the
//! impact in this product form so the identity holds bit for bit; the quote
//! route `alpha * sqrt(Q)` is algebraically identical and cross-checked in
//! tests.
//!
//! The branch coin is an explicit input rather than an internal draw, so
//! episodes are replayable and tests can force either branch.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{self, MarketState, Quotes, TradeRecord};

/// Parameters `(phi, k_alpha, k_beta, v_alpha, v_beta)` of the family.
///
/// `phi` is the buy probability; the `k` pair fixes which fraction of the
/// tradable bound the taker trades on each side; the `v` pair fixes how
/// aggressively the maker quotes against those bounds. All five are finite,
/// the four strategy coefficients nonnegative, `phi` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyParams {
    /// Probability of the buy branch.
    pub phi: f64,
    /// Taker buy fraction coefficient (`Q = +k_alpha^2 A`).
    pub k_alpha: f64,
    /// Taker sell fraction coefficient (`Q = -k_beta^2 B`).
    pub k_beta: f64,
    /// Maker ask illiquidity coefficient.
    pub v_alpha: f64,
    /// Maker bid illiquidity coefficient.
    pub v_beta: f64,
}

impl StrategyParams {
    /// Validates ranges: finite values, nonnegative coefficients, `phi` a
    /// probability.
    pub fn new(phi: f64, k_alpha: f64, k_beta: f64, v_alpha: f64, v_beta: f64) -> Result<Self> {
        if !phi.is_finite() || !(0.0..=1.0).contains(&phi) {
            return Err(Error::InvalidParameter(format!(
                "phi must lie in [0, 1], got {phi}"
            )));
        }
        for (name, value) in [
            ("k_alpha", k_alpha),
            ("k_beta", k_beta),
            ("v_alpha", v_alpha),
            ("v_beta", v_beta),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and nonnegative, got {value}"
                )));
            }
        }
        Ok(Self {
            phi,
            k_alpha,
            k_beta,
            v_alpha,
            v_beta,
        })
    }

    /// The running example profile: every coefficient one half.
    #[must_use]
    pub fn all_half(phi: f64) -> Self {
        Self {
            phi,
            k_alpha: 0.5,
            k_beta: 0.5,
            v_alpha: 0.5,
            v_beta: 0.5,
        }
    }

    /// Zero-impact profile (`k = v = 0`): quantities and impacts vanish, the
    /// price follows the bare noise. The reference path of the collusion
    /// definition.
    #[must_use]
    pub fn benchmark(phi: f64) -> Self {
        Self {
            phi,
            k_alpha: 0.0,
            k_beta: 0.0,
            v_alpha: 0.0,
            v_beta: 0.0,
        }
    }

    /// Reduced ask coordinate `x = v_alpha * k_alpha`.
    #[must_use]
    pub fn x(&self) -> f64 {
        self.v_alpha * self.k_alpha
    }

    /// Reduced bid coordinate `y = v_beta * k_beta`.
    #[must_use]
    pub fn y(&self) -> f64 {
        self.v_beta * self.k_beta
    }
}

/// Largest settleable buy (`ask_bound`, the quantity `A`) and sell
/// (`bid_bound`, the quantity `B`) at the current state, in asset units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradableBounds {
    /// `A = min(I_maker, C_taker / P)`.
    pub ask_bound: f64,
    /// `B = min(C_maker / P, I_taker)`.
    pub bid_bound: f64,
}

/// Recomputes both bounds from the state.
#[must_use]
pub fn tradable_bounds(state: &MarketState) -> TradableBounds {
    TradableBounds {
        ask_bound: state.maker.inventory.min(state.taker.cash / state.price),
        bid_bound: (state.maker.cash / state.price).min(state.taker.inventory),
    }
}

/// The maker's quotes at the given state and bounds.
///
/// Errors with [`Error::DegenerateBounds`] when either bound is zero: the
/// corresponding side cannot trade and has no finite quote.
pub fn maker_quotes(
    params: &StrategyParams,
    state: &MarketState,
    bounds: &TradableBounds,
) -> Result<Quotes> {
    if bounds.ask_bound <= 0.0 {
        return Err(Error::DegenerateBounds("ask bound"));
    }
    if bounds.bid_bound <= 0.0 {
        return Err(Error::DegenerateBounds("bid bound"));
    }
    Quotes::new(
        params.v_alpha * state.price / bounds.ask_bound.sqrt(),
        -(params.v_beta * state.price / bounds.bid_bound.sqrt()),
    )
}

/// The taker's signed quantity for the drawn branch: `+k_alpha^2 A` when
/// `buy`, `-k_beta^2 B` otherwise.
#[must_use]
pub fn taker_quantity(params: &StrategyParams, bounds: &TradableBounds, buy: bool) -> f64 {
    if buy {
        params.k_alpha * params.k_alpha * bounds.ask_bound
    } else {
        -(params.k_beta * params.k_beta * bounds.bid_bound)
    }
}

/// Plays one full round: bounds, quotes, quantity, execution, noise.
///
/// The impact is computed in the exact product form
/// `+-(v * k) * P`. A branch whose quantity is zero (zero coefficient, or a
/// bound that has underflowed to zero) degenerates to a no-trade round: the
/// accounts are untouched and the price advances by the noise factor alone.
/// For the record, a zero-bound side is quoted `0.0`, the sentinel for "no
/// finite quote exists, the side cannot trade".
pub fn strategy_round(
    params: &StrategyParams,
    state: &MarketState,
    noise: f64,
    buy: bool,
) -> Result<(MarketState, TradeRecord)> {
    let bounds = tradable_bounds(state);
    let quotes = Quotes {
        alpha: if bounds.ask_bound > 0.0 {
            params.v_alpha * state.price / bounds.ask_bound.sqrt()
        } else {
            0.0
        },
        beta: if bounds.bid_bound > 0.0 {
            -(params.v_beta * state.price / bounds.bid_bound.sqrt())
        } else {
            0.0
        },
    };
    let quantity = taker_quantity(params, &bounds, buy);
    let impact = if quantity == 0.0 {
        0.0
    } else if buy {
        params.v_alpha * params.k_alpha * state.price
    } else {
        -(params.v_beta * params.k_beta * state.price)
    };
    market::apply_trade_with_impact(state, quotes, quantity, impact, noise)
}

/// The exact relative impact `delta / P` of the drawn branch, `0.0` for a
/// degenerate (zero-quantity) round. This is the value [`strategy_round`]
/// scaled by the price, published so recorded series can carry it without a
/// rounding division.
#[must_use]
pub fn branch_rel_impact(params: &StrategyParams, buy: bool, quantity: f64) -> f64 {
    if quantity == 0.0 {
        0.0
    } else if buy {
        params.v_alpha * params.k_alpha
    } else {
        -(params.v_beta * params.k_beta)
    }
}
