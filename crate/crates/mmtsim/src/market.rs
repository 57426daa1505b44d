//! Market state and one-round trade execution.
//!
//! Two players share a single asset. Each round the maker publishes an ask
//! illiquidity `alpha >= 0` and a bid illiquidity `beta <= 0`, the taker picks
//! a signed quantity `Q`, the trade moves the price by the square-root impact
//! `delta = alpha * sqrt(Q)` for buys and `beta * sqrt(-Q)` for sells, cash
//! `Q * (P + delta)` changes hands at the average execution price, and the
//! post-impact price is then scaled by an exogenous positive noise factor:
//! `P' = (P + delta) * eps`.
//!
//! Execution never clamps. A trade that would exhaust an account or drive the
//! execution price to or below zero is rejected with an error; keeping
//! parameters inside the region where that cannot happen is the feasibility
//! module's job.
//!
//! Totals are conserved: inventory moves from one player to the other,
//! cash likewise, so total inventory and total cash are invariant over any
//! trade sequence (up to float rounding, tested at 1e-12 relative).

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifies one of the two players.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Player {
    /// Sets the illiquidity quotes.
    Maker,
    /// Chooses the traded quantity.
    Taker,
}

/// One player's holdings: cash and asset inventory, both nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlayerAccount {
    /// Currency units.
    pub cash: f64,
    /// Asset units.
    pub inventory: f64,
}

impl PlayerAccount {
    /// Validates a nonnegative, finite account.
    pub fn new(cash: f64, inventory: f64) -> Result<Self> {
        if !cash.is_finite() || cash < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "account cash must be finite and nonnegative, got {cash}"
            )));
        }
        if !inventory.is_finite() || inventory < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "account inventory must be finite and nonnegative, got {inventory}"
            )));
        }
        Ok(Self { cash, inventory })
    }
}

/// Markov state of the protocol: price, both accounts, round counter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketState {
    /// Current price, strictly positive.
    pub price: f64,
    /// Maker holdings.
    pub maker: PlayerAccount,
    /// Taker holdings.
    pub taker: PlayerAccount,
    /// Rounds executed so far.
    pub round: u64,
}

impl MarketState {
    /// Validates a starting state at round zero.
    pub fn new(price: f64, maker: PlayerAccount, taker: PlayerAccount) -> Result<Self> {
        if !price.is_finite() || price <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "price must be finite and strictly positive, got {price}"
            )));
        }
        Ok(Self {
            price,
            maker,
            taker,
            round: 0,
        })
    }

    /// Unit start: price 1 and one unit of cash and inventory per player.
    #[must_use]
    pub fn unit() -> Self {
        Self {
            price: 1.0,
            maker: PlayerAccount {
                cash: 1.0,
                inventory: 1.0,
            },
            taker: PlayerAccount {
                cash: 1.0,
                inventory: 1.0,
            },
            round: 0,
        }
    }

    /// Holdings of `player`.
    #[must_use]
    pub fn account(&self, player: Player) -> &PlayerAccount {
        match player {
            Player::Maker => &self.maker,
            Player::Taker => &self.taker,
        }
    }

    /// Total inventory across both players (a conserved quantity).
    #[must_use]
    pub fn total_inventory(&self) -> f64 {
        self.maker.inventory + self.taker.inventory
    }

    /// Total cash across both players (a conserved quantity).
    #[must_use]
    pub fn total_cash(&self) -> f64 {
        self.maker.cash + self.taker.cash
    }
}

/// Log-normal noise `eps = exp(log_mean + log_std * z)`, `z ~ N(0, 1)`.
///
/// Parameterized by the mean and standard deviation of `log eps`, not of
/// `eps` itself: the collusion drift criterion lives in log space, and the
/// driftless benchmark corresponds to `log_mean = 0`. Two derived means
/// matter and must not be confused:
///
/// * [`NoiseModel::log_mean`]: `E[log eps]`, the per-round benchmark drift;
/// * [`NoiseModel::mean_eps`]: `E[eps] = exp(log_mean + log_var / 2)`, the
///   multiplicative mean used by the one-shot game utilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    log_mean: f64,
    log_std: f64,
}

impl NoiseModel {
    /// Validates `log_mean` finite and `log_std` finite nonnegative.
    pub fn new(log_mean: f64, log_std: f64) -> Result<Self> {
        if !log_mean.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise log_mean must be finite, got {log_mean}"
            )));
        }
        if !log_std.is_finite() || log_std < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "noise log_std must be finite and nonnegative, got {log_std}"
            )));
        }
        Ok(Self { log_mean, log_std })
    }

    /// Default experiment noise: `log eps ~ N(0, 1/4)`, i.e. driftless in
    /// log space with standard deviation one half.
    #[must_use]
    pub fn standard() -> Self {
        Self {
            log_mean: 0.0,
            log_std: 0.5,
        }
    }

    /// Unit-mean variant: `E[eps] = 1` via `log_mean = -log_std^2 / 2`.
    pub fn unit_mean(log_std: f64) -> Result<Self> {
        let model = Self::new(0.0, log_std)?;
        Ok(Self {
            log_mean: -model.log_var() / 2.0,
            log_std,
        })
    }

    /// Degenerate noise `eps = 1` every round.
    #[must_use]
    pub fn degenerate() -> Self {
        Self {
            log_mean: 0.0,
            log_std: 0.0,
        }
    }

    /// `E[log eps]`.
    #[must_use]
    pub fn log_mean(&self) -> f64 {
        self.log_mean
    }

    /// Standard deviation of `log eps`.
    #[must_use]
    pub fn log_std(&self) -> f64 {
        self.log_std
    }

    /// Variance of `log eps`.
    #[must_use]
    pub fn log_var(&self) -> f64 {
        self.log_std * self.log_std
    }

    /// `E[eps] = exp(log_mean + log_var / 2)`, strictly positive.
    #[must_use]
    pub fn mean_eps(&self) -> f64 {
        (self.log_mean + self.log_var() / 2.0).exp()
    }

    /// Draws `log eps`. Always consumes exactly one normal variate, even in
    /// the degenerate case, so coupled runs with different noise parameters
    /// stay draw-aligned on a shared stream.
    pub fn sample_log<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        self.log_mean + self.log_std * z
    }

    /// Draws `eps = exp(log eps)`, strictly positive.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_log(rng).exp()
    }
}

/// Published illiquidity quotes: ask `alpha >= 0`, bid `beta <= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quotes {
    /// Ask-side impact coefficient, nonnegative.
    pub alpha: f64,
    /// Bid-side impact coefficient, nonpositive.
    pub beta: f64,
}

impl Quotes {
    /// Validates the sign constraints.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must be finite and nonnegative, got {alpha}"
            )));
        }
        if !beta.is_finite() || beta > 0.0 {
            return Err(Error::InvalidParameter(format!(
                "beta must be finite and nonpositive, got {beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// Zero-impact quotes (perfectly liquid market).
    #[must_use]
    pub fn zero() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
        }
    }
}

/// Everything observable about one executed round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeRecord {
    /// Signed traded quantity `Q` (positive: taker buys).
    pub quantity: f64,
    /// Quotes in force during the round.
    pub quotes: Quotes,
    /// Realized impact `delta` in price units.
    pub impact: f64,
    /// Average execution price `P + delta`.
    pub exec_price: f64,
    /// Cash paid by the taker, `Q * (P + delta)`.
    pub cash_exchanged: f64,
    /// Noise factor applied after the trade.
    pub noise: f64,
    /// Post-round price `(P + delta) * noise`.
    pub next_price: f64,
}

/// Square-root impact of trading `quantity` against `quotes`.
///
/// `alpha * sqrt(Q)` for `Q >= 0`, `beta * sqrt(-Q)` for `Q < 0`; total on
/// all inputs and zero at `Q = 0`.
#[must_use]
pub fn impact_delta(quotes: &Quotes, quantity: f64) -> f64 {
    if quantity >= 0.0 {
        quotes.alpha * quantity.sqrt()
    } else {
        quotes.beta * (-quantity).sqrt()
    }
}

/// Executes one round against `state` and returns the successor state plus
/// its [`TradeRecord`].
///
/// Errors with [`Error::NonPositivePrice`] if `P + delta <= 0`, and with
/// [`Error::InfeasibleTrade`] if a nonzero trade would leave any account at
/// or below zero. A zero-quantity round is the identity on accounts: only
/// the round counter and the noise-scaled price advance.
pub fn apply_trade(
    state: &MarketState,
    quotes: Quotes,
    quantity: f64,
    noise: f64,
) -> Result<(MarketState, TradeRecord)> {
    let impact = impact_delta(&quotes, quantity);
    apply_trade_with_impact(state, quotes, quantity, impact, noise)
}

/// Trade execution with the impact supplied by the caller.
///
/// The strategy layer computes `delta` in its algebraically exact product
/// form; this shared primitive keeps the two routes identical in everything
/// but the impact arithmetic.
pub(crate) fn apply_trade_with_impact(
    state: &MarketState,
    quotes: Quotes,
    quantity: f64,
    impact: f64,
    noise: f64,
) -> Result<(MarketState, TradeRecord)> {
    if !quantity.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "trade quantity must be finite, got {quantity}"
        )));
    }
    if !noise.is_finite() || noise <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "noise must be finite and strictly positive, got {noise}"
        )));
    }
    let exec_price = state.price + impact;
    if exec_price <= 0.0 {
        return Err(Error::NonPositivePrice {
            price: state.price,
            impact,
            exec_price,
        });
    }
    let cash_exchanged = quantity * exec_price;
    let taker = PlayerAccount {
        cash: state.taker.cash - cash_exchanged,
        inventory: state.taker.inventory + quantity,
    };
    let maker = PlayerAccount {
        cash: state.maker.cash + cash_exchanged,
        inventory: state.maker.inventory - quantity,
    };
    // A zero-quantity round moves nothing, so an account already at zero is
    // not "exhausted" by it; positivity is enforced only for actual trades.
    if quantity != 0.0 {
        if taker.cash <= 0.0 {
            return Err(Error::InfeasibleTrade {
                account: "taker cash",
                value: taker.cash,
            });
        }
        if taker.inventory <= 0.0 {
            return Err(Error::InfeasibleTrade {
                account: "taker inventory",
                value: taker.inventory,
            });
        }
        if maker.cash <= 0.0 {
            return Err(Error::InfeasibleTrade {
                account: "maker cash",
                value: maker.cash,
            });
        }
        if maker.inventory <= 0.0 {
            return Err(Error::InfeasibleTrade {
                account: "maker inventory",
                value: maker.inventory,
            });
        }
    }
    let next_price = exec_price * noise;
    if next_price <= 0.0 || !next_price.is_finite() {
        return Err(Error::NonPositivePrice {
            price: state.price,
            impact,
            exec_price: next_price,
        });
    }
    let next = MarketState {
        price: next_price,
        maker,
        taker,
        round: state.round + 1,
    };
    let record = TradeRecord {
        quantity,
        quotes,
        impact,
        exec_price,
        cash_exchanged,
        noise,
        next_price,
    };
    Ok((next, record))
}

/// Mark-to-market wealth of `player`: cash plus price times inventory.
#[must_use]
pub fn wealth(state: &MarketState, player: Player) -> f64 {
    let account = state.account(player);
    account.cash + state.price * account.inventory
}

/// Total mark-to-market wealth in the system.
///
/// Computed as `wealth(maker) + wealth(taker)` so additivity holds bit for
/// bit; algebraically equal to `C_total + P * I_total`.
#[must_use]
pub fn social_welfare(state: &MarketState) -> f64 {
    wealth(state, Player::Maker) + wealth(state, Player::Taker)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;
    use rand::Rng;

    fn quotes_half() -> Quotes {
        Quotes::new(0.5, -0.5).unwrap()
    }

    #[test]
    fn impact_matches_hand_computation() {
        let q = quotes_half();
        assert_eq!(impact_delta(&q, 0.25), 0.25);
        assert_eq!(impact_delta(&q, 0.0), 0.0);
        assert_eq!(impact_delta(&q, -0.25), -0.25);
    }

    #[test]
    fn buy_trade_hand_trace() {
        // P=1, unit accounts, alpha=0.5, Q=0.25, eps=1:
        // delta=0.25, cash=0.25*1.25=0.3125, P'=1.25.
        let (next, record) = apply_trade(&MarketState::unit(), quotes_half(), 0.25, 1.0).unwrap();
        assert_eq!(record.impact, 0.25);
        assert_eq!(record.exec_price, 1.25);
        assert_eq!(record.cash_exchanged, 0.3125);
        assert_eq!(next.taker.inventory, 1.25);
        assert_eq!(next.taker.cash, 0.6875);
        assert_eq!(next.maker.inventory, 0.75);
        assert_eq!(next.maker.cash, 1.3125);
        assert_eq!(next.price, 1.25);
        assert_eq!(next.round, 1);
    }

    #[test]
    fn sell_trade_hand_trace() {
        // beta=-0.5, Q=-0.25: delta=-0.25, cash=-0.25*0.75=-0.1875, P'=0.75.
        let (next, record) = apply_trade(&MarketState::unit(), quotes_half(), -0.25, 1.0).unwrap();
        assert_eq!(record.impact, -0.25);
        assert_eq!(record.cash_exchanged, -0.1875);
        assert_eq!(next.taker.inventory, 0.75);
        assert_eq!(next.taker.cash, 1.1875);
        assert_eq!(next.maker.inventory, 1.25);
        assert_eq!(next.maker.cash, 0.8125);
        assert_eq!(next.price, 0.75);
    }

    #[test]
    fn zero_quantity_is_identity_up_to_noise() {
        let state = MarketState::unit();
        let (next, record) = apply_trade(&state, quotes_half(), 0.0, 1.0).unwrap();
        assert_eq!(next.maker, state.maker);
        assert_eq!(next.taker, state.taker);
        assert_eq!(next.price, 1.0);
        assert_eq!(next.round, 1);
        assert_eq!(record.impact, 0.0);

        // With noise, only the price moves.
        let (next, _) = apply_trade(&state, Quotes::zero(), 0.0, 1.5).unwrap();
        assert_eq!(next.price, 1.5);
        assert_eq!(next.taker, state.taker);
    }

    #[test]
    fn exhausted_account_is_rejected() {
        let mut state = MarketState::unit();
        state.taker.cash = 0.2;
        let err = apply_trade(&state, quotes_half(), 0.25, 1.0).unwrap_err();
        assert!(matches!(
            err,
            Error::InfeasibleTrade {
                account: "taker cash",
                ..
            }
        ));
    }

    #[test]
    fn non_positive_exec_price_is_rejected() {
        let quotes = Quotes::new(0.0, -2.0).unwrap();
        let err = apply_trade(&MarketState::unit(), quotes, -1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::NonPositivePrice { .. }));
    }

    #[test]
    fn wealth_examples() {
        let state = MarketState::unit();
        assert_eq!(wealth(&state, Player::Taker), 2.0);

        let (next, _) = apply_trade(&state, quotes_half(), 0.25, 1.0).unwrap();
        // Taker: 0.6875 + 1.25 * 1.25 = 2.25.
        assert_eq!(wealth(&next, Player::Taker), 2.25);

        let cashless = MarketState::new(
            2.0,
            PlayerAccount::new(0.0, 3.0).unwrap(),
            PlayerAccount::new(1.0, 1.0).unwrap(),
        )
        .unwrap();
        assert_eq!(wealth(&cashless, Player::Maker), 6.0);
    }

    #[test]
    fn welfare_examples_and_additivity() {
        let state = MarketState::unit();
        assert_eq!(social_welfare(&state), 4.0);

        let (buy, _) = apply_trade(&state, quotes_half(), 0.25, 1.0).unwrap();
        assert_eq!(social_welfare(&buy), 4.5);

        let (sell, _) = apply_trade(&state, quotes_half(), -0.25, 1.0).unwrap();
        assert_eq!(social_welfare(&sell), 3.5);

        // Bit-identical additivity by construction.
        assert_eq!(
            social_welfare(&buy),
            wealth(&buy, Player::Maker) + wealth(&buy, Player::Taker)
        );
    }

    #[test]
    fn noise_model_derived_means() {
        let standard = NoiseModel::standard();
        assert_eq!(standard.log_mean(), 0.0);
        assert_eq!(standard.log_var(), 0.25);
        assert!((standard.mean_eps() - 0.125f64.exp()).abs() < 1e-15);

        let unit = NoiseModel::unit_mean(0.5).unwrap();
        assert!((unit.mean_eps() - 1.0).abs() < 1e-15);
        assert!(unit.log_mean() < 0.0);

        assert_eq!(NoiseModel::degenerate().mean_eps(), 1.0);
    }

    #[test]
    fn noise_samples_are_positive_with_correct_log_mean() {
        let model = NoiseModel::standard();
        let mut rng = rng::stream(7, 0, rng::CHECK);
        let n = 1_000_000u32;
        let mut acc = crate::util::Kahan::new();
        for _ in 0..n {
            let log_eps = model.sample_log(&mut rng);
            assert!(log_eps.exp() > 0.0);
            acc.add(log_eps);
        }
        // 5 sigma band for the mean of 10^6 draws with sigma = 1/2.
        let band = 5.0 * model.log_std() / (f64::from(n)).sqrt();
        assert!(
            (acc.value() / f64::from(n)).abs() < band,
            "sample mean {} outside {band}",
            acc.value() / f64::from(n)
        );
    }

    #[test]
    fn degenerate_noise_still_consumes_one_draw() {
        let mut a = rng::stream(3, 0, rng::CHECK);
        let mut b = rng::stream(3, 0, rng::CHECK);
        let eps = NoiseModel::degenerate().sample(&mut a);
        assert_eq!(eps, 1.0);
        let _skipped: f64 = b.sample(rand_distr::StandardNormal);
        // Streams stay aligned after the degenerate draw.
        assert_eq!(a.random::<u64>(), b.random::<u64>());
    }

    #[test]
    fn constructor_validation() {
        assert!(MarketState::new(
            0.0,
            PlayerAccount::new(1.0, 1.0).unwrap(),
            PlayerAccount::new(1.0, 1.0).unwrap()
        )
        .is_err());
        assert!(PlayerAccount::new(-1.0, 0.0).is_err());
        assert!(PlayerAccount::new(f64::NAN, 0.0).is_err());
        assert!(Quotes::new(-0.1, 0.0).is_err());
        assert!(Quotes::new(0.1, 0.1).is_err());
        assert!(NoiseModel::new(f64::INFINITY, 0.5).is_err());
        assert!(NoiseModel::new(0.0, -0.5).is_err());
        assert!(apply_trade(&MarketState::unit(), Quotes::zero(), 0.0, 0.0).is_err());
        assert!(apply_trade(&MarketState::unit(), Quotes::zero(), f64::NAN, 1.0).is_err());
    }

    #[test]
    fn zero_impact_baseline_tracks_noise_product() {
        // With Q = 0 throughout, the price is the running product of noise.
        let model = NoiseModel::standard();
        let mut rng = rng::stream(11, 0, rng::CHECK);
        let mut state = MarketState::unit();
        let mut product = 1.0f64;
        for _ in 0..200 {
            let eps = model.sample(&mut rng);
            product *= eps;
            state = apply_trade(&state, Quotes::zero(), 0.0, eps).unwrap().0;
        }
        assert!((state.price - product).abs() <= 1e-12 * product.abs());
    }

    proptest! {
        #[test]
        fn conservation_over_random_trade_sequences(seed in 0u64..1000) {
            let mut rng = rng::stream(seed, 0, rng::CHECK);
            let mut state = MarketState::unit();
            let total_cash = state.total_cash();
            let total_inv = state.total_inventory();
            for _ in 0..300 {
                // Small random trades that stay comfortably feasible.
                let quotes = Quotes::new(rng.random::<f64>() * 0.4, -rng.random::<f64>() * 0.4).unwrap();
                let q = (rng.random::<f64>() - 0.5) * 0.02 * state.total_inventory();
                let eps = NoiseModel::standard().sample(&mut rng);
                match apply_trade(&state, quotes, q, eps) {
                    Ok((next, record)) => {
                        // Price recursion: next/noise - impact recovers the pre-trade price.
                        let recovered = record.next_price / record.noise - record.impact;
                        prop_assert!((recovered - state.price).abs() <= 1e-12 * state.price);
                        state = next;
                    }
                    Err(_) => break,
                }
                prop_assert!((state.total_cash() - total_cash).abs() <= 1e-12 * total_cash);
                prop_assert!((state.total_inventory() - total_inv).abs() <= 1e-12 * total_inv);
            }
        }
    }
}
