//! Two-player market simulation and analysis engine.
//!
//! A maker quotes square-root price impact, a taker trades against it, and
//! exogenous multiplicative noise moves the price between rounds. The crate
//! implements the protocol state machine, the parametric strategy family on
//! top of it, the analytic feasibility and collusion criteria for that
//! family, the one-shot game decomposition, randomized learning dynamics with
//! stopping-time bounds, and a seeded Monte-Carlo engine that reproduces the
//! reference experiments.
//!
//! Modules, bottom up:
//!
//! * [`market`]: protocol state, one-round execution, wealth accounting.
//! * [`strategy`]: the `(phi, k_alpha, k_beta, v_alpha, v_beta)` strategy
//!   family, tradable bounds, quote and quantity rules.
//! * [`feasibility`]: the analytic feasible region (cubic root `f_alpha`,
//!   reciprocal `f_beta`), per-step verdicts, brute-force region mapping.
//! * [`collusion`]: reduced coordinates, the per-round log drift `mu_eta`,
//!   profile classification, drift diagnostics.
//! * [`games`]: one-shot reward, its zero-sum and common-interest parts,
//!   best responses, the competitive fixed point.
//! * [`learning`]: block-coordinate and projected-gradient dynamics with
//!   expected-stopping-time bounds.
//! * [`sim`]: seeded episodes, Monte-Carlo aggregation, positivity probe.
//! * [`verify`]: the property suites behind the `verify` subcommand.
//!
//! Determinism: all randomness flows through [`rng::stream`], which derives
//! one ChaCha8 stream per (seed, stream index, purpose) triple, so every
//! entry point is reproducible bit for bit given its seed, with or without
//! the `parallel` feature.
//!
//! The `parallel` feature (default on) runs Monte-Carlo trials and grid
//! sweeps on a rayon pool. Sequential twins (`*_sequential`) are always
//! compiled, return identical results, and back the benchmark comparison.

pub mod collusion;
pub mod error;
pub mod feasibility;
pub mod games;
pub mod learning;
pub mod market;
pub mod rng;
pub mod sim;
pub mod strategy;
pub mod util;
pub mod verify;

pub use error::{Error, Result};
pub use market::{
    MarketState, NoiseModel, Player, PlayerAccount, Quotes, TradeRecord, apply_trade,
    impact_delta, social_welfare, wealth,
};
pub use strategy::{StrategyParams, TradableBounds, maker_quotes, strategy_round, taker_quantity, tradable_bounds};
