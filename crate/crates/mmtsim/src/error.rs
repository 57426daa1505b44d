//! Crate-wide error type.
//!
//! Trade execution never clamps: a trade that would drive an account to or
//! below zero, or the post-impact price to or below zero, is rejected with an
//! error and the state is left untouched. Constructors validate their numeric
//! preconditions eagerly so downstream code can assume finite, in-range
//! fields.

/// Errors produced by state transitions, quoting, and learning updates.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A constructor argument was out of range (non-finite, negative where a
    /// nonnegative value is required, or a probability outside [0, 1]).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Executing the trade would leave the named account at or below zero.
    #[error("infeasible trade: {account} would become {value} (must stay positive)")]
    InfeasibleTrade {
        /// Account that would be exhausted, e.g. `"taker cash"`.
        account: &'static str,
        /// Post-trade value the account would take.
        value: f64,
    },

    /// The post-impact execution price `P + delta` is not strictly positive.
    #[error("non-positive price: P + delta = {exec_price} (P = {price}, delta = {impact})")]
    NonPositivePrice {
        /// Pre-trade price.
        price: f64,
        /// Realized impact.
        impact: f64,
        /// `price + impact`.
        exec_price: f64,
    },

    /// A quote was requested for a side whose tradable bound is zero.
    #[error("degenerate bounds: {0} is zero, the side cannot be quoted")]
    DegenerateBounds(&'static str),

    /// A function was evaluated outside its mathematical domain.
    #[error("domain error: {0}")]
    DomainError(String),

    /// No feasible parameter assignment realizes the requested product
    /// change. Unreachable for the shipped realization rule (the boundary
    /// product v * f_alpha(v) is unbounded), kept for API completeness.
    #[error("infeasible update: {0}")]
    InfeasibleUpdate(String),

    /// Gradient dynamics started from a stationary initialization
    /// (`v_alpha = k_alpha = 0`), from which no ascent direction exists.
    #[error("degenerate initialization: {0}")]
    DegenerateInit(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
