//! Seeded runtime property suites.
//!
//! Each `verify_*` function replays one module's documented invariants as
//! executable checks and reports a [`CheckOutcome`] per invariant. The CLI
//! `verify` subcommand drives them; the library test suite runs heavier
//! variants of the same properties with frozen oracles. All sampling is
//! seeded through [`rng::stream`], so a report is reproducible from its
//! seed.

use serde::Serialize;

use crate::collusion::{
    Classification, ReducedCoords, classify, g_of_x, kappa, mu_eta, r_of_y, sigma_eta,
};
use crate::error::Error;
use crate::feasibility::{
    AxisSpec, GridSpec, KBound, boundary_distance, brute_force_region, cardano_f_alpha, f_alpha,
    f_beta, params_feasible,
};
use crate::games::{
    GameContext, decomposition_residual, strategic_equivalence_check, utility_z,
};
use crate::learning::{
    BlockUpdateSpec, Dynamic, LearnerState, PgaConfig, block_coordinate_step, pga_step,
    run_learning, tau_bounds,
};
use crate::market::{
    MarketState, NoiseModel, Player, PlayerAccount, social_welfare, wealth,
};
use crate::rng;
use crate::sim::{RunConfig, run_episode, run_monte_carlo};
use crate::strategy::{StrategyParams, branch_rel_impact, strategy_round, tradable_bounds};
use crate::util::{Kahan, mean_std};
use rand::Rng;

/// Result of one named property check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    /// Module the property belongs to.
    pub module: &'static str,
    /// Short property name.
    pub name: &'static str,
    /// Whether the property held.
    pub passed: bool,
    /// What was checked, or how it failed.
    pub detail: String,
}

impl CheckOutcome {
    fn new(module: &'static str, name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            module,
            name,
            passed,
            detail,
        }
    }
}

/// Rejection-samples a feasible profile with `phi` in `[0.1, 0.9]`.
fn sample_feasible(rng: &mut impl Rng) -> StrategyParams {
    loop {
        let params = StrategyParams::new(
            0.1 + 0.8 * rng.random::<f64>(),
            rng.random::<f64>(),
            rng.random::<f64>(),
            rng.random::<f64>() * 2.0,
            rng.random::<f64>() * 2.0,
        )
        .expect("draws are in range");
        if params_feasible(&params).feasible {
            return params;
        }
    }
}

/// A random strictly positive market state.
fn sample_state(rng: &mut impl Rng) -> MarketState {
    MarketState::new(
        0.5 + 1.5 * rng.random::<f64>(),
        PlayerAccount::new(0.5 + rng.random::<f64>(), 0.5 + rng.random::<f64>()).unwrap(),
        PlayerAccount::new(0.5 + rng.random::<f64>(), 0.5 + rng.random::<f64>()).unwrap(),
    )
    .unwrap()
}

/// Protocol-level conservation, recursion and accounting identities.
pub fn verify_market(seed: u64) -> Vec<CheckOutcome> {
    const MODULE: &str = "market";
    let mut out = Vec::new();

    // Conservation and the price recursion over random feasible play.
    let mut rng = rng::stream(seed, 0, rng::CHECK);
    let mut max_cash_dev: f64 = 0.0;
    let mut max_inv_dev: f64 = 0.0;
    let mut max_recursion_dev: f64 = 0.0;
    let mut rounds = 0u64;
    for _ in 0..40 {
        let params = sample_feasible(&mut rng);
        let mut state = MarketState::unit();
        let cash0 = state.total_cash();
        let inv0 = state.total_inventory();
        for _ in 0..120 {
            let buy = rng.random::<f64>() < params.phi;
            let eps = (0.3 * rng.sample::<f64, _>(rand_distr::StandardNormal)).exp();
            let (next, record) = strategy_round(&params, &state, eps, buy)
                .expect("feasible profiles never violate accounts");
            max_cash_dev = max_cash_dev.max((next.total_cash() - cash0).abs() / cash0);
            max_inv_dev = max_inv_dev.max((next.total_inventory() - inv0).abs() / inv0);
            let recovered = record.next_price / record.noise - record.impact;
            max_recursion_dev =
                max_recursion_dev.max((recovered - state.price).abs() / state.price);
            state = next;
            rounds += 1;
        }
    }
    out.push(CheckOutcome::new(
        MODULE,
        "conservation",
        max_cash_dev <= 1e-12 && max_inv_dev <= 1e-12,
        format!(
            "{rounds} rounds over 40 feasible profiles; max relative drift: cash {max_cash_dev:.2e}, inventory {max_inv_dev:.2e} (tolerance 1e-12)"
        ),
    ));
    out.push(CheckOutcome::new(
        MODULE,
        "price_recursion",
        max_recursion_dev <= 1e-12,
        format!(
            "next_price/noise - impact recovers the pre-trade price; max relative deviation {max_recursion_dev:.2e} over {rounds} rounds (tolerance 1e-12)"
        ),
    ));

    // Welfare additivity is an exact identity.
    let mut rng = rng::stream(seed, 1, rng::CHECK);
    let additive = (0..1000).all(|_| {
        let state = sample_state(&mut rng);
        social_welfare(&state) == wealth(&state, Player::Maker) + wealth(&state, Player::Taker)
    });
    out.push(CheckOutcome::new(
        MODULE,
        "welfare_additivity",
        additive,
        "social welfare equals the sum of player wealths bit for bit on 1000 random states"
            .into(),
    ));

    // Zero-impact baseline: the price is the bare noise product.
    let cfg = RunConfig::new(
        StrategyParams::benchmark(0.5),
        NoiseModel::standard(),
        300,
        1,
        seed,
    )
    .expect("benchmark profile is feasible");
    let run = run_episode(&cfg, 0).expect("benchmark run cannot fail");
    let mut product = cfg.initial.price;
    for &eps in &run.noise {
        product *= eps;
    }
    let dev = (run.final_state.price - product).abs() / product;
    out.push(CheckOutcome::new(
        MODULE,
        "zero_impact_baseline",
        dev <= 1e-12,
        format!(
            "300 no-trade rounds: final price vs noise product, relative deviation {dev:.2e} (tolerance 1e-12)"
        ),
    ));
    out
}

/// Strategy-family identities: exact relative impact, scale covariance,
/// bound safety.
pub fn verify_strategy(seed: u64) -> Vec<CheckOutcome> {
    const MODULE: &str = "strategy";
    let mut out = Vec::new();

    let mut rng = rng::stream(seed, 2, rng::CHECK);
    let mut exact = true;
    for _ in 0..1000 {
        let params = sample_feasible(&mut rng);
        let state = sample_state(&mut rng);
        let buy = rng.random::<f64>() < params.phi;
        let Ok((_, record)) = strategy_round(&params, &state, 1.0, buy) else {
            exact = false;
            break;
        };
        let rel = branch_rel_impact(&params, buy, record.quantity);
        let on_support = rel == params.x() || rel == -params.y() || rel == 0.0;
        if !on_support || record.impact != rel * state.price {
            exact = false;
            break;
        }
    }
    out.push(CheckOutcome::new(
        MODULE,
        "relative_impact_identity",
        exact,
        "delta/P sits exactly on {+v_a k_a, -v_b k_b, 0} for 1000 random rounds".into(),
    ));

    let mut rng = rng::stream(seed, 3, rng::CHECK);
    let mut max_cash_dev: f64 = 0.0;
    let mut rel_stable = true;
    for _ in 0..300 {
        let params = sample_feasible(&mut rng);
        let state = sample_state(&mut rng);
        let scale = 0.1 + 10.0 * rng.random::<f64>();
        let scaled = MarketState {
            price: state.price * scale,
            maker: PlayerAccount {
                cash: state.maker.cash * scale,
                inventory: state.maker.inventory,
            },
            taker: PlayerAccount {
                cash: state.taker.cash * scale,
                inventory: state.taker.inventory,
            },
            round: state.round,
        };
        let buy = rng.random::<f64>() < params.phi;
        let (_, base) = strategy_round(&params, &state, 1.0, buy).expect("feasible");
        let (_, big) = strategy_round(&params, &scaled, 1.0, buy).expect("feasible");
        if base.cash_exchanged != 0.0 {
            let dev = (big.cash_exchanged / (base.cash_exchanged * scale) - 1.0).abs();
            max_cash_dev = max_cash_dev.max(dev);
        }
        rel_stable &= branch_rel_impact(&params, buy, big.quantity)
            == branch_rel_impact(&params, buy, base.quantity);
    }
    out.push(CheckOutcome::new(
        MODULE,
        "scale_covariance",
        max_cash_dev <= 1e-12 && rel_stable,
        format!(
            "scaling price and cash rescales exchanged cash (max relative deviation {max_cash_dev:.2e}, tolerance 1e-12) and leaves delta/P unchanged exactly"
        ),
    ));

    let mut rng = rng::stream(seed, 4, rng::CHECK);
    let mut safe = true;
    for _ in 0..1000 {
        let params = sample_feasible(&mut rng);
        let state = sample_state(&mut rng);
        let bounds = tradable_bounds(&state);
        let buy = rng.random::<f64>() < params.phi;
        let q = crate::strategy::taker_quantity(&params, &bounds, buy);
        if q != 0.0 && q.abs() >= bounds.ask_bound.max(bounds.bid_bound) {
            safe = false;
            break;
        }
    }
    out.push(CheckOutcome::new(
        MODULE,
        "bounds_safety",
        safe,
        "|Q| < max(A, B) on 1000 random rounds with fractions below one".into(),
    ));
    out
}

/// Feasible-region analytics against the brute-force oracle.
pub fn verify_feasibility(seed: u64) -> Vec<CheckOutcome> {
    const MODULE: &str = "feasibility";
    let mut out = Vec::new();

    let mut rng = rng::stream(seed, 5, rng::CHECK);
    let mut max_residual: f64 = 0.0;
    for _ in 0..1000 {
        let v = rng.random::<f64>() * 1e4;
        let k = f_alpha(v);
        max_residual = max_residual.max((k * k * (k * v + 1.0) - 1.0).abs());
    }
    out.push(CheckOutcome::new(
        MODULE,
        "root_property",
        max_residual <= 1e-12,
        format!(
            "f_alpha satisfies its cubic on 1000 draws of v in [0, 1e4]; max |residual| {max_residual:.2e} (tolerance 1e-12)"
        ),
    ));

    let mut rng = rng::stream(seed, 6, rng::CHECK);
    let threshold = 2.0 / 27f64.sqrt();
    let mut max_gap: f64 = 0.0;
    for _ in 0..1000 {
        let v = threshold + rng.random::<f64>() * 50.0;
        let closed = cardano_f_alpha(v).expect("above the discriminant threshold");
        max_gap = max_gap.max((closed - f_alpha(v)).abs());
    }
    out.push(CheckOutcome::new(
        MODULE,
        "cardano_agreement",
        max_gap <= 1e-10,
        format!(
            "closed form vs numeric root on 1000 draws above 2/sqrt(27); max gap {max_gap:.2e} (tolerance 1e-10)"
        ),
    ));

    let mut rng = rng::stream(seed, 7, rng::CHECK);
    let mut vs: Vec<f64> = (0..500).map(|_| 1e-3 + rng.random::<f64>() * 100.0).collect();
    vs.sort_by(f64::total_cmp);
    vs.dedup();
    let alpha_monotone = vs.windows(2).all(|w| f_alpha(w[1]) < f_alpha(w[0]));
    let beta_monotone = vs.windows(2).all(|w| {
        match (f_beta(w[0]), f_beta(w[1])) {
            (KBound::Finite(a), KBound::Finite(b)) => b < a,
            _ => false,
        }
    });
    out.push(CheckOutcome::new(
        MODULE,
        "monotonicity",
        alpha_monotone && beta_monotone,
        "f_alpha and f_beta strictly decrease across 500 sorted draws on (0, 100]".into(),
    ));

    let grid = GridSpec {
        v_alpha: AxisSpec::new(0.0, 3.0, 6).unwrap(),
        k_alpha: AxisSpec::new(0.05, 0.95, 6).unwrap(),
        v_beta: AxisSpec::fixed(0.5),
        k_beta: AxisSpec::fixed(0.5),
    };
    let points = brute_force_region(0.5, &grid, 600, 3, seed).expect("grid is valid");
    let mut compared = 0;
    let mut skipped = 0;
    let mut disagreements = 0;
    for point in &points {
        if boundary_distance(&point.params) < 1e-3 {
            skipped += 1;
            continue;
        }
        compared += 1;
        if point.analytic.feasible != point.empirical {
            disagreements += 1;
        }
    }
    out.push(CheckOutcome::new(
        MODULE,
        "region_agreement",
        disagreements == 0,
        format!(
            "analytic vs brute-force verdicts on a 36-point slice (600 rounds x 3 trials): {disagreements} disagreements over {compared} points, {skipped} near-boundary points excluded"
        ),
    ));

    let mut rng = rng::stream(seed, 8, rng::CHECK);
    let mut nested = true;
    for _ in 0..2000 {
        let params = StrategyParams::new(
            0.1 + 0.8 * rng.random::<f64>(),
            rng.random::<f64>() * 1.2,
            rng.random::<f64>() * 1.2,
            rng.random::<f64>() * 2.0,
            rng.random::<f64>() * 2.0,
        )
        .unwrap();
        let verdict = params_feasible(&params);
        if classify(&params) == Classification::Collusive && !verdict.feasible {
            nested = false;
        }
        if verdict.feasible && !verdict.price_positive {
            nested = false;
        }
    }
    out.push(CheckOutcome::new(
        MODULE,
        "nesting",
        nested,
        "collusive implies feasible implies price-positive on 2000 random profiles".into(),
    ));
    out
}

/// Collusion-criterion equivalences and drift statistics.
pub fn verify_collusion(seed: u64) -> Vec<CheckOutcome> {
    const MODULE: &str = "collusion";
    let mut out = Vec::new();

    let mut rng = rng::stream(seed, 9, rng::CHECK);
    let mut checked = 0;
    let mut equivalent = true;
    while checked < 10_000 {
        let params = sample_feasible(&mut rng);
        let mu = mu_eta(&params).expect("feasible profiles are price-positive");
        if mu.abs() <= 1e-9 {
            continue;
        }
        checked += 1;
        let coords = ReducedCoords::of(&params);
        let by_r = coords.x > r_of_y(coords.y, params.phi).expect("y < 1");
        let by_g = coords.y < g_of_x(coords.x, params.phi);
        if (mu > 0.0) != by_r || (mu > 0.0) != by_g {
            equivalent = false;
            break;
        }
    }
    out.push(CheckOutcome::new(
        MODULE,
        "criterion_equivalence",
        equivalent,
        "mu_eta > 0, x > r(y) and y < g(x) agree on 10000 feasible profiles (boundary band 1e-9 excluded)"
            .into(),
    ));

    let mut rng = rng::stream(seed, 10, rng::CHECK);
    let mut max_gap: f64 = 0.0;
    for _ in 0..1000 {
        let phi = 0.1 + 0.8 * rng.random::<f64>();
        let x = rng.random::<f64>() * 3.0;
        let y = rng.random::<f64>() * 0.95;
        let gx = g_of_x(x, phi);
        max_gap = max_gap.max((r_of_y(gx, phi).unwrap() - x).abs());
        max_gap = max_gap.max((g_of_x(r_of_y(y, phi).unwrap(), phi) - y).abs());
    }
    out.push(CheckOutcome::new(
        MODULE,
        "inverse_pair",
        max_gap <= 1e-10,
        format!("r(g(x)) = x and g(r(y)) = y on 1000 draws; max gap {max_gap:.2e} (tolerance 1e-10)"),
    ));

    let params = StrategyParams::all_half(0.7);
    let cfg = RunConfig::new(params, NoiseModel::standard(), 500, 1, seed).unwrap();
    let run = run_episode(&cfg, 0).unwrap();
    let up = 1.0 + params.x();
    let down = 1.0 - params.y();
    let on_support = run
        .rel_impact
        .iter()
        .all(|&rel| 1.0 + rel == up || 1.0 + rel == down);
    out.push(CheckOutcome::new(
        MODULE,
        "eta_support",
        on_support,
        "every realized eta over 500 rounds equals one of the two analytic values exactly".into(),
    ));

    let cfg = RunConfig::new(params, NoiseModel::standard(), 3000, 1, seed ^ 0x5eed).unwrap();
    let run = run_episode(&cfg, 0).unwrap();
    let mut sum = Kahan::new();
    for &rel in &run.rel_impact {
        sum.add(rel);
    }
    let mean = sum.value() / run.rel_impact.len() as f64;
    let spread = (params.phi * (1.0 - params.phi)).sqrt() * (params.x() + params.y());
    let band = 3.0 * spread / 3000f64.sqrt();
    let gap = (mean - kappa(&params)).abs();
    out.push(CheckOutcome::new(
        MODULE,
        "drift_consistency",
        gap < band,
        format!(
            "time-average of delta/P over 3000 rounds vs kappa: gap {gap:.2e}, 3-standard-error band {band:.2e}"
        ),
    ));
    out
}

/// One-shot game decomposition and equivalence properties.
pub fn verify_games(seed: u64) -> Vec<CheckOutcome> {
    const MODULE: &str = "games";
    let mut out = Vec::new();

    let mut rng = rng::stream(seed, 11, rng::CHECK);
    let mut zero_sum = true;
    let mut max_residual: f64 = 0.0;
    for _ in 0..1000 {
        let ctx = GameContext::new(
            sample_state(&mut rng),
            sample_feasible(&mut rng),
            0.5 + rng.random::<f64>(),
        )
        .unwrap();
        if utility_z(&ctx, Player::Taker) + utility_z(&ctx, Player::Maker) != 0.0 {
            zero_sum = false;
        }
        let (taker, maker) = decomposition_residual(&ctx);
        let scale = crate::games::reward_r(&ctx, Player::Taker).abs() + 1.0;
        max_residual = max_residual.max(taker.abs() / scale);
        let scale = crate::games::reward_r(&ctx, Player::Maker).abs() + 1.0;
        max_residual = max_residual.max(maker.abs() / scale);
    }
    out.push(CheckOutcome::new(
        MODULE,
        "zero_sum",
        zero_sum,
        "Z_taker + Z_maker is exactly zero on 1000 random contexts".into(),
    ));
    out.push(CheckOutcome::new(
        MODULE,
        "decomposition",
        max_residual <= 1e-12,
        format!(
            "R = Z/2 + U/2 on 1000 random contexts; max scaled residual {max_residual:.2e} (tolerance 1e-12)"
        ),
    ));

    // The potential property: per-round U predicts the welfare increment.
    let params = StrategyParams::all_half(0.7);
    let noise = NoiseModel::standard();
    let horizon = 30u64;
    let cfg = RunConfig::new(params, noise, horizon, 1000, seed).unwrap();
    let c = noise.mean_eps() * (1.0 + kappa(&params)) - 1.0;
    let total_inventory = cfg.initial.total_inventory();
    let mut diffs = Vec::with_capacity(1000);
    for trial in 0..1000 {
        let run = run_episode(&cfg, trial).unwrap();
        let mut u_sum = Kahan::new();
        for t in 0..horizon as usize {
            let pre_price = if t == 0 {
                cfg.initial.price
            } else {
                run.price[t - 1]
            };
            u_sum.add(c * pre_price * total_inventory);
        }
        let increment = social_welfare(&run.final_state) - social_welfare(&cfg.initial);
        diffs.push(increment - u_sum.value());
    }
    let (mean, std) = mean_std(&diffs);
    let se = (std / (diffs.len() as f64).sqrt()).max(1e-12);
    out.push(CheckOutcome::new(
        MODULE,
        "potential_telescoping",
        mean.abs() <= 3.0 * se,
        format!(
            "welfare increment minus summed per-round U over 1000 episodes: mean {mean:.2e}, 3-standard-error band {:.2e}",
            3.0 * se
        ),
    ));

    let mut rng = rng::stream(seed, 12, rng::CHECK);
    let mut invariant = true;
    for _ in 0..200 {
        let ctx = GameContext::new(
            sample_state(&mut rng),
            sample_feasible(&mut rng),
            0.5 + rng.random::<f64>(),
        )
        .unwrap();
        let grid: Vec<(f64, f64)> = (0..25)
            .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
            .collect();
        if !strategic_equivalence_check(&ctx, &grid) {
            invariant = false;
            break;
        }
    }
    out.push(CheckOutcome::new(
        MODULE,
        "argmax_invariance",
        invariant,
        "reward and collaborative-utility argmax sets coincide on 200 contexts with 25-point fraction grids"
            .into(),
    ));
    out
}

/// Learning-dynamic invariance, monotonicity and stopping-time bounds.
pub fn verify_learning(seed: u64) -> Vec<CheckOutcome> {
    const MODULE: &str = "learning";
    let mut out = Vec::new();

    let mut rng = rng::stream(seed, 13, rng::CHECK);
    let mut checked = 0;
    let mut exits = 0;
    while checked < 10_000 {
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
        let next = if rng.random::<f64>() < 0.5 || (params.v_alpha == 0.0 && params.k_alpha == 0.0)
        {
            let spec = BlockUpdateSpec::new(
                0.01 + 0.1 * rng.random::<f64>(),
                0.2 + 0.3 * rng.random::<f64>(),
                0.01 + 0.1 * rng.random::<f64>(),
                0.2 + 0.3 * rng.random::<f64>(),
            )
            .unwrap();
            block_coordinate_step(&state, &spec, alpha_draw, rng.random::<f64>()).unwrap()
        } else {
            let cfg = PgaConfig::uniform(0.01 + 0.2 * rng.random::<f64>()).unwrap();
            pga_step(&state, &cfg, alpha_draw).unwrap()
        };
        if classify(&next.params) != Classification::Collusive {
            exits += 1;
        }
    }
    out.push(CheckOutcome::new(
        MODULE,
        "forward_invariance",
        exits == 0,
        format!("{exits} exits from the collusive region over 10000 random admissible updates"),
    ));

    let spec = BlockUpdateSpec::fixed(0.05).unwrap();
    let start = StrategyParams::new(0.5, 0.0, 0.5, 1.0, 1.0).unwrap();
    let mut slack_ok = true;
    for run_seed in 0..20 {
        let (trajectory, _) =
            run_learning(start, &Dynamic::Block(spec), 120, seed ^ run_seed).unwrap();
        for pair in trajectory.windows(2) {
            let moved = pair[1].x != pair[0].x || pair[1].y != pair[0].y;
            if moved {
                let s0 = pair[0].x - r_of_y(pair[0].y, start.phi).unwrap();
                let s1 = pair[1].x - r_of_y(pair[1].y, start.phi).unwrap();
                // Moves below fp resolution (clearing dust off the y floor)
                // shift slack by less than one ulp of x.
                let resolvable =
                    pair[1].x - pair[0].x > 1e-9 || pair[0].y - pair[1].y > 1e-9;
                if (resolvable && s1 <= s0) || s1 < s0 - 1e-12 {
                    slack_ok = false;
                }
            }
        }
    }
    out.push(CheckOutcome::new(
        MODULE,
        "monotone_slack",
        slack_ok,
        "x - r(y) strictly increases across every moving step of 20 block trajectories".into(),
    ));

    let spec = BlockUpdateSpec::fixed(0.1).unwrap();
    let bounds = tau_bounds(&ReducedCoords { x: 0.0, y: 0.5 }, 0.5, &spec).unwrap();
    let mut taus = Vec::with_capacity(1000);
    let mut all_finite = true;
    for run_seed in 0..1000 {
        let (_, tau) = run_learning(start, &Dynamic::Block(spec), 200, run_seed).unwrap();
        match tau {
            Some(t) => taus.push(t as f64),
            None => all_finite = false,
        }
    }
    let (mean, std) = mean_std(&taus);
    let se = std / (taus.len() as f64).sqrt();
    let sandwiched =
        all_finite && mean >= bounds.lower - 3.0 * se && mean <= bounds.upper + 3.0 * se;
    out.push(CheckOutcome::new(
        MODULE,
        "bound_sandwich",
        sandwiched,
        format!(
            "mean stopping time over 1000 block runs: {mean:.3} in [{:.3} - {:.1e}, {:.3} + {:.1e}]",
            bounds.lower,
            3.0 * se,
            bounds.upper,
            3.0 * se
        ),
    ));

    let cfg = PgaConfig::uniform(0.1).unwrap();
    let mut min_gain = f64::INFINITY;
    let mut gain_ok = true;
    for run_seed in 0..100 {
        let (trajectory, _) =
            run_learning(start, &Dynamic::Pga(cfg), 100, seed ^ (run_seed + 31)).unwrap();
        for pair in trajectory.windows(2) {
            if pair[1].x != pair[0].x {
                let gain = pair[1].x - pair[0].x;
                min_gain = min_gain.min(gain);
                if gain < cfg.eta_k_alpha * 1.0 - 1e-12 {
                    gain_ok = false;
                }
            }
        }
    }
    out.push(CheckOutcome::new(
        MODULE,
        "pga_min_increment",
        gain_ok,
        format!(
            "every gradient alpha-step gained at least eta_k (v0)^2 = 0.1 - 1e-12 over 100 runs; min gain {min_gain:.12}"
        ),
    ));

    let mut reached = 0;
    for run_seed in 0..10_000 {
        let (_, tau) = run_learning(start, &Dynamic::Block(spec), 300, run_seed).unwrap();
        if tau.is_some() {
            reached += 1;
        }
    }
    out.push(CheckOutcome::new(
        MODULE,
        "almost_sure_reach",
        reached == 10_000,
        format!("{reached}/10000 block runs from a non-collusive start stopped before 300 steps"),
    ));
    out
}

/// Simulation-engine determinism, coupling, ordering and aggregation.
pub fn verify_sim(seed: u64) -> Vec<CheckOutcome> {
    const MODULE: &str = "sim";
    let mut out = Vec::new();

    let params = StrategyParams::all_half(0.7);
    let noise = NoiseModel::standard();
    let cfg = RunConfig::new(params, noise, 400, 4, seed).unwrap();
    let first = run_monte_carlo(&cfg).unwrap();
    let second = run_monte_carlo(&cfg).unwrap();
    out.push(CheckOutcome::new(
        MODULE,
        "seed_determinism",
        first == second,
        "re-running 4 trials of 400 rounds reproduces runs and statistics bit for bit".into(),
    ));

    let zero = RunConfig::new(StrategyParams::benchmark(0.7), noise, 400, 1, seed).unwrap();
    let run = run_episode(&zero, 0).unwrap();
    let coincide = run.benchmark_price.as_deref() == Some(run.price.as_slice());
    let trials = 10u64;
    let horizon = 1500u64;
    let cfg = RunConfig::new(params, noise, horizon, trials, seed).unwrap();
    let mc = run_monte_carlo(&cfg).unwrap();
    let mut slopes = Vec::with_capacity(trials as usize);
    for run in &mc.runs {
        slopes.push((run.log_price_total - run.log_benchmark_total) / horizon as f64);
    }
    let (slope_mean, _) = mean_std(&slopes);
    let mu = mu_eta(&params).unwrap();
    let sigma = sigma_eta(&params).unwrap();
    let band = 3.0 * sigma / ((trials * horizon) as f64).sqrt();
    let slope_ok = (slope_mean - mu).abs() < band;
    out.push(CheckOutcome::new(
        MODULE,
        "benchmark_coupling",
        coincide && slope_ok,
        format!(
            "zero-impact path equals the benchmark bitwise; drift-profile log ratio grows at slope {slope_mean:.5} vs mu_eta {mu:.5} (band {band:.1e})"
        ),
    ));

    let plus = RunConfig::new(params, noise, 3000, 100, seed).unwrap();
    let minus = RunConfig::new(StrategyParams::all_half(0.3), noise, 3000, 100, seed).unwrap();
    let mut wins = 0;
    for trial in 0..100 {
        let wp = social_welfare(&run_episode(&plus, trial).unwrap().final_state);
        let wm = social_welfare(&run_episode(&minus, trial).unwrap().final_state);
        if wp > wm {
            wins += 1;
        }
    }
    out.push(CheckOutcome::new(
        MODULE,
        "welfare_ordering",
        wins >= 99,
        format!(
            "positive-drift final welfare beat the negative-drift profile in {wins}/100 paired seeds at horizon 3000 (needs >= 99)"
        ),
    ));

    let idle = RunConfig::new(
        StrategyParams::benchmark(0.5),
        NoiseModel::degenerate(),
        60,
        5,
        seed,
    )
    .unwrap();
    let stats = run_monte_carlo(&idle).unwrap().stats;
    let exact = stats.price.mean.iter().all(|&m| m == 1.0)
        && stats.price.std.iter().all(|&s| s == 0.0)
        && stats.quantity.mean.iter().all(|&m| m == 0.0)
        && stats.drift_mean == 0.0
        && stats.drift_std == 0.0;
    out.push(CheckOutcome::new(
        MODULE,
        "aggregation_correctness",
        exact,
        "constant synthetic series aggregate to mean = constant and std = 0 exactly".into(),
    ));
    out
}

/// Every suite, in module order.
pub fn verify_all(seed: u64) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    out.extend(verify_market(seed));
    out.extend(verify_strategy(seed));
    out.extend(verify_feasibility(seed));
    out.extend(verify_collusion(seed));
    out.extend(verify_games(seed));
    out.extend(verify_learning(seed));
    out.extend(verify_sim(seed));
    out
}

/// The suites for one module name, or all of them.
pub fn verify_module(module: &str, seed: u64) -> crate::error::Result<Vec<CheckOutcome>> {
    match module {
        "market" => Ok(verify_market(seed)),
        "strategy" => Ok(verify_strategy(seed)),
        "feasibility" => Ok(verify_feasibility(seed)),
        "collusion" => Ok(verify_collusion(seed)),
        "games" => Ok(verify_games(seed)),
        "learning" => Ok(verify_learning(seed)),
        "sim" => Ok(verify_sim(seed)),
        "all" => Ok(verify_all(seed)),
        other => Err(Error::InvalidParameter(format!(
            "unknown module {other:?}; expected one of market, strategy, feasibility, collusion, games, learning, sim, all"
        ))),
    }
}
