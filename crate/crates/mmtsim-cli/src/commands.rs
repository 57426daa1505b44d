//! One function per subcommand. Each resolves its inputs from the merged
//! [`Config`], validates feasibility before any run starts, executes through
//! the library, and writes artifacts into the output directory.

use std::path::{Path, PathBuf};

use anyhow::{Context, bail};
use mmtsim::collusion::{classify, g_of_x, kappa, mu_eta, r_of_y, sigma_eta};
use mmtsim::feasibility::{AxisSpec, GridSpec, brute_force_region, params_feasible};
use mmtsim::learning::{
    BlockUpdateSpec, Dynamic, PgaConfig, run_learning, tau_bounds,
};
use mmtsim::market::{MarketState, NoiseModel, PlayerAccount, social_welfare};
use mmtsim::sim::{RunConfig, run_monte_carlo};
use mmtsim::strategy::StrategyParams;
use mmtsim::util::{mean_std, standard_error};
use mmtsim::verify::verify_module;
use mmtsim::collusion::{Classification, ReducedCoords};

use crate::artifacts::{
    BoundsRecord, SimulationSummary, TauReport, TauRow, TrajectoryRow, write_plot_csvs,
    write_region_csv, write_rounds_csv, write_table,
};
use crate::config::{Config, DynamicKind, StartKind};

/// Builds the configured strategy profile and rejects an infeasible one
/// before anything runs, naming the binding constraint.
fn feasible_params(section: &crate::config::StrategySection) -> anyhow::Result<StrategyParams> {
    let params = StrategyParams::new(
        section.phi,
        section.k_alpha,
        section.k_beta,
        section.v_alpha,
        section.v_beta,
    )?;
    let verdict = params_feasible(&params);
    if !verdict.feasible {
        bail!(
            "strategy profile is infeasible (binding constraint: {})",
            verdict.binding_constraint
        );
    }
    Ok(params)
}

/// Creates the output directory and records the effective configuration
/// next to the artifacts it produced.
fn ensure_out_dir(config: &Config) -> anyhow::Result<PathBuf> {
    let dir = config.output.dir.clone();
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    std::fs::write(dir.join("config.toml"), config.to_toml()?)?;
    Ok(dir)
}

/// `simulate`: Monte Carlo run, per-round table, figure panels, summary.
pub fn simulate(config: &Config) -> anyhow::Result<()> {
    let params = feasible_params(&config.strategy)?;
    let noise = NoiseModel::new(config.market.log_mean, config.market.log_std)?;
    let account = PlayerAccount::new(config.market.initial_cash, config.market.initial_inventory)?;
    let initial = MarketState::new(config.market.initial_price, account, account)?;
    let run_config = RunConfig::new(
        params,
        noise,
        config.sim.rounds,
        config.sim.trials,
        config.sim.seed,
    )?
    .with_initial(initial)
    .with_benchmark(config.sim.record_benchmark);

    let output = run_monte_carlo(&run_config)?;
    let dir = ensure_out_dir(config)?;

    let rounds_path = dir.join("rounds.csv");
    write_rounds_csv(&rounds_path, &output.runs)?;
    let mut paths = vec![rounds_path];
    paths.extend(write_plot_csvs(&dir, &output.stats)?);

    let finals: Vec<f64> = output.runs.iter().map(|r| r.final_state.price).collect();
    let (final_price_mean, final_price_std) = mean_std(&finals);
    let welfare: Vec<f64> = output
        .runs
        .iter()
        .map(|r| social_welfare(&r.final_state))
        .collect();
    let (final_welfare_mean, final_welfare_std) = mean_std(&welfare);
    let etas: Vec<f64> = output
        .runs
        .iter()
        .map(|r| mmtsim::collusion::drift_diagnostics(r).mean_log_eta)
        .collect();
    let (mean_log_eta, _) = mean_std(&etas);

    let summary = SimulationSummary {
        phi: params.phi,
        k_alpha: params.k_alpha,
        k_beta: params.k_beta,
        v_alpha: params.v_alpha,
        v_beta: params.v_beta,
        log_noise_mean: noise.log_mean(),
        log_noise_std: noise.log_std(),
        rounds: config.sim.rounds,
        trials: config.sim.trials,
        seed: config.sim.seed,
        classification: classify(&params),
        mu_eta: mu_eta(&params)?,
        sigma_eta: sigma_eta(&params)?,
        kappa: kappa(&params),
        drift_mean: output.stats.drift_mean,
        drift_std: output.stats.drift_std,
        mean_log_eta,
        final_price_mean,
        final_price_std,
        final_welfare_mean,
        final_welfare_std,
    };
    paths.push(write_table(
        &dir,
        "summary",
        config.output.format,
        std::slice::from_ref(&summary),
    )?);

    println!(
        "simulated {} trials x {} rounds (classification: {:?})",
        config.sim.trials,
        config.sim.rounds,
        classify(&params)
    );
    report_paths(&paths);
    Ok(())
}

/// The learner start profile for a given selector and phi.
pub fn start_profile(start: StartKind, phi: f64) -> anyhow::Result<StrategyParams> {
    let params = match start {
        StartKind::Default => StrategyParams::new(phi, 0.0, 0.5, 1.0, 1.0)?,
        StartKind::Collusive => StrategyParams::new(phi, 0.5, 0.0, 1.0, 0.0)?,
    };
    Ok(params)
}

/// `learn`: learner episodes, one trajectory table, stopping-time report.
pub fn learn(config: &Config) -> anyhow::Result<()> {
    let phi = config.strategy.phi;
    let start = start_profile(config.learning.start, phi)?;
    let verdict = params_feasible(&start);
    if !verdict.feasible {
        bail!(
            "learner start is infeasible (binding constraint: {})",
            verdict.binding_constraint
        );
    }

    let section = &config.learning;
    let dynamic = match section.dynamic {
        DynamicKind::Block => Dynamic::Block(BlockUpdateSpec::new(
            section.delta_min,
            section.delta_max,
            section.delta_min,
            section.delta_max,
        )?),
        DynamicKind::Pga => Dynamic::Pga(PgaConfig::uniform(section.eta)?),
    };

    let trials = config.sim.trials.max(1);
    let max_steps = section.max_steps;
    let mut tau_rows = Vec::with_capacity(trials as usize);
    let mut taus = Vec::new();
    let mut trajectory_rows = Vec::new();
    for trial in 0..trials {
        let seed = config.sim.seed.wrapping_add(trial);
        let (trajectory, tau) = run_learning(start, &dynamic, max_steps, seed)?;
        if trial == 0 {
            for state in &trajectory {
                trajectory_rows.push(TrajectoryRow {
                    step: state.step,
                    v_alpha: state.params.v_alpha,
                    k_alpha: state.params.k_alpha,
                    v_beta: state.params.v_beta,
                    k_beta: state.params.k_beta,
                    x: state.x,
                    y: state.y,
                    mu_eta: mu_eta(&state.params)?,
                    collusive_flag: classify(&state.params) == Classification::Collusive,
                });
            }
        }
        tau_rows.push(TauRow { trial, seed, tau });
        if let Some(t) = tau {
            taus.push(t as f64);
        }
    }

    let (tau_mean, _) = if taus.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        mean_std(&taus)
    };
    let x0 = start.x();
    let y0 = start.y();
    let gap_r = (r_of_y(y0, phi)? - x0).max(0.0);
    let gap_g = (y0 - g_of_x(x0, phi)).max(0.0);
    let (upper_bound, lower_bound) = match (section.dynamic, &dynamic) {
        (DynamicKind::Block, Dynamic::Block(spec)) => {
            let bounds = tau_bounds(&ReducedCoords { x: x0, y: y0 }, phi, spec)?;
            (bounds.upper, bounds.lower)
        }
        // For gradient ascent only the buy-side guarantee is available:
        // each alpha draw gains at least eta * (v_alpha initial)^2.
        _ => {
            let min_gain = section.eta * start.v_alpha * start.v_alpha;
            let upper = if gap_r == 0.0 {
                0.0
            } else {
                (gap_r / min_gain).ceil() / phi
            };
            (upper, 0.0)
        }
    };

    let report = TauReport {
        dynamic: section.dynamic,
        phi,
        x0,
        y0,
        trials,
        max_steps,
        reached: taus.len() as u64,
        tau_mean,
        tau_std_error: if taus.is_empty() {
            f64::NAN
        } else {
            standard_error(&taus)
        },
        gap_r,
        gap_g,
        upper_bound,
        lower_bound,
    };

    let dir = ensure_out_dir(config)?;
    let trajectory_path = dir.join("trajectory.csv");
    crate::artifacts::write_csv(&trajectory_path, &trajectory_rows)?;
    let taus_path = dir.join("taus.csv");
    crate::artifacts::write_csv(&taus_path, &tau_rows)?;
    let report_path = write_table(
        &dir,
        "tau_report",
        config.output.format,
        std::slice::from_ref(&report),
    )?;

    println!(
        "ran {} learner episodes ({:?} dynamic, {} steps): {}/{} reached collusion, mean tau {:.3}",
        trials, section.dynamic, max_steps, report.reached, trials, tau_mean
    );
    println!(
        "stopping-time bounds: lower {:.3}, upper {:.3}",
        lower_bound, upper_bound
    );
    report_paths(&[trajectory_path, taus_path, report_path]);
    Ok(())
}

/// `feasibility-map`: analytic verdicts against the brute-force oracle.
pub fn feasibility_map(config: &Config) -> anyhow::Result<()> {
    let section = &config.feasibility;
    let grid = GridSpec {
        v_alpha: AxisSpec::new(section.v_alpha_min, section.v_alpha_max, section.v_alpha_steps)?,
        k_alpha: AxisSpec::new(section.k_alpha_min, section.k_alpha_max, section.k_alpha_steps)?,
        v_beta: AxisSpec::new(section.v_beta_min, section.v_beta_max, section.v_beta_steps)?,
        k_beta: AxisSpec::new(section.k_beta_min, section.k_beta_max, section.k_beta_steps)?,
    };
    let phi = config.strategy.phi;
    let points = brute_force_region(phi, &grid, section.rounds, section.trials, config.sim.seed)?;

    let dir = ensure_out_dir(config)?;
    let path = dir.join("region.csv");
    write_region_csv(&path, phi, &points)?;

    let feasible = points.iter().filter(|p| p.analytic.feasible).count();
    let agree = points
        .iter()
        .filter(|p| p.analytic.feasible == p.empirical)
        .count();
    println!(
        "mapped {} grid points: {} analytically feasible, oracle agrees on {}",
        points.len(),
        feasible,
        agree
    );
    report_paths(&[path]);
    Ok(())
}

/// `bounds`: the stopping-time sandwich for a reduced-coordinate start.
pub fn bounds(config: &Config) -> anyhow::Result<()> {
    let section = &config.learning;
    let spec = BlockUpdateSpec::new(
        section.delta_min,
        section.delta_max,
        section.delta_min,
        section.delta_max,
    )?;
    let start = ReducedCoords {
        x: config.bounds.x0,
        y: config.bounds.y0,
    };
    let phi = config.strategy.phi;
    let result = tau_bounds(&start, phi, &spec)?;

    let record = BoundsRecord {
        x0: start.x,
        y0: start.y,
        phi,
        delta_alpha_min: spec.delta_alpha_min,
        delta_alpha_max: spec.delta_alpha_max,
        delta_beta_min: spec.delta_beta_min,
        delta_beta_max: spec.delta_beta_max,
        gap_r: result.gap_r,
        gap_g: result.gap_g,
        upper_bound: result.upper,
        lower_bound: result.lower,
    };
    let dir = ensure_out_dir(config)?;
    let path = write_table(
        &dir,
        "bounds",
        config.output.format,
        std::slice::from_ref(&record),
    )?;

    println!(
        "stopping-time bounds from (x = {}, y = {}) at phi = {}: lower {:.6}, upper {:.6}",
        start.x, start.y, phi, result.lower, result.upper
    );
    println!(
        "threshold gaps: r(y0) - x0 = {:.6}, y0 - g(x0) = {:.6}",
        result.gap_r, result.gap_g
    );
    report_paths(&[path]);
    Ok(())
}

/// `verify`: runs a module's property suites (or all) and reports.
pub fn verify(config: &Config, module: &str) -> anyhow::Result<()> {
    let outcomes = verify_module(module, config.sim.seed)?;
    for outcome in &outcomes {
        let mark = if outcome.passed { "PASS" } else { "FAIL" };
        println!(
            "{mark} {}::{} - {}",
            outcome.module, outcome.name, outcome.detail
        );
    }
    let dir = ensure_out_dir(config)?;
    let path = write_table(&dir, "report", config.output.format, &outcomes)?;
    report_paths(&[path]);

    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed > 0 {
        bail!("{failed} of {} checks failed", outcomes.len());
    }
    println!("all {} checks passed", outcomes.len());
    Ok(())
}

fn report_paths(paths: &[PathBuf]) {
    for path in paths {
        println!("wrote {}", display_clean(path));
    }
}

fn display_clean(path: &Path) -> String {
    path.display().to_string()
}
