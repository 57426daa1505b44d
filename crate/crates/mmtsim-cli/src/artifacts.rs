//! CSV and JSON artifact writers.
//!
//! Every float is written by serde through the shortest round-trip
//! representation, so identical runs produce byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use mmtsim::collusion::Classification;
use mmtsim::feasibility::RegionPoint;
use mmtsim::sim::{AggregateStats, RunResult};
use serde::Serialize;

use crate::config::{DynamicKind, Format};

/// Writes one serializable row per element, with a header row.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> anyhow::Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes a table as `stem.csv` or `stem.json` under `dir`.
pub fn write_table<T: Serialize>(
    dir: &Path,
    stem: &str,
    format: Format,
    rows: &[T],
) -> anyhow::Result<PathBuf> {
    match format {
        Format::Csv => {
            let path = dir.join(format!("{stem}.csv"));
            write_csv(&path, rows)?;
            Ok(path)
        }
        Format::Json => {
            let path = dir.join(format!("{stem}.json"));
            let file = File::create(&path)
                .with_context(|| format!("cannot create {}", path.display()))?;
            let mut writer = BufWriter::new(file);
            serde_json::to_writer_pretty(&mut writer, rows)?;
            writer.write_all(b"\n")?;
            writer.flush()?;
            Ok(path)
        }
    }
}

/// One `rounds.csv` row: everything observable after round `t` of a trial.
#[derive(Serialize)]
struct RoundRow {
    trial: u64,
    t: u64,
    #[serde(rename = "P")]
    price: f64,
    #[serde(rename = "Q")]
    quantity: f64,
    cash_exchanged_exec: f64,
    cash_exchanged_next: f64,
    #[serde(rename = "I_T")]
    inv_taker: f64,
    #[serde(rename = "I_M")]
    inv_maker: f64,
    #[serde(rename = "C_T")]
    cash_taker: f64,
    #[serde(rename = "C_M")]
    cash_maker: f64,
    #[serde(rename = "W_T")]
    wealth_taker: f64,
    #[serde(rename = "W_M")]
    wealth_maker: f64,
    rel_impact: f64,
    #[serde(rename = "A")]
    ask_bound: f64,
    #[serde(rename = "B")]
    bid_bound: f64,
    #[serde(rename = "P_benchmark")]
    benchmark: Option<f64>,
}

/// Writes the per-round table for every trial.
pub fn write_rounds_csv(path: &Path, runs: &[RunResult]) -> anyhow::Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    for run in runs {
        for t in 0..run.price.len() {
            writer.serialize(RoundRow {
                trial: run.trial_index,
                t: t as u64 + 1,
                price: run.price[t],
                quantity: run.quantity[t],
                cash_exchanged_exec: run.cash_exchanged_exec[t],
                cash_exchanged_next: run.cash_exchanged_next[t],
                inv_taker: run.inv_taker[t],
                inv_maker: run.inv_maker[t],
                cash_taker: run.cash_taker[t],
                cash_maker: run.cash_maker[t],
                wealth_taker: run.wealth_taker[t],
                wealth_maker: run.wealth_maker[t],
                rel_impact: run.rel_impact[t],
                ask_bound: run.ask_bound[t],
                bid_bound: run.bid_bound[t],
                benchmark: run.benchmark_price.as_ref().map(|b| b[t]),
            })?;
        }
    }
    writer.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct PriceWealthRow {
    t: u64,
    price_mean: f64,
    price_std: f64,
    benchmark_mean: Option<f64>,
    benchmark_std: Option<f64>,
    wealth_taker_mean: f64,
    wealth_taker_std: f64,
    wealth_maker_mean: f64,
    wealth_maker_std: f64,
}

#[derive(Serialize)]
struct QuantityCashRow {
    t: u64,
    quantity_mean: f64,
    quantity_std: f64,
    cash_exec_mean: f64,
    cash_exec_std: f64,
    cash_next_mean: f64,
    cash_next_std: f64,
}

#[derive(Serialize)]
struct InventoryCashRow {
    t: u64,
    inv_taker_mean: f64,
    inv_taker_std: f64,
    inv_maker_mean: f64,
    inv_maker_std: f64,
    cash_taker_mean: f64,
    cash_taker_std: f64,
    cash_maker_mean: f64,
    cash_maker_std: f64,
}

#[derive(Serialize)]
struct ImpactBoundsRow {
    t: u64,
    rel_impact_mean: f64,
    rel_impact_std: f64,
    ask_bound_mean: f64,
    ask_bound_std: f64,
    bid_bound_mean: f64,
    bid_bound_std: f64,
}

/// Writes the four figure-panel tables from cross-trial statistics.
/// Returns the paths written.
pub fn write_plot_csvs(dir: &Path, stats: &AggregateStats) -> anyhow::Result<Vec<PathBuf>> {
    let horizon = stats.price.mean.len();
    let mut paths = Vec::new();

    let rows: Vec<PriceWealthRow> = (0..horizon)
        .map(|t| PriceWealthRow {
            t: t as u64 + 1,
            price_mean: stats.price.mean[t],
            price_std: stats.price.std[t],
            benchmark_mean: stats.benchmark_price.as_ref().map(|b| b.mean[t]),
            benchmark_std: stats.benchmark_price.as_ref().map(|b| b.std[t]),
            wealth_taker_mean: stats.wealth_taker.mean[t],
            wealth_taker_std: stats.wealth_taker.std[t],
            wealth_maker_mean: stats.wealth_maker.mean[t],
            wealth_maker_std: stats.wealth_maker.std[t],
        })
        .collect();
    let path = dir.join("price_wealth.csv");
    write_csv(&path, &rows)?;
    paths.push(path);

    let rows: Vec<QuantityCashRow> = (0..horizon)
        .map(|t| QuantityCashRow {
            t: t as u64 + 1,
            quantity_mean: stats.quantity.mean[t],
            quantity_std: stats.quantity.std[t],
            cash_exec_mean: stats.cash_exchanged_exec.mean[t],
            cash_exec_std: stats.cash_exchanged_exec.std[t],
            cash_next_mean: stats.cash_exchanged_next.mean[t],
            cash_next_std: stats.cash_exchanged_next.std[t],
        })
        .collect();
    let path = dir.join("quantity_cash.csv");
    write_csv(&path, &rows)?;
    paths.push(path);

    let rows: Vec<InventoryCashRow> = (0..horizon)
        .map(|t| InventoryCashRow {
            t: t as u64 + 1,
            inv_taker_mean: stats.inv_taker.mean[t],
            inv_taker_std: stats.inv_taker.std[t],
            inv_maker_mean: stats.inv_maker.mean[t],
            inv_maker_std: stats.inv_maker.std[t],
            cash_taker_mean: stats.cash_taker.mean[t],
            cash_taker_std: stats.cash_taker.std[t],
            cash_maker_mean: stats.cash_maker.mean[t],
            cash_maker_std: stats.cash_maker.std[t],
        })
        .collect();
    let path = dir.join("inventory_cash.csv");
    write_csv(&path, &rows)?;
    paths.push(path);

    let rows: Vec<ImpactBoundsRow> = (0..horizon)
        .map(|t| ImpactBoundsRow {
            t: t as u64 + 1,
            rel_impact_mean: stats.rel_impact.mean[t],
            rel_impact_std: stats.rel_impact.std[t],
            ask_bound_mean: stats.ask_bound.mean[t],
            ask_bound_std: stats.ask_bound.std[t],
            bid_bound_mean: stats.bid_bound.mean[t],
            bid_bound_std: stats.bid_bound.std[t],
        })
        .collect();
    let path = dir.join("impact_bounds.csv");
    write_csv(&path, &rows)?;
    paths.push(path);

    Ok(paths)
}

/// The `simulate` summary record: configuration, analytic drift numbers,
/// and cross-trial outcome statistics.
#[derive(Serialize)]
pub struct SimulationSummary {
    pub phi: f64,
    pub k_alpha: f64,
    pub k_beta: f64,
    pub v_alpha: f64,
    pub v_beta: f64,
    pub log_noise_mean: f64,
    pub log_noise_std: f64,
    pub rounds: u64,
    pub trials: u64,
    pub seed: u64,
    pub classification: Classification,
    pub mu_eta: f64,
    pub sigma_eta: f64,
    pub kappa: f64,
    pub drift_mean: f64,
    pub drift_std: f64,
    pub mean_log_eta: f64,
    pub final_price_mean: f64,
    pub final_price_std: f64,
    pub final_welfare_mean: f64,
    pub final_welfare_std: f64,
}

/// One learning-trajectory row.
#[derive(Serialize)]
pub struct TrajectoryRow {
    pub step: u64,
    pub v_alpha: f64,
    pub k_alpha: f64,
    pub v_beta: f64,
    pub k_beta: f64,
    pub x: f64,
    pub y: f64,
    pub mu_eta: f64,
    pub collusive_flag: bool,
}

/// Stopping time of one learner episode; `tau` empty when never reached.
#[derive(Serialize)]
pub struct TauRow {
    pub trial: u64,
    pub seed: u64,
    pub tau: Option<u64>,
}

/// The `learn` summary: empirical stopping statistics next to the bounds.
#[derive(Serialize)]
pub struct TauReport {
    pub dynamic: DynamicKind,
    pub phi: f64,
    pub x0: f64,
    pub y0: f64,
    pub trials: u64,
    pub max_steps: u64,
    pub reached: u64,
    pub tau_mean: f64,
    pub tau_std_error: f64,
    pub gap_r: f64,
    pub gap_g: f64,
    pub upper_bound: f64,
    pub lower_bound: f64,
}

/// One region-map row.
#[derive(Serialize)]
struct RegionRow {
    v_alpha: f64,
    k_alpha: f64,
    v_beta: f64,
    k_beta: f64,
    phi: f64,
    analytic_feasible: bool,
    empirical_feasible: bool,
}

/// Writes the region map in grid row-major order.
pub fn write_region_csv(path: &Path, phi: f64, points: &[RegionPoint]) -> anyhow::Result<()> {
    let rows: Vec<RegionRow> = points
        .iter()
        .map(|point| RegionRow {
            v_alpha: point.params.v_alpha,
            k_alpha: point.params.k_alpha,
            v_beta: point.params.v_beta,
            k_beta: point.params.k_beta,
            phi,
            analytic_feasible: point.analytic.feasible,
            empirical_feasible: point.empirical,
        })
        .collect();
    write_csv(path, &rows)
}

/// The `bounds` record: threshold gaps and the stopping-time sandwich.
#[derive(Serialize)]
pub struct BoundsRecord {
    pub x0: f64,
    pub y0: f64,
    pub phi: f64,
    pub delta_alpha_min: f64,
    pub delta_alpha_max: f64,
    pub delta_beta_min: f64,
    pub delta_beta_max: f64,
    pub gap_r: f64,
    pub gap_g: f64,
    pub upper_bound: f64,
    pub lower_bound: f64,
}
