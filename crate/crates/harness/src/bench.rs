//! Seeded trial matrix: synthetic instances × methods, one [`TrialReport`] per
//! (trial, method), written as CSV together with a per-method summary.

use std::io::Write;

use gma_core::rng::derive_seed;
use gma_core::sketch::{Pipeline, SketchDims, SketchPlan};
use gma_core::solver::{
    ratio_from_residuals, solve_exact, solve_lev_score, solve_sps_gauss, solve_symmetric, StageTimes,
    EXACT_RESIDUAL_FLOOR,
};
use gma_core::synth::{generate, SyntheticSpec};
use rayon::prelude::*;
use serde::Serialize;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BenchMethod {
    Exact,
    SparseGaussian,
    Leverage,
}

impl BenchMethod {
    pub fn name(self) -> &'static str {
        match self {
            BenchMethod::Exact => "exact",
            BenchMethod::SparseGaussian => "sparse-gaussian",
            BenchMethod::Leverage => "leverage",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub m: usize,
    pub n: usize,
    pub c: usize,
    pub r: usize,
    pub epsilon: f64,
    pub noise: f64,
    pub methods: Vec<BenchMethod>,
    pub trials: usize,
    pub seed: u64,
    pub c_embed: f64,
    pub c_prod: f64,
    pub c_log: f64,
    /// Store `A` sparse, keeping each entry with this probability.
    pub density: Option<f64>,
    /// Symmetric instances (`n = m`, `r = c`) solved with the symmetric variant.
    pub symmetric: bool,
}

impl BenchConfig {
    pub fn spec(&self) -> SyntheticSpec {
        SyntheticSpec {
            m: self.m,
            n: self.n,
            c: self.c,
            r: self.r,
            noise: self.noise,
            symmetric: self.symmetric,
            density: self.density,
        }
    }

    pub fn plan(&self, seed: u64) -> SketchPlan {
        SketchPlan {
            c_embed: self.c_embed,
            c_prod: self.c_prod,
            c_log: self.c_log,
            ..SketchPlan::new(self.epsilon, seed)
        }
    }

    pub fn validate(&self) -> Result<(), Failure> {
        if self.trials == 0 {
            return Err(Failure::input("trials must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Failure::input("at least one method is required"));
        }
        self.spec().validate()?;
        self.plan(self.seed).validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub trial: usize,
    pub method: BenchMethod,
    /// Seed of the sketches; `None` for the exact method.
    pub seed: Option<u64>,
    pub dims_used: Option<SketchDims>,
    pub error_ratio: f64,
    pub exact_residual: f64,
    pub sketched_residual: f64,
    /// Exact residual below `1e-12·‖A‖_F`; the ratio then follows the floor rule.
    pub floor_case: bool,
    pub wall_times: StageTimes,
    pub entries_touched: u64,
    /// Stored entries of `A` (`m·n` when dense).
    pub a_entries: u64,
}

/// CSV column order of [`write_csv`]. Wall-time columns (`time_*`) are the only
/// ones that vary between identical runs.
pub const COLUMNS: [&str; 18] = [
    "trial",
    "method",
    "seed",
    "s_c",
    "s_r",
    "t",
    "t_prime",
    "error_ratio",
    "exact_residual",
    "sketched_residual",
    "floor_case",
    "entries_touched",
    "a_entries",
    "time_build",
    "time_apply",
    "time_pinv",
    "time_multiply",
    "time_total",
];

pub const SUMMARY_COLUMNS: [&str; 11] = [
    "method",
    "trials",
    "median_ratio",
    "p95_ratio",
    "mean_time_total",
    "mean_time_build",
    "mean_time_apply",
    "mean_time_pinv",
    "mean_time_multiply",
    "mean_entries_touched",
    "mean_a_entries",
];

/// 17 significant digits: enough for every `f64` to round-trip.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn run_trial(config: &BenchConfig, trial: usize) -> Result<Vec<TrialReport>, Failure> {
    let trial_seed = derive_seed(config.seed, trial as u64);
    let inst = generate(&config.spec(), derive_seed(trial_seed, 0))?;
    let p = &inst.problem;
    let exact = solve_exact(p)?;
    let a_norm = p.a().fro_norm();
    let a_entries = p.a().stored_entries() as u64;
    let floor_case = exact.residual <= EXACT_RESIDUAL_FLOOR * a_norm;

    config
        .methods
        .iter()
        .enumerate()
        .map(|(k, &method)| {
            let plan = config.plan(derive_seed(trial_seed, 1 + k as u64));
            let sol = match method {
                BenchMethod::Exact => exact.clone(),
                BenchMethod::SparseGaussian | BenchMethod::Leverage => {
                    let pipeline =
                        if method == BenchMethod::Leverage { Pipeline::Leverage } else { Pipeline::SparseGaussian };
                    if config.symmetric {
                        solve_symmetric(p.a().clone(), p.m().clone(), &plan, pipeline)?
                    } else if pipeline == Pipeline::Leverage {
                        solve_lev_score(p, &plan)?
                    } else {
                        solve_sps_gauss(p, &plan)?
                    }
                }
            };
            Ok(TrialReport {
                trial,
                method,
                seed: sol.seed,
                dims_used: sol.dims_used,
                error_ratio: ratio_from_residuals(sol.residual, exact.residual, a_norm),
                exact_residual: exact.residual,
                sketched_residual: sol.residual,
                floor_case,
                wall_times: sol.wall_times,
                entries_touched: sol.entries_touched,
                a_entries,
            })
        })
        .collect()
}

/// Runs every trial on a pool of `threads` workers. Reports come back ordered by
/// trial, then by the position of the method in `config.methods`, whatever the
/// thread count.
pub fn run_bench(config: &BenchConfig, threads: usize) -> Result<Vec<TrialReport>, Failure> {
    config.validate()?;
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build().map_err(|e| Failure::Input(e.into()))?;
    let per_trial: Vec<Vec<TrialReport>> = pool
        .install(|| (0..config.trials).into_par_iter().map(|t| run_trial(config, t)).collect::<Result<Vec<_>, _>>())?;
    Ok(per_trial.into_iter().flatten().collect())
}

pub fn write_csv(w: impl Write, reports: &[TrialReport]) -> Result<(), Failure> {
    let mut out = csv::Writer::from_writer(w);
    let csv_err = |e: csv::Error| Failure::Input(e.into());
    out.write_record(COLUMNS).map_err(csv_err)?;
    let opt = |v: Option<usize>| v.map_or(String::new(), |v| v.to_string());
    for r in reports {
        let dims = r.dims_used;
        let t = &r.wall_times;
        out.write_record([
            r.trial.to_string(),
            r.method.name().to_string(),
            r.seed.map_or(String::new(), |s| s.to_string()),
            opt(dims.map(|d| d.s_c)),
            opt(dims.map(|d| d.s_r)),
            opt(dims.and_then(|d| d.t)),
            opt(dims.and_then(|d| d.t_prime)),
            fmt_float(r.error_ratio),
            fmt_float(r.exact_residual),
            fmt_float(r.sketched_residual),
            r.floor_case.to_string(),
            r.entries_touched.to_string(),
            r.a_entries.to_string(),
            fmt_float(t.build),
            fmt_float(t.apply),
            fmt_float(t.pinv),
            fmt_float(t.multiply),
            fmt_float(t.total()),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: BenchMethod,
    pub trials: usize,
    pub median_ratio: f64,
    pub p95_ratio: f64,
    pub mean_times: StageTimes,
    pub mean_entries_touched: f64,
    pub mean_a_entries: f64,
}

fn median(sorted: &[f64]) -> f64 {
    let k = sorted.len();
    if k % 2 == 1 {
        sorted[k / 2]
    } else {
        0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
    }
}

/// Nearest-rank percentile.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// One summary per method, in the order the methods first appear.
pub fn summarize(reports: &[TrialReport]) -> Vec<MethodSummary> {
    let mut methods: Vec<BenchMethod> = Vec::new();
    for r in reports {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
    }
    methods
        .into_iter()
        .map(|method| {
            let rows: Vec<&TrialReport> = reports.iter().filter(|r| r.method == method).collect();
            let k = rows.len() as f64;
            let mut ratios: Vec<f64> = rows.iter().map(|r| r.error_ratio).collect();
            ratios.sort_by(f64::total_cmp);
            let mean = |f: &dyn Fn(&TrialReport) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / k;
            MethodSummary {
                method,
                trials: rows.len(),
                median_ratio: median(&ratios),
                p95_ratio: percentile(&ratios, 0.95),
                mean_times: StageTimes {
                    build: mean(&|r| r.wall_times.build),
                    apply: mean(&|r| r.wall_times.apply),
                    pinv: mean(&|r| r.wall_times.pinv),
                    multiply: mean(&|r| r.wall_times.multiply),
                },
                mean_entries_touched: mean(&|r| r.entries_touched as f64),
                mean_a_entries: mean(&|r| r.a_entries as f64),
            }
        })
        .collect()
}

pub fn write_summary_csv(w: impl Write, summaries: &[MethodSummary]) -> Result<(), Failure> {
    let mut out = csv::Writer::from_writer(w);
    let csv_err = |e: csv::Error| Failure::Input(e.into());
    out.write_record(SUMMARY_COLUMNS).map_err(csv_err)?;
    for s in summaries {
        let t = &s.mean_times;
        out.write_record([
            s.method.name().to_string(),
            s.trials.to_string(),
            fmt_float(s.median_ratio),
            fmt_float(s.p95_ratio),
            fmt_float(t.total()),
            fmt_float(t.build),
            fmt_float(t.apply),
            fmt_float(t.pinv),
            fmt_float(t.multiply),
            fmt_float(s.mean_entries_touched),
            fmt_float(s.mean_a_entries),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentiles() {
        let v: Vec<f64> = (1..=20).map(f64::from).collect();
        assert_eq!(median(&v), 10.5);
        assert_eq!(percentile(&v, 0.95), 19.0);
        assert_eq!(percentile(&[3.0], 0.95), 3.0);
        assert_eq!(median(&[1.0, 2.0, 7.0]), 2.0);
    }

    #[test]
    fn floats_round_trip_through_text() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 123456789.12345679, f64::MAX] {
            assert_eq!(fmt_float(v).parse::<f64>().unwrap(), v);
        }
    }
}
