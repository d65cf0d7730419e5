//! The CLI subcommands as library functions returning structured reports.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use netfilter_core::optim::{bisect, nelder_mead, NelderMeadOptions};
use netfilter_core::{born_oracle, evaluate, lhs_at_settings, EvalResult, MeasurementSettings};

use crate::config::{ExperimentConfig, ScanAxis};
use crate::error::{CliError, CliResult};
use crate::format::format_g;
use crate::paths::{get_number, set_number};

/// Bisection stops once the bracket is narrower than this.
pub const THRESHOLD_TOLERANCE: f64 = 1e-4;

/// Restarts used by `optimize`.
pub const OPTIMIZE_RESTARTS: usize = 16;

pub fn load_config(text: &str) -> CliResult<(Value, ExperimentConfig)> {
    let raw: Value = serde_json::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
    ExperimentConfig::normalize(&raw)
}

pub fn eval(cfg: &ExperimentConfig) -> CliResult<EvalResult> {
    let spec = cfg.network()?;
    let settings = cfg.measurement_settings()?;
    evaluate(&spec, settings.as_ref()).map_err(|e| CliError::from_core("", e))
}

/// Config with the given paths overwritten.
fn with_values(raw: &Value, assignments: &[(&str, f64)]) -> CliResult<ExperimentConfig> {
    let mut point = raw.clone();
    for &(path, x) in assignments {
        set_number(&mut point, path, x)?;
    }
    ExperimentConfig::from_value(&point)
}

fn eval_at(raw: &Value, assignments: &[(&str, f64)]) -> CliResult<EvalResult> {
    eval(&with_values(raw, assignments)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub coords: Vec<f64>,
    pub b_lin: f64,
    pub b_seq: f64,
    pub success_prob: f64,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    pub axes: Vec<String>,
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let header: Vec<&str> = self
            .axes
            .iter()
            .map(String::as_str)
            .chain(["b_lin", "b_seq", "success_prob", "violation"])
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for row in &self.rows {
            let mut fields: Vec<String> = row.coords.iter().map(|&x| format_g(x)).collect();
            fields.extend([row.b_lin, row.b_seq, row.success_prob].map(format_g));
            fields.push(row.violation.to_string());
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// Row-major grid over the scan axes (last axis fastest).
fn grid(axes: &[ScanAxis]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        let values = axis.values();
        acc.into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

/// Evaluates every grid point in parallel. Points where post-selection is
/// impossible are reported with `nan` bounds and no violation.
pub fn scan(raw: &Value, cfg: &ExperimentConfig) -> CliResult<ScanTable> {
    let axes = &cfg
        .scan
        .as_ref()
        .ok_or_else(|| CliError::config("scan: block missing"))?
        .axes;
    let paths: Vec<&str> = axes.iter().map(|a| a.path.as_str()).collect();
    let rows = grid(axes)
        .into_par_iter()
        .map(|coords| {
            let assignments: Vec<(&str, f64)> =
                paths.iter().copied().zip(coords.iter().copied()).collect();
            let cfg = with_values(raw, &assignments)?;
            match eval(&cfg) {
                Ok(r) => Ok(ScanRow {
                    coords,
                    b_lin: r.b_lin,
                    b_seq: r.b_seq,
                    success_prob: r.success_prob,
                    violation: r.violation,
                }),
                Err(CliError::Annihilated(_)) => Ok(ScanRow {
                    coords,
                    b_lin: netfilter_core::b_lin(&cfg.link_states()?),
                    b_seq: f64::NAN,
                    success_prob: f64::NAN,
                    violation: false,
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(ScanTable {
        axes: paths.iter().map(|p| p.to_string()).collect(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    #[value(name = "b_lin")]
    BLin,
    #[value(name = "b_seq")]
    BSeq,
}

impl Target {
    fn pick(self, r: &EvalResult) -> f64 {
        match self {
            Target::BLin => r.b_lin,
            Target::BSeq => r.b_seq,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub axis: String,
    pub target: Target,
    pub lo: f64,
    pub hi: f64,
    /// Axis value where the bound crosses 1.
    pub threshold: f64,
    pub tolerance: f64,
    /// Which end of the range violates: `"lo"` when the bound exceeds 1 on
    /// `[lo, threshold)`, `"hi"` when on `(threshold, hi]`.
    pub violating_end: &'static str,
}

/// Resolves the bisection range: explicit bounds, else the config's scan axis
/// for the same path.
pub fn threshold_range(
    cfg: &ExperimentConfig,
    axis: &str,
    lo: Option<f64>,
    hi: Option<f64>,
) -> CliResult<(f64, f64)> {
    let from_scan = cfg
        .scan
        .as_ref()
        .and_then(|s| s.axes.iter().find(|a| a.path == axis))
        .map(|a| (a.min, a.max));
    match (lo, hi, from_scan) {
        (Some(l), Some(h), _) => Ok((l, h)),
        (l, h, Some((sl, sh))) => Ok((l.unwrap_or(sl), h.unwrap_or(sh))),
        _ => Err(CliError::config(format!(
            "threshold: no range for `{axis}`; pass --min/--max or add a scan axis"
        ))),
    }
}

pub fn threshold(
    raw: &Value,
    axis: &str,
    target: Target,
    (lo, hi): (f64, f64),
) -> CliResult<ThresholdReport> {
    let (raw, _) = ExperimentConfig::normalize(raw)?;
    let raw = &raw;
    get_number(raw, axis)?;
    if !(lo < hi) {
        return Err(CliError::config(format!(
            "threshold: empty range [{lo}, {hi}]"
        )));
    }
    let objective = |x: f64| eval_at(raw, &[(axis, x)]).map(|r| target.pick(&r) - 1.0);
    let threshold = bisect(objective, lo, hi, THRESHOLD_TOLERANCE)?;
    let f_lo = objective(lo)?;
    Ok(ThresholdReport {
        axis: axis.to_string(),
        target,
        lo,
        hi,
        threshold,
        tolerance: THRESHOLD_TOLERANCE,
        violating_end: if f_lo > 0.0 { "lo" } else { "hi" },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreeParameter {
    pub path: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeReport {
    pub seed: u64,
    pub restarts: usize,
    pub result: EvalResult,
    pub argmax: Vec<FreeParameter>,
}

/// Maximizes `b_seq` over the free filter entries, each kept in `[0, 1]`
/// through `ε = sin²(u)`. Restart 0 starts from the config's own values; the
/// rest from seeded uniform draws.
pub fn optimize(raw: &Value, free: &[String], seed: u64) -> CliResult<OptimizeReport> {
    let (raw, _) = ExperimentConfig::normalize(raw)?;
    let raw = &raw;
    for path in free {
        if !path.starts_with("filters.") {
            return Err(CliError::config(format!(
                "--free: `{path}` is not a filter entry (expected filters.first, filters.last or filters.middle.J.K)"
            )));
        }
        get_number(raw, path)?;
    }
    if free.is_empty() {
        return Ok(OptimizeReport {
            seed,
            restarts: 0,
            result: eval(&ExperimentConfig::from_value(raw)?)?,
            argmax: Vec::new(),
        });
    }

    let paths: Vec<&str> = free.iter().map(String::as_str).collect();
    let to_eps = |u: &[f64]| -> Vec<f64> { u.iter().map(|x| x.sin().powi(2)).collect() };
    let assign = |eps: &[f64]| -> Vec<(&str, f64)> {
        paths.iter().copied().zip(eps.iter().copied()).collect()
    };

    let current: Vec<f64> = paths
        .iter()
        .map(|p| get_number(raw, p).map(|e| e.clamp(0.0, 1.0).sqrt().asin()))
        .collect::<CliResult<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<Vec<f64>> = std::iter::once(current)
        .chain((1..OPTIMIZE_RESTARTS).map(|_| {
            (0..paths.len())
                .map(|_| rng.gen_range(0.0..std::f64::consts::FRAC_PI_2))
                .collect()
        }))
        .collect();

    let opts = NelderMeadOptions {
        initial_step: 0.3,
        ..NelderMeadOptions::default()
    };
    let results: Vec<(f64, Vec<f64>)> = starts
        .par_iter()
        .map(|u0| {
            let objective = |u: &[f64]| match eval_at(raw, &assign(&to_eps(u))) {
                Ok(r) => -r.b_seq,
                Err(_) => f64::NAN,
            };
            let m = nelder_mead(objective, u0, &opts);
            (-m.value, to_eps(&m.x))
        })
        .collect();
    let (_, best_eps) = results
        .into_iter()
        .reduce(|best, cand| if cand.0 > best.0 { cand } else { best })
        .expect("at least one restart");
    let result = eval_at(raw, &assign(&best_eps))?;
    Ok(OptimizeReport {
        seed,
        restarts: OPTIMIZE_RESTARTS,
        result,
        argmax: paths
            .iter()
            .zip(&best_eps)
            .map(|(p, &value)| FreeParameter {
                path: p.to_string(),
                value,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub seed: u64,
    pub settings: MeasurementSettings,
    pub i: f64,
    pub j: f64,
    pub lhs: f64,
    pub lhs_closed_form: f64,
    pub difference: f64,
    pub probability_sums: [f64; 4],
}

/// Cross-checks the Born-rule outcome enumeration against the factorized
/// evaluator at the config's settings (or seeded random ones).
pub fn oracle(cfg: &ExperimentConfig) -> CliResult<OracleReport> {
    let spec = cfg.network()?;
    let settings = match cfg.measurement_settings()? {
        Some(s) => s,
        None => MeasurementSettings::random(&mut ChaCha8Rng::seed_from_u64(cfg.seed)),
    };
    let born = born_oracle(&spec, &settings).map_err(|e| match e {
        netfilter_core::Error::DimensionTooLarge(_) => CliError::config(format!("n: {e}")),
        other => CliError::from_core("", other),
    })?;
    let closed = lhs_at_settings(&spec, &settings).map_err(|e| CliError::from_core("", e))?;
    Ok(OracleReport {
        seed: cfg.seed,
        settings,
        i: born.i,
        j: born.j,
        lhs: born.lhs,
        lhs_closed_form: closed,
        difference: (born.lhs - closed).abs(),
        probability_sums: born.probability_sums,
    })
}
