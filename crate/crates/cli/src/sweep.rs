//! Energy-target sweeps: a rectangular (E1, E2) lattice evaluated per scheme,
//! written as CSV with an optional sidecar of the winning covariances.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use swipt_core::ideal::solve_ideal;
use swipt_core::linalg::HermitianMatrix;
use swipt_core::model::{harvested_energy, EnergyTarget, Receiver};
use swipt_core::search::SearchControl;
use swipt_core::tdma_a::solve_tdma_a;
use swipt_core::tdma_b::{deliverable_power, solve_tdma_b};

use crate::instance::Instance;
use crate::{CliError, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Transmission scheme selector. Name order (`ideal`, `tdma-a`, `tdma-b`)
/// is also the CSV row order within a sweep cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemeKind {
    Ideal,
    TdmaA,
    TdmaB,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::Ideal, SchemeKind::TdmaA, SchemeKind::TdmaB];

    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Ideal => "ideal",
            SchemeKind::TdmaA => "tdma-a",
            SchemeKind::TdmaB => "tdma-b",
        }
    }
}

impl FromStr for SchemeKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ideal" => Ok(SchemeKind::Ideal),
            "tdma-a" => Ok(SchemeKind::TdmaA),
            "tdma-b" => Ok(SchemeKind::TdmaB),
            other => Err(CliError::Parse(format!(
                "unknown scheme {other:?}; expected ideal, tdma-a or tdma-b"
            ))),
        }
    }
}

/// Sweep description: axis maxima, lattice size, schemes, solver resolution.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub e1_max: f64,
    pub e2_max: f64,
    pub steps: usize,
    pub schemes: Vec<SchemeKind>,
    pub alpha_steps: usize,
    pub control: SearchControl,
}

/// Default sweep axis maxima: 90% of the per-receiver deliverable-power
/// bound (the largest target either receiver could ever meet alone).
pub fn default_axis_bounds(instance: &Instance) -> (f64, f64) {
    let (d1, d2) = deliverable_power(&instance.channels, &instance.budget);
    let gd = instance.gamma * instance.delta;
    (0.9 * d1 * gd, 0.9 * d2 * gd)
}

/// One CSV row: a scheme evaluated at one lattice cell. Inapplicable fields
/// stay empty in the CSV.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub e1: f64,
    pub e2: f64,
    pub scheme: SchemeKind,
    pub feasible: bool,
    pub alpha: Option<f64>,
    pub sum_rate: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub energy1: Option<f64>,
    pub energy2: Option<f64>,
    pub w_star: Option<f64>,
}

/// Hermitian matrix as rows of `[re, im]` cells for the sidecar file.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

fn matrix_to_json(m: &HermitianMatrix) -> MatrixJson {
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect())
        .collect()
}

pub fn matrix_from_json(m: &MatrixJson) -> HermitianMatrix {
    let dim = m.len();
    let mut data = Vec::with_capacity(dim * dim);
    for row in m {
        for &[re, im] in row {
            data.push(num_complex::Complex64::new(re, im));
        }
    }
    HermitianMatrix::new_symmetrized(dim, data)
}

/// Sidecar record holding the covariances behind one CSV row.
///
/// Reconstruction of `sum_rate`: `ideal` uses `r1 + r2` on `primary`;
/// `tdma-a` uses `(1 - alpha) * (r1 + r2)` on `primary` (`secondary` is the
/// harvesting covariance pair); `tdma-b` uses
/// `alpha * r1(primary) + (1 - alpha) * r2(secondary)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub e1: f64,
    pub e2: f64,
    pub scheme: String,
    pub feasible: bool,
    pub alpha: Option<f64>,
    pub sum_rate: Option<f64>,
    pub primary_s1: Option<MatrixJson>,
    pub primary_s2: Option<MatrixJson>,
    pub secondary_s1: Option<MatrixJson>,
    pub secondary_s2: Option<MatrixJson>,
}

/// Evaluates one scheme at one lattice cell.
pub fn evaluate_cell(
    instance: &Instance,
    scheme: SchemeKind,
    e1: f64,
    e2: f64,
    alpha_steps: usize,
    control: &SearchControl,
) -> Result<(SweepRow, SolutionRecord)> {
    let ch = &instance.channels;
    let budget = &instance.budget;
    let tgt: EnergyTarget = instance.target(e1, e2);
    let mut row = SweepRow {
        e1,
        e2,
        scheme,
        feasible: false,
        alpha: None,
        sum_rate: None,
        r1: None,
        r2: None,
        energy1: None,
        energy2: None,
        w_star: None,
    };
    let mut record = SolutionRecord {
        e1,
        e2,
        scheme: scheme.name().to_string(),
        feasible: false,
        alpha: None,
        sum_rate: None,
        primary_s1: None,
        primary_s2: None,
        secondary_s1: None,
        secondary_s2: None,
    };

    match scheme {
        SchemeKind::Ideal => {
            let sol = solve_ideal(ch, budget, &tgt, control)?;
            if sol.feasible {
                row.feasible = true;
                row.sum_rate = Some(sol.objective);
                row.r1 = Some(sol.achieved_rates.0);
                row.r2 = Some(sol.achieved_rates.1);
                row.energy1 = Some(sol.achieved_energies.0);
                row.energy2 = Some(sol.achieved_energies.1);
                record.primary_s1 = Some(matrix_to_json(&sol.cov.s1));
                record.primary_s2 = Some(matrix_to_json(&sol.cov.s2));
            }
        }
        SchemeKind::TdmaA => {
            let sol = solve_tdma_a(ch, budget, &tgt, control)?;
            if sol.feasible() {
                let alpha = sol.min_time.alpha;
                row.feasible = true;
                row.alpha = Some(alpha);
                row.w_star = Some(sol.min_time.w_star);
                row.sum_rate = Some(sol.overall_sum_rate);
                row.r1 = Some(sol.slot2_rates.0);
                row.r2 = Some(sol.slot2_rates.1);
                // Total harvested over the interval: the harvesting slot
                // runs for an alpha fraction of the time.
                let eh1 = harvested_energy(Receiver::One, &sol.min_time.eh_cov, ch, &tgt)?;
                let eh2 = harvested_energy(Receiver::Two, &sol.min_time.eh_cov, ch, &tgt)?;
                row.energy1 = Some(alpha * eh1);
                row.energy2 = Some(alpha * eh2);
                record.alpha = Some(alpha);
                record.primary_s1 = Some(matrix_to_json(&sol.id_cov.s1));
                record.primary_s2 = Some(matrix_to_json(&sol.id_cov.s2));
                record.secondary_s1 = Some(matrix_to_json(&sol.min_time.eh_cov.s1));
                record.secondary_s2 = Some(matrix_to_json(&sol.min_time.eh_cov.s2));
            }
        }
        SchemeKind::TdmaB => {
            let sol = solve_tdma_b(ch, budget, &tgt, alpha_steps, control)?;
            if sol.feasible {
                let alpha = sol.alpha;
                row.feasible = true;
                row.alpha = Some(alpha);
                row.sum_rate = Some(sol.overall_sum_rate);
                row.r1 = Some(sol.slot1.rate);
                row.r2 = Some(sol.slot2.rate);
                // Receiver 2 harvests during slot 1, receiver 1 during slot 2.
                let eh2 = harvested_energy(Receiver::Two, &sol.slot1.cov, ch, &tgt)?;
                let eh1 = harvested_energy(Receiver::One, &sol.slot2.cov, ch, &tgt)?;
                row.energy1 = Some((1.0 - alpha) * eh1);
                row.energy2 = Some(alpha * eh2);
                record.alpha = Some(alpha);
                record.primary_s1 = Some(matrix_to_json(&sol.slot1.cov.s1));
                record.primary_s2 = Some(matrix_to_json(&sol.slot1.cov.s2));
                record.secondary_s1 = Some(matrix_to_json(&sol.slot2.cov.s1));
                record.secondary_s2 = Some(matrix_to_json(&sol.slot2.cov.s2));
            }
        }
    }
    record.feasible = row.feasible;
    record.sum_rate = row.sum_rate;
    Ok((row, record))
}

/// Runs the whole sweep. Cells are independent and evaluated on the worker
/// pool when available; rows come back in deterministic order (e1-major,
/// then e2, then scheme name).
pub fn run_sweep(instance: &Instance, spec: &SweepSpec) -> Result<(Vec<SweepRow>, Vec<SolutionRecord>)> {
    if spec.steps < 2 {
        return Err(CliError::Parse("steps must be at least 2".into()));
    }
    let mut schemes = spec.schemes.clone();
    schemes.sort();
    schemes.dedup();

    let axis = |max: f64| -> Vec<f64> {
        (0..spec.steps)
            .map(|k| max * k as f64 / (spec.steps - 1) as f64)
            .collect()
    };
    let cells: Vec<(f64, f64, SchemeKind)> = axis(spec.e1_max)
        .into_iter()
        .flat_map(|e1| {
            let schemes = schemes.clone();
            axis(spec.e2_max)
                .into_iter()
                .flat_map(move |e2| schemes.clone().into_iter().map(move |s| (e1, e2, s)))
                .collect::<Vec<_>>()
        })
        .collect();

    let eval = |&(e1, e2, scheme): &(f64, f64, SchemeKind)| {
        evaluate_cell(instance, scheme, e1, e2, spec.alpha_steps, &spec.control)
    };
    #[cfg(feature = "parallel")]
    let results: Vec<Result<(SweepRow, SolutionRecord)>> = if spec.control.parallel {
        cells.par_iter().map(eval).collect()
    } else {
        cells.iter().map(eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<(SweepRow, SolutionRecord)>> = cells.iter().map(eval).collect();

    let mut rows = Vec::with_capacity(results.len());
    let mut records = Vec::with_capacity(results.len());
    for r in results {
        let (row, record) = r?;
        rows.push(row);
        records.push(record);
    }
    Ok((rows, records))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// Serializes rows as CSV (header mandatory, newline-terminated). The same
/// inputs always produce byte-identical output.
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str("e1,e2,scheme,feasible,alpha,sum_rate,r1,r2,energy1,energy2,w_star\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.e1,
            r.e2,
            r.scheme.name(),
            r.feasible,
            fmt_opt(r.alpha),
            fmt_opt(r.sum_rate),
            fmt_opt(r.r1),
            fmt_opt(r.r2),
            fmt_opt(r.energy1),
            fmt_opt(r.energy2),
            fmt_opt(r.w_star),
        );
    }
    out
}

pub fn write_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    std::fs::write(path, rows_to_csv(rows))?;
    Ok(())
}

pub fn write_solutions(records: &[SolutionRecord], path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(records)
        .map_err(|e| CliError::Parse(format!("serializing solutions: {e}")))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
