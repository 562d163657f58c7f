//! CSV and JSON renderings of run results.

use std::fmt::Write as _;

use atomloc_core::scan::TableKind;
use atomloc_core::{DetuningBranch, LocalizationClass, PeakSet, Preset, ProfileTable, VerificationReport};
use serde::Serialize;

/// Round-trip precision for 64-bit floats.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".to_string(), num)
}

pub fn table_csv(table: &ProfileTable) -> String {
    let mut out = String::new();
    match table.kind {
        TableKind::Profile => out.push_str("kappa_x,chi_re,chi_im\n"),
        TableKind::Heatmap => out.push_str("delta,kappa_x,chi_re,chi_im\n"),
    }
    for row in &table.rows {
        if table.kind == TableKind::Heatmap {
            let _ = write!(out, "{},", num(row.delta));
        }
        let _ = writeln!(
            out,
            "{},{},{}",
            num(row.kappa_x),
            opt(row.value.map(|v| v.chi_re)),
            opt(row.value.map(|v| v.chi_im))
        );
    }
    out
}

#[derive(Serialize)]
struct PeakReport<'a> {
    class: LocalizationClass,
    uniform: bool,
    grid_n: usize,
    peaks: &'a [atomloc_core::Peak],
}

pub fn peaks_json(set: &PeakSet, class: LocalizationClass) -> String {
    json(&PeakReport { class, uniform: set.uniform, grid_n: set.profile_resolution, peaks: &set.peaks })
}

pub fn peaks_csv(set: &PeakSet) -> String {
    let mut out = String::from("kappa_x,height,prominence,fwhm\n");
    for p in &set.peaks {
        let _ = writeln!(out, "{},{},{},{}", num(p.kappa_x), num(p.height), num(p.prominence), opt(p.fwhm));
    }
    out
}

pub fn class_json(class: LocalizationClass) -> String {
    json(&serde_json::json!({ "class": class }))
}

pub fn class_csv(class: LocalizationClass) -> String {
    format!("class\n{}\n", serde_json::to_value(class).unwrap().as_str().unwrap_or_default())
}

pub fn curves_csv(branches: &[DetuningBranch]) -> String {
    let mut out = String::from("branch_id,kappa_x,delta\n");
    for b in branches {
        for &(x, d) in &b.values {
            let _ = writeln!(out, "{},{},{}", b.branch_id, num(x), num(d));
        }
    }
    out
}

/// Deviation bound the verify subcommand enforces.
pub const VERIFY_TOL: f64 = 1e-6;

#[derive(Debug, Serialize)]
pub struct VerifySummary {
    pub summary: String,
    pub passed: bool,
    pub tolerance: f64,
    pub points: usize,
    pub failures: usize,
    pub max_deviation: Option<f64>,
    pub reports: Vec<VerificationReport>,
}

impl VerifySummary {
    pub fn new(reports: Vec<VerificationReport>) -> Self {
        let failures = reports.iter().filter(|r| !r.passes(VERIFY_TOL)).count();
        let max_deviation = reports.iter().filter_map(VerificationReport::max_deviation).reduce(f64::max);
        let passed = failures == 0 && !reports.is_empty();
        let summary = match (passed, max_deviation) {
            (true, Some(d)) => format!("3-way max deviation {d:.3e} <= {VERIFY_TOL:e} over {} points", reports.len()),
            (_, d) => format!(
                "3-way verification failed at {failures} of {} points (max deviation {})",
                reports.len(),
                d.map_or_else(|| "n/a".into(), |d| format!("{d:.3e}"))
            ),
        };
        Self { summary, passed, tolerance: VERIFY_TOL, points: reports.len(), failures, max_deviation, reports }
    }

    pub fn csv(&self) -> String {
        let mut out =
            String::from("delta,kappa_x,closed_vs_numeric,closed_vs_evolution,numeric_vs_evolution,converged\n");
        for r in &self.reports {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                num(r.point.delta),
                num(r.point.kappa_x),
                opt(r.closed_vs_numeric),
                opt(r.closed_vs_evolution),
                opt(r.numeric_vs_evolution),
                r.evolution_converged
            );
        }
        out
    }
}

pub fn presets_csv() -> String {
    let mut out = String::from("name,description\n");
    for p in Preset::ALL {
        let _ = writeln!(out, "{},\"{}\"", p.name(), p.description());
    }
    out
}

pub fn presets_json() -> String {
    let list: Vec<_> =
        Preset::ALL.iter().map(|p| serde_json::json!({ "name": p.name(), "description": p.description() })).collect();
    json(&list)
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("results serialize");
    s.push('\n');
    s
}
