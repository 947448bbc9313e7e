//! Report structures emitted by the commands, as JSON or plain text.

use std::fmt::Write as _;

use serde::Serialize;

use crate::indices::Item;
use crate::real::Real;

use super::verify::CheckSummary;

/// A reported number: its float value, plus the reduced fraction in exact
/// mode.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scalar {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

impl Scalar {
    pub fn of<T: Real>(x: &T) -> Self {
        Scalar {
            value: x.to_f64_lossy(),
            exact: T::EXACT.then(|| x.to_string()),
        }
    }

    pub fn float(value: f64) -> Self {
        Scalar { value, exact: None }
    }

    pub fn render(&self) -> String {
        match &self.exact {
            Some(q) if q.contains('/') => format!("{q} ({})", fmt_float(self.value)),
            Some(q) => q.clone(),
            None => fmt_float(self.value),
        }
    }
}

/// Six decimals, trailing zeros removed.
pub fn fmt_float(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexRow {
    pub item: usize,
    pub cost: Scalar,
    pub mu: Scalar,
    pub u_rsv: Scalar,
    pub u_bkp: Scalar,
    pub p_hedge: Scalar,
    pub alpha_local: Scalar,
    pub never_inspect: bool,
}

impl IndexRow {
    pub fn of<T: Real>(item: &Item<T>) -> Self {
        let ix = item.indices();
        IndexRow {
            item: item.id(),
            cost: Scalar::of(item.cost()),
            mu: Scalar::of(&ix.mu),
            u_rsv: Scalar::of(&ix.u_rsv),
            u_bkp: Scalar::of(&ix.u_bkp),
            p_hedge: Scalar::of(&ix.p_hedge),
            alpha_local: Scalar::of(&ix.alpha_local),
            never_inspect: ix.never_inspect,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyzeReport {
    pub mode: &'static str,
    pub items: Vec<IndexRow>,
    pub max_alpha: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub kind: &'static str,
    pub value: Scalar,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt_noi: Option<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt_oi: Option<Scalar>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub mode: &'static str,
    pub regime: &'static str,
    pub method: &'static str,
    pub bounds: Vec<BoundRow>,
    pub oracle: OracleBlock,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolicyRow {
    pub policy: &'static str,
    pub value: Scalar,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    pub policy: &'static str,
    pub lower_bound: Scalar,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ceiling: Option<Scalar>,
    pub status: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub policy: &'static str,
    pub trial: u64,
    pub prices: Vec<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<bool>>,
    pub inspection_order: Vec<usize>,
    pub selected: Vec<usize>,
    pub selected_without_inspection: Vec<usize>,
    pub total_cost: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulateReport {
    pub mode: &'static str,
    pub regime: &'static str,
    pub method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub policies: Vec<PolicyRow>,
    pub ratios: Vec<RatioRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub traces: Vec<TraceRow>,
    pub status: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub instances: usize,
    pub checks: Vec<CheckSummary>,
    pub status: &'static str,
}

pub const PASS: &str = "PASS";
pub const FAIL: &str = "FAIL";

/// Left-aligned table with a header row.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

fn with_stderr(value: &Scalar, stderr: Option<f64>) -> String {
    match stderr {
        Some(se) => format!("{} ± {}", value.render(), fmt_float(se)),
        None => value.render(),
    }
}

impl AnalyzeReport {
    pub fn render(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .items
            .iter()
            .map(|r| {
                vec![
                    r.item.to_string(),
                    r.cost.render(),
                    r.mu.render(),
                    r.u_rsv.render(),
                    r.u_bkp.render(),
                    r.p_hedge.render(),
                    r.alpha_local.render(),
                    r.never_inspect.to_string(),
                ]
            })
            .collect();
        let mut out = format!("mode: {}\n", self.mode);
        out.push_str(&table(
            &["item", "cost", "mu", "u_rsv", "u_bkp", "p_hedge", "alpha", "never_inspect"],
            &rows,
        ));
        let _ = writeln!(out, "max alpha: {}", self.max_alpha.render());
        out
    }
}

impl BoundsReport {
    pub fn render(&self) -> String {
        let mut out = format!("mode: {}\nregime: {}\nmethod: {}\n", self.mode, self.regime, self.method);
        let rows: Vec<Vec<String>> = self
            .bounds
            .iter()
            .map(|b| vec![b.kind.to_string(), with_stderr(&b.value, b.stderr)])
            .collect();
        out.push_str(&table(&["bound", "value"], &rows));
        let mut oracle = Vec::new();
        if let Some(v) = &self.oracle.opt_noi {
            oracle.push(vec!["optimum (NOI)".to_string(), v.render()]);
        }
        if let Some(v) = &self.oracle.opt_oi {
            oracle.push(vec!["optimum (OI)".to_string(), v.render()]);
        }
        for s in &self.oracle.skipped {
            oracle.push(vec![s.clone(), "skipped (budget)".to_string()]);
        }
        if !oracle.is_empty() {
            out.push_str(&table(&["oracle", "value"], &oracle));
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}

impl SimulateReport {
    pub fn render(&self) -> String {
        let mut out = format!("mode: {}\nregime: {}\nmethod: {}\n", self.mode, self.regime, self.method);
        if let (Some(t), Some(s)) = (self.trials, self.seed) {
            let _ = writeln!(out, "trials: {t}\nseed: {s}");
        }
        let rows: Vec<Vec<String>> = self
            .policies
            .iter()
            .map(|p| vec![p.policy.to_string(), with_stderr(&p.value, p.stderr)])
            .collect();
        out.push_str(&table(&["policy", "expected cost"], &rows));
        if !self.ratios.is_empty() {
            let rows: Vec<Vec<String>> = self
                .ratios
                .iter()
                .map(|r| {
                    vec![
                        r.policy.to_string(),
                        r.lower_bound.render(),
                        r.ratio.map(fmt_float).unwrap_or_else(|| "-".into()),
                        r.ceiling.as_ref().map(Scalar::render).unwrap_or_else(|| "-".into()),
                        r.status.to_string(),
                    ]
                })
                .collect();
            out.push_str(&table(&["policy", "lower bound", "ratio", "ceiling", "status"], &rows));
        }
        for t in &self.traces {
            let prices: Vec<String> = t.prices.iter().map(Scalar::render).collect();
            let _ = writeln!(
                out,
                "trace {} trial {}: prices [{}]{} inspected {:?} selected {:?} blind {:?} cost {}",
                t.policy,
                t.trial,
                prices.join(", "),
                t.labels
                    .as_ref()
                    .map(|l| format!(" labels {l:?}"))
                    .unwrap_or_default(),
                t.inspection_order,
                t.selected,
                t.selected_without_inspection,
                t.total_cost.render()
            );
        }
        let _ = writeln!(out, "status: {}", self.status);
        out
    }
}

impl VerifyReport {
    pub fn render(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .checks
            .iter()
            .map(|c| {
                vec![
                    if c.passed { PASS } else { FAIL }.to_string(),
                    c.name.clone(),
                    c.checked.to_string(),
                    c.skipped.to_string(),
                    format!("{:.3e}", c.max_violation),
                ]
            })
            .collect();
        let mut out = table(&["status", "check", "checked", "skipped", "max violation"], &rows);
        for c in &self.checks {
            if let Some(f) = &c.first_failure {
                let _ = writeln!(out, "FAIL {}: {f}", c.name);
            }
        }
        let _ = writeln!(out, "verify: {} ({} instances)", self.status, self.instances);
        out
    }
}
