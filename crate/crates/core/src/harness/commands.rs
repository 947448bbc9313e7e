//! Report builders behind the `analyze`, `bounds`, `simulate` and `verify`
//! commands.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::comb::{
    evaluate_comb_policy_exact, evaluate_comb_policy_mc, expected_surrogate_cost, expected_surrogate_cost_mc,
    greedy_rule_for, run_comb_policy, CombModel,
};
use crate::enumerate::Budget;
use crate::error::{Error, Result};
use crate::indices::SurrogateKind;
use crate::mc::Estimate;
use crate::oracle::{opt_value_comb, opt_value_single};
use crate::real::{approx_eq, Real};
use crate::single::{
    evaluate_policy_exact, evaluate_policy_mc, expected_min_surrogate, run_policy, sample_trial, Policy,
    PolicyTrace, Regime,
};

use super::file::{load_file, LoadedProblem, Problem};
use super::random::random_problem;
use super::report::{
    AnalyzeReport, BoundRow, BoundsReport, IndexRow, OracleBlock, PolicyRow, RatioRow, Scalar, SimulateReport,
    TraceRow, VerifyReport, FAIL, PASS,
};
use super::verify::{verify_problem, Suite};

/// Monte Carlo settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McSettings {
    pub trials: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulateOptions {
    /// `None` runs every policy that applies to the file.
    pub policy: Option<Policy>,
    /// `None` evaluates exactly.
    pub mc: Option<McSettings>,
    /// Number of sampled traces to print.
    pub trace: u64,
    /// Seed for sampled traces.
    pub seed: u64,
}

fn mode<T: Real>() -> &'static str {
    if T::EXACT {
        "exact"
    } else {
        "float"
    }
}

fn regime<T>(problem: &Problem<T>) -> &'static str {
    if problem.model.is_some() {
        "combinatorial"
    } else {
        "single-item"
    }
}

fn policy_label(policy: Policy, combinatorial: bool) -> &'static str {
    match (policy, combinatorial) {
        (Policy::Weitzman, true) => "frugal",
        _ => policy.name(),
    }
}

fn surrogate_label(kind: SurrogateKind, combinatorial: bool) -> &'static str {
    match (kind, combinatorial) {
        (SurrogateKind::Oi, false) => "E[min W^OI]",
        (SurrogateKind::Noi, false) => "E[min W^NOI]",
        (SurrogateKind::Lh, false) => "E[min W^LH]",
        (SurrogateKind::Oi, true) => "E[Z^OI]",
        (SurrogateKind::Noi, true) => "E[Z^NOI]",
        (SurrogateKind::Lh, true) => "E[Z^LH]",
    }
}

/// Optional result: `None` on budget exhaustion, errors otherwise propagate.
fn within_budget<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::BudgetExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn analyze<T: Real>(problem: &Problem<T>) -> AnalyzeReport {
    AnalyzeReport {
        mode: mode::<T>(),
        items: problem.instance.items().iter().map(IndexRow::of).collect(),
        max_alpha: Scalar::of(&problem.instance.max_alpha()),
    }
}

pub fn bounds<T: Real>(problem: &Problem<T>, mc: Option<McSettings>, budget: Budget) -> Result<BoundsReport> {
    let inst = &problem.instance;
    let mut notes = Vec::new();
    let mut oracle = OracleBlock {
        opt_noi: None,
        opt_oi: None,
        skipped: Vec::new(),
    };
    let (method, bounds) = match &problem.model {
        None => {
            let values: Vec<T> = SurrogateKind::ALL
                .iter()
                .map(|&k| expected_min_surrogate(inst, k))
                .collect();
            if approx_eq(&values[0], &values[1]) {
                notes.push("E[min W^OI] coincides with E[min W^NOI] on this instance".to_string());
            }
            for (slot, regime, name) in [(0, Regime::Noi, "optimum (NOI)"), (1, Regime::Oi, "optimum (OI)")] {
                match within_budget(opt_value_single(inst, regime, budget))? {
                    Some(v) if slot == 0 => oracle.opt_noi = Some(Scalar::of(&v)),
                    Some(v) => oracle.opt_oi = Some(Scalar::of(&v)),
                    None => oracle.skipped.push(name.to_string()),
                }
            }
            let rows = SurrogateKind::ALL
                .iter()
                .zip(&values)
                .map(|(&k, v)| BoundRow {
                    kind: surrogate_label(k, false),
                    value: Scalar::of(v),
                    stderr: None,
                })
                .collect();
            ("exact", rows)
        }
        Some(model) => {
            let rows = match mc {
                None => SurrogateKind::ALL
                    .iter()
                    .map(|&k| {
                        Ok(BoundRow {
                            kind: surrogate_label(k, true),
                            value: Scalar::of(&expected_surrogate_cost(model, inst, k, budget)?),
                            stderr: None,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
                Some(s) => SurrogateKind::ALL
                    .iter()
                    .map(|&k| {
                        let e = expected_surrogate_cost_mc(model, inst, k, s.trials, s.seed)?;
                        Ok(BoundRow {
                            kind: surrogate_label(k, true),
                            value: Scalar::float(e.mean),
                            stderr: Some(e.stderr),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
            };
            for (slot, regime, name) in [(0, Regime::Noi, "optimum (NOI)"), (1, Regime::Oi, "optimum (OI)")] {
                match within_budget(opt_value_comb(model, inst, regime, budget))? {
                    Some(v) if slot == 0 => oracle.opt_noi = Some(Scalar::of(&v)),
                    Some(v) => oracle.opt_oi = Some(Scalar::of(&v)),
                    None => oracle.skipped.push(name.to_string()),
                }
            }
            (if mc.is_some() { "monte-carlo" } else { "exact" }, rows)
        }
    };
    Ok(BoundsReport {
        mode: mode::<T>(),
        regime: regime(problem),
        method,
        bounds,
        oracle,
        notes,
    })
}

fn default_policies<T: Real>(problem: &Problem<T>) -> Vec<Policy> {
    match problem.model {
        None => Policy::ALL.to_vec(),
        Some(_) => vec![Policy::Weitzman, Policy::LocalHedging],
    }
}

enum Value<T> {
    Exact(T),
    Mc(Estimate),
}

fn evaluate<T: Real>(problem: &Problem<T>, policy: Policy, mc: Option<McSettings>, budget: Budget) -> Result<Value<T>> {
    let inst = &problem.instance;
    Ok(match (&problem.model, mc) {
        (None, None) => Value::Exact(evaluate_policy_exact(inst, policy, budget)?),
        (None, Some(s)) => Value::Mc(evaluate_policy_mc(inst, policy, s.trials, s.seed)),
        (Some(m), None) => Value::Exact(evaluate_comb_policy_exact(m, inst, policy, budget)?),
        (Some(m), Some(s)) => Value::Mc(evaluate_comb_policy_mc(m, inst, policy, s.trials, s.seed)?),
    })
}

fn noi_lower_bound<T: Real>(problem: &Problem<T>, mc: Option<McSettings>, budget: Budget) -> Result<Value<T>> {
    let inst = &problem.instance;
    match &problem.model {
        None => Ok(Value::Exact(expected_min_surrogate(inst, SurrogateKind::Noi))),
        Some(m) => match (within_budget(expected_surrogate_cost(m, inst, SurrogateKind::Noi, budget))?, mc) {
            (Some(v), _) => Ok(Value::Exact(v)),
            (None, Some(s)) => Ok(Value::Mc(expected_surrogate_cost_mc(
                m,
                inst,
                SurrogateKind::Noi,
                s.trials,
                s.seed,
            )?)),
            (None, None) => expected_surrogate_cost(m, inst, SurrogateKind::Noi, budget).map(Value::Exact),
        },
    }
}

fn ratio_row<T: Real>(label: &'static str, value: &Value<T>, lower: &Value<T>, ceiling: Option<&T>) -> RatioRow {
    let (lb_scalar, lb_mean, lb_se) = match lower {
        Value::Exact(v) => (Scalar::of(v), v.to_f64_lossy(), 0.0),
        Value::Mc(e) => (Scalar::float(e.mean), e.mean, e.stderr),
    };
    let (mean, se) = match value {
        Value::Exact(v) => (v.to_f64_lossy(), 0.0),
        Value::Mc(e) => (e.mean, e.stderr),
    };
    let ratio = (lb_mean > 0.0).then(|| mean / lb_mean);
    let status = match (ceiling, value, lower) {
        (None, _, _) => PASS,
        (Some(a), Value::Exact(v), Value::Exact(lb)) => {
            if v.clone() <= a.clone() * lb.clone() + T::tolerance() {
                PASS
            } else {
                FAIL
            }
        }
        (Some(a), _, _) => {
            let slack = 1e-12;
            if mean - 3.0 * se <= a.to_f64_lossy() * (lb_mean + 3.0 * lb_se) + slack {
                PASS
            } else {
                FAIL
            }
        }
    };
    RatioRow {
        policy: label,
        lower_bound: lb_scalar,
        ratio,
        ceiling: ceiling.map(Scalar::of),
        status,
    }
}

fn sample_traces<T: Real>(problem: &Problem<T>, policy: Policy, count: u64, seed: u64) -> Result<Vec<TraceRow>> {
    let inst = &problem.instance;
    let rule = problem.model.as_ref().map(greedy_rule_for).transpose()?;
    (0..count)
        .map(|trial| {
            let (realization, coins) = sample_trial(inst, policy, seed, trial);
            let trace: PolicyTrace<T> = match (&problem.model, &rule) {
                (Some(m), Some(r)) => run_comb_policy(m, inst, policy, r, &realization, &coins)?,
                _ => run_policy(inst, policy, &realization, &coins),
            };
            Ok(TraceRow {
                policy: policy_label(policy, problem.model.is_some()),
                trial,
                prices: realization.prices.iter().map(Scalar::of).collect(),
                labels: trace.labels,
                inspection_order: trace.inspection_order,
                selected: trace.selected.into_iter().collect(),
                selected_without_inspection: trace.selected_without_inspection.into_iter().collect(),
                total_cost: Scalar::of(&trace.total_cost),
            })
        })
        .collect()
}

pub fn simulate<T: Real>(problem: &Problem<T>, opts: &SimulateOptions, budget: Budget) -> Result<SimulateReport> {
    let combinatorial = problem.model.is_some();
    if let Some(m) = &problem.model {
        greedy_rule_for(m as &CombModel<T>)?;
    }
    let policies = opts.policy.map(|p| vec![p]).unwrap_or_else(|| default_policies(problem));
    let lower = noi_lower_bound(problem, opts.mc, budget)?;
    let max_alpha = problem.instance.max_alpha();
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    let mut traces = Vec::new();
    for &policy in &policies {
        let label = policy_label(policy, combinatorial);
        let value = evaluate(problem, policy, opts.mc, budget)?;
        rows.push(match &value {
            Value::Exact(v) => PolicyRow {
                policy: label,
                value: Scalar::of(v),
                stderr: None,
            },
            Value::Mc(e) => PolicyRow {
                policy: label,
                value: Scalar::float(e.mean),
                stderr: Some(e.stderr),
            },
        });
        let ceiling = (policy == Policy::LocalHedging).then_some(&max_alpha);
        ratios.push(ratio_row(label, &value, &lower, ceiling));
        traces.extend(sample_traces(problem, policy, opts.trace, opts.seed)?);
    }
    let status = if ratios.iter().all(|r| r.status == PASS) { PASS } else { FAIL };
    Ok(SimulateReport {
        mode: mode::<T>(),
        regime: regime(problem),
        method: if opts.mc.is_some() { "monte-carlo" } else { "exact" },
        trials: opts.mc.map(|s| s.trials),
        seed: opts.mc.map(|s| s.seed),
        policies: rows,
        ratios,
        traces,
        status,
    })
}

/// Where verification instances come from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifySources {
    pub files: Vec<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub random: Option<(u64, u64)>,
}

/// `*.json` files in `dir`, sorted by name.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Parse(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

enum Case {
    File(PathBuf, LoadedProblem),
    Random(u64, u64),
}

pub fn verify(sources: &VerifySources, budget: Budget) -> Result<VerifyReport> {
    let mut paths = sources.files.clone();
    if let Some(dir) = &sources.corpus {
        paths.extend(corpus_files(dir)?);
    }
    let mut cases = Vec::new();
    for p in paths {
        let (_, problem) = load_file(&p)?;
        cases.push(Case::File(p, problem));
    }
    if let Some((n, seed)) = sources.random {
        cases.extend((0..n).map(|i| Case::Random(seed, i)));
    }
    if cases.is_empty() {
        return Err(Error::Parse("nothing to verify: give files, --corpus or --random".into()));
    }
    let suites: Vec<Suite> = cases
        .par_iter()
        .map(|case| match case {
            Case::File(path, LoadedProblem::Float(p)) => verify_problem(p, budget, &path.display().to_string()),
            Case::File(path, LoadedProblem::Exact(p)) => verify_problem(p, budget, &path.display().to_string()),
            Case::Random(seed, i) => {
                let p: Problem<f64> = random_problem(*seed, *i);
                verify_problem(&p, budget, &format!("random case {i} (seed {seed})"))
            }
        })
        .collect();
    let mut suite = Suite::new();
    for s in suites {
        suite.merge(s);
    }
    Ok(VerifyReport {
        instances: cases.len(),
        status: if suite.passed() { PASS } else { FAIL },
        checks: suite.summaries(),
    })
}
