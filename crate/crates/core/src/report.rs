//! Check orchestration and report rendering for the command-line tool.
//!
//! A [`Report`] is the single source for both renderings: the text table is
//! derived from it, and the machine rendering is its JSON serialization,
//! which deserializes back to an equal value.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::audit::{self, check_no_signalling, AuditReport, Condition};
use crate::bounds::{self, Correlator, LhvCertificate, Representation};
use crate::error::{Error, Result};
use crate::fisher::{self, Prior, StatFamily, Statistic};
use crate::prob::Tolerance;
use crate::scenario::{BellModel, Phenomenology};

/// Environment variable overriding the default tolerance.
pub const TOL_ENV: &str = "LCAUDIT_TOL";

/// A selectable check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Condition(Condition),
    Chsh,
    Lhv,
}

impl Check {
    pub fn id(self) -> &'static str {
        match self {
            Check::Condition(c) => c.id(),
            Check::Chsh => "chsh",
            Check::Lhv => "lhv",
        }
    }

    pub fn all_ids() -> Vec<&'static str> {
        Condition::ALL
            .iter()
            .map(|c| c.id())
            .chain(["chsh", "lhv"])
            .collect()
    }

    pub fn from_id(id: &str) -> Option<Check> {
        match id {
            "chsh" => Some(Check::Chsh),
            "lhv" => Some(Check::Lhv),
            _ => Condition::from_id(id).map(Check::Condition),
        }
    }

    /// The conditions run when no selection is given.
    pub fn defaults() -> Vec<Check> {
        Condition::ALL
            .iter()
            .copied()
            .map(Check::Condition)
            .collect()
    }
}

/// Parses a comma-separated selection; `all` adds every check.
pub fn parse_checks(list: &str) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for id in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let add: Vec<Check> = if id == "all" {
            Check::all_ids()
                .into_iter()
                .filter_map(Check::from_id)
                .collect()
        } else {
            vec![Check::from_id(id).ok_or_else(|| {
                Error::Scenario(format!(
                    "unknown check '{id}' (known: {}, all)",
                    Check::all_ids().join(", ")
                ))
            })?]
        };
        for c in add {
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Scenario("no checks selected".into()));
    }
    Ok(out)
}

/// Where the tolerance in effect came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceInfo {
    pub eq: f64,
    pub norm: f64,
    pub source: String,
}

impl ToleranceInfo {
    pub fn tolerance(&self) -> Tolerance {
        Tolerance {
            eq: self.eq,
            norm: self.norm,
        }
    }
}

/// Resolves the tolerance: an explicit value wins, then the environment
/// variable, then the built-in default.
pub fn resolve_tolerance(explicit: Option<f64>, env: Option<&str>) -> Result<ToleranceInfo> {
    let (value, source) = match (explicit, env) {
        (Some(t), _) => (Some(t), "--tol".to_string()),
        (None, Some(v)) => {
            let t = v
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Tolerance(format!("{TOL_ENV}='{v}' is not a number")))?;
            (Some(t), format!("{TOL_ENV}={v}"))
        }
        (None, None) => (None, "default".to_string()),
    };
    let tol = match value {
        Some(t) => Tolerance::uniform(t)?,
        None => Tolerance::default(),
    };
    Ok(ToleranceInfo {
        eq: tol.eq,
        norm: tol.norm,
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshSummary {
    pub settings: [String; 4],
    /// E(a1,b1), E(a1,b2), E(a2,b1), E(a2,b2).
    pub correlators: [f64; 4],
    pub s: f64,
    /// max |S| over the four placements of the minus sign.
    pub max_abs: f64,
    pub lhv_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhvSummary {
    pub feasible: bool,
    pub infeasibility_gap: Option<f64>,
    pub reconstruction_error: Option<f64>,
    pub representation: Representation,
    pub signalling: bool,
    pub strategies_enumerated: usize,
    /// Strategy label and weight, for feasible inputs.
    pub weights: Vec<(String, f64)>,
}

impl From<&LhvCertificate> for LhvSummary {
    fn from(c: &LhvCertificate) -> Self {
        let weights = c
            .weights
            .as_ref()
            .map(|w| {
                w.axes()[0]
                    .symbols
                    .iter()
                    .cloned()
                    .zip(w.values().iter().copied())
                    .collect()
            })
            .unwrap_or_default();
        Self {
            feasible: c.feasible,
            infeasibility_gap: c.infeasibility_gap,
            reconstruction_error: c.reconstruction_error,
            representation: c.representation,
            signalling: c.signalling,
            strategies_enumerated: c.strategies_enumerated,
            weights,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSummary {
    /// Class label and its member outcomes.
    pub classes: Vec<(String, Vec<String>)>,
    /// Whether the statistic under test refines the minimal partition.
    pub statistic_refines: Option<bool>,
}

/// One row of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: String,
    pub passed: bool,
    pub verdict: String,
    pub max_deviation: Option<f64>,
    pub witness: Option<String>,
    pub caveats: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chsh: Option<ChshSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lhv: Option<LhvSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionSummary>,
}

impl CheckOutcome {
    fn bare(id: &str, passed: bool) -> Self {
        Self {
            id: id.to_string(),
            passed,
            verdict: if passed { "pass" } else { "fail" }.to_string(),
            max_deviation: None,
            witness: None,
            caveats: Vec::new(),
            audit: None,
            chsh: None,
            lhv: None,
            partition: None,
        }
    }

    fn from_audit(r: AuditReport) -> Self {
        Self {
            id: r.condition.id().to_string(),
            passed: r.verdict.passed(),
            verdict: r.verdict.to_string(),
            max_deviation: Some(r.max_deviation),
            witness: r.witness.as_ref().map(ToString::to_string),
            caveats: r.caveats.clone(),
            audit: Some(r),
            ..Self::bare("", false)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub subject: String,
    pub tolerance: ToleranceInfo,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
}

impl Report {
    fn new(
        command: &str,
        subject: &str,
        tolerance: ToleranceInfo,
        checks: Vec<CheckOutcome>,
    ) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            subject: subject.to_string(),
            tolerance,
            checks,
            passed,
        }
    }

    /// 0 when every check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        exit_code(self.checks.iter().map(|c| c.passed))
    }

    pub fn check(&self, id: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.id == id)
    }
}

/// Exit status as a function of the verdicts alone.
pub fn exit_code(verdicts: impl IntoIterator<Item = bool>) -> i32 {
    if verdicts.into_iter().all(|p| p) {
        0
    } else {
        1
    }
}

/// The two leading settings of each wing.
fn chsh_labels(ph: &Phenomenology) -> Result<[String; 4]> {
    let s = ph.scenario();
    if s.settings_a.len() < 2 || s.settings_b.len() < 2 {
        return Err(Error::Scenario(
            "a CHSH value needs at least two settings per wing".into(),
        ));
    }
    Ok([
        s.settings_a[0].clone(),
        s.settings_a[1].clone(),
        s.settings_b[0].clone(),
        s.settings_b[1].clone(),
    ])
}

/// CHSH outcome for the given settings `[a1, a2, b1, b2]`. Passes when no
/// placement of the minus sign exceeds the local bound by more than 8·τ_eq.
pub fn chsh_outcome(
    ph: &Phenomenology,
    labels: [String; 4],
    tol: &Tolerance,
) -> Result<CheckOutcome> {
    let [a1, a2, b1, b2] = &labels;
    let e = Correlator::new(ph)?;
    let correlators = [
        e.by_label(a1, b1)?,
        e.by_label(a1, b2)?,
        e.by_label(a2, b1)?,
        e.by_label(a2, b2)?,
    ];
    let s = bounds::chsh(ph, a1, a2, b1, b2)?;
    let arrangements = bounds::chsh_arrangements(ph, a1, a2, b1, b2)?;
    let max_abs = arrangements.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let lhv_bound = bounds::lhv_bound_chsh();
    let mut out = CheckOutcome::bare("chsh", max_abs <= lhv_bound + 8.0 * tol.eq);
    out.max_deviation = Some((max_abs - lhv_bound).max(0.0));
    if max_abs > s.abs() {
        out.caveats.push(format!(
            "|S| is larger with the minus sign on another pair: max |S| = {max_abs}"
        ));
    }
    out.chsh = Some(ChshSummary {
        settings: labels,
        correlators,
        s,
        max_abs,
        lhv_bound,
    });
    Ok(out)
}

pub fn lhv_outcome(ph: &Phenomenology, tol: &Tolerance, cap: usize) -> Result<CheckOutcome> {
    let cert = bounds::lhv_membership(ph, tol, cap)?;
    let mut out = CheckOutcome::bare("lhv", cert.feasible);
    out.max_deviation = cert.infeasibility_gap.or(cert.reconstruction_error);
    if cert.signalling {
        out.caveats
            .push("input signals; the feasibility problem was posed on raw cells".into());
    }
    out.lhv = Some(LhvSummary::from(&cert));
    Ok(out)
}

/// Runs the selected checks on a candidate theory.
pub fn run_audit(
    m: &BellModel,
    checks: &[Check],
    tolerance: ToleranceInfo,
    subject: &str,
    cap: usize,
) -> Result<Report> {
    let tol = tolerance.tolerance();
    let predicted = m.predict();
    let outcomes = checks
        .iter()
        .map(|c| match c {
            Check::Condition(cond) => Ok(CheckOutcome::from_audit(
                audit::audit(m, &[*cond], &tol).remove(0),
            )),
            Check::Chsh => chsh_outcome(&predicted, chsh_labels(&predicted)?, &tol),
            Check::Lhv => lhv_outcome(&predicted, &tol, cap),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Report::new("audit", subject, tolerance, outcomes))
}

/// Runs the selected checks on observed statistics. Conditions that need
/// hidden states are rejected.
pub fn run_phenomenology_audit(
    ph: &Phenomenology,
    checks: &[Check],
    tolerance: ToleranceInfo,
    subject: &str,
    cap: usize,
) -> Result<Report> {
    let tol = tolerance.tolerance();
    let outcomes = checks
        .iter()
        .map(|c| match c {
            Check::Condition(Condition::NoSignalling) => {
                Ok(CheckOutcome::from_audit(check_no_signalling(ph, &tol)))
            }
            Check::Condition(other) => Err(Error::Scenario(format!(
                "check '{other}' needs a bell-model; a phenomenology supports no-signalling, chsh and lhv"
            ))),
            Check::Chsh => chsh_outcome(ph, chsh_labels(ph)?, &tol),
            Check::Lhv => lhv_outcome(ph, &tol, cap),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Report::new("audit", subject, tolerance, outcomes))
}

/// CHSH value at explicit settings (defaults: the first two of each wing).
pub fn run_chsh(
    ph: &Phenomenology,
    labels: Option<[String; 4]>,
    tolerance: ToleranceInfo,
    subject: &str,
) -> Result<Report> {
    let labels = match labels {
        Some(l) => l,
        None => chsh_labels(ph)?,
    };
    let out = chsh_outcome(ph, labels, &tolerance.tolerance())?;
    Ok(Report::new("chsh", subject, tolerance, vec![out]))
}

pub fn run_lhv(
    ph: &Phenomenology,
    tolerance: ToleranceInfo,
    subject: &str,
    cap: usize,
) -> Result<Report> {
    let out = lhv_outcome(ph, &tolerance.tolerance(), cap)?;
    Ok(Report::new("lhv", subject, tolerance, vec![out]))
}

fn sufficiency_outcome(id: &str, r: fisher::SufficiencyReport, domain: &[String]) -> CheckOutcome {
    let mut out = CheckOutcome::bare(id, r.sufficient);
    out.max_deviation = Some(r.max_deviation);
    out.witness = r.witness.map(|x| format!("x={}", domain[x]));
    out.caveats = r.caveats;
    out
}

/// The three sufficiency criteria for `statistic` (when given) followed by
/// the minimal sufficient partition.
pub fn run_sufficiency(
    f: &StatFamily,
    statistic: Option<&Statistic>,
    prior: &Prior,
    tolerance: ToleranceInfo,
    subject: &str,
) -> Result<Report> {
    let tol = tolerance.tolerance();
    let domain = f.outcomes();
    let mut checks = Vec::new();
    if let Some(t) = statistic {
        checks.push(sufficiency_outcome(
            "sufficiency-conditional",
            fisher::is_sufficient_conditional(f, t, &tol)?,
            domain,
        ));
        let fact = fisher::is_sufficient_factorization(f, t, &tol)?;
        checks.push(sufficiency_outcome(
            "sufficiency-factorization",
            fisher::SufficiencyReport {
                sufficient: fact.sufficient,
                max_deviation: fact.max_deviation,
                witness: fact.witness,
                caveats: Vec::new(),
            },
            domain,
        ));
        checks.push(sufficiency_outcome(
            "sufficiency-bayes",
            fisher::is_sufficient_bayes(f, t, prior, &tol)?,
            domain,
        ));
    }
    let minimal = fisher::minimal_sufficient_partition(f, &tol)?;
    let mut out = CheckOutcome::bare("minimal-partition", true);
    out.verdict = format!("{} classes", minimal.codomain().len());
    out.partition = Some(PartitionSummary {
        classes: minimal
            .codomain()
            .iter()
            .zip(minimal.fibers())
            .map(|(c, fiber)| {
                (
                    c.clone(),
                    fiber.iter().map(|&x| domain[x].clone()).collect(),
                )
            })
            .collect(),
        statistic_refines: statistic.map(|t| t.refines(&minimal)),
    });
    checks.push(out);
    Ok(Report::new("suff", subject, tolerance, checks))
}

fn fmt_dev(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.6e}"))
}

/// Human-readable rendering.
pub fn render_text(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {}  {}  {}", r.tool, r.version, r.command, r.subject);
    let _ = writeln!(
        s,
        "tolerance: eq={:e} norm={:e} ({})",
        r.tolerance.eq, r.tolerance.norm, r.tolerance.source
    );
    let _ = writeln!(s);
    let w_id = r
        .checks
        .iter()
        .map(|c| c.id.len())
        .max()
        .unwrap_or(0)
        .max(9);
    let w_v = r
        .checks
        .iter()
        .map(|c| c.verdict.len())
        .max()
        .unwrap_or(0)
        .max(7);
    let _ = writeln!(
        s,
        "{:<w_id$}  {:<w_v$}  {:>13}  witness",
        "condition", "verdict", "max deviation"
    );
    for c in &r.checks {
        let _ = writeln!(
            s,
            "{:<w_id$}  {:<w_v$}  {:>13}  {}",
            c.id,
            c.verdict,
            fmt_dev(c.max_deviation),
            c.witness.as_deref().unwrap_or("-")
        );
    }
    for c in &r.checks {
        if let Some(x) = &c.chsh {
            let [a1, a2, b1, b2] = &x.settings;
            let _ = writeln!(
                s,
                "\nchsh: S = E({a1},{b1}) + E({a1},{b2}) + E({a2},{b1}) - E({a2},{b2}) = {:.9}",
                x.s
            );
            let _ = writeln!(
                s,
                "      correlators {:.9} {:.9} {:.9} {:.9}; max |S| = {:.9}; local bound {}",
                x.correlators[0],
                x.correlators[1],
                x.correlators[2],
                x.correlators[3],
                x.max_abs,
                x.lhv_bound
            );
        }
        if let Some(x) = &c.lhv {
            let _ = write!(
                s,
                "\nlhv: {} ({} strategies, {})",
                if x.feasible { "feasible" } else { "infeasible" },
                x.strategies_enumerated,
                match x.representation {
                    Representation::NoSignallingReduced => "no-signalling-reduced rows",
                    Representation::RawCells => "raw-cell rows",
                }
            );
            match (x.feasible, x.infeasibility_gap, x.reconstruction_error) {
                (false, Some(g), _) => {
                    let _ = writeln!(s, "; minimal L-inf gap {g:.9}");
                }
                (true, _, Some(e)) => {
                    let _ = writeln!(s, "; reconstruction error {e:.3e}");
                    for (label, w) in &x.weights {
                        let _ = writeln!(s, "      {w:.9}  {label}");
                    }
                }
                _ => {
                    let _ = writeln!(s);
                }
            }
        }
        if let Some(p) = &c.partition {
            let _ = writeln!(s, "\nminimal sufficient partition:");
            for (label, members) in &p.classes {
                let _ = writeln!(s, "      {label}: {}", members.join(" | "));
            }
            if let Some(refines) = p.statistic_refines {
                let _ = writeln!(s, "      statistic refines it: {refines}");
            }
        }
    }
    let caveats: Vec<(&str, &String)> = r
        .checks
        .iter()
        .flat_map(|c| c.caveats.iter().map(move |x| (c.id.as_str(), x)))
        .collect();
    if !caveats.is_empty() {
        let _ = writeln!(s, "\ncaveats:");
        for (id, c) in caveats {
            let _ = writeln!(s, "  {id}: {c}");
        }
    }
    let skipped: usize = r
        .checks
        .iter()
        .filter_map(|c| c.audit.as_ref())
        .map(|a| a.skipped_cells.len())
        .sum();
    if skipped > 0 {
        let _ = writeln!(s, "\n{skipped} conditional(s) on null events were skipped");
    }
    let _ = writeln!(s, "\nresult: {}", if r.passed { "PASS" } else { "FAIL" });
    s
}

/// JSON rendering; [`parse_machine`] inverts it exactly.
pub fn render_machine(r: &Report) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("reports serialize");
    s.push('\n');
    s
}

pub fn parse_machine(text: &str) -> Result<Report> {
    serde_json::from_str(text).map_err(|e| Error::Model(format!("not a machine report: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{build_pr_box, build_singlet};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn info() -> ToleranceInfo {
        resolve_tolerance(None, None).unwrap()
    }

    #[test]
    fn check_selection() {
        assert_eq!(
            parse_checks("chsh, lhv").unwrap(),
            vec![Check::Chsh, Check::Lhv]
        );
        assert_eq!(parse_checks("all").unwrap().len(), 9);
        assert!(parse_checks("locality").is_err());
        assert!(parse_checks(" ,").is_err());
    }

    #[test]
    fn tolerance_sources() {
        assert_eq!(info().source, "default");
        let t = resolve_tolerance(None, Some("1e-6")).unwrap();
        assert_eq!((t.eq, t.source.as_str()), (1e-6, "LCAUDIT_TOL=1e-6"));
        assert_eq!(
            resolve_tolerance(Some(1e-3), Some("1e-6")).unwrap().eq,
            1e-3
        );
        assert!(resolve_tolerance(None, Some("tiny")).is_err());
        assert!(resolve_tolerance(Some(-1.0), None).is_err());
    }

    #[test]
    fn singlet_report() {
        let m = build_singlet(&[0.0, FRAC_PI_2], &[FRAC_PI_4, 3.0 * FRAC_PI_4]).unwrap();
        let r = run_audit(&m, &Check::defaults(), info(), "singlet", 1024).unwrap();
        assert_eq!(r.exit_code(), 1);
        assert!(!r.check("statistical-sufficiency").unwrap().passed);
        assert!(r.check("functional-sufficiency").unwrap().passed);
        let text = render_text(&r);
        assert!(text.contains("result: FAIL") && text.contains("tolerance: eq=1e-9"));
    }

    #[test]
    fn pr_box_chsh() {
        let r = run_audit(&build_pr_box(), &[Check::Chsh], info(), "pr", 1024).unwrap();
        assert_eq!(r.checks[0].chsh.as_ref().unwrap().s, 4.0);
        assert!(!r.passed);
        assert!(render_text(&r).contains("= 4.000000000"));
    }

    #[test]
    fn machine_report_round_trips() {
        let m = build_singlet(&[0.0, 0.4], &[1.0, 2.2]).unwrap();
        let checks = parse_checks("all").unwrap();
        let r = run_audit(&m, &checks, info(), "singlet", 1024).unwrap();
        assert_eq!(parse_machine(&render_machine(&r)).unwrap(), r);
    }

    #[test]
    fn phenomenology_rejects_hidden_state_checks() {
        let ph = build_pr_box().predict();
        let r = run_phenomenology_audit(
            &ph,
            &[Check::Condition(Condition::NoSignalling)],
            info(),
            "pr",
            64,
        );
        assert!(r.unwrap().passed);
        assert!(run_phenomenology_audit(&ph, &Check::defaults(), info(), "pr", 64).is_err());
    }

    #[test]
    fn bernoulli_sufficiency_report() {
        let f =
            fisher::iid_product(&StatFamily::bernoulli(&[0.2, 0.5, 0.9]).unwrap(), 3, 100).unwrap();
        let t = Statistic::sum(f.outcomes()).unwrap();
        let r = run_sufficiency(&f, Some(&t), &Prior::uniform(&f), info(), "bern").unwrap();
        assert!(r.passed);
        let p = r
            .check("minimal-partition")
            .unwrap()
            .partition
            .as_ref()
            .unwrap();
        assert_eq!(p.classes.len(), 4);
        assert_eq!(p.statistic_refines, Some(true));
    }
}
