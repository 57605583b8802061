//! CHSH values and membership in the local-hidden-variable polytope.
//!
//! Membership is decided exactly on the vertex representation: every
//! product deterministic strategy is enumerated and a linear feasibility
//! problem asks for a convex combination reproducing the phenomenology.

mod simplex;

use crate::audit::check_no_signalling;
use crate::error::{Error, Result};
use crate::prob::{Axis, ProbTable, Tolerance};
use crate::scenario::{
    build_lhv_mixture, enumerate_strategies, BellModel, DeterministicStrategy, Phenomenology,
    Scenario, AXIS_LAMBDA,
};
use serde::{Deserialize, Serialize};
use simplex::Outcome;

/// Default bound on the number of enumerated strategies.
pub const DEFAULT_STRATEGY_CAP: usize = 65_536;

/// Correlators E(a,b) = Σ A·B·P_{a,b}(A,B) for binary outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlator {
    scenario: Scenario,
    values: Vec<f64>,
}

/// ±1 values of a binary outcome alphabet: the literal values when the
/// symbols are `1` and `-1` in some order, otherwise first = +1.
fn pm_values(what: &str, symbols: &[String]) -> Result<[f64; 2]> {
    if symbols.len() != 2 {
        return Err(Error::Scenario(format!(
            "{what} outcomes must be binary for correlators, found {}",
            symbols.len()
        )));
    }
    let parsed: Vec<Option<f64>> = symbols.iter().map(|s| s.trim().parse().ok()).collect();
    match (parsed[0], parsed[1]) {
        (Some(x), Some(y)) if x * y == -1.0 && x.abs() == 1.0 => Ok([x, y]),
        _ => Ok([1.0, -1.0]),
    }
}

impl Correlator {
    pub fn new(ph: &Phenomenology) -> Result<Self> {
        let s = ph.scenario();
        let va = pm_values("Alice", &s.outcomes_a)?;
        let vb = pm_values("Bob", &s.outcomes_b)?;
        let values = ph
            .tables()
            .iter()
            .map(|t| {
                let p = t.values();
                va[0] * vb[0] * p[0]
                    + va[0] * vb[1] * p[1]
                    + va[1] * vb[0] * p[2]
                    + va[1] * vb[1] * p[3]
            })
            .collect();
        Ok(Self {
            scenario: s.clone(),
            values,
        })
    }

    pub fn get(&self, ia: usize, ib: usize) -> f64 {
        self.values[self.scenario.pair(ia, ib)]
    }

    pub fn by_label(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.get(
            self.scenario.setting_index_a(a)?,
            self.scenario.setting_index_b(b)?,
        ))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// S = E(a1,b1) + E(a1,b2) + E(a2,b1) − E(a2,b2).
pub fn chsh(ph: &Phenomenology, a1: &str, a2: &str, b1: &str, b2: &str) -> Result<f64> {
    let e = Correlator::new(ph)?;
    Ok(e.by_label(a1, b1)? + e.by_label(a1, b2)? + e.by_label(a2, b1)? - e.by_label(a2, b2)?)
}

/// The four CHSH expressions over the same settings, one for each choice of
/// the pair carrying the minus sign, in the order (a1,b1), (a1,b2), (a2,b1),
/// (a2,b2). The last entry equals [`chsh`].
pub fn chsh_arrangements(
    ph: &Phenomenology,
    a1: &str,
    a2: &str,
    b1: &str,
    b2: &str,
) -> Result<[f64; 4]> {
    let e = Correlator::new(ph)?;
    let es = [
        e.by_label(a1, b1)?,
        e.by_label(a1, b2)?,
        e.by_label(a2, b1)?,
        e.by_label(a2, b2)?,
    ];
    let total: f64 = es.iter().sum();
    Ok(es.map(|x| total - 2.0 * x))
}

/// Outcome tables of a single deterministic strategy.
pub fn strategy_phenomenology(scenario: &Scenario, s: &DeterministicStrategy) -> Phenomenology {
    let tables = scenario
        .pairs()
        .map(|(ia, ib)| s.table(scenario, ia, ib))
        .collect();
    Phenomenology::new(scenario.clone(), tables).expect("strategy tables match the scenario")
}

/// Largest |S| attained by any product deterministic strategy in the
/// two-setting, two-outcome scenario.
pub fn lhv_bound_chsh() -> f64 {
    let scenario = Scenario::chsh();
    let (a, b) = (&scenario.settings_a, &scenario.settings_b);
    enumerate_strategies(&scenario, DEFAULT_STRATEGY_CAP)
        .expect("16 strategies")
        .iter()
        .map(|s| {
            chsh(
                &strategy_phenomenology(&scenario, s),
                &a[0],
                &a[1],
                &b[0],
                &b[1],
            )
            .expect("binary scenario")
            .abs()
        })
        .fold(0.0, f64::max)
}

/// Which constraint system the feasibility problem was posed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    /// One marginal row per non-final local outcome and one joint row per
    /// pair of non-final outcomes, valid when the input does not signal.
    NoSignallingReduced,
    /// One row per outcome cell of every setting pair.
    RawCells,
}

/// Result of an LHV membership test.
#[derive(Debug, Clone, PartialEq)]
pub struct LhvCertificate {
    pub feasible: bool,
    pub scenario: Scenario,
    /// Strategies carrying positive weight, when feasible.
    pub strategies: Vec<DeterministicStrategy>,
    /// Distribution over `strategies` (axis `lambda`, strategy labels).
    pub weights: Option<ProbTable>,
    /// Smallest achievable L∞ distance between the input and the polytope,
    /// when infeasible.
    pub infeasibility_gap: Option<f64>,
    /// L∞ distance between the input and the reconstruction from `weights`.
    pub reconstruction_error: Option<f64>,
    pub representation: Representation,
    /// The input failed the no-signalling check.
    pub signalling: bool,
    pub strategies_enumerated: usize,
}

impl LhvCertificate {
    /// The local hidden-variable model defined by the certificate weights.
    pub fn to_model(&self) -> Result<BellModel> {
        let weights = self
            .weights
            .as_ref()
            .ok_or_else(|| Error::Model("an infeasible certificate carries no weights".into()))?;
        build_lhv_mixture(&self.scenario, &self.strategies, weights)
    }
}

/// Indicator of strategy `s` producing cell (α, β) at pair `(ia, ib)`.
fn hits(s: &DeterministicStrategy, ia: usize, ib: usize, alpha: usize, beta: usize) -> bool {
    s.response_a[ia] == alpha && s.response_b[ib] == beta
}

/// Raw-cell constraint rows: one per (pair, A, B), in phenomenology order.
fn raw_rows(ph: &Phenomenology, strategies: &[DeterministicStrategy]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let s = ph.scenario();
    let (ka, kb) = (s.outcomes_a.len(), s.outcomes_b.len());
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (ia, ib) in s.pairs() {
        let p = ph.table(ia, ib).values();
        for alpha in 0..ka {
            for beta in 0..kb {
                rows.push(
                    strategies
                        .iter()
                        .map(|st| f64::from(u8::from(hits(st, ia, ib, alpha, beta))))
                        .collect(),
                );
                rhs.push(p[alpha * kb + beta]);
            }
        }
    }
    (rows, rhs)
}

/// Reduced rows: non-final local marginals and non-final joint cells. Local marginals are read at the first distant setting.
fn reduced_rows(
    ph: &Phenomenology,
    strategies: &[DeterministicStrategy],
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let s = ph.scenario();
    let (ka, kb) = (s.outcomes_a.len(), s.outcomes_b.len());
    let ind = |f: &dyn Fn(&DeterministicStrategy) -> bool| -> Vec<f64> {
        strategies
            .iter()
            .map(|st| f64::from(u8::from(f(st))))
            .collect()
    };
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for ia in 0..s.settings_a.len() {
        let p = ph.table(ia, 0).values();
        for alpha in 0..ka - 1 {
            rows.push(ind(&|st| st.response_a[ia] == alpha));
            rhs.push((0..kb).map(|beta| p[alpha * kb + beta]).sum());
        }
    }
    for ib in 0..s.settings_b.len() {
        let p = ph.table(0, ib).values();
        for beta in 0..kb - 1 {
            rows.push(ind(&|st| st.response_b[ib] == beta));
            rhs.push((0..ka).map(|alpha| p[alpha * kb + beta]).sum());
        }
    }
    for (ia, ib) in s.pairs() {
        let p = ph.table(ia, ib).values();
        for alpha in 0..ka - 1 {
            for beta in 0..kb - 1 {
                rows.push(ind(&|st| hits(st, ia, ib, alpha, beta)));
                rhs.push(p[alpha * kb + beta]);
            }
        }
    }
    (rows, rhs)
}

fn reconstruction_error(rows: &[Vec<f64>], rhs: &[f64], q: &[f64]) -> f64 {
    rows.iter()
        .zip(rhs)
        .map(|(row, p)| (row.iter().zip(q).map(|(d, w)| d * w).sum::<f64>() - p).abs())
        .fold(0.0, f64::max)
}

/// Finds q ≥ 0 with Σq = 1 matching the given rows.
fn phase_one(rows: &[Vec<f64>], rhs: &[f64], n: usize, tol: &Tolerance) -> Option<Vec<f64>> {
    let mut a = rows.to_vec();
    let mut b = rhs.to_vec();
    a.push(vec![1.0; n]);
    b.push(1.0);
    match simplex::minimize(&a, &b, &vec![0.0; n], tol.eq) {
        Outcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

/// min t subject to |Σ_s q_s D_s − P| ≤ t cellwise, Σq = 1, q ≥ 0.
/// Returns the optimal t and weights.
fn min_gap(rows: &[Vec<f64>], rhs: &[f64], n: usize) -> (f64, Vec<f64>) {
    let m = rows.len();
    let width = n + 1 + 2 * m;
    let mut a = Vec::with_capacity(2 * m + 1);
    let mut b = Vec::with_capacity(2 * m + 1);
    for (i, (row, p)) in rows.iter().zip(rhs).enumerate() {
        let mut upper = vec![0.0; width];
        upper[..n].copy_from_slice(row);
        upper[n] = -1.0;
        upper[n + 1 + i] = 1.0;
        a.push(upper);
        b.push(*p);
        let mut lower = vec![0.0; width];
        lower[..n].copy_from_slice(row);
        lower[n] = 1.0;
        lower[n + 1 + m + i] = -1.0;
        a.push(lower);
        b.push(*p);
    }
    let mut norm = vec![0.0; width];
    norm[..n].iter_mut().for_each(|v| *v = 1.0);
    a.push(norm);
    b.push(1.0);
    let mut c = vec![0.0; width];
    c[n] = 1.0;
    match simplex::minimize(&a, &b, &c, 1e-9) {
        Outcome::Optimal { x, value } => (value, x[..n].to_vec()),
        other => unreachable!("the gap problem is feasible and bounded below: {other:?}"),
    }
}

/// Decides whether some mixture of product deterministic strategies
/// reproduces `ph` within `tol.eq` on every cell.
pub fn lhv_membership(ph: &Phenomenology, tol: &Tolerance, cap: usize) -> Result<LhvCertificate> {
    let scenario = ph.scenario().clone();
    let strategies = enumerate_strategies(&scenario, cap)?;
    let n = strategies.len();
    let signalling = !check_no_signalling(ph, tol).verdict.passed();
    let representation = if signalling {
        Representation::RawCells
    } else {
        Representation::NoSignallingReduced
    };
    let (raw, raw_rhs) = raw_rows(ph, &strategies);

    let mut candidate = if signalling {
        None
    } else {
        let (rows, rhs) = reduced_rows(ph, &strategies);
        phase_one(&rows, &rhs, n, tol)
    };
    if candidate
        .as_ref()
        .is_none_or(|q| reconstruction_error(&raw, &raw_rhs, q) > tol.eq)
    {
        candidate = phase_one(&raw, &raw_rhs, n, tol);
    }
    let mut gap = None;
    if candidate
        .as_ref()
        .is_none_or(|q| reconstruction_error(&raw, &raw_rhs, q) > tol.eq)
    {
        let (t, q) = min_gap(&raw, &raw_rhs, n);
        candidate = (t <= tol.eq).then_some(q);
        gap = Some(t.max(0.0));
    }

    let base = LhvCertificate {
        feasible: false,
        scenario: scenario.clone(),
        strategies: Vec::new(),
        weights: None,
        infeasibility_gap: gap,
        reconstruction_error: None,
        representation,
        signalling,
        strategies_enumerated: n,
    };
    let Some(q) = candidate else {
        return Ok(base);
    };
    let error = reconstruction_error(&raw, &raw_rhs, &q);
    if error > tol.eq {
        return Ok(LhvCertificate {
            infeasibility_gap: Some(gap.unwrap_or(error)),
            ..base
        });
    }
    let support: Vec<usize> = (0..n).filter(|&i| q[i] > 0.0).collect();
    let total: f64 = support.iter().map(|&i| q[i]).sum();
    let kept: Vec<DeterministicStrategy> = support.iter().map(|&i| strategies[i].clone()).collect();
    let labels: Vec<String> = kept.iter().map(|s| s.label(&scenario)).collect();
    let weights = ProbTable::new(
        vec![Axis::new(AXIS_LAMBDA, labels)],
        support.iter().map(|&i| q[i] / total).collect(),
        tol,
    )?;
    Ok(LhvCertificate {
        feasible: true,
        strategies: kept,
        weights: Some(weights),
        infeasibility_gap: None,
        reconstruction_error: Some(error),
        ..base
    })
}
