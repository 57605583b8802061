//! Candidate theories of the two-party experiment.
//!
//! A [`BellModel`] fixes the setting alphabets of both wings, their outcome
//! alphabets and a finite alphabet of hidden states λ. For every setting pair
//! it stores a prior over λ and, for every λ, a joint outcome table
//! P_{a,b}(A,B|λ). Settings are labels that select tables; they are never
//! random variables of the model.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::prob::{Axis, ProbTable, Tolerance};

pub const AXIS_A: &str = "A";
pub const AXIS_B: &str = "B";
pub const AXIS_LAMBDA: &str = "lambda";

/// Setting and outcome alphabets of both wings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub settings_a: Vec<String>,
    pub settings_b: Vec<String>,
    pub outcomes_a: Vec<String>,
    pub outcomes_b: Vec<String>,
}

fn check_alphabet(what: &str, symbols: &[String]) -> Result<()> {
    if symbols.is_empty() {
        return Err(Error::Model(format!("{what} alphabet is empty")));
    }
    for (i, s) in symbols.iter().enumerate() {
        if symbols[..i].contains(s) {
            return Err(Error::Model(format!("{what} alphabet repeats '{s}'")));
        }
    }
    Ok(())
}

fn strings<S: AsRef<str>>(xs: &[S]) -> Vec<String> {
    xs.iter().map(|s| s.as_ref().to_string()).collect()
}

impl Scenario {
    pub fn new<S: AsRef<str>>(
        settings_a: &[S],
        settings_b: &[S],
        outcomes_a: &[S],
        outcomes_b: &[S],
    ) -> Result<Self> {
        let s = Self {
            settings_a: strings(settings_a),
            settings_b: strings(settings_b),
            outcomes_a: strings(outcomes_a),
            outcomes_b: strings(outcomes_b),
        };
        s.validate()?;
        Ok(s)
    }

    /// `n_a` × `n_b` settings labelled `0..n`, outcomes labelled `0..k`.
    pub fn numbered(n_a: usize, n_b: usize, k_a: usize, k_b: usize) -> Result<Self> {
        let labels = |n: usize| (0..n).map(|i| i.to_string()).collect::<Vec<_>>();
        Self::new(&labels(n_a), &labels(n_b), &labels(k_a), &labels(k_b))
    }

    /// Two settings per side labelled `0`, `1`, outcomes `+1`, `-1`.
    pub fn chsh() -> Self {
        Self::new(&["0", "1"], &["0", "1"], &["+1", "-1"], &["+1", "-1"])
            .expect("static alphabets are valid")
    }

    fn validate(&self) -> Result<()> {
        check_alphabet("Alice setting", &self.settings_a)?;
        check_alphabet("Bob setting", &self.settings_b)?;
        check_alphabet("Alice outcome", &self.outcomes_a)?;
        check_alphabet("Bob outcome", &self.outcomes_b)
    }

    pub fn n_pairs(&self) -> usize {
        self.settings_a.len() * self.settings_b.len()
    }

    /// Row-major position of the setting pair `(ia, ib)`.
    pub fn pair(&self, ia: usize, ib: usize) -> usize {
        ia * self.settings_b.len() + ib
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let nb = self.settings_b.len();
        (0..self.settings_a.len()).flat_map(move |ia| (0..nb).map(move |ib| (ia, ib)))
    }

    /// Axes of a per-pair outcome table: `A` then `B`.
    pub fn outcome_axes(&self) -> Vec<Axis> {
        vec![
            Axis::new(AXIS_A, self.outcomes_a.clone()),
            Axis::new(AXIS_B, self.outcomes_b.clone()),
        ]
    }

    pub fn setting_index_a(&self, label: &str) -> Result<usize> {
        self.settings_a
            .iter()
            .position(|s| s == label)
            .ok_or_else(|| Error::Scenario(format!("unknown Alice setting '{label}'")))
    }

    pub fn setting_index_b(&self, label: &str) -> Result<usize> {
        self.settings_b
            .iter()
            .position(|s| s == label)
            .ok_or_else(|| Error::Scenario(format!("unknown Bob setting '{label}'")))
    }
}

/// A finite candidate theory.
#[derive(Debug, Clone, PartialEq)]
pub struct BellModel {
    scenario: Scenario,
    lambdas: Vec<String>,
    /// One prior over λ per setting pair, row-major in (a, b).
    priors: Vec<ProbTable>,
    /// `kernels[pair][λ]` is P_{a,b}(A,B|λ).
    kernels: Vec<Vec<ProbTable>>,
}

impl BellModel {
    pub fn new(
        scenario: Scenario,
        lambdas: Vec<String>,
        priors: Vec<ProbTable>,
        kernels: Vec<Vec<ProbTable>>,
    ) -> Result<Self> {
        scenario.validate()?;
        check_alphabet("hidden-state", &lambdas)?;
        let n = scenario.n_pairs();
        if priors.len() != n || kernels.len() != n {
            return Err(Error::Model(format!(
                "expected a prior and a kernel family for each of the {n} setting pairs, \
                 got {} priors and {} kernel families",
                priors.len(),
                kernels.len()
            )));
        }
        let lambda_axis = vec![Axis::new(AXIS_LAMBDA, lambdas.clone())];
        let outcome_axes = scenario.outcome_axes();
        for (ia, ib) in scenario.pairs() {
            let p = scenario.pair(ia, ib);
            let at = format!(
                "(a={}, b={})",
                scenario.settings_a[ia], scenario.settings_b[ib]
            );
            if priors[p].axes() != lambda_axis.as_slice() {
                return Err(Error::Model(format!(
                    "prior at {at} is not declared over the hidden-state alphabet"
                )));
            }
            if kernels[p].len() != lambdas.len() {
                return Err(Error::Model(format!(
                    "kernel family at {at} has {} tables, expected one per hidden state ({})",
                    kernels[p].len(),
                    lambdas.len()
                )));
            }
            for (l, k) in kernels[p].iter().enumerate() {
                if k.axes() != outcome_axes.as_slice() {
                    return Err(Error::Model(format!(
                        "kernel at {at}, lambda={} is not declared over (A, B)",
                        lambdas[l]
                    )));
                }
            }
        }
        Ok(Self {
            scenario,
            lambdas,
            priors,
            kernels,
        })
    }

    /// Builds a model from raw weights: `priors[pair][λ]` and
    /// `kernels[pair][λ][A * |B| + B]`. Errors name the offending index.
    pub fn from_weights(
        scenario: Scenario,
        lambdas: Vec<String>,
        priors: Vec<Vec<f64>>,
        kernels: Vec<Vec<Vec<f64>>>,
        tol: &Tolerance,
    ) -> Result<Self> {
        scenario.validate()?;
        check_alphabet("hidden-state", &lambdas)?;
        if priors.len() != scenario.n_pairs() || kernels.len() != scenario.n_pairs() {
            return Err(Error::Model(
                "weights do not cover the setting-pair grid".into(),
            ));
        }
        let mut prior_tables = Vec::with_capacity(priors.len());
        let mut kernel_tables = Vec::with_capacity(kernels.len());
        for (ia, ib) in scenario.pairs() {
            let p = scenario.pair(ia, ib);
            let (sa, sb) = (&scenario.settings_a[ia], &scenario.settings_b[ib]);
            prior_tables.push(
                ProbTable::new(
                    vec![Axis::new(AXIS_LAMBDA, lambdas.clone())],
                    priors[p].clone(),
                    tol,
                )
                .map_err(|e| Error::Model(format!("prior at (a={sa}, b={sb}): {e}")))?,
            );
            if kernels[p].len() != lambdas.len() {
                return Err(Error::Model(format!(
                    "kernel family at (a={sa}, b={sb}) needs one table per hidden state"
                )));
            }
            let mut fam = Vec::with_capacity(lambdas.len());
            for (l, w) in kernels[p].iter().enumerate() {
                fam.push(
                    ProbTable::new(scenario.outcome_axes(), w.clone(), tol).map_err(|e| {
                        Error::Model(format!(
                            "kernel at (a={sa}, b={sb}, lambda={}): {e}",
                            lambdas[l]
                        ))
                    })?,
                );
            }
            kernel_tables.push(fam);
        }
        Self::new(scenario, lambdas, prior_tables, kernel_tables)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn lambdas(&self) -> &[String] {
        &self.lambdas
    }

    pub fn prior(&self, ia: usize, ib: usize) -> &ProbTable {
        &self.priors[self.scenario.pair(ia, ib)]
    }

    pub fn kernel(&self, ia: usize, ib: usize, lambda: usize) -> &ProbTable {
        &self.kernels[self.scenario.pair(ia, ib)][lambda]
    }

    /// λ-averaged predictions Σ_λ ρ_{a,b}(λ) P_{a,b}(A,B|λ).
    pub fn predict(&self) -> Phenomenology {
        let tables = self
            .scenario
            .pairs()
            .map(|(ia, ib)| {
                let prior = self.prior(ia, ib).values();
                let parts: Vec<(f64, &ProbTable)> = (0..self.lambdas.len())
                    .map(|l| (prior[l], self.kernel(ia, ib, l)))
                    .collect();
                ProbTable::mixture(&parts).expect("kernels share the outcome axes")
            })
            .collect();
        Phenomenology {
            scenario: self.scenario.clone(),
            tables,
        }
    }

    /// Same model with a different prior per setting pair.
    pub fn with_priors(&self, priors: Vec<ProbTable>) -> Result<Self> {
        Self::new(
            self.scenario.clone(),
            self.lambdas.clone(),
            priors,
            self.kernels.clone(),
        )
    }
}

/// Observable predictions P_{a,b}(A,B), one table per setting pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Phenomenology {
    scenario: Scenario,
    tables: Vec<ProbTable>,
}

impl Phenomenology {
    pub fn new(scenario: Scenario, tables: Vec<ProbTable>) -> Result<Self> {
        scenario.validate()?;
        if tables.len() != scenario.n_pairs() {
            return Err(Error::Model(format!(
                "expected {} outcome tables, got {}",
                scenario.n_pairs(),
                tables.len()
            )));
        }
        let axes = scenario.outcome_axes();
        if let Some(p) = tables.iter().position(|t| t.axes() != axes.as_slice()) {
            return Err(Error::Model(format!(
                "outcome table {p} is not declared over (A, B)"
            )));
        }
        Ok(Self { scenario, tables })
    }

    /// `weights[pair][A * |B| + B]`.
    pub fn from_weights(
        scenario: Scenario,
        weights: Vec<Vec<f64>>,
        tol: &Tolerance,
    ) -> Result<Self> {
        if weights.len() != scenario.n_pairs() {
            return Err(Error::Model(
                "weights do not cover the setting-pair grid".into(),
            ));
        }
        let mut tables = Vec::with_capacity(weights.len());
        for (ia, ib) in scenario.pairs() {
            let w = weights[scenario.pair(ia, ib)].clone();
            tables.push(
                ProbTable::new(scenario.outcome_axes(), w, tol).map_err(|e| {
                    Error::Model(format!(
                        "table at (a={}, b={}): {e}",
                        scenario.settings_a[ia], scenario.settings_b[ib]
                    ))
                })?,
            );
        }
        Self::new(scenario, tables)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn table(&self, ia: usize, ib: usize) -> &ProbTable {
        &self.tables[self.scenario.pair(ia, ib)]
    }

    pub fn tables(&self) -> &[ProbTable] {
        &self.tables
    }

    /// Convex combination `w·self + (1-w)·other`.
    pub fn mix(&self, w: f64, other: &Phenomenology) -> Result<Phenomenology> {
        if self.scenario != other.scenario {
            return Err(Error::Scenario(
                "cannot mix phenomenologies of different scenarios".into(),
            ));
        }
        let tables = self
            .tables
            .iter()
            .zip(&other.tables)
            .map(|(x, y)| ProbTable::mixture(&[(w, x), (1.0 - w, y)]))
            .collect::<Result<_>>()?;
        Phenomenology::new(self.scenario.clone(), tables)
    }
}

/// A deterministic local response: each wing's outcome is a function of its
/// own setting only. Entries index the outcome alphabets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub response_a: Vec<usize>,
    pub response_b: Vec<usize>,
}

impl DeterministicStrategy {
    pub fn label(&self, scenario: &Scenario) -> String {
        let side = |r: &[usize], out: &[String]| {
            r.iter()
                .map(|&o| out[o].as_str())
                .collect::<Vec<_>>()
                .join(",")
        };
        format!(
            "A[{}]B[{}]",
            side(&self.response_a, &scenario.outcomes_a),
            side(&self.response_b, &scenario.outcomes_b)
        )
    }

    /// Point-mass outcome table at `(ia, ib)`.
    pub fn table(&self, scenario: &Scenario, ia: usize, ib: usize) -> ProbTable {
        ProbTable::point_mass(
            scenario.outcome_axes(),
            &[self.response_a[ia], self.response_b[ib]],
        )
        .expect("responses index the outcome alphabets")
    }
}

/// Number of product deterministic strategies, |O_A|^|S_A| · |O_B|^|S_B|.
pub fn strategy_count(scenario: &Scenario) -> u128 {
    let pow = |base: usize, exp: usize| (base as u128).checked_pow(exp as u32).unwrap_or(u128::MAX);
    pow(scenario.outcomes_a.len(), scenario.settings_a.len())
        .saturating_mul(pow(scenario.outcomes_b.len(), scenario.settings_b.len()))
}

fn odometer(digits: usize, base: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; digits];
    loop {
        out.push(cur.clone());
        let mut k = digits;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < base {
                break;
            }
            cur[k] = 0;
        }
    }
}

/// All product deterministic strategies in lexicographic order (Alice's
/// response varies slowest).
pub fn enumerate_strategies(scenario: &Scenario, cap: usize) -> Result<Vec<DeterministicStrategy>> {
    let needed = strategy_count(scenario);
    if needed > cap as u128 {
        return Err(Error::Capacity {
            what: "deterministic strategy enumeration".into(),
            needed,
            cap,
        });
    }
    let ra = odometer(scenario.settings_a.len(), scenario.outcomes_a.len());
    let rb = odometer(scenario.settings_b.len(), scenario.outcomes_b.len());
    Ok(ra
        .iter()
        .flat_map(|a| {
            rb.iter().map(move |b| DeterministicStrategy {
                response_a: a.clone(),
                response_b: b.clone(),
            })
        })
        .collect())
}

fn one_point_lambda() -> Vec<String> {
    vec!["l0".to_string()]
}

fn one_point_priors(scenario: &Scenario) -> Vec<ProbTable> {
    let prior = ProbTable::point_mass(vec![Axis::new(AXIS_LAMBDA, one_point_lambda())], &[0])
        .expect("one-point prior");
    vec![prior; scenario.n_pairs()]
}

/// Outcome `+1` ↔ first symbol, `-1` ↔ second.
const PM: [&str; 2] = ["+1", "-1"];

type C = Complex64;
type Mat2 = [[C; 2]; 2];

/// Spin projector onto outcome `sign` along the direction at `angle` in the
/// x–z plane: (I + sign·(cos θ σ_z + sin θ σ_x)) / 2.
fn spin_projector(angle: f64, sign: f64) -> Mat2 {
    let (s, c) = angle.sin_cos();
    let h = |x: f64| C::new(x / 2.0, 0.0);
    [
        [h(1.0 + sign * c), h(sign * s)],
        [h(sign * s), h(1.0 - sign * c)],
    ]
}

fn kron(x: &Mat2, y: &Mat2) -> [[C; 4]; 4] {
    let mut out = [[C::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = x[i / 2][j / 2] * y[i % 2][j % 2];
        }
    }
    out
}

/// ⟨ψ| M |ψ⟩ for a two-qubit state.
fn expectation(psi: &[C; 4], m: &[[C; 4]; 4]) -> f64 {
    let mut acc = C::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            acc += psi[i].conj() * m[i][j] * psi[j];
        }
    }
    acc.re
}

fn singlet_state() -> [C; 4] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    // (|01> - |10>)/√2 in the basis |00>, |01>, |10>, |11>
    [
        C::new(0.0, 0.0),
        C::new(r, 0.0),
        C::new(-r, 0.0),
        C::new(0.0, 0.0),
    ]
}

/// Largest admissible disagreement between the state-vector probabilities
/// and ¼(1 − A·B·cos(θ_a − θ_b)).
pub const SINGLET_SELF_CHECK: f64 = 1e-12;

/// The spin singlet measured along the given angles (radians) in a common
/// plane. Settings are labelled `a0, a1, …` and `b0, b1, …`; the hidden
/// state alphabet is a single point.
pub fn build_singlet(angles_a: &[f64], angles_b: &[f64]) -> Result<BellModel> {
    if angles_a.is_empty() || angles_b.is_empty() {
        return Err(Error::Model(
            "the singlet needs at least one angle per side".into(),
        ));
    }
    if let Some(x) = angles_a.iter().chain(angles_b).find(|x| !x.is_finite()) {
        return Err(Error::Model(format!("angle {x} is not finite")));
    }
    let sa: Vec<String> = (0..angles_a.len()).map(|i| format!("a{i}")).collect();
    let sb: Vec<String> = (0..angles_b.len()).map(|i| format!("b{i}")).collect();
    let pm = strings(&PM);
    let scenario = Scenario::new(&sa, &sb, &pm, &pm)?;
    let psi = singlet_state();
    let signs = [1.0, -1.0];

    let mut kernels = Vec::with_capacity(scenario.n_pairs());
    for (ia, ib) in scenario.pairs() {
        let (ta, tb) = (angles_a[ia], angles_b[ib]);
        let mut cells = Vec::with_capacity(4);
        for &x in &signs {
            for &y in &signs {
                let op = kron(&spin_projector(ta, x), &spin_projector(tb, y));
                let p = expectation(&psi, &op);
                let closed = 0.25 * (1.0 - x * y * (ta - tb).cos());
                if (p - closed).abs() > SINGLET_SELF_CHECK {
                    return Err(Error::Model(format!(
                        "singlet self-check failed at (a={ta}, b={tb}, A={x}, B={y}): \
                         state vector gives {p}, closed form {closed}"
                    )));
                }
                // roundoff can leave -1e-17 on a null cell
                cells.push(p.max(0.0));
            }
        }
        let sum: f64 = cells.iter().sum();
        cells.iter_mut().for_each(|c| *c /= sum);
        kernels.push(vec![ProbTable::from_parts(scenario.outcome_axes(), cells)]);
    }
    let priors = one_point_priors(&scenario);
    BellModel::new(scenario, one_point_lambda(), priors, kernels)
}

/// The Popescu–Rohrlich box. Settings and outcomes are bits internally;
/// outcome bit 0 is displayed as `+1` and bit 1 as `-1`.
pub fn build_pr_box() -> BellModel {
    let scenario = Scenario::chsh();
    let kernels = scenario
        .pairs()
        .map(|(a, b)| {
            let cells = (0..2usize)
                .flat_map(|x| (0..2usize).map(move |y| if x ^ y == a & b { 0.5 } else { 0.0 }))
                .collect();
            vec![ProbTable::from_parts(scenario.outcome_axes(), cells)]
        })
        .collect();
    let priors = one_point_priors(&scenario);
    BellModel::new(scenario, one_point_lambda(), priors, kernels).expect("PR box is well formed")
}

/// Deterministic, factorized kernels whose hidden state is chosen by the
/// settings. At pair (a, b) the prior is a point mass on `l{a}{b}`, which
/// fixes A = 0 and B = a·b (bit 0 shown as `+1`). Every hidden state is
/// locally causal, yet A ⊕ B = a·b holds at every pair, so CHSH reaches 4.
pub fn build_setting_dependent() -> BellModel {
    let scenario = Scenario::chsh();
    let states: Vec<(usize, usize)> = scenario.pairs().collect();
    let lambdas: Vec<String> = states.iter().map(|(x, y)| format!("l{x}{y}")).collect();
    let kernels = scenario
        .pairs()
        .map(|_| {
            states
                .iter()
                .map(|&(x, y)| {
                    ProbTable::point_mass(scenario.outcome_axes(), &[0, x & y])
                        .expect("binary outcomes")
                })
                .collect()
        })
        .collect();
    let priors = scenario
        .pairs()
        .map(|(a, b)| {
            let w = states
                .iter()
                .map(|&s| if s == (a, b) { 1.0 } else { 0.0 })
                .collect();
            ProbTable::from_parts(vec![Axis::new(AXIS_LAMBDA, lambdas.clone())], w)
        })
        .collect();
    BellModel::new(scenario, lambdas, priors, kernels).expect("well formed")
}

fn resolve_responses(
    wing: &str,
    settings: &[String],
    outcomes: &[String],
    response: &BTreeMap<String, String>,
) -> Result<Vec<usize>> {
    if let Some(extra) = response.keys().find(|k| !settings.contains(k)) {
        return Err(Error::Model(format!(
            "{wing} response names unknown setting '{extra}'"
        )));
    }
    settings
        .iter()
        .map(|s| {
            let o = response.get(s).ok_or_else(|| {
                Error::Model(format!("{wing} response is not defined for setting '{s}'"))
            })?;
            outcomes.iter().position(|x| x == o).ok_or_else(|| {
                Error::Model(format!(
                    "{wing} response maps '{s}' to unknown outcome '{o}'"
                ))
            })
        })
        .collect()
}

/// One-point λ, each wing's outcome fixed by its own setting.
pub fn build_deterministic_local(
    scenario: &Scenario,
    response_a: &BTreeMap<String, String>,
    response_b: &BTreeMap<String, String>,
) -> Result<BellModel> {
    let strategy = DeterministicStrategy {
        response_a: resolve_responses(
            "Alice",
            &scenario.settings_a,
            &scenario.outcomes_a,
            response_a,
        )?,
        response_b: resolve_responses(
            "Bob",
            &scenario.settings_b,
            &scenario.outcomes_b,
            response_b,
        )?,
    };
    let kernels = scenario
        .pairs()
        .map(|(ia, ib)| vec![strategy.table(scenario, ia, ib)])
        .collect();
    BellModel::new(
        scenario.clone(),
        one_point_lambda(),
        one_point_priors(scenario),
        kernels,
    )
}

/// A local hidden-variable model: λ ranges over the given strategies,
/// distributed by `weights` independently of the settings.
pub fn build_lhv_mixture(
    scenario: &Scenario,
    strategies: &[DeterministicStrategy],
    weights: &ProbTable,
) -> Result<BellModel> {
    if strategies.is_empty() {
        return Err(Error::Model(
            "an LHV mixture needs at least one strategy".into(),
        ));
    }
    if weights.axes().len() != 1 || weights.len() != strategies.len() {
        return Err(Error::Model(format!(
            "weights must be a one-axis table over the {} strategies",
            strategies.len()
        )));
    }
    for s in strategies {
        let ok = s.response_a.len() == scenario.settings_a.len()
            && s.response_b.len() == scenario.settings_b.len()
            && s.response_a.iter().all(|&o| o < scenario.outcomes_a.len())
            && s.response_b.iter().all(|&o| o < scenario.outcomes_b.len());
        if !ok {
            return Err(Error::Model(
                "strategy responses do not match the scenario alphabets".into(),
            ));
        }
    }
    let lambdas: Vec<String> = strategies.iter().map(|s| s.label(scenario)).collect();
    let prior = weights
        .relabeled(vec![Axis::new(AXIS_LAMBDA, lambdas.clone())])
        .map_err(|e| Error::Model(format!("strategy labels: {e}")))?;
    let kernels = scenario
        .pairs()
        .map(|(ia, ib)| {
            strategies
                .iter()
                .map(|s| s.table(scenario, ia, ib))
                .collect()
        })
        .collect();
    BellModel::new(
        scenario.clone(),
        lambdas,
        vec![prior; scenario.n_pairs()],
        kernels,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn responses(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn singlet_equal_angles_anticorrelated() {
        let m = build_singlet(&[0.3], &[0.3]).unwrap();
        let t = m.kernel(0, 0, 0);
        assert!(t.get(&[0, 0]).abs() < 1e-15);
        assert!((t.get(&[0, 1]) - 0.5).abs() < 1e-15);
        assert!((t.get(&[1, 0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn singlet_orthogonal_angles_uniform() {
        let m = build_singlet(&[0.0], &[FRAC_PI_2]).unwrap();
        for v in m.kernel(0, 0, 0).values() {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn singlet_cells_bounded() {
        let m = build_singlet(&[0.0, 0.7, 2.0, -1.3], &[0.1, FRAC_PI_4, 3.0]).unwrap();
        for (ia, ib) in m.scenario().pairs() {
            for v in m.kernel(ia, ib, 0).values() {
                assert!((0.0..=0.5 + 1e-15).contains(v));
            }
        }
    }

    #[test]
    fn singlet_rejects_empty() {
        assert!(build_singlet(&[], &[0.0]).is_err());
    }

    #[test]
    fn one_point_prior_predicts_kernel() {
        let m = build_singlet(&[0.0, 1.0], &[0.5]).unwrap();
        let ph = m.predict();
        for (ia, ib) in m.scenario().pairs() {
            assert_eq!(ph.table(ia, ib), m.kernel(ia, ib, 0));
        }
    }

    #[test]
    fn two_point_mixture_prediction() {
        let s = Scenario::new(&["x"], &["y"], &["+", "-"], &["+", "-"]).unwrap();
        let tol = Tolerance::default();
        let m = BellModel::from_weights(
            s,
            vec!["l0".into(), "l1".into()],
            vec![vec![0.5, 0.5]],
            vec![vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0, 1.0]]],
            &tol,
        )
        .unwrap();
        assert_eq!(m.predict().table(0, 0).values(), &[0.5, 0.0, 0.0, 0.5]);

        let degenerate = m
            .with_priors(vec![ProbTable::new(
                vec![Axis::new(AXIS_LAMBDA, ["l0", "l1"])],
                vec![1.0, 0.0],
                &tol,
            )
            .unwrap()])
            .unwrap();
        assert_eq!(degenerate.predict().table(0, 0), degenerate.kernel(0, 0, 0));
    }

    #[test]
    fn constant_deterministic_model_is_point_mass() {
        let s = Scenario::chsh();
        let m = build_deterministic_local(
            &s,
            &responses(&[("0", "+1"), ("1", "+1")]),
            &responses(&[("0", "-1"), ("1", "-1")]),
        )
        .unwrap();
        for (ia, ib) in s.pairs() {
            assert_eq!(m.predict().table(ia, ib).values(), &[0.0, 1.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn non_total_response_is_rejected() {
        let s = Scenario::chsh();
        let err = build_deterministic_local(
            &s,
            &responses(&[("0", "+1")]),
            &responses(&[("0", "+1"), ("1", "+1")]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Model(_)));
        let err = build_deterministic_local(
            &s,
            &responses(&[("0", "+1"), ("1", "0")]),
            &responses(&[("0", "+1"), ("1", "+1")]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Model(_)));
    }

    #[test]
    fn pr_box_marginals_uniform() {
        let ph = build_pr_box().predict();
        for (ia, ib) in ph.scenario().pairs() {
            let t = ph.table(ia, ib);
            assert_eq!(t.marginalize(&[AXIS_A]).unwrap().values(), &[0.5, 0.5]);
            assert_eq!(t.marginalize(&[AXIS_B]).unwrap().values(), &[0.5, 0.5]);
        }
        // a = b = 1 anticorrelates
        assert_eq!(ph.table(1, 1).values(), &[0.0, 0.5, 0.5, 0.0]);
        assert_eq!(ph.table(0, 1).values(), &[0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn uniform_mixture_over_all_strategies_is_uniform() {
        let s = Scenario::chsh();
        let strategies = enumerate_strategies(&s, 1 << 20).unwrap();
        assert_eq!(strategies.len(), 16);
        let w = ProbTable::uniform(vec![Axis::new("s", (0..16).map(|i| i.to_string()))]).unwrap();
        let ph = build_lhv_mixture(&s, &strategies, &w).unwrap().predict();
        for t in ph.tables() {
            for v in t.values() {
                assert!((v - 0.25).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn strategy_enumeration_respects_cap() {
        let s = Scenario::numbered(3, 3, 3, 3).unwrap();
        assert_eq!(strategy_count(&s), 729);
        assert!(matches!(
            enumerate_strategies(&s, 100),
            Err(Error::Capacity { needed: 729, .. })
        ));
        let all = enumerate_strategies(&s, 1000).unwrap();
        assert_eq!(all.len(), 729);
        assert_eq!(all[0].response_a, vec![0, 0, 0]);
        assert_eq!(all[1].response_b, vec![0, 0, 1]);
    }

    #[test]
    fn kernels_must_cover_grid() {
        let s = Scenario::chsh();
        let err = BellModel::from_weights(
            s,
            vec!["l".into()],
            vec![vec![1.0]; 3],
            vec![vec![vec![0.25; 4]]; 3],
            &Tolerance::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Model(_)));
    }

    #[test]
    fn unnormalized_kernel_names_its_index() {
        let s = Scenario::chsh();
        let mut kernels = vec![vec![vec![0.25; 4]]; 4];
        kernels[2][0] = vec![0.2, 0.2, 0.25, 0.25];
        let err = BellModel::from_weights(
            s,
            vec!["l0".into()],
            vec![vec![1.0]; 4],
            kernels,
            &Tolerance::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("a=1, b=0, lambda=l0"), "{err}");
    }

    #[test]
    fn setting_dependent_model_wins_every_round() {
        let ph = build_setting_dependent().predict();
        for (a, b) in ph.scenario().pairs() {
            let t = ph.table(a, b);
            let win: f64 = (0..2).map(|x| t.get(&[x, x ^ (a & b)])).sum();
            assert_eq!(win, 1.0);
        }
    }
}
