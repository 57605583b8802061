//! Sufficiency of statistics for finite parametric families.
//!
//! A [`StatFamily`] is a finite collection of distributions p_θ over a finite
//! outcome alphabet. A [`Statistic`] maps outcomes onto a finite codomain;
//! its fibers play the role of "the remaining data" once the statistic is
//! known. Three criteria decide whether a statistic is sufficient:
//!
//! - [`is_sufficient_conditional`]: the law of x within each fiber does not
//!   depend on θ;
//! - [`is_sufficient_factorization`]: p_θ(x) = h_θ(T(x)) g(x);
//! - [`is_sufficient_bayes`]: the posterior given x equals the posterior
//!   given T(x) for a strictly positive prior.
//!
//! On every family they agree; the test suite checks that they do.

use crate::error::{Error, Result};
use crate::prob::{Axis, ProbTable, Tolerance};

pub const AXIS_X: &str = "x";
pub const AXIS_THETA: &str = "theta";

/// Default bound on the number of outcomes a family may enumerate.
pub const DEFAULT_SIZE_CAP: usize = 1_000_000;

/// A finite family {p_θ : θ ∈ Θ} over outcomes X.
#[derive(Debug, Clone, PartialEq)]
pub struct StatFamily {
    thetas: Vec<String>,
    outcomes: Vec<String>,
    tables: Vec<ProbTable>,
}

fn distinct(what: &str, xs: &[String]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::Model(format!("{what} alphabet is empty")));
    }
    for (i, x) in xs.iter().enumerate() {
        if xs[..i].contains(x) {
            return Err(Error::Model(format!("{what} alphabet repeats '{x}'")));
        }
    }
    Ok(())
}

impl StatFamily {
    /// `rows[θ][x]` holds p_θ(x).
    pub fn new(
        thetas: Vec<String>,
        outcomes: Vec<String>,
        rows: Vec<Vec<f64>>,
        tol: &Tolerance,
    ) -> Result<Self> {
        distinct("parameter", &thetas)?;
        distinct("outcome", &outcomes)?;
        if rows.len() != thetas.len() {
            return Err(Error::Model(format!(
                "expected {} distributions, got {}",
                thetas.len(),
                rows.len()
            )));
        }
        let tables = rows
            .into_iter()
            .zip(&thetas)
            .map(|(row, theta)| {
                ProbTable::new(vec![Axis::new(AXIS_X, outcomes.clone())], row, tol)
                    .map_err(|e| Error::Model(format!("distribution at theta={theta}: {e}")))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            thetas,
            outcomes,
            tables,
        })
    }

    /// Bernoulli family over outcomes `0`, `1` with p_θ(1) = θ.
    pub fn bernoulli(params: &[f64]) -> Result<Self> {
        if let Some(p) = params.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Model(format!(
                "Bernoulli parameter {p} outside [0, 1]"
            )));
        }
        Self::new(
            params.iter().map(|p| p.to_string()).collect(),
            vec!["0".into(), "1".into()],
            params.iter().map(|&p| vec![1.0 - p, p]).collect(),
            &Tolerance::default(),
        )
    }

    pub fn thetas(&self) -> &[String] {
        &self.thetas
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn table(&self, theta: usize) -> &ProbTable {
        &self.tables[theta]
    }

    /// p_θ(x) by position.
    pub fn p(&self, theta: usize, x: usize) -> f64 {
        self.tables[theta].values()[x]
    }

    pub fn outcome_index(&self, symbol: &str) -> Result<usize> {
        self.outcomes
            .iter()
            .position(|s| s == symbol)
            .ok_or_else(|| Error::Axis(format!("unknown outcome '{symbol}'")))
    }

    fn restricted(&self, keep: &[usize]) -> StatFamily {
        StatFamily {
            thetas: keep.iter().map(|&i| self.thetas[i].clone()).collect(),
            outcomes: self.outcomes.clone(),
            tables: keep.iter().map(|&i| self.tables[i].clone()).collect(),
        }
    }
}

/// The family of n independent, identically distributed draws. Outcome
/// symbols are the component symbols joined by commas.
pub fn iid_product(f: &StatFamily, n: usize, cap: usize) -> Result<StatFamily> {
    if n == 0 {
        return Err(Error::Model("need at least one trial".into()));
    }
    let k = f.outcomes.len();
    let needed = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > cap as u128 {
        return Err(Error::Capacity {
            what: format!("{n} i.i.d. trials over {k} outcomes"),
            needed,
            cap,
        });
    }
    if n == 1 {
        return Ok(f.clone());
    }
    let size = needed as usize;
    let mut outcomes = Vec::with_capacity(size);
    let mut digits = vec![0usize; n];
    for _ in 0..size {
        outcomes.push(
            digits
                .iter()
                .map(|&d| f.outcomes[d].as_str())
                .collect::<Vec<_>>()
                .join(","),
        );
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < k {
                break;
            }
            *d = 0;
        }
    }
    let tables = f
        .tables
        .iter()
        .map(|t| {
            let mut values = vec![1.0; size];
            for (i, v) in values.iter_mut().enumerate() {
                let mut rest = i;
                for _ in 0..n {
                    *v *= t.values()[rest % k];
                    rest /= k;
                }
            }
            ProbTable::from_parts(vec![Axis::new(AXIS_X, outcomes.clone())], values)
        })
        .collect();
    Ok(StatFamily {
        thetas: f.thetas.clone(),
        outcomes,
        tables,
    })
}

/// A total map from an outcome alphabet onto a finite codomain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statistic {
    domain: Vec<String>,
    codomain: Vec<String>,
    map: Vec<usize>,
}

impl Statistic {
    /// `map[x]` indexes `codomain`. Codomain symbols outside the image are
    /// dropped.
    pub fn new(domain: Vec<String>, codomain: Vec<String>, map: Vec<usize>) -> Result<Self> {
        distinct("statistic domain", &domain)?;
        distinct("statistic codomain", &codomain)?;
        if map.len() != domain.len() {
            return Err(Error::Model(format!(
                "statistic is defined on {} of {} outcomes",
                map.len(),
                domain.len()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&t| t >= codomain.len()) {
            return Err(Error::Model(format!(
                "statistic value {bad} outside the codomain"
            )));
        }
        let mut used = vec![false; codomain.len()];
        map.iter().for_each(|&t| used[t] = true);
        let mut remap = vec![usize::MAX; codomain.len()];
        let mut kept = Vec::new();
        for (i, sym) in codomain.into_iter().enumerate() {
            if used[i] {
                remap[i] = kept.len();
                kept.push(sym);
            }
        }
        Ok(Self {
            domain,
            codomain: kept,
            map: map.into_iter().map(|t| remap[t]).collect(),
        })
    }

    /// Codomain in order of first appearance.
    pub fn from_labels<S: AsRef<str>>(domain: &[String], labels: &[S]) -> Result<Self> {
        if labels.len() != domain.len() {
            return Err(Error::Model("one label per outcome is required".into()));
        }
        let mut codomain: Vec<String> = Vec::new();
        let map = labels
            .iter()
            .map(|l| {
                let l = l.as_ref();
                codomain.iter().position(|c| c == l).unwrap_or_else(|| {
                    codomain.push(l.to_string());
                    codomain.len() - 1
                })
            })
            .collect();
        Self::new(domain.to_vec(), codomain, map)
    }

    pub fn from_fn(domain: &[String], f: impl Fn(&str) -> String) -> Result<Self> {
        let labels: Vec<String> = domain.iter().map(|x| f(x)).collect();
        Self::from_labels(domain, &labels)
    }

    pub fn identity(domain: &[String]) -> Result<Self> {
        Self::from_labels(domain, domain)
    }

    pub fn constant(domain: &[String]) -> Result<Self> {
        Self::from_labels(domain, &vec!["*"; domain.len()])
    }

    /// Sum of the comma-separated numeric components of each outcome.
    pub fn sum(domain: &[String]) -> Result<Self> {
        let labels = domain
            .iter()
            .map(|x| {
                x.split(',')
                    .map(|c| {
                        c.trim().parse::<i64>().map_err(|_| {
                            Error::Model(format!("outcome '{x}' is not a list of integers"))
                        })
                    })
                    .sum::<Result<i64>>()
                    .map(|s| s.to_string())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_labels(domain, &labels)
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn codomain(&self) -> &[String] {
        &self.codomain
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// Outcome indices grouped by statistic value.
    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let mut fibers = vec![Vec::new(); self.codomain.len()];
        for (x, &t) in self.map.iter().enumerate() {
            fibers[t].push(x);
        }
        fibers
    }

    /// φ ∘ T for a relabeling φ of the codomain (not necessarily injective).
    pub fn compose(&self, phi: impl Fn(&str) -> String) -> Result<Statistic> {
        let labels: Vec<String> = self.map.iter().map(|&t| phi(&self.codomain[t])).collect();
        Self::from_labels(&self.domain, &labels)
    }

    /// True when every fiber of `self` lies inside a fiber of `other`.
    pub fn refines(&self, other: &Statistic) -> bool {
        self.domain == other.domain
            && self
                .fibers()
                .iter()
                .all(|fiber| fiber.iter().all(|&x| other.map[x] == other.map[fiber[0]]))
    }
}

/// A prior over Θ.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior(ProbTable);

impl Prior {
    pub fn new(f: &StatFamily, weights: Vec<f64>, tol: &Tolerance) -> Result<Self> {
        ProbTable::new(vec![Axis::new(AXIS_THETA, f.thetas.clone())], weights, tol).map(Prior)
    }

    pub fn uniform(f: &StatFamily) -> Self {
        Prior(
            ProbTable::uniform(vec![Axis::new(AXIS_THETA, f.thetas.clone())])
                .expect("parameter alphabet is valid"),
        )
    }

    pub fn point_mass(f: &StatFamily, theta: usize) -> Result<Self> {
        ProbTable::point_mass(vec![Axis::new(AXIS_THETA, f.thetas.clone())], &[theta]).map(Prior)
    }

    pub fn table(&self) -> &ProbTable {
        &self.0
    }

    pub fn weights(&self) -> &[f64] {
        self.0.values()
    }
}

/// Outcome of a sufficiency criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct SufficiencyReport {
    pub sufficient: bool,
    pub max_deviation: f64,
    /// Outcome index attaining the deviation.
    pub witness: Option<usize>,
    pub caveats: Vec<String>,
}

/// The decomposition p_θ(x) ≈ h_θ(T(x)) g(x) built by the factorization
/// criterion; `h[θ][t]`, `g[x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub h: Vec<Vec<f64>>,
    pub g: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationReport {
    pub sufficient: bool,
    pub max_deviation: f64,
    pub witness: Option<usize>,
    pub factorization: Factorization,
}

fn check_domain(f: &StatFamily, t: &Statistic) -> Result<()> {
    if t.domain != f.outcomes {
        return Err(Error::Model(
            "statistic domain differs from the family's outcome alphabet".into(),
        ));
    }
    Ok(())
}

/// p_θ(T = t), `[θ][t]`.
fn fiber_masses(f: &StatFamily, t: &Statistic) -> Vec<Vec<f64>> {
    (0..f.thetas.len())
        .map(|th| {
            let mut mass = vec![0.0; t.codomain.len()];
            for (x, &v) in t.map.iter().enumerate() {
                mass[v] += f.p(th, x);
            }
            mass
        })
        .collect()
}

/// Law of T under each θ.
pub fn pushforward(f: &StatFamily, t: &Statistic) -> Result<StatFamily> {
    check_domain(f, t)?;
    let masses = fiber_masses(f, t);
    Ok(StatFamily {
        thetas: f.thetas.clone(),
        outcomes: t.codomain.clone(),
        tables: masses
            .into_iter()
            .map(|m| ProbTable::from_parts(vec![Axis::new(AXIS_X, t.codomain.clone())], m))
            .collect(),
    })
}

fn update(best: &mut (f64, Option<usize>), dev: f64, x: usize) {
    if best.1.is_none() || dev > best.0 {
        *best = (best.0.max(dev), Some(x));
    }
}

/// Within each fiber, the conditional law p_θ(x | T = t) must be the same
/// for every θ giving the fiber positive mass.
pub fn is_sufficient_conditional(
    f: &StatFamily,
    t: &Statistic,
    tol: &Tolerance,
) -> Result<SufficiencyReport> {
    check_domain(f, t)?;
    let masses = fiber_masses(f, t);
    let mut best = (0.0, None);
    let mut compared = false;
    for (v, fiber) in t.fibers().iter().enumerate() {
        let live: Vec<usize> = (0..f.thetas.len())
            .filter(|&th| masses[th][v] > tol.norm)
            .collect();
        for (j, &th2) in live.iter().enumerate() {
            for &th1 in &live[..j] {
                compared = true;
                for &x in fiber {
                    let c1 = f.p(th1, x) / masses[th1][v];
                    let c2 = f.p(th2, x) / masses[th2][v];
                    update(&mut best, (c1 - c2).abs(), x);
                }
            }
        }
    }
    let caveats = if compared {
        Vec::new()
    } else {
        vec!["no fiber has positive mass under two parameters; sufficiency holds vacuously".into()]
    };
    Ok(SufficiencyReport {
        sufficient: best.0 <= tol.eq,
        max_deviation: best.0,
        witness: best.1,
        caveats,
    })
}

/// Builds h_θ(t) = p_θ(T = t) and g(x) = p_θ*(x) / p_θ*(T = t) with θ* the
/// parameter giving the fiber the most mass, then measures how far
/// h_θ(T(x)) g(x) is from p_θ(x).
pub fn is_sufficient_factorization(
    f: &StatFamily,
    t: &Statistic,
    tol: &Tolerance,
) -> Result<FactorizationReport> {
    check_domain(f, t)?;
    let h = fiber_masses(f, t);
    let mut g = vec![0.0; f.outcomes.len()];
    for (v, fiber) in t.fibers().iter().enumerate() {
        let mut star = 0;
        for th in 1..f.thetas.len() {
            if h[th][v] > h[star][v] {
                star = th;
            }
        }
        if h[star][v] > 0.0 {
            for &x in fiber {
                g[x] = f.p(star, x) / h[star][v];
            }
        }
    }
    let mut best = (0.0, None);
    for (th, ht) in h.iter().enumerate() {
        for x in 0..f.outcomes.len() {
            let dev = (f.p(th, x) - ht[t.map[x]] * g[x]).abs();
            update(&mut best, dev, x);
        }
    }
    Ok(FactorizationReport {
        sufficient: best.0 <= tol.eq,
        max_deviation: best.0,
        witness: best.1,
        factorization: Factorization { h, g },
    })
}

/// p(θ | x) ∝ p_θ(x) ρ(θ).
pub fn posterior(f: &StatFamily, prior: &Prior, x: usize, tol: &Tolerance) -> Result<ProbTable> {
    if prior.weights().len() != f.thetas.len() {
        return Err(Error::Model(
            "prior does not match the parameter alphabet".into(),
        ));
    }
    if x >= f.outcomes.len() {
        return Err(Error::Axis(format!("outcome index {x} out of range")));
    }
    let joint: Vec<f64> = prior
        .weights()
        .iter()
        .enumerate()
        .map(|(th, r)| f.p(th, x) * r)
        .collect();
    let evidence: f64 = joint.iter().sum();
    if evidence <= tol.norm {
        return Err(Error::ZeroCondition {
            axis: AXIS_X.into(),
            value: f.outcomes[x].clone(),
            mass: evidence,
        });
    }
    Ok(ProbTable::from_parts(
        prior.table().axes().to_vec(),
        joint.into_iter().map(|j| j / evidence).collect(),
    ))
}

/// The posterior after seeing x must equal the posterior after seeing only
/// T(x). Parameters with zero prior weight are dropped first.
pub fn is_sufficient_bayes(
    f: &StatFamily,
    t: &Statistic,
    prior: &Prior,
    tol: &Tolerance,
) -> Result<SufficiencyReport> {
    check_domain(f, t)?;
    if prior.weights().len() != f.thetas.len() {
        return Err(Error::Model(
            "prior does not match the parameter alphabet".into(),
        ));
    }
    let keep: Vec<usize> = (0..f.thetas.len())
        .filter(|&th| prior.weights()[th] > 0.0)
        .collect();
    let mut caveats = Vec::new();
    let (family, prior) = if keep.len() < f.thetas.len() {
        let dropped: Vec<&str> = (0..f.thetas.len())
            .filter(|th| !keep.contains(th))
            .map(|th| f.thetas[th].as_str())
            .collect();
        caveats.push(format!(
            "parameters with zero prior weight were excluded: {}",
            dropped.join(", ")
        ));
        let family = f.restricted(&keep);
        let total: f64 = keep.iter().map(|&th| prior.weights()[th]).sum();
        let w = keep.iter().map(|&th| prior.weights()[th] / total).collect();
        let prior = Prior::new(&family, w, &Tolerance::uniform(1e-6)?)?;
        (family, prior)
    } else {
        (f.clone(), prior.clone())
    };
    let coarse = pushforward(&family, t)?;
    let mut best = (0.0, None);
    for x in 0..family.outcomes.len() {
        let fine = match posterior(&family, &prior, x, tol) {
            Ok(p) => p,
            Err(Error::ZeroCondition { .. }) => continue,
            Err(e) => return Err(e),
        };
        let given_t = posterior(&coarse, &prior, t.map[x], tol)?;
        let (_, dev) = crate::prob::sup_deviation(fine.values(), given_t.values());
        update(&mut best, dev, x);
    }
    if best.1.is_none() {
        caveats.push("no outcome has positive evidence".into());
    }
    Ok(SufficiencyReport {
        sufficient: best.0 <= tol.eq,
        max_deviation: best.0,
        witness: best.1,
        caveats,
    })
}

/// The coarsest sufficient statistic: outcomes whose likelihood vectors
/// (p_θ(x))_θ are proportional share a class, and null outcomes form one
/// class. Classes are labelled `c0, c1, …` in order of first appearance.
pub fn minimal_sufficient_partition(f: &StatFamily, tol: &Tolerance) -> Result<Statistic> {
    let n_theta = f.thetas.len();
    let mut reps: Vec<Option<Vec<f64>>> = Vec::new();
    let mut labels = Vec::with_capacity(f.outcomes.len());
    for x in 0..f.outcomes.len() {
        let v: Vec<f64> = (0..n_theta).map(|th| f.p(th, x)).collect();
        let total: f64 = v.iter().sum();
        let shape = (total > 0.0).then(|| v.iter().map(|p| p / total).collect::<Vec<f64>>());
        let class = reps.iter().position(|r| match (r, &shape) {
            (None, None) => true,
            (Some(r), Some(s)) => crate::prob::sup_deviation(r, s).1 <= tol.eq,
            _ => false,
        });
        let class = class.unwrap_or_else(|| {
            reps.push(shape);
            reps.len() - 1
        });
        labels.push(format!("c{class}"));
    }
    let stat = Statistic::from_labels(&f.outcomes, &labels)?;
    let check = is_sufficient_conditional(f, &stat, tol)?;
    if !check.sufficient {
        return Err(Error::Model(format!(
            "likelihood-ratio partition failed its sufficiency check (deviation {:e})",
            check.max_deviation
        )));
    }
    Ok(stat)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn iid_single_trial_is_identity() {
        let f = StatFamily::bernoulli(&[0.3, 0.6]).unwrap();
        assert_eq!(iid_product(&f, 1, DEFAULT_SIZE_CAP).unwrap(), f);
    }

    #[test]
    fn iid_two_trials() {
        let f = StatFamily::bernoulli(&[0.3]).unwrap();
        let f2 = iid_product(&f, 2, DEFAULT_SIZE_CAP).unwrap();
        let x = f2.outcome_index("1,1").unwrap();
        assert!((f2.p(0, x) - 0.09).abs() < 1e-15);
        let (a, b) = (
            f2.outcome_index("0,1").unwrap(),
            f2.outcome_index("1,0").unwrap(),
        );
        assert_eq!(f2.p(0, a), f2.p(0, b));
    }

    #[test]
    fn iid_respects_cap() {
        let f = StatFamily::bernoulli(&[0.3]).unwrap();
        assert!(matches!(
            iid_product(&f, 21, DEFAULT_SIZE_CAP),
            Err(Error::Capacity { .. })
        ));
        assert!(iid_product(&f, 0, DEFAULT_SIZE_CAP).is_err());
    }

    #[test]
    fn identity_statistic_is_sufficient() {
        let f = StatFamily::new(
            vec!["p".into(), "q".into()],
            vec!["x".into(), "y".into(), "z".into()],
            vec![vec![0.2, 0.3, 0.5], vec![0.6, 0.1, 0.3]],
            &tol(),
        )
        .unwrap();
        let t = Statistic::identity(f.outcomes()).unwrap();
        assert!(
            is_sufficient_conditional(&f, &t, &tol())
                .unwrap()
                .sufficient
        );
        assert!(
            is_sufficient_factorization(&f, &t, &tol())
                .unwrap()
                .sufficient
        );
        let prior = Prior::new(&f, vec![0.3, 0.7], &tol()).unwrap();
        assert!(
            is_sufficient_bayes(&f, &t, &prior, &tol())
                .unwrap()
                .sufficient
        );
    }

    #[test]
    fn constant_statistic_on_distinct_family_is_insufficient() {
        let f = StatFamily::bernoulli(&[0.2, 0.7]).unwrap();
        let t = Statistic::constant(f.outcomes()).unwrap();
        let c = is_sufficient_conditional(&f, &t, &tol()).unwrap();
        assert!(!c.sufficient);
        assert!((c.max_deviation - 0.5).abs() < 1e-15);
        assert!(c.witness.is_some());
        assert!(
            !is_sufficient_factorization(&f, &t, &tol())
                .unwrap()
                .sufficient
        );
        let b = is_sufficient_bayes(&f, &t, &Prior::uniform(&f), &tol()).unwrap();
        assert!(!b.sufficient);
    }

    #[test]
    fn posterior_by_hand() {
        let f = StatFamily::new(
            vec!["t1".into(), "t2".into()],
            vec!["x".into(), "y".into()],
            vec![vec![0.4, 0.6], vec![0.2, 0.8]],
            &tol(),
        )
        .unwrap();
        let post = posterior(&f, &Prior::uniform(&f), 0, &tol()).unwrap();
        assert!((post.values()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((post.values()[1] - 1.0 / 3.0).abs() < 1e-15);

        let point = Prior::point_mass(&f, 1).unwrap();
        assert_eq!(
            posterior(&f, &point, 1, &tol()).unwrap().values(),
            point.weights()
        );
    }

    #[test]
    fn uninformative_datum_keeps_prior() {
        let f = StatFamily::new(
            vec!["t1".into(), "t2".into(), "t3".into()],
            vec!["x".into(), "y".into()],
            vec![vec![0.5, 0.5], vec![0.5, 0.5], vec![0.5, 0.5]],
            &tol(),
        )
        .unwrap();
        let prior = Prior::new(&f, vec![0.2, 0.3, 0.5], &tol()).unwrap();
        let post = posterior(&f, &prior, 0, &tol()).unwrap();
        for (a, b) in post.values().iter().zip(prior.weights()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn posterior_zero_evidence() {
        let f = StatFamily::new(
            vec!["a".into(), "b".into()],
            vec!["0".into(), "1".into()],
            vec![vec![1.0, 0.0], vec![1.0, 0.0]],
            &tol(),
        )
        .unwrap();
        assert!(matches!(
            posterior(&f, &Prior::uniform(&f), 1, &tol()),
            Err(Error::ZeroCondition { .. })
        ));
    }

    #[test]
    fn bayes_drops_zero_prior_parameters() {
        let f = StatFamily::bernoulli(&[0.2, 0.7, 0.9]).unwrap();
        let t = Statistic::constant(f.outcomes()).unwrap();
        let prior = Prior::new(&f, vec![1.0, 0.0, 0.0], &tol()).unwrap();
        let r = is_sufficient_bayes(&f, &t, &prior, &tol()).unwrap();
        // only one parameter left: nothing to distinguish
        assert!(r.sufficient);
        assert!(r.caveats[0].contains("0.7, 0.9"));
    }

    #[test]
    fn minimal_partition_of_identical_family_is_constant() {
        let f = StatFamily::new(
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into(), "z".into()],
            vec![vec![0.2, 0.3, 0.5], vec![0.2, 0.3, 0.5]],
            &tol(),
        )
        .unwrap();
        let m = minimal_sufficient_partition(&f, &tol()).unwrap();
        assert_eq!(m.codomain().len(), 1);
    }

    #[test]
    fn minimal_partition_of_point_masses() {
        // θ_i puts all mass on x_i; x_3 is never observed
        let f = StatFamily::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec!["x0".into(), "x1".into(), "x2".into(), "x3".into()],
            vec![
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ],
            &tol(),
        )
        .unwrap();
        let m = minimal_sufficient_partition(&f, &tol()).unwrap();
        assert_eq!(m.map(), &[0, 1, 2, 3]);
    }

    #[test]
    fn statistic_prunes_unreachable_codomain() {
        let s = Statistic::new(
            vec!["x".into(), "y".into()],
            vec!["u".into(), "v".into(), "w".into()],
            vec![2, 0],
        )
        .unwrap();
        assert_eq!(s.codomain(), &["u".to_string(), "w".to_string()]);
        assert_eq!(s.map(), &[1, 0]);
        assert!(Statistic::new(vec!["x".into()], vec!["u".into()], vec![]).is_err());
    }

    #[test]
    fn refinement() {
        let d: Vec<String> = ["0,0", "0,1", "1,0", "1,1"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let id = Statistic::identity(&d).unwrap();
        let sum = Statistic::sum(&d).unwrap();
        let c = Statistic::constant(&d).unwrap();
        assert!(id.refines(&sum) && sum.refines(&c) && id.refines(&c));
        assert!(!sum.refines(&id));
        assert_eq!(sum.codomain().len(), 3);
    }
}
