//! Seeded random models for property checks and demonstrations.
//!
//! Weights are small integers (0 to 4) normalized afterwards, so any two
//! entries either coincide exactly or differ by far more than the default
//! tolerance, and zero cells appear often.

use crate::fisher::{iid_product, Prior, StatFamily, Statistic};
use crate::prob::{Axis, ProbTable, Tolerance};
use crate::scenario::{build_lhv_mixture, enumerate_strategies, BellModel, Scenario, AXIS_LAMBDA};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5EED_1CA5;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` integer weights in `0..=4`, normalized; an all-zero draw becomes a
/// point mass.
pub fn weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0u8..=4))).collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.gen_range(0..n)] = 1.0;
    }
    normalize(w)
}

/// Like [`weights`] with every entry at least 1.
pub fn positive_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    normalize((0..n).map(|_| f64::from(rng.gen_range(1u8..=4))).collect())
}

fn normalize(w: Vec<f64>) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

fn outer(u: &[f64], v: &[f64]) -> Vec<f64> {
    u.iter()
        .flat_map(|x| v.iter().map(move |y| x * y))
        .collect()
}

/// Two or three settings and outcomes per wing.
pub fn scenario<R: Rng>(rng: &mut R) -> Scenario {
    Scenario::numbered(
        rng.gen_range(2..=3),
        rng.gen_range(2..=3),
        rng.gen_range(2..=3),
        rng.gen_range(2..=3),
    )
    .expect("numbered alphabets are valid")
}

/// Integer outcome counts `u ⊗ v` with a marginal-preserving twist on a
/// random 2×2 block.
fn correlated<R: Rng>(rng: &mut R, ka: usize, kb: usize, u: &[u32], v: &[u32]) -> Vec<f64> {
    let mut c: Vec<i64> = u
        .iter()
        .flat_map(|&x| v.iter().map(move |&y| i64::from(x * y)))
        .collect();
    let (i0, i1) = {
        let mut i: Vec<usize> = (0..ka).collect();
        i.shuffle(rng);
        (i[0], i[1])
    };
    let (j0, j1) = {
        let mut j: Vec<usize> = (0..kb).collect();
        j.shuffle(rng);
        (j[0], j[1])
    };
    let room = c[i0 * kb + j1].min(c[i1 * kb + j0]);
    if room > 0 {
        let k = rng.gen_range(1..=room);
        c[i0 * kb + j0] += k;
        c[i1 * kb + j1] += k;
        c[i0 * kb + j1] -= k;
        c[i1 * kb + j0] -= k;
    }
    normalize(c.into_iter().map(|x| x as f64).collect())
}

fn counts<R: Rng>(rng: &mut R, n: usize) -> Vec<u32> {
    let mut c: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
    if c.iter().all(|&x| x == 0) {
        c[rng.gen_range(0..n)] = 1;
    }
    c
}

/// A random candidate theory. Each hidden state draws its kernels from one
/// of four shapes: local products, products whose marginals depend on the
/// distant setting, correlated tables with setting-independent marginals,
/// or unconstrained tables. Priors are occasionally setting-dependent or
/// degenerate.
pub fn bell_model<R: Rng>(rng: &mut R) -> BellModel {
    let s = scenario(rng);
    let (na, nb) = (s.settings_a.len(), s.settings_b.len());
    let (ka, kb) = (s.outcomes_a.len(), s.outcomes_b.len());
    let n_lambda = rng.gen_range(1..=3);
    let lambdas: Vec<String> = (0..n_lambda).map(|l| format!("l{l}")).collect();

    let mut kernels = vec![Vec::with_capacity(n_lambda); s.n_pairs()];
    for _ in 0..n_lambda {
        let shape = rng.gen_range(0..4);
        let ua: Vec<Vec<u32>> = (0..na).map(|_| counts(rng, ka)).collect();
        let vb: Vec<Vec<u32>> = (0..nb).map(|_| counts(rng, kb)).collect();
        for (ia, ib) in s.pairs() {
            let table = match shape {
                0 => outer(&normalize_u(&ua[ia]), &normalize_u(&vb[ib])),
                1 => outer(&weights(rng, ka), &weights(rng, kb)),
                2 => correlated(rng, ka, kb, &ua[ia], &vb[ib]),
                _ => weights(rng, ka * kb),
            };
            kernels[s.pair(ia, ib)].push(table);
        }
    }

    let priors = match rng.gen_range(0..6) {
        0 => (0..s.n_pairs()).map(|_| weights(rng, n_lambda)).collect(),
        1 => {
            let mut point = vec![0.0; n_lambda];
            point[rng.gen_range(0..n_lambda)] = 1.0;
            vec![point; s.n_pairs()]
        }
        _ => vec![weights(rng, n_lambda); s.n_pairs()],
    };
    BellModel::from_weights(s, lambdas, priors, kernels, &Tolerance::default())
        .expect("generated weights are normalized")
}

fn normalize_u(c: &[u32]) -> Vec<f64> {
    normalize(c.iter().map(|&x| f64::from(x)).collect())
}

/// A random mixture of one to six distinct product deterministic strategies
/// over a scenario with at most 81 strategies.
pub fn lhv_mixture<R: Rng>(rng: &mut R) -> BellModel {
    let s = loop {
        let s = scenario(rng);
        if crate::scenario::strategy_count(&s) <= 81 {
            break s;
        }
    };
    let mut all = enumerate_strategies(&s, 81).expect("within cap");
    all.shuffle(rng);
    all.truncate(rng.gen_range(1..=6));
    let labels: Vec<String> = all.iter().map(|st| st.label(&s)).collect();
    let w = ProbTable::new(
        vec![Axis::new(AXIS_LAMBDA, labels)],
        positive_weights(rng, all.len()),
        &Tolerance::default(),
    )
    .expect("normalized weights");
    build_lhv_mixture(&s, &all, &w).expect("strategies match the scenario")
}

/// A family with 2 to 5 parameters. Half the time it is built to factor
/// through a random statistic, which is returned alongside; otherwise the
/// statistic is unrelated. Some families are i.i.d. products of up to three
/// draws, paired with a symmetric function of the draws.
pub fn family_and_statistic<R: Rng>(rng: &mut R) -> (StatFamily, Statistic) {
    let n_theta = rng.gen_range(2..=5);
    let thetas: Vec<String> = (0..n_theta).map(|i| format!("t{i}")).collect();
    let tol = Tolerance::default();
    if rng.gen_bool(0.25) {
        let (k, n) = *[(2, 1), (2, 2), (2, 3), (3, 1)].choose(rng).unwrap();
        let outcomes: Vec<String> = (0..k).map(|i| i.to_string()).collect();
        let rows = (0..n_theta).map(|_| weights(rng, k)).collect();
        let base = StatFamily::new(thetas, outcomes, rows, &tol).expect("normalized");
        let f = iid_product(&base, n, 8).expect("at most 8 outcomes");
        let stat = if rng.gen_bool(0.5) {
            Statistic::sum(f.outcomes()).expect("numeric outcomes")
        } else {
            random_statistic(rng, f.outcomes())
        };
        return (f, stat);
    }
    let n_x = rng.gen_range(2..=8);
    let outcomes: Vec<String> = (0..n_x).map(|i| format!("x{i}")).collect();
    let stat = random_statistic(rng, &outcomes);
    let rows = if rng.gen_bool(0.5) {
        let g: Vec<f64> = counts(rng, n_x).into_iter().map(f64::from).collect();
        (0..n_theta)
            .map(|_| loop {
                let h: Vec<f64> = (0..stat.codomain().len())
                    .map(|_| f64::from(rng.gen_range(0u8..=4)))
                    .collect();
                let row: Vec<f64> = (0..n_x).map(|x| h[stat.apply(x)] * g[x]).collect();
                if row.iter().any(|&v| v > 0.0) {
                    break normalize(row);
                }
            })
            .collect()
    } else {
        (0..n_theta).map(|_| weights(rng, n_x)).collect()
    };
    let f = StatFamily::new(thetas, outcomes, rows, &tol).expect("normalized");
    (f, stat)
}

pub fn random_statistic<R: Rng>(rng: &mut R, domain: &[String]) -> Statistic {
    let k = rng.gen_range(1..=domain.len());
    let labels: Vec<String> = domain
        .iter()
        .map(|_| format!("s{}", rng.gen_range(0..k)))
        .collect();
    Statistic::from_labels(domain, &labels).expect("one label per outcome")
}

/// A strictly positive prior.
pub fn positive_prior<R: Rng>(rng: &mut R, f: &StatFamily) -> Prior {
    Prior::new(
        f,
        positive_weights(rng, f.thetas().len()),
        &Tolerance::default(),
    )
    .expect("normalized")
}
