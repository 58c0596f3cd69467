//! The adaptive two-pass dictatorship tests.
//!
//! Both testers read their functions only through [`FoldedOracle`], in the
//! sampler and in the exact enumerators alike. Pass 1 reads `f_i(y_i)`; the
//! answer fixes `v_i = (1 - f_i(y_i)) / 2`, and pass 2 queries points shifted
//! by `(v_i·1⃗ + y_i) ∧ z`. Under folding `f_i(v_i·1⃗ + y_i) = 1`, so the shift
//! is noise restricted to the zeros of that point.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::bits::{check_dimension, ones_mask, BitVector};
use crate::error::{Error, Result};
use crate::fourier::{subset_zeta, wht};
use crate::function::{BooleanFunction, FoldedOracle, RealPointFunction};
use crate::rng::trial_rng;
use crate::stats::{proportion_stderr, wilson_interval};

/// Largest vertex count a hypergraph may have.
pub const MAX_VERTICES: usize = 16;

/// `H = ([k], E)`. Edges are stored as ascending lists of 1-based vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    k: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Rejects singleton edges.
    pub fn new(k: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        Self::build(k, edges, false)
    }

    /// Like [`Hypergraph::new`] but also accepts edges of size 1.
    pub fn with_singletons(k: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        Self::build(k, edges, true)
    }

    fn build(k: usize, edges: Vec<Vec<usize>>, allow_singletons: bool) -> Result<Self> {
        if k == 0 || k > MAX_VERTICES {
            return Err(Error::InvalidHypergraph(format!(
                "vertex count {k} outside 1..={MAX_VERTICES}"
            )));
        }
        let mut seen = BTreeSet::new();
        let mut normalized = Vec::with_capacity(edges.len());
        for edge in edges {
            let set: BTreeSet<usize> = edge.iter().copied().collect();
            if set.len() != edge.len() {
                return Err(Error::InvalidHypergraph(format!(
                    "edge {edge:?} repeats a vertex"
                )));
            }
            if set.is_empty() {
                return Err(Error::InvalidHypergraph("empty edge".into()));
            }
            if set.len() == 1 && !allow_singletons {
                return Err(Error::InvalidHypergraph(format!(
                    "singleton edge {edge:?} (enable singletons explicitly)"
                )));
            }
            if let Some(&v) = set.iter().find(|&&v| v == 0 || v > k) {
                return Err(Error::InvalidHypergraph(format!(
                    "vertex {v} outside 1..={k}"
                )));
            }
            let sorted: Vec<usize> = set.into_iter().collect();
            if !seen.insert(sorted.clone()) {
                return Err(Error::InvalidHypergraph(format!(
                    "duplicate edge {sorted:?}"
                )));
            }
            normalized.push(sorted);
        }
        Ok(Self {
            k,
            edges: normalized,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of functions `t = k + |E|`.
    pub fn function_count(&self) -> usize {
        self.k + self.edges.len()
    }

    fn edge_masks(&self) -> Vec<usize> {
        self.edges
            .iter()
            .map(|e| e.iter().fold(0, |m, &v| m | 1 << (v - 1)))
            .collect()
    }
}

/// The complete hypergraph on `k` vertices: every subset of size at least 2,
/// so `t = k + |E| = 2^k - 1` and the test makes `t + log2(t + 1)` queries.
pub fn complete_hypergraph(k: usize) -> Result<Hypergraph> {
    if !(2..=MAX_VERTICES).contains(&k) {
        return Err(Error::InvalidHypergraph(format!(
            "complete hypergraph needs 2 <= k <= {MAX_VERTICES}, got {k}"
        )));
    }
    let edges = (1usize..1 << k)
        .filter(|m| m.count_ones() >= 2)
        .map(|m| (1..=k).filter(|&v| m >> (v - 1) & 1 == 1).collect())
        .collect();
    Hypergraph::new(k, edges)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryBudget {
    pub pass1: usize,
    pub pass2: usize,
    pub total: usize,
}

/// Queries made by one run of the H-Test: `(k, k + |E|, 2k + |E|)`.
pub fn query_budget(h: &Hypergraph) -> QueryBudget {
    QueryBudget {
        pass1: h.k,
        pass2: h.k + h.edges.len(),
        total: 2 * h.k + h.edges.len(),
    }
}

/// The soundness bound `2^{k - |E|}` of the H-Test.
pub fn soundness_bound(h: &Hypergraph) -> f64 {
    2f64.powi(h.k as i32 - h.edges.len() as i32)
}

/// Which member of a family a query went to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FunctionId {
    /// The single function of the Basic Test.
    Single,
    /// Vertex function `f_i`, 1-based.
    Vertex(usize),
    /// Edge function `f_e`, indexed by position in [`Hypergraph::edges`].
    Edge(usize),
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionId::Single => write!(f, "f"),
            FunctionId::Vertex(i) => write!(f, "v{i}"),
            FunctionId::Edge(e) => write!(f, "e#{e}"),
        }
    }
}

/// The collection `{f_a}` for `a ∈ [k] ∪ E`; every member is folded.
#[derive(Clone, Debug)]
pub struct FunctionFamily {
    hypergraph: Hypergraph,
    n: usize,
    vertices: Vec<BooleanFunction>,
    edges: Vec<BooleanFunction>,
}

impl FunctionFamily {
    pub fn new(
        hypergraph: Hypergraph,
        vertices: Vec<BooleanFunction>,
        edges: Vec<BooleanFunction>,
    ) -> Result<Self> {
        if vertices.len() != hypergraph.k || edges.len() != hypergraph.edges.len() {
            return Err(Error::InvalidArgument(format!(
                "family needs {} vertex and {} edge functions, got {} and {}",
                hypergraph.k,
                hypergraph.edges.len(),
                vertices.len(),
                edges.len()
            )));
        }
        let n = vertices[0].n();
        for (id, f) in vertices
            .iter()
            .enumerate()
            .map(|(i, f)| (FunctionId::Vertex(i + 1), f))
            .chain(edges.iter().enumerate().map(|(e, f)| (FunctionId::Edge(e), f)))
        {
            if f.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: f.n(),
                });
            }
            f.ensure_folded().map_err(|err| match err {
                Error::NotFolded { index } => Error::InvalidArgument(format!(
                    "member {id} is not folded (fails at index {index})"
                )),
                other => other,
            })?;
        }
        Ok(Self {
            hypergraph,
            n,
            vertices,
            edges,
        })
    }

    /// Every member equal to `f`.
    pub fn uniform(hypergraph: Hypergraph, f: &BooleanFunction) -> Result<Self> {
        let vertices = vec![f.clone(); hypergraph.k];
        let edges = vec![f.clone(); hypergraph.edges.len()];
        Self::new(hypergraph, vertices, edges)
    }

    pub fn hypergraph(&self) -> &Hypergraph {
        &self.hypergraph
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn member(&self, id: FunctionId) -> Option<&BooleanFunction> {
        match id {
            FunctionId::Vertex(i) if i >= 1 => self.vertices.get(i - 1),
            FunctionId::Edge(e) => self.edges.get(e),
            _ => None,
        }
    }

    pub fn vertex_functions(&self) -> &[BooleanFunction] {
        &self.vertices
    }

    pub fn edge_functions(&self) -> &[BooleanFunction] {
        &self.edges
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn accepted(self) -> bool {
        self == Verdict::Accept
    }
}

/// One oracle query: the requested point (before folding) and the answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryRecord {
    pub function: FunctionId,
    pub point: BitVector,
    pub answer: i8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestTranscript {
    pub pass1: Vec<QueryRecord>,
    pub pass2: Vec<QueryRecord>,
    pub verdict: Verdict,
    /// Oracle queries charged during the run.
    pub total_queries: u64,
}

fn random_point(rng: &mut impl Rng, n: usize) -> usize {
    rng.gen::<u64>() as usize & ones_mask(n)
}

/// Exact probability as `accepts / 2^log2_outcomes`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactProbability {
    pub accepts: u64,
    pub log2_outcomes: u32,
}

impl ExactProbability {
    pub fn value(&self) -> f64 {
        self.accepts as f64 / 2f64.powi(self.log2_outcomes as i32)
    }

    pub fn is_one(&self) -> bool {
        self.accepts == 1u64 << self.log2_outcomes
    }
}

fn check_guard(needed: usize, allowed: u32) -> Result<()> {
    if needed > allowed as usize || needed >= 64 {
        Err(Error::GuardExceeded {
            needed: needed as u32,
            allowed,
        })
    } else {
        Ok(())
    }
}

/// Points chosen by one run of the Basic Test.
#[derive(Clone, Copy, Debug)]
struct BasicDraws {
    xi: usize,
    xj: usize,
    y: usize,
    z: usize,
}

/// One round of the Basic Test. Appends to `log` when given.
fn basic_round(
    oracle: &mut FoldedOracle<'_>,
    draws: BasicDraws,
    log: Option<(&mut Vec<QueryRecord>, &mut Vec<QueryRecord>)>,
) -> bool {
    let ones = ones_mask(oracle.n());
    let fy = oracle.query_index(draws.y);
    // v = (1 - f(y)) / 2 is 1 exactly when f(y) = -1.
    let shift = if fy == -1 { draws.y ^ ones } else { draws.y };
    let third = draws.xi ^ draws.xj ^ (shift & draws.z);
    let a = oracle.query_index(draws.xi);
    let b = oracle.query_index(draws.xj);
    let c = oracle.query_index(third);
    if let Some((pass1, pass2)) = log {
        let n = oracle.n();
        let rec = |point: usize, answer| QueryRecord {
            function: FunctionId::Single,
            point: BitVector::new(n, point).expect("point in range"),
            answer,
        };
        pass1.push(rec(draws.y, fy));
        pass2.extend([rec(draws.xi, a), rec(draws.xj, b), rec(third, c)]);
    }
    a * b == c
}

/// One run of the Basic Test against `oracle`.
pub fn run_basic_test(oracle: &mut FoldedOracle<'_>, rng: &mut impl Rng) -> TestTranscript {
    let n = oracle.n();
    let draws = BasicDraws {
        xi: random_point(rng, n),
        xj: random_point(rng, n),
        y: random_point(rng, n),
        z: random_point(rng, n),
    };
    let before = oracle.query_count();
    let (mut pass1, mut pass2) = (Vec::with_capacity(1), Vec::with_capacity(3));
    let accepted = basic_round(oracle, draws, Some((&mut pass1, &mut pass2)));
    TestTranscript {
        pass1,
        pass2,
        verdict: if accepted { Verdict::Accept } else { Verdict::Reject },
        total_queries: oracle.query_count() - before,
    }
}

/// Acceptance probability of the Basic Test by enumerating all
/// `(x_i, x_j, y, z)`.
pub fn basic_test_prob_exact(f: &BooleanFunction, guard_bits: u32) -> Result<ExactProbability> {
    f.ensure_folded()?;
    let n = f.n();
    check_guard(4 * n, guard_bits)?;
    let mask = ones_mask(n);
    // Parallel over (y, z); each worker owns its oracle and integer count.
    let accepts: u64 = (0..1usize << (2 * n))
        .into_par_iter()
        .map(|yz| {
            let mut oracle = FoldedOracle::new(f);
            let (y, z) = (yz & mask, yz >> n);
            let mut count = 0u64;
            for xi in 0..=mask {
                for xj in 0..=mask {
                    if basic_round(&mut oracle, BasicDraws { xi, xj, y, z }, None) {
                        count += 1;
                    }
                }
            }
            count
        })
        .sum();
    Ok(ExactProbability {
        accepts,
        log2_outcomes: 4 * n as u32,
    })
}

/// Acceptance probability of the Basic Test from the spectrum:
/// `1/2 + 1/2 Σ_α f̂(α)^3 2^{-|α|} (1 + Σ_{β⊆α} f̂(β))`.
pub fn basic_test_prob_fourier(f: &BooleanFunction) -> Result<f64> {
    f.ensure_folded()?;
    let spectrum = wht(f);
    let zeta = subset_zeta(&spectrum);
    let sum: f64 = spectrum
        .coeffs()
        .iter()
        .zip(&zeta)
        .enumerate()
        .map(|(alpha, (&c, &z))| c * c * c * 0.5f64.powi(alpha.count_ones() as i32) * (1.0 + z))
        .sum();
    Ok(0.5 + 0.5 * sum)
}

/// Monte Carlo acceptance rate with a Wilson interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub stderr: f64,
    pub accepts: u64,
    pub trials: u64,
    pub total_queries: u64,
}

fn mc_estimate(accepts: u64, trials: u64, total_queries: u64, confidence: f64) -> Result<McEstimate> {
    let (ci_low, ci_high) = wilson_interval(accepts, trials, confidence)?;
    let estimate = accepts as f64 / trials as f64;
    Ok(McEstimate {
        estimate,
        ci_low,
        ci_high,
        stderr: proportion_stderr(estimate, trials),
        accepts,
        trials,
        total_queries,
    })
}

/// Runs `trials` independent trials, trial `t` drawing from
/// `trial_rng(seed, t)`, and sums `(accepted, queries)` as integers.
fn run_trials(trials: u64, seed: u64, run: impl Fn(&mut crate::rng::TestRng) -> (bool, u64) + Sync) -> (u64, u64) {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let (ok, q) = run(&mut rng);
            (ok as u64, q)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// Basic Test acceptance rate over `trials` seeded runs.
pub fn basic_test_prob_mc(f: &BooleanFunction, trials: u64, seed: u64, confidence: f64) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let (accepts, queries) = run_trials(trials, seed, |rng| {
        let mut oracle = FoldedOracle::new(f);
        let t = run_basic_test(&mut oracle, rng);
        (t.verdict.accepted(), t.total_queries)
    });
    mc_estimate(accepts, trials, queries, confidence)
}

/// Scratch space for one H-Test round.
struct HRound<'f> {
    vertex_oracles: Vec<FoldedOracle<'f>>,
    edge_oracles: Vec<FoldedOracle<'f>>,
    edge_masks: Vec<usize>,
    shifts: Vec<usize>,
    answers: Vec<i8>,
    ones: usize,
}

impl<'f> HRound<'f> {
    fn new(fam: &'f FunctionFamily) -> Self {
        Self {
            vertex_oracles: fam.vertices.iter().map(FoldedOracle::new).collect(),
            edge_oracles: fam.edges.iter().map(FoldedOracle::new).collect(),
            edge_masks: fam.hypergraph.edge_masks(),
            shifts: vec![0; fam.hypergraph.k],
            answers: vec![0; fam.hypergraph.k],
            ones: ones_mask(fam.n),
        }
    }

    fn queries(&self) -> u64 {
        self.vertex_oracles
            .iter()
            .chain(&self.edge_oracles)
            .map(FoldedOracle::query_count)
            .sum()
    }

    /// `xs`, `ys` have length `k`; `zs` has length `k + |E|` (vertex noise
    /// first, then edge noise in edge order).
    fn run(
        &mut self,
        xs: &[usize],
        ys: &[usize],
        zs: &[usize],
        mut log: Option<(&mut Vec<QueryRecord>, &mut Vec<QueryRecord>)>,
    ) -> bool {
        let k = xs.len();
        let n = self.ones.count_ones() as usize;
        let rec = |function, point: usize, answer| QueryRecord {
            function,
            point: BitVector::new(n, point).expect("point in range"),
            answer,
        };
        // Pass 1: f_i(y_i) fixes v_i, hence the shift v_i·1⃗ + y_i.
        for i in 0..k {
            let a = self.vertex_oracles[i].query_index(ys[i]);
            self.shifts[i] = if a == -1 { ys[i] ^ self.ones } else { ys[i] };
            if let Some((p1, _)) = log.as_mut() {
                p1.push(rec(FunctionId::Vertex(i + 1), ys[i], a));
            }
        }
        // Pass 2.
        for i in 0..k {
            let point = xs[i] ^ (self.shifts[i] & zs[i]);
            let a = self.vertex_oracles[i].query_index(point);
            self.answers[i] = a;
            if let Some((_, p2)) = log.as_mut() {
                p2.push(rec(FunctionId::Vertex(i + 1), point, a));
            }
        }
        let mut accept = true;
        for (e, &mask) in self.edge_masks.iter().enumerate() {
            let (mut x_sum, mut shift_sum, mut product) = (0usize, 0usize, 1i8);
            for i in (0..k).filter(|i| mask >> i & 1 == 1) {
                x_sum ^= xs[i];
                shift_sum ^= self.shifts[i];
                product *= self.answers[i];
            }
            let point = x_sum ^ (shift_sum & zs[k + e]);
            let a = self.edge_oracles[e].query_index(point);
            if let Some((_, p2)) = log.as_mut() {
                p2.push(rec(FunctionId::Edge(e), point, a));
            }
            accept &= product == a;
        }
        accept
    }
}

/// One run of the H-Test.
pub fn run_hypergraph_test(fam: &FunctionFamily, rng: &mut impl Rng) -> TestTranscript {
    let k = fam.hypergraph.k;
    let n = fam.n;
    let xs: Vec<usize> = (0..k).map(|_| random_point(rng, n)).collect();
    let ys: Vec<usize> = (0..k).map(|_| random_point(rng, n)).collect();
    let zs: Vec<usize> = (0..fam.hypergraph.function_count())
        .map(|_| random_point(rng, n))
        .collect();
    let mut round = HRound::new(fam);
    let budget = query_budget(&fam.hypergraph);
    let (mut pass1, mut pass2) = (Vec::with_capacity(budget.pass1), Vec::with_capacity(budget.pass2));
    let accepted = round.run(&xs, &ys, &zs, Some((&mut pass1, &mut pass2)));
    TestTranscript {
        pass1,
        pass2,
        verdict: if accepted { Verdict::Accept } else { Verdict::Reject },
        total_queries: round.queries(),
    }
}

/// Random bits consumed by one H-Test run: `(3k + |E|)·n`.
pub fn htest_randomness_bits(fam: &FunctionFamily) -> usize {
    (3 * fam.hypergraph.k + fam.hypergraph.edges.len()) * fam.n
}

/// Acceptance probability of the H-Test by enumerating every choice of
/// `x_1..x_k, y_1..y_k, {z_a}`.
pub fn htest_prob_exact(fam: &FunctionFamily, guard_bits: u32) -> Result<ExactProbability> {
    let bits = htest_randomness_bits(fam);
    check_guard(bits, guard_bits)?;
    let n = fam.n;
    let k = fam.hypergraph.k;
    let slots = 3 * k + fam.hypergraph.edges.len();
    let mask = ones_mask(n);
    const BLOCK_BITS: usize = 12;
    let block_bits = bits.min(BLOCK_BITS);
    let accepts: u64 = (0..1u64 << (bits - block_bits))
        .into_par_iter()
        .map(|block| {
            let mut round = HRound::new(fam);
            let mut draws = vec![0usize; slots];
            let mut count = 0u64;
            for low in 0..1u64 << block_bits {
                let counter = block << block_bits | low;
                for (s, d) in draws.iter_mut().enumerate() {
                    *d = (counter >> (s * n)) as usize & mask;
                }
                let (xs, rest) = draws.split_at(k);
                let (ys, zs) = rest.split_at(k);
                if round.run(xs, ys, zs, None) {
                    count += 1;
                }
            }
            count
        })
        .sum();
    Ok(ExactProbability {
        accepts,
        log2_outcomes: bits as u32,
    })
}

/// H-Test acceptance rate over `trials` seeded runs, with a Wilson interval
/// at `confidence`.
pub fn htest_prob_mc(fam: &FunctionFamily, trials: u64, seed: u64, confidence: f64) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let (accepts, queries) = run_trials(trials, seed, |rng| {
        let t = run_hypergraph_test(fam, rng);
        (t.verdict.accepted(), t.total_queries)
    });
    mc_estimate(accepts, trials, queries, confidence)
}

/// `g(x; y) = E_z f(c' + x + (c + y) ∧ z)` on `2n` variables; the point
/// `(x; y)` has index `x | y << n`.
pub fn noise_and_operator(f: &BooleanFunction, c: &BitVector, c_prime: &BitVector) -> Result<RealPointFunction> {
    let n = f.n();
    for v in [c, c_prime] {
        if v.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.n(),
            });
        }
    }
    check_dimension(2 * n)?;
    check_guard(3 * n, crate::DEFAULT_GUARD_BITS)?;
    let (c, c_prime) = (c.index(), c_prime.index());
    let size = 1usize << n;
    let table = (0..size * size)
        .into_par_iter()
        .map(|j| {
            let (x, y) = (j & (size - 1), j >> n);
            let base = c_prime ^ x;
            let noise = c ^ y;
            let sum: i64 = (0..size).map(|z| f.at(base ^ (noise & z)) as i64).sum();
            sum as f64 / size as f64
        })
        .collect();
    RealPointFunction::new(2 * n, table)
}

/// `max_{α,β} |ĝ(α;β)² - f̂(α)² 1{β⊆α} 4^{-|α|}|` for `g` the noise operator
/// applied to `f`.
pub fn noise_spectrum_deviation(f: &BooleanFunction, c: &BitVector, c_prime: &BitVector) -> Result<f64> {
    let n = f.n();
    let g = wht(&noise_and_operator(f, c, c_prime)?);
    let fs = wht(f);
    let size = 1usize << n;
    Ok((0..size * size)
        .map(|j| {
            let (alpha, beta) = (j & (size - 1), j >> n);
            let predicted = if beta & !alpha == 0 {
                fs.coeff(alpha).powi(2) * 0.25f64.powi(alpha.count_ones() as i32)
            } else {
                0.0
            };
            (g.coeff(j).powi(2) - predicted).abs()
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{dictator, parity, random_folded};
    use crate::rng::seeded;
    use crate::DEFAULT_GUARD_BITS as GUARD;

    #[test]
    fn hypergraph_validation() {
        assert!(Hypergraph::new(2, vec![vec![1, 2]]).is_ok());
        assert!(Hypergraph::new(0, vec![]).is_err());
        assert!(Hypergraph::new(2, vec![vec![1]]).is_err());
        assert!(Hypergraph::with_singletons(2, vec![vec![1]]).is_ok());
        assert!(Hypergraph::new(2, vec![vec![]]).is_err());
        assert!(Hypergraph::new(2, vec![vec![1, 3]]).is_err());
        assert!(Hypergraph::new(2, vec![vec![1, 1]]).is_err());
        assert!(Hypergraph::new(3, vec![vec![1, 2], vec![2, 1]]).is_err());
        let h = Hypergraph::new(3, vec![vec![3, 1]]).unwrap();
        assert_eq!(h.edges(), &[vec![1, 3]]);
    }

    #[test]
    fn complete_hypergraph_examples() {
        let h2 = complete_hypergraph(2).unwrap();
        assert_eq!(h2.edges(), &[vec![1, 2]]);
        assert_eq!(h2.function_count(), 3);
        let h3 = complete_hypergraph(3).unwrap();
        assert_eq!(h3.edge_count(), 4);
        assert_eq!(query_budget(&h3).total, 10);
        assert_eq!(soundness_bound(&h3), 0.5);
        assert_eq!(soundness_bound(&h3), 64.0 / 128.0);
        let h4 = complete_hypergraph(4).unwrap();
        assert_eq!((h4.edge_count(), h4.function_count(), query_budget(&h4).total), (11, 15, 19));
        assert!(complete_hypergraph(1).is_err());
    }

    #[test]
    fn query_budget_examples() {
        let h = Hypergraph::new(2, vec![vec![1, 2]]).unwrap();
        assert_eq!(query_budget(&h), QueryBudget { pass1: 2, pass2: 3, total: 5 });
        let lone = Hypergraph::new(1, vec![]).unwrap();
        assert_eq!(query_budget(&lone), QueryBudget { pass1: 1, pass2: 1, total: 2 });
        let c3 = complete_hypergraph(3).unwrap();
        assert_eq!(query_budget(&c3), QueryBudget { pass1: 3, pass2: 7, total: 10 });
    }

    #[test]
    fn family_rejects_unfolded_members() {
        let h = Hypergraph::new(2, vec![vec![1, 2]]).unwrap();
        let d = dictator(3, 1).unwrap();
        let c = BooleanFunction::constant(3, 1).unwrap();
        assert!(FunctionFamily::new(h.clone(), vec![d.clone(), c], vec![d.clone()]).is_err());
        assert!(FunctionFamily::new(h.clone(), vec![d.clone()], vec![d.clone()]).is_err());
        assert!(FunctionFamily::new(h, vec![d.clone(), dictator(2, 1).unwrap()], vec![d]).is_err());
    }

    #[test]
    fn basic_test_completeness_sampled() {
        let mut rng = seeded(1);
        for n in 1..=6 {
            for l in 1..=n {
                let f = dictator(n, l).unwrap();
                let mut oracle = FoldedOracle::new(&f);
                for run in 0..50u64 {
                    let t = run_basic_test(&mut oracle, &mut rng);
                    assert_eq!(t.verdict, Verdict::Accept);
                    assert_eq!((t.pass1.len(), t.pass2.len(), t.total_queries), (1, 3, 4));
                    assert_eq!(oracle.query_count(), 4 * (run + 1));
                }
            }
        }
    }

    #[test]
    fn basic_test_replay() {
        // Replays the recorded points by hand against the folded extension.
        let f = parity(2, &BitVector::ones(2).unwrap()).unwrap();
        let folded = f.folded_extension();
        let mut oracle = FoldedOracle::new(&f);
        let t = run_basic_test(&mut oracle, &mut seeded(42));
        let y = t.pass1[0].point;
        let fy = folded.evaluate(&y).unwrap();
        assert_eq!(t.pass1[0].answer, fy);
        let [xi, xj, third] = [t.pass2[0].point, t.pass2[1].point, t.pass2[2].point];
        let shift = if fy == -1 { y.complement() } else { y };
        let z_part = third.xor(&xi).xor(&xj);
        assert!(z_part.is_subset_of(&shift));
        let a = folded.evaluate(&xi).unwrap();
        let b = folded.evaluate(&xj).unwrap();
        let c = folded.evaluate(&third).unwrap();
        assert_eq!((t.pass2[0].answer, t.pass2[1].answer, t.pass2[2].answer), (a, b, c));
        assert_eq!(t.verdict.accepted(), a * b == c);
    }

    #[test]
    fn basic_test_exact_examples() {
        for n in 1..=4 {
            for l in 1..=n {
                let p = basic_test_prob_exact(&dictator(n, l).unwrap(), GUARD).unwrap();
                assert!(p.is_one());
            }
        }
        let chi = parity(3, &BitVector::ones(3).unwrap()).unwrap();
        assert_eq!(basic_test_prob_exact(&chi, GUARD).unwrap().value(), 0.5 + 0.125);
        assert_eq!(basic_test_prob_fourier(&chi).unwrap(), 0.5 + 0.125);

        let unfolded = parity(2, &BitVector::ones(2).unwrap()).unwrap();
        assert!(matches!(basic_test_prob_exact(&unfolded, GUARD), Err(Error::NotFolded { .. })));
        assert!(matches!(basic_test_prob_fourier(&unfolded), Err(Error::NotFolded { .. })));
        assert_eq!(
            basic_test_prob_exact(&dictator(7, 1).unwrap(), GUARD),
            Err(Error::GuardExceeded { needed: 28, allowed: GUARD })
        );
    }

    #[test]
    fn basic_test_exact_matches_fourier() {
        for seed in 0..100 {
            let f = random_folded(3, seed).unwrap();
            let exact = basic_test_prob_exact(&f, GUARD).unwrap().value();
            let fourier = basic_test_prob_fourier(&f).unwrap();
            assert!((exact - fourier).abs() <= 1e-10, "seed {seed}: {exact} vs {fourier}");
        }
    }

    #[test]
    fn basic_test_mc_is_reproducible() {
        let f = random_folded(4, 3).unwrap();
        let a = basic_test_prob_mc(&f, 20_000, 5, 0.99).unwrap();
        assert_eq!(a, basic_test_prob_mc(&f, 20_000, 5, 0.99).unwrap());
        assert_eq!(a.total_queries, 80_000);
        let exact = basic_test_prob_exact(&f, GUARD).unwrap().value();
        assert!(a.ci_low <= exact && exact <= a.ci_high, "{a:?} vs {exact}");
    }

    #[test]
    fn htest_dictator_family_always_accepts() {
        let mut rng = seeded(2);
        for k in 2..=4 {
            let h = complete_hypergraph(k).unwrap();
            let fam = FunctionFamily::uniform(h.clone(), &dictator(5, 4).unwrap()).unwrap();
            let budget = query_budget(&h);
            for _ in 0..200 {
                let t = run_hypergraph_test(&fam, &mut rng);
                assert_eq!(t.verdict, Verdict::Accept);
                assert_eq!(t.pass1.len(), budget.pass1);
                assert_eq!(t.pass2.len(), budget.pass2);
                assert_eq!(t.total_queries as usize, budget.total);
            }
        }
    }

    #[test]
    fn htest_exact_examples() {
        let h = Hypergraph::new(2, vec![vec![1, 2]]).unwrap();
        for n in 1..=2 {
            for l in 1..=n {
                let fam = FunctionFamily::uniform(h.clone(), &dictator(n, l).unwrap()).unwrap();
                assert!(htest_prob_exact(&fam, GUARD).unwrap().is_one());
            }
        }
        // With f_1 negated, v_1·1⃗ + y_1 always has bit 1 set, so the pass-2
        // answer of f_1 carries the uniform sign (-1)^{z_1(1)}: p = 1/2.
        let d = dictator(2, 1).unwrap();
        let fam = FunctionFamily::new(h.clone(), vec![d.negate(), d.clone()], vec![d.clone()]).unwrap();
        let p = htest_prob_exact(&fam, GUARD).unwrap();
        assert!(p.value() < 1.0);
        assert_eq!(p.value(), 0.5);

        let chi1 = dictator(1, 1).unwrap();
        let fam = FunctionFamily::uniform(h, &chi1).unwrap();
        let exact = htest_prob_exact(&fam, GUARD).unwrap().value();
        let mc = htest_prob_mc(&fam, 50_000, 11, 0.99).unwrap();
        assert!((exact - mc.estimate).abs() <= 3.0 * mc.stderr.max(1e-12));
    }

    #[test]
    fn htest_exact_matches_mc_on_random_family() {
        let h = Hypergraph::new(2, vec![vec![1, 2]]).unwrap();
        let fs: Vec<_> = (0..3).map(|s| random_folded(3, 40 + s).unwrap()).collect();
        let fam = FunctionFamily::new(h, fs[..2].to_vec(), fs[2..].to_vec()).unwrap();
        let exact = htest_prob_exact(&fam, GUARD).unwrap().value();
        let mc = htest_prob_mc(&fam, 100_000, 3, 0.99).unwrap();
        assert!((exact - mc.estimate).abs() <= 4.0 * mc.stderr, "{exact} vs {mc:?}");
        assert!(htest_prob_exact(&fam, 20).is_err());
    }

    #[test]
    fn htest_mc_examples() {
        let h = complete_hypergraph(3).unwrap();
        let fam = FunctionFamily::uniform(h, &dictator(4, 2).unwrap()).unwrap();
        let est = htest_prob_mc(&fam, 1000, 0, 0.99).unwrap();
        assert_eq!((est.estimate, est.ci_high), (1.0, 1.0));
        assert_eq!(est.total_queries, 10_000);
        assert!(htest_prob_mc(&fam, 0, 0, 0.99).is_err());
    }

    #[test]
    fn pass_two_depends_on_pass_one_only_through_v() {
        // Two families driven by the same draws: wherever the pass-1 bits v_i
        // agree, the pass-2 query points agree too.
        let h = complete_hypergraph(3).unwrap();
        let fa = FunctionFamily::uniform(h.clone(), &random_folded(6, 9).unwrap()).unwrap();
        let fb = FunctionFamily::uniform(h.clone(), &random_folded(6, 10).unwrap()).unwrap();
        let mut compared = 0;
        for seed in 0..200 {
            let ta = run_hypergraph_test(&fa, &mut seeded(seed));
            let tb = run_hypergraph_test(&fb, &mut seeded(seed));
            assert_eq!(
                ta.pass1.iter().map(|q| q.point).collect::<Vec<_>>(),
                tb.pass1.iter().map(|q| q.point).collect::<Vec<_>>()
            );
            let same_v: Vec<bool> = ta.pass1.iter().zip(&tb.pass1).map(|(a, b)| a.answer == b.answer).collect();
            for i in 0..3 {
                if same_v[i] {
                    assert_eq!(ta.pass2[i].point, tb.pass2[i].point);
                    compared += 1;
                }
            }
            for (e, edge) in h.edges().iter().enumerate() {
                if edge.iter().all(|&v| same_v[v - 1]) {
                    assert_eq!(ta.pass2[3 + e].point, tb.pass2[3 + e].point);
                }
            }
        }
        assert!(compared > 100, "compared {compared}");
    }

    #[test]
    fn noise_operator_examples() {
        let n = 3;
        let zero = BitVector::zero(n).unwrap();
        for i in 1..=n {
            let g = noise_and_operator(&dictator(n, i).unwrap(), &zero, &zero).unwrap();
            let s = wht(&g);
            let ei = 1usize << (i - 1);
            for j in 0..1usize << (2 * n) {
                let expect = if j == ei || j == ei | ei << n { 0.25 } else { 0.0 };
                assert!((s.coeff(j).powi(2) - expect).abs() < 1e-15, "i={i} j={j}");
            }
        }
        let one = BooleanFunction::constant(n, 1).unwrap();
        let c = BitVector::new(n, 5).unwrap();
        let g = noise_and_operator(&one, &c, &zero).unwrap();
        assert!(g.table().iter().all(|&v| v == 1.0));
        assert!(noise_and_operator(&one, &BitVector::zero(2).unwrap(), &zero).is_err());
    }

    #[test]
    fn noise_spectrum_law_random() {
        let mut rng = seeded(77);
        for _ in 0..20 {
            let f = BooleanFunction::from_fn(3, |_| if rng.gen::<bool>() { 1 } else { -1 }).unwrap();
            let c = BitVector::new(3, rng.gen_range(0..8)).unwrap();
            let cp = BitVector::new(3, rng.gen_range(0..8)).unwrap();
            assert!(noise_spectrum_deviation(&f, &c, &cp).unwrap() <= 1e-10);
        }
    }
}
