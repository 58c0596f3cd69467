//! Gowers uniformity norms and (linear) Gowers inner products.
//!
//! Exact values come from plain enumeration of all random choices when the
//! number of random bits fits the guard. Past the guard the inner products
//! fall back to a seeded Monte Carlo estimate with a standard error.

use rand::Rng;
use rayon::prelude::*;

use crate::bits::ones_mask;
use crate::error::{Error, Result};
use crate::fourier::{low_degree_influence, wht};
use crate::function::RealPointFunction;
use crate::rng::trial_rng;
use crate::DEFAULT_GUARD_BITS;

/// Tolerance for clamping a slightly negative `||f||_{U_d}^{2^d}`.
pub const NEGATIVE_CLAMP: f64 = 1e-12;

/// A family `{f_S}` indexed by the subsets `S ⊆ [d]` (bitmasks over `d`).
#[derive(Clone, Debug)]
pub struct IndexedFamily {
    d: usize,
    n: usize,
    members: Vec<RealPointFunction>,
    defaulted: Vec<bool>,
}

impl IndexedFamily {
    /// A family with every member the constant-1 function, all flagged as
    /// defaulted until set.
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d == 0 || d > 8 {
            return Err(Error::InvalidArgument(format!("d = {d} outside 1..=8")));
        }
        let one = RealPointFunction::constant(n, 1.0)?;
        Ok(Self {
            d,
            n,
            members: vec![one; 1 << d],
            defaulted: vec![true; 1 << d],
        })
    }

    /// Every member equal to `f`.
    pub fn uniform(d: usize, f: &RealPointFunction) -> Result<Self> {
        let mut fam = Self::new(d, f.n())?;
        for s in 0..1 << d {
            fam.set(s, f.clone())?;
        }
        Ok(fam)
    }

    pub fn set(&mut self, subset: usize, f: RealPointFunction) -> Result<()> {
        if subset >= self.members.len() {
            return Err(Error::InvalidArgument(format!(
                "subset mask {subset:b} is not a subset of [{}]",
                self.d
            )));
        }
        if f.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: f.n(),
            });
        }
        self.members[subset] = f;
        self.defaulted[subset] = false;
        Ok(())
    }

    pub fn with(mut self, subset: usize, f: RealPointFunction) -> Result<Self> {
        self.set(subset, f)?;
        Ok(self)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn member(&self, subset: usize) -> &RealPointFunction {
        &self.members[subset]
    }

    /// True if member `subset` was never set and stands in as constant 1.
    pub fn is_defaulted(&self, subset: usize) -> bool {
        self.defaulted[subset]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateMethod {
    Exact,
    MonteCarlo,
}

impl EstimateMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimateMethod::Exact => "exact",
            EstimateMethod::MonteCarlo => "mc",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Zero for exact values.
    pub stderr: f64,
    pub method: EstimateMethod,
    /// Number of random samples (or enumerated points for exact values).
    pub samples: u64,
}

/// How an inner product is evaluated.
#[derive(Clone, Copy, Debug)]
pub struct GowersOptions {
    /// Enumerate exactly while the random bits fit in this many bits.
    pub guard_bits: u32,
    /// Monte Carlo samples past the guard.
    pub trials: u64,
    pub seed: u64,
}

impl Default for GowersOptions {
    fn default() -> Self {
        Self {
            guard_bits: DEFAULT_GUARD_BITS,
            trials: 100_000,
            seed: 0,
        }
    }
}

fn check_guard(needed: usize, allowed: u32) -> Result<()> {
    if needed > allowed as usize {
        Err(Error::GuardExceeded {
            needed: needed as u32,
            allowed,
        })
    } else {
        Ok(())
    }
}

fn clamp_power(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -NEGATIVE_CLAMP {
        Ok(0.0)
    } else {
        Err(Error::Numerical(format!(
            "Gowers norm power {v} is negative beyond tolerance"
        )))
    }
}

/// Random bits consumed by the recursive evaluation of `||f||_{U_d}`.
pub fn gowers_norm_cost_bits(n: usize, d: usize) -> usize {
    n * d.saturating_sub(1).max(1)
}

/// `||f||_{U_d}^{2^d}`, via
/// `||g||_{U_d}^{2^d} = E_h ||g · g(·+h)||_{U_{d-1}}^{2^{d-1}}` down to
/// `||g||_{U_2}^4 = Σ_α ĝ(α)^4` and `||g||_{U_1}^2 = (E g)^2`.
pub fn gowers_norm_power(f: &RealPointFunction, d: usize, guard_bits: u32) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidArgument("Gowers norm needs d >= 1".into()));
    }
    check_guard(gowers_norm_cost_bits(f.n(), d), guard_bits)?;
    clamp_power(norm_power_recursive(f.table(), d))
}

fn norm_power_recursive(table: &[f64], d: usize) -> f64 {
    match d {
        1 => {
            let mean = table.iter().sum::<f64>() / table.len() as f64;
            mean * mean
        }
        2 => {
            let mut coeffs = table.to_vec();
            crate::fourier::fwht_in_place(&mut coeffs);
            let scale = table.len() as f64;
            coeffs.iter().map(|c| (c / scale).powi(4)).sum()
        }
        _ => {
            let size = table.len();
            // Per-shift terms collected in order, then summed sequentially.
            let terms: Vec<f64> = (0..size)
                .into_par_iter()
                .map(|h| {
                    let derivative: Vec<f64> = (0..size).map(|x| table[x] * table[x ^ h]).collect();
                    norm_power_recursive(&derivative, d - 1)
                })
                .collect();
            terms.iter().sum::<f64>() / size as f64
        }
    }
}

/// `||f||_{U_d}`.
pub fn gowers_norm(f: &RealPointFunction, d: usize, guard_bits: u32) -> Result<f64> {
    let power = gowers_norm_power(f, d, guard_bits)?;
    Ok(power.powf(1.0 / (1u64 << d) as f64))
}

/// Fills `offsets[S] = Σ_{i∈S} xs[i]` for every subset `S`.
#[inline]
fn subset_offsets(xs: &[usize], offsets: &mut [usize]) {
    offsets[0] = 0;
    for s in 1..offsets.len() {
        let low = s.trailing_zeros() as usize;
        offsets[s] = offsets[s & (s - 1)] ^ xs[low];
    }
}

#[inline]
fn product_at(fam: &IndexedFamily, base: usize, offsets: &[usize]) -> f64 {
    fam.members
        .iter()
        .zip(offsets)
        .map(|(f, &o)| f.at(base ^ o))
        .product()
}

/// Splits a `d·n`-bit counter into `d` points of `n` bits.
#[inline]
fn unpack_points(counter: usize, n: usize, xs: &mut [usize]) {
    let mask = ones_mask(n);
    for (i, x) in xs.iter_mut().enumerate() {
        *x = (counter >> (i * n)) & mask;
    }
}

/// Mean of `term(t)` over `t in 0..count`, summed in fixed-size blocks so
/// the result does not depend on the thread pool.
fn deterministic_mean_and_var(count: u64, term: impl Fn(u64) -> f64 + Sync) -> (f64, f64) {
    const BLOCK: u64 = 4096;
    let blocks = count.div_ceil(BLOCK);
    let partial: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let end = ((b + 1) * BLOCK).min(count);
            (b * BLOCK..end).fold((0.0, 0.0), |(s, s2), t| {
                let v = term(t);
                (s + v, s2 + v * v)
            })
        })
        .collect();
    let (sum, sum_sq) = partial
        .iter()
        .fold((0.0, 0.0), |(a, b), &(s, s2)| (a + s, b + s2));
    let mean = sum / count as f64;
    (mean, (sum_sq / count as f64 - mean * mean).max(0.0))
}

/// `E_{x, x_1..x_d} Π_S f_S(x + Σ_{i∈S} x_i)` by enumeration.
pub fn gowers_inner_product_exact(fam: &IndexedFamily, guard_bits: u32) -> Result<Estimate> {
    let (n, d) = (fam.n, fam.d);
    check_guard((d + 1) * n, guard_bits)?;
    let outer = 1u64 << (d * n);
    let (value, _) = deterministic_mean_and_var(outer, |counter| {
        let mut xs = vec![0usize; d];
        let mut offsets = vec![0usize; 1 << d];
        unpack_points(counter as usize, n, &mut xs);
        subset_offsets(&xs, &mut offsets);
        let total: f64 = (0..1usize << n)
            .map(|x| product_at(fam, x, &offsets))
            .sum();
        total / (1u64 << n) as f64
    });
    Ok(Estimate {
        value,
        stderr: 0.0,
        method: EstimateMethod::Exact,
        samples: 1 << ((d + 1) * n),
    })
}

/// Monte Carlo estimate of the Gowers inner product.
pub fn gowers_inner_product_mc(fam: &IndexedFamily, trials: u64, seed: u64) -> Result<Estimate> {
    sample_estimate(fam, trials, seed, true)
}

fn sample_estimate(fam: &IndexedFamily, trials: u64, seed: u64, with_base: bool) -> Result<Estimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let (n, d) = (fam.n, fam.d);
    let (mean, var) = deterministic_mean_and_var(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let mask = ones_mask(n);
        let base = if with_base { rng.gen::<u64>() as usize & mask } else { 0 };
        let xs: Vec<usize> = (0..d).map(|_| rng.gen::<u64>() as usize & mask).collect();
        let mut offsets = vec![0usize; 1 << d];
        subset_offsets(&xs, &mut offsets);
        product_at(fam, base, &offsets)
    });
    Ok(Estimate {
        value: mean,
        stderr: (var / trials as f64).sqrt(),
        method: EstimateMethod::MonteCarlo,
        samples: trials,
    })
}

/// Gowers inner product: exact when `(d+1)·n` fits the guard, else Monte Carlo.
pub fn gowers_inner_product(fam: &IndexedFamily, opts: &GowersOptions) -> Result<Estimate> {
    if (fam.d + 1) * fam.n <= opts.guard_bits as usize {
        gowers_inner_product_exact(fam, opts.guard_bits)
    } else {
        gowers_inner_product_mc(fam, opts.trials, opts.seed)
    }
}

/// `E_{x_1..x_d} Π_S f_S(Σ_{i∈S} x_i)` by enumeration; `f_∅` is read at `0⃗`.
pub fn linear_gowers_inner_product_exact(fam: &IndexedFamily, guard_bits: u32) -> Result<Estimate> {
    let (n, d) = (fam.n, fam.d);
    check_guard(d * n, guard_bits)?;
    let (value, _) = deterministic_mean_and_var(1u64 << (d * n), |counter| {
        let mut xs = vec![0usize; d];
        let mut offsets = vec![0usize; 1 << d];
        unpack_points(counter as usize, n, &mut xs);
        subset_offsets(&xs, &mut offsets);
        product_at(fam, 0, &offsets)
    });
    Ok(Estimate {
        value,
        stderr: 0.0,
        method: EstimateMethod::Exact,
        samples: 1 << (d * n),
    })
}

pub fn linear_gowers_inner_product_mc(fam: &IndexedFamily, trials: u64, seed: u64) -> Result<Estimate> {
    sample_estimate(fam, trials, seed, false)
}

/// Linear Gowers inner product: exact when `d·n` fits the guard, else Monte Carlo.
pub fn linear_gowers_inner_product(fam: &IndexedFamily, opts: &GowersOptions) -> Result<Estimate> {
    if fam.d * fam.n <= opts.guard_bits as usize {
        linear_gowers_inner_product_exact(fam, opts.guard_bits)
    } else {
        linear_gowers_inner_product_mc(fam, opts.trials, opts.seed)
    }
}

/// Two members sharing an influential coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InfluentialPair {
    pub s: usize,
    pub t: usize,
    /// 1-based coordinate.
    pub coordinate: usize,
    pub influence_s: f64,
    pub influence_t: f64,
}

/// Searches for `S ≠ T` and `i` with `I_i^{≤w}(f_S) ≥ τ` and
/// `I_i^{≤w}(f_T) ≥ τ`, returning the triple maximizing the smaller of the
/// two influences. Pass `w = n` for plain influences. Ties go to the first
/// triple in `(S, T, i)` order.
pub fn find_influential_pair(fam: &IndexedFamily, w: usize, tau: f64) -> Option<InfluentialPair> {
    let w = w.min(fam.n);
    let table: Vec<Vec<f64>> = fam
        .members
        .iter()
        .map(|f| {
            let s = wht(f);
            (1..=fam.n)
                .map(|i| low_degree_influence(&s, i, w).expect("coordinate and degree in range"))
                .collect()
        })
        .collect();
    let mut best: Option<InfluentialPair> = None;
    for s in 0..table.len() {
        for t in s + 1..table.len() {
            for i in 0..fam.n {
                let (a, b) = (table[s][i], table[t][i]);
                if a < tau || b < tau {
                    continue;
                }
                if best.map_or(true, |p| a.min(b) > p.influence_s.min(p.influence_t)) {
                    best = Some(InfluentialPair {
                        s,
                        t,
                        coordinate: i + 1,
                        influence_s: a,
                        influence_t: b,
                    });
                }
            }
        }
    }
    best
}
