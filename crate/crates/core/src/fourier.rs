//! Fourier analysis on the hypercube.
//!
//! Coefficients use the averaging normalization
//! `f̂(α) = E_x f(x) χ_α(x)` with `χ_α(x) = (-1)^{⟨α, x⟩}`, so Parseval reads
//! `Σ_α f̂(α)² = E_x f(x)²`. The butterfly works on unnormalized sums and
//! divides by `2^n` once at the end.

use std::io;

use crate::bits::check_dimension;
use crate::error::{Error, Result};
use crate::function::{BooleanFunction, CubeFunction, RealPointFunction};

/// The `2^n` Fourier coefficients of a real function on `{0,1}^n`, indexed by
/// the characteristic vector of `α`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    n: usize,
    coeffs: Vec<f64>,
}

impl Spectrum {
    pub fn new(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_dimension(n)?;
        if coeffs.len() != 1 << n {
            return Err(Error::InvalidArgument(format!(
                "spectrum for n = {n} needs {} coefficients, got {}",
                1usize << n,
                coeffs.len()
            )));
        }
        Ok(Self { n, coeffs })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeff(&self, alpha: usize) -> f64 {
        self.coeffs[alpha]
    }

    /// `Σ_α f̂(α)²`.
    pub fn squared_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Writes `alpha_hex,weight,coeff` rows. `alpha_hex` is the index of `α`
    /// in hex.
    pub fn write_csv<W: io::Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "alpha_hex,weight,coeff")?;
        for (alpha, c) in self.coeffs.iter().enumerate() {
            writeln!(out, "{alpha:x},{},{c:?}", alpha.count_ones())?;
        }
        Ok(())
    }
}

/// In-place unnormalized Walsh–Hadamard butterfly.
pub fn fwht_in_place<T>(xs: &mut [T])
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    assert!(xs.len().is_power_of_two(), "length must be a power of two");
    let mut h = 1;
    while h < xs.len() {
        for block in xs.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *b);
                *a = u + v;
                *b = u - v;
            }
        }
        h *= 2;
    }
}

/// Fourier transform of any cube function.
pub fn wht(f: &impl CubeFunction) -> Spectrum {
    let n = f.dimension();
    let mut coeffs = f.real_table();
    fwht_in_place(&mut coeffs);
    let scale = (1u64 << n) as f64;
    for c in &mut coeffs {
        *c /= scale;
    }
    Spectrum { n, coeffs }
}

/// Unnormalized integer transform of a boolean function: entry `α` equals
/// `2^n f̂(α)` exactly.
pub fn wht_integer(f: &BooleanFunction) -> Vec<i64> {
    let mut coeffs: Vec<i64> = f.table().iter().map(|&v| v as i64).collect();
    fwht_in_place(&mut coeffs);
    coeffs
}

/// Fourier inversion: `f(x) = Σ_α f̂(α) χ_α(x)`.
pub fn inverse_wht(s: &Spectrum) -> Result<RealPointFunction> {
    let mut table = s.coeffs.clone();
    fwht_in_place(&mut table);
    RealPointFunction::new(s.n, table)
}

fn check_coordinate(n: usize, i: usize) -> Result<()> {
    if i == 0 || i > n {
        Err(Error::CoordinateOutOfRange { coordinate: i, n })
    } else {
        Ok(())
    }
}

/// `I_i(f) = Σ_{α ∋ i} f̂(α)²`.
pub fn influence(s: &Spectrum, i: usize) -> Result<f64> {
    low_degree_influence(s, i, s.n)
}

/// `I_i^{≤w}(f) = Σ_{α ∋ i, |α| ≤ w} f̂(α)²`.
pub fn low_degree_influence(s: &Spectrum, i: usize, w: usize) -> Result<f64> {
    check_coordinate(s.n, i)?;
    if w > s.n {
        return Err(Error::InvalidArgument(format!(
            "degree bound {w} exceeds n = {}",
            s.n
        )));
    }
    let bit = 1usize << (i - 1);
    Ok(s.coeffs
        .iter()
        .enumerate()
        .filter(|&(alpha, _)| alpha & bit != 0 && alpha.count_ones() as usize <= w)
        .map(|(_, c)| c * c)
        .sum())
}

/// All `n` influences at once.
pub fn influences(s: &Spectrum) -> Vec<f64> {
    (1..=s.n)
        .map(|i| influence(s, i).expect("coordinate in range"))
        .collect()
}

/// Number of points `x` with `f(x) ≠ f(x + e_i)`.
pub fn flip_count(f: &BooleanFunction, i: usize) -> Result<u64> {
    check_coordinate(f.n(), i)?;
    let bit = 1usize << (i - 1);
    Ok((0..f.table().len())
        .filter(|&j| f.at(j) != f.at(j ^ bit))
        .count() as u64)
}

/// `Pr_x[f(x) ≠ f(x + e_i)]`.
pub fn influence_combinatorial(f: &BooleanFunction, i: usize) -> Result<f64> {
    Ok(flip_count(f, i)? as f64 / f.table().len() as f64)
}

/// `4^n · I_i(f)` computed exactly from the integer transform. Equals
/// `2^n · flip_count(f, i)` for every boolean `f`.
pub fn spectral_influence_scaled(f: &BooleanFunction, i: usize) -> Result<u128> {
    check_coordinate(f.n(), i)?;
    let bit = 1usize << (i - 1);
    Ok(wht_integer(f)
        .iter()
        .enumerate()
        .filter(|&(alpha, _)| alpha & bit != 0)
        .map(|(_, &c)| (c as i128 * c as i128) as u128)
        .sum())
}

/// Zeta transform over subsets: `out[α] = Σ_{β ⊆ α} coeffs[β]`.
pub fn subset_zeta(s: &Spectrum) -> Vec<f64> {
    let mut out = s.coeffs.clone();
    subset_sums_in_place(&mut out);
    out
}

/// In-place sum over subsets, `O(n 2^n)`.
pub fn subset_sums_in_place(xs: &mut [f64]) {
    assert!(xs.len().is_power_of_two(), "length must be a power of two");
    let mut h = 1;
    while h < xs.len() {
        for block in xs.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter().zip(hi.iter_mut()) {
                *b += *a;
            }
        }
        h *= 2;
    }
}

/// Pointwise product of a nonempty list of functions on the same cube.
pub fn product_function(fs: &[RealPointFunction]) -> Result<RealPointFunction> {
    let (first, rest) = fs
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("product of an empty list".into()))?;
    let mut table = first.table().to_vec();
    for f in rest {
        if f.n() != first.n() {
            return Err(Error::DimensionMismatch {
                expected: first.n(),
                found: f.n(),
            });
        }
        for (t, v) in table.iter_mut().zip(f.table()) {
            *t *= v;
        }
    }
    RealPointFunction::new(first.n(), table)
}
