//! Truth tables on the hypercube and the folding oracle.

use crate::bits::{check_dimension, ones_mask, BitVector};
use crate::error::{Error, Result};

/// Anything with a real-valued truth table on `{0,1}^n`.
pub trait CubeFunction {
    fn dimension(&self) -> usize;
    fn real_table(&self) -> Vec<f64>;
}

/// A `±1`-valued function on `{0,1}^n`, stored as a full truth table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    n: usize,
    table: Vec<i8>,
}

impl BooleanFunction {
    pub fn new(n: usize, table: Vec<i8>) -> Result<Self> {
        check_dimension(n)?;
        if table.len() != 1 << n {
            return Err(Error::InvalidTable(format!(
                "expected {} entries for n = {n}, got {}",
                1usize << n,
                table.len()
            )));
        }
        if let Some(j) = table.iter().position(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidTable(format!(
                "entry {j} is {}, not ±1",
                table[j]
            )));
        }
        Ok(Self { n, table })
    }

    /// Tabulates `f` at every index `0..2^n`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> i8) -> Result<Self> {
        check_dimension(n)?;
        let table = (0..1usize << n).map(&mut f).collect();
        Self::new(n, table)
    }

    pub fn constant(n: usize, value: i8) -> Result<Self> {
        Self::from_fn(n, |_| value)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn table(&self) -> &[i8] {
        &self.table
    }

    /// `f(x)` for the point with index `j`. Panics if `j >= 2^n`.
    #[inline]
    pub fn at(&self, j: usize) -> i8 {
        self.table[j]
    }

    pub fn evaluate(&self, x: &BitVector) -> Result<i8> {
        if x.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.n(),
            });
        }
        Ok(self.table[x.index()])
    }

    pub fn negate(&self) -> Self {
        Self {
            n: self.n,
            table: self.table.iter().map(|&v| -v).collect(),
        }
    }

    /// True iff `f(1⃗ + x) = -f(x)` for every `x`.
    pub fn is_folded(&self) -> bool {
        self.first_unfolded_index().is_none()
    }

    fn first_unfolded_index(&self) -> Option<usize> {
        let ones = ones_mask(self.n);
        (0..self.table.len()).find(|&j| self.table[j ^ ones] != -self.table[j])
    }

    /// Errors with [`Error::NotFolded`] unless the function is folded.
    pub fn ensure_folded(&self) -> Result<()> {
        match self.first_unfolded_index() {
            Some(index) => Err(Error::NotFolded { index }),
            None => Ok(()),
        }
    }

    /// The function a folded oracle actually exposes when wrapping `self`:
    /// values on `x_1 = 1` are kept, the other half is forced by negation.
    pub fn folded_extension(&self) -> Self {
        let ones = ones_mask(self.n);
        let table = (0..self.table.len())
            .map(|j| {
                if j & 1 == 1 {
                    self.table[j]
                } else {
                    -self.table[j ^ ones]
                }
            })
            .collect();
        Self { n: self.n, table }
    }

    /// The half-table read by a folded oracle: values at the points with
    /// `x_1 = 1`, in increasing index order.
    pub fn half_table(&self) -> Vec<i8> {
        self.table.iter().skip(1).step_by(2).copied().collect()
    }

    /// Number of `+1` entries minus number of `-1` entries.
    pub fn signed_sum(&self) -> i64 {
        self.table.iter().map(|&v| v as i64).sum()
    }

    pub fn to_real(&self) -> RealPointFunction {
        RealPointFunction {
            n: self.n,
            table: self.real_table(),
        }
    }

    /// Packs `b_j = (1 - f_j) / 2` LSB-first into lowercase hex; the first
    /// character holds bits 0..4.
    pub fn to_hex(&self) -> String {
        let digits = self.table.len().div_ceil(4);
        (0..digits)
            .map(|d| {
                let nibble = (0..4)
                    .filter(|&b| {
                        let j = 4 * d + b;
                        j < self.table.len() && self.table[j] == -1
                    })
                    .fold(0u32, |acc, b| acc | (1 << b));
                char::from_digit(nibble, 16).expect("nibble < 16")
            })
            .collect()
    }

    /// Inverse of [`BooleanFunction::to_hex`].
    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        check_dimension(n)?;
        let size = 1usize << n;
        let digits = size.div_ceil(4);
        if hex.len() != digits {
            return Err(Error::InvalidTable(format!(
                "hex table for n = {n} needs {digits} digits, got {}",
                hex.len()
            )));
        }
        let mut table = vec![1i8; size];
        for (d, ch) in hex.chars().enumerate() {
            let nibble = ch
                .to_digit(16)
                .filter(|_| !ch.is_ascii_uppercase())
                .ok_or_else(|| Error::InvalidTable(format!("bad hex digit {ch:?}")))?;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let j = 4 * d + b;
                    if j >= size {
                        return Err(Error::InvalidTable(format!(
                            "bit {j} set beyond the {size}-entry table"
                        )));
                    }
                    table[j] = -1;
                }
            }
        }
        Ok(Self { n, table })
    }
}

impl std::fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BooleanFunction(n={}, {})", self.n, self.to_hex())
    }
}

impl CubeFunction for BooleanFunction {
    fn dimension(&self) -> usize {
        self.n
    }

    fn real_table(&self) -> Vec<f64> {
        self.table.iter().map(|&v| v as f64).collect()
    }
}

/// Tolerance on the `[-1, 1]` range check of real-valued tables.
pub const RANGE_TOLERANCE: f64 = 1e-12;

/// A bounded real-valued function `{0,1}^n -> [-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPointFunction {
    n: usize,
    table: Vec<f64>,
}

impl RealPointFunction {
    pub fn new(n: usize, table: Vec<f64>) -> Result<Self> {
        check_dimension(n)?;
        if table.len() != 1 << n {
            return Err(Error::InvalidTable(format!(
                "expected {} entries for n = {n}, got {}",
                1usize << n,
                table.len()
            )));
        }
        if let Some(j) = table
            .iter()
            .position(|v| !v.is_finite() || v.abs() > 1.0 + RANGE_TOLERANCE)
        {
            return Err(Error::InvalidTable(format!(
                "entry {j} = {} is outside [-1, 1]",
                table[j]
            )));
        }
        Ok(Self { n, table })
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Result<Self> {
        check_dimension(n)?;
        Self::new(n, (0..1usize << n).map(f).collect())
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::from_fn(n, |_| value)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn table(&self) -> &[f64] {
        &self.table
    }

    #[inline]
    pub fn at(&self, j: usize) -> f64 {
        self.table[j]
    }

    pub fn evaluate(&self, x: &BitVector) -> Result<f64> {
        if x.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.n(),
            });
        }
        Ok(self.table[x.index()])
    }

    pub fn mean(&self) -> f64 {
        self.table.iter().sum::<f64>() / self.table.len() as f64
    }

    /// Multiplies every value by `c`; `|c|` must be at most 1.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.n, self.table.iter().map(|v| v * c).collect())
    }

    /// `x ↦ f(x + h)`.
    pub fn shifted(&self, h: usize) -> Self {
        Self {
            n: self.n,
            table: (0..self.table.len()).map(|j| self.table[j ^ h]).collect(),
        }
    }
}

impl CubeFunction for RealPointFunction {
    fn dimension(&self) -> usize {
        self.n
    }

    fn real_table(&self) -> Vec<f64> {
        self.table.clone()
    }
}

impl From<&BooleanFunction> for RealPointFunction {
    fn from(f: &BooleanFunction) -> Self {
        f.to_real()
    }
}

/// Oracle access to a boolean function under the folding convention.
///
/// A query at `x` with `x_1 = 1` reads `f(x)`; a query with `x_1 = 0` reads
/// `f(1⃗ + x)` and negates it. Only the half of the table with `x_1 = 1` is
/// ever touched, so the induced function `F` is folded whatever `f` is.
/// The counter is per-instance: use one oracle per worker.
#[derive(Debug, Clone)]
pub struct FoldedOracle<'a> {
    inner: &'a BooleanFunction,
    query_count: u64,
}

impl<'a> FoldedOracle<'a> {
    pub fn new(inner: &'a BooleanFunction) -> Self {
        Self {
            inner,
            query_count: 0,
        }
    }

    pub fn inner(&self) -> &'a BooleanFunction {
        self.inner
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn query_count(&self) -> u64 {
        self.query_count
    }

    pub fn fold_query(&mut self, x: &BitVector) -> Result<i8> {
        if x.n() != self.inner.n {
            return Err(Error::DimensionMismatch {
                expected: self.inner.n,
                found: x.n(),
            });
        }
        Ok(self.query_index(x.index()))
    }

    /// [`FoldedOracle::fold_query`] on a raw point index. Panics if the
    /// index is out of range.
    #[inline]
    pub fn query_index(&mut self, j: usize) -> i8 {
        self.query_count += 1;
        if j & 1 == 1 {
            self.inner.table[j]
        } else {
            -self.inner.table[j ^ ones_mask(self.inner.n)]
        }
    }
}

/// Extends a half-table (values at the points with `x_1 = 1`, in increasing
/// index order) to the unique folded function agreeing with it.
pub fn make_folded(n: usize, half_table: &[i8]) -> Result<BooleanFunction> {
    check_dimension(n)?;
    let half = 1usize << (n - 1);
    if half_table.len() != half {
        return Err(Error::InvalidTable(format!(
            "half table for n = {n} needs {half} entries, got {}",
            half_table.len()
        )));
    }
    if let Some(j) = half_table.iter().position(|&v| v != 1 && v != -1) {
        return Err(Error::InvalidTable(format!("half-table entry {j} is not ±1")));
    }
    let ones = ones_mask(n);
    let table = (0..1usize << n)
        .map(|j| {
            if j & 1 == 1 {
                half_table[j >> 1]
            } else {
                -half_table[(j ^ ones) >> 1]
            }
        })
        .collect();
    BooleanFunction::new(n, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{dictator, parity};
    use proptest::prelude::*;

    fn bv(coords: &[u8]) -> BitVector {
        BitVector::from_coords(coords).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let d1 = dictator(2, 1).unwrap();
        assert_eq!(d1.evaluate(&bv(&[1, 0])).unwrap(), -1);
        assert_eq!(d1.evaluate(&bv(&[0, 1])).unwrap(), 1);
        let p = parity(3, &BitVector::ones(3).unwrap()).unwrap();
        assert_eq!(p.evaluate(&bv(&[1, 1, 1])).unwrap(), -1);
        assert!(matches!(
            d1.evaluate(&bv(&[1, 0, 0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fold_query_examples() {
        let one = BooleanFunction::constant(3, 1).unwrap();
        let mut o = FoldedOracle::new(&one);
        assert_eq!(o.fold_query(&bv(&[1, 0, 1])).unwrap(), 1);
        assert_eq!(o.fold_query(&bv(&[0, 0, 1])).unwrap(), -1);
        assert_eq!(o.query_count(), 2);
        assert!(o.fold_query(&bv(&[0, 1])).is_err());

        let d2 = dictator(2, 2).unwrap();
        let mut o = FoldedOracle::new(&d2);
        assert_eq!(o.fold_query(&bv(&[0, 1])).unwrap(), -1);
        // The induced function is folded at every point.
        let induced: Vec<i8> = (0..4).map(|j| o.query_index(j)).collect();
        for j in 0..4 {
            assert_eq!(induced[j ^ 3], -induced[j]);
            assert_eq!(induced[j], d2.at(j));
        }
        assert_eq!(o.query_count(), 5);
    }

    #[test]
    fn make_folded_examples() {
        let f = make_folded(1, &[-1]).unwrap();
        assert_eq!(f.table(), &[1, -1]);
        assert_eq!(f, dictator(1, 1).unwrap());

        // Points (1,0) and (1,1) have indices 1 and 3.
        let f = make_folded(2, &[1, 1]).unwrap();
        assert_eq!(f.evaluate(&bv(&[1, 0])).unwrap(), 1);
        assert_eq!(f.evaluate(&bv(&[1, 1])).unwrap(), 1);
        assert_eq!(f.evaluate(&bv(&[0, 1])).unwrap(), -1);
        assert_eq!(f.evaluate(&bv(&[0, 0])).unwrap(), -1);

        assert!(make_folded(2, &[1]).is_err());
        assert!(make_folded(2, &[1, 0]).is_err());
        assert!(make_folded(0, &[]).is_err());
    }

    #[test]
    fn is_folded_examples() {
        for n in 1..=5 {
            for i in 1..=n {
                assert!(dictator(n, i).unwrap().is_folded());
            }
        }
        assert!(!BooleanFunction::constant(3, 1).unwrap().is_folded());
        let p12 = parity(2, &BitVector::ones(2).unwrap()).unwrap();
        assert!(!p12.is_folded());
        assert_eq!(p12.ensure_folded(), Err(Error::NotFolded { index: 0 }));
    }

    #[test]
    fn hex_format() {
        assert_eq!(dictator(1, 1).unwrap().to_hex(), "2");
        assert_eq!(dictator(3, 1).unwrap().to_hex(), "aa");
        assert_eq!(dictator(3, 3).unwrap().to_hex(), "0f");
        assert_eq!(BooleanFunction::from_hex(3, "0f").unwrap(), dictator(3, 3).unwrap());
        assert!(BooleanFunction::from_hex(1, "4").is_err());
        assert!(BooleanFunction::from_hex(3, "AA").is_err());
        assert!(BooleanFunction::from_hex(3, "a").is_err());
    }

    #[test]
    fn table_validation() {
        assert!(BooleanFunction::new(2, vec![1, 1, 1]).is_err());
        assert!(BooleanFunction::new(2, vec![1, 1, 0, 1]).is_err());
        assert!(RealPointFunction::new(1, vec![0.5, 1.5]).is_err());
        assert!(RealPointFunction::new(1, vec![0.5, 1.0 + 1e-13]).is_ok());
        assert!(RealPointFunction::new(1, vec![f64::NAN, 0.0]).is_err());
    }

    proptest! {
        #[test]
        fn make_folded_is_folded_and_balanced(n in 1usize..8, seed in any::<u64>()) {
            let half: Vec<i8> = (0..1usize << (n - 1))
                .map(|j| if (seed.rotate_left(j as u32 % 64) ^ j as u64) & 1 == 0 { 1 } else { -1 })
                .collect();
            let f = make_folded(n, &half).unwrap();
            prop_assert!(f.is_folded());
            prop_assert_eq!(f.signed_sum(), 0);
            prop_assert_eq!(f.half_table(), half);
        }

        #[test]
        fn oracle_counts_and_folds(n in 1usize..7, raw in proptest::collection::vec(any::<bool>(), 64)) {
            let f = BooleanFunction::from_fn(n, |j| if raw[j % 64] { 1 } else { -1 }).unwrap();
            let mut o = FoldedOracle::new(&f);
            let ones = ones_mask(n);
            for j in 0..1usize << n {
                let before = o.query_count();
                let a = o.query_index(j);
                let b = o.query_index(j ^ ones);
                prop_assert_eq!(o.query_count(), before + 2);
                prop_assert_eq!(a, -b);
            }
            prop_assert_eq!(f.folded_extension().is_folded(), true);
        }

        #[test]
        fn hex_round_trips(n in 1usize..9, raw in proptest::collection::vec(any::<bool>(), 256)) {
            let f = BooleanFunction::from_fn(n, |j| if raw[j] { 1 } else { -1 }).unwrap();
            prop_assert_eq!(BooleanFunction::from_hex(n, &f.to_hex()).unwrap(), f);
        }
    }
}
