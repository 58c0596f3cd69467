//! Points of the hypercube `{0,1}^n`.
//!
//! A point is stored as an unsigned index: coordinate `i` (1-based) lives at
//! bit `i - 1`, so `x_1` is the least-significant bit. Vector addition is XOR
//! and `∧` is bitwise AND. Every truth table in the crate is indexed this way.

use std::fmt;

use crate::error::{Error, Result};
use crate::MAX_DIMENSION;

/// Mask with the low `n` bits set (the all-ones vector of dimension `n`).
#[inline]
pub fn ones_mask(n: usize) -> usize {
    debug_assert!(n < usize::BITS as usize);
    (1usize << n) - 1
}

/// Checks `1 <= n <= MAX_DIMENSION`.
pub fn check_dimension(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIMENSION {
        Err(Error::UnsupportedDimension(n))
    } else {
        Ok(())
    }
}

/// An element of `{0,1}^n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitVector {
    n: usize,
    bits: usize,
}

impl BitVector {
    pub fn new(n: usize, bits: usize) -> Result<Self> {
        check_dimension(n)?;
        if bits > ones_mask(n) {
            return Err(Error::InvalidArgument(format!(
                "index {bits} does not fit in {n} bits"
            )));
        }
        Ok(Self { n, bits })
    }

    /// Builds a point from its coordinates `x_1, ..., x_n`.
    pub fn from_coords(coords: &[u8]) -> Result<Self> {
        check_dimension(coords.len())?;
        let mut bits = 0;
        for (pos, &c) in coords.iter().enumerate() {
            match c {
                0 => {}
                1 => bits |= 1 << pos,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "coordinate value {other} is not a bit"
                    )))
                }
            }
        }
        Ok(Self {
            n: coords.len(),
            bits,
        })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    pub fn ones(n: usize) -> Result<Self> {
        check_dimension(n)?;
        Ok(Self {
            n,
            bits: ones_mask(n),
        })
    }

    /// The unit vector `e_i`, 1-based.
    pub fn unit(n: usize, i: usize) -> Result<Self> {
        check_dimension(n)?;
        if i == 0 || i > n {
            return Err(Error::CoordinateOutOfRange { coordinate: i, n });
        }
        Ok(Self {
            n,
            bits: 1 << (i - 1),
        })
    }

    /// Builds the indicator vector of a set of 1-based coordinates.
    pub fn from_set(n: usize, coords: &[usize]) -> Result<Self> {
        let mut v = Self::zero(n)?;
        for &i in coords {
            v = v.xor(&Self::unit(n, i)?);
        }
        Ok(v)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.bits
    }

    /// Hamming weight `|v|`.
    #[inline]
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Coordinate `x_i`, 1-based. Panics if `i` is out of range.
    #[inline]
    pub fn coord(&self, i: usize) -> u8 {
        assert!(i >= 1 && i <= self.n, "coordinate {i} out of range");
        ((self.bits >> (i - 1)) & 1) as u8
    }

    #[inline]
    pub fn xor(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        Self {
            n: self.n,
            bits: self.bits ^ other.bits,
        }
    }

    #[inline]
    pub fn and(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        Self {
            n: self.n,
            bits: self.bits & other.bits,
        }
    }

    /// `1⃗ + v`.
    #[inline]
    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            bits: self.bits ^ ones_mask(self.n),
        }
    }

    /// True iff this vector, read as a subset of `[n]`, is contained in `other`.
    #[inline]
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.bits & !other.bits == 0
    }

    /// Coordinates set to 1, ascending, 1-based.
    pub fn support(&self) -> Vec<usize> {
        (1..=self.n).filter(|&i| self.coord(i) == 1).collect()
    }

    pub fn coords(&self) -> Vec<u8> {
        (1..=self.n).map(|i| self.coord(i)).collect()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector(")?;
        for i in 1..=self.n {
            write!(f, "{}", self.coord(i))?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn coordinate_one_is_lsb() {
        let v = BitVector::from_coords(&[1, 0, 0]).unwrap();
        assert_eq!(v.index(), 1);
        let v = BitVector::from_coords(&[0, 1, 1]).unwrap();
        assert_eq!(v.index(), 0b110);
        assert_eq!(v.weight(), 2);
        assert_eq!(v.support(), vec![2, 3]);
    }

    #[test]
    fn complement_is_xor_with_ones() {
        let v = BitVector::from_coords(&[1, 0, 1, 1]).unwrap();
        assert_eq!(v.complement().coords(), vec![0, 1, 0, 0]);
        assert_eq!(v.xor(&BitVector::ones(4).unwrap()), v.complement());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(BitVector::new(0, 0), Err(Error::UnsupportedDimension(0)));
        assert!(BitVector::new(2, 4).is_err());
        assert!(BitVector::unit(3, 4).is_err());
        assert!(BitVector::unit(3, 0).is_err());
        assert!(BitVector::from_coords(&[0, 2]).is_err());
    }

    proptest! {
        #[test]
        fn index_round_trips(n in 1usize..12, raw in any::<usize>()) {
            let j = raw & ones_mask(n);
            let v = BitVector::new(n, j).unwrap();
            prop_assert_eq!(v.index(), j);
            prop_assert_eq!(BitVector::from_coords(&v.coords()).unwrap(), v);
            prop_assert_eq!(v.weight() as usize, v.coords().iter().filter(|&&c| c == 1).count());
        }
    }
}
