//! Generators for the functions used in experiments, and the textual
//! function-spec language used by family files and the CLI.
//!
//! | spec                       | function                                   |
//! |----------------------------|--------------------------------------------|
//! | `dict:<i>`                 | dictator `(-1)^{x_i}`                      |
//! | `parity:<hex-mask>`        | character `χ_α`, `α` given as a hex index  |
//! | `table:<hex>`              | explicit truth table (see `to_hex`)        |
//! | `random:<seed>`            | uniformly random folded function           |
//! | `noisydict:<i>:<rho>:<seed>` | dictator with noisy half-table           |
//! | `maj`                      | majority (odd `n`)                         |
//!
//! A leading `-` negates the function, e.g. `-dict:2`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::bits::{check_dimension, ones_mask, BitVector};
use crate::error::{Error, Result};
use crate::function::{make_folded, BooleanFunction};
use crate::rng::seeded;

fn check_coordinate(n: usize, i: usize) -> Result<()> {
    if i == 0 || i > n {
        Err(Error::CoordinateOutOfRange { coordinate: i, n })
    } else {
        Ok(())
    }
}

#[inline]
fn sign_of_parity(bits: usize) -> i8 {
    if bits.count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The `i`-th dictator `f(x) = (-1)^{x_i}`.
pub fn dictator(n: usize, i: usize) -> Result<BooleanFunction> {
    check_dimension(n)?;
    check_coordinate(n, i)?;
    BooleanFunction::from_fn(n, |j| sign_of_parity(j & (1 << (i - 1))))
}

/// The character `χ_α(x) = (-1)^{Σ_{i∈α} x_i}`. Folded iff `|α|` is odd.
pub fn parity(n: usize, alpha: &BitVector) -> Result<BooleanFunction> {
    check_dimension(n)?;
    if alpha.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: alpha.n(),
        });
    }
    let mask = alpha.index();
    BooleanFunction::from_fn(n, |j| sign_of_parity(j & mask))
}

/// Uniform over the `2^{2^{n-1}}` folded functions on `n` variables.
pub fn random_folded(n: usize, seed: u64) -> Result<BooleanFunction> {
    check_dimension(n)?;
    let mut rng = seeded(seed);
    let half: Vec<i8> = (0..1usize << (n - 1))
        .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
        .collect();
    make_folded(n, &half)
}

/// The `i`-th dictator with each half-table sign flipped independently with
/// probability `rho`, then re-folded.
pub fn noisy_dictator(n: usize, i: usize, rho: f64, seed: u64) -> Result<BooleanFunction> {
    if !(0.0..=0.5).contains(&rho) {
        return Err(Error::InvalidArgument(format!(
            "noise rate {rho} outside [0, 1/2]"
        )));
    }
    let mut half = dictator(n, i)?.half_table();
    let mut rng = seeded(seed);
    for v in &mut half {
        if rng.gen_bool(rho) {
            *v = -*v;
        }
    }
    make_folded(n, &half)
}

/// `f(x) = inner(x_{coords[0]}, ..., x_{coords[m-1]})`.
pub fn junta(n: usize, coords: &[usize], inner: &BooleanFunction) -> Result<BooleanFunction> {
    check_dimension(n)?;
    if inner.n() != coords.len() {
        return Err(Error::DimensionMismatch {
            expected: coords.len(),
            found: inner.n(),
        });
    }
    let mut seen = 0usize;
    for &c in coords {
        check_coordinate(n, c)?;
        if seen & (1 << (c - 1)) != 0 {
            return Err(Error::InvalidArgument(format!(
                "junta coordinate {c} repeated"
            )));
        }
        seen |= 1 << (c - 1);
    }
    BooleanFunction::from_fn(n, |j| {
        let restricted = coords
            .iter()
            .enumerate()
            .fold(0usize, |acc, (k, &c)| acc | ((j >> (c - 1)) & 1) << k);
        inner.at(restricted)
    })
}

/// Majority on an odd number of variables: `+1` iff fewer than half the
/// bits are 1.
pub fn majority(n: usize) -> Result<BooleanFunction> {
    check_dimension(n)?;
    if n % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "majority needs odd n, got {n}"
        )));
    }
    BooleanFunction::from_fn(n, |j| {
        if 2 * (j.count_ones() as usize) < n {
            1
        } else {
            -1
        }
    })
}

/// A parsed function spec, independent of dimension until built.
#[derive(Clone, Debug, PartialEq)]
pub enum FnSpec {
    Dictator(usize),
    Parity(usize),
    Table(String),
    Random(u64),
    NoisyDictator { coordinate: usize, rho: f64, seed: u64 },
    Majority,
    Negated(Box<FnSpec>),
}

impl FnSpec {
    pub fn build(&self, n: usize) -> Result<BooleanFunction> {
        match self {
            FnSpec::Dictator(i) => dictator(n, *i),
            FnSpec::Parity(mask) => {
                check_dimension(n)?;
                if *mask > ones_mask(n) {
                    return Err(Error::InvalidArgument(format!(
                        "parity mask {mask:x} does not fit in {n} bits"
                    )));
                }
                parity(n, &BitVector::new(n, *mask)?)
            }
            FnSpec::Table(hex) => BooleanFunction::from_hex(n, hex),
            FnSpec::Random(seed) => random_folded(n, *seed),
            FnSpec::NoisyDictator {
                coordinate,
                rho,
                seed,
            } => noisy_dictator(n, *coordinate, *rho, *seed),
            FnSpec::Majority => majority(n),
            FnSpec::Negated(inner) => Ok(inner.build(n)?.negate()),
        }
    }
}

fn parse_field<T: FromStr>(what: &str, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse(format!("invalid {what} {s:?}")))
}

impl FromStr for FnSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('-') {
            return Ok(FnSpec::Negated(Box::new(rest.parse()?)));
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["dict", i] => Ok(FnSpec::Dictator(parse_field("coordinate", i)?)),
            ["parity", mask] => usize::from_str_radix(mask, 16)
                .map(FnSpec::Parity)
                .map_err(|_| Error::Parse(format!("invalid parity mask {mask:?}"))),
            ["table", hex] => Ok(FnSpec::Table(hex.to_string())),
            ["random", seed] => Ok(FnSpec::Random(parse_field("seed", seed)?)),
            ["noisydict", i, rho, seed] => Ok(FnSpec::NoisyDictator {
                coordinate: parse_field("coordinate", i)?,
                rho: parse_field("noise rate", rho)?,
                seed: parse_field("seed", seed)?,
            }),
            ["maj"] => Ok(FnSpec::Majority),
            _ => Err(Error::Parse(format!("unrecognized function spec {s:?}"))),
        }
    }
}

impl fmt::Display for FnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FnSpec::Dictator(i) => write!(f, "dict:{i}"),
            FnSpec::Parity(mask) => write!(f, "parity:{mask:x}"),
            FnSpec::Table(hex) => write!(f, "table:{hex}"),
            FnSpec::Random(seed) => write!(f, "random:{seed}"),
            FnSpec::NoisyDictator {
                coordinate,
                rho,
                seed,
            } => write!(f, "noisydict:{coordinate}:{rho}:{seed}"),
            FnSpec::Majority => write!(f, "maj"),
            FnSpec::Negated(inner) => write!(f, "-{inner}"),
        }
    }
}

/// Parses and builds a function spec in one step.
pub fn parse_function(spec: &str, n: usize) -> Result<BooleanFunction> {
    spec.parse::<FnSpec>()?.build(n)
}
