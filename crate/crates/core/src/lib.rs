//! Adaptive dictatorship tests for boolean functions on the hypercube, with
//! the Fourier and Gowers machinery used to analyse them.
//!
//! Functions are explicit truth tables over `{0,1}^n`, indexed so that
//! coordinate `x_i` is bit `i - 1` of the point index. Test oracles are
//! accessed through [`FoldedOracle`], which enforces `f(1⃗ + x) = -f(x)`.
//!
//! * [`fourier`]: Walsh–Hadamard transform, influences, subset zeta transform.
//! * [`gowers`]: uniformity norms, Gowers and linear Gowers inner products.
//! * [`testers`]: the Basic Test and the hypergraph H-Test, each with a
//!   sampler and an exact enumerator.
//! * [`families`]: dictators, parities, random folded functions and the
//!   textual function-spec language.

pub mod bits;
pub mod error;
pub mod families;
pub mod family_file;
pub mod fourier;
pub mod function;
pub mod gowers;
pub mod rng;
pub mod stats;
pub mod testers;

pub use bits::BitVector;
pub use error::{Error, Result};
pub use families::{dictator, junta, majority, noisy_dictator, parity, random_folded, FnSpec};
pub use fourier::{
    influence, influence_combinatorial, inverse_wht, low_degree_influence, product_function,
    subset_zeta, wht, Spectrum,
};
pub use function::{make_folded, BooleanFunction, CubeFunction, FoldedOracle, RealPointFunction};
pub use gowers::{
    find_influential_pair, gowers_inner_product, gowers_norm, linear_gowers_inner_product,
    Estimate, EstimateMethod, GowersOptions, IndexedFamily, InfluentialPair,
};
pub use stats::wilson_interval;
pub use testers::{
    basic_test_prob_exact, basic_test_prob_fourier, complete_hypergraph, htest_prob_exact,
    htest_prob_mc, noise_and_operator, query_budget, run_basic_test, run_hypergraph_test,
    ExactProbability, FunctionFamily, FunctionId, Hypergraph, McEstimate, QueryBudget,
    TestTranscript, Verdict,
};

/// Largest supported dimension of a truth table.
pub const MAX_DIMENSION: usize = 26;

/// Default cap on random bits for exact enumeration (`2^26` outcomes).
pub const DEFAULT_GUARD_BITS: u32 = 26;
