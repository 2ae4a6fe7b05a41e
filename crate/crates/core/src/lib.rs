//! Output-sensitive multiplication of sparse integer polynomials.
//!
//! The product `x ⋆ y` of two zero-padded sparse vectors is recovered in
//! time near-linear in the number of input plus output nonzeros:
//!
//! 1. [`fold`] hashes indices modulo a random prime `p`, weighting every
//!    coordinate `j` by `ω^j` where `ω = e^{iπ/N}`, and obtains the folded
//!    residual `P_p((x ⋆ y) − w)` from one length-`p` FFT convolution.
//! 2. [`locate`] reads each isolated bucket back into an `(index, value)`
//!    pair: the magnitude rounds to `|value|` and the phase decodes to the
//!    index (shifted by `N` for negative values). Repetitions with fresh
//!    primes and majority voting filter collisions.
//! 3. [`driver`] peels the residual with geometrically shrinking budgets and
//!    guesses the output sparsity by doubling, accepting a candidate only
//!    after it passes the randomized [`fingerprint`] check.
//!
//! [`vector`] holds the data model plus the naive and dense-FFT baselines
//! used as oracles.

pub mod driver;
pub mod error;
pub mod fingerprint;
pub mod fold;
pub mod locate;
pub mod numtheory;
pub mod rng;
pub mod vector;

mod fft;

pub use driver::{
    hash_and_iterate, multiply_polynomials, sparse_multiply, AlgoParams, Backend, MultiplyReport,
};
pub use error::{Error, Result};
pub use fingerprint::{equality_test, Verdict};
pub use fold::{fold, folded_residual, root_of_unity_power, FoldedVector};
pub use locate::{decode_index, locate, Candidate, LocateParams};
pub use vector::{cyclic_convolve_naive, dense_fft_multiply, subtract, Envelope, SparseVector};
