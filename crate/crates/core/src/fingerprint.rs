//! Randomized check of `x ⋆ y = w` by evaluating all three as polynomials at
//! random points modulo a random prime.
//!
//! Inputs are read as polynomials of degree `< N`, so the check is exact only
//! when `x ⋆ y` does not wrap around; the driver only ever calls it on
//! zero-padded operands.

use rand::Rng;

use crate::error::{Error, Result};
use crate::numtheory::{is_prime, modpow, mul_mod, random_prime_in_range, MR_ROUNDS};
use crate::vector::SparseVector;

#[derive(Debug, Clone, PartialEq)]
pub struct FingerprintParams {
    /// Primes are drawn from `[c′N, 2c′N]`.
    pub c_prime: u64,
    pub mr_rounds: u32,
}

impl Default for FingerprintParams {
    fn default() -> Self {
        Self {
            c_prime: 64,
            mr_rounds: MR_ROUNDS,
        }
    }
}

impl FingerprintParams {
    /// `⌈log₂(3/δ) / log₂ c′⌉ + 1`.
    pub fn eval_rounds(&self, delta: f64) -> u32 {
        let per_round = (self.c_prime as f64).log2();
        ((3.0 / delta).log2() / per_round).ceil().max(0.0) as u32 + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
}

impl Verdict {
    pub fn is_yes(self) -> bool {
        self == Verdict::Yes
    }
}

/// `Σ c_j · point^j mod p`, with coefficients reduced into `[0, p)`.
///
/// Powers are advanced across the gaps between consecutive indices, so the
/// cost is one short exponentiation per term.
pub fn eval_sparse_poly_mod(f: &SparseVector, point: u64, p: u64) -> Result<u64> {
    if p == 0 {
        return Err(Error::ZeroModulus);
    }
    let point = point % p;
    let mut acc = 0u64;
    let mut power = 1 % p;
    let mut at = 0u64;
    for &(j, c) in f.terms() {
        power = mul_mod(power, modpow(point, j - at, p)?, p);
        at = j;
        let c = (c as i128).rem_euclid(p as i128) as u64;
        acc = (acc + mul_mod(c, power, p)) % p;
    }
    Ok(acc)
}

/// Answers whether `x ⋆ y = w`. Equal inputs always give [`Verdict::Yes`];
/// unequal inputs give [`Verdict::No`] with probability at least `1 − delta`.
pub fn equality_test<R: Rng + ?Sized>(
    x: &SparseVector,
    y: &SparseVector,
    w: &SparseVector,
    delta: f64,
    rng: &mut R,
) -> Result<Verdict> {
    equality_test_with(x, y, w, delta, &FingerprintParams::default(), rng)
}

pub fn equality_test_with<R: Rng + ?Sized>(
    x: &SparseVector,
    y: &SparseVector,
    w: &SparseVector,
    delta: f64,
    params: &FingerprintParams,
    rng: &mut R,
) -> Result<Verdict> {
    let n = x.dim();
    for other in [y.dim(), w.dim()] {
        if other != n {
            return Err(Error::LengthMismatch { left: n, right: other });
        }
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta {delta} not in (0, 1)")));
    }
    let lo = params.c_prime.saturating_mul(n).max(2);
    let hi = lo.saturating_mul(2);
    let p = match random_prime_in_range(lo, hi, delta / 3.0, rng) {
        Ok(p) => p,
        // keep going past the draw budget so equal inputs still get Yes;
        // [lo, 2lo] always holds a prime
        Err(Error::PrimeSearchExhausted { .. }) => loop {
            let candidate = rng.random_range(lo..=hi);
            if is_prime(candidate) {
                break candidate;
            }
        },
        Err(e) => return Err(e),
    };
    for _ in 0..params.eval_rounds(delta) {
        let r = rng.random_range(0..p);
        let lhs = mul_mod(
            eval_sparse_poly_mod(x, r, p)?,
            eval_sparse_poly_mod(y, r, p)?,
            p,
        );
        if lhs != eval_sparse_poly_mod(w, r, p)? {
            return Ok(Verdict::No);
        }
    }
    Ok(Verdict::Yes)
}
