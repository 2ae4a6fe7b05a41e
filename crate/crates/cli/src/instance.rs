//! Seeded test instances, including high-cancellation families.

use rand::seq::index;
use rand::Rng;
use sparseconv::rng::{stream_rng, SeededRng, Stream};
use sparseconv::vector::{MAX_COEFF_ABS, MAX_TERMS};
use sparseconv::{Envelope, Error, SparseVector};

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    /// Operands have length `n` (degree below `n`).
    pub n: u64,
    /// Nonzeros per operand.
    pub terms: u64,
    pub coeff_bound: i64,
    /// Share of the first operand's terms that sit in a telescoping block.
    pub cancel_fraction: f64,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<(), Error> {
        let padded = self
            .n
            .checked_mul(2)
            .ok_or_else(|| Error::Envelope(format!("n = {} too large", self.n)))?;
        Envelope::default().check_dimension(padded)?;
        if self.terms > self.n {
            return Err(Error::InvalidParameter(format!(
                "terms {} exceeds n {}",
                self.terms, self.n
            )));
        }
        if self.terms > MAX_TERMS as u64 {
            return Err(Error::Envelope(format!("terms {} exceeds {MAX_TERMS}", self.terms)));
        }
        if !(1..=MAX_COEFF_ABS).contains(&self.coeff_bound) {
            return Err(Error::Envelope(format!(
                "coefficient bound {} not in [1, {MAX_COEFF_ABS}]",
                self.coeff_bound
            )));
        }
        if !(0.0..=1.0).contains(&self.cancel_fraction) {
            return Err(Error::InvalidParameter(format!(
                "cancel fraction {} not in [0, 1]",
                self.cancel_fraction
            )));
        }
        if self.cancel_fraction > 0.0 && self.n < 2 {
            return Err(Error::InvalidParameter("cancellation needs n >= 2".into()));
        }
        Ok(())
    }
}

fn nonzero_coeff(rng: &mut SeededRng, bound: i64) -> i64 {
    let c = rng.random_range(1..=bound);
    if rng.random_bool(0.5) {
        -c
    } else {
        c
    }
}

/// `count` distinct uniform indices from `[lo, n)` with uniform nonzero
/// coefficients.
fn random_terms(rng: &mut SeededRng, lo: u64, n: u64, count: u64, bound: i64) -> Vec<(u64, i64)> {
    let width = (n - lo) as usize;
    let count = (count as usize).min(width);
    let mut picks: Vec<u64> = index::sample(rng, width, count)
        .into_iter()
        .map(|k| lo + k as u64)
        .collect();
    picks.sort_unstable();
    picks.into_iter().map(|i| (i, nonzero_coeff(rng, bound))).collect()
}

/// An operand pair for `spec`.
///
/// With `cancel_fraction = f`, the first operand holds `round(f·terms)` ones
/// on `[0, round(f·terms))` and the rest of its terms at random above that
/// block. When the block is nonempty the second operand contains `1 − z`,
/// which collapses the block's contribution to two terms, plus
/// `round((1 − f)·terms)` random terms. `f = 0` gives two uniform random
/// operands; `f = 1` gives the pure telescoping pair whose product is
/// `z^terms − 1`.
pub fn gen_instance(spec: &InstanceSpec) -> Result<(SparseVector, SparseVector), Error> {
    spec.validate()?;
    let mut rng = stream_rng(spec.seed, Stream::Generation);
    let (n, terms, bound) = (spec.n, spec.terms, spec.coeff_bound);
    let block = ((spec.cancel_fraction * terms as f64).round() as u64).min(terms);
    let mut u: Vec<(u64, i64)> = (0..block).map(|i| (i, 1)).collect();
    u.extend(random_terms(&mut rng, block, n, terms - block, bound));
    let v = if block == 0 {
        random_terms(&mut rng, 0, n, terms, bound)
    } else {
        let rest = (((1.0 - spec.cancel_fraction) * terms as f64).round() as u64).min(n - 2);
        let mut v = vec![(0, -1), (1, 1)];
        v.extend(random_terms(&mut rng, 2, n, rest, bound));
        v
    };
    Ok((SparseVector::new(n, u)?, SparseVector::new(n, v)?))
}

/// A pair with `s` terms each whose product has exactly 32 terms.
///
/// `P = 1 + z + … + z^{s−1}` and `Q = (1 − z)·G(z)·Σ_{i<s/32} z^{s·i}` with
/// `G` holding 16 seeded coefficients at exponents `0, 4, …, 60`, so
/// `P·Q = G(z)·(1 − z^{s²/32})`. Requires `s` to be a multiple of 32 with
/// `s >= 64` and `s²/32 + 61 < n`.
pub fn cancellation_family(
    n: u64,
    s: u64,
    coeff_bound: i64,
    seed: u64,
) -> Result<(SparseVector, SparseVector), Error> {
    if s < 64 || s % 32 != 0 {
        return Err(Error::InvalidParameter(format!("s = {s} must be a multiple of 32, >= 64")));
    }
    let span = s * (s / 32);
    if span + 61 >= n {
        return Err(Error::InvalidParameter(format!("n = {n} too small for s = {s}")));
    }
    if !(1..=MAX_COEFF_ABS).contains(&coeff_bound) {
        return Err(Error::Envelope(format!("coefficient bound {coeff_bound} out of range")));
    }
    let mut rng = stream_rng(seed, Stream::Generation);
    let g: Vec<(u64, i64)> = (0..16).map(|l| (4 * l, nonzero_coeff(&mut rng, coeff_bound))).collect();
    let p = SparseVector::new(n, (0..s).map(|i| (i, 1)))?;
    let mut q = Vec::with_capacity(s as usize);
    for block in 0..s / 32 {
        for &(j, c) in &g {
            q.push((s * block + j, c));
            q.push((s * block + j + 1, -c));
        }
    }
    Ok((p, SparseVector::new(n, q)?))
}

/// The exact product of [`cancellation_family`], over `[0, 2n)`.
pub fn cancellation_family_product(
    n: u64,
    s: u64,
    coeff_bound: i64,
    seed: u64,
) -> Result<SparseVector, Error> {
    cancellation_family(n, s, coeff_bound, seed)?;
    let mut rng = stream_rng(seed, Stream::Generation);
    let shift = s * (s / 32);
    let mut terms = Vec::with_capacity(32);
    for l in 0..16 {
        let c = nonzero_coeff(&mut rng, coeff_bound);
        terms.push((4 * l, c));
        terms.push((4 * l + shift, -c));
    }
    SparseVector::new(2 * n, terms)
}
