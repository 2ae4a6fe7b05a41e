//! Sparse integer vectors, exact cyclic convolution, and the dense FFT
//! baseline.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::fft;

/// Largest supported vector dimension `N`.
pub const MAX_DIMENSION: u64 = 1 << 26;
/// Largest supported input coefficient magnitude.
pub const MAX_COEFF_ABS: i64 = 1 << 20;
/// Largest supported number of nonzeros per input.
pub const MAX_TERMS: usize = 1 << 20;

/// Bounds under which every product coefficient fits in an `i64`
/// (`max_terms · max_coeff_abs² ≤ 2^60`) and the floating-point stages stay
/// inside their error budgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Envelope {
    pub max_dimension: u64,
    pub max_coeff_abs: i64,
    pub max_terms: usize,
}

impl Default for Envelope {
    fn default() -> Self {
        Self {
            max_dimension: MAX_DIMENSION,
            max_coeff_abs: MAX_COEFF_ABS,
            max_terms: MAX_TERMS,
        }
    }
}

impl Envelope {
    pub fn check_dimension(&self, len: u64) -> Result<()> {
        if len == 0 {
            return Err(Error::ZeroLength);
        }
        if len > self.max_dimension {
            return Err(Error::Envelope(format!(
                "dimension {len} exceeds {}",
                self.max_dimension
            )));
        }
        Ok(())
    }

    /// Checks a multiplication operand against all three bounds.
    pub fn check_operand(&self, v: &SparseVector) -> Result<()> {
        self.check_dimension(v.dim())?;
        if v.l0() > self.max_terms {
            return Err(Error::Envelope(format!(
                "{} terms exceeds {}",
                v.l0(),
                self.max_terms
            )));
        }
        if v.max_abs() > self.max_coeff_abs as u64 {
            return Err(Error::Envelope(format!(
                "coefficient magnitude {} exceeds {}",
                v.max_abs(),
                self.max_coeff_abs
            )));
        }
        Ok(())
    }
}

/// A length-`N` integer vector stored as strictly increasing
/// `(index, coefficient)` terms with every coefficient nonzero.
///
/// Canonical form makes structural equality coincide with vector equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseVector {
    dim: u64,
    terms: Vec<(u64, i64)>,
}

impl SparseVector {
    /// Builds a canonical vector from unordered pairs; duplicate indices are
    /// summed and zero sums dropped.
    pub fn new(dim: u64, pairs: impl IntoIterator<Item = (u64, i64)>) -> Result<Self> {
        Envelope::default().check_dimension(dim)?;
        let mut terms: Vec<(u64, i64)> = pairs.into_iter().collect();
        if let Some(&(index, _)) = terms.iter().find(|(i, _)| *i >= dim) {
            return Err(Error::IndexOutOfRange { index, length: dim });
        }
        terms.sort_unstable_by_key(|&(i, _)| i);
        let mut out: Vec<(u64, i64)> = Vec::with_capacity(terms.len());
        for (i, c) in terms {
            match out.last_mut() {
                Some((j, acc)) if *j == i => {
                    *acc = acc.checked_add(c).ok_or(Error::Overflow(i))?;
                }
                _ => out.push((i, c)),
            }
        }
        out.retain(|&(_, c)| c != 0);
        Ok(Self { dim, terms: out })
    }

    pub fn zero(dim: u64) -> Self {
        debug_assert!(dim > 0);
        Self {
            dim,
            terms: Vec::new(),
        }
    }

    /// Wraps terms already in canonical form.
    pub(crate) fn from_canonical(dim: u64, terms: Vec<(u64, i64)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(terms.iter().all(|&(i, c)| i < dim && c != 0));
        Self { dim, terms }
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    /// Number of nonzero coordinates.
    pub fn l0(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(u64, i64)] {
        &self.terms
    }

    pub fn get(&self, index: u64) -> i64 {
        self.terms
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|k| self.terms[k].1)
            .unwrap_or(0)
    }

    pub fn max_index(&self) -> Option<u64> {
        self.terms.last().map(|&(i, _)| i)
    }

    pub fn max_abs(&self) -> u64 {
        self.terms
            .iter()
            .map(|&(_, c)| c.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|&(_, c)| c.unsigned_abs() as f64).sum()
    }

    /// Embeds the vector into a longer one with trailing zeros.
    pub fn zero_pad(&self, dim: u64) -> Result<Self> {
        Envelope::default().check_dimension(dim)?;
        if dim < self.dim {
            return Err(Error::InvalidParameter(format!(
                "cannot pad length {} down to {dim}",
                self.dim
            )));
        }
        Ok(Self {
            dim,
            terms: self.terms.clone(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.merge(other, 1)
    }

    fn merge(&self, other: &Self, sign: i64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::LengthMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut p, mut q) = (0, 0);
        while p < a.len() || q < b.len() {
            let take_a = q >= b.len() || (p < a.len() && a[p].0 < b[q].0);
            let take_b = p >= a.len() || (q < b.len() && b[q].0 < a[p].0);
            if take_a {
                out.push(a[p]);
                p += 1;
            } else if take_b {
                let (i, c) = b[q];
                out.push((i, c.checked_mul(sign).ok_or(Error::Overflow(i))?));
                q += 1;
            } else {
                let i = a[p].0;
                let c = b[q]
                    .1
                    .checked_mul(sign)
                    .and_then(|c| a[p].1.checked_add(c))
                    .ok_or(Error::Overflow(i))?;
                if c != 0 {
                    out.push((i, c));
                }
                p += 1;
                q += 1;
            }
        }
        Ok(Self::from_canonical(self.dim, out))
    }
}

/// Canonical difference `x − y`.
pub fn subtract(x: &SparseVector, y: &SparseVector) -> Result<SparseVector> {
    x.merge(y, -1)
}

/// Exact cyclic convolution by enumerating all term pairs; `O(l0(x)·l0(y))`.
///
/// This is the ground truth every other multiplier is checked against.
pub fn cyclic_convolve_naive(x: &SparseVector, y: &SparseVector) -> Result<SparseVector> {
    if x.dim != y.dim {
        return Err(Error::LengthMismatch {
            left: x.dim,
            right: y.dim,
        });
    }
    let n = x.dim;
    // the product support is unknown; l0(x)·l0(y) can overshoot by orders of magnitude
    let capacity = (x.l0() + y.l0()).min(n as usize);
    let mut acc: FxHashMap<u64, i64> = FxHashMap::with_capacity_and_hasher(capacity, Default::default());
    for &(i, a) in &x.terms {
        for &(j, b) in &y.terms {
            let k = (i + j) % n;
            let prod = a.checked_mul(b).ok_or(Error::Overflow(k))?;
            let slot = acc.entry(k).or_insert(0);
            *slot = slot.checked_add(prod).ok_or(Error::Overflow(k))?;
        }
    }
    let mut terms: Vec<(u64, i64)> = acc.into_iter().filter(|&(_, c)| c != 0).collect();
    terms.sort_unstable_by_key(|&(i, _)| i);
    Ok(SparseVector::from_canonical(n, terms))
}

/// Dense baseline: densify both operands, convolve with one complex FFT and
/// round every coordinate to the nearest integer.
///
/// Refuses inputs for which the a-priori floating-point error bound reaches
/// the 0.5 rounding margin.
pub fn dense_fft_multiply(x: &SparseVector, y: &SparseVector) -> Result<SparseVector> {
    if x.dim != y.dim {
        return Err(Error::LengthMismatch {
            left: x.dim,
            right: y.dim,
        });
    }
    let n = x.dim;
    Envelope::default().check_dimension(n)?;
    if x.is_zero() || y.is_zero() {
        return Ok(SparseVector::zero(n));
    }
    let norm2 = |v: &SparseVector| {
        v.terms
            .iter()
            .map(|&(_, c)| (c as f64) * (c as f64))
            .sum::<f64>()
            .sqrt()
    };
    let (nx, ny) = (norm2(x), norm2(y));
    // Both operands share one transform, so either norm may leak into the other.
    let bound = fft::convolution_error_bound(nx + ny, nx + ny, n as usize);
    if bound >= 0.5 {
        return Err(Error::Precision {
            bound,
            tolerance: 0.5,
        });
    }
    let densify = |v: &SparseVector| {
        let mut d = vec![0.0; n as usize];
        for &(i, c) in &v.terms {
            d[i as usize] = c as f64;
        }
        d
    };
    let out = fft::real_cyclic_convolve(&densify(x), &densify(y));
    let terms = out
        .into_iter()
        .enumerate()
        .filter_map(|(i, v)| {
            let r = v.round() as i64;
            (r != 0).then_some((i as u64, r))
        })
        .collect();
    Ok(SparseVector::from_canonical(n, terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(n: u64, pairs: &[(u64, i64)]) -> SparseVector {
        SparseVector::new(n, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn duplicates_cancel_to_canonical_form() {
        let v = sv(8, &[(3, 2), (3, -2), (1, 5)]);
        assert_eq!(v.terms(), &[(1, 5)]);
    }

    #[test]
    fn empty_pairs_give_zero_vector() {
        let v = sv(4, &[]);
        assert!(v.is_zero());
        assert_eq!(v, SparseVector::zero(4));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            SparseVector::new(4, [(5, 1)]),
            Err(Error::IndexOutOfRange {
                index: 5,
                length: 4
            })
        );
        assert_eq!(SparseVector::new(0, []), Err(Error::ZeroLength));
        assert!(matches!(
            SparseVector::new(MAX_DIMENSION + 1, []),
            Err(Error::Envelope(_))
        ));
        assert_eq!(
            SparseVector::new(4, [(1, i64::MAX), (1, 1)]),
            Err(Error::Overflow(1))
        );
    }

    #[test]
    fn naive_examples() {
        let x = sv(8, &[(0, 1), (2, 3)]);
        let y = sv(8, &[(1, 2)]);
        assert_eq!(cyclic_convolve_naive(&x, &y).unwrap(), sv(8, &[(1, 2), (3, 6)]));

        let x = sv(4, &[(3, 1)]);
        assert_eq!(cyclic_convolve_naive(&x, &x).unwrap(), sv(4, &[(2, 1)]));

        let x = sv(16, &[(0, 1), (1, 1), (2, 1), (3, 1)]);
        let y = sv(16, &[(0, -1), (1, 1)]);
        assert_eq!(cyclic_convolve_naive(&x, &y).unwrap(), sv(16, &[(0, -1), (4, 1)]));
    }

    #[test]
    fn naive_rejects_mismatch() {
        assert!(matches!(
            cyclic_convolve_naive(&sv(4, &[]), &sv(8, &[])),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn dense_examples() {
        let x = sv(8, &[(0, 1), (2, 3)]);
        let y = sv(8, &[(1, 2)]);
        assert_eq!(dense_fft_multiply(&x, &y).unwrap(), sv(8, &[(1, 2), (3, 6)]));
        assert!(dense_fft_multiply(&SparseVector::zero(8), &y).unwrap().is_zero());
        // non-power-of-two length exercises the padded path and the wrap
        let x = sv(6, &[(4, 2), (5, -1)]);
        let y = sv(6, &[(3, 7)]);
        assert_eq!(
            dense_fft_multiply(&x, &y).unwrap(),
            cyclic_convolve_naive(&x, &y).unwrap()
        );
    }

    #[test]
    fn dense_refuses_unsound_precision() {
        let big = sv(1024, &(0..1024).map(|i| (i, 1 << 40)).collect::<Vec<_>>());
        assert!(matches!(
            dense_fft_multiply(&big, &big),
            Err(Error::Precision { .. })
        ));
    }

    #[test]
    fn subtract_examples() {
        assert!(subtract(&sv(4, &[(1, 5)]), &sv(4, &[(1, 5)])).unwrap().is_zero());
        assert_eq!(
            subtract(&sv(4, &[(1, 5)]), &sv(4, &[(2, 1)])).unwrap(),
            sv(4, &[(1, 5), (2, -1)])
        );
        assert_eq!(
            subtract(&sv(4, &[(0, 1)]), &sv(4, &[(0, -1)])).unwrap(),
            sv(4, &[(0, 2)])
        );
        assert!(subtract(&sv(4, &[]), &sv(5, &[])).is_err());
    }

    #[test]
    fn envelope_operand_checks() {
        let env = Envelope::default();
        assert!(env.check_operand(&sv(8, &[(0, MAX_COEFF_ABS)])).is_ok());
        assert!(env.check_operand(&sv(8, &[(0, MAX_COEFF_ABS + 1)])).is_err());
        // the envelope guarantees products fit in an i64
        assert!((env.max_terms as u128) * (env.max_coeff_abs as u128).pow(2) <= 1u128 << 60);
    }
}
