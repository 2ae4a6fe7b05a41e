//! Prime folding with root-of-unity weights.
//!
//! `P_m(x)` sums the coordinates of `x` whose indices agree modulo `m`, each
//! multiplied by `ω^j` with `ω = e^{iπ/N}` a `2N`-th root of unity. Folding is
//! linear and, for products without cyclic wrap-around, commutes with
//! convolution: `P_m(x) ⊛ P_m(y) = P_m(x ⋆ y)` where `⊛` is cyclic
//! convolution of length `m`. An index `j` alone in its bucket therefore
//! shows up as `(x ⋆ y)_j · ω^j`, and both the value and the index can be
//! read back from that single complex number.

use std::f64::consts::FRAC_PI_4;

pub use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{self, UNIT_ROUNDOFF};
use crate::vector::SparseVector;

/// Largest bucket error the decoder tolerates; isolated integer values sit at
/// distance `>= 0.5` from any other integer.
pub const FOLD_TOLERANCE: f64 = 0.1;

/// Absolute error of [`root_of_unity_power`] in units of `2^-53`.
const OMEGA_ERROR_UNITS: f64 = 4.0;

/// `ω^j = e^{iπj/N}` for `j` in `[0, 2N)`, accurate to `4·2^-53`.
pub fn root_of_unity_power(j: u64, n: u64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::ZeroLength);
    }
    if j >= 2 * n {
        return Err(Error::ExponentOutOfRange {
            exponent: j,
            bound: 2 * n,
        });
    }
    Ok(omega_pow(j, n))
}

/// `ω^j` for any `j`, reduced modulo `2N` first.
///
/// The argument is reduced exactly in integer arithmetic to an angle of at
/// most `π/4`, so the only rounding comes from one division, one
/// multiplication by `π/4` and one `sin_cos` call.
pub(crate) fn omega_pow(j: u64, n: u64) -> Complex64 {
    let j = j % (2 * n);
    let four_j = 4 * j;
    let octant = four_j / n;
    let rem = four_j - octant * n;
    let (c, s) = if octant % 2 == 0 {
        let (s, c) = (FRAC_PI_4 * (rem as f64 / n as f64)).sin_cos();
        (c, s)
    } else {
        let (s, c) = (FRAC_PI_4 * ((n - rem) as f64 / n as f64)).sin_cos();
        (s, c)
    };
    match octant / 2 {
        0 => Complex64::new(c, s),
        1 => Complex64::new(-s, c),
        2 => Complex64::new(-c, -s),
        _ => Complex64::new(s, -c),
    }
}

/// The image `P_m(x)`: `m` complex buckets plus an a-priori bound on the
/// absolute error of every bucket.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldedVector {
    modulus: u64,
    buckets: Vec<Complex64>,
    error_bound: f64,
}

impl FoldedVector {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn buckets(&self) -> &[Complex64] {
        &self.buckets
    }

    pub fn error_bound(&self) -> f64 {
        self.error_bound
    }

    pub fn into_buckets(self) -> Vec<Complex64> {
        self.buckets
    }
}

/// Folds `x` into `m` buckets: term `(j, c)` adds `c·ω^j` to bucket `j mod m`.
pub fn fold(x: &SparseVector, m: u64) -> Result<FoldedVector> {
    if m == 0 {
        return Err(Error::ZeroModulus);
    }
    let n = x.dim();
    let mut buckets = vec![Complex64::default(); m as usize];
    for &(j, c) in x.terms() {
        buckets[(j % m) as usize] += omega_pow(j, n) * c as f64;
    }
    // per-term error (ω plus the scaling) plus summation inside a bucket
    let error_bound =
        UNIT_ROUNDOFF * (OMEGA_ERROR_UNITS + 2.0 + x.l0() as f64) * x.l1_norm();
    Ok(FoldedVector {
        modulus: m,
        buckets,
        error_bound,
    })
}

/// Cyclic convolution of two equal-length complex arrays via FFT.
pub fn cyclic_fft_convolve(a: &[Complex64], b: &[Complex64]) -> Result<Vec<Complex64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len() as u64,
            right: b.len() as u64,
        });
    }
    Ok(fft::cyclic_convolve(a, b))
}

/// Buckets of `P_m(x) ⊛ P_m(y)`.
#[derive(Debug, Clone)]
pub(crate) enum ProductBuckets {
    Dense(Vec<Complex64>),
    /// Ascending by bucket; absent buckets hold exactly zero.
    Sparse(Vec<(u64, Complex64)>),
}

/// `P_m(x) ⊛ P_m(y)`, the folded product without the `w` correction.
#[derive(Debug, Clone)]
pub(crate) struct FoldedProduct {
    pub(crate) modulus: u64,
    pub(crate) dim: u64,
    pub(crate) buckets: ProductBuckets,
    pub(crate) error_bound: f64,
}

pub(crate) fn check_no_wrap(x: &SparseVector, y: &SparseVector) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::LengthMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    if let (Some(a), Some(b)) = (x.max_index(), y.max_index()) {
        if a + b >= x.dim() {
            return Err(Error::WrapAround {
                sum: a + b,
                length: x.dim(),
            });
        }
    }
    Ok(())
}

/// Nonzero buckets of `P_m(x)`, ascending, summed in index order like [`fold`].
fn fold_sparse(x: &SparseVector, m: u64) -> Vec<(u64, Complex64)> {
    let n = x.dim();
    let mut terms: Vec<(u64, Complex64)> = x
        .terms()
        .iter()
        .map(|&(j, c)| (j % m, omega_pow(j, n) * c as f64))
        .collect();
    terms.sort_by_key(|&(b, _)| b);
    merge_sorted(terms)
}

/// Sums runs of equal keys in a key-sorted list, keeping first-seen order
/// within each run.
fn merge_sorted(terms: Vec<(u64, Complex64)>) -> Vec<(u64, Complex64)> {
    let mut out: Vec<(u64, Complex64)> = Vec::with_capacity(terms.len());
    for (b, z) in terms {
        match out.last_mut() {
            Some((last, acc)) if *last == b => *acc += z,
            _ => out.push((b, z)),
        }
    }
    out
}

/// Pairing every nonzero bucket of one side with every one of the other
/// beats the FFT when the two folded vectors are this sparse.
fn prefer_direct(pairs: usize, m: u64) -> bool {
    let len = fft::transform_len(m as usize) as f64;
    (pairs as f64) <= len * len.log2().max(1.0)
}

fn bit_width(v: u64) -> u32 {
    u64::BITS - v.leading_zeros()
}

/// Bucket sums of every pair `(fx[i], fy[j])` at `(a + b) mod m`, ascending
/// by bucket. Each pair is packed into one `u64` as `bucket | i | j` and
/// pushed in `(i, j)` order; a stable radix sort on the bucket keeps that
/// order, so every bucket sums in `(i, j)` order.
fn sparse_pair_sums(
    fx: &[(u64, Complex64)],
    fy: &[(u64, Complex64)],
    m: u64,
) -> Vec<(u64, Complex64)> {
    let (i_bits, j_bits) = (bit_width(fx.len() as u64), bit_width(fy.len() as u64));
    if bit_width(m) + i_bits + j_bits > u64::BITS {
        let mut out = Vec::with_capacity(fx.len() * fy.len());
        for &(a, za) in fx {
            for &(b, zb) in fy {
                out.push(((a + b) % m, za * zb));
            }
        }
        out.sort_by_key(|&(b, _)| b);
        return merge_sorted(out);
    }
    let shift = i_bits + j_bits;
    let mut keys = Vec::with_capacity(fx.len() * fy.len());
    for (i, &(a, _)) in fx.iter().enumerate() {
        let row = (i as u64) << j_bits;
        for (j, &(b, _)) in fy.iter().enumerate() {
            keys.push(((a + b) % m) << shift | row | j as u64);
        }
    }
    radsort::sort_by_key(&mut keys, |&k| k >> shift);
    let (i_mask, j_mask) = ((1u64 << i_bits) - 1, (1u64 << j_bits) - 1);
    let mut out: Vec<(u64, Complex64)> = Vec::new();
    for k in keys {
        let b = k >> shift;
        let z = fx[((k >> j_bits) & i_mask) as usize].1 * fy[(k & j_mask) as usize].1;
        match out.last_mut() {
            Some((last, acc)) if *last == b => *acc += z,
            _ => out.push((b, z)),
        }
    }
    out
}

pub(crate) fn folded_product(x: &SparseVector, y: &SparseVector, m: u64) -> Result<FoldedProduct> {
    if m == 0 {
        return Err(Error::ZeroModulus);
    }
    let l1 = |v: &SparseVector| v.l1_norm();
    let fold_error = |v: &SparseVector| {
        UNIT_ROUNDOFF * (OMEGA_ERROR_UNITS + 2.0 + v.l0() as f64) * v.l1_norm()
    };
    // |P_m(v)_b| ≤ ‖v‖₁, so this covers the fold errors of both sides
    let (ex, ey) = (fold_error(x), fold_error(y));
    let propagated = ex * l1(y) + ey * l1(x) + ex * ey;

    let fx = fold_sparse(x, m);
    let fy = fold_sparse(y, m);
    let pairs = fx.len().saturating_mul(fy.len());
    if prefer_direct(pairs, m) {
        let norm1 = |v: &[(u64, Complex64)]| v.iter().map(|(_, z)| z.norm()).sum::<f64>();
        let depth = fx.len().min(fy.len()) as f64;
        let arithmetic = UNIT_ROUNDOFF * (depth + 4.0) * norm1(&fx) * norm1(&fy);
        let buckets = if (m as usize) <= pairs.saturating_mul(4) {
            let mut dense = vec![Complex64::default(); m as usize];
            for &(a, za) in &fx {
                for &(b, zb) in &fy {
                    dense[((a + b) % m) as usize] += za * zb;
                }
            }
            ProductBuckets::Dense(dense)
        } else {
            ProductBuckets::Sparse(sparse_pair_sums(&fx, &fy, m))
        };
        return Ok(FoldedProduct {
            modulus: m,
            dim: x.dim(),
            buckets,
            error_bound: arithmetic + propagated,
        });
    }

    let densify = |v: &[(u64, Complex64)]| {
        let mut d = vec![Complex64::default(); m as usize];
        for &(b, z) in v {
            d[b as usize] = z;
        }
        d
    };
    let (dx, dy) = (densify(&fx), densify(&fy));
    let transform = fft::convolution_error_bound(fft::norm2(&dx), fft::norm2(&dy), m as usize);
    Ok(FoldedProduct {
        modulus: m,
        dim: x.dim(),
        buckets: ProductBuckets::Dense(fft::cyclic_convolve(&dx, &dy)),
        error_bound: transform + propagated,
    })
}

impl FoldedProduct {
    /// Error bound of the residual buckets once `w` is subtracted.
    pub(crate) fn residual_error_bound(&self, w: &SparseVector) -> f64 {
        let w_error = UNIT_ROUNDOFF * (OMEGA_ERROR_UNITS + 2.0 + w.l0() as f64) * w.l1_norm();
        self.error_bound + w_error
    }

    fn check_bound(&self, w: &SparseVector) -> Result<f64> {
        let bound = self.residual_error_bound(w);
        if bound >= FOLD_TOLERANCE {
            return Err(Error::Precision {
                bound,
                tolerance: FOLD_TOLERANCE,
            });
        }
        Ok(bound)
    }

    /// Bucket `b` of the product alone.
    pub(crate) fn value_at(&self, b: u64) -> Complex64 {
        match &self.buckets {
            ProductBuckets::Dense(d) => d[b as usize],
            ProductBuckets::Sparse(s) => s
                .binary_search_by_key(&b, |&(k, _)| k)
                .map_or(Complex64::default(), |i| s[i].1),
        }
    }

    /// Buckets of the product alone with magnitude at least `threshold`.
    pub(crate) fn heavy_buckets(&self, threshold: f64) -> Vec<u64> {
        match &self.buckets {
            ProductBuckets::Dense(d) => d
                .iter()
                .enumerate()
                .filter(|(_, z)| z.norm_sqr() >= threshold * threshold)
                .map(|(b, _)| b as u64)
                .collect(),
            ProductBuckets::Sparse(s) => s
                .iter()
                .filter(|(_, z)| z.norm_sqr() >= threshold * threshold)
                .map(|&(b, _)| b)
                .collect(),
        }
    }

    /// Subtracts one term of `P_m(w)`. Every path that forms residual
    /// buckets goes through here, always in ascending index order within a
    /// bucket, so results agree to the last bit.
    pub(crate) fn subtract_term(&self, bucket: Complex64, j: u64, c: i64) -> Complex64 {
        bucket - omega_pow(j, self.dim) * c as f64
    }

    /// `w`'s terms as `(bucket, index, coefficient)`, ascending.
    fn w_by_bucket(&self, w: &SparseVector) -> Vec<(u64, u64, i64)> {
        let mut out: Vec<_> = w.terms().iter().map(|&(j, c)| (j % self.modulus, j, c)).collect();
        out.sort_unstable();
        out
    }

    /// Residual buckets `P_m(x ⋆ y − w)` with magnitude at least
    /// `threshold`, ascending by bucket.
    pub(crate) fn occupied(&self, w: &SparseVector, threshold: f64) -> Result<Vec<(u64, Complex64)>> {
        self.check_bound(w)?;
        let ws = self.w_by_bucket(w);
        let mut out = Vec::new();
        let squared = threshold * threshold;
        let mut keep = |b: u64, z: Complex64| {
            if z.norm_sqr() >= squared {
                out.push((b, z));
            }
        };
        let mut k = 0;
        // applies w's terms in bucket b to z
        let correct = |b: u64, mut z: Complex64, k: &mut usize| {
            while *k < ws.len() && ws[*k].0 == b {
                z = self.subtract_term(z, ws[*k].1, ws[*k].2);
                *k += 1;
            }
            z
        };
        match &self.buckets {
            ProductBuckets::Dense(d) => {
                for (b, &z) in d.iter().enumerate() {
                    let b = b as u64;
                    keep(b, correct(b, z, &mut k));
                }
            }
            ProductBuckets::Sparse(s) => {
                let mut i = 0;
                while i < s.len() || k < ws.len() {
                    let next_s = s.get(i).map_or(u64::MAX, |e| e.0);
                    let next_w = ws.get(k).map_or(u64::MAX, |e| e.0);
                    let b = next_s.min(next_w);
                    let z = if next_s == b {
                        i += 1;
                        s[i - 1].1
                    } else {
                        Complex64::default()
                    };
                    keep(b, correct(b, z, &mut k));
                }
            }
        }
        Ok(out)
    }

    pub(crate) fn residual(&self, w: &SparseVector) -> Result<FoldedVector> {
        let error_bound = self.check_bound(w)?;
        let mut buckets = match &self.buckets {
            ProductBuckets::Dense(d) => d.clone(),
            ProductBuckets::Sparse(s) => {
                let mut d = vec![Complex64::default(); self.modulus as usize];
                for &(b, z) in s {
                    d[b as usize] = z;
                }
                d
            }
        };
        for (b, j, c) in self.w_by_bucket(w) {
            buckets[b as usize] = self.subtract_term(buckets[b as usize], j, c);
        }
        Ok(FoldedVector {
            modulus: self.modulus,
            buckets,
            error_bound,
        })
    }
}

/// `P_p((x ⋆ y) − w)` computed as `P_p(x) ⊛ P_p(y) − P_p(w)`.
///
/// Requires `max supp(x) + max supp(y) < N` so the cyclic product equals the
/// polynomial product (always true for zero-padded operands). Fails with
/// [`Error::Precision`] when the accumulated error bound reaches
/// [`FOLD_TOLERANCE`].
pub fn folded_residual(
    x: &SparseVector,
    y: &SparseVector,
    w: &SparseVector,
    p: u64,
) -> Result<FoldedVector> {
    check_no_wrap(x, y)?;
    if w.dim() != x.dim() {
        return Err(Error::LengthMismatch {
            left: x.dim(),
            right: w.dim(),
        });
    }
    if p < 2 {
        return Err(Error::InvalidParameter(format!("bucket count {p} below 2")));
    }
    folded_product(x, y, p)?.residual(w)
}
