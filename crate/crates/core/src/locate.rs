//! Reading folded buckets back into `(index, value)` pairs.
//!
//! A bucket holding a single residual coordinate equals `v·ω^j`. Its
//! magnitude rounds to `|v|`; its phase is `ω^j` for positive `v` and
//! `ω^{j+N}` for negative `v`, so decoding the phase to an exponent in
//! `[0, 2N)` yields both the index and the sign.
//!
//! [`Locator::locate`] repeats this with fresh random primes and keeps only
//! the pairs decoded in at least three quarters of the repetitions.

use log::warn;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fold::{check_no_wrap, folded_product, omega_pow, Complex64, FoldedProduct, FOLD_TOLERANCE};
use crate::numtheory::PrimeSource;
use crate::vector::SparseVector;

/// Isolation constant `C`: budgets exceed `C` times the residual sparsity and
/// primes are drawn up to `C·B·⌈log₂N⌉²`.
pub const ISOLATION_CONSTANT: u64 = 16;
/// Buckets at least this large are treated as occupied.
pub const HEAVY_THRESHOLD: f64 = 0.5;
/// Largest distance between a bucket and its re-encoded decode.
pub const REENCODE_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct LocateParams {
    /// Bucket budget `B`; more than `B` occupied buckets aborts the call.
    pub budget: u64,
    pub delta: f64,
    pub repetitions: u32,
    pub prune_threshold: u32,
    pub heavy_threshold: f64,
    pub reencode_tolerance: f64,
    pub isolation_constant: u64,
}

impl LocateParams {
    pub fn new(budget: u64, delta: f64) -> Result<Self> {
        if budget == 0 {
            return Err(Error::InvalidParameter("budget must be positive".into()));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta {delta} not in (0, 1)")));
        }
        let repetitions = repetitions_for(delta);
        Ok(Self {
            budget,
            delta,
            repetitions,
            prune_threshold: (3 * repetitions).div_ceil(4),
            heavy_threshold: HEAVY_THRESHOLD,
            reencode_tolerance: REENCODE_TOLERANCE,
            isolation_constant: ISOLATION_CONSTANT,
        })
    }

    pub fn with_isolation_constant(mut self, constant: u64) -> Self {
        self.isolation_constant = constant;
        self
    }

    /// Upper end of the prime range, `C·B·⌈log₂N⌉²`.
    pub fn prime_limit(&self, n: u64) -> u64 {
        prime_limit(self.isolation_constant, self.budget, n)
    }
}

/// `max(1, 5·⌈log₂(1/δ)⌉)`.
pub fn repetitions_for(delta: f64) -> u32 {
    let bits = (1.0 / delta).log2().ceil().max(0.0) as u32;
    (5 * bits).max(1)
}

/// `C·B·⌈log₂N⌉²`, saturating, and never below 2.
pub fn prime_limit(constant: u64, budget: u64, n: u64) -> u64 {
    let log_n = ceil_log2(n).max(1);
    constant
        .saturating_mul(budget)
        .saturating_mul(log_n * log_n)
        .max(2)
}

pub(crate) fn ceil_log2(n: u64) -> u64 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros() as u64
    }
}

/// A decoded pair together with the number of repetitions that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub index: u64,
    pub value: i64,
    pub hits: u32,
}

/// Recovers `j ∈ [0, 2N)` from `u ≈ ω^j`: the `j` minimizing `|u − ω^j|`.
///
/// The angle of `u` gives the nearest root up to rounding; the two
/// neighbours of that estimate are compared by exact distance.
pub fn decode_index(u: Complex64, n: u64) -> u64 {
    let two_n = 2 * n;
    let dist = |l: i64| (u - omega_pow(l.rem_euclid(two_n as i64) as u64, n)).norm_sqr();
    if !(u.re.is_finite() && u.im.is_finite()) {
        return 0;
    }
    if n <= 2 {
        return (0..two_n as i64)
            .min_by(|&a, &b| dist(a).total_cmp(&dist(b)))
            .map_or(0, |l| l as u64);
    }
    let l = (u.im.atan2(u.re) / std::f64::consts::PI * n as f64).round() as i64;
    // within 0.4 of the chord between neighbouring roots, both neighbours
    // are at least 0.6 of it away
    let chord = 2.0 * (std::f64::consts::FRAC_PI_2 / n as f64).sin();
    if dist(l) < 0.16 * chord * chord {
        return l.rem_euclid(two_n as i64) as u64;
    }
    let best = (l - 1..=l + 1)
        .min_by(|&a, &b| dist(a).total_cmp(&dist(b)))
        .expect("three candidates");
    best.rem_euclid(two_n as i64) as u64
}

/// [`decode_index`] by search alone: the signs of the real and imaginary
/// parts select a quarter of the circle, then a ternary search on
/// `|u − ω^ℓ|` over that quarter, widened by an eighth of a turn on each
/// side, finds the nearest root. The widened arc never contains the antipode
/// of `u`, so the distance is unimodal on it.
#[cfg(test)]
pub(crate) fn decode_index_ternary(u: Complex64, n: u64) -> u64 {
    let two_n = 2 * n;
    let dist = |l: i64| (u - omega_pow(l.rem_euclid(two_n as i64) as u64, n)).norm_sqr();
    if !(u.re.is_finite() && u.im.is_finite()) {
        return 0;
    }
    if n <= 2 {
        return (0..two_n as i64)
            .min_by(|&a, &b| dist(a).total_cmp(&dist(b)))
            .map_or(0, |l| l as u64);
    }
    let quarter = match (u.re >= 0.0, u.im >= 0.0) {
        (true, true) => 0,
        (false, true) => 1,
        (false, false) => 2,
        (true, false) => 3,
    };
    let n = n as i64;
    let mut lo = quarter * n / 2 - n / 4 - 1;
    let mut hi = (quarter + 1) * n / 2 + n / 4 + 1;
    while hi - lo > 2 {
        let third = (hi - lo) / 3;
        let (m1, m2) = (lo + third, hi - third);
        let (d1, d2) = (dist(m1), dist(m2));
        if d1 < d2 {
            hi = m2 - 1;
        } else if d1 > d2 {
            lo = m1 + 1;
        } else {
            lo = m1;
            hi = m2;
        }
    }
    let best = (lo..=hi)
        .min_by(|&a, &b| dist(a).total_cmp(&dist(b)))
        .expect("nonempty search window");
    best.rem_euclid(two_n as i64) as u64
}

/// Decodes one bucket, or `None` when it does not re-encode to itself.
fn decode_bucket(
    bucket: Complex64,
    bucket_index: u64,
    modulus: u64,
    n: u64,
    tolerance: f64,
) -> Option<(u64, i64)> {
    let magnitude = bucket.norm();
    let abs_value = magnitude.round();
    if abs_value < 1.0 || !abs_value.is_finite() {
        return None;
    }
    let exponent = decode_index(bucket / magnitude, n);
    let (index, value) = if exponent >= n {
        (exponent - n, -(abs_value as i64))
    } else {
        (exponent, abs_value as i64)
    };
    if index % modulus != bucket_index {
        return None;
    }
    let reencoded = omega_pow(index, n) * value as f64;
    ((bucket - reencoded).norm() <= tolerance).then_some((index, value))
}

/// What one `locate` call did; used by tests and instrumentation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LocateReport {
    /// Prime drawn in each executed repetition.
    pub primes: Vec<u64>,
    /// Occupied buckets seen in each executed repetition.
    pub heavy_counts: Vec<usize>,
    /// A repetition saw more than `B` occupied buckets.
    pub overflow: bool,
    /// A prime `>= N` (an injective hash) saw no occupied bucket, which
    /// proves the residual is zero.
    pub certified_zero: bool,
    /// Pairs that survived pruning, before conflict resolution.
    pub candidates: Vec<Candidate>,
    /// Candidates dropped because another candidate shared their index.
    pub conflicts: usize,
}

struct RepOutcome {
    heavy_count: usize,
    pairs: Vec<(u64, i64)>,
}

/// `P_M(x) ⊛ P_M(y)` for one modulus `M >= N`, shared by every repetition
/// that draws a prime `p >= N`. Such a prime hashes `[0, N)` injectively, so
/// all of those repetitions see the same occupied buckets holding the same
/// values.
struct InjectiveFold {
    product: FoldedProduct,
    threshold: f64,
    /// Buckets of the product alone that are occupied, ascending.
    heavy: Vec<u64>,
    /// Decodes of the `heavy` buckets, filled on first use.
    decoded: Vec<Option<Option<(u64, i64)>>>,
    /// `(j, c, bucket j − c·ω^j)` for the last `w` seen, ascending.
    corrected: Vec<(u64, i64, Complex64)>,
}

/// Locate state for one pair of operands, reused across calls so the
/// prime pool and the injective fold are built once.
pub struct Locator<'a> {
    x: &'a SparseVector,
    y: &'a SparseVector,
    n: u64,
    primes: PrimeSource,
    injective: Option<InjectiveFold>,
}

impl<'a> Locator<'a> {
    /// Fails unless `x` and `y` share a length and their product does not
    /// wrap around.
    pub fn new(x: &'a SparseVector, y: &'a SparseVector) -> Result<Self> {
        Self::with_prime_source(x, y, PrimeSource::default())
    }

    pub fn with_prime_source(
        x: &'a SparseVector,
        y: &'a SparseVector,
        primes: PrimeSource,
    ) -> Result<Self> {
        check_no_wrap(x, y)?;
        Ok(Self {
            x,
            y,
            n: x.dim(),
            primes,
            injective: None,
        })
    }

    pub fn dim(&self) -> u64 {
        self.n
    }

    /// One call of the locate routine against the running estimate `w`.
    ///
    /// Runs `t` repetitions; each draws a prime `p <= C·B·⌈log₂N⌉²`, folds
    /// the residual `(x ⋆ y) − w` into `p` buckets and decodes every occupied
    /// bucket. More than `B` occupied buckets in any repetition returns the
    /// zero vector. Pairs decoded in at least `⌈3t/4⌉` repetitions form the
    /// result.
    pub fn locate<R: Rng + ?Sized>(
        &mut self,
        w: &SparseVector,
        params: &LocateParams,
        rng: &mut R,
    ) -> Result<(SparseVector, LocateReport)> {
        if w.dim() != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: w.dim(),
            });
        }
        let limit = params.prime_limit(self.n);
        let mut report = LocateReport::default();
        // decoded pairs of the hashed repetitions, and how many repetitions
        // reused the injective outcome
        let mut votes: Vec<((u64, i64), u32)> = Vec::new();
        let mut injective_reps = 0u32;
        let mut injective_outcome: Option<RepOutcome> = None;

        // every repetition of a zero residual returns nothing, whatever the prime
        if self.injective.is_some() {
            let outcome = self.injective_rep(w, params)?;
            if outcome.heavy_count == 0 {
                report.certified_zero = true;
                return Ok((SparseVector::zero(self.n), report));
            }
            injective_outcome = Some(outcome);
        }

        for _ in 0..params.repetitions {
            let p = self.primes.sample(limit, rng)?;
            report.primes.push(p);
            let fresh;
            let outcome = if p >= self.n {
                if injective_outcome.is_none() {
                    injective_outcome = Some(self.injective_rep(w, params)?);
                }
                injective_reps += 1;
                injective_outcome.as_ref().expect("computed above")
            } else {
                fresh = self.hashed_rep(w, p, params)?;
                &fresh
            };
            report.heavy_counts.push(outcome.heavy_count);
            if outcome.heavy_count as u64 > params.budget {
                report.overflow = true;
                return Ok((SparseVector::zero(self.n), report));
            }
            if p >= self.n && outcome.heavy_count == 0 {
                report.certified_zero = true;
                return Ok((SparseVector::zero(self.n), report));
            }
            if p < self.n {
                votes = add_votes(votes, &outcome.pairs, 1);
            }
        }
        if injective_reps > 0 {
            let pairs = &injective_outcome.as_ref().expect("counted above").pairs;
            votes = add_votes(votes, pairs, injective_reps);
        }

        let mut candidates: Vec<Candidate> = votes
            .into_iter()
            .filter(|&(_, hits)| hits >= params.prune_threshold)
            .map(|((index, value), hits)| Candidate { index, value, hits })
            .collect();
        // by index, then preferred first: more hits, smaller |value|, smaller value
        candidates.sort_unstable_by_key(|c| (c.index, std::cmp::Reverse(c.hits), c.value.unsigned_abs(), c.value));
        let mut terms: Vec<(u64, i64)> = Vec::with_capacity(candidates.len());
        for c in &candidates {
            if terms.last().is_some_and(|&(i, _)| i == c.index) {
                report.conflicts += 1;
                continue;
            }
            terms.push((c.index, c.value));
        }
        if report.conflicts > 0 {
            warn!(
                "locate: {} conflicting candidates dropped (N = {}, B = {})",
                report.conflicts, self.n, params.budget
            );
        }
        report.candidates = candidates;
        Ok((SparseVector::from_canonical(self.n, terms), report))
    }

    fn hashed_rep(&self, w: &SparseVector, p: u64, params: &LocateParams) -> Result<RepOutcome> {
        let occupied = folded_product(self.x, self.y, p)?.occupied(w, params.heavy_threshold)?;
        let heavy_count = occupied.len();
        let mut pairs = Vec::new();
        // past the budget the caller aborts and never reads the decodes
        if heavy_count as u64 <= params.budget {
            for (b, bucket) in occupied {
                pairs.extend(decode_bucket(bucket, b, p, self.n, params.reencode_tolerance));
            }
        }
        // an index lives in one bucket, so indices are already distinct
        radsort::sort_by_key(&mut pairs, |&(j, _)| j);
        Ok(RepOutcome { heavy_count, pairs })
    }

    fn injective_rep(&mut self, w: &SparseVector, params: &LocateParams) -> Result<RepOutcome> {
        let n = self.n;
        let stale = self
            .injective
            .as_ref()
            .is_none_or(|f| f.threshold != params.heavy_threshold);
        if stale {
            let product = folded_product(self.x, self.y, n.next_power_of_two())?;
            let heavy = product.heavy_buckets(params.heavy_threshold);
            let heavy_len = heavy.len();
            self.injective = Some(InjectiveFold {
                product,
                threshold: params.heavy_threshold,
                heavy,
                decoded: vec![None; heavy_len],
                corrected: Vec::new(),
            });
        }
        let fold = self.injective.as_mut().expect("built above");
        let bound = fold.product.residual_error_bound(w);
        if bound >= FOLD_TOLERANCE {
            return Err(Error::Precision {
                bound,
                tolerance: FOLD_TOLERANCE,
            });
        }
        let modulus = fold.product.modulus;
        let tolerance = params.reencode_tolerance;

        // occupied buckets are the product's occupied buckets and supp(w)
        let (heavy, w_terms) = (&fold.heavy, w.terms());
        let mut heavy_count = 0;
        let mut pairs = Vec::new();
        let mut occupied_with_w = Vec::new();
        let (mut a, mut b) = (0, 0);
        let mut product_only = Vec::new();
        let squared = params.heavy_threshold * params.heavy_threshold;
        // w mostly repeats between calls, so reuse its corrected buckets
        let previous = std::mem::take(&mut fold.corrected);
        let mut previous = previous.into_iter().peekable();
        let mut corrected = Vec::with_capacity(w_terms.len());
        while a < heavy.len() || b < w_terms.len() {
            let next_heavy = heavy.get(a).copied().unwrap_or(u64::MAX);
            let next_w = w_terms.get(b).map_or(u64::MAX, |&(j, _)| j);
            if next_heavy < next_w {
                product_only.push(a);
                a += 1;
            } else {
                let (j, c) = w_terms[b];
                while previous.next_if(|e| e.0 < j).is_some() {}
                let bucket = match previous.next_if(|e| e.0 == j) {
                    Some((_, prev_c, z)) if prev_c == c => z,
                    _ => fold.product.subtract_term(fold.product.value_at(j), j, c),
                };
                corrected.push((j, c, bucket));
                if bucket.norm_sqr() >= squared {
                    occupied_with_w.push((j, bucket));
                }
                if next_heavy == next_w {
                    a += 1;
                }
                b += 1;
            }
        }
        fold.corrected = corrected;
        heavy_count += product_only.len() + occupied_with_w.len();
        if heavy_count as u64 > params.budget {
            return Ok(RepOutcome { heavy_count, pairs });
        }
        for slot in product_only {
            let j = fold.heavy[slot];
            let bucket = fold.product.value_at(j);
            let decoded = *fold.decoded[slot]
                .get_or_insert_with(|| decode_bucket(bucket, j, modulus, n, tolerance));
            pairs.extend(decoded);
        }
        for (j, bucket) in occupied_with_w {
            pairs.extend(decode_bucket(bucket, j, modulus, n, tolerance));
        }
        // an index lives in one bucket, so indices are already distinct
        radsort::sort_by_key(&mut pairs, |&(j, _)| j);
        Ok(RepOutcome { heavy_count, pairs })
    }
}

/// Merges one repetition's sorted, distinct pairs into the sorted tally.
fn add_votes(
    tally: Vec<((u64, i64), u32)>,
    pairs: &[(u64, i64)],
    weight: u32,
) -> Vec<((u64, i64), u32)> {
    let mut out = Vec::with_capacity(tally.len() + pairs.len());
    let mut new = pairs.iter().peekable();
    for (pair, hits) in tally {
        while let Some(&&next) = new.peek() {
            if next >= pair {
                break;
            }
            out.push((next, weight));
            new.next();
        }
        if new.peek() == Some(&&pair) {
            new.next();
            out.push((pair, hits + weight));
        } else {
            out.push((pair, hits));
        }
    }
    out.extend(new.map(|&pair| (pair, weight)));
    out
}

/// One standalone locate call with budget `B` and failure probability
/// `delta`; see [`Locator::locate`].
pub fn locate<R: Rng + ?Sized>(
    x: &SparseVector,
    y: &SparseVector,
    w: &SparseVector,
    budget: u64,
    delta: f64,
    rng: &mut R,
) -> Result<SparseVector> {
    let params = LocateParams::new(budget, delta)?;
    Locator::new(x, y)?.locate(w, &params, rng).map(|(z, _)| z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, Stream};
    use crate::vector::{cyclic_convolve_naive, subtract};

    fn sv(n: u64, pairs: &[(u64, i64)]) -> SparseVector {
        SparseVector::new(n, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn params_follow_the_repetition_schedule() {
        let p = LocateParams::new(16, 0.1).unwrap();
        assert_eq!(p.repetitions, 20);
        assert_eq!(p.prune_threshold, 15);
        let p = LocateParams::new(16, 0.5).unwrap();
        assert_eq!((p.repetitions, p.prune_threshold), (5, 4));
        assert_eq!(repetitions_for(0.999), 5);
        assert!(LocateParams::new(0, 0.1).is_err());
        assert!(LocateParams::new(4, 1.0).is_err());
        assert!(LocateParams::new(4, 0.0).is_err());
        assert_eq!(prime_limit(16, 2048, 1 << 16), 16 * 2048 * 256);
        assert_eq!(prime_limit(16, 1, 1), 16);
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(1 << 20), 20);
        assert_eq!(ceil_log2((1 << 20) + 1), 21);
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_index(Complex64::new(1.0, 0.0), 8), 0);
        assert_eq!(decode_index(omega_pow(5, 8), 8), 5);
        let n = 1 << 16;
        assert_eq!(decode_index(omega_pow(2 * n - 1, n), n), 2 * n - 1);
    }

    #[test]
    fn decode_small_and_odd_dimensions() {
        for n in [1u64, 2, 3, 5, 7, 12, 1000, 1001] {
            for j in 0..(2 * n).min(4000) {
                assert_eq!(decode_index(omega_pow(j, n), n), j, "n={n} j={j}");
            }
        }
    }

    #[test]
    fn decode_tolerates_perturbation() {
        let n = 1 << 20;
        for j in [0, 1, n / 2, n - 1, n, 3 * n / 2 + 7, 2 * n - 1] {
            let mut u = omega_pow(j, n) + Complex64::new(1e-9, -1e-9);
            u /= u.norm();
            assert_eq!(decode_index(u, n), j);
        }
    }

    #[test]
    fn angle_decode_agrees_with_ternary_search() {
        let mut rng = stream_rng(31, Stream::Generation);
        for n in [3u64, 5, 8, 1000, 1 << 12, (1 << 26) - 3] {
            for _ in 0..3000 {
                let j = rng.random_range(0..2 * n);
                // noise up to a third of the gap to the neighbouring roots
                let r = rng.random_range(0.0..1.0) * std::f64::consts::PI / (3.0 * n as f64);
                let a = rng.random_range(0.0..std::f64::consts::TAU);
                let scale = rng.random_range(0.5..4.0);
                let u = (omega_pow(j, n) + Complex64::from_polar(r, a)) * scale;
                assert_eq!(decode_index(u, n), j, "n={n} j={j}");
                assert_eq!(decode_index_ternary(u, n), j, "n={n} j={j}");
            }
        }
        for j in 0..1 << 13 {
            let u = omega_pow(j, 1 << 12);
            assert_eq!(decode_index_ternary(u, 1 << 12), j);
        }
    }

    #[test]
    fn decode_bucket_signs_and_rejections() {
        let n = 64;
        let b = omega_pow(7, n) * -3.0;
        assert_eq!(decode_bucket(b, 7 % 5, 5, n, 0.1), Some((7, -3)));
        assert_eq!(decode_bucket(b, 1, 5, n, 0.1), None, "wrong bucket");
        let two = omega_pow(7, n) * 2.0 + omega_pow(12, n);
        assert_eq!(decode_bucket(two, 2, 5, n, 0.1), None, "collision");
        assert_eq!(decode_bucket(Complex64::new(0.3, 0.0), 0, 5, n, 0.1), None);
    }

    #[test]
    fn zero_residual_gives_zero() {
        let x = sv(64, &[(0, 1), (3, 2), (9, -4)]);
        let y = sv(64, &[(1, 5), (20, 1)]);
        let w = cyclic_convolve_naive(&x, &y).unwrap();
        let mut rng = stream_rng(1, Stream::Locate);
        assert!(locate(&x, &y, &w, 16, 0.1, &mut rng).unwrap().is_zero());
    }

    #[test]
    fn negative_value_is_recovered() {
        let x = sv(16, &[(0, 1)]);
        let y = sv(16, &[(7, -3)]);
        let mut rng = stream_rng(2, Stream::Locate);
        let z = locate(&x, &y, &SparseVector::zero(16), 16, 0.1, &mut rng).unwrap();
        assert_eq!(z, sv(16, &[(7, -3)]));
    }

    #[test]
    fn too_many_occupied_buckets_return_zero() {
        // ten spread nonzeros with budget one: every prime sees more than one
        let n = 1 << 12;
        let x = sv(n, &[(0, 1)]);
        let y = sv(n, &(0..10).map(|k| (k * 97 + 5, 1 + k as i64)).collect::<Vec<_>>());
        let params = LocateParams::new(1, 0.1).unwrap();
        let mut locator = Locator::new(&x, &y).unwrap();
        let mut rng = stream_rng(3, Stream::Locate);
        let (z, report) = locator.locate(&SparseVector::zero(n), &params, &mut rng).unwrap();
        assert!(z.is_zero());
        assert!(report.overflow);
        assert_eq!(report.primes.len(), 1);
    }

    #[test]
    fn recovers_sparse_residual_with_real_hashing() {
        // N large enough that most primes are below N
        let n = 1 << 20;
        let x = sv(n, &[(0, 2), (1000, -1), (77_777, 3)]);
        let y = sv(n, &[(5, 1), (300_001, 4), (400_000, -2)]);
        let product = cyclic_convolve_naive(&x, &y).unwrap();
        let w = sv(n, &[(5, 2), (12345, 1)]);
        let residual = subtract(&product, &w).unwrap();
        let budget = ISOLATION_CONSTANT * residual.l0() as u64 + 1;
        let params = LocateParams::new(budget, 0.1).unwrap();
        assert!(params.prime_limit(n) < n);
        let mut locator = Locator::new(&x, &y).unwrap();
        let mut rng = stream_rng(4, Stream::Locate);
        let (z, report) = locator.locate(&w, &params, &mut rng).unwrap();
        assert_eq!(z, residual);
        assert!(report.primes.iter().all(|&p| p < n));
        assert!(z.l0() as u64 <= budget * params.repetitions as u64);
    }

    #[test]
    fn injective_memo_matches_hashed_path() {
        let n = 1 << 10;
        let x = sv(n, &[(0, 2), (10, -1), (300, 3)]);
        let y = sv(n, &[(5, 1), (200, 4), (511, -2)]);
        let w = sv(n, &[(5, 2), (15, -1), (1000, 9)]);
        let params = LocateParams::new(64, 0.5).unwrap();
        let mut locator = Locator::new(&x, &y).unwrap();
        let memo = locator.injective_rep(&w, &params).unwrap();
        let direct = locator.hashed_rep(&w, 1031, &params).unwrap();
        assert_eq!(memo.heavy_count, direct.heavy_count);
        assert_eq!(memo.pairs, direct.pairs);
        let residual = subtract(&cyclic_convolve_naive(&x, &y).unwrap(), &w).unwrap();
        assert_eq!(memo.pairs, residual.terms());
    }

    #[test]
    fn deterministic_given_seed() {
        let n = 1 << 16;
        let x = sv(n, &[(0, 1), (9, 2), (100, -3), (4000, 1)]);
        let y = sv(n, &[(1, 1), (50, -1), (30_000, 2)]);
        let params = LocateParams::new(64, 0.05).unwrap();
        let run = |seed| {
            let mut locator = Locator::new(&x, &y).unwrap();
            locator
                .locate(&SparseVector::zero(n), &params, &mut stream_rng(seed, Stream::Locate))
                .unwrap()
        };
        assert_eq!(run(9), run(9));
    }

    #[test]
    fn rejects_mismatched_and_wrapping_inputs() {
        let x = sv(8, &[(6, 1)]);
        let y = sv(8, &[(3, 1)]);
        assert!(matches!(Locator::new(&x, &y), Err(Error::WrapAround { .. })));
        let x = sv(8, &[(1, 1)]);
        let mut locator = Locator::new(&x, &x).unwrap();
        let params = LocateParams::new(4, 0.1).unwrap();
        let mut rng = stream_rng(0, Stream::Locate);
        assert!(locator.locate(&SparseVector::zero(16), &params, &mut rng).is_err());
    }
}
