//! The peeling loop and the outer sparsity-doubling loop.
//!
//! [`hash_and_iterate`] calls locate `⌈log₂B⌉` times with halving budgets,
//! adding every recovered vector into one running estimate `w`.
//! [`sparse_multiply`] zero-pads the operands, guesses `B_r = C·2^r` for
//! `r = 1, 2, …` and returns the first estimate the fingerprint test accepts.

use log::{debug, warn};
use rand::Rng;

use crate::error::{Error, Result};
use crate::fingerprint::{equality_test, Verdict};
use crate::locate::{ceil_log2, LocateParams, LocateReport, Locator, ISOLATION_CONSTANT};
use crate::numtheory::{PrimeSource, DEFAULT_SIEVE_CAP};
use crate::rng::{stream_rng, Stream};
use crate::vector::{cyclic_convolve_naive, dense_fft_multiply, Envelope, SparseVector};

#[derive(Debug, Clone, PartialEq)]
pub struct AlgoParams {
    /// `C`.
    pub isolation_constant: u64,
    /// `c`: outer round `r` may fail with probability `c / r²`.
    pub outer_failure: f64,
    /// `q`, the per-index isolation failure probability. Informational.
    pub isolation_failure: f64,
    /// `γ = 2 / (C²·q)`. Informational.
    pub gamma: f64,
    pub envelope: Envelope,
    pub sieve_cap: u64,
    /// Overrides the `⌈log₂N⌉ + 2` outer round cap.
    pub max_outer_rounds: Option<u32>,
}

impl Default for AlgoParams {
    fn default() -> Self {
        Self {
            isolation_constant: ISOLATION_CONSTANT,
            outer_failure: 1.0 / 400.0,
            isolation_failure: 1.0 / 8.0,
            gamma: 1.0 / 16.0,
            envelope: Envelope::default(),
            sieve_cap: DEFAULT_SIEVE_CAP,
            max_outer_rounds: None,
        }
    }
}

impl AlgoParams {
    pub fn outer_rounds_for(&self, n: u64) -> u32 {
        self.max_outer_rounds
            .unwrap_or(ceil_log2(n) as u32 + 2)
    }

    /// `(B_r, δ_r) = (C·2^r, c/r²)`.
    pub fn outer_schedule(&self, r: u32) -> (u64, f64) {
        let budget = self
            .isolation_constant
            .saturating_mul(1u64.checked_shl(r).unwrap_or(u64::MAX));
        (budget, self.outer_failure / (r as f64 * r as f64))
    }
}

/// `(rounds, per-round delta)` of the peeling loop for budget `B`.
pub fn peeling_schedule(budget: u64, delta: f64) -> (u32, f64) {
    let rounds = ceil_log2(budget).max(1) as u32;
    (rounds, delta / rounds as f64)
}

/// One inner round of [`hash_and_iterate_traced`].
#[derive(Debug, Clone, PartialEq)]
pub struct PeelRound {
    pub budget: u64,
    pub delta: f64,
    pub recovered: SparseVector,
    /// `w` after adding `recovered`.
    pub estimate: SparseVector,
    pub locate: LocateReport,
}

/// Peeling on a prepared [`Locator`], recording every round.
///
/// Errors that only arise from a corrupt estimate (precision or overflow)
/// end the loop early and return the estimate so far; the caller verifies.
pub fn hash_and_iterate_traced<R: Rng + ?Sized>(
    locator: &mut Locator<'_>,
    budget: u64,
    delta: f64,
    isolation_constant: u64,
    rng: &mut R,
) -> Result<(SparseVector, Vec<PeelRound>)> {
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be positive".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta {delta} not in (0, 1)")));
    }
    let (rounds, round_delta) = peeling_schedule(budget, delta);
    let mut w = SparseVector::zero(locator.dim());
    let mut trace = Vec::with_capacity(rounds as usize);
    for r in 1..=rounds {
        let round_budget = budget.div_ceil(1u64 << (r - 1).min(63));
        let params =
            LocateParams::new(round_budget, round_delta)?.with_isolation_constant(isolation_constant);
        let (z, report) = match locator.locate(&w, &params, rng) {
            Ok(out) => out,
            Err(e @ (Error::Precision { .. } | Error::Overflow(_))) => {
                warn!("peeling stopped in round {r}: {e}");
                break;
            }
            Err(e) => return Err(e),
        };
        w = match w.add(&z) {
            Ok(sum) => sum,
            Err(e @ Error::Overflow(_)) => {
                warn!("peeling stopped in round {r}: {e}");
                break;
            }
            Err(e) => return Err(e),
        };
        trace.push(PeelRound {
            budget: round_budget,
            delta: round_delta,
            recovered: z,
            estimate: w.clone(),
            locate: report,
        });
    }
    Ok((w, trace))
}

/// Recovers `x ⋆ y` when `B` exceeds `C·l0(x ⋆ y)`, with probability at
/// least `1 − delta`. Smaller budgets still return some vector.
pub fn hash_and_iterate<R: Rng + ?Sized>(
    x: &SparseVector,
    y: &SparseVector,
    budget: u64,
    delta: f64,
    rng: &mut R,
) -> Result<SparseVector> {
    let mut locator = Locator::new(x, y)?;
    hash_and_iterate_traced(&mut locator, budget, delta, ISOLATION_CONSTANT, rng).map(|(w, _)| w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplyReport {
    /// The product over `[0, 2n)`.
    pub product: SparseVector,
    /// Outer rounds run, including the accepted one.
    pub outer_rounds: u32,
    /// Every prime drawn by locate, in order.
    pub locate_primes: Vec<u64>,
}

/// Multiplies two polynomials given as coefficient vectors over `[0, n)`,
/// returning the product over `[0, 2n)`. Deterministic in `seed`.
///
/// Fails with [`Error::RoundsExhausted`] rather than return an unverified
/// vector.
pub fn sparse_multiply(u: &SparseVector, v: &SparseVector, seed: u64) -> Result<SparseVector> {
    sparse_multiply_with(u, v, seed, &AlgoParams::default()).map(|r| r.product)
}

pub fn sparse_multiply_with(
    u: &SparseVector,
    v: &SparseVector,
    seed: u64,
    params: &AlgoParams,
) -> Result<MultiplyReport> {
    let (x, y) = pad_operands(u, v, &params.envelope)?;
    let n = x.dim();
    if u.is_zero() || v.is_zero() {
        return Ok(MultiplyReport {
            product: SparseVector::zero(n),
            outer_rounds: 0,
            locate_primes: Vec::new(),
        });
    }
    let most_terms = (u.l0() as u64).saturating_mul(v.l0() as u64).min(n);
    let mut locate_rng = stream_rng(seed, Stream::Locate);
    let mut check_rng = stream_rng(seed, Stream::Fingerprint);
    let mut locator = Locator::with_prime_source(&x, &y, PrimeSource::new(params.sieve_cap))?;
    let mut primes = Vec::new();
    let rounds = params.outer_rounds_for(n);
    for r in 1..=rounds {
        let (budget, delta) = params.outer_schedule(r);
        let (z, trace) = hash_and_iterate_traced(
            &mut locator,
            budget,
            delta,
            params.isolation_constant,
            &mut locate_rng,
        )?;
        primes.extend(trace.iter().flat_map(|t| t.locate.primes.iter().copied()));
        debug!("outer round {r}: B = {budget}, l0(z) = {}", z.l0());
        // a product never has more terms than this, so skip the test
        if z.l0() as u64 > most_terms {
            continue;
        }
        if equality_test(&x, &y, &z, delta, &mut check_rng)? == Verdict::Yes {
            return Ok(MultiplyReport {
                product: z,
                outer_rounds: r,
                locate_primes: primes,
            });
        }
    }
    Err(Error::RoundsExhausted { rounds })
}

fn pad_operands(
    u: &SparseVector,
    v: &SparseVector,
    envelope: &Envelope,
) -> Result<(SparseVector, SparseVector)> {
    if u.dim() != v.dim() {
        return Err(Error::LengthMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    envelope.check_operand(u)?;
    envelope.check_operand(v)?;
    let n = u
        .dim()
        .checked_mul(2)
        .ok_or_else(|| Error::Envelope(format!("length {} too large to pad", u.dim())))?;
    envelope.check_dimension(n)?;
    Ok((u.zero_pad(n)?, v.zero_pad(n)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Naive,
    Dense,
    Sparse,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Naive, Backend::Dense, Backend::Sparse];

    pub fn name(self) -> &'static str {
        match self {
            Backend::Naive => "naive",
            Backend::Dense => "dense",
            Backend::Sparse => "sparse",
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Backend::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown backend {s:?}")))
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Polynomial product over `[0, 2n)` with the chosen backend. `seed` only
/// matters for [`Backend::Sparse`].
pub fn multiply_polynomials(
    u: &SparseVector,
    v: &SparseVector,
    backend: Backend,
    seed: u64,
    params: &AlgoParams,
) -> Result<SparseVector> {
    match backend {
        Backend::Naive => {
            let (x, y) = pad_operands(u, v, &params.envelope)?;
            cyclic_convolve_naive(&x, &y)
        }
        Backend::Dense => {
            let (x, y) = pad_operands(u, v, &params.envelope)?;
            dense_fft_multiply(&x, &y)
        }
        Backend::Sparse => sparse_multiply_with(u, v, seed, params).map(|r| r.product),
    }
}
