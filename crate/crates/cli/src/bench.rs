//! Timing runs emitted as newline-delimited JSON.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use sparseconv::{multiply_polynomials, AlgoParams, Backend, Error, SparseVector};

use crate::instance::{gen_instance, InstanceSpec};

/// One timed multiplication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub algo: String,
    pub n: u64,
    /// Nonzeros of both operands together.
    pub s_in: u64,
    /// Nonzeros of the product; 0 when the run failed.
    pub k_out: u64,
    pub wall_millis: f64,
    pub seed: u64,
    pub success: bool,
}

impl BenchRecord {
    /// The record with its timing zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_millis: 0.0,
            ..self.clone()
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("plain record serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub n: u64,
    pub terms: u64,
    pub coeff_bound: i64,
    pub cancel_fraction: f64,
    pub algos: Vec<Backend>,
    pub repeats: u32,
    pub seed: u64,
}

/// Seed of repeat `r`; repeat 0 uses the base seed itself.
pub fn repeat_seed(seed: u64, r: u32) -> u64 {
    seed.wrapping_add(r as u64)
}

/// Times one multiplication. A sparse-backend failure to certify a product
/// becomes `success = false`; anything else is an error.
pub fn time_multiply(
    u: &SparseVector,
    v: &SparseVector,
    algo: Backend,
    seed: u64,
    params: &AlgoParams,
) -> Result<(BenchRecord, Option<SparseVector>), Error> {
    let start = Instant::now();
    let result = multiply_polynomials(u, v, algo, seed, params);
    let wall_millis = start.elapsed().as_secs_f64() * 1e3;
    let product = match result {
        Ok(p) => Some(p),
        Err(Error::RoundsExhausted { .. }) => None,
        Err(e) => return Err(e),
    };
    let record = BenchRecord {
        algo: algo.name().to_string(),
        n: u.dim(),
        s_in: (u.l0() + v.l0()) as u64,
        k_out: product.as_ref().map_or(0, |p| p.l0() as u64),
        wall_millis,
        seed,
        success: product.is_some(),
    };
    Ok((record, product))
}

/// Runs every backend on `repeats` generated instances, in order.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRecord>, Error> {
    let params = AlgoParams::default();
    let mut records = Vec::with_capacity(config.algos.len() * config.repeats as usize);
    for r in 0..config.repeats {
        let seed = repeat_seed(config.seed, r);
        let (u, v) = gen_instance(&InstanceSpec {
            n: config.n,
            terms: config.terms,
            coeff_bound: config.coeff_bound,
            cancel_fraction: config.cancel_fraction,
            seed,
        })?;
        for &algo in &config.algos {
            records.push(time_multiply(&u, &v, algo, seed, &params)?.0);
        }
    }
    Ok(records)
}
