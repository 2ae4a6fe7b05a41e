use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use sparseconv::fingerprint::eval_sparse_poly_mod;
use sparseconv::rng::{stream_rng, Stream};
use sparseconv::{
    cyclic_convolve_naive, decode_index, dense_fft_multiply, equality_test, fold,
    folded_residual, hash_and_iterate, root_of_unity_power, sparse_multiply, subtract,
    SparseVector, Verdict,
};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// A vector of length `2^log_n` with up to `max_terms` terms.
fn vector(log_n: u32, max_terms: usize, bound: i64) -> impl Strategy<Value = SparseVector> {
    let n = 1u64 << log_n;
    prop::collection::vec((0..n, -bound..=bound), 0..=max_terms)
        .prop_map(move |pairs| SparseVector::new(n, pairs).unwrap())
}

/// Two operands of length `n` padded to `2n`.
fn padded_pair(max_terms: usize) -> impl Strategy<Value = (SparseVector, SparseVector)> {
    (3u32..=11).prop_flat_map(move |log_n| {
        (vector(log_n, max_terms, 100), vector(log_n, max_terms, 100)).prop_map(move |(u, v)| {
            let n = 2 << log_n;
            (u.zero_pad(n).unwrap(), v.zero_pad(n).unwrap())
        })
    })
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn canonical_form_holds(v in vector(8, 40, 5)) {
        let terms = v.terms();
        prop_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        prop_assert!(terms.iter().all(|&(i, c)| c != 0 && i < v.dim()));
        prop_assert!(v.l0() as u64 <= v.dim());
    }

    #[test]
    fn convolution_commutes_and_dense_agrees((x, y) in padded_pair(24)) {
        let xy = cyclic_convolve_naive(&x, &y).unwrap();
        prop_assert_eq!(&xy, &cyclic_convolve_naive(&y, &x).unwrap());
        prop_assert_eq!(&xy, &dense_fft_multiply(&x, &y).unwrap());
        prop_assert!(xy.l0() <= x.l0() * y.l0());
    }

    #[test]
    fn subtract_then_add_restores((x, y) in padded_pair(24)) {
        prop_assert_eq!(subtract(&x, &y).unwrap().add(&y).unwrap(), x.clone());
        prop_assert!(subtract(&x, &x).unwrap().is_zero());
    }

    #[test]
    fn fold_matches_definition(v in vector(10, 30, 1000), m in 2u64..200) {
        let f = fold(&v, m).unwrap();
        prop_assert_eq!(f.buckets().len() as u64, m);
        for (b, bucket) in f.buckets().iter().enumerate() {
            let direct: sparseconv::fold::Complex64 = v
                .terms()
                .iter()
                .filter(|&&(j, _)| j % m == b as u64)
                .map(|&(j, c)| root_of_unity_power(j, v.dim()).unwrap() * c as f64)
                .sum();
            prop_assert!((bucket - direct).norm() <= 1e-9 * (1.0 + v.l1_norm()));
        }
    }

    #[test]
    fn folded_product_is_fold_of_product((x, y) in padded_pair(32), p in 2u64..500) {
        let exact = fold(&cyclic_convolve_naive(&x, &y).unwrap(), p).unwrap();
        let got = folded_residual(&x, &y, &SparseVector::zero(x.dim()), p).unwrap();
        for (a, b) in got.buckets().iter().zip(exact.buckets()) {
            prop_assert!((a - b).norm() <= 1e-4);
        }
    }

    #[test]
    fn decode_inverts_encoding(log_n in 0u32..=26, frac in 0.0f64..1.0) {
        let n = 1u64 << log_n;
        let j = ((2 * n) as f64 * frac) as u64 % (2 * n);
        prop_assert_eq!(decode_index(root_of_unity_power(j, n).unwrap(), n), j);
    }

    #[test]
    fn decode_tolerates_small_noise(j in 0u64..(1 << 17), angle in 0.0f64..6.3, r in 0.0f64..1.0) {
        let n = 1u64 << 16;
        // well inside half the gap between neighbouring roots
        let eps = 0.2 * r * std::f64::consts::PI / n as f64;
        let noise = sparseconv::fold::Complex64::from_polar(eps, angle);
        prop_assert_eq!(decode_index(root_of_unity_power(j, n).unwrap() + noise, n), j);
    }

    #[test]
    fn evaluation_is_a_ring_map((x, y) in padded_pair(16), point in 0u64..1_000_003) {
        let p = 1_000_003;
        let w = cyclic_convolve_naive(&x, &y).unwrap();
        let lhs = eval_sparse_poly_mod(&x, point, p).unwrap() as u128
            * eval_sparse_poly_mod(&y, point, p).unwrap() as u128
            % p as u128;
        prop_assert_eq!(lhs as u64, eval_sparse_poly_mod(&w, point, p).unwrap());
    }

    #[test]
    fn fingerprint_is_complete((x, y) in padded_pair(24), seed in any::<u64>()) {
        let w = cyclic_convolve_naive(&x, &y).unwrap();
        let mut rng = stream_rng(seed, Stream::Fingerprint);
        prop_assert_eq!(equality_test(&x, &y, &w, 0.1, &mut rng), Ok(Verdict::Yes));
    }

    #[test]
    fn fingerprint_rejects_constant_offset((x, y) in padded_pair(16), seed in any::<u64>(), d in 1i64..50) {
        let w = cyclic_convolve_naive(&x, &y).unwrap();
        let bad = w.add(&SparseVector::new(w.dim(), [(0, d)]).unwrap()).unwrap();
        prop_assume!(bad != w);
        let mut rng = stream_rng(seed, Stream::Fingerprint);
        // a nonzero constant below every candidate prime never vanishes
        prop_assert_eq!(equality_test(&x, &y, &bad, 0.1, &mut rng), Ok(Verdict::No));
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn peeling_never_invents_large_errors((x, y) in padded_pair(12), seed in any::<u64>()) {
        let want = cyclic_convolve_naive(&x, &y).unwrap();
        let budget = 16 * want.l0().max(1) as u64;
        let mut rng = stream_rng(seed, Stream::Locate);
        let got = hash_and_iterate(&x, &y, budget, 0.1, &mut rng).unwrap();
        // a budget this large leaves at most a few stray terms
        prop_assert!(subtract(&got, &want).unwrap().l0() <= want.l0() / 2 + 1);
    }

    #[test]
    fn sparse_multiply_is_exact_or_fails_loudly(
        log_n in 3u32..=10,
        seed in any::<u64>(),
        terms in prop::collection::vec((any::<u64>(), -100i64..=100), 0..40),
    ) {
        let n = 1u64 << log_n;
        let half = terms.len() / 2;
        let u = SparseVector::new(n, terms[..half].iter().map(|&(i, c)| (i % n, c))).unwrap();
        let v = SparseVector::new(n, terms[half..].iter().map(|&(i, c)| (i % n, c))).unwrap();
        let want = cyclic_convolve_naive(&u.zero_pad(2 * n).unwrap(), &v.zero_pad(2 * n).unwrap()).unwrap();
        match sparse_multiply(&u, &v, seed) {
            Ok(got) => prop_assert_eq!(got, want),
            Err(e) => prop_assert!(matches!(e, sparseconv::Error::RoundsExhausted { .. }), "{e}"),
        }
    }

    #[test]
    fn sparse_multiply_is_deterministic((x, y) in padded_pair(16), seed in any::<u64>()) {
        let n = x.dim() / 2;
        let trim = |v: &SparseVector| SparseVector::new(n, v.terms().iter().copied()).unwrap();
        let (u, v) = (trim(&x), trim(&y));
        prop_assert_eq!(sparse_multiply(&u, &v, seed), sparse_multiply(&u, &v, seed));
    }
}
