mod common;

use common::{multiset_matches, random_poly, rng};
use proptest::prelude::*;
use ringfft_core::ring::{
    fft_inplace, fft_ref, ifft_inplace, ifft_ref, omega, pointwise_op, polymul_negacyclic_oracle,
    polymul_via_fft, PointwiseOp,
};
use ringfft_core::{ComplexWord, Polynomial, Spectrum, SpectrumOrder};

/// Full-size inverse over all `n` roots, without the conjugate pairing.
fn ifft_full_oracle(values: &[ComplexWord]) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|j| {
            let sum = values
                .iter()
                .enumerate()
                .fold(ComplexWord::ZERO, |acc, (k, v)| {
                    let r = omega(k, n).unwrap();
                    let mut p = ComplexWord::ONE;
                    for _ in 0..j {
                        p = p * r.conj();
                    }
                    acc + *v * p
                });
            sum.re / n as f64
        })
        .collect()
}

fn sizes() -> impl Strategy<Value = usize> {
    (1u32..=10).prop_map(|l| 1usize << l)
}

fn poly_strategy(scale: f64) -> impl Strategy<Value = Polynomial> {
    sizes().prop_flat_map(move |n| {
        proptest::collection::vec(-scale..=scale, n).prop_map(|c| Polynomial::new(c).unwrap())
    })
}

#[test]
fn ifft_ref_matches_full_size_inverse() {
    let mut r = rng(11);
    let a = random_poly(&mut r, 8, 1.0);
    let full = Spectrum::new(fft_ref(&a).values().to_vec(), SpectrumOrder::NaturalEval)
        .unwrap()
        .full_evaluation();
    let oracle = ifft_full_oracle(&full);
    let half = ifft_ref(&fft_ref(&a)).unwrap();
    for ((x, y), z) in half.coeffs().iter().zip(&oracle).zip(a.coeffs()) {
        assert!((x - y).abs() < 1e-12);
        assert!((x - z).abs() < 1e-12);
    }
}

#[test]
fn multiset_example_size_eight() {
    let a = Polynomial::new((1..=8).map(f64::from).collect()).unwrap();
    let fast = fft_inplace(&a).full_evaluation();
    let slow = fft_ref(&a).full_evaluation();
    assert!(multiset_matches(&fast, &slow, 1e-12));
}

#[test]
fn round_trip_large_scale() {
    let mut r = rng(5);
    let a = random_poly(&mut r, 1024, 1000.0);
    let back = ifft_inplace(&fft_inplace(&a)).unwrap();
    assert!(back.max_abs_diff(&a).unwrap() <= 1e-9 * a.max_abs());
}

#[test]
fn division_inverts_multiplication() {
    let mut r = rng(9);
    let s = fft_inplace(&random_poly(&mut r, 64, 1.0));
    let t = fft_inplace(&random_poly(&mut r, 64, 1.0));
    let q = pointwise_op(
        &pointwise_op(&s, &t, PointwiseOp::Mul).unwrap(),
        &t,
        PointwiseOp::Div,
    )
    .unwrap();
    assert!(q.max_abs_diff(&s).unwrap() <= 1e-12);
}

#[test]
fn convolution_at_512() {
    let mut r = rng(512);
    let a = random_poly(&mut r, 512, 1.0);
    let b = random_poly(&mut r, 512, 1.0);
    let fast = polymul_via_fft(&a, &b).unwrap();
    let slow = polymul_negacyclic_oracle(&a, &b).unwrap();
    assert!(fast.max_abs_diff(&slow).unwrap() <= 1e-9 * 512.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip(a in poly_strategy(1000.0)) {
        let back = ifft_inplace(&fft_inplace(&a)).unwrap();
        prop_assert!(back.max_abs_diff(&a).unwrap() <= 1e-9 * a.max_abs().max(1.0));
    }

    #[test]
    fn reference_round_trip(a in poly_strategy(1.0).prop_filter("oracle cost", |a| a.len() <= 256)) {
        let back = ifft_ref(&fft_ref(&a)).unwrap();
        prop_assert!(back.max_abs_diff(&a).unwrap() <= 1e-9);
    }

    #[test]
    fn slots_follow_root_map(a in poly_strategy(10.0).prop_filter("oracle cost", |a| a.len() <= 256)) {
        let tol = 1e-9 * a.max_abs().max(1.0);
        let natural = fft_inplace(&a).to_natural();
        prop_assert!(natural.max_abs_diff(&fft_ref(&a)).unwrap() <= tol);
    }

    #[test]
    fn multiset_equivalence(a in poly_strategy(10.0).prop_filter("oracle cost", |a| a.len() <= 128)) {
        let tol = 1e-9 * a.max_abs().max(1.0);
        prop_assert!(multiset_matches(
            &fft_inplace(&a).full_evaluation(),
            &fft_ref(&a).full_evaluation(),
            tol
        ));
    }

    #[test]
    fn linearity(
        (a, b) in sizes().prop_flat_map(|n| (
            proptest::collection::vec(-1.0..=1.0f64, n),
            proptest::collection::vec(-1.0..=1.0f64, n),
        )),
        alpha in -10.0..10.0f64,
        beta in -10.0..10.0f64,
    ) {
        let a = Polynomial::new(a).unwrap();
        let b = Polynomial::new(b).unwrap();
        let lhs = fft_inplace(&a.lin_comb(alpha, &b, beta).unwrap());
        let (sa, sb) = (fft_inplace(&a), fft_inplace(&b));
        let rhs: Vec<ComplexWord> = sa.values().iter().zip(sb.values())
            .map(|(x, y)| x.scale(alpha) + y.scale(beta))
            .collect();
        let scale = rhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (x, y) in lhs.values().iter().zip(&rhs) {
            prop_assert!(x.max_abs_diff(*y) <= 1e-9 * scale);
        }
    }

    #[test]
    fn convolution_theorem(
        (a, b) in (1u32..=6).prop_flat_map(|l| {
            let n = 1usize << l;
            (
                proptest::collection::vec(-1.0..=1.0f64, n),
                proptest::collection::vec(-1.0..=1.0f64, n),
            )
        })
    ) {
        let a = Polynomial::new(a).unwrap();
        let b = Polynomial::new(b).unwrap();
        let n = a.len() as f64;
        let fast = polymul_via_fft(&a, &b).unwrap();
        let slow = polymul_negacyclic_oracle(&a, &b).unwrap();
        prop_assert!(fast.max_abs_diff(&slow).unwrap() <= 1e-9 * n);
    }

    #[test]
    fn natural_conversion_round_trip(a in poly_strategy(5.0)) {
        let s = fft_inplace(&a);
        prop_assert_eq!(Spectrum::from_natural(&s.to_natural()), s);
    }
}
