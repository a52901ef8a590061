mod common;

use ae_spectra::linalg::{eigenvalues, hessenberg, Matrix, Spectrum, PAIRING_TOL};
use common::{char_poly, gaussian_matrix, poly_roots, random_orthogonal, uniform_matrix};
use proptest::prelude::*;

#[test]
fn char_poly_oracle_on_hand_case() {
    let a = Matrix::from_rows(&[&[2.0, 1.0], &[1.0, 3.0]]).unwrap();
    assert_eq!(char_poly(&a), vec![5.0, -5.0, 1.0]);
    let mut roots: Vec<f64> = poly_roots(&char_poly(&a)).iter().map(|z| z.re).collect();
    roots.sort_by(f64::total_cmp);
    let s5 = 5f64.sqrt();
    assert!((roots[0] - (5.0 - s5) / 2.0).abs() < 1e-14);
    assert!((roots[1] - (5.0 + s5) / 2.0).abs() < 1e-14);
}

#[test]
fn matches_char_poly_roots_for_small_orders() {
    let mut worst = 0.0f64;
    for case in 0..1000u64 {
        let n = 1 + (case % 4) as usize;
        let a = uniform_matrix(n, n, case);
        let oracle = Spectrum::new(poly_roots(&char_poly(&a)));
        let got = eigenvalues(&a).unwrap();
        worst = worst.max(got.matching_error(&oracle).unwrap());
    }
    assert!(worst < 1e-7, "worst error {worst:e}");
}

#[test]
fn trace_and_determinant_consistency() {
    for n in 2..=20usize {
        for seed in 0..100u64 {
            let a = uniform_matrix(n, n, 1000 * n as u64 + seed);
            let s = eigenvalues(&a).unwrap();
            assert_eq!(s.len(), n);
            let tr = a.trace().unwrap();
            let sum = s.sum();
            assert!((sum.re - tr).abs() <= 1e-8 * (1.0 + tr.abs()), "n={n} seed={seed}");
            assert!(sum.im.abs() <= 1e-8 * (1.0 + tr.abs()));
            if n <= 6 {
                let det = a.determinant().unwrap();
                let prod = s.product();
                assert!(
                    (prod.re - det).abs() <= 1e-6 * det.abs().max(1e-12) + 1e-14,
                    "n={n} seed={seed} det={det} prod={prod}"
                );
                assert!(prod.im.abs() <= 1e-6 * det.abs().max(1e-12) + 1e-14);
            }
        }
    }
}

#[test]
fn similarity_invariance_up_to_order_64() {
    for (i, n) in [2usize, 3, 5, 8, 13, 21, 34, 50, 64].into_iter().enumerate() {
        let a = uniform_matrix(n, n, 500 + i as u64);
        let q = random_orthogonal(n, 900 + i as u64);
        let qtq = q.transpose().matmul(&q).unwrap();
        assert!(qtq.max_abs_diff(&Matrix::identity(n)).unwrap() < 1e-12);
        let b = q.transpose().matmul(&a).unwrap().matmul(&q).unwrap();
        let err = eigenvalues(&a)
            .unwrap()
            .matching_error(&eigenvalues(&b).unwrap())
            .unwrap();
        assert!(err < 1e-8, "n={n} err={err:e}");
    }
}

#[test]
fn triangular_spectrum_is_the_diagonal() {
    let mut a = uniform_matrix(12, 12, 4);
    for i in 0..12 {
        for j in 0..i {
            a.as_mut_slice()[i * 12 + j] = 0.0;
        }
    }
    let diag = Spectrum::from_pairs(&(0..12).map(|i| (a[(i, i)], 0.0)).collect::<Vec<_>>());
    let err = eigenvalues(&a).unwrap().matching_error(&diag).unwrap();
    assert!(err <= 1e-12, "{err:e}");
}

#[test]
fn ab_and_ba_share_nonzero_spectra() {
    for case in 0..100u64 {
        let n = 2 + (case % 7) as usize;
        let m = n + 1 + (case % 11) as usize;
        let a = uniform_matrix(n, m, 2 * case);
        let b = uniform_matrix(m, n, 2 * case + 1);
        let ab = eigenvalues(&a.matmul(&b).unwrap()).unwrap();
        let ba = eigenvalues(&b.matmul(&a).unwrap()).unwrap();
        let mut by_modulus = ba.values().to_vec();
        by_modulus.sort_by(|x, y| y.norm().total_cmp(&x.norm()));
        let leading = Spectrum::new(by_modulus[..n].to_vec());
        let err = ab.matching_error(&leading).unwrap();
        assert!(err < 1e-8, "case {case}: {err:e}");
        for z in &by_modulus[n..] {
            assert!(z.norm() < 1e-8, "case {case}: spurious {z}");
        }
    }
}

#[test]
fn scaling_by_inverse_root_three() {
    let a = uniform_matrix(8, 8, 31);
    let alpha = 1.0 / 3f64.sqrt();
    let before = eigenvalues(&a).unwrap();
    let after = eigenvalues(&a.scale(alpha)).unwrap();
    assert!(after.matching_error(&before.scaled(alpha)).unwrap() < 1e-9);
    let mut m0: Vec<f64> = before.moduli().collect();
    let mut m1: Vec<f64> = after.moduli().collect();
    m0.sort_by(f64::total_cmp);
    m1.sort_by(f64::total_cmp);
    for (x, y) in m0.iter().zip(&m1) {
        assert!((x * alpha - y).abs() < 1e-9);
    }
}

#[test]
fn hessenberg_form_keeps_the_spectrum() {
    let a = uniform_matrix(6, 6, 8);
    let h = hessenberg(&a).unwrap();
    assert!(h.is_upper_hessenberg());
    let err = eigenvalues(&a)
        .unwrap()
        .matching_error(&eigenvalues(&h).unwrap())
        .unwrap();
    assert!(err < 1e-9);
    assert!((h.frobenius_norm() - a.frobenius_norm()).abs() < 1e-12);

    let already = hessenberg(&h).unwrap();
    assert!(already.is_upper_hessenberg());
    for i in 0..5 {
        assert!(already[(i + 1, i)].abs() > 0.0);
    }
}

#[test]
fn large_gaussian_matrix_converges() {
    let n = 300;
    let a = gaussian_matrix(n, n, 5).scale(1.0 / (n as f64).sqrt());
    let s = eigenvalues(&a).unwrap();
    assert_eq!(s.len(), n);
    assert!(s.has_conjugate_closure(PAIRING_TOL));
    assert!((s.sum().re - a.trace().unwrap()).abs() < 1e-8 * (1.0 + a.trace().unwrap().abs()));
}

#[test]
fn defective_and_repeated_cases() {
    let jordan = Matrix::from_rows(&[&[2.0, 1.0, 0.0], &[0.0, 2.0, 1.0], &[0.0, 0.0, 2.0]]).unwrap();
    let s = eigenvalues(&jordan).unwrap();
    assert!(s.values().iter().all(|z| (z.re - 2.0).abs() < 1e-12 && z.im == 0.0));

    let zero = Matrix::zeros(5, 5);
    assert!(eigenvalues(&zero).unwrap().values().iter().all(|z| z.norm() == 0.0));

    // companion matrix of x⁴ − 1
    let mut c = Matrix::zeros(4, 4);
    for i in 1..4 {
        c.as_mut_slice()[i * 4 + i - 1] = 1.0;
    }
    c.as_mut_slice()[3] = 1.0;
    let expected = Spectrum::from_pairs(&[(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)]);
    assert!(eigenvalues(&c).unwrap().matching_error(&expected).unwrap() < 1e-12);
}

fn arb_matrix(max: usize) -> impl Strategy<Value = Matrix> {
    (1..=max).prop_flat_map(|n| {
        proptest::collection::vec(-10.0f64..10.0, n * n)
            .prop_map(move |v| Matrix::from_vec(n, n, v).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spectra_are_conjugate_closed(a in arb_matrix(24)) {
        let s = eigenvalues(&a).unwrap();
        prop_assert_eq!(s.len(), a.rows());
        prop_assert!(s.has_conjugate_closure(PAIRING_TOL));
    }

    #[test]
    fn trace_matches_sum(a in arb_matrix(16)) {
        let s = eigenvalues(&a).unwrap();
        let tr = a.trace().unwrap();
        let scale = 1.0 + a.frobenius_norm();
        prop_assert!((s.sum().re - tr).abs() <= 1e-8 * scale * (1.0 + tr.abs()));
    }

    #[test]
    fn transpose_has_the_same_spectrum(a in arb_matrix(10)) {
        let s = eigenvalues(&a).unwrap();
        let t = eigenvalues(&a.transpose()).unwrap();
        let scale = 1.0 + a.frobenius_norm();
        prop_assert!(s.matching_error(&t).unwrap() <= 1e-6 * scale);
    }

    #[test]
    fn matmul_transpose_identity(seed in any::<u64>(), r in 1usize..8, k in 1usize..8, c in 1usize..8) {
        let a = uniform_matrix(r, k, seed);
        let b = uniform_matrix(k, c, seed ^ 1);
        let lhs = a.matmul(&b).unwrap().transpose();
        let rhs = b.transpose().matmul(&a.transpose()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12);
    }
}
