use irs_chanest::numerics::{
    circular_convolve, cyclic_shift, dft_matrix, first_columns, linear_convolve, ls_solve,
    pseudo_inverse, right_ls_solve, LeastSquares,
};
use irs_chanest::{ComplexMatrix, Error};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

fn rand_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| irs_chanest::channel::complex_gaussian(rng, 1.0))
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn dft_is_unitary() {
    for n in [1, 2, 4, 8, 16, 128] {
        let f = dft_matrix(n).unwrap();
        let gram = f.adjoint().matmul(&f).unwrap();
        assert!(gram.distance_from_scaled_identity(1.0) < 1e-12 * n as f64, "n = {n}");
    }
}

#[test]
fn truncated_dft_has_orthonormal_columns() {
    let f = first_columns(&dft_matrix(8).unwrap(), 3).unwrap();
    assert_eq!((f.rows(), f.cols()), (8, 3));
    let gram = f.adjoint().matmul(&f).unwrap();
    assert!(gram.distance_from_scaled_identity(1.0) < 1e-14);
}

#[test]
fn dft_matches_rustfft() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x: Vec<Complex64> = rand_matrix(16, 1, &mut rng).column(0);
    let ours = dft_matrix(16).unwrap().mul_vec(&x).unwrap();
    let mut buf = x.clone();
    FftPlanner::new().plan_fft_forward(16).process(&mut buf);
    let scaled: Vec<Complex64> = buf.iter().map(|v| v / 4.0).collect();
    assert!(max_diff(&ours, &scaled) < 1e-12);
}

fn fft_circular(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let pad = |v: &[Complex64]| {
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        out[..v.len()].copy_from_slice(v);
        out
    };
    let (mut fa, mut fb) = (pad(a), pad(b));
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    let mut prod: Vec<Complex64> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
    inv.process(&mut prod);
    prod.iter().map(|v| v / n as f64).collect()
}

#[test]
fn linear_convolution_matches_fft() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = rand_matrix(7, 1, &mut rng).column(0);
    let b = rand_matrix(2, 1, &mut rng).column(0);
    let ours = linear_convolve(&a, &b).unwrap();
    assert_eq!(ours.len(), 8);
    assert!(max_diff(&ours, &fft_circular(&a, &b, 8)) < 1e-12);
}

#[test]
fn circular_convolution_matches_fft() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = rand_matrix(16, 1, &mut rng).column(0);
    let h = rand_matrix(5, 1, &mut rng).column(0);
    let ours = circular_convolve(&x, &h).unwrap();
    assert!(max_diff(&ours, &fft_circular(&x, &h, 16)) < 1e-12);
}

#[test]
fn tall_ls_recovers_planted_solution() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = rand_matrix(6, 3, &mut rng);
    let x = rand_matrix(3, 2, &mut rng);
    let b = a.matmul(&x).unwrap();
    let got = ls_solve(&a, &b).unwrap();
    assert!(got.sub(&x).unwrap().max_abs() < 1e-12);

    // inconsistent right-hand side: the normal equations must hold
    let b_noisy = rand_matrix(6, 2, &mut rng);
    let got = ls_solve(&a, &b_noisy).unwrap();
    let ah = a.adjoint();
    let lhs = ah.matmul(&a).unwrap().matmul(&got).unwrap();
    let rhs = ah.matmul(&b_noisy).unwrap();
    assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-12);
}

#[test]
fn trace_inverse_gram_matches_pseudo_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = rand_matrix(20, 7, &mut rng);
    let qr = LeastSquares::new(&a).unwrap();
    let pinv = pseudo_inverse(&a).unwrap();
    let t = qr.trace_inverse_gram();
    assert!((t - pinv.frobenius_norm_sqr()).abs() < 1e-12 * t);
}

#[test]
fn wide_right_ls() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let a = rand_matrix(3, 6, &mut rng);
    let x = rand_matrix(2, 3, &mut rng);
    let b = x.matmul(&a).unwrap();
    let got = right_ls_solve(&b, &a).unwrap();
    assert!(got.sub(&x).unwrap().max_abs() < 1e-12);
}

#[test]
fn rank_deficient_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let base = rand_matrix(5, 2, &mut rng);
    let a = ComplexMatrix::from_fn(5, 3, |r, c| if c < 2 { base[(r, c)] } else { base[(r, 0)] * 2.0 });
    assert!(matches!(
        ls_solve(&a, &ComplexMatrix::identity(5)),
        Err(Error::SingularSystem { .. })
    ));
    assert!(matches!(
        ls_solve(&rand_matrix(2, 3, &mut rng), &rand_matrix(2, 1, &mut rng)),
        Err(Error::InvalidDimension(_))
    ));
}

fn complex_vec(max_len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 1..max_len)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

proptest! {
    #[test]
    fn convolution_commutes_and_has_full_length(a in complex_vec(10), b in complex_vec(10)) {
        let ab = linear_convolve(&a, &b).unwrap();
        let ba = linear_convolve(&b, &a).unwrap();
        prop_assert_eq!(ab.len(), a.len() + b.len() - 1);
        prop_assert!(max_diff(&ab, &ba) < 1e-10);
    }

    #[test]
    fn circular_is_wrapped_linear(x in complex_vec(12), h in complex_vec(12)) {
        prop_assume!(h.len() <= x.len());
        let lin = linear_convolve(&x, &h).unwrap();
        let mut wrapped = vec![Complex64::new(0.0, 0.0); x.len()];
        for (i, v) in lin.iter().enumerate() {
            wrapped[i % x.len()] += v;
        }
        prop_assert!(max_diff(&circular_convolve(&x, &h).unwrap(), &wrapped) < 1e-10);
    }

    #[test]
    fn shift_is_invertible(v in complex_vec(16), k in -40i64..40) {
        let back = cyclic_shift(&cyclic_shift(&v, k), -k);
        prop_assert_eq!(back, v);
    }

    #[test]
    fn orthogonal_columns_give_scaled_adjoint(n in 2usize..17, cols in 1usize..4, scale in 0.1..10.0f64, seed in 0u64..1000) {
        prop_assume!(cols <= n);
        let f = first_columns(&dft_matrix(n).unwrap(), cols).unwrap().scale(scale);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = rand_matrix(n, 2, &mut rng);
        let x = ls_solve(&f, &b).unwrap();
        let closed = f.adjoint().matmul(&b).unwrap().scale(1.0 / (scale * scale));
        prop_assert!(x.sub(&closed).unwrap().max_abs() < 1e-10 * (1.0 + closed.max_abs()));
    }
}
