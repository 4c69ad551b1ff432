use belltensor_core::linalg::{
    hermitian_eig, lambda_max, matrix_abs, operator_norm, real_inverse, CMatrix, HermitianMatrix, RealMatrix,
};
use belltensor_core::{sample, Complex64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `det(H - λI)` by Gaussian elimination with partial pivoting.
fn char_poly(h: &HermitianMatrix, lambda: f64) -> f64 {
    let n = h.dim();
    let mut a: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| h.get(i, j) - if i == j { Complex64::new(lambda, 0.0) } else { Complex64::new(0.0, 0.0) })
                .collect()
        })
        .collect();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm())).unwrap();
        if a[p][k].norm() == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot = &top[k];
        for row in rest.iter_mut() {
            let f = row[k] / pivot[k];
            for (x, &v) in row[k..].iter_mut().zip(&pivot[k..]) {
                *x -= f * v;
            }
        }
    }
    det.re
}

/// Eigenvalues as sign changes of the characteristic polynomial, refined by
/// bisection.
fn char_poly_roots(h: &HermitianMatrix) -> Vec<f64> {
    let r = h.frobenius_norm() + 1.0;
    let steps = 20_000;
    let mut roots = Vec::new();
    let mut prev_x = -r;
    let mut prev_f = char_poly(h, prev_x);
    for k in 1..=steps {
        let x = -r + 2.0 * r * k as f64 / steps as f64;
        let f = char_poly(h, x);
        if f == 0.0 || f.signum() != prev_f.signum() {
            let (mut lo, mut hi, flo) = (prev_x, x, prev_f);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if char_poly(h, mid).signum() == flo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_f = f;
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    roots
}

#[test]
fn eigenvalues_match_characteristic_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let h = sample::hermitian(&mut rng, 4);
        let eig = hermitian_eig(&h).unwrap();
        let roots = char_poly_roots(&h);
        assert_eq!(roots.len(), 4, "{roots:?}");
        for (a, b) in eig.values.iter().zip(&roots) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }
}

#[test]
fn eigendecomposition_reconstructs() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for d in 1..=8 {
        let h = sample::hermitian(&mut rng, d);
        let e = hermitian_eig(&h).unwrap();
        let rebuilt = e.map(|x| x);
        assert!(rebuilt.sub(&h).max_abs() < 1e-10);
        for i in 0..d {
            for j in 0..d {
                let vi = e.vector(i);
                let vj = e.vector(j);
                let ip: Complex64 = vi.iter().zip(&vj).map(|(a, b)| a.conj() * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - Complex64::new(expect, 0.0)).norm() < 1e-10);
            }
        }
        let trace: f64 = e.values.iter().sum();
        assert!((trace - h.trace()).abs() < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn eigenvalue_product_is_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let h = sample::hermitian(&mut rng, 5);
        let prod: f64 = hermitian_eig(&h).unwrap().values.iter().product();
        let det = char_poly(&h, 0.0);
        assert!((prod - det).abs() <= 1e-8 * det.abs().max(1e-12), "{prod} vs {det}");
    }
}

fn power_iteration_norm(h: &HermitianMatrix) -> f64 {
    let h2 = h.matmul(h);
    let n = h.dim();
    let mut v: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + 0.1 * i as f64, 0.3 - 0.05 * i as f64)).collect();
    let mut rq = 0.0;
    for _ in 0..20_000 {
        let w = h2.mul_vec(&v);
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        rq = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum::<f64>()
            / v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        v = w.into_iter().map(|z| z / norm).collect();
    }
    rq.sqrt()
}

#[test]
fn operator_norm_matches_power_iteration() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..20 {
        let h = sample::hermitian(&mut rng, 4);
        let a = operator_norm(&h).unwrap();
        let b = power_iteration_norm(&h);
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        assert!((a - lambda_max(&matrix_abs(&h).unwrap()).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn matrix_abs_squares_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for d in 1..=6 {
        let h = sample::hermitian(&mut rng, d);
        let r = matrix_abs(&h).unwrap();
        let diff = r.matmul(&r).sub(&h.matmul(&h));
        assert!(diff.max_abs() < 1e-9);
        assert!(hermitian_eig(&r).unwrap().values.iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn inverse_multiplies_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let mut checked = 0;
    while checked < 20 {
        let m = sample::real_matrix(&mut rng, 5);
        if m.determinant().abs() < 1e-2 {
            continue;
        }
        let inv = real_inverse(&m).unwrap();
        assert!(m.matmul(&inv).max_abs_diff(&RealMatrix::identity(5)) < 1e-10);
        checked += 1;
    }
    assert_eq!(real_inverse(&RealMatrix::identity(3)).unwrap(), RealMatrix::identity(3));
}

fn hermitian_strategy(d: usize) -> impl Strategy<Value = HermitianMatrix> {
    prop::collection::vec(-2.0f64..2.0, 2 * d * d).prop_map(move |v| {
        let m = CMatrix::from_fn(d, |i, j| Complex64::new(v[2 * (i * d + j)], v[2 * (i * d + j) + 1]));
        HermitianMatrix::from_hermitian_part(&m)
    })
}

proptest! {
    #[test]
    fn operator_norm_is_a_norm(a in hermitian_strategy(3), b in hermitian_strategy(3), s in -3.0f64..3.0) {
        let na = operator_norm(&a).unwrap();
        let nb = operator_norm(&b).unwrap();
        prop_assert!(operator_norm(&a.add(&b)).unwrap() <= na + nb + 1e-10);
        prop_assert!((operator_norm(&a.scale(s)).unwrap() - s.abs() * na).abs() <= 1e-10 * (1.0 + na));
    }

    #[test]
    fn abs_is_psd_and_squares_back(h in hermitian_strategy(4)) {
        let r = matrix_abs(&h).unwrap();
        prop_assert!(hermitian_eig(&r).unwrap().values.iter().all(|&v| v >= 0.0));
        prop_assert!(r.matmul(&r).sub(&h.matmul(&h)).max_abs() < 1e-9);
    }

    #[test]
    fn trace_is_eigenvalue_sum(h in hermitian_strategy(5)) {
        let s: f64 = hermitian_eig(&h).unwrap().values.iter().sum();
        prop_assert!((s - h.trace()).abs() < 1e-10);
    }
}
