use belltensor_core::games::{
    chsh, classical_bias, i3322, is_scaled_hadamard, quantum_bias_sdp, uncertainty_product, GameMatrix,
    GROTHENDIECK_BOUND,
};
use belltensor_core::linalg::RealMatrix;
use belltensor_core::sample;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `max Σ_xy M_xy a_x b_y` over independent sign vectors `a` and `b`.
fn brute_force_bias(m: &RealMatrix) -> f64 {
    let n = m.rows();
    let mut best = f64::NEG_INFINITY;
    for sa in 0..1u32 << n {
        for sb in 0..1u32 << n {
            let mut v = 0.0;
            for x in 0..n {
                for y in 0..n {
                    let a = if sa >> x & 1 == 0 { 1.0 } else { -1.0 };
                    let b = if sb >> y & 1 == 0 { 1.0 } else { -1.0 };
                    v += m[(x, y)] * a * b;
                }
            }
            best = best.max(v);
        }
    }
    best
}

#[test]
fn classical_bias_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 2..=5 {
        for _ in 0..10 {
            let g = sample::game(&mut rng, n).unwrap();
            let b = classical_bias(&g).unwrap();
            assert!((b - brute_force_bias(g.matrix())).abs() < 1e-12);
        }
    }
}

#[test]
fn gray_code_walk_is_exact_for_larger_games() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let g = sample::game(&mut rng, 14).unwrap();
    let m = g.matrix();
    let n = m.rows();
    let mut best = 0.0f64;
    for s in 0..1u32 << (n - 1) {
        let v: f64 = (0..n)
            .map(|y| {
                (0..n)
                    .map(|x| if s >> x & 1 == 0 { m[(x, y)] } else { -m[(x, y)] })
                    .sum::<f64>()
                    .abs()
            })
            .sum();
        best = best.max(v);
    }
    assert!((classical_bias(&g).unwrap() - best).abs() < 1e-10);
}

#[test]
fn enumeration_cap() {
    let g = GameMatrix::new(RealMatrix::identity(25)).unwrap();
    assert!(classical_bias(&g).is_err());
}

#[test]
fn quantum_bias_is_between_classical_and_grothendieck() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for n in 2..=4 {
        for _ in 0..8 {
            let g = sample::game(&mut rng, n).unwrap();
            let b = classical_bias(&g).unwrap();
            let q = quantum_bias_sdp(&g).unwrap();
            assert!(q >= b - 1e-7, "{q} < {b}");
            assert!(q <= GROTHENDIECK_BOUND * b + 1e-7);
        }
    }
    assert!((quantum_bias_sdp(&chsh()).unwrap() - 2f64.sqrt()).abs() < 1e-6);
}

#[test]
fn i3322_quantum_bias_exceeds_classical() {
    let q = quantum_bias_sdp(&i3322()).unwrap();
    let b = classical_bias(&i3322()).unwrap();
    assert!(q > b + 1e-3);
    // Qubit strategy: A and B are Pauli triples with the same contraction,
    // bias λ_max(Σ_y |A'_y|) = (2√3 + √2)/4.
    assert!(q >= (2.0 * 3f64.sqrt() + 2f64.sqrt()) / 4.0 - 1e-7);
}

#[test]
fn uncertainty_lower_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for n in 2..=6 {
        for _ in 0..50 {
            let g = sample::invertible_game(&mut rng, n).unwrap();
            let u = uncertainty_product(&g).unwrap();
            assert!(u >= (n as f64 / 2.0).sqrt() - 1e-9);
        }
    }
}

#[test]
fn hadamard_saturates_uncertainty() {
    for a in [-2.0, -0.3, 0.1, 1.0, 7.0] {
        for signs in [[1.0, 1.0, 1.0, -1.0], [-1.0, 1.0, 1.0, 1.0], [1.0, -1.0, 1.0, 1.0]] {
            let g = GameMatrix::from_rows(&[vec![a * signs[0], a * signs[1]], vec![a * signs[2], a * signs[3]]]).unwrap();
            assert!(is_scaled_hadamard(&g, 1e-12));
            assert!((uncertainty_product(&g).unwrap() - 1.0).abs() < 1e-9);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..500 {
        let g = sample::invertible_game(&mut rng, 2).unwrap();
        let u = uncertainty_product(&g).unwrap();
        assert_eq!((u - 1.0).abs() < 1e-9, is_scaled_hadamard(&g, 1e-9));
    }
}

fn game_strategy(n: usize) -> impl Strategy<Value = GameMatrix> {
    prop::collection::vec(-3.0f64..3.0, n * n)
        .prop_map(move |v| GameMatrix::new(RealMatrix::from_fn(n, n, |i, j| v[i * n + j])).unwrap())
}

proptest! {
    #[test]
    fn bias_symmetries(g in game_strategy(4), c in -5.0f64..5.0) {
        let b = classical_bias(&g).unwrap();
        prop_assert!((classical_bias(&g.transpose()).unwrap() - b).abs() < 1e-12 * (1.0 + b));
        prop_assert!((classical_bias(&g.scale(-1.0).unwrap()).unwrap() - b).abs() < 1e-12 * (1.0 + b));
        prop_assert!((classical_bias(&g.scale(c).unwrap()).unwrap() - c.abs() * b).abs() < 1e-12 * (1.0 + b * c.abs()));
    }
}
