//! Bell functionals of two-player XOR games and their biases.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{real_inverse, HermitianMatrix, RealMatrix};
use crate::sdp::{self, Sense, SdpProblem};

/// Largest number of questions for which the classical bias is enumerated.
pub const MAX_ENUMERATION: usize = 24;

/// Upper bound on the real Grothendieck constant (Krivine).
pub const GROTHENDIECK_BOUND: f64 = 1.7823;

/// Square real matrix `M` with `β = max Σ_xy M_xy a_x b_y` over signs `a, b`.
#[derive(Clone, Debug, PartialEq)]
pub struct GameMatrix {
    m: RealMatrix,
    inverse: Option<RealMatrix>,
}

impl GameMatrix {
    pub fn new(m: RealMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::ShapeMismatch {
                what: "game matrix columns",
                expected: m.rows(),
                found: m.cols(),
            });
        }
        if m.rows() < 2 {
            return Err(Error::ShapeMismatch {
                what: "game matrix size (at least 2)",
                expected: 2,
                found: m.rows(),
            });
        }
        let inverse = real_inverse(&m).ok();
        Ok(Self { m, inverse })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(RealMatrix::from_rows(rows)?)
    }

    /// Number of questions per player.
    pub fn n(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.m
    }

    pub fn inverse(&self) -> Option<&RealMatrix> {
        self.inverse.as_ref()
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse.is_some()
    }

    /// The cached inverse, or the singularity error from the inversion.
    pub fn require_inverse(&self) -> Result<&RealMatrix> {
        match &self.inverse {
            Some(inv) => Ok(inv),
            None => Err(Error::Singular {
                det: self.m.determinant().abs(),
            }),
        }
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        Self::new(self.m.scale(c))
    }

    pub fn transpose(&self) -> Self {
        Self {
            m: self.m.transpose(),
            inverse: self.inverse.as_ref().map(RealMatrix::transpose),
        }
    }
}

fn signed_column_sums(m: &RealMatrix, z: &[f64], out: &mut [f64]) {
    for (y, o) in out.iter_mut().enumerate() {
        *o = z.iter().enumerate().map(|(x, zx)| zx * m[(x, y)]).sum();
    }
}

/// `β(M) = max_{z ∈ {±1}^N} ‖Mᵀz‖₁`, by exhaustive search over `2^(N-1)`
/// sign vectors with `z_0 = +1`.
pub fn classical_bias(game: &GameMatrix) -> Result<f64> {
    let n = game.n();
    if n > MAX_ENUMERATION {
        return Err(Error::TooLarge {
            what: "classical bias enumeration",
            n,
            max: MAX_ENUMERATION,
        });
    }
    let m = game.matrix();
    let mut z = vec![1.0; n];
    let mut v = vec![0.0; n];
    signed_column_sums(m, &z, &mut v);
    let mut best = v.iter().map(|a| a.abs()).sum::<f64>();
    // Gray-code walk over the remaining signs: each step flips one z_x and
    // updates Mᵀz by a single row. Periodic recomputation bounds drift.
    let total: u64 = 1 << (n - 1);
    for k in 1..total {
        let bit = k.trailing_zeros() as usize + 1;
        z[bit] = -z[bit];
        if k % 1024 == 0 {
            signed_column_sums(m, &z, &mut v);
        } else {
            for (y, vy) in v.iter_mut().enumerate() {
                *vy += 2.0 * z[bit] * m[(bit, y)];
            }
        }
        let val: f64 = v.iter().map(|a| a.abs()).sum();
        if val > best {
            best = val;
        }
    }
    Ok(best)
}

/// `‖M‖` in `ℓ∞ ⊗_ε ℓ∞`, the largest absolute entry.
pub fn linf_injective_norm(m: &RealMatrix) -> f64 {
    m.max_abs()
}

/// `M / β(M)`.
pub fn normalize(game: &GameMatrix) -> Result<GameMatrix> {
    let beta = classical_bias(game)?;
    if beta <= 0.0 || !beta.is_finite() {
        return Err(Error::DegenerateGame);
    }
    game.scale(1.0 / beta)
}

/// `max|M⁻¹_ij| · β(M)`, at least `√(N/2)` for every invertible `M`.
pub fn uncertainty_product(game: &GameMatrix) -> Result<f64> {
    let inv = game.require_inverse()?;
    Ok(linf_injective_norm(inv) * classical_bias(game)?)
}

/// True when all entries share one magnitude `a > tol` and `M Mᵀ = a² N I`.
pub fn is_scaled_hadamard(game: &GameMatrix, tol: f64) -> bool {
    let m = game.matrix();
    let n = game.n();
    let a = m.as_slice()[0].abs();
    if a <= tol || m.as_slice().iter().any(|v| (v.abs() - a).abs() > tol) {
        return false;
    }
    let target = a * a * n as f64;
    let mmt = m.matmul(&m.transpose());
    (0..n).all(|i| {
        (0..n).all(|j| {
            let expect = if i == j { target } else { 0.0 };
            (mmt[(i, j)] - expect).abs() <= tol
        })
    })
}

/// Tsirelson relaxation: maximize `<M, γ>` where `γ` is the off-diagonal
/// block of a `2N × 2N` PSD matrix with unit diagonal.
pub fn quantum_bias_sdp(game: &GameMatrix) -> Result<f64> {
    let n = game.n();
    if n > MAX_ENUMERATION {
        return Err(Error::TooLarge {
            what: "quantum bias SDP",
            n,
            max: MAX_ENUMERATION,
        });
    }
    let m = game.matrix();
    let mut c = vec![vec![0.0; 2 * n]; 2 * n];
    for x in 0..n {
        for y in 0..n {
            c[x][n + y] = 0.5 * m[(x, y)];
            c[n + y][x] = 0.5 * m[(x, y)];
        }
    }
    let mut problem = SdpProblem::new(Sense::Maximize);
    let g = problem.add_block("gram", 2 * n);
    problem.set_objective(g, HermitianMatrix::from_real(&c)?)?;
    for i in 0..2 * n {
        let mut e = vec![0.0; 2 * n];
        e[i] = 1.0;
        problem.add_constraint(vec![(g, HermitianMatrix::diagonal(&e))], 1.0)?;
    }
    let sol = sdp::solve(&problem)?.require_optimal()?;
    Ok(sol.primal_value)
}

/// `½ [[1, 1], [1, -1]]`.
pub fn chsh() -> GameMatrix {
    GameMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, -0.5]]).expect("valid shape")
}

/// `[[1, 1], [1, -t]]`, singular at `t = -1`.
pub fn deformed_chsh(t: f64) -> GameMatrix {
    GameMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, -t]]).expect("valid shape")
}

/// `[[pq, p(1-q)], [(1-p)q, -(1-p)(1-q)]]` for `p, q ∈ [0, 1]`.
pub fn biased_chsh(p: f64, q: f64) -> Result<GameMatrix> {
    for (name, value) in [("p", p), ("q", q)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::ParameterOutOfRange { name, value });
        }
    }
    GameMatrix::from_rows(&[
        vec![p * q, p * (1.0 - q)],
        vec![(1.0 - p) * q, -(1.0 - p) * (1.0 - q)],
    ])
}

/// Correlation part of the I3322 functional, `¼ [[1,1,1],[1,1,-1],[1,-1,0]]`.
pub fn i3322() -> GameMatrix {
    GameMatrix::from_rows(&[
        vec![0.25, 0.25, 0.25],
        vec![0.25, 0.25, -0.25],
        vec![0.25, -0.25, 0.0],
    ])
    .expect("valid shape")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn named_games() {
        assert_eq!(chsh().matrix().to_rows(), vec![vec![0.5, 0.5], vec![0.5, -0.5]]);
        assert_eq!(deformed_chsh(1.0).matrix().to_rows(), vec![vec![1.0, 1.0], vec![1.0, -1.0]]);
        assert_eq!(
            biased_chsh(1.0, 1.0).unwrap().matrix().to_rows(),
            vec![vec![1.0, 0.0], vec![0.0, 0.0]]
        );
        assert!(!deformed_chsh(-1.0).is_invertible());
        assert!(!biased_chsh(0.0, 0.3).unwrap().is_invertible());
        assert!(!biased_chsh(0.4, 1.0).unwrap().is_invertible());
        assert!(biased_chsh(0.4, 0.7).unwrap().is_invertible());
        assert!(biased_chsh(1.2, 0.5).is_err());
    }

    #[test]
    fn classical_bias_examples() {
        assert!(close(classical_bias(&chsh()).unwrap(), 1.0, 1e-15));
        for t in [-4.0, -1.0, 0.0, 0.3, 1.0, 2.5] {
            let b = classical_bias(&deformed_chsh(t)).unwrap();
            assert!(close(b, 2.0 + (t - 1.0f64).abs(), 1e-12), "t={t}");
        }
        for (p, q) in [(0.5, 0.5), (0.2, 0.9), (0.0, 0.4), (0.7, 0.3)] {
            let b = classical_bias(&biased_chsh(p, q).unwrap()).unwrap();
            let expect = 1.0 - 2.0 * f64::min(p, 1.0 - p) * f64::min(q, 1.0 - q);
            assert!(close(b, expect, 1e-12));
        }
        assert!(close(classical_bias(&i3322()).unwrap(), 1.0, 1e-15));
    }

    #[test]
    fn injective_norm_and_inverse() {
        assert_eq!(linf_injective_norm(chsh().inverse().unwrap()), 1.0);
        assert_eq!(linf_injective_norm(&RealMatrix::zeros(3, 3)), 0.0);
        assert!(close(linf_injective_norm(i3322().inverse().unwrap()), 2.0, 1e-12));
    }

    #[test]
    fn normalization() {
        let m = normalize(&deformed_chsh(1.0)).unwrap();
        assert!(m.matrix().max_abs_diff(chsh().matrix()) < 1e-15);
        let c = normalize(&chsh()).unwrap();
        assert!(c.matrix().max_abs_diff(chsh().matrix()) < 1e-12);
        let g = biased_chsh(0.5, 0.5).unwrap();
        let ng = normalize(&g).unwrap();
        assert!(ng.matrix().max_abs_diff(&g.matrix().scale(2.0)) < 1e-15);
        let zero = GameMatrix::new(RealMatrix::zeros(2, 2)).unwrap();
        assert_eq!(normalize(&zero), Err(Error::DegenerateGame));
    }

    #[test]
    fn uncertainty_examples() {
        assert!(close(uncertainty_product(&chsh()).unwrap(), 1.0, 1e-12));
        assert!(close(uncertainty_product(&chsh().scale(-3.5).unwrap()).unwrap(), 1.0, 1e-12));
        let id = GameMatrix::new(RealMatrix::identity(2)).unwrap();
        assert!(close(uncertainty_product(&id).unwrap(), 2.0, 1e-12));
        assert!(matches!(
            uncertainty_product(&deformed_chsh(-1.0)),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn hadamard_test() {
        assert!(is_scaled_hadamard(&chsh(), 1e-12));
        assert!(!is_scaled_hadamard(&deformed_chsh(2.0), 1e-12));
        assert!(!is_scaled_hadamard(&GameMatrix::new(RealMatrix::identity(2)).unwrap(), 1e-12));
        let signed = GameMatrix::from_rows(&[vec![-2.0, 2.0], vec![2.0, 2.0]]).unwrap();
        assert!(is_scaled_hadamard(&signed, 1e-12));
        let flat = GameMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(!is_scaled_hadamard(&flat, 1e-12));
    }

    #[test]
    fn tsirelson_bound() {
        let q = quantum_bias_sdp(&chsh()).unwrap();
        assert!(close(q, 2f64.sqrt(), 1e-7), "{q}");
        let diag = GameMatrix::from_rows(&[
            vec![1.5, 0.0, 0.0],
            vec![0.0, -0.5, 0.0],
            vec![0.0, 0.0, 2.0],
        ])
        .unwrap();
        assert!(close(quantum_bias_sdp(&diag).unwrap(), 4.0, 1e-7));
    }
}
