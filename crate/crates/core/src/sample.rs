//! Random instances for property checks and the verification suite.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::error::Result;
use crate::games::GameMatrix;
use crate::linalg::{operator_norm, CMatrix, HermitianMatrix, RealMatrix};
use crate::measurements::MeasurementTuple;

/// Hermitian matrix with real and imaginary parts uniform in `[-1, 1]`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> HermitianMatrix {
    let g = CMatrix::from_fn(d, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    HermitianMatrix::from_hermitian_part(&g)
}

/// Dichotomic observable with operator norm uniform in `[0, 1]`.
pub fn observable<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<HermitianMatrix> {
    let h = hermitian(rng, d);
    let norm = operator_norm(&h)?;
    let target: f64 = rng.gen_range(0.0..=1.0);
    Ok(if norm > 0.0 { h.scale(target / norm) } else { h })
}

/// Tuple of `n` valid observables on `C^d`.
pub fn tuple<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> Result<MeasurementTuple> {
    let obs = (0..n).map(|_| observable(rng, d)).collect::<Result<Vec<_>>>()?;
    MeasurementTuple::new(obs)
}

/// Tuple of `n` Hermitian matrices without the `‖A_x‖ ≤ 1` constraint.
pub fn hermitian_tuple<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> Result<MeasurementTuple> {
    MeasurementTuple::new((0..n).map(|_| hermitian(rng, d)).collect())
}

/// Effect `0 ⪯ E ⪯ I`.
pub fn effect<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<HermitianMatrix> {
    let a = observable(rng, d)?;
    Ok(HermitianMatrix::identity(d).add(&a).scale(0.5))
}

/// Real matrix with entries uniform in `[-1, 1]`.
pub fn real_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RealMatrix {
    RealMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0))
}

/// Random game, redrawn until it is invertible with `|det|` not tiny.
pub fn invertible_game<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<GameMatrix> {
    loop {
        let m = real_matrix(rng, n);
        if m.determinant().abs() > 1e-3 {
            let g = GameMatrix::new(m)?;
            if g.is_invertible() {
                return Ok(g);
            }
        }
    }
}

/// Random game of size `n` (possibly singular).
pub fn game<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<GameMatrix> {
    GameMatrix::new(real_matrix(rng, n))
}
