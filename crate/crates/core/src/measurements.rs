//! Dichotomic observables and tuples of them.
//!
//! A two-outcome POVM `(E, I - E)` is stored as its observable `A = 2E - I`;
//! the tuple `(A_1, …, A_N)` is the tensor `Σ_x e_x ⊗ A_x`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, operator_norm, CMatrix, HermitianMatrix};

/// Slack when checking `‖A‖_∞ ≤ 1` and `0 ≤ E ≤ I`.
pub const VALIDITY_TOL: f64 = 1e-10;

pub fn sigma_x() -> HermitianMatrix {
    HermitianMatrix::from_real(&[alloc::vec![0.0, 1.0], alloc::vec![1.0, 0.0]]).expect("static")
}

pub fn sigma_y() -> HermitianMatrix {
    let m = CMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 1) => Complex64::new(0.0, -1.0),
        (1, 0) => Complex64::new(0.0, 1.0),
        _ => Complex64::new(0.0, 0.0),
    });
    HermitianMatrix::new(m).expect("static")
}

pub fn sigma_z() -> HermitianMatrix {
    HermitianMatrix::diagonal(&[1.0, -1.0])
}

/// A Hermitian matrix read as a dichotomic observable. Validity (`‖A‖_∞ ≤ 1`)
/// is checked on demand because parametric families routinely leave it.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    matrix: HermitianMatrix,
}

impl Observable {
    pub fn new(matrix: HermitianMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> HermitianMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn operator_norm(&self) -> Result<f64> {
        operator_norm(&self.matrix)
    }

    pub fn is_valid(&self) -> Result<bool> {
        Ok(self.operator_norm()? <= 1.0 + VALIDITY_TOL)
    }
}

impl From<HermitianMatrix> for Observable {
    fn from(matrix: HermitianMatrix) -> Self {
        Self::new(matrix)
    }
}

/// N observables on a common dimension d.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementTuple {
    dim: usize,
    observables: Vec<Observable>,
}

impl MeasurementTuple {
    pub fn new(matrices: Vec<HermitianMatrix>) -> Result<Self> {
        let first = matrices.first().ok_or(Error::Empty {
            what: "measurement tuple",
        })?;
        let dim = first.dim();
        if let Some(bad) = matrices.iter().find(|m| m.dim() != dim) {
            return Err(Error::ShapeMismatch {
                what: "observable dimension",
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self {
            dim,
            observables: matrices.into_iter().map(Observable::new).collect(),
        })
    }

    /// The all-zero tuple (N trivial measurements).
    pub fn zero(n: usize, dim: usize) -> Result<Self> {
        Self::new((0..n).map(|_| HermitianMatrix::zeros(dim)).collect())
    }

    /// Rank-one tensor `p ⊗ B`, i.e. `A_x = p_x B`.
    pub fn rank_one(p: &[f64], b: &HermitianMatrix) -> Result<Self> {
        Self::new(p.iter().map(|&px| b.scale(px)).collect())
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn observables(&self) -> &[Observable] {
        &self.observables
    }

    pub fn matrix(&self, x: usize) -> &HermitianMatrix {
        self.observables[x].matrix()
    }

    pub fn matrices(&self) -> impl Iterator<Item = &HermitianMatrix> {
        self.observables.iter().map(Observable::matrix)
    }

    /// Keeps the first `k` observables.
    pub fn truncate(mut self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Empty {
                what: "measurement tuple",
            });
        }
        self.observables.truncate(k);
        Ok(self)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            observables: self
                .matrices()
                .map(|m| Observable::new(m.scale(s)))
                .collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs)?;
        Ok(Self {
            dim: self.dim,
            observables: self
                .matrices()
                .zip(rhs.matrices())
                .map(|(a, b)| Observable::new(a.add(b)))
                .collect(),
        })
    }

    pub fn check_same_shape(&self, rhs: &Self) -> Result<()> {
        if self.len() != rhs.len() {
            return Err(Error::ShapeMismatch {
                what: "tuple length",
                expected: self.len(),
                found: rhs.len(),
            });
        }
        if self.dim != rhs.dim {
            return Err(Error::ShapeMismatch {
                what: "observable dimension",
                expected: self.dim,
                found: rhs.dim,
            });
        }
        Ok(())
    }

    /// Injective norm `‖A‖_ε = max_x ‖A_x‖_∞`.
    pub fn injective_norm(&self) -> Result<f64> {
        self.observables
            .iter()
            .try_fold(0.0f64, |m, o| Ok(m.max(o.operator_norm()?)))
    }

    /// True iff every observable has `‖A_x‖_∞ ≤ 1` (up to [`VALIDITY_TOL`]).
    pub fn is_valid(&self) -> Result<bool> {
        Ok(self.injective_norm()? <= 1.0 + VALIDITY_TOL)
    }

    /// Fails with the first observable whose norm exceeds one.
    pub fn validate(&self) -> Result<()> {
        for (index, o) in self.observables.iter().enumerate() {
            let norm = o.operator_norm()?;
            if norm > 1.0 + VALIDITY_TOL {
                return Err(Error::InvalidObservable { index, norm });
            }
        }
        Ok(())
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.matrices().all(|m| m.is_zero(tol))
    }

    /// Effects `(I + A_x)/2` of the "+1" outcomes.
    pub fn effects(&self) -> Result<Vec<HermitianMatrix>> {
        self.observables.iter().map(effect_from_observable).collect()
    }
}

/// `A = 2E - I` for an effect `0 ≤ E ≤ I`.
pub fn observable_from_effect(effect: &HermitianMatrix) -> Result<Observable> {
    let eig = hermitian_eig(effect)?;
    let bad: Vec<f64> = eig
        .values
        .iter()
        .copied()
        .filter(|&l| !(-VALIDITY_TOL..=1.0 + VALIDITY_TOL).contains(&l))
        .collect();
    if !bad.is_empty() {
        return Err(Error::InvalidEffect { eigenvalues: bad });
    }
    let d = effect.dim();
    Ok(Observable::new(
        effect.scale(2.0).sub(&HermitianMatrix::identity(d)),
    ))
}

/// `E = (I + A)/2` for an observable with `‖A‖_∞ ≤ 1`.
pub fn effect_from_observable(a: &Observable) -> Result<HermitianMatrix> {
    let norm = a.operator_norm()?;
    if norm > 1.0 + VALIDITY_TOL {
        return Err(Error::InvalidObservable { index: 0, norm });
    }
    let d = a.dim();
    Ok(HermitianMatrix::identity(d).add(a.matrix()).scale(0.5))
}

/// Mixes each POVM with the trivial one: `ηE + (1-η)I/2`, i.e. `A ↦ ηA`.
pub fn add_noise(tuple: &MeasurementTuple, eta: f64) -> Result<MeasurementTuple> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::NoiseOutOfRange(eta));
    }
    Ok(tuple.scale(eta))
}

/// Unbiased noisy Pauli measurements `(xσ_X, yσ_Y, zσ_Z)` on a qubit.
pub fn pauli_tuple(x: f64, y: f64, z: f64) -> MeasurementTuple {
    MeasurementTuple::new(alloc::vec![
        sigma_x().scale(x),
        sigma_y().scale(y),
        sigma_z().scale(z),
    ])
    .expect("three qubit observables")
}

/// `(xσ_X, yσ_Y)` on a qubit.
pub fn pauli_pair(x: f64, y: f64) -> MeasurementTuple {
    MeasurementTuple::new(alloc::vec![sigma_x().scale(x), sigma_y().scale(y)])
        .expect("two qubit observables")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> bool {
        a.sub(b).max_abs() <= tol
    }

    #[test]
    fn effect_to_observable_examples() {
        let id = HermitianMatrix::identity(2);
        assert!(close(observable_from_effect(&id).unwrap().matrix(), &id, 0.0));
        let ket0 = HermitianMatrix::diagonal(&[1.0, 0.0]);
        assert!(close(observable_from_effect(&ket0).unwrap().matrix(), &sigma_z(), 0.0));
        let plus = id.add(&sigma_x()).scale(0.5);
        assert!(close(observable_from_effect(&plus).unwrap().matrix(), &sigma_x(), 1e-15));
    }

    #[test]
    fn invalid_effect_lists_eigenvalues() {
        let e = HermitianMatrix::diagonal(&[1.5, -0.25]);
        match observable_from_effect(&e) {
            Err(Error::InvalidEffect { eigenvalues }) => assert_eq!(eigenvalues, [1.5, -0.25]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn observable_to_effect_examples() {
        let zero = Observable::new(HermitianMatrix::zeros(2));
        let e = effect_from_observable(&zero).unwrap();
        assert!(close(&e, &HermitianMatrix::identity(2).scale(0.5), 0.0));
        let e = effect_from_observable(&Observable::new(sigma_z())).unwrap();
        assert!(close(&e, &HermitianMatrix::diagonal(&[1.0, 0.0]), 0.0));
        assert!(matches!(
            effect_from_observable(&Observable::new(sigma_x().scale(1.5))),
            Err(Error::InvalidObservable { .. })
        ));
    }

    #[test]
    fn noise_scales_observables() {
        let t = pauli_pair(1.0, 1.0);
        assert_eq!(add_noise(&t, 1.0).unwrap(), t);
        assert!(add_noise(&t, 0.0).unwrap().is_zero(0.0));
        let half = add_noise(&t, 0.5).unwrap();
        assert!(close(half.matrix(0), &sigma_x().scale(0.5), 0.0));
        assert!(close(half.matrix(1), &sigma_y().scale(0.5), 0.0));
        assert!(matches!(add_noise(&t, 1.2), Err(Error::NoiseOutOfRange(_))));
        assert!(matches!(add_noise(&t, -0.1), Err(Error::NoiseOutOfRange(_))));
    }

    #[test]
    fn noise_on_effect_side_matches_scaling() {
        let t = pauli_tuple(0.3, -0.8, 0.5);
        let eta = 0.37;
        let noisy = add_noise(&t, eta).unwrap();
        let half = HermitianMatrix::identity(2).scale(0.5);
        for (e, ne) in t.effects().unwrap().iter().zip(noisy.effects().unwrap()) {
            let mixed = e.scale(eta).add(&half.scale(1.0 - eta));
            assert!(close(&mixed, &ne, 1e-15));
        }
    }

    #[test]
    fn pauli_validity_flag() {
        assert!(pauli_tuple(1.0, 1.0, 1.0).is_valid().unwrap());
        let big = pauli_tuple(1.0, 1.2, 0.0);
        assert!(!big.is_valid().unwrap());
        assert!(matches!(
            big.validate(),
            Err(Error::InvalidObservable { index: 1, .. })
        ));
        assert!((big.injective_norm().unwrap() - 1.2).abs() < 1e-14);
    }

    #[test]
    fn tuple_rejects_mixed_dimensions() {
        let r = MeasurementTuple::new(alloc::vec![sigma_x(), HermitianMatrix::identity(3)]);
        assert!(matches!(r, Err(Error::ShapeMismatch { .. })));
        assert!(matches!(
            MeasurementTuple::new(Vec::new()),
            Err(Error::Empty { .. })
        ));
    }
}
