//! Compatibility of dichotomic measurements: the compatibility norm, the
//! two-effect robustness SDP pair, and joint-POVM certificates.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_basis, hermitian_eig, lambda_min, psd_projection, HermitianMatrix};
use crate::measurements::{observable_from_effect, MeasurementTuple};
use crate::sdp::{self, LmiProblem, Sense, SdpProblem, SdpSolution};

/// Largest tuple length handled by [`compatibility_norm`] (`2^N` blocks).
pub const MAX_COMPAT_OBSERVABLES: usize = 4;

/// Decision slack for `‖A‖_c ≤ 1`.
pub const COMPATIBILITY_TOL: f64 = 1e-7;

/// Sign vector number `index`: bit `x` clear means `ε_x = +1`.
pub fn sign_vector(n: usize, index: usize) -> Vec<i8> {
    (0..n).map(|x| if index >> x & 1 == 0 { 1 } else { -1 }).collect()
}

/// `"+-+"`-style label of a sign vector.
pub fn sign_key(signs: &[i8]) -> String {
    signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
}

/// Inverse of [`sign_key`].
pub fn parse_sign_key(key: &str) -> Option<Vec<i8>> {
    key.chars()
        .map(|c| match c {
            '+' => Some(1),
            '-' => Some(-1),
            _ => None,
        })
        .collect()
}

fn sign_index(signs: &[i8]) -> usize {
    signs
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < 0)
        .fold(0, |acc, (x, _)| acc | 1 << x)
}

/// Optimal decomposition `A_x = Σ_ε ε_x H_ε` with `Σ_ε H_ε = t I`.
#[derive(Clone, Debug)]
pub struct CompatDecomposition {
    pub value: f64,
    /// `H_ε`, indexed as in [`sign_vector`].
    pub blocks: Vec<HermitianMatrix>,
    pub solution: Option<SdpSolution>,
}

fn check_tuple_size(a: &MeasurementTuple) -> Result<()> {
    if a.len() > MAX_COMPAT_OBSERVABLES {
        return Err(Error::TooLarge {
            what: "compatibility SDP tuple length",
            n: a.len(),
            max: MAX_COMPAT_OBSERVABLES,
        });
    }
    Ok(())
}

/// The SDP `min t  s.t.  H_ε ⪰ 0, Σ_ε H_ε = t I, Σ_ε ε_x H_ε = A_x`, with
/// `t` eliminated as `Tr(Σ_ε H_ε)/d`.
pub fn compatibility_problem(a: &MeasurementTuple) -> Result<SdpProblem> {
    check_tuple_size(a)?;
    let n = a.len();
    let d = a.dim();
    let count = 1usize << n;
    let mut p = SdpProblem::new(Sense::Minimize);
    let blocks: Vec<usize> = (0..count)
        .map(|i| p.add_block(sign_key(&sign_vector(n, i)), d))
        .collect();
    let c = HermitianMatrix::identity(d).scale(1.0 / d as f64);
    for &b in &blocks {
        p.set_objective(b, c.clone())?;
    }
    for e in hermitian_basis(d).into_iter().skip(1) {
        p.add_constraint(blocks.iter().map(|&b| (b, e.clone())).collect(), 0.0)?;
    }
    for x in 0..n {
        let terms: Vec<(usize, f64)> = (0..count)
            .map(|i| (blocks[i], f64::from(sign_vector(n, i)[x])))
            .collect();
        p.add_matrix_equality(&terms, a.matrix(x))?;
    }
    Ok(p)
}

pub fn compatibility_decomposition(a: &MeasurementTuple) -> Result<CompatDecomposition> {
    check_tuple_size(a)?;
    let count = 1usize << a.len();
    if a.is_zero(0.0) {
        return Ok(CompatDecomposition {
            value: 0.0,
            blocks: vec![HermitianMatrix::zeros(a.dim()); count],
            solution: None,
        });
    }
    let sol = sdp::solve(&compatibility_problem(a)?)?.require_optimal()?;
    Ok(CompatDecomposition {
        value: sol.primal_value,
        blocks: sol.block_values.clone(),
        solution: Some(sol),
    })
}

/// `‖A‖_c`, for tuples of at most [`MAX_COMPAT_OBSERVABLES`] observables.
pub fn compatibility_norm(a: &MeasurementTuple) -> Result<f64> {
    Ok(compatibility_decomposition(a)?.value)
}

/// White-noise robustness `Γ(A) = 1/‖A‖_c`. Values above 1 mean the tuple
/// stays compatible with room to spare.
pub fn gamma_threshold(a: &MeasurementTuple) -> Result<f64> {
    if a.is_zero(0.0) {
        return Err(Error::ZeroTuple);
    }
    Ok(1.0 / compatibility_norm(a)?)
}

fn validate_effects(p: &HermitianMatrix, q: &HermitianMatrix) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::ShapeMismatch {
            what: "effect dimension",
            expected: p.dim(),
            found: q.dim(),
        });
    }
    observable_from_effect(p)?;
    observable_from_effect(q)?;
    Ok(())
}

/// `inf ε` such that some `δ ⪰ 0` has `δ ⪰ P + Q - I`, `δ ⪯ P + εI` and
/// `δ ⪯ Q + εI`, solved over `(ε, δ)` with `δ` in a Hermitian basis.
pub fn epsilon_star_primal(p: &HermitianMatrix, q: &HermitianMatrix) -> Result<f64> {
    validate_effects(p, q)?;
    let d = p.dim();
    let basis = hermitian_basis(d);
    let mut cost = vec![0.0; 1 + basis.len()];
    cost[0] = 1.0;
    let mut lmi = LmiProblem::new(cost);
    let id = HermitianMatrix::identity(d);
    let b_delta = lmi.add_block("delta", HermitianMatrix::zeros(d));
    let b_lower = lmi.add_block("delta + I - P - Q", id.sub(p).sub(q));
    let b_q = lmi.add_block("Q + eps I - delta", q.clone());
    let b_p = lmi.add_block("P + eps I - delta", p.clone());
    lmi.set_coefficient(0, b_q, id.clone())?;
    lmi.set_coefficient(0, b_p, id)?;
    for (k, e) in basis.iter().enumerate() {
        lmi.set_coefficient(k + 1, b_delta, e.clone())?;
        lmi.set_coefficient(k + 1, b_lower, e.clone())?;
        lmi.set_coefficient(k + 1, b_q, e.scale(-1.0))?;
        lmi.set_coefficient(k + 1, b_p, e.scale(-1.0))?;
    }
    let sol = lmi.solve()?;
    sol.inner.clone().require_optimal()?;
    Ok(sol.value)
}

/// `sup Tr[X(P+Q-I)] - Tr[YQ] - Tr[ZP]` over `X, Y, Z ⪰ 0` with `X ⪯ Y + Z`
/// and `Tr(Y + Z) = 1`.
pub fn epsilon_star_dual(p: &HermitianMatrix, q: &HermitianMatrix) -> Result<f64> {
    validate_effects(p, q)?;
    let d = p.dim();
    let id = HermitianMatrix::identity(d);
    let mut prob = SdpProblem::new(Sense::Maximize);
    let x = prob.add_block("X", d);
    let y = prob.add_block("Y", d);
    let z = prob.add_block("Z", d);
    let w = prob.add_block("Y + Z - X", d);
    prob.set_objective(x, p.add(q).sub(&id))?;
    prob.set_objective(y, q.scale(-1.0))?;
    prob.set_objective(z, p.scale(-1.0))?;
    prob.add_matrix_equality(&[(y, 1.0), (z, 1.0), (x, -1.0), (w, -1.0)], &HermitianMatrix::zeros(d))?;
    prob.add_constraint(vec![(y, id.clone()), (z, id)], 1.0)?;
    Ok(sdp::solve(&prob)?.require_optimal()?.primal_value)
}

/// `Γ(P, Q) = 1/(1 + 2ε*)`, the two-effect route to the noise threshold.
pub fn gamma_from_effects(p: &HermitianMatrix, q: &HermitianMatrix) -> Result<f64> {
    Ok(1.0 / (1.0 + 2.0 * epsilon_star_dual(p, q)?))
}

/// Tolerances applied by [`joint_povm_from_decomposition`].
pub const POSITIVITY_TOL: f64 = 1e-9;
pub const SUM_TOL: f64 = 1e-7;
pub const MARGINAL_TOL: f64 = 1e-6;

/// A `2^N`-outcome POVM whose coarse-grainings give `(I + A_x)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPovm {
    n: usize,
    dim: usize,
    elements: Vec<HermitianMatrix>,
}

impl JointPovm {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Elements indexed as in [`sign_vector`].
    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    pub fn element(&self, signs: &[i8]) -> Option<&HermitianMatrix> {
        if signs.len() != self.n {
            return None;
        }
        self.elements.get(sign_index(signs))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<i8>, &HermitianMatrix)> {
        self.elements
            .iter()
            .enumerate()
            .map(move |(i, e)| (sign_vector(self.n, i), e))
    }

    /// `Σ_{ε : ε_x = +1} X_ε`.
    pub fn marginal(&self, x: usize) -> HermitianMatrix {
        let mut acc = HermitianMatrix::zeros(self.dim);
        for (i, e) in self.elements.iter().enumerate() {
            if i >> x & 1 == 0 {
                acc = acc.add(e);
            }
        }
        acc
    }
}

/// Checks positivity, normalization and marginals of candidate elements
/// `X_ε` against `A` and wraps them as a [`JointPovm`].
pub fn joint_povm_from_decomposition(a: &MeasurementTuple, blocks: Vec<HermitianMatrix>) -> Result<JointPovm> {
    let n = a.len();
    let d = a.dim();
    if blocks.len() != 1 << n {
        return Err(Error::ShapeMismatch {
            what: "number of joint POVM elements",
            expected: 1 << n,
            found: blocks.len(),
        });
    }
    if let Some(b) = blocks.iter().find(|b| b.dim() != d) {
        return Err(Error::ShapeMismatch {
            what: "joint POVM element dimension",
            expected: d,
            found: b.dim(),
        });
    }
    let mut min_eigenvalue = f64::INFINITY;
    let mut sum = HermitianMatrix::zeros(d);
    for b in &blocks {
        min_eigenvalue = min_eigenvalue.min(lambda_min(b)?);
        sum = sum.add(b);
    }
    let sum_residual = sum.sub(&HermitianMatrix::identity(d)).max_abs();
    let povm = JointPovm { n, dim: d, elements: blocks };
    let marginal_residuals: Vec<f64> = (0..n)
        .map(|x| {
            let target = HermitianMatrix::identity(d).add(a.matrix(x)).scale(0.5);
            povm.marginal(x).sub(&target).max_abs()
        })
        .collect();
    if min_eigenvalue < -POSITIVITY_TOL
        || sum_residual > SUM_TOL
        || marginal_residuals.iter().any(|&r| r > MARGINAL_TOL)
    {
        return Err(Error::InvalidCertificate {
            min_eigenvalue,
            sum_residual,
            marginal_residuals,
        });
    }
    Ok(povm)
}

#[derive(Clone, Debug)]
pub struct Compatibility {
    pub compatible: bool,
    pub norm: f64,
    pub certificate: Option<JointPovm>,
}

fn clean_psd(h: HermitianMatrix) -> Result<HermitianMatrix> {
    let e = hermitian_eig(&h)?;
    if e.values.last().copied().unwrap_or(0.0) < 0.0 {
        psd_projection(&h)
    } else {
        Ok(h)
    }
}

/// Decides `‖A‖_c ≤ 1` and, when it holds, returns a verified joint POVM.
///
/// Blocks with `Σ H_ε = tI`, `t ≤ 1`, are completed to a POVM by adding
/// `(1 - t)I/2^N` to every element, which leaves the marginal differences
/// `Σ ε_x H_ε` untouched.
pub fn is_compatible(a: &MeasurementTuple) -> Result<Compatibility> {
    a.validate()?;
    let dec = compatibility_decomposition(a)?;
    let t = dec.value;
    if t > 1.0 + COMPATIBILITY_TOL {
        return Ok(Compatibility {
            compatible: false,
            norm: t,
            certificate: None,
        });
    }
    let count = dec.blocks.len() as f64;
    let d = a.dim();
    let elements = dec
        .blocks
        .into_iter()
        .map(|h| {
            let x = if t <= 1.0 {
                h.add(&HermitianMatrix::identity(d).scale((1.0 - t) / count))
            } else {
                h.scale(1.0 / t)
            };
            clean_psd(x)
        })
        .collect::<Result<Vec<_>>>()?;
    let certificate = joint_povm_from_decomposition(a, elements)?;
    Ok(Compatibility {
        compatible: true,
        norm: t,
        certificate: Some(certificate),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::{effect_from_observable, pauli_pair, pauli_tuple, sigma_x, sigma_y, sigma_z, Observable};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn sign_vectors_and_keys() {
        assert_eq!(sign_vector(3, 0), vec![1, 1, 1]);
        assert_eq!(sign_vector(3, 5), vec![-1, 1, -1]);
        assert_eq!(sign_key(&[1, -1, 1]), "+-+");
        assert_eq!(parse_sign_key("+-+"), Some(vec![1, -1, 1]));
        assert_eq!(parse_sign_key("+x"), None);
        assert_eq!(sign_index(&[-1, 1, -1]), 5);
    }

    #[test]
    fn pauli_norms() {
        for y in [0.0, 0.4, -1.0] {
            let v = compatibility_norm(&pauli_pair(1.0, y)).unwrap();
            assert!(close(v, (1.0 + y * y).sqrt(), 1e-6), "y={y}: {v}");
        }
        let v = compatibility_norm(&pauli_tuple(0.3, 0.5, 0.7)).unwrap();
        assert!(close(v, (0.09f64 + 0.25 + 0.49).sqrt(), 1e-6));
    }

    #[test]
    fn single_and_commuting() {
        let single = MeasurementTuple::new(vec![sigma_x().scale(0.8)]).unwrap();
        assert!(close(compatibility_norm(&single).unwrap(), 0.8, 1e-6));
        let diag = MeasurementTuple::new(vec![
            HermitianMatrix::diagonal(&[0.5, -0.2]),
            HermitianMatrix::diagonal(&[0.1, 0.9]),
        ])
        .unwrap();
        assert!(close(compatibility_norm(&diag).unwrap(), 0.9, 1e-6));
        assert_eq!(compatibility_norm(&MeasurementTuple::zero(3, 2).unwrap()).unwrap(), 0.0);
        let big = MeasurementTuple::zero(5, 2).unwrap();
        assert!(matches!(compatibility_norm(&big), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn gamma_values() {
        assert!(close(gamma_threshold(&pauli_pair(1.0, 1.0)).unwrap(), 0.5f64.sqrt(), 1e-6));
        assert!(close(gamma_threshold(&pauli_tuple(1.0, 1.0, 1.0)).unwrap(), 1.0 / 3f64.sqrt(), 1e-6));
        let single = MeasurementTuple::new(vec![sigma_z()]).unwrap();
        assert!(close(gamma_threshold(&single).unwrap(), 1.0, 1e-6));
        assert_eq!(gamma_threshold(&MeasurementTuple::zero(2, 2).unwrap()), Err(Error::ZeroTuple));
    }

    #[test]
    fn epsilon_star_examples() {
        let e0 = HermitianMatrix::diagonal(&[1.0, 0.0]);
        assert!(close(epsilon_star_primal(&e0, &e0).unwrap(), 0.0, 1e-7));
        assert!(close(epsilon_star_dual(&e0, &e0).unwrap(), 0.0, 1e-7));
        let half = HermitianMatrix::identity(2).scale(0.5);
        assert!(epsilon_star_primal(&half, &half).unwrap() <= 1e-8);
        assert!(epsilon_star_dual(&half, &half).unwrap() <= 1e-8);
        let px = effect_from_observable(&Observable::new(sigma_x())).unwrap();
        let py = effect_from_observable(&Observable::new(sigma_y())).unwrap();
        let expect = (2f64.sqrt() - 1.0) / 2.0;
        assert!(close(epsilon_star_primal(&px, &py).unwrap(), expect, 1e-7));
        assert!(close(epsilon_star_dual(&px, &py).unwrap(), expect, 1e-7));
        assert!(close(gamma_from_effects(&px, &py).unwrap(), 0.5f64.sqrt(), 1e-7));
        let bad = HermitianMatrix::diagonal(&[1.5, 0.0]);
        assert!(matches!(epsilon_star_dual(&bad, &e0), Err(Error::InvalidEffect { .. })));
    }

    #[test]
    fn compatible_with_certificate() {
        let c = is_compatible(&pauli_pair(0.5, 0.5)).unwrap();
        assert!(c.compatible);
        let povm = c.certificate.unwrap();
        assert_eq!(povm.elements().len(), 4);
        assert!(!is_compatible(&pauli_pair(1.0, 1.0)).unwrap().compatible);
        let commuting = MeasurementTuple::new(vec![sigma_z(), HermitianMatrix::diagonal(&[-1.0, 1.0])]).unwrap();
        let c = is_compatible(&commuting).unwrap();
        assert!(c.compatible && c.certificate.is_some());
        assert!(is_compatible(&pauli_pair(1.5, 0.0)).is_err());
    }

    #[test]
    fn certificate_checks() {
        let zero = MeasurementTuple::zero(2, 2).unwrap();
        let uniform = vec![HermitianMatrix::identity(2).scale(0.25); 4];
        assert!(joint_povm_from_decomposition(&zero, uniform.clone()).is_ok());
        let mut broken = uniform;
        broken[0] = broken[0].scale(2.0);
        assert!(matches!(
            joint_povm_from_decomposition(&zero, broken),
            Err(Error::InvalidCertificate { .. })
        ));
    }
}
