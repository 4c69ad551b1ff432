//! The M-Bell-locality norm and the see-saw lower bound for it.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::games::{classical_bias, GameMatrix};
use crate::linalg::{hermitian_eig, hermitian_sign, lambda_max, matrix_abs, CMatrix, HermitianMatrix};
use crate::measurements::MeasurementTuple;
use crate::sdp::{self, Sense, SdpProblem};

/// Slack used by [`is_bell_local`].
pub const LOCALITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMethod {
    /// `λ_max[Σ_y |A'_y|]` is attained by an explicit reduced state.
    ClosedForm,
    /// The bound is not attained; the value comes from the primal SDP.
    Sdp,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MBellNorm {
    /// Largest quantum bias of the game with Alice's observables fixed.
    pub value: f64,
    /// False when `M` is singular: the value is still the largest bias of
    /// the game, but it no longer defines a norm.
    pub is_norm: bool,
    /// `λ_max[Σ_y |Σ_x M_xy A_x|]`, an upper bound on `value`.
    pub lambda_bound: f64,
    pub method: NormMethod,
}

fn check_questions(a: &MeasurementTuple, game: &GameMatrix) -> Result<()> {
    if a.len() != game.n() {
        return Err(Error::ShapeMismatch {
            what: "number of observables vs game size",
            expected: game.n(),
            found: a.len(),
        });
    }
    Ok(())
}

/// `A'_y = Σ_x M_xy A_x`.
pub fn contracted_observables(a: &MeasurementTuple, game: &GameMatrix) -> Result<Vec<HermitianMatrix>> {
    check_questions(a, game)?;
    let m = game.matrix();
    Ok((0..game.n())
        .map(|y| HermitianMatrix::combination(a.dim(), (0..a.len()).map(|x| (m[(x, y)], a.matrix(x)))))
        .collect())
}

/// `λ_max[Σ_y |Σ_x M_xy A_x|]`.
pub fn lambda_bound(a: &MeasurementTuple, game: &GameMatrix) -> Result<f64> {
    let primed = contracted_observables(a, game)?;
    Ok(lambda_max(&abs_sum(&primed, a.dim())?)?.max(0.0))
}

fn abs_sum(primed: &[HermitianMatrix], d: usize) -> Result<HermitianMatrix> {
    let mut sum = HermitianMatrix::zeros(d);
    for h in primed {
        sum = sum.add(&matrix_abs(h)?);
    }
    Ok(sum)
}

/// Bias reached with Alice's reduced state `ρ = W W†` and optimal Bob:
/// `Σ_y Tr|W† A'_y W|`.
fn bias_at(primed: &[HermitianMatrix], w: &CMatrix) -> Result<f64> {
    let wa = w.adjoint();
    let mut total = 0.0;
    for a in primed {
        let k = HermitianMatrix::from_hermitian_part(&wa.matmul(a.as_cmatrix()).matmul(w));
        total += matrix_abs(&k)?.trace();
    }
    Ok(total)
}

/// Relative slack under which the closed form counts as attained.
const ATTAINED_TOL: f64 = 1e-12;

/// Largest quantum bias of `M` when Alice measures `A`:
/// `sup_{ψ, ‖B_y‖ ≤ 1} <ψ| Σ_xy M_xy A_x ⊗ B_y |ψ>`.
///
/// The value never exceeds `λ_max[Σ_y |A'_y|]`, and equals it whenever a
/// reduced state supported on the top eigenspace of `Σ_y |A'_y|` reaches it
/// (Pauli tuples, rank-one tuples, commuting tuples). Otherwise the bound is
/// strict and the primal SDP over `(ρ, S_y)` is solved.
pub fn m_bell_norm(a: &MeasurementTuple, game: &GameMatrix) -> Result<MBellNorm> {
    let primed = contracted_observables(a, game)?;
    let d = a.dim();
    let eig = hermitian_eig(&abs_sum(&primed, d)?)?;
    let bound = eig.values[0].max(0.0);
    let is_norm = game.is_invertible();
    let closed = MBellNorm {
        value: bound,
        is_norm,
        lambda_bound: bound,
        method: NormMethod::ClosedForm,
    };
    if bound == 0.0 {
        return Ok(closed);
    }
    let slack = ATTAINED_TOL * bound;
    let top = eig.values.iter().take_while(|&&v| bound - v <= 1e-9 * bound).count();
    for rank in [top, 1] {
        let scale = 1.0 / (rank as f64).sqrt();
        let w = CMatrix::from_fn(d, |i, j| if j < rank { eig.vectors[(i, j)] * scale } else { Complex64::new(0.0, 0.0) });
        if bound - bias_at(&primed, &w)? <= slack {
            return Ok(closed);
        }
    }
    Ok(MBellNorm {
        value: bias_sdp(&primed, d)?,
        is_norm,
        lambda_bound: bound,
        method: NormMethod::Sdp,
    })
}

/// Optimal reduced state of `max Σ_y Tr[A'_y (2 S_y - ρ)]` over
/// `0 ⪯ S_y ⪯ ρ`, `Tr ρ = 1`, with the SDP value.
fn bias_sdp_state(primed: &[HermitianMatrix], d: usize) -> Result<(HermitianMatrix, f64)> {
    let mut p = SdpProblem::new(Sense::Maximize);
    let rho = p.add_block("rho", d);
    let mut total = HermitianMatrix::zeros(d);
    for h in primed {
        total = total.add(h);
    }
    p.set_objective(rho, total.scale(-1.0))?;
    for (y, h) in primed.iter().enumerate() {
        let s = p.add_block(alloc::format!("S_{y}"), d);
        let t = p.add_block(alloc::format!("rho - S_{y}"), d);
        p.set_objective(s, h.scale(2.0))?;
        p.add_matrix_equality(&[(s, 1.0), (t, 1.0), (rho, -1.0)], &HermitianMatrix::zeros(d))?;
    }
    p.add_constraint(alloc::vec![(rho, HermitianMatrix::identity(d))], 1.0)?;
    let sol = sdp::solve(&p)?.require_optimal()?;
    Ok((sol.block_values[rho].clone(), sol.primal_value))
}

const POLISH_ITERS: usize = 1000;
const POLISH_TOL: f64 = 1e-15;

/// Bias of an explicit strategy started from the purification of `ρ` and
/// improved by see-saw steps. Every value is attained, so it never exceeds
/// the true bias.
fn polish(primed: &[HermitianMatrix], rho: &HermitianMatrix, d: usize) -> Result<f64> {
    let root = hermitian_eig(rho)?.map(|v| v.max(0.0).sqrt());
    let mut state: Vec<Complex64> = (0..d * d).map(|k| root.get(k / d, k % d)).collect();
    let norm = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Ok(0.0);
    }
    for z in state.iter_mut() {
        *z /= norm;
    }
    let mut bob = vec![HermitianMatrix::zeros(d); primed.len()];
    let mut value = f64::NEG_INFINITY;
    for _ in 0..POLISH_ITERS {
        let mut bob_value = 0.0;
        for (b, ap) in bob.iter_mut().zip(primed) {
            let k = bob_operator(ap, &state, d);
            *b = hermitian_sign(&k)?;
            bob_value += b.inner(&k);
        }
        let eig = hermitian_eig(&state_operator(primed, &bob, d))?;
        state = eig.vector(0);
        let next = eig.values[0].max(bob_value);
        let done = next - value <= POLISH_TOL * next.abs().max(1.0);
        value = value.max(next);
        if done {
            break;
        }
    }
    Ok(value)
}

/// SDP value of the bias on normalized data, polished into an attained
/// strategy value.
fn bias_sdp(primed: &[HermitianMatrix], d: usize) -> Result<f64> {
    let s0 = primed.iter().map(HermitianMatrix::max_abs).fold(0.0, f64::max);
    if s0 == 0.0 {
        return Ok(0.0);
    }
    let scaled: Vec<HermitianMatrix> = primed.iter().map(|h| h.scale(1.0 / s0)).collect();
    let (rho, sdp_value) = bias_sdp_state(&scaled, d)?;
    let polished = polish(&scaled, &rho, d)?;
    let v = if polished >= sdp_value - 1e-6 * (1.0 + sdp_value.abs()) { polished } else { sdp_value };
    Ok(s0 * v)
}

/// [`m_bell_norm`] without the closed-form shortcut, always via the SDP.
pub fn m_bell_norm_sdp(a: &MeasurementTuple, game: &GameMatrix) -> Result<f64> {
    let primed = contracted_observables(a, game)?;
    bias_sdp(&primed, a.dim())
}

fn check_len(p: &[f64], game: &GameMatrix) -> Result<()> {
    if p.len() != game.n() {
        return Err(Error::ShapeMismatch {
            what: "vector length vs game size",
            expected: game.n(),
            found: p.len(),
        });
    }
    Ok(())
}

/// `‖p‖_M = ‖Mᵀp‖₁`.
pub fn vector_m_norm(p: &[f64], game: &GameMatrix) -> Result<f64> {
    check_len(p, game)?;
    Ok(game.matrix().transpose_mul_vec(p).iter().map(|v| v.abs()).sum())
}

/// Dual of [`vector_m_norm`]: `‖M⁻¹p‖_∞`.
pub fn vector_m_dual_norm(p: &[f64], game: &GameMatrix) -> Result<f64> {
    check_len(p, game)?;
    let inv = game.require_inverse()?;
    Ok(inv.mul_vec(p).iter().fold(0.0, |acc, v| acc.max(v.abs())))
}

/// `‖A‖_M ≤ β(M)`: Alice's observables cannot violate the Bell inequality.
pub fn is_bell_local(a: &MeasurementTuple, game: &GameMatrix) -> Result<bool> {
    Ok(m_bell_norm(a, game)?.value <= classical_bias(game)? + LOCALITY_TOL)
}

#[derive(Clone, Debug)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
    /// A restart stops once one round improves the objective by less.
    pub tol: f64,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            iters: 200,
            seed: 0,
            tol: 1e-12,
        }
    }
}

/// One alternating-maximization run.
#[derive(Clone, Debug)]
pub struct SeesawRun {
    pub value: f64,
    pub bob: MeasurementTuple,
    /// Shared state in `C^d ⊗ C^d`, Alice's index major.
    pub state: Vec<Complex64>,
    /// Objective after each half step (Bob update, then state update).
    pub history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl SeesawRun {
    /// Largest drop between consecutive history entries (zero if monotone).
    pub fn max_decrease(&self) -> f64 {
        self.history
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct SeesawResult {
    pub value: f64,
    pub bob: MeasurementTuple,
    pub state: Vec<Complex64>,
    pub best_restart: usize,
    /// True when the best run stopped on the gain tolerance.
    pub converged: bool,
    /// Rounds summed over all restarts.
    pub iterations: usize,
    pub max_decrease: f64,
}

fn random_sign_operator(d: usize, rng: &mut ChaCha8Rng) -> Result<HermitianMatrix> {
    let g = CMatrix::from_fn(d, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    hermitian_sign(&HermitianMatrix::from_hermitian_part(&g))
}

/// `K = (Ψ† A Ψ)ᵀ` with `Ψ_ab = ψ[a d + b]`, so that
/// `<ψ|A ⊗ B|ψ> = Tr(B K)`.
fn bob_operator(a: &HermitianMatrix, state: &[Complex64], d: usize) -> HermitianMatrix {
    let psi = CMatrix::from_fn(d, |i, j| state[i * d + j]);
    let k = psi.adjoint().matmul(a.as_cmatrix()).matmul(&psi).transpose();
    HermitianMatrix::from_hermitian_part(&k)
}

fn state_operator(primed: &[HermitianMatrix], bob: &[HermitianMatrix], d: usize) -> HermitianMatrix {
    let mut w = HermitianMatrix::zeros(d * d);
    for (a, b) in primed.iter().zip(bob) {
        w = w.add(&a.kron(b));
    }
    w
}

/// A single see-saw run from the generator stream `restart` of `seed`.
pub fn seesaw_restart(
    a: &MeasurementTuple,
    game: &GameMatrix,
    restart: usize,
    options: &SeesawOptions,
) -> Result<SeesawRun> {
    let primed = contracted_observables(a, game)?;
    let d = a.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    rng.set_stream(restart as u64);

    let mut bob = (0..game.n())
        .map(|_| random_sign_operator(d, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let eig = hermitian_eig(&state_operator(&primed, &bob, d))?;
    let mut state = eig.vector(0);
    let mut value = eig.values[0];
    let mut history = vec![value];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < options.iters {
        iterations += 1;
        let previous = value;

        let mut bob_value = 0.0;
        for (b, ap) in bob.iter_mut().zip(&primed) {
            let k = bob_operator(ap, &state, d);
            *b = hermitian_sign(&k)?;
            bob_value += b.inner(&k);
        }
        history.push(bob_value);

        let eig = hermitian_eig(&state_operator(&primed, &bob, d))?;
        state = eig.vector(0);
        value = eig.values[0];
        history.push(value);

        if value - previous < options.tol {
            converged = true;
            break;
        }
    }

    Ok(SeesawRun {
        value,
        bob: MeasurementTuple::new(bob)?,
        state,
        history,
        iterations,
        converged,
    })
}

/// Combines independent runs into the best-over-restarts result.
pub fn best_of(runs: Vec<SeesawRun>) -> Option<SeesawResult> {
    let iterations = runs.iter().map(|r| r.iterations).sum();
    let max_decrease = runs.iter().map(SeesawRun::max_decrease).fold(0.0, f64::max);
    let (best_restart, best) = runs
        .into_iter()
        .enumerate()
        .fold(None::<(usize, SeesawRun)>, |acc, (i, r)| match acc {
            Some((j, b)) if b.value >= r.value => Some((j, b)),
            _ => Some((i, r)),
        })?;
    Some(SeesawResult {
        value: best.value,
        bob: best.bob,
        state: best.state,
        best_restart,
        converged: best.converged,
        iterations,
        max_decrease,
    })
}

/// Lower bound on `‖A‖_M` by alternating over the shared state and Bob's
/// observables, with Bob's dimension equal to Alice's.
pub fn seesaw_bias(a: &MeasurementTuple, game: &GameMatrix, options: &SeesawOptions) -> Result<SeesawResult> {
    if options.restarts == 0 {
        return Err(Error::Empty { what: "see-saw restarts" });
    }
    let runs = (0..options.restarts)
        .map(|r| seesaw_restart(a, game, r, options))
        .collect::<Result<Vec<_>>>()?;
    Ok(best_of(runs).expect("at least one restart"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{chsh, deformed_chsh, normalize};
    use crate::measurements::{pauli_pair, sigma_x};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn deformed_chsh_closed_form() {
        for &t in &[-4.0, -2.0, 0.0, 0.5, 1.0, 2.0, 4.0] {
            let game = normalize(&deformed_chsh(t)).unwrap();
            for &y in &[-1.0, -0.3, 0.0, 0.6, 1.0] {
                let v = m_bell_norm(&pauli_pair(1.0, y), &game).unwrap().value;
                let expect = ((1.0 + (y * t) * (y * t)).sqrt() + (1.0 + y * y).sqrt()) / (2.0 + (t - 1.0f64).abs());
                assert!(close(v, expect, 1e-12), "t={t} y={y}");
            }
        }
    }

    #[test]
    fn chsh_pair_and_flags() {
        let v = m_bell_norm(&pauli_pair(1.0, 0.5), &chsh()).unwrap();
        assert!(close(v.value, 1.25f64.sqrt(), 1e-12));
        assert!(v.is_norm);
        assert!(!m_bell_norm(&pauli_pair(1.0, 0.5), &deformed_chsh(-1.0)).unwrap().is_norm);
        assert!(m_bell_norm(&pauli_pair(1.0, 0.5), &crate::games::i3322()).is_err());
    }

    #[test]
    fn polish_reaches_sdp_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (n, d) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
            let a = crate::sample::tuple(&mut rng, n, d).unwrap();
            let g = crate::sample::invertible_game(&mut rng, n).unwrap();
            let primed = contracted_observables(&a, &g).unwrap();
            let (rho, v) = bias_sdp_state(&primed, d).unwrap();
            let p = polish(&primed, &rho, d).unwrap();
            assert!(close(p, v, 1e-7 * (1.0 + v)), "{p} vs {v}");
        }
    }

    #[test]
    fn rank_one_tuple() {
        let game = chsh();
        let p = [0.3, -0.8];
        let b = sigma_x().scale(0.7);
        let a = MeasurementTuple::rank_one(&p, &b).unwrap();
        let v = m_bell_norm(&a, &game).unwrap().value;
        assert!(close(v, vector_m_norm(&p, &game).unwrap() * 0.7, 1e-12));
    }

    #[test]
    fn vector_norms() {
        assert!(close(vector_m_norm(&[1.0, 0.0], &chsh()).unwrap(), 1.0, 1e-15));
        assert_eq!(vector_m_norm(&[0.0, 0.0], &chsh()).unwrap(), 0.0);
        assert!(close(vector_m_norm(&[1.0, 0.0], &deformed_chsh(3.0)).unwrap(), 2.0, 1e-15));
        assert!(close(vector_m_dual_norm(&[1.0, 0.0], &chsh()).unwrap(), 1.0, 1e-12));
        assert!(vector_m_dual_norm(&[1.0, 0.0], &deformed_chsh(-1.0)).is_err());
        assert!(vector_m_norm(&[1.0], &chsh()).is_err());
    }

    #[test]
    fn locality() {
        assert!(!is_bell_local(&pauli_pair(1.0, 1.0), &chsh()).unwrap());
        let t_star = (9.0 - 4.0 * 2f64.sqrt()) / 7.0;
        let game = normalize(&deformed_chsh(t_star)).unwrap();
        assert!(is_bell_local(&pauli_pair(1.0, 1.0), &game).unwrap());
        let zero = MeasurementTuple::zero(2, 2).unwrap();
        assert!(is_bell_local(&zero, &game).unwrap());
    }

    #[test]
    fn seesaw_reaches_tsirelson() {
        let r = seesaw_bias(&pauli_pair(1.0, 1.0), &chsh(), &SeesawOptions::default()).unwrap();
        assert!(close(r.value, 2f64.sqrt(), 1e-4), "{}", r.value);
        assert!(r.value <= 2f64.sqrt() + 1e-9);
        assert!(r.max_decrease <= 1e-12);
        let zero = MeasurementTuple::zero(2, 2).unwrap();
        let r = seesaw_bias(&zero, &chsh(), &SeesawOptions::default()).unwrap();
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn seesaw_is_deterministic() {
        let opts = SeesawOptions { restarts: 3, iters: 50, seed: 7, tol: 1e-12 };
        let a = seesaw_bias(&pauli_pair(0.9, 0.4), &chsh(), &opts).unwrap();
        let b = seesaw_bias(&pauli_pair(0.9, 0.4), &chsh(), &opts).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.iterations, b.iterations);
    }
}
