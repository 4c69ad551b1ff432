//! Small dense semidefinite programs over complex Hermitian blocks.
//!
//! Problems are stated in standard primal form
//!
//! ```text
//!   minimize / maximize   Σ_b <C_b, X_b>
//!   subject to            Σ_b <A_ib, X_b> = b_i     i = 1..m
//!                         X_b ⪰ 0                   for every block b
//! ```
//!
//! with `<A, X> = Tr(A X)` and Hermitian `C_b`, `A_ib`. The conic dual
//! (for minimization) is `max bᵀy  s.t.  C - Σ_i y_i A_i = S ⪰ 0`, so linear
//! matrix inequalities in free variables are expressed through [`LmiProblem`],
//! which is lowered onto the same solver.
//!
//! The solver is an infeasible-start primal-dual path-following method with
//! the HKM search direction and Mehrotra predictor-corrector steps. It is
//! deterministic: the same problem always produces the same iterates.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{
    cholesky, hermitian_basis, hermitian_eig, lower_triangular_inverse, spd_solve, CMatrix,
    HermitianMatrix,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    MaxIterations,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub label: String,
    pub dim: usize,
}

/// `Σ_b <coefficient_b, X_b> = rhs`
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, HermitianMatrix)>,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem {
    sense: Sense,
    blocks: Vec<Block>,
    objective: Vec<Option<HermitianMatrix>>,
    constraints: Vec<Constraint>,
}

impl SdpProblem {
    pub fn new(sense: Sense) -> Self {
        Self {
            sense,
            blocks: Vec::new(),
            objective: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self, block: usize) -> Option<&HermitianMatrix> {
        self.objective.get(block).and_then(Option::as_ref)
    }

    /// Adds a PSD block variable and returns its index.
    pub fn add_block(&mut self, label: impl Into<String>, dim: usize) -> usize {
        self.blocks.push(Block {
            label: label.into(),
            dim,
        });
        self.objective.push(None);
        self.blocks.len() - 1
    }

    pub fn set_objective(&mut self, block: usize, c: HermitianMatrix) -> Result<()> {
        self.check_term(block, &c)?;
        self.objective[block] = Some(c);
        Ok(())
    }

    pub fn add_constraint(
        &mut self,
        terms: Vec<(usize, HermitianMatrix)>,
        rhs: f64,
    ) -> Result<usize> {
        for (b, a) in &terms {
            self.check_term(*b, a)?;
        }
        self.constraints.push(Constraint { terms, rhs });
        Ok(self.constraints.len() - 1)
    }

    /// Adds the matrix equation `Σ_k c_k X_{b_k} = rhs` as `d²` scalar
    /// constraints, one per element of an orthonormal Hermitian basis.
    pub fn add_matrix_equality(&mut self, terms: &[(usize, f64)], rhs: &HermitianMatrix) -> Result<()> {
        let d = rhs.dim();
        for &(b, _) in terms {
            self.check_dim(b, d)?;
        }
        for e in hermitian_basis(d) {
            let row = terms
                .iter()
                .filter(|(_, c)| *c != 0.0)
                .map(|&(b, c)| (b, e.scale(c)))
                .collect();
            let r = e.inner(rhs);
            self.add_constraint(row, r)?;
        }
        Ok(())
    }

    fn check_dim(&self, block: usize, dim: usize) -> Result<()> {
        let b = self
            .blocks
            .get(block)
            .ok_or(Error::InvalidProblem("constraint references an unknown block"))?;
        if b.dim != dim {
            return Err(Error::ShapeMismatch {
                what: "SDP block dimension",
                expected: b.dim,
                found: dim,
            });
        }
        Ok(())
    }

    fn check_term(&self, block: usize, m: &HermitianMatrix) -> Result<()> {
        self.check_dim(block, m.dim())
    }

    fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::InvalidProblem("at least one block is required"));
        }
        if self.blocks.iter().any(|b| b.dim == 0) {
            return Err(Error::InvalidProblem("blocks must have positive dimension"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SdpOptions {
    pub max_iterations: usize,
    /// Accuracy required to report [`SdpStatus::Optimal`].
    pub tolerance: f64,
    /// Accuracy the iteration keeps pushing towards while it makes progress.
    pub target: f64,
    /// Fraction-to-boundary factor for step lengths.
    pub step_fraction: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-8,
            target: 1e-11,
            step_fraction: 0.98,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// Objective at the primal iterate, in the problem's own sense.
    pub primal_value: f64,
    /// Objective of the conic dual at the dual iterate.
    pub dual_value: f64,
    /// Primal block values `X_b`.
    pub block_values: Vec<HermitianMatrix>,
    /// Dual slack blocks `S_b`.
    pub dual_slacks: Vec<HermitianMatrix>,
    /// Dual multipliers, one per scalar constraint.
    pub y: Vec<f64>,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// Relative duality gap.
    pub gap: f64,
    pub iterations: usize,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }

    /// Converts a non-optimal status into [`Error::Solver`].
    pub fn require_optimal(self) -> Result<Self> {
        if self.is_optimal() {
            Ok(self)
        } else {
            Err(Error::Solver {
                status: self.status,
                iterations: self.iterations,
                primal_residual: self.primal_residual,
                dual_residual: self.dual_residual,
                gap: self.gap,
            })
        }
    }
}

pub fn solve(problem: &SdpProblem) -> Result<SdpSolution> {
    solve_with(problem, &SdpOptions::default())
}

/// Per-block dense data in the solver's internal minimization form.
struct Workspace {
    dims: Vec<usize>,
    c: Vec<CMatrix>,
    /// `a[i]` lists `(block, A_ib)` for constraint i.
    a: Vec<Vec<(usize, CMatrix)>>,
    b: Vec<f64>,
}

impl Workspace {
    fn new(problem: &SdpProblem) -> Self {
        let sign = match problem.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let dims: Vec<usize> = problem.blocks.iter().map(|b| b.dim).collect();
        let c = problem
            .objective
            .iter()
            .zip(&dims)
            .map(|(o, &d)| match o {
                Some(m) => m.as_cmatrix().scale(sign),
                None => CMatrix::zeros(d),
            })
            .collect();
        let a = problem
            .constraints
            .iter()
            .map(|con| {
                let mut merged: Vec<(usize, CMatrix)> = Vec::new();
                for (blk, m) in &con.terms {
                    match merged.iter_mut().find(|(b, _)| b == blk) {
                        Some((_, acc)) => *acc = acc.add(m.as_cmatrix()),
                        None => merged.push((*blk, m.as_cmatrix().clone())),
                    }
                }
                merged
            })
            .collect();
        let b = problem.constraints.iter().map(|c| c.rhs).collect();
        Self { dims, c, a, b }
    }

    fn operator(&self, x: &[CMatrix]) -> Vec<f64> {
        self.a
            .iter()
            .map(|row| row.iter().map(|(blk, m)| m.re_trace_product(&x[*blk])).sum())
            .collect()
    }

    fn adjoint(&self, y: &[f64]) -> Vec<CMatrix> {
        let mut out: Vec<CMatrix> = self.dims.iter().map(|&d| CMatrix::zeros(d)).collect();
        for (row, &yi) in self.a.iter().zip(y) {
            if yi == 0.0 {
                continue;
            }
            for (blk, m) in row {
                out[*blk].axpy(yi, m);
            }
        }
        out
    }
}

fn inner(x: &[CMatrix], s: &[CMatrix]) -> f64 {
    x.iter().zip(s).map(|(a, b)| a.re_trace_product(b)).sum()
}

fn frob(x: &[CMatrix]) -> f64 {
    x.iter().map(|m| m.frobenius_norm().powi(2)).sum::<f64>().sqrt()
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest `α` with `X + α D ⪰ 0`, given the inverse Cholesky factor of `X`.
fn max_step(linv: &CMatrix, d: &CMatrix) -> Result<f64> {
    let w = linv.matmul(d).matmul(&linv.adjoint());
    let e = hermitian_eig(&HermitianMatrix::from_hermitian_part(&w))?;
    let lmin = *e.values.last().expect("dim >= 1");
    Ok(if lmin < 0.0 { -1.0 / lmin } else { f64::INFINITY })
}

struct Direction {
    dx: Vec<CMatrix>,
    ds: Vec<CMatrix>,
    dy: Vec<f64>,
}

/// Worst accuracy measure, `X`, `S`, `y` and `(pinf, dinf, gap)`.
type Snapshot = (f64, Vec<CMatrix>, Vec<CMatrix>, Vec<f64>, (f64, f64, f64));

pub fn solve_with(problem: &SdpProblem, options: &SdpOptions) -> Result<SdpSolution> {
    problem.validate()?;
    let ws = Workspace::new(problem);
    let nb = ws.dims.len();
    let m = ws.b.len();
    let n_total: usize = ws.dims.iter().sum();

    // Starting point in the style of SDPT3.
    let mut x = Vec::with_capacity(nb);
    let mut s = Vec::with_capacity(nb);
    for (blk, &d) in ws.dims.iter().enumerate() {
        let nd = d as f64;
        let mut xi = 10f64.max(nd.sqrt());
        let mut eta = xi.max(ws.c[blk].frobenius_norm());
        for (row, &bi) in ws.a.iter().zip(&ws.b) {
            for (b2, a) in row {
                if *b2 == blk {
                    let an = a.frobenius_norm();
                    xi = xi.max(nd * (1.0 + bi.abs()) / (1.0 + an));
                    eta = eta.max(an);
                }
            }
        }
        x.push(CMatrix::identity(d).scale(xi));
        s.push(CMatrix::identity(d).scale(eta));
    }
    let mut y = vec![0.0; m];

    let b_norm = norm2(&ws.b);
    let c_norm = frob(&ws.c);

    let status;
    let mut iterations = 0;
    let mut metrics;
    let mut stall = 0usize;
    // Best iterate seen so far, by its worst accuracy measure. Near the
    // optimum round-off can make later iterates slightly worse.
    let mut best: Option<Snapshot> = None;
    let mut since_best = 0usize;

    loop {
        let ax = ws.operator(&x);
        let rp: Vec<f64> = ws.b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let aty = ws.adjoint(&y);
        let rd: Vec<CMatrix> = (0..nb).map(|k| ws.c[k].sub(&aty[k]).sub(&s[k])).collect();
        let pobj = inner(&ws.c, &x);
        let dobj: f64 = ws.b.iter().zip(&y).map(|(a, b)| a * b).sum();
        let mu = inner(&x, &s) / n_total as f64;

        let pinf = norm2(&rp) / (1.0 + b_norm);
        let dinf = frob(&rd) / (1.0 + c_norm);
        let denom = 1.0 + pobj.abs() + dobj.abs();
        let gap = ((pobj - dobj).abs()).max(mu * n_total as f64) / denom;
        metrics = (pinf, dinf, gap);

        let worst = pinf.max(dinf).max(gap);
        if best.as_ref().is_none_or(|b| worst < b.0) {
            best = Some((worst, x.clone(), s.clone(), y.clone(), metrics));
            since_best = 0;
        } else {
            since_best += 1;
        }
        let best_worst = best.as_ref().map_or(f64::INFINITY, |b| b.0);

        if worst <= options.target {
            status = SdpStatus::Optimal;
            break;
        }
        if dobj > 1e10 * (1.0 + pobj.abs()) && dinf < 1e-6 {
            // Dual objective running off to +∞: the primal is infeasible.
            status = SdpStatus::Infeasible;
            break;
        }
        if pobj < -1e10 * (1.0 + dobj.abs()) && pinf < 1e-6 {
            status = SdpStatus::Infeasible;
            break;
        }
        let stuck = stall >= 3 || (best_worst <= options.tolerance && since_best >= 5);
        if iterations >= options.max_iterations || stuck {
            status = if best_worst <= options.tolerance {
                SdpStatus::Optimal
            } else {
                SdpStatus::MaxIterations
            };
            break;
        }
        iterations += 1;

        // Factorizations of the current iterate.
        let mut x_linv = Vec::with_capacity(nb);
        let mut s_inv = Vec::with_capacity(nb);
        let mut s_linv = Vec::with_capacity(nb);
        let mut ok = true;
        for k in 0..nb {
            match (cholesky(&x[k]), cholesky(&s[k])) {
                (Some(lx), Some(ls)) => {
                    x_linv.push(lower_triangular_inverse(&lx));
                    let li = lower_triangular_inverse(&ls);
                    s_inv.push(li.adjoint().matmul(&li));
                    s_linv.push(li);
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            stall = usize::MAX / 2;
            continue;
        }

        // Schur complement M_ij = Σ_b Re Tr(A_ib X_b A_jb S_b⁻¹).
        let t: Vec<Vec<(usize, CMatrix)>> = ws
            .a
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(blk, a)| (*blk, x[*blk].matmul(a).matmul(&s_inv[*blk])))
                    .collect()
            })
            .collect();
        let mut schur = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let mut v = 0.0;
                for (bi, ai) in &ws.a[i] {
                    for (bj, tj) in &t[j] {
                        if bi == bj {
                            v += ai.re_trace_product(tj);
                        }
                    }
                }
                schur[i * m + j] = v;
                schur[j * m + i] = v;
            }
        }

        let solve_direction = |rc: &[CMatrix]| -> Option<Direction> {
            // G_b = (Rc_b - X_b Rd_b) S_b⁻¹
            let g: Vec<CMatrix> = (0..nb)
                .map(|k| rc[k].sub(&x[k].matmul(&rd[k])).matmul(&s_inv[k]))
                .collect();
            let g_sym: Vec<CMatrix> = g.iter().map(CMatrix::hermitian_part).collect();
            let ag = ws.operator(&g_sym);
            let rhs: Vec<f64> = rp.iter().zip(&ag).map(|(r, a)| r - a).collect();
            let dy = solve_regularized(&schur, m, &rhs)?;
            let ady = ws.adjoint(&dy);
            let ds: Vec<CMatrix> = (0..nb).map(|k| rd[k].sub(&ady[k])).collect();
            let dx: Vec<CMatrix> = (0..nb)
                .map(|k| {
                    g[k].add(&x[k].matmul(&ady[k]).matmul(&s_inv[k]))
                        .hermitian_part()
                })
                .collect();
            Some(Direction { dx, ds, dy })
        };

        let steps = |dir: &Direction| -> Result<(f64, f64)> {
            let mut ap = f64::INFINITY;
            let mut ad = f64::INFINITY;
            for k in 0..nb {
                ap = ap.min(max_step(&x_linv[k], &dir.dx[k])?);
                ad = ad.min(max_step(&s_linv[k], &dir.ds[k])?);
            }
            Ok((ap, ad))
        };

        // Predictor.
        let xs: Vec<CMatrix> = (0..nb).map(|k| x[k].matmul(&s[k])).collect();
        let rc_aff: Vec<CMatrix> = xs.iter().map(|z| z.scale(-1.0)).collect();
        let Some(aff) = solve_direction(&rc_aff) else {
            stall = usize::MAX / 2;
            continue;
        };
        let (ap_max, ad_max) = steps(&aff)?;
        let ap = ap_max.min(1.0);
        let ad = ad_max.min(1.0);
        let mut mu_aff = 0.0;
        for k in 0..nb {
            let mut xk = x[k].clone();
            xk.axpy(ap, &aff.dx[k]);
            let mut sk = s[k].clone();
            sk.axpy(ad, &aff.ds[k]);
            mu_aff += xk.re_trace_product(&sk);
        }
        mu_aff /= n_total as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector.
        let rc: Vec<CMatrix> = (0..nb)
            .map(|k| {
                let d = ws.dims[k];
                CMatrix::identity(d)
                    .scale(sigma * mu)
                    .sub(&xs[k])
                    .sub(&aff.dx[k].matmul(&aff.ds[k]))
            })
            .collect();
        let Some(dir) = solve_direction(&rc) else {
            stall = usize::MAX / 2;
            continue;
        };
        let (ap_max, ad_max) = steps(&dir)?;
        let ap = (options.step_fraction * ap_max).min(1.0);
        let ad = (options.step_fraction * ad_max).min(1.0);

        for k in 0..nb {
            x[k].axpy(ap, &dir.dx[k]);
            s[k].axpy(ad, &dir.ds[k]);
            x[k] = x[k].hermitian_part();
            s[k] = s[k].hermitian_part();
        }
        for (yi, dyi) in y.iter_mut().zip(&dir.dy) {
            *yi += ad * dyi;
        }
        if ap.max(ad) < 1e-10 {
            stall += 1;
        } else {
            stall = 0;
        }
    }

    if status != SdpStatus::Infeasible {
        if let Some((_, bx, bs, by, bm)) = best {
            x = bx;
            s = bs;
            y = by;
            metrics = bm;
        }
    }

    let sign = match problem.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let pobj = inner(&ws.c, &x);
    let dobj: f64 = ws.b.iter().zip(&y).map(|(a, b)| a * b).sum();
    Ok(SdpSolution {
        status,
        primal_value: sign * pobj,
        dual_value: sign * dobj,
        block_values: x.iter().map(HermitianMatrix::from_hermitian_part).collect(),
        dual_slacks: s.iter().map(HermitianMatrix::from_hermitian_part).collect(),
        y: y.iter().map(|v| sign * v).collect(),
        primal_residual: metrics.0,
        dual_residual: metrics.1,
        gap: metrics.2,
        iterations,
    })
}

/// Cholesky solve with a growing diagonal shift when the Schur complement
/// has become numerically semidefinite.
fn solve_regularized(a: &[f64], n: usize, b: &[f64]) -> Option<Vec<f64>> {
    if n == 0 {
        return Some(Vec::new());
    }
    if let Some(x) = spd_solve(a, n, b) {
        return Some(refine(a, n, b, x));
    }
    let scale = (0..n).map(|i| a[i * n + i].abs()).fold(0.0f64, f64::max).max(1e-300);
    let mut shift = 1e-14 * scale;
    let mut work = a.to_vec();
    for _ in 0..8 {
        for i in 0..n {
            work[i * n + i] = a[i * n + i] + shift;
        }
        if let Some(x) = spd_solve(&work, n, b) {
            return Some(refine(a, n, b, x));
        }
        shift *= 100.0;
    }
    None
}

/// One step of iterative refinement against the unshifted matrix.
fn refine(a: &[f64], n: usize, b: &[f64], mut x: Vec<f64>) -> Vec<f64> {
    let r: Vec<f64> = (0..n)
        .map(|i| b[i] - (0..n).map(|j| a[i * n + j] * x[j]).sum::<f64>())
        .collect();
    if let Some(dx) = spd_solve(a, n, &r) {
        for (xi, di) in x.iter_mut().zip(dx) {
            *xi += di;
        }
    }
    x
}

/// `minimize cᵀy  subject to  F0_b + Σ_i y_i F_ib ⪰ 0` for every block b,
/// with free real variables `y`.
#[derive(Clone, Debug)]
pub struct LmiProblem {
    cost: Vec<f64>,
    blocks: Vec<Block>,
    constants: Vec<HermitianMatrix>,
    /// `coefficients[i]` lists `(block, F_ib)`.
    coefficients: Vec<Vec<(usize, HermitianMatrix)>>,
}

#[derive(Clone, Debug)]
pub struct LmiSolution {
    pub status: SdpStatus,
    /// `cᵀy` at the returned point.
    pub value: f64,
    pub y: Vec<f64>,
    /// `F0_b + Σ y_i F_ib` per block.
    pub slacks: Vec<HermitianMatrix>,
    /// The underlying standard-form solve, whose primal is the Lagrange dual.
    pub inner: SdpSolution,
}

impl LmiProblem {
    pub fn new(cost: Vec<f64>) -> Self {
        let n = cost.len();
        Self {
            cost,
            blocks: Vec::new(),
            constants: Vec::new(),
            coefficients: vec![Vec::new(); n],
        }
    }

    pub fn num_variables(&self) -> usize {
        self.cost.len()
    }

    /// Adds an inequality block with constant term `F0` and returns its index.
    pub fn add_block(&mut self, label: impl Into<String>, constant: HermitianMatrix) -> usize {
        self.blocks.push(Block {
            label: label.into(),
            dim: constant.dim(),
        });
        self.constants.push(constant);
        self.blocks.len() - 1
    }

    pub fn set_coefficient(&mut self, var: usize, block: usize, f: HermitianMatrix) -> Result<()> {
        let b = self
            .blocks
            .get(block)
            .ok_or(Error::InvalidProblem("coefficient references an unknown block"))?;
        if b.dim != f.dim() {
            return Err(Error::ShapeMismatch {
                what: "LMI block dimension",
                expected: b.dim,
                found: f.dim(),
            });
        }
        let slot = self
            .coefficients
            .get_mut(var)
            .ok_or(Error::InvalidProblem("coefficient references an unknown variable"))?;
        slot.retain(|(blk, _)| *blk != block);
        slot.push((block, f));
        Ok(())
    }

    /// Standard form whose conic dual is this LMI: `C = F0`, `A_i = -F_i`,
    /// `b = -c`.
    pub fn to_sdp(&self) -> SdpProblem {
        let mut p = SdpProblem::new(Sense::Minimize);
        for (blk, f0) in self.blocks.iter().zip(&self.constants) {
            let id = p.add_block(blk.label.clone(), blk.dim);
            p.set_objective(id, f0.clone()).expect("dims checked");
        }
        for (coefs, &ci) in self.coefficients.iter().zip(&self.cost) {
            let terms = coefs.iter().map(|(b, f)| (*b, f.scale(-1.0))).collect();
            p.add_constraint(terms, -ci).expect("dims checked");
        }
        p
    }

    pub fn slack_at(&self, y: &[f64]) -> Vec<HermitianMatrix> {
        self.constants
            .iter()
            .enumerate()
            .map(|(blk, f0)| {
                let mut acc = f0.clone();
                for (coefs, &yi) in self.coefficients.iter().zip(y) {
                    for (b, f) in coefs {
                        if *b == blk {
                            acc.axpy(yi, f);
                        }
                    }
                }
                acc
            })
            .collect()
    }

    pub fn solve(&self) -> Result<LmiSolution> {
        self.solve_with(&SdpOptions::default())
    }

    pub fn solve_with(&self, options: &SdpOptions) -> Result<LmiSolution> {
        if self.blocks.is_empty() {
            return Err(Error::InvalidProblem("at least one block is required"));
        }
        let inner = solve_with(&self.to_sdp(), options)?;
        let y = inner.y.clone();
        let value = self.cost.iter().zip(&y).map(|(c, v)| c * v).sum();
        let slacks = self.slack_at(&y);
        Ok(LmiSolution {
            status: inner.status,
            value,
            y,
            slacks,
            inner,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::lambda_max;
    use crate::measurements::{sigma_x, sigma_y, sigma_z};

    #[test]
    fn scalar_lmi() {
        // minimize t  s.t.  t - 5 ≥ 0
        let mut lmi = LmiProblem::new(vec![1.0]);
        let b = lmi.add_block("t", HermitianMatrix::diagonal(&[-5.0]));
        lmi.set_coefficient(0, b, HermitianMatrix::diagonal(&[1.0])).unwrap();
        let sol = lmi.solve().unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.value - 5.0).abs() < 1e-8, "{}", sol.value);
    }

    #[test]
    fn lambda_max_of_pauli_combination() {
        let h = HermitianMatrix::combination(2, [(0.3, &sigma_x()), (-0.4, &sigma_y()), (0.1, &sigma_z())]);
        let mut lmi = LmiProblem::new(vec![1.0]);
        let b = lmi.add_block("tI - H", h.scale(-1.0));
        lmi.set_coefficient(0, b, HermitianMatrix::identity(2)).unwrap();
        let sol = lmi.solve().unwrap();
        assert!(sol.inner.is_optimal());
        let expect = lambda_max(&h).unwrap();
        assert!((sol.value - expect).abs() < 1e-7);
        // The primal side is max <H, ρ> over density matrices.
        assert!((-sol.inner.primal_value - expect).abs() < 1e-7);
    }

    #[test]
    fn maximize_sense() {
        // maximize <diag(1, 2), X>  s.t.  Tr X = 1
        let mut p = SdpProblem::new(Sense::Maximize);
        let x = p.add_block("X", 2);
        p.set_objective(x, HermitianMatrix::diagonal(&[1.0, 2.0])).unwrap();
        p.add_constraint(vec![(x, HermitianMatrix::identity(2))], 1.0).unwrap();
        let sol = solve(&p).unwrap();
        assert!(sol.is_optimal());
        assert!((sol.primal_value - 2.0).abs() < 1e-8);
        assert!((sol.dual_value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn infeasible_problem_is_not_reported_optimal() {
        // X ⪰ 0 with Tr X = -1 has no solution.
        let mut p = SdpProblem::new(Sense::Minimize);
        let x = p.add_block("X", 1);
        p.add_constraint(vec![(x, HermitianMatrix::identity(1))], -1.0).unwrap();
        let sol = solve(&p).unwrap();
        assert_ne!(sol.status, SdpStatus::Optimal);
        assert!(sol.require_optimal().is_err());
    }

    #[test]
    fn matrix_equality_pins_a_block() {
        // minimize Tr X  s.t.  X = H  for a PSD target H.
        let h = HermitianMatrix::from_parts(
            &[vec![2.0, 0.5], vec![0.5, 1.0]],
            &[vec![0.0, 0.3], vec![-0.3, 0.0]],
        )
        .unwrap();
        let mut p = SdpProblem::new(Sense::Minimize);
        let x = p.add_block("X", 2);
        p.set_objective(x, HermitianMatrix::identity(2)).unwrap();
        p.add_matrix_equality(&[(x, 1.0)], &h).unwrap();
        let sol = solve(&p).unwrap();
        assert!(sol.is_optimal());
        assert!(sol.block_values[0].sub(&h).max_abs() < 1e-7);
    }

    #[test]
    fn malformed_problems_are_rejected() {
        let p = SdpProblem::new(Sense::Minimize);
        assert!(matches!(solve(&p), Err(Error::InvalidProblem(_))));
        let mut p = SdpProblem::new(Sense::Minimize);
        let x = p.add_block("X", 2);
        assert!(matches!(
            p.add_constraint(vec![(x, HermitianMatrix::identity(3))], 1.0),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(p.add_constraint(vec![(7, HermitianMatrix::identity(2))], 1.0).is_err());
    }
}
