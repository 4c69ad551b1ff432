//! Parameter sweeps over the deformed and biased CHSH families with Alice
//! holding `(σ_X, y σ_Y)`.
//!
//! The compatibility norm of a qubit pair coincides with its CHSH norm, so
//! `norm_c` is evaluated through [`m_bell_norm`] with [`chsh`] instead of one
//! SDP per grid point.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bellnorm::{m_bell_norm, LOCALITY_TOL};
use crate::error::{Error, Result};
use crate::games::{biased_chsh, chsh, deformed_chsh, normalize};
use crate::measurements::pauli_pair;

/// Smallest `t` for which `(σ_X, σ_Y)` violates the normalized deformed game.
pub fn t_star() -> f64 {
    (9.0 - 4.0 * core::f64::consts::SQRT_2) / 7.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeformedRecord {
    pub y: f64,
    pub t: f64,
    pub norm_m: f64,
    pub norm_c: f64,
    pub ratio: f64,
    pub violated: bool,
    pub invertible: bool,
}

impl DeformedRecord {
    pub const FIELDS: [&'static str; 7] = ["y", "t", "norm_m", "norm_c", "ratio", "violated", "invertible"];
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiasedRecord {
    pub y: f64,
    pub p: f64,
    pub q: f64,
    pub norm_g: f64,
    pub norm_c: f64,
    pub ratio: f64,
    pub violated: bool,
    pub invertible: bool,
}

impl BiasedRecord {
    pub const FIELDS: [&'static str; 8] = ["y", "p", "q", "norm_g", "norm_c", "ratio", "violated", "invertible"];
}

/// `(√(1+(yt)²) + √(1+y²)) / (2+|t-1|)`.
pub fn deformed_closed_form(y: f64, t: f64) -> f64 {
    ((1.0 + (y * t) * (y * t)).sqrt() + (1.0 + y * y).sqrt()) / (2.0 + (t - 1.0).abs())
}

/// Closed form of `‖(σ_X, yσ_Y)‖` for the normalized biased game.
pub fn biased_closed_form(y: f64, p: f64, q: f64) -> f64 {
    let (p1, q1) = (1.0 - p, 1.0 - q);
    let a = (p * p * q * q + y * y * q * q * p1 * p1).sqrt();
    let b = (p * p * q1 * q1 + y * y * p1 * p1 * q1 * q1).sqrt();
    let beta = 1.0 - 2.0 * p.min(p1) * q.min(q1);
    (a + b) / beta.abs()
}

pub fn deformed_point(y: f64, t: f64) -> Result<DeformedRecord> {
    let game = deformed_chsh(t);
    let a = pauli_pair(1.0, y);
    let norm_m = m_bell_norm(&a, &normalize(&game)?)?.value;
    let norm_c = m_bell_norm(&a, &chsh())?.value;
    Ok(DeformedRecord {
        y,
        t,
        norm_m,
        norm_c,
        ratio: norm_m / norm_c,
        violated: norm_m > 1.0 + LOCALITY_TOL,
        invertible: game.is_invertible(),
    })
}

pub fn biased_point(y: f64, p: f64, q: f64) -> Result<BiasedRecord> {
    let game = biased_chsh(p, q)?;
    let a = pauli_pair(1.0, y);
    let norm_g = m_bell_norm(&a, &normalize(&game)?)?.value;
    let norm_c = m_bell_norm(&a, &chsh())?.value;
    Ok(BiasedRecord {
        y,
        p,
        q,
        norm_g,
        norm_c,
        ratio: norm_g / norm_c,
        violated: norm_g > 1.0 + LOCALITY_TOL,
        invertible: game.is_invertible(),
    })
}

fn non_empty(grid: &[f64], what: &'static str) -> Result<()> {
    if grid.is_empty() {
        Err(Error::Empty { what })
    } else {
        Ok(())
    }
}

/// Records in `y`-major order.
pub fn scan_deformed_chsh(y_grid: &[f64], t_grid: &[f64]) -> Result<Vec<DeformedRecord>> {
    non_empty(y_grid, "y grid")?;
    non_empty(t_grid, "t grid")?;
    y_grid
        .iter()
        .flat_map(|&y| t_grid.iter().map(move |&t| deformed_point(y, t)))
        .collect()
}

/// Records ordered by `y`, then `p`, then `q`.
pub fn scan_biased_chsh(y_grid: &[f64], p_grid: &[f64], q_grid: &[f64]) -> Result<Vec<BiasedRecord>> {
    non_empty(y_grid, "y grid")?;
    non_empty(p_grid, "p grid")?;
    non_empty(q_grid, "q grid")?;
    let mut out = Vec::with_capacity(y_grid.len() * p_grid.len() * q_grid.len());
    for &y in y_grid {
        for &p in p_grid {
            for &q in q_grid {
                out.push(biased_point(y, p, q)?);
            }
        }
    }
    Ok(out)
}

/// Inclusive grid `start, start + step, …, stop`, with the point count
/// rounded so that `stop` is hit despite floating-point steps.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::InvalidProblem("grid needs finite start <= stop and step > 0"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| {
            let v = start + i as f64 * step;
            // Snap round-off such as 0.30000000000000004 to the nearest
            // multiple of 1e-12.
            libm::round(v * 1e12) / 1e12
        })
        .collect())
}

pub fn default_y_grid() -> Vec<f64> {
    linear_grid(-1.0, 1.0, 0.01).expect("valid grid")
}

pub fn default_t_curves() -> Vec<f64> {
    alloc::vec![-4.0, -2.0, 0.0, 0.5, 1.0, 2.0, 4.0]
}

pub fn default_t_region() -> Vec<f64> {
    linear_grid(-4.0, 4.0, 0.02).expect("valid grid")
}

/// Bisection for the violation boundary `‖(σ_X, σ_Y)‖_{M'_t} = 1` on `[lo, hi]`
/// using the norm itself (not the closed form).
pub fn violation_boundary(y: f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let f = |t: f64| deformed_point(y, t).map(|r| r.norm_m - 1.0);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo.signum() == fhi.signum() {
        return Err(Error::InvalidProblem("bisection interval does not bracket the boundary"));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid)? > 0.0) == (fhi > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
