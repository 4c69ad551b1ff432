//! Self-verification suite: twelve numerical criteria with pass/fail
//! reports.
//!
//! Every tolerance is multiplied by [`VerifyOptions::tolerance_scale`], so a
//! scale well below one shows which checks are sensitive to solver accuracy.

use std::time::Instant;

use belltensor_core::bellnorm::{m_bell_norm, seesaw_restart, vector_m_norm, SeesawOptions};
use belltensor_core::compat::{compatibility_norm, epsilon_star_dual, epsilon_star_primal, gamma_from_effects, gamma_threshold};
use belltensor_core::games::{
    chsh, classical_bias, i3322, is_scaled_hadamard, linf_injective_norm, quantum_bias_sdp,
    uncertainty_product, GameMatrix, GROTHENDIECK_BOUND,
};
use belltensor_core::measurements::{observable_from_effect, pauli_pair, pauli_tuple};
use belltensor_core::scan::{biased_closed_form, deformed_closed_form, linear_grid, t_star, violation_boundary};
use belltensor_core::measurements::MeasurementTuple;
use belltensor_core::{sample, RealMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::parallel::{install, scan_biased, scan_deformed};

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
}

pub const CRITERIA: [Criterion; 12] = [
    Criterion { id: 1, name: "Pauli pair compatibility norm" },
    Criterion { id: 2, name: "Pauli triple compatibility norm" },
    Criterion { id: 3, name: "CHSH norm equals compatibility norm on qubit pairs" },
    Criterion { id: 4, name: "Deformed CHSH closed form and violation boundary" },
    Criterion { id: 5, name: "Biased CHSH closed form" },
    Criterion { id: 6, name: "I3322 thresholds" },
    Criterion { id: 7, name: "Comparison theorems" },
    Criterion { id: 8, name: "Strong duality and two-route noise threshold" },
    Criterion { id: 9, name: "Uncertainty relation and Hadamard saturation" },
    Criterion { id: 10, name: "See-saw lower bound" },
    Criterion { id: 11, name: "Quantum bias" },
    Criterion { id: 12, name: "Norm axioms" },
];

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub tolerance_scale: f64,
    pub seed: u64,
    /// Criterion ids to run; empty runs all of them.
    pub only: Vec<u8>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tolerance_scale: 1.0,
            seed: 0,
            only: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_secs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

/// Counts trials of one check and keeps the worst deviation. A trial fails
/// when its deviation exceeds the tolerance.
struct Tally {
    label: &'static str,
    tol: f64,
    trials: usize,
    failures: usize,
    worst: f64,
    first_failure: Option<String>,
}

impl Tally {
    fn new(label: &'static str, tol: f64) -> Self {
        Tally {
            label,
            tol,
            trials: 0,
            failures: 0,
            worst: f64::NEG_INFINITY,
            first_failure: None,
        }
    }

    fn record(&mut self, deviation: f64, context: impl FnOnce() -> String) {
        self.trials += 1;
        self.worst = self.worst.max(deviation);
        if deviation.is_nan() || deviation > self.tol {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(context());
            }
        }
    }

    /// Records a boolean condition as deviation 0 or 1 against tolerance 0.
    fn flag(&mut self, ok: bool, context: impl FnOnce() -> String) {
        self.record(if ok { 0.0 } else { 1.0 }, context);
    }

    fn passed(&self) -> bool {
        self.failures == 0 && self.trials > 0
    }

    fn summary(&self) -> String {
        let mut s = format!(
            "{}: {}/{} ok, worst {:.3e} (tol {:.1e})",
            self.label,
            self.trials - self.failures,
            self.trials,
            self.worst,
            self.tol
        );
        if let Some(f) = &self.first_failure {
            s.push_str(&format!("; first failure: {f}"));
        }
        s
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn from_tallies(tallies: &[Tally], extra: &[(bool, String)]) -> Self {
        let passed = tallies.iter().all(Tally::passed) && extra.iter().all(|e| e.0);
        let mut parts: Vec<String> = tallies.iter().map(Tally::summary).collect();
        parts.extend(extra.iter().map(|e| e.1.clone()));
        Outcome {
            passed,
            detail: parts.join("; "),
        }
    }
}

fn rng_for(seed: u64, criterion: u8, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(criterion) << 56));
    rng.set_stream(trial as u64);
    rng
}

/// Runs `f` over `0..n` on the worker pool, keeping trial order.
fn trials<T: Send>(n: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    install(|| (0..n).into_par_iter().map(&f).collect::<Result<Vec<T>>>())?
}

fn evenly_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn c1_pauli_pair(_: &VerifyOptions, scale: f64) -> Result<Outcome> {
    let start = Instant::now();
    let ys = evenly_spaced(-1.0, 1.0, 50);
    let values = trials(ys.len(), |i| {
        let a = pauli_pair(1.0, ys[i]);
        Ok((compatibility_norm(&a)?, m_bell_norm(&a, &chsh())?.value))
    })?;
    let mut sdp = Tally::new("SDP route", 1e-5 * scale);
    let mut chsh_route = Tally::new("CHSH route", 1e-9 * scale);
    for (y, (c, m)) in ys.iter().zip(values) {
        let exact = (1.0 + y * y).sqrt();
        sdp.record((c - exact).abs(), || format!("y={y}: {c} vs {exact}"));
        chsh_route.record((m - exact).abs(), || format!("y={y}: {m} vs {exact}"));
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Outcome::from_tallies(
        &[sdp, chsh_route],
        &[(secs < 30.0, format!("runtime {secs:.2}s (limit 30s)"))],
    ))
}

fn c2_pauli_triple(o: &VerifyOptions, scale: f64) -> Result<Outcome> {
    let start = Instant::now();
    let values = trials(100, |i| {
        let mut rng = rng_for(o.seed, 2, i);
        let (x, y, z): (f64, f64, f64) = (rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0));
        Ok(((x, y, z), compatibility_norm(&pauli_tuple(x, y, z))?))
    })?;
    let mut t = Tally::new("‖(xX, yY, zZ)‖_c", 1e-5 * scale);
    for ((x, y, z), c) in values {
        let exact = (x * x + y * y + z * z).sqrt();
        t.record((c - exact).abs(), || format!("({x}, {y}, {z}): {c} vs {exact}"));
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Outcome::from_tallies(&[t], &[(secs < 120.0, format!("runtime {secs:.2}s (limit 120s)"))]))
}

fn c3_chsh_identity(o: &VerifyOptions, scale: f64) -> Result<Outcome> {
    let values = trials(500, |i| {
        let mut rng = rng_for(o.seed, 3, i);
        let a = sample::tuple(&mut rng, 2, 2)?;
        Ok((compatibility_norm(&a)?, m_bell_norm(&a, &chsh())?.value))
    })?;
    let mut t = Tally::new("|‖A‖_c - ‖A‖_CHSH|", 1e-5 * scale);
    for (i, (c, m)) in values.into_iter().enumerate() {
        t.record((c - m).abs(), || format!("trial {i}: {c} vs {m}"));
    }
    Ok(Outcome::from_tallies(&[t], &[]))
}

fn c4_deformed(_: &VerifyOptions, scale: f64) -> Result<Outcome> {
    let ys = linear_grid(-1.0, 1.0, 0.01)?;
    let ts = linear_grid(-4.0, 4.0, 0.05)?;
    let records = scan_deformed(&ys, &ts)?;
    let mut closed = Tally::new(
        "closed form on the 201x161 grid",
        1e-9 * scale,
    );
    for r in &records {
        let exact = deformed_closed_form(r.y, r.t);
        closed.record((r.norm_m - exact).abs(), || format!("(y={}, t={}): {} vs {exact}", r.y, r.t, r.norm_m));
    }
    let row: Vec<_> = records.iter().filter(|r| r.y == 1.0).collect();
    let bracket = row.windows(2).find(|w| !w[0].violated && w[1].violated).map(|w| (w[0].t, w[1].t));
    let mut boundary = Tally::new("y=1 boundary vs (9-4√2)/7", 1e-6 * scale);
    match bracket {
        Some((lo, hi)) => {
            let t = violation_boundary(1.0, lo, hi, 1e-12)?;
            boundary.record((t - t_star()).abs(), || format!("bisection gave {t}, expected {}", t_star()));
        }
        None => boundary.flag(false, || "no sign change on the y=1 row".into()),
    }
    Ok(Outcome::from_tallies(
        &[closed, boundary],
        &[(records.len() == 201 * 161, format!("{} grid points", records.len()))],
    ))
}

fn c5_biased(_: &VerifyOptions, scale: f64) -> Result<Outcome> {
    let ys = linear_grid(-1.0, 1.0, 0.1)?;
    let ps = linear_grid(0.0, 1.0, 0.05)?;
    let records = scan_biased(&ys, &ps, &ps)?;
    let mut closed = Tally::new("closed form on the (y, p, q) grid", 1e-9 * scale);
    let mut half = Tally::new("p=1/2 simplification", 1e-9 * scale);
    for r in &records {
        let exact = biased_closed_form(r.y, r.p, r.q);
        closed.record((r.norm_g - exact).abs(), || {
            format!("(y={}, p={}, q={}): {} vs {exact}", r.y, r.p, r.q, r.norm_g)
        });
        if r.p == 0.5 {
            let simple = (1.0 + r.y * r.y).sqrt() / (2.0 * r.q.max(1.0 - r.q));
            half.record((r.norm_g - simple).abs(), || format!("(y={}, q={}): {} vs {simple}", r.y, r.q, r.norm_g));
        }
    }
    Ok(Outcome::from_tallies(&[closed, half], &[]))
}

/// Largest `s ≥ 0` with `f(s) ≤ 1`, for `f` increasing with `f(0) = 0`.
fn largest_unit_scale(f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let mut hi = 1.0;
    while f(hi)? <= 1.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? <= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn c6_i3322(_: &VerifyOptions, scale: f64) -> Result<Outcome> {
    let triple = pauli_tuple(1.0, 1.0, 1.0);
    let s_c = largest_unit_scale(|s| compatibility_norm(&triple.scale(s)).map_err(Into::into))?;
    let s_m = largest_unit_scale(|s| Ok(m_bell_norm(&triple.scale(s), &i3322())?.value))?;
    let exact_c = 1.0 / 3f64.sqrt();
    let exact_m = 4.0 / (2f64.sqrt() + 2.0 * 3f64.sqrt());
    let mut c = Tally::new("compatibility threshold vs 1/√3", 1e-5 * scale);
    c.record((s_c - exact_c).abs(), || format!("{s_c} vs {exact_c}"));
    let mut m = Tally::new("I3322 threshold vs 4/(√2+2√3)", 1e-6 * scale);
    m.record((s_m - exact_m).abs(), || format!("{s_m} vs {exact_m}"));
    Ok(Outcome::from_tallies(
        &[c, m],
        &[(s_c < s_m, format!("gap interval ({s_c:.9}, {s_m:.9}]"))],
    ))
}

const SHAPES: [(usize, usize); 4] = [(2, 2), (2, 3), (3, 2), (3, 3)];

fn c7_comparison(o: &VerifyOptions, scale: f64) -> Result<Outcome> {
    let values = trials(1000, |i| {
        let (d, n) = SHAPES[i % SHAPES.len()];
        let mut rng = rng_for(o.seed, 7, i);
        let a = sample::tuple(&mut rng, n, d)?;
        let g = sample::invertible_game(&mut rng, n)?;
        let c = compatibility_norm(&a)?;
        let m = m_bell_norm(&a, &g)?.value;
        Ok((c, m, classical_bias(&g)?, linf_injective_norm(g.require_inverse()?)))
    })?;
    let mut upper = Tally::new("‖A‖_M ≤ ‖A‖_c β(M)", 1e-6 * scale);
    let mut lower = Tally::new("‖A‖_c ≤ ‖A‖_M max|M⁻¹|", 1e-6 * scale);
    for (i, (c, m, beta, inv)) in values.into_iter().enumerate() {
        upper.record(m - c * beta, || format!("trial {i}: {m} > {c}·{beta}"));
        lower.record(c - m * inv, || format!("trial {i}: {c} > {m}·{inv}"));
    }
    Ok(Outcome::from_tallies(&[upper, lower], &[]))
}

fn c8_duality(o: &VerifyOptions, scale: f64) -> Result<Outcome> {
    let values = trials(200, |i| {
        let mut rng = rng_for(o.seed, 8, i);
        let p = sample::effect(&mut rng, 2)?;
        let q = sample::effect(&mut rng, 2)?;
        let a = MeasurementTuple::new(vec![
            observable_from_effect(&p)?.into_matrix(),
            observable_from_effect(&q)?.into_matrix(),
        ])?;
        Ok((
            epsilon_star_primal(&p, &q)?,
            epsilon_star_dual(&p, &q)?,
            gamma_from_effects(&p, &q)?,
            gamma_threshold(&a)?,
        ))
    })?;
    let mut dual = Tally::new("|ε0 - ε*|", 1e-6 * scale);
    let mut gamma = Tally::new("|1/(1+2ε*) - 1/‖A‖_c|", 1e-5 * scale);
    for (i, (e0, es, g1, g2)) in values.into_iter().enumerate() {
        dual.record((e0 - es).abs(), || format!("trial {i}: {e0} vs {es}"));
        gamma.record((g1 - g2).abs(), || format!("trial {i}: {g1} vs {g2}"));
    }
    Ok(Outcome::from_tallies(&[dual, gamma], &[]))
}

/// A 2x2 candidate whose entries often share one magnitude, so that
/// Hadamard and near-Hadamard matrices both show up.
fn hadamard_candidate(rng: &mut ChaCha8Rng) -> Result<GameMatrix> {
    let a: f64 = rng.gen_range(0.1..3.0);
    let entries: Vec<f64> = (0..4)
        .map(|_| {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let mag = match rng.gen_range(0..8) {
                0 => a * rng.gen_range(0.5..1.5),
                1 => a * (1.0 + 1e-6),
                _ => a,
            };
            sign * mag
        })
        .collect();
    Ok(GameMatrix::new(RealMatrix::from_fn(2, 2, |i, j| entries[2 * i + j]))?)
}

fn c9_uncertainty(o: &VerifyOptions, scale: f64) -> Result<Outcome> {
    let mut bound = Tally::new("product ≥ √(N/2)", 1e-9 * scale);
    for n in 2..=6 {
        let values = trials(500, |i| {
            let mut rng = rng_for(o.seed, 9, n * 1000 + i);
            Ok(uncertainty_product(&sample::invertible_game(&mut rng, n)?)?)
        })?;
        let floor = (n as f64 / 2.0).sqrt();
        for (i, u) in values.into_iter().enumerate() {
            bound.record(floor - u, || format!("N={n} trial {i}: {u} < {floor}"));
        }
    }

    let mut saturation = Tally::new("product = 1 exactly for scaled Hadamard", 0.0);
    let mut hadamards = 0usize;
    let mut invertible = 0usize;
    let tol = 1e-9 * scale;
    for i in 0..10_000 {
        let mut rng = rng_for(o.seed, 9, 100_000 + i);
        let g = if i % 2 == 0 {
            hadamard_candidate(&mut rng)?
        } else {
            sample::game(&mut rng, 2)?
        };
        if !g.is_invertible() {
            continue;
        }
        invertible += 1;
        let u = uncertainty_product(&g)?;
        let scale_tol = tol * g.matrix().max_abs().max(1.0);
        let had = is_scaled_hadamard(&g, scale_tol);
        hadamards += usize::from(had);
        saturation.flag(((u - 1.0).abs() <= tol) == had, || {
            format!("candidate {i}: product {u}, hadamard {had}")
        });
    }
    let mut family = Tally::new("a·M_CHSH family", tol);
    for a in [-5.0, -1.0, -0.25, 0.01, 0.5, 1.0, 2.0, 7.5, 100.0] {
        let g = chsh().scale(a)?;
        let u = uncertainty_product(&g)?;
        family.record((u - 1.0).abs(), || format!("a={a}: {u}"));
    }
    Ok(Outcome::from_tallies(
        &[bound, saturation, family],
        &[(hadamards > 0, format!("{hadamards} Hadamard among {invertible} invertible candidates"))],
    ))
}

fn c10_seesaw(o: &VerifyOptions, scale: f64) -> Result<Outcome> {
    let opts = SeesawOptions {
        restarts: 20,
        iters: 1000,
        seed: o.seed,
        ..SeesawOptions::default()
    };
    let values = trials(100, |i| {
        let (d, n) = SHAPES[i % SHAPES.len()];
        let mut rng = rng_for(o.seed, 10, i);
        let a = sample::tuple(&mut rng, n, d)?;
        let g = sample::invertible_game(&mut rng, n)?;
        let exact = m_bell_norm(&a, &g)?.value;
        let mut best = f64::NEG_INFINITY;
        let mut max_decrease = 0.0f64;
        let mut above = f64::NEG_INFINITY;
        for r in 0..opts.restarts {
            let run = seesaw_restart(&a, &g, r, &opts)?;
            best = best.max(run.value);
            max_decrease = max_decrease.max(run.max_decrease());
            above = above.max(run.history.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) - exact);
        }
        Ok((exact, best, max_decrease, above))
    })?;
    let mut reach = Tally::new("best of 20 restarts reaches ‖A‖_M", 1e-4 * scale);
    let mut monotone = Tally::new("per-iteration decrease", 1e-12 * scale);
    let mut below = Tally::new("iterates above ‖A‖_M", 1e-9 * scale);
    for (i, (exact, best, dec, above)) in values.into_iter().enumerate() {
        reach.record((exact - best).abs(), || format!("instance {i}: {best} vs {exact}"));
        monotone.record(dec, || format!("instance {i}: decrease {dec:e}"));
        below.record(above, || format!("instance {i}: iterate exceeds by {above:e}"));
    }
    Ok(Outcome::from_tallies(&[reach, monotone, below], &[]))
}

fn c11_quantum_bias(o: &VerifyOptions, scale: f64) -> Result<Outcome> {
    let mut tsirelson = Tally::new("β*(CHSH) vs √2", 1e-5 * scale);
    let q = quantum_bias_sdp(&chsh())?;
    tsirelson.record((q - 2f64.sqrt()).abs(), || format!("{q}"));
    let values = trials(200, |i| {
        let mut rng = rng_for(o.seed, 11, i);
        let g = sample::game(&mut rng, 2 + i % 3)?;
        Ok((classical_bias(&g)?, quantum_bias_sdp(&g)?))
    })?;
    let mut lower = Tally::new("β*(M) ≥ β(M)", 1e-7 * scale);
    let mut upper = Tally::new("β*(M) ≤ 1.7823 β(M)", 1e-7 * scale);
    for (i, (b, q)) in values.into_iter().enumerate() {
        lower.record(b - q, || format!("game {i}: {q} < {b}"));
        upper.record(q - GROTHENDIECK_BOUND * b, || format!("game {i}: {q} > K_G·{b}"));
    }
    Ok(Outcome::from_tallies(&[tsirelson, lower, upper], &[]))
}

fn c12_axioms(o: &VerifyOptions, scale: f64) -> Result<Outcome> {
    let m_values = trials(1000, |i| {
        let (d, n) = SHAPES[i % SHAPES.len()];
        let mut rng = rng_for(o.seed, 12, i);
        let a = sample::hermitian_tuple(&mut rng, n, d)?;
        let b = sample::hermitian_tuple(&mut rng, n, d)?;
        let g = sample::invertible_game(&mut rng, n)?;
        let s: f64 = rng.gen_range(-4.0..4.0);
        let e: i32 = rng.gen_range(-12..0);
        let na = m_bell_norm(&a, &g)?.value;
        let nb = m_bell_norm(&b, &g)?.value;
        let nab = m_bell_norm(&a.add(&b)?, &g)?.value;
        let ns = m_bell_norm(&a.scale(s), &g)?.value;
        let tiny = a.scale(10f64.powi(e));
        let nt = m_bell_norm(&tiny, &g)?.value;
        let tiny_max = tiny.matrices().map(|m| m.max_abs()).fold(0.0, f64::max);
        Ok((na, nb, nab, s, ns, nt, tiny_max))
    })?;
    let mut m_tri = Tally::new("‖·‖_M triangle", 1e-9 * scale);
    let mut m_hom = Tally::new("‖·‖_M homogeneity (relative)", 1e-12 * scale);
    let mut m_def = Tally::new("‖·‖_M definiteness", 0.0);
    for (i, (na, nb, nab, s, ns, nt, tiny_max)) in m_values.into_iter().enumerate() {
        m_tri.record(nab - na - nb, || format!("trial {i}: {nab} > {na} + {nb}"));
        m_hom.record((ns - s.abs() * na).abs() / ((1.0 + na) * (1.0 + s.abs())), || {
            format!("trial {i}: ‖sA‖ = {ns}, |s|‖A‖ = {}", s.abs() * na)
        });
        m_def.flag(nt >= 1e-8 || tiny_max < 1e-6, || format!("trial {i}: norm {nt}, max entry {tiny_max}"));
    }

    let mut p_tri = Tally::new("‖p‖_M triangle", 1e-12 * scale);
    let mut p_hom = Tally::new("‖p‖_M homogeneity (relative)", 1e-12 * scale);
    let mut p_def = Tally::new("‖p‖_M definiteness", 0.0);
    for i in 0..1000 {
        let n = 2 + i % 3;
        let mut rng = rng_for(o.seed, 12, 10_000 + i);
        let g = sample::invertible_game(&mut rng, n)?;
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s: f64 = rng.gen_range(-4.0..4.0);
        let np = vector_m_norm(&p, &g)?;
        let nq = vector_m_norm(&q, &g)?;
        let sum: Vec<f64> = p.iter().zip(&q).map(|(a, b)| a + b).collect();
        let npq = vector_m_norm(&sum, &g)?;
        p_tri.record(npq - np - nq, || format!("trial {i}: {npq} > {np} + {nq}"));
        let sp: Vec<f64> = p.iter().map(|a| s * a).collect();
        let nsp = vector_m_norm(&sp, &g)?;
        p_hom.record((nsp - s.abs() * np).abs() / (1.0 + s.abs() * np), || format!("trial {i}: {nsp}"));
        let e: i32 = rng.gen_range(-12..0);
        let tiny: Vec<f64> = p.iter().map(|a| a * 10f64.powi(e)).collect();
        let nt = vector_m_norm(&tiny, &g)?;
        let tiny_max = tiny.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        p_def.flag(nt >= 1e-8 || tiny_max < 1e-6, || format!("trial {i}: norm {nt}, max entry {tiny_max}"));
    }

    let c_values = trials(1000, |i| {
        let (d, n) = SHAPES[i % SHAPES.len()];
        let mut rng = rng_for(o.seed, 12, 20_000 + i);
        let a = sample::tuple(&mut rng, n, d)?;
        let b = sample::tuple(&mut rng, n, d)?;
        let eta: f64 = rng.gen_range(0.0..=1.0);
        let e: i32 = rng.gen_range(-6..0);
        let ca = compatibility_norm(&a)?;
        let cb = compatibility_norm(&b)?;
        let cab = compatibility_norm(&a.add(&b)?)?;
        let ce = compatibility_norm(&a.scale(eta))?;
        let tiny = a.scale(10f64.powi(e));
        let ct = compatibility_norm(&tiny)?;
        let tiny_max = tiny.matrices().map(|m| m.max_abs()).fold(0.0, f64::max);
        Ok((ca, cb, cab, eta, ce, ct, tiny_max))
    })?;
    let mut c_tri = Tally::new("‖·‖_c triangle", 1e-6 * scale);
    let mut c_hom = Tally::new("‖·‖_c homogeneity", 1e-6 * scale);
    let mut c_def = Tally::new("‖·‖_c definiteness", 0.0);
    for (i, (ca, cb, cab, eta, ce, ct, tiny_max)) in c_values.into_iter().enumerate() {
        c_tri.record(cab - ca - cb, || format!("trial {i}: {cab} > {ca} + {cb}"));
        c_hom.record((ce - eta * ca).abs(), || format!("trial {i}: {ce} vs {}", eta * ca));
        c_def.flag(ct >= 1e-8 || tiny_max < 1e-6, || format!("trial {i}: norm {ct}, max entry {tiny_max}"));
    }
    Ok(Outcome::from_tallies(
        &[m_tri, m_hom, m_def, p_tri, p_hom, p_def, c_tri, c_hom, c_def],
        &[],
    ))
}

fn dispatch(id: u8, o: &VerifyOptions) -> Result<Outcome> {
    let s = o.tolerance_scale;
    match id {
        1 => c1_pauli_pair(o, s),
        2 => c2_pauli_triple(o, s),
        3 => c3_chsh_identity(o, s),
        4 => c4_deformed(o, s),
        5 => c5_biased(o, s),
        6 => c6_i3322(o, s),
        7 => c7_comparison(o, s),
        8 => c8_duality(o, s),
        9 => c9_uncertainty(o, s),
        10 => c10_seesaw(o, s),
        11 => c11_quantum_bias(o, s),
        12 => c12_axioms(o, s),
        _ => Ok(Outcome {
            passed: false,
            detail: format!("unknown criterion {id}"),
        }),
    }
}

pub fn run_criterion(id: u8, options: &VerifyOptions) -> CriterionReport {
    let start = Instant::now();
    let name = CRITERIA.iter().find(|c| c.id == id).map_or("unknown", |c| c.name);
    let (passed, detail) = match dispatch(id, options) {
        Ok(o) => (o.passed, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionReport {
        id,
        name,
        passed,
        detail,
        elapsed_secs: start.elapsed().as_secs_f64(),
    }
}

/// Runs the selected criteria in id order, calling `progress` after each.
pub fn run_with(options: &VerifyOptions, mut progress: impl FnMut(&CriterionReport)) -> Report {
    let criteria: Vec<CriterionReport> = CRITERIA
        .iter()
        .filter(|c| options.only.is_empty() || options.only.contains(&c.id))
        .map(|c| {
            let r = run_criterion(c.id, options);
            progress(&r);
            r
        })
        .collect();
    Report {
        passed: criteria.iter().all(|c| c.passed) && !criteria.is_empty(),
        criteria,
    }
}

pub fn run(options: &VerifyOptions) -> Report {
    run_with(options, |_| {})
}

/// One line per criterion: `PASS [ 4] name (1.23s): detail`.
pub fn format_line(r: &CriterionReport) -> String {
    format!(
        "{} [{:>2}] {} ({:.2}s): {}",
        if r.passed { "PASS" } else { "FAIL" },
        r.id,
        r.name,
        r.elapsed_secs,
        r.detail
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_counts_failures() {
        let mut t = Tally::new("x", 1e-3);
        t.record(1e-4, || "a".into());
        t.record(1e-2, || "b".into());
        t.record(f64::NAN, || "c".into());
        assert_eq!(t.failures, 2);
        assert!(!t.passed());
        assert!(t.summary().contains("first failure: b"));
        assert!(!Tally::new("empty", 1.0).passed());
    }

    #[test]
    fn unknown_criterion_fails() {
        assert!(!run_criterion(99, &VerifyOptions::default()).passed);
    }

    #[test]
    fn evenly_spaced_endpoints() {
        let v = evenly_spaced(-1.0, 1.0, 50);
        assert_eq!(v.len(), 50);
        assert_eq!((v[0], v[49]), (-1.0, 1.0));
    }
}
