//! Multi-threaded drivers for scans and see-saw restarts. Results keep the
//! sequential order regardless of completion order.

use belltensor_core::bellnorm::{best_of, seesaw_restart, SeesawOptions, SeesawResult};
use belltensor_core::games::GameMatrix;
use belltensor_core::scan::{biased_point, deformed_point, BiasedRecord, DeformedRecord};
use belltensor_core::measurements::MeasurementTuple;
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::Result;

pub const THREADS_ENV: &str = "BELLTENSOR_THREADS";

/// Worker cap from `BELLTENSOR_THREADS`; unset, empty or zero means rayon's
/// default.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

pub fn pool() -> Result<ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

/// Runs `f` on the pool sized by [`thread_cap`].
pub fn install<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    Ok(pool()?.install(f))
}

/// Same records and order as [`belltensor_core::scan::scan_deformed_chsh`].
pub fn scan_deformed(y_grid: &[f64], t_grid: &[f64]) -> Result<Vec<DeformedRecord>> {
    if y_grid.is_empty() || t_grid.is_empty() {
        return Err(belltensor_core::Error::Empty { what: "scan grid" }.into());
    }
    let points: Vec<(f64, f64)> = y_grid.iter().flat_map(|&y| t_grid.iter().map(move |&t| (y, t))).collect();
    let records = install(|| {
        points
            .par_iter()
            .map(|&(y, t)| deformed_point(y, t))
            .collect::<belltensor_core::Result<Vec<_>>>()
    })??;
    Ok(records)
}

/// Same records and order as [`belltensor_core::scan::scan_biased_chsh`].
pub fn scan_biased(y_grid: &[f64], p_grid: &[f64], q_grid: &[f64]) -> Result<Vec<BiasedRecord>> {
    if y_grid.is_empty() || p_grid.is_empty() || q_grid.is_empty() {
        return Err(belltensor_core::Error::Empty { what: "scan grid" }.into());
    }
    let mut points = Vec::with_capacity(y_grid.len() * p_grid.len() * q_grid.len());
    for &y in y_grid {
        for &p in p_grid {
            for &q in q_grid {
                points.push((y, p, q));
            }
        }
    }
    let records = install(|| {
        points
            .par_iter()
            .map(|&(y, p, q)| biased_point(y, p, q))
            .collect::<belltensor_core::Result<Vec<_>>>()
    })??;
    Ok(records)
}

/// [`belltensor_core::bellnorm::seesaw_bias`] with restarts spread over the
/// pool. Each restart owns its generator stream, so the result does not
/// depend on the thread count.
pub fn seesaw(a: &MeasurementTuple, game: &GameMatrix, options: &SeesawOptions) -> Result<SeesawResult> {
    if options.restarts == 0 {
        return Err(belltensor_core::Error::Empty { what: "see-saw restarts" }.into());
    }
    let runs = install(|| {
        (0..options.restarts)
            .into_par_iter()
            .map(|r| seesaw_restart(a, game, r, options))
            .collect::<belltensor_core::Result<Vec<_>>>()
    })??;
    Ok(best_of(runs).expect("at least one restart"))
}
