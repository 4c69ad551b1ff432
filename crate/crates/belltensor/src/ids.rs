//! Command-line identifiers for games and tuples.

use std::path::Path;

use belltensor_core::games::{biased_chsh, chsh, deformed_chsh, i3322, GameMatrix};
use belltensor_core::measurements::pauli_tuple;
use belltensor_core::measurements::MeasurementTuple;

use crate::error::{Error, Result};
use crate::format::{read_game, read_tuple};

fn number(what: &'static str, input: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::parse(what, input, format!("'{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(what, input, format!("'{s}' is not finite")));
    }
    Ok(v)
}

/// `chsh`, `mt:<t>`, `gpq:<p>:<q>`, `i3322`, or a path to a real-matrix
/// JSON file.
pub fn parse_game(id: &str) -> Result<GameMatrix> {
    let parts: Vec<&str> = id.split(':').collect();
    match parts.as_slice() {
        ["chsh"] => Ok(chsh()),
        ["i3322"] => Ok(i3322()),
        ["mt", t] => Ok(deformed_chsh(number("game", id, t)?)),
        ["gpq", p, q] => Ok(biased_chsh(number("game", id, p)?, number("game", id, q)?)?),
        ["mt" | "gpq", ..] => Err(Error::parse("game", id, "wrong number of parameters")),
        _ if Path::new(id).exists() => read_game(Path::new(id)),
        _ => Err(Error::parse(
            "game",
            id,
            "expected chsh, mt:<t>, gpq:<p>:<q>, i3322 or an existing JSON file",
        )),
    }
}

/// `pauli:x[,y[,z]]` for `(xσ_X, yσ_Y, zσ_Z)` truncated to the given
/// coefficients, or a path to a tuple JSON file.
pub fn parse_tuple(id: &str) -> Result<MeasurementTuple> {
    if let Some(rest) = id.strip_prefix("pauli:") {
        let coeffs = rest
            .split(',')
            .map(|s| number("tuple", id, s))
            .collect::<Result<Vec<_>>>()?;
        if coeffs.is_empty() || coeffs.len() > 3 {
            return Err(Error::parse("tuple", id, "pauli shorthand takes 1 to 3 coefficients"));
        }
        let c = |i: usize| coeffs.get(i).copied().unwrap_or(0.0);
        return Ok(pauli_tuple(c(0), c(1), c(2)).truncate(coeffs.len())?);
    }
    if Path::new(id).exists() {
        return read_tuple(Path::new(id));
    }
    Err(Error::parse("tuple", id, "expected pauli:x,y,z or an existing JSON file"))
}
