//! Tensor norms relating quantum measurement incompatibility and Bell
//! non-locality for dichotomic observables.
//!
//! The crate is `no_std` and only needs `alloc`. The main entry points are
//!
//! * [`bellnorm::m_bell_norm`]: the largest quantum bias of an XOR game when
//!   Alice's observables are fixed, bounded by `λ_max[Σ_y |Σ_x M_xy A_x|]`;
//! * [`compat::compatibility_norm`]: the compatibility norm, solved as a
//!   semidefinite program with one PSD block per sign vector;
//! * [`games`]: classical and quantum (Tsirelson) biases of a Bell functional
//!   and the `‖M⁻¹‖·β(M)` uncertainty product.
//!
//! ```
//! use belltensor_core::{bellnorm, games, measurements};
//!
//! let pair = measurements::pauli_tuple(1.0, 1.0, 0.0).truncate(2).unwrap();
//! let norm = bellnorm::m_bell_norm(&pair, &games::chsh()).unwrap();
//! assert!((norm.value - 2f64.sqrt()).abs() < 1e-12);
//! ```

#![no_std]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod bellnorm;
pub mod compat;
pub mod error;
pub mod games;
pub mod linalg;
pub mod measurements;
pub mod sample;
pub mod scan;
pub mod sdp;

pub use error::{Error, Result};
pub use linalg::{CMatrix, HermitianMatrix, RealMatrix};
pub use num_complex::Complex64;
