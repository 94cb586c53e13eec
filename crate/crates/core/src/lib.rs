//! Entropies and mutual informations of quantized hypercube sources seen
//! through binary symmetric channels and their finite BMS mixtures.
//!
//! The modules build on each other:
//!
//! - [`hypercube`]: vertices, vertex sets, distributions, entropy and the
//!   `O(n 2^n)` noise kernel.
//! - [`noisy_subset`]: `H(U_S xor Z^n)` and its minimum `H_m^n(alpha)` over
//!   sets of size `m`, by brute force and over down-sets.
//! - [`shifting`]: the down-shift toward monotone sets with per-step checks.
//! - [`quantizer`]: `I(f(X^n); Y^n)` for quantizers, the `(n-1)(1-h(alpha))`
//!   bound, and exhaustive or sampled searches.
//! - [`bms`]: finite BSC mixtures and the capacity-matched comparison.
//!
//! ```
//! use hyperquant::noisy_subset::{hmn_closed_form, hmn_monotone};
//! use hyperquant::quantizer::{mutual_information, theorem_bound};
//! use hyperquant::{projection_quantizer, Dimension};
//!
//! let n = Dimension::new(4)?;
//! let h3 = hmn_monotone(n, 3, 0.1)?;
//! assert!((h3.value - hmn_closed_form(n, 3, 0.1)?).abs() < 1e-9);
//!
//! let f = projection_quantizer(n);
//! assert!((mutual_information(&f, 0.1)? - theorem_bound(n, 0.1)?).abs() < 1e-9);
//! # Ok::<(), hyperquant::Error>(())
//! ```

pub mod bms;
pub mod budget;
pub mod error;
pub mod hypercube;
pub mod noisy_subset;
pub mod partitions;
pub mod quantizer;
pub mod report;
pub mod shifting;
pub mod symmetry;

pub use bms::{BmsChannel, BmsComponent};
pub use budget::Budget;
pub use error::{Error, Result};
pub use hypercube::{
    binary_entropy, entropy, noise_transform, star, uniform_pmf_on, BscChannel, Dimension, Pmf, Vertex, VertexSet,
};
pub use noisy_subset::{HmnResult, MonotoneSetFamily, Symmetry};
pub use quantizer::{projection_quantizer, Quantizer, SizeProfile};
pub use report::{Check, CheckReport, CHECK_TOLERANCE};
pub use shifting::{BiasDecomposition, ShiftStep};
