//! Open quantum systems toolkit.
//!
//! - [`linalg`]: dense complex matrices, Kronecker products, partial traces,
//!   Hermitian eigendecomposition, matrix exponentials.
//! - [`states`]: validated density matrices and pure states.
//! - [`channels`]: CPTP maps as Choi matrices, Kraus decompositions,
//!   unitary dilations and the partial-transpose test.
//! - [`gksl`]: superoperators, semigroup evolution and the decomposition
//!   of a generator into Hamiltonian and jump operators.
//! - [`jaynes_cummings`]: the dissipative Jaynes-Cummings model with a
//!   Lorentzian reservoir, exact and numerical.

// `!(x > 0.0)` is used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Quadrature nodes and Padé coefficients are kept at published precision.
#![allow(clippy::excessive_precision)]

pub mod channels;
pub mod error;
pub mod gksl;
pub mod integrate;
pub mod io;
pub mod jaynes_cummings;
pub mod linalg;
pub mod quadrature;
pub mod random;
pub mod states;

pub use error::{Error, Result};
