//! Exact arithmetic for Drinfeld modules over F_q[θ] and the modular
//! forms attached to points of the period domain Ω^r, together with a
//! verification suite that checks the determinant, cofactor, false
//! Eisenstein series and functional-equation identities relating them
//! to rigorously tracked precision.
//!
//! Everything is ultrametric-exact: values are truncated ramified
//! Laurent series in θ^(1/e) over F_{q^m} carrying a certified error
//! exponent, and Tate-algebra elements are truncated t-series with a
//! certified coefficient-tail envelope. No floating point anywhere.

pub mod agf;
pub mod cinfty;
pub mod config;
pub mod drinfeld;
pub mod eisenstein;
pub mod error;
pub mod tate;
pub mod field;
pub mod lattice;
pub mod norm;
pub mod perkins;
pub mod poly;
pub mod report;
pub mod verify;
#[doc(hidden)]
pub mod testkit;

pub use error::{Error, Result};
