//! Exact arithmetic for generalized Breuil-Kisin modules over truncations of
//! `S = Z_p[[u]]`, with brute-force oracles for every length formula.

pub mod conjectures;
pub mod error;
pub mod lengths;
pub mod module;
pub mod oracle;
pub mod quasi_filtered;
pub mod ring;
pub mod verify;

pub use error::{Error, Result};
pub use module::{BKModule, CyclicSummand, FiltrationPieces, Presentation};
pub use ring::{EisensteinPoly, RingParams, TruncatedSeries};
