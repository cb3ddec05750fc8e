//! Class transpositions of ℤ and the orders of their pairwise products.
//!
//! * [`residue`]: residue classes and class transpositions.
//! * [`rcwa`]: exact piecewise-affine form of products, with powers.
//! * [`gamma`]: the component graph of a pair and the product's cycles.
//! * [`certificates`]: exact order results and Diophantine witnesses.
//! * [`oracle`]: the combined order decision with provenance.
//! * [`survey`]: exhaustive pair surveys and reports.

#![forbid(unsafe_code)]

pub mod arith;
pub mod certificates;
pub mod error;
pub mod gamma;
pub mod oracle;
pub mod rcwa;
pub mod residue;
pub mod survey;

/// Integer type for residues, orbit values and map coefficients. All
/// arithmetic on it is checked.
pub type Int = i128;

pub use certificates::{classify_pair, OrderCertificate, OrderValue, PairClass};
pub use error::{Error, Result};
pub use gamma::{Component, ComponentKind, GammaGraph};
pub use oracle::{order_of_product, OracleConfig, OrderVerdict, Outcome};
pub use rcwa::{Affine, OrderScanResult, RcwaMap};
pub use residue::{ClassTransposition, ResidueClass};
pub use survey::{SurveyConfig, KOHL_ORDERS};
