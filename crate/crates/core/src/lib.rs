//! Exact arithmetic over F_q((t)): residue fields, the valuation ring mod t^M,
//! polynomials over it, Weierstrass preparation, sublevel-set counting and
//! log-canonical threshold estimates with certified lower bounds.

pub mod error;
pub mod field;
pub mod ring;
pub mod mpoly;
pub mod parse;
pub mod weierstrass;
pub mod cache;
pub mod counting;
pub mod exact;
pub mod lct;

pub use error::{Error, Result};
pub use field::{FieldElem, FieldSpec};
pub use mpoly::{LinearShear, MPoly, Monomial, ScaleMap, ShearMap};
pub use parse::{parse_elem, parse_poly};
pub use ring::{OElem, RingCtx, Valuation};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
