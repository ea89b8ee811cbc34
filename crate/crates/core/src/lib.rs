//! Exact computer algebra for the algebraic side of chromatic homotopy theory.
//!
//! * [`arith`], [`linalg`]: exact rings and sparse linear algebra.
//! * [`series`], [`poly`]: truncated power series and Laurent polynomials.
//! * [`fgl`]: formal group laws.
//! * [`steenrod`]: the mod 2 Steenrod algebra and Adams E2 charts.
//! * [`bp`]: the BP Hopf algebroid, Greek letter elements and Bocksteins.
//! * [`morava`]: the Morava stabilizer group.
//! * [`validate`]: cross-module checks shared by tests and the CLI.

pub mod arith;
pub mod bp;
pub mod error;
pub mod fgl;
pub mod linalg;
pub mod morava;
pub mod poly;
pub mod series;
pub mod steenrod;
pub mod validate;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/arithmetic.md")]
    mod arithmetic {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/formal-groups.md")]
    mod formal_groups {}
    #[doc = include_str!("../../../book/src/adams.md")]
    mod adams {}
    #[doc = include_str!("../../../book/src/greek.md")]
    mod greek {}
    #[doc = include_str!("../../../book/src/morava.md")]
    mod morava {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
