//! Workbench for the quantum K-rings of type A partial flag varieties:
//! exact presentations (Whitney, Wronskian, Coulomb-branch/Bethe forms),
//! Novikov-truncated quotient rings with their multiplication operators,
//! a numeric Bethe-root solver, and the q-hypergeometric series whose
//! q-difference equations tie the two sides together.

pub mod eigen;
pub mod error;
pub mod flag;
pub mod groebner;
pub mod order;
pub mod poly;
pub mod present;
pub mod ring;
pub mod symfun;
pub mod vars;

pub use error::{Error, Result};
pub use flag::{enumerate_fixed_points, FixedPoint, FlagShape, WeylElement};
pub use poly::{MultiPoly, Rat, Truncation};
pub use vars::{VarTable, VarTag};
