//! Register-transfer intermediate representation, structural checks,
//! hierarchy ordering and a cycle-level interpreter.

pub mod check;
pub mod flatten;
pub mod ir;
pub mod sim;

pub use check::{check, DiagKind, Diagnostic};
pub use flatten::{flatten_hierarchy, FlattenError};
pub use ir::*;
pub use sim::{SimError, Simulator};
