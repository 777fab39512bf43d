//! Exact arithmetic for integral binary quartic forms and the Thue
//! equations `F(x, y) = h` they define: invariants, reduction mod `p`,
//! descent at split primes, local solubility, box search, local densities,
//! and an end-to-end construction of everywhere locally soluble equations
//! with no integral solutions.

pub mod arith;
pub mod error;
pub mod exec;
pub mod forms;
pub mod local;
pub mod modp;
pub mod density;
pub mod descent;
pub mod poly;
pub mod search;
pub mod serde_util;
pub mod witness;

pub use error::{Error, Result};
pub use exec::Exec;
pub use forms::{BinaryQuarticForm, IntegerMatrix2x2, InvariantData};
