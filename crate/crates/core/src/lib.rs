// `!(x > 0.0)` guards are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod awops;
pub mod awpoly;
pub mod error;
pub mod expr;
pub mod funcrep;
pub mod kernel;
pub mod nevanlinna;
pub mod qcore;

pub use error::{Error, Result};
pub use qcore::{QParam, TruncationPolicy, C64};
