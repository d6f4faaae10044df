//! Nevanlinna functionals on circles `|x| = r` and the Askey-Wilson counting
//! functions built on top of them.
//!
//! Proximity uses the normalised mean `(1/2π)∫ log⁺|f(re^{iθ})| dθ`, so that
//! `T(r, x) = log r` for `r > 1`.

pub(crate) mod apoints;
mod checks;
mod counting;
mod proximity;

use serde::{Deserialize, Serialize};

use crate::qcore::C64;

pub use apoints::{a_points, argument_principle_count, vanishing_order, winding_on_circle, APoint};
pub use checks::{
    deficiencies, first_main_drift, second_main_check, share_check, DeficiencyReport, SecondMainRow, SecondMainTable,
    ShareReport, ShareRow,
};
pub use counting::{
    admissible_grid, admissible_grid_for, aw_counting, char_table, characteristic, counting, geometric_grid, log_order,
    value_ledger, AWCountRecord, CharRecord, CharRow, ValueEvent, ValueLedger,
};
pub use proximity::{log_shifted, proximity, proximity_of, ShiftedReciprocal};

/// Which events of a product form to count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    Zero,
    Pole,
}

/// A point of the extended complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtValue {
    Finite(C64),
    Infinity,
}

impl ExtValue {
    pub fn zero() -> Self {
        ExtValue::Finite(C64::new(0.0, 0.0))
    }
}

impl std::fmt::Display for ExtValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtValue::Infinity => write!(f, "inf"),
            ExtValue::Finite(c) if c.im == 0.0 => write!(f, "{}", c.re),
            ExtValue::Finite(c) => write!(f, "{}{:+}i", c.re, c.im),
        }
    }
}

impl Serialize for ExtValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
