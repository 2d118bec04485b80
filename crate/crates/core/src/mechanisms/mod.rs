//! Truthful-in-expectation mechanisms as dense tables over the product grid.

mod explicit;
mod payments;
mod random;
mod table;
mod transforms;
mod validate;

pub use explicit::{explicit_full_mechanism, explicit_shrunken_mechanism, lookahead_mechanism};
pub use payments::{axis_payments, myerson_payments};
pub use random::random_monotone_mechanism;
pub use table::{Mechanism, MechanismFile};
pub use transforms::{
    high_priced_transform, is_high_priced, shift_transform, shift_transform_with_report, FixRecord,
    ShiftContext, ShiftReport,
};
pub use validate::{expected_revenue, validate_mechanism, ValidationReport, Witness};
