pub mod catalog;
pub mod closed_form;
pub mod complex;
pub mod error;
pub mod expr;
pub mod numeric;
pub mod polylog;
pub mod quad;
pub mod recurrence;
pub mod relation;
pub mod series;
