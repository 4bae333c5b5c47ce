//! The four depth families.

pub mod dc;
pub mod obj;
pub mod prd;
pub mod rd;
