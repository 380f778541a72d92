//! Exact computations for descending chains of finite-index subgroups.

pub mod catalog;
pub mod cli;
pub mod chains;
pub mod cosets;
pub mod error;
pub mod groups;
pub mod odometer;
pub mod spec;

pub use error::{ChainError, Result};
pub use groups::{Family, GroupContext, GroupElement, SubgroupData};
