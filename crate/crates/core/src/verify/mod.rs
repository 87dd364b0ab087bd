//! The inequality harness: both sides of every estimate over probe families,
//! the empirical constants they imply, and their trend under refinement.

pub mod checks;
pub mod families;
pub mod gate;
pub mod report;
pub mod suite;

pub use checks::{run_check, CheckName, Level, RhoSweep};
pub use families::{FamilyConfig, NamedSource, NamedWeight, WeightClass};
pub use gate::{oracle_gate, GateConfig, GateReport};
pub use report::{Case, RatioReport, Verdict};
pub use suite::{run_suite, GridConfig, SuiteConfig, SuiteReport};
