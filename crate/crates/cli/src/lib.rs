//! Experiment plans for the dams simulator: a line-oriented config format,
//! sweep expansion, parallel execution to CSV, and run comparison.

pub mod compare;
pub mod config;
pub mod output;
pub mod plan;

pub use compare::{compare_files, CompareReport};
pub use config::{parse_config, ParseError};
pub use output::{execute_plan, ExecutionReport};
pub use plan::{ExperimentPlan, PlanPoint, StrategyName};
