//! Scenario runner for noisy N00N state sweeps: JSON configs in, CSV
//! datasets, run metadata and gnuplot scripts out.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod scenario;

pub use config::{ChannelSpec, GeometryKind, Scenario, StateSpec, SweepConfig, SweepSpec};
pub use error::{CliError, Result};
pub use output::{emit_plot_script, to_csv, write_outputs, OutputPaths};
pub use scenario::{run_scenario, Cell, SingularPoint, SweepResult};
