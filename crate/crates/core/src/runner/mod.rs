//! Experiment orchestration: configuration, simulation and real-data runs,
//! CSV/SVG output.

pub mod config;
pub mod font;
pub mod format;
pub mod plot;
pub mod realdata;
pub mod simulate;

pub use config::{ExperimentConfig, RealDataConfig, Screening, SolverSettings};
pub use plot::emit_plots;
pub use realdata::run_realdata;
pub use simulate::{run_simulation, simulate, SimulationReport};
