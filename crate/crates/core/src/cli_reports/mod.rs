//! Configuration-driven experiments: TOML configs in, JSON reports and CSV
//! plot data out.

mod config;
mod report;
mod run;

pub use config::{
    AlphaParams, BoundCheckParams, CoverParams, DirichletParams, ExperimentConfig, FourierParams, InterpParams, Kind,
    LimsupParams, RecurParams, Source, Suite,
};
pub use report::{emit_plot_data, Aggregate, RunReport, Series, TrialRecord, TRIALS_SERIES};
pub use run::{run, RunOptions};
