//! Configuration, traces, spectra and figure data with CSV output.

pub mod config;
pub mod figures;
pub mod output;
pub mod spectrum;
pub mod trace;

pub use config::{Config, Resolved};
pub use figures::{compute_figure, reproduce_figure, FigureOutput, FIGURE_IDS};
pub use output::{write_tables, Table};
pub use spectrum::{spectrum, Peak, Spectrum, Window};
pub use trace::{interference_trace, population_at, Trace, TraceMeta, TraceMode};
