//! Output formats and configuration handling for the experiment runner.

pub mod config;
pub mod csvio;
pub mod svg;

pub use config::{parse_seeds, ConfigFile};
pub use csvio::{read_trace, write_trace};
pub use svg::{emit_svg, render_svg, PlotRay};
