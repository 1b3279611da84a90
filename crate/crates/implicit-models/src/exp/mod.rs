//! The experiment harness: run configurations, seeded sweep runners for the
//! synthetic and segmentation studies, CSV/SVG/strip emission, parameter
//! archives, and the acceptance checks behind the `verify` command.

pub mod config;
pub mod output;
pub mod params_io;
pub mod records;
pub mod seg_run;
pub mod svg_check;
pub mod synthetic_run;
pub mod verify;

pub use config::{SegRunConfig, SyntheticRunConfig};
pub use output::{parse_csv, to_csv, write_csv};
pub use params_io::{load_params, save_params, ParamArchive};
pub use records::{ExperimentRecord, Method};
pub use seg_run::{run_segmentation, SegRun};
pub use synthetic_run::{run_synthetic, SyntheticRun};
pub use verify::{run_criteria, CriterionResult};
