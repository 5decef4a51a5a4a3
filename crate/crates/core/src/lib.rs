//! Online universal classifier built on an online sequential extreme learning machine.
//!
//! One model and one decision rule serve binary, multi-class and multi-label
//! problems. Targets are bipolar label vectors ([`types`]), a fixed random
//! hidden layer feeds output weights trained by block recursive least squares
//! ([`elm`]), and thresholding the raw outputs at zero yields the problem type
//! and label set ([`classifier`]).
//!
//! ```no_run
//! use oselm::data::{parse_dataset, Format, FormatSpec};
//! use oselm::harness::{run_kfold, RunConfig};
//!
//! let spec = FormatSpec::new(Format::DenseCsv, 3);
//! let data = parse_dataset("data/iris.csv", &spec).unwrap();
//! let report = run_kfold(&data, &RunConfig::new(20)).unwrap();
//! println!("{}", report.render_table());
//! ```

pub mod classifier;
pub mod data;
pub mod elm;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod persist;
pub mod synthetic;
pub mod types;

pub use classifier::{classify, classify_batch, FallbackPolicy, Prediction};
pub use elm::{Activation, HiddenLayer, NetworkConfig, OnlineModel};
pub use error::{Error, ErrorCategory, Result};
pub use types::{ClassificationType, Dataset, DatasetStats, LabelVector, Sample};
