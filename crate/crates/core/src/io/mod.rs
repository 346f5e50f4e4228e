//! Configuration, field dumps and report output.

pub mod config;
pub mod dump;
pub mod report;

pub use config::{parse_config, parse_config_with, Command, Overrides, RunConfig, StatisticName};
pub use dump::{dump_field, load_field};
pub use report::{to_json, write_atomic, Metadata, Table};
