//! Configuration and artifact writers.

pub mod config;
pub mod tables;
pub mod vtk;

pub use config::{parse_config, ConfigFile, ExperimentConfig, ExperimentKind, Overrides};
pub use tables::{
    read_energy, read_error_table, write_energy, write_energy_csv, write_error_table,
    write_error_table_csv, ErrorTable, ENERGY_HEADER,
};
pub use vtk::{write_state_vtk, write_vtk, FieldData, PointField};
