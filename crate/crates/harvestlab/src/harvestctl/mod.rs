//! Figure presets, parameter sweeps and the acceptance runner behind the
//! `harvestctl` binary.

pub mod accept;
pub mod presets;
pub mod sweep;

pub use presets::{preset, Axis, FigId, PresetRef, SweepSpec};
pub use sweep::{run_scenario, sweep, to_csv, RunOptions, SweepRecord, SweepTable};
