//! Toeplitz sequences: period structures, level-by-level fills, the
//! odometer coding, and the explicit windows known for simple ones.

mod lemmas;
mod odometer;
mod spec;

pub use lemmas::{nearly_simple, three_window, ShiftWitness, ThreeWindowReport};
pub use odometer::{build_mef_partition, mef_code, odometer_add, MefCell, OdometerMEFPartition, OdometerPoint};
pub use spec::{
    generate, hole_count, FillRule, HolePolicy, Level, PeriodStructure, SimpleToeplitzSpec, Stream, ToeplitzSpec,
    ToeplitzSpecFile,
};
