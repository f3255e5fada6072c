//! Circle rotations: exact angle arithmetic, interval codings, and the
//! counting and window constructions that go with simple codings.

mod angle;
mod coding;
mod lemmas;

pub use angle::{AngleSpec, ContinuedFractionSpec, ExactAngle, IrrationalAngle};
pub use coding::{code, widen, Cell, CellSpec, IntervalSpec, RotationCodingSpec, RotationSpecFile};
pub use lemmas::{
    find_constant_free_window, nonrecurrence_witness, oracle_language_bound, partition_cell_count,
    CellCount, ConstantFreeWindow, NonrecurrenceWitness, OracleComparison,
};
