mod blocks;
mod carriers;
mod doubling;

pub use blocks::{
    banach_density_estimate, gap_window_witness, long_blocks_witness, runs, support, DensityRow, GapProfile,
    GapWindowWitness, LongBlocksWitness, Run,
};
pub use carriers::{
    block_doubling, block_doubling_word, bundled_nonperiodic, cofinite, growing_runs, indicator, powers_of_two,
    powers_plus_index, progression, squares,
};
pub use doubling::{block_doubling_defect, doubling_lower_bound, minimality_defect_code, DefectCode, DoublingStep, DoublingTrace};
