//! Symmetric-group combinatorics, Young projectors and the collective twirl over `U^{⊗n}`.

mod collective;
mod demo;
mod partition;
mod permutation;

pub use collective::{
    haar_twirl_mc, maximally_twirled_state, maximally_twirled_state_seeded, young_projector,
    CollectiveTwirl, SchurWeylRow, SchurWeylTable, TwirledStateSearch, COLLECTIVE_MAX_D,
    COLLECTIVE_MAX_N, GRAM_PINV_CUTOFF, MC_SHARD, TWIRLED_STATE_RESTARTS,
};
pub use demo::{
    reference_p21, reference_x21, reference_x3, three_qubit_demo, DemoResiduals, ThreeQubitDemo,
    REFERENCE_P21_TIMES_3,
};
pub use partition::{character, factorial, partitions, schur_at_ones, syt_count, Partition};
pub use permutation::{permutation_operator, Permutation};
