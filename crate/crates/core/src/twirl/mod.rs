//! Resource destroying maps built from twirls, and states adapted to them.

mod channel;
mod group;
mod states;

pub use channel::{
    collective_twirl, dephasing_channel, depolarizing_channel, finite_group_twirl,
    local_unital_twirl, permutation_twirl, TwirlChannel, TwirlKind,
};
pub use group::{
    heisenberg_weyl_group, pauli_group_on_a, permutation_group, trivial_group, z_group,
    FiniteUnitaryGroup, CLOSURE_CHECK_ORDER, MAX_GROUP_ORDER,
};
pub use states::{
    collective_twirl_two_party, distinct_permuted_states, optimal_bipartite_state,
    permutation_coding_state, permutation_overlaps, symmetric_projector,
};
