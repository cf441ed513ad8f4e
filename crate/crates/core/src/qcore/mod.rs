//! Quantum states, channels and measurements on finite-dimensional spaces.

mod channel;
pub mod linalg;
pub mod random;
mod state;

pub use channel::{
    apply_channel, verify_encoding_constraint, EncodingCheck, Povm, QuantumChannel,
    ResourceDestroyingMap, MAX_SUPEROPERATOR_DIM, SUPEROPERATOR_TOL,
};
pub use linalg::{
    hermitian_eig, matrix_fn_on_support, tensor_product, CMatrix, CVector, Spectrum, C64,
};
pub use state::{partial_trace, DensityMatrix, HermitianObservable, PureState};
