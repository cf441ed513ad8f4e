//! Random states, unitaries and observables for sampling and property tests.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::qcore::linalg::{real, CMatrix, CVector, C64};
use crate::qcore::{DensityMatrix, HermitianObservable, PureState};

fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Complex Ginibre matrix with unit-variance entries.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { real(1.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_pure_state(dim: usize, rng: &mut impl Rng) -> PureState {
    let v = CVector::from_fn(dim, |_, _| gaussian(rng));
    PureState::normalized(v).expect("Gaussian vector is nonzero")
}

/// Random state of the given rank drawn from the induced (Ginibre) measure.
pub fn random_density_matrix(dim: usize, rank: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = ginibre(dim, rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = crate::qcore::linalg::trace(&m).re;
    DensityMatrix::from_raw(m * real(1.0 / tr))
}

pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> HermitianObservable {
    let g = ginibre(dim, dim, rng);
    HermitianObservable::from_raw((&g + g.adjoint()) * real(0.5))
}
