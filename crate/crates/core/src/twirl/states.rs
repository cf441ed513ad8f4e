use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qcore::linalg::{real, trace_product, CMatrix, CVector};
use crate::qcore::{DensityMatrix, PureState};
use crate::schurweyl::{permutation_operator, Permutation, COLLECTIVE_MAX_D, COLLECTIVE_MAX_N};

/// Projector onto the symmetric subspace of `C^d ⊗ C^d`, `(1 + SWAP) / 2`.
pub fn symmetric_projector(d: usize) -> CMatrix {
    let swap = permutation_operator(&Permutation::new(vec![1, 0]).expect("swap"), d);
    (CMatrix::identity(d * d, d * d) + swap) / real(2.0)
}

/// Twirl of a two-party state over `U ⊗ U`:
/// `p_s Pi_s / d_s + (1 - p_s) (1 - Pi_s) / (d^2 - d_s)` with `p_s = tr(rho Pi_s)`.
pub fn collective_twirl_two_party(rho: &DensityMatrix, d: usize) -> Result<DensityMatrix> {
    if rho.dim() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            got: rho.dim(),
        });
    }
    let sym = symmetric_projector(d);
    let d_s = (d * (d + 1) / 2) as f64;
    let d_a = (d * d) as f64 - d_s;
    let p_s = trace_product(rho.matrix(), &sym).re;
    let mut out = &sym * real(p_s / d_s);
    if d_a > 0.0 {
        let anti = CMatrix::identity(d * d, d * d) - &sym;
        out += anti * real((1.0 - p_s) / d_a);
    }
    Ok(DensityMatrix::from_raw(out))
}

/// `sqrt((d+1)/2d) |00> + sqrt((d-1)/2d) (|01> - |10>)/sqrt2`; twirls to `1/d^2` under `U ⊗ U`.
pub fn optimal_bipartite_state(d: usize) -> Result<PureState> {
    if d == 0 {
        return Err(Error::out_of_range("d", "[1, inf)", 0.0));
    }
    let df = d as f64;
    let mut amps = CVector::zeros(d * d);
    amps[0] = real(((df + 1.0) / (2.0 * df)).sqrt());
    if d > 1 {
        let a = ((df - 1.0) / (2.0 * df)).sqrt() / 2f64.sqrt();
        amps[1] = real(a);
        amps[d] = real(-a);
    }
    PureState::new(amps)
}

/// Basis state whose permuted copies are used as a permutation code.
///
/// For `d >= n` this is `|0, 1, .., n-1>`. Otherwise the block `|0, .., d-1>` is repeated
/// `n / d` times and followed by `|0, .., r-1>` with `r = n mod d`.
pub fn permutation_coding_state(n: usize, d: usize) -> Result<PureState> {
    if n == 0 || d == 0 {
        return Err(Error::out_of_range("n, d", "[1, inf)", 0.0));
    }
    let digits: Vec<usize> = if d >= n {
        (0..n).collect()
    } else {
        (0..n / d)
            .flat_map(|_| 0..d)
            .chain(0..n % d)
            .collect()
    };
    let index = digits.iter().fold(0usize, |acc, &x| acc * d + x);
    PureState::basis(d.pow(n as u32), index)
}

/// `|<psi| P_pi^dagger P_sigma |psi>|` over all pairs of permutations of the `n` factors.
pub fn permutation_overlaps(psi: &PureState, n: usize, d: usize) -> Result<DMatrix<f64>> {
    if n > COLLECTIVE_MAX_N || d > COLLECTIVE_MAX_D + 3 || psi.dim() != d.pow(n as u32) {
        return Err(Error::SizeGuard(format!(
            "overlap matrix for n = {n}, d = {d}, dim {}",
            psi.dim()
        )));
    }
    let perms = Permutation::all(n);
    let images: Vec<CVector> = perms
        .iter()
        .map(|p| {
            let map = p.index_map(d);
            let mut v = CVector::zeros(psi.dim());
            for (i, &m) in map.iter().enumerate() {
                v[m] = psi.amplitudes()[i];
            }
            v
        })
        .collect();
    let k = images.len();
    Ok(DMatrix::from_fn(k, k, |a, b| images[a].dotc(&images[b]).norm()))
}

/// Number of distinct states among the permuted copies (overlap one counts as equal).
pub fn distinct_permuted_states(overlaps: &DMatrix<f64>) -> usize {
    let k = overlaps.nrows();
    (0..k)
        .filter(|&a| (0..a).all(|b| (overlaps[(a, b)] - 1.0).abs() > 1e-9))
        .count()
}
