//! Dense complex linear algebra used throughout the crate.
//!
//! Tensor products follow row-major subsystem ordering: in `a ⊗ b` the index of
//! `a` is the most significant one. Operators are vectorized by stacking columns,
//! which is also nalgebra's storage order.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::HermitianObservable;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Entrywise tolerance on `A - A^dagger` for states and observables.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance on the unit trace of a density matrix.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted for a density matrix.
pub const STATE_PSD_TOL: f64 = 1e-10;
/// Tolerance for channel and POVM validity checks.
pub const CHANNEL_TOL: f64 = 1e-9;
/// Eigenvalues below this fraction of the largest one are treated as zero.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

#[inline]
pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// `tr(a b)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Kronecker product `a ⊗ b`; the first factor carries the slowest-varying index.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn tensor_power(a: &CMatrix, n: usize) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for _ in 0..n {
        out = out.kronecker(a);
    }
    out
}

pub fn vector_tensor(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

pub(crate) fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare(m.nrows(), m.ncols()));
    }
    Ok(m.nrows())
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues in ascending order.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Unitary whose columns are the eigenvectors, in the order of `values`.
    pub vectors: CMatrix,
}

impl Spectrum {
    /// Decomposes `m`, which is assumed Hermitian; only its Hermitian part is used.
    pub fn of(m: &CMatrix) -> Self {
        let n = m.nrows();
        if n == 0 {
            return Spectrum {
                values: Vec::new(),
                vectors: CMatrix::zeros(0, 0),
            };
        }
        let herm = (m + m.adjoint()) * real(0.5);
        let eig = herm.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Spectrum { values, vectors }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Absolute threshold below which eigenvalues count as zero.
    pub fn cutoff(&self) -> f64 {
        SUPPORT_CUTOFF * self.max_abs_value()
    }

    /// `sum_k w_k |v_k><v_k|` for the given per-eigenvalue weights.
    pub fn compose(&self, weights: &[f64]) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for (j, w) in weights.iter().enumerate() {
            scaled.column_mut(j).scale_mut(*w);
        }
        let mut out = CMatrix::zeros(n, n);
        out.gemm(real(1.0), &scaled, &self.vectors.adjoint(), real(0.0));
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.compose(&self.values)
    }

    /// Projector onto the eigenvectors whose eigenvalue satisfies `keep`.
    pub fn projector(&self, keep: impl Fn(f64) -> bool) -> CMatrix {
        let w: Vec<f64> = self
            .values
            .iter()
            .map(|&v| if keep(v) { 1.0 } else { 0.0 })
            .collect();
        self.compose(&w)
    }

    /// Projector onto the support (eigenvalues above the relative cutoff).
    pub fn support_projector(&self) -> CMatrix {
        let cut = self.cutoff();
        self.projector(|v| v > cut)
    }

    /// Applies `f` to eigenvalues above the cutoff and maps the rest to zero.
    pub fn map_on_support(&self, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
        let cut = self.cutoff();
        let mut w = Vec::with_capacity(self.dim());
        for &v in &self.values {
            if v > cut {
                let y = f(v);
                if !y.is_finite() {
                    return Err(Error::FunctionUndefined(v));
                }
                w.push(y);
            } else {
                w.push(0.0);
            }
        }
        Ok(self.compose(&w))
    }
}

/// Eigendecomposition of a Hermitian observable: `A = U diag(values) U^dagger`.
pub fn hermitian_eig(a: &HermitianObservable) -> Spectrum {
    Spectrum::of(a.matrix())
}

/// Applies a real function to a positive semidefinite matrix on its support.
///
/// Eigenvalues below `SUPPORT_CUTOFF` times the largest eigenvalue are mapped to
/// zero, which realizes the `0 log 0 = 0` convention for `log` and restricts
/// inverse powers to the support.
pub fn matrix_fn_on_support(a: &CMatrix, f: impl Fn(f64) -> f64) -> Result<HermitianObservable> {
    ensure_square(a)?;
    let herm = hermiticity_residual(a);
    if herm > CHANNEL_TOL * (1.0 + max_abs(a)) {
        return Err(Error::NotHermitian(herm));
    }
    let spec = Spectrum::of(a);
    let scale = spec.max_abs_value().max(1.0);
    if let Some(&min) = spec.values.first() {
        if min < -CHANNEL_TOL * scale {
            return Err(Error::NotPositive(min));
        }
    }
    Ok(HermitianObservable::from_raw(spec.map_on_support(f)?))
}

/// Partial trace over the factors not listed in `keep`.
///
/// `dims` gives the local dimensions in tensor order; the kept factors stay in
/// their original relative order.
pub fn partial_trace_matrix(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let total = ensure_square(m)?;
    let product: usize = dims.iter().product();
    if product != total || dims.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: total,
            got: product,
        });
    }
    let mut kept = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: dims.len(),
            });
        }
        kept[k] = true;
    }
    let kept_dim: usize = dims
        .iter()
        .zip(&kept)
        .filter(|(_, &k)| k)
        .map(|(d, _)| *d)
        .product();

    // split every basis index into (kept part, traced part)
    let mut split = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let (mut k_idx, mut t_idx) = (0usize, 0usize);
        let (mut k_mul, mut t_mul) = (1usize, 1usize);
        for (f, &d) in dims.iter().enumerate().rev() {
            let digit = rem % d;
            rem /= d;
            if kept[f] {
                k_idx += digit * k_mul;
                k_mul *= d;
            } else {
                t_idx += digit * t_mul;
                t_mul *= d;
            }
        }
        split.push((k_idx, t_idx));
    }

    let mut out = CMatrix::zeros(kept_dim, kept_dim);
    for j in 0..total {
        let (kj, tj) = split[j];
        for i in 0..total {
            let (ki, ti) = split[i];
            if ti == tj {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)])
    }

    #[test]
    fn kron_of_identities() {
        let id = CMatrix::identity(2, 2);
        assert_eq!(tensor_product(&id, &id), CMatrix::identity(4, 4));
    }

    #[test]
    fn kron_basis_bookkeeping() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![real(1.0), real(0.0)]));
        let b = CMatrix::from_diagonal(&CVector::from_vec(vec![real(0.0), real(1.0)]));
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![
            real(0.0),
            real(1.0),
            real(0.0),
            real(0.0),
        ]));
        assert_eq!(tensor_product(&a, &b), expected);
    }

    #[test]
    fn kron_xx_flips_00_to_11() {
        let xx = tensor_product(&sigma_x(), &sigma_x());
        let mut ket00 = CVector::zeros(4);
        ket00[0] = real(1.0);
        let out = &xx * &ket00;
        // |11> sits at index 1*2 + 1
        for (i, z) in out.iter().enumerate() {
            let want = if i == 3 { 1.0 } else { 0.0 };
            assert!((z - real(want)).norm() < 1e-15);
        }
    }

    #[test]
    fn eig_sorted_and_reconstructs() {
        let h = HermitianObservable::new(sigma_x()).unwrap();
        let spec = hermitian_eig(&h);
        assert!((spec.values[0] + 1.0).abs() < 1e-12);
        assert!((spec.values[1] - 1.0).abs() < 1e-12);
        assert!(max_abs_diff(&spec.reconstruct(), h.matrix()) < 1e-12);

        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![real(0.75), real(0.25)]));
        let spec = Spectrum::of(&d);
        assert_eq!(spec.values, vec![0.25, 0.75]);
    }

    #[test]
    fn functions_on_support() {
        let d = |a: f64, b: f64| CMatrix::from_diagonal(&CVector::from_vec(vec![real(a), real(b)]));
        let log = matrix_fn_on_support(&d(1.0, 0.0), f64::log2).unwrap();
        assert!(max_abs_diff(log.matrix(), &d(0.0, 0.0)) < 1e-15);
        let isq = matrix_fn_on_support(&d(4.0, 0.0), |x| x.powf(-0.5)).unwrap();
        assert!(max_abs_diff(isq.matrix(), &d(0.5, 0.0)) < 1e-15);
        let log = matrix_fn_on_support(&d(0.5, 0.5), f64::log2).unwrap();
        assert!(max_abs_diff(log.matrix(), &d(-1.0, -1.0)) < 1e-14);
    }

    #[test]
    fn function_undefined_on_support_is_reported() {
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![real(0.5), real(0.5)]));
        let err = matrix_fn_on_support(&d, |x| (x - 0.5).ln()).unwrap_err();
        assert!(matches!(err, Error::FunctionUndefined(_)));
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = CMatrix::identity(4, 4);
        assert!(partial_trace_matrix(&m, &[2, 3], &[0]).is_err());
        assert!(partial_trace_matrix(&m, &[2, 2], &[2]).is_err());
    }
}
