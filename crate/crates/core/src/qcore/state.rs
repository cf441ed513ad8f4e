use crate::error::{Error, Result};
use crate::qcore::linalg::{
    ensure_square, hermiticity_residual, max_abs, partial_trace_matrix, real, trace, CMatrix,
    CVector, Spectrum, HERMITIAN_TOL, STATE_PSD_TOL, TRACE_TOL,
};

/// A positive semidefinite, unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity before accepting `mat`.
    pub fn new(mat: CMatrix) -> Result<Self> {
        let state = DensityMatrix { mat };
        state.validate()?;
        Ok(state)
    }

    /// Wraps a matrix produced by a trusted computation without re-validating it.
    pub(crate) fn from_raw(mat: CMatrix) -> Self {
        DensityMatrix { mat }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_square(&self.mat)?;
        let herm = hermiticity_residual(&self.mat);
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = trace(&self.mat);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let spec = Spectrum::of(&self.mat);
        if let Some(&min) = spec.values.first() {
            if min < -STATE_PSD_TOL {
                return Err(Error::NotPositive(min));
            }
        }
        Ok(())
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let v = psi.amplitudes();
        DensityMatrix {
            mat: v * v.adjoint(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            mat: CMatrix::identity(dim, dim) * real(1.0 / dim as f64),
        }
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        let v = CVector::from_iterator(populations.len(), populations.iter().map(|&p| real(p)));
        DensityMatrix::new(CMatrix::from_diagonal(&v))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            mat: self.mat.kronecker(&other.mat),
        }
    }

    pub fn tensor_power(&self, n: usize) -> DensityMatrix {
        let mut out = CMatrix::identity(1, 1);
        for _ in 0..n {
            out = out.kronecker(&self.mat);
        }
        DensityMatrix { mat: out }
    }

    /// `U rho U^dagger`; `u` is assumed unitary.
    pub fn conjugate_by(&self, u: &CMatrix) -> DensityMatrix {
        DensityMatrix {
            mat: u * &self.mat * u.adjoint(),
        }
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::of(&self.mat)
    }

    /// Populations in the computational basis.
    pub fn populations(&self) -> Vec<f64> {
        self.mat.diagonal().iter().map(|z| z.re).collect()
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|j| (0..n).all(|i| i == j || self.mat[(i, j)] == real(0.0)))
    }
}

/// Reduced state on the factors in `keep`; `dims` lists local dimensions in tensor order.
pub fn partial_trace(state: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    Ok(DensityMatrix::from_raw(partial_trace_matrix(
        state.matrix(),
        dims,
        keep,
    )?))
}

/// A unit vector in a finite-dimensional Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amps: CVector,
}

impl PureState {
    pub fn new(amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(PureState { amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(PureState {
            amps: amps.unscale(norm),
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        PureState::new(CVector::from_iterator(
            amps.len(),
            amps.iter().map(|&a| real(a)),
        ))
    }

    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, len: dim });
        }
        let mut amps = CVector::zeros(dim);
        amps[k] = real(1.0);
        Ok(PureState { amps })
    }

    /// Equal-weight superposition of all computational basis states.
    pub fn uniform_superposition(dim: usize) -> Self {
        PureState {
            amps: CVector::from_element(dim, real(1.0 / (dim as f64).sqrt())),
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            amps: self.amps.kronecker(&other.amps),
        }
    }

    pub fn tensor_power(&self, n: usize) -> PureState {
        let mut amps = CVector::from_element(1, real(1.0));
        for _ in 0..n {
            amps = amps.kronecker(&self.amps);
        }
        PureState { amps }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> num_complex::Complex64 {
        self.amps.dotc(&other.amps)
    }
}

/// A Hermitian matrix such as a Hamiltonian or a matrix logarithm.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianObservable {
    mat: CMatrix,
}

impl HermitianObservable {
    pub fn new(mat: CMatrix) -> Result<Self> {
        ensure_square(&mat)?;
        let herm = hermiticity_residual(&mat);
        if herm > HERMITIAN_TOL * (1.0 + max_abs(&mat)) {
            return Err(Error::NotHermitian(herm));
        }
        Ok(HermitianObservable { mat })
    }

    pub(crate) fn from_raw(mat: CMatrix) -> Self {
        HermitianObservable { mat }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let v = CVector::from_iterator(values.len(), values.iter().map(|&x| real(x)));
        HermitianObservable {
            mat: CMatrix::from_diagonal(&v),
        }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianObservable {
            mat: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }
}
