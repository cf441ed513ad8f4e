use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::linalg::{
    ensure_square, hermiticity_residual, max_abs_diff, CMatrix, CVector, Spectrum,
    CHANNEL_TOL,
};
use crate::qcore::DensityMatrix;

/// Residual threshold used when comparing superoperators.
pub const SUPEROPERATOR_TOL: f64 = 1e-8;

/// Largest operator dimension for which superoperators are materialized.
pub const MAX_SUPEROPERATOR_DIM: usize = 32;

pub(crate) fn vectorize(a: &CMatrix) -> CVector {
    CVector::from_column_slice(a.as_slice())
}

pub(crate) fn unvectorize(v: &[num_complex::Complex64], rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_column_slice(rows, cols, v)
}

/// A completely positive trace-preserving map stored as a superoperator acting on
/// column-stacked operators, with optional Kraus operators.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    superop: CMatrix,
    kraus: Option<Vec<CMatrix>>,
}

impl QuantumChannel {
    pub fn from_kraus(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::Parse("empty Kraus list".into()))?;
        let (dim_out, dim_in) = first.shape();
        let mut superop = CMatrix::zeros(dim_out * dim_out, dim_in * dim_in);
        for k in &kraus {
            if k.shape() != (dim_out, dim_in) {
                return Err(Error::DimensionMismatch {
                    expected: dim_out * dim_in,
                    got: k.nrows() * k.ncols(),
                });
            }
            superop += k.conjugate().kronecker(k);
        }
        let ch = QuantumChannel {
            dim_in,
            dim_out,
            superop,
            kraus: Some(kraus),
        };
        ch.validate()?;
        Ok(ch)
    }

    pub fn from_superoperator(dim_in: usize, dim_out: usize, superop: CMatrix) -> Result<Self> {
        if superop.shape() != (dim_out * dim_out, dim_in * dim_in) {
            return Err(Error::DimensionMismatch {
                expected: dim_out * dim_out * dim_in * dim_in,
                got: superop.nrows() * superop.ncols(),
            });
        }
        let ch = QuantumChannel {
            dim_in,
            dim_out,
            superop,
            kraus: None,
        };
        ch.validate()?;
        Ok(ch)
    }

    pub(crate) fn from_superoperator_unchecked(dim: usize, superop: CMatrix) -> Self {
        QuantumChannel {
            dim_in: dim,
            dim_out: dim,
            superop,
            kraus: None,
        }
    }

    pub fn identity(dim: usize) -> Self {
        QuantumChannel {
            dim_in: dim,
            dim_out: dim,
            superop: CMatrix::identity(dim * dim, dim * dim),
            kraus: Some(vec![CMatrix::identity(dim, dim)]),
        }
    }

    /// Conjugation `rho -> U rho U^dagger`.
    pub fn unitary(u: &CMatrix) -> Result<Self> {
        QuantumChannel::from_kraus(vec![u.clone()])
    }

    /// The replacement map `rho -> tr(rho) * fixed` (for instance the thermalising map).
    pub fn replacement(fixed: &DensityMatrix) -> Self {
        let d = fixed.dim();
        let out = vectorize(fixed.matrix());
        let ones = vectorize(&CMatrix::identity(d, d));
        QuantumChannel {
            dim_in: d,
            dim_out: d,
            superop: &out * ones.transpose(),
            kraus: None,
        }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn superoperator(&self) -> &CMatrix {
        &self.superop
    }

    pub fn kraus(&self) -> Option<&[CMatrix]> {
        self.kraus.as_deref()
    }

    pub fn apply_matrix(&self, a: &CMatrix) -> Result<CMatrix> {
        if a.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                got: a.nrows(),
            });
        }
        let out = &self.superop * vectorize(a);
        Ok(unvectorize(out.as_slice(), self.dim_out, self.dim_out))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_raw(self.apply_matrix(rho.matrix())?))
    }

    /// `next ∘ self`: apply `self` first.
    pub fn then(&self, next: &QuantumChannel) -> Result<QuantumChannel> {
        if next.dim_in != self.dim_out {
            return Err(Error::DimensionMismatch {
                expected: self.dim_out,
                got: next.dim_in,
            });
        }
        Ok(QuantumChannel {
            dim_in: self.dim_in,
            dim_out: next.dim_out,
            superop: &next.superop * &self.superop,
            kraus: None,
        })
    }

    /// Choi matrix `sum_ij |i><j| ⊗ E(|i><j|)`.
    pub fn choi(&self) -> CMatrix {
        let (din, dout) = (self.dim_in, self.dim_out);
        let mut j = CMatrix::zeros(din * dout, din * dout);
        for col_in in 0..din {
            for row_in in 0..din {
                let src = row_in + col_in * din;
                for b in 0..dout {
                    for a in 0..dout {
                        j[(row_in * dout + a, col_in * dout + b)] = self.superop[(a + b * dout, src)];
                    }
                }
            }
        }
        j
    }

    /// `max |E^dagger(1) - 1|`.
    pub fn trace_preservation_residual(&self) -> f64 {
        let id_out = vectorize(&CMatrix::identity(self.dim_out, self.dim_out));
        let back = self.superop.adjoint() * id_out;
        let back = unvectorize(back.as_slice(), self.dim_in, self.dim_in);
        max_abs_diff(&back, &CMatrix::identity(self.dim_in, self.dim_in))
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        Spectrum::of(&self.choi()).values.first().copied().unwrap_or(0.0)
    }

    /// `max |S∘S - S|`; only meaningful for maps with equal input and output dimension.
    pub fn idempotency_residual(&self) -> f64 {
        if self.dim_in != self.dim_out {
            return f64::INFINITY;
        }
        max_abs_diff(&(&self.superop * &self.superop), &self.superop)
    }

    /// `max |S - S^dagger|`, i.e. self-adjointness in the Hilbert-Schmidt inner product.
    pub fn self_adjointness_residual(&self) -> f64 {
        if self.dim_in != self.dim_out {
            return f64::INFINITY;
        }
        hermiticity_residual(&self.superop)
    }

    pub fn validate(&self) -> Result<()> {
        let tp = self.trace_preservation_residual();
        if tp > CHANNEL_TOL {
            return Err(Error::NotTracePreserving(tp));
        }
        let choi = self.choi();
        let herm = hermiticity_residual(&choi);
        if herm > CHANNEL_TOL {
            return Err(Error::NotCompletelyPositive(-herm));
        }
        let min = Spectrum::of(&choi).values.first().copied().unwrap_or(0.0);
        if min < -CHANNEL_TOL {
            return Err(Error::NotCompletelyPositive(min));
        }
        if let Some(kraus) = &self.kraus {
            let mut sum = CMatrix::zeros(self.dim_in, self.dim_in);
            let mut superop = CMatrix::zeros(self.superop.nrows(), self.superop.ncols());
            for k in kraus {
                sum += k.adjoint() * k;
                superop += k.conjugate().kronecker(k);
            }
            let r1 = max_abs_diff(&sum, &CMatrix::identity(self.dim_in, self.dim_in));
            let r2 = max_abs_diff(&superop, &self.superop);
            if r1.max(r2) > CHANNEL_TOL {
                return Err(Error::KrausMismatch(r1.max(r2)));
            }
        }
        Ok(())
    }
}

/// Applies a channel to a state.
pub fn apply_channel(ch: &QuantumChannel, state: &DensityMatrix) -> Result<DensityMatrix> {
    ch.apply(state)
}

/// Outcome of checking that an encoding commutes with a resource destroying map.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EncodingCheck {
    pub satisfied: bool,
    /// `max |E∘D - D|`
    pub left_residual: f64,
    /// `max |D∘E - D|`
    pub right_residual: f64,
}

/// Checks `enc ∘ rdm = rdm` and `rdm ∘ enc = rdm` on superoperators.
pub fn verify_encoding_constraint(enc: &QuantumChannel, rdm: &QuantumChannel) -> Result<EncodingCheck> {
    if enc.dim_in != enc.dim_out || rdm.dim_in != rdm.dim_out || enc.dim_in != rdm.dim_in {
        return Err(Error::DimensionMismatch {
            expected: rdm.dim_in,
            got: enc.dim_in,
        });
    }
    let idem = rdm.idempotency_residual();
    if idem > SUPEROPERATOR_TOL {
        return Err(Error::NotIdempotent(idem));
    }
    let s_e = &enc.superop;
    let s_d = &rdm.superop;
    let left_residual = max_abs_diff(&(s_e * s_d), s_d);
    let right_residual = max_abs_diff(&(s_d * s_e), s_d);
    Ok(EncodingCheck {
        satisfied: left_residual < SUPEROPERATOR_TOL && right_residual < SUPEROPERATOR_TOL,
        left_residual,
        right_residual,
    })
}

/// A positive operator-valued measure.
#[derive(Clone, Debug)]
pub struct Povm {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let povm = Povm::from_raw(elements)?;
        povm.validate()?;
        Ok(povm)
    }

    pub(crate) fn from_raw(elements: Vec<CMatrix>) -> Result<Self> {
        let dim = match elements.first() {
            Some(e) => ensure_square(e)?,
            None => return Err(Error::InvalidPovm("no elements".into())),
        };
        Ok(Povm { dim, elements })
    }

    pub fn validate(&self) -> Result<()> {
        let mut sum = CMatrix::zeros(self.dim, self.dim);
        for (k, e) in self.elements.iter().enumerate() {
            if e.shape() != (self.dim, self.dim) {
                return Err(Error::InvalidPovm(format!("element {k} has the wrong shape")));
            }
            if hermiticity_residual(e) > CHANNEL_TOL {
                return Err(Error::InvalidPovm(format!("element {k} is not Hermitian")));
            }
            let min = Spectrum::of(e).values.first().copied().unwrap_or(0.0);
            if min < -CHANNEL_TOL {
                return Err(Error::InvalidPovm(format!(
                    "element {k} has negative eigenvalue {min:e}"
                )));
            }
            sum += e;
        }
        let r = max_abs_diff(&sum, &CMatrix::identity(self.dim, self.dim));
        if r > CHANNEL_TOL {
            return Err(Error::InvalidPovm(format!(
                "elements sum to identity only within {r:e}"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Outcome probabilities `tr(rho E_k)`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Vec<f64> {
        self.elements
            .iter()
            .map(|e| crate::qcore::linalg::trace_product(rho.matrix(), e).re)
            .collect()
    }
}

/// A map that erases a resource; encodings must commute with it.
pub trait ResourceDestroyingMap {
    fn dim(&self) -> usize;
    fn destroy(&self, rho: &DensityMatrix) -> Result<DensityMatrix>;
    /// `max |D∘D - D|`; zero for maps that are idempotent by construction.
    fn idempotency_residual(&self) -> f64;
    fn tag(&self) -> String;
}

impl ResourceDestroyingMap for QuantumChannel {
    fn dim(&self) -> usize {
        self.dim_in
    }

    fn destroy(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.apply(rho)
    }

    fn idempotency_residual(&self) -> f64 {
        QuantumChannel::idempotency_residual(self)
    }

    fn tag(&self) -> String {
        "custom".into()
    }
}
