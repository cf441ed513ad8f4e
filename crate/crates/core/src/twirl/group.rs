use std::f64::consts::PI;

use log::warn;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qcore::linalg::{max_abs_diff, real, trace_product, CMatrix, C64};
use crate::schurweyl::{permutation_operator, Permutation};

/// Largest group accepted anywhere.
pub const MAX_GROUP_ORDER: usize = 4096;
/// Groups up to this order get the full closure check.
pub const CLOSURE_CHECK_ORDER: usize = 64;

const UNITARY_TOL: f64 = 1e-9;
const CLOSURE_TOL: f64 = 1e-8;

/// An explicit list of unitaries closed under multiplication up to global phase.
#[derive(Clone, Debug)]
pub struct FiniteUnitaryGroup {
    dim: usize,
    elements: Vec<CMatrix>,
    labels: Option<Vec<String>>,
}

// |tr(A^dagger B)| / d close to 1 means B = e^{i phi} A for unitary A, B
fn equal_up_to_phase(a: &CMatrix, b: &CMatrix) -> bool {
    let d = a.nrows() as f64;
    (trace_product(&a.adjoint(), b).norm() / d - 1.0).abs() < CLOSURE_TOL
}

impl FiniteUnitaryGroup {
    /// Validates unitarity, presence of the identity and (for small groups) closure.
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let g = FiniteUnitaryGroup::from_raw(elements)?;
        g.validate()?;
        Ok(g)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.elements.len() {
            return Err(Error::DimensionMismatch {
                expected: self.elements.len(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    // shape and size checks only
    fn from_raw(elements: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::MissingIdentity);
        };
        if elements.len() > MAX_GROUP_ORDER {
            return Err(Error::SizeGuard(format!(
                "group order {} exceeds {MAX_GROUP_ORDER}",
                elements.len()
            )));
        }
        let dim = first.nrows();
        for e in &elements {
            if e.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: e.nrows().max(e.ncols()),
                });
            }
        }
        Ok(FiniteUnitaryGroup {
            dim,
            elements,
            labels: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let id = CMatrix::identity(self.dim, self.dim);
        for (index, u) in self.elements.iter().enumerate() {
            let residual = max_abs_diff(&(u.adjoint() * u), &id);
            if residual > UNITARY_TOL {
                return Err(Error::NotUnitary { index, residual });
            }
        }
        if !self.elements.iter().any(|u| equal_up_to_phase(u, &id)) {
            return Err(Error::MissingIdentity);
        }
        if self.order() > CLOSURE_CHECK_ORDER {
            warn!(
                "closure check skipped for group of order {} (> {CLOSURE_CHECK_ORDER})",
                self.order()
            );
            return Ok(());
        }
        for (left, a) in self.elements.iter().enumerate() {
            for (right, b) in self.elements.iter().enumerate() {
                let ab = a * b;
                if !self.elements.iter().any(|c| equal_up_to_phase(c, &ab)) {
                    return Err(Error::GroupNotClosed { left, right });
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn element(&self, index: usize) -> Result<&CMatrix> {
        self.elements.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.order(),
        })
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// `{U ⊗ V}` over all pairs, `self` as the left factor.
    pub fn tensor(&self, other: &FiniteUnitaryGroup) -> Result<FiniteUnitaryGroup> {
        let order = self.order() * other.order();
        if order > MAX_GROUP_ORDER {
            return Err(Error::SizeGuard(format!(
                "group order {order} exceeds {MAX_GROUP_ORDER}"
            )));
        }
        let mut elements = Vec::with_capacity(order);
        for a in &self.elements {
            for b in &other.elements {
                elements.push(a.kronecker(b));
            }
        }
        let labels = match (&self.labels, &other.labels) {
            (Some(la), Some(lb)) => Some(
                la.iter()
                    .flat_map(|a| lb.iter().map(move |b| format!("{a}⊗{b}")))
                    .collect(),
            ),
            _ => None,
        };
        // products of group elements form a group; no re-validation needed
        Ok(FiniteUnitaryGroup {
            dim: self.dim * other.dim,
            elements,
            labels,
        })
    }

    pub fn tensor_power(&self, n: usize) -> Result<FiniteUnitaryGroup> {
        let mut out = trivial_group(1);
        for _ in 0..n {
            out = out.tensor(self)?;
        }
        Ok(out)
    }

    /// `(1/|G|) sum_g U_g A U_g^dagger`.
    pub fn average_conjugation(&self, a: &CMatrix) -> CMatrix {
        let dim = self.dim;
        // fixed chunking keeps the summation order independent of the thread count
        let partial: Vec<CMatrix> = self
            .elements
            .par_chunks(32)
            .map(|chunk| {
                chunk
                    .iter()
                    .fold(CMatrix::zeros(dim, dim), |acc, u| acc + u * a * u.adjoint())
            })
            .collect();
        let sum = partial
            .into_iter()
            .fold(CMatrix::zeros(dim, dim), |acc, p| acc + p);
        sum / real(self.order() as f64)
    }
}

/// `{1}` on `C^dim`.
pub fn trivial_group(dim: usize) -> FiniteUnitaryGroup {
    FiniteUnitaryGroup {
        dim,
        elements: vec![CMatrix::identity(dim, dim)],
        labels: Some(vec!["I".into()]),
    }
}

fn omega(d: usize, k: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * (k % d) as f64 / d as f64)
}

/// Generalized Pauli operators `X^a Z^b` with `X|j> = |j+1>`, `Z|j> = omega^j |j>`.
fn weyl(d: usize, a: usize, b: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for j in 0..d {
        m[((j + a) % d, j)] = omega(d, b * j);
    }
    m
}

/// `{Z^k}` with `Z = diag(omega^j)`; its twirl is complete dephasing.
pub fn z_group(d: usize) -> Result<FiniteUnitaryGroup> {
    if d == 0 {
        return Err(Error::out_of_range("d", "[1, inf)", 0.0));
    }
    let elements = (0..d).map(|k| weyl(d, 0, k)).collect();
    let labels = (0..d).map(|k| format!("Z^{k}")).collect();
    FiniteUnitaryGroup::from_raw(elements)?.with_labels(labels)
}

/// `{X^a Z^b}`; closes only up to phase. Its twirl is complete depolarization.
pub fn heisenberg_weyl_group(d: usize) -> Result<FiniteUnitaryGroup> {
    if d == 0 {
        return Err(Error::out_of_range("d", "[1, inf)", 0.0));
    }
    if d * d > MAX_GROUP_ORDER {
        return Err(Error::SizeGuard(format!("Heisenberg-Weyl group of order {}", d * d)));
    }
    let mut elements = Vec::with_capacity(d * d);
    let mut labels = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            elements.push(weyl(d, a, b));
            labels.push(format!("X^{a}Z^{b}"));
        }
    }
    FiniteUnitaryGroup::from_raw(elements)?.with_labels(labels)
}

/// Heisenberg-Weyl operators on the first factor of `C^{d_a} ⊗ C^{d_b}`.
pub fn pauli_group_on_a(d_a: usize, d_b: usize) -> Result<FiniteUnitaryGroup> {
    let mut g = heisenberg_weyl_group(d_a)?;
    let id = CMatrix::identity(d_b, d_b);
    g.elements = g.elements.iter().map(|u| u.kronecker(&id)).collect();
    g.dim = d_a * d_b;
    Ok(g)
}

/// Operators permuting the `n` factors of `(C^d)^{⊗n}`.
pub fn permutation_group(n: usize, d: usize) -> Result<FiniteUnitaryGroup> {
    if n == 0 || d == 0 || n > 6 || (d as f64).powi(n as i32) > 1024.0 {
        return Err(Error::SizeGuard(format!("permutation group for n = {n}, d = {d}")));
    }
    let perms = Permutation::all(n);
    let labels = perms
        .iter()
        .map(|p| format!("{:?}", p.mapping()))
        .collect();
    let elements = perms.iter().map(|p| permutation_operator(p, d)).collect();
    FiniteUnitaryGroup::from_raw(elements)?.with_labels(labels)
}
