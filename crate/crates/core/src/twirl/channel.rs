use std::sync::{Arc, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::linalg::{max_abs, max_abs_diff, partial_trace_matrix, real, trace, trace_product, CMatrix};
use crate::qcore::random::ginibre;
use crate::qcore::{
    DensityMatrix, QuantumChannel, ResourceDestroyingMap, MAX_SUPEROPERATOR_DIM, SUPEROPERATOR_TOL,
};
use crate::schurweyl::{CollectiveTwirl, Permutation, COLLECTIVE_MAX_D, COLLECTIVE_MAX_N};
use crate::twirl::group::{
    heisenberg_weyl_group, pauli_group_on_a, permutation_group, z_group, FiniteUnitaryGroup,
};

// above this dimension the algebraic checks use random probes instead of superoperators
const DENSE_CHECK_DIM: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TwirlKind {
    Dephasing,
    Depolarizing,
    Local,
    FiniteGroup,
    Permutation,
    Collective,
    Custom,
}

impl std::fmt::Display for TwirlKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TwirlKind::Dephasing => "dephasing",
            TwirlKind::Depolarizing => "depolarizing",
            TwirlKind::Local => "local",
            TwirlKind::FiniteGroup => "finite_group",
            TwirlKind::Permutation => "permutation",
            TwirlKind::Collective => "collective",
            TwirlKind::Custom => "custom",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
enum Action {
    Dephasing,
    Depolarizing,
    Local { d_a: usize, d_b: usize },
    Group(Arc<FiniteUnitaryGroup>),
    Permutation { n: usize, d: usize, maps: Arc<Vec<Vec<usize>>> },
    Collective(Arc<CollectiveTwirl>),
    Custom(Arc<QuantumChannel>),
}

/// A self-adjoint idempotent channel (conditional expectation) with a structured fast path.
///
/// The superoperator is materialized lazily and only for `dim <= MAX_SUPEROPERATOR_DIM`;
/// [`TwirlChannel::apply_matrix`] never needs it.
#[derive(Clone, Debug)]
pub struct TwirlChannel {
    dim: usize,
    kind: TwirlKind,
    label: String,
    action: Action,
    channel: OnceLock<QuantumChannel>,
}

impl TwirlChannel {
    fn build(dim: usize, kind: TwirlKind, label: String, action: Action) -> Self {
        TwirlChannel {
            dim,
            kind,
            label,
            action,
            channel: OnceLock::new(),
        }
    }

    /// Wraps an arbitrary channel; it must be idempotent and self-adjoint within 1e-8.
    pub fn custom(ch: QuantumChannel) -> Result<Self> {
        if ch.dim_in() != ch.dim_out() {
            return Err(Error::DimensionMismatch {
                expected: ch.dim_in(),
                got: ch.dim_out(),
            });
        }
        let idem = ch.idempotency_residual();
        if idem > SUPEROPERATOR_TOL {
            return Err(Error::NotIdempotent(idem));
        }
        let adj = ch.self_adjointness_residual();
        if adj > SUPEROPERATOR_TOL {
            return Err(Error::NotSelfAdjoint(adj));
        }
        let dim = ch.dim_in();
        let tw = TwirlChannel::build(dim, TwirlKind::Custom, "custom".into(), Action::Custom(Arc::new(ch.clone())));
        let _ = tw.channel.set(ch);
        Ok(tw)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> TwirlKind {
        self.kind
    }

    /// Short description such as `dephasing(4)`.
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply_matrix(&self, a: &CMatrix) -> Result<CMatrix> {
        let d = self.dim;
        if a.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: a.nrows(),
            });
        }
        Ok(match &self.action {
            Action::Dephasing => CMatrix::from_diagonal(&a.diagonal()),
            Action::Depolarizing => CMatrix::identity(d, d) * (trace(a) / real(d as f64)),
            Action::Local { d_a, d_b } => {
                let reduced = partial_trace_matrix(a, &[*d_a, *d_b], &[1])?;
                (CMatrix::identity(*d_a, *d_a) / real(*d_a as f64)).kronecker(&reduced)
            }
            Action::Group(g) => g.average_conjugation(a),
            Action::Permutation { maps, .. } => {
                let mut out = CMatrix::zeros(d, d);
                for m in maps.iter() {
                    for j in 0..d {
                        for i in 0..d {
                            out[(m[i], m[j])] += a[(i, j)];
                        }
                    }
                }
                out / real(maps.len() as f64)
            }
            Action::Collective(c) => c.apply_matrix(a)?,
            Action::Custom(ch) => ch.apply_matrix(a)?,
        })
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_raw(self.apply_matrix(rho.matrix())?))
    }

    /// The superoperator form, built on first use.
    pub fn channel(&self) -> Result<&QuantumChannel> {
        if let Some(ch) = self.channel.get() {
            return Ok(ch);
        }
        let d = self.dim;
        if d > MAX_SUPEROPERATOR_DIM {
            return Err(Error::SizeGuard(format!(
                "superoperator of a {d}-dimensional map (limit {MAX_SUPEROPERATOR_DIM})"
            )));
        }
        let mut s = CMatrix::zeros(d * d, d * d);
        let mut unit = CMatrix::zeros(d, d);
        for j in 0..d {
            for i in 0..d {
                unit[(i, j)] = real(1.0);
                let out = self.apply_matrix(&unit)?;
                s.column_mut(i + j * d).copy_from_slice(out.as_slice());
                unit[(i, j)] = real(0.0);
            }
        }
        // completely positive and trace preserving by construction
        let ch = QuantumChannel::from_superoperator_unchecked(d, s);
        Ok(self.channel.get_or_init(|| ch))
    }

    fn use_superoperator(&self) -> bool {
        self.dim <= DENSE_CHECK_DIM || self.channel.get().is_some()
    }

    fn probes(&self) -> Vec<CMatrix> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7a11);
        (0..3).map(|_| ginibre(self.dim, self.dim, &mut rng)).collect()
    }

    /// `max |G∘G - G|`, from the superoperator when available and from random probes otherwise.
    pub fn idempotency_residual(&self) -> Result<f64> {
        if self.use_superoperator() {
            return Ok(self.channel()?.idempotency_residual());
        }
        let mut worst: f64 = 0.0;
        for a in self.probes() {
            let once = self.apply_matrix(&a)?;
            let twice = self.apply_matrix(&once)?;
            worst = worst.max(max_abs_diff(&once, &twice) / max_abs(&a).max(1.0));
        }
        Ok(worst)
    }

    /// Hilbert-Schmidt self-adjointness residual.
    pub fn self_adjointness_residual(&self) -> Result<f64> {
        if self.use_superoperator() {
            return Ok(self.channel()?.self_adjointness_residual());
        }
        let p = self.probes();
        let mut worst: f64 = 0.0;
        for (a, b) in p.iter().zip(p.iter().skip(1)) {
            let lhs = trace_product(&b.adjoint(), &self.apply_matrix(a)?);
            let rhs = trace_product(&self.apply_matrix(b)?.adjoint(), a);
            worst = worst.max((lhs - rhs).norm() / (self.dim * self.dim) as f64);
        }
        Ok(worst)
    }

    /// A finite group whose uniform twirl equals this map.
    pub fn realizing_group(&self) -> Result<FiniteUnitaryGroup> {
        match &self.action {
            Action::Dephasing => z_group(self.dim),
            Action::Depolarizing => heisenberg_weyl_group(self.dim),
            Action::Local { d_a, d_b } => pauli_group_on_a(*d_a, *d_b),
            Action::Group(g) => Ok((**g).clone()),
            Action::Permutation { n, d, .. } => permutation_group(*n, *d),
            Action::Collective(_) | Action::Custom(_) => Err(Error::Unsupported(format!(
                "{} twirl has no finite realizing group",
                self.kind
            ))),
        }
    }

    /// `G^{⊗n}` on `n` copies.
    pub fn tensor_power(&self, n: usize) -> Result<TwirlChannel> {
        if n == 0 {
            return Err(Error::out_of_range("n", "[1, inf)", 0.0));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        match &self.action {
            Action::Dephasing => {
                let dim = self
                    .dim
                    .checked_pow(n as u32)
                    .ok_or_else(|| Error::SizeGuard(format!("{}^{n}", self.dim)))?;
                dephasing_channel(dim)
            }
            _ => {
                let mut tw = finite_group_twirl(self.realizing_group()?.tensor_power(n)?)?;
                tw.label = format!("{}^{n}", self.label);
                tw.kind = self.kind;
                Ok(tw)
            }
        }
    }
}

impl ResourceDestroyingMap for TwirlChannel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn destroy(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.apply(rho)
    }

    fn idempotency_residual(&self) -> f64 {
        TwirlChannel::idempotency_residual(self).unwrap_or(f64::INFINITY)
    }

    fn tag(&self) -> String {
        self.label.clone()
    }
}

/// `(1/|G|) sum_g U_g rho U_g^dagger`.
pub fn finite_group_twirl(g: FiniteUnitaryGroup) -> Result<TwirlChannel> {
    g.validate()?;
    Ok(TwirlChannel::build(
        g.dim(),
        TwirlKind::FiniteGroup,
        format!("group(order {}, dim {})", g.order(), g.dim()),
        Action::Group(Arc::new(g)),
    ))
}

fn check_dim(name: &'static str, d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::out_of_range(name, "[1, inf)", 0.0));
    }
    Ok(())
}

/// Complete dephasing in the computational basis.
pub fn dephasing_channel(dim: usize) -> Result<TwirlChannel> {
    check_dim("dim", dim)?;
    Ok(TwirlChannel::build(dim, TwirlKind::Dephasing, format!("dephasing({dim})"), Action::Dephasing))
}

/// `rho -> tr(rho) 1/d`.
pub fn depolarizing_channel(dim: usize) -> Result<TwirlChannel> {
    check_dim("dim", dim)?;
    Ok(TwirlChannel::build(
        dim,
        TwirlKind::Depolarizing,
        format!("depolarizing({dim})"),
        Action::Depolarizing,
    ))
}

/// `rho_AB -> 1_A/d_A ⊗ tr_A(rho_AB)`.
pub fn local_unital_twirl(d_a: usize, d_b: usize) -> Result<TwirlChannel> {
    check_dim("d_a", d_a)?;
    check_dim("d_b", d_b)?;
    Ok(TwirlChannel::build(
        d_a * d_b,
        TwirlKind::Local,
        format!("local({d_a},{d_b})"),
        Action::Local { d_a, d_b },
    ))
}

/// Uniform average over permutations of the `n` factors of `(C^d)^{⊗n}`.
pub fn permutation_twirl(n: usize, d: usize) -> Result<TwirlChannel> {
    if n == 0 || d == 0 || n > COLLECTIVE_MAX_N || d > COLLECTIVE_MAX_D {
        return Err(Error::SizeGuard(format!(
            "permutation twirl limited to n <= {COLLECTIVE_MAX_N}, d <= {COLLECTIVE_MAX_D}; got n = {n}, d = {d}"
        )));
    }
    let maps = Permutation::all(n).iter().map(|p| p.index_map(d)).collect();
    Ok(TwirlChannel::build(
        d.pow(n as u32),
        TwirlKind::Permutation,
        format!("permutation({n},{d})"),
        Action::Permutation {
            n,
            d,
            maps: Arc::new(maps),
        },
    ))
}

/// Exact twirl over collective unitaries `U^{⊗n}`.
pub fn collective_twirl(n: usize, d: usize) -> Result<TwirlChannel> {
    let c = CollectiveTwirl::new(n, d)?;
    Ok(TwirlChannel::build(
        c.dim(),
        TwirlKind::Collective,
        format!("collective({n},{d})"),
        Action::Collective(Arc::new(c)),
    ))
}
