//! Upper, sandwich and second-order bounds on the number of encodable messages, in bits.

use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{
    entropy_variance, hypothesis_testing_relative_entropy, info_spectrum_pure_vs_diagonal,
    info_spectrum_relative_entropy, inverse_normal_cdf, relative_entropy,
    relative_entropy_variance, shannon_entropy, von_neumann_entropy, Divergence,
};
use crate::error::{Error, Result};
use crate::qcore::linalg::{real, Spectrum};
use crate::qcore::{
    partial_trace, DensityMatrix, HermitianObservable, PureState, ResourceDestroyingMap,
    SUPEROPERATOR_TOL,
};
use crate::twirl::{dephasing_channel, TwirlChannel};

/// Variances below this are rounding noise and the second-order term is dropped.
pub const VARIANCE_ZERO_TOL: f64 = 1e-12;

/// Relative tolerance for merging degenerate energies.
pub const ENERGY_MERGE_TOL: f64 = 1e-9;

/// Largest state dimension for which [`rate_curve`] evaluates the sandwich densely.
pub const DENSE_SANDWICH_DIM: usize = 64;

/// Largest state dimension for the pure-state/dephasing fast path.
pub const FAST_SANDWICH_DIM: usize = 1 << 16;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SandwichRow {
    pub delta: f64,
    /// `D_s^{eps-delta}(rho||G rho) + log2 delta`
    pub lower: Divergence,
    /// `D_s^{eps+delta}(rho||G rho) + log2(1/delta)`
    pub upper: Divergence,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    /// `D_H^eps(rho||G rho)`; absent on the pure-state fast path.
    pub log2_upper: Option<Divergence>,
    pub sandwich: Vec<SandwichRow>,
    pub best_lower: Divergence,
    pub best_upper: Divergence,
    pub epsilon: f64,
    pub state_dim: usize,
    pub rdm_tag: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rate {
    pub first_order: f64,
    pub second_order: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RateRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub first_order: f64,
    pub second_order: f64,
    /// Sandwich bounds per copy; `None` when `d^N` is too large to evaluate.
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RateCurve {
    pub epsilon: f64,
    pub rdm_tag: String,
    pub rows: Vec<RateRow>,
}

impl RateCurve {
    /// CSV with header `N,first_order,second_order,lower,upper`; missing bounds are empty.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).map_err(csv_error)?;
        }
        if self.rows.is_empty() {
            w.write_record(["N", "first_order", "second_order", "lower", "upper"])
                .map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn finite_or_support_violation(d: Divergence) -> Result<f64> {
    d.finite().ok_or(Error::SupportViolation)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::out_of_range("eps", "(0, 1)", eps));
    }
    Ok(())
}

fn check_delta(eps: f64, delta: f64) -> Result<()> {
    let top = eps.min(1.0 - eps);
    if !(delta > 0.0 && delta < top) {
        return Err(Error::out_of_range("delta", "(0, min(eps, 1 - eps))", delta));
    }
    Ok(())
}

/// `D_H^eps(rho || D(rho))`, the converse bound on `log2 M`.
pub fn upper_bound_log_messages(
    rho: &DensityMatrix,
    rdm: &dyn ResourceDestroyingMap,
    eps: f64,
) -> Result<Divergence> {
    check_eps(eps)?;
    let idem = rdm.idempotency_residual();
    if idem > SUPEROPERATOR_TOL {
        return Err(Error::NotIdempotent(idem));
    }
    let free = rdm.destroy(rho)?;
    hypothesis_testing_relative_entropy(rho, &free, eps)
}

fn best_of(rows: &[SandwichRow]) -> (Divergence, Divergence) {
    let lower = rows
        .iter()
        .map(|r| r.lower)
        .fold(Divergence::Finite(f64::NEG_INFINITY), |a, b| {
            if b.value() > a.value() {
                b
            } else {
                a
            }
        });
    let upper = rows
        .iter()
        .map(|r| r.upper)
        .fold(Divergence::Infinite, |a, b| if b.value() < a.value() { b } else { a });
    (lower, upper)
}

fn sandwich_rows(
    eps: f64,
    delta_grid: &[f64],
    ds: impl Fn(f64) -> Result<Divergence> + Sync,
) -> Result<Vec<SandwichRow>> {
    if delta_grid.is_empty() {
        return Err(Error::out_of_range("delta grid length", "[1, inf)", 0.0));
    }
    for &d in delta_grid {
        check_delta(eps, d)?;
    }
    delta_grid
        .par_iter()
        .map(|&delta| {
            let lower = ds(eps - delta)?.map(|v| v + delta.log2());
            let upper = ds(eps + delta)?.map(|v| v - delta.log2());
            Ok(SandwichRow { delta, lower, upper })
        })
        .collect()
}

/// Lower and upper bounds on `log2 M` over a grid of `delta in (0, min(eps, 1-eps))`,
/// together with the hypothesis-testing upper bound.
pub fn sandwich_bounds(
    rho: &DensityMatrix,
    twirl: &TwirlChannel,
    eps: f64,
    delta_grid: &[f64],
) -> Result<BoundReport> {
    check_eps(eps)?;
    let free = twirl.apply(rho)?;
    let sandwich = sandwich_rows(eps, delta_grid, |x| {
        info_spectrum_relative_entropy(rho, &free, x)
    })?;
    let (best_lower, best_upper) = best_of(&sandwich);
    Ok(BoundReport {
        log2_upper: Some(hypothesis_testing_relative_entropy(rho, &free, eps)?),
        sandwich,
        best_lower,
        best_upper,
        epsilon: eps,
        state_dim: rho.dim(),
        rdm_tag: twirl.label().to_string(),
    })
}

/// [`sandwich_bounds`] for a pure state under complete dephasing, without dense
/// eigendecompositions. The hypothesis-testing bound is not computed.
pub fn sandwich_bounds_pure_dephased(
    psi: &PureState,
    eps: f64,
    delta_grid: &[f64],
) -> Result<BoundReport> {
    check_eps(eps)?;
    if psi.dim() > FAST_SANDWICH_DIM {
        return Err(Error::SizeGuard(format!(
            "dimension {} exceeds {FAST_SANDWICH_DIM}",
            psi.dim()
        )));
    }
    let pops: Vec<f64> = psi.amplitudes().iter().map(|a| a.norm_sqr()).collect();
    let sandwich = sandwich_rows(eps, delta_grid, |x| {
        info_spectrum_pure_vs_diagonal(psi, &pops, x)
    })?;
    let (best_lower, best_upper) = best_of(&sandwich);
    Ok(BoundReport {
        log2_upper: None,
        sandwich,
        best_lower,
        best_upper,
        epsilon: eps,
        state_dim: psi.dim(),
        rdm_tag: format!("dephasing({})", psi.dim()),
    })
}

fn second_order(first: f64, variance: f64, eps: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::out_of_range("N", "[1, inf)", 0.0));
    }
    if variance <= VARIANCE_ZERO_TOL {
        return Ok(first);
    }
    Ok(first + inverse_normal_cdf(eps)? * (variance / n as f64).sqrt())
}

/// Per-copy rate `D(rho||G rho) + Phi^{-1}(eps) sqrt(V(rho||G rho) / N)` and its first-order part.
pub fn asymptotic_rate(rho: &DensityMatrix, twirl: &TwirlChannel, eps: f64, n: usize) -> Result<Rate> {
    check_eps(eps)?;
    let free = twirl.apply(rho)?;
    let first = finite_or_support_violation(relative_entropy(rho, &free)?)?;
    let v = relative_entropy_variance(rho, &free)?;
    Ok(Rate {
        first_order: first,
        second_order: second_order(first, v, eps, n)?,
    })
}

/// `delta_N = min(eps, 1 - eps) / (2 sqrt N)`, the grid point used by [`rate_curve`].
pub fn default_delta(eps: f64, n: usize) -> f64 {
    eps.min(1.0 - eps) / (2.0 * (n.max(1) as f64).sqrt())
}

/// Rate curve over block lengths. The sandwich columns are filled when `d^N` is
/// small enough, using the pure-state fast path under dephasing when it applies.
pub fn rate_curve(rho: &DensityMatrix, twirl: &TwirlChannel, eps: f64, ns: &[usize]) -> Result<RateCurve> {
    check_eps(eps)?;
    let free = twirl.apply(rho)?;
    let first = finite_or_support_violation(relative_entropy(rho, &free)?)?;
    let v = relative_entropy_variance(rho, &free)?;
    let pure = pure_vector(rho);
    let dephasing = twirl.kind() == crate::twirl::TwirlKind::Dephasing;

    let rows = ns
        .par_iter()
        .map(|&n| {
            let second = second_order(first, v, eps, n)?;
            let dim = (rho.dim() as f64).powi(n as i32);
            let delta = [default_delta(eps, n)];
            let report = match &pure {
                Some(psi) if dephasing && dim <= FAST_SANDWICH_DIM as f64 => {
                    Some(sandwich_bounds_pure_dephased(&psi.tensor_power(n), eps, &delta)?)
                }
                _ if dim <= DENSE_SANDWICH_DIM as f64 => {
                    let tw = twirl.tensor_power(n)?;
                    let report = sandwich_rows(eps, &delta, |x| {
                        let rho_n = rho.tensor_power(n);
                        let free_n = tw.apply(&rho_n)?;
                        info_spectrum_relative_entropy(&rho_n, &free_n, x)
                    })?;
                    let (best_lower, best_upper) = best_of(&report);
                    Some(BoundReport {
                        log2_upper: None,
                        sandwich: report,
                        best_lower,
                        best_upper,
                        epsilon: eps,
                        state_dim: dim as usize,
                        rdm_tag: tw.label().to_string(),
                    })
                }
                _ => None,
            };
            let per_copy = |d: Divergence| d.finite().map(|x| x / n as f64);
            Ok(RateRow {
                n,
                first_order: first,
                second_order: second,
                lower: report.as_ref().and_then(|r| per_copy(r.best_lower)),
                upper: report.as_ref().and_then(|r| per_copy(r.best_upper)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateCurve {
        epsilon: eps,
        rdm_tag: twirl.label().to_string(),
        rows,
    })
}

// the leading eigenvector when rho has rank one
fn pure_vector(rho: &DensityMatrix) -> Option<PureState> {
    let spec = rho.spectrum();
    let top = *spec.values.last()?;
    if (top - 1.0).abs() > 1e-10 {
        return None;
    }
    PureState::normalized(spec.vectors.column(spec.dim() - 1).into_owned()).ok()
}

/// The three terms of `log2 d - S(rho) = [S(G rho) - S(rho)] + [log2 d - S(G rho)]`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Splitting {
    /// `log2 d - S(rho)`, the rate under all unitaries
    pub total: f64,
    /// `S(G rho) - S(rho)`, the rate under the twirl
    pub twirl_part: f64,
    /// `log2 d - S(G rho)`, the rate of the twirled state under all unitaries
    pub remainder: f64,
    /// `D(rho||G rho)`, which should equal `twirl_part`
    pub relative_entropy: f64,
    pub residual: f64,
}

pub fn splitting_check(rho: &DensityMatrix, twirl: &TwirlChannel) -> Result<Splitting> {
    let free = twirl.apply(rho)?;
    let log_d = (rho.dim() as f64).log2();
    let s = von_neumann_entropy(rho);
    let s_free = von_neumann_entropy(&free);
    let total = log_d - s;
    let twirl_part = s_free - s;
    let remainder = log_d - s_free;
    Ok(Splitting {
        total,
        twirl_part,
        remainder,
        relative_entropy: finite_or_support_violation(relative_entropy(rho, &free)?)?,
        residual: (total - twirl_part - remainder).abs(),
    })
}

/// [`asymptotic_rate`] under complete dephasing: the relative entropy of coherence
/// with its second-order correction.
pub fn coherence_rate(rho: &DensityMatrix, eps: f64, n: usize) -> Result<Rate> {
    asymptotic_rate(rho, &dephasing_channel(rho.dim())?, eps, n)
}

fn reduced_b(rho_ab: &DensityMatrix, d_a: usize, d_b: usize) -> Result<DensityMatrix> {
    if rho_ab.dim() != d_a * d_b {
        return Err(Error::DimensionMismatch {
            expected: d_a * d_b,
            got: rho_ab.dim(),
        });
    }
    partial_trace(rho_ab, &[d_a, d_b], &[1])
}

/// `S(A|B) = S(AB) - S(B)`.
pub fn conditional_entropy(rho_ab: &DensityMatrix, d_a: usize, d_b: usize) -> Result<f64> {
    let rho_b = reduced_b(rho_ab, d_a, d_b)?;
    Ok(von_neumann_entropy(rho_ab) - von_neumann_entropy(&rho_b))
}

/// `D(rho_AB || 1_A ⊗ rho_B) = -S(A|B)`.
pub fn conditional_divergence(rho_ab: &DensityMatrix, d_a: usize, d_b: usize) -> Result<f64> {
    Ok(-conditional_entropy(rho_ab, d_a, d_b)?)
}

/// `V(rho_AB || 1_A ⊗ rho_B)`; the variance is unchanged by normalizing the second argument.
pub fn conditional_entropy_variance(rho_ab: &DensityMatrix, d_a: usize, d_b: usize) -> Result<f64> {
    let rho_b = reduced_b(rho_ab, d_a, d_b)?;
    let reference = DensityMatrix::maximally_mixed(d_a).tensor(&rho_b);
    relative_entropy_variance(rho_ab, &reference)
}

/// `exp(-beta H) / Z`. `beta = +inf` gives the normalized ground-space projector.
pub fn gibbs_state(h: &HermitianObservable, beta: f64) -> Result<DensityMatrix> {
    if beta.is_nan() || beta == f64::NEG_INFINITY {
        return Err(Error::out_of_range("beta", "(-inf, +inf]", beta));
    }
    let spec = Spectrum::of(h.matrix());
    let weights: Vec<f64> = if beta == f64::INFINITY {
        let e0 = spec.values[0];
        let tol = ENERGY_MERGE_TOL * spec.max_abs_value().max(1.0);
        spec.values
            .iter()
            .map(|&e| if e - e0 <= tol { 1.0 } else { 0.0 })
            .collect()
    } else {
        // shift so the largest exponent is zero
        let top = spec
            .values
            .iter()
            .map(|&e| -beta * e)
            .fold(f64::NEG_INFINITY, f64::max);
        spec.values.iter().map(|&e| (-beta * e - top).exp()).collect()
    };
    let z: f64 = weights.iter().sum();
    let w: Vec<f64> = weights.iter().map(|x| x / z).collect();
    let m = spec.compose(&w);
    Ok(DensityMatrix::from_raw((&m + m.adjoint()) * real(0.5)))
}

/// `N D(rho||gamma) + sqrt(N V(rho||gamma)) Phi^{-1}(eps)` with `gamma` the Gibbs state.
pub fn thermo_bound(
    rho: &DensityMatrix,
    h: &HermitianObservable,
    beta: f64,
    eps: f64,
    n: usize,
) -> Result<f64> {
    check_eps(eps)?;
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: h.dim(),
        });
    }
    let gamma = gibbs_state(h, beta)?;
    let d = finite_or_support_violation(relative_entropy(rho, &gamma)?)?;
    let v = relative_entropy_variance(rho, &gamma)?;
    let nf = n as f64;
    let spread = if v <= VARIANCE_ZERO_TOL {
        0.0
    } else {
        (nf * v).sqrt() * inverse_normal_cdf(eps)?
    };
    Ok(nf * d + spread)
}

/// `N (log2 d - S(rho)) + sqrt(N V(rho)) Phi^{-1}(eps)`, the bound under complete depolarization.
pub fn purity_bound(rho: &DensityMatrix, eps: f64, n: usize) -> Result<f64> {
    check_eps(eps)?;
    let nf = n as f64;
    let v = entropy_variance(rho);
    let spread = if v <= VARIANCE_ZERO_TOL {
        0.0
    } else {
        (nf * v).sqrt() * inverse_normal_cdf(eps)?
    };
    Ok(nf * ((rho.dim() as f64).log2() - von_neumann_entropy(rho)) + spread)
}

/// Energy distribution of `psi` over the distinct eigenvalues of `h`, lowest energy first.
pub fn energy_distribution(psi: &PureState, h: &HermitianObservable) -> Result<Vec<(f64, f64)>> {
    if h.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim(),
            got: h.dim(),
        });
    }
    let spec = Spectrum::of(h.matrix());
    let tol = ENERGY_MERGE_TOL * spec.max_abs_value().max(f64::MIN_POSITIVE);
    let amps = spec.vectors.adjoint() * psi.amplitudes();
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (k, &e) in spec.values.iter().enumerate() {
        let p = amps[k].norm_sqr();
        match out.last_mut() {
            Some((e_prev, acc)) if e - *e_prev <= tol => *acc += p,
            _ => out.push((e, p)),
        }
    }
    Ok(out)
}

/// `N h(p)` with `p` the distribution of `psi` over distinct energies.
pub fn clock_bound(psi: &PureState, h: &HermitianObservable, n: usize) -> Result<f64> {
    let p: Vec<f64> = energy_distribution(psi, h)?.into_iter().map(|(_, p)| p).collect();
    Ok(n as f64 * shannon_entropy(&p)?)
}
