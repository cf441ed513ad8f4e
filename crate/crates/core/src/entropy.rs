//! Entropic functionals, all in bits.
//!
//! Matrix logarithms and inverse powers act on the support only (eigenvalues below
//! `SUPPORT_CUTOFF` relative to the largest are treated as zero). Quantities that
//! can diverge return [`Divergence`] rather than a sentinel float.

use std::fmt;

use serde::{Serialize, Serializer};
use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{Error, Result};
use crate::qcore::linalg::{real, trace_product, CMatrix, Spectrum};
use crate::qcore::{DensityMatrix, HermitianObservable, PureState};

/// Weight of `rho` outside the support of `sigma` tolerated as numerical noise.
pub const SUPPORT_WEIGHT_TOL: f64 = 1e-10;

/// Bisection resolution for the information spectrum divergence, in bits.
pub const SPECTRUM_RESOLUTION: f64 = 1e-9;

/// A value in `[-inf, +inf)` extended with an explicit `+inf` tag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    pub fn finite(self) -> Option<f64> {
        match self {
            Divergence::Finite(v) => Some(v),
            Divergence::Infinite => None,
        }
    }

    /// The value as a float, with `+inf` for the infinite tag.
    pub fn value(self) -> f64 {
        match self {
            Divergence::Finite(v) => v,
            Divergence::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Divergence::Infinite)
    }

    pub fn map(self, f: impl FnOnce(f64) -> f64) -> Divergence {
        match self {
            Divergence::Finite(v) => Divergence::Finite(f(v)),
            Divergence::Infinite => Divergence::Infinite,
        }
    }
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::Finite(v) => write!(f, "{v}"),
            Divergence::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Divergence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Divergence::Finite(v) => s.serialize_f64(*v),
            Divergence::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Quantity {
    /// von Neumann entropy
    S,
    /// relative entropy
    D,
    /// relative entropy variance
    V,
    /// collision relative entropy
    D2,
    /// information spectrum relative entropy
    Ds,
    /// hypothesis testing relative entropy
    DH,
    /// Shannon entropy
    H,
    Cov,
}

/// A tagged entropic value for reports.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EntropicValue {
    pub quantity: Quantity,
    pub value: Divergence,
    /// `delta` or `eps` for the one-shot quantities.
    pub parameter: Option<f64>,
}

fn check_same_dim(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    Ok(())
}

fn check_unit_interval(name: &'static str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::out_of_range(name, "(0, 1)", x));
    }
    Ok(())
}

/// Weight of `rho` on the kernel of the decomposed `sigma`.
fn weight_outside_support(rho: &CMatrix, sigma: &Spectrum) -> f64 {
    let cut = sigma.cutoff();
    let mut w = 0.0;
    for (k, &v) in sigma.values.iter().enumerate() {
        if v <= cut {
            let col = sigma.vectors.column(k);
            w += (col.adjoint() * rho * col)[(0, 0)].re;
        }
    }
    w
}

fn entropy_of_spectrum(spec: &Spectrum) -> f64 {
    let cut = spec.cutoff();
    spec.values
        .iter()
        .filter(|&&v| v > cut)
        .map(|&v| -v * v.log2())
        .sum()
}

/// `S(rho) = -tr(rho log2 rho)`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.spectrum()).max(0.0)
}

/// `log2 rho - log2 sigma` on the respective supports.
fn log_ratio(rho: &Spectrum, sigma: &Spectrum) -> Result<CMatrix> {
    Ok(rho.map_on_support(f64::log2)? - sigma.map_on_support(f64::log2)?)
}

/// `D(rho||sigma) = tr(rho (log2 rho - log2 sigma))`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Divergence> {
    check_same_dim(rho, sigma)?;
    if rho == sigma {
        return Ok(Divergence::Finite(0.0));
    }
    let s_spec = sigma.spectrum();
    if weight_outside_support(rho.matrix(), &s_spec) > SUPPORT_WEIGHT_TOL {
        return Ok(Divergence::Infinite);
    }
    let log_sigma = s_spec.map_on_support(f64::log2)?;
    let cross = trace_product(rho.matrix(), &log_sigma).re;
    Ok(Divergence::Finite(-von_neumann_entropy(rho) - cross))
}

/// `V(rho||sigma) = tr(rho (log2 rho - log2 sigma)^2) - D(rho||sigma)^2`.
///
/// Evaluated in the centered form `tr(rho (L - D)^2)` so that states with zero
/// variance come out at rounding level instead of as a difference of squares.
pub fn relative_entropy_variance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho, sigma)?;
    if rho == sigma {
        return Ok(0.0);
    }
    let r_spec = rho.spectrum();
    let s_spec = sigma.spectrum();
    if weight_outside_support(rho.matrix(), &s_spec) > SUPPORT_WEIGHT_TOL {
        return Err(Error::SupportViolation);
    }
    let l = log_ratio(&r_spec, &s_spec)?;
    Ok(centered_second_moment(rho.matrix(), l))
}

fn centered_second_moment(rho: &CMatrix, mut l: CMatrix) -> f64 {
    let mean = trace_product(rho, &l).re;
    for i in 0..l.nrows() {
        l[(i, i)] -= real(mean);
    }
    let lrl = &l * rho * &l;
    crate::qcore::linalg::trace(&lrl).re.max(0.0)
}

/// `V(rho) = tr(rho (S(rho) + log2 rho)^2)`.
pub fn entropy_variance(rho: &DensityMatrix) -> f64 {
    let spec = rho.spectrum();
    let s = entropy_of_spectrum(&spec);
    let cut = spec.cutoff();
    spec.values
        .iter()
        .filter(|&&v| v > cut)
        .map(|&v| v * (s + v.log2()).powi(2))
        .sum()
}

/// `Re tr(rho A B) - tr(rho A) tr(rho B)`.
pub fn matrix_covariance(
    rho: &DensityMatrix,
    a: &HermitianObservable,
    b: &HermitianObservable,
) -> Result<f64> {
    let d = rho.dim();
    for m in [a.dim(), b.dim()] {
        if m != d {
            return Err(Error::DimensionMismatch { expected: d, got: m });
        }
    }
    let rho_a = rho.matrix() * a.matrix();
    let joint = trace_product(&rho_a, b.matrix()).re;
    let ea = crate::qcore::linalg::trace(&rho_a).re;
    let eb = trace_product(rho.matrix(), b.matrix()).re;
    Ok(joint - ea * eb)
}

/// `tr[(sigma^{-1/4} rho sigma^{-1/4})^2]` for unnormalized positive matrices.
pub(crate) fn collision_trace(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    let s_spec = Spectrum::of(sigma);
    if weight_outside_support(rho, &s_spec) > SUPPORT_WEIGHT_TOL * crate::qcore::linalg::trace(rho).re.abs().max(1.0) {
        return Err(Error::SupportViolation);
    }
    let quarter = s_spec.map_on_support(|x| x.powf(-0.25))?;
    let x = &quarter * rho * &quarter;
    Ok(x.iter().map(|z| z.norm_sqr()).sum())
}

/// `D2(rho||sigma) = log2 tr[(sigma^{-1/4} rho sigma^{-1/4})^2]`.
pub fn collision_relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho, sigma)?;
    Ok(collision_trace(rho.matrix(), sigma.matrix())?.log2())
}

/// `tr(rho Pi)` with `Pi` the projector onto the non-negative eigenspace of
/// `2^k sigma - rho`.
pub fn spectrum_tail(rho: &DensityMatrix, sigma: &DensityMatrix, k: f64) -> f64 {
    let m = sigma.matrix() * real(k.exp2()) - rho.matrix();
    tail_of(&Spectrum::of(&m), rho.matrix())
}

fn tail_of(spec: &Spectrum, rho: &CMatrix) -> f64 {
    let mut acc = 0.0;
    for (k, &v) in spec.values.iter().enumerate() {
        if v >= 0.0 {
            let col = spec.vectors.column(k);
            acc += (col.adjoint() * rho * col)[(0, 0)].re;
        }
    }
    acc
}

/// First decrease of `k -> tr(rho Pi_{rho <= 2^k sigma})` along the sorted grid,
/// if any exceeds `tol`.
pub fn spectrum_monotonicity_violation(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    grid: &[f64],
    tol: f64,
) -> Option<(f64, f64)> {
    let mut prev: Option<(f64, f64)> = None;
    for &k in grid {
        let f = spectrum_tail(rho, sigma, k);
        if let Some((pk, pf)) = prev {
            if f < pf - tol {
                return Some((pk, k));
            }
        }
        prev = Some((k, f));
    }
    None
}

fn bisect_sup(
    mut lo: f64,
    mut hi: f64,
    delta: f64,
    resolution: f64,
    tail: impl Fn(f64) -> f64,
) -> f64 {
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if tail(mid) <= delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `D_s^delta(rho||sigma) = sup { K : tr(rho Pi_{rho <= 2^K sigma}) <= delta }`.
///
/// Bisection over `K in [-K_max, K_max]` with
/// `K_max = 2 (log2 d + |log2 lambda_min(sigma)|)`; assumes the tail is
/// nondecreasing in `K`.
pub fn info_spectrum_relative_entropy(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    delta: f64,
) -> Result<Divergence> {
    check_same_dim(rho, sigma)?;
    check_unit_interval("delta", delta)?;
    let s_spec = sigma.spectrum();
    let cut = s_spec.cutoff();
    let lambda_min = s_spec
        .values
        .iter()
        .copied()
        .filter(|&v| v > cut)
        .fold(f64::INFINITY, f64::min);
    if !lambda_min.is_finite() {
        return Err(Error::BracketFailure("sigma has empty support".into()));
    }
    let k_max = 2.0 * ((rho.dim() as f64).log2() + lambda_min.log2().abs()) + 1.0;
    let tail = |k: f64| spectrum_tail(rho, sigma, k);

    let (lo, hi) = (-k_max, k_max);
    if tail(lo) > delta {
        return Err(Error::BracketFailure(format!(
            "tail already exceeds delta = {delta} at K = {lo}"
        )));
    }
    if tail(hi) <= delta {
        if weight_outside_support(rho.matrix(), &s_spec) > SUPPORT_WEIGHT_TOL {
            return Ok(Divergence::Infinite);
        }
        return Err(Error::BracketFailure(format!(
            "tail stays below delta = {delta} up to K = {hi}"
        )));
    }
    let k = bisect_sup(lo, hi, delta, SPECTRUM_RESOLUTION, tail);

    #[cfg(test)]
    {
        let grid: Vec<f64> = (0..=32).map(|i| lo + (hi - lo) * i as f64 / 32.0).collect();
        if let Some((a, b)) = spectrum_monotonicity_violation(rho, sigma, &grid, 1e-9) {
            panic!("information spectrum tail decreases between K = {a} and K = {b}");
        }
    }

    Ok(Divergence::Finite(k))
}

/// `D_s^delta` for a pure `rho = |psi><psi|` against a diagonal `sigma`.
///
/// `2^K sigma - |psi><psi|` has at most one negative eigenvalue `mu`, the root of
/// the secular equation `sum_i w_i / (2^K s_i - mu) = 1` with `w_i = |psi_i|^2`,
/// and the tail is `1 - 1 / sum_i w_i / (2^K s_i - mu)^2`. Each evaluation is
/// linear in the dimension, so this handles many-copy states that the dense
/// routine cannot.
pub fn info_spectrum_pure_vs_diagonal(
    psi: &PureState,
    sigma_diag: &[f64],
    delta: f64,
) -> Result<Divergence> {
    if psi.dim() != sigma_diag.len() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim(),
            got: sigma_diag.len(),
        });
    }
    check_unit_interval("delta", delta)?;
    let s_max = sigma_diag.iter().copied().fold(0.0, f64::max);
    let cut = crate::qcore::linalg::SUPPORT_CUTOFF * s_max;
    let mut w = Vec::with_capacity(psi.dim());
    let mut s = Vec::with_capacity(psi.dim());
    let mut outside = 0.0;
    for (a, &si) in psi.amplitudes().iter().zip(sigma_diag) {
        if si > cut {
            w.push(a.norm_sqr());
            s.push(si);
        } else {
            outside += a.norm_sqr();
        }
    }
    if outside > SUPPORT_WEIGHT_TOL {
        return Err(Error::Unsupported(
            "pure-state fast path requires supp(rho) within supp(sigma)".into(),
        ));
    }
    let ratio: f64 = w.iter().zip(&s).map(|(wi, si)| wi / si).sum();
    let s_min = s.iter().copied().fold(f64::INFINITY, f64::min);

    let tail = |k: f64| -> f64 {
        let a = k.exp2();
        if a >= ratio {
            return 1.0;
        }
        let secular = |mu: f64| -> f64 {
            w.iter().zip(&s).map(|(wi, si)| wi / (a * si - mu)).sum::<f64>() - 1.0
        };
        let (mut lo, mut hi) = (-2.0, 0.0);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if secular(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mu = 0.5 * (lo + hi);
        let norm: f64 = w
            .iter()
            .zip(&s)
            .map(|(wi, si)| wi / (a * si - mu).powi(2))
            .sum();
        (1.0 - 1.0 / norm).clamp(0.0, 1.0)
    };

    let k_max = 2.0 * ((psi.dim() as f64).log2() + s_min.log2().abs()) + 1.0;
    let (lo, hi) = (-k_max, ratio.log2());
    if tail(lo) > delta {
        return Err(Error::BracketFailure(format!(
            "tail already exceeds delta = {delta} at K = {lo}"
        )));
    }
    Ok(Divergence::Finite(bisect_sup(
        lo,
        hi,
        delta,
        SPECTRUM_RESOLUTION,
        tail,
    )))
}

/// `D_H^eps(rho||sigma) = -log2 min { tr(Q sigma) : 0 <= Q <= 1, tr(Q rho) >= 1 - eps }`.
///
/// Quantum Neyman-Pearson: the optimal test is the projector onto the positive
/// part of `rho - mu sigma` plus a fractional weight on the crossing eigenspace.
/// `mu` is bracketed by bisection and the two bracketing projectors are mixed so
/// that the type-I constraint holds with equality.
pub fn hypothesis_testing_relative_entropy(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    eps: f64,
) -> Result<Divergence> {
    check_same_dim(rho, sigma)?;
    check_unit_interval("eps", eps)?;
    let target = 1.0 - eps;
    let s_spec = sigma.spectrum();
    if weight_outside_support(rho.matrix(), &s_spec) >= target - 1e-12 {
        return Ok(Divergence::Infinite);
    }

    // (tr(P rho), tr(P sigma)) for P the projector onto the positive part of rho - mu sigma
    let eval = |mu: f64| -> (f64, f64) {
        let m = rho.matrix() - sigma.matrix() * real(mu);
        let spec = Spectrum::of(&m);
        let (mut f, mut b) = (0.0, 0.0);
        for (k, &v) in spec.values.iter().enumerate() {
            if v > 0.0 {
                let col = spec.vectors.column(k);
                f += (col.adjoint() * rho.matrix() * col)[(0, 0)].re;
                b += (col.adjoint() * sigma.matrix() * col)[(0, 0)].re;
            }
        }
        (f, b)
    };

    let mut hi = 1.0;
    let mut at_hi = eval(hi);
    let mut lo;
    let mut at_lo;
    if at_hi.0 > target {
        lo = hi;
        at_lo = at_hi;
        let mut steps = 0;
        while at_hi.0 > target {
            lo = hi;
            at_lo = at_hi;
            hi *= 2.0;
            at_hi = eval(hi);
            steps += 1;
            if steps > 400 {
                return Err(Error::BracketFailure(
                    "Neyman-Pearson threshold diverges".into(),
                ));
            }
        }
    } else {
        lo = hi;
        at_lo = at_hi;
        let mut steps = 0;
        while at_lo.0 <= target {
            hi = lo;
            at_hi = at_lo;
            lo *= 0.5;
            steps += 1;
            if steps > 400 {
                lo = 0.0;
                at_lo = eval(0.0);
                break;
            }
            at_lo = eval(lo);
        }
    }

    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * hi };
        let mid = if mid <= lo || mid >= hi { 0.5 * (lo + hi) } else { mid };
        if mid <= lo || mid >= hi {
            break;
        }
        let at_mid = eval(mid);
        if at_mid.0 > target {
            lo = mid;
            at_lo = at_mid;
        } else {
            hi = mid;
            at_hi = at_mid;
        }
    }

    let (f_lo, b_lo) = at_lo;
    let (f_hi, b_hi) = at_hi;
    let weight = if f_lo > f_hi {
        ((target - f_hi) / (f_lo - f_hi)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let beta = b_hi + weight * (b_lo - b_hi);
    if beta <= f64::MIN_POSITIVE {
        return Ok(Divergence::Infinite);
    }
    Ok(Divergence::Finite(-beta.log2()))
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `Phi^{-1}(eps)`, the standard normal quantile.
pub fn inverse_normal_cdf(eps: f64) -> Result<f64> {
    check_unit_interval("eps", eps)?;
    Ok(-std::f64::consts::SQRT_2 * erfc_inv(2.0 * eps))
}

/// `h(p) = -sum_k p_k log2 p_k`.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution("empty".into()));
    }
    if let Some(bad) = p.iter().find(|&&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidDistribution(format!("entry {bad}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidDistribution(format!("sums to {total}")));
    }
    Ok(p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::CVector;
    use crate::qcore::random::{random_density_matrix, random_pure_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(p: &[f64]) -> DensityMatrix {
        DensityMatrix::diagonal(p).unwrap()
    }

    fn bell() -> DensityMatrix {
        let s = 1.0 / 2f64.sqrt();
        PureState::from_real(&[s, 0.0, 0.0, s]).unwrap().density()
    }

    fn binary_entropy(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    #[test]
    fn von_neumann_examples() {
        assert!(von_neumann_entropy(&PureState::from_real(&[0.6, 0.8]).unwrap().density()).abs() < 1e-12);
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(4)) - 2.0).abs() < 1e-12);
        let s = von_neumann_entropy(&diag(&[0.75, 0.25]));
        assert!((s - binary_entropy(0.25)).abs() < 1e-12);
        assert!((s - 0.811_278_124_459_132_8).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = diag(&[0.75, 0.25]);
        assert_eq!(relative_entropy(&rho, &rho).unwrap(), Divergence::Finite(0.0));
        let d = relative_entropy(&bell(), &DensityMatrix::maximally_mixed(4)).unwrap();
        assert!((d.value() - 2.0).abs() < 1e-12);
        let d = relative_entropy(&rho, &DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((d.value() - (1.0 - binary_entropy(0.25))).abs() < 1e-12);
        assert!((d.value() - 0.188_721_875_540_867).abs() < 1e-5);
    }

    #[test]
    fn relative_entropy_infinite_outside_support() {
        let a = PureState::basis(2, 0).unwrap().density();
        let b = PureState::basis(2, 1).unwrap().density();
        assert!(relative_entropy(&a, &b).unwrap().is_infinite());
        assert!(matches!(
            relative_entropy_variance(&a, &b),
            Err(Error::SupportViolation)
        ));
    }

    // V = sum_k p_k (log2(2 p_k) - D)^2 for diagonal rho against 1/2
    fn scalar_variance(p: &[f64]) -> f64 {
        let d: f64 = p.iter().map(|x| x * (2.0 * x).log2()).sum();
        p.iter().map(|x| x * ((2.0 * x).log2() - d).powi(2)).sum()
    }

    #[test]
    fn variance_examples() {
        let rho = diag(&[0.75, 0.25]);
        assert_eq!(relative_entropy_variance(&rho, &rho).unwrap(), 0.0);
        for d in 2..6 {
            let v = relative_entropy_variance(
                &PureState::uniform_superposition(d).density(),
                &DensityMatrix::maximally_mixed(d),
            )
            .unwrap();
            assert!(v.abs() < 1e-12);
        }
        let oracle = scalar_variance(&[0.75, 0.25]);
        let v = relative_entropy_variance(&rho, &DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((v - oracle).abs() < 1e-12);
        assert!((v - 0.4710).abs() < 1e-4);
        assert!((entropy_variance(&rho) - oracle).abs() < 1e-12);
        assert!(entropy_variance(&DensityMatrix::maximally_mixed(3)).abs() < 1e-12);
        assert!(entropy_variance(&PureState::from_real(&[0.6, 0.8]).unwrap().density()).abs() < 1e-12);
    }

    #[test]
    fn covariance_examples() {
        let rho = diag(&[0.75, 0.25]);
        let a = HermitianObservable::diagonal(&[1.0, -2.0]);
        let b = HermitianObservable::diagonal(&[0.5, 3.0]);
        let var = matrix_covariance(&rho, &a, &a).unwrap();
        assert!(var >= 0.0);
        assert!(matrix_covariance(&rho, &a, &HermitianObservable::identity(2)).unwrap().abs() < 1e-15);
        // classical covariance of the two random variables
        let p = [0.75, 0.25];
        let (x, y) = ([1.0, -2.0], [0.5, 3.0]);
        let ex: f64 = (0..2).map(|i| p[i] * x[i]).sum();
        let ey: f64 = (0..2).map(|i| p[i] * y[i]).sum();
        let cov: f64 = (0..2).map(|i| p[i] * (x[i] - ex) * (y[i] - ey)).sum();
        assert!((matrix_covariance(&rho, &a, &b).unwrap() - cov).abs() < 1e-14);
    }

    #[test]
    fn collision_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho = random_density_matrix(3, 2, &mut rng);
        assert!(collision_relative_entropy(&rho, &rho).unwrap().abs() < 1e-10);
        for d in 2..5 {
            let psi = random_pure_state(d, &mut rng).density();
            let v = collision_relative_entropy(&psi, &DensityMatrix::maximally_mixed(d)).unwrap();
            assert!((v - (d as f64).log2()).abs() < 1e-10);
        }
    }

    #[test]
    fn collision_matches_spectral_expansion() {
        // tr[(s^{-1/4} r s^{-1/4})^2] = sum_{jk} |<j|r|k>|^2 / sqrt(s_j s_k) in sigma's eigenbasis
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let rho = random_density_matrix(2, 2, &mut rng);
            let sigma = random_density_matrix(2, 2, &mut rng);
            let spec = sigma.spectrum();
            let r = spec.vectors.adjoint() * rho.matrix() * &spec.vectors;
            let mut acc = 0.0;
            for j in 0..2 {
                for k in 0..2 {
                    acc += r[(j, k)].norm_sqr() / (spec.values[j] * spec.values[k]).sqrt();
                }
            }
            let v = collision_relative_entropy(&rho, &sigma).unwrap();
            assert!((v - acc.log2()).abs() < 1e-10);
        }
    }

    #[test]
    fn spectrum_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_density_matrix(3, 3, &mut rng);
        for delta in [0.05, 0.3, 0.8] {
            let v = info_spectrum_relative_entropy(&rho, &rho, delta).unwrap();
            assert!(v.value().abs() < 1e-6);
        }
        for d in 2..5 {
            let psi = random_pure_state(d, &mut rng).density();
            let v = info_spectrum_relative_entropy(&psi, &DensityMatrix::maximally_mixed(d), 0.2)
                .unwrap();
            assert!((v.value() - (d as f64).log2()).abs() < 1e-6);
        }
        assert!(info_spectrum_relative_entropy(&rho, &rho, 1.0).is_err());
    }

    #[test]
    fn spectrum_fast_path_agrees_with_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in [2, 3, 4, 8] {
            let psi = random_pure_state(d, &mut rng);
            let rho = psi.density();
            let dephased: Vec<f64> = psi.amplitudes().iter().map(|a| a.norm_sqr()).collect();
            let sigma = DensityMatrix::diagonal(&dephased).unwrap();
            for delta in [0.02, 0.1, 0.4] {
                let dense = info_spectrum_relative_entropy(&rho, &sigma, delta).unwrap().value();
                let fast = info_spectrum_pure_vs_diagonal(&psi, &dephased, delta).unwrap().value();
                assert!((dense - fast).abs() < 1e-6, "d={d} delta={delta}: {dense} vs {fast}");
            }
        }
    }

    #[test]
    fn hypothesis_testing_examples() {
        let rho = diag(&[0.6, 0.3, 0.1]);
        for eps in [0.01, 0.1, 0.5] {
            let v = hypothesis_testing_relative_entropy(&rho, &rho, eps).unwrap().value();
            assert!((v + (1.0 - eps).log2()).abs() < 1e-9);
        }
        let a = PureState::basis(2, 0).unwrap().density();
        let b = PureState::basis(2, 1).unwrap().density();
        assert!(hypothesis_testing_relative_entropy(&a, &b, 0.1).unwrap().is_infinite());
    }

    #[test]
    fn hypothesis_testing_bell_closed_form() {
        let mixed = DensityMatrix::maximally_mixed(4);
        for eps in [0.01, 0.05, 0.2] {
            let v = hypothesis_testing_relative_entropy(&bell(), &mixed, eps).unwrap().value();
            // optimal test (1 - eps)|bell><bell| has type-II error (1 - eps)/4
            assert!((v - (4.0 / (1.0 - eps)).log2()).abs() < 1e-9);
        }
    }

    #[test]
    fn normal_quantiles() {
        assert!(inverse_normal_cdf(0.5).unwrap().abs() < 1e-15);
        for eps in [1e-6, 0.01, 0.05, 0.3, 0.975] {
            let x = inverse_normal_cdf(eps).unwrap();
            assert!((normal_cdf(x) - eps).abs() < 1e-9);
        }
        assert!(inverse_normal_cdf(0.0).is_err());
        assert!(inverse_normal_cdf(1.5).is_err());
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert!((shannon_entropy(&[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-15);
        assert!((shannon_entropy(&[0.75, 0.25]).unwrap() - 0.811_278_124_459_132_8).abs() < 1e-12);
        assert!(shannon_entropy(&[0.5, 0.6]).is_err());
        assert!(shannon_entropy(&[1.5, -0.5]).is_err());
    }

    #[test]
    fn tensor_power_additivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let rho = random_density_matrix(2, 2, &mut rng);
        let sigma = random_density_matrix(2, 2, &mut rng);
        let d1 = relative_entropy(&rho, &sigma).unwrap().value();
        let d2 = relative_entropy(&rho.tensor_power(2), &sigma.tensor_power(2)).unwrap().value();
        assert!((d2 - 2.0 * d1).abs() < 1e-8);
        let v1 = relative_entropy_variance(&rho, &sigma).unwrap();
        let v2 = relative_entropy_variance(&rho.tensor_power(2), &sigma.tensor_power(2)).unwrap();
        assert!((v2 - 2.0 * v1).abs() < 1e-8);
    }

    #[test]
    fn variance_decomposition_sign() {
        // V(rho||sigma) = Var(log rho) + Var(log sigma) - 2 cov(log rho, log sigma)
        let rho = diag(&[0.5, 0.3, 0.2]);
        let sigma = diag(&[0.2, 0.2, 0.6]);
        let lr = HermitianObservable::diagonal(&rho.populations().iter().map(|p| p.log2()).collect::<Vec<_>>());
        let ls = HermitianObservable::diagonal(&sigma.populations().iter().map(|p| p.log2()).collect::<Vec<_>>());
        let var_r = matrix_covariance(&rho, &lr, &lr).unwrap();
        let var_s = matrix_covariance(&rho, &ls, &ls).unwrap();
        let cov = matrix_covariance(&rho, &lr, &ls).unwrap();
        let v = relative_entropy_variance(&rho, &sigma).unwrap();
        assert!((v - (var_r + var_s - 2.0 * cov)).abs() < 1e-12);
        assert!((v - (var_r + var_s + 2.0 * cov)).abs() > 1e-3);
        let _ = CVector::zeros(1);
    }
}
