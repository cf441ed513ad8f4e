//! Random-coding simulator: group codebooks, pretty-good-measurement decoding and
//! Monte Carlo estimates of the achievable number of messages.
//!
//! Randomness is ChaCha20 seeded from the user seed, with one stream per
//! (message count, codebook family, trial) so results do not depend on scheduling.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{csv_error, sandwich_bounds, BoundReport};
use crate::error::{Error, Result};
use crate::qcore::linalg::{real, trace_product, CMatrix, Spectrum};
use crate::qcore::{DensityMatrix, Povm};
use crate::twirl::{finite_group_twirl, FiniteUnitaryGroup, TwirlChannel, MAX_GROUP_ORDER};

pub const MAX_SIM_DIM: usize = 64;
pub const MAX_MESSAGES: usize = 256;

/// Messages mapped to group element indices (0-based). Repeats are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Codebook {
    assignment: Vec<usize>,
}

impl Codebook {
    pub fn new(assignment: Vec<usize>, group_order: usize) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::out_of_range("M", "[1, inf)", 0.0));
        }
        if let Some(&bad) = assignment.iter().find(|&&g| g >= group_order) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: group_order,
            });
        }
        Ok(Codebook { assignment })
    }

    /// `M` independent uniform draws.
    pub fn random(m: usize, group_order: usize, rng: &mut impl Rng) -> Self {
        Codebook {
            assignment: (0..m).map(|_| rng.random_range(0..group_order)).collect(),
        }
    }

    /// `M` distinct elements drawn without replacement; needs `M <= |G|`.
    pub fn random_distinct(m: usize, group_order: usize, rng: &mut impl Rng) -> Result<Self> {
        if m > group_order {
            return Err(Error::out_of_range("M", "[1, |G|]", m as f64));
        }
        Ok(Codebook {
            assignment: sample(rng, group_order, m).into_vec(),
        })
    }

    pub fn messages(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }
}

fn check_sizes(rho: &DensityMatrix, group: &FiniteUnitaryGroup, m: usize) -> Result<()> {
    if rho.dim() != group.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: group.dim(),
        });
    }
    if rho.dim() > MAX_SIM_DIM {
        return Err(Error::SizeGuard(format!("dimension {} exceeds {MAX_SIM_DIM}", rho.dim())));
    }
    if m > MAX_MESSAGES {
        return Err(Error::SizeGuard(format!("M = {m} exceeds {MAX_MESSAGES}")));
    }
    if group.order() > MAX_GROUP_ORDER {
        return Err(Error::SizeGuard(format!("group order {}", group.order())));
    }
    Ok(())
}

/// `U_{g_m} rho U_{g_m}^dagger` for each message.
pub fn encode(rho: &DensityMatrix, group: &FiniteUnitaryGroup, cb: &Codebook) -> Result<Vec<DensityMatrix>> {
    if rho.dim() != group.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: group.dim(),
        });
    }
    cb.assignment
        .iter()
        .map(|&g| Ok(rho.conjugate_by(group.element(g)?)))
        .collect()
}

/// PGM elements `S sigma_m S` with `S = (sum sigma)^{-1/2}` on the support, followed by
/// a discard element `1 - Pi_support`.
#[derive(Clone, Debug)]
pub struct PgmDecoder {
    pub povm: Povm,
    pub support_dim: usize,
}

impl PgmDecoder {
    pub fn messages(&self) -> usize {
        self.povm.len() - 1
    }

    pub fn discard(&self) -> &CMatrix {
        &self.povm.elements()[self.messages()]
    }
}

pub fn build_pgm(states: &[DensityMatrix]) -> Result<PgmDecoder> {
    let Some(first) = states.first() else {
        return Err(Error::InvalidPovm("no states to decode".into()));
    };
    let d = first.dim();
    let mut sum = CMatrix::zeros(d, d);
    for s in states {
        if s.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: s.dim() });
        }
        sum += s.matrix();
    }
    let spec = Spectrum::of(&sum);
    let cut = spec.cutoff();
    let support_dim = spec.values.iter().filter(|&&v| v > cut).count();
    let root = spec.map_on_support(|x| x.powf(-0.5))?;
    let hermitize = |m: CMatrix| (&m + m.adjoint()) * real(0.5);
    let mut elements: Vec<CMatrix> = states
        .par_iter()
        .map(|s| hermitize(&root * s.matrix() * &root))
        .collect();
    elements.push(hermitize(CMatrix::identity(d, d) - spec.support_projector()));
    Ok(PgmDecoder {
        povm: Povm::from_raw(elements)?,
        support_dim,
    })
}

/// `(1/M) sum_m tr(sigma_m E_m)`.
pub fn success_probability_direct(states: &[DensityMatrix], decoder: &PgmDecoder) -> Result<f64> {
    if states.len() != decoder.messages() {
        return Err(Error::DimensionMismatch {
            expected: decoder.messages(),
            got: states.len(),
        });
    }
    let total: f64 = states
        .iter()
        .zip(decoder.povm.elements())
        .map(|(s, e)| trace_product(s.matrix(), e).re)
        .sum();
    Ok(total / states.len() as f64)
}

/// `2^{D2(tau_MQ || tau_M ⊗ tau_Q)}` for the message-output state `(1/M) sum |m><m| ⊗ sigma_m`.
///
/// Both arguments are block diagonal in the message register, so the collision
/// trace is a sum over blocks of `tr[(tau_Q^{-1/4} sigma_m tau_Q^{-1/4})^2] / M`.
pub fn collision_exponent(states: &[DensityMatrix]) -> Result<f64> {
    let m = states.len();
    if m == 0 {
        return Err(Error::out_of_range("M", "[1, inf)", 0.0));
    }
    let d = states[0].dim();
    let mut avg = CMatrix::zeros(d, d);
    for s in states {
        avg += s.matrix();
    }
    avg /= real(m as f64);
    let quarter = Spectrum::of(&avg).map_on_support(|x| x.powf(-0.25))?;
    let total: f64 = states
        .iter()
        .map(|s| {
            let x = &quarter * s.matrix() * &quarter;
            x.iter().map(|z| z.norm_sqr()).sum::<f64>()
        })
        .sum();
    Ok(total / m as f64)
}

/// PGM success probability as `(1/M) 2^{D2(tau_MQ || tau_M ⊗ tau_Q)}`.
pub fn success_probability_via_collision(
    rho: &DensityMatrix,
    group: &FiniteUnitaryGroup,
    cb: &Codebook,
) -> Result<f64> {
    let states = encode(rho, group, cb)?;
    Ok(collision_exponent(&states)? / cb.messages() as f64)
}

/// Exact PGM success probability of one codebook.
///
/// Repeated group elements share one encoded state, so the sum runs over distinct
/// indices weighted by multiplicity, using `tr(sigma E) = tr((S sigma)^2)`.
pub fn codebook_success(rho: &DensityMatrix, group: &FiniteUnitaryGroup, cb: &Codebook) -> Result<f64> {
    check_sizes(rho, group, cb.messages())?;
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &g in &cb.assignment {
        *counts.entry(g).or_default() += 1;
    }
    let states: Vec<(f64, CMatrix)> = counts
        .into_iter()
        .map(|(g, c)| Ok((c as f64, rho.conjugate_by(group.element(g)?).into_matrix())))
        .collect::<Result<_>>()?;
    let d = rho.dim();
    let mut sum = CMatrix::zeros(d, d);
    for (c, s) in &states {
        sum += s * real(*c);
    }
    let root = Spectrum::of(&sum).map_on_support(|x| x.powf(-0.5))?;
    let total: f64 = states
        .par_iter()
        .map(|(c, s)| {
            let a = &root * s;
            c * trace_product(&a, &a).re
        })
        .sum();
    Ok(total / cb.messages() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    Iid = 0,
    Distinct = 1,
}

fn trial_rng(seed: u64, m: usize, family: Family, trial: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(((m as u64) << 33) | ((family as u64) << 32) | trial as u64);
    rng
}

fn run_trials(
    rho: &DensityMatrix,
    group: &FiniteUnitaryGroup,
    m: usize,
    trials: usize,
    seed: u64,
    family: Family,
) -> Result<Vec<f64>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, m, family, t);
            let cb = match family {
                Family::Iid => Codebook::random(m, group.order(), &mut rng),
                Family::Distinct => Codebook::random_distinct(m, group.order(), &mut rng)?,
            };
            codebook_success(rho, group, &cb)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationResult {
    pub mean_success: f64,
    pub per_codebook: Vec<f64>,
    /// Standard error of the mean.
    pub stderr: f64,
    /// Success of the best sampled codebook.
    pub best_success: f64,
    pub seed: u64,
    #[serde(rename = "M")]
    pub m: usize,
    pub trials: usize,
    pub eps_target: Option<f64>,
}

impl SimulationResult {
    /// Summary statistics of per-codebook success probabilities.
    pub fn from_samples(per_codebook: Vec<f64>, seed: u64, m: usize, eps_target: Option<f64>) -> Self {
        let n = per_codebook.len() as f64;
        let mean = per_codebook.iter().sum::<f64>() / n;
        let stderr = if per_codebook.len() > 1 {
            let var = per_codebook.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        SimulationResult {
            mean_success: mean,
            best_success: per_codebook.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            stderr,
            seed,
            m,
            trials: per_codebook.len(),
            per_codebook,
            eps_target,
        }
    }
}

/// CSV rows `M,mean_success,stderr`.
pub fn simulation_csv(results: &[SimulationResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["M", "mean_success", "stderr"]).map_err(csv_error)?;
    for r in results {
        w.write_record(&[r.m.to_string(), r.mean_success.to_string(), r.stderr.to_string()])
            .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// PGM success over `trials` codebooks of `M` i.i.d. uniform group elements.
pub fn monte_carlo_achievability(
    rho: &DensityMatrix,
    group: &FiniteUnitaryGroup,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<SimulationResult> {
    if m == 0 || trials == 0 {
        return Err(Error::out_of_range("M, trials", "[1, inf)", 0.0));
    }
    check_sizes(rho, group, m)?;
    let samples = run_trials(rho, group, m, trials, seed, Family::Iid)?;
    Ok(SimulationResult::from_samples(samples, seed, m, None))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MessageCountProbe {
    #[serde(rename = "M")]
    pub m: usize,
    pub mean_success: f64,
    pub stderr: f64,
    /// Best exact success over i.i.d. and distinct-element codebooks.
    pub best_success: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Achievability {
    pub epsilon: f64,
    /// Largest `log2 M` whose mean error over i.i.d. codebooks is at most `eps`.
    pub log2_m_mean: f64,
    /// Largest `log2 M` for which some sampled codebook has error at most `eps`.
    pub log2_m_witnessed: f64,
    /// True when the search stopped at [`MAX_MESSAGES`] or `|G|` without failing.
    pub capped: bool,
    pub probes: Vec<MessageCountProbe>,
    pub bounds: Option<BoundReport>,
}

fn largest_passing(
    upper: usize,
    mut pass: impl FnMut(usize) -> Result<bool>,
) -> Result<(usize, bool)> {
    // doubling, then bisection between the last pass and the first failure
    let mut good = 1;
    let mut bad = None;
    let mut m = 2;
    while m <= upper {
        if pass(m)? {
            good = m;
            m *= 2;
        } else {
            bad = Some(m);
            break;
        }
    }
    let Some(mut bad) = bad else {
        if good < upper && pass(upper)? {
            return Ok((upper, true));
        }
        if good == upper {
            return Ok((good, true));
        }
        let mut hi = upper;
        while hi - good > 1 {
            let mid = (good + hi) / 2;
            if pass(mid)? {
                good = mid;
            } else {
                hi = mid;
            }
        }
        return Ok((good, false));
    };
    while bad - good > 1 {
        let mid = (good + bad) / 2;
        if pass(mid)? {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok((good, false))
}

/// Largest `log2 M` reaching error `eps`, by doubling then bisection on `M`.
///
/// Two criteria are reported: the mean over i.i.d. codebooks, and the best single
/// codebook among i.i.d. and distinct-element samples (an explicit code). The
/// sandwich bounds for the group twirl are attached when `delta_grid` is given.
pub fn find_achievable_log_m(
    rho: &DensityMatrix,
    group: &FiniteUnitaryGroup,
    eps: f64,
    trials: usize,
    seed: u64,
    delta_grid: Option<&[f64]>,
) -> Result<Achievability> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::out_of_range("eps", "(0, 1)", eps));
    }
    if trials == 0 {
        return Err(Error::out_of_range("trials", "[1, inf)", 0.0));
    }
    check_sizes(rho, group, 1)?;
    let target = 1.0 - eps;
    let mut cache: BTreeMap<usize, MessageCountProbe> = BTreeMap::new();
    let mut probe = |m: usize| -> Result<MessageCountProbe> {
        if let Some(p) = cache.get(&m) {
            return Ok(*p);
        }
        let iid = SimulationResult::from_samples(
            run_trials(rho, group, m, trials, seed, Family::Iid)?,
            seed,
            m,
            Some(eps),
        );
        let mut best = iid.best_success;
        if m <= group.order() {
            let distinct = run_trials(rho, group, m, trials, seed, Family::Distinct)?;
            best = distinct.into_iter().fold(best, f64::max);
        }
        let p = MessageCountProbe {
            m,
            mean_success: iid.mean_success,
            stderr: iid.stderr,
            best_success: best,
        };
        cache.insert(m, p);
        Ok(p)
    };

    let (m_mean, cap_mean) = largest_passing(MAX_MESSAGES, |m| Ok(probe(m)?.mean_success >= target))?;
    let (m_wit, cap_wit) = largest_passing(MAX_MESSAGES, |m| Ok(probe(m)?.best_success >= target))?;

    let bounds = match delta_grid {
        Some(grid) => {
            let twirl: TwirlChannel = finite_group_twirl(group.clone())?;
            Some(sandwich_bounds(rho, &twirl, eps, grid)?)
        }
        None => None,
    };
    Ok(Achievability {
        epsilon: eps,
        log2_m_mean: (m_mean as f64).log2(),
        log2_m_witnessed: (m_wit as f64).log2(),
        capped: cap_mean || cap_wit,
        probes: cache.into_values().collect(),
        bounds,
    })
}

/// `max_m max|G(sigma_m) - G(rho)|`: zero when every encoding looks the same after the twirl.
pub fn check_privacy(
    rho: &DensityMatrix,
    group: &FiniteUnitaryGroup,
    cb: &Codebook,
    twirl: &TwirlChannel,
) -> Result<f64> {
    let reference = twirl.apply_matrix(rho.matrix())?;
    encode(rho, group, cb)?
        .iter()
        .map(|s| {
            Ok(crate::qcore::linalg::max_abs_diff(
                &twirl.apply_matrix(s.matrix())?,
                &reference,
            ))
        })
        .try_fold(0.0f64, |acc, r: Result<f64>| Ok(acc.max(r?)))
}
