use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::linalg::{max_abs_diff, real, tensor_power, CMatrix, CVector, Spectrum};
use crate::qcore::random::haar_unitary;
use crate::qcore::{DensityMatrix, PureState};
use crate::schurweyl::{character, factorial, partitions, schur_at_ones, syt_count, Partition, Permutation};

/// Largest number of factors accepted by the collective twirl.
pub const COLLECTIVE_MAX_N: usize = 5;
/// Largest local dimension accepted by the collective twirl.
pub const COLLECTIVE_MAX_D: usize = 3;
/// Relative cutoff for the Gram pseudo-inverse.
pub const GRAM_PINV_CUTOFF: f64 = 1e-10;
/// Samples per independently seeded Monte Carlo shard.
pub const MC_SHARD: usize = 4096;
/// Restart budget of [`maximally_twirled_state`].
pub const TWIRLED_STATE_RESTARTS: usize = 1000;

fn check_collective_size(n: usize, d: usize) -> Result<()> {
    if n == 0 || d == 0 {
        return Err(Error::SizeGuard(format!("need n, d >= 1, got n = {n}, d = {d}")));
    }
    if n > COLLECTIVE_MAX_N || d > COLLECTIVE_MAX_D {
        return Err(Error::SizeGuard(format!(
            "collective twirl limited to n <= {COLLECTIVE_MAX_N}, d <= {COLLECTIVE_MAX_D}; got n = {n}, d = {d}"
        )));
    }
    Ok(())
}

/// Young projector `P^lambda = f^lambda / n! * sum_pi chi^lambda(pi) P_pi` on `(C^d)^{⊗n}`.
pub fn young_projector(lambda: &Partition, n: usize, d: usize) -> Result<CMatrix> {
    if lambda.n() != n {
        return Err(Error::InvalidPartition(format!("{lambda} is not a partition of {n}")));
    }
    if n == 0 || d == 0 || n > 6 || (d as f64).powi(n as i32) > 1024.0 {
        return Err(Error::SizeGuard(format!("young projector for n = {n}, d = {d}")));
    }
    let dim = d.pow(n as u32);
    let scale = syt_count(lambda) as f64 / factorial(n) as f64;
    let mut chars = std::collections::HashMap::new();
    let mut p = CMatrix::zeros(dim, dim);
    for pi in Permutation::all(n) {
        let ct = pi.cycle_type();
        let chi = match chars.get(&ct) {
            Some(&c) => c,
            None => {
                let c = character(lambda, &ct)?;
                chars.insert(ct, c);
                c
            }
        };
        if chi == 0 {
            continue;
        }
        let w = real(scale * chi as f64);
        for (i, m) in pi.index_map(d).into_iter().enumerate() {
            p[(m, i)] += w;
        }
    }
    Ok(p)
}

/// One row of a [`SchurWeylTable`].
#[derive(Clone, Debug, Serialize)]
pub struct SchurWeylRow {
    pub partition: Partition,
    /// multiplicity space dimension `f^lambda`
    pub syt_count: u64,
    /// unitary irrep dimension `s_lambda(1^d)`
    pub schur_dim: u64,
    /// `tr P^lambda = f^lambda * s_lambda(1^d)`
    pub block_dim: u64,
    #[serde(skip)]
    pub projector: Option<CMatrix>,
}

/// Schur-Weyl block data for `(C^d)^{⊗n}`.
#[derive(Clone, Debug, Serialize)]
pub struct SchurWeylTable {
    pub n: usize,
    pub d: usize,
    pub rows: Vec<SchurWeylRow>,
    /// `sum_lambda (f^lambda)^2`, equal to `n!`
    pub sum_syt_squared: u64,
    pub n_factorial: u64,
    /// `sum_lambda f^lambda s_lambda(1^d)`, equal to `d^n`
    pub sum_block_dims: u64,
    pub d_pow_n: u64,
}

impl SchurWeylTable {
    /// Integer data only.
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 || n > 20 || (d as f64).powi(n as i32) > 1e18 {
            return Err(Error::SizeGuard(format!("table for n = {n}, d = {d}")));
        }
        let rows: Vec<SchurWeylRow> = partitions(n)
            .into_iter()
            .map(|lambda| {
                let f = syt_count(&lambda) as u64;
                let s = schur_at_ones(&lambda, d) as u64;
                SchurWeylRow {
                    partition: lambda,
                    syt_count: f,
                    schur_dim: s,
                    block_dim: f * s,
                    projector: None,
                }
            })
            .collect();
        Ok(SchurWeylTable {
            n,
            d,
            sum_syt_squared: rows.iter().map(|r| r.syt_count * r.syt_count).sum(),
            n_factorial: factorial(n) as u64,
            sum_block_dims: rows.iter().map(|r| r.block_dim).sum(),
            d_pow_n: (d as u64).pow(n as u32),
            rows,
        })
    }

    /// Also builds the Young projectors (blocks with `s_lambda(1^d) = 0` get the zero matrix).
    pub fn with_projectors(n: usize, d: usize) -> Result<Self> {
        let mut table = SchurWeylTable::new(n, d)?;
        for row in &mut table.rows {
            row.projector = Some(young_projector(&row.partition, n, d)?);
        }
        Ok(table)
    }
}

/// Exact twirl over `U^{⊗n}`: Hilbert-Schmidt projection onto `span{P_pi}`.
///
/// `G(A) = sum_{pi,sigma} W^+_{pi sigma} tr(P_sigma^dagger A) P_pi` with Gram matrix
/// `W_{pi sigma} = d^{cycles(pi^{-1} sigma)}`.
#[derive(Clone, Debug)]
pub struct CollectiveTwirl {
    n: usize,
    d: usize,
    maps: Vec<Vec<usize>>,
    gram_pinv: DMatrix<f64>,
}

impl CollectiveTwirl {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        check_collective_size(n, d)?;
        let perms = Permutation::all(n);
        let k = perms.len();
        let gram = DMatrix::from_fn(k, k, |a, b| {
            let c = perms[a].inverse().compose(&perms[b]).cycle_count();
            (d as f64).powi(c as i32)
        });
        let eig = SymmetricEigen::new(gram);
        let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let mut pinv = DMatrix::zeros(k, k);
        for (j, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam > GRAM_PINV_CUTOFF * top {
                let v = eig.eigenvectors.column(j);
                pinv += (v * v.transpose()) / lam;
            }
        }
        Ok(CollectiveTwirl {
            n,
            d,
            maps: perms.iter().map(|p| p.index_map(d)).collect(),
            gram_pinv: pinv,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    pub fn apply_matrix(&self, a: &CMatrix) -> Result<CMatrix> {
        let dim = self.dim();
        if a.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: a.nrows(),
            });
        }
        // tr(P_sigma^dagger A) = sum_i A[m_sigma(i), i]
        let overlaps: Vec<_> = self
            .maps
            .iter()
            .map(|m| m.iter().enumerate().map(|(i, &r)| a[(r, i)]).sum::<num_complex::Complex64>())
            .collect();
        let mut out = CMatrix::zeros(dim, dim);
        for (p, map) in self.maps.iter().enumerate() {
            let coef: num_complex::Complex64 = overlaps
                .iter()
                .enumerate()
                .map(|(s, t)| t * self.gram_pinv[(p, s)])
                .sum();
            if coef.norm() == 0.0 {
                continue;
            }
            for (i, &r) in map.iter().enumerate() {
                out[(r, i)] += coef;
            }
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_raw(self.apply_matrix(rho.matrix())?))
    }
}

/// Monte Carlo estimate of the collective twirl: average of `U^{⊗n} rho U^{⊗n dagger}`
/// over `samples` Haar unitaries. Shards of [`MC_SHARD`] samples draw from
/// ChaCha20 stream `shard` of `seed`, so the result does not depend on the thread count.
pub fn haar_twirl_mc(
    rho: &DensityMatrix,
    n: usize,
    d: usize,
    samples: usize,
    seed: u64,
) -> Result<DensityMatrix> {
    let dim = d.checked_pow(n as u32).unwrap_or(usize::MAX);
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: rho.dim(),
        });
    }
    if samples == 0 {
        return Err(Error::out_of_range("samples", "[1, inf)", 0.0));
    }
    let shards = samples.div_ceil(MC_SHARD);
    let partial: Vec<CMatrix> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(shard as u64);
            let count = MC_SHARD.min(samples - shard * MC_SHARD);
            let mut acc = CMatrix::zeros(dim, dim);
            for _ in 0..count {
                let u = tensor_power(&haar_unitary(d, &mut rng), n);
                acc += &u * rho.matrix() * u.adjoint();
            }
            acc
        })
        .collect();
    let mut total = CMatrix::zeros(dim, dim);
    for p in partial {
        total += p;
    }
    Ok(DensityMatrix::from_raw(total / real(samples as f64)))
}

/// Outcome of [`maximally_twirled_state`].
#[derive(Clone, Debug)]
pub enum TwirledStateSearch {
    Found {
        state: PureState,
        restarts: usize,
        /// `max |G(|x><x|) - 1/d^n|`
        residual: f64,
    },
    NotFound {
        restarts: usize,
        reason: String,
    },
}

impl TwirledStateSearch {
    pub fn state(&self) -> Option<&PureState> {
        match self {
            TwirledStateSearch::Found { state, .. } => Some(state),
            TwirledStateSearch::NotFound { .. } => None,
        }
    }
}

/// A pure state on `(C^d)^{⊗n}` whose collective twirl is maximally mixed, with a fixed seed.
pub fn maximally_twirled_state(n: usize, d: usize) -> Result<TwirledStateSearch> {
    maximally_twirled_state_seeded(n, d, 0x5eed)
}

struct Block {
    f: usize,
    s: usize,
    basis: CMatrix,
}

/// Builds `x = sum_lambda sqrt(tr P^lambda / d^n) x^lambda`, where each `x^lambda` is
/// maximally entangled between the multiplicity space and the unitary irrep of its block.
///
/// Inside a block, a random Hermitian combination of permutation operators acts only on
/// the multiplicity factor and splits the block into `f^lambda` clusters of size
/// `s_lambda(1^d)`; a random Hermitian combination of `U^{⊗n}` acts only on the unitary
/// factor and picks a common basis in every cluster. Taking the k-th such vector from
/// cluster k gives a Schmidt decomposition with `f^lambda` equal coefficients.
/// Generic draws succeed; degenerate ones are redrawn up to [`TWIRLED_STATE_RESTARTS`] times.
/// Blocks with `s_lambda(1^d) < f^lambda` admit no such vector and yield `NotFound` directly.
pub fn maximally_twirled_state_seeded(n: usize, d: usize, seed: u64) -> Result<TwirledStateSearch> {
    let twirl = CollectiveTwirl::new(n, d)?;
    let dim = twirl.dim();
    let mut blocks = Vec::new();
    for lambda in partitions(n) {
        let f = syt_count(&lambda) as usize;
        let s = schur_at_ones(&lambda, d) as usize;
        if s == 0 {
            continue;
        }
        if s < f {
            return Ok(TwirledStateSearch::NotFound {
                restarts: 0,
                reason: format!(
                    "block {lambda}: unitary irrep dimension {s} is below its multiplicity {f}"
                ),
            });
        }
        let spec = Spectrum::of(&young_projector(&lambda, n, d)?);
        let cols: Vec<usize> = (0..dim).filter(|&k| spec.values[k] > 0.5).collect();
        let basis = spec.vectors.select_columns(&cols);
        blocks.push(Block { f, s, basis });
    }
    let perm_maps: Vec<Vec<usize>> = Permutation::all(n).iter().map(|p| p.index_map(d)).collect();
    let target = CMatrix::identity(dim, dim) / real(dim as f64);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);

    for restart in 0..TWIRLED_STATE_RESTARTS {
        let mut x = CVector::zeros(dim);
        let mut ok = true;
        for block in &blocks {
            match block_vector(block, n, d, &perm_maps, &mut rng) {
                Some(v) => x += v * real(((block.f * block.s) as f64 / dim as f64).sqrt()),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let Ok(state) = PureState::normalized(x) else {
            continue;
        };
        let out = twirl.apply_matrix(state.density().matrix())?;
        let residual = max_abs_diff(&out, &target);
        if residual <= 1e-8 {
            return Ok(TwirledStateSearch::Found {
                state,
                restarts: restart,
                residual,
            });
        }
    }
    Ok(TwirledStateSearch::NotFound {
        restarts: TWIRLED_STATE_RESTARTS,
        reason: "restart budget exhausted".into(),
    })
}

fn gaussian(rng: &mut ChaCha20Rng) -> f64 {
    StandardNormal.sample(rng)
}

// eigenvalue gaps below this fraction of the spectral scale count as degenerate
const GAP_TOL: f64 = 1e-6;

fn block_vector(
    block: &Block,
    n: usize,
    d: usize,
    perm_maps: &[Vec<usize>],
    rng: &mut ChaCha20Rng,
) -> Option<CVector> {
    let (f, s, basis) = (block.f, block.s, &block.basis);
    if f == 1 {
        return Some(basis.column(0).into_owned());
    }
    let (dim, m) = basis.shape();

    // permutation side: sum_pi c_pi P_pi B, restricted to the block
    let mut pb = CMatrix::zeros(dim, m);
    for map in perm_maps {
        let c = real(gaussian(rng));
        for (i, &r) in map.iter().enumerate() {
            for col in 0..m {
                pb[(r, col)] += c * basis[(i, col)];
            }
        }
    }
    let hs = basis.adjoint() * pb;
    let hs = &hs + hs.adjoint();
    let hs_spec = Spectrum::of(&hs);
    let scale = hs_spec.max_abs_value().max(1.0);
    for k in 0..f {
        let cluster = &hs_spec.values[k * s..(k + 1) * s];
        if cluster[s - 1] - cluster[0] > 1e-9 * scale {
            return None;
        }
        if k > 0 && cluster[0] - hs_spec.values[k * s - 1] < GAP_TOL * scale {
            return None;
        }
    }

    // unitary side: sum_r a_r (V_r + V_r^dagger) with V_r = U_r^{⊗n}
    let mut hq = CMatrix::zeros(dim, dim);
    for _ in 0..2 {
        let v = tensor_power(&haar_unitary(d, rng), n) * real(gaussian(rng));
        hq += &v + v.adjoint();
    }
    let hq = basis.adjoint() * hq * basis;

    let mut x = CVector::zeros(dim);
    for k in 0..f {
        let cluster = hs_spec.vectors.columns(k * s, s).into_owned();
        let q = cluster.adjoint() * &hq * &cluster;
        let q_spec = Spectrum::of(&q);
        let q_scale = q_spec.max_abs_value().max(1e-3);
        if q_spec.values.windows(2).any(|w| w[1] - w[0] < GAP_TOL * q_scale) {
            return None;
        }
        let y = &cluster * q_spec.vectors.column(k);
        x += basis * y;
    }
    Some(x / real((f as f64).sqrt()))
}
