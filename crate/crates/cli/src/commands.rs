use serde::Serialize;

use rescode::bounds::{
    asymptotic_rate, clock_bound, rate_curve, sandwich_bounds, sandwich_bounds_pure_dephased,
    splitting_check, thermo_bound, BoundReport, RateCurve, Splitting,
};
use rescode::codesim::{
    codebook_success, find_achievable_log_m, monte_carlo_achievability, simulation_csv, Codebook,
    SimulationResult,
};
use rescode::entropy::{
    collision_relative_entropy, hypothesis_testing_relative_entropy,
    info_spectrum_relative_entropy, relative_entropy, relative_entropy_variance,
    von_neumann_entropy, Divergence, EntropicValue, Quantity,
};
use rescode::io::VectorJson;
use rescode::qcore::{DensityMatrix, PureState};
use rescode::schurweyl::{
    maximally_twirled_state_seeded, three_qubit_demo, SchurWeylTable, TwirledStateSearch,
};
use rescode::twirl::TwirlKind;
use rescode::Error;

use crate::error::{usage, CliResult};
use crate::scenario::{
    build_group, build_hamiltonian, build_rdm, build_sigma, build_state, parse_list,
};
use crate::{BoundArgs, EntropyArgs, Format, SchurweylCommand, SimulateArgs};

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn json_only(format: Format, command: &str) -> CliResult<()> {
    match format {
        Format::Json => Ok(()),
        Format::Csv => Err(usage(format!(
            "{command} has no tabular output; use --format json"
        ))),
    }
}

/// Keeps the value, or records why it is undefined.
fn defined<T>(r: rescode::Result<T>, name: &str, notes: &mut Vec<String>) -> CliResult<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::SupportViolation) => {
            notes.push(format!("{name}: support of rho is not contained in support of sigma"));
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct EntropyReport {
    rho: String,
    sigma: String,
    dim: usize,
    values: Vec<EntropicValue>,
    notes: Vec<String>,
}

pub fn entropy(a: &EntropyArgs, format: Format) -> CliResult<String> {
    json_only(format, "entropy")?;
    let rho = build_state(&a.rho)?;
    let sigma = build_sigma(&a.sigma, &rho, a.rdm.as_deref())?;
    if sigma.dim() != rho.dim() {
        return Err(usage(format!(
            "rho has dimension {}, sigma has {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let mut notes = Vec::new();
    let mut values = vec![
        EntropicValue {
            quantity: Quantity::S,
            value: Divergence::Finite(von_neumann_entropy(&rho)),
            parameter: None,
        },
        EntropicValue {
            quantity: Quantity::D,
            value: relative_entropy(&rho, &sigma)?,
            parameter: None,
        },
    ];
    if let Some(v) = defined(relative_entropy_variance(&rho, &sigma), "V", &mut notes)? {
        values.push(EntropicValue {
            quantity: Quantity::V,
            value: Divergence::Finite(v),
            parameter: None,
        });
    }
    match collision_relative_entropy(&rho, &sigma) {
        Ok(v) => values.push(EntropicValue {
            quantity: Quantity::D2,
            value: Divergence::Finite(v),
            parameter: None,
        }),
        Err(Error::SupportViolation) => values.push(EntropicValue {
            quantity: Quantity::D2,
            value: Divergence::Infinite,
            parameter: None,
        }),
        Err(e) => return Err(e.into()),
    }
    values.push(EntropicValue {
        quantity: Quantity::Ds,
        value: info_spectrum_relative_entropy(&rho, &sigma, a.delta)?,
        parameter: Some(a.delta),
    });
    values.push(EntropicValue {
        quantity: Quantity::DH,
        value: hypothesis_testing_relative_entropy(&rho, &sigma, a.eps)?,
        parameter: Some(a.eps),
    });
    to_json(&EntropyReport {
        rho: a.rho.clone(),
        sigma: a.sigma.clone(),
        dim: rho.dim(),
        values,
        notes,
    })
}

/// Nine evenly spaced points in `(0, min(eps, 1 - eps))`.
pub fn default_delta_grid(eps: f64) -> Vec<f64> {
    let top = eps.min(1.0 - eps);
    (1..10).map(|k| top * k as f64 / 10.0).collect()
}

fn pure_state_of(rho: &DensityMatrix) -> Option<PureState> {
    let spec = rho.spectrum();
    let top = *spec.values.last()?;
    if (top - 1.0).abs() > 1e-10 {
        return None;
    }
    PureState::normalized(spec.vectors.column(spec.dim() - 1).into_owned()).ok()
}

#[derive(Serialize)]
struct ThermoRow {
    #[serde(rename = "N")]
    n: usize,
    thermo_bound: f64,
    clock_bound: Option<f64>,
}

#[derive(Serialize)]
struct BoundOutput {
    rho: String,
    rdm: String,
    report: BoundReport,
    /// `D(rho||G rho)`
    first_order: f64,
    splitting: Splitting,
    rate_curve: Option<RateCurve>,
    thermo: Option<Vec<ThermoRow>>,
}

// above this the dense sandwich is skipped in favour of the pure-state path
const DENSE_BOUND_DIM: usize = 256;

pub fn bound(a: &BoundArgs, format: Format) -> CliResult<String> {
    if !(a.eps > 0.0 && a.eps < 1.0) {
        return Err(usage(format!("--eps must lie in (0, 1), got {}", a.eps)));
    }
    let rho = build_state(&a.rho)?;
    let twirl = build_rdm(&a.rdm, rho.dim())?;
    let grid = match &a.delta {
        Some(s) => parse_list::<f64>(s, "delta")?,
        None => default_delta_grid(a.eps),
    };
    let ns = match &a.n {
        Some(s) => Some(parse_list::<usize>(s, "N")?),
        None => None,
    };
    if let Some(ns) = &ns {
        if ns.contains(&0) {
            return Err(usage("--N entries must be at least 1"));
        }
    }

    if format == Format::Csv {
        let ns = ns.ok_or_else(|| usage("--format csv emits the rate curve and needs --N"))?;
        return Ok(rate_curve(&rho, &twirl, a.eps, &ns)?.to_csv()?);
    }

    let pure = pure_state_of(&rho);
    let report = match &pure {
        Some(psi) if twirl.kind() == TwirlKind::Dephasing && rho.dim() > DENSE_BOUND_DIM => {
            sandwich_bounds_pure_dephased(psi, a.eps, &grid)?
        }
        _ => sandwich_bounds(&rho, &twirl, a.eps, &grid)?,
    };
    let first_order = asymptotic_rate(&rho, &twirl, a.eps, 1)?.first_order;
    let curve = match &ns {
        Some(ns) => Some(rate_curve(&rho, &twirl, a.eps, ns)?),
        None => None,
    };
    let thermo = match &a.hamiltonian {
        Some(h) => {
            let h = build_hamiltonian(h)?;
            let beta = match a.beta.trim() {
                "inf" | "+inf" | "infinity" => f64::INFINITY,
                t => t
                    .parse()
                    .map_err(|_| usage(format!("cannot parse --beta from '{t}'")))?,
            };
            let rows = ns
                .clone()
                .unwrap_or_else(|| vec![1])
                .into_iter()
                .map(|n| {
                    Ok(ThermoRow {
                        n,
                        thermo_bound: thermo_bound(&rho, &h, beta, a.eps, n)?,
                        clock_bound: match &pure {
                            Some(psi) => Some(clock_bound(psi, &h, n)?),
                            None => None,
                        },
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            Some(rows)
        }
        None => None,
    };
    to_json(&BoundOutput {
        rho: a.rho.clone(),
        rdm: twirl.label().to_string(),
        report,
        first_order,
        splitting: splitting_check(&rho, &twirl)?,
        rate_curve: curve,
        thermo,
    })
}

pub fn simulate(a: &SimulateArgs, format: Format) -> CliResult<String> {
    let rho = build_state(&a.rho)?;
    let group = build_group(&a.rdm, rho.dim())?;
    if a.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }

    if let Some(eps) = a.eps {
        json_only(format, "simulate --eps")?;
        let grid = match &a.delta {
            Some(s) => Some(parse_list::<f64>(s, "delta")?),
            None => None,
        };
        let found = find_achievable_log_m(&rho, &group, eps, a.trials, a.seed, grid.as_deref())?;
        return to_json(&found);
    }

    let results: Vec<SimulationResult> = match &a.codebook {
        Some(cb) => {
            let cb = Codebook::new(parse_list::<usize>(cb, "codebook")?, group.order())?;
            let p = codebook_success(&rho, &group, &cb)?;
            vec![SimulationResult::from_samples(vec![p], a.seed, cb.messages(), None)]
        }
        None => {
            let ms = parse_list::<usize>(&a.m, "M")?;
            if ms.contains(&0) {
                return Err(usage("--M entries must be at least 1"));
            }
            ms.into_iter()
                .map(|m| monte_carlo_achievability(&rho, &group, m, a.trials, a.seed))
                .collect::<rescode::Result<Vec<_>>>()?
        }
    };
    match format {
        Format::Csv => Ok(simulation_csv(&results)?),
        Format::Json if results.len() == 1 => to_json(&results[0]),
        Format::Json => to_json(&results),
    }
}

#[derive(Serialize)]
struct TwirledStateOutput {
    n: usize,
    d: usize,
    found: bool,
    restarts: usize,
    residual: Option<f64>,
    reason: Option<String>,
    state: Option<VectorJson>,
}

pub fn schurweyl(cmd: &SchurweylCommand, format: Format) -> CliResult<String> {
    json_only(format, "schurweyl")?;
    match cmd {
        SchurweylCommand::Demo3qubit => to_json(&three_qubit_demo()?),
        SchurweylCommand::Table { n, d } => {
            if *n == 0 || *n > 20 || *d == 0 {
                return Err(usage(format!("table needs 1 <= n <= 20 and d >= 1, got n = {n}, d = {d}")));
            }
            to_json(&SchurWeylTable::new(*n, *d)?)
        }
        SchurweylCommand::State { n, d, seed } => {
            let out = match maximally_twirled_state_seeded(*n, *d, *seed)? {
                TwirledStateSearch::Found {
                    state,
                    restarts,
                    residual,
                } => TwirledStateOutput {
                    n: *n,
                    d: *d,
                    found: true,
                    restarts,
                    residual: Some(residual),
                    reason: None,
                    state: Some(VectorJson::from(state.amplitudes())),
                },
                TwirledStateSearch::NotFound { restarts, reason } => TwirledStateOutput {
                    n: *n,
                    d: *d,
                    found: false,
                    restarts,
                    residual: None,
                    reason: Some(reason),
                    state: None,
                },
            };
            to_json(&out)
        }
    }
}
