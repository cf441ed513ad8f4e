//! Builder vocabulary for states, resource destroying maps and Hamiltonians.
//!
//! A spec is `name`, `name(arg, ..)` or a JSON file path, optionally followed by `^k`
//! for `k` tensor copies (states only). Arguments may nest, as in `gibbs(diag(0;1),2)`.

use std::path::Path;

use rescode::bounds::gibbs_state;
use rescode::io::{self, MatrixJson};
use rescode::qcore::{DensityMatrix, HermitianObservable, PureState};
use rescode::twirl::{
    collective_twirl, dephasing_channel, depolarizing_channel, finite_group_twirl,
    heisenberg_weyl_group, local_unital_twirl, optimal_bipartite_state, pauli_group_on_a,
    permutation_group, permutation_twirl, z_group, FiniteUnitaryGroup, TwirlChannel,
};

use crate::error::{usage, CliError, CliResult};

pub const STATE_BUILDERS: &str = "bell, plus, zero, qubit(theta), basis(d,k), \
uniform_superposition(d), maximally_mixed(d), optimal_bipartite(d), gibbs(H,beta), or a matrix JSON file";

pub const RDM_BUILDERS: &str = "dephasing[(d)], depolarizing[(d)], local[(dA,dB)], \
permutation(n,d), collective(n,d), or a channel/group JSON file";

pub const HAMILTONIAN_BUILDERS: &str = "diag(e0;e1;..) or a matrix JSON file";

#[derive(Clone, Debug, PartialEq)]
struct Call {
    name: String,
    args: Vec<String>,
}

// splits on commas at nesting depth zero
fn split_top(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth -= 1;
                cur.push(c);
            }
            ',' if depth == 0 => out.push(std::mem::take(&mut cur).trim().to_string()),
            _ => cur.push(c),
        }
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn parse_call(s: &str) -> CliResult<Call> {
    let s = s.trim();
    match s.find('(') {
        None => Ok(Call {
            name: s.to_lowercase(),
            args: Vec::new(),
        }),
        Some(open) => {
            if !s.ends_with(')') {
                return Err(usage(format!("unbalanced parentheses in '{s}'")));
            }
            Ok(Call {
                name: s[..open].trim().to_lowercase(),
                args: split_top(&s[open + 1..s.len() - 1]),
            })
        }
    }
}

fn looks_like_file(s: &str) -> bool {
    s.ends_with(".json") || s.contains('/') || Path::new(s).is_file()
}

fn arg<T: std::str::FromStr>(call: &Call, i: usize, what: &str) -> CliResult<T> {
    let raw = call
        .args
        .get(i)
        .ok_or_else(|| usage(format!("{}: missing argument {what}", call.name)))?;
    raw.parse()
        .map_err(|_| usage(format!("{}: cannot parse {what} from '{raw}'", call.name)))
}

fn arity(call: &Call, allowed: &[usize]) -> CliResult<()> {
    if allowed.contains(&call.args.len()) {
        Ok(())
    } else {
        Err(usage(format!(
            "{} takes {:?} arguments, got {}",
            call.name,
            allowed,
            call.args.len()
        )))
    }
}

fn parse_beta(s: &str) -> CliResult<f64> {
    match s.trim() {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        t => t
            .parse()
            .map_err(|_| usage(format!("cannot parse beta from '{t}'"))),
    }
}

/// `diag(e0;e1;..)` or a matrix JSON file.
pub fn build_hamiltonian(spec: &str) -> CliResult<HermitianObservable> {
    if looks_like_file(spec) {
        return Ok(io::load_observable(spec)?);
    }
    let call = parse_call(spec)?;
    if call.name != "diag" || call.args.len() != 1 {
        return Err(usage(format!(
            "unknown Hamiltonian '{spec}'; expected {HAMILTONIAN_BUILDERS}"
        )));
    }
    let values = call.args[0]
        .split(';')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("cannot parse energy '{x}'")))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    if values.is_empty() {
        return Err(usage("diag() needs at least one energy"));
    }
    Ok(HermitianObservable::diagonal(&values))
}

fn split_power(spec: &str) -> CliResult<(&str, usize)> {
    match spec.rsplit_once('^') {
        Some((base, k)) if !base.is_empty() => {
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| usage(format!("cannot parse copy count in '{spec}'")))?;
            if k == 0 {
                return Err(usage("copy count must be at least 1"));
            }
            Ok((base, k))
        }
        _ => Ok((spec, 1)),
    }
}

fn bell() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PureState::from_real(&[s, 0.0, 0.0, s]).expect("normalized")
}

fn build_single_state(spec: &str) -> CliResult<DensityMatrix> {
    if looks_like_file(spec) {
        return Ok(io::load_state(spec)?);
    }
    let call = parse_call(spec)?;
    let state = match call.name.as_str() {
        "bell" => {
            arity(&call, &[0])?;
            bell().density()
        }
        "plus" => {
            arity(&call, &[0])?;
            PureState::uniform_superposition(2).density()
        }
        "zero" => {
            arity(&call, &[0])?;
            PureState::basis(2, 0)?.density()
        }
        "qubit" => {
            arity(&call, &[1])?;
            let t: f64 = arg(&call, 0, "theta")?;
            PureState::from_real(&[t.cos(), t.sin()])?.density()
        }
        "basis" => {
            arity(&call, &[2])?;
            PureState::basis(arg(&call, 0, "d")?, arg(&call, 1, "k")?)?.density()
        }
        "uniform_superposition" | "uniform" => {
            arity(&call, &[1])?;
            let d: usize = arg(&call, 0, "d")?;
            if d == 0 {
                return Err(usage("dimension must be at least 1"));
            }
            PureState::uniform_superposition(d).density()
        }
        "maximally_mixed" => {
            arity(&call, &[1])?;
            let d: usize = arg(&call, 0, "d")?;
            if d == 0 {
                return Err(usage("dimension must be at least 1"));
            }
            DensityMatrix::maximally_mixed(d)
        }
        "optimal_bipartite" => {
            arity(&call, &[1])?;
            optimal_bipartite_state(arg(&call, 0, "d")?)?.density()
        }
        "gibbs" => {
            arity(&call, &[2])?;
            let h = build_hamiltonian(&call.args[0])?;
            gibbs_state(&h, parse_beta(&call.args[1])?)?
        }
        _ => {
            return Err(usage(format!(
                "unknown state '{spec}'; valid builders: {STATE_BUILDERS}"
            )))
        }
    };
    Ok(state)
}

/// Parses a state spec such as `plus^3` or `gibbs(diag(0;1),1.5)`.
pub fn build_state(spec: &str) -> CliResult<DensityMatrix> {
    if looks_like_file(spec) {
        return build_single_state(spec);
    }
    let (base, copies) = split_power(spec)?;
    let one = build_single_state(base)?;
    let dim = (one.dim() as f64).powi(copies as i32);
    if dim > 4096.0 {
        return Err(usage(format!("{copies} copies of a {}-dimensional state is too large", one.dim())));
    }
    Ok(one.tensor_power(copies))
}

fn square_split(dim: usize, name: &str) -> CliResult<(usize, usize)> {
    let r = (dim as f64).sqrt().round() as usize;
    if r * r == dim {
        Ok((r, r))
    } else {
        Err(usage(format!(
            "{name} without arguments needs a square dimension, got {dim}; use {name}(dA,dB)"
        )))
    }
}

fn check_dim(expected: usize, tw: &TwirlChannel) -> CliResult<()> {
    if tw.dim() != expected {
        return Err(usage(format!(
            "map {} acts on dimension {}, state has dimension {expected}",
            tw.label(),
            tw.dim()
        )));
    }
    Ok(())
}

fn load_map_file(spec: &str) -> CliResult<TwirlChannel> {
    let text = std::fs::read_to_string(spec)
        .map_err(|e| CliError::Lib(rescode::Error::Io(e)))?;
    if text.trim_start().starts_with('[') {
        Ok(finite_group_twirl(io::group_from_json(&text)?)?)
    } else {
        Ok(TwirlChannel::custom(io::channel_from_json(&text)?)?)
    }
}

/// A resource destroying map for states of dimension `dim`.
pub fn build_rdm(spec: &str, dim: usize) -> CliResult<TwirlChannel> {
    if looks_like_file(spec) {
        let tw = load_map_file(spec)?;
        check_dim(dim, &tw)?;
        return Ok(tw);
    }
    let call = parse_call(spec)?;
    let tw = match call.name.as_str() {
        "dephasing" | "dephased" => {
            arity(&call, &[0, 1])?;
            let d = if call.args.is_empty() { dim } else { arg(&call, 0, "d")? };
            dephasing_channel(d)?
        }
        "depolarizing" | "depolarized" => {
            arity(&call, &[0, 1])?;
            let d = if call.args.is_empty() { dim } else { arg(&call, 0, "d")? };
            depolarizing_channel(d)?
        }
        "local" | "local-twirled" | "local_twirled" => {
            arity(&call, &[0, 2])?;
            let (a, b) = if call.args.is_empty() {
                square_split(dim, "local")?
            } else {
                (arg(&call, 0, "dA")?, arg(&call, 1, "dB")?)
            };
            local_unital_twirl(a, b)?
        }
        "permutation" => {
            arity(&call, &[2])?;
            permutation_twirl(arg(&call, 0, "n")?, arg(&call, 1, "d")?)?
        }
        "collective" => {
            arity(&call, &[2])?;
            collective_twirl(arg(&call, 0, "n")?, arg(&call, 1, "d")?)?
        }
        _ => {
            return Err(usage(format!(
                "unknown map '{spec}'; valid builders: {RDM_BUILDERS}"
            )))
        }
    };
    check_dim(dim, &tw)?;
    Ok(tw)
}

/// The finite group used for encodings under a map spec.
pub fn build_group(spec: &str, dim: usize) -> CliResult<FiniteUnitaryGroup> {
    if looks_like_file(spec) {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| CliError::Lib(rescode::Error::Io(e)))?;
        if !text.trim_start().starts_with('[') {
            return Err(usage(format!("{spec} is not a group file (expected a JSON array of matrices)")));
        }
        let g = io::group_from_json(&text)?;
        if g.dim() != dim {
            return Err(usage(format!("group acts on dimension {}, state has {dim}", g.dim())));
        }
        return Ok(g);
    }
    let call = parse_call(spec)?;
    let g = match call.name.as_str() {
        "dephasing" | "dephased" | "z" => z_group(dim)?,
        "depolarizing" | "depolarized" | "weyl" => heisenberg_weyl_group(dim)?,
        "local" | "local-twirled" | "local_twirled" => {
            let (a, b) = if call.args.is_empty() {
                square_split(dim, "local")?
            } else {
                arity(&call, &[2])?;
                (arg(&call, 0, "dA")?, arg(&call, 1, "dB")?)
            };
            pauli_group_on_a(a, b)?
        }
        "permutation" => {
            arity(&call, &[2])?;
            permutation_group(arg(&call, 0, "n")?, arg(&call, 1, "d")?)?
        }
        "collective" => {
            return Err(usage(
                "the collective twirl has no finite encoding group; use a group JSON file",
            ))
        }
        _ => {
            return Err(usage(format!(
                "unknown map '{spec}'; valid builders: {RDM_BUILDERS}"
            )))
        }
    };
    if g.dim() != dim {
        return Err(usage(format!("group acts on dimension {}, state has {dim}", g.dim())));
    }
    Ok(g)
}

/// `sigma` for the entropy command: a state spec, or a map name applied to `rho`.
pub fn build_sigma(spec: &str, rho: &DensityMatrix, rdm: Option<&str>) -> CliResult<DensityMatrix> {
    let lowered = spec.trim().to_lowercase();
    let map = match lowered.as_str() {
        "twirled" => Some(
            rdm.ok_or_else(|| usage("--sigma twirled needs --rdm"))?
                .to_string(),
        ),
        "dephased" | "depolarized" | "local-twirled" | "local_twirled" => Some(lowered.clone()),
        _ => None,
    };
    match map {
        Some(m) => Ok(build_rdm(&m, rho.dim())?.apply(rho)?),
        None => build_state(spec),
    }
}

/// Comma-separated list of numbers.
pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| usage(format!("cannot parse {what} from '{x}'")))
        })
        .collect()
}

/// Matrix JSON of a state, for echoing inputs.
pub fn state_json(rho: &DensityMatrix) -> MatrixJson {
    MatrixJson::from(rho.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_calls() {
        let c = parse_call("gibbs(diag(0;1), inf)").unwrap();
        assert_eq!(c.name, "gibbs");
        assert_eq!(c.args, vec!["diag(0;1)", "inf"]);
        assert_eq!(parse_call("plus").unwrap().args.len(), 0);
        assert!(parse_call("local(2,2").is_err());
    }

    #[test]
    fn states() {
        assert_eq!(build_state("bell").unwrap().dim(), 4);
        assert_eq!(build_state("plus^3").unwrap().dim(), 8);
        let g = build_state("gibbs(diag(0;1),0)").unwrap();
        assert!((g.populations()[0] - 0.5).abs() < 1e-15);
        assert!(matches!(build_state("nonsense"), Err(CliError::Usage(_))));
        assert!(matches!(build_state("plus^0"), Err(CliError::Usage(_))));
    }

    #[test]
    fn maps() {
        assert_eq!(build_rdm("local", 4).unwrap().label(), "local(2,2)");
        assert!(build_rdm("local", 6).is_err());
        assert!(build_rdm("dephasing(3)", 4).is_err());
        assert_eq!(build_group("local", 4).unwrap().order(), 4);
        assert_eq!(build_group("dephasing", 8).unwrap().order(), 8);
    }
}
