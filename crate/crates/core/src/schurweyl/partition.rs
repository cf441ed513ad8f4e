use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// An integer partition, parts in weakly decreasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidPartition(format!("{parts:?} has a zero part")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!("{parts:?} is not weakly decreasing")));
        }
        Ok(Partition { parts })
    }

    /// Sorts `parts` and drops zeros.
    pub(crate) fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Transposed diagram.
    pub fn conjugate(&self) -> Partition {
        let cols = self.parts.first().copied().unwrap_or(0);
        let parts = (0..cols)
            .map(|j| self.parts.iter().filter(|&&p| p > j).count())
            .collect();
        Partition { parts }
    }

    /// Hook lengths of all boxes, row by row.
    pub fn hooks(&self) -> Vec<usize> {
        let conj = self.conjugate();
        let mut out = Vec::with_capacity(self.n());
        for (i, &row) in self.parts.iter().enumerate() {
            for j in 0..row {
                out.push((row - j - 1) + (conj.parts[j] - i - 1) + 1);
            }
        }
        out
    }

    /// Size of the conjugacy class of permutations with this cycle type.
    pub fn class_size(&self) -> u128 {
        let mut denom: u128 = 1;
        let mut counts: HashMap<usize, u32> = HashMap::new();
        for &k in &self.parts {
            *counts.entry(k).or_default() += 1;
        }
        for (&k, &m) in &counts {
            denom *= (k as u128).pow(m) * factorial(m as usize);
        }
        factorial(self.n()) / denom
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", s.join(","))
    }
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// All partitions of `n`, in reverse lexicographic order (`{n}` first).
pub fn partitions(n: usize) -> Vec<Partition> {
    fn rec(rest: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition {
                parts: prefix.clone(),
            });
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            prefix.push(p);
            rec(rest - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Number of standard Young tableaux of shape `lambda` (hook length formula).
pub fn syt_count(lambda: &Partition) -> u128 {
    let hooks: u128 = lambda.hooks().iter().map(|&h| h as u128).product();
    factorial(lambda.n()) / hooks
}

/// `s_lambda(1, ..., 1)` with `d` ones: the dimension of the unitary irrep (hook content formula).
pub fn schur_at_ones(lambda: &Partition, d: usize) -> u128 {
    if lambda.len() > d {
        return 0;
    }
    let mut num: u128 = 1;
    for (i, &row) in lambda.parts.iter().enumerate() {
        for j in 0..row {
            num *= (d + j - i) as u128;
        }
    }
    let hooks: u128 = lambda.hooks().iter().map(|&h| h as u128).product();
    num / hooks
}

/// Irreducible character `chi^lambda` on the class `cycle_type` (Murnaghan-Nakayama rule).
pub fn character(lambda: &Partition, cycle_type: &Partition) -> Result<i128> {
    if lambda.n() != cycle_type.n() {
        return Err(Error::InvalidPartition(format!(
            "{lambda} and {cycle_type} partition different integers"
        )));
    }
    let mut memo = HashMap::new();
    Ok(mn_rec(&beta_set(lambda), cycle_type.parts(), &mut memo))
}

// beta numbers lambda_i + (len - 1 - i), strictly decreasing
fn beta_set(lambda: &Partition) -> Vec<usize> {
    let l = lambda.len();
    lambda
        .parts
        .iter()
        .enumerate()
        .map(|(i, &p)| p + l - 1 - i)
        .collect()
}

fn mn_rec(beta: &[usize], rest: &[usize], memo: &mut HashMap<(Vec<usize>, usize), i128>) -> i128 {
    let Some((&r, tail)) = rest.split_first() else {
        return 1;
    };
    let key = (beta.to_vec(), rest.len());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let mut total = 0;
    for (idx, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let target = b - r;
        // each bead jumped over flips the sign (rim hook height)
        let jumped = beta.iter().filter(|&&c| c > target && c < b).count();
        let sign = if jumped % 2 == 0 { 1 } else { -1 };
        let mut next = beta.to_vec();
        next[idx] = target;
        next.sort_unstable_by(|a, b| b.cmp(a));
        total += sign * mn_rec(&normalize_beta(next), tail, memo);
    }
    memo.insert(key, total);
    total
}

// canonical beta set of the shape, so equal shapes share a memo key
fn normalize_beta(beta: Vec<usize>) -> Vec<usize> {
    let l = beta.len();
    let parts = beta
        .iter()
        .enumerate()
        .map(|(i, &b)| b - (l - 1 - i))
        .filter(|&p| p > 0)
        .collect();
    beta_set(&Partition { parts })
}
