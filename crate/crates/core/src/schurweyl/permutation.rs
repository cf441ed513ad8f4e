use itertools::Itertools;

use crate::error::{Error, Result};
use crate::qcore::linalg::{real, CMatrix};
use crate::schurweyl::Partition;

/// A bijection of `{0, .., n-1}`; `map[j]` is the image of `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &j in &map {
            if j >= n || seen[j] {
                return Err(Error::InvalidPermutation(format!("{map:?} is not a bijection")));
            }
            seen[j] = true;
        }
        Ok(Permutation { map })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n).collect(),
        }
    }

    /// Swaps `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        if a >= n || b >= n {
            return Err(Error::IndexOutOfRange {
                index: a.max(b),
                len: n,
            });
        }
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(a, b);
        Ok(Permutation { map })
    }

    /// All permutations of `n` points, identity first.
    pub fn all(n: usize) -> Vec<Permutation> {
        (0..n)
            .permutations(n)
            .map(|map| Permutation { map })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, j: usize) -> usize {
        self.map[j]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            map: other.map.iter().map(|&j| self.map[j]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut map = vec![0; self.n()];
        for (j, &k) in self.map.iter().enumerate() {
            map[k] = j;
        }
        Permutation { map }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(j, &k)| j == k)
    }

    /// Cycle lengths, as a partition of `n`.
    pub fn cycle_type(&self) -> Partition {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.map[j];
                len += 1;
            }
            lengths.push(len);
        }
        Partition::from_unsorted(lengths)
    }

    pub fn cycle_count(&self) -> usize {
        self.cycle_type().len()
    }

    /// Basis-index action of the tensor-factor permutation on `(C^d)^{⊗n}`:
    /// the factor in slot `j` moves to slot `map[j]`. Slot 0 is the most significant digit.
    pub fn index_map(&self, d: usize) -> Vec<usize> {
        let n = self.n();
        let dim = d.pow(n as u32);
        let mut place = vec![0usize; n];
        for (j, p) in place.iter_mut().enumerate() {
            *p = d.pow((n - 1 - j) as u32);
        }
        let mut out = Vec::with_capacity(dim);
        let mut digits = vec![0usize; n];
        for i in 0..dim {
            let mut rest = i;
            for slot in (0..n).rev() {
                digits[slot] = rest % d;
                rest /= d;
            }
            let image: usize = (0..n).map(|j| digits[j] * place[self.map[j]]).sum();
            out.push(image);
        }
        out
    }
}

/// The operator permuting tensor factors; `P(pi) P(sigma) = P(pi ∘ sigma)`.
pub fn permutation_operator(pi: &Permutation, d: usize) -> CMatrix {
    let map = pi.index_map(d);
    let dim = map.len();
    let mut p = CMatrix::zeros(dim, dim);
    for (i, &m) in map.iter().enumerate() {
        p[(m, i)] = real(1.0);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{max_abs_diff, trace};

    #[test]
    fn validation_and_algebra() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        let all = Permutation::all(4);
        assert_eq!(all.len(), 24);
        assert!(all[0].is_identity());
        for a in &all {
            assert!(a.compose(&a.inverse()).is_identity());
            assert_eq!(a.cycle_type().n(), 4);
        }
    }

    #[test]
    fn swap_operator() {
        let swap = permutation_operator(&Permutation::transposition(2, 0, 1).unwrap(), 2);
        let mut expected = CMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            expected[(i, j)] = real(1.0);
        }
        assert_eq!(swap, expected);
        assert_eq!(trace(&swap).re, 2.0);
    }

    #[test]
    fn operator_is_a_representation() {
        for d in [2, 3] {
            let all = Permutation::all(3);
            for a in &all {
                let pa = permutation_operator(a, d);
                assert_eq!(trace(&pa).re, (d as f64).powi(a.cycle_count() as i32));
                for b in &all {
                    let lhs = &pa * permutation_operator(b, d);
                    let rhs = permutation_operator(&a.compose(b), d);
                    assert!(max_abs_diff(&lhs, &rhs) == 0.0);
                }
            }
        }
    }

    #[test]
    fn moves_factor_to_image_slot() {
        // 3-cycle 0 -> 1 -> 2 -> 0 sends |a b c> to |c a b>
        let pi = Permutation::new(vec![1, 2, 0]).unwrap();
        let map = pi.index_map(2);
        // |1 0 0> = 4 goes to |0 1 0> = 2
        assert_eq!(map[4], 2);
        // |0 0 1> = 1 goes to |1 0 0> = 4
        assert_eq!(map[1], 4);
        let three_cycle_trace = trace(&permutation_operator(&pi, 2)).re;
        assert_eq!(three_cycle_trace, 2.0);
    }
}
