use std::fmt;

use serde::{Deserialize, Serialize};

/// A partition: weakly decreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Sorts the parts and drops zeros.
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Partition with `mult[k-1]` parts equal to `k`.
    pub fn from_multiplicities(mult: &[usize]) -> Self {
        let mut parts = Vec::new();
        for (k, &m) in mult.iter().enumerate().rev() {
            parts.extend(std::iter::repeat_n(k + 1, m));
        }
        Partition(parts)
    }

    /// The conjugate partition (column lengths of the Young diagram).
    pub fn conjugate(&self) -> Partition {
        let max = self.0.first().copied().unwrap_or(0);
        Partition((1..=max).map(|k| self.0.iter().filter(|&&p| p >= k).count()).collect())
    }

    /// Dominance order: `self ⪯ other` iff every partial sum of `self` is at
    /// most the matching partial sum of `other` (totals must agree).
    pub fn dominated_by(&self, other: &Partition) -> bool {
        if self.total() != other.total() {
            return false;
        }
        let len = self.len().max(other.len());
        let (mut a, mut b) = (0, 0);
        for k in 0..len {
            a += self.0.get(k).copied().unwrap_or(0);
            b += other.0.get(k).copied().unwrap_or(0);
            if a > b {
                return false;
            }
        }
        true
    }

    /// Σ_{i,j} min(λ_i, λ_j), the centralizer dimension of a nilpotent of
    /// this Jordan type.
    pub fn centralizer_formula(&self) -> usize {
        self.0
            .iter()
            .map(|&a| self.0.iter().map(|&b| a.min(b)).sum::<usize>())
            .sum()
    }

    /// All partitions of `n`, in reverse lexicographic order.
    pub fn all(n: usize) -> Vec<Partition> {
        fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=rest.min(max)).rev() {
                cur.push(p);
                rec(rest - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}
