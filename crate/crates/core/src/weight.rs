//! The combinatorial dictionary between dimension vectors `(d, v)`, the
//! `n`-tuple `a(d, v)`, the partition `λ_a`, and the emptiness and dimension
//! criteria on both sides of the correspondence.

use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::partition::Partition;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CombError {
    #[error("Σa = {a_sum} but Σ i·d_i = {n_total}")]
    SumMismatch { a_sum: i64, n_total: i64 },
    #[error("negative entry in {0:?}")]
    NegativeEntry(Vec<i64>),
    #[error("the variety is empty")]
    EmptyVariety,
    #[error("invalid dimension data: {0}")]
    Invalid(String),
}

/// Rank `n` together with the framing vector `d` and dimension vector `v`,
/// both of length `n − 1`. Entries may be negative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DimData {
    pub n: usize,
    pub d: Vec<i64>,
    pub v: Vec<i64>,
}

impl DimData {
    pub fn new(n: usize, d: Vec<i64>, v: Vec<i64>) -> Result<Self, CombError> {
        let dd = DimData { n, d, v };
        dd.validate()?;
        Ok(dd)
    }

    pub fn validate(&self) -> Result<(), CombError> {
        if self.n < 2 {
            return Err(CombError::Invalid(format!("n = {} < 2", self.n)));
        }
        if self.d.len() != self.n - 1 || self.v.len() != self.n - 1 {
            return Err(CombError::Invalid(format!(
                "expected vectors of length {}, got d: {}, v: {}",
                self.n - 1,
                self.d.len(),
                self.v.len()
            )));
        }
        Ok(())
    }

    /// N = Σ i·d_i.
    pub fn total(&self) -> i64 {
        total(&self.d)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.d.iter().chain(&self.v).all(|&x| x >= 0)
    }

    /// `d_i` for the 1-based vertex `i`.
    pub fn d_at(&self, i: usize) -> usize {
        self.d[i - 1] as usize
    }

    /// `v_i` for the 1-based vertex `i`.
    pub fn v_at(&self, i: usize) -> usize {
        self.v[i - 1] as usize
    }

    /// Compact key, e.g. `n=3;d=1,1;v=1,0`.
    pub fn key(&self) -> String {
        let j = |x: &[i64]| x.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
        format!("n={};d={};v={}", self.n, j(&self.d), j(&self.v))
    }
}

fn total(d: &[i64]) -> i64 {
    d.iter().enumerate().map(|(i, &x)| (i as i64 + 1) * x).sum()
}

/// Cartan matrix of type `A_{n−1}`: `2I − adjacency`.
pub fn cartan(n: usize) -> Vec<Vec<i64>> {
    let m = n.saturating_sub(1);
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| match i.abs_diff(j) {
                    0 => 2,
                    1 => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect()
}

/// The `n`-tuple `a(d, v)`.
pub fn a_of(dd: &DimData) -> Vec<i64> {
    let n = dd.n;
    let (d, v) = (&dd.d, &dd.v);
    let tail = |i: usize| -> i64 { d[i - 1..].iter().sum() };
    let mut a = Vec::with_capacity(n);
    a.push(tail(1) - v[0]);
    for i in 2..n {
        a.push(tail(i) - v[i - 1] + v[i - 2]);
    }
    a.push(v[n - 2]);
    a
}

/// Inverse of [`a_of`] for fixed `d`.
pub fn v_of(d: &[i64], a: &[i64]) -> Result<Vec<i64>, CombError> {
    let n = d.len() + 1;
    if a.len() != n {
        return Err(CombError::Invalid(format!(
            "a has length {}, expected {n}",
            a.len()
        )));
    }
    let a_sum: i64 = a.iter().sum();
    let n_total = total(d);
    if a_sum != n_total {
        return Err(CombError::SumMismatch { a_sum, n_total });
    }
    // v_i = a_n + … + a_{i+1} − Σ_{j>i} (j − i) d_j
    Ok((1..n)
        .map(|i| {
            let upper: i64 = a[i..].iter().sum();
            let shift: i64 = (i + 1..n).map(|j| (j - i) as i64 * d[j - 1]).sum();
            upper - shift
        })
        .collect())
}

/// `λ_a = 1^{α₁−α₂} 2^{α₂−α₃} ⋯ n^{α_n}` with `α` the decreasing sort of `a`.
pub fn lambda_of(a: &[i64]) -> Result<Partition, CombError> {
    if a.iter().any(|&x| x < 0) {
        return Err(CombError::NegativeEntry(a.to_vec()));
    }
    let mut alpha = a.to_vec();
    alpha.sort_unstable_by(|x, y| y.cmp(x));
    let mult: Vec<usize> = (0..alpha.len())
        .map(|k| (alpha[k] - alpha.get(k + 1).copied().unwrap_or(0)) as usize)
        .collect();
    Ok(Partition::from_multiplicities(&mult))
}

/// Weakly decreasing reordering of `a` (stable) and the permutation used:
/// `sorted[k] = a[perm[k]]`.
pub fn sort_decreasing(a: &[i64]) -> (Vec<i64>, Vec<usize>) {
    let mut perm: Vec<usize> = (0..a.len()).collect();
    perm.sort_by(|&x, &y| a[y].cmp(&a[x]));
    (perm.iter().map(|&k| a[k]).collect(), perm)
}

/// The Weyl-group representative making `d − v` dominant:
/// `v′ = σ(v − d) + d`, obtained by sorting `a(d, v)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominantForm {
    pub v_prime: Vec<i64>,
    pub sigma: Vec<usize>,
}

pub fn dominant_form(dd: &DimData) -> DominantForm {
    let (sorted, sigma) = sort_decreasing(&a_of(dd));
    let v_prime = v_of(&dd.d, &sorted).expect("sorting preserves the sum");
    DominantForm { v_prime, sigma }
}

/// `M(d, v) ≠ ∅`.
pub fn quiver_nonempty(dd: &DimData) -> bool {
    dd.d.iter().all(|&x| x >= 0) && dominant_form(dd).v_prime.iter().all(|&x| x >= 0)
}

/// `S̃_{a,x} ≠ ∅` for `x` of type `1^{d₁}⋯(n−1)^{d_{n−1}}`: every sum of `k`
/// entries of `a` is bounded by `Σ_j min(j, k)·d_j`.
pub fn slice_nonempty(d: &[i64], a: &[i64]) -> bool {
    if a.iter().any(|&x| x < 0) || d.iter().any(|&x| x < 0) {
        return false;
    }
    let (sorted, _) = sort_decreasing(a);
    let mut top = 0;
    for k in 1..=a.len() {
        top += sorted[k - 1];
        let bound: i64 = d
            .iter()
            .enumerate()
            .map(|(j, &dj)| (j as i64 + 1).min(k as i64) * dj)
            .sum();
        if bound < top {
            return false;
        }
    }
    true
}

/// `dim M(d, v) = 2·vᵀd − vᵀCv`.
pub fn quiver_dim(dd: &DimData) -> Result<i64, CombError> {
    if !quiver_nonempty(dd) {
        return Err(CombError::EmptyVariety);
    }
    let c = cartan(dd.n);
    let v = &dd.v;
    let vd: i64 = v.iter().zip(&dd.d).map(|(a, b)| a * b).sum();
    let vcv: i64 = (0..v.len())
        .map(|i| (0..v.len()).map(|j| v[i] * c[i][j] * v[j]).sum::<i64>())
        .sum();
    Ok(2 * vd - vcv)
}

/// Jordan type `1^{d₁} 2^{d₂} ⋯ (n−1)^{d_{n−1}}` of the nilpotent `x`.
pub fn x_type(d: &[i64]) -> Partition {
    Partition::from_multiplicities(&d.iter().map(|&x| x.max(0) as usize).collect::<Vec<_>>())
}

/// `dim S̃_{a,x} = dim Z(x) − dim Z(u_a)`, with both centralizers computed
/// by exact commutant solves.
pub fn slice_dim(d: &[i64], a: &[i64]) -> Result<i64, CombError> {
    if !slice_nonempty(d, a) {
        return Err(CombError::EmptyVariety);
    }
    let zx = linalg::standard_centralizer_dim(&x_type(d));
    let zu = linalg::standard_centralizer_dim(&lambda_of(a)?);
    Ok(zx as i64 - zu as i64)
}

/// Everything the `comb` command reports for one `(d, v)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombSummary {
    pub a: Vec<i64>,
    pub lambda_a: Option<Partition>,
    pub v_prime: Vec<i64>,
    pub quiver_nonempty: bool,
    pub slice_nonempty: bool,
    pub quiver_dim: Option<i64>,
    pub slice_dim: Option<i64>,
}

pub fn summarize(dd: &DimData) -> CombSummary {
    let a = a_of(dd);
    CombSummary {
        lambda_a: lambda_of(&a).ok(),
        v_prime: dominant_form(dd).v_prime,
        quiver_nonempty: quiver_nonempty(dd),
        slice_nonempty: slice_nonempty(&dd.d, &a),
        quiver_dim: quiver_dim(dd).ok(),
        slice_dim: slice_dim(&dd.d, &a).ok(),
        a,
    }
}
