//! ADHM data on the doubled `A_{n−1}` quiver with framing.
//!
//! Vertices are `1..=n−1`. `A_i: V_i → V_{i+1}` and `B_i: V_{i+1} → V_i` for
//! `1 ≤ i ≤ n−2`, `γ_i: D_i → V_i`, `δ_i: V_i → D_i`. Accessors take 1-based
//! vertex labels; the stored vectors are 0-based.

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::matrix::{LinalgError, Matrix, MatrixJson};
use crate::rational::Rational;
use crate::sample::{self, SeededRng};
use crate::weight::{CombError, DimData};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuiverError {
    #[error("data does not satisfy the ADHM relations")]
    NotAdmissible,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("unsatisfiable: {0}")]
    Unsatisfiable(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Comb(#[from] CombError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ADHMData {
    pub dims: DimData,
    pub a: Vec<Matrix>,
    pub b: Vec<Matrix>,
    pub gamma: Vec<Matrix>,
    pub delta: Vec<Matrix>,
}

impl ADHMData {
    /// All-zero data of the given dimensions.
    pub fn zero(dims: &DimData) -> Result<Self, QuiverError> {
        check_dims(dims)?;
        let n = dims.n;
        let v = |i: usize| dims.v_at(i);
        let d = |i: usize| dims.d_at(i);
        Ok(ADHMData {
            a: (1..n - 1).map(|i| Matrix::zeros(v(i + 1), v(i))).collect(),
            b: (1..n - 1).map(|i| Matrix::zeros(v(i), v(i + 1))).collect(),
            gamma: (1..n).map(|i| Matrix::zeros(v(i), d(i))).collect(),
            delta: (1..n).map(|i| Matrix::zeros(d(i), v(i))).collect(),
            dims: dims.clone(),
        })
    }

    pub fn new(
        dims: DimData,
        a: Vec<Matrix>,
        b: Vec<Matrix>,
        gamma: Vec<Matrix>,
        delta: Vec<Matrix>,
    ) -> Result<Self, QuiverError> {
        let z = ADHMData { dims, a, b, gamma, delta };
        z.check_shapes()?;
        Ok(z)
    }

    pub fn n(&self) -> usize {
        self.dims.n
    }

    pub fn v(&self, i: usize) -> usize {
        self.dims.v_at(i)
    }

    pub fn d(&self, i: usize) -> usize {
        self.dims.d_at(i)
    }

    /// `A_i`, `1 ≤ i ≤ n−2`.
    pub fn a(&self, i: usize) -> &Matrix {
        &self.a[i - 1]
    }

    /// `B_i`, `1 ≤ i ≤ n−2`.
    pub fn b(&self, i: usize) -> &Matrix {
        &self.b[i - 1]
    }

    /// `γ_i`, `1 ≤ i ≤ n−1`.
    pub fn gamma(&self, i: usize) -> &Matrix {
        &self.gamma[i - 1]
    }

    /// `δ_i`, `1 ≤ i ≤ n−1`.
    pub fn delta(&self, i: usize) -> &Matrix {
        &self.delta[i - 1]
    }

    pub fn check_shapes(&self) -> Result<(), QuiverError> {
        check_dims(&self.dims)?;
        let n = self.n();
        let count = |what: &str, got: usize, want: usize| {
            if got == want {
                Ok(())
            } else {
                Err(QuiverError::ShapeMismatch(format!("{got} {what} maps, expected {want}")))
            }
        };
        count("A", self.a.len(), n - 2)?;
        count("B", self.b.len(), n - 2)?;
        count("gamma", self.gamma.len(), n - 1)?;
        count("delta", self.delta.len(), n - 1)?;
        let expect = |name: String, m: &Matrix, shape: (usize, usize)| {
            if m.shape() == shape {
                Ok(())
            } else {
                Err(QuiverError::ShapeMismatch(format!(
                    "{name} is {:?}, expected {shape:?}",
                    m.shape()
                )))
            }
        };
        for i in 1..n - 1 {
            expect(format!("A_{i}"), self.a(i), (self.v(i + 1), self.v(i)))?;
            expect(format!("B_{i}"), self.b(i), (self.v(i), self.v(i + 1)))?;
        }
        for i in 1..n {
            expect(format!("gamma_{i}"), self.gamma(i), (self.v(i), self.d(i)))?;
            expect(format!("delta_{i}"), self.delta(i), (self.d(i), self.v(i)))?;
        }
        Ok(())
    }

    /// `A_{i−1} B_{i−1}` on `V_i`, zero for `i = 1`.
    fn ab_before(&self, i: usize) -> Matrix {
        if i >= 2 {
            self.a(i - 1).mul(self.b(i - 1))
        } else {
            Matrix::zeros(self.v(i), self.v(i))
        }
    }

    /// `B_i A_i` on `V_i`, zero for `i = n−1`.
    fn ba_at(&self, i: usize) -> Matrix {
        if i + 1 < self.n() {
            self.b(i).mul(self.a(i))
        } else {
            Matrix::zeros(self.v(i), self.v(i))
        }
    }

    /// `γ_iδ_i + A_{i−1}B_{i−1} − B_iA_i` on `V_i`; zero at every vertex
    /// exactly when the data is admissible.
    pub fn adhm_defect(&self, i: usize) -> Matrix {
        let mut m = self.gamma(i).mul(self.delta(i));
        m.add_scaled(&Rational::one(), &self.ab_before(i));
        m.add_scaled(&-Rational::one(), &self.ba_at(i));
        m
    }

    pub fn to_json(&self) -> AdhmJson {
        AdhmJson {
            n: self.dims.n,
            d: self.dims.d.clone(),
            v: self.dims.v.clone(),
            a: self.a.clone(),
            b: self.b.clone(),
            gamma: self.gamma.clone(),
            delta: self.delta.clone(),
        }
    }
}

fn check_dims(dims: &DimData) -> Result<(), QuiverError> {
    dims.validate()?;
    if !dims.is_nonnegative() {
        return Err(CombError::NegativeEntry([dims.d.clone(), dims.v.clone()].concat()).into());
    }
    Ok(())
}

/// On-disk form of [`ADHMData`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdhmJson {
    pub n: usize,
    pub d: Vec<i64>,
    pub v: Vec<i64>,
    #[serde(rename = "A")]
    pub a: Vec<Matrix>,
    #[serde(rename = "B")]
    pub b: Vec<Matrix>,
    pub gamma: Vec<Matrix>,
    pub delta: Vec<Matrix>,
}

impl AdhmJson {
    pub fn into_data(self) -> Result<ADHMData, QuiverError> {
        let dims = DimData::new(self.n, self.d, self.v)?;
        check_dims(&dims)?;
        let v = |i: usize| dims.v_at(i);
        let d = |i: usize| dims.d_at(i);
        let fit = |ms: Vec<Matrix>, shape: &dyn Fn(usize) -> (usize, usize)| {
            ms.into_iter()
                .enumerate()
                .map(|(k, m)| {
                    let (r, c) = shape(k + 1);
                    MatrixJson::conform(m, r, c)
                })
                .collect::<Result<Vec<_>, _>>()
        };
        let n = dims.n;
        let count = |got: usize, want: usize| {
            if got == want {
                Ok(())
            } else {
                Err(QuiverError::ShapeMismatch(format!("{got} maps, expected {want}")))
            }
        };
        count(self.a.len(), n - 2)?;
        count(self.b.len(), n - 2)?;
        count(self.gamma.len(), n - 1)?;
        count(self.delta.len(), n - 1)?;
        let a = fit(self.a, &|i| (v(i + 1), v(i)))?;
        let b = fit(self.b, &|i| (v(i), v(i + 1)))?;
        let gamma = fit(self.gamma, &|i| (v(i), d(i)))?;
        let delta = fit(self.delta, &|i| (d(i), v(i)))?;
        ADHMData::new(dims, a, b, gamma, delta)
    }
}

impl Serialize for ADHMData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ADHMData {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        AdhmJson::deserialize(d)?.into_data().map_err(serde::de::Error::custom)
    }
}

/// `(g_1, …, g_{n−1})` with `g_i ∈ GL(V_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GLVElement {
    pub g: Vec<Matrix>,
}

impl GLVElement {
    pub fn new(g: Vec<Matrix>) -> Result<Self, QuiverError> {
        for (k, m) in g.iter().enumerate() {
            if !m.is_square() || m.rank() != m.rows() {
                return Err(QuiverError::ShapeMismatch(format!("g_{} is not invertible", k + 1)));
            }
        }
        Ok(GLVElement { g })
    }

    pub fn identity(dims: &DimData) -> Self {
        GLVElement { g: (1..dims.n).map(|i| Matrix::identity(dims.v_at(i))).collect() }
    }

    pub fn random(dims: &DimData, rng: &mut SeededRng) -> Self {
        GLVElement { g: (1..dims.n).map(|i| sample::invertible(rng, dims.v_at(i), 2)).collect() }
    }

    /// `g_i`, 1-based.
    pub fn at(&self, i: usize) -> &Matrix {
        &self.g[i - 1]
    }

    /// Componentwise product `self · other`.
    pub fn compose(&self, other: &GLVElement) -> GLVElement {
        GLVElement { g: self.g.iter().zip(&other.g).map(|(x, y)| x.mul(y)).collect() }
    }

    pub fn inverse(&self) -> GLVElement {
        GLVElement {
            g: self.g.iter().map(|m| m.inverse().expect("invertible by construction")).collect(),
        }
    }
}

pub fn check_admissible(z: &ADHMData) -> bool {
    (1..z.n()).all(|i| z.adhm_defect(i).is_zero())
}

/// `γ_{j→i} = B_i ⋯ B_{j−1} γ_j : D_j → V_i` for `i ≤ j`.
pub fn composite_gamma(z: &ADHMData, j: usize, i: usize) -> Matrix {
    assert!(i <= j, "composite_gamma needs i ≤ j");
    let mut m = z.gamma(j).clone();
    for k in (i..j).rev() {
        m = z.b(k).mul(&m);
    }
    m
}

/// `δ_{j→i} = δ_i A_{i−1} ⋯ A_j : V_j → D_i` for `j ≤ i`.
pub fn composite_delta(z: &ADHMData, j: usize, i: usize) -> Matrix {
    assert!(j <= i, "composite_delta needs j ≤ i");
    let mut m = z.delta(i).clone();
    for k in (j..i).rev() {
        m = m.mul(z.a(k));
    }
    m
}

fn require_admissible(z: &ADHMData) -> Result<(), QuiverError> {
    if check_admissible(z) {
        Ok(())
    } else {
        Err(QuiverError::NotAdmissible)
    }
}

/// Stability through the surjectivity criterion:
/// `Im A_{i−1} + Σ_{j ≥ i} Im γ_{j→i} = V_i` at every vertex.
pub fn check_stable_criterion(z: &ADHMData) -> Result<bool, QuiverError> {
    require_admissible(z)?;
    Ok(stable_criterion_unchecked(z))
}

pub(crate) fn stable_criterion_unchecked(z: &ADHMData) -> bool {
    (1..z.n()).all(|i| {
        let mut parts: Vec<Matrix> = (i..z.n()).map(|j| composite_gamma(z, j, i)).collect();
        if i >= 2 {
            parts.push(z.a(i - 1).clone());
        }
        let refs: Vec<&Matrix> = parts.iter().collect();
        Matrix::hcat(&refs).rank() == z.v(i)
    })
}

/// Stability from the definition: the smallest `A,B`-invariant collection
/// containing every `Im γ_i`, grown to a fixed point, must be all of `V`.
pub fn check_stable_definition(z: &ADHMData) -> Result<bool, QuiverError> {
    require_admissible(z)?;
    let n = z.n();
    let mut u: Vec<Matrix> = (1..n).map(|i| z.gamma(i).column_space()).collect();
    loop {
        let mut grew = false;
        for i in 1..n - 1 {
            let up = z.a(i).mul(&u[i - 1]);
            let down = z.b(i).mul(&u[i]);
            for (slot, img) in [(i, up), (i - 1, down)] {
                let joined = Matrix::hcat(&[&u[slot], &img]).column_space();
                if joined.cols() > u[slot].cols() {
                    u[slot] = joined;
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    Ok((1..n).all(|i| u[i - 1].cols() == z.v(i)))
}

/// `g · z = (g_{i+1} A_i g_i⁻¹, g_i B_i g_{i+1}⁻¹, g_i γ_i, δ_i g_i⁻¹)`.
pub fn act(g: &GLVElement, z: &ADHMData) -> Result<ADHMData, QuiverError> {
    let n = z.n();
    if g.g.len() != n - 1 || (1..n).any(|i| g.at(i).shape() != (z.v(i), z.v(i))) {
        return Err(QuiverError::ShapeMismatch("group element does not match V".into()));
    }
    let inv = g.inverse();
    Ok(ADHMData {
        dims: z.dims.clone(),
        a: (1..n - 1).map(|i| g.at(i + 1).mul(z.a(i)).mul(inv.at(i))).collect(),
        b: (1..n - 1).map(|i| g.at(i).mul(z.b(i)).mul(inv.at(i + 1))).collect(),
        gamma: (1..n).map(|i| g.at(i).mul(z.gamma(i))).collect(),
        delta: (1..n).map(|i| z.delta(i).mul(inv.at(i))).collect(),
    })
}

/// Index triples `(i, j, l)` with `l ≤ min(i, j)`, lexicographic.
pub fn signature_indices(n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 1..n {
        for j in 1..n {
            for l in 1..=i.min(j) {
                out.push((i, j, l));
            }
        }
    }
    out
}

/// `δ_{l→j} γ_{i→l}` for every index of [`signature_indices`].
pub fn invariant_signature(z: &ADHMData) -> Result<Vec<Matrix>, QuiverError> {
    require_admissible(z)?;
    Ok(signature_indices(z.n())
        .into_iter()
        .map(|(i, j, l)| composite_delta(z, l, j).mul(&composite_gamma(z, i, l)))
        .collect())
}

/// Hex SHA-256 of the JSON-serialized signature.
pub fn signature_hash(sig: &[Matrix]) -> String {
    let bytes = serde_json::to_vec(sig).expect("matrices serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Knobs shared by the seeded generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenOptions {
    /// Entries are drawn from `[-max_entry, max_entry]`.
    pub max_entry: i64,
    pub retries: usize,
    /// Upper bound on the rank of the freely drawn part of each `γ_iδ_i`.
    pub rank_budget: Option<usize>,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions { max_entry: 3, retries: 64, rank_budget: None }
    }
}

/// Random stable data with `B = 0` and `δ = 0`.
pub fn gen_lagrangian(dims: &DimData, seed: u64) -> Result<ADHMData, QuiverError> {
    gen_lagrangian_with(dims, seed, &GenOptions::default())
}

pub fn gen_lagrangian_with(dims: &DimData, seed: u64, opts: &GenOptions) -> Result<ADHMData, QuiverError> {
    check_dims(dims)?;
    // with B = 0 stability reads Im A_{i−1} + Im γ_i = V_i
    for i in 1..dims.n {
        let below = if i >= 2 { dims.v_at(i - 1) } else { 0 };
        if dims.v_at(i) > below + dims.d_at(i) {
            return Err(QuiverError::Unsatisfiable(format!(
                "v_{i} = {} exceeds v_{} + d_{i} = {}",
                dims.v_at(i),
                i - 1,
                below + dims.d_at(i)
            )));
        }
    }
    let mut rng = sample::rng(seed);
    let mut z = ADHMData::zero(dims)?;
    for _ in 0..opts.retries.max(1) {
        for i in 1..dims.n - 1 {
            z.a[i - 1] = sample::matrix(&mut rng, dims.v_at(i + 1), dims.v_at(i), opts.max_entry);
        }
        for i in 1..dims.n {
            z.gamma[i - 1] = sample::matrix(&mut rng, dims.v_at(i), dims.d_at(i), opts.max_entry);
        }
        if stable_criterion_unchecked(&z) {
            return Ok(z);
        }
    }
    Err(QuiverError::Unsatisfiable(format!("no stable draw in {} attempts", opts.retries)))
}

/// Random admissible data, typically with `B, δ ≠ 0`. Not necessarily stable.
pub fn gen_general(dims: &DimData, seed: u64, rank_budget: Option<usize>) -> Result<ADHMData, QuiverError> {
    gen_general_with(dims, seed, &GenOptions { rank_budget, ..GenOptions::default() })
}

pub fn gen_general_with(dims: &DimData, seed: u64, opts: &GenOptions) -> Result<ADHMData, QuiverError> {
    check_dims(dims)?;
    let mut rng = sample::rng(seed);
    for attempt in 0..opts.retries.max(1) {
        // mostly the full construction, in either direction; the degenerate
        // strategies always succeed and keep the generator total
        let z = match attempt % 4 {
            0 => forward(dims, &mut rng, opts),
            1 => reverse_dims(dims)
                .and_then(|r| forward(&r, &mut rng, opts))
                .map(|r| reverse(&r)),
            2 if attempt >= 2 => Some(b_zero(dims, &mut rng, opts)),
            3 if attempt >= 3 => Some(a_zero(dims, &mut rng, opts)),
            _ => None,
        };
        if let Some(z) = z {
            debug_assert!(check_admissible(&z));
            return Ok(z);
        }
    }
    Err(QuiverError::Unsatisfiable(format!("no admissible draw in {} attempts", opts.retries)))
}

/// Builds `B_1, B_2, …` in order so that each vertex defect has rank at most
/// `d_i` and factors it as `γ_iδ_i`. The last vertex only works when
/// `rank(A_{n−2}B_{n−2}) ≤ d_{n−1}`; `None` otherwise.
fn forward(dims: &DimData, rng: &mut SeededRng, opts: &GenOptions) -> Option<ADHMData> {
    let n = dims.n;
    let e = opts.max_entry;
    let budget = opts.rank_budget.unwrap_or(usize::MAX);
    let mut z = ADHMData::zero(dims).ok()?;
    for i in 1..n - 1 {
        z.a[i - 1] = sample::matrix(rng, dims.v_at(i + 1), dims.v_at(i), e);
    }
    for i in 1..n - 1 {
        let (vi, di) = (dims.v_at(i), dims.d_at(i));
        let a = z.a(i).clone();
        let p = z.ab_before(i);
        // B_iA_i = P + γδ is solvable iff (P + γδ) vanishes on ker A_i
        let k = a.kernel_matrix();
        let r = p.mul(&k).scale(&-Rational::one());
        let rank = r.rank();
        if rank > di {
            return None;
        }
        let (g, h) = r.rank_factorize(rank).ok()?;
        let k_left = k.generalized_inverse();
        let free = (di - rank).min(budget);
        let mut gamma = Matrix::zeros(vi, di);
        gamma.set_block(0, 0, &g);
        gamma.set_block(0, rank, &sample::matrix(rng, vi, free, e));
        let mut top = Matrix::zeros(di, k.cols());
        top.set_block(0, 0, &h);
        // rows of N·A_i vanish on ker A_i
        let mut delta = top.mul(&k_left);
        delta.add_scaled(&Rational::one(), &sample::matrix(rng, di, a.rows(), e).mul(&a));
        let target = &p + &gamma.mul(&delta);
        // add W with W A_i = 0 to make B_i generic among solutions
        let left_ker = a.transpose().kernel_matrix().transpose();
        let mut b = target.mul(&a.generalized_inverse());
        b.add_scaled(&Rational::one(), &sample::matrix(rng, vi, left_ker.rows(), e).mul(&left_ker));
        debug_assert_eq!(b.mul(&a), target);
        z.b[i - 1] = b;
        z.gamma[i - 1] = gamma;
        z.delta[i - 1] = delta;
    }
    let last = n - 1;
    let c = z.ab_before(last).scale(&-Rational::one());
    let (g, d) = factor_into(rng, &c, dims.d_at(last), e)?;
    z.gamma[last - 1] = g;
    z.delta[last - 1] = d;
    Some(z)
}

/// `c = γδ` with inner dimension `k`, padding the rank factorization with a
/// random zero product.
fn factor_into(rng: &mut SeededRng, c: &Matrix, k: usize, e: i64) -> Option<(Matrix, Matrix)> {
    let r = c.rank();
    if r > k {
        return None;
    }
    let (g, h) = c.rank_factorize(r).ok()?;
    let (g2, h2) = sample::zero_product(rng, c.rows(), k - r, c.cols(), e);
    Some((Matrix::hcat(&[&g, &g2]), Matrix::vcat(&[&h, &h2])))
}

/// Which family of maps a one-sided sample leaves at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroSide {
    A,
    B,
}

/// Admissible data with all `A` (or all `B`) zero and `γ_iδ_i = 0`. On such
/// data every composite `δ_{r→j}γ_{j′→r}` vanishes unless `r = j` (resp. `r = j′`).
pub fn gen_one_sided(dims: &DimData, seed: u64, side: ZeroSide) -> Result<ADHMData, QuiverError> {
    dims.validate()?;
    if !dims.is_nonnegative() {
        return Err(QuiverError::ShapeMismatch("negative dimension".into()));
    }
    let opts = GenOptions::default();
    let mut rng = sample::rng(seed);
    Ok(match side {
        ZeroSide::A => a_zero(dims, &mut rng, &opts),
        ZeroSide::B => b_zero(dims, &mut rng, &opts),
    })
}

fn b_zero(dims: &DimData, rng: &mut SeededRng, opts: &GenOptions) -> ADHMData {
    let mut z = ADHMData::zero(dims).expect("dims checked");
    for i in 1..dims.n - 1 {
        z.a[i - 1] = sample::matrix(rng, dims.v_at(i + 1), dims.v_at(i), opts.max_entry);
    }
    fill_zero_products(&mut z, rng, opts);
    z
}

fn a_zero(dims: &DimData, rng: &mut SeededRng, opts: &GenOptions) -> ADHMData {
    let mut z = ADHMData::zero(dims).expect("dims checked");
    for i in 1..dims.n - 1 {
        z.b[i - 1] = sample::matrix(rng, dims.v_at(i), dims.v_at(i + 1), opts.max_entry);
    }
    fill_zero_products(&mut z, rng, opts);
    z
}

fn fill_zero_products(z: &mut ADHMData, rng: &mut SeededRng, opts: &GenOptions) {
    for i in 1..z.n() {
        let (g, h) = sample::zero_product(rng, z.v(i), z.d(i), z.v(i), opts.max_entry);
        // the kernel side of the draw lands on γ or δ with equal odds
        let (gamma, delta) = if rng.gen_bool(0.5) { (g, h) } else { (h.transpose(), g.transpose()) };
        z.gamma[i - 1] = gamma;
        z.delta[i - 1] = delta;
    }
}

fn reverse_dims(dims: &DimData) -> Option<DimData> {
    let mut d = dims.d.clone();
    let mut v = dims.v.clone();
    d.reverse();
    v.reverse();
    DimData::new(dims.n, d, v).ok()
}

/// The duality reversing the vertices: `A′_k = A_{n−1−k}ᵀ`,
/// `B′_k = B_{n−1−k}ᵀ`, `γ′_k = −δ_{n−k}ᵀ`, `δ′_k = γ_{n−k}ᵀ`. It carries
/// admissible data to admissible data for the reversed dimension vectors.
pub fn reverse(z: &ADHMData) -> ADHMData {
    let n = z.n();
    let dims = reverse_dims(&z.dims).expect("reversal keeps shapes valid");
    ADHMData {
        a: (1..n - 1).map(|k| z.a(n - 1 - k).transpose()).collect(),
        b: (1..n - 1).map(|k| z.b(n - 1 - k).transpose()).collect(),
        gamma: (1..n).map(|k| z.delta(n - k).transpose().scale(&-Rational::one())).collect(),
        delta: (1..n).map(|k| z.gamma(n - k).transpose()).collect(),
        dims,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(d: &[i64], v: &[i64]) -> DimData {
        DimData::new(d.len() + 1, d.to_vec(), v.to_vec()).unwrap()
    }

    fn m(x: i64) -> Matrix {
        Matrix::from_i64(&[&[x]])
    }

    pub(crate) fn hand_example() -> ADHMData {
        ADHMData::new(dims(&[1, 1], &[1, 1]), vec![m(1)], vec![m(1)], vec![m(1), m(1)], vec![m(1), m(-1)])
            .unwrap()
    }

    #[test]
    fn admissibility_examples() {
        let dd = dims(&[1, 2], &[2, 1]);
        assert!(check_admissible(&ADHMData::zero(&dd).unwrap()));
        let mut rng = sample::rng(1);
        let mut z = ADHMData::zero(&dd).unwrap();
        z.a[0] = sample::matrix(&mut rng, 1, 2, 3);
        z.gamma[0] = sample::matrix(&mut rng, 2, 1, 3);
        z.gamma[1] = sample::matrix(&mut rng, 1, 2, 3);
        assert!(check_admissible(&z));
        assert!(check_admissible(&hand_example()));
        let mut bad = hand_example();
        bad.delta[1] = m(1);
        assert!(!check_admissible(&bad));
    }

    #[test]
    fn composites() {
        let z = hand_example();
        assert_eq!(composite_gamma(&z, 2, 1), m(1));
        assert_eq!(composite_gamma(&z, 2, 2), m(1));
        assert_eq!(composite_delta(&z, 1, 2), m(-1));
        assert_eq!(composite_delta(&z, 1, 1), m(1));
        let dd = dims(&[1, 1, 1], &[1, 2, 1]);
        let z = gen_lagrangian(&dd, 3).unwrap();
        assert!(composite_gamma(&z, 3, 1).is_zero());
        assert!(composite_delta(&z, 1, 3).is_zero());
        let z = gen_general(&dd, 5, None).unwrap();
        for j in 1..4 {
            for i in 1..j {
                assert_eq!(composite_gamma(&z, j, i), z.b(i).mul(&composite_gamma(&z, j, i + 1)));
            }
        }
    }

    #[test]
    fn stability_examples() {
        let dd = dims(&[2, 1], &[0, 0]);
        let z = ADHMData::zero(&dd).unwrap();
        assert!(check_stable_criterion(&z).unwrap());
        assert!(check_stable_definition(&z).unwrap());
        let dd = dims(&[2, 1], &[2, 1]);
        let mut z = ADHMData::zero(&dd).unwrap();
        assert!(!check_stable_criterion(&z).unwrap());
        assert!(!check_stable_definition(&z).unwrap());
        z.gamma[0] = Matrix::identity(2);
        z.gamma[1] = Matrix::identity(1);
        assert!(check_stable_criterion(&z).unwrap());
        assert!(check_stable_definition(&z).unwrap());
        let hand = hand_example();
        assert!(check_stable_criterion(&hand).unwrap());
        assert!(check_stable_definition(&hand).unwrap());
        let mut bad = hand_example();
        bad.b[0] = m(2);
        assert_eq!(check_stable_criterion(&bad), Err(QuiverError::NotAdmissible));
    }

    #[test]
    fn stability_needs_the_b_maps() {
        // V_1 is reached only through B_1 γ_2
        let dd = dims(&[0, 1], &[1, 1]);
        let z = ADHMData::new(dd, vec![m(0)], vec![m(1)], vec![Matrix::zeros(1, 0), m(1)], vec![Matrix::zeros(0, 1), m(0)])
            .unwrap();
        assert!(check_admissible(&z));
        assert!(check_stable_criterion(&z).unwrap());
        assert!(check_stable_definition(&z).unwrap());
    }

    #[test]
    fn group_action() {
        let dd = dims(&[1, 2, 1], &[2, 2, 1]);
        let z = gen_general(&dd, 11, None).unwrap();
        assert_eq!(act(&GLVElement::identity(&dd), &z).unwrap(), z);
        let mut rng = sample::rng(2);
        let g = GLVElement::random(&dd, &mut rng);
        let h = GLVElement::random(&dd, &mut rng);
        assert_eq!(act(&g, &act(&h, &z).unwrap()).unwrap(), act(&g.compose(&h), &z).unwrap());
        let gz = act(&g, &z).unwrap();
        assert!(check_admissible(&gz));
        assert_eq!(invariant_signature(&gz).unwrap(), invariant_signature(&z).unwrap());
        assert_eq!(check_stable_criterion(&gz), check_stable_criterion(&z));
        let two = GLVElement { g: (1..4).map(|i| Matrix::scalar(dd.v_at(i), &Rational::from_int(2))).collect() };
        let tz = act(&two, &z).unwrap();
        assert_eq!(tz.a, z.a);
        assert_eq!(tz.b, z.b);
        assert_eq!(tz.gamma[0], z.gamma[0].scale(&Rational::from_int(2)));
        assert_eq!(tz.delta[0], z.delta[0].scale(&Rational::new(1, 2)));
    }

    #[test]
    fn signature_examples() {
        assert_eq!(signature_indices(3), vec![(1, 1, 1), (1, 2, 1), (2, 1, 1), (2, 2, 1), (2, 2, 2)]);
        let sig = invariant_signature(&hand_example()).unwrap();
        assert_eq!(sig[0], m(1));
        let dd = dims(&[1, 1], &[1, 1]);
        assert!(invariant_signature(&ADHMData::zero(&dd).unwrap()).unwrap().iter().all(Matrix::is_zero));
        assert_eq!(signature_hash(&sig).len(), 64);
    }

    #[test]
    fn lagrangian_generator() {
        let z = gen_lagrangian(&dims(&[1, 1], &[0, 0]), 0).unwrap();
        assert_eq!(z, ADHMData::zero(&dims(&[1, 1], &[0, 0])).unwrap());
        let z = gen_lagrangian(&dims(&[1, 1], &[1, 1]), 0).unwrap();
        assert!(check_stable_criterion(&z).unwrap());
        assert!(matches!(gen_lagrangian(&dims(&[0, 1], &[2, 1]), 0), Err(QuiverError::Unsatisfiable(_))));
        assert_eq!(gen_lagrangian(&dims(&[2, 1], &[2, 2]), 9), gen_lagrangian(&dims(&[2, 1], &[2, 2]), 9));
    }

    #[test]
    fn general_generator_is_admissible_and_covers_nonzero_delta() {
        let mut saw_delta = false;
        let mut saw_b = false;
        for (d, v) in [(&[1, 1][..], &[1, 1][..]), (&[2, 0, 1], &[2, 2, 1]), (&[1, 1, 1, 1], &[1, 2, 2, 1]), (&[2], &[1])] {
            let dd = dims(d, v);
            for seed in 0..20 {
                let z = gen_general(&dd, seed, None).unwrap();
                assert!(check_admissible(&z));
                assert_eq!(check_stable_criterion(&z), check_stable_definition(&z));
                saw_delta |= z.delta.iter().any(|x| !x.is_zero());
                saw_b |= z.b.iter().any(|x| !x.is_zero());
            }
        }
        assert!(saw_delta && saw_b);
    }

    #[test]
    fn reversal_is_an_involution_up_to_sign() {
        let dd = dims(&[1, 2, 1], &[1, 2, 2]);
        let z = gen_general(&dd, 4, None).unwrap();
        let r = reverse(&z);
        assert!(check_admissible(&r));
        let rr = reverse(&r);
        assert_eq!(rr.a, z.a);
        assert_eq!(rr.gamma, z.gamma.iter().map(|g| g.scale(&-Rational::one())).collect::<Vec<_>>());
    }

    #[test]
    fn json_roundtrip() {
        let z = gen_general(&dims(&[0, 2], &[0, 1]), 3, None).unwrap();
        let s = serde_json::to_string(&z).unwrap();
        let back: ADHMData = serde_json::from_str(&s).unwrap();
        assert_eq!(back, z);
        let s = serde_json::to_string(&hand_example()).unwrap();
        assert!(s.contains("\"A\":[[[\"1\"]]]"));
    }
}
