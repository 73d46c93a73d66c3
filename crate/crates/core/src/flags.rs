//! The framing `d = (N, 0, …, 0)`: stable data correspond to pairs `(u, F)`
//! of a partial flag `0 = F_0 ⊂ F_1 ⊂ ⋯ ⊂ F_n = D` and a nilpotent `u` with
//! `u(F_i) ⊆ F_{i−1}`.
//!
//! The forward map is `u = δ₁γ₁` (first `γ₁: D → V₁`, then `δ₁: V₁ → D`) and
//! `F_i = ker(A_{i−1}⋯A₁γ₁)`. The inverse realizes `V_i = D/F_i` through an
//! annihilator `Q_i` (kernel exactly `F_i`) and a right inverse `S_i`:
//! `γ₁ = Q₁`, `A_i = Q_{i+1}S_i`, `δ₁ = uS₁`, `B_i = Q_i u S_{i+1}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::matrix::{LinalgError, Matrix, MatrixJson};
use crate::quiver::{self, ADHMData, GLVElement, QuiverError};
use crate::sample;
use crate::weight::{self, DimData};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlagError {
    #[error("data is not stable")]
    NotStable,
    #[error("framing is not concentrated at vertex 1")]
    WrongFraming,
    #[error("invalid flag: {0}")]
    InvalidFlag(String),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Canonical basis of a column space: the transposed reduced row echelon
/// form, so equal subspaces give equal matrices.
pub fn canonical_basis(m: &Matrix) -> Matrix {
    let (r, pivots) = m.transpose().rref();
    let rows: Vec<usize> = (0..pivots.len()).collect();
    let cols: Vec<usize> = (0..m.rows()).collect();
    r.select(&rows, &cols).transpose()
}

/// `F_1 ⊂ ⋯ ⊂ F_n = D` inside `D = ℚ^N`, each as a canonical basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialFlag {
    pub big_n: usize,
    pub a: Vec<usize>,
    pub spaces: Vec<Matrix>,
}

impl PartialFlag {
    pub fn new(big_n: usize, spaces: Vec<Matrix>) -> Result<Self, FlagError> {
        if spaces.is_empty() {
            return Err(FlagError::InvalidFlag("no subspaces".into()));
        }
        let spaces: Vec<Matrix> = spaces
            .into_iter()
            .map(|m| {
                if m.rows() != big_n {
                    Err(FlagError::InvalidFlag(format!("basis has {} rows, expected {big_n}", m.rows())))
                } else {
                    Ok(canonical_basis(&m))
                }
            })
            .collect::<Result<_, _>>()?;
        let mut a = Vec::with_capacity(spaces.len());
        let mut prev = 0;
        for (k, w) in spaces.iter().enumerate() {
            if k > 0 && !spaces[k - 1].column_space_within(w) {
                return Err(FlagError::InvalidFlag(format!("F_{k} is not contained in F_{}", k + 1)));
            }
            a.push(w.cols() - prev);
            prev = w.cols();
        }
        if prev != big_n {
            return Err(FlagError::InvalidFlag("last subspace is not the whole space".into()));
        }
        Ok(PartialFlag { big_n, a, spaces })
    }

    /// Number of steps `n`.
    pub fn len(&self) -> usize {
        self.spaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spaces.is_empty()
    }

    /// `F_i`, with `F_0 = 0`.
    pub fn space(&self, i: usize) -> Matrix {
        if i == 0 {
            Matrix::zeros(self.big_n, 0)
        } else {
            self.spaces[i - 1].clone()
        }
    }

    /// `Q_i`: rows spanning the annihilator of `F_i`.
    fn annihilator(&self, i: usize) -> Matrix {
        let f = self.space(i);
        if f.cols() == 0 {
            return Matrix::identity(self.big_n);
        }
        canonical_basis(&f.transpose().kernel_matrix()).transpose()
    }

    /// `v_i = N − dim F_i`, `1 ≤ i ≤ n−1`.
    pub fn dims(&self) -> DimData {
        let n = self.len();
        let mut d = vec![0i64; n - 1];
        d[0] = self.big_n as i64;
        let v = (1..n).map(|i| (self.big_n - self.spaces[i - 1].cols()) as i64).collect();
        DimData { n, d, v }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagPair {
    pub u: Matrix,
    pub flag: PartialFlag,
}

impl FlagPair {
    pub fn new(u: Matrix, flag: PartialFlag) -> Result<Self, FlagError> {
        let p = FlagPair { u, flag };
        p.validate()?;
        Ok(p)
    }

    /// `u(F_i) ⊆ F_{i−1}` for every `i`.
    pub fn validate(&self) -> Result<(), FlagError> {
        let big_n = self.flag.big_n;
        if self.u.shape() != (big_n, big_n) {
            return Err(FlagError::InvalidFlag("u has the wrong shape".into()));
        }
        for i in 1..=self.flag.len() {
            let image = self.u.mul(&self.flag.space(i));
            if !self.flag.annihilator(i - 1).mul(&image).is_zero() {
                return Err(FlagError::InvalidFlag(format!("u(F_{i}) is not inside F_{}", i - 1)));
            }
        }
        Ok(())
    }
}

/// pair.json: `{u, flag: [F_1, …, F_n]}`.
#[derive(Serialize, Deserialize)]
struct PairJson {
    u: Matrix,
    flag: Vec<Matrix>,
}

impl Serialize for FlagPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PairJson { u: self.u.clone(), flag: self.flag.spaces.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FlagPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = PairJson::deserialize(d)?;
        let big_n = raw.u.rows();
        let u = MatrixJson::conform(raw.u, big_n, big_n).map_err(serde::de::Error::custom)?;
        let flag = PartialFlag::new(big_n, raw.flag).map_err(serde::de::Error::custom)?;
        FlagPair::new(u, flag).map_err(serde::de::Error::custom)
    }
}

fn require_flag_framing(z: &ADHMData) -> Result<(), FlagError> {
    if z.dims.d.iter().skip(1).any(|&x| x != 0) {
        return Err(FlagError::WrongFraming);
    }
    Ok(())
}

/// `A_{i−1}⋯A₁γ₁ : D → V_i`.
fn to_vertex(z: &ADHMData, i: usize) -> Matrix {
    let mut m = z.gamma(1).clone();
    for k in 1..i {
        m = z.a(k).mul(&m);
    }
    m
}

pub fn flag_of_data(z: &ADHMData) -> Result<FlagPair, FlagError> {
    require_flag_framing(z)?;
    if !quiver::check_stable_criterion(z)? {
        return Err(FlagError::NotStable);
    }
    let n = z.n();
    let big_n = z.d(1);
    let mut spaces: Vec<Matrix> = (1..n).map(|i| to_vertex(z, i).kernel_matrix()).collect();
    spaces.push(Matrix::identity(big_n));
    let flag = PartialFlag::new(big_n, spaces)?;
    let pair = FlagPair::new(z.delta(1).mul(z.gamma(1)), flag)?;
    let want = weight::a_of(&z.dims);
    if pair.flag.a.iter().zip(&want).any(|(&x, &y)| x as i64 != y) {
        return Err(FlagError::InvalidFlag(format!("flag type {:?}, expected {want:?}", pair.flag.a)));
    }
    Ok(pair)
}

pub fn data_of_flag(p: &FlagPair) -> Result<ADHMData, FlagError> {
    p.validate()?;
    let n = p.flag.len();
    if n < 2 {
        return Err(FlagError::InvalidFlag("need at least two steps".into()));
    }
    let q: Vec<Matrix> = (1..n).map(|i| p.flag.annihilator(i)).collect();
    let s: Vec<Matrix> = q.iter().map(Matrix::generalized_inverse).collect();
    let dims = p.flag.dims();
    let mut z = ADHMData::zero(&dims)?;
    z.gamma[0] = q[0].clone();
    z.delta[0] = p.u.mul(&s[0]);
    for i in 1..n - 1 {
        z.a[i - 1] = q[i].mul(&s[i - 1]);
        z.b[i - 1] = q[i - 1].mul(&p.u).mul(&s[i]);
    }
    z.check_shapes()?;
    Ok(z)
}

/// The `g ∈ G_V` with `g·z = data_of_flag(flag_of_data(z))`, after checking
/// that it does carry `z` there.
pub fn gauge_to_normal_form(z: &ADHMData) -> Result<GLVElement, FlagError> {
    let p = flag_of_data(z)?;
    let w = data_of_flag(&p)?;
    let g: Vec<Matrix> = (1..z.n())
        .map(|i| p.flag.annihilator(i).mul(&to_vertex(z, i).generalized_inverse()))
        .collect();
    let g = GLVElement::new(g)?;
    if quiver::act(&g, z)? != w {
        return Err(FlagError::InvalidFlag("normal form is not in the orbit".into()));
    }
    Ok(g)
}

/// A seeded pair of type `a`: the coordinate flag and a strictly block upper
/// triangular `u`, both moved by one random change of basis.
pub fn gen_flag_pair(a: &[usize], seed: u64) -> FlagPair {
    let big_n: usize = a.iter().sum();
    let mut rng = sample::rng(seed);
    let p = sample::invertible(&mut rng, big_n, 2);
    let block: Vec<usize> = a.iter().enumerate().flat_map(|(k, &ak)| std::iter::repeat_n(k, ak)).collect();
    let mut u = Matrix::zeros(big_n, big_n);
    for r in 0..big_n {
        for c in 0..big_n {
            if block[r] < block[c] {
                u.set(r, c, rng.gen_range(-3i64..=3).into());
            }
        }
    }
    let u = p.mul(&u).mul(&p.inverse().expect("invertible by construction"));
    let mut spaces = Vec::with_capacity(a.len());
    let mut top = 0;
    for &ak in a {
        top += ak;
        spaces.push(p.block(0, 0, big_n, top));
    }
    let flag = PartialFlag::new(big_n, spaces).expect("coordinate flag");
    FlagPair::new(u, flag).expect("u respects the flag")
}

/// `jordan_type(u) ⪯ λ_a`.
pub fn within_orbit_closure(p: &FlagPair) -> Result<bool, FlagError> {
    let ju = linalg::jordan_type(&p.u)?;
    let a: Vec<i64> = p.flag.a.iter().map(|&x| x as i64).collect();
    let la = weight::lambda_of(&a).map_err(|e| FlagError::InvalidFlag(e.to_string()))?;
    Ok(ju.dominated_by(&la))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Partition;
    use crate::phi;

    #[test]
    fn trivial_cases() {
        let dims = DimData::new(3, vec![2, 0], vec![0, 0]).unwrap();
        let p = flag_of_data(&ADHMData::zero(&dims).unwrap()).unwrap();
        assert!(p.u.is_zero());
        assert_eq!(p.flag.a, vec![2, 0, 0]);
        let p = gen_flag_pair(&[3], 1);
        assert!(p.u.is_zero());
        let p = gen_flag_pair(&[2, 0, 3], 0);
        let z = data_of_flag(&FlagPair::new(Matrix::zeros(5, 5), p.flag).unwrap()).unwrap();
        assert!(z.b.iter().all(Matrix::is_zero) && z.delta(1).is_zero());
    }

    /// `γ₁ = [1 0]`, `δ₁ = [0 1]ᵀ`: `u = δ₁γ₁` has `u² = 0`, `F₁ = ker γ₁ = ⟨e₂⟩`.
    #[test]
    fn two_by_two() {
        let dims = DimData::new(2, vec![2], vec![1]).unwrap();
        let z = ADHMData::new(dims, vec![], vec![], vec![Matrix::from_i64(&[&[1, 0]])], vec![Matrix::from_i64(&[&[0], &[1]])])
            .unwrap();
        let p = flag_of_data(&z).unwrap();
        assert_eq!(p.u, Matrix::from_i64(&[&[0, 0], &[1, 0]]));
        assert_eq!(p.flag.spaces[0], Matrix::from_i64(&[&[0], &[1]]));
        assert!(p.u.mul(&p.u).is_zero());
        let p = gen_flag_pair(&[1, 1], 4);
        assert!(p.u.mul(&p.u).is_zero() && p.u.rank() <= 1);
    }

    #[test]
    fn regular_full_flag() {
        let u = Matrix::from_fn(4, 4, |r, c| if c == r + 1 { 1i64.into() } else { 0i64.into() });
        let spaces = (1..=4).map(|k| Matrix::identity(4).block(0, 0, 4, k)).collect();
        let p = FlagPair::new(u, PartialFlag::new(4, spaces).unwrap()).unwrap();
        let z = data_of_flag(&p).unwrap();
        assert_eq!(z.dims.v, vec![3, 2, 1]);
        assert!(quiver::check_stable_criterion(&z).unwrap());
        assert_eq!(flag_of_data(&z).unwrap(), p);
    }

    #[test]
    fn roundtrips_on_samples() {
        for a in [&[1usize, 1, 1][..], &[2, 1, 2], &[0, 2, 1, 1], &[3, 0, 2], &[1, 2, 2, 1]] {
            for seed in 0..8 {
                let p = gen_flag_pair(a, seed);
                assert!(within_orbit_closure(&p).unwrap());
                let z = data_of_flag(&p).unwrap();
                assert!(quiver::check_admissible(&z));
                assert!(quiver::check_stable_criterion(&z).unwrap());
                assert_eq!(flag_of_data(&z).unwrap(), p);
                gauge_to_normal_form(&z).unwrap();
                let t = phi::phi(&z).unwrap();
                assert_eq!(phi::slice_point(&t).unwrap(), p.u);
                assert!(phi::tilde_stability(&t).unwrap());
            }
        }
    }

    #[test]
    fn maximal_type_is_reached() {
        for a in [&[1usize, 1, 1][..], &[2, 1, 2], &[1, 3, 2]] {
            let la = weight::lambda_of(&a.iter().map(|&x| x as i64).collect::<Vec<_>>()).unwrap();
            let hit = (0..20).any(|s| linalg::jordan_type(&gen_flag_pair(a, s).u).unwrap() == la);
            assert!(hit, "{a:?}");
        }
        assert_eq!(weight::lambda_of(&[2, 1, 2]).unwrap(), Partition::new(vec![3, 2]));
    }

    #[test]
    fn rejects_bad_input() {
        let dims = DimData::new(3, vec![1, 1], vec![1, 1]).unwrap();
        assert_eq!(flag_of_data(&ADHMData::zero(&dims).unwrap()), Err(FlagError::WrongFraming));
        let dims = DimData::new(3, vec![2, 0], vec![1, 0]).unwrap();
        assert_eq!(flag_of_data(&ADHMData::zero(&dims).unwrap()), Err(FlagError::NotStable));
        let flag = PartialFlag::new(2, vec![Matrix::from_i64(&[&[1], &[0]]), Matrix::identity(2)]).unwrap();
        assert!(FlagPair::new(Matrix::from_i64(&[&[0, 1], &[0, 0]]), flag.clone()).is_ok());
        assert!(FlagPair::new(Matrix::from_i64(&[&[0, 0], &[1, 0]]), flag).is_err());
        let json = serde_json::to_string(&gen_flag_pair(&[1, 2], 3)).unwrap();
        let back: FlagPair = serde_json::from_str(&json).unwrap();
        assert_eq!(back, gen_flag_pair(&[1, 2], 3));
    }
}
