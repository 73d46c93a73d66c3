//! The embedding `Φ` of ADHM data for `(d, v)` into transversal data for the
//! framing `d̃ = (N, 0, …, 0)`, its inverse, and the checks on its image.
//!
//! Level `i` of the tilde quiver is `Ṽ_i = V_i ⊕ ⊕ D_j^{(k)}` over
//! `i+1 ≤ j ≤ n−1`, `1 ≤ k ≤ j−i`, with `V_0 = 0` so that `Ṽ_0 = D̃`. Slots are
//! stored V first, then `(j, k)` lexicographically. `Ã_i: Ṽ_i → Ṽ_{i+1}` and
//! `B̃_i: Ṽ_{i+1} → Ṽ_i` for `0 ≤ i ≤ n−2`, where `Ã_0 = γ̃_1`, `B̃_0 = δ̃_1`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::linalg::{self, AffineSolver};
use crate::matrix::{LinalgError, Matrix, MatrixJson};
use crate::partition::Partition;
use crate::quiver::{self, composite_delta, composite_gamma, ADHMData, GLVElement, QuiverError};
use crate::rational::Rational;
use crate::weight::{self, DimData};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PhiError {
    #[error("data does not satisfy the ADHM relations")]
    NotAdmissible,
    #[error("not transversal: {0}")]
    NotTransversal(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    V,
    D { j: usize, k: usize },
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::V => write!(f, "V"),
            Slot::D { j, k } => write!(f, "D{j}^({k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotInfo {
    pub slot: Slot,
    pub offset: usize,
    pub dim: usize,
}

/// Slot decomposition of every `Ṽ_i`, `0 ≤ i ≤ n−1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TildeLayout {
    pub n: usize,
    pub d: Vec<usize>,
    pub v: Vec<usize>,
    levels: Vec<Vec<SlotInfo>>,
}

impl TildeLayout {
    pub fn new(dims: &DimData) -> Result<Self, PhiError> {
        dims.validate().map_err(|e| PhiError::ShapeMismatch(e.to_string()))?;
        if !dims.is_nonnegative() {
            return Err(PhiError::ShapeMismatch("negative dimension".into()));
        }
        let n = dims.n;
        let d: Vec<usize> = dims.d.iter().map(|&x| x as usize).collect();
        let v: Vec<usize> = dims.v.iter().map(|&x| x as usize).collect();
        let mut levels = Vec::with_capacity(n);
        for i in 0..n {
            let vi = if i == 0 { 0 } else { v[i - 1] };
            let mut slots = vec![SlotInfo { slot: Slot::V, offset: 0, dim: vi }];
            let mut offset = vi;
            for j in i + 1..n {
                for k in 1..=j - i {
                    slots.push(SlotInfo { slot: Slot::D { j, k }, offset, dim: d[j - 1] });
                    offset += d[j - 1];
                }
            }
            levels.push(slots);
        }
        Ok(TildeLayout { n, d, v, levels })
    }

    pub fn dims(&self) -> DimData {
        DimData {
            n: self.n,
            d: self.d.iter().map(|&x| x as i64).collect(),
            v: self.v.iter().map(|&x| x as i64).collect(),
        }
    }

    /// `d_j`, 1-based.
    pub fn d_at(&self, j: usize) -> usize {
        self.d[j - 1]
    }

    /// `dim V_i`, with `V_0 = 0`.
    pub fn v_at(&self, i: usize) -> usize {
        if i == 0 {
            0
        } else {
            self.v[i - 1]
        }
    }

    /// `Ñ = Σ j·d_j`.
    pub fn n_total(&self) -> usize {
        self.d.iter().enumerate().map(|(k, &x)| (k + 1) * x).sum()
    }

    /// `ṽ_i = v_i + Σ_{j>i} (j−i) d_j`.
    pub fn dim(&self, i: usize) -> usize {
        self.levels[i].last().map_or(0, |s| s.offset + s.dim)
    }

    pub fn slots(&self, i: usize) -> &[SlotInfo] {
        &self.levels[i]
    }

    pub fn slot(&self, i: usize, slot: Slot) -> Option<&SlotInfo> {
        let pos = match slot {
            Slot::V => 0,
            Slot::D { j, k } if j > i && j < self.n && (1..=j - i).contains(&k) => 1 + (j - i - 1) * (j - i) / 2 + k - 1,
            Slot::D { .. } => return None,
        };
        self.levels.get(i).map(|l| &l[pos])
    }

    fn info(&self, i: usize, slot: Slot) -> &SlotInfo {
        self.slot(i, slot).unwrap_or_else(|| panic!("no slot {slot} at level {i}"))
    }

    /// Coordinates of `D′_i`, the D-part of `Ṽ_i`; contiguous after `V_i`.
    pub fn d_prime(&self, i: usize) -> std::ops::Range<usize> {
        self.v_at(i)..self.dim(i)
    }

    fn coords(&self, i: usize, slots: &[Slot]) -> Vec<usize> {
        slots
            .iter()
            .flat_map(|&s| {
                let info = self.info(i, s);
                info.offset..info.offset + info.dim
            })
            .collect()
    }

    /// Slots of `D⁺_i`: `j ≥ i+2`, `2 ≤ k ≤ j−i`.
    pub fn d_plus(&self, i: usize) -> Vec<Slot> {
        (i + 2..self.n).flat_map(|j| (2..=j - i).map(move |k| Slot::D { j, k })).collect()
    }

    /// Slots of `D⁻_i`: `j ≥ i+2`, `1 ≤ k ≤ j−i−1`.
    pub fn d_minus(&self, i: usize) -> Vec<Slot> {
        (i + 2..self.n).flat_map(|j| (1..j - i).map(move |k| Slot::D { j, k })).collect()
    }

    /// Slots of `D_i^{l,(h)} = ⊕_{0 ≤ h″ ≤ h, j ≥ i+1+l+h″} D_j^{(j−i−h″)}`.
    pub fn filtration(&self, i: usize, l: usize, h: usize) -> Vec<Slot> {
        let mut out = Vec::new();
        for hh in 0..=h {
            for j in i + 1 + l + hh..self.n {
                out.push(Slot::D { j, k: j - i - hh });
            }
        }
        out.sort();
        out
    }
}

/// deg and grad of a block position. `source = (j′, h′)`, `target = (j, h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    T,
    S,
}

pub fn deg_grad(kind: BlockKind, j: usize, h: usize, jp: usize, hp: usize) -> (i64, i64) {
    let (j, h, jp, hp) = (j as i64, h as i64, jp as i64, hp as i64);
    match kind {
        BlockKind::T => ((h - hp + 1).min(h - hp + 1 + jp - j), 2 * h - 2 * hp + 2 + jp - j),
        BlockKind::S => ((h - hp).min(h - hp + jp - j), 2 * h - 2 * hp + jp - j),
    }
}

/// Index `r` of the monomial `δ_{r→j} γ_{j′→r}` carried by a block.
pub fn monomial_index(kind: BlockKind, j: usize, h: usize, hp: usize) -> i64 {
    let r = j as i64 + hp as i64 - h as i64;
    match kind {
        BlockKind::T => r,
        BlockKind::S => r + 1,
    }
}

/// What the transversality rules say about one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Zero,
    Identity,
    /// Unconstrained by transversality; `Some(deg)` for D-to-D blocks.
    Free(Option<i64>),
}

/// Rule for `π_target Ã_i |_source`, target at level `i+1`, source at `i`.
pub fn t_rule(target: Slot, source: Slot) -> Rule {
    match (target, source) {
        (Slot::D { j, k: h }, Slot::D { j: jp, k: hp }) => {
            let (deg, _) = deg_grad(BlockKind::T, j, h, jp, hp);
            match deg {
                d if d < 0 => Rule::Zero,
                0 if (jp, hp) == (j, h + 1) => Rule::Identity,
                0 => Rule::Zero,
                d => Rule::Free(Some(d)),
            }
        }
        (Slot::D { .. }, Slot::V) => Rule::Zero,
        (Slot::V, Slot::D { k: hp, .. }) if hp != 1 => Rule::Zero,
        _ => Rule::Free(None),
    }
}

/// Rule for `π_target B̃_i |_source`, target at level `i`, source at `i+1`.
pub fn s_rule(i: usize, target: Slot, source: Slot) -> Rule {
    match (target, source) {
        (Slot::D { j, k: h }, Slot::D { j: jp, k: hp }) => {
            let (deg, _) = deg_grad(BlockKind::S, j, h, jp, hp);
            match deg {
                d if d < 0 => Rule::Zero,
                0 if (jp, hp) == (j, h) => Rule::Identity,
                0 => Rule::Zero,
                d => Rule::Free(Some(d)),
            }
        }
        (Slot::D { j, k: h }, Slot::V) if h != j - i => Rule::Zero,
        (Slot::V, Slot::D { .. }) => Rule::Zero,
        _ => Rule::Free(None),
    }
}

/// `Ã`, `B̃` on a [`TildeLayout`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TildeData {
    pub layout: TildeLayout,
    pub atil: Vec<Matrix>,
    pub btil: Vec<Matrix>,
}

impl TildeData {
    pub fn zero(layout: TildeLayout) -> Self {
        let n = layout.n;
        let atil = (0..n - 1).map(|i| Matrix::zeros(layout.dim(i + 1), layout.dim(i))).collect();
        let btil = (0..n - 1).map(|i| Matrix::zeros(layout.dim(i), layout.dim(i + 1))).collect();
        TildeData { layout, atil, btil }
    }

    pub fn n(&self) -> usize {
        self.layout.n
    }

    /// `π_target Ã_i |_source`.
    pub fn t_block(&self, i: usize, target: Slot, source: Slot) -> Matrix {
        let (r, c) = (self.layout.info(i + 1, target), self.layout.info(i, source));
        self.atil[i].block(r.offset, c.offset, r.dim, c.dim)
    }

    /// `π_target B̃_i |_source`.
    pub fn s_block(&self, i: usize, target: Slot, source: Slot) -> Matrix {
        let (r, c) = (self.layout.info(i, target), self.layout.info(i + 1, source));
        self.btil[i].block(r.offset, c.offset, r.dim, c.dim)
    }

    pub fn set_t_block(&mut self, i: usize, target: Slot, source: Slot, m: &Matrix) {
        let (r, c) = (self.layout.info(i + 1, target).offset, self.layout.info(i, source).offset);
        self.atil[i].set_block(r, c, m);
    }

    pub fn set_s_block(&mut self, i: usize, target: Slot, source: Slot, m: &Matrix) {
        let (r, c) = (self.layout.info(i, target).offset, self.layout.info(i + 1, source).offset);
        self.btil[i].set_block(r, c, m);
    }

    /// The same maps read as ADHM data for `d̃ = (Ñ, 0, …, 0)`, `ṽ`.
    pub fn as_adhm(&self) -> Result<ADHMData, PhiError> {
        let n = self.n();
        let mut d = vec![0i64; n - 1];
        d[0] = self.layout.n_total() as i64;
        let v = (1..n).map(|i| self.layout.dim(i) as i64).collect();
        let dims = DimData::new(n, d, v).map_err(QuiverError::from)?;
        let mut z = ADHMData::zero(&dims)?;
        z.a = self.atil[1..].to_vec();
        z.b = self.btil[1..].to_vec();
        z.gamma[0] = self.atil[0].clone();
        z.delta[0] = self.btil[0].clone();
        z.check_shapes()?;
        Ok(z)
    }

    /// `π_{D′_i} B̃_i Ã_i |_{D′_i} − x_i`.
    pub fn level_defect(&self, i: usize) -> Matrix {
        let r = self.layout.d_prime(i);
        let ba = self.btil[i].mul_slabs(r.start, r.len(), &self.atil[i], r.start, r.len());
        &ba - &sl2_of_level(&self.layout, i).x
    }
}

/// The standard `sl₂` triple on `D′_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SL2Triple {
    pub level: usize,
    pub x: Matrix,
    pub y: Matrix,
    pub h: Matrix,
}

impl SL2Triple {
    pub fn is_sl2(&self) -> bool {
        self.x.commutator(&self.y) == self.h
            && self.h.commutator(&self.x) == self.x.scale(&Rational::from_int(2))
            && self.h.commutator(&self.y) == self.y.scale(&Rational::from_int(-2))
    }
}

/// `x_i: D_j^{(h)} → D_j^{(h−1)}` by the identity, `y_i: D_j^{(h)} → D_j^{(h+1)}`
/// by `h(j−i−h)`, `h_i = [x_i, y_i]`.
pub fn sl2_of_level(layout: &TildeLayout, i: usize) -> SL2Triple {
    let base = layout.v_at(i);
    let size = layout.dim(i) - base;
    let mut x = Matrix::zeros(size, size);
    let mut y = Matrix::zeros(size, size);
    for j in i + 1..layout.n {
        let dj = layout.d_at(j);
        for h in 1..=j - i {
            let at = |k: usize| layout.info(i, Slot::D { j, k }).offset - base;
            if h > 1 {
                x.set_block(at(h - 1), at(h), &Matrix::identity(dj));
            }
            if h < j - i {
                let c = Rational::from_int((h * (j - i - h)) as i64);
                y.set_block(at(h + 1), at(h), &Matrix::scalar(dj, &c));
            }
        }
    }
    let h = x.commutator(&y);
    SL2Triple { level: i, x, y, h }
}

/// Fills every block fixed by transversality and by the prescribed
/// `a_i, b_i, γ_{j′→i+1}, δ_{i+1→j}` blocks.
fn fixed_part(z: &ADHMData, layout: &TildeLayout) -> TildeData {
    let n = layout.n;
    let mut t = TildeData::zero(layout.clone());
    for i in 0..n - 1 {
        if i >= 1 {
            t.set_t_block(i, Slot::V, Slot::V, z.a(i));
            t.set_s_block(i, Slot::V, Slot::V, z.b(i));
        }
        for jp in i + 1..n {
            t.set_t_block(i, Slot::V, Slot::D { j: jp, k: 1 }, &composite_gamma(z, jp, i + 1));
            t.set_s_block(i, Slot::D { j: jp, k: jp - i }, Slot::V, &composite_delta(z, i + 1, jp));
        }
        for j in i + 2..n {
            let id = Matrix::identity(layout.d_at(j));
            for h in 1..j - i {
                t.set_t_block(i, Slot::D { j, k: h }, Slot::D { j, k: h + 1 }, &id);
                t.set_s_block(i, Slot::D { j, k: h }, Slot::D { j, k: h }, &id);
            }
        }
    }
    t
}

/// `left[rows, :] · right[:, cols]` for slot ranges.
fn block_product(left: &Matrix, rows: &SlotInfo, right: &Matrix, cols: &SlotInfo) -> Matrix {
    left.mul_slabs(rows.offset, rows.dim, right, cols.offset, cols.dim)
}

/// Index data of one `(j, j′)` group at a given level and degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Group {
    pub i: usize,
    pub j: usize,
    pub jp: usize,
    pub deg: usize,
    pub h0: usize,
    pub h1: usize,
    /// `h′ = h + k`.
    pub k: i64,
}

impl Group {
    pub fn hp(&self, h: usize) -> usize {
        (h as i64 + self.k) as usize
    }

    pub fn alpha(&self, h: usize) -> i64 {
        let hp = self.hp(h) as i64;
        hp * (self.jp as i64 - self.i as i64 - hp)
    }

    pub fn beta(&self, h: usize) -> i64 {
        let h = h as i64;
        h * (self.j as i64 - self.i as i64 - h)
    }

    pub fn len(&self) -> usize {
        self.h1 + 1 - self.h0
    }

    pub fn is_empty(&self) -> bool {
        self.h1 < self.h0
    }
}

/// Largest positive deg of a free block at level `i`.
pub fn max_deg(n: usize, i: usize) -> usize {
    n.saturating_sub(i + 2)
}

/// The unknown groups at level `i` and degree `deg`, in `(j, j′)` order.
pub fn groups(n: usize, i: usize, deg: usize) -> Vec<Group> {
    let mut out = Vec::new();
    for j in i + 2..n {
        for jp in i + 2..n {
            let h1 = j - i - 1;
            let (h0, k) = if jp >= j {
                (deg as i64, 1 - deg as i64)
            } else {
                ((deg + j - jp) as i64, 1 + jp as i64 - j as i64 - deg as i64)
            };
            if h0 <= h1 as i64 {
                out.push(Group { i, j, jp, deg, h0: h0 as usize, h1, k });
            }
        }
    }
    out
}

/// `Φ(z)`: the unique transversal datum with `a_i = A_i`, `b_i = B_i`,
/// `t^{j′,1}_{i,V} = γ_{j′→i+1}`, `s^V_{i,j,j−i} = δ_{i+1→j}` satisfying the
/// tilde ADHM relations.
pub fn phi(z: &ADHMData) -> Result<TildeData, PhiError> {
    if !quiver::check_admissible(z) {
        return Err(PhiError::NotAdmissible);
    }
    let layout = TildeLayout::new(&z.dims)?;
    let n = layout.n;
    let mut t = fixed_part(z, &layout);
    for i in (0..n.saturating_sub(2)).rev() {
        for deg in 1..=max_deg(n, i) {
            let mut solved = Vec::new();
            for g in groups(n, i, deg) {
                let (dj, djp) = (layout.d_at(g.j), layout.d_at(g.jp));
                if dj == 0 || djp == 0 {
                    continue;
                }
                solved.push((g, solve_group(&t, &g)?));
            }
            for (g, xs) in solved {
                let m = g.len();
                for h in g.h0..=g.h1 {
                    let hp = g.hp(h);
                    let src = Slot::D { j: g.jp, k: hp };
                    t.set_t_block(i, Slot::D { j: g.j, k: h }, src, &xs[h - g.h0]);
                    t.set_s_block(i, Slot::D { j: g.j, k: h + 1 }, src, &xs[m + h - g.h0]);
                }
            }
        }
    }
    Ok(t)
}

/// Solves one group: unknowns `X_h = T^{j′,h′}_{i,j,h}` (index `h − h0`) and
/// `Y_h = S^{j′,h′}_{i,j,h+1}` (index `m + h − h0`), all deg-`d` blocks of
/// the group still zero in `t`.
fn solve_group(t: &TildeData, g: &Group) -> Result<Vec<Matrix>, PhiError> {
    let lay = &t.layout;
    let i = g.i;
    let m = g.len();
    let shape = (lay.d_at(g.j), lay.d_at(g.jp));
    let (a_i, b_i) = (&t.atil[i], &t.btil[i]);
    let (a_next, b_next) = (&t.atil[i + 1], &t.btil[i + 1]);
    let mut rhs = Vec::with_capacity(2 * m);
    // Ã_iB̃_i = B̃_{i+1}Ã_{i+1} on the block (j′,h′) → (j,h) of Ṽ_{i+1}
    for h in g.h0..=g.h1 {
        let hp = g.hp(h);
        let (row, col) = (lay.info(i + 1, Slot::D { j: g.j, k: h }), lay.info(i + 1, Slot::D { j: g.jp, k: hp }));
        let l = block_product(b_next, row, a_next, col);
        let m0 = block_product(a_i, row, b_i, col);
        rhs.push(&l - &m0);
    }
    // x_i only has identity blocks D_j^{(h+1)} → D_j^{(h)}
    let n0 = |target: Slot, source: Slot| {
        let (row, col) = (lay.info(i, target), lay.info(i, source));
        let mut p = block_product(b_i, row, a_i, col);
        if let (Slot::D { j, k: h }, Slot::D { j: jp, k: hp }) = (target, source) {
            if j == jp && hp == h + 1 {
                p = &p - &Matrix::identity(row.dim);
            }
        }
        p
    };
    // α_h N^{j′,h′+1}_{j,h+1} = β_h N^{j′,h′}_{j,h}
    for h in g.h0..=g.h1 {
        let hp = g.hp(h);
        let (alpha, beta) = (Rational::from_int(g.alpha(h)), Rational::from_int(g.beta(h)));
        let e = n0(Slot::D { j: g.j, k: h }, Slot::D { j: g.jp, k: hp });
        let f = n0(Slot::D { j: g.j, k: h + 1 }, Slot::D { j: g.jp, k: hp + 1 });
        let mut r = e.scale(&beta);
        r.add_scaled(&-alpha, &f);
        rhs.push(r);
    }
    let solver = group_solver(g)?;
    let refs: Vec<&Matrix> = rhs.iter().collect();
    Ok(solver.solve(shape, &refs)?)
}

/// Scalar coefficients of a group's system. Unknown `h − h0` is `X_h`,
/// unknown `m + h − h0` is `Y_h`; with `Z_h = Y_h + X_{h+1}` the rows are
/// `X_h + Y_h` and `α_h Z_h − β_h Z_{h−1}`.
fn group_terms(g: &Group) -> Vec<Vec<(usize, Rational)>> {
    let m = g.len();
    let x_idx = |h: usize| h - g.h0;
    let y_idx = |h: usize| m + h - g.h0;
    let one = Rational::one();
    let mut rows: Vec<Vec<(usize, Rational)>> =
        (g.h0..=g.h1).map(|h| vec![(x_idx(h), one.clone()), (y_idx(h), one.clone())]).collect();
    for h in g.h0..=g.h1 {
        let (alpha, beta) = (Rational::from_int(g.alpha(h)), Rational::from_int(g.beta(h)));
        let mut terms = vec![(y_idx(h), alpha.clone())];
        if h < g.h1 {
            terms.push((x_idx(h + 1), alpha));
        }
        terms.push((x_idx(h), -beta.clone()));
        if h > g.h0 {
            terms.push((y_idx(h - 1), -beta));
        }
        rows.push(terms);
    }
    rows
}

thread_local! {
    static SOLVERS: RefCell<HashMap<(usize, usize, usize, usize), Rc<AffineSolver>>> = RefCell::new(HashMap::new());
}

/// The reduced scalar system of a group; it depends only on the indices, so
/// each is reduced once per thread.
fn group_solver(g: &Group) -> Result<Rc<AffineSolver>, LinalgError> {
    let key = (g.i, g.j, g.jp, g.deg);
    if let Some(s) = SOLVERS.with(|c| c.borrow().get(&key).cloned()) {
        return Ok(s);
    }
    let s = Rc::new(AffineSolver::new(2 * g.len(), group_terms(g))?);
    SOLVERS.with(|c| c.borrow_mut().insert(key, s.clone()));
    Ok(s)
}

/// First violated rule, if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransversalReport {
    pub ok: bool,
    pub violation: Option<String>,
}

pub fn check_transversal(t: &TildeData) -> TransversalReport {
    let fail = |msg: String| TransversalReport { ok: false, violation: Some(msg) };
    let lay = &t.layout;
    if t.atil.len() + 1 != lay.n || t.btil.len() + 1 != lay.n {
        return fail("wrong number of maps".into());
    }
    for i in 0..lay.n - 1 {
        if t.atil[i].shape() != (lay.dim(i + 1), lay.dim(i)) || t.btil[i].shape() != (lay.dim(i), lay.dim(i + 1)) {
            return fail(format!("level {i}: wrong shapes"));
        }
        for tgt in lay.slots(i + 1) {
            for src in lay.slots(i) {
                if let Some(msg) = violates(t_rule(tgt.slot, src.slot), &t.atil[i], tgt, src) {
                    return fail(format!("t block of A~_{i} from {} to {}: {msg}", src.slot, tgt.slot));
                }
            }
        }
        for tgt in lay.slots(i) {
            for src in lay.slots(i + 1) {
                if let Some(msg) = violates(s_rule(i, tgt.slot, src.slot), &t.btil[i], tgt, src) {
                    return fail(format!("s block of B~_{i} from {} to {}: {msg}", src.slot, tgt.slot));
                }
            }
        }
        let y = sl2_of_level(lay, i).y;
        if !t.level_defect(i).commutator(&y).is_zero() {
            return fail(format!("level {i}: [pi B~A~ - x, y] != 0"));
        }
    }
    TransversalReport { ok: true, violation: None }
}

fn violates(rule: Rule, m: &Matrix, tgt: &SlotInfo, src: &SlotInfo) -> Option<&'static str> {
    let (r0, c0, nr, nc) = (tgt.offset, src.offset, tgt.dim, src.dim);
    match rule {
        Rule::Zero if !m.block_is_zero(r0, c0, nr, nc) => Some("expected zero"),
        Rule::Identity if !m.block_is_identity(r0, c0, nr, nc) => Some("expected identity"),
        _ => None,
    }
}

/// `Ã_iB̃_i = B̃_{i+1}Ã_{i+1}` for `i ≤ n−3` and `Ã_{n−2}B̃_{n−2} = 0`.
pub fn check_tilde_adhm(t: &TildeData) -> bool {
    let n = t.n();
    (0..n - 1).all(|i| {
        let lhs = t.atil[i].mul(&t.btil[i]);
        if i + 2 < n {
            lhs == t.btil[i + 1].mul(&t.atil[i + 1])
        } else {
            lhs.is_zero()
        }
    })
}

/// Transversal and admissible: membership in `T`.
pub fn in_t(t: &TildeData) -> Result<(), PhiError> {
    let rep = check_transversal(t);
    if !rep.ok {
        return Err(PhiError::NotTransversal(rep.violation.unwrap_or_default()));
    }
    if !check_tilde_adhm(t) {
        return Err(PhiError::NotTransversal("tilde ADHM relations fail".into()));
    }
    Ok(())
}

/// `a_i = A_i`, `b_i = B_i`, `t^{j′,1}_{i,V} = γ_{j′→i+1}`, `s^V_{i,j,j−i} = δ_{i+1→j}`.
pub fn check_phi_equations(z: &ADHMData, t: &TildeData) -> bool {
    let n = z.n();
    if t.layout.dims() != z.dims {
        return false;
    }
    (0..n - 1).all(|i| {
        (i == 0 || (t.t_block(i, Slot::V, Slot::V) == *z.a(i) && t.s_block(i, Slot::V, Slot::V) == *z.b(i)))
            && (i + 1..n).all(|jp| {
                t.t_block(i, Slot::V, Slot::D { j: jp, k: 1 }) == composite_gamma(z, jp, i + 1)
                    && t.s_block(i, Slot::D { j: jp, k: jp - i }, Slot::V) == composite_delta(z, i + 1, jp)
            })
    })
}

/// `Φ⁻¹`: reads `A, B, γ, δ` off the V-blocks.
pub fn phi_inverse(t: &TildeData) -> Result<ADHMData, PhiError> {
    in_t(t)?;
    let n = t.n();
    let dims = t.layout.dims();
    let mut z = ADHMData::zero(&dims)?;
    for i in 1..n - 1 {
        z.a[i - 1] = t.t_block(i, Slot::V, Slot::V);
        z.b[i - 1] = t.s_block(i, Slot::V, Slot::V);
    }
    for i in 1..n {
        z.gamma[i - 1] = t.t_block(i - 1, Slot::V, Slot::D { j: i, k: 1 });
        z.delta[i - 1] = t.s_block(i - 1, Slot::D { j: i, k: 1 }, Slot::V);
    }
    Ok(z)
}

/// Stability of tilde data: every `Ã_i` is onto.
pub fn tilde_stability(t: &TildeData) -> Result<bool, PhiError> {
    in_t(t)?;
    Ok((0..t.n() - 1).all(|i| t.atil[i].rank() == t.layout.dim(i + 1)))
}

/// `u = B̃_0Ã_0 = δ̃_1γ̃_1` on `D̃`.
pub fn slice_point(t: &TildeData) -> Result<Matrix, PhiError> {
    in_t(t)?;
    Ok(t.btil[0].mul(&t.atil[0]))
}

/// Checks on a slice point `u` against the level-0 triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceReport {
    pub nilpotent: bool,
    pub in_slice: bool,
    pub jordan_type: Option<Partition>,
    pub lambda_a: Option<Partition>,
    pub dominated: Option<bool>,
}

pub fn slice_report(layout: &TildeLayout, u: &Matrix) -> SliceReport {
    let sl2 = sl2_of_level(layout, 0);
    let jordan_type = linalg::jordan_type(u).ok();
    let dims = layout.dims();
    let lambda_a = weight::lambda_of(&weight::a_of(&dims)).ok();
    let dominated = match (&jordan_type, &lambda_a) {
        (Some(j), Some(l)) => Some(j.dominated_by(l)),
        _ => None,
    };
    SliceReport {
        nilpotent: jordan_type.is_some(),
        in_slice: (u - &sl2.x).commutator(&sl2.y).is_zero(),
        jordan_type,
        lambda_a,
        dominated,
    }
}

/// `ĝ_i = g_i ⊕ Id_{D′_i}`, `ĝ_0 = Id_{D̃}`.
pub fn embed_group(g: &GLVElement, layout: &TildeLayout) -> Result<Vec<Matrix>, PhiError> {
    let n = layout.n;
    if g.g.len() + 1 != n || (1..n).any(|i| g.at(i).shape() != (layout.v_at(i), layout.v_at(i))) {
        return Err(PhiError::ShapeMismatch("group element does not match V".into()));
    }
    Ok((0..n)
        .map(|i| {
            let rest = Matrix::identity(layout.dim(i) - layout.v_at(i));
            if i == 0 {
                rest
            } else {
                Matrix::block_diag(&[g.at(i).clone(), rest])
            }
        })
        .collect())
}

/// `(ĝ_{i+1} Ã_i ĝ_i⁻¹, ĝ_i B̃_i ĝ_{i+1}⁻¹)` for `ĝ` from [`embed_group`].
pub fn act_tilde(ghat: &[Matrix], t: &TildeData) -> Result<TildeData, PhiError> {
    let lay = &t.layout;
    if ghat.len() != lay.n || (0..lay.n).any(|i| ghat[i].shape() != (lay.dim(i), lay.dim(i))) {
        return Err(PhiError::ShapeMismatch("group element does not match the layout".into()));
    }
    // ĝ_i is g_i ⊕ Id, so only the V corner needs inverting
    let inv = (0..lay.n)
        .map(|i| {
            let v = lay.v_at(i);
            let corner = ghat[i].block(0, 0, v, v).inverse()?;
            let mut m = ghat[i].clone();
            m.set_block(0, 0, &corner);
            Ok(m)
        })
        .collect::<Result<Vec<_>, LinalgError>>()?;
    let n = t.n();
    Ok(TildeData {
        layout: t.layout.clone(),
        atil: (0..n - 1).map(|i| ghat[i + 1].mul(&t.atil[i]).mul(&inv[i])).collect(),
        btil: (0..n - 1).map(|i| ghat[i].mul(&t.btil[i]).mul(&inv[i + 1])).collect(),
    })
}

/// `Ã_i` maps `D_i^{l,(h)}` isomorphically onto `D_{i+1}^{l−1,(h)}` for
/// `l ≥ 1`, and `π_{D⁻_i} B̃_i |_{D′_{i+1}}` is invertible.
pub fn filtration_check(t: &TildeData) -> Result<bool, PhiError> {
    in_t(t)?;
    let lay = &t.layout;
    let n = lay.n;
    for i in 0..n - 1 {
        for l in 1..n - 1 - i {
            for h in 0..n - 1 - i - l {
                let cols = lay.coords(i, &lay.filtration(i, l, h));
                let rows = lay.coords(i + 1, &lay.filtration(i + 1, l - 1, h));
                if rows.len() != cols.len() {
                    return Ok(false);
                }
                let others: Vec<usize> = (0..lay.dim(i + 1)).filter(|r| !rows.contains(r)).collect();
                if !t.atil[i].select(&others, &cols).is_zero() {
                    return Ok(false);
                }
                let sq = t.atil[i].select(&rows, &cols);
                if sq.rank() != sq.rows() {
                    return Ok(false);
                }
            }
        }
        if i + 1 < n {
            let rows = lay.coords(i, &lay.d_minus(i));
            let cols: Vec<usize> = lay.d_prime(i + 1).collect();
            let sq = t.btil[i].select(&rows, &cols);
            if !sq.is_square() || sq.rank() != sq.rows() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Closed-form coefficients `λ` (of `T` blocks) and `μ` (of `S` blocks) of
/// the leading monomial `δ_{r→j} γ_{j′→r}`, computed from the scalar
/// recursion alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffTable {
    pub n: usize,
    pub entries: Vec<CoeffEntry>,
    pub groups: Vec<GroupCoeffs>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffEntry {
    pub kind: BlockKind,
    pub i: usize,
    pub j: usize,
    pub h: usize,
    pub jp: usize,
    pub hp: usize,
    pub deg: i64,
    pub grad: i64,
    pub r: i64,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupCoeffs {
    pub i: usize,
    pub j: usize,
    pub jp: usize,
    pub deg: usize,
    pub h0: usize,
    pub h1: usize,
    pub nu: Vec<Rational>,
    pub rho: Vec<Rational>,
    pub alpha: Vec<i64>,
    pub beta: Vec<i64>,
}

type CoeffKey = (usize, usize, usize, usize, usize);

impl CoeffTable {
    fn map(&self, kind: BlockKind) -> BTreeMap<CoeffKey, Rational> {
        self.entries
            .iter()
            .filter(|e| e.kind == kind)
            .map(|e| ((e.i, e.j, e.h, e.jp, e.hp), e.value.clone()))
            .collect()
    }

    /// `λ^{j′,h′}_{i,j,h}`.
    pub fn lambda(&self, i: usize, j: usize, h: usize, jp: usize, hp: usize) -> Option<Rational> {
        self.find(BlockKind::T, (i, j, h, jp, hp))
    }

    /// `μ^{j′,h′}_{i,j,h}`.
    pub fn mu(&self, i: usize, j: usize, h: usize, jp: usize, hp: usize) -> Option<Rational> {
        self.find(BlockKind::S, (i, j, h, jp, hp))
    }

    fn find(&self, kind: BlockKind, key: CoeffKey) -> Option<Rational> {
        self.entries
            .iter()
            .find(|e| e.kind == kind && (e.i, e.j, e.h, e.jp, e.hp) == key)
            .map(|e| e.value.clone())
    }

    /// The three positivity families; returns the violating entries.
    pub fn positivity_violations(&self) -> Vec<String> {
        let lam = self.map(BlockKind::T);
        let mu = self.map(BlockKind::S);
        let n = self.n;
        let mut bad = Vec::new();
        let mut expect = |what: String, x: Option<Rational>| match x {
            Some(x) if x.is_positive() => {}
            other => bad.push(format!("{what} = {other:?}")),
        };
        for i in 0..n.saturating_sub(1) {
            for j in i + 1..n {
                for jp in i + 2..n {
                    for h in 1..j - i {
                        if deg_grad(BlockKind::T, j, h, jp, 1).0 > 0 {
                            expect(format!("lambda^{{{jp},1}}_{{{i},{j},{h}}}"), lam.get(&(i, j, h, jp, 1)).cloned());
                        }
                        for hp in 2..jp - i {
                            if deg_grad(BlockKind::T, j, h, jp, hp).0 > 0 {
                                let sum = match (lam.get(&(i, j, h, jp, hp)), mu.get(&(i, j, h, jp, hp - 1))) {
                                    (Some(a), Some(b)) => Some(a + b),
                                    _ => None,
                                };
                                expect(format!("lambda^{{{jp},{hp}}} + mu^{{{jp},{}}}_{{{i},{j},{h}}}", hp - 1), sum);
                            }
                        }
                    }
                    for hp in 1..jp - i {
                        let h = j - i;
                        if deg_grad(BlockKind::S, j, h, jp, hp).0 > 0 {
                            expect(format!("mu^{{{jp},{hp}}}_{{{i},{j},{h}}}"), mu.get(&(i, j, h, jp, hp)).cloned());
                        }
                    }
                }
            }
        }
        bad
    }
}

pub fn coefficient_tables(n: usize) -> CoeffTable {
    let mut lam: BTreeMap<CoeffKey, Rational> = BTreeMap::new();
    let mut mu: BTreeMap<CoeffKey, Rational> = BTreeMap::new();
    let mut aux = Vec::new();
    for i in (0..n.saturating_sub(2)).rev() {
        for deg in 1..=max_deg(n, i) {
            for g in groups(n, i, deg) {
                let hs: Vec<usize> = (g.h0..=g.h1).collect();
                let nu: Vec<Rational> = hs
                    .iter()
                    .map(|&h| {
                        let hp = g.hp(h);
                        let top = h == g.j - i - 1;
                        let l = || lam.get(&(i + 1, g.j, h, g.jp, hp)).cloned().unwrap_or_else(Rational::zero);
                        let m = || mu.get(&(i + 1, g.j, h, g.jp, hp - 1)).cloned().unwrap_or_else(Rational::zero);
                        match (hp == 1, top) {
                            (true, true) => Rational::one(),
                            (true, false) => l(),
                            (false, true) => m(),
                            (false, false) => l() + m(),
                        }
                    })
                    .collect();
                let mut rho = Vec::with_capacity(hs.len());
                let mut prev = Rational::one();
                for &h in &hs {
                    prev = prev * Rational::from_int(g.beta(h)) / Rational::from_int(g.alpha(h));
                    rho.push(prev.clone());
                }
                let nu_sum = nu.iter().fold(Rational::zero(), |acc, x| acc + x);
                let rho_sum = rho.iter().fold(Rational::one(), |acc, x| acc + x);
                let mut x = nu_sum / rho_sum;
                for (k, &h) in hs.iter().enumerate() {
                    let hp = g.hp(h);
                    let y = &nu[k] - &x;
                    lam.insert((i, g.j, h, g.jp, hp), x.clone());
                    mu.insert((i, g.j, h + 1, g.jp, hp), y.clone());
                    // Z_h = ρ_h X_{h0} = Y_h + X_{h+1}
                    x = &(&rho[k] * &lam[&(i, g.j, g.h0, g.jp, g.hp(g.h0))]) - &y;
                }
                aux.push(GroupCoeffs {
                    i,
                    j: g.j,
                    jp: g.jp,
                    deg,
                    h0: g.h0,
                    h1: g.h1,
                    alpha: hs.iter().map(|&h| g.alpha(h)).collect(),
                    beta: hs.iter().map(|&h| g.beta(h)).collect(),
                    nu,
                    rho,
                });
            }
        }
    }
    let entry = |kind: BlockKind, (i, j, h, jp, hp): CoeffKey, value: Rational| {
        let (deg, grad) = deg_grad(kind, j, h, jp, hp);
        CoeffEntry { kind, i, j, h, jp, hp, deg, grad, r: monomial_index(kind, j, h, hp), value }
    };
    let mut entries: Vec<CoeffEntry> = lam.into_iter().map(|(k, v)| entry(BlockKind::T, k, v)).collect();
    entries.extend(mu.into_iter().map(|(k, v)| entry(BlockKind::S, k, v)));
    CoeffTable { n, entries, groups: aux }
}

/// The six composition rules for deg and grad, checked over all index
/// combinations with `n` fixed. Returns the first failure.
pub fn composition_rules(n: usize) -> Result<(), String> {
    let dt = |j, h, jp, hp| deg_grad(BlockKind::T, j, h, jp, hp);
    let ds = |j, h, jp, hp| deg_grad(BlockKind::S, j, h, jp, hp);
    for i in 0..n.saturating_sub(1) {
        let slots = |lvl: usize| -> Vec<(usize, usize)> {
            (lvl + 1..n).flat_map(|j| (1..=j - lvl).map(move |k| (j, k))).collect()
        };
        let (s0, s1, s2) = (slots(i), slots(i + 1), slots(i + 2));
        // L = B̃_{i+1}Ã_{i+1} on Ṽ_{i+1} through Ṽ_{i+2}
        for &(j, h) in &s1 {
            for &(jp, hp) in &s1 {
                let target = dt(j, h, jp, hp);
                for &(l, m) in &s2 {
                    let (a, b) = (ds(j, h, l, m), dt(l, m, jp, hp));
                    if a.0 + b.0 > target.0 || a.1 + b.1 != target.1 {
                        return Err(format!("L rule at i={i} ({jp},{hp})->({l},{m})->({j},{h})"));
                    }
                }
                // M = Ã_iB̃_i through Ṽ_i
                for &(l, m) in &s0 {
                    let (a, b) = (dt(j, h, l, m), ds(l, m, jp, hp));
                    if a.0 + b.0 > target.0 || a.1 + b.1 != target.1 {
                        return Err(format!("M rule at i={i} ({jp},{hp})->({l},{m})->({j},{h})"));
                    }
                }
            }
        }
        // N = B̃_iÃ_i on Ṽ_i through Ṽ_{i+1}
        for &(j, h) in &s0 {
            for &(jp, hp) in &s0 {
                let target = dt(j, h, jp, hp);
                for &(l, m) in &s1 {
                    let (a, b) = (ds(j, h, l, m), dt(l, m, jp, hp));
                    if a.0 + b.0 > target.0 || a.1 + b.1 != target.1 {
                        return Err(format!("N rule at i={i} ({jp},{hp})->({l},{m})->({j},{h})"));
                    }
                }
            }
        }
    }
    Ok(())
}

/// On-disk form of [`TildeData`]; slots are labelled `["V", i]` or
/// `["D", j, k]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TildeJson {
    pub n: usize,
    pub d: Vec<usize>,
    pub v: Vec<usize>,
    pub levels: Vec<Vec<SlotJson>>,
    #[serde(rename = "Atil")]
    pub atil: Vec<Matrix>,
    #[serde(rename = "Btil")]
    pub btil: Vec<Matrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlotJson {
    pub label: serde_json::Value,
    pub offset: usize,
    pub dim: usize,
}

impl TildeData {
    pub fn to_json(&self) -> TildeJson {
        let lay = &self.layout;
        TildeJson {
            n: lay.n,
            d: lay.d.clone(),
            v: lay.v.clone(),
            levels: (0..lay.n)
                .map(|i| {
                    lay.slots(i)
                        .iter()
                        .map(|s| SlotJson {
                            label: match s.slot {
                                Slot::V => serde_json::json!(["V", i]),
                                Slot::D { j, k } => serde_json::json!(["D", j, k]),
                            },
                            offset: s.offset,
                            dim: s.dim,
                        })
                        .collect()
                })
                .collect(),
            atil: self.atil.clone(),
            btil: self.btil.clone(),
        }
    }
}

impl TildeJson {
    pub fn into_data(self) -> Result<TildeData, PhiError> {
        let dims = DimData::new(self.n, self.d.iter().map(|&x| x as i64).collect(), self.v.iter().map(|&x| x as i64).collect())
            .map_err(|e| PhiError::ShapeMismatch(e.to_string()))?;
        let layout = TildeLayout::new(&dims)?;
        let n = layout.n;
        if self.atil.len() + 1 != n || self.btil.len() + 1 != n {
            return Err(PhiError::ShapeMismatch("wrong number of maps".into()));
        }
        let atil = self
            .atil
            .into_iter()
            .enumerate()
            .map(|(i, m)| MatrixJson::conform(m, layout.dim(i + 1), layout.dim(i)))
            .collect::<Result<Vec<_>, _>>()?;
        let btil = self
            .btil
            .into_iter()
            .enumerate()
            .map(|(i, m)| MatrixJson::conform(m, layout.dim(i), layout.dim(i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TildeData { layout, atil, btil })
    }
}

impl Serialize for TildeData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TildeData {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        TildeJson::deserialize(d)?.into_data().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{act, check_stable_criterion, gen_general, gen_one_sided, ZeroSide};
    use crate::sample;

    fn dims(d: &[i64], v: &[i64]) -> DimData {
        DimData::new(d.len() + 1, d.to_vec(), v.to_vec()).unwrap()
    }

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    fn hand() -> ADHMData {
        let m = |x: i64| Matrix::from_i64(&[&[x]]);
        ADHMData::new(dims(&[1, 1], &[1, 1]), vec![m(1)], vec![m(1)], vec![m(1), m(1)], vec![m(1), m(-1)]).unwrap()
    }

    #[test]
    fn layout_examples() {
        let lay = TildeLayout::new(&dims(&[1, 1], &[1, 1])).unwrap();
        assert_eq!(lay.n_total(), 3);
        assert_eq!((lay.dim(0), lay.dim(1), lay.dim(2)), (3, 2, 1));
        let d0: Vec<Slot> = lay.slots(0).iter().filter(|s| s.dim > 0).map(|s| s.slot).collect();
        assert_eq!(d0, vec![Slot::D { j: 1, k: 1 }, Slot::D { j: 2, k: 1 }, Slot::D { j: 2, k: 2 }]);
        let s1: Vec<Slot> = lay.slots(1).iter().map(|s| s.slot).collect();
        assert_eq!(s1, vec![Slot::V, Slot::D { j: 2, k: 1 }]);
        let lay = TildeLayout::new(&dims(&[4, 0, 0], &[2, 1, 1])).unwrap();
        assert_eq!((lay.dim(0), lay.dim(1), lay.dim(2)), (4, 2, 1));
        let lay = TildeLayout::new(&dims(&[1, 2, 1], &[0, 0, 0])).unwrap();
        for i in 1..4 {
            let want: usize = (i + 1..4).map(|j| (j - i) * lay.d_at(j)).sum();
            assert_eq!(lay.dim(i), want);
        }
    }

    #[test]
    fn deg_grad_examples() {
        assert_eq!(deg_grad(BlockKind::T, 3, 1, 3, 2).0, 0);
        assert_eq!(deg_grad(BlockKind::S, 3, 2, 3, 2).0, 0);
        assert_eq!(deg_grad(BlockKind::T, 3, 2, 3, 2), (1, 2));
        for n in 2..=6 {
            composition_rules(n).unwrap();
        }
    }

    #[test]
    fn sl2_examples() {
        let lay = TildeLayout::new(&dims(&[1, 1], &[0, 0])).unwrap();
        let s = sl2_of_level(&lay, 0);
        assert!(s.is_sl2());
        assert_eq!(linalg::jordan_type(&s.x).unwrap(), Partition::new(vec![2, 1]));
        let lay = TildeLayout::new(&dims(&[1, 2, 1, 2], &[0, 0, 0, 0])).unwrap();
        for i in 0..5 {
            assert!(sl2_of_level(&lay, i).is_sl2());
        }
        assert_eq!(linalg::jordan_type(&sl2_of_level(&lay, 0).x).unwrap(), weight::x_type(&[1, 2, 1, 2]));
        let last = sl2_of_level(&lay, 3);
        assert!(last.x.is_zero() && last.y.is_zero());
    }

    /// Worked by hand: `X + Y = −1` from the ADHM block and `Y = X` from the
    /// commutator, so both deg-1 blocks at level 0 are `−1/2`.
    #[test]
    fn hand_example_embedding() {
        let t = phi(&hand()).unwrap();
        let a0 = Matrix::from_fn(2, 3, |r, c| [[q(1, 1), q(1, 1), q(0, 1)], [q(0, 1), q(-1, 2), q(1, 1)]][r][c].clone());
        let b0 = Matrix::from_fn(3, 2, |r, c| [[q(1, 1), q(0, 1)], [q(0, 1), q(1, 1)], [q(-1, 1), q(-1, 2)]][r][c].clone());
        assert_eq!(t.atil[0], a0);
        assert_eq!(t.btil[0], b0);
        assert_eq!(t.atil[1], Matrix::from_i64(&[&[1, 1]]));
        assert!(check_transversal(&t).ok);
        assert!(check_tilde_adhm(&t));
        assert!(check_phi_equations(&hand(), &t));
        assert_eq!(phi_inverse(&t).unwrap(), hand());
        assert!(tilde_stability(&t).unwrap());
        assert!(filtration_check(&t).unwrap());
    }

    #[test]
    fn zero_data_gives_x() {
        for (d, v) in [(&[1, 1][..], &[1, 1][..]), (&[2, 1, 1], &[1, 2, 1]), (&[1, 0, 2, 1], &[0, 1, 1, 1])] {
            let dd = dims(d, v);
            let t = phi(&ADHMData::zero(&dd).unwrap()).unwrap();
            let u = slice_point(&t).unwrap();
            assert_eq!(u, sl2_of_level(&t.layout, 0).x);
            assert!(!tilde_stability(&t).unwrap());
        }
    }

    #[test]
    fn framing_concentrated_at_one_is_a_relabelling() {
        let dd = dims(&[3, 0, 0], &[2, 1, 1]);
        for seed in 0..5 {
            let z = gen_general(&dd, seed, None).unwrap();
            let t = phi(&z).unwrap();
            assert_eq!(t.atil[0], *z.gamma(1));
            assert_eq!(t.btil[0], *z.delta(1));
            assert_eq!(t.atil[1..], z.a[..]);
        }
    }

    #[test]
    fn postconditions_on_samples() {
        for (d, v) in [(&[1, 1][..], &[1, 1][..]), (&[1, 1, 1], &[1, 1, 1]), (&[1, 0, 1, 1], &[1, 1, 2, 1]), (&[2, 1], &[1, 1])] {
            let dd = dims(d, v);
            for seed in 0..6 {
                let z = gen_general(&dd, seed, None).unwrap();
                let t = phi(&z).unwrap();
                let rep = check_transversal(&t);
                assert!(rep.ok, "{rep:?}");
                assert!(check_tilde_adhm(&t));
                assert!(quiver::check_admissible(&t.as_adhm().unwrap()));
                assert!(check_phi_equations(&z, &t));
                assert_eq!(phi_inverse(&t).unwrap(), z);
                assert_eq!(phi(&phi_inverse(&t).unwrap()).unwrap(), t);
                let stable = check_stable_criterion(&z).unwrap();
                assert_eq!(tilde_stability(&t).unwrap(), stable);
                assert!(filtration_check(&t).unwrap());
                let rep = slice_report(&t.layout, &slice_point(&t).unwrap());
                assert!(rep.nilpotent && rep.in_slice);
                if stable {
                    assert_eq!(rep.dominated, Some(true));
                }
            }
        }
    }

    #[test]
    fn equivariance() {
        let dd = dims(&[1, 1, 1], &[1, 2, 1]);
        let mut rng = sample::rng(7);
        for seed in 0..3 {
            let z = gen_general(&dd, seed, None).unwrap();
            let t = phi(&z).unwrap();
            for _ in 0..3 {
                let g = GLVElement::random(&dd, &mut rng);
                let ghat = embed_group(&g, &t.layout).unwrap();
                assert_eq!(phi(&act(&g, &z).unwrap()).unwrap(), act_tilde(&ghat, &t).unwrap());
            }
        }
        let id = embed_group(&GLVElement::identity(&dd), &TildeLayout::new(&dd).unwrap()).unwrap();
        assert!(id.iter().all(Matrix::is_identity));
    }

    #[test]
    fn corrupted_blocks_are_located() {
        let t = phi(&hand()).unwrap();
        let mut bad = t.clone();
        bad.set_t_block(0, Slot::D { j: 2, k: 1 }, Slot::D { j: 2, k: 2 }, &Matrix::from_i64(&[&[2]]));
        let rep = check_transversal(&bad);
        assert!(!rep.ok);
        assert!(rep.violation.unwrap().contains("expected identity"));
        let mut bad = t.clone();
        bad.set_t_block(0, Slot::D { j: 2, k: 1 }, Slot::D { j: 1, k: 1 }, &Matrix::from_i64(&[&[1]]));
        assert!(check_transversal(&bad).violation.unwrap().contains("expected zero"));
        let mut bad = t;
        bad.set_t_block(0, Slot::D { j: 2, k: 1 }, Slot::D { j: 2, k: 2 }, &Matrix::from_i64(&[&[0]]));
        assert!(matches!(filtration_check(&bad), Err(PhiError::NotTransversal(_))));
    }

    #[test]
    fn coefficient_examples() {
        let table = coefficient_tables(3);
        assert_eq!(table.lambda(0, 2, 1, 2, 1), Some(q(1, 2)));
        assert_eq!(table.mu(0, 2, 2, 2, 1), Some(q(1, 2)));
        for n in 2..=6 {
            assert!(coefficient_tables(n).positivity_violations().is_empty());
        }
    }

    #[test]
    fn probes_match_coefficients() {
        // with one side zero every γ_iδ_i vanishes, so each positive-degree
        // block is its coefficient times the single monomial δ_{r→j}γ_{j′→r}
        let dd = dims(&[1, 2, 1, 1], &[2, 2, 2, 1]);
        let table = coefficient_tables(5);
        let mut nonzero = 0;
        for (seed, side) in (0..8).flat_map(|s| [(s, ZeroSide::A), (s, ZeroSide::B)]) {
            let z = gen_one_sided(&dd, seed, side).unwrap();
            let t = phi(&z).unwrap();
            for e in &table.entries {
                let (r, j, jp) = (e.r as usize, e.j, e.jp);
                let mono = composite_delta(&z, r, j).mul(&composite_gamma(&z, jp, r));
                let block = match e.kind {
                    BlockKind::T => t.t_block(e.i, Slot::D { j, k: e.h }, Slot::D { j: jp, k: e.hp }),
                    BlockKind::S => t.s_block(e.i, Slot::D { j, k: e.h }, Slot::D { j: jp, k: e.hp }),
                };
                assert_eq!(block, mono.scale(&e.value), "{e:?}");
                nonzero += usize::from(!mono.is_zero());
            }
        }
        assert!(nonzero > 20, "{nonzero}");
    }

    #[test]
    fn json_roundtrip() {
        let t = phi(&hand()).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.contains("[\"D\",2,1]"));
        let back: TildeData = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }
}
