//! Paths on the doubled quiver and admissible paths, with evaluation on ADHM
//! data.
//!
//! Arrows are `a<k>` for `k → k+1` (evaluated as `A_k`) and `b<k>` for
//! `k+1 → k` (evaluated as `B_k`). Words are written in composition order:
//! `b1 a1` is `B₁A₁`, so the rightmost arrow is applied first.
//!
//! Textual grammar for admissible paths:
//!
//! ```text
//! admissible = [ "[" ] , vertex , { { arrow } , vertex } , [ "]" ] ;
//! vertex     = int , [ "^" , int ] ;
//! arrow      = ( "a" | "b" ) , int ;
//! bpath      = arrow , { arrow } | "e" , int ;
//! ```
//!
//! Tokens are separated by whitespace. `2 a1 1` is `δ₂A₁γ₁` and `1^1` is
//! `δ₁γ₁δ₁γ₁`. Two vertices with no arrow between them must coincide and
//! are merged, adding their powers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::quiver::{composite_delta, composite_gamma, ADHMData};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("arrows do not compose: {0}")]
    Chain(String),
    #[error("vertex {vertex} outside 1..={max}")]
    VertexRange { vertex: usize, max: usize },
    #[error("empty polynomial without a type")]
    Untyped,
    #[error("terms of different types in one polynomial")]
    MixedType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Arrow {
    /// `k → k+1`.
    A(usize),
    /// `k+1 → k`.
    B(usize),
}

impl Arrow {
    pub fn source(self) -> usize {
        match self {
            Arrow::A(k) => k,
            Arrow::B(k) => k + 1,
        }
    }

    pub fn target(self) -> usize {
        match self {
            Arrow::A(k) => k + 1,
            Arrow::B(k) => k,
        }
    }

    fn matrix(self, z: &ADHMData) -> &Matrix {
        match self {
            Arrow::A(k) => z.a(k),
            Arrow::B(k) => z.b(k),
        }
    }

    /// Arrows of the quiver with `n − 1` vertices.
    pub fn all(n: usize) -> Vec<Arrow> {
        (1..n.saturating_sub(1)).flat_map(|k| [Arrow::A(k), Arrow::B(k)]).collect()
    }
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arrow::A(k) => write!(f, "a{k}"),
            Arrow::B(k) => write!(f, "b{k}"),
        }
    }
}

impl FromStr for Arrow {
    type Err = PathError;

    fn from_str(s: &str) -> Result<Self, PathError> {
        let bad = || PathError::Parse(format!("bad arrow `{s}`"));
        let (head, rest) = s.split_at(s.len().min(1));
        let k: usize = rest.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        match head {
            "a" => Ok(Arrow::A(k)),
            "b" => Ok(Arrow::B(k)),
            _ => Err(bad()),
        }
    }
}

/// A path of arrows, stored in composition order (`arrows[0]` is applied
/// last). The source is kept explicitly so empty paths have a vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BPath {
    source: usize,
    arrows: Vec<Arrow>,
}

impl BPath {
    pub fn empty(vertex: usize) -> Self {
        BPath { source: vertex, arrows: Vec::new() }
    }

    pub fn new(arrows: Vec<Arrow>) -> Result<Self, PathError> {
        let last = arrows.last().ok_or_else(|| PathError::Chain("use BPath::empty".into()))?;
        let source = last.source();
        for w in arrows.windows(2) {
            if w[1].target() != w[0].source() {
                return Err(PathError::Chain(format!("{} after {}", w[0], w[1])));
            }
        }
        Ok(BPath { source, arrows })
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.arrows.first().map_or(self.source, |a| a.target())
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn degree(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    /// `self ∘ other`: apply `other`, then `self`.
    pub fn after(&self, other: &BPath) -> Result<BPath, PathError> {
        if other.target() != self.source {
            return Err(PathError::Chain(format!("{self} after {other}")));
        }
        let mut arrows = self.arrows.clone();
        arrows.extend_from_slice(&other.arrows);
        Ok(BPath { source: other.source, arrows })
    }

    /// Every path of the given degree leaving `source` (or, with
    /// `into = true`, ending at it) in the quiver with `n − 1` vertices.
    pub fn enumerate(n: usize, vertex: usize, degree: usize, into: bool) -> Vec<BPath> {
        let mut out = vec![BPath::empty(vertex)];
        for _ in 0..degree {
            let mut next = Vec::new();
            for p in &out {
                for arrow in Arrow::all(n) {
                    let fits = if into { arrow.target() == p.source } else { arrow.source() == p.target() };
                    if !fits {
                        continue;
                    }
                    let step = BPath { source: arrow.source(), arrows: vec![arrow] };
                    let joined = if into { p.after(&step) } else { step.after(p) };
                    if let Ok(q) = joined {
                        next.push(q);
                    }
                }
            }
            out = next;
        }
        out
    }

    fn check_range(&self, n: usize) -> Result<(), PathError> {
        let max = n - 1;
        let ok = |v: usize| if (1..=max).contains(&v) { Ok(()) } else { Err(PathError::VertexRange { vertex: v, max }) };
        ok(self.source)?;
        for a in &self.arrows {
            ok(a.source())?;
            ok(a.target())?;
        }
        Ok(())
    }
}

impl fmt::Display for BPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.arrows.is_empty() {
            return write!(f, "e{}", self.source);
        }
        let words: Vec<String> = self.arrows.iter().map(Arrow::to_string).collect();
        write!(f, "{}", words.join(" "))
    }
}

impl FromStr for BPath {
    type Err = PathError;

    fn from_str(s: &str) -> Result<Self, PathError> {
        let s = s.trim();
        if let Some(v) = s.strip_prefix('e') {
            let v: usize = v.parse().map_err(|_| PathError::Parse(format!("bad empty path `{s}`")))?;
            return Ok(BPath::empty(v));
        }
        BPath::new(s.split_whitespace().map(str::parse).collect::<Result<_, _>>()?)
    }
}

/// `[i_{m+1}^{r_{m+1}} α^{(m)} i_m^{r_m} ⋯ α^{(1)} i_1^{r_1}]`, stored from
/// the source side: `vertices[0] = i_1`, `segments[0] = α^{(1)}`.
///
/// Segments are nonempty; empty ones are merged into their vertex on
/// construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AdmissiblePath {
    vertices: Vec<usize>,
    powers: Vec<u32>,
    segments: Vec<BPath>,
}

impl AdmissiblePath {
    /// `[i^r]`.
    pub fn vertex(i: usize, r: u32) -> Self {
        AdmissiblePath { vertices: vec![i], powers: vec![r], segments: Vec::new() }
    }

    /// Builds from source-side lists: `powers.len() = segments.len() + 1`,
    /// with `segments[j]` running from the `j`-th to the `(j+1)`-th vertex.
    pub fn new(powers: Vec<u32>, segments: Vec<BPath>, source: usize) -> Result<Self, PathError> {
        if powers.len() != segments.len() + 1 {
            return Err(PathError::Parse("one power per vertex".into()));
        }
        let mut p = AdmissiblePath::vertex(source, powers[0]);
        for (seg, &r) in segments.into_iter().zip(&powers[1..]) {
            p.push(seg, r)?;
        }
        Ok(p)
    }

    fn push(&mut self, seg: BPath, r: u32) -> Result<(), PathError> {
        let here = *self.vertices.last().expect("nonempty");
        if seg.source() != here {
            return Err(PathError::Chain(format!("segment {seg} does not start at {here}")));
        }
        if seg.is_empty() {
            *self.powers.last_mut().expect("nonempty") += r;
        } else {
            self.vertices.push(seg.target());
            self.powers.push(r);
            self.segments.push(seg);
        }
        Ok(())
    }

    /// `[β]₀`.
    pub fn source(&self) -> usize {
        self.vertices[0]
    }

    /// `[β]₁`.
    pub fn target(&self) -> usize {
        *self.vertices.last().expect("nonempty")
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn powers(&self) -> &[u32] {
        &self.powers
    }

    pub fn segments(&self) -> &[BPath] {
        &self.segments
    }

    /// `2 + Σ r_j + Σ degree(α^{(j)})`.
    pub fn degree(&self) -> usize {
        2 + self.powers.iter().map(|&r| r as usize).sum::<usize>()
            + self.segments.iter().map(BPath::degree).sum::<usize>()
    }

    /// Degree as a polynomial in the matrix entries: every `γ_iδ_i` insertion
    /// counts twice. Additive under [`AdmissiblePath::concat`].
    pub fn polynomial_degree(&self) -> usize {
        2 + 2 * self.powers.iter().map(|&r| r as usize).sum::<usize>()
            + self.segments.iter().map(BPath::degree).sum::<usize>()
    }

    /// `[β]·[β′]`: `None` unless `[β′]₁ = [β]₀`; otherwise `[β i β′]`, where
    /// the junction carries one extra `γ_iδ_i`.
    pub fn concat(&self, other: &AdmissiblePath) -> Option<AdmissiblePath> {
        if other.target() != self.source() {
            return None;
        }
        let mut out = other.clone();
        *out.powers.last_mut().expect("nonempty") += self.powers[0] + 1;
        out.vertices.extend_from_slice(&self.vertices[1..]);
        out.powers.extend_from_slice(&self.powers[1..]);
        out.segments.extend_from_slice(&self.segments);
        Some(out)
    }

    /// `δ_{l→j} γ_{i→l}` as a single admissible path.
    pub fn generator(i: usize, j: usize, l: usize) -> AdmissiblePath {
        assert!(l <= i.min(j));
        let mut arrows: Vec<Arrow> = (l..j).rev().map(Arrow::A).collect();
        arrows.extend((l..i).map(Arrow::B));
        if arrows.is_empty() {
            AdmissiblePath::vertex(i, 0)
        } else {
            let seg = BPath::new(arrows).expect("down then up composes");
            AdmissiblePath::new(vec![0, 0], vec![seg], i).expect("chained")
        }
    }

    pub fn check_range(&self, n: usize) -> Result<(), PathError> {
        for &v in &self.vertices {
            if !(1..n).contains(&v) {
                return Err(PathError::VertexRange { vertex: v, max: n - 1 });
            }
        }
        self.segments.iter().try_for_each(|s| s.check_range(n))
    }
}

impl fmt::Display for AdmissiblePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vertex = |k: usize| match self.powers[k] {
            0 => self.vertices[k].to_string(),
            r => format!("{}^{r}", self.vertices[k]),
        };
        let mut words = vec![vertex(self.vertices.len() - 1)];
        for k in (0..self.segments.len()).rev() {
            words.push(self.segments[k].to_string());
            words.push(vertex(k));
        }
        write!(f, "[{}]", words.join(" "))
    }
}

impl FromStr for AdmissiblePath {
    type Err = PathError;

    fn from_str(s: &str) -> Result<Self, PathError> {
        let body = s.trim();
        let body = body.strip_prefix('[').unwrap_or(body);
        let body = body.strip_suffix(']').unwrap_or(body);
        let parse_vertex = |t: &str| -> Result<(usize, u32), PathError> {
            let bad = || PathError::Parse(format!("bad vertex `{t}`"));
            let (v, r) = match t.split_once('^') {
                Some((v, r)) => (v, r.parse().map_err(|_| bad())?),
                None => (t, 0),
            };
            Ok((v.parse().map_err(|_| bad())?, r))
        };
        // tokens read target-first; collect (vertex, power) and the arrows
        // between consecutive vertices
        let mut stops: Vec<(usize, u32)> = Vec::new();
        let mut between: Vec<Vec<Arrow>> = Vec::new();
        let mut pending: Vec<Arrow> = Vec::new();
        for tok in body.split_whitespace() {
            if tok.starts_with(|c: char| c.is_ascii_digit()) {
                if !stops.is_empty() {
                    between.push(std::mem::take(&mut pending));
                } else if !pending.is_empty() {
                    return Err(PathError::Parse("admissible path must start with a vertex".into()));
                }
                stops.push(parse_vertex(tok)?);
            } else {
                pending.push(tok.parse()?);
            }
        }
        if stops.is_empty() || !pending.is_empty() {
            return Err(PathError::Parse("admissible path must start and end with a vertex".into()));
        }
        stops.reverse();
        between.reverse();
        let source = stops[0].0;
        let segments = between
            .into_iter()
            .zip(&stops)
            .map(|(arrows, &(from, _))| if arrows.is_empty() { Ok(BPath::empty(from)) } else { BPath::new(arrows) })
            .collect::<Result<Vec<_>, _>>()?;
        for (seg, w) in segments.iter().zip(stops.windows(2)) {
            if seg.source() != w[0].0 || seg.target() != w[1].0 {
                return Err(PathError::Chain(format!("segment {seg} between {} and {}", w[0].0, w[1].0)));
            }
        }
        AdmissiblePath::new(stops.iter().map(|&(_, r)| r).collect(), segments, source)
    }
}

/// A finite linear combination of admissible paths.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AdmissiblePolynomial {
    terms: BTreeMap<AdmissiblePath, Rational>,
    typ: Option<(usize, usize)>,
}

impl AdmissiblePolynomial {
    /// The zero polynomial of type `(source, target)`.
    pub fn zero(typ: Option<(usize, usize)>) -> Self {
        AdmissiblePolynomial { terms: BTreeMap::new(), typ }
    }

    pub fn from_path(p: AdmissiblePath) -> Self {
        let typ = Some((p.source(), p.target()));
        let mut terms = BTreeMap::new();
        terms.insert(p, Rational::one());
        AdmissiblePolynomial { terms, typ }
    }

    pub fn terms(&self) -> &BTreeMap<AdmissiblePath, Rational> {
        &self.terms
    }

    pub fn typ(&self) -> Option<(usize, usize)> {
        self.typ
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, c: &Rational, p: AdmissiblePath) -> Result<(), PathError> {
        let t = (p.source(), p.target());
        match self.typ {
            Some(existing) if existing != t => return Err(PathError::MixedType),
            _ => self.typ = Some(t),
        }
        let entry = self.terms.entry(p).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
        Ok(())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return AdmissiblePolynomial::zero(self.typ);
        }
        AdmissiblePolynomial {
            terms: self.terms.iter().map(|(p, x)| (p.clone(), x * c)).collect(),
            typ: self.typ,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PathError> {
        let mut out = self.clone();
        if out.typ.is_none() {
            out.typ = other.typ;
        } else if other.typ.is_some() && other.typ != out.typ {
            return Err(PathError::MixedType);
        }
        for (p, c) in &other.terms {
            out.add_term(c, p.clone())?;
        }
        Ok(out)
    }

    /// Bilinear extension of [`AdmissiblePath::concat`].
    pub fn multiply(&self, g: &Self) -> Self {
        let typ = match (g.typ, self.typ) {
            (Some((s, _)), Some((_, t))) => Some((s, t)),
            _ => None,
        };
        let mut out = AdmissiblePolynomial::zero(typ);
        for (p, c) in &self.terms {
            for (q, e) in &g.terms {
                if let Some(pq) = p.concat(q) {
                    out.add_term(&(c * e), pq).expect("type fixed by factors");
                }
            }
        }
        if out.terms.is_empty() && typ.is_none() {
            out.typ = None;
        }
        out
    }

    /// `Σ c_β · β(z) ∈ Hom(D_source, D_target)`.
    pub fn eval(&self, z: &ADHMData) -> Result<Matrix, PathError> {
        let (s, t) = self.typ.ok_or(PathError::Untyped)?;
        let mut m = Matrix::zeros(z.d(t), z.d(s));
        for (p, c) in &self.terms {
            m.add_scaled(c, &eval_admissible(p, z)?);
        }
        Ok(m)
    }
}

impl fmt::Display for AdmissiblePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(p, c)| format!("{c}*{p}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `α(z) ∈ Hom(V_{α₀}, V_{α₁})`; the empty path is the identity.
pub fn eval_bpath(alpha: &BPath, z: &ADHMData) -> Result<Matrix, PathError> {
    alpha.check_range(z.n())?;
    let mut m = Matrix::identity(z.v(alpha.source()));
    for arrow in alpha.arrows().iter().rev() {
        m = arrow.matrix(z).mul(&m);
    }
    Ok(m)
}

fn gamma_delta_power(z: &ADHMData, i: usize, r: u32) -> Option<Matrix> {
    (r > 0).then(|| z.gamma(i).mul(z.delta(i)).pow(r))
}

/// `δ_{i_{m+1}} (γδ)^{r_{m+1}} α^{(m)} ⋯ α^{(1)} (γ_{i_1}δ_{i_1})^{r_1} γ_{i_1}`.
pub fn eval_admissible(beta: &AdmissiblePath, z: &ADHMData) -> Result<Matrix, PathError> {
    beta.check_range(z.n())?;
    let mut m = z.gamma(beta.source()).clone();
    for k in 0..beta.vertices().len() {
        if let Some(p) = gamma_delta_power(z, beta.vertices()[k], beta.powers()[k]) {
            m = p.mul(&m);
        }
        if let Some(seg) = beta.segments().get(k) {
            m = eval_bpath(seg, z)?.mul(&m);
        }
    }
    Ok(z.delta(beta.target()).mul(&m))
}

/// `α(z) · (γ_iδ_i + A_{i−1}B_{i−1} − B_iA_i) · α′(z)`, the ADHM defect at
/// `i` sandwiched between paths with `α₀ = i = α′₁`.
pub fn theta_residual(i: usize, alpha: &BPath, alpha_prime: &BPath, z: &ADHMData) -> Result<Matrix, PathError> {
    if alpha.source() != i || alpha_prime.target() != i {
        return Err(PathError::Chain(format!("sandwich {alpha} · θ_{i} · {alpha_prime}")));
    }
    if !(1..z.n()).contains(&i) {
        return Err(PathError::VertexRange { vertex: i, max: z.n() - 1 });
    }
    Ok(eval_bpath(alpha, z)?.mul(&z.adhm_defect(i)).mul(&eval_bpath(alpha_prime, z)?))
}

/// `[α θ_i α′]` as an element of the path algebra, of type `(α′₀, α₁)`.
/// Its evaluation is `δ_{α₁} · theta_residual · γ_{α′₀}`.
pub fn theta_polynomial(n: usize, i: usize, alpha: &BPath, alpha_prime: &BPath) -> Result<AdmissiblePolynomial, PathError> {
    if alpha.source() != i || alpha_prime.target() != i {
        return Err(PathError::Chain(format!("sandwich {alpha} · θ_{i} · {alpha_prime}")));
    }
    let s = alpha_prime.source();
    let mut f = AdmissiblePolynomial::zero(Some((s, alpha.target())));
    let one = Rational::one();
    // the vertex term: γ_iδ_i inserted between the two paths
    f.add_term(&one, AdmissiblePath::new(vec![0, 1, 0], vec![alpha_prime.clone(), alpha.clone()], s)?)?;
    let through = |mid: BPath| -> Result<AdmissiblePath, PathError> {
        let seg = alpha.after(&mid)?.after(alpha_prime)?;
        AdmissiblePath::new(vec![0, 0], vec![seg], s)
    };
    if i >= 2 {
        f.add_term(&one, through(BPath::new(vec![Arrow::A(i - 1), Arrow::B(i - 1)])?)?)?;
    }
    if i + 1 < n {
        f.add_term(&-one.clone(), through(BPath::new(vec![Arrow::B(i), Arrow::A(i)])?)?)?;
    }
    Ok(f)
}

/// The generating set `{δ_{l→j} γ_{i→l} : l ≤ min(i, j)}`, lexicographic in
/// `(i, j, l)`.
pub fn generators_p(n: usize) -> Vec<((usize, usize, usize), AdmissiblePath)> {
    crate::quiver::signature_indices(n)
        .into_iter()
        .map(|(i, j, l)| ((i, j, l), AdmissiblePath::generator(i, j, l)))
        .collect()
}

/// `composite_delta · composite_gamma` for a generator index, for
/// comparison with [`eval_admissible`].
pub fn generator_composite(z: &ADHMData, (i, j, l): (usize, usize, usize)) -> Matrix {
    composite_delta(z, l, j).mul(&composite_gamma(z, i, l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{gen_general, gen_lagrangian};
    use crate::weight::DimData;

    fn hand() -> ADHMData {
        let m = |x: i64| Matrix::from_i64(&[&[x]]);
        ADHMData::new(
            DimData::new(3, vec![1, 1], vec![1, 1]).unwrap(),
            vec![m(1)],
            vec![m(1)],
            vec![m(1), m(1)],
            vec![m(1), m(-1)],
        )
        .unwrap()
    }

    fn p(s: &str) -> AdmissiblePath {
        s.parse().unwrap()
    }

    #[test]
    fn bpath_examples() {
        let z = hand();
        assert_eq!(eval_bpath(&BPath::empty(2), &z).unwrap(), Matrix::identity(1));
        assert_eq!(eval_bpath(&"a1".parse().unwrap(), &z).unwrap(), Matrix::from_i64(&[&[1]]));
        assert_eq!(eval_bpath(&"b1 a1".parse().unwrap(), &z).unwrap(), Matrix::from_i64(&[&[1]]));
        assert!("a1 a1".parse::<BPath>().is_err());
        let bp: BPath = "a2 a1 b1".parse().unwrap();
        assert_eq!((bp.source(), bp.target(), bp.degree()), (2, 3, 3));
        assert_eq!(bp.to_string(), "a2 a1 b1");
    }

    #[test]
    fn admissible_examples() {
        let z = hand();
        assert_eq!(eval_admissible(&p("[1]"), &z).unwrap(), z.delta(1).mul(z.gamma(1)));
        let g1d1 = z.gamma(1).mul(z.delta(1));
        assert_eq!(eval_admissible(&p("1^1"), &z).unwrap(), z.delta(1).mul(&g1d1).mul(z.gamma(1)));
        assert_eq!(eval_admissible(&p("[2 a1 1]"), &z).unwrap(), Matrix::from_i64(&[&[-1]]));
        assert_eq!(p("[2 a1 1]").degree(), 3);
        assert_eq!(p("[2^2 a1 b1 2 a1 1]").to_string(), "[2^2 a1 b1 2 a1 1]");
        assert_eq!(p("[1 1^2]"), p("[1^2]"));
        assert!("[2 1]".parse::<AdmissiblePath>().is_err());
        assert!("[a1 1]".parse::<AdmissiblePath>().is_err());
    }

    #[test]
    fn product_examples() {
        let f = AdmissiblePolynomial::from_path(p("[2 a1 1]"));
        let g = AdmissiblePolynomial::from_path(p("[1]"));
        let fg = f.multiply(&g);
        assert_eq!(fg, AdmissiblePolynomial::from_path(p("[2 a1 1^1]")));
        assert!(g.multiply(&f).is_zero());
        assert!(f.multiply(&AdmissiblePolynomial::zero(Some((1, 1)))).is_zero());
        // the bracket degree loses one under products; the polynomial degree adds
        let (a, b) = (p("[2 a1 1]"), p("[1^1]"));
        let ab = a.concat(&b).unwrap();
        assert_eq!(ab.degree(), a.degree() + b.degree() - 1);
        assert_eq!(ab.polynomial_degree(), a.polynomial_degree() + b.polynomial_degree());
        let z = gen_general(&DimData::new(3, vec![1, 1], vec![1, 1]).unwrap(), 2, None).unwrap();
        assert_eq!(fg.eval(&z).unwrap(), f.eval(&z).unwrap().mul(&g.eval(&z).unwrap()));
    }

    #[test]
    fn theta_examples() {
        let z = hand();
        let e1 = BPath::empty(1);
        let e2 = BPath::empty(2);
        assert!(theta_residual(1, &e1, &e1, &z).unwrap().is_zero());
        assert!(theta_residual(2, &e2, &e2, &z).unwrap().is_zero());
        let mut bad = hand();
        bad.b[0] = Matrix::from_i64(&[&[3]]);
        // γ₁δ₁ − B₁A₁ = 1 − 3
        assert_eq!(theta_residual(1, &e1, &e1, &bad).unwrap(), Matrix::from_i64(&[&[-2]]));
        // γ₂δ₂ + A₁B₁ = −1 + 3
        assert_eq!(theta_residual(2, &e2, &e2, &bad).unwrap(), Matrix::from_i64(&[&[2]]));
        let a: BPath = "a1".parse().unwrap();
        let f = theta_polynomial(3, 1, &a, &e1).unwrap();
        let lhs = f.eval(&bad).unwrap();
        let rhs = bad.delta(2).mul(&theta_residual(1, &a, &e1, &bad).unwrap()).mul(bad.gamma(1));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn generator_examples() {
        assert_eq!(generators_p(2).into_iter().map(|(_, q)| q).collect::<Vec<_>>(), vec![p("[1]")]);
        let idx: Vec<_> = generators_p(3).into_iter().map(|(k, _)| k).collect();
        assert_eq!(idx, vec![(1, 1, 1), (1, 2, 1), (2, 1, 1), (2, 2, 1), (2, 2, 2)]);
        assert_eq!(AdmissiblePath::generator(3, 2, 1), p("[2 a1 b1 b2 3]"));
        let dims = DimData::new(4, vec![1, 1, 1], vec![1, 2, 1]).unwrap();
        for z in [gen_general(&dims, 1, None).unwrap(), gen_lagrangian(&dims, 1).unwrap()] {
            for (k, q) in generators_p(4) {
                assert_eq!(eval_admissible(&q, &z).unwrap(), generator_composite(&z, k));
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(BPath::enumerate(4, 1, 1, false).len(), 1);
        assert_eq!(BPath::enumerate(4, 1, 2, false).len(), 2);
        assert_eq!(BPath::enumerate(4, 2, 2, true).len(), 2);
        for q in BPath::enumerate(5, 2, 3, true) {
            assert_eq!(q.target(), 2);
            assert_eq!(q.degree(), 3);
        }
    }
}
