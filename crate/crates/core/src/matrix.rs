//! Dense matrices over [`Rational`] and the exact elimination routines built
//! on them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("the scalar system is singular; solution is not unique")]
    NonUniqueSolution,
    #[error("the system is inconsistent")]
    Inconsistent,
    #[error("rank {rank} exceeds the allowed {allowed}")]
    RankTooHigh { rank: usize, allowed: usize },
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is singular")]
    Singular,
}

/// Row-major dense matrix. `0 x k` and `k x 0` shapes are legal zero maps.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn scalar(n: usize, c: &Rational) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = c.clone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds from integer rows. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_fn(rows.len(), cols, |r, c| {
            assert_eq!(rows[r].len(), cols, "ragged rows");
            Rational::from_int(rows[r][c])
        })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>, cols: usize) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::ShapeMismatch(format!(
                    "row of length {} in a matrix with {cols} columns",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: nrows,
            cols,
            data,
        })
    }

    /// A single column from a vector.
    pub fn column(v: &[Rational]) -> Self {
        Matrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col_vec(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rational::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    let e = self.get(r, c);
                    if r == c {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    fn check_same_shape(&self, other: &Self, what: &str) {
        assert_eq!(
            self.shape(),
            other.shape(),
            "{what}: {:?} vs {:?}",
            self.shape(),
            other.shape()
        );
    }

    /// Product `self * rhs`. Panics when inner dimensions differ.
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, rhs.rows,
            "product of {:?} and {:?}",
            self.shape(),
            rhs.shape()
        );
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let brow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    if !b.is_zero() {
                        o.add_mul(a, b);
                    }
                }
            }
        }
        out
    }

    pub fn try_mul(&self, rhs: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::ShapeMismatch(format!(
                "product of {:?} and {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        Ok(self.mul(rhs))
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: &Rational, other: &Matrix) {
        self.check_same_shape(other, "add_scaled");
        if c.is_zero() {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                a.add_mul(c, b);
            }
        }
    }

    pub fn pow(&self, k: u32) -> Matrix {
        assert!(self.is_square());
        let mut out = Matrix::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        &self.mul(other) - &other.mul(self)
    }

    /// Copy of the block with rows `r0..r0+nr` and columns `c0..c0+nc`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Matrix {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "block out of range");
        Matrix::from_fn(nr, nc, |r, c| self.get(r0 + r, c0 + c).clone())
    }

    /// `self[r0..r0+nr, :] * rhs[:, c0..c0+nc]` without copying the slabs.
    pub fn mul_slabs(&self, r0: usize, nr: usize, rhs: &Matrix, c0: usize, nc: usize) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "product of {:?} and {:?}", self.shape(), rhs.shape());
        assert!(r0 + nr <= self.rows && c0 + nc <= rhs.cols, "slab out of range");
        let mut out = Matrix::zeros(nr, nc);
        for i in 0..nr {
            for k in 0..self.cols {
                let a = &self.data[(r0 + i) * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let brow = &rhs.data[k * rhs.cols + c0..k * rhs.cols + c0 + nc];
                for (o, b) in out.data[i * nc..(i + 1) * nc].iter_mut().zip(brow) {
                    if !b.is_zero() {
                        o.add_mul(a, b);
                    }
                }
            }
        }
        out
    }

    /// Whether the block at `(r0, c0)` of shape `nr x nc` is zero.
    pub fn block_is_zero(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> bool {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "block out of range");
        (r0..r0 + nr).all(|r| self.data[r * self.cols + c0..r * self.cols + c0 + nc].iter().all(Rational::is_zero))
    }

    /// Whether the block at `(r0, c0)` of shape `nr x nc` is an identity.
    pub fn block_is_identity(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> bool {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "block out of range");
        nr == nc
            && (0..nr).all(|r| {
                (0..nc).all(|c| {
                    let e = self.get(r0 + r, c0 + c);
                    if r == c {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        assert!(
            r0 + b.rows <= self.rows && c0 + b.cols <= self.cols,
            "block out of range"
        );
        for r in 0..b.rows {
            for c in 0..b.cols {
                self.data[(r0 + r) * self.cols + c0 + c] = b.get(r, c).clone();
            }
        }
    }

    /// Rows/columns selected by index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |r, c| self.get(rows[r], cols[c]).clone())
    }

    pub fn hcat(parts: &[&Matrix]) -> Matrix {
        let rows = parts.first().map_or(0, |m| m.rows);
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "hcat row mismatch");
            out.set_block(0, c0, p);
            c0 += p.cols;
        }
        out
    }

    pub fn vcat(parts: &[&Matrix]) -> Matrix {
        let cols = parts.first().map_or(0, |m| m.cols);
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut r0 = 0;
        for p in parts {
            assert_eq!(p.cols, cols, "vcat column mismatch");
            out.set_block(r0, 0, p);
            r0 += p.rows;
        }
        out
    }

    pub fn block_diag(parts: &[Matrix]) -> Matrix {
        let rows = parts.iter().map(|m| m.rows).sum();
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for p in parts {
            out.set_block(r0, c0, p);
            r0 += p.rows;
            c0 += p.cols;
        }
        out
    }

    /// Reduced row echelon form and the pivot columns. Pivots are the first
    /// nonzero entry scanning columns left to right.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m.get(row, col).recip().unwrap();
            for c in col..m.cols {
                let v = m.get(row, c) * &inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let f = m.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                let neg = -f;
                for c in col..m.cols {
                    let pv = m.data[row * m.cols + c].clone();
                    if !pv.is_zero() {
                        m.data[r * m.cols + c].add_mul(&neg, &pv);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        // eliminate along the shorter side
        if self.cols < self.rows {
            return self.transpose().rref().1.len();
        }
        self.rref().1.len()
    }

    /// Basis of the right kernel as column vectors; empty iff injective.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(row, free);
            }
            basis.push(v);
        }
        basis
    }

    /// Kernel basis packed as the columns of a `cols x k` matrix.
    pub fn kernel_matrix(&self) -> Matrix {
        let basis = self.kernel_basis();
        Matrix::from_fn(self.cols, basis.len(), |r, c| basis[c][r].clone())
    }

    /// A basis of the column space, taken from the pivot columns.
    pub fn column_space(&self) -> Matrix {
        let (_, pivots) = self.rref();
        self.select(&(0..self.rows).collect::<Vec<_>>(), &pivots)
    }

    pub fn inverse(&self) -> Result<Matrix, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare);
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Matrix::zeros(0, 0));
        }
        let aug = Matrix::hcat(&[self, &Matrix::identity(n)]);
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(LinalgError::Singular);
        }
        Ok(r.block(0, n, n, n))
    }

    /// A matrix `s` with `self * s * self = self`.
    pub fn generalized_inverse(&self) -> Matrix {
        let (_, pivots) = self.rref();
        // rows of r give self = c * r with c the pivot columns of self
        let k = pivots.len();
        let c = self.select(&(0..self.rows).collect::<Vec<_>>(), &pivots);
        // c has a left inverse; the rref rows have the pivot unit columns as right inverse
        let ct = c.transpose();
        let c_left = ct.mul(&c).inverse().expect("full column rank").mul(&ct);
        let mut rr_right = Matrix::zeros(self.cols, k);
        for (i, &p) in pivots.iter().enumerate() {
            rr_right.set(p, i, Rational::one());
        }
        rr_right.mul(&c_left)
    }

    /// Factor `self = g * d` with `g` of shape `rows x r` and `d` of shape
    /// `r x cols`; fails when the rank exceeds `r`.
    pub fn rank_factorize(&self, r: usize) -> Result<(Matrix, Matrix), LinalgError> {
        let (red, pivots) = self.rref();
        let rank = pivots.len();
        if rank > r {
            return Err(LinalgError::RankTooHigh { rank, allowed: r });
        }
        let mut g = Matrix::zeros(self.rows, r);
        let mut d = Matrix::zeros(r, self.cols);
        for (k, &p) in pivots.iter().enumerate() {
            for row in 0..self.rows {
                g.set(row, k, self.get(row, p).clone());
            }
            for c in 0..self.cols {
                d.set(k, c, red.get(k, c).clone());
            }
        }
        Ok((g, d))
    }

    /// Column spaces of `self` and `other` (same row count) coincide.
    pub fn same_column_space(&self, other: &Matrix) -> bool {
        assert_eq!(self.rows, other.rows);
        let r = self.rank();
        r == other.rank() && Matrix::hcat(&[self, other]).rank() == r
    }

    /// Column space of `self` lies inside the column space of `other`.
    pub fn column_space_within(&self, other: &Matrix) -> bool {
        assert_eq!(self.rows, other.rows);
        Matrix::hcat(&[other, self]).rank() == other.rank()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn add(self, rhs: &'a Matrix) -> Matrix {
        self.check_same_shape(rhs, "add");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &'a Matrix) -> Matrix {
        self.check_same_shape(rhs, "sub");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &'a Matrix) -> Matrix {
        Matrix::mul(self, rhs)
    }
}

/// JSON form: an array of rows, each an array of rational strings. A matrix
/// with zero rows loses its column count in this encoding, so shapes are
/// always re-imposed by the enclosing document (see [`MatrixJson`]).
impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<Rational>> = Vec::deserialize(d)?;
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(rows, cols).map_err(serde::de::Error::custom)
    }
}

/// Helper for reading a matrix whose expected shape is known from context:
/// an empty row list is accepted for any `0 x k` shape and `[[],[],..]` for
/// `k x 0`.
pub struct MatrixJson;

impl MatrixJson {
    pub fn conform(m: Matrix, rows: usize, cols: usize) -> Result<Matrix, LinalgError> {
        if m.shape() == (rows, cols) {
            return Ok(m);
        }
        if m.rows * m.cols == 0 && rows * cols == 0 && (m.rows == rows || m.rows == 0) {
            return Ok(Matrix::zeros(rows, cols));
        }
        Err(LinalgError::ShapeMismatch(format!(
            "expected {rows}x{cols}, found {}x{}",
            m.rows, m.cols
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Matrix::identity(2).rank(), 2);
        assert_eq!(Matrix::zeros(2, 2).rank(), 0);
        assert_eq!(Matrix::from_i64(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(Matrix::zeros(0, 3).rank(), 0);
        assert_eq!(Matrix::zeros(3, 0).rank(), 0);
    }

    #[test]
    fn kernel_examples() {
        assert!(Matrix::identity(3).kernel_basis().is_empty());
        assert_eq!(Matrix::zeros(3, 3).kernel_basis().len(), 3);
        let k = Matrix::from_i64(&[&[1, 1]]).kernel_basis();
        assert_eq!(k, vec![vec![q(-1), q(1)]]);
        // span{(1,-1)} equals span{(-1,1)}
        let expected = Matrix::column(&[q(1), q(-1)]);
        assert!(Matrix::column(&k[0]).same_column_space(&expected));
    }

    #[test]
    fn rank_factorize_examples() {
        let (g, d) = Matrix::zeros(2, 3).rank_factorize(0).unwrap();
        assert_eq!(g.shape(), (2, 0));
        assert_eq!(d.shape(), (0, 3));
        assert!(g.mul(&d).is_zero());

        let m = Matrix::from_i64(&[&[1, 2], &[2, 4]]);
        let (g, d) = m.rank_factorize(1).unwrap();
        assert_eq!(g, Matrix::from_i64(&[&[1], &[2]]));
        assert_eq!(d, Matrix::from_i64(&[&[1, 2]]));

        assert_eq!(
            Matrix::identity(2).rank_factorize(1),
            Err(LinalgError::RankTooHigh { rank: 2, allowed: 1 })
        );
        // padding beyond the rank is allowed
        let (g, d) = m.rank_factorize(3).unwrap();
        assert_eq!(g.mul(&d), m);
    }

    #[test]
    fn products_with_empty_shapes_are_zero_maps() {
        let a = Matrix::zeros(2, 0);
        let b = Matrix::zeros(0, 3);
        assert_eq!(a.mul(&b), Matrix::zeros(2, 3));
        assert_eq!(b.transpose().mul(&a.transpose()), Matrix::zeros(3, 2));
    }

    #[test]
    fn inverse_and_generalized_inverse() {
        let m = Matrix::from_i64(&[&[2, 1], &[1, 1]]);
        assert!(m.mul(&m.inverse().unwrap()).is_identity());
        assert_eq!(
            Matrix::from_i64(&[&[1, 2], &[2, 4]]).inverse(),
            Err(LinalgError::Singular)
        );
        let s = Matrix::from_i64(&[&[1, 2, 0], &[2, 4, 0]]);
        let g = s.generalized_inverse();
        assert_eq!(s.mul(&g).mul(&s), s);
    }

    #[test]
    fn json_shape() {
        let m = Matrix::from_i64(&[&[1, 0], &[0, 3]]).scale(&Rational::new(1, 2));
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[["1/2","0"],["0","3/2"]]"#);
        let back: Matrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let empty: Matrix = serde_json::from_str("[]").unwrap();
        assert_eq!(MatrixJson::conform(empty, 0, 4).unwrap().shape(), (0, 4));
        let tall: Matrix = serde_json::from_str("[[],[]]").unwrap();
        assert_eq!(MatrixJson::conform(tall, 2, 0).unwrap().shape(), (2, 0));
        assert!(serde_json::from_str::<Matrix>(r#"[["1"],["1","2"]]"#).is_err());
    }
}
