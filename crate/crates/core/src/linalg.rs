//! Higher-level exact linear algebra: affine systems with matrix-valued
//! unknowns and nilpotent-matrix combinatorics.

use crate::matrix::{LinalgError, Matrix};
use crate::partition::Partition;
use crate::rational::Rational;

pub use crate::matrix::LinalgError as Error;

/// `rank(m)`.
pub fn rank(m: &Matrix) -> usize {
    m.rank()
}

/// Basis of the right kernel of `m`.
pub fn kernel_basis(m: &Matrix) -> Vec<Vec<Rational>> {
    m.kernel_basis()
}

/// `m = g * d` with `g: rows x r`, `d: r x cols`.
pub fn rank_factorize(m: &Matrix, r: usize) -> Result<(Matrix, Matrix), LinalgError> {
    m.rank_factorize(r)
}

/// One equation `Σ_k coeff_k · X_k = rhs` of an affine system whose unknowns
/// are matrices of fixed shape.
#[derive(Debug, Clone)]
pub struct AffineEquation {
    pub terms: Vec<(usize, Rational)>,
    pub rhs: Matrix,
}

impl AffineEquation {
    pub fn new(terms: Vec<(usize, Rational)>, rhs: Matrix) -> Self {
        AffineEquation { terms, rhs }
    }
}

/// Solves a system of matrix equations with scalar coefficients. The scalar
/// coefficient matrix must have full column rank; the unique solution is
/// returned after checking every equation (overdetermined systems are
/// accepted when consistent).
pub fn solve_affine(
    unknowns: usize,
    shape: (usize, usize),
    system: &[AffineEquation],
) -> Result<Vec<Matrix>, LinalgError> {
    let terms: Vec<Vec<(usize, Rational)>> = system.iter().map(|eq| eq.terms.clone()).collect();
    let rhs: Vec<&Matrix> = system.iter().map(|eq| &eq.rhs).collect();
    AffineSolver::new(unknowns, terms)?.solve(shape, &rhs)
}

/// The scalar part of an affine system, reduced once and reusable for any
/// right-hand sides.
#[derive(Debug, Clone)]
pub struct AffineSolver {
    unknowns: usize,
    terms: Vec<Vec<(usize, Rational)>>,
    /// `unknowns x equations`: a left inverse of the coefficient matrix.
    left: Matrix,
}

impl AffineSolver {
    pub fn new(unknowns: usize, terms: Vec<Vec<(usize, Rational)>>) -> Result<Self, LinalgError> {
        if let Some((k, _)) = terms.iter().flatten().find(|(k, _)| *k >= unknowns) {
            return Err(LinalgError::ShapeMismatch(format!("unknown index {k} out of range")));
        }
        let neq = terms.len();
        let mut coeff = Matrix::zeros(neq, unknowns);
        for (e, eq) in terms.iter().enumerate() {
            for (k, c) in eq {
                let v = coeff.get(e, *k) + c;
                coeff.set(e, *k, v);
            }
        }
        // reduce [coeff | I] to read off a left inverse on the pivot rows
        let aug = Matrix::hcat(&[&coeff, &Matrix::identity(neq)]);
        let (red, pivots) = aug.rref();
        if pivots.iter().filter(|&&p| p < unknowns).count() < unknowns {
            return Err(LinalgError::NonUniqueSolution);
        }
        let left = red.block(0, unknowns, unknowns, neq);
        Ok(AffineSolver { unknowns, terms, left })
    }

    pub fn solve(&self, shape: (usize, usize), rhs: &[&Matrix]) -> Result<Vec<Matrix>, LinalgError> {
        if rhs.len() != self.terms.len() {
            return Err(LinalgError::ShapeMismatch(format!("{} right-hand sides for {} equations", rhs.len(), self.terms.len())));
        }
        if let Some(m) = rhs.iter().find(|m| m.shape() != shape) {
            return Err(LinalgError::ShapeMismatch(format!("right-hand side {:?}, unknowns {shape:?}", m.shape())));
        }
        let mut solution = Vec::with_capacity(self.unknowns);
        for k in 0..self.unknowns {
            let mut x = Matrix::zeros(shape.0, shape.1);
            for (e, m) in rhs.iter().enumerate() {
                let c = self.left.get(k, e);
                if !c.is_zero() {
                    x.add_scaled(c, m);
                }
            }
            solution.push(x);
        }
        for (eq, m) in self.terms.iter().zip(rhs) {
            let mut lhs = Matrix::zeros(shape.0, shape.1);
            for (k, c) in eq {
                lhs.add_scaled(c, &solution[*k]);
            }
            if lhs != **m {
                return Err(LinalgError::Inconsistent);
            }
        }
        Ok(solution)
    }
}

/// Jordan type of a nilpotent matrix, from the rank sequence of its powers.
pub fn jordan_type(u: &Matrix) -> Result<Partition, LinalgError> {
    if !u.is_square() {
        return Err(LinalgError::NotSquare);
    }
    let n = u.rows();
    let mut ranks = vec![n];
    let mut p = Matrix::identity(n);
    while *ranks.last().unwrap() > 0 {
        if ranks.len() > n {
            return Err(LinalgError::NotNilpotent);
        }
        p = p.mul(u);
        let r = p.rank();
        if r == *ranks.last().unwrap() {
            return Err(LinalgError::NotNilpotent);
        }
        ranks.push(r);
    }
    // number of parts >= k is ranks[k-1] - ranks[k]
    let at_least: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
    let mut parts = Vec::new();
    for (k, &cnt) in at_least.iter().enumerate() {
        let longer = at_least.get(k + 1).copied().unwrap_or(0);
        parts.extend(std::iter::repeat_n(k + 1, cnt - longer));
    }
    Ok(Partition::new(parts))
}

pub fn is_nilpotent(u: &Matrix) -> bool {
    u.is_square() && u.pow(u.rows() as u32).is_zero()
}

/// The linear map `X ↦ a X − X b` on `rows(a) x rows(b)` matrices, as a
/// matrix acting on row-major vectorizations.
fn sylvester_operator(a: &Matrix, b: &Matrix) -> Matrix {
    let (p, q) = (a.rows(), b.rows());
    let mut op = Matrix::zeros(p * q, p * q);
    for r in 0..p {
        for c in 0..q {
            let row = r * q + c;
            // (a X)_{r,c} = Σ_k a_{r,k} X_{k,c}
            for k in 0..p {
                let v = a.get(r, k);
                if !v.is_zero() {
                    let col = k * q + c;
                    let cur = op.get(row, col) + v;
                    op.set(row, col, cur);
                }
            }
            // (X b)_{r,c} = Σ_k X_{r,k} b_{k,c}
            for k in 0..q {
                let v = b.get(k, c);
                if !v.is_zero() {
                    let col = r * q + k;
                    let cur = op.get(row, col) - v;
                    op.set(row, col, cur);
                }
            }
        }
    }
    op
}

/// `dim {m : u m = m u}` by an exact kernel computation of the commutator map.
pub fn centralizer_dim(u: &Matrix) -> usize {
    assert!(u.is_square(), "centralizer of a non-square matrix");
    let n = u.rows();
    n * n - sylvester_operator(u, u).rank()
}

/// Centralizer dimension of a block-diagonal matrix, solving the commutant
/// equations `b_i X = X b_j` separately for every ordered pair of blocks.
pub fn centralizer_dim_blocks(blocks: &[Matrix]) -> usize {
    let mut dim = 0;
    for a in blocks {
        for b in blocks {
            let op = sylvester_operator(a, b);
            dim += op.cols() - op.rank();
        }
    }
    dim
}

/// Nilpotent Jordan block of size `k`: ones on the superdiagonal.
pub fn jordan_block(k: usize) -> Matrix {
    Matrix::from_fn(k, k, |r, c| {
        if c == r + 1 {
            Rational::one()
        } else {
            Rational::zero()
        }
    })
}

/// Block-diagonal nilpotent with Jordan blocks of the given sizes.
pub fn standard_nilpotent(lambda: &Partition) -> Matrix {
    let blocks: Vec<Matrix> = lambda.parts().iter().map(|&k| jordan_block(k)).collect();
    Matrix::block_diag(&blocks)
}

/// Centralizer dimension of `standard_nilpotent(lambda)` via per-block
/// commutant solves.
pub fn standard_centralizer_dim(lambda: &Partition) -> usize {
    let blocks: Vec<Matrix> = lambda.parts().iter().map(|&k| jordan_block(k)).collect();
    centralizer_dim_blocks(&blocks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec())
    }

    #[test]
    fn jordan_type_examples() {
        assert_eq!(jordan_type(&Matrix::zeros(3, 3)).unwrap(), p(&[1, 1, 1]));
        assert_eq!(jordan_type(&jordan_block(3)).unwrap(), p(&[3]));
        let u = Matrix::block_diag(&[jordan_block(2), jordan_block(1)]);
        assert_eq!(jordan_type(&u).unwrap(), p(&[2, 1]));
        assert_eq!(
            jordan_type(&Matrix::identity(2)),
            Err(LinalgError::NotNilpotent)
        );
        assert_eq!(
            jordan_type(&Matrix::from_i64(&[&[0, 1], &[0, 1]])),
            Err(LinalgError::NotNilpotent)
        );
        assert_eq!(jordan_type(&Matrix::zeros(0, 0)).unwrap(), p(&[]));
    }

    #[test]
    fn jordan_type_is_conjugation_invariant() {
        let u = standard_nilpotent(&p(&[3, 2, 2, 1]));
        let g = Matrix::from_fn(8, 8, |r, c| {
            Rational::from_int(if r == c { 1 } else if c > r { (r + 2 * c) as i64 % 3 } else { 0 })
        });
        let conj = g.mul(&u).mul(&g.inverse().unwrap());
        assert_eq!(jordan_type(&conj).unwrap(), p(&[3, 2, 2, 1]));
    }

    #[test]
    fn centralizer_examples() {
        assert_eq!(centralizer_dim(&Matrix::zeros(3, 3)), 9);
        assert_eq!(centralizer_dim(&jordan_block(3)), 3);
        let u = Matrix::block_diag(&[jordan_block(2), jordan_block(1)]);
        assert_eq!(centralizer_dim(&u), 5);
        assert_eq!(centralizer_dim(&Matrix::identity(2)), 4);
    }

    #[test]
    fn standard_nilpotent_examples() {
        assert_eq!(standard_nilpotent(&p(&[1])), Matrix::zeros(1, 1));
        assert_eq!(
            standard_nilpotent(&p(&[2])),
            Matrix::from_i64(&[&[0, 1], &[0, 0]])
        );
        assert_eq!(
            standard_nilpotent(&p(&[2, 1])),
            Matrix::from_i64(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]])
        );
    }

    #[test]
    fn standard_nilpotent_roundtrips_through_jordan_type() {
        for n in 0..=12 {
            for lam in Partition::all(n) {
                assert_eq!(jordan_type(&standard_nilpotent(&lam)).unwrap(), lam);
            }
        }
    }

    #[test]
    fn commutant_solve_matches_min_formula() {
        for n in 1..=8 {
            for lam in Partition::all(n) {
                let u = standard_nilpotent(&lam);
                let f = lam.centralizer_formula();
                assert_eq!(centralizer_dim(&u), f, "{lam}");
                assert_eq!(standard_centralizer_dim(&lam), f, "{lam}");
            }
        }
    }

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn solve_affine_examples() {
        let m = Matrix::from_i64(&[&[1, 2], &[3, 4]]);
        let x = solve_affine(1, (2, 2), &[AffineEquation::new(vec![(0, q(1))], m.clone())]).unwrap();
        assert_eq!(x, vec![m.clone()]);

        let sys = [
            AffineEquation::new(vec![(0, q(1)), (1, q(1))], m.clone()),
            AffineEquation::new(vec![(1, q(2))], m.clone()),
        ];
        let x = solve_affine(2, (2, 2), &sys).unwrap();
        let half = m.scale(&Rational::new(1, 2));
        assert_eq!(x, vec![half.clone(), half]);

        let sing = [
            AffineEquation::new(vec![(0, q(1)), (1, q(1))], m.clone()),
            AffineEquation::new(vec![(0, q(2)), (1, q(2))], m.scale(&q(2))),
        ];
        assert_eq!(solve_affine(2, (2, 2), &sing), Err(LinalgError::NonUniqueSolution));

        let bad = [AffineEquation::new(vec![(0, q(1))], Matrix::zeros(1, 2))];
        assert!(matches!(
            solve_affine(1, (2, 2), &bad),
            Err(LinalgError::ShapeMismatch(_))
        ));

        let inconsistent = [
            AffineEquation::new(vec![(0, q(1))], m.clone()),
            AffineEquation::new(vec![(0, q(1))], Matrix::zeros(2, 2)),
        ];
        assert_eq!(solve_affine(1, (2, 2), &inconsistent), Err(LinalgError::Inconsistent));
    }

    /// One X and one Y: X + Y = ν·P, α·Y = β·X. Eliminating by hand gives
    /// X = α/(α+β)·νP and Y = β/(α+β)·νP.
    #[test]
    fn two_unknown_chain_closed_form() {
        let p = Matrix::from_i64(&[&[1, -2], &[0, 5]]);
        let (nu, alpha, beta) = (q(3), q(2), q(1));
        let sys = [
            AffineEquation::new(vec![(0, q(1)), (1, q(1))], p.scale(&nu)),
            AffineEquation::new(vec![(1, alpha.clone()), (0, -&beta)], Matrix::zeros(2, 2)),
        ];
        let x = solve_affine(2, (2, 2), &sys).unwrap();
        let s = &alpha + &beta;
        assert_eq!(x[0], p.scale(&(&(&alpha * &nu) / &s)));
        assert_eq!(x[1], p.scale(&(&(&beta * &nu) / &s)));
    }
}
