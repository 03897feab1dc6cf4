//! Dense matrices over a finite field: solving, rank, inversion and
//! Vandermonde systems.
//!
//! Everything is plain Gaussian elimination with the first nonzero entry as
//! pivot. Sizes stay in the hundreds, so no blocking is attempted.

use thiserror::Error;

use crate::ffield::{FieldCtx, FieldElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("repeated Vandermonde point at positions {0} and {1}")]
    RepeatedPoints(usize, usize),
    #[error("overdetermined system is inconsistent")]
    Inconsistent,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    ctx: FieldCtx,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl Matrix {
    pub fn zeros(ctx: &FieldCtx, rows: usize, cols: usize) -> Self {
        Matrix {
            ctx: ctx.clone(),
            rows,
            cols,
            data: vec![ctx.zero(); rows * cols],
        }
    }

    pub fn identity(ctx: &FieldCtx, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, ctx.one());
        }
        m
    }

    /// Builds a matrix from row vectors, which must all have equal length.
    pub fn from_rows(ctx: &FieldCtx, rows: Vec<Vec<FieldElement>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Dimension("ragged rows".into()));
        }
        Ok(Matrix {
            ctx: ctx.clone(),
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &FieldElement {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[FieldElement]) -> Result<Vec<FieldElement>, LinalgError> {
        if x.len() != self.cols {
            return Err(LinalgError::Dimension(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = self.ctx.zero();
                for (a, b) in self.row(r).iter().zip(x) {
                    if !a.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(&self.ctx, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c) + &(a * other.get(k, c));
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    /// Reduces `self` in place to reduced row echelon form, applying the same
    /// row operations to `aug`. Returns the pivot columns.
    fn eliminate(&mut self, aug: &mut [Vec<FieldElement>]) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut prow = 0;
        for col in 0..self.cols {
            if prow == self.rows {
                break;
            }
            let Some(sel) = (prow..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            if sel != prow {
                for c in 0..self.cols {
                    self.data.swap(sel * self.cols + c, prow * self.cols + c);
                }
                for a in aug.iter_mut() {
                    a.swap(sel, prow);
                }
            }
            let inv = self.get(prow, col).inv().expect("pivot is nonzero");
            for c in col..self.cols {
                let v = self.get(prow, c) * &inv;
                self.set(prow, c, v);
            }
            for a in aug.iter_mut() {
                a[prow] = &a[prow] * &inv;
            }
            for r in 0..self.rows {
                if r == prow {
                    continue;
                }
                let f = self.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..self.cols {
                    let v = self.get(r, c) - &(&f * self.get(prow, c));
                    self.set(r, c, v);
                }
                for a in aug.iter_mut() {
                    a[r] = &a[r] - &(&f * &a[prow]);
                }
            }
            pivots.push(col);
            prow += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().eliminate(&mut []).len()
    }

    /// Solves `A x = b` for square nonsingular `A`.
    pub fn solve(&self, b: &[FieldElement]) -> Result<Vec<FieldElement>, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::Dimension(format!(
                "solve needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        self.solve_consistent(b)
    }

    /// Solves `A x = b` for `A` with full column rank (rows >= cols),
    /// checking that any surplus equations are satisfied.
    pub fn solve_consistent(&self, b: &[FieldElement]) -> Result<Vec<FieldElement>, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::Dimension(format!(
                "{} rows but right-hand side of length {}",
                self.rows,
                b.len()
            )));
        }
        let mut a = self.clone();
        let mut aug = vec![b.to_vec()];
        let pivots = a.eliminate(&mut aug);
        if pivots.len() < self.cols {
            return Err(LinalgError::Singular);
        }
        let rhs = &aug[0];
        if rhs[self.cols..].iter().any(|x| !x.is_zero()) {
            return Err(LinalgError::Inconsistent);
        }
        Ok(rhs[..self.cols].to_vec())
    }

    pub fn inverse(&self) -> Result<Matrix, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::Dimension("inverse needs a square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut aug: Vec<Vec<FieldElement>> = (0..n)
            .map(|c| (0..n).map(|r| if r == c { self.ctx.one() } else { self.ctx.zero() }).collect())
            .collect();
        if a.eliminate(&mut aug).len() < n {
            return Err(LinalgError::Singular);
        }
        let mut out = Matrix::zeros(&self.ctx, n, n);
        for (c, col) in aug.into_iter().enumerate() {
            for (r, v) in col.into_iter().enumerate() {
                out.set(r, c, v);
            }
        }
        Ok(out)
    }
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}x{} over {:?}", self.rows, self.cols, self.ctx)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// `rows × points.len()` matrix with entry `(w, t) = points[t]^w`.
pub fn vandermonde(ctx: &FieldCtx, points: &[FieldElement], rows: usize) -> Matrix {
    let mut m = Matrix::zeros(ctx, rows, points.len());
    for (t, x) in points.iter().enumerate() {
        let mut pw = ctx.one();
        for w in 0..rows {
            m.set(w, t, pw.clone());
            pw = &pw * x;
        }
    }
    m
}

/// Solves `V x = rhs` with `V_{w,t} = points[t]^w`, square.
pub fn vandermonde_solve(
    ctx: &FieldCtx,
    points: &[FieldElement],
    rhs: &[FieldElement],
) -> Result<Vec<FieldElement>, LinalgError> {
    if points.len() != rhs.len() {
        return Err(LinalgError::Dimension(format!(
            "{} points but {} right-hand values",
            points.len(),
            rhs.len()
        )));
    }
    check_distinct(points)?;
    vandermonde(ctx, points, points.len()).solve(rhs)
}

/// Errors with the first pair of equal entries.
pub fn check_distinct(points: &[FieldElement]) -> Result<(), LinalgError> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i] == points[j] {
                return Err(LinalgError::RepeatedPoints(i, j));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u64) -> FieldCtx {
        FieldCtx::prime(p).unwrap()
    }

    fn els(ctx: &FieldCtx, v: &[u64]) -> Vec<FieldElement> {
        v.iter().map(|&x| ctx.constant(x)).collect()
    }

    #[test]
    fn solve_small_system() {
        let f = gf(5);
        let a = Matrix::from_rows(&f, vec![els(&f, &[1, 1]), els(&f, &[1, 2])]).unwrap();
        assert_eq!(a.solve(&els(&f, &[0, 1])).unwrap(), els(&f, &[4, 1]));
    }

    #[test]
    fn identity_and_zero() {
        let f = gf(7);
        let b = els(&f, &[3, 5, 6]);
        assert_eq!(Matrix::identity(&f, 3).solve(&b).unwrap(), b);
        assert_eq!(Matrix::identity(&f, 4).rank(), 4);
        let z = Matrix::zeros(&f, 3, 3);
        assert_eq!(z.rank(), 0);
        assert_eq!(z.solve(&b).unwrap_err(), LinalgError::Singular);
    }

    #[test]
    fn vandermonde_examples() {
        let f = gf(5);
        assert_eq!(
            vandermonde_solve(&f, &els(&f, &[1]), &els(&f, &[3])).unwrap(),
            els(&f, &[3])
        );
        assert_eq!(
            vandermonde_solve(&f, &els(&f, &[1, 2]), &els(&f, &[0, 1])).unwrap(),
            els(&f, &[4, 1])
        );
        assert_eq!(
            vandermonde_solve(&f, &els(&f, &[1, 1]), &els(&f, &[0, 1])).unwrap_err(),
            LinalgError::RepeatedPoints(0, 1)
        );
    }

    #[test]
    fn overdetermined_consistency() {
        let f = gf(11);
        let pts = els(&f, &[1, 2, 3]);
        let v = vandermonde(&f, &pts, 5);
        let x = els(&f, &[4, 0, 9]);
        let b = v.mul_vec(&x).unwrap();
        assert_eq!(v.solve_consistent(&b).unwrap(), x);
        let mut bad = b.clone();
        bad[4] = &bad[4] + &f.one();
        assert_eq!(v.solve_consistent(&bad).unwrap_err(), LinalgError::Inconsistent);
    }

    #[test]
    fn inverse_round_trip() {
        let f = FieldCtx::extension(3, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rows = (0..5).map(|_| (0..5).map(|_| f.random(&mut rng)).collect()).collect();
        let a = Matrix::from_rows(&f, rows).unwrap();
        if let Ok(inv) = a.inverse() {
            assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(&f, 5));
        } else {
            assert!(a.rank() < 5);
        }
    }

    proptest! {
        #[test]
        fn solve_then_multiply_back(seed in any::<u64>(), n in 1usize..8) {
            let f = gf(101);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows = (0..n).map(|_| (0..n).map(|_| f.random(&mut rng)).collect()).collect();
            let a = Matrix::from_rows(&f, rows).unwrap();
            let b: Vec<_> = (0..n).map(|_| f.random(&mut rng)).collect();
            match a.solve(&b) {
                Ok(x) => prop_assert_eq!(a.mul_vec(&x).unwrap(), b),
                Err(e) => {
                    prop_assert_eq!(e, LinalgError::Singular);
                    prop_assert!(a.rank() < n);
                }
            }
        }

        #[test]
        fn vandermonde_agrees_with_generic(seed in any::<u64>(), n in 1usize..=12) {
            let f = FieldCtx::extension(2, 8).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pts: Vec<FieldElement> = Vec::new();
            while pts.len() < n {
                let x = f.random(&mut rng);
                if !pts.contains(&x) {
                    pts.push(x);
                }
            }
            let rhs: Vec<_> = (0..n).map(|_| f.random(&mut rng)).collect();
            let fast = vandermonde_solve(&f, &pts, &rhs).unwrap();
            let generic = vandermonde(&f, &pts, n).solve(&rhs).unwrap();
            prop_assert_eq!(fast, generic);
        }
    }
}
