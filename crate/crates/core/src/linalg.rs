//! Exact rational linear algebra for the truncated complexes: rank, kernel
//! and membership computations.
//!
//! Elimination is fraction-free (Bareiss) over integers after clearing row
//! denominators, so intermediate entries stay integral; back-substitution
//! reintroduces rationals only at the end. Column processing is strictly
//! left to right, which keeps pivot sets, kernels and representatives
//! deterministic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rational = BigRational;

/// Dense matrix of exact rationals, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        QMatrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_columns(cols: Vec<Vec<Rational>>, rows: usize) -> Self {
        let c = cols.len();
        let mut m = QMatrix::zero(rows, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn transpose(&self) -> QMatrix {
        let mut out = QMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        let c = self.cols;
        &mut self.data[i * c + j]
    }
}

/// Integer row-echelon form computed by fraction-free Bareiss elimination
/// (below-pivot only; exact divisions by the previous pivot).
struct IntEchelon {
    /// pivot rows in pivot order; zeros left of each pivot
    rows: Vec<Vec<BigInt>>,
    /// column index of the pivot of each retained row
    pivots: Vec<usize>,
}

fn clear_denominators(row: &[Rational]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for v in row {
        let d = v.denom();
        let g = num_integer::Integer::gcd(&lcm, d);
        lcm = lcm / g * d;
    }
    row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect()
}

// row r and row i are updated against each other, so plain indexing it is
#[allow(clippy::needless_range_loop)]
fn bareiss(matrix: &QMatrix) -> IntEchelon {
    let mut rows: Vec<Vec<BigInt>> = (0..matrix.rows)
        .map(|i| {
            clear_denominators(
                &(0..matrix.cols)
                    .map(|j| matrix[(i, j)].clone())
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0usize;
    for col in 0..matrix.cols {
        let Some(sel) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, sel);
        let pivot = rows[r][col].clone();
        for i in r + 1..rows.len() {
            let factor = rows[i][col].clone();
            for j in 0..matrix.cols {
                if j == col {
                    continue;
                }
                let v = &pivot * &rows[i][j] - &factor * &rows[r][j];
                rows[i][j] = &v / &prev;
            }
            rows[i][col] = BigInt::zero();
        }
        prev = pivot;
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(pivots.len());
    IntEchelon { rows, pivots }
}

/// Rank by fraction-free elimination.
pub fn rank(matrix: &QMatrix) -> usize {
    bareiss(matrix).pivots.len()
}

/// Basis of the null space `{x : A x = 0}`, one vector per free column,
/// in ascending free-column order.
pub fn kernel_basis(matrix: &QMatrix) -> Vec<Vec<Rational>> {
    let ech = bareiss(matrix);
    let mut out = Vec::new();
    for free in 0..matrix.cols {
        if ech.pivots.contains(&free) {
            continue;
        }
        let mut x = vec![Rational::zero(); matrix.cols];
        x[free] = Rational::one();
        for (row, &pc) in ech.rows.iter().zip(ech.pivots.iter()).rev() {
            let mut acc = Rational::zero();
            for j in pc + 1..matrix.cols {
                if !row[j].is_zero() && !x[j].is_zero() {
                    acc += Rational::from(row[j].clone()) * &x[j];
                }
            }
            x[pc] = -acc / Rational::from(row[pc].clone());
        }
        out.push(x);
    }
    out
}

/// Reduced row basis of the span of the given rows (RREF nonzero rows).
pub fn row_basis(rows: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let m = QMatrix::from_rows(rows.to_vec());
    let ech = bareiss(&m);
    ech.rows
        .iter()
        .zip(ech.pivots.iter())
        .map(|(row, &pc)| {
            let pivot = Rational::from(row[pc].clone());
            row.iter()
                .map(|v| Rational::from(v.clone()) / &pivot)
                .collect()
        })
        .collect()
}

/// Remainder of `target` after eliminating against the span of `rows`;
/// zero iff `target` lies in the span.
pub fn reduce_against_rows(rows: &[Vec<Rational>], target: &[Rational]) -> Vec<Rational> {
    let basis = row_basis(rows);
    let mut residual: Vec<Rational> = target.to_vec();
    for row in &basis {
        let lead = row
            .iter()
            .position(|v| !v.is_zero())
            .expect("basis rows are nonzero");
        if residual[lead].is_zero() {
            continue;
        }
        let factor = residual[lead].clone();
        for (r, b) in residual.iter_mut().zip(row.iter()) {
            *r -= &factor * b;
        }
    }
    residual
}

/// A solution of `A x = b` when consistent (free variables set to zero).
pub fn solve(matrix: &QMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(b.len(), matrix.rows);
    // eliminate on the augmented matrix
    let mut aug = QMatrix::zero(matrix.rows, matrix.cols + 1);
    for i in 0..matrix.rows {
        for j in 0..matrix.cols {
            aug[(i, j)] = matrix[(i, j)].clone();
        }
        aug[(i, matrix.cols)] = b[i].clone();
    }
    let ech = bareiss(&aug);
    if ech.pivots.contains(&matrix.cols) {
        return None; // pivot in the augmented column: inconsistent
    }
    let mut x = vec![Rational::zero(); matrix.cols];
    for (row, &pc) in ech.rows.iter().zip(ech.pivots.iter()).rev() {
        let mut acc = Rational::from(row[matrix.cols].clone());
        for j in pc + 1..matrix.cols {
            if !row[j].is_zero() && !x[j].is_zero() {
                acc -= Rational::from(row[j].clone()) * &x[j];
            }
        }
        x[pc] = acc / Rational::from(row[pc].clone());
    }
    Some(x)
}

/// Indices completing the row space of `rows` to the full ambient space with
/// standard basis vectors, in ascending order (the non-pivot coordinates).
pub fn cokernel_representatives(rows: &[Vec<Rational>], dim: usize) -> Vec<usize> {
    if rows.is_empty() {
        return (0..dim).collect();
    }
    let ech = bareiss(&QMatrix::from_rows(rows.to_vec()));
    (0..dim).filter(|j| !ech.pivots.contains(j)).collect()
}

/// Exact inverse of a square matrix; `None` when singular.
pub fn inverse(matrix: &QMatrix) -> Option<QMatrix> {
    assert_eq!(matrix.rows, matrix.cols);
    let n = matrix.rows;
    let mut out = QMatrix::zero(n, n);
    for j in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[j] = Rational::one();
        let col = solve(matrix, &e)?;
        for i in 0..n {
            out[(i, j)] = col[i].clone();
        }
    }
    // solve() returns a least-committal solution; for square systems verify
    let mut check_ok = true;
    'outer: for i in 0..n {
        for k in 0..n {
            let mut acc = Rational::zero();
            for j in 0..n {
                acc += &matrix[(i, j)] * &out[(j, k)];
            }
            let expected = if i == k {
                Rational::one()
            } else {
                Rational::zero()
            };
            if acc != expected {
                check_ok = false;
                break 'outer;
            }
        }
    }
    check_ok.then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat_int;

    fn q(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rat_int(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_and_kernel_small() {
        let m = q(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(rank(&m), 2);
        let ker = kernel_basis(&m);
        assert_eq!(ker.len(), 1);
        for row in 0..3 {
            let mut acc = Rational::zero();
            for j in 0..3 {
                acc += &m[(row, j)] * &ker[0][j];
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn kernel_of_zero_matrix_is_everything() {
        let m = QMatrix::zero(2, 3);
        assert_eq!(rank(&m), 0);
        assert_eq!(kernel_basis(&m).len(), 3);
    }

    #[test]
    fn reduce_membership() {
        let rows = vec![
            vec![rat_int(1), rat_int(0), rat_int(1)],
            vec![rat_int(0), rat_int(1), rat_int(1)],
        ];
        let inside = vec![rat_int(2), rat_int(3), rat_int(5)];
        assert!(reduce_against_rows(&rows, &inside)
            .iter()
            .all(|v| v.is_zero()));
        let outside = vec![rat_int(0), rat_int(0), rat_int(1)];
        assert!(!reduce_against_rows(&rows, &outside)
            .iter()
            .all(|v| v.is_zero()));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = q(&[&[1, 1], &[0, 1], &[1, 2]]);
        let b = vec![rat_int(3), rat_int(1), rat_int(4)];
        let x = solve(&m, &b).unwrap();
        assert_eq!(x, vec![rat_int(2), rat_int(1)]);
        let bad = vec![rat_int(3), rat_int(1), rat_int(5)];
        assert!(solve(&m, &bad).is_none());
    }

    #[test]
    fn inverse_small() {
        let m = q(&[&[0, 1], &[-1, 0]]);
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, q(&[&[0, -1], &[1, 0]]));
        assert!(inverse(&q(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn rank_with_rational_entries() {
        let m = QMatrix::from_rows(vec![
            vec![crate::ring::rat(1, 2), crate::ring::rat(1, 3)],
            vec![crate::ring::rat(3, 2), crate::ring::rat(1, 1)],
        ]);
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn rank_random_consistency() {
        // rank(A) == rank(A^T) on random small matrices
        use rand::Rng;
        let mut rng = crate::sampling::rng(113);
        for _ in 0..30 {
            let rows = rng.gen_range(1..=5);
            let cols = rng.gen_range(1..=5);
            let mut m = QMatrix::zero(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    m[(i, j)] = rat_int(rng.gen_range(-3..=3));
                }
            }
            assert_eq!(rank(&m), rank(&m.transpose()));
            let ker = kernel_basis(&m);
            assert_eq!(rank(&m) + ker.len(), cols);
            for k in &ker {
                for i in 0..rows {
                    let mut acc = Rational::zero();
                    for j in 0..cols {
                        acc += &m[(i, j)] * &k[j];
                    }
                    assert!(acc.is_zero(), "kernel vector not annihilated");
                }
            }
        }
    }

    /// Plain rational Gaussian elimination, the independent oracle for the
    /// fraction-free route.
    #[allow(clippy::needless_range_loop)]
    fn naive_rank(m: &QMatrix) -> usize {
        let mut rows: Vec<Vec<Rational>> = (0..m.rows)
            .map(|i| (0..m.cols).map(|j| m[(i, j)].clone()).collect())
            .collect();
        let mut r = 0;
        for col in 0..m.cols {
            let Some(sel) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(r, sel);
            let pivot = rows[r][col].clone();
            for i in r + 1..rows.len() {
                let factor = &rows[i][col] / &pivot;
                if factor.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    let sub = &factor * &rows[r][j];
                    rows[i][j] -= sub;
                }
            }
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        r
    }

    #[test]
    fn bareiss_matches_naive_elimination() {
        use rand::Rng;
        let mut rng = crate::sampling::rng(149);
        for _ in 0..60 {
            let rows = rng.gen_range(1..=6);
            let cols = rng.gen_range(1..=6);
            let mut m = QMatrix::zero(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    // rational entries with repeated rows sprinkled in
                    m[(i, j)] = crate::ring::rat(rng.gen_range(-4..=4), rng.gen_range(1..=3));
                }
            }
            if rows >= 2 && rng.gen_bool(0.4) {
                let dup: Vec<Rational> = (0..cols).map(|j| m[(0, j)].clone()).collect();
                for (j, v) in dup.into_iter().enumerate() {
                    m[(rows - 1, j)] = v;
                }
            }
            assert_eq!(rank(&m), naive_rank(&m));
        }
    }
}
