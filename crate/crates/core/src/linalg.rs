//! Exact linear algebra over Q(ζ_r).
//!
//! Flats are named by the row space of their defining linear forms. The
//! canonical name of a row space is its reduced row echelon form with zero
//! rows dropped, which makes equality and hashing structural.

use thiserror::Error;

use crate::cyclotomic::CycNum;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {got}")]
    Shape {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },
    #[error("column count mismatch: {left} vs {right}")]
    Columns { left: usize, right: usize },
    #[error("root order mismatch: {left} vs {right}")]
    Order { left: u32, right: u32 },
}

/// Dense row-major matrix over Q(ζ_r).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycMatrix {
    order: u32,
    rows: usize,
    cols: usize,
    entries: Vec<CycNum>,
}

impl CycMatrix {
    pub fn new(order: u32, rows: usize, cols: usize, entries: Vec<CycNum>) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::Shape {
                rows,
                cols,
                expected: rows * cols,
                got: entries.len(),
            });
        }
        if let Some(bad) = entries.iter().find(|e| e.order() != order) {
            return Err(LinalgError::Order {
                left: order,
                right: bad.order(),
            });
        }
        Ok(CycMatrix {
            order,
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(order: u32, cols: usize, rows: Vec<Vec<CycNum>>) -> Result<Self, LinalgError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::Columns {
                    left: cols,
                    right: row.len(),
                });
            }
            entries.extend(row);
        }
        Self::new(order, n, cols, entries)
    }

    pub fn identity(order: u32, n: usize) -> Self {
        let zero = CycNum::zero(order).expect("positive order");
        let one = CycNum::one(order).expect("positive order");
        let entries = (0..n * n)
            .map(|i| if i / n == i % n { one.clone() } else { zero.clone() })
            .collect();
        CycMatrix {
            order,
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[CycNum] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[CycNum]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn get(&self, i: usize, j: usize) -> &CycNum {
        &self.entries[i * self.cols + j]
    }
}

/// Reduced row echelon form of a row space, zero rows dropped.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalRowSpace {
    rref: CycMatrix,
}

impl CanonicalRowSpace {
    /// The zero row space (no equations) in `cols` variables.
    pub fn empty(order: u32, cols: usize) -> Self {
        CanonicalRowSpace {
            rref: CycMatrix {
                order,
                rows: 0,
                cols,
                entries: Vec::new(),
            },
        }
    }

    pub fn matrix(&self) -> &CycMatrix {
        &self.rref
    }

    pub fn rank(&self) -> usize {
        self.rref.rows
    }

    pub fn cols(&self) -> usize {
        self.rref.cols
    }

    pub fn order(&self) -> u32 {
        self.rref.order
    }

    /// Pivot column of each row, strictly increasing.
    pub fn pivots(&self) -> Vec<usize> {
        self.rref
            .row_iter()
            .map(|row| row.iter().position(|c| !c.is_zero()).expect("rref rows are nonzero"))
            .collect()
    }

    fn reduce_vector(&self, v: &[CycNum]) -> Vec<CycNum> {
        let mut v = v.to_vec();
        for (row, p) in self.rref.row_iter().zip(self.pivots()) {
            if v[p].is_zero() {
                continue;
            }
            let c = v[p].clone();
            for (x, a) in v.iter_mut().zip(row) {
                if !a.is_zero() {
                    *x = &*x - &(&c * a);
                }
            }
        }
        v
    }

    /// Whether `v` lies in this row space. Panics if the lengths differ.
    pub fn contains_vector(&self, v: &[CycNum]) -> bool {
        assert_eq!(v.len(), self.cols(), "vector length must match column count");
        self.reduce_vector(v).iter().all(CycNum::is_zero)
    }

    /// The row space spanned by `self` and the extra vector `v`.
    pub fn with_row(&self, v: &[CycNum]) -> Self {
        assert_eq!(v.len(), self.cols(), "vector length must match column count");
        let mut v = self.reduce_vector(v);
        let Some(p) = v.iter().position(|c| !c.is_zero()) else {
            return self.clone();
        };
        let inv = v[p].inv().expect("nonzero pivot");
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        let cols = self.cols();
        let mut rows: Vec<Vec<CycNum>> = Vec::with_capacity(self.rank() + 1);
        for row in self.rref.row_iter() {
            let mut row = row.to_vec();
            if !row[p].is_zero() {
                let c = row[p].clone();
                for (x, a) in row.iter_mut().zip(&v) {
                    if !a.is_zero() {
                        *x = &*x - &(&c * a);
                    }
                }
            }
            rows.push(row);
        }
        let at = self.pivots().iter().take_while(|&&q| q < p).count();
        rows.insert(at, v);
        let rank = rows.len();
        CanonicalRowSpace {
            rref: CycMatrix {
                order: self.order(),
                rows: rank,
                cols,
                entries: rows.into_iter().flatten().collect(),
            },
        }
    }
}

/// Gauss-Jordan elimination: leftmost nonzero column first, first nonzero row
/// as pivot, pivots scaled to 1 and cleared above and below.
pub fn rref(m: &CycMatrix) -> CanonicalRowSpace {
    let cols = m.cols;
    let mut rows: Vec<Vec<CycNum>> = m.row_iter().map(<[CycNum]>::to_vec).collect();
    let mut rank = 0;
    for col in 0..cols {
        let Some(found) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, found);
        let inv = rows[rank][col].inv().expect("nonzero pivot");
        for x in rows[rank].iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == rank || row[col].is_zero() {
                continue;
            }
            let c = row[col].clone();
            for (x, a) in row.iter_mut().zip(&pivot_row) {
                if !a.is_zero() {
                    *x = &*x - &(&c * a);
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    CanonicalRowSpace {
        rref: CycMatrix {
            order: m.order,
            rows: rank,
            cols,
            entries: rows.into_iter().flatten().collect(),
        },
    }
}

fn check_compatible(order_a: u32, cols_a: usize, order_b: u32, cols_b: usize) -> Result<(), LinalgError> {
    if order_a != order_b {
        return Err(LinalgError::Order {
            left: order_a,
            right: order_b,
        });
    }
    if cols_a != cols_b {
        return Err(LinalgError::Columns {
            left: cols_a,
            right: cols_b,
        });
    }
    Ok(())
}

/// True iff every row of `b` lies in the row space of `a`.
///
/// For equation spaces this says the solution set of `a` is contained in the
/// solution set of `b`.
pub fn row_space_contains(a: &CanonicalRowSpace, b: &CanonicalRowSpace) -> Result<bool, LinalgError> {
    check_compatible(a.order(), a.cols(), b.order(), b.cols())?;
    Ok(b.rref.row_iter().all(|row| a.contains_vector(row)))
}

/// Canonical row space of the rows of `a` together with the rows of `rows`.
pub fn stack_and_reduce(a: &CanonicalRowSpace, rows: &CycMatrix) -> Result<CanonicalRowSpace, LinalgError> {
    check_compatible(a.order(), a.cols(), rows.order, rows.cols)?;
    Ok(rows.row_iter().fold(a.clone(), |acc, row| acc.with_row(row)))
}

/// Basis of `{ v : m v = 0 }`, one vector per row of the result.
pub fn null_space(m: &CycMatrix) -> CycMatrix {
    let reduced = rref(m);
    let pivots = reduced.pivots();
    let cols = m.cols;
    let zero = CycNum::zero(m.order).expect("positive order");
    let one = CycNum::one(m.order).expect("positive order");
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![zero.clone(); cols];
        v[free] = one.clone();
        for (row, &p) in reduced.rref.row_iter().zip(&pivots) {
            v[p] = -&row[free];
        }
        basis.push(v);
    }
    CycMatrix::from_rows(m.order, cols, basis).expect("rows have the right length")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(r: u32, k: i64) -> CycNum {
        CycNum::zeta_pow(r, k).unwrap()
    }

    fn c(r: u32, v: i64) -> CycNum {
        CycNum::from_int(r, v).unwrap()
    }

    fn space(r: u32, cols: usize, rows: Vec<Vec<CycNum>>) -> CanonicalRowSpace {
        rref(&CycMatrix::from_rows(r, cols, rows).unwrap())
    }

    #[test]
    fn identity_is_reduced() {
        let id = CycMatrix::identity(3, 3);
        let s = rref(&id);
        assert_eq!(s.rank(), 3);
        assert_eq!(s.matrix(), &id);
    }

    #[test]
    fn dependent_rows_over_q_zeta3() {
        // (-ζ^{2}, 1) = -ζ^{-1} (1, -ζ)
        let s = space(3, 2, vec![vec![c(3, 1), -z(3, 1)], vec![-z(3, 2), c(3, 1)]]);
        assert_eq!(s.rank(), 1);
        assert_eq!(s.matrix().row(0), &[c(3, 1), -z(3, 1)][..]);
    }

    #[test]
    fn zero_matrix() {
        let s = space(2, 3, vec![vec![c(2, 0), c(2, 0), c(2, 0)]]);
        assert_eq!(s.rank(), 0);
        assert_eq!(s, CanonicalRowSpace::empty(2, 3));
    }

    #[test]
    fn containment() {
        let r = 3;
        let x1 = vec![c(r, 1), c(r, 0), c(r, 0)];
        let x2 = vec![c(r, 0), c(r, 1), c(r, 0)];
        let a = space(r, 3, vec![x1.clone(), x2]);
        let b = space(r, 3, vec![x1.clone()]);
        assert!(row_space_contains(&a, &b).unwrap());
        let diff = space(r, 3, vec![vec![c(r, 1), c(r, -1), c(r, 0)]]);
        assert!(!row_space_contains(&diff, &b).unwrap());

        // x1 = ζ x2 and x2 = ζ x3 imply x1 = ζ^2 x3.
        let flat = space(
            r,
            3,
            vec![vec![c(r, 1), -z(r, 1), c(r, 0)], vec![c(r, 0), c(r, 1), -z(r, 1)]],
        );
        let implied = space(r, 3, vec![vec![c(r, 1), c(r, 0), -(&z(r, 1) * &z(r, 1))]]);
        assert!(row_space_contains(&flat, &implied).unwrap());
        let wrong = space(r, 3, vec![vec![c(r, 1), c(r, 0), -z(r, 1)]]);
        assert!(!row_space_contains(&flat, &wrong).unwrap());
    }

    #[test]
    fn dimension_mismatch() {
        let a = CanonicalRowSpace::empty(2, 3);
        let b = CanonicalRowSpace::empty(2, 2);
        assert!(matches!(row_space_contains(&a, &b), Err(LinalgError::Columns { .. })));
        let b = CanonicalRowSpace::empty(3, 3);
        assert!(matches!(row_space_contains(&a, &b), Err(LinalgError::Order { .. })));
        assert!(CycMatrix::new(2, 2, 2, vec![c(2, 1)]).is_err());
    }

    #[test]
    fn stacking() {
        let r = 2;
        let x1 = space(r, 2, vec![vec![c(r, 1), c(r, 0)]]);
        let again = CycMatrix::from_rows(r, 2, vec![vec![c(r, 1), c(r, 0)]]).unwrap();
        assert_eq!(stack_and_reduce(&x1, &again).unwrap(), x1);
        let x2 = CycMatrix::from_rows(r, 2, vec![vec![c(r, 0), c(r, 1)]]).unwrap();
        assert_eq!(stack_and_reduce(&x1, &x2).unwrap().rank(), 2);
        // x1 - ζ x2 with ζ = -1 is x1 + x2; adding x1 - x2 gives full rank.
        let plus = space(r, 2, vec![vec![c(r, 1), -z(r, 1)]]);
        let minus = CycMatrix::from_rows(r, 2, vec![vec![c(r, 1), c(r, -1)]]).unwrap();
        assert_eq!(stack_and_reduce(&plus, &minus).unwrap().rank(), 2);
    }

    #[test]
    fn null_space_is_annihilator() {
        let r = 3;
        let m = CycMatrix::from_rows(r, 3, vec![vec![c(r, 1), z(r, 1), c(r, 0)]]).unwrap();
        let ns = null_space(&m);
        assert_eq!(ns.rows(), 2);
        for v in ns.row_iter() {
            let dot = m
                .row(0)
                .iter()
                .zip(v)
                .fold(c(r, 0), |acc, (a, b)| &acc + &(a * b));
            assert!(dot.is_zero());
        }
    }
}
