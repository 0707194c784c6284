//! Symmetric matrices over exact rationals.
//!
//! Intersection forms are small (tens of rows) but their entries compound
//! through repeated pushforward, so determinants are computed by fraction-free
//! Bareiss elimination on an integer-scaled copy: intermediate values stay
//! integral and every division is exact. Negative definiteness uses the
//! Sylvester criterion on the negated matrix.

use crate::rational::Rat;
use num::bigint::BigInt;
use num::{Integer, One, Zero};

/// Errors from the exact linear algebra layer.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("matrix is not symmetric at ({i},{j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("singular matrix: no solution")]
    SingularMatrix,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// A symmetric matrix with `Rat` entries.
///
/// Invariant: `get(i, j) == get(j, i)` always; `set` writes both triangles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymMatrix {
    n: usize,
    a: Vec<Rat>,
}

impl SymMatrix {
    pub fn zero(n: usize) -> Self {
        SymMatrix {
            n,
            a: vec![Rat::zero(); n * n],
        }
    }

    /// Builds from full rows, verifying squareness and symmetry.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self, LinalgError> {
        let n = rows.len();
        let mut a = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(LinalgError::Dimension {
                    expected: n,
                    got: row.len(),
                });
            }
            a.extend(row.iter().cloned());
        }
        let m = SymMatrix { n, a };
        for i in 0..n {
            for j in (i + 1)..n {
                if m.get(i, j) != m.get(j, i) {
                    return Err(LinalgError::NotSymmetric { i, j });
                }
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.a[i * self.n + j] = v.clone();
        self.a[j * self.n + i] = v;
    }

    pub fn negated(&self) -> SymMatrix {
        SymMatrix {
            n: self.n,
            a: self.a.iter().map(|x| -x).collect(),
        }
    }

    /// The principal submatrix on the given (distinct) index set.
    pub fn principal_submatrix(&self, keep: &[usize]) -> SymMatrix {
        let k = keep.len();
        let mut a = Vec::with_capacity(k * k);
        for &i in keep {
            for &j in keep {
                a.push(self.get(i, j).clone());
            }
        }
        SymMatrix { n: k, a }
    }

    /// Exact determinant by fraction-free elimination.
    ///
    /// The matrix is scaled by the lcm of all entry denominators to an
    /// integer matrix, Bareiss elimination runs there (every division exact),
    /// and the result is divided back by `lcm^n`.
    pub fn determinant(&self) -> Rat {
        let n = self.n;
        if n == 0 {
            return Rat::one();
        }
        let mut lcm = BigInt::one();
        for x in &self.a {
            lcm = lcm.lcm(x.denom());
        }
        let mut m: Vec<BigInt> = self
            .a
            .iter()
            .map(|x| x.numer() * (&lcm / x.denom()))
            .collect();
        let det = bareiss_int_det(&mut m, n);
        let mut scale = BigInt::one();
        for _ in 0..n {
            scale *= &lcm;
        }
        Rat::from_big(det, scale)
    }

    /// Leading principal minor of order `k` (1-based size).
    pub fn leading_minor(&self, k: usize) -> Rat {
        let keep: Vec<usize> = (0..k).collect();
        self.principal_submatrix(&keep).determinant()
    }

    /// Sylvester criterion: all leading principal minors of the negated
    /// matrix are strictly positive. The empty matrix is negative definite.
    pub fn is_negative_definite(&self) -> bool {
        let neg = self.negated();
        (1..=self.n).all(|k| neg.leading_minor(k).is_positive())
    }

    /// Solves `M x = rhs` exactly by Gaussian elimination.
    pub fn solve(&self, rhs: &[Rat]) -> Result<Vec<Rat>, LinalgError> {
        let n = self.n;
        if rhs.len() != n {
            return Err(LinalgError::Dimension {
                expected: n,
                got: rhs.len(),
            });
        }
        let mut m: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                let mut row: Vec<Rat> = (0..n).map(|j| self.get(i, j).clone()).collect();
                row.push(rhs[i].clone());
                row
            })
            .collect();
        for col in 0..n {
            let pivot_row = (col..n)
                .find(|&r| !m[r][col].is_zero())
                .ok_or(LinalgError::SingularMatrix)?;
            m.swap(col, pivot_row);
            let pivot = m[col][col].clone();
            let pivot_row = m[col].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r == col || row[col].is_zero() {
                    continue;
                }
                let factor = &row[col] / &pivot;
                for (cell, pivot_cell) in row.iter_mut().zip(&pivot_row).skip(col) {
                    let delta = &factor * pivot_cell;
                    let cur = std::mem::replace(cell, Rat::zero());
                    *cell = cur - delta;
                }
            }
        }
        Ok((0..n).map(|i| &m[i][n] / &m[i][i]).collect())
    }

    /// Row-vector product `a * M`.
    pub fn row_mul(&self, a: &[Rat]) -> Result<Vec<Rat>, LinalgError> {
        if a.len() != self.n {
            return Err(LinalgError::Dimension {
                expected: self.n,
                got: a.len(),
            });
        }
        Ok((0..self.n)
            .map(|j| (0..self.n).map(|i| &a[i] * self.get(i, j)).sum())
            .collect())
    }

    pub fn rows(&self) -> Vec<Vec<Rat>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }
}

impl serde::Serialize for SymMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for SymMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<Rat>>::deserialize(d)?;
        SymMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// Bareiss elimination on a row-major integer matrix; returns the determinant.
fn bareiss_int_det(m: &mut [BigInt], n: usize) -> BigInt {
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k * n + k].is_zero() {
            let swap = ((k + 1)..n).find(|&r| !m[r * n + k].is_zero());
            match swap {
                None => return BigInt::zero(),
                Some(r) => {
                    for c in 0..n {
                        m.swap(k * n + c, r * n + c);
                    }
                    sign = -sign;
                }
            }
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let num = &m[i * n + j] * &m[k * n + k] - &m[i * n + k] * &m[k * n + j];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero(), "Bareiss division not exact");
                m[i * n + j] = q;
            }
        }
        prev = m[k * n + k].clone();
    }
    let det = m[(n - 1) * n + (n - 1)].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Checks the sign-solution implication on a negative definite matrix with
/// non-negative off-diagonal entries: if every entry of `a * M` is
/// non-negative then every `a_i` must be non-positive.
///
/// Returns the truth value of the implication for the given data. For any
/// matrix satisfying the precondition the implication is a theorem, so a
/// `false` return signals corrupted inputs.
pub fn sign_solution_check(m: &SymMatrix, a: &[Rat]) -> Result<bool, LinalgError> {
    for i in 0..m.size() {
        for j in 0..m.size() {
            if i != j && m.get(i, j).is_negative() {
                return Err(LinalgError::PreconditionViolated(format!(
                    "off-diagonal entry ({i},{j}) is negative"
                )));
            }
        }
    }
    if !m.is_negative_definite() {
        return Err(LinalgError::PreconditionViolated(
            "matrix is not negative definite".to_string(),
        ));
    }
    let v = m.row_mul(a)?;
    if v.iter().any(|x| x.is_negative()) {
        return Ok(true);
    }
    Ok(a.iter().all(|x| !x.is_positive()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn mat(rows: &[&[i64]]) -> SymMatrix {
        SymMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat!(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    /// Cofactor expansion along the first row; exponential, test oracle only.
    fn cofactor_det(m: &SymMatrix) -> Rat {
        let n = m.size();
        if n == 0 {
            return Rat::one();
        }
        if n == 1 {
            return m.get(0, 0).clone();
        }
        let mut acc = Rat::zero();
        for j in 0..n {
            if m.get(0, j).is_zero() {
                continue;
            }
            let keep: Vec<usize> = (1..n).collect();
            let rows: Vec<Vec<Rat>> = keep
                .iter()
                .map(|&r| {
                    (0..n)
                        .filter(|&c| c != j)
                        .map(|c| m.get(r, c).clone())
                        .collect()
                })
                .collect();
            let minor = SymMatrix {
                n: n - 1,
                a: rows.into_iter().flatten().collect(),
            };
            let term = m.get(0, j) * cofactor_det(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= &term;
            }
        }
        acc
    }

    #[test]
    fn determinant_matches_cofactor_small() {
        let cases = [
            mat(&[&[-2]]),
            mat(&[&[-2, 1], &[1, -2]]),
            mat(&[&[-1, 1], &[1, -2]]),
            mat(&[&[-2, 1, 0], &[1, -2, 1], &[0, 1, -2]]),
            mat(&[&[-3, 1, 0, 1], &[1, -4, 2, 0], &[0, 2, -5, 1], &[1, 0, 1, -2]]),
        ];
        for m in &cases {
            assert_eq!(m.determinant(), cofactor_det(m));
        }
    }

    #[test]
    fn determinant_handles_rational_entries() {
        let m = SymMatrix::from_rows(vec![
            vec![rat!(-3, 2), rat!(1, 3)],
            vec![rat!(1, 3), rat!(-4, 5)],
        ])
        .unwrap();
        assert_eq!(m.determinant(), cofactor_det(&m));
        assert_eq!(m.determinant(), rat!(49, 45));
    }

    #[test]
    fn determinant_zero_pivot_column() {
        let m = mat(&[&[0, 1], &[1, 0]]);
        assert_eq!(m.determinant(), rat!(-1));
        let singular = mat(&[&[1, 1], &[1, 1]]);
        assert_eq!(singular.determinant(), rat!(0));
    }

    #[test]
    fn negative_definiteness() {
        assert!(mat(&[&[-2, 1], &[1, -2]]).is_negative_definite());
        assert!(mat(&[&[-1, 1], &[1, -2]]).is_negative_definite());
        assert!(!mat(&[&[-2, 1, 1], &[1, -2, 1], &[1, 1, -2]]).is_negative_definite());
        assert!(!mat(&[&[1]]).is_negative_definite());
        assert!(SymMatrix::zero(0).is_negative_definite());
    }

    #[test]
    fn solve_exact() {
        let m = mat(&[&[-2, 1], &[1, -2]]);
        let x = m.solve(&[rat!(-1), rat!(0)]).unwrap();
        assert_eq!(x, vec![rat!(2, 3), rat!(1, 3)]);
        let singular = mat(&[&[1, 1], &[1, 1]]);
        assert_eq!(
            singular.solve(&[rat!(1), rat!(0)]),
            Err(LinalgError::SingularMatrix)
        );
    }

    #[test]
    fn sign_solution_on_valid_data() {
        let m = mat(&[&[-2, 1], &[1, -2]]);
        assert!(sign_solution_check(&m, &[rat!(-1), rat!(-2)]).unwrap());
        assert!(sign_solution_check(&m, &[rat!(3), rat!(1)]).unwrap());
        let bad = mat(&[&[-2, -1], &[-1, -2]]);
        assert!(matches!(
            sign_solution_check(&bad, &[rat!(0), rat!(0)]),
            Err(LinalgError::PreconditionViolated(_))
        ));
    }
}
