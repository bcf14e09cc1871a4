//! Fraction-free integer linear algebra shared by the rest of the crate.
//!
//! Everything here works on dense row-major `Vec<Vec<BigInt>>` slices and
//! never leaves exact arithmetic. Elimination follows Bareiss: every division
//! performed during the forward pass is exact, so intermediate entries stay
//! bounded by minors of the input.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Dense integer matrix, row-major.
pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_vec(rows: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    rows.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IntMatrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .filter(|(x, _)| !x.is_zero())
                        .map(|(x, brow)| x * &brow[j])
                        .sum()
                })
                .collect()
        })
        .collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Leading principal minors `det(A[..k, ..k])` for `k = 1..=n`, computed in a
/// single Bareiss pass without pivoting.
///
/// The pass stops at the first vanishing minor (the elimination cannot
/// continue past it), so the returned vector is shorter than `n` exactly
/// when some leading minor is zero; its last element is then that zero.
pub fn leading_minors(rows: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = rows.len();
    let mut a: IntMatrix = rows.to_vec();
    let mut minors = Vec::with_capacity(n);
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = a[k][k].clone();
        minors.push(pivot.clone());
        if pivot.is_zero() {
            break;
        }
        for i in (k + 1)..n {
            let factor = a[i][k].clone();
            for j in (k + 1)..n {
                let v = (&a[i][j] * &pivot - &factor * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = pivot;
    }
    minors
}

/// Forward Bareiss elimination with row pivoting on an augmented matrix
/// `[A | B]` whose left block is `n × n`.
///
/// Returns the signed pivot sequence; the final pivot equals `±det(A)` and
/// `swaps` records the parity needed to fix the sign. `None` if `A` is
/// singular.
struct Forward {
    rows: IntMatrix,
    last_pivot: BigInt,
    odd_swaps: bool,
}

fn forward(mut a: IntMatrix, n: usize) -> Option<Forward> {
    let width = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut odd_swaps = false;
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero())?;
        if p != k {
            a.swap(p, k);
            odd_swaps = !odd_swaps;
        }
        let pivot = a[k][k].clone();
        for i in (k + 1)..n {
            if a[i][k].is_zero() {
                // Row i still needs rescaling by pivot/prev to keep the
                // Bareiss invariant; the division stays exact.
                for j in (k + 1)..width {
                    if !a[i][j].is_zero() {
                        let v = (&a[i][j] * &pivot) / &prev;
                        a[i][j] = v;
                    }
                }
                continue;
            }
            let factor = a[i][k].clone();
            for j in (k + 1)..width {
                let v = (&a[i][j] * &pivot - &factor * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = pivot;
    }
    Some(Forward {
        rows: a,
        last_pivot: if n == 0 { BigInt::one() } else { prev },
        odd_swaps,
    })
}

/// Exact determinant by Bareiss elimination. The empty matrix has
/// determinant 1.
pub fn determinant(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    match forward(rows.to_vec(), n) {
        None => BigInt::zero(),
        Some(f) if f.odd_swaps => -f.last_pivot,
        Some(f) => f.last_pivot,
    }
}

/// Solves `A · Y = d · B` over the integers, where `d = ±det(A)` is returned
/// alongside `Y`. Columns of `B` are given as separate vectors.
///
/// By Cramer's rule `d · A⁻¹ B` is integral, which makes every division in
/// the back substitution exact. Returns `None` when `A` is singular.
pub fn solve_scaled(a: &[Vec<BigInt>], rhs: &[Vec<BigInt>]) -> Option<(BigInt, Vec<Vec<BigInt>>)> {
    let n = a.len();
    let k = rhs.len();
    let augmented: IntMatrix = (0..n)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend(rhs.iter().map(|col| col[i].clone()));
            row
        })
        .collect();
    let f = forward(augmented, n)?;
    let d = f.last_pivot;
    let u = f.rows;
    let mut solutions = Vec::with_capacity(k);
    for c in 0..k {
        let mut y = vec![BigInt::zero(); n];
        for i in (0..n).rev() {
            let mut acc = &d * &u[i][n + c];
            for j in (i + 1)..n {
                if !u[i][j].is_zero() {
                    acc -= &u[i][j] * &y[j];
                }
            }
            debug_assert!((&acc % &u[i][i]).is_zero());
            y[i] = acc / &u[i][i];
        }
        solutions.push(y);
    }
    Some((d, solutions))
}

/// Exact rational solution of `A · x = b`. `None` if `A` is singular.
pub fn solve(a: &[Vec<BigInt>], b: &[BigInt]) -> Option<Vec<BigRational>> {
    let (d, mut ys) = solve_scaled(a, &[b.to_vec()])?;
    let y = ys.pop()?;
    Some(y.into_iter().map(|v| BigRational::new(v, d.clone())).collect())
}

/// Rational matrix-vector product with an integer matrix.
pub fn mat_vec_rational(rows: &[Vec<BigInt>], v: &[BigRational]) -> Vec<BigRational> {
    rows.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(a, _)| !a.is_zero())
                .fold(BigRational::zero(), |acc, (a, x)| {
                    acc + BigRational::from_integer(a.clone()) * x
                })
        })
        .collect()
}

pub fn principal_submatrix(rows: &[Vec<BigInt>], keep: &[usize]) -> IntMatrix {
    keep.iter()
        .map(|&i| keep.iter().map(|&j| rows[i][j].clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(determinant(&[]), BigInt::one());
        assert_eq!(determinant(&m(&[&[-2]])), BigInt::from(-2));
        assert_eq!(determinant(&m(&[&[-2, 1], &[1, -2]])), BigInt::from(3));
        // Needs a row swap: zero in the top-left corner.
        assert_eq!(determinant(&m(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(determinant(&m(&[&[0, 2, 1], &[3, 0, 0], &[1, 1, 1]])), BigInt::from(-3));
        assert!(determinant(&m(&[&[1, 2], &[2, 4]])).is_zero());
    }

    #[test]
    fn leading_minors_of_a2() {
        let minors = leading_minors(&m(&[&[-2, 1], &[1, -2]]));
        assert_eq!(minors, vec![BigInt::from(-2), BigInt::from(3)]);
        let stops = leading_minors(&m(&[&[0, 1], &[1, 0]]));
        assert_eq!(stops, vec![BigInt::zero()]);
    }

    #[test]
    fn solve_handles_zero_pivots_in_untouched_rows() {
        // The middle row has a zero below the first pivot and must still be
        // rescaled for the later exact divisions to hold.
        let a = m(&[&[2, 1, 0], &[0, 3, 1], &[1, 0, 4]]);
        let b: Vec<BigInt> = [1, 2, 3].iter().map(|&x| BigInt::from(x)).collect();
        let x = solve(&a, &b).unwrap();
        let back = mat_vec_rational(&a, &x);
        for (lhs, rhs) in back.iter().zip(&b) {
            assert_eq!(lhs, &BigRational::from_integer(rhs.clone()));
        }
    }

    #[test]
    fn solve_scaled_is_integral_adjugate() {
        let a = m(&[&[-2, 1], &[1, -2]]);
        let (d, ys) = solve_scaled(&a, &[vec![BigInt::one(), BigInt::zero()]]).unwrap();
        assert_eq!(d, BigInt::from(3));
        // adj(A) e1 = (-2, -1)
        assert_eq!(ys[0], vec![BigInt::from(-2), BigInt::from(-1)]);
    }
}
