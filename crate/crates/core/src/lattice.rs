//! Smith normal form and the discriminant group `Φ_N = ℤⁿ / Nℤⁿ`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json::JsonInt;
use crate::linalg::{self, IntMatrix};
use crate::matrix::IntersectionMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("vertex index {index} out of range for {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("vector has length {got}, expected {n}")]
    LengthMismatch { got: usize, n: usize },
}

/// `U · M · V = D` with `U`, `V` unimodular and `D` diagonal, each diagonal
/// entry dividing the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub left: IntMatrix,
    pub diagonal: Vec<BigInt>,
    pub right: IntMatrix,
}

impl SmithForm {
    /// Re-multiplies `U · M · V` and checks it against `D`, together with
    /// `|det U| = |det V| = 1`.
    pub fn verify(&self, m: &[Vec<BigInt>]) -> bool {
        let n = m.len();
        let product = linalg::mat_mul(&linalg::mat_mul(&self.left, m), &self.right);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { &self.diagonal[i] } else { &BigInt::zero() };
                if &product[i][j] != want {
                    return false;
                }
            }
        }
        let chain = self.diagonal.windows(2).all(|w| {
            if w[0].is_zero() {
                w[1].is_zero()
            } else {
                (&w[1] % &w[0]).is_zero()
            }
        });
        chain && linalg::determinant(&self.left).abs().is_one() && linalg::determinant(&self.right).abs().is_one()
    }
}

struct Work {
    a: IntMatrix,
    u: Option<IntMatrix>,
    v: Option<IntMatrix>,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if let Some(u) = &mut self.u {
            u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in &mut self.a {
            row.swap(i, j);
        }
        if let Some(v) = &mut self.v {
            for row in v {
                row.swap(i, j);
            }
        }
    }

    /// row_dst -= q · row_src
    fn sub_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        sub_row(&mut self.a, dst, src, q);
        if let Some(u) = &mut self.u {
            sub_row(u, dst, src, q);
        }
    }

    /// col_dst -= q · col_src
    fn sub_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        sub_col(&mut self.a, dst, src, q);
        if let Some(v) = &mut self.v {
            sub_col(v, dst, src, q);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -std::mem::take(x);
        }
        if let Some(u) = &mut self.u {
            for x in &mut u[i] {
                *x = -std::mem::take(x);
            }
        }
    }
}

fn sub_row(m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    let (d, s) = if dst < src {
        let (lo, hi) = m.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in d.iter_mut().zip(s.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

fn sub_col(m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    for row in m.iter_mut() {
        if !row[src].is_zero() {
            let delta = q * &row[src];
            row[dst] -= delta;
        }
    }
}

fn smith(m: &[Vec<BigInt>], track: bool) -> SmithForm {
    let n = m.len();
    let mut w = Work {
        a: m.to_vec(),
        u: track.then(|| linalg::identity(n)),
        v: track.then(|| linalg::identity(n)),
    };
    for k in 0..n {
        while let Some((pi, pj)) = smallest_entry(&w.a, k) {
            if pi != k {
                w.swap_rows(k, pi);
            }
            if pj != k {
                w.swap_cols(k, pj);
            }
            let pivot = w.a[k][k].clone();
            let mut clean = true;
            for i in (k + 1)..n {
                if w.a[i][k].is_zero() {
                    continue;
                }
                let q = w.a[i][k].div_floor(&pivot);
                w.sub_row(i, k, &q);
                clean &= w.a[i][k].is_zero();
            }
            for j in (k + 1)..n {
                if w.a[k][j].is_zero() {
                    continue;
                }
                let q = w.a[k][j].div_floor(&pivot);
                w.sub_col(j, k, &q);
                clean &= w.a[k][j].is_zero();
            }
            if !clean {
                continue;
            }
            // Pivot must divide the remaining block; otherwise fold an
            // offending row into row k and go again.
            let offending = ((k + 1)..n).find(|&i| ((k + 1)..n).any(|j| !(&w.a[i][j] % &pivot).is_zero()));
            match offending {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    w.sub_row(k, i, &minus_one);
                }
                None => break,
            }
        }
        if w.a[k][k].is_negative() {
            w.negate_row(k);
        }
    }
    let diagonal = (0..n).map(|i| w.a[i][i].clone()).collect();
    SmithForm {
        left: w.u.unwrap_or_default(),
        diagonal,
        right: w.v.unwrap_or_default(),
    }
}

fn smallest_entry(a: &IntMatrix, k: usize) -> Option<(usize, usize)> {
    let n = a.len();
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in k..n {
        for j in k..n {
            let v = &a[i][j];
            if v.is_zero() {
                continue;
            }
            let mag = v.abs();
            let better = best.as_ref().is_none_or(|(_, _, b)| &mag < b);
            if better {
                let done = mag.is_one();
                best = Some((i, j, mag));
                if done {
                    return best.map(|(i, j, _)| (i, j));
                }
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Smith normal form with both transforms.
pub fn smith_normal_form(m: &IntersectionMatrix) -> SmithForm {
    smith(m.entries(), true)
}

/// Smith normal form of an arbitrary square integer matrix.
pub fn smith_normal_form_of(rows: &[Vec<BigInt>]) -> SmithForm {
    smith(rows, true)
}

/// Elementary divisors only; skips the transform bookkeeping.
pub fn elementary_divisors(rows: &[Vec<BigInt>]) -> Vec<BigInt> {
    smith(rows, false).diagonal
}

/// Finite abelian group `⊕ ℤ/dᵢ` with `d₁ | d₂ | ⋯` and every `dᵢ > 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    divisors: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn from_diagonal(diagonal: &[BigInt]) -> Self {
        AbelianGroup {
            divisors: diagonal.iter().filter(|d| !d.abs().is_one()).map(|d| d.abs()).collect(),
        }
    }

    pub fn elementary_p(p: u64, rank: usize) -> Self {
        AbelianGroup {
            divisors: vec![BigInt::from(p); rank],
        }
    }

    pub fn divisors(&self) -> &[BigInt] {
        &self.divisors
    }

    pub fn rank(&self) -> usize {
        self.divisors.len()
    }

    pub fn order(&self) -> BigInt {
        self.divisors.iter().product()
    }

    pub fn exponent(&self) -> BigInt {
        self.divisors.last().cloned().unwrap_or_else(BigInt::one)
    }

    pub fn is_trivial(&self) -> bool {
        self.divisors.is_empty()
    }

    /// Every element is annihilated by `m`. The trivial group is killed by
    /// everything.
    pub fn is_killed_by(&self, m: &BigInt) -> bool {
        (m % self.exponent()).is_zero()
    }

    /// Every elementary divisor equals `p`; vacuously true for the trivial
    /// group.
    pub fn is_p_elementary(&self, p: &BigInt) -> bool {
        self.divisors.iter().all(|d| d == p)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.divisors.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.divisors.iter().map(|d| format!("Z/{d}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct GroupJson {
    divisors: Vec<JsonInt>,
}

impl Serialize for AbelianGroup {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GroupJson {
            divisors: crate::json::ints(&self.divisors),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AbelianGroup {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = GroupJson::deserialize(deserializer)?;
        let divisors: Vec<BigInt> = raw.divisors.into_iter().map(|x| x.0).collect();
        let ok = divisors.iter().all(|d| *d > BigInt::one()) && divisors.windows(2).all(|w| (&w[1] % &w[0]).is_zero());
        if !ok {
            return Err(serde::de::Error::custom(
                "divisors must exceed 1 and form a divisibility chain",
            ));
        }
        Ok(AbelianGroup { divisors })
    }
}

/// The cokernel `ℤⁿ / Mℤⁿ` together with the transform that identifies it
/// with `⊕ ℤ/dₖ`. Build once and query repeatedly.
#[derive(Clone, Debug)]
pub struct Cokernel {
    snf: SmithForm,
    group: AbelianGroup,
}

impl Cokernel {
    pub fn new(m: &IntersectionMatrix) -> Self {
        let snf = smith_normal_form(m);
        let group = AbelianGroup::from_diagonal(&snf.diagonal);
        Cokernel { snf, group }
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn smith_form(&self) -> &SmithForm {
        &self.snf
    }

    fn n(&self) -> usize {
        self.snf.diagonal.len()
    }

    /// Coordinates of the class of `x` in `⊕ ℤ/dₖ`.
    fn coordinates(&self, x: &[BigInt]) -> Result<Vec<BigInt>, LatticeError> {
        if x.len() != self.n() {
            return Err(LatticeError::LengthMismatch {
                got: x.len(),
                n: self.n(),
            });
        }
        Ok(linalg::mat_vec(&self.snf.left, x))
    }

    /// Whether `x ∈ Mℤⁿ`, i.e. its class in `Φ` vanishes.
    pub fn contains(&self, x: &[BigInt]) -> Result<bool, LatticeError> {
        let y = self.coordinates(x)?;
        Ok(y.iter().zip(&self.snf.diagonal).all(|(yk, dk)| {
            if dk.is_zero() {
                yk.is_zero()
            } else {
                (yk % dk).is_zero()
            }
        }))
    }

    /// Order of the class of `x` in `Φ`.
    pub fn order_of(&self, x: &[BigInt]) -> Result<BigInt, LatticeError> {
        let y = self.coordinates(x)?;
        Ok(y.iter()
            .zip(&self.snf.diagonal)
            .filter(|(_, d)| !d.is_one())
            .fold(BigInt::one(), |acc, (yk, dk)| acc.lcm(&(dk / dk.gcd(yk)))))
    }

    pub fn class_order(&self, i: usize) -> Result<BigInt, LatticeError> {
        let n = self.n();
        if i >= n {
            return Err(LatticeError::IndexOutOfRange { index: i, n });
        }
        let mut e = vec![BigInt::zero(); n];
        e[i] = BigInt::one();
        self.order_of(&e)
    }
}

pub fn discriminant_group(m: &IntersectionMatrix) -> AbelianGroup {
    AbelianGroup::from_diagonal(&elementary_divisors(m.entries()))
}

pub fn class_order(m: &IntersectionMatrix, i: usize) -> Result<BigInt, LatticeError> {
    if i >= m.n() {
        return Err(LatticeError::IndexOutOfRange { index: i, n: m.n() });
    }
    Cokernel::new(m).class_order(i)
}

pub fn is_p_elementary(m: &IntersectionMatrix, p: &BigInt) -> bool {
    discriminant_group(m).is_p_elementary(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::solve;
    use proptest::prelude::*;

    fn chain(s: &[i64]) -> IntersectionMatrix {
        crate::hj::chain_matrix(&crate::hj::ChainSpec::from_i64(s).unwrap()).unwrap()
    }

    fn d4() -> IntersectionMatrix {
        IntersectionMatrix::from_i64(&[
            vec![-2, 1, 1, 1],
            vec![1, -2, 0, 0],
            vec![1, 0, -2, 0],
            vec![1, 0, 0, -2],
        ])
        .unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Order of the class of `eᵢ` via the lcm of the denominators of `M⁻¹eᵢ`.
    fn class_order_oracle(m: &IntersectionMatrix, i: usize) -> BigInt {
        let mut e = vec![BigInt::zero(); m.n()];
        e[i] = BigInt::one();
        solve(m.entries(), &e)
            .unwrap()
            .iter()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
    }

    #[test]
    fn small_smith_forms() {
        let m = IntersectionMatrix::from_i64(&[vec![-5]]).unwrap();
        let s = smith_normal_form(&m);
        assert_eq!(s.diagonal, big(&[5]));
        assert!(s.verify(m.entries()));
        let a2 = chain(&[2, 2]);
        let s = smith_normal_form(&a2);
        assert_eq!(s.diagonal, big(&[1, 3]));
        assert!(s.verify(a2.entries()));
        let s = smith_normal_form(&d4());
        assert_eq!(s.diagonal, big(&[1, 1, 2, 2]));
        assert!(s.verify(d4().entries()));
    }

    #[test]
    fn groups_and_elementarity() {
        let g = discriminant_group(&chain(&[2, 5]));
        assert_eq!(g.divisors(), big(&[9]).as_slice());
        assert!(!g.is_p_elementary(&BigInt::from(3)));
        assert!(!g.is_killed_by(&BigInt::from(3)));
        let g = discriminant_group(&d4());
        assert!(g.is_p_elementary(&BigInt::from(2)));
        assert_eq!(g.order(), BigInt::from(4));
        let trivial = discriminant_group(&IntersectionMatrix::from_i64(&[vec![-1]]).unwrap());
        assert!(trivial.is_trivial());
        assert!(trivial.is_p_elementary(&BigInt::from(7)));
        assert!(trivial.is_killed_by(&BigInt::from(2)));
    }

    #[test]
    fn class_orders_on_chains() {
        let a4 = chain(&[2, 2, 2, 2]);
        assert_eq!(class_order(&a4, 0).unwrap(), BigInt::from(5));
        assert_eq!(class_order(&a4, 3).unwrap(), BigInt::from(5));
        assert_eq!(
            class_order(&a4, 4),
            Err(LatticeError::IndexOutOfRange { index: 4, n: 4 })
        );
        let ck = Cokernel::new(&d4());
        assert_eq!(ck.class_order(0).unwrap(), BigInt::one());
        assert_eq!(ck.class_order(1).unwrap(), BigInt::from(2));
        // The three leaf classes are the nonzero elements of (Z/2)².
        assert!(ck.contains(&big(&[0, 2, 0, 0])).unwrap());
        assert!(!ck.contains(&big(&[0, 1, 1, 0])).unwrap());
    }

    #[test]
    fn group_json() {
        let g = discriminant_group(&d4());
        assert_eq!(serde_json::to_string(&g).unwrap(), r#"{"divisors":[2,2]}"#);
        let back: AbelianGroup = serde_json::from_str(r#"{"divisors":[2,2]}"#).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<AbelianGroup>(r#"{"divisors":[2,3]}"#).is_err());
    }

    fn random_symmetric() -> impl Strategy<Value = IntersectionMatrix> {
        (1usize..=7)
            .prop_flat_map(|n| {
                (
                    Just(n),
                    proptest::collection::vec(0i64..=2, n * n),
                    proptest::collection::vec(1i64..=6, n),
                )
            })
            .prop_filter_map("not negative definite", |(n, off, diag)| {
                let rows: Vec<Vec<i64>> = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| if i == j { -diag[i] } else { off[i.min(j) * n + i.max(j)] })
                            .collect()
                    })
                    .collect();
                IntersectionMatrix::from_i64(&rows).ok()
            })
    }

    proptest! {
        #[test]
        fn smith_form_certifies_itself(m in random_symmetric()) {
            let s = smith_normal_form(&m);
            prop_assert!(s.verify(m.entries()));
            let prod: BigInt = s.diagonal.iter().product();
            prop_assert_eq!(prod, m.exact_determinant().abs());
            prop_assert_eq!(&elementary_divisors(m.entries()), &s.diagonal);
        }

        #[test]
        fn class_orders_match_inverse_denominators(m in random_symmetric()) {
            let ck = Cokernel::new(&m);
            let exponent = ck.group().exponent();
            for i in 0..m.n() {
                let order = ck.class_order(i).unwrap();
                prop_assert_eq!(&order, &class_order_oracle(&m, i));
                prop_assert!((&exponent % &order).is_zero());
            }
        }
    }
}
