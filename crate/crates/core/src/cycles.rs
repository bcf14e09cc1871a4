//! Fundamental and canonical cycles, fundamental genus, the numerically
//! Gorenstein test, Mumford pullbacks and correction terms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::json::{self, JsonInt, JsonRational};
use crate::lattice::Cokernel;
use crate::linalg;
use crate::matrix::{components_without, IntersectionMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CycleError {
    #[error("dual graph is disconnected")]
    Disconnected,
    #[error("dual graph is not a tree")]
    NotATree,
    #[error("genus {0} is not an integer; some component is not rational")]
    NonIntegralGenus(BigRational),
    #[error("the kept vertex set is empty")]
    EmptyKeep,
    #[error("vertex index {index} out of range for {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("vertex {0} listed twice")]
    DuplicateIndex(usize),
    #[error("Gorenstein routes disagree at vertex {0}")]
    InternalDisagreement(usize),
}

pub type Cycle = Vec<BigInt>;
pub type RationalCycle = Vec<BigRational>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalCycle {
    pub cycle: Cycle,
    pub self_intersection: BigInt,
}

/// Minimal `Z ≥ (1, …, 1)` with `N·Z ≤ 0`, by the computation sequence that
/// raises the lowest-index positive row first.
pub fn fundamental_cycle(m: &IntersectionMatrix) -> Result<FundamentalCycle, CycleError> {
    if !m.to_dual_graph().connected {
        return Err(CycleError::Disconnected);
    }
    let n = m.n();
    let mut z = vec![BigInt::one(); n];
    let mut nz = m.mul_vec(&z);
    while let Some(i) = nz.iter().position(|x| x.is_positive()) {
        z[i] += 1;
        for (k, row) in m.entries().iter().enumerate() {
            if !row[i].is_zero() {
                nz[k] += &row[i];
            }
        }
    }
    let self_intersection = linalg::dot(&z, &nz);
    Ok(FundamentalCycle {
        cycle: z,
        self_intersection,
    })
}

/// `H₀ᵢ = −cᵢᵢ − 2`, the right-hand side of the adjunction system.
pub fn adjunction_vector(m: &IntersectionMatrix) -> Vec<BigInt> {
    (0..m.n()).map(|i| -m.entry(i, i) - 2).collect()
}

/// Exact solution of `N·K = H₀`.
pub fn canonical_cycle(m: &IntersectionMatrix) -> RationalCycle {
    linalg::solve(m.entries(), &adjunction_vector(m)).expect("intersection matrices are invertible")
}

pub fn is_integral(c: &[BigRational]) -> bool {
    c.iter().all(|q| q.is_integer())
}

/// The first vertex where `pᵢ ∤ gᵢ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GorensteinWitness {
    pub vertex: usize,
    pub class_order: BigInt,
    pub g: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GorensteinReport {
    pub gorenstein: bool,
    pub canonical: RationalCycle,
    pub witness: Option<GorensteinWitness>,
}

/// Integrality of `K`, cross-checked against the per-vertex criterion: with
/// `pᵢ` the order of `[eᵢ]` and `N·Rᵢ = −pᵢeᵢ`, `K` is integral iff
/// `pᵢ | Rᵢᵀ H₀` for all `i`.
pub fn is_numerically_gorenstein(m: &IntersectionMatrix) -> Result<GorensteinReport, CycleError> {
    let n = m.n();
    let h0 = adjunction_vector(m);
    let canonical = canonical_cycle(m);
    let ck = Cokernel::new(m);
    let unit: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let (d, scaled_inverse) = linalg::solve_scaled(m.entries(), &unit).expect("invertible");
    let mut witness = None;
    for i in 0..n {
        let p = ck.class_order(i).expect("index in range");
        let numer: Vec<BigInt> = scaled_inverse[i].iter().map(|y| -(&p * y)).collect();
        if numer.iter().any(|x| !(x % &d).is_zero()) {
            return Err(CycleError::InternalDisagreement(i));
        }
        let r: Vec<BigInt> = numer.into_iter().map(|x| x / &d).collect();
        let g = linalg::dot(&r, &h0);
        let divides = (&g % &p).is_zero();
        if divides != canonical[i].is_integer() {
            return Err(CycleError::InternalDisagreement(i));
        }
        if !divides && witness.is_none() {
            witness = Some(GorensteinWitness {
                vertex: i,
                class_order: p,
                g,
            });
        }
    }
    Ok(GorensteinReport {
        gorenstein: witness.is_none(),
        canonical,
        witness,
    })
}

/// `h¹ = 1 + (Z² + K·Z)/2`, assuming every component is rational.
pub fn fundamental_genus(m: &IntersectionMatrix) -> Result<BigInt, CycleError> {
    let z = fundamental_cycle(m)?;
    genus_of(m, &z)
}

pub(crate) fn genus_of(m: &IntersectionMatrix, z: &FundamentalCycle) -> Result<BigInt, CycleError> {
    // K·Z = Kᵀ N Z = H₀ᵀ Z.
    let kz = linalg::dot(&adjunction_vector(m), &z.cycle);
    let twice = BigInt::from(2) + &z.self_intersection + kz;
    if twice.is_odd() {
        return Err(CycleError::NonIntegralGenus(BigRational::new(twice, BigInt::from(2))));
    }
    Ok(twice / 2)
}

/// `K·Z` computed from the canonical cycle itself, for callers that want
/// the intersection product without relying on the adjunction shortcut.
pub fn intersection(m: &IntersectionMatrix, a: &[BigRational], b: &[BigRational]) -> BigRational {
    let nb = linalg::mat_vec_rational(m.entries(), b);
    a.iter().zip(&nb).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

pub type RationalMatrix = Vec<Vec<BigRational>>;

/// Rational intersection numbers of the kept curves after contracting the
/// rest: the Schur complement `N_KK − N_KC N_CC⁻¹ N_CK`.
pub fn mumford_pullback(m: &IntersectionMatrix, keep: &[usize]) -> Result<RationalMatrix, CycleError> {
    let n = m.n();
    if keep.is_empty() {
        return Err(CycleError::EmptyKeep);
    }
    let mut kept = vec![false; n];
    for &i in keep {
        if i >= n {
            return Err(CycleError::IndexOutOfRange { index: i, n });
        }
        if kept[i] {
            return Err(CycleError::DuplicateIndex(i));
        }
        kept[i] = true;
    }
    let contracted: Vec<usize> = (0..n).filter(|&i| !kept[i]).collect();
    let rat = |x: &BigInt| BigRational::from_integer(x.clone());
    let mut out: RationalMatrix = keep
        .iter()
        .map(|&i| keep.iter().map(|&j| rat(m.entry(i, j))).collect())
        .collect();
    if contracted.is_empty() {
        return Ok(out);
    }
    let ncc = linalg::principal_submatrix(m.entries(), &contracted);
    // λ for kept vertex i solves N_CC λ = −N_Ci.
    let rhs: Vec<Vec<BigInt>> = keep
        .iter()
        .map(|&i| contracted.iter().map(|&k| -m.entry(k, i)).collect())
        .collect();
    let (d, lambdas) = linalg::solve_scaled(&ncc, &rhs).expect("contracted block is definite");
    for (a, lam) in lambdas.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate() {
            let extra: BigInt = contracted
                .iter()
                .zip(lam)
                .filter(|(&k, _)| !m.entry(k, j).is_zero())
                .map(|(&k, l)| l * m.entry(k, j))
                .sum();
            out[a][b] += BigRational::new(extra, d.clone());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correction {
    /// Vertex of the branch adjacent to the chosen vertex.
    pub neighbor: usize,
    pub branch: Vec<usize>,
    pub delta: BigRational,
}

/// For each branch `Δ` of the tree at `v`: `δ = −det(N_Δ′)/det(N_Δ)` where
/// `N_Δ′` drops the vertex adjacent to `v`.
pub fn correction_terms(m: &IntersectionMatrix, v: usize) -> Result<Vec<Correction>, CycleError> {
    let n = m.n();
    if v >= n {
        return Err(CycleError::IndexOutOfRange { index: v, n });
    }
    if !m.to_dual_graph().is_tree {
        return Err(CycleError::NotATree);
    }
    let mut out = Vec::new();
    for branch in components_without(m, v) {
        let neighbor = *branch
            .iter()
            .find(|&&w| !m.entry(v, w).is_zero())
            .expect("tree branches touch the removed vertex");
        let det = linalg::determinant(&linalg::principal_submatrix(m.entries(), &branch));
        let rest: Vec<usize> = branch.iter().copied().filter(|&w| w != neighbor).collect();
        let det_rest = linalg::determinant(&linalg::principal_submatrix(m.entries(), &rest));
        out.push(Correction {
            neighbor,
            branch,
            delta: -BigRational::new(det_rest, det),
        });
    }
    Ok(out)
}

/// `−K − (|Z²| − 2)·Z`, recorded per instance as data.
pub fn yau_slack(m: &IntersectionMatrix) -> Result<RationalCycle, CycleError> {
    let z = fundamental_cycle(m)?;
    let k = canonical_cycle(m);
    let factor = BigRational::from_integer(z.self_intersection.abs() - 2);
    Ok(k.iter()
        .zip(&z.cycle)
        .map(|(ki, zi)| -ki - &factor * BigRational::from_integer(zi.clone()))
        .collect())
}

/// JSON view of a cycle: a list of `{num, den}` pairs.
pub fn cycle_json(c: &[BigInt]) -> Vec<JsonRational> {
    c.iter().map(JsonRational::from).collect()
}

pub fn rational_cycle_json(c: &[BigRational]) -> Vec<JsonRational> {
    json::rationals(c)
}

#[derive(Serialize)]
pub struct WitnessJson {
    pub vertex: usize,
    pub class_order: JsonInt,
    pub g: JsonInt,
}

impl From<&GorensteinWitness> for WitnessJson {
    fn from(w: &GorensteinWitness) -> Self {
        WitnessJson {
            vertex: w.vertex,
            class_order: JsonInt(w.class_order.clone()),
            g: JsonInt(w.g.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hj::{chain_matrix, ChainSpec};
    use crate::star::{build_star, StarSpec};
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn d4() -> IntersectionMatrix {
        build_star(&StarSpec::new(2).repeated(2, 1, 3).unwrap()).unwrap()
    }

    #[test]
    fn a_chains_have_reduced_cycle() {
        for len in 1..8 {
            let m = chain_matrix(&ChainSpec::from_i64(&vec![2; len]).unwrap()).unwrap();
            let z = fundamental_cycle(&m).unwrap();
            assert_eq!(z.cycle, vec![BigInt::one(); len]);
            assert_eq!(z.self_intersection, BigInt::from(-2));
            assert!(canonical_cycle(&m).iter().all(Zero::is_zero));
            assert_eq!(fundamental_genus(&m).unwrap(), BigInt::zero());
        }
    }

    #[test]
    fn d4_cycle_and_pullback() {
        let m = d4();
        let z = fundamental_cycle(&m).unwrap();
        assert_eq!(z.cycle, ints(&[2, 1, 1, 1]));
        let pull = mumford_pullback(&m, &[0]).unwrap();
        assert_eq!(pull[0][0], q(-1, 2));
        let full = mumford_pullback(&m, &[0, 1, 2, 3]).unwrap();
        assert_eq!(full[1][1], q(-2, 1));
        assert_eq!(full[0][1], q(1, 1));
        assert_eq!(mumford_pullback(&m, &[]), Err(CycleError::EmptyKeep));
        assert_eq!(mumford_pullback(&m, &[0, 0]), Err(CycleError::DuplicateIndex(0)));
        let deltas = correction_terms(&m, 0).unwrap();
        assert_eq!(deltas.len(), 3);
        assert!(deltas.iter().all(|c| c.delta == q(1, 2)));
    }

    #[test]
    fn chain_branch_correction_is_b_over_a() {
        // Node of valency one with a 7/4 = [2, 4] chain behind it.
        let m = build_star(&StarSpec::new(3).chain(7, 4).unwrap()).unwrap();
        let deltas = correction_terms(&m, 0).unwrap();
        assert_eq!(deltas[0].delta, q(4, 7));
        let p = 5;
        let m = build_star(&StarSpec::new(3).chain(p, p - 1).unwrap()).unwrap();
        assert_eq!(correction_terms(&m, 0).unwrap()[0].delta, q(p - 1, p));
    }

    #[test]
    fn correction_terms_need_a_tree() {
        let cyc = IntersectionMatrix::from_i64(&[vec![-3, 1, 1], vec![1, -3, 1], vec![1, 1, -3]]).unwrap();
        assert_eq!(correction_terms(&cyc, 0), Err(CycleError::NotATree));
    }

    #[test]
    fn disconnected_has_no_fundamental_cycle() {
        let m = IntersectionMatrix::from_i64(&[vec![-2, 0], vec![0, -2]]).unwrap();
        assert_eq!(fundamental_cycle(&m), Err(CycleError::Disconnected));
    }

    #[test]
    fn gorenstein_on_rational_double_point() {
        let r = is_numerically_gorenstein(&d4()).unwrap();
        assert!(r.gorenstein && r.witness.is_none());
        assert!(r.canonical.iter().all(Zero::is_zero));
    }

    #[test]
    fn chain_of_three_is_not_gorenstein() {
        // A single (−3)-curve: K = −E/3.
        let m = IntersectionMatrix::from_i64(&[vec![-3]]).unwrap();
        let r = is_numerically_gorenstein(&m).unwrap();
        assert!(!r.gorenstein);
        assert_eq!(r.canonical, vec![q(-1, 3)]);
        let w = r.witness.unwrap();
        assert_eq!((w.vertex, w.class_order), (0, BigInt::from(3)));
    }

    #[test]
    fn genus_of_a_minus_one_curve() {
        // A single (−1)-curve: Z = E, Z² = −1, K·Z = −1, h¹ = 0.
        let m = IntersectionMatrix::from_i64(&[vec![-1]]).unwrap();
        assert_eq!(fundamental_genus(&m).unwrap(), BigInt::zero());
    }

    #[test]
    fn intersection_agrees_with_adjunction_shortcut() {
        let m = build_star(
            &StarSpec::new(2)
                .chain(5, 4)
                .unwrap()
                .chain(5, 4)
                .unwrap()
                .chain(3, 1)
                .unwrap(),
        )
        .unwrap();
        let z = fundamental_cycle(&m).unwrap();
        let k = canonical_cycle(&m);
        let zq: Vec<BigRational> = z.cycle.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        let kz = intersection(&m, &k, &zq);
        assert_eq!(
            kz,
            BigRational::from_integer(linalg::dot(&adjunction_vector(&m), &z.cycle))
        );
    }

    fn random_connected() -> impl Strategy<Value = IntersectionMatrix> {
        (1usize..=6)
            .prop_flat_map(|n| {
                (
                    Just(n),
                    proptest::collection::vec(0i64..=1, n * n),
                    proptest::collection::vec(1i64..=5, n),
                )
            })
            .prop_filter_map("invalid or disconnected", |(n, off, diag)| {
                let rows: Vec<Vec<i64>> = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| if i == j { -diag[i] } else { off[i.min(j) * n + i.max(j)] })
                            .collect()
                    })
                    .collect();
                let m = IntersectionMatrix::from_i64(&rows).ok()?;
                m.to_dual_graph().connected.then_some(m)
            })
    }

    /// Every `Y` with `1 ≤ Y ≤ Z`, `Y ≠ Z`, must have a positive entry in
    /// `N·Y`.
    fn is_minimal(m: &IntersectionMatrix, z: &[BigInt]) -> bool {
        let n = z.len();
        let bounds: Vec<i64> = z.iter().map(|x| i64::try_from(x).unwrap()).collect();
        let mut y = vec![1i64; n];
        loop {
            if y != bounds {
                let yb: Vec<BigInt> = y.iter().map(|&x| x.into()).collect();
                if m.mul_vec(&yb).iter().all(|x| !x.is_positive()) {
                    return false;
                }
            }
            let mut idx = 0;
            loop {
                if idx == n {
                    return true;
                }
                if y[idx] < bounds[idx] {
                    y[idx] += 1;
                    break;
                }
                y[idx] = 1;
                idx += 1;
            }
        }
    }

    proptest! {
        #[test]
        fn fundamental_cycle_is_minimal(m in random_connected()) {
            let z = fundamental_cycle(&m).unwrap();
            prop_assert!(m.mul_vec(&z.cycle).iter().all(|x| !x.is_positive()));
            prop_assert!(is_minimal(&m, &z.cycle));
        }

        #[test]
        fn gorenstein_routes_agree(m in random_connected()) {
            prop_assert!(is_numerically_gorenstein(&m).is_ok());
        }

        #[test]
        fn pullback_identity_on_trees(m in random_connected()) {
            prop_assume!(m.to_dual_graph().is_tree);
            for v in 0..m.n() {
                let pull = mumford_pullback(&m, &[v]).unwrap();
                let sum = correction_terms(&m, v)
                    .unwrap()
                    .iter()
                    .fold(BigRational::zero(), |acc, c| acc + &c.delta);
                prop_assert_eq!(BigRational::from_integer(m.entry(v, v).clone()), &pull[0][0] - sum);
            }
        }

        #[test]
        fn pullback_is_symmetric(m in random_connected(), mask in proptest::collection::vec(any::<bool>(), 6)) {
            let keep: Vec<usize> = (0..m.n()).filter(|&i| mask[i]).collect();
            prop_assume!(!keep.is_empty());
            let p = mumford_pullback(&m, &keep).unwrap();
            for a in 0..keep.len() {
                for b in 0..keep.len() {
                    prop_assert_eq!(&p[a][b], &p[b][a]);
                }
            }
        }
    }
}
