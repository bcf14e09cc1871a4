//! Star-shaped intersection matrices `N(s₀ | a₁/b₁, …, a_m/b_m)`.
//!
//! Vertex 0 is the node. Chains follow in declaration order, each laid out
//! from the vertex adjacent to the node outwards.

use std::fmt;
use std::ops::Range;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hj::{cf_expand, HjError, ReducedFraction};
use crate::json::JsonInt;
use crate::matrix::{IntersectionMatrix, MatrixError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StarError {
    #[error("node self-intersection must be at least 1, got {0}")]
    BadNode(BigInt),
    #[error("bad chain fraction: {0}")]
    BadFraction(#[from] HjError),
    #[error("not negative definite: leading {k}x{k} minor is {minor}")]
    NotNegativeDefinite { k: usize, minor: BigInt },
    #[error("s0 = {s0} does not exceed the sum of the chain corrections {sum}")]
    NodeInequality { s0: BigInt, sum: BigRational },
}

impl From<MatrixError> for StarError {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::NotNegativeDefinite { k, minor } => StarError::NotNegativeDefinite { k, minor },
            other => unreachable!("star assembly produced a malformed matrix: {other}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainDecl {
    pub fraction: ReducedFraction,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarSpec {
    pub s0: BigInt,
    pub chains: Vec<ChainDecl>,
}

impl StarSpec {
    pub fn new(s0: impl Into<BigInt>) -> Self {
        StarSpec {
            s0: s0.into(),
            chains: Vec::new(),
        }
    }

    pub fn chain(mut self, a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self, StarError> {
        self.chains.push(ChainDecl {
            fraction: ReducedFraction::new(a, b)?,
            count: 1,
        });
        Ok(self)
    }

    pub fn repeated(mut self, a: impl Into<BigInt>, b: impl Into<BigInt>, count: usize) -> Result<Self, StarError> {
        self.chains.push(ChainDecl {
            fraction: ReducedFraction::new(a, b)?,
            count,
        });
        Ok(self)
    }

    pub fn push(&mut self, fraction: ReducedFraction, count: usize) {
        self.chains.push(ChainDecl { fraction, count });
    }

    /// Spec with one chain `s/1` per entry of `leaves`.
    pub fn pure(s0: impl Into<BigInt>, leaves: &[i64]) -> Result<Self, StarError> {
        leaves.iter().try_fold(Self::new(s0), |spec, &s| spec.chain(s, 1))
    }

    /// Chains with repeat counts unfolded and contractible `1/1` chains
    /// dropped.
    pub fn fractions(&self) -> Vec<&ReducedFraction> {
        self.chains
            .iter()
            .flat_map(|c| std::iter::repeat_n(&c.fraction, c.count))
            .filter(|f| !f.is_contractible())
            .collect()
    }

    pub fn arms(&self) -> usize {
        self.fractions().len()
    }

    pub fn is_star_shaped(&self) -> bool {
        self.arms() >= 3
    }

    /// `Σ bⱼ/aⱼ` over the effective chains.
    pub fn correction_sum(&self) -> BigRational {
        self.fractions()
            .into_iter()
            .fold(BigRational::zero(), |acc, f| acc + f.inverse_value())
    }

    fn check(&self) -> Result<(), StarError> {
        if self.s0 < BigInt::one() {
            return Err(StarError::BadNode(self.s0.clone()));
        }
        for f in self.fractions() {
            if f.is_absent() {
                return Err(HjError::NotReduced {
                    a: f.numerator().clone(),
                    b: BigInt::zero(),
                }
                .into());
            }
        }
        Ok(())
    }

    /// `s₀ − Σ bⱼ/aⱼ`.
    pub fn node_excess(&self) -> BigRational {
        BigRational::from_integer(self.s0.clone()) - self.correction_sum()
    }
}

impl fmt::Display for StarSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N({} |", self.s0)?;
        for (i, c) in self.chains.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}{}", c.fraction)?;
            if c.count != 1 {
                write!(f, " x{}", c.count)?;
            }
        }
        f.write_str(")")
    }
}

#[derive(Serialize, Deserialize)]
struct ChainJson {
    a: JsonInt,
    b: JsonInt,
    #[serde(default = "one")]
    count: usize,
}

fn one() -> usize {
    1
}

#[derive(Serialize, Deserialize)]
struct StarJson {
    s0: JsonInt,
    chains: Vec<ChainJson>,
}

impl Serialize for StarSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        StarJson {
            s0: JsonInt(self.s0.clone()),
            chains: self
                .chains
                .iter()
                .map(|c| ChainJson {
                    a: JsonInt(c.fraction.numerator().clone()),
                    b: JsonInt(c.fraction.denominator().clone()),
                    count: c.count,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StarSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = StarJson::deserialize(deserializer)?;
        let mut spec = StarSpec::new(raw.s0.0);
        for c in raw.chains {
            let f = ReducedFraction::new(c.a.0, c.b.0).map_err(serde::de::Error::custom)?;
            spec.push(f, c.count);
        }
        Ok(spec)
    }
}

/// Where each effective chain landed in the assembled matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainPlacement {
    pub fraction: ReducedFraction,
    pub vertices: Range<usize>,
}

impl ChainPlacement {
    /// Vertex adjacent to the node.
    pub fn first(&self) -> usize {
        self.vertices.start
    }

    /// Far end of the chain.
    pub fn terminal(&self) -> usize {
        self.vertices.end - 1
    }
}

pub fn build_star(spec: &StarSpec) -> Result<IntersectionMatrix, StarError> {
    build_star_with_layout(spec).map(|(m, _)| m)
}

pub fn build_star_with_layout(spec: &StarSpec) -> Result<(IntersectionMatrix, Vec<ChainPlacement>), StarError> {
    spec.check()?;
    let chains: Vec<(ReducedFraction, Vec<BigInt>)> = spec
        .fractions()
        .into_iter()
        .map(|f| (f.clone(), cf_expand(f).entries().to_vec()))
        .collect();
    let n = 1 + chains.iter().map(|(_, c)| c.len()).sum::<usize>();
    let mut rows = vec![vec![BigInt::zero(); n]; n];
    let mut labels = Vec::with_capacity(n);
    rows[0][0] = -spec.s0.clone();
    labels.push("node".to_string());
    let mut layout = Vec::with_capacity(chains.len());
    let mut at = 1;
    for (j, (fraction, entries)) in chains.into_iter().enumerate() {
        let start = at;
        for (k, s) in entries.into_iter().enumerate() {
            rows[at][at] = -s;
            let prev = if k == 0 { 0 } else { at - 1 };
            rows[at][prev] = BigInt::one();
            rows[prev][at] = BigInt::one();
            labels.push(format!("c{}.{}", j + 1, k + 1));
            at += 1;
        }
        layout.push(ChainPlacement {
            fraction,
            vertices: start..at,
        });
    }
    let matrix = IntersectionMatrix::validate(rows, Some(labels))?;
    Ok((matrix, layout))
}

/// `(−1)ⁿ (∏ aⱼ)(s₀ − Σ bⱼ/aⱼ)`, evaluated without assembling the matrix.
pub fn star_determinant(spec: &StarSpec) -> Result<BigInt, StarError> {
    spec.check()?;
    let excess = positive_excess(spec)?;
    let fractions = spec.fractions();
    let n = 1 + fractions.iter().map(|f| cf_expand(f).len()).sum::<usize>();
    let product: BigInt = fractions.iter().map(|f| f.numerator().clone()).product();
    let value = excess * BigRational::from_integer(product);
    debug_assert!(value.is_integer());
    let magnitude = value.to_integer();
    Ok(if n % 2 == 0 { magnitude } else { -magnitude })
}

/// `lcm(aⱼ)·(s₀ − Σ bⱼ/aⱼ)`, the order of the node's class in `Φ`.
pub fn node_order(spec: &StarSpec) -> Result<BigInt, StarError> {
    spec.check()?;
    let excess = positive_excess(spec)?;
    let lcm = spec
        .fractions()
        .iter()
        .fold(BigInt::one(), |acc, f| acc.lcm(f.numerator()));
    let value = excess * BigRational::from_integer(lcm);
    debug_assert!(value.is_integer());
    Ok(value.to_integer())
}

fn positive_excess(spec: &StarSpec) -> Result<BigRational, StarError> {
    let excess = spec.node_excess();
    if !excess.is_positive() {
        return Err(StarError::NodeInequality {
            s0: spec.s0.clone(),
            sum: spec.correction_sum(),
        });
    }
    Ok(excess)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{class_order, discriminant_group, Cokernel};

    fn d4() -> StarSpec {
        StarSpec::new(2).repeated(2, 1, 3).unwrap()
    }

    #[test]
    fn d4_assembly() {
        let (m, layout) = build_star_with_layout(&d4()).unwrap();
        assert_eq!(m.n(), 4);
        assert_eq!(m.exact_determinant(), &BigInt::from(4));
        assert_eq!(layout.len(), 3);
        assert_eq!(layout[2].vertices, 3..4);
        assert_eq!(star_determinant(&d4()).unwrap(), BigInt::from(4));
        assert_eq!(node_order(&d4()).unwrap(), BigInt::one());
        assert_eq!(class_order(&m, 0).unwrap(), BigInt::one());
        assert!(d4().is_star_shaped());
    }

    #[test]
    fn e8_layout() {
        let spec = StarSpec::new(2)
            .chain(3, 2)
            .unwrap()
            .chain(5, 4)
            .unwrap()
            .chain(2, 1)
            .unwrap();
        let (m, layout) = build_star_with_layout(&spec).unwrap();
        assert_eq!(m.n(), 8);
        assert_eq!(m.exact_determinant(), &BigInt::one());
        assert_eq!(layout[0].vertices, 1..3);
        assert_eq!(layout[1].vertices, 3..7);
        assert_eq!(layout[2].terminal(), 7);
        assert!(discriminant_group(&m).is_trivial());
    }

    #[test]
    fn boundary_case_is_rejected_with_witness() {
        let spec = StarSpec::new(1).chain(2, 1).unwrap().chain(2, 1).unwrap();
        let err = build_star(&spec).unwrap_err();
        assert!(matches!(err, StarError::NotNegativeDefinite { .. }), "{err:?}");
        assert!(matches!(star_determinant(&spec), Err(StarError::NodeInequality { .. })));
    }

    #[test]
    fn known_determinants() {
        let peskin5 = StarSpec::new(2)
            .chain(5, 4)
            .unwrap()
            .chain(5, 4)
            .unwrap()
            .chain(3, 1)
            .unwrap();
        assert_eq!(star_determinant(&peskin5).unwrap().abs(), BigInt::from(5));
        let e8_3 = StarSpec::new(2)
            .chain(3, 2)
            .unwrap()
            .chain(4, 3)
            .unwrap()
            .chain(7, 4)
            .unwrap();
        assert_eq!(star_determinant(&e8_3).unwrap().abs(), BigInt::one());
        let d4_2 = StarSpec::new(2).repeated(2, 1, 3).unwrap();
        assert_eq!(star_determinant(&d4_2).unwrap(), BigInt::from(4));
        let peskin3 = StarSpec::new(2)
            .chain(3, 2)
            .unwrap()
            .chain(3, 2)
            .unwrap()
            .chain(2, 1)
            .unwrap();
        assert_eq!(node_order(&peskin3).unwrap(), BigInt::one());
        let n1 = StarSpec::new(2).repeated(2, 1, 3).unwrap();
        assert_eq!(node_order(&n1).unwrap(), BigInt::one());
    }

    #[test]
    fn contractible_chains_are_dropped() {
        let spec = StarSpec::new(2).repeated(2, 1, 3).unwrap().chain(1, 1).unwrap();
        assert_eq!(spec.arms(), 3);
        assert_eq!(build_star(&spec).unwrap().n(), 4);
        let lone = StarSpec::new(1);
        assert_eq!(build_star(&lone).unwrap().exact_determinant(), &BigInt::from(-1));
        assert!(!lone.is_star_shaped());
    }

    #[test]
    fn chain_classes_agree_with_node() {
        let spec = StarSpec::new(3)
            .chain(5, 2)
            .unwrap()
            .chain(7, 3)
            .unwrap()
            .chain(4, 1)
            .unwrap();
        let (m, layout) = build_star_with_layout(&spec).unwrap();
        let ck = Cokernel::new(&m);
        for c in &layout {
            let mut x = vec![BigInt::zero(); m.n()];
            x[c.terminal()] = c.fraction.numerator().clone();
            x[0] -= BigInt::one();
            assert!(ck.contains(&x).unwrap());
        }
    }

    #[test]
    fn json_round_trip() {
        let spec = StarSpec::new(2).repeated(3, 2, 2).unwrap().chain(2, 1).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(
            text,
            r#"{"s0":2,"chains":[{"a":3,"b":2,"count":2},{"a":2,"b":1,"count":1}]}"#
        );
        let back: StarSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        let defaulted: StarSpec = serde_json::from_str(r#"{"s0":2,"chains":[{"a":5,"b":4}]}"#).unwrap();
        assert_eq!(defaulted.chains[0].count, 1);
        assert_eq!(spec.to_string(), "N(2 | 3/2 x2, 2/1)");
    }
}
