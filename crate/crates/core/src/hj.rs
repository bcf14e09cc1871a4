//! Hirzebruch–Jung continued fractions, chain matrices and the reduction of
//! triples `(t, r, s)` to fraction types.
//!
//! The expansion convention is the descending one:
//! `a/b = s₁ − 1/(s₂ − 1/(⋯ − 1/s_ℓ))` with every `sᵢ ≥ 2`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json::JsonInt;
use crate::matrix::IntersectionMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum HjError {
    #[error("{a}/{b} is not a reduced fraction with a >= b >= 0")]
    NotReduced { a: BigInt, b: BigInt },
    #[error("chain entry {index} is {value}, entries must be at least 2")]
    EntryTooSmall { index: usize, value: BigInt },
    #[error("chain is empty")]
    EmptyChain,
    #[error("matrix is not a chain: {0}")]
    NotAChain(String),
    #[error("gcd(t, r, s) = {0}, expected 1")]
    GcdNotOne(u64),
    #[error("t must be positive")]
    ZeroModulus,
}

/// A coprime pair `a/b` with `a ≥ b ≥ 0`.
///
/// `1/1` stands for the single `(−1)`-curve and `1/0` for the absent chain;
/// every other value has `a > b ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedFraction {
    a: BigInt,
    b: BigInt,
}

impl ReducedFraction {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self, HjError> {
        let (a, b) = (a.into(), b.into());
        if !a.is_positive() || b.is_negative() || b > a || !a.gcd(&b).is_one() {
            return Err(HjError::NotReduced { a, b });
        }
        Ok(ReducedFraction { a, b })
    }

    pub fn numerator(&self) -> &BigInt {
        &self.a
    }

    pub fn denominator(&self) -> &BigInt {
        &self.b
    }

    pub fn is_contractible(&self) -> bool {
        self.a.is_one() && self.b.is_one()
    }

    pub fn is_absent(&self) -> bool {
        self.b.is_zero()
    }

    /// `b/a`, the correction term the chain contributes at its attaching node.
    pub fn inverse_value(&self) -> BigRational {
        BigRational::new(self.b.clone(), self.a.clone())
    }

    pub fn value(&self) -> Option<BigRational> {
        (!self.b.is_zero()).then(|| BigRational::new(self.a.clone(), self.b.clone()))
    }
}

impl fmt::Display for ReducedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.a, self.b)
    }
}

/// Continued-fraction entries `[s₁, …, s_ℓ]`.
///
/// The empty chain is the absent chain; `[1]` is the contractible marker
/// produced by `1/1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ChainSpec {
    entries: Vec<BigInt>,
}

impl ChainSpec {
    pub fn new(entries: Vec<BigInt>) -> Result<Self, HjError> {
        let c = ChainSpec { entries };
        if !c.is_contractible() {
            c.check_entries()?;
        }
        Ok(c)
    }

    pub fn from_i64(entries: &[i64]) -> Result<Self, HjError> {
        Self::new(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_contractible(&self) -> bool {
        self.entries.len() == 1 && self.entries[0].is_one()
    }

    fn check_entries(&self) -> Result<(), HjError> {
        for (index, v) in self.entries.iter().enumerate() {
            if *v < BigInt::from(2) {
                return Err(HjError::EntryTooSmall {
                    index,
                    value: v.clone(),
                });
            }
        }
        Ok(())
    }
}

impl Serialize for ChainSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        crate::json::ints(&self.entries).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ChainSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Vec::<JsonInt>::deserialize(deserializer)?;
        ChainSpec::new(raw.into_iter().map(|x| x.0).collect()).map_err(serde::de::Error::custom)
    }
}

pub fn cf_expand(f: &ReducedFraction) -> ChainSpec {
    let (mut a, mut b) = (f.a.clone(), f.b.clone());
    let mut entries = Vec::new();
    while !b.is_zero() {
        let s = a.div_ceil(&b);
        let next = &s * &b - &a;
        entries.push(s);
        a = b;
        b = next;
    }
    ChainSpec { entries }
}

/// Left inverse of [`cf_expand`]. The empty chain evaluates to the absent
/// marker `1/0`.
pub fn cf_evaluate(c: &ChainSpec) -> Result<ReducedFraction, HjError> {
    if c.is_contractible() {
        return Ok(ReducedFraction {
            a: BigInt::one(),
            b: BigInt::one(),
        });
    }
    c.check_entries()?;
    // Fold from the tail: the tail value p/q becomes s − q/p.
    let (mut p, mut q) = (BigInt::one(), BigInt::zero());
    for s in c.entries.iter().rev() {
        let np = s * &p - &q;
        q = p;
        p = np;
    }
    Ok(ReducedFraction { a: p, b: q })
}

/// Tridiagonal matrix `diag(−s₁, …, −s_ℓ)` with ones beside the diagonal.
pub fn chain_matrix(c: &ChainSpec) -> Result<IntersectionMatrix, HjError> {
    if c.is_empty() {
        return Err(HjError::EmptyChain);
    }
    if !c.is_contractible() {
        c.check_entries()?;
    }
    let n = c.len();
    let mut rows = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        rows[i][i] = -c.entries[i].clone();
        if i + 1 < n {
            rows[i][i + 1] = BigInt::one();
            rows[i + 1][i] = BigInt::one();
        }
    }
    Ok(IntersectionMatrix::validate(rows, None).expect("chain matrices are negative definite"))
}

/// The positive solution `R` of `N·R = (−r₀, 0, …, 0)` for a chain matrix,
/// normalized so that its last entry is 1.
pub fn chain_solution(m: &IntersectionMatrix) -> Result<(BigInt, Vec<BigInt>), HjError> {
    let entries = chain_entries(m)?;
    let l = entries.len();
    let mut r = vec![BigInt::zero(); l + 1];
    r[l] = BigInt::one();
    let mut next = BigInt::zero();
    for i in (1..=l).rev() {
        let v = &entries[i - 1] * &r[i] - &next;
        next = r[i].clone();
        r[i - 1] = v;
    }
    let r0 = r.remove(0);
    Ok((r0, r))
}

fn chain_entries(m: &IntersectionMatrix) -> Result<Vec<BigInt>, HjError> {
    let n = m.n();
    let mut s = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let want = if i.abs_diff(j) == 1 {
                BigInt::one()
            } else {
                BigInt::zero()
            };
            if m.entry(i, j) != &want {
                return Err(HjError::NotAChain(format!("entry ({i},{j}) is {}", m.entry(i, j))));
            }
        }
        let v = -m.entry(i, i).clone();
        if v < BigInt::from(2) {
            return Err(HjError::NotAChain(format!("vertex {i} has self-intersection {}", -v)));
        }
        s.push(v);
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HjTriple {
    pub t: u64,
    pub r: u64,
    pub s: u64,
}

impl HjTriple {
    pub fn new(t: u64, r: u64, s: u64) -> Self {
        HjTriple { t, r, s }
    }

    pub fn gcd(&self) -> u64 {
        self.t.gcd(&self.r).gcd(&self.s)
    }
}

/// Either `0` or `(t − e)/t` with `0 < e < t` coprime to `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FractionType {
    Zero,
    Proper { t: u64, e: u64 },
}

impl FractionType {
    pub fn value(&self) -> BigRational {
        match *self {
            FractionType::Zero => BigRational::zero(),
            FractionType::Proper { t, e } => BigRational::new((t - e).into(), t.into()),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, FractionType::Zero)
    }

    /// `t/(t − e)`, whose expansion is the resolving chain.
    pub fn reciprocal(&self) -> Option<ReducedFraction> {
        match *self {
            FractionType::Zero => None,
            FractionType::Proper { t, e } => Some(ReducedFraction {
                a: t.into(),
                b: (t - e).into(),
            }),
        }
    }

    pub fn chain(&self) -> Option<ChainSpec> {
        self.reciprocal().map(|f| cf_expand(&f))
    }
}

impl fmt::Display for FractionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FractionType::Zero => f.write_str("0"),
            FractionType::Proper { t, e } => write!(f, "{}/{}", t - e, t),
        }
    }
}

/// Fraction type of the cyclic quotient singularity obtained by normalizing
/// `W^t = U^r V^s`.
///
/// Each pass first reduces `r, s` modulo `t`, then adjoins roots of the
/// common factors `h = gcd(t, r)` and `h' = gcd(t, s)`.
pub fn hj_fraction_type(triple: HjTriple) -> Result<FractionType, HjError> {
    let HjTriple { mut t, mut r, mut s } = triple;
    if t == 0 {
        return Err(HjError::ZeroModulus);
    }
    let g = triple.gcd();
    if g != 1 {
        return Err(HjError::GcdNotOne(g));
    }
    loop {
        r %= t;
        s %= t;
        if r == 0 || s == 0 {
            return Ok(FractionType::Zero);
        }
        let h = t.gcd(&r);
        let h2 = t.gcd(&s);
        if r % (t / h2) == 0 || s % (t / h) == 0 {
            return Ok(FractionType::Zero);
        }
        if h == 1 && h2 == 1 {
            let e = (s as u128 * mod_inverse(r, t) as u128 % t as u128) as u64;
            return Ok(FractionType::Proper { t, e });
        }
        t /= h * h2;
        r /= h;
        s /= h2;
    }
}

fn mod_inverse(r: u64, t: u64) -> u64 {
    let ext = (r as i128).extended_gcd(&(t as i128));
    debug_assert_eq!(ext.gcd, 1);
    ext.x.rem_euclid(t as i128) as u64
}
