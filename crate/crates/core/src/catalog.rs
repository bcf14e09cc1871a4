//! Constructors for the explicit resolution graphs and parameter families,
//! each paired with the invariants it is predicted to have.
//!
//! Star-shaped entries keep the vertex order of [`build_star`]: node first,
//! then chains in the order listed in each constructor's doc comment, each
//! chain starting next to the node.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cycles::{self, Cycle, CycleError, RationalCycle};
use crate::hj::{hj_fraction_type, FractionType, HjError, HjTriple, ReducedFraction};
use crate::json::{self, JsonInt, JsonRational};
use crate::lattice::{AbelianGroup, Cokernel};
use crate::matrix::IntersectionMatrix;
use crate::star::{build_star_with_layout, ChainPlacement, StarError, StarSpec};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("gcd condition violated: {0}")]
    GcdViolation(String),
    #[error("gcd condition violated: {0}")]
    GcdConditionViolated(String),
    #[error("node self-intersection {0} is not an integer")]
    NonIntegralS0(BigRational),
    #[error("node genus {0} is not a nonnegative integer")]
    NonIntegralGenus(BigRational),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} must be odd")]
    NotOdd(u64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error(transparent)]
    Star(#[from] StarError),
    #[error(transparent)]
    Hj(#[from] HjError),
    #[error(transparent)]
    Cycle(#[from] CycleError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Proven,
    Conjectural,
}

/// Invariants a construction is claimed to have. `None` means no claim.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Predicted {
    pub det_abs: Option<BigInt>,
    pub group: Option<AbelianGroup>,
    pub killed_by: Option<BigInt>,
    pub z_squared: Option<BigInt>,
    pub z_squared_max: Option<BigInt>,
    pub fundamental_cycle: Option<Cycle>,
    pub genus: Option<BigInt>,
    pub canonical: Option<RationalCycle>,
    pub numerically_gorenstein: Option<bool>,
    pub class_orders: Vec<(usize, BigInt)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    pub provenance: String,
    pub status: Status,
    pub spec: Option<StarSpec>,
    pub layout: Vec<ChainPlacement>,
    pub matrix: IntersectionMatrix,
    pub predicted: Predicted,
    /// Genus of the node curve when it is not known to be rational.
    pub node_genus: Option<BigInt>,
}

impl CatalogEntry {
    fn from_spec(name: String, provenance: &str, status: Status, spec: StarSpec) -> Result<Self, CatalogError> {
        let (matrix, layout) = build_star_with_layout(&spec)?;
        Ok(CatalogEntry {
            name,
            provenance: provenance.to_string(),
            status,
            spec: Some(spec),
            layout,
            matrix,
            predicted: Predicted::default(),
            node_genus: None,
        })
    }

    /// Every component is a rational curve.
    pub fn rational_components(&self) -> bool {
        self.node_genus.as_ref().is_none_or(Zero::is_zero)
    }

    fn conjectural(mut self, provenance: &str) -> Self {
        self.status = Status::Conjectural;
        self.provenance = provenance.to_string();
        self
    }
}

fn int(v: impl Into<BigInt>) -> BigInt {
    v.into()
}

fn rat(a: impl Into<BigInt>, b: impl Into<BigInt>) -> BigRational {
    BigRational::new(a.into(), b.into())
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn require_prime(p: u64) -> Result<(), CatalogError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(CatalogError::NotPrime(p))
    }
}

fn require_odd_prime(p: u64) -> Result<(), CatalogError> {
    require_prime(p)?;
    if p == 2 {
        return Err(CatalogError::NotOdd(p));
    }
    Ok(())
}

/// Least positive `b` with `b·ℓ ≡ −1 (mod a)`; 0 when `a = 1`.
fn neg_inverse(l: u64, a: u64) -> u64 {
    if a == 1 {
        return 0;
    }
    let ext = (l as i128).extended_gcd(&(a as i128));
    debug_assert_eq!(ext.gcd, 1);
    (-ext.x).rem_euclid(a as i128) as u64
}

fn pow(p: u64, e: u64) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Resolution of `z^q + x^c + y^d = 0`: `N(s₀ | a₁/b₁, a₂/b₂, (q/b₀) × g)`
/// with chains of numerator 1 removed.
pub fn brieskorn(q: u64, c: u64, d: u64) -> Result<CatalogEntry, CatalogError> {
    if q < 2 || c < 2 || d < 2 {
        return Err(CatalogError::InvalidParameter(format!(
            "q, c, d must be at least 2, got ({q}, {c}, {d})"
        )));
    }
    if q.gcd(&(c * d)) != 1 {
        return Err(CatalogError::GcdViolation(format!(
            "gcd({q}, {c}*{d}) = {}",
            q.gcd(&(c * d))
        )));
    }
    let g = c.gcd(&d);
    let (a1, a2, a0) = (c / g, d / g, q);
    let (l0, l1, l2) = (c * d / g, d * q / g, c * q / g);
    let (b0, b1, b2) = (
        neg_inverse(l0 % a0, a0),
        neg_inverse(l1 % a1, a1),
        neg_inverse(l2 % a2, a2),
    );
    let s0 = rat(g * g, c * d * q) + rat(b1, a1) + rat(b2, a2) + rat(g * b0, q);
    if !s0.is_integer() || !s0.is_positive() {
        return Err(CatalogError::NonIntegralS0(s0));
    }
    let mut spec = StarSpec::new(s0.to_integer());
    if a1 > 1 {
        spec.push(ReducedFraction::new(a1, b1)?, 1);
    }
    if a2 > 1 {
        spec.push(ReducedFraction::new(a2, b2)?, 1);
    }
    spec.push(ReducedFraction::new(a0, b0)?, g as usize);
    let mut entry = CatalogEntry::from_spec(
        format!("brieskorn({q},{c},{d})"),
        "brieskorn-resolution",
        Status::Proven,
        spec,
    )?;
    entry.predicted.det_abs = Some(pow(q, g - 1));
    if is_prime(q) {
        entry.predicted.group = Some(AbelianGroup::elementary_p(q, (g - 1) as usize));
        entry.predicted.killed_by = Some(int(q));
    }
    Ok(entry)
}

/// Constants attached to `W^q − U^a V^b (V^d − U^c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedData {
    pub m: u64,
    pub g: u64,
    pub w: u64,
    pub w_a: u64,
    pub w_b: u64,
    pub alpha: FractionType,
    pub beta: FractionType,
    pub gamma: FractionType,
    pub s0: BigInt,
    pub node_genus: BigInt,
}

pub fn weighted_data(q: u64, a: u64, b: u64, c: u64, d: u64, p: u64) -> Result<WeightedData, CatalogError> {
    if [q, a, b, c, d].contains(&0) {
        return Err(CatalogError::InvalidParameter("q, a, b, c, d must be positive".into()));
    }
    if p != 1 && !is_prime(p) {
        return Err(CatalogError::InvalidParameter(format!(
            "characteristic exponent {p} must be 1 or prime"
        )));
    }
    let m = a * d + b * c + c * d;
    let g = c.gcd(&d);
    let mg = m / g;
    let w = q.gcd(&mg);
    let w_a = w.gcd(&a);
    let w_b = w.gcd(&b);
    if a.gcd(&(c / g)) != 1 || b.gcd(&(d / g)) != 1 || p.gcd(&(w * g)) != 1 {
        return Err(CatalogError::GcdConditionViolated(format!(
            "gcd(a, c/g) = {}, gcd(b, d/g) = {}, gcd(p, wg) = {}",
            a.gcd(&(c / g)),
            b.gcd(&(d / g)),
            p.gcd(&(w * g))
        )));
    }
    let alpha = hj_fraction_type(HjTriple::new(q * c / (g * w_a), m / (g * w_a), a / w_a))?;
    let beta = hj_fraction_type(HjTriple::new(q * d / (g * w_b), m / (g * w_b), b / w_b))?;
    let gamma = hj_fraction_type(HjTriple::new(q, mg, 1))?;
    let s0 = rat(w * w * g * g, q * c * d)
        + BigRational::from_integer(int(w_a)) * alpha.value()
        + BigRational::from_integer(int(w_b)) * beta.value()
        + BigRational::from_integer(int(g)) * gamma.value();
    if !s0.is_integer() {
        return Err(CatalogError::NonIntegralS0(s0));
    }
    let twice_genus: BigInt = int(g) * int(w - 1) + 2u32 - int(w_a) - int(w_b);
    if twice_genus.is_negative() || twice_genus.is_odd() {
        return Err(CatalogError::NonIntegralGenus(BigRational::new(twice_genus, int(2))));
    }
    Ok(WeightedData {
        m,
        g,
        w,
        w_a,
        w_b,
        alpha,
        beta,
        gamma,
        s0: s0.to_integer(),
        node_genus: twice_genus / 2,
    })
}

/// Resolution of `W^q − U^a V^b (V^d − U^c) = 0` in characteristic exponent
/// `p`: `Γ(s₀ | α⁻¹ × w_a, β⁻¹ × w_b, γ⁻¹ × g)`, zero types dropped.
pub fn weighted_homogeneous(q: u64, a: u64, b: u64, c: u64, d: u64, p: u64) -> Result<CatalogEntry, CatalogError> {
    let data = weighted_data(q, a, b, c, d, p)?;
    let mut spec = StarSpec::new(data.s0.clone());
    for (ty, count) in [(data.alpha, data.w_a), (data.beta, data.w_b), (data.gamma, data.g)] {
        if let Some(f) = ty.reciprocal() {
            spec.push(f, count as usize);
        }
    }
    let name = format!("weighted_homogeneous({q},{a},{b},{c},{d};p={p})");
    let mut entry = CatalogEntry::from_spec(name, "weighted-homogeneous-resolution", Status::Proven, spec)?;
    entry.node_genus = Some(data.node_genus.clone());
    if q == p && is_prime(p) {
        let ap = u64::from(a.is_multiple_of(p));
        let bp = u64::from(b.is_multiple_of(p));
        entry.predicted.det_abs = Some(pow(p, data.g + 1 - ap - bp));
        entry.predicted.killed_by = Some(int(p));
    }
    if q == 1 {
        entry.predicted.det_abs = Some(BigInt::one());
    }
    Ok(entry)
}

/// `N(2 | p/(p−1), p/(p−1), ((p+1)/2)/1)`.
pub fn peskin(p: u64) -> Result<CatalogEntry, CatalogError> {
    require_odd_prime(p)?;
    let spec = StarSpec::new(2).repeated(p, p - 1, 2)?.chain(p.div_ceil(2), 1)?;
    let mut entry = CatalogEntry::from_spec(format!("peskin({p})"), "peskin-resolution", Status::Proven, spec)?;
    let mut z = vec![int(p)];
    for _ in 0..2 {
        z.extend((1..p).rev().map(int));
    }
    z.push(int(2));
    let factor = -rat(p - 3, 2);
    let k = z
        .iter()
        .map(|zi| &factor * BigRational::from_integer(zi.clone()))
        .collect();
    entry.predicted = Predicted {
        det_abs: Some(int(p)),
        z_squared: Some(int(-2)),
        fundamental_cycle: Some(z),
        genus: Some(int((p - 3) / 2)),
        canonical: Some(k),
        ..Predicted::default()
    };
    Ok(entry)
}

/// `N(2 | p/(p−1), (p+1)/p, (2p+1)/4)`. The distinguished terminal vertex is
/// the last one, the far end of the `(2p+1)/4` chain.
pub fn e8_analogue(p: u64) -> Result<CatalogEntry, CatalogError> {
    require_odd_prime(p)?;
    let spec = StarSpec::new(2).chain(p, p - 1)?.chain(p + 1, p)?.chain(2 * p + 1, 4)?;
    let mut entry = CatalogEntry::from_spec(
        format!("e8_analogue({p})"),
        "e8-analogue-resolution",
        Status::Proven,
        spec,
    )?;
    let mut z = vec![int(p * p + p)];
    z.extend((1..p).map(|k| int((p + 1) * (p - k))));
    z.extend((1..=p).map(|k| int(p * (p + 1 - k))));
    z.push(int(2 * p + 1));
    z.push(int(p.div_ceil(2)));
    let ej = z.len() - 1;
    let mut k: RationalCycle = z
        .iter()
        .map(|zi| -BigRational::from_integer(int(2 * p - 4) * zi))
        .collect();
    k[ej] += rat(p - 3, 2);
    entry.predicted = Predicted {
        det_abs: Some(BigInt::one()),
        z_squared: Some(-int(p.div_ceil(2))),
        fundamental_cycle: Some(z),
        genus: Some(int((p * p - p + 2) / 2)),
        canonical: Some(k),
        ..Predicted::default()
    };
    Ok(entry)
}

/// `N(2 | p/(p−1), (p+1)/p, p²/(2p−1))`, suggested by experiment only.
pub fn e7_analogue(p: u64) -> Result<CatalogEntry, CatalogError> {
    require_prime(p)?;
    let spec = StarSpec::new(2)
        .chain(p, p - 1)?
        .chain(p + 1, p)?
        .chain(p * p, 2 * p - 1)?;
    let mut entry = CatalogEntry::from_spec(
        format!("e7_analogue({p})"),
        "e7-analogue-experiment",
        Status::Conjectural,
        spec,
    )?;
    entry.predicted.group = Some(AbelianGroup::elementary_p(p, 1));
    Ok(entry)
}

/// `N(p | p/(p−1) × (p+1))`.
pub fn d4_analogue(p: u64) -> Result<CatalogEntry, CatalogError> {
    require_prime(p)?;
    let spec = StarSpec::new(p).repeated(p, p - 1, (p + 1) as usize)?;
    let mut entry = CatalogEntry::from_spec(
        format!("d4_analogue({p})"),
        "d4-analogue-resolution",
        Status::Proven,
        spec,
    )?;
    let mut z = vec![int(p)];
    for _ in 0..=p {
        z.extend((1..p).rev().map(int));
    }
    let k = z.iter().map(|zi| -BigRational::from_integer(int(p - 2) * zi)).collect();
    entry.predicted = Predicted {
        det_abs: Some(pow(p, p)),
        group: Some(AbelianGroup::elementary_p(p, p as usize)),
        killed_by: Some(int(p)),
        z_squared: Some(-int(p)),
        fundamental_cycle: Some(z),
        genus: Some(int((p - 2) * (p + 1) / 2)),
        canonical: Some(k),
        ..Predicted::default()
    };
    Ok(entry)
}

/// `N(2 | p/(p−1), p/(p−1), p/1)`: a rational graph whose canonical cycle
/// is `−(p−2)R/p`, hence not numerically Gorenstein.
pub fn non_gorenstein_example(p: u64) -> Result<CatalogEntry, CatalogError> {
    require_odd_prime(p)?;
    let spec = StarSpec::new(2).repeated(p, p - 1, 2)?.chain(p, 1)?;
    let mut entry = CatalogEntry::from_spec(
        format!("non_gorenstein({p})"),
        "non-gorenstein-example",
        Status::Proven,
        spec,
    )?;
    let r = non_gorenstein_r(p);
    let k = r.iter().map(|ri| -rat(int(p - 2) * ri, p)).collect();
    let top = r.len() - 1;
    entry.predicted = Predicted {
        group: Some(AbelianGroup::elementary_p(p, 2)),
        killed_by: Some(int(p)),
        canonical: Some(k),
        numerically_gorenstein: Some(false),
        class_orders: vec![(top, int(p))],
        ..Predicted::default()
    };
    Ok(entry)
}

/// The vector `R` with `N·R = −p·e_C` for [`non_gorenstein_example`], in its
/// vertex order.
pub fn non_gorenstein_r(p: u64) -> Cycle {
    let mut r = vec![int(p)];
    for _ in 0..2 {
        r.extend((1..p).rev().map(int));
    }
    r.push(int(2));
    r
}

/// Appends a leaf `−(i + ∏sⱼ/|Φ|)` to a star all of whose arms are single
/// vertices.
pub fn star_extend(spec: &StarSpec, i: u64) -> Result<CatalogEntry, CatalogError> {
    if i != 1 && i != 2 {
        return Err(CatalogError::InvalidParameter(format!("i must be 1 or 2, got {i}")));
    }
    let leaves = pure_star_leaves(spec)?;
    let fail = |clause: &str| Err(CatalogError::PreconditionFailed(clause.to_string()));
    if leaves.len() < 3 {
        return fail("star needs at least three leaves");
    }
    if !leaves.iter().any(|s| s.is_even()) {
        return fail("some leaf must be even");
    }
    if leaves.iter().filter(|s| (*s % 4u32).is_zero()).count() > 1 {
        return fail("at most one leaf may be divisible by 4");
    }
    let (matrix, _) = build_star_with_layout(spec)?;
    let group = Cokernel::new(&matrix).group().clone();
    if !group.is_killed_by(&int(2)) {
        return fail("group must be killed by 2");
    }
    let z = cycles::fundamental_cycle(&matrix)?;
    if z.self_intersection.abs() > int(2) {
        return fail("|Z^2| must be at most 2");
    }
    let product: BigInt = leaves.iter().product();
    let order = group.order();
    debug_assert!((&product % &order).is_zero());
    let sn = int(i) + product / order;
    let mut extended = StarSpec::new(spec.s0.clone());
    for s in leaves.iter().chain(std::iter::once(&sn)) {
        extended.push(ReducedFraction::new(s.clone(), 1)?, 1);
    }
    let name = format!("star_extend({spec}, {i})");
    let mut entry = CatalogEntry::from_spec(name, "star-extension", Status::Proven, extended)?;
    entry.predicted.det_abs = Some(int(i) * matrix.exact_determinant().abs());
    entry.predicted.killed_by = Some(int(2));
    entry.predicted.z_squared_max = Some(int(2));
    entry.predicted.numerically_gorenstein = Some(true);
    Ok(entry)
}

fn pure_star_leaves(spec: &StarSpec) -> Result<Vec<BigInt>, CatalogError> {
    spec.fractions()
        .into_iter()
        .map(|f| {
            if f.denominator().is_one() {
                Ok(f.numerator().clone())
            } else {
                Err(CatalogError::PreconditionFailed(format!(
                    "arm {f} is not a single vertex"
                )))
            }
        })
        .collect()
}

/// `N(n+1 | 2/1 × (2n+1))`, the starting point of the extension tower.
pub fn star_seed(n: u64) -> Result<StarSpec, CatalogError> {
    if n == 0 {
        return Err(CatalogError::InvalidParameter("n must be positive".into()));
    }
    Ok(StarSpec::new(n + 1).repeated(2, 1, (2 * n + 1) as usize)?)
}

pub fn sylvester_sequence(n: usize) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = Vec::with_capacity(n);
    let mut product = BigInt::one();
    for _ in 0..n {
        let s = &product + 1u32;
        product *= &s;
        out.push(s);
    }
    out
}

/// An arbitrary star with no predicted invariants.
pub fn custom_star(spec: StarSpec) -> Result<CatalogEntry, CatalogError> {
    CatalogEntry::from_spec(format!("star {spec}"), "user-star", Status::Proven, spec)
}

/// `N(1 | s₁, …, sₙ)` with Sylvester's sequence `2, 3, 7, 43, …`.
pub fn sylvester_star(n: usize) -> Result<CatalogEntry, CatalogError> {
    if n == 0 {
        return Err(CatalogError::InvalidParameter("n must be positive".into()));
    }
    let mut spec = StarSpec::new(1);
    for s in sylvester_sequence(n) {
        spec.push(ReducedFraction::new(s, 1)?, 1);
    }
    let mut entry = CatalogEntry::from_spec(format!("sylvester_star({n})"), "sylvester-star", Status::Proven, spec)?;
    entry.predicted.det_abs = Some(BigInt::one());
    Ok(entry)
}

/// The two extensions of [`star_seed`]: `N(n+1 | 2/1 × (2n+1), 3/1)` for
/// variant 1 and `N(n+1 | 2/1 × (2n+1), 4/1)` for variant 2.
pub fn explicit8(n: u64, variant: u64) -> Result<CatalogEntry, CatalogError> {
    if n == 0 || !(1..=2).contains(&variant) {
        return Err(CatalogError::InvalidParameter(format!(
            "explicit8 needs n >= 1 and variant 1 or 2, got ({n}, {variant})"
        )));
    }
    let spec = StarSpec::new(n + 1)
        .repeated(2, 1, (2 * n + 1) as usize)?
        .chain(2 + variant, 1)?;
    let name = format!("explicit8({n},{variant})");
    let mut entry = CatalogEntry::from_spec(name, "star-extension-explicit", Status::Proven, spec)?;
    entry.predicted.det_abs = Some(num_traits::pow(int(2), (2 * n + variant - 1) as usize));
    entry.predicted.killed_by = Some(int(2));
    entry.predicted.z_squared_max = Some(int(2));
    entry.predicted.numerically_gorenstein = Some(true);
    Ok(entry)
}

/// `N(1 | 2, 3, 10, 16)`: killed by 2 but with `|Z²| = 4`, so out of reach of
/// the extension construction.
pub fn star_control() -> Result<CatalogEntry, CatalogError> {
    let spec = StarSpec::pure(1, &[2, 3, 10, 16])?;
    let mut entry = CatalogEntry::from_spec("star_control".into(), "star-extension-control", Status::Proven, spec)?;
    entry.predicted.group = Some(AbelianGroup::elementary_p(2, 2));
    entry.predicted.z_squared = Some(int(-4));
    Ok(entry)
}

/// `(m, n)` with `gcd(pn+1, pm+1) = pr+2`.
pub fn alls_params(p: u64, r: u64) -> Result<(u64, u64), CatalogError> {
    require_odd_prime(p)?;
    if r == 0 {
        return Err(CatalogError::InvalidParameter("r must be positive".into()));
    }
    let n = (p * r + r + 2) / 2;
    let m = (3 * p * r + r + 6) / 2;
    let g = (p * n + 1).gcd(&(p * m + 1));
    assert_eq!(g, p * r + 2, "gcd(pn+1, pm+1) must equal pr+2 at p={p}, r={r}");
    Ok((m, n))
}

/// The two four-vertex graphs found by computer experiment, with a `−1`
/// node: `N(1 | 2, 7, 3)` and `N(1 | 2, 8, 3)`.
pub fn experimental_pair() -> Result<[CatalogEntry; 2], CatalogError> {
    let mut left = CatalogEntry::from_spec(
        "experimental_left".into(),
        "experiment-b3",
        Status::Conjectural,
        StarSpec::pure(1, &[2, 7, 3])?,
    )?;
    left.predicted.det_abs = Some(BigInt::one());
    let mut right = CatalogEntry::from_spec(
        "experimental_right".into(),
        "experiment-c3",
        Status::Conjectural,
        StarSpec::pure(1, &[2, 8, 3])?,
    )?;
    right.predicted.det_abs = Some(int(2));
    Ok([left, right])
}

pub fn conjectural_graphs() -> Result<Vec<CatalogEntry>, CatalogError> {
    let mut out: Vec<CatalogEntry> = experimental_pair()?.into();
    for p in [2, 3, 5, 7] {
        out.push(e7_analogue(p)?);
    }
    for n in 1..=3 {
        out.push(explicit8(n, 2)?.conjectural("explicit8-wild-realization"));
    }
    Ok(out)
}

/// The fixed set of proven entries that `verify catalog` walks.
pub fn proven_entries() -> Result<Vec<CatalogEntry>, CatalogError> {
    let mut out = vec![brieskorn(2, 3, 5)?, brieskorn(3, 4, 5)?, brieskorn(3, 10, 25)?];
    out.push(weighted_homogeneous(2, 1, 1, 2, 1, 2)?);
    out.push(weighted_homogeneous(4, 2, 1, 3, 1, 1)?);
    for p in [3, 5, 7, 11] {
        out.push(peskin(p)?);
    }
    for p in [3, 5, 7, 11, 13] {
        out.push(e8_analogue(p)?);
    }
    for p in [2, 3, 5] {
        out.push(d4_analogue(p)?);
    }
    for p in [3, 5, 7] {
        out.push(non_gorenstein_example(p)?);
    }
    for n in 1..=5 {
        out.push(sylvester_star(n)?);
    }
    for n in 1..=4 {
        out.push(explicit8(n, 1)?);
        out.push(explicit8(n, 2)?);
    }
    out.push(star_control()?);
    Ok(out)
}

/// One predicted-versus-computed comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub entry: String,
    pub status: Status,
    pub provenance: String,
    pub checks: Vec<Check>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// A failed check only counts against proven entries.
    pub fn is_mismatch(&self) -> bool {
        self.status == Status::Proven && !self.passed()
    }
}

fn fmt_cycle<T: std::fmt::Display>(c: &[T]) -> String {
    let parts: Vec<String> = c.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

pub fn verify(entry: &CatalogEntry) -> Result<Verification, CatalogError> {
    let m = &entry.matrix;
    let p = &entry.predicted;
    let mut checks = Vec::new();
    let mut push = |name, expected: String, computed: String| {
        let pass = expected == computed;
        checks.push(Check {
            name,
            expected,
            computed,
            pass,
        });
    };
    let det = m.exact_determinant().abs();
    if let Some(want) = &p.det_abs {
        push("det", want.to_string(), det.to_string());
    }
    let ck = Cokernel::new(m);
    if let Some(want) = &p.group {
        push("group", want.to_string(), ck.group().to_string());
    }
    if let Some(k) = &p.killed_by {
        push("killed_by", format!("killed by {k}"), killed_label(ck.group(), k));
    }
    for (v, want) in &p.class_orders {
        let got = ck
            .class_order(*v)
            .map_err(|_| CatalogError::InvalidParameter(format!("vertex {v}")))?;
        push("class_order", format!("{v}:{want}"), format!("{v}:{got}"));
    }
    let needs_z =
        p.z_squared.is_some() || p.z_squared_max.is_some() || p.fundamental_cycle.is_some() || p.genus.is_some();
    if needs_z {
        let z = cycles::fundamental_cycle(m)?;
        if let Some(want) = &p.fundamental_cycle {
            push("fundamental_cycle", fmt_cycle(want), fmt_cycle(&z.cycle));
        }
        if let Some(want) = &p.z_squared {
            push("z_squared", want.to_string(), z.self_intersection.to_string());
        }
        if let Some(bound) = &p.z_squared_max {
            let within = z.self_intersection.abs() <= *bound;
            let computed = if within {
                format!("|Z^2| <= {bound}")
            } else {
                format!("|Z^2| = {}", z.self_intersection.abs())
            };
            push("z_squared_bound", format!("|Z^2| <= {bound}"), computed);
        }
        if let (Some(want), true) = (&p.genus, entry.rational_components()) {
            let got = match cycles::genus_of(m, &z) {
                Ok(g) => g.to_string(),
                Err(e) => e.to_string(),
            };
            push("genus", want.to_string(), got);
        }
    }
    if let Some(want) = &p.canonical {
        push("canonical", fmt_cycle(want), fmt_cycle(&cycles::canonical_cycle(m)));
    }
    if let Some(want) = p.numerically_gorenstein {
        let got = cycles::is_numerically_gorenstein(m)?.gorenstein;
        push("gorenstein", want.to_string(), got.to_string());
    }
    Ok(Verification {
        entry: entry.name.clone(),
        status: entry.status,
        provenance: entry.provenance.clone(),
        checks,
    })
}

fn killed_label(group: &AbelianGroup, k: &BigInt) -> String {
    if group.is_killed_by(k) {
        format!("killed by {k}")
    } else {
        format!("exponent {}", group.exponent())
    }
}

#[derive(Serialize)]
struct PredictedJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    det_abs: Option<JsonInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    group: Option<AbelianGroup>,
    #[serde(skip_serializing_if = "Option::is_none")]
    killed_by: Option<JsonInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z_squared: Option<JsonInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z_squared_max: Option<JsonInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fundamental_cycle: Option<Vec<JsonRational>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    genus: Option<JsonInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    canonical: Option<Vec<JsonRational>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    numerically_gorenstein: Option<bool>,
}

#[derive(Serialize)]
struct EntryJson<'a> {
    name: &'a str,
    status: Status,
    provenance: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    spec: Option<&'a StarSpec>,
    matrix: &'a IntersectionMatrix,
    predicted: PredictedJson,
    rational_components: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    node_genus: Option<JsonInt>,
}

impl Serialize for CatalogEntry {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let p = &self.predicted;
        let ji = |v: &Option<BigInt>| v.clone().map(JsonInt);
        EntryJson {
            name: &self.name,
            status: self.status,
            provenance: &self.provenance,
            spec: self.spec.as_ref(),
            matrix: &self.matrix,
            predicted: PredictedJson {
                det_abs: ji(&p.det_abs),
                group: p.group.clone(),
                killed_by: ji(&p.killed_by),
                z_squared: ji(&p.z_squared),
                z_squared_max: ji(&p.z_squared_max),
                fundamental_cycle: p.fundamental_cycle.as_deref().map(cycles::cycle_json),
                genus: ji(&p.genus),
                canonical: p.canonical.as_deref().map(json::rationals),
                numerically_gorenstein: p.numerically_gorenstein,
            },
            rational_components: self.rational_components(),
            node_genus: ji(&self.node_genus),
        }
        .serialize(serializer)
    }
}
