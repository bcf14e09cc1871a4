//! Seeded generators and the verification sweeps behind `singres verify`.
//!
//! Every sweep is a list of independent cases evaluated in parallel; results
//! come back in case order, so a fixed configuration always yields the same
//! records.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{self, is_prime, CatalogEntry, Status};
use crate::cycles::{self, CycleError};
use crate::hj::{
    cf_evaluate, cf_expand, chain_matrix, chain_solution, hj_fraction_type, ChainSpec, HjTriple, ReducedFraction,
};
use crate::json::JsonInt;
use crate::lattice::{discriminant_group, elementary_divisors, AbelianGroup, Cokernel};
use crate::linalg;
use crate::matrix::IntersectionMatrix;
use crate::star::{build_star_with_layout, node_order, star_determinant, StarSpec};

pub const DEFAULT_SEED: u64 = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Brieskorn,
    GorensteinMod2,
    StarFormulas,
    Families,
    Weighted,
    Mumford,
    Hj,
    StarExtend,
    Catalog,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Brieskorn,
        Suite::GorensteinMod2,
        Suite::StarFormulas,
        Suite::Families,
        Suite::Weighted,
        Suite::Mumford,
        Suite::Hj,
        Suite::StarExtend,
        Suite::Catalog,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Brieskorn => "brieskorn",
            Suite::GorensteinMod2 => "gorenstein-mod2",
            Suite::StarFormulas => "star-formulas",
            Suite::Families => "families",
            Suite::Weighted => "weighted",
            Suite::Mumford => "mumford",
            Suite::Hj => "hj",
            Suite::StarExtend => "star-extend",
            Suite::Catalog => "catalog",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL.into_iter().find(|suite| suite.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            format!("unknown suite {s:?}; expected one of {}", names.join(", "))
        })
    }
}

/// Sweep ranges. Unset fields fall back to per-suite defaults.
#[derive(Clone, Debug, Default)]
pub struct SweepConfig {
    pub primes: Option<Vec<u64>>,
    pub max: Option<u64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub depth: Option<usize>,
}

impl SweepConfig {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

/// One checked claim.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub suite: &'static str,
    pub tag: &'static str,
    pub case: String,
    pub status: Status,
    pub pass: bool,
    pub detail: Value,
}

impl Record {
    fn new(suite: Suite, tag: &'static str, case: impl Into<String>, pass: bool, detail: Value) -> Self {
        Record {
            suite: suite.name(),
            tag,
            case: case.into(),
            status: Status::Proven,
            pass,
            detail,
        }
    }

    fn conjectural(mut self) -> Self {
        self.status = Status::Conjectural;
        self
    }

    /// A failed claim that the construction is proven to satisfy.
    pub fn is_mismatch(&self) -> bool {
        !self.pass && self.status == Status::Proven
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub mismatches: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub suite: &'static str,
    pub records: Vec<Record>,
}

impl Report {
    pub fn summary(&self) -> BTreeMap<&'static str, Tally> {
        let mut out: BTreeMap<&'static str, Tally> = BTreeMap::new();
        for r in &self.records {
            let t = out.entry(r.tag).or_default();
            if r.pass {
                t.pass += 1;
            } else {
                t.fail += 1;
            }
            if r.is_mismatch() {
                t.mismatches += 1;
            }
        }
        out
    }

    pub fn mismatches(&self) -> usize {
        self.records.iter().filter(|r| r.is_mismatch()).count()
    }

    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn tagged(&self, tag: &str) -> impl Iterator<Item = &Record> + '_ {
        let tag = tag.to_string();
        self.records.iter().filter(move |r| r.tag == tag)
    }
}

pub fn run(suite: Suite, cfg: &SweepConfig) -> Report {
    let records = match suite {
        Suite::Brieskorn => brieskorn_sweep(cfg),
        Suite::GorensteinMod2 => gorenstein_sweep(cfg),
        Suite::StarFormulas => star_formula_sweep(cfg),
        Suite::Families => family_sweep(cfg),
        Suite::Weighted => weighted_sweep(cfg),
        Suite::Mumford => mumford_sweep(cfg),
        Suite::Hj => hj_sweep(cfg),
        Suite::StarExtend => star_extend_sweep(cfg),
        Suite::Catalog => catalog_sweep(),
    };
    Report {
        suite: suite.name(),
        records,
    }
}

/// Independent stream `i` of the generator seeded with `seed`.
pub fn trial_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

/// A star spec with at most 5 chains, numerators at most 9 and `s₀ ≤ 6`
/// that assembles to an intersection matrix.
pub fn random_star_spec<R: Rng>(rng: &mut R) -> StarSpec {
    loop {
        let mut spec = StarSpec::new(rng.random_range(1..=6u32));
        for _ in 0..rng.random_range(1..=5usize) {
            let a: u32 = rng.random_range(2..=9);
            let b = loop {
                let b: u32 = rng.random_range(1..a);
                if b.gcd(&a) == 1 {
                    break b;
                }
            };
            spec.push(ReducedFraction::new(a, b).expect("coprime"), 1);
        }
        if spec.node_excess().is_positive() && build_star_with_layout(&spec).is_ok() {
            return spec;
        }
    }
}

/// A connected intersection matrix on at most `max_n` vertices. Graphs are
/// random trees with occasional extra and doubled edges, weighted towards
/// `−2` curves.
pub fn random_matrix<R: Rng>(rng: &mut R, max_n: usize) -> IntersectionMatrix {
    assert!(max_n >= 1);
    loop {
        let n = rng.random_range(1..=max_n);
        let mut rows = vec![vec![BigInt::zero(); n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            let s: i64 = if rng.random_bool(0.55) {
                2
            } else if rng.random_bool(0.08) {
                1
            } else {
                rng.random_range(3..=7)
            };
            row[i] = BigInt::from(-s);
        }
        let link = |rows: &mut Vec<Vec<BigInt>>, i: usize, j: usize, w: i64| {
            rows[i][j] += w;
            rows[j][i] += w;
        };
        for k in 1..n {
            let j = rng.random_range(0..k);
            let w = if rng.random_bool(0.05) { 2 } else { 1 };
            link(&mut rows, k, j, w);
        }
        if n >= 3 && rng.random_bool(0.15) {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            if i != j {
                link(&mut rows, i, j, 1);
            }
        }
        if let Ok(m) = IntersectionMatrix::validate(rows, None) {
            return m;
        }
    }
}

/// A pure star `N(s₀ | s₁, …, s_k)` whose group is killed by 2.
pub fn random_mod2_star<R: Rng>(rng: &mut R) -> StarSpec {
    loop {
        let mut leaves: Vec<i64> = (0..rng.random_range(3..=6)).map(|_| rng.random_range(2..=12)).collect();
        leaves.sort_unstable();
        let spec = StarSpec::pure(rng.random_range(1..=4), &leaves).expect("pure leaves");
        if let Ok(m) = crate::star::build_star(&spec) {
            if discriminant_group(&m).is_killed_by(&BigInt::from(2)) {
                return spec;
            }
        }
    }
}

fn parallel<T: Sync, F>(cases: &[T], f: F) -> Vec<Record>
where
    F: Fn(&T) -> Vec<Record> + Sync + Send,
{
    cases
        .par_iter()
        .map(f)
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn ji(v: &BigInt) -> JsonInt {
    JsonInt(v.clone())
}

fn failure(suite: Suite, tag: &'static str, case: String, err: impl fmt::Display) -> Record {
    Record::new(suite, tag, case, false, json!({ "error": err.to_string() }))
}

fn brieskorn_sweep(cfg: &SweepConfig) -> Vec<Record> {
    let suite = Suite::Brieskorn;
    let primes = cfg.primes.clone().unwrap_or_else(|| vec![2, 3, 5, 7]);
    let max = cfg.max.unwrap_or(30);
    let mut cases = Vec::new();
    for &p in &primes {
        for c in 2..=max {
            for d in 2..=max {
                if p.gcd(&(c * d)) == 1 {
                    cases.push((p, c, d));
                }
            }
        }
    }
    let mut out = parallel(&cases, |&(p, c, d)| {
        let case = format!("brieskorn({p},{c},{d})");
        let entry = match catalog::brieskorn(p, c, d) {
            Ok(e) => e,
            Err(e) => return vec![failure(suite, "brieskorn-order", case, e)],
        };
        let g = c.gcd(&d);
        let group = discriminant_group(&entry.matrix);
        let want = AbelianGroup::elementary_p(p, (g - 1) as usize);
        let mut records = vec![Record::new(
            suite,
            "brieskorn-order",
            case.clone(),
            group == want,
            json!({ "g": g, "group": group, "expected": want }),
        )];
        if p == 2 && c % 2 == 1 && d % 2 == 1 {
            records.push(Record::new(
                suite,
                "brieskorn-even-exponent",
                case,
                (g - 1) % 2 == 0 && group.rank().is_multiple_of(2),
                json!({ "exponent": g - 1 }),
            ));
        }
        records
    });
    let mut lemma = Vec::new();
    for &p in primes.iter().filter(|&&p| p > 2) {
        for r in 1..=2u64 {
            lemma.push((p, r));
        }
    }
    out.extend(parallel(&lemma, |&(p, r)| {
        let case = format!("alls({p},{r})");
        let (m, n) = match catalog::alls_params(p, r) {
            Ok(v) => v,
            Err(e) => return vec![failure(suite, "brieskorn-gcd-family", case, e)],
        };
        match catalog::brieskorn(p, p * m + 1, p * n + 1) {
            Ok(entry) => {
                let group = discriminant_group(&entry.matrix);
                let want = AbelianGroup::elementary_p(p, (p * r + 1) as usize);
                vec![Record::new(
                    suite,
                    "brieskorn-gcd-family",
                    case,
                    group == want,
                    json!({ "m": m, "n": n, "group": group, "expected": want }),
                )]
            }
            Err(e) => vec![failure(suite, "brieskorn-gcd-family", case, e)],
        }
    }));
    out
}

fn gorenstein_sweep(cfg: &SweepConfig) -> Vec<Record> {
    let suite = Suite::GorensteinMod2;
    let trials = cfg.trials.unwrap_or(1000) as u64;
    let seed = cfg.seed();
    let max_n = cfg.max.unwrap_or(10) as usize;
    let ids: Vec<u64> = (0..trials).collect();
    let two = BigInt::from(2);
    let mut out = parallel(&ids, |&i| {
        let m = random_matrix(&mut trial_rng(seed, i), max_n);
        let case = format!("random#{i}(n={})", m.n());
        gorenstein_records(suite, case, &m, &two)
    });
    let pool: Vec<u64> = (0..trials / 4).collect();
    out.extend(parallel(&pool, |&i| {
        let spec = random_mod2_star(&mut trial_rng(seed ^ 0x5eed, i));
        let m = crate::star::build_star(&spec).expect("generator only returns valid specs");
        gorenstein_records(suite, format!("{spec}"), &m, &two)
    }));
    let tower: Vec<CatalogEntry> = extension_tower(4, 2).into_iter().filter_map(|(_, e)| e.ok()).collect();
    out.extend(parallel(&tower, |e| {
        gorenstein_records(suite, e.name.clone(), &e.matrix, &two)
    }));
    let primes: Vec<u64> = cfg.primes.clone().unwrap_or_else(|| vec![3, 5, 7]);
    out.extend(parallel(&primes, |&p| {
        let case = format!("non_gorenstein({p})");
        let entry = match catalog::non_gorenstein_example(p) {
            Ok(e) => e,
            Err(e) => return vec![failure(suite, "non-gorenstein", case, e)],
        };
        match cycles::is_numerically_gorenstein(&entry.matrix) {
            Ok(report) => {
                let want: Vec<BigRational> = catalog::non_gorenstein_r(p)
                    .iter()
                    .map(|r| -BigRational::new(BigInt::from(p - 2) * r, BigInt::from(p)))
                    .collect();
                let pass = !report.gorenstein && report.canonical == want;
                vec![Record::new(
                    suite,
                    "non-gorenstein",
                    case,
                    pass,
                    json!({
                        "gorenstein": report.gorenstein,
                        "canonical": cycles::rational_cycle_json(&report.canonical),
                        "witness": report.witness.as_ref().map(cycles::WitnessJson::from),
                    }),
                )]
            }
            Err(e) => vec![failure(suite, "non-gorenstein", case, e)],
        }
    }));
    out
}

fn gorenstein_records(suite: Suite, case: String, m: &IntersectionMatrix, two: &BigInt) -> Vec<Record> {
    let report = match cycles::is_numerically_gorenstein(m) {
        Ok(r) => r,
        Err(e) => return vec![failure(suite, "gorenstein-routes", case, e)],
    };
    let group = discriminant_group(m);
    let mut out = vec![Record::new(
        suite,
        "gorenstein-routes",
        case.clone(),
        true,
        json!({ "gorenstein": report.gorenstein }),
    )];
    if group.is_killed_by(two) {
        out.push(Record::new(
            suite,
            "gorenstein-mod2",
            case,
            report.gorenstein,
            json!({ "group": group, "gorenstein": report.gorenstein }),
        ));
    }
    out
}

/// Specs reached from `N(n+1 | 2 × (2n+1))`, `n ≤ max_seed`, by repeatedly
/// appending a leaf with `i ∈ {1, 2}`, up to `depth` steps. A branch stops
/// at the first extension whose preconditions fail; that failure is
/// returned in place of the entry.
pub fn extension_tower(max_seed: u64, depth: usize) -> Vec<(String, Result<CatalogEntry, catalog::CatalogError>)> {
    let mut out = Vec::new();
    for n in 1..=max_seed {
        let Ok(seed) = catalog::star_seed(n) else { continue };
        let mut frontier = vec![(seed.to_string(), seed)];
        for _ in 0..depth {
            let mut next = Vec::new();
            for (name, spec) in &frontier {
                for i in 1..=2 {
                    let label = format!("{name} +{i}");
                    let result = catalog::star_extend(spec, i);
                    if let Ok(entry) = &result {
                        next.push((label.clone(), entry.spec.clone().expect("star entries carry a spec")));
                    }
                    out.push((label, result));
                }
            }
            frontier = next;
        }
    }
    out
}

fn star_formula_sweep(cfg: &SweepConfig) -> Vec<Record> {
    let suite = Suite::StarFormulas;
    let trials = cfg.trials.unwrap_or(500) as u64;
    let seed = cfg.seed();
    let ids: Vec<u64> = (0..trials).collect();
    let mut out = parallel(&ids, |&i| {
        let spec = random_star_spec(&mut trial_rng(seed, i));
        star_formula_records(suite, &spec)
    });
    let mut elementary = Vec::new();
    for p in [2u64, 3, 5] {
        for m in 3..=5usize {
            for bs in multisets(1, p - 1, m) {
                let total: u64 = bs.iter().sum();
                if (total + 1).is_multiple_of(p) {
                    elementary.push((p, bs, (total + 1) / p));
                }
            }
        }
    }
    out.extend(parallel(&elementary, |(p, bs, s0)| {
        let mut spec = StarSpec::new(*s0);
        for &b in bs {
            spec.push(ReducedFraction::new(*p, b).expect("p prime"), 1);
        }
        let case = spec.to_string();
        match crate::star::build_star(&spec) {
            Ok(m) => {
                let group = discriminant_group(&m);
                let want = AbelianGroup::elementary_p(*p, bs.len() - 1);
                vec![Record::new(
                    suite,
                    "killed-by-p",
                    case,
                    group == want,
                    json!({ "group": group, "expected": want }),
                )]
            }
            Err(e) => vec![failure(suite, "killed-by-p", case, e)],
        }
    }));
    out
}

/// Nondecreasing sequences of length `len` with entries in `lo..=hi`.
fn multisets(lo: u64, hi: u64, len: usize) -> Vec<Vec<u64>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in lo..=hi {
        for mut rest in multisets(first, hi, len - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The determinant, node-order, node-class and node-triviality claims for
/// one star.
pub fn star_formula_records(suite: Suite, spec: &StarSpec) -> Vec<Record> {
    let case = spec.to_string();
    let (m, layout) = match build_star_with_layout(spec) {
        Ok(v) => v,
        Err(e) => return vec![failure(suite, "star-determinant", case, e)],
    };
    let mut out = Vec::new();
    let det = m.exact_determinant();
    match star_determinant(spec) {
        Ok(formula) => out.push(Record::new(
            suite,
            "star-determinant",
            case.clone(),
            &formula == det,
            json!({ "formula": ji(&formula), "determinant": ji(det) }),
        )),
        Err(e) => out.push(failure(suite, "star-determinant", case.clone(), e)),
    }
    let ck = Cokernel::new(&m);
    let node_class = ck.class_order(0).expect("node index");
    match node_order(spec) {
        Ok(formula) => out.push(Record::new(
            suite,
            "node-order",
            case.clone(),
            formula == node_class,
            json!({ "formula": ji(&formula), "class_order": ji(&node_class) }),
        )),
        Err(e) => out.push(failure(suite, "node-order", case.clone(), e)),
    }

    let n = m.n();
    let mut same_class = true;
    for placement in &layout {
        let mut x = vec![BigInt::zero(); n];
        x[0] = BigInt::one();
        x[placement.terminal()] -= placement.fraction.numerator();
        same_class &= ck.contains(&x).expect("length n");
    }
    let terminals: Vec<usize> = layout.iter().map(|c| c.terminal()).collect();
    let generated = terminals_generate(&m, &terminals);
    let lcm = spec
        .fractions()
        .iter()
        .fold(BigInt::one(), |acc, f| acc.lcm(f.numerator()));
    let bound = (BigRational::from_integer(&lcm * &lcm) * spec.node_excess()).to_integer();
    let killed = ck.group().is_killed_by(&bound);
    out.push(Record::new(
        suite,
        "node-class",
        case.clone(),
        same_class && generated && killed,
        json!({ "node_equals_terminal_multiples": same_class, "terminals_generate": generated, "killed_by_bound": killed }),
    ));

    let mut primes: Vec<u64> = Vec::new();
    for f in spec.fractions() {
        let a: u64 = f.numerator().try_into().expect("small numerators");
        for p in 2..=a {
            if a.is_multiple_of(p) && is_prime(p) && !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    primes.sort_unstable();
    for p in primes {
        if ck.group().is_killed_by(&BigInt::from(p)) {
            out.push(Record::new(
                suite,
                "node-trivial",
                format!("{case} p={p}"),
                node_class.is_one(),
                json!({ "p": p, "class_order": ji(&node_class) }),
            ));
        }
    }
    out
}

/// Whether the classes of `e_w` for `w ∈ terminals` generate `ℤⁿ/Mℤⁿ`:
/// the rows of `M` away from the terminals must span the remaining
/// coordinates.
fn terminals_generate(m: &IntersectionMatrix, terminals: &[usize]) -> bool {
    let n = m.n();
    let rest: Vec<usize> = (0..n).filter(|i| !terminals.contains(i)).collect();
    let mut rows: Vec<Vec<BigInt>> = rest.iter().map(|&i| m.entries()[i].clone()).collect();
    rows.resize(n, vec![BigInt::zero(); n]);
    let divisors = elementary_divisors(&rows);
    let nonzero: Vec<&BigInt> = divisors.iter().filter(|d| !d.is_zero()).collect();
    nonzero.len() == rest.len() && nonzero.iter().all(|d| d.is_one())
}

fn family_sweep(cfg: &SweepConfig) -> Vec<Record> {
    let suite = Suite::Families;
    let mut entries: Vec<Result<CatalogEntry, (String, catalog::CatalogError)>> = Vec::new();
    let mut add = |name: String, r: Result<CatalogEntry, catalog::CatalogError>| entries.push(r.map_err(|e| (name, e)));
    let pick = |default: &[u64]| cfg.primes.clone().unwrap_or_else(|| default.to_vec());
    for p in pick(&[3, 5, 7, 11]) {
        add(format!("peskin({p})"), catalog::peskin(p));
    }
    for p in pick(&[3, 5, 7, 11, 13]) {
        add(format!("e8_analogue({p})"), catalog::e8_analogue(p));
    }
    for p in pick(&[2, 3, 5]) {
        add(format!("d4_analogue({p})"), catalog::d4_analogue(p));
    }
    let mut out = parallel(&entries, |e| match e {
        Ok(entry) => entry_records(suite, entry),
        Err((name, err)) => vec![failure(suite, "family", name.clone(), err)],
    });
    let chains: Vec<u64> = (2..=cfg.max.unwrap_or(11)).filter(|&p| is_prime(p)).collect();
    out.extend(parallel(&chains, |&p| {
        let chain = ChainSpec::new(vec![BigInt::from(2); (p - 1) as usize]).expect("entries are 2");
        let m = chain_matrix(&chain).expect("nonempty");
        let want = if (p - 1) % 2 == 0 {
            BigInt::from(p)
        } else {
            -BigInt::from(p)
        };
        let det = m.exact_determinant();
        vec![Record::new(
            suite,
            "a-chain-determinant",
            format!("A_{}", p - 1),
            det == &want,
            json!({ "determinant": ji(det), "expected": ji(&want) }),
        )]
    }));
    out
}

/// One record per predicted invariant of a catalog entry, plus the logged
/// Yau-type slack when the entry is connected.
pub fn entry_records(suite: Suite, entry: &CatalogEntry) -> Vec<Record> {
    let verification = match catalog::verify(entry) {
        Ok(v) => v,
        Err(e) => {
            let r = failure(suite, "family", entry.name.clone(), e);
            return vec![if entry.status == Status::Conjectural {
                r.conjectural()
            } else {
                r
            }];
        }
    };
    let mut out: Vec<Record> = verification
        .checks
        .iter()
        .map(|c| {
            let r = Record::new(
                suite,
                c.name,
                entry.name.clone(),
                c.pass,
                json!({ "expected": c.expected, "computed": c.computed, "provenance": entry.provenance }),
            );
            if entry.status == Status::Conjectural {
                r.conjectural()
            } else {
                r
            }
        })
        .collect();
    if let Ok(slack) = cycles::yau_slack(&entry.matrix) {
        let holds = slack.iter().all(|s| !s.is_negative());
        out.push(
            Record::new(
                suite,
                "yau-bound-logged",
                entry.name.clone(),
                true,
                json!({ "holds": holds, "slack": cycles::rational_cycle_json(&slack) }),
            )
            .conjectural(),
        );
    }
    out
}

fn weighted_sweep(cfg: &SweepConfig) -> Vec<Record> {
    let suite = Suite::Weighted;
    let max = cfg.max.unwrap_or(12);
    let max_q = 7;
    let mut cases = Vec::new();
    for q in 1..=max_q {
        let mut ps = vec![1];
        if is_prime(q) {
            ps.push(q);
        }
        for p in ps {
            for a in 1..=max {
                for b in 1..=max {
                    for c in 1..=max {
                        for d in 1..=max {
                            cases.push((q, a, b, c, d, p));
                        }
                    }
                }
            }
        }
    }
    let records: Vec<Option<Record>> = cases
        .par_iter()
        .map(|&(q, a, b, c, d, p)| weighted_record(suite, q, a, b, c, d, p))
        .collect();
    records.into_iter().flatten().collect()
}

/// `None` when the tuple is outside the admissible range.
fn weighted_record(suite: Suite, q: u64, a: u64, b: u64, c: u64, d: u64, p: u64) -> Option<Record> {
    let case = format!("({q},{a},{b},{c},{d};p={p})");
    let data = match catalog::weighted_data(q, a, b, c, d, p) {
        Ok(data) => data,
        Err(catalog::CatalogError::GcdConditionViolated(_)) => return None,
        Err(e) => return Some(failure(suite, "weighted-s0", case, e)),
    };
    let prime_q = q == p && is_prime(p);
    if !prime_q {
        return Some(Record::new(
            suite,
            "weighted-s0",
            case,
            true,
            json!({ "s0": ji(&data.s0), "node_genus": ji(&data.node_genus) }),
        ));
    }
    let entry = match catalog::weighted_homogeneous(q, a, b, c, d, p) {
        Ok(e) => e,
        Err(e) => return Some(failure(suite, "weighted-order", case, e)),
    };
    let want = entry.predicted.det_abs.clone().expect("prime q carries an order");
    let got = entry.matrix.exact_determinant().abs();
    Some(Record::new(
        suite,
        "weighted-order",
        case,
        got == want,
        json!({ "s0": ji(&data.s0), "node_genus": ji(&data.node_genus), "order": ji(&got), "expected": ji(&want) }),
    ))
}

fn tree_entries() -> Vec<CatalogEntry> {
    let mut entries = catalog::proven_entries().unwrap_or_default();
    entries.extend(catalog::conjectural_graphs().unwrap_or_default());
    entries.retain(|e| e.matrix.to_dual_graph().is_tree);
    entries
}

fn mumford_sweep(cfg: &SweepConfig) -> Vec<Record> {
    let suite = Suite::Mumford;
    let entries = tree_entries();
    let mut out = parallel(&entries, |entry| {
        (0..entry.matrix.n())
            .map(|v| mumford_record(suite, &entry.name, &entry.matrix, v))
            .collect()
    });
    let primes = cfg.primes.clone().unwrap_or_else(|| vec![2, 3, 5, 7]);
    out.extend(parallel(&primes, |&p| {
        let case = format!("d4_analogue({p})");
        let entry = match catalog::d4_analogue(p) {
            Ok(e) => e,
            Err(e) => return vec![failure(suite, "mumford-node", case, e)],
        };
        let pulled = cycles::mumford_pullback(&entry.matrix, &[0]).map(|r| r[0][0].clone());
        let deltas = cycles::correction_terms(&entry.matrix, 0);
        match (pulled, deltas) {
            (Ok(value), Ok(deltas)) => {
                let want = -BigRational::new(BigInt::one(), BigInt::from(p));
                let each = BigRational::new(BigInt::from(p - 1), BigInt::from(p));
                let pass = value == want && deltas.len() == (p + 1) as usize && deltas.iter().all(|c| c.delta == each);
                vec![Record::new(
                    suite,
                    "mumford-node",
                    case,
                    pass,
                    json!({ "self_intersection": crate::json::JsonRational::from(&value) }),
                )]
            }
            (Err(e), _) | (_, Err(e)) => vec![failure(suite, "mumford-node", case, e)],
        }
    }));
    out
}

/// `M_vv` against the pulled-back self-intersection at `v` minus the
/// correction terms of the branches at `v`.
pub fn mumford_record(suite: Suite, name: &str, m: &IntersectionMatrix, v: usize) -> Record {
    let case = format!("{name} v={v}");
    let pulled = match cycles::mumford_pullback(m, &[v]) {
        Ok(r) => r[0][0].clone(),
        Err(e) => return failure(suite, "mumford-correction", case, e),
    };
    let deltas = match cycles::correction_terms(m, v) {
        Ok(d) => d,
        Err(e) => return failure(suite, "mumford-correction", case, e),
    };
    let total = deltas.iter().fold(BigRational::zero(), |acc, c| acc + &c.delta);
    let positive = deltas.iter().all(|c| c.delta.is_positive());
    let lhs = BigRational::from_integer(m.entry(v, v).clone());
    Record::new(
        suite,
        "mumford-correction",
        case,
        positive && lhs == &pulled - &total,
        json!({ "pulled_back": crate::json::JsonRational::from(&pulled), "corrections": crate::json::JsonRational::from(&total) }),
    )
}

fn hj_sweep(cfg: &SweepConfig) -> Vec<Record> {
    let suite = Suite::Hj;
    let max = cfg.max.unwrap_or(30);
    let mut out = Vec::new();
    let fractions: Vec<(u64, u64)> = (2..=100u64)
        .flat_map(|a| (1..a).filter(move |b| b.gcd(&a) == 1).map(move |b| (a, b)))
        .collect();
    out.extend(parallel(&fractions, |&(a, b)| {
        let f = ReducedFraction::new(a, b).expect("coprime");
        let back = cf_evaluate(&cf_expand(&f));
        vec![Record::new(
            suite,
            "hj-round-trip",
            f.to_string(),
            back.as_ref() == Ok(&f),
            Value::Null,
        )]
    }));
    let depth = cfg.depth.unwrap_or(6);
    let mut chains: Vec<Vec<i64>> = vec![Vec::new()];
    let mut all = Vec::new();
    for _ in 0..depth {
        chains = chains
            .into_iter()
            .flat_map(|c| {
                (2..=6).map(move |s| {
                    let mut c = c.clone();
                    c.push(s);
                    c
                })
            })
            .collect();
        all.extend(chains.iter().cloned());
    }
    out.extend(parallel(&all, |entries| {
        let chain = ChainSpec::from_i64(entries).expect("entries >= 2");
        vec![chain_record(suite, &chain)]
    }));
    let mut triples = Vec::new();
    for t in 2..=max {
        for s in 1..t {
            if s.gcd(&t) == 1 {
                triples.push((t, s));
            }
        }
    }
    out.extend(parallel(&triples, |&(t, s)| {
        let case = format!("({t},1,{s})");
        let pass = match hj_fraction_type(HjTriple::new(t, 1, s)) {
            Ok(ty) => ty.value() == BigRational::new(BigInt::from(t - s), BigInt::from(t)),
            Err(_) => false,
        };
        vec![Record::new(suite, "hj-unit-type", case, pass, Value::Null)]
    }));
    out
}

fn chain_record(suite: Suite, chain: &ChainSpec) -> Record {
    let case = format!(
        "{:?}",
        chain.entries().iter().map(ToString::to_string).collect::<Vec<_>>()
    );
    let m = match chain_matrix(chain) {
        Ok(m) => m,
        Err(e) => return failure(suite, "hj-chain", case, e),
    };
    let Ok((r0, r)) = chain_solution(&m) else {
        return failure(suite, "hj-chain", case, "no chain solution");
    };
    let det = m.exact_determinant();
    let f = cf_evaluate(chain).expect("entries >= 2");
    let rest: Vec<usize> = (1..m.n()).collect();
    let det_rest = linalg::determinant(&linalg::principal_submatrix(m.entries(), &rest));
    let ratio = BigRational::new(det.clone(), det_rest);
    let value = BigRational::new(f.numerator().clone(), f.denominator().clone());
    let mut image = m.mul_vec(&r);
    image[0] += &r0;
    let pass = r0 == det.abs()
        && ratio == -value
        && image.iter().all(Zero::is_zero)
        && r.windows(2).all(|w| w[0] > w[1])
        && r.last().is_some_and(One::is_one);
    Record::new(suite, "hj-chain", case, pass, json!({ "r0": ji(&r0) }))
}

fn star_extend_sweep(cfg: &SweepConfig) -> Vec<Record> {
    let suite = Suite::StarExtend;
    let max_seed = cfg.max.unwrap_or(4);
    let depth = cfg.depth.unwrap_or(3);
    let tower = extension_tower(max_seed, depth);
    let mut out = parallel(&tower, |(label, result)| match result {
        Ok(entry) => {
            let mut records = entry_records(suite, entry);
            records.retain(|r| r.tag != "yau-bound-logged");
            for r in &mut records {
                r.case = format!("{label} = {}", entry.spec.as_ref().expect("star entry"));
            }
            records
        }
        Err(catalog::CatalogError::PreconditionFailed(clause)) => vec![Record::new(
            suite,
            "extension-stopped",
            label.clone(),
            true,
            json!({ "clause": clause }),
        )
        .conjectural()],
        Err(e) => vec![failure(suite, "extension", label.clone(), e)],
    });
    let mut fixed: Vec<Result<CatalogEntry, catalog::CatalogError>> = Vec::new();
    for n in 1..=max_seed {
        fixed.push(catalog::explicit8(n, 1));
        fixed.push(catalog::explicit8(n, 2));
    }
    for n in 1..=5 {
        fixed.push(catalog::sylvester_star(n));
    }
    fixed.push(catalog::star_control());
    out.extend(parallel(&fixed, |r| match r {
        Ok(entry) => {
            let mut records = entry_records(suite, entry);
            records.retain(|r| r.tag != "yau-bound-logged");
            records
        }
        Err(e) => vec![failure(suite, "extension", "fixed".to_string(), e)],
    }));
    out
}

fn catalog_sweep() -> Vec<Record> {
    let suite = Suite::Catalog;
    let mut entries = match catalog::proven_entries() {
        Ok(v) => v,
        Err(e) => return vec![failure(suite, "catalog", "proven_entries".to_string(), e)],
    };
    match catalog::conjectural_graphs() {
        Ok(v) => entries.extend(v),
        Err(e) => return vec![failure(suite, "catalog", "conjectural_graphs".to_string(), e)],
    }
    parallel(&entries, |e| entry_records(suite, e))
}

/// Shared by the CLI's `analyze --gorenstein` and the tests.
pub fn gorenstein_json(m: &IntersectionMatrix) -> Result<Value, CycleError> {
    let report = cycles::is_numerically_gorenstein(m)?;
    Ok(json!({
        "gorenstein": report.gorenstein,
        "canonical": cycles::rational_cycle_json(&report.canonical),
        "witness": report.witness.as_ref().map(cycles::WitnessJson::from),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_round_trip_through_names() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn generators_are_reproducible() {
        let a = random_star_spec(&mut trial_rng(3, 9));
        let b = random_star_spec(&mut trial_rng(3, 9));
        assert_eq!(a, b);
        let m1 = random_matrix(&mut trial_rng(3, 9), 10);
        let m2 = random_matrix(&mut trial_rng(3, 9), 10);
        assert_eq!(m1, m2);
    }

    #[test]
    fn random_matrices_are_connected_and_small() {
        for i in 0..50 {
            let m = random_matrix(&mut trial_rng(1, i), 10);
            assert!(m.n() <= 10);
            assert!(m.to_dual_graph().connected);
        }
    }

    #[test]
    fn mod2_stars_are_killed_by_two() {
        for i in 0..10 {
            let spec = random_mod2_star(&mut trial_rng(2, i));
            let m = crate::star::build_star(&spec).unwrap();
            assert!(discriminant_group(&m).is_killed_by(&BigInt::from(2)));
        }
    }

    #[test]
    fn multisets_count() {
        assert_eq!(multisets(1, 2, 3).len(), 4);
        assert_eq!(multisets(1, 4, 3).len(), 20);
    }

    #[test]
    fn terminal_generation_on_d4() {
        let spec = StarSpec::pure(2, &[2, 2, 2]).unwrap();
        let (m, layout) = build_star_with_layout(&spec).unwrap();
        let t: Vec<usize> = layout.iter().map(|c| c.terminal()).collect();
        assert!(terminals_generate(&m, &t));
        assert!(!terminals_generate(&m, &[0]));
    }

    #[test]
    fn same_seed_same_report() {
        let cfg = SweepConfig {
            trials: Some(20),
            seed: Some(11),
            ..SweepConfig::default()
        };
        let a = run(Suite::StarFormulas, &cfg);
        let b = run(Suite::StarFormulas, &cfg);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.all_passed());
    }

    #[test]
    fn extension_tower_starts_with_explicit_graphs() {
        let tower = extension_tower(1, 1);
        let got: Vec<&IntersectionMatrix> = tower.iter().map(|(_, e)| &e.as_ref().unwrap().matrix).collect();
        let want = [
            catalog::explicit8(1, 1).unwrap().matrix,
            catalog::explicit8(1, 2).unwrap().matrix,
        ];
        assert_eq!(got, want.iter().collect::<Vec<_>>());
    }
}
