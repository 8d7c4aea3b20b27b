//! Case batteries and the pipelines behind the command-line driver:
//! enumeration listings, the class-count verification, dimension reports,
//! multiplicity checks and finite-field lattice checks. Every report is
//! plain serializable data; lists are sorted by case key.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::{IsocrystalContext, OPoint};
use crate::enumeration::{enumerate_hodge_semimodules, is_ordered, is_rigid, EnumerationWindow};
use crate::error::{Error, Result};
use crate::lattice::{
    default_precision, normalized_basis, recover_coordinates, solve_stratum_fiber,
    stratum_membership, Coordinates, GaloisField, TruncatedLattice,
};
use crate::levi::{
    dimension_identity_check, i_mu_gamma, lambda_a, levi_class_count, levi_top_biconditional,
};
use crate::rep::{multiplicity_identity_check, newton_and_lambda, weight_multiplicity};
use crate::semimodule::{Coweight, HodgeType, SemiModule};
use crate::strata::{adlv_dimension, index_sets, stratum_dimension, top_filter};

pub const SCHEMA: u32 = 1;

fn default_q() -> u64 {
    2
}

fn is_default<T: Default + PartialEq>(t: &T) -> bool {
    *t == T::default()
}

/// Which equalities `verify` evaluates for a case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Checks {
    pub count: bool,
    pub dimension: bool,
    pub identity: bool,
    pub bijection: bool,
    pub superbasic: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Checks {
            count: true,
            dimension: true,
            identity: true,
            bijection: true,
            superbasic: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub n: usize,
    pub d: usize,
    pub m: usize,
    #[serde(default = "default_q")]
    pub q: u64,
    pub mu: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub checks: Checks,
}

/// A validated case.
#[derive(Debug, Clone)]
pub struct ResolvedCase {
    pub spec: CaseSpec,
    pub ctx: Arc<IsocrystalContext>,
    pub mu: HodgeType,
    pub window: EnumerationWindow,
}

impl CaseSpec {
    /// `mu_tau = (1^{counts[tau]}, 0^{n - counts[tau]})`, `m = sum counts`.
    pub fn from_counts(n: usize, counts: &[usize]) -> Self {
        CaseSpec {
            n,
            d: counts.len(),
            m: counts.iter().sum(),
            q: default_q(),
            mu: counts
                .iter()
                .map(|&c| (0..n).map(|i| i64::from(i < c)).collect())
                .collect(),
            window: None,
            precision: None,
            checks: Checks::default(),
        }
    }

    /// `n4-d1-m2-mu1100`; parts separated by `.` when `d > 1`.
    pub fn key(&self) -> String {
        let parts: Vec<String> = self
            .mu
            .iter()
            .map(|p| p.iter().map(|x| x.to_string()).collect::<String>())
            .collect();
        format!("n{}-d{}-m{}-mu{}", self.n, self.d, self.m, parts.join("."))
    }

    pub fn resolve(&self) -> Result<ResolvedCase> {
        let ctx = IsocrystalContext::new(self.n, self.d, self.m, self.q)?;
        if self.mu.len() != self.d {
            return Err(Error::InvalidCoweight(format!(
                "mu has {} parts but d = {}",
                self.mu.len(),
                self.d
            )));
        }
        if let Some(p) = self.mu.iter().find(|p| p.len() != self.n) {
            return Err(Error::InvalidCoweight(format!(
                "mu part of length {} but n = {}",
                p.len(),
                self.n
            )));
        }
        let mu = Coweight::minuscule(self.mu.clone())?;
        if mu.total() != self.m as i64 {
            return Err(Error::KottwitzMismatch {
                sum: mu.total(),
                m: self.m as i64,
            });
        }
        let window = match self.window {
            Some(b) => EnumerationWindow::new(&ctx, b)?,
            None => EnumerationWindow::default_for(&ctx),
        };
        Ok(ResolvedCase {
            spec: self.clone(),
            ctx,
            mu,
            window,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Battery {
    pub schema: u32,
    pub cases: Vec<CaseSpec>,
}

impl Battery {
    pub fn new(cases: Vec<CaseSpec>) -> Self {
        Battery {
            schema: SCHEMA,
            cases,
        }
    }

    /// Parses and validates a battery document. Errors name the offending
    /// line (for syntax) or case index and field (for validation).
    pub fn parse(text: &str) -> Result<Self> {
        let battery: Battery =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if battery.schema != SCHEMA {
            return Err(Error::Format(format!(
                "field schema: unsupported version {} (expected {SCHEMA})",
                battery.schema
            )));
        }
        for (i, case) in battery.cases.iter().enumerate() {
            case.resolve()
                .map_err(|e| Error::Format(format!("case {i} ({}): {e}", case.key())))?;
        }
        Ok(battery)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("battery serializes") + "\n"
    }

    /// Every `(n, d, m, mu)` with `n <= 4`, `d <= 2`, `n d <= 8` and `mu`
    /// minuscule with `sum_tau m_tau = m`.
    pub fn default_battery() -> Self {
        let mut cases = Vec::new();
        for n in 1..=4usize {
            for d in 1..=2usize {
                if n * d > 8 {
                    continue;
                }
                let mut counts = vec![0usize; d];
                loop {
                    cases.push(CaseSpec::from_counts(n, &counts));
                    let mut i = 0;
                    while i < d && counts[i] == n {
                        counts[i] = 0;
                        i += 1;
                    }
                    if i == d {
                        break;
                    }
                    counts[i] += 1;
                }
            }
        }
        cases.sort_by_key(CaseSpec::key);
        Battery::new(cases)
    }

    /// The four anchor cases.
    pub fn anchors() -> Self {
        Battery::new(vec![
            CaseSpec::from_counts(2, &[1]),
            CaseSpec::from_counts(3, &[2]),
            CaseSpec::from_counts(4, &[2]),
            CaseSpec::from_counts(2, &[1, 1]),
        ])
    }

    /// The same cases with each window widened by `h` and each precision
    /// raised by 8.
    pub fn widened(&self) -> Result<Self> {
        let mut cases = Vec::with_capacity(self.cases.len());
        for case in &self.cases {
            let r = case.resolve()?;
            let mut c = case.clone();
            c.window = Some(r.window.bound() + r.ctx.h() as i64);
            c.precision = case.precision.map(|p| p + 8);
            cases.push(c);
        }
        Ok(Battery::new(cases))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    fn of(enabled: bool, ok: bool) -> Self {
        match (enabled, ok) {
            (false, _) => Status::Skipped,
            (true, true) => Status::Pass,
            (true, false) => Status::Fail,
        }
    }
}

/// How a case failed to run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseError {
    pub message: String,
    pub internal: bool,
}

impl From<Error> for CaseError {
    fn from(e: Error) -> Self {
        CaseError {
            internal: matches!(e, Error::InternalInvariant(_)),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeviTerm {
    pub lambda: String,
    pub classes: usize,
    /// `prod_k dim V_{lambda^k}(lambda_M)` when `n' <= 3`.
    pub multiplicity: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub key: String,
    pub window: i64,
    pub semimodules: usize,
    pub ordered: usize,
    pub rigid: usize,
    pub top_classes: usize,
    pub adlv_dimension: i64,
    pub max_v: Option<usize>,
    pub nu: Vec<String>,
    pub lambda: Vec<i64>,
    pub multiplicity: u64,
    pub levi: Vec<LeviTerm>,
    pub levi_total: usize,
    pub identity_checked: usize,
    pub identity_failures: Vec<String>,
    pub checks: BTreeMap<String, Status>,
    pub error: Option<CaseError>,
    pub pass: bool,
}

impl CaseReport {
    fn failed(spec: &CaseSpec, err: Error) -> Self {
        CaseReport {
            key: spec.key(),
            window: spec.window.unwrap_or(0),
            semimodules: 0,
            ordered: 0,
            rigid: 0,
            top_classes: 0,
            adlv_dimension: 0,
            max_v: None,
            nu: Vec::new(),
            lambda: Vec::new(),
            multiplicity: 0,
            levi: Vec::new(),
            levi_total: 0,
            identity_checked: 0,
            identity_failures: Vec::new(),
            checks: BTreeMap::new(),
            error: Some(err.into()),
            pass: false,
        }
    }

    /// The fields the count, dimension, identity and bijection checks depend on.
    pub fn criteria_summary(&self) -> (usize, Option<usize>, u64, usize, BTreeMap<String, Status>) {
        (
            self.top_classes,
            self.max_v,
            self.multiplicity,
            self.levi_total,
            self.checks.clone(),
        )
    }
}

/// Per-case outcome with the wall time kept out of the canonical report.
#[derive(Debug, Clone)]
pub struct Timed<T> {
    pub key: String,
    pub value: T,
    pub millis: f64,
}

fn timed_par<T, F>(cases: &[CaseSpec], f: F) -> Vec<Timed<T>>
where
    T: Send,
    F: Fn(&CaseSpec) -> T + Sync,
{
    let mut out: Vec<Timed<T>> = cases
        .par_iter()
        .map(|c| {
            let start = Instant::now();
            let value = f(c);
            Timed {
                key: c.key(),
                value,
                millis: start.elapsed().as_secs_f64() * 1e3,
            }
        })
        .collect();
    out.sort_by(|a, b| a.key.cmp(&b.key));
    out
}

/// `dim V^{M}_lambda(lambda_M)` as a product over the Levi factors.
fn levi_multiplicity(ctx: &IsocrystalContext, lambda: &crate::levi::LeviCoweight) -> u64 {
    let (_, lambda_m) = newton_and_lambda(ctx.n_prime(), ctx.m_prime());
    lambda
        .factors()
        .iter()
        .map(|f| weight_multiplicity(f, &lambda_m))
        .product()
}

pub fn verify_case(spec: &CaseSpec) -> CaseReport {
    verify_case_inner(spec).unwrap_or_else(|e| CaseReport::failed(spec, e))
}

fn verify_case_inner(spec: &CaseSpec) -> Result<CaseReport> {
    let case = spec.resolve()?;
    let (ctx, mu, checks) = (&case.ctx, &case.mu, spec.checks);
    let list = enumerate_hodge_semimodules(ctx, mu, case.window)?;
    let top = top_filter(ctx, mu, &list)?;
    let dim = adlv_dimension(ctx, mu)?;
    let max_v = list.iter().map(stratum_dimension).max();
    let (nu, lambda) = newton_and_lambda(ctx.n(), ctx.m());
    let multiplicity = weight_multiplicity(mu, &lambda);

    let mut levi = Vec::new();
    if checks.bijection || checks.superbasic {
        for lam in i_mu_gamma(ctx, mu)? {
            levi.push(LeviTerm {
                lambda: lam.to_string(),
                classes: levi_class_count(ctx, &lam, case.window)?,
                multiplicity: (ctx.n_prime() <= 3).then(|| levi_multiplicity(ctx, &lam)),
            });
        }
    }
    let levi_total = levi.iter().map(|t| t.classes).sum();

    let mut identity_checked = 0;
    let mut identity_failures = Vec::new();
    if checks.identity {
        for a in list.iter().filter(|a| is_ordered(a)) {
            identity_checked += 1;
            match dimension_identity_check(a) {
                Ok(_) => {}
                Err(Error::IdentityViolation(msg)) => identity_failures.push(msg),
                Err(e) => return Err(e),
            }
            if !levi_top_biconditional(a)? {
                identity_failures.push(format!("top biconditional fails for {a}"));
            }
        }
    }

    let mut status = BTreeMap::new();
    status.insert(
        "count".to_string(),
        Status::of(checks.count, top.len() as u64 == multiplicity),
    );
    status.insert(
        "dimension".to_string(),
        Status::of(checks.dimension, max_v == Some(dim as usize) && dim >= 0),
    );
    status.insert(
        "identity".to_string(),
        Status::of(checks.identity, identity_failures.is_empty()),
    );
    status.insert(
        "bijection".to_string(),
        Status::of(checks.bijection, top.len() == levi_total),
    );
    status.insert(
        "superbasic".to_string(),
        Status::of(
            checks.superbasic && ctx.n_prime() <= 3,
            levi.iter()
                .all(|t| t.multiplicity == Some(t.classes as u64)),
        ),
    );
    let pass = status.values().all(|s| *s != Status::Fail);
    Ok(CaseReport {
        key: spec.key(),
        window: case.window.bound(),
        semimodules: list.len(),
        ordered: list.iter().filter(|a| is_ordered(a)).count(),
        rigid: list.iter().filter(|a| is_rigid(a)).count(),
        top_classes: top.len(),
        adlv_dimension: dim,
        max_v,
        nu: nu.iter().map(|x| x.to_string()).collect(),
        lambda,
        multiplicity,
        levi,
        levi_total,
        identity_checked,
        identity_failures,
        checks: status,
        error: None,
        pass,
    })
}

pub fn verify_battery(battery: &Battery) -> Vec<Timed<CaseReport>> {
    timed_par(&battery.cases, verify_case)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimsReport {
    pub key: String,
    pub adlv_dimension: i64,
    pub max_v: Option<usize>,
    /// `|V(A)|` -> number of enumerated `A`.
    pub histogram: BTreeMap<usize, usize>,
    pub top_semimodules: usize,
    pub error: Option<CaseError>,
    pub pass: bool,
}

pub fn dims_case(spec: &CaseSpec) -> DimsReport {
    let run = || -> Result<DimsReport> {
        let case = spec.resolve()?;
        let list = enumerate_hodge_semimodules(&case.ctx, &case.mu, case.window)?;
        let dim = adlv_dimension(&case.ctx, &case.mu)?;
        let mut histogram = BTreeMap::new();
        for a in &list {
            *histogram.entry(stratum_dimension(a)).or_insert(0) += 1;
        }
        let max_v = histogram.keys().next_back().copied();
        Ok(DimsReport {
            key: spec.key(),
            adlv_dimension: dim,
            max_v,
            top_semimodules: histogram.get(&(dim.max(0) as usize)).copied().unwrap_or(0),
            histogram,
            error: None,
            pass: max_v == Some(dim as usize) && dim >= 0,
        })
    };
    run().unwrap_or_else(|e| DimsReport {
        key: spec.key(),
        adlv_dimension: 0,
        max_v: None,
        histogram: BTreeMap::new(),
        top_semimodules: 0,
        error: Some(e.into()),
        pass: false,
    })
}

pub fn dims_battery(battery: &Battery) -> Vec<Timed<DimsReport>> {
    timed_par(&battery.cases, dims_case)
}

/// `{1,3,4,6}` for `d = 1`, `{(0,1),(1,2),..}` otherwise; sorted by `(tau, i)`.
pub fn render_abar(a: &SemiModule) -> String {
    let mut pts = a.abar();
    pts.sort_by_key(|p| (p.tau, p.i));
    let items: Vec<String> = if a.context().d() == 1 {
        pts.iter().map(|p| p.i.to_string()).collect()
    } else {
        pts.iter().map(|p| p.to_string()).collect()
    };
    format!("{{{}}}", items.join(","))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerateRow {
    pub abar: String,
    pub table: Vec<i64>,
    pub ordered: bool,
    pub rigid: bool,
    pub top: bool,
    pub v: usize,
    /// `|W(A, iota)|` for `iota = 0..d`.
    pub w: Vec<usize>,
    pub lambda_a: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerateReport {
    pub key: String,
    pub window: i64,
    pub adlv_dimension: i64,
    pub rows: Vec<EnumerateRow>,
    pub error: Option<CaseError>,
}

pub fn enumerate_case(spec: &CaseSpec) -> EnumerateReport {
    let run = || -> Result<EnumerateReport> {
        let case = spec.resolve()?;
        let dim = adlv_dimension(&case.ctx, &case.mu)?;
        let list = enumerate_hodge_semimodules(&case.ctx, &case.mu, case.window)?;
        let rows = list
            .par_iter()
            .map(|a| -> Result<EnumerateRow> {
                let v = stratum_dimension(a);
                let ordered = is_ordered(a);
                let w = (0..case.ctx.d())
                    .map(|iota| index_sets(a, iota).map(|ix| ix.w().len()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(EnumerateRow {
                    abar: render_abar(a),
                    table: a.table().to_vec(),
                    ordered,
                    rigid: is_rigid(a),
                    top: v as i64 == dim,
                    v,
                    w,
                    lambda_a: if ordered {
                        Some(lambda_a(a)?.to_string())
                    } else {
                        None
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EnumerateReport {
            key: spec.key(),
            window: case.window.bound(),
            adlv_dimension: dim,
            rows,
            error: None,
        })
    };
    run().unwrap_or_else(|e| EnumerateReport {
        key: spec.key(),
        window: spec.window.unwrap_or(0),
        adlv_dimension: 0,
        rows: Vec::new(),
        error: Some(e.into()),
    })
}

pub fn enumerate_battery(battery: &Battery) -> Vec<Timed<EnumerateReport>> {
    timed_par(&battery.cases, enumerate_case)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultReport {
    pub key: String,
    pub n: usize,
    pub fundamentals: Vec<usize>,
    pub lambda: Vec<i64>,
    /// Subset count of `dim V_mu(lambda)`.
    pub lhs: u64,
    /// `sum_chi a^chi dim V_chi(lambda)`.
    pub rhs: u64,
    pub terms: Vec<(Vec<i64>, u64, u64)>,
    pub error: Option<CaseError>,
    pub pass: bool,
}

fn mult_report(key: String, n: usize, fundamentals: &[usize], lambda: &[i64]) -> MultReport {
    match multiplicity_identity_check(n, fundamentals, lambda) {
        Ok(r) => MultReport {
            key,
            n,
            fundamentals: r.fundamentals,
            lambda: r.lambda,
            lhs: r.lhs,
            rhs: r.rhs,
            terms: r.terms,
            error: None,
            pass: true,
        },
        Err(e) => MultReport {
            key,
            n,
            fundamentals: fundamentals.to_vec(),
            lambda: lambda.to_vec(),
            lhs: 0,
            rhs: 0,
            terms: Vec::new(),
            error: Some(e.into()),
            pass: false,
        },
    }
}

/// For a case `(n, d, m, mu)`: `dim V_mu(lambda_G)` two ways, with `mu`
/// read as the tuple of fundamental coweights `(omega_{m_tau})_tau`.
pub fn mult_case(spec: &CaseSpec) -> MultReport {
    match spec.resolve() {
        Ok(case) => {
            let (_, lambda) = newton_and_lambda(case.ctx.n(), case.ctx.m());
            let fundamentals: Vec<usize> = case.mu.m_tau().iter().map(|&x| x as usize).collect();
            mult_report(spec.key(), case.ctx.n(), &fundamentals, &lambda)
        }
        Err(e) => MultReport {
            key: spec.key(),
            n: spec.n,
            fundamentals: Vec::new(),
            lambda: Vec::new(),
            lhs: 0,
            rhs: 0,
            terms: Vec::new(),
            error: Some(e.into()),
            pass: false,
        },
    }
}

pub fn mult_battery(battery: &Battery) -> Vec<Timed<MultReport>> {
    timed_par(&battery.cases, mult_case)
}

/// Every `GL_n` (`n <= max_n`), every multiset of at most `max_factors`
/// fundamental coweights, and every weight `lambda` of the tensor product.
pub fn multiplicity_sweep(max_n: usize, max_factors: usize) -> Vec<MultReport> {
    let mut jobs: Vec<(usize, Vec<usize>, Vec<i64>)> = Vec::new();
    for n in 1..=max_n {
        let mut tuples: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..max_factors {
            let mut next = Vec::new();
            for t in &frontier {
                let lo = t.last().copied().unwrap_or(0);
                for k in lo..=n {
                    let mut t2 = t.clone();
                    t2.push(k);
                    tuples.insert(t2.clone());
                    next.push(t2);
                }
            }
            frontier = next;
        }
        for fundamentals in tuples {
            let total: usize = fundamentals.iter().sum();
            let top = fundamentals.len() as i64;
            for lambda in compositions(total as i64, n, top) {
                jobs.push((n, fundamentals.clone(), lambda));
            }
        }
    }
    let mut out: Vec<MultReport> = jobs
        .par_iter()
        .map(|(n, f, l)| {
            let key = format!("n{n}-w{:?}-l{:?}", f, l);
            mult_report(key, *n, f, l)
        })
        .collect();
    out.sort_by(|a, b| a.key.cmp(&b.key));
    out
}

/// Vectors of length `len` with entries in `0..=cap` summing to `total`.
fn compositions(total: i64, len: usize, cap: i64) -> Vec<Vec<i64>> {
    fn rec(rest: i64, len: usize, cap: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == len {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for x in 0..=cap.min(rest) {
            cur.push(x);
            rec(rest - x, len, cap, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, len, cap, &mut Vec::new(), &mut out);
    out
}

/// Which semi-modules `lattice-check` visits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selector {
    All,
    /// Position in the sorted enumeration.
    Index(usize),
    Abar(Vec<OPoint>),
}

/// The first `limit` tuples of `0..q` of length `len`, lexicographically.
pub fn sample_tuples(q: u64, len: usize, limit: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; len];
    while out.len() < limit {
        out.push(cur.clone());
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if (cur[i] as u64) < q {
                break;
            }
            cur[i] = 0;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleReport {
    /// Indices into the ascending list of `F_q ⊆ F_{q^r}`, one per `V`-pair.
    pub v_coords: Vec<usize>,
    pub fiber: usize,
    /// Distinct `inv(Λ, gamma sigma Λ)` over the fibre.
    pub inv: Vec<Vec<Vec<i64>>>,
    pub semimodule_matches: bool,
    pub criterion: bool,
    pub membership: bool,
    pub round_trip: bool,
    pub json_round_trip: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeRow {
    pub abar: String,
    pub iota: usize,
    pub v: usize,
    pub w: usize,
    pub field_degree: u32,
    pub precision: usize,
    pub expected_fiber: u64,
    pub samples: Vec<SampleReport>,
    pub error: Option<CaseError>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeCheckReport {
    pub key: String,
    pub mu: String,
    pub rows: Vec<LatticeRow>,
    pub error: Option<CaseError>,
    pub pass: bool,
}

/// A sample of `V`-coordinates with the fibre above it.
pub type SolvedSample = (Vec<usize>, Vec<Coordinates>);

/// Solves the fibres over `samples` in the smallest `F_{q^r}`,
/// `r = s p^j` with `p` the characteristic, in which every Artin-Schreier
/// step splits. An unsplit step `X^{q^s} - X + delta` splits after an
/// extension of degree `p`.
pub fn solve_fibers(
    a: &SemiModule,
    iota: usize,
    samples: &[Vec<usize>],
    precision: usize,
) -> Result<(Arc<GaloisField>, Vec<SolvedSample>)> {
    let ctx = a.context();
    let index = index_sets(a, iota)?;
    let mut r = if index.w().is_empty() {
        1
    } else {
        ctx.s() as u32
    };
    loop {
        let field = Arc::new(GaloisField::new(ctx.q(), r)?);
        let fq = field.subfield(1)?;
        let mut solved = Vec::with_capacity(samples.len());
        let mut too_small = false;
        for sample in samples {
            let v_coords: Coordinates = index
                .v()
                .iter()
                .zip(sample)
                .map(|(&p, &k)| (p, fq[k]))
                .collect();
            match solve_stratum_fiber(a, iota, &v_coords, &field, precision) {
                Ok(fib) => solved.push((sample.clone(), fib)),
                Err(Error::FieldTooSmall(_)) => {
                    too_small = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if !too_small {
            return Ok((field, solved));
        }
        r *= field.p() as u32;
    }
}

fn check_row(
    case: &ResolvedCase,
    a: &SemiModule,
    iota: usize,
    samples_limit: usize,
    permute: &(dyn Fn(&mut Vec<Vec<usize>>) + Sync),
) -> Result<LatticeRow> {
    let ctx = &case.ctx;
    let index = index_sets(a, iota)?;
    let precision = case.spec.precision.unwrap_or_else(|| default_precision(a));
    let mut samples = sample_tuples(ctx.q(), index.v().len(), samples_limit);
    permute(&mut samples);
    let (field, solved) = solve_fibers(a, iota, &samples, precision)?;
    let qs = ctx.q().pow(ctx.s() as u32);
    let expected = qs.pow(index.w().len() as u32);
    let mut reports = Vec::with_capacity(solved.len());
    for (sample, fiber) in solved {
        let mut invs = BTreeSet::new();
        let mut semimodule_matches = true;
        let mut criterion = true;
        let mut membership = true;
        let mut round_trip = true;
        let mut json_round_trip = true;
        for x in &fiber {
            let nb = normalized_basis(a, iota, x, &field, precision)?;
            let lat = nb.lattice(&field)?;
            invs.insert(lat.hodge_position()?);
            semimodule_matches &= lat.a_of_lattice().as_ref() == Ok(a);
            criterion &= lat.satisfies_point_criterion(Some(&case.mu))?;
            membership &= stratum_membership(a, iota, x, &field, precision)?;
            round_trip &= recover_coordinates(&lat, iota).as_ref() == Ok(x);
            let text = lat.to_json()?;
            let back = TruncatedLattice::from_json(ctx, &text, Some(&field))?;
            json_round_trip &= back.to_json()? == text && back.same_lattice(&lat)?;
        }
        reports.push(SampleReport {
            v_coords: sample,
            fiber: fiber.len(),
            inv: invs.into_iter().collect(),
            semimodule_matches,
            criterion,
            membership,
            round_trip,
            json_round_trip,
        });
    }
    reports.sort_by(|a, b| a.v_coords.cmp(&b.v_coords));
    let mu_parts = case.mu.parts().to_vec();
    let pass = reports.iter().all(|s| {
        s.fiber as u64 == expected
            && s.inv == vec![mu_parts.clone()]
            && s.semimodule_matches
            && s.criterion
            && s.membership
            && s.round_trip
            && s.json_round_trip
    });
    Ok(LatticeRow {
        abar: render_abar(a),
        iota,
        v: index.v().len(),
        w: index.w().len(),
        field_degree: field.r(),
        precision,
        expected_fiber: expected,
        samples: reports,
        error: None,
        pass,
    })
}

/// Solves fibres of the selected strata, checks every point (semi-module,
/// relative position, point criterion, stratum equations, coordinate
/// recovery, JSON round trip) and reports fibre sizes. `permute` may
/// reorder the samples; results are reported in canonical order.
pub fn lattice_check(
    spec: &CaseSpec,
    selector: &Selector,
    iota: Option<usize>,
    samples_limit: usize,
    permute: &(dyn Fn(&mut Vec<Vec<usize>>) + Sync),
) -> Result<LatticeCheckReport> {
    let case = spec.resolve()?;
    let list = enumerate_hodge_semimodules(&case.ctx, &case.mu, case.window)?;
    let chosen: Vec<SemiModule> = match selector {
        Selector::All => list,
        Selector::Index(i) => vec![list.get(*i).cloned().ok_or_else(|| {
            Error::Precondition(format!(
                "index {i} out of range ({} semi-modules)",
                list.len()
            ))
        })?],
        Selector::Abar(points) => {
            let a = SemiModule::validate(&case.ctx, points.iter().copied())?;
            if !a.is_hodge_type(&case.mu) {
                return Err(Error::Precondition(format!(
                    "{} does not have Hodge type {}",
                    render_abar(&a),
                    case.mu
                )));
            }
            vec![a]
        }
    };
    let iotas: Vec<usize> = match iota {
        Some(i) if i >= case.ctx.d() => {
            return Err(Error::Precondition(format!(
                "iota = {i} outside Z_{}",
                case.ctx.d()
            )))
        }
        Some(i) => vec![i],
        None => (0..case.ctx.d()).collect(),
    };
    let jobs: Vec<(&SemiModule, usize)> = chosen
        .iter()
        .flat_map(|a| iotas.iter().map(move |&i| (a, i)))
        .collect();
    let rows: Vec<LatticeRow> = jobs
        .par_iter()
        .map(|&(a, i)| {
            check_row(&case, a, i, samples_limit, permute).unwrap_or_else(|e| LatticeRow {
                abar: render_abar(a),
                iota: i,
                v: 0,
                w: 0,
                field_degree: 0,
                precision: 0,
                expected_fiber: 0,
                samples: Vec::new(),
                error: Some(e.into()),
                pass: false,
            })
        })
        .collect();
    let pass = rows.iter().all(|r| r.pass);
    Ok(LatticeCheckReport {
        key: spec.key(),
        mu: case.mu.to_string(),
        rows,
        error: None,
        pass,
    })
}
