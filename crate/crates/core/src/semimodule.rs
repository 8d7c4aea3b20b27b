//! Semi-modules `A ⊆ O`, stored by their coset minima `Ā = A \ (n + A)`,
//! together with the jump function `phi_A`, the permutation `r_A` and the
//! Hodge type.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::context::{IsocrystalContext, OPoint};
use crate::error::{Error, Result};

/// A coweight given per `tau in Z_d` as an integer vector of length `n`.
///
/// Used for Hodge types (dominant, entries in `{0, 1}`) and for the
/// per-factor pieces of Levi coweights.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coweight {
    parts: Vec<Vec<i64>>,
}

pub type HodgeType = Coweight;

impl Coweight {
    /// Dominant minuscule coweight: each part non-increasing with entries in `{0,1}`.
    pub fn minuscule(parts: Vec<Vec<i64>>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidCoweight("no parts".into()));
        }
        let n = parts[0].len();
        for (tau, part) in parts.iter().enumerate() {
            if part.len() != n {
                return Err(Error::InvalidCoweight(format!(
                    "part {tau} has length {}, expected {n}",
                    part.len()
                )));
            }
            if part.iter().any(|&x| x != 0 && x != 1) {
                return Err(Error::InvalidCoweight(format!(
                    "part {tau} has entries outside {{0,1}}"
                )));
            }
            if part.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::InvalidCoweight(format!(
                    "part {tau} is not dominant"
                )));
            }
        }
        Ok(Coweight { parts })
    }

    /// `(1^{m_tau}, 0^{n - m_tau})` for each `tau`.
    pub fn from_counts(n: usize, counts: &[usize]) -> Result<Self> {
        if let Some(&c) = counts.iter().find(|&&c| c > n) {
            return Err(Error::InvalidCoweight(format!("count {c} exceeds n = {n}")));
        }
        Self::minuscule(
            counts
                .iter()
                .map(|&c| (0..n).map(|i| i64::from(i < c)).collect())
                .collect(),
        )
    }

    /// Normalizes a central shift away: every part must have entries in
    /// `{c_tau, c_tau + 1}`; returns the shifted coweight and `sum_tau c_tau`.
    pub fn normalize_central(parts: Vec<Vec<i64>>) -> Result<(Self, i64)> {
        let mut total = 0;
        let mut shifted = Vec::with_capacity(parts.len());
        for part in parts {
            let c = part.iter().copied().min().unwrap_or(0);
            total += c;
            shifted.push(part.into_iter().map(|x| x - c).collect());
        }
        Ok((Self::minuscule(shifted)?, total))
    }

    pub fn parts(&self) -> &[Vec<i64>] {
        &self.parts
    }

    pub fn d(&self) -> usize {
        self.parts.len()
    }

    pub fn n(&self) -> usize {
        self.parts[0].len()
    }

    /// `m_tau = sum_i mu_tau(i)` for each `tau`.
    pub fn m_tau(&self) -> Vec<i64> {
        self.parts.iter().map(|p| p.iter().sum()).collect()
    }

    pub fn total(&self) -> i64 {
        self.m_tau().iter().sum()
    }
}

impl fmt::Display for Coweight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let render = |p: &Vec<i64>| {
            let inner: Vec<String> = p.iter().map(|x| x.to_string()).collect();
            format!("({})", inner.join(","))
        };
        if self.parts.len() == 1 {
            write!(f, "{}", render(&self.parts[0]))
        } else {
            let inner: Vec<String> = self.parts.iter().map(render).collect();
            write!(f, "({})", inner.join(","))
        }
    }
}

/// A semi-module: `A = ⋃_c { b_c + n k : k >= 0 }` for coset minima `b_c`.
#[derive(Clone)]
pub struct SemiModule {
    ctx: Arc<IsocrystalContext>,
    /// `i`-coordinate of the minimum of each coset (indexed by coset id).
    mins: Vec<i64>,
}

impl PartialEq for SemiModule {
    fn eq(&self, other: &Self) -> bool {
        self.mins == other.mins && *self.ctx == *other.ctx
    }
}

impl Eq for SemiModule {}

impl std::hash::Hash for SemiModule {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.mins.hash(state);
    }
}

impl PartialOrd for SemiModule {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SemiModule {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.mins.cmp(&other.mins)
    }
}

impl fmt::Debug for SemiModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SemiModule[{}]{{{}}}", self.ctx.key(), self)
    }
}

/// Lists the coset minima as `(tau,i)` tuples sorted by `(k, tau, i)`.
impl fmt::Display for SemiModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pts = self.abar();
        pts.sort_by_key(|p| (self.ctx.grade(*p), p.tau, p.i));
        let items: Vec<String> = pts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", items.join(" "))
    }
}

impl SemiModule {
    /// Checks that `points` hold exactly one minimum per coset and that the
    /// resulting set is `f`-stable.
    pub fn validate<I>(ctx: &Arc<IsocrystalContext>, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = OPoint>,
    {
        let mut mins: Vec<Option<i64>> = vec![None; ctx.coset_count()];
        for p in points {
            if !ctx.contains(p) {
                return Err(Error::PointOutOfRange { point: p });
            }
            let c = ctx.coset_of(p);
            if mins[c].is_some() {
                let (tau, class) = ctx.coset_parts(c);
                return Err(Error::DuplicateCoset { tau, class });
            }
            mins[c] = Some(p.i);
        }
        let mut table = Vec::with_capacity(mins.len());
        for (c, v) in mins.into_iter().enumerate() {
            match v {
                Some(i) => table.push(i),
                None => {
                    let (tau, class) = ctx.coset_parts(c);
                    return Err(Error::MissingCoset { tau, class });
                }
            }
        }
        Self::from_table(ctx, table)
    }

    /// Validates a coset-minimum table indexed by coset id.
    pub fn from_table(ctx: &Arc<IsocrystalContext>, mins: Vec<i64>) -> Result<Self> {
        if mins.len() != ctx.coset_count() {
            return Err(Error::LengthMismatch {
                expected: ctx.coset_count(),
                got: mins.len(),
            });
        }
        for (c, &i) in mins.iter().enumerate() {
            let (tau, class) = ctx.coset_parts(c);
            if i.rem_euclid(ctx.n() as i64) != class {
                return Err(Error::Precondition(format!(
                    "table entry {i} does not lie in coset (tau={tau}, class {class})"
                )));
            }
        }
        let a = SemiModule {
            ctx: Arc::clone(ctx),
            mins,
        };
        for c in 0..a.mins.len() {
            let b = a.point(c);
            let image = ctx.f(b);
            let target = a.point(ctx.coset_of(image));
            if image.i < target.i {
                return Err(Error::FStabilityViolation {
                    point: b,
                    image,
                    target,
                });
            }
        }
        Ok(a)
    }

    pub(crate) fn from_table_unchecked(ctx: &Arc<IsocrystalContext>, mins: Vec<i64>) -> Self {
        SemiModule {
            ctx: Arc::clone(ctx),
            mins,
        }
    }

    pub fn context(&self) -> &Arc<IsocrystalContext> {
        &self.ctx
    }

    pub fn table(&self) -> &[i64] {
        &self.mins
    }

    /// The minimum of coset `c`.
    pub fn point(&self, c: usize) -> OPoint {
        let (tau, _) = self.ctx.coset_parts(c);
        OPoint::new(tau, self.mins[c])
    }

    /// `Ā`, ordered by coset id.
    pub fn abar(&self) -> Vec<OPoint> {
        (0..self.mins.len()).map(|c| self.point(c)).collect()
    }

    pub fn contains(&self, p: OPoint) -> bool {
        self.ctx.contains(p) && p.i >= self.mins[self.ctx.coset_of(p)]
    }

    pub fn in_abar(&self, p: OPoint) -> bool {
        self.ctx.contains(p) && p.i == self.mins[self.ctx.coset_of(p)]
    }

    /// `phi_A(b)` for the coset minimum of coset `c`.
    pub fn phi_at_coset(&self, c: usize) -> i64 {
        let image = self.ctx.f(self.point(c));
        let target = self.mins[self.ctx.coset_of(image)];
        (image.i - target) / self.ctx.n() as i64
    }

    /// `phi_A(a)` for any `a in A`; `None` outside `A`.
    pub fn phi(&self, a: OPoint) -> Option<i64> {
        if !self.contains(a) {
            return None;
        }
        let image = self.ctx.f(a);
        let target = self.mins[self.ctx.coset_of(image)];
        Some((image.i - target) / self.ctx.n() as i64)
    }

    /// Table of `phi_A` on `Ā` indexed by coset id.
    pub fn phi_table(&self) -> Vec<i64> {
        (0..self.mins.len()).map(|c| self.phi_at_coset(c)).collect()
    }

    /// `r_A(b) = f(b) - n phi_A(b)`.
    pub fn r(&self, b: OPoint) -> OPoint {
        let image = self.ctx.f(b);
        self.point(self.ctx.coset_of(image))
    }

    pub fn r_inv(&self, b: OPoint) -> OPoint {
        let pre = self.ctx.f_inv(b);
        self.point(self.ctx.coset_of(pre))
    }

    /// `phi_A` and `r_A` as maps on `Ā`.
    pub fn phi_and_r(&self) -> (BTreeMap<OPoint, i64>, BTreeMap<OPoint, OPoint>) {
        let mut phi = BTreeMap::new();
        let mut r = BTreeMap::new();
        for c in 0..self.mins.len() {
            let b = self.point(c);
            phi.insert(b, self.phi_at_coset(c));
            r.insert(b, self.r(b));
        }
        (phi, r)
    }

    /// Sorted (non-increasing) multiset of `phi_A` over `Ā_{tau+1}` for each `tau`.
    pub fn hodge_type(&self) -> Result<HodgeType> {
        let d = self.ctx.d();
        let n = self.ctx.n();
        let mut parts = vec![Vec::with_capacity(n); d];
        for c in 0..self.mins.len() {
            let value = self.phi_at_coset(c);
            let b = self.point(c);
            if value != 0 && value != 1 {
                return Err(Error::NonMinusculePhi { point: b, value });
            }
            parts[(b.tau + d - 1) % d].push(value);
        }
        for p in &mut parts {
            p.sort_unstable_by(|a, b| b.cmp(a));
        }
        Coweight::minuscule(parts)
    }

    pub fn is_hodge_type(&self, mu: &HodgeType) -> bool {
        self.hodge_type().map(|t| &t == mu).unwrap_or(false)
    }

    /// `A + k`.
    pub fn translate(&self, k: i64) -> SemiModule {
        let mut mins = vec![0; self.mins.len()];
        for c in 0..self.mins.len() {
            let p = self.point(c).shift(k);
            mins[self.ctx.coset_of(p)] = p.i;
        }
        SemiModule::from_table_unchecked(&self.ctx, mins)
    }

    pub fn min_index(&self) -> i64 {
        *self.mins.iter().min().expect("non-empty table")
    }

    pub fn max_index(&self) -> i64 {
        *self.mins.iter().max().expect("non-empty table")
    }

    /// The representative of `A + hZ` whose smallest coset minimum lies in `[0, h)`.
    pub fn canonical(&self) -> SemiModule {
        let h = self.ctx.h() as i64;
        let lo = self.min_index();
        let shift = lo.rem_euclid(h) - lo;
        if shift == 0 {
            self.clone()
        } else {
            self.translate(shift)
        }
    }

    /// Sorted `i`-values of `Ā^k_tau` (`k in 1..=h`).
    pub fn piece(&self, k: usize, tau: usize) -> Vec<i64> {
        let n = self.ctx.n();
        let mut v: Vec<i64> = (0..n)
            .map(|r| self.mins[tau * n + r])
            .filter(|&i| self.ctx.grade(OPoint::new(tau, i)) == k)
            .collect();
        v.sort_unstable();
        v
    }

    /// Smallest `c` with `(tau, i) in A` for all `i >= c`.
    pub fn conductor(&self, tau: usize) -> i64 {
        let n = self.ctx.n();
        (0..n).map(|r| self.mins[tau * n + r]).max().expect("n > 0") - n as i64 + 1
    }

    /// Largest `conductor(tau) - min Ā_tau` over `tau`.
    pub fn max_gap(&self) -> i64 {
        let n = self.ctx.n();
        (0..self.ctx.d())
            .map(|tau| {
                let lo = (0..n).map(|r| self.mins[tau * n + r]).min().unwrap();
                self.conductor(tau) - lo
            })
            .max()
            .unwrap_or(0)
            .max(0)
    }
}

/// Validates a coset-minimum assignment.
pub fn validate_semimodule<I>(ctx: &Arc<IsocrystalContext>, mins: I) -> Result<SemiModule>
where
    I: IntoIterator<Item = OPoint>,
{
    SemiModule::validate(ctx, mins)
}
