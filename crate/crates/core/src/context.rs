//! The arithmetic frame: the index set `O = Z_d x Z`, the shift map `f`, and
//! the invariants `h`, `n'`, `m'`, `s` derived from `(n, d, m)`.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `(tau, i)` of `O = Z_d x Z`.
///
/// The derived `Ord` is lexicographic and only used for canonical sorting;
/// the mathematical order is [`OPoint::le`], which compares points of the same
/// `tau` only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OPoint {
    pub tau: usize,
    pub i: i64,
}

impl OPoint {
    pub const fn new(tau: usize, i: i64) -> Self {
        OPoint { tau, i }
    }

    /// The partial order of `O`: comparable only inside one `tau`.
    pub fn le(&self, other: &OPoint) -> bool {
        self.tau == other.tau && self.i <= other.i
    }

    pub fn shift(self, k: i64) -> OPoint {
        OPoint {
            tau: self.tau,
            i: self.i + k,
        }
    }
}

impl fmt::Display for OPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.tau, self.i)
    }
}

/// Arithmetic data `(n, d, m, q)` together with `h = gcd(m, n)`, `n' = n/h`,
/// `m' = m/h`, `s = n' d` and the orbit decomposition of `f` on the `n d`
/// cosets of `nZ` in `O`.
///
/// Cosets are numbered `tau * n + (i mod n)`. Orbit `k - 1` (for
/// `k = 1..=h`) collects the cosets whose residue is `k mod h`; it is stored
/// as the `f`-cycle starting at the coset of `(0, k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IsocrystalContext {
    n: usize,
    d: usize,
    m: usize,
    q: u64,
    h: usize,
    n_prime: usize,
    m_prime: usize,
    s: usize,
    orbits: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
    position: Vec<usize>,
}

/// Returns `(p, k)` with `q = p^k`, or `None` when `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        // q itself is prime
        return Some((q, 1));
    }
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

impl IsocrystalContext {
    pub fn new(n: usize, d: usize, m: usize, q: u64) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::InvalidContext("n must be positive".into()));
        }
        if d == 0 {
            return Err(Error::InvalidContext("d must be positive".into()));
        }
        if prime_power(q).is_none() {
            return Err(Error::InvalidContext(format!(
                "q = {q} is not a prime power"
            )));
        }
        let h = m.gcd(&n);
        let n_prime = n / h;
        let m_prime = m / h;
        let s = n_prime * d;

        let mut ctx = IsocrystalContext {
            n,
            d,
            m,
            q,
            h,
            n_prime,
            m_prime,
            s,
            orbits: Vec::with_capacity(h),
            orbit_of: vec![usize::MAX; n * d],
            position: vec![usize::MAX; n * d],
        };
        for k in 1..=h {
            let start = ctx.coset_of(OPoint::new(0, k as i64));
            let mut cycle = vec![start];
            let mut cur = ctx.f_coset(start);
            while cur != start {
                cycle.push(cur);
                cur = ctx.f_coset(cur);
            }
            if cycle.len() != s {
                return Err(Error::InternalInvariant(format!(
                    "f-orbit of length {} (expected {s})",
                    cycle.len()
                )));
            }
            for (pos, &c) in cycle.iter().enumerate() {
                ctx.orbit_of[c] = k - 1;
                ctx.position[c] = pos;
            }
            ctx.orbits.push(cycle);
        }
        if ctx.orbit_of.contains(&usize::MAX) {
            return Err(Error::InternalInvariant(
                "f-orbits do not cover all cosets".into(),
            ));
        }
        Ok(Arc::new(ctx))
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn h(&self) -> usize {
        self.h
    }
    pub fn n_prime(&self) -> usize {
        self.n_prime
    }
    pub fn m_prime(&self) -> usize {
        self.m_prime
    }
    pub fn s(&self) -> usize {
        self.s
    }
    pub fn coset_count(&self) -> usize {
        self.n * self.d
    }

    /// `f(tau, i) = (tau - 1, i + m)` if `tau = 1`, else `(tau - 1, i)`.
    pub fn f(&self, p: OPoint) -> OPoint {
        let tau = (p.tau + self.d - 1) % self.d;
        let i = if p.tau == 1 % self.d {
            p.i + self.m as i64
        } else {
            p.i
        };
        OPoint { tau, i }
    }

    pub fn f_inv(&self, p: OPoint) -> OPoint {
        let tau = (p.tau + 1) % self.d;
        let i = if tau == 1 % self.d {
            p.i - self.m as i64
        } else {
            p.i
        };
        OPoint { tau, i }
    }

    pub fn contains(&self, p: OPoint) -> bool {
        p.tau < self.d
    }

    pub fn coset_of(&self, p: OPoint) -> usize {
        debug_assert!(p.tau < self.d);
        p.tau * self.n + p.i.rem_euclid(self.n as i64) as usize
    }

    /// `(tau, residue mod n)` of a coset id.
    pub fn coset_parts(&self, c: usize) -> (usize, i64) {
        (c / self.n, (c % self.n) as i64)
    }

    /// The unique point of coset `c` whose `i` lies in `[lo, lo + n)`.
    pub fn coset_point_at_or_above(&self, c: usize, lo: i64) -> OPoint {
        let (tau, class) = self.coset_parts(c);
        let n = self.n as i64;
        let i = lo + (class - lo).rem_euclid(n);
        OPoint::new(tau, i)
    }

    pub fn f_coset(&self, c: usize) -> usize {
        let (tau, class) = self.coset_parts(c);
        self.coset_of(self.f(OPoint::new(tau, class)))
    }

    /// Graded label `k in 1..=h` with `i = k mod h`.
    pub fn grade(&self, p: OPoint) -> usize {
        let h = self.h as i64;
        let r = p.i.rem_euclid(h);
        if r == 0 {
            self.h
        } else {
            r as usize
        }
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    /// Index (`k - 1`) of the `f`-orbit containing coset `c`.
    pub fn orbit_of(&self, c: usize) -> usize {
        self.orbit_of[c]
    }

    /// Position of coset `c` along its stored `f`-cycle.
    pub fn position_in_orbit(&self, c: usize) -> usize {
        self.position[c]
    }

    /// Context of one Levi factor `Res GL_{n'}`: `(n', d, m', q)`.
    pub fn factor_context(&self) -> Result<Arc<IsocrystalContext>> {
        IsocrystalContext::new(self.n_prime, self.d, self.m_prime, self.q)
    }

    /// Short key used in reports, e.g. `n4-d1-m2`.
    pub fn key(&self) -> String {
        format!("n{}-d{}-m{}", self.n, self.d, self.m)
    }
}

/// Builds the context `(n, d, m, q)` and caches the orbit decomposition of `f`.
pub fn derive_context(n: usize, d: usize, m: usize, q: u64) -> Result<Arc<IsocrystalContext>> {
    IsocrystalContext::new(n, d, m, q)
}
