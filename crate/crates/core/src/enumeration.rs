//! Enumeration of semi-modules of a fixed Hodge type, the ordered / rigid
//! predicates, and the `Omega` shift action on graded pieces.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::{IsocrystalContext, OPoint};
use crate::error::{Error, Result};
use crate::semimodule::{HodgeType, SemiModule};

/// Bound `B` on the coset minima of enumerated representatives: every
/// element of `Ā` has `i in [0, B]` and the smallest one lies in `[0, h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationWindow {
    bound: i64,
}

impl EnumerationWindow {
    pub fn new(ctx: &IsocrystalContext, bound: i64) -> Result<Self> {
        let least = (ctx.n() + ctx.h()) as i64;
        if bound < least {
            return Err(Error::InvalidWindow(format!(
                "B = {bound} is below n + h = {least}"
            )));
        }
        Ok(EnumerationWindow { bound })
    }

    /// `max(2 n d, n + h)`.
    pub fn default_for(ctx: &IsocrystalContext) -> Self {
        let bound = (2 * ctx.n() * ctx.d()).max(ctx.n() + ctx.h()) as i64;
        EnumerationWindow { bound }
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn widened(&self, by: i64) -> Self {
        EnumerationWindow {
            bound: self.bound + by,
        }
    }
}

/// How to compare two graded pieces `X_tau <= X'_tau` of equal size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PieceOrder {
    /// `max X_tau <= min X'_tau`.
    #[default]
    MaxMin,
    /// `x_j <= x'_j` for the sorted elements.
    SortedElementwise,
}

impl PieceOrder {
    fn leq(self, x: &[i64], y: &[i64], shift: i64) -> bool {
        match self {
            PieceOrder::MaxMin => match (x.iter().max(), y.iter().min()) {
                (Some(a), Some(b)) => a + shift <= *b,
                _ => true,
            },
            PieceOrder::SortedElementwise => x.iter().zip(y).all(|(a, b)| a + shift <= *b),
        }
    }
}

/// `Ā^k + shift <= Ā^l` in every `tau`.
pub fn set_leq(a: &SemiModule, k: usize, l: usize, shift: i64, order: PieceOrder) -> bool {
    let d = a.context().d();
    (0..d).all(|tau| order.leq(&a.piece(k, tau), &a.piece(l, tau), shift))
}

pub fn is_ordered_with(a: &SemiModule, order: PieceOrder) -> bool {
    let h = a.context().h();
    (1..h).all(|k| set_leq(a, k, k + 1, 0, order))
}

pub fn is_rigid_with(a: &SemiModule, order: PieceOrder) -> bool {
    let ctx = a.context();
    let h = ctx.h();
    is_ordered_with(a, order) && (1..h).all(|k| !set_leq(a, k, k + 1, h as i64, order))
}

pub fn is_ordered(a: &SemiModule) -> bool {
    is_ordered_with(a, PieceOrder::default())
}

pub fn is_rigid(a: &SemiModule) -> bool {
    is_rigid_with(a, PieceOrder::default())
}

/// Returns `k` with `b = a + k h`, if any.
pub fn shift_equivalent(a: &SemiModule, b: &SemiModule) -> Result<Option<i64>> {
    if a.context() != b.context() {
        return Err(Error::ContextMismatch);
    }
    let h = a.context().h() as i64;
    let diff = b.min_index() - a.min_index();
    if diff % h != 0 {
        return Ok(None);
    }
    Ok((a.translate(diff) == *b).then_some(diff / h))
}

/// Shifts the graded piece `A^k` by `p_k h` for each `k = 1..=h`.
pub fn omega_shift(a: &SemiModule, p: &[i64]) -> Result<SemiModule> {
    let ctx = a.context();
    let h = ctx.h();
    if p.len() != h {
        return Err(Error::LengthMismatch {
            expected: h,
            got: p.len(),
        });
    }
    let mut mins = vec![0; ctx.coset_count()];
    for b in a.abar() {
        let moved = b.shift(p[ctx.grade(b) - 1] * h as i64);
        mins[ctx.coset_of(moved)] = moved.i;
    }
    SemiModule::from_table(ctx, mins)
}

/// A `∼`-class (`A ∼ A + k h`) with its canonical representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SemiModuleClass {
    representative: SemiModule,
}

impl SemiModuleClass {
    pub fn of(a: &SemiModule) -> Self {
        SemiModuleClass {
            representative: a.canonical(),
        }
    }

    pub fn representative(&self) -> &SemiModule {
        &self.representative
    }

    pub fn contains(&self, a: &SemiModule) -> bool {
        a.canonical() == self.representative
    }
}

fn check_hodge_shape(ctx: &IsocrystalContext, mu: &HodgeType) -> Result<()> {
    if mu.d() != ctx.d() || mu.n() != ctx.n() {
        return Err(Error::InvalidCoweight(format!(
            "Hodge type {mu} does not fit n = {}, d = {}",
            ctx.n(),
            ctx.d()
        )));
    }
    Ok(())
}

/// Number of ones a pattern places in each `mu_tau`: position `j` of orbit
/// `o` sits on coset `orbits[o][j]`, which lies in `Ā_{tau+1}`.
fn pattern_profile(ctx: &IsocrystalContext, orbit: &[usize], pattern: &[u8]) -> Vec<i64> {
    let d = ctx.d();
    let mut profile = vec![0; d];
    for (&c, &bit) in orbit.iter().zip(pattern) {
        let (tau, _) = ctx.coset_parts(c);
        profile[(tau + d - 1) % d] += i64::from(bit);
    }
    profile
}

fn binary_patterns(len: usize, ones: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(len: usize, ones: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        let left = len - cur.len();
        let used = cur.iter().filter(|&&b| b == 1).count();
        if used > ones || used + left < ones {
            return;
        }
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for bit in [0u8, 1] {
            cur.push(bit);
            rec(len, ones, cur, out);
            cur.pop();
        }
    }
    rec(len, ones, &mut cur, &mut out);
    out
}

/// All combinations (one pattern per orbit) whose per-`tau` totals equal `m_tau`.
fn feasible_combos(ctx: &IsocrystalContext, mu: &HodgeType) -> Result<Vec<Vec<Vec<u8>>>> {
    check_hodge_shape(ctx, mu)?;
    let target = mu.m_tau();
    let total: i64 = target.iter().sum();
    if total != ctx.m() as i64 {
        return Err(Error::InfeasibleHodgeType(format!(
            "sum of m_tau is {total} but m = {}",
            ctx.m()
        )));
    }
    let base = binary_patterns(ctx.s(), ctx.m_prime());
    let per_orbit: Vec<Vec<(Vec<u8>, Vec<i64>)>> = ctx
        .orbits()
        .iter()
        .map(|orbit| {
            base.iter()
                .map(|p| (p.clone(), pattern_profile(ctx, orbit, p)))
                .collect()
        })
        .collect();

    let mut combos = Vec::new();
    let mut chosen: Vec<Vec<u8>> = Vec::new();
    fn rec(
        per_orbit: &[Vec<(Vec<u8>, Vec<i64>)>],
        remaining: &mut Vec<i64>,
        chosen: &mut Vec<Vec<u8>>,
        out: &mut Vec<Vec<Vec<u8>>>,
    ) {
        let depth = chosen.len();
        if depth == per_orbit.len() {
            if remaining.iter().all(|&r| r == 0) {
                out.push(chosen.clone());
            }
            return;
        }
        for (pattern, profile) in &per_orbit[depth] {
            if profile.iter().zip(remaining.iter()).any(|(p, r)| p > r) {
                continue;
            }
            for (r, p) in remaining.iter_mut().zip(profile) {
                *r -= p;
            }
            chosen.push(pattern.clone());
            rec(per_orbit, remaining, chosen, out);
            chosen.pop();
            for (r, p) in remaining.iter_mut().zip(profile) {
                *r += p;
            }
        }
    }
    let mut remaining = target;
    rec(&per_orbit, &mut remaining, &mut chosen, &mut combos);
    if combos.is_empty() {
        return Err(Error::InfeasibleHodgeType(format!(
            "no phi assignment along the f-orbits realizes {mu}"
        )));
    }
    Ok(combos)
}

/// For each `f`-orbit, the `phi`-sequences (along the stored cycle) that
/// occur in some assignment realizing `mu`.
pub fn orbit_patterns(ctx: &IsocrystalContext, mu: &HodgeType) -> Result<Vec<Vec<Vec<u8>>>> {
    let combos = feasible_combos(ctx, mu)?;
    let mut per_orbit: Vec<Vec<Vec<u8>>> = vec![Vec::new(); ctx.h()];
    for combo in combos {
        for (slot, pattern) in per_orbit.iter_mut().zip(combo) {
            slot.push(pattern);
        }
    }
    for slot in &mut per_orbit {
        slot.sort();
        slot.dedup();
    }
    Ok(per_orbit)
}

/// Offsets of the chain `b_{j+1} = f(b_j) - n phi_j` started at the orbit's
/// first coset with `i = class`.
fn chain_offsets(ctx: &IsocrystalContext, orbit: &[usize], pattern: &[u8]) -> Vec<OPoint> {
    let n = ctx.n() as i64;
    let (tau0, class0) = ctx.coset_parts(orbit[0]);
    let mut b = OPoint::new(tau0, class0);
    let mut chain = Vec::with_capacity(orbit.len());
    for &bit in pattern {
        chain.push(b);
        let img = ctx.f(b);
        b = OPoint::new(img.tau, img.i - n * i64::from(bit));
    }
    debug_assert_eq!(b, OPoint::new(tau0, class0));
    chain
}

/// All placements of one orbit's chain inside `[0, B]`.
fn placements(
    ctx: &IsocrystalContext,
    orbit: &[usize],
    pattern: &[u8],
    bound: i64,
) -> Vec<Vec<OPoint>> {
    let n = ctx.n() as i64;
    let chain = chain_offsets(ctx, orbit, pattern);
    let lo = chain.iter().map(|p| p.i).min().unwrap();
    let hi = chain.iter().map(|p| p.i).max().unwrap();
    // shifts by multiples of n keep the first point in its coset
    let first = (-lo).div_euclid(n) + i64::from((-lo).rem_euclid(n) != 0);
    let mut out = Vec::new();
    let mut k = first;
    while hi + k * n <= bound {
        out.push(chain.iter().map(|p| p.shift(k * n)).collect());
        k += 1;
    }
    out
}

fn assemble(ctx: &Arc<IsocrystalContext>, chains: &[&Vec<OPoint>]) -> Option<SemiModule> {
    let h = ctx.h() as i64;
    let lo = chains.iter().flat_map(|c| c.iter()).map(|p| p.i).min()?;
    if !(0..h).contains(&lo) {
        return None;
    }
    let mut mins = vec![0; ctx.coset_count()];
    for p in chains.iter().flat_map(|c| c.iter()) {
        mins[ctx.coset_of(*p)] = p.i;
    }
    Some(SemiModule::from_table_unchecked(ctx, mins))
}

/// Every semi-module of Hodge type `mu` whose coset minima lie in `[0, B]`
/// with smallest element in `[0, h)`, i.e. one representative per `∼`-class
/// that fits in the window. Sorted by coset-minimum table.
pub fn enumerate_hodge_semimodules(
    ctx: &Arc<IsocrystalContext>,
    mu: &HodgeType,
    window: EnumerationWindow,
) -> Result<Vec<SemiModule>> {
    let combos = feasible_combos(ctx, mu)?;
    let bound = window.bound();
    let mut out: Vec<SemiModule> = combos
        .par_iter()
        .flat_map_iter(|combo| {
            let lists: Vec<Vec<Vec<OPoint>>> = ctx
                .orbits()
                .iter()
                .zip(combo)
                .map(|(orbit, pattern)| placements(ctx, orbit, pattern, bound))
                .collect();
            let mut found = Vec::new();
            let mut idx = vec![0usize; lists.len()];
            if lists.iter().all(|l| !l.is_empty()) {
                'outer: loop {
                    let chosen: Vec<&Vec<OPoint>> =
                        lists.iter().zip(&idx).map(|(l, &i)| &l[i]).collect();
                    if let Some(a) = assemble(ctx, &chosen) {
                        found.push(a);
                    }
                    for pos in (0..idx.len()).rev() {
                        idx[pos] += 1;
                        if idx[pos] < lists[pos].len() {
                            continue 'outer;
                        }
                        idx[pos] = 0;
                    }
                    break;
                }
            }
            found.into_iter()
        })
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}
