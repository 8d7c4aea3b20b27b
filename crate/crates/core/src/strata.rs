//! Stratum index sets `Y_iota`, `V(A)`, `W(A, iota)`, the precedence order on
//! `D(A, iota) = V ⊔ W`, and the dimension formula for `X_mu(gamma)`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_rational::Ratio;

use crate::context::{IsocrystalContext, OPoint};
use crate::enumeration::{is_rigid_with, PieceOrder, SemiModuleClass};
use crate::error::{Error, Result};
use crate::semimodule::{HodgeType, SemiModule};

/// A parameter index `(b, j)`: the coefficient of `v(b + j)` in `v(b)`.
pub type Pair = (OPoint, i64);

/// Which of `V` or `W` a pair of `D(A, iota)` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairKind {
    V,
    W,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumIndex {
    iota: usize,
    /// `y[k - 1] = max Ā^k_iota`.
    y: Vec<OPoint>,
    v: Vec<Pair>,
    w: Vec<Pair>,
    /// For `b in Ā`: `(k - 1, position after y_k along r_A)`.
    rank: BTreeMap<OPoint, (usize, usize)>,
}

impl StratumIndex {
    pub fn iota(&self) -> usize {
        self.iota
    }

    pub fn y(&self) -> &[OPoint] {
        &self.y
    }

    pub fn v(&self) -> &[Pair] {
        &self.v
    }

    pub fn w(&self) -> &[Pair] {
        &self.w
    }

    /// `(k - 1, position)` of `b in Ā` on the `r_A`-chain from `y_k`.
    pub fn rank(&self, b: OPoint) -> Option<(usize, usize)> {
        self.rank.get(&b).copied()
    }

    pub fn in_y(&self, b: OPoint) -> bool {
        self.y.contains(&b)
    }

    pub fn kind(&self, pair: Pair) -> Option<PairKind> {
        if self.v.binary_search(&pair).is_ok() {
            Some(PairKind::V)
        } else if self.w.binary_search(&pair).is_ok() {
            Some(PairKind::W)
        } else {
            None
        }
    }

    /// `b ⪯ b'` on `Ā`: both on one `r_A`-chain starting at some `y in Y`,
    /// with `b` no later than `b'`.
    pub fn point_leq(&self, b: OPoint, b2: OPoint) -> bool {
        match (self.rank.get(&b), self.rank.get(&b2)) {
            (Some(&(k, i)), Some(&(k2, i2))) => k == k2 && i <= i2,
            _ => false,
        }
    }

    /// `(b, j) ⪯ (b', j')` iff `j < j'`, or `j = j'` and `b ⪯ b'`.
    pub fn pair_leq(&self, p: Pair, p2: Pair) -> bool {
        p.1 < p2.1 || (p.1 == p2.1 && self.point_leq(p.0, p2.0))
    }

    /// `D(A, iota)` listed in a linear extension of `⪯`.
    pub fn linear_extension(&self) -> Vec<(Pair, PairKind)> {
        let mut all: Vec<(Pair, PairKind)> = self
            .v
            .iter()
            .map(|&p| (p, PairKind::V))
            .chain(self.w.iter().map(|&p| (p, PairKind::W)))
            .collect();
        all.sort_by_key(|&((b, j), _)| {
            let (k, pos) = self.rank[&b];
            (j, pos, k)
        });
        all
    }

    /// Generating relations `r_A^{-1}(b) ⪯ b` for `b in Ā \ Y`.
    pub fn generators(&self, a: &SemiModule) -> Vec<(OPoint, OPoint)> {
        let mut out: Vec<(OPoint, OPoint)> = a
            .abar()
            .into_iter()
            .filter(|b| !self.in_y(*b))
            .map(|b| (a.r_inv(b), b))
            .collect();
        out.sort();
        out
    }
}

/// Computes `Y_iota`, `V(A)`, `W(A, iota)` and ranks every `b in Ā` along
/// its `r_A`-chain from `Y_iota`.
pub fn index_sets(a: &SemiModule, iota: usize) -> Result<StratumIndex> {
    let ctx = a.context();
    if iota >= ctx.d() {
        return Err(Error::Precondition(format!(
            "iota = {iota} outside Z_{}",
            ctx.d()
        )));
    }
    let h = ctx.h();
    let y: Vec<OPoint> = (1..=h)
        .map(|k| {
            let top = *a.piece(k, iota).last().expect("pieces are non-empty");
            OPoint::new(iota, top)
        })
        .collect();

    let v = v_pairs(a);

    let conductor = a.conductor(iota);
    let mut w = Vec::new();
    for &b in &y {
        for j in 1..(conductor - b.i).max(1) {
            if !a.contains(b.shift(j)) {
                w.push((b, j));
            }
        }
    }
    w.sort();

    let mut rank = BTreeMap::new();
    for (k, &start) in y.iter().enumerate() {
        let mut b = start;
        let mut pos = 0;
        loop {
            if rank.insert(b, (k, pos)).is_some() {
                return Err(Error::CyclicPrecedence(b));
            }
            b = a.r(b);
            if b == start {
                break;
            }
            if y.contains(&b) {
                return Err(Error::CyclicPrecedence(b));
            }
            pos += 1;
        }
    }
    if rank.len() != ctx.coset_count() {
        return Err(Error::InternalInvariant(format!(
            "r_A-chains from Y cover {} of {} points",
            rank.len(),
            ctx.coset_count()
        )));
    }
    Ok(StratumIndex {
        iota,
        y,
        v,
        w,
        rank,
    })
}

/// The precedence order of `D(A, iota)` (alias of [`index_sets`]; the
/// returned index answers `pair_leq` and lists a linear extension).
pub fn precedence_order(a: &SemiModule, iota: usize) -> Result<StratumIndex> {
    index_sets(a, iota)
}

/// `V(A)`, sorted.
pub fn v_pairs(a: &SemiModule) -> Vec<Pair> {
    let ctx = a.context();
    let n = ctx.n();
    let mut v = Vec::new();
    for tau in 0..ctx.d() {
        let pts: Vec<(OPoint, i64)> = (0..n)
            .map(|r| {
                let c = tau * n + r;
                (a.point(c), a.phi_at_coset(c))
            })
            .collect();
        for &(b, pb) in &pts {
            for &(b2, pb2) in &pts {
                if b2.i > b.i && pb > pb2 {
                    v.push((b, b2.i - b.i));
                }
            }
        }
    }
    v.sort();
    v
}

/// `dim cl(A) = |V(A)|`.
pub fn stratum_dimension(a: &SemiModule) -> usize {
    v_pairs(a).len()
}

/// Counts of `V(A)` grouped by the grades `(i, j)` of `b` and `b + j`.
pub fn v_by_grades(a: &SemiModule) -> BTreeMap<(usize, usize), usize> {
    let ctx = a.context();
    let mut out = BTreeMap::new();
    for (b, j) in v_pairs(a) {
        *out.entry((ctx.grade(b), ctx.grade(b.shift(j))))
            .or_insert(0) += 1;
    }
    out
}

/// `-(n - h)/2 + sum_tau (n - m_tau) m_tau / 2`.
pub fn adlv_dimension(ctx: &IsocrystalContext, mu: &HodgeType) -> Result<i64> {
    let m_tau = mu.m_tau();
    let sum: i64 = m_tau.iter().sum();
    if sum != ctx.m() as i64 {
        return Err(Error::KottwitzMismatch {
            sum,
            m: ctx.m() as i64,
        });
    }
    let n = ctx.n() as i64;
    let h = ctx.h() as i64;
    let mut total = Ratio::new(-(n - h), 2);
    for &mt in &m_tau {
        total += Ratio::new((n - mt) * mt, 2);
    }
    if !total.is_integer() {
        return Err(Error::InternalInvariant(format!(
            "dimension {total} is not an integer"
        )));
    }
    Ok(total.to_integer())
}

/// Rigid semi-modules with `|V(A)| = dim X_mu(gamma)`, grouped by `∼`.
pub fn top_filter(
    ctx: &Arc<IsocrystalContext>,
    mu: &HodgeType,
    list: &[SemiModule],
) -> Result<Vec<SemiModuleClass>> {
    top_filter_with(ctx, mu, list, PieceOrder::default())
}

pub fn top_filter_with(
    ctx: &Arc<IsocrystalContext>,
    mu: &HodgeType,
    list: &[SemiModule],
    order: PieceOrder,
) -> Result<Vec<SemiModuleClass>> {
    let dim = adlv_dimension(ctx, mu)?;
    let classes: BTreeSet<SemiModuleClass> = list
        .iter()
        .filter(|a| is_rigid_with(a, order) && stratum_dimension(a) as i64 == dim)
        .map(SemiModuleClass::of)
        .collect();
    Ok(classes.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::derive_context;
    use crate::enumeration::{enumerate_hodge_semimodules, omega_shift, EnumerationWindow};
    use crate::semimodule::{validate_semimodule, Coweight};
    use proptest::prelude::*;

    fn sm(ctx: &Arc<IsocrystalContext>, is: &[i64]) -> SemiModule {
        validate_semimodule(ctx, is.iter().map(|&i| OPoint::new(0, i))).unwrap()
    }

    fn p(i: i64) -> OPoint {
        OPoint::new(0, i)
    }

    #[test]
    fn index_set_examples() {
        let c = derive_context(4, 1, 2, 2).unwrap();
        let ix = index_sets(&sm(&c, &[1, 3, 4, 6]), 0).unwrap();
        assert_eq!(ix.y(), &[p(3), p(6)]);
        assert_eq!(ix.v(), &[(p(3), 1)]);
        assert!(ix.w().is_empty());

        let ix = index_sets(&sm(&c, &[1, 3, 8, 10]), 0).unwrap();
        assert_eq!(ix.y(), &[p(3), p(10)]);
        assert_eq!(ix.v(), &[(p(3), 5)]);
        assert_eq!(ix.w(), &[(p(3), 1), (p(3), 3)]);

        let c = derive_context(2, 1, 1, 2).unwrap();
        let ix = index_sets(&sm(&c, &[0, 1]), 0).unwrap();
        assert_eq!(ix.y(), &[p(1)]);
        assert!(ix.v().is_empty() && ix.w().is_empty());
    }

    #[test]
    fn precedence_examples() {
        // Z_{>=0} in (2,1,1): Y = {1}, r(1) = 0, so the only generator is 1 ⪯ 0
        let c = derive_context(2, 1, 1, 2).unwrap();
        let a = sm(&c, &[0, 1]);
        let ix = precedence_order(&a, 0).unwrap();
        assert_eq!(ix.generators(&a), vec![(p(1), p(0))]);
        assert!(ix.point_leq(p(1), p(0)));
        assert!(!ix.point_leq(p(0), p(1)));

        // {1,3,8,10}: chains 3 ⪯ 1 and 10 ⪯ 8
        let c = derive_context(4, 1, 2, 2).unwrap();
        let a = sm(&c, &[1, 3, 8, 10]);
        let ix = precedence_order(&a, 0).unwrap();
        assert_eq!(ix.generators(&a), vec![(p(3), p(1)), (p(10), p(8))]);
        assert!(!ix.point_leq(p(3), p(8)));
        let order: Vec<Pair> = ix.linear_extension().into_iter().map(|(q, _)| q).collect();
        assert_eq!(order, vec![(p(3), 1), (p(3), 3), (p(3), 5)]);

        // h = n: no generators
        let c = derive_context(2, 1, 2, 2).unwrap();
        let a = sm(&c, &[0, 1]);
        assert!(precedence_order(&a, 0).unwrap().generators(&a).is_empty());
    }

    #[test]
    fn dimension_examples() {
        let c = derive_context(4, 1, 2, 2).unwrap();
        assert_eq!(stratum_dimension(&sm(&c, &[1, 3, 4, 6])), 1);
        assert_eq!(stratum_dimension(&sm(&c, &[0, 1, 2, 3])), 0);
        let c2 = derive_context(2, 1, 1, 2).unwrap();
        assert_eq!(stratum_dimension(&sm(&c2, &[0, 1])), 0);

        let mu = Coweight::from_counts(4, &[2]).unwrap();
        assert_eq!(adlv_dimension(&c, &mu).unwrap(), 1);
        let c = derive_context(2, 2, 2, 2).unwrap();
        assert_eq!(
            adlv_dimension(&c, &Coweight::from_counts(2, &[1, 1]).unwrap()).unwrap(),
            1
        );
        assert_eq!(
            adlv_dimension(&c2, &Coweight::from_counts(2, &[1]).unwrap()).unwrap(),
            0
        );
        assert_eq!(
            adlv_dimension(&c2, &Coweight::from_counts(2, &[2]).unwrap()),
            Err(Error::KottwitzMismatch { sum: 2, m: 1 })
        );
    }

    /// Split case: `<rho, mu - nu> - (n - h)/2` with `rho = ((n-1)/2, ..., (1-n)/2)`.
    #[test]
    fn split_case_matches_rho_pairing() {
        for n in 1..=6usize {
            for m in 0..=n {
                let c = derive_context(n, 1, m, 2).unwrap();
                let mu = Coweight::from_counts(n, &[m]).unwrap();
                let nu = Ratio::new(m as i64, n as i64);
                let mut pairing = Ratio::from_integer(0);
                for (i, &x) in mu.parts()[0].iter().enumerate() {
                    let rho = Ratio::new(n as i64 - 1 - 2 * i as i64, 2);
                    pairing += rho * (Ratio::from_integer(x) - nu);
                }
                let expected = pairing - Ratio::new((n - c.h()) as i64, 2);
                assert_eq!(
                    Ratio::from_integer(adlv_dimension(&c, &mu).unwrap()),
                    expected
                );
            }
        }
    }

    #[test]
    fn top_filter_examples() {
        let cases: [(usize, usize, usize, Vec<usize>, usize); 3] = [
            (4, 1, 2, vec![2], 1),
            (2, 1, 1, vec![1], 1),
            (2, 2, 2, vec![1, 1], 2),
        ];
        for (n, d, m, counts, expected) in cases {
            let c = derive_context(n, d, m, 2).unwrap();
            let mu = Coweight::from_counts(n, &counts).unwrap();
            let list =
                enumerate_hodge_semimodules(&c, &mu, EnumerationWindow::default_for(&c)).unwrap();
            let top = top_filter(&c, &mu, &list).unwrap();
            assert_eq!(top.len(), expected, "({n},{d},{m})");
        }
        let c = derive_context(4, 1, 2, 2).unwrap();
        let mu = Coweight::from_counts(4, &[2]).unwrap();
        let list =
            enumerate_hodge_semimodules(&c, &mu, EnumerationWindow::default_for(&c)).unwrap();
        let top = top_filter(&c, &mu, &list).unwrap();
        assert_eq!(top[0].representative(), &sm(&c, &[1, 3, 4, 6]));
    }

    fn battery_lists() -> Vec<(Arc<IsocrystalContext>, HodgeType, Vec<SemiModule>)> {
        let mut out = Vec::new();
        for n in 1..=4usize {
            for d in 1..=2usize {
                for m in 0..=n * d {
                    let c = derive_context(n, d, m, 2).unwrap();
                    for m0 in 0..=n.min(m) {
                        let counts: Vec<usize> = if d == 1 { vec![m] } else { vec![m0, m - m0] };
                        if counts.iter().any(|&x| x > n) || (d == 1 && m0 > 0) {
                            continue;
                        }
                        let mu = Coweight::from_counts(n, &counts).unwrap();
                        let w = EnumerationWindow::default_for(&c);
                        let list = enumerate_hodge_semimodules(&c, &mu, w).unwrap();
                        out.push((c.clone(), mu, list));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn omega_moves_strata() {
        // a single omega_k need not preserve |V|
        let c = derive_context(4, 1, 2, 2).unwrap();
        let a = sm(&c, &[1, 3, 4, 6]);
        let b = omega_shift(&a, &[0, -2]).unwrap();
        assert_eq!(b, sm(&c, &[1, 3, 0, 2]));
        assert_eq!((stratum_dimension(&a), stratum_dimension(&b)), (1, 0));
    }

    #[test]
    fn battery_invariants() {
        for (c, mu, list) in battery_lists() {
            let dim = adlv_dimension(&c, &mu).unwrap();
            for a in &list {
                let dims: Vec<usize> = (0..c.d())
                    .map(|iota| {
                        let ix = index_sets(a, iota).unwrap();
                        let v: BTreeSet<Pair> = ix.v().iter().copied().collect();
                        assert!(ix.w().iter().all(|q| !v.contains(q)));
                        // every W pair really leaves A
                        assert!(ix.w().iter().all(|(b, j)| !a.contains(b.shift(*j))));
                        ix.v().len()
                    })
                    .collect();
                assert!(dims.windows(2).all(|w| w[0] == w[1]));
                assert!(stratum_dimension(a) as i64 <= dim);
                let grouped = v_by_grades(a);
                assert_eq!(grouped.values().sum::<usize>(), stratum_dimension(a));
                if crate::enumeration::is_ordered(a) {
                    assert!(grouped.keys().all(|&(i, j)| i <= j), "{a:?}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn dimension_is_shift_invariant(k in -4i64..5, pick in 0usize..200) {
            let c = derive_context(4, 1, 2, 2).unwrap();
            let mu = Coweight::from_counts(4, &[2]).unwrap();
            let list = enumerate_hodge_semimodules(&c, &mu, EnumerationWindow::default_for(&c)).unwrap();
            let a = &list[pick % list.len()];
            let dim = stratum_dimension(a);
            prop_assert_eq!(stratum_dimension(&a.translate(k * 2)), dim);
        }
    }
}
