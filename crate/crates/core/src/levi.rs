//! Reduction to the Levi `M = prod_k Res GL_{n'}`: splitting a semi-module
//! into its graded pieces, the coweights `lambda_A` and `I_{mu,gamma}`, and
//! the dimension identities linking `H` and `M`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::context::{IsocrystalContext, OPoint};
use crate::enumeration::{enumerate_hodge_semimodules, is_ordered, EnumerationWindow};
use crate::error::{Error, Result};
use crate::semimodule::{Coweight, HodgeType, SemiModule};
use crate::strata::{adlv_dimension, stratum_dimension, top_filter, v_by_grades};

/// `(A^1, ..., A^h)`, each piece written in the coordinates of one factor
/// `Res GL_{n'}`: the point `(tau, k + i h)` of `O^k` becomes `(tau, i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeviSemiModule {
    components: Vec<SemiModule>,
}

impl LeviSemiModule {
    pub fn components(&self) -> &[SemiModule] {
        &self.components
    }

    /// `sum_k |V(A^k)|`.
    pub fn stratum_dimension(&self) -> usize {
        self.components.iter().map(stratum_dimension).sum()
    }

    /// `(p_1 + C^1, ..., p_h + C^h)`.
    pub fn omega_shift(&self, p: &[i64]) -> Result<LeviSemiModule> {
        if p.len() != self.components.len() {
            return Err(Error::LengthMismatch {
                expected: self.components.len(),
                got: p.len(),
            });
        }
        Ok(LeviSemiModule {
            components: self
                .components
                .iter()
                .zip(p)
                .map(|(c, &k)| c.translate(k))
                .collect(),
        })
    }

    /// Inverse of [`split_semimodule`].
    pub fn reassemble(&self, ctx: &Arc<IsocrystalContext>) -> Result<SemiModule> {
        let h = ctx.h() as i64;
        let points = self.components.iter().enumerate().flat_map(|(k, comp)| {
            comp.abar()
                .into_iter()
                .map(move |p| OPoint::new(p.tau, k as i64 + 1 + p.i * h))
        });
        SemiModule::validate(ctx, points)
    }
}

/// `(lambda^1, ..., lambda^h)`, each an `n'`-entry coweight per `tau`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LeviCoweight {
    factors: Vec<Coweight>,
}

impl LeviCoweight {
    pub fn new(factors: Vec<Coweight>) -> Self {
        LeviCoweight { factors }
    }

    pub fn factors(&self) -> &[Coweight] {
        &self.factors
    }

    /// `m^k_tau` indexed `[k - 1][tau]`.
    pub fn counts(&self) -> Vec<Vec<i64>> {
        self.factors.iter().map(Coweight::m_tau).collect()
    }
}

impl fmt::Display for LeviCoweight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// `A^k = A ∩ O^k` in factor coordinates.
pub fn split_semimodule(a: &SemiModule) -> Result<LeviSemiModule> {
    let ctx = a.context();
    let factor = ctx.factor_context()?;
    let h = ctx.h() as i64;
    let mut points: Vec<Vec<OPoint>> = vec![Vec::with_capacity(factor.coset_count()); ctx.h()];
    for b in a.abar() {
        let k = ctx.grade(b);
        points[k - 1].push(OPoint::new(b.tau, (b.i - k as i64) / h));
    }
    let components = points
        .into_iter()
        .map(|pts| SemiModule::validate(&factor, pts))
        .collect::<Result<Vec<_>>>()?;
    Ok(LeviSemiModule { components })
}

/// Hodge type of each graded piece.
pub fn lambda_a(a: &SemiModule) -> Result<LeviCoweight> {
    let split = split_semimodule(a)?;
    Ok(LeviCoweight {
        factors: split
            .components
            .iter()
            .map(SemiModule::hodge_type)
            .collect::<Result<Vec<_>>>()?,
    })
}

/// All `M`-dominant `{0,1}` coweights with `sum_k m^k_tau = m_tau` and
/// `sum_tau m^k_tau = m'`.
pub fn i_mu_gamma(ctx: &IsocrystalContext, mu: &HodgeType) -> Result<Vec<LeviCoweight>> {
    let h = ctx.h();
    let d = ctx.d();
    let np = ctx.n_prime() as i64;
    let mp = ctx.m_prime() as i64;
    let target = mu.m_tau();
    if target.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            got: target.len(),
        });
    }

    // rows k, columns tau; fill row by row
    let mut out = Vec::new();
    let mut rows: Vec<Vec<i64>> = Vec::new();
    fn rows_with_sum(d: usize, np: i64, sum: i64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut cur = vec![0; d];
        fn rec(pos: usize, left: i64, np: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
            if pos == cur.len() {
                if left == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            for v in 0..=np.min(left) {
                cur[pos] = v;
                rec(pos + 1, left - v, np, cur, out);
            }
            cur[pos] = 0;
        }
        rec(0, sum, np, &mut cur, &mut out);
        out
    }
    let candidates = rows_with_sum(d, np, mp);
    fn rec(
        h: usize,
        candidates: &[Vec<i64>],
        remaining: &mut Vec<i64>,
        rows: &mut Vec<Vec<i64>>,
        out: &mut Vec<Vec<Vec<i64>>>,
    ) {
        if rows.len() == h {
            if remaining.iter().all(|&r| r == 0) {
                out.push(rows.clone());
            }
            return;
        }
        for row in candidates {
            if row.iter().zip(remaining.iter()).any(|(a, b)| a > b) {
                continue;
            }
            for (r, a) in remaining.iter_mut().zip(row) {
                *r -= a;
            }
            rows.push(row.clone());
            rec(h, candidates, remaining, rows, out);
            rows.pop();
            for (r, a) in remaining.iter_mut().zip(row) {
                *r += a;
            }
        }
    }
    let mut matrices = Vec::new();
    let mut remaining = target;
    rec(h, &candidates, &mut remaining, &mut rows, &mut matrices);
    for matrix in matrices {
        let factors = matrix
            .iter()
            .map(|row| {
                let counts: Vec<usize> = row.iter().map(|&x| x as usize).collect();
                Coweight::from_counts(ctx.n_prime(), &counts)
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(LeviCoweight { factors });
    }
    out.sort();
    Ok(out)
}

/// `-h(n' - 1)/2 + sum_k sum_tau (n' - m^k_tau) m^k_tau / 2`.
pub fn levi_adlv_dimension(ctx: &IsocrystalContext, lambda: &LeviCoweight) -> Result<i64> {
    let np = ctx.n_prime() as i64;
    let h = ctx.h() as i64;
    let counts = lambda.counts();
    if counts.len() != ctx.h() {
        return Err(Error::LengthMismatch {
            expected: ctx.h(),
            got: counts.len(),
        });
    }
    for (k, row) in counts.iter().enumerate() {
        let sum: i64 = row.iter().sum();
        if sum != ctx.m_prime() as i64 {
            return Err(Error::Precondition(format!(
                "factor {} of {lambda} has total {sum}, expected m' = {}",
                k + 1,
                ctx.m_prime()
            )));
        }
    }
    let mut total = Ratio::new(-h * (np - 1), 2);
    for row in &counts {
        for &x in row {
            total += Ratio::new((np - x) * x, 2);
        }
    }
    if !total.is_integer() {
        return Err(Error::InternalInvariant(format!(
            "Levi dimension {total} is not an integer"
        )));
    }
    Ok(total.to_integer())
}

/// Operands of the identity `|V(A)| = dim X_mu - dim X^M_{lambda_A} + sum_k |V(A^k)|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub v: usize,
    pub adlv_dimension: i64,
    pub levi_dimension: i64,
    pub levi_stratum_dimension: usize,
    /// `(i, j, |V_{i,j}(A)|, sum_tau m^j_tau (n' - m^i_tau))` for `i < j`.
    pub cross_terms: Vec<(usize, usize, usize, i64)>,
}

/// Checks the dimension identity and the cross-term counts for an ordered `A`.
pub fn dimension_identity_check(a: &SemiModule) -> Result<IdentityReport> {
    if !is_ordered(a) {
        return Err(Error::Precondition(format!("{a} is not ordered")));
    }
    let ctx = a.context();
    let mu = a.hodge_type()?;
    let lambda = lambda_a(a)?;
    let split = split_semimodule(a)?;
    let report_base = |cross_terms| IdentityReport {
        v: stratum_dimension(a),
        adlv_dimension: adlv_dimension(ctx, &mu).unwrap_or(i64::MIN),
        levi_dimension: levi_adlv_dimension(ctx, &lambda).unwrap_or(i64::MIN),
        levi_stratum_dimension: split.stratum_dimension(),
        cross_terms,
    };

    let counts = lambda.counts();
    let np = ctx.n_prime() as i64;
    let grouped = v_by_grades(a);
    let h = ctx.h();
    let mut cross = Vec::new();
    for i in 1..=h {
        for j in i + 1..=h {
            let expected: i64 = (0..ctx.d())
                .map(|tau| counts[j - 1][tau] * (np - counts[i - 1][tau]))
                .sum();
            let got = grouped.get(&(i, j)).copied().unwrap_or(0);
            cross.push((i, j, got, expected));
        }
    }
    let report = report_base(cross);
    let lhs = report.v as i64;
    let rhs = adlv_dimension(ctx, &mu)? - levi_adlv_dimension(ctx, &lambda)?
        + report.levi_stratum_dimension as i64;
    let cross_ok = report
        .cross_terms
        .iter()
        .all(|&(_, _, got, expected)| got as i64 == expected);
    if lhs != rhs || !cross_ok {
        return Err(Error::IdentityViolation(format!(
            "A = {a}, mu = {mu}, lambda_A = {lambda}: {report:?}"
        )));
    }
    Ok(report)
}

/// `A` has top dimension iff its Levi pieces do (for ordered `A`).
pub fn levi_top_biconditional(a: &SemiModule) -> Result<bool> {
    let ctx = a.context();
    let mu = a.hodge_type()?;
    let lambda = lambda_a(a)?;
    let split = split_semimodule(a)?;
    let h_top = stratum_dimension(a) as i64 == adlv_dimension(ctx, &mu)?;
    let m_top = split.stratum_dimension() as i64 == levi_adlv_dimension(ctx, &lambda)?;
    Ok(h_top == m_top)
}

/// Number of top-dimensional classes of one superbasic factor context.
pub fn superbasic_class_count(
    factor: &Arc<IsocrystalContext>,
    lambda: &HodgeType,
    window: EnumerationWindow,
) -> Result<usize> {
    let list = enumerate_hodge_semimodules(factor, lambda, window)?;
    Ok(top_filter(factor, lambda, &list)?.len())
}

/// Window used inside each factor for an `H`-window `B`: at least the
/// factor's own default, and at least `ceil(B / h)`.
pub fn factor_window(
    ctx: &IsocrystalContext,
    factor: &IsocrystalContext,
    window: EnumerationWindow,
) -> EnumerationWindow {
    let h = ctx.h() as i64;
    let scaled = (window.bound() + h - 1) / h;
    let base = EnumerationWindow::default_for(factor);
    base.widened((scaled - base.bound()).max(0))
}

/// `|C~_lambda^top|`: top-dimensional `M`-semi-modules of type `lambda` modulo
/// the per-factor shifts of `Omega_gamma`.
pub fn levi_class_count(
    ctx: &IsocrystalContext,
    lambda: &LeviCoweight,
    window: EnumerationWindow,
) -> Result<usize> {
    let factor = ctx.factor_context()?;
    let fw = factor_window(ctx, &factor, window);
    let mut memo: BTreeMap<&Coweight, usize> = BTreeMap::new();
    let mut product = 1usize;
    for lam in lambda.factors() {
        let count = match memo.get(lam) {
            Some(&c) => c,
            None => {
                let c = superbasic_class_count(&factor, lam, fw)?;
                memo.insert(lam, c);
                c
            }
        };
        product *= count;
    }
    Ok(product)
}
