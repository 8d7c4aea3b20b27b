//! Normalized bases `v(b) = sum_j alpha_{b,j} e_{b+j}` attached to a
//! coordinate vector `x` on `D(A, iota)`, the lattices `Λ(x)`, the
//! equations cutting out the stratum and their Artin-Schreier solution.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::field::{Fe, GaloisField};
use super::model::TruncatedLattice;
use super::space::{LVec, WindowSpace};
use crate::context::OPoint;
use crate::error::{Error, Result};
use crate::semimodule::SemiModule;
use crate::strata::{index_sets, Pair, PairKind, StratumIndex};

/// Coordinates on `D(A, iota)`; absent pairs read as zero.
pub type Coordinates = BTreeMap<Pair, Fe>;

/// Gap between the largest conductor and the smallest point of `Ā`.
pub fn required_precision(a: &SemiModule) -> i64 {
    let ctx = a.context();
    let top = (0..ctx.d()).map(|tau| a.conductor(tau)).max().unwrap_or(0);
    (top - a.min_index()).max(0)
}

/// `4 (n + required_precision)`.
pub fn default_precision(a: &SemiModule) -> usize {
    (4 * (a.context().n() as i64 + required_precision(a))) as usize
}

#[derive(Debug, Clone)]
pub struct NormalizedBasis {
    a: SemiModule,
    index: StratumIndex,
    precision: usize,
    /// `alpha[b][j]` for `b in Ā`, `0 <= j <= precision`.
    alpha: BTreeMap<OPoint, Vec<Fe>>,
}

impl NormalizedBasis {
    pub fn semimodule(&self) -> &SemiModule {
        &self.a
    }

    pub fn index(&self) -> &StratumIndex {
        &self.index
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn alpha(&self, b: OPoint, j: usize) -> Option<Fe> {
        self.alpha.get(&b).and_then(|v| v.get(j).copied())
    }

    /// `v(a)` for `a in A` (`v(b + kn) = t^k v(b)`), known below
    /// `a + precision + 1`.
    pub fn vector(&self, a: OPoint) -> Result<LVec> {
        if !self.a.contains(a) {
            return Err(Error::Precondition(format!("{a} is not in A")));
        }
        let ctx = self.a.context();
        let c = ctx.coset_of(a);
        let b = self.a.point(c);
        let k = (a.i - b.i) / ctx.n() as i64;
        Ok(LVec {
            tau: b.tau,
            lo: b.i,
            coeffs: self.alpha[&b].clone(),
            exact: false,
        }
        .t_shift(k, ctx.n()))
    }

    /// Common window end: `min Ā + precision + 1`.
    pub fn window(&self) -> i64 {
        self.a.min_index() + self.precision as i64 + 1
    }

    /// `Λ(x)_tau = span_O{v(b) : b in Ā_tau}`.
    pub fn lattice(&self, field: &Arc<GaloisField>) -> Result<TruncatedLattice> {
        let ctx = self.a.context();
        let hi = self.window();
        for tau in 0..ctx.d() {
            if self.a.conductor(tau) > hi {
                return Err(Error::PrecisionExhausted(format!(
                    "precision {} does not reach the conductor {} of tau = {tau}",
                    self.precision,
                    self.a.conductor(tau)
                )));
            }
        }
        let n = ctx.n();
        let mut gens: Vec<Vec<LVec>> = vec![Vec::with_capacity(n); ctx.d()];
        for b in self.a.abar() {
            gens[b.tau].push(self.vector(b)?.truncated(hi)?);
        }
        TruncatedLattice::from_generators(ctx, field, hi, &gens)
    }
}

/// Solves the recursion for `alpha_{b,j}`:
/// `alpha_{b,0} = 1` and for `j >= 1`
/// `alpha_{b,j} = [b in Y, (b,j) in W] x_{b,j} + [b not in Y] alpha_{r^{-1}(b),j}^q
///   + sum_{(b,i) in V, i <= j} x_{b,i} alpha_{b+i, j-i}`.
pub fn normalized_basis(
    a: &SemiModule,
    iota: usize,
    x: &Coordinates,
    field: &GaloisField,
    precision: usize,
) -> Result<NormalizedBasis> {
    let index = index_sets(a, iota)?;
    for (&pair, &value) in x {
        if index.kind(pair).is_none() {
            return Err(Error::Precondition(format!(
                "coordinate ({}, {}) is not in D(A, iota)",
                pair.0, pair.1
            )));
        }
        if !field.contains(value) {
            return Err(Error::Precondition(format!(
                "coordinate value {value} outside the field"
            )));
        }
    }
    let get = |p: Pair| x.get(&p).copied().unwrap_or(0);
    let mut v_of: BTreeMap<OPoint, Vec<i64>> = BTreeMap::new();
    for &(b, i) in index.v() {
        v_of.entry(b).or_default().push(i);
    }
    let mut order = a.abar();
    order.sort_by_key(|&b| {
        let (k, pos) = index.rank(b).expect("every point is ranked");
        (pos, k)
    });
    let mut alpha: BTreeMap<OPoint, Vec<Fe>> = order
        .iter()
        .map(|&b| (b, Vec::with_capacity(precision + 1)))
        .collect();
    for b in &order {
        alpha.get_mut(b).expect("initialized").push(1);
    }
    for j in 1..=precision as i64 {
        for &b in &order {
            let mut acc = if index.in_y(b) {
                if index.kind((b, j)) == Some(PairKind::W) {
                    get((b, j))
                } else {
                    0
                }
            } else {
                let prev = a.r_inv(b);
                field.frob(alpha[&prev][j as usize])
            };
            if let Some(is) = v_of.get(&b) {
                for &i in is.iter().filter(|&&i| i <= j) {
                    let xi = get((b, i));
                    if xi != 0 {
                        let other = alpha[&b.shift(i)][(j - i) as usize];
                        acc = field.add(acc, field.mul(xi, other));
                    }
                }
            }
            alpha.get_mut(&b).expect("initialized").push(acc);
        }
    }
    Ok(NormalizedBasis {
        a: a.clone(),
        index,
        precision,
        alpha,
    })
}

/// `t^{-phi(b)} gamma sigma v(b)`.
fn frobenius_image(nb: &NormalizedBasis, b: OPoint, field: &GaloisField) -> Result<LVec> {
    let ctx = nb.a.context();
    let phi = nb.a.phi(b).expect("b in A");
    Ok(nb.vector(b)?.gamma_sigma(ctx, field).t_shift(-phi, ctx.n()))
}

/// `beta_{b,j}` for `(b, j) in W(A, iota)`: for `b in Y` and
/// `b' = r^{-1}(b)`, `t^{-phi(b')} gamma sigma v(b') = v(b) + sum_j
/// beta_{b,j} v(b+j)` with `v(c) = e_c` for `c` outside `A`.
pub fn stratum_residues(
    nb: &NormalizedBasis,
    lattice: &TruncatedLattice,
    field: &GaloisField,
) -> Result<BTreeMap<Pair, Fe>> {
    let space: &WindowSpace = lattice.space(nb.index.iota());
    let mut out = BTreeMap::new();
    for &b in nb.index.y() {
        let prev = nb.a.r_inv(b);
        let w = frobenius_image(nb, prev, field)?;
        let res = space.residue(&w, field)?;
        for pos in 0..res.coeffs.len() {
            let c = res.coeffs[pos];
            let idx = res.lo + pos as i64;
            let pair = (b, idx - b.i);
            if nb.index.kind(pair) == Some(PairKind::W) {
                out.insert(pair, c);
            } else if c != 0 {
                return Err(Error::InternalInvariant(format!(
                    "residue of the image of v({prev}) has support at {idx} outside W"
                )));
            }
        }
    }
    for &pair in nb.index.w() {
        out.entry(pair).or_insert(0);
    }
    Ok(out)
}

/// Whether `Λ(x)` lies in the stratum: all `beta_{b,j}` vanish.
pub fn stratum_membership(
    a: &SemiModule,
    iota: usize,
    x: &Coordinates,
    field: &Arc<GaloisField>,
    precision: usize,
) -> Result<bool> {
    let nb = normalized_basis(a, iota, x, field, precision)?;
    let lattice = nb.lattice(field)?;
    Ok(stratum_residues(&nb, &lattice, field)?
        .values()
        .all(|&c| c == 0))
}

/// All `x` in the fibre over `v_coords` (coordinates on `V(A)`): the
/// `W`-coordinates solve `X^{q^s} - X + delta = 0` one pair at a time in
/// precedence order. Fails with `FieldTooSmall` when some equation has no
/// root in `field`.
pub fn solve_stratum_fiber(
    a: &SemiModule,
    iota: usize,
    v_coords: &Coordinates,
    field: &Arc<GaloisField>,
    precision: usize,
) -> Result<Vec<Coordinates>> {
    let ctx = a.context();
    let index = index_sets(a, iota)?;
    for &p in index.v() {
        if !v_coords.contains_key(&p) {
            return Err(Error::Precondition(format!(
                "no value for V-pair ({}, {})",
                p.0, p.1
            )));
        }
    }
    if let Some(p) = v_coords
        .keys()
        .find(|p| index.kind(**p) != Some(PairKind::V))
    {
        return Err(Error::Precondition(format!(
            "({}, {}) is not a V-pair",
            p.0, p.1
        )));
    }
    let s = ctx.s() as u32;
    if !index.w().is_empty() && !field.r().is_multiple_of(s) {
        return Err(Error::FieldTooSmall(format!(
            "F_{{q^{}}} does not contain F_{{q^{s}}}",
            field.r()
        )));
    }
    let kernel = if index.w().is_empty() {
        Vec::new()
    } else {
        field.subfield(s)?
    };
    let w_order: Vec<Pair> = index
        .linear_extension()
        .into_iter()
        .filter(|(_, k)| *k == PairKind::W)
        .map(|(p, _)| p)
        .collect();

    let residues = |x: &Coordinates| -> Result<BTreeMap<Pair, Fe>> {
        let nb = normalized_basis(a, iota, x, field, precision)?;
        let lattice = nb.lattice(field)?;
        stratum_residues(&nb, &lattice, field)
    };

    let mut out = Vec::new();
    let mut stack: Vec<(usize, Coordinates)> = vec![(0, v_coords.clone())];
    while let Some((depth, x)) = stack.pop() {
        if depth == w_order.len() {
            if residues(&x)?.values().any(|&c| c != 0) {
                return Err(Error::InternalInvariant(
                    "solved coordinates leave a nonzero residue".into(),
                ));
            }
            out.push(x);
            continue;
        }
        let pair = w_order[depth];
        let delta = residues(&x)?[&pair];
        let root =
            (0..field.order()).find(|&t| field.add(field.sub(field.frob_n(t, s), t), delta) == 0);
        let Some(root) = root else {
            return Err(Error::FieldTooSmall(format!(
                "X^(q^{s}) - X + {delta} has no root in F_{{q^{}}}",
                field.r()
            )));
        };
        for &z in kernel.iter().rev() {
            let mut next = x.clone();
            next.insert(pair, field.add(root, z));
            stack.push((depth + 1, next));
        }
    }
    out.sort();
    Ok(out)
}

/// Recovers the coordinates of `Λ` on `D(A(Λ), iota)` by successive
/// approximation, then checks that `Λ(x) = Λ`.
pub fn recover_coordinates(lattice: &TruncatedLattice, iota: usize) -> Result<Coordinates> {
    if !lattice.satisfies_point_criterion(None)? {
        return Err(Error::NotInVariety(
            "A(Λ) is not a minuscule semi-module or phi_Λ differs from phi_A".into(),
        ));
    }
    let a = lattice.a_of_lattice()?;
    let field = Arc::clone(lattice.field());
    let ctx = a.context();
    let index = index_sets(&a, iota)?;
    let precision = (lattice
        .spaces()
        .iter()
        .map(WindowSpace::hi)
        .max()
        .unwrap_or(0)
        - a.min_index()
        + ctx.n() as i64)
        .max(required_precision(&a) + 1) as usize;
    let mut x = Coordinates::new();
    for (pair, kind) in index.linear_extension() {
        let (b, j) = pair;
        let nb = normalized_basis(&a, iota, &x, &field, precision)?;
        let value = match kind {
            PairKind::W => {
                let res = lattice.space(b.tau).residue(&nb.vector(b)?, &field)?;
                field.neg(res.get(b.i + j).unwrap_or(0))
            }
            PairKind::V => {
                let image = frobenius_image(&nb, b, &field)?;
                let target = a.r(b);
                let res = lattice.space(target.tau).residue(&image, &field)?;
                field.frob_inv(field.neg(res.get(target.i + j).unwrap_or(0)))
            }
        };
        x.insert(pair, value);
    }
    let nb = normalized_basis(&a, iota, &x, &field, precision)?;
    if !nb.lattice(&field)?.same_lattice(lattice)? {
        return Err(Error::InternalInvariant(
            "Λ(x) differs from the input lattice after recovery".into(),
        ));
    }
    Ok(x)
}
