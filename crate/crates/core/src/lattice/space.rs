//! Vectors of `N_tau = F((t))^n` in the `e`-basis (`e_{a+n} = t e_a`) and
//! subspaces of the form `U + span{e_c : c >= hi}` held in reduced row
//! echelon form.

use std::collections::BTreeMap;

use super::field::{Fe, GaloisField};
use crate::context::{IsocrystalContext, OPoint};
use crate::error::{Error, Result};

/// `sum_k coeffs[k] e_{lo + k}` in `N_tau`. When `exact` is false the
/// coefficients from `lo + coeffs.len()` on are unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LVec {
    pub tau: usize,
    pub lo: i64,
    pub coeffs: Vec<Fe>,
    pub exact: bool,
}

impl LVec {
    pub fn unit(tau: usize, index: i64) -> Self {
        LVec {
            tau,
            lo: index,
            coeffs: vec![1],
            exact: true,
        }
    }

    /// First index whose coefficient is not known.
    pub fn end(&self) -> i64 {
        self.lo + self.coeffs.len() as i64
    }

    /// Coefficient of `e_i`, `None` when unknown.
    pub fn get(&self, i: i64) -> Option<Fe> {
        if i < self.lo {
            Some(0)
        } else if i < self.end() {
            Some(self.coeffs[(i - self.lo) as usize])
        } else if self.exact {
            Some(0)
        } else {
            None
        }
    }

    /// Known below `hi`.
    pub fn known_below(&self, hi: i64) -> bool {
        self.exact || self.end() >= hi
    }

    /// `eta(v)`: the point of the leading term.
    pub fn eta(&self) -> Result<OPoint> {
        match self.coeffs.iter().position(|&c| c != 0) {
            Some(k) => Ok(OPoint::new(self.tau, self.lo + k as i64)),
            None if self.exact => Err(Error::ZeroVector),
            None => Err(Error::PrecisionExhausted(format!(
                "no nonzero coefficient below index {}",
                self.end()
            ))),
        }
    }

    pub fn t_shift(&self, k: i64, n: usize) -> LVec {
        LVec {
            tau: self.tau,
            lo: self.lo + k * n as i64,
            coeffs: self.coeffs.clone(),
            exact: self.exact,
        }
    }

    /// `gamma sigma`: `c e_a -> c^q e_{f(a)}`.
    pub fn gamma_sigma(&self, ctx: &IsocrystalContext, field: &GaloisField) -> LVec {
        let image = ctx.f(OPoint::new(self.tau, self.lo));
        LVec {
            tau: image.tau,
            lo: image.i,
            coeffs: self.coeffs.iter().map(|&c| field.frob(c)).collect(),
            exact: self.exact,
        }
    }

    pub fn gamma_sigma_inv(&self, ctx: &IsocrystalContext, field: &GaloisField) -> LVec {
        let image = ctx.f_inv(OPoint::new(self.tau, self.lo));
        LVec {
            tau: image.tau,
            lo: image.i,
            coeffs: self.coeffs.iter().map(|&c| field.frob_inv(c)).collect(),
            exact: self.exact,
        }
    }

    /// Restriction to indices `< hi` (requires the vector to be known there).
    pub fn truncated(&self, hi: i64) -> Result<LVec> {
        if !self.known_below(hi) {
            return Err(Error::PrecisionExhausted(format!(
                "vector known below {} but needed below {hi}",
                self.end()
            )));
        }
        let len = (hi - self.lo).max(0) as usize;
        let mut coeffs: Vec<Fe> = self.coeffs.iter().copied().take(len).collect();
        coeffs.resize(len, 0);
        Ok(LVec {
            tau: self.tau,
            lo: self.lo,
            coeffs,
            exact: true,
        })
    }
}

/// `U + span{e_c : c >= hi}` inside `N_tau`, where `U` is spanned by the
/// rows. Row `p` starts at its pivot `e_p` (coefficient 1), covers
/// `[p, hi)` and vanishes at every other pivot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSpace {
    tau: usize,
    hi: i64,
    rows: BTreeMap<i64, Vec<Fe>>,
}

impl WindowSpace {
    /// `span{e_c : c >= hi}`.
    pub fn tail(tau: usize, hi: i64) -> Self {
        WindowSpace {
            tau,
            hi,
            rows: BTreeMap::new(),
        }
    }

    /// Span of `vectors` together with `e_{>= hi}`.
    pub fn from_vectors<I>(tau: usize, hi: i64, vectors: I, field: &GaloisField) -> Result<Self>
    where
        I: IntoIterator<Item = LVec>,
    {
        let mut space = WindowSpace::tail(tau, hi);
        for v in vectors {
            space.insert(&v, field)?;
        }
        Ok(space)
    }

    /// `span_O(generators) + e_{>= hi}`: the generators and all their
    /// `t`-multiples.
    pub fn o_span(
        tau: usize,
        hi: i64,
        generators: &[LVec],
        n: usize,
        field: &GaloisField,
    ) -> Result<Self> {
        let mut space = WindowSpace::tail(tau, hi);
        for g in generators {
            let g = g.truncated(hi)?;
            let mut k = 0;
            while g.lo + k * (n as i64) < hi {
                space.insert(&g.t_shift(k, n), field)?;
                k += 1;
            }
        }
        Ok(space)
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn rows(&self) -> &BTreeMap<i64, Vec<Fe>> {
        &self.rows
    }

    /// Lowest pivot (or `hi` when there are no rows).
    pub fn lo(&self) -> i64 {
        self.rows.keys().next().copied().unwrap_or(self.hi)
    }

    pub fn is_pivot(&self, i: i64) -> bool {
        i >= self.hi || self.rows.contains_key(&i)
    }

    /// The row with pivot `p` as a vector (`e_p` when `p >= hi`).
    pub fn row_vector(&self, p: i64) -> Option<LVec> {
        if p >= self.hi {
            return Some(LVec::unit(self.tau, p));
        }
        self.rows.get(&p).map(|r| LVec {
            tau: self.tau,
            lo: p,
            coeffs: r.clone(),
            exact: true,
        })
    }

    /// Dense coefficients of `v` on `[lo, hi)`.
    fn dense(&self, v: &LVec, lo: i64) -> Result<Vec<Fe>> {
        if v.tau != self.tau {
            return Err(Error::Precondition(format!(
                "vector in N_{} used with a subspace of N_{}",
                v.tau, self.tau
            )));
        }
        if !v.known_below(self.hi) {
            return Err(Error::PrecisionExhausted(format!(
                "vector known below {} but the window ends at {}",
                v.end(),
                self.hi
            )));
        }
        Ok((lo..self.hi.max(lo))
            .map(|i| v.get(i).unwrap_or(0))
            .collect())
    }

    fn reduce_dense(&self, buf: &mut [Fe], lo: i64, field: &GaloisField) {
        for (&p, row) in &self.rows {
            if p < lo {
                continue;
            }
            let c = buf[(p - lo) as usize];
            if c == 0 {
                continue;
            }
            let off = (p - lo) as usize;
            for (k, &x) in row.iter().enumerate() {
                if x != 0 {
                    buf[off + k] = field.sub(buf[off + k], field.mul(c, x));
                }
            }
        }
    }

    /// Residue of `v` modulo the space: supported on non-pivot indices
    /// `< hi`, zero iff `v` lies in the space.
    pub fn residue(&self, v: &LVec, field: &GaloisField) -> Result<LVec> {
        let lo = v.lo.min(self.lo());
        let mut buf = self.dense(v, lo)?;
        self.reduce_dense(&mut buf, lo, field);
        Ok(LVec {
            tau: self.tau,
            lo,
            coeffs: buf,
            exact: true,
        })
    }

    pub fn contains(&self, v: &LVec, field: &GaloisField) -> Result<bool> {
        Ok(self.residue(v, field)?.coeffs.iter().all(|&c| c == 0))
    }

    /// Adds `v` to the space. Returns the new pivot, if any.
    pub fn insert(&mut self, v: &LVec, field: &GaloisField) -> Result<Option<i64>> {
        let res = self.residue(v, field)?;
        let Some(k) = res.coeffs.iter().position(|&c| c != 0) else {
            return Ok(None);
        };
        let p = res.lo + k as i64;
        let inv = field.inv(res.coeffs[k])?;
        let row: Vec<Fe> = res.coeffs[k..].iter().map(|&c| field.mul(c, inv)).collect();
        for (&p2, other) in self.rows.iter_mut() {
            if p2 >= p {
                break;
            }
            let c = other[(p - p2) as usize];
            if c == 0 {
                continue;
            }
            let off = (p - p2) as usize;
            for (j, &x) in row.iter().enumerate() {
                if x != 0 {
                    other[off + j] = field.sub(other[off + j], field.mul(c, x));
                }
            }
        }
        self.rows.insert(p, row);
        Ok(Some(p))
    }

    /// The same space seen modulo `e_{>= new_hi}` (`new_hi <= hi`).
    pub fn truncate(&self, new_hi: i64) -> Result<Self> {
        if new_hi > self.hi {
            return Err(Error::PrecisionExhausted(format!(
                "cannot raise the window from {} to {new_hi}",
                self.hi
            )));
        }
        let rows = self
            .rows
            .iter()
            .filter(|(&p, _)| p < new_hi)
            .map(|(&p, r)| (p, r[..(new_hi - p) as usize].to_vec()))
            .collect();
        Ok(WindowSpace {
            tau: self.tau,
            hi: new_hi,
            rows,
        })
    }

    /// The same space with `e_c`, `hi <= c < new_hi`, listed as rows.
    pub fn extend(&self, new_hi: i64) -> Self {
        let mut rows: BTreeMap<i64, Vec<Fe>> = BTreeMap::new();
        for (&p, r) in &self.rows {
            let mut r = r.clone();
            r.resize((new_hi - p).max(r.len() as i64) as usize, 0);
            rows.insert(p, r);
        }
        for c in self.hi..new_hi {
            let mut r = vec![0; (new_hi - c) as usize];
            r[0] = 1;
            rows.insert(c, r);
        }
        WindowSpace {
            tau: self.tau,
            hi: new_hi.max(self.hi),
            rows,
        }
    }

    /// Whether `self ⊆ other`.
    pub fn is_subspace_of(&self, other: &WindowSpace, field: &GaloisField) -> Result<bool> {
        let ext = self.extend(other.hi);
        for p in ext.rows.keys() {
            let v = ext.row_vector(*p).expect("pivot row");
            if !other.contains(&v, field)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Equality as subspaces (the windows may differ).
    pub fn same_space(&self, other: &WindowSpace, field: &GaloisField) -> Result<bool> {
        Ok(self.is_subspace_of(other, field)? && other.is_subspace_of(self, field)?)
    }

    /// `self ∩ other` (Zassenhaus).
    pub fn intersect(&self, other: &WindowSpace, field: &GaloisField) -> Result<Self> {
        if self.tau != other.tau {
            return Err(Error::Precondition(
                "intersection across different tau".into(),
            ));
        }
        let hi = self.hi.max(other.hi);
        let a = self.extend(hi);
        let b = other.extend(hi);
        let lo = a.lo().min(b.lo());
        let width = (hi - lo) as usize;
        let to_dense = |p: i64, r: &Vec<Fe>| {
            let mut d = vec![0; width];
            for (k, &x) in r.iter().enumerate() {
                d[(p - lo) as usize + k] = x;
            }
            d
        };
        let mut mat: Vec<Vec<Fe>> = Vec::new();
        for (&p, r) in &a.rows {
            let d = to_dense(p, r);
            let mut row = d.clone();
            row.extend(d);
            mat.push(row);
        }
        for (&p, r) in &b.rows {
            let mut row = to_dense(p, r);
            row.extend(std::iter::repeat_n(0, width));
            mat.push(row);
        }
        let ech = echelon(mat, field)?;
        let mut out = WindowSpace::tail(self.tau, hi);
        for row in ech {
            if row[..width].iter().all(|&x| x == 0) {
                let v = LVec {
                    tau: self.tau,
                    lo,
                    coeffs: row[width..].to_vec(),
                    exact: true,
                };
                out.insert(&v, field)?;
            }
        }
        Ok(out)
    }

    /// `{v : v in self}` mapped by `gamma sigma` into `N_{tau - 1}`.
    pub fn gamma_sigma(&self, ctx: &IsocrystalContext, field: &GaloisField) -> Self {
        let shift = ctx.f(OPoint::new(self.tau, 0));
        WindowSpace {
            tau: shift.tau,
            hi: self.hi + shift.i,
            rows: self
                .rows
                .iter()
                .map(|(&p, r)| (p + shift.i, r.iter().map(|&c| field.frob(c)).collect()))
                .collect(),
        }
    }

    pub fn gamma_sigma_inv(&self, ctx: &IsocrystalContext, field: &GaloisField) -> Self {
        let shift = ctx.f_inv(OPoint::new(self.tau, 0));
        WindowSpace {
            tau: shift.tau,
            hi: self.hi + shift.i,
            rows: self
                .rows
                .iter()
                .map(|(&p, r)| (p + shift.i, r.iter().map(|&c| field.frob_inv(c)).collect()))
                .collect(),
        }
    }

    /// `t^k` times the space.
    pub fn t_shift(&self, k: i64, n: usize) -> Self {
        let s = k * n as i64;
        WindowSpace {
            tau: self.tau,
            hi: self.hi + s,
            rows: self.rows.iter().map(|(&p, r)| (p + s, r.clone())).collect(),
        }
    }

    /// For each class mod `n`, the least index of the space's leading-term
    /// set in that class.
    pub fn class_minima(&self, n: usize) -> Vec<i64> {
        let n = n as i64;
        (0..n)
            .map(|c| {
                let from_rows = self.rows.keys().copied().find(|p| p.rem_euclid(n) == c);
                let tail = self.hi + (c - self.hi).rem_euclid(n);
                from_rows.map_or(tail, |p| p.min(tail))
            })
            .collect()
    }

    /// F-dimension of `space / (space ∩ e_{>= cut})` for `cut >= hi`, i.e.
    /// the number of pivots below `cut`.
    pub fn pivots_below(&self, cut: i64) -> usize {
        let rows = self.rows.keys().filter(|&&p| p < cut).count();
        rows + (cut - self.hi).max(0) as usize
    }
}

/// Row echelon form (rows with leading 1, zero rows dropped).
pub(crate) fn echelon(mut mat: Vec<Vec<Fe>>, field: &GaloisField) -> Result<Vec<Vec<Fe>>> {
    let width = mat.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for col in 0..width {
        let Some(pi) = mat.iter().position(|r| r[col] != 0) else {
            continue;
        };
        let mut prow = mat.swap_remove(pi);
        let inv = field.inv(prow[col])?;
        for x in prow.iter_mut() {
            *x = field.mul(*x, inv);
        }
        for r in mat.iter_mut() {
            let c = r[col];
            if c != 0 {
                for (x, &y) in r.iter_mut().zip(&prow) {
                    if y != 0 {
                        *x = field.sub(*x, field.mul(c, y));
                    }
                }
            }
        }
        out.push(prow);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::derive_context;

    fn f2() -> GaloisField {
        GaloisField::new(2, 1).unwrap()
    }

    fn v(lo: i64, coeffs: &[Fe]) -> LVec {
        LVec {
            tau: 0,
            lo,
            coeffs: coeffs.to_vec(),
            exact: true,
        }
    }

    #[test]
    fn eta_and_errors() {
        assert_eq!(v(3, &[0, 0, 1]).eta().unwrap(), OPoint::new(0, 5));
        assert_eq!(v(3, &[0, 0]).eta(), Err(Error::ZeroVector));
        let mut t = v(3, &[0, 0]);
        t.exact = false;
        assert!(matches!(t.eta(), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn rref_membership_and_residue() {
        let f = f2();
        let s =
            WindowSpace::from_vectors(0, 6, [v(1, &[1, 1, 0, 1]), v(2, &[1, 0, 1])], &f).unwrap();
        // rows are reduced at each other's pivots
        assert_eq!(s.rows()[&1], vec![1, 0, 0, 0, 0]);
        assert_eq!(s.rows()[&2], vec![1, 0, 1, 0]);
        assert!(s.contains(&v(1, &[1, 1, 0, 1, 0, 1, 1]), &f).unwrap());
        assert!(!s.contains(&v(1, &[1, 1, 0, 1, 1]), &f).unwrap());
        let r = s.residue(&v(3, &[1]), &f).unwrap();
        assert_eq!(r.eta().unwrap(), OPoint::new(0, 3));
        assert_eq!(s.class_minima(4), vec![8, 1, 2, 7]);
    }

    #[test]
    fn intersection_matches_membership() {
        let f = GaloisField::new(3, 1).unwrap();
        let a = WindowSpace::from_vectors(0, 6, [v(0, &[1, 2]), v(2, &[1, 0, 1])], &f).unwrap();
        let b = WindowSpace::from_vectors(0, 5, [v(0, &[1, 2, 1]), v(3, &[1, 1])], &f).unwrap();
        let c = a.intersect(&b, &f).unwrap();
        assert!(c.is_subspace_of(&a, &f).unwrap());
        assert!(c.is_subspace_of(&b, &f).unwrap());
        // brute force: every vector over [0, 6) in both spaces lies in c
        for code in 0..3u32.pow(6) {
            let coeffs: Vec<Fe> = (0..6).map(|k| code / 3u32.pow(k) % 3).collect();
            let x = v(0, &coeffs);
            if a.contains(&x, &f).unwrap() && b.contains(&x, &f).unwrap() {
                assert!(c.contains(&x, &f).unwrap());
            }
        }
    }

    #[test]
    fn gamma_sigma_round_trip() {
        let ctx = derive_context(2, 2, 1, 4).unwrap();
        let f = GaloisField::new(4, 1).unwrap();
        let s = WindowSpace::from_vectors(
            1,
            5,
            [v(1, &[1, 2, 3]).clone()].map(|mut x| {
                x.tau = 1;
                x
            }),
            &f,
        )
        .unwrap();
        let g = s.gamma_sigma(&ctx, &f);
        assert_eq!(g.tau(), 0);
        assert_eq!(g.hi(), 6);
        assert_eq!(g.gamma_sigma_inv(&ctx, &f), s);
    }
}
