//! Dual-group side: dominance order, the Newton point and its best integral
//! approximation, weight multiplicities of tensor products of exterior
//! powers, Pieri decompositions and Kostka numbers.

use std::collections::{BTreeMap, HashMap};

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::semimodule::HodgeType;

pub type RationalVector = Vec<Ratio<i64>>;
pub type WeightVector = Vec<i64>;

/// `v <= v'` in the coroot order: prefix sums of `v' - v` are `>= 0` and the
/// total is `0`.
pub fn dominance_leq(v: &[Ratio<i64>], w: &[Ratio<i64>]) -> Result<bool> {
    if v.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: v.len(),
            got: w.len(),
        });
    }
    let mut prefix = Ratio::from_integer(0);
    for (a, b) in v.iter().zip(w) {
        prefix += b - a;
        if prefix < Ratio::from_integer(0) {
            return Ok(false);
        }
    }
    Ok(prefix == Ratio::from_integer(0))
}

pub fn to_rational(v: &[i64]) -> RationalVector {
    v.iter().map(|&x| Ratio::from_integer(x)).collect()
}

/// `nu = (m/n, ..., m/n)` and `lambda_i = floor(i m / n) - floor((i-1) m / n)`.
pub fn newton_and_lambda(n: usize, m: usize) -> (RationalVector, WeightVector) {
    let (n, m) = (n as i64, m as i64);
    let nu = vec![Ratio::new(m, n); n as usize];
    let lambda = (1..=n).map(|i| (i * m) / n - ((i - 1) * m) / n).collect();
    (nu, lambda)
}

/// Number of tuples `(S_tau)` with `S_tau ⊆ {1..n}`, `|S_tau| = counts[tau]`
/// and `sum_tau 1_{S_tau} = lambda`.
pub fn weight_multiplicity_counts(n: usize, counts: &[usize], lambda: &[i64]) -> u64 {
    if lambda.len() != n || lambda.iter().any(|&x| x < 0) {
        return 0;
    }
    let total: i64 = lambda.iter().sum();
    if total != counts.iter().sum::<usize>() as i64 {
        return 0;
    }
    let mut memo: HashMap<(usize, Vec<i64>), u64> = HashMap::new();
    multiplicity_rec(counts, 0, lambda.to_vec(), &mut memo)
}

fn multiplicity_rec(
    counts: &[usize],
    idx: usize,
    remaining: Vec<i64>,
    memo: &mut HashMap<(usize, Vec<i64>), u64>,
) -> u64 {
    if idx == counts.len() {
        return u64::from(remaining.iter().all(|&x| x == 0));
    }
    // each remaining factor can contribute at most one to every slot
    let left = (counts.len() - idx) as i64;
    if remaining.iter().any(|&x| x > left) {
        return 0;
    }
    let key = (idx, remaining);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let (_, remaining) = key;
    let mut total = 0;
    let mut cur = remaining.clone();
    subsets(&remaining, counts[idx], 0, &mut cur, &mut |next| {
        total += multiplicity_rec(counts, idx + 1, next.to_vec(), memo);
    });
    memo.insert((idx, remaining), total);
    total
}

/// Calls `f` with `cur - 1_S` for every `S` of size `k` among slots `>= pos`
/// with positive entries.
fn subsets(base: &[i64], k: usize, pos: usize, cur: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
    if k == 0 {
        f(cur);
        return;
    }
    if base.len() - pos < k {
        return;
    }
    for i in pos..base.len() {
        if base.len() - i < k {
            break;
        }
        if cur[i] > 0 {
            cur[i] -= 1;
            subsets(base, k - 1, i + 1, cur, f);
            cur[i] += 1;
        }
    }
}

/// `dim V_mu(lambda)` for `V_mu = ⊗_tau ∧^{m_tau}`.
pub fn weight_multiplicity(mu: &HodgeType, lambda: &[i64]) -> u64 {
    let counts: Vec<usize> = mu.m_tau().iter().map(|&x| x as usize).collect();
    weight_multiplicity_counts(mu.n(), &counts, lambda)
}

/// Decomposes `∧^{k_1} ⊗ ... ⊗ ∧^{k_r}` of `GL_n` into irreducibles by
/// repeated Pieri (vertical strips). Keys are partitions with `n` parts.
pub fn tensor_decomposition(n: usize, fundamentals: &[usize]) -> Result<BTreeMap<Vec<i64>, u64>> {
    if let Some(&k) = fundamentals.iter().find(|&&k| k > n) {
        return Err(Error::InvalidCoweight(format!(
            "omega_{k} does not exist for GL_{n}"
        )));
    }
    let mut layer: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
    layer.insert(vec![0; n], 1);
    for &k in fundamentals {
        let mut next = BTreeMap::new();
        for (shape, mult) in &layer {
            let mut cur = shape.clone();
            vertical_strips(shape, k, 0, &mut cur, &mut |grown| {
                *next.entry(grown.to_vec()).or_insert(0) += mult;
            });
        }
        layer = next;
    }
    Ok(layer)
}

fn vertical_strips(
    shape: &[i64],
    k: usize,
    pos: usize,
    cur: &mut Vec<i64>,
    f: &mut dyn FnMut(&[i64]),
) {
    if k == 0 {
        if cur.windows(2).all(|w| w[0] >= w[1]) {
            f(cur);
        }
        return;
    }
    for i in pos..shape.len() {
        if shape.len() - i < k {
            break;
        }
        cur[i] += 1;
        vertical_strips(shape, k - 1, i + 1, cur, f);
        cur[i] -= 1;
    }
}

/// Kostka number `K(chi, lambda)` = `dim V_chi(lambda)`: semistandard
/// tableaux of shape `chi` and content `lambda`, counted as chains of
/// horizontal strips.
pub fn kostka(chi: &[i64], lambda: &[i64]) -> u64 {
    if lambda.iter().any(|&x| x < 0) || chi.iter().any(|&x| x < 0) {
        return 0;
    }
    if chi.iter().sum::<i64>() != lambda.iter().sum::<i64>() {
        return 0;
    }
    let mut shape: Vec<i64> = chi.iter().copied().filter(|&x| x > 0).collect();
    shape.sort_unstable_by(|a, b| b.cmp(a));
    let mut memo = HashMap::new();
    kostka_rec(&shape, lambda, lambda.len(), &mut memo)
}

fn kostka_rec(
    shape: &[i64],
    lambda: &[i64],
    i: usize,
    memo: &mut HashMap<(Vec<i64>, usize), u64>,
) -> u64 {
    let rows = shape.iter().filter(|&&x| x > 0).count();
    if i == 0 {
        return u64::from(rows == 0);
    }
    if rows > i {
        return 0;
    }
    let key = (shape.to_vec(), i);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    // remove a horizontal strip of size lambda[i-1] filled with the letter i
    let size = lambda[i - 1];
    let mut total = 0;
    let mut inner = shape.to_vec();
    horizontal_strips(shape, size, 0, &mut inner, &mut |inner| {
        total += kostka_rec(inner, lambda, i - 1, memo);
    });
    memo.insert(key, total);
    total
}

/// Calls `f` with every `inner ⊆ shape` such that `shape / inner` is a
/// horizontal strip of `size` boxes: `shape[j+1] <= inner[j] <= shape[j]`.
fn horizontal_strips(
    shape: &[i64],
    size: i64,
    row: usize,
    inner: &mut Vec<i64>,
    f: &mut dyn FnMut(&[i64]),
) {
    if row == shape.len() {
        if size == 0 {
            f(inner);
        }
        return;
    }
    let floor = shape.get(row + 1).copied().unwrap_or(0);
    let top = shape[row];
    for removed in 0..=(top - floor).min(size) {
        inner[row] = top - removed;
        horizontal_strips(shape, size - removed, row + 1, inner, f);
    }
    inner[row] = top;
}

/// Weyl dimension formula for a partition with `n` parts.
pub fn weyl_dimension(chi: &[i64]) -> u64 {
    let n = chi.len();
    let mut value = Ratio::from_integer(1i64);
    for i in 0..n {
        for j in i + 1..n {
            value *= Ratio::new(chi[i] - chi[j] + (j - i) as i64, (j - i) as i64);
        }
    }
    debug_assert!(value.is_integer());
    value.to_integer() as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicityReport {
    pub n: usize,
    pub fundamentals: Vec<usize>,
    pub lambda: Vec<i64>,
    pub lhs: u64,
    pub rhs: u64,
    /// `(chi, a^chi, dim V_chi(lambda))`.
    pub terms: Vec<(Vec<i64>, u64, u64)>,
}

/// `dim V_{mu.}(lambda) = sum_chi a^chi dim V_chi(lambda)`, with the left side
/// from subset counting and the right side from Pieri plus Kostka numbers.
pub fn multiplicity_identity_check(
    n: usize,
    fundamentals: &[usize],
    lambda: &[i64],
) -> Result<MultiplicityReport> {
    let lhs = weight_multiplicity_counts(n, fundamentals, lambda);
    let decomposition = tensor_decomposition(n, fundamentals)?;
    let terms: Vec<(Vec<i64>, u64, u64)> = decomposition
        .into_iter()
        .map(|(chi, a)| {
            let k = kostka(&chi, lambda);
            (chi, a, k)
        })
        .collect();
    let rhs = terms.iter().map(|(_, a, k)| a * k).sum();
    let report = MultiplicityReport {
        n,
        fundamentals: fundamentals.to_vec(),
        lambda: lambda.to_vec(),
        lhs,
        rhs,
        terms,
    };
    if lhs != rhs {
        return Err(Error::IdentityViolation(format!("{report:?}")));
    }
    Ok(report)
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semimodule::Coweight;
    use proptest::prelude::*;

    fn r(a: i64, b: i64) -> Ratio<i64> {
        Ratio::new(a, b)
    }

    fn brute_multiplicity(n: usize, counts: &[usize], lambda: &[i64]) -> u64 {
        let masks: Vec<Vec<u32>> = counts
            .iter()
            .map(|&c| {
                (0u32..1 << n)
                    .filter(|m| m.count_ones() as usize == c)
                    .collect()
            })
            .collect();
        let mut total = 0;
        let mut idx = vec![0usize; masks.len()];
        loop {
            let mut v = vec![0i64; n];
            for (list, &i) in masks.iter().zip(&idx) {
                for (slot, e) in v.iter_mut().enumerate() {
                    *e += i64::from((list[i] >> slot) & 1);
                }
            }
            total += u64::from(v == lambda);
            let mut pos = idx.len();
            loop {
                if pos == 0 {
                    return total;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < masks[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    /// Maximal elements of `{lambda : sum = m, lambda <= nu}` in a box.
    fn brute_maximal(n: usize, m: usize) -> Vec<Vec<i64>> {
        let (nu, _) = newton_and_lambda(n, m);
        let hi = (m as i64 + n as i64 - 1) / n as i64 + 1;
        let mut candidates = Vec::new();
        let mut cur = vec![-1i64; n];
        loop {
            if cur.iter().sum::<i64>() == m as i64
                && dominance_leq(&to_rational(&cur), &nu).unwrap()
            {
                candidates.push(cur.clone());
            }
            let mut pos = 0;
            loop {
                if pos == n {
                    let maximal: Vec<Vec<i64>> = candidates
                        .iter()
                        .filter(|x| {
                            candidates
                                .iter()
                                .all(|y| dominance_leq(&to_rational(y), &to_rational(x)).unwrap())
                        })
                        .cloned()
                        .collect();
                    return maximal;
                }
                cur[pos] += 1;
                if cur[pos] <= hi {
                    break;
                }
                cur[pos] = -1;
                pos += 1;
            }
        }
    }

    #[test]
    fn dominance_examples() {
        assert!(dominance_leq(&[r(0, 1), r(1, 1)], &[r(1, 2), r(1, 2)]).unwrap());
        assert!(!dominance_leq(&[r(1, 1), r(0, 1)], &[r(1, 2), r(1, 2)]).unwrap());
        let v = vec![r(3, 4), r(-1, 3)];
        assert!(dominance_leq(&v, &v).unwrap());
        assert!(dominance_leq(&v, &[r(1, 1)]).is_err());
    }

    #[test]
    fn lambda_examples() {
        let (nu, lambda) = newton_and_lambda(2, 1);
        assert_eq!(nu, vec![r(1, 2), r(1, 2)]);
        assert_eq!(lambda, vec![0, 1]);
        assert_eq!(newton_and_lambda(4, 2).1, vec![0, 1, 0, 1]);
        assert_eq!(newton_and_lambda(5, 0).1, vec![0; 5]);
    }

    #[test]
    fn lambda_is_unique_maximum() {
        for n in 1..=6 {
            for m in 0..=6 {
                let (nu, lambda) = newton_and_lambda(n, m);
                assert!(dominance_leq(&to_rational(&lambda), &nu).unwrap());
                assert_eq!(lambda.iter().sum::<i64>(), m as i64);
                assert_eq!(brute_maximal(n, m), vec![lambda], "n={n} m={m}");
            }
        }
    }

    #[test]
    fn multiplicity_examples() {
        let mu = Coweight::from_counts(2, &[1, 1]).unwrap();
        assert_eq!(weight_multiplicity(&mu, &[1, 1]), 2);
        let mu = Coweight::from_counts(4, &[2]).unwrap();
        assert_eq!(weight_multiplicity(&mu, &[0, 1, 0, 1]), 1);
        let mu = Coweight::from_counts(3, &[1]).unwrap();
        assert_eq!(weight_multiplicity(&mu, &[2, 0, 0]), 0);
    }

    #[test]
    fn multiplicity_matches_brute_force() {
        for n in 1..=4usize {
            for d in 1..=3usize {
                let mut counts = vec![0usize; d];
                loop {
                    let total: usize = counts.iter().sum();
                    for bits in 0..(d as i64 + 1).pow(n as u32) {
                        let lambda: Vec<i64> = (0..n)
                            .map(|i| (bits / (d as i64 + 1).pow(i as u32)) % (d as i64 + 1))
                            .collect();
                        if lambda.iter().sum::<i64>() != total as i64 {
                            continue;
                        }
                        assert_eq!(
                            weight_multiplicity_counts(n, &counts, &lambda),
                            brute_multiplicity(n, &counts, &lambda)
                        );
                    }
                    let mut pos = 0;
                    while pos < d {
                        counts[pos] += 1;
                        if counts[pos] <= n {
                            break;
                        }
                        counts[pos] = 0;
                        pos += 1;
                    }
                    if pos == d {
                        break;
                    }
                }
            }
        }
    }

    #[test]
    fn pieri_examples() {
        let t = tensor_decomposition(2, &[1, 1]).unwrap();
        assert_eq!(t, BTreeMap::from([(vec![2, 0], 1), (vec![1, 1], 1)]));
        let t = tensor_decomposition(3, &[1, 1]).unwrap();
        assert_eq!(t, BTreeMap::from([(vec![2, 0, 0], 1), (vec![1, 1, 0], 1)]));
        let t = tensor_decomposition(4, &[2]).unwrap();
        assert_eq!(t, BTreeMap::from([(vec![1, 1, 0, 0], 1)]));
        assert!(tensor_decomposition(2, &[3]).is_err());
    }

    #[test]
    fn kostka_examples() {
        assert_eq!(kostka(&[2, 1, 0], &[1, 1, 1]), 2);
        assert_eq!(kostka(&[2, 0], &[1, 1]), 1);
        assert_eq!(kostka(&[1, 1], &[2, 0]), 0);
        assert_eq!(kostka(&[3, 2, 1], &[1, 1, 1, 1, 1, 1]), 16);
    }

    #[test]
    fn identity_examples() {
        let rep = multiplicity_identity_check(2, &[1, 1], &[1, 1]).unwrap();
        assert_eq!((rep.lhs, rep.rhs), (2, 2));
        let rep = multiplicity_identity_check(3, &[1, 1], &[1, 1, 0]).unwrap();
        assert_eq!((rep.lhs, rep.rhs), (2, 2));
        let rep = multiplicity_identity_check(4, &[2], &[0, 1, 0, 1]).unwrap();
        assert_eq!(rep.lhs, 1);
    }

    #[test]
    fn dimensions_add_up() {
        for n in 1..=4usize {
            for ks in [
                vec![1usize],
                vec![1, 1],
                vec![2, 1],
                vec![1, 2, 3],
                vec![2, 2, 2],
                vec![n, 1, n],
            ] {
                if ks.iter().any(|&k| k > n) {
                    continue;
                }
                let t = tensor_decomposition(n, &ks).unwrap();
                let expected: u64 = ks.iter().map(|&k| binomial(n as u64, k as u64)).product();
                let total = ks.iter().sum::<usize>() as i64;
                let mut via_weyl = 0;
                let mut via_weights = 0;
                for (chi, a) in &t {
                    via_weyl += a * weyl_dimension(chi);
                    // brute-force weight enumeration of V_chi
                    let mut dim = 0;
                    for bits in 0..(total + 1).pow(n as u32) {
                        let w: Vec<i64> = (0..n)
                            .map(|i| (bits / (total + 1).pow(i as u32)) % (total + 1))
                            .collect();
                        dim += kostka(chi, &w);
                    }
                    assert_eq!(dim, weyl_dimension(chi), "{chi:?}");
                    via_weights += a * dim;
                }
                assert_eq!(via_weyl, expected);
                assert_eq!(via_weights, expected);
            }
        }
    }

    proptest! {
        #[test]
        fn multiplicities_sum_to_dimension(n in 1usize..6, raw in proptest::collection::vec(0usize..6, 1..4)) {
            let counts: Vec<usize> = raw.iter().map(|&c| c % (n + 1)).collect();
            let d = counts.len() as i64;
            let total = counts.iter().sum::<usize>() as i64;
            let mut sum = 0;
            for bits in 0..(d + 1).pow(n as u32) {
                let lambda: Vec<i64> = (0..n).map(|i| (bits / (d + 1).pow(i as u32)) % (d + 1)).collect();
                if lambda.iter().sum::<i64>() == total {
                    sum += weight_multiplicity_counts(n, &counts, &lambda);
                }
            }
            let expected: u64 = counts.iter().map(|&c| binomial(n as u64, c as u64)).product();
            prop_assert_eq!(sum, expected);
        }
    }
}
