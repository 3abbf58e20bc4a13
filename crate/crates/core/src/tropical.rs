//! Tropical curve counts for bipartite quivers: weight vectors, ramification
//! factors, the recursive tropical count over admissible decompositions,
//! and the two refinement sums expressing the Euler characteristic of
//! `K(l₁, l₂)` moduli through thin covering data.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::localization::{admissible_decompositions, chi_trees};
use crate::poly::Rational;
use crate::quiver::{DimVector, Quiver, Refinement, Stability};
use crate::symfunc::{factorial, partitions};

/// A weakly increasing sequence of positive weights.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightVector(Vec<u32>);

impl WeightVector {
    /// Sorts the entries; rejects zeros.
    pub fn new(mut w: Vec<u32>) -> Result<Self> {
        if w.contains(&0) {
            return Err(Error::InvalidArgument("weights must be positive".into()));
        }
        w.sort_unstable();
        Ok(Self(w))
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|w|`, the sum of the entries.
    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `|Aut w| = ∏ (multiplicity)!`.
    pub fn aut(&self) -> BigInt {
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        for &w in &self.0 {
            *counts.entry(w).or_default() += 1;
        }
        counts.values().map(|&c| factorial(c)).product()
    }

    /// Product of the entries.
    pub fn product(&self) -> BigInt {
        self.0.iter().map(|&w| BigInt::from(w)).product()
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The weight vector of one side of a refinement: each weight `w` repeated
/// `m_w(k)` times.
pub fn weight_vector_of(side: &[BTreeMap<u32, u32>]) -> WeightVector {
    let w = Refinement::expand(side)
        .into_iter()
        .map(|(w, _, _)| w)
        .collect();
    WeightVector::new(w).expect("refinement weights are positive")
}

/// A pair of weight vectors indexing a tropical count.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TropicalCountKey {
    pub w1: WeightVector,
    pub w2: WeightVector,
}

impl TropicalCountKey {
    pub fn new(w1: WeightVector, w2: WeightVector) -> Result<Self> {
        if w1.is_empty() && w2.is_empty() {
            return Err(Error::InvalidArgument("both weight vectors empty".into()));
        }
        Ok(Self { w1, w2 })
    }

    pub fn of_refinement(r: &Refinement) -> Result<Self> {
        Self::new(weight_vector_of(&r.k1), weight_vector_of(&r.k2))
    }

    /// `(|w₁|, |w₂|)`.
    pub fn dim_type(&self) -> (u32, u32) {
        (self.w1.size(), self.w2.size())
    }
}

impl fmt::Display for TropicalCountKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.w1, self.w2)
    }
}

/// All refinements of `(P₁, P₂)`: each part split into a multiset of
/// weights summing to it, parts in order, splittings in reverse
/// lexicographic order.
pub fn refinements(p1: &[u32], p2: &[u32]) -> Result<Vec<Refinement>> {
    if p1.contains(&0) || p2.contains(&0) {
        return Err(Error::InvalidArgument("parts must be positive".into()));
    }
    let side = |p: &[u32]| -> Vec<Vec<BTreeMap<u32, u32>>> {
        let mut out: Vec<Vec<BTreeMap<u32, u32>>> = vec![Vec::new()];
        for &part in p {
            let splits: Vec<BTreeMap<u32, u32>> = partitions(part)
                .iter()
                .map(|lam| {
                    let mut m = BTreeMap::new();
                    for &w in lam.parts() {
                        *m.entry(w).or_insert(0) += 1;
                    }
                    m
                })
                .collect();
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    splits.iter().map(move |s| {
                        let mut v = prefix.clone();
                        v.push(s.clone());
                        v
                    })
                })
                .collect();
        }
        out
    };
    let mut out = Vec::new();
    for k1 in side(p1) {
        for k2 in side(p2) {
            out.push(Refinement::new(k1.clone(), k2)?);
        }
    }
    Ok(out)
}

/// Number of maps from the entries of `w` to the parts of `p` such that
/// the entries sent to part `j` sum to `p_j`.
fn compatible_assignments(p: &[u32], w: &[u32]) -> u64 {
    fn go(k: usize, w: &[u32], room: &mut [u32]) -> u64 {
        if k == w.len() {
            return room.iter().all(|&r| r == 0) as u64;
        }
        let mut total = 0;
        for j in 0..room.len() {
            if room[j] >= w[k] {
                room[j] -= w[k];
                total += go(k + 1, w, room);
                room[j] += w[k];
            }
        }
        total
    }
    go(0, w, &mut p.to_vec())
}

/// `R_{P|w}`: the sum over compatible set partitions of the entries of `w`
/// into the parts of `P` of `∏_r (−1)^{w_r−1}/w_r²`.
pub fn ramification_factor(p: &[u32], w: &WeightVector) -> Result<Rational> {
    let size: u32 = p.iter().sum();
    if size != w.size() {
        return Err(Error::DimensionMismatch {
            expected: size as usize,
            got: w.size() as usize,
        });
    }
    let mut prod = Rational::one();
    for &x in w.entries() {
        let sign = if x % 2 == 1 { 1 } else { -1 };
        prod *= Rational::new(BigInt::from(sign), BigInt::from(x) * BigInt::from(x));
    }
    Ok(prod * Rational::from_integer(BigInt::from(compatible_assignments(p, w.entries()))))
}

/// How repeated pieces `(d_i, e_i)` in a decomposition are counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PieceCounting {
    /// Pieces of equal slope `e_i/d_i` are unordered: only decompositions
    /// listing each equal-slope run in sorted order are used, and each is
    /// divided by `∏ c_v!` over repeated values `(d_i, e_i)`. Reordering
    /// such a run leaves the multiplicity unchanged.
    Normalized,
    /// Ordered decompositions and ordered set partitions, no division.
    Ordered,
}

/// Contribution of one admissible decomposition to a tropical count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionTerm {
    pub pieces: Vec<(u32, u32)>,
    pub value: BigInt,
}

/// Memoized recursive tropical counts.
#[derive(Default)]
pub struct TropicalCounter {
    memo: HashMap<(Vec<u32>, Vec<u32>), BigInt>,
}

impl TropicalCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// `N^trop(w₁, w₂)`.
    pub fn count(&mut self, key: &TropicalCountKey) -> BigInt {
        self.count_raw(key.w1.entries(), key.w2.entries())
    }

    /// The per-decomposition terms of `N^trop(w₁, w₂)`. The counting mode
    /// applies to this level only; sub-pieces are always normalized.
    /// Base-case keys have no terms.
    pub fn breakdown(
        &mut self,
        key: &TropicalCountKey,
        mode: PieceCounting,
    ) -> Vec<DecompositionTerm> {
        self.terms(key.w1.entries(), key.w2.entries(), mode)
    }

    fn count_raw(&mut self, w1: &[u32], w2: &[u32]) -> BigInt {
        if let Some(base) = base_case(w1, w2) {
            return base;
        }
        let k = (w1.to_vec(), w2.to_vec());
        if let Some(v) = self.memo.get(&k) {
            return v.clone();
        }
        let v = self
            .terms(w1, w2, PieceCounting::Normalized)
            .into_iter()
            .map(|t| t.value)
            .sum();
        self.memo.insert(k, v);
        self.memo[&(w1.to_vec(), w2.to_vec())].clone()
    }

    fn terms(&mut self, w1: &[u32], w2: &[u32], mode: PieceCounting) -> Vec<DecompositionTerm> {
        if base_case(w1, w2).is_some() {
            return Vec::new();
        }
        let (&w, rest2) = w2.split_last().expect("nonempty second side");
        let d: u32 = w1.iter().sum();
        let e: u32 = w2.iter().sum();
        let mut out = Vec::new();
        for pieces in admissible_decompositions(d, e, w) {
            if mode == PieceCounting::Normalized && !runs_sorted(&pieces) {
                continue;
            }
            let mut mult = BigInt::one();
            let (mut sd, mut se) = (0i64, w as i64);
            for &(di, ei) in &pieces {
                let (di, ei) = (di as i64, ei as i64);
                mult *= BigInt::from((ei * sd - di * se).abs());
                sd += di;
                se += ei;
            }
            if mult.is_zero() {
                continue;
            }
            let mut total = BigInt::zero();
            let sizes1: Vec<u32> = pieces.iter().map(|p| p.0).collect();
            let sizes2: Vec<u32> = pieces.iter().map(|p| p.1).collect();
            for a1 in ordered_splits(w1, &sizes1) {
                for a2 in ordered_splits(rest2, &sizes2) {
                    let mut prod = BigInt::one();
                    for (x, y) in a1.iter().zip(&a2) {
                        prod *= self.count_raw(x, y);
                        if prod.is_zero() {
                            break;
                        }
                    }
                    total += prod;
                }
            }
            let mut value = total * mult;
            if mode == PieceCounting::Normalized {
                let (q, r) = value.div_rem(&repeat_factor(&pieces));
                assert!(r.is_zero(), "repeated-piece division is exact");
                value = q;
            }
            out.push(DecompositionTerm { pieces, value });
        }
        out
    }
}

fn base_case(w1: &[u32], w2: &[u32]) -> Option<BigInt> {
    match (w1.len(), w2.len()) {
        (1, 1) => Some(BigInt::from(w1[0]) * BigInt::from(w2[0])),
        (0, 1) | (1, 0) => Some(BigInt::one()),
        (0, _) | (_, 0) => Some(BigInt::zero()),
        _ => None,
    }
}

/// `∏ c_v!` over repeated values `(d_i, e_i)`.
fn repeat_factor(pieces: &[(u32, u32)]) -> BigInt {
    let mut counts: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for &p in pieces {
        *counts.entry(p).or_default() += 1;
    }
    counts.values().map(|&c| factorial(c)).product()
}

/// Whether pieces of equal slope appear in nondecreasing order. Slopes
/// weakly increase, so equal slopes are consecutive.
fn runs_sorted(pieces: &[(u32, u32)]) -> bool {
    pieces.windows(2).all(|w| {
        let ((d0, e0), (d1, e1)) = (w[0], w[1]);
        e0 as u64 * d1 as u64 != e1 as u64 * d0 as u64 || (d0, e0) <= (d1, e1)
    })
}

/// Ordered set partitions of the entries of `w` into parts whose sums are
/// `sizes` (a part of size 0 is empty). Each part is returned as a sorted
/// weight list; index-level choices are kept, so equal lists may repeat.
fn ordered_splits(w: &[u32], sizes: &[u32]) -> Vec<Vec<Vec<u32>>> {
    fn go(
        k: usize,
        w: &[u32],
        room: &mut [u32],
        cur: &mut Vec<Vec<u32>>,
        out: &mut Vec<Vec<Vec<u32>>>,
    ) {
        if k == w.len() {
            if room.iter().all(|&r| r == 0) {
                out.push(cur.clone());
            }
            return;
        }
        for j in 0..room.len() {
            if room[j] >= w[k] {
                room[j] -= w[k];
                cur[j].push(w[k]);
                go(k + 1, w, room, cur, out);
                cur[j].pop();
                room[j] += w[k];
            }
        }
    }
    let mut out = Vec::new();
    // Entries are sorted, so every part stays sorted as entries are pushed.
    go(
        0,
        w,
        &mut sizes.to_vec(),
        &mut vec![Vec::new(); sizes.len()],
        &mut out,
    );
    out
}

/// `N^trop(w₁, w₂)` with a fresh memo table.
pub fn n_trop(key: &TropicalCountKey) -> BigInt {
    TropicalCounter::new().count(key)
}

/// `∏_{j,w} (−1)^{k(w−1)} / (k! · w^{p k})` over the weight counts `k = k_{w,j}`
/// of both sides of a refinement.
pub fn refinement_weight(r: &Refinement, power: u32) -> Rational {
    let mut out = Rational::one();
    for side in [&r.k1, &r.k2] {
        for part in side.iter() {
            for (&w, &k) in part {
                let sign = if k * (w - 1) % 2 == 0 { 1 } else { -1 };
                let den = factorial(k) * BigInt::from(w).pow(power * k);
                out *= Rational::new(BigInt::from(sign), den);
            }
        }
    }
    out
}

fn require_coprime(p1: &[u32], p2: &[u32]) -> Result<()> {
    let (a, b): (u32, u32) = (p1.iter().sum(), p2.iter().sum());
    if a.gcd(&b) != 1 {
        return Err(Error::NotCoprimeSizes(a, b));
    }
    Ok(())
}

fn integral(total: Rational, what: &str) -> Result<BigInt> {
    if !total.is_integer() {
        return Err(Error::Internal(format!(
            "{what} is not an integer: {total}"
        )));
    }
    Ok(total.to_integer())
}

/// One refinement's share of a refinement sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementTerm {
    pub refinement: Refinement,
    /// The thin count attached to the refinement (stable trees or `N^trop`).
    pub count: BigInt,
    pub weight: Rational,
}

impl RefinementTerm {
    pub fn contribution(&self) -> Rational {
        &self.weight * Rational::from_integer(self.count.clone())
    }
}

/// The refinement terms of [`mps_euler`].
pub fn mps_euler_terms(p1: &[u32], p2: &[u32]) -> Result<Vec<RefinementTerm>> {
    require_coprime(p1, p2)?;
    let mut cache: HashMap<TropicalCountKey, u64> = HashMap::new();
    let mut out = Vec::new();
    for r in refinements(p1, p2)? {
        let key = TropicalCountKey::of_refinement(&r)?;
        let count = match cache.get(&key) {
            Some(&c) => c,
            None => {
                let c = chi_trees(&r)?;
                cache.insert(key, c);
                c
            }
        };
        out.push(RefinementTerm {
            weight: refinement_weight(&r, 2),
            count: BigInt::from(count),
            refinement: r,
        });
    }
    Ok(out)
}

/// `Σ_{(k¹,k²)} chi_trees(k¹,k²) · ∏ (−1)^{k(w−1)}/(k!·w^{2k})`, the Euler
/// characteristic of the stable moduli of `K(l₁, l₂)` at `(P₁, P₂)`.
pub fn mps_euler(p1: &[u32], p2: &[u32]) -> Result<BigInt> {
    let total = mps_euler_terms(p1, p2)?
        .iter()
        .map(RefinementTerm::contribution)
        .sum();
    integral(total, "refinement sum")
}

/// The refinement terms of [`degeneration_total`]; the weight includes the
/// division by `∏ w`.
pub fn degeneration_terms(p1: &[u32], p2: &[u32]) -> Result<Vec<RefinementTerm>> {
    require_coprime(p1, p2)?;
    let mut counter = TropicalCounter::new();
    let mut out = Vec::new();
    for r in refinements(p1, p2)? {
        let key = TropicalCountKey::of_refinement(&r)?;
        let scale = Rational::new(BigInt::one(), key.w1.product() * key.w2.product());
        out.push(RefinementTerm {
            weight: refinement_weight(&r, 1) * scale,
            count: counter.count(&key),
            refinement: r,
        });
    }
    Ok(out)
}

/// `Σ_{(k¹,k²)} N^trop(w(k¹),w(k²))/∏w · ∏ (−1)^{k(w−1)}/(k!·w^k)`.
pub fn degeneration_total(p1: &[u32], p2: &[u32]) -> Result<BigInt> {
    let total = degeneration_terms(p1, p2)?
        .iter()
        .map(RefinementTerm::contribution)
        .sum();
    integral(total, "degeneration sum")
}

/// All weight vectors of total size `n`.
fn weight_vectors(n: u32) -> Vec<WeightVector> {
    partitions(n)
        .iter()
        .map(|lam| WeightVector::new(lam.parts().to_vec()).expect("positive"))
        .collect()
}

/// The degeneration sum regrouped by weight vectors:
/// `Σ_{w₁,w₂} N^trop(w₁,w₂) R_{P₁|w₁} R_{P₂|w₂} / (|Aut w₁| |Aut w₂|)`.
pub fn degeneration_total_by_ramification(p1: &[u32], p2: &[u32]) -> Result<BigInt> {
    require_coprime(p1, p2)?;
    let mut counter = TropicalCounter::new();
    let mut total = Rational::zero();
    let side2 = weight_vectors(p2.iter().sum());
    for w1 in weight_vectors(p1.iter().sum()) {
        let r1 = ramification_factor(p1, &w1)? / Rational::from_integer(w1.aut());
        if r1.is_zero() {
            continue;
        }
        for w2 in &side2 {
            let r2 = ramification_factor(p2, w2)? / Rational::from_integer(w2.aut());
            let n = counter.count(&TropicalCountKey::new(w1.clone(), w2.clone())?);
            total += &r1 * &r2 * Rational::from_integer(n);
        }
    }
    integral(total, "ramified sum")
}

/// Euler characteristic of the stable moduli of `K(l₁, l₂)` at `(P₁, P₂)`
/// by the Harder–Narasimhan recursion, with `Θ` equal to 1 on sources.
pub fn bipartite_euler_char(p1: &[u32], p2: &[u32]) -> Result<BigInt> {
    require_coprime(p1, p2)?;
    let (q, s, d) = bipartite_setup(p1, p2);
    crate::motive::euler_char(&q, &s, &d)
}

/// `K(l₁, l₂)`, its stability `Θ = (1,…,1,0,…,0)`, and the dimension vector
/// `(P₁, P₂)`.
pub fn bipartite_setup(p1: &[u32], p2: &[u32]) -> (Quiver, Stability, DimVector) {
    let q = Quiver::complete_bipartite(p1.len(), p2.len());
    let theta = p1.iter().map(|_| 1).chain(p2.iter().map(|_| 0)).collect();
    let d = DimVector::new(p1.iter().chain(p2).copied().collect());
    (q, Stability::with_levels(theta), d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localization::chi_trees;
    use crate::poly::rat;
    use crate::symfunc::binomial;

    fn wv(w: &[u32]) -> WeightVector {
        WeightVector::new(w.to_vec()).unwrap()
    }

    fn key(a: &[u32], b: &[u32]) -> TropicalCountKey {
        TropicalCountKey::new(wv(a), wv(b)).unwrap()
    }

    #[test]
    fn weight_vector_examples() {
        let r = Refinement::parse("1+1;2").unwrap();
        assert_eq!(weight_vector_of(&r.k1), wv(&[1, 1]));
        assert_eq!(weight_vector_of(&r.k2), wv(&[2]));
        let r = Refinement::parse("2,1+2;1").unwrap();
        assert_eq!(weight_vector_of(&r.k1).entries(), &[1, 2, 2]);
        assert_eq!(wv(&[2, 1, 2]).aut(), BigInt::from(2));
    }

    #[test]
    fn ramification_examples() {
        assert_eq!(ramification_factor(&[2], &wv(&[1, 1])).unwrap(), rat(1, 1));
        assert_eq!(ramification_factor(&[2], &wv(&[2])).unwrap(), rat(-1, 4));
        assert_eq!(
            ramification_factor(&[1, 1], &wv(&[1, 1])).unwrap(),
            rat(2, 1)
        );
        assert_eq!(ramification_factor(&[1, 1], &wv(&[2])).unwrap(), rat(0, 1));
        assert!(ramification_factor(&[3], &wv(&[1])).is_err());
    }

    #[test]
    fn refinement_examples() {
        assert_eq!(refinements(&[2], &[1]).unwrap().len(), 2);
        assert_eq!(refinements(&[1], &[1]).unwrap().len(), 1);
        let r: Vec<String> = refinements(&[3], &[1])
            .unwrap()
            .iter()
            .map(|r| r.to_string())
            .collect();
        assert_eq!(r, vec!["3;1", "1+2;1", "1+1+1;1"]);
    }

    #[test]
    fn n_trop_examples() {
        assert_eq!(n_trop(&key(&[1], &[1])), BigInt::from(1));
        assert_eq!(n_trop(&key(&[1, 1], &[1, 1])), BigInt::from(2));
        assert_eq!(n_trop(&key(&[2], &[1, 1, 1])), BigInt::from(8));
        assert_eq!(n_trop(&key(&[1, 1], &[1, 1, 1])), BigInt::from(6));
        assert_eq!(n_trop(&key(&[3], &[])), BigInt::from(1));
        assert_eq!(n_trop(&key(&[1, 1], &[])), BigInt::from(0));
    }

    #[test]
    fn breakdown_of_two_three() {
        let mut c = TropicalCounter::new();
        let k = key(&[1, 1], &[1, 1, 1]);
        let terms = c.breakdown(&k, PieceCounting::Normalized);
        let by_pieces: BTreeMap<Vec<(u32, u32)>, BigInt> =
            terms.into_iter().map(|t| (t.pieces, t.value)).collect();
        assert_eq!(by_pieces[&vec![(2, 2)]], BigInt::from(4));
        assert_eq!(by_pieces[&vec![(1, 1), (1, 1)]], BigInt::from(2));
        let ordered: BigInt = c
            .breakdown(&k, PieceCounting::Ordered)
            .into_iter()
            .map(|t| t.value)
            .sum();
        assert_eq!(ordered, BigInt::from(8));
    }

    #[test]
    fn n_trop_matches_trees_small() {
        for (p1, p2) in [
            (vec![2], vec![1, 1, 1]),
            (vec![1, 1], vec![1, 1, 1]),
            (vec![1, 2], vec![2]),
        ] {
            for r in refinements(&p1, &p2).unwrap() {
                let k = TropicalCountKey::of_refinement(&r).unwrap();
                assert_eq!(n_trop(&k), BigInt::from(chi_trees(&r).unwrap()), "{r}");
            }
        }
    }

    #[test]
    fn n_trop_side_swap() {
        for (a, b) in [
            (vec![1, 1], vec![1, 1, 1]),
            (vec![2], vec![1, 1, 1]),
            (vec![1, 2], vec![1, 1]),
        ] {
            assert_eq!(n_trop(&key(&a, &b)), n_trop(&key(&b, &a)), "{a:?} {b:?}");
        }
    }

    #[test]
    fn refinement_sums_examples() {
        assert_eq!(mps_euler(&[2], &[1, 1, 1]).unwrap(), BigInt::from(1));
        assert_eq!(mps_euler(&[2], &[1; 5]).unwrap(), BigInt::from(7));
        assert_eq!(mps_euler(&[1], &[1, 1]).unwrap(), BigInt::from(1));
        let contributions: Vec<Rational> = mps_euler_terms(&[2], &[1, 1, 1])
            .unwrap()
            .iter()
            .map(RefinementTerm::contribution)
            .collect();
        assert_eq!(contributions, vec![rat(-2, 1), rat(3, 1)]);
        assert_eq!(
            degeneration_total(&[2], &[1, 1, 1]).unwrap(),
            BigInt::from(1)
        );
        assert_eq!(degeneration_total(&[2], &[1; 5]).unwrap(), BigInt::from(7));
        assert_eq!(degeneration_total(&[1], &[1, 1]).unwrap(), BigInt::from(1));
        assert!(mps_euler(&[2], &[2]).is_err());
    }

    #[test]
    fn three_way_agreement() {
        for (p1, p2) in [
            (vec![2], vec![1, 1, 1]),
            (vec![1, 1], vec![1, 2]),
            (vec![3], vec![2]),
            (vec![2], vec![3]),
            (vec![1, 1], vec![3]),
        ] {
            let hn = bipartite_euler_char(&p1, &p2).unwrap();
            assert_eq!(mps_euler(&p1, &p2).unwrap(), hn, "{p1:?} {p2:?}");
            assert_eq!(degeneration_total(&p1, &p2).unwrap(), hn);
            assert_eq!(degeneration_total_by_ramification(&p1, &p2).unwrap(), hn);
        }
    }

    /// Summing the ramified weight over refinements with fixed weight
    /// vector gives the per-refinement weights.
    #[test]
    fn ramification_regroups_refinement_weights() {
        for p in [vec![2], vec![3], vec![2, 1], vec![2, 2], vec![4]] {
            let n: u32 = p.iter().sum();
            for w in weight_vectors(n) {
                let lhs = Rational::from_integer(w.product()) / Rational::from_integer(w.aut())
                    * ramification_factor(&p, &w).unwrap();
                let mut rhs = Rational::zero();
                for r in refinements(&p, &[1]).unwrap() {
                    if weight_vector_of(&r.k1) == w {
                        let one_side = Refinement::new(r.k1.clone(), vec![]).unwrap();
                        rhs += refinement_weight(&one_side, 1);
                    }
                }
                assert_eq!(lhs, rhs, "{p:?} {w}");
            }
        }
    }

    /// The two pieces of the closed form for `(2, 1^{2n+1})`.
    #[test]
    fn closed_form_pieces() {
        for n in 1..=3u64 {
            let ones = vec![1; 2 * n as usize + 1];
            let thin = binomial(2 * n, n) + BigInt::from(4 * n) * binomial(2 * n - 1, n - 1);
            assert_eq!(n_trop(&key(&[1, 1], &ones)), thin);
            assert_eq!(
                n_trop(&key(&[2], &ones)),
                BigInt::from(2u32).pow(2 * n as u32 + 1)
            );
        }
    }
}
