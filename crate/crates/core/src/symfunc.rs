//! Partitions, the elementary and power-sum bases of symmetric functions,
//! the closed-form base changes between them, and principal specialization
//! to rational functions in `q`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{int, Poly, Rational, RationalFunction};

/// A partition, stored as weakly decreasing positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Sorts the parts; rejects zero parts.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidArgument("partition with a zero part".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self(parts))
    }

    /// Inverse of [`Partition::multiplicities`]: `m[l-1]` copies of `l`.
    pub fn from_multiplicities(m: &[u32]) -> Self {
        let mut parts = Vec::new();
        for (l, &c) in m.iter().enumerate().rev() {
            parts.extend(std::iter::repeat(l as u32 + 1).take(c as usize));
        }
        Self(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `m[l-1]` is the number of parts equal to `l`.
    pub fn multiplicities(&self) -> Vec<u32> {
        let mut m = vec![0; self.0.first().copied().unwrap_or(0) as usize];
        for &p in &self.0 {
            m[p as usize - 1] += 1;
        }
        m
    }

    /// `ε_λ = (−1)^{|λ| − l(λ)}`.
    pub fn sign(&self) -> i64 {
        if (self.size() as usize - self.len()) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `z_λ = ∏_l m_l! l^{m_l}`.
    pub fn z(&self) -> BigInt {
        self.multiplicities()
            .iter()
            .enumerate()
            .map(|(l, &c)| factorial(c) * BigInt::from(l + 1).pow(c))
            .product()
    }

    /// Concatenation of parts, re-sorted.
    pub fn union(&self, other: &Partition) -> Partition {
        let mut parts = self.0.clone();
        parts.extend_from_slice(&other.0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// All partitions of `n`, largest first part first (reverse lexicographic).
pub fn partitions(n: u32) -> Vec<Partition> {
    fn go(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(Partition(prefix.clone()));
            return;
        }
        for p in (1..=n.min(max)).rev() {
            prefix.push(p);
            go(n - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// All multiplicity vectors of weight `n`, in the order of [`partitions`].
pub fn multiplicity_vectors(n: u32) -> Vec<Vec<u32>> {
    partitions(n)
        .iter()
        .map(Partition::multiplicities)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    Elementary,
    PowerSum,
}

/// A rational linear combination of `e_λ` or of `p_λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymPoly {
    basis: Basis,
    terms: BTreeMap<Partition, Rational>,
}

impl SymPoly {
    pub fn zero(basis: Basis) -> Self {
        Self {
            basis,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(basis: Basis) -> Self {
        Self::monomial(basis, Partition::default(), Rational::one())
    }

    pub fn monomial(basis: Basis, lambda: Partition, c: Rational) -> Self {
        let mut s = Self::zero(basis);
        s.add_term(lambda, c);
        s
    }

    /// `e_n` or `p_n`.
    pub fn generator(basis: Basis, n: u32) -> Self {
        Self::monomial(basis, Partition(vec![n]), Rational::one())
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn terms(&self) -> &BTreeMap<Partition, Rational> {
        &self.terms
    }

    pub fn coeff(&self, lambda: &Partition) -> Rational {
        self.terms
            .get(lambda)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, lambda: Partition, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(lambda).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &SymPoly) -> SymPoly {
        assert_eq!(self.basis, other.basis, "adding across bases");
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(l.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> SymPoly {
        let mut out = Self::zero(self.basis);
        for (l, a) in &self.terms {
            out.add_term(l.clone(), a * c);
        }
        out
    }

    pub fn mul(&self, other: &SymPoly) -> SymPoly {
        assert_eq!(self.basis, other.basis, "multiplying across bases");
        let mut out = Self::zero(self.basis);
        for (l1, a) in &self.terms {
            for (l2, b) in &other.terms {
                out.add_term(l1.union(l2), a * b);
            }
        }
        out
    }

    /// Rewrites in the power-sum basis.
    pub fn to_power_sums(&self) -> Result<SymPoly> {
        self.change_basis(Basis::PowerSum, e_lambda_to_p)
    }

    /// Rewrites in the elementary basis.
    pub fn to_elementary(&self) -> Result<SymPoly> {
        self.change_basis(Basis::Elementary, p_lambda_to_e)
    }

    fn change_basis(
        &self,
        target: Basis,
        expand: impl Fn(&Partition) -> Result<SymPoly>,
    ) -> Result<SymPoly> {
        if self.basis == target {
            return Ok(self.clone());
        }
        let mut out = SymPoly::zero(target);
        for (l, c) in &self.terms {
            let image = if l.is_empty() {
                SymPoly::one(target)
            } else {
                expand(l)?
            };
            out = out.add(&image.scale(c));
        }
        Ok(out)
    }
}

fn sign(k: u32) -> Rational {
    if k % 2 == 0 {
        int(1)
    } else {
        int(-1)
    }
}

/// `∏_l (1/m_l!) ((−1)^{l−1}/l)^{m_l}`: the power-sum coefficient attached
/// to a multiplicity vector in the expansion of `e_n`.
fn e_weight(m: &[u32]) -> Rational {
    let mut w = Rational::one();
    for (idx, &c) in m.iter().enumerate() {
        let l = idx as u32 + 1;
        let base = sign(l - 1) / int(l as i64);
        w *= num_traits::pow(base, c as usize) / Rational::from_integer(factorial(c));
    }
    w
}

fn require_positive(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    Ok(())
}

/// `e_n = Σ_{m ⊢ n} ∏_l (1/m_l!) ((−1)^{l−1}/l)^{m_l} p_{λ(m)}`.
pub fn e_to_p(n: u32) -> Result<SymPoly> {
    require_positive(n)?;
    let mut out = SymPoly::zero(Basis::PowerSum);
    for m in multiplicity_vectors(n) {
        out.add_term(Partition::from_multiplicities(&m), e_weight(&m));
    }
    Ok(out)
}

/// `p_n = (−1)^{n−1} n Σ_{λ ⊢ n} ((−1)^{l(λ)−1}/l(λ)) (l(λ)!/∏ m_l(λ)!) e_λ`.
pub fn p_to_e(n: u32) -> Result<SymPoly> {
    require_positive(n)?;
    let mut out = SymPoly::zero(Basis::Elementary);
    let front = sign(n - 1) * int(n as i64);
    for lambda in partitions(n) {
        let len = lambda.len() as u32;
        let denom: BigInt = lambda
            .multiplicities()
            .iter()
            .map(|&c| factorial(c))
            .product();
        let c = &front * sign(len - 1) / int(len as i64) * Rational::new(factorial(len), denom);
        out.add_term(lambda, c);
    }
    Ok(out)
}

/// `e_λ` in the power-sum basis, summing over tuples of multiplicity vectors
/// `m^j ⊢ λ_j`: the tuple contributes to `p_{λ(m)}` with `m = Σ_j m^j` the
/// coefficient `(∏_l m_l! / ∏_{j,l} m^j_l!) ∏_l (1/m_l!) ((−1)^{l−1}/l)^{m_l}`.
pub fn e_lambda_to_p(lambda: &Partition) -> Result<SymPoly> {
    if lambda.is_empty() {
        return Err(Error::InvalidArgument("empty partition".into()));
    }
    let choices: Vec<Vec<Vec<u32>>> = lambda
        .parts()
        .iter()
        .map(|&p| multiplicity_vectors(p))
        .collect();
    let width = lambda.parts()[0] as usize;
    let mut out = SymPoly::zero(Basis::PowerSum);
    let mut pick = vec![0usize; choices.len()];
    loop {
        let mut m = vec![0u32; width];
        let mut inner_denom = BigInt::one();
        for (j, &k) in pick.iter().enumerate() {
            for (l, &c) in choices[j][k].iter().enumerate() {
                m[l] += c;
                inner_denom *= factorial(c);
            }
        }
        let numer: BigInt = m.iter().map(|&c| factorial(c)).product();
        let coeff = Rational::new(numer, inner_denom) * e_weight(&m);
        out.add_term(Partition::from_multiplicities(&m), coeff);

        let mut j = 0;
        loop {
            if j == pick.len() {
                return Ok(out);
            }
            pick[j] += 1;
            if pick[j] < choices[j].len() {
                break;
            }
            pick[j] = 0;
            j += 1;
        }
    }
}

/// `p_λ = ∏_j p_{λ_j}` in the elementary basis.
pub fn p_lambda_to_e(lambda: &Partition) -> Result<SymPoly> {
    if lambda.is_empty() {
        return Err(Error::InvalidArgument("empty partition".into()));
    }
    let mut out = SymPoly::one(Basis::Elementary);
    for &p in lambda.parts() {
        out = out.mul(&p_to_e(p)?);
    }
    Ok(out)
}

/// `[l]_q = (q^l − 1)/(q − 1)`.
pub fn q_integer(l: u32) -> Poly {
    Poly::from_coeffs(vec![int(1); l as usize])
}

/// `1 − q^n`
fn one_minus_q_pow(n: u32) -> Poly {
    -&Poly::x_pow_minus_one(n as usize)
}

/// Image of `e_n`: `q^{n(n−1)/2} / ((1−q)…(1−q^n))`.
pub fn specialize_e(n: u32) -> RationalFunction {
    let num = Poly::monomial(Rational::one(), (n * n.saturating_sub(1) / 2) as usize);
    let den = (1..=n).fold(Poly::one(), |acc, i| &acc * &one_minus_q_pow(i));
    RationalFunction::new(num, den)
}

/// Image of `p_n`: `1/(1 − q^n)`.
pub fn specialize_p(n: u32) -> RationalFunction {
    RationalFunction::new(Poly::one(), one_minus_q_pow(n))
}

/// Principal specialization `e_n ↦ q^{n(n−1)/2}/∏(1−q^i)`, `p_n ↦ 1/(1−q^n)`.
pub fn principal_specialize(s: &SymPoly) -> RationalFunction {
    let image = |n: u32| match s.basis {
        Basis::Elementary => specialize_e(n),
        Basis::PowerSum => specialize_p(n),
    };
    s.terms
        .iter()
        .map(|(lambda, c)| {
            let prod = lambda
                .parts()
                .iter()
                .fold(RationalFunction::one(), |acc, &n| &acc * &image(n));
            prod.scale(c)
        })
        .sum()
}

/// Both sides of
/// `q^{n(n−1)/2}/∏_{i<n}(q^n − q^i) = Σ_{m⊢n} ∏_l (1/m_l!)((−1)^{l−1}/(l[l]_q))^{m_l} (q−1)^{−Σ m_l}`.
pub fn q_series_identity(n: u32) -> Result<(RationalFunction, RationalFunction)> {
    require_positive(n)?;
    let nn = n as usize;
    let lhs_den = (0..nn).fold(Poly::one(), |acc, i| {
        let f = &Poly::monomial(Rational::one(), nn) - &Poly::monomial(Rational::one(), i);
        &acc * &f
    });
    let lhs = RationalFunction::new(Poly::monomial(Rational::one(), nn * (nn - 1) / 2), lhs_den);
    let q_minus_one = RationalFunction::from_poly(Poly::from_ints(&[-1, 1]));
    let mut rhs = RationalFunction::zero();
    for m in multiplicity_vectors(n) {
        let mut term = RationalFunction::one();
        let mut parts = 0i64;
        for (idx, &c) in m.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let l = idx as u32 + 1;
            let base = RationalFunction::new(
                Poly::constant(sign(l - 1)),
                q_integer(l).scale(&int(l as i64)),
            );
            term = &term * &base.pow(c as i64);
            term = term.scale(&Rational::new(BigInt::one(), factorial(c)));
            parts += c as i64;
        }
        term = &term * &q_minus_one.pow(-parts);
        rhs = &rhs + &term;
    }
    Ok((lhs, rhs))
}
