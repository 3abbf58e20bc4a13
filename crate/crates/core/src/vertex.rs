//! The tropical vertex group over a ring of square-zero tokens.
//!
//! Each token carries a fixed monomial: a sink token of weight `w` stands
//! for `u x^w`, a source token for `v y^w`. Tokens are organized in classes
//! of interchangeable tokens (same side and weight). An element is
//! `x^α y^β · Σ_k c_k E_k` where `E_k` is the product over classes of the
//! elementary symmetric polynomial of degree `k_c` in the class tokens.
//! With classes of size one this is the full square-free token algebra;
//! larger classes give its subalgebra of class-symmetric elements, which is
//! closed under every operation here.
//!
//! A wall `θ_{(a,b),f}` acts by `x ↦ x f^{−b}`, `y ↦ y f^{a}`, so it sends a
//! monomial `x^p y^q` to `x^p y^q f^{aq−bp}`. Products compose right to
//! left: `(g·h)(x) = g(h(x))`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{rational_to_string, Rational};
use crate::quiver::Refinement;
use crate::tropical::{refinement_weight, refinements, TropicalCountKey};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    /// Token `u`, carrying `x^w`.
    Sink,
    /// Token `v`, carrying `y^w`.
    Source,
}

/// `size` interchangeable tokens of one side and weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenClass {
    pub label: String,
    pub side: Side,
    pub weight: u32,
    pub size: u32,
}

/// The algebra spanned by the `E_k`, with precomputed index data.
#[derive(Debug)]
pub struct TokenAlgebra {
    classes: Vec<TokenClass>,
    strides: Vec<usize>,
    len: usize,
    digits: Vec<Vec<u32>>,
    exps: Vec<(i64, i64)>,
    degree: Vec<u32>,
}

const MAX_BASIS: usize = 1 << 16;

impl TokenAlgebra {
    pub fn new(classes: Vec<TokenClass>) -> Result<Arc<Self>> {
        if classes.iter().any(|c| c.weight == 0 || c.size == 0) {
            return Err(Error::InvalidArgument(
                "token classes need positive weight and size".into(),
            ));
        }
        let mut strides = Vec::with_capacity(classes.len());
        let mut len = 1usize;
        for c in &classes {
            strides.push(len);
            len = len
                .checked_mul(c.size as usize + 1)
                .filter(|&l| l <= MAX_BASIS)
                .ok_or_else(|| Error::InvalidArgument("token algebra too large".into()))?;
        }
        let mut digits = Vec::with_capacity(len);
        let mut exps = Vec::with_capacity(len);
        let mut degree = Vec::with_capacity(len);
        for idx in 0..len {
            let d: Vec<u32> = classes
                .iter()
                .zip(&strides)
                .map(|(c, &s)| ((idx / s) % (c.size as usize + 1)) as u32)
                .collect();
            let mut e = (0i64, 0i64);
            for (c, &k) in classes.iter().zip(&d) {
                let amount = (c.weight * k) as i64;
                match c.side {
                    Side::Sink => e.0 += amount,
                    Side::Source => e.1 += amount,
                }
            }
            degree.push(d.iter().sum());
            exps.push(e);
            digits.push(d);
        }
        Ok(Arc::new(Self {
            classes,
            strides,
            len,
            digits,
            exps,
            degree,
        }))
    }

    /// Tokens for the vertices of the support quiver of `r`: sinks first,
    /// then sources, each in support order. With `grouped`, tokens of equal
    /// side and weight share a class.
    pub fn for_refinement(r: &Refinement, grouped: bool) -> Result<Arc<Self>> {
        let mut classes: Vec<TokenClass> = Vec::new();
        let sides = [
            (Side::Sink, &r.k2, 'u', 'j'),
            (Side::Source, &r.k1, 'v', 'i'),
        ];
        for (side, k, token, vertex) in sides {
            for (w, j, copy) in Refinement::expand(k) {
                if grouped {
                    if let Some(c) = classes.iter_mut().find(|c| c.side == side && c.weight == w) {
                        c.size += 1;
                        continue;
                    }
                    classes.push(TokenClass {
                        label: format!("{token}{w}"),
                        side,
                        weight: w,
                        size: 1,
                    });
                } else {
                    classes.push(TokenClass {
                        label: format!("{token}[{vertex}{}[{w}:{copy}]]", j + 1),
                        side,
                        weight: w,
                        size: 1,
                    });
                }
            }
        }
        Self::new(classes)
    }

    pub fn classes(&self) -> &[TokenClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Index of `E_k`, or `None` if some `k_c` exceeds its class size.
    pub fn index_of(&self, counts: &[u32]) -> Option<usize> {
        if counts.len() != self.classes.len() {
            return None;
        }
        let mut idx = 0;
        for ((c, &k), &s) in self.classes.iter().zip(counts).zip(&self.strides) {
            if k > c.size {
                return None;
            }
            idx += k as usize * s;
        }
        Some(idx)
    }

    /// Index of the product of all tokens.
    pub fn full_index(&self) -> usize {
        self.len - 1
    }

    /// `(x, y)` exponents carried by `E_k`.
    pub fn exponents(&self, idx: usize) -> (i64, i64) {
        self.exps[idx]
    }

    /// Number of tokens in `E_k`.
    pub fn degree(&self, idx: usize) -> u32 {
        self.degree[idx]
    }

    pub fn counts(&self, idx: usize) -> &[u32] {
        &self.digits[idx]
    }

    /// `a · b` on coefficient vectors, using `E_j E_k = ∏ binom(j_c+k_c, j_c) E_{j+k}`.
    fn mul(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.len];
        let nonzero_b: Vec<usize> = (0..self.len).filter(|&k| !b[k].is_zero()).collect();
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            let di = &self.digits[i];
            for &k in &nonzero_b {
                let dk = &self.digits[k];
                let mut factor = 1u64;
                let mut ok = true;
                for (c, class) in self.classes.iter().enumerate() {
                    let s = di[c] + dk[c];
                    if s > class.size {
                        ok = false;
                        break;
                    }
                    if di[c] > 0 && dk[c] > 0 {
                        factor *= small_binomial(s, di[c]);
                    }
                }
                if ok {
                    let term = ai * &b[k];
                    if factor == 1 {
                        out[i + k] += term;
                    } else {
                        out[i + k] += term * Rational::from_integer(BigInt::from(factor));
                    }
                }
            }
        }
        out
    }
}

fn small_binomial(n: u32, k: u32) -> u64 {
    let k = k.min(n - k) as u64;
    let mut r = 1u64;
    for j in 0..k {
        r = r * (n as u64 - j) / (j + 1);
    }
    r
}

/// `binom(m, j)` for any integer `m`.
fn general_binomial(m: i64, j: u32) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for t in 0..j as i64 {
        num *= BigInt::from(m - t);
        den *= BigInt::from(t + 1);
    }
    num / den
}

/// `x^α y^β · Σ_k c_k E_k`.
#[derive(Clone, Debug)]
pub struct TruncatedElement {
    algebra: Arc<TokenAlgebra>,
    base: (i64, i64),
    coeffs: Vec<Rational>,
}

impl PartialEq for TruncatedElement {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.algebra, &o.algebra)
            && ((self.base == o.base && self.coeffs == o.coeffs) || (self.is_zero() && o.is_zero()))
    }
}

impl TruncatedElement {
    pub fn zero(algebra: &Arc<TokenAlgebra>) -> Self {
        Self {
            algebra: Arc::clone(algebra),
            base: (0, 0),
            coeffs: vec![Rational::zero(); algebra.len],
        }
    }

    pub fn one(algebra: &Arc<TokenAlgebra>) -> Self {
        Self::monomial(algebra, (0, 0), 0, Rational::one())
    }

    pub fn x(algebra: &Arc<TokenAlgebra>) -> Self {
        Self::monomial(algebra, (1, 0), 0, Rational::one())
    }

    pub fn y(algebra: &Arc<TokenAlgebra>) -> Self {
        Self::monomial(algebra, (0, 1), 0, Rational::one())
    }

    /// `c · x^α y^β · E_k` with `k` given by its index.
    pub fn monomial(
        algebra: &Arc<TokenAlgebra>,
        base: (i64, i64),
        idx: usize,
        c: Rational,
    ) -> Self {
        let mut e = Self::zero(algebra);
        e.base = base;
        e.coeffs[idx] = c;
        e
    }

    pub fn algebra(&self) -> &Arc<TokenAlgebra> {
        &self.algebra
    }

    pub fn base(&self) -> (i64, i64) {
        self.base
    }

    pub fn coeff(&self, idx: usize) -> &Rational {
        &self.coeffs[idx]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Nonzero terms as `(x exponent, y exponent, index, coefficient)`.
    pub fn terms(&self) -> Vec<(i64, i64, usize, Rational)> {
        (0..self.coeffs.len())
            .filter(|&k| !self.coeffs[k].is_zero())
            .map(|k| {
                let (p, q) = self.algebra.exps[k];
                (self.base.0 + p, self.base.1 + q, k, self.coeffs[k].clone())
            })
            .collect()
    }

    /// Lowest token degree among nonzero terms.
    pub fn lowest_degree(&self) -> Option<u32> {
        (0..self.coeffs.len())
            .filter(|&k| !self.coeffs[k].is_zero())
            .map(|k| self.algebra.degree[k])
            .min()
    }

    fn same_base(&self, o: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.algebra, &o.algebra) {
            return Err(Error::InvalidArgument(
                "elements of different token algebras".into(),
            ));
        }
        if self.base != o.base && !self.is_zero() && !o.is_zero() {
            return Err(Error::InvalidArgument(
                "sum of elements with different base monomials".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_base(o)?;
        let base = if self.is_zero() { o.base } else { self.base };
        Ok(Self {
            algebra: Arc::clone(&self.algebra),
            base,
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            algebra: Arc::clone(&self.algebra),
            base: self.base,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if !Arc::ptr_eq(&self.algebra, &o.algebra) {
            return Err(Error::InvalidArgument(
                "elements of different token algebras".into(),
            ));
        }
        Ok(Self {
            algebra: Arc::clone(&self.algebra),
            base: (self.base.0 + o.base.0, self.base.1 + o.base.1),
            coeffs: self.algebra.mul(&self.coeffs, &o.coeffs),
        })
    }

    /// Multiplies by `x^p y^q`.
    pub fn shift(&self, p: i64, q: i64) -> Self {
        let mut e = self.clone();
        e.base = (e.base.0 + p, e.base.1 + q);
        e
    }

    /// `f − 1` for a unit `f = 1 + g` with no base monomial.
    fn nilpotent_part(&self) -> Result<Vec<Rational>> {
        if self.base != (0, 0) || !self.coeffs[0].is_one() {
            return Err(Error::InvalidArgument(
                "expected an element 1 + (token terms)".into(),
            ));
        }
        let mut g = self.coeffs.clone();
        g[0] = Rational::zero();
        Ok(g)
    }

    /// Powers `g^0, …, g^n` of a nilpotent coefficient vector, stopping at 0.
    fn powers(&self, g: &[Rational]) -> Vec<Vec<Rational>> {
        let mut one = vec![Rational::zero(); self.algebra.len];
        one[0] = Rational::one();
        let mut out = vec![one];
        loop {
            let next = self.algebra.mul(out.last().expect("nonempty"), g);
            if next.iter().all(Zero::is_zero) {
                return out;
            }
            out.push(next);
        }
    }

    /// `f^m` for a unit `f = 1 + g`, any integer `m`.
    pub fn pow(&self, m: i64) -> Result<Self> {
        let g = self.nilpotent_part()?;
        let mut coeffs = vec![Rational::zero(); self.algebra.len];
        for (j, gj) in self.powers(&g).iter().enumerate() {
            let b = Rational::from_integer(general_binomial(m, j as u32));
            for (c, x) in coeffs.iter_mut().zip(gj) {
                *c += &b * x;
            }
        }
        Ok(Self {
            algebra: Arc::clone(&self.algebra),
            base: (0, 0),
            coeffs,
        })
    }

    /// `log f = Σ_{j≥1} (−1)^{j+1} g^j / j` for a unit `f = 1 + g`.
    pub fn log(&self) -> Result<Self> {
        let g = self.nilpotent_part()?;
        let mut coeffs = vec![Rational::zero(); self.algebra.len];
        for (j, gj) in self.powers(&g).iter().enumerate().skip(1) {
            let sign = if j % 2 == 1 { 1 } else { -1 };
            let c = Rational::new(BigInt::from(sign), BigInt::from(j));
            for (out, x) in coeffs.iter_mut().zip(gj) {
                *out += &c * x;
            }
        }
        Ok(Self {
            algebra: Arc::clone(&self.algebra),
            base: (0, 0),
            coeffs,
        })
    }

    /// JSON terms: exponents, token counts by class label, and `"p/q"`
    /// coefficients.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms()
            .into_iter()
            .map(|(p, q, k, c)| {
                let tokens: serde_json::Map<String, serde_json::Value> = self
                    .algebra
                    .classes
                    .iter()
                    .zip(&self.algebra.digits[k])
                    .filter(|&(_, &n)| n > 0)
                    .map(|(cl, &n)| (cl.label.clone(), serde_json::Value::from(n)))
                    .collect();
                serde_json::json!({ "x": p, "y": q, "tokens": tokens, "coeff": rational_to_string(&c) })
            })
            .collect();
        serde_json::Value::Array(terms)
    }
}

impl fmt::Display for TruncatedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        for (p, q, k, c) in terms {
            let mut s = rational_to_string(&c);
            for (cl, &n) in self.algebra.classes.iter().zip(&self.algebra.digits[k]) {
                match n {
                    0 => {}
                    1 => s.push_str(&format!("·{}", cl.label)),
                    _ => s.push_str(&format!("·e{n}({})", cl.label)),
                }
            }
            if p != 0 {
                s.push_str(&format!("·x^{p}"));
            }
            if q != 0 {
                s.push_str(&format!("·y^{q}"));
            }
            parts.push(s);
        }
        f.write_str(&parts.join(" + "))
    }
}

/// `θ_{(a,b),f}` for a primitive direction `(a, b)` with `a, b ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct WallAutomorphism {
    direction: (i64, i64),
    f: TruncatedElement,
}

impl WallAutomorphism {
    /// Checks primitivity, that `f` is `1` plus terms in positive powers
    /// of `x^a y^b`.
    pub fn new(direction: (i64, i64), f: TruncatedElement) -> Result<Self> {
        let (a, b) = direction;
        if a < 0 || b < 0 || a.gcd(&b) != 1 {
            return Err(Error::InvalidArgument(format!(
                "direction ({a},{b}) is not primitive"
            )));
        }
        f.nilpotent_part()?;
        for (p, q, k, _) in f.terms() {
            if k == 0 {
                continue;
            }
            if p * b != q * a {
                return Err(Error::InvalidArgument(format!(
                    "term x^{p} y^{q} does not lie on direction ({a},{b})"
                )));
            }
        }
        Ok(Self { direction, f })
    }

    pub fn direction(&self) -> (i64, i64) {
        self.direction
    }

    pub fn function(&self) -> &TruncatedElement {
        &self.f
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(Self {
            direction: self.direction,
            f: self.f.pow(-1)?,
        })
    }

    /// `x^p y^q E_k ↦ x^p y^q E_k f^{aq−bp}`, expanded as
    /// `Σ_j g^j · Σ_k binom(aq−bp, j) c_k E_k` with `g = f − 1`.
    pub fn apply(&self, e: &TruncatedElement) -> Result<TruncatedElement> {
        if !Arc::ptr_eq(&self.f.algebra, &e.algebra) {
            return Err(Error::InvalidArgument(
                "elements of different token algebras".into(),
            ));
        }
        let alg = &e.algebra;
        let g = self.f.nilpotent_part()?;
        let (a, b) = self.direction;
        let mut out = vec![Rational::zero(); alg.len];
        let exponents: Vec<i64> = (0..alg.len)
            .map(|k| {
                let (p, q) = alg.exps[k];
                a * (e.base.1 + q) - b * (e.base.0 + p)
            })
            .collect();
        for (j, gj) in self.f.powers(&g).iter().enumerate() {
            let s: Vec<Rational> = (0..alg.len)
                .map(|k| {
                    if e.coeffs[k].is_zero() {
                        Rational::zero()
                    } else {
                        &e.coeffs[k]
                            * Rational::from_integer(general_binomial(exponents[k], j as u32))
                    }
                })
                .collect();
            if s.iter().all(Zero::is_zero) {
                continue;
            }
            for (o, x) in out.iter_mut().zip(alg.mul(gj, &s)) {
                *o += x;
            }
        }
        Ok(TruncatedElement {
            algebra: Arc::clone(alg),
            base: e.base,
            coeffs: out,
        })
    }

    /// `true` if `self` comes strictly before `o` in decreasing slope order.
    pub fn steeper_than(&self, o: &Self) -> bool {
        steeper(self.direction, o.direction)
    }
}

/// Slope `b/a` of the first direction exceeds that of the second.
fn steeper(d1: (i64, i64), d2: (i64, i64)) -> bool {
    d1.1 * d2.0 > d2.1 * d1.0
}

/// `(W_1 · … · W_m)(e) = W_1(W_2(… W_m(e)))`.
pub fn apply_product(ops: &[WallAutomorphism], e: &TruncatedElement) -> Result<TruncatedElement> {
    let mut cur = e.clone();
    for w in ops.iter().rev() {
        cur = w.apply(&cur)?;
    }
    Ok(cur)
}

/// Operators for the vertices of the support quiver of `r`: for each sink
/// of weight `w`, `θ_{(1,0), 1 + w·u x^w}`, then for each source of weight
/// `w`, `θ_{(0,1), 1 + w·v y^w}`, one token per vertex.
pub fn ks_operators(r: &Refinement) -> Result<Vec<WallAutomorphism>> {
    operators(&TokenAlgebra::for_refinement(r, false)?)
}

/// Like [`ks_operators`], with the operators of each token class merged
/// into `θ_{(1,0), ∏_s (1 + w·u_s x^w)}` (resp. sources).
pub fn ks_operators_grouped(r: &Refinement) -> Result<Vec<WallAutomorphism>> {
    operators(&TokenAlgebra::for_refinement(r, true)?)
}

fn operators(alg: &Arc<TokenAlgebra>) -> Result<Vec<WallAutomorphism>> {
    let mut out = Vec::new();
    for side in [Side::Sink, Side::Source] {
        for (c, class) in alg.classes.iter().enumerate() {
            if class.side != side {
                continue;
            }
            // ∏ (1 + w z_s) = Σ_k w^k e_k.
            let mut f = TruncatedElement::zero(alg);
            for k in 0..=class.size {
                f.coeffs[k as usize * alg.strides[c]] =
                    Rational::from_integer(BigInt::from(class.weight).pow(k));
            }
            let dir = match side {
                Side::Sink => (1, 0),
                Side::Source => (0, 1),
            };
            out.push(WallAutomorphism::new(dir, f)?);
        }
    }
    Ok(out)
}

/// Walls in strictly decreasing slope order.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderedFactorization {
    pub walls: Vec<WallAutomorphism>,
}

impl OrderedFactorization {
    pub fn wall(&self, direction: (i64, i64)) -> Option<&WallAutomorphism> {
        self.walls.iter().find(|w| w.direction == direction)
    }

    /// The product applied to `e`.
    pub fn recompose(&self, e: &TruncatedElement) -> Result<TruncatedElement> {
        apply_product(&self.walls, e)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.walls
                .iter()
                .map(|w| {
                    serde_json::json!({
                        "direction": [w.direction.0, w.direction.1],
                        "function": w.f.to_json(),
                    })
                })
                .collect(),
        )
    }
}

/// The slope-ordered factorization of the product `ops[0] · ops[1] · …`.
///
/// Keeps a candidate product `F`, computes the discrepancy `F^{−1}·I` on `x`
/// and `y`, reads its lowest-degree terms, and moves each term `c·E_k` with
/// exponent direction `(a,b)` into the wall of that primitive direction as
/// a factor `1 + c E_k`. Each pass clears one token degree.
pub fn factorize(ops: &[WallAutomorphism]) -> Result<OrderedFactorization> {
    let Some(first) = ops.first() else {
        return Ok(OrderedFactorization { walls: Vec::new() });
    };
    let alg = Arc::clone(&first.f.algebra);
    let x = TruncatedElement::x(&alg);
    let y = TruncatedElement::y(&alg);
    let target_x = apply_product(ops, &x)?;
    let target_y = apply_product(ops, &y)?;
    let mut walls: BTreeMap<(i64, i64), TruncatedElement> = BTreeMap::new();
    let max_degree: u32 = alg.classes.iter().map(|c| c.size).sum();
    for _ in 0..=max_degree + 1 {
        let current = sorted_walls(&walls)?;
        let inverses: Vec<WallAutomorphism> = current
            .iter()
            .map(WallAutomorphism::inverse)
            .collect::<Result<_>>()?;
        let mut dx = target_x.clone();
        let mut dy = target_y.clone();
        for w in &inverses {
            dx = w.apply(&dx)?;
            dy = w.apply(&dy)?;
        }
        let gx = dx.shift(-1, 0).sub(&TruncatedElement::one(&alg))?;
        let gy = dy.shift(0, -1).sub(&TruncatedElement::one(&alg))?;
        let low = match (gx.lowest_degree(), gy.lowest_degree()) {
            (None, None) => return Ok(OrderedFactorization { walls: current }),
            (a, b) => a.into_iter().chain(b).min().expect("some degree"),
        };
        for k in 0..alg.len {
            if alg.degree[k] != low {
                continue;
            }
            let (cx, cy) = (&gx.coeffs[k], &gy.coeffs[k]);
            if cx.is_zero() && cy.is_zero() {
                continue;
            }
            let (p, q) = alg.exps[k];
            let g = p.gcd(&q);
            let (a, b) = (p / g, q / g);
            let ra = Rational::from_integer(BigInt::from(a));
            let rb = Rational::from_integer(BigInt::from(b));
            if !(&ra * cx + &rb * cy).is_zero() {
                return Err(Error::Internal(format!(
                    "discrepancy term at x^{p} y^{q} is not a wall term"
                )));
            }
            let c = if a != 0 { cy / &ra } else { -(cx / &rb) };
            let factor =
                TruncatedElement::one(&alg).add(&TruncatedElement::monomial(&alg, (0, 0), k, c))?;
            let entry = walls
                .entry((a, b))
                .or_insert_with(|| TruncatedElement::one(&alg));
            *entry = entry.mul(&factor)?;
        }
    }
    Err(Error::Internal("factorization did not terminate".into()))
}

fn sorted_walls(walls: &BTreeMap<(i64, i64), TruncatedElement>) -> Result<Vec<WallAutomorphism>> {
    let mut out: Vec<WallAutomorphism> = walls
        .iter()
        .map(|(&d, f)| WallAutomorphism::new(d, f.clone()))
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| {
        if steeper(a.direction, b.direction) {
            std::cmp::Ordering::Less
        } else if steeper(b.direction, a.direction) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    Ok(out)
}

/// The tropical count of `r` read from a factorization of its operators:
/// the coefficient of the product of all tokens in `log f` on the wall of
/// direction `(e, d)/g`, divided by `g = gcd(e, d)`, where `e` and `d` are
/// the total sink and source weights. Also checks that the wall's action on `x` and `y` carries the
/// same coefficient scaled by `−b` and `a`.
pub fn extract_n_trop(fact: &OrderedFactorization, r: &Refinement) -> Result<BigInt> {
    let Some(first) = fact.walls.first() else {
        return Ok(BigInt::zero());
    };
    let alg = Arc::clone(&first.f.algebra);
    let full = alg.full_index();
    let (e, d) = alg.exps[full];
    let key = TropicalCountKey::of_refinement(r)?;
    if (e, d) != (key.w2.size() as i64, key.w1.size() as i64) {
        return Err(Error::InvalidArgument(
            "factorization does not belong to this refinement".into(),
        ));
    }
    let g = e.gcd(&d);
    let (a, b) = (e / g, d / g);
    let Some(wall) = fact.wall((a, b)) else {
        return Ok(BigInt::zero());
    };
    let n = wall.f.log()?.coeffs[full].clone();
    let x = TruncatedElement::x(&alg);
    let y = TruncatedElement::y(&alg);
    let on_x = wall.apply(&x)?.shift(-1, 0).log()?.coeffs[full].clone();
    let on_y = wall.apply(&y)?.shift(0, -1).log()?.coeffs[full].clone();
    let ra = Rational::from_integer(BigInt::from(a));
    let rb = Rational::from_integer(BigInt::from(b));
    if on_x != -(&rb * &n) || on_y != &ra * &n {
        return Err(Error::Internal(
            "wall action disagrees with its function".into(),
        ));
    }
    let n = n / Rational::from_integer(BigInt::from(g));
    if !n.is_integer() || n.is_negative() {
        return Err(Error::Internal(format!(
            "wall coefficient {n} is not a count"
        )));
    }
    Ok(n.to_integer())
}

/// Factorizes the operators of `r` and extracts its tropical count.
pub fn vertex_count(r: &Refinement, grouped: bool) -> Result<BigInt> {
    let ops = if grouped {
        ks_operators_grouped(r)?
    } else {
        ks_operators(r)?
    };
    extract_n_trop(&factorize(&ops)?, r)
}

/// The degeneration sum of `(P₁, P₂)` with each refinement's count taken
/// from the vertex group (grouped tokens).
pub fn vertex_total(p1: &[u32], p2: &[u32]) -> Result<BigInt> {
    let (a, b): (u32, u32) = (p1.iter().sum(), p2.iter().sum());
    if a.gcd(&b) != 1 {
        return Err(Error::NotCoprimeSizes(a, b));
    }
    let mut cache: BTreeMap<TropicalCountKey, BigInt> = BTreeMap::new();
    let mut total = Rational::zero();
    for r in refinements(p1, p2)? {
        let key = TropicalCountKey::of_refinement(&r)?;
        let n = match cache.get(&key) {
            Some(n) => n.clone(),
            None => {
                let n = vertex_count(&r, true)?;
                cache.insert(key.clone(), n.clone());
                n
            }
        };
        let scale = Rational::new(n, key.w1.product() * key.w2.product());
        total += refinement_weight(&r, 1) * scale;
    }
    if !total.is_integer() {
        return Err(Error::Internal(format!(
            "vertex sum is not an integer: {total}"
        )));
    }
    Ok(total.to_integer())
}
