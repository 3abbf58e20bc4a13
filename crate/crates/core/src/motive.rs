//! Motivic classes of semistable loci via the Harder–Narasimhan recursion,
//! their Poincaré polynomials and Euler characteristics, and the
//! multiple-cover identities relating a quiver to its coverings.
//!
//! Classes live in the localization of the Grothendieck ring at `L` and
//! `Lⁿ − 1`, realized as rational functions in `L`.
//!
//! The recursion runs on point counts `[R^sst_d]`, which are integer
//! polynomials in `L`: for the first HN block `f` of `d` the stratum
//! contributes `∏_q binom(d_q, f_q)_L · L^{Σ_{a→b}(d−f)_a f_b} · [R^sst_f] · T(d−f, μ(f))`,
//! where `T(e, μ)` counts representations of dimension `e` whose HN slopes
//! are all below `μ`. Vertices interchangeable by a symmetry of the quiver
//! and stability ("twins") are exploited to sum over orbits only.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{int, IntPoly, Poly, Rational, RationalFunction};
use crate::quiver::{
    self, check_quiver, euler_form_raw, hat_quiver, DimVector, Quiver, Stability, VertexId,
};
use crate::symfunc::{factorial, multiplicity_vectors, partitions};

/// An element of the localized Grothendieck ring, as a reduced rational
/// function in `L`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MotiveClass(RationalFunction);

impl MotiveClass {
    pub fn new(f: RationalFunction) -> Self {
        Self(f)
    }

    pub fn zero() -> Self {
        Self(RationalFunction::zero())
    }

    pub fn one() -> Self {
        Self(RationalFunction::one())
    }

    /// `L^k`
    pub fn lefschetz_pow(k: i64) -> Self {
        Self(RationalFunction::var_pow(k))
    }

    pub fn from_int_poly(p: &IntPoly) -> Self {
        Self(RationalFunction::from_poly(p.to_poly()))
    }

    pub fn as_rational_function(&self) -> &RationalFunction {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self(&self.0 + &o.0)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self(&self.0 - &o.0)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self(&self.0 * &o.0)
    }

    pub fn div(&self, o: &Self) -> Self {
        Self(self.0.div(&o.0))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self(self.0.scale(c))
    }

    pub fn pow(&self, e: i64) -> Self {
        Self(self.0.pow(e))
    }

    /// True if the denominator divides `L^a ∏_n (Lⁿ − 1)^{b_n}`.
    pub fn is_in_localized_ring(&self) -> bool {
        let mut r = self.0.denom().clone();
        while r.degree().is_some_and(|d| d > 0) && r.coeff(0).is_zero() {
            r = r.div_exact(&Poly::var()).expect("divisible by L");
        }
        let deg = r.degree().unwrap_or(0);
        let bound = 2 * deg * deg + 2;
        for n in 1..=bound {
            if r.degree() == Some(0) {
                break;
            }
            let cyc = Poly::x_pow_minus_one(n);
            loop {
                let g = Poly::gcd(&r, &cyc);
                if g.degree() == Some(0) {
                    break;
                }
                r = r.div_exact(&g).expect("gcd divides");
            }
        }
        r.degree() == Some(0)
    }
}

impl fmt::Display for MotiveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.fmt_in("L"))
    }
}

fn require_positive(n: u32, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument(format!("{what} needs n >= 1")));
    }
    Ok(())
}

/// `[GL_n] = ∏_{i<n} (Lⁿ − Lⁱ)` as an integer polynomial.
pub fn gl_count(n: u32) -> IntPoly {
    let n = n as usize;
    (0..n).fold(IntPoly::one(), |acc, i| {
        let f = IntPoly::from_coeffs(
            (0..=n)
                .map(|k| {
                    if k == n {
                        BigInt::one()
                    } else if k == i {
                        -BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect(),
        );
        &acc * &f
    })
}

/// `[GL_n]`
pub fn gl_class(n: u32) -> Result<MotiveClass> {
    require_positive(n, "GL_n")?;
    Ok(MotiveClass::from_int_poly(&gl_count(n)))
}

/// `[G_m] = L − 1`
pub fn gm_class() -> MotiveClass {
    MotiveClass(RationalFunction::from_poly(Poly::from_ints(&[-1, 1])))
}

/// `[P^{n−1}] = (Lⁿ − 1)/(L − 1)`
pub fn proj_class(n: u32) -> Result<MotiveClass> {
    require_positive(n, "projective space P^(n-1)")?;
    Ok(MotiveClass::from_int_poly(&IntPoly::from_coeffs(
        vec![BigInt::one(); n as usize],
    )))
}

/// `[G_d] = ∏_q [GL_{d_q}]`
pub fn group_count(d: &[u32]) -> IntPoly {
    d.iter().fold(IntPoly::one(), |acc, &n| &acc * &gl_count(n))
}

/// An HN type: blocks summing to `d` with strictly decreasing slopes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HnType {
    pub parts: Vec<DimVector>,
}

/// All HN types of `d`, including the trivial one, in a fixed order.
pub fn hn_types(q: &Quiver, s: &Stability, d: &DimVector) -> Result<Vec<HnType>> {
    quiver::slope(s, q, d)?;
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    collect_types(q, s, d.as_slice(), None, &mut prefix, &mut out);
    Ok(out)
}

fn collect_types(
    q: &Quiver,
    s: &Stability,
    e: &[u32],
    bound: Option<&Rational>,
    prefix: &mut Vec<DimVector>,
    out: &mut Vec<HnType>,
) {
    if e.iter().all(|&x| x == 0) {
        out.push(HnType {
            parts: prefix.clone(),
        });
        return;
    }
    for f in subvectors(e) {
        if f.iter().all(|&x| x == 0) {
            continue;
        }
        let mu = s.slope_of(q, &f).expect("nonzero kappa");
        if bound.is_some_and(|b| &mu >= b) {
            continue;
        }
        let rest: Vec<u32> = e.iter().zip(&f).map(|(a, b)| a - b).collect();
        prefix.push(DimVector::new(f));
        collect_types(q, s, &rest, Some(&mu), prefix, out);
        prefix.pop();
    }
}

/// All `f` with `0 ≤ f ≤ e`, in lexicographic order.
pub(crate) fn subvectors(e: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::with_capacity(e.len())];
    for &x in e {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=x).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out
}

/// Slope as a reduced pair `(Θ, κ)` with `κ > 0`, compared exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Slope(i64, i64);

impl Slope {
    fn lt(self, o: Slope) -> bool {
        (self.0 as i128) * (o.1 as i128) < (o.0 as i128) * (self.1 as i128)
    }
}

/// Memoized HN recursion for one quiver and stability.
pub struct HnSolver<'a> {
    q: &'a Quiver,
    s: &'a Stability,
    /// Twin class of each vertex, as sorted position lists.
    classes: Vec<Vec<usize>>,
    sst: HashMap<Vec<u32>, IntPoly>,
    tail: HashMap<(Vec<u32>, Slope), IntPoly>,
    gauss: HashMap<(u32, u32), IntPoly>,
}

impl<'a> HnSolver<'a> {
    pub fn new(q: &'a Quiver, s: &'a Stability) -> Result<Self> {
        if s.theta.len() != q.vertex_count() {
            return Err(Error::DimensionMismatch {
                expected: q.vertex_count(),
                got: s.theta.len(),
            });
        }
        Ok(Self {
            q,
            s,
            classes: twin_classes(q, s),
            sst: HashMap::new(),
            tail: HashMap::new(),
            gauss: HashMap::new(),
        })
    }

    /// `[R^sst_d]`, an integer polynomial in `L`.
    pub fn sst_count(&mut self, d: &DimVector) -> Result<IntPoly> {
        if d.len() != self.q.vertex_count() {
            return Err(Error::DimensionMismatch {
                expected: self.q.vertex_count(),
                got: d.len(),
            });
        }
        if d.is_zero() {
            return Ok(IntPoly::one());
        }
        let c = self.canonical(d.as_slice().to_vec());
        Ok(self.sst_rec(&c))
    }

    /// `[R^sst_d]/[G_d]`.
    pub fn sst_class(&mut self, d: &DimVector) -> Result<MotiveClass> {
        let a = self.sst_count(d)?;
        Ok(MotiveClass(RationalFunction::new(
            a.to_poly(),
            group_count(d.as_slice()).to_poly(),
        )))
    }

    fn slope(&self, f: &[u32]) -> Slope {
        let t = self.s.theta_of(f);
        let k = self.s.kappa_of(self.q, f);
        let g = num_integer::gcd(t, k).max(1);
        Slope(t / g, k / g)
    }

    /// Sorts the entries inside each twin class.
    fn canonical(&self, mut d: Vec<u32>) -> Vec<u32> {
        for class in &self.classes {
            if class.len() > 1 {
                let mut vals: Vec<u32> = class.iter().map(|&v| d[v]).collect();
                vals.sort_unstable();
                for (&v, x) in class.iter().zip(vals) {
                    d[v] = x;
                }
            }
        }
        d
    }

    /// Orbit representatives of `{f : 0 ≤ f ≤ e}` under the twin symmetries
    /// fixing `e` (which must be canonical), with orbit sizes.
    fn orbit_reps(&self, e: &[u32]) -> Vec<(Vec<u32>, u64)> {
        let mut groups: Vec<(Vec<usize>, u32)> = Vec::new();
        for class in &self.classes {
            let mut k = 0;
            while k < class.len() {
                let v = e[class[k]];
                let mut group = Vec::new();
                while k < class.len() && e[class[k]] == v {
                    group.push(class[k]);
                    k += 1;
                }
                groups.push((group, v));
            }
        }
        let mut out = vec![(vec![0u32; e.len()], 1u64)];
        for (group, v) in &groups {
            let choices = multisets(group.len(), *v);
            let mut next = Vec::with_capacity(out.len() * choices.len());
            for (f, w) in &out {
                for (vals, mult) in &choices {
                    let mut g = f.clone();
                    for (&pos, &x) in group.iter().zip(vals) {
                        g[pos] = x;
                    }
                    next.push((g, w * mult));
                }
            }
            out = next;
        }
        out
    }

    fn gauss(&mut self, n: u32, k: u32) -> IntPoly {
        if k == 0 || k == n {
            return IntPoly::one();
        }
        if let Some(p) = self.gauss.get(&(n, k)) {
            return p.clone();
        }
        // [n,k] = [n−1,k−1] + L^k [n−1,k]
        let mut p = self.gauss(n - 1, k - 1);
        p.add_assign(&self.gauss(n - 1, k).shift(k as usize));
        self.gauss.insert((n, k), p.clone());
        p
    }

    /// `∏_q binom(e_q, f_q)_L · L^{Σ_{a→b} (e−f)_a f_b}`.
    fn extension_factor(&mut self, e: &[u32], f: &[u32]) -> IntPoly {
        let mut p = IntPoly::one();
        for (&x, &y) in e.iter().zip(f) {
            if y != 0 && y != x {
                p = &p * &self.gauss(x, y);
            }
        }
        let cross: u64 = self
            .q
            .arrows()
            .iter()
            .map(|&(a, b)| (e[a] - f[a]) as u64 * f[b] as u64)
            .sum();
        p.shift(cross as usize)
    }

    fn sst_rec(&mut self, d: &[u32]) -> IntPoly {
        if let Some(p) = self.sst.get(d) {
            return p.clone();
        }
        let dim_r: u64 = self
            .q
            .arrows()
            .iter()
            .map(|&(a, b)| d[a] as u64 * d[b] as u64)
            .sum();
        let mut total = IntPoly::monomial(BigInt::one(), dim_r as usize);
        for (f, weight) in self.orbit_reps(d) {
            if f.iter().all(|&x| x == 0) || f.as_slice() == d {
                continue;
            }
            let term = self.block_term(d, &f);
            total.sub_assign(&term.scale(&BigInt::from(weight)));
        }
        self.sst.insert(d.to_vec(), total.clone());
        total
    }

    /// Contribution of HN types of `e` whose first block is `f`.
    fn block_term(&mut self, e: &[u32], f: &[u32]) -> IntPoly {
        let mu = self.slope(f);
        let rest: Vec<u32> = e.iter().zip(f).map(|(a, b)| a - b).collect();
        let ext = self.extension_factor(e, f);
        let fc = self.canonical(f.to_vec());
        let head = self.sst_rec(&fc);
        if head.is_zero() {
            return IntPoly::zero();
        }
        let rc = self.canonical(rest);
        let tail = self.tail_rec(&rc, mu);
        &(&ext * &head) * &tail
    }

    /// `[G_e] · Σ` over HN types of `e` with all slopes `< μ`.
    fn tail_rec(&mut self, e: &[u32], mu: Slope) -> IntPoly {
        if e.iter().all(|&x| x == 0) {
            return IntPoly::one();
        }
        let key = (e.to_vec(), mu);
        if let Some(p) = self.tail.get(&key) {
            return p.clone();
        }
        let mut total = IntPoly::zero();
        for (f, weight) in self.orbit_reps(e) {
            if f.iter().all(|&x| x == 0) || !self.slope(&f).lt(mu) {
                continue;
            }
            let term = self.block_term(e, &f);
            total.add_assign(&term.scale(&BigInt::from(weight)));
        }
        self.tail.insert(key, total.clone());
        total
    }
}

/// All weakly increasing sequences of length `c` with entries in `0..=v`,
/// each with the number of distinct arrangements.
fn multisets(c: usize, v: u32) -> Vec<(Vec<u32>, u64)> {
    fn go(c: usize, lo: u32, v: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == c {
            out.push(prefix.clone());
            return;
        }
        for x in lo..=v {
            prefix.push(x);
            go(c, x, v, prefix, out);
            prefix.pop();
        }
    }
    let mut seqs = Vec::new();
    go(c, 0, v, &mut Vec::new(), &mut seqs);
    let total = factorial(c as u32);
    seqs.into_iter()
        .map(|s| {
            let mut denom = BigInt::one();
            let mut k = 0;
            while k < s.len() {
                let mut run = 1;
                while k + run < s.len() && s[k + run] == s[k] {
                    run += 1;
                }
                denom *= factorial(run as u32);
                k += run;
            }
            let mult: BigInt = &total / denom;
            (s, u64::try_from(mult).expect("orbit size fits"))
        })
        .collect()
}

/// Partition of the vertices into classes of pairwise interchangeable
/// vertices: equal `κ`-weight and `Θ`, and swapping them preserves the
/// arrow multiset.
fn twin_classes(q: &Quiver, s: &Stability) -> Vec<Vec<usize>> {
    let adj = q.adjacency();
    let n = q.vertex_count();
    let twins = |u: usize, v: usize| {
        s.kappa_weight(q, u) == s.kappa_weight(q, v)
            && s.theta[u] == s.theta[v]
            && adj[u][u] == adj[v][v]
            && adj[u][v] == adj[v][u]
            && (0..n)
                .filter(|&x| x != u && x != v)
                .all(|x| adj[u][x] == adj[v][x] && adj[x][u] == adj[x][v])
    };
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        if class_of[v] != usize::MAX {
            continue;
        }
        let mut class = vec![v];
        for u in v + 1..n {
            if class_of[u] == usize::MAX && twins(v, u) {
                class.push(u);
            }
        }
        for &u in &class {
            class_of[u] = classes.len();
        }
        classes.push(class);
    }
    classes
}

/// `[R^sst_d]/[G_d]`.
pub fn hn_sst_class(q: &Quiver, s: &Stability, d: &DimVector) -> Result<MotiveClass> {
    quiver::slope(s, q, d)?;
    HnSolver::new(q, s)?.sst_class(d)
}

/// True if no `0 < e < d` has `μ(e) = μ(d)`.
pub fn is_theta_coprime(q: &Quiver, s: &Stability, d: &DimVector) -> Result<bool> {
    let mu = quiver::slope(s, q, d)?;
    Ok(subvectors(d.as_slice()).into_iter().all(|e| {
        e.iter().all(|&x| x == 0)
            || e.as_slice() == d.as_slice()
            || s.slope_of(q, &e).as_ref() != Some(&mu)
    }))
}

/// Poincaré polynomial in `t` of the stable moduli space, from
/// `(L − 1) [R^sst_d]/[G_d]` at `L = t²`.
pub fn poincare(q: &Quiver, s: &Stability, d: &DimVector) -> Result<IntPoly> {
    let mut solver = HnSolver::new(q, s)?;
    poincare_with(&mut solver, d)
}

/// [`poincare`] reusing an existing solver.
pub fn poincare_with(solver: &mut HnSolver<'_>, d: &DimVector) -> Result<IntPoly> {
    if !is_theta_coprime(solver.q, solver.s, d)? {
        return Err(Error::NotCoprime);
    }
    let class = solver.sst_class(d)?;
    let scaled = class.mul(&gm_class());
    let p = scaled
        .as_rational_function()
        .as_poly()
        .ok_or_else(|| Error::Internal(format!("stable class is not a polynomial: {class}")))?;
    let ip = p
        .to_int_poly()
        .ok_or_else(|| Error::Internal(format!("stable class has fractional coefficients: {p}")))?;
    if ip.coeffs().iter().any(|c| c.is_negative()) {
        return Err(Error::Internal(format!(
            "stable class has negative coefficients: {p}"
        )));
    }
    let mut t = vec![BigInt::zero(); 2 * ip.coeffs().len()];
    for (k, c) in ip.coeffs().iter().enumerate() {
        t[2 * k] = c.clone();
    }
    Ok(IntPoly::from_coeffs(t))
}

/// Euler characteristic of the stable moduli space, `P(1)`.
pub fn euler_char(q: &Quiver, s: &Stability, d: &DimVector) -> Result<BigInt> {
    Ok(poincare(q, s, d)?.eval_i64(1))
}

/// Whether `P(t) = t^{2(1−⟨d,d⟩)} P(1/t)`.
pub fn satisfies_poincare_duality(q: &Quiver, p: &IntPoly, d: &DimVector) -> bool {
    if p.is_zero() {
        return true;
    }
    let dim = 2 * (1 - euler_form_raw(q, d.as_slice(), d.as_slice()));
    if dim < 0 || p.degree() != Some(dim as usize) {
        return false;
    }
    let c = p.coeffs();
    (0..c.len()).all(|k| c[k] == c[c.len() - 1 - k])
}

/// `∏_l (1/m_l!) ((−1)^{l−1} / (l [P^{l−1}]))^{m_l}`.
fn cover_weight(m: &[u32]) -> MotiveClass {
    let mut w = MotiveClass::one();
    for (idx, &c) in m.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let l = idx as u32 + 1;
        let sign = if l % 2 == 1 { int(1) } else { int(-1) };
        let base = proj_class(l)
            .expect("l >= 1")
            .scale(&int(l as i64))
            .pow(-1)
            .scale(&sign);
        w = w
            .mul(&base.pow(c as i64))
            .scale(&Rational::new(BigInt::one(), factorial(c)));
    }
    w
}

fn vertex_dim(q: &Quiver, i: &VertexId, d: &DimVector) -> Result<(usize, u32)> {
    let iv = q.index_of(i)?;
    if d.len() != q.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: q.vertex_count(),
            got: d.len(),
        });
    }
    let di = d.get(iv);
    if di == 0 {
        return Err(Error::InvalidArgument(format!("dimension at {i} is 0")));
    }
    Ok((iv, di))
}

fn cover_class(c: &quiver::Covering) -> Result<MotiveClass> {
    HnSolver::new(&c.quiver, &c.stability)?.sst_class(&c.dim)
}

/// Both sides of the motivic multiple-cover formula at vertex `i`:
/// `L^{binom(d_i,2)} [R^sst_d]/[G_d]` and
/// `Σ_{m ⊢ d_i} ∏_l (1/m_l!) ((−1)^{l−1}/(l [P^{l−1}]))^{m_l} [R^sst_{d̂(m)}]/[G_{d̂(m)}]`.
pub fn motivic_mps_sides(
    q: &Quiver,
    s: &Stability,
    i: &VertexId,
    d: &DimVector,
) -> Result<(MotiveClass, MotiveClass)> {
    let (_, di) = vertex_dim(q, i, d)?;
    let lhs = hn_sst_class(q, s, d)?.mul(&MotiveClass::lefschetz_pow(
        (di as i64) * (di as i64 - 1) / 2,
    ));
    let mut rhs = MotiveClass::zero();
    for m in multiplicity_vectors(di) {
        let c = hat_quiver(q, s, i, &m, d)?;
        rhs = rhs.add(&cover_weight(&m).mul(&cover_class(&c)?));
    }
    Ok((lhs, rhs))
}

pub fn motivic_mps_check(q: &Quiver, s: &Stability, i: &VertexId, d: &DimVector) -> Result<bool> {
    let (l, r) = motivic_mps_sides(q, s, i, d)?;
    Ok(l == r)
}

/// The partition form `Σ_{λ ⊢ d_i} ε_λ z_λ^{−1} ∏_j [P^{λ_j−1}]^{−1} [R^sst_{d̂(λ)}]/[G_{d̂(λ)}]`.
/// Checks every term against the multiplicity form and the total against
/// the left-hand side of the multiple-cover formula.
pub fn partition_form_check(
    q: &Quiver,
    s: &Stability,
    i: &VertexId,
    d: &DimVector,
) -> Result<bool> {
    let (_, di) = vertex_dim(q, i, d)?;
    let (lhs, _) = motivic_mps_sides(q, s, i, d)?;
    let mut total = MotiveClass::zero();
    for lambda in partitions(di) {
        let m = lambda.multiplicities();
        let mut w =
            MotiveClass::one().scale(&Rational::new(BigInt::from(lambda.sign()), lambda.z()));
        for &p in lambda.parts() {
            w = w.div(&proj_class(p)?);
        }
        if w != cover_weight(&m) {
            return Ok(false);
        }
        let c = hat_quiver(q, s, i, &m, d)?;
        total = total.add(&w.mul(&cover_class(&c)?));
    }
    Ok(total == lhs)
}

/// Both sides of the dual formula at vertex `i`:
/// `[P^{d_i−1}]^{−1} [R^sst]/[G]` on the hat quiver with a single copy of
/// level `d_i`, and
/// `(−1)^{d_i−1} d_i Σ_{λ ⊢ d_i} (−1)^{l(λ)−1} ((l(λ)−1)!/∏ m_l(λ)!) L^{Σ_j binom(λ_j,2)} [R^sst_{ď(λ)}]/[G_{ď(λ)}]`
/// on the level-one covering.
pub fn dual_mps_sides(
    q: &Quiver,
    s: &Stability,
    i: &VertexId,
    d: &DimVector,
) -> Result<(MotiveClass, MotiveClass)> {
    let (_, di) = vertex_dim(q, i, d)?;
    let mut single = vec![0u32; di as usize];
    single[di as usize - 1] = 1;
    let top = hat_quiver(q, s, i, &single, d)?;
    let lhs = cover_class(&top)?.div(&proj_class(di)?);

    let mut sum = MotiveClass::zero();
    for lambda in partitions(di) {
        let len = lambda.len() as u32;
        let denom: BigInt = lambda
            .multiplicities()
            .iter()
            .map(|&c| factorial(c))
            .product();
        let sign = if len % 2 == 1 { 1 } else { -1 };
        let coeff = Rational::new(factorial(len - 1) * sign, denom);
        let shift: i64 = lambda
            .parts()
            .iter()
            .map(|&p| (p as i64) * (p as i64 - 1) / 2)
            .sum();
        let c = check_quiver(q, s, i, &lambda, d)?;
        let term = cover_class(&c)?
            .mul(&MotiveClass::lefschetz_pow(shift))
            .scale(&coeff);
        sum = sum.add(&term);
    }
    let front = if di % 2 == 1 {
        int(di as i64)
    } else {
        int(-(di as i64))
    };
    Ok((lhs, sum.scale(&front)))
}

pub fn dual_mps_check(q: &Quiver, s: &Stability, i: &VertexId, d: &DimVector) -> Result<bool> {
    let (l, r) = dual_mps_sides(q, s, i, d)?;
    Ok(l == r)
}

/// Euler-characteristic form of the multiple-cover formula:
/// `Σ_{m ⊢ d_i} ∏_l (1/m_l!) ((−1)^{l−1}/l²)^{m_l} χ(Q̂, d̂(m))`.
/// Every covering dimension vector must be coprime.
pub fn euler_mps_sum(q: &Quiver, s: &Stability, i: &VertexId, d: &DimVector) -> Result<Rational> {
    let (_, di) = vertex_dim(q, i, d)?;
    let mut total = Rational::zero();
    for m in multiplicity_vectors(di) {
        let c = hat_quiver(q, s, i, &m, d)?;
        let chi = euler_char(&c.quiver, &c.stability, &c.dim)?;
        let mut w = Rational::one();
        for (idx, &k) in m.iter().enumerate() {
            let l = idx as i64 + 1;
            let base = Rational::new(
                BigInt::from(if l % 2 == 1 { 1 } else { -1 }),
                BigInt::from(l * l),
            );
            w *= num_traits::pow(base, k as usize) / Rational::from_integer(factorial(k));
        }
        total += w * Rational::from_integer(chi);
    }
    Ok(total)
}
