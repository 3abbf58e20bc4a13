//! Quivers with levels, dimension vectors, the Euler form, slope stability
//! and the covering quivers used by the multiple-cover formulas.
//!
//! Vertices are addressed by position internally; [`VertexId`] is the
//! external name. Covering constructions produce structured ids recording
//! the original vertex, the level and the copy index.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Rational;
use crate::symfunc::Partition;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexId {
    Named(String),
    /// Copy `copy` of `origin` carrying weight `level` in a covering quiver.
    Cover {
        origin: Box<VertexId>,
        level: u32,
        copy: u32,
    },
}

impl VertexId {
    pub fn named(s: impl Into<String>) -> Self {
        VertexId::Named(s.into())
    }

    pub fn cover(origin: &VertexId, level: u32, copy: u32) -> Self {
        VertexId::Cover {
            origin: Box::new(origin.clone()),
            level,
            copy,
        }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexId::Named(s) => f.write_str(s),
            VertexId::Cover {
                origin,
                level,
                copy,
            } => write!(f, "{origin}[{level}:{copy}]"),
        }
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId::Named(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub id: VertexId,
    pub level: u32,
}

/// A finite quiver with positive levels. Arrows form a multiset kept in
/// insertion order, so enumerations over arrows are reproducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<Vertex>,
    arrows: Vec<(usize, usize)>,
    index: HashMap<VertexId, usize>,
}

impl Quiver {
    pub fn new(vertices: Vec<Vertex>, arrows: Vec<(VertexId, VertexId)>) -> Result<Self> {
        let index = Self::build_index(&vertices)?;
        let lookup = |id: &VertexId| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| Error::UnknownVertex(id.to_string()))
        };
        let arrows = arrows
            .iter()
            .map(|(a, b)| Ok((lookup(a)?, lookup(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            vertices,
            arrows,
            index,
        })
    }

    /// Builds a quiver whose arrows are given by vertex positions.
    pub fn from_indices(vertices: Vec<Vertex>, arrows: Vec<(usize, usize)>) -> Result<Self> {
        let index = Self::build_index(&vertices)?;
        if let Some(&(a, b)) = arrows
            .iter()
            .find(|&&(a, b)| a >= vertices.len() || b >= vertices.len())
        {
            return Err(Error::UnknownVertex(format!("#{}", a.max(b))));
        }
        Ok(Self {
            vertices,
            arrows,
            index,
        })
    }

    fn build_index(vertices: &[Vertex]) -> Result<HashMap<VertexId, usize>> {
        let mut index = HashMap::with_capacity(vertices.len());
        for (k, v) in vertices.iter().enumerate() {
            if v.level == 0 {
                return Err(Error::ZeroLevel(v.id.to_string()));
            }
            if index.insert(v.id.clone(), k).is_some() {
                return Err(Error::DuplicateVertex(v.id.to_string()));
            }
        }
        Ok(index)
    }

    /// Convenience constructor from string ids.
    pub fn named(vertices: &[(&str, u32)], arrows: &[(&str, &str)]) -> Result<Self> {
        Self::new(
            vertices
                .iter()
                .map(|&(id, level)| Vertex {
                    id: id.into(),
                    level,
                })
                .collect(),
            arrows.iter().map(|&(a, b)| (a.into(), b.into())).collect(),
        )
    }

    /// Two vertices `1 -> 2` joined by `m` parallel arrows.
    pub fn kronecker(m: usize) -> Self {
        Self::named(&[("1", 1), ("2", 1)], &vec![("1", "2"); m]).expect("valid quiver")
    }

    /// Complete bipartite quiver with sources `i1..` and sinks `j1..`, one
    /// arrow from every source to every sink, all levels 1.
    pub fn complete_bipartite(sources: usize, sinks: usize) -> Self {
        let mut vertices = Vec::with_capacity(sources + sinks);
        for a in 1..=sources {
            vertices.push(Vertex {
                id: VertexId::Named(format!("i{a}")),
                level: 1,
            });
        }
        for b in 1..=sinks {
            vertices.push(Vertex {
                id: VertexId::Named(format!("j{b}")),
                level: 1,
            });
        }
        let arrows = (0..sources)
            .flat_map(|a| (0..sinks).map(move |b| (a, sources + b)))
            .collect();
        Self::from_indices(vertices, arrows).expect("valid quiver")
    }

    /// One vertex with one loop.
    pub fn jordan() -> Self {
        Self::named(&[("1", 1)], &[("1", "1")]).expect("valid quiver")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }

    pub fn id(&self, v: usize) -> &VertexId {
        &self.vertices[v].id
    }

    pub fn level(&self, v: usize) -> u32 {
        self.vertices[v].level
    }

    pub fn index_of(&self, id: &VertexId) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    /// Number of arrows `a -> b`.
    pub fn arrows_between(&self, a: usize, b: usize) -> usize {
        self.arrows.iter().filter(|&&e| e == (a, b)).count()
    }

    /// Arrow multiplicity matrix.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut m = vec![vec![0; n]; n];
        for &(a, b) in &self.arrows {
            m[a][b] += 1;
        }
        m
    }

    pub fn is_acyclic(&self) -> bool {
        let n = self.vertices.len();
        let mut indeg = vec![0usize; n];
        for &(_, b) in &self.arrows {
            indeg[b] += 1;
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &(a, b) in &self.arrows {
                if a == v {
                    indeg[b] -= 1;
                    if indeg[b] == 0 {
                        stack.push(b);
                    }
                }
            }
        }
        seen == n
    }

    /// Parses the JSON exchange format
    /// `{"vertices":[{"id":"a","level":1}],"arrows":[["a","b"]]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: QuiverFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(
            file.vertices
                .into_iter()
                .map(|v| Vertex {
                    id: VertexId::Named(v.id),
                    level: v.level,
                })
                .collect(),
            file.arrows
                .into_iter()
                .map(|(a, b)| (VertexId::Named(a), VertexId::Named(b)))
                .collect(),
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        let file = QuiverFile {
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexEntry {
                    id: v.id.to_string(),
                    level: v.level,
                })
                .collect(),
            arrows: self
                .arrows
                .iter()
                .map(|&(a, b)| (self.id(a).to_string(), self.id(b).to_string()))
                .collect(),
        };
        serde_json::to_value(file).expect("serializable")
    }
}

#[derive(Serialize, Deserialize)]
struct QuiverFile {
    vertices: Vec<VertexEntry>,
    arrows: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
struct VertexEntry {
    id: String,
    #[serde(default = "default_level")]
    level: u32,
}

fn default_level() -> u32 {
    1
}

/// Dimension vector, indexed by vertex position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DimVector(Vec<u32>);

impl DimVector {
    pub fn new(v: Vec<u32>) -> Self {
        Self(v)
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1; n])
    }

    /// Builds a dimension vector from a map; absent vertices get 0.
    pub fn from_map(q: &Quiver, map: &BTreeMap<VertexId, u32>) -> Result<Self> {
        let mut v = vec![0; q.vertex_count()];
        for (id, &d) in map {
            v[q.index_of(id)?] = d;
        }
        Ok(Self(v))
    }

    /// Accepts either a comma list in vertex order (`2,3`) or a JSON map
    /// (`{"1":2,"2":3}`).
    pub fn parse(q: &Quiver, text: &str) -> Result<Self> {
        let text = text.trim();
        if text.starts_with('{') {
            let map: BTreeMap<String, u32> =
                serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
            let map = map
                .into_iter()
                .map(|(k, v)| (VertexId::Named(k), v))
                .collect();
            return Self::from_map(q, &map);
        }
        let v = parse_list::<u32>(text)?;
        check_len(q, v.len())?;
        Ok(Self(v))
    }

    pub fn to_map(&self, q: &Quiver) -> BTreeMap<String, u32> {
        self.0
            .iter()
            .enumerate()
            .map(|(k, &d)| (q.id(k).to_string(), d))
            .collect()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: usize) -> u32 {
        self.0[v]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&d| d as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&d| d == 0)
    }
}

impl From<Vec<u32>> for DimVector {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

pub(crate) fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| Error::Parse(format!("bad list entry `{}`", s.trim())))
        })
        .collect()
}

fn check_len(q: &Quiver, got: usize) -> Result<()> {
    if got != q.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: q.vertex_count(),
            got,
        });
    }
    Ok(())
}

/// The linear form `Θ` together with the choice of `κ`: level-weighted
/// (`κ(d) = Σ l(q) d_q`) or total dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Stability {
    pub theta: Vec<i64>,
    pub kappa_from_levels: bool,
}

impl Stability {
    pub fn new(theta: Vec<i64>, kappa_from_levels: bool) -> Self {
        Self {
            theta,
            kappa_from_levels,
        }
    }

    /// Level-weighted `κ` (the default).
    pub fn with_levels(theta: Vec<i64>) -> Self {
        Self::new(theta, true)
    }

    /// Parses `Θ` as a comma list in vertex order or a JSON map.
    pub fn parse(q: &Quiver, text: &str, kappa_from_levels: bool) -> Result<Self> {
        let text = text.trim();
        let theta = if text.starts_with('{') {
            let map: BTreeMap<String, i64> =
                serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
            let mut theta = vec![0; q.vertex_count()];
            for (k, t) in map {
                theta[q.index_of(&VertexId::Named(k))?] = t;
            }
            theta
        } else {
            let theta = parse_list::<i64>(text)?;
            check_len(q, theta.len())?;
            theta
        };
        Ok(Self::new(theta, kappa_from_levels))
    }

    /// Weight of vertex `v` in `κ`.
    pub fn kappa_weight(&self, q: &Quiver, v: usize) -> u32 {
        if self.kappa_from_levels {
            q.level(v)
        } else {
            1
        }
    }

    pub fn theta_of(&self, d: &[u32]) -> i64 {
        self.theta.iter().zip(d).map(|(&t, &x)| t * x as i64).sum()
    }

    pub fn kappa_of(&self, q: &Quiver, d: &[u32]) -> i64 {
        d.iter()
            .enumerate()
            .map(|(v, &x)| self.kappa_weight(q, v) as i64 * x as i64)
            .sum()
    }

    /// Slope of a raw vector; `None` when `κ` vanishes.
    pub fn slope_of(&self, q: &Quiver, d: &[u32]) -> Option<Rational> {
        let k = self.kappa_of(q, d);
        (k != 0).then(|| BigRational::new(BigInt::from(self.theta_of(d)), BigInt::from(k)))
    }
}

/// `⟨d,e⟩ = Σ d_i e_i − Σ_{i→j} d_i e_j`.
pub fn euler_form(q: &Quiver, d: &DimVector, e: &DimVector) -> Result<i64> {
    check_len(q, d.len())?;
    check_len(q, e.len())?;
    Ok(euler_form_raw(q, d.as_slice(), e.as_slice()))
}

pub(crate) fn euler_form_raw(q: &Quiver, d: &[u32], e: &[u32]) -> i64 {
    let diag: i64 = d.iter().zip(e).map(|(&a, &b)| a as i64 * b as i64).sum();
    let off: i64 = q
        .arrows
        .iter()
        .map(|&(a, b)| d[a] as i64 * e[b] as i64)
        .sum();
    diag - off
}

/// `{d,e} = ⟨d,e⟩ − ⟨e,d⟩`.
pub fn antisymmetric_form(q: &Quiver, d: &DimVector, e: &DimVector) -> Result<i64> {
    Ok(euler_form(q, d, e)? - euler_form(q, e, d)?)
}

/// `μ(d) = Θ(d)/κ(d)`.
pub fn slope(s: &Stability, q: &Quiver, d: &DimVector) -> Result<Rational> {
    check_len(q, d.len())?;
    if s.theta.len() != q.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: q.vertex_count(),
            got: s.theta.len(),
        });
    }
    if d.is_zero() {
        return Err(Error::ZeroDimension);
    }
    s.slope_of(q, d.as_slice()).ok_or(Error::ZeroDimension)
}

/// A covering quiver restricted to the support of a dimension vector,
/// together with the lifted dimension vector and stability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Covering {
    pub quiver: Quiver,
    pub dim: DimVector,
    pub stability: Stability,
}

/// Replaces vertex `i` by `m_l` copies of level `l` (for each `l`), each of
/// dimension 1. `m[l-1]` is the multiplicity of `l`, and `Σ l m_l = d_i`.
///
/// Arrows at `i` are repeated `l` times per copy; each loop at `i` becomes
/// `l l'` arrows between any two copies. The lifted stability is
/// `l Θ_i` on the copies, and `κ` is level-weighted so that slopes are
/// preserved.
pub fn hat_quiver(
    q: &Quiver,
    s: &Stability,
    i: &VertexId,
    m: &[u32],
    d: &DimVector,
) -> Result<Covering> {
    let iv = q.index_of(i)?;
    check_len(q, d.len())?;
    let weight: u32 = m.iter().enumerate().map(|(l, &c)| (l as u32 + 1) * c).sum();
    if weight != d.get(iv) {
        return Err(Error::InvalidArgument(format!(
            "multiplicity vector has weight {weight}, vertex {i} has dimension {}",
            d.get(iv)
        )));
    }
    let copies: Vec<(u32, u32)> = m
        .iter()
        .enumerate()
        .flat_map(|(l, &c)| (1..=c).map(move |k| (l as u32 + 1, k)))
        .collect();
    cover_vertex(q, s, iv, d, &copies, |c| c.0, |_| 1, |p, r| p.0 * r.0)
}

/// The level-one part of the hat quiver: vertex `i` is replaced by one
/// copy per part of `λ`, the `k`-th copy carrying dimension `λ_k`, with
/// `Θ_i` and level 1 relative to `i`.
pub fn check_quiver(
    q: &Quiver,
    s: &Stability,
    i: &VertexId,
    lambda: &Partition,
    d: &DimVector,
) -> Result<Covering> {
    let iv = q.index_of(i)?;
    check_len(q, d.len())?;
    if lambda.size() != d.get(iv) {
        return Err(Error::InvalidArgument(format!(
            "partition of {} does not match dimension {} at {i}",
            lambda.size(),
            d.get(iv)
        )));
    }
    let copies: Vec<(u32, u32)> = lambda
        .parts()
        .iter()
        .zip(1..)
        .map(|(&part, k)| (part, k))
        .collect();
    cover_vertex(q, s, iv, d, &copies, |_| 1, |c| c.0, |_, _| 1)
}

/// Shared construction for both coverings. Each copy is a pair
/// `(tag, copy index)`; the closures give the copy's level multiplier (which
/// also multiplies arrows at `i`), its dimension, and the number of arrows
/// between two copies per loop at `i`.
fn cover_vertex(
    q: &Quiver,
    s: &Stability,
    iv: usize,
    d: &DimVector,
    copies: &[(u32, u32)],
    level_of: impl Fn(&(u32, u32)) -> u32,
    dim_of: impl Fn(&(u32, u32)) -> u32,
    loop_mult: impl Fn(&(u32, u32), &(u32, u32)) -> u32,
) -> Result<Covering> {
    let origin = q.id(iv).clone();
    let mut vertices = Vec::new();
    let mut theta = Vec::new();
    let mut dim = Vec::new();
    let mut new_index = vec![usize::MAX; q.vertex_count()];
    let mut copy_index = Vec::new();
    for v in 0..q.vertex_count() {
        if v == iv {
            for c in copies {
                let mult = level_of(c);
                copy_index.push(vertices.len());
                vertices.push(Vertex {
                    id: VertexId::cover(&origin, mult, c.1),
                    level: mult * s.kappa_weight(q, iv),
                });
                theta.push(mult as i64 * s.theta[iv]);
                dim.push(dim_of(c));
            }
        } else {
            new_index[v] = vertices.len();
            vertices.push(Vertex {
                id: q.id(v).clone(),
                level: s.kappa_weight(q, v),
            });
            theta.push(s.theta[v]);
            dim.push(d.get(v));
        }
    }
    let mult = |c_pos: usize| level_of(&copies[c_pos]) as usize;
    let mut arrows = Vec::new();
    for &(a, b) in q.arrows() {
        match (a == iv, b == iv) {
            (false, false) => arrows.push((new_index[a], new_index[b])),
            (true, false) => {
                for (c_pos, &cv) in copy_index.iter().enumerate() {
                    arrows.extend(std::iter::repeat((cv, new_index[b])).take(mult(c_pos)));
                }
            }
            (false, true) => {
                for (c_pos, &cv) in copy_index.iter().enumerate() {
                    arrows.extend(std::iter::repeat((new_index[a], cv)).take(mult(c_pos)));
                }
            }
            (true, true) => {
                for (p_pos, &pv) in copy_index.iter().enumerate() {
                    for (r_pos, &rv) in copy_index.iter().enumerate() {
                        let k = loop_mult(&copies[p_pos], &copies[r_pos]) as usize;
                        arrows.extend(std::iter::repeat((pv, rv)).take(k));
                    }
                }
            }
        }
    }
    Ok(Covering {
        quiver: Quiver::from_indices(vertices, arrows)?,
        dim: DimVector(dim),
        stability: Stability::with_levels(theta),
    })
}

/// A refinement `(k¹,k²)`: for each part `j` of each side, the multiset of
/// weights `w ↦ k_{w,j}` it splits into.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Refinement {
    pub k1: Vec<BTreeMap<u32, u32>>,
    pub k2: Vec<BTreeMap<u32, u32>>,
}

impl Refinement {
    /// Drops zero counts; rejects weight 0.
    pub fn new(k1: Vec<BTreeMap<u32, u32>>, k2: Vec<BTreeMap<u32, u32>>) -> Result<Self> {
        let clean = |k: Vec<BTreeMap<u32, u32>>| -> Result<Vec<BTreeMap<u32, u32>>> {
            k.into_iter()
                .map(|m| {
                    if m.contains_key(&0) {
                        return Err(Error::InvalidArgument("refinement weight 0".into()));
                    }
                    Ok(m.into_iter().filter(|&(_, c)| c > 0).collect())
                })
                .collect()
        };
        Ok(Self {
            k1: clean(k1)?,
            k2: clean(k2)?,
        })
    }

    /// The trivial refinement: every part of weight `p` split into `p` ones.
    pub fn trivial(p1: &[u32], p2: &[u32]) -> Self {
        let side = |p: &[u32]| p.iter().map(|&x| BTreeMap::from([(1, x)])).collect();
        Self {
            k1: side(p1),
            k2: side(p2),
        }
    }

    /// Parses `"1+1;1,1,1"`: sides separated by `;`, parts by `,`, the
    /// weights inside a part by `+`.
    pub fn parse(text: &str) -> Result<Self> {
        let (a, b) = text
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("refinement `{text}` needs `;`")))?;
        let side = |s: &str| -> Result<Vec<BTreeMap<u32, u32>>> {
            if s.trim().is_empty() {
                return Ok(Vec::new());
            }
            s.split(',')
                .map(|part| {
                    let mut m = BTreeMap::new();
                    for w in part.split('+') {
                        let w: u32 = w
                            .trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad weight `{}`", w.trim())))?;
                        *m.entry(w).or_insert(0) += 1;
                    }
                    Ok(m)
                })
                .collect()
        };
        Self::new(side(a)?, side(b)?)
    }

    /// Part sizes `p_{ij} = Σ_w w k_{w,j}` of side 1 and side 2.
    pub fn parts(&self) -> (Vec<u32>, Vec<u32>) {
        let sum = |k: &[BTreeMap<u32, u32>]| {
            k.iter()
                .map(|m| m.iter().map(|(&w, &c)| w * c).sum())
                .collect()
        };
        (sum(&self.k1), sum(&self.k2))
    }

    /// `m_w(k) = Σ_j k_{w,j}` for one side.
    pub fn multiplicity(side: &[BTreeMap<u32, u32>], w: u32) -> u32 {
        side.iter().map(|m| m.get(&w).copied().unwrap_or(0)).sum()
    }

    /// The covering vertices of one side as `(weight, part index, copy)`,
    /// sorted by weight, then part, then copy.
    pub fn expand(side: &[BTreeMap<u32, u32>]) -> Vec<(u32, usize, u32)> {
        let mut out: Vec<(u32, usize, u32)> = side
            .iter()
            .enumerate()
            .flat_map(|(j, m)| {
                m.iter()
                    .flat_map(move |(&w, &c)| (1..=c).map(move |k| (w, j, k)))
            })
            .collect();
        out.sort();
        out
    }
}

impl fmt::Display for Refinement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |k: &[BTreeMap<u32, u32>]| {
            k.iter()
                .map(|m| {
                    m.iter()
                        .flat_map(|(&w, &c)| std::iter::repeat(w.to_string()).take(c as usize))
                        .collect::<Vec<_>>()
                        .join("+")
                })
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{};{}", side(&self.k1), side(&self.k2))
    }
}

/// The bipartite support quiver of a refinement: one source of level `w`
/// per weight-`w` piece on side 1, one sink per piece on side 2, and `w w'`
/// parallel arrows between a source of level `w` and a sink of level `w'`.
/// Dimension vector all ones; `Θ` is the level on sources and 0 on sinks.
pub fn n_support(r: &Refinement) -> Result<Covering> {
    let src = Refinement::expand(&r.k1);
    let snk = Refinement::expand(&r.k2);
    if src.is_empty() || snk.is_empty() {
        return Err(Error::InvalidArgument(
            "refinement must have pieces on both sides".into(),
        ));
    }
    let mut vertices = Vec::with_capacity(src.len() + snk.len());
    let mut theta = Vec::with_capacity(src.len() + snk.len());
    for &(w, j, k) in &src {
        vertices.push(Vertex {
            id: VertexId::cover(&VertexId::Named(format!("i{}", j + 1)), w, k),
            level: w,
        });
        theta.push(w as i64);
    }
    for &(w, j, k) in &snk {
        vertices.push(Vertex {
            id: VertexId::cover(&VertexId::Named(format!("j{}", j + 1)), w, k),
            level: w,
        });
        theta.push(0);
    }
    let mut arrows = Vec::new();
    for (a, &(w, _, _)) in src.iter().enumerate() {
        for (b, &(w2, _, _)) in snk.iter().enumerate() {
            arrows.extend(std::iter::repeat((a, src.len() + b)).take((w * w2) as usize));
        }
    }
    let n = vertices.len();
    Ok(Covering {
        quiver: Quiver::from_indices(vertices, arrows)?,
        dim: DimVector::ones(n),
        stability: Stability::with_levels(theta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use proptest::prelude::*;

    fn dv(v: &[u32]) -> DimVector {
        DimVector::new(v.to_vec())
    }

    #[test]
    fn euler_form_examples() {
        let k12 = Quiver::complete_bipartite(1, 2);
        assert_eq!(
            euler_form(&k12, &dv(&[1, 1, 1]), &dv(&[1, 1, 1])).unwrap(),
            1
        );
        let k3 = Quiver::kronecker(3);
        assert_eq!(euler_form(&k3, &dv(&[1, 1]), &dv(&[1, 1])).unwrap(), -1);
        let j = Quiver::jordan();
        assert_eq!(euler_form(&j, &dv(&[2]), &dv(&[2])).unwrap(), 0);
        assert!(matches!(
            euler_form(&j, &dv(&[2, 1]), &dv(&[2])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn slope_examples() {
        let q = Quiver::kronecker(1);
        let s = Stability::new(vec![1, 0], false);
        assert_eq!(slope(&s, &q, &dv(&[2, 3])).unwrap(), rat(2, 5));
        assert_eq!(slope(&s, &q, &dv(&[0, 0])), Err(Error::ZeroDimension));

        let r = Refinement::parse("2;1,1,1").unwrap();
        let c = n_support(&r).unwrap();
        assert_eq!(slope(&c.stability, &c.quiver, &c.dim).unwrap(), rat(2, 5));
    }

    #[test]
    fn unknown_vertex_is_rejected() {
        let q = Quiver::kronecker(1);
        let map = BTreeMap::from([(VertexId::named("7"), 1)]);
        assert_eq!(
            DimVector::from_map(&q, &map),
            Err(Error::UnknownVertex("7".into()))
        );
        assert!(Quiver::named(&[("a", 1)], &[("a", "b")]).is_err());
        assert!(Quiver::named(&[("a", 0)], &[]).is_err());
        assert!(Quiver::named(&[("a", 1), ("a", 1)], &[]).is_err());
    }

    #[test]
    fn hat_quiver_examples() {
        let q = Quiver::kronecker(1);
        let s = Stability::new(vec![1, 0], true);
        let src = VertexId::named("1");

        let c = hat_quiver(&q, &s, &src, &[2], &dv(&[2, 1])).unwrap();
        assert_eq!(c.quiver.vertex_count(), 3);
        assert_eq!(c.quiver.arrows().len(), 2);
        assert_eq!(c.dim, dv(&[1, 1, 1]));
        assert_eq!(c.stability.theta, vec![1, 1, 0]);

        let c = hat_quiver(&q, &s, &src, &[0, 1], &dv(&[2, 1])).unwrap();
        assert_eq!(c.quiver.vertex_count(), 2);
        assert_eq!(c.quiver.level(0), 2);
        assert_eq!(c.quiver.arrows_between(0, 1), 2);
        assert_eq!(c.stability.theta, vec![2, 0]);

        let j = Quiver::jordan();
        let c = hat_quiver(&j, &Stability::new(vec![0], true), &src, &[2], &dv(&[2])).unwrap();
        assert_eq!(c.quiver.vertex_count(), 2);
        assert_eq!(c.quiver.arrows().len(), 4);
        assert_eq!(c.quiver.adjacency(), vec![vec![1, 1], vec![1, 1]]);

        assert!(hat_quiver(&q, &s, &src, &[1], &dv(&[2, 1])).is_err());
    }

    #[test]
    fn check_quiver_examples() {
        let q = Quiver::kronecker(1);
        let s = Stability::new(vec![1, 0], true);
        let src = VertexId::named("1");

        let c = check_quiver(
            &q,
            &s,
            &src,
            &Partition::new(vec![2]).unwrap(),
            &dv(&[2, 1]),
        )
        .unwrap();
        assert_eq!(c.quiver.vertex_count(), 2);
        assert_eq!(c.dim, dv(&[2, 1]));
        assert_eq!(c.quiver.arrows().len(), 1);

        let c = check_quiver(
            &q,
            &s,
            &src,
            &Partition::new(vec![1, 1]).unwrap(),
            &dv(&[2, 1]),
        )
        .unwrap();
        assert_eq!(c.dim, dv(&[1, 1, 1]));
        assert!((0..3).all(|v| c.quiver.level(v) == 1));

        let c = check_quiver(
            &q,
            &s,
            &src,
            &Partition::new(vec![2, 1]).unwrap(),
            &dv(&[3, 1]),
        )
        .unwrap();
        assert_eq!(c.dim, dv(&[2, 1, 1]));

        assert!(check_quiver(
            &q,
            &s,
            &src,
            &Partition::new(vec![2]).unwrap(),
            &dv(&[3, 1])
        )
        .is_err());
    }

    #[test]
    fn n_support_examples() {
        let c = n_support(&Refinement::parse("2;1,1,1").unwrap()).unwrap();
        assert_eq!(c.quiver.vertex_count(), 4);
        assert_eq!(c.quiver.level(0), 2);
        assert_eq!(c.quiver.arrows().len(), 6);
        assert!((1..4).all(|b| c.quiver.arrows_between(0, b) == 2));

        let c = n_support(&Refinement::parse("1+1;1,1,1").unwrap()).unwrap();
        assert_eq!(
            c.quiver.adjacency(),
            Quiver::complete_bipartite(2, 3).adjacency()
        );

        let c = n_support(&Refinement::parse("1;2").unwrap()).unwrap();
        assert_eq!(c.quiver.level(1), 2);
        assert_eq!(c.quiver.arrows_between(0, 1), 2);

        assert!(n_support(&Refinement::parse(";1").unwrap()).is_err());
    }

    #[test]
    fn refinement_round_trip() {
        let r = Refinement::parse("1+1,2;1,1,1").unwrap();
        assert_eq!(r.to_string(), "1+1,2;1,1,1");
        assert_eq!(r.parts(), (vec![2, 2], vec![1, 1, 1]));
        assert_eq!(Refinement::multiplicity(&r.k1, 1), 2);
    }

    #[test]
    fn json_round_trip() {
        let text =
            r#"{"vertices":[{"id":"a","level":2},{"id":"b"}],"arrows":[["a","b"],["a","b"]]}"#;
        let q = Quiver::from_json(text).unwrap();
        assert_eq!(q.level(1), 1);
        assert_eq!(Quiver::from_json(&q.to_json().to_string()).unwrap(), q);
        assert!(Quiver::from_json(r#"{"vertices":[],"arrows":[["a","b"]]}"#).is_err());
    }

    fn small_quiver() -> impl Strategy<Value = Quiver> {
        (1usize..4)
            .prop_flat_map(|n| {
                (
                    Just(n),
                    prop::collection::vec(1u32..3, n),
                    prop::collection::vec((0..n, 0..n), 0..6),
                )
            })
            .prop_map(|(n, levels, arrows)| {
                let vertices = (0..n)
                    .map(|k| Vertex {
                        id: VertexId::Named(format!("v{k}")),
                        level: levels[k],
                    })
                    .collect();
                Quiver::from_indices(vertices, arrows).unwrap()
            })
    }

    fn split(total: u32, pick: &[u32]) -> Vec<u32> {
        // A multiplicity vector of weight `total` driven by `pick`.
        let mut m = vec![0u32; total as usize];
        let mut left = total;
        for &p in pick {
            if left == 0 {
                break;
            }
            let l = 1 + p % left;
            m[l as usize - 1] += 1;
            left -= l;
        }
        if left > 0 {
            m[0] += left;
        }
        m
    }

    proptest! {
        #![proptest_config(crate::test_support::proptest_config(256))]
        #[test]
        fn euler_form_is_bilinear(
            q in small_quiver(),
            raw in prop::collection::vec(0u32..4, 12),
        ) {
            let n = q.vertex_count();
            let d = dv(&raw[0..n]);
            let d2 = dv(&raw[4..4 + n]);
            let e = dv(&raw[8..8 + n]);
            let sum = dv(&(0..n).map(|k| d.get(k) + d2.get(k)).collect::<Vec<_>>());
            prop_assert_eq!(
                euler_form(&q, &sum, &e).unwrap(),
                euler_form(&q, &d, &e).unwrap() + euler_form(&q, &d2, &e).unwrap()
            );
            prop_assert_eq!(
                euler_form(&q, &e, &sum).unwrap(),
                euler_form(&q, &e, &d).unwrap() + euler_form(&q, &e, &d2).unwrap()
            );
        }

        #[test]
        fn hat_quiver_preserves_slope(
            q in small_quiver(),
            raw in prop::collection::vec(1u32..4, 4),
            theta in prop::collection::vec(-3i64..4, 4),
            pick in prop::collection::vec(0u32..5, 4),
            kappa_from_levels in any::<bool>(),
        ) {
            let n = q.vertex_count();
            let d = dv(&raw[0..n]);
            let s = Stability::new(theta[0..n].to_vec(), kappa_from_levels);
            let m = split(d.get(0), &pick);
            let c = hat_quiver(&q, &s, q.id(0), &m, &d).unwrap();
            prop_assert_eq!(slope(&s, &q, &d).unwrap(), slope(&c.stability, &c.quiver, &c.dim).unwrap());
        }

        #[test]
        fn hat_quiver_shifts_euler_form_by_product(
            q in small_quiver(),
            raw in prop::collection::vec(0u32..4, 8),
            pick in prop::collection::vec(0u32..5, 8),
        ) {
            let n = q.vertex_count();
            let mut dl = raw[0..n].to_vec();
            let mut dk = raw[4..4 + n].to_vec();
            dl[0] = dl[0].max(1);
            dk[0] = dk[0].max(1);
            let ml = split(dl[0], &pick[0..4]);
            let mk = split(dk[0], &pick[4..8]);
            let len = ml.len().max(mk.len());
            let m: Vec<u32> = (0..len)
                .map(|l| ml.get(l).copied().unwrap_or(0) + mk.get(l).copied().unwrap_or(0))
                .collect();
            let d: Vec<u32> = (0..n).map(|v| dl[v] + dk[v]).collect();
            let s = Stability::with_levels(vec![0; n]);
            let c = hat_quiver(&q, &s, q.id(0), &m, &dv(&d)).unwrap();
            // Copies of level l: the first ml[l] go to the d^l side.
            let mut hl = Vec::new();
            let mut hk = Vec::new();
            for v in 0..c.quiver.vertex_count() {
                match c.quiver.id(v) {
                    VertexId::Cover { level, copy, .. } => {
                        let in_l = *copy <= ml.get(*level as usize - 1).copied().unwrap_or(0);
                        hl.push(in_l as u32);
                        hk.push(!in_l as u32);
                    }
                    VertexId::Named(name) => {
                        let orig = q.index_of(&VertexId::Named(name.clone())).unwrap();
                        hl.push(dl[orig]);
                        hk.push(dk[orig]);
                    }
                }
            }
            let lhs = euler_form(&q, &dv(&dl), &dv(&dk)).unwrap()
                - euler_form(&c.quiver, &dv(&hl), &dv(&hk)).unwrap();
            prop_assert_eq!(lhs, (dl[0] * dk[0]) as i64);
        }

        #[test]
        fn unit_weight_support_is_complete_bipartite(t1 in 1usize..5, t2 in 1usize..5) {
            let r = Refinement::trivial(&vec![1; t1], &vec![1; t2]);
            let c = n_support(&r).unwrap();
            prop_assert_eq!(c.quiver.adjacency(), Quiver::complete_bipartite(t1, t2).adjacency());
            prop_assert!((0..t1 + t2).all(|v| c.quiver.level(v) == 1));
        }
    }
}
