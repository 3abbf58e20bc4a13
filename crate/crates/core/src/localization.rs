//! Torus fixed points of thin representations: spanning trees of the
//! bipartite support quiver of a refinement, their stability, the glueing
//! construction, and the recursive construction of all fixed points of
//! dimension type `(d, d+1)`.
//!
//! A thin bipartite representation with all arrows nonzero is stable for
//! `Θ_l` exactly when every nonempty proper set of sources `I'` satisfies
//! `σ_{I'} · d > e · |I'|`, where `σ_{I'}` is the total level of the sinks
//! adjacent to `I'`, `|I'|` the total level of `I'`, and `d`, `e` the total
//! levels of all sources and sinks.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quiver::{n_support, Covering, Quiver, Refinement, Vertex, VertexId};

/// Calls `visit` with the arrow indices of every spanning tree of the
/// underlying undirected multigraph, by contraction and deletion along the
/// arrow list. Loops never occur in a tree; parallel arrows give distinct
/// trees.
pub fn for_each_spanning_tree(q: &Quiver, mut visit: impl FnMut(&[usize])) {
    let n = q.vertex_count();
    if n == 0 {
        return;
    }
    let arrows = q.arrows();
    let mut chosen = Vec::with_capacity(n - 1);
    let mut comp: Vec<usize> = (0..n).collect();
    search(arrows, n, 0, &mut comp, &mut chosen, &mut visit);
}

fn search(
    arrows: &[(usize, usize)],
    n: usize,
    k: usize,
    comp: &mut Vec<usize>,
    chosen: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if chosen.len() == n - 1 {
        visit(chosen);
        return;
    }
    if k == arrows.len() || !connected_with(arrows, n, comp, k) {
        return;
    }
    let (a, b) = arrows[k];
    let (ca, cb) = (comp[a], comp[b]);
    if ca != cb {
        // Contract: merge the two components.
        let saved = comp.clone();
        for c in comp.iter_mut() {
            if *c == cb {
                *c = ca;
            }
        }
        chosen.push(k);
        search(arrows, n, k + 1, comp, chosen, visit);
        chosen.pop();
        *comp = saved;
    }
    // Delete.
    search(arrows, n, k + 1, comp, chosen, visit);
}

/// Whether the current components become connected using arrows `k..`.
fn connected_with(arrows: &[(usize, usize)], n: usize, comp: &[usize], k: usize) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut groups = n;
    let union = |p: &mut Vec<usize>, a: usize, b: usize, groups: &mut usize| {
        let (ra, rb) = (find(p, a), find(p, b));
        if ra != rb {
            p[ra] = rb;
            *groups -= 1;
        }
    };
    for v in 0..n {
        union(&mut parent, v, comp[v], &mut groups);
    }
    for &(a, b) in &arrows[k..] {
        union(&mut parent, a, b, &mut groups);
        if groups == 1 {
            return true;
        }
    }
    groups == 1
}

/// A spanning tree of a support quiver, as a subset of its arrows.
#[derive(Clone, Debug)]
pub struct SpanningTree {
    pub support: Arc<Covering>,
    pub arrows: Vec<usize>,
}

impl SpanningTree {
    pub fn datum(&self) -> Datum {
        Datum::from_arrows(&self.support, &self.arrows)
    }
}

/// All spanning trees of the support quiver of `r`, in arrow-list order.
/// A disconnected support yields no trees.
pub fn spanning_trees(r: &Refinement) -> Result<Vec<SpanningTree>> {
    let support = Arc::new(n_support(r)?);
    let mut out = Vec::new();
    for_each_spanning_tree(&support.quiver, |t| {
        out.push(SpanningTree {
            support: Arc::clone(&support),
            arrows: t.to_vec(),
        })
    });
    Ok(out)
}

/// 1 if the tree is a stable fixed point, else 0.
pub fn stability_weight(t: &SpanningTree) -> u32 {
    StabilityTest::new(&t.support.quiver, &source_flags(&t.support), &t.arrows).stable() as u32
}

fn source_flags(c: &Covering) -> Vec<bool> {
    c.stability.theta.iter().map(|&t| t > 0).collect()
}

/// Number of stable spanning trees: the Euler characteristic of the stable
/// moduli space of the support quiver at the all-ones dimension vector.
pub fn chi_trees(r: &Refinement) -> Result<u64> {
    let support = n_support(r)?;
    let flags = source_flags(&support);
    let mut trees = Vec::new();
    for_each_spanning_tree(&support.quiver, |t| trees.push(t.to_vec()));
    Ok(trees
        .par_iter()
        .filter(|t| StabilityTest::new(&support.quiver, &flags, t).stable())
        .count() as u64)
}

/// Single-threaded [`chi_trees`].
pub fn chi_trees_sequential(r: &Refinement) -> Result<u64> {
    let support = n_support(r)?;
    let flags = source_flags(&support);
    let mut count = 0u64;
    for_each_spanning_tree(&support.quiver, |t| {
        if StabilityTest::new(&support.quiver, &flags, t).stable() {
            count += 1;
        }
    });
    Ok(count)
}

/// Neighbourhoods of sources in a thin bipartite representation given by
/// an arrow subset.
struct StabilityTest {
    source_levels: Vec<u64>,
    sink_levels: Vec<u64>,
    /// For each source, the bit set of adjacent sinks.
    neighbours: Vec<u128>,
}

impl StabilityTest {
    fn new(q: &Quiver, is_source: &[bool], arrows: &[usize]) -> Self {
        let mut src_pos = vec![usize::MAX; q.vertex_count()];
        let mut snk_pos = vec![usize::MAX; q.vertex_count()];
        let mut source_levels = Vec::new();
        let mut sink_levels = Vec::new();
        for v in 0..q.vertex_count() {
            if is_source[v] {
                src_pos[v] = source_levels.len();
                source_levels.push(q.level(v) as u64);
            } else {
                snk_pos[v] = sink_levels.len();
                sink_levels.push(q.level(v) as u64);
            }
        }
        assert!(
            sink_levels.len() <= 128 && source_levels.len() <= 24,
            "datum too large"
        );
        let mut neighbours = vec![0u128; source_levels.len()];
        for &k in arrows {
            let (a, b) = q.arrows()[k];
            neighbours[src_pos[a]] |= 1u128 << snk_pos[b];
        }
        Self {
            source_levels,
            sink_levels,
            neighbours,
        }
    }

    /// Checks `σ_{I'} d ≥ e |I'|` (or `>` when `strict`) for every nonempty
    /// proper source subset, and that every sink has a neighbour.
    fn check(&self, strict: bool) -> bool {
        let d: u64 = self.source_levels.iter().sum();
        let e: u64 = self.sink_levels.iter().sum();
        let all = self.neighbours.iter().fold(0u128, |a, &m| a | m);
        if all.count_ones() as usize != self.sink_levels.len() && !self.source_levels.is_empty() {
            return false;
        }
        let s = self.source_levels.len();
        for mask in 1u32..(1u32 << s).saturating_sub(1) {
            let mut nb = 0u128;
            let mut size = 0u64;
            for k in 0..s {
                if mask >> k & 1 == 1 {
                    nb |= self.neighbours[k];
                    size += self.source_levels[k];
                }
            }
            let mut sigma = 0u64;
            let mut bits = nb;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                sigma += self.sink_levels[b];
                bits &= bits - 1;
            }
            let (lhs, rhs) = (sigma as u128 * d as u128, e as u128 * size as u128);
            if lhs < rhs || (strict && lhs == rhs) {
                return false;
            }
        }
        true
    }

    fn stable(&self) -> bool {
        self.check(true)
    }

    fn semistable(&self) -> bool {
        self.check(false)
    }
}

/// A thin bipartite representation with all arrows nonzero: a quiver, the
/// source/sink split, and implicitly the all-ones dimension vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Datum {
    pub quiver: Quiver,
    pub is_source: Vec<bool>,
}

impl Datum {
    pub fn new(quiver: Quiver, is_source: Vec<bool>) -> Result<Self> {
        if is_source.len() != quiver.vertex_count() {
            return Err(Error::DimensionMismatch {
                expected: quiver.vertex_count(),
                got: is_source.len(),
            });
        }
        if quiver
            .arrows()
            .iter()
            .any(|&(a, b)| !is_source[a] || is_source[b])
        {
            return Err(Error::InvalidArgument(
                "arrows must run from sources to sinks".into(),
            ));
        }
        Ok(Self { quiver, is_source })
    }

    /// The sub-datum of a support quiver on all its vertices and the given
    /// arrows.
    pub fn from_arrows(support: &Covering, arrows: &[usize]) -> Self {
        let q = &support.quiver;
        let quiver = Quiver::from_indices(
            q.vertices().to_vec(),
            arrows.iter().map(|&k| q.arrows()[k]).collect(),
        )
        .expect("valid sub-quiver");
        Self {
            quiver,
            is_source: source_flags(support),
        }
    }

    /// Builds a datum from ids; vertices are `(id, level, is_source)`.
    pub fn from_ids(
        vertices: &[(VertexId, u32, bool)],
        arrows: &[(VertexId, VertexId)],
    ) -> Result<Self> {
        let quiver = Quiver::new(
            vertices
                .iter()
                .map(|(id, level, _)| Vertex {
                    id: id.clone(),
                    level: *level,
                })
                .collect(),
            arrows.to_vec(),
        )?;
        Self::new(quiver, vertices.iter().map(|v| v.2).collect())
    }

    /// `(d, e)`: total level of sources and of sinks.
    pub fn dim_type(&self) -> (u32, u32) {
        let mut d = 0;
        let mut e = 0;
        for v in 0..self.quiver.vertex_count() {
            if self.is_source[v] {
                d += self.quiver.level(v);
            } else {
                e += self.quiver.level(v);
            }
        }
        (d, e)
    }

    fn test(&self) -> StabilityTest {
        let all: Vec<usize> = (0..self.quiver.arrows().len()).collect();
        StabilityTest::new(&self.quiver, &self.is_source, &all)
    }

    pub fn is_stable(&self) -> bool {
        self.test().stable()
    }

    pub fn is_semistable(&self) -> bool {
        self.test().semistable()
    }

    pub fn is_tree(&self) -> bool {
        let n = self.quiver.vertex_count();
        if self.quiver.arrows().len() + 1 != n {
            return false;
        }
        let mut found = false;
        for_each_spanning_tree(&self.quiver, |_| found = true);
        found
    }

    /// Vertex records `(id, level, is_source)` in stored order.
    pub fn vertex_records(&self) -> Vec<(VertexId, u32, bool)> {
        (0..self.quiver.vertex_count())
            .map(|v| {
                (
                    self.quiver.id(v).clone(),
                    self.quiver.level(v),
                    self.is_source[v],
                )
            })
            .collect()
    }

    /// Arrows as sorted id pairs (with multiplicity).
    pub fn arrow_ids(&self) -> Vec<(VertexId, VertexId)> {
        let mut a: Vec<(VertexId, VertexId)> = self
            .quiver
            .arrows()
            .iter()
            .map(|&(x, y)| (self.quiver.id(x).clone(), self.quiver.id(y).clone()))
            .collect();
        a.sort();
        a
    }

    /// Neighbouring sinks of each source, by id.
    pub fn neighbours(&self) -> BTreeMap<VertexId, Vec<VertexId>> {
        let mut out: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for v in 0..self.quiver.vertex_count() {
            if self.is_source[v] {
                out.insert(self.quiver.id(v).clone(), Vec::new());
            }
        }
        for (a, b) in self.arrow_ids() {
            out.get_mut(&a).expect("source").push(b);
        }
        out
    }

    /// The same datum with vertices and arrows in sorted order, so that
    /// equal data compare equal.
    pub fn canonical(&self) -> Self {
        let mut records = self.vertex_records();
        records.sort_by(|a, b| (!a.2, &a.0).cmp(&(!b.2, &b.0)));
        Self::from_ids(&records, &self.arrow_ids()).expect("same vertices")
    }

    /// Union of data on shared vertex ids (levels and roles must agree).
    pub fn union(parts: &[Datum]) -> Result<Self> {
        let mut records: BTreeMap<VertexId, (u32, bool)> = BTreeMap::new();
        let mut arrows = Vec::new();
        for p in parts {
            for (id, level, src) in p.vertex_records() {
                if let Some(&old) = records.get(&id) {
                    if old != (level, src) {
                        return Err(Error::InvalidArgument(format!(
                            "vertex {id} appears with different roles"
                        )));
                    }
                }
                records.insert(id, (level, src));
            }
            arrows.extend(p.arrow_ids());
        }
        let records: Vec<(VertexId, u32, bool)> =
            records.into_iter().map(|(id, (l, s))| (id, l, s)).collect();
        Ok(Self::from_ids(&records, &arrows)?.canonical())
    }
}

/// The result of glueing: the components, the new sink, and the glued datum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluedTuple {
    pub components: Vec<Datum>,
    pub sink: VertexId,
    pub sink_level: u32,
    pub glued: Datum,
}

/// Whether `(d_i, e_i)` is a `w`-admissible decomposition: `d_i ≥ 1`,
/// slopes `e_i/d_i` weakly increasing, and
/// `(w + Σ_{i≤k} e_i)/Σ_{i≤k} d_i > e_{k+1}/d_{k+1}` for every `k`.
pub fn is_admissible(parts: &[(u32, u32)], w: u32) -> bool {
    if parts.is_empty() || parts.iter().any(|&(d, _)| d == 0) {
        return false;
    }
    let (mut sd, mut se) = (0u64, w as u64);
    for (k, &(d, e)) in parts.iter().enumerate() {
        let (d, e) = (d as u64, e as u64);
        if k > 0 {
            let (pd, pe) = (parts[k - 1].0 as u64, parts[k - 1].1 as u64);
            if pe * d > e * pd {
                return false;
            }
            if se * d <= e * sd {
                return false;
            }
        }
        sd += d;
        se += e;
    }
    true
}

/// All `w`-admissible decompositions of `(d, e)` (with `Σ d_i = d` and
/// `w + Σ e_i = e`), in lexicographic order.
pub fn admissible_decompositions(d: u32, e: u32, w: u32) -> Vec<Vec<(u32, u32)>> {
    let mut out = Vec::new();
    if d == 0 || w == 0 || e < w {
        return out;
    }
    fn go(
        left_d: u32,
        left_e: u32,
        w: u32,
        prefix: &mut Vec<(u32, u32)>,
        out: &mut Vec<Vec<(u32, u32)>>,
    ) {
        if left_d == 0 {
            if left_e == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for di in 1..=left_d {
            for ei in 0..=left_e {
                prefix.push((di, ei));
                if is_admissible(prefix, w) {
                    go(left_d - di, left_e - ei, w, prefix, out);
                }
                prefix.pop();
            }
        }
    }
    go(d, e - w, w, &mut Vec::new(), &mut out);
    out
}

/// Glues semistable components along a new sink of level `w` receiving one
/// arrow from every component source, and checks that the result is stable.
pub fn glue(components: &[Datum], sink: VertexId, w: u32) -> Result<GluedTuple> {
    if w == 0 {
        return Err(Error::InvalidArgument("sink level must be positive".into()));
    }
    for (k, c) in components.iter().enumerate() {
        if !c.is_semistable() {
            return Err(Error::NotSemistable(k));
        }
    }
    let types: Vec<(u32, u32)> = components.iter().map(Datum::dim_type).collect();
    if !is_admissible(&types, w) {
        return Err(Error::NotAdmissible(w));
    }
    let mut records = Vec::new();
    let mut arrows = Vec::new();
    for c in components {
        for (id, level, src) in c.vertex_records() {
            if src {
                arrows.push((id.clone(), sink.clone()));
            }
            records.push((id, level, src));
        }
        arrows.extend(c.arrow_ids());
    }
    records.push((sink.clone(), w, false));
    let glued = Datum::from_ids(&records, &arrows)?;
    if !glued.is_stable() {
        return Err(Error::Internal("glued datum is not stable".into()));
    }
    Ok(GluedTuple {
        components: components.to_vec(),
        sink,
        sink_level: w,
        glued,
    })
}

/// From a stable tree datum of type `(d−1, d)` (all levels 1), the `d²`
/// stable tree data of type `(d, d+1)` obtained by adding `new_source` and
/// `new_sink`:
///
/// * `d` data adding one arrow from `new_source` to a sink `j`;
/// * `2 binom(d,2)` data adding arrows to two sinks `j₁ ≠ j₂` and removing
///   the arrow of the `j₁`–`j₂` path incident to `j₁` or to `j₂`.
///
/// In each case exactly one source is left with a single neighbour, and
/// `new_sink` is attached to it.
pub fn dd1_extensions(
    base: &Datum,
    new_source: VertexId,
    new_sink: VertexId,
) -> Result<Vec<Datum>> {
    let (dm1, d) = base.dim_type();
    let unit = (0..base.quiver.vertex_count()).all(|v| base.quiver.level(v) == 1);
    if d != dm1 + 1 || !unit || !base.is_tree() || !base.is_stable() {
        return Err(Error::InvalidArgument(
            "base must be a stable tree of type (d-1, d) with unit levels".into(),
        ));
    }
    let sinks: Vec<VertexId> = base
        .vertex_records()
        .into_iter()
        .filter(|r| !r.2)
        .map(|r| r.0)
        .collect();
    let mut records = base.vertex_records();
    records.push((new_source.clone(), 1, true));
    records.push((new_sink.clone(), 1, false));
    let base_arrows = base.arrow_ids();

    let finish = |arrows: Vec<(VertexId, VertexId)>| -> Result<Datum> {
        let mut degree: BTreeMap<&VertexId, usize> = BTreeMap::new();
        for (a, _) in &arrows {
            *degree.entry(a).or_default() += 1;
        }
        let lonely: Vec<&VertexId> = degree
            .iter()
            .filter(|&(_, &k)| k == 1)
            .map(|(&v, _)| v)
            .collect();
        if lonely.len() != 1 {
            return Err(Error::Internal(format!(
                "expected one source with a single neighbour, found {}",
                lonely.len()
            )));
        }
        let mut arrows = arrows.clone();
        arrows.push((lonely[0].clone(), new_sink.clone()));
        let datum = Datum::from_ids(&records, &arrows)?.canonical();
        if !datum.is_stable() {
            return Err(Error::Internal("extension is not stable".into()));
        }
        Ok(datum)
    };

    let mut out = Vec::new();
    for j in &sinks {
        let mut arrows = base_arrows.clone();
        arrows.push((new_source.clone(), j.clone()));
        out.push(finish(arrows)?);
    }
    for (x, j1) in sinks.iter().enumerate() {
        for j2 in &sinks[x + 1..] {
            let path = tree_path(&base_arrows, j1, j2)
                .ok_or_else(|| Error::Internal("base is not connected".into()))?;
            let at_start = path.first().expect("path has arrows").clone();
            let at_end = path.last().expect("path has arrows").clone();
            for removed in [at_start, at_end] {
                let mut arrows: Vec<(VertexId, VertexId)> = base_arrows
                    .iter()
                    .filter(|&a| a != &removed)
                    .cloned()
                    .collect();
                arrows.push((new_source.clone(), j1.clone()));
                arrows.push((new_source.clone(), j2.clone()));
                out.push(finish(arrows)?);
            }
        }
    }
    Ok(out)
}

/// Arrows on the path between two vertices of a tree, in order from `from`.
fn tree_path(
    arrows: &[(VertexId, VertexId)],
    from: &VertexId,
    to: &VertexId,
) -> Option<Vec<(VertexId, VertexId)>> {
    fn dfs(
        arrows: &[(VertexId, VertexId)],
        at: &VertexId,
        to: &VertexId,
        used: &mut Vec<bool>,
        path: &mut Vec<(VertexId, VertexId)>,
    ) -> bool {
        if at == to {
            return true;
        }
        for (k, (a, b)) in arrows.iter().enumerate() {
            if used[k] || (a != at && b != at) {
                continue;
            }
            let next = if a == at { b } else { a };
            used[k] = true;
            path.push((a.clone(), b.clone()));
            if dfs(arrows, next, to, used, path) {
                return true;
            }
            path.pop();
            used[k] = false;
        }
        false
    }
    let mut path = Vec::new();
    let mut used = vec![false; arrows.len()];
    dfs(arrows, from, to, &mut used, &mut path).then_some(path)
}

/// One way of splitting the sources and non-glueing sinks of `K(d, d+1)`
/// into blocks of equal size, with the data it produces. `groups[k]` holds
/// the data built from the `k`-th choice of base data for the blocks.
#[derive(Clone, Debug)]
pub struct Dd1Decomposition {
    pub blocks: Vec<(Vec<VertexId>, Vec<VertexId>)>,
    pub groups: Vec<Vec<Datum>>,
}

impl Dd1Decomposition {
    /// `∏ d_i²` over the blocks.
    pub fn block_factor(&self) -> usize {
        self.blocks.iter().map(|(s, _)| s.len() * s.len()).product()
    }
}

/// Vertex ids of the support quiver of the trivial refinement `(1^d; 1^{d+1})`.
pub fn dd1_vertex_ids(d: usize) -> (Vec<VertexId>, Vec<VertexId>) {
    let side = |prefix: &str, n: usize| {
        (1..=n)
            .map(|k| VertexId::cover(&VertexId::Named(format!("{prefix}{k}")), 1, 1))
            .collect()
    };
    (side("i", d), side("j", d + 1))
}

/// All data produced by the recursive construction on `K(d, d+1)`, grouped
/// by decomposition `(0,1) + Σ (d_i, d_i)`. The last sink is the glueing
/// sink.
pub fn dd1_family(d: usize) -> Result<Vec<Dd1Decomposition>> {
    let (s, t) = dd1_vertex_ids(d);
    build_family(&s, &t)
}

/// Every datum of the construction on sources `s` and sinks `t`
/// (`|t| = |s| + 1`, last sink glueing), flattened.
fn build_all(s: &[VertexId], t: &[VertexId]) -> Result<Vec<Datum>> {
    Ok(build_family(s, t)?
        .into_iter()
        .flat_map(|dec| dec.groups.into_iter().flatten())
        .collect())
}

fn build_family(s: &[VertexId], t: &[VertexId]) -> Result<Vec<Dd1Decomposition>> {
    let glue_sink = t.last().expect("at least one sink").clone();
    if s.is_empty() {
        let lone = Datum::from_ids(&[(glue_sink.clone(), 1, false)], &[])?;
        return Ok(vec![Dd1Decomposition {
            blocks: Vec::new(),
            groups: vec![vec![lone]],
        }]);
    }
    let rest_sinks = &t[..t.len() - 1];
    let mut out = Vec::new();
    for blocks in equal_block_partitions(s, rest_sinks) {
        // Data of type (d_i, d_i + 1) for each block, per base choice.
        let mut per_block: Vec<Vec<Vec<Datum>>> = Vec::new();
        for (bs, bt) in &blocks {
            let top = bs.last().expect("nonempty block").clone();
            let bases = build_all(&bs[..bs.len() - 1], bt)?;
            let mut ext = Vec::new();
            for base in &bases {
                ext.push(dd1_extensions(base, top.clone(), glue_sink.clone())?);
            }
            per_block.push(ext);
        }
        let mut groups: Vec<Vec<Datum>> = Vec::new();
        for choice in product_indices(&per_block.iter().map(Vec::len).collect::<Vec<_>>()) {
            let chosen: Vec<&Vec<Datum>> = choice
                .iter()
                .enumerate()
                .map(|(b, &k)| &per_block[b][k])
                .collect();
            let mut group = Vec::new();
            for pick in product_indices(&chosen.iter().map(|g| g.len()).collect::<Vec<_>>()) {
                let parts: Vec<Datum> = pick
                    .iter()
                    .enumerate()
                    .map(|(b, &k)| chosen[b][k].clone())
                    .collect();
                group.push(Datum::union(&parts)?);
            }
            groups.push(group);
        }
        out.push(Dd1Decomposition { blocks, groups });
    }
    Ok(out)
}

/// Unordered splittings of `s` and `t` (equal sizes) into blocks
/// `(S_i, T_i)` with `|S_i| = |T_i| ≥ 1`. Blocks are listed by their
/// smallest source; ids within blocks keep input order.
fn equal_block_partitions(
    s: &[VertexId],
    t: &[VertexId],
) -> Vec<Vec<(Vec<VertexId>, Vec<VertexId>)>> {
    if s.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let first = &s[0];
    let others = &s[1..];
    for k in 0..=others.len() {
        for src_pick in combinations(others.len(), k) {
            let mut bs = vec![first.clone()];
            bs.extend(src_pick.iter().map(|&x| others[x].clone()));
            let rs: Vec<VertexId> = (0..others.len())
                .filter(|x| !src_pick.contains(x))
                .map(|x| others[x].clone())
                .collect();
            for snk_pick in combinations(t.len(), k + 1) {
                let bt: Vec<VertexId> = snk_pick.iter().map(|&x| t[x].clone()).collect();
                let rt: Vec<VertexId> = (0..t.len())
                    .filter(|x| !snk_pick.contains(x))
                    .map(|x| t[x].clone())
                    .collect();
                for mut rest in equal_block_partitions(&rs, &rt) {
                    rest.insert(0, (bs.clone(), bt.clone()));
                    out.push(rest);
                }
            }
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn product_indices(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..n).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out
}

/// Stable spanning trees of the support of `(1^d; 1^{d+1})` as canonical
/// data, by exhaustive enumeration.
pub fn dd1_brute_force(d: usize) -> Result<BTreeSet<Vec<(VertexId, VertexId)>>> {
    let r = Refinement::trivial(&vec![1; d], &vec![1; d + 1]);
    Ok(spanning_trees(&r)?
        .iter()
        .filter(|t| stability_weight(t) == 1)
        .map(|t| t.datum().arrow_ids())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(s: &str) -> Refinement {
        Refinement::parse(s).unwrap()
    }

    /// Spanning trees by testing every arrow subset of size `n − 1`.
    fn brute_force_tree_count(q: &Quiver) -> usize {
        let n = q.vertex_count();
        let m = q.arrows().len();
        let mut count = 0;
        for mask in 0u64..(1u64 << m) {
            if mask.count_ones() as usize != n - 1 {
                continue;
            }
            let mut comp: Vec<usize> = (0..n).collect();
            let mut ok = true;
            for k in 0..m {
                if mask >> k & 1 == 1 {
                    let (a, b) = q.arrows()[k];
                    let (ca, cb) = (comp[a], comp[b]);
                    if ca == cb {
                        ok = false;
                        break;
                    }
                    for c in comp.iter_mut() {
                        if *c == cb {
                            *c = ca;
                        }
                    }
                }
            }
            count += ok as usize;
        }
        count
    }

    #[test]
    fn spanning_tree_examples() {
        assert_eq!(spanning_trees(&r("2;1,1,1")).unwrap().len(), 8);
        assert_eq!(spanning_trees(&r("1+1;1,1,1")).unwrap().len(), 12);
        assert_eq!(spanning_trees(&r("1;1")).unwrap().len(), 1);
        for s in ["2;1,1,1", "1+1;1,1,1", "1+2;1,1,1", "1+1;2+1"] {
            let c = n_support(&r(s)).unwrap();
            assert_eq!(
                spanning_trees(&r(s)).unwrap().len(),
                brute_force_tree_count(&c.quiver),
                "{s}"
            );
        }
    }

    #[test]
    fn disconnected_quiver_has_no_trees() {
        let q = Quiver::named(&[("a", 1), ("b", 1), ("c", 1)], &[("a", "b")]).unwrap();
        let mut n = 0;
        for_each_spanning_tree(&q, |_| n += 1);
        assert_eq!(n, 0);
    }

    #[test]
    fn stability_weight_examples() {
        for t in spanning_trees(&r("2;1,1,1")).unwrap() {
            assert_eq!(stability_weight(&t), 1);
        }
        let trees = spanning_trees(&r("1+1;1,1,1")).unwrap();
        for t in &trees {
            let datum = t.datum();
            let degrees: Vec<usize> = datum.neighbours().values().map(Vec::len).collect();
            let expected = if degrees.contains(&1) { 0 } else { 1 };
            assert_eq!(stability_weight(t), expected, "{degrees:?}");
        }
        assert_eq!(trees.iter().map(stability_weight).sum::<u32>(), 6);
    }

    #[test]
    fn chi_trees_examples() {
        assert_eq!(chi_trees(&r("1+1;1,1,1")).unwrap(), 6);
        assert_eq!(chi_trees(&r("2;1,1,1,1,1")).unwrap(), 32);
        assert_eq!(chi_trees(&r("1;2")).unwrap(), 2);
    }

    #[test]
    fn parallel_count_matches_sequential() {
        for s in ["1+1;1,1,1", "1+1+1;1,1,1,1", "2+1;1,1,1,1,1", "1+1;2+1,1"] {
            assert_eq!(
                chi_trees(&r(s)).unwrap(),
                chi_trees_sequential(&r(s)).unwrap()
            );
        }
    }

    #[test]
    fn stable_trees_are_trees() {
        for t in spanning_trees(&r("1+1+1;1,1,1,1")).unwrap() {
            if stability_weight(&t) == 1 {
                let d = t.datum();
                assert!(d.is_tree());
                assert_eq!(d.quiver.arrows().len() + 1, d.quiver.vertex_count());
            }
        }
    }

    #[test]
    fn admissible_examples() {
        assert_eq!(
            admissible_decompositions(2, 3, 1),
            vec![vec![(1, 1), (1, 1)], vec![(2, 2)]]
        );
        assert_eq!(admissible_decompositions(2, 2, 1), vec![vec![(2, 1)]]);
        assert_eq!(admissible_decompositions(1, 1, 1), vec![vec![(1, 0)]]);
        assert!(!is_admissible(&[(1, 0), (1, 1)], 1));
        assert!(admissible_decompositions(0, 2, 1).is_empty());
    }

    fn star(source: &str, sinks: &[&str]) -> Datum {
        let mut v = vec![(VertexId::named(source), 1, true)];
        v.extend(sinks.iter().map(|s| (VertexId::named(*s), 1, false)));
        let a: Vec<(VertexId, VertexId)> = sinks
            .iter()
            .map(|s| (VertexId::named(source), VertexId::named(*s)))
            .collect();
        Datum::from_ids(&v, &a).unwrap()
    }

    #[test]
    fn glue_examples() {
        // Two stars of type (1, n) glued in a level-1 sink: type (2, 2n+1).
        for n in 1..4 {
            let a: Vec<String> = (0..n).map(|k| format!("a{k}")).collect();
            let b: Vec<String> = (0..n).map(|k| format!("b{k}")).collect();
            let a: Vec<&str> = a.iter().map(String::as_str).collect();
            let b: Vec<&str> = b.iter().map(String::as_str).collect();
            let g = glue(&[star("x", &a), star("y", &b)], VertexId::named("z"), 1).unwrap();
            assert_eq!(g.glued.dim_type(), (2, 2 * n as u32 + 1));
            assert!(g.glued.is_stable());
            assert!(g.glued.is_tree());
        }
        let lone = Datum::from_ids(&[(VertexId::named("x"), 1, true)], &[]).unwrap();
        let g = glue(&[lone], VertexId::named("z"), 1).unwrap();
        assert_eq!(g.glued.quiver.arrows().len(), 1);
        assert!(g.glued.is_stable());

        let g = glue(
            &[star("x", &["a"]), star("y", &["b"])],
            VertexId::named("z"),
            1,
        )
        .unwrap();
        assert_eq!(g.glued.dim_type(), (2, 3));
    }

    #[test]
    fn glue_rejects_bad_input() {
        // (1,2) then (1,0): slopes decrease.
        let lone = Datum::from_ids(&[(VertexId::named("y"), 1, true)], &[]).unwrap();
        assert_eq!(
            glue(
                &[star("x", &["a", "b"]), lone.clone()],
                VertexId::named("z"),
                1
            ),
            Err(Error::NotAdmissible(1))
        );
        // Not semistable: one source with no neighbour next to one with one.
        let v = [
            (VertexId::named("x"), 1, true),
            (VertexId::named("y"), 1, true),
            (VertexId::named("a"), 1, false),
        ];
        let bad = Datum::from_ids(&v, &[(VertexId::named("x"), VertexId::named("a"))]).unwrap();
        assert_eq!(
            glue(&[bad], VertexId::named("z"), 1),
            Err(Error::NotSemistable(0))
        );
    }

    #[test]
    fn dd1_extension_counts() {
        let (s, t) = dd1_vertex_ids(2);
        let empty = Datum::from_ids(&[(t[0].clone(), 1, false)], &[]).unwrap();
        let one = dd1_extensions(&empty, s[0].clone(), t[1].clone()).unwrap();
        assert_eq!(one.len(), 1);
        let two = dd1_extensions(&one[0], s[1].clone(), t[2].clone()).unwrap();
        assert_eq!(two.len(), 4);
        let distinct: BTreeSet<_> = two.iter().map(Datum::arrow_ids).collect();
        assert_eq!(distinct.len(), 4);
        assert!(dd1_extensions(&star("x", &["a"]), s[1].clone(), t[2].clone()).is_err());
    }

    #[test]
    fn dd1_family_small_cases() {
        let fam = dd1_family(2).unwrap();
        let sizes: Vec<(usize, usize)> = fam
            .iter()
            .map(|dec| (dec.blocks.len(), dec.groups.iter().map(Vec::len).sum()))
            .collect();
        // One block of size 2 gives 4; two pairings of single blocks give 1 each.
        assert_eq!(
            sizes
                .iter()
                .filter(|&&(b, _)| b == 1)
                .map(|&(_, n)| n)
                .sum::<usize>(),
            4
        );
        assert_eq!(
            sizes
                .iter()
                .filter(|&&(b, _)| b == 2)
                .map(|&(_, n)| n)
                .sum::<usize>(),
            2
        );
        let all: BTreeSet<_> = fam
            .iter()
            .flat_map(|dec| dec.groups.iter().flatten().map(Datum::arrow_ids))
            .collect();
        assert_eq!(all, dd1_brute_force(2).unwrap());
    }

    proptest! {
        #![proptest_config(crate::test_support::proptest_config(32))]
        #[test]
        fn glue_of_admissible_stars_is_stable(sizes in prop::collection::vec(0u32..3, 1..4), w in 1u32..3) {
            // Stars of type (1, e_i) sorted by e_i; admissibility decides.
            let mut sizes = sizes;
            sizes.sort_unstable();
            let comps: Vec<Datum> = sizes
                .iter()
                .enumerate()
                .map(|(k, &e)| {
                    let names: Vec<String> = (0..e).map(|x| format!("s{k}_{x}")).collect();
                    let names: Vec<&str> = names.iter().map(String::as_str).collect();
                    star(&format!("c{k}"), &names)
                })
                .collect();
            let types: Vec<(u32, u32)> = comps.iter().map(Datum::dim_type).collect();
            let res = glue(&comps, VertexId::named("z"), w);
            if is_admissible(&types, w) {
                prop_assert!(res.unwrap().glued.is_stable());
            } else {
                prop_assert_eq!(res.unwrap_err(), Error::NotAdmissible(w));
            }
        }
    }
}
