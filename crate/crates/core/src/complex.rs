//! Pure simplicial complexes over densely indexed vertices.
//!
//! A [`SimplicialComplex`] stores one sorted list of canonical (ascending)
//! simplices per dimension, a lookup table from simplex to index, and the
//! coface incidence from each `d`-simplex to the `(d+1)`-simplices containing
//! it. Orderings of simplices are never materialized; callers convert between
//! an ordered tuple and its canonical form with [`crate::combinatorics::sort_sign`].
//!
//! Input vertex labels are arbitrary `u64`s. They are relabeled to `0..N` in
//! ascending label order at build time and kept in a side table for I/O.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{factorial, subsets};
use crate::error::{Error, Result};

/// Dense vertex index inside one complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

/// A simplex given by its strictly increasing vertex list.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex(Vec<VertexId>);

impl Simplex {
    /// Sorts the vertices; rejects repeats and the empty list.
    pub fn new<I, V>(vertices: I) -> Result<Self>
    where
        I: IntoIterator<Item = V>,
        V: Into<VertexId>,
    {
        let mut v: Vec<VertexId> = vertices.into_iter().map(Into::into).collect();
        if v.is_empty() {
            return Err(Error::EmptyInput);
        }
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateVertex(w[0].0 as u64));
        }
        Ok(Simplex(v))
    }

    /// Caller guarantees `vertices` is strictly increasing and nonempty.
    pub(crate) fn from_sorted(vertices: Vec<VertexId>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex(vertices)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }

    /// Number of shared vertices.
    pub fn intersection_len(&self, other: &Simplex) -> usize {
        self.0.iter().filter(|v| other.contains(**v)).count()
    }

    /// The facet obtained by deleting the vertex in position `i`.
    pub fn facet(&self, i: usize) -> Simplex {
        let mut v = self.0.clone();
        v.remove(i);
        Simplex(v)
    }

    /// All facets in deletion order (`i = 0..=dim`). Empty for a vertex.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |i| self.facet(i))
    }

    /// `self ∪ {v}`; `None` if `v` is already present.
    pub fn with_vertex(&self, v: VertexId) -> Option<Simplex> {
        match self.0.binary_search(&v) {
            Ok(_) => None,
            Err(pos) => {
                let mut out = self.0.clone();
                out.insert(pos, v);
                Some(Simplex(out))
            }
        }
    }

    /// Union with a disjoint simplex.
    pub fn join(&self, other: &[VertexId]) -> Simplex {
        let mut v: Vec<VertexId> = self.0.iter().chain(other).copied().collect();
        v.sort_unstable();
        v.dedup();
        Simplex(v)
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", v.0)?;
        }
        f.write_str("}")
    }
}

/// `m(τ) = (n − k)! · #{σ ∈ X^(n) : τ ⊆ σ}` for a `k`-simplex `τ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Weight(pub u64);

/// An immutable, downward-closed simplicial complex.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    labels: Vec<u64>,
    levels: Vec<Vec<Simplex>>,
    lookup: Vec<HashMap<Simplex, usize>>,
    cofaces: Vec<Vec<Vec<usize>>>,
    /// `top_counts[d][i]`: number of top simplices containing simplex `i` of level `d`.
    top_counts: Vec<Vec<u64>>,
}

impl SimplicialComplex {
    /// Builds the downward closure of `maximal` (lists of vertex labels).
    ///
    /// The lists need not be maximal; any generating set works.
    pub fn build<I, S>(maximal: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u64]>,
    {
        let raw: Vec<Vec<u64>> = maximal.into_iter().map(|s| s.as_ref().to_vec()).collect();
        if raw.is_empty() || raw.iter().all(|s| s.is_empty()) {
            return Err(Error::EmptyInput);
        }
        for s in &raw {
            let mut sorted = s.clone();
            sorted.sort_unstable();
            if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateVertex(w[0]));
            }
        }
        let mut labels: Vec<u64> = raw.iter().flatten().copied().collect();
        labels.sort_unstable();
        labels.dedup();
        let index: HashMap<u64, u32> = labels.iter().enumerate().map(|(i, &l)| (l, i as u32)).collect();
        let generators = raw
            .into_iter()
            .filter(|s| !s.is_empty())
            .map(|s| Simplex::new(s.into_iter().map(|l| VertexId(index[&l]))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_generators(labels, generators))
    }

    /// Builds from simplices already over dense ids `0..n_vertices`; labels are the ids.
    pub fn from_dense(n_vertices: usize, generators: Vec<Simplex>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(s) = generators.iter().find(|s| s.vertices().iter().any(|v| v.index() >= n_vertices)) {
            return Err(Error::InvalidParameter(format!("simplex {s:?} exceeds vertex count {n_vertices}")));
        }
        let mut gens = generators;
        // make sure every vertex is present
        gens.extend((0..n_vertices as u32).map(|v| Simplex(vec![VertexId(v)])));
        Ok(Self::from_generators((0..n_vertices as u64).collect(), gens))
    }

    /// The complex with no vertices (only the empty simplex). Used for links of
    /// maximal simplices.
    pub fn void() -> Self {
        SimplicialComplex {
            labels: Vec::new(),
            levels: Vec::new(),
            lookup: Vec::new(),
            cofaces: Vec::new(),
            top_counts: Vec::new(),
        }
    }

    fn from_generators(labels: Vec<u64>, generators: Vec<Simplex>) -> Self {
        let top = generators.iter().map(Simplex::dim).max().unwrap_or(0);
        let mut sets: Vec<HashSet<Simplex>> = vec![HashSet::new(); top + 1];
        // Insert generators, then close downward level by level.
        for g in generators {
            let d = g.dim();
            sets[d].insert(g);
        }
        for d in (1..=top).rev() {
            let faces: Vec<Simplex> = sets[d].iter().flat_map(|s| s.facets().collect::<Vec<_>>()).collect();
            sets[d - 1].extend(faces);
        }
        let levels: Vec<Vec<Simplex>> = sets
            .into_iter()
            .map(|s| {
                let mut v: Vec<Simplex> = s.into_iter().collect();
                v.sort_unstable();
                v
            })
            .collect();
        let lookup: Vec<HashMap<Simplex, usize>> =
            levels.iter().map(|lvl| lvl.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect()).collect();
        let mut cofaces: Vec<Vec<Vec<usize>>> = levels.iter().map(|lvl| vec![Vec::new(); lvl.len()]).collect();
        for d in 1..=top {
            for (j, s) in levels[d].iter().enumerate() {
                for f in s.facets() {
                    let i = lookup[d - 1][&f];
                    cofaces[d - 1][i].push(j);
                }
            }
        }
        for lvl in cofaces.iter_mut() {
            for c in lvl.iter_mut() {
                c.sort_unstable();
            }
        }
        let mut top_counts: Vec<Vec<u64>> = levels.iter().map(|lvl| vec![0; lvl.len()]).collect();
        let patterns: Vec<Vec<Vec<usize>>> = (0..=top).map(|d| subsets(top + 1, d + 1)).collect();
        for s in &levels[top] {
            for d in 0..=top {
                for idx in &patterns[d] {
                    let face = Simplex(idx.iter().map(|&i| s.0[i]).collect());
                    top_counts[d][lookup[d][&face]] += 1;
                }
            }
        }
        SimplicialComplex { labels, levels, lookup, cofaces, top_counts }
    }

    /// Top dimension `n` (0 for the void complex).
    pub fn dim(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn is_void(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    /// `|X^(d)|`; zero above the top dimension.
    pub fn count(&self, d: usize) -> usize {
        self.levels.get(d).map_or(0, Vec::len)
    }

    pub fn simplices(&self, d: usize) -> &[Simplex] {
        self.levels.get(d).map_or(&[], Vec::as_slice)
    }

    pub fn simplex(&self, d: usize, i: usize) -> &Simplex {
        &self.levels[d][i]
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.lookup.get(s.dim())?.get(s).copied()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index_of(s).is_some()
    }

    /// Indices of the `(d+1)`-simplices containing simplex `i` of level `d`.
    pub fn cofaces(&self, d: usize, i: usize) -> &[usize] {
        self.cofaces.get(d).map_or(&[], |c| c[i].as_slice())
    }

    /// Original label of a dense vertex id.
    pub fn label(&self, v: VertexId) -> u64 {
        self.labels[v.index()]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn simplex_labels(&self, s: &Simplex) -> Vec<u64> {
        s.vertices().iter().map(|&v| self.label(v)).collect()
    }

    /// Dense id for an original label.
    pub fn vertex_by_label(&self, label: u64) -> Option<VertexId> {
        self.labels.binary_search(&label).ok().map(|i| VertexId(i as u32))
    }

    /// Canonical simplex from original labels, if present.
    pub fn simplex_by_labels(&self, labels: &[u64]) -> Result<Simplex> {
        let ids = labels
            .iter()
            .map(|&l| self.vertex_by_label(l).ok_or_else(|| Error::SimplexNotFound(labels.to_vec())))
            .collect::<Result<Vec<_>>>()?;
        let s = Simplex::new(ids)?;
        if self.contains(&s) {
            Ok(s)
        } else {
            Err(Error::SimplexNotFound(labels.to_vec()))
        }
    }

    /// True iff every simplex is a face of some top-dimensional simplex.
    pub fn is_pure(&self) -> bool {
        let n = self.dim();
        (0..n).all(|d| self.cofaces[d].iter().all(|c| !c.is_empty()))
    }

    /// First simplex that is not a face of a top simplex, if any.
    pub fn impurity_witness(&self) -> Option<&Simplex> {
        let n = self.dim();
        (0..n).find_map(|d| self.cofaces[d].iter().position(Vec::is_empty).map(|i| &self.levels[d][i]))
    }

    pub(crate) fn require_pure(&self) -> Result<()> {
        match self.impurity_witness() {
            None => Ok(()),
            Some(s) => Err(Error::NotPure(format!("{:?}", self.simplex_labels(s)))),
        }
    }

    /// Number of top simplices containing simplex `i` of level `d`.
    pub fn top_count(&self, d: usize, i: usize) -> u64 {
        self.top_counts[d][i]
    }

    /// The weight `m(τ)`.
    pub fn weight_m(&self, tau: &Simplex) -> Result<Weight> {
        let i = self.index_of(tau).ok_or_else(|| Error::SimplexNotFound(self.simplex_labels_lossy(tau)))?;
        self.require_pure()?;
        Ok(self.weight_at(tau.dim(), i))
    }

    /// `m` for simplex `i` of level `d`; caller has checked purity.
    pub fn weight_at(&self, d: usize, i: usize) -> Weight {
        Weight(factorial(self.dim() - d) * self.top_counts[d][i])
    }

    /// All weights of level `d`, rejecting non-pure complexes.
    pub fn weights(&self, d: usize) -> Result<Vec<Weight>> {
        self.require_pure()?;
        Ok((0..self.count(d)).map(|i| self.weight_at(d, i)).collect())
    }

    fn simplex_labels_lossy(&self, s: &Simplex) -> Vec<u64> {
        s.vertices().iter().map(|v| self.labels.get(v.index()).copied().unwrap_or(v.0 as u64)).collect()
    }

    /// Every simplex of `X` containing `tau` (including `tau` itself).
    pub fn star(&self, tau: &Simplex) -> Result<Vec<Simplex>> {
        let i = self.index_of(tau).ok_or_else(|| Error::SimplexNotFound(self.simplex_labels_lossy(tau)))?;
        let mut out = Vec::new();
        let mut frontier = vec![i];
        let mut d = tau.dim();
        while !frontier.is_empty() {
            out.extend(frontier.iter().map(|&j| self.levels[d][j].clone()));
            let mut next: Vec<usize> = frontier.iter().flat_map(|&j| self.cofaces(d, j).iter().copied()).collect();
            next.sort_unstable();
            next.dedup();
            frontier = next;
            d += 1;
        }
        Ok(out)
    }

    /// The link `X_τ = {η : η ∩ τ = ∅, η ∪ τ ∈ X}`; `None` for `τ = ∅` gives `X`.
    ///
    /// Vertex labels of the link are those of `X`.
    pub fn link(&self, tau: Option<&Simplex>) -> Result<SimplicialComplex> {
        let Some(tau) = tau else {
            return Ok(self.clone());
        };
        let star = self.star(tau)?;
        let rest: Vec<Vec<u64>> = star
            .iter()
            .filter(|s| s.len() > tau.len())
            .map(|s| s.vertices().iter().filter(|v| !tau.contains(**v)).map(|&v| self.label(v)).collect())
            .collect();
        if rest.is_empty() {
            return Ok(SimplicialComplex::void());
        }
        SimplicialComplex::build(rest)
    }

    /// True iff the 1-skeleton is nonempty and connected.
    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        if n == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); n];
        for e in self.simplices(1) {
            let (a, b) = (e.0[0].index(), e.0[1].index());
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        let mut visited = 1;
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    visited += 1;
                    queue.push_back(w);
                }
            }
        }
        visited == n
    }

    /// True iff every `(k+1)`-subset of vertices is a `k`-simplex.
    pub fn has_complete_skeleton(&self, k: usize) -> bool {
        self.count(k) as u128 == crate::combinatorics::binomial(self.num_vertices(), k + 1)
    }

    /// Simplices with no cofaces.
    pub fn maximal_simplices(&self) -> Vec<&Simplex> {
        let mut out = Vec::new();
        for d in 0..self.levels.len() {
            for (i, s) in self.levels[d].iter().enumerate() {
                if self.cofaces(d, i).is_empty() {
                    out.push(s);
                }
            }
        }
        out
    }

    /// Maximal simplices as label lists, the canonical serialization.
    pub fn to_maximal_labels(&self) -> Vec<Vec<u64>> {
        self.maximal_simplices().into_iter().map(|s| self.simplex_labels(s)).collect()
    }

    /// Parses the line-oriented text format: one maximal simplex per line,
    /// whitespace-separated vertex labels, `#` comments.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<u64>().map_err(|e| Error::Parse { line: lineno + 1, msg: format!("{tok:?}: {e}") })
                })
                .collect::<Result<Vec<u64>>>()?;
            rows.push(row);
        }
        Self::build(rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in self.to_maximal_labels() {
            let parts: Vec<String> = s.iter().map(u64::to_string).collect();
            out.push_str(&parts.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let file: ComplexFile = serde_json::from_str(text)?;
        Self::build(file.maximal)
    }

    pub fn to_json_file(&self) -> ComplexFile {
        ComplexFile { maximal: self.to_maximal_labels() }
    }

    /// Reads either format, choosing JSON when the first non-blank byte is `{`.
    pub fn parse_any(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_text(text)
        }
    }
}

/// JSON representation: `{"maximal": [[ids...], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ComplexFile {
    pub maximal: Vec<Vec<u64>>,
}

/// The full `n`-simplex on `n_vertices` vertices truncated to dimension `dim`
/// (every `(dim+1)`-subset is a top simplex).
pub fn complete_complex(n_vertices: usize, dim: usize) -> SimplicialComplex {
    let gens: Vec<Vec<u64>> =
        subsets(n_vertices, dim + 1).into_iter().map(|s| s.into_iter().map(|v| v as u64).collect()).collect();
    SimplicialComplex::build(gens).expect("nonempty")
}
