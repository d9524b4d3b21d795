//! Galleries on `X^(k)`: sequences of `(k+1)`-simplices in which consecutive
//! members share a `k`-face.
//!
//! Distances count gallery members, so faces of one `(k+1)`-simplex are at
//! distance 1 and `d(η, η) = 0`. Shortest galleries are found by BFS over the
//! `(k+1)`-simplices, seeded with every coface of the source.
//!
//! Two cofaces of the same `k`-simplex are adjacent, so a set `F` of
//! `(k+1)`-simplices gallery-connects every pair of `S` exactly when all of
//! `S` is covered by a single connected component of `F`. The exact filling
//! number is therefore a minimum connected node set meeting every cover
//! group, found by iterative deepening over connected sets.

use std::collections::VecDeque;

use serde::Serialize;

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};

const UNREACHED: u32 = u32::MAX;

/// Adjacency on `X^(k+1)`: `σ ~ σ'` iff `|σ ∩ σ'| = k + 1`.
#[derive(Clone, Debug)]
pub struct GalleryGraph<'a> {
    x: &'a SimplicialComplex,
    k: usize,
    adj: Vec<Vec<usize>>,
}

impl<'a> GalleryGraph<'a> {
    pub fn new(x: &'a SimplicialComplex, k: usize) -> Self {
        let mut adj = vec![Vec::new(); x.count(k + 1)];
        for t in 0..x.count(k) {
            let cof = x.cofaces(k, t);
            for (i, &a) in cof.iter().enumerate() {
                for &b in &cof[i + 1..] {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
        }
        // two (k+1)-simplices share at most one k-face, so no duplicates arise
        for row in &mut adj {
            row.sort_unstable();
        }
        GalleryGraph { x, k, adj }
    }

    pub fn complex(&self) -> &'a SimplicialComplex {
        self.x
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbours(&self, node: usize) -> &[usize] {
        &self.adj[node]
    }

    /// `(k+1)`-simplices containing the `k`-simplex with index `eta`.
    pub fn covers(&self, eta: usize) -> &[usize] {
        self.x.cofaces(self.k, eta)
    }

    /// Hop distance from every node to the nearest node in `sources`, with
    /// BFS parents (`usize::MAX` at the sources and unreached nodes).
    pub fn bfs(&self, sources: &[usize]) -> (Vec<u32>, Vec<usize>) {
        let mut dist = vec![UNREACHED; self.adj.len()];
        let mut parent = vec![usize::MAX; self.adj.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] == UNREACHED {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == UNREACHED {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                }
            }
        }
        (dist, parent)
    }

    /// Gallery distance between `k`-simplices by index; `None` is infinity.
    pub fn distance(&self, eta0: usize, eta1: usize) -> Option<usize> {
        if eta0 == eta1 {
            return Some(0);
        }
        let (dist, _) = self.bfs(self.covers(eta0));
        self.distance_from(&dist, eta1)
    }

    fn distance_from(&self, dist: &[u32], eta1: usize) -> Option<usize> {
        self.covers(eta1).iter().map(|&s| dist[s]).filter(|&d| d != UNREACHED).min().map(|h| h as usize + 1)
    }

    /// One shortest gallery from `eta0` to `eta1` (node indices, in order).
    pub fn shortest_gallery(&self, eta0: usize, eta1: usize) -> Option<Vec<usize>> {
        let (dist, parent) = self.bfs(self.covers(eta0));
        shortest_from(&dist, &parent, self.covers(eta1))
    }

    /// True iff every pair of `k`-simplices is joined by a gallery.
    pub fn is_connected(&self) -> bool {
        let n = self.x.count(self.k);
        if n <= 1 {
            return true;
        }
        if (0..n).any(|t| self.covers(t).is_empty()) {
            return false;
        }
        let (dist, _) = self.bfs(&[0]);
        dist.iter().all(|&d| d != UNREACHED)
    }

    /// `D = max_{τ ∈ X^(k)} #{σ ∈ X^(k+1) : τ ⊂ σ}`.
    pub fn max_degree(&self) -> usize {
        (0..self.x.count(self.k)).map(|t| self.covers(t).len()).max().unwrap_or(0)
    }

    /// Gallery distances from `eta` to every `k`-simplex.
    pub fn distances_from(&self, eta: usize) -> Vec<Option<usize>> {
        let (dist, _) = self.bfs(self.covers(eta));
        (0..self.x.count(self.k)).map(|t| if t == eta { Some(0) } else { self.distance_from(&dist, t) }).collect()
    }

    /// `|B(η, r)|` for `r = 0..=r_max`, where `B(η, r) = {η' : d(η, η') ≤ r}`.
    pub fn ball_sizes(&self, eta: usize, r_max: usize) -> Vec<usize> {
        let d = self.distances_from(eta);
        (0..=r_max).map(|r| d.iter().filter(|x| x.is_some_and(|v| v <= r)).count()).collect()
    }

    /// `#{η' : d(η, η') = 1}`.
    pub fn neighbour_count(&self, eta: usize) -> usize {
        let mut facets: Vec<usize> = self
            .covers(eta)
            .iter()
            .flat_map(|&s| self.x.simplex(self.k + 1, s).facets())
            .map(|f| self.x.index_of(&f).expect("closed"))
            .filter(|&t| t != eta)
            .collect();
        facets.sort_unstable();
        facets.dedup();
        facets.len()
    }
}

fn shortest_from(dist: &[u32], parent: &[usize], targets: &[usize]) -> Option<Vec<usize>> {
    let &end = targets.iter().filter(|&&s| dist[s] != UNREACHED).min_by_key(|&&s| (dist[s], s))?;
    let mut path = vec![end];
    let mut cur = end;
    while parent[cur] != usize::MAX {
        cur = parent[cur];
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

fn index_k(x: &SimplicialComplex, k: usize, s: &Simplex) -> Result<usize> {
    if s.dim() != k {
        return Err(Error::DegreeMismatch(k, s.dim()));
    }
    x.index_of(s).ok_or_else(|| Error::SimplexNotFound(x.simplex_labels(s)))
}

/// `d_{k+1}(η₀, η₁)` with `k = dim η₀`; `None` for infinity.
pub fn gallery_distance(x: &SimplicialComplex, eta0: &Simplex, eta1: &Simplex) -> Result<Option<usize>> {
    let k = eta0.dim();
    let (a, b) = (index_k(x, k, eta0)?, index_k(x, k, eta1)?);
    Ok(GalleryGraph::new(x, k).distance(a, b))
}

pub fn is_gallery_connected(x: &SimplicialComplex, k: usize) -> Result<bool> {
    if k >= x.dim() {
        return Err(Error::DegreeOutOfRange { degree: k, min: 0, max: x.dim().saturating_sub(1) });
    }
    Ok(GalleryGraph::new(x, k).is_connected())
}

/// Bounds on `Fill_{k+1}(S)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FillResult {
    /// Largest pairwise gallery distance, raised by any search level that
    /// was exhausted without success.
    pub lower: usize,
    /// Size of the union of one shortest gallery per pair.
    pub upper: usize,
    pub exact: Option<usize>,
    /// Indices into `X^(k+1)` of a filling of size `exact`.
    pub witness: Option<Vec<usize>>,
    /// Search states visited.
    pub states: u64,
}

impl FillResult {
    /// `(lower, upper)` collapsed to `exact` when known.
    pub fn interval(&self) -> (usize, usize) {
        match self.exact {
            Some(e) => (e, e),
            None => (self.lower, self.upper),
        }
    }
}

pub const DEFAULT_FILL_BUDGET: u64 = 10_000_000;

/// `Fill_{k+1}(S)` for a set of `k`-simplices. Exhaustive search stops after
/// `budget` states, leaving only bounds.
pub fn fill_number(x: &SimplicialComplex, s: &[Simplex], budget: u64) -> Result<FillResult> {
    let k = s.first().ok_or(Error::EmptyInput)?.dim();
    let g = GalleryGraph::new(x, k);
    let idx = s.iter().map(|t| index_k(x, k, t)).collect::<Result<Vec<_>>>()?;
    fill_number_in(&g, &idx, budget)
}

/// [`fill_number`] on a prebuilt gallery graph with terminals given by index.
pub fn fill_number_in(g: &GalleryGraph<'_>, terminals: &[usize], budget: u64) -> Result<FillResult> {
    let mut terms = terminals.to_vec();
    terms.sort_unstable();
    terms.dedup();
    let x = g.complex();
    if terms.is_empty() {
        return Err(Error::EmptyInput);
    }
    if terms.len() == 1 {
        return Ok(FillResult { lower: 0, upper: 0, exact: Some(0), witness: Some(Vec::new()), states: 0 });
    }
    let bfs: Vec<(Vec<u32>, Vec<usize>)> = terms.iter().map(|&t| g.bfs(g.covers(t))).collect();
    let mut lower = 0;
    let mut union: Vec<usize> = Vec::new();
    for (i, &a) in terms.iter().enumerate() {
        for &b in &terms[i + 1..] {
            let (dist, parent) = &bfs[i];
            let path = shortest_from(dist, parent, g.covers(b)).ok_or_else(|| {
                Error::Unfillable(x.simplex_labels(x.simplex(g.k(), a)), x.simplex_labels(x.simplex(g.k(), b)))
            })?;
            lower = lower.max(path.len());
            union.extend(path);
        }
    }
    union.sort_unstable();
    union.dedup();
    let upper = union.len();
    if lower == upper {
        return Ok(FillResult { lower, upper, exact: Some(upper), witness: Some(union), states: 0 });
    }
    let dists: Vec<Vec<u32>> = bfs.into_iter().map(|(d, _)| d).collect();
    let mut search = Search::new(g, &terms, dists, budget);
    for size in lower..upper {
        match search.run(size) {
            Outcome::Found(mut w) => {
                w.sort_unstable();
                return Ok(FillResult {
                    lower: size,
                    upper,
                    exact: Some(size),
                    witness: Some(w),
                    states: search.states,
                });
            }
            Outcome::Exhausted => {}
            Outcome::OutOfBudget => {
                return Ok(FillResult { lower: size, upper, exact: None, witness: None, states: search.states });
            }
        }
    }
    Ok(FillResult { lower: upper, upper, exact: Some(upper), witness: Some(union), states: search.states })
}

enum Outcome {
    Found(Vec<usize>),
    Exhausted,
    OutOfBudget,
}

/// Enumerates connected node sets containing a root cover of the first
/// terminal; each set is produced once by include/exclude branching on the
/// extension frontier.
struct Search<'g, 'a> {
    g: &'g GalleryGraph<'a>,
    /// `hits[σ]`: terminal slots covered by `σ`.
    hits: Vec<Vec<usize>>,
    /// `dist[t][σ]`: hops from `σ` to the nearest cover of terminal `t`.
    dist: Vec<Vec<u32>>,
    roots: Vec<usize>,
    /// Most terminals a single node covers.
    max_hits: usize,
    budget: u64,
    states: u64,
    in_set: Vec<bool>,
    banned: Vec<bool>,
    covered: Vec<u32>,
    n_covered: usize,
    set: Vec<usize>,
}

impl<'g, 'a> Search<'g, 'a> {
    fn new(g: &'g GalleryGraph<'a>, terms: &[usize], dist: Vec<Vec<u32>>, budget: u64) -> Self {
        let n = g.node_count();
        let mut hits = vec![Vec::new(); n];
        for (slot, &t) in terms.iter().enumerate() {
            for &s in g.covers(t) {
                hits[s].push(slot);
            }
        }
        let max_hits = hits.iter().map(Vec::len).max().unwrap_or(0);
        Search {
            g,
            roots: g.covers(terms[0]).to_vec(),
            hits,
            dist,
            max_hits,
            budget,
            states: 0,
            in_set: vec![false; n],
            banned: vec![false; n],
            covered: vec![0; terms.len()],
            n_covered: 0,
            set: Vec::new(),
        }
    }

    fn run(&mut self, size: usize) -> Outcome {
        let roots = self.roots.clone();
        let mut out = Outcome::Exhausted;
        for (i, &r) in roots.iter().enumerate() {
            self.push(r);
            let ext = self.extension_after(r, &[]);
            let res = self.grow(size, ext);
            self.pop(r);
            match res {
                Outcome::Exhausted => {}
                other => {
                    out = other;
                    // restore bans of the earlier roots before returning
                    for &e in &roots[..i] {
                        self.banned[e] = false;
                    }
                    return out;
                }
            }
            self.banned[r] = true;
        }
        for &r in &roots {
            self.banned[r] = false;
        }
        out
    }

    fn push(&mut self, v: usize) {
        self.in_set[v] = true;
        self.set.push(v);
        for &slot in &self.hits[v] {
            if self.covered[slot] == 0 {
                self.n_covered += 1;
            }
            self.covered[slot] += 1;
        }
    }

    fn pop(&mut self, v: usize) {
        self.in_set[v] = false;
        self.set.pop();
        for &slot in &self.hits[v] {
            self.covered[slot] -= 1;
            if self.covered[slot] == 0 {
                self.n_covered -= 1;
            }
        }
    }

    /// `ext` plus the fresh neighbours of `v`.
    fn extension_after(&mut self, v: usize, ext: &[usize]) -> Vec<usize> {
        let mut out = ext.to_vec();
        for &w in &self.g.adj[v] {
            if !self.in_set[w] && !self.banned[w] && !ext.contains(&w) {
                out.push(w);
            }
        }
        out
    }

    fn feasible(&self, remaining: usize) -> bool {
        let uncovered = self.covered.len() - self.n_covered;
        if uncovered > remaining * self.max_hits {
            return false;
        }
        self.covered.iter().enumerate().filter(|(_, &c)| c == 0).all(|(slot, _)| {
            let d = &self.dist[slot];
            let best = self.set.iter().map(|&s| d[s]).min().unwrap_or(UNREACHED);
            best != UNREACHED && best as usize <= remaining
        })
    }

    fn grow(&mut self, size: usize, ext: Vec<usize>) -> Outcome {
        self.states += 1;
        if self.states > self.budget {
            return Outcome::OutOfBudget;
        }
        if self.n_covered == self.covered.len() {
            return Outcome::Found(self.set.clone());
        }
        let remaining = size - self.set.len();
        if remaining == 0 || !self.feasible(remaining) {
            return Outcome::Exhausted;
        }
        let mut ext = ext;
        let mut banned_here = Vec::new();
        let mut result = Outcome::Exhausted;
        while let Some(v) = ext.pop() {
            // include v
            self.push(v);
            let next = self.extension_after(v, &ext);
            let res = self.grow(size, next);
            self.pop(v);
            if !matches!(res, Outcome::Exhausted) {
                result = res;
                break;
            }
            // exclude v for the rest of this subtree
            self.banned[v] = true;
            banned_here.push(v);
        }
        for v in banned_here {
            self.banned[v] = false;
        }
        result
    }
}

/// Outcome of checking the link-connectivity propositions on one instance.
#[derive(Clone, Debug, Serialize)]
pub struct AppendixReport {
    pub k: usize,
    /// Pairs sharing a `(k−1)`-face whose link is connected.
    pub claim_pairs: usize,
    /// First such pair with infinite gallery distance, as label lists.
    pub claim_counterexample: Option<(Vec<u64>, Vec<u64>)>,
    /// `X` is `k`-gallery connected and every `(k−1)`-link is connected.
    pub prop_hypotheses: bool,
    pub gallery_connected: bool,
    pub passed: bool,
}

/// Checks, for `1 ≤ k ≤ n−1`:
/// pairs of `k`-simplices meeting in a `(k−1)`-simplex with connected link
/// are gallery-connected; and if `X` is `k`-gallery connected with all
/// `(k−1)`-links connected, then it is `(k+1)`-gallery connected.
pub fn verify_appendix(x: &SimplicialComplex, k: usize) -> Result<AppendixReport> {
    if k == 0 || k >= x.dim() {
        return Err(Error::DegreeOutOfRange { degree: k, min: 1, max: x.dim().saturating_sub(1) });
    }
    let g = GalleryGraph::new(x, k);
    let links_connected: Vec<bool> =
        x.simplices(k - 1).iter().map(|tau| x.link(Some(tau)).map(|l| l.is_connected())).collect::<Result<_>>()?;
    let mut claim_pairs = 0;
    let mut claim_counterexample = None;
    for (t, _) in x.simplices(k - 1).iter().enumerate().filter(|&(t, _)| links_connected[t]) {
        let etas = x.cofaces(k - 1, t);
        for (i, &a) in etas.iter().enumerate() {
            let d = g.distances_from(a);
            for &b in &etas[i + 1..] {
                claim_pairs += 1;
                if d[b].is_none() && claim_counterexample.is_none() {
                    claim_counterexample = Some((x.simplex_labels(x.simplex(k, a)), x.simplex_labels(x.simplex(k, b))));
                }
            }
        }
    }
    let lower_connected = GalleryGraph::new(x, k - 1).is_connected();
    let prop_hypotheses = lower_connected && links_connected.iter().all(|&c| c);
    let gallery_connected = g.is_connected();
    let passed = claim_counterexample.is_none() && (!prop_hypotheses || gallery_connected);
    Ok(AppendixReport { k, claim_pairs, claim_counterexample, prop_hypotheses, gallery_connected, passed })
}
