//! Test corpus and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use hdist::{linial_meshulam, LmParams, SimplicialComplex};

pub struct Instance {
    pub name: String,
    pub x: SimplicialComplex,
    pub k: usize,
}

fn cx(rows: &[Vec<u64>]) -> SimplicialComplex {
    SimplicialComplex::build(rows.iter().cloned()).unwrap()
}

fn rows(list: &[&[u64]]) -> Vec<Vec<u64>> {
    list.iter().map(|r| r.to_vec()).collect()
}

fn cycle(n: u64) -> Vec<Vec<u64>> {
    (0..n).map(|i| vec![i, (i + 1) % n]).collect()
}

fn complete(n: u64, size: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur: Vec<u64> = (0..size as u64).collect();
    loop {
        out.push(cur.clone());
        let mut i = size;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - (size - i) as u64 {
                cur[i] += 1;
                for j in i + 1..size {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// An LM sample with at least one `(k+1)`-simplex, advancing the seed until one appears.
pub fn lm(n: usize, p: f64, k: usize, seed: u64) -> SimplicialComplex {
    (seed..).map(|s| linial_meshulam(&LmParams { n, p, k, seed: s }).unwrap()).find(|x| x.dim() > k).unwrap()
}

/// Fifty fixed instances: closed and bordered surfaces, 3-complexes, graphs and small LM samples.
pub fn corpus() -> Vec<Instance> {
    let mut out = Vec::new();
    let mut push = |name: &str, x: SimplicialComplex, k: usize| out.push(Instance { name: name.into(), x, k });
    let surfaces: Vec<(&str, Vec<Vec<u64>>)> = vec![
        ("tetra_boundary", complete(4, 3)),
        (
            "octahedron",
            rows(&[&[0, 2, 4], &[0, 2, 5], &[0, 3, 4], &[0, 3, 5], &[1, 2, 4], &[1, 2, 5], &[1, 3, 4], &[1, 3, 5]]),
        ),
        (
            "rp2",
            rows(&[
                &[0, 1, 2],
                &[0, 2, 3],
                &[0, 3, 4],
                &[0, 4, 5],
                &[0, 1, 5],
                &[1, 2, 4],
                &[2, 3, 5],
                &[1, 3, 4],
                &[2, 4, 5],
                &[1, 3, 5],
            ]),
        ),
        (
            "torus7",
            (0..7u64).flat_map(|i| [vec![i, (i + 1) % 7, (i + 3) % 7], vec![i, (i + 2) % 7, (i + 3) % 7]]).collect(),
        ),
        ("moebius5", (0..5u64).map(|i| vec![i, (i + 1) % 5, (i + 2) % 5]).collect()),
        ("annulus", rows(&[&[0, 1, 3], &[1, 3, 4], &[1, 2, 4], &[2, 4, 5], &[0, 2, 5], &[0, 3, 5]])),
        ("strip3", rows(&[&[0, 1, 2], &[1, 2, 3], &[2, 3, 4]])),
        ("triangle", rows(&[&[0, 1, 2]])),
        ("two_triangles", rows(&[&[0, 1, 2], &[1, 2, 3]])),
        ("bowtie", rows(&[&[0, 1, 2], &[0, 3, 4]])),
        ("cone_c4", rows(&[&[4, 0, 1], &[4, 1, 2], &[4, 2, 3], &[4, 3, 0]])),
        ("k5_2", complete(5, 3)),
        ("k6_2", complete(6, 3)),
    ];
    for (name, r) in surfaces {
        push(name, cx(&r), 1);
    }
    push("tetra_solid_k2", cx(&rows(&[&[0, 1, 2, 3]])), 2);
    push("tetra_solid_k1", cx(&rows(&[&[0, 1, 2, 3]])), 1);
    push("two_tetra_k2", cx(&rows(&[&[0, 1, 2, 3], &[1, 2, 3, 4]])), 2);
    push("two_tetra_k1", cx(&rows(&[&[0, 1, 2, 3], &[1, 2, 3, 4]])), 1);
    push("s3_k2", cx(&complete(5, 4)), 2);
    push("s3_k1", cx(&complete(5, 4)), 1);
    let petersen = rows(&[
        &[0, 1],
        &[1, 2],
        &[2, 3],
        &[3, 4],
        &[4, 0],
        &[0, 5],
        &[1, 6],
        &[2, 7],
        &[3, 8],
        &[4, 9],
        &[5, 7],
        &[7, 9],
        &[9, 6],
        &[6, 8],
        &[8, 5],
    ]);
    let graphs: Vec<(&str, Vec<Vec<u64>>)> = vec![
        ("c5", cycle(5)),
        ("c6", cycle(6)),
        ("c8", cycle(8)),
        ("p5", rows(&[&[0, 1], &[1, 2], &[2, 3], &[3, 4]])),
        ("k4", complete(4, 2)),
        ("k5", complete(5, 2)),
        ("petersen", petersen),
        ("star5", rows(&[&[0, 1], &[0, 2], &[0, 3], &[0, 4], &[0, 5]])),
        ("two_edges", rows(&[&[0, 1], &[2, 3]])),
    ];
    for (name, r) in graphs {
        push(name, cx(&r), 0);
    }
    let lm1 = [
        (6, 0.3, 1),
        (6, 0.3, 2),
        (6, 0.5, 3),
        (6, 0.5, 4),
        (6, 0.7, 5),
        (6, 0.7, 6),
        (6, 0.9, 7),
        (7, 0.3, 8),
        (7, 0.4, 9),
        (7, 0.4, 10),
        (7, 0.5, 11),
        (5, 0.6, 12),
        (5, 0.8, 13),
        (8, 0.25, 14),
    ];
    for (n, p, seed) in lm1 {
        push(&format!("lm1_n{n}_p{p}_s{seed}"), lm(n, p, 1, seed), 1);
    }
    for (n, p, seed) in [(8, 0.4, 1), (10, 0.3, 2), (12, 0.2, 3)] {
        push(&format!("lm0_n{n}_p{p}_s{seed}"), lm(n, p, 0, seed), 0);
    }
    for (n, p, seed) in [(6, 0.4, 1), (6, 0.4, 2), (6, 0.6, 3), (6, 0.8, 4), (5, 0.8, 5)] {
        push(&format!("lm2_n{n}_p{p}_s{seed}"), lm(n, p, 2, seed), 2);
    }
    out
}

pub fn verts(x: &SimplicialComplex, d: usize) -> Vec<Vec<u32>> {
    x.simplices(d).iter().map(|s| s.vertices().iter().map(|v| v.0).collect()).collect()
}

fn is_subset(a: &[u32], b: &[u32]) -> bool {
    a.iter().all(|v| b.contains(v))
}

/// `m(τ) = (n−k)! · #{top simplices ⊇ τ}` by direct enumeration.
pub fn oracle_weights(x: &SimplicialComplex, k: usize) -> Vec<f64> {
    let n = x.dim();
    let top = verts(x, n);
    let fact: f64 = (1..=(n - k)).map(|i| i as f64).product();
    verts(x, k).iter().map(|t| fact * top.iter().filter(|s| is_subset(t, s)).count() as f64).collect()
}

/// Dense `d_k` with `(−1)^i` on the facet omitting the `i`-th vertex.
pub fn oracle_coboundary(x: &SimplicialComplex, k: usize) -> Vec<Vec<i64>> {
    let index: HashMap<Vec<u32>, usize> = verts(x, k).into_iter().enumerate().map(|(i, s)| (s, i)).collect();
    verts(x, k + 1)
        .iter()
        .map(|s| {
            let mut row = vec![0i64; index.len()];
            for i in 0..s.len() {
                let mut f = s.clone();
                f.remove(i);
                row[index[&f]] += if i % 2 == 0 { 1 } else { -1 };
            }
            row
        })
        .collect()
}

pub fn dense_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    a.iter()
        .map(|row| {
            let cols = b.first().map_or(0, Vec::len);
            (0..cols).map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum()).collect()
        })
        .collect()
}

/// Minimum number of `(k+1)`-simplices whose gallery graph connects all of
/// `terminals`, by enumerating subsets in order of size. `None` if even the
/// full set fails.
pub fn brute_fill(x: &SimplicialComplex, k: usize, terminals: &[Vec<u32>]) -> Option<usize> {
    if terminals.len() <= 1 {
        return Some(0);
    }
    let nodes = verts(x, k + 1);
    let m = nodes.len();
    assert!(m <= 20, "brute force limited to 20 nodes");
    let adjacent = |a: &[u32], b: &[u32]| a.iter().filter(|v| b.contains(v)).count() == k + 1;
    let works = |mask: u32| -> bool {
        let members: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        let mut parent: Vec<usize> = (0..members.len()).collect();
        fn find(p: &mut Vec<usize>, i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            p[i] = r;
            r
        }
        for a in 0..members.len() {
            for b in a + 1..members.len() {
                if adjacent(&nodes[members[a]], &nodes[members[b]]) {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra] = rb;
                }
            }
        }
        let mut root = None;
        for t in terminals {
            let Some(c) = (0..members.len()).find(|&i| is_subset(t, &nodes[members[i]])) else { return false };
            let r = find(&mut parent, c);
            match root {
                None => root = Some(r),
                Some(r0) if r0 != r => return false,
                _ => {}
            }
        }
        true
    };
    if m == 0 || !works((1u32 << m) - 1) {
        return None;
    }
    for size in 1..=m {
        // Gosper's hack over masks with `size` bits
        let mut mask: u32 = (1 << size) - 1;
        while mask < (1 << m) {
            if works(mask) {
                return Some(size);
            }
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
    unreachable!()
}

/// BFS distances on a graph given by its edge list.
pub fn bfs_distances(n: usize, edges: &[Vec<u32>], src: usize) -> Vec<Option<usize>> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e[0] as usize].push(e[1] as usize);
        adj[e[1] as usize].push(e[0] as usize);
    }
    let mut dist = vec![None; n];
    dist[src] = Some(0);
    let mut q = VecDeque::from([src]);
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(dist[u].unwrap() + 1);
                q.push_back(v);
            }
        }
    }
    dist
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for j in c..n {
                a[r][j] -= f * a[c][j];
            }
        }
    }
    d
}

/// `√det(EEᵀ) / j!` for the `j`-simplex with the given vertices.
pub fn gram_volume(points: &[Vec<f64>]) -> f64 {
    let j = points.len() - 1;
    let e: Vec<Vec<f64>> = points[1..].iter().map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect()).collect();
    let g: Vec<Vec<f64>> =
        e.iter().map(|a| e.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum()).collect()).collect();
    let fact: f64 = (1..=j).map(|i| i as f64).product();
    det(g).max(0.0).sqrt() / fact
}
