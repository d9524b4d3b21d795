//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, with the
//! tolerances pinned below. Exits nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use hdist::distortion::{
    build_family, check_envol_inequality, check_spectral_filling_inequality, combinatorial_fill_bound,
    evaluate_distortion, theorem_distortion_bound, vertex_set_family, FamilyChoice, Hypotheses,
};
use hdist::gallery::{fill_number_in, GalleryGraph, DEFAULT_FILL_BUDGET};
use hdist::geometry::{
    bipyramid, boundary_of_chain, canonical_chain, cone_filling, envol_proj, moment_integral,
    simplex_boundary_oriented, stokes_check, MultiIndex, OrderedChain,
};
use hdist::laplacian::{
    adjoint, apply_upper_laplacian, augmentation_matrix, coboundary_matrix, differential, spectrum,
};
use hdist::random::concentration_report;
use hdist::{json, linial_meshulam, Cochain, Embedding, LmParams, SimplicialComplex, VertexId};

const ADJOINT_REL_TOL: f64 = 1e-9;
const DISTANCE_TOL: f64 = 1e-9;
const STOKES_REL_TOL: f64 = 1e-9;
const MC_REL_TOL: f64 = 1e-2;
const MC_SAMPLES: usize = 1_000_000;
const FLAT_TOL: f64 = 1e-9;
const MARGIN_TOL: f64 = 1e-8;
const CAP_REL_TOL: f64 = 1e-12;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    ensure(elapsed <= Duration::from_secs(limit_secs), || format!("runtime {elapsed:.1?} exceeds {limit_secs} s"))
}

fn random_lm(rng: &mut ChaCha8Rng, k: usize, n_max: usize) -> SimplicialComplex {
    let n = rng.random_range(k + 3..=n_max);
    let p = rng.random_range(0.3..1.0);
    lm(n, p, k, rng.random())
}

fn dot_w(w: &[f64], a: &[f64], b: &[f64]) -> f64 {
    w.iter().zip(a).zip(b).map(|((w, a), b)| w * a * b).sum()
}

fn mat_vec(m: &[Vec<i64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| *a as f64 * b).sum()).collect()
}

/// Exact cochain algebra against a dense oracle coboundary.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut compositions = 0;
    for i in 0..100 {
        let k = i % 3;
        let x = random_lm(&mut rng, k, 14);
        let aug = augmentation_matrix(&x);
        ensure(coboundary_matrix(&x, 0).matmul(&aug).is_zero(), || "d_0 d_-1 != 0".into())?;
        compositions += 1;
        for j in 0..x.dim() {
            let lib = coboundary_matrix(&x, j);
            let oracle = oracle_coboundary(&x, j);
            for (r, row) in lib.rows.iter().enumerate() {
                let mut dense = vec![0i64; lib.n_cols];
                for &(c, v) in row {
                    dense[c] = v;
                }
                ensure(dense == oracle[r], || format!("d_{j} row {r} differs from oracle"))?;
            }
            if j + 1 < x.dim() {
                ensure(coboundary_matrix(&x, j + 1).matmul(&lib).is_zero(), || format!("d_{} d_{j} != 0", j + 1))?;
                let prod = dense_mul(&oracle_coboundary(&x, j + 1), &oracle);
                ensure(prod.iter().flatten().all(|&v| v == 0), || "oracle product nonzero".into())?;
                compositions += 1;
            }
        }
    }
    within(start.elapsed(), 30)?;
    Ok(format!("100 LM complexes, {compositions} compositions zero, in {:.1?}", start.elapsed()))
}

/// Adjointness and Rayleigh identities on 1000 random cochains.
fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_adj, mut worst_ray) = (0f64, 0f64);
    let mut cases = 0;
    for i in 0..100 {
        let k = i % 3;
        // the weighted inner product needs a pure complex
        let x = std::iter::repeat_with(|| random_lm(&mut rng, k, 12)).find(SimplicialComplex::is_pure).unwrap();
        let d = oracle_coboundary(&x, k);
        let (wk, wk1) = (oracle_weights(&x, k), oracle_weights(&x, k + 1));
        for _ in 0..10 {
            let phi = Cochain::random(&x, k, &mut rng);
            let psi = Cochain::random(&x, k + 1, &mut rng);
            let dphi = mat_vec(&d, &phi.values);
            let lhs = dot_w(&wk1, &dphi, &psi.values);
            let rhs = dot_w(&wk, &phi.values, &adjoint(&x, &psi).unwrap().values);
            // relative to the Cauchy–Schwarz magnitude of the pairing
            let scale =
                (dot_w(&wk1, &dphi, &dphi) * dot_w(&wk1, &psi.values, &psi.values)).sqrt().max(f64::MIN_POSITIVE);
            worst_adj = worst_adj.max((lhs - rhs).abs() / scale);
            let norm = dot_w(&wk1, &dphi, &dphi);
            let ray = dot_w(&wk, &apply_upper_laplacian(&x, &phi).unwrap().values, &phi.values);
            let lib = differential(&x, &phi).unwrap();
            ensure(lib.values.iter().zip(&dphi).all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + b.abs())), || {
                "library differential differs from oracle".into()
            })?;
            worst_ray = worst_ray.max((norm - ray).abs() / norm.abs().max(ray.abs()).max(f64::MIN_POSITIVE));
            cases += 1;
        }
    }
    ensure(worst_adj <= ADJOINT_REL_TOL, || format!("adjoint residual {worst_adj:e}"))?;
    ensure(worst_ray <= ADJOINT_REL_TOL, || format!("Rayleigh residual {worst_ray:e}"))?;
    within(start.elapsed(), 30)?;
    Ok(format!(
        "{cases} cochain pairs; worst adjoint {worst_adj:.1e}, Rayleigh {worst_ray:.1e}, tol {ADJOINT_REL_TOL:e}"
    ))
}

fn random_points(rng: &mut ChaCha8Rng, count: usize, m: usize) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..m).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect()).collect()
}

/// The graph case against BFS and a direct metric-distortion oracle.
fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut graphs, mut pairs, mut attempts) = (0, 0usize, 0);
    let mut worst: f64 = 0.0;
    while graphs < 20 {
        attempts += 1;
        ensure(attempts < 500, || "could not draw 20 connected graphs".into())?;
        let n = rng.random_range(6..=30);
        let p = rng.random_range(0.15..0.6);
        let x = linial_meshulam(&LmParams { n, p, k: 0, seed: rng.random() }).unwrap();
        if x.dim() < 1 {
            continue;
        }
        let edges = verts(&x, 1);
        let g = GalleryGraph::new(&x, 0);
        let dist: Vec<Vec<Option<usize>>> = (0..n).map(|u| bfs_distances(n, &edges, u)).collect();
        for u in 0..n {
            let lib = g.distances_from(u);
            ensure(lib == dist[u], || format!("gallery distances from {u} differ from BFS"))?;
        }
        for u in 0..n {
            for v in u + 1..n {
                if let Some(d) = dist[u][v] {
                    let f = fill_number_in(&g, &[u, v], DEFAULT_FILL_BUDGET).unwrap();
                    ensure(f.exact == Some(d), || format!("Fill({{{u},{v}}}) = {:?}, d = {d}", f.exact))?;
                    pairs += 1;
                }
            }
        }
        let connected = dist[0].iter().all(Option::is_some);
        if !connected {
            continue;
        }
        let m = rng.random_range(1..=6);
        let pts = random_points(&mut rng, n, m);
        let f = Embedding::new(pts.clone()).unwrap();
        for (u, v) in [(0usize, 1usize), (2, n - 1)] {
            let b = simplex_boundary_oriented(&[VertexId(u as u32), VertexId(v as u32)]).unwrap();
            let e = envol_proj(&b, &f).unwrap();
            let eu: f64 = pts[u].iter().zip(&pts[v]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            ensure((e - eu).abs() <= DISTANCE_TOL * eu.max(1.0), || format!("EnVol {e} vs distance {eu}"))?;
        }
        let (mut expand, mut contract) = (0f64, 0f64);
        for u in 0..n {
            for v in u + 1..n {
                let d = dist[u][v].unwrap() as f64;
                let e: f64 = pts[u].iter().zip(&pts[v]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                expand = expand.max(e / d);
                contract = contract.max(d / e);
            }
        }
        let oracle = expand * contract;
        let fam = vertex_set_family(&x, 0).unwrap();
        let r = evaluate_distortion(&x, &fam, &f, DEFAULT_FILL_BUDGET).unwrap();
        ensure(r.exact_fills, || "fills not exact".into())?;
        let rel = (r.distortion.lo - oracle).abs() / oracle;
        worst = worst.max(rel);
        ensure(rel <= DISTANCE_TOL && r.distortion.lo == r.distortion.hi, || {
            format!("distortion {:?} vs oracle {oracle}", r.distortion)
        })?;
        graphs += 1;
    }
    Ok(format!("20 connected graphs, {pairs} pairs exact; worst distortion rel err {worst:.1e}"))
}

/// Stokes on random simplex boundaries and bipyramids, and moments against Monte Carlo.
fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let k = rng.random_range(0..=2usize);
        let m = rng.random_range(k + 1..=6);
        let (b, filling, count): (_, OrderedChain, usize) = if case % 2 == 0 {
            let mut tuple: Vec<VertexId> = (0..k as u32 + 2).map(VertexId).collect();
            for i in (1..tuple.len()).rev() {
                tuple.swap(i, rng.random_range(0..=i));
            }
            (simplex_boundary_oriented(&tuple).unwrap(), vec![(tuple.clone(), 1)], k + 2)
        } else {
            let base: Vec<VertexId> = (2..k as u32 + 3).map(VertexId).collect();
            let chain = bipyramid(VertexId(0), VertexId(1), &base);
            (boundary_of_chain(&canonical_chain(&chain).unwrap()).unwrap(), chain, k + 3)
        };
        let f = Embedding::new(random_points(&mut rng, count, m)).unwrap();
        let r = stokes_check(&b, &filling, &f).unwrap();
        let rel = r.max_residual / r.scale.max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        ensure(rel <= STOKES_REL_TOL, || format!("case {case}: Stokes residual {rel:e}"))?;
    }
    let mut worst_mc: f64 = 0.0;
    for case in 0..20 {
        let k = 1 + case % 2;
        let m = rng.random_range(k + 1..=6);
        let mut pts = random_points(&mut rng, k + 1, m);
        let mut idx: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            idx.swap(i, rng.random_range(0..=i));
        }
        let mut idx = idx[..k + 1].to_vec();
        idx.sort_unstable();
        // keep the integrand away from zero so the relative error is meaningful
        for p in &mut pts {
            p[idx[0]] += 3.0;
        }
        let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        let exact = moment_integral(&refs, &MultiIndex::new(idx.clone()).unwrap()).unwrap();
        let jac: Vec<Vec<f64>> = (1..=k).map(|i| idx[1..].iter().map(|&w| pts[i][w] - pts[0][w]).collect()).collect();
        let jd = det(jac);
        let mut sum = 0.0;
        for _ in 0..MC_SAMPLES {
            let t: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
            if t.iter().sum::<f64>() <= 1.0 {
                let xc = pts[0][idx[0]] + (1..=k).map(|i| t[i - 1] * (pts[i][idx[0]] - pts[0][idx[0]])).sum::<f64>();
                sum += xc * jd;
            }
        }
        let mc = sum / MC_SAMPLES as f64;
        let rel = (mc - exact).abs() / exact.abs();
        worst_mc = worst_mc.max(rel);
        ensure(rel <= MC_REL_TOL, || format!("MC case {case}: {mc} vs {exact}"))?;
    }
    within(start.elapsed(), 120)?;
    Ok(format!("200 boundaries, worst Stokes {worst:.1e}; 20 MC cases, worst {worst_mc:.1e}; {:.1?}", start.elapsed()))
}

/// Flat-case equality and the projection inequality on affine fillings.
fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_flat: f64 = 0.0;
    let mut min_slack = f64::INFINITY;
    for case in 0..200 {
        let k = rng.random_range(0..=2usize);
        let m = rng.random_range(k + 1..=6);
        let pts = random_points(&mut rng, k + 3, m);
        let f = Embedding::new(pts.clone()).unwrap();
        let sigma: Vec<VertexId> = (0..k as u32 + 2).map(VertexId).collect();
        let b = simplex_boundary_oriented(&sigma).unwrap();
        let gram = gram_volume(&pts[..k + 2]);
        let e = envol_proj(&b, &f).unwrap();
        let rel = (e - gram).abs() / gram.max(f64::MIN_POSITIVE);
        worst_flat = worst_flat.max(rel);
        ensure(rel <= FLAT_TOL, || format!("case {case}: EnVol {e} vs Gram {gram}"))?;
        // a second filling: the cone from an extra apex, or a bipyramid's two halves
        let (boundary, filling) = if case % 2 == 0 {
            (b.clone(), cone_filling(&b, VertexId(k as u32 + 2)))
        } else {
            let base: Vec<VertexId> = (2..k as u32 + 3).map(VertexId).collect();
            let chain = bipyramid(VertexId(0), VertexId(1), &base);
            (boundary_of_chain(&canonical_chain(&chain).unwrap()).unwrap(), chain)
        };
        let pieces: f64 = filling
            .iter()
            .map(|(t, _)| gram_volume(&t.iter().map(|v| pts[v.index()].clone()).collect::<Vec<_>>()))
            .sum();
        let e = envol_proj(&boundary, &f).unwrap();
        let slack = (pieces - e) / pieces.max(f64::MIN_POSITIVE);
        min_slack = min_slack.min(slack);
        ensure(pieces >= e - FLAT_TOL * pieces.max(1.0), || format!("case {case}: pieces {pieces} < EnVol {e}"))?;
    }
    Ok(format!("200 simplices, worst flat rel err {worst_flat:.1e}; 200 fillings, min relative slack {min_slack:.1e}"))
}

/// Complexes (k ∈ {0,1,2}) whose hypotheses are verified, drawn until `count` are found.
fn verified_complexes(seed: u64, count: usize) -> Result<Vec<(SimplicialComplex, usize, Hypotheses)>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        ensure(attempts < 1000, || "too few complexes meet the hypotheses".into())?;
        let k = [0, 1, 1, 2][out.len() % 4];
        let n = match k {
            0 => rng.random_range(5..=14),
            1 => rng.random_range(6..=12),
            _ => rng.random_range(6..=8),
        };
        let p = rng.random_range(0.55..0.95);
        let x = lm(n, p, k, rng.random());
        let h = Hypotheses::compute(&x, k).unwrap();
        if h.spectral_ok() {
            out.push((x, k, h));
        }
    }
    Ok(out)
}

/// The spectral filling inequality and its embedded form.
fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst_p, mut worst_l) = (f64::INFINITY, f64::INFINITY);
    let complexes = verified_complexes(60, 50)?;
    for (x, k, h) in &complexes {
        let fam = vertex_set_family(x, *k).unwrap();
        for _ in 0..10 {
            let phi = Cochain::random(x, *k, &mut rng);
            let mg = check_spectral_filling_inequality(x, &fam, h, &phi).unwrap();
            worst_p = worst_p.min(mg.margin / (mg.lhs + 1.0));
            ensure(mg.holds(MARGIN_TOL), || format!("spectral filling margin {mg:?}"))?;
        }
        for _ in 0..5 {
            // fewer than k+1 coordinates leave no projections and both sides vanish
            let m = rng.random_range(k + 1..=6);
            let f = Embedding::gaussian(x.num_vertices(), m, rng.random()).unwrap();
            let mg = check_envol_inequality(x, &fam, h, &f).unwrap();
            worst_l = worst_l.min(mg.margin / (mg.lhs + 1.0));
            ensure(mg.holds(MARGIN_TOL), || format!("EnVol margin {mg:?}"))?;
        }
    }
    within(start.elapsed(), 300)?;
    Ok(format!(
        "50 complexes x 10 cochains, min rel margin {worst_p:.3e}; x 5 embeddings, min {worst_l:.3e}; {:.1?}",
        start.elapsed()
    ))
}

/// Terminal sets for the fill comparison: family members plus seeded random sets.
fn terminal_sets(x: &SimplicialComplex, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut sets: Vec<Vec<usize>> = Vec::new();
    if let Ok(fam) = build_family(x, k, FamilyChoice::Auto) {
        for b in fam.members().iter().take(20) {
            sets.push(b.faces().iter().map(|(s, _)| x.index_of(s).unwrap()).collect());
        }
    }
    let nk = x.count(k);
    for _ in 0..10 {
        let size = rng.random_range(2..=4.min(nk).max(2));
        let mut pick: Vec<usize> = (0..size).map(|_| rng.random_range(0..nk)).collect();
        pick.sort_unstable();
        pick.dedup();
        sets.push(pick);
    }
    sets
}

/// Exact Fill against brute-force subset enumeration.
fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let corpus = corpus();
    let (mut small, mut compared, mut boundaries) = (0, 0, 0);
    for inst in &corpus {
        let (x, k) = (&inst.x, inst.k);
        let g = GalleryGraph::new(x, k);
        for (i, sigma) in x.simplices(k + 1).iter().enumerate() {
            let faces: Vec<usize> = sigma.facets().map(|f| x.index_of(&f).unwrap()).collect();
            let r = fill_number_in(&g, &faces, DEFAULT_FILL_BUDGET).unwrap();
            ensure(r.exact == Some(1), || format!("{}: Fill(∂σ_{i}) = {:?}", inst.name, r.exact))?;
            boundaries += 1;
        }
        if x.count(k + 1) > 18 {
            continue;
        }
        small += 1;
        let kv = verts(x, k);
        for terms in terminal_sets(x, k, &mut rng) {
            let oracle = brute_fill(x, k, &terms.iter().map(|&t| kv[t].clone()).collect::<Vec<_>>());
            match fill_number_in(&g, &terms, DEFAULT_FILL_BUDGET) {
                Ok(r) => ensure(r.exact.is_some() && r.exact == oracle, || {
                    format!("{}: terminals {terms:?}: exact {:?}, oracle {oracle:?}", inst.name, r.exact)
                })?,
                Err(hdist::Error::Unfillable(..)) => {
                    ensure(oracle.is_none(), || format!("{}: unfillable but oracle {oracle:?}", inst.name))?
                }
                Err(e) => return Err(format!("{}: {e}", inst.name)),
            }
            compared += 1;
        }
    }
    Ok(format!(
        "corpus of {}: {small} small instances, {compared} terminal sets match brute force; {boundaries} simplex boundaries have Fill 1",
        corpus.len()
    ))
}

/// The counting claim on the corpus, with ball sizes against the safe neighbour bound.
fn criterion_8() -> Outcome {
    let corpus = corpus();
    let (mut claim_instances, mut undefined) = (0, 0);
    let (mut literal_checked, mut literal_failed) = (0usize, Vec::new());
    for inst in &corpus {
        let (x, k) = (&inst.x, inst.k);
        let g = GalleryGraph::new(x, k);
        let d = g.max_degree();
        // balls: proven bound from at most D(k+2) neighbours, literal bound reported
        let r_max = 4usize;
        let mut literal_ok = true;
        for tau in 0..x.count(k) {
            ensure(g.neighbour_count(tau) <= d * (k + 2), || format!("{}: neighbour count above D(k+2)", inst.name))?;
            let balls = g.ball_sizes(tau, r_max);
            for (r, &size) in balls.iter().enumerate() {
                let safe: u128 = (0..=r as u32).map(|i| ((d * (k + 2)) as u128).pow(i)).sum();
                ensure(size as u128 <= safe, || format!("{}: |B(τ,{r})| = {size} > {safe}", inst.name))?;
                if (size as f64) > ((d * k.max(1)) as f64).powi(r as i32 + 1) {
                    literal_ok = false;
                }
            }
        }
        literal_checked += 1;
        if !literal_ok {
            literal_failed.push(inst.name.clone());
        }
        if !(x.is_pure() && g.is_connected()) {
            continue;
        }
        let Ok(fam) = build_family(x, k, FamilyChoice::Auto) else { continue };
        let bound_full = combinatorial_fill_bound(fam.len(), x.count(k), fam.s(), d, k);
        let bound_half = combinatorial_fill_bound(fam.len() / 2, x.count(k), fam.s(), d, k);
        let (Ok(bound_full), bound_half) = (bound_full, bound_half) else {
            undefined += 1;
            continue;
        };
        let fills: Vec<usize> = fam
            .members()
            .iter()
            .map(|b| {
                let t: Vec<usize> = b.faces().iter().map(|(s, _)| x.index_of(s).unwrap()).collect();
                fill_number_in(&g, &t, DEFAULT_FILL_BUDGET).unwrap().exact.expect("exact fill")
            })
            .collect();
        let best = *fills.iter().max().unwrap();
        ensure(best as f64 >= bound_full, || format!("{}: max Fill {best} < bound {bound_full}", inst.name))?;
        if let Ok(bh) = bound_half {
            // every half-size subfamily must contain a member reaching the bound
            let below = fills.iter().filter(|&&f| (f as f64) < bh).count();
            ensure(fam.len() / 2 == 0 || below < fam.len() / 2, || {
                format!("{}: {below} members below the half-family bound {bh}", inst.name)
            })?;
        }
        claim_instances += 1;
    }
    Ok(format!(
        "claim checked on {claim_instances} instances ({undefined} with D·max(k,1) <= 1 or s <= 1); \
         balls within the D(k+2) bound everywhere; literal (D·max(k,1))^(r+1) bound holds on {}/{literal_checked}, \
         violated on [{}]",
        literal_checked - literal_failed.len(),
        literal_failed.join(", ")
    ))
}

/// Exact `l |A| (k+1)! <= s (n+1)! |X^(n)|` with `l` recomputed from the oracle weights.
fn oracle_counting_chain(x: &SimplicialComplex, k: usize, members: &[Vec<Vec<u32>>]) -> (u128, u128, bool) {
    let w = oracle_weights(x, k);
    let kv = verts(x, k);
    let mut counts = vec![0u128; kv.len()];
    for faces in members {
        for f in faces {
            counts[kv.iter().position(|t| t == f).unwrap()] += 1;
        }
    }
    let (num, den) = counts
        .iter()
        .zip(&w)
        .filter(|(&c, _)| c > 0)
        .map(|(&c, &w)| (w as u128, c))
        .min_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)))
        .unwrap();
    let n = x.dim();
    let fact = |j: usize| (1..=j as u128).product::<u128>();
    let s = members.iter().map(Vec::len).max().unwrap() as u128;
    let lhs = num * members.len() as u128 * fact(k + 1);
    let rhs = den * s * fact(n + 1) * x.count(n) as u128;
    (num, den, lhs <= rhs)
}

/// Second-factor cap and the exact counting chain.
fn criterion_9() -> Outcome {
    let mut instances: Vec<(String, SimplicialComplex, usize)> =
        corpus().into_iter().map(|i| (i.name, i.x, i.k)).collect();
    for (i, (x, k, _)) in verified_complexes(90, 20)?.into_iter().enumerate() {
        instances.push((format!("verified_{i}"), x, k));
    }
    let (mut runs, mut capped) = (0, 0);
    let mut worst_ratio: f64 = 0.0;
    for (name, x, k) in &instances {
        if !x.is_pure() {
            continue;
        }
        let Ok(fam) = build_family(x, *k, FamilyChoice::Auto) else { continue };
        let t = theorem_distortion_bound(x, &fam).unwrap();
        let members: Vec<Vec<Vec<u32>>> = fam
            .members()
            .iter()
            .map(|b| b.faces().iter().map(|(s, _)| s.vertices().iter().map(|v| v.0).collect()).collect())
            .collect();
        let (num, den, chain) = oracle_counting_chain(x, *k, &members);
        ensure(*t.l.numer() * den == num * *t.l.denom(), || format!("{name}: l = {} vs oracle {num}/{den}", t.l))?;
        ensure(chain && t.counting_chain_holds, || format!("{name}: counting chain fails"))?;
        runs += 1;
        if let (Some(second), Some(cap)) = (t.second_factor, t.second_factor_cap) {
            worst_ratio = worst_ratio.max(second / cap);
            ensure(second <= cap * (1.0 + CAP_REL_TOL), || format!("{name}: second factor {second} > cap {cap}"))?;
            capped += 1;
        }
    }
    Ok(format!(
        "{runs} runs with exact counting chain; {capped} with a spectral gap, max second/cap = {worst_ratio:.4}"
    ))
}

/// Measured distortion against the theorem's lower bound on LM samples.
fn criterion_10() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut done, mut skipped, mut vacuous) = (0, 0, 0);
    let mut min_gap = f64::INFINITY;
    while done < 20 {
        ensure(skipped < 200, || "too many samples fail the hypotheses".into())?;
        let n = rng.random_range(10..=20);
        let p = [0.8, 0.85, 0.9, 0.95][rng.random_range(0..4)];
        let x = linial_meshulam(&LmParams { n, p, k: 1, seed: rng.random() }).unwrap();
        let fam = vertex_set_family(&x, 1).unwrap();
        let f = Embedding::gaussian(n, rng.random_range(2..=6), rng.random()).unwrap();
        let r = evaluate_distortion(&x, &fam, &f, DEFAULT_FILL_BUDGET).unwrap();
        let Some(bound) = r.theorem.bound else {
            skipped += 1;
            continue;
        };
        if !r.exact_fills {
            skipped += 1;
            continue;
        }
        ensure(r.distortion.lo >= bound, || format!("N={n} p={p}: distortion {:?} < bound {bound}", r.distortion))?;
        vacuous += usize::from(r.theorem.vacuous);
        min_gap = min_gap.min(r.distortion.lo - bound);
        done += 1;
    }
    within(start.elapsed(), 600)?;
    Ok(format!(
        "20 samples (N <= 20, p >= 0.8, {skipped} skipped), all consistent; {vacuous} bounds vacuous; min gap {min_gap:.3}; {:.1?}",
        start.elapsed()
    ))
}

/// Concentration of the simplex count and degrees.
fn criterion_11() -> Outcome {
    let start = Instant::now();
    let params = LmParams { n: 200, p: 0.5, k: 1, seed: 11 };
    let r = concentration_report(&params, 0.5, 100).unwrap();
    for e in &r.events {
        ensure(e.frequency == 1.0, || format!("event {} held in {} of trials", e.name, e.frequency))?;
    }
    let c: f64 = (200.0 * 199.0 * 198.0) / 6.0;
    let expected = 0.5 * c;
    let se = (c * 0.25 / 100.0).sqrt();
    ensure((r.expected_top_count - expected).abs() < 1e-6, || format!("expected count {}", r.expected_top_count))?;
    ensure((r.standard_error - se).abs() < 1e-9 * se, || format!("standard error {}", r.standard_error))?;
    let z = (r.mean_top_count - expected) / se;
    ensure(z.abs() <= 3.0, || format!("mean {} is {z:.2} standard errors from {expected}", r.mean_top_count))?;
    Ok(format!(
        "3 events in 100/100 trials; mean {:.1} vs {expected}, z = {z:.2}; {:.1?}",
        r.mean_top_count,
        start.elapsed()
    ))
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

/// Byte-identical JSON across repeated runs and thread counts.
fn criterion_12() -> Outcome {
    let run = || -> Vec<String> {
        let params = LmParams { n: 12, p: 0.8, k: 1, seed: 12 };
        let x = linial_meshulam(&params).unwrap();
        let fam = vertex_set_family(&x, 1).unwrap();
        let f = Embedding::gaussian(12, 4, 3).unwrap();
        let spec = hdist::EmbeddingSpec::Gaussian { m: 3, seed: 5 };
        vec![
            json::to_string(&x.to_json_file()).unwrap(),
            json::to_string(&spectrum(&x, 1, 1e-8).unwrap()).unwrap(),
            json::to_string(&evaluate_distortion(&x, &fam, &f, DEFAULT_FILL_BUDGET).unwrap()).unwrap(),
            json::to_string(
                &hdist::distortion::lm_distortion_experiment(&params, &spec, 3, DEFAULT_FILL_BUDGET).unwrap(),
            )
            .unwrap(),
            json::to_string(&concentration_report(&params, 0.5, 6).unwrap()).unwrap(),
        ]
    };
    let a = in_pool(1, run);
    let b = in_pool(4, run);
    let c = run();
    for (i, ((x, y), z)) in a.iter().zip(&b).zip(&c).enumerate() {
        ensure(x == y && y == z, || format!("output {i} differs between runs"))?;
    }
    let bytes: usize = a.iter().map(String::len).sum();
    Ok(format!("5 JSON outputs ({bytes} bytes) identical across 3 runs and 1/4/default threads"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("exact cochain algebra", criterion_1),
        ("adjointness and Rayleigh", criterion_2),
        ("k=0 reductions", criterion_3),
        ("Stokes equality", criterion_4),
        ("flat case and projection inequality", criterion_5),
        ("filling inequalities", criterion_6),
        ("fill oracle equivalence", criterion_7),
        ("counting claim and balls", criterion_8),
        ("second-factor cap", criterion_9),
        ("bound consistency", criterion_10),
        ("concentration", criterion_11),
        ("determinism", criterion_12),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != i + 1) {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
