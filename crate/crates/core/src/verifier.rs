//! Tree-gradedness of finite weighted graphs.
//!
//! A graph with a candidate cover by vertex sets is accepted when the cover
//! satisfies (T1), every piece is metrically convex, closest-point
//! projections onto pieces form a projection system in the (P'1)/(P'2)
//! form together with (P3), and every transverse geodesic triangle is a
//! tripod. Everything is exhaustive over vertices, pairs and triples; the
//! only bound is `cap`, the number of geodesics enumerated per pair.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_CAP: usize = 10_000;

pub type Path = Vec<usize>;

#[derive(Debug, Clone)]
pub struct MetricGraph {
    n: usize,
    adj: Vec<Vec<(usize, Scalar)>>,
    dist: Vec<Vec<Scalar>>,
}

impl MetricGraph {
    /// Parallel edges keep the lighter weight. Self-loops, non-positive
    /// weights and disconnected graphs are rejected.
    #[allow(clippy::needless_range_loop)]
    pub fn new(n: usize, edges: &[(usize, usize, Scalar)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadGraph("no vertices".into()));
        }
        let mut weight: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
        for (a, b, w) in edges {
            if *a >= n || *b >= n {
                return Err(Error::BadGraph(format!("edge ({a}, {b}) leaves 0..{n}")));
            }
            if a == b {
                return Err(Error::BadGraph(format!("self-loop at {a}")));
            }
            if !w.is_positive() {
                return Err(Error::BadGraph(format!("edge ({a}, {b}) has weight {w}")));
            }
            let key = (*a.min(b), *a.max(b));
            match weight.get(&key) {
                Some(old) if old <= w => {}
                _ => {
                    weight.insert(key, w.clone());
                }
            }
        }
        let mut adj = vec![Vec::new(); n];
        let mut d: Vec<Vec<Option<Scalar>>> = vec![vec![None; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = Some(Scalar::zero());
        }
        for ((a, b), w) in &weight {
            adj[*a].push((*b, w.clone()));
            adj[*b].push((*a, w.clone()));
            d[*a][*b] = Some(w.clone());
            d[*b][*a] = Some(w.clone());
        }
        for k in 0..n {
            for i in 0..n {
                let Some(ik) = d[i][k].clone() else { continue };
                for j in 0..n {
                    let Some(kj) = &d[k][j] else { continue };
                    let via = &ik + kj;
                    if d[i][j].as_ref().is_none_or(|cur| via < *cur) {
                        d[i][j] = Some(via);
                    }
                }
            }
        }
        let dist = d
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(j, x)| {
                        x.ok_or_else(|| {
                            Error::BadGraph(format!("vertices {i} and {j} are not connected"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(MetricGraph { n, adj, dist })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn d(&self, a: usize, b: usize) -> &Scalar {
        &self.dist[a][b]
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, Scalar)] {
        &self.adj[v]
    }

    pub fn path_weight(&self, path: &[usize]) -> Option<Scalar> {
        path.windows(2)
            .map(|w| {
                self.adj[w[0]]
                    .iter()
                    .find(|(x, _)| *x == w[1])
                    .map(|(_, wt)| wt.clone())
            })
            .sum()
    }

    /// Every shortest path from `u` to `v`, walking the shortest-path DAG
    /// with neighbours in increasing order.
    pub fn all_geodesics(&self, u: usize, v: usize, cap: usize) -> Result<Vec<Path>> {
        if cap == 0 {
            return Err(Error::Precondition("geodesic cap must be positive".into()));
        }
        if u >= self.n || v >= self.n {
            return Err(Error::BadGraph(format!(
                "vertex out of range 0..{}",
                self.n
            )));
        }
        let mut out = Vec::new();
        let mut stack = vec![u];
        self.extend_geodesics(&mut stack, v, cap, &mut out)
            .map_err(|_| Error::CapExceeded {
                cap,
                from: u,
                to: v,
            })?;
        Ok(out)
    }

    fn extend_geodesics(
        &self,
        stack: &mut Path,
        v: usize,
        cap: usize,
        out: &mut Vec<Path>,
    ) -> std::result::Result<(), ()> {
        let x = *stack.last().expect("starts non-empty");
        if x == v {
            if out.len() == cap {
                return Err(());
            }
            out.push(stack.clone());
            return Ok(());
        }
        let u = stack[0];
        for (y, w) in &self.adj[x] {
            if self.dist[u][x].clone() + w + &self.dist[*y][v] == self.dist[u][v] {
                stack.push(*y);
                self.extend_geodesics(stack, v, cap, out)?;
                stack.pop();
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceCover {
    pieces: Vec<BTreeSet<usize>>,
    containing: Vec<Vec<usize>>,
}

impl PieceCover {
    pub fn new(n: usize, pieces: &[Vec<usize>]) -> Result<Self> {
        let mut containing = vec![Vec::new(); n];
        let mut sets = Vec::with_capacity(pieces.len());
        for (i, p) in pieces.iter().enumerate() {
            if p.is_empty() {
                return Err(Error::BadCover(format!("piece {i} is empty")));
            }
            let set: BTreeSet<usize> = p.iter().copied().collect();
            for &v in &set {
                if v >= n {
                    return Err(Error::BadCover(format!(
                        "piece {i} names vertex {v} outside 0..{n}"
                    )));
                }
                containing[v].push(i);
            }
            sets.push(set);
        }
        if let Some(v) = containing.iter().position(Vec::is_empty) {
            return Err(Error::BadCover(format!("vertex {v} lies in no piece")));
        }
        Ok(PieceCover {
            pieces: sets,
            containing,
        })
    }

    pub fn pieces(&self) -> &[BTreeSet<usize>] {
        &self.pieces
    }

    /// Whether `path` meets every piece in at most one vertex.
    pub fn is_transverse(&self, path: &[usize]) -> bool {
        let mut hits = vec![0u32; self.pieces.len()];
        for &v in path {
            for &p in &self.containing[v] {
                hits[p] += 1;
                if hits[p] > 1 {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: String,
    #[serde(default)]
    pub pieces: Vec<usize>,
    #[serde(default)]
    pub vertices: Vec<usize>,
    #[serde(default)]
    pub paths: Vec<Path>,
}

impl Violation {
    fn new(axiom: &str, pieces: Vec<usize>, vertices: Vec<usize>, paths: Vec<Path>) -> Self {
        Violation {
            axiom: axiom.to_string(),
            pieces,
            vertices,
            paths,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub accepted: bool,
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        Verdict {
            accepted: violations.is_empty(),
            violations,
        }
    }

    pub fn has(&self, axiom: &str) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }
}

/// (T1): distinct pieces share at most one vertex.
pub fn check_t1(cover: &PieceCover) -> Vec<Violation> {
    let ps = cover.pieces();
    let mut out = Vec::new();
    for i in 0..ps.len() {
        for j in (i + 1)..ps.len() {
            let shared: Vec<usize> = ps[i].intersection(&ps[j]).copied().collect();
            if shared.len() >= 2 {
                out.push(Violation::new("T1", vec![i, j], shared, vec![]));
            }
        }
    }
    out
}

/// Pieces must be geodesic subsets: any vertex on a geodesic between two
/// vertices of a piece belongs to the piece.
pub fn check_convexity(graph: &MetricGraph, cover: &PieceCover) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, p) in cover.pieces().iter().enumerate() {
        let members: Vec<usize> = p.iter().copied().collect();
        for (a_idx, &a) in members.iter().enumerate() {
            for &b in &members[a_idx + 1..] {
                for w in 0..graph.len() {
                    if !p.contains(&w) && graph.d(a, w) + graph.d(w, b) == *graph.d(a, b) {
                        out.push(Violation::new("convexity", vec![i], vec![a, b, w], vec![]));
                    }
                }
            }
        }
    }
    out
}

/// Closest points of every vertex on piece `p`.
fn nearest(graph: &MetricGraph, p: &BTreeSet<usize>, x: usize) -> Vec<usize> {
    let best = p
        .iter()
        .map(|&q| graph.d(x, q))
        .min()
        .expect("pieces are non-empty");
    p.iter()
        .copied()
        .filter(|&q| graph.d(x, q) == best)
        .collect()
}

/// Closest-point projections as a projection system: unique nearest points
/// (`P1`), `π(x) = x` on the piece (`P'1`), the gate identity for pairs with
/// distinct projections (`P'2`), and single-point images of other pieces
/// (`P3`).
pub fn check_projection_system(graph: &MetricGraph, cover: &PieceCover) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = graph.len();
    let mut proj: Vec<Option<Vec<usize>>> = Vec::new();
    for (i, p) in cover.pieces().iter().enumerate() {
        let mut pi = Vec::with_capacity(n);
        let mut unique = true;
        for x in 0..n {
            let near = nearest(graph, p, x);
            if near.len() > 1 {
                unique = false;
                out.push(Violation::new(
                    "P1",
                    vec![i],
                    vec![x, near[0], near[1]],
                    vec![],
                ));
            }
            pi.push(near[0]);
        }
        proj.push(unique.then_some(pi));
    }
    for (i, p) in cover.pieces().iter().enumerate() {
        let Some(pi) = &proj[i] else { continue };
        for &x in p {
            if pi[x] != x {
                out.push(Violation::new("P'1", vec![i], vec![x, pi[x]], vec![]));
            }
        }
        for z1 in 0..n {
            for z2 in (z1 + 1)..n {
                let (q1, q2) = (pi[z1], pi[z2]);
                if q1 == q2 {
                    continue;
                }
                let legs = graph.d(z1, q1) + graph.d(q1, q2) + graph.d(q2, z2);
                if legs != *graph.d(z1, z2) {
                    out.push(Violation::new("P'2", vec![i], vec![z1, z2, q1, q2], vec![]));
                }
            }
        }
        for (j, q) in cover.pieces().iter().enumerate() {
            if i == j {
                continue;
            }
            let image: BTreeSet<usize> = q.iter().map(|&v| pi[v]).collect();
            if image.len() > 1 {
                out.push(Violation::new(
                    "P3",
                    vec![i, j],
                    image.into_iter().collect(),
                    vec![],
                ));
            }
        }
    }
    out
}

/// Geodesics for every unordered pair, `u < v`, computed once.
struct GeodesicTable {
    paths: BTreeMap<(usize, usize), Vec<Path>>,
}

impl GeodesicTable {
    fn new(graph: &MetricGraph, cap: usize) -> Result<Self> {
        let mut paths = BTreeMap::new();
        for u in 0..graph.len() {
            for v in (u + 1)..graph.len() {
                paths.insert((u, v), graph.all_geodesics(u, v, cap)?);
            }
        }
        Ok(GeodesicTable { paths })
    }

    /// Geodesics oriented from `a` to `b`.
    fn between(&self, a: usize, b: usize) -> Vec<Path> {
        if a < b {
            self.paths[&(a, b)].clone()
        } else {
            self.paths[&(b, a)]
                .iter()
                .map(|p| p.iter().rev().copied().collect())
                .collect()
        }
    }
}

fn branch_point(x: &[usize], y: &[usize]) -> usize {
    let k = x.iter().zip(y).take_while(|(a, b)| a == b).count();
    x[k - 1]
}

/// Whether the triangle with sides `ab`, `bc`, `ca` (each oriented along the
/// name) is a tripod: the three branch points coincide.
pub fn is_tripod(ab: &[usize], bc: &[usize], ca: &[usize]) -> bool {
    let rev = |p: &[usize]| -> Path { p.iter().rev().copied().collect() };
    let ma = branch_point(ab, &rev(ca));
    let mb = branch_point(bc, &rev(ab));
    let mc = branch_point(ca, &rev(bc));
    ma == mb && mb == mc
}

/// Every geodesic triangle whose three sides are transverse is a tripod.
/// At most one violation is reported per vertex triple.
pub fn check_transverse_free(
    graph: &MetricGraph,
    cover: &PieceCover,
    cap: usize,
) -> Result<Vec<Violation>> {
    let table = GeodesicTable::new(graph, cap)?;
    let n = graph.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let ab: Vec<Path> = table
                .between(a, b)
                .into_iter()
                .filter(|p| cover.is_transverse(p))
                .collect();
            if ab.is_empty() {
                continue;
            }
            for c in (b + 1)..n {
                let bc: Vec<Path> = table
                    .between(b, c)
                    .into_iter()
                    .filter(|p| cover.is_transverse(p))
                    .collect();
                let ca: Vec<Path> = table
                    .between(c, a)
                    .into_iter()
                    .filter(|p| cover.is_transverse(p))
                    .collect();
                let bad = ab.iter().find_map(|x| {
                    bc.iter().find_map(|y| {
                        ca.iter()
                            .find(|z| !is_tripod(x, y, z))
                            .map(|z| vec![x.clone(), y.clone(), z.clone()])
                    })
                });
                if let Some(paths) = bad {
                    out.push(Violation::new(
                        "transverse-free",
                        vec![],
                        vec![a, b, c],
                        paths,
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// A pair joined by a transverse geodesic is joined by no other geodesic.
pub fn check_unique_transverse_geodesic(
    graph: &MetricGraph,
    cover: &PieceCover,
    cap: usize,
) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    for u in 0..graph.len() {
        for v in (u + 1)..graph.len() {
            let paths = graph.all_geodesics(u, v, cap)?;
            if paths.len() > 1 {
                if let Some(t) = paths.iter().position(|p| cover.is_transverse(p)) {
                    let other = if t == 0 { 1 } else { 0 };
                    out.push(Violation::new(
                        "unique-transverse",
                        vec![],
                        vec![u, v],
                        vec![paths[t].clone(), paths[other].clone()],
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// (T1), convexity, the projection system and transverse-freeness together.
pub fn verify(graph: &MetricGraph, cover: &PieceCover, cap: usize) -> Result<Verdict> {
    let mut violations = check_t1(cover);
    violations.extend(check_convexity(graph, cover));
    violations.extend(check_projection_system(graph, cover));
    violations.extend(check_transverse_free(graph, cover, cap)?);
    Ok(Verdict::from_violations(violations))
}

/// Wire form: `{"n":5,"edges":[[0,1,"1/1"],...],"pieces":[[0,1,2],[2,3,4]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub n: usize,
    pub edges: Vec<(usize, usize, Scalar)>,
    pub pieces: Vec<Vec<usize>>,
}

impl GraphSpec {
    pub fn build(&self) -> Result<(MetricGraph, PieceCover)> {
        Ok((
            MetricGraph::new(self.n, &self.edges)?,
            PieceCover::new(self.n, &self.pieces)?,
        ))
    }
}
