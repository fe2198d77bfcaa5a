//! Stable graphs up to isomorphism and decorated spanning sets.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use crate::canon::{plain_form, relabel_canonically, CanonicalKey, Colors};
use crate::decorated::DecoratedGraph;
use crate::graph::StableGraph;
use crate::integrals::EvaluationKind;

/// The moduli space a pairing lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpaceKind {
    Mbar,
    Ct,
    Rt,
}

impl SpaceKind {
    pub fn evaluation(self) -> EvaluationKind {
        match self {
            SpaceKind::Mbar => EvaluationKind::Fundamental,
            SpaceKind::Ct => EvaluationKind::LambdaG,
            SpaceKind::Rt => EvaluationKind::LambdaGLambdaGMinus1,
        }
    }

    /// Top degree of the pairing on `(g, n)`.
    pub fn top_degree(self, g: u32, n: usize) -> i64 {
        self.evaluation().top_degree(g, n)
    }

    pub fn admits(self, graph: &StableGraph) -> bool {
        match self {
            SpaceKind::Mbar => true,
            SpaceKind::Ct => graph.is_tree(),
            SpaceKind::Rt => {
                let g = graph.genus();
                graph.is_tree()
                    && (g == 0 || graph.genera().iter().filter(|&&x| x > 0).count() == 1)
                    && (g == 0 || graph.genera().contains(&g))
            }
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceKind::Mbar => "mbar",
            SpaceKind::Ct => "ct",
            SpaceKind::Rt => "rt",
        })
    }
}

impl FromStr for SpaceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mbar" => Ok(SpaceKind::Mbar),
            "ct" => Ok(SpaceKind::Ct),
            "rt" => Ok(SpaceKind::Rt),
            other => Err(format!("unknown space {other:?}")),
        }
    }
}

type GraphList = Arc<Vec<StableGraph>>;

static GRAPHS: Lazy<Mutex<HashMap<(u32, usize, usize), GraphList>>> = Lazy::new(Default::default);

/// All stable graphs of genus `g` with `n` legs and exactly `edges` edges,
/// one canonical representative per isomorphism class, sorted by key.
pub fn stable_graphs(g: u32, n: usize, edges: usize) -> GraphList {
    if let Some(list) = GRAPHS.lock().get(&(g, n, edges)) {
        return list.clone();
    }
    let list: GraphList = if 2 * g as i64 - 2 + n as i64 <= 0 {
        Arc::new(Vec::new())
    } else if edges == 0 {
        Arc::new(vec![canonical(&StableGraph::smooth(g, n).expect("stable"))])
    } else {
        let mut found: BTreeMap<CanonicalKey, StableGraph> = BTreeMap::new();
        for base in stable_graphs(g, n, edges - 1).iter() {
            for d in degenerations(base) {
                let key = plain_form(&d).key;
                found.entry(key).or_insert_with(|| canonical(&d));
            }
        }
        Arc::new(found.into_values().collect())
    };
    GRAPHS.lock().insert((g, n, edges), list.clone());
    list
}

fn canonical(g: &StableGraph) -> StableGraph {
    let form = plain_form(g);
    let psi = vec![0; g.num_half_edges()];
    let kappa = vec![Vec::new(); g.num_vertices()];
    relabel_canonically(g, Colors { psi: &psi, kappa: &kappa }, &form.leaves[0]).0
}

/// All graphs obtained from `g` by adding one edge at a single vertex.
pub(crate) fn degenerations(g: &StableGraph) -> Vec<StableGraph> {
    let mut out = Vec::new();
    let nh = g.num_half_edges();
    for v in 0..g.num_vertices() {
        let gv = g.vertex_genus(v);
        if gv >= 1 {
            let mut genera = g.genera().to_vec();
            genera[v] -= 1;
            let mut vertex_of = g.vertex_of().to_vec();
            vertex_of.extend([v, v]);
            let mut involution = g.involution().to_vec();
            involution.extend([nh + 1, nh]);
            out.push(StableGraph::from_parts_unchecked(
                genera,
                vertex_of,
                involution,
                g.legs().to_vec(),
            ));
        }
        let at = g.half_edges_at(v);
        let m = at.len();
        let w = g.num_vertices();
        for mask in 0u64..(1u64 << m) {
            let t = mask.count_ones() as i64;
            for g1 in 0..=gv {
                let g2 = gv - g1;
                if 2 * g1 as i64 - 1 + t <= 0 || 2 * g2 as i64 - 1 + (m as i64 - t) <= 0 {
                    continue;
                }
                let mut genera = g.genera().to_vec();
                genera[v] = g1;
                genera.push(g2);
                let mut vertex_of = g.vertex_of().to_vec();
                for (i, &h) in at.iter().enumerate() {
                    if mask >> i & 1 == 0 {
                        vertex_of[h] = w;
                    }
                }
                vertex_of.extend([v, w]);
                let mut involution = g.involution().to_vec();
                involution.extend([nh + 1, nh]);
                out.push(StableGraph::from_parts_unchecked(
                    genera,
                    vertex_of,
                    involution,
                    g.legs().to_vec(),
                ));
            }
        }
    }
    out
}

/// Largest number of edges a stable graph of type `(g, n)` can have.
pub fn max_edges(g: u32, n: usize) -> usize {
    (3 * g as i64 - 3 + n as i64).max(0) as usize
}

/// Exclusive upper bound on the degree of the monomial at a vertex of genus
/// `g` with `n` half-edges in the spanning set.
pub fn decoration_bound(g: u32, n: usize) -> usize {
    let b = g as i64 + i64::from(g == 0) - i64::from(n == 0);
    b.max(0) as usize
}

/// Decorated graphs of codimension `k` on the space, with every vertex
/// monomial below [`decoration_bound`], one per isomorphism class. Sorted by
/// edge count, then by canonical key.
pub fn decorated_basis(g: u32, n: usize, k: usize, space: SpaceKind) -> Vec<DecoratedGraph> {
    let mut out = Vec::new();
    for e in 0..=k.min(max_edges(g, n)) {
        let mut found: BTreeMap<CanonicalKey, DecoratedGraph> = BTreeMap::new();
        for graph in stable_graphs(g, n, e).iter() {
            if !space.admits(graph) {
                continue;
            }
            for d in decorations(graph, k - e) {
                let (key, canon) = d.canonicalize();
                found.entry(key).or_insert(canon);
            }
        }
        out.extend(found.into_values());
    }
    out
}

/// All decorations of total degree `deg` respecting the per-vertex bound.
fn decorations(graph: &StableGraph, deg: usize) -> Vec<DecoratedGraph> {
    let nv = graph.num_vertices();
    let valences = graph.valences();
    let bounds: Vec<usize> = (0..nv)
        .map(|v| decoration_bound(graph.vertex_genus(v), valences[v]))
        .collect();
    // Vertex monomials of each degree, as (ψ on incident half-edges, κ multiset).
    let mut per_vertex: Vec<Vec<Vec<(Vec<(usize, u32)>, Vec<u32>)>>> = Vec::with_capacity(nv);
    for v in 0..nv {
        let at = graph.half_edges_at(v);
        let mut by_degree = Vec::new();
        for d in 0..bounds[v].min(deg + 1) {
            by_degree.push(vertex_monomials(&at, d));
        }
        per_vertex.push(by_degree);
    }
    let mut out = Vec::new();
    let mut psi = vec![0u32; graph.num_half_edges()];
    let mut kappa = vec![Vec::new(); nv];
    fill(graph, &per_vertex, 0, deg, &mut psi, &mut kappa, &mut out);
    out
}

fn fill(
    graph: &StableGraph,
    per_vertex: &[Vec<Vec<(Vec<(usize, u32)>, Vec<u32>)>>],
    v: usize,
    left: usize,
    psi: &mut Vec<u32>,
    kappa: &mut Vec<Vec<u32>>,
    out: &mut Vec<DecoratedGraph>,
) {
    if v == per_vertex.len() {
        if left == 0 {
            out.push(DecoratedGraph::from_parts_unchecked(
                graph.clone(),
                psi.clone(),
                kappa.clone(),
            ));
        }
        return;
    }
    for (d, monos) in per_vertex[v].iter().enumerate() {
        if d > left {
            break;
        }
        for (ps, ks) in monos {
            for &(h, e) in ps {
                psi[h] = e;
            }
            kappa[v] = ks.clone();
            fill(graph, per_vertex, v + 1, left - d, psi, kappa, out);
            for &(h, _) in ps {
                psi[h] = 0;
            }
        }
    }
    kappa[v].clear();
}

/// Monomials of degree `d` in the ψ-classes of `half_edges` and the κ-classes.
fn vertex_monomials(half_edges: &[usize], d: usize) -> Vec<(Vec<(usize, u32)>, Vec<u32>)> {
    let mut out = Vec::new();
    for psi_deg in 0..=d {
        let mut psis = Vec::new();
        compositions(half_edges, psi_deg, &mut Vec::new(), &mut psis);
        let kappas = partitions(d - psi_deg);
        for p in &psis {
            for k in &kappas {
                out.push((p.clone(), k.clone()));
            }
        }
    }
    out
}

fn compositions(hs: &[usize], d: usize, cur: &mut Vec<(usize, u32)>, out: &mut Vec<Vec<(usize, u32)>>) {
    if hs.is_empty() {
        if d == 0 {
            out.push(cur.clone());
        }
        return;
    }
    for e in 0..=d {
        if e > 0 {
            cur.push((hs[0], e as u32));
        }
        compositions(&hs[1..], d - e, cur, out);
        if e > 0 {
            cur.pop();
        }
    }
}

/// Partitions of `d` as sorted lists of positive parts.
fn partitions(d: usize) -> Vec<Vec<u32>> {
    fn go(d: usize, max: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if d == 0 {
            let mut p = cur.clone();
            p.sort_unstable();
            out.push(p);
            return;
        }
        for part in (1..=d.min(max)).rev() {
            cur.push(part as u32);
            go(d - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(d, d, &mut Vec::new(), &mut out);
    out
}
