//! Canonical labeling, automorphism counting and isomorphism enumeration for
//! (optionally decorated) stable graphs.
//!
//! Vertices are ordered by color refinement followed by an exhaustive
//! individualization search. Every leaf of the search gives a vertex order
//! and a certificate; the smallest certificate is the canonical key. Leaves
//! sharing that certificate differ by a vertex automorphism, and the
//! remaining automorphisms permute parallel edges and flip loops.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::StableGraph;

/// Canonical key of a graph up to isomorphism respecting leg labels and
/// decorations.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalKey(pub Vec<u32>);

/// Decoration data seen by the canonical form: ψ-exponents per half-edge and
/// sorted κ-index multisets per vertex. Plain graphs use zeros and empty lists.
#[derive(Clone, Copy, Debug)]
pub struct Colors<'a> {
    pub psi: &'a [u32],
    pub kappa: &'a [Vec<u32>],
}

#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub key: CanonicalKey,
    /// Order of the automorphism group, including half-edge symmetries.
    pub aut: u64,
    /// Vertex orders (position -> vertex) of all leaves with the minimal certificate.
    pub leaves: Vec<Vec<usize>>,
}

struct Prepared {
    /// Encoded vertex invariant, excluding refinement colors.
    invariants: Vec<Vec<u32>>,
    /// For each ordered pair of distinct adjacent vertices, the sorted edge
    /// types `(psi at source, psi at target)`.
    adjacency: Vec<BTreeMap<usize, Vec<(u32, u32)>>>,
}

fn prepare(g: &StableGraph, c: Colors<'_>) -> Prepared {
    let nv = g.num_vertices();
    let mut legs: Vec<Vec<(u32, u32)>> = vec![Vec::new(); nv];
    for (i, &h) in g.legs().iter().enumerate() {
        legs[g.vertex(h)].push((i as u32 + 1, c.psi[h]));
    }
    let mut loops: Vec<Vec<(u32, u32)>> = vec![Vec::new(); nv];
    let mut adjacency: Vec<BTreeMap<usize, Vec<(u32, u32)>>> = vec![BTreeMap::new(); nv];
    for (h, k) in g.edges() {
        let (u, v) = (g.vertex(h), g.vertex(k));
        let (a, b) = (c.psi[h], c.psi[k]);
        if u == v {
            loops[u].push((a.min(b), a.max(b)));
        } else {
            adjacency[u].entry(v).or_default().push((a, b));
            adjacency[v].entry(u).or_default().push((b, a));
        }
    }
    let valences = g.valences();
    let invariants = (0..nv)
        .map(|v| {
            let mut inv = vec![g.vertex_genus(v), valences[v] as u32];
            inv.push(c.kappa[v].len() as u32);
            inv.extend(&c.kappa[v]);
            let mut l = legs[v].clone();
            l.sort_unstable();
            inv.push(l.len() as u32);
            for (a, b) in l {
                inv.extend([a, b]);
            }
            loops[v].sort_unstable();
            inv.push(loops[v].len() as u32);
            for &(a, b) in &loops[v] {
                inv.extend([a, b]);
            }
            inv
        })
        .collect();
    for row in &mut adjacency {
        for types in row.values_mut() {
            types.sort_unstable();
        }
    }
    Prepared {
        invariants,
        adjacency,
    }
}

/// Replaces colors by dense ranks of the given signatures.
fn rank_by<T: Ord + Clone>(sigs: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = sigs.to_vec();
    sorted.sort();
    sorted.dedup();
    sigs.iter()
        .map(|s| sorted.binary_search(s).expect("present"))
        .collect()
}

fn refine(p: &Prepared, mut colors: Vec<usize>) -> Vec<usize> {
    let mut cells = count_cells(&colors);
    loop {
        let sigs: Vec<(usize, Vec<(usize, &Vec<(u32, u32)>)>)> = (0..colors.len())
            .map(|v| {
                let mut nb: Vec<(usize, &Vec<(u32, u32)>)> =
                    p.adjacency[v].iter().map(|(&w, t)| (colors[w], t)).collect();
                nb.sort();
                (colors[v], nb)
            })
            .collect();
        let next = rank_by(&sigs);
        let next_cells = count_cells(&next);
        colors = next;
        if next_cells == cells {
            return colors;
        }
        cells = next_cells;
    }
}

fn count_cells(colors: &[usize]) -> usize {
    colors.iter().copied().max().map_or(0, |m| m + 1)
}

fn certificate(p: &Prepared, order: &[usize]) -> Vec<u32> {
    let nv = order.len();
    let mut pos = vec![0; nv];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut cert = vec![nv as u32];
    for &v in order {
        cert.push(p.invariants[v].len() as u32);
        cert.extend(&p.invariants[v]);
    }
    for (i, &v) in order.iter().enumerate() {
        let mut row: Vec<(usize, &Vec<(u32, u32)>)> = p.adjacency[v]
            .iter()
            .filter(|(&w, _)| pos[w] > i)
            .map(|(&w, t)| (pos[w], t))
            .collect();
        row.sort();
        for (j, types) in row {
            cert.extend([i as u32, j as u32, types.len() as u32]);
            for &(a, b) in types {
                cert.extend([a, b]);
            }
        }
    }
    cert
}

fn search(p: &Prepared, colors: Vec<usize>, best: &mut Option<Vec<u32>>, leaves: &mut Vec<Vec<usize>>) {
    let colors = refine(p, colors);
    let nv = colors.len();
    let ncells = count_cells(&colors);
    if ncells == nv {
        let mut order = vec![0; nv];
        for (v, &c) in colors.iter().enumerate() {
            order[c] = v;
        }
        let cert = certificate(p, &order);
        match best {
            Some(b) if cert > *b => {}
            Some(b) if cert == *b => leaves.push(order),
            _ => {
                *best = Some(cert);
                leaves.clear();
                leaves.push(order);
            }
        }
        return;
    }
    let mut sizes = vec![0usize; ncells];
    for &c in &colors {
        sizes[c] += 1;
    }
    let target = (0..ncells)
        .filter(|&c| sizes[c] > 1)
        .min_by_key(|&c| (sizes[c], c))
        .expect("non-discrete partition has a nontrivial cell");
    for v in 0..nv {
        if colors[v] != target {
            continue;
        }
        let next: Vec<usize> = colors
            .iter()
            .enumerate()
            .map(|(u, &c)| if u == v { 2 * c } else { 2 * c + 1 })
            .collect();
        search(p, rank_by(&next), best, leaves);
    }
}

/// Number of half-edge permutations fixing every vertex and all decorations.
fn kernel_order(g: &StableGraph, c: Colors<'_>) -> u64 {
    let mut groups: BTreeMap<(usize, usize, u32, u32), u64> = BTreeMap::new();
    let mut flips = 0u32;
    for (h, k) in g.edges() {
        let (mut u, mut v, mut a, mut b) = (g.vertex(h), g.vertex(k), c.psi[h], c.psi[k]);
        if (u, a) > (v, b) {
            std::mem::swap(&mut u, &mut v);
            std::mem::swap(&mut a, &mut b);
        }
        if u == v && a == b {
            flips += 1;
        }
        *groups.entry((u, v, a, b)).or_default() += 1;
    }
    let mut order = 1u64 << flips;
    for &m in groups.values() {
        order *= (1..=m).product::<u64>();
    }
    order
}

pub fn canonical_form(g: &StableGraph, c: Colors<'_>) -> CanonicalForm {
    let p = prepare(g, c);
    let init = rank_by(&p.invariants);
    let mut best = None;
    let mut leaves = Vec::new();
    search(&p, init, &mut best, &mut leaves);
    let aut = leaves.len() as u64 * kernel_order(g, c);
    let mut key = vec![g.genus(), g.num_legs() as u32];
    key.extend(best.expect("search reaches a leaf"));
    CanonicalForm {
        key: CanonicalKey(key),
        aut,
        leaves,
    }
}

/// Canonical form of an undecorated graph.
pub fn plain_form(g: &StableGraph) -> CanonicalForm {
    let psi = vec![0; g.num_half_edges()];
    let kappa = vec![Vec::new(); g.num_vertices()];
    canonical_form(g, Colors { psi: &psi, kappa: &kappa })
}

pub fn automorphism_order(g: &StableGraph) -> u64 {
    plain_form(g).aut
}

/// Assigns each half-edge of `g` a slot in the canonical half-edge order
/// induced by the vertex order `order`: legs by label, then for each
/// position its loops, then edges to later positions. Returns
/// `(vertex position, half-edge slot)` maps.
pub fn canonical_slots(g: &StableGraph, c: Colors<'_>, order: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let nv = order.len();
    let mut pos = vec![0; nv];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut slot = vec![usize::MAX; g.num_half_edges()];
    for (i, &h) in g.legs().iter().enumerate() {
        slot[h] = i;
    }
    // (position a, position b, psi at a, psi at b, half-edge at a, half-edge at b)
    let mut edges: Vec<(usize, usize, u32, u32, usize, usize)> = g
        .edges()
        .into_iter()
        .map(|(h, k)| {
            let (mut h, mut k) = (h, k);
            let key = |x: usize| (pos[g.vertex(x)], c.psi[x]);
            if key(h) > key(k) {
                std::mem::swap(&mut h, &mut k);
            }
            (pos[g.vertex(h)], pos[g.vertex(k)], c.psi[h], c.psi[k], h, k)
        })
        .collect();
    edges.sort_unstable();
    let mut next = g.num_legs();
    for &(_, _, _, _, h, k) in &edges {
        slot[h] = next;
        slot[k] = next + 1;
        next += 2;
    }
    (pos, slot)
}

/// Rebuilds the graph in canonical order. Returns the new graph together with
/// the half-edge map old -> new.
pub fn relabel_canonically(g: &StableGraph, c: Colors<'_>, order: &[usize]) -> (StableGraph, Vec<usize>, Vec<usize>) {
    let (pos, slot) = canonical_slots(g, c, order);
    (g.relabeled(&pos, &slot), pos, slot)
}

/// Half-edge permutations of `g` that fix all vertices and decorations.
fn kernel_elements(g: &StableGraph, c: Colors<'_>) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<(usize, usize, u32, u32), Vec<(usize, usize)>> = BTreeMap::new();
    for (h, k) in g.edges() {
        let (mut h, mut k) = (h, k);
        if (g.vertex(h), c.psi[h]) > (g.vertex(k), c.psi[k]) {
            std::mem::swap(&mut h, &mut k);
        }
        groups
            .entry((g.vertex(h), g.vertex(k), c.psi[h], c.psi[k]))
            .or_default()
            .push((h, k));
    }
    let mut out = vec![(0..g.num_half_edges()).collect::<Vec<usize>>()];
    for (&(u, v, a, b), list) in &groups {
        let flippable = u == v && a == b;
        let mut next = Vec::new();
        for perm in permutations(list.len()) {
            let nflip = if flippable { 1usize << list.len() } else { 1 };
            for mask in 0..nflip {
                for base in &out {
                    let mut m = base.clone();
                    for (i, &(h, k)) in list.iter().enumerate() {
                        let (th, tk) = list[perm[i]];
                        if mask >> i & 1 == 1 {
                            m[h] = tk;
                            m[k] = th;
                        } else {
                            m[h] = th;
                            m[k] = tk;
                        }
                    }
                    next.push(m);
                }
            }
        }
        out = next;
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    permute(&mut cur, 0, &mut out);
    out
}

fn permute(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == cur.len() {
        out.push(cur.clone());
        return;
    }
    for i in k..cur.len() {
        cur.swap(k, i);
        permute(cur, k + 1, out);
        cur.swap(k, i);
    }
}

/// An isomorphism `source -> target` given by vertex and half-edge maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub vertex: Vec<usize>,
    pub half_edge: Vec<usize>,
}

/// Precomputed data for repeatedly finding isomorphisms onto a fixed graph.
#[derive(Clone, Debug)]
pub struct IsoTarget {
    graph: StableGraph,
    key: CanonicalKey,
    /// For each minimal leaf: position -> vertex and canonical slot -> half-edge.
    inverse_maps: Vec<(Vec<usize>, Vec<usize>)>,
    /// Half-edge symmetries of the canonical graph fixing vertices.
    kernel: Vec<Vec<usize>>,
}

impl IsoTarget {
    pub fn new(graph: &StableGraph) -> Self {
        let psi = vec![0; graph.num_half_edges()];
        let kappa = vec![Vec::new(); graph.num_vertices()];
        let c = Colors { psi: &psi, kappa: &kappa };
        let form = canonical_form(graph, c);
        let mut inverse_maps = Vec::new();
        let mut canon = None;
        for order in &form.leaves {
            let (pos, slot) = canonical_slots(graph, c, order);
            let mut vinv = vec![0; pos.len()];
            for (v, &p) in pos.iter().enumerate() {
                vinv[p] = v;
            }
            let mut hinv = vec![0; slot.len()];
            for (h, &s) in slot.iter().enumerate() {
                hinv[s] = h;
            }
            if canon.is_none() {
                canon = Some(graph.relabeled(&pos, &slot));
            }
            inverse_maps.push((vinv, hinv));
        }
        let canon = canon.expect("at least one leaf");
        let cpsi = vec![0; canon.num_half_edges()];
        let kernel = kernel_elements(&canon, Colors { psi: &cpsi, kappa: &kappa });
        IsoTarget {
            graph: graph.clone(),
            key: form.key,
            inverse_maps,
            kernel,
        }
    }

    pub fn graph(&self) -> &StableGraph {
        &self.graph
    }

    pub fn key(&self) -> &CanonicalKey {
        &self.key
    }

    pub fn automorphism_order(&self) -> usize {
        self.inverse_maps.len() * self.kernel.len()
    }

    /// All isomorphisms from `source` onto the target graph.
    pub fn isomorphisms_from(&self, source: &StableGraph) -> Vec<Isomorphism> {
        if source.num_vertices() != self.graph.num_vertices()
            || source.num_half_edges() != self.graph.num_half_edges()
            || source.genus() != self.graph.genus()
            || source.num_legs() != self.graph.num_legs()
        {
            return Vec::new();
        }
        let form = plain_form(source);
        if form.key != self.key {
            return Vec::new();
        }
        let psi = vec![0; source.num_half_edges()];
        let kappa = vec![Vec::new(); source.num_vertices()];
        let (pos, slot) = canonical_slots(source, Colors { psi: &psi, kappa: &kappa }, &form.leaves[0]);
        let mut out = Vec::with_capacity(self.automorphism_order());
        for (vinv, hinv) in &self.inverse_maps {
            for k in &self.kernel {
                let vertex = pos.iter().map(|&p| vinv[p]).collect();
                let half_edge = slot.iter().map(|&s| hinv[k[s]]).collect();
                out.push(Isomorphism { vertex, half_edge });
            }
        }
        out
    }
}
