//! G-structures: identifications of a graph `A` as a specialization of `G`,
//! and generic pairs of them.

use std::collections::BTreeSet;

use crate::canon::{plain_form, IsoTarget};
use crate::enumeration::stable_graphs;
use crate::error::{Result, StrataError};
use crate::graph::{StableGraph, UnionFind};

/// A triple `(α, β, γ)`: `alpha` maps vertices of `A` onto vertices of `G`,
/// `beta` embeds the half-edges of `G` into those of `A`, and `gamma` sends
/// every half-edge of `A` outside the image of `beta` to a vertex of `G`
/// (`None` on the image of `beta`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GStructure {
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
    pub gamma: Vec<Option<usize>>,
}

impl GStructure {
    pub fn image(&self, num_half_edges: usize) -> Vec<bool> {
        let mut img = vec![false; num_half_edges];
        for &h in &self.beta {
            img[h] = true;
        }
        img
    }

    /// Checks the defining conditions against `g` and `a`.
    pub fn verify(&self, g: &StableGraph, a: &StableGraph) -> bool {
        if self.alpha.len() != a.num_vertices()
            || self.beta.len() != g.num_half_edges()
            || self.gamma.len() != a.num_half_edges()
        {
            return false;
        }
        if self.alpha.iter().any(|&v| v >= g.num_vertices()) {
            return false;
        }
        let img = self.image(a.num_half_edges());
        if img.iter().filter(|&&b| b).count() != g.num_half_edges() {
            return false;
        }
        for h in 0..g.num_half_edges() {
            let ha = self.beta[h];
            if self.beta[g.partner(h)] != a.partner(ha) {
                return false;
            }
            if self.alpha[a.vertex(ha)] != g.vertex(h) {
                return false;
            }
        }
        if g.num_legs() != a.num_legs() {
            return false;
        }
        if g.legs().iter().zip(a.legs()).any(|(&hg, &ha)| self.beta[hg] != ha) {
            return false;
        }
        for h in 0..a.num_half_edges() {
            match (img[h], self.gamma[h]) {
                (true, None) => {}
                (false, Some(v)) => {
                    if v != self.alpha[a.vertex(h)] || a.is_leg(h) || img[a.partner(h)] {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        // Each fiber, with the edges sent to its vertex, is connected of the right genus.
        let mut uf = UnionFind::new(a.num_vertices());
        let mut edges_in = vec![0i64; g.num_vertices()];
        for (h, k) in a.edges() {
            if let Some(v) = self.gamma[h] {
                uf.union(a.vertex(h), a.vertex(k));
                edges_in[v] += 1;
            }
        }
        for v in 0..g.num_vertices() {
            let fiber: Vec<usize> = (0..a.num_vertices()).filter(|&w| self.alpha[w] == v).collect();
            if fiber.is_empty() {
                return false;
            }
            let root = uf.find(fiber[0]);
            if fiber.iter().any(|&w| uf.find(w) != root) {
                return false;
            }
            let genus: i64 = fiber.iter().map(|&w| a.vertex_genus(w) as i64).sum::<i64>() + edges_in[v]
                - fiber.len() as i64
                + 1;
            if genus != g.vertex_genus(v) as i64 {
                return false;
            }
        }
        true
    }
}

fn check_compatible(g: &StableGraph, a: &StableGraph) -> Result<()> {
    if g.num_legs() != a.num_legs() {
        return Err(StrataError::LabelMismatch);
    }
    if g.genus() != a.genus() {
        return Err(StrataError::GenusMismatch(g.genus(), a.genus()));
    }
    Ok(())
}

/// Subsets of `items` of size `k`, in lexicographic order.
pub(crate) fn subsets<T: Copy>(items: &[T], k: usize) -> Vec<Vec<T>> {
    fn go<T: Copy>(items: &[T], k: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= items.len() {
        go(items, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// Builds the structure given by contracting `contracted` (edges of `a` named
/// by one half-edge) and an isomorphism of the contraction onto `g`.
pub(crate) fn structures_for_contraction(
    a: &StableGraph,
    contracted: &[usize],
    target: &IsoTarget,
) -> Vec<GStructure> {
    let c = a.contract(contracted);
    let isos = target.isomorphisms_from(&c.graph);
    if isos.is_empty() {
        return Vec::new();
    }
    let g = target.graph();
    let mut inverse = vec![usize::MAX; c.graph.num_half_edges()];
    for (h, m) in c.half_edge_map.iter().enumerate() {
        if let Some(m) = m {
            inverse[*m] = h;
        }
    }
    isos.into_iter()
        .map(|iso| {
            let alpha: Vec<usize> = c.vertex_map.iter().map(|&w| iso.vertex[w]).collect();
            let mut beta = vec![0; g.num_half_edges()];
            for (hc, &hg) in iso.half_edge.iter().enumerate() {
                beta[hg] = inverse[hc];
            }
            let gamma = c
                .half_edge_map
                .iter()
                .enumerate()
                .map(|(h, m)| m.is_none().then(|| alpha[a.vertex(h)]))
                .collect();
            GStructure { alpha, beta, gamma }
        })
        .collect()
}

/// All `G`-structures on `A` (not taken modulo automorphisms of `A`).
pub fn enumerate_g_structures(g: &StableGraph, a: &StableGraph) -> Result<Vec<GStructure>> {
    check_compatible(g, a)?;
    if a.num_edges() < g.num_edges() {
        return Ok(Vec::new());
    }
    let target = IsoTarget::new(g);
    let edges: Vec<usize> = a.edges().into_iter().map(|(h, _)| h).collect();
    let mut out = Vec::new();
    for s in subsets(&edges, a.num_edges() - g.num_edges()) {
        out.extend(structures_for_contraction(a, &s, &target));
    }
    Ok(out)
}

/// A simultaneous `G`- and `H`-structure on a graph `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairStructure {
    pub g_structure: GStructure,
    pub h_structure: GStructure,
    /// Edges of `A` identified with edges of both graphs, as half-edge pairs.
    pub common_edges: Vec<(usize, usize)>,
}

impl PairStructure {
    fn new(a: &StableGraph, gs: GStructure, hs: GStructure) -> Self {
        let gi = gs.image(a.num_half_edges());
        let hi = hs.image(a.num_half_edges());
        let common_edges = a
            .edges()
            .into_iter()
            .filter(|&(h, k)| gi[h] && gi[k] && hi[h] && hi[k])
            .collect();
        PairStructure {
            g_structure: gs,
            h_structure: hs,
            common_edges,
        }
    }

    pub fn is_generic(&self, a: &StableGraph) -> bool {
        let gi = self.g_structure.image(a.num_half_edges());
        let hi = self.h_structure.image(a.num_half_edges());
        (0..a.num_half_edges()).all(|h| gi[h] || hi[h])
    }
}

/// One isomorphism class of graphs `A` with all of its raw generic structures.
#[derive(Clone, Debug)]
pub struct PairFamily {
    pub graph: StableGraph,
    pub automorphisms: u64,
    pub structures: Vec<PairStructure>,
}

/// All `(G, H)`-structures on `A`, generic or not.
pub fn enumerate_pair_structures(g: &StableGraph, h: &StableGraph, a: &StableGraph) -> Result<Vec<PairStructure>> {
    let gs = enumerate_g_structures(g, a)?;
    let hs = enumerate_g_structures(h, a)?;
    let mut out = Vec::with_capacity(gs.len() * hs.len());
    for x in &gs {
        for y in &hs {
            out.push(PairStructure::new(a, x.clone(), y.clone()));
        }
    }
    Ok(out)
}

/// Reference enumeration of generic `(G, H)`-structures: filters every stable
/// graph with between `max(|E_G|, |E_H|)` and `|E_G| + |E_H|` edges.
pub fn enumerate_generic_pairs(g: &StableGraph, h: &StableGraph) -> Result<Vec<PairFamily>> {
    check_compatible(g, h)?;
    let (eg, eh) = (g.num_edges(), h.num_edges());
    let mut out = Vec::new();
    for e in eg.max(eh)..=eg + eh {
        for a in stable_graphs(g.genus(), g.num_legs(), e).iter() {
            let structures: Vec<PairStructure> = enumerate_pair_structures(g, h, a)?
                .into_iter()
                .filter(|p| p.is_generic(a))
                .collect();
            if !structures.is_empty() {
                out.push(PairFamily {
                    graph: a.clone(),
                    automorphisms: plain_form(a).aut,
                    structures,
                });
            }
        }
    }
    Ok(out)
}

/// Number of distinct `G`-structures up to automorphisms of `A`, counted
/// by direct orbit enumeration over all automorphisms of `A`.
pub fn count_structure_orbits(structures: &[GStructure], a: &StableGraph) -> usize {
    let target = IsoTarget::new(a);
    let autos = target.isomorphisms_from(a);
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut orbits = 0;
    for s in structures {
        if seen.contains(&s.beta) {
            continue;
        }
        orbits += 1;
        for au in &autos {
            seen.insert(s.beta.iter().map(|&x| au.half_edge[x]).collect());
        }
    }
    orbits
}
