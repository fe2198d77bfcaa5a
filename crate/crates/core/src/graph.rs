//! Stable graphs: genus-labeled vertices, half-edges with an involution and
//! labeled legs.
//!
//! Half-edges are numbered `0..num_half_edges()`. An edge is a two-element
//! orbit of the involution; a leg is a fixed point. Leg labels run over
//! `1..=n` and `legs()[i]` is the half-edge carrying label `i + 1`.

use crate::error::{Result, StrataError};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StableGraph {
    genera: Vec<u32>,
    vertex_of: Vec<usize>,
    involution: Vec<usize>,
    legs: Vec<usize>,
    genus: u32,
}

impl StableGraph {
    /// Validates the raw data and computes the total genus.
    pub fn new(
        genera: Vec<u32>,
        vertex_of: Vec<usize>,
        involution: Vec<usize>,
        legs: Vec<usize>,
    ) -> Result<Self> {
        let nv = genera.len();
        let nh = vertex_of.len();
        if nv == 0 {
            return Err(StrataError::Empty);
        }
        if involution.len() != nh {
            return Err(StrataError::InvolutionNotSelfInverse(involution.len().min(nh)));
        }
        for (h, &v) in vertex_of.iter().enumerate() {
            if v >= nv {
                return Err(StrataError::DanglingHalfEdge(h));
            }
        }
        for (h, &i) in involution.iter().enumerate() {
            if i >= nh || involution[i] != h {
                return Err(StrataError::InvolutionNotSelfInverse(h));
            }
        }
        let mut label_of = vec![None; nh];
        for (idx, &h) in legs.iter().enumerate() {
            if h >= nh {
                return Err(StrataError::UnknownHalfEdge(h));
            }
            if label_of[h].is_some() {
                return Err(StrataError::LegLabelCollision(idx as u32 + 1));
            }
            if involution[h] != h {
                return Err(StrataError::LegNotFixed(h));
            }
            label_of[h] = Some(idx);
        }
        for h in 0..nh {
            if involution[h] == h && label_of[h].is_none() {
                return Err(StrataError::UnlabeledLeg(h));
            }
        }
        let graph = Self::from_parts_unchecked(genera, vertex_of, involution, legs);
        if !graph.is_connected() {
            return Err(StrataError::NotConnected);
        }
        for v in 0..nv {
            if !graph.is_stable_at(v) {
                return Err(StrataError::UnstableVertex(v));
            }
        }
        Ok(graph)
    }

    /// Builds a graph without validation. Callers guarantee the invariants.
    pub(crate) fn from_parts_unchecked(
        genera: Vec<u32>,
        vertex_of: Vec<usize>,
        involution: Vec<usize>,
        legs: Vec<usize>,
    ) -> Self {
        let edges = involution.iter().enumerate().filter(|&(h, &i)| h < i).count();
        let sum: i64 = genera.iter().map(|&g| g as i64).sum();
        let genus = sum + edges as i64 - genera.len() as i64 + 1;
        debug_assert!(genus >= 0);
        StableGraph {
            genera,
            vertex_of,
            involution,
            legs,
            genus: genus as u32,
        }
    }

    /// The single-vertex graph of `M̄_{g,n}`.
    pub fn smooth(genus: u32, n: usize) -> Result<Self> {
        Self::new(vec![genus], vec![0; n], (0..n).collect(), (0..n).collect())
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn num_legs(&self) -> usize {
        self.legs.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.genera.len()
    }

    pub fn num_half_edges(&self) -> usize {
        self.vertex_of.len()
    }

    pub fn num_edges(&self) -> usize {
        (self.num_half_edges() - self.num_legs()) / 2
    }

    pub fn vertex_genus(&self, v: usize) -> u32 {
        self.genera[v]
    }

    pub fn genera(&self) -> &[u32] {
        &self.genera
    }

    pub fn vertex(&self, h: usize) -> usize {
        self.vertex_of[h]
    }

    pub fn vertex_of(&self) -> &[usize] {
        &self.vertex_of
    }

    pub fn partner(&self, h: usize) -> usize {
        self.involution[h]
    }

    pub fn involution(&self) -> &[usize] {
        &self.involution
    }

    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    pub fn is_leg(&self, h: usize) -> bool {
        self.involution[h] == h
    }

    /// Label (1-based) of the leg at `h`, if `h` is a leg.
    pub fn leg_label(&self, h: usize) -> Option<u32> {
        if !self.is_leg(h) {
            return None;
        }
        self.legs.iter().position(|&l| l == h).map(|i| i as u32 + 1)
    }

    /// Edges as half-edge pairs `(h, h')` with `h < h'`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.involution
            .iter()
            .enumerate()
            .filter(|&(h, &i)| h < i)
            .map(|(h, &i)| (h, i))
            .collect()
    }

    pub fn half_edges_at(&self, v: usize) -> Vec<usize> {
        (0..self.num_half_edges())
            .filter(|&h| self.vertex_of[h] == v)
            .collect()
    }

    /// `n(v)`: the number of half-edges incident to `v`.
    pub fn valence(&self, v: usize) -> usize {
        self.vertex_of.iter().filter(|&&w| w == v).count()
    }

    pub fn valences(&self) -> Vec<usize> {
        let mut out = vec![0; self.num_vertices()];
        for &v in &self.vertex_of {
            out[v] += 1;
        }
        out
    }

    /// `dim M̄_{g(v), n(v)}`.
    pub fn vertex_dim(&self, v: usize) -> i64 {
        3 * self.genera[v] as i64 - 3 + self.valence(v) as i64
    }

    /// `dim M̄_{g,n}` for the whole graph.
    pub fn dim(&self) -> i64 {
        3 * self.genus as i64 - 3 + self.num_legs() as i64
    }

    /// First Betti number `|E| - |V| + 1`.
    pub fn h1(&self) -> usize {
        self.num_edges() + 1 - self.num_vertices()
    }

    pub fn is_tree(&self) -> bool {
        self.h1() == 0
    }

    /// Compact type with exactly one vertex of positive genus (or none when `g = 0`).
    pub fn has_rational_tails(&self) -> bool {
        self.is_tree() && self.genera.iter().filter(|&&g| g > 0).count() <= 1
    }

    pub fn is_stable_at(&self, v: usize) -> bool {
        2 * self.genera[v] as i64 - 2 + self.valence(v) as i64 > 0
    }

    fn is_connected(&self) -> bool {
        let nv = self.num_vertices();
        let mut uf = UnionFind::new(nv);
        for (h, i) in self.edges() {
            uf.union(self.vertex_of[h], self.vertex_of[i]);
        }
        let root = uf.find(0);
        (1..nv).all(|v| uf.find(v) == root)
    }

    /// Contracts the given edges (each named by either of its half-edges).
    pub fn contract(&self, edges: &[usize]) -> Contraction {
        let nv = self.num_vertices();
        let mut uf = UnionFind::new(nv);
        let mut removed = vec![false; self.num_half_edges()];
        for &h in edges {
            let i = self.involution[h];
            removed[h] = true;
            removed[i] = true;
            uf.union(self.vertex_of[h], self.vertex_of[i]);
        }
        let mut vertex_map = vec![usize::MAX; nv];
        let mut root_index = vec![usize::MAX; nv];
        let mut genera = Vec::new();
        let mut comp_vertices = Vec::new();
        for v in 0..nv {
            let r = uf.find(v);
            if root_index[r] == usize::MAX {
                root_index[r] = genera.len();
                genera.push(0i64);
                comp_vertices.push(0i64);
            }
            let c = root_index[r];
            vertex_map[v] = c;
            genera[c] += self.genera[v] as i64;
            comp_vertices[c] += 1;
        }
        let mut comp_edges = vec![0i64; genera.len()];
        for &h in edges {
            comp_edges[vertex_map[self.vertex_of[h]]] += 1;
        }
        let genera: Vec<u32> = genera
            .iter()
            .zip(&comp_edges)
            .zip(&comp_vertices)
            .map(|((g, e), v)| (g + e - v + 1) as u32)
            .collect();
        let mut half_edge_map = vec![None; self.num_half_edges()];
        let mut next = 0;
        for h in 0..self.num_half_edges() {
            if !removed[h] {
                half_edge_map[h] = Some(next);
                next += 1;
            }
        }
        let mut vertex_of = vec![0; next];
        let mut involution = vec![0; next];
        for h in 0..self.num_half_edges() {
            if let Some(nh) = half_edge_map[h] {
                vertex_of[nh] = vertex_map[self.vertex_of[h]];
                involution[nh] = half_edge_map[self.involution[h]].expect("partner survives");
            }
        }
        let legs = self
            .legs
            .iter()
            .map(|&h| half_edge_map[h].expect("legs survive"))
            .collect();
        Contraction {
            graph: StableGraph::from_parts_unchecked(genera, vertex_of, involution, legs),
            vertex_map,
            half_edge_map,
        }
    }

    /// Relabels vertices by `vperm[old] = new` and half-edges by `hperm[old] = new`.
    pub fn relabeled(&self, vperm: &[usize], hperm: &[usize]) -> StableGraph {
        let mut genera = vec![0; self.num_vertices()];
        for (v, &g) in self.genera.iter().enumerate() {
            genera[vperm[v]] = g;
        }
        let mut vertex_of = vec![0; self.num_half_edges()];
        let mut involution = vec![0; self.num_half_edges()];
        for h in 0..self.num_half_edges() {
            vertex_of[hperm[h]] = vperm[self.vertex_of[h]];
            involution[hperm[h]] = hperm[self.involution[h]];
        }
        let legs = self.legs.iter().map(|&h| hperm[h]).collect();
        StableGraph::from_parts_unchecked(genera, vertex_of, involution, legs)
    }
}

/// Result of contracting a set of edges.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub graph: StableGraph,
    /// Old vertex to new vertex.
    pub vertex_map: Vec<usize>,
    /// Old half-edge to new half-edge; `None` for contracted half-edges.
    pub half_edge_map: Vec<Option<usize>>,
}

/// Incremental construction of stable graphs.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    genera: Vec<u32>,
    vertex_of: Vec<usize>,
    involution: Vec<usize>,
    legs: Vec<(u32, usize)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, genus: u32) -> usize {
        self.genera.push(genus);
        self.genera.len() - 1
    }

    /// Adds an edge between `u` and `v` and returns its two half-edges.
    pub fn edge(&mut self, u: usize, v: usize) -> (usize, usize) {
        let a = self.vertex_of.len();
        self.vertex_of.extend([u, v]);
        self.involution.extend([a + 1, a]);
        (a, a + 1)
    }

    pub fn leg(&mut self, v: usize, label: u32) -> usize {
        let h = self.vertex_of.len();
        self.vertex_of.push(v);
        self.involution.push(h);
        self.legs.push((label, h));
        h
    }

    pub fn build(self) -> Result<StableGraph> {
        let mut legs = self.legs;
        legs.sort();
        for w in legs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(StrataError::LegLabelCollision(w[0].0));
            }
        }
        if legs.iter().enumerate().any(|(i, &(l, _))| l as usize != i + 1) {
            return Err(StrataError::LegLabelsNotContiguous(legs.len()));
        }
        StableGraph::new(
            self.genera,
            self.vertex_of,
            self.involution,
            legs.into_iter().map(|(_, h)| h).collect(),
        )
    }
}

#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_one_vertex_with_loop_has_genus_two() {
        let mut b = GraphBuilder::new();
        let v = b.vertex(1);
        b.edge(v, v);
        let g = b.build().unwrap();
        assert_eq!(g.genus(), 2);
        assert_eq!(g.h1(), 1);
    }

    #[test]
    fn two_pointed_rational_vertex_is_unstable() {
        let mut b = GraphBuilder::new();
        let v = b.vertex(0);
        b.leg(v, 1);
        b.leg(v, 2);
        assert_eq!(b.build(), Err(StrataError::UnstableVertex(0)));
    }

    #[test]
    fn rejects_bad_involution_and_disconnected() {
        assert_eq!(
            StableGraph::new(vec![1], vec![0, 0], vec![1, 1], vec![]),
            Err(StrataError::InvolutionNotSelfInverse(0))
        );
        let err = StableGraph::new(vec![1, 1], vec![0, 1], vec![0, 1], vec![0, 1]);
        assert_eq!(err, Err(StrataError::NotConnected));
    }

    #[test]
    fn rejects_duplicate_leg_labels() {
        let mut b = GraphBuilder::new();
        let v = b.vertex(1);
        b.leg(v, 1);
        b.leg(v, 1);
        assert_eq!(b.build(), Err(StrataError::LegLabelCollision(1)));
        assert_eq!(
            StableGraph::new(vec![1], vec![0], vec![0], vec![0, 0]),
            Err(StrataError::LegLabelCollision(2))
        );
    }

    #[test]
    fn two_vertices_with_double_edge_and_one_leg_each() {
        let mut b = GraphBuilder::new();
        let (u, v) = (b.vertex(0), b.vertex(0));
        b.edge(u, v);
        b.edge(u, v);
        b.leg(u, 1);
        b.leg(v, 2);
        let a = b.build().unwrap();
        assert_eq!(a.genus(), 1);
        let mut b = GraphBuilder::new();
        let w = b.vertex(0);
        b.edge(w, w);
        b.leg(w, 1);
        b.leg(w, 2);
        assert_eq!(b.build().unwrap().genus(), a.genus());
    }

    #[test]
    fn contraction_tracks_genus() {
        let mut b = GraphBuilder::new();
        let (u, v) = (b.vertex(0), b.vertex(0));
        let (e1, _) = b.edge(u, v);
        b.edge(u, v);
        b.leg(u, 1);
        b.leg(v, 2);
        let a = b.build().unwrap();
        let c = a.contract(&[e1]);
        assert_eq!(c.graph.num_vertices(), 1);
        assert_eq!(c.graph.vertex_genus(0), 0);
        assert_eq!(c.graph.num_edges(), 1);
        let all = a.contract(&[0, 2]);
        assert_eq!(all.graph.vertex_genus(0), 1);
        assert_eq!(all.graph.genus(), 1);
    }
}
