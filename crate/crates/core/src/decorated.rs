//! Decorated stable graphs and formal sums of them.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::canon::{canonical_form, relabel_canonically, CanonicalKey, Colors};
use crate::error::{Result, StrataError};
use crate::graph::StableGraph;

pub type Q = BigRational;

/// A stable graph with a ψ-exponent on every half-edge and a κ-monomial on
/// every vertex. The κ-monomial is stored as a sorted list of indices, so
/// `[1, 1, 2]` is `κ₁²κ₂`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DecoratedGraph {
    graph: StableGraph,
    psi: Vec<u32>,
    kappa: Vec<Vec<u32>>,
}

impl DecoratedGraph {
    pub fn new(graph: StableGraph, psi: Vec<u32>, mut kappa: Vec<Vec<u32>>) -> Result<Self> {
        if psi.len() != graph.num_half_edges() || kappa.len() != graph.num_vertices() {
            return Err(StrataError::DecorationShape);
        }
        for m in &mut kappa {
            if m.contains(&0) {
                return Err(StrataError::KappaZero);
            }
            m.sort_unstable();
        }
        Ok(DecoratedGraph { graph, psi, kappa })
    }

    pub fn undecorated(graph: StableGraph) -> Self {
        let psi = vec![0; graph.num_half_edges()];
        let kappa = vec![Vec::new(); graph.num_vertices()];
        DecoratedGraph { graph, psi, kappa }
    }

    pub(crate) fn from_parts_unchecked(graph: StableGraph, psi: Vec<u32>, kappa: Vec<Vec<u32>>) -> Self {
        DecoratedGraph { graph, psi, kappa }
    }

    pub fn graph(&self) -> &StableGraph {
        &self.graph
    }

    pub fn psi(&self) -> &[u32] {
        &self.psi
    }

    pub fn kappa(&self) -> &[Vec<u32>] {
        &self.kappa
    }

    pub fn genus(&self) -> u32 {
        self.graph.genus()
    }

    pub fn num_legs(&self) -> usize {
        self.graph.num_legs()
    }

    pub fn space(&self) -> (u32, u32) {
        (self.graph.genus(), self.graph.num_legs() as u32)
    }

    /// Degree of the monomial at `v`.
    pub fn vertex_codim(&self, v: usize) -> usize {
        let psi: u32 = self
            .graph
            .half_edges_at(v)
            .iter()
            .map(|&h| self.psi[h])
            .sum();
        psi as usize + self.kappa[v].iter().map(|&j| j as usize).sum::<usize>()
    }

    /// Number of edges plus the degrees of all vertex monomials.
    pub fn codim(&self) -> usize {
        let psi: u32 = self.psi.iter().sum();
        let kappa: u32 = self.kappa.iter().flatten().sum();
        self.graph.num_edges() + (psi + kappa) as usize
    }

    pub fn is_undecorated(&self) -> bool {
        self.psi.iter().all(|&e| e == 0) && self.kappa.iter().all(Vec::is_empty)
    }

    /// True if some vertex monomial exceeds the dimension of its moduli space.
    pub fn vanishes_by_dimension(&self) -> bool {
        (0..self.graph.num_vertices())
            .any(|v| self.vertex_codim(v) as i64 > self.graph.vertex_dim(v))
    }

    pub fn kappa_apply(&self, a: u32, v: usize) -> Result<Self> {
        if a == 0 {
            return Err(StrataError::KappaZero);
        }
        if v >= self.graph.num_vertices() {
            return Err(StrataError::UnknownVertex(v));
        }
        let mut out = self.clone();
        let m = &mut out.kappa[v];
        let at = m.partition_point(|&j| j <= a);
        m.insert(at, a);
        Ok(out)
    }

    pub fn psi_apply(&self, h: usize) -> Result<Self> {
        if h >= self.graph.num_half_edges() {
            return Err(StrataError::UnknownHalfEdge(h));
        }
        let mut out = self.clone();
        out.psi[h] += 1;
        Ok(out)
    }

    /// ψ on the leg carrying `label`.
    pub fn psi_leg(&self, label: u32) -> Result<Self> {
        let h = *self
            .graph
            .legs()
            .get((label as usize).wrapping_sub(1))
            .ok_or(StrataError::LabelMismatch)?;
        self.psi_apply(h)
    }

    fn colors(&self) -> Colors<'_> {
        Colors {
            psi: &self.psi,
            kappa: &self.kappa,
        }
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        canonical_form(&self.graph, self.colors()).key
    }

    /// Order of the automorphism group preserving decorations.
    pub fn automorphism_order(&self) -> u64 {
        canonical_form(&self.graph, self.colors()).aut
    }

    /// Returns the canonical key and the graph relabeled into canonical order.
    pub fn canonicalize(&self) -> (CanonicalKey, DecoratedGraph) {
        let form = canonical_form(&self.graph, self.colors());
        let (graph, pos, slot) = relabel_canonically(&self.graph, self.colors(), &form.leaves[0]);
        let mut psi = vec![0; self.psi.len()];
        for (h, &s) in slot.iter().enumerate() {
            psi[s] = self.psi[h];
        }
        let mut kappa = vec![Vec::new(); self.kappa.len()];
        for (v, &p) in pos.iter().enumerate() {
            kappa[p] = self.kappa[v].clone();
        }
        (form.key, DecoratedGraph { graph, psi, kappa })
    }
}

/// A finite rational combination of decorated graphs, merged up to
/// isomorphism. A term with coefficient `c` stands for `c` times the
/// pushforward of its decoration along the gluing map of its graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalSum {
    terms: BTreeMap<CanonicalKey, (DecoratedGraph, Q)>,
}

impl FormalSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_graph(g: DecoratedGraph) -> Self {
        Self::term(g, Q::one())
    }

    pub fn term(g: DecoratedGraph, coef: Q) -> Self {
        let mut s = Self::new();
        s.add_term(g, coef);
        s
    }

    pub fn add_term(&mut self, g: DecoratedGraph, coef: Q) {
        if coef.is_zero() {
            return;
        }
        let (key, canon) = g.canonicalize();
        self.add_canonical(key, canon, coef);
    }

    /// Adds a term whose key and canonical graph are already known.
    pub(crate) fn add_canonical(&mut self, key: CanonicalKey, g: DecoratedGraph, coef: Q) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                if !coef.is_zero() {
                    e.insert((g, coef));
                }
            }
            Entry::Occupied(mut e) => {
                e.get_mut().1 += coef;
                if e.get().1.is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DecoratedGraph, &Q)> {
        self.terms.values().map(|(g, c)| (g, c))
    }

    pub fn keys(&self) -> impl Iterator<Item = &CanonicalKey> {
        self.terms.keys()
    }

    /// Coefficient of the class of `g` (zero if absent).
    pub fn coefficient(&self, g: &DecoratedGraph) -> Q {
        self.terms
            .get(&g.canonical_key())
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Q::zero)
    }

    /// The common `(g, n)` of all terms, if any term exists.
    pub fn space(&self) -> Option<(u32, u32)> {
        self.iter().next().map(|(g, _)| g.space())
    }

    /// The common codimension, if the sum is nonempty and homogeneous.
    pub fn homogeneous_codim(&self) -> Option<usize> {
        let mut it = self.iter().map(|(g, _)| g.codim());
        let first = it.next()?;
        it.all(|c| c == first).then_some(first)
    }

    pub fn scaled(&self, c: &Q) -> FormalSum {
        if c.is_zero() {
            return FormalSum::new();
        }
        FormalSum {
            terms: self
                .terms
                .iter()
                .map(|(k, (g, x))| (k.clone(), (g.clone(), x * c)))
                .collect(),
        }
    }

    pub fn add_sum(&mut self, other: &FormalSum) {
        for (k, (g, c)) in &other.terms {
            self.add_canonical(k.clone(), g.clone(), c.clone());
        }
    }

    pub fn plus(&self, other: &FormalSum) -> FormalSum {
        let mut out = self.clone();
        out.add_sum(other);
        out
    }

    pub fn minus(&self, other: &FormalSum) -> FormalSum {
        self.plus(&other.scaled(&-Q::one()))
    }

    /// Replaces every term `A` by `Σ_v κ_{a,v}·A`.
    pub fn kappa_pullback(&self, a: u32) -> Result<FormalSum> {
        let mut out = FormalSum::new();
        for (g, c) in self.iter() {
            for v in 0..g.graph().num_vertices() {
                out.add_term(g.kappa_apply(a, v)?, c.clone());
            }
        }
        Ok(out)
    }

    /// Drops terms that vanish for dimension reasons at some vertex.
    pub fn normalize(&self) -> FormalSum {
        FormalSum {
            terms: self
                .terms
                .iter()
                .filter(|(_, (g, _))| !g.vanishes_by_dimension())
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Restriction to the terms of codimension `k`.
    pub fn graded_part(&self, k: usize) -> FormalSum {
        FormalSum {
            terms: self
                .terms
                .iter()
                .filter(|(_, (g, _))| g.codim() == k)
                .map(|(key, v)| (key.clone(), v.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for FormalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (g, c) in self.iter() {
            writeln!(f, "{} * {}", c, g)?;
        }
        Ok(())
    }
}

/// Where a leg of a grafted graph comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LegSource {
    Piece(u32),
    Host(u32),
}

/// How a piece is glued.
#[derive(Clone, Debug)]
pub enum Graft {
    /// Join leg `piece_leg` of every piece term to leg `host_leg` of `host`.
    Attach {
        host: DecoratedGraph,
        piece_leg: u32,
        host_leg: u32,
    },
    /// Join two legs of every piece term to each other.
    SelfGlue { leg_a: u32, leg_b: u32 },
}

/// Glues every term of `piece` as described by `how`, forming one new edge.
/// `relabel` assigns the new label of each surviving leg and must be a
/// bijection onto `1..=n` for the resulting number of legs `n`.
pub fn graft(piece: &FormalSum, how: &Graft, relabel: &BTreeMap<LegSource, u32>) -> Result<FormalSum> {
    let mut out = FormalSum::new();
    for (term, c) in piece.iter() {
        out.add_term(graft_one(term, how, relabel)?, c.clone());
    }
    Ok(out)
}

fn leg_half_edge(g: &StableGraph, label: u32) -> Result<usize> {
    g.legs()
        .get((label as usize).wrapping_sub(1))
        .copied()
        .ok_or_else(|| StrataError::LabelCollision(format!("no leg {label}")))
}

fn graft_one(piece: &DecoratedGraph, how: &Graft, relabel: &BTreeMap<LegSource, u32>) -> Result<DecoratedGraph> {
    let pg = piece.graph();
    let mut genera = pg.genera().to_vec();
    let mut vertex_of = pg.vertex_of().to_vec();
    let mut involution = pg.involution().to_vec();
    let mut psi = piece.psi().to_vec();
    let mut kappa = piece.kappa().to_vec();
    let mut sources: Vec<(LegSource, usize)> = Vec::new();
    match how {
        Graft::Attach {
            host,
            piece_leg,
            host_leg,
        } => {
            let hg = host.graph();
            let hp = leg_half_edge(pg, *piece_leg)?;
            let hh = leg_half_edge(hg, *host_leg)?;
            let voff = genera.len();
            let hoff = vertex_of.len();
            genera.extend(hg.genera());
            vertex_of.extend(hg.vertex_of().iter().map(|&v| v + voff));
            involution.extend(hg.involution().iter().map(|&h| h + hoff));
            psi.extend(host.psi());
            kappa.extend(host.kappa().iter().cloned());
            involution[hp] = hh + hoff;
            involution[hh + hoff] = hp;
            for (i, &h) in pg.legs().iter().enumerate() {
                if h != hp {
                    sources.push((LegSource::Piece(i as u32 + 1), h));
                }
            }
            for (i, &h) in hg.legs().iter().enumerate() {
                if h != hh {
                    sources.push((LegSource::Host(i as u32 + 1), h + hoff));
                }
            }
        }
        Graft::SelfGlue { leg_a, leg_b } => {
            let a = leg_half_edge(pg, *leg_a)?;
            let b = leg_half_edge(pg, *leg_b)?;
            if a == b {
                return Err(StrataError::LabelCollision(format!("leg {leg_a} glued to itself")));
            }
            involution[a] = b;
            involution[b] = a;
            for (i, &h) in pg.legs().iter().enumerate() {
                if h != a && h != b {
                    sources.push((LegSource::Piece(i as u32 + 1), h));
                }
            }
        }
    }
    let n = sources.len();
    let mut legs = vec![usize::MAX; n];
    for (src, h) in sources {
        let label = *relabel
            .get(&src)
            .ok_or_else(|| StrataError::LabelCollision(format!("{src:?} has no new label")))?;
        let slot = (label as usize).wrapping_sub(1);
        if slot >= n || legs[slot] != usize::MAX {
            return Err(StrataError::LabelCollision(format!("label {label} invalid or reused")));
        }
        legs[slot] = h;
    }
    let graph = StableGraph::new(genera, vertex_of, involution, legs).map_err(|e| match e {
        StrataError::UnstableVertex(_) => StrataError::UnstableResult,
        other => other,
    })?;
    DecoratedGraph::new(graph, psi, kappa)
}
