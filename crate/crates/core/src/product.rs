//! The product of decorated strata and the intersection pairing.
//!
//! A product `G·H` sums over generic `(G, H)`-structures on graphs `A`,
//! weighted by `1/|Aut(A)|`. The fast path builds each `A` by degenerating the
//! vertices of `H` one at a time: an orbit of `H`-structures on `A` is the
//! same as a choice of degeneration `D_v` of every vertex `v` of `H`, with
//! stabilizer `∏ Aut(D_v)` (automorphisms fixing the legs of each `D_v`). The
//! remaining `G`-structures are found by contracting edges coming from `H`
//! and matching the result with `G`.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::canon::{plain_form, IsoTarget};
use crate::decorated::{DecoratedGraph, FormalSum, Q};
use crate::enumeration::{max_edges, stable_graphs};
use crate::error::{Result, StrataError};
use crate::graph::StableGraph;
use crate::integrals::{integrate_unchecked, kappa_reduce, vertex_kinds, EvaluationKind};
use crate::structure::{enumerate_generic_pairs, structures_for_contraction, subsets, PairStructure};

/// Restriction on the graphs `A` that can contribute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    Any,
    Tree,
    RationalTails,
}

impl Topology {
    pub fn for_kind(kind: EvaluationKind) -> Self {
        match kind {
            EvaluationKind::Fundamental => Topology::Any,
            EvaluationKind::LambdaG => Topology::Tree,
            EvaluationKind::LambdaGLambdaGMinus1 => Topology::RationalTails,
        }
    }

    fn admits(self, g: &StableGraph) -> bool {
        match self {
            Topology::Any => true,
            Topology::Tree => g.is_tree(),
            Topology::RationalTails => {
                g.is_tree() && g.genera().iter().filter(|&&x| x > 0).count() <= 1
            }
        }
    }
}

/// A generic pair of structures on a concrete graph `A`, with the weight it
/// carries in the product.
#[derive(Clone, Debug)]
pub struct Config {
    pub graph: StableGraph,
    pub weight: Q,
    pub g_alpha: Vec<usize>,
    pub g_beta: Vec<usize>,
    pub h_alpha: Vec<usize>,
    pub h_beta: Vec<usize>,
    pub common_edges: Vec<(usize, usize)>,
}

impl Config {
    fn from_pair(a: &StableGraph, weight: Q, p: &PairStructure) -> Self {
        Config {
            graph: a.clone(),
            weight,
            g_alpha: p.g_structure.alpha.clone(),
            g_beta: p.g_structure.beta.clone(),
            h_alpha: p.h_structure.alpha.clone(),
            h_beta: p.h_structure.beta.clone(),
            common_edges: p.common_edges.clone(),
        }
    }
}

type Degenerations = Vec<Vec<(StableGraph, Q)>>;

/// Stable graphs of type `(g, n)` with `e` edges and their inverse
/// automorphism orders, memoized per call.
fn degenerations_of(
    memo: &mut HashMap<(u32, usize, usize), Vec<(StableGraph, Q)>>,
    g: u32,
    n: usize,
    e: usize,
    topo: Topology,
) -> &Vec<(StableGraph, Q)> {
    memo.entry((g, n, e)).or_insert_with(|| {
        stable_graphs(g, n, e)
            .iter()
            .filter(|d| topo == Topology::Any || d.is_tree())
            .map(|d| (d.clone(), Q::new(1.into(), plain_form(d).aut.into())))
            .collect()
    })
}

/// Calls `f` on every generic configuration for `(G, H)` where `H` has at
/// least as many edges as `G`.
pub fn for_each_config(g: &StableGraph, h: &StableGraph, topo: Topology, f: &mut dyn FnMut(&Config)) {
    assert!(h.num_edges() >= g.num_edges());
    let target = IsoTarget::new(g);
    let nv = h.num_vertices();
    let at: Vec<Vec<usize>> = (0..nv).map(|v| h.half_edges_at(v)).collect();
    let caps: Vec<usize> = (0..nv)
        .map(|v| max_edges(h.vertex_genus(v), at[v].len()))
        .collect();
    let mut memo = HashMap::new();
    let mut per_vertex: Degenerations = Vec::with_capacity(nv);
    // Options per vertex across all admissible internal edge counts.
    let budget = g.num_edges();
    for v in 0..nv {
        let mut opts = Vec::new();
        for e in 0..=budget.min(caps[v]) {
            opts.extend(
                degenerations_of(&mut memo, h.vertex_genus(v), at[v].len(), e, topo)
                    .iter()
                    .cloned(),
            );
        }
        per_vertex.push(opts);
    }
    let h_edges = h.edges();
    let mut choice = Vec::with_capacity(nv);
    choose(
        g,
        h,
        &target,
        &at,
        &per_vertex,
        &h_edges,
        topo,
        0,
        0,
        &mut choice,
        f,
    );
}

#[allow(clippy::too_many_arguments)]
fn choose(
    g: &StableGraph,
    h: &StableGraph,
    target: &IsoTarget,
    at: &[Vec<usize>],
    per_vertex: &Degenerations,
    h_edges: &[(usize, usize)],
    topo: Topology,
    v: usize,
    internal: usize,
    choice: &mut Vec<usize>,
    f: &mut dyn FnMut(&Config),
) {
    if v == per_vertex.len() {
        let e_g = g.num_edges();
        let e_a = h_edges.len() + internal;
        if e_a < e_g || e_a - e_g > h_edges.len() {
            return;
        }
        let (a, h_alpha, weight) = assemble(h, at, per_vertex, choice);
        if !topo.admits(&a) {
            return;
        }
        let reps: Vec<usize> = h_edges.iter().map(|&(x, _)| x).collect();
        for s in subsets(&reps, e_a - e_g) {
            for st in structures_for_contraction(&a, &s, target) {
                let common_edges = h_edges
                    .iter()
                    .copied()
                    .filter(|(x, _)| !s.contains(x))
                    .collect();
                f(&Config {
                    graph: a.clone(),
                    weight: weight.clone(),
                    g_alpha: st.alpha,
                    g_beta: st.beta,
                    h_alpha: h_alpha.clone(),
                    h_beta: (0..h.num_half_edges()).collect(),
                    common_edges,
                });
            }
        }
        return;
    }
    for (i, (d, _)) in per_vertex[v].iter().enumerate() {
        let e = internal + d.num_edges();
        if e > g.num_edges() {
            continue;
        }
        choice.push(i);
        choose(g, h, target, at, per_vertex, h_edges, topo, v + 1, e, choice, f);
        choice.pop();
    }
}

/// Glues the chosen degenerations into `H`. Half-edges of `H` keep their ids.
fn assemble(h: &StableGraph, at: &[Vec<usize>], per_vertex: &Degenerations, choice: &[usize]) -> (StableGraph, Vec<usize>, Q) {
    let mut genera = Vec::new();
    let mut h_alpha = Vec::new();
    let mut vertex_of = vec![0; h.num_half_edges()];
    let mut involution: Vec<usize> = h.involution().to_vec();
    let mut weight = Q::one();
    for (v, &c) in choice.iter().enumerate() {
        let (d, w) = &per_vertex[v][c];
        weight *= w;
        let voff = genera.len();
        genera.extend(d.genera());
        h_alpha.extend(std::iter::repeat_n(v, d.num_vertices()));
        let mut map = vec![usize::MAX; d.num_half_edges()];
        for (i, &leg) in d.legs().iter().enumerate() {
            map[leg] = at[v][i];
        }
        for x in 0..d.num_half_edges() {
            if map[x] == usize::MAX {
                map[x] = vertex_of.len();
                vertex_of.push(0);
                involution.push(0);
            }
        }
        for x in 0..d.num_half_edges() {
            vertex_of[map[x]] = voff + d.vertex(x);
            if !d.is_leg(x) {
                involution[map[x]] = map[d.partner(x)];
            }
        }
    }
    let a = StableGraph::from_parts_unchecked(genera, vertex_of, involution, h.legs().to_vec());
    (a, h_alpha, weight)
}

/// Calls `f` on every generic configuration found by the reference
/// enumeration, with weight `1/|Aut(A)|`.
pub fn for_each_config_reference(g: &StableGraph, h: &StableGraph, f: &mut dyn FnMut(&Config)) -> Result<()> {
    for fam in enumerate_generic_pairs(g, h)? {
        let w = Q::new(1.into(), fam.automorphisms.into());
        for p in &fam.structures {
            f(&Config::from_pair(&fam.graph, w.clone(), p));
        }
    }
    Ok(())
}

/// The excess-intersection expansion of one configuration.
struct Expansion<'a> {
    graph: &'a StableGraph,
    psi: Vec<u32>,
    kappa_factors: Vec<(u32, Vec<usize>)>,
    common: &'a [(usize, usize)],
    sign: Q,
}

impl<'a> Expansion<'a> {
    fn new(cfg: &'a Config, dg: &DecoratedGraph, dh: &DecoratedGraph) -> Self {
        let a = &cfg.graph;
        let mut psi = vec![0u32; a.num_half_edges()];
        let mut kappa_factors = Vec::new();
        for (d, alpha, beta) in [(dg, &cfg.g_alpha, &cfg.g_beta), (dh, &cfg.h_alpha, &cfg.h_beta)] {
            for (h, &e) in d.psi().iter().enumerate() {
                psi[beta[h]] += e;
            }
            for (w, mono) in d.kappa().iter().enumerate() {
                if mono.is_empty() {
                    continue;
                }
                let fiber: Vec<usize> = (0..a.num_vertices()).filter(|&x| alpha[x] == w).collect();
                for &j in mono {
                    kappa_factors.push((j, fiber.clone()));
                }
            }
        }
        let sign = if cfg.common_edges.len() % 2 == 1 {
            -Q::one()
        } else {
            Q::one()
        };
        Expansion {
            graph: a,
            psi,
            kappa_factors,
            common: &cfg.common_edges,
            sign,
        }
    }

    /// Every monomial of the expansion (with multiplicity), as full ψ and κ data.
    fn for_each_term(&self, f: &mut dyn FnMut(&[u32], &[Vec<u32>])) {
        let mut psi = self.psi.clone();
        let mut kappa = vec![Vec::new(); self.graph.num_vertices()];
        self.kappa_step(0, &mut psi, &mut kappa, None, f);
    }

    /// Like [`Self::for_each_term`], but prunes branches whose vertex degree
    /// exceeds `targets`, and only reports terms meeting every target.
    fn for_each_top_term(&self, targets: &[i64], f: &mut dyn FnMut(&[u32], &[Vec<u32>])) {
        let a = self.graph;
        let mut deg = vec![0i64; a.num_vertices()];
        for (h, &e) in self.psi.iter().enumerate() {
            deg[a.vertex(h)] += e as i64;
        }
        let extra: i64 = self.kappa_factors.iter().map(|&(j, _)| j as i64).sum::<i64>()
            + self.common.len() as i64;
        let total: i64 = deg.iter().sum::<i64>() + extra;
        if total != targets.iter().sum::<i64>() || deg.iter().zip(targets).any(|(d, t)| d > t) {
            return;
        }
        let mut psi = self.psi.clone();
        let mut kappa = vec![Vec::new(); a.num_vertices()];
        self.kappa_step(0, &mut psi, &mut kappa, Some((&mut deg, targets)), f);
    }

    fn kappa_step(
        &self,
        i: usize,
        psi: &mut Vec<u32>,
        kappa: &mut Vec<Vec<u32>>,
        mut budget: Option<(&mut Vec<i64>, &[i64])>,
        f: &mut dyn FnMut(&[u32], &[Vec<u32>]),
    ) {
        if i == self.kappa_factors.len() {
            self.excess_step(0, psi, kappa, budget, f);
            return;
        }
        let (j, fiber) = &self.kappa_factors[i];
        for &w in fiber {
            if let Some((deg, t)) = budget.as_mut() {
                if deg[w] + *j as i64 > t[w] {
                    continue;
                }
                deg[w] += *j as i64;
            }
            kappa[w].push(*j);
            self.kappa_step(i + 1, psi, kappa, budget.as_mut().map(|(d, t)| (&mut **d, *t)), f);
            kappa[w].pop();
            if let Some((deg, _)) = budget.as_mut() {
                deg[w] -= *j as i64;
            }
        }
    }

    fn excess_step(
        &self,
        i: usize,
        psi: &mut Vec<u32>,
        kappa: &mut Vec<Vec<u32>>,
        mut budget: Option<(&mut Vec<i64>, &[i64])>,
        f: &mut dyn FnMut(&[u32], &[Vec<u32>]),
    ) {
        if i == self.common.len() {
            if let Some((deg, t)) = budget.as_ref() {
                if deg.iter().zip(t.iter()).any(|(d, t)| d != t) {
                    return;
                }
            }
            f(psi, kappa);
            return;
        }
        let (x, y) = self.common[i];
        for h in [x, y] {
            let w = self.graph.vertex(h);
            if let Some((deg, t)) = budget.as_mut() {
                if deg[w] + 1 > t[w] {
                    continue;
                }
                deg[w] += 1;
            }
            psi[h] += 1;
            self.excess_step(i + 1, psi, kappa, budget.as_mut().map(|(d, t)| (&mut **d, *t)), f);
            psi[h] -= 1;
            if let Some((deg, _)) = budget.as_mut() {
                deg[w] -= 1;
            }
        }
    }
}

fn sorted_kappa(kappa: &[Vec<u32>]) -> Vec<Vec<u32>> {
    kappa
        .iter()
        .map(|m| {
            let mut m = m.clone();
            m.sort_unstable();
            m
        })
        .collect()
}

/// The monomials of `F_A(G, H)·A` for a single configuration, one entry per
/// choice in the expansion and without merging isomorphic terms or applying
/// the weight.
pub fn config_terms(cfg: &Config, dg: &DecoratedGraph, dh: &DecoratedGraph) -> Vec<(DecoratedGraph, Q)> {
    let ex = Expansion::new(cfg, dg, dh);
    let mut out = Vec::new();
    ex.for_each_term(&mut |psi, kappa| {
        let d = DecoratedGraph::from_parts_unchecked(cfg.graph.clone(), psi.to_vec(), sorted_kappa(kappa));
        out.push((d, ex.sign.clone()));
    });
    out
}

/// [`config_terms`] collected into a formal sum.
pub fn config_expansion(cfg: &Config, dg: &DecoratedGraph, dh: &DecoratedGraph) -> FormalSum {
    let mut out = FormalSum::new();
    for (d, c) in config_terms(cfg, dg, dh) {
        out.add_term(d, c);
    }
    out
}

/// The monomials of `F_A(G, H)·A` for one pair structure on `A`.
pub fn pair_terms(dg: &DecoratedGraph, dh: &DecoratedGraph, a: &StableGraph, p: &PairStructure) -> Vec<(DecoratedGraph, Q)> {
    config_terms(&Config::from_pair(a, Q::one(), p), dg, dh)
}

fn check_space(x: &DecoratedGraph, y: &DecoratedGraph) -> Result<()> {
    if x.space() != y.space() {
        return Err(StrataError::SpaceMismatch(x.space(), y.space()));
    }
    Ok(())
}

/// Orders the factors so that the second has at least as many edges.
fn oriented<'a>(x: &'a DecoratedGraph, y: &'a DecoratedGraph) -> (&'a DecoratedGraph, &'a DecoratedGraph) {
    if x.graph().num_edges() > y.graph().num_edges() {
        (y, x)
    } else {
        (x, y)
    }
}

/// The product of two decorated graphs.
pub fn multiply_graphs(x: &DecoratedGraph, y: &DecoratedGraph) -> Result<FormalSum> {
    check_space(x, y)?;
    let (dg, dh) = oriented(x, y);
    let mut out = FormalSum::new();
    for_each_config(dg.graph(), dh.graph(), Topology::Any, &mut |cfg| {
        let coef = &cfg.weight;
        let ex = config_expansion(cfg, dg, dh);
        out.add_sum(&ex.scaled(coef));
    });
    Ok(out)
}

/// The product of two decorated graphs computed from the reference
/// enumeration of generic structures.
pub fn multiply_graphs_reference(x: &DecoratedGraph, y: &DecoratedGraph) -> Result<FormalSum> {
    check_space(x, y)?;
    let mut out = FormalSum::new();
    for_each_config_reference(x.graph(), y.graph(), &mut |cfg| {
        out.add_sum(&config_expansion(cfg, x, y).scaled(&cfg.weight));
    })?;
    Ok(out)
}

fn check_sum_spaces(x: &FormalSum, y: &FormalSum) -> Result<()> {
    if let (Some(a), Some(b)) = (x.space(), y.space()) {
        if a != b {
            return Err(StrataError::SpaceMismatch(a, b));
        }
    }
    for s in [x, y] {
        if let Some(a) = s.space() {
            if let Some((g, _)) = s.iter().find(|(g, _)| g.space() != a) {
                return Err(StrataError::SpaceMismatch(a, g.space()));
            }
        }
    }
    Ok(())
}

/// Bilinear product of formal sums. Pairs of terms are multiplied in
/// parallel and merged in a fixed order.
pub fn multiply(x: &FormalSum, y: &FormalSum) -> Result<FormalSum> {
    check_sum_spaces(x, y)?;
    let pairs: Vec<(&DecoratedGraph, &Q, &DecoratedGraph, &Q)> = x
        .iter()
        .flat_map(|(a, ca)| y.iter().map(move |(b, cb)| (a, ca, b, cb)))
        .collect();
    let parts: Vec<FormalSum> = pairs
        .par_iter()
        .map(|&(a, ca, b, cb)| multiply_graphs(a, b).map(|s| s.scaled(&(ca * cb))))
        .collect::<Result<_>>()?;
    let mut out = FormalSum::new();
    for p in &parts {
        out.add_sum(p);
    }
    Ok(out)
}

/// Product of formal sums through the reference enumeration.
pub fn multiply_reference(x: &FormalSum, y: &FormalSum) -> Result<FormalSum> {
    check_sum_spaces(x, y)?;
    let mut out = FormalSum::new();
    for (a, ca) in x.iter() {
        for (b, cb) in y.iter() {
            out.add_sum(&multiply_graphs_reference(a, b)?.scaled(&(ca * cb)));
        }
    }
    Ok(out)
}

/// `∫ x·y·(evaluation class)` for two decorated graphs, evaluated directly
/// from the configurations without forming the product.
pub fn intersection_number(x: &DecoratedGraph, y: &DecoratedGraph, kind: EvaluationKind) -> Result<Q> {
    check_space(x, y)?;
    let (g, n) = x.space();
    if (x.codim() + y.codim()) as i64 != kind.top_degree(g, n as usize) {
        return Ok(Q::zero());
    }
    let topo = Topology::for_kind(kind);
    if !topo.admits(x.graph()) || !topo.admits(y.graph()) {
        return Ok(Q::zero());
    }
    let (dg, dh) = oriented(x, y);
    let mut total = Q::zero();
    for_each_config(dg.graph(), dh.graph(), topo, &mut |cfg| {
        total += config_integral(cfg, dg, dh, kind) * &cfg.weight;
    });
    Ok(total)
}

/// The integral of `F_A(G, H)·A` for one configuration.
fn config_integral(cfg: &Config, dg: &DecoratedGraph, dh: &DecoratedGraph, kind: EvaluationKind) -> Q {
    let a = &cfg.graph;
    let Some(kinds) = vertex_kinds(a.genera(), a.is_tree(), a.genus(), kind) else {
        return Q::zero();
    };
    let valences = a.valences();
    let targets: Vec<i64> = (0..a.num_vertices())
        .map(|v| kinds[v].top_degree(a.vertex_genus(v), valences[v]))
        .collect();
    let ex = Expansion::new(cfg, dg, dh);
    let at: Vec<Vec<usize>> = (0..a.num_vertices()).map(|v| a.half_edges_at(v)).collect();
    let mut sum = Q::zero();
    ex.for_each_top_term(&targets, &mut |psi, kappa| {
        let mut prod = Q::one();
        for v in 0..a.num_vertices() {
            let d: Vec<u32> = at[v].iter().map(|&h| psi[h]).collect();
            let x = kappa_reduce(a.vertex_genus(v), &d, &kappa[v], kinds[v]);
            if x.is_zero() {
                return;
            }
            prod *= x;
        }
        sum += prod;
    });
    sum * ex.sign
}

/// `∫ x·y·(evaluation class)` for formal sums.
pub fn pair_sums(x: &FormalSum, y: &FormalSum, kind: EvaluationKind) -> Result<Q> {
    check_sum_spaces(x, y)?;
    let mut total = Q::zero();
    for (a, ca) in x.iter() {
        for (b, cb) in y.iter() {
            let v = intersection_number(a, b, kind)?;
            if !v.is_zero() {
                total += v * ca * cb;
            }
        }
    }
    Ok(total)
}

/// Integral of the product computed the slow way: form the product, then
/// integrate term by term.
pub fn intersection_number_via_product(x: &DecoratedGraph, y: &DecoratedGraph, kind: EvaluationKind) -> Result<Q> {
    let p = multiply_graphs(x, y)?;
    let mut total = Q::zero();
    for (d, c) in p.iter() {
        if d.codim() as i64 == kind.top_degree(d.genus(), d.num_legs()) {
            total += c * integrate_unchecked(d, kind);
        }
    }
    Ok(total)
}
