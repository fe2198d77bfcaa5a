//! Text and JSON formats for decorated graphs and formal sums.
//!
//! ```text
//! # a comment
//! -7/5 * graph g=2 n=1 { v0: genus=1; v1: genus=1; edge(v0.0, v1.0); leg(1, v0.1); }
//! 1 * graph g=2 n=1 { v0: genus=2; leg(1, v0.0); kappa(v0)=[1:1]; }
//! ```
//!
//! A half-edge is written `v<i>.<h>`: vertex `i` and a local id `h` that is
//! unique among the half-edges at that vertex.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::decorated::{DecoratedGraph, FormalSum, Q};
use crate::error::{Result, StrataError};
use crate::graph::StableGraph;

impl fmt::Display for DecoratedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.graph();
        let local = local_ids(g);
        let name = |h: usize| format!("v{}.{}", g.vertex(h), local[h]);
        write!(f, "graph g={} n={} {{", g.genus(), g.num_legs())?;
        for v in 0..g.num_vertices() {
            write!(f, " v{}: genus={};", v, g.vertex_genus(v))?;
        }
        for (h, k) in g.edges() {
            write!(f, " edge({}, {});", name(h), name(k))?;
        }
        for (i, &h) in g.legs().iter().enumerate() {
            write!(f, " leg({}, {});", i + 1, name(h))?;
        }
        for (h, &e) in self.psi().iter().enumerate() {
            if e > 0 {
                write!(f, " psi({})={};", name(h), e)?;
            }
        }
        for (v, m) in self.kappa().iter().enumerate() {
            if m.is_empty() {
                continue;
            }
            let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
            for &j in m {
                *counts.entry(j).or_default() += 1;
            }
            let items: Vec<String> = counts.iter().map(|(j, c)| format!("{j}:{c}")).collect();
            write!(f, " kappa(v{})=[{}];", v, items.join(", "))?;
        }
        write!(f, " }}")
    }
}

fn local_ids(g: &StableGraph) -> Vec<usize> {
    let mut next = vec![0; g.num_vertices()];
    let mut out = vec![0; g.num_half_edges()];
    for h in 0..g.num_half_edges() {
        let v = g.vertex(h);
        out[h] = next[v];
        next[v] += 1;
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Punct(char),
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> StrataError {
    StrataError::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

impl Lexer {
    fn new(src: &str) -> Result<Self> {
        let mut toks = Vec::new();
        let (mut line, mut col) = (1usize, 1usize);
        let chars: Vec<char> = src.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (l0, c0) = (line, col);
            if c == '\n' {
                line += 1;
                col = 1;
                i += 1;
            } else if c.is_whitespace() {
                col += 1;
                i += 1;
            } else if c == '#' {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                col += i - start;
                toks.push((Tok::Int(text.parse().expect("digits")), l0, c0));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphabetic() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                col += i - start;
                toks.push((Tok::Ident(text), l0, c0));
            } else if "{}()[]:;,.=*/-+".contains(c) {
                toks.push((Tok::Punct(c), l0, c0));
                col += 1;
                i += 1;
            } else {
                return Err(perr(line, col, format!("unexpected character {c:?}")));
            }
        }
        Ok(Lexer {
            toks,
            pos: 0,
            end: (line, col),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |t| (t.1, t.2))
    }

    fn err(&self, msg: impl Into<String>) -> StrataError {
        let (l, c) = self.here();
        perr(l, c, msg)
    }

    fn next(&mut self) -> Result<Tok> {
        let t = self
            .toks
            .get(self.pos)
            .map(|t| t.0.clone())
            .ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn punct(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(Tok::Punct(d)) if *d == c => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected '{c}'"))),
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(d)) if *d == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected '{kw}'"))),
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        match self.next()? {
            Tok::Int(n) => Ok(n),
            _ => {
                self.pos -= 1;
                Err(self.err("expected an integer"))
            }
        }
    }

    fn small(&mut self) -> Result<u32> {
        let at = self.here();
        let n = self.int()?;
        u32::try_from(n).map_err(|_| perr(at.0, at.1, "integer out of range"))
    }

    /// Parses `v<i>` where the identifier token is `v` followed by an integer.
    fn vertex_ref(&mut self) -> Result<usize> {
        self.keyword("v")?;
        Ok(self.small()? as usize)
    }

    fn half_ref(&mut self) -> Result<(usize, u32)> {
        let v = self.vertex_ref()?;
        self.punct('.')?;
        Ok((v, self.small()?))
    }

    fn rational(&mut self) -> Result<Q> {
        let neg = if self.eat_punct('-') {
            true
        } else {
            self.eat_punct('+');
            false
        };
        let p = self.int()?;
        let q = if self.eat_punct('/') {
            let at = self.here();
            let q = self.int()?;
            if q == BigInt::from(0) {
                return Err(perr(at.0, at.1, "zero denominator"));
            }
            q
        } else {
            BigInt::from(1)
        };
        let r = Q::new(p, q);
        Ok(if neg { -r } else { r })
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }
}

enum Stmt {
    Vertex(usize, u32),
    Edge((usize, u32), (usize, u32)),
    Leg(u32, (usize, u32)),
    Psi((usize, u32), u32),
    Kappa(usize, Vec<(u32, u32)>),
}

fn parse_graph(lx: &mut Lexer) -> Result<DecoratedGraph> {
    let start = lx.here();
    lx.keyword("graph")?;
    lx.keyword("g")?;
    lx.punct('=')?;
    let g = lx.small()?;
    lx.keyword("n")?;
    lx.punct('=')?;
    let n = lx.small()?;
    lx.punct('{')?;
    let mut stmts = Vec::new();
    while !lx.eat_punct('}') {
        let at = lx.here();
        let stmt = match lx.peek() {
            Some(Tok::Ident(s)) if s == "v" => {
                let v = lx.vertex_ref()?;
                lx.punct(':')?;
                lx.keyword("genus")?;
                lx.punct('=')?;
                Stmt::Vertex(v, lx.small()?)
            }
            Some(Tok::Ident(s)) if s == "edge" => {
                lx.pos += 1;
                lx.punct('(')?;
                let a = lx.half_ref()?;
                lx.punct(',')?;
                let b = lx.half_ref()?;
                lx.punct(')')?;
                Stmt::Edge(a, b)
            }
            Some(Tok::Ident(s)) if s == "leg" => {
                lx.pos += 1;
                lx.punct('(')?;
                let label = lx.small()?;
                lx.punct(',')?;
                let a = lx.half_ref()?;
                lx.punct(')')?;
                Stmt::Leg(label, a)
            }
            Some(Tok::Ident(s)) if s == "psi" => {
                lx.pos += 1;
                lx.punct('(')?;
                let a = lx.half_ref()?;
                lx.punct(')')?;
                lx.punct('=')?;
                Stmt::Psi(a, lx.small()?)
            }
            Some(Tok::Ident(s)) if s == "kappa" => {
                lx.pos += 1;
                lx.punct('(')?;
                let v = lx.vertex_ref()?;
                lx.punct(')')?;
                lx.punct('=')?;
                lx.punct('[')?;
                let mut mono = Vec::new();
                if !lx.eat_punct(']') {
                    loop {
                        let jat = lx.here();
                        let j = lx.small()?;
                        if j == 0 {
                            return Err(perr(jat.0, jat.1, "kappa index must be at least 1"));
                        }
                        lx.punct(':')?;
                        mono.push((j, lx.small()?));
                        if lx.eat_punct(']') {
                            break;
                        }
                        lx.punct(',')?;
                    }
                }
                Stmt::Kappa(v, mono)
            }
            _ => return Err(lx.err("expected a vertex, edge, leg, psi or kappa statement")),
        };
        stmts.push((stmt, at));
        if !lx.eat_punct(';') && !matches!(lx.peek(), Some(Tok::Punct('}'))) {
            return Err(lx.err("expected ';'"));
        }
    }
    build(g, n, stmts, start)
}

fn build(g: u32, n: u32, stmts: Vec<(Stmt, (usize, usize))>, start: (usize, usize)) -> Result<DecoratedGraph> {
    let mut genera: BTreeMap<usize, u32> = BTreeMap::new();
    for (s, at) in &stmts {
        if let Stmt::Vertex(v, gv) = s {
            if genera.insert(*v, *gv).is_some() {
                return Err(perr(at.0, at.1, format!("vertex v{v} declared twice")));
            }
        }
    }
    let nv = genera.len();
    if genera.keys().enumerate().any(|(i, &v)| i != v) {
        return Err(perr(start.0, start.1, "vertices must be numbered v0, v1, ... without gaps"));
    }
    let mut ids: BTreeMap<(usize, u32), usize> = BTreeMap::new();
    let mut vertex_of = Vec::new();
    let mut involution = Vec::new();
    let mut new_half = |r: (usize, u32), at: (usize, usize), vertex_of: &mut Vec<usize>| -> Result<usize> {
        if r.0 >= nv {
            return Err(perr(at.0, at.1, format!("unknown vertex v{}", r.0)));
        }
        if ids.contains_key(&r) {
            return Err(perr(at.0, at.1, format!("half-edge v{}.{} used twice", r.0, r.1)));
        }
        let h = vertex_of.len();
        vertex_of.push(r.0);
        ids.insert(r, h);
        Ok(h)
    };
    let mut legs: BTreeMap<u32, usize> = BTreeMap::new();
    for (s, at) in &stmts {
        match s {
            Stmt::Edge(a, b) => {
                let ha = new_half(*a, *at, &mut vertex_of)?;
                let hb = new_half(*b, *at, &mut vertex_of)?;
                involution.extend([hb, ha]);
            }
            Stmt::Leg(label, a) => {
                let h = new_half(*a, *at, &mut vertex_of)?;
                involution.push(h);
                if legs.insert(*label, h).is_some() {
                    return Err(perr(at.0, at.1, format!("leg label {label} used twice")));
                }
            }
            _ => {}
        }
    }
    if legs.keys().enumerate().any(|(i, &l)| l as usize != i + 1) {
        return Err(perr(start.0, start.1, "leg labels must be 1..n"));
    }
    let mut psi = vec![0; vertex_of.len()];
    let mut kappa = vec![Vec::new(); nv];
    for (s, at) in &stmts {
        match s {
            Stmt::Psi(r, e) => {
                let h = *ids
                    .get(r)
                    .ok_or_else(|| perr(at.0, at.1, format!("unknown half-edge v{}.{}", r.0, r.1)))?;
                psi[h] += e;
            }
            Stmt::Kappa(v, mono) => {
                if *v >= nv {
                    return Err(perr(at.0, at.1, format!("unknown vertex v{v}")));
                }
                for &(j, f) in mono {
                    kappa[*v].extend(std::iter::repeat_n(j, f as usize));
                }
            }
            _ => {}
        }
    }
    let graph = StableGraph::new(
        genera.into_values().collect(),
        vertex_of,
        involution,
        legs.into_values().collect(),
    )
    .map_err(|e| perr(start.0, start.1, e.to_string()))?;
    if graph.genus() != g || graph.num_legs() != n as usize {
        return Err(perr(
            start.0,
            start.1,
            format!(
                "header says g={g} n={n} but the graph has g={} n={}",
                graph.genus(),
                graph.num_legs()
            ),
        ));
    }
    DecoratedGraph::new(graph, psi, kappa).map_err(|e| perr(start.0, start.1, e.to_string()))
}

impl FromStr for DecoratedGraph {
    type Err = StrataError;

    fn from_str(s: &str) -> Result<Self> {
        if looks_like_json(s) {
            return serde_json::from_str::<GraphJson>(s)
                .map_err(json_err)?
                .into_graph();
        }
        let mut lx = Lexer::new(s)?;
        let g = parse_graph(&mut lx)?;
        if !lx.at_end() {
            return Err(lx.err("trailing input after graph"));
        }
        Ok(g)
    }
}

/// Parses a formal sum: a sequence of `<p/q> * graph ...` items. A bare
/// graph stands for coefficient 1.
pub fn parse_sum(src: &str) -> Result<FormalSum> {
    if looks_like_json(src) {
        let items: Vec<TermJson> = serde_json::from_str(src).map_err(json_err)?;
        let mut out = FormalSum::new();
        for t in items {
            let c: Q = t
                .coeff
                .parse()
                .map_err(|_| perr(0, 0, format!("bad coefficient {:?}", t.coeff)))?;
            out.add_term(t.graph.into_graph()?, c);
        }
        return Ok(out);
    }
    let mut lx = Lexer::new(src)?;
    let mut out = FormalSum::new();
    while !lx.at_end() {
        let c = if matches!(lx.peek(), Some(Tok::Ident(s)) if s == "graph") {
            Q::from_integer(1.into())
        } else {
            let c = lx.rational()?;
            lx.punct('*')?;
            c
        };
        let g = parse_graph(&mut lx)?;
        out.add_term(g, c);
    }
    Ok(out)
}

fn looks_like_json(s: &str) -> bool {
    let t = s.trim_start();
    t.starts_with('{') || t.starts_with('[')
}

fn json_err(e: serde_json::Error) -> StrataError {
    perr(e.line(), e.column(), e.to_string())
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    genus: u32,
}

#[derive(Serialize, Deserialize)]
struct LegJson {
    label: u32,
    at: (usize, u32),
}

#[derive(Serialize, Deserialize)]
struct PsiJson {
    at: (usize, u32),
    exp: u32,
}

#[derive(Serialize, Deserialize)]
struct KappaJson {
    vertex: usize,
    monomial: Vec<(u32, u32)>,
}

/// JSON mirror of the text grammar. Half-edges are `[vertex, local id]`.
#[derive(Serialize, Deserialize)]
pub struct GraphJson {
    g: u32,
    n: u32,
    vertices: Vec<VertexJson>,
    #[serde(default)]
    edge: Vec<((usize, u32), (usize, u32))>,
    #[serde(default)]
    leg: Vec<LegJson>,
    #[serde(default)]
    psi: Vec<PsiJson>,
    #[serde(default)]
    kappa: Vec<KappaJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coeff: String,
    graph: GraphJson,
}

impl GraphJson {
    fn into_graph(self) -> Result<DecoratedGraph> {
        let at = (0, 0);
        let mut stmts: Vec<(Stmt, (usize, usize))> = Vec::new();
        for (v, x) in self.vertices.iter().enumerate() {
            stmts.push((Stmt::Vertex(v, x.genus), at));
        }
        for (a, b) in self.edge {
            stmts.push((Stmt::Edge(a, b), at));
        }
        for l in self.leg {
            stmts.push((Stmt::Leg(l.label, l.at), at));
        }
        for p in self.psi {
            stmts.push((Stmt::Psi(p.at, p.exp), at));
        }
        for k in self.kappa {
            if k.monomial.iter().any(|&(j, _)| j == 0) {
                return Err(perr(0, 0, "kappa index must be at least 1"));
            }
            stmts.push((Stmt::Kappa(k.vertex, k.monomial), at));
        }
        build(self.g, self.n, stmts, at)
    }

    pub fn from_graph(d: &DecoratedGraph) -> Self {
        let g = d.graph();
        let local = local_ids(g);
        let r = |h: usize| (g.vertex(h), local[h] as u32);
        GraphJson {
            g: g.genus(),
            n: g.num_legs() as u32,
            vertices: g.genera().iter().map(|&genus| VertexJson { genus }).collect(),
            edge: g.edges().into_iter().map(|(h, k)| (r(h), r(k))).collect(),
            leg: g
                .legs()
                .iter()
                .enumerate()
                .map(|(i, &h)| LegJson {
                    label: i as u32 + 1,
                    at: r(h),
                })
                .collect(),
            psi: d
                .psi()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(h, &exp)| PsiJson { at: r(h), exp })
                .collect(),
            kappa: d
                .kappa()
                .iter()
                .enumerate()
                .filter(|(_, m)| !m.is_empty())
                .map(|(vertex, m)| {
                    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
                    for &j in m {
                        *counts.entry(j).or_default() += 1;
                    }
                    KappaJson {
                        vertex,
                        monomial: counts.into_iter().collect(),
                    }
                })
                .collect(),
        }
    }
}

/// Serializes a formal sum as a JSON array of `{coeff, graph}` objects.
pub fn sum_to_json(s: &FormalSum) -> serde_json::Value {
    let items: Vec<TermJson> = s
        .iter()
        .map(|(g, c)| TermJson {
            coeff: c.to_string(),
            graph: GraphJson::from_graph(g),
        })
        .collect();
    serde_json::to_value(items).expect("serializable")
}
