//! Top intersection numbers of ψ-, κ- and λ-classes.
//!
//! `wk_tau` evaluates Witten–Kontsevich brackets through the string and
//! dilaton equations and the DVV recursion. `hodge_psi` evaluates ψ-monomials
//! against `λ_g` and `λ_gλ_{g-1}` in closed form, and `kappa_reduce` removes
//! κ-classes by pushing forward along forgetful maps. Results for positive
//! genus are memoized in a process-wide [`IntersectionCache`] that can be
//! saved to and loaded from a text file.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::decorated::{DecoratedGraph, FormalSum, Q};
use crate::error::{Result, StrataError};

/// The class a top-degree product is integrated against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EvaluationKind {
    Fundamental,
    LambdaG,
    LambdaGLambdaGMinus1,
}

impl EvaluationKind {
    /// Degree of the ψ/κ part that pairs nontrivially on `M̄_{g,n}`.
    pub fn top_degree(self, g: u32, n: usize) -> i64 {
        let (g, n) = (g as i64, n as i64);
        match self {
            EvaluationKind::Fundamental => 3 * g - 3 + n,
            EvaluationKind::LambdaG => 2 * g - 3 + n,
            EvaluationKind::LambdaGLambdaGMinus1 => g - 2 + n,
        }
    }

    fn code(self) -> u8 {
        match self {
            EvaluationKind::Fundamental => 0,
            EvaluationKind::LambdaG => 1,
            EvaluationKind::LambdaGLambdaGMinus1 => 2,
        }
    }

    fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(EvaluationKind::Fundamental),
            1 => Some(EvaluationKind::LambdaG),
            2 => Some(EvaluationKind::LambdaGLambdaGMinus1),
            _ => None,
        }
    }
}

impl fmt::Display for EvaluationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvaluationKind::Fundamental => "fundamental",
            EvaluationKind::LambdaG => "lambda-g",
            EvaluationKind::LambdaGLambdaGMinus1 => "lambda-g-lambda-g-minus-1",
        })
    }
}

impl FromStr for EvaluationKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fundamental" => Ok(EvaluationKind::Fundamental),
            "lambda-g" => Ok(EvaluationKind::LambdaG),
            "lambda-g-lambda-g-minus-1" => Ok(EvaluationKind::LambdaGLambdaGMinus1),
            other => Err(format!("unknown evaluation kind {other:?}")),
        }
    }
}

/// Key of a memoized ψ-integral: genus, sorted exponents and evaluation class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TauKey {
    pub genus: u32,
    pub exponents: Vec<u32>,
    pub hodge: EvaluationKind,
}

impl TauKey {
    pub fn new(genus: u32, exponents: &[u32], hodge: EvaluationKind) -> Self {
        let mut exponents = exponents.to_vec();
        exponents.sort_unstable();
        TauKey {
            genus,
            exponents,
            hodge,
        }
    }

    fn on_dimension(&self) -> bool {
        let n = self.exponents.len();
        if 2 * self.genus as i64 - 2 + n as i64 <= 0 {
            return false;
        }
        let sum: i64 = self.exponents.iter().map(|&d| d as i64).sum();
        sum == self.hodge.top_degree(self.genus, n)
    }
}

/// Memo table for positive-genus ψ-integrals. Readers run concurrently;
/// concurrent computation of the same key is harmless because values are exact.
#[derive(Default)]
pub struct IntersectionCache {
    table: RwLock<HashMap<TauKey, Q>>,
}

static GLOBAL: Lazy<IntersectionCache> = Lazy::new(IntersectionCache::default);

/// In-memory memo for κ-integrals; never persisted.
static KAPPA_MEMO: Lazy<RwLock<HashMap<(u32, Vec<u32>, Vec<u32>, EvaluationKind), Q>>> =
    Lazy::new(Default::default);

/// The process-wide cache used by all integrals.
pub fn global() -> &'static IntersectionCache {
    &GLOBAL
}

impl IntersectionCache {
    pub fn get(&self, key: &TauKey) -> Option<Q> {
        self.table.read().get(key).cloned()
    }

    /// Stores a value. Off-dimension keys are ignored since they are always zero.
    pub fn put(&self, key: TauKey, value: Q) {
        if key.on_dimension() {
            self.table.write().insert(key, value);
        }
    }

    pub fn len(&self) -> usize {
        self.table.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.table.write().clear();
        KAPPA_MEMO.write().clear();
    }

    /// Writes all entries, sorted, in the `v1` line format.
    pub fn snapshot(&self, path: &Path) -> io::Result<()> {
        let mut entries: Vec<(TauKey, Q)> = self
            .table
            .read()
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        entries.sort();
        let mut out = BufWriter::new(fs::File::create(path)?);
        for (k, v) in entries {
            let exps = if k.exponents.is_empty() {
                "-".to_string()
            } else {
                k.exponents
                    .iter()
                    .map(u32::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            };
            writeln!(
                out,
                "v1 {} {} {} {}/{}",
                k.genus,
                exps,
                k.hodge.code(),
                v.numer(),
                v.denom()
            )?;
        }
        out.flush()
    }

    /// Loads entries from a snapshot. Malformed lines are skipped with a
    /// warning. Returns the number of entries read.
    pub fn load(&self, path: &Path) -> io::Result<usize> {
        let file = fs::File::open(path)?;
        let mut count = 0;
        for (i, line) in io::BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match parse_cache_line(&line) {
                Some((k, v)) => {
                    self.put(k, v);
                    count += 1;
                }
                None => log::warn!("ignoring corrupt cache line {} in {}", i + 1, path.display()),
            }
        }
        Ok(count)
    }
}

fn parse_cache_line(line: &str) -> Option<(TauKey, Q)> {
    let mut parts = line.split_whitespace();
    if parts.next()? != "v1" {
        return None;
    }
    let genus: u32 = parts.next()?.parse().ok()?;
    let exps = parts.next()?;
    let exponents: Vec<u32> = if exps == "-" {
        Vec::new()
    } else {
        exps.split(',').map(|s| s.parse().ok()).collect::<Option<_>>()?
    };
    let hodge = EvaluationKind::from_code(parts.next()?.parse().ok()?)?;
    let (p, q) = parts.next()?.split_once('/')?;
    let (p, q): (BigInt, BigInt) = (p.parse().ok()?, q.parse().ok()?);
    if parts.next().is_some() || q.is_zero() {
        return None;
    }
    let key = TauKey::new(genus, &exponents, hodge);
    key.on_dimension().then(|| (key, Q::new(p, q)))
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `(2k-1)!!` with the convention `(-1)!! = 1`.
fn double_factorial_odd(k: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut m = 2 * k - 1;
    while m > 1 {
        acc *= m;
        m -= 2;
    }
    acc
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Bernoulli number `B_m` with `B_1 = -1/2`.
pub fn bernoulli(m: u32) -> Q {
    let mut b: Vec<Q> = vec![Q::one()];
    for n in 1..=m as u64 {
        let mut s = Q::zero();
        for (k, bk) in b.iter().enumerate() {
            s += Q::from_integer(binomial(n + 1, k as u64)) * bk;
        }
        b.push(-s / Q::from_integer(BigInt::from(n + 1)));
    }
    b.pop().expect("nonempty")
}

fn multinomial(d: &[u32]) -> BigInt {
    let total: u64 = d.iter().map(|&x| x as u64).sum();
    d.iter()
        .fold(factorial(total), |acc, &x| acc / factorial(x as u64))
}

/// `⟨τ_{d_1} ⋯ τ_{d_n}⟩_g`, zero off dimension.
pub fn wk_tau(g: u32, d: &[u32]) -> Q {
    let key = TauKey::new(g, d, EvaluationKind::Fundamental);
    if !key.on_dimension() {
        return Q::zero();
    }
    if g == 0 {
        return Q::from_integer(multinomial(&key.exponents));
    }
    if let Some(v) = global().get(&key) {
        return v;
    }
    let v = wk_compute(g, &key.exponents);
    global().put(key, v.clone());
    v
}

fn wk_compute(g: u32, d: &[u32]) -> Q {
    if g == 1 && d == [1] {
        return Q::new(1.into(), 24.into());
    }
    if let Some(i) = d.iter().position(|&x| x == 0) {
        let mut rest = d.to_vec();
        rest.remove(i);
        let mut s = Q::zero();
        for j in 0..rest.len() {
            if rest[j] > 0 {
                let mut t = rest.clone();
                t[j] -= 1;
                s += wk_tau(g, &t);
            }
        }
        return s;
    }
    if let Some(i) = d.iter().position(|&x| x == 1) {
        let mut rest = d.to_vec();
        rest.remove(i);
        let factor = 2 * g as i64 - 2 + rest.len() as i64;
        return wk_tau(g, &rest) * Q::from_integer(factor.into());
    }
    // DVV on the last (largest) exponent.
    let k = *d.last().expect("nonempty") as i64;
    let s = &d[..d.len() - 1];
    let mut total = Q::zero();
    for j in 0..s.len() {
        let dj = s[j] as i64;
        let mut t: Vec<u32> = s.to_vec();
        t[j] = (k + dj - 1) as u32;
        let c = Q::new(double_factorial_odd(k + dj), double_factorial_odd(dj));
        total += c * wk_tau(g, &t);
    }
    let mut split = Q::zero();
    for r in 0..=k - 2 {
        let sidx = k - 2 - r;
        let c = Q::from_integer(double_factorial_odd(r + 1) * double_factorial_odd(sidx + 1));
        let mut t: Vec<u32> = s.to_vec();
        t.push(r as u32);
        t.push(sidx as u32);
        let mut inner = wk_tau(g - 1, &t);
        let m = s.len();
        for mask in 0u64..(1u64 << m) {
            let mut left: Vec<u32> = vec![r as u32];
            let mut right: Vec<u32> = vec![sidx as u32];
            for (i, &x) in s.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    left.push(x);
                } else {
                    right.push(x);
                }
            }
            for g1 in 0..=g {
                let a = wk_tau(g1, &left);
                if a.is_zero() {
                    continue;
                }
                inner += a * wk_tau(g - g1, &right);
            }
        }
        split += c * inner;
    }
    total += split / Q::from_integer(2.into());
    total / Q::from_integer(double_factorial_odd(k + 1))
}

/// `|B_{2g}| / (2^{2g-1} (2g)!)`, the factor shared by the λ evaluations.
fn bernoulli_factor(g: u32) -> Q {
    let b = bernoulli(2 * g).abs();
    b / Q::from_integer(BigInt::from(2).pow(2 * g - 1) * factorial(2 * g as u64))
}

/// `∫ ψ^d · λ_g` or `∫ ψ^d · λ_gλ_{g-1}` over `M̄_{g,n}`; for the fundamental
/// class this is [`wk_tau`]. Zero off dimension.
pub fn hodge_psi(g: u32, d: &[u32], kind: EvaluationKind) -> Q {
    let key = TauKey::new(g, d, kind);
    if !key.on_dimension() {
        return Q::zero();
    }
    match kind {
        EvaluationKind::Fundamental => wk_tau(g, d),
        EvaluationKind::LambdaG => {
            let m = Q::from_integer(multinomial(&key.exponents));
            if g == 0 {
                return m;
            }
            if let Some(v) = global().get(&key) {
                return v;
            }
            let pow = BigInt::from(2).pow(2 * g - 1);
            let b = bernoulli_factor(g) * Q::from_integer(pow - 1u32);
            let v = m * b;
            global().put(key, v.clone());
            v
        }
        EvaluationKind::LambdaGLambdaGMinus1 => {
            if g == 0 {
                return Q::zero();
            }
            if g == 1 {
                return hodge_psi(1, d, EvaluationKind::LambdaG);
            }
            if let Some(v) = global().get(&key) {
                return v;
            }
            let v = socle_compute(g, &key.exponents);
            global().put(key, v.clone());
            v
        }
    }
}

fn socle_compute(g: u32, d: &[u32]) -> Q {
    let kind = EvaluationKind::LambdaGLambdaGMinus1;
    if d.is_empty() {
        // Dilaton: ⟨τ_1 λλ⟩_{g,1} = (2g-2)⟨λλ⟩_g.
        return hodge_psi(g, &[1], kind) / Q::from_integer(BigInt::from(2 * g - 2));
    }
    if let Some(i) = d.iter().position(|&x| x == 0) {
        let mut rest = d.to_vec();
        rest.remove(i);
        let mut s = Q::zero();
        for j in 0..rest.len() {
            if rest[j] > 0 {
                let mut t = rest.clone();
                t[j] -= 1;
                s += hodge_psi(g, &t, kind);
            }
        }
        return s;
    }
    let n = d.len() as u64;
    let denom = d
        .iter()
        .fold(BigInt::one(), |acc, &x| acc * double_factorial_odd(x as i64));
    bernoulli_factor(g) * Q::from_integer(factorial(2 * g as u64 - 3 + n)) / Q::from_integer(denom)
}

/// `∫ ψ^d · κ_{b_1}⋯κ_{b_m} · (evaluation class)` over `M̄_{g,n}`.
pub fn kappa_reduce(g: u32, d: &[u32], b: &[u32], kind: EvaluationKind) -> Q {
    if b.is_empty() {
        return hodge_psi(g, d, kind);
    }
    let n = d.len() as i64;
    if 2 * g as i64 - 2 + n <= 0 {
        return Q::zero();
    }
    let total: i64 = d.iter().chain(b).map(|&x| x as i64).sum();
    if total != kind.top_degree(g, d.len()) {
        return Q::zero();
    }
    let mut d = d.to_vec();
    d.sort_unstable();
    let mut b = b.to_vec();
    b.sort_unstable();
    let key = (g, d, b, kind);
    if let Some(v) = KAPPA_MEMO.read().get(&key) {
        return v.clone();
    }
    let (_, d, b, _) = &key;
    let (first, rest) = (b[0], &b[1..]);
    let mut sum = Q::zero();
    for mask in 0u64..(1u64 << rest.len()) {
        let mut e = first + 1;
        let mut kept = Vec::new();
        for (i, &x) in rest.iter().enumerate() {
            if mask >> i & 1 == 1 {
                e += x;
            } else {
                kept.push(x);
            }
        }
        let mut dd = d.clone();
        dd.push(e);
        let v = kappa_reduce(g, &dd, &kept, kind);
        if mask.count_ones() % 2 == 1 {
            sum -= v;
        } else {
            sum += v;
        }
    }
    KAPPA_MEMO.write().insert(key, sum.clone());
    sum
}

/// The evaluation class and target degree used at each vertex of a stratum,
/// or `None` if the class restricts to zero on it.
pub(crate) fn vertex_kinds(
    genera: &[u32],
    is_tree: bool,
    genus: u32,
    kind: EvaluationKind,
) -> Option<Vec<EvaluationKind>> {
    match kind {
        EvaluationKind::Fundamental => Some(vec![EvaluationKind::Fundamental; genera.len()]),
        EvaluationKind::LambdaG => is_tree.then(|| vec![EvaluationKind::LambdaG; genera.len()]),
        EvaluationKind::LambdaGLambdaGMinus1 => {
            if genus == 0 || !is_tree {
                return None;
            }
            let positive: Vec<usize> = (0..genera.len()).filter(|&v| genera[v] > 0).collect();
            if positive.len() != 1 || genera[positive[0]] != genus {
                return None;
            }
            Some(
                (0..genera.len())
                    .map(|v| {
                        if v == positive[0] {
                            EvaluationKind::LambdaGLambdaGMinus1
                        } else {
                            EvaluationKind::Fundamental
                        }
                    })
                    .collect(),
            )
        }
    }
}

/// Integral of the class of a decorated graph (unnormalized pushforward of
/// its vertex monomials) against the evaluation class.
pub fn integrate_graph(a: &DecoratedGraph, kind: EvaluationKind) -> Result<Q> {
    let g = a.graph();
    let expected = kind.top_degree(g.genus(), g.num_legs());
    let found = a.codim() as i64;
    if found != expected {
        return Err(StrataError::DimensionMismatch { expected, found });
    }
    Ok(integrate_unchecked(a, kind))
}

pub(crate) fn integrate_unchecked(a: &DecoratedGraph, kind: EvaluationKind) -> Q {
    let g = a.graph();
    let Some(kinds) = vertex_kinds(g.genera(), g.is_tree(), g.genus(), kind) else {
        return Q::zero();
    };
    let mut psi_at: Vec<Vec<u32>> = vec![Vec::new(); g.num_vertices()];
    for h in 0..g.num_half_edges() {
        psi_at[g.vertex(h)].push(a.psi()[h]);
    }
    let mut prod = Q::one();
    for v in 0..g.num_vertices() {
        let x = kappa_reduce(g.vertex_genus(v), &psi_at[v], &a.kappa()[v], kinds[v]);
        if x.is_zero() {
            return x;
        }
        prod *= x;
    }
    prod
}

/// Linear extension of [`integrate_graph`]; terms of the wrong degree count as zero.
pub fn integrate_sum(s: &FormalSum, kind: EvaluationKind) -> Q {
    let mut total = Q::zero();
    for (g, c) in s.iter() {
        let expected = kind.top_degree(g.genus(), g.num_legs());
        if g.codim() as i64 == expected {
            total += c * integrate_unchecked(g, kind);
        }
    }
    total
}
