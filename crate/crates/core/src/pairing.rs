//! Gram matrices of the intersection pairing, their ranks and kernels.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::canon::CanonicalKey;
use crate::decorated::{DecoratedGraph, FormalSum, Q};
use crate::enumeration::{decorated_basis, SpaceKind};
use crate::error::{Result, StrataError};
use crate::linalg;
use crate::product::{intersection_number, pair_sums};

/// Pairing of the codimension-`k` spanning set against the complementary one.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub g: u32,
    pub n: usize,
    pub k: usize,
    pub space: SpaceKind,
    pub rows: Vec<DecoratedGraph>,
    pub cols: Vec<DecoratedGraph>,
    pub entries: Vec<Vec<Q>>,
}

/// Entries are filled in parallel; the result does not depend on scheduling.
pub fn gram(g: u32, n: usize, k: usize, space: SpaceKind) -> GramMatrix {
    let top = space.top_degree(g, n);
    let rows = decorated_basis(g, n, k, space);
    let cols = if (k as i64) <= top {
        decorated_basis(g, n, (top - k as i64) as usize, space)
    } else {
        Vec::new()
    };
    let kind = space.evaluation();
    let cells: Vec<(usize, usize)> = (0..rows.len())
        .flat_map(|i| (0..cols.len()).map(move |j| (i, j)))
        .collect();
    let values: Vec<Q> = cells
        .par_iter()
        .map(|&(i, j)| intersection_number(&rows[i], &cols[j], kind).expect("basis elements share a space"))
        .collect();
    let mut entries = vec![vec![Q::zero(); cols.len()]; rows.len()];
    for ((i, j), v) in cells.into_iter().zip(values) {
        entries[i][j] = v;
    }
    GramMatrix {
        g,
        n,
        k,
        space,
        rows,
        cols,
        entries,
    }
}

impl GramMatrix {
    pub fn rank(&self) -> usize {
        linalg::rank(&self.entries)
    }

    /// Relations among the row classes that pair to zero with every column,
    /// as primitive integer vectors.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        linalg::row_kernel(&self.entries, self.cols.len())
    }

    /// The formal sum of row classes with the given coefficients.
    pub fn combination(&self, coefficients: &[BigInt]) -> FormalSum {
        let mut out = FormalSum::new();
        for (r, c) in self.rows.iter().zip(coefficients) {
            out.add_term(r.clone(), Q::from(c.clone()));
        }
        out
    }

    pub fn row_index(&self, key: &CanonicalKey) -> Option<usize> {
        self.rows.iter().position(|r| &r.canonical_key() == key)
    }

    pub fn col_index(&self, key: &CanonicalKey) -> Option<usize> {
        self.cols.iter().position(|c| &c.canonical_key() == key)
    }

    /// CSV with a header row of column indices; the first field of every
    /// other row is the row index. Entries are multiplied by `scale`.
    pub fn to_csv(&self, scale: &Q) -> String {
        let mut s = String::from("row");
        for j in 0..self.cols.len() {
            write!(s, ",c{j}").unwrap();
        }
        s.push('\n');
        for (i, row) in self.entries.iter().enumerate() {
            write!(s, "r{i}").unwrap();
            for x in row {
                write!(s, ",{}", x * scale).unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self, scale: &Q) -> serde_json::Value {
        #[derive(Serialize)]
        struct Out {
            g: u32,
            n: usize,
            k: usize,
            space: SpaceKind,
            scale: String,
            rows: Vec<String>,
            cols: Vec<String>,
            entries: Vec<Vec<String>>,
        }
        serde_json::to_value(Out {
            g: self.g,
            n: self.n,
            k: self.k,
            space: self.space,
            scale: scale.to_string(),
            rows: self.rows.iter().map(ToString::to_string).collect(),
            cols: self.cols.iter().map(ToString::to_string).collect(),
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(|x| (x * scale).to_string()).collect())
                .collect(),
        })
        .expect("serializable")
    }
}

/// Ranks of the pairing in every codimension from 0 to the top degree.
pub fn rank_table(g: u32, n: usize, space: SpaceKind) -> Vec<usize> {
    let top = space.top_degree(g, n);
    if top < 0 {
        return Vec::new();
    }
    (0..=top as usize).map(|k| gram(g, n, k, space).rank()).collect()
}

/// The pairings of a relation with the complementary spanning set.
#[derive(Clone, Debug)]
pub struct RelationReport {
    pub g: u32,
    pub n: usize,
    pub k: usize,
    pub space: SpaceKind,
    pub values: Vec<(DecoratedGraph, Q)>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.values.iter().all(|(_, v)| v.is_zero())
    }

    pub fn failures(&self) -> impl Iterator<Item = &(DecoratedGraph, Q)> {
        self.values.iter().filter(|(_, v)| !v.is_zero())
    }
}

/// Pairs a homogeneous relation of codimension `k` with every element of
/// the complementary spanning set.
pub fn verify_relation(r: &FormalSum, g: u32, n: usize, k: usize, space: SpaceKind) -> Result<RelationReport> {
    if let Some(s) = r.space() {
        if s != (g, n as u32) {
            return Err(StrataError::SpaceMismatch(s, (g, n as u32)));
        }
    }
    if r.iter().any(|(t, _)| t.codim() != k) {
        return Err(StrataError::DegreeMismatch(k));
    }
    let top = space.top_degree(g, n);
    let cols = if k as i64 <= top {
        decorated_basis(g, n, (top - k as i64) as usize, space)
    } else {
        Vec::new()
    };
    let kind = space.evaluation();
    let values = cols
        .into_par_iter()
        .map(|c| {
            let v = pair_sums(r, &FormalSum::from_graph(c.clone()), kind)?;
            Ok((c, v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RelationReport {
        g,
        n,
        k,
        space,
        values,
    })
}
