//! Fixture loading shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use strata_core::{parse_sum, DecoratedGraph, FormalSum, Q};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn graph(name: &str) -> DecoratedGraph {
    read(name).parse().unwrap()
}

pub fn sum(name: &str) -> FormalSum {
    parse_sum(&read(name)).unwrap()
}

/// Splits a file into `@name` sections, skipping leading comments.
fn sections(src: &str) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    for line in src.lines() {
        if let Some(name) = line.strip_prefix('@') {
            out.push((name.trim().to_string(), String::new()));
        } else if let Some((_, body)) = out.last_mut() {
            body.push_str(line);
            body.push('\n');
        }
    }
    out
}

/// Named decorated graphs, in file order.
pub fn named_graphs(name: &str) -> Vec<(String, DecoratedGraph)> {
    sections(&read(name))
        .into_iter()
        .map(|(n, body)| (n, body.parse().unwrap()))
        .collect()
}

/// Named linear combinations `coef name, coef name, ...` over `classes`.
pub fn named_relations(name: &str, classes: &[(String, DecoratedGraph)]) -> Vec<(String, FormalSum)> {
    let lookup: BTreeMap<&str, &DecoratedGraph> = classes.iter().map(|(n, g)| (n.as_str(), g)).collect();
    sections(&read(name))
        .into_iter()
        .map(|(n, body)| {
            let mut s = FormalSum::new();
            for item in body.split(',') {
                let (c, class) = item.trim().split_once(' ').unwrap();
                let c: Q = c.parse().unwrap();
                s.add_term(lookup[class.trim()].clone(), c);
            }
            (n, s)
        })
        .collect()
}

/// A CSV table with row and column names.
pub struct Table {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub entries: Vec<Vec<Q>>,
}

pub fn table(name: &str) -> Table {
    let src = read(name);
    let mut lines = src.lines();
    let cols = lines.next().unwrap().split(',').skip(1).map(str::to_string).collect();
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for l in lines {
        let mut f = l.split(',');
        rows.push(f.next().unwrap().to_string());
        entries.push(f.map(|x| x.parse().unwrap()).collect());
    }
    Table { rows, cols, entries }
}
