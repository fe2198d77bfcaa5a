use num_traits::Zero;
use proptest::prelude::*;

use strata_core::enumeration::{decorated_basis, max_edges, stable_graphs, SpaceKind};
use strata_core::integrals::{wk_tau, EvaluationKind};
use strata_core::linalg;
use strata_core::pairing::gram;
use strata_core::product::{intersection_number, intersection_number_via_product, multiply_graphs, multiply_graphs_reference};
use strata_core::{DecoratedGraph, FormalSum, Q};

const SPACES: [(u32, usize); 7] = [(0, 4), (0, 5), (1, 1), (1, 2), (1, 3), (2, 0), (2, 1)];

fn build(s: usize, idx: prop::sample::Index, bits: u64) -> DecoratedGraph {
    let (g, n) = SPACES[s];
    let e = (bits as usize) % (max_edges(g, n) + 1);
    let list = stable_graphs(g, n, e);
    let base = list[idx.index(list.len())].clone();
    let psi = (0..base.num_half_edges()).map(|h| ((bits >> (8 + h)) & 1) as u32).collect();
    let kappa = (0..base.num_vertices())
        .map(|v| if (bits >> (40 + v)) & 1 == 1 { vec![1] } else { Vec::new() })
        .collect();
    DecoratedGraph::new(base, psi, kappa).unwrap()
}

/// A random decorated graph on one of the small spaces.
fn decorated() -> impl Strategy<Value = DecoratedGraph> {
    (0..SPACES.len(), any::<prop::sample::Index>(), any::<u64>()).prop_map(|(s, idx, bits)| build(s, idx, bits))
}

/// Two random decorated graphs on the same small space.
fn same_space() -> impl Strategy<Value = (DecoratedGraph, DecoratedGraph)> {
    (0..SPACES.len(), any::<prop::sample::Index>(), any::<u64>(), any::<prop::sample::Index>(), any::<u64>())
        .prop_map(|(s, i, a, j, b)| (build(s, i, a), build(s, j, b)))
}

/// Two basis elements on the same small space.
fn basis_pair() -> impl Strategy<Value = (DecoratedGraph, DecoratedGraph)> {
    (0..SPACES.len(), any::<prop::sample::Index>(), any::<prop::sample::Index>(), any::<prop::sample::Index>()).prop_map(
        |(s, k, i, j)| {
            let (g, n) = SPACES[s];
            let top = 3 * g as usize + n - 3;
            let k = k.index(top + 1);
            let rows = decorated_basis(g, n, k, SpaceKind::Mbar);
            let cols = decorated_basis(g, n, top - k, SpaceKind::Mbar);
            (rows[i.index(rows.len())].clone(), cols[j.index(cols.len())].clone())
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fast_product_matches_reference((x, y) in same_space()) {
        prop_assume!(x.graph().num_edges() + y.graph().num_edges() <= 4);
        let fast = multiply_graphs(&x, &y).unwrap();
        prop_assert_eq!(&fast, &multiply_graphs_reference(&x, &y).unwrap());
        prop_assert_eq!(&fast, &multiply_graphs(&y, &x).unwrap());
    }

    #[test]
    fn direct_pairing_matches_product((x, y) in basis_pair()) {
        let kind = EvaluationKind::Fundamental;
        prop_assert_eq!(
            intersection_number(&x, &y, kind).unwrap(),
            intersection_number_via_product(&x, &y, kind).unwrap()
        );
    }

    #[test]
    fn canonical_key_ignores_labels(x in decorated(), seed in any::<u64>()) {
        let g = x.graph();
        let mut vperm: Vec<usize> = (0..g.num_vertices()).collect();
        let mut hperm: Vec<usize> = (0..g.num_half_edges()).collect();
        // Deterministic shuffles driven by the seed.
        let mut s = seed | 1;
        for p in [&mut vperm, &mut hperm] {
            for i in (1..p.len()).rev() {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                p.swap(i, (s % (i as u64 + 1)) as usize);
            }
        }
        let mut psi = vec![0; g.num_half_edges()];
        for (h, &e) in x.psi().iter().enumerate() {
            psi[hperm[h]] = e;
        }
        let mut kappa = vec![Vec::new(); g.num_vertices()];
        for (v, m) in x.kappa().iter().enumerate() {
            kappa[vperm[v]] = m.clone();
        }
        let y = DecoratedGraph::new(g.relabeled(&vperm, &hperm), psi, kappa).unwrap();
        prop_assert_eq!(x.canonical_key(), y.canonical_key());
        prop_assert_eq!(x.automorphism_order(), y.automorphism_order());
    }

    #[test]
    fn text_round_trip(x in decorated()) {
        let y: DecoratedGraph = x.to_string().parse().unwrap();
        prop_assert_eq!(x.canonical_key(), y.canonical_key());
    }

    #[test]
    fn string_and_dilaton(g in 0u32..4, raw in prop::collection::vec(0u32..4, 1..5)) {
        let n = raw.len();
        prop_assume!(2 * g as usize + n > 2);
        let dim = 3 * g as usize + n - 3;
        // Spread `dim` over the points in proportion to `raw`.
        let mut d = vec![0u32; n];
        let weight: u32 = raw.iter().sum::<u32>() + n as u32;
        let mut left = dim as u32;
        for i in 0..n {
            let share = if i + 1 == n { left } else { (dim as u32 * (raw[i] + 1) / weight).min(left) };
            d[i] = share;
            left -= share;
        }
        let mut with1 = d.clone();
        with1.push(1);
        let factor = Q::from_integer((2 * g as i64 - 2 + n as i64).into());
        prop_assert_eq!(wk_tau(g, &with1), wk_tau(g, &d) * factor);
        let mut raised = d.clone();
        raised[0] += 1;
        let mut with0 = raised.clone();
        with0.push(0);
        let mut rhs = Q::zero();
        for j in 0..n {
            if raised[j] > 0 {
                let mut e = raised.clone();
                e[j] -= 1;
                rhs += wk_tau(g, &e);
            }
        }
        prop_assert_eq!(wk_tau(g, &with0), rhs);
    }

    #[test]
    fn rank_ignores_row_scaling(scales in prop::collection::vec(1i64..7, 7)) {
        let m = gram(2, 1, 2, SpaceKind::Mbar);
        let scaled: Vec<Vec<Q>> = m
            .entries
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let c = Q::from_integer(scales[i % scales.len()].into());
                r.iter().map(|x| x * &c).collect()
            })
            .collect();
        prop_assert_eq!(linalg::rank(&scaled), m.rank());
    }
}

#[test]
fn gram_is_transpose_of_complement() {
    for (g, n, s) in [(2, 1, SpaceKind::Mbar), (3, 1, SpaceKind::Ct), (2, 2, SpaceKind::Rt), (0, 6, SpaceKind::Mbar)] {
        let top = s.top_degree(g, n) as usize;
        for k in 0..=top {
            let a = gram(g, n, k, s);
            let b = gram(g, n, top - k, s);
            for i in 0..a.rows.len() {
                for j in 0..a.cols.len() {
                    assert_eq!(a.entries[i][j], b.entries[j][i]);
                }
            }
        }
    }
}

#[test]
fn kernel_vectors_are_relations() {
    let m = gram(2, 2, 1, SpaceKind::Ct);
    for v in m.kernel_basis() {
        let r: FormalSum = m.combination(&v);
        let rep = strata_core::pairing::verify_relation(&r, 2, 2, 1, SpaceKind::Ct).unwrap();
        assert!(rep.passed());
    }
}

#[test]
fn pruned_pairings_match_product() {
    for (g, n, k, s) in [(2, 2, 1, SpaceKind::Ct), (3, 1, 2, SpaceKind::Ct), (2, 2, 1, SpaceKind::Rt), (3, 1, 1, SpaceKind::Rt)] {
        let m = gram(g, n, k, s);
        for (i, r) in m.rows.iter().enumerate() {
            for (j, c) in m.cols.iter().enumerate() {
                let slow = intersection_number_via_product(r, c, s.evaluation()).unwrap();
                assert_eq!(m.entries[i][j], slow, "{s} ({g},{n}) {r} / {c}");
            }
        }
    }
}
