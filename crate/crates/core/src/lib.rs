//! Exact computations in the strata algebra of moduli spaces of stable curves:
//! stable graphs, decorated strata, their products, top intersection numbers
//! and intersection pairings.
#![allow(clippy::type_complexity, clippy::needless_range_loop)]

pub mod canon;
pub mod decorated;
pub mod enumeration;
pub mod error;
pub mod graph;
pub mod integrals;
pub mod linalg;
pub mod pairing;
pub mod parse;
pub mod product;
pub mod structure;

pub use canon::{CanonicalKey, IsoTarget, Isomorphism};
pub use decorated::{graft, DecoratedGraph, FormalSum, Graft, LegSource, Q};
pub use error::{Result, StrataError};
pub use graph::{Contraction, GraphBuilder, StableGraph};
pub use parse::parse_sum;
pub use enumeration::{decorated_basis, stable_graphs, SpaceKind};
pub use integrals::{integrate_graph, integrate_sum, EvaluationKind, IntersectionCache};
pub use pairing::{gram, rank_table, verify_relation, GramMatrix, RelationReport};
pub use product::{intersection_number, multiply};
pub use structure::{GStructure, PairStructure};
