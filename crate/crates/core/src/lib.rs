//! Decision procedures and model checking for the cumulative, loop-cumulative,
//! preferential, cumulative-monotonic and monotonic families of nonmonotonic
//! consequence relations over finite propositional universes.

pub mod canonical;
pub mod closure;
pub mod demo;
pub mod error;
pub mod formula;
pub mod kb;
pub mod lattice;
pub mod model;
pub mod search;
pub mod universe;

pub use closure::{
    close, entails, initial_map, material_entails, satisfies_system, ConsequenceMap, Rule, System,
    TraceEvent, Verdict,
};
pub use error::{Error, Result};
pub use formula::{parse_formula, render_formula, Formula};
pub use kb::{parse_kb, Assertion, KnowledgeBase, SemanticPair};
pub use model::{Flavor, Model};
pub use universe::{make_universe, Universe, WorldSet};
