//! Hybrid LTL model checking over binary decision diagrams.
//!
//! The crate combines an explicit automaton for the property with symbolic
//! (BDD-backed) state sets for the system under verification. Besides the
//! plain synchronized product it implements several aggregation products
//! (observation graphs, observation products, self-loop aggregation with an
//! optional terminal-state refinement, and one-step aggregation) as well as
//! two fully symbolic emptiness checks, all sharing one decision-diagram
//! engine, one LTL-to-automaton translation, and one on-the-fly emptiness
//! check over lazily expanded graphs.

pub mod bench;
pub mod cli;
pub mod error;
pub mod logic;
pub mod ltl;
pub mod model;
pub mod products;
pub mod symbolic;
pub mod tgba;

pub use error::{Deadline, Error, Result};
