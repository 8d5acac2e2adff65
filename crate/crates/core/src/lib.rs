//! Plumbing graphs of 3-manifolds.
//!
//! The crate models weighted plumbing trees, computes the exact invariants
//! of their intersection forms, applies the boundary-preserving blow-up,
//! blow-down and 0-chain moves, builds Seifert and Brieskorn plumbings, and
//! generates the parameterized graph families shipped as fixture templates.
//!
//! ```
//! use plumbing_core::{seifert, form};
//!
//! let g = seifert::brieskorn_plumbing(2, 3, 5).unwrap();
//! let summary = form::FormSummary::of(&g);
//! assert!(summary.homology_sphere && summary.negative_definite);
//! ```

pub mod calculus;
pub mod canonical;
pub mod families;
pub mod form;
pub mod format;
pub mod graph;
pub mod par;
pub mod seifert;

pub use calculus::{
    blow_down, blow_up, reduce_to_normal_form, same_boundary, zero_chain_absorb, BlowUpSite,
    MoveError, MoveKind, MoveRecord, ReductionReport, Verdict,
};
pub use canonical::{canonical_code, CanonicalCode};
pub use families::{Family, FamilySpec, FixtureSet};
pub use form::{FormSummary, IntegerSymmetricMatrix, SignatureTriple};
pub use graph::{Classification, GraphError, PlumbingGraph, VertexId};
pub use seifert::{NcfExpansion, Obstruction, SeifertData, SeifertError};
