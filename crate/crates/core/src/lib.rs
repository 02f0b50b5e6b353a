//! Coset meet groupoids of finite permutation groups and the groups they
//! reconstruct.

pub mod aut_topology;
pub mod axioms;
pub mod caps;
pub mod catalog;
pub mod equivalence;
pub mod error;
pub mod functor_g;
pub mod functor_w;
pub mod group;
pub mod groupoid;
pub mod oracle;
pub mod perm;
pub mod profinite;
pub mod subgroup;

pub use aut_topology::{
    basis_subgroup, delta, gamma, inn_out, theta, AutContext, AutPresentation, Cardinalities,
    CheckReport, OmegaLabeling, ThetaEmbedding,
};
pub use axioms::{check_axioms, first_violation, Axiom, ValidationReport, Violation};
pub use caps::Caps;
pub use catalog::{
    available, basis_for, basis_from_raw, catalog, lookup, BasisPolicy, CatalogEntry,
};
pub use equivalence::{
    check_naturality_g, check_naturality_m, eta_g, eta_m, hat_family, hat_lemma_violation,
    is_object_of_mm, object_condition, round_trip, sample_isomorphisms, GroupDuality,
    NaturalitySquare, RoundTripReport,
};
pub use error::{Error, Result};
pub use functor_g::{
    aut_to_filter, enumerate_full_filters, filter_to_aut, g_of_m, g_on_morphism,
    groupoid_aut_violation, hat, is_groupoid_aut, AutViolation, FullFilter,
};
pub use functor_w::{build_w, close_basis, w_on_morphism, CosetGroupoid, CosetKey};
pub use group::{close_generators, GroupHom, GroupSpec, PermGroup};
pub use groupoid::{
    check_isomorphism, find_isomorphism, GroupoidJson, MeetGroupoid, Mutation, Product, EMPTY,
};
pub use perm::{compose, Perm};
pub use profinite::{InverseSystem, InverseSystemJson, LazyTruncation, LevelCoset, LevelFilter};
pub use subgroup::{
    conjugate_subgroup, enumerate_subgroups, left_cosets, Subgroup, SubgroupFamily,
};
