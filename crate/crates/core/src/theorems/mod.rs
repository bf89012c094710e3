//! Exact verifiers for sumset cardinality inequalities and the witnesses
//! their proofs construct.

mod plunnecke;
mod restricted;
mod submult;
mod superadd;

pub use plunnecke::{
    construct_large_subset, find_plunnecke_subset, find_plunnecke_subset_multi, large_subset_bound, rational,
    smooth_large_subset_bound, verify_lev_monotonicity, verify_smooth_large_subset, PlunneckeWitness, SEARCH_CAP,
};
pub use restricted::{
    build_graph_counterexample, build_graph_counterexample_with, cauchy_davenport_check, check_family_set,
    greedy_family_set, half_triple_sums, is_prime, tensor_power_identity_check, tensor_power_sizes,
    verify_restricted_three_sum, GraphCounterexample,
};
pub use submult::{
    check_lex_invariants, lex_min_decomposition, projection_sizes, verify_projection_lemma, verify_submultiplicativity,
    LexDecomposition,
};
pub use superadd::{
    endpoint_sets, phi_embedding, torsion_free_reduce, verify_superadditivity, verify_superadditivity_torsion_free,
    SuperadditivityWitness, TorsionFreeReduction,
};

use crate::algebra::AmbientStructure;
use crate::instance::Instance;
use crate::set::FiniteSet;

/// Digest of the `{"structure", "sets"}` encoding of an instance.
pub fn instance_digest(structure: &AmbientStructure, sets: &[FiniteSet]) -> String {
    crate::report::digest(&Instance::new(structure.clone(), sets.to_vec()).to_json())
}
