//! Column profiles, partition classes and the monomials of `det D` for a
//! window of indeterminates `z_0, ..., z_{N-1}`.

mod expansion;
mod profile;
mod q_poly;

pub use expansion::{
    ci_coefficient, expand_determinant, lowest_index_monomial, lowest_index_monomials_all_choices, sorting_sign,
    vandermonde, CiCoefficient, MAX_EXPANSION_DIM, MAX_TIE_BREAK_DIM,
};
pub use profile::{
    all_profiles, canonical_partition, ci_monomial, enumerate_classes, interval_of_profile, moments,
    moments_of_monomial, monomial_of_class, next_permutation, normalize_profile, profile_of_support,
    rearrangement_check, shift_support, verify_ci_uniqueness, CanonicalPartition, ClassMoments, ColumnProfile,
    MomentPair, Monomial, PartitionClass, UniquenessReport, DEFAULT_CLASS_BUDGET,
};
pub use q_poly::{interpolate, q_from_expansion, q_polynomial, q_polynomial_in, QPolynomial};
