//! Three-level fractional factorial designs: construction from defining
//! relations, uniformity (centered L2-discrepancy) and aberration metrics,
//! and exhaustive level-permutation search with geometric symmetry
//! reductions.
//!
//! Designs are matrices over levels {0, 1, 2}, one run per row. The crate
//! covers:
//!
//! - [`DesignMatrix`] and [`DefiningRelation`] for representing designs and
//!   building regular 3^(n-m) fractions, with plain-text file formats
//!   ([`parse_design`], [`parse_relation`]).
//! - [`metrics`]: the centered L2-discrepancy in its product form
//!   ([`centered_l2_discrepancy`]) and an exact-count fast path for
//!   three-level designs ([`cd_fast3`]), distance distributions and
//!   word-length patterns linked by MacWilliams transforms, the beta
//!   word-length pattern from orthonormal polynomial contrasts, and the
//!   permutation-average formula [`average_cd_from_wlp`].
//! - [`search`]: deterministic parallel sweeps over level permutations
//!   ([`search_regular`], [`search_general`]), geometric class reduction
//!   ([`geometric_representatives`]), uniform minimum aberration selection,
//!   and projection classification for orthogonal arrays.
//! - [`closed_form`]: exact rational closed forms for the two regular
//!   3^(n-1) fraction variants and a [`verify_suite`] tying every identity
//!   back to the computational paths.
//! - [`catalog`]: bundled minimum-aberration and uniform relations for 27
//!   and 81 runs, plus the 18-run orthogonal array.
//!
//! Searches report population statistics over complete permutation orbits
//! and are bitwise reproducible for any thread count.

pub mod catalog;
pub mod closed_form;
pub mod design;
mod error;
pub mod metrics;
pub mod relation;
pub mod search;

pub use catalog::{catalog_entries, catalog_lookup, oa18, CatalogEntry, CatalogKind};
pub use closed_form::{
    cd_from_beta, fraction_beta, fraction_cd, fraction_mean_cd, verify_suite, FractionVariant,
    VerifyCheck, VerifyReport,
};
pub use design::{
    design_to_string, parse_design, read_design, write_design, DesignMatrix, LevelMap,
    LevelPermutation,
};
pub use error::{Error, Result};
pub use metrics::{
    aberration_compare, average_cd_from_wlp, beta_wordlength_pattern,
    beta_wordlength_pattern_capped, cd_fast3, centered_l2_discrepancy, delta_moment,
    distance_distribution, distance_from_wlp, krawtchouk, wlp_from_distance, wordlength_pattern,
    BetaWordLengthPattern, DistanceDistribution, WordLengthPattern, DEFAULT_BETA_CAP,
};
pub use relation::{
    generate_regular_design, parse_relation, read_relation, relation_to_string, DefiningRelation,
};
pub use search::{
    classify_projections, geometric_representatives, search_general, search_general_capped,
    search_regular, search_regular_capped, uniform_minimum_aberration, variant_designs,
    PermutationClass, ProjectionClass, SearchResult, DEFAULT_GENERAL_CAP, DEFAULT_REGULAR_CAP,
    REPRESENTATIVES_CAP,
};
