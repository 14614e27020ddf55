//! Design quality metrics: centered L2-discrepancy, distance distributions,
//! word-length patterns, and the beta refinement.

mod beta;
mod discrepancy;
mod wordlength;

pub use beta::{
    beta_wordlength_pattern, beta_wordlength_pattern_capped, BetaWordLengthPattern,
    DEFAULT_BETA_CAP,
};
pub use discrepancy::{cd_fast3, centered_l2_discrepancy};
pub use wordlength::{
    aberration_compare, average_cd_from_wlp, delta_moment, distance_distribution,
    distance_from_wlp, krawtchouk, wlp_from_distance, wordlength_pattern, DistanceDistribution,
    WordLengthPattern,
};

pub(crate) use discrepancy::{Cd3Kernel, Neumaier, RowMask};
