//! Closed-form discrepancy and beta values for the two geometrically
//! distinct regular 3^(n-1) fractions, plus a verification suite that
//! cross-checks them against the computational paths. Rational arithmetic
//! keeps the (-1)^n/3^(3n) tail terms from cancelling away in doubles.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive};

use crate::metrics::{
    average_cd_from_wlp, beta_wordlength_pattern, cd_fast3, centered_l2_discrepancy,
    wordlength_pattern,
};
use crate::relation::DefiningRelation;
use crate::search::{search_regular, variant_designs};
use crate::{Error, Result};

/// The two geometric classes of regular 3^(n-1) fractions from the relation
/// x_1 + ... + x_(n-1) + y = b.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FractionVariant {
    /// Contains the all-one (center) run: b = n mod 3.
    Centered,
    /// The b = n+1 variant; b = n+2 is geometrically isomorphic to it.
    Uncentered,
}

impl FractionVariant {
    pub const ALL: [FractionVariant; 2] = [Self::Centered, Self::Uncentered];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Centered => "centered",
            Self::Uncentered => "uncentered",
        }
    }
}

impl std::fmt::Display for FractionVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

fn ratp(num: i64, den: i64, e: usize) -> BigRational {
    BigRational::new(
        Pow::pow(BigInt::from(num), e as u32),
        Pow::pow(BigInt::from(den), e as u32),
    )
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn to_f64(r: BigRational) -> Result<f64> {
    r.to_f64()
        .ok_or_else(|| Error::InvalidArgument("rational value out of f64 range".into()))
}

fn need_n2(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "closed forms need n >= 2 factors, got {n}"
        )));
    }
    Ok(())
}

/// Closed-form centered L2-discrepancy of a fraction variant:
///
///   centered:   (13/12)^n - (29/27)^n + 2 (2/27)^n + 2 (-1)^n / 3^(3n)
///   uncentered: (13/12)^n - (29/27)^n + 2 (2/27)^n + (-1)^(n+1) / 3^(3n)
pub fn fraction_cd(n: usize, v: FractionVariant) -> Result<f64> {
    need_n2(n)?;
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    let last = match v {
        FractionVariant::Centered => int(2 * sign) * ratp(1, 27, n),
        FractionVariant::Uncentered => int(-sign) * ratp(1, 27, n),
    };
    to_f64(ratp(13, 12, n) - ratp(29, 27, n) + int(2) * ratp(2, 27, n) + last)
}

/// Closed-form beta_n of a fraction variant:
///
///   odd n:  centered -> 0,        uncentered -> 3/2^n
///   even n: centered -> 1/2^(n-2), uncentered -> 1/2^n
pub fn fraction_beta(n: usize, v: FractionVariant) -> Result<f64> {
    need_n2(n)?;
    let r = match (n % 2 == 1, v) {
        (true, FractionVariant::Centered) => int(0),
        (true, FractionVariant::Uncentered) => int(3) * ratp(1, 2, n),
        (false, FractionVariant::Centered) => int(4) * ratp(1, 2, n),
        (false, FractionVariant::Uncentered) => ratp(1, 2, n),
    };
    to_f64(r)
}

/// Discrepancy of a regular 3^(n-1) minimum-aberration design from its
/// beta_n value alone:
///
///   (13/12)^n - (29/27)^n + 2 (2/27)^n - 2 (1/27)^n + (2/27)^n beta_n
pub fn cd_from_beta(n: usize, beta_n: f64) -> Result<f64> {
    need_n2(n)?;
    if !beta_n.is_finite() || beta_n < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "beta_n must be finite and nonnegative, got {beta_n}"
        )));
    }
    let beta = BigRational::from_float(beta_n)
        .ok_or_else(|| Error::InvalidArgument("beta_n is not representable".into()))?;
    let base = ratp(13, 12, n) - ratp(29, 27, n) + int(2) * ratp(2, 27, n) - int(2) * ratp(1, 27, n);
    to_f64(base + ratp(2, 27, n) * beta)
}

/// Mean discrepancy of the three offset choices of the fraction relation:
/// (13/12)^n - (29/27)^n + 2 (2/27)^n. The variants satisfy
/// phi(centered) + 2 phi(uncentered) = 3 times this value.
pub fn fraction_mean_cd(n: usize) -> Result<f64> {
    need_n2(n)?;
    to_f64(ratp(13, 12, n) - ratp(29, 27, n) + int(2) * ratp(2, 27, n))
}

/// One line of the verification report.
#[derive(Debug, Clone)]
pub struct VerifyCheck {
    pub name: String,
    pub delta: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn check(name: String, delta: f64, tolerance: f64) -> VerifyCheck {
    VerifyCheck {
        name,
        delta,
        tolerance,
        pass: delta <= tolerance,
    }
}

/// Result of [`verify_suite`].
#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<VerifyCheck>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerifyCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

const PERMS: [[u8; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Cross-checks the closed forms against the computational paths for
/// n = 2..=n_max: variant discrepancies, beta_n values, the beta-to-cd
/// identity, the proof identity phi(D0) + 2 phi(D1), and the
/// permutation-average formula. With `bruteforce`, the average is also
/// recomputed over all (3!)^n permuted designs for n <= 3.
pub fn verify_suite(n_max: usize, bruteforce: bool) -> Result<VerifyReport> {
    if n_max < 2 {
        return Err(Error::InvalidArgument(format!(
            "verification needs n_max >= 2, got {n_max}"
        )));
    }
    if n_max > 10 {
        return Err(Error::CapExceeded(format!(
            "verification caps at n_max = 10 (beta cost grows as 3^n), got {n_max}"
        )));
    }
    let mut checks = Vec::new();
    for n in 2..=n_max {
        let (d0, d1) = variant_designs(n)?;
        let phi0 = cd_fast3(&d0)?;
        let phi1 = cd_fast3(&d1)?;

        checks.push(check(
            format!("n={n} centered cd vs closed form"),
            (phi0 - fraction_cd(n, FractionVariant::Centered)?).abs(),
            1e-12,
        ));
        checks.push(check(
            format!("n={n} uncentered cd vs closed form"),
            (phi1 - fraction_cd(n, FractionVariant::Uncentered)?).abs(),
            1e-12,
        ));
        if n <= 7 {
            checks.push(check(
                format!("n={n} fast path vs product form"),
                (phi0 - centered_l2_discrepancy(&d0)).abs(),
                1e-12,
            ));
        }

        let b0 = beta_wordlength_pattern(&d0)?;
        let b1 = beta_wordlength_pattern(&d1)?;
        checks.push(check(
            format!("n={n} centered beta_n vs closed form"),
            (b0.values()[n] - fraction_beta(n, FractionVariant::Centered)?).abs(),
            1e-10,
        ));
        checks.push(check(
            format!("n={n} uncentered beta_n vs closed form"),
            (b1.values()[n] - fraction_beta(n, FractionVariant::Uncentered)?).abs(),
            1e-10,
        ));
        checks.push(check(
            format!("n={n} centered cd from beta_n"),
            (phi0 - cd_from_beta(n, b0.values()[n].max(0.0))?).abs(),
            1e-12,
        ));
        checks.push(check(
            format!("n={n} uncentered cd from beta_n"),
            (phi1 - cd_from_beta(n, b1.values()[n].max(0.0))?).abs(),
            1e-12,
        ));
        checks.push(check(
            format!("n={n} variant mean identity"),
            (phi0 + 2.0 * phi1 - 3.0 * fraction_mean_cd(n)?).abs(),
            1e-12,
        ));

        let rel = DefiningRelation::new(n - 1, vec![vec![2; n - 1]], vec![(n % 3) as u8])?;
        let sweep = search_regular(&rel)?;
        let ave = average_cd_from_wlp(&wordlength_pattern(&d0)?);
        checks.push(check(
            format!("n={n} offset-sweep average vs pattern formula"),
            (sweep.ave_phi - ave).abs(),
            1e-10,
        ));

        if bruteforce && n <= 3 {
            let total: usize = 6usize.pow(n as u32);
            let mut sum = 0.0;
            for code in 0..total {
                let mut c = code;
                let mut maps = Vec::with_capacity(n);
                for _ in 0..n {
                    maps.push(PERMS[c % 6]);
                    c /= 6;
                }
                let p = crate::design::LevelPermutation::from_maps(maps)?;
                sum += cd_fast3(&d0.apply_level_permutation(&p)?)?;
            }
            checks.push(check(
                format!("n={n} brute-force permutation average"),
                (sum / total as f64 - ave).abs(),
                1e-10,
            ));
        }
    }
    Ok(VerifyReport { checks })
}
