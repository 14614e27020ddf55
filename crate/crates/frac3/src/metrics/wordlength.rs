//! Distance distributions, Krawtchouk polynomials, and the (generalized)
//! word-length pattern connected by the MacWilliams transform.

use crate::design::DesignMatrix;
use crate::metrics::discrepancy::ratio_pow;
use crate::{Error, Result};

/// Hamming-distance distribution of a design: `counts[g]` is the number of
/// ordered row pairs (including each row with itself) at distance g.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceDistribution {
    counts: Vec<u64>,
    runs: usize,
}

impl DistanceDistribution {
    pub fn new(counts: Vec<u64>, runs: usize) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        let want = (runs as u64) * (runs as u64);
        if total != want {
            return Err(Error::InvalidArgument(format!(
                "distance counts sum to {total}, expected {want} ordered pairs"
            )));
        }
        if counts.is_empty() {
            return Err(Error::InvalidArgument(
                "distance distribution needs at least the distance-0 slot".into(),
            ));
        }
        Ok(Self { counts, runs })
    }

    /// Raw ordered-pair counts, indexed by distance 0..=n.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn runs(&self) -> usize {
        self.runs
    }

    pub fn factors(&self) -> usize {
        self.counts.len() - 1
    }

    /// Counts divided by the run count, the usual normalization B_g.
    pub fn normalized(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.runs as f64)
            .collect()
    }
}

/// Generalized word-length pattern (A_0, A_1, ..., A_n). Entries need not be
/// integers for non-regular designs.
#[derive(Debug, Clone, PartialEq)]
pub struct WordLengthPattern {
    values: Vec<f64>,
}

impl WordLengthPattern {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty word-length pattern".into()));
        }
        if (values[0] - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "word-length pattern must start with A_0 = 1, got {}",
                values[0]
            )));
        }
        if let Some(v) = values.iter().find(|v| **v < -1e-9 || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "word-length pattern entry {v} out of range"
            )));
        }
        Ok(Self { values })
    }

    /// (A_0, ..., A_n) with A_0 = 1.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn factors(&self) -> usize {
        self.values.len() - 1
    }

    /// Entries A_1..A_n, the part aberration comparisons look at.
    pub fn tail(&self) -> &[f64] {
        &self.values[1..]
    }
}

/// Distance distribution of a design, counting ordered row pairs.
pub fn distance_distribution(d: &DesignMatrix) -> DistanceDistribution {
    let n = d.factors();
    let runs = d.runs();
    let mut counts = vec![0u64; n + 1];
    counts[0] += runs as u64;
    if d.levels() == 3 && n <= 64 {
        let masks: Vec<[u64; 3]> = d
            .rows()
            .map(|row| {
                let mut m = [0u64; 3];
                for (k, &x) in row.iter().enumerate() {
                    m[x as usize] |= 1 << k;
                }
                m
            })
            .collect();
        for i in 0..runs {
            let a = masks[i];
            for b in &masks[i + 1..] {
                let agree =
                    ((a[0] & b[0]) | (a[1] & b[1]) | (a[2] & b[2])).count_ones() as usize;
                counts[n - agree] += 2;
            }
        }
    } else {
        for i in 0..runs {
            let ri = d.row(i);
            for j in i + 1..runs {
                let dist = ri
                    .iter()
                    .zip(d.row(j))
                    .filter(|&(&x, &y)| x != y)
                    .count();
                counts[dist] += 2;
            }
        }
    }
    DistanceDistribution { counts, runs }
}

fn binomial_exact(n: i64, k: i64) -> Option<i128> {
    if k < 0 || k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as i128)?;
        acc /= (i + 1) as i128;
    }
    Some(acc)
}

/// Krawtchouk polynomial P_j(x; n, s) evaluated exactly:
///
///   P_j(x) = sum_i (-1)^i (s-1)^(j-i) C(x, i) C(n-x, j-i)
///
/// Returns None when an intermediate product overflows i128.
pub(crate) fn krawtchouk_exact(j: usize, x: usize, n: usize, s: usize) -> Option<i128> {
    let mut acc: i128 = 0;
    for i in 0..=j {
        let pow = (s as i128 - 1).checked_pow((j - i) as u32)?;
        let c1 = binomial_exact(x as i64, i as i64)?;
        let c2 = binomial_exact(n as i64 - x as i64, (j - i) as i64)?;
        let sign = if i % 2 == 0 { 1 } else { -1 };
        acc = acc.checked_add(sign * pow.checked_mul(c1)?.checked_mul(c2)?)?;
    }
    Some(acc)
}

/// Krawtchouk polynomial P_j(x; n, s) as a float.
pub fn krawtchouk(j: usize, x: usize, n: usize, s: usize) -> Result<f64> {
    if s < 2 {
        return Err(Error::InvalidArgument(format!(
            "Krawtchouk polynomials need s >= 2 levels, got {s}"
        )));
    }
    if j > n || x > n {
        return Err(Error::InvalidArgument(format!(
            "Krawtchouk arguments j={j}, x={x} exceed n={n}"
        )));
    }
    if let Some(v) = krawtchouk_exact(j, x, n, s) {
        return Ok(v as f64);
    }
    let sf = s as f64 - 1.0;
    let mut acc = 0.0;
    for i in 0..=j {
        let c1 = binomial_f64(x as f64, i);
        let c2 = binomial_f64(n as f64 - x as f64, j - i);
        let term = sf.powi((j - i) as i32) * c1 * c2;
        acc += if i % 2 == 0 { term } else { -term };
    }
    Ok(acc)
}

fn binomial_f64(n: f64, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (n - i as f64) / (i as f64 + 1.0);
    }
    acc
}

/// Word-length pattern from a distance distribution via MacWilliams:
///
///   A_j = N^-2 sum_g counts_g P_j(g; n, s)
///
/// The numerator is accumulated in exact integers whenever it fits, so
/// integer and half-integer A_j come out exactly representable.
pub fn wlp_from_distance(
    b: &DistanceDistribution,
    factors: usize,
    levels: usize,
) -> Result<WordLengthPattern> {
    if factors + 1 != b.counts.len() {
        return Err(Error::InvalidArgument(format!(
            "distance distribution has {} slots, expected factors+1 = {}",
            b.counts.len(),
            factors + 1
        )));
    }
    let n2 = (b.runs as f64) * (b.runs as f64);
    let mut values = Vec::with_capacity(factors + 1);
    for j in 0..=factors {
        let mut exact: Option<i128> = Some(0);
        for (g, &c) in b.counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            exact = exact.and_then(|acc| {
                let p = krawtchouk_exact(j, g, factors, levels)?;
                acc.checked_add(p.checked_mul(c as i128)?)
            });
        }
        let a = match exact {
            Some(num) => num as f64 / n2,
            None => {
                let mut acc = 0.0;
                for (g, &c) in b.counts.iter().enumerate() {
                    if c != 0 {
                        acc += c as f64 * krawtchouk(j, g, factors, levels)?;
                    }
                }
                acc / n2
            }
        };
        values.push(if a.abs() < 1e-9 { 0.0 } else { a });
    }
    WordLengthPattern::from_values(values)
}

/// Inverse MacWilliams transform: the normalized distance distribution
///
///   B_g = N s^-n sum_j A_j P_g(j; n, s)
///
/// reconstructed from a word-length pattern. Returned as floats because the
/// pattern itself may be fractional.
pub fn distance_from_wlp(a: &WordLengthPattern, runs: usize, levels: usize) -> Result<Vec<f64>> {
    let n = a.factors();
    let scale = runs as f64 / (levels as f64).powi(n as i32);
    let mut out = Vec::with_capacity(n + 1);
    for g in 0..=n {
        let mut acc = 0.0;
        for (j, &aj) in a.values().iter().enumerate() {
            if aj != 0.0 {
                acc += aj * krawtchouk(g, j, n, levels)?;
            }
        }
        out.push(scale * acc);
    }
    Ok(out)
}

/// Word-length pattern of a design.
pub fn wordlength_pattern(d: &DesignMatrix) -> Result<WordLengthPattern> {
    wlp_from_distance(&distance_distribution(d), d.factors(), d.levels() as usize)
}

/// Average centered L2-discrepancy over all 6^n level permutations of a
/// 3-level design, straight from its word-length pattern:
///
///   ave = (13/12)^n - (29/27)^n + (29/27)^n sum_{i>=1} (2/29)^i A_i
pub fn average_cd_from_wlp(a: &WordLengthPattern) -> f64 {
    let n = a.factors();
    let mut sum = 0.0;
    for (i, &ai) in a.values().iter().enumerate().skip(1) {
        if ai != 0.0 {
            sum += ratio_pow(2, 29, i) * ai;
        }
    }
    let p2927 = ratio_pow(29, 27, n);
    ratio_pow(13, 12, n) - p2927 + p2927 * sum
}

/// Power moment of coincidence counts: sum over ordered row pairs of
/// z^(delta_ij), where delta_ij counts the columns where the two rows agree.
/// Requires z > 1.
pub fn delta_moment(d: &DesignMatrix, z: f64) -> Result<f64> {
    if z.is_nan() || z <= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "power moment needs z > 1, got {z}"
        )));
    }
    let n = d.factors();
    let dist = distance_distribution(d);
    let mut acc = 0.0;
    for (g, &c) in dist.counts.iter().enumerate() {
        if c != 0 {
            acc += c as f64 * z.powi((n - g) as i32);
        }
    }
    Ok(acc)
}

/// Lexicographic aberration order on word-length patterns of equal length,
/// comparing A_1, A_2, ... in turn with a 1e-9 tie tolerance. `Less` means
/// the first pattern has less aberration.
pub fn aberration_compare(
    a: &WordLengthPattern,
    b: &WordLengthPattern,
) -> Result<std::cmp::Ordering> {
    if a.factors() != b.factors() {
        return Err(Error::InvalidArgument(format!(
            "cannot compare word-length patterns of {} and {} factors",
            a.factors(),
            b.factors()
        )));
    }
    for (x, y) in a.tail().iter().zip(b.tail()) {
        let diff = x - y;
        if diff.abs() > 1e-9 {
            return Ok(if diff < 0.0 {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            });
        }
    }
    Ok(std::cmp::Ordering::Equal)
}
