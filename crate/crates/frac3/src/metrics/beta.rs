//! The beta word-length pattern: squared column means of the full orthonormal
//! polynomial model matrix, binned by total polynomial degree.

use crate::design::DesignMatrix;
use crate::{Error, Result};

/// Default factor cap for [`beta_wordlength_pattern`]; the cost is
/// Theta(3^n * N) in time and 3^n in memory.
pub const DEFAULT_BETA_CAP: usize = 13;

/// (beta_0, ..., beta_K) with K = 2n for a 3-level design in n factors.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaWordLengthPattern {
    values: Vec<f64>,
}

impl BetaWordLengthPattern {
    /// (beta_0, ..., beta_2n) with beta_0 = 1.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn factors(&self) -> usize {
        (self.values.len() - 1) / 2
    }

    /// Entries beta_1..beta_2n.
    pub fn tail(&self) -> &[f64] {
        &self.values[1..]
    }
}

// Orthonormal contrasts on {0, 1, 2} under uniform weight:
//   p_0(x) = 1
//   p_1(x) = sqrt(3/2) (x - 1)
//   p_2(x) = sqrt(1/2) (3 (x - 1)^2 - 2)
fn contrast(degree: usize, x: u8) -> f64 {
    let t = x as f64 - 1.0;
    match degree {
        0 => 1.0,
        1 => (1.5f64).sqrt() * t,
        _ => (0.5f64).sqrt() * (3.0 * t * t - 2.0),
    }
}

/// Beta word-length pattern with the default factor cap.
pub fn beta_wordlength_pattern(d: &DesignMatrix) -> Result<BetaWordLengthPattern> {
    beta_wordlength_pattern_capped(d, DEFAULT_BETA_CAP)
}

/// Beta word-length pattern of a 3-level design:
///
///   beta_j = N^-2 sum over degree tuples (d_1,...,d_n) with sum d_m = j
///            of | sum_i prod_m p_{d_m}(x_im) |^2
///
/// All 3^n tuple sums are accumulated in one pass over the rows (sequential,
/// ascending index order), then squared and binned by digit sum.
pub fn beta_wordlength_pattern_capped(
    d: &DesignMatrix,
    cap: usize,
) -> Result<BetaWordLengthPattern> {
    if d.levels() != 3 {
        return Err(Error::InvalidArgument(format!(
            "beta pattern needs 3 levels, design has {}",
            d.levels()
        )));
    }
    let n = d.factors();
    if n > cap {
        return Err(Error::CapExceeded(format!(
            "beta pattern over {n} factors exceeds the cap of {cap} (cost grows as 3^n)"
        )));
    }
    let size = 3usize
        .checked_pow(n as u32)
        .ok_or_else(|| Error::CapExceeded(format!("3^{n} tuple table does not fit in memory")))?;

    let mut totals = vec![0.0f64; size];
    let mut cur = Vec::with_capacity(size);
    let mut next = Vec::with_capacity(size);
    for row in d.rows() {
        // tensor build-up: after column c, cur[idx] holds the product over
        // the first c+1 columns for the degree tuple encoded base-3 in idx
        // (column c's degree at place 3^c)
        cur.clear();
        cur.push(1.0);
        for &x in row {
            let p = [contrast(0, x), contrast(1, x), contrast(2, x)];
            next.clear();
            for &pd in &p {
                for &v in cur.iter() {
                    next.push(v * pd);
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        for (t, v) in totals.iter_mut().zip(cur.iter()) {
            *t += v;
        }
    }

    let runs = d.runs() as f64;
    let mut values = vec![0.0f64; 2 * n + 1];
    let mut dsum = vec![0u8; size];
    for idx in 1..size {
        dsum[idx] = dsum[idx / 3] + (idx % 3) as u8;
    }
    for (idx, &t) in totals.iter().enumerate() {
        let m = t / runs;
        values[dsum[idx] as usize] += m * m;
    }
    Ok(BetaWordLengthPattern { values })
}
