//! Regular three-level designs specified by GF(3) defining relations.

use std::path::Path;

use crate::design::DesignMatrix;
use crate::{Error, Result};

/// Memory guard: 3^m runs must stay allocatable.
const MAX_INDEPENDENTS: usize = 13;

/// A regular 3^(m+k-k) design specification: m independent columns that
/// enumerate GF(3)^m, plus k dependent columns, where dependent column j is
/// `sum_i coeffs[j][i] * x_i + offsets[j] (mod 3)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefiningRelation {
    independents: usize,
    coeffs: Vec<Vec<u8>>,
    offsets: Vec<u8>,
}

impl DefiningRelation {
    pub fn new(independents: usize, coeffs: Vec<Vec<u8>>, offsets: Vec<u8>) -> Result<Self> {
        if independents == 0 {
            return Err(Error::InvalidRelation("need at least one independent column".into()));
        }
        if independents > MAX_INDEPENDENTS {
            return Err(Error::InvalidRelation(format!(
                "{independents} independent columns would generate 3^{independents} runs"
            )));
        }
        if coeffs.len() != offsets.len() {
            return Err(Error::InvalidRelation(format!(
                "{} coefficient rows but {} offsets",
                coeffs.len(),
                offsets.len()
            )));
        }
        for (j, row) in coeffs.iter().enumerate() {
            if row.len() != independents {
                return Err(Error::InvalidRelation(format!(
                    "coefficient row {} has {} entries, expected {}",
                    j + 1,
                    row.len(),
                    independents
                )));
            }
            if row.iter().any(|&c| c > 2) {
                return Err(Error::InvalidRelation(format!(
                    "coefficient row {} has an entry outside 0..=2",
                    j + 1
                )));
            }
            if row.iter().all(|&c| c == 0) {
                return Err(Error::InvalidRelation(format!(
                    "coefficient row {} is all-zero; a dependent column must involve at least one independent column",
                    j + 1
                )));
            }
        }
        if offsets.iter().any(|&b| b > 2) {
            return Err(Error::InvalidRelation("offset outside 0..=2".into()));
        }
        Ok(Self { independents, coeffs, offsets })
    }

    pub fn independents(&self) -> usize {
        self.independents
    }

    /// Number of dependent columns k.
    pub fn dependents(&self) -> usize {
        self.coeffs.len()
    }

    /// Total column count n = m + k.
    pub fn factors(&self) -> usize {
        self.independents + self.coeffs.len()
    }

    /// Run count N = 3^m.
    pub fn runs(&self) -> usize {
        3usize.pow(self.independents as u32)
    }

    pub fn coeffs(&self) -> &[Vec<u8>] {
        &self.coeffs
    }

    pub fn offsets(&self) -> &[u8] {
        &self.offsets
    }

    /// The same column structure with different dependent-column offsets.
    pub fn with_offsets(&self, offsets: Vec<u8>) -> Result<Self> {
        Self::new(self.independents, self.coeffs.clone(), offsets)
    }

    /// Offsets b' generating the mirror image's design class:
    /// b'_j = 2 - 2*sum_i(coeffs[j][i]) - b_j (mod 3).
    ///
    /// The map is an involution, and the design generated with b' has the
    /// same discrepancy as the one generated with b.
    pub fn mirror_partner_offsets(&self) -> Vec<u8> {
        self.coeffs
            .iter()
            .zip(&self.offsets)
            .map(|(row, &b)| {
                let s: i32 = row.iter().map(|&c| c as i32).sum();
                (2 - 2 * s - b as i32).rem_euclid(3) as u8
            })
            .collect()
    }
}

/// Generates the 3^m x (m+k) matrix of a defining relation. The independent
/// columns enumerate GF(3)^m in lexicographic row order with column 1
/// slowest-varying; dependent columns follow the relation.
pub fn generate_regular_design(rel: &DefiningRelation) -> DesignMatrix {
    let m = rel.independents;
    let n = rel.factors();
    let runs = rel.runs();
    let mut cells = Vec::with_capacity(runs * n);
    let mut x = vec![0u8; m];
    for r in 0..runs {
        let mut rest = r;
        for i in (0..m).rev() {
            x[i] = (rest % 3) as u8;
            rest /= 3;
        }
        cells.extend_from_slice(&x);
        for (row, &b) in rel.coeffs.iter().zip(&rel.offsets) {
            let s: u32 = row.iter().zip(&x).map(|(&c, &xi)| c as u32 * xi as u32).sum();
            cells.push(((s + b as u32) % 3) as u8);
        }
    }
    DesignMatrix::new(runs, n, 3, cells).expect("relation invariants guarantee a valid design")
}

/// Parses the relation file format: a header line `independents m`, then one
/// line `c_1 .. c_m b` per dependent column. `#` lines and blank lines are
/// ignored.
pub fn parse_relation(text: &str) -> Result<DefiningRelation> {
    let mut independents: Option<usize> = None;
    let mut coeffs: Vec<Vec<u8>> = Vec::new();
    let mut offsets: Vec<u8> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match independents {
            None => {
                let rest = line.strip_prefix("independents").ok_or_else(|| {
                    Error::Parse(format!(
                        "line {}: expected header `independents m`",
                        lineno + 1
                    ))
                })?;
                let m = rest.trim().parse::<usize>().map_err(|_| {
                    Error::Parse(format!("line {}: bad independent count", lineno + 1))
                })?;
                independents = Some(m);
            }
            Some(m) => {
                let vals = line
                    .split_whitespace()
                    .map(|tok| tok.parse::<u8>())
                    .collect::<std::result::Result<Vec<u8>, _>>()
                    .map_err(|_| Error::Parse(format!("line {}: non-integer entry", lineno + 1)))?;
                if vals.len() != m + 1 {
                    return Err(Error::Parse(format!(
                        "line {}: expected {} coefficients plus an offset",
                        lineno + 1,
                        m
                    )));
                }
                offsets.push(vals[m]);
                coeffs.push(vals[..m].to_vec());
            }
        }
    }
    match independents {
        None => Err(Error::Parse("empty relation file".into())),
        Some(m) => DefiningRelation::new(m, coeffs, offsets),
    }
}

/// Renders a relation in the format accepted by [`parse_relation`].
pub fn relation_to_string(rel: &DefiningRelation) -> String {
    let mut out = format!("independents {}\n", rel.independents);
    for (row, &b) in rel.coeffs.iter().zip(&rel.offsets) {
        for c in row {
            out.push_str(&c.to_string());
            out.push(' ');
        }
        out.push_str(&b.to_string());
        out.push('\n');
    }
    out
}

/// Reads a relation file; see [`parse_relation`] for the format.
pub fn read_relation(path: impl AsRef<Path>) -> Result<DefiningRelation> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| crate::design::with_path(path, e))?;
    parse_relation(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generates_design_a_and_b() {
        let a = generate_regular_design(
            &DefiningRelation::new(2, vec![vec![1, 1]], vec![0]).unwrap(),
        );
        assert_eq!(a.runs(), 9);
        assert_eq!(a.factors(), 3);
        // rows in lexicographic order over the first two columns
        assert_eq!(a.row(0), &[0, 0, 0]);
        assert_eq!(a.row(1), &[0, 1, 1]);
        assert_eq!(a.row(3), &[1, 0, 1]);
        assert_eq!(a.row(8), &[2, 2, 1]);
        let b = generate_regular_design(
            &DefiningRelation::new(2, vec![vec![1, 1]], vec![2]).unwrap(),
        );
        assert_eq!(b.row(0), &[0, 0, 2]);
        assert!(b.contains_run(&[1, 1, 1]));
        assert!(!a.contains_run(&[1, 1, 1]));
    }

    #[test]
    fn full_factorial_has_no_dependent_columns() {
        let rel = DefiningRelation::new(2, vec![], vec![]).unwrap();
        let d = generate_regular_design(&rel);
        assert_eq!((d.runs(), d.factors()), (9, 2));
        let rows: Vec<&[u8]> = d.rows().collect();
        assert_eq!(rows[0], &[0, 0]);
        assert_eq!(rows[8], &[2, 2]);
    }

    #[test]
    fn every_column_is_balanced() {
        let rel = DefiningRelation::new(
            3,
            vec![vec![1, 1, 1], vec![1, 2, 0], vec![1, 1, 2]],
            vec![0, 1, 2],
        )
        .unwrap();
        let d = generate_regular_design(&rel);
        for c in 0..d.factors() {
            let mut counts = [0usize; 3];
            for r in 0..d.runs() {
                counts[d.get(r, c) as usize] += 1;
            }
            assert_eq!(counts, [9, 9, 9]);
        }
    }

    #[test]
    fn mirror_partner_matches_formula_and_is_involutive() {
        let rel = DefiningRelation::new(2, vec![vec![1, 1]], vec![0]).unwrap();
        assert_eq!(rel.mirror_partner_offsets(), vec![1]);
        for b in 0..3u8 {
            let r = rel.with_offsets(vec![b]).unwrap();
            let partner = r.mirror_partner_offsets();
            let twice = r.with_offsets(partner).unwrap().mirror_partner_offsets();
            assert_eq!(twice, vec![b]);
        }
    }

    #[test]
    fn mirror_partner_generates_the_mirror_class() {
        // the partner design must be a row permutation of the mirror image
        let rel = DefiningRelation::new(
            3,
            vec![vec![1, 1, 1], vec![1, 2, 0]],
            vec![1, 2],
        )
        .unwrap();
        let mirrored = generate_regular_design(&rel).mirror_image();
        let partner = generate_regular_design(&rel.with_offsets(rel.mirror_partner_offsets()).unwrap());
        let mut a: Vec<&[u8]> = mirrored.rows().collect();
        let mut b: Vec<&[u8]> = partner.rows().collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_invalid_relations() {
        assert!(DefiningRelation::new(0, vec![], vec![]).is_err());
        assert!(DefiningRelation::new(2, vec![vec![0, 0]], vec![0]).is_err());
        assert!(DefiningRelation::new(2, vec![vec![1, 3]], vec![0]).is_err());
        assert!(DefiningRelation::new(2, vec![vec![1, 1]], vec![3]).is_err());
        assert!(DefiningRelation::new(2, vec![vec![1]], vec![0]).is_err());
        assert!(DefiningRelation::new(2, vec![vec![1, 1]], vec![]).is_err());
    }

    #[test]
    fn relation_file_round_trip() {
        let rel = DefiningRelation::new(
            3,
            vec![vec![1, 1, 1], vec![1, 2, 0]],
            vec![2, 1],
        )
        .unwrap();
        let text = relation_to_string(&rel);
        assert_eq!(parse_relation(&text).unwrap(), rel);
        assert!(parse_relation("").is_err());
        assert!(parse_relation("independents 2\n1 1\n").is_err()); // missing offset
        assert!(parse_relation("1 1 0\n").is_err()); // missing header
    }
}
