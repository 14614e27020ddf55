//! Design matrices, per-column level permutations, and the plain-text design
//! file format.

use std::path::Path;

use crate::{Error, Result};

/// An N x n table of levels stored row-major. Rows are runs, columns are
/// factors, and every cell lies in `0..levels`.
///
/// Values are immutable after construction; all operations return new
/// matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignMatrix {
    runs: usize,
    factors: usize,
    levels: u8,
    cells: Vec<u8>,
}

impl DesignMatrix {
    /// Builds a design from row-major cells, validating shape and level range.
    pub fn new(runs: usize, factors: usize, levels: u8, cells: Vec<u8>) -> Result<Self> {
        if runs == 0 || factors == 0 {
            return Err(Error::InvalidDesign(
                "a design needs at least one run and one factor".into(),
            ));
        }
        if levels < 2 {
            return Err(Error::InvalidDesign("a design needs at least 2 levels".into()));
        }
        if cells.len() != runs * factors {
            return Err(Error::InvalidDesign(format!(
                "expected {} cells for {} runs x {} factors, got {}",
                runs * factors,
                runs,
                factors,
                cells.len()
            )));
        }
        if let Some(bad) = cells.iter().find(|&&v| v >= levels) {
            return Err(Error::InvalidDesign(format!(
                "cell value {bad} out of range for {levels} levels (levels are 0-based)"
            )));
        }
        Ok(Self { runs, factors, levels, cells })
    }

    /// Builds a design from one `Vec` per run.
    pub fn from_rows(rows: &[Vec<u8>], levels: u8) -> Result<Self> {
        let runs = rows.len();
        if runs == 0 {
            return Err(Error::InvalidDesign("no rows".into()));
        }
        let factors = rows[0].len();
        if let Some(r) = rows.iter().find(|r| r.len() != factors) {
            return Err(Error::InvalidDesign(format!(
                "ragged rows: expected {} columns, found a row with {}",
                factors,
                r.len()
            )));
        }
        let cells = rows.iter().flatten().copied().collect();
        Self::new(runs, factors, levels, cells)
    }

    pub fn runs(&self) -> usize {
        self.runs
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn levels(&self) -> u8 {
        self.levels
    }

    pub fn get(&self, run: usize, factor: usize) -> u8 {
        self.cells[run * self.factors + factor]
    }

    pub fn row(&self, run: usize) -> &[u8] {
        &self.cells[run * self.factors..(run + 1) * self.factors]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.cells.chunks_exact(self.factors)
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    /// True if some run equals the given row.
    pub fn contains_run(&self, run: &[u8]) -> bool {
        run.len() == self.factors && self.rows().any(|r| r == run)
    }

    /// Reverses the level order of every cell: x -> (levels-1) - x.
    ///
    /// Applying it twice returns the original design. For three levels this
    /// is the map x -> 2 - x, which leaves the discrepancy unchanged.
    pub fn mirror_image(&self) -> DesignMatrix {
        let top = self.levels - 1;
        DesignMatrix {
            runs: self.runs,
            factors: self.factors,
            levels: self.levels,
            cells: self.cells.iter().map(|&v| top - v).collect(),
        }
    }

    /// Keeps the selected columns, in the given order. Column indices are
    /// 1-based, matching printed design tables.
    pub fn project(&self, columns: &[usize]) -> Result<DesignMatrix> {
        if columns.is_empty() {
            return Err(Error::InvalidArgument("no columns selected".into()));
        }
        let mut seen = vec![false; self.factors];
        for &c in columns {
            if c == 0 || c > self.factors {
                return Err(Error::InvalidArgument(format!(
                    "column {c} out of range 1..={}",
                    self.factors
                )));
            }
            if seen[c - 1] {
                return Err(Error::InvalidArgument(format!("duplicate column {c}")));
            }
            seen[c - 1] = true;
        }
        let mut cells = Vec::with_capacity(self.runs * columns.len());
        for row in self.rows() {
            cells.extend(columns.iter().map(|&c| row[c - 1]));
        }
        Ok(DesignMatrix {
            runs: self.runs,
            factors: columns.len(),
            levels: self.levels,
            cells,
        })
    }

    /// Applies a per-column level permutation; shape is unchanged.
    pub fn apply_level_permutation(&self, p: &LevelPermutation) -> Result<DesignMatrix> {
        if self.levels != 3 {
            return Err(Error::InvalidPermutation(
                "level permutations are defined for 3-level designs".into(),
            ));
        }
        if p.maps.len() != self.factors {
            return Err(Error::InvalidPermutation(format!(
                "permutation has {} entries for {} columns",
                p.maps.len(),
                self.factors
            )));
        }
        let mut cells = Vec::with_capacity(self.cells.len());
        for row in self.rows() {
            for (map, &x) in p.maps.iter().zip(row) {
                cells.push(map.apply(x));
            }
        }
        Ok(DesignMatrix {
            runs: self.runs,
            factors: self.factors,
            levels: self.levels,
            cells,
        })
    }
}

/// One column's level map: either a GF(3) offset `x -> x + b`, or an
/// arbitrary bijection of {0,1,2} given by the images of (0,1,2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelMap {
    Offset(u8),
    Bijection([u8; 3]),
}

impl LevelMap {
    pub fn apply(self, x: u8) -> u8 {
        match self {
            LevelMap::Offset(b) => (x + b) % 3,
            LevelMap::Bijection(m) => m[x as usize],
        }
    }
}

/// A per-column level permutation of a 3-level design.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelPermutation {
    maps: Vec<LevelMap>,
}

impl LevelPermutation {
    /// The identity permutation on `factors` columns.
    pub fn identity(factors: usize) -> Self {
        Self { maps: vec![LevelMap::Offset(0); factors] }
    }

    /// A linear permutation: offset `offsets[k]` on column k.
    pub fn from_offsets(offsets: &[u8]) -> Result<Self> {
        if let Some(&b) = offsets.iter().find(|&&b| b > 2) {
            return Err(Error::InvalidPermutation(format!("offset {b} not in 0..=2")));
        }
        Ok(Self { maps: offsets.iter().map(|&b| LevelMap::Offset(b)).collect() })
    }

    /// A general permutation from per-column images of (0,1,2).
    pub fn from_maps(maps: Vec<[u8; 3]>) -> Result<Self> {
        for m in &maps {
            let mut seen = [false; 3];
            for &v in m {
                if v > 2 || seen[v as usize] {
                    return Err(Error::InvalidPermutation(format!(
                        "{m:?} is not a bijection of (0,1,2)"
                    )));
                }
                seen[v as usize] = true;
            }
        }
        Ok(Self { maps: maps.into_iter().map(LevelMap::Bijection).collect() })
    }

    pub fn maps(&self) -> &[LevelMap] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }
}

/// Parses the plain-text design format: whitespace-separated integer rows,
/// `#` lines ignored, levels declared via a `# levels: s` header (default 3).
pub fn parse_design(text: &str) -> Result<DesignMatrix> {
    let mut levels: u8 = 3;
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix("levels:") {
                levels = value.trim().parse().map_err(|_| {
                    Error::Parse(format!("line {}: bad levels header", lineno + 1))
                })?;
            }
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| tok.parse::<u8>())
            .collect::<std::result::Result<Vec<u8>, _>>()
            .map_err(|_| Error::Parse(format!("line {}: non-integer cell", lineno + 1)))?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("empty design file".into()));
    }
    DesignMatrix::from_rows(&rows, levels)
}

/// Renders a design in the plain-text format accepted by [`parse_design`].
pub fn design_to_string(d: &DesignMatrix) -> String {
    let mut out = format!("# levels: {}\n", d.levels());
    for row in d.rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub(crate) fn with_path(path: &Path, e: std::io::Error) -> std::io::Error {
    std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))
}

/// Reads a design file; see [`parse_design`] for the format.
pub fn read_design(path: impl AsRef<Path>) -> Result<DesignMatrix> {
    let path = path.as_ref();
    parse_design(&std::fs::read_to_string(path).map_err(|e| with_path(path, e))?)
}

/// Writes a design file; `read_design` round-trips it.
pub fn write_design(d: &DesignMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, design_to_string(d)).map_err(|e| with_path(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design_a() -> DesignMatrix {
        let rel = crate::relation::DefiningRelation::new(2, vec![vec![1, 1]], vec![0]).unwrap();
        crate::relation::generate_regular_design(&rel)
    }

    fn design_b() -> DesignMatrix {
        let rel = crate::relation::DefiningRelation::new(2, vec![vec![1, 1]], vec![2]).unwrap();
        crate::relation::generate_regular_design(&rel)
    }

    #[test]
    fn rejects_out_of_range_cells() {
        assert!(DesignMatrix::new(1, 2, 3, vec![0, 3]).is_err());
        assert!(DesignMatrix::new(2, 1, 3, vec![0, 2]).is_ok());
    }

    #[test]
    fn mirror_is_an_involution() {
        let d = design_a();
        assert_eq!(d.mirror_image().mirror_image(), d);
    }

    #[test]
    fn mirror_of_b_permutes_its_rows() {
        let b = design_b();
        let m = b.mirror_image();
        let mut rows_b: Vec<&[u8]> = b.rows().collect();
        let mut rows_m: Vec<&[u8]> = m.rows().collect();
        rows_b.sort();
        rows_m.sort();
        assert_eq!(rows_b, rows_m);
        // design A is not reversal-invariant
        let a = design_a();
        let ma = a.mirror_image();
        let mut rows_a: Vec<&[u8]> = a.rows().collect();
        let mut rows_ma: Vec<&[u8]> = ma.rows().collect();
        rows_a.sort();
        rows_ma.sort();
        assert_ne!(rows_a, rows_ma);
    }

    #[test]
    fn identity_permutation_is_identity() {
        let d = design_a();
        let p = LevelPermutation::identity(d.factors());
        assert_eq!(d.apply_level_permutation(&p).unwrap(), d);
    }

    #[test]
    fn shift_on_third_column_turns_a_into_b() {
        // the bijection (0,1,2) -> (2,0,1) is the offset x -> x + 2
        let a = design_a();
        let p = LevelPermutation::from_maps(vec![[0, 1, 2], [0, 1, 2], [2, 0, 1]]).unwrap();
        assert_eq!(a.apply_level_permutation(&p).unwrap(), design_b());
        let q = LevelPermutation::from_offsets(&[0, 0, 2]).unwrap();
        assert_eq!(a.apply_level_permutation(&q).unwrap(), design_b());
    }

    #[test]
    fn offsets_apply_per_column() {
        let a = design_a();
        let p = LevelPermutation::from_offsets(&[1, 1, 1]).unwrap();
        let shifted = a.apply_level_permutation(&p).unwrap();
        for (r, row) in a.rows().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                assert_eq!(shifted.get(r, c), (x + 1) % 3);
            }
        }
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(LevelPermutation::from_maps(vec![[0, 0, 2]]).is_err());
        assert!(LevelPermutation::from_offsets(&[3]).is_err());
    }

    #[test]
    fn projection_selects_columns_in_order() {
        let a = design_a();
        let p = a.project(&[2, 1]).unwrap();
        assert_eq!(p.factors(), 2);
        for (r, row) in a.rows().enumerate() {
            assert_eq!(p.row(r), &[row[1], row[0]]);
        }
        assert_eq!(a.project(&[1, 2, 3]).unwrap(), a);
        assert!(a.project(&[1, 1]).is_err());
        assert!(a.project(&[4]).is_err());
        assert!(a.project(&[0]).is_err());
    }

    #[test]
    fn design_file_round_trip() {
        let a = design_a();
        let text = design_to_string(&a);
        assert_eq!(parse_design(&text).unwrap(), a);
    }

    #[test]
    fn parse_rejects_bad_files() {
        assert!(matches!(parse_design(""), Err(Error::Parse(_))));
        assert!(parse_design("0 1\n0 1 2\n").is_err()); // ragged
        assert!(parse_design("0 3\n").is_err()); // out of range under levels 3
        assert!(parse_design("# levels: 4\n0 3\n").is_ok());
        assert!(parse_design("0 x\n").is_err());
    }
}
