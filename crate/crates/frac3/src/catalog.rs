//! Bundled catalog of 27- and 81-run minimum-aberration relations, each in a
//! plain variant and a variant whose dependent-column offsets minimize the
//! centered L2-discrepancy, plus an 18-run orthogonal array.

use std::fmt;
use std::sync::LazyLock;

use crate::design::{parse_design, DesignMatrix};
use crate::relation::DefiningRelation;
use crate::{Error, Result};

const CATALOG_TEXT: &str = include_str!("../data/catalog.txt");
const OA18_TEXT: &str = include_str!("../data/oa18.txt");

/// Which variant of a catalog relation to fetch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CatalogKind {
    /// Minimum-aberration columns with all offsets zero.
    MinimumAberration,
    /// The same columns with the discrepancy-minimizing offsets.
    UniformMinimumAberration,
}

impl CatalogKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ma" | "minimum_aberration" => Ok(Self::MinimumAberration),
            "uniform" | "uniform_minimum_aberration" => Ok(Self::UniformMinimumAberration),
            other => Err(Error::InvalidArgument(format!(
                "unknown catalog kind {other:?}; expected \"ma\" or \"uniform\""
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::MinimumAberration => "ma",
            Self::UniformMinimumAberration => "uniform",
        }
    }
}

impl fmt::Display for CatalogKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One catalog row: a defining relation keyed by run count, factor count,
/// and kind, with the citation for where the relation comes from.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    runs: usize,
    factors: usize,
    kind: CatalogKind,
    relation: DefiningRelation,
    source: String,
}

impl CatalogEntry {
    pub fn runs(&self) -> usize {
        self.runs
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn kind(&self) -> CatalogKind {
        self.kind
    }

    pub fn relation(&self) -> &DefiningRelation {
        &self.relation
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>> {
    let mut entries = Vec::new();
    let mut lines = text.lines().enumerate().peekable();
    let bad = |lineno: usize, msg: String| Error::Parse(format!("catalog line {lineno}: {msg}"));

    while let Some((i, line)) = lines.next() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let rest = line
            .strip_prefix("entry ")
            .ok_or_else(|| bad(i + 1, format!("expected an entry header, got {line:?}")))?;
        let mut parts = rest.split_whitespace();
        let runs: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad(i + 1, "entry header needs a run count".into()))?;
        let factors: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad(i + 1, "entry header needs a factor count".into()))?;
        let kind = CatalogKind::parse(
            parts
                .next()
                .ok_or_else(|| bad(i + 1, "entry header needs a kind".into()))?,
        )?;
        if parts.next().is_some() {
            return Err(bad(i + 1, "trailing tokens after entry header".into()));
        }

        let (j, src_line) = lines
            .next()
            .ok_or_else(|| bad(i + 1, "entry is missing its source line".into()))?;
        let source = src_line
            .trim()
            .strip_prefix("source ")
            .ok_or_else(|| bad(j + 1, "expected a source line".into()))?
            .to_string();

        let (j, ind_line) = lines
            .next()
            .ok_or_else(|| bad(j + 1, "entry is missing its independents line".into()))?;
        let m: usize = ind_line
            .trim()
            .strip_prefix("independents ")
            .and_then(|t| t.trim().parse().ok())
            .ok_or_else(|| bad(j + 1, "expected \"independents <m>\"".into()))?;
        if factors < m {
            return Err(bad(j + 1, format!("{factors} factors but {m} independents")));
        }

        let mut coeffs = Vec::new();
        let mut offsets = Vec::new();
        for _ in 0..factors - m {
            let (j, row) = lines
                .next()
                .ok_or_else(|| bad(j + 1, "entry is missing dependent-column lines".into()))?;
            let nums: Vec<u8> = row
                .split_whitespace()
                .map(|t| t.parse::<u8>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| bad(j + 1, format!("bad coefficient: {e}")))?;
            if nums.len() != m + 1 {
                return Err(bad(
                    j + 1,
                    format!("expected {} numbers, got {}", m + 1, nums.len()),
                ));
            }
            coeffs.push(nums[..m].to_vec());
            offsets.push(nums[m]);
        }
        let relation = DefiningRelation::new(m, coeffs, offsets)?;
        if relation.runs() != runs {
            return Err(bad(
                i + 1,
                format!("relation yields {} runs, header says {runs}", relation.runs()),
            ));
        }
        entries.push(CatalogEntry {
            runs,
            factors,
            kind,
            relation,
            source,
        });
    }
    Ok(entries)
}

static CATALOG: LazyLock<Vec<CatalogEntry>> =
    LazyLock::new(|| parse_catalog(CATALOG_TEXT).expect("bundled catalog parses"));

static OA18: LazyLock<DesignMatrix> =
    LazyLock::new(|| parse_design(OA18_TEXT).expect("bundled OA(18, 3^7) parses"));

/// All bundled entries: 27-run n = 4..13 and 81-run n = 5..20, each in both
/// kinds, ordered as in the data file.
pub fn catalog_entries() -> &'static [CatalogEntry] {
    &CATALOG
}

/// Fetch one catalog relation by key.
pub fn catalog_lookup(runs: usize, factors: usize, kind: CatalogKind) -> Result<CatalogEntry> {
    CATALOG
        .iter()
        .find(|e| e.runs == runs && e.factors == factors && e.kind == kind)
        .cloned()
        .ok_or_else(|| Error::UnknownCatalogEntry {
            runs,
            factors,
            kind: kind.as_str().to_string(),
        })
}

/// The bundled OA(18, 3^7): an 18-run strength-2 orthogonal array with seven
/// 3-level factors, from Xu, Cheng and Wu (2004).
pub fn oa18() -> &'static DesignMatrix {
    &OA18
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::cd_fast3;
    use crate::relation::generate_regular_design;

    #[test]
    fn full_coverage() {
        let entries = catalog_entries();
        assert_eq!(entries.len(), 52);
        for n in 4..=13 {
            for kind in [
                CatalogKind::MinimumAberration,
                CatalogKind::UniformMinimumAberration,
            ] {
                let e = catalog_lookup(27, n, kind).unwrap();
                assert_eq!((e.runs(), e.factors(), e.kind()), (27, n, kind));
            }
        }
        for n in 5..=20 {
            for kind in [
                CatalogKind::MinimumAberration,
                CatalogKind::UniformMinimumAberration,
            ] {
                catalog_lookup(81, n, kind).unwrap();
            }
        }
        assert!(matches!(
            catalog_lookup(27, 14, CatalogKind::MinimumAberration),
            Err(Error::UnknownCatalogEntry { .. })
        ));
        assert!(matches!(
            catalog_lookup(18, 7, CatalogKind::MinimumAberration),
            Err(Error::UnknownCatalogEntry { .. })
        ));
    }

    #[test]
    fn known_relations() {
        let e = catalog_lookup(27, 4, CatalogKind::UniformMinimumAberration).unwrap();
        assert_eq!(e.relation().coeffs(), &[vec![1, 1, 1]]);
        assert_eq!(e.relation().offsets(), &[2]);

        let e = catalog_lookup(27, 7, CatalogKind::UniformMinimumAberration).unwrap();
        assert_eq!(
            e.relation().coeffs(),
            &[vec![1, 1, 1], vec![1, 2, 0], vec![1, 1, 2], vec![1, 0, 1]]
        );
        assert_eq!(e.relation().offsets(), &[1, 1, 0, 2]);

        let e = catalog_lookup(81, 7, CatalogKind::UniformMinimumAberration).unwrap();
        assert_eq!(e.relation().offsets(), &[0, 2, 1]);

        for e in catalog_entries() {
            if e.kind() == CatalogKind::MinimumAberration {
                assert!(e.relation().offsets().iter().all(|&b| b == 0));
            }
            assert!(e.source().contains("Xu (2005)"));
        }
    }

    #[test]
    fn entries_generate_keyed_dimensions() {
        for e in catalog_entries() {
            let d = generate_regular_design(e.relation());
            assert_eq!(d.runs(), e.runs());
            assert_eq!(d.factors(), e.factors());
        }
    }

    #[test]
    fn uniform_entries_attain_known_minima() {
        let cases = [(4, 0.046547), (6, 0.083475)];
        for (n, want) in cases {
            let e = catalog_lookup(27, n, CatalogKind::UniformMinimumAberration).unwrap();
            let d = generate_regular_design(e.relation());
            let phi = cd_fast3(&d).unwrap();
            assert!((phi - want).abs() < 5e-7, "n={n}: {phi} vs {want}");
        }
    }

    #[test]
    fn oa18_is_strength_two() {
        let d = oa18();
        assert_eq!((d.runs(), d.factors(), d.levels()), (18, 7, 3));
        for c1 in 0..7 {
            for c2 in 0..7 {
                if c1 == c2 {
                    continue;
                }
                let mut counts = [0u32; 9];
                for r in 0..18 {
                    counts[(d.get(r, c1) * 3 + d.get(r, c2)) as usize] += 1;
                }
                assert!(counts.iter().all(|&c| c == 2), "columns {c1},{c2}");
            }
        }
    }

    #[test]
    fn rejects_malformed_text() {
        assert!(parse_catalog("entry 27 4\nsource x\nindependents 3\n1 1 1 0").is_err());
        assert!(parse_catalog("entry 27 4 ma\nindependents 3\n1 1 1 0").is_err());
        assert!(parse_catalog("entry 9 4 ma\nsource x\nindependents 3\n1 1 1 0").is_err());
        assert!(parse_catalog("entry 27 4 ma\nsource x\nindependents 3\n1 1 0").is_err());
        assert!(parse_catalog("").unwrap().is_empty());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!(
            CatalogKind::parse("ma").unwrap(),
            CatalogKind::MinimumAberration
        );
        assert_eq!(
            CatalogKind::parse("uniform_minimum_aberration").unwrap(),
            CatalogKind::UniformMinimumAberration
        );
        assert!(CatalogKind::parse("best").is_err());
        assert_eq!(CatalogKind::UniformMinimumAberration.to_string(), "uniform");
    }
}
