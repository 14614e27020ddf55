//! Level-permutation search. Per-column level reversal never changes the
//! centered L2-discrepancy of a 3-level design, so the (3!)^n permutations
//! collapse onto 3^n per-column offsets with uniform multiplicity 2^n. For a
//! regular design, offsets on the independent columns only permute rows, so
//! the space shrinks further to the 3^k dependent-column offsets, and mirror
//! pairing halves that again.

use rayon::prelude::*;

use crate::design::DesignMatrix;
use crate::metrics::{wordlength_pattern, Cd3Kernel, Neumaier, RowMask, WordLengthPattern};
use crate::relation::{generate_regular_design, DefiningRelation};
use crate::{Error, Result};

/// Largest k accepted by [`search_regular`] (3^k candidate offset vectors).
pub const DEFAULT_REGULAR_CAP: usize = 16;

/// Largest n accepted by [`search_general`] (3^n candidate offset vectors).
pub const DEFAULT_GENERAL_CAP: usize = 12;

/// Largest k for which [`geometric_representatives`] materializes its list.
pub const REPRESENTATIVES_CAP: usize = 12;

/// Two values within this absolute distance of the minimum count as
/// minimizers.
const ARGMIN_EPS: f64 = 1e-12;

/// Candidates per parallel work unit. Blocks are processed independently and
/// merged in index order, so results never depend on the thread count.
const BLOCK: u64 = 729;

/// Statistics of the discrepancy over a permutation sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub min_phi: f64,
    pub ave_phi: f64,
    pub max_phi: f64,
    /// Population standard deviation over all permuted designs.
    pub sd_phi: f64,
    /// Every offset vector attaining `min_phi` (within 1e-12), sorted
    /// lexicographically; `argmin[0]` is the canonical representative.
    pub argmin: Vec<Vec<u8>>,
    /// Discrepancy evaluations actually performed.
    pub evaluations: u64,
    /// Geometric classes covered (each counted once regardless of weight).
    pub class_count: u64,
}

/// One mirror class of dependent-column offset vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationClass {
    /// Lexicographically smaller member of the pair.
    pub representative: Vec<u8>,
    /// Its mirror partner (equal to the representative when self-paired).
    pub partner: Vec<u8>,
    /// 1 for self-paired vectors, 2 otherwise.
    pub weight: u8,
}

/// A group of same-arity projections sharing word-length pattern and sweep
/// statistics.
#[derive(Debug, Clone)]
pub struct ProjectionClass {
    /// Pattern of the representative projection (shared by all members).
    pub wlp: WordLengthPattern,
    /// Sweep statistics of the representative projection.
    pub result: SearchResult,
    /// Member column subsets (1-based), lexicographically ordered; the first
    /// is the representative.
    pub columns: Vec<Vec<usize>>,
}

trait SweepEval: Sync {
    fn eval(&self, offsets: &[u8], scratch: &mut Vec<RowMask>) -> f64;
}

/// Evaluates a regular design at arbitrary dependent-column offsets without
/// regenerating the matrix: independent-column masks are fixed, dependent
/// cells shift by the offset.
struct RegularEval {
    kernel: Cd3Kernel,
    indep_masks: Vec<RowMask>,
    dep_base: Vec<u8>,
    runs: usize,
    m: usize,
    k: usize,
}

impl RegularEval {
    fn new(rel: &DefiningRelation) -> Result<Self> {
        let base = generate_regular_design(&rel.with_offsets(vec![0; rel.dependents()])?);
        let m = rel.independents();
        let k = rel.dependents();
        let runs = base.runs();
        let mut indep_masks = Vec::with_capacity(runs);
        let mut dep_base = Vec::with_capacity(runs * k);
        for row in base.rows() {
            let mut m0 = 0u64;
            let mut m2 = 0u64;
            for (c, &x) in row[..m].iter().enumerate() {
                match x {
                    0 => m0 |= 1 << c,
                    2 => m2 |= 1 << c,
                    _ => {}
                }
            }
            indep_masks.push((m0, m2));
            dep_base.extend_from_slice(&row[m..]);
        }
        Ok(Self {
            kernel: Cd3Kernel::new(runs, base.factors()),
            indep_masks,
            dep_base,
            runs,
            m,
            k,
        })
    }
}

impl SweepEval for RegularEval {
    fn eval(&self, offsets: &[u8], scratch: &mut Vec<RowMask>) -> f64 {
        scratch.clear();
        for i in 0..self.runs {
            let (mut m0, mut m2) = self.indep_masks[i];
            let dep = &self.dep_base[i * self.k..(i + 1) * self.k];
            for (j, (&base, &b)) in dep.iter().zip(offsets).enumerate() {
                let mut v = base + b;
                if v >= 3 {
                    v -= 3;
                }
                match v {
                    0 => m0 |= 1 << (self.m + j),
                    2 => m2 |= 1 << (self.m + j),
                    _ => {}
                }
            }
            scratch.push((m0, m2));
        }
        self.kernel.eval(scratch)
    }
}

/// Evaluates an arbitrary 3-level design under per-column offsets.
struct GeneralEval {
    kernel: Cd3Kernel,
    cells: Vec<u8>,
    runs: usize,
    n: usize,
}

impl GeneralEval {
    fn new(d: &DesignMatrix) -> Self {
        Self {
            kernel: Cd3Kernel::new(d.runs(), d.factors()),
            cells: d.cells().to_vec(),
            runs: d.runs(),
            n: d.factors(),
        }
    }
}

impl SweepEval for GeneralEval {
    fn eval(&self, offsets: &[u8], scratch: &mut Vec<RowMask>) -> f64 {
        scratch.clear();
        for i in 0..self.runs {
            let row = &self.cells[i * self.n..(i + 1) * self.n];
            let mut m0 = 0u64;
            let mut m2 = 0u64;
            for (c, (&x, &b)) in row.iter().zip(offsets).enumerate() {
                let mut v = x + b;
                if v >= 3 {
                    v -= 3;
                }
                match v {
                    0 => m0 |= 1 << c,
                    2 => m2 |= 1 << c,
                    _ => {}
                }
            }
            scratch.push((m0, m2));
        }
        self.kernel.eval(scratch)
    }
}

fn decode(idx: u64, pow3: &[u64], digits: &mut [u8]) {
    for (j, d) in digits.iter_mut().enumerate() {
        *d = ((idx / pow3[digits_place(pow3, j)]) % 3) as u8;
    }
}

fn digits_place(pow3: &[u64], j: usize) -> usize {
    pow3.len() - 2 - j
}

struct BlockOut {
    sum: Neumaier,
    sumsq: Neumaier,
    min: f64,
    max: f64,
    argmin: Vec<(f64, u64)>,
    evaluations: u64,
    classes: u64,
    weight: u64,
}

fn process_block(
    range: std::ops::Range<u64>,
    pow3: &[u64],
    ev: &impl SweepEval,
    pairing: Option<&[u8]>,
    phi0: f64,
) -> BlockOut {
    let dim = pow3.len() - 1;
    let mut digits = vec![0u8; dim];
    let mut scratch = Vec::new();
    let mut out = BlockOut {
        sum: Neumaier::default(),
        sumsq: Neumaier::default(),
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        argmin: Vec::new(),
        evaluations: 0,
        classes: 0,
        weight: 0,
    };
    for idx in range {
        decode(idx, pow3, &mut digits);
        let (weight, partner_idx) = match pairing {
            None => (1u64, idx),
            Some(t) => {
                let mut pidx = 0u64;
                for j in 0..dim {
                    let pb = (t[j] + 3 - digits[j]) % 3;
                    pidx += pb as u64 * pow3[digits_place(pow3, j)];
                }
                if pidx < idx {
                    continue; // this class was handled at the partner index
                }
                (if pidx == idx { 1 } else { 2 }, pidx)
            }
        };
        // the zero vector's value is computed once by the caller; mirror
        // partners share the representative's value exactly because the
        // match-count arrays of a mirrored design are identical
        let phi = if idx == 0 {
            phi0
        } else {
            ev.eval(&digits, &mut scratch)
        };
        let shifted = if idx == 0 { 0.0 } else { phi - phi0 };
        let w = weight as f64;
        out.sum.add(w * shifted);
        out.sumsq.add(w * shifted * shifted);
        if phi < out.min {
            out.min = phi;
            out.argmin.retain(|&(p, _)| p <= phi + ARGMIN_EPS);
        }
        if phi > out.max {
            out.max = phi;
        }
        if phi <= out.min + ARGMIN_EPS {
            out.argmin.push((phi, idx));
            if weight == 2 {
                out.argmin.push((phi, partner_idx));
            }
        }
        out.evaluations += 1;
        out.classes += 1;
        out.weight += weight;
    }
    out
}

fn sweep(dim: usize, ev: &impl SweepEval, pairing: Option<Vec<u8>>) -> SearchResult {
    let mut pow3 = vec![1u64; dim + 1];
    for i in 1..=dim {
        pow3[i] = pow3[i - 1] * 3;
    }
    let total = pow3[dim];

    let mut scratch = Vec::new();
    let phi0 = ev.eval(&vec![0; dim], &mut scratch);

    let nblocks = total.div_ceil(BLOCK);
    let blocks: Vec<BlockOut> = (0..nblocks)
        .into_par_iter()
        .map(|bi| {
            let start = bi * BLOCK;
            let end = (start + BLOCK).min(total);
            process_block(start..end, &pow3, ev, pairing.as_deref(), phi0)
        })
        .collect();

    let mut sum = Neumaier::default();
    let mut sumsq = Neumaier::default();
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut candidates: Vec<(f64, u64)> = Vec::new();
    let mut evaluations = 0;
    let mut classes = 0;
    let mut weight = 0;
    for b in blocks {
        sum.add(b.sum.value());
        sumsq.add(b.sumsq.value());
        min = min.min(b.min);
        max = max.max(b.max);
        candidates.extend(b.argmin);
        evaluations += b.evaluations;
        classes += b.classes;
        weight += b.weight;
    }
    debug_assert_eq!(weight, total);

    let w = total as f64;
    let mean_shifted = sum.value() / w;
    let var = (sumsq.value() - sum.value() * mean_shifted) / w;
    let sd = var.max(0.0).sqrt();

    let mut indices: Vec<u64> = candidates
        .into_iter()
        .filter(|&(p, _)| p <= min + ARGMIN_EPS)
        .map(|(_, idx)| idx)
        .collect();
    indices.sort_unstable();
    let argmin = indices
        .into_iter()
        .map(|idx| {
            let mut d = vec![0u8; dim];
            decode(idx, &pow3, &mut d);
            d
        })
        .collect();

    SearchResult {
        min_phi: min,
        ave_phi: phi0 + mean_shifted,
        max_phi: max,
        sd_phi: sd,
        argmin,
        evaluations,
        class_count: classes,
    }
}

/// Offsets that pair each dependent-offset vector with its mirror class:
/// partner_j = (t_j - b_j) mod 3 with t_j = 2 - 2 sum_i c_ji.
fn pairing_vector(rel: &DefiningRelation) -> Vec<u8> {
    rel.coeffs()
        .iter()
        .map(|row| {
            let s: i32 = row.iter().map(|&c| c as i32).sum();
            (2 - 2 * s).rem_euclid(3) as u8
        })
        .collect()
}

/// Sweeps all 3^k dependent-column offset vectors of a regular relation,
/// evaluating one design per mirror class. The statistics cover all 3^k
/// offset designs, which by the fiber collapse equal those over all (3!)^n
/// level permutations of the design.
pub fn search_regular(rel: &DefiningRelation) -> Result<SearchResult> {
    search_regular_capped(rel, DEFAULT_REGULAR_CAP)
}

/// [`search_regular`] with an explicit cap on k.
pub fn search_regular_capped(rel: &DefiningRelation, cap: usize) -> Result<SearchResult> {
    let k = rel.dependents();
    if k > cap {
        return Err(Error::CapExceeded(format!(
            "regular sweep over 3^{k} offset vectors exceeds the cap of k = {cap}; \
             raise the cap to force it"
        )));
    }
    let ev = RegularEval::new(rel)?;
    Ok(sweep(k, &ev, Some(pairing_vector(rel))))
}

/// Sweeps all 3^n per-column offset vectors of an arbitrary 3-level design.
/// Statistics over these 3^n designs equal those over all (3!)^n level
/// permutations because per-column reversal never changes the discrepancy.
pub fn search_general(d: &DesignMatrix) -> Result<SearchResult> {
    search_general_capped(d, DEFAULT_GENERAL_CAP)
}

/// [`search_general`] with an explicit cap on n.
pub fn search_general_capped(d: &DesignMatrix, cap: usize) -> Result<SearchResult> {
    if d.levels() != 3 {
        return Err(Error::InvalidArgument(format!(
            "permutation sweep needs 3 levels, design has {}",
            d.levels()
        )));
    }
    let n = d.factors();
    if n > cap {
        return Err(Error::CapExceeded(format!(
            "general sweep over 3^{n} offset vectors exceeds the cap of n = {cap}; \
             raise the cap to force it"
        )));
    }
    let ev = GeneralEval::new(d);
    Ok(sweep(n, &ev, None))
}

/// Partitions GF(3)^k into mirror classes, returning the lexicographically
/// smaller member of each pair as representative. There are exactly
/// (3^k + 1) / 2 classes: the pairing is an involution with one fixed point.
pub fn geometric_representatives(rel: &DefiningRelation) -> Result<Vec<PermutationClass>> {
    let k = rel.dependents();
    if k > REPRESENTATIVES_CAP {
        return Err(Error::CapExceeded(format!(
            "materializing 3^{k} offset classes exceeds the cap of k = {REPRESENTATIVES_CAP}"
        )));
    }
    let t = pairing_vector(rel);
    let mut pow3 = vec![1u64; k + 1];
    for i in 1..=k {
        pow3[i] = pow3[i - 1] * 3;
    }
    let mut classes = Vec::new();
    let mut digits = vec![0u8; k];
    for idx in 0..pow3[k] {
        decode(idx, &pow3, &mut digits);
        let mut pidx = 0u64;
        let mut partner = vec![0u8; k];
        for j in 0..k {
            partner[j] = (t[j] + 3 - digits[j]) % 3;
            pidx += partner[j] as u64 * pow3[digits_place(&pow3, j)];
        }
        if pidx < idx {
            continue;
        }
        classes.push(PermutationClass {
            representative: digits.clone(),
            partner,
            weight: if pidx == idx { 1 } else { 2 },
        });
    }
    Ok(classes)
}

/// Runs [`search_regular`] and materializes the design at the canonical
/// minimizing offsets. When the relation has minimum aberration, the result
/// is a uniform minimum aberration design.
pub fn uniform_minimum_aberration(
    rel: &DefiningRelation,
) -> Result<(DesignMatrix, SearchResult)> {
    let result = search_regular(rel)?;
    let best = rel.with_offsets(result.argmin[0].clone())?;
    Ok((generate_regular_design(&best), result))
}

/// The two geometrically distinct regular 3^(n-1) fractions defined by
/// x_1 + ... + x_(n-1) + y = b: the one containing the all-one run (b = n
/// mod 3) and the b = n+1 variant. The third choice of b is isomorphic to
/// the second and never built.
pub fn variant_designs(n: usize) -> Result<(DesignMatrix, DesignMatrix)> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "fraction variants need n >= 2 factors, got {n}"
        )));
    }
    let coeffs = vec![vec![2u8; n - 1]];
    let centered = DefiningRelation::new(n - 1, coeffs.clone(), vec![(n % 3) as u8])?;
    let other = DefiningRelation::new(n - 1, coeffs, vec![((n + 1) % 3) as u8])?;
    Ok((
        generate_regular_design(&centered),
        generate_regular_design(&other),
    ))
}

/// Groups the arity-sized column projections of an orthogonal array by
/// permutation-sweep signature: word-length pattern (rounded to 1e-6) plus
/// (min, ave, max, sd) of the sweep (rounded to 1e-9). Classes come back in
/// aberration order, then by ascending minimum.
pub fn classify_projections(oa: &DesignMatrix, arity: usize) -> Result<Vec<ProjectionClass>> {
    if arity == 0 || arity > oa.factors() {
        return Err(Error::InvalidArgument(format!(
            "projection arity {arity} out of range 1..={}",
            oa.factors()
        )));
    }
    let mut classes: std::collections::BTreeMap<(Vec<i64>, [i64; 4]), ProjectionClass> =
        std::collections::BTreeMap::new();

    let mut subset: Vec<usize> = (1..=arity).collect();
    loop {
        let proj = oa.project(&subset)?;
        let wlp = wordlength_pattern(&proj)?;
        let result = search_general(&proj)?;
        let wlp_key: Vec<i64> = wlp
            .tail()
            .iter()
            .map(|&a| (a * 1e6).round() as i64)
            .collect();
        let stats_key = [
            (result.min_phi * 1e9).round() as i64,
            (result.ave_phi * 1e9).round() as i64,
            (result.max_phi * 1e9).round() as i64,
            (result.sd_phi * 1e9).round() as i64,
        ];
        classes
            .entry((wlp_key, stats_key))
            .or_insert_with(|| ProjectionClass {
                wlp,
                result,
                columns: Vec::new(),
            })
            .columns
            .push(subset.clone());

        // advance to the next combination in lexicographic order
        let n = oa.factors();
        let mut i = arity;
        loop {
            if i == 0 {
                return Ok(classes.into_values().collect());
            }
            i -= 1;
            if subset[i] < n - (arity - 1 - i) {
                subset[i] += 1;
                for j in i + 1..arity {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog_lookup, oa18, CatalogKind};
    use crate::design::{LevelMap, LevelPermutation};
    use crate::metrics::{cd_fast3, centered_l2_discrepancy};

    fn rel_a() -> DefiningRelation {
        DefiningRelation::new(2, vec![vec![1, 1]], vec![0]).unwrap()
    }

    fn bits(r: &SearchResult) -> (u64, u64, u64, u64) {
        (
            r.min_phi.to_bits(),
            r.ave_phi.to_bits(),
            r.max_phi.to_bits(),
            r.sd_phi.to_bits(),
        )
    }

    #[test]
    fn regular_sweep_of_nine_run_relation() {
        let r = search_regular(&rel_a()).unwrap();
        assert!((r.min_phi - 0.033034).abs() < 5e-7);
        assert!((r.max_phi - 0.033186).abs() < 5e-7);
        assert!(r.min_phi <= r.ave_phi && r.ave_phi <= r.max_phi);
        assert_eq!(r.class_count, 2);
        assert_eq!(r.evaluations, 2);
        // offset 1 mirrors offset 0; only the self-paired offset 2 minimizes
        assert_eq!(r.argmin, vec![vec![2]]);
    }

    #[test]
    fn sweep_stats_27_run_5_factor() {
        let rel = catalog_lookup(27, 5, CatalogKind::MinimumAberration)
            .unwrap()
            .relation()
            .clone();
        let r = search_regular(&rel).unwrap();
        assert!((r.min_phi - 0.063689).abs() < 5e-7);
        assert!((r.ave_phi - 0.063818).abs() < 5e-7);
        assert!((r.max_phi - 0.063878).abs() < 5e-7);
        assert_eq!(r.class_count, 5);
        assert!(r.sd_phi > 0.0);
    }

    #[test]
    fn sweep_stats_81_run_7_factor_argmin() {
        let rel = catalog_lookup(81, 7, CatalogKind::MinimumAberration)
            .unwrap()
            .relation()
            .clone();
        let r = search_regular(&rel).unwrap();
        assert!((r.min_phi - 0.102515).abs() < 5e-7);
        // the cataloged offsets and their mirror partner both minimize; the
        // partner is lexicographically smaller and leads the list
        assert!(r.argmin.contains(&vec![0, 2, 1]));
        assert_eq!(r.argmin[0], vec![0, 1, 2]);
    }

    #[test]
    fn full_factorial_relation() {
        let rel = DefiningRelation::new(2, vec![], vec![]).unwrap();
        let r = search_regular(&rel).unwrap();
        assert_eq!(r.min_phi, r.max_phi);
        assert_eq!(r.min_phi, r.ave_phi);
        assert_eq!(r.sd_phi, 0.0);
        assert_eq!(r.argmin, vec![Vec::<u8>::new()]);
        assert_eq!(r.class_count, 1);
    }

    #[test]
    fn general_sweep_finds_the_better_class_member() {
        let d = generate_regular_design(&rel_a());
        let r = search_general(&d).unwrap();
        assert!((r.min_phi - 0.033034).abs() < 5e-7);
        assert_eq!(r.class_count, 27);
        assert_eq!(r.evaluations, 27);
        assert!(r.argmin.contains(&vec![0, 0, 2]));
    }

    #[test]
    fn regular_and_general_sweeps_agree_via_fiber_collapse() {
        let rel = rel_a();
        let reg = search_regular(&rel).unwrap();
        let gen = search_general(&generate_regular_design(&rel)).unwrap();
        assert!((reg.min_phi - gen.min_phi).abs() <= 1e-12);
        assert!((reg.ave_phi - gen.ave_phi).abs() <= 1e-12);
        assert!((reg.max_phi - gen.max_phi).abs() <= 1e-12);
        assert!((reg.sd_phi - gen.sd_phi).abs() <= 1e-12);
    }

    #[test]
    fn brute_force_over_all_level_permutations() {
        // all (3!)^3 = 216 permuted designs of the 9-run design, through the
        // full bijection machinery
        let d = generate_regular_design(&rel_a());
        let perms: [[u8; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let mut values = Vec::new();
        for a in perms {
            for b in perms {
                for c in perms {
                    let p = LevelPermutation::from_maps(vec![a, b, c]).unwrap();
                    let m = d.apply_level_permutation(&p).unwrap();
                    values.push(cd_fast3(&m).unwrap());
                }
            }
        }
        let n = values.len() as f64;
        let ave = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - ave) * (v - ave)).sum::<f64>() / n;
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

        let r = search_general(&d).unwrap();
        assert!((r.min_phi - min).abs() < 1e-10);
        assert!((r.ave_phi - ave).abs() < 1e-10);
        assert!((r.max_phi - max).abs() < 1e-10);
        assert!((r.sd_phi - var.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn lemma_one_collapse_on_independent_columns() {
        // offsets on independent columns only permute rows, so the multiset
        // over all 3^n full offsets is 3^(n-k) copies of the 3^k sweep
        let rel = DefiningRelation::new(3, vec![vec![1, 1, 1]], vec![0]).unwrap();
        let reg = search_regular(&rel).unwrap();
        let gen = search_general(&generate_regular_design(&rel)).unwrap();
        assert!((reg.ave_phi - gen.ave_phi).abs() <= 1e-12);
        assert!((reg.sd_phi - gen.sd_phi).abs() <= 1e-12);
        assert_eq!(reg.min_phi, gen.min_phi);
        assert_eq!(reg.max_phi, gen.max_phi);
    }

    #[test]
    fn representatives_partition_the_offset_space() {
        let rel = rel_a();
        let classes = geometric_representatives(&rel).unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[0].representative, vec![0]);
        assert_eq!(classes[0].partner, vec![1]);
        assert_eq!(classes[0].weight, 2);
        assert_eq!(classes[1].representative, vec![2]);
        assert_eq!(classes[1].weight, 1);

        let rel2 = catalog_lookup(27, 5, CatalogKind::MinimumAberration)
            .unwrap()
            .relation()
            .clone();
        let classes = geometric_representatives(&rel2).unwrap();
        assert_eq!(classes.len(), 5);
        let weight_sum: u64 = classes.iter().map(|c| c.weight as u64).sum();
        assert_eq!(weight_sum, 9);
        for c in &classes {
            let da = generate_regular_design(&rel2.with_offsets(c.representative.clone()).unwrap());
            let db = generate_regular_design(&rel2.with_offsets(c.partner.clone()).unwrap());
            assert_eq!(cd_fast3(&da).unwrap(), cd_fast3(&db).unwrap());
            assert!(c.representative <= c.partner);
        }
    }

    #[test]
    fn class_count_is_exactly_the_bound() {
        for n in [5usize, 6, 7] {
            let rel = catalog_lookup(27, n, CatalogKind::MinimumAberration)
                .unwrap()
                .relation()
                .clone();
            let k = n - 3;
            let r = search_regular(&rel).unwrap();
            assert_eq!(r.class_count, 3u64.pow(k as u32).div_ceil(2));
        }
    }

    #[test]
    fn argmin_entries_attain_the_minimum() {
        let rel = catalog_lookup(27, 6, CatalogKind::MinimumAberration)
            .unwrap()
            .relation()
            .clone();
        let r = search_regular(&rel).unwrap();
        for b in &r.argmin {
            let d = generate_regular_design(&rel.with_offsets(b.clone()).unwrap());
            assert!((cd_fast3(&d).unwrap() - r.min_phi).abs() <= 1e-12);
        }
    }

    #[test]
    fn uma_design_matches_search_minimum() {
        let rel = catalog_lookup(27, 8, CatalogKind::MinimumAberration)
            .unwrap()
            .relation()
            .clone();
        let (d, r) = uniform_minimum_aberration(&rel).unwrap();
        assert!((r.min_phi - 0.136644).abs() < 5e-7);
        assert!((cd_fast3(&d).unwrap() - r.min_phi).abs() <= 1e-12);
        assert!((centered_l2_discrepancy(&d) - r.min_phi).abs() <= 1e-12);
    }

    #[test]
    fn variant_designs_reproduce_the_nine_run_pair() {
        let (d0, d1) = variant_designs(3).unwrap();
        assert!(d0.contains_run(&[1, 1, 1]));
        assert!(!d1.contains_run(&[1, 1, 1]));
        assert!((cd_fast3(&d0).unwrap() - 0.033034).abs() < 5e-7);
        assert!((cd_fast3(&d1).unwrap() - 0.033186).abs() < 5e-7);
        assert!(variant_designs(1).is_err());
    }

    #[test]
    fn single_column_sweep_is_flat() {
        let d = DesignMatrix::new(3, 1, 3, vec![0, 1, 2]).unwrap();
        let r = search_general(&d).unwrap();
        assert_eq!(r.min_phi, r.max_phi);
        assert_eq!(r.sd_phi, 0.0);
        assert_eq!(r.argmin.len(), 3);
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let rel = catalog_lookup(27, 7, CatalogKind::MinimumAberration)
            .unwrap()
            .relation()
            .clone();
        let d18 = oa18().project(&[1, 2, 3, 4, 5]).unwrap();
        let mut reg_runs = Vec::new();
        let mut gen_runs = Vec::new();
        for threads in [1usize, 3] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            reg_runs.push(pool.install(|| search_regular(&rel).unwrap()));
            gen_runs.push(pool.install(|| search_general(&d18).unwrap()));
        }
        assert_eq!(bits(&reg_runs[0]), bits(&reg_runs[1]));
        assert_eq!(reg_runs[0].argmin, reg_runs[1].argmin);
        assert_eq!(bits(&gen_runs[0]), bits(&gen_runs[1]));
        assert_eq!(gen_runs[0].argmin, gen_runs[1].argmin);
    }

    #[test]
    fn caps_are_enforced() {
        let rel = catalog_lookup(27, 13, CatalogKind::MinimumAberration)
            .unwrap()
            .relation()
            .clone();
        assert!(matches!(
            search_regular_capped(&rel, 5),
            Err(Error::CapExceeded(_))
        ));
        let d = generate_regular_design(&rel_a());
        assert!(matches!(
            search_general_capped(&d, 2),
            Err(Error::CapExceeded(_))
        ));
        let two = DesignMatrix::new(2, 1, 2, vec![0, 1]).unwrap();
        assert!(search_general(&two).is_err());
    }

    #[test]
    fn arity_three_projection_classes() {
        let classes = classify_projections(oa18(), 3).unwrap();
        assert_eq!(classes.len(), 3);
        let want = [
            (0.5, 0.032526, 0.032500, 0.032538, 0.000018, 28),
            (1.0, 0.032729, 0.032500, 0.032958, 0.000163, 6),
            (2.0, 0.033135, 0.033034, 0.033186, 0.000072, 1),
        ];
        for (c, w) in classes.iter().zip(&want) {
            assert!((c.wlp.values()[3] - w.0).abs() < 1e-9);
            assert!((c.result.ave_phi - w.1).abs() < 5e-7);
            assert!((c.result.min_phi - w.2).abs() < 5e-7);
            assert!((c.result.max_phi - w.3).abs() < 5e-7);
            assert!((c.result.sd_phi - w.4).abs() < 5e-7);
            assert_eq!(c.columns.len(), w.5);
        }
        assert_eq!(classes[0].columns[0], vec![1, 2, 3]);
    }

    #[test]
    fn full_arity_is_one_class() {
        let classes = classify_projections(oa18(), 7).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].columns, vec![vec![1, 2, 3, 4, 5, 6, 7]]);
        assert!((classes[0].result.ave_phi - 0.115386).abs() < 5e-7);
        assert!(classify_projections(oa18(), 0).is_err());
        assert!(classify_projections(oa18(), 8).is_err());
    }

    #[test]
    fn classes_order_by_aberration_then_minimum() {
        for arity in [3, 4] {
            let classes = classify_projections(oa18(), arity).unwrap();
            for pair in classes.windows(2) {
                let ord =
                    crate::metrics::aberration_compare(&pair[0].wlp, &pair[1].wlp).unwrap();
                assert_ne!(ord, std::cmp::Ordering::Greater);
                if ord == std::cmp::Ordering::Equal {
                    assert!(pair[0].result.min_phi <= pair[1].result.min_phi + 1e-12);
                }
            }
        }
    }

    #[test]
    fn level_permutation_machinery_reaches_the_sweep_minimum() {
        // applying the minimizing offsets through apply_level_permutation
        // reproduces the sweep's minimum exactly
        let d = generate_regular_design(&rel_a());
        let r = search_general(&d).unwrap();
        let p = LevelPermutation::from_offsets(&r.argmin[0]).unwrap();
        let best = d.apply_level_permutation(&p).unwrap();
        assert_eq!(cd_fast3(&best).unwrap(), r.min_phi);
        let maps: Vec<LevelMap> = r.argmin[0].iter().map(|&b| LevelMap::Offset(b)).collect();
        assert_eq!(maps.len(), 3);
    }
}
