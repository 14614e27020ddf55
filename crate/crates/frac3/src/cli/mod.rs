//! Command-line surface: argument parsing, dispatch, and report rendering.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or content error,
//! 3 I/O error.

mod report;

use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use frac3::{
    average_cd_from_wlp, beta_wordlength_pattern_capped, catalog_entries, catalog_lookup,
    cd_fast3, centered_l2_discrepancy, classify_projections, distance_distribution, fraction_cd,
    generate_regular_design, oa18, read_design, read_relation, search_general_capped,
    search_regular_capped, verify_suite, wordlength_pattern, write_design, CatalogKind,
    DefiningRelation, DesignMatrix, Error, FractionVariant, LevelPermutation, SearchResult,
    VerifyCheck, VerifyReport, DEFAULT_BETA_CAP, DEFAULT_GENERAL_CAP, DEFAULT_REGULAR_CAP,
};

use report::{csv_line, jf, json_f64_array, json_int_array, json_str, sci, space_join, table, tf};

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

/// Three-level fractional factorial designs: construction, uniformity and
/// aberration metrics, level-permutation search.
#[derive(Parser, Debug)]
#[command(name = "frac3", version, max_term_width = 100)]
pub struct RunConfig {
    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,

    /// Comparison tolerance for verification checks against file inputs
    #[arg(long, global = true, default_value_t = 5e-7)]
    pub tolerance: f64,

    /// Worker threads for permutation sweeps (default: available parallelism)
    #[arg(long, global = true, env = "FRAC3_JOBS")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Build a design from the bundled catalog or a relation file
    Generate(GenerateArgs),
    /// Evaluate discrepancy and word-length metrics of a design file
    Eval(EvalArgs),
    /// Sweep level permutations for the minimum discrepancy
    Search(SearchArgs),
    /// Group same-arity column projections of an orthogonal array
    Classify(ClassifyArgs),
    /// Cross-check closed forms and transforms against computed values
    Verify(VerifyArgs),
    /// List the bundled design catalog
    Catalog(CatalogArgs),
}

#[derive(clap::Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["catalog", "relation"])))]
pub struct GenerateArgs {
    /// Catalog key: RUNS FACTORS KIND (kind: ma | uniform)
    #[arg(long, num_args = 3, value_names = ["RUNS", "FACTORS", "KIND"])]
    pub catalog: Option<Vec<String>>,

    /// Defining-relation file
    #[arg(long, value_name = "FILE")]
    pub relation: Option<PathBuf>,

    /// Output design file (stdout when omitted)
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct EvalArgs {
    /// Design file
    pub design: PathBuf,

    /// Override the factor cap for the beta pattern (cost grows as 3^n)
    #[arg(long, value_name = "N")]
    pub beta_cap: Option<usize>,
}

#[derive(clap::Args, Debug)]
#[command(group(ArgGroup::new("space").required(true).args(["regular", "general"])))]
pub struct SearchArgs {
    /// Relation file: sweep all dependent-column offset vectors
    #[arg(long, value_name = "FILE")]
    pub regular: Option<PathBuf>,

    /// Design file: sweep all per-column level shifts
    #[arg(long, value_name = "FILE")]
    pub general: Option<PathBuf>,

    /// Override the dependent-column cap for --regular
    #[arg(long, value_name = "K")]
    pub max_k: Option<usize>,

    /// Override the factor cap for --general
    #[arg(long, value_name = "N")]
    pub max_n: Option<usize>,

    /// Write the first (lexicographically smallest) argmin design here
    #[arg(long, value_name = "FILE")]
    pub emit_best: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct ClassifyArgs {
    /// Orthogonal-array design file (bundled OA(18, 3^7) when omitted)
    pub oa: Option<PathBuf>,

    /// Number of columns per projection
    #[arg(long, value_name = "A")]
    pub arity: usize,
}

#[derive(clap::Args, Debug)]
pub struct VerifyArgs {
    /// Largest factor count to check (2..=10)
    #[arg(long, default_value_t = 8, value_name = "N")]
    pub nmax: usize,

    /// Also average over all 6^n permuted designs for n <= 3
    #[arg(long)]
    pub bruteforce: bool,

    /// Check a regular 3^(n-1) design file against its closed form
    #[arg(long, value_name = "FILE")]
    pub design: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct CatalogArgs {
    /// Filter by run count
    #[arg(long)]
    pub runs: Option<usize>,

    /// Filter by factor count
    #[arg(long)]
    pub factors: Option<usize>,

    /// Filter by kind (ma | uniform)
    #[arg(long)]
    pub kind: Option<String>,

    /// Also print each entry's defining relation
    #[arg(long)]
    pub relations: bool,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 3,
        _ => 2,
    }
}

pub fn run(cfg: &RunConfig) -> i32 {
    if cfg.tolerance.is_nan() || cfg.tolerance <= 0.0 {
        eprintln!("error: --tolerance must be positive");
        return 2;
    }
    if let Some(jobs) = cfg.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return 2;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: cannot configure {jobs} worker threads: {e}");
            return 2;
        }
    }
    let result = match &cfg.command {
        Cmd::Generate(a) => cmd_generate(cfg, a),
        Cmd::Eval(a) => cmd_eval(cfg, a),
        Cmd::Search(a) => cmd_search(cfg, a),
        Cmd::Classify(a) => cmd_classify(cfg, a),
        Cmd::Verify(a) => cmd_verify(cfg, a),
        Cmd::Catalog(a) => cmd_catalog(cfg, a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::CapExceeded(_)) {
                if let Cmd::Search(_) = cfg.command {
                    eprintln!(
                        "hint: raise the cap with --max-k (regular) or --max-n (general)"
                    );
                }
                if let Cmd::Eval(_) = cfg.command {
                    eprintln!("hint: raise the cap with --beta-cap");
                }
            }
            exit_code(&e)
        }
    }
}

fn load_generate_relation(a: &GenerateArgs) -> frac3::Result<DefiningRelation> {
    if let Some(key) = &a.catalog {
        let runs: usize = key[0]
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad run count {:?}", key[0])))?;
        let factors: usize = key[1]
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad factor count {:?}", key[1])))?;
        let kind = CatalogKind::parse(&key[2])?;
        Ok(catalog_lookup(runs, factors, kind)?.relation().clone())
    } else {
        read_relation(a.relation.as_ref().expect("clap group"))
    }
}

fn cmd_generate(_cfg: &RunConfig, a: &GenerateArgs) -> frac3::Result<i32> {
    let rel = load_generate_relation(a)?;
    let design = generate_regular_design(&rel);
    let wlp = wordlength_pattern(&design)?;
    match &a.output {
        Some(path) => write_design(&design, path)?,
        None => print!("{}", frac3::design_to_string(&design)),
    }
    let tail: Vec<String> = wlp.tail().iter().map(|&x| tf(x)).collect();
    eprintln!(
        "{} runs, {} factors, wlp [{}]",
        design.runs(),
        design.factors(),
        tail.join(", ")
    );
    Ok(0)
}

struct EvalReport {
    runs: usize,
    factors: usize,
    levels: u8,
    phi: f64,
    phi_fast: f64,
    ave_phi: f64,
    wlp: Vec<f64>,
    distance: Vec<f64>,
    beta: Option<Vec<f64>>,
}

fn cmd_eval(cfg: &RunConfig, a: &EvalArgs) -> frac3::Result<i32> {
    let d = read_design(&a.design)?;
    if d.levels() != 3 {
        return Err(Error::InvalidDesign(format!(
            "eval needs a 3-level design, this file declares {} levels",
            d.levels()
        )));
    }
    let phi = centered_l2_discrepancy(&d);
    let phi_fast = cd_fast3(&d)?;
    if (phi - phi_fast).abs() > 1e-9 * phi.abs().max(1.0) {
        eprintln!("warning: product-form and fast-path discrepancies disagree: {phi} vs {phi_fast}");
    }
    let wlp = wordlength_pattern(&d)?;
    let ave_phi = average_cd_from_wlp(&wlp);
    let distance = distance_distribution(&d).normalized();
    let beta = match beta_wordlength_pattern_capped(&d, a.beta_cap.unwrap_or(DEFAULT_BETA_CAP)) {
        Ok(b) => Some(b.values().to_vec()),
        Err(Error::CapExceeded(msg)) => {
            eprintln!("warning: beta pattern skipped: {msg}");
            None
        }
        Err(e) => return Err(e),
    };
    let rep = EvalReport {
        runs: d.runs(),
        factors: d.factors(),
        levels: d.levels(),
        phi,
        phi_fast,
        ave_phi,
        wlp: wlp.values().to_vec(),
        distance,
        beta,
    };
    print!("{}", render_eval(cfg.format, &rep));
    Ok(0)
}

fn render_eval(format: OutputFormat, r: &EvalReport) -> String {
    match format {
        OutputFormat::Json => {
            let beta = match &r.beta {
                Some(b) => json_f64_array(b),
                None => "null".to_string(),
            };
            format!(
                "{{\"runs\":{},\"factors\":{},\"levels\":{},\"phi\":{},\"phi_fast\":{},\"ave_phi\":{},\"wlp\":{},\"distance\":{},\"beta\":{}}}\n",
                r.runs,
                r.factors,
                r.levels,
                jf(r.phi),
                jf(r.phi_fast),
                jf(r.ave_phi),
                json_f64_array(&r.wlp),
                json_f64_array(&r.distance),
                beta,
            )
        }
        OutputFormat::Csv => {
            let mut out = String::from("metric,index,value\n");
            out.push_str(&format!("runs,,{}\n", r.runs));
            out.push_str(&format!("factors,,{}\n", r.factors));
            out.push_str(&format!("levels,,{}\n", r.levels));
            out.push_str(&format!("phi,,{}\n", jf(r.phi)));
            out.push_str(&format!("phi_fast,,{}\n", jf(r.phi_fast)));
            out.push_str(&format!("ave_phi,,{}\n", jf(r.ave_phi)));
            for (i, x) in r.wlp.iter().enumerate() {
                out.push_str(&format!("wlp,{i},{}\n", jf(*x)));
            }
            for (i, x) in r.distance.iter().enumerate() {
                out.push_str(&format!("distance,{i},{}\n", jf(*x)));
            }
            if let Some(beta) = &r.beta {
                for (i, x) in beta.iter().enumerate() {
                    out.push_str(&format!("beta,{i},{}\n", jf(*x)));
                }
            }
            out
        }
        OutputFormat::Text => {
            let join = |xs: &[f64]| {
                xs.iter().map(|&x| tf(x)).collect::<Vec<_>>().join(" ")
            };
            let mut out = String::new();
            out.push_str(&format!("runs      {}\n", r.runs));
            out.push_str(&format!("factors   {}\n", r.factors));
            out.push_str(&format!("levels    {}\n", r.levels));
            out.push_str(&format!("phi       {}\n", tf(r.phi)));
            out.push_str(&format!("phi_fast  {}\n", tf(r.phi_fast)));
            out.push_str(&format!("ave_phi   {}\n", tf(r.ave_phi)));
            out.push_str(&format!("wlp       {}\n", join(&r.wlp)));
            out.push_str(&format!("distance  {}\n", join(&r.distance)));
            match &r.beta {
                Some(b) => out.push_str(&format!("beta      {}\n", join(b))),
                None => out.push_str("beta      (skipped: factor cap exceeded)\n"),
            }
            out
        }
    }
}

fn cmd_search(cfg: &RunConfig, a: &SearchArgs) -> frac3::Result<i32> {
    let (mode, runs, factors, result, best): (&str, usize, usize, SearchResult, DesignMatrix) =
        if let Some(path) = &a.regular {
            let rel = read_relation(path)?;
            let result = search_regular_capped(&rel, a.max_k.unwrap_or(DEFAULT_REGULAR_CAP))?;
            let best = generate_regular_design(&rel.with_offsets(result.argmin[0].clone())?);
            ("regular", rel.runs(), rel.factors(), result, best)
        } else {
            let d = read_design(a.general.as_ref().expect("clap group"))?;
            let result = search_general_capped(&d, a.max_n.unwrap_or(DEFAULT_GENERAL_CAP))?;
            let perm = LevelPermutation::from_offsets(&result.argmin[0])?;
            let best = d.apply_level_permutation(&perm)?;
            ("general", d.runs(), d.factors(), result, best)
        };
    if let Some(path) = &a.emit_best {
        write_design(&best, path)?;
    }
    print!("{}", render_search(cfg.format, mode, runs, factors, &result));
    Ok(0)
}

fn render_search(
    format: OutputFormat,
    mode: &str,
    runs: usize,
    factors: usize,
    r: &SearchResult,
) -> String {
    match format {
        OutputFormat::Json => {
            let argmin: Vec<String> = r.argmin.iter().map(|v| json_int_array(v)).collect();
            format!(
                "{{\"mode\":{},\"runs\":{},\"factors\":{},\"min_phi\":{},\"ave_phi\":{},\"max_phi\":{},\"sd_phi\":{},\"evaluations\":{},\"class_count\":{},\"argmin\":[{}]}}\n",
                json_str(mode),
                runs,
                factors,
                jf(r.min_phi),
                jf(r.ave_phi),
                jf(r.max_phi),
                jf(r.sd_phi),
                r.evaluations,
                r.class_count,
                argmin.join(","),
            )
        }
        OutputFormat::Csv => {
            let argmin: Vec<String> = r.argmin.iter().map(|v| space_join(v)).collect();
            let mut out = String::from(
                "mode,runs,factors,min_phi,ave_phi,max_phi,sd_phi,evaluations,class_count,argmin\n",
            );
            out.push_str(&csv_line(&[
                mode.to_string(),
                runs.to_string(),
                factors.to_string(),
                jf(r.min_phi),
                jf(r.ave_phi),
                jf(r.max_phi),
                jf(r.sd_phi),
                r.evaluations.to_string(),
                r.class_count.to_string(),
                argmin.join(";"),
            ]));
            out.push('\n');
            out
        }
        OutputFormat::Text => {
            let mut out = String::new();
            out.push_str(&format!("mode         {mode}\n"));
            out.push_str(&format!("runs         {runs}\n"));
            out.push_str(&format!("factors      {factors}\n"));
            out.push_str(&format!("min_phi      {}\n", tf(r.min_phi)));
            out.push_str(&format!("ave_phi      {}\n", tf(r.ave_phi)));
            out.push_str(&format!("max_phi      {}\n", tf(r.max_phi)));
            out.push_str(&format!("sd_phi       {}\n", tf(r.sd_phi)));
            out.push_str(&format!("evaluations  {}\n", r.evaluations));
            out.push_str(&format!("classes      {}\n", r.class_count));
            for v in &r.argmin {
                out.push_str(&format!("argmin       {}\n", space_join(v)));
            }
            out
        }
    }
}

fn cmd_classify(cfg: &RunConfig, a: &ClassifyArgs) -> frac3::Result<i32> {
    let d = match &a.oa {
        Some(path) => read_design(path)?,
        None => oa18().clone(),
    };
    let classes = classify_projections(&d, a.arity)?;
    print!("{}", render_classify(cfg.format, &d, a.arity, &classes));
    Ok(0)
}

fn render_classify(
    format: OutputFormat,
    d: &DesignMatrix,
    arity: usize,
    classes: &[frac3::ProjectionClass],
) -> String {
    let a3 = |c: &frac3::ProjectionClass| c.wlp.values().get(3).copied().unwrap_or(0.0);
    let a4 = |c: &frac3::ProjectionClass| c.wlp.values().get(4).copied().unwrap_or(0.0);
    match format {
        OutputFormat::Json => {
            let rows: Vec<String> = classes
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let members: Vec<String> =
                        c.columns.iter().map(|m| json_int_array(m)).collect();
                    format!(
                        "{{\"class\":{},\"columns\":{},\"sets\":{},\"ave_phi\":{},\"min_phi\":{},\"max_phi\":{},\"sd_phi\":{},\"a3\":{},\"a4\":{},\"members\":[{}]}}",
                        i + 1,
                        json_int_array(&c.columns[0]),
                        c.columns.len(),
                        jf(c.result.ave_phi),
                        jf(c.result.min_phi),
                        jf(c.result.max_phi),
                        jf(c.result.sd_phi),
                        jf(a3(c)),
                        jf(a4(c)),
                        members.join(","),
                    )
                })
                .collect();
            format!(
                "{{\"runs\":{},\"factors\":{},\"arity\":{},\"classes\":[{}]}}\n",
                d.runs(),
                d.factors(),
                arity,
                rows.join(","),
            )
        }
        OutputFormat::Csv => {
            let mut out = String::from(
                "class,columns,sets,ave_phi,min_phi,max_phi,sd_phi,a3,a4\n",
            );
            for (i, c) in classes.iter().enumerate() {
                out.push_str(&csv_line(&[
                    (i + 1).to_string(),
                    space_join(&c.columns[0]),
                    c.columns.len().to_string(),
                    jf(c.result.ave_phi),
                    jf(c.result.min_phi),
                    jf(c.result.max_phi),
                    jf(c.result.sd_phi),
                    jf(a3(c)),
                    jf(a4(c)),
                ]));
                out.push('\n');
            }
            out
        }
        OutputFormat::Text => {
            let rows: Vec<Vec<String>> = classes
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    vec![
                        format!("{}-{arity}.{}", d.runs(), i + 1),
                        space_join(&c.columns[0]),
                        c.columns.len().to_string(),
                        tf(c.result.ave_phi),
                        tf(c.result.min_phi),
                        tf(c.result.max_phi),
                        tf(c.result.sd_phi),
                        tf(a3(c)),
                        tf(a4(c)),
                    ]
                })
                .collect();
            table(
                &["class", "columns", "sets", "ave_phi", "min_phi", "max_phi", "sd_phi", "a3", "a4"],
                &rows,
            )
        }
    }
}

fn cmd_verify(cfg: &RunConfig, a: &VerifyArgs) -> frac3::Result<i32> {
    let mut report = verify_suite(a.nmax, a.bruteforce)?;
    if let Some(path) = &a.design {
        report.checks.push(design_check(path, cfg.tolerance)?);
    }
    print!("{}", render_verify(cfg.format, &report));
    Ok(if report.all_pass() { 0 } else { 1 })
}

fn design_check(path: &PathBuf, tolerance: f64) -> frac3::Result<VerifyCheck> {
    let d = read_design(path)?;
    let n = d.factors();
    if n < 2 || d.runs() != 3usize.pow(n as u32 - 1) {
        return Err(frac3::Error::InvalidArgument(format!(
            "closed forms apply to one-dependent-column fractions \
             (3^(n-1) runs on n factors); design has {} runs, {} factors",
            d.runs(),
            n
        )));
    }
    let variant = if d.contains_run(&vec![1u8; n]) {
        FractionVariant::Centered
    } else {
        FractionVariant::Uncentered
    };
    let delta = (cd_fast3(&d)? - fraction_cd(n, variant)?).abs();
    Ok(VerifyCheck {
        name: format!("design file vs {variant} closed form"),
        delta,
        tolerance,
        pass: delta <= tolerance,
    })
}

fn render_verify(format: OutputFormat, r: &VerifyReport) -> String {
    match format {
        OutputFormat::Json => {
            let rows: Vec<String> = r
                .checks
                .iter()
                .map(|c| {
                    format!(
                        "{{\"name\":{},\"delta\":{},\"tolerance\":{},\"pass\":{}}}",
                        json_str(&c.name),
                        jf(c.delta),
                        jf(c.tolerance),
                        c.pass,
                    )
                })
                .collect();
            format!(
                "{{\"checks\":[{}],\"all_pass\":{}}}\n",
                rows.join(","),
                r.all_pass(),
            )
        }
        OutputFormat::Csv => {
            let mut out = String::from("name,delta,tolerance,pass\n");
            for c in &r.checks {
                out.push_str(&csv_line(&[
                    c.name.clone(),
                    jf(c.delta),
                    jf(c.tolerance),
                    c.pass.to_string(),
                ]));
                out.push('\n');
            }
            out
        }
        OutputFormat::Text => {
            let width = r.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
            let mut out = String::new();
            for c in &r.checks {
                out.push_str(&format!(
                    "{}  {:<width$}  delta {:>9}  tolerance {:>9}\n",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    sci(c.delta),
                    sci(c.tolerance),
                ));
            }
            let failures = r.checks.iter().filter(|c| !c.pass).count();
            out.push_str(&format!("{} checks, {} failures\n", r.checks.len(), failures));
            out
        }
    }
}

fn cmd_catalog(cfg: &RunConfig, a: &CatalogArgs) -> frac3::Result<i32> {
    let kind = match &a.kind {
        Some(s) => Some(CatalogKind::parse(s)?),
        None => None,
    };
    let entries: Vec<_> = catalog_entries()
        .iter()
        .filter(|e| a.runs.is_none_or(|r| e.runs() == r))
        .filter(|e| a.factors.is_none_or(|n| e.factors() == n))
        .filter(|e| kind.is_none_or(|k| e.kind() == k))
        .collect();
    match cfg.format {
        OutputFormat::Json => {
            let rows: Vec<String> = entries
                .iter()
                .map(|e| {
                    let rel = e.relation();
                    let coeffs: Vec<String> =
                        rel.coeffs().iter().map(|c| json_int_array(c)).collect();
                    format!(
                        "{{\"runs\":{},\"factors\":{},\"kind\":{},\"independents\":{},\"coeffs\":[{}],\"offsets\":{},\"source\":{}}}",
                        e.runs(),
                        e.factors(),
                        json_str(e.kind().as_str()),
                        rel.independents(),
                        coeffs.join(","),
                        json_int_array(rel.offsets()),
                        json_str(e.source()),
                    )
                })
                .collect();
            println!("[{}]", rows.join(","));
        }
        OutputFormat::Csv => {
            let mut out = String::from("runs,factors,kind,independents,dependents,source\n");
            for e in &entries {
                out.push_str(&csv_line(&[
                    e.runs().to_string(),
                    e.factors().to_string(),
                    e.kind().as_str().to_string(),
                    e.relation().independents().to_string(),
                    e.relation().dependents().to_string(),
                    e.source().to_string(),
                ]));
                out.push('\n');
            }
            print!("{out}");
        }
        OutputFormat::Text => {
            let rows: Vec<Vec<String>> = entries
                .iter()
                .map(|e| {
                    vec![
                        e.runs().to_string(),
                        e.factors().to_string(),
                        e.kind().as_str().to_string(),
                        e.relation().independents().to_string(),
                        e.relation().dependents().to_string(),
                        e.source().to_string(),
                    ]
                })
                .collect();
            print!(
                "{}",
                table(
                    &["runs", "factors", "kind", "independents", "dependents", "source"],
                    &rows,
                )
            );
            if a.relations {
                for e in &entries {
                    println!();
                    println!(
                        "# {} runs, {} factors, {}",
                        e.runs(),
                        e.factors(),
                        e.kind().as_str()
                    );
                    print!("{}", frac3::relation_to_string(e.relation()));
                }
            }
        }
    }
    Ok(0)
}
