use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rootchain::admissibility::{enumerate_admissible_with, is_admissible_with, AdmissibilityReport};
use rootchain::analysis::{analyze, Analysis};
use rootchain::arrangement::{closure_of, extract_with, parse_arrangement, Arrangement, ExtractOptions, Shape};
use rootchain::config::{ConfigError, SolverConfig};
use rootchain::poly::{parse_polynomial, FloatPoly, PolyError, Polynomial, RatPoly, Rational, RootProfile};
use rootchain::verify::{roundtrip_one, verify_roundtrip, RoundtripRow, RowStatus, VerifyOptions};
use serde::Serialize;
use serde_json::json;

use crate::catalog::{Catalog, CatalogError, CatalogHeader, CatalogRow, SoundnessSummary, FORMAT_VERSION};
use crate::{Cli, Command, Global, ShapeArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_PARAMS: u8 = 2;
pub const EXIT_AMBIGUOUS: u8 = 3;
pub const EXIT_INADMISSIBLE: u8 = 4;
pub const EXIT_SOLVER: u8 = 5;
pub const EXIT_PARTIAL: u8 = 6;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("{0}")]
    Params(String),
    #[error("root clustering was decided by tolerances; rerun with --force-float to accept it")]
    Ambiguous,
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Ambiguous => EXIT_AMBIGUOUS,
            _ => EXIT_PARAMS,
        }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::ClusterAmbiguity => CliError::Ambiguous,
            e => CliError::Params(e.to_string()),
        }
    }
}

fn params(e: impl std::fmt::Display) -> CliError {
    CliError::Params(e.to_string())
}

pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let g = &cli.global;
    let cfg = load_config(g)?;
    match &cli.command {
        Command::Analyze {
            polynomial,
            s,
            float,
            force_float,
        } => cmd_analyze(g, &cfg, polynomial, *s, *float, *force_float),
        Command::Enumerate { n, s, m, count_only } => cmd_enumerate(g, &cfg, *n, *s, *m, *count_only),
        Command::Realize { arrangement, shape } => cmd_realize(g, &cfg, arrangement, shape),
        Command::Verify {
            from_catalog: Some(path),
            ..
        } => cmd_verify_catalog(g, path),
        Command::Verify {
            n,
            s,
            m,
            samples,
            max_n,
            ..
        } => {
            let (Some(n), Some(s), Some(m)) = (*n, *s, *m) else {
                return Err(params("verify needs --n, --s and --m"));
            };
            cmd_verify(g, &cfg, n, s, m, *samples, *max_n)
        }
        Command::Closure { arrangement, shape } => cmd_closure(g, &cfg, arrangement, shape),
    }
}

fn load_config(g: &Global) -> Result<SolverConfig, CliError> {
    let path = g
        .config
        .clone()
        .or_else(|| std::env::var_os("ROOTCHAIN_CONFIG").map(Into::into));
    let mut cfg = match path {
        Some(p) => SolverConfig::load(&p)?,
        None => SolverConfig::default(),
    };
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    if let Some(mode) = g.cond_c {
        cfg.cond_c = mode;
    }
    Ok(cfg)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Print the JSON or the table, and save the JSON to `--out`.
fn emit<T: Serialize>(g: &Global, value: &T, table: &str) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report serializes") + "\n";
    if g.json {
        print!("{text}");
    } else {
        print!("{table}");
    }
    if let Some(path) = &g.out {
        write_file(path, &text)?;
    }
    Ok(())
}

fn tool() -> String {
    format!("rootchain {}", env!("CARGO_PKG_VERSION"))
}

fn header(cfg: &SolverConfig, n: u32, s: u32, m: u32) -> CatalogHeader {
    CatalogHeader {
        format: FORMAT_VERSION,
        tool: tool(),
        n,
        s,
        m,
        seed: cfg.seed,
        config_hash: cfg.hash(),
        cond_c: cfg.cond_c,
    }
}

fn shape_of(a: &ShapeArgs) -> Shape {
    Shape {
        n: a.n,
        s: a.s,
        m: a.m,
        m_prime: a.m_prime,
    }
}

fn fmt_profile(p: &RootProfile) -> String {
    let mut out = String::new();
    for (i, r) in p.real_roots.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{:.12}", r.location);
        if r.multiplicity > 1 {
            let _ = write!(out, " (x{})", r.multiplicity);
        }
    }
    if p.real_roots.is_empty() {
        out.push_str("none");
    }
    let _ = write!(out, "; complex pairs: {}", p.complex_pairs);
    out
}

fn fmt_report(out: &mut String, report: &AdmissibilityReport) {
    if report.verdict {
        let counts = report.rolle_witness.as_ref().map(|r| r.counts().to_vec()).unwrap_or_default();
        let _ = writeln!(out, "admissible: yes (Rolle counts {counts:?})");
    } else {
        let _ = writeln!(out, "admissible: no");
        for v in &report.violations {
            let _ = writeln!(out, "  {} at {:?}: {}", v.condition, v.positions, v.message);
        }
    }
}

fn cmd_analyze(
    g: &Global,
    cfg: &SolverConfig,
    text: &str,
    s: u32,
    float: bool,
    force_float: bool,
) -> Result<u8, CliError> {
    let exact = parse_polynomial(text)?;
    let p = if float || force_float {
        Polynomial::Float(exact.map_to_f64())
    } else {
        Polynomial::Exact(exact)
    };
    let opts = ExtractOptions {
        refine_to: cfg.refine_to,
        cluster_tol: cfg.cluster_tol,
        eq_tol: cfg.eps_eq,
        allow_ambiguity: force_float,
    };
    let a: Analysis = analyze(&p, s, &opts, cfg.cond_c)?;
    let mut t = String::new();
    let _ = writeln!(t, "P       = {}", a.polynomial);
    let _ = writeln!(t, "P^({s})  = {}", a.derivative);
    let _ = writeln!(t, "roots of P:      {}", fmt_profile(&a.p_profile));
    let _ = writeln!(t, "roots of P^({s}): {}", fmt_profile(&a.q_profile));
    let _ = writeln!(
        t,
        "arrangement: {}   (n = {}, s = {}, m = {}, m' = {})",
        a.arrangement, a.shape.n, a.shape.s, a.shape.m, a.shape.m_prime
    );
    if !a.exact {
        let _ = writeln!(t, "(floating point{})", if a.ambiguous { ", decided by tolerances" } else { "" });
    }
    let _ = writeln!(t, "Rolle roots: {}", a.rolle_count);
    for (assign, roots) in a.rolle_assignments.iter().zip(&a.rolle_roots) {
        let locs: Vec<String> = roots.iter().map(|x| format!("{x:.12}")).collect();
        let _ = writeln!(t, "  counts {:?}: {}", assign.counts(), locs.join(", "));
    }
    match &a.admissibility {
        Some(r) => fmt_report(&mut t, r),
        None => {
            let _ = writeln!(t, "admissibility: undefined (n - 2m - s < 0)");
        }
    }
    emit(g, &a, &t)?;
    Ok(EXIT_OK)
}

fn cmd_enumerate(g: &Global, cfg: &SolverConfig, n: u32, s: u32, m: u32, count_only: bool) -> Result<u8, CliError> {
    let all = enumerate_admissible_with(n, s, m, cfg.cond_c).map_err(params)?;
    let rows: Vec<CatalogRow> = all
        .iter()
        .map(|a| CatalogRow::verdict_only(a.to_string(), a.m_prime, true))
        .collect();
    let cat = Catalog::new(header(cfg, n, s, m), rows, None);
    if let Some(path) = &g.out {
        cat.write(path)?;
    }
    if count_only {
        if g.json {
            println!("{}", json!({ "count": all.len() }));
        } else {
            println!("{}", all.len());
        }
    } else if g.json {
        print!("{}", cat.to_json());
    } else {
        for r in &cat.rows {
            println!("{}    (m' = {})", r.arrangement, r.m_prime);
        }
        println!("{} admissible arrangements for n = {n}, s = {s}, m = {m}", all.len());
    }
    Ok(EXIT_OK)
}

fn catalog_row(row: &RoundtripRow) -> CatalogRow {
    let mut c = CatalogRow::verdict_only(row.target.to_string(), row.target.m_prime, true);
    c.status = Some(row.status);
    c.reextracted = row.reextracted.clone();
    c.wall_ms = Some(row.wall.as_secs_f64() * 1e3);
    if let Some(r) = &row.result {
        c.residual = Some(r.residual);
        c.fixed_point_residual = r.fixed_point_residual;
        c.path = Some(r.path);
        c.witness = Some(r.witness_decimals());
        c.witness_exact = r.witness.coeffs_leading_exact();
    }
    c
}

#[derive(Serialize)]
struct RealizeReport {
    target: String,
    status: RowStatus,
    witness: Option<String>,
    witness_decimals: Option<Vec<String>>,
    witness_exact: Option<Vec<String>>,
    reextracted: Option<String>,
    residual: Option<f64>,
    fixed_point_residual: Option<f64>,
    min_gap: Option<f64>,
    path: Option<rootchain::realizer::RealizationPath>,
    error: Option<String>,
}

fn cmd_realize(g: &Global, cfg: &SolverConfig, text: &str, shape: &ShapeArgs) -> Result<u8, CliError> {
    let target = parse_arrangement(text, &shape_of(shape)).map_err(params)?;
    if target.rolle_count() < 0 {
        return Err(params(format!("n - 2m - s = {} is negative", target.rolle_count())));
    }
    let report = is_admissible_with(&target, cfg.cond_c);
    if !report.verdict {
        let mut t = format!("{target} is not admissible\n");
        fmt_report(&mut t, &report);
        let value = json!({ "target": target.to_string(), "admissibility": report });
        emit(g, &value, &t)?;
        return Ok(EXIT_INADMISSIBLE);
    }
    let row = roundtrip_one(&target, cfg);
    let r = row.result.as_ref();
    let out = RealizeReport {
        target: target.to_string(),
        status: row.status,
        witness: r.map(|r| r.witness.to_string()),
        witness_decimals: r.map(|r| r.witness_decimals()),
        witness_exact: r.and_then(|r| r.witness.coeffs_leading_exact()),
        reextracted: row.reextracted.clone(),
        residual: r.map(|r| r.residual),
        fixed_point_residual: r.and_then(|r| r.fixed_point_residual),
        min_gap: r.map(|r| r.min_gap),
        path: r.map(|r| r.path),
        error: row.error.clone(),
    };
    let mut t = String::new();
    let _ = writeln!(t, "target:      {}", out.target);
    if let Some(w) = &out.witness {
        let _ = writeln!(t, "witness:     {w}");
    }
    if let Some(x) = &out.reextracted {
        let _ = writeln!(t, "re-extracted: {x}");
    }
    if let (Some(res), Some(path)) = (out.residual, out.path) {
        let _ = writeln!(t, "residual:    {res:e}   path: {path:?}");
    }
    if let Some(e) = &out.error {
        let _ = writeln!(t, "diagnostics: {e}");
    }
    let _ = writeln!(t, "status:      {:?}", out.status);
    emit(g, &out, &t)?;
    Ok(if row.status == RowStatus::Realized { EXIT_OK } else { EXIT_SOLVER })
}

fn cmd_verify(g: &Global, cfg: &SolverConfig, n: u32, s: u32, m: u32, samples: u64, max_n: u32) -> Result<u8, CliError> {
    if n > max_n {
        return Err(params(format!("n = {n} exceeds the cap {max_n} (raise it with --max-n)")));
    }
    let opts = VerifyOptions { samples, jobs: g.jobs };
    let report = verify_roundtrip(n, s, m, cfg, opts).map_err(params)?;
    let rows: Vec<CatalogRow> = report.rows.iter().map(catalog_row).collect();
    let soundness = report.soundness.as_ref().map(SoundnessSummary::from);
    let cat = Catalog::new(header(cfg, n, s, m), rows, soundness);
    if let Some(path) = &g.out {
        cat.write(path)?;
    }
    let ok = report.all_realized() && report.soundness_violations() == 0;
    if g.json {
        print!("{}", cat.to_json());
    } else {
        for r in &cat.rows {
            let status = if r.status == Some(RowStatus::Realized) { "ok  " } else { "FAIL" };
            let residual = r.residual.map(|x| format!("{x:.1e}")).unwrap_or_else(|| "-".into());
            let ms = r.wall_ms.unwrap_or(0.0);
            println!("{status} {:<32} residual {residual:<8} {ms:>9.1} ms", r.arrangement);
        }
        println!("realized {}/{} for n = {n}, s = {s}, m = {m}", report.realized(), report.rows.len());
        if let Some(sd) = &cat.soundness {
            println!(
                "soundness: {} samples, {} out of domain, {} distinct arrangements, {} violations",
                sd.samples,
                sd.out_of_domain,
                sd.distinct_observed,
                sd.violations.len()
            );
            for v in &sd.violations {
                println!("  violation: {} from {}", v.arrangement, v.polynomial);
            }
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_PARTIAL })
}

fn witness_of(row: &CatalogRow) -> Result<Option<Polynomial>, CliError> {
    if let Some(exact) = &row.witness_exact {
        let coeffs = exact
            .iter()
            .map(|c| c.parse::<Rational>().map_err(params))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Some(Polynomial::Exact(RatPoly::from_leading(coeffs))));
    }
    if let Some(dec) = &row.witness {
        let coeffs = dec
            .iter()
            .map(|c| c.parse::<f64>().map_err(params))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Some(Polynomial::Float(FloatPoly::from_leading(coeffs))));
    }
    Ok(None)
}

#[derive(Serialize)]
struct Recheck {
    rows: usize,
    witnesses: usize,
    mismatches: Vec<String>,
}

fn cmd_verify_catalog(g: &Global, path: &Path) -> Result<u8, CliError> {
    let cat = Catalog::read(path)?;
    let h = &cat.header;
    let enumerated: BTreeSet<String> = enumerate_admissible_with(h.n, h.s, h.m, h.cond_c)
        .map_err(params)?
        .iter()
        .map(Arrangement::to_string)
        .collect();
    let mut mismatches = Vec::new();
    let mut witnesses = 0;
    let mut listed = BTreeSet::new();
    for row in &cat.rows {
        listed.insert(row.arrangement.clone());
        let arr = match parse_arrangement(&row.arrangement, &Shape::full(h.n, h.s, h.m, row.m_prime)) {
            Ok(a) => a,
            Err(e) => {
                mismatches.push(format!("{}: {e}", row.arrangement));
                continue;
            }
        };
        let verdict = is_admissible_with(&arr, h.cond_c).verdict;
        if verdict != row.admissible {
            mismatches.push(format!("{}: recorded admissible = {}, checker says {verdict}", row.arrangement, row.admissible));
        }
        if verdict != enumerated.contains(&row.arrangement) {
            mismatches.push(format!("{}: checker and enumeration disagree", row.arrangement));
        }
        if row.status != Some(RowStatus::Realized) {
            continue;
        }
        let Some(w) = witness_of(row)? else {
            mismatches.push(format!("{}: realized without a witness", row.arrangement));
            continue;
        };
        witnesses += 1;
        let opts = ExtractOptions {
            allow_ambiguity: !w.is_exact(),
            ..ExtractOptions::default()
        };
        let got = extract_with(&w, h.s, &opts).map(|e| e.arrangement.to_string());
        match got {
            Ok(text) if text == row.arrangement => {}
            Ok(text) => mismatches.push(format!("{}: witness now reads {text}", row.arrangement)),
            Err(e) => mismatches.push(format!("{}: witness extraction failed: {e}", row.arrangement)),
        }
    }
    for missing in enumerated.difference(&listed) {
        mismatches.push(format!("{missing}: admissible but not in the catalog"));
    }
    let out = Recheck {
        rows: cat.rows.len(),
        witnesses,
        mismatches,
    };
    let mut t = String::new();
    let _ = writeln!(
        t,
        "re-checked {} rows and {} witnesses of {} (n = {}, s = {}, m = {})",
        out.rows,
        out.witnesses,
        path.display(),
        h.n,
        h.s,
        h.m
    );
    for m in &out.mismatches {
        let _ = writeln!(t, "  mismatch: {m}");
    }
    let _ = writeln!(t, "{} mismatches", out.mismatches.len());
    let code = if out.mismatches.is_empty() { EXIT_OK } else { EXIT_PARTIAL };
    if g.json {
        println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
    } else {
        print!("{t}");
    }
    Ok(code)
}

#[derive(Serialize)]
struct ClosureMember {
    arrangement: String,
    m_prime: u32,
    admissible: bool,
}

fn cmd_closure(g: &Global, cfg: &SolverConfig, text: &str, shape: &ShapeArgs) -> Result<u8, CliError> {
    let beta = parse_arrangement(text, &shape_of(shape)).map_err(params)?;
    let defined = beta.rolle_count() >= 0;
    let members: Vec<ClosureMember> = closure_of(&beta)
        .iter()
        .map(|a| ClosureMember {
            arrangement: a.to_string(),
            m_prime: a.m_prime,
            admissible: defined && is_admissible_with(a, cfg.cond_c).verdict,
        })
        .collect();
    let mut t = String::new();
    for c in &members {
        let tag = if c.admissible { "admissible" } else { "not admissible" };
        let _ = writeln!(t, "{:<36} {tag}", c.arrangement);
    }
    let _ = writeln!(t, "{} members in the closure of {beta}", members.len());
    emit(g, &members, &t)?;
    Ok(EXIT_OK)
}
