//! One function per subcommand, each a thin shell over a library operation.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use perimetry::cutsets::{
    enumerate_cutsets_direct_with, enumerate_cutsets_via_dual_with, peierls_pipeline, series_start, CutsetWindow,
    PathData, DEFAULT_SEARCH_GUARD,
};
use perimetry::dual::DualFile;
use perimetry::embedding::GraphFile;
use perimetry::paths::{check_recursion, PathCountTable, RecursionBoundReport};
use perimetry::percolation::{confront as confront_op, estimate_pc, p_grid, sweep, ConfrontReport, PercolationDomain};
use perimetry::profiles::{HypothesisStatus, ProfileWindow};
use perimetry::{
    dualize as dualize_op, ConstantsProfile, CutsetCensus, DualGraph, Error, Family, PathScope, PcEstimate, PeierlsBound,
    Result, SweepResult, Truncation, VertexId,
};

use crate::output::{csv_document, emit, json_document, opt, read_document, read_file, Format, Manifest};

fn load_graph(path: &Path) -> Result<Truncation> {
    let text = read_file(path)?;
    Truncation::from_file(serde_json::from_str::<GraphFile>(&text)?)
}

fn load_dual(path: &Path) -> Result<DualGraph> {
    let text = read_file(path)?;
    DualGraph::from_file(serde_json::from_str::<DualFile>(&text)?)
}

fn resolve_vertex(trunc: &Truncation, text: &str) -> Result<VertexId> {
    if text == "center" {
        return Ok(trunc.center());
    }
    let v: VertexId = text
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("vertex must be `center` or an id, got `{text}`")))?;
    trunc.emb.check_vertex(v)?;
    Ok(v)
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad list entry `{x}`")))
        })
        .collect()
}

fn csv_unsupported(what: &str) -> Error {
    Error::InvalidParameter(format!("{what} output has no CSV form; use --format json"))
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    #[arg(long)]
    pub family: Family,
    #[arg(long)]
    pub radius: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn generate(a: &GenerateArgs, format: Format) -> Result<()> {
    if format == Format::Csv {
        return Err(csv_unsupported("graph"));
    }
    let trunc = a.family.truncation(a.radius)?;
    let manifest = Manifest::new("generate", a, None, &[], a.out.as_deref());
    let mut file = trunc.to_file();
    file.manifest = Some(manifest.value());
    let mut bytes = Vec::new();
    file.write(&mut bytes)?;
    emit(a.out.as_deref(), &bytes)
}

#[derive(Debug, Args, Serialize)]
pub struct DualizeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn dualize(a: &DualizeArgs, format: Format) -> Result<()> {
    if format == Format::Csv {
        return Err(csv_unsupported("dual"));
    }
    let trunc = load_graph(&a.input)?;
    let dual = dualize_op(&trunc)?;
    let manifest = Manifest::new("dualize", a, None, &[&a.input], a.out.as_deref());
    let mut file = dual.to_file();
    file.manifest = Some(manifest.value());
    let mut bytes = Vec::new();
    file.write(&mut bytes)?;
    emit(a.out.as_deref(), &bytes)
}

#[derive(Debug, Args, Serialize)]
pub struct ProfileArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// `center` or a vertex id.
    #[arg(long, default_value = "center")]
    pub vertex: String,
    #[arg(long)]
    pub r_max: usize,
    #[arg(long)]
    pub s_max: usize,
    /// Certify given constants `K,D,k,epsilon` instead of fitting them.
    #[arg(long)]
    pub constants: Option<String>,
    /// Also certify isoperimetry on every cut-set of size up to this length.
    #[arg(long)]
    pub cut_max: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn profile(a: &ProfileArgs, format: Format) -> Result<()> {
    let trunc = load_graph(&a.input)?;
    let v = resolve_vertex(&trunc, &a.vertex)?;
    let mut prof = match &a.constants {
        None => ConstantsProfile::measure(&trunc, v, a.r_max, a.s_max)?,
        Some(text) => {
            let xs: Vec<f64> = text
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::InvalidParameter(format!("bad constants `{text}`")))?;
            let [kv, d, kb, eps] = xs[..] else {
                return Err(Error::InvalidParameter("--constants takes K,D,k,epsilon".into()));
            };
            let window = ProfileWindow {
                r_max: a.r_max,
                s_max: a.s_max,
                cut_max: 0,
            };
            ConstantsProfile::from_constants(kv, d, kb, eps, window)?.certify(&trunc, v, a.r_max, a.s_max)?
        }
    };
    if let Some(n) = a.cut_max {
        prof.require_hypotheses()?;
        let dual = dualize_op(&trunc)?;
        let census = enumerate_cutsets_via_dual_with(&trunc, &dual, v, n, CutsetWindow::Certified(&prof), DEFAULT_SEARCH_GUARD)?;
        prof.certify_cut_lengths(n, census.extreme_regions())?;
    }
    let manifest = Manifest::new("profile", a, None, &[&a.input], a.out.as_deref());
    let bytes = match format {
        Format::Json => json_document(&manifest, &prof)?,
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = prof
                .tables
                .growth
                .iter()
                .map(|p| vec!["growth".into(), p.radius.to_string(), p.volume.to_string()])
                .collect();
            rows.extend(
                prof.tables
                    .isoperimetry
                    .iter()
                    .map(|p| vec!["isoperimetry".into(), p.size.to_string(), p.boundary.to_string()]),
            );
            rows.extend(
                prof.tables
                    .cuts
                    .iter()
                    .map(|p| vec!["cuts".into(), p.size.to_string(), p.boundary.to_string()]),
            );
            csv_document(&manifest, &["table", "x", "y"], &rows)
        }
    };
    emit(a.out.as_deref(), &bytes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Direct,
    ViaDual,
    /// Run both and require agreement.
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct CutsetsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "center")]
    pub vertex: String,
    #[arg(long)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value = "both")]
    pub method: MethodArg,
    /// Require the margin implied by these certified constants.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Include every cut-set in the output.
    #[arg(long)]
    pub list: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CutsetsOutput {
    pub census: CutsetCensus,
    /// Whether the other method produced the same cut-sets.
    pub cross_checked: bool,
}

pub fn cutsets(a: &CutsetsArgs, format: Format) -> Result<()> {
    let trunc = load_graph(&a.input)?;
    let v = resolve_vertex(&trunc, &a.vertex)?;
    let prof = a.profile.as_deref().map(read_document::<ConstantsProfile>).transpose()?;
    let window = match &prof {
        Some(p) => CutsetWindow::Certified(p),
        None => CutsetWindow::Truncation,
    };
    let direct = || enumerate_cutsets_direct_with(&trunc, v, a.n_max, window, DEFAULT_SEARCH_GUARD);
    let via = || -> Result<CutsetCensus> {
        let dual = dualize_op(&trunc)?;
        enumerate_cutsets_via_dual_with(&trunc, &dual, v, a.n_max, window, DEFAULT_SEARCH_GUARD)
    };
    let (census, cross_checked) = match a.method {
        MethodArg::Direct => (direct()?, false),
        MethodArg::ViaDual => (via()?, false),
        MethodArg::Both => {
            let (x, y) = rayon::join(direct, via);
            let (x, y) = (x?, y?);
            if !x.agrees_with(&y) {
                return Err(Error::Inconsistent(format!(
                    "direct census {:?} differs from dual census {:?}",
                    x.counts, y.counts
                )));
            }
            (x, true)
        }
    };
    let census = if a.list { census } else { census.without_cuts() };
    let manifest = Manifest::new("cutsets", a, None, &[&a.input], a.out.as_deref());
    let bytes = match format {
        Format::Json => json_document(&manifest, &CutsetsOutput { census, cross_checked })?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = census
                .counts
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, c)| vec![n.to_string(), c.to_string()])
                .collect();
            csv_document(&manifest, &["n", "count"], &rows)
        }
    };
    emit(a.out.as_deref(), &bytes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScopeArg {
    /// Avoid the outer face; endpoints on interior faces.
    Interior,
    Whole,
}

#[derive(Debug, Args, Serialize)]
pub struct PathsArgs {
    /// Dual file.
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated path lengths.
    #[arg(long)]
    pub n_list: String,
    #[arg(long, value_enum, default_value = "interior")]
    pub scope: ScopeArg,
    /// Certified constants; checks the doubling inequality at each length.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PathsOutput {
    pub scope: ScopeArg,
    pub table: PathCountTable,
    #[serde(default)]
    pub recursion: Option<RecursionBoundReport>,
}

pub fn paths(a: &PathsArgs, format: Format) -> Result<()> {
    let dual = load_dual(&a.input)?;
    let lengths = parse_list(&a.n_list)?;
    let scope = match a.scope {
        ScopeArg::Interior => PathScope::interior(&dual),
        ScopeArg::Whole => PathScope::whole(&dual),
    };
    let prof = a.profile.as_deref().map(read_document::<ConstantsProfile>).transpose()?;
    let recursion = prof
        .as_ref()
        .map(|p| check_recursion(&dual, p, &lengths, &scope))
        .transpose()?;
    let mut wanted = lengths.clone();
    if recursion.is_some() {
        wanted.extend(lengths.iter().map(|n| 2 * n));
    }
    let table = PathCountTable::compute(&dual, &scope, &wanted)?;
    let mut inputs: Vec<&Path> = vec![&a.input];
    if let Some(p) = &a.profile {
        inputs.push(p);
    }
    let manifest = Manifest::new("paths", a, None, &inputs, a.out.as_deref());
    let bytes = match format {
        Format::Json => json_document(&manifest, &PathsOutput { scope: a.scope, table, recursion })?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = table
                .entries
                .iter()
                .map(|e| {
                    vec![
                        e.n.to_string(),
                        e.value.to_string(),
                        opt(e.pair.map(|p| p.0)),
                        opt(e.pair.map(|p| p.1)),
                    ]
                })
                .collect();
            csv_document(&manifest, &["n", "p", "a", "b"], &rows)
        }
    };
    emit(a.out.as_deref(), &bytes)
}

#[derive(Debug, Args, Serialize)]
pub struct BoundArgs {
    #[arg(long)]
    pub profile: PathBuf,
    /// Output of `paths`, for exact `p(n)` where available.
    #[arg(long)]
    pub paths: Option<PathBuf>,
    /// Output of `cutsets`, checked against the bound.
    #[arg(long)]
    pub census: Option<PathBuf>,
    /// Largest cut-set size tabulated.
    #[arg(long, default_value_t = 16)]
    pub rows: usize,
    /// Explicit iterations of the path-count recursion before the closed-form tail.
    #[arg(long, default_value_t = 40)]
    pub horizon: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BoundOutput {
    pub status: String,
    pub p_star: Option<f64>,
    #[serde(default)]
    pub reason: Option<String>,
    #[serde(default)]
    pub bound: Option<PeierlsBound>,
}

pub fn bound(a: &BoundArgs, format: Format) -> Result<()> {
    let prof: ConstantsProfile = read_document(&a.profile)?;
    let table = a
        .paths
        .as_deref()
        .map(read_document::<PathsOutput>)
        .transpose()?
        .map(|p| p.table);
    let census = a
        .census
        .as_deref()
        .map(read_document::<CutsetsOutput>)
        .transpose()?
        .map(|c| c.census);
    let mut inputs: Vec<&Path> = vec![&a.profile];
    inputs.extend(a.paths.as_deref());
    inputs.extend(a.census.as_deref());
    let manifest = Manifest::new("bound", a, None, &inputs, a.out.as_deref());

    let n0 = series_start(&prof, census.as_ref());
    let paths = PathData {
        table: table.as_ref(),
        constant: None,
    };
    let (out, failure) = match peierls_pipeline(&prof, &paths, census.as_ref(), n0, a.rows, a.horizon) {
        Ok(b) => (
            BoundOutput {
                status: "satisfied".into(),
                p_star: Some(b.p_star),
                reason: None,
                bound: Some(b),
            },
            None,
        ),
        Err(Error::HypothesesFail(msg)) => (
            BoundOutput {
                status: "hypotheses_not_satisfied".into(),
                p_star: None,
                reason: Some(msg.clone()),
                bound: None,
            },
            Some(Error::HypothesesFail(msg)),
        ),
        Err(e) => return Err(e),
    };
    let bytes = match format {
        Format::Json => json_document(&manifest, &out)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = out
                .bound
                .iter()
                .flat_map(|b| &b.rows)
                .map(|r| vec![r.n.to_string(), format!("{:e}", r.bound), opt(r.census), opt(r.holds)])
                .collect();
            csv_document(&manifest, &["n", "bound", "census", "holds"], &rows)
        }
    };
    emit(a.out.as_deref(), &bytes)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

#[derive(Debug, Args, Serialize)]
pub struct PercolateArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Probability grid as `lo:hi:step`.
    #[arg(long, default_value = "0.01:0.99:0.01")]
    pub grid: String,
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Target the sphere at this distance instead of the truncation boundary.
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long, default_value = "center")]
    pub vertex: String,
    #[arg(long, default_value_t = 1000)]
    pub bootstrap: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PercolateOutput {
    pub sweep: SweepResult,
    pub estimate: PcEstimate,
}

pub fn percolate(a: &PercolateArgs, format: Format) -> Result<()> {
    let parts: Vec<f64> = a
        .grid
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidParameter(format!("bad grid `{}`", a.grid)))?;
    let [lo, hi, step] = parts[..] else {
        return Err(Error::InvalidParameter("--grid takes lo:hi:step".into()));
    };
    let grid = p_grid(lo, hi, step)?;
    let trunc = load_graph(&a.input)?;
    let v = resolve_vertex(&trunc, &a.vertex)?;
    let domain = PercolationDomain::new(&trunc, v, a.radius)?;
    let result = sweep(&trunc.emb, &domain, &grid, a.trials, a.seed)?;
    let estimate = estimate_pc(&result, a.bootstrap, a.seed.wrapping_add(1))?;
    let manifest = Manifest::new("percolate", a, Some(a.seed), &[&a.input], a.out.as_deref());
    let bytes = match format {
        Format::Json => json_document(&manifest, &PercolateOutput { sweep: result, estimate })?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = result
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.p.to_string(),
                        r.theta_hat.to_string(),
                        r.ci_lo.to_string(),
                        r.ci_hi.to_string(),
                        r.trials.to_string(),
                    ]
                })
                .collect();
            csv_document(&manifest, &["p", "theta_hat", "ci_lo", "ci_hi", "trials"], &rows)
        }
    };
    emit(a.out.as_deref(), &bytes)
}

#[derive(Debug, Args, Serialize)]
pub struct ConfrontArgs {
    /// Output of `bound`.
    #[arg(long)]
    pub bound: PathBuf,
    /// Output of `percolate`.
    #[arg(long)]
    pub sweep: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn confront(a: &ConfrontArgs, format: Format) -> Result<()> {
    let b: BoundOutput = read_document(&a.bound)?;
    let s: PercolateOutput = read_document(&a.sweep)?;
    if let Some(status) = b.bound.as_ref().map(|x| x.status) {
        if status != HypothesisStatus::Satisfied {
            return Err(Error::HypothesesFail("bound was computed from unsatisfied hypotheses".into()));
        }
    }
    let p_star = match b.p_star {
        Some(p) => Some(p),
        None => {
            return Err(Error::HypothesesFail(
                b.reason.unwrap_or_else(|| "no rigorous threshold for this family".into()),
            ))
        }
    };
    let report: ConfrontReport = confront_op(&s.estimate, p_star)?;
    let manifest = Manifest::new("confront", a, None, &[&a.bound, &a.sweep], a.out.as_deref());
    let bytes = match format {
        Format::Json => json_document(&manifest, &report)?,
        Format::Csv => csv_document(
            &manifest,
            &["pc_lo", "pc_hi", "pc_point", "p_star", "margin", "verdict"],
            &[vec![
                report.pc_interval.0.to_string(),
                report.pc_interval.1.to_string(),
                report.pc_point.to_string(),
                report.p_star.to_string(),
                report.margin.to_string(),
                serde_json::to_value(report.verdict)?.as_str().unwrap_or_default().to_string(),
            ]],
        ),
    };
    emit(a.out.as_deref(), &bytes)
}
