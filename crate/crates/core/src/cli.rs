//! The `chaincalc` command line.
//!
//! Exit status: 0 on success, 1 on invalid input or a failed catalog claim,
//! 2 when a resource cap is hit.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::catalog::{self, Params};
use crate::chains::{analyze, chains_equivalent, kernel_probe, Equivalence, KernelProbe, REPORT_VERSION};
use crate::cosets::Caps;
use crate::error::{ChainError, Result};
use crate::odometer::CosetTree;
use crate::spec::{parse_element, parse_spec, ChainSpecDocument, Overrides};

#[derive(Parser, Debug)]
#[command(name = "chaincalc", version, about = "Exact finite-depth analysis of group chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Analyze the chain of a spec file.
    Analyze {
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a built-in example against its expected invariants; lists the
    /// examples when no name is given.
    Catalog {
        name: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Export the coset tree of a spec's chain.
    Tree {
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Graphviz output instead of the line format.
        #[arg(long)]
        dot: bool,
    },
    /// Probe elements for membership in every level.
    Kernel {
        spec: PathBuf,
        /// Element to probe (word or coordinates); defaults to the spec's kernel list.
        #[arg(long = "element", short = 'e')]
        elements: Vec<String>,
        /// Also probe this many small sample elements.
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Conjugate the chain level-wise by point representatives and re-analyze.
    Conjugate {
        spec: PathBuf,
        /// Representative `g_i` for level `i`; a single value is used at every level.
        #[arg(long = "point", short = 'p', required = true)]
        points: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Levels to analyze (closure depth).
    #[arg(long)]
    pub depth: Option<usize>,
    /// Levels used for stable images.
    #[arg(long)]
    pub probe_depth: Option<usize>,
    #[arg(long, env = "CHAINCALC_COSET_CAP")]
    pub coset_cap: Option<usize>,
    #[arg(long, env = "CHAINCALC_PERM_CAP")]
    pub perm_cap: Option<usize>,
    /// Parameter override `name=value`; repeatable.
    #[arg(long = "set", value_parser = parse_assignment)]
    pub set: Vec<(String, i64)>,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

fn parse_assignment(s: &str) -> std::result::Result<(String, i64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v = v.trim().parse().map_err(|_| format!("`{}` is not an integer", v.trim()))?;
    Ok((k.trim().to_string(), v))
}

impl Common {
    fn params(&self) -> Params {
        self.set.iter().cloned().collect()
    }

    fn overrides(&self) -> Overrides {
        Overrides {
            depth: self.depth,
            probe_depth: self.probe_depth,
            coset_cap: self.coset_cap,
            perm_cap: self.perm_cap,
        }
    }

    fn caps(&self) -> Caps {
        let mut caps = Caps::from_env();
        if let Some(c) = self.coset_cap {
            caps.cosets = c;
        }
        if let Some(c) = self.perm_cap {
            caps.perms = c;
        }
        caps
    }
}

#[derive(Serialize)]
struct ErrorPayload<'a> {
    version: u32,
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    level: Option<usize>,
}

pub fn exit_code(e: &ChainError) -> i32 {
    if e.is_resource() {
        2
    } else {
        1
    }
}

fn error_kind(e: &ChainError) -> &'static str {
    match e {
        ChainError::Structure(_) => "structure",
        ChainError::Validation(_) => "validation",
        ChainError::Resource { .. } => "resource",
        ChainError::Unrepresentable(_) => "unrepresentable",
        ChainError::Precondition(_) => "precondition",
    }
}

/// Machine-readable error object.
pub fn error_json(e: &ChainError) -> String {
    let level = match e {
        ChainError::Resource { level, .. } => *level,
        _ => None,
    };
    let payload = ErrorPayload {
        version: REPORT_VERSION,
        error: ErrorBody {
            kind: error_kind(e),
            message: e.to_string(),
            level,
        },
    };
    serde_json::to_string_pretty(&payload).expect("error serializes") + "\n"
}

/// What a command produced: text for the output and whether it counts as success.
pub struct Outcome {
    pub text: String,
    pub success: bool,
}

fn load(path: &Path, common: &Common) -> Result<ChainSpecDocument> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ChainError::validation(format!("cannot read {}: {e}", path.display())))?;
    let doc = parse_spec(&text).map_err(|e| ChainError::validation(format!("{}: {e}", path.display())))?;
    doc.with_params(&common.params())
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

#[derive(Serialize)]
struct KernelEntry {
    element: String,
    probe: KernelProbe,
}

#[derive(Serialize)]
struct KernelDocument {
    version: u32,
    depth: usize,
    elements: Vec<KernelEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sample_survivors: Option<Vec<String>>,
}

#[derive(Serialize)]
struct ConjugateDocument {
    version: u32,
    points: Vec<String>,
    equivalence_with_original: Equivalence,
    conjugated_kernel: Vec<KernelEntry>,
    report: crate::chains::ChainReport,
}

fn probe_text(p: &KernelProbe) -> String {
    match p {
        KernelProbe::InKernelUpTo(n) => format!("in every level through {n}"),
        KernelProbe::ExitsAt(n) => format!("leaves the chain at level {n}"),
    }
}

/// Run one command; errors are returned for the caller to map to an exit code.
pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Analyze { spec, common } => {
            let doc = load(spec, common)?;
            let (_, report) = doc.analyze(&common.overrides())?;
            let text = match common.format {
                Format::Human => report.to_human(),
                Format::Machine => report.to_json(),
            };
            Ok(Outcome { text, success: true })
        }
        Command::Catalog { name: None, common } => {
            let text = match common.format {
                Format::Machine => json(&catalog::ENTRIES),
                Format::Human => {
                    let mut out = String::new();
                    for e in catalog::ENTRIES {
                        let _ = writeln!(out, "{:<14} {}", e.name, e.summary);
                    }
                    out
                }
            };
            Ok(Outcome { text, success: true })
        }
        Command::Catalog { name: Some(name), common } => {
            let report = catalog::run_regression(name, &common.params(), common.depth, &common.caps())?;
            let text = match common.format {
                Format::Human => report.to_human(),
                Format::Machine => report.to_json(),
            };
            Ok(Outcome {
                text,
                success: report.passed(),
            })
        }
        Command::Tree { spec, common, dot } => {
            let doc = load(spec, common)?;
            let depth = common.depth.unwrap_or_else(|| doc.depth());
            let caps = doc.caps(&common.overrides());
            let chain = doc.build_chain(depth)?;
            let tree = CosetTree::from_chain(&chain, depth, &caps)?;
            let export = tree.export_tree(depth);
            let text = if *dot {
                export.to_dot()
            } else {
                match common.format {
                    Format::Machine => export.to_text(),
                    Format::Human => {
                        let mut out = String::new();
                        let _ = writeln!(
                            out,
                            "coset tree to depth {}: {} vertices, {} edges",
                            export.depth,
                            export.vertices.len(),
                            export.edge_count()
                        );
                        for v in &export.vertices {
                            let mark = if v.on_basepoint_path { "  (basepoint)" } else { "" };
                            let _ = writeln!(out, "{}{} G_{}{}", "  ".repeat(v.level), v.rep_word, v.level, mark);
                        }
                        out
                    }
                }
            };
            Ok(Outcome { text, success: true })
        }
        Command::Kernel {
            spec,
            elements,
            samples,
            common,
        } => {
            let doc = load(spec, common)?;
            let depth = common.depth.unwrap_or_else(|| doc.depth());
            let chain = doc.build_chain(depth)?;
            let ctx = chain.context();
            let gens = if elements.is_empty() {
                doc.kernel_generators(ctx)?
            } else {
                elements
                    .iter()
                    .map(|w| parse_element(ctx, w).map_err(|e| ChainError::validation(format!("element `{w}`: {e}"))))
                    .collect::<Result<Vec<_>>>()?
            };
            let entries = gens
                .iter()
                .map(|g| {
                    Ok(KernelEntry {
                        element: g.to_string(),
                        probe: kernel_probe(&chain, g, depth)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let survivors = match samples {
                Some(n) => {
                    let mut out = Vec::new();
                    for g in catalog::sample_elements(ctx, *n) {
                        if !ctx.is_identity(&g) && kernel_probe(&chain, &g, depth)? == KernelProbe::InKernelUpTo(depth) {
                            out.push(g.to_string());
                        }
                    }
                    Some(out)
                }
                None => None,
            };
            let kdoc = KernelDocument {
                version: REPORT_VERSION,
                depth,
                elements: entries,
                samples: *samples,
                sample_survivors: survivors,
            };
            let text = match common.format {
                Format::Machine => json(&kdoc),
                Format::Human => {
                    let mut out = String::new();
                    let _ = writeln!(out, "kernel probe through level {depth}");
                    for e in &kdoc.elements {
                        let _ = writeln!(out, "  {}: {}", e.element, probe_text(&e.probe));
                    }
                    if let (Some(n), Some(s)) = (kdoc.samples, &kdoc.sample_survivors) {
                        let _ = writeln!(
                            out,
                            "nonidentity survivors among {n} samples: {}",
                            if s.is_empty() { "none".to_string() } else { s.join(", ") }
                        );
                    }
                    out
                }
            };
            Ok(Outcome { text, success: true })
        }
        Command::Conjugate { spec, points, common } => {
            let doc = load(spec, common)?;
            let mut opts = doc.analysis_options(&common.overrides());
            let chain = doc.chain_for(&opts)?;
            let ctx = chain.context().clone();
            let mut reps = points
                .iter()
                .map(|w| parse_element(&ctx, w).map_err(|e| ChainError::validation(format!("point `{w}`: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            if reps.len() == 1 {
                reps = vec![reps[0].clone(); chain.depth()];
            }
            let chain = chain.truncate(reps.len().min(chain.depth()));
            let conj = chain.conjugate(&reps)?;
            let kernel = doc.kernel_generators(&ctx)?;
            // with a constant point g the kernel of the conjugate chain is g K g^-1
            let conj_kernel = if reps.iter().all(|r| *r == reps[0]) {
                kernel.iter().map(|k| ctx.conjugate(&reps[0], k)).collect()
            } else {
                Vec::new()
            };
            let conjugated_kernel = conj_kernel
                .iter()
                .map(|g| {
                    Ok(KernelEntry {
                        element: g.to_string(),
                        probe: kernel_probe(&conj, g, conj.depth())?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let equivalence = chains_equivalent(&chain, &conj, opts.depth)?;
            opts.kernel_generators = (!conj_kernel.is_empty()).then_some(conj_kernel);
            let (report, _, _) = analyze(&conj, &opts)?;
            let cdoc = ConjugateDocument {
                version: REPORT_VERSION,
                points: reps.iter().map(|r| r.to_string()).collect(),
                equivalence_with_original: equivalence,
                conjugated_kernel,
                report,
            };
            let text = match common.format {
                Format::Machine => json(&cdoc),
                Format::Human => {
                    let mut out = String::new();
                    let _ = writeln!(out, "points: {}", cdoc.points.join(", "));
                    let eq = match &cdoc.equivalence_with_original {
                        Equivalence::Equivalent(_) => "equivalent".to_string(),
                        Equivalence::NoWitnessAtDepth { depth, failed_level } => {
                            format!("no interleaving within depth {depth} (fails at level {failed_level})")
                        }
                    };
                    let _ = writeln!(out, "original vs conjugate: {eq}");
                    out.push_str(&cdoc.report.to_human());
                    out
                }
            };
            Ok(Outcome { text, success: true })
        }
    }
}

fn common_of(cmd: &Command) -> &Common {
    match cmd {
        Command::Analyze { common, .. }
        | Command::Catalog { common, .. }
        | Command::Tree { common, .. }
        | Command::Kernel { common, .. }
        | Command::Conjugate { common, .. } => common,
    }
}

/// Parse arguments, run, write output; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let common = common_of(&cli.command);
    match execute(&cli.command) {
        Ok(outcome) => {
            if let Some(path) = &common.out {
                if let Err(e) = std::fs::write(path, &outcome.text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return 1;
                }
            } else {
                print!("{}", outcome.text);
            }
            i32::from(!outcome.success)
        }
        Err(e) => {
            match common.format {
                Format::Machine => print!("{}", error_json(&e)),
                Format::Human => eprintln!("error: {e}"),
            }
            exit_code(&e)
        }
    }
}
