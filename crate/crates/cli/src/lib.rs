//! Command-line front end. [`run`] does all the work so that tests can call
//! it in-process; `main` only wires it to the real streams.

use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use tinhofer_core::gadgets::{self, ConstZeroWiring, HardnessOptions};
use tinhofer_core::graph::{self, ColoredGraph, VertexSet};
use tinhofer_core::groups::{self, SearchLimits};
use tinhofer_core::hierarchy::{self, OperationalOptions};
use tinhofer_core::refinement::{self, Engine};
use tinhofer_core::tinhofer::{self, CellSelector, ChoicePolicy, FptOptions, Verdict};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Graph { path: String, source: graph::GraphError },
    #[error("{path}: {source}")]
    Circuit {
        path: String,
        source: gadgets::CircuitError,
    },
    #[error("{path}: {source}")]
    Transcript {
        path: String,
        source: tinhofer::TinhoferError,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Gadget(#[from] gadgets::GadgetError),
    #[error(transparent)]
    Group(#[from] groups::GroupError),
    #[error(transparent)]
    Tinhofer(#[from] tinhofer::TinhoferError),
    #[error(transparent)]
    Hierarchy(#[from] hierarchy::HierarchyError),
}

#[derive(Debug, Parser)]
#[command(name = "tinhofer", version, about = "Color refinement and the k-Tinhofer hierarchy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EngineArg {
    Worklist,
    Naive,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum IsoMethod {
    Tinhofer,
    Fpt,
    Exact,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KtinMethod {
    Op,
    Alg,
    Irtree,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SelectorArg {
    MinColor,
    MaxSize,
    First,
}

impl From<SelectorArg> for CellSelector {
    fn from(s: SelectorArg) -> Self {
        match s {
            SelectorArg::MinColor => CellSelector::MinColor,
            SelectorArg::MaxSize => CellSelector::MaxSize,
            SelectorArg::First => CellSelector::First,
        }
    }
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Largest graph the exhaustive searches accept.
    #[arg(long, default_value_t = 64)]
    max_vertices: usize,
}

impl SearchArgs {
    fn limits(&self) -> SearchLimits {
        SearchLimits {
            max_vertices: self.max_vertices,
            ..SearchLimits::default()
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the stable coloring as `v <vertex> <color>` lines.
    Refine {
        file: String,
        #[arg(long, value_enum, default_value = "worklist")]
        engine: EngineArg,
    },
    /// Print the quotient graph of the stable coloring.
    Quotient { file: String },
    /// Test two graphs for isomorphism.
    Iso {
        g: String,
        h: String,
        #[arg(long, value_enum, default_value = "tinhofer")]
        method: IsoMethod,
        #[arg(long, value_enum, default_value = "min-color")]
        selector: SelectorArg,
        /// first, random, or scripted:<transcript file>
        #[arg(long, default_value = "first")]
        policy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// List automorphisms in cycle notation.
    Aut {
        file: String,
        /// Vertices (1-based, comma-separated) to fix pointwise.
        #[arg(long, value_delimiter = ',')]
        fix: Vec<usize>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Print automorphism orbits, one per line.
    Orbits {
        file: String,
        #[arg(long, value_delimiter = ',')]
        fix: Vec<usize>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Decide k-Tinhofer membership.
    Ktin {
        file: String,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "op")]
        method: KtinMethod,
        #[arg(long, value_enum, default_value = "min-color")]
        selector: SelectorArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict choices to one vertex per automorphism orbit.
        #[arg(long)]
        prune: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Discreteness, refinability, threshold and deficiency.
    Classify {
        file: String,
        #[arg(long)]
        prune: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Tinhofer threshold and deficiency.
    Deficiency {
        file: String,
        #[arg(long)]
        prune: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Export the IR-tree as DOT.
    Irtree {
        file: String,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, value_enum, default_value = "min-color")]
        selector: SelectorArg,
    },
    /// Generate a graph in cgraph format.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        /// Also write the pair labels to this file.
        #[arg(long, global = true)]
        sidecar: Option<PathBuf>,
    },
    /// Evaluate a monotone circuit.
    CircuitEval { file: String },
}

#[derive(Debug, Subcommand)]
enum GenKind {
    Cfi {
        k: usize,
    },
    Imp {
        k: usize,
    },
    Sep {
        k: usize,
    },
    Hard {
        circuit: String,
        k: usize,
        #[arg(long)]
        per_gate_pm: bool,
        /// Join P_m to CONST0 pairs a-to-a and b-to-b instead of completely.
        #[arg(long)]
        matched: bool,
    },
    Builtin {
        name: String,
        params: Vec<usize>,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Ctx<'a> {
    stdin: &'a mut dyn Read,
    stdin_used: bool,
}

impl Ctx<'_> {
    fn read(&mut self, path: &str) -> Result<Vec<u8>, CliError> {
        if path == "-" {
            if self.stdin_used {
                return Err(CliError::Usage("standard input can be read only once".into()));
            }
            self.stdin_used = true;
            let mut buf = Vec::new();
            self.stdin.read_to_end(&mut buf).map_err(|source| CliError::Io {
                path: path.into(),
                source,
            })?;
            Ok(buf)
        } else {
            std::fs::read(path).map_err(|source| CliError::Io {
                path: path.into(),
                source,
            })
        }
    }

    fn graph(&mut self, path: &str) -> Result<ColoredGraph, CliError> {
        let bytes = self.read(path)?;
        graph::parse_graph(&bytes).map_err(|source| CliError::Graph {
            path: path.into(),
            source,
        })
    }

    fn text(&mut self, path: &str) -> Result<String, CliError> {
        String::from_utf8(self.read(path)?).map_err(|_| CliError::Usage(format!("{path}: not valid UTF-8")))
    }
}

fn fixed_set(g: &ColoredGraph, fix: &[usize]) -> Result<VertexSet, CliError> {
    for &v in fix {
        if v == 0 || v > g.n() {
            return Err(CliError::Usage(format!("vertex {v} out of range 1..={}", g.n())));
        }
    }
    Ok(fix.iter().map(|v| v - 1).collect())
}

fn seq_text(seq: &[usize]) -> String {
    seq.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(",")
}

fn ops(prune: bool, search: &SearchArgs) -> OperationalOptions {
    OperationalOptions {
        symmetry_pruning: prune,
        limits: search.limits(),
        ..OperationalOptions::default()
    }
}

fn verdict_code(positive: bool) -> i32 {
    if positive {
        0
    } else {
        1
    }
}

fn policies(ctx: &mut Ctx, policy: &str, seed: u64) -> Result<(ChoicePolicy, ChoicePolicy), CliError> {
    match policy {
        "first" => Ok((ChoicePolicy::FirstVertex, ChoicePolicy::FirstVertex)),
        "random" => Ok((
            ChoicePolicy::SeededRandom(seed),
            ChoicePolicy::SeededRandom(seed.wrapping_add(1)),
        )),
        _ => {
            let Some(path) = policy.strip_prefix("scripted:") else {
                return Err(CliError::Usage(format!(
                    "unknown policy `{policy}` (first, random, scripted:<file>)"
                )));
            };
            // accept a saved `iso` output: only the step lines matter
            let text: String = ctx
                .text(path)?
                .lines()
                .filter(|l| l.starts_with("step "))
                .map(|l| format!("{l}\n"))
                .collect();
            let (g, h) = tinhofer::parse_transcript(&text).map_err(|source| CliError::Transcript {
                path: path.into(),
                source,
            })?;
            Ok((ChoicePolicy::Scripted(g), ChoicePolicy::Scripted(h)))
        }
    }
}

fn print_map(out: &mut String, map: &[usize]) {
    for (u, v) in map.iter().enumerate() {
        let _ = writeln!(out, "map {} {}", u + 1, v + 1);
    }
}

fn execute(cmd: Command, ctx: &mut Ctx) -> Result<(i32, String), CliError> {
    let mut out = String::new();
    let code = match cmd {
        Command::Refine { file, engine } => {
            let g = ctx.graph(&file)?;
            let engine = match engine {
                EngineArg::Worklist => Engine::Worklist,
                EngineArg::Naive => Engine::Naive,
            };
            let pi = refinement::refine_with(&g, g.colors(), engine);
            out.push_str(&pi.dump());
            verdict_code(pi.is_discrete())
        }
        Command::Quotient { file } => {
            let g = ctx.graph(&file)?;
            let q = refinement::quotient(&g, &refinement::refine(&g)).expect("refinement output is stable");
            out.push_str(&q.dump());
            0
        }
        Command::Iso {
            g,
            h,
            method,
            selector,
            policy,
            seed,
            budget,
            search,
        } => {
            let g = ctx.graph(&g)?;
            let h = ctx.graph(&h)?;
            let (pol_g, pol_h) = policies(ctx, &policy, seed)?;
            let verdict = match method {
                IsoMethod::Exact => match groups::exact_iso_with(&g, &h, &search.limits())? {
                    Some(map) => Verdict::Isomorphic(map),
                    None => Verdict::NotIsomorphic,
                },
                IsoMethod::Fpt => {
                    let budget =
                        budget.ok_or_else(|| CliError::Usage("--budget is required with --method fpt".into()))?;
                    let opts = FptOptions {
                        selector: selector.into(),
                        pol_g,
                        pol_h,
                    };
                    tinhofer::fpt_iso_with(&g, &h, budget, &opts)?
                }
                IsoMethod::Tinhofer => {
                    let (verdict, transcript) = tinhofer::tinhofer_iso(&g, &h, selector.into(), &pol_g, &pol_h)?;
                    for line in transcript.to_text().lines().filter(|l| l.starts_with("step ")) {
                        out.push_str(line);
                        out.push('\n');
                    }
                    verdict
                }
            };
            let _ = writeln!(out, "isomorphic {}", verdict.is_isomorphic());
            if let Verdict::Isomorphic(map) = &verdict {
                print_map(&mut out, map);
            }
            verdict_code(verdict.is_isomorphic())
        }
        Command::Aut { file, fix, search } => {
            let g = ctx.graph(&file)?;
            let fixed = fixed_set(&g, &fix)?;
            let auts = groups::automorphisms_with(&g, &fixed, &search.limits())?;
            for p in auts.perms() {
                let _ = writeln!(out, "{}", p.cycle_notation());
            }
            0
        }
        Command::Orbits { file, fix, search } => {
            let g = ctx.graph(&file)?;
            let fixed = fixed_set(&g, &fix)?;
            let orbits = groups::stabilizer_orbits(&g, &fixed, &search.limits())?;
            for class in &orbits.classes {
                let _ = writeln!(
                    out,
                    "{}",
                    class.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(" ")
                );
            }
            0
        }
        Command::Ktin {
            file,
            k,
            method,
            selector,
            seed,
            prune,
            search,
        } => {
            let g = ctx.graph(&file)?;
            let verdict = match method {
                KtinMethod::Op => hierarchy::is_k_tinhofer_operational_with(&g, k, &ops(prune, &search))?,
                KtinMethod::Alg => hierarchy::is_k_tinhofer_algebraic_with(&g, k, &search.limits())?,
                KtinMethod::Irtree => hierarchy::is_k_tinhofer_irtree(&g, k, selector.into(), seed)?,
            };
            let _ = writeln!(out, "member {}", verdict.member);
            if let Some(w) = &verdict.witness {
                let _ = writeln!(out, "witness g={} h={}", seq_text(&w.g_seq), seq_text(&w.h_seq));
            }
            verdict_code(verdict.member)
        }
        Command::Classify { file, prune, search } => {
            let g = ctx.graph(&file)?;
            let r = hierarchy::classify_with(&g, &ops(prune, &search))?;
            let _ = writeln!(out, "n {}", r.n);
            let _ = writeln!(out, "discrete {}", r.is_discrete);
            let _ = writeln!(out, "refinable {}", r.is_refinable);
            let _ = writeln!(out, "threshold {}", r.threshold);
            let _ = writeln!(out, "deficiency {}", deficiency_text(r.deficiency));
            let _ = writeln!(out, "tinhofer {}", r.is_tinhofer);
            0
        }
        Command::Deficiency { file, prune, search } => {
            let g = ctx.graph(&file)?;
            let threshold = hierarchy::tinhofer_threshold_with(&g, &ops(prune, &search))?;
            let n = g.n();
            let deficiency = (threshold < n).then(|| n - 1 - threshold);
            let _ = writeln!(out, "threshold {threshold}");
            let _ = writeln!(out, "deficiency {}", deficiency_text(deficiency));
            0
        }
        Command::Irtree { file, depth, selector } => {
            let g = ctx.graph(&file)?;
            let tree = tinhofer::build_ir_tree(&g, selector.into(), depth)?;
            out.push_str(&tinhofer::export_dot(&tree));
            0
        }
        Command::Gen { kind, sidecar } => {
            let (g, pairs) = match kind {
                GenKind::Cfi { k } => gadgets::gen_cfi(k)?,
                GenKind::Imp { k } => gadgets::gen_imp(k)?,
                GenKind::Sep { k } => gadgets::gen_separator(k)?,
                GenKind::Hard {
                    circuit,
                    k,
                    per_gate_pm,
                    matched,
                } => {
                    let c = parse_circuit_file(ctx, &circuit)?;
                    let opts = HardnessOptions {
                        per_gate_pm,
                        wiring: if matched {
                            ConstZeroWiring::Matched
                        } else {
                            ConstZeroWiring::Complete
                        },
                    };
                    gadgets::gen_hardness(&c, k, &opts)?
                }
                GenKind::Builtin { name, params } => {
                    let g = graph::builtin(&name, &params).map_err(|source| CliError::Graph {
                        path: "builtin".into(),
                        source,
                    })?;
                    (g, gadgets::PairMap::default())
                }
            };
            if let Some(path) = sidecar {
                std::fs::write(&path, pairs.sidecar()).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
            }
            out.push_str(&g.to_cgraph());
            0
        }
        Command::CircuitEval { file } => {
            let c = parse_circuit_file(ctx, &file)?;
            let value = gadgets::eval_circuit(&c);
            let _ = writeln!(out, "value {}", u8::from(value));
            verdict_code(value)
        }
    };
    Ok((code, out))
}

fn parse_circuit_file(ctx: &mut Ctx, path: &str) -> Result<gadgets::Circuit, CliError> {
    let text = ctx.text(path)?;
    gadgets::parse_circuit(&text).map_err(|source| CliError::Circuit {
        path: path.into(),
        source,
    })
}

fn deficiency_text(d: Option<usize>) -> String {
    d.map_or_else(|| "none".to_string(), |d| d.to_string())
}

/// Runs one invocation; `args[0]` is the program name.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Output {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut ctx = Ctx {
        stdin,
        stdin_used: false,
    };
    match execute(cli.command, &mut ctx) {
        Ok((code, stdout)) => Output {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Output {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
