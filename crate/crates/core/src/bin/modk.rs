use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use modk::decomposition;
use modk::factor::{self, PipelineMode, StarDecomposition};
use modk::harness::gen::{Ensemble, GenKind};
use modk::harness::io::{parse_graph, parse_orientation, parse_residues, write_graph, write_orientation};
use modk::harness::probe::{probe_conjecture, ProbeParams};
use modk::harness::suites::{run_suite, SuiteParams, SUITE_IDS};
use modk::lifting::{self, LiftMode};
use modk::orientation::{self, BoundSpec, Bounds, Pin, Regime, SearchConfig, SearchOutcome, SolverConfig};
use modk::{Error, MultiGraph, Orientation, ResidueMap};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "modk", version, about = "Modulo-k orientations, factors and decompositions of multigraphs")]
struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Search node budget.
    #[arg(long, global = true, default_value_t = orientation::DEFAULT_NODE_BUDGET)]
    budget: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Modulus.
    #[arg(long, global = true, default_value_t = 2)]
    k: usize,
    /// Residues: one value for every vertex or a comma-separated list.
    #[arg(long = "mod", global = true, default_value = "0")]
    residues: String,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Verb {
    /// Emit graphs from a generator.
    Gen(GenArgs),
    /// Find a p-orientation.
    Orient {
        graph: String,
        #[arg(long, value_enum, default_value_t = OrientMethod::Edge)]
        method: OrientMethod,
        /// Pin `v:t` requires d+(v) = t.
        #[arg(long)]
        pin: Option<String>,
    },
    /// Compute a factor.
    Factor {
        graph: String,
        #[arg(long, value_enum, default_value_t = FactorKind::Mod2)]
        kind: FactorKind,
        /// Tree-connectivity level for `mod2`.
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Decompose the edge set.
    Decompose {
        graph: String,
        #[arg(long, value_enum, default_value_t = DecomposeKind::TwoTrees)]
        kind: DecomposeKind,
        #[arg(long, default_value_t = 1)]
        m1: usize,
        #[arg(long, default_value_t = 1)]
        m2: usize,
    },
    /// Split a vertex off by admissible lifts.
    Lift {
        graph: String,
        #[arg(long)]
        vertex: usize,
        #[arg(long, value_enum, default_value_t = LiftKind::Lambda)]
        mode: LiftKind,
        /// Connectivity parameter (lambda, m, or n depending on the mode).
        #[arg(long, default_value_t = 2)]
        param: usize,
        /// Second parameter (m' or n') for the parity modes.
        #[arg(long)]
        param2: Option<usize>,
    },
    /// Check an orientation against residues and bounds.
    Verify {
        graph: String,
        orientation: String,
        #[arg(long, value_enum, default_value_t = VerifyBounds::None)]
        bounds: VerifyBounds,
        /// Constant c for `floor-ceil` bounds.
        #[arg(long, default_value_t = 1)]
        slack: usize,
    },
    /// Search an ensemble for counterexamples.
    Probe {
        id: String,
        #[command(flatten)]
        ensemble: GenArgs,
        /// Lower the premise threshold by one.
        #[arg(long)]
        weaken: bool,
    },
    /// Run an acceptance suite (or `all`).
    Suite {
        id: String,
        /// Override the instance count.
        #[arg(long)]
        count: Option<usize>,
    },
}

#[derive(Args, Clone)]
struct GenArgs {
    #[arg(long, value_enum, default_value_t = GenName::Random)]
    generator: GenName,
    #[arg(long, default_value_t = 6)]
    n: usize,
    /// Edge count (random) or number of cycles (hamiltonian).
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Circulant connection set, comma-separated.
    #[arg(long, default_value = "1,2")]
    connections: String,
    /// Cycle length and complete-graph order for `cartesian`.
    #[arg(long, default_value_t = 3)]
    cycle: usize,
    #[arg(long, default_value_t = 3)]
    complete: usize,
    /// Parallel copies of every edge.
    #[arg(long, default_value_t = 1)]
    times: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Declared minimum edge-connectivity.
    #[arg(long, default_value_t = 0)]
    lambda: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenName {
    Random,
    Hamiltonian,
    Circulant,
    Cartesian,
    Complete,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrientMethod {
    Mod2,
    Edge,
    Tree,
    Odd,
    Search,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FactorKind {
    Mod2,
    Connected,
    Eulerian,
    Bipartite,
    Nonbipartite,
    Smoke,
    Stars,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DecomposeKind {
    TwoTrees,
    TreePlusTrees,
    Balanced,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LiftKind {
    Lambda,
    Parity,
    Size,
    Tree,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyBounds {
    None,
    FloorCeil,
    Alpha,
    Tree,
}

/// A failed run: message plus exit code.
struct Exit(u8, String);

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Budget { .. } => EXIT_BUDGET,
            Error::Domain(_) | Error::Parse { .. } | Error::SizeGuard { .. } => EXIT_USAGE,
            _ => EXIT_FAIL,
        };
        Exit(code, e.to_string())
    }
}

type Run = Result<u8, Exit>;

fn read_input(path: &str) -> Result<String, Exit> {
    let mut s = String::new();
    if path == "-" {
        std::io::stdin().read_to_string(&mut s).map_err(|e| Exit(EXIT_USAGE, e.to_string()))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Exit(EXIT_USAGE, format!("{path}: {e}")))
    }
}

fn load_graph(path: &str) -> Result<MultiGraph, Exit> {
    Ok(parse_graph(&read_input(path)?)?)
}

fn residues(cli: &Cli, g: &MultiGraph) -> Result<ResidueMap, Exit> {
    Ok(parse_residues(&cli.residues, cli.k, g.vertex_count())?)
}

fn emit<T: Serialize>(cli: &Cli, text: String, value: &T) {
    match cli.format {
        Format::Text => print!("{text}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(value).expect("serialisable")),
    }
}

fn gen_kind(a: &GenArgs) -> Result<GenKind, Exit> {
    let base = match a.generator {
        GenName::Random => GenKind::Random { n: (a.n, a.n), m: (a.m, a.m) },
        GenName::Hamiltonian => GenKind::HamiltonianUnion { n: a.n, cycles: a.m },
        GenName::Circulant => {
            let connections = a
                .connections
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| Exit(EXIT_USAGE, format!("bad connection {t:?}"))))
                .collect::<Result<_, _>>()?;
            GenKind::Circulant { n: a.n, connections }
        }
        GenName::Cartesian => GenKind::Cartesian { cycle: a.cycle, complete: a.complete },
        GenName::Complete => GenKind::Complete { n: a.n },
    };
    Ok(if a.times > 1 { GenKind::Scaled { base: Box::new(base), times: a.times } } else { base })
}

fn ensemble(cli: &Cli, a: &GenArgs) -> Result<Ensemble, Exit> {
    Ok(Ensemble { kind: gen_kind(a)?, seed: cli.seed, count: a.count, lambda: a.lambda })
}

fn parse_pin(s: &str) -> Result<Pin, Exit> {
    let (v, t) = s.split_once(':').ok_or_else(|| Exit(EXIT_USAGE, "pin must look like v:t".into()))?;
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| Exit(EXIT_USAGE, format!("bad pin {s:?}")));
    Ok(Pin { vertex: num(v)?, target: num(t)? })
}

fn orient(cli: &Cli, g: &MultiGraph, method: OrientMethod, pin: Option<Pin>) -> Run {
    let p = residues(cli, g)?;
    let search = SearchConfig { node_budget: cli.budget, cancel: None };
    let o = match method {
        OrientMethod::Mod2 => {
            let (z0, t) = pin.map_or((0, None), |q| (q.vertex, Some(q.target)));
            orientation::orient_mod2_bounded(g, &p, z0, t)?
        }
        OrientMethod::Search => {
            let spec = BoundSpec::new(Bounds::Unbounded).with_pin(pin);
            let rep = orientation::orient_mod_k_search_with(g, &p, &spec, &Orientation::new(), &search)?;
            match rep.outcome {
                SearchOutcome::Found(o) => o,
                SearchOutcome::Infeasible => return Err(Exit(EXIT_FAIL, "no p-orientation exists".into())),
                _ => return Err(Exit(EXIT_BUDGET, format!("budget exhausted after {} nodes", rep.nodes))),
            }
        }
        _ => {
            let regime = match method {
                OrientMethod::Tree => Regime::Tree2k2,
                OrientMethod::Odd => Regime::OddEdge,
                _ => Regime::Edge3k3,
            };
            let cfg = SolverConfig { search, ..SolverConfig::default() };
            orientation::orient_mod_k_bounded_with(g, &p, regime, pin, &cfg)?.orientation
        }
    };
    let out = o.out_degrees(g);
    emit(cli, write_orientation(g, &o)?, &out);
    Ok(0)
}

fn factor_cmd(cli: &Cli, g: &MultiGraph, kind: FactorKind, m: usize) -> Run {
    let n = g.vertex_count();
    let result = match kind {
        FactorKind::Stars => {
            let cfg = SearchConfig { node_budget: cli.budget, cancel: None };
            return match factor::star_decomposition_with(g, cli.k, &cfg)? {
                StarDecomposition::Stars { stars, centers_certified } => {
                    let mut text = format!("stars {} certified {centers_certified}\n", stars.len());
                    for s in &stars {
                        let ids: Vec<String> = s.edges.iter().map(|e| e.0.to_string()).collect();
                        text.push_str(&format!("star {} {}\n", s.center, ids.join(" ")));
                    }
                    emit(cli, text, &stars);
                    Ok(0)
                }
                StarDecomposition::Infeasible => Err(Exit(EXIT_FAIL, format!("no {}-star decomposition", cli.k))),
            };
        }
        FactorKind::Mod2 => {
            let f = parse_residues(&cli.residues, 2, n)?;
            factor::f_factor_mod2_bounded(g, &f, m, &vec![0; n], None)?
        }
        FactorKind::Connected => factor::connected_f_factor(g, &parse_residues(&cli.residues, 2, n)?)?,
        FactorKind::Eulerian => factor::spanning_eulerian_subgraph(g)?,
        FactorKind::Bipartite => factor::bipartite_f_factor(g, &residues(cli, g)?, Regime::Edge3k3, None)?,
        FactorKind::Nonbipartite => factor::nonbipartite_f_factor(g, &residues(cli, g)?, PipelineMode::Strict)?,
        FactorKind::Smoke => factor::nonbipartite_f_factor(g, &residues(cli, g)?, PipelineMode::Smoke)?,
    };
    let ids: Vec<String> = result.edges.iter().map(|e| e.0.to_string()).collect();
    let degs: Vec<String> = result.degrees.iter().map(|d| d.to_string()).collect();
    let text = format!("factor {}\nedges {}\ndegrees {}\n", result.edges.len(), ids.join(" "), degs.join(" "));
    emit(cli, text, &result);
    Ok(0)
}

fn decompose_cmd(cli: &Cli, g: &MultiGraph, kind: DecomposeKind, m1: usize, m2: usize) -> Run {
    let n = g.vertex_count();
    let line = |name: &str, set: &std::collections::BTreeSet<modk::EdgeId>| {
        let ids: Vec<String> = set.iter().map(|e| e.0.to_string()).collect();
        format!("{name} {}\n", ids.join(" "))
    };
    match kind {
        DecomposeKind::Balanced => {
            let s = factor::balanced_split(g)?;
            emit(cli, format!("{}{}xy {}\n", line("g1", &s.g1), line("g2", &s.g2), s.xy.0), &s);
        }
        DecomposeKind::TwoTrees | DecomposeKind::TreePlusTrees => {
            let mut r1 = vec![0; n];
            let mut r2 = vec![0; n];
            if n > 0 {
                r1[0] = m1;
                r2[0] = m2;
            }
            let (g1, g2) = if kind == DecomposeKind::TwoTrees {
                let d = decomposition::two_tree_connected_factors(g, m1, m2, &r1, &r2)?;
                d.verify(g)?;
                (d.parts[0].clone(), d.parts[1].clone())
            } else {
                let d = decomposition::tree_plus_trees_decomposition(g, m1, m2, &r1, &r2)?;
                (d.g1, d.g2)
            };
            #[derive(Serialize)]
            struct Parts<'a> {
                g1: &'a std::collections::BTreeSet<modk::EdgeId>,
                g2: &'a std::collections::BTreeSet<modk::EdgeId>,
            }
            emit(cli, format!("{}{}", line("g1", &g1), line("g2", &g2)), &Parts { g1: &g1, g2: &g2 });
        }
    }
    Ok(0)
}

fn lift_cmd(cli: &Cli, g: &MultiGraph, u: usize, mode: LiftKind, a: usize, b: Option<usize>) -> Run {
    let graph = match mode {
        LiftKind::Tree => lifting::split_off_tree_connected(g, u, a)?.graph,
        _ => {
            let mode = match mode {
                LiftKind::Lambda => LiftMode::PreserveLambda(a),
                LiftKind::Parity => LiftMode::PreserveParity { m: a, m_prime: b.unwrap_or(a) },
                _ => LiftMode::PreserveSizeParity { n: a, n_prime: b.unwrap_or(a) },
            };
            lifting::split_off_vertex(g, u, mode)?.graph
        }
    };
    emit(cli, write_graph(&graph), &graph.edges().iter().map(|e| (e.u, e.v)).collect::<Vec<_>>());
    Ok(0)
}

fn verify_cmd(cli: &Cli, g: &MultiGraph, o_path: &str, bounds: VerifyBounds, slack: usize) -> Run {
    let o = parse_orientation(&read_input(o_path)?, g)?;
    let p = residues(cli, g)?;
    let bounds = match bounds {
        VerifyBounds::None => Bounds::Unbounded,
        VerifyBounds::FloorCeil => Bounds::FloorCeil(slack),
        VerifyBounds::Alpha => Bounds::Alpha,
        VerifyBounds::Tree => Bounds::Tree,
    };
    let rep = orientation::verify_orientation(g, &o, &p, &BoundSpec::new(bounds));
    let mut text = format!("ok {}\n", rep.ok);
    for v in &rep.violations {
        text.push_str(&format!("violation {v}\n"));
    }
    emit(cli, text, &rep);
    Ok(if rep.ok { 0 } else { EXIT_FAIL })
}

fn run(cli: &Cli) -> Run {
    match &cli.verb {
        Verb::Gen(a) => {
            let graphs = ensemble(cli, a)?.generate()?;
            let text = graphs.iter().map(write_graph).collect::<Vec<_>>().join("\n");
            let json: Vec<Vec<(usize, usize)>> =
                graphs.iter().map(|g| g.edges().iter().map(|e| (e.u, e.v)).collect()).collect();
            emit(cli, text, &json);
            Ok(0)
        }
        Verb::Orient { graph, method, pin } => {
            let g = load_graph(graph)?;
            let pin = pin.as_deref().map(parse_pin).transpose()?;
            orient(cli, &g, *method, pin)
        }
        Verb::Factor { graph, kind, m } => factor_cmd(cli, &load_graph(graph)?, *kind, *m),
        Verb::Decompose { graph, kind, m1, m2 } => decompose_cmd(cli, &load_graph(graph)?, *kind, *m1, *m2),
        Verb::Lift { graph, vertex, mode, param, param2 } => {
            lift_cmd(cli, &load_graph(graph)?, *vertex, *mode, *param, *param2)
        }
        Verb::Verify { graph, orientation, bounds, slack } => {
            verify_cmd(cli, &load_graph(graph)?, orientation, *bounds, *slack)
        }
        Verb::Probe { id, ensemble: a, weaken } => {
            let params = ProbeParams { k: cli.k, budget: cli.budget, weaken: *weaken, ..ProbeParams::default() };
            let r = probe_conjecture(id, &ensemble(cli, a)?, &params)?;
            emit(cli, r.to_text(), &r);
            Ok(if !r.counterexamples.is_empty() {
                EXIT_FAIL
            } else if r.budget_exhausted {
                EXIT_BUDGET
            } else {
                0
            })
        }
        Verb::Suite { id, count } => {
            let ids: Vec<&str> = if id == "all" { SUITE_IDS.to_vec() } else { vec![id.as_str()] };
            let params = SuiteParams { count: *count };
            let mut code = 0;
            for id in ids {
                let r = run_suite(id, cli.seed, &params)?;
                emit(cli, r.to_text(), &r);
                if !r.ok() {
                    code = EXIT_FAIL;
                }
            }
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, msg)) => {
            eprintln!("modk: {msg}");
            ExitCode::from(code)
        }
    }
}
