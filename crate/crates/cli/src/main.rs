use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ddeg_core::anticonc::{atom_probability_dp, atom_probability_mc, AtomDistribution, Binning};
use ddeg_core::control::{
    assemble_from_blowup, build_control_greedy, distinct_from_control, phi, theorem3_check, AssemblyParams,
    ControlGraphWitness, Theorem3Outcome, Theorem3Params,
};
use ddeg_core::generators::{blowup, blowup_parts, erdos_renyi, perturb, turan};
use ddeg_core::oracle::{exact_f, exact_hom, exact_max_diverse, verify_control_graph};
use ddeg_core::pipeline::{run_pipeline, PipelineParams, DEFAULT_RETRIES};
use ddeg_core::structure::{audit_similarity_partition, coarse_partition, refine_to_blowup, StructureParams};
use ddeg_core::{BlowupPattern, Fraction, Graph, VertexSet};
use ddeg_cli::experiments::{control_sweep, scaling, soundness, structure_sweep};
use ddeg_cli::records::{summarize, write_csv};
use ddeg_cli::witness::{verify, DistinctWitness, HomogeneousWitness, PerturbationWitness, WitnessKind};
use ddeg_cli::dimacs;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "ddeg", version, about = "Distinct degrees in induced subgraphs")]
struct Cli {
    /// Master seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for sweeps; output does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Compact single-line JSON instead of pretty-printed.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph in DIMACS form.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Largest number of distinct degrees in an induced subgraph.
    ExactF(GraphArg),
    /// Largest clique or independent set.
    ExactHom(GraphArg),
    /// Largest set with pairwise neighbourhood difference at least delta·N.
    MaxDiverse {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        delta: Fraction,
    },
    /// Largest atom of a weighted sum of independent Bernoulli variables.
    Anticonc {
        /// Whitespace-separated weights (integers for --dp).
        #[arg(long)]
        weights: PathBuf,
        /// Whitespace-separated probabilities in [0.1, 0.9].
        #[arg(long)]
        probs: PathBuf,
        #[arg(long, conflicts_with = "mc")]
        dp: bool,
        /// Monte-Carlo estimate from this many trials.
        #[arg(long)]
        mc: Option<usize>,
        /// Bin width for Monte-Carlo sums; exact sums when omitted.
        #[arg(long, requires = "mc")]
        bin_width: Option<f64>,
    },
    /// Probability-vector pipeline for many distinct degrees.
    Pipeline {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        delta: Fraction,
        #[arg(long, default_value_t = DEFAULT_RETRIES)]
        retries: u32,
        /// Size of the diverse set before shrinking.
        #[arg(long)]
        u_target: Option<usize>,
        #[arg(long)]
        emit_witness: Option<PathBuf>,
    },
    /// Similarity partition and optional refinement to a blowup.
    Structure {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        threshold: usize,
        #[arg(long)]
        refine: bool,
        /// Parts smaller than this go to the exceptional set.
        #[arg(long = "T", default_value_t = 1)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        delta: usize,
        /// Within-part similarity bound; the measured one when omitted.
        #[arg(long)]
        d1: Option<usize>,
        #[arg(long)]
        d2: Option<usize>,
        #[arg(long)]
        paper_faithful: bool,
        /// Trials of the random-subset audit of the partition.
        #[arg(long, default_value_t = 0)]
        audit: u32,
    },
    /// Control graphs.
    Control {
        #[command(subcommand)]
        action: ControlAction,
    },
    /// Pipeline scaling sweep on G(N, 1/2).
    Scaling {
        /// Comma-separated sizes, each at least 64.
        #[arg(long, value_delimiter = ',', required = true)]
        ns: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value = "1/5")]
        delta: Fraction,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Summary JSON destination; stdout when omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Record wall-clock time per row (output is then not reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Seeded verification sweeps.
    Sweep {
        #[command(subcommand)]
        kind: SweepKind,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Re-check a witness file against a graph.
    Verify {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, value_enum)]
        kind: WitnessKind,
        #[arg(long)]
        witness: PathBuf,
    },
}

#[derive(Args)]
struct GraphArg {
    /// Graph in DIMACS form.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Subcommand)]
enum GenKind {
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Fraction,
    },
    Turan {
        #[arg(long)]
        parts: usize,
        #[arg(long)]
        size: usize,
    },
    Blowup {
        /// Rows separated by ';', e.g. "01;10".
        #[arg(long)]
        pattern: BlowupPattern,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
    },
    PerturbedBlowup {
        #[arg(long)]
        pattern: BlowupPattern,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long)]
        delta: usize,
    },
}

#[derive(Args)]
struct ControlOpts {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    paper_faithful: bool,
}

#[derive(Subcommand)]
enum ControlAction {
    /// Greedy control graph in a graph whose vertices have few neighbours.
    Build {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        opts: ControlOpts,
        #[arg(long)]
        delta: usize,
        /// Vertices of U (0-based, comma-separated); W is the rest.
        #[arg(long, value_delimiter = ',')]
        u: Vec<usize>,
    },
    /// Distinct degrees from a control-graph witness.
    Extract {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        witness: PathBuf,
        #[arg(long, default_value_t = 20)]
        retries: u32,
    },
    /// Partition, refine and assemble a control graph across the parts.
    Assemble {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        opts: ControlOpts,
        #[command(flatten)]
        stages: StageOpts,
    },
    /// Look for hom(G) >= n or f(G) >= k.
    Theorem3 {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        opts: ControlOpts,
        #[command(flatten)]
        stages: StageOpts,
        #[arg(long, default_value_t = 20)]
        retries: u32,
    },
}

#[derive(Args)]
struct StageOpts {
    #[arg(long, default_value_t = 8)]
    threshold: usize,
    #[arg(long, default_value_t = 2)]
    delta: usize,
    #[arg(long = "T", default_value_t = 4)]
    t: usize,
}

#[derive(Subcommand)]
enum SweepKind {
    /// Pipeline against the exact oracle on small random graphs.
    Soundness {
        #[arg(long, default_value_t = 500)]
        graphs: usize,
        #[arg(long, default_value_t = 18)]
        max_n: usize,
        #[arg(long, default_value = "1/5")]
        delta: Fraction,
    },
    /// Blowup round trips through partition and refinement.
    Structure {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 5)]
        max_parts: usize,
        #[arg(long, default_value_t = 40)]
        part_size: usize,
        #[arg(long, default_value_t = 3)]
        max_delta0: usize,
        #[arg(long = "T", default_value_t = 20)]
        t: usize,
    },
    /// Greedy control graphs followed by prefix extraction.
    Control {
        #[arg(long, default_value_t = 200)]
        witnesses: usize,
        #[arg(long, default_value_t = 4)]
        max_k: usize,
        #[arg(long, default_value_t = 20)]
        retries: u32,
    },
}

enum Failure {
    /// Exit 1: a witness or a run did not check out.
    Verification(Value),
    /// Exit 2.
    Usage(String),
    /// Exit 3.
    Io(String),
}

type Outcome = Result<(), Failure>;

struct Ctx {
    seed: u64,
    jobs: usize,
    compact: bool,
}

impl Ctx {
    fn render<T: Serialize>(&self, value: &T) -> String {
        let mut s = if self.compact {
            serde_json::to_string(value).expect("serializable")
        } else {
            serde_json::to_string_pretty(value).expect("serializable")
        };
        s.push('\n');
        s
    }

    fn emit<T: Serialize>(&self, value: &T) -> Outcome {
        write_out(None, &self.render(value))
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Io(format!("stdout: {e}"))),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    let mut s = String::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut s))
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(s)
}

fn load(arg: &GraphArg) -> Result<Graph, Failure> {
    dimacs::read(&arg.input).map_err(|e| match e {
        dimacs::DimacsError::Io { .. } => Failure::Io(e.to_string()),
        other => Failure::Usage(other.to_string()),
    })
}

fn failed(reason: &str, detail: impl ToString) -> Failure {
    Failure::Verification(json!({"reason": reason, "detail": detail.to_string()}))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx { seed: cli.seed, jobs: cli.jobs, compact: cli.json };
    match run(&ctx, cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(reason)) => {
            print!("{}", ctx.render(&json!({"ok": false, "error": reason})));
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(ctx: &Ctx, command: Command) -> Outcome {
    match command {
        Command::Gen { kind, out } => cmd_gen(ctx, kind, out.as_deref()),
        Command::ExactF(arg) => {
            let g = load(&arg)?;
            let w = exact_f(&g).map_err(|e| Failure::Usage(e.to_string()))?;
            ctx.emit(&json!({"value": w.distinct_count, "witness": w.subset.to_vec()}))
        }
        Command::ExactHom(arg) => {
            let g = load(&arg)?;
            let w = exact_hom(&g).map_err(|e| Failure::Usage(e.to_string()))?;
            ctx.emit(&json!({"value": w.size(), "kind": w.kind, "witness": w.subset.to_vec()}))
        }
        Command::MaxDiverse { graph, delta } => {
            let g = load(&graph)?;
            let s = exact_max_diverse(&g, delta).map_err(|e| Failure::Usage(e.to_string()))?;
            ctx.emit(&json!({"value": s.len(), "witness": s.to_vec()}))
        }
        Command::Anticonc { weights, probs, dp: _, mc, bin_width } => {
            cmd_anticonc(ctx, &weights, &probs, mc, bin_width)
        }
        Command::Pipeline { graph, delta, retries, u_target, emit_witness } => {
            let g = load(&graph)?;
            let params = PipelineParams { retries, u_target, ..PipelineParams::new(delta, ctx.seed) };
            let out = run_pipeline(&g, &params).map_err(|e| failed("pipeline_failed", e))?;
            let witness = DistinctWitness { subset: out.subset.to_vec(), distinct_count: out.distinct_count };
            if let Some(path) = emit_witness {
                write_out(Some(&path), &ctx.render(&witness))?;
            }
            ctx.emit(&json!({
                "subset": witness.subset,
                "distinct_count": out.distinct_count,
                "distinct_set": out.distinct_set.to_vec(),
                "retries_used": out.record.retries_used,
                "record": out.record,
            }))
        }
        Command::Structure { graph, threshold, refine, t, delta, d1, d2, paper_faithful, audit } => {
            let g = load(&graph)?;
            let sp = coarse_partition(&g, threshold).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut report = json!({
                "parts": sp.parts.iter().map(VertexSet::to_vec).collect::<Vec<_>>(),
                "centers": sp.centers,
                "certificates": {"threshold": sp.threshold, "within_part_bound": sp.bound},
            });
            if audit > 0 {
                let a = audit_similarity_partition(&g, &sp, audit, ctx.seed);
                report["audit"] = json!({
                    "trials": a.trials,
                    "centers": a.centers,
                    "mean_collisions": a.mean_collisions,
                    "max_collisions": a.max_collisions,
                    "best_distinct": a.best_distinct,
                });
            }
            if refine {
                let d1 = d1.unwrap_or(sp.bound);
                let params = if paper_faithful {
                    StructureParams { d2, ..StructureParams::paper_faithful(d1, sp.parts.len()) }
                } else {
                    StructureParams { d1, d2, delta, t, paper_faithful: false }
                };
                let r = refine_to_blowup(&g, &sp, &params).map_err(|e| failed("structure_failure", e))?;
                let bd = &r.description;
                report["parts"] = json!(bd.parts.iter().map(VertexSet::to_vec).collect::<Vec<_>>());
                report["centers"] = json!(bd.centers);
                report["pattern"] = json!(bd.pattern.to_string());
                report["R"] = json!(bd.exceptional.to_vec());
                report["certificates"] = json!({
                    "threshold": sp.threshold,
                    "coarse_parts": sp.parts.len(),
                    "d1": params.d1,
                    "d2": r.d2,
                    "delta": params.delta,
                    "T": params.t,
                    "merges": r.merges,
                    "diameter": r.diameter,
                    "merged_bound": r.merged_bound,
                    "perturbation_verified": true,
                    "nondegenerate_verified": true,
                });
                report["witness"] = serde_json::to_value(PerturbationWitness::from_description(bd)).expect("serializable");
            }
            ctx.emit(&report)
        }
        Command::Control { action } => cmd_control(ctx, action),
        Command::Scaling { ns, trials, delta, csv, summary, timing } => {
            if let Some(&small) = ns.iter().find(|&&n| n < 64) {
                return Err(Failure::Usage(format!("N = {small} is below 64")));
            }
            if trials == 0 {
                return Err(Failure::Usage("trials must be at least 1".into()));
            }
            let rows = scaling(&ns, trials, delta, ctx.seed, ctx.jobs, timing);
            let mut buf = Vec::new();
            write_csv(&mut buf, &rows).map_err(|e| Failure::Io(e.to_string()))?;
            write_out(csv.as_deref(), &String::from_utf8(buf).expect("utf-8 csv"))?;
            write_out(summary.as_deref(), &ctx.render(&summarize(&rows)))
        }
        Command::Sweep { kind, out } => {
            let text = match kind {
                SweepKind::Soundness { graphs, max_n, delta } => {
                    if !(2..=24).contains(&max_n) {
                        return Err(Failure::Usage("max-n must be in 2..=24".into()));
                    }
                    ctx.render(&soundness(graphs, max_n, delta, ctx.seed, ctx.jobs))
                }
                SweepKind::Structure { instances, max_parts, part_size, max_delta0, t } => {
                    if max_parts == 0 {
                        return Err(Failure::Usage("max-parts must be at least 1".into()));
                    }
                    ctx.render(&structure_sweep(instances, max_parts, part_size, max_delta0, t, ctx.seed, ctx.jobs))
                }
                SweepKind::Control { witnesses, max_k, retries } => {
                    if max_k == 0 {
                        return Err(Failure::Usage("max-k must be at least 1".into()));
                    }
                    ctx.render(&control_sweep(witnesses, max_k, retries, ctx.seed, ctx.jobs))
                }
            };
            write_out(out.as_deref(), &text)
        }
        Command::Verify { graph, kind, witness } => {
            let g = load(&graph)?;
            let text = read_text(&witness)?;
            let cert = verify(&g, kind, &text).map_err(Failure::Verification)?;
            ctx.emit(&json!({"ok": true, "certificate": cert}))
        }
    }
}

fn cmd_gen(ctx: &Ctx, kind: GenKind, out: Option<&Path>) -> Outcome {
    let usage = |e: ddeg_core::GraphError| Failure::Usage(e.to_string());
    let g = match kind {
        GenKind::Gnp { n, p } => {
            if !p.is_probability() {
                return Err(Failure::Usage(format!("p = {p} is not a probability")));
            }
            erdos_renyi(n, p, ctx.seed)
        }
        GenKind::Turan { parts, size } => turan(parts, size),
        GenKind::Blowup { pattern, sizes } => blowup(&pattern, &sizes).map_err(usage)?,
        GenKind::PerturbedBlowup { pattern, sizes, delta } => {
            let base = blowup(&pattern, &sizes).map_err(usage)?;
            perturb(&base, &blowup_parts(&sizes), delta, ctx.seed)
        }
    };
    write_out(out, &dimacs::render(&g))
}

fn numbers(path: &Path) -> Result<Vec<String>, Failure> {
    Ok(read_text(path)?.split_whitespace().map(str::to_owned).collect())
}

fn cmd_anticonc(ctx: &Ctx, weights: &Path, probs: &Path, mc: Option<usize>, bin_width: Option<f64>) -> Outcome {
    let parse_f = |s: &String| s.parse::<f64>().map_err(|_| Failure::Usage(format!("'{s}' is not a number")));
    let probs: Vec<f64> = numbers(probs)?.iter().map(parse_f).collect::<Result<_, _>>()?;
    let raw = numbers(weights)?;
    let bad = |e: ddeg_core::anticonc::AnticoncError| Failure::Usage(e.to_string());
    match mc {
        Some(trials) => {
            let weights: Vec<f64> = raw.iter().map(parse_f).collect::<Result<_, _>>()?;
            let dist = AtomDistribution::new(weights, probs).map_err(bad)?;
            let binning = bin_width.map_or(Binning::Exact, Binning::Width);
            let pmax = atom_probability_mc(&dist, trials, ctx.seed, binning).map_err(bad)?;
            ctx.emit(&json!({"pmax": pmax, "trials": trials}))
        }
        None => {
            let weights: Vec<i64> = raw
                .iter()
                .map(|s| s.parse().map_err(|_| Failure::Usage(format!("'{s}' is not an integer weight"))))
                .collect::<Result<_, _>>()?;
            let peak = atom_probability_dp(&weights, &probs).map_err(bad)?;
            ctx.emit(&json!({"x_star": peak.x_star, "pmax": peak.pmax}))
        }
    }
}

fn control_params(opts: &ControlOpts, g: &Graph, delta: usize) -> Result<AssemblyParams, Failure> {
    if opts.n < 2 {
        return Err(Failure::Usage("n must be at least 2".into()));
    }
    let k = opts.k.unwrap_or_else(|| phi(g.n(), opts.n));
    if opts.paper_faithful {
        AssemblyParams::faithful(k, opts.n).ok_or_else(|| Failure::Usage("faithful-mode constants overflow 64 bits".into()))
    } else {
        Ok(AssemblyParams::free(k, opts.n, delta))
    }
}

fn cmd_control(ctx: &Ctx, action: ControlAction) -> Outcome {
    match action {
        ControlAction::Build { graph, opts, delta, u } => {
            let g = load(&graph)?;
            let params = control_params(&opts, &g, delta)?;
            params.check().map_err(|e| failed("invalid_params", e))?;
            let u: VertexSet = VertexSet::from_vertices(g.n(), u.iter().copied().filter(|&v| v < g.n()));
            let w = u.complement();
            let witness = build_control_greedy(&g, params.k, params.n, params.delta, &w, &u)
                .map_err(|e| failed("control_failed", e))?;
            emit_witness(ctx, &g, &witness, json!({"k": params.k, "n": params.n, "delta": params.delta}))
        }
        ControlAction::Extract { graph, witness, retries } => {
            let g = load(&graph)?;
            let w: ControlGraphWitness = serde_json::from_str(&read_text(&witness)?)
                .map_err(|e| Failure::Usage(format!("witness: {e}")))?;
            let found = distinct_from_control(&g, &w, ctx.seed, retries).map_err(|e| failed("extraction_failed", e))?;
            let distinct_count = g.degree_profile(&found.subset).distinct_count;
            ctx.emit(&json!({
                "subset": found.subset.to_vec(),
                "distinct_count": distinct_count,
                "attempts": found.attempts,
            }))
        }
        ControlAction::Assemble { graph, opts, stages } => {
            let g = load(&graph)?;
            let params = control_params(&opts, &g, stages.delta)?;
            params.check().map_err(|e| failed("invalid_params", e))?;
            let sp = coarse_partition(&g, stages.threshold).map_err(|e| Failure::Usage(e.to_string()))?;
            let sparams = StructureParams::free(sp.bound, params.delta, stages.t);
            let refined = refine_to_blowup(&g, &sp, &sparams).map_err(|e| failed("structure_failure", e))?;
            let assembly =
                assemble_from_blowup(&g, &refined.description, &params).map_err(|e| failed("assembly_failure", e))?;
            let rounds: Vec<Value> = assembly
                .rounds
                .iter()
                .map(|r| json!({"part": r.part, "available": r.available, "k": r.k, "complemented": r.complemented, "pruned": r.pruned}))
                .collect();
            emit_witness(
                ctx,
                &g,
                &assembly.witness,
                json!({"k_target": params.k, "n": params.n, "a0": assembly.a0, "absorbed": assembly.absorbed, "rounds": rounds}),
            )
        }
        ControlAction::Theorem3 { graph, opts, stages, retries } => {
            let g = load(&graph)?;
            let params = control_params(&opts, &g, stages.delta)?;
            let t3 = Theorem3Params { threshold: stages.threshold, delta: stages.delta, t: stages.t, seed: ctx.seed, retries };
            let report = match theorem3_check(&g, params.k, params.n, &t3) {
                Theorem3Outcome::Homogeneous(h) => json!({
                    "outcome": "homogeneous",
                    "witness": HomogeneousWitness { subset: h.subset.to_vec(), kind: h.kind },
                }),
                Theorem3Outcome::Distinct { subset, stage } => json!({
                    "outcome": "distinct",
                    "stage": stage,
                    "witness": DistinctWitness {
                        distinct_count: g.degree_profile(&subset).distinct_count,
                        subset: subset.to_vec(),
                    },
                }),
                Theorem3Outcome::Inconclusive(stages) => json!({
                    "outcome": "inconclusive",
                    "stages": stages.iter().map(|s| json!({"stage": s.stage, "detail": s.detail})).collect::<Vec<_>>(),
                }),
            };
            ctx.emit(&report)
        }
    }
}

fn emit_witness(ctx: &Ctx, g: &Graph, w: &ControlGraphWitness, extra: Value) -> Outcome {
    let verified = verify_control_graph(g, w).is_ok();
    ctx.emit(&json!({
        "witness": w,
        "certificate": {"verified": verified, "k": w.a.len()},
        "params": extra,
    }))
}
