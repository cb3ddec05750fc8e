//! `ct`: command-line access to class transpositions and product orders.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ct_core::certificates::{
    classify_pair, common_vertex_chain_witness, equal_residue_chain_witness, unbounded_cycle_prefix,
    iterated_cycle_prefix, PairClass,
};
use ct_core::gamma::{component_to_cycles, ComponentKind, GammaGraph};
use ct_core::survey::{check_kohl_set, run_survey, theorem_consistency_sweep, write_csv, SurveySummary};
use ct_core::{arith, order_of_product, ClassTransposition, Error, Int, OracleConfig, RcwaMap, SurveyConfig};

#[derive(Parser, Debug)]
#[command(name = "ct", version, about = "Class transpositions of the integers and the orders of their products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Image of an integer under a class transposition.
    Apply {
        transposition: String,
        #[arg(allow_negative_numbers = true)]
        x: Int,
        #[command(flatten)]
        out: JsonFlag,
    },
    /// Order of the product of two class transpositions (first applied first).
    Order {
        first: String,
        second: String,
        #[command(flatten)]
        oracle: OracleArgs,
        /// Largest modulus a power may reach before the scan reports blowup.
        #[arg(long, default_value_t = OracleConfig::default().power_mod_max)]
        mod_max: Int,
        /// Print the piece table of the product.
        #[arg(long)]
        show_map: bool,
        #[command(flatten)]
        out: JsonFlag,
    },
    /// Components of the pair's graph inside a window of values.
    Graph {
        first: String,
        second: String,
        #[arg(long, default_value_t = 1_000)]
        bound: Int,
        /// Print every edge.
        #[arg(long)]
        dump_edges: bool,
        #[command(flatten)]
        out: JsonFlag,
    },
    /// Structural predicates of a pair.
    Classify {
        first: String,
        second: String,
        #[command(flatten)]
        out: JsonFlag,
    },
    /// Closed-form orbit prefix of [0(2),1(2)]·[0(2),k(m)] through 2.
    Cycle {
        #[arg(long)]
        k: Int,
        #[arg(long)]
        m: Int,
        #[arg(long, default_value_t = 8)]
        t_max: u32,
        #[command(flatten)]
        out: JsonFlag,
    },
    /// Exhaustive survey of all pairs with moduli up to a bound.
    Survey {
        /// Largest modulus of a surveyed class.
        #[arg(long)]
        mod_max: Int,
        /// Comma-separated flags every surveyed pair must have
        /// (horizontal, common_vertex, equal_residue, equal_modulus).
        #[arg(long)]
        filter: Option<String>,
        /// Worker threads; 0 picks the number of CPUs.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Write one row per pair to this CSV file.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        /// Write the summary as JSON to this path.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        /// Cross-check every applicable certificate against the power scan.
        #[arg(long)]
        sweep: bool,
        #[command(flatten)]
        oracle: OracleArgs,
        /// Largest modulus a power may reach before the scan reports blowup.
        #[arg(long, default_value_t = OracleConfig::default().power_mod_max)]
        scan_mod_max: Int,
    },
    /// Diophantine chain behind an infinite-order certificate.
    Witness {
        kind: WitnessKind,
        first: String,
        second: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Scale of the equal-residue chain.
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        h: Int,
        #[command(flatten)]
        out: JsonFlag,
    },
}

#[derive(Args, Debug)]
struct JsonFlag {
    /// Emit JSON instead of line-oriented text.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WitnessKind {
    CommonVertex,
    EqualResidue,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Highest power tried by the scan.
    #[arg(long, default_value_t = OracleConfig::default().power_n_max)]
    power_max: u64,
    /// Steps per traced orbit.
    #[arg(long, default_value_t = OracleConfig::default().orbit_step_max)]
    orbit_steps: u64,
    /// Absolute value past which a traced orbit counts as escaping.
    #[arg(long, default_value_t = OracleConfig::default().orbit_value_bound)]
    orbit_bound: Int,
}

impl OracleArgs {
    fn config(&self, power_mod_max: Int) -> OracleConfig {
        OracleConfig {
            power_n_max: self.power_max,
            power_mod_max,
            orbit_step_max: self.orbit_steps,
            orbit_value_bound: self.orbit_bound,
            ..OracleConfig::default()
        }
    }
}

fn parse_ct(s: &str) -> Result<ClassTransposition, Error> {
    s.parse()
}

fn flags_json(c: &PairClass) -> serde_json::Value {
    json!({
        "horizontal": c.horizontal,
        "common_vertex": c.common_vertex,
        "equal_residue": c.equal_residue,
        "equal_modulus": c.equal_modulus,
    })
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), Error> {
    let io_err = |e: io::Error| Error::Invariant(format!("write failed: {e}"));
    match cli.command {
        Command::Apply { transposition, x, out: JsonFlag { json } } => {
            let t = parse_ct(&transposition)?;
            let y = t.apply(x)?;
            if json {
                writeln!(out, "{}", json!({ "transposition": t.to_string(), "x": x.to_string(), "image": y.to_string() }))
            } else {
                writeln!(out, "{y}")
            }
            .map_err(io_err)?;
        }
        Command::Order { first, second, oracle, mod_max, show_map, out: JsonFlag { json } } => {
            let (a, b) = (parse_ct(&first)?, parse_ct(&second)?);
            let verdict = order_of_product(&a, &b, &oracle.config(mod_max))?;
            if json {
                let mut v = serde_json::to_value(verdict.report()).expect("serializable");
                v["consistent"] = json!(verdict.consistent);
                writeln!(out, "{v}").map_err(io_err)?;
            } else {
                writeln!(out, "{verdict}").map_err(io_err)?;
                let stages: Vec<&str> = verdict.method.iter().map(|s| s.tag()).collect();
                writeln!(out, "method: {}", stages.join(", ")).map_err(io_err)?;
                writeln!(out, "consistent: {}", verdict.consistent).map_err(io_err)?;
            }
            if show_map {
                write!(out, "{}", RcwaMap::product(&a, &b)?).map_err(io_err)?;
            }
        }
        Command::Graph { first, second, bound, dump_edges, out: JsonFlag { json } } => {
            let (a, b) = (parse_ct(&first)?, parse_ct(&second)?);
            let g = GammaGraph::build_window(&a, &b, bound)?;
            let comps = g.components();
            if json {
                let items: Vec<_> = comps
                    .iter()
                    .map(|c| {
                        let cycles = if c.kind == ComponentKind::Truncated {
                            None
                        } else {
                            component_to_cycles(c).ok().map(|cs| cs.into_iter().map(|f| f.entries).collect::<Vec<_>>())
                        };
                        json!({
                            "kind": format!("{:?}", c.kind),
                            "length": c.length,
                            "mu": c.mu_values(),
                            "cycles": cycles,
                        })
                    })
                    .collect();
                let mut v = json!({ "bound": bound, "components": items });
                if dump_edges {
                    v["edges"] = json!(g.edges().iter().map(ToString::to_string).collect::<Vec<_>>());
                }
                writeln!(out, "{v}").map_err(io_err)?;
            } else {
                if dump_edges {
                    for e in g.edges() {
                        writeln!(out, "{e}").map_err(io_err)?;
                    }
                }
                for c in &comps {
                    writeln!(out, "{c}").map_err(io_err)?;
                }
            }
        }
        Command::Classify { first, second, out: JsonFlag { json } } => {
            let (a, b) = (parse_ct(&first)?, parse_ct(&second)?);
            let c = classify_pair(&a, &b);
            if json {
                writeln!(out, "{}", flags_json(&c)).map_err(io_err)?;
            } else {
                writeln!(out, "horizontal: {}", c.horizontal).map_err(io_err)?;
                writeln!(out, "common_vertex: {}", c.common_vertex).map_err(io_err)?;
                writeln!(out, "equal_residue: {}", c.equal_residue).map_err(io_err)?;
                writeln!(out, "equal_modulus: {}", c.equal_modulus).map_err(io_err)?;
            }
        }
        Command::Cycle { k, m, t_max, out: JsonFlag { json } } => {
            let closed = unbounded_cycle_prefix(k, m, t_max)?;
            let iterated = iterated_cycle_prefix(k, m, closed.len())?;
            let agrees = closed == iterated;
            let text: Vec<String> = closed.iter().map(Int::to_string).collect();
            if json {
                writeln!(out, "{}", json!({ "prefix": text, "iteration_agrees": agrees })).map_err(io_err)?;
            } else {
                writeln!(out, "({})", text.join(", ")).map_err(io_err)?;
                writeln!(out, "iteration check: {}", if agrees { "ok" } else { "MISMATCH" }).map_err(io_err)?;
            }
            if !agrees {
                return Err(Error::Invariant("closed form disagrees with iteration".into()));
            }
        }
        Command::Survey { mod_max, filter, workers, csv, json, sweep, oracle, scan_mod_max } => {
            let pair_filter = filter.as_deref().map(PairClass::parse_mask).transpose()?;
            let cfg =
                SurveyConfig { mod_max, oracle: oracle.config(scan_mod_max), pair_filter, parallelism: workers };
            let run = run_survey(&cfg)?;
            let discrepancies = if sweep { theorem_consistency_sweep(&cfg)? } else { Vec::new() };
            if let Some(path) = csv {
                let file = File::create(&path)
                    .map_err(|e| Error::precondition(format!("cannot create {}: {e}", path.display())))?;
                write_csv(&run.records, BufWriter::new(file))?;
            }
            let summary = SurveySummary::new(&run, discrepancies);
            if let Some(path) = json {
                let file = File::create(&path)
                    .map_err(|e| Error::precondition(format!("cannot create {}: {e}", path.display())))?;
                serde_json::to_writer_pretty(BufWriter::new(file), &summary)
                    .map_err(|e| Error::Invariant(format!("json write failed: {e}")))?;
            }
            write_survey_text(out, &summary).map_err(io_err)?;
        }
        Command::Witness { kind, first, second, n, h, out: JsonFlag { json } } => {
            let (a, b) = (parse_ct(&first)?, parse_ct(&second)?);
            let w = match kind {
                WitnessKind::CommonVertex => common_vertex_chain_witness(&a, &b, n)?,
                WitnessKind::EqualResidue => equal_residue_chain_witness(&a, &b, n, h)?,
            };
            w.verify()?;
            let chain: Vec<String> = w.chain.iter().map(Int::to_string).collect();
            if json {
                writeln!(out, "{}", json!({ "system": w.system, "n": w.n, "chain": chain, "verified": true }))
                    .map_err(io_err)?;
            } else {
                writeln!(out, "system: {:?}", w.system).map_err(io_err)?;
                writeln!(out, "chain: ({})", chain.join(", ")).map_err(io_err)?;
                writeln!(out, "verified: true").map_err(io_err)?;
            }
        }
    }
    Ok(())
}

fn write_survey_text(out: &mut dyn Write, s: &SurveySummary) -> io::Result<()> {
    let h = &s.histogram;
    writeln!(out, "pairs: {}", h.total())?;
    for (order, count) in &h.finite_counts {
        let (a, b) = h.realizations[order];
        writeln!(out, "order {order}: {count} (e.g. {a} {b})")?;
    }
    writeln!(out, "infinite (certified): {}", h.infinite_certified)?;
    writeln!(out, "infinite (heuristic): {}", h.infinite_heuristic)?;
    writeln!(out, "inconclusive: {}", h.inconclusive)?;
    for (a, b) in &h.inconclusive_pairs {
        writeln!(out, "  inconclusive {a} {b}")?;
    }
    writeln!(out, "errors: {}", h.errors)?;
    for (a, b, e) in &h.error_pairs {
        writeln!(out, "  error {a} {b}: {e}")?;
    }
    let k = check_kohl_set(h);
    writeln!(out, "all orders in Kohl set: {}", k.all_in_kohl_set)?;
    writeln!(out, "all orders divide 840: {}", k.all_divide_840)?;
    for (a, b, n) in &k.violations {
        writeln!(out, "  violation: {a} {b} order {n}")?;
    }
    writeln!(out, "discrepancies: {}", s.discrepancies.len())?;
    writeln!(out, "runtime: {:.2}s", s.runtime_seconds)
}

fn main() -> ExitCode {
    if let Ok(bits) = std::env::var("CT_MAX_INT_BITS") {
        match bits.trim().parse::<u32>() {
            Ok(b) => arith::set_int_bits(b),
            Err(_) => {
                eprintln!("error: CT_MAX_INT_BITS must be an integer, got {bits:?}");
                return ExitCode::from(1);
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 1 } else { 2 })
        }
    }
}
