//! Command-line interface.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 bad input, 3 resource
//! cap hit.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graver::graver_basis_capped;
use crate::groebner::buchberger;
use crate::instances::{gen_hs, gen_snd, HsConfig, SndConfig};
use crate::lattice::{CostOrder, IntMatrix, IntVector};
use crate::opcost::{
    opcost, single_scenario_decisions, BasisSizes, DecisionList, Method, OpcostOptions, SipInstance, Timings,
};
use crate::toric::toric_generating_set;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "toricopt", version, about = "Test sets, Graver bases and opportunity cost matrices")]
pub struct Cli {
    /// Worker threads for matrix cells (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a sampled production-planning instance.
    GenHs {
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the small sampling box [3,12]^2 x [2,12]^2.
        #[arg(long)]
        scaled: bool,
        /// Independent model copies placed block-diagonally.
        #[arg(long, default_value_t = 1)]
        blocks: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a sampled network design instance on the directed triangle.
    GenSnd {
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Accepted for symmetry with gen-hs; the defaults are already small.
        #[arg(long)]
        scaled: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generating set of the lattice ideal of a matrix.
    Toric {
        /// Matrix JSON (array of rows); `-` or absent reads stdin.
        matrix: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduced Gröbner basis of the lattice ideal for a cost vector.
    Groebner {
        matrix: Option<PathBuf>,
        /// Comma-separated or JSON array.
        #[arg(long, allow_hyphen_values = true)]
        cost: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Graver basis of a matrix.
    Graver {
        matrix: Option<PathBuf>,
        #[arg(long, default_value_t = crate::graver::DEFAULT_MAX_ELEMENTS)]
        max_elements: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Opportunity cost matrix of an instance.
    Opcost {
        instance: PathBuf,
        #[arg(long, default_value = "kernel")]
        method: Method,
        /// `single-scenario` or a decisions JSON file.
        #[arg(long, default_value = "single-scenario")]
        decisions: String,
        /// Report recourse costs only.
        #[arg(long)]
        q_only: bool,
        /// CSV destination (default stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Metadata JSON destination.
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Timing sweep; one JSON record per line.
    Bench {
        /// Scenario counts.
        #[arg(long, value_delimiter = ',', default_value = "10,50,100")]
        n_list: Vec<usize>,
        /// Block counts; each block adds 8 recourse variables.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        vars_list: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "kernel,graver")]
        methods: Vec<Method>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Sample from the full box instead of the small one.
        #[arg(long)]
        full_box: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-method equality and invariants on the bundled fixtures.
    Verify {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub method: Method,
    pub scenarios: usize,
    pub variables: usize,
    pub timings_us: Timings,
    pub basis_sizes: BasisSizes,
    /// Hex digest from [`crate::opcost::OppCostMatrix::checksum`].
    pub checksum: String,
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_BAD_INPUT;
        }
    };
    match pool.install(|| execute(&cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceLimit(_) => EXIT_RESOURCE,
        _ => EXIT_BAD_INPUT,
    }
}

fn io_err(path: &Path, e: io::Error) -> Error {
    Error::InvalidInput(format!("{}: {e}", path.display()))
}

fn read_input(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) if p != Path::new("-") => fs::read_to_string(p).map_err(|e| io_err(p, e)),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|e| Error::InvalidInput(format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_err(p, e)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::InvalidInput(format!("stdout: {e}")))
        }
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("{what}: {e}")))
}

fn vectors_json(vs: Vec<IntVector>) -> String {
    crate::json::to_string_rows(&serde_json::to_value(vs).expect("vectors serialize")) + "\n"
}

fn parse_cost(s: &str) -> Result<IntVector> {
    let t = s.trim();
    if t.starts_with('[') {
        return parse_json(t, "cost");
    }
    t.split(',')
        .map(|x| x.trim().parse().map_err(|_| Error::InvalidInput(format!("cost entry {x:?}"))))
        .collect::<Result<Vec<_>>>()
        .map(IntVector::new)
}

fn execute(command: &Command) -> Result<i32> {
    match command {
        Command::GenHs { n, seed, scaled, blocks, out } => {
            let cfg = if *scaled { HsConfig::scaled(*n, *seed) } else { HsConfig::new(*n, *seed) };
            let inst = gen_hs(&cfg.with_blocks(*blocks))?;
            write_output(out.as_deref(), &(inst.to_json() + "\n"))?;
        }
        Command::GenSnd { n, seed, scaled: _, out } => {
            let inst = gen_snd(&SndConfig::new(*n, *seed))?;
            write_output(out.as_deref(), &(inst.to_json() + "\n"))?;
        }
        Command::Toric { matrix, out } => {
            let a: IntMatrix = parse_json(&read_input(matrix.as_deref())?, "matrix")?;
            let gens = toric_generating_set(&a).generators;
            write_output(out.as_deref(), &vectors_json(gens.sorted()))?;
        }
        Command::Groebner { matrix, cost, out } => {
            let a: IntMatrix = parse_json(&read_input(matrix.as_deref())?, "matrix")?;
            let order = CostOrder::new(parse_cost(cost)?)?;
            crate::error::check_dim(a.cols(), order.dim())?;
            let gb = buchberger(&toric_generating_set(&a).generators, &order)?;
            write_output(out.as_deref(), &vectors_json(gb.elements.to_vec()))?;
        }
        Command::Graver { matrix, max_elements, out } => {
            let a: IntMatrix = parse_json(&read_input(matrix.as_deref())?, "matrix")?;
            let g = graver_basis_capped(&a, *max_elements)?;
            write_output(out.as_deref(), &vectors_json(g.elements.to_vec()))?;
        }
        Command::Opcost { instance, method, decisions, q_only, out, meta } => {
            let inst = SipInstance::from_json(&read_input(Some(instance))?)?;
            let dec = if decisions == "single-scenario" {
                single_scenario_decisions(&inst, *method)?
            } else {
                parse_json::<DecisionList>(&read_input(Some(Path::new(decisions)))?, "decisions")?
            };
            let m = opcost(&inst, &dec, *method, OpcostOptions { q_only: *q_only })?;
            write_output(out.as_deref(), &m.to_csv())?;
            if let Some(p) = meta {
                let doc = crate::json::to_string_rows(&m.to_json(true));
                write_output(Some(p), &(doc + "\n"))?;
            }
        }
        Command::Bench { n_list, vars_list, methods, seed, full_box, out } => {
            let mut lines = String::new();
            for &blocks in vars_list {
                for &n in n_list {
                    let cfg = if *full_box { HsConfig::new(n, *seed) } else { HsConfig::scaled(n, *seed) };
                    let inst = gen_hs(&cfg.with_blocks(blocks))?;
                    let dec = single_scenario_decisions(&inst, Method::Kernel)?;
                    for &method in methods {
                        let m = opcost(&inst, &dec, method, OpcostOptions::default())?;
                        let rec = BenchRecord {
                            method,
                            scenarios: n,
                            variables: inst.recourse_dim(),
                            timings_us: m.timings,
                            basis_sizes: m.basis_sizes.clone(),
                            checksum: format!("{:016x}", m.checksum()),
                        };
                        lines.push_str(&serde_json::to_string(&rec).expect("record serializes"));
                        lines.push('\n');
                    }
                }
            }
            write_output(out.as_deref(), &lines)?;
        }
        Command::Verify { out } => {
            let report = verify::run_all()?;
            write_output(out.as_deref(), &report.text)?;
            return Ok(if report.ok { EXIT_OK } else { EXIT_MISMATCH });
        }
    }
    Ok(EXIT_OK)
}

/// Bundled fixtures and the checks run on them.
pub mod verify {
    use std::fmt::Write as _;

    use super::*;
    use crate::opcost::OppCostMatrix;

    pub const FIXTURES: [(&str, &str); 3] = [
        ("hs_scaled_n2_seed1", include_str!("../fixtures/hs_scaled_n2_seed1.json")),
        ("hs_scaled_n4_seed2", include_str!("../fixtures/hs_scaled_n4_seed2.json")),
        ("snd_triangle_n3_seed1", include_str!("../fixtures/snd_triangle_n3_seed1.json")),
    ];

    pub struct Report {
        pub ok: bool,
        /// One line per check; contains no timings.
        pub text: String,
    }

    pub fn run_all() -> Result<Report> {
        let mut report = Report { ok: true, text: String::new() };
        for (name, json) in FIXTURES {
            let inst = SipInstance::from_json(json)?;
            check_instance(name, &inst, &mut report)?;
        }
        let _ = writeln!(report.text, "{}", if report.ok { "all checks passed" } else { "MISMATCH" });
        Ok(report)
    }

    fn record(report: &mut Report, name: &str, check: &str, pass: bool) {
        report.ok &= pass;
        let _ = writeln!(report.text, "{name} {check}: {}", if pass { "ok" } else { "MISMATCH" });
    }

    fn diagonal_is_column_min(m: &OppCostMatrix) -> bool {
        (0..m.n).all(|j| match m.get(j, j) {
            Some(d) => (0..m.n).all(|i| m.get(i, j).is_none_or(|v| d <= v)),
            None => false,
        })
    }

    pub fn check_instance(name: &str, inst: &SipInstance, report: &mut Report) -> Result<()> {
        record(report, name, "json round trip", SipInstance::from_json(&inst.to_json()).as_ref() == Ok(inst));
        let dk = single_scenario_decisions(inst, Method::Kernel)?;
        let dg = single_scenario_decisions(inst, Method::Graver)?;
        let doracle = single_scenario_decisions(inst, Method::Oracle)?;
        record(report, name, "decisions agree", dk == dg && dk == doracle);
        let opts = OpcostOptions::default();
        let k = opcost(inst, &dk, Method::Kernel, opts)?;
        let g = opcost(inst, &dk, Method::Graver, opts)?;
        let o = opcost(inst, &dk, Method::Oracle, opts)?;
        record(report, name, "kernel = oracle", k.same_values(&o));
        record(report, name, "graver = oracle", g.same_values(&o));
        record(report, name, "diagonal is column minimum", diagonal_is_column_min(&k));
        record(
            report,
            name,
            "basis reuse",
            k.counters.toric_runs == 1
                && k.counters.buchberger_runs == inst.scenario_count() as u64
                && g.counters.graver_runs == 1,
        );
        let _ = writeln!(report.text, "{name} checksum: {:016x}", k.checksum());
        Ok(())
    }
}
