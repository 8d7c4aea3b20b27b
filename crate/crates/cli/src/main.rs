use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use adlv_core::context::OPoint;
use adlv_core::harness::{
    dims_battery, enumerate_battery, lattice_check, mult_battery, multiplicity_sweep,
    verify_battery, Battery, CaseSpec, Selector, Timed, SCHEMA,
};
use adlv_core::Error;
use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

mod render;

#[derive(Parser)]
#[command(
    name = "adlv",
    version,
    about = "Semi-module batteries for affine Deligne-Lusztig varieties"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the Hodge-type semi-modules in the window with their flags.
    Enumerate(CaseArgs),
    /// Compare top-class counts with weight multiplicities.
    Verify(CaseArgs),
    /// Stratum dimension histograms against the closed dimension formula.
    Dims(CaseArgs),
    /// Solve stratum fibres over a finite field and check every point.
    LatticeCheck(LatticeArgs),
    /// Check the tensor-product multiplicity identity.
    Mult(MultArgs),
}

#[derive(Args, Clone)]
struct CaseArgs {
    /// Battery file (JSON); without it and without --mu the default battery is used.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Single case: rank n (defaults to the length of the mu parts).
    #[arg(long)]
    n: Option<usize>,
    /// Single case: degree d (defaults to the number of mu parts).
    #[arg(long)]
    d: Option<usize>,
    /// Single case: m (defaults to the sum of mu).
    #[arg(long)]
    m: Option<usize>,
    /// Single case: mu as "1,1,0,0", parts separated by "/".
    #[arg(long)]
    mu: Option<String>,
    /// Single case: residue field size.
    #[arg(long, default_value_t = 2)]
    q: u64,
    /// Override the enumeration window B of every case.
    #[arg(long)]
    window: Option<i64>,
    /// Override the t-adic precision N of every case.
    #[arg(long)]
    precision: Option<usize>,
    /// Write the JSON report here ("-" for stdout instead of the table).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Seed for the order in which lattice samples are processed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct LatticeArgs {
    #[command(flatten)]
    case: CaseArgs,
    /// Position of the semi-module in the sorted enumeration.
    #[arg(long, conflicts_with = "abar")]
    select: Option<usize>,
    /// The semi-module by its coset minima, "1,3,8,10" or "0:1,1:2,..".
    #[arg(long)]
    abar: Option<String>,
    /// Only this iota (default: all).
    #[arg(long)]
    iota: Option<usize>,
    /// Number of F_q-points of the V-coordinates to try per stratum.
    #[arg(long, default_value_t = 4)]
    samples: usize,
}

#[derive(Args)]
struct MultArgs {
    #[command(flatten)]
    case: CaseArgs,
    /// Every GL_n, n <= 4, with tuples of at most three fundamental coweights.
    #[arg(long)]
    sweep: bool,
}

enum Failure {
    Config(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InternalInvariant(_) => Failure::Internal(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

fn parse_mu(text: &str) -> Result<Vec<Vec<i64>>, Failure> {
    text.split('/')
        .map(|part| {
            part.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<i64>()
                        .map_err(|e| Failure::Config(format!("--mu: {x:?}: {e}")))
                })
                .collect()
        })
        .collect()
}

fn parse_abar(text: &str) -> Result<Vec<OPoint>, Failure> {
    text.split(',')
        .map(|item| {
            let bad =
                |e: std::num::ParseIntError| Failure::Config(format!("--abar: {item:?}: {e}"));
            match item.split_once(':') {
                Some((tau, i)) => Ok(OPoint::new(
                    tau.trim().parse().map_err(bad)?,
                    i.trim().parse().map_err(bad)?,
                )),
                None => Ok(OPoint::new(0, item.trim().parse().map_err(bad)?)),
            }
        })
        .collect()
}

impl CaseArgs {
    /// The cases to run, validated, with the overrides applied.
    fn battery(&self, require: bool) -> Result<Battery, Failure> {
        let mut battery = if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            Battery::parse(&text)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        } else if let Some(mu) = &self.mu {
            let mu = parse_mu(mu)?;
            let spec = CaseSpec {
                n: self.n.unwrap_or(mu[0].len()),
                d: self.d.unwrap_or(mu.len()),
                m: self
                    .m
                    .unwrap_or_else(|| mu.iter().flatten().sum::<i64>().max(0) as usize),
                q: self.q,
                mu,
                window: None,
                precision: None,
                checks: Default::default(),
            };
            Battery::new(vec![spec])
        } else if require {
            return Err(Failure::Config("give --config or --mu".into()));
        } else {
            Battery::default_battery()
        };
        for case in &mut battery.cases {
            if self.window.is_some() {
                case.window = self.window;
            }
            if self.precision.is_some() {
                case.precision = self.precision;
            }
        }
        for (i, case) in battery.cases.iter().enumerate() {
            case.resolve()
                .map_err(|e| Failure::Config(format!("case {i} ({}): {e}", case.key())))?;
        }
        Ok(battery)
    }
}

/// The canonical part of a run plus its timings and verdict.
struct Run {
    command: &'static str,
    report: Value,
    timings: BTreeMap<String, f64>,
    pass: bool,
    internal: bool,
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn has_internal(v: &Value) -> bool {
    match v {
        Value::Object(map) => {
            map.get("internal") == Some(&Value::Bool(true)) || map.values().any(has_internal)
        }
        Value::Array(items) => items.iter().any(has_internal),
        _ => false,
    }
}

fn collect<T: Serialize>(
    command: &'static str,
    timed: Vec<Timed<T>>,
    pass: impl Fn(&T) -> bool,
) -> Run {
    let all = timed.iter().all(|t| pass(&t.value));
    let cases: Vec<Value> = timed.iter().map(|t| to_value(&t.value)).collect();
    let timings = timed.iter().map(|t| (t.key.clone(), t.millis)).collect();
    let report = json!({ "pass": all, "cases": cases });
    Run {
        command,
        internal: has_internal(&report),
        report,
        timings,
        pass: all,
    }
}

fn execute(command: Command) -> Result<(Run, Option<PathBuf>), Failure> {
    let setup = |args: &CaseArgs| -> Result<(), Failure> {
        if let Some(k) = args.jobs {
            rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build_global()
                .map_err(|e| Failure::Config(format!("--jobs: {e}")))?;
        }
        Ok(())
    };
    Ok(match command {
        Command::Enumerate(args) => {
            setup(&args)?;
            let b = args.battery(false)?;
            let run = collect("enumerate", enumerate_battery(&b), |r| r.error.is_none());
            (run, args.json)
        }
        Command::Verify(args) => {
            setup(&args)?;
            let b = args.battery(false)?;
            (collect("verify", verify_battery(&b), |r| r.pass), args.json)
        }
        Command::Dims(args) => {
            setup(&args)?;
            let b = args.battery(false)?;
            (collect("dims", dims_battery(&b), |r| r.pass), args.json)
        }
        Command::Mult(args) => {
            setup(&args.case)?;
            if args.sweep {
                let start = Instant::now();
                let sweep = multiplicity_sweep(4, 3);
                let millis = start.elapsed().as_secs_f64() * 1e3;
                let pass = sweep.iter().all(|r| r.pass);
                let report = json!({ "pass": pass, "cases": to_value(&sweep) });
                let run = Run {
                    command: "mult",
                    internal: has_internal(&report),
                    report,
                    timings: BTreeMap::from([("sweep".to_string(), millis)]),
                    pass,
                };
                (run, args.case.json)
            } else {
                let b = args.case.battery(false)?;
                (
                    collect("mult", mult_battery(&b), |r| r.pass),
                    args.case.json,
                )
            }
        }
        Command::LatticeCheck(args) => {
            setup(&args.case)?;
            let b = args.case.battery(true)?;
            let selector = match (&args.abar, args.select) {
                (Some(text), _) => Selector::Abar(parse_abar(text)?),
                (None, Some(i)) => Selector::Index(i),
                (None, None) => Selector::All,
            };
            let seed = args.case.seed;
            let permute = move |samples: &mut Vec<Vec<usize>>| {
                samples.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            };
            let mut timed = Vec::new();
            for case in &b.cases {
                let start = Instant::now();
                let value = lattice_check(case, &selector, args.iota, args.samples, &permute)?;
                timed.push(Timed {
                    key: case.key(),
                    value,
                    millis: start.elapsed().as_secs_f64() * 1e3,
                });
            }
            timed.sort_by(|a, b| a.key.cmp(&b.key));
            (collect("lattice-check", timed, |r| r.pass), args.case.json)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (run, json_path) = match execute(cli.command) {
        Ok(x) => x,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            return ExitCode::from(3);
        }
    };
    let document = json!({
        "schema": SCHEMA,
        "command": run.command,
        "report": run.report,
        "timings": run.timings,
    });
    let text = serde_json::to_string_pretty(&document).expect("document serializes") + "\n";
    match json_path.as_deref() {
        Some(p) if p.as_os_str() == "-" => print!("{text}"),
        Some(p) => {
            if let Err(e) = fs::write(p, &text) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
            print!("{}", render::table(&document));
        }
        None => print!("{}", render::table(&document)),
    }
    if run.internal {
        ExitCode::from(3)
    } else if run.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
