use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use chebycm_core::curves::{make_cd, make_dm, make_xd};
use chebycm_core::report::{cmd_report, cmd_verify, REPORT_DMAX};
use chebycm_core::zeta::{isogeny_check, isogeny_primes, zeta_row, DEFAULT_CAP};
use chebycm_core::{Error, HyperellipticCurve};

#[derive(Parser)]
#[command(name = "chebycm", version, about = "Verify CM and simplicity evidence for v^2 = (u + 2) phi_d(u)")]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Emit JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveFamily {
    /// C_d : v^2 = (u + 2) phi_d(u)
    #[value(name = "C", alias = "c")]
    C,
    /// D_d : y^2 = x^d + 1
    #[value(name = "D", alias = "d")]
    D,
    /// X_d : y^2 = x^{2d+1} + x
    #[value(name = "X", alias = "x")]
    X,
}

#[derive(Subcommand)]
enum Command {
    /// Run every registered claim for one d.
    Verify {
        #[arg(long)]
        d: u64,
    },
    /// Point counts and L-polynomial of one curve at one prime.
    Lpoly {
        #[arg(long, value_enum)]
        curve: CurveFamily,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        p: u64,
    },
    /// Compare L(C_d), L(D_d) and L(D_{2d}) at every good prime up to pmax.
    Remark {
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = 50)]
        pmax: u64,
    },
    /// JSON report for every d <= dmax that is a power of two or an odd prime.
    Report {
        #[arg(long, default_value_t = 16)]
        dmax: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit status for checks that ran and failed.
const FAILED: u8 = 1;
/// Exit status for inputs the tool refuses.
const REJECTED: u8 = 2;

fn reject(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(REJECTED)
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(FAILED)
    }
}

fn build_curve(family: CurveFamily, d: usize) -> chebycm_core::Result<HyperellipticCurve> {
    match family {
        CurveFamily::C => make_cd(d),
        CurveFamily::D => make_dm(d),
        CurveFamily::X => make_xd(d),
    }
}

fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Verify { d } => match cmd_verify(d) {
            Ok(r) => {
                if cli.json {
                    println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
                } else {
                    print!("{}", r.table());
                }
                status(r.passed())
            }
            Err(e) => reject(e),
        },
        Command::Lpoly { curve, d, p } => {
            let row = match build_curve(curve, d).and_then(|c| zeta_row(&c, p, DEFAULT_CAP)) {
                Ok(row) => row,
                Err(e) => return reject(e),
            };
            if cli.json {
                println!("{}", serde_json::to_string(&row).expect("row serializes"));
            } else {
                println!("{} over F_{p}", row.curve);
                for (k, n) in row.n.iter().enumerate() {
                    println!("  N_{} = {n}", k + 1);
                }
                let coeffs: Vec<String> = row.l.iter().map(|c| c.to_string()).collect();
                println!("  L = [{}]", coeffs.join(", "));
                println!("  irreducible over Q: {}", row.irreducible);
            }
            ExitCode::SUCCESS
        }
        Command::Remark { d, pmax } => {
            let primes = match isogeny_primes(d, pmax) {
                Ok(p) => p,
                Err(e) => return reject(e),
            };
            let mut checks = Vec::with_capacity(primes.len());
            for q in primes {
                match isogeny_check(d, q, DEFAULT_CAP) {
                    Ok(c) => checks.push(c),
                    Err(e) => return reject(e),
                }
            }
            let ok = checks.iter().all(|c| c.passed());
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&checks).expect("checks serialize"));
            } else {
                println!("{:>4}  {:<8}  {:<12}  route", "q", "C_d=D_d", "D_2d=D_d*C_d");
                for c in &checks {
                    println!("{:>4}  {:<8}  {:<12}  {:?}", c.q, c.c_matches_d, c.d2d_matches_product, c.d2d_route);
                }
            }
            status(ok)
        }
        Command::Report { dmax, out } => {
            if dmax > REPORT_DMAX {
                return reject(Error::OutOfScope(format!("dmax must be at most {REPORT_DMAX}")));
            }
            let batch = match cmd_report(dmax) {
                Ok(b) => b,
                Err(e) => return reject(e),
            };
            for w in &batch.warnings {
                eprintln!("warning: {w}");
            }
            let json = batch.to_json();
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, json + "\n") {
                        eprintln!("error: writing {}: {e}", path.display());
                        return ExitCode::from(REJECTED);
                    }
                    for r in &batch.reports {
                        println!("d = {:<3} {}", r.d, if r.passed() { "pass" } else { "fail" });
                    }
                }
                None => println!("{json}"),
            }
            status(batch.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(REJECTED);
        }
    }
    run(cli)
}
