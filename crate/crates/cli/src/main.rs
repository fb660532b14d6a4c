//! `theta`: command-line front end for `theta-core`.
//!
//! Pair literals name the smaller member first, e.g. `sp2n_r:n=1/o_pq:p=2,q=2`
//! or `u:n1=1,n2=1/u:p=2,q=2`. Members are `sp2n_r:n`, `o_pq:p,q`,
//! `u:n1,n2` / `u:p,q`, `ostar:n`, `sp_pq:p,q`, `sp2n_c:n`, `o_c:p`.
//!
//! Exit status: 0 on success, 1 when a check finds a counterexample, 2 on
//! malformed input or a computation that cannot be carried out.

mod verbs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use theta_core::pairs::{DualPairSpec, Side};

/// Environment variable holding the default seed.
pub const SEED_ENV: &str = "THETA_SEED";

#[derive(Parser)]
#[command(name = "theta", version, about = "Theta lifts of nilpotent orbits for real reductive dual pairs")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Clone, Debug)]
pub struct Opts {
    /// Seed for every randomized routine (default: $THETA_SEED, else 1).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Degree truncation for series computations.
    #[arg(long, global = true, default_value_t = 8)]
    pub max_deg: usize,
    /// Sample count for fiber certificates.
    #[arg(long, global = true, default_value_t = 50)]
    pub samples: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// `G` (smaller member) or `G'`.
    #[arg(long, global = true, default_value = "G", value_parser = parse_side)]
    pub side: Side,
    /// Signed diagram such as `+-/-+`; verbs that loop over orbits use only this one.
    #[arg(long, global = true)]
    pub orbit: Option<String>,
}

impl Opts {
    pub fn seed(&self) -> Result<u64, String> {
        match self.seed {
            Some(s) => Ok(s),
            None => match std::env::var(SEED_ENV) {
                Ok(v) => v.trim().parse().map_err(|_| format!("{SEED_ENV}={v:?} is not an unsigned integer")),
                Err(_) => Ok(1),
            },
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

fn parse_side(s: &str) -> Result<Side, String> {
    match s {
        "G" | "g" => Ok(Side::G),
        "G'" | "g'" | "Gprime" | "gprime" => Ok(Side::GPrime),
        _ => Err(format!("side must be G or G', got {s:?}")),
    }
}

fn parse_pair(s: &str) -> Result<DualPairSpec, String> {
    s.parse().map_err(|e: theta_core::pairs::PairError| e.to_string())
}

#[derive(Subcommand)]
enum Verb {
    /// Enumerate the nilpotent K_C-orbits on one side.
    ListOrbits {
        #[arg(value_parser = parse_pair)]
        pair: DualPairSpec,
    },
    /// Lift an orbit of G, by the combinatorial rule and by the moment maps.
    Lift {
        #[arg(value_parser = parse_pair)]
        pair: DualPairSpec,
    },
    /// Lift a cycle such as `2[+-/-+] + [+/-]`.
    LiftCycle {
        #[arg(value_parser = parse_pair)]
        pair: DualPairSpec,
        #[arg(long)]
        cycle: String,
    },
    /// Lift an orbit datum `{orbit: "..", dim: k, weight: [..], label: ".."}`.
    LiftDatum {
        #[arg(value_parser = parse_pair)]
        pair: DualPairSpec,
        #[arg(long)]
        datum: String,
    },
    /// Orbits in the closure of `--orbit`, or the whole closure order.
    Closure {
        #[arg(value_parser = parse_pair)]
        pair: DualPairSpec,
    },
    /// Freeness and single-orbit fiber certificates.
    VerifyMoment {
        #[arg(value_parser = parse_pair)]
        pair: DualPairSpec,
    },
    /// Trace identity on the stabilizer of x'.
    VerifyTangent {
        #[arg(value_parser = parse_pair)]
        pair: DualPairSpec,
    },
    /// Dimension identity and certified boundary codimension.
    Dims {
        #[arg(value_parser = parse_pair)]
        pair: DualPairSpec,
    },
    /// Iterated lifts from a file of pair literals plus an optional `datum:` line.
    Tower { file: PathBuf },
    /// C[W] as a graded K x K'-module.
    CwSeries {
        #[arg(value_parser = parse_pair)]
        pair: DualPairSpec,
    },
    /// Transfer of C[closure of --orbit] (or of S(p) without --orbit) to K'.
    Transfer {
        #[arg(value_parser = parse_pair)]
        pair: DualPairSpec,
    },
    /// Multiplicities of K-types in the module induced from a datum.
    Induced {
        #[arg(value_parser = parse_pair)]
        pair: DualPairSpec,
        #[arg(long)]
        datum: String,
    },
    /// Transfer of the orbit ring against the ring of the lifted orbit.
    CheckL3 {
        #[arg(value_parser = parse_pair)]
        pair: DualPairSpec,
    },
    /// Transfer of induced multiplicities against the lifted induced module.
    CheckTf {
        #[arg(value_parser = parse_pair)]
        pair: DualPairSpec,
    },
    /// K'-type multiplicities of a transfer, computed two ways.
    CheckP4 {
        #[arg(value_parser = parse_pair)]
        pair: DualPairSpec,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let o = &cli.opts;
    let result = match &cli.verb {
        Verb::ListOrbits { pair } => verbs::list_orbits(pair, o),
        Verb::Lift { pair } => verbs::lift(pair, o),
        Verb::LiftCycle { pair, cycle } => verbs::lift_cycle(pair, cycle, o),
        Verb::LiftDatum { pair, datum } => verbs::lift_datum(pair, datum, o),
        Verb::Closure { pair } => verbs::closure(pair, o),
        Verb::VerifyMoment { pair } => verbs::verify_moment(pair, o),
        Verb::VerifyTangent { pair } => verbs::verify_tangent(pair, o),
        Verb::Dims { pair } => verbs::dims(pair, o),
        Verb::Tower { file } => verbs::tower(file, o),
        Verb::CwSeries { pair } => verbs::cw_series(pair, o),
        Verb::Transfer { pair } => verbs::transfer(pair, o),
        Verb::Induced { pair, datum } => verbs::induced(pair, datum, o),
        Verb::CheckL3 { pair } => verbs::check_l3(pair, o),
        Verb::CheckTf { pair } => verbs::check_tf(pair, o),
        Verb::CheckP4 { pair } => verbs::check_p4(pair, o),
    };
    match result {
        Ok(report) => {
            match o.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.json).expect("values serialize")),
                Format::Text => print!("{}", report.text),
            }
            if report.counterexample {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
