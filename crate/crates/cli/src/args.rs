use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "qpl", version, about = "Pairs of quaternary quadratic forms: invariants, local solubility, sieves and counts")]
pub struct Cli {
    /// Directory for CSV/JSON outputs and run manifests.
    #[arg(long, global = true, env = "QPL_OUT_DIR", default_value = "qpl-out")]
    pub out_dir: PathBuf,
    /// Worker threads for scans (0 picks the number of cores).
    #[arg(long, global = true, env = "QPL_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// Seed for sampled runs.
    #[arg(long, global = true, env = "QPL_SEED", default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct PairInput {
    /// 20 coordinates a11 a12 a13 a14 a22 a23 a24 a33 a34 a44 b11 ... b44.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "pair_file")]
    pub pair: Option<String>,
    /// File holding the 20 coordinates.
    #[arg(long)]
    pub pair_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Invariants I, J, discriminant, height and resolvent of a pair (rational coordinates allowed).
    Invariants {
        #[command(flatten)]
        input: PairInput,
    },
    /// Strong irreducibility, reducibility conditions and real data of a pair or a quartic.
    Classify {
        #[command(flatten)]
        input: PairInput,
        /// A binary quartic "a b c d e" instead of a pair.
        #[arg(long, allow_hyphen_values = true)]
        quartic: Option<String>,
    },
    /// Exact counts of invariant pairs (I, J) with H(I, J) < X.
    CountIj {
        #[arg(long = "X")]
        x: u64,
        /// +, - or both.
        #[arg(long, allow_hyphen_values = true, default_value = "both")]
        sign: String,
        #[arg(long, default_value_t = 64)]
        chunk_rows: usize,
        /// Continue from the last checkpoint of an earlier manifest.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Predicate counts over the box [-M, M]^20, sampled or over an index range.
    ScanBox {
        #[arg(long = "M")]
        m: u64,
        /// Comma-separated: disc-nonzero, strongly-irreducible, case1..case4, wp:P, wp1:P, wp2:P.
        #[arg(long, value_delimiter = ',', required = true)]
        predicates: Vec<String>,
        /// Number of uniform samples; without it the index range is enumerated.
        #[arg(long, conflicts_with_all = ["start", "end"])]
        samples: Option<u64>,
        #[arg(long)]
        start: Option<u128>,
        #[arg(long)]
        end: Option<u128>,
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Lattice-point count against volume for a region file.
    Davenport {
        #[arg(long)]
        region_file: PathBuf,
        /// Grid cells per axis for non-polygonal regions.
        #[arg(long, default_value_t = 1024)]
        grid: usize,
    },
    /// Minimal curves y^2 = x^3 + Ax + B with H'(E) < X.
    Curves {
        #[arg(long = "X")]
        x: u64,
        /// Congruence conditions, one `A r mod m` or `B r mod m` per line.
        #[arg(long)]
        family_file: Option<PathBuf>,
    },
    /// W_p, W_p^(1), W_p^(2) counts on sampled pairs, with the gamma_p check.
    SieveScan {
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long = "M", default_value_t = 6)]
        m: u64,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        /// Sample pairs already satisfying the normalization conditions.
        #[arg(long)]
        normalized: bool,
    },
    /// Order of the stabilizer of a pair in G(F_p) and #E(F_p)[4].
    StabilizerFp {
        #[command(flatten)]
        input: PairInput,
        #[arg(long)]
        p: u64,
        /// Row-by-row search over GL4 instead of the GL2-first search.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Solubility of Q_A = Q_B = 0 over Q_p.
    QpSolve {
        #[command(flatten)]
        input: PairInput,
        #[arg(long)]
        p: u64,
        /// Hensel depth; defaults to v_p(4I^3 - J^2) + 2.
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Exact LP minimum of E[2^(a+b) - 2^a] under the two moment conditions.
    SelmerBound {
        #[arg(long, default_value = "3")]
        s2_avg: String,
        #[arg(long, default_value = "4")]
        order4_avg: String,
        #[arg(long, num_args = 2, value_names = ["A_MAX", "B_MAX"], default_values_t = [6u32, 10])]
        caps: Vec<u32>,
    },
    /// Randomized batch of exact identities; exits 1 on any failure.
    VerifyIdentities {
        #[arg(long, default_value_t = 1000)]
        samples: u64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Invariants { .. } => "invariants",
            Command::Classify { .. } => "classify",
            Command::CountIj { .. } => "count-ij",
            Command::ScanBox { .. } => "scan-box",
            Command::Davenport { .. } => "davenport",
            Command::Curves { .. } => "curves",
            Command::SieveScan { .. } => "sieve-scan",
            Command::StabilizerFp { .. } => "stabilizer-fp",
            Command::QpSolve { .. } => "qp-solve",
            Command::SelmerBound { .. } => "selmer-bound",
            Command::VerifyIdentities { .. } => "verify-identities",
        }
    }
}
