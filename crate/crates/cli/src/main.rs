mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wfst::Semiring;

#[derive(Parser, Debug)]
#[command(name = "wfst", version, about = "Weighted finite-state machine tools")]
struct Cli {
    /// Weight algebra used when reading machines.
    #[arg(long, global = true, value_enum, default_value = "tropical")]
    semiring: SemiringArg,
    /// Input symbol table for machines read by this command.
    #[arg(long, global = true)]
    isyms: Option<PathBuf>,
    /// Output symbol table for machines read by this command.
    #[arg(long, global = true)]
    osyms: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SemiringArg {
    Boolean,
    Tropical,
    Real,
}

impl From<SemiringArg> for Semiring {
    fn from(s: SemiringArg) -> Self {
        match s {
            SemiringArg::Boolean => Semiring::Boolean,
            SemiringArg::Tropical => Semiring::Tropical,
            SemiringArg::Real => Semiring::Real,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Machine operations.
    #[command(subcommand)]
    Fst(FstCommand),
    /// Rewrite rules and decision trees.
    #[command(subcommand)]
    Rule(RuleCommand),
    /// N-gram language models.
    #[command(subcommand)]
    Lm(LmCommand),
    /// Beam search through a cascade for each observation line.
    Decode(DecodeArgs),
}

#[derive(Args, Debug)]
struct Out {
    /// Output file; `-` or absent writes to stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum FstCommand {
    /// Reads a text machine and writes it in canonical form.
    Compile {
        input: PathBuf,
        /// Read four-field lines as `src dst label weight`.
        #[arg(long)]
        acceptor: bool,
        #[command(flatten)]
        out: Out,
    },
    /// Prints a machine as text or Graphviz.
    Print {
        input: PathBuf,
        #[arg(long)]
        dot: bool,
        #[command(flatten)]
        out: Out,
    },
    /// Composes `a` with `b`, matching outputs of `a` to inputs of `b`.
    Compose {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Intersects two acceptors.
    Intersect {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Accepts what either machine accepts.
    Union {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Follows `a` with `b`.
    Concat {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Kleene star.
    Closure {
        input: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Reverses every path.
    Reverse {
        input: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Keeps one side of each label pair.
    Project {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "input")]
        side: Side,
        #[command(flatten)]
        out: Out,
    },
    /// Complement of a boolean acceptor over its input symbol table.
    Complement {
        input: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Strings of acceptor `a` not accepted by `b`.
    Difference {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Weighted determinization.
    Determinize {
        input: PathBuf,
        /// Give up after this many states.
        #[arg(long, default_value_t = wfst::optimize::DEFAULT_EXPANSION_CAP)]
        cap: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Determinizes only states with more than `k` arcs.
    Localdet {
        input: PathBuf,
        #[arg(short, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Moves weights or output labels toward the start.
    Push {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "weights")]
        mode: PushArg,
        #[command(flatten)]
        out: Out,
    },
    /// Minimizes a deterministic machine.
    Minimize {
        input: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Exits 0 when the machines are equivalent and 1 otherwise.
    Equivalent { a: PathBuf, b: PathBuf },
    /// Removes states not on any accepting path.
    Connect {
        input: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Prints `state<TAB>distance` from the start state.
    Shortest {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "dijkstra")]
        algo: AlgoArg,
        #[command(flatten)]
        out: Out,
    },
    /// Prints `input<TAB>output<TAB>weight` for the best path.
    Bestpath {
        input: PathBuf,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Side {
    Input,
    Output,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PushArg {
    Weights,
    Strings,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum AlgoArg {
    Acyclic,
    Dijkstra,
    BellmanFord,
}

#[derive(Subcommand, Debug)]
enum RuleCommand {
    /// Compiles a rule file into one transducer.
    Compile {
        rules: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Rewrites a space-separated symbol string.
    Apply {
        machine: PathBuf,
        input: String,
        /// Print only the best output.
        #[arg(long)]
        best: bool,
    },
    /// Compiles a decision-tree file into one transducer.
    Tree {
        tree: PathBuf,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Subcommand, Debug)]
enum LmCommand {
    /// Counts n-grams of a corpus with one sentence per line.
    Count {
        corpus: PathBuf,
        #[arg(short, long, default_value_t = 3)]
        n: usize,
        /// Do not add `<s>` and `</s>`.
        #[arg(long)]
        no_boundaries: bool,
        #[command(flatten)]
        out: Out,
    },
    /// Estimates a Katz back-off model from counts; writes ARPA text.
    Build {
        counts: PathBuf,
        #[arg(long, default_value_t = wfst::ngram::DEFAULT_K_THRESHOLD)]
        k_threshold: u64,
        /// Renormalize histories whose back-off would have no mass left
        /// instead of failing.
        #[arg(long)]
        renormalize: bool,
        #[command(flatten)]
        out: Out,
    },
    /// Converts an ARPA model into a back-off acceptor.
    Fsa {
        model: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Prints the cost (negative natural log probability) of each line.
    Score { model: PathBuf, sentences: PathBuf },
}

#[derive(Args, Debug)]
struct DecodeArgs {
    /// File listing the stages after the observations, one machine path
    /// per line, optionally followed by input and output symbol tables.
    #[arg(long)]
    cascade: PathBuf,
    /// Pruning threshold added to the best cost of each frame.
    #[arg(long, default_value_t = f64::INFINITY)]
    beam: f64,
    /// One observation string per line.
    observations: PathBuf,
    #[command(flatten)]
    out: Out,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("wfst: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
