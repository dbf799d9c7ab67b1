use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use wfst::decode::{beam_decode, best_path, shortest_distance, ShortestPathAlgo};
use wfst::ngram::{
    build_lm_fsa, count_ngrams, katz_model_with, BackoffModel, CountOptions, CountTable, Degeneracy, KatzOptions,
};
use wfst::ops::{self, ProjectSide};
use wfst::optimize::{self, PushMode};
use wfst::rewrite::{apply_rewrite, ApplyMode, DecisionForest, RuleSet};
use wfst::{Error, Fst};

use crate::io::{self as fio, MachineFormat};
use crate::{AlgoArg, Cli, Command, DecodeArgs, FstCommand, LmCommand, PushArg, RuleCommand, Side};

/// 2 for unreadable or malformed input, 1 for everything else.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<std::io::Error>() {
            return 2;
        }
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::Parse { .. } | Error::Io(_) | Error::Symbol(_) => 2,
                _ => 1,
            };
        }
    }
    1
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let fmt = MachineFormat {
        semiring: cli.semiring.into(),
        isyms: cli.isyms,
        osyms: cli.osyms,
        acceptor: false,
    };
    match cli.command {
        Command::Fst(c) => fst(c, fmt),
        Command::Rule(c) => rule(c, fmt),
        Command::Lm(c) => lm(c),
        Command::Decode(args) => decode(args, fmt),
    }
}

fn fst(cmd: FstCommand, fmt: MachineFormat) -> Result<ExitCode> {
    let read = |p: &Path| fmt.read(p);
    let (result, out) = match cmd {
        FstCommand::Compile { input, acceptor, out } => {
            let f = MachineFormat {
                acceptor,
                ..fmt.clone()
            }
            .read(&input)?;
            f.validate()?;
            (f, out)
        }
        FstCommand::Print { input, dot, out } => {
            let f = read(&input)?;
            if dot {
                fio::write_output(out.output.as_deref(), &fio::dot(&f))?;
                return Ok(ExitCode::SUCCESS);
            }
            (f, out)
        }
        FstCommand::Compose { a, b, out } => (ops::compose(&read(&a)?, &read(&b)?)?, out),
        FstCommand::Intersect { a, b, out } => (ops::intersect(&read(&a)?, &read(&b)?)?, out),
        FstCommand::Union { a, b, out } => (ops::union(&read(&a)?, &read(&b)?)?, out),
        FstCommand::Concat { a, b, out } => (ops::concat(&read(&a)?, &read(&b)?)?, out),
        FstCommand::Closure { input, out } => (ops::closure(&read(&input)?)?, out),
        FstCommand::Reverse { input, out } => (ops::reverse(&read(&input)?), out),
        FstCommand::Project { input, side, out } => {
            let side = match side {
                Side::Input => ProjectSide::Input,
                Side::Output => ProjectSide::Output,
            };
            (ops::project(&read(&input)?, side), out)
        }
        FstCommand::Complement { input, out } => {
            let f = read(&input)?;
            let sigma = f.isymbols().map(|t| t.labels()).unwrap_or_else(|| f.alphabet(false));
            (ops::complement(&f, &sigma)?, out)
        }
        FstCommand::Difference { a, b, out } => (ops::difference(&read(&a)?, &read(&b)?)?, out),
        FstCommand::Determinize { input, cap, out } => (optimize::determinize_with(&read(&input)?, cap)?, out),
        FstCommand::Localdet { input, k, out } => (optimize::local_determinize(&read(&input)?, k)?, out),
        FstCommand::Push { input, mode, out } => {
            let mode = match mode {
                PushArg::Weights => PushMode::Weights,
                PushArg::Strings => PushMode::Strings,
            };
            (optimize::push(&read(&input)?, mode)?, out)
        }
        FstCommand::Minimize { input, out } => (optimize::minimize(&read(&input)?)?, out),
        FstCommand::Equivalent { a, b } => {
            let same = optimize::equivalent(&read(&a)?, &read(&b)?)?;
            println!("{}", if same { "equivalent" } else { "not equivalent" });
            return Ok(if same { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        FstCommand::Connect { input, out } => (wfst::fst::connect(&read(&input)?), out),
        FstCommand::Shortest { input, algo, out } => {
            let algo = match algo {
                AlgoArg::Acyclic => ShortestPathAlgo::Acyclic,
                AlgoArg::Dijkstra => ShortestPathAlgo::Dijkstra,
                AlgoArg::BellmanFord => ShortestPathAlgo::BellmanFord,
            };
            let d = shortest_distance(&read(&input)?, algo)?;
            let mut text = String::new();
            for (q, w) in d.iter().enumerate() {
                let _ = writeln!(text, "{q}\t{w}");
            }
            fio::write_output(out.output.as_deref(), &text)?;
            return Ok(ExitCode::SUCCESS);
        }
        FstCommand::Bestpath { input, out } => {
            let f = read(&input)?;
            let p = best_path(&f)?;
            let text = format!(
                "{}\t{}\t{}\n",
                fio::labels_to_text(f.isymbols(), &p.input),
                fio::labels_to_text(f.osymbols(), &p.output),
                p.weight
            );
            fio::write_output(out.output.as_deref(), &text)?;
            return Ok(ExitCode::SUCCESS);
        }
    };
    fio::write_machine(out.output.as_deref(), &result)?;
    Ok(ExitCode::SUCCESS)
}

/// Output lines of `rule apply`: the symbols, then the weight unless it is
/// the semiring one.
pub fn format_rewrites(f: &Fst, outputs: &[(Vec<u32>, wfst::Weight)]) -> String {
    let mut text = String::new();
    for (o, w) in outputs {
        let words = fio::labels_to_text(f.osymbols(), o);
        if f.semiring().is_one(*w) {
            let _ = writeln!(text, "{words}");
        } else {
            let _ = writeln!(text, "{words}\t{w}");
        }
    }
    text
}

fn rule(cmd: RuleCommand, fmt: MachineFormat) -> Result<ExitCode> {
    match cmd {
        RuleCommand::Compile { rules, out } => {
            let set =
                RuleSet::parse(&fio::read_input(&rules)?).with_context(|| format!("rule file {}", rules.display()))?;
            fio::write_machine(out.output.as_deref(), &set.compile()?)?;
        }
        RuleCommand::Tree { tree, out } => {
            let forest = DecisionForest::parse(&fio::read_input(&tree)?)
                .with_context(|| format!("tree file {}", tree.display()))?;
            fio::write_machine(out.output.as_deref(), &forest.compile()?)?;
        }
        RuleCommand::Apply { machine, input, best } => {
            let f = fmt.read(&machine)?;
            let labels = fio::tokens_to_labels(f.isymbols(), &input)?;
            let mode = if best { ApplyMode::Best } else { ApplyMode::All };
            let outputs = apply_rewrite(&f, &labels, mode)?;
            if outputs.is_empty() {
                eprintln!("wfst: no output for this input");
                return Ok(ExitCode::from(1));
            }
            print!("{}", format_rewrites(&f, &outputs));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn lm(cmd: LmCommand) -> Result<ExitCode> {
    match cmd {
        LmCommand::Count {
            corpus,
            n,
            no_boundaries,
            out,
        } => {
            let opts = CountOptions {
                order: n,
                boundaries: !no_boundaries,
            };
            let table = count_ngrams(&fio::read_input(&corpus)?, opts)?;
            fio::write_output(out.output.as_deref(), &table.write_text())?;
        }
        LmCommand::Build {
            counts,
            k_threshold,
            renormalize,
            out,
        } => {
            let table = CountTable::read_text(&fio::read_input(&counts)?)?;
            let degeneracy = if renormalize {
                Degeneracy::Renormalize
            } else {
                Degeneracy::Error
            };
            let model = katz_model_with(
                &table,
                KatzOptions {
                    k_threshold,
                    degeneracy,
                },
            )?;
            fio::write_output(out.output.as_deref(), &model.write_arpa())?;
        }
        LmCommand::Fsa { model, out } => {
            let m = BackoffModel::read_arpa(&fio::read_input(&model)?)?;
            fio::write_machine(out.output.as_deref(), &build_lm_fsa(&m))?;
        }
        LmCommand::Score { model, sentences } => {
            let m = BackoffModel::read_arpa(&fio::read_input(&model)?)?;
            let mut text = String::new();
            for line in fio::read_input(&sentences)?.lines() {
                let words: Vec<&str> = line.split_whitespace().collect();
                let _ = writeln!(text, "{}", m.cost_of_words(&words));
            }
            print!("{text}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Reads a cascade manifest: `machine [isyms [osyms]]` per line.
pub fn read_cascade(manifest: &Path, fmt: &MachineFormat) -> Result<Vec<Fst>> {
    let text = fio::read_input(manifest)?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let mut stages = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() || fields[0].starts_with('#') {
            continue;
        }
        if fields.len() > 3 {
            return Err(Error::Parse {
                line: i + 1,
                message: "expected `machine [isyms [osyms]]`".into(),
            })
            .context(format!("cascade {}", manifest.display()));
        }
        let stage_fmt = MachineFormat {
            isyms: fields.get(1).map(|p| base.join(p)),
            osyms: fields.get(2).or(fields.get(1)).map(|p| base.join(p)),
            ..fmt.clone()
        };
        stages.push(stage_fmt.read(&base.join(fields[0]))?);
    }
    if stages.is_empty() {
        bail!("cascade {} lists no machines", manifest.display());
    }
    Ok(stages)
}

fn decode(args: DecodeArgs, fmt: MachineFormat) -> Result<ExitCode> {
    let stages = read_cascade(&args.cascade, &fmt)?;
    let first = &stages[0];
    let last = stages.last().expect("non-empty cascade");
    let mut text = String::new();
    let mut failed = false;
    for line in fio::read_input(&args.observations)?.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let labels = fio::tokens_to_labels(first.isymbols(), line)?;
        let mut obs = Fst::linear(first.semiring(), &labels);
        obs.set_symbols(first.isymbols().map(Arc::clone));
        match beam_decode(&obs, &stages, args.beam) {
            Ok(d) => {
                let words = fio::labels_to_text(last.osymbols(), &d.output);
                let _ = writeln!(text, "{words}\t{}\texpanded={}", d.weight, d.expanded);
            }
            Err(Error::BeamExhausted) => {
                failed = true;
                eprintln!("wfst: `{line}`: {}", Error::BeamExhausted);
                let _ = writeln!(text, "\tinf\texpanded=0");
            }
            Err(e) => return Err(e.into()),
        }
    }
    fio::write_output(args.out.output.as_deref(), &text)?;
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}
