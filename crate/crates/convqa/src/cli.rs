//! The `convqa` command line.
//!
//! Exit codes: 0 on success, 1 when arguments or inputs fail validation,
//! 2 when work fails after validation (for example an unwritable output).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use convqa_core::checker::{CheckerConfig, RuleChecker};
use convqa_core::ctm::{
    Answerer, CtmConfig, InvertingAnswerer, TabularAnswerer, entailed_eval_sets, make_oracle_answerer, predict,
    run_ctm, seed_with_source_questions,
};
use convqa_core::entailment::{DEFAULT_K, RuleGenerator};
use convqa_core::lexicon::SEED_LEXICON;
use convqa_core::metrics::{MetricsReport, MissingPolicy, Prediction, compare_reports, evaluate};
use convqa_core::qa_gen::{SplitRatios, split_dataset};
use convqa_core::{ConsistentSet, FilterConfig, Lexicon, SceneGraph, load_lexicon};
use serde_json::{Value, json};

use crate::formats::{
    read_graphs_strict, read_jsonl, read_name_counts, read_pairs, read_sets, write_jsonl, write_sets,
};
use crate::manifest::{InputDigest, RunDescription, digest_input, write_manifest};
use crate::pipeline::{check_pairs, corrupt_all, generate_from_jsonl};
use crate::review::{CleanExportPolicy, ReviewStore, system_clock};

#[derive(Debug, Parser)]
#[command(name = "convqa", version, about = "Consistent VQA dataset toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct LexiconArg {
    /// Lexicon file. Defaults to $CONVQA_LEXICON, then to the built-in seed lexicon.
    #[arg(long, env = "CONVQA_LEXICON")]
    pub lexicon: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnswererKind {
    Oracle,
    Inverting,
    Tabular,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate consistent QA sets from scene graphs.
    Generate {
        #[arg(long)]
        graphs: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        lexicon: LexiconArg,
        /// Object-name frequency table (name<TAB>count) enabling the name-count filter.
        #[arg(long)]
        name_counts: Option<PathBuf>,
        #[arg(long, default_value_t = 0.05)]
        min_area_fraction: f64,
        #[arg(long, default_value_t = 2)]
        min_name_count: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Synthesize labeled consistent / inconsistent / unrelated pairs.
    Corrupt {
        #[arg(long)]
        sets: PathBuf,
        #[arg(long)]
        graphs: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        lexicon: LexiconArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Split sets by image into train.jsonl, val.jsonl and test.jsonl.
    Split {
        #[arg(long)]
        sets: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 0.68)]
        train: f64,
        #[arg(long, default_value_t = 0.14)]
        val: f64,
        #[arg(long, default_value_t = 0.18)]
        test: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the consistency checker over labeled pairs.
    Check {
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Confusion matrix TSV; printed to standard output when omitted.
        #[arg(long)]
        confusion: Option<PathBuf>,
        #[arg(long, default_value_t = 0.9)]
        threshold: f64,
        #[command(flatten)]
        lexicon: LexiconArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the consistency-teacher loop.
    Ctm {
        #[arg(long)]
        sets: PathBuf,
        /// Scene graphs, required by the oracle and inverting answerers.
        #[arg(long)]
        graphs: Option<PathBuf>,
        #[arg(long, value_enum)]
        answerer: AnswererKind,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        #[arg(long, default_value_t = 0.7)]
        answer_threshold: f64,
        #[arg(long, default_value_t = 0.9)]
        checker_threshold: f64,
        /// Evaluation sets; defaults to the entailed questions of --sets.
        #[arg(long)]
        eval: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[command(flatten)]
        lexicon: LexiconArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Answer every question of a sets file with a reference answerer.
    Predict {
        #[arg(long)]
        sets: PathBuf,
        #[arg(long)]
        graphs: PathBuf,
        #[arg(long, value_enum, default_value = "oracle")]
        answerer: AnswererKind,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        lexicon: LexiconArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Score predictions against gold sets.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        preds: PathBuf,
        /// Write the report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Fail on missing predictions instead of counting them wrong.
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare two metric reports.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        tsv: bool,
    },
    /// Write the quorum-cleaned sets from a verdict log.
    ExportClean {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        verdicts: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 3)]
        reviewers_required: usize,
        #[arg(long, default_value_t = 2)]
        keep_quorum: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Serve sets to reviewers over HTTP.
    Serve {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        verdicts: PathBuf,
        #[arg(long)]
        images: Option<PathBuf>,
        /// Built review UI bundle served at /.
        #[arg(long)]
        ui: Option<PathBuf>,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long, default_value_t = 3)]
        reviewers_required: usize,
        #[arg(long, default_value_t = 2)]
        keep_quorum: usize,
    },
    /// Report lexicon hygiene issues.
    LexiconLint {
        #[command(flatten)]
        lexicon: LexiconArg,
    },
}

/// Why a command failed.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Runtime(m) => m,
        }
    }
}

type Outcome = Result<(), Failure>;

fn invalid(msg: impl std::fmt::Display) -> Failure {
    Failure::Validation(msg.to_string())
}

fn runtime(msg: impl std::fmt::Display) -> Failure {
    Failure::Runtime(msg.to_string())
}

/// Parses `argv` (program name first), runs the command, and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
    }
}

/// An input file read up front, with its digest for the manifest.
struct Input {
    bytes: Vec<u8>,
    digest: InputDigest,
}

impl Input {
    fn read(path: &Path, what: &str) -> Result<Self, Failure> {
        let bytes = std::fs::read(path).map_err(|e| invalid(format!("cannot read {what} {}: {e}", path.display())))?;
        let digest = digest_input(path, &bytes);
        Ok(Input { bytes, digest })
    }

    fn text(&self) -> Result<&str, Failure> {
        std::str::from_utf8(&self.bytes).map_err(|e| invalid(format!("{} is not UTF-8: {e}", self.digest.path)))
    }
}

fn check_output(path: &Path) -> Outcome {
    let parent = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    if !parent.is_dir() {
        return Err(invalid(format!("output directory {} does not exist", parent.display())));
    }
    if path.is_dir() {
        return Err(invalid(format!("output {} is a directory", path.display())));
    }
    Ok(())
}

fn write_output(path: &Path, contents: &str) -> Outcome {
    std::fs::write(path, contents).map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))
}

fn manifest(output: &Path, subcommand: &str, seed: u64, config: Value, inputs: Vec<InputDigest>) -> Outcome {
    let desc = RunDescription {
        tool: "convqa",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: subcommand.to_string(),
        seed,
        config,
        inputs,
    };
    write_manifest(output, &desc)
        .map(|_| ())
        .map_err(|e| runtime(format!("cannot write manifest for {}: {e}", output.display())))
}

fn load_lex(arg: &LexiconArg) -> Result<(Lexicon, Option<InputDigest>), Failure> {
    match &arg.lexicon {
        Some(path) => {
            let input = Input::read(path, "lexicon")?;
            let lex = load_lexicon(&input.bytes).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
            Ok((lex, Some(input.digest)))
        }
        None => Ok((Lexicon::parse(SEED_LEXICON).expect("seed lexicon parses"), None)),
    }
}

fn lexicon_source(arg: &LexiconArg) -> Value {
    match &arg.lexicon {
        Some(p) => json!(p.display().to_string()),
        None => json!("builtin"),
    }
}

fn parse_sets(input: &Input, path: &Path) -> Result<Vec<ConsistentSet>, Failure> {
    read_sets(input.text()?).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn parse_graphs(input: &Input, path: &Path) -> Result<BTreeMap<String, SceneGraph>, Failure> {
    let graphs = read_graphs_strict(input.text()?).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    Ok(graphs.into_iter().map(|g| (g.image_id().to_string(), g)).collect())
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Generate {
            graphs,
            out,
            lexicon,
            name_counts,
            min_area_fraction,
            min_name_count,
            jobs,
            seed,
        } => {
            if jobs == 0 {
                return Err(invalid("--jobs must be at least 1"));
            }
            check_output(&out)?;
            let (lex, lex_digest) = load_lex(&lexicon)?;
            let graphs_in = Input::read(&graphs, "scene graphs")?;
            let mut inputs = vec![graphs_in.digest.clone()];
            inputs.extend(lex_digest);
            let counts = match &name_counts {
                Some(p) => {
                    let input = Input::read(p, "name counts")?;
                    let table =
                        read_name_counts(input.text()?).map_err(|e| invalid(format!("{}: {e}", p.display())))?;
                    inputs.push(input.digest);
                    Some(table)
                }
                None => None,
            };
            let filter = FilterConfig {
                min_area_fraction,
                min_name_count,
                name_counts: counts,
            };
            filter.validate().map_err(invalid)?;
            let output = generate_from_jsonl(graphs_in.text()?, &lex, &filter, jobs).map_err(runtime)?;
            for e in &output.errors {
                eprintln!("warning: skipped record {}: {}", e.index + 1, e.error);
            }
            write_output(&out, &write_sets(&output.sets))?;
            eprintln!(
                "wrote {} sets ({} QA pairs); {} records skipped",
                output.sets.len(),
                output.sets.iter().map(|s| s.len()).sum::<usize>(),
                output.errors.len()
            );
            manifest(
                &out,
                "generate",
                seed,
                json!({
                    "graphs": graphs.display().to_string(),
                    "out": out.display().to_string(),
                    "lexicon": lexicon_source(&lexicon),
                    "min_area_fraction": min_area_fraction,
                    "min_name_count": min_name_count,
                    "name_counts": name_counts.as_ref().map(|p| p.display().to_string()),
                    "skipped_records": output.errors.len(),
                }),
                inputs,
            )
        }
        Command::Corrupt {
            sets,
            graphs,
            out,
            lexicon,
            seed,
        } => {
            check_output(&out)?;
            let (lex, lex_digest) = load_lex(&lexicon)?;
            let sets_in = Input::read(&sets, "sets")?;
            let graphs_in = Input::read(&graphs, "scene graphs")?;
            let set_list = parse_sets(&sets_in, &sets)?;
            let graph_map = parse_graphs(&graphs_in, &graphs)?;
            let (pairs, missing) = corrupt_all(&set_list, &graph_map, &lex, seed);
            if let Some(first) = missing.first() {
                return Err(invalid(format!(
                    "{} sets have no scene graph in {} (first: {first})",
                    missing.len(),
                    graphs.display()
                )));
            }
            write_output(&out, &write_jsonl(&pairs))?;
            let mut inputs = vec![sets_in.digest, graphs_in.digest];
            inputs.extend(lex_digest);
            manifest(
                &out,
                "corrupt",
                seed,
                json!({
                    "sets": sets.display().to_string(),
                    "graphs": graphs.display().to_string(),
                    "out": out.display().to_string(),
                    "lexicon": lexicon_source(&lexicon),
                }),
                inputs,
            )
        }
        Command::Split {
            sets,
            out_dir,
            train,
            val,
            test,
            seed,
        } => {
            let ratios = SplitRatios::new(train, val, test).map_err(invalid)?;
            if !out_dir.is_dir() {
                return Err(invalid(format!(
                    "output directory {} does not exist",
                    out_dir.display()
                )));
            }
            let sets_in = Input::read(&sets, "sets")?;
            let set_list = parse_sets(&sets_in, &sets)?;
            let split = split_dataset(set_list, &ratios).map_err(invalid)?;
            for (name, part) in [("train", &split.train), ("val", &split.val), ("test", &split.test)] {
                write_output(&out_dir.join(format!("{name}.jsonl")), &write_sets(part))?;
            }
            manifest(
                &out_dir.join("split"),
                "split",
                seed,
                json!({
                    "sets": sets.display().to_string(),
                    "out_dir": out_dir.display().to_string(),
                    "ratios": [train, val, test],
                    "counts": [split.train.len(), split.val.len(), split.test.len()],
                }),
                vec![sets_in.digest],
            )
        }
        Command::Check {
            pairs,
            out,
            confusion,
            threshold,
            lexicon,
            seed,
        } => {
            let cfg = CheckerConfig::new(threshold).map_err(invalid)?;
            check_output(&out)?;
            if let Some(c) = &confusion {
                check_output(c)?;
            }
            let (lex, lex_digest) = load_lex(&lexicon)?;
            let pairs_in = Input::read(&pairs, "labeled pairs")?;
            let records = read_pairs(pairs_in.text()?).map_err(|e| invalid(format!("{}: {e}", pairs.display())))?;
            let checker = RuleChecker::new(&lex);
            let (verdicts, matrix) = check_pairs(&records, &checker, &cfg).map_err(invalid)?;
            write_output(&out, &write_jsonl(&verdicts))?;
            match &confusion {
                Some(c) => write_output(c, &matrix.to_tsv())?,
                None => print!("{}", matrix.to_tsv()),
            }
            let precision = matrix.precision(convqa_core::ConsistencyLabel::Consistent);
            match precision {
                Some(p) => eprintln!("gated consistent precision: {p:.4}"),
                None => eprintln!("gated consistent precision: undefined (no consistent verdicts)"),
            }
            let mut inputs = vec![pairs_in.digest];
            inputs.extend(lex_digest);
            manifest(
                &out,
                "check",
                seed,
                json!({
                    "pairs": pairs.display().to_string(),
                    "out": out.display().to_string(),
                    "confusion": confusion.as_ref().map(|p| p.display().to_string()),
                    "threshold": threshold,
                    "lexicon": lexicon_source(&lexicon),
                }),
                inputs,
            )
        }
        Command::Ctm {
            sets,
            graphs,
            answerer,
            rounds,
            k,
            answer_threshold,
            checker_threshold,
            eval,
            out_dir,
            lexicon,
            seed,
        } => {
            let cfg = CtmConfig {
                answer_confidence_threshold: answer_threshold,
                checker: CheckerConfig::new(checker_threshold).map_err(invalid)?,
                k,
                rounds,
                seed,
            };
            cfg.validate().map_err(invalid)?;
            if !out_dir.is_dir() {
                return Err(invalid(format!(
                    "output directory {} does not exist",
                    out_dir.display()
                )));
            }
            let (lex, lex_digest) = load_lex(&lexicon)?;
            let sets_in = Input::read(&sets, "sets")?;
            let set_list = parse_sets(&sets_in, &sets)?;
            let mut inputs = vec![sets_in.digest];
            inputs.extend(lex_digest);

            let generator = RuleGenerator::new(&lex);
            let eval_sets = match &eval {
                Some(p) => {
                    let input = Input::read(p, "evaluation sets")?;
                    let s = parse_sets(&input, p)?;
                    inputs.push(input.digest);
                    s
                }
                None => entailed_eval_sets(&set_list, &generator, k),
            };
            let graph_list = match (&graphs, answerer) {
                (Some(p), _) => {
                    let input = Input::read(p, "scene graphs")?;
                    let g = parse_graphs(&input, p)?;
                    inputs.push(input.digest);
                    Some(g)
                }
                (None, AnswererKind::Tabular) => None,
                (None, _) => return Err(invalid("--graphs is required for the oracle and inverting answerers")),
            };
            let mut agent: Box<dyn Answerer> = match answerer {
                AnswererKind::Oracle => {
                    Box::new(make_oracle_answerer(graph_list.unwrap_or_default().into_values(), &lex))
                }
                AnswererKind::Inverting => Box::new(InvertingAnswerer(make_oracle_answerer(
                    graph_list.unwrap_or_default().into_values(),
                    &lex,
                ))),
                AnswererKind::Tabular => {
                    let mut t = TabularAnswerer::with_reader(&lex);
                    seed_with_source_questions(&mut t, &set_list);
                    Box::new(t)
                }
            };
            let checker = RuleChecker::new(&lex);
            let result = run_ctm(&set_list, &mut *agent, &generator, &checker, &cfg, &eval_sets).map_err(invalid)?;
            let examples: Vec<_> = result.examples.into_iter().flatten().collect();
            let augmented = out_dir.join("augmented.jsonl");
            let report = out_dir.join("report.json");
            write_output(&augmented, &write_jsonl(&examples))?;
            let mut report_json = serde_json::to_string_pretty(&result.report).expect("report serializes");
            report_json.push('\n');
            write_output(&report, &report_json)?;
            for r in &result.report.rounds {
                let m = r.metrics.as_ref();
                eprintln!(
                    "round {}: emitted {} of {} entailed; perf_con {}",
                    r.round,
                    r.stats.emitted,
                    r.stats.entailed,
                    m.map(|m| format!("{:.2}", m.perf_con)).unwrap_or_else(|| "n/a".into())
                );
            }
            manifest(
                &report,
                "ctm",
                seed,
                json!({
                    "sets": sets.display().to_string(),
                    "graphs": graphs.as_ref().map(|p| p.display().to_string()),
                    "eval": eval.as_ref().map(|p| p.display().to_string()),
                    "answerer": format!("{answerer:?}").to_lowercase(),
                    "rounds": rounds,
                    "k": k,
                    "answer_threshold": answer_threshold,
                    "checker_threshold": checker_threshold,
                    "lexicon": lexicon_source(&lexicon),
                    "outputs": [augmented.display().to_string(), report.display().to_string()],
                }),
                inputs,
            )
        }
        Command::Predict {
            sets,
            graphs,
            answerer,
            out,
            lexicon,
            seed,
        } => {
            check_output(&out)?;
            let (lex, lex_digest) = load_lex(&lexicon)?;
            let sets_in = Input::read(&sets, "sets")?;
            let graphs_in = Input::read(&graphs, "scene graphs")?;
            let set_list = parse_sets(&sets_in, &sets)?;
            let graph_map = parse_graphs(&graphs_in, &graphs)?;
            let oracle = make_oracle_answerer(graph_map.into_values(), &lex);
            let (preds, warnings) = match answerer {
                AnswererKind::Oracle => predict(&oracle, &set_list),
                AnswererKind::Inverting => predict(&InvertingAnswerer(oracle), &set_list),
                AnswererKind::Tabular => return Err(invalid("predict supports the oracle and inverting answerers")),
            };
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            write_output(&out, &write_jsonl(&preds))?;
            let mut inputs = vec![sets_in.digest, graphs_in.digest];
            inputs.extend(lex_digest);
            manifest(
                &out,
                "predict",
                seed,
                json!({
                    "sets": sets.display().to_string(),
                    "graphs": graphs.display().to_string(),
                    "answerer": format!("{answerer:?}").to_lowercase(),
                    "lexicon": lexicon_source(&lexicon),
                }),
                inputs,
            )
        }
        Command::Eval {
            gold,
            preds,
            report,
            strict,
            seed,
        } => {
            if let Some(r) = &report {
                check_output(r)?;
            }
            let gold_in = Input::read(&gold, "gold sets")?;
            let preds_in = Input::read(&preds, "predictions")?;
            let gold_sets = parse_sets(&gold_in, &gold)?;
            let predictions: Vec<Prediction> =
                read_jsonl(preds_in.text()?).map_err(|e| invalid(format!("{}: {e}", preds.display())))?;
            let policy = if strict {
                MissingPolicy::Error
            } else {
                MissingPolicy::CountWrong
            };
            let metrics = evaluate(&gold_sets, &predictions, policy).map_err(invalid)?;
            print!("{}", metrics_table(&metrics));
            if let Some(r) = &report {
                let mut text = serde_json::to_string_pretty(&metrics).expect("report serializes");
                text.push('\n');
                write_output(r, &text)?;
                manifest(
                    r,
                    "eval",
                    seed,
                    json!({
                        "gold": gold.display().to_string(),
                        "preds": preds.display().to_string(),
                        "strict": strict,
                    }),
                    vec![gold_in.digest, preds_in.digest],
                )?;
            }
            Ok(())
        }
        Command::Compare { a, b, tsv } => {
            let read_report = |p: &Path| -> Result<MetricsReport, Failure> {
                let input = Input::read(p, "report")?;
                serde_json::from_slice(&input.bytes).map_err(|e| invalid(format!("{}: {e}", p.display())))
            };
            let cmp = compare_reports(&read_report(&a)?, &read_report(&b)?);
            if tsv {
                print!("{}", cmp.to_tsv());
                for w in &cmp.warnings {
                    eprintln!("warning: {w}");
                }
            } else {
                print!("{}", cmp.to_text());
            }
            Ok(())
        }
        Command::ExportClean {
            dataset,
            verdicts,
            out,
            reviewers_required,
            keep_quorum,
            seed,
        } => {
            check_output(&out)?;
            let policy = CleanExportPolicy::new(reviewers_required, keep_quorum).map_err(invalid)?;
            let dataset_in = Input::read(&dataset, "dataset")?;
            let verdicts_in = Input::read(&verdicts, "verdict log")?;
            let set_list = parse_sets(&dataset_in, &dataset)?;
            let mut store = ReviewStore::open(set_list, None, policy, system_clock()).map_err(invalid)?;
            store
                .replay_log(verdicts_in.text()?)
                .map_err(|e| invalid(format!("{}: {e}", verdicts.display())))?;
            let clean = store.export_clean();
            write_output(&out, &write_sets(&clean))?;
            manifest(
                &out,
                "export-clean",
                seed,
                json!({
                    "dataset": dataset.display().to_string(),
                    "verdicts": verdicts.display().to_string(),
                    "reviewers_required": reviewers_required,
                    "keep_quorum": keep_quorum,
                }),
                vec![dataset_in.digest, verdicts_in.digest],
            )
        }
        Command::Serve {
            dataset,
            verdicts,
            images,
            ui,
            port,
            host,
            reviewers_required,
            keep_quorum,
        } => {
            let policy = CleanExportPolicy::new(reviewers_required, keep_quorum).map_err(invalid)?;
            for dir in images.iter().chain(ui.iter()) {
                if !dir.is_dir() {
                    return Err(invalid(format!("{} is not a directory", dir.display())));
                }
            }
            check_output(&verdicts)?;
            let dataset_in = Input::read(&dataset, "dataset")?;
            let set_list = parse_sets(&dataset_in, &dataset)?;
            let store = ReviewStore::open(set_list, Some(&verdicts), policy, system_clock()).map_err(invalid)?;
            let app = crate::server::router(store, images, ui);
            let rt = tokio::runtime::Runtime::new().map_err(runtime)?;
            rt.block_on(crate::server::serve(app, SocketAddr::new(host, port)))
                .map_err(runtime)
        }
        Command::LexiconLint { lexicon } => {
            let (lex, _) = load_lex(&lexicon)?;
            let issues = lex.lint();
            for issue in &issues {
                println!("{issue}");
            }
            eprintln!("{} lint issues", issues.len());
            Ok(())
        }
    }
}

/// Aligned text rendering of a metrics report.
pub fn metrics_table(m: &MetricsReport) -> String {
    let mut out = format!("{:<12} {:>8}\n", "metric", "value");
    out.push_str(&format!("{:<12} {:>8.2}\n", "perf_con", m.perf_con));
    out.push_str(&format!("{:<12} {:>8.2}\n", "avg_con", m.avg_con));
    out.push_str(&format!("{:<12} {:>8.2}\n", "top1", m.top1));
    if let Some(v) = m.yes_no_top1 {
        out.push_str(&format!("{:<12} {:>8.2}\n", "yes_no_top1", v));
    }
    if let Some(v) = m.wh_top1 {
        out.push_str(&format!("{:<12} {:>8.2}\n", "wh_top1", v));
    }
    out.push_str(&format!("{:<12} {:>8}\n", "n_sets", m.n_sets));
    out.push_str(&format!("{:<12} {:>8}\n", "n_questions", m.n_questions));
    out
}
