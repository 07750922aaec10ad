//! Command-line front end: parse sentences, check grammars, run regression
//! corpora.
//!
//! Exit codes: 0 success (models found / all checks clean / all lines pass),
//! 1 negative outcome (no parse / violations / failing lines), 2 errors
//! (unreadable or malformed inputs, unknown words), 3 search budget
//! exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use igdep::corpus::{parse_corpus, run_corpus};
use igdep::deps::{extract, relabel_with_functions};
use igdep::engine::{parse_all, EngineError, ParseOutcome, SearchLimits};
use igdep::grammar::{tokenize, GrammarLexicon};
use igdep::metrics::MetricsReport;
use igdep::{assets, ParseModel};

#[derive(Parser)]
#[command(
    name = "igdep",
    version,
    about = "Polarized tree-description parsing with dependency extraction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a sentence and emit its tree, dependency graph and metrics.
    Parse(ParseArgs),
    /// Validate a grammar file and its connectivity condition.
    Check(CheckArgs),
    /// Run an accept/reject corpus against a grammar.
    Corpus(CorpusArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Json,
    Dot,
    Bracketed,
}

#[derive(Args)]
struct ParseArgs {
    /// Grammar file; the bundled toy grammar when omitted.
    #[arg(short, long)]
    grammar: Option<PathBuf>,
    /// Sentence to parse (whitespace-tokenized).
    #[arg(short, long)]
    sentence: String,
    /// Output format for the dependency graph.
    #[arg(short, long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    /// Emit every model instead of the first one.
    #[arg(long)]
    all_models: bool,
    /// Label edges with the `funct` feature of the saturation site.
    #[arg(long)]
    label_funct: bool,
    #[arg(long, default_value_t = SearchLimits::default().max_merges)]
    max_merges: usize,
    #[arg(long, default_value_t = SearchLimits::default().timeout_ms)]
    timeout_ms: u64,
}

#[derive(Args)]
struct CheckArgs {
    /// Grammar file; the bundled toy grammar when omitted.
    #[arg(short, long)]
    grammar: Option<PathBuf>,
}

#[derive(Args)]
struct CorpusArgs {
    /// Corpus file, one `<ok|bad>\t<sentence>[\t<edges>]` record per line.
    #[arg(short, long)]
    corpus: PathBuf,
    /// Grammar file; the bundled fragment variant of the toy grammar when
    /// omitted (the bundled corpus pairs with it).
    #[arg(short, long)]
    grammar: Option<PathBuf>,
    #[arg(long, default_value_t = SearchLimits::default().max_merges)]
    max_merges: usize,
    #[arg(long, default_value_t = SearchLimits::default().timeout_ms)]
    timeout_ms: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Parse(args) => cmd_parse(args),
        Command::Check(args) => cmd_check(args),
        Command::Corpus(args) => cmd_corpus(args),
    };
    ExitCode::from(code)
}

fn read_grammar(path: &Option<PathBuf>, default_source: &str) -> Result<GrammarLexicon, u8> {
    let source = match path {
        None => default_source.to_string(),
        Some(path) => match std::fs::read_to_string(path) {
            Ok(source) => source,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return Err(2);
            }
        },
    };
    GrammarLexicon::from_str(&source).map_err(|e| {
        eprintln!("error: {e}");
        2
    })
}

fn cmd_parse(args: ParseArgs) -> u8 {
    let grammar = match read_grammar(&args.grammar, assets::TOY_GRAMMAR) {
        Ok(grammar) => grammar,
        Err(code) => return code,
    };
    let tokens = tokenize(&args.sentence);
    if tokens.is_empty() {
        eprintln!("error: the sentence has no tokens");
        return 2;
    }
    let limits = SearchLimits {
        max_merges: args.max_merges,
        timeout_ms: args.timeout_ms,
        ..SearchLimits::default()
    };
    let outcome = match parse_all(&grammar, &tokens, limits) {
        Ok(outcome) => outcome,
        Err(e @ EngineError::LimitExceeded { .. }) => {
            eprintln!("error: {e}");
            return 3;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if outcome.models.is_empty() {
        report_no_parse(&outcome);
        return 1;
    }
    let shown: Vec<&ParseModel> = if args.all_models {
        outcome.models.iter().collect()
    } else {
        vec![&outcome.models[0]]
    };
    let total = shown.len();
    for (i, model) in shown.into_iter().enumerate() {
        println!("# model {}/{total}", i + 1);
        println!("# tree");
        println!("{}", model.bracketed());
        let mut graph = extract(model);
        if args.label_funct {
            graph = relabel_with_functions(&graph, model);
        }
        match args.format {
            Format::Bracketed => {}
            Format::Tsv => {
                println!("# dependencies (tsv)");
                print!("{}", graph.to_tsv());
            }
            Format::Json => {
                println!("# dependencies (json)");
                println!("{}", graph.to_json_string());
            }
            Format::Dot => {
                println!("# dependencies (dot)");
                print!("{}", graph.to_dot());
            }
        }
        println!("# metrics");
        println!("{}", MetricsReport::of(&graph).to_json_string());
    }
    0
}

fn report_no_parse(outcome: &ParseOutcome) {
    eprintln!(
        "no parse: tried {} lexical selection(s), {} merge(s)",
        outcome.diagnostic.selections_tried, outcome.diagnostic.merges
    );
    if let Some(best) = outcome.diagnostic.best_partial {
        eprintln!(
            "best partial saturation: {}/{} merged sets saturated, {} open pole(s), {} unattached virtual(s)",
            best.saturated_classes, best.total_classes, best.open_poles, best.open_virtuals
        );
    }
}

fn cmd_check(args: CheckArgs) -> u8 {
    let source = match &args.grammar {
        None => assets::TOY_GRAMMAR.to_string(),
        Some(path) => match std::fs::read_to_string(path) {
            Ok(source) => source,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return 2;
            }
        },
    };
    let report = match GrammarLexicon::load_with_report(&source) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let mut clean = true;
    for (word, entry, violations) in &report.violations {
        clean = false;
        for violation in violations {
            println!("invalid: `{word}` entry {entry}: {violation}");
        }
    }
    let offenders = report.lexicon.check_connectivity_condition();
    for (word, entry) in &offenders {
        clean = false;
        println!(
            "connectivity: `{word}` entry {entry} has no positive, negative or dependency-virtual node"
        );
    }
    if clean {
        println!(
            "ok: {} word(s), all entries well-formed, connectivity condition holds",
            report.lexicon.word_count()
        );
        0
    } else {
        1
    }
}

fn cmd_corpus(args: CorpusArgs) -> u8 {
    let grammar = match read_grammar(&args.grammar, assets::TOY_FRAGMENTS_GRAMMAR) {
        Ok(grammar) => grammar,
        Err(code) => return code,
    };
    let source = match std::fs::read_to_string(&args.corpus) {
        Ok(source) => source,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.corpus.display());
            return 2;
        }
    };
    let lines = match parse_corpus(&source) {
        Ok(lines) => lines,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let limits = SearchLimits {
        max_merges: args.max_merges,
        timeout_ms: args.timeout_ms,
        ..SearchLimits::default()
    };
    let report = run_corpus(&grammar, &lines, limits);
    for result in &report.results {
        let status = if result.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} line {}: {} ({})",
            result.number, result.sentence, result.detail
        );
    }
    println!("passed {}/{}", report.passed, report.passed + report.failed);
    if report.all_passed() {
        0
    } else {
        1
    }
}
