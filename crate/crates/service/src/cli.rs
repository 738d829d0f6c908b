//! `mdt` command line: batch translation, lexicon validation and the server.

use std::io::{self, Read, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use mdt_core::pipeline::AnalyzedSentence;
use mdt_core::xfer::{translate, translate_preanalyzed, TranslateOptions, TranslationResult};
use mdt_core::Lexicon;

use crate::accept::AcceptanceLog;
use crate::http::{router, AppState};

const USAGE: u8 = 1;
const LEXICON: u8 = 2;

#[derive(Parser)]
#[command(name = "mdt", version, about = "Translate with a bilingual group lexicon")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate sentences given as arguments, or one per stdin line.
    Translate(TranslateArgs),
    /// Check a lexicon directory and list its problems.
    Validate {
        /// Lexicon directory.
        dir: PathBuf,
    },
    /// Serve the HTTP API (and the UI, if built).
    Serve(ServeArgs),
}

#[derive(Args)]
struct LanguageArgs {
    #[arg(long, env = "MDT_LEXICON")]
    lexicon: PathBuf,
    /// Source language; defaults to the lexicon's.
    #[arg(long)]
    source: Option<String>,
    /// Target language; may be omitted when the lexicon has only one.
    #[arg(long)]
    target: Option<String>,
}

#[derive(Args)]
struct TranslateArgs {
    #[command(flatten)]
    langs: LanguageArgs,
    /// Print one JSON result document per sentence.
    #[arg(long)]
    json: bool,
    /// Cap on outputs per sentence.
    #[arg(long)]
    max: Option<usize>,
    /// Print intermediate steps to stderr (included in --json output).
    #[arg(long)]
    trace: bool,
    /// Largest number of skipped tokens between group items.
    #[arg(long, default_value_t = 0)]
    max_gap: usize,
    /// Input is pre-analyzed, one `surface<TAB>lexeme<TAB>pos<TAB>features` token per line.
    #[arg(long)]
    analyzed: bool,
    /// Sentence text; read from stdin when absent.
    text: Vec<String>,
}

#[derive(Args)]
struct ServeArgs {
    #[command(flatten)]
    langs: LanguageArgs,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// Acceptance log (JSON lines).
    #[arg(long, env = "MDT_LOG", default_value = "mdt-accept.jsonl")]
    log: PathBuf,
    /// Directory of static UI files served at `/`.
    #[arg(long, env = "MDT_UI")]
    ui: Option<PathBuf>,
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("mdt: {message}");
    ExitCode::from(code)
}

fn load(langs: &LanguageArgs) -> Result<(Lexicon, String, String), ExitCode> {
    let lexicon = Lexicon::load(&langs.lexicon).map_err(|e| {
        if let mdt_core::LexiconError::Invalid(diagnostics) = &e {
            for d in diagnostics {
                eprintln!("{d}");
            }
        }
        fail(LEXICON, e)
    })?;
    let source = langs.source.clone().unwrap_or_else(|| lexicon.source_lang().to_owned());
    let target = match &langs.target {
        Some(t) => t.clone(),
        None => {
            let targets: Vec<&str> = lexicon.target_langs().collect();
            match targets[..] {
                [only] => only.to_owned(),
                _ => return Err(fail(USAGE, "--target is required for this lexicon")),
            }
        }
    };
    Ok((lexicon, source, target))
}

pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli.command {
        Command::Translate(args) => run_translate(args),
        Command::Validate { dir } => run_validate(dir),
        Command::Serve(args) => run_serve(args),
    }
}

fn print_result(out: &mut impl Write, r: &TranslationResult, args: &TranslateArgs) -> io::Result<()> {
    if args.json {
        serde_json::to_writer(&mut *out, r)?;
        writeln!(out)?;
        return Ok(());
    }
    if let Some(trace) = &r.trace {
        eprintln!("# analyzed:    {}", trace.analyzed);
        eprintln!("# transformed: {}", trace.transformed);
        for line in &trace.candidates {
            eprintln!("# candidate:   {line}");
        }
        for (i, a) in r.assignments.iter().enumerate() {
            eprintln!("# assignment {} score ({}, {})", i + 1, a.score.0, a.score.1);
            for line in &a.instances {
                eprintln!("#   {line}");
            }
        }
        for line in &trace.transfers {
            eprintln!("# target:      {line}");
        }
    }
    for text in &r.texts {
        writeln!(out, "{text}")?;
    }
    Ok(())
}

fn run_translate(args: TranslateArgs) -> ExitCode {
    let (lexicon, source, target) = match load(&args.langs) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let options = TranslateOptions {
        max_outputs: args.max,
        trace: args.trace,
        max_gap: args.max_gap,
    };

    let input = if args.text.is_empty() {
        let mut buf = String::new();
        if let Err(e) = io::stdin().read_to_string(&mut buf) {
            return fail(USAGE, format!("reading stdin: {e}"));
        }
        buf
    } else {
        args.text.join(" ")
    };

    let results = if args.analyzed {
        // sentences are separated by blank lines
        input
            .split("\n\n")
            .filter(|block| !block.trim().is_empty())
            .map(|block| {
                let s = AnalyzedSentence::from_preanalyzed(block).map_err(|e| e.to_string())?;
                translate_preanalyzed(s, &lexicon, &source, &target, &options).map_err(|e| e.to_string())
            })
            .collect::<Result<Vec<_>, _>>()
    } else {
        input
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|line| translate(line, &lexicon, &source, &target, &options).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()
    };
    let results = match results {
        Ok(r) => r,
        Err(e) => return fail(USAGE, e),
    };

    let stdout = io::stdout();
    let mut out = stdout.lock();
    for (i, r) in results.iter().enumerate() {
        if i > 0 && !args.json {
            let _ = writeln!(out);
        }
        if let Err(e) = print_result(&mut out, r, &args) {
            return fail(USAGE, e);
        }
    }
    ExitCode::SUCCESS
}

fn run_validate(dir: PathBuf) -> ExitCode {
    match Lexicon::lint(&dir) {
        Ok(diagnostics) if diagnostics.is_empty() => {
            // lint passed, so loading cannot fail on diagnostics
            match Lexicon::load(&dir) {
                Ok(lex) => {
                    println!(
                        "{}: {} groups, {} rules, ok",
                        dir.display(),
                        lex.entries().len(),
                        lex.rules().len()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(LEXICON, e),
            }
        }
        Ok(diagnostics) => {
            for d in &diagnostics {
                println!("{d}");
            }
            eprintln!("mdt: {} problem(s) in {}", diagnostics.len(), dir.display());
            ExitCode::from(LEXICON)
        }
        Err(e) => fail(LEXICON, e),
    }
}

fn run_serve(args: ServeArgs) -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info,tower_http=info".into()),
        )
        .init();
    let (lexicon, _, target) = match load(&args.langs) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let addr: SocketAddr = match format!("{}:{}", args.host, args.port).parse() {
        Ok(a) => a,
        Err(e) => return fail(USAGE, format!("bad address: {e}")),
    };
    let state = Arc::new(AppState {
        lexicon,
        target,
        log: AcceptanceLog::new(&args.log),
    });
    let app = router(state.clone(), args.ui).layer(tower_http::trace::TraceLayer::new_for_http());

    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => return fail(USAGE, e),
    };
    runtime.block_on(async move {
        let listener = match tokio::net::TcpListener::bind(addr).await {
            Ok(l) => l,
            Err(e) => return fail(USAGE, format!("binding {addr}: {e}")),
        };
        tracing::info!(
            "serving {} groups on http://{addr}, accept log {}",
            state.lexicon.entries().len(),
            state.log.path().display()
        );
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        match axum::serve(listener, app).with_graceful_shutdown(shutdown).await {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(USAGE, e),
        }
    })
}
