//! Command-line definition and command implementations.
//!
//! Exit codes: 0 on success (warnings allowed), 1 when any error diagnostic
//! was reported, 2 for usage and I/O problems. Diagnostics go to stderr,
//! artifacts to stdout or the `-o` file.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand};
use eatxt_core::diagnostic::has_errors;
use eatxt_core::migrate::migrate;
use eatxt_core::services::{complete, expand_template, outline, CompletionKind};
use eatxt_core::{
    emit, from_eaxml, keyword_suggest, parse, to_eaxml, validate, Code, Diagnostic, ElementKind, Model, SchemaVersion,
};
use serde_json::json;

use crate::files::{write_atomic, Notation};
use crate::sync::{Outcome, Poller, Side, SyncEngine};

#[derive(Debug, Parser)]
#[command(
    name = "eatxt",
    version,
    about = "Textual EAST-ADL models: check, format, convert, migrate"
)]
pub struct Cli {
    /// Schema version the tool works in.
    #[arg(long, global = true, env = "EATXT_SCHEMA", default_value = "2.2", value_parser = parse_version)]
    pub schema: SchemaVersion,

    /// Print diagnostics (and outlines, completions) as JSON.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

fn parse_version(s: &str) -> Result<SchemaVersion, String> {
    s.parse::<SchemaVersion>().map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a .eatxt or EAXML file.
    Check { file: PathBuf },
    /// Print a .eatxt file in canonical layout.
    Fmt {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Rewrite the file in place.
        #[arg(long, conflicts_with = "output")]
        write: bool,
    },
    /// Convert .eatxt to EAXML.
    Export {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Convert EAXML to .eatxt.
    Import {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Migrate files written for another schema version instead of failing.
        #[arg(long)]
        auto_migrate: bool,
    },
    /// Rewrite an EAXML file for another schema version.
    Migrate {
        input: PathBuf,
        #[arg(long, value_parser = parse_version)]
        to: SchemaVersion,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Show the element tree, expanding prototypes through their types.
    Outline {
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        depth: usize,
    },
    /// Propose completions at a byte offset of a .eatxt file.
    Complete {
        file: PathBuf,
        #[arg(long)]
        offset: usize,
    },
    /// Print the skeleton of a new element.
    Template {
        kind: String,
        #[arg(long)]
        name: String,
    },
    /// Convert the newer of a .eatxt/EAXML pair onto the other; with
    /// --watch, keep them in step.
    Sync {
        text: PathBuf,
        xml: PathBuf,
        #[arg(long)]
        watch: bool,
        /// Poll interval in milliseconds.
        #[arg(long, default_value_t = 200)]
        interval: u64,
        /// Stop watching after this many polls.
        #[arg(long, hide = true)]
        max_polls: Option<u64>,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIAGNOSTICS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Parses `args` (program name first) and runs the command.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                let _ = write!(out, "{}", e.render());
                EXIT_OK
            }
        }
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn diagnostics(&mut self, path: &Path, diags: &[Diagnostic]) {
        let shown = path.display().to_string();
        for d in diags {
            let line = if self.cli.json {
                json!({
                    "path": shown,
                    "line": d.span.line,
                    "column": d.span.column,
                    "severity": d.severity.to_string(),
                    "code": d.code.as_str(),
                    "message": d.message,
                    "hint": d.hint,
                })
                .to_string()
            } else {
                d.render(&shown)
            };
            let _ = writeln!(self.err, "{line}");
        }
    }

    fn fail(&mut self, message: impl std::fmt::Display) -> i32 {
        let _ = writeln!(self.err, "error: {message}");
        EXIT_USAGE
    }

    /// Writes an artifact to `-o` atomically or to stdout.
    fn emit_artifact(&mut self, output: Option<&Path>, contents: &str) -> i32 {
        match output {
            Some(p) => match write_atomic(p, contents) {
                Ok(()) => EXIT_OK,
                Err(e) => self.fail(format!("cannot write {}: {e}", p.display())),
            },
            None => match self.out.write_all(contents.as_bytes()) {
                Ok(()) => EXIT_OK,
                Err(e) => self.fail(e),
            },
        }
    }

    fn read(&mut self, path: &Path) -> Result<String, i32> {
        fs::read_to_string(path).map_err(|e| self.fail(format!("cannot read {}: {e}", path.display())))
    }

    fn notation(&mut self, path: &Path) -> Result<Notation, i32> {
        Notation::of(path).ok_or_else(|| {
            self.fail(format!(
                "cannot tell the notation of {}; use .eatxt or .eaxml",
                path.display()
            ))
        })
    }

    /// Loads a model from either notation. Returns `Err(exit code)` when
    /// nothing usable could be loaded.
    fn load(&mut self, path: &Path) -> Result<(Model, Vec<Diagnostic>), i32> {
        let notation = self.notation(path)?;
        let source = self.read(path)?;
        match notation {
            Notation::Text => {
                let (model, mut diags) = parse(&source, self.cli.schema);
                if !has_errors(&diags) {
                    diags.extend(validate(&model));
                }
                Ok((model, diags))
            }
            Notation::Xml => match from_eaxml(&source, Some(self.cli.schema)) {
                Ok(loaded) => Ok((loaded.model, loaded.diagnostics)),
                Err(diags) => {
                    self.diagnostics(path, &diags);
                    Err(EXIT_DIAGNOSTICS)
                }
            },
        }
    }
}

fn status(diags: &[Diagnostic]) -> i32 {
    if has_errors(diags) {
        EXIT_DIAGNOSTICS
    } else {
        EXIT_OK
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut ctx = Ctx { cli, out, err };
    let result = match &cli.command {
        Command::Check { file } => check(&mut ctx, file),
        Command::Fmt { file, output, write } => fmt(&mut ctx, file, output.as_deref(), *write),
        Command::Export { input, output } => export(&mut ctx, input, output.as_deref()),
        Command::Import {
            input,
            output,
            auto_migrate,
        } => import(&mut ctx, input, output.as_deref(), *auto_migrate),
        Command::Migrate { input, to, output } => migrate_cmd(&mut ctx, input, *to, output.as_deref()),
        Command::Outline { file, depth } => outline_cmd(&mut ctx, file, *depth),
        Command::Complete { file, offset } => complete_cmd(&mut ctx, file, *offset),
        Command::Template { kind, name } => template(&mut ctx, kind, name),
        Command::Sync {
            text,
            xml,
            watch,
            interval,
            max_polls,
        } => sync(&mut ctx, text, xml, *watch, *interval, *max_polls),
    };
    result.unwrap_or_else(|code| code)
}

fn check(ctx: &mut Ctx<'_>, file: &Path) -> Result<i32, i32> {
    let (model, diags) = ctx.load(file)?;
    ctx.diagnostics(file, &diags);
    if !has_errors(&diags) && !ctx.cli.json {
        let _ = writeln!(ctx.out, "{}: ok ({} elements)", file.display(), model.element_count());
    }
    Ok(status(&diags))
}

fn fmt(ctx: &mut Ctx<'_>, file: &Path, output: Option<&Path>, in_place: bool) -> Result<i32, i32> {
    let source = ctx.read(file)?;
    let (formatted, diags) = eatxt_core::format(&source, ctx.cli.schema);
    ctx.diagnostics(file, &diags);
    if has_errors(&diags) {
        return Ok(EXIT_DIAGNOSTICS);
    }
    let target = if in_place { Some(file) } else { output };
    Ok(ctx.emit_artifact(target, &formatted))
}

fn export(ctx: &mut Ctx<'_>, input: &Path, output: Option<&Path>) -> Result<i32, i32> {
    if ctx.notation(input)? != Notation::Text {
        return Err(ctx.fail("export reads a .eatxt file"));
    }
    let (model, diags) = ctx.load(input)?;
    ctx.diagnostics(input, &diags);
    if has_errors(&diags) {
        return Ok(EXIT_DIAGNOSTICS);
    }
    match to_eaxml(&model) {
        Ok(xml) => Ok(ctx.emit_artifact(output, &xml)),
        Err(d) => {
            ctx.diagnostics(input, &d);
            Ok(EXIT_DIAGNOSTICS)
        }
    }
}

fn import(ctx: &mut Ctx<'_>, input: &Path, output: Option<&Path>, auto_migrate: bool) -> Result<i32, i32> {
    let source = ctx.read(input)?;
    let target = ctx.cli.schema;
    let expected = if auto_migrate { None } else { Some(target) };
    let loaded = match from_eaxml(&source, expected) {
        Ok(l) => l,
        Err(d) => {
            ctx.diagnostics(input, &d);
            return Ok(EXIT_DIAGNOSTICS);
        }
    };
    let mut diags = loaded.diagnostics;
    if has_errors(&diags) {
        ctx.diagnostics(input, &diags);
        return Ok(EXIT_DIAGNOSTICS);
    }
    let mut model = loaded.model;
    if loaded.version != target {
        match migrate(&model, target) {
            Ok((migrated, report)) => {
                diags.extend(report.warnings);
                diags.extend(validate(&migrated));
                model = migrated;
            }
            Err(e) => {
                diags.push(Diagnostic::new(
                    Code::E005,
                    eatxt_core::Span::new(2, 1, 0, 0),
                    e.to_string(),
                ));
            }
        }
    }
    ctx.diagnostics(input, &diags);
    if has_errors(&diags) {
        return Ok(EXIT_DIAGNOSTICS);
    }
    Ok(ctx.emit_artifact(output, &emit(&model)))
}

fn migrate_cmd(ctx: &mut Ctx<'_>, input: &Path, to: SchemaVersion, output: Option<&Path>) -> Result<i32, i32> {
    let source = ctx.read(input)?;
    match eatxt_core::migrate_file(&source, to) {
        Ok((xml, report)) => {
            ctx.diagnostics(input, &report.warnings);
            for applied in &report.applied {
                let _ = writeln!(ctx.err, "applied: {} ({})", applied.rule, applied.element);
            }
            Ok(ctx.emit_artifact(output, &xml))
        }
        Err(d) => {
            ctx.diagnostics(input, &d);
            Ok(EXIT_DIAGNOSTICS)
        }
    }
}

fn outline_cmd(ctx: &mut Ctx<'_>, file: &Path, depth: usize) -> Result<i32, i32> {
    let (model, mut diags) = ctx.load(file)?;
    if has_errors(&diags) {
        ctx.diagnostics(file, &diags);
        return Ok(EXIT_DIAGNOSTICS);
    }
    let tree = outline(&model, depth);
    // Validation already reports unresolved types; avoid saying it twice.
    for d in tree.diagnostics.iter() {
        if !diags.contains(d) {
            diags.push(d.clone());
        }
    }
    ctx.diagnostics(file, &diags);
    let text = if ctx.cli.json {
        serde_json::to_string_pretty(&tree.nodes).expect("outline serializes") + "\n"
    } else {
        tree.render()
    };
    let code = ctx.emit_artifact(None, &text);
    Ok(if code == EXIT_OK { status(&diags) } else { code })
}

fn complete_cmd(ctx: &mut Ctx<'_>, file: &Path, offset: usize) -> Result<i32, i32> {
    let source = ctx.read(file)?;
    if offset > source.len() {
        return Err(ctx.fail(format!(
            "offset {offset} is past the end of {} ({} bytes)",
            file.display(),
            source.len()
        )));
    }
    let items = complete(&source, offset, ctx.cli.schema);
    let text = if ctx.cli.json {
        let list: Vec<_> = items
            .iter()
            .map(|i| {
                json!({
                    "label": i.label,
                    "insertText": i.insert_text,
                    "kind": format!("{:?}", i.kind).to_lowercase(),
                })
            })
            .collect();
        serde_json::to_string_pretty(&list).expect("items serialize") + "\n"
    } else {
        items
            .iter()
            .map(|i| {
                let kind = match i.kind {
                    CompletionKind::Template => "template",
                    CompletionKind::Attribute => "attribute",
                    CompletionKind::Literal => "literal",
                    CompletionKind::Reference => "reference",
                };
                format!("{}\t{kind}\n", i.label)
            })
            .collect()
    };
    Ok(ctx.emit_artifact(None, &text))
}

fn template(ctx: &mut Ctx<'_>, kind: &str, name: &str) -> Result<i32, i32> {
    let Some(k) = ElementKind::from_keyword(kind) else {
        let keywords: Vec<&str> = ElementKind::ALL.iter().map(|k| k.keyword()).collect();
        let hint = keyword_suggest(kind, &keywords)
            .map(|s| format!("; did you mean '{s}'?"))
            .unwrap_or_default();
        return Err(ctx.fail(format!("unknown element kind '{kind}'{hint}")));
    };
    if !eatxt_core::model::is_identifier(name) {
        return Err(ctx.fail(format!("'{name}' is not a valid shortName")));
    }
    Ok(ctx.emit_artifact(None, &expand_template(k, name)))
}

fn newer(a: &Path, b: &Path) -> Option<Side> {
    let mtime = |p: &Path| fs::metadata(p).and_then(|m| m.modified()).ok();
    match (mtime(a), mtime(b)) {
        (Some(x), Some(y)) => Some(if y > x { Side::Xml } else { Side::Text }),
        (Some(_), None) => Some(Side::Text),
        (None, Some(_)) => Some(Side::Xml),
        (None, None) => None,
    }
}

fn sync(
    ctx: &mut Ctx<'_>,
    text: &Path,
    xml: &Path,
    watch: bool,
    interval: u64,
    max_polls: Option<u64>,
) -> Result<i32, i32> {
    if Notation::of(text) != Some(Notation::Text) || Notation::of(xml) != Some(Notation::Xml) {
        return Err(ctx.fail("sync takes a .eatxt file and an .eaxml file, in that order"));
    }
    let Some(side) = newer(text, xml) else {
        return Err(ctx.fail(format!("neither {} nor {} exists", text.display(), xml.display())));
    };
    let mut engine = SyncEngine::new(text, xml, ctx.cli.schema);
    let first = engine.push(side);
    let _ = engine.report(&first, ctx.err);
    let code = match first {
        Outcome::Failed(..) => EXIT_DIAGNOSTICS,
        _ => EXIT_OK,
    };
    if !watch {
        return Ok(code);
    }
    let mut poller = Poller::new(text, xml, Duration::from_millis(interval.max(1)));
    poller.max_polls = max_polls;
    let _ = writeln!(ctx.err, "watching {} and {}", text.display(), xml.display());
    engine.run(&mut poller, ctx.err);
    Ok(EXIT_OK)
}
