//! Keeps a `.eatxt` file and an EAXML file in step.
//!
//! The engine remembers a digest for each side: the content it last read or
//! wrote there. A change event whose digest matches the remembered one is an
//! echo of the engine's own write and is ignored, which is what stops the
//! two files from converting back and forth forever.
//!
//! If both sides changed since the last sync the engine enters a conflict,
//! reports both paths and converts nothing until one side is edited again.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use eatxt_core::diagnostic::has_errors;
use eatxt_core::{emit, from_eaxml, parse, to_eaxml, validate, Code, Diagnostic, SchemaVersion, Span};

use crate::files::{digest, file_digest, write_atomic};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Text,
    Xml,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Text => Side::Xml,
            Side::Xml => Side::Text,
        }
    }
}

/// A notification that one of the files may have changed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    Changed(Side),
}

pub trait EventSource {
    /// Blocks until the next event; `None` ends the session.
    fn next_event(&mut self) -> Option<Event>;
}

/// Replays a fixed list of events. Used by tests.
impl<I: Iterator<Item = Event>> EventSource for I {
    fn next_event(&mut self) -> Option<Event> {
        self.next()
    }
}

/// Polls both files every `interval` and reports content changes.
pub struct Poller {
    text: PathBuf,
    xml: PathBuf,
    interval: Duration,
    /// Last digests seen, text first.
    seen: [Option<String>; 2],
    pending: Vec<Event>,
    /// Stop after this many polls (`None` polls forever).
    pub max_polls: Option<u64>,
    polls: u64,
}

impl Poller {
    pub fn new(text: &Path, xml: &Path, interval: Duration) -> Self {
        Poller {
            text: text.to_path_buf(),
            xml: xml.to_path_buf(),
            interval,
            seen: [file_digest(text), file_digest(xml)],
            pending: Vec::new(),
            max_polls: None,
            polls: 0,
        }
    }
}

impl EventSource for Poller {
    fn next_event(&mut self) -> Option<Event> {
        loop {
            if let Some(e) = self.pending.pop() {
                return Some(e);
            }
            if self.max_polls.is_some_and(|m| self.polls >= m) {
                return None;
            }
            thread::sleep(self.interval);
            self.polls += 1;
            // Queue is popped from the back: text changes are handled first.
            for (slot, side) in [(1, Side::Xml), (0, Side::Text)] {
                let path = if side == Side::Text { &self.text } else { &self.xml };
                let now = file_digest(path);
                if now.is_some() && now != self.seen[slot] {
                    self.seen[slot] = now;
                    self.pending.push(Event::Changed(side));
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// The event's side was converted onto the other side.
    Converted(Side),
    /// Nothing new on that side (typically the echo of our own write).
    Unchanged,
    /// Both sides changed; nothing was converted.
    Conflict,
    /// Still in conflict and this side has not moved since it began.
    StillConflicted,
    /// The changed side did not convert cleanly; nothing was written.
    Failed(Side, Vec<Diagnostic>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum State {
    InSync,
    /// Digests of both sides when the conflict was detected.
    Conflict {
        text: Option<String>,
        xml: Option<String>,
    },
}

pub struct SyncEngine {
    pub text_path: PathBuf,
    pub xml_path: PathBuf,
    pub version: SchemaVersion,
    text_digest: Option<String>,
    xml_digest: Option<String>,
    pub state: State,
    pub conversions: usize,
}

impl SyncEngine {
    /// Starts from the files as they are now, treating them as in step.
    pub fn new(text_path: &Path, xml_path: &Path, version: SchemaVersion) -> Self {
        SyncEngine {
            text_path: text_path.to_path_buf(),
            xml_path: xml_path.to_path_buf(),
            version,
            text_digest: file_digest(text_path),
            xml_digest: file_digest(xml_path),
            state: State::InSync,
            conversions: 0,
        }
    }

    fn path(&self, side: Side) -> &Path {
        match side {
            Side::Text => &self.text_path,
            Side::Xml => &self.xml_path,
        }
    }

    fn recorded(&self, side: Side) -> &Option<String> {
        match side {
            Side::Text => &self.text_digest,
            Side::Xml => &self.xml_digest,
        }
    }

    fn record(&mut self, side: Side, d: Option<String>) {
        match side {
            Side::Text => self.text_digest = d,
            Side::Xml => self.xml_digest = d,
        }
    }

    /// Converts `side` onto the other file unconditionally (one-shot sync).
    pub fn push(&mut self, side: Side) -> Outcome {
        let source = match fs::read_to_string(self.path(side)) {
            Ok(s) => s,
            Err(e) => {
                return Outcome::Failed(
                    side,
                    vec![Diagnostic::new(
                        Code::E001,
                        Span::start(),
                        format!("cannot read {}: {e}", self.path(side).display()),
                    )],
                )
            }
        };
        let converted = match side {
            Side::Text => text_to_xml(&source, self.version),
            Side::Xml => xml_to_text(&source, self.version),
        };
        let output = match converted {
            Ok(o) => o,
            Err(d) => return Outcome::Failed(side, d),
        };
        let target = self.path(side.other()).to_path_buf();
        if let Err(e) = write_atomic(&target, &output) {
            return Outcome::Failed(
                side,
                vec![Diagnostic::new(
                    Code::E001,
                    Span::start(),
                    format!("cannot write {}: {e}", target.display()),
                )],
            );
        }
        self.record(side, Some(digest(source.as_bytes())));
        self.record(side.other(), Some(digest(output.as_bytes())));
        self.state = State::InSync;
        self.conversions += 1;
        Outcome::Converted(side)
    }

    pub fn handle(&mut self, event: Event) -> Outcome {
        let Event::Changed(side) = event;
        let now = file_digest(self.path(side));
        if now.is_none() || &now == self.recorded(side) {
            return Outcome::Unchanged;
        }
        if let State::Conflict { text, xml } = &self.state {
            let at_conflict = if side == Side::Text { text } else { xml };
            if &now == at_conflict {
                return Outcome::StillConflicted;
            }
            return self.push(side);
        }
        let other_now = file_digest(self.path(side.other()));
        if other_now.is_some() && &other_now != self.recorded(side.other()) {
            let (text, xml) = match side {
                Side::Text => (now, other_now),
                Side::Xml => (other_now, now),
            };
            self.state = State::Conflict { text, xml };
            return Outcome::Conflict;
        }
        self.push(side)
    }

    /// Handles events until the source ends, reporting to `err`.
    pub fn run(&mut self, source: &mut dyn EventSource, err: &mut dyn Write) {
        while let Some(event) = source.next_event() {
            let outcome = self.handle(event);
            let _ = self.report(&outcome, err);
        }
    }

    pub fn report(&self, outcome: &Outcome, err: &mut dyn Write) -> std::io::Result<()> {
        match outcome {
            Outcome::Converted(side) => writeln!(
                err,
                "synced {} -> {}",
                self.path(*side).display(),
                self.path(side.other()).display()
            ),
            Outcome::Conflict => writeln!(
                err,
                "conflict: both {} and {} changed; edit one of them again to choose the winner",
                self.text_path.display(),
                self.xml_path.display()
            ),
            Outcome::Failed(side, diags) => {
                let path = self.path(*side).display().to_string();
                for d in diags {
                    writeln!(err, "{}", d.render(&path))?;
                }
                Ok(())
            }
            Outcome::Unchanged | Outcome::StillConflicted => Ok(()),
        }
    }
}

/// Parses and validates text, then serializes it as EAXML.
pub fn text_to_xml(source: &str, version: SchemaVersion) -> Result<String, Vec<Diagnostic>> {
    let (model, mut diags) = parse(source, version);
    if !has_errors(&diags) {
        diags.extend(validate(&model));
    }
    if has_errors(&diags) {
        return Err(diags);
    }
    to_eaxml(&model)
}

/// Loads EAXML (which must declare `version`) and prints it as text.
pub fn xml_to_text(source: &str, version: SchemaVersion) -> Result<String, Vec<Diagnostic>> {
    let loaded = from_eaxml(source, Some(version))?;
    if has_errors(&loaded.diagnostics) {
        return Err(loaded.diagnostics);
    }
    Ok(emit(&loaded.model))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = "EAPackage P;\n";

    fn setup() -> (tempfile::TempDir, SyncEngine) {
        let dir = tempfile::tempdir().unwrap();
        let t = dir.path().join("m.eatxt");
        let x = dir.path().join("m.eaxml");
        fs::write(&t, TEXT).unwrap();
        let mut engine = SyncEngine::new(&t, &x, SchemaVersion::V2_2);
        assert_eq!(engine.push(Side::Text), Outcome::Converted(Side::Text));
        (dir, engine)
    }

    #[test]
    fn own_writes_are_ignored() {
        let (_d, mut e) = setup();
        assert_eq!(e.handle(Event::Changed(Side::Xml)), Outcome::Unchanged);
        assert_eq!(e.handle(Event::Changed(Side::Text)), Outcome::Unchanged);
        assert_eq!(e.conversions, 1);
    }

    #[test]
    fn failed_conversion_leaves_other_side() {
        let (_d, mut e) = setup();
        let before = fs::read_to_string(&e.xml_path).unwrap();
        fs::write(&e.text_path, "EAPackage {").unwrap();
        assert!(matches!(
            e.handle(Event::Changed(Side::Text)),
            Outcome::Failed(Side::Text, _)
        ));
        assert_eq!(fs::read_to_string(&e.xml_path).unwrap(), before);
        fs::write(&e.text_path, "EAPackage Q;\n").unwrap();
        assert_eq!(e.handle(Event::Changed(Side::Text)), Outcome::Converted(Side::Text));
        assert!(fs::read_to_string(&e.xml_path)
            .unwrap()
            .contains("<SHORT-NAME>Q</SHORT-NAME>"));
    }

    #[test]
    fn conflict_then_resolution() {
        let (_d, mut e) = setup();
        fs::write(&e.text_path, "EAPackage A;\n").unwrap();
        let xml = fs::read_to_string(&e.xml_path).unwrap().replace(">P<", ">B<");
        fs::write(&e.xml_path, &xml).unwrap();
        assert_eq!(e.handle(Event::Changed(Side::Text)), Outcome::Conflict);
        assert_eq!(e.handle(Event::Changed(Side::Xml)), Outcome::StillConflicted);
        assert_eq!(fs::read_to_string(&e.xml_path).unwrap(), xml);
        fs::write(&e.xml_path, xml.replace(">B<", ">C<")).unwrap();
        assert_eq!(e.handle(Event::Changed(Side::Xml)), Outcome::Converted(Side::Xml));
        assert_eq!(fs::read_to_string(&e.text_path).unwrap(), "EAPackage C;\n");
        assert_eq!(e.state, State::InSync);
    }
}
