//! Segmentation of raw sitting transcripts into speeches.
//!
//! A speech starts at a speaker mention: a name in capital letters followed
//! by a colon, usually at the start of a line and optionally followed by a
//! parenthetical with the speaker's party or role. Two defects seen in real
//! records are tolerated: mentions that do not start a new line (detected
//! after a sentence terminator) and parentheticals missing their closing
//! bracket (consumed up to the colon).
//!
//! Everything before the first mention is introductory material. The
//! segmentation is lossless: the intro followed by each mention's source text
//! and its speech reconstructs the sitting text exactly.

use std::collections::HashSet;
use std::ops::Range;
use std::path::Path;

use regex::Regex;
use thiserror::Error;

use crate::text::fold_name;

pub const DEFAULT_PATTERNS: &str = include_str!("../data/speaker_patterns.txt");

const UPPER: &str = r"[\p{Lu}&&[\p{Greek}\p{Latin}]]";

#[derive(Debug, Error)]
pub enum ParserError {
    #[error("pattern config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("pattern config line {line}: invalid regex: {source}")]
    Regex {
        line: usize,
        #[source]
        source: regex::Error,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Compiled speaker-line patterns.
#[derive(Debug, Clone)]
pub struct SpeakerPatterns {
    base: Regex,
    extra: Vec<Regex>,
    roles: HashSet<String>,
    min_words: usize,
}

impl Default for SpeakerPatterns {
    fn default() -> Self {
        Self::parse(DEFAULT_PATTERNS).expect("built-in speaker patterns are valid")
    }
}

impl SpeakerPatterns {
    pub fn parse(config: &str) -> Result<Self, ParserError> {
        let mut roles = HashSet::new();
        let mut extra = Vec::new();
        let mut min_words = 2;
        let mut mid_line_after: Vec<char> = Vec::new();
        for (n, raw) in config.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (directive, arg) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let arg = arg.trim();
            match directive {
                "role" if !arg.is_empty() => {
                    roles.insert(fold_name(arg));
                }
                "min-words" => {
                    min_words = arg
                        .parse()
                        .ok()
                        .filter(|n| *n >= 1)
                        .ok_or_else(|| ParserError::Config {
                            line: line_no,
                            message: format!("min-words expects a positive integer, got {arg:?}"),
                        })?;
                }
                "mid-line-after" => mid_line_after = arg.chars().filter(|c| !c.is_whitespace()).collect(),
                "pattern" if !arg.is_empty() => {
                    let re = Regex::new(arg).map_err(|source| ParserError::Regex { line: line_no, source })?;
                    if !re.capture_names().flatten().any(|g| g == "name") {
                        return Err(ParserError::Config {
                            line: line_no,
                            message: "pattern must define a `name` group".into(),
                        });
                    }
                    extra.push(re);
                }
                _ => {
                    return Err(ParserError::Config {
                        line: line_no,
                        message: format!("unknown or incomplete directive {line:?}"),
                    })
                }
            }
        }
        let word = format!(r"{UPPER}[{UPPER}.\-]*");
        let mid = if mid_line_after.is_empty() {
            String::new()
        } else {
            let class: String = mid_line_after.iter().map(|c| regex::escape(&c.to_string())).collect();
            format!(r"|(?P<mid>[{class}][ \t]+)")
        };
        let base = format!(
            r"(?m)(?:^[ \t]*{mid})(?P<name>{word}(?:[ \t]+{word})*)[ \t]*(?:\((?P<paren>[^)\n]*)\)|\((?P<open>[^)\n:]*))?[ \t]*:"
        );
        Ok(Self {
            base: Regex::new(&base).expect("generated speaker regex is valid"),
            extra,
            roles,
            min_words,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ParserError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ParserError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn is_role(&self, name: &str) -> bool {
        self.roles.contains(&fold_name(name))
    }

    fn accepts_name(&self, name: &str) -> bool {
        name.split_whitespace().count() >= self.min_words || self.is_role(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSitting {
    pub file_id: String,
    pub text: String,
    /// Byte range of the introductory material (before the first speech).
    pub intro_span: Range<usize>,
}

impl RawSitting {
    /// A sitting whose intro is not yet known covers the whole text.
    pub fn new(file_id: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        Self {
            file_id: file_id.into(),
            intro_span: 0..text.len(),
            text,
        }
    }

    pub fn intro(&self) -> &str {
        &self.text[self.intro_span.clone()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeakerMention {
    /// Name as written, blanks collapsed.
    pub raw_name: String,
    pub parenthetical: Option<String>,
    /// False when the parenthetical was missing its closing bracket.
    pub parenthetical_closed: bool,
    /// Byte range from the first name character through the colon.
    pub span: Range<usize>,
    pub line_start: bool,
    /// The name is a role header (e.g. the chair) rather than a person.
    pub role_header: bool,
}

impl SpeakerMention {
    /// Name to resolve against the registry: the parenthetical for role
    /// headers that carry one, the raw name otherwise.
    pub fn lookup_name(&self) -> &str {
        match (&self.parenthetical, self.role_header) {
            (Some(p), true) if !p.trim().is_empty() => p.trim(),
            _ => &self.raw_name,
        }
    }
}

/// All speaker mentions in `text`, sorted by position and non-overlapping.
pub fn detect_speaker_lines(text: &str, patterns: &SpeakerPatterns) -> Vec<SpeakerMention> {
    let mut mentions = Vec::new();
    for caps in patterns.base.captures_iter(text) {
        let name = caps.name("name").expect("name group always participates");
        let raw_name = name.as_str().split_whitespace().collect::<Vec<_>>().join(" ");
        if !patterns.accepts_name(&raw_name) {
            continue;
        }
        let (parenthetical, closed) = match (caps.name("paren"), caps.name("open")) {
            (Some(p), _) => (Some(p.as_str().trim().to_string()), true),
            (None, Some(p)) => (Some(p.as_str().trim().to_string()), false),
            (None, None) => (None, true),
        };
        mentions.push(SpeakerMention {
            role_header: patterns.is_role(&raw_name),
            raw_name,
            parenthetical,
            parenthetical_closed: closed,
            span: name.start()..caps.get(0).unwrap().end(),
            line_start: caps.name("mid").is_none(),
        });
    }
    for re in &patterns.extra {
        for caps in re.captures_iter(text) {
            let name = caps.name("name").unwrap();
            let raw_name = name.as_str().split_whitespace().collect::<Vec<_>>().join(" ");
            if raw_name.is_empty() {
                continue;
            }
            let line_start = text[..name.start()]
                .rsplit('\n')
                .next()
                .is_none_or(|prefix| prefix.trim().is_empty());
            mentions.push(SpeakerMention {
                role_header: patterns.is_role(&raw_name),
                parenthetical: caps.name("paren").map(|p| p.as_str().trim().to_string()),
                parenthetical_closed: true,
                raw_name,
                span: name.start()..caps.get(0).unwrap().end(),
                line_start,
            });
        }
    }
    mentions.sort_by(|a, b| a.span.start.cmp(&b.span.start).then(b.span.end.cmp(&a.span.end)));
    let mut kept: Vec<SpeakerMention> = Vec::with_capacity(mentions.len());
    for m in mentions {
        if kept.last().is_none_or(|last| m.span.start >= last.span.end) {
            kept.push(m);
        }
    }
    kept
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Speech {
    pub mention: SpeakerMention,
    /// Text between this mention and the next one, untrimmed.
    pub text: String,
    pub span: Range<usize>,
    /// Set when the speech holds nothing but whitespace.
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    pub intro_span: Range<usize>,
    pub speeches: Vec<Speech>,
}

/// Splits the sitting at the given mentions (sorted by span).
pub fn segment_speeches(sitting: &RawSitting, mentions: &[SpeakerMention]) -> Segmentation {
    let text = &sitting.text;
    let intro_end = mentions.first().map_or(text.len(), |m| m.span.start);
    let speeches = mentions
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let end = mentions.get(i + 1).map_or(text.len(), |next| next.span.start);
            let body = &text[m.span.end..end];
            Speech {
                mention: m.clone(),
                text: body.to_string(),
                span: m.span.end..end,
                empty: body.trim().is_empty(),
            }
        })
        .collect();
    Segmentation {
        intro_span: 0..intro_end,
        speeches,
    }
}

/// Detects mentions, segments, and records the intro span on the sitting.
pub fn parse_sitting(sitting: &mut RawSitting, patterns: &SpeakerPatterns) -> Vec<Speech> {
    let mentions = detect_speaker_lines(&sitting.text, patterns);
    let seg = segment_speeches(sitting, &mentions);
    sitting.intro_span = seg.intro_span;
    seg.speeches
}

/// Reads every `.txt` file in `dir`, sorted by file name. The file stem is
/// the sitting's `file_id`.
pub fn load_sittings(dir: impl AsRef<Path>) -> Result<Vec<RawSitting>, ParserError> {
    let dir = dir.as_ref();
    let io = |source| ParserError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "txt"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).map_err(|source| ParserError::Io {
                path: p.clone(),
                source,
            })?;
            let id = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            Ok(RawSitting::new(id, text))
        })
        .collect()
}
