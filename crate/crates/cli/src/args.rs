//! Hand-rolled command-line parsing: a flag lexer shared by every
//! subcommand, then per-command validation of what the flags mean.

use std::str::FromStr;

use cyclodens::engine::Limits;
use cyclodens::{BigInt, BigUint};

/// Output format selected with `--format`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// One fully parsed invocation: what to run, how to print it, which caps
/// apply.
#[derive(Clone, Debug)]
pub struct Invocation {
    pub format: Format,
    pub limits: Limits,
    pub command: Command,
}

#[derive(Clone, Debug)]
pub enum Command {
    Exponents {
        seq: Vec<BigInt>,
    },
    Density {
        seq: Vec<BigInt>,
    },
    Member {
        n: BigUint,
        seq: Vec<BigInt>,
        brute: bool,
    },
    Witness {
        seq: Vec<BigInt>,
        exact_check: bool,
    },
    Count {
        seq: Vec<BigInt>,
        limit: u64,
        checkpoints: Vec<u64>,
    },
    Cyclotomic {
        n: u64,
        trunc: Option<usize>,
    },
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Exponents { .. } => "exponents",
            Command::Density { .. } => "density",
            Command::Member { .. } => "member",
            Command::Witness { .. } => "witness",
            Command::Count { .. } => "count",
            Command::Cyclotomic { .. } => "cyclotomic",
            Command::Selftest => "selftest",
        }
    }
}

/// A rejected command line: the subcommand it was aimed at, when that much
/// was recognizable, and what went wrong.
#[derive(Clone, Debug)]
pub struct ParseFailure {
    pub command: String,
    pub message: String,
}

/// Flags that consume the following token (or an `=value` suffix).
const VALUE_FLAGS: &[&str] = &[
    "--seq",
    "--n",
    "--limit",
    "--checkpoints",
    "--trunc",
    "--format",
    "--max-divisors",
    "--max-states",
];

/// Flags that stand alone.
const BOOL_FLAGS: &[&str] = &["--brute", "--exact-check"];

/// Lexed flags not yet claimed by the command.
struct FlagBag {
    entries: Vec<(String, Option<String>)>,
}

impl FlagBag {
    /// Removes a value flag; `None` when absent.
    fn take_value(&mut self, name: &str) -> Result<Option<String>, String> {
        let mut found = None;
        let mut rest = Vec::with_capacity(self.entries.len());
        for (flag, value) in self.entries.drain(..) {
            if flag == name {
                if found.is_some() {
                    return Err(format!("flag {name} given more than once"));
                }
                match value {
                    Some(v) => found = Some(v),
                    None => return Err(format!("flag {name} needs a value")),
                }
            } else {
                rest.push((flag, value));
            }
        }
        self.entries = rest;
        Ok(found)
    }

    /// Removes a standalone flag; reports whether it was present.
    fn take_bool(&mut self, name: &str) -> Result<bool, String> {
        let mut found = false;
        let mut rest = Vec::with_capacity(self.entries.len());
        for (flag, value) in self.entries.drain(..) {
            if flag == name {
                if found {
                    return Err(format!("flag {name} given more than once"));
                }
                if value.is_some() {
                    return Err(format!("flag {name} does not take a value"));
                }
                found = true;
            } else {
                rest.push((flag, value));
            }
        }
        self.entries = rest;
        Ok(found)
    }

    /// Rejects anything the command did not claim.
    fn finish(self, command: &str) -> Result<(), String> {
        match self.entries.first() {
            Some((flag, _)) => Err(format!("flag {flag} does not apply to {command}")),
            None => Ok(()),
        }
    }
}

/// Splits raw arguments into a subcommand word and its flags.
fn lex(args: &[String]) -> Result<(String, FlagBag), String> {
    let mut tokens = args.iter();
    let command = match tokens.next() {
        Some(word) if !word.starts_with("--") => word.clone(),
        Some(word) => return Err(format!("expected a subcommand before {word}")),
        None => return Err("no subcommand given".into()),
    };
    let mut entries = Vec::new();
    while let Some(token) = tokens.next() {
        if !token.starts_with("--") {
            return Err(format!("unexpected argument {token}"));
        }
        if let Some((name, value)) = token.split_once('=') {
            if !VALUE_FLAGS.contains(&name) && !BOOL_FLAGS.contains(&name) {
                return Err(format!("unknown flag {name}"));
            }
            entries.push((name.to_string(), Some(value.to_string())));
        } else if VALUE_FLAGS.contains(&token.as_str()) {
            match tokens.next() {
                Some(value) => entries.push((token.clone(), Some(value.clone()))),
                None => return Err(format!("flag {token} needs a value")),
            }
        } else if BOOL_FLAGS.contains(&token.as_str()) {
            entries.push((token.clone(), None));
        } else {
            return Err(format!("unknown flag {token}"));
        }
    }
    Ok((command, FlagBag { entries }))
}

/// Comma-separated signed integers; the empty string is the empty sequence.
fn parse_seq(text: &str) -> Result<Vec<BigInt>, String> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|chunk| {
            BigInt::from_str(chunk)
                .map_err(|_| format!("sequence entry {chunk:?} is not an integer"))
        })
        .collect()
}

fn parse_checkpoints(text: &str) -> Result<Vec<u64>, String> {
    text.split(',')
        .map(|chunk| {
            u64::from_str(chunk)
                .map_err(|_| format!("checkpoint {chunk:?} is not an unsigned integer"))
        })
        .collect()
}

fn parse_number<T: FromStr>(value: &str, flag: &str) -> Result<T, String> {
    T::from_str(value).map_err(|_| format!("flag {flag} got an unusable value {value:?}"))
}

fn require(value: Option<String>, flag: &str) -> Result<String, String> {
    value.ok_or_else(|| format!("flag {flag} is required"))
}

/// Parses a full argument list into an invocation.
pub fn parse(args: &[String]) -> Result<Invocation, ParseFailure> {
    let (command_word, bag) = match lex(args) {
        Ok(lexed) => lexed,
        Err(message) => {
            return Err(ParseFailure {
                command: String::new(),
                message,
            })
        }
    };
    parse_command(&command_word, bag).map_err(|message| ParseFailure {
        command: command_word,
        message,
    })
}

fn parse_command(command_word: &str, mut bag: FlagBag) -> Result<Invocation, String> {
    let format = match bag.take_value("--format")? {
        None => Format::Text,
        Some(value) => match value.as_str() {
            "text" => Format::Text,
            "json" => Format::Json,
            "csv" => Format::Csv,
            other => return Err(format!("unknown format {other:?}")),
        },
    };
    let mut limits = Limits::default();
    if let Some(value) = bag.take_value("--max-divisors")? {
        limits.max_divisors = parse_number(&value, "--max-divisors")?;
    }
    if let Some(value) = bag.take_value("--max-states")? {
        limits.max_states = parse_number(&value, "--max-states")?;
    }

    let command = match command_word {
        "exponents" => Command::Exponents {
            seq: parse_seq(&require(bag.take_value("--seq")?, "--seq")?)?,
        },
        "density" => Command::Density {
            seq: parse_seq(&require(bag.take_value("--seq")?, "--seq")?)?,
        },
        "member" => {
            let n_text = require(bag.take_value("--n")?, "--n")?;
            Command::Member {
                n: BigUint::from_str(&n_text)
                    .map_err(|_| format!("flag --n got an unusable value {n_text:?}"))?,
                seq: parse_seq(&require(bag.take_value("--seq")?, "--seq")?)?,
                brute: bag.take_bool("--brute")?,
            }
        }
        "witness" => Command::Witness {
            seq: parse_seq(&require(bag.take_value("--seq")?, "--seq")?)?,
            exact_check: bag.take_bool("--exact-check")?,
        },
        "count" => {
            let limit = parse_number(&require(bag.take_value("--limit")?, "--limit")?, "--limit")?;
            let checkpoints = match bag.take_value("--checkpoints")? {
                Some(text) => parse_checkpoints(&text)?,
                None => vec![limit],
            };
            Command::Count {
                seq: parse_seq(&require(bag.take_value("--seq")?, "--seq")?)?,
                limit,
                checkpoints,
            }
        }
        "cyclotomic" => Command::Cyclotomic {
            n: parse_number(&require(bag.take_value("--n")?, "--n")?, "--n")?,
            trunc: match bag.take_value("--trunc")? {
                Some(value) => Some(parse_number(&value, "--trunc")?),
                None => None,
            },
        },
        "selftest" => Command::Selftest,
        other => return Err(format!("unknown subcommand {other}")),
    };
    bag.finish(command_word)?;

    Ok(Invocation {
        format,
        limits,
        command,
    })
}

/// Best-effort format detection for rendering errors about unparsable
/// command lines in the format the caller asked for.
pub fn scan_format(args: &[String]) -> Format {
    let mut tokens = args.iter().peekable();
    while let Some(token) = tokens.next() {
        let value = match token.split_once('=') {
            Some(("--format", value)) => value,
            _ if token == "--format" => match tokens.peek() {
                Some(next) => next.as_str(),
                None => continue,
            },
            _ => continue,
        };
        match value {
            "json" => return Format::Json,
            "csv" => return Format::Csv,
            _ => return Format::Text,
        }
    }
    Format::Text
}
