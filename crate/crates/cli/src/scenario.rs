//! Scenario files: `[section]` headers, one declaration or check per line,
//! `#` starts a comment.
//!
//! ```text
//! [fields]
//! q2 = quadratic 2
//! c4 = poly 2 0 -4 0 1
//! l = adjoin_sqrt q2 3
//! [algebras]
//! H = quaternion Q -1 -1
//! [extensions]
//! E = galois H q2
//! [twists]
//! X = untwisted E
//! [problems]
//! P = problem E Q8 gens i j images 1 0
//! [checks]
//! is_split P expect.split=false
//! ```

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    Fields,
    Algebras,
    Extensions,
    Twists,
    Problems,
    Checks,
}

impl Section {
    fn parse(s: &str) -> Option<Section> {
        Some(match s {
            "fields" => Section::Fields,
            "algebras" => Section::Algebras,
            "extensions" => Section::Extensions,
            "twists" => Section::Twists,
            "problems" => Section::Problems,
            "checks" => Section::Checks,
            _ => return None,
        })
    }

    fn order(self) -> usize {
        self as usize
    }
}

/// `name = kind args...` inside a declaration section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub line: usize,
    pub name: String,
    pub kind: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub line: usize,
    pub op: String,
    pub args: Vec<String>,
    pub params: BTreeMap<String, String>,
    pub expect: BTreeMap<String, String>,
}

impl Check {
    pub fn text(&self) -> String {
        let mut parts = vec![self.op.clone()];
        parts.extend(self.args.iter().cloned());
        parts.extend(self.params.iter().map(|(k, v)| format!("{k}={v}")));
        parts.join(" ")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Scenario {
    pub fields: Vec<Decl>,
    pub algebras: Vec<Decl>,
    pub extensions: Vec<Decl>,
    pub twists: Vec<Decl>,
    pub problems: Vec<Decl>,
    pub checks: Vec<Check>,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

fn is_name(s: &str) -> bool {
    let mut c = s.chars();
    c.next().is_some_and(|x| x.is_ascii_alphabetic() || x == '_') && c.all(|x| x.is_ascii_alphanumeric() || x == '_')
}

pub fn parse(text: &str) -> Result<Scenario, ParseError> {
    let mut sc = Scenario::default();
    let mut section: Option<Section> = None;
    let mut names: BTreeMap<String, usize> = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col = trimmed.as_ptr() as usize - body.as_ptr() as usize + 1;
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err(line, col, "unterminated section header"))?
                .trim();
            let s = Section::parse(name).ok_or_else(|| err(line, col + 1, format!("unknown section `{name}`")))?;
            if section.is_some_and(|prev| prev.order() > s.order()) {
                return Err(err(line, col, format!("section `{name}` out of order")));
            }
            section = Some(s);
            continue;
        }
        let Some(sec) = section else {
            return Err(err(line, col, "content before the first section header"));
        };
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if sec == Section::Checks {
            let mut c = Check {
                line,
                op: tokens[0].to_string(),
                args: Vec::new(),
                params: BTreeMap::new(),
                expect: BTreeMap::new(),
            };
            for t in &tokens[1..] {
                let tcol = t.as_ptr() as usize - body.as_ptr() as usize + 1;
                match t.split_once('=') {
                    Some((key, v)) if !v.is_empty() => {
                        if let Some(e) = key.strip_prefix("expect.") {
                            c.expect.insert(e.to_string(), v.to_string());
                        } else {
                            c.params.insert(key.to_string(), v.to_string());
                        }
                    }
                    Some(_) => return Err(err(line, tcol, format!("empty value in `{t}`"))),
                    None if c.params.is_empty() && c.expect.is_empty() => c.args.push(t.to_string()),
                    None => return Err(err(line, tcol, "positional argument after key=value")),
                }
            }
            sc.checks.push(c);
            continue;
        }
        if tokens.len() < 3 || tokens[1] != "=" {
            return Err(err(line, col, "expected `name = kind args...`"));
        }
        let name = tokens[0];
        if !is_name(name) || name == "Q" {
            return Err(err(line, col, format!("invalid name `{name}`")));
        }
        if let Some(prev) = names.insert(name.to_string(), line) {
            return Err(err(line, col, format!("`{name}` already declared on line {prev}")));
        }
        let d = Decl {
            line,
            name: name.to_string(),
            kind: tokens[2].to_string(),
            args: tokens[3..].iter().map(|s| s.to_string()).collect(),
        };
        match sec {
            Section::Fields => sc.fields.push(d),
            Section::Algebras => sc.algebras.push(d),
            Section::Extensions => sc.extensions.push(d),
            Section::Twists => sc.twists.push(d),
            Section::Problems => sc.problems.push(d),
            Section::Checks => unreachable!(),
        }
    }
    Ok(sc)
}
