//! The measure specification document.
//!
//! One statement per line; `#` starts a comment. A statement is a
//! comma-separated list of `key: value` fields whose first key names its kind:
//!
//! ```text
//! atoms: [(1, 1), (-2, 0.5)]
//! density: power, support: [0, inf), c: 1.5, alpha: 0.5
//! density: power-log, support: [1, inf), c: 1, alpha: 0, log: 1
//! example: symmetric-kappa, kappa: 1, probe: 1e4
//! ```
//!
//! The measure is the sum of all statements.

use regcauchy::measures::{Density, Interval, Measure};
use regcauchy::registry::{NamedExample, EXAMPLE_NAMES};

use crate::error::{CliError, CliResult};

/// Default probe top for truncated atom families.
pub const DEFAULT_PROBE: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Power,
    PowerLog,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Power => "power",
            Family::PowerLog => "power-log",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensitySpec {
    pub family: Family,
    pub lo: f64,
    pub hi: f64,
    pub coeff: f64,
    pub alpha: f64,
    pub log_power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleSpec {
    pub example: NamedExample,
    pub probe: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MeasureSpec {
    pub atoms: Vec<(f64, f64)>,
    pub densities: Vec<DensitySpec>,
    pub examples: Vec<ExampleSpec>,
}

/// Parses a document and builds its measure.
pub fn load_measure_spec(document: &str) -> CliResult<Measure> {
    MeasureSpec::parse(document)?.to_measure()
}

impl MeasureSpec {
    pub fn parse(document: &str) -> CliResult<Self> {
        let mut spec = MeasureSpec::default();
        for (idx, raw) in document.lines().enumerate() {
            let line = idx + 1;
            let text = raw.split('#').next().unwrap_or("");
            if text.trim().is_empty() {
                continue;
            }
            let fields = split_fields(text, line)?;
            let (kind, _) = &fields[0];
            match kind.key.as_str() {
                "atoms" => {
                    if let Some((f, _)) = fields.get(1) {
                        return Err(f.error(line, "atoms take no further fields"));
                    }
                    spec.atoms.extend(parse_atom_list(&fields[0].1, line)?);
                }
                "density" => spec.densities.push(parse_density(&fields, line)?),
                "example" => spec.examples.push(parse_example(&fields, line)?),
                _ => return Err(kind.error(line, "expected 'atoms', 'density' or 'example'")),
            }
        }
        Ok(spec)
    }

    pub fn to_measure(&self) -> CliResult<Measure> {
        let invalid = |e: regcauchy::Error| match e {
            regcauchy::Error::InvalidMeasure(m) => CliError::InvalidMeasure(m),
            other => CliError::InvalidMeasure(other.to_string()),
        };
        let mut mu = Measure::from_atoms(self.atoms.iter().copied()).map_err(invalid)?;
        for d in &self.densities {
            let density = match d.family {
                Family::Power => Density::Power {
                    coeff: d.coeff,
                    exponent: d.alpha,
                },
                Family::PowerLog => Density::PowerLog {
                    coeff: d.coeff,
                    exponent: d.alpha,
                    log_power: d.log_power,
                },
            };
            mu = mu.with_piece(Interval::new(d.lo, d.hi), density).map_err(invalid)?;
        }
        for e in &self.examples {
            mu = mu.sum(&e.example.measure(e.probe).map_err(invalid)?);
        }
        Ok(mu)
    }

    /// The document form; parsing it gives back an equal spec.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.atoms.is_empty() {
            let list: Vec<String> = self.atoms.iter().map(|(p, m)| format!("({}, {})", num(*p), num(*m))).collect();
            out.push_str(&format!("atoms: [{}]\n", list.join(", ")));
        }
        for d in &self.densities {
            out.push_str(&format!(
                "density: {}, support: [{}, {}), c: {}, alpha: {}",
                d.family.name(),
                num(d.lo),
                num(d.hi),
                num(d.coeff),
                num(d.alpha)
            ));
            if d.family == Family::PowerLog {
                out.push_str(&format!(", log: {}", num(d.log_power)));
            }
            out.push('\n');
        }
        for e in &self.examples {
            out.push_str(&format!("example: {}", e.example.name()));
            for (k, v) in e.example.params() {
                out.push_str(&format!(", {k}: {}", num(v)));
            }
            out.push_str(&format!(", probe: {}\n", num(e.probe)));
        }
        out
    }
}

fn num(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:?}")
    }
}

#[derive(Debug)]
struct Key {
    key: String,
    column: usize,
}

impl Key {
    fn error(&self, line: usize, message: impl Into<String>) -> CliError {
        CliError::Parse {
            line,
            column: self.column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Value {
    text: String,
    column: usize,
}

impl Value {
    fn error(&self, line: usize, message: impl Into<String>) -> CliError {
        CliError::Parse {
            line,
            column: self.column,
            message: message.into(),
        }
    }

    fn number(&self, line: usize) -> CliResult<f64> {
        parse_number(&self.text).ok_or_else(|| self.error(line, format!("expected a number, found '{}'", self.text)))
    }
}

fn parse_number(s: &str) -> Option<f64> {
    let t = s.trim();
    let x: f64 = t.parse().ok()?;
    (!x.is_nan()).then_some(x)
}

/// Splits a line into `key: value` fields at commas outside brackets.
fn split_fields(text: &str, line: usize) -> CliResult<Vec<(Key, Value)>> {
    let mut pieces = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            ',' if depth == 0 => {
                pieces.push((start, &text[start..i]));
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(parse_error(line, text, i, "unbalanced bracket"));
        }
    }
    pieces.push((start, &text[start..]));
    let mut fields = Vec::new();
    for (offset, piece) in pieces {
        let Some(colon) = piece.find(':') else {
            return Err(parse_error(line, text, offset + lead(piece), "expected 'key: value'"));
        };
        let key = piece[..colon].trim();
        let value = &piece[colon + 1..];
        if key.is_empty() {
            return Err(parse_error(line, text, offset + lead(piece), "missing key"));
        }
        fields.push((
            Key {
                key: key.to_string(),
                column: column(text, offset + lead(piece)),
            },
            Value {
                text: value.trim().to_string(),
                column: column(text, offset + colon + 1 + lead(value)),
            },
        ));
    }
    Ok(fields)
}

fn lead(s: &str) -> usize {
    s.len() - s.trim_start().len()
}

/// 1-based character column of a byte offset.
fn column(text: &str, byte: usize) -> usize {
    text[..byte.min(text.len())].chars().count() + 1
}

fn parse_error(line: usize, text: &str, byte: usize, message: &str) -> CliError {
    CliError::Parse {
        line,
        column: column(text, byte),
        message: message.into(),
    }
}

fn parse_atom_list(v: &Value, line: usize) -> CliResult<Vec<(f64, f64)>> {
    let s = v.text.as_str();
    let at = |byte: usize, msg: &str| CliError::Parse {
        line,
        column: v.column + s[..byte.min(s.len())].chars().count(),
        message: msg.into(),
    };
    if !s.starts_with('[') || !s.ends_with(']') {
        return Err(at(0, "expected an atom list '[(position, mass), ...]'"));
    }
    let mut atoms = Vec::new();
    let mut rest = 1;
    let inner_end = s.len() - 1;
    loop {
        let chunk = &s[rest..inner_end];
        let skip = lead(chunk);
        let pos = rest + skip;
        if pos >= inner_end {
            break;
        }
        if !s[pos..].starts_with('(') {
            return Err(at(pos, "expected '('"));
        }
        let close = s[pos..].find(')').map(|c| pos + c).ok_or_else(|| at(pos, "missing ')'"))?;
        let parts: Vec<&str> = s[pos + 1..close].split(',').collect();
        if parts.len() != 2 {
            return Err(at(pos, "an atom is '(position, mass)'"));
        }
        let p = parse_number(parts[0]).ok_or_else(|| at(pos + 1, "bad atom position"))?;
        let m = parse_number(parts[1]).ok_or_else(|| at(pos + 2 + parts[0].len(), "bad atom mass"))?;
        atoms.push((p, m));
        let after = close + 1;
        let tail = &s[after..inner_end];
        let t = lead(tail);
        if after + t >= inner_end {
            break;
        }
        if !tail[t..].starts_with(',') {
            return Err(at(after + t, "expected ',' between atoms"));
        }
        rest = after + t + 1;
    }
    Ok(atoms)
}

fn parse_support(v: &Value, line: usize) -> CliResult<(f64, f64)> {
    let s = v.text.as_str();
    let open_ok = s.starts_with('[') || s.starts_with('(');
    let close_ok = s.ends_with(']') || s.ends_with(')');
    if !open_ok || !close_ok || s.len() < 2 {
        return Err(v.error(line, "expected an interval such as '[0, inf)'"));
    }
    let parts: Vec<&str> = s[1..s.len() - 1].split(',').collect();
    if parts.len() != 2 {
        return Err(v.error(line, "an interval has two endpoints"));
    }
    let lo = parse_number(parts[0]).ok_or_else(|| v.error(line, "bad lower endpoint"))?;
    let hi = parse_number(parts[1]).ok_or_else(|| v.error(line, "bad upper endpoint"))?;
    if !(lo < hi) {
        return Err(v.error(line, "empty interval"));
    }
    Ok((lo, hi))
}

fn parse_density(fields: &[(Key, Value)], line: usize) -> CliResult<DensitySpec> {
    let (head, fam) = &fields[0];
    let family = match fam.text.as_str() {
        "power" => Family::Power,
        "power-log" => Family::PowerLog,
        other => return Err(fam.error(line, format!("unknown density family '{other}'"))),
    };
    let mut support = None;
    let mut coeff = None;
    let mut alpha = None;
    let mut log_power = None;
    for (k, v) in &fields[1..] {
        let slot = match k.key.as_str() {
            "support" => {
                if support.is_some() {
                    return Err(k.error(line, "duplicate key"));
                }
                support = Some(parse_support(v, line)?);
                continue;
            }
            "c" => &mut coeff,
            "alpha" => &mut alpha,
            "log" if family == Family::PowerLog => &mut log_power,
            other => return Err(k.error(line, format!("unknown key '{other}' for a {} density", family.name()))),
        };
        if slot.is_some() {
            return Err(k.error(line, "duplicate key"));
        }
        *slot = Some(v.number(line)?);
    }
    let missing = |what: &str| head.error(line, format!("density is missing '{what}'"));
    let (lo, hi) = support.ok_or_else(|| missing("support"))?;
    Ok(DensitySpec {
        family,
        lo,
        hi,
        coeff: coeff.ok_or_else(|| missing("c"))?,
        alpha: alpha.ok_or_else(|| missing("alpha"))?,
        log_power: match family {
            Family::Power => 0.0,
            Family::PowerLog => log_power.ok_or_else(|| missing("log"))?,
        },
    })
}

fn allowed_keys(name: &str) -> &'static [&'static str] {
    match name {
        "log-pair" => &["a_plus", "a_minus"],
        "log-power" => &["gamma"],
        "two-slope" => &["a", "b"],
        "growing-atoms" => &["n"],
        _ => &["order", "kappa", "ell"],
    }
}

fn parse_example(fields: &[(Key, Value)], line: usize) -> CliResult<ExampleSpec> {
    let (_, name) = &fields[0];
    if !EXAMPLE_NAMES.contains(&name.text.as_str()) {
        return Err(name.error(
            line,
            format!("unknown example '{}'; known: {}", name.text, EXAMPLE_NAMES.join(", ")),
        ));
    }
    let keys = allowed_keys(&name.text);
    let mut params: Vec<(String, f64)> = Vec::new();
    let mut probe = DEFAULT_PROBE;
    for (k, v) in &fields[1..] {
        if k.key == "probe" {
            probe = v.number(line)?;
            continue;
        }
        if !keys.contains(&k.key.as_str()) {
            return Err(k.error(line, format!("unknown parameter '{}' for {}", k.key, name.text)));
        }
        if params.iter().any(|(p, _)| *p == k.key) {
            return Err(k.error(line, "duplicate key"));
        }
        params.push((k.key.clone(), v.number(line)?));
    }
    let lookup = |key: &str| params.iter().find(|(p, _)| p == key).map(|(_, v)| *v);
    let example = NamedExample::parse(&name.text, &lookup).map_err(|e| name.error(line, e.to_string()))?;
    Ok(ExampleSpec { example, probe })
}
