//! Line-oriented text format for circuits.
//!
//! ```text
//! # comment
//! mode c0
//! mode c1
//! bs c0 c1 0.5 gray=c1
//! tau c0 1
//! phase c1 1.5707963267948966
//! control c0 c1
//! target t0 t1
//! ```
//!
//! Modes must be declared before use. The serializer writes the canonical form:
//! sorted mode table, elements in order, then the detector groups.

use std::collections::HashSet;
use std::fmt;

use super::{Circuit, CircuitBuilder, Element, TAU_COUNT};
use crate::error::{Error, Result};

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn split(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..i],
                    column: line[..s].chars().count() + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: line[..s].chars().count() + 1,
        });
    }
    out
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut builder = CircuitBuilder::default();
    let mut declared: HashSet<&str> = HashSet::new();
    let mut taus: HashSet<usize> = HashSet::new();

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = split(content);
        let Some(head) = toks.first() else { continue };
        let err = |column: usize, message: String| Error::Parse {
            line: line_no,
            column,
            message,
        };
        let arity = |want: usize| -> Result<()> {
            if toks.len() != want {
                let column = toks.get(want).map_or(content.chars().count() + 1, |t| t.column);
                return Err(err(
                    column,
                    format!("`{}` takes {} arguments, got {}", head.text, want - 1, toks.len() - 1),
                ));
            }
            Ok(())
        };
        let known = |t: &Token| -> Result<()> {
            if declared.contains(t.text) {
                Ok(())
            } else {
                Err(err(t.column, format!("unknown mode `{}`", t.text)))
            }
        };
        let number = |t: &Token| -> Result<f64> {
            t.text
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(t.column, format!("expected a number, got `{}`", t.text)))
        };

        match head.text {
            "mode" => {
                arity(2)?;
                let name = toks[1].text;
                if !declared.insert(name) {
                    return Err(err(toks[1].column, format!("mode `{name}` declared twice")));
                }
                builder = builder.mode(name);
            }
            "bs" => {
                arity(5)?;
                let (a, b) = (&toks[1], &toks[2]);
                known(a)?;
                known(b)?;
                if a.text == b.text {
                    return Err(err(b.column, "beamsplitter needs two distinct modes".into()));
                }
                let eta = number(&toks[3])?;
                if !(0.0..=1.0).contains(&eta) {
                    return Err(err(toks[3].column, format!("reflectivity {eta} outside [0, 1]")));
                }
                let gray_tok = &toks[4];
                let gray = gray_tok
                    .text
                    .strip_prefix("gray=")
                    .ok_or_else(|| err(gray_tok.column, "expected `gray=<mode>`".into()))?;
                if gray != a.text && gray != b.text {
                    let message = if declared.contains(gray) {
                        format!("gray side `{gray}` is not one of the splitter's modes")
                    } else {
                        format!("unknown mode `{gray}`")
                    };
                    return Err(err(gray_tok.column + 5, message));
                }
                builder = builder.beamsplitter(a.text, b.text, eta, gray);
            }
            "tau" => {
                arity(3)?;
                known(&toks[1])?;
                let index: usize = toks[2]
                    .text
                    .parse()
                    .map_err(|_| err(toks[2].column, format!("expected a tau index, got `{}`", toks[2].text)))?;
                if !(1..=TAU_COUNT).contains(&index) {
                    return Err(err(toks[2].column, format!("tau index {index} outside 1..={TAU_COUNT}")));
                }
                if !taus.insert(index) {
                    return Err(err(toks[2].column, format!("duplicate tau index {index}")));
                }
                builder = builder.tau(toks[1].text, index);
            }
            "phase" => {
                arity(3)?;
                known(&toks[1])?;
                let angle = number(&toks[2])?;
                builder = builder.phase(toks[1].text, angle);
            }
            "control" | "target" => {
                if toks.len() < 2 {
                    return Err(err(head.column, format!("`{}` needs at least one mode", head.text)));
                }
                for t in &toks[1..] {
                    known(t)?;
                }
                let names: Vec<&str> = toks[1..].iter().map(|t| t.text).collect();
                builder = if head.text == "control" {
                    builder.control(&names)
                } else {
                    builder.target(&names)
                };
            }
            other => return Err(err(head.column, format!("unknown directive `{other}`"))),
        }
    }

    builder.build().map_err(|e| Error::Parse {
        line: text.lines().count(),
        column: 1,
        message: e.to_string(),
    })
}

impl std::str::FromStr for Circuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_circuit(s)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.modes {
            writeln!(f, "mode {m}")?;
        }
        for e in &self.elements {
            match *e {
                Element::BeamSplitter(bs) => writeln!(
                    f,
                    "bs {} {} {} gray={}",
                    self.mode_name(bs.first),
                    self.mode_name(bs.second),
                    bs.eta,
                    self.mode_name(bs.gray)
                )?,
                Element::TauBox { mode, index } => writeln!(f, "tau {} {index}", self.mode_name(mode))?,
                Element::PhaseShift { mode, angle } => writeln!(f, "phase {} {angle}", self.mode_name(mode))?,
            }
        }
        for (name, group) in [("control", &self.control), ("target", &self.target)] {
            if !group.is_empty() {
                f.write_str(name)?;
                for m in group.iter() {
                    write!(f, " {}", self.mode_name(*m))?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}
