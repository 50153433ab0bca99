//! The line-oriented problem text format.
//!
//! ```text
//! delta: 3
//! nodes:
//! M^3
//! P O^2
//! edges:
//! M [P O]
//! O O
//! ```
//!
//! Inside brackets, labels are separated by spaces. A bracket without any
//! space is read letter by letter (`[PAOX]` is `[P A O X]`), each letter
//! taking any digits or primes that follow it.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::problem::{is_label, CondensedConfig, Constraint, Group, Label, Problem, ProblemError};

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ProblemError {
    ProblemError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Parses one configuration; `line` is only used for error positions.
pub fn parse_config(text: &str, line: usize) -> Result<CondensedConfig, ProblemError> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let mut items = Vec::new();
    let skip_ws = |pos: &mut usize| {
        while *pos < chars.len() && chars[*pos].is_whitespace() {
            *pos += 1;
        }
    };
    skip_ws(&mut pos);
    if pos == chars.len() {
        return Err(syntax(line, 1, "empty configuration"));
    }
    while pos < chars.len() {
        let start = pos;
        let group = if chars[pos] == '[' {
            pos += 1;
            let close = chars[pos..]
                .iter()
                .position(|&c| c == ']')
                .map(|i| pos + i)
                .ok_or_else(|| syntax(line, start + 1, "unclosed `[`"))?;
            let inner: String = chars[pos..close].iter().collect();
            let names: Vec<String> = if inner.trim().contains(char::is_whitespace) {
                inner.split_whitespace().map(String::from).collect()
            } else {
                split_letters(inner.trim())
            };
            if names.is_empty() {
                return Err(syntax(line, start + 1, "empty disjunction"));
            }
            let mut members = Vec::with_capacity(names.len());
            for n in names {
                members.push(
                    Label::new(&n)
                        .map_err(|_| syntax(line, start + 2, format!("invalid label `{n}`")))?,
                );
            }
            pos = close + 1;
            Group::new(members).expect("nonempty")
        } else {
            while pos < chars.len() && !chars[pos].is_whitespace() && chars[pos] != '^' {
                pos += 1;
            }
            let name: String = chars[start..pos].iter().collect();
            if !is_label(&name) {
                return Err(syntax(line, start + 1, format!("invalid label `{name}`")));
            }
            Group::single(Label::new(&name).expect("checked"))
        };
        let mut mult = 1;
        if pos < chars.len() && chars[pos] == '^' {
            pos += 1;
            let num_start = pos;
            while pos < chars.len() && chars[pos].is_ascii_digit() {
                pos += 1;
            }
            let digits: String = chars[num_start..pos].iter().collect();
            mult = digits
                .parse::<usize>()
                .map_err(|_| syntax(line, num_start + 1, "expected exponent after `^`"))?;
            if mult == 0 {
                return Err(syntax(line, num_start + 1, "exponent must be positive"));
            }
        }
        items.push((group, mult));
        if pos < chars.len() && !chars[pos].is_whitespace() {
            return Err(syntax(
                line,
                pos + 1,
                format!("unexpected character `{}`", chars[pos]),
            ));
        }
        skip_ws(&mut pos);
    }
    Ok(CondensedConfig::new(items))
}

fn split_letters(s: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for c in s.chars() {
        if c.is_ascii_uppercase() || out.is_empty() {
            out.push(String::from(c));
        } else {
            out.last_mut().expect("nonempty").push(c);
        }
    }
    out
}

#[derive(PartialEq)]
enum Section {
    Header,
    Nodes,
    Edges,
}

/// Parses the text format into a canonical [`Problem`].
pub fn parse_problem(text: &str) -> Result<Problem, ProblemError> {
    let mut delta: Option<(usize, usize)> = None;
    let mut section = Section::Header;
    let mut saw_edges = false;
    let mut node_lines = Vec::new();
    let mut edge_lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let lead = content.len() - content.trim_start().len() + 1;
        if delta.is_none() {
            let rest = trimmed
                .strip_prefix("delta:")
                .ok_or_else(|| syntax(line_no, lead, "expected `delta: <int>`"))?;
            let value = rest
                .trim()
                .parse::<usize>()
                .map_err(|_| syntax(line_no, lead + 6, "delta must be an integer"))?;
            if value < 2 {
                return Err(syntax(line_no, lead + 6, "delta must be at least 2"));
            }
            delta = Some((value, line_no));
            continue;
        }
        match trimmed {
            "nodes:" if section == Section::Header => section = Section::Nodes,
            "edges:" if section == Section::Nodes => {
                section = Section::Edges;
                saw_edges = true;
            }
            "nodes:" | "edges:" => {
                return Err(syntax(line_no, lead, format!("unexpected `{trimmed}`")));
            }
            _ => {
                let config = parse_config(content, line_no)?;
                match section {
                    Section::Header => {
                        return Err(syntax(line_no, lead, "configuration before `nodes:`"))
                    }
                    Section::Nodes => node_lines.push((line_no, config)),
                    Section::Edges => edge_lines.push((line_no, config)),
                }
            }
        }
    }
    let (delta, _) = delta.ok_or_else(|| syntax(1, 1, "missing `delta:` line"))?;
    if !saw_edges {
        let last = text.lines().count().max(1);
        return Err(syntax(last, 1, "missing `edges:` section"));
    }
    for (arity, lines) in [(delta, &node_lines), (2, &edge_lines)] {
        for (line_no, c) in lines.iter() {
            if c.arity() != arity {
                return Err(syntax(
                    *line_no,
                    1,
                    format!("configuration has arity {}, expected {arity}", c.arity()),
                ));
            }
        }
    }
    let node = Constraint::new(delta, node_lines.into_iter().map(|(_, c)| c))?;
    let edge = Constraint::new(2, edge_lines.into_iter().map(|(_, c)| c))?;
    Problem::new(delta, node, edge)
}

/// Canonical text form of a constraint, one configuration per line.
pub fn serialize_constraint(k: &Constraint) -> String {
    let mut out = String::new();
    for c in k.configs() {
        let _ = writeln!(out, "{c}");
    }
    out
}

/// Canonical text form of a problem.
pub fn serialize_problem(p: &Problem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "delta: {}", p.delta());
    out.push_str("nodes:\n");
    out.push_str(&serialize_constraint(p.node_constraint()));
    out.push_str("edges:\n");
    out.push_str(&serialize_constraint(p.edge_constraint()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::labels;
    use alloc::string::ToString;

    const MIS3: &str = "delta: 3\nnodes:\nM^3\nP O^2\nedges:\nM [P O]\nO O";

    #[test]
    fn parses_mis() {
        let p = parse_problem(MIS3).unwrap();
        assert_eq!(p.delta(), 3);
        assert_eq!(p.alphabet(), labels("M O P").as_slice());
        assert_eq!(p.node_constraint().len(), 2);
        assert_eq!(p.edge_constraint().len(), 2);
    }

    #[test]
    fn serializes_mis_golden() {
        let p = parse_problem(MIS3).unwrap();
        assert_eq!(
            serialize_problem(&p),
            "delta: 3\nnodes:\nM^3\nO^2 P\nedges:\nM [O P]\nO^2\n"
        );
    }

    #[test]
    fn serialization_is_a_fixed_point() {
        let p = parse_problem(MIS3).unwrap();
        let text = serialize_problem(&p);
        let q = parse_problem(&text).unwrap();
        assert_eq!(p, q);
        assert_eq!(serialize_problem(&q), text);
    }

    #[test]
    fn single_label_problem() {
        let p = parse_problem("delta: 2\nnodes:\nX^2\nedges:\nX X").unwrap();
        assert_eq!(p.alphabet(), labels("X").as_slice());
    }

    #[test]
    fn compact_brackets_split_per_letter() {
        let c = parse_config("M [PAOX]", 1).unwrap();
        assert_eq!(c.to_string(), "M [A O P X]");
        let c = parse_config("[X1 Y'] [AB]", 1).unwrap();
        assert_eq!(c.to_string(), "[A B] [X1 Y']");
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# MIS\ndelta: 3 # three\n\nnodes:\nM^3\nP O^2 # non-members\nedges:\nM [P O]\nO O\n";
        assert_eq!(parse_problem(text).unwrap(), parse_problem(MIS3).unwrap());
    }

    #[test]
    fn arity_mismatch_reports_line() {
        let err = parse_problem("delta: 3\nnodes:\nM^2\nedges:\nM M").unwrap_err();
        assert!(matches!(err, ProblemError::Syntax { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_problem("delta: 3\nnodes:\nM^3 p\nedges:\n").unwrap_err();
        assert_eq!(
            err,
            ProblemError::Syntax {
                line: 3,
                column: 5,
                message: "invalid label `p`".into()
            }
        );
        assert!(matches!(
            parse_problem("nodes:\n"),
            Err(ProblemError::Syntax { line: 1, .. })
        ));
        assert!(parse_problem("delta: 3\nnodes:\n[M P^3\nedges:\n").is_err());
        assert!(parse_problem("delta: 3\nnodes:\nM^0 P^3\nedges:\n").is_err());
        assert!(parse_problem("delta: 3\nnodes:\nM^3\n").is_err());
    }

    #[test]
    fn empty_edge_constraint_is_allowed() {
        let p = parse_problem("delta: 2\nnodes:\nM^2\nedges:\n").unwrap();
        assert!(p.edge_constraint().is_empty());
    }
}
