//! CPLEX LP text writer and reader (minimization, binaries only).
//!
//! The objective lists every column, with zero coefficients where needed, so
//! reading a written file reproduces the column order.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::mps::{column_name, row_name};
use super::{MilpModel, SolverError};
use crate::expr::{LinExpr, LinearConstraint, Sense};
use crate::graph::{Domain, VariableDef};

const TERMS_PER_LINE: usize = 8;

fn num(v: f64) -> String {
    super::mps::format_number(v)
}

fn write_terms(out: &mut String, terms: impl Iterator<Item = (usize, f64)>) {
    for (k, (j, c)) in terms.enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if c < 0.0 || (c == 0.0 && c.is_sign_negative()) {
            "-"
        } else {
            "+"
        };
        let _ = write!(out, " {sign} {} {}", num(c.abs()), column_name(j));
    }
}

pub fn export_lp(m: &MilpModel) -> String {
    let mut out = String::from("\\ written by optigraph\nMinimize\n obj:");
    let mut dense = vec![0.0; m.columns.len()];
    for &(j, c) in m.objective.terms() {
        dense[j] = c;
    }
    write_terms(&mut out, dense.iter().copied().enumerate());
    let constant = m.objective.constant_value();
    if constant != 0.0 {
        let sign = if constant < 0.0 { "-" } else { "+" };
        let _ = write!(out, " {sign} {}", num(constant.abs()));
    }
    out.push_str("\nSubject To\n");
    for (i, r) in m.rows.iter().enumerate() {
        if m.columns.is_empty() {
            break;
        }
        let _ = write!(out, " {}:", row_name(i));
        if r.body().is_empty() {
            write_terms(&mut out, std::iter::once((0, 0.0)));
        } else {
            write_terms(&mut out, r.body().terms().iter().copied());
        }
        let op = match r.sense() {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", num(r.rhs()));
    }
    out.push_str("Bounds\n");
    let bound = |v: f64| {
        if v == f64::INFINITY {
            "+inf".to_string()
        } else if v == f64::NEG_INFINITY {
            "-inf".to_string()
        } else {
            num(v)
        }
    };
    for (j, c) in m.columns.iter().enumerate() {
        let name = column_name(j);
        let (l, u) = (c.lower, c.upper);
        if c.is_binary() && l == 0.0 && u == 1.0 {
            continue;
        }
        if l == u {
            let _ = writeln!(out, " {name} = {}", num(l));
        } else if l == f64::NEG_INFINITY && u == f64::INFINITY {
            let _ = writeln!(out, " {name} free");
        } else if !(l == 0.0 && u == f64::INFINITY) {
            let _ = writeln!(out, " {} <= {name} <= {}", bound(l), bound(u));
        }
    }
    let bins = m.binaries();
    if !bins.is_empty() {
        out.push_str("Binaries\n");
        for chunk in bins.chunks(TERMS_PER_LINE) {
            let names: Vec<String> = chunk.iter().map(|&j| column_name(j)).collect();
            let _ = writeln!(out, " {}", names.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum Sec {
    Objective,
    Constraints,
    Bounds,
    Binaries,
    End,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(Sense),
    Plus,
    Minus,
    Colon,
}

fn err(line: usize, message: impl Into<String>) -> SolverError {
    SolverError::Parse {
        line,
        message: message.into(),
    }
}

fn section_keyword(line: &str) -> Option<Sec> {
    let l = line.trim().to_ascii_lowercase();
    match l.as_str() {
        "minimize" | "minimise" | "minimum" | "min" => Some(Sec::Objective),
        "subject to" | "such that" | "st" | "s.t." | "st." => Some(Sec::Constraints),
        "bounds" | "bound" => Some(Sec::Bounds),
        "binaries" | "binary" | "bin" => Some(Sec::Binaries),
        "end" => Some(Sec::End),
        _ => None,
    }
}

fn tokenize(s: &str, line: usize) -> Result<Vec<(Tok, usize)>, SolverError> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c == '+' {
            out.push((Tok::Plus, line));
            i += 1;
        } else if c == '-' {
            out.push((Tok::Minus, line));
            i += 1;
        } else if c == ':' {
            out.push((Tok::Colon, line));
            i += 1;
        } else if c == '<' || c == '>' || c == '=' {
            let mut j = i + 1;
            while j < b.len() && matches!(b[j], b'<' | b'>' | b'=') {
                j += 1;
            }
            let op = &s[i..j];
            let sense = match op {
                "<=" | "=<" | "<" => Sense::Le,
                ">=" | "=>" | ">" => Sense::Ge,
                "=" => Sense::Eq,
                _ => return Err(err(line, format!("unknown operator `{op}`"))),
            };
            out.push((Tok::Op(sense), line));
            i = j;
        } else if c.is_ascii_digit() || c == '.' {
            let mut j = i;
            while j < b.len() {
                let d = b[j] as char;
                let exp_sign = (d == '+' || d == '-') && j > i && matches!(b[j - 1], b'e' | b'E');
                if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                    j += 1;
                } else {
                    break;
                }
            }
            let t = &s[i..j];
            let v = t
                .parse::<f64>()
                .map_err(|_| err(line, format!("invalid number `{t}`")))?;
            out.push((Tok::Num(v), line));
            i = j;
        } else {
            let mut j = i;
            while j < b.len() {
                let d = b[j] as char;
                if d.is_whitespace() || matches!(d, '+' | '-' | ':' | '<' | '>' | '=') {
                    break;
                }
                j += 1;
            }
            let word = &s[i..j];
            let lower = word.to_ascii_lowercase();
            if lower == "inf" || lower == "infinity" {
                out.push((Tok::Num(f64::INFINITY), line));
            } else {
                out.push((Tok::Ident(word.to_string()), line));
            }
            i = j;
        }
    }
    Ok(out)
}

struct Columns {
    index: HashMap<String, usize>,
    defs: Vec<VariableDef>,
}

impl Columns {
    fn get(&mut self, name: &str) -> usize {
        if let Some(&j) = self.index.get(name) {
            return j;
        }
        let j = self.defs.len();
        self.index.insert(name.to_string(), j);
        self.defs.push(VariableDef::nonneg(name));
        j
    }
}

// Parses `[+|-] [num] [ident]` terms until an operator or the end.
fn parse_expr(
    toks: &[(Tok, usize)],
    pos: &mut usize,
    cols: &mut Columns,
) -> Result<LinExpr<usize>, SolverError> {
    let mut terms = Vec::new();
    let mut constant = 0.0;
    while *pos < toks.len() {
        let line = toks[*pos].1;
        let mut sign = 1.0;
        let mut saw_sign = false;
        while let Some((Tok::Plus | Tok::Minus, _)) = toks.get(*pos) {
            if toks[*pos].0 == Tok::Minus {
                sign = -sign;
            }
            saw_sign = true;
            *pos += 1;
        }
        match toks.get(*pos) {
            Some((Tok::Num(v), _)) => {
                let v = *v;
                *pos += 1;
                if let Some((Tok::Ident(name), _)) = toks.get(*pos) {
                    let is_label = matches!(toks.get(*pos + 1), Some((Tok::Colon, _)));
                    if !is_label {
                        terms.push((cols.get(name), sign * v));
                        *pos += 1;
                        continue;
                    }
                }
                constant += sign * v;
            }
            Some((Tok::Ident(name), _)) => {
                if matches!(toks.get(*pos + 1), Some((Tok::Colon, _))) {
                    if saw_sign {
                        return Err(err(line, "dangling sign"));
                    }
                    break;
                }
                terms.push((cols.get(name), sign));
                *pos += 1;
            }
            _ => {
                if saw_sign {
                    return Err(err(line, "dangling sign"));
                }
                break;
            }
        }
    }
    Ok(LinExpr::from_terms(terms, constant))
}

fn signed_number(toks: &[(Tok, usize)], pos: &mut usize, line: usize) -> Result<f64, SolverError> {
    let mut sign = 1.0;
    while let Some((t @ (Tok::Plus | Tok::Minus), _)) = toks.get(*pos) {
        if *t == Tok::Minus {
            sign = -sign;
        }
        *pos += 1;
    }
    match toks.get(*pos) {
        Some((Tok::Num(v), _)) => {
            *pos += 1;
            Ok(sign * v)
        }
        _ => Err(err(line, "expected a number")),
    }
}

/// Reads CPLEX LP text. Columns are numbered by first appearance.
pub fn parse_lp(text: &str) -> Result<MilpModel, SolverError> {
    let mut sec: Option<Sec> = None;
    let mut buf: [Vec<(Tok, usize)>; 2] = [Vec::new(), Vec::new()];
    let mut bound_lines: Vec<(String, usize)> = Vec::new();
    let mut binary_names: Vec<(String, usize)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let ln = k + 1;
        let line = raw.split('\\').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        if let Some(s) = section_keyword(line) {
            sec = Some(s);
            continue;
        }
        let lower = line.trim().to_ascii_lowercase();
        if lower.starts_with("maximize") || lower.starts_with("maximum") || lower == "max" {
            return Err(err(ln, "maximization is not supported"));
        }
        if lower == "generals" || lower == "general" || lower == "semi-continuous" {
            return Err(err(
                ln,
                "general integer and semi-continuous columns are not supported",
            ));
        }
        match sec {
            Some(Sec::Objective) => buf[0].extend(tokenize(line, ln)?),
            Some(Sec::Constraints) => buf[1].extend(tokenize(line, ln)?),
            Some(Sec::Bounds) => bound_lines.push((line.to_string(), ln)),
            Some(Sec::Binaries) => {
                binary_names.extend(line.split_whitespace().map(|w| (w.to_string(), ln)))
            }
            Some(Sec::End) => return Err(err(ln, "text after End")),
            None => return Err(err(ln, "expected Minimize")),
        }
    }
    if sec != Some(Sec::End) {
        return Err(err(text.lines().count(), "missing End"));
    }
    let mut cols = Columns {
        index: HashMap::new(),
        defs: Vec::new(),
    };

    // objective
    let toks = &buf[0];
    let mut pos = 0;
    if matches!(toks.get(1), Some((Tok::Colon, _))) {
        pos = 2;
    }
    let objective = parse_expr(toks, &mut pos, &mut cols)?;
    if pos != toks.len() {
        return Err(err(toks[pos].1, "unexpected token in objective"));
    }

    // constraints
    let toks = &buf[1];
    let mut pos = 0;
    let mut rows = Vec::new();
    while pos < toks.len() {
        let line = toks[pos].1;
        if let (Some((Tok::Ident(_), _)), Some((Tok::Colon, _))) =
            (toks.get(pos), toks.get(pos + 1))
        {
            pos += 2;
        }
        let body = parse_expr(toks, &mut pos, &mut cols)?;
        let sense = match toks.get(pos) {
            Some((Tok::Op(s), _)) => *s,
            _ => return Err(err(line, "constraint needs <=, >= or =")),
        };
        pos += 1;
        let rhs = signed_number(toks, &mut pos, line)?;
        rows.push(LinearConstraint::new(body, sense, rhs));
    }

    for (line, ln) in &bound_lines {
        let toks = tokenize(line, *ln)?;
        apply_bound(&toks, &mut cols, *ln)?;
    }
    for (name, ln) in &binary_names {
        let j = *cols
            .index
            .get(name.as_str())
            .ok_or_else(|| err(*ln, format!("unknown column `{name}`")))?;
        let c = &mut cols.defs[j];
        c.domain = Domain::Binary;
        if c.lower == 0.0 && c.upper == f64::INFINITY {
            c.upper = 1.0;
        }
        if c.validate().is_err() {
            return Err(err(
                *ln,
                format!("binary column `{name}` has bounds outside [0, 1]"),
            ));
        }
    }
    Ok(MilpModel {
        columns: cols.defs,
        rows,
        objective,
    })
}

fn apply_bound(toks: &[(Tok, usize)], cols: &mut Columns, ln: usize) -> Result<(), SolverError> {
    let bad = || err(ln, "malformed bound");
    let mut pos = 0;
    let lead = match toks.first() {
        Some((Tok::Ident(_), _)) => None,
        _ => Some(signed_number(toks, &mut pos, ln)?),
    };
    if let Some(first) = lead {
        // `l <= x [<= u]` or `u >= x`
        let Some((Tok::Op(op), _)) = toks.get(pos) else {
            return Err(bad());
        };
        let Some((Tok::Ident(name), _)) = toks.get(pos + 1) else {
            return Err(bad());
        };
        let j = cols.get(name);
        pos += 2;
        match op {
            Sense::Le => cols.defs[j].lower = first,
            Sense::Ge => cols.defs[j].upper = first,
            Sense::Eq => {
                cols.defs[j].lower = first;
                cols.defs[j].upper = first;
            }
        }
        if pos < toks.len() {
            let Some((Tok::Op(op2), _)) = toks.get(pos) else {
                return Err(bad());
            };
            pos += 1;
            let second = signed_number(toks, &mut pos, ln)?;
            match op2 {
                Sense::Le => cols.defs[j].upper = second,
                Sense::Ge => cols.defs[j].lower = second,
                Sense::Eq => return Err(bad()),
            }
        }
    } else {
        let Some((Tok::Ident(name), _)) = toks.first() else {
            return Err(bad());
        };
        let j = cols.get(name);
        pos = 1;
        match toks.get(pos) {
            Some((Tok::Ident(w), _)) if w.eq_ignore_ascii_case("free") => {
                cols.defs[j].lower = f64::NEG_INFINITY;
                cols.defs[j].upper = f64::INFINITY;
                pos += 1;
            }
            Some((Tok::Op(op), _)) => {
                pos += 1;
                let v = signed_number(toks, &mut pos, ln)?;
                match op {
                    Sense::Le => cols.defs[j].upper = v,
                    Sense::Ge => cols.defs[j].lower = v,
                    Sense::Eq => {
                        cols.defs[j].lower = v;
                        cols.defs[j].upper = v;
                    }
                }
            }
            _ => return Err(bad()),
        }
    }
    if pos != toks.len() {
        return Err(bad());
    }
    Ok(())
}
