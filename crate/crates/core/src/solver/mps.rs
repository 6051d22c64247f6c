//! Fixed-format MPS writer and a whitespace-tolerant reader. Numbers are
//! written exactly, widening their field when 12 characters do not suffice.
//!
//! Columns are named `C0000000`, `C0000001`, ... and rows `R0000000`, ... in
//! model order. Binary columns are wrapped in `INTORG`/`INTEND` markers. The
//! objective constant is stored as the negated right-hand side of `OBJ`.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{MilpModel, SolverError};
use crate::expr::{LinExpr, LinearConstraint, Sense};
use crate::graph::{Domain, VariableDef};

pub const OBJECTIVE_ROW: &str = "OBJ";

pub fn column_name(j: usize) -> String {
    format!("C{j:07}")
}

pub fn row_name(i: usize) -> String {
    format!("R{i:07}")
}

/// Shortest decimal form of `v` that parses back to the same bits. Fits
/// the 12-character field for most data; longer values overflow the field
/// rather than lose precision.
pub(crate) fn format_number(v: f64) -> String {
    let plain = format!("{v}");
    let sci = format!("{v:e}");
    if sci.len() < plain.len() {
        sci
    } else {
        plain
    }
}

fn field(v: f64) -> String {
    format_number(v)
}

pub fn export_mps(m: &MilpModel) -> String {
    let mut out = String::new();
    out.push_str("NAME          OPTIGRAPH\n");
    out.push_str("ROWS\n");
    let _ = writeln!(out, " N  {OBJECTIVE_ROW}");
    for (i, r) in m.rows.iter().enumerate() {
        let t = match r.sense() {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        let _ = writeln!(out, " {t}  {}", row_name(i));
    }

    // column-major entries
    let mut entries: Vec<Vec<(String, f64)>> = vec![Vec::new(); m.columns.len()];
    for &(j, c) in m.objective.terms() {
        entries[j].push((OBJECTIVE_ROW.to_string(), c));
    }
    for (i, r) in m.rows.iter().enumerate() {
        for &(j, a) in r.body().terms() {
            entries[j].push((row_name(i), a));
        }
    }
    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut marker = 0;
    for (j, col) in m.columns.iter().enumerate() {
        if col.is_binary() != in_int {
            let kind = if in_int { "INTEND" } else { "INTORG" };
            let _ = writeln!(out, "    M{marker:07}  'MARKER'                 '{kind}'");
            marker += 1;
            in_int = col.is_binary();
        }
        let name = column_name(j);
        if entries[j].is_empty() {
            let _ = writeln!(out, "    {name:<8}  {OBJECTIVE_ROW:<8}  {:>12}", "0");
        }
        for (row, v) in &entries[j] {
            let _ = writeln!(out, "    {name:<8}  {row:<8}  {:>12}", field(*v));
        }
    }
    if in_int {
        let _ = writeln!(out, "    M{marker:07}  'MARKER'                 'INTEND'");
    }

    out.push_str("RHS\n");
    let constant = m.objective.constant_value();
    if constant != 0.0 {
        let _ = writeln!(
            out,
            "    RHS       {OBJECTIVE_ROW:<8}  {:>12}",
            field(-constant)
        );
    }
    for (i, r) in m.rows.iter().enumerate() {
        if r.rhs() != 0.0 {
            let _ = writeln!(
                out,
                "    RHS       {:<8}  {:>12}",
                row_name(i),
                field(r.rhs())
            );
        }
    }

    out.push_str("BOUNDS\n");
    for (j, col) in m.columns.iter().enumerate() {
        let name = column_name(j);
        let (l, u) = (col.lower, col.upper);
        let mut line = |kind: &str, v: Option<f64>| {
            match v {
                Some(v) => writeln!(out, " {kind} BND       {name:<8}  {:>12}", field(v)),
                None => writeln!(out, " {kind} BND       {name}"),
            }
            .expect("write to string");
        };
        if col.is_binary() && l == 0.0 && u == 1.0 {
            line("BV", None);
        } else if l == u {
            line("FX", Some(l));
        } else if l == f64::NEG_INFINITY && u == f64::INFINITY {
            line("FR", None);
        } else {
            if l == f64::NEG_INFINITY {
                line("MI", None);
            } else if l != 0.0 || col.is_binary() {
                line("LO", Some(l));
            }
            if u.is_finite() {
                line("UP", Some(u));
            } else if col.is_binary() {
                line("PL", None);
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

#[derive(PartialEq)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Bounds,
    End,
}

fn parse_num(tok: &str, line: usize) -> Result<f64, SolverError> {
    tok.parse::<f64>().map_err(|_| SolverError::Parse {
        line,
        message: format!("invalid number `{tok}`"),
    })
}

fn err(line: usize, message: impl Into<String>) -> SolverError {
    SolverError::Parse {
        line,
        message: message.into(),
    }
}

/// Reads MPS text (fixed or free layout; fields split on whitespace). The
/// first `N` row is the objective; further `N` rows are ignored.
pub fn parse_mps(text: &str) -> Result<MilpModel, SolverError> {
    let mut section = Section::None;
    let mut objective_row: Option<String> = None;
    let mut free_rows: Vec<String> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut row_sense: Vec<Sense> = Vec::new();
    let mut row_terms: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut row_rhs: Vec<f64> = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut columns: Vec<VariableDef> = Vec::new();
    let mut bounded: Vec<bool> = Vec::new();
    let mut obj_terms: Vec<(usize, f64)> = Vec::new();
    let mut obj_constant = 0.0;
    let mut in_int = false;

    for (k, raw) in text.lines().enumerate() {
        let ln = k + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(' ') && !raw.starts_with('\t') {
            section = match toks[0].to_ascii_uppercase().as_str() {
                "NAME" => Section::None,
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => Section::End,
                "RANGES" => return Err(err(ln, "RANGES section is not supported")),
                "OBJSENSE" => return Err(err(ln, "OBJSENSE is not supported")),
                other => return Err(err(ln, format!("unknown section `{other}`"))),
            };
            continue;
        }
        match section {
            Section::Rows => {
                if toks.len() != 2 {
                    return Err(err(ln, "ROWS entry needs a type and a name"));
                }
                let name = toks[1].to_string();
                let sense = match toks[0].to_ascii_uppercase().as_str() {
                    "N" => {
                        if objective_row.is_none() {
                            objective_row = Some(name);
                        } else {
                            free_rows.push(name);
                        }
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    t => return Err(err(ln, format!("unknown row type `{t}`"))),
                };
                if row_index.insert(name.clone(), row_sense.len()).is_some() {
                    return Err(err(ln, format!("duplicate row `{name}`")));
                }
                row_sense.push(sense);
                row_terms.push(Vec::new());
                row_rhs.push(0.0);
            }
            Section::Columns => {
                if toks.len() >= 3 && toks[1] == "'MARKER'" {
                    match toks[2] {
                        "'INTORG'" => in_int = true,
                        "'INTEND'" => in_int = false,
                        t => return Err(err(ln, format!("unknown marker `{t}`"))),
                    }
                    continue;
                }
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(err(ln, "COLUMNS entry needs 3 or 5 fields"));
                }
                let name = toks[0];
                let j = match col_index.get(name) {
                    Some(&j) => j,
                    None => {
                        let j = columns.len();
                        col_index.insert(name.to_string(), j);
                        let def = if in_int {
                            VariableDef::binary(name)
                        } else {
                            VariableDef::nonneg(name)
                        };
                        columns.push(def);
                        bounded.push(false);
                        j
                    }
                };
                for pair in toks[1..].chunks(2) {
                    let v = parse_num(pair[1], ln)?;
                    if objective_row.as_deref() == Some(pair[0]) {
                        obj_terms.push((j, v));
                    } else if let Some(&i) = row_index.get(pair[0]) {
                        row_terms[i].push((j, v));
                    } else if !free_rows.iter().any(|r| r == pair[0]) {
                        return Err(err(ln, format!("unknown row `{}`", pair[0])));
                    }
                }
            }
            Section::Rhs => {
                let fields = if toks.len() % 2 == 1 {
                    &toks[1..]
                } else {
                    &toks[..]
                };
                for pair in fields.chunks(2) {
                    if pair.len() != 2 {
                        return Err(err(ln, "RHS entry needs a row and a value"));
                    }
                    let v = parse_num(pair[1], ln)?;
                    if objective_row.as_deref() == Some(pair[0]) {
                        obj_constant = -v;
                    } else if let Some(&i) = row_index.get(pair[0]) {
                        row_rhs[i] = v;
                    } else if !free_rows.iter().any(|r| r == pair[0]) {
                        return Err(err(ln, format!("unknown row `{}`", pair[0])));
                    }
                }
            }
            Section::Bounds => {
                if toks.len() < 3 {
                    return Err(err(ln, "BOUNDS entry needs a type, set and column"));
                }
                let kind = toks[0].to_ascii_uppercase();
                let j = *col_index
                    .get(toks[2])
                    .ok_or_else(|| err(ln, format!("unknown column `{}`", toks[2])))?;
                let value = || -> Result<f64, SolverError> {
                    toks.get(3)
                        .ok_or_else(|| err(ln, format!("{kind} bound needs a value")))
                        .and_then(|t| parse_num(t, ln))
                };
                let c = &mut columns[j];
                bounded[j] = true;
                match kind.as_str() {
                    "UP" => c.upper = value()?,
                    "LO" => c.lower = value()?,
                    "FX" => {
                        let v = value()?;
                        c.lower = v;
                        c.upper = v;
                    }
                    "FR" => {
                        c.lower = f64::NEG_INFINITY;
                        c.upper = f64::INFINITY;
                    }
                    "MI" => c.lower = f64::NEG_INFINITY,
                    "PL" => c.upper = f64::INFINITY,
                    "BV" => {
                        c.domain = Domain::Binary;
                        c.lower = 0.0;
                        c.upper = 1.0;
                    }
                    t => return Err(err(ln, format!("unsupported bound type `{t}`"))),
                }
            }
            Section::None | Section::End => {
                return Err(err(ln, "data line outside a section"));
            }
        }
    }
    if section != Section::End {
        return Err(err(text.lines().count(), "missing ENDATA"));
    }
    for c in &columns {
        if c.validate().is_err() {
            return Err(err(
                0,
                format!("column `{}` has unsupported bounds for its domain", c.name),
            ));
        }
    }
    let rows = row_sense
        .iter()
        .zip(row_terms)
        .zip(row_rhs)
        .map(|((&s, t), rhs)| LinearConstraint::new(LinExpr::from_terms(t, 0.0), s, rhs))
        .collect();
    Ok(MilpModel {
        columns,
        rows,
        objective: LinExpr::from_terms(obj_terms, obj_constant),
    })
}
