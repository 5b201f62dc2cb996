//! LP model files: writer and a small reader for structural checks.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::mip::{MipModel, RowSense, VarKind};

/// Terms per line before wrapping.
const TERMS_PER_LINE: usize = 8;

/// Formats like C's `%.17g`.
pub fn fmt_g17(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, v)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn write_terms(out: &mut String, model: &MipModel, terms: &[(usize, f64)]) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (k, &(j, a)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let name = &model.variables[j].name;
        let sign = if a < 0.0 || (a == 0.0 && a.is_sign_negative()) { '-' } else { '+' };
        if k == 0 && sign == '+' {
            let _ = write!(out, " {} {}", fmt_g17(a.abs()), name);
        } else {
            let _ = write!(out, " {} {} {}", sign, fmt_g17(a.abs()), name);
        }
    }
}

/// Serializes `model` in the LP file dialect: `Minimize`, `Subject To`,
/// `Bounds`, `Binaries`, `End`. Empty sections are omitted.
pub fn write_lp(model: &MipModel) -> String {
    let mut out = String::from("Minimize\n obj:");
    write_terms(&mut out, model, &model.objective);
    out.push('\n');
    if !model.constraints.is_empty() {
        out.push_str("Subject To\n");
        for c in &model.constraints {
            let _ = write!(out, " {}:", c.name);
            write_terms(&mut out, model, &c.terms);
            let op = match c.sense {
                RowSense::Le => "<=",
                RowSense::Ge => ">=",
                RowSense::Eq => "=",
            };
            let _ = writeln!(out, " {} {}", op, fmt_g17(c.rhs));
        }
    }
    if !model.variables.is_empty() {
        out.push_str("Bounds\n");
        for v in &model.variables {
            let _ = writeln!(out, " {} <= {} <= {}", fmt_g17(v.lower), v.name, fmt_g17(v.upper));
        }
    }
    let binaries: Vec<&str> = model
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for b in binaries {
            let _ = writeln!(out, " {b}");
        }
    }
    out.push_str("End\n");
    out
}

/// Row and column counts read back from an LP file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LpSummary {
    pub rows: usize,
    pub columns: usize,
    pub binaries: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    Binaries,
    Generals,
}

fn is_name(tok: &str) -> bool {
    let mut chars = tok.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || "_!\"#$%&()/,;?@`'{}|~".contains(c) => {}
        _ => return false,
    }
    let lower = tok.to_ascii_lowercase();
    !matches!(lower.as_str(), "inf" | "infinity" | "free")
}

/// Reads the sections of an LP file written by [`write_lp`] or any other
/// writer of the same dialect, counting rows, distinct columns and binaries.
pub fn read_lp_summary(text: &str) -> Result<LpSummary> {
    let mut section = Section::None;
    let mut columns = BTreeSet::new();
    let mut binaries = BTreeSet::new();
    let mut rows = 0;
    let mut ended = false;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('\\').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lower = line.to_ascii_lowercase();
        let header = match lower.as_str() {
            "minimize" | "minimum" | "min" | "maximize" | "maximum" | "max" => Some(Section::Objective),
            "subject to" | "such that" | "st" | "s.t." | "st." => Some(Section::Constraints),
            "bounds" | "bound" => Some(Section::Bounds),
            "binaries" | "binary" | "bin" => Some(Section::Binaries),
            "generals" | "general" | "gen" => Some(Section::Generals),
            "end" => {
                ended = true;
                break;
            }
            _ => None,
        };
        if let Some(s) = header {
            section = s;
            continue;
        }
        let mut tokens: Vec<&str> = line.split_whitespace().collect();
        if let Some(first) = tokens.first() {
            if let Some(label) = first.strip_suffix(':') {
                if section == Section::Constraints && !label.is_empty() {
                    rows += 1;
                }
                tokens.remove(0);
            } else if section == Section::Constraints && line.contains(':') {
                rows += 1;
                let after = line.split_once(':').map(|x| x.1).unwrap_or("");
                tokens = after.split_whitespace().collect();
            }
        }
        match section {
            Section::None => {
                return Err(Error::Syntax {
                    line: n + 1,
                    message: "content before the objective section".into(),
                })
            }
            Section::Objective | Section::Constraints | Section::Bounds | Section::Generals => {
                columns.extend(tokens.into_iter().filter(|t| is_name(t)).map(str::to_string));
            }
            Section::Binaries => {
                for t in tokens.into_iter().filter(|t| is_name(t)) {
                    columns.insert(t.to_string());
                    binaries.insert(t.to_string());
                }
            }
        }
    }
    if !ended {
        return Err(Error::Syntax {
            line: text.lines().count(),
            message: "missing End".into(),
        });
    }
    Ok(LpSummary {
        rows,
        columns: columns.len(),
        binaries: binaries.len(),
    })
}
