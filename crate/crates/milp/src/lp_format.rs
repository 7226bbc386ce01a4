use std::fmt::Write;

use crate::model::{Model, Sense, VarId, VarKind};

const TERMS_PER_LINE: usize = 8;

/// Renders the model in the CPLEX-style LP text format
/// (`Minimize` / `Subject To` / `Bounds` / `Binaries` / `End`).
///
/// Output is a pure function of the model: variables and rows appear in
/// insertion order and numbers use the shortest round-trip representation.
pub fn export_lp_text(model: &Model) -> String {
    let mut out = String::new();
    let names: Vec<String> = model.variables().iter().map(|v| lp_name(&v.name)).collect();

    out.push_str("\\ generated by confl-milp\n");
    out.push_str("Minimize\n obj:");
    let objective: Vec<(VarId, f64)> = model.objective_terms().collect();
    if objective.is_empty() {
        if let Some(first) = names.first() {
            let _ = write!(out, " 0 {first}");
        }
    }
    write_terms(&mut out, &objective, &names);
    out.push('\n');

    out.push_str("Subject To\n");
    for (i, row) in model.constraints().iter().enumerate() {
        let _ = write!(out, " c{}_{}:", i, lp_name(&row.tag));
        if row.terms.is_empty() {
            if let Some(first) = names.first() {
                let _ = write!(out, " 0 {first}");
            }
        }
        write_terms(&mut out, &row.terms, &names);
        let sense = match row.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {} {}", sense, num(row.rhs));
    }

    out.push_str("Bounds\n");
    for (var, name) in model.variables().iter().zip(&names) {
        let (lo, up) = (var.lower, var.upper);
        if var.kind == VarKind::Binary && lo == 0.0 && up == 1.0 {
            continue;
        }
        if lo == up {
            let _ = writeln!(out, " {} = {}", name, num(lo));
        } else if lo == f64::NEG_INFINITY && up == f64::INFINITY {
            let _ = writeln!(out, " {name} free");
        } else if up == f64::INFINITY {
            let _ = writeln!(out, " {} >= {}", name, num(lo));
        } else {
            let _ = writeln!(out, " {} <= {} <= {}", num(lo), name, num(up));
        }
    }

    out.push_str("Binaries\n");
    let binaries: Vec<&str> = model
        .variables()
        .iter()
        .zip(&names)
        .filter(|(v, _)| v.kind == VarKind::Binary)
        .map(|(_, n)| n.as_str())
        .collect();
    for chunk in binaries.chunks(TERMS_PER_LINE) {
        let _ = writeln!(out, " {}", chunk.join(" "));
    }
    out.push_str("End\n");
    out
}

fn write_terms(out: &mut String, terms: &[(VarId, f64)], names: &[String]) {
    for (k, &(var, coef)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if coef < 0.0 { '-' } else { '+' };
        if k == 0 && sign == '+' {
            let _ = write!(out, " {} {}", num(coef), names[var.0]);
        } else {
            let _ = write!(out, " {} {} {}", sign, num(coef.abs()), names[var.0]);
        }
    }
}

fn num(x: f64) -> String {
    if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else if x == 0.0 {
        "0".into()
    } else {
        format!("{x}")
    }
}

/// LP names must start with a letter and avoid operator characters.
fn lp_name(raw: &str) -> String {
    let mut name: String = raw
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    while name.ends_with('_') {
        name.pop();
    }
    if !name.starts_with(|c: char| c.is_ascii_alphabetic()) {
        name.insert(0, 'v');
    }
    name
}
