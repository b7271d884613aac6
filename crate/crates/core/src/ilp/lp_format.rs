use std::fmt::Write;

use num_rational::Ratio;

use super::model::{Coef, IlpModel, VarKind};

const LINE: usize = 78;

/// Exact decimal form of a coefficient whose denominator divides a power of ten.
pub fn decimal(x: Coef) -> String {
    if x.is_integer() {
        return x.numer().to_string();
    }
    let negative = x < Ratio::from_integer(0);
    let x = if negative { -x } else { x };
    let mut scale = 1i64;
    let mut digits = 0;
    while scale % x.denom() != 0 {
        scale *= 10;
        digits += 1;
        assert!(digits <= 15, "coefficient {x} has no short decimal form");
    }
    let scaled = x.numer() * (scale / x.denom());
    let int = scaled / scale;
    let frac = format!("{:0width$}", scaled % scale, width = digits);
    let frac = frac.trim_end_matches('0');
    format!("{}{int}.{frac}", if negative { "-" } else { "" })
}

fn push_terms(out: &mut String, head: &str, terms: &[(usize, Coef)], model: &IlpModel, tail: &str) {
    let mut line = head.to_string();
    let mut first = true;
    for &(id, k) in terms {
        let name = &model.variables()[id].name;
        let mag = if k < Ratio::from_integer(0) { -k } else { k };
        let sign = if k < Ratio::from_integer(0) {
            "- "
        } else if first {
            ""
        } else {
            "+ "
        };
        let term = if mag == Ratio::from_integer(1) {
            format!("{sign}{name}")
        } else {
            format!("{sign}{} {name}", decimal(mag))
        };
        if line.len() + term.len() + 1 > LINE && !first {
            out.push_str(line.trim_end());
            out.push('\n');
            line = "   ".to_string();
        }
        line.push(' ');
        line.push_str(&term);
        first = false;
    }
    if first {
        line.push_str(" 0");
    }
    if line.len() + tail.len() > LINE {
        out.push_str(line.trim_end());
        out.push('\n');
        line = "   ".to_string();
    }
    line.push_str(tail);
    out.push_str(&line);
    out.push('\n');
}

/// Serializes the model in LP format. The output depends only on the model.
pub fn to_lp_file(model: &IlpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ compressor tree: {} compression stages, {} columns, objective {}",
        model.stages(),
        model.columns(),
        model.mode().as_str()
    );
    for (t, g) in model.gpcs().iter().enumerate() {
        let _ = writeln!(out, "\\ t = {t}: {} cost {}", g.name(), g.cost());
    }
    out.push_str("Minimize\n");
    push_terms(&mut out, " obj:", model.objective(), model, "");
    out.push_str("Subject To\n");
    for con in model.constraints() {
        let tail = format!(" {} {}", con.sense.symbol(), decimal(con.rhs));
        push_terms(&mut out, &format!(" {}:", con.name), &con.terms, model, &tail);
    }
    out.push_str("Bounds\n");
    for v in model.variables() {
        if v.kind == VarKind::Binary {
            continue;
        }
        match v.upper {
            Some(u) if u == v.lower => {
                let _ = writeln!(out, " {} = {u}", v.name);
            }
            Some(u) => {
                let _ = writeln!(out, " {} <= {} <= {u}", v.lower, v.name);
            }
            None => {
                let _ = writeln!(out, " {} >= {}", v.name, v.lower);
            }
        }
    }
    let mut section = |title: &str, kind: VarKind| {
        let names: Vec<&str> = model
            .variables()
            .iter()
            .filter(|v| v.kind == kind)
            .map(|v| v.name.as_str())
            .collect();
        if names.is_empty() {
            return;
        }
        out.push_str(title);
        out.push('\n');
        let mut line = String::new();
        for name in names {
            if line.len() + name.len() + 1 > LINE {
                out.push_str(&line);
                out.push('\n');
                line.clear();
            }
            line.push(' ');
            line.push_str(name);
        }
        out.push_str(&line);
        out.push('\n');
    };
    section("Generals", VarKind::Integer);
    section("Binaries", VarKind::Binary);
    out.push_str("End\n");
    out
}
