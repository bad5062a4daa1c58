//! Writer and parser for the subset of the CPLEX LP text format used by the
//! models in this crate: a minimization objective, named rows, explicit
//! bounds for every column and `General`/`Binary` sections.

use std::io::Write;

use crate::error::{Error, Result};
use crate::lpsolve::{ColumnSpec, LinearProgram, RowSense};

const TERMS_PER_LINE: usize = 8;

fn push_terms(out: &mut String, terms: impl Iterator<Item = (f64, String)>) {
    for (k, (coef, name)) in terms.enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if coef.is_sign_negative() { "-" } else { "+" };
        if k == 0 && sign == "+" {
            out.push_str(&format!(" {} {name}", coef));
        } else {
            out.push_str(&format!(" {sign} {} {name}", coef.abs()));
        }
    }
}

fn bound(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        v.to_string()
    }
}

/// Text of `lp` in LP format. Every column appears in the objective (with a
/// zero coefficient if need be) so that parsing restores the column order.
pub fn to_lp_string(lp: &LinearProgram) -> String {
    let cols = lp.columns();
    let mut out = String::from("\\ generated by btiepi\nMinimize\n obj:");
    push_terms(&mut out, cols.iter().map(|c| (c.cost, c.name.clone())));
    out.push_str("\nSubject To\n");
    for row in lp.rows() {
        out.push_str(&format!(" {}:", row.name));
        if row.coeffs.is_empty() {
            if let Some(c) = cols.first() {
                out.push_str(&format!(" 0 {}", c.name));
            }
        }
        push_terms(&mut out, row.coeffs.iter().map(|&(j, a)| (a, cols[j].name.clone())));
        let sense = match row.sense {
            RowSense::Le => "<=",
            RowSense::Ge => ">=",
            RowSense::Eq => "=",
        };
        out.push_str(&format!(" {sense} {}\n", row.rhs));
    }
    out.push_str("Bounds\n");
    for c in cols {
        if c.lower == f64::NEG_INFINITY && c.upper == f64::INFINITY {
            out.push_str(&format!(" {} free\n", c.name));
        } else {
            out.push_str(&format!(" {} <= {} <= {}\n", bound(c.lower), c.name, bound(c.upper)));
        }
    }
    let binary: Vec<&str> = cols
        .iter()
        .filter(|c| c.integer && c.lower == 0.0 && c.upper == 1.0)
        .map(|c| c.name.as_str())
        .collect();
    let general: Vec<&str> = cols
        .iter()
        .filter(|c| c.integer && !(c.lower == 0.0 && c.upper == 1.0))
        .map(|c| c.name.as_str())
        .collect();
    for (title, names) in [("General", general), ("Binary", binary)] {
        if !names.is_empty() {
            out.push_str(title);
            out.push('\n');
            for chunk in names.chunks(TERMS_PER_LINE) {
                out.push(' ');
                out.push_str(&chunk.join(" "));
                out.push('\n');
            }
        }
    }
    out.push_str("End\n");
    out
}

pub fn write_lp<W: Write>(lp: &LinearProgram, mut out: W) -> Result<()> {
    out.write_all(to_lp_string(lp).as_bytes())?;
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Name(String),
    Plus,
    Minus,
    Colon,
    Sense(RowSense),
}

fn parse_error(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || "_.!\"#$%&()/,;?@'`{}|~[]".contains(c)
}

fn tokenize(text: &str, line: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        match c {
            c if c.is_whitespace() => k += 1,
            '+' => {
                out.push(Token::Plus);
                k += 1;
            }
            '-' => {
                out.push(Token::Minus);
                k += 1;
            }
            ':' => {
                out.push(Token::Colon);
                k += 1;
            }
            '<' | '>' | '=' => {
                let mut op = String::from(c);
                k += 1;
                while k < chars.len() && "<>=".contains(chars[k]) {
                    op.push(chars[k]);
                    k += 1;
                }
                let sense = match op.as_str() {
                    "<" | "<=" | "=<" => RowSense::Le,
                    ">" | ">=" | "=>" => RowSense::Ge,
                    "=" => RowSense::Eq,
                    _ => return Err(parse_error(line, format!("unknown operator {op}"))),
                };
                out.push(Token::Sense(sense));
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = k;
                while k < chars.len() {
                    let d = chars[k];
                    let exp_sign = (d == '+' || d == '-') && matches!(chars[k - 1], 'e' | 'E');
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                        k += 1;
                    } else {
                        break;
                    }
                }
                let s: String = chars[start..k].iter().collect();
                let v = s.parse().map_err(|_| parse_error(line, format!("bad number {s}")))?;
                out.push(Token::Num(v));
            }
            c if is_name_char(c) => {
                let start = k;
                while k < chars.len() && is_name_char(chars[k]) {
                    k += 1;
                }
                let s: String = chars[start..k].iter().collect();
                match s.to_ascii_lowercase().as_str() {
                    "inf" | "infinity" => out.push(Token::Num(f64::INFINITY)),
                    _ => out.push(Token::Name(s)),
                }
            }
            _ => return Err(parse_error(line, format!("unexpected character {c:?}"))),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective { maximize: bool },
    Constraints,
    Bounds,
    General,
    Binary,
    End,
}

fn section_header(line: &str) -> Option<Section> {
    match line.trim().to_ascii_lowercase().as_str() {
        "minimize" | "minimise" | "min" => Some(Section::Objective { maximize: false }),
        "maximize" | "maximise" | "max" => Some(Section::Objective { maximize: true }),
        "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
        "bounds" | "bound" => Some(Section::Bounds),
        "general" | "generals" | "gen" | "integer" | "integers" => Some(Section::General),
        "binary" | "binaries" | "bin" => Some(Section::Binary),
        "end" => Some(Section::End),
        _ => None,
    }
}

struct Builder {
    lp: LinearProgram,
}

impl Builder {
    fn column(&mut self, name: &str) -> usize {
        match self.lp.column(name) {
            Some(j) => j,
            None => self
                .lp
                .add_column(ColumnSpec::continuous(name, 0.0, f64::INFINITY, 0.0)),
        }
    }

    /// Parses `[name:] terms` and returns the name, the terms and the rest.
    fn expression<'t>(
        &mut self,
        tokens: &'t [Token],
        line: usize,
    ) -> Result<(Option<String>, Vec<(usize, f64)>, &'t [Token])> {
        let (name, mut rest) = match tokens {
            [Token::Name(n), Token::Colon, rest @ ..] => (Some(n.clone()), rest),
            _ => (None, tokens),
        };
        let mut terms = Vec::new();
        loop {
            let mut sign = 1.0;
            let mut signed = false;
            while let Some(t @ (Token::Plus | Token::Minus)) = rest.first() {
                if *t == Token::Minus {
                    sign = -sign;
                }
                signed = true;
                rest = &rest[1..];
            }
            let (coef, after) = match rest {
                [Token::Num(v), after @ ..] => (*v, after),
                _ => (1.0, rest),
            };
            match after {
                [Token::Name(n), tail @ ..] => {
                    let j = self.column(n);
                    terms.push((j, sign * coef));
                    rest = tail;
                }
                _ if signed || !std::ptr::eq(after, rest) => {
                    return Err(parse_error(line, "expected a variable name"));
                }
                _ => break,
            }
        }
        Ok((name, terms, rest))
    }
}

fn signed_number(tokens: &[Token], line: usize) -> Result<(f64, &[Token])> {
    match tokens {
        [Token::Minus, Token::Num(v), rest @ ..] => Ok((-v, rest)),
        [Token::Plus, Token::Num(v), rest @ ..] | [Token::Num(v), rest @ ..] => Ok((*v, rest)),
        _ => Err(parse_error(line, "expected a number")),
    }
}

/// Parses LP-format text into a minimization problem (a maximization
/// objective is negated).
pub fn parse_lp(text: &str) -> Result<LinearProgram> {
    let mut builder = Builder {
        lp: LinearProgram::new(),
    };
    let mut section = Section::Preamble;
    let mut pending: Vec<Token> = Vec::new();
    let mut pending_line = 0;
    let mut objective_seen = false;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('\\').next().unwrap_or("");
        if let Some(next) = section_header(content) {
            if !pending.is_empty() {
                return Err(parse_error(pending_line, "incomplete statement"));
            }
            if section == Section::Preamble && !matches!(next, Section::Objective { .. }) {
                return Err(parse_error(line, "expected an objective section"));
            }
            section = next;
            continue;
        }
        if content.trim().is_empty() {
            continue;
        }
        match section {
            Section::Preamble => return Err(parse_error(line, "expected an objective section")),
            Section::End => return Err(parse_error(line, "text after End")),
            Section::Objective { maximize } => {
                if objective_seen && !raw.starts_with(char::is_whitespace) {
                    return Err(parse_error(line, "second objective"));
                }
                objective_seen = true;
                let tokens = tokenize(content, line)?;
                let (_, terms, rest) = builder.expression(&tokens, line)?;
                if !rest.is_empty() {
                    return Err(parse_error(line, "unexpected tokens in objective"));
                }
                for (j, c) in terms {
                    let c = if maximize { -c } else { c };
                    builder.lp.set_cost(j, c);
                }
            }
            Section::Constraints => {
                if pending.is_empty() {
                    pending_line = line;
                }
                pending.extend(tokenize(content, line)?);
                if !pending.iter().any(|t| matches!(t, Token::Sense(_))) {
                    continue;
                }
                let tokens = std::mem::take(&mut pending);
                let (name, terms, rest) = builder.expression(&tokens, pending_line)?;
                let [Token::Sense(sense), rhs @ ..] = rest else {
                    return Err(parse_error(pending_line, "expected <=, >= or ="));
                };
                let (rhs, tail) = signed_number(rhs, pending_line)?;
                if !tail.is_empty() {
                    return Err(parse_error(pending_line, "unexpected tokens after right-hand side"));
                }
                let name = name.unwrap_or_else(|| format!("r{}", builder.lp.rows().len() + 1));
                builder.lp.add_named_row(name, terms, *sense, rhs)?;
            }
            Section::Bounds => parse_bound(&mut builder, &tokenize(content, line)?, line)?,
            Section::General | Section::Binary => {
                for tok in tokenize(content, line)? {
                    let Token::Name(n) = tok else {
                        return Err(parse_error(line, "expected variable names"));
                    };
                    let j = builder.column(&n);
                    builder.lp.set_integer(j, true);
                    if section == Section::Binary {
                        builder.lp.set_bounds(j, 0.0, 1.0);
                    }
                }
            }
        }
    }
    if !pending.is_empty() {
        return Err(parse_error(pending_line, "incomplete statement"));
    }
    Ok(builder.lp)
}

fn parse_bound(builder: &mut Builder, tokens: &[Token], line: usize) -> Result<()> {
    let bad = || parse_error(line, "unrecognized bound");
    if let [Token::Name(n), Token::Name(kw)] = tokens {
        if kw.eq_ignore_ascii_case("free") {
            let j = builder.column(n);
            builder.lp.set_bounds(j, f64::NEG_INFINITY, f64::INFINITY);
            return Ok(());
        }
        return Err(bad());
    }
    // lo <= x <= hi
    if let Ok((lo, [Token::Sense(RowSense::Le), Token::Name(n), Token::Sense(RowSense::Le), rest @ ..])) =
        signed_number(tokens, line)
    {
        let (hi, tail) = signed_number(rest, line)?;
        if !tail.is_empty() {
            return Err(bad());
        }
        let j = builder.column(n);
        builder.lp.set_bounds(j, lo, hi);
        return Ok(());
    }
    // x op v  or  v op x
    let (name, sense, value) = match tokens {
        [Token::Name(n), Token::Sense(s), rest @ ..] => {
            let (v, tail) = signed_number(rest, line)?;
            if !tail.is_empty() {
                return Err(bad());
            }
            (n, *s, v)
        }
        _ => {
            let (v, rest) = signed_number(tokens, line)?;
            match rest {
                [Token::Sense(s), Token::Name(n)] => {
                    let flipped = match s {
                        RowSense::Le => RowSense::Ge,
                        RowSense::Ge => RowSense::Le,
                        RowSense::Eq => RowSense::Eq,
                    };
                    (n, flipped, v)
                }
                _ => return Err(bad()),
            }
        }
    };
    let j = builder.column(name);
    let c = &builder.lp.columns()[j];
    let (lo, hi) = match sense {
        RowSense::Le => (c.lower, value),
        RowSense::Ge => (value, c.upper),
        RowSense::Eq => (value, value),
    };
    builder.lp.set_bounds(j, lo, hi);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> LinearProgram {
        let mut lp = LinearProgram::new();
        let x = lp.add_column(ColumnSpec::continuous("x", 0.0, f64::INFINITY, 1.5));
        let y = lp.add_column(ColumnSpec::continuous("y", f64::NEG_INFINITY, f64::INFINITY, -0.1));
        let z = lp.add_column(ColumnSpec::binary("z", 0.0));
        let mut g = ColumnSpec::continuous("g", -3.0, 7.0, 1e-17);
        g.integer = true;
        let g = lp.add_column(g);
        lp.add_named_row("c1", vec![(x, 1.0), (y, -2.0 / 3.0)], RowSense::Ge, -1.25).unwrap();
        lp.add_named_row("c2", vec![(z, 3.0), (g, 1e-9)], RowSense::Eq, 0.0).unwrap();
        lp.add_named_row("c3", (0..4).cycle().take(4).map(|j| (j, 0.1 * (j as f64 + 1.0))).collect(), RowSense::Le, 1e20).unwrap();
        lp
    }

    #[test]
    fn round_trip_is_exact() {
        let lp = sample();
        let text = to_lp_string(&lp);
        let back = parse_lp(&text).unwrap();
        assert_eq!(back, lp);
        assert_eq!(to_lp_string(&back), text);
    }

    #[test]
    fn long_rows_wrap() {
        let mut lp = LinearProgram::new();
        let cols: Vec<usize> = (0..30).map(|k| lp.add_column(ColumnSpec::continuous(format!("v{k}"), 0.0, 1.0, 1.0))).collect();
        lp.add_named_row("big", cols.iter().map(|&c| (c, -1.0)).collect(), RowSense::Ge, -10.0).unwrap();
        let text = to_lp_string(&lp);
        assert!(text.lines().all(|l| l.len() < 255));
        assert_eq!(parse_lp(&text).unwrap(), lp);
    }

    #[test]
    fn hand_written_text() {
        let text = "\\ test\nMaximize\n obj: 2 x + y\nSubject To\n a: x + y <= 4\n -x + y >= -2\nBounds\n x <= 3\n y >= 1\n-inf <= w <= 2\nGeneral\n x\nEnd\n";
        let lp = parse_lp(text).unwrap();
        assert_eq!(lp.columns()[0].cost, -2.0);
        assert_eq!(lp.columns()[0].upper, 3.0);
        assert!(lp.columns()[0].integer);
        assert_eq!(lp.columns()[1].lower, 1.0);
        assert_eq!(lp.columns()[2].lower, f64::NEG_INFINITY);
        assert_eq!(lp.rows()[1].name, "r2");
        assert_eq!(lp.rows()[1].coeffs, vec![(0, -1.0), (1, 1.0)]);
    }

    #[test]
    fn malformed_text() {
        assert!(parse_lp("Subject To\n x >= 1\nEnd\n").is_err());
        assert!(parse_lp("Minimize\n obj: x\nSubject To\n c: x + >= 1\nEnd\n").is_err());
        assert!(parse_lp("Minimize\n obj: x\nSubject To\n c: x >= \nEnd\n").is_err());
        assert!(parse_lp("Minimize\n obj: x\nBounds\n x maybe\nEnd\n").is_err());
        assert!(matches!(parse_lp("Minimize\n obj: x * 2\n"), Err(Error::Parse { line: 2, .. })));
    }
}
