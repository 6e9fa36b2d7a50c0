//! Line-oriented problem files.
//!
//! ```text
//! # comment
//! problem "ex1"
//! evolve t
//! domain t in [0, 1], x in [0, 1]
//! degree t=16 x=16
//! const A1 = 1
//! var u: seed = 1 + x; rhs = -u_x + 2 + t + x
//! correct u: pin x=0 to 1 + t
//! correct u: blend x in [0, 1] to t + 2, (2 + t)/2
//! shoot v: slope of u over x in [0, 1] targets t + 2, (2 + t)/2
//! expand x at 0.5
//! exact = (1 + t)*(1 + x)
//! iterations 1
//! ```
//!
//! `var` lines are kept in order; that order is the sweep order. Numeric
//! fields accept constant expressions such as `pi/2`. Constants may be
//! declared anywhere in the file. `expand` moves the expansion point of a
//! coordinate away from the lower end of its interval.
//!
//! [`emit`] writes the canonical form that [`parse_problem`] reads back to an
//! equal [`ProblemSpec`].

use std::collections::HashMap;
use std::fmt::Write as _;

use super::ast::Expr;
use super::parser::{fold_constant, parse_expr, ParseDiagnostics};
use crate::engine::{Correction, CorrectionKind, Domain, Interval, ProblemSpec, ShootingSpec, VarSpec};
use crate::series::Axis;

/// Byte range of a line's content and the text of the line with any
/// comment stripped.
struct Line<'a> {
    start: usize,
    text: &'a str,
}

struct Cursor<'a> {
    consts: &'a HashMap<String, f64>,
    diags: &'a mut ParseDiagnostics,
}

impl Cursor<'_> {
    fn err(&mut self, at: usize, msg: impl Into<String>) {
        self.diags.items.push(super::parser::Diagnostic {
            position: at,
            message: msg.into(),
        });
    }

    fn expr(&mut self, text: &str, at: usize) -> Option<Expr> {
        let lead = text.len() - text.trim_start().len();
        match parse_expr(text.trim(), self.consts) {
            Ok(e) => Some(e),
            Err(d) => {
                self.diags.items.extend(d.offset(at + lead).items);
                None
            }
        }
    }

    fn number(&mut self, text: &str, at: usize) -> Option<f64> {
        let e = self.expr(text, at)?;
        match fold_constant(&e) {
            Some(v) if v.is_finite() => Some(v),
            _ => {
                self.err(at, format!("`{}` is not a constant number", text.trim()));
                None
            }
        }
    }

    fn axis(&mut self, text: &str, at: usize) -> Option<Axis> {
        match text.trim().parse() {
            Ok(a) => Some(a),
            Err(m) => {
                self.err(at, m);
                None
            }
        }
    }

    fn integer(&mut self, text: &str, at: usize) -> Option<usize> {
        match text.trim().parse() {
            Ok(n) => Some(n),
            Err(_) => {
                self.err(at, format!("expected a non-negative integer, found `{}`", text.trim()));
                None
            }
        }
    }

    /// `<axis> in [<lo>, <hi>]`
    fn interval(&mut self, text: &str, at: usize) -> Option<(Axis, f64, f64)> {
        let Some((axis_txt, rest)) = text.split_once(" in ") else {
            self.err(at, "expected `<axis> in [<lo>, <hi>]`");
            return None;
        };
        let axis = self.axis(axis_txt, at)?;
        let rest_at = at + axis_txt.len() + 4;
        let body = rest.trim();
        let Some(inner) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) else {
            self.err(rest_at, "expected `[<lo>, <hi>]`");
            return None;
        };
        let inner_at = rest_at + (rest.len() - rest.trim_start().len()) + 1;
        let parts = split_top_level(inner, ',');
        if parts.len() != 2 {
            self.err(inner_at, "an interval needs exactly two endpoints");
            return None;
        }
        let lo = self.number(parts[0].1, inner_at + parts[0].0)?;
        let hi = self.number(parts[1].1, inner_at + parts[1].0)?;
        Some((axis, lo, hi))
    }

    /// `<e1>, <e2>`
    fn expr_pair(&mut self, text: &str, at: usize) -> Option<(Expr, Expr)> {
        let parts = split_top_level(text, ',');
        if parts.len() != 2 {
            self.err(at, "expected two expressions separated by `,`");
            return None;
        }
        let a = self.expr(parts[0].1, at + parts[0].0);
        let b = self.expr(parts[1].1, at + parts[1].0);
        Some((a?, b?))
    }
}

/// Splits at `sep` outside brackets and parentheses; each piece carries its
/// byte offset in `s`.
fn split_top_level(s: &str, sep: char) -> Vec<(usize, &str)> {
    let mut depth = 0i32;
    let mut start = 0;
    let mut out = Vec::new();
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push((start, &s[start..i]));
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push((start, &s[start..]));
    out
}

/// Byte offset of `sub` within `base`; `sub` must be a subslice of `base`.
fn offset_in(base: &str, sub: &str) -> usize {
    sub.as_ptr() as usize - base.as_ptr() as usize
}

fn lines(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for raw in text.split_inclusive('\n') {
        let body = raw.trim_end_matches(['\n', '\r']);
        let mut in_quotes = false;
        let mut end = body.len();
        for (i, c) in body.char_indices() {
            match c {
                '"' => in_quotes = !in_quotes,
                '#' if !in_quotes => {
                    end = i;
                    break;
                }
                _ => {}
            }
        }
        let content = &body[..end];
        let lead = content.len() - content.trim_start().len();
        let trimmed = content.trim();
        if !trimmed.is_empty() {
            out.push(Line {
                start: offset + lead,
                text: trimmed,
            });
        }
        offset += raw.len();
    }
    out
}

/// Parses a problem file. All problems found are reported together.
pub fn parse_problem(text: &str) -> Result<ProblemSpec, ParseDiagnostics> {
    let lines = lines(text);
    let mut diags = ParseDiagnostics::default();

    // Constants first, so expressions anywhere in the file can use them.
    let mut constants: Vec<(String, f64)> = Vec::new();
    let mut table: HashMap<String, f64> = HashMap::new();
    for line in &lines {
        let Some(rest) = line.text.strip_prefix("const ") else {
            continue;
        };
        let at = line.start + 6;
        let Some((name, value)) = rest.split_once('=') else {
            diags.items.push(super::parser::Diagnostic {
                position: at,
                message: "expected `const <name> = <value>`".into(),
            });
            continue;
        };
        let name = name.trim().to_string();
        let mut cur = Cursor {
            consts: &table,
            diags: &mut diags,
        };
        let value = cur.number(value, at + rest.find('=').unwrap_or(0) + 1);
        if let Some(v) = value {
            if table.insert(name.clone(), v).is_some() {
                diags.items.push(super::parser::Diagnostic {
                    position: at,
                    message: format!("constant `{name}` declared twice"),
                });
            }
            constants.push((name, v));
        }
    }

    let mut name = None;
    let mut evolution = None;
    let mut domain = None;
    let mut degrees = (16, 16);
    let mut expand = (None, None);
    let mut vars = Vec::new();
    let mut corrections = Vec::new();
    let mut shooting = None;
    let mut exact = None;
    let mut iterations = None;

    let mut cur = Cursor {
        consts: &table,
        diags: &mut diags,
    };
    for line in &lines {
        let (keyword, rest) = line.text.split_once(' ').unwrap_or((line.text, ""));
        let rest_at = line.start + keyword.len() + 1;
        match keyword {
            "const" => {}
            "problem" => {
                let r = rest.trim();
                match r.strip_prefix('"').and_then(|r| r.strip_suffix('"')) {
                    Some(n) if !n.contains('"') => name = Some(n.to_string()),
                    _ => cur.err(rest_at, "expected `problem \"<name>\"`"),
                }
            }
            "evolve" => evolution = cur.axis(rest, rest_at),
            "domain" => {
                let parts = split_top_level(rest, ',');
                let mut d = Domain::unit();
                let mut seen = [false, false];
                for (off, part) in &parts {
                    let lead = part.len() - part.trim_start().len();
                    if let Some((axis, lo, hi)) = cur.interval(part.trim(), rest_at + off + lead) {
                        let slot = match axis {
                            Axis::T => &mut d.t,
                            Axis::X => &mut d.x,
                        };
                        *slot = Interval::new(lo, hi);
                        seen[axis as usize] = true;
                    }
                }
                if seen == [true, true] && parts.len() == 2 {
                    domain = Some(d);
                } else {
                    cur.err(rest_at, "domain needs one interval for t and one for x");
                }
            }
            "degree" => {
                for (off, part) in split_top_level(rest, ' ') {
                    if part.is_empty() {
                        continue;
                    }
                    let at = rest_at + off;
                    match part.split_once('=') {
                        Some(("t", n)) => degrees.0 = cur.integer(n, at + 2).unwrap_or(degrees.0),
                        Some(("x", n)) => degrees.1 = cur.integer(n, at + 2).unwrap_or(degrees.1),
                        _ => cur.err(at, "expected `t=<int>` or `x=<int>`"),
                    }
                }
            }
            "var" => {
                let Some((vname, body)) = rest.split_once(':') else {
                    cur.err(rest_at, "expected `var <name>: seed = <expr>; rhs = <expr>`");
                    continue;
                };
                let body_at = rest_at + vname.len() + 1;
                let parts = split_top_level(body, ';');
                let mut seed = None;
                let mut rhs = None;
                for (off, part) in &parts {
                    let at = body_at + off;
                    match part.split_once('=') {
                        Some((k, e)) if k.trim() == "seed" => seed = cur.expr(e, at + k.len() + 1),
                        Some((k, e)) if k.trim() == "rhs" => rhs = cur.expr(e, at + k.len() + 1),
                        _ => cur.err(at, "expected `seed = <expr>` or `rhs = <expr>`"),
                    }
                }
                match (seed, rhs) {
                    (Some(s), Some(r)) => vars.push(VarSpec::new(vname.trim(), s, r)),
                    _ => cur.err(rest_at, format!("variable `{}` needs both seed and rhs", vname.trim())),
                }
            }
            "correct" => {
                let Some((vname, body)) = rest.split_once(':') else {
                    cur.err(rest_at, "expected `correct <var>: pin ...` or `correct <var>: blend ...`");
                    continue;
                };
                let body_at = rest_at + vname.len() + 1;
                let body_lead = body.len() - body.trim_start().len();
                let body = body.trim();
                let body_at = body_at + body_lead;
                let var = vname.trim().to_string();
                if let Some(pin) = body.strip_prefix("pin ") {
                    let Some((loc, target)) = pin.split_once(" to ") else {
                        cur.err(body_at, "expected `pin <axis>=<value> to <expr>`");
                        continue;
                    };
                    let Some((axis_txt, point)) = loc.split_once('=') else {
                        cur.err(body_at + 4, "expected `<axis>=<value>`");
                        continue;
                    };
                    let axis = cur.axis(axis_txt, body_at + 4);
                    let point = cur.number(point, body_at + 4 + axis_txt.len() + 1);
                    let target = cur.expr(target, body_at + 4 + loc.len() + 4);
                    if let (Some(axis), Some(point), Some(target)) = (axis, point, target) {
                        corrections.push(Correction {
                            var,
                            axis,
                            kind: CorrectionKind::Pin { point, target },
                        });
                    }
                } else if let Some(blend) = body.strip_prefix("blend ") {
                    let Some((span, targets)) = blend.split_once(" to ") else {
                        cur.err(body_at, "expected `blend <axis> in [a, b] to <expr>, <expr>`");
                        continue;
                    };
                    let iv = cur.interval(span, body_at + 6);
                    let pair = cur.expr_pair(targets, body_at + 6 + span.len() + 4);
                    if let (Some((axis, a, b)), Some((alpha, beta))) = (iv, pair) {
                        corrections.push(Correction {
                            var,
                            axis,
                            kind: CorrectionKind::Blend { a, b, alpha, beta },
                        });
                    }
                } else {
                    cur.err(body_at, "expected `pin` or `blend`");
                }
            }
            "shoot" => {
                let at = |sub: &str| line.start + offset_in(line.text, sub);
                let parsed = rest.split_once(':').and_then(|(slope, body)| {
                    let body = body.trim_start().strip_prefix("slope of ")?;
                    let (primary, body) = body.split_once(" over ")?;
                    let (span, targets) = body.split_once(" targets ")?;
                    Some((slope, primary, span, targets))
                });
                let Some((slope, primary, span, targets)) = parsed else {
                    cur.err(
                        rest_at,
                        "expected `shoot <v>: slope of <u> over <axis> in [a, b] targets <expr>, <expr>`",
                    );
                    continue;
                };
                let iv = cur.interval(span, at(span));
                let pair = cur.expr_pair(targets, at(targets));
                if let (Some((axis, a, b)), Some((alpha, beta))) = (iv, pair) {
                    shooting = Some(ShootingSpec {
                        slope_var: slope.trim().to_string(),
                        primary_var: primary.trim().to_string(),
                        axis,
                        a,
                        b,
                        alpha,
                        beta,
                    });
                }
            }
            "expand" => match rest.split_once(" at ") {
                Some((axis_txt, v)) => {
                    let axis = cur.axis(axis_txt, rest_at);
                    let v = cur.number(v, rest_at + axis_txt.len() + 4);
                    match (axis, v) {
                        (Some(Axis::T), Some(v)) => expand.0 = Some(v),
                        (Some(Axis::X), Some(v)) => expand.1 = Some(v),
                        _ => {}
                    }
                }
                None => cur.err(rest_at, "expected `expand <axis> at <value>`"),
            },
            "exact" => match rest.trim_start().strip_prefix('=') {
                Some(e) => exact = cur.expr(e, rest_at + (rest.len() - rest.trim_start().len()) + 1),
                None => cur.err(rest_at, "expected `exact = <expr>`"),
            },
            "iterations" => iterations = cur.integer(rest, rest_at),
            other => cur.err(line.start, format!("unknown directive `{other}`")),
        }
    }

    let missing = |d: &mut ParseDiagnostics, what: &str| {
        d.items.push(super::parser::Diagnostic {
            position: text.len(),
            message: format!("missing `{what}` line"),
        })
    };
    if name.is_none() {
        missing(&mut diags, "problem");
    }
    if evolution.is_none() {
        missing(&mut diags, "evolve");
    }
    if iterations.is_none() {
        missing(&mut diags, "iterations");
    }
    let evolution = evolution.unwrap_or(Axis::T);
    if !diags.items.is_empty() {
        return Err(diags);
    }
    Ok(ProblemSpec {
        name: name.unwrap_or_default(),
        evolution,
        domain: domain.unwrap_or_else(Domain::unit),
        degrees,
        expand,
        constants,
        vars,
        corrections,
        shooting,
        exact,
        iterations: iterations.unwrap_or(1),
    })
}

/// Canonical problem-file text for `p`.
pub fn emit(p: &ProblemSpec) -> String {
    let mut s = String::new();
    let d = &p.domain;
    let _ = writeln!(s, "problem \"{}\"", p.name);
    let _ = writeln!(s, "evolve {}", p.evolution);
    let _ = writeln!(
        s,
        "domain t in [{}, {}], x in [{}, {}]",
        d.t.lo, d.t.hi, d.x.lo, d.x.hi
    );
    let _ = writeln!(s, "degree t={} x={}", p.degrees.0, p.degrees.1);
    for axis in [Axis::T, Axis::X] {
        if let Some(v) = p.expand_along(axis) {
            let _ = writeln!(s, "expand {axis} at {v}");
        }
    }
    for (name, value) in &p.constants {
        let _ = writeln!(s, "const {name} = {value}");
    }
    for v in &p.vars {
        let _ = writeln!(s, "var {}: seed = {}; rhs = {}", v.name, v.seed, v.rhs);
    }
    for c in &p.corrections {
        match &c.kind {
            CorrectionKind::Pin { point, target } => {
                let _ = writeln!(s, "correct {}: pin {}={point} to {target}", c.var, c.axis);
            }
            CorrectionKind::Blend { a, b, alpha, beta } => {
                let _ = writeln!(s, "correct {}: blend {} in [{a}, {b}] to {alpha}, {beta}", c.var, c.axis);
            }
        }
    }
    if let Some(sh) = &p.shooting {
        let _ = writeln!(
            s,
            "shoot {}: slope of {} over {} in [{}, {}] targets {}, {}",
            sh.slope_var, sh.primary_var, sh.axis, sh.a, sh.b, sh.alpha, sh.beta
        );
    }
    if let Some(e) = &p.exact {
        let _ = writeln!(s, "exact = {e}");
    }
    let _ = writeln!(s, "iterations {}", p.iterations);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX1: &str = "\
# first example
problem \"ex1\"
evolve t
domain t in [0, 1], x in [0, 1]
degree t=8 x=8
var u: seed = 1 + x; rhs = -u_x + 2 + t + x   # the PDE
correct u: pin x=0 to 1 + t
exact = (1 + t)*(1 + x)
iterations 1
";

    #[test]
    fn parses_the_first_example() {
        let p = parse_problem(EX1).unwrap();
        assert_eq!(p.name, "ex1");
        assert_eq!(p.evolution, Axis::T);
        assert_eq!(p.degrees, (8, 8));
        assert_eq!(p.vars.len(), 1);
        assert_eq!(p.vars[0].rhs.to_string(), "-u_x + 2 + t + x");
        assert!(matches!(p.corrections[0].kind, CorrectionKind::Pin { point, .. } if point == 0.0));
        assert_eq!(p.iterations, 1);
        p.validate().unwrap();
    }

    #[test]
    fn emit_then_parse_is_identity() {
        let p = parse_problem(EX1).unwrap();
        let text = emit(&p);
        assert_eq!(parse_problem(&text).unwrap(), p);
        assert_eq!(emit(&parse_problem(&text).unwrap()), text);
    }

    #[test]
    fn constants_blend_and_shooting() {
        let text = "\
problem \"mix\"
evolve x
domain t in [0, 1], x in [0, pi/2]
const m = 0.5
const k = 2*m
var u: seed = t + k; rhs = v
var v: seed = 0; rhs = -2*u_t*v
correct u: blend t in [0, 1] to sin(x), m*x
shoot v: slope of u over x in [0, pi/2] targets t + 2, (2 + t)/2
iterations 4
";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.constants, vec![("m".into(), 0.5), ("k".into(), 1.0)]);
        assert_eq!(p.domain.x.hi, std::f64::consts::FRAC_PI_2);
        let sh = p.shooting.as_ref().unwrap();
        assert_eq!((sh.slope_var.as_str(), sh.primary_var.as_str()), ("v", "u"));
        assert_eq!(sh.b, std::f64::consts::FRAC_PI_2);
        assert_eq!(sh.beta.to_string(), "(2 + t)/2");
        p.validate().unwrap();
        assert_eq!(parse_problem(&emit(&p)).unwrap(), p);
    }

    #[test]
    fn reports_every_bad_line_with_positions() {
        let text = "problem \"bad\"\nevolve q\nvar u: seed = 1 +; rhs = u\nfrobnicate\niterations 1\n";
        let err = parse_problem(text).unwrap_err();
        assert!(err.items.len() >= 3, "{err}");
        for d in &err.items {
            assert!(d.position <= text.len());
        }
        let unknown = err.items.iter().find(|d| d.message.contains("frobnicate")).unwrap();
        assert_eq!(&text[unknown.position..unknown.position + 10], "frobnicate");
        let seed = err.items.iter().find(|d| d.message.contains("expected a number")).unwrap();
        assert!(text[seed.position..].starts_with("; rhs"));
    }

    #[test]
    fn missing_required_lines() {
        let err = parse_problem("var u: seed = 1; rhs = 0\n").unwrap_err();
        let msgs: Vec<_> = err.items.iter().map(|d| d.message.as_str()).collect();
        assert!(msgs.iter().any(|m| m.contains("problem")));
        assert!(msgs.iter().any(|m| m.contains("evolve")));
        assert!(msgs.iter().any(|m| m.contains("iterations")));
    }
}
