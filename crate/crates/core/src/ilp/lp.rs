//! LP text format: `Maximize`, `Subject To`, `Binary`, `End`.
//!
//! Provenance goes in leading `\` comment lines so that a model written here
//! reads back with its metadata. Long rows wrap onto indented continuation
//! lines, which LP readers join.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::{parse_variable, variable_name, IlpModel, ModelMetadata};
use crate::bitseq::Word;
use crate::constraints::{parse_families, LinearConstraint, Sense};
use crate::error::{Error, Result};

const TERMS_PER_LINE: usize = 8;

fn push_terms(out: &mut String, terms: impl Iterator<Item = (Word, i64)>) {
    let mut any = false;
    for (k, (w, c)) in terms.enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let mag = c.unsigned_abs();
        let sign = if c < 0 { "-" } else { "+" };
        if k == 0 {
            if c < 0 {
                out.push_str("- ");
            }
        } else {
            let _ = write!(out, " {sign} ");
        }
        if mag != 1 {
            let _ = write!(out, "{mag} ");
        }
        out.push_str(&variable_name(&w));
        any = true;
    }
    if !any {
        out.push('0');
    }
}

/// Renders the model. Output depends only on the model.
pub fn write_lp_string(model: &IlpModel) -> String {
    let meta = model.metadata();
    let mut out = String::new();
    let _ = writeln!(out, "\\ single-deletion code model, sdecc-core {}", meta.version);
    let _ = writeln!(out, "\\ n: {}", model.n());
    let families: Vec<String> = meta.families.iter().map(|f| f.to_string()).collect();
    let _ = writeln!(out, "\\ families: {}", families.join(","));
    if !meta.c6_splits.is_empty() {
        let splits: Vec<String> = meta.c6_splits.iter().map(|(p, q)| format!("{p},{q}")).collect();
        let _ = writeln!(out, "\\ c6: {}", splits.join(" "));
    }
    out.push_str("Maximize\n obj: ");
    push_terms(&mut out, model.variables().map(|w| (w, 1)));
    out.push_str("\nSubject To\n");
    for c in model.constraints() {
        let _ = write!(out, " {}: ", c.label);
        push_terms(&mut out, c.terms.iter().copied());
        let _ = writeln!(out, " {} {}", c.sense.symbol(), c.rhs);
    }
    out.push_str("Binary\n");
    let names: Vec<String> = model.variables().map(|w| variable_name(&w)).collect();
    for chunk in names.chunks(TERMS_PER_LINE) {
        let _ = writeln!(out, " {}", chunk.join(" "));
    }
    out.push_str("End\n");
    out
}

/// Writes the model and returns the number of bytes written.
pub fn write_lp<W: Write>(model: &IlpModel, mut sink: W) -> Result<usize> {
    let text = write_lp_string(model);
    sink.write_all(text.as_bytes())?;
    sink.flush()?;
    Ok(text.len())
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Name(String),
    Number(i64),
    Colon,
    Plus,
    Minus,
    Cmp(Sense),
}

fn tokenize(line: &str, lineno: usize) -> Result<Vec<Token>> {
    let err = |msg: String| Error::Parse { line: lineno, msg };
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\r' => i += 1,
            ':' => {
                out.push(Token::Colon);
                i += 1;
            }
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '<' | '>' | '=' => {
                let mut j = i + 1;
                while j < chars.len() && matches!(chars[j], '<' | '>' | '=') {
                    j += 1;
                }
                let op: String = chars[i..j].iter().collect();
                let sense = match op.as_str() {
                    "<=" | "=<" | "<" => Sense::Le,
                    ">=" | "=>" | ">" => Sense::Ge,
                    "=" => Sense::Eq,
                    _ => return Err(err(format!("bad comparison {op:?}"))),
                };
                out.push(Token::Cmp(sense));
                i = j;
            }
            d if d.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                let text: String = chars[i..j].iter().collect();
                let value: f64 = text.parse().map_err(|_| err(format!("bad number {text:?}")))?;
                if value.fract() != 0.0 {
                    return Err(err(format!("non-integer coefficient {text}")));
                }
                out.push(Token::Number(value as i64));
                i = j;
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || "_.[]".contains(chars[j])) {
                    j += 1;
                }
                out.push(Token::Name(chars[i..j].iter().collect()));
                i = j;
            }
            other => return Err(err(format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Binary,
    Ignored,
    Done,
}

fn section_keyword(line: &str) -> Option<Section> {
    match line.trim().to_ascii_lowercase().as_str() {
        "maximize" | "maximise" | "maximum" | "max" => Some(Section::Objective),
        "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
        "binary" | "binaries" | "bin" => Some(Section::Binary),
        "bounds" | "general" | "generals" | "gen" => Some(Section::Ignored),
        "end" => Some(Section::Done),
        _ => None,
    }
}

struct RowParser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl RowParser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.0)
    }

    fn line(&self) -> usize {
        self.tokens.get(self.pos).or(self.tokens.last()).map(|t| t.1).unwrap_or(0)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line(), msg: msg.into() }
    }

    fn label(&mut self) -> Option<String> {
        if let (Some(Token::Name(n)), Some((Token::Colon, _))) = (self.peek(), self.tokens.get(self.pos + 1)) {
            let n = n.clone();
            self.pos += 2;
            Some(n)
        } else {
            None
        }
    }

    /// Parses `[+|-] [coef] name ...` until a comparison or the end.
    fn terms(&mut self) -> Result<Vec<(String, i64)>> {
        let mut out = Vec::new();
        loop {
            let mut sign = 1;
            let mut saw_sign = false;
            while let Some(Token::Plus | Token::Minus) = self.peek() {
                if self.next() == Some(Token::Minus) {
                    sign = -sign;
                }
                saw_sign = true;
            }
            match self.peek() {
                None | Some(Token::Cmp(_)) if !saw_sign => return Ok(out),
                Some(Token::Number(_)) => {
                    let Some(Token::Number(c)) = self.next() else { unreachable!() };
                    match self.next() {
                        Some(Token::Name(v)) => out.push((v, sign * c)),
                        // A bare constant such as the `0` of an empty row.
                        _ if c == 0 => {
                            self.pos -= 1;
                        }
                        _ => return Err(self.err("constant terms are not supported")),
                    }
                }
                Some(Token::Name(_)) => {
                    let Some(Token::Name(v)) = self.next() else { unreachable!() };
                    out.push((v, sign));
                }
                _ => return Err(self.err("expected a term")),
            }
            if !matches!(self.peek(), Some(Token::Plus | Token::Minus | Token::Number(_) | Token::Name(_))) {
                return Ok(out);
            }
            if let (Some(Token::Name(_)), Some((Token::Colon, _))) = (self.peek(), self.tokens.get(self.pos + 1)) {
                return Ok(out);
            }
        }
    }

    fn rhs(&mut self) -> Result<i64> {
        let mut sign = 1;
        while let Some(Token::Plus | Token::Minus) = self.peek() {
            if self.next() == Some(Token::Minus) {
                sign = -sign;
            }
        }
        match self.next() {
            Some(Token::Number(v)) => Ok(sign * v),
            _ => Err(self.err("expected a right-hand side")),
        }
    }
}

fn parse_metadata(comment: &str, meta: &mut ModelMetadata, n: &mut Option<usize>) {
    let body = comment.trim_start_matches('\\').trim();
    if let Some(v) = body.strip_prefix("n:") {
        *n = v.trim().parse().ok();
    } else if let Some(v) = body.strip_prefix("families:") {
        if let Ok(f) = parse_families(v.trim()) {
            meta.families = f;
        }
    } else if let Some(v) = body.strip_prefix("c6:") {
        meta.c6_splits = v
            .split_whitespace()
            .filter_map(|pair| {
                let (p, q) = pair.split_once(',')?;
                Some((p.parse().ok()?, q.parse().ok()?))
            })
            .collect();
    } else if let Some(pos) = body.find("sdecc-core ") {
        meta.version = body[pos + "sdecc-core ".len()..].trim().to_string();
    }
}

/// Reads an LP file with a unit maximize objective over `x_<bits>` binaries,
/// such as those produced by [`write_lp`].
pub fn read_lp<R: BufRead>(input: R) -> Result<IlpModel> {
    let mut meta = ModelMetadata::default();
    let mut declared_n = None;
    let mut section = Section::Preamble;
    let mut objective: Vec<(Token, usize)> = Vec::new();
    let mut rows: Vec<(Token, usize)> = Vec::new();
    let mut binaries: Vec<String> = Vec::new();

    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let (content, comment) = match line.find('\\') {
            Some(p) => (&line[..p], Some(&line[p..])),
            None => (line.as_str(), None),
        };
        if let Some(c) = comment {
            if section == Section::Preamble {
                parse_metadata(c, &mut meta, &mut declared_n);
            }
        }
        if content.trim().is_empty() {
            continue;
        }
        let lower = content.trim().to_ascii_lowercase();
        if lower == "minimize" || lower == "minimise" || lower == "min" {
            return Err(Error::Parse { line: lineno, msg: "only maximization models are supported".into() });
        }
        if let Some(s) = section_keyword(content) {
            section = s;
            continue;
        }
        match section {
            Section::Preamble => {
                return Err(Error::Parse { line: lineno, msg: "content before the objective section".into() })
            }
            Section::Objective => objective.extend(tokenize(content, lineno)?.into_iter().map(|t| (t, lineno))),
            Section::Constraints => {
                // Labels are taken verbatim so they may contain operator characters.
                let mut body = content;
                if let Some((label, rest)) = content.trim_start().split_once(':') {
                    if !label.is_empty() && !label.contains(char::is_whitespace) {
                        rows.push((Token::Name(label.to_string()), lineno));
                        rows.push((Token::Colon, lineno));
                        body = rest;
                    }
                }
                rows.extend(tokenize(body, lineno)?.into_iter().map(|t| (t, lineno)));
            }
            Section::Binary => binaries.extend(content.split_whitespace().map(str::to_string)),
            Section::Ignored => {}
            Section::Done => {
                return Err(Error::Parse { line: lineno, msg: "content after End".into() });
            }
        }
    }
    if section != Section::Done {
        return Err(Error::Format("missing End".into()));
    }

    let mut obj = RowParser { tokens: objective, pos: 0 };
    obj.label();
    let obj_terms = obj.terms()?;
    if obj.peek().is_some() {
        return Err(obj.err("unexpected token in objective"));
    }
    let n = match declared_n {
        Some(n) => n,
        None => obj_terms
            .first()
            .and_then(|(v, _)| parse_variable(v))
            .map(|w| w.len())
            .ok_or(Error::Format("cannot infer word length".into()))?,
    };
    let resolve = |name: &str| -> Result<Word> {
        parse_variable(name).filter(|w| w.len() == n).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    };

    let mut seen = vec![false; 1 << n];
    for (v, c) in &obj_terms {
        let w = resolve(v)?;
        if *c != 1 || std::mem::replace(&mut seen[w.index()], true) {
            return Err(Error::Format(format!("objective must be the unit sum; bad term {c} {v}")));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Format(format!("objective must cover all {} variables", 1 << n)));
    }
    for b in &binaries {
        resolve(b)?;
    }

    let mut parser = RowParser { tokens: rows, pos: 0 };
    let mut constraints = Vec::new();
    while parser.peek().is_some() {
        let label = parser.label().unwrap_or_else(|| format!("r{}", constraints.len() + 1));
        let terms = parser.terms()?;
        let sense = match parser.next() {
            Some(Token::Cmp(s)) => s,
            _ => return Err(parser.err(format!("row {label}: expected a comparison"))),
        };
        let rhs = parser.rhs()?;
        let mut merged: BTreeMap<Word, i64> = BTreeMap::new();
        for (v, c) in terms {
            *merged.entry(resolve(&v)?).or_insert(0) += c;
        }
        let terms = merged.into_iter().filter(|t| t.1 != 0).collect();
        constraints.push(LinearConstraint { label, terms, sense, rhs });
    }
    Ok(IlpModel::new(n, constraints, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{build_model, FamilyId};

    #[test]
    fn row_rendering() {
        let m = build_model(5, &[FamilyId::C1, FamilyId::C3, FamilyId::C4], &[]).unwrap();
        let text = write_lp_string(&m);
        let flat = text.replace("\n   ", " ");
        let c1 = flat.lines().find(|l| l.starts_with(" c1:")).unwrap();
        assert!(c1.starts_with(" c1: x_00000 + x_00001 + x_00010 + "));
        assert!(c1.ends_with(" + x_11111 >= 6"));
        assert!(flat.lines().any(|l| l == " c3_zero: x_00000 = 1"));
        assert!(flat.lines().any(|l| l == " c3_one: x_11111 = 1"));
        let c4 = flat.lines().find(|l| l.starts_with(" c4:")).unwrap();
        assert!(c4.contains(" - x_11111"));
        assert!(text.starts_with("\\ single-deletion code model"));
        assert!(text.contains("\nMaximize\n obj: x_00000 + "));
        assert!(text.contains("\nSubject To\n c0_y0000: "));
        assert!(text.ends_with("x_11111\nEnd\n"));
    }

    #[test]
    fn weighted_rows() {
        let m = build_model(4, &[FamilyId::C5], &[]).unwrap();
        let text = write_lp_string(&m).replace("\n   ", " ");
        let w1 = text.lines().find(|l| l.starts_with(" c5_w1:")).unwrap();
        // weight-2 words carry their 1-run count
        assert!(w1.contains("2 x_0101"), "{w1}");
        assert!(w1.ends_with("<= 3"));
    }

    #[test]
    fn round_trip() {
        let m = build_model(5, &FamilyId::ALL, &[]).unwrap();
        let text = write_lp_string(&m);
        let back = read_lp(text.as_bytes()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn byte_count_and_determinism() {
        let m = build_model(6, &[FamilyId::C0, FamilyId::C5], &[]).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        let len = write_lp(&m, &mut a).unwrap();
        write_lp(&m, &mut b).unwrap();
        assert_eq!(len, a.len());
        assert_eq!(a, b);
    }

    #[test]
    fn reader_errors() {
        assert!(read_lp("Maximize\n obj: x_00 + x_01 + x_10 + x_11\nSubject To\n".as_bytes()).is_err());
        assert!(read_lp("Minimize\n obj: x_0\nEnd\n".as_bytes()).is_err());
        assert!(read_lp("Maximize\n obj: x_00 + x_01\nEnd\n".as_bytes()).is_err());
        let bad_var = "Maximize\n obj: x_0 + x_1\nSubject To\n r: x_0 + y <= 1\nEnd\n";
        assert!(matches!(read_lp(bad_var.as_bytes()), Err(Error::UnknownVariable(_))));
        let ok = "Maximize\n obj: x_0 + x_1\nSubject To\n r: x_0 + x_1 <= 1\n - x_0 >= -1\nEnd\n";
        let m = read_lp(ok.as_bytes()).unwrap();
        assert_eq!(m.n(), 1);
        assert_eq!(m.constraints().len(), 2);
        assert_eq!(m.constraints()[1].label, "r2");
        assert_eq!(m.constraints()[1].rhs, -1);
    }
}
