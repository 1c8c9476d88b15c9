//! The `BasicAction(...)` constructor syntax that models are prompted to write.
//!
//! Only a closed set of shapes is interpreted; nothing is executed.
//!
//! ```text
//! predicate := lambda V: V == 'tok' | lambda V: V != 'tok'
//!            | lambda V: V in [..] | lambda V: V not in [..]
//!            | CLASS | lambda V: CLASS(V) | lambda V: not CLASS(V)
//! mapping   := lambda V: 'segs' | lambda V: '!' | lambda V: 'segs'+V | lambda V: V+'segs'
//! ```

use std::ops::Range;

use crate::phonology::{nfc, FeatureClass, Inventory, Phone, Token};
use crate::rewrite::{Mapping, Predicate, SoundLaw};

use super::{Diagnostic, DiagnosticKind, ParsedLaw, ParsedProgramSet};

const CONSTRUCTOR: &str = "BasicAction";

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Str(String),
    Int(usize),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Colon,
    Assign,
    EqEq,
    NotEq,
    Plus,
    Other(char),
}

#[derive(Debug, Clone)]
struct Lexeme {
    tok: Tok,
    span: Range<usize>,
}

fn decode_escape(chars: &mut std::iter::Peekable<std::str::CharIndices<'_>>) -> Option<char> {
    let (_, c) = chars.next()?;
    let hex = |chars: &mut std::iter::Peekable<std::str::CharIndices<'_>>, n: usize| {
        let mut s = String::new();
        for _ in 0..n {
            s.push(chars.next()?.1);
        }
        u32::from_str_radix(&s, 16).ok().and_then(char::from_u32)
    };
    Some(match c {
        'n' => '\n',
        't' => '\t',
        'r' => '\r',
        '0' => '\0',
        'x' => hex(chars, 2)?,
        'u' => hex(chars, 4)?,
        'U' => hex(chars, 8)?,
        other => other,
    })
}

/// Python-ish lexer. Unknown characters become `Other` so the parser can skip them.
fn lex(text: &str, ignored: &[Range<usize>]) -> (Vec<Lexeme>, Vec<Diagnostic>) {
    let mut out = Vec::new();
    let mut diags = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if let Some(r) = ignored.iter().find(|r| r.contains(&i)) {
            while chars.peek().is_some_and(|&(j, _)| j < r.end) {
                chars.next();
            }
            continue;
        }
        chars.next();
        let single = |tok| Lexeme { tok, span: i..i + c.len_utf8() };
        match c {
            c if c.is_whitespace() => {}
            '#' => {
                while chars.peek().is_some_and(|&(_, d)| d != '\n') {
                    chars.next();
                }
            }
            '\'' | '"' => {
                let mut s = String::new();
                let mut end = None;
                while let Some((j, d)) = chars.next() {
                    if d == c {
                        end = Some(j + 1);
                        break;
                    }
                    if d == '\n' {
                        break;
                    }
                    if d == '\\' {
                        match decode_escape(&mut chars) {
                            Some(e) => s.push(e),
                            None => break,
                        }
                    } else {
                        s.push(d);
                    }
                }
                match end {
                    Some(end) => out.push(Lexeme { tok: Tok::Str(s), span: i..end }),
                    None => {
                        let end = chars.peek().map_or(text.len(), |&(j, _)| j);
                        diags.push(Diagnostic::error(DiagnosticKind::Syntax, i..end, "unterminated string literal"));
                        out.push(Lexeme { tok: Tok::Other(c), span: i..end });
                    }
                }
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::from(c);
                let mut end = i + c.len_utf8();
                while let Some(&(j, d)) = chars.peek() {
                    if !(d.is_alphanumeric() || d == '_') {
                        break;
                    }
                    s.push(d);
                    end = j + d.len_utf8();
                    chars.next();
                }
                out.push(Lexeme { tok: Tok::Ident(s), span: i..end });
            }
            c if c.is_ascii_digit() => {
                let mut s = String::from(c);
                let mut end = i + 1;
                while let Some(&(j, d)) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    s.push(d);
                    end = j + 1;
                    chars.next();
                }
                let tok = s.parse().map(Tok::Int).unwrap_or(Tok::Other(c));
                out.push(Lexeme { tok, span: i..end });
            }
            '=' | '!' if chars.peek().is_some_and(|&(_, d)| d == '=') => {
                chars.next();
                let tok = if c == '=' { Tok::EqEq } else { Tok::NotEq };
                out.push(Lexeme { tok, span: i..i + 2 });
            }
            '(' => out.push(single(Tok::LParen)),
            ')' => out.push(single(Tok::RParen)),
            '[' => out.push(single(Tok::LBrack)),
            ']' => out.push(single(Tok::RBrack)),
            ',' => out.push(single(Tok::Comma)),
            ':' => out.push(single(Tok::Colon)),
            '=' => out.push(single(Tok::Assign)),
            '+' => out.push(single(Tok::Plus)),
            other => out.push(single(Tok::Other(other))),
        }
    }
    (out, diags)
}

/// Line ranges of `class BasicAction` definitions, found by indentation.
fn class_blocks(text: &str) -> Vec<Range<usize>> {
    let mut blocks = Vec::new();
    let mut current: Option<(usize, usize, usize)> = None; // start, indent, end
    let mut pos = 0;
    let indent_of = |l: &str| l.len() - l.trim_start().len();
    for line in text.split_inclusive('\n') {
        let start = pos;
        pos += line.len();
        if let Some((s, ind, _)) = current {
            if line.trim().is_empty() || indent_of(line) > ind {
                current = Some((s, ind, pos));
                continue;
            }
            blocks.push(s..current.unwrap().2);
            current = None;
        }
        let trimmed = line.trim_start();
        if let Some(rest) = trimmed.strip_prefix("class") {
            let rest = rest.trim_start();
            if rest.len() < trimmed.len() - 5 && rest.starts_with(CONSTRUCTOR) {
                let after = &rest[CONSTRUCTOR.len()..];
                if !after.starts_with(|c: char| c.is_alphanumeric() || c == '_') {
                    current = Some((start, indent_of(line), pos));
                }
            }
        }
    }
    if let Some((s, _, e)) = current {
        blocks.push(s..e);
    }
    blocks
}

struct Cursor<'a> {
    toks: &'a [Lexeme],
    i: usize,
    end_span: Range<usize>,
}

type PResult<T> = Result<T, Diagnostic>;

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.i).map(|l| &l.tok)
    }

    fn span(&self) -> Range<usize> {
        self.toks.get(self.i).map_or(self.end_span.clone(), |l| l.span.clone())
    }

    fn prev_end(&self) -> usize {
        if self.i == 0 {
            self.end_span.start
        } else {
            self.toks[self.i - 1].span.end
        }
    }

    fn bump(&mut self) -> Option<&'a Lexeme> {
        let l = self.toks.get(self.i);
        self.i += 1;
        l
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> PResult<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected {what}")))
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::error(DiagnosticKind::Syntax, self.span(), msg)
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.i += 1;
                Ok(s.clone())
            }
            _ => Err(self.syntax("expected an identifier")),
        }
    }

    fn string(&mut self) -> PResult<(String, Range<usize>)> {
        let span = self.span();
        match self.peek() {
            Some(Tok::Str(s)) => {
                self.i += 1;
                Ok((s.clone(), span))
            }
            _ => Err(self.syntax("expected a string literal")),
        }
    }

    fn at_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == name)
    }

    fn done(&self) -> bool {
        self.i >= self.toks.len()
    }

    /// Comma-separated items in `[ ... ]`, trailing comma allowed.
    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.expect(&Tok::LBrack, "`[`")?;
        let mut out = Vec::new();
        loop {
            if self.eat(&Tok::RBrack) {
                return Ok(out);
            }
            out.push(item(self)?);
            if !self.eat(&Tok::Comma) {
                self.expect(&Tok::RBrack, "`,` or `]`")?;
                return Ok(out);
            }
        }
    }
}

/// Index of the bracket closing the one at `open`.
fn matching_close(toks: &[Lexeme], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (k, l) in toks.iter().enumerate().skip(open) {
        match l.tok {
            Tok::LParen | Tok::LBrack => depth += 1,
            Tok::RParen | Tok::RBrack => {
                depth -= 1;
                if depth == 0 {
                    return Some(k);
                }
            }
            _ => {}
        }
    }
    None
}

fn unresolvable(span: Range<usize>, sym: &str) -> Diagnostic {
    Diagnostic::error(DiagnosticKind::UnresolvableSymbol, span, format!("`{sym}` is not a known segment"))
}

fn resolve_token(raw: &str, span: Range<usize>, inv: &Inventory) -> PResult<Token> {
    let s = nfc(raw.trim());
    match s.as_str() {
        "#" => Ok(Token::Boundary),
        "@" => Ok(Token::Separator),
        _ => inv.phone(&s).map(Token::Phone).ok_or_else(|| unresolvable(span, &s)),
    }
}

fn resolve_segments(raw: &str, span: Range<usize>, inv: &Inventory) -> PResult<Vec<Phone>> {
    inv.segment_spaced(raw).map(|w| w.into_phones()).map_err(|_| unresolvable(span, raw))
}

fn class_named(name: &str) -> Option<FeatureClass> {
    FeatureClass::from_name(name).ok()
}

/// `lambda V :` prefix; returns the bound variable name.
fn lambda_head(c: &mut Cursor<'_>) -> PResult<String> {
    if !c.at_ident("lambda") {
        return Err(c.syntax("expected `lambda` or a feature-class name"));
    }
    c.bump();
    let var = c.ident()?;
    c.expect(&Tok::Colon, "`:` after lambda parameter")?;
    Ok(var)
}

fn expect_var(c: &mut Cursor<'_>, var: &str) -> PResult<()> {
    if c.at_ident(var) {
        c.bump();
        Ok(())
    } else {
        Err(c.syntax(format!("expected the lambda variable `{var}`")))
    }
}

fn unsupported(span: Range<usize>, what: &str) -> Diagnostic {
    Diagnostic::error(DiagnosticKind::UnsupportedConstruct, span, format!("unsupported {what} form"))
}

fn parse_predicate(c: &mut Cursor<'_>, inv: &Inventory) -> PResult<Predicate> {
    let start = c.span().start;
    if let Some(Tok::Ident(name)) = c.peek() {
        if let Some(cls) = class_named(name) {
            c.bump();
            return Ok(Predicate::FeatureClass(cls));
        }
        if name != "lambda" {
            return Err(Diagnostic::error(
                DiagnosticKind::UnsupportedConstruct,
                c.span(),
                format!("`{name}` is not a feature class"),
            ));
        }
    }
    let var = lambda_head(c)?;
    let body = |c: &mut Cursor<'_>| -> PResult<Predicate> {
        let negated = if c.at_ident("not") {
            c.bump();
            true
        } else {
            false
        };
        if let Some(Tok::Ident(name)) = c.peek() {
            if *name != var {
                let Some(cls) = class_named(name) else {
                    return Err(Diagnostic::error(
                        DiagnosticKind::UnsupportedConstruct,
                        c.span(),
                        format!("`{name}` is not a feature class"),
                    ));
                };
                c.bump();
                c.expect(&Tok::LParen, "`(`")?;
                expect_var(c, &var)?;
                c.expect(&Tok::RParen, "`)`")?;
                return Ok(if negated { Predicate::NegatedFeatureClass(cls) } else { Predicate::FeatureClass(cls) });
            }
        }
        if negated {
            return Err(unsupported(start..c.prev_end(), "negated predicate"));
        }
        expect_var(c, &var)?;
        match c.peek() {
            Some(Tok::EqEq) | Some(Tok::NotEq) => {
                let eq = c.peek() == Some(&Tok::EqEq);
                c.bump();
                let (s, span) = c.string()?;
                let t = resolve_token(&s, span, inv)?;
                Ok(if eq { Predicate::IsToken(t) } else { Predicate::IsNotToken(t) })
            }
            Some(Tok::Ident(kw)) if kw == "in" || kw == "not" => {
                let negated = kw == "not";
                c.bump();
                if negated {
                    if !c.at_ident("in") {
                        return Err(c.syntax("expected `in`"));
                    }
                    c.bump();
                }
                let items = c.list(|c| {
                    let (s, span) = c.string()?;
                    resolve_token(&s, span, inv)
                })?;
                Ok(if negated { Predicate::NotInSet(items) } else { Predicate::InSet(items) })
            }
            _ => Err(c.syntax("expected `==`, `!=`, `in` or `not in`")),
        }
    };
    let p = body(c)?;
    match c.peek() {
        Some(Tok::Comma) | Some(Tok::RBrack) | None => Ok(p),
        _ => Err(unsupported(start..c.span().end, "predicate")),
    }
}

fn parse_mapping(c: &mut Cursor<'_>, inv: &Inventory) -> PResult<Mapping> {
    let start = c.span().start;
    let var = lambda_head(c)?;
    let m = if c.at_ident(&var) {
        c.bump();
        c.expect(&Tok::Plus, "`+` after the lambda variable")?;
        let (s, span) = c.string()?;
        Mapping::InsertAfter(nonempty_segments(&s, span, inv)?)
    } else {
        let (s, span) = c.string()?;
        if c.eat(&Tok::Plus) {
            expect_var(c, &var)?;
            Mapping::InsertBefore(nonempty_segments(&s, span, inv)?)
        } else if matches!(s.trim(), "!" | "") {
            Mapping::Delete
        } else {
            Mapping::ReplaceWith(resolve_segments(&s, span, inv)?)
        }
    };
    match c.peek() {
        Some(Tok::Comma) | Some(Tok::RBrack) | None => Ok(m),
        _ => Err(unsupported(start..c.span().end, "mapping")),
    }
}

fn nonempty_segments(s: &str, span: Range<usize>, inv: &Inventory) -> PResult<Vec<Phone>> {
    if s.trim().is_empty() || s.trim() == "!" {
        return Err(Diagnostic::error(DiagnosticKind::UnsupportedConstruct, span, "insertion of nothing"));
    }
    resolve_segments(s, span, inv)
}

/// Moves edits that sit on slots no phone can fill (`@`, `#`, `is_nothing`)
/// onto the neighbouring phone slot: an insertion into the gap after slot
/// `p-1` is `InsertAfter` there, or `InsertBefore` on slot `p+1`.
fn normalize_edits(
    predicates: &[Predicate],
    change_pos: Vec<usize>,
    mappings: Vec<Mapping>,
    span: Range<usize>,
) -> PResult<(Vec<usize>, Vec<Mapping>)> {
    let mut edits: Vec<(usize, Mapping)> = Vec::with_capacity(change_pos.len());
    for (pos, m) in change_pos.into_iter().zip(mappings) {
        let Some(pred) = predicates.get(pos) else {
            edits.push((pos, m));
            continue;
        };
        if pred.can_match_phone() {
            edits.push((pos, m));
            continue;
        }
        if matches!(m, Mapping::Delete) {
            return Err(Diagnostic::error(
                DiagnosticKind::InvalidLaw,
                span,
                format!("change position {pos} can never hold a phone, so nothing can be deleted there"),
            ));
        }
        let phones = m.phones().to_vec();
        let moved = if pos > 0 && predicates[pos - 1].can_match_phone() {
            (pos - 1, Mapping::InsertAfter(phones))
        } else if predicates.get(pos + 1).is_some_and(Predicate::can_match_phone) {
            (pos + 1, Mapping::InsertBefore(phones))
        } else {
            return Err(Diagnostic::error(
                DiagnosticKind::InvalidLaw,
                span,
                format!("change position {pos} has no neighbouring phone slot to attach the insertion to"),
            ));
        };
        edits.push(moved);
    }
    edits.sort_by_key(|e| e.0);
    if let Some(w) = edits.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Diagnostic::error(
            DiagnosticKind::ConflictingEdits,
            span,
            format!("two edits land on position {}", w[0].0),
        ));
    }
    Ok(edits.into_iter().unzip())
}

fn parse_call(c: &mut Cursor<'_>, inv: &Inventory, call_span: Range<usize>) -> PResult<SoundLaw> {
    let mut predicates = None;
    let mut change_pos = None;
    let mut mappings = None;
    while !c.done() {
        let kw_span = c.span();
        let kw = c.ident().map_err(|_| {
            Diagnostic::error(DiagnosticKind::UnsupportedConstruct, kw_span.clone(), "positional arguments are not supported")
        })?;
        c.eat(&Tok::Assign);
        match kw.as_str() {
            "predicates" if predicates.is_none() => predicates = Some(c.list(|c| parse_predicate(c, inv))?),
            "change_pos" if change_pos.is_none() => {
                change_pos = Some(c.list(|c| match c.peek() {
                    Some(Tok::Int(n)) => {
                        let n = *n;
                        c.bump();
                        Ok(n)
                    }
                    _ => Err(c.syntax("expected an integer position")),
                })?)
            }
            "mapping_fn" if mappings.is_none() => mappings = Some(c.list(|c| parse_mapping(c, inv))?),
            "predicates" | "change_pos" | "mapping_fn" => {
                return Err(Diagnostic::error(DiagnosticKind::Syntax, kw_span, format!("`{kw}` given twice")))
            }
            other => {
                return Err(Diagnostic::error(
                    DiagnosticKind::UnsupportedConstruct,
                    kw_span,
                    format!("unknown argument `{other}`"),
                ))
            }
        }
        if !c.eat(&Tok::Comma) && !c.done() {
            return Err(c.syntax("expected `,` between arguments"));
        }
    }
    let missing = |name: &str| Diagnostic::error(DiagnosticKind::Syntax, call_span.clone(), format!("missing `{name}`"));
    let predicates = predicates.ok_or_else(|| missing("predicates"))?;
    let change_pos = change_pos.ok_or_else(|| missing("change_pos"))?;
    let mappings = mappings.ok_or_else(|| missing("mapping_fn"))?;
    let (change_pos, mappings) = if change_pos.len() == mappings.len() {
        normalize_edits(&predicates, change_pos, mappings, call_span.clone())?
    } else {
        (change_pos, mappings)
    };
    SoundLaw::new(predicates, change_pos, mappings)
        .map_err(|e| Diagnostic::error(DiagnosticKind::InvalidLaw, call_span, e.to_string()))
}

/// Parses every `BasicAction(...)` in `code`. Never fails; problems become diagnostics.
pub fn parse_program_text(code: &str, inv: &Inventory) -> ParsedProgramSet {
    let mut out = ParsedProgramSet::default();
    let ignored = class_blocks(code);
    for r in &ignored {
        out.diagnostics.push(Diagnostic::warning(
            DiagnosticKind::RedefinitionIgnored,
            r.clone(),
            "class definition ignored; the built-in interpreter is used",
        ));
    }
    let (toks, lex_diags) = lex(code, &ignored);
    out.diagnostics.extend(lex_diags);
    let end_span = code.len()..code.len();
    // whether the most recent law may still take a `nonce_inputs` list
    let mut inputs_target = false;
    let mut i = 0;
    while i < toks.len() {
        match &toks[i].tok {
            Tok::Ident(name) if name == CONSTRUCTOR && matches!(toks.get(i + 1).map(|l| &l.tok), Some(Tok::LParen)) => {
                let open = i + 1;
                let Some(close) = matching_close(&toks, open) else {
                    out.diagnostics.push(Diagnostic::error(
                        DiagnosticKind::Syntax,
                        toks[i].span.start..code.len(),
                        "unclosed constructor call",
                    ));
                    break;
                };
                let span = toks[i].span.start..toks[close].span.end;
                let mut c = Cursor { toks: &toks[open + 1..close], i: 0, end_span: toks[close].span.clone() };
                match parse_call(&mut c, inv, span.clone()) {
                    Ok(law) => {
                        out.laws.push(ParsedLaw { law, span, inputs: None });
                        inputs_target = true;
                    }
                    Err(d) => {
                        out.diagnostics.push(d);
                        inputs_target = false;
                    }
                }
                i = close + 1;
            }
            Tok::Ident(name) if name == "nonce_inputs" && matches!(toks.get(i + 1).map(|l| &l.tok), Some(Tok::Assign)) => {
                let start = toks[i].span.clone();
                let mut c = Cursor { toks: &toks[i + 2..], i: 0, end_span: end_span.clone() };
                let parsed = c.list(|c| c.string().map(|(s, _)| nfc(&s)));
                let consumed = c.i;
                match parsed {
                    Ok(words) if inputs_target => {
                        let last = out.laws.last_mut().expect("inputs_target implies a law");
                        last.inputs = Some(words);
                        inputs_target = false;
                    }
                    Ok(_) => out.diagnostics.push(Diagnostic::warning(
                        DiagnosticKind::OrphanInputs,
                        start,
                        "`nonce_inputs` does not follow a constructor",
                    )),
                    Err(d) => out.diagnostics.push(d),
                }
                i += 2 + consumed.max(1);
            }
            _ => i += 1,
        }
    }
    out
}

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::from("'");
    for c in s.chars() {
        match c {
            '\'' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            _ => out.push(c),
        }
    }
    out.push('\'');
    out
}

pub(crate) fn print_segments(phones: &[Phone], inv: &Inventory) -> String {
    let joined: String = phones.iter().map(Phone::as_str).collect();
    let resegments = inv.segment(&joined).is_ok_and(|w| w.phones() == phones);
    if resegments {
        joined
    } else {
        phones.iter().map(Phone::as_str).collect::<Vec<_>>().join(" ")
    }
}

/// Prints a law in constructor syntax. `parse_program_text` reads it back unchanged.
pub fn print_constructor(law: &SoundLaw, inv: &Inventory) -> String {
    let list = |ts: &[Token]| ts.iter().map(|t| quote(t.symbol())).collect::<Vec<_>>().join(", ");
    let preds: Vec<String> = law
        .predicates()
        .iter()
        .map(|p| match p {
            Predicate::IsToken(t) => format!("lambda x: x == {}", quote(t.symbol())),
            Predicate::IsNotToken(t) => format!("lambda x: x != {}", quote(t.symbol())),
            Predicate::InSet(ts) => format!("lambda x: x in [{}]", list(ts)),
            Predicate::NotInSet(ts) => format!("lambda x: x not in [{}]", list(ts)),
            Predicate::FeatureClass(c) => c.name().to_string(),
            Predicate::NegatedFeatureClass(c) => format!("lambda x: not {}(x)", c.name()),
        })
        .collect();
    let pos: Vec<String> = law.change_pos().iter().map(usize::to_string).collect();
    let maps: Vec<String> = law
        .mappings()
        .iter()
        .map(|m| match m {
            Mapping::Delete => "lambda x: '!'".to_string(),
            Mapping::ReplaceWith(p) => format!("lambda x: {}", quote(&print_segments(p, inv))),
            Mapping::InsertBefore(p) => format!("lambda x: {}+x", quote(&print_segments(p, inv))),
            Mapping::InsertAfter(p) => format!("lambda x: x+{}", quote(&print_segments(p, inv))),
        })
        .collect();
    format!(
        "action = BasicAction(predicates=[{}], change_pos=[{}], mapping_fn=[{}])",
        preds.join(", "),
        pos.join(", "),
        maps.join(", ")
    )
}
