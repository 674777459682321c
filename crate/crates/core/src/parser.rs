//! Concrete syntax: lexer, parser, well-formedness checks, and the pretty-printer.
//!
//! Grammar, with `.` binding tightest, then `+`, then `|`, both right-associative,
//! and restriction scoping as far right as possible:
//!
//! ```text
//! P   ::= "0" | "(" name ")" P | "[" P "]" "^" ident | cap "." P
//!       | P "|" P | P "+" P | "rec" X "." P | X | "(" P ")"
//! cap ::= "enter" n | "accept" n | "exit" n | "expel" n | "merge+" n | "merge-" n
//!       | n "!" dir "{" n "}" | n "?" dir "{" n "}"
//! dir ::= ε | "v" | "^" | "#"
//! ```
//!
//! `//` starts a line comment. Identifiers are `[A-Za-z][A-Za-z0-9_]*`; the words
//! `enter accept exit expel merge rec` are reserved. `merge+`/`merge-` are single
//! tokens (no space before the sign). Channel names and process identifiers live in
//! separate namespaces, so `rec x. enter x. x` is self-consistent if confusing.

use crate::ast::{
    AmbientId, Capability, Direction, IdGen, Name, NameSite, ProcVar, Process,
};
use std::collections::BTreeSet;
use std::fmt;

/// Byte range of a construct plus the line/column (1-based) of its start.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

impl Span {
    fn to(self, other: Span) -> Span {
        Span { start: self.start, end: other.end.max(self.end), ..self }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// What went wrong, at the granularity callers branch on.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ParseErrorKind {
    Lex,
    Syntax,
    UnboundProcessVariable,
    UnguardedChoice,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParseErrorKind::Lex => "lex",
            ParseErrorKind::Syntax => "syntax",
            ParseErrorKind::UnboundProcessVariable => "unbound process variable",
            ParseErrorKind::UnguardedChoice => "unguarded choice",
        };
        f.write_str(s)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
#[error("{kind} error at {span}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: Span,
    pub message: String,
}

impl ParseError {
    fn new(kind: ParseErrorKind, span: Span, message: impl Into<String>) -> Self {
        ParseError { kind, span, message: message.into() }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Ident(String),
    Zero,
    Rec,
    Enter,
    Accept,
    Exit,
    Expel,
    MergePlus,
    MergeMinus,
    LPar,
    RPar,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Caret,
    Bang,
    Question,
    Hash,
    Dot,
    Pipe,
    Plus,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Zero => "`0`".into(),
            Tok::Rec => "`rec`".into(),
            Tok::Enter => "`enter`".into(),
            Tok::Accept => "`accept`".into(),
            Tok::Exit => "`exit`".into(),
            Tok::Expel => "`expel`".into(),
            Tok::MergePlus => "`merge+`".into(),
            Tok::MergeMinus => "`merge-`".into(),
            Tok::LPar => "`(`".into(),
            Tok::RPar => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Question => "`?`".into(),
            Tok::Hash => "`#`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Plus => "`+`".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: Span,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut col = 1u32;
    while i < bytes.len() {
        let here = Span { start: i, end: i + 1, line, col };
        let c = bytes[i];
        match c {
            b'\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            b' ' | b'\t' | b'\r' => {
                i += 1;
                col += 1;
            }
            b'/' => {
                if bytes.get(i + 1) == Some(&b'/') {
                    while i < bytes.len() && bytes[i] != b'\n' {
                        i += 1;
                    }
                } else {
                    return Err(ParseError::new(ParseErrorKind::Lex, here, "stray `/`"));
                }
            }
            b'0' => {
                tokens.push(Token { tok: Tok::Zero, span: here });
                i += 1;
                col += 1;
            }
            b'(' | b')' | b'[' | b']' | b'{' | b'}' | b'^' | b'!' | b'?' | b'#' | b'.' | b'|'
            | b'+' => {
                let tok = match c {
                    b'(' => Tok::LPar,
                    b')' => Tok::RPar,
                    b'[' => Tok::LBracket,
                    b']' => Tok::RBracket,
                    b'{' => Tok::LBrace,
                    b'}' => Tok::RBrace,
                    b'^' => Tok::Caret,
                    b'!' => Tok::Bang,
                    b'?' => Tok::Question,
                    b'#' => Tok::Hash,
                    b'.' => Tok::Dot,
                    b'|' => Tok::Pipe,
                    _ => Tok::Plus,
                };
                tokens.push(Token { tok, span: here });
                i += 1;
                col += 1;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                let start_col = col;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                    col += 1;
                }
                let word = &src[start..i];
                let mut span = Span { start, end: i, line, col: start_col };
                let tok = match word {
                    "rec" => Tok::Rec,
                    "enter" => Tok::Enter,
                    "accept" => Tok::Accept,
                    "exit" => Tok::Exit,
                    "expel" => Tok::Expel,
                    "merge" => {
                        let sign = bytes.get(i).copied();
                        match sign {
                            Some(b'+') | Some(b'-') => {
                                i += 1;
                                col += 1;
                                span.end = i;
                                if sign == Some(b'+') {
                                    Tok::MergePlus
                                } else {
                                    Tok::MergeMinus
                                }
                            }
                            _ => {
                                return Err(ParseError::new(
                                    ParseErrorKind::Lex,
                                    span,
                                    "expected `+` or `-` directly after `merge`",
                                ));
                            }
                        }
                    }
                    _ => Tok::Ident(word.to_string()),
                };
                tokens.push(Token { tok, span });
            }
            _ => {
                let ch = src[i..].chars().next().unwrap();
                return Err(ParseError::new(
                    ParseErrorKind::Lex,
                    here,
                    format!("unexpected character `{ch}`"),
                ));
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof: Span,
    ids: IdGen,
    names: Vec<(String, NameSite)>,
    procs: Vec<(String, NameSite)>,
}

impl Parser {
    fn peek(&self, ahead: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + ahead).map(|t| &t.tok)
    }

    fn span_at(&self, ahead: usize) -> Span {
        self.tokens.get(self.pos + ahead).map(|t| t.span).unwrap_or(self.eof)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn syntax_err(&self, ahead: usize, expected: &str) -> ParseError {
        let found = match self.peek(ahead) {
            Some(t) => t.describe(),
            None => "end of input".into(),
        };
        ParseError::new(
            ParseErrorKind::Syntax,
            self.span_at(ahead),
            format!("expected {expected}, found {found}"),
        )
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<Span, ParseError> {
        match self.peek(0) {
            Some(t) if *t == tok => Ok(self.bump().unwrap().span),
            _ => Err(self.syntax_err(0, expected)),
        }
    }

    fn expect_ident(&mut self, expected: &str) -> Result<(String, Span), ParseError> {
        match self.peek(0) {
            Some(Tok::Ident(_)) => {
                let t = self.bump().unwrap();
                let Tok::Ident(s) = t.tok else { unreachable!() };
                Ok((s, t.span))
            }
            _ => Err(self.syntax_err(0, expected)),
        }
    }

    fn resolve_name(&self, text: String) -> Name {
        for (t, site) in self.names.iter().rev() {
            if *t == text {
                return Name { text, site: *site };
            }
        }
        Name { text, site: NameSite::Free }
    }

    /// A token that can start a process. Used to tell `(n) P` from a grouped `(X)`.
    fn starts_process(tok: Option<&Tok>) -> bool {
        matches!(
            tok,
            Some(
                Tok::Zero
                    | Tok::LPar
                    | Tok::LBracket
                    | Tok::Ident(_)
                    | Tok::Rec
                    | Tok::Enter
                    | Tok::Accept
                    | Tok::Exit
                    | Tok::Expel
                    | Tok::MergePlus
                    | Tok::MergeMinus
            )
        )
    }

    /// Lowest level: a chain of restrictions scoping to the end of the enclosing
    /// group, then a parallel composition.
    fn parse_process(&mut self) -> Result<(Process, Span), ParseError> {
        if matches!(self.peek(0), Some(Tok::LPar))
            && matches!(self.peek(1), Some(Tok::Ident(_)))
            && matches!(self.peek(2), Some(Tok::RPar))
            && Self::starts_process(self.peek(3))
        {
            let open = self.bump().unwrap().span;
            let (text, _) = self.expect_ident("a name")?;
            self.expect(Tok::RPar, "`)`")?;
            let site = NameSite::Bound(self.ids.name_binder());
            self.names.push((text.clone(), site));
            let (body, body_span) = self.parse_process()?;
            self.names.pop();
            let n = Name { text, site };
            return Ok((Process::restriction(n, body), open.to(body_span)));
        }
        self.parse_parallel()
    }

    fn parse_parallel(&mut self) -> Result<(Process, Span), ParseError> {
        let (left, lspan) = self.parse_choice()?;
        if matches!(self.peek(0), Some(Tok::Pipe)) {
            self.bump();
            // The right arm re-enters the full process level, so a restriction after
            // `|` scopes over everything to its right.
            let (right, rspan) = self.parse_process()?;
            Ok((Process::parallel(left, right), lspan.to(rspan)))
        } else {
            Ok((left, lspan))
        }
    }

    fn parse_choice(&mut self) -> Result<(Process, Span), ParseError> {
        let (left, lspan) = self.parse_prefixed()?;
        if matches!(self.peek(0), Some(Tok::Plus)) {
            self.bump();
            let (right, rspan) = self.parse_choice()?;
            for (branch, span) in [(&left, lspan), (&right, rspan)] {
                if !matches!(branch, Process::Prefix(..) | Process::Choice(..)) {
                    return Err(ParseError::new(
                        ParseErrorKind::UnguardedChoice,
                        span,
                        "choice branches must be capability-prefixed",
                    ));
                }
            }
            Ok((Process::choice(left, right), lspan.to(rspan)))
        } else {
            Ok((left, lspan))
        }
    }

    fn parse_direction(&mut self) -> Direction {
        match self.peek(0) {
            Some(Tok::Caret) => {
                self.bump();
                Direction::Up
            }
            Some(Tok::Hash) => {
                self.bump();
                Direction::Sibling
            }
            Some(Tok::Ident(v)) if v == "v" => {
                self.bump();
                Direction::Down
            }
            _ => Direction::Local,
        }
    }

    fn parse_prefixed(&mut self) -> Result<(Process, Span), ParseError> {
        let movement = |tok: &Tok| -> Option<fn(Name) -> Capability> {
            match tok {
                Tok::Enter => Some(Capability::Enter),
                Tok::Accept => Some(Capability::Accept),
                Tok::Exit => Some(Capability::Exit),
                Tok::Expel => Some(Capability::Expel),
                Tok::MergePlus => Some(Capability::MergePlus),
                Tok::MergeMinus => Some(Capability::MergeMinus),
                _ => None,
            }
        };
        match self.peek(0) {
            Some(tok) if movement(tok).is_some() => {
                let make = movement(tok).unwrap();
                let start = self.bump().unwrap().span;
                let (text, _) = self.expect_ident("a name")?;
                let name = self.resolve_name(text);
                self.expect(Tok::Dot, "`.` after capability")?;
                let (cont, cspan) = self.parse_prefixed()?;
                Ok((Process::prefix(make(name), cont), start.to(cspan)))
            }
            Some(Tok::Rec) => {
                let start = self.bump().unwrap().span;
                let (text, _) = self.expect_ident("a process identifier")?;
                self.expect(Tok::Dot, "`.` after `rec` binder")?;
                let site = NameSite::Bound(self.ids.proc_binder());
                self.procs.push((text.clone(), site));
                let (body, bspan) = self.parse_prefixed()?;
                self.procs.pop();
                Ok((Process::rec(ProcVar { text, site }, body), start.to(bspan)))
            }
            Some(Tok::Ident(_))
                if matches!(self.peek(1), Some(Tok::Bang | Tok::Question)) =>
            {
                let (text, start) = self.expect_ident("a name")?;
                let channel = self.resolve_name(text);
                let is_output = matches!(self.peek(0), Some(Tok::Bang));
                self.bump();
                let dir = self.parse_direction();
                self.expect(Tok::LBrace, "`{`")?;
                let (arg_text, _) = self.expect_ident("a name")?;
                self.expect(Tok::RBrace, "`}`")?;
                self.expect(Tok::Dot, "`.` after capability")?;
                if is_output {
                    let payload = self.resolve_name(arg_text);
                    let (cont, cspan) = self.parse_prefixed()?;
                    let cap = Capability::Output { dir, channel, payload };
                    Ok((Process::prefix(cap, cont), start.to(cspan)))
                } else {
                    let site = NameSite::Bound(self.ids.name_binder());
                    self.names.push((arg_text.clone(), site));
                    let (cont, cspan) = self.parse_prefixed()?;
                    self.names.pop();
                    let binder = Name { text: arg_text, site };
                    let cap = Capability::Input { dir, channel, binder };
                    Ok((Process::prefix(cap, cont), start.to(cspan)))
                }
            }
            _ => self.parse_atom(),
        }
    }

    fn parse_atom(&mut self) -> Result<(Process, Span), ParseError> {
        match self.peek(0) {
            Some(Tok::Zero) => {
                let span = self.bump().unwrap().span;
                Ok((Process::Zero, span))
            }
            Some(Tok::LBracket) => {
                let open = self.bump().unwrap().span;
                let (body, _) = self.parse_process()?;
                self.expect(Tok::RBracket, "`]`")?;
                self.expect(Tok::Caret, "`^` after `]`")?;
                let (label, lspan) = self.expect_ident("an ambient label")?;
                Ok((Process::ambient(AmbientId::label(label), body), open.to(lspan)))
            }
            Some(Tok::Ident(_)) => {
                let (text, span) = self.expect_ident("a process identifier")?;
                for (t, site) in self.procs.iter().rev() {
                    if *t == text {
                        return Ok((Process::Var(ProcVar { text, site: *site }), span));
                    }
                }
                Err(ParseError::new(
                    ParseErrorKind::UnboundProcessVariable,
                    span,
                    format!("process identifier `{text}` is not bound by any `rec`"),
                ))
            }
            Some(Tok::LPar) => {
                let open = self.bump().unwrap().span;
                let (body, _) = self.parse_process()?;
                let close = self.expect(Tok::RPar, "`)`")?;
                Ok((body, open.to(close)))
            }
            _ => Err(self.syntax_err(0, "a process")),
        }
    }
}

/// Parse one process term. Binder sites are allocated in source order, so two
/// alpha-variant inputs resolve to identical canonical names.
pub fn parse(src: &str) -> Result<Process, ParseError> {
    let tokens = lex(src)?;
    // "Unexpected end of input" points at the last thing actually seen.
    let eof = tokens
        .last()
        .map(|t| t.span)
        .unwrap_or(Span { start: 0, end: 0, line: 1, col: 1 });
    let mut parser = Parser { tokens, pos: 0, eof, ids: IdGen::new(), names: Vec::new(), procs: Vec::new() };
    let (term, _) = parser.parse_process()?;
    if parser.pos < parser.tokens.len() {
        return Err(parser.syntax_err(0, "end of input"));
    }
    Ok(term)
}

/// Why a hand-built term is not a valid process.
#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum WellFormednessError {
    #[error("process identifier `{0}` is not bound by any enclosing `rec`")]
    UnboundProcessVariable(String),
    #[error("choice branch `{0}` is not capability-prefixed")]
    UnguardedChoice(String),
    #[error("name `{0}` claims a binder site with no enclosing binder")]
    DanglingName(String),
}

/// Check the invariants `parse` guarantees by construction: every process
/// identifier and every bound name occurrence has an enclosing binder, and all
/// choice branches are guarded.
pub fn check_well_formed(p: &Process) -> Result<(), WellFormednessError> {
    fn check(
        p: &Process,
        names: &mut Vec<NameSite>,
        procs: &mut Vec<NameSite>,
    ) -> Result<(), WellFormednessError> {
        let occ = |n: &Name, names: &Vec<NameSite>| {
            if matches!(n.site, NameSite::Bound(_)) && !names.contains(&n.site) {
                Err(WellFormednessError::DanglingName(n.text.clone()))
            } else {
                Ok(())
            }
        };
        match p {
            Process::Zero => Ok(()),
            Process::Var(v) => match v.site {
                NameSite::Free => Err(WellFormednessError::UnboundProcessVariable(v.text.clone())),
                NameSite::Bound(_) if !procs.contains(&v.site) => {
                    Err(WellFormednessError::UnboundProcessVariable(v.text.clone()))
                }
                _ => Ok(()),
            },
            Process::Restriction(n, body) => {
                names.push(n.site);
                check(body, names, procs)?;
                names.pop();
                Ok(())
            }
            Process::Ambient(_, body) => check(body, names, procs),
            Process::Rec(v, body) => {
                procs.push(v.site);
                check(body, names, procs)?;
                procs.pop();
                Ok(())
            }
            Process::Prefix(cap, cont) => {
                match cap {
                    Capability::Enter(n)
                    | Capability::Accept(n)
                    | Capability::Exit(n)
                    | Capability::Expel(n)
                    | Capability::MergePlus(n)
                    | Capability::MergeMinus(n) => occ(n, names)?,
                    Capability::Output { channel, payload, .. } => {
                        occ(channel, names)?;
                        occ(payload, names)?;
                    }
                    Capability::Input { channel, binder, .. } => {
                        occ(channel, names)?;
                        names.push(binder.site);
                        check(cont, names, procs)?;
                        names.pop();
                        return Ok(());
                    }
                }
                check(cont, names, procs)
            }
            Process::Parallel(l, r) => {
                check(l, names, procs)?;
                check(r, names, procs)
            }
            Process::Choice(l, r) => {
                for branch in [&**l, &**r] {
                    if !matches!(branch, Process::Prefix(..) | Process::Choice(..)) {
                        return Err(WellFormednessError::UnguardedChoice(pretty(branch)));
                    }
                }
                check(l, names, procs)?;
                check(r, names, procs)
            }
        }
    }
    check(p, &mut Vec::new(), &mut Vec::new())
}

// ---------------------------------------------------------------------------
// Pretty-printing
// ---------------------------------------------------------------------------

/// Precedence rank of a term's head, mirroring the grammar levels.
fn head_prec(p: &Process) -> u8 {
    match p {
        Process::Restriction(..) => 0,
        Process::Parallel(..) => 1,
        Process::Choice(..) => 2,
        Process::Prefix(..) | Process::Rec(..) => 3,
        Process::Zero | Process::Var(_) | Process::Ambient(..) => 4,
    }
}

struct Printer {
    used_names: BTreeSet<String>,
    used_procs: BTreeSet<String>,
    name_scope: Vec<(NameSite, String)>,
    proc_scope: Vec<(NameSite, String)>,
}

impl Printer {
    fn new(p: &Process) -> Self {
        // Reserve every spelling that must print as itself: free occurrences in
        // either namespace (including dangling bound ones).
        let mut used_names = BTreeSet::new();
        for n in crate::ast::free_names(p) {
            used_names.insert(n.text);
        }
        let mut used_procs = BTreeSet::new();
        fn free_proc_texts(p: &Process, bound: &mut Vec<NameSite>, out: &mut BTreeSet<String>) {
            match p {
                Process::Var(v) => {
                    if !bound.contains(&v.site) {
                        out.insert(v.text.clone());
                    }
                }
                Process::Rec(v, body) => {
                    bound.push(v.site);
                    free_proc_texts(body, bound, out);
                    bound.pop();
                }
                Process::Restriction(_, b) | Process::Ambient(_, b) | Process::Prefix(_, b) => {
                    free_proc_texts(b, bound, out)
                }
                Process::Parallel(l, r) | Process::Choice(l, r) => {
                    free_proc_texts(l, bound, out);
                    free_proc_texts(r, bound, out);
                }
                Process::Zero => {}
            }
        }
        free_proc_texts(p, &mut Vec::new(), &mut used_procs);
        Printer { used_names, used_procs, name_scope: Vec::new(), proc_scope: Vec::new() }
    }

    fn pick(base: &str, used: &mut BTreeSet<String>) -> String {
        if used.insert(base.to_string()) {
            return base.to_string();
        }
        let mut k = 2u32;
        loop {
            let candidate = format!("{base}{k}");
            if used.insert(candidate.clone()) {
                return candidate;
            }
            k += 1;
        }
    }

    /// Choose the spelling a binder prints under. Spellings are globally unique so
    /// that re-parsing rebinds every occurrence to the intended site.
    fn assign_name(&mut self, n: &Name) -> String {
        Self::pick(&n.text, &mut self.used_names)
    }

    fn assign_proc(&mut self, v: &ProcVar) -> String {
        Self::pick(&v.text, &mut self.used_procs)
    }

    fn name_text(&self, n: &Name) -> String {
        if matches!(n.site, NameSite::Bound(_)) {
            for (site, text) in self.name_scope.iter().rev() {
                if *site == n.site {
                    return text.clone();
                }
            }
        }
        n.text.clone()
    }

    fn proc_text(&self, v: &ProcVar) -> String {
        if matches!(v.site, NameSite::Bound(_)) {
            for (site, text) in self.proc_scope.iter().rev() {
                if *site == v.site {
                    return text.clone();
                }
            }
        }
        v.text.clone()
    }

    fn cap(&mut self, cap: &Capability, out: &mut String) -> Option<(NameSite, String)> {
        match cap {
            Capability::Enter(n) => out.push_str(&format!("enter {}", self.name_text(n))),
            Capability::Accept(n) => out.push_str(&format!("accept {}", self.name_text(n))),
            Capability::Exit(n) => out.push_str(&format!("exit {}", self.name_text(n))),
            Capability::Expel(n) => out.push_str(&format!("expel {}", self.name_text(n))),
            Capability::MergePlus(n) => out.push_str(&format!("merge+ {}", self.name_text(n))),
            Capability::MergeMinus(n) => out.push_str(&format!("merge- {}", self.name_text(n))),
            Capability::Output { dir, channel, payload } => out.push_str(&format!(
                "{}!{}{{{}}}",
                self.name_text(channel),
                dir.mark(),
                self.name_text(payload)
            )),
            Capability::Input { dir, channel, binder } => {
                let chan = self.name_text(channel);
                let text = self.assign_name(binder);
                out.push_str(&format!("{chan}?{}{{{text}}}", dir.mark()));
                return Some((binder.site, text));
            }
        }
        None
    }

    fn pp(&mut self, p: &Process, min_prec: u8, out: &mut String) {
        if head_prec(p) < min_prec {
            out.push('(');
            self.pp(p, 0, out);
            out.push(')');
            return;
        }
        match p {
            Process::Zero => out.push('0'),
            Process::Var(v) => out.push_str(&self.proc_text(v)),
            Process::Restriction(n, body) => {
                let text = self.assign_name(n);
                out.push_str(&format!("({text})"));
                let pushed = matches!(n.site, NameSite::Bound(_));
                if pushed {
                    self.name_scope.push((n.site, text));
                }
                if !matches!(**body, Process::Restriction(..)) {
                    out.push(' ');
                }
                self.pp(body, 0, out);
                if pushed {
                    self.name_scope.pop();
                }
            }
            Process::Ambient(id, body) => {
                out.push('[');
                self.pp(body, 0, out);
                out.push_str(&format!("]^{id}"));
            }
            Process::Prefix(cap, cont) => {
                let binder = self.cap(cap, out);
                out.push_str(". ");
                if let Some((site, text)) = binder {
                    let pushed = matches!(site, NameSite::Bound(_));
                    if pushed {
                        self.name_scope.push((site, text));
                    }
                    self.pp(cont, 3, out);
                    if pushed {
                        self.name_scope.pop();
                    }
                } else {
                    self.pp(cont, 3, out);
                }
            }
            Process::Parallel(l, r) => {
                self.pp(l, 2, out);
                out.push_str(" | ");
                self.pp(r, 0, out);
            }
            Process::Choice(l, r) => {
                self.pp(l, 3, out);
                out.push_str(" + ");
                self.pp(r, 2, out);
            }
            Process::Rec(v, body) => {
                let text = self.assign_proc(v);
                out.push_str(&format!("rec {text}. "));
                let pushed = matches!(v.site, NameSite::Bound(_));
                if pushed {
                    self.proc_scope.push((v.site, text));
                }
                self.pp(body, 3, out);
                if pushed {
                    self.proc_scope.pop();
                }
            }
        }
    }
}

/// Render `p` in the concrete syntax. Binder spellings are freshened so that the
/// output re-parses to an alpha-equal term: `parse(pretty(p))` is alpha-equal to
/// `p` for every well-formed `p`.
pub fn pretty(p: &Process) -> String {
    let mut printer = Printer::new(p);
    let mut out = String::new();
    printer.pp(p, 0, &mut out);
    out
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty(self))
    }
}
