//! Minimal s-expression reader with source positions. Atoms are
//! lowercased, matching the case-insensitive treatment of PDDL symbols.

use super::PddlError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl std::fmt::Display for Pos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug)]
pub enum SexpKind {
    Atom(String),
    List(Vec<Sexp>),
}

#[derive(Clone, Debug)]
pub struct Sexp {
    pub kind: SexpKind,
    pub pos: Pos,
}

impl Sexp {
    pub fn atom(&self) -> Option<&str> {
        match &self.kind {
            SexpKind::Atom(s) => Some(s),
            SexpKind::List(_) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match &self.kind {
            SexpKind::List(items) => Some(items),
            SexpKind::Atom(_) => None,
        }
    }

    pub fn expect_atom(&self, what: &str) -> Result<&str, PddlError> {
        self.atom().ok_or_else(|| PddlError::parse(self.pos, format!("expected {what}, found a list")))
    }

    pub fn expect_list(&self, what: &str) -> Result<&[Sexp], PddlError> {
        self.list()
            .ok_or_else(|| PddlError::parse(self.pos, format!("expected {what}, found an atom")))
    }

    /// First element as an atom, for dispatching on list heads.
    pub fn head(&self) -> Option<&str> {
        self.list().and_then(|items| items.first()).and_then(|s| s.atom())
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.chars().peekable(), line: 1, col: 1 }
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }
}

enum Token {
    Open(Pos),
    Close(Pos),
    Atom(String, Pos),
}

fn is_atom_char(c: char) -> bool {
    !c.is_whitespace() && c != '(' && c != ')' && c != ';'
}

fn tokenize(text: &str) -> Result<Vec<Token>, PddlError> {
    let mut lx = Lexer::new(text);
    let mut tokens = Vec::new();
    while let Some(&c) = lx.chars.peek() {
        if c.is_whitespace() {
            lx.bump();
        } else if c == ';' {
            while let Some(&c) = lx.chars.peek() {
                if c == '\n' {
                    break;
                }
                lx.bump();
            }
        } else if c == '(' {
            let pos = lx.pos();
            lx.bump();
            tokens.push(Token::Open(pos));
        } else if c == ')' {
            let pos = lx.pos();
            lx.bump();
            tokens.push(Token::Close(pos));
        } else {
            let pos = lx.pos();
            let mut atom = String::new();
            while let Some(&c) = lx.chars.peek() {
                if !is_atom_char(c) {
                    break;
                }
                atom.extend(c.to_lowercase());
                lx.bump();
            }
            tokens.push(Token::Atom(atom, pos));
        }
    }
    Ok(tokens)
}

/// Reads all top-level forms in the text.
pub fn parse_forms(text: &str) -> Result<Vec<Sexp>, PddlError> {
    let tokens = tokenize(text)?;
    let mut stack: Vec<(Pos, Vec<Sexp>)> = Vec::new();
    let mut top: Vec<Sexp> = Vec::new();
    for token in tokens {
        match token {
            Token::Open(pos) => stack.push((pos, Vec::new())),
            Token::Close(pos) => {
                let (open_pos, items) = stack
                    .pop()
                    .ok_or_else(|| PddlError::parse(pos, "unmatched closing parenthesis"))?;
                let sexp = Sexp { kind: SexpKind::List(items), pos: open_pos };
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(sexp),
                    None => top.push(sexp),
                }
            }
            Token::Atom(text, pos) => {
                let sexp = Sexp { kind: SexpKind::Atom(text), pos };
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(sexp),
                    None => top.push(sexp),
                }
            }
        }
    }
    if let Some((pos, _)) = stack.pop() {
        return Err(PddlError::parse(pos, "unclosed parenthesis"));
    }
    Ok(top)
}
