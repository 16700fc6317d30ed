//! Tokens with source positions.

use std::fmt;

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(usize),
    Sym(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Longest first, so that `-->` wins over `->`.
const SYMBOLS: [&str; 22] = [
    "-->", "->", "=>", "|-", ":=", "/\\", "\\/", "(", ")", "<", ">", ",", ".", ":", "[", "]", "{", "}", "|", "=", "~", ";",
];

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Splits `src` into tokens. `#` starts a comment running to the end of
/// the line.
pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (lno, line) in src.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let at = |tok| Token { tok, line: lno + 1, col };
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && ident_char(chars[i]) {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                match text.parse::<usize>() {
                    Ok(n) => out.push(at(Tok::Num(n))),
                    Err(_) => out.push(at(Tok::Ident(text))),
                }
                continue;
            }
            if ident_char(c) {
                let start = i;
                while i < chars.len() && ident_char(chars[i]) {
                    i += 1;
                }
                out.push(at(Tok::Ident(chars[start..i].iter().collect())));
                continue;
            }
            let rest: String = chars[i..].iter().take(3).collect();
            match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                Some(s) => {
                    out.push(at(Tok::Sym(s)));
                    i += s.chars().count();
                }
                None => {
                    return Err(ParseError::new(lno + 1, col, format!("unexpected character `{c}`")));
                }
            }
        }
    }
    Ok(out)
}
