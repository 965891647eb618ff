use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Identifier or bare constant: `[A-Za-z0-9_]+`, with inner hyphens.
    Word(String),
    /// `'...'` with `\'` and `\\` escapes.
    Quoted(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Dot,
    Slash,
    Arrow,
    Tilde,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Quoted(q) => format!("'{q}'"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Arrow => "`<-`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Spanned {
    pub(crate) tok: Tok,
    pub(crate) line: usize,
    pub(crate) column: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let single = |tok| Spanned {
            tok,
            line: l,
            column: col,
        };
        match c {
            c if c.is_whitespace() => {
                bump!();
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump!();
                }
            }
            '{' | '}' | '(' | ')' | ',' | ';' | '.' | '/' | '~' => {
                bump!();
                out.push(single(match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    '.' => Tok::Dot,
                    '/' => Tok::Slash,
                    _ => Tok::Tilde,
                }));
            }
            ':' => {
                bump!();
                if chars.peek() == Some(&'-') {
                    bump!();
                    out.push(single(Tok::Arrow));
                } else {
                    out.push(single(Tok::Colon));
                }
            }
            '<' => {
                bump!();
                if bump!() != Some('-') {
                    return Err(Error::parse(l, col, "expected `<-`"));
                }
                out.push(single(Tok::Arrow));
            }
            '\'' => {
                bump!();
                let mut s = String::new();
                loop {
                    match bump!() {
                        None | Some('\n') => return Err(Error::parse(l, col, "unterminated quoted constant")),
                        Some('\'') => break,
                        Some('\\') => match bump!() {
                            Some(e @ ('\'' | '\\')) => s.push(e),
                            _ => return Err(Error::parse(line, column, "invalid escape")),
                        },
                        Some(c) => s.push(c),
                    }
                }
                out.push(single(Tok::Quoted(s)));
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut s = String::new();
                // Inner hyphens are allowed so that `normal-lp` is one word.
                while let Some(&c) = chars.peek() {
                    let hyphen = c == '-' && chars.clone().nth(1).is_some_and(|d| d.is_ascii_alphanumeric());
                    if c.is_ascii_alphanumeric() || c == '_' || hyphen {
                        s.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                out.push(single(Tok::Word(s)));
            }
            other => return Err(Error::parse(l, col, format!("unexpected character `{other}`"))),
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_positions() {
        let toks = tokenize("p(a,'x\\'y') <- # c\n ~q.").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Word("p".into()),
                Tok::LParen,
                Tok::Word("a".into()),
                Tok::Comma,
                Tok::Quoted("x'y".into()),
                Tok::RParen,
                Tok::Arrow,
                Tok::Tilde,
                Tok::Word("q".into()),
                Tok::Dot,
                Tok::Eof,
            ]
        );
        assert_eq!((toks[7].line, toks[7].column), (2, 2));
    }

    #[test]
    fn errors_carry_positions() {
        let Err(Error::Parse { line, column, .. }) = tokenize("p.\n  $") else {
            panic!()
        };
        assert_eq!((line, column), (2, 3));
        assert!(tokenize("'open").is_err());
    }
}
