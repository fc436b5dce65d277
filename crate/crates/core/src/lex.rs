//! Token stream shared by the dimension and equation parsers.

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum TokKind {
    Ident(String),
    Int(i64),
    Caret,
    Star,
    Slash,
    Plus,
    Minus,
    LParen,
    RParen,
    Colon,
    Semi,
    Comma,
    Arrow,
    Assign,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Tok {
    pub kind: TokKind,
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct LexError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

/// Splits `src` into tokens. `#` starts a comment that runs to end of line.
pub(crate) fn lex(src: &str) -> Result<Vec<Tok>, LexError> {
    let mut toks = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = src.chars().peekable();

    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().expect("peeked");
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };

        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars);
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut name = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    name.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            toks.push(Tok {
                kind: TokKind::Ident(name),
                line: tl,
                col: tc,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    digits.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            let value: i64 = digits.parse().map_err(|_| LexError {
                line: tl,
                col: tc,
                msg: format!("integer literal `{digits}` is too large"),
            })?;
            toks.push(Tok {
                kind: TokKind::Int(value),
                line: tl,
                col: tc,
            });
            continue;
        }

        let kind = match c {
            '^' => TokKind::Caret,
            '*' => TokKind::Star,
            '/' => TokKind::Slash,
            '+' => TokKind::Plus,
            '-' => TokKind::Minus,
            '(' => TokKind::LParen,
            ')' => TokKind::RParen,
            ':' => TokKind::Colon,
            ';' => TokKind::Semi,
            ',' => TokKind::Comma,
            '=' => TokKind::Assign,
            other => {
                return Err(LexError {
                    line: tl,
                    col: tc,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        bump(&mut chars);
        if kind == TokKind::Minus && chars.peek() == Some(&'>') {
            bump(&mut chars);
            toks.push(Tok {
                kind: TokKind::Arrow,
                line: tl,
                col: tc,
            });
        } else {
            toks.push(Tok {
                kind,
                line: tl,
                col: tc,
            });
        }
    }

    toks.push(Tok {
        kind: TokKind::Eof,
        line,
        col,
    });
    Ok(toks)
}
