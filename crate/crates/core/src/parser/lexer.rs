use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Ff,
    Tt,
    Mu,
    Nu,
    Not,
    Arrow,
    And,
    Or,
    Turnstile,
    LBrack,
    RBrack,
    LAngle,
    RAngle,
    LParen,
    RParen,
    Dot,
    Comma,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Ff => "`ff`".into(),
            Tok::Tt => "`tt`".into(),
            Tok::Mu => "`mu`".into(),
            Tok::Nu => "`nu`".into(),
            Tok::Not => "`~`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::LAngle => "`<`".into(),
            Tok::RAngle => "`>`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

pub(crate) const KEYWORDS: [&str; 4] = ["ff", "tt", "mu", "nu"];

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Tokenizes `src[start..end]`; spans are absolute offsets into `src`.
pub(crate) fn lex(src: &str, start: usize, end: usize) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let text = &src[start..end];
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some((i, c)) = it.next() {
        let at = start + i;
        let single = |tok: Tok| (tok, at, at + c.len_utf8());
        match c {
            c if c.is_whitespace() => {}
            '~' | '¬' => out.push(single(Tok::Not)),
            '⊃' | '→' => out.push(single(Tok::Arrow)),
            '∧' => out.push(single(Tok::And)),
            '∨' => out.push(single(Tok::Or)),
            '⊢' => out.push(single(Tok::Turnstile)),
            'μ' => out.push(single(Tok::Mu)),
            'ν' => out.push(single(Tok::Nu)),
            '&' => out.push(single(Tok::And)),
            '[' => out.push(single(Tok::LBrack)),
            ']' => out.push(single(Tok::RBrack)),
            '<' => out.push(single(Tok::LAngle)),
            '>' => out.push(single(Tok::RAngle)),
            '(' => out.push(single(Tok::LParen)),
            ')' => out.push(single(Tok::RParen)),
            '.' => out.push(single(Tok::Dot)),
            ',' => out.push(single(Tok::Comma)),
            '-' => match it.peek() {
                Some((_, '>')) => {
                    it.next();
                    out.push((Tok::Arrow, at, at + 2));
                }
                _ => {
                    return Err(ParseError::new(src, at, at + 1, "`->`", "`-`"));
                }
            },
            '|' => match it.peek() {
                Some((_, '-')) => {
                    it.next();
                    out.push((Tok::Turnstile, at, at + 2));
                }
                _ => out.push(single(Tok::Or)),
            },
            c if is_ident_start(c) => {
                let mut stop = i + c.len_utf8();
                while let Some(&(j, d)) = it.peek() {
                    if !is_ident_char(d) {
                        break;
                    }
                    stop = j + d.len_utf8();
                    it.next();
                }
                let word = &text[i..stop];
                let tok = match word {
                    "ff" => Tok::Ff,
                    "tt" => Tok::Tt,
                    "mu" => Tok::Mu,
                    "nu" => Tok::Nu,
                    w => Tok::Ident(w.to_owned()),
                };
                out.push((tok, at, start + stop));
            }
            other => {
                return Err(ParseError::new(
                    src,
                    at,
                    at + other.len_utf8(),
                    "a formula token",
                    &format!("`{other}`"),
                ));
            }
        }
    }
    out.push((Tok::Eof, end, end));
    Ok(out)
}
