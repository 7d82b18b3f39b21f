use super::ast::{Diagnostic, Pos};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Str(String),
    Num(f64),
    Doc(String),
    Dollar,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Colon,
    Comma,
    Semi,
    Question,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Num(n) => format!("number {n}"),
            Tok::Doc(_) => "docstring".into(),
            Tok::Dollar => "`$`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Question => "`?`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    rest: &'a str,
    line: usize,
    col: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        self.rest = &self.rest[c.len_utf8()..];
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut c = Cursor {
        chars: src.chars().peekable(),
        rest: src,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        while let Some(ch) = c.peek() {
            if ch.is_whitespace() {
                c.bump();
            } else if ch == '#' {
                while c.peek().is_some_and(|x| x != '\n') {
                    c.bump();
                }
            } else {
                break;
            }
        }
        let pos = c.pos();
        let err = |message: String| Diagnostic { pos, message };
        let Some(ch) = c.peek() else {
            out.push(Token { tok: Tok::Eof, pos });
            return Ok(out);
        };
        let tok = match ch {
            '(' | ')' | '{' | '}' | '[' | ']' | ':' | ',' | ';' | '?' | '$' => {
                c.bump();
                match ch {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ':' => Tok::Colon,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    '?' => Tok::Question,
                    _ => Tok::Dollar,
                }
            }
            '"' if c.rest.starts_with("\"\"\"") => {
                for _ in 0..3 {
                    c.bump();
                }
                let Some(end) = c.rest.find("\"\"\"") else {
                    return Err(err("unterminated docstring".into()));
                };
                let body: String = c.rest[..end].to_string();
                for _ in 0..body.chars().count() + 3 {
                    c.bump();
                }
                Tok::Doc(body)
            }
            '"' => {
                c.bump();
                let mut s = String::new();
                loop {
                    match c.bump() {
                        None | Some('\n') => return Err(err("unterminated string literal".into())),
                        Some('"') => break,
                        Some('\\') => match c.bump() {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some('/') => s.push('/'),
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            Some('r') => s.push('\r'),
                            Some('u') => {
                                let hex: String = (0..4).filter_map(|_| c.bump()).collect();
                                let ch = u32::from_str_radix(&hex, 16)
                                    .ok()
                                    .and_then(char::from_u32)
                                    .ok_or_else(|| err(format!("bad unicode escape \\u{hex}")))?;
                                s.push(ch);
                            }
                            other => {
                                return Err(err(format!("unknown escape \\{}", other.unwrap_or(' '))))
                            }
                        },
                        Some(x) => s.push(x),
                    }
                }
                Tok::Str(s)
            }
            '-' | '0'..='9' => {
                let mut s = String::new();
                if ch == '-' {
                    s.push('-');
                    c.bump();
                }
                while c.peek().is_some_and(|x| x.is_ascii_digit() || x == '.' || x == 'e' || x == 'E') {
                    s.push(c.bump().unwrap());
                }
                let n: f64 = s
                    .parse()
                    .ok()
                    .filter(|n: &f64| n.is_finite())
                    .ok_or_else(|| err(format!("malformed number `{s}`")))?;
                Tok::Num(n)
            }
            x if x.is_ascii_alphabetic() || x == '_' => {
                let mut s = String::new();
                while c.peek().is_some_and(|x| x.is_ascii_alphanumeric() || x == '_') {
                    s.push(c.bump().unwrap());
                }
                Tok::Ident(s)
            }
            other => return Err(err(format!("unexpected character `{other}`"))),
        };
        out.push(Token { tok, pos });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_positions() {
        let toks = tokenize("skill a(x: string) \"\"\"d\"\"\" {\n  call b(k: $x); # c\n}").unwrap();
        assert_eq!(toks[0].tok, Tok::Ident("skill".into()));
        let call = toks.iter().find(|t| t.tok == Tok::Ident("call".into())).unwrap();
        assert_eq!(call.pos, Pos { line: 2, col: 3 });
        assert!(matches!(toks.last().unwrap().tok, Tok::Eof));
    }

    #[test]
    fn string_escapes() {
        let toks = tokenize(r#""a\"b\n""#).unwrap();
        assert_eq!(toks[0].tok, Tok::Str("a\"b\n".into()));
    }

    #[test]
    fn unterminated_doc() {
        let e = tokenize("skill a() \"\"\"oops").unwrap_err();
        assert!(e.message.contains("docstring"));
    }
}
