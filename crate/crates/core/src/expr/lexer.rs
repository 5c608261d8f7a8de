use super::ExprError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TokenKind {
    Number(f64),
    Ident,
    Op(char),
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// Byte offset into the source.
    pub position: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let kind = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' | b'.' => {
                i = scan_number(bytes, i)?;
                let text = &src[start..i];
                let v: f64 = text
                    .parse()
                    .map_err(|_| ExprError::MalformedNumber { position: start })?;
                TokenKind::Number(v)
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                TokenKind::Ident
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                i += 1;
                TokenKind::Op(c as char)
            }
            b'(' => {
                i += 1;
                TokenKind::LParen
            }
            b')' => {
                i += 1;
                TokenKind::RParen
            }
            b',' => {
                i += 1;
                TokenKind::Comma
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ExprError::IllegalCharacter { ch, position: start });
            }
        };
        tokens.push(Token {
            kind,
            text: src[start..i].to_string(),
            position: start,
        });
    }
    Ok(tokens)
}

/// Decimal literal with an optional fraction and exponent. Returns the end offset.
fn scan_number(bytes: &[u8], start: usize) -> Result<usize, ExprError> {
    let mut i = start;
    let mut dot: Option<usize> = None;
    let mut digits = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'0'..=b'9' => digits += 1,
            b'.' => {
                if let Some(first) = dot {
                    return Err(ExprError::MalformedNumber { position: first });
                }
                dot = Some(i);
            }
            _ => break,
        }
        i += 1;
    }
    if digits == 0 {
        return Err(ExprError::MalformedNumber { position: start });
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        let exp_start = j;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        if j == exp_start {
            return Err(ExprError::MalformedNumber { position: i });
        }
        i = j;
    }
    Ok(i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_streams() {
        let t = tokenize("r^2").unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[0].kind, TokenKind::Ident);
        assert_eq!(t[1].kind, TokenKind::Op('^'));
        assert_eq!(t[2].kind, TokenKind::Number(2.0));
        assert_eq!(tokenize("sqrt(R^2 - r^2)").unwrap().len(), 10);
        let t = tokenize("  1.5e-3*x1").unwrap();
        assert_eq!(t[0].kind, TokenKind::Number(1.5e-3));
        assert_eq!(t[0].position, 2);
        assert_eq!(t[2].text, "x1");
    }

    #[test]
    fn bad_input_reports_offsets() {
        assert_eq!(
            tokenize("2..3"),
            Err(ExprError::MalformedNumber { position: 1 })
        );
        assert_eq!(
            tokenize("r # 2"),
            Err(ExprError::IllegalCharacter { ch: '#', position: 2 })
        );
        assert_eq!(tokenize("1e+"), Err(ExprError::MalformedNumber { position: 1 }));
    }
}
