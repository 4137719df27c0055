//! Keyframe value expressions: `+ - *`, unary minus, parentheses, numbers and
//! identifiers. Identifiers name amplitudes or the direction components
//! `dir_x` / `dir_y`.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExprError {
    /// 0-based character offset into the expression text.
    pub offset: usize,
    pub message: String,
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ExprError> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens: &tokens, pos: 0, len: text.chars().count() };
        let e = p.expr()?;
        if let Some(t) = p.peek() {
            return Err(ExprError { offset: t.offset, message: format!("unexpected {:?}", t.kind) });
        }
        Ok(e)
    }

    pub fn eval(&self, env: &dyn Fn(&str) -> Option<f64>) -> Result<f64, String> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Var(name) => env(name).ok_or_else(|| format!("unknown identifier {name:?}"))?,
            Expr::Neg(e) => -e.eval(env)?,
            Expr::Add(a, b) => a.eval(env)? + b.eval(env)?,
            Expr::Sub(a, b) => a.eval(env)? - b.eval(env)?,
            Expr::Mul(a, b) => a.eval(env)? * b.eval(env)?,
        })
    }

    pub fn vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Expr::Neg(e) => e.vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(v) if *v < 0.0 => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(v) => f.write_str(v),
            Expr::Neg(e) => {
                f.write_str("-")?;
                wrap(f, e, 4)
            }
            Expr::Add(a, b) => {
                wrap(f, a, 1)?;
                f.write_str(" + ")?;
                wrap(f, b, 2)
            }
            Expr::Sub(a, b) => {
                wrap(f, a, 1)?;
                f.write_str(" - ")?;
                wrap(f, b, 2)
            }
            Expr::Mul(a, b) => {
                wrap(f, a, 2)?;
                f.write_str(" * ")?;
                wrap(f, b, 3)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Open,
    Close,
}

struct Token {
    kind: Kind,
    offset: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let kind = match c {
            ' ' | '\t' => {
                i += 1;
                continue;
            }
            '+' => Kind::Plus,
            '-' => Kind::Minus,
            '*' => Kind::Star,
            '(' => Kind::Open,
            ')' => Kind::Close,
            c if c.is_ascii_digit() || c == '.' => {
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let lit: String = chars[start..i].iter().collect();
                let v = lit
                    .parse()
                    .map_err(|_| ExprError { offset: start, message: format!("bad number {lit:?}") })?;
                out.push(Token { kind: Kind::Num(v), offset: start });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token { kind: Kind::Ident(chars[start..i].iter().collect()), offset: start });
                continue;
            }
            other => {
                return Err(ExprError { offset: start, message: format!("unexpected character {other:?}") })
            }
        };
        out.push(Token { kind, offset: start });
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, kind: &Kind) -> bool {
        if self.peek().is_some_and(|t| &t.kind == kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(&Kind::Plus) {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(&Kind::Minus) {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        while self.eat(&Kind::Star) {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let Some(tok) = self.tokens.get(self.pos) else {
            return Err(ExprError { offset: self.len, message: "unexpected end of expression".into() });
        };
        self.pos += 1;
        match &tok.kind {
            Kind::Num(v) => Ok(Expr::Num(*v)),
            Kind::Ident(name) => Ok(Expr::Var(name.clone())),
            Kind::Minus => Ok(match self.factor()? {
                Expr::Num(v) => Expr::Num(-v),
                e => Expr::Neg(Box::new(e)),
            }),
            Kind::Open => {
                let e = self.expr()?;
                if !self.eat(&Kind::Close) {
                    let offset = self.peek().map_or(self.len, |t| t.offset);
                    return Err(ExprError { offset, message: "expected ')'".into() });
                }
                Ok(e)
            }
            other => Err(ExprError { offset: tok.offset, message: format!("unexpected {other:?}") }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(name: &str) -> Option<f64> {
        match name {
            "distance" => Some(10.0),
            "dir_x" => Some(0.5),
            "growth" => Some(0.4),
            _ => None,
        }
    }

    #[test]
    fn evaluates() {
        let cases = [
            ("0", 0.0),
            ("distance * dir_x", 5.0),
            ("-distance * dir_x", -5.0),
            ("1 + growth", 1.4),
            ("2 * (1 - growth)", 1.2),
            ("-(distance + 2)", -12.0),
            ("3 - -2", 5.0),
        ];
        for (src, want) in cases {
            let e = Expr::parse(src).unwrap();
            assert!((e.eval(&env).unwrap() - want).abs() < 1e-12, "{src}");
        }
    }

    #[test]
    fn errors() {
        assert!(Expr::parse("").is_err());
        assert!(Expr::parse("1 +").is_err());
        assert!(Expr::parse("(1").is_err());
        assert_eq!(Expr::parse("1 $ 2").unwrap_err().offset, 2);
        assert!(Expr::parse("wiggle").unwrap().eval(&env).is_err());
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "distance * dir_x",
            "1 + growth",
            "-rotation",
            "2 * (1 - growth)",
            "-(a + b) * c",
            "a - (b - c)",
            "-3",
        ] {
            let e = Expr::parse(src).unwrap();
            assert_eq!(Expr::parse(&e.to_string()).unwrap(), e, "{src} -> {e}");
        }
    }
}
