use num_complex::Complex64;

use super::ast::{Expr, Func, Var};
use super::ExprError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    column: usize,
}

fn syntax(column: usize, message: impl Into<String>) -> ExprError {
    ExprError::Syntax { column, message: message.into() }
}

fn tokenize(text: &str) -> Result<Vec<Token>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, column });
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lexeme: String = chars[start..i].iter().collect();
            let value = lexeme.parse::<f64>().map_err(|_| syntax(column, format!("malformed number `{lexeme}`")))?;
            out.push(Token { tok: Tok::Num(value), column });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), column });
        } else {
            return Err(syntax(column, format!("unexpected character `{c}`")));
        }
    }
    out.push(Token { tok: Tok::End, column: chars.len() + 1 });
    Ok(out)
}

/// Splits `q12` into `('q', 12)`.
fn indexed(name: &str) -> Option<(char, usize)> {
    let mut chars = name.chars();
    let head = chars.next()?;
    let rest = chars.as_str();
    if !(head == 'q' || head == 'v') || rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok().map(|k| (head, k))
}

/// True for names the grammar reserves (`t`, `i`, `q<k>`, `v<k>`, functions).
pub fn is_reserved(name: &str) -> bool {
    name == "t" || name == "i" || indexed(name).is_some() || Func::from_name(name).is_some()
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    dim: usize,
    params: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ExprError> {
        let t = self.next();
        if t.tok == tok {
            Ok(())
        } else {
            Err(syntax(t.column, format!("expected {what}")))
        }
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.next();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // term := unary (('*' | '/') unary)*
    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.next();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.next();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek().tok == Tok::Minus {
            self.next();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    // power := primary ('^' unary)?   (right associative through unary)
    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        let column = self.next().column + 1;
        let exponent = self.unary()?;
        let value = fold_real(&exponent).ok_or(ExprError::NonConstantExponent { column })?;
        Ok(Expr::Pow(Box::new(base), value))
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let t = self.next();
        match t.tok {
            Tok::Num(x) => Ok(Expr::real(x)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => self.identifier(name, t.column),
            Tok::End => Err(syntax(t.column, "unexpected end of input")),
            _ => Err(syntax(t.column, "expected a number, identifier or `(`")),
        }
    }

    fn identifier(&mut self, name: String, column: usize) -> Result<Expr, ExprError> {
        if let Some(func) = Func::from_name(&name) {
            self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
            let arg = self.expr()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        match name.as_str() {
            "t" => return Ok(Expr::Var(Var::T)),
            "i" => return Ok(Expr::Const(Complex64::i())),
            _ => {}
        }
        if let Some((head, k)) = indexed(&name) {
            if k == 0 || k > self.dim {
                return Err(ExprError::IndexOutOfRange { name, column, dim: self.dim });
            }
            let var = if head == 'q' { Var::Q(k - 1) } else { Var::V(k - 1) };
            return Ok(Expr::Var(var));
        }
        if self.params.contains(&name) {
            return Ok(Expr::Param(name));
        }
        Err(ExprError::UnknownIdentifier { name, column })
    }
}

/// Folds a parameter- and variable-free real expression to its value.
fn fold_real(e: &Expr) -> Option<f64> {
    let v = match e {
        Expr::Const(z) if z.im == 0.0 => z.re,
        Expr::Neg(x) => -fold_real(x)?,
        Expr::Add(a, b) => fold_real(a)? + fold_real(b)?,
        Expr::Sub(a, b) => fold_real(a)? - fold_real(b)?,
        Expr::Mul(a, b) => fold_real(a)? * fold_real(b)?,
        Expr::Div(a, b) => fold_real(a)? / fold_real(b)?,
        Expr::Pow(x, p) => fold_real(x)?.powf(*p),
        _ => return None,
    };
    v.is_finite().then_some(v)
}

/// Parses `text` for a system of dimension `dim`. Only the listed parameter
/// names are accepted besides `t`, `i`, `q1..qd`, `v1..vd` and the
/// built-in functions.
pub fn parse<I, S>(text: &str, dim: usize, param_names: I) -> Result<Expr, ExprError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let params: Vec<String> = param_names.into_iter().map(|s| s.as_ref().to_string()).collect();
    if let Some(p) = params.iter().find(|p| is_reserved(p)) {
        return Err(ExprError::ReservedParameter { name: p.clone() });
    }
    let tokens = tokenize(text)?;
    if tokens.len() == 1 {
        return Err(syntax(1, "empty expression"));
    }
    let mut parser = Parser { tokens, pos: 0, dim, params: &params };
    let e = parser.expr()?;
    let t = parser.peek();
    if t.tok != Tok::End {
        return Err(syntax(t.column, "unexpected trailing input"));
    }
    Ok(e)
}
