//! Text format for systems of polynomial constraints.
//!
//! ```text
//! system := clause ('||' clause)*
//! clause := term ('&&' term)*
//! term   := atom | '(' system ')'
//! atom   := poly rel poly          rel in < <= = == != >= >
//! poly   := sums, differences, products, integer powers and rational
//!           constants over the variables, with parentheses
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use cadadj::cad::{Atom, Formula, InputSystem, Rel};
use cadadj::poly::PolyQ;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unknown variable `{name}`")]
    UnknownVariable { line: usize, col: usize, name: String },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(&'static str),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const OPS: [&str; 17] = ["&&", "||", "<=", ">=", "==", "!=", "<", ">", "=", "+", "-", "*", "/", "^", "(", ")", ","];

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let int: String = chars[start..i].iter().collect();
            let mut q = BigRational::from_integer(if int.is_empty() { BigInt::zero() } else { int.parse().unwrap() });
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                let fs = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let frac: String = chars[fs..i].iter().collect();
                if !frac.is_empty() {
                    let den = num_traits::pow(BigInt::from(10), frac.len());
                    q += BigRational::new(frac.parse().unwrap(), den);
                }
            }
            Tok::Num(q)
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let Some(op) = OPS.iter().find(|op| rest.starts_with(**op)) else {
                return Err(ParseError::Syntax { line: tl, col: tc, msg: format!("unexpected character `{c}`") });
            };
            i += op.len();
            Tok::Op(op)
        };
        col += i - start;
        out.push(Token { tok, line: tl, col: tc });
    }
    out.push(Token { tok: Tok::End, line, col });
    Ok(out)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(q) => format!("number `{q}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(o) => format!("`{o}`"),
        Tok::End => "end of input".to_string(),
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    vars: &'a [String],
    atoms: Vec<Atom>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let t = &self.toks[self.pos];
        Err(ParseError::Syntax { line: t.line, col: t.col, msg: msg.into() })
    }

    fn eat(&mut self, op: &str) -> bool {
        if matches!(self.peek(), Tok::Op(o) if *o == op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: &str) -> PResult<()> {
        if self.eat(op) {
            Ok(())
        } else {
            self.error(format!("expected `{op}`, found {}", describe(self.peek())))
        }
    }

    fn system(&mut self) -> PResult<Formula> {
        let mut parts = vec![self.clause()?];
        while self.eat("||") {
            parts.push(self.clause()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::Or(parts) })
    }

    fn clause(&mut self) -> PResult<Formula> {
        let mut parts = vec![self.term()?];
        while self.eat("&&") {
            parts.push(self.term()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::And(parts) })
    }

    fn term(&mut self) -> PResult<Formula> {
        let (start, natoms) = (self.pos, self.atoms.len());
        let first = match self.atom() {
            Ok(f) => return Ok(f),
            Err(e) => e,
        };
        let reached = self.pos;
        self.pos = start;
        self.atoms.truncate(natoms);
        if !self.eat("(") {
            return Err(first);
        }
        match self.system().and_then(|f| self.expect(")").map(|_| f)) {
            Ok(f) => Ok(f),
            // report whichever reading got further
            Err(second) => {
                if self.pos >= reached {
                    Err(second)
                } else {
                    Err(first)
                }
            }
        }
    }

    fn atom(&mut self) -> PResult<Formula> {
        let lhs = self.poly()?;
        let rel = match self.peek() {
            Tok::Op("<") => Rel::Lt,
            Tok::Op("<=") => Rel::Le,
            Tok::Op("=") | Tok::Op("==") => Rel::Eq,
            Tok::Op("!=") => Rel::Ne,
            Tok::Op(">=") => Rel::Ge,
            Tok::Op(">") => Rel::Gt,
            t => return self.error(format!("expected a relation, found {}", describe(t))),
        };
        self.pos += 1;
        let rhs = self.poly()?;
        self.atoms.push(Atom { poly: lhs.sub(&rhs), rel });
        Ok(Formula::Atom(self.atoms.len() - 1))
    }

    fn poly(&mut self) -> PResult<PolyQ> {
        let mut p = self.product()?;
        loop {
            if self.eat("+") {
                p = p.add(&self.product()?);
            } else if self.eat("-") {
                p = p.sub(&self.product()?);
            } else {
                return Ok(p);
            }
        }
    }

    fn product(&mut self) -> PResult<PolyQ> {
        let mut p = self.unary()?;
        loop {
            if self.eat("*") {
                p = p.mul(&self.unary()?);
            } else if self.eat("/") {
                let at = self.pos;
                let d = self.unary()?;
                match d.as_constant() {
                    Some(c) if !c.is_zero() => p = p.scale(&c.recip()),
                    _ => {
                        self.pos = at;
                        return self.error("can only divide by a nonzero constant");
                    }
                }
            } else {
                return Ok(p);
            }
        }
    }

    fn unary(&mut self) -> PResult<PolyQ> {
        if self.eat("-") {
            Ok(self.unary()?.neg())
        } else if self.eat("+") {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> PResult<PolyQ> {
        let base = self.base()?;
        if !self.eat("^") {
            return Ok(base);
        }
        match self.peek().clone() {
            Tok::Num(q) if q.is_integer() => {
                let Some(e) = q.to_integer().to_u32() else {
                    return self.error("exponent too large");
                };
                self.pos += 1;
                Ok(base.pow(e))
            }
            t => self.error(format!("expected a nonnegative integer exponent, found {}", describe(&t))),
        }
    }

    fn base(&mut self) -> PResult<PolyQ> {
        let n = self.vars.len();
        match self.peek().clone() {
            Tok::Num(q) => {
                self.pos += 1;
                Ok(PolyQ::constant(n, q))
            }
            Tok::Ident(name) => {
                let Some(i) = self.vars.iter().position(|v| *v == name) else {
                    let t = &self.toks[self.pos];
                    return Err(ParseError::UnknownVariable { line: t.line, col: t.col, name });
                };
                self.pos += 1;
                Ok(PolyQ::var(n, i))
            }
            Tok::Op("(") => {
                self.pos += 1;
                let p = self.poly()?;
                self.expect(")")?;
                Ok(p)
            }
            t => self.error(format!("expected a polynomial, found {}", describe(&t))),
        }
    }
}

/// Distinct identifiers, sorted.
pub fn variables_in(text: &str) -> Result<Vec<String>, ParseError> {
    let mut out: Vec<String> = lex(text)?
        .into_iter()
        .filter_map(|t| match t.tok {
            Tok::Ident(s) => Some(s),
            _ => None,
        })
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Parse a system. With `vars` empty the variables are the identifiers in
/// sorted order.
pub fn parse_system(text: &str, vars: &[String]) -> Result<InputSystem, ParseError> {
    let vars = if vars.is_empty() { variables_in(text)? } else { vars.to_vec() };
    let mut p = Parser { toks: lex(text)?, pos: 0, vars: &vars, atoms: Vec::new() };
    let formula = p.system()?;
    if p.peek() != &Tok::End {
        return p.error(format!("unexpected {}", describe(p.peek())));
    }
    let atoms = p.atoms;
    Ok(InputSystem { vars, atoms, formula })
}

/// Comma-separated polynomials, as used for variable substitutions.
pub fn parse_poly_list(text: &str, vars: &[String]) -> Result<Vec<PolyQ>, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, vars, atoms: Vec::new() };
    let mut out = vec![p.poly()?];
    while p.eat(",") {
        out.push(p.poly()?);
    }
    if p.peek() != &Tok::End {
        return p.error(format!("unexpected {}", describe(p.peek())));
    }
    Ok(out)
}

/// Render a system in the accepted syntax; `parse_system` inverts it.
pub fn print_system(sys: &InputSystem) -> String {
    fn go(f: &Formula, sys: &InputSystem, nested: bool, out: &mut String) {
        match f {
            Formula::Atom(i) => {
                let a = &sys.atoms[*i];
                out.push_str(&format!("{} {} 0", a.poly.to_string_with(&sys.vars), a.rel.symbol()));
            }
            Formula::And(fs) | Formula::Or(fs) => {
                let sep = if matches!(f, Formula::And(_)) { " && " } else { " || " };
                if nested {
                    out.push('(');
                }
                for (k, g) in fs.iter().enumerate() {
                    if k > 0 {
                        out.push_str(sep);
                    }
                    go(g, sys, true, out);
                }
                if nested {
                    out.push(')');
                }
            }
        }
    }
    let mut out = String::new();
    go(&sys.formula, sys, false, &mut out);
    out
}
