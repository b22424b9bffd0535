//! Recursive-descent parser for the concrete syntax.
//!
//! ```text
//! e ::= x | C e1 .. ek | \x.e | (e1 e2) | letrec x1=e1, .., xn=en in e
//!     | choice e1 e2 | case[T] e of {p1 -> e1; ..; pn -> en}
//! p ::= C x1 .. x_ar(C)
//! ```
//!
//! Application is left-associative and a lambda body extends as far right as
//! possible. The result satisfies the distinct-variable convention; binders
//! that clash are renamed.

use std::collections::HashSet;

use thiserror::Error;

use crate::name::Name;
use crate::signature::Signature;
use crate::syntax::{rename_apart, Alt, Binding, Expr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unknown constructor `{name}`")]
    UnknownConstructor { line: usize, col: usize, name: String },
    #[error("{line}:{col}: unknown type `{name}`")]
    UnknownType { line: usize, col: usize, name: String },
    #[error("{line}:{col}: constructor `{name}` has arity {arity} but is applied to more arguments")]
    Arity { line: usize, col: usize, name: String, arity: usize },
    #[error("{line}:{col}: `{what}` applied to a wrong number of arguments")]
    WrongArgCount { line: usize, col: usize, what: String },
    #[error("{line}:{col}: case over `{ty}`: {msg}")]
    Alternatives { line: usize, col: usize, ty: String, msg: String },
    #[error("{line}:{col}: variable `{name}` bound twice in the same binding group")]
    DuplicateBinder { line: usize, col: usize, name: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    Backslash,
    Dot,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eq,
    Comma,
    Semi,
    Arrow,
    Letrec,
    In,
    Choice,
    Case,
    Of,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Lower(s) | Tok::Upper(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
            other => format!("{other:?}"),
        }
    }
}

#[derive(Debug, Clone)]
struct Lexeme {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Lexeme>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut push = |tok| out.push(Lexeme { tok, line: l0, col: c0 });
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
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'>') {
            push(Tok::Arrow);
            i += 2;
            col += 2;
            continue;
        }
        let single = match c {
            '\\' | 'λ' => Some(Tok::Backslash),
            '.' => Some(Tok::Dot),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '=' => Some(Tok::Eq),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            _ => None,
        };
        if let Some(t) = single {
            push(t);
            i += 1;
            col += 1;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = match word.as_str() {
                "letrec" => Tok::Letrec,
                "in" => Tok::In,
                "choice" => Tok::Choice,
                "case" => Tok::Case,
                "of" => Tok::Of,
                _ if c.is_uppercase() => Tok::Upper(word),
                _ => Tok::Lower(word),
            };
            out.push(Lexeme { tok, line: l0, col: c0 });
            continue;
        }
        return Err(ParseError::Syntax { line, col, msg: format!("unexpected character `{c}`") });
    }
    out.push(Lexeme { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Lexeme>,
    at: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn here(&self) -> (usize, usize) {
        let l = &self.toks[self.at];
        (l.line, l.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::Syntax { line, col, msg: msg.into() })
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected {}, found {}", t.describe(), self.peek().describe()))
        }
    }

    fn var(&mut self) -> Result<Name, ParseError> {
        match self.peek().clone() {
            Tok::Lower(x) => {
                self.bump();
                Ok(Name::from(x))
            }
            t => self.syntax(format!("expected a variable, found {}", t.describe())),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Backslash => self.lam(),
            Tok::Letrec => self.letrec(),
            _ => self.app_chain(),
        }
    }

    fn lam(&mut self) -> Result<Expr, ParseError> {
        self.expect(Tok::Backslash)?;
        let x = self.var()?;
        self.expect(Tok::Dot)?;
        Ok(Expr::lam(x, self.expr()?))
    }

    fn letrec(&mut self) -> Result<Expr, ParseError> {
        self.expect(Tok::Letrec)?;
        let mut bindings: Vec<Binding> = Vec::new();
        loop {
            let (line, col) = self.here();
            let x = self.var()?;
            if bindings.iter().any(|b| b.name == x) {
                return Err(ParseError::DuplicateBinder { line, col, name: x.to_string() });
            }
            self.expect(Tok::Eq)?;
            bindings.push(Binding::new(x, self.expr()?));
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(Tok::In)?;
        Ok(Expr::letrec(bindings, self.expr()?))
    }

    fn starts_arg(&self) -> bool {
        matches!(self.peek(), Tok::Lower(_) | Tok::Upper(_) | Tok::LParen | Tok::Backslash | Tok::Letrec)
    }

    fn no_more_args(&self, what: &str) -> Result<(), ParseError> {
        if self.starts_arg() {
            let (line, col) = self.here();
            return Err(ParseError::WrongArgCount { line, col, what: what.to_string() });
        }
        Ok(())
    }

    fn app_chain(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Choice => {
                self.bump();
                let l = self.required_arg("choice")?;
                let r = self.required_arg("choice")?;
                self.no_more_args("choice")?;
                Ok(Expr::choice(l, r))
            }
            Tok::Case => {
                let e = self.case()?;
                self.no_more_args("case")?;
                Ok(e)
            }
            Tok::Upper(c) => {
                let (line, col) = self.here();
                self.bump();
                let con = self.constructor(&c, line, col)?;
                let mut args = Vec::new();
                while self.starts_arg() {
                    if args.len() == con.arity {
                        return Err(ParseError::Arity { line, col, name: c, arity: con.arity });
                    }
                    args.push(self.arg()?);
                }
                Ok(Expr::Con(con, args))
            }
            _ => {
                let mut head = self.arg()?;
                while self.starts_arg() {
                    let a = self.arg()?;
                    head = Expr::app(head, a);
                }
                Ok(head)
            }
        }
    }

    fn required_arg(&mut self, what: &str) -> Result<Expr, ParseError> {
        if !self.starts_arg() {
            let (line, col) = self.here();
            return Err(ParseError::WrongArgCount { line, col, what: what.to_string() });
        }
        self.arg()
    }

    fn constructor(&self, c: &str, line: usize, col: usize) -> Result<crate::syntax::Constructor, ParseError> {
        self.sig.constructor(&Name::new(c)).cloned().ok_or_else(|| ParseError::UnknownConstructor {
            line,
            col,
            name: c.to_string(),
        })
    }

    fn arg(&mut self) -> Result<Expr, ParseError> {
        let (line, col) = self.here();
        match self.peek().clone() {
            Tok::Lower(x) => {
                self.bump();
                Ok(Expr::var(x))
            }
            Tok::Upper(c) => {
                self.bump();
                Ok(Expr::Con(self.constructor(&c, line, col)?, vec![]))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Backslash => self.lam(),
            Tok::Letrec => self.letrec(),
            t => self.syntax(format!("expected an expression, found {}", t.describe())),
        }
    }

    fn case(&mut self) -> Result<Expr, ParseError> {
        let (line, col) = self.here();
        self.expect(Tok::Case)?;
        self.expect(Tok::LBracket)?;
        let ty = match self.bump() {
            Tok::Upper(t) => t,
            t => return self.syntax(format!("expected a type name, found {}", t.describe())),
        };
        self.expect(Tok::RBracket)?;
        let decl = self.sig.type_decl(&Name::new(&ty)).cloned().ok_or_else(|| ParseError::UnknownType {
            line,
            col,
            name: ty.clone(),
        })?;
        let scrut = self.expr()?;
        self.expect(Tok::Of)?;
        self.expect(Tok::LBrace)?;
        let mut alts: Vec<Alt> = Vec::new();
        loop {
            let (al, ac) = self.here();
            let alt_err = |msg: String| ParseError::Alternatives { line: al, col: ac, ty: ty.clone(), msg };
            let c = match self.bump() {
                Tok::Upper(c) => c,
                t => return self.syntax(format!("expected a pattern, found {}", t.describe())),
            };
            let con = decl
                .constructors
                .iter()
                .find(|k| k.name == c.as_str())
                .ok_or_else(|| alt_err(format!("`{c}` is not a constructor of this type")))?
                .clone();
            if alts.iter().any(|a| a.con == con.name) {
                return Err(alt_err(format!("duplicate alternative for `{c}`")));
            }
            let mut vars = Vec::new();
            while let Tok::Lower(_) = self.peek() {
                let (vl, vc) = self.here();
                let y = self.var()?;
                if vars.contains(&y) {
                    return Err(ParseError::DuplicateBinder { line: vl, col: vc, name: y.to_string() });
                }
                vars.push(y);
            }
            if vars.len() != con.arity {
                return Err(alt_err(format!("pattern for `{c}` needs {} variables, found {}", con.arity, vars.len())));
            }
            self.expect(Tok::Arrow)?;
            let rhs = self.expr()?;
            alts.push(Alt { con: con.name.clone(), vars, rhs });
            match self.bump() {
                Tok::Semi => continue,
                Tok::RBrace => break,
                t => return self.syntax(format!("expected `;` or `}}`, found {}", t.describe())),
            }
        }
        if alts.len() != decl.constructors.len() {
            let have: HashSet<&Name> = alts.iter().map(|a| &a.con).collect();
            let missing: Vec<String> =
                decl.constructors.iter().filter(|c| !have.contains(&c.name)).map(|c| c.name.to_string()).collect();
            return Err(ParseError::Alternatives {
                line,
                col,
                ty,
                msg: format!("missing alternatives for {}", missing.join(", ")),
            });
        }
        // Alternatives are stored in declaration order.
        alts.sort_by_key(|a| decl.constructors.iter().position(|c| c.name == a.con));
        Ok(Expr::case(decl.name.clone(), scrut, alts))
    }
}

/// Parses `text` against `sig`.
pub fn parse(text: &str, sig: &Signature) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0, sig };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.syntax(format!("unexpected {}", p.peek().describe()));
    }
    Ok(rename_apart(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::alpha_eq;
    use crate::pretty::pretty;

    fn sig() -> Signature {
        Signature::bool_list()
    }

    #[test]
    fn identity() {
        assert_eq!(parse("\\x.x", &sig()).unwrap(), Expr::lam("x", Expr::var("x")));
        assert_eq!(parse("λx.x", &sig()).unwrap(), Expr::lam("x", Expr::var("x")));
    }

    #[test]
    fn letrec_example() {
        let e = parse("letrec x2=\\x.x, x1=(x2 x1) in x1", &sig()).unwrap();
        let Expr::Letrec(bs, body) = &e else { panic!() };
        assert_eq!(bs[0].name, "x2");
        assert_eq!(bs[0].rhs, Expr::lam("x", Expr::var("x")));
        assert_eq!(bs[1].rhs, Expr::app(Expr::var("x2"), Expr::var("x1")));
        assert_eq!(**body, Expr::var("x1"));
    }

    #[test]
    fn choice_arity() {
        assert!(matches!(parse("choice True False True", &sig()), Err(ParseError::WrongArgCount { .. })));
        assert!(matches!(parse("choice True", &sig()), Err(ParseError::WrongArgCount { .. })));
    }

    #[test]
    fn constructor_arity() {
        assert!(matches!(parse("Cons True Nil Nil", &sig()), Err(ParseError::Arity { .. })));
        assert!(matches!(parse("Foo", &sig()), Err(ParseError::UnknownConstructor { .. })));
        let e = parse("(Cons True) Nil", &sig()).unwrap();
        assert_eq!(e, parse("Cons True Nil", &sig()).unwrap());
    }

    #[test]
    fn case_alternatives() {
        let e = parse("case[List] x of {Cons a b -> a; Nil -> x}", &sig()).unwrap();
        let Expr::Case(_, _, alts) = &e else { panic!() };
        assert_eq!(alts[0].con, "Nil");
        assert!(matches!(parse("case[Bool] x of {True -> x}", &sig()), Err(ParseError::Alternatives { .. })));
        assert!(matches!(
            parse("case[Bool] x of {True -> x; True -> x}", &sig()),
            Err(ParseError::Alternatives { .. })
        ));
        assert!(matches!(
            parse("case[List] x of {Nil -> x; Cons a a -> a}", &sig()),
            Err(ParseError::DuplicateBinder { .. })
        ));
        assert!(matches!(
            parse("case[List] x of {Nil -> x; Cons a -> a}", &sig()),
            Err(ParseError::Alternatives { .. })
        ));
    }

    #[test]
    fn duplicate_letrec_binder() {
        assert!(matches!(parse("letrec x=True, x=False in x", &sig()), Err(ParseError::DuplicateBinder { .. })));
    }

    #[test]
    fn syntax_error_location() {
        match parse("(f a", &sig()) {
            Err(ParseError::Syntax { line: 1, col: 5, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn clashing_binders_renamed() {
        let e = parse("(\\x.x) (\\x.x)", &sig()).unwrap();
        assert!(e.satisfies_dvc());
    }

    #[test]
    fn round_trips() {
        for src in [
            "letrec x=c in ((\\y.y) d)",
            "case[List] (Cons a b) of {Nil -> n; Cons y1 y2 -> y1}",
            "\\f.(f (\\x.x) (letrec a=a in a))",
            "choice (choice True False) (Cons True)",
            "((Nil) a)",
            "((Cons a b) c)",
            "letrec x=\\u.case[Bool] u of {True -> u; False -> \\v.v}, y=x in (y y)",
        ] {
            let e = parse(src, &sig()).unwrap();
            let back = parse(&pretty(&e), &sig()).unwrap();
            assert!(alpha_eq(&e, &back), "{src} -> {}", pretty(&e));
        }
    }
}
