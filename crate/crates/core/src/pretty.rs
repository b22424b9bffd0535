//! Concrete syntax printer. Output reparses to an alpha-equal term.

use std::fmt::{self, Write};

use crate::syntax::Expr;

pub fn pretty(e: &Expr) -> String {
    let mut s = String::new();
    top(e, &mut s).expect("writing to a String cannot fail");
    s
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty(self))
    }
}

/// Terms serialize as their concrete syntax.
impl serde::Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&pretty(self))
    }
}

fn top(e: &Expr, out: &mut String) -> fmt::Result {
    match e {
        Expr::Var(x) => write!(out, "{x}"),
        Expr::Con(c, args) => {
            write!(out, "{}", c.name)?;
            for a in args {
                out.push(' ');
                arg(a, out)?;
            }
            Ok(())
        }
        Expr::Choice(l, r) => {
            out.push_str("choice ");
            arg(l, out)?;
            out.push(' ');
            arg(r, out)
        }
        Expr::Case(t, s, alts) => {
            write!(out, "case[{t}] ")?;
            top(s, out)?;
            out.push_str(" of {");
            for (i, a) in alts.iter().enumerate() {
                if i > 0 {
                    out.push_str("; ");
                }
                write!(out, "{}", a.con)?;
                for y in &a.vars {
                    write!(out, " {y}")?;
                }
                out.push_str(" -> ");
                top(&a.rhs, out)?;
            }
            out.push('}');
            Ok(())
        }
        Expr::App(..) => {
            let mut spine = Vec::new();
            let mut cur = e;
            while let Expr::App(f, a) = cur {
                spine.push(&**a);
                cur = f;
            }
            out.push('(');
            match cur {
                Expr::Con(..) => {
                    out.push('(');
                    top(cur, out)?;
                    out.push(')');
                }
                _ => arg(cur, out)?,
            }
            for a in spine.into_iter().rev() {
                out.push(' ');
                arg(a, out)?;
            }
            out.push(')');
            Ok(())
        }
        Expr::Lam(x, b) => {
            write!(out, "\\{x}.")?;
            top(b, out)
        }
        Expr::Letrec(bs, body) => {
            out.push_str("letrec ");
            for (i, b) in bs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write!(out, "{}=", b.name)?;
                top(&b.rhs, out)?;
            }
            out.push_str(" in ");
            top(body, out)
        }
    }
}

fn arg(e: &Expr, out: &mut String) -> fmt::Result {
    match e {
        Expr::Var(_) | Expr::App(..) => top(e, out),
        Expr::Con(_, args) if args.is_empty() => top(e, out),
        _ => {
            out.push('(');
            top(e, out)?;
            out.push(')');
            Ok(())
        }
    }
}
