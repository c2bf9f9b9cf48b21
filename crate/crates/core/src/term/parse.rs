use super::{EqKind, Equation, Term};
use crate::error::{Error, Result};
use crate::ops::{ConstName, UnaryOp};

#[derive(Debug)]
enum Sexp {
    Atom(usize, String),
    List(usize, Vec<Sexp>),
}

impl Sexp {
    fn pos(&self) -> usize {
        match self {
            Sexp::Atom(p, _) | Sexp::List(p, _) => *p,
        }
    }
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp> {
        self.skip_ws();
        let start = self.pos;
        match self.src[self.pos..].chars().next() {
            None => Err(Error::Parse {
                pos: start,
                msg: "unexpected end of input".into(),
            }),
            Some(')') => Err(Error::Parse {
                pos: start,
                msg: "unexpected `)`".into(),
            }),
            Some('(') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.src[self.pos..].chars().next() {
                        None => {
                            return Err(Error::Parse {
                                pos: start,
                                msg: "unclosed `(`".into(),
                            })
                        }
                        Some(')') => {
                            self.pos += 1;
                            return Ok(Sexp::List(start, items));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(_) => {
                // `[` ... `]` may contain commas and spaces inside a token
                let mut depth = 0usize;
                let mut end = self.pos;
                for (k, c) in self.src[self.pos..].char_indices() {
                    match c {
                        '[' => depth += 1,
                        ']' => depth = depth.saturating_sub(1),
                        '(' | ')' if depth == 0 => break,
                        c if c.is_whitespace() && depth == 0 => break,
                        _ => {}
                    }
                    end = self.pos + k + c.len_utf8();
                }
                let tok: String = self.src[self.pos..end]
                    .chars()
                    .filter(|c| !c.is_whitespace())
                    .collect();
                self.pos = end;
                Ok(Sexp::Atom(start, tok))
            }
        }
    }
}

fn read_all(src: &str) -> Result<Sexp> {
    let mut r = Reader { src, pos: 0 };
    let e = r.read()?;
    r.skip_ws();
    if r.pos != src.len() {
        return Err(Error::Parse {
            pos: r.pos,
            msg: "trailing input".into(),
        });
    }
    Ok(e)
}

pub fn parse_term(src: &str) -> Result<Term> {
    to_term(&read_all(src)?)
}

pub fn parse_equation(src: &str) -> Result<Equation> {
    let e = read_all(src)?;
    match &e {
        Sexp::List(pos, items) => {
            let kind = match items.first() {
                Some(Sexp::Atom(_, s)) if s == "=" => EqKind::Eq,
                Some(Sexp::Atom(_, s)) if s == "<=" => EqKind::Le,
                _ => {
                    return Err(Error::Parse {
                        pos: *pos,
                        msg: "expected `(= lhs rhs)` or `(<= lhs rhs)`".into(),
                    })
                }
            };
            if items.len() != 3 {
                return Err(Error::Parse {
                    pos: *pos,
                    msg: "an equation has exactly two sides".into(),
                });
            }
            Ok(Equation {
                kind,
                lhs: to_term(&items[1])?,
                rhs: to_term(&items[2])?,
            })
        }
        Sexp::Atom(pos, _) => Err(Error::Parse {
            pos: *pos,
            msg: "expected an equation".into(),
        }),
    }
}

fn index(e: &Sexp) -> Result<usize> {
    match e {
        Sexp::Atom(pos, s) => s.parse().map_err(|_| Error::Parse {
            pos: *pos,
            msg: format!("expected an index, found `{s}`"),
        }),
        Sexp::List(pos, _) => Err(Error::Parse {
            pos: *pos,
            msg: "expected an index".into(),
        }),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

fn to_term(e: &Sexp) -> Result<Term> {
    match e {
        Sexp::Atom(pos, s) => match s.as_str() {
            "0" => Ok(Term::Zero),
            "1" => Ok(Term::One),
            "Id" | "1'" => Ok(Term::Const(ConstName::Id)),
            _ => match s.parse::<ConstName>() {
                Ok(c @ ConstName::Diag(..)) => Ok(Term::Const(c)),
                _ if is_identifier(s) => Ok(Term::Var(s.clone())),
                _ => Err(Error::Parse {
                    pos: *pos,
                    msg: format!("unexpected token `{s}`"),
                }),
            },
        },
        Sexp::List(pos, items) => {
            let pos = *pos;
            let Some(Sexp::Atom(hpos, head)) = items.first() else {
                return Err(Error::Parse {
                    pos,
                    msg: "expected an operator".into(),
                });
            };
            let args = &items[1..];
            let arity = |k: usize| -> Result<()> {
                if args.len() == k {
                    Ok(())
                } else {
                    Err(Error::Parse {
                        pos,
                        msg: format!("`{head}` takes {k} arguments, found {}", args.len()),
                    })
                }
            };
            let fold = |f: fn(Box<Term>, Box<Term>) -> Term| -> Result<Term> {
                if args.len() < 2 {
                    return Err(Error::Parse {
                        pos,
                        msg: format!("`{head}` needs at least two arguments"),
                    });
                }
                let mut it = args.iter();
                let mut acc = to_term(it.next().unwrap())?;
                for a in it {
                    acc = f(Box::new(acc), Box::new(to_term(a)?));
                }
                Ok(acc)
            };
            match head.as_str() {
                "+" => fold(Term::Join),
                "*" => fold(Term::Meet),
                ";" => fold(Term::Compose),
                "-" | "not" => {
                    arity(1)?;
                    Ok(Term::Not(Box::new(to_term(&args[0])?)))
                }
                "d" => {
                    arity(2)?;
                    Ok(Term::Const(ConstName::Diag(
                        index(&args[0])?,
                        index(&args[1])?,
                    )))
                }
                "const" => {
                    arity(1)?;
                    match &args[0] {
                        Sexp::Atom(_, s) => Ok(Term::Const(ConstName::Custom(s.clone()))),
                        other => Err(Error::Parse {
                            pos: other.pos(),
                            msg: "expected a constant name".into(),
                        }),
                    }
                }
                "c" | "cu" | "cd" => {
                    arity(2)?;
                    let i = index(&args[0])?;
                    let op = match head.as_str() {
                        "c" => UnaryOp::Cyl(i),
                        "cu" => UnaryOp::CylUp(i),
                        _ => UnaryOp::CylDown(i),
                    };
                    Ok(Term::Unary(op, Box::new(to_term(&args[1])?)))
                }
                "p" | "s" => {
                    arity(3)?;
                    let (i, j) = (index(&args[0])?, index(&args[1])?);
                    let t = Box::new(to_term(&args[2])?);
                    Ok(if head == "p" {
                        Term::Unary(UnaryOp::Swap(i, j), t)
                    } else {
                        Term::Subst(i, j, t)
                    })
                }
                "cg" => {
                    if args.is_empty() {
                        return Err(Error::Parse {
                            pos,
                            msg: "`cg` needs a term".into(),
                        });
                    }
                    let mut g = args[..args.len() - 1]
                        .iter()
                        .map(index)
                        .collect::<Result<Vec<_>>>()?;
                    g.sort_unstable();
                    g.dedup();
                    Ok(Term::CylSet(g, Box::new(to_term(&args[args.len() - 1])?)))
                }
                "=" | "<=" => Err(Error::Parse {
                    pos,
                    msg: "equation where a term was expected".into(),
                }),
                other => {
                    let op: UnaryOp = other.parse()?;
                    if let UnaryOp::Custom(name) = &op {
                        if !is_identifier(name) {
                            return Err(Error::Parse {
                                pos: *hpos,
                                msg: format!("unknown operator `{other}`"),
                            });
                        }
                    }
                    arity(1)?;
                    Ok(Term::Unary(op, Box::new(to_term(&args[0])?)))
                }
            }
        }
    }
}
