//! A small reader for rational functions written the way they are usually
//! printed: `-(y1 y2 - x1 x2 + 4T)/(2(x1-x2)^2 y1 y2)`.
//!
//! Juxtaposition multiplies, `3/2` directly between digits is a rational
//! literal, `x`/`y` are aliases for `x1`/`y1`, and `perm(m)` expands a
//! monomial into the sum of its distinct images under permutations of the
//! points. The right operand of `/` must be a product of numbers, powers of
//! `y_i` and powers of `(x_i - x_j)`.

use std::collections::{BTreeMap, BTreeSet};

use crate::exact::{DenForm, MPoly, Rat, RatFn};
use crate::{GbeError, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let digits = |i: &mut usize| {
        let start = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        chars[start..*i].iter().collect::<String>()
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let p = digits(&mut i);
            let mut text = p;
            if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                i += 1;
                text = format!("{text}/{}", digits(&mut i));
            }
            out.push(Tok::Num(text.parse()?));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            i += 1;
            if c == 'p' {
                while i < chars.len() && chars[i].is_ascii_alphabetic() {
                    i += 1;
                }
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(GbeError::Parse(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Ast {
    Num(Rat),
    T,
    X(usize),
    Y(usize),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Neg(Box<Ast>),
    Pow(Box<Ast>, u32),
    Perm(Box<Ast>),
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(GbeError::Parse(format!("expected `{c}` at token {}", self.pos)))
        }
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = if self.eat('-') {
            Ast::Neg(Box::new(self.term()?))
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn starts_primary(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')))
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.power()?;
        loop {
            if self.eat('*') {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.power()?));
            } else if self.eat('/') {
                lhs = Ast::Div(Box::new(lhs), Box::new(self.power()?));
            } else if self.starts_primary() {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.primary()?;
        if self.eat('^') {
            match self.toks.get(self.pos) {
                Some(Tok::Num(r)) if r.is_integer() && !r.is_negative() => {
                    let e = r.numer().try_into().map_err(|_| GbeError::Parse("exponent too large".into()))?;
                    self.pos += 1;
                    Ok(Ast::Pow(Box::new(base), e))
                }
                _ => Err(GbeError::Parse("exponent must be a nonnegative integer".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<Ast> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(Ast::Num(r))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "perm" {
                    self.expect('(')?;
                    let e = self.expr()?;
                    self.expect(')')?;
                    return Ok(Ast::Perm(Box::new(e)));
                }
                let (head, idx) = name.split_at(1);
                let idx = if idx.is_empty() {
                    1
                } else {
                    idx.parse::<usize>().map_err(|_| GbeError::Parse(format!("bad name `{name}`")))?
                };
                match head {
                    "T" if name == "T" => Ok(Ast::T),
                    "x" => Ok(Ast::X(idx)),
                    "y" => Ok(Ast::Y(idx)),
                    _ => Err(GbeError::Parse(format!("unknown name `{name}`"))),
                }
            }
            other => Err(GbeError::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

fn check_point(n: usize, i: usize) -> Result<()> {
    if i == 0 || i > n {
        return Err(GbeError::Parse(format!("point {i} outside a {n}-point context")));
    }
    Ok(())
}

fn eval(n: usize, a: &Ast) -> Result<RatFn> {
    Ok(match a {
        Ast::Num(r) => RatFn::constant(n, r.clone()),
        Ast::T => RatFn::t(n),
        Ast::X(i) => {
            check_point(n, *i)?;
            RatFn::x(n, *i)
        }
        Ast::Y(i) => {
            check_point(n, *i)?;
            RatFn::y(n, *i)
        }
        Ast::Add(l, r) => eval(n, l)?.add(&eval(n, r)?),
        Ast::Sub(l, r) => eval(n, l)?.sub(&eval(n, r)?),
        Ast::Mul(l, r) => eval(n, l)?.mul(&eval(n, r)?),
        Ast::Neg(e) => eval(n, e)?.neg(),
        Ast::Pow(b, e) => eval(n, b)?.pow(*e),
        Ast::Div(l, r) => {
            let num = eval(n, l)?;
            let (scalar, den) = denominator(n, r)?;
            let d = DenForm::new(Rat::ONE, den.yexps().to_vec(), den.diffs().clone())?;
            RatFn::from_parts(num.num().clone(), num.den().mul(&d)).scale(&scalar.recip())
        }
        Ast::Perm(e) => perm(n, &eval(n, e)?)?,
    })
}

/// Interpret an AST as `scalar * DenForm`; the scalar may be negative.
fn denominator(n: usize, a: &Ast) -> Result<(Rat, DenForm)> {
    let not_den = || GbeError::Parse("divisor is not a product of y and difference factors".into());
    match a {
        Ast::Num(r) if !r.is_zero() => Ok((r.clone(), DenForm::one(n))),
        Ast::Y(i) => {
            check_point(n, *i)?;
            let mut y = vec![0; n];
            y[i - 1] = 1;
            Ok((Rat::ONE, DenForm::new(Rat::ONE, y, BTreeMap::new())?))
        }
        Ast::Sub(l, r) => match (&**l, &**r) {
            (Ast::X(i), Ast::X(j)) if i != j => {
                check_point(n, *i)?;
                check_point(n, *j)?;
                let mut d = BTreeMap::new();
                d.insert(((*i).min(*j), (*i).max(*j)), 1);
                let sign = if i < j { 1 } else { -1 };
                Ok((Rat::from_int(sign), DenForm::new(Rat::ONE, vec![0; n], d)?))
            }
            _ => Err(not_den()),
        },
        Ast::Mul(l, r) => {
            let (a, da) = denominator(n, l)?;
            let (b, db) = denominator(n, r)?;
            Ok((&a * &b, da.mul(&db)))
        }
        Ast::Neg(e) => {
            let (a, d) = denominator(n, e)?;
            Ok((-a, d))
        }
        Ast::Pow(b, e) => {
            let (a, d) = denominator(n, b)?;
            let mut acc = DenForm::one(n);
            for _ in 0..*e {
                acc = acc.mul(&d);
            }
            Ok((a.pow(*e), acc))
        }
        _ => Err(not_den()),
    }
}

fn perm(n: usize, f: &RatFn) -> Result<RatFn> {
    let bad = || GbeError::Parse("perm() takes a single monomial".into());
    let d = f.den();
    if d.yexps().iter().any(|a| *a != 0) || d.has_diffs() || f.num().parts().len() != 1 {
        return Err(bad());
    }
    let (mask, p) = f.num().parts().iter().next().unwrap();
    if *mask != 0 || p.len() != 1 {
        return Err(bad());
    }
    let mut images: BTreeSet<Vec<u32>> = BTreeSet::new();
    let (m, c) = p.terms()[0].clone();
    let c = &c / d.scalar();
    let exps = crate::exact::mono::exps(m, n + 1);
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |pm| {
        let mut e = vec![exps[0]];
        e.extend(pm.iter().map(|&k| exps[k + 1]));
        images.insert(e);
    });
    let terms = images
        .into_iter()
        .map(|e| (crate::exact::mono::from_exps(&e), c.clone()))
        .collect();
    Ok(RatFn::from_mpoly(MPoly::from_terms(n, terms)))
}

fn permutations(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Read a rational function on `n` points.
pub fn parse(n: usize, s: &str) -> Result<RatFn> {
    let toks = lex(s)?;
    let mut p = Parser { toks, pos: 0 };
    let ast = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(GbeError::Parse(format!("trailing input at token {}", p.pos)));
    }
    eval(n, &ast)
}

/// Read a polynomial in `T, x1..xn` (no `y`, no division).
pub fn parse_poly(n: usize, s: &str) -> Result<MPoly> {
    let f = parse(n, s)?;
    let d = f.den();
    if d.yexps().iter().any(|a| *a != 0) || d.has_diffs() || f.num().parts().keys().any(|m| *m != 0) {
        return Err(GbeError::Parse("not a polynomial in T and x".into()));
    }
    let p = f.num().part(0).cloned().unwrap_or_else(|| MPoly::zero(n));
    Ok(p.scale(&d.scalar().recip()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn juxtaposition_and_rational_literals() {
        let f = parse_poly(2, "3/2x1^4x2^2 - 2T(x1+x2)").unwrap();
        let g = parse_poly(2, "3/2*x1^4*x2^2 - 2*T*x1 - 2*T*x2").unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn quotient_into_denform() {
        let f = parse(2, "-(y1y2 - x1x2 + 4T)/(2(x1-x2)^2y1y2)").unwrap();
        let g = parse(2, "-1/(2(x1-x2)^2) + (x1x2-4T)/(2(x1-x2)^2y1y2)").unwrap();
        assert!(f.equal(&g));
        let h = parse(2, "1/(x2-x1)").unwrap();
        assert!(h.equal(&RatFn::one(2).div_diff(2, 1, 1)));
        assert!(parse(1, "1/(x+1)").is_err());
    }

    #[test]
    fn perm_expands_orbits() {
        let f = parse_poly(3, "perm(x1^2x2)").unwrap();
        assert_eq!(f.len(), 6);
        let g = parse_poly(4, "perm(x1x2)").unwrap();
        assert_eq!(g.len(), 6);
    }
}
