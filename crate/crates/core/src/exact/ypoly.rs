//! Polynomials in `T, x_i` extended by the square roots `y_i`, kept with
//! degree at most one in every `y_i`.

use std::collections::BTreeMap;
use std::fmt;

use super::mpoly::MPoly;
use super::rat::Rat;
use crate::{GbeError, Result};

/// Bit `i - 1` of a mask stands for `y_i`.
pub type YMask = u16;

#[inline]
pub fn bit(i: usize) -> YMask {
    1 << (i - 1)
}

/// `sum_S c_S * prod_{i in S} y_i`; zero parts are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct YPoly {
    n: usize,
    parts: BTreeMap<YMask, MPoly>,
}

/// `prod_{i in mask} (x_i^2 - 4T)`.
pub fn y_squared_product(n: usize, mask: YMask) -> MPoly {
    let mut acc = MPoly::one(n);
    for i in 1..=n {
        if mask & bit(i) != 0 {
            acc = acc.mul(&MPoly::y_squared(n, i));
        }
    }
    acc
}

impl YPoly {
    pub fn zero(n: usize) -> YPoly {
        YPoly { n, parts: BTreeMap::new() }
    }

    pub fn from_mpoly(p: MPoly) -> YPoly {
        YPoly::from_part(0, p)
    }

    pub fn from_part(mask: YMask, p: MPoly) -> YPoly {
        let mut out = YPoly::zero(p.npoints());
        if !p.is_zero() {
            out.parts.insert(mask, p);
        }
        out
    }

    pub fn constant(n: usize, c: Rat) -> YPoly {
        YPoly::from_part(0, MPoly::constant(n, c))
    }

    pub fn y(n: usize, i: usize) -> YPoly {
        YPoly::from_part(bit(i), MPoly::one(n))
    }

    pub fn npoints(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &BTreeMap<YMask, MPoly> {
        &self.parts
    }

    pub fn part(&self, mask: YMask) -> Option<&MPoly> {
        self.parts.get(&mask)
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.parts.values().map(MPoly::len).sum()
    }

    fn insert_add(&mut self, mask: YMask, p: MPoly) {
        if p.is_zero() {
            return;
        }
        match self.parts.remove(&mask) {
            Some(q) => {
                let s = q.add(&p);
                if !s.is_zero() {
                    self.parts.insert(mask, s);
                }
            }
            None => {
                self.parts.insert(mask, p);
            }
        }
    }

    pub fn add(&self, other: &YPoly) -> YPoly {
        assert_eq!(self.n, other.n, "context mismatch");
        let mut out = self.clone();
        for (m, p) in &other.parts {
            out.insert_add(*m, p.clone());
        }
        out
    }

    pub fn sub(&self, other: &YPoly) -> YPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> YPoly {
        YPoly {
            n: self.n,
            parts: self.parts.iter().map(|(m, p)| (*m, p.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> YPoly {
        if c.is_zero() {
            return YPoly::zero(self.n);
        }
        YPoly {
            n: self.n,
            parts: self.parts.iter().map(|(m, p)| (*m, p.scale(c))).collect(),
        }
    }

    pub fn mul_mpoly(&self, q: &MPoly) -> YPoly {
        let mut out = YPoly::zero(self.n);
        for (m, p) in &self.parts {
            out.insert_add(*m, p.mul(q));
        }
        out
    }

    /// Multiply by `y_i`, rewriting `y_i^2` where it appears.
    pub fn mul_y(&self, i: usize) -> YPoly {
        let b = bit(i);
        let mut out = YPoly::zero(self.n);
        let ys = MPoly::y_squared(self.n, i);
        for (m, p) in &self.parts {
            if m & b != 0 {
                out.insert_add(m & !b, p.mul(&ys));
            } else {
                out.insert_add(m | b, p.clone());
            }
        }
        out
    }

    pub fn mul(&self, other: &YPoly) -> YPoly {
        assert_eq!(self.n, other.n, "context mismatch");
        let mut out = YPoly::zero(self.n);
        let mut squares: BTreeMap<YMask, MPoly> = BTreeMap::new();
        for (ma, pa) in &self.parts {
            for (mb, pb) in &other.parts {
                let common = ma & mb;
                let mut prod = pa.mul(pb);
                if common != 0 {
                    let sq = squares
                        .entry(common)
                        .or_insert_with(|| y_squared_product(self.n, common));
                    prod = prod.mul(sq);
                }
                out.insert_add(ma ^ mb, prod);
            }
        }
        out
    }

    /// Split as `A + B * y_i` with neither `A` nor `B` involving `y_i`.
    pub fn split(&self, i: usize) -> (YPoly, YPoly) {
        let b = bit(i);
        let mut a = YPoly::zero(self.n);
        let mut bb = YPoly::zero(self.n);
        for (m, p) in &self.parts {
            if m & b != 0 {
                bb.parts.insert(m & !b, p.clone());
            } else {
                a.parts.insert(*m, p.clone());
            }
        }
        (a, bb)
    }

    pub fn involves_y(&self, i: usize) -> bool {
        self.parts.keys().any(|m| m & bit(i) != 0)
    }

    pub fn map_parts(&self, f: impl Fn(&MPoly) -> MPoly) -> YPoly {
        let mut out = YPoly::zero(self.n);
        for (m, p) in &self.parts {
            out.insert_add(*m, f(p));
        }
        out
    }

    pub fn try_map_parts(&self, f: impl Fn(&MPoly) -> Option<MPoly>) -> Option<YPoly> {
        let mut out = YPoly::zero(self.n);
        for (m, p) in &self.parts {
            out.insert_add(*m, f(p)?);
        }
        Some(out)
    }

    /// Positive rational content over all parts.
    pub fn content(&self) -> Rat {
        let mut g: Option<Rat> = None;
        for p in self.parts.values() {
            let c = p.content();
            g = Some(match g {
                None => c,
                Some(h) => h.gcd(&c),
            });
        }
        g.unwrap_or(Rat::ONE)
    }

    /// Relabel points as in [`MPoly::remap`]; colliding `y` factors multiply
    /// out to `x^2 - 4T`.
    pub fn remap(&self, new_n: usize, map: &[usize]) -> YPoly {
        let mut out = YPoly::zero(new_n);
        for (m, p) in &self.parts {
            let mut mask: YMask = 0;
            let mut extra = MPoly::one(new_n);
            for (idx, &target) in map.iter().enumerate() {
                if m & bit(idx + 1) == 0 {
                    continue;
                }
                if mask & bit(target) != 0 {
                    mask &= !bit(target);
                    extra = extra.mul(&MPoly::y_squared(new_n, target));
                } else {
                    mask |= bit(target);
                }
            }
            out.insert_add(mask, p.remap(new_n, map).mul(&extra));
        }
        out
    }

    /// Numeric value given values for `T`, `x_i` and the branch values `y_i`.
    pub fn eval_f64(&self, t: f64, xs: &[f64], ys: &[f64]) -> f64 {
        self.parts
            .iter()
            .map(|(m, p)| {
                let mut v = p.eval_f64(t, xs);
                for (i, y) in ys.iter().enumerate() {
                    if m & bit(i + 1) != 0 {
                        v *= y;
                    }
                }
                v
            })
            .sum()
    }

    /// Canonical text: `mask: poly` sections joined by ` ; `.
    pub fn write_canonical(&self, out: &mut String) {
        if self.parts.is_empty() {
            out.push('0');
            return;
        }
        for (k, (m, p)) in self.parts.iter().enumerate() {
            if k > 0 {
                out.push_str(" ; ");
            }
            out.push_str(&mask_name(*m));
            out.push_str(": ");
            p.write_canonical(out);
        }
    }

    pub fn parse_canonical(n: usize, s: &str) -> Result<YPoly> {
        let s = s.trim();
        let mut out = YPoly::zero(n);
        if s == "0" {
            return Ok(out);
        }
        let mut last: Option<YMask> = None;
        for section in s.split(" ; ") {
            let (name, poly) = section
                .split_once(": ")
                .ok_or_else(|| GbeError::Parse(format!("missing y-mask in `{section}`")))?;
            let mask = parse_mask(n, name)?;
            if last.is_some_and(|l| l >= mask) {
                return Err(GbeError::Parse("y-masks out of order".into()));
            }
            last = Some(mask);
            let p = MPoly::parse_canonical(n, poly)?;
            if p.is_zero() {
                return Err(GbeError::Parse("zero y-part".into()));
            }
            out.parts.insert(mask, p);
        }
        Ok(out)
    }
}

fn mask_name(m: YMask) -> String {
    if m == 0 {
        return "1".into();
    }
    (1..=16)
        .filter(|i| m & bit(*i) != 0)
        .map(|i| format!("y{i}"))
        .collect::<Vec<_>>()
        .join("*")
}

fn parse_mask(n: usize, s: &str) -> Result<YMask> {
    if s == "1" {
        return Ok(0);
    }
    let mut m: YMask = 0;
    for f in s.split('*') {
        let i = f
            .strip_prefix('y')
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|i| *i >= 1 && *i <= n)
            .ok_or_else(|| GbeError::Parse(format!("bad y factor `{f}`")))?;
        if m & bit(i) != 0 {
            return Err(GbeError::Parse(format!("repeated y factor `{f}`")));
        }
        m |= bit(i);
    }
    Ok(m)
}

impl fmt::Display for YPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_canonical(&mut s);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y_squares_to_relation() {
        let y1 = YPoly::y(2, 1);
        let sq = y1.mul(&y1);
        assert_eq!(sq, YPoly::from_mpoly(MPoly::y_squared(2, 1)));
        assert_eq!(y1.mul_y(1), sq);
    }

    #[test]
    fn masks_stay_canonical() {
        let a = YPoly::y(3, 1).add(&YPoly::y(3, 2));
        let b = YPoly::y(3, 2).add(&YPoly::y(3, 3));
        let p = a.mul(&b).mul(&a);
        for m in p.parts().keys() {
            assert!(*m < 8);
        }
    }

    #[test]
    fn text_round_trip() {
        let p = YPoly::y(3, 1)
            .mul(&YPoly::y(3, 3))
            .add(&YPoly::constant(3, Rat::new(-3, 4)))
            .mul_mpoly(&MPoly::x(3, 2).add(&MPoly::t(3)));
        let s = p.to_string();
        assert!(s.contains("y1*y3: "));
        assert_eq!(YPoly::parse_canonical(3, &s).unwrap(), p);
    }

    #[test]
    fn remap_collision_multiplies_out() {
        let p = YPoly::y(2, 1).mul(&YPoly::y(2, 2));
        let q = p.remap(1, &[1, 1]);
        assert_eq!(q, YPoly::from_mpoly(MPoly::y_squared(1, 1)));
    }
}
