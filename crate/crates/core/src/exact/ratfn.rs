//! Rational functions `num / den` with `num` a [`YPoly`] and `den` a
//! [`DenForm`]. Every constructor and operation returns the reduced form.

use std::fmt;

use super::den::DenForm;
use super::mpoly::MPoly;
use super::rat::Rat;
use super::ypoly::{bit, YPoly};
use crate::{GbeError, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFn {
    num: YPoly,
    den: DenForm,
}

impl RatFn {
    pub fn zero(n: usize) -> RatFn {
        RatFn { num: YPoly::zero(n), den: DenForm::one(n) }
    }

    pub fn one(n: usize) -> RatFn {
        RatFn::constant(n, Rat::ONE)
    }

    pub fn constant(n: usize, c: Rat) -> RatFn {
        RatFn::from_ypoly(YPoly::constant(n, c))
    }

    pub fn t(n: usize) -> RatFn {
        RatFn::from_mpoly(MPoly::t(n))
    }

    pub fn x(n: usize, i: usize) -> RatFn {
        RatFn::from_mpoly(MPoly::x(n, i))
    }

    pub fn y(n: usize, i: usize) -> RatFn {
        RatFn::from_ypoly(YPoly::y(n, i))
    }

    pub fn from_mpoly(p: MPoly) -> RatFn {
        RatFn::from_ypoly(YPoly::from_mpoly(p))
    }

    pub fn from_ypoly(p: YPoly) -> RatFn {
        let n = p.npoints();
        RatFn::new(p, DenForm::one(n))
    }

    /// Build and reduce `num / den`.
    pub fn new(num: YPoly, den: DenForm) -> RatFn {
        assert_eq!(num.npoints(), den.npoints(), "context mismatch");
        let mut f = RatFn { num, den };
        f.reduce_in_place();
        f
    }

    /// `num / (scalar * prod y_i^a_i * prod (x_i - x_j)^b)` from parts.
    pub fn from_parts(num: YPoly, den: DenForm) -> RatFn {
        RatFn::new(num, den)
    }

    pub fn npoints(&self) -> usize {
        self.den.npoints()
    }

    pub fn num(&self) -> &YPoly {
        &self.num
    }

    pub fn den(&self) -> &DenForm {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn check_ctx(&self, other: &RatFn) -> Result<()> {
        if self.npoints() != other.npoints() {
            return Err(GbeError::ContextMismatch(self.npoints(), other.npoints()));
        }
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.npoints() {
            return Err(GbeError::IndexOutOfRange { index: i, n: self.npoints() });
        }
        Ok(())
    }

    /// Cancel `y_i` and `(x_i - x_j)` factors that divide the numerator
    /// coefficient-wise, then normalise content and sign of the scalar.
    fn reduce_in_place(&mut self) {
        if self.num.is_zero() {
            self.den = DenForm::one(self.npoints());
            return;
        }
        let n = self.npoints();
        for i in 1..=n {
            while self.den.yexp(i) > 0 {
                let (a, b) = self.num.split(i);
                let Some(q) = a.try_map_parts(|p| p.div_y_squared(i)) else {
                    break;
                };
                self.num = b.add(&q.mul_y(i));
                self.den.add_yexp(i, -1);
            }
        }
        let pairs: Vec<(usize, usize)> = self.den.diffs().keys().copied().collect();
        for (i, j) in pairs {
            while self.den.diff_exp(i, j) > 0 {
                let Some(q) = self.num.try_map_parts(|p| p.div_diff(i, j)) else {
                    break;
                };
                self.num = q;
                self.den.add_diff(i, j, -1);
            }
        }
        let c = self.num.content();
        if !c.is_one() {
            self.num = self.num.scale(&c.recip());
            let s = self.den.scalar() / &c;
            self.den.set_scalar(s);
        }
    }

    pub fn reduce(&self) -> RatFn {
        let mut f = self.clone();
        f.reduce_in_place();
        f
    }

    pub fn neg(&self) -> RatFn {
        RatFn { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale(&self, c: &Rat) -> RatFn {
        if c.is_zero() {
            return RatFn::zero(self.npoints());
        }
        let mut f = RatFn { num: self.num.scale(c), den: self.den.clone() };
        f.reduce_in_place();
        f
    }

    pub fn try_add(&self, other: &RatFn) -> Result<RatFn> {
        self.check_ctx(other)?;
        Ok(self.add(other))
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        assert_eq!(self.npoints(), other.npoints(), "context mismatch");
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let l = self.den.lcm(&other.den);
        let (fa, sa) = self.den.cofactor(&l);
        let (fb, sb) = other.den.cofactor(&l);
        let num = self.num.mul(&fa).scale(&sa).add(&other.num.mul(&fb).scale(&sb));
        RatFn::new(num, l)
    }

    pub fn sub(&self, other: &RatFn) -> RatFn {
        self.add(&other.neg())
    }

    pub fn try_mul(&self, other: &RatFn) -> Result<RatFn> {
        self.check_ctx(other)?;
        Ok(self.mul(other))
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        assert_eq!(self.npoints(), other.npoints(), "context mismatch");
        if self.is_zero() || other.is_zero() {
            return RatFn::zero(self.npoints());
        }
        RatFn::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn mul_mpoly(&self, p: &MPoly) -> RatFn {
        RatFn::new(self.num.mul_mpoly(p), self.den.clone())
    }

    pub fn pow(&self, e: u32) -> RatFn {
        let mut acc = RatFn::one(self.npoints());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn mul_y(&self, i: usize) -> RatFn {
        RatFn::new(self.num.mul_y(i), self.den.clone())
    }

    /// Divide by `y_i^k`.
    pub fn div_y(&self, i: usize, k: u32) -> RatFn {
        let mut den = self.den.clone();
        den.add_yexp(i, k as i64);
        RatFn::new(self.num.clone(), den)
    }

    /// Divide by `(x_i - x_j)^k`.
    pub fn div_diff(&self, i: usize, j: usize, k: u32) -> RatFn {
        assert!(i != j);
        let mut den = self.den.clone();
        den.add_diff(i, j, k as i64);
        let num = if i > j && k % 2 == 1 { self.num.neg() } else { self.num.clone() };
        RatFn::new(num, den)
    }

    pub fn try_derive(&self, i: usize) -> Result<RatFn> {
        self.check_index(i)?;
        Ok(self.derive(i))
    }

    /// Partial derivative in `x_i`, with `y_i' = x_i / y_i`.
    pub fn derive(&self, i: usize) -> RatFn {
        let n = self.npoints();
        if self.is_zero() {
            return self.clone();
        }
        let xi = MPoly::x(n, i);
        let ai = self.den.yexp(i);
        let needs_ysq = ai > 0 || self.num.involves_y(i);

        // Difference factors involving x_i: (other point, exponent, d/dx_i sign).
        let pairs: Vec<(usize, u32, i64)> = self
            .den
            .diffs()
            .iter()
            .filter(|((p, q), _)| *p == i || *q == i)
            .map(|(&(p, q), &b)| if p == i { (q, b, 1) } else { (p, b, -1) })
            .collect();
        let dpoly = |k: usize| {
            let (p, q) = (i.min(k), i.max(k));
            MPoly::diff(n, p, q)
        };
        let pprod = pairs.iter().fold(MPoly::one(n), |acc, (k, _, _)| acc.mul(&dpoly(*k)));

        // ysq_dnum = y_i^2 * dN/dx_i when needs_ysq, else dN/dx_i.
        let ysq = MPoly::y_squared(n, i);
        let bi = bit(i);
        let dnum = self.num.parts().iter().fold(YPoly::zero(n), |acc, (m, c)| {
            let dc = c.derivative(i);
            let term = if needs_ysq {
                let mut t = dc.mul(&ysq);
                if m & bi != 0 {
                    t = t.add(&c.mul(&xi));
                }
                t
            } else {
                dc
            };
            acc.add(&YPoly::from_part(*m, term))
        });

        // Logarithmic derivative of the denominator, times the same factors.
        let mut log_d = MPoly::zero(n);
        if ai > 0 {
            log_d = log_d.add(&xi.mul(&pprod).scale(&Rat::from_int(ai as i64)));
        }
        for (k, b, sign) in &pairs {
            let others = pairs
                .iter()
                .filter(|(k2, _, _)| k2 != k)
                .fold(MPoly::one(n), |acc, (k2, _, _)| acc.mul(&dpoly(*k2)));
            let mut t = others.scale(&Rat::from_int(*b as i64 * sign));
            if needs_ysq {
                t = t.mul(&ysq);
            }
            log_d = log_d.add(&t);
        }
        let num = dnum.mul_mpoly(&pprod).sub(&self.num.mul_mpoly(&log_d));
        let mut den = self.den.clone();
        if needs_ysq {
            den.add_yexp(i, 2);
        }
        for (k, _, _) in &pairs {
            den.add_diff(i, *k, 1);
        }
        RatFn::new(num, den)
    }

    /// True iff `self - other` vanishes identically.
    pub fn equal(&self, other: &RatFn) -> bool {
        self.npoints() == other.npoints() && (self == other || self.sub(other).is_zero())
    }

    /// Relabel points as in [`MPoly::remap`].
    pub fn remap(&self, new_n: usize, map: &[usize]) -> Result<RatFn> {
        if map.len() != self.npoints() || map.iter().any(|&p| p == 0 || p > new_n) {
            return Err(GbeError::InvalidArgument("bad point relabeling".into()));
        }
        let den = self.den.remap(new_n, map)?;
        let mut num = self.num.remap(new_n, map);
        if self.den.remap_sign(map) < 0 {
            num = num.neg();
        }
        Ok(RatFn::new(num, den))
    }

    /// Swap two points.
    pub fn transpose(&self, i: usize, j: usize) -> RatFn {
        let mut map: Vec<usize> = (1..=self.npoints()).collect();
        map.swap(i - 1, j - 1);
        self.remap(self.npoints(), &map).expect("transposition is a bijection")
    }

    /// Numeric value; `ys` are the chosen branch values of the `y_i`.
    pub fn eval_f64(&self, t: f64, xs: &[f64], ys: &[f64]) -> f64 {
        self.num.eval_f64(t, xs, ys) / self.den.eval_f64(xs, ys)
    }

    /// Numeric value on the branch `y_i = sqrt(x_i^2 - 4T)`.
    pub fn eval_principal(&self, t: f64, xs: &[f64]) -> f64 {
        let ys: Vec<f64> = xs.iter().map(|x| (x * x - 4.0 * t).sqrt()).collect();
        self.eval_f64(t, xs, &ys)
    }

    pub fn write_canonical(&self, out: &mut String) {
        self.num.write_canonical(out);
        out.push_str(" / ");
        self.den.write_canonical(out);
    }

    pub fn to_canonical(&self) -> String {
        let mut s = String::new();
        self.write_canonical(&mut s);
        s
    }

    /// Parse the canonical form; the input must already be reduced.
    pub fn parse_canonical(s: &str) -> Result<RatFn> {
        let (num, den) = s
            .split_once(" / ")
            .ok_or_else(|| GbeError::Parse("missing ` / ` separator".into()))?;
        let den = DenForm::parse_canonical(den.trim())?;
        let num = YPoly::parse_canonical(den.npoints(), num)?;
        let raw = RatFn { num, den };
        let f = raw.reduce();
        if f != raw {
            return Err(GbeError::Parse("rational function not in canonical form".into()));
        }
        Ok(f)
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(p, q)
    }

    fn w20() -> RatFn {
        // -(y1 y2 - x1 x2 + 4T) / (2 (x1-x2)^2 y1 y2)
        let n = 2;
        let num = RatFn::y(n, 1)
            .mul(&RatFn::y(n, 2))
            .sub(&RatFn::x(n, 1).mul(&RatFn::x(n, 2)))
            .add(&RatFn::t(n).scale(&r(4, 1)));
        num.neg()
            .scale(&r(1, 2))
            .div_diff(1, 2, 2)
            .div_y(1, 1)
            .div_y(2, 1)
    }

    #[test]
    fn relation_and_common_denominators() {
        let y1 = RatFn::y(1, 1);
        let x1 = RatFn::x(1, 1);
        assert!(y1.mul(&y1).equal(&RatFn::from_mpoly(MPoly::y_squared(1, 1))));
        let a = RatFn::one(1).scale(&r(1, 2)).div_y(1, 1);
        let b = x1.scale(&r(-1, 2)).div_y(1, 2);
        let want = y1.sub(&x1).scale(&r(1, 2)).div_y(1, 2);
        assert_eq!(a.add(&b), want);
    }

    #[test]
    fn w20_times_denominator_is_numerator() {
        let f = w20();
        let d = RatFn::from_mpoly(MPoly::diff(2, 1, 2).pow(2))
            .mul(&RatFn::y(2, 1))
            .mul(&RatFn::y(2, 2))
            .scale(&r(2, 1));
        let want = RatFn::x(2, 1)
            .mul(&RatFn::x(2, 2))
            .sub(&RatFn::t(2).scale(&r(4, 1)))
            .sub(&RatFn::y(2, 1).mul(&RatFn::y(2, 2)));
        assert!(f.mul(&d).equal(&want));
        // reduction keeps the analytically removable (x1-x2)^2
        assert_eq!(f.den().diff_exp(1, 2), 2);
        assert_eq!(f.reduce(), f);
    }

    #[test]
    fn derivatives_of_y() {
        let y = RatFn::y(1, 1);
        let dy = y.derive(1);
        assert_eq!(dy, RatFn::x(1, 1).div_y(1, 1));
        let d2 = dy.derive(1);
        assert_eq!(d2, RatFn::t(1).scale(&r(-4, 1)).div_y(1, 3));
        let f = RatFn::one(2).div_diff(1, 2, 1);
        assert_eq!(f.derive(2), RatFn::one(2).div_diff(1, 2, 2));
    }

    #[test]
    fn reduce_examples() {
        let f = RatFn::from_mpoly(MPoly::y_squared(1, 1)).div_y(1, 1);
        assert_eq!(f, RatFn::y(1, 1));
        let g = RatFn::from_mpoly(MPoly::diff(2, 1, 2))
            .mul_y(1)
            .div_diff(1, 2, 2)
            .div_y(1, 2);
        assert_eq!(g, RatFn::one(2).div_diff(1, 2, 1).div_y(1, 1));
        let inv = RatFn::one(1).div_y(1, 1);
        let alt = RatFn::y(1, 1).mul(&RatFn::one(1).div_y(1, 2));
        assert!(inv.equal(&alt));
    }

    #[test]
    fn remap_and_symmetry() {
        let f = w20();
        assert!(f.transpose(1, 2).equal(&f));
        let g = RatFn::x(2, 1).div_diff(1, 2, 1);
        let h = g.transpose(1, 2);
        assert!(h.equal(&RatFn::x(2, 2).div_diff(2, 1, 1)));
    }

    #[test]
    fn canonical_round_trip() {
        let f = w20();
        let s = f.to_canonical();
        assert_eq!(RatFn::parse_canonical(&s).unwrap(), f);
        assert!(RatFn::parse_canonical("1: 2*x1 / 1 | y:[0] | d:[]").is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let f = w20().mul(&RatFn::x(2, 1).mul_y(2));
        let (t, x) = (1.0, [3.0, 5.0]);
        for i in 1..=2 {
            let d = f.derive(i).eval_principal(t, &x);
            let h = 1e-5;
            let mut xp = x;
            let mut xm = x;
            xp[i - 1] += h;
            xm[i - 1] -= h;
            let fd = (f.eval_principal(t, &xp) - f.eval_principal(t, &xm)) / (2.0 * h);
            assert!((d - fd).abs() < 1e-6 * d.abs().max(1.0), "{d} vs {fd}");
        }
    }
}
