//! One-point functions `(A + B y) / y^m` with `T = 1`.
//!
//! Every coinciding-point coefficient is homogeneous (x, y of weight 1, T of
//! weight 2), so T can be dropped during computation and restored at the end.

use std::fmt;

use crate::exact::{mono, DenForm, MPoly, Rat, RatFn, YPoly};
use crate::{GbeError, Result};

/// Dense univariate polynomial in x over Q, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UPoly(Vec<Rat>);

impl UPoly {
    pub fn zero() -> UPoly {
        UPoly(Vec::new())
    }

    pub fn constant(c: Rat) -> UPoly {
        UPoly::from_coeffs(vec![c])
    }

    pub fn x() -> UPoly {
        UPoly(vec![Rat::ZERO, Rat::ONE])
    }

    /// `x^2 - 4`.
    pub fn y_squared() -> UPoly {
        UPoly(vec![Rat::from_int(-4), Rat::ZERO, Rat::ONE])
    }

    pub fn from_coeffs(mut c: Vec<Rat>) -> UPoly {
        while c.last().is_some_and(Rat::is_zero) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.0.get(k).cloned().unwrap_or(Rat::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Rat {
        self.0.last().cloned().unwrap_or(Rat::ZERO)
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let (long, short) = if self.0.len() >= o.0.len() { (self, o) } else { (o, self) };
        let mut c = long.0.clone();
        for (a, b) in c.iter_mut().zip(&short.0) {
            *a += b;
        }
        UPoly::from_coeffs(c)
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> UPoly {
        UPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, s: &Rat) -> UPoly {
        if s.is_zero() {
            return UPoly::zero();
        }
        UPoly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![Rat::ZERO; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                if !b.is_zero() {
                    c[i + j] += &(a * b);
                }
            }
        }
        UPoly::from_coeffs(c)
    }

    pub fn mul_x(&self) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        let mut c = Vec::with_capacity(self.0.len() + 1);
        c.push(Rat::ZERO);
        c.extend(self.0.iter().cloned());
        UPoly(c)
    }

    /// Multiply by `x^2 - 4`.
    pub fn mul_y_squared(&self) -> UPoly {
        let shifted = self.mul_x().mul_x();
        shifted.sub(&self.scale(&Rat::from_int(4)))
    }

    /// Exact division by `x^2 - 4`, `None` when it does not divide.
    pub fn div_y_squared(&self) -> Option<UPoly> {
        if self.is_zero() {
            return Some(UPoly::zero());
        }
        let mut r = self.0.clone();
        let d = r.len();
        if d < 3 {
            return None;
        }
        let mut q = vec![Rat::ZERO; d - 2];
        for k in (2..d).rev() {
            let c = std::mem::take(&mut r[k]);
            if c.is_zero() {
                continue;
            }
            r[k - 2] += &(&c * &Rat::from_int(4));
            q[k - 2] = c;
        }
        (r[0].is_zero() && r[1].is_zero()).then(|| UPoly::from_coeffs(q))
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::from_coeffs(
            self.0.iter().enumerate().skip(1).map(|(k, c)| c * &Rat::from_int(k as i64)).collect(),
        )
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::ZERO;
        for c in self.0.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }
}

/// `(a + b*y) / y^m` at `T = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OnePt {
    pub a: UPoly,
    pub b: UPoly,
    pub m: u32,
}

impl OnePt {
    pub fn zero() -> OnePt {
        OnePt { a: UPoly::zero(), b: UPoly::zero(), m: 0 }
    }

    pub fn constant(c: Rat) -> OnePt {
        OnePt { a: UPoly::constant(c), b: UPoly::zero(), m: 0 }
    }

    pub fn x() -> OnePt {
        OnePt { a: UPoly::x(), b: UPoly::zero(), m: 0 }
    }

    pub fn y() -> OnePt {
        OnePt { a: UPoly::zero(), b: UPoly::constant(Rat::ONE), m: 0 }
    }

    /// `1 / y^k`.
    pub fn inv_y(k: u32) -> OnePt {
        OnePt { a: UPoly::constant(Rat::ONE), b: UPoly::zero(), m: k }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Multiply numerator by `y^k` keeping the value, i.e. raise `m` by `k`.
    fn raise(&self, k: u32) -> OnePt {
        let (mut a, mut b) = (self.a.clone(), self.b.clone());
        for _ in 0..k / 2 {
            a = a.mul_y_squared();
            b = b.mul_y_squared();
        }
        if k % 2 == 1 {
            let na = b.mul_y_squared();
            b = a;
            a = na;
        }
        OnePt { a, b, m: self.m + k }
    }

    pub fn add(&self, o: &OnePt) -> OnePt {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let m = self.m.max(o.m);
        let p = self.raise(m - self.m);
        let q = o.raise(m - o.m);
        OnePt { a: p.a.add(&q.a), b: p.b.add(&q.b), m }.trimmed()
    }

    pub fn sub(&self, o: &OnePt) -> OnePt {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> OnePt {
        OnePt { a: self.a.neg(), b: self.b.neg(), m: self.m }
    }

    pub fn scale(&self, s: &Rat) -> OnePt {
        OnePt { a: self.a.scale(s), b: self.b.scale(s), m: self.m }.trimmed()
    }

    pub fn mul(&self, o: &OnePt) -> OnePt {
        if self.is_zero() || o.is_zero() {
            return OnePt::zero();
        }
        let a = self.a.mul(&o.a).add(&self.b.mul(&o.b).mul_y_squared());
        let b = self.a.mul(&o.b).add(&self.b.mul(&o.a));
        OnePt { a, b, m: self.m + o.m }
    }

    /// `d/dx`, using `y' = x / y`.
    pub fn derive(&self) -> OnePt {
        let m = Rat::from_int(self.m as i64);
        let a = self.a.derivative().mul_y_squared().sub(&self.a.mul_x().scale(&m));
        let b = self
            .b
            .derivative()
            .mul_y_squared()
            .add(&self.b.mul_x())
            .sub(&self.b.mul_x().scale(&m));
        OnePt { a, b, m: self.m + 2 }.reduced()
    }

    fn trimmed(self) -> OnePt {
        if self.is_zero() {
            OnePt::zero()
        } else {
            self
        }
    }

    /// Cancel powers of y while the value allows it.
    pub fn reduced(mut self) -> OnePt {
        if self.is_zero() {
            return OnePt::zero();
        }
        while self.m > 0 {
            match self.a.div_y_squared() {
                Some(q) => {
                    self = OnePt { a: self.b, b: q, m: self.m - 1 };
                }
                None => break,
            }
        }
        self
    }

    /// Restore `T` in a value of the given weight (x, y weight 1, T weight 2).
    pub fn to_ratfn(&self, weight: i64) -> Result<RatFn> {
        let r = self.clone().reduced();
        let mut terms = Vec::new();
        let mut yterms = Vec::new();
        for (poly, shift, out) in [(&r.a, 0i64, &mut terms), (&r.b, 1, &mut yterms)] {
            for (k, c) in poly.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let twice = weight - k as i64 - shift + r.m as i64;
                if twice < 0 || twice % 2 != 0 {
                    return Err(GbeError::InvalidArgument(format!(
                        "one-point value is not homogeneous of weight {weight}"
                    )));
                }
                out.push((mono::from_exps(&[(twice / 2) as u32, k as u32]), c.clone()));
            }
        }
        let num = YPoly::from_mpoly(MPoly::from_terms(1, terms))
            .add(&YPoly::from_mpoly(MPoly::from_terms(1, yterms)).mul_y(1));
        let den = DenForm::new(Rat::ONE, vec![r.m], Default::default())?;
        Ok(RatFn::new(num, den))
    }

    /// Set `T = 1` in a one-point function.
    pub fn from_ratfn(f: &RatFn) -> Result<OnePt> {
        if f.npoints() != 1 || f.den().has_diffs() {
            return Err(GbeError::InvalidArgument("not a one-point function".into()));
        }
        let (a, b) = f.num().split(1);
        let flat = |p: &YPoly| -> UPoly {
            let mut c: Vec<Rat> = Vec::new();
            for part in p.parts().values() {
                for (mo, v) in part.terms() {
                    let k = mono::exp(*mo, 1) as usize;
                    if c.len() <= k {
                        c.resize(k + 1, Rat::ZERO);
                    }
                    c[k] += v;
                }
            }
            UPoly::from_coeffs(c)
        };
        let s = f.den().scalar().recip();
        Ok(OnePt { a: flat(&a).scale(&s), b: flat(&b).scale(&s), m: f.den().yexp(1) }.reduced())
    }

    pub fn equal(&self, o: &OnePt) -> bool {
        self.sub(o).reduced().is_zero()
    }
}

impl fmt::Display for OnePt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: &UPoly| {
            let terms: Vec<String> = p
                .coeffs()
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| format!("{c}*x^{k}"))
                .collect();
            if terms.is_empty() { "0".to_string() } else { terms.join(" + ") }
        };
        write!(f, "(({}) + ({})*y)/y^{}", show(&self.a), show(&self.b), self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr;

    #[test]
    fn y_relation_and_division() {
        let y = OnePt::y();
        let yy = y.mul(&y);
        assert!(yy.equal(&OnePt { a: UPoly::y_squared(), b: UPoly::zero(), m: 0 }));
        let q = OnePt { a: UPoly::y_squared(), b: UPoly::zero(), m: 1 }.reduced();
        assert_eq!(q, OnePt::y());
        assert!(UPoly::x().div_y_squared().is_none());
    }

    #[test]
    fn derivatives_of_y() {
        let d1 = OnePt::y().derive();
        assert!(d1.equal(&OnePt { a: UPoly::x(), b: UPoly::zero(), m: 1 }));
        let d2 = d1.derive();
        assert!(d2.equal(&OnePt::inv_y(3).scale(&Rat::from_int(-4))));
    }

    #[test]
    fn restores_t() {
        let f = expr::parse(1, "(x^2 + T)/y^5 - x/y^4").unwrap();
        let p = OnePt::from_ratfn(&f).unwrap();
        assert!(p.to_ratfn(-3).unwrap().equal(&f));
        assert!(p.to_ratfn(-2).is_err());
    }
}
