//! Closed recursions for the extreme hbar coefficients of `W_1^(g)` and
//! `W_2^(g)(x, x)`, at the level of functions and of slot polynomials.
//!
//! `w10[g]` is the `hbar^g` part of `W_1^(g)`, `w12[g]` its `hbar^(g-2)` part
//! and `w20[g]` the `hbar^g` part of `W_2^(g)(x, x)`. Slot polynomials follow
//! `w10 = P11/y^(3g-2) + P12/y^(3g-1)`, `w20 = P21/y^(3g+3) + P22/y^(3g+4)`,
//! `w12 = P13/y^(3g-2) + P14/y^(3g-1)`.

use serde::Serialize;

use crate::conjecture::decompose_part;
use crate::exact::{MPoly, Rat, RatFn};
use crate::expr;
use crate::onepoint::UPoly;
use crate::solver::CorrFn;
use crate::Result;

/// The three function chains up to some `g_max`; `w12[0]` and `w10[0]` are
/// placeholders (zero and `W_1^(0)`).
#[derive(Clone, Debug)]
pub struct Chains {
    pub w10: Vec<RatFn>,
    pub w20: Vec<RatFn>,
    pub w12: Vec<RatFn>,
}

fn parse1(s: &str) -> RatFn {
    expr::parse(1, s).expect("static formula")
}

impl Chains {
    pub fn up_to(g_max: usize) -> Chains {
        let half = Rat::new(1, 2);
        let two = Rat::from_int(2);
        let mut w10 = vec![parse1("(x - y)/2"), parse1("1/(2y) - x/(2y^2)")];
        for g in 2..=g_max {
            let mut acc = w10[g - 1].derive(1);
            for p in 1..g {
                acc = acc.add(&w10[p].mul(&w10[g - p]));
            }
            w10.push(acc.div_y(1, 1));
        }
        w10.truncate(g_max + 1);

        let mut w20 = vec![parse1("T/y^4")];
        for g in 1..=g_max {
            let mut acc = w20[g - 1].derive(1).scale(&half);
            for p in 0..g {
                acc = acc.add(&w20[p].mul(&w10[g - p]).scale(&two));
            }
            acc = acc.add(&w10[g].derive(1).derive(1).scale(&half));
            w20.push(acc.div_y(1, 1));
        }

        let mut w12 = vec![RatFn::zero(1)];
        if g_max >= 1 {
            w12.push(RatFn::zero(1));
        }
        for g in 2..=g_max {
            let mut acc = w12[g - 1].derive(1).add(&w20[g - 2]);
            for p in 2..g {
                acc = acc.add(&w12[p].mul(&w10[g - p]).scale(&two));
            }
            w12.push(acc.div_y(1, 1));
        }
        Chains { w10, w20, w12 }
    }
}

pub fn w10_rec(g: usize) -> RatFn {
    Chains::up_to(g).w10[g].clone()
}

pub fn w20_rec(g: usize) -> RatFn {
    Chains::up_to(g).w20[g].clone()
}

pub fn w12_rec(g: usize) -> RatFn {
    Chains::up_to(g).w12[g].clone()
}

/// Slot pair `(P_odd, P_even)` with their leading coefficients in x.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PPair {
    pub g: usize,
    #[serde(serialize_with = "ser_poly")]
    pub p1: MPoly,
    #[serde(serialize_with = "ser_poly")]
    pub p2: MPoly,
}

fn ser_poly<S: serde::Serializer>(p: &MPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

fn leading(p: &MPoly) -> MPoly {
    p.coefficients_in(1).into_iter().next_back().map(|(_, c)| c).unwrap_or_else(|| MPoly::zero(1))
}

fn degree(p: &MPoly) -> Option<u32> {
    p.coefficients_in(1).keys().next_back().copied()
}

impl PPair {
    pub fn leading(&self) -> (MPoly, MPoly) {
        (leading(&self.p1), leading(&self.p2))
    }

    pub fn degrees(&self) -> (Option<u32>, Option<u32>) {
        (degree(&self.p1), degree(&self.p2))
    }

    pub fn leading_sum_zero(&self) -> bool {
        let (a, b) = self.leading();
        a.add(&b).is_zero()
    }
}

/// The slot-polynomial chains `P11..P14`, `P21`, `P22`.
#[derive(Clone, Debug)]
pub struct PolyChains {
    pub p1: Vec<PPair>,
    pub p2: Vec<PPair>,
    pub p3: Vec<PPair>,
}

struct Ops {
    x: MPoly,
    ysq: MPoly,
}

impl Ops {
    fn new() -> Ops {
        Ops { x: MPoly::x(1, 1), ysq: MPoly::y_squared(1, 1) }
    }

    fn c(&self, v: Rat) -> MPoly {
        MPoly::constant(1, v)
    }

    /// `(x^2 - 4T) p' - k x p`
    fn shift(&self, p: &MPoly, k: Rat) -> MPoly {
        self.ysq.mul(&p.derivative(1)).sub(&self.x.mul(p).scale(&k))
    }

    /// Slot of `(1/2) (h / y^a)''` times `y^(a+4)`.
    fn second(&self, h: &MPoly, a: i64) -> MPoly {
        let a_r = Rat::from_int(a);
        // a((a+1)x^2 + 4T) h - a x (x^2-4T) h' + (x^2-4T)^2 h'', halved where needed
        let t4 = MPoly::t(1).scale(&Rat::from_int(4));
        let first = self.x.mul(&self.x).scale(&Rat::from_int(a + 1)).add(&t4).scale(&a_r).mul(h);
        let mid = self.x.mul(&self.ysq).mul(&h.derivative(1)).scale(&Rat::from_int(-a));
        let last = self.ysq.mul(&self.ysq).mul(&h.derivative(1).derivative(1));
        first.scale(&Rat::new(1, 2)).add(&mid).add(&last.scale(&Rat::new(1, 2)))
    }
}

impl PolyChains {
    pub fn up_to(g_max: usize) -> PolyChains {
        let o = Ops::new();
        let half = Rat::new(1, 2);
        let two = Rat::from_int(2);
        let zero = MPoly::zero(1);
        let pair = |g, p1, p2| PPair { g, p1, p2 };

        // P11, P12; index 0 unused.
        let mut p1 = vec![pair(0, zero.clone(), zero.clone())];
        if g_max >= 1 {
            p1.push(pair(1, o.c(half.clone()), o.x.scale(&Rat::new(-1, 2))));
        }
        for g in 2..=g_max {
            let gi = g as i64;
            let prev = &p1[g - 1];
            let mut a = o.shift(&prev.p1, Rat::from_int(3 * gi - 5));
            let mut b = o.shift(&prev.p2, Rat::from_int(3 * gi - 4));
            for p in 1..g {
                let (u, v) = (&p1[p], &p1[g - p]);
                a = a.add(&u.p1.mul(&v.p2)).add(&u.p2.mul(&v.p1));
                b = b.add(&u.p2.mul(&v.p2)).add(&o.ysq.mul(&u.p1).mul(&v.p1));
            }
            p1.push(pair(g, a, b));
        }

        // P21, P22 from the seed (0, T).
        let mut p2 = vec![pair(0, zero.clone(), MPoly::t(1))];
        for g in 1..=g_max {
            let gi = g as i64;
            let prev = &p2[g - 1];
            let mut a = o.shift(&prev.p1, Rat::from_int(3 * gi)).scale(&half);
            let mut b = o.shift(&prev.p2, Rat::from_int(3 * gi + 1)).scale(&half);
            for p in 0..g {
                let (u, v) = (&p2[p], &p1[g - p]);
                a = a.add(&u.p1.mul(&v.p2).add(&u.p2.mul(&v.p1)).scale(&two));
                b = b.add(&u.p2.mul(&v.p2).add(&o.ysq.mul(&u.p1).mul(&v.p1)).scale(&two));
            }
            a = a.add(&o.second(&p1[g].p1, 3 * gi - 2));
            b = b.add(&o.second(&p1[g].p2, 3 * gi - 1));
            p2.push(pair(g, a, b));
        }

        // P13, P14 from the seed (0, 0) at g = 1.
        let mut p3 = vec![pair(0, zero.clone(), zero.clone())];
        if g_max >= 1 {
            p3.push(pair(1, zero.clone(), zero.clone()));
        }
        for g in 2..=g_max {
            let gi = g as i64;
            let prev = &p3[g - 1];
            let mut a = o.shift(&prev.p1, Rat::from_int(3 * gi - 5)).add(&p2[g - 2].p1);
            let mut b = o.shift(&prev.p2, Rat::from_int(3 * gi - 4)).add(&p2[g - 2].p2);
            for p in 2..g {
                let (u, v) = (&p3[p], &p1[g - p]);
                a = a.add(&u.p1.mul(&v.p2).add(&u.p2.mul(&v.p1)).scale(&two));
                b = b.add(&u.p2.mul(&v.p2).add(&o.ysq.mul(&u.p1).mul(&v.p1)).scale(&two));
            }
            p3.push(pair(g, a, b));
        }
        PolyChains { p1, p2, p3 }
    }
}

pub fn p11_p12(g: usize) -> PPair {
    PolyChains::up_to(g).p1[g].clone()
}

pub fn p21_p22(g: usize) -> PPair {
    PolyChains::up_to(g).p2[g].clone()
}

pub fn p13_p14(g: usize) -> PPair {
    PolyChains::up_to(g).p3[g].clone()
}

/// Both sides of the leading-coefficient identity as polynomials in g.
pub fn leading_identity_sides() -> (UPoly, UPoly) {
    let g = UPoly::x();
    let c = |v: i64| UPoly::constant(Rat::from_int(v));
    let lin = |a: i64, b: i64| g.scale(&Rat::from_int(a)).add(&c(b));
    let half = Rat::new(1, 2);
    // (3/2) g (3g-1) - (3g-1) g + (1/2) g (g-1)
    let lhs = g
        .mul(&lin(3, -1))
        .scale(&Rat::new(3, 2))
        .sub(&lin(3, -1).mul(&g))
        .add(&g.mul(&lin(1, -1)).scale(&half));
    // (1/2)(3g-2)(3g-1) - (3g-2)(g-1) + (1/2)(g-1)(g-2)
    let rhs = lin(3, -2)
        .mul(&lin(3, -1))
        .scale(&half)
        .sub(&lin(3, -2).mul(&lin(1, -1)))
        .add(&lin(1, -1).mul(&lin(1, -2)).scale(&half));
    (lhs, rhs)
}

/// The identity at a given g, and symbolically both sides equal `g(2g-1)`.
pub fn leading_identity(g: usize) -> bool {
    let (lhs, rhs) = leading_identity_sides();
    let target = UPoly::x().mul(&UPoly::x().scale(&Rat::from_int(2)).sub(&UPoly::constant(Rat::ONE)));
    let gv = Rat::from_int(g as i64);
    lhs == target && rhs == target && lhs.eval(&gv) == rhs.eval(&gv)
}

/// Per-g outcome of comparing the recursions with the loop-equation solution.
#[derive(Clone, Debug, Serialize)]
pub struct CrossRow {
    pub g: usize,
    pub w10_ok: bool,
    pub w20_ok: bool,
    pub w12_ok: bool,
    pub slots_ok: bool,
    pub leading_ok: bool,
    pub identity_ok: bool,
}

impl CrossRow {
    pub fn passed(&self) -> bool {
        self.w10_ok && self.w20_ok && self.w12_ok && self.slots_ok && self.leading_ok && self.identity_ok
    }
}

/// Compare the recursions with coinciding-point functions supplied by
/// `coinciding(n, g)` for `n = 1, 2` and `1 <= g <= g_max`.
pub fn crosscheck(
    g_max: usize,
    coinciding: impl Fn(usize, usize) -> Result<CorrFn>,
) -> Result<Vec<CrossRow>> {
    let chains = Chains::up_to(g_max);
    let polys = PolyChains::up_to(g_max);
    let mut rows = Vec::new();
    for g in 1..=g_max {
        let w1 = coinciding(1, g)?;
        let w2 = coinciding(2, g)?;
        let w10_ok = w1.coeff(g).equal(&chains.w10[g]);
        let w12_ok = if g >= 2 { w1.coeff(g - 2).equal(&chains.w12[g]) } else { chains.w12[g].is_zero() };
        let w20_ok = w2.coeff(g).equal(&chains.w20[g]);

        let m1 = 3 * g as i64 - 1;
        let m2 = 3 * g as i64 + 4;
        let slots = |f: &RatFn, m: i64, want: &PPair| -> bool {
            matches!(decompose_part(f, m), Ok((a, b)) if a == want.p1 && b == want.p2)
        };
        let mut slots_ok = slots(&chains.w10[g], m1, &polys.p1[g]) && slots(&chains.w20[g], m2, &polys.p2[g]);
        if g >= 2 {
            slots_ok &= slots(&chains.w12[g], m1, &polys.p3[g]);
        }
        let mut leading_ok = polys.p1[g].leading_sum_zero() && polys.p2[g].leading_sum_zero();
        if g >= 3 {
            leading_ok &= polys.p3[g].leading_sum_zero();
        }
        rows.push(CrossRow { g, w10_ok, w20_ok, w12_ok, slots_ok, leading_ok, identity_ok: leading_identity(g) });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> MPoly {
        expr::parse_poly(1, s).unwrap()
    }

    #[test]
    fn function_chains() {
        let c = Chains::up_to(4);
        assert!(c.w10[2].equal(&parse1("-x/y^4 + (x^2 + T)/y^5")));
        assert!(c.w10[3].equal(&parse1("5(x^2 + T)/y^7 - 5x(x^2 + 2T)/y^8")));
        assert!(c.w20[0].equal(&parse1("T/y^4")));
        assert!(c.w20[1].equal(&parse1("(x^2 + 4T)/(2y^6) - x(x^2 + 18T)/(2y^7)")));
        assert!(c.w20[2].equal(&parse1("(98T x^2 + 38T^2 + 8x^4)/y^10 - (8x^3 + 45T x)/y^9")));
        assert!(c.w12[2].equal(&parse1("T/y^5")));
        assert!(c.w12[3].equal(&parse1("(x^2 + 6T)/(2y^7) - x(x^2 + 30T)/(2y^8)")));
        assert!(c.w12[4].equal(&parse1("(23x^4 + 454T x^2 + 176T^2)/(2y^11) - (23x^3 + 180T x)/(2y^10)")));
    }

    #[test]
    fn polynomial_chains() {
        assert_eq!(p11_p12(1), PPair { g: 1, p1: p("1/2"), p2: p("-x/2") });
        assert_eq!(p11_p12(2), PPair { g: 2, p1: p("-x"), p2: p("x^2 + T") });
        assert_eq!(p11_p12(3), PPair { g: 3, p1: p("5(x^2 + T)"), p2: p("-5x(x^2 + 2T)") });
        let q = p21_p22(1);
        assert_eq!((q.p1, q.p2), (p("(x^2 + 4T)/2"), p("-x(x^2 + 18T)/2")));
        let q = p13_p14(2);
        assert_eq!((q.p1, q.p2), (p("0"), p("T")));
    }

    #[test]
    fn leading_sums_and_degrees() {
        let c = PolyChains::up_to(8);
        for g in 1..=8 {
            assert!(c.p1[g].leading_sum_zero() && c.p2[g].leading_sum_zero(), "g = {g}");
            let g32 = g as u32;
            assert_eq!(c.p1[g].degrees(), (Some(g32 - 1), Some(g32)));
            assert_eq!(c.p2[g].degrees(), (Some(g32 + 1), Some(g32 + 2)));
        }
        for g in 3..=8 {
            assert!(c.p3[g].leading_sum_zero());
            assert_eq!(c.p3[g].degrees(), (Some(g as u32 - 1), Some(g as u32)));
        }
    }

    #[test]
    fn identity() {
        assert!(leading_identity(1) && leading_identity(2) && leading_identity(7));
        let (l, _) = leading_identity_sides();
        assert_eq!(l.eval(&Rat::from_int(1)), Rat::ONE);
        assert_eq!(l.eval(&Rat::from_int(2)), Rat::from_int(6));
    }
}
