//! Structure of coinciding-point functions: each hbar part written as
//! `P_odd / y^(m-1) + P_even / y^m` with `m = 5n + 3g - 6`, plus degree,
//! parity, leading-coefficient and large-x checks.

use serde::Serialize;

use crate::exact::{mono, DenForm, MPoly, Rat, RatFn, YPoly};
use crate::moments::expand_inf;
use crate::solver::CorrFn;
use crate::{GbeError, Result};

/// One polynomial slot `P_{n,j}^(g)` at `y^exponent`.
#[derive(Clone, Debug, Serialize)]
pub struct Slot {
    pub j: usize,
    pub exponent: i64,
    #[serde(serialize_with = "ser_poly")]
    pub poly: MPoly,
    pub degree: Option<u32>,
    pub expected_degree: i64,
    pub parity_ok: bool,
    #[serde(serialize_with = "ser_poly")]
    pub leading: MPoly,
}

fn ser_poly<S: serde::Serializer>(p: &MPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

impl Slot {
    fn new(j: usize, exponent: i64, poly: MPoly, expected_degree: i64) -> Slot {
        let coeffs = poly.coefficients_in(1);
        let degree = coeffs.keys().next_back().copied();
        let leading = degree.map(|d| coeffs[&d].clone()).unwrap_or_else(|| MPoly::zero(1));
        let parity_ok = degree.is_none_or(|d| coeffs.keys().all(|k| (d - k) % 2 == 0));
        Slot { j, exponent, poly, degree, expected_degree, parity_ok, leading }
    }

    pub fn degree_ok(&self) -> bool {
        self.degree.map(i64::from) == Some(self.expected_degree)
    }
}

/// Slots of the hbar^(g-2r) part.
#[derive(Clone, Debug, Serialize)]
pub struct PartSlots {
    pub r: usize,
    pub hbar_power: usize,
    /// Absent for the `hbar^0` part when g is even.
    pub odd: Option<Slot>,
    pub even: Slot,
    /// Order of the first nonzero `1/x` coefficient.
    pub asymptotic_order: Option<i64>,
}

impl PartSlots {
    pub fn leading_opposite(&self) -> bool {
        match &self.odd {
            Some(o) => o.leading.add(&self.even.leading).is_zero(),
            None => true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StructReport {
    pub n: usize,
    pub g: usize,
    pub exponent_odd: i64,
    pub exponent_even: i64,
    pub parts: Vec<PartSlots>,
    /// Every part fits `P_odd/y^(m-1) + P_even/y^m` with polynomial slots.
    pub shape_ok: bool,
    pub degrees_ok: bool,
    pub parity_ok: bool,
    pub leading_ok: bool,
    /// Recombined slots reproduce the input.
    pub roundtrip_ok: bool,
    pub expected_order: i64,
    pub asymptotic_order: Option<i64>,
    pub asymptotic_ok: bool,
}

impl StructReport {
    pub fn passed(&self) -> bool {
        self.shape_ok
            && self.degrees_ok
            && self.parity_ok
            && self.leading_ok
            && self.roundtrip_ok
            && self.asymptotic_ok
    }
}

pub fn exponent(n: usize, g: usize) -> i64 {
    5 * n as i64 + 3 * g as i64 - 6
}

/// `(P_odd, P_even)` with `f = P_odd / y^(m-1) + P_even / y^m`.
pub fn decompose_part(f: &RatFn, m: i64) -> Result<(MPoly, MPoly)> {
    if f.npoints() != 1 || f.den().has_diffs() {
        return Err(GbeError::NotConjectureShape("not a one-point function of y".into()));
    }
    let a = f.den().yexp(1) as i64;
    if a > m {
        return Err(GbeError::NotConjectureShape(format!("denominator y^{a} exceeds y^{m}")));
    }
    let mut num = f.num().scale(&f.den().scalar().recip());
    for _ in 0..m - a {
        num = num.mul_y(1);
    }
    let (pa, pb) = num.split(1);
    let get = |p: YPoly| p.part(0).cloned().unwrap_or_else(|| MPoly::zero(1));
    Ok((get(pb), get(pa)))
}

fn recombine(odd: &MPoly, even: &MPoly, m: i64) -> Result<RatFn> {
    let num = YPoly::from_mpoly(even.clone()).add(&YPoly::from_mpoly(odd.clone()).mul_y(1));
    let den = DenForm::new(Rat::ONE, vec![m as u32], Default::default())?;
    Ok(RatFn::new(num, den))
}

/// Slot decomposition of every hbar part of a coinciding-point function.
pub fn decompose(w: &CorrFn, n: usize, g: usize) -> Result<Vec<(MPoly, MPoly)>> {
    if (n, g) == (1, 0) {
        return Err(GbeError::InvalidArgument("W_1^(0) has no slot structure".into()));
    }
    let m = exponent(n, g);
    w.parts.iter().map(|p| decompose_part(p, m)).collect()
}

/// All structural checks on `W_n^(g)(x, ..., x)`, given as a one-point `CorrFn`.
pub fn check_structure(w: &CorrFn, n: usize, g: usize) -> Result<StructReport> {
    if w.n != 1 {
        return Err(GbeError::InvalidArgument("expected a coinciding-point function".into()));
    }
    let m = exponent(n, g);
    let (ni, gi) = (n as i64, g as i64);
    let expected_order = 3 * ni + 2 * gi - 2;
    let mut parts = Vec::new();
    let mut shape_ok = true;
    let mut roundtrip_ok = true;
    for (r, f) in w.parts.iter().enumerate() {
        let series = expand_inf(f, expected_order + 4)?;
        let asymptotic_order = series.first_nonzero();
        let tail = g % 2 == 0 && 2 * r == g;
        let (odd, even) = match decompose_part(f, m) {
            Ok(pair) => pair,
            Err(_) => {
                shape_ok = false;
                continue;
            }
        };
        match recombine(&odd, &even, m) {
            Ok(back) if back.equal(f) => {}
            _ => roundtrip_ok = false,
        }
        let (odd_slot, even_slot) = if tail {
            if !odd.is_zero() {
                shape_ok = false;
            }
            (None, Slot::new(g + 1, m, even, 2 * ni + gi - 4))
        } else {
            (
                Some(Slot::new(2 * r + 1, m - 1, odd, 2 * ni + gi - 3)),
                Slot::new(2 * r + 2, m, even, 2 * ni + gi - 2),
            )
        };
        parts.push(PartSlots {
            r,
            hbar_power: g - 2 * r,
            odd: odd_slot,
            even: even_slot,
            asymptotic_order,
        });
    }
    let slots = || parts.iter().flat_map(|p| p.odd.iter().chain(std::iter::once(&p.even)));
    let degrees_ok = shape_ok && slots().all(Slot::degree_ok);
    let parity_ok = shape_ok && slots().all(|s| s.parity_ok);
    let leading_ok = shape_ok && parts.iter().all(PartSlots::leading_opposite);
    let asymptotic_order = parts.iter().filter_map(|p| p.asymptotic_order).min();
    Ok(StructReport {
        n,
        g,
        exponent_odd: m - 1,
        exponent_even: m,
        asymptotic_ok: asymptotic_order == Some(expected_order),
        parts,
        shape_ok,
        degrees_ok,
        parity_ok,
        leading_ok,
        roundtrip_ok,
        expected_order,
        asymptotic_order,
    })
}

/// First nonzero order of `W_n^(g)(x, ..., x)` at `x = infinity`, looking up
/// to `3n + 2g + 2`.
pub fn check_asymptotic(w: &CorrFn, n: usize, g: usize) -> Result<Option<i64>> {
    let order = 3 * n as i64 + 2 * g as i64 + 2;
    let mut first: Option<i64> = None;
    for p in &w.parts {
        if let Some(k) = expand_inf(p, order)?.first_nonzero() {
            first = Some(first.map_or(k, |f| f.min(k)));
        }
    }
    Ok(first)
}

/// `lim_{x -> oo} x^2 W_n^(g)(x, x_2..x_n) = -sum_i d/dx_i W_{n-1}^(g)(x_2..x_n)`
/// for every hbar part. `wn` and `wn1` are the full multivariate functions.
pub fn check_x2_relation(wn: &CorrFn, wn1: &CorrFn) -> Result<bool> {
    let n = wn.n;
    if n < 2 || wn1.n != n - 1 || wn1.g != wn.g {
        return Err(GbeError::InvalidArgument("need W_n^(g) and W_(n-1)^(g), n >= 2".into()));
    }
    let x2 = MPoly::x(n, 1).pow(2);
    let shift: Vec<usize> = (2..=n).collect();
    for (a, b) in wn.parts.iter().zip(&wn1.parts) {
        let mut d = a.mul_mpoly(&x2);
        let moved = b.remap(n, &shift)?;
        for i in 2..=n {
            d = d.add(&moved.derive(i));
        }
        if !vanishes_at_infinity(&d, 1) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `f -> 0` as `x_i -> infinity` with the other points fixed.
///
/// The denominator grows exactly like `x_i^(a + sum b)`. The numerator
/// `A + B y_i` is expanded with `y_i = sum_k c_k T^k x_i^(1-2k)`, and every
/// coefficient of `x_i^j`, `j >= a + sum b`, must vanish.
pub fn vanishes_at_infinity(f: &RatFn, i: usize) -> bool {
    if f.is_zero() {
        return true;
    }
    let n = f.npoints();
    let den = f.den();
    let growth = den.yexp(i) as i64
        + den.diffs().iter().filter(|((p, q), _)| *p == i || *q == i).map(|(_, b)| *b as i64).sum::<i64>();
    let (pa, pb) = f.num().split(i);
    let by_degree = |p: &YPoly| -> std::collections::BTreeMap<i64, YPoly> {
        let mut out: std::collections::BTreeMap<i64, YPoly> = Default::default();
        for (mask, poly) in p.parts() {
            for (e, c) in poly.coefficients_in(i) {
                let term = YPoly::from_part(*mask, c);
                let slot = out.entry(e as i64).or_insert_with(|| YPoly::zero(n));
                *slot = slot.add(&term);
            }
        }
        out
    };
    let a = by_degree(&pa);
    let b = by_degree(&pb);
    let top = a.keys().chain(b.keys().map(|k| k)).map(|&k| k + 1).max().unwrap_or(0);
    // c_k = binom(1/2, k) (-4)^k
    let half = Rat::new(1, 2);
    let ck = |k: i64| -> Rat {
        let mut acc = Rat::ONE;
        for j in 0..k {
            acc = &(&acc * &(&half - &Rat::from_int(j))) / &Rat::from_int(j + 1);
        }
        &acc * &Rat::from_int(-4).pow(k as u32)
    };
    let t_pow = |k: i64| MPoly::monomial(n, mono::var(0, k as u32), Rat::ONE);
    for j in growth..=top {
        let mut c = a.get(&j).cloned().unwrap_or_else(|| YPoly::zero(n));
        for (&e, bc) in &b {
            // B_e x^e * c_k T^k x^(1-2k) lands on x^j when e + 1 - 2k = j.
            let twice_k = e + 1 - j;
            if twice_k >= 0 && twice_k % 2 == 0 {
                let k = twice_k / 2;
                c = c.add(&bc.mul_mpoly(&t_pow(k)).scale(&ck(k)));
            }
        }
        if !c.is_zero() {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr;
    use crate::jets::JetEngine;
    use crate::solver::{base_w1_0, Engine};

    fn one_point(parts: &[&str], g: usize) -> CorrFn {
        CorrFn { n: 1, g, parts: parts.iter().map(|s| expr::parse(1, s).unwrap()).collect() }
    }

    #[test]
    fn decompose_w11() {
        let w = one_point(&["1/(2y) - x/(2y^2)"], 1);
        let s = decompose(&w, 1, 1).unwrap();
        assert_eq!(s[0].0, expr::parse_poly(1, "1/2").unwrap());
        assert_eq!(s[0].1, expr::parse_poly(1, "-x/2").unwrap());
    }

    #[test]
    fn decompose_w40() {
        let w = one_point(&["24T(3x^4 + 18T x^2 + 8T^2)/y^14"], 0);
        let r = check_structure(&w, 4, 0).unwrap();
        assert_eq!(r.exponent_even, 14);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn w21_slots() {
        let jets = JetEngine::new();
        let r = check_structure(&jets.coinciding(2, 1).unwrap(), 2, 1).unwrap();
        let p = &r.parts[0];
        let odd = p.odd.as_ref().unwrap();
        assert_eq!((odd.degree, p.even.degree), (Some(2), Some(3)));
        assert_eq!(odd.leading, MPoly::constant(1, Rat::new(1, 2)));
        assert_eq!(p.even.leading, MPoly::constant(1, Rat::new(-1, 2)));
        assert!(r.passed());
    }

    #[test]
    fn w31_and_w12() {
        let jets = JetEngine::new();
        let r = check_structure(&jets.coinciding(3, 1).unwrap(), 3, 1).unwrap();
        assert_eq!((r.exponent_odd, r.exponent_even), (11, 12));
        let p = &r.parts[0];
        assert_eq!(p.odd.as_ref().unwrap().leading, MPoly::constant(1, Rat::from_int(3)));
        assert_eq!(r.asymptotic_order, Some(9));
        assert!(r.passed());

        let r = check_structure(&jets.coinciding(1, 2).unwrap(), 1, 2).unwrap();
        assert_eq!(r.parts[0].odd.as_ref().unwrap().poly, expr::parse_poly(1, "-x").unwrap());
        assert_eq!(r.parts[0].even.poly, expr::parse_poly(1, "x^2 + T").unwrap());
        assert_eq!(r.parts[1].even.poly, expr::parse_poly(1, "T").unwrap());
        assert_eq!(r.parts[1].even.expected_degree, 0);
        assert!(r.passed());
    }

    #[test]
    fn asymptotic_orders() {
        let jets = JetEngine::new();
        assert_eq!(check_asymptotic(&jets.coinciding(1, 1).unwrap(), 1, 1).unwrap(), Some(3));
        assert_eq!(check_asymptotic(&jets.coinciding(2, 0).unwrap(), 2, 0).unwrap(), Some(4));
    }

    #[test]
    fn rejects_non_y_denominator() {
        let f = expr::parse(2, "1/(x1 - x2)").unwrap();
        assert!(decompose_part(&f, 3).is_err());
        let f = expr::parse(1, "1/y^9").unwrap();
        assert!(decompose_part(&f, 4).is_err());
    }

    #[test]
    fn x2_relation_small() {
        let e = Engine::new();
        assert!(check_x2_relation(&e.solve(2, 0).unwrap(), &base_w1_0()).unwrap());
        assert!(check_x2_relation(&e.solve(3, 0).unwrap(), &e.solve(2, 0).unwrap()).unwrap());
        assert!(check_x2_relation(&e.solve(2, 1).unwrap(), &e.solve(1, 1).unwrap()).unwrap());
        // A wrong partner must be caught.
        assert!(!check_x2_relation(&e.solve(2, 2).unwrap(), &e.solve(1, 2).unwrap().map(|p| Ok(p.scale(&Rat::from_int(2)))).unwrap()).unwrap());
    }

    #[test]
    fn infinity_test_sees_cancellation() {
        // x - y = 4T/(x + y) -> 0 although each term grows.
        let f = expr::parse(1, "x - y").unwrap();
        assert!(vanishes_at_infinity(&f, 1));
        let f = expr::parse(1, "x + y").unwrap();
        assert!(!vanishes_at_infinity(&f, 1));
        let f = expr::parse(2, "x1 x2/(x1 - x2)").unwrap();
        assert!(!vanishes_at_infinity(&f, 1));
        let f = expr::parse(2, "x2/((x1 - x2) y1)").unwrap();
        assert!(vanishes_at_infinity(&f, 1));
    }
}
