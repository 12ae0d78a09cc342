//! Coinciding-point limits `x_j -> x_i` by truncated Laurent expansion in
//! `eps = x_j - x_i`.

use std::collections::BTreeMap;

use crate::exact::ypoly::bit as bit_of;
use crate::exact::{DenForm, MPoly, Rat, RatFn, YPoly};
use crate::ycalc::y_taylor;
use crate::{GbeError, Result};

/// Truncated series `sum_{k=lo}^{lo+len-1} c_k eps^k` with `RatFn`
/// coefficients; terms above `order` are dropped.
#[derive(Clone, Debug)]
pub struct EpsSeries {
    pub npoints: usize,
    pub order: i64,
    pub coeffs: BTreeMap<i64, RatFn>,
}

impl EpsSeries {
    pub fn zero(npoints: usize, order: i64) -> EpsSeries {
        EpsSeries { npoints, order, coeffs: BTreeMap::new() }
    }

    pub fn from_coeffs(npoints: usize, order: i64, lo: i64, cs: Vec<RatFn>) -> EpsSeries {
        let mut s = EpsSeries::zero(npoints, order);
        for (k, c) in cs.into_iter().enumerate() {
            s.add_term(lo + k as i64, c);
        }
        s
    }

    pub fn coeff(&self, k: i64) -> RatFn {
        self.coeffs.get(&k).cloned().unwrap_or_else(|| RatFn::zero(self.npoints))
    }

    pub fn add_term(&mut self, k: i64, c: RatFn) {
        if k > self.order || c.is_zero() {
            return;
        }
        let v = match self.coeffs.remove(&k) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !v.is_zero() {
            self.coeffs.insert(k, v);
        }
    }

    pub fn add(&self, other: &EpsSeries) -> EpsSeries {
        let mut out = self.clone();
        out.order = self.order.min(other.order);
        out.coeffs.retain(|k, _| *k <= out.order);
        for (k, c) in &other.coeffs {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn mul(&self, other: &EpsSeries) -> EpsSeries {
        let lo_a = self.coeffs.keys().next().copied().unwrap_or(0);
        let lo_b = other.coeffs.keys().next().copied().unwrap_or(0);
        let order = (self.order + lo_b).min(other.order + lo_a);
        let mut out = EpsSeries::zero(self.npoints, order);
        for (ka, ca) in &self.coeffs {
            for (kb, cb) in &other.coeffs {
                if ka + kb <= order {
                    out.add_term(ka + kb, ca.mul(cb));
                }
            }
        }
        out
    }
}

/// Series of `y(x_i + eps)^e` to order `k`, for any integer `e`.
fn y_power_series(npoints: usize, i: usize, e: i64, k: usize) -> Vec<RatFn> {
    // (y^2 + 2 x eps + eps^2)^(h), h = floor(e/2), then one extra factor of
    // y(x+eps) when e is odd.
    let h = e.div_euclid(2);
    let x = RatFn::x(npoints, i);
    let two_x = x.scale(&Rat::from_int(2));
    // u = (2 x eps + eps^2) / y^2, powers u^m as polynomial series.
    let u = vec![
        RatFn::zero(npoints),
        two_x.div_y(i, 2),
        RatFn::one(npoints).div_y(i, 2),
    ];
    let mut upow: Vec<RatFn> = vec![RatFn::zero(npoints); k + 1];
    upow[0] = RatFn::one(npoints);
    let mut acc = vec![RatFn::zero(npoints); k + 1];
    let mut binom = Rat::ONE;
    let h_rat = Rat::from_int(h);
    for m in 0..=k {
        if m > 0 {
            // binom(h, m) = binom(h, m-1) * (h - m + 1) / m
            binom = &(&binom * &(&h_rat - &Rat::from_int(m as i64 - 1))) / &Rat::from_int(m as i64);
            if binom.is_zero() {
                break;
            }
            let mut next = vec![RatFn::zero(npoints); k + 1];
            for (a, ca) in upow.iter().enumerate() {
                if ca.is_zero() {
                    continue;
                }
                for (b, cb) in u.iter().enumerate().skip(1) {
                    if a + b <= k {
                        next[a + b] = next[a + b].add(&ca.mul(cb));
                    }
                }
            }
            upow = next;
        }
        for (d, c) in upow.iter().enumerate() {
            if !c.is_zero() {
                acc[d] = acc[d].add(&c.scale(&binom));
            }
        }
    }
    // multiply by y^(2h)
    let scale_y = |f: &RatFn| -> RatFn {
        if h >= 0 {
            let mut g = f.clone();
            for _ in 0..h {
                g = g.mul(&RatFn::from_mpoly(MPoly::y_squared(npoints, i)));
            }
            g
        } else {
            f.div_y(i, (-2 * h) as u32)
        }
    };
    let acc: Vec<RatFn> = acc.iter().map(scale_y).collect();
    if e.rem_euclid(2) == 0 {
        return acc;
    }
    let yt = y_taylor(npoints, i, k);
    (0..=k)
        .map(|d| {
            (0..=d).fold(RatFn::zero(npoints), |s, a| {
                if acc[a].is_zero() {
                    s
                } else {
                    s.add(&acc[a].mul(&yt[d - a]))
                }
            })
        })
        .collect()
}

/// The limit `x_j -> x_i` of `f`, on `n - 1` points (points after `j` move
/// down by one). Fails with `NonRegular` if a pole survives.
pub fn merge_pair(f: &RatFn, i: usize, j: usize) -> Result<RatFn> {
    let n = f.npoints();
    if i == j || i == 0 || j == 0 || i > n || j > n {
        return Err(GbeError::InvalidArgument(format!("cannot merge x{j} into x{i} on {n} points")));
    }
    let new_n = n - 1;
    let relabel = |p: usize| if p > j { p - 1 } else { p };
    let ni = relabel(i);
    let den = f.den();
    let b = den.diff_exp(i, j) as usize;
    let order = b;

    // Numerator, split by whether y_j is present.
    let mut with_yj: Vec<YPoly> = vec![YPoly::zero(new_n); order + 1];
    let mut without_yj: Vec<YPoly> = vec![YPoly::zero(new_n); order + 1];
    for (&mask, c) in f.num().parts() {
        let has_j = mask & bit_of(j) != 0;
        let mut new_mask = 0u16;
        for p in 1..=n {
            if p != j && mask & bit_of(p) != 0 {
                new_mask |= bit_of(relabel(p));
            }
        }
        let target = if has_j { &mut with_yj } else { &mut without_yj };
        for (k, ck) in c.shift_expand(i, j, order).into_iter().enumerate() {
            if !ck.is_zero() {
                target[k] = target[k].add(&YPoly::from_part(new_mask, ck));
            }
        }
    }
    let aj = den.yexp(j) as i64;
    let series_of = |ps: Vec<YPoly>| {
        EpsSeries::from_coeffs(new_n, order as i64, 0, ps.into_iter().map(RatFn::from_ypoly).collect())
    };
    let mut bracket = EpsSeries::zero(new_n, order as i64);
    for (ps, e) in [(without_yj, -aj), (with_yj, 1 - aj)] {
        if ps.iter().all(YPoly::is_zero) {
            continue;
        }
        let yp = EpsSeries::from_coeffs(new_n, order as i64, 0, y_power_series(new_n, ni, e, order));
        bracket = bracket.add(&series_of(ps).mul(&yp));
    }

    // Remaining denominator and the (x_k - x_j) factors.
    let mut rest_y: Vec<u32> = vec![0; new_n];
    for p in 1..=n {
        if p != j {
            rest_y[relabel(p) - 1] += den.yexp(p);
        }
    }
    let mut rest_d = BTreeMap::new();
    for (&(p, q), &e) in den.diffs() {
        if p == j || q == j {
            let k = if p == j { q } else { p };
            if k == i {
                continue;
            }
            // x_j - x_k = (x_i - x_k) + eps ; x_k - x_j = (x_k - x_i) - eps.
            let (a, c, sigma) = if p == j { (i, k, 1i64) } else { (k, i, -1i64) };
            let (a, c) = (relabel(a), relabel(c));
            let mut coeffs = Vec::with_capacity(order + 1);
            let mut binom = Rat::ONE;
            for m in 0..=order {
                if m > 0 {
                    binom = &(&binom * &Rat::from_int(-(e as i64) - m as i64 + 1)) / &Rat::from_int(m as i64);
                }
                let sign = if sigma < 0 && m % 2 == 1 { -1 } else { 1 };
                coeffs.push(
                    RatFn::constant(new_n, &binom * &Rat::from_int(sign)).div_diff(a, c, e + m as u32),
                );
            }
            bracket = bracket.mul(&EpsSeries::from_coeffs(new_n, order as i64, 0, coeffs));
        } else {
            let (a, c) = (relabel(p), relabel(q));
            *rest_d.entry((a, c)).or_insert(0) += e;
        }
    }
    for m in 0..order {
        if !bracket.coeff(m as i64).is_zero() {
            return Err(GbeError::NonRegular { i, j, order: m as i64 - order as i64 });
        }
    }
    let rest = DenForm::new(den.scalar().clone(), rest_y, rest_d)?;
    let top = bracket.coeff(order as i64);
    // (x_min - x_max)^b = (-eps)^b when i < j.
    let sign = if i < j && b % 2 == 1 { -1 } else { 1 };
    let lifted = RatFn::from_parts(top.num().clone(), top.den().mul(&rest));
    Ok(lifted.scale(&Rat::from_int(sign)))
}

/// Merge all points into the first: `f(x, x, ..., x)`.
pub fn merge_all(f: &RatFn) -> Result<RatFn> {
    let mut g = f.clone();
    for j in (2..=f.npoints()).rev() {
        g = merge_pair(&g, 1, j)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(p, q)
    }

    #[test]
    fn y_power_series_matches_products() {
        let yt = y_taylor(1, 1, 4);
        let ser = EpsSeries::from_coeffs(1, 4, 0, yt.clone());
        let sq = ser.mul(&ser);
        let p1 = y_power_series(1, 1, 2, 4);
        for k in 0..=4 {
            assert!(sq.coeff(k as i64).equal(&p1[k]), "order {k}");
        }
        let inv = y_power_series(1, 1, -1, 4);
        let prod = ser.mul(&EpsSeries::from_coeffs(1, 4, 0, inv));
        assert!(prod.coeff(0).equal(&RatFn::one(1)));
        for k in 1..=4 {
            assert!(prod.coeff(k).is_zero());
        }
        let p3 = y_power_series(1, 1, 3, 4);
        let cube = sq.mul(&ser);
        for k in 0..=4 {
            assert!(cube.coeff(k as i64).equal(&p3[k]));
        }
    }

    #[test]
    fn plain_substitution_without_pole() {
        let f = RatFn::x(2, 1).mul(&RatFn::y(2, 2)).div_y(1, 3);
        let g = merge_pair(&f, 1, 2).unwrap();
        assert!(g.equal(&RatFn::x(1, 1).div_y(1, 2)));
    }

    #[test]
    fn difference_quotient_of_y() {
        let f = RatFn::y(2, 1).sub(&RatFn::y(2, 2)).div_diff(1, 2, 1);
        let g = merge_pair(&f, 1, 2).unwrap();
        assert!(g.equal(&RatFn::x(1, 1).div_y(1, 1)));
    }

    #[test]
    fn w20_limit() {
        let n = 2;
        let f = RatFn::y(n, 1)
            .mul(&RatFn::y(n, 2))
            .sub(&RatFn::x(n, 1).mul(&RatFn::x(n, 2)))
            .add(&RatFn::t(n).scale(&r(4, 1)))
            .neg()
            .scale(&r(1, 2))
            .div_diff(1, 2, 2)
            .div_y(1, 1)
            .div_y(2, 1);
        let g = merge_pair(&f, 1, 2).unwrap();
        assert!(g.equal(&RatFn::t(1).div_y(1, 4)));
        let h = merge_pair(&f, 2, 1).unwrap();
        assert!(h.equal(&g));
    }

    #[test]
    fn singular_input_is_rejected() {
        let f = RatFn::one(2).div_diff(1, 2, 1);
        assert!(matches!(merge_pair(&f, 1, 2), Err(GbeError::NonRegular { .. })));
    }

    #[test]
    fn third_point_difference_factors() {
        // x2 -> x3 in 1/((x1-x3)(x1-x2)), then x3 is renamed x2.
        let g = RatFn::one(3).div_diff(1, 3, 1).div_diff(1, 2, 1);
        let m = merge_pair(&g, 3, 2).unwrap();
        assert!(m.equal(&RatFn::one(2).div_diff(1, 2, 2)));
    }
}
