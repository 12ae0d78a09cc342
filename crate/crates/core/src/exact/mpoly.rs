//! Sparse multivariate polynomials over Q in the variables `T, x1, ..., xn`.
//!
//! Monomials are packed into a `u128`: eight bits per variable exponent
//! (`T` in the lowest slot, `xn` in the highest) and the total degree in the
//! top sixteen bits. Integer comparison of packed monomials is then exactly
//! graded lexicographic order with `T < x1 < ... < xn`, and monomial
//! multiplication is integer addition.

use std::collections::BTreeMap;
use std::fmt;

use rustc_hash::FxHashMap;

use super::rat::Rat;

/// Largest supported number of marked points.
pub const MAX_POINTS: usize = 13;
const SLOT_BITS: u32 = 8;
const SLOT_MASK: u128 = 0xff;
const TOTAL_SHIFT: u32 = 112;
const MAX_EXP: u32 = 255;

pub type Mono = u128;

pub mod mono {
    use super::*;

    /// Exponent of variable `v` (0 = T, i = x_i).
    #[inline]
    pub fn exp(m: Mono, v: usize) -> u32 {
        ((m >> (SLOT_BITS * v as u32)) & SLOT_MASK) as u32
    }

    #[inline]
    pub fn total(m: Mono) -> u32 {
        (m >> TOTAL_SHIFT) as u32
    }

    #[inline]
    pub fn var(v: usize, e: u32) -> Mono {
        assert!(e <= MAX_EXP, "exponent {e} exceeds packed range");
        ((e as u128) << (SLOT_BITS * v as u32)) | ((e as u128) << TOTAL_SHIFT)
    }

    pub fn from_exps(exps: &[u32]) -> Mono {
        exps.iter().enumerate().fold(0, |m, (v, &e)| m + var(v, e))
    }

    pub fn exps(m: Mono, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|v| exp(m, v)).collect()
    }

    pub fn divides(a: Mono, b: Mono, nvars: usize) -> bool {
        (0..nvars).all(|v| exp(a, v) <= exp(b, v))
    }
}

/// Polynomial in `T, x1..xn`; terms sorted by decreasing monomial, no zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MPoly {
    n: usize,
    terms: Vec<(Mono, Rat)>,
}

impl MPoly {
    pub fn zero(n: usize) -> MPoly {
        assert!(n <= MAX_POINTS, "at most {MAX_POINTS} points supported");
        MPoly { n, terms: Vec::new() }
    }

    pub fn constant(n: usize, c: Rat) -> MPoly {
        let mut p = MPoly::zero(n);
        if !c.is_zero() {
            p.terms.push((0, c));
        }
        p
    }

    pub fn one(n: usize) -> MPoly {
        MPoly::constant(n, Rat::ONE)
    }

    pub fn t(n: usize) -> MPoly {
        MPoly::monomial(n, mono::var(0, 1), Rat::ONE)
    }

    /// The variable `x_i`, 1-based.
    pub fn x(n: usize, i: usize) -> MPoly {
        assert!(i >= 1 && i <= n, "point index {i} out of range");
        MPoly::monomial(n, mono::var(i, 1), Rat::ONE)
    }

    pub fn monomial(n: usize, m: Mono, c: Rat) -> MPoly {
        let mut p = MPoly::zero(n);
        if !c.is_zero() {
            p.terms.push((m, c));
        }
        p
    }

    /// `x_i^2 - 4T`, the square of `y_i`.
    pub fn y_squared(n: usize, i: usize) -> MPoly {
        MPoly::from_terms(
            n,
            vec![(mono::var(i, 2), Rat::ONE), (mono::var(0, 1), Rat::from_int(-4))],
        )
    }

    /// `x_i - x_j`.
    pub fn diff(n: usize, i: usize, j: usize) -> MPoly {
        MPoly::from_terms(
            n,
            vec![(mono::var(i, 1), Rat::ONE), (mono::var(j, 1), Rat::from_int(-1))],
        )
    }

    /// Build from arbitrary terms, combining duplicates and dropping zeros.
    pub fn from_terms(n: usize, mut terms: Vec<(Mono, Rat)>) -> MPoly {
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Mono, Rat)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += &c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        MPoly { n, terms: out }
    }

    fn from_map(n: usize, map: FxHashMap<Mono, Rat>) -> MPoly {
        let mut terms: Vec<(Mono, Rat)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        MPoly { n, terms }
    }

    pub fn npoints(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.n + 1
    }

    pub fn terms(&self) -> &[(Mono, Rat)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0 == 0)
    }

    pub fn constant_term(&self) -> Rat {
        match self.terms.last() {
            Some((0, c)) => c.clone(),
            _ => Rat::ZERO,
        }
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|(m, _)| mono::exp(*m, v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|(m, _)| mono::total(*m)).unwrap_or(0)
    }

    fn max_exps(&self) -> Vec<u32> {
        let mut out = vec![0; self.nvars()];
        for (m, _) in &self.terms {
            for (v, e) in out.iter_mut().enumerate() {
                *e = (*e).max(mono::exp(*m, v));
            }
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.n);
        }
        MPoly {
            n: self.n,
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.merge(other, true)
    }

    fn merge(&self, other: &MPoly, negate: bool) -> MPoly {
        assert_eq!(self.n, other.n, "polynomial context mismatch");
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push((b[j].0, if negate { -&b[j].1 } else { b[j].1.clone() }));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (*m, if negate { -c } else { c.clone() })));
        MPoly { n: self.n, terms: out }
    }

    fn check_product_range(&self, other: &MPoly) {
        let (a, b) = (self.max_exps(), other.max_exps());
        for v in 0..self.nvars() {
            assert!(
                a[v] + b[v] <= MAX_EXP,
                "exponent overflow in variable {v}: {} + {}",
                a[v],
                b[v]
            );
        }
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        assert_eq!(self.n, other.n, "polynomial context mismatch");
        if self.is_zero() || other.is_zero() {
            return MPoly::zero(self.n);
        }
        self.check_product_range(other);
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_term(*m, c);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_term(*m, c);
        }
        let mut acc: FxHashMap<Mono, Rat> =
            FxHashMap::with_capacity_and_hasher(self.terms.len() * other.terms.len() / 2, Default::default());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let p = ca * cb;
                acc.entry(ma + mb).and_modify(|c| *c += &p).or_insert(p);
            }
        }
        MPoly::from_map(self.n, acc)
    }

    /// Multiply by a single term; order is preserved so no re-sort is needed.
    pub fn mul_term(&self, m: Mono, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.n);
        }
        let me = self.max_exps();
        for (v, e) in me.iter().enumerate() {
            assert!(e + mono::exp(m, v) <= MAX_EXP, "exponent overflow in variable {v}");
        }
        MPoly {
            n: self.n,
            terms: self.terms.iter().map(|(a, ca)| (a + m, ca * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one(self.n);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative with respect to variable `v` (0 = T).
    pub fn derivative(&self, v: usize) -> MPoly {
        let unit = mono::var(v, 1);
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let e = mono::exp(*m, v);
                (e > 0).then(|| (m - unit, c * &Rat::from_int(e as i64)))
            })
            .collect();
        // Subtracting the same unit from every monomial keeps the order.
        MPoly { n: self.n, terms }
    }

    /// Positive rational content: gcd of numerators over lcm of denominators.
    pub fn content(&self) -> Rat {
        let mut it = self.terms.iter();
        let Some((_, first)) = it.next() else {
            return Rat::ONE;
        };
        it.fold(first.abs(), |g, (_, c)| g.gcd(c))
    }

    pub fn leading_coeff(&self) -> Rat {
        self.terms.first().map(|(_, c)| c.clone()).unwrap_or(Rat::ZERO)
    }

    /// Relabel points: point `p` (1-based) becomes point `map[p - 1]` in a
    /// context of `new_n` points. The map need not be injective.
    pub fn remap(&self, new_n: usize, map: &[usize]) -> MPoly {
        assert_eq!(map.len(), self.n, "remap needs one target per point");
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut out = mono::var(0, mono::exp(*m, 0));
                for (p, &target) in map.iter().enumerate() {
                    let e = mono::exp(*m, p + 1);
                    if e > 0 {
                        out += mono::var(target, e);
                    }
                }
                (out, c.clone())
            })
            .collect();
        MPoly::from_terms(new_n, terms)
    }

    /// Group terms by the exponent of variable `v`.
    pub fn coefficients_in(&self, v: usize) -> BTreeMap<u32, MPoly> {
        let mut groups: BTreeMap<u32, Vec<(Mono, Rat)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = mono::exp(*m, v);
            groups.entry(e).or_default().push((m - mono::var(v, e), c.clone()));
        }
        groups
            .into_iter()
            .map(|(e, ts)| (e, MPoly::from_terms(self.n, ts)))
            .collect()
    }

    /// Substitute `x_i -> x_j` (same context). Zero iff `(x_i - x_j)` divides.
    pub fn substitute_point(&self, i: usize, j: usize) -> MPoly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let e = mono::exp(*m, i);
                (m - mono::var(i, e) + mono::var(j, e), c.clone())
            })
            .collect();
        MPoly::from_terms(self.n, terms)
    }

    /// Remainder modulo `x_i^2 - 4T` (reduce `x_i^2 -> 4T`).
    pub fn rem_y_squared(&self, i: usize) -> MPoly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let e = mono::exp(*m, i);
                let k = e / 2;
                let base = m - mono::var(i, e) + mono::var(i, e % 2) + mono::var(0, k);
                (base, c * &Rat::from_int(4).pow(k))
            })
            .collect();
        MPoly::from_terms(self.n, terms)
    }

    /// Exact division by `x_v^m - r` where `r` does not involve `x_v`.
    /// Returns `None` when the division leaves a remainder.
    pub fn div_binomial(&self, v: usize, m: u32, r: &MPoly) -> Option<MPoly> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let mut coeffs = self.coefficients_in(v);
        let top = *coeffs.keys().next_back().unwrap();
        if top < m {
            return None;
        }
        let mut quotient: Vec<(Mono, Rat)> = Vec::new();
        let mut k = top;
        loop {
            let ck = coeffs.remove(&k).unwrap_or_else(|| MPoly::zero(self.n));
            if k < m {
                if !ck.is_zero() {
                    return None;
                }
            } else if !ck.is_zero() {
                // q_{k-m} = c_k; it feeds c_{k-m} += r * q_{k-m}.
                let q = ck;
                let lower = k - m;
                let feed = q.mul(r);
                let slot = coeffs.entry(lower).or_insert_with(|| MPoly::zero(self.n));
                *slot = slot.add(&feed);
                let shift = mono::var(v, lower);
                quotient.extend(q.terms.into_iter().map(|(mm, c)| (mm + shift, c)));
            }
            if k == 0 {
                break;
            }
            k -= 1;
        }
        Some(MPoly::from_terms(self.n, quotient))
    }

    /// Exact division by `x_i - x_j`, if it divides.
    pub fn div_diff(&self, i: usize, j: usize) -> Option<MPoly> {
        if !self.substitute_point(i, j).is_zero() {
            return None;
        }
        let r = MPoly::x(self.n, j);
        let q = self.div_binomial(i, 1, &r);
        debug_assert!(q.is_some());
        q
    }

    /// Exact division by `x_i^2 - 4T`, if it divides.
    pub fn div_y_squared(&self, i: usize) -> Option<MPoly> {
        if !self.rem_y_squared(i).is_zero() {
            return None;
        }
        let r = MPoly::monomial(self.n, mono::var(0, 1), Rat::from_int(4));
        let q = self.div_binomial(i, 2, &r);
        debug_assert!(q.is_some());
        q
    }

    /// Taylor-shift `x_j = x_i + eps`, dropping point `j` from the context.
    /// Returns the coefficients of `eps^0 .. eps^order` in the `n - 1` point
    /// context, where points above `j` move down by one.
    pub fn shift_expand(&self, i: usize, j: usize, order: usize) -> Vec<MPoly> {
        assert!(i != j && i >= 1 && j >= 1 && i <= self.n && j <= self.n);
        let new_n = self.n - 1;
        let relabel = |p: usize| if p > j { p - 1 } else { p };
        let target_i = relabel(i);
        let mut buckets: Vec<Vec<(Mono, Rat)>> = vec![Vec::new(); order + 1];
        for (m, c) in &self.terms {
            let mut base = mono::var(0, mono::exp(*m, 0));
            for p in 1..=self.n {
                if p == j {
                    continue;
                }
                let e = mono::exp(*m, p);
                if e > 0 {
                    base += mono::var(relabel(p), e);
                }
            }
            let ej = mono::exp(*m, j);
            for (k, bucket) in buckets.iter_mut().enumerate().take(ej.min(order as u32) as usize + 1) {
                let coef = c * &Rat::binomial(ej as u64, k as u64);
                bucket.push((base + mono::var(target_i, ej - k as u32), coef));
            }
        }
        buckets.into_iter().map(|ts| MPoly::from_terms(new_n, ts)).collect()
    }

    pub fn eval_f64(&self, t: f64, xs: &[f64]) -> f64 {
        assert_eq!(xs.len(), self.n);
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = c.to_f64() * t.powi(mono::exp(*m, 0) as i32);
                for (p, x) in xs.iter().enumerate() {
                    v *= x.powi(mono::exp(*m, p + 1) as i32);
                }
                v
            })
            .sum()
    }

    pub fn eval_rat(&self, t: &Rat, xs: &[Rat]) -> Rat {
        assert_eq!(xs.len(), self.n);
        let mut acc = Rat::ZERO;
        for (m, c) in &self.terms {
            let mut v = c * &t.pow(mono::exp(*m, 0));
            for (p, x) in xs.iter().enumerate() {
                v = &v * &x.pow(mono::exp(*m, p + 1));
            }
            acc += &v;
        }
        acc
    }

    /// Canonical text: `coef*T^a*x1^b` terms joined by ` + `, `0` if empty.
    pub fn write_canonical(&self, out: &mut String) {
        if self.terms.is_empty() {
            out.push('0');
            return;
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                out.push_str(" + ");
            }
            out.push_str(&c.to_string());
            for v in 0..self.nvars() {
                let e = mono::exp(*m, v);
                if e == 0 {
                    continue;
                }
                if v == 0 {
                    out.push_str("*T");
                } else {
                    out.push_str(&format!("*x{v}"));
                }
                if e > 1 {
                    out.push_str(&format!("^{e}"));
                }
            }
        }
    }

    pub fn parse_canonical(n: usize, s: &str) -> crate::Result<MPoly> {
        use crate::GbeError;
        let s = s.trim();
        if s == "0" {
            return Ok(MPoly::zero(n));
        }
        let mut terms = Vec::new();
        for term in s.split(" + ") {
            let mut parts = term.split('*');
            let coef: Rat = parts
                .next()
                .ok_or_else(|| GbeError::Parse("empty term".into()))?
                .parse()?;
            let mut m: Mono = 0;
            for factor in parts {
                let (name, e) = match factor.split_once('^') {
                    Some((name, e)) => (
                        name,
                        e.parse::<u32>()
                            .map_err(|_| GbeError::Parse(format!("bad exponent in `{factor}`")))?,
                    ),
                    None => (factor, 1),
                };
                let v = if name == "T" {
                    0
                } else {
                    let idx = name
                        .strip_prefix('x')
                        .and_then(|d| d.parse::<usize>().ok())
                        .ok_or_else(|| GbeError::Parse(format!("unknown variable `{name}`")))?;
                    if idx == 0 || idx > n {
                        return Err(GbeError::Parse(format!("variable `{name}` out of range")));
                    }
                    idx
                };
                if e == 0 || e > MAX_EXP {
                    return Err(GbeError::Parse(format!("exponent out of range in `{factor}`")));
                }
                m += mono::var(v, e);
            }
            if coef.is_zero() {
                return Err(GbeError::Parse("zero coefficient".into()));
            }
            terms.push((m, coef));
        }
        let p = MPoly::from_terms(n, terms);
        Ok(p)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_canonical(&mut s);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> MPoly {
        MPoly::x(3, i)
    }

    #[test]
    fn grlex_order_puts_highest_point_first() {
        let p = x(1).add(&x(3)).add(&MPoly::t(3)).add(&x(2).mul(&x(2)));
        assert_eq!(p.to_string(), "1*x2^2 + 1*x3 + 1*x1 + 1*T");
    }

    #[test]
    fn canonical_text_round_trip() {
        let p = MPoly::parse_canonical(3, "3/2*T^2*x1*x3^4 + -7*x2 + 5").unwrap();
        let s = p.to_string();
        assert_eq!(MPoly::parse_canonical(3, &s).unwrap(), p);
        assert!(MPoly::parse_canonical(2, "1*x3").is_err());
    }

    #[test]
    fn exact_division_by_diff_and_y_squared() {
        let d = MPoly::diff(3, 1, 3);
        let q = x(2).mul(&x(1)).add(&MPoly::t(3));
        let p = d.mul(&d).mul(&q);
        assert_eq!(p.div_diff(1, 3).unwrap().div_diff(1, 3).unwrap(), q);
        assert!(q.div_diff(1, 3).is_none());
        let ys = MPoly::y_squared(3, 2);
        let p = ys.mul(&q);
        assert_eq!(p.div_y_squared(2).unwrap(), q);
        assert!(q.div_y_squared(2).is_none());
    }

    #[test]
    fn shift_expand_is_taylor() {
        // x2^2 * x1 with x2 = x1 + eps -> x1^3 + 2 x1^2 eps + x1 eps^2
        let p = x(2).mul(&x(2)).mul(&x(1));
        let s = p.shift_expand(1, 2, 3);
        let y = |e| MPoly::monomial(2, mono::var(1, e), Rat::ONE);
        assert_eq!(s[0], y(3));
        assert_eq!(s[1], y(2).scale(&Rat::from_int(2)));
        assert_eq!(s[2], y(1));
        assert!(s[3].is_zero());
        // x3 relabels to x2 once x2 is dropped
        let q = x(3).shift_expand(1, 2, 0);
        assert_eq!(q[0], MPoly::x(2, 2));
    }

    #[test]
    fn derivative_and_content() {
        let p = MPoly::parse_canonical(2, "6*T*x1^3 + 4*x2").unwrap();
        assert_eq!(p.derivative(1).to_string(), "18*T*x1^2");
        assert_eq!(p.content(), Rat::from_int(2));
    }
}
