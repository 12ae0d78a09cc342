//! Expansion of one-point functions at `x = infinity` and the exact spectral
//! moments assembled from the large-N expansion.

use std::collections::BTreeMap;
use std::fmt;

use crate::exact::{mono, MPoly, Rat, RatFn};
use crate::solver::CorrFn;
use crate::{GbeError, Result};

/// Truncated Laurent series in `u = 1/x` with coefficients in `Q[T]`
/// (polynomials with no marked points). Terms above `order` are unknown.
#[derive(Clone, Debug, PartialEq)]
pub struct USeries {
    pub order: i64,
    coeffs: BTreeMap<i64, MPoly>,
}

impl USeries {
    pub fn zero(order: i64) -> USeries {
        USeries { order, coeffs: BTreeMap::new() }
    }

    pub fn coeff(&self, k: i64) -> MPoly {
        self.coeffs.get(&k).cloned().unwrap_or_else(|| MPoly::zero(0))
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, MPoly> {
        &self.coeffs
    }

    pub fn add_term(&mut self, k: i64, c: MPoly) {
        if k > self.order || c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(k).or_insert_with(|| MPoly::zero(0));
        *e = e.add(&c);
        if e.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn add(&self, o: &USeries) -> USeries {
        let mut s = USeries { order: self.order.min(o.order), coeffs: BTreeMap::new() };
        for (k, c) in self.coeffs.iter().chain(&o.coeffs) {
            s.add_term(*k, c.clone());
        }
        s
    }

    /// Product; the result is known up to the smaller of the two shifted orders.
    pub fn mul(&self, o: &USeries) -> USeries {
        let lo_a = self.coeffs.keys().next().copied().unwrap_or(self.order);
        let lo_b = o.coeffs.keys().next().copied().unwrap_or(o.order);
        let mut s = USeries::zero((self.order + lo_b).min(o.order + lo_a));
        for (i, a) in &self.coeffs {
            for (j, b) in &o.coeffs {
                s.add_term(i + j, a.mul(b));
            }
        }
        s
    }

    /// Lowest order with a nonzero coefficient, if any up to `order`.
    pub fn first_nonzero(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }
}

/// `binom(e, k)` for rational `e`.
fn gen_binomial(e: &Rat, k: u64) -> Rat {
    let mut acc = Rat::ONE;
    for i in 0..k {
        acc = &acc * &(e - &Rat::from_int(i as i64));
        acc = &acc / &Rat::from_int(i as i64 + 1);
    }
    acc
}

/// Add `c * T^t * u^shift * (1 - 4T u^2)^e` to `s`.
fn add_binomial_series(s: &mut USeries, c: &Rat, t: u32, shift: i64, e: &Rat) {
    let mut k = 0u64;
    while shift + 2 * k as i64 <= s.order {
        let b = gen_binomial(e, k);
        if !b.is_zero() {
            let coef = &(c * &b) * &Rat::from_int(-4).pow(k as u32);
            let m = mono::var(0, t + k as u32);
            s.add_term(shift + 2 * k as i64, MPoly::monomial(0, m, coef));
        }
        k += 1;
    }
}

/// Expansion of a one-point function at infinity up to `u^order`, using
/// `y = (1/u) sqrt(1 - 4T u^2)`.
pub fn expand_inf(f: &RatFn, order: i64) -> Result<USeries> {
    if f.npoints() != 1 || f.den().has_diffs() {
        return Err(GbeError::InvalidArgument("expand_inf needs a one-point function".into()));
    }
    let a = f.den().yexp(1) as i64;
    let s = f.den().scalar().recip();
    let (pa, pb) = f.num().split(1);
    let mut out = USeries::zero(order);
    // A(x) / y^a and B(x) y / y^a.
    for (part, ypow) in [(pa, -a), (pb, 1 - a)] {
        let Some(p) = part.part(0) else { continue };
        let e = Rat::new(ypow, 2);
        for (m, c) in p.terms() {
            let j = mono::exp(*m, 1) as i64;
            let t = mono::exp(*m, 0);
            add_binomial_series(&mut out, &(c * &s), t, -ypow - j, &e);
        }
    }
    Ok(out)
}

/// Laurent polynomial in `N`, `s = sqrt(kappa)` and `T` over Q.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Laurent {
    /// `(N power, s power, T power) -> coefficient`.
    pub terms: BTreeMap<(i32, i32, i32), Rat>,
}

impl Laurent {
    pub fn add_term(&mut self, key: (i32, i32, i32), c: &Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_insert(Rat::ZERO);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Laurent) -> Laurent {
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.add_term(*k, c);
        }
        r
    }

    pub fn sub(&self, o: &Laurent) -> Laurent {
        self.add(&o.scale(&Rat::from_int(-1)))
    }

    pub fn scale(&self, s: &Rat) -> Laurent {
        let mut r = Laurent::default();
        for (k, c) in &self.terms {
            r.add_term(*k, &(c * s));
        }
        r
    }

    /// Substitute `N -> sign * kappa^a * N`, `s -> s^b` (b = +-1).
    pub fn transform(&self, sign: i32, a: i32, b: i32) -> Laurent {
        let mut r = Laurent::default();
        for (&(n, s, t), c) in &self.terms {
            let c = if sign < 0 && n % 2 != 0 { -c } else { c.clone() };
            r.add_term((n, s * b + 2 * a * n, t), &c);
        }
        r
    }

    /// Multiply by `kappa^a`.
    pub fn mul_kappa(&self, a: i32) -> Laurent {
        let mut r = Laurent::default();
        for (&(n, s, t), c) in &self.terms {
            r.add_term((n, s + 2 * a, t), c);
        }
        r
    }

    /// Set `N = value`.
    pub fn at_n(&self, value: i64) -> Laurent {
        let mut r = Laurent::default();
        let v = Rat::from_int(value);
        for (&(n, s, t), c) in &self.terms {
            let f = if n >= 0 { v.pow(n as u32) } else { v.pow((-n) as u32).recip() };
            r.add_term((0, s, t), &(c * &f));
        }
        r
    }

    pub fn eval(&self, n: f64, kappa: f64, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(a, b, c), v)| {
                v.to_f64() * n.powi(a) * kappa.sqrt().powi(b) * t.powi(c)
            })
            .sum()
    }

    /// True when only integer powers of kappa occur.
    pub fn kappa_integral(&self) -> bool {
        self.terms.keys().all(|&(_, s, _)| s % 2 == 0)
    }
}

impl fmt::Display for Laurent {
    /// Powers of kappa are printed when integral, otherwise of `sqrt(kappa)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let pow = |name: &str, e: i32| match e {
            0 => None,
            1 => Some(name.to_string()),
            e => Some(format!("{name}^{e}")),
        };
        let mut first = true;
        for (&(n, s, t), c) in self.terms.iter().rev() {
            let mut factors: Vec<String> = Vec::new();
            let neg = c.is_negative();
            let mag = c.abs();
            if !mag.is_one() {
                factors.push(mag.to_string());
            }
            factors.extend(pow("N", n));
            if s % 2 == 0 {
                factors.extend(pow("kappa", s / 2));
            } else {
                factors.extend(pow("sqrt(kappa)", s));
            }
            factors.extend(pow("T", t));
            if factors.is_empty() {
                factors.push("1".into());
            }
            let body = factors.join("*");
            match (first, neg) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// Exact moment `m_2k = <sum_i lambda_i^(2k)>` with its hbar-parity split.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentPoly {
    pub k: usize,
    pub value: Laurent,
    /// Contributions from hbar-even and hbar-odd parts of the `W_1^(l)`.
    pub hbar_even: Laurent,
    pub hbar_odd: Laurent,
    /// Orders `l > k` whose contribution was nonzero (must stay empty).
    pub spurious: Vec<usize>,
}

/// `m_2k = sum_{l=0}^{2k} (N/T)^(1-l) kappa^(-l/2) [u^(2k+1)] W_1^(l)` with
/// `hbar = sqrt(kappa) - 1/sqrt(kappa)`. `w1(l)` supplies `W_1^(l)`.
pub fn moment_poly(k: usize, w1: impl Fn(usize) -> Result<CorrFn>) -> Result<MomentPoly> {
    let u = 2 * k as i64 + 1;
    let mut even = Laurent::default();
    let mut odd = Laurent::default();
    let mut spurious = Vec::new();
    for l in 0..=2 * k {
        let w = w1(l)?;
        let mut contrib = Laurent::default();
        let mut contrib_odd = Laurent::default();
        for (r, part) in w.parts.iter().enumerate() {
            let series = expand_inf(part, u)?;
            let c = series.coeff(u);
            if c.is_zero() {
                continue;
            }
            let p = (w.g - 2 * r) as i32;
            // hbar^p = sum_i binom(p, i) (-1)^(p-i) s^(2i - p)
            for (m, v) in c.terms() {
                let t = mono::exp(*m, 0) as i32;
                for i in 0..=p {
                    let mut coef = v * &Rat::binomial(p as u64, i as u64);
                    if (p - i) % 2 == 1 {
                        coef = -&coef;
                    }
                    let key = (1 - l as i32, 2 * i - p - l as i32, t + l as i32 - 1);
                    if p % 2 == 0 {
                        contrib.add_term(key, &coef);
                    } else {
                        contrib_odd.add_term(key, &coef);
                    }
                }
            }
        }
        if l > k && !(contrib.is_zero() && contrib_odd.is_zero()) {
            spurious.push(l);
        }
        even = even.add(&contrib);
        odd = odd.add(&contrib_odd);
    }
    Ok(MomentPoly { k, value: even.add(&odd), hbar_even: even, hbar_odd: odd, spurious })
}

/// `(2k-1)!! (T/kappa)^k`, the moments of a single Gaussian of variance `T/kappa`.
pub fn gaussian_moment(k: usize) -> Laurent {
    let mut df = Rat::ONE;
    for j in (1..2 * k as i64).step_by(2) {
        df = &df * &Rat::from_int(j);
    }
    let mut l = Laurent::default();
    l.add_term((0, -2 * k as i32, k as i32), &df);
    l
}

/// At `N = 1` every moment must be the Gaussian one.
pub fn check_gaussian_n1(moments: &[MomentPoly]) -> bool {
    moments.iter().all(|m| m.value.at_n(1) == gaussian_moment(m.k))
}

/// The kappa -> 1/kappa symmetry. With `N -> kappa N` and `kappa -> 1/kappa`
/// the hbar-even part is multiplied by `kappa` and the hbar-odd part by
/// `-kappa`; equivalently `m(-kappa N, 1/kappa) = -kappa m(N, kappa)`.
pub fn duality(m: &MomentPoly) -> bool {
    let even_ok = m.hbar_even.transform(1, 1, -1) == m.hbar_even.mul_kappa(1);
    let odd_ok = m.hbar_odd.transform(1, 1, -1) == m.hbar_odd.mul_kappa(1).scale(&Rat::from_int(-1));
    let joint = m.value.transform(-1, 1, -1) == m.value.mul_kappa(1).scale(&Rat::from_int(-1));
    even_ok && odd_ok && joint && m.value.kappa_integral()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr;
    use crate::jets::JetEngine;
    use crate::solver::base_w1_0;

    fn catalan(k: u64) -> Rat {
        &Rat::binomial(2 * k, k) / &Rat::from_int(k as i64 + 1)
    }

    #[test]
    fn inverse_y_is_central_binomial() {
        let s = expand_inf(&expr::parse(1, "1/y").unwrap(), 15).unwrap();
        for k in 0..8 {
            let want = MPoly::monomial(0, mono::var(0, k as u32), Rat::binomial(2 * k, k));
            assert_eq!(s.coeff(2 * k as i64 + 1), want);
            assert!(s.coeff(2 * k as i64).is_zero());
        }
    }

    #[test]
    fn w10_is_catalan() {
        let w = base_w1_0();
        let s = expand_inf(&w.parts[0], 17).unwrap();
        assert!(s.coeff(0).is_zero() && s.coeff(-1).is_zero());
        for k in 0..8u64 {
            let want = MPoly::monomial(0, mono::var(0, k as u32 + 1), catalan(k));
            assert_eq!(s.coeff(2 * k as i64 + 1), want);
        }
    }

    #[test]
    fn w11_leading_term() {
        let f = expr::parse(1, "1/(2y) - x/(2y^2)").unwrap();
        let s = expand_inf(&f, 3).unwrap();
        assert_eq!(s.first_nonzero(), Some(3));
        assert_eq!(s.coeff(3), MPoly::monomial(0, mono::var(0, 1), Rat::from_int(-1)));
    }

    fn source(j: &JetEngine) -> impl Fn(usize) -> Result<CorrFn> + '_ {
        move |l| if l == 0 { Ok(base_w1_0()) } else { j.coinciding(1, l) }
    }

    #[test]
    fn low_moments() {
        let j = JetEngine::new();
        let m0 = moment_poly(0, source(&j)).unwrap();
        assert_eq!(m0.value.to_string(), "N");
        let m1 = moment_poly(1, source(&j)).unwrap();
        let mut want = Laurent::default();
        want.add_term((1, 0, 1), &Rat::ONE);
        want.add_term((0, 0, 1), &Rat::from_int(-1));
        want.add_term((0, -2, 1), &Rat::ONE);
        assert_eq!(m1.value, want);
        assert!(m1.spurious.is_empty());
        let m2 = moment_poly(2, source(&j)).unwrap();
        assert_eq!(m2.value.at_n(1), gaussian_moment(2));
        assert!(duality(&m1) && duality(&m2));
    }

    #[test]
    fn gaussian_oracle_small() {
        let j = JetEngine::new();
        let ms: Vec<_> = (0..=3).map(|k| moment_poly(k, source(&j)).unwrap()).collect();
        assert!(check_gaussian_n1(&ms));
        assert_eq!(gaussian_moment(3).to_string(), "15*kappa^-3*T^3");
    }
}
