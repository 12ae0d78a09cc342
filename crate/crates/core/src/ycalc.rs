//! Derivatives of `y(x) = sqrt(x^2 - 4T)`: `y^(n) = R_n(x) / y^(2n-1)`.

use std::sync::OnceLock;

use parking_lot::RwLock;

use crate::exact::{mono, MPoly, Rat, RatFn};
use crate::{GbeError, Result};

/// `R_n(x) = sum_k a_k x^k`, where `a_k` carries the factor `T^((n-k)/2)`
/// (every term has weight `n` when `x` has weight 1 and `T` weight 2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RPoly {
    pub n: usize,
    /// `coeffs[k]` is the rational part of `a_k`.
    pub coeffs: Vec<Rat>,
}

impl RPoly {
    /// `T`-power carried by `a_k`, or `None` when `n - k` is odd (then `a_k = 0`).
    pub fn t_power(&self, k: usize) -> Option<u32> {
        (k <= self.n && (self.n - k) % 2 == 0).then(|| ((self.n - k) / 2) as u32)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn leading_coeff(&self) -> Rat {
        self.degree().map(|d| self.coeffs[d].clone()).unwrap_or(Rat::ZERO)
    }

    /// `R_n(x_i)` as a polynomial in an `npoints`-point context.
    pub fn to_mpoly(&self, npoints: usize, i: usize) -> MPoly {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let tp = self.t_power(k).expect("nonzero coefficient has even codegree");
                (mono::var(0, tp) + mono::var(i, k as u32), c.clone())
            })
            .collect();
        MPoly::from_terms(npoints, terms)
    }

    /// Value at `T = t` of the coefficient of `x^k`, as an exact rational.
    pub fn coeff_at(&self, k: usize, t: &Rat) -> Rat {
        match self.t_power(k) {
            Some(p) if k < self.coeffs.len() => &self.coeffs[k] * &t.pow(p),
            _ => Rat::ZERO,
        }
    }

    fn next(&self) -> RPoly {
        // R_{n+1} = (x^2 - 4T) R_n' - (2n-1) x R_n, coefficientwise:
        // a_k^{(n+1)} = (k - 2n) a_{k-1}^{(n)} - 4T (k+1) a_{k+1}^{(n)}.
        let n = self.n as i64;
        let get = |k: i64| -> Rat {
            if k < 0 || k as usize >= self.coeffs.len() {
                Rat::ZERO
            } else {
                self.coeffs[k as usize].clone()
            }
        };
        let len = self.coeffs.len() + 1;
        let coeffs = (0..len as i64)
            .map(|k| {
                &(&Rat::from_int(k - 2 * n) * &get(k - 1))
                    - &(&Rat::from_int(4 * (k + 1)) * &get(k + 1))
            })
            .collect();
        RPoly { n: self.n + 1, coeffs }
    }
}

fn table() -> &'static RwLock<Vec<RPoly>> {
    static TABLE: OnceLock<RwLock<Vec<RPoly>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        RwLock::new(vec![RPoly { n: 1, coeffs: vec![Rat::ZERO, Rat::ONE] }])
    })
}

/// `R_n`, memoized.
pub fn r_poly(n: usize) -> Result<RPoly> {
    if n == 0 {
        return Err(GbeError::InvalidArgument("R_n is defined for n >= 1".into()));
    }
    if let Some(r) = table().read().get(n - 1) {
        return Ok(r.clone());
    }
    let mut t = table().write();
    while t.len() < n {
        let next = t.last().expect("table is seeded").next();
        t.push(next);
    }
    Ok(t[n - 1].clone())
}

/// Coefficients `c_0..=c_K` of `y(x_i + eps)` in an `npoints`-point context.
pub fn y_taylor(npoints: usize, i: usize, k_max: usize) -> Vec<RatFn> {
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(RatFn::y(npoints, i));
    for k in 1..=k_max {
        let r = r_poly(k).expect("k >= 1");
        let c = RatFn::from_mpoly(r.to_mpoly(npoints, i))
            .scale(&Rat::factorial(k as u64).recip())
            .div_y(i, 2 * k as u32 - 1);
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_r_polys() {
        assert_eq!(r_poly(1).unwrap().to_mpoly(1, 1), MPoly::x(1, 1));
        assert_eq!(r_poly(2).unwrap().to_mpoly(1, 1), MPoly::t(1).scale(&Rat::from_int(-4)));
        assert_eq!(
            r_poly(3).unwrap().to_mpoly(1, 1),
            MPoly::t(1).mul(&MPoly::x(1, 1)).scale(&Rat::from_int(12))
        );
        assert!(r_poly(0).is_err());
    }

    #[test]
    fn r_poly_is_the_derivative_numerator() {
        // y^(n) computed by repeated symbolic differentiation.
        let mut d = RatFn::y(1, 1);
        for n in 1..=8 {
            d = d.derive(1);
            let want = RatFn::from_mpoly(r_poly(n).unwrap().to_mpoly(1, 1)).div_y(1, 2 * n as u32 - 1);
            assert!(d.equal(&want), "n = {n}");
        }
    }

    #[test]
    fn taylor_coefficients() {
        let c = y_taylor(1, 1, 3);
        assert_eq!(c[1], RatFn::x(1, 1).div_y(1, 1));
        assert_eq!(c[2], RatFn::t(1).scale(&Rat::from_int(-2)).div_y(1, 3));
        assert_eq!(
            c[3],
            RatFn::t(1).mul(&RatFn::x(1, 1)).scale(&Rat::from_int(2)).div_y(1, 5)
        );
    }
}
