//! Factored denominators `scalar * prod y_i^a_i * prod_{i<j} (x_i - x_j)^b_ij`.

use std::collections::BTreeMap;
use std::fmt;

use super::mpoly::MPoly;
use super::rat::Rat;
use super::ypoly::YPoly;
use crate::{GbeError, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DenForm {
    scalar: Rat,
    yexp: Vec<u32>,
    diff: BTreeMap<(usize, usize), u32>,
}

impl DenForm {
    pub fn one(n: usize) -> DenForm {
        DenForm {
            scalar: Rat::ONE,
            yexp: vec![0; n],
            diff: BTreeMap::new(),
        }
    }

    pub fn new(scalar: Rat, yexp: Vec<u32>, diff: BTreeMap<(usize, usize), u32>) -> Result<DenForm> {
        if scalar.is_zero() || scalar.is_negative() {
            return Err(GbeError::InvalidArgument("denominator scalar must be positive".into()));
        }
        let n = yexp.len();
        let mut d = DenForm { scalar, yexp, diff: BTreeMap::new() };
        for ((i, j), b) in diff {
            if i == 0 || i >= j || j > n {
                return Err(GbeError::InvalidArgument(format!("bad difference factor ({i},{j})")));
            }
            if b > 0 {
                d.diff.insert((i, j), b);
            }
        }
        Ok(d)
    }

    pub fn npoints(&self) -> usize {
        self.yexp.len()
    }

    pub fn scalar(&self) -> &Rat {
        &self.scalar
    }

    pub fn yexp(&self, i: usize) -> u32 {
        self.yexp[i - 1]
    }

    pub fn yexps(&self) -> &[u32] {
        &self.yexp
    }

    /// Exponent of `(x_i - x_j)` with the pair taken in either order.
    pub fn diff_exp(&self, i: usize, j: usize) -> u32 {
        let key = (i.min(j), i.max(j));
        self.diff.get(&key).copied().unwrap_or(0)
    }

    pub fn diffs(&self) -> &BTreeMap<(usize, usize), u32> {
        &self.diff
    }

    pub fn is_one(&self) -> bool {
        self.scalar.is_one() && self.yexp.iter().all(|a| *a == 0) && self.diff.is_empty()
    }

    pub fn has_diffs(&self) -> bool {
        !self.diff.is_empty()
    }

    pub(crate) fn set_scalar(&mut self, s: Rat) {
        debug_assert!(!s.is_zero() && !s.is_negative());
        self.scalar = s;
    }

    pub(crate) fn add_yexp(&mut self, i: usize, by: i64) {
        let v = self.yexp[i - 1] as i64 + by;
        assert!(v >= 0, "negative y exponent");
        self.yexp[i - 1] = v as u32;
    }

    /// Change the exponent of `(x_min - x_max)`.
    pub(crate) fn add_diff(&mut self, i: usize, j: usize, by: i64) {
        let key = (i.min(j), i.max(j));
        let v = self.diff.get(&key).copied().unwrap_or(0) as i64 + by;
        assert!(v >= 0, "negative difference exponent");
        if v == 0 {
            self.diff.remove(&key);
        } else {
            self.diff.insert(key, v as u32);
        }
    }

    pub fn mul(&self, other: &DenForm) -> DenForm {
        let mut out = self.clone();
        out.scalar = &self.scalar * &other.scalar;
        for (a, b) in out.yexp.iter_mut().zip(&other.yexp) {
            *a += b;
        }
        for (k, b) in &other.diff {
            *out.diff.entry(*k).or_insert(0) += b;
        }
        out
    }

    /// Exponentwise maximum with scalar one.
    pub fn lcm(&self, other: &DenForm) -> DenForm {
        let mut out = DenForm::one(self.npoints());
        for (k, a) in out.yexp.iter_mut().enumerate() {
            *a = self.yexp[k].max(other.yexp[k]);
        }
        for (k, b) in self.diff.iter().chain(other.diff.iter()) {
            let e = out.diff.entry(*k).or_insert(0);
            *e = (*e).max(*b);
        }
        out
    }

    /// Numerator factor turning `self` into `target` (which must be a
    /// multiple up to scalar): returns `(factor, target.scalar / self.scalar)`.
    pub fn cofactor(&self, target: &DenForm) -> (YPoly, Rat) {
        let n = self.npoints();
        let mut poly = MPoly::one(n);
        let mut ymask = 0u16;
        for i in 1..=n {
            let e = target.yexp(i) - self.yexp(i);
            if e >= 2 {
                poly = poly.mul(&MPoly::y_squared(n, i).pow(e / 2));
            }
            if e % 2 == 1 {
                ymask |= super::ypoly::bit(i);
            }
        }
        for (&(i, j), &b) in &target.diff {
            let e = b - self.diff_exp(i, j);
            if e > 0 {
                poly = poly.mul(&MPoly::diff(n, i, j).pow(e));
            }
        }
        (YPoly::from_part(ymask, poly), &target.scalar / &self.scalar)
    }

    /// The denominator multiplied out as a YPoly.
    pub fn expand(&self) -> YPoly {
        let unit = DenForm::one(self.npoints());
        let (p, _) = unit.cofactor(&DenForm {
            scalar: Rat::ONE,
            yexp: self.yexp.clone(),
            diff: self.diff.clone(),
        });
        p.scale(&self.scalar)
    }

    pub fn eval_f64(&self, xs: &[f64], ys: &[f64]) -> f64 {
        let mut v = self.scalar.to_f64();
        for (k, a) in self.yexp.iter().enumerate() {
            v *= ys[k].powi(*a as i32);
        }
        for ((i, j), b) in &self.diff {
            v *= (xs[i - 1] - xs[j - 1]).powi(*b as i32);
        }
        v
    }

    /// Relabel points; fails if a difference factor collapses.
    pub fn remap(&self, new_n: usize, map: &[usize]) -> Result<DenForm> {
        let mut out = DenForm::one(new_n);
        out.scalar = self.scalar.clone();
        for (k, a) in self.yexp.iter().enumerate() {
            out.yexp[map[k] - 1] += a;
        }
        for (&(i, j), &b) in &self.diff {
            let (p, q) = (map[i - 1], map[j - 1]);
            if p == q {
                return Err(GbeError::DenFormViolation(format!(
                    "difference factor (x{i}-x{j}) collapses under relabeling"
                )));
            }
            *out.diff.entry((p.min(q), p.max(q))).or_insert(0) += b;
        }
        Ok(out)
    }

    /// Sign of rewriting relabeled factors back to `x_min - x_max` form.
    pub fn remap_sign(&self, map: &[usize]) -> i32 {
        let mut odd = false;
        for (&(i, j), &b) in &self.diff {
            if map[i - 1] > map[j - 1] && b % 2 == 1 {
                odd = !odd;
            }
        }
        if odd {
            -1
        } else {
            1
        }
    }

    pub fn write_canonical(&self, out: &mut String) {
        out.push_str(&self.scalar.to_string());
        out.push_str(" | y:[");
        let ys: Vec<String> = self.yexp.iter().map(u32::to_string).collect();
        out.push_str(&ys.join(","));
        out.push_str("] | d:[");
        let ds: Vec<String> = self.diff.iter().map(|((i, j), b)| format!("({i},{j},{b})")).collect();
        out.push_str(&ds.join(","));
        out.push(']');
    }

    pub fn parse_canonical(s: &str) -> Result<DenForm> {
        let bad = || GbeError::Parse(format!("malformed denominator `{s}`"));
        let mut it = s.split(" | ");
        let scalar: Rat = it.next().ok_or_else(bad)?.trim().parse()?;
        let ys = it
            .next()
            .and_then(|t| t.strip_prefix("y:["))
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(bad)?;
        let yexp: Vec<u32> = if ys.is_empty() {
            Vec::new()
        } else {
            ys.split(',').map(|v| v.parse::<u32>().map_err(|_| bad())).collect::<Result<_>>()?
        };
        let ds = it
            .next()
            .and_then(|t| t.trim_end().strip_prefix("d:["))
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(bad)?;
        if it.next().is_some() {
            return Err(bad());
        }
        let mut diff = BTreeMap::new();
        if !ds.is_empty() {
            for item in ds.split("),(") {
                let item = item.trim_start_matches('(').trim_end_matches(')');
                let v: Vec<usize> = item
                    .split(',')
                    .map(|x| x.parse::<usize>().map_err(|_| bad()))
                    .collect::<Result<_>>()?;
                if v.len() != 3 || v[2] == 0 {
                    return Err(bad());
                }
                if diff.insert((v[0], v[1]), v[2] as u32).is_some() {
                    return Err(bad());
                }
            }
        }
        DenForm::new(scalar, yexp, diff).map_err(|_| bad())
    }
}

impl fmt::Display for DenForm {
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
    fn text_round_trip() {
        let mut diff = BTreeMap::new();
        diff.insert((1, 3), 3);
        diff.insert((2, 3), 1);
        let d = DenForm::new(Rat::new(2, 3), vec![3, 3, 6], diff).unwrap();
        let s = d.to_string();
        assert_eq!(s, "2/3 | y:[3,3,6] | d:[(1,3,3),(2,3,1)]");
        assert_eq!(DenForm::parse_canonical(&s).unwrap(), d);
        assert_eq!(DenForm::parse_canonical("1 | y:[0] | d:[]").unwrap(), DenForm::one(1));
    }

    #[test]
    fn cofactor_lifts_to_lcm() {
        let mut a = DenForm::one(2);
        a.add_yexp(1, 1);
        a.add_diff(1, 2, 1);
        let mut b = DenForm::one(2);
        b.add_yexp(1, 2);
        let l = a.lcm(&b);
        assert_eq!(l.yexp(1), 2);
        assert_eq!(l.diff_exp(2, 1), 1);
        let (fa, _) = a.cofactor(&l);
        assert_eq!(fa, YPoly::y(2, 1));
    }
}
