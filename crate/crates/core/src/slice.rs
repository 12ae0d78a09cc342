//! `W_n^(g)(X, z + e_2, ..., z + e_n)`: one exact point `X` and Taylor jets
//! in the remaining points around a common `z`.
//!
//! The distinguished point of the loop equation is always taken among the
//! `z` points, so `X` never appears twice. Coefficients are two-point
//! functions with point 1 = `X`, point 2 = `z`. Functions without `X` come
//! from [`JetEngine`].

use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::RwLock;

use crate::conjecture::vanishes_at_infinity;
use crate::exact::{MPoly, Rat, RatFn};
use crate::jets::{weight, JetEngine, Part};
use crate::Result;

type Coeff = Arc<Vec<RatFn>>;

fn sorted(mut v: Vec<u8>) -> Part {
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

fn with(first: u8, rest: &[u8]) -> Part {
    let mut v = Vec::with_capacity(rest.len() + 1);
    v.push(first);
    v.extend_from_slice(rest);
    sorted(v)
}

#[derive(Default)]
pub struct SliceEngine {
    jets: JetEngine,
    memo: RwLock<HashMap<(usize, usize, Part), Coeff>>,
    zmemo: RwLock<HashMap<(usize, usize, Part), Coeff>>,
    inv_y: RwLock<Vec<RatFn>>,
}

impl SliceEngine {
    pub fn new() -> SliceEngine {
        SliceEngine::default()
    }

    pub fn jets(&self) -> &JetEngine {
        &self.jets
    }

    /// `[e^j] 1/y(z + e)`.
    fn inv_y(&self, j: usize) -> RatFn {
        if let Some(c) = self.inv_y.read().get(j) {
            return c.clone();
        }
        let mut t = self.inv_y.write();
        if t.is_empty() {
            t.push(RatFn::one(2).div_y(2, 1));
        }
        while t.len() <= j {
            let k = t.len();
            let next = t[k - 1].derive(2).scale(&Rat::new(1, k as i64));
            t.push(next);
        }
        t[j].clone()
    }

    /// Jet coefficient of `W_n^(g)(z + e_1, ..., z + e_n)` on point 2.
    pub fn zjet(&self, n: usize, g: usize, lam: &[u8]) -> Result<Coeff> {
        let key = (n, g, sorted(lam.to_vec()));
        if let Some(c) = self.zmemo.read().get(&key) {
            return Ok(c.clone());
        }
        let order: usize = lam.iter().map(|&e| e as usize).sum();
        let w = weight(n, g, order);
        let parts = self
            .jets
            .coeff(n, g, &key.2)
            .iter()
            .map(|p| p.to_ratfn(w)?.remap(2, &[2]))
            .collect::<Result<Vec<_>>>()?;
        let c = Arc::new(parts);
        Ok(self.zmemo.write().entry(key).or_insert(c).clone())
    }

    /// Coefficient of `e^beta` in `W_n^(g)(X, z + e)`, `beta` of length `n - 1`.
    pub fn coeff(&self, n: usize, g: usize, beta: &[u8]) -> Result<Coeff> {
        assert_eq!(beta.len() + 1, n, "one exponent per z point");
        let key = (n, g, sorted(beta.to_vec()));
        if let Some(c) = self.memo.read().get(&key) {
            return Ok(c.clone());
        }
        let c = Arc::new(self.compute(n, g, &key.2)?);
        Ok(self.memo.write().entry(key).or_insert(c).clone())
    }

    fn compute(&self, n: usize, g: usize, beta: &[u8]) -> Result<Vec<RatFn>> {
        if n == 1 {
            let mut parts = vec![RatFn::zero(2); g / 2 + 1];
            if g == 0 {
                parts[0] = RatFn::x(2, 1).sub(&RatFn::y(2, 1)).scale(&Rat::new(1, 2));
            } else {
                let c = self.jets.coinciding(1, g)?;
                for (r, p) in c.parts.iter().enumerate() {
                    parts[r] = p.remap(2, &[1])?;
                }
            }
            return Ok(parts);
        }
        let k0 = beta[n - 2];
        let rest = &beta[..n - 2];
        let mut out = vec![RatFn::zero(2); g / 2 + 1];
        for j in 0..=k0 {
            let rhs = self.rhs(n, g, k0 - j, rest)?;
            let inv = self.inv_y(j as usize);
            for (o, r) in out.iter_mut().zip(&rhs) {
                if !r.is_zero() {
                    *o = o.add(&r.mul(&inv));
                }
            }
        }
        Ok(out.into_iter().map(|f| f.reduce()).collect())
    }

    /// Loop-equation right-hand side at `e_0^k e^rest`, `X` among the others.
    fn rhs(&self, n: usize, g: usize, k: u8, rest: &[u8]) -> Result<Vec<RatFn>> {
        let nparts = g / 2 + 1;
        let mut rhs = vec![RatFn::zero(2); nparts];
        let add = |rhs: &mut Vec<RatFn>, r: usize, f: RatFn| {
            if r < nparts && !f.is_zero() {
                rhs[r] = rhs[r].add(&f);
            }
        };

        if g >= 1 {
            let c = self.coeff(n, g - 1, &with(k + 1, rest))?;
            let s = Rat::from_int(k as i64 + 1);
            for (r, p) in c.iter().enumerate() {
                add(&mut rhs, r, p.scale(&s));
            }
        }

        if g >= 2 {
            for j in 0..=k {
                let mut v = vec![j, k - j];
                v.extend_from_slice(rest);
                let c = self.coeff(n + 1, g - 2, &sorted(v))?;
                for (r, p) in c.iter().enumerate() {
                    add(&mut rhs, r + 1, p.clone());
                }
            }
        }

        // X on side a; the mirrored terms double the sum
        let m = rest.len();
        let mut splits: HashMap<(Part, Part), i64> = HashMap::new();
        for mask in 0u32..(1 << m) {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for (bit, e) in rest.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    a.push(*e);
                } else {
                    b.push(*e);
                }
            }
            *splits.entry((sorted(a), sorted(b))).or_default() += 2;
        }
        let mut splits: Vec<_> = splits.into_iter().collect();
        splits.sort();
        for ((ja, jb), count) in splits {
            let count = Rat::from_int(count);
            for p in 0..=g {
                if jb.is_empty() && p == g {
                    continue;
                }
                for k1 in 0..=k {
                    let ca = self.coeff(ja.len() + 2, p, &with(k1, &ja))?;
                    let cb = self.zjet(jb.len() + 1, g - p, &with(k - k1, &jb))?;
                    for (ra, fa) in ca.iter().enumerate() {
                        if fa.is_zero() {
                            continue;
                        }
                        for (rb, fb) in cb.iter().enumerate() {
                            if ra + rb < nparts && !fb.is_zero() {
                                add(&mut rhs, ra + rb, fa.mul(fb).scale(&count));
                            }
                        }
                    }
                }
            }
        }

        // divided differences against the other z points
        for i in 0..m {
            let mut others = rest.to_vec();
            let bi = others.remove(i);
            let mut v = others.clone();
            v.push(k + bi + 2);
            let c = self.coeff(n - 1, g, &sorted(v))?;
            let s = Rat::from_int(bi as i64 + 1);
            for (r, p) in c.iter().enumerate() {
                add(&mut rhs, r, p.scale(&s));
            }
        }

        // and against X: d/dX [A / (X - z)^(k+1) - sum_j b_(k-j) / (X - z)^(j+1)]
        let a = self.coeff(n - 1, g, rest)?;
        let b: Vec<Coeff> = (0..=k).map(|mm| self.zjet(n - 1, g, &with(mm, rest))).collect::<Result<_>>()?;
        for r in 0..nparts {
            let mut f = a[r].div_diff(1, 2, k as u32 + 1);
            for j in 0..=k as usize {
                let bj = &b[k as usize - j][r];
                if !bj.is_zero() {
                    f = f.sub(&bj.div_diff(1, 2, j as u32 + 1));
                }
            }
            add(&mut rhs, r, f.derive(1));
        }
        Ok(rhs)
    }

    /// The x^2 relation on every jet of total order at most `order`:
    /// `X^2 W_n(X, z + e) + sum_i d/dx_i W_(n-1)(z + e) -> 0` as `X -> oo`.
    pub fn x2_relation(&self, n: usize, g: usize, order: usize) -> Result<bool> {
        if n < 2 {
            return Err(crate::GbeError::InvalidArgument("the relation needs n >= 2".into()));
        }
        let x2 = MPoly::x(2, 1).pow(2);
        for beta in partitions(n - 1, order) {
            let c = self.coeff(n, g, &beta)?;
            let mut d: Vec<RatFn> = c.iter().map(|p| p.mul_mpoly(&x2)).collect();
            for i in 0..beta.len() {
                let mut up = beta.clone();
                up[i] += 1;
                let s = Rat::from_int(beta[i] as i64 + 1);
                let z = self.zjet(n - 1, g, &up)?;
                for (dr, zr) in d.iter_mut().zip(z.iter()) {
                    *dr = dr.add(&zr.scale(&s));
                }
            }
            if !d.iter().all(|f| vanishes_at_infinity(f, 1)) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Descending partitions of length `len` with sum at most `order`.
pub fn partitions(len: usize, order: usize) -> Vec<Part> {
    fn go(len: usize, left: usize, cap: usize, cur: &mut Part, out: &mut Vec<Part>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for e in (0..=cap.min(left)).rev() {
            cur.push(e as u8);
            go(len, left - e, e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(len, order, order, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::merge::merge_pair;
    use crate::solver::Engine;

    fn merge_tail(f: &RatFn) -> RatFn {
        let mut g = f.clone();
        while g.npoints() > 2 {
            g = merge_pair(&g, 2, g.npoints()).unwrap();
        }
        g
    }

    #[test]
    fn partitions_are_counted() {
        assert_eq!(partitions(2, 2), vec![vec![2, 0], vec![1, 1], vec![1, 0], vec![0, 0]]);
        assert_eq!(partitions(3, 0).len(), 1);
    }

    #[test]
    fn slice_matches_merged_solution() {
        let e = Engine::new();
        let s = SliceEngine::new();
        for (n, g) in [(2, 0), (2, 1), (3, 0), (2, 2), (3, 1), (4, 0)] {
            let w = e.solve(n, g).unwrap();
            let c = s.coeff(n, g, &vec![0; n - 1]).unwrap();
            for (r, p) in w.parts.iter().enumerate() {
                assert!(merge_tail(p).equal(&c[r]), "({n},{g}) part {r}");
            }
        }
    }

    #[test]
    fn first_jet_matches_derivative() {
        // d/dz W_3(X, z, z) = 2 * [e_1] W_3(X, z + e_1, z)
        let e = Engine::new();
        let s = SliceEngine::new();
        let w = merge_tail(&e.solve(3, 0).unwrap().parts[0]);
        let c = s.coeff(3, 0, &[1, 0]).unwrap();
        assert!(w.derive(2).equal(&c[0].scale(&Rat::from_int(2))));
    }

    #[test]
    fn x2_relation_on_slices() {
        let s = SliceEngine::new();
        for (n, g) in [(2, 0), (3, 0), (2, 1), (3, 1), (2, 2)] {
            assert!(s.x2_relation(n, g, 2).unwrap(), "({n},{g})");
        }
    }
}
