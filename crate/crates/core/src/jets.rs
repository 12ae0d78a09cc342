//! Taylor jets of `W_n^(g)` around the total diagonal.
//!
//! With `x_i = x + e_i`, the loop equation becomes an identity between jet
//! coefficients. A symmetric function only needs the coefficients indexed by
//! partitions, and each one follows from finitely many lower coefficients:
//! the derivative term needs one order more, the derivative-difference term
//! two orders more. This reaches coinciding-point functions far beyond what
//! the multivariate solver can hold in memory.

use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::RwLock;

use crate::exact::Rat;
use crate::onepoint::OnePt;
use crate::solver::CorrFn;
use crate::Result;

/// Exponents of `e_1..e_n`, sorted descending.
pub type Part = Vec<u8>;

type Coeff = Arc<Vec<OnePt>>;

/// Weight of the `e^lambda` coefficient of `W_n^(g)` (T weighs 2).
pub fn weight(n: usize, g: usize, order: usize) -> i64 {
    4 - 3 * n as i64 - 2 * g as i64 - order as i64
}

fn sorted(mut v: Vec<u8>) -> Part {
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

#[derive(Default)]
pub struct JetEngine {
    memo: RwLock<HashMap<(usize, usize, Part), Coeff>>,
    inv_y: RwLock<Vec<OnePt>>,
    w10: RwLock<Vec<OnePt>>,
}

impl JetEngine {
    pub fn new() -> JetEngine {
        JetEngine::default()
    }

    /// `[e^k] 1/y(x + e)`.
    fn inv_y_coeff(&self, k: usize) -> OnePt {
        series_coeff(&self.inv_y, OnePt::inv_y(1), k)
    }

    /// `[e^k] W_1^(0)(x + e)`, from `(x - y) / 2`.
    fn w10_coeff(&self, k: usize) -> OnePt {
        let half = Rat::new(1, 2);
        series_coeff(&self.w10, OnePt::x().sub(&OnePt::y()).scale(&half), k)
    }

    /// The `e^lambda` coefficient of `W_n^(g)`, one entry per hbar part.
    pub fn coeff(&self, n: usize, g: usize, lambda: &[u8]) -> Coeff {
        assert_eq!(lambda.len(), n, "partition length must equal the point count");
        let key = (n, g, sorted(lambda.to_vec()));
        if let Some(c) = self.memo.read().get(&key) {
            return c.clone();
        }
        let c = Arc::new(self.compute(n, g, &key.2));
        self.memo.write().entry(key).or_insert(c).clone()
    }

    /// `W_n^(g)(x, ..., x)` with T restored.
    pub fn coinciding(&self, n: usize, g: usize) -> Result<CorrFn> {
        let c = self.coeff(n, g, &vec![0; n]);
        let w = weight(n, g, 0);
        let parts = c.iter().map(|p| p.to_ratfn(w)).collect::<Result<_>>()?;
        Ok(CorrFn { n: 1, g, parts })
    }

    /// Sum of the first-order jet coefficients: `d/dx W_n^(g)(x, ..., x)`.
    pub fn diagonal_derivative(&self, n: usize, g: usize) -> Result<CorrFn> {
        let mut lambda = vec![0u8; n];
        lambda[0] = 1;
        let c = self.coeff(n, g, &lambda);
        let w = weight(n, g, 1);
        let k = Rat::from_int(n as i64);
        let parts = c.iter().map(|p| p.scale(&k).to_ratfn(w)).collect::<Result<_>>()?;
        Ok(CorrFn { n: 1, g, parts })
    }

    /// Recompute a coefficient with the largest part on the first point and
    /// compare with the memoized one, which puts the smallest part there.
    pub fn symmetric_at(&self, n: usize, g: usize, lambda: &[u8]) -> bool {
        let lam = sorted(lambda.to_vec());
        let mut rotated = lam.clone();
        rotated.rotate_left(1);
        let alt = self.solve_at(n, g, lam[0], &rotated[..n - 1]);
        let memo = self.coeff(n, g, &lam);
        alt.len() == memo.len() && alt.iter().zip(memo.iter()).all(|(a, b)| a.equal(b))
    }

    fn compute(&self, n: usize, g: usize, lam: &[u8]) -> Vec<OnePt> {
        if (n, g) == (1, 0) {
            return vec![self.w10_coeff(lam[0] as usize)];
        }
        let k0 = lam[n - 1];
        self.solve_at(n, g, k0, &lam[..n - 1])
    }

    /// Coefficient of `e_0^k0 e^beta` from the loop equation with `e_0` on the
    /// distinguished point.
    fn solve_at(&self, n: usize, g: usize, k0: u8, beta: &[u8]) -> Vec<OnePt> {
        let nparts = g / 2 + 1;
        let mut out = vec![OnePt::zero(); nparts];
        for j in 0..=k0 {
            let rhs = self.rhs(n, g, k0 - j, beta);
            let inv = self.inv_y_coeff(j as usize);
            for (o, r) in out.iter_mut().zip(&rhs) {
                if !r.is_zero() {
                    *o = o.add(&r.mul(&inv));
                }
            }
        }
        out.into_iter().map(OnePt::reduced).collect()
    }

    fn rhs(&self, n: usize, g: usize, k: u8, beta: &[u8]) -> Vec<OnePt> {
        let nparts = g / 2 + 1;
        let mut rhs = vec![OnePt::zero(); nparts];
        let add = |rhs: &mut Vec<OnePt>, r: usize, f: OnePt| {
            if r < nparts && !f.is_zero() {
                rhs[r] = rhs[r].add(&f);
            }
        };
        let with = |first: u8, rest: &[u8]| -> Part {
            let mut v = Vec::with_capacity(rest.len() + 1);
            v.push(first);
            v.extend_from_slice(rest);
            sorted(v)
        };

        // hbar * d/dx W_n^(g-1)
        if g >= 1 {
            let c = self.coeff(n, g - 1, &with(k + 1, beta));
            let s = Rat::from_int(k as i64 + 1);
            for (r, p) in c.iter().enumerate() {
                add(&mut rhs, r, p.scale(&s));
            }
        }

        // W_{n+1}^(g-2)(x, x, I)
        if g >= 2 {
            for j in 0..=k {
                let mut v = vec![j, k - j];
                v.extend_from_slice(beta);
                let c = self.coeff(n + 1, g - 2, &sorted(v));
                for (r, p) in c.iter().enumerate() {
                    add(&mut rhs, r + 1, p.clone());
                }
            }
        }

        // products over J subset I and p, grouped by the exponents they see
        let m = n - 1;
        let mut splits: HashMap<(Part, Part), i64> = HashMap::new();
        for mask in 0u32..(1 << m) {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for (bit, e) in beta.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    a.push(*e);
                } else {
                    b.push(*e);
                }
            }
            *splits.entry((sorted(a), sorted(b))).or_default() += 1;
        }
        let mut splits: Vec<_> = splits.into_iter().collect();
        splits.sort();
        for ((ja, jb), count) in splits {
            let count = Rat::from_int(count);
            for p in 0..=g {
                if (ja.is_empty() && p == 0) || (jb.is_empty() && p == g) {
                    continue;
                }
                for k1 in 0..=k {
                    let ca = self.coeff(ja.len() + 1, p, &with(k1, &ja));
                    let cb = self.coeff(jb.len() + 1, g - p, &with(k - k1, &jb));
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

        // sum_i d/dx_i of the divided difference of W_{n-1}^(g)
        for i in 0..m {
            let mut rest = beta.to_vec();
            let bi = rest.remove(i);
            let c = self.coeff(n - 1, g, &with(k + bi + 2, &rest));
            let s = Rat::from_int(bi as i64 + 1);
            for (r, p) in c.iter().enumerate() {
                add(&mut rhs, r, p.scale(&s));
            }
        }
        rhs
    }
}

/// `[e^k] f(x + e)` for a memoized chain of derivatives of `f`.
fn series_coeff(table: &RwLock<Vec<OnePt>>, f: OnePt, k: usize) -> OnePt {
    if let Some(c) = table.read().get(k) {
        return c.clone();
    }
    let mut t = table.write();
    if t.is_empty() {
        t.push(f);
    }
    while t.len() <= k {
        let j = t.len();
        let next = t[j - 1].derive().scale(&Rat::new(1, j as i64));
        t.push(next);
    }
    t[k].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::merge::merge_all;
    use crate::solver::Engine;

    #[test]
    fn matches_merged_multivariate() {
        let jets = JetEngine::new();
        let e = Engine::new();
        for (n, g) in [(1, 1), (2, 0), (1, 2), (3, 0), (2, 1), (4, 0), (3, 1), (2, 2), (1, 3)] {
            let w = e.solve(n, g).unwrap();
            let j = jets.coinciding(n, g).unwrap();
            for (r, p) in w.parts.iter().enumerate() {
                let merged = merge_all(p).unwrap();
                assert!(merged.equal(&j.parts[r]), "({n},{g}) part {r}: {} vs {}", merged, j.parts[r]);
            }
        }
    }

    #[test]
    fn jets_are_symmetric() {
        let jets = JetEngine::new();
        assert!(jets.symmetric_at(3, 1, &[2, 1, 0]));
        assert!(jets.symmetric_at(2, 2, &[3, 1]));
        assert!(jets.symmetric_at(4, 0, &[1, 1, 1, 1]));
    }
}
