//! Recursive solution of the hbar-graded loop equations for the full
//! multivariate correlators `W_n^(g)(x_1, ..., x_n)`.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use parking_lot::RwLock;
use rayon::prelude::*;

use crate::cache::Cache;
use crate::exact::{Rat, RatFn};
use crate::merge::merge_pair;
use crate::{GbeError, Result};

/// `W_n^(g) = sum_r hbar^(g - 2r) parts[r]`, `r = 0..=g/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrFn {
    pub n: usize,
    pub g: usize,
    pub parts: Vec<RatFn>,
}

impl CorrFn {
    pub fn zero(n: usize, g: usize) -> CorrFn {
        CorrFn { n, g, parts: vec![RatFn::zero(n); g / 2 + 1] }
    }

    pub fn hbar_power(&self, r: usize) -> usize {
        self.g - 2 * r
    }

    /// The coefficient of `hbar^k`, zero if absent.
    pub fn coeff(&self, k: usize) -> RatFn {
        if k > self.g || (self.g - k) % 2 != 0 {
            return RatFn::zero(self.n);
        }
        self.parts[(self.g - k) / 2].clone()
    }

    pub fn equal(&self, other: &CorrFn) -> bool {
        self.n == other.n
            && self.g == other.g
            && self.parts.iter().zip(&other.parts).all(|(a, b)| a.equal(b))
    }

    pub fn map(&self, f: impl Fn(&RatFn) -> Result<RatFn>) -> Result<CorrFn> {
        let parts = self.parts.iter().map(f).collect::<Result<Vec<_>>>()?;
        let n = parts.first().map(RatFn::npoints).unwrap_or(self.n);
        Ok(CorrFn { n, g: self.g, parts })
    }

    /// All points merged into one.
    pub fn coinciding(&self) -> Result<CorrFn> {
        self.map(crate::merge::merge_all)
    }

    /// Invariance under every transposition of points.
    pub fn is_symmetric(&self) -> bool {
        self.parts.iter().all(|p| {
            (2..=self.n).all(|j| p.transpose(1, j).equal(p))
                && (2..self.n).all(|j| p.transpose(j, j + 1).equal(p))
        })
    }
}

/// `W_1^(0) = (x - y) / 2`.
pub fn base_w1_0() -> CorrFn {
    let half = Rat::new(1, 2);
    let f = RatFn::x(1, 1).sub(&RatFn::y(1, 1)).scale(&half);
    CorrFn { n: 1, g: 0, parts: vec![f] }
}

pub fn chi(n: usize, g: usize) -> usize {
    2 * g + n
}

/// Direct dependencies of `(n, g)` in the loop equation.
pub fn dependencies(n: usize, g: usize) -> Vec<(usize, usize)> {
    let mut out = BTreeSet::new();
    if (n, g) == (1, 0) {
        return Vec::new();
    }
    if g >= 1 {
        out.insert((n, g - 1));
    }
    if g >= 2 {
        out.insert((n + 1, g - 2));
    }
    for k in 0..n {
        for p in 0..=g {
            if (k == 0 && p == 0) || (k == n - 1 && p == g) {
                continue;
            }
            out.insert((k + 1, p));
            out.insert((n - k, g - p));
        }
    }
    if n >= 2 {
        out.insert((n - 1, g));
    }
    out.into_iter().collect()
}

/// Dependency closure of a set of targets, ordered by `chi` ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub entries: Vec<(usize, usize)>,
}

impl Schedule {
    pub fn build(targets: &[(usize, usize)]) -> Result<Schedule> {
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut stack: Vec<(usize, usize)> = targets.to_vec();
        while let Some((n, g)) = stack.pop() {
            if n == 0 {
                return Err(GbeError::InvalidArgument("n must be at least 1".into()));
            }
            if !seen.insert((n, g)) {
                continue;
            }
            for d in dependencies(n, g) {
                if chi(d.0, d.1) >= chi(n, g) {
                    return Err(GbeError::InvalidArgument(format!(
                        "dependency ({},{}) of ({n},{g}) does not lower chi",
                        d.0, d.1
                    )));
                }
                stack.push(d);
            }
        }
        let mut entries: Vec<(usize, usize)> = seen.into_iter().collect();
        entries.sort_by_key(|&(n, g)| (chi(n, g), n, g));
        Ok(Schedule { entries })
    }

    /// Entries grouped by `chi`.
    pub fn levels(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut last = usize::MAX;
        for &(n, g) in &self.entries {
            if chi(n, g) != last {
                out.push(Vec::new());
                last = chi(n, g);
            }
            out.last_mut().unwrap().push((n, g));
        }
        out
    }

    pub fn contains(&self, key: (usize, usize)) -> bool {
        self.entries.contains(&key)
    }
}

/// Memoized solver, optionally backed by an on-disk cache.
#[derive(Default)]
pub struct Engine {
    memo: RwLock<HashMap<(usize, usize), Arc<CorrFn>>>,
    cache: Option<Cache>,
}

impl Engine {
    pub fn new() -> Engine {
        Engine::default()
    }

    pub fn with_cache(cache: Cache) -> Engine {
        Engine { memo: RwLock::default(), cache: Some(cache) }
    }

    pub fn cached(&self, n: usize, g: usize) -> Option<Arc<CorrFn>> {
        self.memo.read().get(&(n, g)).cloned()
    }

    fn get(&self, n: usize, g: usize) -> Arc<CorrFn> {
        self.cached(n, g)
            .unwrap_or_else(|| panic!("W_{n}^({g}) requested before it was scheduled"))
    }

    /// `W_n^(g)`, computing its whole dependency closure.
    pub fn solve(&self, n: usize, g: usize) -> Result<Arc<CorrFn>> {
        if let Some(w) = self.cached(n, g) {
            return Ok(w);
        }
        let schedule = Schedule::build(&[(n, g)])?;
        self.run(&schedule)?;
        Ok(self.get(n, g))
    }

    pub fn run(&self, schedule: &Schedule) -> Result<()> {
        for level in schedule.levels() {
            let todo: Vec<(usize, usize)> =
                level.into_iter().filter(|k| self.cached(k.0, k.1).is_none()).collect();
            let results: Vec<((usize, usize), Result<CorrFn>)> = todo
                .par_iter()
                .map(|&(n, g)| ((n, g), self.load_or_compute(n, g)))
                .collect();
            let mut memo = self.memo.write();
            for (key, res) in results {
                memo.insert(key, Arc::new(res?));
            }
        }
        Ok(())
    }

    fn load_or_compute(&self, n: usize, g: usize) -> Result<CorrFn> {
        if let Some(cache) = &self.cache {
            if let Some(w) = cache.load(n, g) {
                return Ok(w);
            }
        }
        let w = self.compute(n, g)?;
        if let Some(cache) = &self.cache {
            cache.store(&w)?;
        }
        Ok(w)
    }

    fn compute(&self, n: usize, g: usize) -> Result<CorrFn> {
        if (n, g) == (1, 0) {
            return Ok(base_w1_0());
        }
        let nparts = g / 2 + 1;
        let mut rhs: Vec<RatFn> = vec![RatFn::zero(n); nparts];
        let add_to = |rhs: &mut Vec<RatFn>, r: usize, f: RatFn| {
            if r < nparts && !f.is_zero() {
                rhs[r] = rhs[r].add(&f);
            }
        };

        // hbar * d/dx W_n^(g-1)
        if g >= 1 {
            let w = self.get(n, g - 1);
            for (r, p) in w.parts.iter().enumerate() {
                add_to(&mut rhs, r, p.derive(1));
            }
        }

        // W_{n+1}^(g-2)(x, x, I)
        if g >= 2 {
            let w = self.get(n + 1, g - 2);
            for (r, p) in w.parts.iter().enumerate() {
                add_to(&mut rhs, r + 1, merge_pair(p, 1, 2)?);
            }
        }

        // sum over J subset I and p of W_{|J|+1}^(p)(x, J) W_{n-|J|}^(g-p)(x, I \ J)
        let others: Vec<usize> = (2..=n).collect();
        for mask in 0u32..(1 << (n - 1)) {
            let j: Vec<usize> = others
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, p)| *p)
                .collect();
            let rest: Vec<usize> = others
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) == 0)
                .map(|(_, p)| *p)
                .collect();
            let comp = ((1u32 << (n - 1)) - 1) ^ mask;
            for p in 0..=g {
                if (j.is_empty() && p == 0) || (rest.is_empty() && p == g) {
                    continue;
                }
                // Each unordered pair {(J,p), (I\J,g-p)} once, doubled when distinct.
                let key = (mask, p);
                let mirror = (comp, g - p);
                if key > mirror {
                    continue;
                }
                let weight = if key == mirror { Rat::ONE } else { Rat::from_int(2) };
                let a = self.get(j.len() + 1, p);
                let b = self.get(rest.len() + 1, g - p);
                let mut amap = vec![1];
                amap.extend(&j);
                let mut bmap = vec![1];
                bmap.extend(&rest);
                let a_parts: Vec<RatFn> =
                    a.parts.iter().map(|f| f.remap(n, &amap)).collect::<Result<_>>()?;
                let b_parts: Vec<RatFn> =
                    b.parts.iter().map(|f| f.remap(n, &bmap)).collect::<Result<_>>()?;
                for (ra, fa) in a_parts.iter().enumerate() {
                    for (rb, fb) in b_parts.iter().enumerate() {
                        add_to(&mut rhs, ra + rb, fa.mul(fb).scale(&weight));
                    }
                }
            }
        }

        // sum_i d/dx_i [(W_{n-1}^(g)(x, I \ x_i) - W_{n-1}^(g)(I)) / (x - x_i)]
        if n >= 2 {
            let w = self.get(n - 1, g);
            // i = 2 explicitly, the other i by transposing points 2 and i.
            let with_x: Vec<usize> = std::iter::once(1).chain(3..=n).collect();
            let without_x: Vec<usize> = (2..=n).collect();
            for (r, p) in w.parts.iter().enumerate() {
                let a = p.remap(n, &with_x)?;
                let b = p.remap(n, &without_x)?;
                let term = a.sub(&b).div_diff(1, 2, 1).derive(2);
                let mut total = term.clone();
                for i in 3..=n {
                    total = total.add(&term.transpose(2, i));
                }
                add_to(&mut rhs, r, total);
            }
        }

        let parts = rhs.into_iter().map(|f| f.div_y(1, 1)).collect();
        Ok(CorrFn { n, g, parts })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_for_w1_4() {
        let s = Schedule::build(&[(1, 4)]).unwrap();
        for k in [(2, 2), (3, 0), (2, 1), (1, 1), (1, 2), (1, 3), (2, 0)] {
            assert!(s.contains(k), "{k:?}");
        }
        let chis: Vec<usize> = s.entries.iter().map(|&(n, g)| chi(n, g)).collect();
        assert!(chis.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(Schedule::build(&[(1, 0)]).unwrap().entries, vec![(1, 0)]);
    }

    #[test]
    fn dependencies_lower_chi() {
        for n in 1..6 {
            for g in 0..6 {
                for (m, h) in dependencies(n, g) {
                    assert!(chi(m, h) < chi(n, g));
                }
            }
        }
    }

    #[test]
    fn w1_1() {
        let e = Engine::new();
        let w = e.solve(1, 1).unwrap();
        let half = Rat::new(1, 2);
        let want = RatFn::one(1)
            .div_y(1, 1)
            .sub(&RatFn::x(1, 1).div_y(1, 2))
            .scale(&half);
        assert!(w.parts[0].equal(&want));
    }
}
