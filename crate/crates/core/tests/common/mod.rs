#![allow(dead_code)]
//! Independent sparse word-polynomial model of the truncated tensor algebra,
//! used as an oracle for the dense implementation.

use std::collections::BTreeMap;

use pathwise::tensor::{LieElement, TruncatedTensor};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct WordPoly {
    pub n: usize,
    pub c: BTreeMap<Vec<usize>, f64>,
}

impl WordPoly {
    pub fn zero(n: usize) -> Self {
        Self { n, c: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        let mut p = Self::zero(n);
        p.c.insert(vec![], 1.0);
        p
    }

    pub fn from_dense(t: &TruncatedTensor<f64>) -> Self {
        let (d, n) = (t.dim(), t.level());
        let mut p = Self::zero(n);
        for k in 0..=n {
            for (idx, &v) in t.level_slice(k).iter().enumerate() {
                if v != 0.0 {
                    let mut w = vec![0; k];
                    let mut r = idx;
                    for s in w.iter_mut().rev() {
                        *s = r % d;
                        r /= d;
                    }
                    p.c.insert(w, v);
                }
            }
        }
        p
    }

    pub fn get(&self, w: &[usize]) -> f64 {
        self.c.get(w).copied().unwrap_or(0.0)
    }

    pub fn add(&self, o: &Self, s: f64) -> Self {
        let mut r = self.clone();
        for (w, v) in &o.c {
            *r.c.entry(w.clone()).or_insert(0.0) += s * v;
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero(self.n);
        for (a, x) in &self.c {
            for (b, y) in &o.c {
                if a.len() + b.len() <= self.n {
                    let mut w = a.clone();
                    w.extend(b);
                    *r.c.entry(w).or_insert(0.0) += x * y;
                }
            }
        }
        r
    }

    pub fn exp(&self) -> Self {
        let mut r = Self::one(self.n);
        let mut p = Self::one(self.n);
        for k in 1..=self.n {
            p = p.mul(self);
            let f: f64 = (1..=k).map(|i| i as f64).product();
            r = r.add(&p, 1.0 / f);
        }
        r
    }

    pub fn log(&self) -> Self {
        let y = self.add(&Self::one(self.n), -1.0);
        let mut r = Self::zero(self.n);
        let mut p = Self::one(self.n);
        for k in 1..=self.n {
            p = p.mul(&y);
            let s = if k % 2 == 1 { 1.0 } else { -1.0 };
            r = r.add(&p, s / k as f64);
        }
        r
    }

    pub fn max_diff_dense(&self, t: &TruncatedTensor<f64>) -> f64 {
        let o = Self::from_dense(t);
        let mut m: f64 = 0.0;
        for w in self.c.keys().chain(o.c.keys()) {
            m = m.max((self.get(w) - o.get(w)).abs());
        }
        m
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss(r: &mut impl Rng) -> f64 {
    // Box-Muller, independent of the library's sampler.
    let u: f64 = r.random::<f64>().max(1e-300);
    let v: f64 = r.random();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

/// Random Lie element: random level-1 part plus random brackets of generators.
pub fn random_lie(r: &mut impl Rng, d: usize, n: usize, scale: f64) -> LieElement<f64> {
    let mut x = LieElement::from_level1(n, &(0..d).map(|_| scale * gauss(r)).collect::<Vec<_>>()).unwrap();
    for _ in 0..3 {
        let mut e = LieElement::generator(d, n, r.random_range(0..d)).unwrap();
        let depth = r.random_range(1..n.max(2));
        for _ in 0..depth {
            let g = LieElement::generator(d, n, r.random_range(0..d)).unwrap();
            e = g.bracket(&e).unwrap();
        }
        x.axpy(scale * gauss(r), &e);
    }
    x
}

/// Random tensor with every coefficient filled.
pub fn random_tensor(r: &mut impl Rng, d: usize, n: usize, scale: f64) -> TruncatedTensor<f64> {
    let levels = (0..=n).map(|k| (0..d.pow(k as u32)).map(|_| scale * gauss(r)).collect()).collect();
    TruncatedTensor::from_levels(d, levels).unwrap()
}
