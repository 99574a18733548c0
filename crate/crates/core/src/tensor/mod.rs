//! Truncated tensor algebra over R^d: dense storage, Chen product, exp/log,
//! Lie brackets and the free nilpotent group of step n.
//!
//! A word `(i1, .., ik)` (0-based letters) at level k is stored at index
//! `i1*d^(k-1) + .. + ik` inside the level-k block.

mod bch;
mod bracket_expr;

pub use bch::{bch, bch2, bch_iterated_low_order, bch_with_table, BchMethod, BchTable, BchTerm};
pub use bracket_expr::{nested_rearrange, BracketExpr, NestedSum};

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{dim_mismatch, Error, Result};
use crate::scalar::Scalar;

/// Element of T^(n)(R^d), levels 0..=n stored contiguously.
#[derive(Clone, PartialEq)]
pub struct TruncatedTensor<T> {
    dim: usize,
    level: usize,
    offsets: Vec<usize>,
    coeffs: Vec<T>,
}

fn offsets_for(dim: usize, level: usize) -> Vec<usize> {
    let mut off = Vec::with_capacity(level + 2);
    let mut acc = 0usize;
    let mut width = 1usize;
    for _ in 0..=level {
        off.push(acc);
        acc += width;
        width *= dim;
    }
    off.push(acc);
    off
}

fn check_shape(dim: usize, level: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let words = (0..=level).try_fold(1usize, |w, _| w.checked_mul(dim));
    match words {
        Some(w) if w <= 1 << 26 => Ok(()),
        _ => Err(Error::InvalidParameter(format!("tensor algebra too large: d={dim}, n={level}"))),
    }
}

impl<T: Scalar> TruncatedTensor<T> {
    pub fn zeros(dim: usize, level: usize) -> Result<Self> {
        check_shape(dim, level)?;
        let offsets = offsets_for(dim, level);
        let coeffs = vec![T::zero(); offsets[level + 1]];
        Ok(Self { dim, level, offsets, coeffs })
    }

    pub fn one(dim: usize, level: usize) -> Result<Self> {
        let mut t = Self::zeros(dim, level)?;
        t.coeffs[0] = T::one();
        Ok(t)
    }

    /// Builds from per-level coefficient blocks; `levels[k]` must have `dim^k` entries.
    pub fn from_levels(dim: usize, levels: Vec<Vec<T>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidParameter("need at least level 0".into()));
        }
        let level = levels.len() - 1;
        let mut t = Self::zeros(dim, level)?;
        for (k, block) in levels.into_iter().enumerate() {
            let want = t.offsets[k + 1] - t.offsets[k];
            if block.len() != want {
                return Err(dim_mismatch(&format!("level {k} length"), want, block.len()));
            }
            t.level_mut(k).copy_from_slice(&block);
        }
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn scalar(&self) -> T {
        self.coeffs[0]
    }

    /// Coefficients of the homogeneous degree-k component.
    pub fn level_slice(&self, k: usize) -> &[T] {
        &self.coeffs[self.offsets[k]..self.offsets[k + 1]]
    }

    pub fn level_mut(&mut self, k: usize) -> &mut [T] {
        let (a, b) = (self.offsets[k], self.offsets[k + 1]);
        &mut self.coeffs[a..b]
    }

    /// Coefficient of a word of 0-based letters; the empty word is level 0.
    pub fn get(&self, word: &[usize]) -> Option<T> {
        if word.len() > self.level || word.iter().any(|&i| i >= self.dim) {
            return None;
        }
        let idx = word.iter().fold(0usize, |acc, &i| acc * self.dim + i);
        Some(self.level_slice(word.len())[idx])
    }

    pub fn set(&mut self, word: &[usize], value: T) -> Result<()> {
        if word.len() > self.level || word.iter().any(|&i| i >= self.dim) {
            return Err(Error::InvalidParameter(format!("word {word:?} outside T^({})(R^{})", self.level, self.dim)));
        }
        let idx = word.iter().fold(0usize, |acc, &i| acc * self.dim + i);
        self.level_mut(word.len())[idx] = value;
        Ok(())
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.dim == other.dim && self.level == other.level
    }

    fn require_shape(&self, other: &Self) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(dim_mismatch(
                "tensor shape (d, n)",
                format!("({}, {})", self.dim, self.level),
                format!("({}, {})", other.dim, other.level),
            ))
        }
    }

    /// Truncated tensor product, checked.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.require_shape(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c = T::zero());
        self.mul_into(other, &mut out);
        out
    }

    /// `out += self (x) other`, truncated; `out` must have the same shape.
    pub(crate) fn mul_into(&self, other: &Self, out: &mut Self) {
        for k in 0..=self.level {
            let ck = self.offsets[k];
            for i in 0..=k {
                let j = k - i;
                let a = self.level_slice(i);
                let b = other.level_slice(j);
                let wj = b.len();
                if a.iter().all(|x| x.is_zero()) {
                    continue;
                }
                for (ia, &x) in a.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    let base = ck + ia * wj;
                    for (c, &y) in out.coeffs[base..base + wj].iter_mut().zip(b) {
                        *c += x * y;
                    }
                }
            }
        }
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.require_shape(other)?;
        Ok(self + other)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.require_shape(other)?;
        Ok(self - other)
    }

    /// `x (x) y - y (x) x`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.require_shape(other)?;
        Ok(self.commutator_unchecked(other))
    }

    pub(crate) fn commutator_unchecked(&self, other: &Self) -> Self {
        let mut out = self.mul_unchecked(other);
        let ba = other.mul_unchecked(self);
        out.coeffs.iter_mut().zip(&ba.coeffs).for_each(|(c, &b)| *c -= b);
        out
    }

    /// Exponential series; requires a vanishing scalar part.
    pub fn exp(&self) -> Result<Self> {
        if !self.scalar().is_zero() {
            return Err(Error::Domain(format!("exp needs zero scalar part, got {}", self.scalar())));
        }
        // Horner: 1 + x(1 + x/2(1 + x/3(..)))
        let one = Self::one(self.dim, self.level)?;
        let mut r = one.clone();
        for k in (1..=self.level).rev() {
            let mut next = self.mul_unchecked(&r).scale(T::one() / T::of_usize(k));
            next.coeffs[0] += T::one();
            r = next;
        }
        Ok(r)
    }

    /// Logarithm series; requires scalar part 1.
    pub fn log(&self) -> Result<Self> {
        let s = self.scalar();
        if !s.is_finite() || (s - T::one()).abs() > T::epsilon() * T::of(64.0) {
            return Err(Error::Domain(format!("log needs scalar part 1, got {s}")));
        }
        let mut y = self.clone();
        y.coeffs[0] = T::zero();
        if self.level == 0 {
            return Ok(y);
        }
        // log(1+y) = y(1 - y(1/2 - y(1/3 - ..)))
        let n = self.level;
        let mut r = Self::zeros(self.dim, n)?;
        r.coeffs[0] = T::one() / T::of_usize(n);
        for k in (1..n).rev() {
            let mut next = y.mul_unchecked(&r).scale(-T::one());
            next.coeffs[0] += T::one() / T::of_usize(k);
            r = next;
        }
        Ok(y.mul_unchecked(&r))
    }

    /// Multiplicative inverse, defined whenever the scalar part is non-zero.
    pub fn inverse(&self) -> Result<Self> {
        let g0 = self.scalar();
        if g0.is_zero() || !g0.is_finite() {
            return Err(Error::Domain("inverse needs a non-zero scalar part".into()));
        }
        // g = g0(1 - u) with u = 1 - g/g0, so g^-1 = (1/g0) sum_k u^k.
        let inv0 = T::one() / g0;
        let mut u = self.scale(-inv0);
        u.coeffs[0] = T::zero();
        let mut r = Self::one(self.dim, self.level)?;
        for _ in 0..self.level {
            let mut next = u.mul_unchecked(&r);
            next.coeffs[0] += T::one();
            r = next;
        }
        Ok(r.scale(inv0))
    }

    /// Same tensor cut to a lower truncation level.
    pub fn truncate(&self, level: usize) -> Result<Self> {
        if level > self.level {
            return Err(Error::InvalidParameter(format!("cannot truncate level {} to {level}", self.level)));
        }
        let mut out = Self::zeros(self.dim, level)?;
        let len = out.coeffs.len();
        out.coeffs.copy_from_slice(&self.coeffs[..len]);
        Ok(out)
    }

    /// Zero-padded copy at a higher truncation level.
    pub fn embed(&self, level: usize) -> Result<Self> {
        if level < self.level {
            return Err(Error::InvalidParameter(format!("cannot embed level {} into {level}", self.level)));
        }
        let mut out = Self::zeros(self.dim, level)?;
        out.coeffs[..self.coeffs.len()].copy_from_slice(&self.coeffs);
        Ok(out)
    }

    /// Dilation: level k scaled by t^k.
    pub fn dilate(&self, t: T) -> Self {
        let mut out = self.clone();
        let mut f = T::one();
        for k in 0..=self.level {
            out.level_mut(k).iter_mut().for_each(|c| *c *= f);
            f *= t;
        }
        out
    }

    /// Euclidean norm of the degree-k component.
    pub fn level_norm(&self, k: usize) -> T {
        self.level_slice(k).iter().map(|&c| c * c).sum::<T>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.require_shape(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max))
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().map(|c| c.abs()).fold(T::zero(), T::max)
    }

    /// Dynkin operator on the degree-k block: words `u a` map to `[theta(u), a]`.
    fn dynkin_level(&self, k: usize) -> Vec<T> {
        dynkin(self.dim, k, self.level_slice(k))
    }

    /// Membership test for the free Lie algebra: zero scalar part and
    /// `theta(x_k) = k x_k` on every level (Dynkin, Specht, Wever).
    pub fn is_lie(&self, tol: T) -> bool {
        if self.scalar().abs() > tol {
            return false;
        }
        (1..=self.level).all(|k| {
            let kk = T::of_usize(k);
            self.dynkin_level(k)
                .iter()
                .zip(self.level_slice(k))
                .all(|(&t, &x)| (t - kk * x).abs() <= tol * kk.max(T::one()))
        })
    }

    /// Human readable listing of non-zero coefficients, words printed 1-based.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for k in 0..=self.level {
            for (idx, c) in self.level_slice(k).iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                s.push_str(&format!("{}: {}\n", word_label(self.dim, k, idx), c));
            }
        }
        s
    }
}

fn dynkin<T: Scalar>(d: usize, k: usize, block: &[T]) -> Vec<T> {
    if k <= 1 {
        return block.to_vec();
    }
    let w = d.pow(k as u32 - 1);
    let mut out = vec![T::zero(); w * d];
    for a in 0..d {
        // words ending in letter a
        let sub: Vec<T> = (0..w).map(|u| block[u * d + a]).collect();
        let th = dynkin(d, k - 1, &sub);
        for (u, &c) in th.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out[u * d + a] += c;
            out[a * w + u] -= c;
        }
    }
    out
}

/// Label of a word: 1-based letters, separated by commas when d > 9.
pub fn word_label(dim: usize, k: usize, mut idx: usize) -> String {
    if k == 0 {
        return "()".into();
    }
    let mut letters = vec![0usize; k];
    for slot in letters.iter_mut().rev() {
        *slot = idx % dim + 1;
        idx /= dim;
    }
    let sep = if dim > 9 { "," } else { "" };
    letters.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(sep)
}

impl<T: fmt::Debug> fmt::Debug for TruncatedTensor<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedTensor(d={}, n={}) {:?}", self.dim, self.level, self.coeffs)
    }
}

impl<T: Scalar> fmt::Display for TruncatedTensor<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl<T: Scalar> Add for &TruncatedTensor<T> {
    type Output = TruncatedTensor<T>;
    /// Panics on shape mismatch; see [`TruncatedTensor::try_add`].
    fn add(self, rhs: Self) -> TruncatedTensor<T> {
        assert!(self.same_shape(rhs), "tensor shape mismatch");
        let mut out = self.clone();
        out.coeffs.iter_mut().zip(&rhs.coeffs).for_each(|(a, &b)| *a += b);
        out
    }
}

impl<T: Scalar> AddAssign<&TruncatedTensor<T>> for TruncatedTensor<T> {
    fn add_assign(&mut self, rhs: &TruncatedTensor<T>) {
        assert!(self.same_shape(rhs), "tensor shape mismatch");
        self.coeffs.iter_mut().zip(&rhs.coeffs).for_each(|(a, &b)| *a += b);
    }
}

impl<T: Scalar> Sub for &TruncatedTensor<T> {
    type Output = TruncatedTensor<T>;
    fn sub(self, rhs: Self) -> TruncatedTensor<T> {
        assert!(self.same_shape(rhs), "tensor shape mismatch");
        let mut out = self.clone();
        out.coeffs.iter_mut().zip(&rhs.coeffs).for_each(|(a, &b)| *a -= b);
        out
    }
}

impl<T: Scalar> Neg for &TruncatedTensor<T> {
    type Output = TruncatedTensor<T>;
    fn neg(self) -> TruncatedTensor<T> {
        self.scale(-T::one())
    }
}

impl<T: Scalar> Mul for &TruncatedTensor<T> {
    type Output = TruncatedTensor<T>;
    /// Truncated tensor product. Panics on shape mismatch; see [`TruncatedTensor::try_mul`].
    fn mul(self, rhs: Self) -> TruncatedTensor<T> {
        assert!(self.same_shape(rhs), "tensor shape mismatch");
        self.mul_unchecked(rhs)
    }
}

/// Element of the free step-n nilpotent Lie algebra g^(n)(R^d).
///
/// Only reachable through constructors that stay inside the Lie algebra:
/// generators, brackets, linear combinations and `GroupElement::log`.
#[derive(Clone, PartialEq)]
pub struct LieElement<T>(TruncatedTensor<T>);

impl<T: fmt::Debug> fmt::Debug for LieElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lie{:?}", self.0)
    }
}

impl<T: Scalar> LieElement<T> {
    pub fn zero(dim: usize, level: usize) -> Result<Self> {
        Ok(Self(TruncatedTensor::zeros(dim, level)?))
    }

    /// Basis vector e_i (0-based).
    pub fn generator(dim: usize, level: usize, i: usize) -> Result<Self> {
        let mut t = TruncatedTensor::zeros(dim, level)?;
        if i >= dim || level == 0 {
            return Err(Error::InvalidParameter(format!("generator {i} outside g^({level})(R^{dim})")));
        }
        t.level_mut(1)[i] = T::one();
        Ok(Self(t))
    }

    /// `sum_k v_k e_k`.
    pub fn from_level1(level: usize, v: &[T]) -> Result<Self> {
        let mut t = TruncatedTensor::zeros(v.len(), level)?;
        if level == 0 {
            return Err(Error::InvalidParameter("level must be at least 1".into()));
        }
        t.level_mut(1).copy_from_slice(v);
        Ok(Self(t))
    }

    /// `sum_k w_k e_k + sum_{k<l} a_kl [e_k, e_l]`, areas listed in lexicographic pair order.
    pub fn from_level2(level: usize, w: &[T], areas: &[T]) -> Result<Self> {
        let d = w.len();
        if areas.len() != d * (d.saturating_sub(1)) / 2 {
            return Err(dim_mismatch("area pairs", d * (d.saturating_sub(1)) / 2, areas.len()));
        }
        let mut x = Self::from_level1(level, w)?;
        if level >= 2 {
            let l2 = x.0.level_mut(2);
            for ((k, l), &a) in pairs(d).zip(areas) {
                l2[k * d + l] += a;
                l2[l * d + k] -= a;
            }
        }
        Ok(x)
    }

    /// Checked conversion: rejects tensors outside the Lie algebra (tolerance `tol`).
    pub fn from_tensor(t: TruncatedTensor<T>, tol: T) -> Result<Self> {
        if t.is_lie(tol) {
            Ok(Self(t))
        } else {
            Err(Error::Domain("tensor is not a Lie element".into()))
        }
    }

    pub fn tensor(&self) -> &TruncatedTensor<T> {
        &self.0
    }

    pub fn into_tensor(self) -> TruncatedTensor<T> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn level(&self) -> usize {
        self.0.level
    }

    pub fn bracket(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.commutator(&other.0)?))
    }

    pub(crate) fn bracket_unchecked(&self, other: &Self) -> Self {
        Self(self.0.commutator_unchecked(&other.0))
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.scale(s))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.try_add(&other.0)?))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.try_sub(&other.0)?))
    }

    /// `self + s * other` in place.
    pub fn axpy(&mut self, s: T, other: &Self) {
        assert!(self.0.same_shape(&other.0), "tensor shape mismatch");
        self.0.coeffs.iter_mut().zip(&other.0.coeffs).for_each(|(a, &b)| *a += s * b);
    }

    pub fn exp(&self) -> GroupElement<T> {
        GroupElement(self.0.exp().expect("Lie elements have zero scalar part"))
    }

    pub fn truncate(&self, level: usize) -> Result<Self> {
        Ok(Self(self.0.truncate(level)?))
    }

    pub fn embed(&self, level: usize) -> Result<Self> {
        Ok(Self(self.0.embed(level)?))
    }

    pub fn dilate(&self, t: T) -> Self {
        Self(self.0.dilate(t))
    }

    /// `max_k |pi_k x|^(1/k)`.
    pub fn homogeneous_norm(&self) -> T {
        (1..=self.0.level)
            .map(|k| self.0.level_norm(k).powf(T::one() / T::of_usize(k)))
            .fold(T::zero(), T::max)
    }

    /// Level-2 coefficients on the basis `[e_k, e_l]`, k < l.
    pub fn areas(&self) -> Vec<T> {
        let d = self.dim();
        if self.level() < 2 {
            return vec![T::zero(); d * (d.saturating_sub(1)) / 2];
        }
        let l2 = self.0.level_slice(2);
        pairs(d).map(|(k, l)| (l2[k * d + l] - l2[l * d + k]) / T::of(2.0)).collect()
    }
}

impl<T: Scalar> Add for &LieElement<T> {
    type Output = LieElement<T>;
    fn add(self, rhs: Self) -> LieElement<T> {
        LieElement(&self.0 + &rhs.0)
    }
}

impl<T: Scalar> Sub for &LieElement<T> {
    type Output = LieElement<T>;
    fn sub(self, rhs: Self) -> LieElement<T> {
        LieElement(&self.0 - &rhs.0)
    }
}

impl<T: Scalar> Neg for &LieElement<T> {
    type Output = LieElement<T>;
    fn neg(self) -> LieElement<T> {
        LieElement(-&self.0)
    }
}

/// Element of the step-n free nilpotent group G^(n)(R^d) = exp(g^(n)).
#[derive(Clone, PartialEq)]
pub struct GroupElement<T>(TruncatedTensor<T>);

impl<T: fmt::Debug> fmt::Debug for GroupElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group{:?}", self.0)
    }
}

impl<T: Scalar> GroupElement<T> {
    pub fn identity(dim: usize, level: usize) -> Result<Self> {
        Ok(Self(TruncatedTensor::one(dim, level)?))
    }

    /// Checked conversion; the logarithm must be a Lie element within `tol`.
    pub fn from_tensor(t: TruncatedTensor<T>, tol: T) -> Result<Self> {
        let l = t.log()?;
        if l.is_lie(tol) {
            Ok(Self(t))
        } else {
            Err(Error::Domain("tensor is not a group-like element".into()))
        }
    }

    pub fn tensor(&self) -> &TruncatedTensor<T> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn level(&self) -> usize {
        self.0.level
    }

    pub fn log(&self) -> LieElement<T> {
        LieElement(self.0.log().expect("group elements have scalar part 1"))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.try_mul(&other.0)?))
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.inverse().expect("group elements are invertible"))
    }

    pub fn truncate(&self, level: usize) -> Result<Self> {
        Ok(Self(self.0.truncate(level)?))
    }

    pub fn dilate(&self, t: T) -> Self {
        Self(self.0.dilate(t))
    }

    pub fn homogeneous_norm(&self) -> T {
        self.log().homogeneous_norm()
    }
}

impl<T: Scalar> Mul for &GroupElement<T> {
    type Output = GroupElement<T>;
    fn mul(self, rhs: Self) -> GroupElement<T> {
        GroupElement(&self.0 * &rhs.0)
    }
}

/// Lexicographic pairs (k, l), k < l < d.
pub fn pairs(d: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..d).flat_map(move |k| (k + 1..d).map(move |l| (k, l)))
}

/// Index of pair (k, l), k < l, in [`pairs`] order.
pub fn pair_index(d: usize, k: usize, l: usize) -> usize {
    debug_assert!(k < l && l < d);
    k * (2 * d - k - 1) / 2 + (l - k - 1)
}
