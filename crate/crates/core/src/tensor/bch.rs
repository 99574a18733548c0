//! Baker-Campbell-Hausdorff: log(exp(x1) .. exp(xn)) in g^(n)(R^d).

use std::collections::HashMap;

use super::{BracketExpr, LieElement};
use crate::error::{dim_mismatch, Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct BchTerm {
    pub name: String,
    pub coeff: f64,
    pub expr: BracketExpr,
}

/// Two-variable series `log(exp(x1) exp(x2)) = x1 + x2 + sum c_t t(x1, x2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BchTable {
    terms: Vec<BchTerm>,
}

const STANDARD: &[(&str, f64)] = &[
    ("[x1,x2]", 1.0 / 2.0),
    ("[x1,[x1,x2]]", 1.0 / 12.0),
    ("[x2,[x2,x1]]", 1.0 / 12.0),
    ("[x2,[x1,[x1,x2]]]", -1.0 / 24.0),
    ("[x2,[x2,[x2,[x2,x1]]]]", -1.0 / 720.0),
    ("[x1,[x1,[x1,[x1,x2]]]]", -1.0 / 720.0),
    ("[x1,[x2,[x2,[x2,x1]]]]", 1.0 / 360.0),
    ("[x2,[x1,[x1,[x1,x2]]]]", 1.0 / 360.0),
    ("[x2,[x1,[x2,[x1,x2]]]]", 1.0 / 120.0),
    ("[x1,[x2,[x1,[x2,x1]]]]", 1.0 / 120.0),
];

impl BchTable {
    /// Terms through degree 5.
    pub fn standard() -> Self {
        let terms = STANDARD
            .iter()
            .map(|&(name, coeff)| BchTerm {
                name: name.to_string(),
                coeff,
                expr: BracketExpr::parse(name).expect("static table parses"),
            })
            .collect();
        Self { terms }
    }

    pub fn terms(&self) -> &[BchTerm] {
        &self.terms
    }

    pub fn max_degree(&self) -> usize {
        self.terms.iter().map(|t| t.expr.degree()).max().unwrap_or(1)
    }

    /// Copy with one coefficient shifted by `delta`; used to exercise the checker.
    pub fn perturbed(&self, name: &str, delta: f64) -> Result<Self> {
        let mut out = self.clone();
        let t = out
            .terms
            .iter_mut()
            .find(|t| t.name == name)
            .ok_or_else(|| Error::InvalidParameter(format!("no BCH term named {name}")))?;
        t.coeff += delta;
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BchMethod {
    /// Pairwise fold with the degree-5 table; exact for truncation level <= 5.
    #[default]
    Tabulated,
    /// Logarithm of the truncated product of exponentials; any level.
    ProductLog,
}

fn eval_cached<T: Scalar>(
    e: &BracketExpr,
    gens: &[LieElement<T>; 2],
    cache: &mut HashMap<BracketExpr, LieElement<T>>,
) -> LieElement<T> {
    if let Some(v) = cache.get(e) {
        return v.clone();
    }
    let v = match e {
        BracketExpr::Gen(i) => gens[*i - 1].clone(),
        BracketExpr::Bracket(a, b) => {
            let va = eval_cached(a, gens, cache);
            let vb = eval_cached(b, gens, cache);
            va.bracket_unchecked(&vb)
        }
    };
    cache.insert(e.clone(), v.clone());
    v
}

fn same_shape<T: Scalar>(xs: &[LieElement<T>]) -> Result<(usize, usize)> {
    let first = xs.first().ok_or_else(|| Error::Domain("BCH of an empty sequence".into()))?;
    let shape = (first.dim(), first.level());
    for x in xs {
        if (x.dim(), x.level()) != shape {
            return Err(dim_mismatch("BCH operand (d, n)", format!("{shape:?}"), format!("({}, {})", x.dim(), x.level())));
        }
    }
    Ok(shape)
}

/// `log(exp(x) exp(y))` from a term table.
pub fn bch2<T: Scalar>(x: &LieElement<T>, y: &LieElement<T>, table: &BchTable) -> Result<LieElement<T>> {
    let (_, level) = same_shape(&[x.clone(), y.clone()])?;
    if level > table.max_degree() {
        return Err(Error::InvalidParameter(format!(
            "tabulated BCH is exact to degree {}, level {level} requested",
            table.max_degree()
        )));
    }
    let gens = [x.clone(), y.clone()];
    let mut cache = HashMap::new();
    let mut out = x + y;
    for t in table.terms.iter().filter(|t| t.expr.degree() <= level) {
        let v = eval_cached(&t.expr, &gens, &mut cache);
        out.axpy(T::of(t.coeff), &v);
    }
    Ok(out)
}

/// Left fold of [`bch2`] over the sequence.
pub fn bch_with_table<T: Scalar>(xs: &[LieElement<T>], table: &BchTable) -> Result<LieElement<T>> {
    same_shape(xs)?;
    let mut acc = xs[0].clone();
    for x in &xs[1..] {
        acc = bch2(&acc, x, table)?;
    }
    Ok(acc)
}

pub fn bch<T: Scalar>(xs: &[LieElement<T>], method: BchMethod) -> Result<LieElement<T>> {
    same_shape(xs)?;
    match method {
        BchMethod::Tabulated => bch_with_table(xs, &BchTable::standard()),
        BchMethod::ProductLog => {
            let mut g = xs[0].exp();
            for x in &xs[1..] {
                g = &g * &x.exp();
            }
            Ok(g.log())
        }
    }
}

/// Explicit n-ary expansion through degree 3:
///
/// sum x_i + 1/2 sum_{i<j} [x_i,x_j] + 1/4 sum_{i<j<k} [[x_i,x_j],x_k]
/// + 1/12 sum_{k > max(i,j)} [x_i,[x_j,x_k]] + 1/12 sum_{i<j} [x_j,[x_j,x_i]].
pub fn bch_iterated_low_order<T: Scalar>(xs: &[LieElement<T>]) -> Result<LieElement<T>> {
    let (_, level) = same_shape(xs)?;
    if level > 3 {
        return Err(Error::InvalidParameter(format!("explicit expansion covers degree <= 3, level {level} requested")));
    }
    let n = xs.len();
    let mut out = xs[0].clone();
    for x in &xs[1..] {
        out.axpy(T::one(), x);
    }
    if level < 2 {
        return Ok(out);
    }
    let (half, quarter, twelfth) = (T::of(0.5), T::of(0.25), T::of(1.0 / 12.0));
    let mut br = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                br[i][j] = Some(xs[i].bracket_unchecked(&xs[j]));
            }
        }
    }
    let b = |i: usize, j: usize| br[i][j].as_ref().expect("off-diagonal bracket");
    for i in 0..n {
        for j in i + 1..n {
            out.axpy(half, b(i, j));
        }
    }
    if level < 3 {
        return Ok(out);
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                out.axpy(quarter, &b(i, j).bracket_unchecked(&xs[k]));
            }
            out.axpy(twelfth, &xs[j].bracket_unchecked(b(j, i)));
        }
    }
    for k in 0..n {
        for i in 0..k {
            for j in 0..k {
                out.axpy(twelfth, &xs[i].bracket_unchecked(b(j, k)));
            }
        }
    }
    Ok(out)
}
