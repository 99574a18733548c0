//! Bracket expressions over generators `x1, x2, ..` and their rewriting into
//! right-nested form `[x_i1, [x_i2, [.., x_ik]]]`.

use std::collections::BTreeMap;
use std::fmt;

use super::LieElement;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BracketExpr {
    /// Generator `x_i`, 1-based as written.
    Gen(usize),
    Bracket(Box<BracketExpr>, Box<BracketExpr>),
}

impl BracketExpr {
    pub fn gen(i: usize) -> Self {
        Self::Gen(i)
    }

    pub fn br(a: BracketExpr, b: BracketExpr) -> Self {
        Self::Bracket(Box::new(a), Box::new(b))
    }

    /// Parses text such as `[[x1,x2],[x3,x4]]`. Whitespace is ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser { s: text.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }

    pub fn degree(&self) -> usize {
        match self {
            Self::Gen(_) => 1,
            Self::Bracket(a, b) => a.degree() + b.degree(),
        }
    }

    /// Largest generator index used.
    pub fn max_gen(&self) -> usize {
        match self {
            Self::Gen(i) => *i,
            Self::Bracket(a, b) => a.max_gen().max(b.max_gen()),
        }
    }

    /// Evaluates with `x_i := gens[i - 1]`.
    pub fn eval<T: Scalar>(&self, gens: &[LieElement<T>]) -> Result<LieElement<T>> {
        match self {
            Self::Gen(i) => gens
                .get(i.wrapping_sub(1))
                .cloned()
                .ok_or_else(|| Error::InvalidParameter(format!("no value for x{i}"))),
            Self::Bracket(a, b) => a.eval(gens)?.bracket(&b.eval(gens)?),
        }
    }

    fn right_nested(&self) -> BTreeMap<Vec<usize>, i64> {
        match self {
            Self::Gen(i) => BTreeMap::from([(vec![*i], 1)]),
            Self::Bracket(a, b) => {
                let (ra, rb) = (a.right_nested(), b.right_nested());
                let mut out = BTreeMap::new();
                for (s, cs) in &ra {
                    for (t, ct) in &rb {
                        bracket_nested(s, t, cs * ct, &mut out);
                    }
                }
                out.retain(|_, c| *c != 0);
                out
            }
        }
    }
}

/// Adds `c * [R(s), R(t)]` to `out` as right-nested words, where R(s) is the
/// right-nested bracket of the letters of s.
fn bracket_nested(s: &[usize], t: &[usize], c: i64, out: &mut BTreeMap<Vec<usize>, i64>) {
    if c == 0 {
        return;
    }
    if s.len() == 1 {
        let mut w = Vec::with_capacity(1 + t.len());
        w.push(s[0]);
        w.extend_from_slice(t);
        *out.entry(w).or_insert(0) += c;
        return;
    }
    // Jacobi: [[x_i, R(s')], R(t)] = [x_i, [R(s'), R(t)]] - [R(s'), [x_i, R(t)]]
    let (i, rest) = (s[0], &s[1..]);
    let mut inner = BTreeMap::new();
    bracket_nested(rest, t, c, &mut inner);
    for (w, cw) in inner {
        let mut v = Vec::with_capacity(w.len() + 1);
        v.push(i);
        v.extend(w);
        *out.entry(v).or_insert(0) += cw;
    }
    let mut it = Vec::with_capacity(t.len() + 1);
    it.push(i);
    it.extend_from_slice(t);
    bracket_nested(rest, &it, -c, out);
}

impl fmt::Display for BracketExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gen(i) => write!(f, "x{i}"),
            Self::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

/// Integer combination of right-nested brackets; each word `(i1, .., ik)`
/// stands for `[x_i1, [x_i2, [.., x_ik]]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedSum {
    pub terms: Vec<(i64, Vec<usize>)>,
}

impl NestedSum {
    pub fn eval<T: Scalar>(&self, gens: &[LieElement<T>]) -> Result<LieElement<T>> {
        let first = gens.first().ok_or_else(|| Error::InvalidParameter("no generators".into()))?;
        let mut acc = LieElement::zero(first.dim(), first.level())?;
        for (c, w) in &self.terms {
            let e = nested_word_expr(w);
            acc.axpy(T::of(*c as f64), &e.eval(gens)?);
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

fn nested_word_expr(w: &[usize]) -> BracketExpr {
    match w {
        [i] => BracketExpr::Gen(*i),
        [i, rest @ ..] => BracketExpr::br(BracketExpr::Gen(*i), nested_word_expr(rest)),
        [] => unreachable!("empty bracket word"),
    }
}

impl fmt::Display for NestedSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (c, w)) in self.terms.iter().enumerate() {
            match (n, *c < 0) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if c.abs() != 1 {
                write!(f, "{}*", c.abs())?;
            }
            write!(f, "{}", nested_word_expr(w))?;
        }
        Ok(())
    }
}

/// Rewrites a bracket expression as a sum of right-nested brackets.
/// Innermost pairs are put in increasing order and `[x_i, x_i]` dropped.
pub fn nested_rearrange(expr: &BracketExpr) -> NestedSum {
    let mut canon: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
    for (mut w, c) in expr.right_nested() {
        let k = w.len();
        let mut c = c;
        if k >= 2 {
            match w[k - 2].cmp(&w[k - 1]) {
                std::cmp::Ordering::Equal => continue,
                std::cmp::Ordering::Greater => {
                    w.swap(k - 2, k - 1);
                    c = -c;
                }
                std::cmp::Ordering::Less => {}
            }
        }
        *canon.entry(w).or_insert(0) += c;
    }
    NestedSum { terms: canon.into_iter().filter(|(_, c)| *c != 0).map(|(w, c)| (c, w)).collect() }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::MalformedExpression { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<BracketExpr> {
        self.skip_ws();
        match self.s.get(self.pos) {
            Some(b'[') => {
                self.pos += 1;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b']')?;
                Ok(BracketExpr::br(a, b))
            }
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
                match digits.parse::<usize>() {
                    Ok(i) if i >= 1 => Ok(BracketExpr::Gen(i)),
                    _ => Err(self.err("generator needs a positive index")),
                }
            }
            Some(_) => Err(self.err("expected '[' or generator")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
