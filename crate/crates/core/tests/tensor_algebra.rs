mod common;

use common::{random_lie, random_tensor, rng, WordPoly};
use pathwise::tensor::{
    bch, bch2, bch_iterated_low_order, nested_rearrange, BchMethod, BchTable, BracketExpr, GroupElement,
    LieElement, TruncatedTensor,
};
use pathwise::Error;
use proptest::prelude::*;
use rand::Rng;

const TOL: f64 = 1e-12;

#[test]
fn dense_product_matches_word_model() {
    let mut r = rng(1);
    for case in 0..200 {
        let d = 1 + case % 3;
        let n = 1 + case % 5;
        let a = random_tensor(&mut r, d, n, 0.7);
        let b = random_tensor(&mut r, d, n, 0.7);
        let want = WordPoly::from_dense(&a).mul(&WordPoly::from_dense(&b));
        assert!(want.max_diff_dense(&(&a * &b)) < TOL, "case {case}");
    }
}

#[test]
fn exp_and_log_match_word_model() {
    let mut r = rng(2);
    for case in 0..200 {
        let (d, n) = (2 + case % 2, 1 + case % 5);
        let x = random_lie(&mut r, d, n, 0.6);
        let g = x.exp();
        let wx = WordPoly::from_dense(x.tensor());
        assert!(wx.exp().max_diff_dense(g.tensor()) < TOL, "exp case {case}");
        assert!(WordPoly::from_dense(g.tensor()).log().max_diff_dense(x.tensor()) < TOL, "log case {case}");
    }
}

#[test]
fn log_exp_round_trip_and_inverse() {
    let mut r = rng(3);
    for case in 0..250 {
        let (d, n) = (1 + case % 3, 1 + case % 5);
        let x = random_lie(&mut r, d, n, 0.8);
        let g = x.exp();
        assert!(g.log().tensor().max_abs_diff(x.tensor()).unwrap() < TOL);
        let e = &g * &g.inverse();
        let id = GroupElement::identity(d, n).unwrap();
        assert!(e.tensor().max_abs_diff(id.tensor()).unwrap() < TOL);
        // inverse of a general invertible tensor
        let mut t = random_tensor(&mut r, d, n, 0.5);
        t.set(&[], 1.5).unwrap();
        let p = &t * &t.inverse().unwrap();
        assert!(p.max_abs_diff(&TruncatedTensor::one(d, n).unwrap()).unwrap() < TOL);
    }
}

#[test]
fn chen_product_is_associative() {
    let mut r = rng(4);
    for case in 0..200 {
        let (d, n) = (2 + case % 2, 2 + case % 4);
        let [a, b, c] = [0, 1, 2].map(|_| random_lie(&mut r, d, n, 0.7).exp());
        let lhs = &(&a * &b) * &c;
        let rhs = &a * &(&b * &c);
        assert!(lhs.tensor().max_abs_diff(rhs.tensor()).unwrap() < TOL);
    }
}

#[test]
fn tabulated_bch_matches_product_log() {
    let mut r = rng(5);
    let mut checked = 0;
    for d in 1..=3 {
        for n in 1..=5 {
            for _ in 0..15 {
                let m = r.random_range(2..=6);
                let xs: Vec<_> = (0..m).map(|_| random_lie(&mut r, d, n, 0.5)).collect();
                let tab = bch(&xs, BchMethod::Tabulated).unwrap();
                let oracle = {
                    let p = xs.iter().fold(WordPoly::one(n), |acc, x| acc.mul(&WordPoly::from_dense(x.tensor()).exp()));
                    p.log()
                };
                assert!(oracle.max_diff_dense(tab.tensor()) < TOL, "d={d} n={n}");
                let pl = bch(&xs, BchMethod::ProductLog).unwrap();
                assert!(pl.tensor().max_abs_diff(tab.tensor()).unwrap() < TOL);
                checked += 1;
            }
        }
    }
    assert!(checked >= 200);
}

#[test]
fn explicit_low_order_expansion_matches_through_level_three() {
    let mut r = rng(6);
    for case in 0..200 {
        let (d, n) = (2 + case % 2, 1 + case % 3);
        let m = 1 + case % 6;
        let xs: Vec<_> = (0..m).map(|_| random_lie(&mut r, d, n, 0.5)).collect();
        let a = bch_iterated_low_order(&xs).unwrap();
        let b = bch(&xs, BchMethod::ProductLog).unwrap();
        assert!(a.tensor().max_abs_diff(b.tensor()).unwrap() < TOL, "case {case}");
    }
    let x = LieElement::<f64>::zero(2, 4).unwrap();
    assert!(bch_iterated_low_order(&[x.clone(), x]).is_err());
}

#[test]
fn commuting_inputs_add() {
    let mut r = rng(7);
    for _ in 0..50 {
        let base = random_lie(&mut r, 3, 4, 1.0);
        let xs: Vec<_> = (0..5).map(|_| base.scale(common::gauss(&mut r))).collect();
        let sum = xs.iter().skip(1).fold(xs[0].clone(), |a, x| &a + x);
        let h = bch(&xs, BchMethod::Tabulated).unwrap();
        assert!(h.tensor().max_abs_diff(sum.tensor()).unwrap() < 1e-11);
    }
}

#[test]
fn perturbed_table_is_detected() {
    let mut r = rng(8);
    let x = random_lie(&mut r, 2, 5, 0.8);
    let y = random_lie(&mut r, 2, 5, 0.8);
    let good = bch2(&x, &y, &BchTable::standard()).unwrap();
    let bad = bch2(&x, &y, &BchTable::standard().perturbed("[x2,[x1,[x1,x2]]]", 1e-6).unwrap()).unwrap();
    assert!(good.tensor().max_abs_diff(bad.tensor()).unwrap() > 1e-8);
    assert!(BchTable::standard().perturbed("[x9,x1]", 1.0).is_err());
}

#[test]
fn tabulated_bch_rejects_level_above_table() {
    let x = LieElement::<f64>::generator(2, 6, 0).unwrap();
    assert!(matches!(bch(&[x.clone(), x], BchMethod::Tabulated), Err(Error::InvalidParameter(_))));
}

#[test]
fn domain_errors() {
    let mut t = TruncatedTensor::<f64>::one(2, 3).unwrap();
    assert!(matches!(t.exp(), Err(Error::Domain(_))));
    t.set(&[], 2.0).unwrap();
    assert!(matches!(t.log(), Err(Error::Domain(_))));
    let z = TruncatedTensor::<f64>::zeros(2, 3).unwrap();
    assert!(matches!(z.inverse(), Err(Error::Domain(_))));
    let a = TruncatedTensor::<f64>::zeros(2, 3).unwrap();
    let b = TruncatedTensor::<f64>::zeros(3, 3).unwrap();
    assert!(matches!(a.try_mul(&b), Err(Error::DimensionMismatch(_))));
}

#[test]
fn nested_rearrange_examples() {
    let e = BracketExpr::parse("[[x1,x2],x3]").unwrap();
    assert_eq!(nested_rearrange(&e).to_string(), "[x1,[x2,x3]] - [x2,[x1,x3]]");
    let e = BracketExpr::parse("[[x1,x2],[x3,x4]]").unwrap();
    assert_eq!(nested_rearrange(&e).to_string(), "[x1,[x2,[x3,x4]]] - [x2,[x1,[x3,x4]]]");
    let e = BracketExpr::parse("[x1,x1]").unwrap();
    assert!(nested_rearrange(&e).is_zero());
}

#[test]
fn four_generator_basis_identity() {
    // [[x1,x2],[x3,x4]] written with x1,x2 innermost: [x4,[x3,[x1,x2]]] - [x3,[x4,[x1,x2]]]
    let mut r = rng(9);
    let gens: Vec<_> = (0..4).map(|_| random_lie(&mut r, 3, 4, 1.0)).collect();
    let lhs = BracketExpr::parse("[[x1,x2],[x3,x4]]").unwrap().eval(&gens).unwrap();
    let a = BracketExpr::parse("[x4,[x3,[x1,x2]]]").unwrap().eval(&gens).unwrap();
    let b = BracketExpr::parse("[x3,[x4,[x1,x2]]]").unwrap().eval(&gens).unwrap();
    assert!(lhs.tensor().max_abs_diff((&a - &b).tensor()).unwrap() < 1e-12);
}

#[test]
fn malformed_expressions_are_rejected() {
    for bad in ["", "[x1,x2", "[x1 x2]", "x0", "[x1,]", "y1", "[x1,x2]]", "[[x1,x2],x3"] {
        assert!(
            matches!(BracketExpr::parse(bad), Err(Error::MalformedExpression { .. })),
            "accepted {bad:?}"
        );
    }
    assert_eq!(BracketExpr::parse(" [ x1 , [x2,x3] ] ").unwrap().to_string(), "[x1,[x2,x3]]");
}

#[test]
fn lie_membership() {
    let mut r = rng(10);
    for _ in 0..50 {
        let x = random_lie(&mut r, 3, 4, 1.0);
        assert!(x.tensor().is_lie(1e-12));
        assert!(x.exp().log().tensor().is_lie(1e-10));
    }
    let mut t = TruncatedTensor::<f64>::zeros(2, 2).unwrap();
    t.set(&[0, 1], 1.0).unwrap();
    assert!(!t.is_lie(1e-12));
    assert!(LieElement::from_tensor(t, 1e-12).is_err());
}

#[test]
fn level_two_constructor_areas() {
    let x = LieElement::from_level2(3, &[1.0, 2.0, 3.0], &[0.5, -0.25, 2.0]).unwrap();
    assert_eq!(x.areas(), vec![0.5, -0.25, 2.0]);
    let t = x.tensor();
    assert_eq!(t.get(&[0, 1]), Some(0.5));
    assert_eq!(t.get(&[1, 0]), Some(-0.5));
    assert_eq!(t.get(&[1, 2]), Some(2.0));
    assert!(t.is_lie(1e-15));
}

#[test]
fn single_precision_round_trip() {
    let x = LieElement::<f32>::from_level2(3, &[0.3, -0.2], &[0.1]).unwrap();
    let y = LieElement::<f32>::from_level1(3, &[-0.1, 0.4]).unwrap();
    let g = &x.exp() * &y.exp();
    let h = bch(&[x, y], BchMethod::Tabulated).unwrap();
    assert!(g.log().tensor().max_abs_diff(h.tensor()).unwrap() < 1e-6);
}

#[test]
fn render_lists_words() {
    let x = LieElement::<f64>::from_level2(2, &[1.0, 0.0], &[0.5]).unwrap();
    assert_eq!(x.tensor().render(), "1: 1\n12: 0.5\n21: -0.5\n");
}

fn arb_expr(max_gen: usize) -> impl Strategy<Value = BracketExpr> {
    let leaf = (1..=max_gen).prop_map(BracketExpr::Gen);
    leaf.prop_recursive(4, 16, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| BracketExpr::br(a, b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rearrangement_preserves_value(e in arb_expr(4), seed in any::<u64>()) {
        prop_assume!(e.degree() <= 5);
        let mut r = rng(seed);
        let gens: Vec<_> = (0..4).map(|_| random_lie(&mut r, 2, 5, 1.0)).collect();
        let lhs = e.eval(&gens).unwrap();
        let rhs = nested_rearrange(&e).eval(&gens).unwrap();
        prop_assert!(lhs.tensor().max_abs_diff(rhs.tensor()).unwrap() < 1e-10);
        prop_assert_eq!(BracketExpr::parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn dilation_is_a_homomorphism(seed in any::<u64>(), t in -3.0f64..3.0) {
        let mut r = rng(seed);
        let a = random_lie(&mut r, 2, 4, 0.8).exp();
        let b = random_lie(&mut r, 2, 4, 0.8).exp();
        let lhs = (&a * &b).dilate(t);
        let rhs = &a.dilate(t) * &b.dilate(t);
        prop_assert!(lhs.tensor().max_abs_diff(rhs.tensor()).unwrap() < 1e-10);
        let na = a.homogeneous_norm();
        prop_assert!((a.dilate(t).homogeneous_norm() - t.abs() * na).abs() < 1e-9 * (1.0 + na));
    }

    #[test]
    fn homogeneous_norm_is_symmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_lie(&mut r, 3, 3, 1.0).exp();
        prop_assert!((g.homogeneous_norm() - g.inverse().homogeneous_norm()).abs() < 1e-10);
    }
}

#[test]
fn empty_bch_is_a_domain_error() {
    let xs: Vec<LieElement<f64>> = vec![];
    assert!(matches!(bch(&xs, BchMethod::ProductLog), Err(Error::Domain(_))));
}

#[test]
fn associativity_up_to_dimension_four() {
    let mut r = rng(11);
    for case in 0..60 {
        let (d, n) = (4, 1 + case % 5);
        let [a, b, c] = [0, 1, 2].map(|_| random_tensor(&mut r, d, n, 0.5));
        let lhs = &(&a * &b) * &c;
        let rhs = &a * &(&b * &c);
        assert!(lhs.max_abs_diff(&rhs).unwrap() < TOL * (1.0 + lhs.max_abs()));
    }
}

#[test]
fn telescoping_identity() {
    // prod a_j - prod b_j = sum_j (prod_{i<j} a_i)(a_j - b_j)(prod_{i>j} b_i)
    let mut r = rng(12);
    for case in 0..200 {
        let (d, n) = (1 + case % 3, 1 + case % 5);
        let m = 2 + case % 4;
        let a: Vec<_> = (0..m).map(|_| random_tensor(&mut r, d, n, 0.6)).collect();
        let b: Vec<_> = (0..m).map(|_| random_tensor(&mut r, d, n, 0.6)).collect();
        let prod = |v: &[TruncatedTensor<f64>]| v.iter().skip(1).fold(v[0].clone(), |acc, x| &acc * x);
        let lhs = &prod(&a) - &prod(&b);
        let mut rhs = TruncatedTensor::zeros(d, n).unwrap();
        for j in 0..m {
            let mut term = &a[j] - &b[j];
            for ai in a[..j].iter().rev() {
                term = ai * &term;
            }
            for bi in &b[j + 1..] {
                term = &term * bi;
            }
            rhs += &term;
        }
        assert!(lhs.max_abs_diff(&rhs).unwrap() <= TOL * (1.0 + lhs.max_abs()), "case {case}");
    }
}

#[test]
fn pure_level_norms_multiply() {
    let mut r = rng(13);
    for _ in 0..100 {
        let d = 3;
        let (i, j) = (r.random_range(0..3usize), r.random_range(0..3usize));
        let mut a = TruncatedTensor::zeros(d, 5).unwrap();
        let mut b = TruncatedTensor::zeros(d, 5).unwrap();
        for v in a.level_mut(i) {
            *v = common::gauss(&mut r);
        }
        for v in b.level_mut(j) {
            *v = common::gauss(&mut r);
        }
        let c = &a * &b;
        let want = a.level_norm(i) * b.level_norm(j);
        assert!((c.level_norm(i + j) - want).abs() < 1e-12 * want.max(1.0));
    }
}

#[test]
fn small_worked_examples() {
    let e1 = LieElement::<f64>::generator(2, 2, 0).unwrap();
    let e2 = LieElement::<f64>::generator(2, 2, 1).unwrap();
    let p = &e1.exp() * &e2.exp();
    let t = p.tensor();
    let want = [((vec![]), 1.0), (vec![0], 1.0), (vec![1], 1.0), (vec![0, 0], 0.5), (vec![1, 1], 0.5), (vec![0, 1], 1.0), (vec![1, 0], 0.0)];
    for (w, v) in want {
        assert_eq!(t.get(&w), Some(v), "word {w:?}");
    }
    assert_eq!(e1.exp().tensor().render(), "(): 1\n1: 1\n11: 0.5\n");
    let br = e1.bracket(&e2).unwrap();
    assert_eq!(br.tensor().render(), "12: 1\n21: -1\n");
    let x = &e1 + &br;
    assert!(x.exp().log().tensor().max_abs_diff(x.tensor()).unwrap() < 1e-15);
    // log(exp e1 exp e2) = e1 + e2 + 1/2 [e1, e2]
    let mut want = &e1 + &e2;
    want.axpy(0.5, &br);
    assert!(p.log().tensor().max_abs_diff(want.tensor()).unwrap() < 1e-15);
    // homogeneous norms
    assert_eq!(GroupElement::<f64>::identity(2, 2).unwrap().homogeneous_norm(), 0.0);
    assert!((e1.scale(-3.0).exp().homogeneous_norm() - 3.0).abs() < 1e-15);
    assert!((br.exp().homogeneous_norm() - 2f64.powf(0.25)).abs() < 1e-15);
    // 1 (x) a = a
    let one = TruncatedTensor::<f64>::one(2, 2).unwrap();
    assert_eq!(&one * p.tensor(), p.tensor().clone());
}

#[test]
fn two_variable_bch_third_order_term() {
    // degree-3 part of bch([x,y]) is (1/12)([x,[x,y]] + [y,[y,x]])
    let mut r = rng(14);
    let x = random_lie(&mut r, 2, 3, 1.0);
    let y = random_lie(&mut r, 2, 3, 1.0);
    let h = bch(&[x.clone(), y.clone()], BchMethod::ProductLog).unwrap();
    let xy = x.bracket(&y).unwrap();
    let yx = y.bracket(&x).unwrap();
    let mut want = &x + &y;
    want.axpy(0.5, &xy);
    want.axpy(1.0 / 12.0, &x.bracket(&xy).unwrap());
    want.axpy(1.0 / 12.0, &y.bracket(&yx).unwrap());
    assert!(h.tensor().max_abs_diff(want.tensor()).unwrap() < 1e-12);
    // level 2 n-ary form: sum x_i + 1/2 sum_{i<j} [x_i, x_j]
    let xs: Vec<_> = (0..5).map(|_| random_lie(&mut r, 3, 2, 1.0)).collect();
    let mut want = xs.iter().skip(1).fold(xs[0].clone(), |a, x| &a + x);
    for i in 0..5 {
        for j in i + 1..5 {
            want.axpy(0.5, &xs[i].bracket(&xs[j]).unwrap());
        }
    }
    let h = bch(&xs, BchMethod::Tabulated).unwrap();
    assert!(h.tensor().max_abs_diff(want.tensor()).unwrap() < 1e-12);
}

#[test]
fn bracket_identities() {
    let mut r = rng(15);
    for _ in 0..100 {
        let [x, y, z] = [0, 1, 2].map(|_| random_lie(&mut r, 3, 4, 1.0));
        assert!(x.bracket(&x).unwrap().tensor().max_abs() < 1e-15);
        let j = &(&x.bracket(&y.bracket(&z).unwrap()).unwrap() + &y.bracket(&z.bracket(&x).unwrap()).unwrap())
            + &z.bracket(&x.bracket(&y).unwrap()).unwrap();
        assert!(j.tensor().max_abs() < 1e-12);
        let anti = &x.bracket(&y).unwrap() + &y.bracket(&x).unwrap();
        assert!(anti.tensor().max_abs() < 1e-15);
    }
}
