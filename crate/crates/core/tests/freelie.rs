use std::sync::Arc;

use bautlab_core::exactla;
use bautlab_core::freelie::{Classifier, Derivations, FreeLie, Generator, Monomial, QuillenModel};
use bautlab_core::{Scalar, Q};
use proptest::prelude::*;

/// Dimensions of the free graded Lie algebra from the identity
/// prod_w (1+t^w)^{l_w, w odd} (1-t^w)^{-l_w, w even} = 1/(1 - sum_v t^|v|).
fn witt_oracle(degrees: &[i32], hi: usize) -> Vec<i64> {
    // target series T(t) = 1/(1 - sum t^|v|)
    let mut target = vec![0i128; hi + 1];
    target[0] = 1;
    for n in 1..=hi {
        for &d in degrees {
            let d = d as usize;
            if d <= n {
                target[n] += target[n - d];
            }
        }
    }
    let mut dims = vec![0i64; hi + 1];
    // running product P(t) of the factors fixed so far
    let mut product = vec![0i128; hi + 1];
    product[0] = 1;
    for w in 1..=hi {
        // the factor for degree w contributes l_w t^w at first order
        let l = target[w] - product[w];
        dims[w] = l as i64;
        for _ in 0..l.max(0) {
            let mut next = vec![0i128; hi + 1];
            if w % 2 == 1 {
                for n in 0..=hi {
                    next[n] += product[n];
                    if n + w <= hi {
                        next[n + w] += product[n];
                    }
                }
            } else {
                // multiply by 1/(1-t^w)
                for n in 0..=hi {
                    next[n] = product[n] + if n >= w { next[n - w] } else { 0 };
                }
            }
            product = next;
        }
    }
    dims[1..].to_vec()
}

fn dims(degrees: &[(&str, i32)], hi: i32) -> Vec<i64> {
    let gens = degrees.iter().map(|(n, d)| Generator::new(*n, *d)).collect();
    FreeLie::<Q>::new(gens, hi).unwrap().dims().into_iter().map(|d| d as i64).collect()
}

#[test]
fn witt_identity_one_odd() {
    assert_eq!(dims(&[("x", 1)], 10), witt_oracle(&[1], 10));
}

#[test]
fn witt_identity_one_even() {
    assert_eq!(dims(&[("y", 2)], 10), witt_oracle(&[2], 10));
}

#[test]
fn witt_identity_two_odd() {
    let d = dims(&[("x", 1), ("y", 1)], 10);
    assert_eq!(&d[..3], &[2, 3, 2]);
    assert_eq!(d, witt_oracle(&[1, 1], 10));
}

#[test]
fn witt_identity_mixed() {
    assert_eq!(dims(&[("x", 1), ("y", 2), ("z", 3)], 9), witt_oracle(&[1, 2, 3], 9));
    assert_eq!(dims(&[("a", 2), ("b", 2)], 12), witt_oracle(&[2, 2], 12));
}

fn random_monomial(names: &[&str], shape: &[u8]) -> Monomial {
    fn build(names: &[&str], shape: &[u8], pos: &mut usize, depth: usize) -> Monomial {
        let b = shape.get(*pos).copied().unwrap_or(0);
        *pos += 1;
        if depth == 0 || b % 3 == 0 {
            Monomial::generator(names[b as usize % names.len()])
        } else {
            let l = build(names, shape, pos, depth - 1);
            let r = build(names, shape, pos, depth - 1);
            Monomial::bracket(l, r)
        }
    }
    build(names, shape, &mut 0, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn table_agrees_with_tensor_algebra(a in proptest::collection::vec(any::<u8>(), 16)) {
        let l = FreeLie::<Q>::new(vec![Generator::new("x", 1), Generator::new("y", 2)], 9).unwrap();
        let m = random_monomial(&["x", "y"], &a);
        if l.monomial_degree(&m).unwrap() <= 9 {
            prop_assert_eq!(l.normal_form(&m).unwrap(), l.tensor_normal_form(&m).unwrap());
        }
    }

    #[test]
    fn jacobiator_vanishes(a in proptest::collection::vec(any::<u8>(), 16),
                           b in proptest::collection::vec(any::<u8>(), 16),
                           c in proptest::collection::vec(any::<u8>(), 16)) {
        let l = FreeLie::<Q>::new(vec![Generator::new("x", 1), Generator::new("y", 1)], 8).unwrap();
        let names = ["x", "y"];
        let (x, y, z) = (random_monomial(&names, &a), random_monomial(&names, &b), random_monomial(&names, &c));
        let deg = |m: &Monomial| l.monomial_degree(m).unwrap();
        prop_assume!(deg(&x) + deg(&y) + deg(&z) <= 8);
        let br = |p: &Monomial, q: &Monomial| Monomial::bracket(p.clone(), q.clone());
        let t1 = l.normal_form(&br(&x, &br(&y, &z))).unwrap();
        let t2 = l.normal_form(&br(&br(&x, &y), &z)).unwrap();
        let t3 = l.normal_form(&br(&y, &br(&x, &z))).unwrap();
        let s = Q::sign((deg(&x) * deg(&y)) as i64);
        let j = exactla::sub(&exactla::sub(&t1, &t2), &exactla::scale(&t3, &s));
        prop_assert!(j.is_empty());
    }

    #[test]
    fn derivations_are_linear_and_leibniz(c1 in -3i64..4, c2 in -3i64..4) {
        let l = FreeLie::<Q>::new(vec![Generator::new("x", 1), Generator::new("y", 1)], 6).unwrap();
        let xy = l.normal_form(&"[x,y]".parse().unwrap()).unwrap();
        let xx = l.normal_form(&"[x,x]".parse().unwrap()).unwrap();
        let v1 = vec![xy.clone(), Vec::new()];
        let v2 = vec![xx.clone(), xy.clone()];
        let (q1, q2) = (Q::from_int(c1), Q::from_int(c2));
        let both = vec![exactla::add(&exactla::scale(&xy, &q1), &exactla::scale(&xx, &q2)), exactla::scale(&xy, &q2)];
        let t1 = l.extend_derivation(&v1, 1).unwrap();
        let t2 = l.extend_derivation(&v2, 1).unwrap();
        let t = l.extend_derivation(&both, 1).unwrap();
        let alg = l.algebra();
        let n = alg.total_dim();
        for i in 0..n {
            let e = vec![(i, Q::from_int(1))];
            let lin = exactla::add(&exactla::scale(&t1.apply(&e), &Q::from_int(c1)), &exactla::scale(&t2.apply(&e), &Q::from_int(c2)));
            prop_assert_eq!(t.apply(&e), lin);
            for j in 0..n {
                let (a, b) = (alg.degree(i), alg.degree(j));
                if a + b + 1 > 6 { continue; }
                let f = vec![(j, Q::from_int(1))];
                let lhs = t.apply(&alg.bracket(&e, &f));
                let rhs = exactla::add(&alg.bracket(&t.apply(&e), &f), &exactla::scale(&alg.bracket(&e, &t.apply(&f)), &Q::sign(a as i64)));
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn derivation_algebra_squares_to_zero() {
    let model = QuillenModel::<Q>::new(vec![Generator::new("x", 1), Generator::new("y", 1)], &[], 7, false).unwrap();
    let der = Derivations::new(&model).unwrap();
    let report = der.algebra().validate();
    assert!(report.is_valid(), "{:?}", report.defects);
    let c = Classifier::new(&model, Arc::new(der)).unwrap();
    let report = c.algebra().validate();
    assert!(report.is_valid(), "{:?}", report.defects);
}

#[test]
fn semidirect_action_formula() {
    let model = QuillenModel::<Q>::new(vec![Generator::new("x", 1)], &[], 6, false).unwrap();
    let der = Arc::new(Derivations::new(&model).unwrap());
    let c = Classifier::new(&model, der.clone()).unwrap();
    let g = c.algebra();
    // θ(x) = [x,x] has degree 1; [θ, sx] = -s[x,x]
    let theta = c.derivation_index(der.index_of(0, 1).unwrap()).unwrap();
    let sx = c.suspension_index(0).unwrap();
    let sxx = c.suspension_index(1).unwrap();
    assert_eq!(g.bracket_basis(theta, sx), vec![(sxx, -Q::from_int(1))]);
    // d(sx) = ad_x
    assert_eq!(g.differential_of(sx), &[(theta, Q::from_int(1))]);
}
