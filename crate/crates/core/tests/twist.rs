use std::sync::Arc;

use bautlab_core::ce::CeComplex;
use bautlab_core::dgla::{DefectKind, DgLie, DgLieBuilder, DgLieMorphism};
use bautlab_core::freelie::{parse_combination, Classifier, Derivations, Generator, Monomial, QuillenModel};
use bautlab_core::twist::{
    chi_along, hom_outer_action, outer_action_from_morphism, tautological_outer_action, twist_identity_check,
    Convolution, StructureAlgebra,
};
use bautlab_core::{BasisElement, Error, GradedSpace, Scalar, Window, Q};

fn model(gens: &[(&str, i32)], diff: &[(&str, &str)], hi: i32) -> QuillenModel<Q> {
    let g = gens.iter().map(|(n, d)| Generator::new(*n, *d)).collect();
    let d: Vec<(String, Vec<(Q, Monomial)>)> =
        diff.iter().map(|(n, e)| (n.to_string(), parse_combination(e).unwrap())).collect();
    QuillenModel::new(g, &d, hi, false).unwrap()
}

fn q(n: i64) -> Q {
    Q::from_int(n)
}

fn line() -> StructureAlgebra<Q> {
    StructureAlgebra::abelian(&[("g1".to_string(), 1)]).unwrap()
}

/// Basis a, b in degree 1 and c = [a, b] in degree 2.
fn heisenberg() -> StructureAlgebra<Q> {
    let space = GradedSpace::finite(
        Window::new(1, 2).unwrap(),
        [("a", 1), ("b", 1), ("c", 2)].map(|(n, d)| BasisElement { name: n.into(), degree: d }),
    )
    .unwrap();
    let mut b = DgLieBuilder::new(Arc::new(space));
    b.set_bracket(0, 1, vec![(2, q(1))]).unwrap();
    StructureAlgebra::new(b.build()).unwrap()
}

#[test]
fn convolution_dimensions_for_the_two_sphere() {
    let m = model(&[("x", 1)], &[], 6);
    let c = CeComplex::new(Arc::new(m.algebra().clone()), 6, true).unwrap();
    let h = Convolution::new(&c, &line(), -3).unwrap();
    let dims: Vec<usize> = (-3..=1).map(|n| h.space().dim(n)).collect();
    assert_eq!(dims, vec![1, 1, 1, 0, 0]);
    assert!(h.algebra().is_abelian());
    assert!(h.algebra().validate().is_valid());
}

#[test]
fn abelian_structure_on_trivial_differential_is_inert() {
    let lie = DgLie::<Q>::abelian(Arc::new(
        GradedSpace::finite(
            Window::new(1, 2).unwrap(),
            [("u", 1), ("v", 2)].map(|(n, d)| BasisElement { name: n.into(), degree: d }),
        )
        .unwrap(),
    ));
    let c = CeComplex::new(Arc::new(lie), 6, true).unwrap();
    let h = Convolution::new(&c, &line(), -4).unwrap();
    assert!(h.algebra().is_abelian());
    assert!((0..h.space().total_dim()).all(|i| h.algebra().differential_of(i).is_empty()));
}

#[test]
fn nonabelian_convolution_is_a_dg_lie_algebra() {
    let m = model(&[("x", 1), ("y", 3)], &[("y", "-1/2*[x,x]")], 7);
    let c = CeComplex::new(Arc::new(m.algebra().clone()), 7, false).unwrap();
    let h = Convolution::new(&c, &heisenberg(), -4).unwrap();
    assert!(!h.algebra().is_abelian());
    let report = h.algebra().validate();
    assert!(report.is_valid(), "{:?}", report.defects);
    assert!(report.checks > 0);
}

#[test]
fn unbounded_structure_is_rejected() {
    let m = model(&[("a", 1), ("b", 1)], &[], 6);
    assert_eq!(StructureAlgebra::new(m.algebra().clone()).unwrap_err(), Error::UnboundedStructureAlgebra);
}

#[test]
fn maurer_cartan_detection() {
    let m = model(&[("x", 1)], &[], 6);
    let c = CeComplex::new(Arc::new(m.algebra().clone()), 6, false).unwrap();
    let pi = heisenberg();
    let h = Convolution::new(&c, &pi, -3).unwrap();
    assert!(h.is_mc(&[]));
    let sx = c.index_of(&[0]).unwrap();
    let sxx = c.index_of(&[1]).unwrap();
    let tau = h.element(&[(sx, vec![(0, q(1))])]).unwrap();
    assert!(h.is_mc(&tau));
    let doubled = h.element(&[(sx, vec![(0, q(1)), (1, q(2))])]).unwrap();
    assert!(!h.is_mc(&doubled));
    let tau = h.element(&[(sx, vec![(0, q(1)), (1, q(-3))]), (sxx, vec![(2, q(-6))])]).unwrap();
    assert!(h.is_mc(&tau));
    let twisted = h.twist_by(&tau).unwrap();
    assert!(twisted.validate().is_valid());
    let bad = h.element(&[(c.index_of(&[0, 0]).unwrap(), vec![(2, q(1))])]).unwrap();
    assert!(matches!(h.twist_by(&bad), Err(Error::DegreeMismatch(_))));
}

fn s2_classifier(hi: i32) -> (QuillenModel<Q>, Classifier<Q>) {
    let m = model(&[("x", 1)], &[], hi);
    let der = Arc::new(Derivations::new(&m).unwrap());
    let cl = Classifier::new(&m, der).unwrap();
    (m, cl)
}

#[test]
fn tautological_outer_action_is_valid() {
    for m in [
        model(&[("x", 1)], &[], 6),
        model(&[("x", 1), ("y", 3)], &[("y", "-1/2*[x,x]")], 7),
        model(&[("a", 1), ("b", 1)], &[], 5),
    ] {
        let der = Arc::new(Derivations::new(&m).unwrap());
        let cl = Classifier::new(&m, der).unwrap();
        let l = Arc::new(m.algebra().clone());
        let action = tautological_outer_action(&cl, l.clone()).unwrap();
        let report = action.validate();
        assert!(report.is_valid(), "{:?}", report.defects);
        let ext = action.semidirect().unwrap();
        assert!(ext.algebra.validate().is_valid());

        let gens: Vec<usize> = (0..m.generators().len()).map(|g| m.free().generator_basis(g)).collect();
        let phi = action.to_classifier_morphism(&cl, &gens).unwrap();
        let back = outer_action_from_morphism(&phi, &cl, l).unwrap();
        for x in 0..cl.algebra().total_dim() {
            assert_eq!(back.xi_basis(x), action.xi_basis(x));
            for a in 0..m.algebra().total_dim() {
                assert_eq!(back.act_basis(x, a), action.act_basis(x, a));
            }
        }
    }
}

#[test]
fn zero_morphism_gives_the_trivial_action() {
    let (m, cl) = s2_classifier(6);
    let g = cl.algebra().clone();
    let zero = DgLieMorphism::new(g.clone(), g.clone(), vec![Vec::new(); g.total_dim()]).unwrap();
    let action = outer_action_from_morphism(&zero, &cl, Arc::new(m.algebra().clone())).unwrap();
    assert!((0..g.total_dim()).all(|x| action.xi_basis(x).is_empty()));
    assert!(action.validate().is_valid());
}

#[test]
fn perturbed_twist_is_detected_on_both_sides() {
    let m = model(&[("x", 1), ("y", 3)], &[("y", "-1/2*[x,x]")], 7);
    let der = Arc::new(Derivations::new(&m).unwrap());
    let cl = Classifier::new(&m, der).unwrap();
    let l = Arc::new(m.algebra().clone());
    let action = tautological_outer_action(&cl, l.clone()).unwrap();
    let g = cl.algebra();
    let mut tried = 0;
    for x in 0..g.total_dim() {
        let d = g.degree(x) - 1;
        for k in l.space().range(d) {
            let bad = action.perturb_xi(x, k, q(1));
            let report = bad.validate();
            assert!(!report.is_valid(), "ξ({}) perturbed by {}", g.name(x), l.name(k));
            let ext = bad.semidirect_unchecked().unwrap();
            assert!(!ext.algebra.validate().is_valid(), "ξ({}) perturbed by {}", g.name(x), l.name(k));
            tried += 1;
        }
    }
    assert!(tried > 3);
    let x = cl.suspension_index(l.space().find("x").unwrap()).unwrap();
    let bad = action.perturb_xi(x, l.space().find("x").unwrap(), q(1));
    assert!(bad.validate().has(DefectKind::MixedDifferential));
}

type Fixture = (CeComplex<Q>, Convolution<Q>, Vec<(usize, Q)>, Classifier<Q>);

fn u1_over_s2(k: i64, reduced: bool) -> Fixture {
    let (m, cl) = s2_classifier(6);
    let c = CeComplex::new(Arc::new(m.algebra().clone()), 4, reduced).unwrap();
    let h = Convolution::new(&c, &line(), -2).unwrap();
    let tau = h.element(&[(c.index_of(&[0]).unwrap(), vec![(0, q(k))])]).unwrap();
    (c, h, tau, cl)
}

#[test]
fn hom_outer_action_and_twist_identity() {
    for k in [0, 1, 2] {
        let (c, h, tau, cl) = u1_over_s2(k, false);
        assert!(h.is_mc(&tau));
        let g = cl.algebra().clone();
        let ids: Vec<Vec<(usize, Q)>> = (0..g.total_dim()).map(|i| vec![(i, q(1))]).collect();
        let chi = |x: usize| chi_along(&c, &cl, &ids, x);
        let twisted = Arc::new(h.twist_by(&tau).unwrap());
        let action = hom_outer_action(&h, twisted, &tau, g.clone(), chi).unwrap();
        let report = action.validate();
        assert!(report.is_valid(), "k = {k}: {:?}", report.defects);
        let ext = action.semidirect().unwrap();
        assert!(ext.algebra.validate().is_valid());
        let identity = twist_identity_check(&h, &tau, g, chi).unwrap();
        assert!(identity.holds(), "{:?}", identity.mismatches);
    }
}

#[test]
fn twist_identity_with_nonabelian_structure() {
    let (m, cl) = s2_classifier(6);
    let c = CeComplex::new(Arc::new(m.algebra().clone()), 5, false).unwrap();
    let h = Convolution::new(&c, &heisenberg(), -3).unwrap();
    let sx = c.index_of(&[0]).unwrap();
    let sxx = c.index_of(&[1]).unwrap();
    let tau = h.element(&[(sx, vec![(0, q(1)), (1, q(-3))]), (sxx, vec![(2, q(-6))])]).unwrap();
    assert!(h.is_mc(&tau));
    let g = cl.algebra().clone();
    let ids: Vec<Vec<(usize, Q)>> = (0..g.total_dim()).map(|i| vec![(i, q(1))]).collect();
    let chi = |x: usize| chi_along(&c, &cl, &ids, x);
    let twisted = Arc::new(h.twist_by(&tau).unwrap());
    let action = hom_outer_action(&h, twisted, &tau, g.clone(), chi).unwrap();
    let report = action.validate();
    assert!(report.is_valid(), "{:?}", report.defects);
    assert!(twist_identity_check(&h, &tau, g, chi).unwrap().holds());
}
