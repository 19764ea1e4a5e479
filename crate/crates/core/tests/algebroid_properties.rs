#![allow(clippy::needless_range_loop, clippy::type_complexity)]

use hoalg::algebroid::{cotangent_pairing, tangent_pairing, AlgebroidStructure, TEVector, TStarEVector};
use hoalg::verify::{random_algebroid, rng};
use hoalg::{Error, Jet};
use proptest::prelude::*;

fn structure(seed: u64) -> AlgebroidStructure {
    let mut r = rng(seed);
    random_algebroid(&mut r, seed % 2 == 1).unwrap()
}

fn vec3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 3)
}

fn vec2() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 2)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kappa_is_symmetric(seed in 0u64..1000, x in vec2(), u in vec3(), w in vec3(), ydot in vec3()) {
        let a = structure(seed);
        let at = a.at(&x, &0.0).unwrap();
        let v = TEVector { x, y: u.clone(), xdot: at.anchor(&w), ydot };
        let back = a.kappa_apply(&a.kappa_apply(&v, &w).unwrap(), &u).unwrap();
        prop_assert!(max_diff(&back.xdot, &v.xdot) < 1e-12 && max_diff(&back.ydot, &v.ydot) < 1e-12);
        prop_assert_eq!(back.y, v.y);
    }

    #[test]
    fn kappa_invariant_vectors_are_the_second_order_ones(seed in 0u64..1000, x in vec2(), y in vec3(), ydot in vec3(), bump in vec2()) {
        let a = structure(seed);
        let at = a.at(&x, &0.0).unwrap();
        let v = TEVector { x: x.clone(), y: y.clone(), xdot: at.anchor(&y), ydot: ydot.clone() };
        let fixed = a.kappa_apply(&v, &y).unwrap();
        prop_assert!(max_diff(&fixed.xdot, &v.xdot) < 1e-12 && max_diff(&fixed.ydot, &v.ydot) < 1e-12);
        prop_assume!(bump.iter().any(|b| b.abs() > 1e-3));
        let xdot: Vec<f64> = v.xdot.iter().zip(&bump).map(|(p, q)| p + q).collect();
        let off = TEVector { x, y: y.clone(), xdot, ydot };
        let is_not_in_relation = matches!(a.kappa_apply(&off, &y), Err(Error::NotInRelation { .. }));
        prop_assert!(is_not_in_relation);
    }

    #[test]
    fn anchor_intertwines_kappa_with_the_flip(seed in 0u64..1000, x in vec2(), u in vec3(), w in vec3(), ydot in vec3()) {
        // Tρ(x, y, ẋ, ẏ) = (x, ρy, ẋ, (Dρ·ẋ)y + ρẏ)
        let a = structure(seed);
        let t_rho = |v: &TEVector| -> (Vec<f64>, Vec<f64>, Vec<f64>) {
            let seeded: Vec<Jet> = v.x.iter().zip(&v.xdot).map(|(p, q)| Jet::new(vec![*p, *q]).unwrap()).collect();
            let at = a.at(&seeded, &Jet::constant_of(1, 0.0)).unwrap();
            let y: Vec<Jet> = v.y.iter().zip(&v.ydot).map(|(p, q)| Jet::new(vec![*p, *q]).unwrap()).collect();
            let img = at.anchor(&y);
            (img.iter().map(|j| j.coeffs()[0]).collect(), v.xdot.clone(), img.iter().map(|j| j.coeffs()[1]).collect())
        };
        let at = a.at(&x, &0.0).unwrap();
        let v = TEVector { x, y: u, xdot: at.anchor(&w), ydot };
        let (v0, v1, v2) = t_rho(&v);
        let (k0, k1, k2) = t_rho(&a.kappa_apply(&v, &w).unwrap());
        prop_assert!(max_diff(&k0, &v1) < 1e-12 && max_diff(&k1, &v0) < 1e-12);
        prop_assert!(max_diff(&k2, &v2) < 1e-10, "{k2:?} vs {v2:?}");
    }

    #[test]
    fn epsilon_is_dual_to_kappa(seed in 0u64..1000, x in vec2(), u in vec3(), w in vec3(), ydot in vec3(), p in vec2(), piv in vec3()) {
        let a = structure(seed);
        let at = a.at(&x, &0.0).unwrap();
        let v = TEVector { x: x.clone(), y: u, xdot: at.anchor(&w), ydot };
        let cov = TStarEVector { x, y: w.clone(), p, piv };
        let lhs = tangent_pairing(&a.epsilon_apply(&cov).unwrap(), &v).unwrap();
        let rhs = cotangent_pairing(&cov, &a.kappa_apply(&v, &w).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }
}

#[test]
fn presets_satisfy_axioms() {
    for a in [
        AlgebroidStructure::tangent(3),
        AlgebroidStructure::lie_preset("so3-like").unwrap(),
        AlgebroidStructure::lie_preset("heis3-like").unwrap(),
        AlgebroidStructure::affine_heis("x1").unwrap(),
    ] {
        let rep = a.check_axioms_default(32, -1.0, 1.0, 1e-9).unwrap();
        assert!(rep.pass, "{}: {rep:?}", a.label());
    }
}
