mod common;

use common::{c, rng};
use lck_core::fields::generators::{self, TrigPoly};
use lck_core::fields::*;
use lck_core::lck::*;
use lck_core::{Error, C64};
use rand::Rng;

fn surface() -> TorusGeometry {
    TorusGeometry::new(2, 16).unwrap()
}

fn threefold() -> TorusGeometry {
    TorusGeometry::new(3, 8).unwrap()
}

fn diff(a: &FormField, b: &FormField) -> f64 {
    a.sub(b).unwrap().max_abs()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn flat_metric_has_no_torsion() {
    for geom in [surface(), threefold()] {
        let m = generators::flat(geom);
        let lee = lee_form(&m).unwrap();
        assert!(lee.theta01().max_abs() < 1e-12);
        assert!(lee.prim01().max_abs() < 1e-12);
        assert!(functional_l(&m).unwrap().value < 1e-20);
        let d = classify(&m).unwrap();
        for (k, v) in d.entries() {
            if k != "n" && k != "margin" {
                assert!(v <= 1e-10, "{k} = {v}");
            }
        }
    }
    let g = surface();
    let m = generators::flat(g);
    assert!(functional_curly_l(&m).unwrap() < 1e-20);
    let (l, r) = tau_bar_star_theta(&m).unwrap();
    assert!(l.max_abs() < 1e-20 && r.max_abs() < 1e-20);
    let t = threefold();
    let rho = generators::random_fourier(t, 4, 0.2, 1).unwrap();
    assert!(functional_normalized(&rho, &generators::flat(t)).unwrap() < 1e-20);
}

#[test]
fn conformally_flat_lee_form_is_df() {
    for (geom, f, tol) in [
        (surface(), TrigPoly::sine(2, 0, 1, 0.1), 1e-10),
        (threefold(), TrigPoly::random(3, 9, 0.02, 1), 1e-8),
    ] {
        let m = generators::conformal_flat(geom, &f).unwrap();
        let lee = lee_form(&m).unwrap();
        let (df10, df01) = f.differential(geom);
        assert!(diff(lee.theta01(), &df01) < tol);
        assert!(diff(lee.theta10(), &df10) < tol);
        assert!(lee.prim01().max_abs() < 1e-10);
    }
}

#[test]
fn lee_data_invariants() {
    for (geom, seed) in [(surface(), 1), (threefold(), 2)] {
        let m = generators::random_fourier(geom, seed, 0.2, 1).unwrap();
        let lee = lee_form(&m).unwrap();
        assert!(diff(&lee.theta01().conjugate(), lee.theta10()) == 0.0);
        assert!(lee.reconstruction_defect(&m).unwrap() < 1e-9);
        assert!(lee.primitivity_defect(&m) < 1e-10);
        assert!(lee.theta01().max_abs() > 1e-3);
        if geom.n() == 3 {
            assert!(lee.prim01().max_abs() > 1e-3);
        } else {
            assert!(lee.prim01().max_abs() < 1e-12);
        }
    }
}

#[test]
fn surface_dtheta_is_primitive() {
    let geom = surface();
    for seed in 0..3 {
        let m = generators::random_fourier(geom, seed, 0.1, 1).unwrap();
        let dt = lee_form(&m).unwrap().dtheta();
        let mixed = dt.part(1, 1).unwrap();
        let worst = (0..geom.nodes()).map(|k| m.frame(k).lambda(&mixed.at(k)).max_abs()).fold(0.0, f64::max);
        assert!(worst < 1e-9, "seed {seed}: {worst:e}");
        assert!(mixed.max_abs() > 1e-4);
    }
}

#[test]
fn conformal_change_shifts_lee_form() {
    for (geom, seed) in [(surface(), 3), (threefold(), 4)] {
        let n = geom.n();
        let m = generators::random_fourier(geom, seed, 0.1, 1).unwrap();
        let f = TrigPoly::random(n, seed + 10, if n == 2 { 0.1 } else { 0.02 }, 1);
        let mf = generators::conformal(&m, &f).unwrap();
        let a = lee_form(&m).unwrap();
        let b = lee_form(&mf).unwrap();
        let (_, df01) = f.differential(geom);
        assert!(diff(b.theta01(), &a.theta01().add(&df01).unwrap()) < 1e-8);
        let ef: Vec<f64> = f.sample(geom).iter().map(|v| v.exp()).collect();
        assert!(diff(b.prim01(), &a.prim01().scale_by(&ef)) < 1e-8);
    }
}

#[test]
fn polynomial_conformal_factor_shifts_by_log_differential() {
    let geom = threefold();
    let m = generators::random_fourier(geom, 5, 0.1, 1).unwrap();
    let lam = TrigPoly::constant(3, 1.0).with_term(&[0, 1, 0, 1, 0, 0], 0.2, 0.1);
    let ml = generators::conformal_polynomial(&m, &lam).unwrap();
    let (_, dl01) = lam.differential(geom);
    let inv: Vec<f64> = lam.sample(geom).iter().map(|v| 1.0 / v).collect();
    let a = lee_form(&m).unwrap();
    let b = lee_form(&ml).unwrap();
    assert!(diff(b.theta01(), &a.theta01().add(&dl01.scale_by(&inv)).unwrap()) < 1e-12);
    assert!(diff(b.prim01(), &a.prim01().scale_by(&lam.sample(geom))) < 1e-12);
}

#[test]
fn functional_routes_agree() {
    for (geom, seed) in [(surface(), 5), (threefold(), 6)] {
        let m = generators::random_fourier(geom, seed, 0.2, 1).unwrap();
        let v = functional_l(&m).unwrap();
        assert!(v.value > 0.0);
        assert!(v.route_defect() < 1e-10);
        assert!(rel(functional_value(&m).unwrap(), v.value) < 1e-10);
        assert_eq!(v.regime, Regime::of(geom.n()).unwrap());
        let d = classify(&m).unwrap();
        assert!(rel(d.functional, v.value) < 1e-10);
    }
}

#[test]
fn homogeneity_in_constant_scale() {
    for geom in [threefold(), TorusGeometry::new(4, 4).unwrap()] {
        let n = geom.n() as i32;
        let m = generators::random_fourier(geom, 7, 0.2, 1).unwrap();
        let l = functional_value(&m).unwrap();
        for lambda in [0.5, 2.0, 3.0] {
            let ml = functional_value(&m.scale(lambda).unwrap()).unwrap();
            assert!(rel(ml, lambda.powi(n - 1) * l) < 1e-9, "n={n} λ={lambda}");
        }
    }
    let m = generators::random_fourier(surface(), 7, 0.2, 1).unwrap();
    let l = functional_value(&m).unwrap();
    assert!(rel(functional_value(&m.scale(3.0).unwrap()).unwrap(), l) < 1e-12);
}

#[test]
fn surface_functional_is_conformally_invariant() {
    let geom = surface();
    let m = generators::random_fourier(geom, 8, 0.1, 1).unwrap();
    let l = functional_value(&m).unwrap();
    let lam = TrigPoly::constant(2, 1.0).with_term(&[1, 0, 1, 0], 0.3, 0.2);
    let a = functional_value(&generators::conformal_polynomial(&m, &lam).unwrap()).unwrap();
    let b = functional_value(&generators::conformal(&m, &TrigPoly::random(2, 3, 0.2, 1)).unwrap()).unwrap();
    assert!(rel(a, l) < 1e-8);
    assert!(rel(b, l) < 1e-8);
}

#[test]
fn curly_functional_identities() {
    let geom = surface();
    for seed in 0..3 {
        let m = generators::random_fourier(geom, seed, 0.1, 1).unwrap();
        let l = functional_value(&m).unwrap();
        let cl = functional_curly_l(&m).unwrap();
        let x = mixed_square_integral(&m).unwrap();
        assert!((cl - 2.0 * l + x).abs() <= 1e-8 * l);
        assert!((2.0 * l + x).abs() <= 1e-8 * l);
        assert!(rel(cl, 4.0 * l) < 1e-8);
    }
    assert!(matches!(functional_curly_l(&generators::flat(threefold())), Err(Error::Dimension(3))));
}

#[test]
fn tau_bar_star_of_lee_form() {
    let geom = surface();
    let m = generators::random_fourier(geom, 11, 0.2, 1).unwrap();
    let (l, r) = tau_bar_star_theta(&m).unwrap();
    assert!(diff(&l, &r) < 1e-8);
    assert!(r.max_abs() > 1e-3);

    let f = TrigPoly::sine(2, 0, 1, 0.1).with_term(&[0, 1, 1, 0], 0.05, -0.02);
    let m = generators::conformal_flat(geom, &f).unwrap();
    let (l, r) = tau_bar_star_theta(&m).unwrap();
    let (_, df01) = f.differential(geom);
    let expected = FormField::from_fn(geom, 0, 0, |k, _| {
        let fr = m.frame(k);
        lck_core::exterior::PointForm::scalar(2, c(fr.norm_sqr(&df01.at(k)), 0.0))
    });
    assert!(diff(&l, &expected) < 1e-10);
    assert!(diff(&r, &expected) < 1e-10);
}

#[test]
fn gauduchon_criterion_on_conformal_family() {
    let geom = surface();
    let mut ratios = Vec::new();
    for t in [0.0, 1e-6, 1e-3, 0.05, 0.2] {
        let m = generators::conformal_flat(geom, &TrigPoly::sine(2, 0, 1, t)).unwrap();
        let d = classify(&m).unwrap();
        let g = d.gauduchon;
        let gl = d.gauduchon_lee.unwrap();
        if t == 0.0 {
            assert!(g < 1e-12 && gl < 1e-12);
        } else {
            assert!(g > 1e-9 * t && gl > 1e-9 * t, "t={t}");
            ratios.push(g / gl);
        }
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    assert!(hi / lo < 10.0, "{ratios:?}");
}

#[test]
fn normalized_functional_is_scale_invariant() {
    let geom = threefold();
    let m = generators::random_fourier(geom, 12, 0.2, 1).unwrap();
    let rho = generators::random_fourier(geom, 13, 0.2, 1).unwrap();
    let a = functional_normalized(&rho, &m).unwrap();
    let b = functional_normalized(&rho, &m.scale(2.0).unwrap()).unwrap();
    assert!(rel(b, a) < 1e-10);
    let back = a * normalizer(&rho, &m).unwrap().powi(2);
    assert!(rel(back, functional_value(&m).unwrap()) < 1e-12);
    assert!(matches!(functional_normalized(&rho, &generators::flat(surface())), Err(Error::GeometryMismatch | Error::Dimension(2))));
}

#[test]
fn classification_of_presets() {
    let g3 = threefold();
    let twist = generators::product_twist(g3, 0.2).unwrap();
    let d = classify(&twist).unwrap();
    assert!(d.margin > 0.0);
    assert!(d.kahler > 0.01);

    let presets = vec![
        generators::flat(g3),
        generators::conformal_flat(g3, &TrigPoly::random(3, 1, 0.1, 1)).unwrap(),
        generators::kahler_potential(g3, 2, 0.2, 1).unwrap(),
        generators::random_fourier(g3, 3, 0.1, 1).unwrap(),
        twist,
        generators::flat(surface()),
        generators::conformal_flat(surface(), &TrigPoly::random(2, 4, 0.1, 1)).unwrap(),
        generators::kahler_potential(surface(), 5, 0.2, 1).unwrap(),
        generators::random_fourier(surface(), 6, 0.1, 1).unwrap(),
    ];
    for m in &presets {
        let d = classify(m).unwrap();
        let l = functional_value(m).unwrap();
        assert!(l >= 0.0);
        assert_eq!(l <= 1e-16, d.lck <= 1e-8, "L={l:e} lck={:e}", d.lck);
        assert_eq!(d.balanced <= 1e-8, d.lee_norm <= 1e-8, "balanced={:e} lee={:e}", d.balanced, d.lee_norm);
        if d.lck <= 1e-8 && d.balanced <= 1e-8 {
            assert!(d.kahler <= 1e-6);
        }
    }
}

#[test]
fn hopf_fixture() {
    let mut r = rng(17);
    let mut pts = vec![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.3, 0.0), c(0.7, -0.2)], [c(2.0, 0.0), c(0.0, 0.0)]];
    while pts.len() < 12 {
        pts.push([c(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)), c(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0))]);
    }
    let rep = hopf_fixture_check(&pts).unwrap();
    assert_eq!(rep.samples.len(), 12);
    assert!(rep.max_residual() <= 1e-10);
    assert_eq!(rep.samples[0].lck, 0.0);
    let (a, b) = (rep.samples[0], rep.samples[2]);
    assert!((a.lck - b.lck).abs() < 1e-14 && (a.dtheta - b.dtheta).abs() < 1e-14);
    assert!(hopf_fixture_check(&[[C64::new(0.0, 0.0); 2]]).is_err());
}
