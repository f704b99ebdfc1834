use lck_core::fields::generators::{self, TrigPoly};
use lck_core::fields::*;
use lck_core::lck::*;
use lck_core::variation::*;
use lck_core::{Error, C64};

fn surface() -> TorusGeometry {
    TorusGeometry::new(2, 16).unwrap()
}

fn threefold() -> TorusGeometry {
    TorusGeometry::new(3, 8).unwrap()
}

fn fourfold() -> TorusGeometry {
    TorusGeometry::new(4, 4).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn diff(a: &FormField, b: &FormField) -> f64 {
    a.sub(b).unwrap().max_abs()
}

// Richardson central difference of a field-valued map.
fn fd_field(f: impl Fn(f64) -> FormField, t: f64) -> FormField {
    let d = |s: f64| f(s).sub(&f(-s)).unwrap().scale(C64::new(0.5 / s, 0.0));
    let (a, b) = (d(t), d(t / 2.0));
    b.scale(C64::new(4.0 / 3.0, 0.0)).sub(&a.scale(C64::new(1.0 / 3.0, 0.0))).unwrap()
}

fn metric(geom: TorusGeometry, seed: u64) -> MetricField {
    generators::random_fourier(geom, seed, 0.2, 1).unwrap()
}

fn direction(geom: TorusGeometry, seed: u64, k: u64) -> FormField {
    generators::random_direction(geom, seed, 1000 + k, 0.5, 1).unwrap()
}

#[test]
fn lambda_variation_matches_finite_differences() {
    let geom = threefold();
    let m = metric(geom, 1);
    let g = direction(geom, 1, 0);
    let a0 = dbar(&m.omega());
    let ad = generators::random_real_11(geom, 5, 0.3, 1).unwrap();
    let ad = dbar(&ad);

    let zero = FormField::zeros(geom, 1, 1);
    let v0 = lambda_variation(&m, &zero, &a0, &ad).unwrap();
    assert!(diff(&v0, &lambda_field(&m, &ad).unwrap()) < 1e-14);

    let v = lambda_variation(&m, &g, &a0, &ad).unwrap();
    let fd = fd_field(
        |t| lambda_field(&m.perturbed(t, &g).unwrap(), &a0.add_scaled(C64::new(t, 0.0), &ad).unwrap()).unwrap(),
        1e-3,
    );
    assert!(diff(&v, &fd) <= 1e-6 * v.max_abs());

    let dg = dbar(&g);
    let expected = lambda_variation(&m, &g, &a0, &dg).unwrap().scale(C64::new(0.5, 0.0));
    assert!(diff(&expected, &lee_variation(&m, &g).unwrap()) < 1e-13);
}

#[test]
fn lee_variation_forms() {
    let g2 = surface();
    let flat = generators::flat(g2);
    let gam = generators::random_real_11(g2, 3, 0.4, 1).unwrap();
    let v = lee_variation(&flat, &gam).unwrap();
    assert!(diff(&v, &lambda_field(&flat, &dbar(&gam)).unwrap()) < 1e-14);

    let m = metric(g2, 2);
    let gam = direction(g2, 2, 1);
    let a = lee_variation(&m, &gam).unwrap();
    let b = lee_variation_rewrite(&m, &gam).unwrap();
    assert!(diff(&a, &b) < 1e-13 * a.max_abs().max(1.0));
    let fd = fd_field(|t| lee_form_01(&m.perturbed(t, &gam).unwrap()).unwrap(), 1e-3);
    assert!(l2_norm(&m, &a.sub(&fd).unwrap()).unwrap() <= 1e-6 * l2_norm(&m, &a).unwrap());

    let g3 = threefold();
    let m = metric(g3, 3);
    let gam = direction(g3, 3, 2);
    let a = lee_variation(&m, &gam).unwrap();
    let fd = fd_field(|t| lee_form_01(&m.perturbed(t, &gam).unwrap()).unwrap(), 1e-3);
    assert!(l2_norm(&m, &a.sub(&fd).unwrap()).unwrap() <= 1e-6 * l2_norm(&m, &a).unwrap());
    assert!(matches!(lee_variation_rewrite(&m, &gam), Err(Error::Dimension(3))));
}

#[test]
fn surface_formulas_agree_with_oracle() {
    let geom = surface();
    for seed in 0..2 {
        let m = metric(geom, seed);
        let r = el_residual_surface(&m).unwrap();
        for k in 0..3 {
            let g = direction(geom, seed, k);
            let rep = first_variation_surface(&m, &g).unwrap();
            assert!(rep.passes(), "{rep:?}");
            assert!((rep.fd_order - 2.0).abs() < 0.2);
            let s = surface_variation(&m, &g).unwrap();
            assert!(s.spread() < 1e-7);
            assert!(rel(s.star_form, s.two_term) < 1e-7);
            assert!(rel(r.pair(&m, &g).unwrap(), rep.analytic) < 1e-6);
        }
    }
}

#[test]
fn surface_variation_ignores_conformal_directions() {
    let geom = surface();
    let m = generators::random_fourier(geom, 4, 0.1, 1).unwrap();
    let f = TrigPoly::random(2, 8, 0.5, 1).with_term(&[0, 0, 0, 0], 0.0, 0.0);
    let fw = m.omega().scale_by(&f.sample(geom));
    let v = variation_l(&m, &fw).unwrap();
    assert!(v.abs() / geom.volume() <= 1e-8, "{v:e}");
    assert!(variation_l(&m, &m.omega()).unwrap().abs() / geom.volume() <= 1e-8);

    let g = direction(geom, 4, 3);
    let lam = lambda_field(&m, &g).unwrap();
    let half: Vec<f64> = lam.data().iter().map(|z| 0.5 * z.re).collect();
    let prim = g.sub(&m.omega().scale_by(&half)).unwrap();
    let a = variation_l(&m, &g).unwrap();
    let b = variation_l(&m, &prim).unwrap();
    assert!((a - b).abs() / geom.volume() <= 1e-8);
    assert!(a.abs() > 1e-3);
}

#[test]
fn reduced_formula_along_mixed_lee_direction() {
    let geom = surface();
    let m = metric(geom, 5);
    let g = mixed_lee_direction(&m).unwrap();
    let [xi, lam] = reduced_mixed_variation(&m).unwrap();
    let rep = first_variation_surface(&m, &g).unwrap();
    assert!(rep.passes());
    assert!(rel(xi, rep.analytic) < 1e-7);
    assert!(rel(lam, rep.analytic) < 1e-7);
}

#[test]
fn high_variation_matches_oracle() {
    for (geom, dirs) in [(threefold(), 2), (fourfold(), 2)] {
        let m = metric(geom, 6);
        let r = el_residual_high(&m).unwrap();
        assert!(r.realness < 1e-10);
        for k in 0..dirs {
            let g = direction(geom, 6, k);
            let rep = first_variation_high(&m, &g).unwrap();
            assert!(rep.passes(), "{rep:?}");
            assert!(rep.fd_order >= MIN_FD_ORDER);
            assert!(rel(r.pair(&m, &g).unwrap(), rep.analytic) < 1e-6);
        }
        let n = geom.n();
        let h = high_variation(&m, &m.omega()).unwrap();
        let l = functional_value(&m).unwrap();
        assert!(rel(h.total(), (n - 1) as f64 * l) < 1e-8);
        assert!(rel(r.pair(&m, &m.omega()).unwrap(), (n - 1) as f64 * l) < 1e-8);
        if n == 3 {
            assert_eq!(h.torsion, 0.0);
        }
    }
}

#[test]
fn flat_metric_is_critical() {
    for geom in [surface(), threefold()] {
        let m = generators::flat(geom);
        let g = direction(geom, 1, 4);
        assert!(variation_l(&m, &g).unwrap().abs() < 1e-14);
        assert!(el_residual(&m).unwrap().norm < 1e-14);
    }
}

#[test]
fn lck_metrics_have_vanishing_residual() {
    let g3 = threefold();
    let m = generators::conformal_flat(g3, &TrigPoly::random(3, 2, 0.1, 1)).unwrap();
    let r = el_residual_high(&m).unwrap();
    assert!(functional_value(&m).unwrap() <= 1e-10);
    assert!(r.norm <= 1e-8, "{:e}", r.norm);

    let g2 = surface();
    let f = TrigPoly::random(2, 3, 0.2, 1);
    let m = generators::conformal_flat(g2, &f).unwrap();
    let r = el_residual_surface(&m).unwrap();
    let fw = m.omega().scale_by(&f.sample(g2));
    assert!(r.pair(&m, &fw).unwrap().abs() < 1e-10);
}

#[test]
fn residual_bounds_functional_from_below() {
    let g3 = threefold();
    for m in [metric(g3, 7), generators::product_twist(g3, 0.2).unwrap()] {
        let l = functional_value(&m).unwrap();
        assert!(l >= 1e-4);
        let r = el_residual_high(&m).unwrap();
        let w = l2_norm(&m, &m.omega()).unwrap();
        assert!(r.norm * w >= 2.0 * l * (1.0 - 1e-9));
        assert!(r.norm >= 1e-6);
    }
}

#[test]
fn differential_is_linear() {
    for geom in [surface(), threefold()] {
        let m = metric(geom, 8);
        let g1 = direction(geom, 8, 5);
        let g2 = direction(geom, 8, 6);
        let (a, b) = (0.7, -1.3);
        let comb = g1.scale(C64::new(a, 0.0)).add(&g2.scale(C64::new(b, 0.0))).unwrap();
        let lhs = variation_l(&m, &comb).unwrap();
        let rhs = a * variation_l(&m, &g1).unwrap() + b * variation_l(&m, &g2).unwrap();
        assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0));
    }
}

#[test]
fn normalized_functional_variation() {
    let geom = threefold();
    let m = metric(geom, 9);
    let rho = generators::random_fourier(geom, 10, 0.2, 1).unwrap();
    let g = direction(geom, 9, 7);
    let rep = first_variation_normalized(&rho, &m, &g).unwrap();
    assert!(rep.passes(), "{rep:?}");

    let w = m.omega();
    let along = fd_directional(Functional::Normalized(&rho), &m, &w, default_step(&m, &w)).unwrap();
    let scale = functional_normalized(&rho, &m).unwrap();
    assert!(along.value.abs() <= 1e-8 * scale.max(1.0));
    assert!(normalized_variation(&rho, &m, &w).unwrap().value.abs() <= 1e-10 * scale);

    let self_rho = normalized_variation(&m, &m, &w).unwrap();
    assert!(self_rho.value.abs() <= 1e-10 * self_rho.dl.abs() / self_rho.normalizer.powi(2));

    let lam: Vec<f64> = (0..geom.nodes()).map(|k| rho.frame(k).lambda(&g.at(k)).scalar_value().re / 3.0).collect();
    let prim = g.sub(&rho.omega().scale_by(&lam)).unwrap();
    let v = normalized_variation(&rho, &m, &prim).unwrap();
    assert!(v.correction.abs() <= 1e-10 * v.dl.abs().max(1.0));
    assert!(rel(v.value * v.normalizer.powi(2), v.dl) < 1e-12);
}

#[test]
fn finite_difference_oracle() {
    let geom = threefold();
    let m = metric(geom, 11);
    let rho = generators::random_fourier(geom, 12, 0.2, 1).unwrap();
    let g = direction(geom, 11, 8);
    let e = fd_directional(Functional::Normalizer(&rho), &m, &g, 0.01).unwrap();
    assert!(e.order >= 2.0);
    assert!(rel(e.value, rho_pairing(&rho, &g).unwrap()) < 1e-10);

    let w = m.omega();
    let e = fd_directional(Functional::L, &m, &w, 0.01).unwrap();
    assert!(rel(e.value, 2.0 * functional_value(&m).unwrap()) < 1e-8);
    assert!(e.order >= MIN_FD_ORDER);

    let big = w.scale(C64::new(-50.0, 0.0));
    let e = fd_directional(Functional::L, &m, &big, 0.1).unwrap();
    assert!(e.step < 0.02);
    assert!(rel(e.value, -100.0 * functional_value(&m).unwrap()) < 1e-6);

    let stuck = richardson(|_| Err(Error::NotPositive { margin: -1.0 }), 1.0);
    assert!(matches!(stuck, Err(Error::ProbeStep { .. })));
    assert!(richardson(Ok, 0.0).is_err());
}
