use lck_core::fields::generators::{flat, random_direction, random_fourier};
use lck_core::fields::*;
use lck_core::flow::*;
use lck_core::lck::functional_value;
use lck_core::variation::{el_residual, ELResidual};
use lck_core::{Error, C64};

fn geom(n: usize, grid: usize) -> TorusGeometry {
    TorusGeometry::new(n, grid).unwrap()
}

fn check_trace(cfg: &FlowConfig, start: &MetricField, tr: &FlowTrace) {
    assert!(tr.is_monotone());
    for (i, r) in tr.records.iter().enumerate() {
        assert_eq!(r.iter, i);
        assert!(r.margin >= cfg.floor * start.margin() * (1.0 - 1e-12), "{r:?}");
    }
    let (last, direct) = (tr.records.last().unwrap().value, cfg.objective.value(&tr.metric).unwrap());
    assert!((last - direct).abs() <= 1e-12 * direct);
}

#[test]
fn flat_start_terminates_immediately() {
    for (n, grid) in [(2, 8), (3, 4)] {
        let m = flat(geom(n, grid));
        let tr = run_flow(&FlowConfig::default(), &m, |_, _| {}).unwrap();
        assert_eq!(tr.records.len(), 1);
        assert!(tr.records[0].grad_norm < 1e-10);
        assert!(matches!(tr.status, FlowStatus::Converged | FlowStatus::Stationary));
        assert!(tr.terminal_lck.unwrap() < 1e-10);
    }
}

#[test]
fn near_flat_flow_reduces_functional() {
    for (n, grid) in [(2, 8), (3, 4)] {
        let m = random_fourier(geom(n, grid), 7, 0.05, 1).unwrap();
        let cfg = FlowConfig { rel_value_tol: 1e-2, ..Default::default() };
        let mut seen = 0;
        let tr = run_flow(&cfg, &m, |r, w| {
            assert_eq!(r.margin, w.margin());
            seen += 1;
        })
        .unwrap();
        assert_eq!(seen, tr.records.len());
        assert_eq!(tr.status, FlowStatus::Converged, "n = {n}");
        assert!(tr.reduction() <= 1e-2);
        assert!(tr.records.len() <= 501);
        assert!(tr.terminal_lck.is_some());
        check_trace(&cfg, &m, &tr);
    }
}

#[test]
fn budget_is_reported() {
    let m = random_fourier(geom(2, 8), 3, 0.05, 1).unwrap();
    let cfg = FlowConfig { max_iter: 2, ..Default::default() };
    let tr = run_flow(&cfg, &m, |_, _| {}).unwrap();
    assert_eq!(tr.status, FlowStatus::Budget);
    assert_eq!(tr.records.len(), 3);
    assert!(tr.terminal_lck.is_none());
    check_trace(&cfg, &m, &tr);
}

#[test]
fn first_order_descent() {
    let m = random_fourier(geom(2, 8), 11, 0.2, 1).unwrap();
    let res = el_residual(&m).unwrap();
    let l0 = functional_value(&m).unwrap();
    let minus = res.field.scale(C64::new(-1.0, 0.0));
    let slope = res.norm * res.norm;
    let defect = |s: f64| functional_value(&m.perturbed(s, &minus).unwrap()).unwrap() - (l0 - s * slope);
    let s = 1e-4 * m.margin() / res.field.max_abs();
    let (d1, d2) = (defect(s), defect(s / 2.0));
    assert!(d1.abs() < 1e-2 * s * slope);
    let ratio = d1 / d2;
    assert!((ratio - 4.0).abs() < 0.1, "{ratio}");

    for k in 0..4 {
        let gamma = random_direction(m.geometry(), 11, 50 + k, 0.5, 1).unwrap();
        let dl = res.pair(&m, &gamma).unwrap();
        assert!(dl.abs() <= res.norm * l2_norm(&m, &gamma).unwrap() * (1.0 + 1e-12));
    }
}

#[test]
fn flat_representative_pairs_like_residual() {
    for (n, grid, seed) in [(2, 8, 5), (3, 4, 6)] {
        let m = random_fourier(geom(n, grid), seed, 0.2, 1).unwrap();
        let res = el_residual(&m).unwrap();
        let g = flat_representative(&m, &res).unwrap();
        let w = m.geometry().cell_weight();
        for k in 0..3 {
            let gamma = random_direction(m.geometry(), seed, 70 + k, 0.5, 1).unwrap();
            let h = hermitian_coefficients(&gamma).unwrap();
            let flat_pair: f64 = g.iter().zip(&h).map(|(a, b)| (a * b.conj()).re).sum::<f64>() * w;
            let want = res.pair(&m, &gamma).unwrap();
            assert!((flat_pair - want).abs() <= 1e-10 * want.abs().max(1e-8), "{flat_pair} {want}");
        }
    }
}

#[test]
fn normalized_flow_is_scale_neutral() {
    let g = geom(3, 4);
    let m = random_fourier(g, 21, 0.05, 1).unwrap();
    let rho = random_fourier(g, 22, 0.2, 1).unwrap();
    let cfg = FlowConfig { objective: Objective::Normalized(rho), max_iter: 4, grad_tol: 1e-30, ..Default::default() };
    let a = run_flow(&cfg, &m, |_, _| {}).unwrap();
    let b = run_flow(&cfg, &m.scale(2.5).unwrap(), |_, _| {}).unwrap();
    assert_eq!(a.records.len(), b.records.len());
    assert!(a.is_monotone());
    assert!(a.reduction() < 1.0);
    for (x, y) in a.records.iter().zip(&b.records) {
        assert!((x.value - y.value).abs() <= 1e-9 * x.value, "{x:?} {y:?}");
        assert!((x.step - y.step).abs() <= 1e-9 * x.step.max(1e-300));
    }
}

#[test]
fn gradient_representation_round_trip() {
    let g = geom(2, 8);
    let m = flat(g);
    let id = gradient_metric_representation(&ELResidual::new(&m, m.omega()).unwrap()).unwrap();
    for chunk in id.chunks(4) {
        assert_eq!(chunk, [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
    }

    let gamma = random_direction(g, 3, 4, 0.5, 1).unwrap();
    let h = gradient_metric_representation(&ELResidual::new(&m, gamma.clone()).unwrap()).unwrap();
    let back = form_of_matrices(g, &h).unwrap();
    assert!(back.sub(&gamma).unwrap().max_abs() <= 1e-15 * gamma.max_abs());
    for chunk in h.chunks(4) {
        assert_eq!(chunk[1], chunk[2].conj());
    }

    let skew = gamma.scale(C64::new(0.0, 1.0));
    let res = ELResidual::new(&m, skew).unwrap();
    assert!(matches!(gradient_metric_representation(&res), Err(Error::NotReal { .. })));

    let mut bad = h.clone();
    bad[1] += C64::new(0.5, 0.0);
    assert!(form_of_matrices(g, &bad).is_err());
    assert!(form_of_matrices(g, &h[4..]).is_err());
}

#[test]
fn config_validation() {
    let m = flat(geom(2, 8));
    let bad = [
        FlowConfig { step: 0.0, ..Default::default() },
        FlowConfig { backtrack: 1.0, ..Default::default() },
        FlowConfig { armijo: 0.0, ..Default::default() },
        FlowConfig { grad_tol: -1.0, ..Default::default() },
        FlowConfig { floor: 1.5, ..Default::default() },
        FlowConfig { objective: Objective::Normalized(flat(geom(3, 4))), ..Default::default() },
    ];
    for cfg in bad {
        assert!(run_flow(&cfg, &m, |_, _| {}).is_err(), "{cfg:?}");
    }
}
