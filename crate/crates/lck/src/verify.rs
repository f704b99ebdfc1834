//! Verification suites behind `lck verify`.
//!
//! Every check produces one [`Check`] row carrying the anchor tag of the
//! identity it measures, the measured residual and its tolerance. The report
//! text depends only on the options, so identical runs are byte-identical.

use lck_core::exterior::{binom, omega_power, Frame, HermitianMatrix, PointForm};
use lck_core::fields::generators::{self, TrigPoly};
use lck_core::fields::{FormField, MetricField, TorusGeometry};
use lck_core::flow::{run_flow, FlowConfig};
use lck_core::lck::{
    classify, functional_curly_l, functional_normalized, functional_value, hopf_fixture_check, lee_form,
    mixed_square_integral, tau_bar_star_theta,
};
use lck_core::linalg::SmallMat;
use lck_core::variation::{
    el_residual, el_residual_normalized, first_variation, first_variation_normalized, variation_l, VariationReport,
};
use lck_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{default_grid, Profile, Tolerances};

/// Which side of the tolerance passes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    /// `measured ≤ tol`.
    Upper,
    /// `measured ≥ tol`.
    Lower,
}

/// One verification row.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    /// Acceptance group (1 to 8).
    pub group: u8,
    /// Anchor tag of the identity.
    pub tag: &'static str,
    /// Suite name.
    pub suite: &'static str,
    /// Case description.
    pub case: String,
    /// Measured residual (`NaN` when the computation failed).
    pub measured: f64,
    /// Tolerance.
    pub tol: f64,
    /// Pass direction.
    pub bound: Bound,
    /// Error raised while computing, if any.
    pub error: Option<String>,
}

impl Check {
    /// Whether the row passes.
    pub fn passed(&self) -> bool {
        self.error.is_none()
            && match self.bound {
                Bound::Upper => self.measured <= self.tol,
                Bound::Lower => self.measured >= self.tol,
            }
    }
}

/// All rows of a run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    /// Rows in execution order.
    pub checks: Vec<Check>,
}

impl Report {
    /// Whether every row passes.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// Whether some row failed with a numerical error rather than a residual.
    pub fn hard_failure(&self) -> bool {
        self.checks.iter().any(|c| c.error.is_some())
    }

    /// Rows of one group.
    pub fn group(&self, g: u8) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(move |c| c.group == g)
    }

    /// Text report: one line per row and a summary line.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let op = match c.bound {
                Bound::Upper => "<=",
                Bound::Lower => ">=",
            };
            let status = if c.passed() { "PASS" } else { "FAIL" };
            s += &format!(
                "{status} {:<11} {:<12} {:<34} measured={:<10.3e} {op} {:.1e}",
                c.tag, c.suite, c.case, c.measured, c.tol
            );
            if let Some(e) = &c.error {
                s += &format!(" error={e}");
            }
            s.push('\n');
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        s += &format!("{} checks, {} failed\n", self.checks.len(), failed);
        s
    }
}

/// Options of a verification run.
#[derive(Clone, Debug, PartialEq)]
pub struct Options {
    /// Depth.
    pub profile: Profile,
    /// Tolerances.
    pub tol: Tolerances,
    /// Base seed for every random choice.
    pub seed: u64,
}

struct Plan {
    algebra_metrics: usize,
    g2: usize,
    g3: usize,
    g4: usize,
    directions: usize,
    riesz: usize,
    flow2: usize,
    flow3: usize,
    hopf_points: usize,
}

impl Plan {
    fn of(p: Profile) -> Self {
        match p {
            Profile::Full => Plan { algebra_metrics: 200, g2: 16, g3: 8, g4: 4, directions: 20, riesz: 20, flow2: 16, flow3: 8, hopf_points: 12 },
            Profile::Quick => Plan { algebra_metrics: 20, g2: 8, g3: 4, g4: 4, directions: 2, riesz: 4, flow2: 8, flow3: 4, hopf_points: 12 },
        }
    }
}

type Res<T> = lck_core::Result<T>;

struct Runner<'a> {
    opts: &'a Options,
    plan: Plan,
    report: Report,
    progress: &'a mut dyn FnMut(&str),
}

impl Runner<'_> {
    #[allow(clippy::too_many_arguments)]
    fn push(&mut self, group: u8, tag: &'static str, suite: &'static str, case: String, r: Res<f64>, tol: f64, bound: Bound) {
        let (measured, error) = match r {
            Ok(v) => (v, None),
            Err(e) => (f64::NAN, Some(e.to_string())),
        };
        let c = Check { group, tag, suite, case, measured, tol, bound, error };
        (self.progress)(&format!("{} {} {}", if c.passed() { "ok  " } else { "FAIL" }, c.tag, c.case));
        self.report.checks.push(c);
    }

    fn upper(&mut self, group: u8, tag: &'static str, suite: &'static str, case: String, r: Res<f64>, tol: f64) {
        self.push(group, tag, suite, case, r, tol, Bound::Upper);
    }

    fn lower(&mut self, group: u8, tag: &'static str, suite: &'static str, case: String, r: Res<f64>, tol: f64) {
        self.push(group, tag, suite, case, r, tol, Bound::Lower);
    }

    fn seed(&self, k: u64) -> u64 {
        self.opts.seed.wrapping_mul(1000).wrapping_add(k)
    }

    fn geom(&self, n: usize) -> TorusGeometry {
        let g = match n {
            2 => self.plan.g2,
            3 => self.plan.g3,
            _ => self.plan.g4,
        };
        TorusGeometry::new(n, g).expect("planned grids are valid")
    }

    /// Default grid regardless of profile, for checks on non-band-limited
    /// conformal factors.
    fn fine_geom(&self, n: usize) -> TorusGeometry {
        TorusGeometry::new(n, default_grid(n)).expect("default grids are valid")
    }
}

/// Run every suite, reporting each row to `progress` as it completes.
pub fn run(opts: &Options, progress: &mut dyn FnMut(&str)) -> Report {
    let mut r = Runner { opts, plan: Plan::of(opts.profile), report: Report::default(), progress };
    algebra(&mut r);
    lee(&mut r);
    functionals(&mut r);
    variations(&mut r);
    riesz(&mut r);
    criticality(&mut r);
    flows(&mut r);
    fixture(&mut r);
    r.report
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn diff(a: &FormField, b: &FormField) -> Res<f64> {
    Ok(a.sub(b)?.max_abs())
}

fn random_hermitian(r: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
    let mut b = SmallMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            b.set(i, j, C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
        }
    }
    HermitianMatrix::new(b.mul(&b.adjoint()).add_scaled(0.5, &SmallMat::identity(n))).expect("positive by construction")
}

fn basis(n: usize, p: usize, q: usize) -> impl Iterator<Item = PointForm> {
    (0..binom(n, p) * binom(n, q)).map(move |k| PointForm::basis(n, p, q, k))
}

fn scaled_gap(a: &PointForm, b: &PointForm) -> f64 {
    let d = (*a - *b).max_abs();
    d / a.max_abs().max(b.max_abs()).max(1.0)
}

fn scalar_gap(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

#[derive(Default)]
struct AlgebraDefects {
    commutator: f64,
    star_star: f64,
    primitive_star: f64,
    adjoint: f64,
}

fn algebra_defects(h: &HermitianMatrix) -> AlgebraDefects {
    let n = h.n();
    let f = Frame::new(h);
    let mut d = AlgebraDefects::default();
    let i = C64::new(0.0, 1.0);
    for p in 0..=n {
        for q in 0..=n {
            let k = p + q;
            for a in basis(n, p, q) {
                let zero = PointForm::zero(n, p, q);
                let lla = if p < n && q < n { f.lambda(&f.lefschetz(&a)) } else { zero };
                let lal = if p > 0 && q > 0 { f.lefschetz(&f.lambda(&a)) } else { zero };
                let comm = lla - lal;
                let want = a.scale(C64::new(n as f64 - k as f64, 0.0));
                d.commutator = d.commutator.max(scaled_gap(&comm, &want));

                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                d.star_star = d.star_star.max(scaled_gap(&f.star(&f.star(&a)), &a.scale(C64::new(sign, 0.0))));

                if k <= 3 && k <= n {
                    let v = f.decompose(&a).expect("degree at most 3").prim;
                    let s = if (k * (k + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                    let rhs = omega_power(h, n - k).wedge(&v).expect("degrees fit").scale(i.powi(p as i32 - q as i32) * s);
                    d.primitive_star = d.primitive_star.max(scaled_gap(&f.star(&v), &rhs));
                }

                if p > 0 && q > 0 {
                    let la = f.lambda(&a);
                    for b in basis(n, p - 1, q - 1) {
                        d.adjoint = d.adjoint.max(scalar_gap(f.inner(&la, &b), f.inner(&a, &f.lefschetz(&b))));
                    }
                }
                for (pb, qb) in [(1, 0), (0, 1), (1, 1)] {
                    if pb > p || qb > q {
                        continue;
                    }
                    for beta in basis(n, pb, qb) {
                        let adj = f.wedge_adjoint(&beta, &a);
                        for c in basis(n, p - pb, q - qb) {
                            let lhs = f.inner(&adj, &c);
                            let rhs = f.inner(&a, &beta.wedge(&c).expect("degrees fit"));
                            d.adjoint = d.adjoint.max(scalar_gap(lhs, rhs));
                        }
                    }
                }
            }
        }
    }
    d
}

fn algebra(r: &mut Runner) {
    let tol = r.opts.tol.algebra;
    let count = r.plan.algebra_metrics;
    for n in 1..=3 {
        let mut rng = ChaCha8Rng::seed_from_u64(r.seed(10 + n as u64));
        let mut worst = AlgebraDefects::default();
        for _ in 0..count {
            let d = algebra_defects(&random_hermitian(&mut rng, n));
            worst.commutator = worst.commutator.max(d.commutator);
            worst.star_star = worst.star_star.max(d.star_star);
            worst.primitive_star = worst.primitive_star.max(d.primitive_star);
            worst.adjoint = worst.adjoint.max(d.adjoint);
        }
        let case = format!("n={n} metrics={count} all-basis");
        r.upper(1, "Eq.4", "algebra", case.clone(), Ok(worst.commutator), tol);
        r.upper(1, "Lemma 4.2", "algebra", case.clone(), Ok(worst.star_star), tol);
        if n >= 2 {
            r.upper(1, "Eq.3", "algebra", case.clone(), Ok(worst.primitive_star), tol);
        }
        r.upper(1, "§2(A)", "algebra", case, Ok(worst.adjoint), tol);
    }
}

fn lee(r: &mut Runner) {
    let tol = r.opts.tol.lee;
    let g2 = r.fine_geom(2);
    for k in 0..3 {
        let s = r.seed(20 + k);
        let v = (|| {
            let m = generators::random_fourier(g2, s, 0.1, 1)?;
            let dt = lee_form(&m)?.dtheta();
            let mixed = dt.part(1, 1).expect("surface dθ has a (1,1) part").clone();
            Ok((0..g2.nodes()).map(|k| m.frame(k).lambda(&mixed.at(k)).max_abs()).fold(0.0, f64::max))
        })();
        r.upper(2, "Lemma 2.2", "lee", format!("n=2 N={} seed={s} Λdθ", g2.grid()), v, tol);
    }
    for n in [2, 3] {
        let g = r.fine_geom(n);
        let s = r.seed(30 + n as u64);
        let v = generators::random_fourier(g, s, 0.2, 1).and_then(|m| lee_form(&m)?.reconstruction_defect(&m));
        r.upper(2, "Lemma 2.2", "lee", format!("n={n} N={} seed={s} dω=prim+ω∧θ", g.grid()), v, tol);
    }
    for n in [2, 3] {
        let g = r.fine_geom(n);
        let s = r.seed(40 + n as u64);
        let amp = if n == 2 { 0.1 } else { 0.01 };
        let v = (|| {
            let m = generators::random_fourier(g, s, 0.1, 1)?;
            let f = TrigPoly::random(n, s + 1, amp, 1);
            let a = lee_form(&m)?;
            let b = lee_form(&generators::conformal(&m, &f)?)?;
            let (_, df01) = f.differential(g);
            diff(b.theta01(), &a.theta01().add(&df01)?)
        })();
        r.upper(2, "Lemma 2.3", "lee", format!("n={n} N={} seed={s} e^f amp={amp}", g.grid()), v, tol);
    }
    let g = r.fine_geom(3);
    let s = r.seed(45);
    let v = (|| {
        let m = generators::random_fourier(g, s, 0.1, 1)?;
        let lam = TrigPoly::constant(3, 1.0).with_term(&[0, 1, 0, 1, 0, 0], 0.2, 0.1);
        let ml = generators::conformal_polynomial(&m, &lam)?;
        let (_, dl01) = lam.differential(g);
        let inv: Vec<f64> = lam.sample(g).iter().map(|v| 1.0 / v).collect();
        diff(lee_form(&ml)?.theta01(), &lee_form(&m)?.theta01().add(&dl01.scale_by(&inv))?)
    })();
    r.upper(2, "Lemma 2.3", "lee", format!("n=3 N={} seed={s} polynomial λ", g.grid()), v, tol);
}

fn functionals(r: &mut Runner) {
    let tol = r.opts.tol.functional;
    let g2 = r.fine_geom(2);
    for k in 0..3 {
        let s = r.seed(50 + k);
        let parts = (|| {
            let m = generators::random_fourier(g2, s, 0.1, 1)?;
            Ok((functional_value(&m)?, functional_curly_l(&m)?, mixed_square_integral(&m)?))
        })();
        let case = format!("n=2 N={} seed={s}", g2.grid());
        r.upper(3, "Eq.11", "functional", case.clone(), parts.clone().map(|(l, cl, x)| (cl - 2.0 * l + x).abs() / l), tol);
        r.upper(3, "Eq.12", "functional", case, parts.map(|(l, _, x)| (2.0 * l + x).abs() / l), tol);
    }

    let s = r.seed(55);
    let v = (|| {
        let m = generators::random_fourier(g2, s, 0.2, 1)?;
        let (a, b) = tau_bar_star_theta(&m)?;
        Ok(diff(&a, &b)? / b.max_abs())
    })();
    r.upper(3, "Formula 2.4", "functional", format!("n=2 N={} seed={s} random", g2.grid()), v, tol);
    let v = (|| {
        let f = TrigPoly::sine(2, 0, 1, 0.1).with_term(&[0, 1, 1, 0], 0.05, -0.02);
        let m = generators::conformal_flat(g2, &f)?;
        let (a, b) = tau_bar_star_theta(&m)?;
        let (_, df01) = f.differential(g2);
        let want = FormField::from_fn(g2, 0, 0, |k, _| PointForm::scalar(2, C64::new(m.frame(k).norm_sqr(&df01.at(k)), 0.0)));
        Ok(diff(&a, &want)?.max(diff(&b, &want)?))
    })();
    r.upper(3, "Formula 2.4", "functional", format!("n=2 N={} conformal |∂̄f|²", g2.grid()), v, tol);

    let family = |t: f64| -> Res<(f64, f64)> {
        let d = classify(&generators::conformal_flat(g2, &TrigPoly::sine(2, 0, 1, t))?)?;
        Ok((d.gauduchon, d.gauduchon_lee.unwrap_or(f64::NAN)))
    };
    let v = family(0.0).map(|(a, b)| a.max(b));
    r.upper(3, "Lemma 2.5", "functional", format!("n=2 N={} t=0 both vanish", g2.grid()), v, tol);
    let v = (|| {
        let mut worst = f64::INFINITY;
        for t in [1e-6, 1e-3, 0.05, 0.2] {
            let (a, b) = family(t)?;
            worst = worst.min(a.min(b) / t);
        }
        Ok(worst)
    })();
    r.lower(3, "Lemma 2.5", "functional", format!("n=2 N={} t>0 both nonzero", g2.grid()), v, 1e-9);

    for n in [3, 4] {
        let g = r.fine_geom(n);
        let s = r.seed(60 + n as u64);
        let v = (|| {
            let m = generators::random_fourier(g, s, 0.2, 1)?;
            let l = functional_value(&m)?;
            let mut worst: f64 = 0.0;
            for lambda in [0.5, 2.0, 3.0] {
                worst = worst.max(rel(functional_value(&m.scale(lambda)?)?, lambda.powi(n as i32 - 1) * l));
            }
            Ok(worst)
        })();
        r.upper(3, "Eq.19", "functional", format!("n={n} N={} seed={s} λ∈{{0.5,2,3}}", g.grid()), v, tol);
    }

    let s = r.seed(65);
    let v = (|| {
        let m = generators::random_fourier(g2, s, 0.1, 1)?;
        let l = functional_value(&m)?;
        let lam = TrigPoly::constant(2, 1.0).with_term(&[1, 0, 1, 0], 0.3, 0.2);
        let a = functional_value(&generators::conformal_polynomial(&m, &lam)?)?;
        let b = functional_value(&generators::conformal(&m, &TrigPoly::random(2, s + 1, 0.2, 1))?)?;
        Ok(rel(a, l).max(rel(b, l)))
    })();
    r.upper(3, "Prop.6.1", "functional", format!("n=2 N={} seed={s} λω", g2.grid()), v, tol);

    let g3 = r.fine_geom(3);
    let s = r.seed(66);
    let v = (|| {
        let m = generators::random_fourier(g3, s, 0.2, 1)?;
        let rho = generators::random_fourier(g3, s + 1, 0.2, 1)?;
        let a = functional_normalized(&rho, &m)?;
        let mut worst: f64 = 0.0;
        for lambda in [0.5, 2.0, 3.0] {
            worst = worst.max(rel(functional_normalized(&rho, &m.scale(lambda)?)?, a));
        }
        Ok(worst)
    })();
    r.upper(3, "Eq.20", "functional", format!("n=3 N={} seed={s} scale", g3.grid()), v, tol);
}

fn direction(g: TorusGeometry, metric_seed: u64, k: u64) -> Res<FormField> {
    generators::random_direction(g, metric_seed, 1000 + k, 0.5, 1)
}

/// Worst relative error and order over a batch of reports.
fn fd_summary(reports: &[VariationReport], pick: impl Fn(&VariationReport) -> f64) -> (f64, f64) {
    let err = reports.iter().map(|rep| rel(pick(rep), rep.fd)).fold(0.0, f64::max);
    let order = reports.iter().map(|rep| rep.fd_order).fold(f64::INFINITY, f64::min);
    (err, order)
}

fn formula(rep: &VariationReport, name: &str) -> f64 {
    rep.formulas.iter().find(|(k, _)| *k == name).map_or(f64::NAN, |(_, v)| *v)
}

fn variations(r: &mut Runner) {
    let t = r.opts.tol.clone();
    let dirs = r.plan.directions;
    let batch = |g: TorusGeometry, s: u64, rho: Option<&MetricField>| -> Res<Vec<VariationReport>> {
        let m = generators::random_fourier(g, s, 0.2, 1)?;
        (0..dirs as u64)
            .map(|k| {
                let gamma = direction(g, s, k)?;
                match rho {
                    Some(rho) => first_variation_normalized(rho, &m, &gamma),
                    None => first_variation(&m, &gamma),
                }
            })
            .collect()
    };

    let g2 = r.geom(2);
    let s = r.seed(70);
    let case = format!("n=2 N={} seed={s} dirs={dirs}", g2.grid());
    match batch(g2, s, None) {
        Ok(reps) => {
            for (tag, name) in [("Eq.13", "wedge_form"), ("Eq.14", "norm_form"), ("Eq.15", "two_term")] {
                let (err, _) = fd_summary(&reps, |rep| formula(rep, name));
                r.upper(4, tag, "variation", case.clone(), Ok(err), t.fd_rel);
            }
            let (_, order) = fd_summary(&reps, |rep| rep.analytic);
            r.lower(4, "Eq.15", "variation", format!("{case} fd-order"), Ok(order), t.fd_order);
        }
        Err(e) => r.upper(4, "Eq.15", "variation", case, Err(e), t.fd_rel),
    }

    for n in [3, 4] {
        let g = r.geom(n);
        let s = r.seed(70 + n as u64);
        let case = format!("n={n} N={} seed={s} dirs={dirs}", g.grid());
        match batch(g, s, None) {
            Ok(reps) => {
                let (err, order) = fd_summary(&reps, |rep| rep.analytic);
                r.upper(4, "Eq.17", "variation", case.clone(), Ok(err), t.fd_rel);
                r.lower(4, "Eq.17", "variation", format!("{case} fd-order"), Ok(order), t.fd_order);
            }
            Err(e) => r.upper(4, "Eq.17", "variation", case, Err(e), t.fd_rel),
        }
    }

    let g3 = r.geom(3);
    let s = r.seed(75);
    let case = format!("n=3 N={} seed={s} dirs={dirs}", g3.grid());
    match generators::random_fourier(g3, s + 500, 0.2, 1).and_then(|rho| batch(g3, s, Some(&rho))) {
        Ok(reps) => {
            let (err, order) = fd_summary(&reps, |rep| rep.analytic);
            r.upper(4, "Eq.21", "variation", case.clone(), Ok(err), t.fd_rel);
            r.lower(4, "Eq.21", "variation", format!("{case} fd-order"), Ok(order), t.fd_order);
        }
        Err(e) => r.upper(4, "Eq.21", "variation", case, Err(e), t.fd_rel),
    }

    for n in [3, 4] {
        let g = r.geom(n);
        let s = r.seed(80 + n as u64);
        let v = (|| {
            let m = generators::random_fourier(g, s, 0.2, 1)?;
            Ok(rel(variation_l(&m, &m.omega())?, (n - 1) as f64 * functional_value(&m)?))
        })();
        r.upper(4, "Eq.18", "variation", format!("n={n} N={} seed={s} γ=ω", g.grid()), v, t.euler);
    }

    let s = r.seed(85);
    let v = (|| {
        let m = generators::random_fourier(g2, s, 0.1, 1)?;
        let f = TrigPoly::random(2, s + 1, 0.5, 1);
        let fw = m.omega().scale_by(&f.sample(g2));
        Ok(variation_l(&m, &fw)?.abs() / g2.volume())
    })();
    r.upper(4, "Cor.4.5", "variation", format!("n=2 N={} seed={s} γ=fω", g2.grid()), v, t.conformal_direction);
}

fn riesz(r: &mut Runner) {
    let t = r.opts.tol.clone();
    let count = r.plan.riesz;
    for (n, tag) in [(2, "Cor.4.4"), (3, "Cor.5.1"), (4, "Cor.5.1")] {
        let g = r.geom(n);
        let s = r.seed(90 + n as u64);
        let case = format!("n={n} N={} seed={s} dirs={count}", g.grid());
        let v = (|| {
            let m = generators::random_fourier(g, s, 0.2, 1)?;
            let res = el_residual(&m)?;
            let mut worst: f64 = 0.0;
            for k in 0..count as u64 {
                let gamma = direction(g, s, k)?;
                worst = worst.max(rel(res.pair(&m, &gamma)?, variation_l(&m, &gamma)?));
            }
            Ok((worst, res.realness))
        })();
        r.upper(5, tag, "riesz", case.clone(), v.clone().map(|v| v.0), t.riesz);
        r.upper(5, tag, "riesz", format!("{case} realness"), v.map(|v| v.1), t.realness);
    }
}

fn criticality(r: &mut Runner) {
    let t = r.opts.tol.clone();
    for n in [3, 4] {
        let g = r.geom(n);
        let s = r.seed(100 + n as u64);
        let v = generators::conformal_flat(g, &TrigPoly::random(n, s, 0.1, 1)).and_then(|m| Ok(el_residual(&m)?.norm));
        r.upper(6, "Prop.5.3", "critical", format!("n={n} N={} seed={s} lcK residual", g.grid()), v, t.critical);

        let s = r.seed(105 + n as u64);
        let parts = (|| {
            let m = generators::random_fourier(g, s, 0.2, 1)?;
            let l = functional_value(&m)?;
            let res = el_residual(&m)?;
            Ok((l, res.norm, rel(res.pair(&m, &m.omega())?, (n - 1) as f64 * l)))
        })();
        let case = format!("n={n} N={} seed={s}", g.grid());
        r.lower(6, "Prop.5.3", "critical", format!("{case} L(ω)"), parts.clone().map(|p| p.0), t.noncritical_value);
        r.lower(6, "Prop.5.3", "critical", format!("{case} residual"), parts.clone().map(|p| p.1), t.noncritical_residual);
        r.upper(6, "Eq.18", "critical", format!("{case} ⟨⟨R,ω⟩⟩"), parts.map(|p| p.2), t.euler);
    }
    let g = r.geom(3);
    let s = r.seed(110);
    let v = (|| {
        let m = generators::conformal_flat(g, &TrigPoly::random(3, s, 0.1, 1))?;
        let rho = generators::random_fourier(g, s + 1, 0.2, 1)?;
        Ok(el_residual_normalized(&rho, &m)?.norm)
    })();
    r.upper(6, "Prop.6.2", "critical", format!("n=3 N={} seed={s} lcK normalized", g.grid()), v, t.critical);
}

fn flows(r: &mut Runner) {
    let t = r.opts.tol.clone();
    for (n, grid) in [(2, r.plan.flow2), (3, r.plan.flow3)] {
        let g = TorusGeometry::new(n, grid).expect("planned grids are valid");
        let s = r.seed(120 + n as u64);
        let cfg = FlowConfig { rel_value_tol: t.flow_reduction, max_iter: 500, ..FlowConfig::default() };
        let case = format!("n={n} N={grid} seed={s} amp=0.05");
        let trace = generators::random_fourier(g, s, 0.05, 1).and_then(|m| {
            let tr = run_flow(&cfg, &m, |_, _| {})?;
            Ok((tr, m.margin()))
        });
        match trace {
            Ok((tr, m0)) => {
                let v0 = tr.records[0].value;
                let rise = tr.records.windows(2).map(|w| (w[1].value - w[0].value) / v0).fold(0.0, f64::max);
                let margin = tr.records.iter().map(|x| x.margin).fold(f64::INFINITY, f64::min) / m0;
                r.upper(7, "Lemma 3.2", "flow", format!("{case} reduction"), Ok(tr.reduction()), t.flow_reduction);
                r.upper(7, "Lemma 3.2", "flow", format!("{case} monotone"), Ok(rise), 0.0);
                r.upper(7, "Lemma 3.2", "flow", format!("{case} iterations"), Ok((tr.records.len() - 1) as f64), 500.0);
                r.lower(7, "Lemma 3.2", "flow", format!("{case} margin/margin0"), Ok(margin), cfg.floor);
            }
            Err(e) => r.upper(7, "Lemma 3.2", "flow", case, Err(e), t.flow_reduction),
        }
    }
}

fn fixture(r: &mut Runner) {
    let mut rng = ChaCha8Rng::seed_from_u64(r.seed(130));
    let c = C64::new;
    let mut pts = vec![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.3, 0.0), c(0.7, -0.2)], [c(2.0, 0.0), c(0.0, 0.0)]];
    while pts.len() < r.plan.hopf_points {
        let mut z = || c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        pts.push([z(), z()]);
    }
    let v = hopf_fixture_check(&pts).map(|rep| rep.max_residual());
    r.upper(8, "Lemma 2.2", "fixture", format!("Hopf points={}", pts.len()), v, r.opts.tol.fixture);
}
