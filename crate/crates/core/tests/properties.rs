mod common;

use common::*;
use lck_core::exterior::*;
use proptest::prelude::*;

fn metric_and_form() -> impl Strategy<Value = (HermitianMatrix, PointForm, PointForm)> {
    (1usize..=4, any::<u64>()).prop_flat_map(|(n, seed)| {
        (0..=n, 0..=n).prop_map(move |(p, q)| {
            let mut r = rng(seed);
            let h = random_metric(&mut r, n);
            let a = random_form(&mut r, n, p, q);
            let b = random_form(&mut r, n, p, q);
            (h, a, b)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn star_is_an_isometry((h, a, b) in metric_and_form()) {
        let f = Frame::new(&h);
        let lhs = f.inner(&f.star(&a), &f.star(&b));
        let rhs = f.inner(&a, &b);
        prop_assert!(close(lhs, rhs, rhs.norm().max(1.0), 1e-11), "{lhs} vs {rhs}");
    }

    #[test]
    fn inner_product_is_hermitian_and_positive((h, a, b) in metric_and_form()) {
        let f = Frame::new(&h);
        let ab = f.inner(&a, &b);
        let ba = f.inner(&b, &a);
        prop_assert!(close(ab, ba.conj(), ab.norm().max(1.0), 1e-12));
        prop_assert!(f.norm_sqr(&a) > 0.0);
    }

    #[test]
    fn wedge_with_star_gives_inner_product((h, a, b) in metric_and_form()) {
        let f = Frame::new(&h);
        let top = a.wedge(&f.star(&b.conjugate())).unwrap();
        let lhs = f.top_density(&top);
        let rhs = f.inner(&a, &b);
        prop_assert!(close(lhs, rhs, rhs.norm().max(1.0), 1e-11), "{lhs} vs {rhs}");
    }

    #[test]
    fn lefschetz_decomposition_reassembles((h, a, _b) in metric_and_form()) {
        prop_assume!(a.degree() <= 3);
        let f = Frame::new(&h);
        let d = f.decompose(&a).unwrap();
        let back = match d.quotient {
            Some(t) => d.prim + f.lefschetz(&t),
            None => d.prim,
        };
        prop_assert!(form_diff(&back, &a) < 1e-11);
        if a.p() > 0 && a.q() > 0 {
            prop_assert!(f.lambda(&d.prim).max_abs() < 1e-11);
        }
    }
}
