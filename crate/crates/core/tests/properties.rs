use approx::assert_relative_eq;
use einlab_core::curvature::{kulkarni_nomizu, CurvatureSymmetries};
use einlab_core::spectral::{sobolev_norm, L0Symbol};
use einlab_core::tensor_grid::{
    trace, weight_field, Grid, LatticeIsometry, Metric, ScalarField, SymTensorField, TensorField,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid() -> Grid {
    Grid::new(3, 8, 6.0).unwrap()
}

fn random_values(rng: &mut ChaCha8Rng, scale: f64) -> Vec<f64> {
    (0..grid().len()).map(|_| scale * rng.gen_range(-1.0..1.0)).collect()
}

fn random_sym(seed: u64, scale: f64) -> SymTensorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps = (0..grid().sym_count()).map(|_| random_values(&mut rng, scale)).collect();
    SymTensorField::from_components(&grid(), comps).unwrap()
}

fn random_scalar(seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ScalarField::from_values(&grid(), random_values(&mut rng, 1.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn metric_trace_is_linear(seed in any::<u64>(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let g = Metric::new(random_sym(seed, 0.2)).unwrap();
        let s = random_sym(seed ^ 1, 1.0);
        let t = random_sym(seed ^ 2, 1.0);
        let lhs = trace(&g, &s.scaled(a).axpy(b, &t));
        let rhs = trace(&g, &s).scaled(a).axpy(b, &trace(&g, &t));
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * (1.0 + rhs.max_abs()));
    }

    #[test]
    fn weights_multiply(t1 in -2.0..2.0f64, t2 in -2.0..2.0f64) {
        let g = grid();
        let product = weight_field(&g, t1).mul_pointwise(&weight_field(&g, t2));
        let joint = weight_field(&g, t1 + t2);
        for (a, b) in product.values().iter().zip(joint.values()) {
            assert_relative_eq!(*a, *b, max_relative = 1e-12);
        }
    }

    #[test]
    fn unweighted_norm_is_parseval(seed in any::<u64>()) {
        let u = random_sym(seed, 1.0);
        assert_relative_eq!(sobolev_norm(&u, 0.0, 0.0), u.l2_norm(), max_relative = 1e-12);
    }

    #[test]
    fn norms_grow_with_both_indices(seed in any::<u64>(), s in 0.0..3.0f64, t in 0.0..2.0f64) {
        let u = random_scalar(seed);
        let base = sobolev_norm(&u, s, t);
        prop_assert!(sobolev_norm(&u, s + 0.5, t) >= base * (1.0 - 1e-12));
        prop_assert!(sobolev_norm(&u, s, t + 0.5) >= base * (1.0 - 1e-12));
    }

    #[test]
    fn symbol_inverts_itself(seed in any::<u64>(), kappa in -0.24..1.0f64, lambda in 0.1..3.0f64) {
        let symbol = L0Symbol::new(&grid(), kappa, lambda).unwrap();
        let h = random_sym(seed, 1.0);
        let back = symbol.solve(&symbol.apply(&h));
        prop_assert!((&back - &h).l2_norm() <= 1e-12 * h.l2_norm());
        // conformal eigenvalue never drops below its zero-mode value
        prop_assert!(symbol.min_alpha() >= lambda / (1.0 + 3.0 * kappa) * (1.0 - 1e-12));
    }

    #[test]
    fn kulkarni_nomizu_is_an_algebraic_curvature_tensor(seed in any::<u64>()) {
        let a = random_sym(seed, 1.0);
        let b = random_sym(seed.wrapping_add(7), 1.0);
        let product = kulkarni_nomizu(&a, &b);
        prop_assert!(CurvatureSymmetries::of(&product).worst_relative() <= 1e-14);
        prop_assert!(product.max_abs_diff(&kulkarni_nomizu(&b, &a)) <= 1e-14);
    }

    #[test]
    fn reflections_are_involutions(seed in any::<u64>(), axis in 0usize..3) {
        let mut reflect = vec![false; 3];
        reflect[axis] = true;
        let iso = LatticeIsometry::new(vec![0, 1, 2], reflect).unwrap();
        let h = random_sym(seed, 1.0);
        prop_assert_eq!(iso.pull_back_sym(&iso.pull_back_sym(&h)).max_abs_diff(&h), 0.0);
    }
}
