mod common;

use common::*;
use proptest::prelude::*;
use quadrange::hull::convex_hull;
use quadrange::numrange::{
    closedness_probe, sample_range, trace_boundary, zero_in_range, ProbeOptions, ZeroInRange,
};
use quadrange::quadmap::evaluate_tuple;
use quadrange::rng::{random_symmetric, seeded};
use quadrange::{Domain, QuadForm, SymMatrix};

fn ops(seed: u64, n: usize, k: usize) -> Vec<SymMatrix> {
    let mut rng = seeded(seed);
    (0..k).map(|_| random_symmetric(&mut rng, n)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outputs_are_homogeneous_of_degree_two(
        seed in any::<u64>(),
        n in 1usize..7,
        c in -20.0..20.0f64,
        x in prop::collection::vec(-2.0..2.0f64, 6),
    ) {
        let forms: Vec<QuadForm> = ops(seed, n, 3).into_iter().map(QuadForm::homogeneous).collect();
        let x = &x[..n];
        let cx: Vec<f64> = x.iter().map(|v| c * v).collect();
        let base = evaluate_tuple(&forms, x).unwrap();
        let scaled = evaluate_tuple(&forms, &cx).unwrap();
        for (b, s) in base.iter().zip(&scaled) {
            prop_assert!((s - c * c * b).abs() <= 1e-12 * (1.0 + (c * c * b).abs()) * 16.0);
        }
    }

    #[test]
    fn sphere_samples_respect_support_function(seed in any::<u64>(), n in 3usize..7) {
        let o = ops(seed, n, 2);
        let trace = trace_boundary(&o[0], &o[1], 180).unwrap();
        let sample = sample_range(&o, Domain::Sphere, 300, seed ^ 1).unwrap();
        let diam = trace.points.iter().flat_map(|p| trace.points.iter().map(move |q| {
            ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
        })).fold(0.0, f64::max);
        let tol = 1e-7 * (1.0 + diam);
        for (theta, b) in trace.angles.iter().zip(&trace.points) {
            let u = [theta.cos(), theta.sin()];
            let h = u[0] * b[0] + u[1] * b[1];
            for p in &sample.points {
                prop_assert!(u[0] * p[0] + u[1] * p[1] <= h + tol);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn full_space_samples_scale_exactly(seed in any::<u64>(), n in 3usize..6, t in prop::sample::select(vec![0.5f64, 2.0])) {
        let o = ops(seed, n, 3);
        let forms: Vec<QuadForm> = o.iter().cloned().map(QuadForm::homogeneous).collect();
        let sample = sample_range(&o, Domain::FullSpace, 200, seed).unwrap();
        for (p, g) in sample.points.iter().zip(&sample.generators) {
            let x: Vec<f64> = g.iter().map(|v| v * t.sqrt()).collect();
            let out = evaluate_tuple(&forms, &x).unwrap();
            for (a, b) in out.iter().zip(p) {
                prop_assert!((a - t * b).abs() <= 1e-8 * (1.0 + (t * b).abs()));
            }
        }
    }

    #[test]
    fn hull_vertices_are_attained_when_zero_is_in_range(seed in any::<u64>(), n in 3usize..5) {
        let o = ops(seed, n, 2);
        prop_assume!(matches!(zero_in_range(&o[0], &o[1]).unwrap(), ZeroInRange::Yes { .. }));
        let sample = sample_range(&o, Domain::Sphere, 400, seed).unwrap();
        let pts: Vec<[f64; 2]> = sample.points.iter().map(|p| [p[0], p[1]]).collect();
        let forms: Vec<QuadForm> = o.iter().cloned().map(QuadForm::homogeneous).collect();
        let opts = ProbeOptions { restarts: 8, ..ProbeOptions::default() };
        for v in convex_hull(&pts) {
            let out = closedness_probe(&forms, &v, Domain::Sphere, &opts, 3).unwrap();
            prop_assert!(out.residual() <= 1e-6, "residual {}", out.residual());
        }
    }
}

#[test]
fn unit_witness_for_traceless_form() {
    let mut rng = Mix(5);
    for n in 2..7 {
        let mut d: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        let mean = d.iter().sum::<f64>() / n as f64;
        d.iter_mut().for_each(|v| *v -= mean);
        let a1 = SymMatrix::diagonal(&d).unwrap();
        match zero_in_range(&a1, &SymMatrix::zeros(n)).unwrap() {
            ZeroInRange::Yes { witness } => {
                assert!((dot(&witness, &witness) - 1.0).abs() < 1e-9);
                assert!(quad(&a1.to_rows(), &witness).abs() <= 1e-9);
            }
            other => panic!("n = {n}: {other:?}"),
        }
    }
}
