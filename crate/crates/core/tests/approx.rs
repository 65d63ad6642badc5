mod common;

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use common::{laurent_gap_sq, taylor_tail};
use cone_runge::approx::{classify, pole_representatives, ExperimentVerdict, SamplerConfig};
use cone_runge::topology::fixtures::{annulus, disk_domain};
use cone_runge::{
    norm_bounds, poly_approx, rasterize, rational_approx, rational_build, runge_experiment,
    sample_root_sphere, Cl3Element, CompactSampler, DomainSpec, Error, Pole, SliceFunction,
    SlicePolynomial,
};
use proptest::prelude::*;

fn sampler(spec: &DomainSpec) -> CompactSampler {
    let g = Arc::new(rasterize(spec).unwrap());
    CompactSampler::from_domain(g, &SamplerConfig::default()).unwrap()
}

/// `1/(x² + b²)` with a real numerator.
fn inverse_quadratic(b: f64) -> SliceFunction {
    SliceFunction::rational(
        rational_build(
            SlicePolynomial::real(&[b * b, 0.0, 1.0]),
            SlicePolynomial::real(&[1.0]),
        )
        .unwrap(),
    )
}

fn circles(radii: &[f64], per_circle: usize) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for &r in radii {
        for m in 0..=per_circle / 2 {
            let t = 2.0 * PI * m as f64 / per_circle as f64;
            let y = if m == 0 || 2 * m == per_circle {
                0.0
            } else {
                r * t.sin()
            };
            pts.push((r * t.cos(), y));
        }
    }
    pts
}

#[test]
fn square_is_recovered() {
    let f = SliceFunction::polynomial(SlicePolynomial::real(&[0.0, 0.0, 1.0]));
    let s = sampler(&disk_domain(2.0, 16.0));
    assert!(s.plane.len() >= 400);
    let r = poly_approx(&f, &s, 2).unwrap();
    assert!(r.sup_error <= 1e-10, "{}", r.sup_error);
    let c = &r.approximant.coeffs;
    assert!(c[0].max_abs() < 1e-9 && c[1].max_abs() < 1e-9);
}

#[test]
fn pole_outside_ball_converges_geometrically() {
    let f = inverse_quadratic(2.0);
    let s = sampler(&disk_domain(1.25, 32.0));
    let rho = s.plane.iter().fold(0.0f64, |m, &(a, b)| m.max(a.hypot(b)));
    assert!(rho < 1.25);
    let mut reached = None;
    for d in (0..=40).step_by(4) {
        let r = poly_approx(&f, &s, d).unwrap();
        let tail = taylor_tail(rho, 2.0, d);
        assert!(
            r.stem_error <= 4.0 * tail + 1e-12,
            "degree {d}: {} against tail {tail}",
            r.stem_error
        );
        if reached.is_none() && r.sup_error < 1e-6 {
            reached = Some(d);
        }
    }
    assert!(reached.is_some_and(|d| d <= 40), "{reached:?}");
}

#[test]
fn pole_in_hole_blocks_polynomials() {
    let f = inverse_quadratic(1.0);
    let g = Arc::new(rasterize(&annulus(1.0, 3.0, 32.0)).unwrap());
    let pts = circles(&[1.5, 1.75, 2.0], 200);
    let s = CompactSampler::from_points(g, &pts, 16, 3).unwrap();
    assert_eq!(s.plane.len(), 3 * 200);
    let bound = laurent_gap_sq(2.0).sqrt();
    let mut min_sup = f64::INFINITY;
    for d in [0, 5, 10, 20, 30, 40] {
        let r = poly_approx(&f, &s, d).unwrap();
        assert!(
            r.stem_error >= bound * (1.0 - 1e-9),
            "degree {d}: {}",
            r.stem_error
        );
        min_sup = min_sup.min(r.sup_error);
    }
    assert!(min_sup >= 0.05);
    assert!(min_sup >= bound / SQRT_2 * (1.0 - 1e-9));
}

#[test]
fn own_pole_gives_exact_recovery() {
    let mut num = [0.0; 8];
    num[0] = 1.0;
    num[2] = 0.5;
    let f = SliceFunction::rational(
        rational_build(
            SlicePolynomial::real(&[0.09, 0.0, 1.0]),
            SlicePolynomial::new(vec![Cl3Element::new(num)]),
        )
        .unwrap(),
    );
    let s = sampler(&annulus(1.0, 3.0, 16.0));
    let poles = [
        Pole::Sphere {
            alpha: 0.0,
            beta: 0.3,
        },
        Pole::Infinity,
    ];
    for d in [1, 2, 4] {
        let r = rational_approx(&f, &s, &poles, d).unwrap();
        assert!(r.sup_error <= 1e-9, "degree {d}: {}", r.sup_error);
    }
}

#[test]
fn infinity_alone_is_polynomial_fit() {
    let f = inverse_quadratic(2.0);
    let s = sampler(&disk_domain(1.25, 16.0));
    for d in [0, 3, 8] {
        let a = poly_approx(&f, &s, d).unwrap();
        let b = rational_approx(&f, &s, &[Pole::Infinity], d).unwrap();
        assert!((a.sup_error - b.sup_error).abs() <= 1e-12);
        for (x, y) in a.approximant.coeffs.iter().zip(&b.approximant.coeffs) {
            assert!(x.max_abs_diff(y) <= 1e-12);
        }
    }
}

#[test]
fn input_errors() {
    let f = inverse_quadratic(2.0);
    let s = sampler(&disk_domain(2.0, 16.0));
    assert!(matches!(
        rational_approx(
            &f,
            &s,
            &[Pole::Sphere {
                alpha: 0.0,
                beta: 0.5
            }],
            2
        ),
        Err(Error::PoleInsideDomain { .. })
    ));
    let g = Arc::new(rasterize(&disk_domain(2.0, 16.0)).unwrap());
    let few = CompactSampler::from_points(g.clone(), &[(0.0, 0.0), (0.5, 0.5)], 4, 0).unwrap();
    assert!(matches!(
        poly_approx(&f, &few, 6),
        Err(Error::DegreeTooLargeForSamples { .. })
    ));
    assert!(matches!(
        CompactSampler::from_points(g, &[(0.0, 2.5)], 4, 0),
        Err(Error::SampleOutsideDomain { .. })
    ));

    let inner_pole = inverse_quadratic(0.5);
    assert!(matches!(
        poly_approx(&inner_pole, &s, 2),
        Err(Error::PoleInsideDomain { .. })
    ));
}

#[test]
fn approximants_satisfy_norm_sandwich() {
    let f = inverse_quadratic(2.0);
    let s = sampler(&disk_domain(1.25, 16.0));
    for d in [2, 6, 10] {
        let r = poly_approx(&f, &s, d).unwrap();
        let p = SliceFunction::polynomial(SlicePolynomial::new(
            r.approximant
                .basis
                .iter()
                .zip(&r.approximant.coeffs)
                .map(|(b, c)| match b {
                    cone_runge::approx::BasisFunction::Monomial { k, scale } => {
                        *c * scale.powi(-(*k as i32))
                    }
                    other => panic!("{other:?}"),
                })
                .collect(),
        ));
        for (n, &(a, b)) in s.plane.iter().enumerate().step_by(17) {
            let j = sample_root_sphere(n as u64);
            let nb = norm_bounds(&p, a, b, &j).unwrap();
            assert!(nb.holds(1e-9 * (1.0 + nb.rhs)));
            let direct = r.approximant.eval_at(a, b, &j);
            assert!(direct.max_abs_diff(&p.eval_at(a, b, &j).unwrap()) <= 1e-9);
        }
    }
}

#[test]
fn errors_decrease_with_degree() {
    let f = inverse_quadratic(2.0);
    let s = sampler(&disk_domain(1.25, 16.0));
    let errors: Vec<f64> = (0..=24)
        .map(|d| poly_approx(&f, &s, d).unwrap().stem_error)
        .collect();
    for w in errors.windows(2) {
        assert!(w[1] <= w[0] * 1.05 + 1e-12, "{w:?}");
    }
}

#[test]
fn pole_representatives_sit_in_holes() {
    let g = rasterize(&annulus(1.0, 3.0, 16.0)).unwrap();
    let poles = pole_representatives(&g);
    assert_eq!(poles.len(), 2);
    match poles[0] {
        Pole::Real { alpha } => assert!(alpha.abs() < 1.0),
        other => panic!("{other:?}"),
    }
    assert_eq!(poles[1], Pole::Infinity);
    assert_eq!(
        pole_representatives(&rasterize(&disk_domain(2.0, 16.0)).unwrap()),
        vec![Pole::Infinity]
    );
}

#[test]
fn classification_edges() {
    assert_eq!(classify(&[], 1e-12), ExperimentVerdict::Inconclusive);
    assert_eq!(classify(&[1e-6], 1e-12), ExperimentVerdict::Convergent);
    assert_eq!(
        classify(&[0.5, 0.4, 0.3, 2e-5], 1e-12),
        ExperimentVerdict::Stalled
    );
}

#[test]
fn experiment_is_thread_count_independent() {
    let f = inverse_quadratic(0.3);
    let d = annulus(1.0, 3.0, 16.0);
    let d1 = annulus(0.5, 3.0, 16.0);
    let degrees = [0, 4, 8, 12];
    let cfg = SamplerConfig::default();
    let par = runge_experiment(&d, &d1, &f, &degrees, &cfg).unwrap();
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| runge_experiment(&d, &d1, &f, &degrees, &cfg).unwrap());
    assert_eq!(
        serde_json::to_string(&par).unwrap(),
        serde_json::to_string(&one).unwrap()
    );
}

#[test]
fn polynomial_target_on_disk_pair() {
    let f = SliceFunction::polynomial(SlicePolynomial::real(&[1.0, -0.5, 0.25, 0.1]));
    let r = runge_experiment(
        &disk_domain(2.0, 16.0),
        &disk_domain(3.0, 16.0),
        &f,
        &[0, 2, 4, 6],
        &SamplerConfig::default(),
    )
    .unwrap();
    assert_eq!(r.verdict, ExperimentVerdict::Convergent);
    assert!(r.runge_pair && r.agrees);
    assert!(r.to_csv().starts_with("degree,sup_error,stem_error\n"));
    assert!(r.render_text().contains("convergent"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_polynomials_are_recovered(c in prop::collection::vec(-2.0f64..2.0, 1..6), seed in any::<u64>()) {
        let f = SliceFunction::polynomial(SlicePolynomial::real(&c));
        let g = Arc::new(rasterize(&disk_domain(2.0, 16.0)).unwrap());
        let cfg = SamplerConfig { seed, ..SamplerConfig::default() };
        let s = CompactSampler::from_domain(g, &cfg).unwrap();
        let r = poly_approx(&f, &s, c.len() - 1).unwrap();
        prop_assert!(r.sup_error <= 1e-9);
    }
}
