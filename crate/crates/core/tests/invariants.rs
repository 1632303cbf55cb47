use num_complex::Complex64;
use proptest::prelude::*;

use duts_core::poly::{CenteredPolynomial, DegreeWindow};
use duts_core::sets::{sample, SetSpec};
use duts_core::solver::{lp_oracle, solve_window, FitGrid, FitTask, SolverOptions, DEFAULT_FACETS};

fn complex(bound: f64) -> impl Strategy<Value = Complex64> {
    (-bound..bound, -bound..bound).prop_map(|(re, im)| Complex64::new(re, im))
}

fn poly(max_len: usize) -> impl Strategy<Value = CenteredPolynomial> {
    (complex(1.0), prop::collection::vec(complex(1.0), 1..max_len))
        .prop_map(|(c, coeffs)| CenteredPolynomial::new(c, coeffs).unwrap())
}

/// A pole fit with targets on a disk and zero on a small disk about `shift`.
fn pole_task(shift: Complex64, pole: Complex64, low: usize, high: usize) -> FitTask {
    let k = sample(&SetSpec::disk(Complex64::new(2.0, 0.5) + shift, 0.4), 8.0).unwrap();
    let l = sample(&SetSpec::disk(shift, 0.6), 8.0).unwrap();
    let targets = k.points().iter().map(|z| 1.0 / (z - shift - pole)).collect();
    FitTask::new(
        vec![FitGrid::from_set("K", &k, targets).unwrap(), FitGrid::small_on("L", &l).unwrap()],
        DegreeWindow::new(low, high).unwrap(),
        shift,
    )
    .unwrap()
}

/// Coefficientwise equality, ignoring trailing zeros.
fn same(a: &CenteredPolynomial, b: &CenteredPolynomial) -> bool {
    let zero = Complex64::new(0.0, 0.0);
    let n = a.coeffs().len().max(b.coeffs().len());
    a.center() == b.center()
        && (0..n).all(|k| a.coeffs().get(k).unwrap_or(&zero) == b.coeffs().get(k).unwrap_or(&zero))
}

proptest! {
    #[test]
    fn recentering_round_trips(p in poly(10), c in complex(1.0), z in complex(1.5)) {
        let back = p.recenter(c).recenter(p.center());
        let scale = p.coeffs().iter().map(|a| a.norm()).fold(1.0, f64::max);
        for (a, b) in back.coeffs().iter().zip(p.coeffs()) {
            prop_assert!((a - b).norm() <= 1e-10 * scale);
        }
        let (u, v) = (p.recenter(c).evaluate(z), p.evaluate(z));
        prop_assert!((u - v).norm() <= 1e-9 * (1.0 + v.norm()) * 4f64.powi(p.coeffs().len() as i32));
    }

    #[test]
    fn truncation_identities_hold_exactly(
        p in poly(6),
        tail in prop::collection::vec(complex(1.0), 1..8),
        gap in 0usize..4,
    ) {
        let mu = p.coeffs().len() - 1 + gap;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); mu + 1];
        coeffs.extend(tail);
        let big = CenteredPolynomial::new(p.center(), coeffs).unwrap();
        let f = big.add(&p);
        let lambda = f.coeffs().len() - 1;
        prop_assert!(same(&f.partial_sum(mu), &p));
        prop_assert!(same(&f.partial_sum(lambda), &f));
        prop_assert!(same(&f.partial_sum(lambda + 5), &f));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn objective_scales_with_the_targets(pole in complex(0.4), alpha in 0.01f64..100.0, low in 0usize..3, width in 2usize..8) {
        let task = pole_task(Complex64::new(0.0, 0.0), pole, low, low + width);
        let scaled = FitTask::new(
            task.grids()
                .iter()
                .map(|g| FitGrid::new(g.name.clone(), g.points.clone(), g.targets.iter().map(|y| y * alpha).collect()).unwrap())
                .collect(),
            task.window(),
            task.center(),
        )
        .unwrap();
        let opts = SolverOptions::default();
        let a = solve_window(&task, &opts).unwrap().objective;
        let b = solve_window(&scaled, &opts).unwrap().objective;
        prop_assert!((b - alpha * a).abs() <= 1e-6 * alpha * a, "{b} vs {}", alpha * a);
    }

    #[test]
    fn objective_is_translation_covariant(pole in complex(0.4), shift in complex(2.0), low in 0usize..3, width in 2usize..8) {
        let opts = SolverOptions::default();
        let a = solve_window(&pole_task(Complex64::new(0.0, 0.0), pole, low, low + width), &opts).unwrap().objective;
        let b = solve_window(&pole_task(shift, pole, low, low + width), &opts).unwrap().objective;
        prop_assert!((a - b).abs() <= 1e-6 * a, "{a} vs {b}");
    }

    #[test]
    fn lawson_agrees_with_the_lp_reference(pole in complex(0.4), low in 0usize..3, width in 2usize..8) {
        let task = pole_task(Complex64::new(0.0, 0.0), pole, low, low + width);
        let a = solve_window(&task, &SolverOptions::default()).unwrap().objective;
        let b = lp_oracle(&task, DEFAULT_FACETS).unwrap().objective;
        prop_assert!((a - b).abs() <= 0.05 * b + 1e-9, "lawson {a} lp {b}");
    }
}
