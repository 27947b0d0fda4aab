use superosc::{
    monotonicity_table, scaling_sweep, solve, zero_crossings, zero_crossings_with, Domain, Error, Execution,
    FourierCosineSignal, MpReal, Precision, Problem, Real, SolveMethod,
};

fn prec(digits: u32) -> Precision {
    Precision::new(digits).unwrap()
}

#[test]
fn crossings_of_pure_harmonics() {
    let p = Precision::FAST;
    for m in 1..=8 {
        let s = FourierCosineSignal::harmonic(8, m, 1.0, p);
        assert_eq!(zero_crossings(&s, &Domain::full(p), 100_000).unwrap(), 2 * m);
    }
    // cos(5t) on (-1, 1) changes sign at ±π/10 and ±3π/10
    let s = FourierCosineSignal::harmonic(5, 5, 1.0, p);
    assert_eq!(zero_crossings(&s, &Domain::interval(1.0, p).unwrap(), 10_000).unwrap(), 4);
}

#[test]
fn crossing_counts_do_not_depend_on_execution() {
    let p = prec(40);
    let problem = Problem::interval(10, 6, MpReal::from_f64(2.0, p), 0, p).unwrap();
    let sol = solve(&problem, SolveMethod::Secular).unwrap();
    for s in &sol.spectrum.signals {
        let seq = zero_crossings_with(s, &problem.domain, 20_000, Execution::Sequential).unwrap();
        let par = zero_crossings_with(s, &problem.domain, 20_000, Execution::Parallel).unwrap();
        assert_eq!(seq, par);
    }
}

#[test]
fn scaling_exponents_small_instance() {
    let p = prec(60);
    let a: Vec<MpReal> = [32.0, 16.0, 8.0].iter().map(|d| MpReal::from_f64(1.0 / d, p)).collect();
    let table = scaling_sweep(6, 3, &a, p, Execution::default()).unwrap();
    assert!(table.failures.is_empty());
    assert_eq!(table.rows.len(), 3 * 5);
    assert_eq!(table.slopes.len(), 5);
    for s in &table.slopes {
        assert_eq!(s.expected, f64::from(4 * (6 - s.index as i32) + 5));
        assert!(s.relative_error() < 0.05, "{s:?}");
    }
    let sequential = scaling_sweep(6, 3, &a, p, Execution::Sequential).unwrap();
    assert_eq!(sequential.rows, table.rows);
}

#[test]
fn sweep_argument_errors() {
    let fast = Precision::FAST;
    assert!(matches!(scaling_sweep(6, 3, &[0.05], fast, Execution::default()), Err(Error::InvalidArgument(_))));
    assert!(scaling_sweep::<f64>(6, 3, &[], fast, Execution::default()).is_err());
    assert!(matches!(
        monotonicity_table(4, &1.0, &[2, 6], fast, Execution::default()),
        Err(Error::TooManyConstraints { constraints: 6, band_limit: 4 })
    ));
}

#[test]
fn monotonicity_table_groups_by_m() {
    let p = prec(50);
    let table = monotonicity_table(6, &MpReal::from_f64(0.5, p), &[2, 4], p, Execution::default()).unwrap();
    assert_eq!(table.spectrum_for(2).len(), 6);
    assert_eq!(table.spectrum_for(4).len(), 4);
    for v in table.monotonicity_violations() {
        assert!(v.value_low < v.value_high);
        assert!(v.m_low < v.m_high);
    }
}

#[test]
fn completion_seed_does_not_change_the_answer() {
    let p = Precision::high();
    let solve_with = |seed| {
        solve(&Problem::interval(10, 5, MpReal::from_f64(1.0, p), seed, p).unwrap(), SolveMethod::Secular).unwrap()
    };
    let (a, b) = (solve_with(1), solve_with(2));
    for (x, y) in a.spectrum.eigenvalues.iter().zip(&b.spectrum.eigenvalues) {
        assert!(((x.clone() - y) / x).abs().to_f64() < 1e-60);
    }
    for (sa, sb) in a.spectrum.signals.iter().zip(&b.spectrum.signals) {
        for (x, y) in sa.coeffs().iter().zip(sb.coeffs()) {
            assert!((x.clone() - y).abs().to_f64() < 1e-60 * x.abs().to_f64().max(1.0));
        }
    }
}
