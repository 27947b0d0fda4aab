use superosc::{solve, symmetrize_domain, yield_of, Domain, MpReal, Precision, Problem, Real, SolveMethod};

fn high() -> Precision {
    Precision::high()
}

fn mp(x: f64) -> MpReal {
    MpReal::from_f64(x, high())
}

fn rel(a: &MpReal, b: f64) -> f64 {
    (a.to_f64() - b).abs() / b.abs()
}

#[test]
fn single_interval_spectrum_n10_m6_a1() {
    let problem = Problem::interval(10, 6, mp(1.0), 0, high()).unwrap();
    let sol = solve(&problem, SolveMethod::Secular).unwrap();
    let expected = [1.1892158e-23, 2.1768449e-18, 2.5596016e-14, 1.3794323e-10, 4.846913e-7, 0.0023299248];
    assert_eq!(sol.spectrum.len(), 6);
    for (y, e) in sol.spectrum.eigenvalues.iter().zip(expected) {
        assert!(rel(y, e) < 1e-6, "{} vs {e}", y.to_f64());
    }
}

#[test]
fn single_interval_spectrum_n10_m6_a2() {
    let problem = Problem::interval(10, 6, mp(2.0), 0, high()).unwrap();
    let sol = solve(&problem, SolveMethod::Secular).unwrap();
    let expected = [3.9032015e-10, 2.2421297e-6, 0.0014564819, 0.1443176, 0.83139834, 0.99813546];
    for (y, e) in sol.spectrum.eigenvalues.iter().zip(expected) {
        assert!(rel(y, e) < 1e-6, "{} vs {e}", y.to_f64());
    }
}

#[test]
fn annulus_spectrum_n10_m6() {
    let domain = symmetrize_domain(mp(0.5), mp(1.0), high()).unwrap();
    let problem = Problem::alternating(10, 6, domain, None, 0, high()).unwrap();
    let sol = solve(&problem, SolveMethod::Both).unwrap();
    let ys = &sol.spectrum.eigenvalues;
    assert!(rel(&ys[0], 2.3678649e-26) < 1e-6, "{}", ys[0].to_f64());
    assert!(rel(&ys[5], 4.8135979e-5) < 1e-6, "{}", ys[5].to_f64());
    let deltas = sol.method_deltas().unwrap();
    assert!(deltas.iter().all(|&d| d < 1e-6), "{deltas:?}");
}

#[test]
fn every_signal_is_consistent() {
    let problem = Problem::interval(8, 4, mp(1.0), 3, high()).unwrap();
    let sol = solve(&problem, SolveMethod::Secular).unwrap();
    let limit = 10f64.powi(-(high().digits() as i32 - 15));
    for (i, signal) in sol.spectrum.signals.iter().enumerate() {
        assert!(sol.constraint_residuals[i] < limit, "residual {}", sol.constraint_residuals[i]);
        let report = yield_of(signal, &problem.domain, Some(&sol.overlap), high()).unwrap();
        assert!(rel(&report.algebraic, sol.spectrum.eigenvalues[i].to_f64()) < 1e-20);
        assert!(report.relative_gap() < 1e-20, "gap {}", report.relative_gap());
        assert!(sol.spectrum.diagnostics[i].stationarity_residual < 1e-80);
    }
}

#[test]
fn full_period_gives_unit_yield() {
    let p = Precision::FAST;
    let problem = Problem::alternating(6, 3, Domain::full(p), Some((0.0, 1.0)), 0, p).unwrap();
    let sol = solve(&problem, SolveMethod::Secular).unwrap();
    assert!(sol.spectrum.eigenvalues.iter().all(|y| (y - 1.0).abs() < 1e-10));
}
