//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line (visible with `--nocapture`). Tolerances are pinned here,
//! in code; the underlying checks live in `capfluid::verify` so the CLI
//! `verify` subcommand exercises the same machinery.

use capfluid::conjugate::{self, PhysicalState};
use capfluid::eulerian1d::{self, EulerianField};
use capfluid::grid::StencilOrder;
use capfluid::lagrangian1d::{self, Energy1D, LagrangianField};
use capfluid::spectral::{self, WaveVector};
use capfluid::thermo::{self, EosModel, ThermoState};
use capfluid::verify::{self, CheckResult, VerifySettings};
use capfluid::Error;

use std::f64::consts::TAU;

fn settings() -> VerifySettings {
    VerifySettings {
        spectral_samples: 200,
        ..Default::default()
    }
}

fn report(criterion: &str, passed: bool, detail: &str) {
    println!(
        "ACCEPTANCE {}: {criterion} ({detail})",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "{criterion}: {detail}");
}

fn report_check(criterion: &str, check: &CheckResult, tolerance: f64) {
    let passed = check.worst_value.is_finite() && check.worst_value <= tolerance;
    report(
        criterion,
        passed,
        &format!(
            "worst {:.3e} <= tol {:.1e}, {} samples{}",
            check.worst_value,
            tolerance,
            check.samples,
            check
                .note
                .as_deref()
                .map(|n| format!("; {n}"))
                .unwrap_or_default()
        ),
    );
}

#[test]
fn criterion_01_hermitian_structure() {
    let check = verify::check_hermitian_structure(&settings());
    report_check(
        "1. Hermitian pencil structure over 200 seeded samples",
        &check,
        1e-12,
    );
}

#[test]
fn criterion_02_spectral_realness() {
    // Metric folds the oracle imaginary parts (<= 1e-8) and the pencil
    // residuals (<= 1e-9, scaled into the same bound).
    let check = verify::check_spectral_realness(&settings());
    report_check(
        "2. spectral realness: oracle Im <= 1e-8, pencil residuals <= 1e-9",
        &check,
        1e-8,
    );
}

#[test]
fn criterion_03_oracle_equivalence() {
    let check = verify::check_oracle_equivalence(&settings());
    report_check(
        "3. symmetric form vs direct linearization, 200 samples",
        &check,
        1e-8,
    );
}

#[test]
fn criterion_04_godunov_reduction() {
    let check = verify::check_godunov_reduction(&settings());
    report_check(
        "4. vanishing capillarity reduces to gas-dynamics acoustics",
        &check,
        1e-6,
    );
}

#[test]
fn criterion_05_capillary_branch_law() {
    // Reference values frozen from the hand linearization
    // lambda^2 = a^2 k^2 + c rho_e k^4 with a^2 = 2, c = 0.1, rho_e = 1.
    let frozen: [(f64, f64); 4] = [
        (0.5, 0.7115124735378854), // sqrt(0.50625)
        (1.0, 1.449137674618944),  // sqrt(2.1)
        (2.0, 3.0983866769659336), // sqrt(9.6)
        (4.0, 7.58946638440411),   // sqrt(57.6)
    ];
    let eos = EosModel::Polytropic { k: 1.0, gamma: 2.0 };
    let p = PhysicalState::rest(1.0, 0.0, 0.1);
    let v = conjugate::to_conjugate(&p, &eos).unwrap();
    let mut worst = 0.0_f64;
    for (kmag, lambda_ref) in frozen {
        assert!((lambda_ref * lambda_ref - (2.0 * kmag * kmag + 0.1 * kmag.powi(4))).abs() < 1e-12);
        let res = spectral::dispersion_eigs(&v, &WaveVector::new(kmag, 0.0, 0.0), &eos, p.thermo())
            .unwrap();
        worst = worst.max((res.lambdas[7] - lambda_ref).abs() / lambda_ref);
        worst = worst.max((res.lambdas[0] + lambda_ref).abs() / lambda_ref);
        let oracle =
            spectral::oracle_dispersion(&p, &WaveVector::new(kmag, 0.0, 0.0), &eos).unwrap();
        worst = worst.max((oracle[7].re - lambda_ref).abs() / lambda_ref);
    }
    // The general-state version of the same law, through the suite check.
    let check = verify::check_capillary_branch(&settings());
    worst = worst.max(check.worst_value);
    report(
        "5. capillary branch law lambda^2 = a^2 k^2 + c rho k^4",
        worst <= 1e-8,
        &format!("worst {worst:.3e} <= 1e-8 at k in {{0.5, 1, 2, 4}}"),
    );
}

#[test]
fn criterion_06_lagrangian_matrix_fidelity() {
    let check = verify::check_lagrangian_matrices(&settings());
    report_check(
        "6. 1-D matrices exact, closed-form dispersion to 1e-10",
        &check,
        1e-10,
    );
}

#[test]
fn criterion_07_gradient_checks() {
    let thermo_check = verify::check_thermo_derivatives(&settings());
    let pi_check = verify::check_pi_derivatives(&settings());
    let pi1d_check = verify::check_lagrangian_pi(&settings());
    let passed = thermo_check.passed && pi_check.passed && pi1d_check.passed;
    report(
        "7. analytic gradients/Hessians vs finite differences (1e-6 / 1e-5)",
        passed,
        &format!(
            "thermo {:.3e}, Pi {:.3e}, pi-1d {:.3e}",
            thermo_check.worst_value, pi_check.worst_value, pi1d_check.worst_value
        ),
    );
}

#[test]
fn criterion_08_conservation_audits() {
    // One crossing time at N = 256 (crossing = L / a at the reference
    // state), drift <= 1e-7 relative for both solvers.
    let crossing = TAU / 2.0_f64.sqrt();
    let lag = verify::check_lagrangian_energy(&settings(), 256, crossing);
    let eul = verify::check_eulerian_energy(&settings(), 256, crossing);
    let drift_ok = lag.worst_value <= 1e-7 && eul.worst_value <= 1e-7;

    // Measured convergence across three dt halvings: at least fourth-order
    // drift decay per halving (RK4's energy error on oscillatory modes is
    // in fact fifth order, so ratios sit near 32).
    let efun = Energy1D::PowerLaw {
        gamma: 2.0,
        capillarity: 0.1,
    };
    let eos = EosModel::Polytropic { k: 1.0, gamma: 2.0 };
    let lag_energy_at = |halving: u32| -> f64 {
        let mut f =
            LagrangianField::standing_wave(64, TAU, 1.0, 0.12, 8, StencilOrder::Fourth).unwrap();
        let base = lagrangian1d::stable_dt(&f, &efun, 0.9).unwrap();
        let dt = base / (1 << halving) as f64;
        for _ in 0..(32usize << halving) {
            lagrangian1d::step_rk4(&mut f, &efun, dt).unwrap();
        }
        lagrangian1d::total_energy(&f, &efun).unwrap()
    };
    let eul_energy_at = |halving: u32| -> f64 {
        let mut f = EulerianField::standing_wave(
            64,
            TAU,
            1.0,
            0.0,
            0.0,
            0.03,
            6,
            0.1,
            StencilOrder::Fourth,
        )
        .unwrap();
        let base = eulerian1d::stable_dt(&f, &eos, 0.9).unwrap();
        let dt = base / (1 << halving) as f64;
        for _ in 0..(32usize << halving) {
            eulerian1d::step_rk4(&mut f, &eos, dt).unwrap();
        }
        eulerian1d::energy_audit(&f, &eos).unwrap()
    };
    let ratios = |e: [f64; 4]| -> (f64, f64) {
        let d: Vec<f64> = (0..3).map(|i| (e[i] - e[3]).abs()).collect();
        (d[0] / d[1], d[1] / d[2])
    };
    let (lr1, lr2) = ratios([
        lag_energy_at(0),
        lag_energy_at(1),
        lag_energy_at(2),
        lag_energy_at(4),
    ]);
    let (er1, er2) = ratios([
        eul_energy_at(0),
        eul_energy_at(1),
        eul_energy_at(2),
        eul_energy_at(4),
    ]);
    let order_ok = [lr1, lr2, er1, er2]
        .iter()
        .all(|r| (12.0..48.0).contains(r));

    report(
        "8. energy drift <= 1e-7 over a crossing time at N=256, O(dt^4) decay",
        drift_ok && order_ok,
        &format!(
            "drift lag {:.3e} eul {:.3e}; halving ratios lag ({lr1:.1}, {lr2:.1}) eul ({er1:.1}, {er2:.1})",
            lag.worst_value, eul.worst_value
        ),
    );
}

#[test]
fn criterion_09_constraint_propagation() {
    let check = verify::check_constraint_propagation(&settings(), 64, 10_000);
    report_check(
        "9. gradient constraint preserved over 10^4 RK4 steps",
        &check,
        1e-10,
    );
}

#[test]
fn criterion_10_galilean_invariance() {
    let check = verify::check_galilean_shift(&settings());
    report_check(
        "10. spectrum shifts by u.k under Galilean boost",
        &check,
        1e-10,
    );
}

#[test]
fn criterion_11_spinodal_negative_control() {
    // (a) typed NotPositiveDefinite from the symmetric route, (b) a genuinely
    // complex pair (|Im| > 1e-4) from the unconstrained oracle; decided
    // inline here, independent of the suite's own metric.
    let vdw = EosModel::VanDerWaals {
        a: 1.0,
        b: 1.0 / 3.0,
        r: 1.0,
        cv: 1.5,
    };
    let eta = thermo::eta_for_temperature(&vdw, 1.0, 0.4).unwrap();
    assert!(
        !thermo::evaluate(&vdw, ThermoState::new(1.0, eta))
            .unwrap()
            .convex
    );
    let p = PhysicalState::rest(1.0, eta, 0.01);
    let v = conjugate::to_conjugate(&p, &vdw).unwrap();
    let k = WaveVector::new(1.0, 0.0, 0.0);
    let typed = matches!(
        spectral::dispersion_eigs(&v, &k, &vdw, p.thermo()),
        Err(Error::NotPositiveDefinite { .. })
    );
    let oracle = spectral::oracle_dispersion(&p, &k, &vdw).unwrap();
    let max_im = oracle.iter().fold(0.0_f64, |m, z| m.max(z.im.abs()));
    report(
        "11. spinodal state: typed SPD failure and |Im lambda| > 1e-4",
        typed && max_im > 1e-4,
        &format!("typed error: {typed}, max |Im| = {max_im:.3e}"),
    );
}

#[test]
fn criterion_12_deterministic_verify_reports() {
    let s = VerifySettings {
        spectral_samples: 25,
        ..Default::default()
    };
    let a = verify::run_suite(&s).to_json();
    let b = verify::run_suite(&s).to_json();
    report(
        "12. verify reports byte-identical under a fixed seed",
        a == b && !a.is_empty(),
        &format!("{} bytes", a.len()),
    );
}
