use std::process::ExitCode;
use std::time::Instant;

use logpot::basis::{eigen_residual, gram_matrix, EnergyMatch};
use logpot::quadrature::{angular_log_integral_numeric, angular_log_kernel, build_disk_rule, transform_numeric};
use logpot::spectrum::{certify_resolution, expected_slope, image_gram, singular_value_adaptive, SpectrumTable};
use logpot::transform::{reconcile, reconciled_convention, Branch};
use logpot::{BasisFunction, BasisIndex, Complex64, DiskFunction, SpectralParams64, TruncationPolicy64};

const TEST_SET: [(f64, usize); 4] = [(1.0, 0), (2.0, 0), (2.0, 1), (3.5, 2)];
const FIT_SET: [(f64, usize); 2] = [(1.0, 0), (2.0, 1)];
const N_RADIAL: usize = 64;
const N_ANGULAR: usize = 256;

type Outcome = Result<String, String>;

fn params(nu: f64, m: usize) -> SpectralParams64 {
    SpectralParams64::new(nu, m).expect("test parameters are valid")
}

fn verdict(pass: bool, detail: String) -> Outcome {
    if pass {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn basis_orthonormality() -> Outcome {
    let quad = build_disk_rule(N_RADIAL, N_ANGULAR).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for &(nu, m) in &TEST_SET {
        worst = worst.max(gram_matrix(&params(nu, m), 10, &quad).max_identity_deviation());
    }
    verdict(worst < 1e-8, format!("max |G - I| = {worst:.3e}"))
}

fn rotation_commutation() -> Outcome {
    let quad = build_disk_rule(32, 64).map_err(|e| e.to_string())?;
    let points: Vec<Complex64> = [0.15, 0.4, 0.65, 0.85]
        .iter()
        .flat_map(|&r| [0.3, 2.1, 4.4].map(|t| Complex64::from_polar(r, t)))
        .collect();
    let rotations: Vec<Complex64> =
        (0..8).map(|j| Complex64::from_polar(1.0, 0.37 + std::f64::consts::TAU * j as f64 / 8.0)).collect();
    let mut worst: f64 = 0.0;
    for &(nu, m) in &TEST_SET {
        let p = params(nu, m);
        for k in 0..=5 {
            let f = BasisFunction::new(&p, BasisIndex(k));
            for &lambda in &rotations {
                let rotated = |xi: Complex64| f.eval(lambda * xi);
                for &z in &points {
                    let left = transform_numeric(&rotated, z, &p, &quad).map_err(|e| e.to_string())?;
                    let right = transform_numeric(&f, lambda * z, &p, &quad).map_err(|e| e.to_string())?;
                    worst = worst.max((left - right).norm());
                }
            }
        }
    }
    verdict(worst < 1e-9, format!("max |L(R f)(z) - (L f)(lambda z)| = {worst:.3e}"))
}

fn angular_log_integral() -> Outcome {
    let rhos = [0.1, 0.3, 0.5, 0.7, 0.9];
    let rs = [0.15, 0.35, 0.55, 0.75, 0.95];
    let mut worst: f64 = 0.0;
    for &rho in &rhos {
        for &r in &rs {
            for n in 0..=6i64 {
                let numeric = angular_log_integral_numeric(n, rho, r);
                worst = worst.max((numeric - Complex64::new(angular_log_kernel(n, rho, r), 0.0)).norm());
            }
        }
    }
    verdict(worst < 1e-9, format!("max deviation = {worst:.3e} over 25 points, n = 0..6"))
}

fn closed_form_action() -> Outcome {
    let quad = build_disk_rule(N_RADIAL, N_ANGULAR).map_err(|e| e.to_string())?;
    let set: Vec<_> = TEST_SET.iter().map(|&(nu, m)| params(nu, m)).collect();
    let rec = reconcile(&set, &quad).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    let mut pass = true;
    for branch in Branch::ALL {
        let summary = rec.summary(branch, reconciled_convention(branch));
        let valid = summary.matches();
        pass &= valid;
        let rejected = logpot::transform::Convention::ALL
            .iter()
            .filter(|&&c| c != reconciled_convention(branch) && !rec.summary(branch, c).matches())
            .count();
        let mut part = format!(
            "{}: {} {}/{} points, worst {:.2e}, {} other conventions flagged",
            branch.label(),
            if valid { "VALID" } else { "INVALID" },
            summary.points - summary.failed_points - summary.evaluation_errors,
            summary.points,
            summary.max_rel_err.unwrap_or(f64::NAN),
            rejected
        );
        if !valid {
            let failing: Vec<String> = rec
                .points
                .iter()
                .filter(|p| p.branch == branch)
                .filter(|p| !p.relative_error(reconciled_convention(branch)).is_some_and(|e| e < rec.tolerance))
                .map(|p| format!("nu={} m={} k={} rho={} oracle={:.2e}", p.nu, p.m, p.k, p.rho, p.oracle))
                .collect();
            part.push_str(&format!(" [failing: {}]", failing.join("; ")));
        }
        parts.push(part);
    }
    verdict(pass, parts.join(" | "))
}

fn image_gram_diagonality() -> Outcome {
    let quad = build_disk_rule(N_RADIAL, N_ANGULAR).map_err(|e| e.to_string())?;
    let mut off: f64 = 0.0;
    let mut diag: f64 = 0.0;
    for &(nu, m) in &TEST_SET {
        let p = params(nu, m);
        let g = image_gram(&p, 10, &quad).map_err(|e| e.to_string())?;
        off = off.max(g.max_offdiag());
        for k in 0..=10 {
            let lambda = singular_value_adaptive(&p, BasisIndex(k), N_RADIAL, N_ANGULAR).map_err(|e| e.to_string())?;
            diag = diag.max((g.get(k, k).re - lambda * lambda).abs() / (lambda * lambda));
        }
    }
    verdict(off < 1e-8 && diag < 1e-7, format!("max off-diagonal {off:.3e}, max relative diagonal deviation {diag:.3e}"))
}

fn asymptotic_exponent() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for &(nu, m) in &FIT_SET {
        let p = params(nu, m);
        let table = SpectrumTable::compute(&p, 200, N_RADIAL, N_ANGULAR, &TruncationPolicy64::default())
            .and_then(|t| t.with_fit(50, 200))
            .map_err(|e| e.to_string())?;
        let fit = table.fit().expect("fit attached");
        let expected = expected_slope(&p);
        let ok = (fit.slope - expected).abs() <= 0.05;
        pass &= ok;
        parts.push(format!("(nu={nu}, m={m}) slope {:.4} vs {expected:.2}", fit.slope));
    }
    verdict(pass, parts.join(", "))
}

fn eigenrelation() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for &(nu, m) in &TEST_SET {
        let p = params(nu, m);
        let mut residual: f64 = 0.0;
        let mut values = Vec::new();
        let mut matches = Vec::new();
        for k in 0..=5 {
            let report = eigen_residual(&p, BasisIndex(k), 1e-4).map_err(|e| e.to_string())?;
            residual = residual.max(report.max_residual);
            values.push(report.rayleigh);
            matches.push(report.matched);
        }
        let spread = values.iter().cloned().fold(f64::MIN, f64::max) - values.iter().cloned().fold(f64::MAX, f64::min);
        let matched = if matches.iter().all(|&x| x == matches[0]) { matches[0] } else { EnergyMatch::Neither };
        pass &= residual <= 1e-4 && spread <= 1e-3;
        parts.push(format!(
            "(nu={nu}, m={m}) residual {residual:.2e}, eigenvalue {:.6} spread {spread:.1e}, matches {}",
            values[0],
            matched.label()
        ));
    }
    verdict(pass, parts.join(", "))
}

fn quadrature_certification() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut pass = true;
    for &(nu, m) in &FIT_SET {
        let cert = certify_resolution(&params(nu, m), 50, N_RADIAL, N_ANGULAR).map_err(|e| e.to_string())?;
        pass &= cert.passed();
        worst = worst.max(cert.worst().map_or(f64::INFINITY, |w| w.1));
    }
    verdict(pass, format!("max relative change under doubling {worst:.3e} for k <= 50"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("basis orthonormality", basis_orthonormality),
        ("rotation commutation", rotation_commutation),
        ("angular log integral", angular_log_integral),
        ("closed-form action vs oracle", closed_form_action),
        ("image Gram diagonality", image_gram_diagonality),
        ("asymptotic exponent", asymptotic_exponent),
        ("eigenrelation", eigenrelation),
        ("quadrature certification", quadrature_certification),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let seconds = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}; {seconds:.1}s)", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {}: FAIL {name} ({detail}; {seconds:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
