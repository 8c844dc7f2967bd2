use anyhow::Result;
use serde::Serialize;
use serde_json::value::RawValue;

use logpot::basis::{eigen_residual, gram_matrix, EnergyMatch};
use logpot::quadrature::{build_disk_rule, transform_numeric};
use logpot::spectrum::{adapted_rule, certify_resolution, decimal, image_gram, SpectrumTable};
use logpot::transform::{
    boundary_decay_exponent, radial_action, radial_action_oracle, reconcile, relative_error, Branch, Convention,
};
use logpot::{BasisFunction, BasisIndex, Complex64, DiskFunction, TruncationPolicy64};

use crate::config::{Format, RunConfig};
use crate::output::{number, write_all};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_FLAGGED: u8 = 2;

#[derive(Serialize)]
struct ParamsJson {
    nu: Option<Box<RawValue>>,
    m: usize,
}

fn params_json(config: &RunConfig) -> ParamsJson {
    ParamsJson { nu: number(config.params.nu()), m: config.params.m() }
}

pub fn spectrum(config: &RunConfig) -> Result<u8> {
    let table = SpectrumTable::compute(
        &config.params,
        config.k_max,
        config.n_radial,
        config.n_angular,
        &TruncationPolicy64::default(),
    )?
    .with_default_fit()?;
    let files = match config.format {
        Format::Csv => {
            let mut files = vec![("spectrum.csv".to_string(), table.to_csv())];
            if let Some(fit) = table.fit_csv() {
                files.push(("spectrum_fit.csv".to_string(), fit));
            }
            files
        }
        Format::Json => vec![("spectrum.json".to_string(), table.to_json())],
    };
    write_all(&config.out_dir, &files)?;
    let invalid = table.rows().iter().filter(|r| r.flag == logpot::spectrum::Flag::Invalid).count();
    if invalid > 0 {
        eprintln!("{invalid} of {} closed-form rows flagged INVALID", table.rows().len());
        return Ok(EXIT_FLAGGED);
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct PropertyJson {
    name: &'static str,
    pass: bool,
    worst: Option<Box<RawValue>>,
    tolerance: Option<Box<RawValue>>,
    detail: String,
}

#[derive(Serialize)]
struct VerifyJson {
    params: ParamsJson,
    kmax: usize,
    n_radial: usize,
    n_angular: usize,
    all_pass: bool,
    eigenvalue_formula: &'static str,
    properties: Vec<PropertyJson>,
    reconciliation_ledger: String,
}

fn property(name: &'static str, worst: f64, tolerance: f64, detail: String) -> PropertyJson {
    PropertyJson { name, pass: worst < tolerance, worst: number(worst), tolerance: number(tolerance), detail }
}

fn property_at_most(name: &'static str, worst: f64, bound: f64, detail: String) -> PropertyJson {
    PropertyJson { name, pass: worst <= bound, worst: number(worst), tolerance: number(bound), detail }
}

const ROTATION_RADII: [f64; 4] = [0.15, 0.4, 0.65, 0.85];
const ROTATION_ANGLES: [f64; 3] = [0.3, 2.1, 4.4];
const ROTATION_COUNT: usize = 8;
const EIGEN_KMAX: usize = 5;
const EIGEN_STEP: f64 = 1e-4;
const IMAGE_GRAM_KMAX: usize = 10;

pub fn verify(config: &RunConfig) -> Result<u8> {
    let params = &config.params;
    let quad = build_disk_rule::<f64>(config.n_radial, config.n_angular)?;
    let mut properties = Vec::new();

    let cert = certify_resolution(params, config.k_max, config.n_radial, config.n_angular)?;
    let (k_worst, change) = cert.worst().unwrap_or((0, f64::INFINITY));
    properties.push(property(
        "richardson_certification",
        change,
        cert.tolerance,
        format!("largest relative change of lambda_k under doubled resolution at k={k_worst}"),
    ));

    let gram = gram_matrix(params, config.k_max, &quad);
    properties.push(property(
        "basis_gram",
        gram.max_identity_deviation(),
        1e-8,
        format!("entrywise distance of the {0}x{0} basis Gram matrix to the identity", config.k_max + 1),
    ));

    let mut rotation_worst: f64 = 0.0;
    for k in 0..=config.k_max.min(EIGEN_KMAX) {
        let f = BasisFunction::new(params, BasisIndex(k));
        for j in 0..ROTATION_COUNT {
            let lambda = Complex64::from_polar(1.0, 0.37 + std::f64::consts::TAU * j as f64 / ROTATION_COUNT as f64);
            let rotated = |xi: Complex64| f.eval(lambda * xi);
            for &r in &ROTATION_RADII {
                for &t in &ROTATION_ANGLES {
                    let z = Complex64::from_polar(r, t);
                    let left = transform_numeric(&rotated, z, params, &quad)?;
                    let right = transform_numeric(&f, lambda * z, params, &quad)?;
                    rotation_worst = rotation_worst.max((left - right).norm());
                }
            }
        }
    }
    properties.push(property(
        "rotation_commutation",
        rotation_worst,
        1e-9,
        "largest |L(R f)(z) - (L f)(lambda z)| over 8 rotations and 12 points".to_string(),
    ));

    let image = image_gram(params, config.k_max.min(IMAGE_GRAM_KMAX), &quad)?;
    properties.push(property(
        "image_orthogonality",
        image.max_offdiag(),
        1e-8,
        "largest off-diagonal entry of the image Gram matrix".to_string(),
    ));

    let rec = reconcile(std::slice::from_ref(params), &quad)?;
    let worst_closed = rec.worst_reconciled_error().unwrap_or(f64::INFINITY);
    let statuses: Vec<String> = Branch::ALL
        .iter()
        .filter(|b| rec.has_branch(**b))
        .map(|b| {
            let chosen = rec.chosen(*b).map_or("none", |c| c.label());
            format!("{}={}", b.label(), chosen)
        })
        .collect();
    properties.push(PropertyJson {
        name: "closed_form_vs_oracle",
        pass: rec.reconciled_conventions_match(),
        worst: number(worst_closed),
        tolerance: number(rec.tolerance),
        detail: format!("matching conventions: {}", statuses.join(", ")),
    });

    let mut eigen_worst: f64 = 0.0;
    let mut rayleigh = Vec::new();
    let mut matched = Vec::new();
    for k in 0..=EIGEN_KMAX {
        let report = eigen_residual(params, BasisIndex(k), EIGEN_STEP)?;
        eigen_worst = eigen_worst.max(report.max_residual);
        rayleigh.push(report.rayleigh);
        matched.push(report.matched);
    }
    properties.push(property_at_most(
        "eigen_residual",
        eigen_worst,
        1e-4,
        format!("finite-difference residual of the Hamiltonian at h={EIGEN_STEP}, k <= {EIGEN_KMAX}"),
    ));
    let spread = rayleigh.iter().cloned().fold(f64::MIN, f64::max) - rayleigh.iter().cloned().fold(f64::MAX, f64::min);
    properties.push(property_at_most(
        "eigenvalue_degeneracy",
        spread,
        1e-3,
        format!("spread of Rayleigh quotients, eigenvalue {}", decimal(rayleigh[0])),
    ));
    let formula = if matched.iter().all(|&m| m == matched[0]) { matched[0] } else { EnergyMatch::Neither };

    let ledger = rec.ledger();
    let all_pass = properties.iter().all(|p| p.pass);
    let report = VerifyJson {
        params: params_json(config),
        kmax: config.k_max,
        n_radial: config.n_radial,
        n_angular: config.n_angular,
        all_pass,
        eigenvalue_formula: formula.label(),
        properties,
        reconciliation_ledger: ledger.clone(),
    };
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    write_all(
        &config.out_dir,
        &[("verify.json".to_string(), json), ("reconciliation.txt".to_string(), ledger)],
    )?;
    for p in report.properties.iter().filter(|p| !p.pass) {
        eprintln!("verification failed: {} ({})", p.name, p.detail);
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_FLAGGED })
}

#[derive(Serialize)]
struct ActionRowJson {
    rho: Option<Box<RawValue>>,
    closed: Option<Box<RawValue>>,
    oracle: Option<Box<RawValue>>,
    rel_diff: Option<Box<RawValue>>,
}

#[derive(Serialize)]
struct ActionJson {
    params: ParamsJson,
    k: usize,
    branch: &'static str,
    convention: &'static str,
    boundary_exponent: Option<Box<RawValue>>,
    rows: Vec<ActionRowJson>,
}

pub fn action(config: &RunConfig, k: usize, samples: usize) -> Result<u8> {
    if samples == 0 {
        anyhow::bail!("--samples must be at least 1");
    }
    let params = &config.params;
    let index = BasisIndex(k);
    let quad = adapted_rule(params, index, config.n_radial, config.n_angular)?;
    let mut rows = Vec::with_capacity(samples);
    for i in 1..=samples {
        let rho = i as f64 / (samples + 1) as f64;
        let closed = radial_action(params, index, rho, Convention::Rederived)?;
        let oracle = radial_action_oracle(params, index, rho, &quad)?;
        rows.push((rho, closed, oracle, relative_error(closed, oracle)));
    }
    let contents = match config.format {
        Format::Csv => {
            let mut csv = String::from("rho,closed,oracle,rel_diff\n");
            for &(rho, closed, oracle, rel) in &rows {
                csv.push_str(&format!("{},{},{},{}\n", decimal(rho), decimal(closed), decimal(oracle), decimal(rel)));
            }
            ("action.csv".to_string(), csv)
        }
        Format::Json => {
            let exponent = boundary_decay_exponent(|r| radial_action_oracle(params, index, r, &quad))?;
            let document = ActionJson {
                params: params_json(config),
                k,
                branch: Branch::of(params.m(), k).label(),
                convention: Convention::Rederived.label(),
                boundary_exponent: number(exponent),
                rows: rows
                    .iter()
                    .map(|&(rho, closed, oracle, rel)| ActionRowJson {
                        rho: number(rho),
                        closed: number(closed),
                        oracle: number(oracle),
                        rel_diff: number(rel),
                    })
                    .collect(),
            };
            let mut json = serde_json::to_string_pretty(&document)?;
            json.push('\n');
            ("action.json".to_string(), json)
        }
    };
    write_all(&config.out_dir, &[contents])?;
    Ok(EXIT_OK)
}
