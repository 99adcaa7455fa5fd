use std::time::Instant;

use qclone::baseline::werner_2to2;
use qclone::cloner::{
    analytic_reduced, predicted_f, reduced_single_qubit, shrink_fit, CloneCoefficients, Cloner,
};
use qclone::linalg::{validate_density, ComplexMatrix, Tolerances};
use qclone::states::{
    bloch_from_density, density_from_bloch, random_mixed, BlochVector, QubitDensity,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::records::{emit, emit_one, BaselineRow, CloneRecord, Marginal, SweepRecord};
use crate::{Failure, Format};

/// Full eigendecomposition of the output is skipped above this M.
const MAX_EIG_QUBITS: usize = 8;

fn parse_bloch(v: &[f64]) -> Result<QubitDensity, Failure> {
    let [x, y, z] = v else {
        return Err(Failure::Usage(format!(
            "--bloch takes 3 values, got {}",
            v.len()
        )));
    };
    let b = BlochVector::new(*x, *y, *z).map_err(|e| Failure::Usage(e.to_string()))?;
    density_from_bloch(&b).map_err(|e| Failure::Usage(e.to_string()))
}

fn check_m(m: usize) -> Result<(), Failure> {
    if m < 2 {
        return Err(Failure::Usage(format!("--m must be at least 2, got {m}")));
    }
    Ok(())
}

/// Draws a probe with an identifiable shrinking factor.
fn draw_probe<R: Rng>(rng: &mut R) -> QubitDensity {
    loop {
        let rho = random_mixed(rng, 1.0).expect("radius 1 is valid");
        if bloch_from_density(&rho).norm() > 1e-9 {
            return rho;
        }
    }
}

struct Check {
    name: &'static str,
    measured: f64,
}

pub fn verify(m: usize, trials: usize, seed: u64, tol: f64, cap: usize) -> Result<(), Failure> {
    check_m(m)?;
    if trials == 0 {
        return Err(Failure::Usage("--trials must be positive".into()));
    }
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Failure::Usage(format!(
            "--tol must be a nonnegative number, got {tol}"
        )));
    }
    let predicted = predicted_f(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probes: Vec<QubitDensity> = (0..trials).map(|_| draw_probe(&mut rng)).collect();
    let cloner = Cloner::new(cap);
    let dense = cloner.supports_dense(m);

    println!("verify M = {m}, trials = {trials}, seed = {seed}, tol = {tol:e}");
    if !dense {
        println!(
            "M = {m} exceeds the dense cap of {cap} qubits; running analytic-path checks only"
        );
    }

    let mut checks = vec![Check {
        name: "coefficient_normalization",
        measured: CloneCoefficients::new(m)?.normalization_error(),
    }];

    let mut f_analytic_err: f64 = 0.0;
    let mut analytic_res: f64 = 0.0;
    let mut f_sum = 0.0;
    for rho in &probes {
        let fit = shrink_fit(rho, &analytic_reduced(rho, m)?)?;
        f_analytic_err = f_analytic_err.max((fit.f - predicted).abs());
        analytic_res = analytic_res.max(fit.residual);
        if !dense {
            f_sum += fit.f;
        }
    }

    if dense {
        let iso = cloner.isometry(m)?;
        checks.push(Check {
            name: "isometry",
            measured: iso.isometry_error(),
        });
        let (mut f_err, mut res, mut gap, mut sym): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
        let mut validity = 0.0;
        for (t, rho) in probes.iter().enumerate() {
            let out = iso.clone_state(rho);
            let marginals: Vec<ComplexMatrix> = (0..m)
                .map(|q| reduced_single_qubit(&out, q).map(|r| r.into_matrix()))
                .collect::<Result<_, _>>()?;
            let fit = shrink_fit(rho, &marginals[0])?;
            f_sum += fit.f;
            f_err = f_err.max((fit.f - predicted).abs());
            res = res.max(fit.residual);
            gap = gap.max(marginals[0].max_abs_diff(&analytic_reduced(rho, m)?));
            for q in 1..m {
                sym = sym.max(marginals[0].max_abs_diff(&marginals[q]));
            }
            if t == 0 {
                validity = density_violation(out.matrix(), m);
            }
        }
        checks.push(Check {
            name: "shrinking_factor",
            measured: f_err,
        });
        checks.push(Check {
            name: "universality_residual",
            measured: res,
        });
        checks.push(Check {
            name: "oracle_gap",
            measured: gap,
        });
        checks.push(Check {
            name: "per_qubit_symmetry",
            measured: sym,
        });
        checks.push(Check {
            name: "output_density",
            measured: validity,
        });
    }
    checks.push(Check {
        name: "analytic_shrinking_factor",
        measured: f_analytic_err,
    });
    checks.push(Check {
        name: "analytic_residual",
        measured: analytic_res,
    });

    println!(
        "f_measured = {:.12} f_predicted = {:.12}",
        f_sum / trials as f64,
        predicted
    );
    let mut failed = Vec::new();
    for c in &checks {
        let pass = c.measured <= tol;
        println!(
            "{:<28} measured = {:.3e}  tol = {:.1e}  {}",
            c.name,
            c.measured,
            tol,
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            failed.push(c.name);
        }
    }
    if failed.is_empty() {
        println!("all {} checks passed", checks.len());
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}

/// Largest deviation from the density invariants: Hermiticity, unit trace
/// and, for small M, negative eigenvalues.
fn density_violation(m: &ComplexMatrix, qubits: usize) -> f64 {
    let mut worst = m.hermiticity_error().max((m.trace().re - 1.0).abs());
    if qubits <= MAX_EIG_QUBITS {
        let strict = Tolerances {
            herm: f64::INFINITY,
            trace: f64::INFINITY,
            psd: 0.0,
        };
        if let Err(qclone::Error::InvalidDensity(rep)) =
            validate_density(m.clone(), &vec![2; qubits], &strict)
        {
            for v in rep.violations {
                if let qclone::Violation::NotPositive { min_eigenvalue } = v {
                    worst = worst.max(-min_eigenvalue);
                }
            }
        }
    }
    worst
}

pub fn sweep(
    m_min: usize,
    m_max: usize,
    trials: usize,
    seed: u64,
    format: Format,
    timing: bool,
    cap: usize,
) -> Result<(), Failure> {
    if m_min < 2 || m_min > m_max {
        return Err(Failure::Usage(format!(
            "need 2 <= m-min <= m-max, got {m_min}..{m_max}"
        )));
    }
    // seeds are drawn up front so results do not depend on scheduling
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let jobs: Vec<(usize, u64)> = (m_min..=m_max)
        .flat_map(|m| (0..trials).map(move |_| m))
        .map(|m| (m, master.random::<u64>()))
        .collect();
    let cloner = Cloner::new(cap);

    let records = jobs
        .par_iter()
        .map(|&(m, trial_seed)| -> Result<SweepRecord, Failure> {
            let start = Instant::now();
            let rho = draw_probe(&mut ChaCha8Rng::seed_from_u64(trial_seed));
            let analytic = analytic_reduced(&rho, m)?;
            let (marginal, oracle_gap) = if cloner.supports_dense(m) {
                let out = cloner.clone_channel(&rho, m)?;
                let r = reduced_single_qubit(&out, 0)?.into_matrix();
                let gap = r.max_abs_diff(&analytic);
                (r, Some(gap))
            } else {
                (analytic, None)
            };
            let fit = shrink_fit(&rho, &marginal)?;
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            Ok(SweepRecord {
                m,
                seed: trial_seed,
                f_measured: fit.f,
                f_predicted: predicted_f(m)?,
                residual: fit.residual,
                oracle_gap,
                wall_time_ms: if timing { elapsed } else { 0.0 },
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    emit(&records, format)
}

pub fn clone(bloch: &[f64], m: usize, format: Format, cap: usize) -> Result<(), Failure> {
    let rho = parse_bloch(bloch)?;
    check_m(m)?;
    let cloner = Cloner::new(cap);
    let (marginal, path) = if cloner.supports_dense(m) {
        let out = cloner.clone_channel(&rho, m)?;
        (reduced_single_qubit(&out, 0)?.into_matrix(), "dense")
    } else {
        (analytic_reduced(&rho, m)?, "analytic")
    };
    let fit = match shrink_fit(&rho, &marginal) {
        Ok(fit) => Some((fit.f, fit.residual)),
        Err(qclone::Error::Unidentifiable(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let record = CloneRecord::new(m, path, Marginal::from(&marginal), fit, predicted_f(m)?);
    emit_one(&record, format)
}

pub fn baseline(bloch: &[f64], format: Format) -> Result<(), Failure> {
    let rho = parse_bloch(bloch)?;
    let input = rho.to_density();

    let ours = reduced_single_qubit(&Cloner::new(2).clone_channel(&rho, 2)?, 0)?;
    let ours_gap = qclone::linalg::trace_distance(&ours, &input)?;
    let proj = werner_2to2(&rho)?;
    let proj_gap = qclone::linalg::trace_distance(&proj.marginal.to_density(), &input)?;

    let row = |machine, m: &ComplexMatrix, gap, probability| BaselineRow {
        machine,
        m00_re: m[(0, 0)].re,
        m01_re: m[(0, 1)].re,
        m01_im: m[(0, 1)].im,
        m11_re: m[(1, 1)].re,
        trace_distance: gap,
        probability,
    };
    let rows = [
        row("cloner_m2", ours.matrix(), ours_gap, 1.0),
        row(
            "symmetric_projection",
            &proj.marginal.to_matrix(),
            proj_gap,
            proj.probability,
        ),
    ];
    emit(&rows, format)
}
