//! Scenario execution: seeded sweeps over the library's inequality checks,
//! assembled into reports with pinned stability thresholds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atoms::{
    certificate_passes, make_atom, make_b_atom, Atom, AtomicSum, MOMENT_TOL,
};
use crate::error::Result;
use crate::exponent::{ExponentField, DEFAULT_LH_THRESHOLD};
use crate::fractional::{
    apply_commutator, apply_ialpha, decay_bound_check, kernel_derivative_check,
    theorem_ratio, DecayCheckConfig, KernelParams,
};
use crate::geometry::{
    default_star_factor, random_grid_function, region_ea, Cube, GridFunction, GridSpec,
};
use crate::maximal::{claim_check, vector_fs_check, MaximalConfig};
use crate::norms::{
    duality_lower_bound, generalized_holder_check, holder_pair_check, luxemburg_norm,
    modular, r_p,
};
use crate::report::{InequalityReport, Thresholds, TrialRow};

use super::scenario::{Check, Scenario};

fn spec_1d(cells: usize, lo: f64, hi: f64) -> GridSpec {
    GridSpec::new(vec![lo], vec![cells], (hi - lo) / cells as f64)
}

/// p(x) = base + amp sin(freq x) on [lo, hi], constant `base` at infinity.
fn sine_field(lo: f64, hi: f64, base: f64, amp: f64, freq: f64) -> ExponentField {
    ExponentField::from_fn(
        vec![lo],
        vec![hi],
        vec![257],
        |x| base + amp * (freq * x[0]).sin(),
        base,
    )
}

/// Scenario seeds can be overridden through the environment for fuzzing.
fn effective_seed(seed: u64) -> u64 {
    std::env::var("VAREXP_SEED")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(seed)
}

/// Encode a two-sided "value equals expect" condition as a one-sided ratio:
/// 1 + relative error, judged against max_ratio = 1 + tol.
fn closeness_ratio(value: f64, expect: f64) -> f64 {
    if expect == 0.0 {
        1.0 + value.abs()
    } else {
        1.0 + (value - expect).abs() / expect.abs()
    }
}

/// Execute a scenario. Trial-level failures are recorded in the report's
/// error list and never abort the remaining trials.
pub fn run(scenario: &Scenario) -> InequalityReport {
    let name = scenario.name.clone();
    match &scenario.check {
        Check::LuxemburgConsistency {
            trials,
            exponents,
            cells,
            seed,
        } => luxemburg_consistency(&name, *trials, exponents, *cells, effective_seed(*seed)),
        Check::UnitBall { trials, cells, seed } => {
            unit_ball(&name, *trials, *cells, effective_seed(*seed))
        }
        Check::Holder {
            trials,
            variable_p,
            cells,
            seed,
        } => holder(&name, *trials, *variable_p, *cells, effective_seed(*seed)),
        Check::Duality {
            trials,
            variable_p,
            cells,
            seed,
        } => duality(&name, *trials, *variable_p, *cells, effective_seed(*seed)),
        Check::GeneralizedHolder {
            trials,
            m,
            resolutions,
            seed,
        } => generalized_holder(&name, *trials, *m, resolutions, effective_seed(*seed)),
        Check::FeffermanStein {
            families,
            family_size,
            lq,
            alphas,
            resolutions,
            seed,
        } => fefferman_stein(
            &name,
            *families,
            *family_size,
            *lq,
            alphas,
            resolutions,
            effective_seed(*seed),
        ),
        Check::Claim {
            trials,
            alpha,
            r_factors,
            cells,
            seed,
        } => claim(&name, *trials, *alpha, r_factors, *cells, effective_seed(*seed)),
        Check::KernelDerivative {
            m,
            n,
            alpha,
            beta,
            samples,
            dilations,
            expect,
            seed,
        } => kernel_derivative(
            &name,
            *m,
            *n,
            *alpha,
            beta,
            *samples,
            dilations,
            *expect,
            effective_seed(*seed),
        ),
        Check::Decay {
            m,
            alpha,
            d_values,
            weighted,
            trials,
            dilations,
            cells,
            seed,
        } => decay(
            &name,
            *m,
            *alpha,
            d_values,
            *weighted,
            *trials,
            dilations,
            *cells,
            effective_seed(*seed),
        ),
        Check::Theorem {
            m,
            alpha,
            sine_p,
            trials,
            scales,
            translations,
            cells,
            seed,
        } => theorem(
            &name,
            *m,
            *alpha,
            *sine_p,
            *trials,
            scales,
            translations,
            *cells,
            effective_seed(*seed),
            false,
        ),
        Check::CommutatorTheorem {
            m,
            alpha,
            sine_p,
            trials,
            scales,
            translations,
            cells,
            seed,
        } => theorem(
            &name,
            *m,
            *alpha,
            *sine_p,
            *trials,
            scales,
            translations,
            *cells,
            effective_seed(*seed),
            true,
        ),
        Check::LhValidate {
            jump,
            resolutions,
            threshold_scale,
        } => lh_validate(&name, *jump, resolutions, *threshold_scale),
        Check::AtomCertificates {
            count,
            d_values,
            weighted,
            seed,
        } => atom_certificates(&name, *count, d_values, *weighted, effective_seed(*seed)),
        Check::RieszOracle {} => riesz_oracle(&name),
    }
}

fn luxemburg_consistency(
    name: &str,
    trials: usize,
    exponents: &[f64],
    cells: usize,
    seed: u64,
) -> InequalityReport {
    let spec = spec_1d(cells, -1.0, 1.0);
    let mut rows = Vec::new();
    for t in 0..trials {
        let f = random_grid_function(spec.clone(), seed.wrapping_add(t as u64));
        for &pv in exponents {
            let p = ExponentField::constant(vec![-1.0], vec![1.0], pv);
            let lhs = luxemburg_norm(&f, &p);
            let rhs = (f
                .values
                .iter()
                .map(|v| v.abs().powf(pv))
                .sum::<f64>()
                * spec.h)
                .powf(1.0 / pv);
            rows.push(
                TrialRow::new(lhs, rhs, closeness_ratio(lhs, rhs))
                    .with_context(t as u64, pv, cells),
            );
        }
    }
    InequalityReport::assemble(
        name,
        serde_json::json!({ "trials": trials, "exponents": exponents, "seed": seed }),
        rows,
        Vec::new(),
        Thresholds {
            max_ratio: Some(1.0 + 1e-6),
            max_drift: None,
        },
    )
}

fn unit_ball(name: &str, trials: usize, cells: usize, seed: u64) -> InequalityReport {
    let spec = spec_1d(cells, -1.0, 1.0);
    let p = sine_field(-1.0, 1.0, 2.0, 1.0, 1.0);
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for t in 0..trials {
        let f = random_grid_function(spec.clone(), seed.wrapping_add(t as u64));
        let norm = luxemburg_norm(&f, &p);
        if norm == 0.0 {
            errors.push(format!("trial {t}: zero function"));
            continue;
        }
        let m = modular(&f.scale(1.0 / norm), &p).value;
        rows.push(TrialRow::new(m, 1.0, closeness_ratio(m, 1.0)).with_context(t as u64, 1.0, cells));
    }
    InequalityReport::assemble(
        name,
        serde_json::json!({ "trials": trials, "p": "2 + sin x", "seed": seed }),
        rows,
        errors,
        Thresholds {
            max_ratio: Some(1.0 + 1e-4),
            max_drift: None,
        },
    )
}

fn holder(
    name: &str,
    trials: usize,
    variable_p: bool,
    cells: usize,
    seed: u64,
) -> InequalityReport {
    let spec = spec_1d(cells, -1.0, 1.0);
    let p = if variable_p {
        sine_field(-1.0, 1.0, 2.0, 0.5, 3.0)
    } else {
        ExponentField::constant(vec![-1.0], vec![1.0], 2.0)
    };
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for t in 0..trials {
        let f = random_grid_function(spec.clone(), seed.wrapping_add(2 * t as u64));
        let g = random_grid_function(spec.clone(), seed.wrapping_add(2 * t as u64 + 1));
        match holder_pair_check(&f, &g, &p) {
            Ok(rep) => {
                let row = rep.rows[0].clone().with_context(t as u64, 1.0, cells);
                rows.push(row);
            }
            Err(e) => errors.push(format!("trial {t}: {e}")),
        }
    }
    InequalityReport::assemble(
        name,
        serde_json::json!({ "trials": trials, "variable_p": variable_p, "seed": seed }),
        rows,
        errors,
        Thresholds {
            max_ratio: Some(1.0 + 1e-6),
            max_drift: None,
        },
    )
}

fn duality(
    name: &str,
    trials: usize,
    variable_p: bool,
    cells: usize,
    seed: u64,
) -> InequalityReport {
    let spec = spec_1d(cells, -1.0, 1.0);
    let p = if variable_p {
        sine_field(-1.0, 1.0, 2.0, 0.5, 3.0)
    } else {
        ExponentField::constant(vec![-1.0], vec![1.0], 2.0)
    };
    let rp = r_p(&p);
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for t in 0..trials {
        let f = random_grid_function(spec.clone(), seed.wrapping_add(t as u64));
        let norm = luxemburg_norm(&f, &p);
        match duality_lower_bound(&f, &p, 8, seed.wrapping_add(1000 + t as u64)) {
            Ok(rep) => {
                let sup = rep.rows[0].lhs;
                if sup < norm - 1e-3 {
                    errors.push(format!("trial {t}: sup {sup} below norm {norm} - 1e-3"));
                }
                if sup > rp * norm + 1e-6 {
                    errors.push(format!("trial {t}: sup {sup} above r_p bound {}", rp * norm));
                }
                rows.push(
                    TrialRow::new(sup, norm, if norm > 0.0 { sup / norm } else { 0.0 })
                        .with_context(t as u64, 1.0, cells),
                );
            }
            Err(e) => errors.push(format!("trial {t}: {e}")),
        }
    }
    InequalityReport::assemble(
        name,
        serde_json::json!({ "trials": trials, "variable_p": variable_p, "r_p": rp, "seed": seed }),
        rows,
        errors,
        Thresholds {
            max_ratio: Some(rp + 1e-6),
            max_drift: None,
        },
    )
}

fn generalized_holder(
    name: &str,
    trials: usize,
    m: usize,
    resolutions: &[usize],
    seed: u64,
) -> InequalityReport {
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let pvals: Vec<f64> = (0..m).map(|_| rng.gen_range(1.5..3.0)).collect();
        for &cells in resolutions {
            let spec = spec_1d(cells, -1.0, 1.0);
            let fs: Vec<GridFunction> = (0..m)
                .map(|i| {
                    random_grid_function(
                        spec.clone(),
                        seed.wrapping_add((t * m + i) as u64),
                    )
                })
                .collect();
            let ps: Vec<ExponentField> = pvals
                .iter()
                .map(|&v| ExponentField::constant(vec![-1.0], vec![1.0], v))
                .collect();
            let frefs: Vec<&GridFunction> = fs.iter().collect();
            let prefs: Vec<&ExponentField> = ps.iter().collect();
            match generalized_holder_check(&frefs, &prefs) {
                Ok(rep) => rows.push(
                    rep.rows[0]
                        .clone()
                        .with_context(t as u64, 1.0, cells),
                ),
                Err(e) => errors.push(format!("trial {t} cells {cells}: {e}")),
            }
        }
    }
    InequalityReport::assemble(
        name,
        serde_json::json!({ "trials": trials, "m": m, "resolutions": resolutions, "seed": seed }),
        rows,
        errors,
        Thresholds {
            max_ratio: None,
            max_drift: Some(2.0),
        },
    )
}

fn fefferman_stein(
    name: &str,
    families: usize,
    family_size: usize,
    lq: f64,
    alphas: &[f64],
    resolutions: &[usize],
    seed: u64,
) -> InequalityReport {
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let p = ExponentField::constant(vec![-1.0], vec![1.0], 2.0);
    for fam in 0..families {
        for &alpha in alphas {
            for &cells in resolutions {
                let spec = spec_1d(cells, -1.0, 1.0);
                let fs: Vec<GridFunction> = (0..family_size)
                    .map(|i| {
                        random_grid_function(
                            spec.clone(),
                            seed.wrapping_add((fam * family_size + i) as u64),
                        )
                    })
                    .collect();
                let cfg = MaximalConfig::dyadic(alpha, &spec);
                match vector_fs_check(&fs, &p, alpha, lq, &cfg) {
                    Ok(rep) => rows.push(
                        rep.rows[0]
                            .clone()
                            .with_context(fam as u64, alpha, cells),
                    ),
                    Err(e) => errors.push(format!("family {fam} alpha {alpha}: {e}")),
                }
            }
        }
    }
    InequalityReport::assemble(
        name,
        serde_json::json!({
            "families": families, "family_size": family_size, "lq": lq,
            "alphas": alphas, "resolutions": resolutions, "seed": seed
        }),
        rows,
        errors,
        Thresholds {
            max_ratio: None,
            max_drift: Some(2.0),
        },
    )
}

fn claim(
    name: &str,
    trials: usize,
    alpha: f64,
    r_factors: &[f64],
    cells: usize,
    seed: u64,
) -> InequalityReport {
    let spec = spec_1d(cells, -8.0, 8.0);
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let y = rng.gen_range(-1.0..1.0);
        let r = rng.gen_range(0.1..0.5);
        for &factor in r_factors {
            match claim_check(&[y], r * factor, alpha, &spec) {
                Ok(rep) => {
                    let row = rep.rows[0].clone().with_context(t as u64, factor, cells);
                    if !row.ratio.is_finite() {
                        errors.push(format!("trial {t} factor {factor}: nonfinite ratio"));
                    }
                    rows.push(row);
                }
                Err(e) => errors.push(format!("trial {t} factor {factor}: {e}")),
            }
        }
    }
    InequalityReport::assemble(
        name,
        serde_json::json!({ "trials": trials, "alpha": alpha, "r_factors": r_factors, "seed": seed }),
        rows,
        errors,
        Thresholds {
            max_ratio: None,
            max_drift: Some(1.5),
        },
    )
}

#[allow(clippy::too_many_arguments)]
fn kernel_derivative(
    name: &str,
    m: usize,
    n: usize,
    alpha: f64,
    beta: &[usize],
    samples: usize,
    dilations: &[f64],
    expect: Option<f64>,
    seed: u64,
) -> InequalityReport {
    let params = KernelParams { m, n, alpha };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: Vec<(Vec<f64>, Vec<Vec<f64>>)> = (0..samples)
        .map(|_| {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let ys: Vec<Vec<f64>> = (0..m)
                .map(|_| {
                    x.iter()
                        .map(|&xi| {
                            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                            xi + sign * rng.gen_range(0.2..2.0)
                        })
                        .collect()
                })
                .collect();
            (x, ys)
        })
        .collect();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for &t in dilations {
        let scaled: Vec<(Vec<f64>, Vec<Vec<f64>>)> = base
            .iter()
            .map(|(x, ys)| {
                (
                    x.iter().map(|v| t * v).collect(),
                    ys.iter()
                        .map(|y| y.iter().map(|v| t * v).collect())
                        .collect(),
                )
            })
            .collect();
        match kernel_derivative_check(&params, beta, &scaled) {
            Ok(rep) => {
                if let Some(e) = expect {
                    // per-sample exactness against the closed form
                    for r in &rep.rows {
                        rows.push(
                            TrialRow::new(r.ratio, e, closeness_ratio(r.ratio, e))
                                .with_context(0, t, samples),
                        );
                    }
                } else {
                    rows.push(
                        TrialRow::new(
                            rep.aggregate.max_ratio,
                            1.0,
                            rep.aggregate.max_ratio,
                        )
                        .with_context(0, t, samples),
                    );
                }
            }
            Err(e) => errors.push(format!("dilation {t}: {e}")),
        }
    }
    let thresholds = if expect.is_some() {
        Thresholds {
            max_ratio: Some(1.0 + 1e-6),
            max_drift: None,
        }
    } else {
        Thresholds {
            max_ratio: None,
            max_drift: Some(1.2),
        }
    };
    InequalityReport::assemble(
        name,
        serde_json::json!({
            "m": m, "n": n, "alpha": alpha, "beta": beta,
            "samples": samples, "dilations": dilations, "expect": expect, "seed": seed
        }),
        rows,
        errors,
        thresholds,
    )
}

/// Random cubes near the origin plus evaluation points in E_A for A = all
/// slots, at a given joint dilation.
fn decay_geometry(
    rng: &mut ChaCha8Rng,
    m: usize,
) -> (Vec<(f64, f64)>, Vec<f64>) {
    let cubes: Vec<(f64, f64)> = (0..m)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.5..1.0)))
        .collect();
    let xs: Vec<f64> = (0..3)
        .map(|_| {
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            sign * rng.gen_range(4.0..7.0)
        })
        .collect();
    (cubes, xs)
}

#[allow(clippy::too_many_arguments)]
fn decay(
    name: &str,
    m: usize,
    alpha: f64,
    d_values: &[i64],
    weighted: bool,
    trials: usize,
    dilations: &[f64],
    cells: usize,
    seed: u64,
) -> InequalityReport {
    let kappa = default_star_factor(1);
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for t in 0..trials {
        let d = d_values[t % d_values.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let (geom, xs_base) = decay_geometry(&mut rng, m);
        for &scale in dilations {
            let spec = spec_1d(cells, -8.0 * scale, 8.0 * scale);
            let cubes: Vec<Cube> = geom
                .iter()
                .map(|&(c, s)| Cube::new(vec![c * scale], s * scale))
                .collect();
            let a_set: Vec<usize> = (0..m).collect();
            let region = match region_ea(&cubes, &a_set, kappa) {
                Ok(r) => r,
                Err(e) => {
                    errors.push(format!("trial {t} scale {scale}: {e}"));
                    continue;
                }
            };
            let xs: Vec<Vec<f64>> = xs_base
                .iter()
                .map(|&x| vec![x * scale])
                .filter(|x| region.contains(x))
                .collect();
            if xs.is_empty() {
                errors.push(format!("trial {t} scale {scale}: no points in E_A"));
                continue;
            }
            let p_fields: Vec<ExponentField> = (0..m)
                .map(|_| {
                    ExponentField::constant(vec![-8.0 * scale], vec![8.0 * scale], 2.0)
                })
                .collect();
            let atoms: Result<Vec<Atom>> = cubes
                .iter()
                .enumerate()
                .map(|(i, q)| {
                    if weighted {
                        // b dilates jointly with the geometry, so the
                        // empirical constant is scale-comparable.
                        let b = GridFunction::from_fn(spec.clone(), |x| (x[0] / scale).sin());
                        make_b_atom(&spec, q, d, &b, &p_fields[i], seed.wrapping_add((t * m + i) as u64))
                    } else {
                        make_atom(&spec, q, d, seed.wrapping_add((t * m + i) as u64))
                    }
                })
                .collect();
            let atoms = match atoms {
                Ok(a) => a,
                Err(e) => {
                    errors.push(format!("trial {t} scale {scale}: {e}"));
                    continue;
                }
            };
            let cfg = DecayCheckConfig {
                a: a_set,
                d,
                kappa,
            };
            let params = KernelParams { m, n: 1, alpha };
            let ps_opt = if weighted { Some(&p_fields[..]) } else { None };
            match decay_bound_check(&atoms, &cfg, &params, &xs, ps_opt) {
                Ok(rep) => rows.push(
                    TrialRow::new(rep.aggregate.max_ratio, 1.0, rep.aggregate.max_ratio)
                        .with_context(t as u64, scale, cells),
                ),
                Err(e) => errors.push(format!("trial {t} scale {scale}: {e}")),
            }
        }
    }
    InequalityReport::assemble(
        name,
        serde_json::json!({
            "m": m, "alpha": alpha, "d_values": d_values, "weighted": weighted,
            "trials": trials, "dilations": dilations, "seed": seed
        }),
        rows,
        errors,
        Thresholds {
            max_ratio: None,
            max_drift: Some(1.5),
        },
    )
}

#[allow(clippy::too_many_arguments)]
fn theorem(
    name: &str,
    m: usize,
    alpha: f64,
    sine_p: bool,
    trials: usize,
    scales: &[f64],
    translations: &[f64],
    cells: usize,
    seed: u64,
    commutator: bool,
) -> InequalityReport {
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        // two atoms per slot: (center, side, lambda, atom seed)
        let geom: Vec<Vec<(f64, f64, f64, u64)>> = (0..m)
            .map(|_| {
                (0..2)
                    .map(|_| {
                        (
                            rng.gen_range(-1.0..1.0),
                            rng.gen_range(0.5..1.0),
                            rng.gen_range(0.2..1.0),
                            rng.gen::<u64>(),
                        )
                    })
                    .collect()
            })
            .collect();
        for &scale in scales {
            for &shift in translations {
                let lo = -4.0 * scale + shift;
                let hi = 4.0 * scale + shift;
                let spec = spec_1d(cells, lo, hi);
                let ps: Vec<ExponentField> = (0..m)
                    .map(|_| {
                        if sine_p {
                            sine_field(lo, hi, 2.0, 0.5, 1.0)
                        } else {
                            ExponentField::constant(vec![lo], vec![hi], 2.0)
                        }
                    })
                    .collect();
                // b transforms with the scale/translation sweep; at the
                // base configuration it is exactly sin x.
                let b = GridFunction::from_fn(spec.clone(), |x| ((x[0] - shift) / scale).sin());
                let sums: Result<Vec<AtomicSum>> = geom
                    .iter()
                    .zip(&ps)
                    .map(|(slot, p)| {
                        let terms: Result<Vec<(f64, Atom)>> = slot
                            .iter()
                            .map(|&(c, s, lambda, aseed)| {
                                let q = Cube::new(vec![c * scale + shift], s * scale);
                                let atom = if commutator {
                                    make_b_atom(&spec, &q, 0, &b, p, aseed)?
                                } else {
                                    make_atom(&spec, &q, 0, aseed)?
                                };
                                Ok((lambda, atom))
                            })
                            .collect();
                        Ok(AtomicSum::new(terms?))
                    })
                    .collect();
                let sums = match sums {
                    Ok(s) => s,
                    Err(e) => {
                        errors.push(format!("trial {t} scale {scale} shift {shift}: {e}"));
                        continue;
                    }
                };
                let params = KernelParams { m, n: 1, alpha };
                let comm = if commutator { Some((&b, 1)) } else { None };
                let xs = spec_1d(256, lo, hi);
                match theorem_ratio(&sums, &ps, &params, comm, &xs) {
                    Ok(rep) => rows.push(
                        rep.rows[0]
                            .clone()
                            .with_context(t as u64, scale, cells),
                    ),
                    Err(e) => {
                        errors.push(format!("trial {t} scale {scale} shift {shift}: {e}"))
                    }
                }
            }
        }
    }
    // Exact vanishing for constant b: a direct evaluation, not a ratio.
    if commutator {
        let spec = spec_1d(cells, -4.0, 4.0);
        let b = GridFunction::from_fn(spec.clone(), |_| 3.0);
        let f = random_grid_function(spec_1d(cells / 4, -1.0, 1.0), seed);
        let params = KernelParams { m: 1, n: 1, alpha };
        let sup = f.sup_abs();
        match apply_commutator(&b, &[f], 1, &params, &spec_1d(32, -4.0, 4.0)) {
            Ok(out) => {
                let worst = out.sup_abs();
                if worst > 1e-12 * sup {
                    errors.push(format!(
                        "constant-b commutator does not vanish: sup {worst}"
                    ));
                }
                rows.push(
                    TrialRow::new(worst, 1e-12 * sup, 0.0)
                        .with_context(u64::MAX, 1.0, cells)
                        .with_note("constant-b exact vanishing"),
                );
            }
            Err(e) => errors.push(format!("constant-b check: {e}")),
        }
    }
    InequalityReport::assemble(
        name,
        serde_json::json!({
            "m": m, "alpha": alpha, "sine_p": sine_p, "trials": trials,
            "scales": scales, "translations": translations,
            "commutator": commutator, "seed": seed
        }),
        rows,
        errors,
        Thresholds {
            max_ratio: None,
            max_drift: Some(4.0),
        },
    )
}

fn lh_validate(
    name: &str,
    jump: bool,
    resolutions: &[usize],
    threshold_scale: f64,
) -> InequalityReport {
    let threshold = DEFAULT_LH_THRESHOLD * threshold_scale;
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut last: Option<f64> = None;
    for &nodes in resolutions {
        let field = if jump {
            ExponentField::from_fn(
                vec![-1.0],
                vec![1.0],
                vec![nodes],
                |x| if x[0] >= 0.0 { 2.5 } else { 2.0 },
                2.5,
            )
        } else {
            ExponentField::constant(vec![-1.0], vec![1.0], 2.0)
        };
        let rep = field.check_log_holder(threshold);
        rows.push(
            TrialRow::new(rep.c_local, rep.c_decay, rep.c_local)
                .with_context(0, nodes as f64, nodes)
                .with_note(if rep.pass { "classified LH" } else { "rejected" }),
        );
        if jump {
            if let Some(prev) = last {
                if rep.c_local < 1.99 * prev {
                    errors.push(format!(
                        "c_local {} at {nodes} nodes fails to double from {prev}",
                        rep.c_local
                    ));
                }
            }
            last = Some(rep.c_local);
        } else if rep.c_local != 0.0 || rep.c_decay != 0.0 || !rep.pass {
            errors.push(format!(
                "constant field misclassified: c_local {} c_decay {}",
                rep.c_local, rep.c_decay
            ));
        }
    }
    // The finest jump fixture must be rejected by the classifier.
    if jump {
        if let Some(row) = rows.last() {
            if row.note.as_deref() == Some("classified LH") {
                errors.push("divergent fixture passed the classifier".into());
            }
        }
    }
    InequalityReport::assemble(
        name,
        serde_json::json!({ "jump": jump, "resolutions": resolutions, "threshold": threshold }),
        rows,
        errors,
        Thresholds::default(),
    )
}

fn atom_certificates(
    name: &str,
    count: usize,
    d_values: &[i64],
    weighted: bool,
    seed: u64,
) -> InequalityReport {
    let spec = spec_1d(512, -2.0, 2.0);
    let p = sine_field(-2.0, 2.0, 2.0, 0.5, 1.0);
    let b = GridFunction::from_fn(spec.clone(), |x| x[0].sin());
    let b_sup = b.sup_abs();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for t in 0..count {
        let d = d_values[t % d_values.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let q = Cube::new(vec![rng.gen_range(-1.0..1.0)], rng.gen_range(0.5..1.5));
        let atom = if weighted {
            make_b_atom(&spec, &q, d, &b, &p, seed.wrapping_add(t as u64))
        } else {
            make_atom(&spec, &q, d, seed.wrapping_add(t as u64))
        };
        match atom {
            Ok(atom) => {
                let sup = atom.values.sup_abs();
                let vol = atom.cube.side;
                let tol = MOMENT_TOL * sup * vol;
                let worst = atom
                    .certificate
                    .moment_residuals
                    .iter()
                    .cloned()
                    .fold(0.0f64, f64::max);
                let ok = certificate_passes(&atom, if weighted { b_sup } else { 1.0 });
                if !ok {
                    errors.push(format!("atom {t} (d = {d}) fails its certificate"));
                }
                rows.push(
                    TrialRow::new(worst, tol, if tol > 0.0 { worst / tol } else { 0.0 })
                        .with_context(t as u64, d as f64, 512),
                );
            }
            Err(e) => errors.push(format!("atom {t}: {e}")),
        }
    }
    InequalityReport::assemble(
        name,
        serde_json::json!({ "count": count, "d_values": d_values, "weighted": weighted, "seed": seed }),
        rows,
        errors,
        Thresholds {
            max_ratio: Some(1.0),
            max_drift: None,
        },
    )
}

fn riesz_oracle(name: &str) -> InequalityReport {
    let exact = 2.0 * 2.0f64.sqrt();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (cells, tol) in [(2048usize, 0.02f64), (8192, 0.005)] {
        let spec = spec_1d(cells, -2.0, 2.0);
        let f = GridFunction::indicator(spec.clone(), &Cube::new(vec![0.5], 1.0));
        let params = KernelParams { m: 1, n: 1, alpha: 0.5 };
        let xs = GridSpec::new(vec![0.5 - spec.h / 2.0], vec![1], spec.h);
        match apply_ialpha(&[f], &params, &xs) {
            Ok(out) => {
                let v = out.values[0];
                let rel = (v - exact).abs() / exact;
                if rel > tol {
                    errors.push(format!(
                        "h = 1/{}: value {v} misses 2*sqrt(2) by {rel:.4} > {tol}",
                        cells / 4
                    ));
                }
                rows.push(
                    TrialRow::new(v, exact, closeness_ratio(v, exact))
                        .with_context(0, spec.h, cells),
                );
            }
            Err(e) => errors.push(format!("cells {cells}: {e}")),
        }
    }
    InequalityReport::assemble(
        name,
        serde_json::json!({ "exact": exact }),
        rows,
        errors,
        Thresholds {
            max_ratio: Some(1.02),
            max_drift: None,
        },
    )
}

/// The built-in acceptance scenarios, with thresholds pinned in the runner.
pub fn builtin_suite() -> Vec<Scenario> {
    vec![
        Scenario {
            name: "c01-luxemburg-consistency".into(),
            check: Check::LuxemburgConsistency {
                trials: 200,
                exponents: vec![1.5, 2.0, 3.0],
                cells: 512,
                seed: 1,
            },
        },
        Scenario {
            name: "c02-unit-ball".into(),
            check: Check::UnitBall {
                trials: 200,
                cells: 512,
                seed: 2,
            },
        },
        Scenario {
            name: "c03a-holder-constant".into(),
            check: Check::Holder {
                trials: 500,
                variable_p: false,
                cells: 256,
                seed: 3,
            },
        },
        Scenario {
            name: "c03b-holder-variable".into(),
            check: Check::Holder {
                trials: 500,
                variable_p: true,
                cells: 256,
                seed: 4,
            },
        },
        Scenario {
            name: "c03c-duality".into(),
            check: Check::Duality {
                trials: 100,
                variable_p: true,
                cells: 256,
                seed: 5,
            },
        },
        Scenario {
            name: "c04-generalized-holder".into(),
            check: Check::GeneralizedHolder {
                trials: 500,
                m: 2,
                resolutions: vec![256, 512],
                seed: 6,
            },
        },
        Scenario {
            name: "c05a-atom-certificates-plain".into(),
            check: Check::AtomCertificates {
                count: 100,
                d_values: vec![0, 1, 2],
                weighted: false,
                seed: 7,
            },
        },
        Scenario {
            name: "c05b-atom-certificates-weighted".into(),
            check: Check::AtomCertificates {
                count: 100,
                d_values: vec![0, 1, 2],
                weighted: true,
                seed: 8,
            },
        },
        Scenario {
            name: "c06-riesz-oracle".into(),
            check: Check::RieszOracle {},
        },
        Scenario {
            name: "c07a-kernel-derivative-order0".into(),
            check: Check::KernelDerivative {
                m: 2,
                n: 1,
                alpha: 0.5,
                beta: vec![0, 0],
                samples: 50,
                dilations: vec![1.0],
                expect: Some(1.0),
                seed: 9,
            },
        },
        Scenario {
            name: "c07b-kernel-derivative-order1".into(),
            check: Check::KernelDerivative {
                m: 1,
                n: 1,
                alpha: 0.5,
                beta: vec![1],
                samples: 50,
                dilations: vec![1.0],
                expect: Some(0.5),
                seed: 10,
            },
        },
        Scenario {
            name: "c07c-kernel-derivative-order2".into(),
            check: Check::KernelDerivative {
                m: 2,
                n: 1,
                alpha: 0.5,
                beta: vec![1, 1],
                samples: 200,
                dilations: vec![1.0, 2.0],
                expect: None,
                seed: 11,
            },
        },
        Scenario {
            name: "c08a-decay-plain".into(),
            check: Check::Decay {
                m: 2,
                alpha: 0.5,
                d_values: vec![0, 1],
                weighted: false,
                trials: 100,
                dilations: vec![1.0, 2.0, 4.0],
                cells: 512,
                seed: 12,
            },
        },
        Scenario {
            name: "c08b-decay-weighted".into(),
            check: Check::Decay {
                m: 2,
                alpha: 0.5,
                d_values: vec![0, 1],
                weighted: true,
                trials: 100,
                dilations: vec![1.0, 2.0, 4.0],
                cells: 512,
                seed: 13,
            },
        },
        Scenario {
            name: "c09a-theorem-constant-p".into(),
            check: Check::Theorem {
                m: 2,
                alpha: 0.5,
                sine_p: false,
                trials: 50,
                scales: vec![1.0, 2.0, 4.0],
                translations: vec![0.0, 0.375],
                cells: 512,
                seed: 14,
            },
        },
        Scenario {
            name: "c09b-theorem-sine-p".into(),
            check: Check::Theorem {
                m: 2,
                alpha: 0.5,
                sine_p: true,
                trials: 50,
                scales: vec![1.0, 2.0, 4.0],
                translations: vec![0.0, 0.375],
                cells: 512,
                seed: 15,
            },
        },
        Scenario {
            name: "c10-commutator-theorem".into(),
            check: Check::CommutatorTheorem {
                m: 2,
                alpha: 0.5,
                sine_p: false,
                trials: 50,
                scales: vec![1.0, 2.0, 4.0],
                translations: vec![0.0, 0.375],
                cells: 512,
                seed: 16,
            },
        },
        Scenario {
            name: "c11-fefferman-stein".into(),
            check: Check::FeffermanStein {
                families: 20,
                family_size: 8,
                lq: 2.0,
                alphas: vec![0.0, 0.25],
                resolutions: vec![256, 512],
                seed: 17,
            },
        },
        Scenario {
            name: "c12-claim".into(),
            check: Check::Claim {
                trials: 50,
                alpha: 0.25,
                r_factors: vec![1.0, 2.0, 4.0],
                cells: 512,
                seed: 18,
            },
        },
        Scenario {
            name: "c13a-lh-constant".into(),
            check: Check::LhValidate {
                jump: false,
                resolutions: vec![9, 33, 513],
                threshold_scale: 1.0,
            },
        },
        Scenario {
            name: "c13b-lh-jump".into(),
            check: Check::LhValidate {
                jump: true,
                resolutions: vec![9, 33, 513],
                threshold_scale: 0.02,
            },
        },
    ]
}
