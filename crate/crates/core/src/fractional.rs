//! The multilinear fractional kernel K_alpha, the integral operator
//! I_alpha, the commutator [b, I_alpha]_j, and direct verification of the
//! kernel-derivative and decay estimates used to bound them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atoms::{Atom, AtomicSum, Flavor};
use crate::error::{Error, Result};
use crate::exponent::{holder_scale, ExponentField};
use crate::geometry::{region_ea, GridFunction, GridSpec};
use crate::norms::{bmo_norm, luxemburg_norm};
use crate::report::{InequalityReport, Thresholds, TrialRow};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KernelParams {
    /// Multilinearity degree.
    pub m: usize,
    /// Ambient dimension.
    pub n: usize,
    /// Smoothing order, in (0, mn).
    pub alpha: f64,
}

impl KernelParams {
    pub fn validate(&self) -> Result<()> {
        assert!(self.m >= 1 && self.n >= 1);
        let upper = (self.m * self.n) as f64;
        if !(self.alpha > 0.0 && self.alpha < upper) {
            return Err(Error::AlphaOutOfRange {
                alpha: self.alpha,
                upper,
            });
        }
        Ok(())
    }
}

/// The two kernel normalizations appearing in the source formulas:
/// the Euclidean norm of the stacked vector for I_alpha, the sum of the
/// per-slot distances for the commutator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelForm {
    Euclidean,
    SumOfDistances,
}

/// Configuration for the decay estimate: the near/far index split A, the
/// moment degree d it exploits, and the Q* dilation factor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayCheckConfig {
    /// 0-based indices of the "far" cubes (x outside their stars).
    pub a: Vec<usize>,
    pub d: i64,
    pub kappa: f64,
}

impl DecayCheckConfig {
    /// theta = (n + (d+1)/|A|) / n.
    pub fn theta(&self, n: usize) -> f64 {
        (n as f64 + (self.d + 1) as f64 / self.a.len() as f64) / n as f64
    }
}

/// K_alpha(y_1, ..., y_m) = |(y_1, ..., y_m)|^{alpha - mn}.
pub fn kernel(yvec: &[Vec<f64>], params: &KernelParams) -> Result<f64> {
    params.validate()?;
    assert_eq!(yvec.len(), params.m);
    let norm2: f64 = yvec
        .iter()
        .flat_map(|y| y.iter())
        .map(|v| v * v)
        .sum();
    if norm2 == 0.0 {
        return Err(Error::KernelSingularity);
    }
    let exponent = params.alpha - (params.m * params.n) as f64;
    Ok(norm2.sqrt().powf(exponent))
}

struct Support {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    h: f64,
    cell_volume: f64,
}

fn support_of(f: &GridFunction) -> Support {
    let mut points = Vec::new();
    let mut values = Vec::new();
    for (i, x) in f.spec.midpoints() {
        if f.values[i] != 0.0 {
            points.push(x);
            values.push(f.values[i]);
        }
    }
    Support {
        points,
        values,
        h: f.spec.h,
        cell_volume: f.spec.cell_volume(),
    }
}

/// Depth of local quadrature refinement near the singularity.
const REFINE_DEPTH: usize = 2;
/// Per-axis split factor of one refinement level.
const REFINE_SPLIT: usize = 4;

fn kernel_of_dist(measure: f64, form: KernelForm, exponent: f64) -> f64 {
    let dist = match form {
        KernelForm::Euclidean => measure.sqrt(),
        KernelForm::SumOfDistances => measure,
    };
    if dist > 0.0 {
        dist.powf(exponent)
    } else {
        0.0
    }
}

/// Average kernel value over a product cell given per-slot centers and cell
/// sizes, subdividing recursively while every slot is close to x. Sub-cells
/// still singular when the depth runs out contribute zero (the skip policy
/// applied at the finest level).
fn kernel_avg(
    x: &[f64],
    centers: &mut [Vec<f64>],
    hs: &[f64],
    form: KernelForm,
    exponent: f64,
    depth: usize,
) -> f64 {
    let mut measure = 0.0f64;
    let mut near = true;
    let mut singular = true;
    for (slot, c) in centers.iter().enumerate() {
        let mut sup = 0.0f64;
        let mut r2 = 0.0f64;
        for (xi, yi) in x.iter().zip(c) {
            let d = xi - yi;
            sup = sup.max(d.abs());
            r2 += d * d;
        }
        if sup >= hs[slot] / 2.0 {
            singular = false;
        }
        if sup >= 1.5 * hs[slot] {
            near = false;
        }
        match form {
            KernelForm::Euclidean => measure += r2,
            KernelForm::SumOfDistances => measure += r2.sqrt(),
        }
    }
    if depth == 0 || !near {
        if singular {
            return 0.0;
        }
        return kernel_of_dist(measure, form, exponent);
    }
    // subdivide every slot; average over the sub-cell product
    let n = x.len();
    let m = centers.len();
    let sub_hs: Vec<f64> = hs.iter().map(|h| h / REFINE_SPLIT as f64).collect();
    let axes = m * n;
    let mut offsets = vec![0usize; axes];
    let mut acc = 0.0;
    let mut count = 0usize;
    let saved: Vec<Vec<f64>> = centers.to_vec();
    'sub: loop {
        for slot in 0..m {
            for axis in 0..n {
                let k = offsets[slot * n + axis] as f64;
                centers[slot][axis] = saved[slot][axis]
                    + (k + 0.5 - REFINE_SPLIT as f64 / 2.0) * sub_hs[slot];
            }
        }
        acc += kernel_avg(x, centers, &sub_hs, form, exponent, depth - 1);
        count += 1;
        let mut a = 0;
        loop {
            if a == axes {
                break 'sub;
            }
            offsets[a] += 1;
            if offsets[a] < REFINE_SPLIT {
                break;
            }
            offsets[a] = 0;
            a += 1;
        }
    }
    for (slot, c) in centers.iter_mut().enumerate() {
        c.copy_from_slice(&saved[slot]);
    }
    acc / count as f64
}

/// Tensor midpoint-rule sum of the m-fold integral at one point x. The
/// product cell containing the singularity (all slots within h/2 of x in
/// sup norm) is skipped; cells adjacent to it get a locally refined kernel
/// average so the skip bias shrinks with the refinement depth. `weight`
/// multiplies the chosen slot's factor, evaluated at cell midpoints.
fn eval_at(
    supports: &[Support],
    params: &KernelParams,
    form: KernelForm,
    x: &[f64],
    weight: Option<(usize, &dyn Fn(&[f64]) -> f64)>,
) -> f64 {
    let m = params.m;
    let exponent = params.alpha - (params.m * params.n) as f64;
    let volume: f64 = supports.iter().map(|s| s.cell_volume).product();
    let hs: Vec<f64> = supports.iter().map(|s| s.h).collect();
    let mut idx = vec![0usize; m];
    let mut centers: Vec<Vec<f64>> = vec![vec![0.0; x.len()]; m];
    let mut acc = 0.0;
    'outer: loop {
        let mut prod = 1.0;
        let mut all_singular = true;
        for (slot, s) in supports.iter().enumerate() {
            let y = &s.points[idx[slot]];
            prod *= s.values[idx[slot]];
            if let Some((wj, wf)) = weight {
                if wj == slot {
                    prod *= wf(y);
                }
            }
            let mut sup = 0.0f64;
            for (xi, yi) in x.iter().zip(y) {
                sup = sup.max((xi - yi).abs());
            }
            if sup >= s.h / 2.0 {
                all_singular = false;
            }
            centers[slot].copy_from_slice(y);
        }
        if !all_singular && prod != 0.0 {
            acc += prod * kernel_avg(x, &mut centers, &hs, form, exponent, REFINE_DEPTH);
        }
        // advance the product-grid index
        let mut slot = 0;
        loop {
            if slot == m {
                break 'outer;
            }
            idx[slot] += 1;
            if idx[slot] < supports[slot].points.len() {
                break;
            }
            idx[slot] = 0;
            slot += 1;
        }
    }
    acc * volume
}

fn check_inputs(fs: &[GridFunction], params: &KernelParams) -> Result<()> {
    params.validate()?;
    if fs.len() != params.m {
        return Err(Error::GridMismatch(format!(
            "expected {} input functions, got {}",
            params.m,
            fs.len()
        )));
    }
    for f in fs {
        if f.spec.dim() != params.n {
            return Err(Error::GridMismatch(
                "input dimension differs from kernel dimension".into(),
            ));
        }
    }
    Ok(())
}

/// I_alpha with a chosen kernel normalization, evaluated on a grid.
pub fn apply_ialpha_form(
    fs: &[GridFunction],
    params: &KernelParams,
    form: KernelForm,
    xs: &GridSpec,
) -> Result<GridFunction> {
    check_inputs(fs, params)?;
    let supports: Vec<Support> = fs.iter().map(support_of).collect();
    if supports.iter().any(|s| s.points.is_empty()) {
        return Ok(GridFunction::zeros(xs.clone()));
    }
    let values: Vec<f64> = (0..xs.len())
        .into_par_iter()
        .map(|i| eval_at(&supports, params, form, &xs.midpoint(i), None))
        .collect();
    Ok(GridFunction {
        spec: xs.clone(),
        values,
    })
}

/// The multilinear fractional integral with the Euclidean kernel.
pub fn apply_ialpha(
    fs: &[GridFunction],
    params: &KernelParams,
    xs: &GridSpec,
) -> Result<GridFunction> {
    apply_ialpha_form(fs, params, KernelForm::Euclidean, xs)
}

/// The commutator [b, I_alpha]_j with the literal sum-of-distances kernel;
/// j is the 1-based slot index.
pub fn apply_commutator(
    b: &GridFunction,
    fs: &[GridFunction],
    j: usize,
    params: &KernelParams,
    xs: &GridSpec,
) -> Result<GridFunction> {
    check_inputs(fs, params)?;
    if j < 1 || j > params.m {
        return Err(Error::SlotOutOfRange { j, m: params.m });
    }
    let supports: Vec<Support> = fs.iter().map(support_of).collect();
    if supports.iter().any(|s| s.points.is_empty()) {
        return Ok(GridFunction::zeros(xs.clone()));
    }
    let values: Vec<f64> = (0..xs.len())
        .into_par_iter()
        .map(|i| {
            let x = xs.midpoint(i);
            let bx = b.eval_nearest(&x);
            let factor = move |y: &[f64]| bx - b.eval_nearest(y);
            eval_at(
                &supports,
                params,
                KernelForm::SumOfDistances,
                &x,
                Some((j - 1, &factor)),
            )
        })
        .collect();
    Ok(GridFunction {
        spec: xs.clone(),
        values,
    })
}

/// Kernel at stacked difference (x - y_1, ..., x - y_m) as a function of
/// the flattened y coordinates.
fn kernel_of_flat_y(x: &[f64], flat_y: &[f64], params: &KernelParams) -> f64 {
    let n = params.n;
    let mut norm2 = 0.0;
    for slot in 0..params.m {
        for axis in 0..n {
            let d = x[axis] - flat_y[slot * n + axis];
            norm2 += d * d;
        }
    }
    norm2.sqrt().powf(params.alpha - (params.m * n) as f64)
}

fn central_fd(
    f: &dyn Fn(&[f64]) -> f64,
    y: &[f64],
    coords: &[usize],
    step: f64,
) -> f64 {
    if coords.is_empty() {
        return f(y);
    }
    let c = coords[0];
    let rest = &coords[1..];
    let mut yp = y.to_vec();
    let mut ym = y.to_vec();
    yp[c] += step;
    ym[c] -= step;
    (central_fd(f, &yp, rest, step) - central_fd(f, &ym, rest, step)) / (2.0 * step)
}

/// Verify the derivative bound |d^beta K_alpha| <= C |(x-y_1,...)|^{-mn +
/// alpha - |beta|} by central finite differences. `beta` is a flattened
/// multi-index over the m*n y-coordinates.
pub fn kernel_derivative_check(
    params: &KernelParams,
    beta: &[usize],
    samples: &[(Vec<f64>, Vec<Vec<f64>>)],
) -> Result<InequalityReport> {
    params.validate()?;
    assert_eq!(beta.len(), params.m * params.n);
    let order: usize = beta.iter().sum();
    assert!(order <= 4, "finite differences support |beta| <= 4");
    let coords: Vec<usize> = beta
        .iter()
        .enumerate()
        .flat_map(|(c, &k)| std::iter::repeat(c).take(k))
        .collect();
    let mut rows = Vec::new();
    let mut skipped = 0usize;
    for (x, ys) in samples {
        let flat_y: Vec<f64> = ys.iter().flat_map(|y| y.iter().copied()).collect();
        let dist = {
            let mut n2 = 0.0;
            for slot in 0..params.m {
                for axis in 0..params.n {
                    let d = x[axis] - flat_y[slot * params.n + axis];
                    n2 += d * d;
                }
            }
            n2.sqrt()
        };
        if dist <= 1e-12 {
            skipped += 1;
            continue;
        }
        let step = 1e-4 * dist;
        let f = |y: &[f64]| kernel_of_flat_y(x, y, params);
        let deriv = central_fd(&f, &flat_y, &coords, step).abs();
        let bound = dist.powf(params.alpha - (params.m * params.n) as f64 - order as f64);
        rows.push(TrialRow::new(deriv, bound, deriv / bound).with_context(0, dist, order));
    }
    let mut report = InequalityReport::assemble(
        "kernel_derivative",
        serde_json::json!({ "m": params.m, "n": params.n, "alpha": params.alpha, "beta": beta, "skipped": skipped }),
        rows,
        Vec::new(),
        Thresholds::default(),
    );
    if skipped > 0 {
        report.warning = Some(format!("{skipped} samples skipped at the singularity"));
    }
    Ok(report)
}

/// Decay bound on E_A for a tuple of atoms: LHS = |I_alpha(a_1,...,a_m)(x)|,
/// RHS = the product of per-cube decay factors; for b-weighted atoms the
/// factors carry the 1/||chi_Q|| weights and the exponent fields must be
/// supplied.
pub fn decay_bound_check(
    atoms: &[Atom],
    cfg: &DecayCheckConfig,
    params: &KernelParams,
    xs: &[Vec<f64>],
    ps: Option<&[ExponentField]>,
) -> Result<InequalityReport> {
    params.validate()?;
    assert_eq!(atoms.len(), params.m);
    assert!(
        atoms.iter().all(|a| a.degree >= cfg.d),
        "atom degrees must cover the configured d"
    );
    let weighted = atoms[0].flavor == Flavor::BWeighted;
    if weighted {
        assert!(
            ps.map(|p| p.len() == params.m).unwrap_or(false),
            "b-weighted decay check needs one exponent field per slot"
        );
    }
    let cubes: Vec<_> = atoms.iter().map(|a| a.cube.clone()).collect();
    let region = region_ea(&cubes, &cfg.a, cfg.kappa)?;
    for x in xs {
        if let Some(idx) = region.violated_cube(x) {
            return Err(Error::OutsideRegion {
                point: x.clone(),
                cube: idx,
            });
        }
    }
    let supports: Vec<Support> = atoms.iter().map(|a| support_of(&a.values)).collect();
    let n = params.n as f64;
    let a_len = cfg.a.len() as f64;
    let chi_norms: Vec<f64> = if weighted {
        let ps = ps.unwrap();
        atoms
            .iter()
            .zip(ps)
            .map(|(a, p)| {
                let chi = GridFunction::indicator(a.values.spec.clone(), &a.cube);
                luxemburg_norm(&chi, p)
            })
            .collect()
    } else {
        vec![1.0; params.m]
    };
    let rows: Vec<TrialRow> = xs
        .par_iter()
        .map(|x| {
            let lhs = eval_at(&supports, params, KernelForm::Euclidean, x, None).abs();
            let mut rhs = 1.0;
            for (i, atom) in atoms.iter().enumerate() {
                let far = cfg.a.contains(&i);
                let l = atom.cube.side;
                let vol = l.powf(n);
                let dist: f64 = x
                    .iter()
                    .zip(&atom.cube.center)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                let mut power = n + (cfg.d + 1) as f64 / a_len;
                if far {
                    power -= params.alpha / a_len;
                }
                rhs *= vol.powf(1.0 + (cfg.d + 1) as f64 / (n * a_len))
                    / (chi_norms[i] * (dist + l).powf(power));
            }
            TrialRow::new(lhs, rhs, lhs / rhs).with_context(0, atoms[0].cube.side, xs.len())
        })
        .collect();
    Ok(InequalityReport::assemble(
        if weighted { "decay_bound_weighted" } else { "decay_bound" },
        serde_json::json!({ "a": cfg.a, "d": cfg.d, "kappa": cfg.kappa, "alpha": params.alpha }),
        rows,
        Vec::new(),
        Thresholds::default(),
    ))
}

/// The main boundedness ratio: Luxemburg norm of the operator output under
/// the Hölder-scaled exponent, against the product of atomic sequence
/// norms (times the BMO norm of b in the commutator case).
pub fn theorem_ratio(
    sums: &[AtomicSum],
    ps: &[ExponentField],
    params: &KernelParams,
    commutator: Option<(&GridFunction, usize)>,
    xs: &GridSpec,
) -> Result<InequalityReport> {
    params.validate()?;
    if params.alpha >= params.n as f64 {
        return Err(Error::AlphaOutOfRange {
            alpha: params.alpha,
            upper: params.n as f64,
        });
    }
    assert_eq!(sums.len(), params.m);
    assert_eq!(ps.len(), params.m);
    let refs: Vec<&ExponentField> = ps.iter().collect();
    let q = holder_scale(&refs, params.alpha, params.n)?;
    let name = if commutator.is_some() {
        "commutator_theorem"
    } else {
        "theorem"
    };
    let config = serde_json::json!({ "m": params.m, "alpha": params.alpha });
    if sums.iter().all(|s| s.terms.is_empty()) {
        return Ok(InequalityReport::single(
            name,
            config,
            TrialRow::new(0.0, 0.0, 0.0).with_note("all sums empty"),
        ));
    }
    // Inputs live on the atoms' own grid; xs is only the evaluation grid.
    let atom_spec = sums
        .iter()
        .find_map(|s| s.terms.first().map(|(_, a)| a.values.spec.clone()))
        .unwrap_or_else(|| xs.clone());
    let fs: Vec<GridFunction> = sums
        .iter()
        .map(|s| crate::atoms::assemble(s, &atom_spec))
        .collect::<Result<_>>()?;
    let out = match commutator {
        Some((b, j)) => apply_commutator(b, &fs, j, params, xs)?,
        None => apply_ialpha(&fs, params, xs)?,
    };
    let lhs = luxemburg_norm(&out, &q);
    let mut rhs = 1.0;
    for (sum, p) in sums.iter().zip(ps) {
        let normalized = sum
            .terms
            .first()
            .map(|(_, a)| a.flavor == Flavor::BWeighted)
            .unwrap_or(false);
        rhs *= crate::atoms::sequence_norm(sum, p, p.p_minus(), normalized);
    }
    if let Some((b, _)) = commutator {
        rhs *= bmo_norm(b, None)?;
    }
    let scale = fs.iter().map(|f| f.sup_abs()).fold(1.0, f64::max);
    let row = if rhs == 0.0 {
        if lhs > 1e-12 * scale {
            return Err(Error::DegenerateNormProxy);
        }
        TrialRow::new(lhs, rhs, 0.0).with_note("0/0 reported as 0")
    } else {
        TrialRow::new(lhs, rhs, lhs / rhs)
    };
    Ok(InequalityReport::single(name, config, row))
}
