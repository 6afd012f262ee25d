//! Modular and Luxemburg norm computation, Holder/duality checks, and the
//! BMO seminorm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{holder_scale, ExponentField};
use crate::geometry::{random_grid_function, Cube, GridFunction};
use crate::report::{InequalityReport, TrialRow};

/// Relative width at which the Luxemburg bisection stops.
const BISECTION_REL_TOL: f64 = 1e-10;

/// The modular of a grid function: the midpoint-rule value of the integral
/// of |f(x)|^p(x).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ModularValue {
    pub value: f64,
    pub h: f64,
}

/// Exponent values frozen at the midpoints of a grid, so repeated modular
/// evaluations during bisection avoid re-interpolating p.
pub struct CellExponents {
    values: Vec<f64>,
    p_minus: f64,
    p_plus: f64,
}

impl CellExponents {
    pub fn new(p: &ExponentField, f: &GridFunction) -> Self {
        let values: Vec<f64> = (0..f.spec.len())
            .map(|i| p.eval(&f.spec.midpoint(i)))
            .collect();
        CellExponents {
            values,
            p_minus: p.p_minus(),
            p_plus: p.p_plus(),
        }
    }

    fn modular_scaled(&self, f: &GridFunction, lambda: f64) -> f64 {
        let mut sum = 0.0;
        for (v, p) in f.values.iter().zip(&self.values) {
            if *v != 0.0 {
                sum += (v.abs() / lambda).powf(*p);
            }
        }
        sum * f.spec.cell_volume()
    }
}

pub fn modular(f: &GridFunction, p: &ExponentField) -> ModularValue {
    let cells = CellExponents::new(p, f);
    ModularValue {
        value: cells.modular_scaled(f, 1.0),
        h: f.spec.h,
    }
}

/// The Luxemburg norm inf{lambda > 0 : modular(f/lambda) <= 1}, computed by
/// bisection on the nonincreasing map lambda -> modular(f/lambda).
pub fn luxemburg_norm(f: &GridFunction, p: &ExponentField) -> f64 {
    luxemburg_norm_cached(f, &CellExponents::new(p, f))
}

pub fn luxemburg_norm_cached(f: &GridFunction, cells: &CellExponents) -> f64 {
    let sup = f.sup_abs();
    if sup == 0.0 {
        return 0.0;
    }
    let vol = f.values.iter().filter(|v| **v != 0.0).count() as f64 * f.spec.cell_volume();
    let vol_lo = vol.powf(1.0 / cells.p_plus).min(vol.powf(1.0 / cells.p_minus));
    let vol_hi = vol.powf(1.0 / cells.p_minus);
    let mut lo = sup * vol_lo.min(1.0) / 2.0;
    let mut hi = sup * vol_hi.max(1.0) * 2.0;

    // Expand until the bracket straddles modular = 1.
    let mut guard = 0;
    while cells.modular_scaled(f, hi) > 1.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return hi;
        }
    }
    guard = 0;
    while cells.modular_scaled(f, lo) <= 1.0 {
        if lo <= hi / 2.0_f64.powi(200) {
            return lo;
        }
        lo /= 2.0;
        guard += 1;
        if guard > 400 {
            return lo;
        }
    }

    while (hi - lo) > BISECTION_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if cells.modular_scaled(f, mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// r_p = 1 + 1/p^- - 1/p^+, the explicit constant of the Holder/duality lemma.
pub fn r_p(p: &ExponentField) -> f64 {
    1.0 + 1.0 / p.p_minus() - 1.0 / p.p_plus()
}

/// Check the two-function Holder inequality with the explicit constant r_p:
/// LHS = integral of |fg|, RHS = r_p ||f||_p ||g||_p'.
pub fn holder_pair_check(
    f: &GridFunction,
    g: &GridFunction,
    p: &ExponentField,
) -> Result<InequalityReport> {
    let p_conj = p.conjugate()?;
    let lhs = f.zip_with(g, |a, b| (a * b).abs())?.integrate();
    let nf = luxemburg_norm(f, p);
    let ng = luxemburg_norm(g, &p_conj);
    let rhs = r_p(p) * nf * ng;
    let ratio = if rhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(InequalityReport::single(
        "holder_pair",
        serde_json::json!({ "r_p": r_p(p), "norm_f": nf, "norm_g": ng }),
        TrialRow::new(lhs, rhs, ratio),
    ))
}

/// Lower-bound the norm by duality: max of |integral f g| over `trials`
/// random g normalized in L^{p'}, with the analytic witness
/// g = sign(f) (|f|/||f||)^{p-1} included among the candidates.
pub fn duality_lower_bound(
    f: &GridFunction,
    p: &ExponentField,
    trials: usize,
    seed: u64,
) -> Result<InequalityReport> {
    let p_conj = p.conjugate()?;
    let norm_f = luxemburg_norm(f, p);
    if norm_f == 0.0 {
        return Ok(InequalityReport::single(
            "duality_lower_bound",
            serde_json::json!({ "norm_f": 0.0 }),
            TrialRow::new(0.0, 0.0, 0.0),
        ));
    }
    let conj_cells = CellExponents::new(&p_conj, f);
    let p_cells = CellExponents::new(p, f);

    let mut best = 0.0f64;
    let mut pairing = |g: &GridFunction| -> Result<()> {
        let ng = luxemburg_norm_cached(g, &conj_cells);
        if ng == 0.0 {
            return Ok(());
        }
        let val = f.zip_with(g, |a, b| a * b)?.integrate().abs() / ng;
        best = best.max(val);
        Ok(())
    };

    for t in 0..trials {
        let g = random_grid_function(f.spec.clone(), seed.wrapping_add(t as u64));
        pairing(&g)?;
    }
    // Analytic witness: the extremal function of the duality pairing.
    let witness = GridFunction {
        spec: f.spec.clone(),
        values: f
            .values
            .iter()
            .zip(&p_cells.values)
            .map(|(&v, &pe)| v.signum() * (v.abs() / norm_f).powf(pe - 1.0))
            .collect(),
    };
    pairing(&witness)?;

    let rhs = r_p(p) * norm_f;
    Ok(InequalityReport::single(
        "duality_lower_bound",
        serde_json::json!({ "norm_f": norm_f, "r_p": r_p(p), "trials": trials, "seed": seed }),
        TrialRow::new(best, rhs, if rhs == 0.0 { 0.0 } else { best / rhs }),
    ))
}

/// Generalized Holder: ratio of ||prod f_i||_p to prod ||f_i||_{p_i}, with
/// 1/p = sum 1/p_i.
pub fn generalized_holder_check(
    fs: &[&GridFunction],
    ps: &[&ExponentField],
) -> Result<InequalityReport> {
    assert_eq!(fs.len(), ps.len());
    assert!(!fs.is_empty());
    let n = ps[0].dim();
    let p = holder_scale(ps, 0.0, n)?;
    let mut product = fs[0].clone().map(|v| v);
    for f in &fs[1..] {
        product = product.zip_with(f, |a, b| a * b)?;
    }
    let lhs = luxemburg_norm(&product, &p);
    let mut rhs = 1.0;
    for (f, pi) in fs.iter().zip(ps) {
        rhs *= luxemburg_norm(f, pi);
    }
    let ratio = if rhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(InequalityReport::single(
        "generalized_holder",
        serde_json::json!({ "m": fs.len() }),
        TrialRow::new(lhs, rhs, ratio),
    ))
}

/// Minimum cube sidelength, in cells, of the default dyadic BMO family.
const BMO_MIN_CELLS: usize = 4;

/// The BMO seminorm over an explicit cube family, or over the default family
/// of dyadic index blocks down to sidelength 4h when `family` is `None`.
pub fn bmo_norm(b: &GridFunction, family: Option<&[Cube]>) -> Result<f64> {
    match family {
        Some(cubes) => {
            if cubes.is_empty() {
                return Err(Error::EmptyCubeFamily);
            }
            let mut best: Option<f64> = None;
            for q in cubes {
                let cells: Vec<usize> = (0..b.spec.len())
                    .filter(|&i| q.contains(&b.spec.midpoint(i)))
                    .collect();
                if cells.is_empty() {
                    continue;
                }
                best = Some(best.unwrap_or(0.0).max(oscillation(&b.values, &cells)));
            }
            best.ok_or(Error::EmptyRegion)
        }
        None => {
            let mut best = 0.0f64;
            let dim = b.spec.dim();
            let full: Vec<(usize, usize)> = b.spec.cells.iter().map(|&c| (0, c)).collect();
            let mut stack = vec![full];
            while let Some(ranges) = stack.pop() {
                let cells = block_cells(&b.spec, &ranges);
                best = best.max(oscillation(&b.values, &cells));
                if ranges.iter().all(|&(s, e)| e - s >= 2 * BMO_MIN_CELLS) {
                    // Split every axis in half; children inherit dyadic shape.
                    let mut children = vec![Vec::with_capacity(dim)];
                    for &(s, e) in &ranges {
                        let mid = s + (e - s) / 2;
                        let mut next = Vec::with_capacity(children.len() * 2);
                        for child in &children {
                            let mut a = child.clone();
                            a.push((s, mid));
                            next.push(a);
                            let mut c = child.clone();
                            c.push((mid, e));
                            next.push(c);
                        }
                        children = next;
                    }
                    stack.extend(children);
                }
            }
            Ok(best)
        }
    }
}

fn block_cells(spec: &crate::geometry::GridSpec, ranges: &[(usize, usize)]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = ranges.iter().map(|&(s, _)| s).collect();
    loop {
        out.push(spec.flat_index(&idx));
        let mut axis = ranges.len();
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < ranges[axis].1 {
                break;
            }
            idx[axis] = ranges[axis].0;
            if axis == 0 {
                return out;
            }
        }
    }
}

/// Mean absolute deviation from the mean over the listed cells.
fn oscillation(values: &[f64], cells: &[usize]) -> f64 {
    let count = cells.len() as f64;
    let mean = cells.iter().map(|&i| values[i]).sum::<f64>() / count;
    cells.iter().map(|&i| (values[i] - mean).abs()).sum::<f64>() / count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GridSpec;
    use proptest::prelude::*;

    fn unit_spec(cells: usize) -> GridSpec {
        GridSpec::new(vec![0.0], vec![cells], 1.0 / cells as f64)
    }

    #[test]
    fn modular_of_indicator_is_measure() {
        let spec = unit_spec(256);
        let q = Cube::new(vec![0.5], 0.5);
        let f = GridFunction::indicator(spec, &q);
        let p = ExponentField::from_fn(vec![0.0], vec![1.0], vec![33], |x| 2.0 + x[0], 2.0);
        assert!((modular(&f, &p).value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn modular_zero() {
        let f = GridFunction::zeros(unit_spec(64));
        let p = ExponentField::constant(vec![0.0], vec![1.0], 2.0);
        assert_eq!(modular(&f, &p).value, 0.0);
    }

    #[test]
    fn modular_exponential_oracle() {
        // f = 2 chi_[0,1], p(x) = 2 + x: integral of 2^{2+x} dx = 4/ln 2.
        let spec = unit_spec(4096);
        let f = GridFunction::from_fn(spec, |_| 2.0);
        let p = ExponentField::from_fn(vec![0.0], vec![1.0], vec![4097], |x| 2.0 + x[0], 2.0);
        let expected = 4.0 / std::f64::consts::LN_2;
        assert!((modular(&f, &p).value - expected).abs() < 1e-4);
    }

    #[test]
    fn luxemburg_constant_exponent_closed_form() {
        let spec = unit_spec(256);
        let q = Cube::new(vec![0.25], 0.5);
        let f = GridFunction::indicator(spec, &q).scale(3.0);
        for pv in [1.5, 2.0, 3.0] {
            let p = ExponentField::constant(vec![0.0], vec![1.0], pv);
            let expect = 3.0 * 0.5f64.powf(1.0 / pv);
            let got = luxemburg_norm(&f, &p);
            assert!(
                (got - expect).abs() <= 1e-6 * expect,
                "p = {pv}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn luxemburg_unit_indicator_any_exponent() {
        let spec = unit_spec(128);
        let f = GridFunction::from_fn(spec, |_| 1.0);
        let p = ExponentField::from_fn(vec![0.0], vec![1.0], vec![65], |x| 2.0 + x[0].sin(), 2.0);
        assert!((luxemburg_norm(&f, &p) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn luxemburg_refinement_oracle() {
        // f(x) = x, p(x) = 2 + x on [0,1]: compare against a much finer
        // independent evaluation of the same construction.
        let coarse = GridFunction::from_fn(unit_spec(512), |x| x[0]);
        let fine = GridFunction::from_fn(unit_spec(1 << 16), |x| x[0]);
        let p = ExponentField::from_fn(vec![0.0], vec![1.0], vec![4097], |x| 2.0 + x[0], 2.0);
        let a = luxemburg_norm(&coarse, &p);
        let b = luxemburg_norm(&fine, &p);
        assert!((a - b).abs() <= 1e-4 * b, "coarse {a} vs fine {b}");
    }

    #[test]
    fn unit_ball_property() {
        let p = ExponentField::from_fn(vec![0.0], vec![1.0], vec![129], |x| 2.0 + x[0].sin(), 2.0);
        for seed in 0..20 {
            let f = random_grid_function(unit_spec(128), seed);
            let norm = luxemburg_norm(&f, &p);
            let m = modular(&f.scale(1.0 / norm), &p).value;
            assert!((m - 1.0).abs() <= 1e-4, "seed {seed}: modular {m}");
        }
    }

    #[test]
    fn holder_pair_cauchy_schwarz_equality() {
        let spec = unit_spec(64);
        let f = GridFunction::from_fn(spec, |_| 1.0);
        let p = ExponentField::constant(vec![0.0], vec![1.0], 2.0);
        let report = holder_pair_check(&f, &f, &p).unwrap();
        let row = &report.rows[0];
        assert!((row.lhs - 1.0).abs() < 1e-9);
        assert!((row.ratio - 1.0).abs() < 1e-6);
    }

    #[test]
    fn holder_pair_zero_g() {
        let spec = unit_spec(64);
        let f = GridFunction::from_fn(spec.clone(), |x| x[0]);
        let g = GridFunction::zeros(spec);
        let p = ExponentField::constant(vec![0.0], vec![1.0], 2.0);
        let report = holder_pair_check(&f, &g, &p).unwrap();
        assert_eq!(report.rows[0].lhs, 0.0);
        assert_eq!(report.rows[0].ratio, 0.0);
    }

    #[test]
    fn holder_pair_sweep_stays_below_one() {
        let p = ExponentField::from_fn(vec![0.0], vec![1.0], vec![65], |x| 2.0 + x[0].sin(), 2.0);
        for seed in 0..200 {
            let f = random_grid_function(unit_spec(128), 1000 + seed);
            let g = random_grid_function(unit_spec(128), 2000 + seed);
            let report = holder_pair_check(&f, &g, &p).unwrap();
            assert!(
                report.rows[0].ratio <= 1.0 + 1e-6,
                "seed {seed}: {:?}",
                report.rows[0]
            );
        }
    }

    #[test]
    fn duality_self_dual_l2() {
        let spec = unit_spec(64);
        let f = GridFunction::from_fn(spec, |_| 1.0);
        let p = ExponentField::constant(vec![0.0], vec![1.0], 2.0);
        let report = duality_lower_bound(&f, &p, 8, 42).unwrap();
        // witness chi_[0,1] gives pairing 1 = ||f||_2
        assert!((report.rows[0].lhs - 1.0).abs() < 1e-6);
    }

    #[test]
    fn duality_sandwich_variable_exponent() {
        let spec = unit_spec(256);
        let f = GridFunction::from_fn(spec, |x| x[0]);
        let p = ExponentField::from_fn(vec![0.0], vec![1.0], vec![257], |x| 2.0 + x[0], 2.0);
        let norm = luxemburg_norm(&f, &p);
        let report = duality_lower_bound(&f, &p, 16, 7).unwrap();
        let best = report.rows[0].lhs;
        assert!(best >= norm * (1.0 - 1e-3), "best {best} < norm {norm}");
        assert!(best <= r_p(&p) * norm + 1e-6);
    }

    #[test]
    fn duality_zero_function() {
        let f = GridFunction::zeros(unit_spec(32));
        let p = ExponentField::constant(vec![0.0], vec![1.0], 2.0);
        let report = duality_lower_bound(&f, &p, 4, 1).unwrap();
        assert_eq!(report.rows[0].lhs, 0.0);
    }

    #[test]
    fn generalized_holder_equality_case() {
        let spec = unit_spec(64);
        let f = GridFunction::from_fn(spec, |_| 1.0);
        let p = ExponentField::constant(vec![0.0], vec![1.0], 2.0);
        let report = generalized_holder_check(&[&f, &f], &[&p, &p]).unwrap();
        assert!((report.rows[0].ratio - 1.0).abs() < 1e-6);
    }

    #[test]
    fn generalized_holder_zero_factor() {
        let spec = unit_spec(64);
        let f = GridFunction::from_fn(spec.clone(), |x| x[0]);
        let z = GridFunction::zeros(spec);
        let p = ExponentField::constant(vec![0.0], vec![1.0], 2.0);
        let report = generalized_holder_check(&[&f, &z], &[&p, &p]).unwrap();
        assert_eq!(report.rows[0].ratio, 0.0);
    }

    #[test]
    fn bmo_constant_is_zero() {
        let b = GridFunction::from_fn(unit_spec(64), |_| 5.0);
        assert_eq!(bmo_norm(&b, None).unwrap(), 0.0);
    }

    #[test]
    fn bmo_linear_oracle() {
        // b(x) = x on [0,1]: mean deviation on an interval of length L is
        // L/4, maximized by the full interval.
        let b = GridFunction::from_fn(unit_spec(512), |x| x[0]);
        let got = bmo_norm(&b, None).unwrap();
        assert!((got - 0.25).abs() < 1e-2, "got {got}");
    }

    #[test]
    fn bmo_log_two_resolution_stability() {
        let make = |cells: usize| {
            let spec = GridSpec::new(vec![-1.0], vec![cells], 2.0 / cells as f64);
            GridFunction::from_fn(spec, |x| x[0].abs().max(1e-3).ln())
        };
        let a = bmo_norm(&make(256), None).unwrap();
        let b = bmo_norm(&make(512), None).unwrap();
        assert!(a.is_finite() && b.is_finite());
        assert!((a - b).abs() <= 0.1 * b.max(a), "a {a} b {b}");
    }

    #[test]
    fn bmo_shift_and_scale() {
        let b = random_grid_function(unit_spec(128), 9);
        let base = bmo_norm(&b, None).unwrap();
        let shifted = bmo_norm(&b.map(|v| v + 3.0), None).unwrap();
        assert!((base - shifted).abs() <= 1e-12 * base.max(1.0));
        let doubled = bmo_norm(&b.scale(2.0), None).unwrap();
        assert_eq!(doubled, 2.0 * base);
    }

    #[test]
    fn bmo_explicit_family() {
        let b = GridFunction::from_fn(unit_spec(256), |x| x[0]);
        let family = [Cube::new(vec![0.5], 1.0)];
        let got = bmo_norm(&b, Some(&family)).unwrap();
        assert!((got - 0.25).abs() < 1e-2);
        assert!(matches!(bmo_norm(&b, Some(&[])), Err(Error::EmptyCubeFamily)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn norm_homogeneity(c in -10.0f64..10.0, seed in 0u64..1000) {
            prop_assume!(c.abs() > 1e-6);
            let p = ExponentField::from_fn(
                vec![0.0], vec![1.0], vec![33], |x| 2.0 + x[0].sin(), 2.0);
            let f = random_grid_function(unit_spec(64), seed);
            let a = luxemburg_norm(&f.scale(c), &p);
            let b = c.abs() * luxemburg_norm(&f, &p);
            prop_assert!((a - b).abs() <= 1e-8 * b.max(1e-30));
        }

        #[test]
        fn norm_monotone(seed in 0u64..1000) {
            let p = ExponentField::from_fn(
                vec![0.0], vec![1.0], vec![33], |x| 2.0 + 0.5 * x[0], 2.0);
            let g = random_grid_function(unit_spec(64), seed);
            // |f| <= |g| pointwise
            let f = g.map(|v| 0.7 * v);
            prop_assert!(
                luxemburg_norm(&f, &p) <= luxemburg_norm(&g, &p) + 1e-10
            );
        }
    }
}
