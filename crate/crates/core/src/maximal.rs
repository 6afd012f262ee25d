//! Hardy-Littlewood, fractional, vector-valued, and grand maximal operators,
//! and the Hardy-space norm proxy built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{holder_scale, ExponentField};
use crate::geometry::{Cube, GridFunction, GridSpec};
use crate::norms::luxemburg_norm;
use crate::report::{InequalityReport, TrialRow};

/// Configuration of the cube-averaging maximal operators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaximalConfig {
    /// Smoothing order alpha in [0, n).
    pub alpha: f64,
    /// Window sidelengths, in cells; sorted, nonempty.
    pub scales_cells: Vec<usize>,
    /// Restrict the sup to the window centered at the evaluation point.
    pub centered: bool,
}

impl MaximalConfig {
    /// Dyadic scales from a single cell up to the full grid extent.
    pub fn dyadic(alpha: f64, spec: &GridSpec) -> Self {
        let max_cells = spec.cells.iter().copied().max().unwrap_or(1);
        let mut scales = Vec::new();
        let mut w = 1usize;
        while w < 2 * max_cells {
            scales.push(w.min(2 * max_cells));
            w *= 2;
        }
        MaximalConfig {
            alpha,
            scales_cells: scales,
            centered: false,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !(0.0 <= self.alpha && self.alpha < n as f64) {
            return Err(Error::AlphaOutOfRange {
                alpha: self.alpha,
                upper: n as f64,
            });
        }
        assert!(!self.scales_cells.is_empty(), "scale set must be nonempty");
        Ok(())
    }
}

/// Apply a 1D transform along `axis` of a flattened array with the given
/// per-axis lengths, producing an array whose axis length may change.
fn apply_axis(
    data: &[f64],
    dims: &[usize],
    axis: usize,
    out_len: usize,
    op: impl Fn(&[f64], &mut [f64]),
) -> (Vec<f64>, Vec<usize>) {
    let stride_after: usize = dims[axis + 1..].iter().product();
    let lines: usize = data.len() / dims[axis];
    let mut out_dims = dims.to_vec();
    out_dims[axis] = out_len;
    let mut out = vec![0.0; lines * out_len];
    let mut line_in = vec![0.0; dims[axis]];
    let mut line_out = vec![0.0; out_len];
    for line in 0..lines {
        let major = line / stride_after;
        let minor = line % stride_after;
        let base_in = major * dims[axis] * stride_after + minor;
        let base_out = major * out_len * stride_after + minor;
        for k in 0..dims[axis] {
            line_in[k] = data[base_in + k * stride_after];
        }
        op(&line_in, &mut line_out);
        for k in 0..out_len {
            out[base_out + k * stride_after] = line_out[k];
        }
    }
    (out, out_dims)
}

/// Zero-padded box sums of width w: out[u] = sum of in over the window with
/// start u-(w-1), u in 0..len+w-1.
fn box_sum_line(input: &[f64], w: usize, out: &mut [f64]) {
    let n = input.len();
    for u in 0..n + w - 1 {
        let s = u as isize - (w as isize - 1);
        let a = s.max(0) as usize;
        let b = ((s + w as isize) as usize).min(n);
        out[u] = input[a..b].iter().sum();
    }
}

/// out[i] = max of in[u] for u in [i, i+w-1]; in has length len+w-1.
fn sliding_max_line(input: &[f64], w: usize, out: &mut [f64]) {
    let n = out.len();
    for i in 0..n {
        out[i] = input[i..i + w].iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    }
}

/// The fractional maximal operator: at each grid point, the max over cubes
/// from the scale set containing the point of |Q|^{alpha/n - 1} * integral of
/// |f| over Q. Alpha = 0 gives the Hardy-Littlewood operator.
pub fn frac_maximal(f: &GridFunction, cfg: &MaximalConfig) -> Result<GridFunction> {
    let n = f.spec.dim();
    cfg.validate(n)?;
    let h = f.spec.h;
    let abs: Vec<f64> = f.values.iter().map(|v| v.abs()).collect();
    let mut best = vec![0.0f64; f.values.len()];
    for &w in &cfg.scales_cells {
        let factor = (w as f64 * h).powf(cfg.alpha - n as f64) * f.spec.cell_volume();
        if cfg.centered {
            // Single centered window per point.
            for i in 0..f.values.len() {
                let mut idx = vec![0usize; n];
                f.spec.multi_index(i, &mut idx);
                let mut sum = 0.0;
                let mut sub = vec![0usize; n];
                let lowers: Vec<isize> = idx
                    .iter()
                    .map(|&c| c as isize - (w as isize - 1) / 2)
                    .collect();
                let mut carry = vec![0usize; n];
                'outer: loop {
                    let mut flat_ok = true;
                    for axis in 0..n {
                        let p = lowers[axis] + carry[axis] as isize;
                        if p < 0 || p >= f.spec.cells[axis] as isize {
                            flat_ok = false;
                            break;
                        }
                        sub[axis] = p as usize;
                    }
                    if flat_ok {
                        sum += abs[f.spec.flat_index(&sub)];
                    }
                    let mut axis = n;
                    loop {
                        if axis == 0 {
                            break 'outer;
                        }
                        axis -= 1;
                        carry[axis] += 1;
                        if carry[axis] < w {
                            break;
                        }
                        carry[axis] = 0;
                        if axis == 0 {
                            break 'outer;
                        }
                    }
                }
                best[i] = best[i].max(factor * sum);
            }
        } else {
            // Separable box sums over all window positions, then separable
            // sliding max back to the cell layout.
            let mut data = abs.clone();
            let mut dims = f.spec.cells.clone();
            for axis in 0..n {
                let out_len = dims[axis] + w - 1;
                let (d, nd) = apply_axis(&data, &dims, axis, out_len, |line, out| {
                    box_sum_line(line, w, out)
                });
                data = d;
                dims = nd;
            }
            for axis in 0..n {
                let out_len = f.spec.cells[axis];
                let (d, nd) = apply_axis(&data, &dims, axis, out_len, |line, out| {
                    sliding_max_line(line, w, out)
                });
                data = d;
                dims = nd;
            }
            for (b, v) in best.iter_mut().zip(&data) {
                *b = b.max(factor * v);
            }
        }
    }
    Ok(GridFunction {
        spec: f.spec.clone(),
        values: best,
    })
}

/// Check the pointwise domination of the fractional kernel tail by the
/// maximal function of a cube indicator:
/// r^n / (r + |x-y|)^{n-alpha} <= C (M_alpha chi_{Q(y,r)})(x).
pub fn claim_check(
    y: &[f64],
    r: f64,
    alpha: f64,
    spec: &GridSpec,
) -> Result<InequalityReport> {
    let n = spec.dim();
    let cube = Cube::new(y.to_vec(), r);
    let chi = GridFunction::indicator(spec.clone(), &cube);
    let cfg = MaximalConfig::dyadic(alpha, spec);
    let m = frac_maximal(&chi, &cfg)?;
    let mut max_ratio = 0.0f64;
    let mut arg = vec![0.0; n];
    for (i, x) in spec.midpoints() {
        let dist: f64 = x
            .iter()
            .zip(y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let lhs = r.powi(n as i32) / (r + dist).powf(n as f64 - alpha);
        if m.values[i] > 0.0 {
            let ratio = lhs / m.values[i];
            if ratio > max_ratio {
                max_ratio = ratio;
                arg = x;
            }
        }
    }
    Ok(InequalityReport::single(
        "claim_check",
        serde_json::json!({ "y": y, "r": r, "alpha": alpha, "argmax": arg }),
        TrialRow::new(max_ratio, 1.0, max_ratio),
    ))
}

/// Vector-valued Fefferman-Stein check: LHS is the L^{q(.)} norm of the
/// pointwise l^q aggregate of M_alpha f_i; RHS the L^{p(.)} norm of the
/// aggregate of the f_i themselves.
pub fn vector_fs_check(
    fs: &[GridFunction],
    p: &ExponentField,
    alpha: f64,
    lq: f64,
    cfg: &MaximalConfig,
) -> Result<InequalityReport> {
    if lq <= 1.0 {
        return Err(Error::LqOutOfRange(lq));
    }
    assert!(!fs.is_empty());
    let n = p.dim();
    let q = holder_scale(&[p], alpha, n)?;
    let spec = fs[0].spec.clone();
    let mut lhs_agg = GridFunction::zeros(spec.clone());
    let mut rhs_agg = GridFunction::zeros(spec);
    for f in fs {
        let mf = frac_maximal(f, cfg)?;
        lhs_agg = lhs_agg.zip_with(&mf, |acc, v| acc + v.abs().powf(lq))?;
        rhs_agg = rhs_agg.zip_with(f, |acc, v| acc + v.abs().powf(lq))?;
    }
    let lhs_fn = lhs_agg.map(|v| v.powf(1.0 / lq));
    let rhs_fn = rhs_agg.map(|v| v.powf(1.0 / lq));
    let lhs = luxemburg_norm(&lhs_fn, &q);
    let rhs = luxemburg_norm(&rhs_fn, p);
    let ratio = if rhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(InequalityReport::single(
        "vector_fefferman_stein",
        serde_json::json!({ "alpha": alpha, "lq": lq, "family": fs.len() }),
        TrialRow::new(lhs, rhs, ratio),
    ))
}

/// A smooth bump on a reference box with its certification data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Bump {
    pub values: GridFunction,
    /// Discrete integral of the stored values; unit by construction.
    pub integral: f64,
    /// Schwartz-type seminorm sum_{|a|<=N} sup (1+|x|)^N |d^a psi|, measured
    /// numerically. The grand maximal sup divides by this value, so the
    /// member actually used satisfies the unit seminorm bound.
    pub seminorm: f64,
}

/// A finite certified dictionary standing in for the Schwartz test family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BumpDictionary {
    pub bumps: Vec<Bump>,
    pub scales: Vec<f64>,
    /// The smoothness/decay order N of the family.
    pub order: usize,
}

impl BumpDictionary {
    /// Three polynomial spline bumps (1-|x|^2)_+^s, s = 2, 3, 4, on
    /// [-1, 1]^n, normalized to unit discrete integral.
    pub fn standard(n: usize, order: usize, scales: Vec<f64>, cells_per_axis: usize) -> Self {
        assert!(!scales.is_empty());
        let spec = GridSpec::new(
            vec![-1.0; n],
            vec![cells_per_axis; n],
            2.0 / cells_per_axis as f64,
        );
        let bumps = [2i32, 3, 4]
            .iter()
            .map(|&s| {
                let raw = GridFunction::from_fn(spec.clone(), |x| {
                    let r2: f64 = x.iter().map(|v| v * v).sum();
                    (1.0 - r2).max(0.0).powi(s)
                });
                let mass = raw.integrate();
                let values = raw.scale(1.0 / mass);
                let seminorm = schwartz_seminorm(&values, order);
                Bump {
                    integral: values.integrate(),
                    seminorm,
                    values,
                }
            })
            .collect();
        BumpDictionary {
            bumps,
            scales,
            order,
        }
    }

    pub fn certify(&self) -> Result<()> {
        if self.bumps.is_empty() || self.scales.is_empty() {
            return Err(Error::UncertifiedDictionary("empty dictionary".into()));
        }
        for (i, b) in self.bumps.iter().enumerate() {
            if (b.integral - 1.0).abs() > 1e-8 {
                return Err(Error::UncertifiedDictionary(format!(
                    "bump {i} integral {} is not unit",
                    b.integral
                )));
            }
            let recomputed = b.values.integrate();
            if (recomputed - b.integral).abs() > 1e-8 {
                return Err(Error::UncertifiedDictionary(format!(
                    "bump {i} integral certificate stale"
                )));
            }
            if !(b.seminorm.is_finite() && b.seminorm > 0.0) {
                return Err(Error::UncertifiedDictionary(format!(
                    "bump {i} seminorm {} not certifiable",
                    b.seminorm
                )));
            }
        }
        Ok(())
    }
}

/// Numerical Schwartz seminorm: finite-difference derivatives up to order N,
/// weighted sup with (1+|x|)^N, summed over multi-indices.
fn schwartz_seminorm(psi: &GridFunction, order: usize) -> f64 {
    let n = psi.spec.dim();
    let mut total = 0.0;
    let mut orders = vec![0usize; n];
    loop {
        let total_order: usize = orders.iter().sum();
        if total_order <= order {
            let d = fd_derivative(psi, &orders);
            let mut sup = 0.0f64;
            for (i, x) in psi.spec.midpoints() {
                let w = (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt()).powi(order as i32);
                sup = sup.max(w * d[i].abs());
            }
            total += sup;
        }
        // Advance the multi-index over {0..order}^n.
        let mut axis = 0;
        loop {
            if axis == n {
                return total;
            }
            orders[axis] += 1;
            if orders[axis] <= order {
                break;
            }
            orders[axis] = 0;
            axis += 1;
        }
    }
}

/// Repeated central differences along each axis.
fn fd_derivative(f: &GridFunction, orders: &[usize]) -> Vec<f64> {
    let mut data = f.values.clone();
    let dims = f.spec.cells.clone();
    let h = f.spec.h;
    for (axis, &k) in orders.iter().enumerate() {
        for _ in 0..k {
            let (d, _) = apply_axis(&data, &dims, axis, dims[axis], |line, out| {
                let n = line.len();
                for i in 0..n {
                    let prev = if i > 0 { line[i - 1] } else { 0.0 };
                    let next = if i + 1 < n { line[i + 1] } else { 0.0 };
                    out[i] = (next - prev) / (2.0 * h);
                }
            });
            data = d;
        }
    }
    data
}

/// The grand maximal function: pointwise sup over dictionary members and
/// scales of |psi_t * f| with psi_t(x) = t^{-n} psi(x/t), each member taken
/// in its unit-seminorm normalization.
pub fn grand_maximal(f: &GridFunction, dict: &BumpDictionary) -> Result<GridFunction> {
    dict.certify()?;
    let n = f.spec.dim();
    let h = f.spec.h;
    let mut out = vec![0.0f64; f.values.len()];
    // Nonzero cells once; convolution sums only touch the support.
    let support: Vec<(usize, Vec<f64>)> = f
        .spec
        .midpoints()
        .filter(|(i, _)| f.values[*i] != 0.0)
        .collect();
    let mut scaled_arg = vec![0.0f64; n];
    for bump in &dict.bumps {
        let norm = 1.0 / bump.seminorm;
        for &t in &dict.scales {
            let tn = t.powi(n as i32);
            for (i, x) in f.spec.midpoints() {
                let mut acc = 0.0;
                for (j, y) in &support {
                    // Bump support is |x - y| <= t per axis on the reference box.
                    let mut inside = true;
                    for axis in 0..n {
                        let u = (x[axis] - y[axis]) / t;
                        if u.abs() > 1.0 {
                            inside = false;
                            break;
                        }
                        scaled_arg[axis] = u;
                    }
                    if inside {
                        acc += f.values[*j] * bump.values.eval_nearest(&scaled_arg);
                    }
                }
                let val = (acc * h.powi(n as i32) / tn).abs() * norm;
                if val > out[i] {
                    out[i] = val;
                }
            }
        }
    }
    Ok(GridFunction {
        spec: f.spec.clone(),
        values: out,
    })
}

/// The Hardy-space norm proxy: Luxemburg norm of the grand maximal function.
/// A lower bound to the true norm, since the dictionary is finite.
pub fn hardy_norm(f: &GridFunction, p: &ExponentField, dict: &BumpDictionary) -> Result<f64> {
    Ok(luxemburg_norm(&grand_maximal(f, dict)?, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_1d(cells: usize, lo: f64, hi: f64) -> GridSpec {
        GridSpec::new(vec![lo], vec![cells], (hi - lo) / cells as f64)
    }

    #[test]
    fn maximal_of_zero() {
        let f = GridFunction::zeros(spec_1d(64, 0.0, 1.0));
        let cfg = MaximalConfig::dyadic(0.0, &f.spec);
        let m = frac_maximal(&f, &cfg).unwrap();
        assert!(m.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn maximal_of_indicator_inside() {
        // For x in Q and alpha in [0, n), M_alpha chi_Q(x) = |Q|^{alpha/n}.
        let spec = spec_1d(256, -2.0, 2.0);
        let q = Cube::new(vec![0.0], 1.0);
        let chi = GridFunction::indicator(spec.clone(), &q);
        for alpha in [0.0, 0.5] {
            let cfg = MaximalConfig::dyadic(alpha, &spec);
            let m = frac_maximal(&chi, &cfg).unwrap();
            for (i, x) in spec.midpoints() {
                if x[0].abs() < 0.45 {
                    let expect = 1.0f64; // |Q|^{alpha/n} = 1 for unit cube
                    assert!(
                        (m.values[i] - expect).abs() < 0.08,
                        "alpha {alpha} x {} got {}",
                        x[0],
                        m.values[i]
                    );
                }
            }
        }
    }

    #[test]
    fn maximal_tail_value_oracle() {
        // f = chi_[0,1], x = 2: best window [0, 2+eps] gives value 1/2.
        let spec = spec_1d(512, -4.0, 4.0);
        let q = Cube::new(vec![0.5], 1.0);
        let chi = GridFunction::indicator(spec.clone(), &q);
        let cfg = MaximalConfig::dyadic(0.0, &spec);
        let m = frac_maximal(&chi, &cfg).unwrap();
        // brute-force oracle over all contiguous windows at the same scales
        let i = (0..spec.len())
            .min_by(|&a, &b| {
                let xa = (spec.midpoint(a)[0] - 2.0).abs();
                let xb = (spec.midpoint(b)[0] - 2.0).abs();
                xa.partial_cmp(&xb).unwrap()
            })
            .unwrap();
        let mut brute = 0.0f64;
        for &w in &cfg.scales_cells {
            for s in i as isize - w as isize + 1..=i as isize {
                let mut sum = 0.0;
                for k in s..s + w as isize {
                    if k >= 0 && (k as usize) < spec.len() {
                        sum += chi.values[k as usize];
                    }
                }
                brute = brute.max(sum * spec.h / (w as f64 * spec.h));
            }
        }
        assert!((m.values[i] - brute).abs() < 1e-12);
        assert!((m.values[i] - 0.5).abs() < 0.05, "got {}", m.values[i]);
    }

    #[test]
    fn maximal_homogeneity_and_monotonicity() {
        let spec = spec_1d(128, 0.0, 1.0);
        let f = crate::geometry::random_grid_function(spec.clone(), 3);
        let cfg = MaximalConfig::dyadic(0.25, &spec);
        let mf = frac_maximal(&f, &cfg).unwrap();
        let m2f = frac_maximal(&f.scale(-2.0), &cfg).unwrap();
        for (a, b) in mf.values.iter().zip(&m2f.values) {
            assert_eq!(2.0 * a, *b);
        }
        let g = f.map(|v| v.abs() + 0.1);
        let mg = frac_maximal(&g, &cfg).unwrap();
        for (a, b) in mf.values.iter().zip(&mg.values) {
            assert!(a <= b);
        }
    }

    #[test]
    fn hl_maximal_dominates_function() {
        let spec = spec_1d(128, 0.0, 1.0);
        let f = crate::geometry::random_grid_function(spec.clone(), 11);
        let cfg = MaximalConfig::dyadic(0.0, &spec);
        let m = frac_maximal(&f, &cfg).unwrap();
        for (v, mv) in f.values.iter().zip(&m.values) {
            assert!(*mv >= v.abs() - 1e-15);
        }
    }

    #[test]
    fn maximal_2d_matches_brute_force() {
        let spec = GridSpec::new(vec![0.0, 0.0], vec![16, 16], 1.0 / 16.0);
        let f = crate::geometry::random_grid_function(spec.clone(), 5);
        let cfg = MaximalConfig {
            alpha: 0.5,
            scales_cells: vec![1, 2, 4],
            centered: false,
        };
        let m = frac_maximal(&f, &cfg).unwrap();
        // brute force at a handful of points
        for &(ix, iy) in &[(0usize, 0usize), (7, 9), (15, 3), (8, 8)] {
            let flat = spec.flat_index(&[ix, iy]);
            let mut brute = 0.0f64;
            for &w in &cfg.scales_cells {
                let factor =
                    (w as f64 * spec.h).powf(cfg.alpha - 2.0) * spec.cell_volume();
                for sx in ix as isize - w as isize + 1..=ix as isize {
                    for sy in iy as isize - w as isize + 1..=iy as isize {
                        let mut sum = 0.0;
                        for dx in 0..w as isize {
                            for dy in 0..w as isize {
                                let (px, py) = (sx + dx, sy + dy);
                                if px >= 0 && py >= 0 && (px as usize) < 16 && (py as usize) < 16
                                {
                                    sum += f.values
                                        [spec.flat_index(&[px as usize, py as usize])]
                                    .abs();
                                }
                            }
                        }
                        brute = brute.max(factor * sum);
                    }
                }
            }
            assert!(
                (m.values[flat] - brute).abs() <= 1e-12 * brute.max(1.0),
                "({ix},{iy}): {} vs {}",
                m.values[flat],
                brute
            );
        }
    }

    #[test]
    fn claim_scale_invariance() {
        let spec = spec_1d(256, -4.0, 4.0);
        let base = claim_check(&[0.25], 0.25, 0.25, &spec).unwrap().rows[0].ratio;
        let doubled = claim_check(&[0.5], 0.5, 0.25, &spec).unwrap().rows[0].ratio;
        assert!(base.is_finite() && base > 0.0);
        assert!(
            (doubled / base).max(base / doubled) < 1.5,
            "base {base} doubled {doubled}"
        );
    }

    #[test]
    fn vector_fs_single_function_l2() {
        let spec = spec_1d(128, 0.0, 1.0);
        let f = crate::geometry::random_grid_function(spec.clone(), 17);
        let p = ExponentField::constant(vec![0.0], vec![1.0], 2.0);
        let cfg = MaximalConfig::dyadic(0.0, &spec);
        let report = vector_fs_check(&[f], &p, 0.0, 2.0, &cfg).unwrap();
        assert!(report.rows[0].ratio.is_finite());
        assert!(report.rows[0].ratio >= 1.0 - 1e-9); // M dominates |f|
    }

    #[test]
    fn vector_fs_zero_family_and_bad_lq() {
        let spec = spec_1d(32, 0.0, 1.0);
        let z = GridFunction::zeros(spec.clone());
        let p = ExponentField::constant(vec![0.0], vec![1.0], 2.0);
        let cfg = MaximalConfig::dyadic(0.0, &spec);
        let report = vector_fs_check(&[z.clone(), z.clone()], &p, 0.0, 2.0, &cfg).unwrap();
        assert_eq!(report.rows[0].ratio, 0.0);
        assert!(matches!(
            vector_fs_check(&[z], &p, 0.0, 1.0, &cfg),
            Err(Error::LqOutOfRange(_))
        ));
    }

    fn dict_1d() -> BumpDictionary {
        BumpDictionary::standard(1, 3, vec![0.25, 0.5, 1.0, 2.0], 128)
    }

    #[test]
    fn grand_maximal_zero() {
        let f = GridFunction::zeros(spec_1d(64, -2.0, 2.0));
        let m = grand_maximal(&f, &dict_1d()).unwrap();
        assert!(m.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn grand_maximal_lower_bounded_by_single_member() {
        let dict = dict_1d();
        let spec = spec_1d(256, -2.0, 2.0);
        let f = GridFunction::indicator(spec.clone(), &Cube::new(vec![0.0], 1.0));
        let m = grand_maximal(&f, &dict).unwrap();
        // Direct convolution with one member at one scale is a lower bound.
        let bump = &dict.bumps[0];
        let t = dict.scales[1];
        for (i, x) in spec.midpoints() {
            let mut acc = 0.0;
            for (j, y) in spec.midpoints() {
                let u = (x[0] - y[0]) / t;
                if u.abs() <= 1.0 {
                    acc += f.values[j] * bump.values.eval_nearest(&[u]);
                }
            }
            let direct = (acc * spec.h / t).abs() / bump.seminorm;
            assert!(m.values[i] >= direct - 1e-12);
        }
    }

    #[test]
    fn grand_maximal_positive_on_support() {
        let spec = spec_1d(256, -2.0, 2.0);
        let f = GridFunction::indicator(spec.clone(), &Cube::new(vec![0.5], 1.0));
        let m = grand_maximal(&f, &dict_1d()).unwrap();
        for (i, x) in spec.midpoints() {
            if x[0] > 0.1 && x[0] < 0.9 {
                assert!(m.values[i] > 0.0);
            }
        }
        // decays off support
        let near = m.values[(0..spec.len())
            .find(|&i| (spec.midpoint(i)[0] - 0.5).abs() < spec.h)
            .unwrap()];
        let far = m.values[0];
        assert!(far < near);
    }

    #[test]
    fn hardy_norm_homogeneous_and_comparable_to_l2() {
        let dict = dict_1d();
        let spec = spec_1d(256, -2.0, 2.0);
        let f = GridFunction::from_fn(spec, |x| (1.0 - x[0] * x[0]).max(0.0));
        let p = ExponentField::constant(vec![-2.0], vec![2.0], 2.0);
        let h1 = hardy_norm(&f, &p, &dict).unwrap();
        let h2 = hardy_norm(&f.scale(2.0), &p, &dict).unwrap();
        assert!((h2 - 2.0 * h1).abs() <= 1e-8 * h1);
        let l2 = luxemburg_norm(&f, &p);
        assert!(h1 > 1e-3 * l2, "hardy {h1} vs l2 {l2}");
    }

    #[test]
    fn dictionary_certification_and_round_trip() {
        let dict = dict_1d();
        dict.certify().unwrap();
        let text = serde_json::to_string(&dict).unwrap();
        let back: BumpDictionary = serde_json::from_str(&text).unwrap();
        back.certify().unwrap();
        assert_eq!(dict.bumps.len(), back.bumps.len());

        let mut bad = dict.clone();
        bad.bumps[0].integral = 0.5;
        assert!(matches!(
            grand_maximal(
                &GridFunction::zeros(spec_1d(8, 0.0, 1.0)),
                &bad
            ),
            Err(Error::UncertifiedDictionary(_))
        ));
    }
}
