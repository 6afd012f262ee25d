//! Variable exponent functions p(.), the log-Holder classifier, and exponent
//! arithmetic (conjugates, Holder scaling, atom degree).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Cube;

/// Default pass threshold for the log-Holder constants. The condition only
/// requires finiteness; the threshold flags grid divergence.
pub const DEFAULT_LH_THRESHOLD: f64 = 100.0;

/// A variable exponent sampled at the nodes of a uniform grid over a box,
/// with a constant tail value outside the box. Evaluation is multilinear
/// interpolation inside, `p_inf` outside.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentField {
    lo: Vec<f64>,
    hi: Vec<f64>,
    shape: Vec<usize>,
    samples: Vec<f64>,
    p_inf: f64,
}

#[derive(Serialize, Deserialize)]
struct ExponentFieldRepr {
    n: usize,
    #[serde(rename = "box")]
    bbox: Vec<[f64; 2]>,
    shape: Vec<usize>,
    samples: Vec<f64>,
    p_inf: f64,
}

/// Region of evaluation for inf/sup queries.
#[derive(Debug, Clone)]
pub enum Region {
    /// All of R^n: grid samples plus the tail.
    Whole,
    /// Only the constant tail outside the box.
    Tail,
    /// A cube; includes the tail value when the cube is not contained in the box.
    Cube(Cube),
}

/// Result of the log-Holder classifier.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LhReport {
    pub c_local: f64,
    pub c_decay: f64,
    pub pass: bool,
}

impl ExponentField {
    pub fn new(
        lo: Vec<f64>,
        hi: Vec<f64>,
        shape: Vec<usize>,
        samples: Vec<f64>,
        p_inf: f64,
    ) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert_eq!(lo.len(), shape.len());
        assert!(lo.iter().zip(&hi).all(|(l, h)| l < h));
        assert!(shape.iter().all(|&s| s >= 1));
        assert_eq!(samples.len(), shape.iter().product::<usize>());
        assert!(samples.iter().all(|&p| p > 0.0 && p.is_finite()));
        assert!(p_inf > 0.0 && p_inf.is_finite());
        ExponentField {
            lo,
            hi,
            shape,
            samples,
        p_inf,
        }
    }

    pub fn constant(lo: Vec<f64>, hi: Vec<f64>, value: f64) -> Self {
        let n = lo.len();
        Self::new(lo, hi, vec![1; n], vec![value], value)
    }

    /// Sample p(.) from a closure at the grid nodes; tail value supplied
    /// separately.
    pub fn from_fn(
        lo: Vec<f64>,
        hi: Vec<f64>,
        shape: Vec<usize>,
        f: impl Fn(&[f64]) -> f64,
        p_inf: f64,
    ) -> Self {
        let count: usize = shape.iter().product();
        let mut samples = Vec::with_capacity(count);
        let tmp = ExponentField {
            lo: lo.clone(),
            hi: hi.clone(),
            shape: shape.clone(),
            samples: vec![1.0; count],
            p_inf,
        };
        for i in 0..count {
            samples.push(f(&tmp.node_position(i)));
        }
        Self::new(lo, hi, shape, samples, p_inf)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn p_inf(&self) -> f64 {
        self.p_inf
    }

    pub fn bounds(&self) -> (&[f64], &[f64]) {
        (&self.lo, &self.hi)
    }

    fn node_coords(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.dim()];
        for axis in (0..self.dim()).rev() {
            idx[axis] = flat % self.shape[axis];
            flat /= self.shape[axis];
        }
        idx
    }

    /// Physical position of the node with the given flat index. A single-node
    /// axis places its node at the box center.
    pub fn node_position(&self, flat: usize) -> Vec<f64> {
        let idx = self.node_coords(flat);
        (0..self.dim())
            .map(|axis| {
                if self.shape[axis] == 1 {
                    0.5 * (self.lo[axis] + self.hi[axis])
                } else {
                    let t = idx[axis] as f64 / (self.shape[axis] - 1) as f64;
                    self.lo[axis] + t * (self.hi[axis] - self.lo[axis])
                }
            })
            .collect()
    }

    fn in_box(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(xi, (l, h))| *l <= *xi && *xi <= *h)
    }

    /// Evaluate p at any point of R^n.
    pub fn eval(&self, x: &[f64]) -> f64 {
        if !self.in_box(x) {
            return self.p_inf;
        }
        // Multilinear interpolation over the node grid.
        let n = self.dim();
        let mut base = vec![0usize; n];
        let mut frac = vec![0.0f64; n];
        for axis in 0..n {
            if self.shape[axis] == 1 {
                continue;
            }
            let t = (x[axis] - self.lo[axis]) / (self.hi[axis] - self.lo[axis])
                * (self.shape[axis] - 1) as f64;
            let t = t.clamp(0.0, (self.shape[axis] - 1) as f64);
            let i = (t.floor() as usize).min(self.shape[axis] - 2);
            base[axis] = i;
            frac[axis] = t - i as f64;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut idx = vec![0usize; n];
            for axis in 0..n {
                if self.shape[axis] == 1 {
                    idx[axis] = 0;
                    if corner >> axis & 1 == 1 {
                        w = 0.0;
                    }
                    continue;
                }
                if corner >> axis & 1 == 1 {
                    idx[axis] = base[axis] + 1;
                    w *= frac[axis];
                } else {
                    idx[axis] = base[axis];
                    w *= 1.0 - frac[axis];
                }
            }
            if w != 0.0 {
                let mut flat = 0;
                for axis in 0..n {
                    flat = flat * self.shape[axis] + idx[axis];
                }
                acc += w * self.samples[flat];
            }
        }
        acc
    }

    /// Global infimum over samples and tail.
    pub fn p_minus(&self) -> f64 {
        self.samples
            .iter()
            .fold(self.p_inf, |m, &p| m.min(p))
    }

    /// Global supremum over samples and tail.
    pub fn p_plus(&self) -> f64 {
        self.samples
            .iter()
            .fold(self.p_inf, |m, &p| m.max(p))
    }

    /// Min/max of p over the region, scanning grid samples and including the
    /// tail value when the region meets it.
    pub fn inf_sup(&self, region: &Region) -> Result<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut seen = false;
        let mut fold = |p: f64| {
            lo = lo.min(p);
            hi = hi.max(p);
            seen = true;
        };
        match region {
            Region::Whole => {
                self.samples.iter().for_each(|&p| fold(p));
                fold(self.p_inf);
            }
            Region::Tail => fold(self.p_inf),
            Region::Cube(cube) => {
                for i in 0..self.samples.len() {
                    if cube.contains(&self.node_position(i)) {
                        fold(self.samples[i]);
                    }
                }
                // The cube meets the tail unless it sits inside the box.
                let half = cube.side / 2.0;
                let inside = cube
                    .center
                    .iter()
                    .zip(self.lo.iter().zip(&self.hi))
                    .all(|(c, (l, h))| c - half >= *l && c + half <= *h);
                if !inside {
                    fold(self.p_inf);
                }
            }
        }
        if seen {
            Ok((lo, hi))
        } else {
            Err(Error::EmptyRegion)
        }
    }

    /// Exhaustive pair scan for the two log-Holder constants.
    ///
    /// `c_local` maximizes |p(x)-p(y)| * (-log|x-y|) over sampled pairs with
    /// 0 < |x-y| <= 1/2; `c_decay` maximizes |p(x)-p(y)| * (log|x|+e) over
    /// pairs with |y| >= |x|, the tail standing in as a point at infinity.
    pub fn check_log_holder(&self, threshold: f64) -> LhReport {
        let count = self.samples.len();
        let positions: Vec<Vec<f64>> = (0..count).map(|i| self.node_position(i)).collect();
        let radii: Vec<f64> = positions
            .iter()
            .map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect();

        let (c_local, c_decay) = (0..count)
            .into_par_iter()
            .map(|i| {
                let mut local = 0.0f64;
                let mut decay = 0.0f64;
                for j in (i + 1)..count {
                    let dp = (self.samples[i] - self.samples[j]).abs();
                    if dp == 0.0 {
                        continue;
                    }
                    let dist: f64 = positions[i]
                        .iter()
                        .zip(&positions[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    if dist > 0.0 && dist <= 0.5 {
                        local = local.max(dp * (-dist.ln()));
                    }
                    // Orient the pair so |y| >= |x|.
                    let r_near = radii[i].min(radii[j]);
                    let factor = r_near.ln() + std::f64::consts::E;
                    if factor > 0.0 {
                        decay = decay.max(dp * factor);
                    }
                }
                // Tail comparison: p at infinity.
                let dp_tail = (self.samples[i] - self.p_inf).abs();
                if dp_tail > 0.0 {
                    let factor = radii[i].ln() + std::f64::consts::E;
                    if factor > 0.0 {
                        decay = decay.max(dp_tail * factor);
                    }
                }
                (local, decay)
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));

        LhReport {
            c_local,
            c_decay,
            pass: c_local.is_finite()
                && c_decay.is_finite()
                && c_local <= threshold
                && c_decay <= threshold,
        }
    }

    /// Pointwise conjugate exponent: 1/p + 1/p' = 1. Requires p^- > 1.
    pub fn conjugate(&self) -> Result<ExponentField> {
        let p_minus = self.p_minus();
        if p_minus <= 1.0 {
            return Err(Error::ConjugateUndefined { p_minus });
        }
        Ok(ExponentField {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            shape: self.shape.clone(),
            samples: self.samples.iter().map(|&p| p / (p - 1.0)).collect(),
            p_inf: self.p_inf / (self.p_inf - 1.0),
        })
    }

    fn same_grid(&self, other: &ExponentField) -> bool {
        self.lo == other.lo && self.hi == other.hi && self.shape == other.shape
    }
}

impl Serialize for ExponentField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExponentFieldRepr {
            n: self.dim(),
            bbox: self
                .lo
                .iter()
                .zip(&self.hi)
                .map(|(&l, &h)| [l, h])
                .collect(),
            shape: self.shape.clone(),
            samples: self.samples.clone(),
            p_inf: self.p_inf,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExponentField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ExponentFieldRepr::deserialize(d)?;
        if repr.bbox.len() != repr.n || repr.shape.len() != repr.n {
            return Err(D::Error::custom("box/shape length does not match dimension"));
        }
        let expected: usize = repr.shape.iter().product();
        if repr.shape.iter().any(|&s| s == 0) || repr.samples.len() != expected {
            return Err(D::Error::custom("samples length does not match shape"));
        }
        if repr
            .samples
            .iter()
            .chain(std::iter::once(&repr.p_inf))
            .any(|&p| !(p > 0.0) || !p.is_finite())
        {
            return Err(D::Error::custom("exponent values must lie in (0, inf)"));
        }
        let lo: Vec<f64> = repr.bbox.iter().map(|b| b[0]).collect();
        let hi: Vec<f64> = repr.bbox.iter().map(|b| b[1]).collect();
        if lo.iter().zip(&hi).any(|(l, h)| !(l < h)) {
            return Err(D::Error::custom("box must have positive extent"));
        }
        Ok(ExponentField::new(lo, hi, repr.shape, repr.samples, repr.p_inf))
    }
}

/// The Holder scaling relation: 1/q(x) = sum_i 1/p_i(x) - alpha/n, applied
/// samplewise and at the tail. Errors if 1/q is nonpositive anywhere; the
/// reported index equals `samples.len()` when the violation is at the tail.
pub fn holder_scale(ps: &[&ExponentField], alpha: f64, n: usize) -> Result<ExponentField> {
    assert!(!ps.is_empty());
    let first = ps[0];
    for p in &ps[1..] {
        if !first.same_grid(p) {
            return Err(Error::GridMismatch(
                "holder_scale requires a shared exponent grid".into(),
            ));
        }
    }
    let count = first.samples.len();
    let mut samples = Vec::with_capacity(count);
    for i in 0..count {
        let recip: f64 = ps.iter().map(|p| 1.0 / p.samples[i]).sum::<f64>() - alpha / n as f64;
        if recip <= 0.0 {
            return Err(Error::ScalingViolatesP0 {
                index: i,
                reciprocal: recip,
            });
        }
        samples.push(1.0 / recip);
    }
    let tail_recip: f64 = ps.iter().map(|p| 1.0 / p.p_inf).sum::<f64>() - alpha / n as f64;
    if tail_recip <= 0.0 {
        return Err(Error::ScalingViolatesP0 {
            index: count,
            reciprocal: tail_recip,
        });
    }
    Ok(ExponentField {
        lo: first.lo.clone(),
        hi: first.hi.clone(),
        shape: first.shape.clone(),
        samples,
        p_inf: 1.0 / tail_recip,
    })
}

/// The critical atom degree: max(floor(n/p_- - n), -1) with p_- = min(p^-, 1).
pub fn atom_degree(p: &ExponentField, n: usize) -> i64 {
    let p_lower = p.p_minus().min(1.0);
    let raw = n as f64 / p_lower - n as f64;
    // Snap near-integer values before flooring so round-off cannot shift the
    // integer part.
    let snapped = if (raw - raw.round()).abs() < 1e-9 {
        raw.round()
    } else {
        raw.floor()
    };
    (snapped as i64).max(-1)
}
