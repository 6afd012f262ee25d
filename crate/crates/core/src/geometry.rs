//! Cubes, the region algebra E_A, and uniformly sampled grid functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned closed cube given by its center and sidelength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    pub center: Vec<f64>,
    pub side: f64,
}

impl Cube {
    pub fn new(center: Vec<f64>, side: f64) -> Self {
        assert!(side > 0.0, "cube sidelength must be positive");
        Cube { center, side }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Membership in the closed box of sidelength `side` centered at `center`.
    pub fn contains(&self, x: &[f64]) -> bool {
        let half = self.side / 2.0;
        x.iter()
            .zip(&self.center)
            .all(|(xi, ci)| (xi - ci).abs() <= half)
    }

    /// Same center, sidelength scaled by `kappa`.
    pub fn dilate(&self, kappa: f64) -> Result<Cube> {
        if kappa <= 0.0 {
            return Err(Error::NonpositiveDilation(kappa));
        }
        Ok(Cube {
            center: self.center.clone(),
            side: self.side * kappa,
        })
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim() as i32)
    }

    pub fn translate(&self, v: &[f64]) -> Cube {
        Cube {
            center: self
                .center
                .iter()
                .zip(v)
                .map(|(c, t)| c + t)
                .collect(),
            side: self.side,
        }
    }
}

/// Uniform cell layout over an axis-aligned box. Values live at cell midpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub cells: Vec<usize>,
    pub h: f64,
}

impl GridSpec {
    pub fn new(lo: Vec<f64>, cells: Vec<usize>, h: f64) -> Self {
        assert_eq!(lo.len(), cells.len());
        assert!(h > 0.0);
        assert!(cells.iter().all(|&c| c > 0));
        GridSpec { lo, cells, h }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn len(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hi(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.cells)
            .map(|(l, &c)| l + c as f64 * self.h)
            .collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim() as i32)
    }

    /// Decode a flat index (row-major, last axis fastest) into per-axis indices.
    pub fn multi_index(&self, mut flat: usize, out: &mut [usize]) {
        for axis in (0..self.dim()).rev() {
            out[axis] = flat % self.cells[axis];
            flat /= self.cells[axis];
        }
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for axis in 0..self.dim() {
            flat = flat * self.cells[axis] + idx[axis];
        }
        flat
    }

    /// Midpoint of the cell with the given flat index.
    pub fn midpoint(&self, flat: usize) -> Vec<f64> {
        let mut idx = vec![0usize; self.dim()];
        self.multi_index(flat, &mut idx);
        idx.iter()
            .zip(&self.lo)
            .map(|(&i, l)| l + (i as f64 + 0.5) * self.h)
            .collect()
    }

    /// Iterate over (flat index, midpoint).
    pub fn midpoints(&self) -> impl Iterator<Item = (usize, Vec<f64>)> + '_ {
        (0..self.len()).map(move |i| (i, self.midpoint(i)))
    }
}

#[derive(Serialize, Deserialize)]
struct GridFunctionRepr {
    n: usize,
    #[serde(rename = "box")]
    bbox: Vec<[f64; 2]>,
    h: f64,
    values: Vec<f64>,
}

/// A real function sampled at cell midpoints, zero outside its box.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(spec: GridSpec) -> Self {
        let len = spec.len();
        GridFunction {
            spec,
            values: vec![0.0; len],
        }
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..spec.len()).map(|i| f(&spec.midpoint(i))).collect();
        GridFunction { spec, values }
    }

    /// Indicator of a cube, sampled at midpoints.
    pub fn indicator(spec: GridSpec, cube: &Cube) -> Self {
        Self::from_fn(spec, |x| if cube.contains(x) { 1.0 } else { 0.0 })
    }

    /// Midpoint-rule integral: h^n * sum of values.
    pub fn integrate(&self) -> f64 {
        self.spec.cell_volume() * self.values.iter().sum::<f64>()
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        GridFunction {
            spec: self.spec.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Pointwise combination of two functions on the same grid.
    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch(
                "zip_with requires identical grids".into(),
            ));
        }
        Ok(GridFunction {
            spec: self.spec.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction {
            spec: self.spec.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Value of the cell containing x; zero outside the box.
    pub fn eval_nearest(&self, x: &[f64]) -> f64 {
        let n = self.spec.dim();
        let mut idx = vec![0usize; n];
        for axis in 0..n {
            let t = (x[axis] - self.spec.lo[axis]) / self.spec.h;
            if t < 0.0 || t >= self.spec.cells[axis] as f64 {
                return 0.0;
            }
            idx[axis] = t as usize;
        }
        self.values[self.spec.flat_index(&idx)]
    }
}

impl Serialize for GridFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let bbox = self
            .spec
            .lo
            .iter()
            .zip(self.spec.hi())
            .map(|(&l, h)| [l, h])
            .collect();
        GridFunctionRepr {
            n: self.spec.dim(),
            bbox,
            h: self.spec.h,
            values: self.values.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GridFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = GridFunctionRepr::deserialize(d)?;
        if repr.bbox.len() != repr.n {
            return Err(D::Error::custom("box length does not match dimension"));
        }
        if !(repr.h > 0.0) {
            return Err(D::Error::custom("cell size must be positive"));
        }
        let lo: Vec<f64> = repr.bbox.iter().map(|b| b[0]).collect();
        let cells: Vec<usize> = repr
            .bbox
            .iter()
            .map(|b| {
                let span = b[1] - b[0];
                let c = (span / repr.h).round();
                if c < 0.5 || (span - c * repr.h).abs() > 1e-9 * repr.h.max(span.abs()) {
                    Err(D::Error::custom("box span is not a multiple of h"))
                } else {
                    Ok(c as usize)
                }
            })
            .collect::<std::result::Result<_, _>>()?;
        let spec = GridSpec::new(lo, cells, repr.h);
        if spec.len() != repr.values.len() {
            return Err(D::Error::custom("values length does not match grid shape"));
        }
        if repr.values.iter().any(|v| !v.is_finite()) {
            return Err(D::Error::custom("grid values must be finite"));
        }
        Ok(GridFunction {
            spec,
            values: repr.values,
        })
    }
}

/// Seeded piecewise-constant test function: one uniform [-1, 1] draw per cell.
pub fn random_grid_function(spec: GridSpec, seed: u64) -> GridFunction {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let values = (0..spec.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    GridFunction { spec, values }
}

/// The proof region E_A: outside Q*_j for j in A, inside Q*_j for j outside A.
/// When A = {1..m} the second family of conditions is vacuous.
#[derive(Debug, Clone)]
pub struct RegionEa {
    stars: Vec<Cube>,
    in_a: Vec<bool>,
}

impl RegionEa {
    pub fn contains(&self, x: &[f64]) -> bool {
        self.stars.iter().zip(&self.in_a).all(|(q, &excluded)| {
            if excluded {
                !q.contains(x)
            } else {
                q.contains(x)
            }
        })
    }

    /// Index of the first cube whose condition `x` violates, if any.
    pub fn violated_cube(&self, x: &[f64]) -> Option<usize> {
        self.stars
            .iter()
            .zip(&self.in_a)
            .position(|(q, &excluded)| q.contains(x) == excluded)
    }
}

/// Build the E_A membership predicate from the cubes, the index subset `a`
/// (0-based), and the dilation factor defining Q*.
pub fn region_ea(cubes: &[Cube], a: &[usize], kappa: f64) -> Result<RegionEa> {
    if a.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    let stars: Result<Vec<Cube>> = cubes.iter().map(|q| q.dilate(kappa)).collect();
    let mut in_a = vec![false; cubes.len()];
    for &j in a {
        in_a[j] = true;
    }
    // A = {1..m}: only the exclusion conditions apply, which the general
    // predicate already expresses.
    Ok(RegionEa {
        stars: stars?,
        in_a,
    })
}

/// Default dilation factor for Q*: twice the square root of the dimension.
pub fn default_star_factor(n: usize) -> f64 {
    2.0 * (n as f64).sqrt()
}
