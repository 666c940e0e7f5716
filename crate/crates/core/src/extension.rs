//! A cube-average extension operator on grids.
//!
//! Given a continuous `h` on `R^d` (`d = 1, 2`), the extension
//!
//! ```text
//! F_h(x, z) = z^{1-d} * integral of h over the cube
//!             Q(x, z) = prod_i [x_i - z/2, x_i + z/2],       F_h(x, 0) = 0,
//! ```
//!
//! is `C^1` up to the boundary plane, vanishes at `z = 0`, depends linearly
//! on `h`, and recovers `h` as its `z`-derivative at `z = 0`. Realized on
//! grids with composite midpoint quadrature over the cube and multilinear
//! interpolation of `h` (constant continuation outside the sampled box),
//! it powers a single-chart lift that prescribes a boundary normal
//! derivative while vanishing on the boundary itself.

use std::io::Write;

use crate::error::{Error, Result};

/// Uniformly sampled scalar field on a box in `R^d` (or a slab, with the
/// last axis starting at 0).
#[derive(Debug, Clone)]
pub struct GridFunction {
    axis_names: Vec<String>,
    origins: Vec<f64>,
    spacings: Vec<f64>,
    dims: Vec<usize>,
    values: Vec<f64>,
}

impl GridFunction {
    /// Build from explicit data; `values` is row-major with the last axis
    /// fastest.
    pub fn new(
        axis_names: Vec<String>,
        origins: Vec<f64>,
        spacings: Vec<f64>,
        dims: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let d = dims.len();
        if d == 0 || d > 3 {
            return Err(Error::domain(format!("expected 1..3 axes, got {d}")));
        }
        if axis_names.len() != d || origins.len() != d || spacings.len() != d {
            return Err(Error::GridMismatch("axis metadata lengths differ".into()));
        }
        if spacings.iter().any(|&h| !(h > 0.0)) {
            return Err(Error::domain("axis spacings must be positive"));
        }
        if dims.iter().any(|&n| n < 2) {
            return Err(Error::domain("each axis needs at least 2 nodes"));
        }
        let total: usize = dims.iter().product();
        if values.len() != total {
            return Err(Error::GridMismatch(format!(
                "expected {total} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("grid values must be finite"));
        }
        Ok(GridFunction {
            axis_names,
            origins,
            spacings,
            dims,
            values,
        })
    }

    /// Sample a function on a uniform 1D grid over `[x0, x1]`.
    pub fn sample_1d(x0: f64, x1: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 || !(x1 > x0) {
            return Err(Error::domain("need n >= 2 nodes and x1 > x0"));
        }
        let h = (x1 - x0) / (n - 1) as f64;
        let values = (0..n).map(|i| f(x0 + h * i as f64)).collect();
        GridFunction::new(vec!["x".into()], vec![x0], vec![h], vec![n], values)
    }

    /// Sample a function on a uniform 2D grid.
    pub fn sample_2d(
        x_range: (f64, f64),
        y_range: (f64, f64),
        nx: usize,
        ny: usize,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        if nx < 2 || ny < 2 || !(x_range.1 > x_range.0) || !(y_range.1 > y_range.0) {
            return Err(Error::domain(
                "need >= 2 nodes per axis and increasing ranges",
            ));
        }
        let hx = (x_range.1 - x_range.0) / (nx - 1) as f64;
        let hy = (y_range.1 - y_range.0) / (ny - 1) as f64;
        let mut values = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                values.push(f(x_range.0 + hx * i as f64, y_range.0 + hy * j as f64));
            }
        }
        GridFunction::new(
            vec!["x".into(), "y".into()],
            vec![x_range.0, y_range.0],
            vec![hx, hy],
            vec![nx, ny],
            values,
        )
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn spacings(&self) -> &[f64] {
        &self.spacings
    }

    pub fn origins(&self) -> &[f64] {
        &self.origins
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn axis_names(&self) -> &[String] {
        &self.axis_names
    }

    /// Node coordinates along axis `i`.
    pub fn axis(&self, i: usize) -> Vec<f64> {
        (0..self.dims[i])
            .map(|k| self.origins[i] + self.spacings[i] * k as f64)
            .collect()
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for (k, &i) in idx.iter().enumerate() {
            flat = flat * self.dims[k] + i;
        }
        flat
    }

    /// Value at a multi-index.
    pub fn at(&self, idx: &[usize]) -> f64 {
        self.values[self.flat_index(idx)]
    }

    /// Multilinear interpolation with constant continuation outside the box
    /// (each coordinate clamps to the sampled range).
    pub fn eval_clamped(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.dim());
        // Per-axis cell index and weight.
        let mut cell = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..self.dim() {
            let t = (point[a] - self.origins[a]) / self.spacings[a];
            let t = t.clamp(0.0, (self.dims[a] - 1) as f64);
            let i = (t.floor() as usize).min(self.dims[a] - 2);
            cell[a] = i;
            frac[a] = t - i as f64;
        }
        match self.dim() {
            1 => {
                let (i, t) = (cell[0], frac[0]);
                self.values[i] * (1.0 - t) + self.values[i + 1] * t
            }
            2 => {
                let (i, j) = (cell[0], cell[1]);
                let (t, u) = (frac[0], frac[1]);
                let v00 = self.at(&[i, j]);
                let v01 = self.at(&[i, j + 1]);
                let v10 = self.at(&[i + 1, j]);
                let v11 = self.at(&[i + 1, j + 1]);
                v00 * (1.0 - t) * (1.0 - u)
                    + v01 * (1.0 - t) * u
                    + v10 * t * (1.0 - u)
                    + v11 * t * u
            }
            _ => unreachable!("interpolation only used for d <= 2"),
        }
    }

    /// Periodic linear interpolation along the (single) axis, for circle
    /// charts: the grid covers one period, node `n` wrapping to node 0.
    pub fn eval_periodic(&self, point: f64) -> f64 {
        debug_assert_eq!(self.dim(), 1);
        let n = self.dims[0];
        let mut t = (point - self.origins[0]) / self.spacings[0];
        t -= (t / n as f64).floor() * n as f64;
        let i = (t.floor() as usize).min(n - 1);
        let frac = t - i as f64;
        let a = self.values[i];
        let b = self.values[(i + 1) % n];
        a * (1.0 - frac) + b * frac
    }

    /// CSV serialization with axis headers, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{},value", self.axis_names.join(","))?;
        let mut idx = vec![0usize; self.dim()];
        loop {
            let coords: Vec<String> = idx
                .iter()
                .enumerate()
                .map(|(a, &i)| format!("{:.16e}", self.origins[a] + self.spacings[a] * i as f64))
                .collect();
            writeln!(w, "{},{:.16e}", coords.join(","), self.at(&idx))?;
            // Odometer increment, last axis fastest.
            let mut a = self.dim();
            loop {
                if a == 0 {
                    return Ok(());
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < self.dims[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
    }
}

/// Extend `h` on `R^d` to the slab `R^d x [0, z_max]` by cube averages:
/// `F(x, z) = z^{1-d} * integral of h over Q(x, z)`, with `F(x, 0) = 0`.
///
/// The cube integral uses composite midpoint quadrature with at least 4
/// subcells per covered grid cell; `h` continues constantly outside its
/// box.
pub fn whitney_extend(h: &GridFunction, z_max: f64, n_z: usize) -> Result<GridFunction> {
    let d = h.dim();
    if d > 2 {
        return Err(Error::domain(format!(
            "extension implemented for 1 or 2 tangential axes, got {d}"
        )));
    }
    if !(z_max > 0.0) || n_z < 2 {
        return Err(Error::domain("need z_max > 0 and n_z >= 2"));
    }
    let dz = z_max / (n_z - 1) as f64;
    let mut axis_names = h.axis_names.clone();
    axis_names.push("z".into());
    let mut origins = h.origins.clone();
    origins.push(0.0);
    let mut spacings = h.spacings.clone();
    spacings.push(dz);
    let mut dims = h.dims.clone();
    dims.push(n_z);

    let min_spacing = h.spacings.iter().cloned().fold(f64::INFINITY, f64::min);
    let base_total: usize = h.dims.iter().product();
    let mut values = vec![0.0; base_total * n_z];

    let mut base_idx = vec![0usize; d];
    for flat_base in 0..base_total {
        // Decode the base multi-index (last axis fastest).
        {
            let mut rem = flat_base;
            for a in (0..d).rev() {
                base_idx[a] = rem % h.dims[a];
                rem /= h.dims[a];
            }
        }
        let x: Vec<f64> = (0..d)
            .map(|a| h.origins[a] + h.spacings[a] * base_idx[a] as f64)
            .collect();
        for k in 1..n_z {
            let z = dz * k as f64;
            // >= 4 midpoint subcells per covered grid cell, floor 8.
            let m = ((4.0 * z / min_spacing).ceil() as usize).max(8);
            let step = z / m as f64;
            let mut integral = 0.0;
            match d {
                1 => {
                    for i in 0..m {
                        let p = x[0] - 0.5 * z + (i as f64 + 0.5) * step;
                        integral += h.eval_clamped(&[p]);
                    }
                    integral *= step;
                }
                2 => {
                    for i in 0..m {
                        let p = x[0] - 0.5 * z + (i as f64 + 0.5) * step;
                        for j in 0..m {
                            let q = x[1] - 0.5 * z + (j as f64 + 0.5) * step;
                            integral += h.eval_clamped(&[p, q]);
                        }
                    }
                    integral *= step * step;
                }
                _ => unreachable!(),
            }
            let prefactor = match d {
                1 => 1.0,
                _ => 1.0 / z,
            };
            values[flat_base * n_z + k] = prefactor * integral;
        }
    }
    GridFunction::new(axis_names, origins, spacings, dims, values)
}

/// One-sided `dF/dz` at `z = 0` compared with `h`: returns the maximum
/// absolute defect over the base grid. First-order accurate in the slab
/// spacing for continuous `h`.
pub fn normal_derivative_check(f_slab: &GridFunction, h: &GridFunction) -> Result<f64> {
    let d = h.dim();
    if f_slab.dim() != d + 1 || f_slab.dims[..d] != h.dims[..] {
        return Err(Error::GridMismatch(
            "slab must extend the base grid by one z axis".into(),
        ));
    }
    let dz = *f_slab.spacings.last().expect("slab has a z axis");
    let n_z = *f_slab.dims.last().expect("slab has a z axis");
    if n_z < 2 {
        return Err(Error::GridMismatch("slab needs at least 2 z levels".into()));
    }
    let base_total: usize = h.dims.iter().product();
    let mut max_defect = 0.0f64;
    for flat in 0..base_total {
        let f0 = f_slab.values[flat * n_z];
        let f1 = f_slab.values[flat * n_z + 1];
        let defect = ((f1 - f0) / dz - h.values[flat]).abs();
        max_defect = max_defect.max(defect);
    }
    Ok(max_defect)
}

/// Quintic cutoff: 1 on `[0, a]`, 0 on `[b, infinity)`, C^2 monotone
/// in between.
fn cutoff(t: f64, a: f64, b: f64) -> f64 {
    if t <= a {
        1.0
    } else if t >= b {
        0.0
    } else {
        let u = (t - a) / (b - a);
        1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
    }
}

/// Lift of a constant boundary value at an interval endpoint (the
/// zero-dimensional chart): `F(t) = g0 * t * cutoff(t)`, vanishing at the
/// endpoint with inward normal derivative `g0`.
pub fn robin_lift_interval(g0: f64, t_max: f64, n_t: usize) -> Result<GridFunction> {
    if !(t_max > 0.0) || n_t < 2 {
        return Err(Error::domain("need t_max > 0 and n_t >= 2"));
    }
    let a = 0.25 * t_max;
    let b = 0.5 * t_max;
    let dt = t_max / (n_t - 1) as f64;
    let values = (0..n_t)
        .map(|k| {
            let t = dt * k as f64;
            g0 * t * cutoff(t, a, b)
        })
        .collect();
    GridFunction::new(vec!["t".into()], vec![0.0], vec![dt], vec![n_t], values)
}

/// Lift of boundary data on a circle chart: `F(theta, t)` vanishes at
/// `t = 0`, has inward normal derivative `g(theta)` there, and is cut off
/// before `t_max/2`. `g` must be sampled over one full period.
pub fn robin_lift_circle(g: &GridFunction, t_max: f64, n_t: usize) -> Result<GridFunction> {
    if g.dim() != 1 {
        return Err(Error::ChartCoverage(
            "circle chart data must be one-dimensional".into(),
        ));
    }
    let period = g.spacings[0] * g.dims[0] as f64;
    if (period - 2.0 * std::f64::consts::PI).abs() > 1e-9 {
        return Err(Error::ChartCoverage(format!(
            "boundary samples must cover one full period (2 pi), got {period}"
        )));
    }
    if !(t_max > 0.0) || n_t < 2 {
        return Err(Error::domain("need t_max > 0 and n_t >= 2"));
    }
    let a = 0.25 * t_max;
    let b = 0.5 * t_max;
    let dt = t_max / (n_t - 1) as f64;
    let n_theta = g.dims[0];
    let mut values = Vec::with_capacity(n_theta * n_t);
    for i in 0..n_theta {
        let theta = g.origins[0] + g.spacings[0] * i as f64;
        for k in 0..n_t {
            let t = dt * k as f64;
            if k == 0 {
                values.push(0.0);
                continue;
            }
            // d = 1 cube average over the periodic boundary.
            let m = ((4.0 * t / g.spacings[0]).ceil() as usize).max(8);
            let step = t / m as f64;
            let mut integral = 0.0;
            for q in 0..m {
                integral += g.eval_periodic(theta - 0.5 * t + (q as f64 + 0.5) * step);
            }
            integral *= step;
            values.push(integral * cutoff(t, a, b));
        }
    }
    GridFunction::new(
        vec!["theta".into(), "t".into()],
        vec![g.origins[0], 0.0],
        vec![g.spacings[0], dt],
        vec![n_theta, n_t],
        values,
    )
}
