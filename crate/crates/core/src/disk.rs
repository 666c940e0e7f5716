//! The flat equatorial disk in the unit ball.
//!
//! Jacobi fields of the flat disk are harmonic functions with the Robin
//! condition `d psi / d nu = psi` on the boundary circle; the kernel is
//! spanned by the coordinate functions, so the nullity equals the disk
//! dimension. The foliation solution of `laplacian(psi) = 1` (sign
//! convention: sum of second derivatives, so the explicit formula verifies
//! verbatim) is `psi = (|x|^2 + 1)/(2 n)`, radial and strictly positive.
//!
//! Grids: a polar tensor grid for the two-dimensional disk, and radial
//! grids (including the center) for rotationally invariant claims in any
//! dimension.

use std::io::Write;

use crate::error::{Error, Result};
use crate::foliation::solve_tridiagonal;

/// Sample grid over the unit disk: polar (dimension 2) or radial
/// (any dimension, rotationally invariant data only).
#[derive(Debug, Clone)]
pub struct DiskGrid {
    n: u32,
    r: Vec<f64>,
    theta: Vec<f64>,
    spacing: f64,
}

impl DiskGrid {
    /// Polar tensor grid for the 2-disk: radii `h, 2h, ..., 1` and `n_theta`
    /// uniform angles. The center is excluded (the polar chart is singular
    /// there).
    pub fn polar(n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r < 4 || n_theta < 4 {
            return Err(Error::domain(format!(
                "polar grid needs at least 4 x 4 nodes, got {n_r} x {n_theta}"
            )));
        }
        let h = 1.0 / n_r as f64;
        Ok(DiskGrid {
            n: 2,
            r: (1..=n_r).map(|j| j as f64 * h).collect(),
            theta: (0..n_theta)
                .map(|k| 2.0 * std::f64::consts::PI * k as f64 / n_theta as f64)
                .collect(),
            spacing: h,
        })
    }

    /// Radial grid `0, h, ..., 1` for the `n`-disk.
    pub fn radial(n: u32, n_r: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!(
                "disk dimension must be >= 2, got {n}"
            )));
        }
        if n_r < 4 {
            return Err(Error::domain(format!(
                "radial grid needs >= 4 intervals, got {n_r}"
            )));
        }
        let h = 1.0 / n_r as f64;
        Ok(DiskGrid {
            n,
            r: (0..=n_r).map(|j| j as f64 * h).collect(),
            theta: Vec::new(),
            spacing: h,
        })
    }

    pub fn dimension(&self) -> u32 {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn is_polar(&self) -> bool {
        !self.theta.is_empty()
    }

    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    /// Node count: radial nodes times angular nodes (or radial nodes alone).
    pub fn len(&self) -> usize {
        if self.is_polar() {
            self.r.len() * self.theta.len()
        } else {
            self.r.len()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flattened index of polar node `(j, k)`; r-major, theta-minor.
    pub fn index(&self, j: usize, k: usize) -> usize {
        j * self.theta.len() + k
    }

    /// Sample a function of Cartesian coordinates on the grid.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        if self.is_polar() {
            let mut out = Vec::with_capacity(self.len());
            for &r in &self.r {
                for &t in &self.theta {
                    out.push(f(r * t.cos(), r * t.sin()));
                }
            }
            out
        } else {
            self.r.iter().map(|&r| f(r, 0.0)).collect()
        }
    }

    /// CSV serialization of sampled values: `r,theta,value` (polar) or
    /// `r,value` (radial), 17 significant digits.
    pub fn write_csv<W: Write>(&self, values: &[f64], mut w: W) -> std::io::Result<()> {
        if self.is_polar() {
            writeln!(w, "r,theta,value")?;
            for (j, &r) in self.r.iter().enumerate() {
                for (k, &t) in self.theta.iter().enumerate() {
                    writeln!(w, "{:.16e},{:.16e},{:.16e}", r, t, values[self.index(j, k)])?;
                }
            }
        } else {
            writeln!(w, "r,value")?;
            for (j, &r) in self.r.iter().enumerate() {
                writeln!(w, "{:.16e},{:.16e}", r, values[j])?;
            }
        }
        Ok(())
    }
}

/// The Robin kernel basis on the polar 2-disk grid: the coordinate
/// functions `x_1 = r cos(theta)`, `x_2 = r sin(theta)`.
pub fn disk_kernel_basis(grid: &DiskGrid) -> Result<Vec<Vec<f64>>> {
    if !grid.is_polar() {
        return Err(Error::domain(
            "the kernel basis needs the polar 2-disk grid; radial grids carry only rotationally invariant data",
        ));
    }
    Ok(vec![grid.sample(|x, _| x), grid.sample(|_, y| y)])
}

/// Discretized interior residual and boundary Robin defect of a sampled
/// function.
#[derive(Debug, Clone)]
pub struct RobinDefect {
    /// Sum of second derivatives at interior nodes where the stencil fits
    /// (radial index 1..m-2 on polar grids, 1..m-1 on radial grids).
    pub interior: Vec<f64>,
    /// `d psi / d nu - psi` at each boundary node.
    pub boundary: Vec<f64>,
}

impl RobinDefect {
    pub fn max_interior_abs(&self) -> f64 {
        self.interior.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn max_boundary_abs(&self) -> f64 {
        self.boundary.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Interior Laplacian (sum-of-second-derivatives sign) and boundary Robin
/// defect of `psi` sampled on `grid`, by second-order differences with a
/// one-sided radial derivative at the boundary.
pub fn robin_defect(grid: &DiskGrid, psi: &[f64]) -> Result<RobinDefect> {
    if psi.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "expected {} samples, got {}",
            grid.len(),
            psi.len()
        )));
    }
    let h = grid.spacing;
    let m = grid.r.len();
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    if grid.is_polar() {
        let kk = grid.theta.len();
        let ht = 2.0 * std::f64::consts::PI / kk as f64;
        for j in 1..m - 1 {
            let r = grid.r[j];
            for k in 0..kk {
                let c = psi[grid.index(j, k)];
                let rp = psi[grid.index(j + 1, k)];
                let rm = psi[grid.index(j - 1, k)];
                let tp = psi[grid.index(j, (k + 1) % kk)];
                let tm = psi[grid.index(j, (k + kk - 1) % kk)];
                let d_rr = (rp - 2.0 * c + rm) / (h * h);
                let d_r = (rp - rm) / (2.0 * h);
                let d_tt = (tp - 2.0 * c + tm) / (ht * ht);
                interior.push(d_rr + d_r / r + d_tt / (r * r));
            }
        }
        for k in 0..kk {
            let b = psi[grid.index(m - 1, k)];
            let dn =
                (3.0 * b - 4.0 * psi[grid.index(m - 2, k)] + psi[grid.index(m - 3, k)]) / (2.0 * h);
            boundary.push(dn - b);
        }
    } else {
        let nf = grid.n as f64;
        for j in 1..m - 1 {
            let r = grid.r[j];
            let d_rr = (psi[j + 1] - 2.0 * psi[j] + psi[j - 1]) / (h * h);
            let d_r = (psi[j + 1] - psi[j - 1]) / (2.0 * h);
            interior.push(d_rr + (nf - 1.0) * d_r / r);
        }
        let b = psi[m - 1];
        let dn = (3.0 * b - 4.0 * psi[m - 2] + psi[m - 3]) / (2.0 * h);
        boundary.push(dn - b);
    }
    Ok(RobinDefect { interior, boundary })
}

/// The foliation solution `psi(x) = (|x|^2 + 1) / (2 n)`: it satisfies
/// `sum of second derivatives = 1` and the Robin condition exactly, and is
/// strictly positive with minimum `1/(2n)`.
pub fn disk_foliation_solution(grid: &DiskGrid) -> Vec<f64> {
    let two_n = 2.0 * grid.n as f64;
    if grid.is_polar() {
        grid.sample(move |x, y| (x * x + y * y + 1.0) / two_n)
    } else {
        grid.r.iter().map(|&r| (r * r + 1.0) / two_n).collect()
    }
}

/// Direct second-order solve of the radial foliation problem
/// `u'' + (n-1)/r u' = 1`, `u'(0) = 0`, `u'(1) = u(1)` on a radial grid.
/// The discrete solution is unique precisely because the homogeneous Robin
/// problem has no radial kernel.
pub fn radial_foliation_solve(grid: &DiskGrid) -> Result<Vec<f64>> {
    if grid.is_polar() {
        return Err(Error::domain("radial solve needs a radial grid"));
    }
    let m = grid.r.len();
    let h = grid.spacing;
    let nf = grid.n as f64;
    let h2 = h * h;
    let mut sub = vec![0.0; m - 1];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m - 1];
    let mut rhs = vec![1.0; m];
    // r = 0: symmetry gives u'(0) = 0 and the operator limit n u''(0);
    // with a ghost node u_{-1} = u_1 this closes to 2n (u_1 - u_0)/h^2.
    diag[0] = -2.0 * nf / h2;
    sup[0] = 2.0 * nf / h2;
    for j in 1..m - 1 {
        let r = grid.r[j];
        sub[j - 1] = 1.0 / h2 - (nf - 1.0) / (2.0 * h * r);
        diag[j] = -2.0 / h2;
        sup[j] = 1.0 / h2 + (nf - 1.0) / (2.0 * h * r);
    }
    // r = 1: Robin ghost u_m = u_{m-2} + 2 h u_{m-1}.
    let a = 1.0 / h2 - (nf - 1.0) / (2.0 * h);
    let b = 1.0 / h2 + (nf - 1.0) / (2.0 * h);
    sub[m - 2] = a + b;
    diag[m - 1] = -2.0 / h2 + 2.0 * h * b;
    solve_tridiagonal(&sub, &mut diag, &sup, &mut rhs)
}

/// Robin defect `u'(1) - u(1)` of the regular solution of the homogeneous
/// radial problem `u'' + (n-1)/r u' - mu/r^2 u = 0`, where
/// `mu = m (m + n - 2)` is the degree-`m` spherical-harmonic eigenvalue.
/// The regular solution is `r^m`, so the defect is `m - 1`: only degree 1
/// meets the Robin condition.
pub fn radial_mode_robin_defect(n: u32, mode: u32, n_steps: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("dimension must be >= 2, got {n}")));
    }
    let nf = n as f64;
    let mu = (mode * (mode + n - 2)) as f64;
    let h = 1.0 / n_steps as f64;
    // Start just off the center with the regular-branch data u = r^m.
    let r0 = h;
    let mut r = r0;
    let mut y = [r0.powi(mode as i32), mode as f64 * r0.powi(mode as i32 - 1)];
    let rhs = |r: f64, y: [f64; 2]| [y[1], -(nf - 1.0) / r * y[1] + mu / (r * r) * y[0]];
    for _ in 0..n_steps - 1 {
        let k1 = rhs(r, y);
        let k2 = rhs(
            r + 0.5 * h,
            [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]],
        );
        let k3 = rhs(
            r + 0.5 * h,
            [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]],
        );
        let k4 = rhs(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        y = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        r += h;
    }
    Ok(y[1] - y[0])
}

/// Dimension of the degree-`m` spherical harmonics on the boundary of the
/// `n`-disk (the angular multiplicity of radial mode `m`).
pub fn harmonic_multiplicity(n: u32, mode: u32) -> u32 {
    if mode == 0 {
        return 1;
    }
    if n == 2 {
        return 2;
    }
    let binom = |top: u32, k: u32| -> u64 {
        let mut acc = 1u64;
        for i in 0..k {
            acc = acc * (top - i) as u64 / (i + 1) as u64;
        }
        acc
    };
    let a = binom(n + mode - 1, mode);
    let b = if mode >= 2 {
        binom(n + mode - 3, mode - 2)
    } else {
        0
    };
    (a - b) as u32
}

/// One radial mode's contribution to the disk nullity.
#[derive(Debug, Clone, Copy)]
pub struct DiskModeNullity {
    pub mode: u32,
    pub kernel_dim: u32,
    pub defect: f64,
}

/// Nullity of the flat `n`-disk by radial-mode shooting over degrees
/// `0..=m_max`. The kernel sits at degree 1 with multiplicity `n`.
pub fn disk_nullity(n: u32, m_max: u32, n_steps: usize) -> Result<(Vec<DiskModeNullity>, u32)> {
    let mut modes = Vec::new();
    let mut total = 0;
    for m in 0..=m_max {
        let defect = radial_mode_robin_defect(n, m, n_steps)?;
        let defect_fine = radial_mode_robin_defect(n, m, 2 * n_steps)?;
        let kernel_dim = if defect.abs() < 1e-6 && defect_fine.abs() < 1e-6 {
            harmonic_multiplicity(n, m)
        } else {
            0
        };
        total += kernel_dim;
        modes.push(DiskModeNullity {
            mode: m,
            kernel_dim,
            defect,
        });
    }
    Ok((modes, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn kernel_basis_has_dimension_two() {
        let grid = DiskGrid::polar(64, 64).unwrap();
        let basis = disk_kernel_basis(&grid).unwrap();
        assert_eq!(basis.len(), 2);
        for f in &basis {
            let d = robin_defect(&grid, f).unwrap();
            // Robin-exact on the boundary (linear in r).
            assert!(d.max_boundary_abs() < 1e-10, "{}", d.max_boundary_abs());
        }
        // Interior residual: the angular truncation carries a 1/r factor,
        // so second-order convergence holds away from the center.
        let residual_away = |n_r: usize| {
            let grid = DiskGrid::polar(n_r, n_r).unwrap();
            let f = grid.sample(|x, _| x);
            let d = robin_defect(&grid, &f).unwrap();
            let kk = grid.angles().len();
            let mut worst = 0.0f64;
            for j in 1..grid.radii().len() - 1 {
                if grid.radii()[j] < 0.25 {
                    continue;
                }
                for k in 0..kk {
                    worst = worst.max(d.interior[(j - 1) * kk + k].abs());
                }
            }
            worst
        };
        let coarse = residual_away(32);
        let fine = residual_away(64);
        assert!((coarse / fine).log2() > 1.8, "{coarse} -> {fine}");
        assert!(disk_kernel_basis(&DiskGrid::radial(2, 16).unwrap()).is_err());
    }

    #[test]
    fn robin_defect_zero_and_quadratic() {
        let grid = DiskGrid::polar(32, 48).unwrap();
        let zeros = vec![0.0; grid.len()];
        let d = robin_defect(&grid, &zeros).unwrap();
        assert_eq!(d.max_interior_abs(), 0.0);
        assert_eq!(d.max_boundary_abs(), 0.0);
        // |x|^2 has Laplacian 2n = 4.
        let sq = grid.sample(|x, y| x * x + y * y);
        let d = robin_defect(&grid, &sq).unwrap();
        for v in &d.interior {
            assert_relative_eq!(*v, 4.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn laplacian_stencil_is_second_order() {
        // Order study on a nontrivial harmonic function r^3 cos(3 theta).
        let residual_at = |n_r: usize| {
            let grid = DiskGrid::polar(n_r, 4 * n_r).unwrap();
            let f = grid.sample(|x, y| {
                let r = x.hypot(y);
                let t = y.atan2(x);
                r.powi(3) * (3.0 * t).cos()
            });
            robin_defect(&grid, &f).unwrap().max_interior_abs()
        };
        let c = residual_at(16);
        let f = residual_at(32);
        let order = (c / f).log2();
        assert!(order > 1.8, "observed order {order} ({c} -> {f})");
    }

    #[test]
    fn foliation_solution_on_radial_grid() {
        let grid = DiskGrid::radial(2, 64).unwrap();
        let psi = disk_foliation_solution(&grid);
        assert_eq!(psi[0], 0.25);
        assert_eq!(psi[64], 0.5);
        // Interior equation. The formula is quadratic so the second-order
        // stencil evaluates it exactly.
        let d = robin_defect(&grid, &psi).unwrap();
        for v in &d.interior {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-11);
        }
        // Radial Robin condition holds exactly (the one-sided second-order
        // stencil is exact on quadratics).
        assert!(d.max_boundary_abs() < 1e-13);
        // Strict positivity with minimum 1/(2n) at the center.
        let min = psi.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(min, 0.25);
        assert!(min > 0.0);
    }

    #[test]
    fn foliation_solution_positive_in_higher_dimension() {
        for n in 2..=5u32 {
            let grid = DiskGrid::radial(n, 32).unwrap();
            let psi = disk_foliation_solution(&grid);
            let min = psi.iter().cloned().fold(f64::INFINITY, f64::min);
            assert_eq!(min, 1.0 / (2.0 * n as f64));
        }
    }

    #[test]
    fn radial_solve_reproduces_foliation_solution() {
        for n in 2..=4u32 {
            let grid = DiskGrid::radial(n, 128).unwrap();
            let u = radial_foliation_solve(&grid).unwrap();
            let psi = disk_foliation_solution(&grid);
            for (a, b) in u.iter().zip(&psi) {
                assert_abs_diff_eq!(*a, *b, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn no_radial_kernel() {
        // The regular radial harmonic is constant; its Robin defect is -1.
        for n in 2..=4u32 {
            let d = radial_mode_robin_defect(n, 0, 512).unwrap();
            assert_abs_diff_eq!(d, -1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn disk_nullity_equals_dimension() {
        for n in 2..=4u32 {
            let (modes, total) = disk_nullity(n, 4, 512).unwrap();
            assert_eq!(total, n, "dimension {n}");
            for row in &modes {
                if row.mode == 1 {
                    assert_eq!(row.kernel_dim, n);
                    assert!(row.defect.abs() < 1e-8);
                } else {
                    assert_eq!(row.kernel_dim, 0);
                    assert!(
                        row.defect.abs() > 0.5,
                        "mode {} defect {}",
                        row.mode,
                        row.defect
                    );
                }
            }
        }
    }

    #[test]
    fn harmonic_multiplicities() {
        assert_eq!(harmonic_multiplicity(2, 0), 1);
        assert_eq!(harmonic_multiplicity(2, 3), 2);
        assert_eq!(harmonic_multiplicity(3, 1), 3);
        assert_eq!(harmonic_multiplicity(3, 2), 5);
        assert_eq!(harmonic_multiplicity(4, 1), 4);
    }

    #[test]
    fn csv_round_trip_shape() {
        let grid = DiskGrid::radial(2, 8).unwrap();
        let psi = disk_foliation_solution(&grid);
        let mut buf = Vec::new();
        grid.write_csv(&psi, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("r,value\n"));
        assert_eq!(text.lines().count(), 10);
    }
}
