//! Surfaces of revolution as quadrature-ready meshes.
//!
//! A profile `(x(s), z(s))` revolves to `(x cos t, x sin t, z)` with Gauss
//! normal `(z' cos t, z' sin t, -x')` and area element `x ds dt`. The mesh
//! carries per-vertex normals, quadrature weights (trapezoid along the
//! profile, uniform in the angle) and the pointwise mean curvature from the
//! profile, which is all the flux integrals of Killing rotation fields
//! need:
//!
//! * `flux_mean_curvature` = integral of `<K, H n>`,
//! * `flux_normal`          = integral of `<K, n>`.
//!
//! Both vanish for free boundary annuli meeting the sphere orthogonally.
//! Translation generators are not Killing fields of the ball (they are not
//! tangent to the unit sphere), so [`KillingField`] carries a rotation
//! generator only.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::profile::ProfileCurve;

/// Triangulated surface of revolution with quadrature data.
#[derive(Debug, Clone)]
pub struct RevolutionMesh {
    /// Profile sample count (rows).
    pub n_s: usize,
    /// Angular sample count (columns).
    pub n_theta: usize,
    /// Vertex positions, s-major, theta-minor.
    pub vertices: Vec<[f64; 3]>,
    /// Unit normals from the Gauss map.
    pub normals: Vec<[f64; 3]>,
    /// Quadrature weights `x(s) ds dtheta` per vertex (half `ds` on the
    /// first and last rows).
    pub weights: Vec<f64>,
    /// Pointwise mean curvature `kappa1 + kappa2`, constant per row.
    pub mean_curvature: Vec<f64>,
    /// Vertex indices of the two boundary circles.
    pub boundary_loops: [Vec<usize>; 2],
}

impl RevolutionMesh {
    /// Total quadrature weight (the surface area).
    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Revolve a profile with `n_theta` uniform angles.
pub fn revolve(profile: &ProfileCurve, n_theta: usize) -> Result<RevolutionMesh> {
    if n_theta < 8 {
        return Err(Error::domain(format!(
            "need at least 8 angular samples, got {n_theta}"
        )));
    }
    let pts = profile.samples();
    if let Some(bad) = pts.iter().find(|p| !(p.x > 0.0)) {
        return Err(Error::domain(format!(
            "degenerate profile: x = {} at s = {}",
            bad.x, bad.s
        )));
    }
    let n_s = pts.len();
    let d_theta = 2.0 * std::f64::consts::PI / n_theta as f64;
    let mut vertices = Vec::with_capacity(n_s * n_theta);
    let mut normals = Vec::with_capacity(n_s * n_theta);
    let mut weights = Vec::with_capacity(n_s * n_theta);
    let mut mean_curvature = Vec::with_capacity(n_s * n_theta);
    for (i, p) in pts.iter().enumerate() {
        // Trapezoid weight in s on a uniform or graded profile grid.
        let ds = if i == 0 {
            0.5 * (pts[1].s - pts[0].s)
        } else if i == n_s - 1 {
            0.5 * (pts[n_s - 1].s - pts[n_s - 2].s)
        } else {
            0.5 * (pts[i + 1].s - pts[i - 1].s)
        };
        let h = p.kappa + p.theta.sin() / p.x;
        let (zd, xd) = (p.theta.sin(), p.theta.cos());
        for k in 0..n_theta {
            let t = k as f64 * d_theta;
            vertices.push([p.x * t.cos(), p.x * t.sin(), p.z]);
            normals.push([zd * t.cos(), zd * t.sin(), -xd]);
            weights.push(p.x * ds * d_theta);
            mean_curvature.push(h);
        }
    }
    let first: Vec<usize> = (0..n_theta).collect();
    let last: Vec<usize> = ((n_s - 1) * n_theta..n_s * n_theta).collect();
    Ok(RevolutionMesh {
        n_s,
        n_theta,
        vertices,
        normals,
        weights,
        mean_curvature,
        boundary_loops: [first, last],
    })
}

/// A Killing field of the ball: `K(x) = A x` with `A` antisymmetric, so the
/// field is tangent to every centered sphere.
#[derive(Debug, Clone, Copy)]
pub struct KillingField {
    generator: [[f64; 3]; 3],
}

impl KillingField {
    /// The rotation generator about `axis` (not necessarily unit).
    pub fn rotation(axis: [f64; 3]) -> Result<Self> {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !(n > 0.0) {
            return Err(Error::domain("rotation axis must be nonzero"));
        }
        let a = [axis[0] / n, axis[1] / n, axis[2] / n];
        Ok(KillingField {
            generator: [[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]],
        })
    }

    /// Build from an explicit antisymmetric generator.
    pub fn from_generator(generator: [[f64; 3]; 3]) -> Result<Self> {
        for (i, row) in generator.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if (v + generator[j][i]).abs() > 1e-14 {
                    return Err(Error::domain("generator must be antisymmetric"));
                }
            }
        }
        Ok(KillingField { generator })
    }

    pub fn generator(&self) -> [[f64; 3]; 3] {
        self.generator
    }

    /// Sum of two generators (the algebra is linear).
    pub fn add(&self, other: &KillingField) -> KillingField {
        let mut generator = self.generator;
        for (row, other_row) in generator.iter_mut().zip(&other.generator) {
            for (v, o) in row.iter_mut().zip(other_row) {
                *v += o;
            }
        }
        KillingField { generator }
    }

    /// Evaluate `K(x) = A x`.
    pub fn apply(&self, x: [f64; 3]) -> [f64; 3] {
        let a = &self.generator;
        [
            a[0][0] * x[0] + a[0][1] * x[1] + a[0][2] * x[2],
            a[1][0] * x[0] + a[1][1] * x[1] + a[1][2] * x[2],
            a[2][0] * x[0] + a[2][1] * x[1] + a[2][2] * x[2],
        ]
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Quadrature of `<K, H n>` over the mesh.
pub fn flux_mean_curvature(mesh: &RevolutionMesh, k: &KillingField) -> f64 {
    mesh.vertices
        .iter()
        .zip(&mesh.normals)
        .zip(mesh.weights.iter().zip(&mesh.mean_curvature))
        .map(|((v, n), (w, h))| w * h * dot(k.apply(*v), *n))
        .sum()
}

/// Quadrature of `<K, n>` over the mesh.
pub fn flux_normal(mesh: &RevolutionMesh, k: &KillingField) -> f64 {
    mesh.vertices
        .iter()
        .zip(&mesh.normals)
        .zip(&mesh.weights)
        .map(|((v, n), w)| w * dot(k.apply(*v), *n))
        .sum()
}

/// One row of a flux report.
#[derive(Debug, Clone)]
pub struct FluxRow {
    pub surface: String,
    pub axis: String,
    pub flux_h: f64,
    pub flux_n: f64,
}

/// CSV serialization `surface,axis,flux_H,flux_n`.
pub fn write_flux_csv<W: Write>(rows: &[FluxRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "surface,axis,flux_H,flux_n")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{:.16e},{:.16e}",
            r.surface, r.axis, r.flux_h, r.flux_n
        )?;
    }
    Ok(())
}

/// Write a Wavefront OBJ mesh: `v`/`vn` lines at 9 significant digits and
/// quad-split triangle faces, s-major theta-minor vertex order, closing
/// around the angle.
pub fn write_obj<W: Write>(mesh: &RevolutionMesh, mut w: W) -> std::io::Result<()> {
    for v in &mesh.vertices {
        writeln!(w, "v {:.8e} {:.8e} {:.8e}", v[0], v[1], v[2])?;
    }
    for n in &mesh.normals {
        writeln!(w, "vn {:.8e} {:.8e} {:.8e}", n[0], n[1], n[2])?;
    }
    let nt = mesh.n_theta;
    for i in 0..mesh.n_s - 1 {
        for k in 0..nt {
            let k1 = (k + 1) % nt;
            // 1-based OBJ indices.
            let a = i * nt + k + 1;
            let b = i * nt + k1 + 1;
            let c = (i + 1) * nt + k1 + 1;
            let d = (i + 1) * nt + k + 1;
            writeln!(w, "f {a}//{a} {b}//{b} {c}//{c}")?;
            writeln!(w, "f {a}//{a} {c}//{c} {d}//{d}")?;
        }
    }
    Ok(())
}

/// Write the mesh to `path`, reporting I/O failures with path context.
pub fn export_obj(mesh: &RevolutionMesh, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    write_obj(mesh, BufWriter::new(file)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delaunay::{annulus_sampled, critical_catenoid};
    use crate::profile::catenoid_profile;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn revolve_critical_catenoid() {
        let cat = critical_catenoid();
        let profile = cat.profile(501).unwrap();
        let mesh = revolve(&profile, 64).unwrap();
        assert_eq!(mesh.vertices.len(), 501 * 64);
        // Unit normals.
        for n in &mesh.normals {
            assert_abs_diff_eq!(dot(*n, *n), 1.0, epsilon = 1e-10);
        }
        // Boundary circles on the unit sphere.
        for &loop_idx in mesh.boundary_loops.iter().flatten() {
            let v = mesh.vertices[loop_idx];
            assert_abs_diff_eq!(dot(v, v).sqrt(), 1.0, epsilon = 1e-6);
        }
        assert!(revolve(&profile, 4).is_err());
    }

    #[test]
    fn area_matches_one_dimensional_quadrature() {
        // Catenoid c = 1 on |s| <= 1: area = 2 pi int sqrt(1+s^2) ds.
        let profile = catenoid_profile(1.0, 1.0, 2001).unwrap();
        let mesh = revolve(&profile, 128).unwrap();
        // Closed form: int_{-1}^{1} sqrt(1+s^2) ds = sqrt(2) + asinh(1).
        let exact = 2.0 * std::f64::consts::PI * (2.0f64.sqrt() + 1.0f64.asinh());
        assert_relative_eq!(mesh.area(), exact, max_relative = 1e-4);
    }

    #[test]
    fn area_quadrature_is_second_order() {
        let exact = 2.0 * std::f64::consts::PI * (2.0f64.sqrt() + 1.0f64.asinh());
        let err_at = |n_s: usize| {
            let profile = catenoid_profile(1.0, 1.0, n_s).unwrap();
            (revolve(&profile, 16).unwrap().area() - exact).abs()
        };
        let coarse = err_at(51);
        let fine = err_at(101);
        let order = (coarse / fine).log2();
        assert!(order > 1.9, "observed order {order} ({coarse} -> {fine})");
    }

    #[test]
    fn axial_rotation_flux_is_pointwise_zero() {
        let cat = critical_catenoid();
        let mesh = revolve(&cat.profile(301).unwrap(), 32).unwrap();
        let kz = KillingField::rotation([0.0, 0.0, 1.0]).unwrap();
        // The integrand vanishes pointwise, not just in the sum.
        for (v, n) in mesh.vertices.iter().zip(&mesh.normals) {
            assert_abs_diff_eq!(dot(kz.apply(*v), *n), 0.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(flux_normal(&mesh, &kz), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn orthogonal_rotation_fluxes_vanish() {
        let cat = critical_catenoid();
        let mesh = revolve(&cat.profile(801).unwrap(), 64).unwrap();
        let kx = KillingField::rotation([1.0, 0.0, 0.0]).unwrap();
        assert!(flux_mean_curvature(&mesh, &kx).abs() < 1e-8);
        assert!(flux_normal(&mesh, &kx).abs() < 1e-8);
        let ann = annulus_sampled(0.9, 801).unwrap();
        let mesh = revolve(&ann.profile, 64).unwrap();
        for axis in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]] {
            let k = KillingField::rotation(axis).unwrap();
            assert!(flux_mean_curvature(&mesh, &k).abs() < 1e-5);
            assert!(flux_normal(&mesh, &k).abs() < 1e-5);
        }
    }

    #[test]
    fn flux_is_linear_in_the_generator() {
        let ann = annulus_sampled(1.1, 401).unwrap();
        let mesh = revolve(&ann.profile, 32).unwrap();
        let ka = KillingField::rotation([1.0, 0.0, 0.0]).unwrap();
        let kb = KillingField::rotation([0.0, 1.0, 0.0]).unwrap();
        let sum = ka.add(&kb);
        assert_abs_diff_eq!(
            flux_normal(&mesh, &sum),
            flux_normal(&mesh, &ka) + flux_normal(&mesh, &kb),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            flux_mean_curvature(&mesh, &sum),
            flux_mean_curvature(&mesh, &ka) + flux_mean_curvature(&mesh, &kb),
            epsilon = 1e-12
        );
    }

    #[test]
    fn generator_must_be_antisymmetric() {
        assert!(
            KillingField::from_generator([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
                .is_ok()
        );
        assert!(
            KillingField::from_generator([[0.1, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
                .is_err()
        );
        // Tangency to centered spheres: <A x, x> = 0.
        let k = KillingField::rotation([0.3, -1.2, 0.7]).unwrap();
        for x in [[1.0, 0.0, 0.0], [0.2, -0.5, 0.9], [0.0, 2.0, 1.0]] {
            assert_abs_diff_eq!(dot(k.apply(x), x), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn obj_round_trip() {
        let cat = critical_catenoid();
        let profile = cat.profile(21).unwrap();
        let mesh = revolve(&profile, 12).unwrap();
        let mut buf = Vec::new();
        write_obj(&mesh, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let v_lines: Vec<&str> = text.lines().filter(|l| l.starts_with("v ")).collect();
        let f_lines: Vec<&str> = text.lines().filter(|l| l.starts_with("f ")).collect();
        assert_eq!(v_lines.len(), 21 * 12);
        assert_eq!(f_lines.len(), 2 * 20 * 12);
        // Vertices reproduce at 9 significant digits.
        for (line, v) in v_lines.iter().zip(&mesh.vertices) {
            let parts: Vec<f64> = line[2..]
                .split_whitespace()
                .map(|t| t.parse().unwrap())
                .collect();
            for (a, b) in parts.iter().zip(v) {
                assert_relative_eq!(a, b, max_relative = 1e-8, epsilon = 1e-8);
            }
        }
        // Face indices are within range.
        for line in f_lines {
            for tok in line[2..].split_whitespace() {
                let idx: usize = tok.split("//").next().unwrap().parse().unwrap();
                assert!(idx >= 1 && idx <= mesh.vertices.len());
            }
        }
    }
}
