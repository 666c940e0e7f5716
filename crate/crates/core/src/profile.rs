//! Planar generatrices of CMC surfaces of revolution.
//!
//! A Delaunay generatrix is the roulette of a conic: the path traced by a
//! focus as the conic rolls without slipping along a line. This module
//! builds those curves two independent ways (the rolling construction in
//! complex arithmetic, and the tangent-angle profile ODE
//! `x' = cos(theta), z' = sin(theta), theta' = h - sin(theta)/x`), and
//! provides the support function `q = x z' - z x'` whose zero marks
//! orthogonal contact with a sphere centered at the origin.
//!
//! Conventions: the profile plane has the rotation axis as the z-axis and
//! abscissa `x > 0`; profiles are parametrized by arclength with tangent
//! angle `theta` measured from the +x direction, so the profile curvature
//! is `kappa1 = theta'` and the rotational principal curvature is
//! `kappa2 = sin(theta)/x`. With this normal choice the catenary profile
//! of parameter `c` has `kappa1 = -c/(c^2+s^2)` and the signed mean
//! curvature of the roulette of a conic `(e, p)` is `(1-e^2)/(e p)`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::ode::Dopri5;
use crate::rootfind::{bisect, bracket_first_sign_change};

/// Classification of a conic (and of the Delaunay surface it generates).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConicClass {
    /// Ellipse, `0 < e < 1`.
    Unduloid,
    /// Parabola, `e = 1`.
    Catenoid,
    /// Hyperbola, `e > 1`.
    Nodoid,
}

/// A conic with eccentricity `e > 0` and focal parameter `p > 0`, one focus
/// at the origin: `r(theta) = e p / (1 + e cos(theta))`.
///
/// The circle (`e = 0`) and the sphere limit (`e -> infinity`) are excluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conic {
    e: f64,
    p: f64,
}

impl Conic {
    pub fn new(e: f64, p: f64) -> Result<Self> {
        if !(e > 0.0) || !e.is_finite() {
            return Err(Error::domain(format!("eccentricity must be > 0, got {e}")));
        }
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::domain(format!(
                "focal parameter must be > 0, got {p}"
            )));
        }
        Ok(Conic { e, p })
    }

    pub fn eccentricity(&self) -> f64 {
        self.e
    }

    pub fn focal_parameter(&self) -> f64 {
        self.p
    }

    /// Exact comparison on the stored eccentricity.
    pub fn classify(&self) -> ConicClass {
        if self.e < 1.0 {
            ConicClass::Unduloid
        } else if self.e == 1.0 {
            ConicClass::Catenoid
        } else {
            ConicClass::Nodoid
        }
    }

    /// Semi-latus rectum `e p`; also the radius of curvature at the vertex.
    pub fn semi_latus_rectum(&self) -> f64 {
        self.e * self.p
    }

    /// Focus-to-vertex distance `e p / (1 + e)`.
    pub fn vertex_radius(&self) -> f64 {
        self.e * self.p / (1.0 + self.e)
    }

    /// Largest polar half-angle of the traversed branch.
    ///
    /// The branch through the vertex `theta = 0` is the one nearest the
    /// focus at the origin; for hyperbolas it ends at the asymptote angle
    /// `acos(-1/e)`.
    pub fn max_polar_angle(&self) -> f64 {
        if self.e > 1.0 {
            (-1.0 / self.e).acos()
        } else {
            std::f64::consts::PI
        }
    }

    /// Polar radius `r(theta) = e p / (1 + e cos(theta))`.
    pub fn polar_radius(&self, theta: f64) -> Result<f64> {
        let denom = 1.0 + self.e * theta.cos();
        if denom <= 0.0 {
            return Err(Error::Branch(format!(
                "angle {theta} is beyond the branch (1 + e cos(theta) = {denom} <= 0)"
            )));
        }
        Ok(self.e * self.p / denom)
    }

    /// `(r, dr/dtheta, d^2r/dtheta^2)` at `theta`, assuming `theta` is on
    /// the branch.
    fn polar_derivs(&self, theta: f64) -> (f64, f64, f64) {
        let (e, l) = (self.e, self.semi_latus_rectum());
        let c = theta.cos();
        let s = theta.sin();
        let d = 1.0 + e * c;
        let r = l / d;
        let dr = l * e * s / (d * d);
        let ddr = l * e * (c * d + 2.0 * e * s * s) / (d * d * d);
        (r, dr, ddr)
    }

    /// Arclength speed `|d beta / d theta| = sqrt(r^2 + r'^2)`.
    fn polar_speed(&self, theta: f64) -> f64 {
        let (r, dr, _) = self.polar_derivs(theta);
        r.hypot(dr)
    }

    /// Signed curvature of the conic at polar angle `theta` (positive: the
    /// branch turns counterclockwise as `theta` increases).
    pub fn curvature(&self, theta: f64) -> f64 {
        let (r, dr, ddr) = self.polar_derivs(theta);
        (r * r + 2.0 * dr * dr - r * ddr) / (r * r + dr * dr).powf(1.5)
    }

    /// Arclength along the branch from the vertex to polar angle `theta`.
    pub fn arclength_of_angle(&self, theta: f64) -> f64 {
        adaptive_simpson(&|t| self.polar_speed(t), 0.0, theta, 1e-13)
    }

    /// Invert the arclength function on the branch: the polar angle at
    /// signed arclength `s` from the vertex.
    pub fn angle_of_arclength(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(0.0);
        }
        let sign = s.signum();
        let target = s.abs();
        let theta_max = self.max_polar_angle();
        // Bracket [lo, hi] with arc(lo) < target <= arc(hi). For ellipses the
        // rolling range is capped at one full revolution; parabola and
        // hyperbola branches have infinite length.
        let mut lo = 0.0;
        let mut arc_lo = 0.0;
        let mut hi = f64::NAN;
        if self.e < 1.0 {
            let full = self.arclength_of_angle(2.0 * std::f64::consts::PI);
            if target > full {
                return Err(Error::Range(format!(
                    "arclength {s} exceeds one revolution of the conic ({full})"
                )));
            }
            hi = 2.0 * std::f64::consts::PI;
        } else {
            for k in 1..200 {
                let cand = theta_max * (1.0 - 0.5f64.powi(k)).max(0.0);
                let a = self.arclength_of_angle(cand);
                if a >= target {
                    hi = cand;
                    break;
                }
                lo = cand;
                arc_lo = a;
            }
            if hi.is_nan() {
                return Err(Error::Range(format!(
                    "arclength {s} too close to the asymptote to invert"
                )));
            }
        }
        // Newton on arc(theta) - target with bisection safeguard.
        let mut theta = if lo == 0.0 { 0.5 * (lo + hi) } else { lo };
        let mut arc = arc_lo + adaptive_simpson(&|t| self.polar_speed(t), lo, theta, 1e-13);
        for _ in 0..100 {
            let diff = arc - target;
            if diff.abs() <= 1e-13 * target.max(1.0) {
                break;
            }
            if diff > 0.0 {
                hi = theta;
            } else {
                lo = theta;
            }
            let mut next = theta - diff / self.polar_speed(theta);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            arc += adaptive_simpson(&|t| self.polar_speed(t), theta, next, 1e-13);
            theta = next;
            if hi - lo < 1e-15 {
                break;
            }
        }
        Ok(sign * theta)
    }
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth > 50 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth + 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth + 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 0)
}

#[derive(Debug, Clone, Copy)]
struct Cx {
    re: f64,
    im: f64,
}

impl Cx {
    fn new(re: f64, im: f64) -> Self {
        Cx { re, im }
    }
    fn mul(self, o: Cx) -> Cx {
        Cx::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
    fn sub(self, o: Cx) -> Cx {
        Cx::new(self.re - o.re, self.im - o.im)
    }
}

/// The catenary abscissa `x = c cosh(z / c)`.
pub fn catenary(c: f64, z: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::domain(format!(
            "catenary parameter must be > 0, got {c}"
        )));
    }
    Ok(c * (z / c).cosh())
}

/// Unit-speed point of the conic branch at signed arclength `s` from the
/// vertex, in the conic's plane (focus at the origin).
pub fn conic_arclength(conic: &Conic, s: f64) -> Result<(f64, f64)> {
    let theta = conic.angle_of_arclength(s)?;
    let r = conic.polar_radius(theta)?;
    Ok((r * theta.cos(), r * theta.sin()))
}

/// One sample of the roulette in profile-plane coordinates (rolling line as
/// the z-axis), together with its analytic differential geometry.
#[derive(Debug, Clone, Copy)]
pub struct RouletteSample {
    /// Rolling parameter: arclength along the conic (equals arclength along
    /// the line).
    pub s_roll: f64,
    /// Distance from the traced focus to the rolling line.
    pub x: f64,
    /// Height of the traced focus along the rolling line.
    pub z: f64,
    /// Tangent angle of the roulette in the profile plane.
    pub theta: f64,
    /// Profile curvature of the roulette (d theta / d sigma).
    pub kappa1: f64,
    /// Rotational principal curvature `sin(theta)/x`.
    pub kappa2: f64,
    /// Speed of the roulette with respect to the rolling parameter,
    /// `d sigma / d s_roll = kappa_conic * r`.
    pub speed: f64,
}

impl RouletteSample {
    /// Signed pointwise mean curvature `kappa1 + kappa2`.
    pub fn mean_curvature(&self) -> f64 {
        self.kappa1 + self.kappa2
    }
}

/// Focus position of the rolling conic at rolling arclength `s`, in
/// profile-plane coordinates `(x, z)`.
///
/// The roulette is evaluated as `gamma(s) = l(s) - (l'(s)/beta'(s)) beta(s)`
/// with `gamma(0) = 0` at the rolling focus and `l(s) = e p/(1+e) + i s`,
/// then translated so the rolling line becomes the z-axis.
pub fn roulette(conic: &Conic, s: f64) -> Result<(f64, f64)> {
    let g = roulette_geometry(conic, s)?;
    Ok((g.x, g.z))
}

/// Roulette point plus tangent angle, curvatures and rolling speed, all from
/// closed-form conic geometry (the only numerical step is the arclength
/// inversion).
pub fn roulette_geometry(conic: &Conic, s: f64) -> Result<RouletteSample> {
    let theta_p = conic.angle_of_arclength(s)?;
    let (r, dr, _) = conic.polar_derivs(theta_p);
    let speed_conic = r.hypot(dr);
    // Conic tangent angle: beta'(theta) = (r' + i r) e^{i theta}.
    let phi = theta_p + r.atan2(dr);
    let q_v = conic.vertex_radius();
    let beta = Cx::new(r * theta_p.cos(), r * theta_p.sin());
    let e_mphi = Cx::new(phi.cos(), -phi.sin());
    // gamma = q_v + i s - i e^{-i phi} beta
    let rot = Cx::new(0.0, 1.0).mul(e_mphi).mul(beta);
    let gamma = Cx::new(q_v, s).sub(rot);
    let x = q_v - gamma.re;
    let z = gamma.im;
    let kappa_conic = conic.curvature(theta_p);
    let theta = phi - theta_p;
    let speed = kappa_conic * r;
    let kappa1 = (kappa_conic - 1.0 / speed_conic) / speed;
    let kappa2 = theta.sin() / x;
    Ok(RouletteSample {
        s_roll: s,
        x,
        z,
        theta,
        kappa1,
        kappa2,
        speed,
    })
}

/// One arclength sample of a planar generatrix.
#[derive(Debug, Clone, Copy)]
pub struct ProfileSample {
    /// Arclength parameter.
    pub s: f64,
    /// Abscissa (distance to the rotation axis), positive.
    pub x: f64,
    /// Ordinate along the rotation axis.
    pub z: f64,
    /// Tangent angle: `(dx/ds, dz/ds) = (cos theta, sin theta)`.
    pub theta: f64,
    /// Signed profile curvature `d theta / d s`.
    pub kappa: f64,
}

/// A unit-speed sampled planar generatrix.
#[derive(Debug, Clone)]
pub struct ProfileCurve {
    samples: Vec<ProfileSample>,
    half_length: f64,
}

impl ProfileCurve {
    /// Build from samples, validating positivity of `x` and monotone `s`.
    pub fn from_samples(samples: Vec<ProfileSample>) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::domain("a profile needs at least 3 samples"));
        }
        for w in samples.windows(2) {
            if w[1].s <= w[0].s {
                return Err(Error::domain("profile samples must have increasing s"));
            }
        }
        if let Some(bad) = samples.iter().find(|p| !(p.x > 0.0)) {
            return Err(Error::domain(format!(
                "profile touches the axis: x = {} at s = {}",
                bad.x, bad.s
            )));
        }
        let half_length = samples[0].s.abs().max(samples[samples.len() - 1].s.abs());
        Ok(ProfileCurve {
            samples,
            half_length,
        })
    }

    pub fn samples(&self) -> &[ProfileSample] {
        &self.samples
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn s_min(&self) -> f64 {
        self.samples[0].s
    }

    pub fn s_max(&self) -> f64 {
        self.samples[self.samples.len() - 1].s
    }

    /// Cubic Hermite evaluation between samples (x' = cos theta,
    /// z' = sin theta, theta' = kappa; kappa interpolated linearly).
    pub fn eval(&self, s: f64) -> Result<ProfileSample> {
        let n = self.samples.len();
        if s < self.s_min() - 1e-12 || s > self.s_max() + 1e-12 {
            return Err(Error::Range(format!(
                "s = {s} outside profile domain [{}, {}]",
                self.s_min(),
                self.s_max()
            )));
        }
        let s = s.clamp(self.s_min(), self.s_max());
        // Locate the interval by binary search.
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.samples[mid].s <= s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a = &self.samples[lo];
        let b = &self.samples[hi];
        let d = b.s - a.s;
        let t = (s - a.s) / d;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let hermite =
            |fa: f64, da: f64, fb: f64, db: f64| fa * h00 + da * d * h10 + fb * h01 + db * d * h11;
        Ok(ProfileSample {
            s,
            x: hermite(a.x, a.theta.cos(), b.x, b.theta.cos()),
            z: hermite(a.z, a.theta.sin(), b.z, b.theta.sin()),
            theta: hermite(a.theta, a.kappa, b.theta, b.kappa),
            kappa: a.kappa + t * (b.kappa - a.kappa),
        })
    }

    /// Pointwise mean curvature `kappa1 + kappa2` at sample `i`.
    pub fn mean_curvature_at(&self, i: usize) -> f64 {
        let p = &self.samples[i];
        p.kappa + p.theta.sin() / p.x
    }

    /// Squared norm of the second fundamental form, `kappa1^2 + kappa2^2`,
    /// at sample `i`.
    pub fn second_form_sq_at(&self, i: usize) -> f64 {
        let p = &self.samples[i];
        let k2 = p.theta.sin() / p.x;
        p.kappa * p.kappa + k2 * k2
    }

    /// Homothety by `factor > 0`: lengths scale, angles stay, curvatures
    /// scale inversely.
    pub fn scaled(&self, factor: f64) -> Result<ProfileCurve> {
        if !(factor > 0.0) {
            return Err(Error::domain(format!(
                "scale factor must be > 0, got {factor}"
            )));
        }
        let samples = self
            .samples
            .iter()
            .map(|p| ProfileSample {
                s: p.s * factor,
                x: p.x * factor,
                z: p.z * factor,
                theta: p.theta,
                kappa: p.kappa / factor,
            })
            .collect();
        ProfileCurve::from_samples(samples)
    }

    /// Largest deviation of `|delta(x,z)| / delta s` from 1 over consecutive
    /// samples.
    pub fn unit_speed_defect(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| {
                let ds = w[1].s - w[0].s;
                let chord = (w[1].x - w[0].x).hypot(w[1].z - w[0].z);
                // Chord-vs-arc correction: a circular arc of curvature kappa
                // has chord = ds (1 - (kappa ds)^2 / 24 + ...).
                let kappa = 0.5 * (w[0].kappa + w[1].kappa);
                let arc_est = chord / (1.0 - (kappa * ds).powi(2) / 24.0);
                (arc_est / ds - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// CSV serialization: header `s,x,z,theta,kappa`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "s,x,z,theta,kappa")?;
        for p in &self.samples {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p.s, p.x, p.z, p.theta, p.kappa
            )?;
        }
        Ok(())
    }
}

/// Closed-form unit-speed catenary profile of parameter `c` on
/// `[-s_max, s_max]`: `x = c sqrt(1 + s^2/c^2)`, `z = c asinh(s/c)`.
pub fn catenoid_profile(c: f64, s_max: f64, n_samples: usize) -> Result<ProfileCurve> {
    if !(c > 0.0) {
        return Err(Error::domain(format!(
            "catenary parameter must be > 0, got {c}"
        )));
    }
    if n_samples < 3 {
        return Err(Error::domain(format!(
            "need at least 3 samples, got {n_samples}"
        )));
    }
    if !(s_max > 0.0) {
        return Err(Error::domain(format!("s_max must be > 0, got {s_max}")));
    }
    let samples = (0..n_samples)
        .map(|i| {
            let s = -s_max + 2.0 * s_max * i as f64 / (n_samples - 1) as f64;
            catenoid_sample(c, s)
        })
        .collect();
    ProfileCurve::from_samples(samples)
}

/// Exact catenary profile data at arclength `s`.
pub fn catenoid_sample(c: f64, s: f64) -> ProfileSample {
    let rho = (c * c + s * s).sqrt();
    ProfileSample {
        s,
        x: rho,
        z: c * (s / c).asinh(),
        theta: c.atan2(s),
        kappa: -c / (c * c + s * s),
    }
}

/// Integrate the CMC profile system `x' = cos theta, z' = sin theta,
/// theta' = h - sin(theta)/x` from `(x0, 0, theta0)` at `s = 0`, sampling
/// `n_samples` uniform arclengths over `s_span`.
pub fn cmc_profile_ode(
    h: f64,
    x0: f64,
    theta0: f64,
    s_span: (f64, f64),
    n_samples: usize,
) -> Result<ProfileCurve> {
    if !(x0 > 0.0) {
        return Err(Error::domain(format!("x0 must be > 0, got {x0}")));
    }
    if n_samples < 3 {
        return Err(Error::domain(format!(
            "need at least 3 samples, got {n_samples}"
        )));
    }
    let (lo, hi) = s_span;
    if !(lo < hi) || lo > 0.0 || hi < 0.0 {
        return Err(Error::domain(format!(
            "s_span must be an interval containing 0, got ({lo}, {hi})"
        )));
    }
    let rhs = move |_s: f64, y: &[f64; 3]| {
        let theta = y[2];
        [theta.cos(), theta.sin(), h - theta.sin() / y[0]]
    };
    let solver = Dopri5::default();
    let grid: Vec<f64> = (0..n_samples)
        .map(|i| lo + (hi - lo) * i as f64 / (n_samples - 1) as f64)
        .collect();
    let y0 = [x0, 0.0, theta0];
    let backward: Vec<f64> = grid.iter().rev().copied().filter(|&s| s < 0.0).collect();
    let forward: Vec<f64> = grid.iter().copied().filter(|&s| s >= 0.0).collect();
    let back_states = solver.solve_path(&rhs, 0.0, y0, &backward)?;
    let fwd_states = solver.solve_path(&rhs, 0.0, y0, &forward)?;
    let mut samples = Vec::with_capacity(n_samples);
    for (s, y) in backward
        .iter()
        .rev()
        .zip(back_states.iter().rev())
        .chain(forward.iter().zip(fwd_states.iter()))
    {
        if y[0] < 1e-9 {
            return Err(Error::AxisCollision { s: *s, x: y[0] });
        }
        samples.push(ProfileSample {
            s: *s,
            x: y[0],
            z: y[1],
            theta: y[2],
            kappa: h - y[2].sin() / y[0],
        });
    }
    ProfileCurve::from_samples(samples)
}

/// Support function `q(s) = x sin(theta) - z cos(theta) = x z' - z x'`,
/// interpolated on the curve.
pub fn support_function(curve: &ProfileCurve, s: f64) -> Result<f64> {
    let p = curve.eval(s)?;
    Ok(p.x * p.theta.sin() - p.z * p.theta.cos())
}

/// Smallest positive root `s*` of the support function: there the tangent
/// line passes through the origin, so the revolved surface meets the sphere
/// `|X| = |gamma(s*)|` orthogonally.
pub fn free_boundary_arclength(curve: &ProfileCurve) -> Result<f64> {
    let qs: Vec<(f64, f64)> = curve
        .samples()
        .iter()
        .filter(|p| p.s >= 0.0)
        .map(|p| (p.s, p.x * p.theta.sin() - p.z * p.theta.cos()))
        .collect();
    if qs.len() < 2 {
        return Err(Error::NoRoot("no samples with s >= 0".into()));
    }
    let mut bracket = None;
    for w in qs.windows(2) {
        if w[0].1 == 0.0 && w[0].0 > 0.0 {
            return Ok(w[0].0);
        }
        if w[0].1.signum() != w[1].1.signum() {
            bracket = Some((w[0].0, w[1].0));
            break;
        }
    }
    let (lo, hi) = bracket
        .ok_or_else(|| Error::NoRoot("support function keeps one sign on (0, s_max]".into()))?;
    let mut q = |s: f64| support_function(curve, s).unwrap_or(f64::NAN);
    bisect(&mut q, lo, hi, 1e-12)
}

/// Scan the support function on `[0, s_max]` of the curve and report whether
/// a sign change exists (used as the free-boundary precondition).
pub fn support_changes_sign(curve: &ProfileCurve) -> bool {
    let mut q = |s: f64| support_function(curve, s).unwrap_or(f64::NAN);
    bracket_first_sign_change(&mut q, 0.0, curve.s_max(), 1000).is_some()
}
