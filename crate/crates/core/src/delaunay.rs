//! The Delaunay family of free boundary annuli in the unit ball.
//!
//! For a conic `(e, p)` the rolling construction gives a CMC generatrix
//! starting at the vertex distance `x0 = e p/(1+e)` with vertical tangent.
//! Clipping the revolved surface at the sphere through the first support
//! zero produces an annulus meeting that sphere orthogonally. Rescaling so
//! the clipping radius is exactly 1 gives the one-parameter family of
//! free boundary annuli `A_e`; `A_1` is the critical catenoid.
//!
//! Sign convention: the signed pointwise mean curvature of these profiles
//! is `(1 - e^2)/(e p)`, positive for unduloids, zero for the catenoid,
//! negative for nodoids. `delaunay_mean_curvature` returns the unsigned
//! magnitude `|e^2 - 1|/(e p)`; annulus records carry the signed value so
//! the pointwise curvature invariant holds verbatim.

use std::io::Write;

use crate::error::{Error, Result};
use crate::profile::{
    catenoid_profile, catenoid_sample, cmc_profile_ode, free_boundary_arclength, Conic, ConicClass,
    ProfileCurve, ProfileSample,
};
use crate::rootfind::bisect;

/// Default sample count for generated profiles.
pub const DEFAULT_PROFILE_SAMPLES: usize = 4001;

/// Unsigned mean curvature magnitude `|e^2 - 1| / (e p)` of the Delaunay
/// surface generated by `conic`.
pub fn delaunay_mean_curvature(conic: &Conic) -> f64 {
    let e = conic.eccentricity();
    (e * e - 1.0).abs() / conic.semi_latus_rectum()
}

/// Signed mean curvature `(1 - e^2)/(e p)` of the Delaunay profile under
/// this crate's normal convention (matches the pointwise `kappa1 + kappa2`
/// of the roulette started at the vertex).
pub fn signed_mean_curvature(conic: &Conic) -> f64 {
    let e = conic.eccentricity();
    (1.0 - e * e) / conic.semi_latus_rectum()
}

/// Classify an eccentricity. Exact comparison at `e = 1`.
pub fn classify(e: f64) -> Result<ConicClass> {
    Ok(Conic::new(e, 1.0)?.classify())
}

/// The critical catenoid: the catenary piece meeting the unit sphere
/// orthogonally.
#[derive(Debug, Clone, Copy)]
pub struct CriticalCatenoid {
    /// Catenary parameter.
    pub c: f64,
    /// Half-height: `z_c = c coth(z_c / c)`.
    pub z_c: f64,
    /// Circumscribed radius (1 by construction).
    pub r_c: f64,
    /// Boundary arclength: the profile spans `[-s_star, s_star]`.
    pub s_star: f64,
}

impl CriticalCatenoid {
    /// The scale-free contact parameter `z1 = z_c / c`, the positive root of
    /// `z = coth(z)`.
    pub fn z1(&self) -> f64 {
        self.z_c / self.c
    }

    /// Closed-form profile on `[-s_star, s_star]`.
    pub fn profile(&self, n_samples: usize) -> Result<ProfileCurve> {
        catenoid_profile(self.c, self.s_star, n_samples)
    }
}

/// Solve `z1 = coth(z1)` by bisection and assemble the critical catenoid
/// scaled to the unit ball.
pub fn critical_catenoid() -> CriticalCatenoid {
    let mut f = |z: f64| z - 1.0 / z.tanh();
    // f(1) < 0 < f(2); bisection to 1e-14.
    let z1 = bisect(&mut f, 1.0, 2.0, 1e-14).expect("bracket is valid");
    let c = 1.0 / (z1 * z1 + z1.cosh() * z1.cosh()).sqrt();
    CriticalCatenoid {
        c,
        z_c: c * z1,
        r_c: 1.0,
        s_star: c * z1.sinh(),
    }
}

/// A Delaunay annulus clipped at its free-boundary sphere.
#[derive(Debug, Clone)]
pub struct DelaunayAnnulus {
    /// The generating conic at the rescaled focal parameter.
    pub conic: Conic,
    /// Clipping ball radius (1 after rescaling to the unit ball).
    pub rho: f64,
    /// Signed constant mean curvature of the clipped profile.
    pub h: f64,
    /// Profile clipped to `|gamma| <= rho`, spanning `[-s_star, s_star]`.
    pub profile: ProfileCurve,
    /// Boundary arclength.
    pub s_star: f64,
}

impl DelaunayAnnulus {
    /// Unsigned mean curvature magnitude `|h|`.
    pub fn h_magnitude(&self) -> f64 {
        self.h.abs()
    }

    /// JSON sidecar `{e, p, h, rho, s_star}` at full precision.
    pub fn write_json<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{{")?;
        writeln!(w, "  \"e\": {:.16e},", self.conic.eccentricity())?;
        writeln!(w, "  \"p\": {:.16e},", self.conic.focal_parameter())?;
        writeln!(w, "  \"h\": {:.16e},", self.h)?;
        writeln!(w, "  \"rho\": {:.16e},", self.rho)?;
        writeln!(w, "  \"s_star\": {:.16e}", self.s_star)?;
        writeln!(w, "}}")
    }
}

/// Integrate the Delaunay profile of `conic` outward from the vertex until
/// the support function changes sign, returning the curve (padded past the
/// root) and the root `s_star`.
fn profile_with_support_root(conic: &Conic) -> Result<(ProfileCurve, f64)> {
    let e = conic.eccentricity();
    let p = conic.focal_parameter();
    let x0 = conic.vertex_radius();
    let h = signed_mean_curvature(conic);
    // Expanding horizons: the support zero of the family members near the
    // catenoid sits within a few vertex radii; periodic unduloid profiles
    // may need more room, and outside the empirically valid range we report
    // a no-root error instead of growing without bound.
    let mut span = 4.0 * (x0 + p);
    for _ in 0..6 {
        let n = ((span / (x0 + p)) * 500.0) as usize + 3;
        let curve = match conic.classify() {
            ConicClass::Catenoid => catenoid_profile(0.5 * p, span, n)?,
            _ => cmc_profile_ode(h, x0, std::f64::consts::FRAC_PI_2, (-span, span), n)?,
        };
        match free_boundary_arclength(&curve) {
            Ok(s_star) => return Ok((curve, s_star)),
            Err(Error::NoRoot(_)) => span *= 2.0,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoRoot(format!(
        "support function of the (e = {e}, p = {p}) profile found no zero within the search horizon"
    )))
}

/// Free-boundary clipping radius `rho(e, p)`: builds the Delaunay profile,
/// finds the first support zero `s*`, and returns `|gamma(s*)|`.
pub fn free_boundary_radius(conic: &Conic) -> Result<f64> {
    let (curve, s_star) = profile_with_support_root(conic)?;
    let b = curve.eval(s_star)?;
    Ok(b.x.hypot(b.z))
}

/// Clip a symmetric profile to `[-s_clip, s_clip]` with `n_samples` uniform
/// samples, re-integrating so the endpoints are exact.
pub fn clipped_profile(conic: &Conic, s_clip: f64, n_samples: usize) -> Result<ProfileCurve> {
    match conic.classify() {
        ConicClass::Catenoid => catenoid_profile(0.5 * conic.focal_parameter(), s_clip, n_samples),
        _ => cmc_profile_ode(
            signed_mean_curvature(conic),
            conic.vertex_radius(),
            std::f64::consts::FRAC_PI_2,
            (-s_clip, s_clip),
            n_samples,
        ),
    }
}

/// The free boundary annulus `A_e`: the Delaunay profile at `p = 1`
/// rescaled so the clipping sphere is the unit sphere.
pub fn annulus(e: f64) -> Result<DelaunayAnnulus> {
    annulus_sampled(e, DEFAULT_PROFILE_SAMPLES)
}

/// `annulus` with explicit profile resolution.
pub fn annulus_sampled(e: f64, n_samples: usize) -> Result<DelaunayAnnulus> {
    let base = Conic::new(e, 1.0)?;
    let (_, s_star_base) = profile_with_support_root(&base)?;
    let rho_base = {
        let curve = clipped_profile(&base, s_star_base, 9)?;
        let b = curve.eval(s_star_base)?;
        b.x.hypot(b.z)
    };
    // Homothety in p: rescale by 1/rho so the clipping radius is exactly 1.
    let scale = 1.0 / rho_base;
    let conic = Conic::new(e, scale)?;
    let s_star = s_star_base * scale;
    let profile = clipped_profile(&conic, s_star, n_samples)?;
    Ok(DelaunayAnnulus {
        conic,
        rho: 1.0,
        h: signed_mean_curvature(&conic),
        profile,
        s_star,
    })
}

/// One row of the family sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub e: f64,
    /// Signed mean curvature `h(e)` of the unit-ball annulus.
    pub h: f64,
    /// Free-boundary radius at `p = 1`.
    pub rho: f64,
    /// Boundary arclength of the unit-ball annulus.
    pub s_star: f64,
}

/// Result of sweeping the family over an eccentricity range; per-row
/// failures are recorded, not fatal.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<(f64, String)>,
}

impl SweepTable {
    /// CSV serialization: header `e,h,rho,s_star`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "e,h,rho,s_star")?;
        for r in &self.rows {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                r.e, r.h, r.rho, r.s_star
            )?;
        }
        Ok(())
    }
}

/// Sample the annulus family on `n` uniform eccentricities in
/// `[e_min, e_max]` (which must contain 1).
pub fn annulus_family_sweep(e_min: f64, e_max: f64, n: usize) -> Result<SweepTable> {
    if !(e_min > 0.0) {
        return Err(Error::domain(format!("e_min must be > 0, got {e_min}")));
    }
    if !(e_min < e_max) {
        return Err(Error::domain(format!(
            "need e_min < e_max, got [{e_min}, {e_max}]"
        )));
    }
    if !(e_min <= 1.0 && 1.0 <= e_max) {
        return Err(Error::domain(format!(
            "sweep range [{e_min}, {e_max}] must contain the catenoid e = 1"
        )));
    }
    if n < 2 {
        return Err(Error::domain(format!("need at least 2 rows, got {n}")));
    }
    let es: Vec<f64> = (0..n)
        .map(|i| e_min + (e_max - e_min) * i as f64 / (n - 1) as f64)
        .collect();
    // Rows are independent pure computations; chunk them across a scoped
    // worker per core and emit in eccentricity order so the table stays
    // deterministic.
    let workers = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        .min(n);
    let chunk = n.div_ceil(workers);
    let mut results: Vec<Option<Result<SweepRow>>> = Vec::new();
    results.resize_with(n, || None);
    std::thread::scope(|scope| {
        for (e_chunk, out_chunk) in es.chunks(chunk).zip(results.chunks_mut(chunk)) {
            scope.spawn(move || {
                for (e, slot) in e_chunk.iter().zip(out_chunk) {
                    *slot = Some(sweep_row(*e));
                }
            });
        }
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (e, slot) in es.iter().zip(results) {
        match slot.expect("all rows computed") {
            Ok(row) => rows.push(row),
            Err(err) => failures.push((*e, err.to_string())),
        }
    }
    Ok(SweepTable { rows, failures })
}

fn sweep_row(e: f64) -> Result<SweepRow> {
    let base = Conic::new(e, 1.0)?;
    let rho = free_boundary_radius(&base)?;
    let ann = annulus_sampled(e, 801)?;
    Ok(SweepRow {
        e,
        h: ann.h,
        rho,
        s_star: ann.s_star,
    })
}

/// Exact closed-form profile sample of the critical catenoid (used by
/// boundary-value problems that want analytic coefficients).
pub fn critical_catenoid_sample(cat: &CriticalCatenoid, s: f64) -> ProfileSample {
    catenoid_sample(cat.c, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::support_function;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn z1_oracle() -> f64 {
        let mut f = |z: f64| z - 1.0 / z.tanh();
        bisect(&mut f, 1.0, 2.0, 1e-15).unwrap()
    }

    #[test]
    fn mean_curvature_formula() {
        assert_eq!(delaunay_mean_curvature(&Conic::new(1.0, 3.7).unwrap()), 0.0);
        assert_relative_eq!(delaunay_mean_curvature(&Conic::new(2.0, 1.0).unwrap()), 1.5);
        assert_relative_eq!(
            delaunay_mean_curvature(&Conic::new(0.5, 2.0).unwrap()),
            0.75
        );
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(0.5).unwrap(), ConicClass::Unduloid);
        assert_eq!(classify(1.0).unwrap(), ConicClass::Catenoid);
        assert_eq!(classify(3.0).unwrap(), ConicClass::Nodoid);
        assert!(classify(0.0).is_err());
        assert!(classify(-1.0).is_err());
    }

    #[test]
    fn critical_catenoid_constants() {
        let cat = critical_catenoid();
        let z1 = z1_oracle();
        assert_abs_diff_eq!(cat.z1(), 1.1996786, epsilon = 1e-6);
        assert_abs_diff_eq!(cat.z1(), z1, epsilon = 1e-13);
        // c = (z1^2 + cosh^2 z1)^{-1/2}
        let c_oracle = 1.0 / (z1 * z1 + z1.cosh().powi(2)).sqrt();
        assert_abs_diff_eq!(cat.c, c_oracle, epsilon = 1e-13);
        assert_abs_diff_eq!(cat.c, 0.4604, epsilon = 1e-4);
        // Criticality: |z1 - coth z1| < 1e-12.
        assert!((cat.z1() - 1.0 / cat.z1().tanh()).abs() < 1e-12);
        // z_c = c coth(z_c / c) within 1e-12.
        assert!((cat.z_c - cat.c / (cat.z_c / cat.c).tanh()).abs() < 1e-12);
        // r_c = sqrt(z_c^2 + c^2 cosh^2(z_c/c)) = 1 within 1e-10.
        let r = (cat.z_c.powi(2) + (cat.c * (cat.z_c / cat.c).cosh()).powi(2)).sqrt();
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-10);
        assert_eq!(cat.r_c, 1.0);
    }

    #[test]
    fn free_boundary_radius_catenoid() {
        // Closed-form oracle: the c = p/2 catenary meets the sphere of
        // radius c sqrt(z1^2 + cosh^2 z1) orthogonally.
        let z1 = z1_oracle();
        let rho_oracle = 0.5 * (z1 * z1 + z1.cosh().powi(2)).sqrt();
        let rho = free_boundary_radius(&Conic::new(1.0, 1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(rho, rho_oracle, epsilon = 1e-9);
        // The p making rho = 1 reproduces the critical catenoid scale.
        let cat = critical_catenoid();
        let p_crit = 2.0 * cat.c;
        let rho_crit = free_boundary_radius(&Conic::new(1.0, p_crit).unwrap()).unwrap();
        assert_abs_diff_eq!(rho_crit, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn free_boundary_radius_linear_in_p() {
        for &e in &[0.9f64, 1.0, 1.1] {
            let rho1 = free_boundary_radius(&Conic::new(e, 1.0).unwrap()).unwrap();
            for &alpha in &[0.5f64, 2.0, 10.0] {
                let rho_a = free_boundary_radius(&Conic::new(e, alpha).unwrap()).unwrap();
                assert_abs_diff_eq!(rho_a, alpha * rho1, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn annulus_invariants() {
        for &e in &[0.9f64, 1.0, 1.1] {
            let ann = annulus_sampled(e, 1501).unwrap();
            assert_eq!(ann.rho, 1.0);
            // Boundary touches the unit sphere.
            let b = ann.profile.eval(ann.s_star).unwrap();
            assert_abs_diff_eq!(b.x.hypot(b.z), 1.0, epsilon = 1e-8);
            let a = ann.profile.eval(-ann.s_star).unwrap();
            assert_abs_diff_eq!(a.x.hypot(a.z), 1.0, epsilon = 1e-8);
            // Orthogonal contact: support vanishes at both ends.
            assert!(support_function(&ann.profile, ann.s_star).unwrap().abs() < 1e-8);
            assert!(support_function(&ann.profile, -ann.s_star).unwrap().abs() < 1e-8);
            // CMC consistency.
            let max_dev = (0..ann.profile.samples().len())
                .map(|i| (ann.profile.mean_curvature_at(i) - ann.h).abs())
                .fold(0.0, f64::max);
            assert!(max_dev < 1e-6, "max |H - h| = {max_dev} at e = {e}");
        }
    }

    #[test]
    fn annulus_at_one_is_critical_catenoid() {
        let ann = annulus_sampled(1.0, 801).unwrap();
        assert_eq!(ann.h, 0.0);
        let cat = critical_catenoid();
        assert_abs_diff_eq!(0.5 * ann.conic.focal_parameter(), cat.c, epsilon = 1e-9);
        assert_abs_diff_eq!(ann.s_star, cat.s_star, epsilon = 1e-9);
    }

    #[test]
    fn unduloid_annulus_has_positive_h() {
        let ann = annulus_sampled(0.9, 801).unwrap();
        assert!(ann.h > 0.0);
        let nod = annulus_sampled(1.1, 801).unwrap();
        assert!(nod.h < 0.0);
    }

    #[test]
    fn sweep_family_through_catenoid() {
        let table = annulus_family_sweep(0.8, 1.2, 9).unwrap();
        assert!(table.failures.is_empty(), "failures: {:?}", table.failures);
        assert_eq!(table.rows.len(), 9);
        let mid = &table.rows[4];
        assert_abs_diff_eq!(mid.e, 1.0, epsilon = 1e-12);
        assert!(mid.h.abs() < 1e-12);
        // h is monotone decreasing through e = 1 on this range.
        for w in table.rows.windows(2) {
            assert!(w[1].h < w[0].h, "h not monotone: {:?} -> {:?}", w[0], w[1]);
        }
        // Neighbors on both sides of the catenoid exist.
        assert!(table.rows.iter().any(|r| r.e < 1.0 && r.h > 0.0));
        assert!(table.rows.iter().any(|r| r.e > 1.0 && r.h < 0.0));
    }

    #[test]
    fn annuli_exist_well_beyond_the_catenoid() {
        // Strongly eccentric members still reach orthogonal contact within
        // the search horizon.
        for &e in &[0.3f64, 3.0] {
            let ann = annulus_sampled(e, 801).unwrap();
            let b = ann.profile.eval(ann.s_star).unwrap();
            assert_abs_diff_eq!(b.x.hypot(b.z), 1.0, epsilon = 1e-8);
            assert!(support_function(&ann.profile, ann.s_star).unwrap().abs() < 1e-8);
            assert_eq!(ann.h > 0.0, e < 1.0);
        }
    }

    #[test]
    fn annulus_json_sidecar() {
        let ann = annulus_sampled(1.0, 201).unwrap();
        let mut buf = Vec::new();
        ann.write_json(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for key in ["\"e\":", "\"p\":", "\"h\":", "\"rho\":", "\"s_star\":"] {
            assert!(text.contains(key), "missing {key} in {text}");
        }
        assert!(text.contains("\"rho\": 1.0000000000000000e0"));
    }

    #[test]
    fn sweep_rejects_bad_ranges() {
        assert!(annulus_family_sweep(-0.1, 1.2, 5).is_err());
        assert!(annulus_family_sweep(1.1, 1.2, 5).is_err());
        assert!(annulus_family_sweep(0.9, 0.95, 5).is_err());
    }
}
