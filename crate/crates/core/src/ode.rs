//! Adaptive Dormand–Prince 5(4) integration for small first-order systems.
//!
//! The integrator advances a fixed-size state with an embedded error
//! estimate and PI-free step control. `solve_path` clips steps so that the
//! state is produced exactly at a list of requested abscissae, which keeps
//! downstream sampling free of interpolation error.

use crate::error::{Error, Result};

/// Dormand–Prince coefficients (5th-order solution, 4th-order embedded).
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th and 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

/// Adaptive embedded Runge–Kutta integrator of order 5(4).
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    /// Absolute tolerance per component.
    pub atol: f64,
    /// Relative tolerance per component.
    pub rtol: f64,
    /// Hard cap on accepted + rejected steps per call.
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 {
            atol: 1e-11,
            rtol: 1e-11,
            max_steps: 1_000_000,
        }
    }
}

impl Dopri5 {
    /// Integrate from `(s0, y0)` to `s_end`, invoking `observe` after every
    /// accepted step. `observe` may stop the run early by returning `false`;
    /// the final state is returned either way.
    pub fn integrate_observed<const N: usize>(
        &self,
        f: &dyn Fn(f64, &[f64; N]) -> [f64; N],
        s0: f64,
        y0: [f64; N],
        s_end: f64,
        mut observe: impl FnMut(f64, &[f64; N]) -> bool,
    ) -> Result<(f64, [f64; N])> {
        if s0 == s_end {
            return Ok((s0, y0));
        }
        let dir = (s_end - s0).signum();
        let span = (s_end - s0).abs();
        let mut s = s0;
        let mut y = y0;
        let mut k1 = f(s, &y);
        let mut h = (span * 1e-3).clamp(1e-10, 1e-2) * dir;
        let mut steps = 0usize;
        while (s_end - s) * dir > 0.0 {
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::StepFailure {
                    s,
                    reason: format!("exceeded {} steps", self.max_steps),
                });
            }
            if (s + h - s_end) * dir > 0.0 {
                h = s_end - s;
            }
            let (y_new, err) = self.step(f, s, &y, &k1, h);
            if err <= 1.0 {
                s += h;
                y = y_new;
                k1 = f(s, &y);
                if !observe(s, &y) {
                    return Ok((s, y));
                }
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                h *= factor;
            } else {
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                if h.abs() < 1e-14 * span.max(1.0) {
                    return Err(Error::StepFailure {
                        s,
                        reason: "step size underflow".into(),
                    });
                }
            }
        }
        Ok((s, y))
    }

    /// Integrate to `s_end`, returning the final state.
    pub fn integrate<const N: usize>(
        &self,
        f: &dyn Fn(f64, &[f64; N]) -> [f64; N],
        s0: f64,
        y0: [f64; N],
        s_end: f64,
    ) -> Result<[f64; N]> {
        let (_, y) = self.integrate_observed(f, s0, y0, s_end, |_, _| true)?;
        Ok(y)
    }

    /// Integrate from `(s0, y0)` producing the state exactly at each target
    /// abscissa. Targets must be monotone, all on one side of `s0`.
    pub fn solve_path<const N: usize>(
        &self,
        f: &dyn Fn(f64, &[f64; N]) -> [f64; N],
        s0: f64,
        y0: [f64; N],
        targets: &[f64],
    ) -> Result<Vec<[f64; N]>> {
        let mut out = Vec::with_capacity(targets.len());
        let mut s = s0;
        let mut y = y0;
        for &t in targets {
            y = self.integrate(f, s, y, t)?;
            s = t;
            out.push(y);
        }
        Ok(out)
    }

    fn step<const N: usize>(
        &self,
        f: &dyn Fn(f64, &[f64; N]) -> [f64; N],
        s: f64,
        y: &[f64; N],
        k1: &[f64; N],
        h: f64,
    ) -> ([f64; N], f64) {
        let mut t = [0.0; N];
        for i in 0..N {
            t[i] = y[i] + h * A21 * k1[i];
        }
        let k2 = f(s + C2 * h, &t);
        for i in 0..N {
            t[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        let k3 = f(s + C3 * h, &t);
        for i in 0..N {
            t[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        let k4 = f(s + C4 * h, &t);
        for i in 0..N {
            t[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        let k5 = f(s + C5 * h, &t);
        for i in 0..N {
            t[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let k6 = f(s + h, &t);
        let mut y_new = [0.0; N];
        for i in 0..N {
            y_new[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        let k7 = f(s + h, &y_new);
        let mut err_sq = 0.0;
        for i in 0..N {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / scale) * (e / scale);
        }
        (y_new, (err_sq / N as f64).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_decay() {
        let f = |_s: f64, y: &[f64; 1]| [-y[0]];
        let y = Dopri5::default().integrate(&f, 0.0, [1.0], 3.0).unwrap();
        assert_relative_eq!(y[0], (-3.0f64).exp(), max_relative = 1e-9);
    }

    #[test]
    fn harmonic_oscillator_energy() {
        let f = |_s: f64, y: &[f64; 2]| [y[1], -y[0]];
        let y = Dopri5::default()
            .integrate(&f, 0.0, [1.0, 0.0], 10.0 * std::f64::consts::PI)
            .unwrap();
        assert_relative_eq!(y[0], 1.0, epsilon = 1e-8);
        assert_relative_eq!(y[1], 0.0, epsilon = 1e-8);
    }

    #[test]
    fn path_hits_targets_exactly_backward() {
        let f = |s: f64, _y: &[f64; 1]| [s.cos()];
        let targets = [-0.5, -1.0, -2.5];
        let states = Dopri5::default()
            .solve_path(&f, 0.0, [0.0], &targets)
            .unwrap();
        for (i, &t) in targets.iter().enumerate() {
            assert_relative_eq!(states[i][0], t.sin(), epsilon = 1e-10);
        }
    }
}
