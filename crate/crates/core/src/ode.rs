//! Embedded Dormand–Prince 5(4) stepper for complex state vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Tolerance {
    pub const CLOSED: Self = Self {
        rtol: 1e-10,
        atol: 1e-12,
    };
    pub const LINDBLAD: Self = Self {
        rtol: 1e-8,
        atol: 1e-10,
    };

    pub fn relative(rtol: f64) -> Self {
        Self {
            rtol,
            atol: rtol * 1e-2,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// fifth-order minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Adaptive integrator that remembers its step size between calls, so a
/// trajectory can be advanced checkpoint by checkpoint.
#[derive(Clone, Debug)]
pub struct Stepper {
    tol: Tolerance,
    h: Option<f64>,
    pub h_min: f64,
    pub max_steps: usize,
    stats: Stats,
    k: Vec<Vec<Complex64>>,
    scratch: Vec<Complex64>,
    y_new: Vec<Complex64>,
}

impl Stepper {
    pub fn new(tol: Tolerance) -> Self {
        Self {
            tol,
            h: None,
            h_min: 1e-14,
            max_steps: 5_000_000,
            stats: Stats::default(),
            k: Vec::new(),
            scratch: Vec::new(),
            y_new: Vec::new(),
        }
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    fn ensure(&mut self, n: usize) {
        if self.scratch.len() != n {
            self.k = vec![vec![Complex64::default(); n]; 7];
            self.scratch = vec![Complex64::default(); n];
            self.y_new = vec![Complex64::default(); n];
        }
    }

    /// Advances `y` from `t0` to `t1`. `rhs(t, y, dydt)` writes the
    /// derivative; `on_step(t, y)` runs after each accepted step and may abort.
    pub fn advance<F, G>(&mut self, mut rhs: F, t0: f64, t1: f64, y: &mut [Complex64], mut on_step: G) -> Result<()>
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]),
        G: FnMut(f64, &[Complex64]) -> Result<()>,
    {
        let span = t1 - t0;
        if span <= 0.0 {
            return Ok(());
        }
        let n = y.len();
        self.ensure(n);
        let mut t = t0;
        let mut h = self.h.unwrap_or(span * 1e-3).min(span);
        rhs(t, y, &mut self.k[0]);
        self.stats.evaluations += 1;
        let mut steps = 0usize;

        while t < t1 {
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::StepUnderflow { t, h });
            }
            let last = t + h >= t1 - 1e-12 * span;
            let h_step = if last { t1 - t } else { h };

            let stages: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
            for (s, coeffs) in stages.iter().enumerate() {
                for i in 0..n {
                    let mut acc = Complex64::default();
                    for (j, a) in coeffs.iter().enumerate() {
                        acc += self.k[j][i] * *a;
                    }
                    self.scratch[i] = y[i] + acc * h_step;
                }
                rhs(t + C[s + 1] * h_step, &self.scratch, &mut self.k[s + 1]);
            }
            for i in 0..n {
                let mut acc = Complex64::default();
                for (j, b) in B.iter().enumerate() {
                    acc += self.k[j][i] * *b;
                }
                self.y_new[i] = y[i] + acc * h_step;
            }
            rhs(t + h_step, &self.y_new, &mut self.k[6]);
            self.stats.evaluations += 6;

            let mut err2 = 0.0;
            for i in 0..n {
                let mut e = Complex64::default();
                for (j, c) in E.iter().enumerate() {
                    e += self.k[j][i] * *c;
                }
                let sc = self.tol.atol + self.tol.rtol * y[i].norm().max(self.y_new[i].norm());
                err2 += (e * h_step).norm_sqr() / (sc * sc);
            }
            let err = (err2 / n.max(1) as f64).sqrt();

            if err <= 1.0 {
                t = if last { t1 } else { t + h_step };
                y.copy_from_slice(&self.y_new);
                self.k.swap(0, 6);
                self.stats.accepted += 1;
                on_step(t, y)?;
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // a step clipped to hit t1 says little about the next one
                if !(last && h_step < h) {
                    h = h_step * factor;
                }
            } else {
                self.stats.rejected += 1;
                h = h_step * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                if h < self.h_min {
                    return Err(Error::StepUnderflow { t, h });
                }
            }
        }
        self.h = Some(h.max(self.h_min));
        Ok(())
    }
}
