//! Fixed-step fourth-order Runge–Kutta with step halving.

use num_complex::Complex64;

use super::liouvillian::ModeLiouvillian;
use crate::error::{Result, WireError};
use crate::fock::{hermiticity_residual, max_abs, min_eigenvalue, Operator, ModeFrame};

const POSITIVITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    /// Accepted max-entry difference between the `n`- and `2n`-step results,
    /// relative to `max(1, max|X0|)`.
    pub tolerance: f64,
    /// `h · rate_bound` for the first attempt.
    pub stability: f64,
    pub min_steps: usize,
    pub max_refinements: u32,
    /// Compute the smallest eigenvalue of Hermitian results.
    pub check_positivity: bool,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            tolerance: 1e-11,
            stability: 0.5,
            min_steps: 4,
            max_refinements: 16,
            check_positivity: false,
        }
    }
}

/// How a propagation is carried out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Engine {
    Rk4(StepControl),
    /// Closed-form product of single-mode propagators.
    Exact,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::Rk4(StepControl::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    pub steps: usize,
    /// `|Tr X(t) − Tr X(0)|`.
    pub trace_drift: f64,
    /// `max |X − X†|` of the result, meaningful for Hermitian input.
    pub hermiticity: f64,
    pub min_eigenvalue: Option<f64>,
    pub positivity_warning: bool,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: Operator,
    pub diagnostics: Diagnostics,
}

impl Engine {
    /// Propagates `x0` (mode frame) for time `t`.
    pub fn propagate(&self, generator: &ModeLiouvillian, x0: &Operator, t: f64) -> Result<Evolution> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(WireError::InvalidChain(format!("evolution time must be finite and >= 0, got {t}")));
        }
        if x0.nrows() != generator.dim() || x0.ncols() != generator.dim() {
            return Err(WireError::DimensionMismatch { expected: generator.dim(), found: x0.nrows() });
        }
        let (state, steps, check) = match self {
            Engine::Exact => (generator.propagate_exact(x0, t), 0, false),
            Engine::Rk4(control) => {
                let (s, n) = integrate(generator, x0, t, control)?;
                (s, n, control.check_positivity)
            }
        };
        let diagnostics = diagnose(x0, &state, steps, check);
        Ok(Evolution { state, diagnostics })
    }
}

/// Site-basis convenience: `X0` in, `X(t)` out.
pub fn evolve(
    frame: &ModeFrame,
    generator: &ModeLiouvillian,
    x0: &Operator,
    t: f64,
    engine: &Engine,
) -> Result<Evolution> {
    let mut ev = engine.propagate(generator, &frame.to_modes(x0), t)?;
    ev.state = frame.to_sites(&ev.state);
    Ok(ev)
}

fn rk4_run(generator: &ModeLiouvillian, x0: &Operator, t: f64, steps: usize) -> Operator {
    let dim = x0.nrows();
    let h = t / steps as f64;
    let mut x = x0.clone();
    let mut k1 = Operator::zeros(dim, dim);
    let mut k2 = Operator::zeros(dim, dim);
    let mut k3 = Operator::zeros(dim, dim);
    let mut k4 = Operator::zeros(dim, dim);
    let mut tmp = Operator::zeros(dim, dim);
    let half = Complex64::new(0.5 * h, 0.0);
    let full = Complex64::new(h, 0.0);
    let sixth = Complex64::new(h / 6.0, 0.0);
    for _ in 0..steps {
        generator.apply_into(&x, &mut k1);
        shifted(&mut tmp, &x, half, &k1);
        generator.apply_into(&tmp, &mut k2);
        shifted(&mut tmp, &x, half, &k2);
        generator.apply_into(&tmp, &mut k3);
        shifted(&mut tmp, &x, full, &k3);
        generator.apply_into(&tmp, &mut k4);
        for (((xi, a), b), (c, d)) in x
            .as_mut_slice()
            .iter_mut()
            .zip(k1.as_slice())
            .zip(k2.as_slice())
            .zip(k3.as_slice().iter().zip(k4.as_slice()))
        {
            *xi += sixth * (a + (b + c) * 2.0 + d);
        }
    }
    x
}

// out = base + h·k
fn shifted(out: &mut Operator, base: &Operator, h: Complex64, k: &Operator) {
    for ((o, b), v) in out.as_mut_slice().iter_mut().zip(base.as_slice()).zip(k.as_slice()) {
        *o = b + h * v;
    }
}

fn integrate(generator: &ModeLiouvillian, x0: &Operator, t: f64, control: &StepControl) -> Result<(Operator, usize)> {
    if t == 0.0 {
        return Ok((x0.clone(), 0));
    }
    let bound = generator.rate_bound() * t;
    let mut steps = ((bound / control.stability).ceil() as usize).max(control.min_steps).max(1);
    let scale = max_abs(x0).max(1.0);
    let hermitian_input = hermiticity_residual(x0) <= 1e-12 * scale;
    let trace0 = x0.trace();

    let mut coarse = rk4_run(generator, x0, t, steps);
    for _ in 0..control.max_refinements {
        let fine = rk4_run(generator, x0, t, 2 * steps);
        // Richardson estimate of the error left in the fine result.
        let err = max_abs(&(&fine - &coarse)) / 15.0;
        let trace_ok = (fine.trace() - trace0).norm() <= 1e-10 * scale;
        let herm_ok = !hermitian_input || hermiticity_residual(&fine) <= 1e-10 * scale;
        if err <= control.tolerance * scale && trace_ok && herm_ok {
            return Ok((fine, 2 * steps));
        }
        coarse = fine;
        steps *= 2;
    }
    Err(WireError::StepUnderflow { steps, tolerance: control.tolerance })
}

fn diagnose(x0: &Operator, x: &Operator, steps: usize, check_positivity: bool) -> Diagnostics {
    let hermitian_input = hermiticity_residual(x0) <= 1e-12 * max_abs(x0).max(1.0);
    // positivity is only meaningful when the input was itself a state
    let state_input = check_positivity && hermitian_input && min_eigenvalue(x0) >= -1e-12;
    let min_eig = state_input.then(|| min_eigenvalue(x));
    let positivity_warning = min_eig.is_some_and(|m| m < -POSITIVITY_TOLERANCE);
    if positivity_warning {
        log::warn!("evolved state has eigenvalue {:.3e} below -{POSITIVITY_TOLERANCE:e}", min_eig.unwrap_or(0.0));
    }
    Diagnostics {
        steps,
        trace_drift: (x.trace() - x0.trace()).norm(),
        hermiticity: if hermitian_input { hermiticity_residual(x) } else { 0.0 },
        min_eigenvalue: min_eig,
        positivity_warning,
    }
}
