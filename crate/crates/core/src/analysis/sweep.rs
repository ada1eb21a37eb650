//! Grid sweeps over `(β, Γτ)`: the `F⁽ᶜ⁾ − F⁽ᵃ⁾` field and fidelity
//! threshold curves.

use rayon::prelude::*;

use crate::dynamics::{Engine, RatePreset, Temperature};
use crate::error::{Result, WireError};
use crate::transfer::{ChannelKernel, Scheme, TransferOptions, Wire};
use crate::Omega;

/// `β` for finite `ω`, `β′ = ωβ` when `ω → ∞`.
pub fn temperature_for(wire: &Wire, value: f64) -> Temperature {
    match wire.spec().omega() {
        Omega::Infinite => Temperature::BetaPrime(value),
        Omega::Finite(_) => Temperature::Beta(value),
    }
}

fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(WireError::InvalidGrid(format!("{name} axis is empty")));
    }
    if let Some(x) = axis.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(WireError::InvalidGrid(format!("{name} value {x} must be finite and non-negative")));
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(WireError::InvalidGrid(format!("{name} axis must be strictly increasing")));
    }
    Ok(())
}

/// `count` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
    }
}

/// `count` logarithmically spaced values from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), count).into_iter().map(f64::exp).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    beta_axis: Vec<f64>,
    gamma_tau_axis: Vec<f64>,
    schemes: Vec<Scheme>,
    preset: RatePreset,
}

impl SweepGrid {
    pub fn new(beta_axis: Vec<f64>, gamma_tau_axis: Vec<f64>, schemes: Vec<Scheme>, preset: RatePreset) -> Result<Self> {
        check_axis("beta", &beta_axis)?;
        check_axis("gamma_tau", &gamma_tau_axis)?;
        if schemes.is_empty() {
            return Err(WireError::InvalidGrid("no scheme selected".into()));
        }
        Ok(Self { beta_axis, gamma_tau_axis, schemes, preset })
    }

    pub fn beta_axis(&self) -> &[f64] {
        &self.beta_axis
    }

    pub fn gamma_tau_axis(&self) -> &[f64] {
        &self.gamma_tau_axis
    }

    pub fn schemes(&self) -> &[Scheme] {
        &self.schemes
    }

    pub fn preset(&self) -> &RatePreset {
        &self.preset
    }

    /// Grid points in row-major order (`β` outer, `Γτ` inner).
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.beta_axis
            .iter()
            .flat_map(|&b| self.gamma_tau_axis.iter().map(move |&g| (b, g)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    C,
    A,
    Tie,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub beta: f64,
    pub gamma_tau: f64,
    /// `NaN` when the scheme was not requested.
    pub f_a: f64,
    pub f_c: f64,
    /// Scheme C populations (`NaN` without scheme C).
    pub p1: f64,
    pub p_ap: f64,
}

impl SweepPoint {
    pub fn diff(&self) -> f64 {
        self.f_c - self.f_a
    }

    pub fn dominance(&self, tolerance: f64) -> Dominance {
        let d = self.diff();
        if d > tolerance {
            Dominance::C
        } else if d < -tolerance {
            Dominance::A
        } else {
            Dominance::Tie
        }
    }
}

/// Rows computed before the first failure, in deterministic order.
#[derive(Debug)]
pub struct Partial<T> {
    pub rows: Vec<T>,
    pub error: Option<WireError>,
}

impl<T> Partial<T> {
    fn from_results(results: Vec<Result<T>>) -> Self {
        let mut rows = Vec::with_capacity(results.len());
        for r in results {
            match r {
                Ok(x) => rows.push(x),
                Err(e) => return Self { rows, error: Some(e) },
            }
        }
        Self { rows, error: None }
    }

    pub fn into_result(self) -> Result<Vec<T>> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(self.rows),
        }
    }
}

fn kernels(wire: &Wire, schemes: &[Scheme], engine: Engine) -> Result<Vec<ChannelKernel>> {
    let opts = TransferOptions { engine, ..TransferOptions::default() };
    schemes.iter().map(|&s| wire.kernel(s, &opts)).collect()
}

/// Average fidelity of one scheme at `(β, Γτ)`.
fn fidelity_at(wire: &Wire, kernel: &ChannelKernel, preset: &RatePreset, beta: f64, gamma_tau: f64) -> Result<f64> {
    let rates = wire.rates(preset, gamma_tau / wire.spec().tau(), temperature_for(wire, beta))?;
    Ok(kernel.evaluate(wire, &rates)?.fidelity)
}

/// `F⁽ᶜ⁾ − F⁽ᵃ⁾` over the grid.
pub fn dominance_region(wire: &Wire, grid: &SweepGrid, engine: Engine) -> Result<Partial<SweepPoint>> {
    let kernels = kernels(wire, &grid.schemes, engine)?;
    let tau = wire.spec().tau();
    let results: Vec<Result<SweepPoint>> = grid
        .points()
        .into_par_iter()
        .map(|(beta, gamma_tau)| {
            let rates = wire.rates(&grid.preset, gamma_tau / tau, temperature_for(wire, beta))?;
            let mut point =
                SweepPoint { beta, gamma_tau, f_a: f64::NAN, f_c: f64::NAN, p1: f64::NAN, p_ap: f64::NAN };
            for k in &kernels {
                let report = k.evaluate(wire, &rates)?;
                match k.scheme() {
                    Scheme::A => point.f_a = report.fidelity,
                    Scheme::C => {
                        point.f_c = report.fidelity;
                        point.p1 = report.p1;
                        point.p_ap = report.p_ap;
                    }
                }
            }
            Ok(point)
        })
        .collect();
    Ok(Partial::from_results(results))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdOptions {
    pub target: f64,
    /// Log-spaced scan range for `Γτ`.
    pub gamma_tau_min: f64,
    pub gamma_tau_max: f64,
    pub scan_points: usize,
    /// Bisection stops when `hi/lo − 1` falls below this.
    pub rel_tolerance: f64,
    /// Allowed increase of `F` between neighbouring scan points.
    pub monotone_slack: f64,
    pub engine: Engine,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self {
            target: 2.0 / 3.0,
            gamma_tau_min: 1e-10,
            gamma_tau_max: 1e2,
            scan_points: 73,
            rel_tolerance: 1e-3,
            monotone_slack: 1e-9,
            engine: Engine::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdStatus {
    Found,
    /// `F` stays above the target over the whole scan.
    AboveTarget,
    /// `F` is already below the target at the smallest `Γτ`.
    BelowTarget,
    /// `F` increased with `Γτ` by the given amount.
    NonMonotone(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdPoint {
    pub beta: f64,
    /// `NaN` unless `status` is `Found`.
    pub gamma_tau: f64,
    pub status: ThresholdStatus,
}

fn threshold_at(
    wire: &Wire,
    kernel: &ChannelKernel,
    preset: &RatePreset,
    beta: f64,
    opts: &ThresholdOptions,
) -> Result<ThresholdPoint> {
    let f = |g: f64| fidelity_at(wire, kernel, preset, beta, g);
    let miss = |status| ThresholdPoint { beta, gamma_tau: f64::NAN, status };
    let scan = logspace(opts.gamma_tau_min, opts.gamma_tau_max, opts.scan_points.max(2));
    let mut prev: Option<(f64, f64)> = None;
    for &g in &scan {
        let fg = f(g)?;
        if let Some((_, fp)) = prev {
            if fg > fp + opts.monotone_slack {
                return Ok(miss(ThresholdStatus::NonMonotone(fg - fp)));
            }
        }
        if fg < opts.target {
            let Some((mut lo, mut f_lo)) = prev else {
                return Ok(miss(ThresholdStatus::BelowTarget));
            };
            let (mut hi, mut f_hi) = (g, fg);
            while hi / lo - 1.0 > opts.rel_tolerance {
                let mid = (lo * hi).sqrt();
                let fm = f(mid)?;
                if fm > f_lo + opts.monotone_slack || fm < f_hi - opts.monotone_slack {
                    return Ok(miss(ThresholdStatus::NonMonotone((fm - f_lo).max(f_hi - fm))));
                }
                if fm < opts.target {
                    (hi, f_hi) = (mid, fm);
                } else {
                    (lo, f_lo) = (mid, fm);
                }
            }
            return Ok(ThresholdPoint { beta, gamma_tau: (lo * hi).sqrt(), status: ThresholdStatus::Found });
        }
        prev = Some((g, fg));
    }
    Ok(miss(ThresholdStatus::AboveTarget))
}

/// `Γτ` at which the average fidelity of `scheme` crosses `opts.target`,
/// for each `β`.
pub fn threshold_curve(
    wire: &Wire,
    scheme: Scheme,
    preset: &RatePreset,
    beta_axis: &[f64],
    opts: &ThresholdOptions,
) -> Result<Partial<ThresholdPoint>> {
    check_axis("beta", beta_axis)?;
    let kernel = kernels(wire, &[scheme], opts.engine)?.remove(0);
    let results = beta_axis.par_iter().map(|&b| threshold_at(wire, &kernel, preset, b, opts)).collect();
    Ok(Partial::from_results(results))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRow {
    pub beta: f64,
    pub a: ThresholdPoint,
    pub c: ThresholdPoint,
}

/// Both thresholds per `β`, as tabulated for the threshold figures.
pub fn threshold_table(
    wire: &Wire,
    preset: &RatePreset,
    beta_axis: &[f64],
    opts: &ThresholdOptions,
) -> Result<Partial<ThresholdRow>> {
    check_axis("beta", beta_axis)?;
    let ka = kernels(wire, &[Scheme::A], opts.engine)?.remove(0);
    let kc = kernels(wire, &[Scheme::C], opts.engine)?.remove(0);
    let results = beta_axis
        .par_iter()
        .map(|&b| {
            Ok(ThresholdRow {
                beta: b,
                a: threshold_at(wire, &ka, preset, b, opts)?,
                c: threshold_at(wire, &kc, preset, b, opts)?,
            })
        })
        .collect();
    Ok(Partial::from_results(results))
}
