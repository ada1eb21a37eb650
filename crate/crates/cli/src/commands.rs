use std::fs::File;
use std::io::{self, BufWriter, Write};

use log::info;
use qwire::analysis::csv::{format_float, write_comments, write_error_trailer, write_row, write_sweep, THRESHOLD_HEADER};
use qwire::analysis::{
    dominance_region, fit_collision_exponents, perturbative_fidelity, threshold_curve, Partial, SweepGrid,
    ThresholdOptions, ThresholdPoint, ThresholdStatus,
};
use qwire::chain::{build_oqs_hamiltonian, diagonalize_oqs};
use qwire::dynamics::{RatePreset, Temperature};
use qwire::transfer::{haar_average_fidelity, Pauli, Scheme, TransferOptions, Wire};
use qwire::verify::{self, VerifyOptions};
use qwire::Omega;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::error::CliError;

type Echo = Vec<(String, String)>;

fn sink(cfg: &RunConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cfg.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn wire(cfg: &RunConfig) -> Result<Wire, CliError> {
    Ok(Wire::new(cfg.spec()?)?)
}

fn kv(out: &mut dyn Write, key: &str, value: f64) -> io::Result<()> {
    writeln!(out, "{key}={}", format_float(value))
}

pub fn spectrum(cfg: &RunConfig, command: &str, perturbation: f64) -> Result<(), CliError> {
    let spec = cfg.spec()?;
    let mut h = build_oqs_hamiltonian(&spec);
    h.diag[0] += perturbation;
    let basis = diagonalize_oqs(&h)?;
    let n = spec.n();
    let mut echo: Echo = cfg.echo(command);
    if perturbation != 0.0 {
        echo.push(("perturb_spectrum".into(), format_float(perturbation)));
    }
    let mut out = sink(cfg)?;
    write_comments(&mut out, &echo)?;
    let header: Vec<String> =
        ["k".to_string(), "E_k".to_string()].into_iter().chain((1..=n).map(|j| format!("b_k{j}"))).collect();
    writeln!(out, "{}", header.join(","))?;
    for k in 0..n {
        let row: Vec<f64> =
            [(k + 1) as f64, basis.energies()[k]].into_iter().chain((0..n).map(|j| basis.amplitude(k, j))).collect();
        write_row(&mut out, &row)?;
    }
    let spectrum = (0..n)
        .map(|k| (basis.energies()[k] - (2.0 * (k + 1) as f64 - n as f64 - 1.0) * spec.coupling()).abs())
        .fold(0.0, f64::max);
    let vectors = basis.orthogonality_residual().max(basis.reconstruction_residual(&h));
    writeln!(out, "# spectrum_residual={}", format_float(spectrum))?;
    writeln!(out, "# eigenvector_residual={}", format_float(vectors))?;
    let ok = spectrum <= 1e-9 && vectors <= 1e-9;
    if !ok {
        write_error_trailer(&mut out, "spectrum invariant failed")?;
    }
    out.flush()?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "spectrum invariant failed: energy residual {spectrum:.3e}, eigenvector residual {vectors:.3e}"
        )))
    }
}

pub fn fidelity(cfg: &RunConfig, command: &str) -> Result<(), CliError> {
    let wire = wire(cfg)?;
    let rates = wire.rates(&cfg.rates, cfg.gamma, cfg.temperature).map_err(|e| CliError::Usage(e.to_string()))?;
    let opts = TransferOptions { time: cfg.time, engine: cfg.engine.engine(), ..TransferOptions::default() };
    let mut out = sink(cfg)?;
    write_comments(&mut out, &cfg.echo(command))?;
    for &k in rates.inverted_modes() {
        let e = wire.basis().energies()[k];
        writeln!(
            out,
            "# note: mode {} has omega+E = {} < 0; absorption and emission exchange roles",
            k + 1,
            format_float(wire.spec().omega().finite().unwrap_or(f64::INFINITY) + e)
        )?;
    }
    let mut failures = Vec::new();
    for &scheme in &cfg.schemes {
        let report = match wire.channel(&rates, scheme, &opts) {
            Ok(r) => r,
            Err(e) => {
                write_error_trailer(&mut out, &e.to_string())?;
                out.flush()?;
                return Err(e.into());
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        writeln!(out, "scheme={scheme}")?;
        kv(&mut out, "fidelity", report.fidelity)?;
        if cfg.time.is_none() {
            kv(&mut out, "fidelity_first_order", perturbative_fidelity(&wire, &rates, scheme)?)?;
        }
        kv(&mut out, "fidelity_haar", haar_average_fidelity(&report.map, cfg.haar_samples, &mut rng))?;
        kv(&mut out, "p1", report.p1)?;
        kv(&mut out, "p_ap", report.p_ap)?;
        kv(&mut out, "p_ap_single", report.p_ap_single)?;
        for (row, p) in Pauli::ALL.iter().enumerate() {
            let vals: Vec<String> = (0..4).map(|c| format_float(report.map.lambda[(row, c)])).collect();
            writeln!(out, "lambda_{p:?}={}", vals.join(","))?;
        }
        let d = &report.diagnostics;
        writeln!(out, "steps={}", d.steps)?;
        kv(&mut out, "trace_drift", d.trace_drift)?;
        kv(&mut out, "hermiticity", d.hermiticity)?;
        kv(&mut out, "first_row_residual", report.first_row_residual)?;
        if d.trace_drift > 1e-8 || d.hermiticity > 1e-9 || report.first_row_residual > 1e-8 || d.positivity_warning {
            failures.push(format!(
                "scheme {scheme}: trace drift {:.3e}, hermiticity {:.3e}, first row {:.3e}",
                d.trace_drift, d.hermiticity, report.first_row_residual
            ));
        }
    }
    if !failures.is_empty() {
        write_error_trailer(&mut out, &failures.join("; "))?;
    }
    out.flush()?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(failures.join("; ")))
    }
}

fn finish_partial<T>(out: &mut Box<dyn Write>, partial: &Partial<T>) -> Result<(), CliError> {
    if let Some(e) = &partial.error {
        write_error_trailer(out, &e.to_string())?;
    }
    out.flush()?;
    match &partial.error {
        Some(e) => Err(CliError::Numerical(e.to_string())),
        None => Ok(()),
    }
}

fn check_preset(cfg: &RunConfig, wire: &Wire) -> Result<(), CliError> {
    let probe = match cfg.omega {
        Omega::Infinite => Temperature::BetaPrime(0.0),
        Omega::Finite(_) => Temperature::Beta(0.0),
    };
    wire.rates(&cfg.rates, 0.0, probe).map(|_| ()).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn sweep(cfg: &RunConfig, command: &str) -> Result<(), CliError> {
    let wire = wire(cfg)?;
    check_preset(cfg, &wire)?;
    let grid = SweepGrid::new(cfg.axis("beta")?, cfg.axis("gamma_tau")?, cfg.schemes.clone(), cfg.rates.clone())
        .map_err(|e| CliError::Usage(e.to_string()))?;
    info!("sweep over {} grid points", grid.points().len());
    let partial = dominance_region(&wire, &grid, cfg.engine.engine())?;
    let mut out = sink(cfg)?;
    write_sweep(&mut out, &cfg.echo(command), &partial.rows)?;
    finish_partial(&mut out, &partial)
}

fn status_note(scheme: Scheme, p: &ThresholdPoint) -> Option<String> {
    match p.status {
        ThresholdStatus::Found => None,
        ThresholdStatus::AboveTarget => Some(format!("beta={}: scheme {scheme} stays above target", format_float(p.beta))),
        ThresholdStatus::BelowTarget => {
            Some(format!("beta={}: scheme {scheme} below target at smallest gamma_tau", format_float(p.beta)))
        }
        ThresholdStatus::NonMonotone(d) => Some(format!(
            "beta={}: scheme {scheme} fidelity not monotone in gamma_tau (rise {})",
            format_float(p.beta),
            format_float(d)
        )),
    }
}

pub fn threshold(cfg: &RunConfig, command: &str) -> Result<(), CliError> {
    let wire = wire(cfg)?;
    check_preset(cfg, &wire)?;
    let betas = cfg.axis("beta")?;
    let opts = ThresholdOptions { target: cfg.target, engine: cfg.engine.engine(), ..ThresholdOptions::default() };
    let mut columns: Vec<Option<Partial<ThresholdPoint>>> = Vec::new();
    for scheme in Scheme::BOTH {
        columns.push(if cfg.schemes.contains(&scheme) {
            Some(threshold_curve(&wire, scheme, &cfg.rates, &betas, &opts).map_err(|e| CliError::Usage(e.to_string()))?)
        } else {
            None
        });
    }
    let complete = columns.iter().flatten().map(|p| p.rows.len()).min().unwrap_or(betas.len());
    let error = columns.iter().flatten().find_map(|p| p.error.as_ref()).map(ToString::to_string);

    let mut out = sink(cfg)?;
    write_comments(&mut out, &cfg.echo(command))?;
    for (scheme, col) in Scheme::BOTH.iter().zip(&columns) {
        for p in col.iter().flat_map(|c| c.rows.iter().take(complete)) {
            if let Some(note) = status_note(*scheme, p) {
                writeln!(out, "# note: {note}")?;
            }
        }
    }
    writeln!(out, "{THRESHOLD_HEADER}")?;
    for (i, &beta) in betas.iter().enumerate().take(complete) {
        let value = |c: &Option<Partial<ThresholdPoint>>| c.as_ref().map_or(f64::NAN, |p| p.rows[i].gamma_tau);
        write_row(&mut out, &[beta, value(&columns[0]), value(&columns[1])])?;
    }
    if let Some(e) = &error {
        write_error_trailer(&mut out, e)?;
    }
    out.flush()?;
    match error {
        Some(e) => Err(CliError::Numerical(e)),
        None => Ok(()),
    }
}

pub fn fit(cfg: &RunConfig, command: &str) -> Result<(), CliError> {
    if cfg.omega != Omega::Infinite || cfg.rates != RatePreset::Uniform {
        return Err(CliError::Usage("fit needs omega=inf and uniform rates".into()));
    }
    let wire = wire(cfg)?;
    let samples = cfg.axis("gamma_t")?;
    let result = fit_collision_exponents(&wire, cfg.temperature.value(), &samples, cfg.engine.engine())?;
    let mut echo = cfg.echo(command);
    for (k, v) in [
        ("a1", result.a1),
        ("a2", result.a2),
        ("a2_two_spin", result.a2_two_spin),
        ("residual_a1", result.residual1),
        ("residual_a2", result.residual2),
        ("residual_a2_two_spin", result.residual2_two_spin),
    ] {
        echo.push((k.into(), format_float(v)));
    }
    let mut out = sink(cfg)?;
    write_comments(&mut out, &echo)?;
    writeln!(out, "gamma_t,x,F_c,p1,p_ap,p_ap_single,used")?;
    for s in &result.samples {
        write_row(&mut out, &[s.gamma_t, s.x, s.fidelity, s.p1, s.p_ap, s.p_ap_single, s.used as u8 as f64])?;
    }
    out.flush()?;
    Ok(())
}

pub fn verify(cfg: &RunConfig, perturbation: f64) -> Result<(), CliError> {
    let checks = verify::run(&VerifyOptions {
        spectrum_perturbation: perturbation,
        seed: cfg.seed,
        ..VerifyOptions::default()
    });
    let mut out = sink(cfg)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        writeln!(out, "{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
    }
    writeln!(out, "{} checks, {} failed", checks.len(), failed)?;
    out.flush()?;
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("{failed} invariant checks failed")))
    }
}
