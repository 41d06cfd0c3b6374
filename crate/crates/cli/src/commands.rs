use std::time::Instant;

use hydromag_core::classical::suites::{run_suite, SUITES};
use hydromag_core::numerics::make_context;
use hydromag_core::spectra::{self, RELATIVISTIC_GAUSS};
use hydromag_core::zeeman::{
    density_grid, solve_in_window, SectorLabel, SeriesSolution, SolveControls, SolveOptions, ZeemanError,
};
use hydromag_core::Float;
use rayon::prelude::*;

use crate::args::{ControlArgs, GridArgs, OutputArgs, ScanArgs, SpectrumArgs, StateArgs, VerifyArgs};
use crate::config::{load_config, resolve_controls, FileConfig};
use crate::output::{f64_str, float_str, Table};
use crate::{CliError, Report, EXIT_NOT_CONVERGED, EXIT_VERIFY};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_VERIFY_TOL: f64 = 1e-12;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn sector(m: i32, nu: u8) -> Result<SectorLabel, CliError> {
    SectorLabel::new(m, nu).map_err(|e| usage(e.to_string()))
}

/// γ as given (decimal string) or converted from gauss.
fn field(gamma: Option<&str>, gauss: Option<f64>) -> Result<String, CliError> {
    let text = match (gamma, gauss) {
        (Some(g), _) => g.trim().to_string(),
        (None, Some(b)) => f64_str(spectra::gamma_from_gauss(b).map_err(|e| usage(e.to_string()))?),
        (None, None) => "0".to_string(),
    };
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(text),
        _ => Err(usage(format!("gamma must be a finite nonnegative number, got `{text}`"))),
    }
}

struct Solved {
    solution: Result<SeriesSolution, ZeemanError>,
    controls: SolveControls,
    seconds: f64,
}

fn solve(s: SectorLabel, gamma: &str, index: usize, flags: &ControlArgs, cfg: &FileConfig) -> Result<Solved, CliError> {
    if index == 0 {
        return Err(usage("state index starts at 1"));
    }
    let g = gamma.parse::<f64>().map_err(|_| usage(format!("bad gamma `{gamma}`")))?;
    let (controls, convergence_tol) = resolve_controls(s, g, index, flags, cfg)?;
    let ctx = make_context(controls.digits).map_err(|e| usage(e.to_string()))?;
    let gamma = ctx.parse(gamma).map_err(|e| usage(e.to_string()))?;
    let mut options = SolveOptions::default_for(g);
    options.refine = !flags.no_refine;
    options.convergence_tol = convergence_tol;
    let start = Instant::now();
    let solution = solve_in_window(s, &gamma, index, &controls, &options);
    Ok(Solved { solution, controls, seconds: start.elapsed().as_secs_f64() })
}

fn opt(x: Option<f64>) -> Option<String> {
    x.map(f64_str)
}

pub fn energy(state: &StateArgs, flags: &ControlArgs, output: &OutputArgs) -> Result<Report, CliError> {
    let cfg = load_config(output)?;
    let s = sector(state.m, state.nu)?;
    let gamma = field(state.gamma.as_deref(), state.gauss)?;
    let solved = solve(s, &gamma, state.index, flags, &cfg)?;
    let (solution, code, mut notes) = match solved.solution {
        Ok(sol) => (sol, crate::EXIT_OK, Vec::new()),
        Err(ZeemanError::NotConverged { solution }) => {
            let note = format!("not converged: {}", solution.convergence);
            (*solution, EXIT_NOT_CONVERGED, vec![note])
        }
        Err(e) => return Err(e.into()),
    };
    notes.extend(solution.warnings.iter().map(|w| format!("warning: {w}")));
    notes.push(format!("wall_time: {:.3} s", solved.seconds));

    let mut cols = vec![
        "gamma",
        "m",
        "nu",
        "state_index",
        "E_b",
        "E_total",
        "digits",
        "i_max",
        "P",
        "r_match",
        "convergence_delta",
    ];
    if output.timing {
        cols.push("wall_time");
    }
    let mut t = Table::new(&cols);
    t.meta("command", "energy");
    t.meta("digits", solved.controls.digits);
    t.meta("convergence_tolerance", f64_str(solution.convergence.tolerance));
    t.meta("lost_digits", format!("{:.1}", solution.lost_digits));
    for w in &solution.warnings {
        t.meta("warning", w);
    }
    let c = &solved.controls;
    let mut row = vec![
        Some(gamma),
        Some(s.m.to_string()),
        Some(s.nu.to_string()),
        Some(state.index.to_string()),
        Some(float_str(solution.e_b())),
        Some(float_str(&solution.total_energy)),
        Some(c.digits.to_string()),
        Some(c.i_max.to_string()),
        Some(c.n_constants.to_string()),
        Some(f64_str(c.r_match)),
        opt(solution.convergence.max_delta()),
    ];
    if output.timing {
        row.push(Some(format!("{:.3}", solved.seconds)));
    }
    t.push(row);
    Ok(Report { table: t, code, notes })
}

struct Point {
    gamma: String,
    sector: SectorLabel,
    index: usize,
    result: Result<(Float, Float), &'static str>,
}

/// Local minima of the gap between adjacent levels along the γ grid.
fn gap_minima(points: &[Point], gammas: usize, sectors: &[SectorLabel], levels: usize) -> Vec<Vec<Option<String>>> {
    let at = |gi: usize, si: usize, li: usize| &points[(gi * sectors.len() + si) * levels + li];
    let mut rows = Vec::new();
    for (si, s) in sectors.iter().enumerate() {
        for li in 0..levels.saturating_sub(1) {
            let gaps: Vec<Option<Float>> = (0..gammas)
                .map(|gi| match (&at(gi, si, li).result, &at(gi, si, li + 1).result) {
                    (Ok((a, _)), Ok((b, _))) => Some(Float::with_val(a.prec().max(b.prec()), a - b)),
                    _ => None,
                })
                .collect();
            for gi in 1..gammas.saturating_sub(1) {
                if let (Some(prev), Some(g), Some(next)) = (&gaps[gi - 1], &gaps[gi], &gaps[gi + 1]) {
                    if g < prev && g <= next {
                        rows.push(vec![
                            Some("min_gap".into()),
                            Some(at(gi, si, li).gamma.clone()),
                            Some(s.m.to_string()),
                            Some(s.nu.to_string()),
                            Some((li + 1).to_string()),
                            None,
                            None,
                            Some(float_str(g)),
                            Some("ok".into()),
                        ]);
                    }
                }
            }
        }
    }
    rows
}

pub fn scan(a: &ScanArgs) -> Result<Report, CliError> {
    let cfg = load_config(&a.output)?;
    if !(a.gamma_lo.is_finite() && a.gamma_hi.is_finite() && a.gamma_lo >= 0.0) {
        return Err(usage("gamma range must be finite and nonnegative"));
    }
    if a.gamma_lo >= a.gamma_hi {
        return Err(usage(format!("empty gamma range [{}, {}]", a.gamma_lo, a.gamma_hi)));
    }
    if a.steps < 2 || a.levels < 1 {
        return Err(usage("scan needs at least 2 steps and 1 level"));
    }
    let jobs = a.jobs.or(cfg.jobs).unwrap_or(0);
    let sectors = a.sectors.iter().map(|&(m, nu)| sector(m, nu)).collect::<Result<Vec<_>, _>>()?;
    let gammas: Vec<String> = (0..a.steps)
        .map(|k| {
            let x = if k + 1 == a.steps {
                a.gamma_hi
            } else {
                a.gamma_lo + (a.gamma_hi - a.gamma_lo) * k as f64 / (a.steps - 1) as f64
            };
            f64_str(x)
        })
        .collect();
    // Fail fast on bad controls before dispatching work.
    resolve_controls(sectors[0], a.gamma_hi, a.levels, &a.controls, &cfg)?;

    let tasks: Vec<(String, SectorLabel, usize)> = gammas
        .iter()
        .flat_map(|g| sectors.iter().flat_map(move |&s| (1..=a.levels).map(move |i| (g.clone(), s, i))))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| usage(e.to_string()))?;
    let points: Vec<Point> = pool.install(|| {
        tasks
            .par_iter()
            .map(|(g, s, i)| {
                let result = match solve(*s, g, *i, &a.controls, &cfg).map(|x| x.solution) {
                    Ok(Ok(sol)) => Ok((sol.e_b().clone(), sol.total_energy.clone())),
                    Ok(Err(ZeemanError::StateNotFound { .. })) => Err("not-found"),
                    Ok(Err(ZeemanError::NotConverged { .. })) => Err("not-converged"),
                    _ => Err("error"),
                };
                Point { gamma: g.clone(), sector: *s, index: *i, result }
            })
            .collect()
    });

    let mut t = Table::new(&["record", "gamma", "m", "nu", "state_index", "E_b", "E_total", "gap", "status"]);
    t.meta("command", "scan");
    t.meta("levels_per_sector", a.levels);
    let failed = points.iter().filter(|p| p.result.is_err()).count();
    for p in &points {
        let (e_b, e_tot, status) = match &p.result {
            Ok((b, e)) => (Some(float_str(b)), Some(float_str(e)), "ok"),
            Err(s) => (None, None, *s),
        };
        t.push(vec![
            Some("level".into()),
            Some(p.gamma.clone()),
            Some(p.sector.m.to_string()),
            Some(p.sector.nu.to_string()),
            Some(p.index.to_string()),
            e_b,
            e_tot,
            None,
            Some(status.into()),
        ]);
    }
    for row in gap_minima(&points, gammas.len(), &sectors, a.levels) {
        t.push(row);
    }
    let mut r = Report::ok(t);
    if failed > 0 {
        r.notes.push(format!("{failed} of {} points failed; recorded as empty fields", points.len()));
    }
    Ok(r)
}

pub fn density(
    state: &StateArgs,
    grid: &GridArgs,
    flags: &ControlArgs,
    output: &OutputArgs,
) -> Result<Report, CliError> {
    let cfg = load_config(output)?;
    let s = sector(state.m, state.nu)?;
    let gamma = field(state.gamma.as_deref(), state.gauss)?;
    let solved = solve(s, &gamma, state.index, flags, &cfg)?;
    let solution = solved.solution?;
    let r = solution.controls.r_match;
    let g = density_grid(&solution, grid.rho_max.unwrap_or(r), grid.z_max.unwrap_or(r), grid.n_rho, grid.n_z)
        .map_err(|e| usage(e.to_string()))?;
    let mut t = Table::new(&["rho", "z", "density"]);
    t.meta("command", "density");
    t.meta("gamma", &gamma);
    t.meta("m", s.m);
    t.meta("nu", s.nu);
    t.meta("state_index", state.index);
    t.meta("E_b", float_str(solution.e_b()));
    t.meta("digits", solution.controls.digits);
    t.meta("normalization", f64_str(g.norm_integral));
    t.meta("clipped_samples", g.clipped);
    for (l, z) in g.z.iter().enumerate() {
        for (j, rho) in g.rho.iter().enumerate() {
            t.push(vec![Some(f64_str(*rho)), Some(f64_str(*z)), Some(f64_str(g.at(j, l)))]);
        }
    }
    Ok(Report::ok(t))
}

pub fn spectrum(a: &SpectrumArgs) -> Result<Report, CliError> {
    let err = |e: spectra::SpectraError| usage(e.to_string());
    let mut t = Table::new(&["quantity", "value"]);
    t.meta("command", "spectrum");
    let mut put = |k: &str, v: String| t.push(vec![Some(k.to_string()), Some(v)]);
    let mut any = false;
    if let Some(n) = a.bohr {
        put("n", n.to_string());
        put("bohr_level", f64_str(spectra::bohr_level(n).map_err(err)?));
        put("bohr_level_exact", spectra::bohr_level_exact(n).map_err(err)?.to_string());
        put("multiplicity", spectra::level_multiplicity(n).map_err(err)?.to_string());
        any = true;
    }
    let gamma = match (a.gamma, a.gauss) {
        (Some(g), _) => {
            put("gamma", f64_str(g));
            put("gauss", f64_str(spectra::gauss_from_gamma(g).map_err(err)?));
            Some(g)
        }
        (None, Some(b)) => {
            let g = spectra::gamma_from_gauss(b).map_err(err)?;
            put("gauss", f64_str(b));
            put("gamma", f64_str(g));
            Some(g)
        }
        _ => None,
    };
    any |= gamma.is_some();
    if let Some(n) = a.landau {
        let g = gamma.ok_or_else(|| usage("--landau needs --gamma or --gauss"))?;
        put("landau_n", n.to_string());
        put("landau_level", f64_str(spectra::landau_level(n, g).map_err(err)?));
        any = true;
    }
    if let Some(name) = &a.material {
        let m = spectra::material(name).ok_or_else(|| usage(format!("unknown material `{name}`")))?;
        put("material", m.name.to_string());
        put("mass_ratio", f64_str(m.mass_ratio));
        put("epsilon", f64_str(m.epsilon));
        put("effective_field_gauss", f64_str(m.effective_field()));
        any = true;
    }
    if !any {
        return Err(usage("spectrum needs at least one of --bohr, --landau, --gamma, --gauss, --material"));
    }
    let mut r = Report::ok(t);
    if let Some(g) = gamma {
        if g * spectra::B0_GAUSS > RELATIVISTIC_GAUSS {
            r.notes.push("warning: field exceeds the nonrelativistic range".into());
        }
    }
    Ok(r)
}

pub fn verify(a: &VerifyArgs) -> Result<Report, CliError> {
    let cfg = load_config(&a.output)?;
    let suites: Vec<&str> =
        if a.suites.is_empty() { SUITES.to_vec() } else { a.suites.iter().map(String::as_str).collect() };
    if let Some(bad) = suites.iter().find(|s| !SUITES.contains(s)) {
        return Err(usage(format!("unknown suite `{bad}`; expected one of {}", SUITES.join(", "))));
    }
    let seed = a.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let tol = a.tol.or(cfg.tol).unwrap_or(DEFAULT_VERIFY_TOL);
    if !(tol.is_finite() && tol > 0.0 && tol < 1.0) {
        return Err(usage(format!("tol must lie in (0, 1), got {tol}")));
    }
    let mut t = Table::new(&["suite", "check", "max_error", "tolerance", "status"]);
    t.meta("command", "verify");
    t.meta("seed", seed);
    t.meta("tol", f64_str(tol));
    let mut notes = Vec::new();
    let (mut failed, mut checks) = (0, 0);
    for name in suites {
        match run_suite(name, seed, tol) {
            Ok(report) => {
                for c in &report.checks {
                    let pass = c.passed();
                    failed += usize::from(!pass);
                    checks += 1;
                    if !pass {
                        notes.push(c.to_string());
                    }
                    t.push(vec![
                        Some(report.suite.clone()),
                        Some(c.name.clone()),
                        Some(f64_str(c.max_error)),
                        Some(f64_str(c.tolerance)),
                        Some(if pass { "PASS" } else { "FAIL" }.into()),
                    ]);
                }
            }
            Err(e) => {
                failed += 1;
                notes.push(format!("FAIL {name}: {e}"));
                t.push(vec![Some(name.into()), None, None, None, Some("FAIL".into())]);
            }
        }
    }
    notes.push(format!("verify: {checks} checks, {failed} failed"));
    let code = if failed > 0 { EXIT_VERIFY } else { crate::EXIT_OK };
    Ok(Report { table: t, code, notes })
}
