use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use kramers_reset::analysis::{
    find_minima, sweep_deterministic, sweep_initial_condition, sweep_noise, sweep_poisson,
};
use kramers_reset::fpt_engine::run_ensemble;
use kramers_reset::io;
use kramers_reset::rng::derive_seed;
use kramers_reset::stats::{
    build_histogram, detect_peaks, fit_exponential_decay, renewal_prediction_with_se, summarize,
};
use kramers_reset::{
    FptSamples, PotentialSpec, ResetPoint, ResetSchedule, SimParams, SummaryStats, SweepCurve,
};

use crate::grid::parse_grid;
use crate::manifest::RunManifest;
use crate::{
    CliError, Format, HistogramArgs, OracleCheckArgs, OutputArgs, PhysicsArgs, SimulateArgs,
    SweepArgs, SweepKind,
};

fn resolve_physics(args: &PhysicsArgs) -> Result<(PotentialSpec, SimParams), CliError> {
    let spec = PotentialSpec::new(args.alpha, args.beta)?;
    let absorb_x = match args.absorb_x {
        Some(x) => x,
        None => spec.landmarks()?.x_plus,
    };
    let params = SimParams {
        eta: args.eta,
        eps: args.eps,
        x0: args.x0,
        v0: args.v0,
        dt: args.dt,
        t_max: args.t_max,
        absorb_x,
        validate_x: args.validate_x,
    };
    params.validate()?;
    if !params.is_light_damping(&spec) {
        eprintln!(
            "warning: eta^2 = {} is not below alpha = {}; outside the light-damping regime",
            args.eta * args.eta,
            args.alpha
        );
    }
    Ok((spec, params))
}

fn resolve_threads(output: &OutputArgs) -> Result<(), CliError> {
    let threads = match output.threads {
        Some(k) => Some(k),
        None => match std::env::var("KRAMERS_RESET_THREADS") {
            Ok(v) => Some(v.parse::<usize>().map_err(|_| {
                CliError::new(
                    2,
                    format!("KRAMERS_RESET_THREADS must be an integer, got `{v}`"),
                )
            })?),
            Err(_) => None,
        },
    };
    if let Some(k) = threads {
        if k == 0 {
            return Err(CliError::new(2, "thread count must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::new(1, format!("thread pool setup failed: {e}")))?;
    }
    Ok(())
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Result<String, CliError> {
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path.display().to_string())
}

fn physics_argv(p: &PhysicsArgs, absorb_x: f64) -> Vec<String> {
    vec![
        "--alpha".into(),
        p.alpha.to_string(),
        "--beta".into(),
        p.beta.to_string(),
        "--eta".into(),
        p.eta.to_string(),
        "--eps".into(),
        p.eps.to_string(),
        "--x0".into(),
        p.x0.to_string(),
        "--v0".into(),
        p.v0.to_string(),
        "--dt".into(),
        p.dt.to_string(),
        "--t-max".into(),
        p.t_max.to_string(),
        "--absorb-x".into(),
        absorb_x.to_string(),
        "--validate-x".into(),
        p.validate_x.to_string(),
    ]
}

fn output_argv(o: &OutputArgs) -> Vec<String> {
    let mut argv = Vec::new();
    if let Some(k) = o.threads {
        argv.push("--threads".into());
        argv.push(k.to_string());
    }
    argv.push("--out-dir".into());
    argv.push(o.out_dir.display().to_string());
    argv.push("--format".into());
    argv.push(o.format.literal().into());
    argv
}

fn params_json(spec: &PotentialSpec, params: &SimParams, n: usize, seed: u64) -> serde_json::Value {
    serde_json::json!({
        "alpha": spec.alpha,
        "beta": spec.beta,
        "eta": params.eta,
        "eps": params.eps,
        "x0": params.x0,
        "v0": params.v0,
        "dt": params.dt,
        "t_max": params.t_max,
        "absorb_x": params.absorb_x,
        "validate_x": params.validate_x,
        "n": n,
        "seed": seed,
    })
}

fn print_summary(samples: &FptSamples) -> Result<SummaryStats, kramers_reset::Error> {
    let n = samples.n();
    let censored = samples.n_censored();
    println!("n = {n}, escaped = {}, censored = {censored}", n - censored);
    let stats = summarize(samples)?;
    println!(
        "MFPT = {:.6} +/- {:.6} (95% CI), sigma = {:.6}, CV = {:.6}",
        stats.mean, stats.ci95_half_width, stats.std_dev, stats.cv
    );
    Ok(stats)
}

fn write_samples(
    samples: &FptSamples,
    format: Format,
    dir: &Path,
    outputs: &mut Vec<String>,
) -> Result<(), CliError> {
    if format.csv() {
        outputs.push(write_output(
            dir,
            "samples.csv",
            &io::samples_to_csv(samples),
        )?);
    }
    if format.json() {
        outputs.push(write_output(
            dir,
            "samples.json",
            &io::samples_to_json(samples)?,
        )?);
    }
    Ok(())
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let (spec, params) = resolve_physics(&args.physics)?;
    let schedule: ResetSchedule = args.reset.parse()?;
    resolve_threads(&args.output)?;
    fs::create_dir_all(&args.output.out_dir)?;

    let reset_point = ResetPoint::at(params.x0);
    let samples = run_ensemble(
        &spec,
        &params,
        &schedule,
        &reset_point,
        args.ensemble.n,
        args.ensemble.seed,
    )?;

    let mut outputs = Vec::new();
    write_samples(
        &samples,
        args.output.format,
        &args.output.out_dir,
        &mut outputs,
    )?;

    let mut argv = vec!["simulate".to_string()];
    argv.extend(physics_argv(&args.physics, params.absorb_x));
    argv.extend([
        "--n".into(),
        args.ensemble.n.to_string(),
        "--seed".into(),
        args.ensemble.seed.to_string(),
        "--reset".into(),
        schedule.literal(),
    ]);
    argv.extend(output_argv(&args.output));

    let mut manifest = RunManifest::new("simulate", argv, schedule.literal(), args.ensemble.seed);
    manifest.parameters = params_json(&spec, &params, args.ensemble.n, args.ensemble.seed);
    manifest.outputs = outputs;
    manifest.duration_seconds = started.elapsed().as_secs_f64();
    manifest.write(&args.output.out_dir)?;

    print_summary(&samples)?;
    Ok(())
}

fn write_curve(
    curve: &SweepCurve,
    format: Format,
    dir: &Path,
    outputs: &mut Vec<String>,
) -> Result<(), CliError> {
    if format.csv() {
        outputs.push(write_output(
            dir,
            "curve.csv",
            &io::sweep_curve_to_csv(curve),
        )?);
    }
    if format.json() {
        outputs.push(write_output(
            dir,
            "curve.json",
            &io::sweep_curve_to_json(curve)?,
        )?);
    }
    Ok(())
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let (spec, params) = resolve_physics(&args.physics)?;
    resolve_threads(&args.output)?;
    fs::create_dir_all(&args.output.out_dir)?;

    let (grid_flag, grid_literal) = match args.kind {
        SweepKind::Tr => ("--grid", args.grid.as_deref().unwrap_or("1.2:0.2:8")),
        SweepKind::Rate => (
            "--theta-grid",
            args.theta_grid.as_deref().unwrap_or("1:0.5:12"),
        ),
        SweepKind::Noise => (
            "--grid",
            args.grid.as_deref().unwrap_or("1.296:0.108:2.376"),
        ),
        SweepKind::X0 => ("--grid", args.grid.as_deref().unwrap_or("-2.9:0.1:5.9")),
    };
    let grid = parse_grid(grid_literal).map_err(|e| CliError::new(2, e))?;
    let n = args.ensemble.n;
    let seed = args.ensemble.seed;
    let reset_point = ResetPoint::at(params.x0);

    let (kind_name, curve) = match args.kind {
        SweepKind::Tr => (
            "tr",
            sweep_deterministic(&spec, &params, &reset_point, &grid, n, seed)?,
        ),
        SweepKind::Rate => (
            "rate",
            sweep_poisson(&spec, &params, &reset_point, &grid, n, seed)?,
        ),
        SweepKind::Noise => ("noise", sweep_noise(&spec, &params, &grid, n, seed)?),
        SweepKind::X0 => (
            "x0",
            sweep_initial_condition(&spec, &params, &grid, n, seed)?,
        ),
    };

    println!("{},mean,std,ci95,cv", curve.control_name);
    for p in &curve.points {
        println!(
            "{},{:.6},{:.6},{:.6},{:.6}",
            p.control, p.stats.mean, p.stats.std_dev, p.stats.ci95_half_width, p.stats.cv
        );
    }

    let mut outputs = Vec::new();
    write_curve(
        &curve,
        args.output.format,
        &args.output.out_dir,
        &mut outputs,
    )?;

    // minima are meaningful for the resetting sweeps, where a no-reset
    // baseline exists
    if matches!(args.kind, SweepKind::Tr | SweepKind::Rate) {
        let baseline_samples = run_ensemble(
            &spec,
            &params,
            &ResetSchedule::NoReset,
            &reset_point,
            n,
            derive_seed(seed, u64::MAX),
        )?;
        let baseline = summarize(&baseline_samples)?.mean;
        let report = find_minima(&curve, baseline)?;
        match report.global_min {
            Some((control, mean)) => println!(
                "baseline MFPT = {:.6}; global minimum at {} = {} (MFPT {:.6}, ratio {:.4})",
                baseline,
                curve.control_name,
                control,
                mean,
                report.ratio_at_global.unwrap_or(f64::NAN)
            ),
            None => println!("baseline MFPT = {baseline:.6}; no CI-separated minimum found"),
        }
        if args.output.format.csv() {
            outputs.push(write_output(
                &args.output.out_dir,
                "minima.csv",
                &io::minima_report_to_csv(&report),
            )?);
        }
        if args.output.format.json() {
            outputs.push(write_output(
                &args.output.out_dir,
                "minima.json",
                &io::minima_report_to_json(&report)?,
            )?);
        }
    }

    let mut argv = vec!["sweep".to_string(), kind_name.to_string()];
    argv.extend(physics_argv(&args.physics, params.absorb_x));
    argv.extend([
        "--n".into(),
        n.to_string(),
        "--seed".into(),
        seed.to_string(),
        grid_flag.into(),
        grid_literal.to_string(),
    ]);
    argv.extend(output_argv(&args.output));

    let mut manifest = RunManifest::new("sweep", argv, "per-point".to_string(), seed);
    manifest.parameters = params_json(&spec, &params, n, seed);
    manifest.outputs = outputs;
    manifest.duration_seconds = started.elapsed().as_secs_f64();
    manifest.write(&args.output.out_dir)?;
    Ok(())
}

pub fn histogram(args: &HistogramArgs) -> Result<(), CliError> {
    let started = Instant::now();
    resolve_threads(&args.output)?;
    fs::create_dir_all(&args.output.out_dir)?;
    let mut outputs = Vec::new();

    let fresh_setup = match &args.samples {
        Some(_) => None,
        None => Some(resolve_physics(&args.physics)?),
    };
    let (samples, schedule) = match &args.samples {
        Some(path) => {
            let json = fs::read_to_string(path)?;
            let samples = io::samples_from_json(&json)?;
            let schedule = samples.schedule;
            (samples, schedule)
        }
        None => {
            let (spec, params) = fresh_setup.expect("resolved above");
            let schedule: ResetSchedule = args.reset.parse()?;
            let samples = run_ensemble(
                &spec,
                &params,
                &schedule,
                &ResetPoint::at(params.x0),
                args.ensemble.n,
                args.ensemble.seed,
            )?;
            write_samples(
                &samples,
                args.output.format,
                &args.output.out_dir,
                &mut outputs,
            )?;
            (samples, schedule)
        }
    };

    let hist = build_histogram(&samples, args.bin_width)?;
    if args.output.format.csv() {
        outputs.push(write_output(
            &args.output.out_dir,
            "histogram.csv",
            &io::histogram_to_csv(&hist),
        )?);
    }
    if args.output.format.json() {
        outputs.push(write_output(
            &args.output.out_dir,
            "histogram.json",
            &io::histogram_to_json(&hist)?,
        )?);
    }
    println!(
        "histogram: {} bins of width {}, {} samples",
        hist.bins.len(),
        hist.bin_width,
        samples.n()
    );

    if args.fit_decay {
        let peaks = detect_peaks(&hist, args.window)?;
        let floor = args.min_peak_count as f64 / samples.n() as f64;
        let fit_peaks: Vec<(f64, f64)> = peaks
            .iter()
            .copied()
            .filter(|&(_, rf)| rf >= floor)
            .collect();
        let fit = fit_exponential_decay(&fit_peaks)?;
        println!(
            "decay fit over {} peaks: RF = {:.6} * exp(-{:.6} t), R^2 = {:.6}",
            fit_peaks.len(),
            fit.a,
            fit.b,
            fit.r_squared
        );
        if args.output.format.csv() {
            outputs.push(write_output(
                &args.output.out_dir,
                "decay_fit.csv",
                &io::decay_fit_to_csv(&fit),
            )?);
        }
        if args.output.format.json() {
            #[derive(Serialize)]
            struct FitDocument {
                n_peaks_detected: usize,
                n_peaks_fitted: usize,
                window: usize,
                min_peak_count: usize,
                peaks: Vec<(f64, f64)>,
                fit: kramers_reset::DecayFit,
            }
            let doc = FitDocument {
                n_peaks_detected: peaks.len(),
                n_peaks_fitted: fit_peaks.len(),
                window: args.window,
                min_peak_count: args.min_peak_count,
                peaks: fit_peaks.clone(),
                fit,
            };
            outputs.push(write_output(
                &args.output.out_dir,
                "decay_fit.json",
                &serde_json::to_string_pretty(&doc).map_err(kramers_reset::Error::from)?,
            )?);
        }
    }

    let mut argv = vec!["histogram".to_string()];
    match &args.samples {
        Some(path) => argv.extend(["--samples".into(), path.display().to_string()]),
        None => {
            argv.extend(physics_argv(&args.physics, samples.params.absorb_x));
            argv.extend([
                "--n".into(),
                args.ensemble.n.to_string(),
                "--seed".into(),
                args.ensemble.seed.to_string(),
                "--reset".into(),
                schedule.literal(),
            ]);
        }
    }
    argv.extend(["--bin-width".into(), args.bin_width.to_string()]);
    if args.fit_decay {
        argv.push("--fit-decay".into());
        argv.extend(["--window".into(), args.window.to_string()]);
        argv.extend(["--min-peak-count".into(), args.min_peak_count.to_string()]);
    }
    argv.extend(output_argv(&args.output));

    let mut manifest = RunManifest::new("histogram", argv, schedule.literal(), samples.master_seed);
    manifest.parameters = params_json(
        &samples.potential,
        &samples.params,
        samples.n(),
        samples.master_seed,
    );
    manifest.outputs = outputs;
    manifest.duration_seconds = started.elapsed().as_secs_f64();
    manifest.write(&args.output.out_dir)?;
    Ok(())
}

#[derive(Serialize)]
struct OracleRow {
    schedule: String,
    control: f64,
    direct_mfpt: Option<f64>,
    direct_se: Option<f64>,
    predicted_mfpt: Option<f64>,
    predicted_se: Option<f64>,
    z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn oracle_check(args: &OracleCheckArgs) -> Result<(), CliError> {
    let started = Instant::now();
    resolve_threads(&args.output)?;
    fs::create_dir_all(&args.output.out_dir)?;

    let json = fs::read_to_string(&args.samples)?;
    let samples = io::samples_from_json(&json)?;
    if samples.schedule != ResetSchedule::NoReset {
        return Err(CliError::new(
            2,
            format!(
                "renewal predictions need a no-reset sample file; this one used `{}`",
                samples.schedule.literal()
            ),
        ));
    }

    let mut schedules: Vec<ResetSchedule> = Vec::new();
    if let Some(g) = &args.grid {
        for t_r in parse_grid(g).map_err(|e| CliError::new(2, e))? {
            schedules.push(ResetSchedule::Deterministic { period: t_r });
        }
    }
    if let Some(g) = &args.theta_grid {
        for theta in parse_grid(g).map_err(|e| CliError::new(2, e))? {
            schedules.push(ResetSchedule::Poisson { rate: 1.0 / theta });
        }
    }
    if schedules.is_empty() {
        return Err(CliError::new(
            2,
            "provide --grid (t_r values) and/or --theta-grid",
        ));
    }

    let reset_point = ResetPoint::at(samples.params.x0);
    let mut rows = Vec::new();
    let mut any_disagreement = false;
    println!("schedule        direct MFPT           predicted MFPT        z");
    for (i, schedule) in schedules.iter().enumerate() {
        let control = schedule.mean_interval().expect("resetting schedule");
        let prediction = renewal_prediction_with_se(
            &samples,
            schedule,
            args.resamples,
            derive_seed(args.seed, 2 * i as u64),
        );
        let row = match prediction {
            Ok((pred, pred_se)) => {
                let direct = run_ensemble(
                    &samples.potential,
                    &samples.params,
                    schedule,
                    &reset_point,
                    samples.n(),
                    derive_seed(args.seed, 2 * i as u64 + 1),
                )?;
                let stats = summarize(&direct)?;
                let se = stats.standard_error();
                let z = (stats.mean - pred) / (se * se + pred_se * pred_se).sqrt();
                if z.abs() > 3.0 {
                    any_disagreement = true;
                }
                println!(
                    "{:<15} {:>8.4} +/- {:<8.4} {:>8.4} +/- {:<8.4} {:>6.2}",
                    schedule.literal(),
                    stats.mean,
                    se,
                    pred,
                    pred_se,
                    z
                );
                OracleRow {
                    schedule: schedule.literal(),
                    control,
                    direct_mfpt: Some(stats.mean),
                    direct_se: Some(se),
                    predicted_mfpt: Some(pred),
                    predicted_se: Some(pred_se),
                    z: Some(z),
                    error: None,
                }
            }
            Err(e) => {
                println!("{:<15} prediction unavailable: {e}", schedule.literal());
                OracleRow {
                    schedule: schedule.literal(),
                    control,
                    direct_mfpt: None,
                    direct_se: None,
                    predicted_mfpt: None,
                    predicted_se: None,
                    z: None,
                    error: Some(e.to_string()),
                }
            }
        };
        rows.push(row);
    }

    let report = serde_json::json!({
        "samples_file": args.samples.display().to_string(),
        "n": samples.n(),
        "resamples": args.resamples,
        "seed": args.seed,
        "rows": rows,
    });
    let mut outputs = vec![write_output(
        &args.output.out_dir,
        "oracle_report.json",
        &serde_json::to_string_pretty(&report).map_err(kramers_reset::Error::from)?,
    )?];

    let mut argv = vec![
        "oracle-check".to_string(),
        "--samples".into(),
        args.samples.display().to_string(),
    ];
    if let Some(g) = &args.grid {
        argv.extend(["--grid".into(), g.clone()]);
    }
    if let Some(g) = &args.theta_grid {
        argv.extend(["--theta-grid".into(), g.clone()]);
    }
    argv.extend([
        "--seed".into(),
        args.seed.to_string(),
        "--resamples".into(),
        args.resamples.to_string(),
    ]);
    argv.extend(output_argv(&args.output));

    let mut manifest = RunManifest::new("oracle-check", argv, "grid".to_string(), args.seed);
    manifest.outputs = std::mem::take(&mut outputs);
    manifest.duration_seconds = started.elapsed().as_secs_f64();
    manifest.write(&args.output.out_dir)?;

    if any_disagreement {
        return Err(CliError::new(
            6,
            "direct and renewal-predicted MFPTs disagree (|z| > 3)",
        ));
    }
    println!("all points agree within 3 combined standard errors");
    Ok(())
}
