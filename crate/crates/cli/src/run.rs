use std::time::Instant;

use anyhow::{bail, Context, Result};
use num_rational::Ratio;
use rayon::prelude::*;
use serde_json::json;

use gplab_core::field::io::write_snapshot;
use gplab_core::field::RadialGrid;
use gplab_core::gpdyn::{
    compute_n31, energy, evolve, evolve_with, linear_variable, random_state, richardson_ratios, scattering_profile,
    select_sign_convention, transform_t, verify_m_derivation_multi, verify_quintic_cancellation, GPState, N31Form,
    ProfileKind, Scale, Scheme, FROZEN,
};
use gplab_core::oscint::{
    bessel_asymptotic_decomp, bessel_j_with, bessel_uniform_decay_check, geometric_times, kernel_decay_scan,
    BesselMethod, WindowPolicy,
};
use gplab_core::strichartz::{scan, Profile, Side, TimePolicy, SLOPE_TOL};
use gplab_core::symbol::{catalog_lookup, classify_band, DyadicBand};
use gplab_core::Error as CoreError;

use crate::config::{Experiment, ExperimentConfig};
use crate::report::{fmt_f64, write_atomic, Artifacts, Check, Csv, RunReport, REPORT_FILE};

pub const SCAN_CSV: &str = "strichartz_scan.csv";
pub const SCAN_SUMMARY: &str = "strichartz_summary.json";
pub const DECAY_CSV: &str = "kernel_decay.csv";
pub const ENERGY_CSV: &str = "energy.csv";
pub const CAUCHY_CSV: &str = "cauchy.csv";

/// Largest `ratio_spread` accepted in a Strichartz sweep.
pub const SPREAD_LIMIT: f64 = 4.0;
pub const STATIONARY_SLOPE: f64 = -0.5;
pub const STATIONARY_TOL: f64 = 0.15;
pub const FAR_SLOPE_MAX: f64 = -1.8;
pub const ENVELOPE_LIMIT: f64 = 3.0;
pub const REMAINDER_LIMIT: f64 = 5.0;
pub const DUAL_TOL: f64 = 1e-9;
pub const N31_TOL: f64 = 1e-9;
pub const DRIFT_TOL: f64 = 1e-6;
pub const UNITARY_TOL: f64 = 1e-12;
pub const CAUCHY_FRACTION: f64 = 0.02;
/// Differencing steps for the m-equation residual: three halvings.
pub const DERIVATION_STEPS: [f64; 4] = [0.01, 0.005, 0.0025, 0.00125];

/// Runs the configured experiment in `cfg.output_dir` and writes
/// `report.json` there last.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.check()?;
    let t0 = Instant::now();
    let mut art = Artifacts::new(&cfg.output_dir)?;
    art.write("config.txt", cfg.serialize().as_bytes())?;
    let checks = match cfg.experiment {
        Experiment::SymbolCheck => symbol_check(cfg, &mut art),
        Experiment::StrichartzScan => strichartz_scan(cfg, &mut art),
        Experiment::KernelDecay => kernel_decay(cfg, &mut art),
        Experiment::BesselCheck => bessel_check(cfg, &mut art),
        Experiment::Evolve => run_evolve(cfg, &mut art),
        Experiment::NormalformVerify => normalform_verify(cfg, &mut art),
        Experiment::Scatter => scatter(cfg, &mut art),
    }
    .with_context(|| format!("{} failed", cfg.experiment))?;
    let pass = !checks.iter().any(Check::failed);
    let report = RunReport {
        experiment: cfg.experiment.to_string(),
        config: cfg.entries(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: t0.elapsed().as_secs_f64(),
        checks,
        files: art.files,
        pass,
    };
    write_atomic(&cfg.output_dir.join(REPORT_FILE), serde_json::to_string_pretty(&report)?.as_bytes())?;
    Ok(report)
}

fn f(x: f64) -> String {
    fmt_f64(x)
}

fn symbol_check(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Vec<Check>> {
    let spec = catalog_lookup::<f64>(cfg.text("name"), cfg.floats("param"))?;
    let grid_points = cfg.usize("grid_points");
    let mut csv = Csv::new(&["k", "alpha", "beta", "h1", "h2", "h3", "c_lower_1", "c_lower_2", "ratio_bound"]);
    let mut checks = Vec::new();
    for k in cfg.int("kmin") as i32..=cfg.int("kmax") as i32 {
        let ((alpha, beta), want) = spec.stated_classification(k);
        let c = classify_band(&spec, DyadicBand::new(k), alpha, beta, grid_points)?;
        csv.row(&[
            k.to_string(),
            f(alpha),
            f(beta),
            c.h1.to_string(),
            c.h2.to_string(),
            c.h3.to_string(),
            f(c.c_lower_1),
            f(c.c_lower_2),
            f(c.ratio_bound),
        ]);
        let got = (c.h1, c.h2, c.h3);
        checks.push(Check::flag(format!("k={k} flags"), got == want).with_note(format!("expected {want:?}, got {got:?}")));
    }
    art.write("symbol_check.csv", &csv.into_bytes())?;
    Ok(checks)
}

fn strichartz_scan(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Vec<Check>> {
    let profile: Profile = cfg.text("profile").parse()?;
    let ks: Vec<i32> = (cfg.int("kmin") as i32..=cfg.int("kmax") as i32).collect();
    let qr = cfg.pairs("qr");
    let policy = TimePolicy { window: cfg.opt_float("window"), samples: cfg.usize("samples") };
    let rep = scan::<f64>(&ks, qr, profile, &policy);

    let mut csv = Csv::new(&["k", "q", "r", "measured", "predicted", "ratio", "tail_flag"]);
    let mut checks = Vec::new();
    for c in &rep.cells {
        match &c.result {
            Ok(m) => csv.row(&[
                c.k.to_string(),
                c.q.to_string(),
                c.r.to_string(),
                f(m.measured),
                f(m.predicted),
                f(m.ratio),
                m.tail_flag.to_string(),
            ]),
            Err(CoreError::NoEstimate) => {
                checks.push(Check::skipped(format!("k={} ({},{})", c.k, c.q, c.r), "no predicted estimate"))
            }
            Err(e) => checks.push(Check::flag(format!("k={} ({},{}) measured", c.k, c.q, c.r), false).with_note(e.to_string())),
        }
    }

    let mut slopes = Vec::new();
    let mut all_pass = true;
    for s in &rep.slopes {
        let side = match s.side {
            Side::High => "high",
            Side::Low => "low",
        };
        let name = format!("({},{}) {side}", s.q, s.r);
        let (slope, ci) = match &s.fit {
            Ok(fit) => (Some(fit.slope), Some(fit.slope_ci95)),
            Err(_) => (None, None),
        };
        let pass = match (slope, s.theta) {
            (Some(sl), Some(th)) => {
                let a = Check::near(format!("{name} slope"), sl, th, SLOPE_TOL);
                let b = Check::at_most(format!("{name} ratio spread"), s.ratio_spread, SPREAD_LIMIT);
                let p = a.pass && b.pass;
                checks.push(a);
                checks.push(b);
                Some(p)
            }
            (None, _) => {
                checks.push(Check::skipped(format!("{name} slope"), "not enough bands to fit"));
                None
            }
            (_, None) => {
                checks.push(Check::skipped(format!("{name} slope"), "bands straddle regimes"));
                None
            }
        };
        all_pass &= pass != Some(false);
        slopes.push(json!({
            "q": s.q.to_string(),
            "r": s.r.to_string(),
            "side": side,
            "ks": s.ks,
            "slope": slope,
            "slope_ci95": ci,
            "theta": s.theta,
            "ratio_spread": s.ratio_spread,
            "pass": pass,
        }));
    }
    let summary = json!({
        "slopes": slopes,
        "tolerances": { "slope": SLOPE_TOL, "ratio_spread": SPREAD_LIMIT },
        "pass": all_pass && !checks.iter().any(Check::failed),
    });
    art.write(SCAN_CSV, &csv.into_bytes())?;
    art.write(SCAN_SUMMARY, serde_json::to_string_pretty(&summary)?.as_bytes())?;
    Ok(checks)
}

fn kernel_decay(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Vec<Check>> {
    let spec = catalog_lookup::<f64>(cfg.text("symbol"), cfg.floats("param"))?;
    let k = cfg.int("k") as i32;
    let t = geometric_times(cfg.float("tmin"), cfg.float("tmax"), cfg.usize("points"));
    let scan = kernel_decay_scan(&spec, k, &t, &WindowPolicy::default())?;

    let mut csv = Csv::new(&["t", "sup_abs_stationary", "sup_abs_far", "usable_stationary", "usable_far"]);
    for (s, fr) in scan.stationary.iter().zip(&scan.far) {
        csv.row(&[f(s.t), f(s.sup_abs), f(fr.sup_abs), s.usable().to_string(), fr.usable().to_string()]);
    }
    let fit_json = |r: &Result<gplab_core::fit::LinearFit<f64>, CoreError>| match r {
        Ok(fit) => json!({ "slope": fit.slope, "intercept_ln": fit.intercept, "slope_ci95": fit.slope_ci95, "points": fit.points }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let block = json!({
        "k": k,
        "alpha": scan.alpha,
        "stationary": fit_json(&scan.stationary_fit),
        "far": fit_json(&scan.far_fit),
    });
    csv.comment(&serde_json::to_string(&block)?);
    art.write(DECAY_CSV, &csv.into_bytes())?;

    Ok(vec![
        match &scan.stationary_fit {
            Ok(fit) => Check::near("stationary slope", fit.slope, STATIONARY_SLOPE, STATIONARY_TOL),
            Err(e) => Check::flag("stationary slope", false).with_note(e.to_string()),
        },
        match &scan.far_fit {
            Ok(fit) => Check::at_most("far slope", fit.slope, FAR_SLOPE_MAX),
            Err(e) => Check::flag("far slope", false).with_note(e.to_string()),
        },
    ])
}

fn bessel_check(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Vec<Check>> {
    let numax = cfg.float("numax");
    let rmax = cfg.float("rmax");
    let mut nus: Vec<f64> = [0.5, 5.0, 11.0, 50.0, 100.0, 200.0].into_iter().filter(|&v| v < numax).collect();
    nus.push(numax);
    let rs = geometric_times(1.0, rmax, cfg.usize("points"));
    let env = bessel_uniform_decay_check(&nus, &rs)?;
    let mut csv = Csv::new(&["nu", "r", "j", "jp", "envelope", "ratio"]);
    for row in &env.rows {
        csv.row(&[f(row.nu), f(row.r), f(row.j), f(row.jp), f(row.envelope), f(row.ratio)]);
    }
    art.write("bessel_envelope.csv", &csv.into_bytes())?;

    let mut rem = Csv::new(&["nu", "r", "main", "h", "envelope", "ratio"]);
    let mut worst = 0.0f64;
    for &nu in nus.iter().filter(|&&v| v > 10.0) {
        let lo = nu + 1.001 * nu.cbrt();
        if lo >= rmax {
            continue;
        }
        for r in geometric_times(lo, rmax, cfg.usize("points")) {
            let d = bessel_asymptotic_decomp(nu, r)?;
            worst = worst.max(d.ratio());
            rem.row(&[f(nu), f(r), f(d.main), f(d.h), f(d.envelope), f(d.ratio())]);
        }
    }
    art.write("bessel_remainder.csv", &rem.into_bytes())?;

    let mut dual = 0.0f64;
    for &nu in &nus {
        for r in [0.5, 2.0, 7.5, 10.0] {
            let a = bessel_j_with(nu, r, BesselMethod::Series)?.value;
            let b = bessel_j_with(nu, r, BesselMethod::Schlafli)?.value;
            dual = dual.max((a - b).abs());
        }
    }
    let mut checks = vec![Check::at_most("uniform envelope ratio", env.sup_ratio, ENVELOPE_LIMIT)];
    if worst > 0.0 {
        checks.push(Check::at_most("remainder / envelope", worst, REMAINDER_LIMIT));
    } else {
        checks.push(Check::skipped("remainder / envelope", "no ν > 10 with r beyond the turning point"));
    }
    checks.push(Check::at_most("series vs Schläfli", dual, DUAL_TOL));
    Ok(checks)
}

fn initial_state(cfg: &ExperimentConfig, n: usize, rmax: f64, delta: f64) -> Result<GPState<f64>> {
    let g = RadialGrid::new(n, rmax)?;
    Ok(random_state(&g, cfg.seed, 0, Scale::Sup(delta)))
}

fn run_evolve(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Vec<Check>> {
    let scheme: Scheme = cfg.text("scheme").parse()?;
    let s0 = initial_state(cfg, cfg.usize("n"), cfg.float("rmax"), cfg.float("delta"))?;
    let (dt, steps) = (cfg.float("dt"), cfg.usize("steps"));
    let (snap_every, energy_every) = (cfg.usize("snapshot_every"), cfg.usize("energy_every"));

    let e0 = energy(&s0);
    let v0 = linear_variable(&s0).m.l2_norm_spectral();
    let mut csv = Csv::new(&["t", "E", "e_kin", "e_pot", "l2_mass"]);
    let mut snaps: Vec<(usize, Vec<u8>)> = Vec::new();
    let (mut drift, mut unit) = (0.0f64, 0.0f64);
    let mut snap_err = None;
    let outcome = evolve_with(&s0, dt, steps, scheme, |i, s| {
        if i % energy_every == 0 || i == steps {
            let e = energy(s);
            csv.row(&[f(s.t), f(e.e_total), f(e.e_kinetic), f(e.e_potential), f(e.l2_mass)]);
            let d = (e.e_total - e0.e_total).abs();
            drift = drift.max(if e0.e_total != 0.0 { d / e0.e_total.abs() } else { d });
            let v = linear_variable(s).m.l2_norm_spectral();
            unit = unit.max(if v0 > 0.0 { (v - v0).abs() / v0 } else { v });
        }
        if snap_every > 0 && i % snap_every == 0 {
            let mut buf = Vec::new();
            if let Err(e) = write_snapshot(&mut buf, &s.u(), s.t) {
                snap_err = Some(e);
            }
            snaps.push((i, buf));
        }
    });
    if let Some(e) = snap_err {
        bail!("snapshot encoding: {e}");
    }
    art.write(ENERGY_CSV, &csv.into_bytes())?;
    for (i, buf) in snaps {
        art.write(&format!("snapshot_{i:08}.bin"), &buf)?;
    }
    let mut checks = vec![match &outcome {
        Ok(_) => Check::flag("completed", true),
        Err(e) => Check::flag("completed", false).with_note(e.to_string()),
    }];
    if scheme == Scheme::Linear {
        checks.push(Check::at_most("linear L2 deviation", unit, UNITARY_TOL));
    } else {
        checks.push(Check::at_most("relative energy drift", drift, DRIFT_TOL));
    }
    Ok(checks)
}

fn normalform_verify(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Vec<Check>> {
    let g = RadialGrid::<f64>::new(cfg.usize("n"), cfg.float("rmax"))?;
    let amp = cfg.float("amplitude");
    let states: Vec<GPState<f64>> =
        (0..cfg.int("trials") as u64).map(|i| random_state(&g, cfg.seed, i, Scale::Sup(amp))).collect();

    let identity_err = states
        .par_iter()
        .map(|s| compute_n31(s, N31Form::Defining).rel_l2_distance(&compute_n31(s, N31Form::Expanded)))
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0f64, f64::max);

    let ratios: Vec<Vec<f64>> = states
        .par_iter()
        .map(|s| {
            let r = verify_m_derivation_multi(s, &[FROZEN], &DERIVATION_STEPS)?;
            Ok(richardson_ratios(&r[0]))
        })
        .collect::<Result<_, CoreError>>()?;
    let orders: Vec<Vec<f64>> = ratios.iter().map(|r| r.iter().map(|q| q.log2()).collect()).collect();

    let selected = select_sign_convention(&states[0], &DERIVATION_STEPS);
    let quintic = verify_quintic_cancellation(Ratio::<i64>::from_integer(1))?;

    let mut checks = vec![Check::at_most("N31 identity", identity_err, N31_TOL)];
    for (i, r) in ratios.iter().enumerate() {
        let worst = r.iter().copied().fold(4.0f64, |w, q| if (q - 4.0).abs() > (w - 4.0).abs() { q } else { w });
        checks.push(Check::near(format!("trial {i} Richardson ratio"), worst, 4.0, 0.5));
    }
    checks.push(match &selected {
        Ok(c) => Check::flag("sign convention is unique and frozen", *c == FROZEN).with_note(format!("{c:?}")),
        Err(e) => Check::flag("sign convention is unique and frozen", false).with_note(e.to_string()),
    });
    checks.push(Check::flag("quintic sum is zero", quintic.sum == Ratio::from_integer(0)));

    let conv = match &selected {
        Ok(c) => json!({ "s_n3": c.s_n3, "s_n4": c.s_n4, "s_n5": c.s_n5, "c_n5c": c.c_n5c }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let out = json!({
        "identity_err": identity_err,
        "residual_orders": orders,
        "quintic_sum": quintic.sum.to_string(),
        "sign_convention": conv,
    });
    art.write("normalform_verify.json", serde_json::to_string_pretty(&out)?.as_bytes())?;
    Ok(checks)
}

fn scatter(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Vec<Check>> {
    let s0 = initial_state(cfg, cfg.usize("n"), cfg.float("rmax"), cfg.float("delta"))?;
    let dt = cfg.float("dt");
    let steps = (cfg.float("tmax") / dt).round() as usize;
    let every = cfg.usize("sample_every");
    let tmin = cfg.float("tmin");
    let keep = |traj: Vec<GPState<f64>>| -> Vec<GPState<f64>> {
        traj.into_iter().filter(|s| s.t >= tmin - 1e-9 * dt).collect()
    };
    let traj = keep(evolve(&s0, dt, steps, Scheme::Strang, every)?);
    if traj.len() < 2 {
        bail!("fewer than two samples in [tmin, tmax]; lower sample_every or widen the window");
    }
    let kinds = [ProfileKind::NormalForm, ProfileKind::Variant, ProfileKind::Linear];
    let rep = scattering_profile(&traj, &kinds)?;
    let series: Vec<&[f64]> = kinds.iter().map(|&k| rep.profile(k).map(|p| p.cauchy.as_slice()).unwrap_or(&[])).collect();

    let mut csv = Csv::new(&["t", "cauchy_normal_form", "cauchy_variant", "cauchy_linear", "u1sq_decay"]);
    #[allow(clippy::needless_range_loop)]
    for i in 0..series[0].len() {
        csv.row(&[f(rep.times[i]), f(series[0][i]), f(series[1][i]), f(series[2][i]), f(rep.u1sq_decay[i])]);
    }
    art.write(CAUCHY_CSV, &csv.into_bytes())?;

    let m0 = transform_t(&s0).m.h1_norm();
    let rel = |x: f64| if m0 > 0.0 { x / m0 } else { x };
    let cauchy = series[0];
    let lin = keep(evolve(&s0, dt, steps, Scheme::Linear, every)?);
    let lrep = scattering_profile(&lin, &[ProfileKind::Linear])?;
    let flat = lrep.profile(ProfileKind::Linear).map(|p| p.cauchy[0]).unwrap_or(f64::NAN);
    let decreasing = rep.u1sq_decay.windows(2).all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0));
    Ok(vec![
        Check::flag("Cauchy indicator nonincreasing", cauchy.windows(2).all(|w| w[1] <= w[0])),
        Check::at_most("final Cauchy indicator / |m(0)|_H1", rel(*cauchy.last().unwrap()), CAUCHY_FRACTION),
        Check::at_most("linear-flow profile drift / |m(0)|_H1", rel(flat), UNITARY_TOL),
        Check::flag("|(2-Δ)^-1 u1^2|_H1 decreasing", decreasing),
    ])
}
