use std::collections::BTreeMap;

use serde_json::json;
use selfdual::alphachain::alpha_residual;
use selfdual::families::*;

use crate::args::{OdeArgs, OdeSystem, SignArg};
use crate::error::{CliError, CliResult};
use crate::report::{Csv, Discrepancy, FamilyInfo, Outcome, ResidualReport, Status, Sweep};

const DRIFT_TOL: f64 = 1e-8;
const CLOSED_FORM_TOL: f64 = 1e-6;

fn initial(args: &OdeArgs) -> PolyAnsatzState {
    PolyAnsatzState {
        a: args.a0,
        a_dot: args.adot0,
        b: args.b0,
        b_dot: args.bdot0,
        c: args.c0,
        c_dot: args.cdot0,
    }
}

/// Largest first-integral drift on samples up to 0.9 of the pole time,
/// or over the whole run when no pole lies ahead.
fn drift_window(t1: f64, a0: f64, adot0: f64, energy: f64) -> f64 {
    match degenerate_pole_time(a0, adot0) {
        Some(tp) if energy == 0.0 => t1.min(0.9 * tp),
        _ => t1,
    }
}

/// Closed form on the degenerate orbit, when the data lie on it.
fn closed_form_check(a0: f64, adot0: f64, energy: f64, t: f64, a_num: f64) -> Option<f64> {
    let tp = degenerate_pole_time(a0, adot0)?;
    (energy.abs() <= 1e-12 && t < tp).then(|| (a_num + 1.0 / (t - tp).powi(2)).abs())
}

/// Default step of the quadratic-ansatz integration.
const POLY_STEP: f64 = 1e-4;

fn default_steps(args: &OdeArgs, step: f64) -> usize {
    args.steps
        .map_or_else(|| (((args.t1 - args.t0) / step).ceil() as usize).max(1), |s| s as usize)
}

pub fn run(args: &OdeArgs) -> CliResult<Outcome> {
    if !(args.t1 > args.t0) {
        return Err(CliError::usage("--t1 must exceed --t0"));
    }
    match args.system {
        OdeSystem::PolyAnsatz => poly(args),
        OdeSystem::Weierstrass => weierstrass(args),
    }
}

fn poly(args: &OdeArgs) -> CliResult<Outcome> {
    let tol = args.tol.unwrap_or(1e-6);
    let steps = default_steps(args, POLY_STEP);
    let init = initial(args);
    let mut fits = BTreeMap::new();
    let sign = match args.sign12 {
        SignArg::Plus => Sign12::Plus,
        SignArg::Minus => Sign12::Minus,
        SignArg::Oracle => {
            let oracle = sign12_oracle()?;
            fits.insert(
                "sign_oracle".into(),
                json!({
                    "selected": oracle.selected.label(),
                    "plus_residual": oracle.plus_residual,
                    "minus_residual": oracle.minus_residual,
                    "tolerance": oracle.tolerance,
                }),
            );
            oracle.selected
        }
    };
    fits.insert("sign12".into(), json!(sign.label()));

    let traj = poly_trajectory(&init, args.t0, args.t1, steps, sign)?;
    let energy = args.energy.unwrap_or(init.first_integral());
    let window = drift_window(args.t1, args.a0, args.adot0, energy);
    let drift = traj
        .iter()
        .filter(|(t, _)| *t <= window + 1e-12)
        .map(|(_, s)| (s.first_integral() - energy).abs())
        .fold(0.0, f64::max);

    // α-equation on interior samples of the integration window.
    let alpha = poly_alpha_field(init, args.t0, steps, sign);
    let mut sweep = Sweep::default();
    let mut csv_res = Csv::new(&["y", "t", "residual"]);
    for j in 1..=4 {
        let t = args.t0 + (args.t1 - args.t0) * j as f64 / 5.0;
        for i in 0..5 {
            let y = -1.0 + 0.5 * i as f64;
            let r = alpha_residual(&alpha, y, t)?;
            sweep.add(&[y, t], r);
            csv_res.row(&[y, t, r]);
        }
    }

    let mut csv = Csv::new(&["t", "A", "A_dot", "B", "B_dot", "C", "C_dot", "first_integral"]);
    for (t, s) in &traj {
        let mut row = vec![*t];
        row.extend(s.to_vec());
        row.push(s.first_integral());
        csv.row(&row);
    }

    let (t_end, s_end) = *traj.last().expect("nonempty trajectory");
    let closed = closed_form_check(args.a0, args.adot0, energy, t_end, s_end.a);
    fits.insert("energy".into(), json!(energy));
    fits.insert("first_integral_drift".into(), json!(drift));
    fits.insert("drift_window".into(), json!([args.t0, window]));
    fits.insert("steps".into(), json!(steps));
    fits.insert("closed_form_defect".into(), json!(closed));

    let pass = sweep.max_abs() <= tol && drift <= DRIFT_TOL && closed.is_none_or(|d| d <= CLOSED_FORM_TOL);
    let paper = sign == Sign12::Minus;
    let report = ResidualReport {
        equation: "poly-ansatz".into(),
        family: family_info("poly-ansatz", args).with("sign12", sign.label()),
        grid: format!("y=-1:1:5, t={}:{}:4 interior", args.t0, args.t1),
        max_abs: sweep.max_abs(),
        rms: sweep.rms(),
        worst_point: sweep.worst(),
        mode: "numeric".into(),
        mode_variant: if paper { "paper" } else { "corrected" }.into(),
        tolerance: tol,
        pass,
        discrepancies: vec![Discrepancy::new("B-equation source sign", "-12A", "+12A")],
        fits,
    };
    Ok(Outcome {
        report,
        csv: vec![("trajectory.csv".into(), csv), ("residuals.csv".into(), csv_res)],
        status: Status::from_check(pass, paper),
    })
}

fn weierstrass(args: &OdeArgs) -> CliResult<Outcome> {
    let tol = args.tol.unwrap_or(DRIFT_TOL);
    if args.t0 != 0.0 {
        return Err(CliError::usage("the weierstrass system starts at t = 0"));
    }
    let steps = default_steps(args, WEIERSTRASS_STEP);
    let energy = args.energy.unwrap_or(args.adot0 * args.adot0 + 4.0 * args.a0.powi(3));
    let run = weierstrass_trajectory(args.t1, energy, args.a0, args.adot0, steps)?;
    let window = drift_window(args.t1, args.a0, args.adot0, energy);
    let drift = run.abs_drift_until(window + 1e-12);

    let mut sweep = Sweep::default();
    let mut csv = Csv::new(&["t", "A", "A_dot", "drift"]);
    for &(t, a, ad) in &run.trajectory {
        let d = ad * ad + 4.0 * a.powi(3) - energy;
        if t <= window + 1e-12 {
            sweep.add(&[t], d);
        }
        csv.row(&[t, a, ad, d]);
    }
    let &(t_end, a_end, _) = run.trajectory.last().expect("nonempty trajectory");
    let closed = closed_form_check(args.a0, args.adot0, energy, t_end, a_end);

    let mut fits = BTreeMap::new();
    fits.insert("energy".into(), json!(energy));
    fits.insert("first_integral_drift".into(), json!(drift));
    fits.insert("max_rel_drift".into(), json!(run.max_rel_drift));
    fits.insert("drift_window".into(), json!([0.0, window]));
    fits.insert("steps".into(), json!(steps));
    fits.insert("a_end".into(), json!(a_end));
    fits.insert("closed_form_defect".into(), json!(closed));

    let pass = drift <= tol && closed.is_none_or(|d| d <= CLOSED_FORM_TOL);
    let report = ResidualReport {
        equation: "weierstrass-first-integral".into(),
        family: family_info("weierstrass", args).with("energy", energy),
        grid: format!("t=0:{}:{}", args.t1, steps + 1),
        max_abs: sweep.max_abs(),
        rms: sweep.rms(),
        worst_point: sweep.worst(),
        mode: "numeric".into(),
        mode_variant: "corrected".into(),
        tolerance: tol,
        pass,
        discrepancies: Vec::new(),
        fits,
    };
    Ok(Outcome {
        report,
        csv: vec![("trajectory.csv".into(), csv)],
        status: Status::from_check(pass, false),
    })
}

fn family_info(id: &str, args: &OdeArgs) -> FamilyInfo {
    match args.system {
        OdeSystem::PolyAnsatz => FamilyInfo::new(
            id,
            &[
                ("a0", args.a0),
                ("adot0", args.adot0),
                ("b0", args.b0),
                ("bdot0", args.bdot0),
                ("c0", args.c0),
                ("cdot0", args.cdot0),
            ],
        ),
        OdeSystem::Weierstrass => FamilyInfo::new(id, &[("a0", args.a0), ("adot0", args.adot0)]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_orbit_window_stops_short_of_the_pole() {
        assert!((drift_window(2.0, -1.0, -2.0, 0.0) - 0.9).abs() < 1e-15);
        assert_eq!(drift_window(0.5, -1.0, -2.0, 0.0), 0.5);
        assert_eq!(drift_window(2.0, 1.0, 0.0, 4.0), 2.0);
    }

    #[test]
    fn closed_form_applies_only_on_the_degenerate_orbit() {
        assert!(closed_form_check(-1.0, -2.0, 0.0, 0.5, -4.0).unwrap() < 1e-15);
        assert!(closed_form_check(-1.0, -2.0, 1.0, 0.5, -4.0).is_none());
        assert!(closed_form_check(-1.0, -2.0, 0.0, 1.5, -4.0).is_none());
    }
}
