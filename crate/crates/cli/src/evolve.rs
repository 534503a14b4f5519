use std::collections::BTreeMap;

use serde_json::{json, Value};
use selfdual::evolve::*;
use selfdual::families::{AlphaFamily, Branch};
use selfdual::Error;

use crate::args::{BranchArg, EvolveArgs, FamilyId, ModeVariant, PerturbArg};
use crate::error::{CliError, CliResult};
use crate::family;
use crate::gridspec::GridSpec;
use crate::report::{Csv, Outcome, ResidualReport, Status, Sweep};

const ORDER_WINDOW: (f64, f64) = (1.8, 2.2);
const CONE_TOL: f64 = 1e-10;

/// Family with hyperbolic defaults filled in, plus its default time window.
fn resolve(args: &EvolveArgs) -> CliResult<(AlphaFamily, f64, f64)> {
    let id = family::require(&args.family, FamilyId::Traveling);
    let mut p = args.family.clone();
    let (t0, t1) = match id {
        FamilyId::Traveling => {
            if let AlphaFamily::TravelingWave(w) = traveling_wave_study_family() {
                p.v = p.v.or(Some(w.v));
                p.c1 = p.c1.or(Some(w.c1));
                p.c2 = p.c2.or(Some(w.c2));
                p.branch = p.branch.or(Some(if w.branch == Branch::Plus { BranchArg::Plus } else { BranchArg::Minus }));
            }
            (0.0, 0.25)
        }
        FamilyId::AutomodelParabolic => {
            p.c1 = p.c1.or(Some(-5.0));
            (1.0, 1.5)
        }
        FamilyId::Linear => {
            p.c = p.c.or(Some(-20.0));
            (0.0, 0.04)
        }
        _ => (1.0, 1.5),
    };
    let fam = family::alpha_family(&p, id, ModeVariant::Corrected)?;
    Ok((fam, args.t0.unwrap_or(t0), args.t1.unwrap_or(t1)))
}

fn error_json(e: &Error) -> Value {
    json!(e.to_string())
}

pub fn run(args: &EvolveArgs, seed: u64) -> CliResult<Outcome> {
    let (fam, t0, t1) = resolve(args)?;
    let spec = args.grid.clone().unwrap_or_else(|| GridSpec::one("y", 0.0, 1.0, 65));
    let grid = spec.grid1("y").map_err(CliError::Usage)?;
    if !(args.cfl > 0.0) {
        return Err(CliError::usage("--cfl must be positive"));
    }
    let dt = match args.dt {
        Some(dt) => dt,
        None => EvolutionConfig::cfl_step(fam, &grid, t0, args.cfl)?,
    };
    let mut config = EvolutionConfig::for_family(fam, grid, t0, t1, dt);
    config.cfl_target = args.cfl;
    config.allow_cfl_violation = args.allow_cfl_violation;
    config.perturbation = match args.perturb {
        PerturbArg::None => None,
        PerturbArg::Bump => Some(Perturbation::Bump {
            center: args.center,
            half_width: args.width,
            amplitude: args.amplitude,
        }),
        PerturbArg::Noise => Some(Perturbation::Noise { amplitude: args.amplitude, seed }),
    };
    let steps = ((t1 - t0) / dt).ceil().max(1.0) as usize;
    config.snapshot_every = (steps / args.snapshots.max(1)).max(1);

    let run = evolve(&config)?;
    let last = run.last();
    let exact = fam.field()?;
    let mut final_row = Sweep::default();
    for (&y, &v) in run.y.iter().zip(&last.row) {
        final_row.add(&[y, last.t], v - exact.value(y, last.t));
    }
    let max_error = run.max_error().unwrap_or(f64::NAN);

    let mut csv = Csv::new(&["t", "y", "alpha", "exact"]);
    for s in &run.snapshots {
        for (&y, &v) in run.y.iter().zip(&s.row) {
            csv.row(&[s.t, y, v, exact.value(y, s.t)]);
        }
    }

    let mut fits = BTreeMap::new();
    fits.insert("dt".into(), json!(run.dt));
    fits.insert("steps".into(), json!(run.steps));
    fits.insert("max_abs_alpha".into(), json!(run.max_abs_alpha));
    fits.insert("t_window".into(), json!([t0, t1]));
    fits.insert("stopped".into(), run.stopped.as_ref().map_or(Value::Null, error_json));
    let mut pass = run.stopped.is_none();
    let tol = args.tol.unwrap_or(1e-3);

    if let Some(res) = &args.resolutions {
        let study = convergence_study(&config, res)?;
        let in_window = study.orders.iter().all(|o| (ORDER_WINDOW.0..=ORDER_WINDOW.1).contains(o));
        fits.insert(
            "convergence".into(),
            json!({
                "resolutions": res,
                "errors": study.errors.iter().map(|e| e.1).collect::<Vec<_>>(),
                "orders": study.orders,
                "not_applicable": study.not_applicable,
                "window": [ORDER_WINDOW.0, ORDER_WINDOW.1],
            }),
        );
        pass &= if study.not_applicable { study.errors.iter().all(|e| e.1 <= 1e-10) } else { in_window };
    } else {
        pass &= max_error <= tol;
    }

    if args.finite_speed {
        let cone = finite_speed_check(&config, args.center, args.width, args.amplitude)?;
        fits.insert(
            "finite_speed".into(),
            json!({
                "cone_radius": cone.cone_radius,
                "outside_difference": cone.outside_difference,
                "inside_difference": cone.inside_difference,
                "samples_outside": cone.samples_outside,
                "tolerance": CONE_TOL,
            }),
        );
        pass &= cone.samples_outside > 0 && cone.outside_difference <= CONE_TOL;
    }

    let status = match &run.stopped {
        Some(Error::HyperbolicityLost { .. }) | Some(Error::CflViolation { .. }) => Status::Guard,
        Some(_) => Status::Domain,
        None => Status::from_check(pass, false),
    };
    let report = ResidualReport {
        equation: "bbb1-evolution".into(),
        family: family::alpha_info(&fam),
        grid: spec.describe(&["y"]),
        max_abs: max_error,
        rms: final_row.rms(),
        worst_point: final_row.worst(),
        mode: "exact".into(),
        mode_variant: "corrected".into(),
        tolerance: tol,
        pass,
        discrepancies: Vec::new(),
        fits,
    };
    Ok(Outcome {
        report,
        csv: vec![("snapshots.csv".into(), csv)],
        status,
    })
}
