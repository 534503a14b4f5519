use std::collections::BTreeMap;

use serde_json::{json, Value};
use selfdual::alphachain::{alpha_residual, AlphaField};
use selfdual::families::*;
use selfdual::numcore::{NumericDiff, Profile};

use crate::args::{Equation, FamilyId, Mode, ModeVariant, VerifyArgs};
use crate::error::{CliError, CliResult};
use crate::family::{self, has_paper_variant};
use crate::gridspec::GridSpec;
use crate::report::{Csv, Discrepancy, FamilyInfo, Outcome, ResidualReport, Status, Sweep};

fn default_family(eq: Equation) -> FamilyId {
    match eq {
        Equation::Nu | Equation::Ff => FamilyId::PsParabolic,
        Equation::Bbb1 => FamilyId::Linear,
        Equation::Rv | Equation::RvFirstIntegral => FamilyId::Traveling,
    }
}

fn equation_id(eq: Equation) -> &'static str {
    match eq {
        Equation::Nu => "nu",
        Equation::Ff => "ff",
        Equation::Bbb1 => "bbb1",
        Equation::Rv => "rv",
        Equation::RvFirstIntegral => "rv-first-integral",
    }
}

/// Start of the radicand-safe range of `s = x + vt` for a traveling wave.
fn wave_start(p: &TravelingWaveParams) -> f64 {
    if p.c2 == 0.0 {
        0.0
    } else {
        -p.c1_tilde() / 8.0 + 0.1
    }
}

fn default_grid(eq: Equation, id: FamilyId, args: &VerifyArgs) -> GridSpec {
    match eq {
        Equation::Nu | Equation::Ff => GridSpec::one("xi", 0.5, 5.0, 200),
        Equation::Rv | Equation::RvFirstIntegral => {
            let s = wave_start(&family::traveling_params(&args.family));
            GridSpec::one("s", s, s + 4.0, 200)
        }
        Equation::Bbb1 => match id {
            FamilyId::Traveling => {
                let p = family::traveling_params(&args.family);
                let x = wave_start(&p) + (-p.v).max(0.0);
                GridSpec::two(["y", "t"], (x, x + 3.0, 20), (0.0, 1.0, 10))
            }
            FamilyId::PolyAnsatz => GridSpec::two(["y", "t"], (-1.0, 1.0, 5), (0.1, 0.4, 4)),
            FamilyId::F34
            | FamilyId::PsParabolic
            | FamilyId::PsLinear
            | FamilyId::PsSqrt
            | FamilyId::AutomodelGeneral => GridSpec::two(["y", "t"], (0.5, 2.0, 20), (1.0, 1.5, 10)),
            _ => GridSpec::two(["y", "t"], (0.0, 1.0, 20), (1.0, 2.0, 10)),
        },
    }
}

fn numeric_profile(nu: Profile, mode: Mode) -> Profile {
    match mode {
        Mode::Exact => nu,
        Mode::Numeric => nu.to_numeric(NumericDiff::default()),
    }
}

fn numeric_alpha(alpha: AlphaField, mode: Mode) -> AlphaField {
    match mode {
        Mode::Exact => alpha,
        Mode::Numeric => AlphaField(alpha.0.to_numeric(NumericDiff::default())),
    }
}

struct Checked {
    info: FamilyInfo,
    sweep: Sweep,
    csv: Csv,
    discrepancies: Vec<Discrepancy>,
    fits: BTreeMap<String, Value>,
}

fn sweep_1d(points: Vec<f64>, name: &str, mut f: impl FnMut(f64) -> CliResult<f64>) -> CliResult<(Sweep, Csv)> {
    let mut sweep = Sweep::default();
    let mut csv = Csv::new(&[name, "residual"]);
    for p in points {
        let r = f(p)?;
        sweep.add(&[p], r);
        csv.row(&[p, r]);
    }
    Ok((sweep, csv))
}

fn shift_oracle_fits() -> CliResult<Value> {
    let report = shift_oracle_report()?;
    let residuals: BTreeMap<String, f64> = report.residuals.iter().map(|(v, r)| (v.label(), *r)).collect();
    let passing: Vec<String> = report.passing().iter().map(|v| v.label()).collect();
    Ok(json!({
        "residuals": residuals,
        "tolerance": report.tolerance,
        "passing": passing,
        "selected": selected_shift_variant().ok().map(|v| v.label()),
    }))
}

fn check(args: &VerifyArgs, id: FamilyId) -> CliResult<(GridSpec, Checked)> {
    let eq = args.equation;
    let grid = args.grid.clone().unwrap_or_else(|| default_grid(eq, id, args));
    let mut discrepancies = Vec::new();
    let mut fits = BTreeMap::new();
    let (info, sweep, csv) = match eq {
        Equation::Nu => {
            let (info, nu, _) = family::profile(&args.family, id)?;
            let nu = numeric_profile(nu, args.mode);
            let g = grid.grid1("xi").map_err(CliError::Usage)?;
            let (s, c) = sweep_1d(g.points(), "xi", |xi| Ok(nu_residual(&nu, xi)?))?;
            (info, s, c)
        }
        Equation::Ff => {
            let (info, nu, ps) = family::profile(&args.family, id)?;
            let ps = ps.ok_or_else(|| CliError::usage("the ff check needs a ps-* family"))?;
            let lambda = args.family.lambda.unwrap_or(2.0);
            let info = info.with("lambda", lambda);
            let image = numeric_profile(ff_transform(&nu, lambda)?, args.mode);
            let g = grid.grid1("xi").map_err(CliError::Usage)?;
            let (s, c) = sweep_1d(g.points(), "xi", |xi| Ok(nu_residual(&image, xi)?))?;
            fits.insert("shift_oracle".into(), shift_oracle_fits()?);
            if ps != PsFamily::Sqrt {
                let fit = covariance_fit(ps, info_c(&args.family), lambda)?;
                fits.insert(
                    "covariance".into(),
                    json!({ "fitted": fit.fitted, "printed": fit.printed, "form_defect": fit.form_defect }),
                );
                if (fit.fitted - fit.printed).abs() > 1e-9 * (1.0 + fit.fitted.abs()) {
                    discrepancies.push(Discrepancy::new("covariance parameter map", fit.printed, fit.fitted));
                }
            }
            (info, s, c)
        }
        Equation::Rv | Equation::RvFirstIntegral => {
            if id != FamilyId::Traveling {
                return Err(CliError::usage("the traveling-wave equations need --family traveling"));
            }
            let p = family::traveling_params(&args.family);
            let info = family::alpha_info(&AlphaFamily::TravelingWave(p));
            let profile = numeric_profile(traveling_wave_profile(p), args.mode);
            let g = grid.grid1("s").map_err(CliError::Usage)?;
            let (s, c) = sweep_1d(g.points(), "s", |s| {
                Ok(match eq {
                    Equation::Rv => rv_residual(&profile, p.v, s)?,
                    _ => rv_first_integral_residual(&profile, p.v, p.c1, s)?,
                })
            })?;
            (info, s, c)
        }
        Equation::Bbb1 => {
            let (info, alpha) = family::alpha_field(&args.family, id, args.mode_variant, args.sign12)?;
            let alpha = numeric_alpha(alpha, args.mode);
            let g = grid.grid2(["y", "t"]).map_err(CliError::Usage)?;
            let mut sweep = Sweep::default();
            let mut csv = Csv::new(&["y", "t", "residual"]);
            for [y, t] in g.points() {
                let r = alpha_residual(&alpha, y, t)?;
                sweep.add(&[y, t], r);
                csv.row(&[y, t, r]);
            }
            match id {
                FamilyId::F34 => {
                    let lambda = args.family.lambda.unwrap_or(2.0);
                    discrepancies.push(Discrepancy::new(
                        "f34 x-coefficient",
                        f34_x_coefficient(lambda, VariantMode::Paper),
                        f34_x_coefficient(lambda, VariantMode::Corrected),
                    ));
                }
                FamilyId::PolyAnsatz => {
                    discrepancies.push(Discrepancy::new("B-equation source sign", "-12A", "+12A"));
                }
                _ => {}
            }
            (info, sweep, csv)
        }
    };
    Ok((grid, Checked { info, sweep, csv, discrepancies, fits }))
}

fn info_c(args: &crate::args::FamilyArgs) -> f64 {
    args.c.unwrap_or(1.0)
}

fn default_tol(eq: Equation, id: FamilyId, mode: Mode) -> f64 {
    match (eq, id, mode) {
        (_, FamilyId::PolyAnsatz, _) | (_, _, Mode::Numeric) => 1e-6,
        (Equation::RvFirstIntegral, ..) => 1e-10,
        _ => 1e-9,
    }
}

pub fn run(args: &VerifyArgs) -> CliResult<Outcome> {
    let id = family::require(&args.family, default_family(args.equation));
    let (grid, checked) = check(args, id)?;
    let tol = args.tol.unwrap_or_else(|| default_tol(args.equation, id, args.mode));
    let pass = checked.sweep.max_abs() <= tol;
    let paper = args.mode_variant == ModeVariant::Paper && has_paper_variant(id);
    let names: &[&str] = if grid.0.len() == 1 {
        match args.equation {
            Equation::Rv | Equation::RvFirstIntegral => &["s"],
            _ => &["xi"],
        }
    } else {
        &["y", "t"]
    };
    let report = ResidualReport {
        equation: equation_id(args.equation).into(),
        family: checked.info,
        grid: grid.describe(names),
        max_abs: checked.sweep.max_abs(),
        rms: checked.sweep.rms(),
        worst_point: checked.sweep.worst(),
        mode: mode_str(args.mode).into(),
        mode_variant: variant_str(args.mode_variant).into(),
        tolerance: tol,
        pass,
        discrepancies: checked.discrepancies,
        fits: checked.fits,
    };
    Ok(Outcome {
        report,
        csv: vec![("residuals.csv".into(), checked.csv)],
        status: Status::from_check(pass, paper),
    })
}

pub fn mode_str(m: Mode) -> &'static str {
    match m {
        Mode::Exact => "exact",
        Mode::Numeric => "numeric",
    }
}

pub fn variant_str(v: ModeVariant) -> &'static str {
    match v {
        ModeVariant::Paper => "paper",
        ModeVariant::Corrected => "corrected",
    }
}
