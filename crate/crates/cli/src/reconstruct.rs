use std::collections::BTreeMap;

use serde_json::json;
use selfdual::alphachain::*;
use selfdual::families::AlphaFamily;
use selfdual::numcore::Grid1;

use crate::args::{FamilyId, ModeVariant, ReconstructArgs};
use crate::error::{CliError, CliResult};
use crate::family;
use crate::gridspec::{Bracket, GridSpec};
use crate::report::{Csv, Discrepancy, Outcome, ResidualReport, Status};
use crate::verify::variant_str;

/// Grid, bracket and tolerance used when the flags are absent.
fn defaults(id: FamilyId) -> (GridSpec, Bracket, f64) {
    match id {
        FamilyId::AutomodelParabolic => (
            GridSpec::two(["x", "t"], (0.05, 0.45, 9), (1.0, 2.0, 9)),
            Bracket(-2.0, 0.99),
            1e-5,
        ),
        _ => (GridSpec::two(["x", "t"], (1.0, 2.0, 11), (0.0, 1.0, 11)), Bracket(-20.0, 20.0), 1e-8),
    }
}

pub fn run(args: &ReconstructArgs) -> CliResult<Outcome> {
    let id = family::require(&args.family, FamilyId::Linear);
    if !matches!(id, FamilyId::Linear | FamilyId::AutomodelParabolic) {
        return Err(CliError::usage("reconstruct supports the linear and automodel-parabolic families"));
    }
    let mut params = args.family.clone();
    if id == FamilyId::Linear && params.c.is_none() {
        params.c = Some(1.0);
    }
    let fam = family::alpha_family(&params, id, args.mode_variant)?;
    let (grid_default, bracket_default, tol_default) = defaults(id);
    let spec = args.grid.clone().unwrap_or(grid_default);
    let grid = spec.grid2(["x", "t"]).map_err(CliError::Usage)?;
    let Bracket(lo, hi) = args.bracket.unwrap_or(bracket_default);
    let tol = args.tol.unwrap_or(tol_default);
    let constraint = match args.mode_variant {
        ModeVariant::Paper => GaugeConstraint::Printed,
        ModeVariant::Corrected => GaugeConstraint::Corrected,
    };
    let choice = GaugeChoice {
        y0: args.y0,
        t_ref: args.t_ref.unwrap_or(grid.axis2.lo()),
        a0: args.a0,
        b0: args.b0,
        constraint,
    };

    let alpha = fam.field()?;
    let t_check = Grid1::new(grid.axis2.lo(), grid.axis2.hi(), 4)?;
    let y_check = Grid1::new(lo, hi, 4)?;
    let chain = build_chain(&alpha, choice, &t_check, &y_check, 1e-6)?;
    let res = hodograph_reconstruct(&alpha, &chain.w, &grid, (lo, hi))?;

    // Ratio form of the α-relation on interior hodograph points.
    let (xs, ts) = (grid.axis1.points(), grid.axis2.points());
    let (mut d_defect, mut fallbacks, mut integrability) = (0.0f64, 0usize, 0.0f64);
    for (j, &t) in ts.iter().enumerate().skip(2).take(ts.len() - 4) {
        for i in 2..xs.len() - 2 {
            let y = res.p_x_at(i, j);
            let (d, fell_back) = d_relation_or_alpha(&chain.w, &alpha, y, t)?;
            fallbacks += fell_back as usize;
            if !fell_back {
                d_defect = d_defect.max((d - alpha.value(y, t)).abs());
            }
            integrability = integrability.max(chain.w.integrability_defect(y, t)?);
        }
    }

    let mut fits = BTreeMap::new();
    fits.insert("compat_defect".into(), json!(res.compat_defect));
    fits.insert("eq_a_defect".into(), json!(res.eq_a_defect));
    fits.insert("interior_points".into(), json!(res.interior_points));
    fits.insert("gauge_defect_max".into(), json!(chain.beta.gauge_defect_max));
    fits.insert("d_relation_defect".into(), json!(d_defect));
    fits.insert("d_relation_fallbacks".into(), json!(fallbacks));
    fits.insert("integrability_defect".into(), json!(integrability));
    fits.insert("bracket".into(), json!([lo, hi]));
    fits.insert(
        "gauge".into(),
        json!({ "y0": choice.y0, "t_ref": choice.t_ref, "a0": choice.a0, "b0": choice.b0, "factor": constraint.factor() }),
    );

    let mut closed_form_ok = true;
    if let AlphaFamily::Linear(p) = fam {
        if p.a() == 2.0 && p.b == 0.0 {
            // p = x² − (c/2)x − (c/2)t² + (A(0)/4)t, up to a constant
            let c = p.c;
            let a_at_zero = chain.gauge.a(0.0);
            let exact = |x: f64, t: f64| x * x - c / 2.0 * x - c / 2.0 * t * t + a_at_zero / 4.0 * t;
            let mut worst: f64 = 0.0;
            for (j, &t) in ts.iter().enumerate() {
                for (i, &x) in xs.iter().enumerate() {
                    let lhs = res.p_at(i, j) - res.p_at(0, 0);
                    worst = worst.max((lhs - (exact(x, t) - exact(xs[0], ts[0]))).abs());
                }
            }
            fits.insert("closed_form_defect".into(), json!(worst));
            closed_form_ok = worst <= tol;
        }
    }

    let mut csv = Csv::new(&["x", "t", "p", "p_x", "p_t"]);
    for (j, &t) in ts.iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            let k = j * xs.len() + i;
            csv.row(&[x, t, res.p[k], res.p_x[k], res.p_t[k]]);
        }
    }

    let pass = res.pf_resid <= tol && closed_form_ok && d_defect <= 1e-6;
    let paper = args.mode_variant == ModeVariant::Paper;
    let report = ResidualReport {
        equation: "pf".into(),
        family: family::alpha_info(&fam),
        grid: spec.describe(&["x", "t"]),
        max_abs: res.pf_resid,
        rms: res.pf_rms,
        worst_point: res.worst_point.to_vec(),
        mode: "numeric".into(),
        mode_variant: variant_str(args.mode_variant).into(),
        tolerance: tol,
        pass,
        discrepancies: vec![Discrepancy::new("gauge constraint", "B_t + A = 0", "B_t + 6A = 0")],
        fits,
    };
    Ok(Outcome {
        report,
        csv: vec![("p.csv".into(), csv)],
        status: Status::from_check(pass, paper),
    })
}
