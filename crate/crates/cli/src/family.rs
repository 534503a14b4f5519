//! Turning family flags into core objects, with per-family defaults.

use selfdual::alphachain::AlphaField;
use selfdual::families::*;
use selfdual::numcore::Profile;

use crate::args::{BranchArg, FamilyArgs, FamilyId, ModeVariant};
use crate::error::{CliError, CliResult};
use crate::report::FamilyInfo;

pub fn id_str(id: FamilyId) -> &'static str {
    match id {
        FamilyId::PsParabolic => "ps-parabolic",
        FamilyId::PsLinear => "ps-linear",
        FamilyId::PsSqrt => "ps-sqrt",
        FamilyId::AutomodelGeneral => "automodel-general",
        FamilyId::Linear => "linear",
        FamilyId::AutomodelParabolic => "automodel-parabolic",
        FamilyId::Traveling => "traveling",
        FamilyId::F34 => "f34",
        FamilyId::PolyAnsatz => "poly-ansatz",
    }
}

pub fn variant_mode(v: ModeVariant) -> VariantMode {
    match v {
        ModeVariant::Paper => VariantMode::Paper,
        ModeVariant::Corrected => VariantMode::Corrected,
    }
}

fn ps_family(id: FamilyId) -> Option<PsFamily> {
    match id {
        FamilyId::PsParabolic => Some(PsFamily::Parabolic),
        FamilyId::PsLinear => Some(PsFamily::Linear),
        FamilyId::PsSqrt => Some(PsFamily::Sqrt),
        _ => None,
    }
}

pub fn require(args: &FamilyArgs, default: FamilyId) -> FamilyId {
    args.family.unwrap_or(default)
}

/// A similarity profile ν(ξ).
pub fn profile(args: &FamilyArgs, id: FamilyId) -> CliResult<(FamilyInfo, Profile, Option<PsFamily>)> {
    if let Some(ps) = ps_family(id) {
        let c = args.c.unwrap_or(1.0);
        return Ok((FamilyInfo::new(ps.id(), &[("c", c)]), ps_profile(ps, c), Some(ps)));
    }
    if id == FamilyId::AutomodelGeneral {
        let (c, lambda) = (args.c.unwrap_or(0.0), args.lambda.unwrap_or(1.0));
        let nu = automodel_general_profile(c, lambda)?;
        return Ok((FamilyInfo::new(id_str(id), &[("c", c), ("lambda", lambda)]), nu, None));
    }
    Err(CliError::usage(format!("family {} is not a similarity profile", id_str(id))))
}

pub fn traveling_params(args: &FamilyArgs) -> TravelingWaveParams {
    TravelingWaveParams {
        v: args.v.unwrap_or(1.0),
        c1: args.c1.unwrap_or(0.0),
        c2: args.c2.unwrap_or(1.0),
        branch: match args.branch.unwrap_or(BranchArg::Plus) {
            BranchArg::Plus => Branch::Plus,
            BranchArg::Minus => Branch::Minus,
        },
    }
}

/// A closed-form α family usable as exact data.
pub fn alpha_family(args: &FamilyArgs, id: FamilyId, variant: ModeVariant) -> CliResult<AlphaFamily> {
    Ok(match id {
        FamilyId::Linear => AlphaFamily::Linear(LinearFamilyParams::new(
            args.a.unwrap_or(2.0),
            args.b.unwrap_or(0.0),
            args.c.unwrap_or(0.0),
        )?),
        FamilyId::AutomodelParabolic => AlphaFamily::Automodel {
            c1: args.c1.unwrap_or(1.0),
            c2: args.c2.unwrap_or(0.0),
        },
        FamilyId::Traveling => AlphaFamily::TravelingWave(traveling_params(args)),
        FamilyId::F34 => AlphaFamily::F34 {
            c: args.c.unwrap_or(0.0),
            lambda: args.lambda.unwrap_or(2.0),
            mode: variant_mode(variant),
        },
        other => return Err(CliError::usage(format!("family {} has no closed-form α", id_str(other)))),
    })
}

pub fn alpha_info(family: &AlphaFamily) -> FamilyInfo {
    let info = FamilyInfo::new(family.id(), &family.params());
    match family {
        AlphaFamily::TravelingWave(p) => info.with("branch", if p.branch == Branch::Plus { "plus" } else { "minus" }),
        _ => info,
    }
}

/// Any α field the α-equation can be checked on, with its description.
pub fn alpha_field(
    args: &FamilyArgs,
    id: FamilyId,
    variant: ModeVariant,
    sign12: Option<BranchArg>,
) -> CliResult<(FamilyInfo, AlphaField)> {
    match id {
        FamilyId::PolyAnsatz => {
            let sign = match sign12 {
                Some(BranchArg::Plus) => Sign12::Plus,
                Some(BranchArg::Minus) => Sign12::Minus,
                None if variant == ModeVariant::Paper => Sign12::Minus,
                None => Sign12::Plus,
            };
            let init = sign_oracle_initial();
            let info = FamilyInfo::new(
                id_str(id),
                &[("a0", init.a), ("adot0", init.a_dot), ("b0", init.b), ("bdot0", init.b_dot), ("c0", init.c), ("cdot0", init.c_dot)],
            )
            .with("sign12", sign.label());
            Ok((info, poly_alpha_field(init, 0.0, 200, sign)))
        }
        FamilyId::PsParabolic | FamilyId::PsLinear | FamilyId::PsSqrt | FamilyId::AutomodelGeneral => {
            let (info, nu, _) = profile(args, id)?;
            Ok((info, alpha_field_from_nu(&nu)))
        }
        _ => {
            let fam = alpha_family(args, id, variant)?;
            Ok((alpha_info(&fam), fam.field()?))
        }
    }
}

/// Whether `--mode-variant paper` changes anything for this family.
pub fn has_paper_variant(id: FamilyId) -> bool {
    matches!(id, FamilyId::F34 | FamilyId::PolyAnsatz)
}
