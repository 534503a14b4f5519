//! Explicit time integration of the α-equation written as
//! `α_tt = −(α²/2)_yy − 8 + 6α_y`, in the regime `α < 0` where it is a
//! nonlinear wave equation with local speed `√(−α)`.
//!
//! Second-order central differences in y, leapfrog in t, first step from a
//! Taylor expansion, Dirichlet data taken from a closed-form family.

use rand::Rng;

use crate::families::AlphaFamily;
use crate::numcore::Grid1;
use crate::testfields::rng;
use crate::{Error, Result};

/// Extra initial data added on top of the family's initial slice. The
/// initial velocity is left unperturbed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Perturbation {
    /// `amplitude·exp(1 − 1/(1 − (d/w)²))` for `|d| < w`, zero outside.
    Bump { center: f64, half_width: f64, amplitude: f64 },
    /// Uniform noise in `[−amplitude, amplitude]` on interior points.
    Noise { amplitude: f64, seed: u64 },
}

impl Perturbation {
    fn apply(&self, ys: &[f64], row: &mut [f64]) {
        match *self {
            Self::Bump { center, half_width, amplitude } => {
                for (v, &y) in row.iter_mut().zip(ys) {
                    let d = (y - center) / half_width;
                    if d.abs() < 1.0 {
                        *v += amplitude * (1.0 - 1.0 / (1.0 - d * d)).exp();
                    }
                }
            }
            Self::Noise { amplitude, seed } => {
                let mut r = rng(seed);
                let n = row.len();
                for v in &mut row[1..n - 1] {
                    *v += r.gen_range(-amplitude..=amplitude);
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionConfig {
    pub y_grid: Grid1,
    /// Requested step; the run uses the largest step `≤ dt` that divides
    /// `t1 − t0` evenly.
    pub dt: f64,
    pub t0: f64,
    pub t1: f64,
    pub cfl_target: f64,
    /// Supplies the initial slice and velocity.
    pub initial: AlphaFamily,
    /// Supplies the edge values at every step.
    pub boundary: AlphaFamily,
    /// Reference solution for `error_vs_exact`.
    pub exact: Option<AlphaFamily>,
    pub perturbation: Option<Perturbation>,
    /// Record a snapshot every this many steps (the first and last step are
    /// always recorded).
    pub snapshot_every: usize,
    /// Skip the CFL guard (for stability demonstrations).
    pub allow_cfl_violation: bool,
}

impl EvolutionConfig {
    /// Initial, boundary and reference data all from `family`.
    pub fn for_family(family: AlphaFamily, y_grid: Grid1, t0: f64, t1: f64, dt: f64) -> Self {
        Self {
            y_grid,
            dt,
            t0,
            t1,
            cfl_target: 0.5,
            initial: family,
            boundary: family,
            exact: Some(family),
            perturbation: None,
            snapshot_every: usize::MAX,
            allow_cfl_violation: false,
        }
    }

    /// `dt = cfl_target·h/√max|α|` over the initial slice.
    pub fn cfl_step(family: AlphaFamily, y_grid: &Grid1, t0: f64, cfl_target: f64) -> Result<f64> {
        let row = sample_row(&family, &y_grid.points(), t0)?;
        let amax = row.iter().map(|a| a.abs()).fold(0.0, f64::max);
        Ok(cfl_target * y_grid.step() / amax.sqrt().max(f64::MIN_POSITIVE))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub row: Vec<f64>,
    pub error_vs_exact: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionResult {
    pub y: Vec<f64>,
    pub dt: f64,
    pub steps: usize,
    pub snapshots: Vec<Snapshot>,
    /// Set when the run stopped early (blow-up or loss of hyperbolicity).
    pub stopped: Option<Error>,
    /// `max|α|` over all computed rows.
    pub max_abs_alpha: f64,
}

impl EvolutionResult {
    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("at least the initial snapshot")
    }

    /// Largest `error_vs_exact` over all snapshots.
    pub fn max_error(&self) -> Option<f64> {
        self.snapshots
            .iter()
            .map(|s| s.error_vs_exact)
            .try_fold(0.0f64, |m, e| e.map(|e| m.max(e)))
    }
}

fn sample_row(family: &AlphaFamily, ys: &[f64], t: f64) -> Result<Vec<f64>> {
    let field = family.field()?;
    let row: Vec<f64> = ys.iter().map(|&y| field.value(y, t)).collect();
    if let Some(k) = row.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteSample { point: vec![ys[k], t] });
    }
    Ok(row)
}

/// One leapfrog step:
/// `next = 2·curr − prev + dt²·[−D2(curr²/2) + 6·D1(curr) − 8]` in the
/// interior, `edges` at the two ends.
pub fn step(prev: &[f64], curr: &[f64], dt: f64, h: f64, edges: (f64, f64)) -> Result<Vec<f64>> {
    let n = curr.len();
    if prev.len() != n || n < 3 {
        return Err(Error::BadGrid("rows must share a grid of at least 3 points".into()));
    }
    let (dt2, inv_h2, inv_2h) = (dt * dt, 1.0 / (h * h), 0.5 / h);
    let mut next = vec![0.0; n];
    for i in 1..n - 1 {
        let (l, c, r) = (curr[i - 1], curr[i], curr[i + 1]);
        let d2 = 0.5 * (r * r - 2.0 * c * c + l * l) * inv_h2;
        let d1 = (r - l) * inv_2h;
        next[i] = 2.0 * c - prev[i] + dt2 * (-d2 + 6.0 * d1 - 8.0);
    }
    next[0] = edges.0;
    next[n - 1] = edges.1;
    if let Some(i) = next.iter().position(|v| !v.is_finite()) {
        return Err(Error::BlowUp {
            t: f64::NAN,
            state: vec![i as f64],
        });
    }
    Ok(next)
}

/// Runs the configured evolution.
pub fn evolve(config: &EvolutionConfig) -> Result<EvolutionResult> {
    let span = config.t1 - config.t0;
    if !(config.dt > 0.0 && span > 0.0) {
        return Err(Error::InvalidParams("need dt > 0 and t1 > t0".into()));
    }
    let steps = (span / config.dt - 1e-9).ceil().max(1.0) as usize;
    let dt = span / steps as f64;
    let ys = config.y_grid.points();
    let h = config.y_grid.step();

    let field = config.initial.field()?;
    let mut row0 = Vec::with_capacity(ys.len());
    let mut row1 = Vec::with_capacity(ys.len());
    for &y in &ys {
        let j = field.0.jet([y, config.t0])?;
        let (a, ay, at, ayy) = (j.value, j.grad[0], j.grad[1], j.hess[0][0]);
        let att = -(ay * ay + a * ayy) - 8.0 + 6.0 * ay;
        row0.push(a);
        row1.push(a + dt * at + 0.5 * dt * dt * att);
    }
    if let Some(p) = &config.perturbation {
        p.apply(&ys, &mut row0);
        p.apply(&ys, &mut row1);
    }
    let max_alpha = row0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max_alpha >= 0.0 {
        return Err(Error::HyperbolicityLost { t: config.t0, max_alpha });
    }
    let amax = row0.iter().map(|a| a.abs()).fold(0.0, f64::max);
    let bound = config.cfl_target * h / amax.sqrt();
    if dt > bound * (1.0 + 1e-12) && !config.allow_cfl_violation {
        return Err(Error::CflViolation { dt, bound });
    }

    let boundary = config.boundary.field()?;
    let (ylo, yhi) = (ys[0], ys[ys.len() - 1]);
    let t1 = config.t0 + dt;
    row1[0] = boundary.value(ylo, t1);
    row1[ys.len() - 1] = boundary.value(yhi, t1);

    let exact = config.exact.map(|f| f.field()).transpose()?;
    let snapshot = |t: f64, row: &[f64]| -> Snapshot {
        let error_vs_exact = exact.as_ref().map(|f| {
            ys.iter()
                .zip(row)
                .map(|(&y, &v)| (v - f.value(y, t)).abs())
                .fold(0.0, f64::max)
        });
        Snapshot {
            t,
            row: row.to_vec(),
            error_vs_exact,
        }
    };

    let mut result = EvolutionResult {
        y: ys.clone(),
        dt,
        steps,
        snapshots: vec![snapshot(config.t0, &row0)],
        stopped: None,
        max_abs_alpha: amax,
    };
    let every = config.snapshot_every.max(1);
    let (mut prev, mut curr) = (row0, row1);
    for k in 1..=steps {
        let t = config.t0 + k as f64 * dt;
        if k == steps || k % every == 0 {
            result.snapshots.push(snapshot(t, &curr));
        }
        result.max_abs_alpha = result.max_abs_alpha.max(curr.iter().map(|a| a.abs()).fold(0.0, f64::max));
        let max_alpha = curr.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max_alpha.is_finite() {
            result.stopped = Some(Error::BlowUp { t, state: vec![] });
            break;
        }
        if max_alpha >= 0.0 {
            result.stopped = Some(Error::HyperbolicityLost { t, max_alpha });
            if k != steps {
                result.snapshots.push(snapshot(t, &curr));
            }
            break;
        }
        if k == steps {
            break;
        }
        let tn = t + dt;
        let edges = (boundary.value(ylo, tn), boundary.value(yhi, tn));
        match step(&prev, &curr, dt, h, edges) {
            Ok(next) => {
                prev = std::mem::replace(&mut curr, next);
            }
            Err(_) => {
                result.stopped = Some(Error::BlowUp { t, state: curr.clone() });
                if k != steps {
                    result.snapshots.push(snapshot(t, &curr));
                }
                break;
            }
        }
    }
    Ok(result)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceStudy {
    /// `(n, max-abs error at t1)` per resolution.
    pub errors: Vec<(usize, f64)>,
    /// `log2(e_h / e_{h/2})` per consecutive pair; empty when not
    /// applicable.
    pub orders: Vec<f64>,
    /// Errors are at roundoff level, so orders carry no information.
    pub not_applicable: bool,
}

/// Errors at `t1` are below this for a scheme that reproduces the family
/// exactly.
const ROUNDOFF_LEVEL: f64 = 1e-10;

/// Runs `base` at each resolution `n` (grid points), scaling `dt` with the
/// grid step so the CFL number stays fixed.
pub fn convergence_study(base: &EvolutionConfig, resolutions: &[usize]) -> Result<ConvergenceStudy> {
    if resolutions.len() < 3 {
        return Err(Error::InvalidParams("need at least 3 resolutions".into()));
    }
    if base.exact.is_none() {
        return Err(Error::InvalidParams("convergence needs an exact reference".into()));
    }
    let h0 = base.y_grid.step();
    let mut errors = Vec::with_capacity(resolutions.len());
    for &n in resolutions {
        let grid = Grid1::new(base.y_grid.lo(), base.y_grid.hi(), n)?;
        let cfg = EvolutionConfig {
            dt: base.dt * grid.step() / h0,
            y_grid: grid,
            ..base.clone()
        };
        let run = evolve(&cfg)?;
        if let Some(e) = run.stopped {
            return Err(e);
        }
        errors.push((n, run.last().error_vs_exact.expect("reference present")));
    }
    let not_applicable = errors.iter().all(|&(_, e)| e < ROUNDOFF_LEVEL);
    let orders = if not_applicable {
        Vec::new()
    } else {
        errors.windows(2).map(|w| (w[0].1 / w[1].1).log2()).collect()
    };
    Ok(ConvergenceStudy {
        errors,
        orders,
        not_applicable,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSpeedReport {
    /// Half-width of the region around the perturbation's support that the
    /// characteristic cone can reach by `t1`, plus two grid steps.
    pub cone_radius: f64,
    /// `max |perturbed − unperturbed|` at `t1` outside the cone.
    pub outside_difference: f64,
    /// Same, inside the cone (shows the perturbation is really there).
    pub inside_difference: f64,
    pub samples_outside: usize,
}

/// Default probe bump for [`finite_speed_check`]. The scheme's leak past the
/// physical cone is linear in amplitude (about 2e-5 relative at n = 257), so
/// an absolute 1e-10 bound needs a small bump.
pub const PROBE_AMPLITUDE: f64 = 1e-6;
pub const PROBE_HALF_WIDTH: f64 = 0.1;

/// Evolves `config` with and without a compact bump and compares the final
/// rows outside `|y − center| ≤ w + √max|α|·(t1 − t0) + 2h`.
pub fn finite_speed_check(config: &EvolutionConfig, center: f64, half_width: f64, amplitude: f64) -> Result<FiniteSpeedReport> {
    let plain = evolve(&EvolutionConfig {
        perturbation: None,
        ..config.clone()
    })?;
    let bumped = evolve(&EvolutionConfig {
        perturbation: Some(Perturbation::Bump { center, half_width, amplitude }),
        ..config.clone()
    })?;
    if let Some(e) = plain.stopped.clone().or(bumped.stopped.clone()) {
        return Err(e);
    }
    let speed = plain.max_abs_alpha.max(bumped.max_abs_alpha).sqrt();
    let cone_radius = half_width + speed * (config.t1 - config.t0) + 2.0 * config.y_grid.step();
    let (mut outside, mut inside, mut count) = (0.0f64, 0.0f64, 0);
    for ((&y, a), b) in plain.y.iter().zip(&plain.last().row).zip(&bumped.last().row) {
        let d = (a - b).abs();
        if (y - center).abs() > cone_radius {
            outside = outside.max(d);
            count += 1;
        } else {
            inside = inside.max(d);
        }
    }
    Ok(FiniteSpeedReport {
        cone_radius,
        outside_difference: outside,
        inside_difference: inside,
        samples_outside: count,
    })
}

/// The traveling wave used for convergence runs: `v = 4`, `c₁ = 0`,
/// `c₂ = 1`, lower branch, on `y ∈ [0, 1]`, `t ∈ [0, 0.25]`; α ∈ [−16, −9.5].
pub fn traveling_wave_study_family() -> AlphaFamily {
    use crate::families::{Branch, TravelingWaveParams};
    AlphaFamily::TravelingWave(TravelingWaveParams {
        v: 4.0,
        c1: 0.0,
        c2: 1.0,
        branch: Branch::Minus,
    })
}
