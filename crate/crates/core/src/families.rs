//! Closed-form solution families of the α-equation and of the similarity
//! ODE for `ν(ξ)`, their symmetry maps, and the quadratic-in-y ansatz with
//! its ODE system.
//!
//! Conventions: `ξ = x/t²` for self-similar profiles and `α = t²·ν(ξ)`; the
//! scaling parameter of the similarity symmetry is called `λ`; the first
//! integral of `Ä = −6A²` is `E = Ȧ² + 4A³`.

use std::sync::OnceLock;

use crate::alphachain::{alpha_residual, AlphaField};
use crate::numcore::{rk4, rk4_endpoint, Jet, NumericDiff, Profile, ScalarField2};
use crate::{Error, Result};

/// Which of two printed/derived readings to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VariantMode {
    Paper,
    Corrected,
}

/// Choice of square-root branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Self::Plus => 1.0,
            Self::Minus => -1.0,
        }
    }
}

// ---------------------------------------------------------------------------
// traveling waves

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TravelingWaveParams {
    pub v: f64,
    pub c1: f64,
    pub c2: f64,
    pub branch: Branch,
}

impl TravelingWaveParams {
    /// `c₂ + 8c₁`
    pub fn c1_tilde(&self) -> f64 {
        self.c2 + 8.0 * self.c1
    }

    /// Radicand `c₂(8s + c̃₁)` at `s = x + vt`.
    pub fn radicand(&self, s: f64) -> f64 {
        self.c2 * (8.0 * s + self.c1_tilde())
    }

    fn on_jet<const N: usize>(&self, s: Jet<f64, N>) -> Jet<f64, N> {
        let lin = s * 8.0 + self.c1_tilde();
        if self.c2 == 0.0 {
            return lin * 0.5 - self.v * self.v;
        }
        let root = (lin * self.c2).sqrt();
        (lin + root * self.branch.sign()) * 0.5 - self.v * self.v
    }
}

/// `α = −v² + [(8s + c̃₁) ± √(c₂(8s + c̃₁))]/2` with `s = x + vt`.
pub fn eval_traveling_wave(p: &TravelingWaveParams, x: f64, t: f64) -> Result<f64> {
    let s = x + p.v * t;
    let rad = p.radicand(s);
    if rad < 0.0 {
        return Err(Error::NegativeRadicand { value: rad });
    }
    Ok(-p.v * p.v + (8.0 * s + p.c1_tilde() + p.branch.sign() * rad.sqrt()) / 2.0)
}

/// The traveling wave as an exact field over `(x, t)`.
pub fn traveling_wave_field(p: TravelingWaveParams) -> AlphaField {
    AlphaField(ScalarField2::exact(move |[x, t]| p.on_jet(x + t * p.v)))
}

/// The wave profile as a function of `s = x + vt`.
pub fn traveling_wave_profile(p: TravelingWaveParams) -> Profile {
    Profile::exact(move |[s]| p.on_jet(s))
}

/// `(α + v²)α″ + α′² + 8 − 6α′`
pub fn rv_residual(alpha: &Profile, v: f64, xi: f64) -> Result<f64> {
    let j = alpha.jet([xi])?;
    let (a, a1, a2) = (j.value, j.grad[0], j.hess[0][0]);
    Ok((a + v * v) * a2 + a1 * a1 + 8.0 - 6.0 * a1)
}

/// `α̃α̃′ + 8(ξ + c₁) − 6α̃` with `α̃ = α + v²`.
pub fn rv_first_integral_residual(alpha: &Profile, v: f64, c1: f64, xi: f64) -> Result<f64> {
    let j = alpha.jet([xi])?;
    let at = j.value + v * v;
    Ok(at * j.grad[0] + 8.0 * (xi + c1) - 6.0 * at)
}

/// `(ν − 4)²ξ/(ν − 2) − c₂`
pub fn nus_implicit_check(nu: f64, xi: f64, c2: f64) -> Result<f64> {
    if nu == 2.0 {
        return Err(Error::PoleAtNu2);
    }
    Ok((nu - 4.0).powi(2) * xi / (nu - 2.0) - c2)
}

/// `ν(η) = α̃(η − c₁)/η`, the wave in the variables of the implicit relation.
pub fn nus_value_from_wave(p: &TravelingWaveParams, eta: f64) -> Result<f64> {
    let alpha = eval_traveling_wave(p, eta - p.c1, 0.0)?;
    Ok((alpha + p.v * p.v) / eta)
}

// ---------------------------------------------------------------------------
// similarity profiles

/// The three one-parameter families of the similarity ODE.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsFamily {
    /// `−ξ² + 2ξ + c`
    Parabolic,
    /// `cξ − (c − 2)(c − 4)/2`
    Linear,
    /// `4ξ + c√ξ`
    Sqrt,
}

impl PsFamily {
    pub const ALL: [PsFamily; 3] = [Self::Parabolic, Self::Linear, Self::Sqrt];

    pub fn id(self) -> &'static str {
        match self {
            Self::Parabolic => "ps-parabolic",
            Self::Linear => "ps-linear",
            Self::Sqrt => "ps-sqrt",
        }
    }
}

pub fn ps_profile(family: PsFamily, c: f64) -> Profile {
    match family {
        PsFamily::Parabolic => Profile::exact(move |[xi]| -(xi * xi) + xi * 2.0 + c),
        PsFamily::Linear => Profile::exact(move |[xi]| xi * c - (c - 2.0) * (c - 4.0) / 2.0),
        PsFamily::Sqrt => Profile::exact(move |[xi]| xi * 4.0 + xi.sqrt() * c),
    }
}

/// `−2(ξν′ − ν) + 4ξ²ν″ + νν″ + (ν′ − 2)(ν′ − 4)`
pub fn nu_residual(nu: &Profile, xi: f64) -> Result<f64> {
    let j = nu.jet([xi])?;
    let (n, n1, n2) = (j.value, j.grad[0], j.hess[0][0]);
    Ok(-2.0 * (xi * n1 - n) + 4.0 * xi * xi * n2 + n * n2 + (n1 - 2.0) * (n1 - 4.0))
}

/// The similarity ODE after the shift by `q`:
/// `−2(ξν′ − ν) + 4ξ²ν″ + νν″ + ν′² − (6 + 18q)ν′ + (2 + 8q)(4 + 8q) + 8q²`.
pub fn num_residual(nu: &Profile, xi: f64, q: f64) -> Result<f64> {
    let j = nu.jet([xi])?;
    let (n, n1, n2) = (j.value, j.grad[0], j.hess[0][0]);
    Ok(-2.0 * (xi * n1 - n) + 4.0 * xi * xi * n2 + n * n2 + n1 * n1 - (6.0 + 18.0 * q) * n1
        + (2.0 + 8.0 * q) * (4.0 + 8.0 * q)
        + 8.0 * q * q)
}

/// `−2(ξν′ − ν) + 4ξ²ν″ + νν″ + ν′²`
pub fn nuf_residual(nu: &Profile, xi: f64) -> Result<f64> {
    num_residual(nu, xi, -1.0 / 3.0)
}

/// Signs in `ν̃(ξ) = ν(ξ + q) ± 8qξ ± 4q²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShiftVariant {
    pub linear: Branch,
    pub constant: Branch,
}

impl ShiftVariant {
    pub const ALL: [ShiftVariant; 4] = [
        ShiftVariant { linear: Branch::Plus, constant: Branch::Plus },
        ShiftVariant { linear: Branch::Plus, constant: Branch::Minus },
        ShiftVariant { linear: Branch::Minus, constant: Branch::Plus },
        ShiftVariant { linear: Branch::Minus, constant: Branch::Minus },
    ];

    pub fn label(&self) -> String {
        let s = |b: Branch| if b == Branch::Plus { '+' } else { '-' };
        format!("nu(xi+q) {} 8q xi {} 4q^2", s(self.linear), s(self.constant))
    }

    /// `ν̃(ξ) = ν(ξ + q) + s₁·8qξ + s₂·4q²`
    pub fn apply(&self, nu: &Profile, q: f64) -> Profile {
        let (s1, s2) = (self.linear.sign(), self.constant.sign());
        nu.pullback(move |[xi]| [xi + q])
            .plus_closed_form(move |[xi]| xi * (s1 * 8.0 * q) + s2 * 4.0 * q * q)
    }

    /// The inverse of [`ShiftVariant::apply`]:
    /// `ν(ξ) = ν̃(ξ − q) − s₁·8q(ξ − q) − s₂·4q²`.
    pub fn invert(&self, nu_tilde: &Profile, q: f64) -> Profile {
        let (s1, s2) = (self.linear.sign(), self.constant.sign());
        nu_tilde
            .pullback(move |[xi]| [xi - q])
            .plus_closed_form(move |[xi]| (xi - q) * (-s1 * 8.0 * q) - s2 * 4.0 * q * q)
    }
}

/// Per-variant outcome of the shift oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftOracleReport {
    /// `(variant, largest |num_residual|)` for each of the four variants.
    pub residuals: Vec<(ShiftVariant, f64)>,
    pub tolerance: f64,
}

impl ShiftOracleReport {
    pub fn passing(&self) -> Vec<ShiftVariant> {
        self.residuals
            .iter()
            .filter(|(_, r)| *r <= self.tolerance)
            .map(|(v, _)| *v)
            .collect()
    }
}

/// Applies every variant, with several nonzero `q`, to known solutions of
/// the similarity ODE and measures the shifted-equation residual.
pub fn shift_oracle_report() -> Result<ShiftOracleReport> {
    const TOL: f64 = 1e-9;
    let mut residuals = Vec::new();
    for variant in ShiftVariant::ALL {
        let mut worst: f64 = 0.0;
        for family in PsFamily::ALL {
            for c in [-1.0, 0.5, 2.0] {
                let nu = ps_profile(family, c);
                for q in [-1.0 / 3.0, 0.37, 0.9] {
                    let shifted = variant.apply(&nu, q);
                    for k in 0..8 {
                        let xi = 1.0 + 0.25 * k as f64;
                        worst = worst.max(num_residual(&shifted, xi, q)?.abs());
                    }
                }
            }
        }
        residuals.push((variant, worst));
    }
    Ok(ShiftOracleReport { residuals, tolerance: TOL })
}

/// The oracle-selected shift variant, computed once per process.
pub fn selected_shift_variant() -> Result<ShiftVariant> {
    static SELECTED: OnceLock<Result<ShiftVariant>> = OnceLock::new();
    SELECTED
        .get_or_init(|| {
            let passing = shift_oracle_report()?.passing();
            match passing.as_slice() {
                [only] => Ok(*only),
                _ => Err(Error::OracleAmbiguous { passing: passing.len() }),
            }
        })
        .clone()
}

/// The shift by `q` under the oracle-selected sign convention.
pub fn q_shift_transform(nu: &Profile, q: f64) -> Result<Profile> {
    Ok(selected_shift_variant()?.apply(nu, q))
}

/// Inverse of [`q_shift_transform`].
pub fn q_shift_inverse(nu_tilde: &Profile, q: f64) -> Result<Profile> {
    Ok(selected_shift_variant()?.invert(nu_tilde, q))
}

/// `ξ ↦ λ⁻²ν̃(λξ)`
pub fn nuf_scale(nu_tilde: &Profile, lambda: f64) -> Result<Profile> {
    if lambda == 0.0 {
        return Err(Error::InvalidParams("scaling parameter must be nonzero".into()));
    }
    Ok(nu_tilde.pullback(move |[xi]| [xi * lambda]).scaled(lambda.powi(-2)))
}

/// The two-step symmetry of the similarity ODE: shift by `−1/3`, scale by
/// `λ`, shift back.
pub fn ff_transform(nu: &Profile, lambda: f64) -> Result<Profile> {
    let q = -1.0 / 3.0;
    q_shift_inverse(&nuf_scale(&q_shift_transform(nu, q)?, lambda)?, q)
}

/// Fitted image of a covariant family under [`ff_transform`].
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceFit {
    pub family: PsFamily,
    pub c: f64,
    pub lambda: f64,
    /// Parameter of the transformed profile, read off at `ξ = 1`.
    pub fitted: f64,
    /// The parameter map as printed.
    pub printed: f64,
    /// Largest distance between the transformed profile and the family
    /// member with the fitted parameter.
    pub form_defect: f64,
}

/// The printed parameter maps: `c → λ⁻²(c − λ²/9 − 1/3) + 4/9` (parabolic)
/// and `c → c/λ − 8/(3λ) + 8/3` (linear).
pub fn printed_covariance_map(family: PsFamily, c: f64, lambda: f64) -> Result<f64> {
    match family {
        PsFamily::Parabolic => Ok((c - lambda * lambda / 9.0 - 1.0 / 3.0) / (lambda * lambda) + 4.0 / 9.0),
        PsFamily::Linear => Ok(c / lambda - 8.0 / (3.0 * lambda) + 8.0 / 3.0),
        PsFamily::Sqrt => Err(Error::InvalidParams("the sqrt family is not covariant".into())),
    }
}

pub fn covariance_fit(family: PsFamily, c: f64, lambda: f64) -> Result<CovarianceFit> {
    let printed = printed_covariance_map(family, c, lambda)?;
    let image = ff_transform(&ps_profile(family, c), lambda)?;
    let at = image.jet([1.0])?;
    let fitted = match family {
        PsFamily::Parabolic => at.value + 1.0 - 2.0,
        _ => at.grad[0],
    };
    let member = ps_profile(family, fitted);
    let mut form_defect: f64 = 0.0;
    for k in 0..21 {
        let xi = 0.5 + 0.125 * k as f64;
        form_defect = form_defect.max((image.value([xi]) - member.value([xi])).abs());
    }
    Ok(CovarianceFit {
        family,
        c,
        lambda,
        fitted,
        printed,
        form_defect,
    })
}

fn general_on_jet<const N: usize>(c: f64, lambda: f64, xi: Jet<f64, N>) -> Jet<f64, N> {
    let shifted = xi + 1.0 / 3.0;
    let s = shifted * lambda - 1.0 / 3.0;
    (s * 4.0 + s.sqrt() * c - shifted * (8.0 * lambda / 3.0) + 4.0 / 9.0) * lambda.powi(-2) + shifted * (8.0 / 3.0)
        - 4.0 / 9.0
}

/// The two-parameter solution of the similarity ODE:
/// `ν = λ⁻²[4s + c√s − (8/3)λ(ξ + ⅓) + 4/9] + (8/3)(ξ + ⅓) − 4/9`,
/// `s = λ(ξ + ⅓) − ⅓`.
pub fn eval_automodel_general(c: f64, lambda: f64, xi: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Err(Error::InvalidParams("scaling parameter must be nonzero".into()));
    }
    let s = lambda * (xi + 1.0 / 3.0) - 1.0 / 3.0;
    if s < 0.0 {
        return Err(Error::NegativeRadicand { value: s });
    }
    Ok(general_on_jet(c, lambda, Jet::<f64, 1>::constant(xi)).value)
}

pub fn automodel_general_profile(c: f64, lambda: f64) -> Result<Profile> {
    if lambda == 0.0 {
        return Err(Error::InvalidParams("scaling parameter must be nonzero".into()));
    }
    Ok(Profile::exact(move |[xi]| general_on_jet(c, lambda, xi)))
}

/// `α = t²·ν(x/t²)`
pub fn alpha_from_nu(nu: &Profile, x: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::TimeZero);
    }
    Ok(t * t * nu.value([x / (t * t)]))
}

/// [`alpha_from_nu`] as a field, exact when `ν` is.
pub fn alpha_field_from_nu(nu: &Profile) -> AlphaField {
    let nu = nu.clone();
    AlphaField(ScalarField2::exact(move |[x, t]| {
        let t2 = t * t;
        t2 * nu.on_jets(&[x / t2])
    }))
}

/// x-coefficient of the particular α-solution: `4/(3λ) + 8/3`, printed as
/// `4/(3λ) + 8/9`.
pub fn f34_x_coefficient(lambda: f64, mode: VariantMode) -> f64 {
    4.0 / (3.0 * lambda)
        + match mode {
            VariantMode::Corrected => 8.0 / 3.0,
            VariantMode::Paper => 8.0 / 9.0,
        }
}

fn f34_on_jet<const N: usize>(c: f64, lambda: f64, mode: VariantMode, x: Jet<f64, N>, t: Jet<f64, N>) -> Jet<f64, N> {
    let l2 = lambda.powi(-2);
    let rad = x * lambda + t * t * ((lambda - 1.0) / 3.0);
    x * f34_x_coefficient(lambda, mode)
        + t * t * (4.0 / 9.0 * l2 * (lambda - 1.0) * (lambda + 2.0))
        + t * rad.sqrt() * (l2 * c)
}

/// `α = k·x + (4/9)λ⁻²(λ − 1)(λ + 2)t² + λ⁻²c·t·√(λx + (λ − 1)t²/3)`, with
/// `k` from [`f34_x_coefficient`].
pub fn eval_f34(c: f64, lambda: f64, x: f64, t: f64, mode: VariantMode) -> Result<f64> {
    if lambda == 0.0 {
        return Err(Error::InvalidParams("scaling parameter must be nonzero".into()));
    }
    let rad = lambda * x + (lambda - 1.0) * t * t / 3.0;
    if rad < 0.0 {
        return Err(Error::NegativeRadicand { value: rad });
    }
    Ok(f34_on_jet(c, lambda, mode, Jet::<f64, 2>::constant(x), Jet::constant(t)).value)
}

pub fn f34_field(c: f64, lambda: f64, mode: VariantMode) -> Result<AlphaField> {
    if lambda == 0.0 {
        return Err(Error::InvalidParams("scaling parameter must be nonzero".into()));
    }
    Ok(AlphaField(ScalarField2::exact(move |[x, t]| f34_on_jet(c, lambda, mode, x, t))))
}

/// `α ↦ λ⁻¹α(λy, √λ·t)`
pub fn bbb1_scale(alpha: &AlphaField, lambda: f64) -> Result<AlphaField> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParams(format!("scaling needs λ > 0, got {lambda}")));
    }
    let root = lambda.sqrt();
    Ok(AlphaField(
        alpha.0.pullback(move |[y, t]| [y * lambda, t * root]).scaled(1.0 / lambda),
    ))
}

// ---------------------------------------------------------------------------
// exact α families

/// `α = a·y + b·t + c` with `a ∈ {2, 4}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFamilyParams {
    a: f64,
    pub b: f64,
    pub c: f64,
}

impl LinearFamilyParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if a != 2.0 && a != 4.0 {
            return Err(Error::InvalidParams(format!("slope must be 2 or 4, got {a}")));
        }
        Ok(Self { a, b, c })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
}

pub fn eval_linear(p: &LinearFamilyParams, y: f64, t: f64) -> f64 {
    p.a * y + p.b * t + p.c
}

pub fn linear_field(p: LinearFamilyParams) -> AlphaField {
    AlphaField(ScalarField2::exact(move |[y, t]| y * p.a + t * p.b + p.c))
}

/// `α = −y²/t² + 2y + c₁t² + c₂/t`
pub fn automodel_alpha_field(c1: f64, c2: f64) -> AlphaField {
    AlphaField(ScalarField2::exact(move |[y, t]| {
        -(y * y) / (t * t) + y * 2.0 + t * t * c1 + t.recip() * c2
    }))
}

/// A closed-form α-solution selected by id and parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaFamily {
    Linear(LinearFamilyParams),
    /// `−y²/t² + 2y + c₁t² + c₂/t`
    Automodel { c1: f64, c2: f64 },
    TravelingWave(TravelingWaveParams),
    F34 { c: f64, lambda: f64, mode: VariantMode },
}

impl AlphaFamily {
    pub fn id(&self) -> &'static str {
        match self {
            Self::Linear(_) => "linear",
            Self::Automodel { .. } => "automodel-parabolic",
            Self::TravelingWave(_) => "traveling",
            Self::F34 { .. } => "f34",
        }
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Self::Linear(p) => vec![("a", p.a), ("b", p.b), ("c", p.c)],
            Self::Automodel { c1, c2 } => vec![("c1", c1), ("c2", c2)],
            Self::TravelingWave(p) => vec![("v", p.v), ("c1", p.c1), ("c2", p.c2), ("branch", p.branch.sign())],
            Self::F34 { c, lambda, .. } => vec![("c", c), ("lambda", lambda)],
        }
    }

    pub fn field(&self) -> Result<AlphaField> {
        match *self {
            Self::Linear(p) => Ok(linear_field(p)),
            Self::Automodel { c1, c2 } => Ok(automodel_alpha_field(c1, c2)),
            Self::TravelingWave(p) => Ok(traveling_wave_field(p)),
            Self::F34 { c, lambda, mode } => f34_field(c, lambda, mode),
        }
    }
}

// ---------------------------------------------------------------------------
// quadratic ansatz α = y²A(t) + yB(t) + C(t)

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolyAnsatzState {
    pub a: f64,
    pub a_dot: f64,
    pub b: f64,
    pub b_dot: f64,
    pub c: f64,
    pub c_dot: f64,
}

impl PolyAnsatzState {
    pub fn to_vec(&self) -> Vec<f64> {
        vec![self.a, self.a_dot, self.b, self.b_dot, self.c, self.c_dot]
    }

    pub fn from_slice(s: &[f64]) -> Self {
        Self {
            a: s[0],
            a_dot: s[1],
            b: s[2],
            b_dot: s[3],
            c: s[4],
            c_dot: s[5],
        }
    }

    /// `E = Ȧ² + 4A³`
    pub fn first_integral(&self) -> f64 {
        self.a_dot * self.a_dot + 4.0 * self.a.powi(3)
    }

    pub fn alpha(&self, y: f64) -> f64 {
        y * y * self.a + y * self.b + self.c
    }
}

/// Sign of the source term in the B-equation `B̈ + 6AB = ±12A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign12 {
    Plus,
    Minus,
}

impl Sign12 {
    pub fn sign(self) -> f64 {
        match self {
            Self::Plus => 1.0,
            Self::Minus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Plus => "+",
            Self::Minus => "-",
        }
    }
}

/// `Ä = −6A²`, `B̈ = ±12A − 6AB`, `C̈ = −(B − 2)(B − 4) − 2AC` as a first
/// order system.
pub fn poly_ansatz_rhs(s: &PolyAnsatzState, _t: f64, sign: Sign12) -> PolyAnsatzState {
    PolyAnsatzState {
        a: s.a_dot,
        a_dot: -6.0 * s.a * s.a,
        b: s.b_dot,
        b_dot: sign.sign() * 12.0 * s.a - 6.0 * s.a * s.b,
        c: s.c_dot,
        c_dot: -(s.b - 2.0) * (s.b - 4.0) - 2.0 * s.a * s.c,
    }
}

pub fn poly_trajectory(
    initial: &PolyAnsatzState,
    t0: f64,
    t1: f64,
    steps: usize,
    sign: Sign12,
) -> Result<Vec<(f64, PolyAnsatzState)>> {
    let rhs = |t: f64, s: &[f64]| poly_ansatz_rhs(&PolyAnsatzState::from_slice(s), t, sign).to_vec();
    Ok(rk4(rhs, t0, &initial.to_vec(), t1, steps)?
        .into_iter()
        .map(|(t, s)| (t, PolyAnsatzState::from_slice(&s)))
        .collect())
}

/// `α(y, t) = y²A(t) + yB(t) + C(t)` with the coefficients integrated from
/// `t0` by RK4 with a fixed number of steps; differentiated numerically.
pub fn poly_alpha_field(initial: PolyAnsatzState, t0: f64, steps: usize, sign: Sign12) -> AlphaField {
    AlphaField(ScalarField2::numeric(
        move |[y, t]| {
            let rhs = |tt: f64, s: &[f64]| poly_ansatz_rhs(&PolyAnsatzState::from_slice(s), tt, sign).to_vec();
            match rk4_endpoint(rhs, t0, &initial.to_vec(), t, steps) {
                Ok(s) => PolyAnsatzState::from_slice(&s).alpha(y),
                Err(_) => f64::NAN,
            }
        },
        NumericDiff::default(),
    ))
}

/// Outcome of the B-equation sign oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct SignOracleReport {
    pub selected: Sign12,
    /// Largest α-equation residual over the check grid for `+` and `−`.
    pub plus_residual: f64,
    pub minus_residual: f64,
    pub tolerance: f64,
}

/// Initial data of the sign oracle: the `A = −1/(t − 1)²` orbit with
/// `B` perturbed off its fixed point.
pub fn sign_oracle_initial() -> PolyAnsatzState {
    PolyAnsatzState {
        a: -1.0,
        a_dot: -2.0,
        b: 2.1,
        b_dot: 0.0,
        c: 0.0,
        c_dot: 0.0,
    }
}

/// Integrates the system with both signs and keeps the one whose
/// reconstructed α solves the α-equation.
pub fn sign12_oracle() -> Result<SignOracleReport> {
    const TOL: f64 = 1e-6;
    let worst = |sign| -> Result<f64> {
        let alpha = poly_alpha_field(sign_oracle_initial(), 0.0, 200, sign);
        let mut m: f64 = 0.0;
        for i in 0..5 {
            for j in 0..4 {
                let (y, t) = (-1.0 + 0.5 * i as f64, 0.1 + 0.1 * j as f64);
                m = m.max(alpha_residual(&alpha, y, t)?.abs());
            }
        }
        Ok(m)
    };
    let (plus, minus) = (worst(Sign12::Plus)?, worst(Sign12::Minus)?);
    let selected = match (plus <= TOL, minus <= TOL) {
        (true, false) => Sign12::Plus,
        (false, true) => Sign12::Minus,
        (p, m) => {
            return Err(Error::OracleAmbiguous {
                passing: p as usize + m as usize,
            })
        }
    };
    Ok(SignOracleReport {
        selected,
        plus_residual: plus,
        minus_residual: minus,
        tolerance: TOL,
    })
}

/// A trajectory of `Ä = −6A²` with its first-integral drift.
#[derive(Clone, Debug, PartialEq)]
pub struct WeierstrassRun {
    /// `(t, A, Ȧ)`
    pub trajectory: Vec<(f64, f64, f64)>,
    pub energy: f64,
    /// `max |Ȧ² + 4A³ − E|`
    pub max_abs_drift: f64,
    /// `max |Ȧ² + 4A³ − E| / max(1, Ȧ²)`
    pub max_rel_drift: f64,
}

impl WeierstrassRun {
    /// Largest absolute drift over samples with `t ≤ t_max`.
    pub fn abs_drift_until(&self, t_max: f64) -> f64 {
        self.trajectory
            .iter()
            .filter(|(t, ..)| *t <= t_max)
            .map(|&(_, a, ad)| (ad * ad + 4.0 * a.powi(3) - self.energy).abs())
            .fold(0.0, f64::max)
    }
}

pub fn weierstrass_trajectory(t1: f64, energy: f64, a0: f64, adot0: f64, steps: usize) -> Result<WeierstrassRun> {
    let e0 = adot0 * adot0 + 4.0 * a0.powi(3);
    if (e0 - energy).abs() > 1e-12 * energy.abs().max(adot0 * adot0).max(1.0) {
        return Err(Error::InvalidParams(format!(
            "initial data have first integral {e0}, not {energy}"
        )));
    }
    let traj = rk4(|_, s: &[f64]| vec![s[1], -6.0 * s[0] * s[0]], 0.0, &[a0, adot0], t1, steps)?;
    let mut run = WeierstrassRun {
        trajectory: Vec::with_capacity(traj.len()),
        energy,
        max_abs_drift: 0.0,
        max_rel_drift: 0.0,
    };
    for (t, s) in traj {
        let drift = (s[1] * s[1] + 4.0 * s[0].powi(3) - energy).abs();
        run.max_abs_drift = run.max_abs_drift.max(drift);
        run.max_rel_drift = run.max_rel_drift.max(drift / (s[1] * s[1]).max(1.0));
        run.trajectory.push((t, s[0], s[1]));
    }
    Ok(run)
}

/// Step size used by [`weierstrass_a`]. Small enough that the absolute
/// first-integral drift stays under 1e-8 up to 0.9 of the degenerate pole
/// time, where `Ȧ²` has grown to 4e6.
pub const WEIERSTRASS_STEP: f64 = 1e-5;

/// `A(t)` on the orbit through `(A0, Ȧ0)`.
pub fn weierstrass_a(t: f64, energy: f64, a0: f64, adot0: f64) -> Result<f64> {
    let steps = ((t.abs() / WEIERSTRASS_STEP).ceil() as usize).max(1);
    let run = weierstrass_trajectory(t, energy, a0, adot0, steps)?;
    Ok(run.trajectory.last().expect("nonempty trajectory").1)
}

/// Pole time on the degenerate orbit `A = −1/(t − t₀)²` (`E = 0`), if the
/// pole lies ahead.
pub fn degenerate_pole_time(a0: f64, adot0: f64) -> Option<f64> {
    (a0 < 0.0 && adot0 < 0.0).then(|| (-1.0 / a0).sqrt())
}
