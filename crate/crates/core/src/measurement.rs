//! Eve's two-outcome measurement on her probe.
//!
//! Three constructions are available:
//!
//! * the closed form for the one-qubit probe, a rank-1 projective pair
//!   `{|E0><E0|, |E1><E1|}` fixed by the angle `φ`;
//! * the Helstrom measurement, projecting onto the positive eigenspace of
//!   `q0 ρ0 - q1 ρ1`;
//! * the principal-axis measurement, `E0` the rank-1 projector onto the top
//!   eigenvector of `q0 ρ0 - q1 ρ1` and `E1 = 1 - E0`.
//!
//! On a qubit probe all three coincide whenever the angle is defined. On the
//! two-qubit probe the Helstrom and principal-axis measurements differ, and
//! only the principal-axis one is sensitive to level crossings inside the
//! positive eigenspace.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::probes::{OneQubitProbeParams, ProbePair, ProbeParams};
use crate::qstate::{eigh, Ket, Operator, EXACT_TOL, ITER_TOL};

/// `sqrt(α² + β²)` below this leaves the angle undefined.
pub const ANGLE_EPS: f64 = 1e-14;
/// Eigenvalues of `q0 ρ0 - q1 ρ1` at or below this count as nonpositive.
pub const EIG_ZERO: f64 = 1e-14;
/// Minimum gap between the two largest eigenvalues for a well-defined
/// principal axis.
pub const AXIS_GAP: f64 = 1e-12;

/// The angle that fixes the closed-form measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasAngle {
    pub alpha_meas: f64,
    pub beta_meas: f64,
    pub cos_phi: f64,
    pub sin_phi: f64,
    /// Sign of `ac - bd`, with the sign of zero taken as `+1`.
    pub sgn: f64,
}

pub fn meas_angle(p: &OneQubitProbeParams) -> Result<MeasAngle> {
    let (a, b, c, d) = (p.a(), p.b(), p.c(), p.d());
    let dl = p.delta();
    let alpha_meas = (a * a - c * c) - dl * dl * (b * b - c * c);
    let cross = a * c - b * d;
    let beta_meas = dl * p.delta_complement() * cross;
    let r = alpha_meas.hypot(beta_meas);
    if r <= ANGLE_EPS {
        return Err(Error::DegenerateAngle);
    }
    let cos_phi = (alpha_meas / r).clamp(-1.0, 1.0);
    let sin_phi = (1.0 - cos_phi * cos_phi).max(0.0).sqrt();
    let sgn = if cross < 0.0 { -1.0 } else { 1.0 };
    Ok(MeasAngle {
        alpha_meas,
        beta_meas,
        cos_phi,
        sin_phi,
        sgn,
    })
}

/// A complete set of positive operators on Eve's probe.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<Operator>,
}

impl Povm {
    /// Validates Hermiticity, positivity and completeness.
    pub fn new(elements: Vec<Operator>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidState("empty POVM".into()))?;
        let dim = first.dim();
        let mut sum = Operator::zeros(dim)?;
        for (i, e) in elements.iter().enumerate() {
            if e.dim() != dim {
                return Err(Error::InvalidDimension(format!(
                    "POVM element {i} has dimension {}, expected {dim}",
                    e.dim()
                )));
            }
            let defect = e.hermiticity_defect();
            if defect > EXACT_TOL {
                return Err(Error::NotHermitian(defect));
            }
            let min_eig = eigh(e)?.last().map(|p| p.value).unwrap_or(0.0);
            if min_eig < -EXACT_TOL {
                return Err(Error::InvalidState(format!(
                    "POVM element {i} has negative eigenvalue {min_eig:.3e}"
                )));
            }
            sum = &sum + e;
        }
        let gap = sum.max_abs_diff(&Operator::identity(dim)?);
        if gap > EXACT_TOL {
            return Err(Error::InvalidState(format!(
                "POVM elements sum to identity only within {gap:.3e}"
            )));
        }
        Ok(Povm { elements })
    }

    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }

    pub fn element(&self, outcome: usize) -> &Operator {
        &self.elements[outcome]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// Binary measurement `{P, 1 - P}`.
    fn split(p: Operator) -> Result<Self> {
        let rest = &Operator::identity(p.dim())? - &p;
        Povm::new(vec![p, rest])
    }
}

/// Closed-form measurement for the one-qubit probe:
///
/// `|E0> = -ε sqrt(1 + cos φ)/√2 |0> + sqrt(1 - cos φ)/√2 |1>`
///
/// `|E1> =    sqrt(1 - cos φ)/√2 |0> + ε sqrt(1 + cos φ)/√2 |1>`
pub fn closed_form_povm(p: &OneQubitProbeParams) -> Result<Povm> {
    let ang = meas_angle(p)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = (1.0 + ang.cos_phi).max(0.0).sqrt() * h;
    let minus = (1.0 - ang.cos_phi).max(0.0).sqrt() * h;
    let e0 = Ket::from_real(&[-ang.sgn * plus, minus])?;
    let e1 = Ket::from_real(&[minus, ang.sgn * plus])?;
    Povm::new(vec![e0.projector(), e1.projector()])
}

fn check_density(name: &str, rho: &Operator) -> Result<()> {
    let defect = rho.hermiticity_defect();
    if defect > EXACT_TOL {
        return Err(Error::InvalidState(format!(
            "{name} is not Hermitian (defect {defect:.3e})"
        )));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > EXACT_TOL || tr.im.abs() > EXACT_TOL {
        return Err(Error::InvalidState(format!("{name} has trace {tr}")));
    }
    let min_eig = eigh(rho)?.last().map(|p| p.value).unwrap_or(0.0);
    if min_eig < -EXACT_TOL {
        return Err(Error::InvalidState(format!(
            "{name} has negative eigenvalue {min_eig:.3e}"
        )));
    }
    Ok(())
}

fn weighted_difference(rho0: &Operator, rho1: &Operator, q0: f64, q1: f64) -> Result<Operator> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::InvalidDimension(format!(
            "density operators of dimension {} and {}",
            rho0.dim(),
            rho1.dim()
        )));
    }
    check_density("rho0", rho0)?;
    check_density("rho1", rho1)?;
    if !(q0 >= 0.0 && q1 >= 0.0 && (q0 + q1 - 1.0).abs() <= EXACT_TOL) {
        return Err(Error::InvalidState(format!(
            "priors {q0}, {q1} are not a probability distribution"
        )));
    }
    Ok(&(q0 * rho0) - &(q1 * rho1))
}

/// Helstrom measurement: `E0` projects onto the span of eigenvectors of
/// `q0 ρ0 - q1 ρ1` with positive eigenvalue, `E1 = 1 - E0`. Null directions
/// go to `E1`.
pub fn helstrom_povm(rho0: &Operator, rho1: &Operator, q0: f64, q1: f64) -> Result<Povm> {
    let m = weighted_difference(rho0, rho1, q0, q1)?;
    let mut positive = Operator::zeros(m.dim())?;
    for pair in eigh(&m)? {
        if pair.value > EIG_ZERO {
            positive = &positive + &pair.vector.projector();
        }
    }
    Povm::split(positive)
}

/// Principal-axis measurement: `E0` the projector onto the top eigenvector
/// of `q0 ρ0 - q1 ρ1`, `E1 = 1 - E0`.
///
/// Fails with [`Error::DegenerateAngle`] when the top eigenvalue is not
/// positive or is not separated from the next one, since the axis is then
/// not unique.
pub fn principal_axis_povm(rho0: &Operator, rho1: &Operator, q0: f64, q1: f64) -> Result<Povm> {
    let m = weighted_difference(rho0, rho1, q0, q1)?;
    let pairs = eigh(&m)?;
    let top = &pairs[0];
    if top.value <= EIG_ZERO || top.value - pairs[1].value <= AXIS_GAP {
        return Err(Error::DegenerateAngle);
    }
    Povm::split(top.vector.projector())
}

/// `{|0><0| ⊗ 1, |1><1| ⊗ 1}` on the first probe qubit; used when Eve's
/// conditional states coincide and every measurement is uninformative.
pub fn canonical_povm(eve_dim: usize) -> Result<Povm> {
    let half = eve_dim / 2;
    let diag: Vec<f64> = (0..eve_dim)
        .map(|i| if i < half { 1.0 } else { 0.0 })
        .collect();
    Povm::split(Operator::diag(&diag)?)
}

/// Which measurement Eve performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasurementKind {
    ClosedForm,
    Helstrom,
    PrincipalAxis,
}

impl MeasurementKind {
    /// Closed form for the one-qubit probe, principal axis for the
    /// two-qubit probe.
    pub fn default_for(params: &ProbeParams) -> Self {
        match params {
            ProbeParams::OneQubit(_) => MeasurementKind::ClosedForm,
            ProbeParams::TwoQubit(_) => MeasurementKind::PrincipalAxis,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MeasurementKind::ClosedForm => "closed-form",
            MeasurementKind::Helstrom => "helstrom",
            MeasurementKind::PrincipalAxis => "principal-axis",
        }
    }
}

impl fmt::Display for MeasurementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasurementKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed-form" => Ok(MeasurementKind::ClosedForm),
            "helstrom" => Ok(MeasurementKind::Helstrom),
            "principal-axis" | "principal" => Ok(MeasurementKind::PrincipalAxis),
            other => Err(Error::InvalidParams(format!(
                "unknown measurement '{other}'"
            ))),
        }
    }
}

/// The measurement actually applied at one strategy point.
#[derive(Debug, Clone)]
pub struct ResolvedMeasurement {
    pub povm: Povm,
    /// What produced `povm`; differs from the request after a fallback.
    pub kind: MeasurementKind,
    /// Set when the requested measurement was undefined at this point.
    pub degenerate: bool,
}

/// Builds the requested measurement for a probe, falling back when it is
/// undefined: to Helstrom when only the principal axis is ambiguous, and to
/// [`canonical_povm`] when Eve's two conditional states coincide.
pub fn resolve_measurement(
    params: &ProbeParams,
    pp: &ProbePair,
    kind: MeasurementKind,
) -> Result<ResolvedMeasurement> {
    let canonical = || -> Result<ResolvedMeasurement> {
        Ok(ResolvedMeasurement {
            povm: canonical_povm(pp.eve_dim())?,
            kind,
            degenerate: true,
        })
    };
    match kind {
        MeasurementKind::ClosedForm => {
            let ProbeParams::OneQubit(p) = params else {
                return Err(Error::InvalidParams(
                    "the closed-form measurement applies to the one-qubit probe only".into(),
                ));
            };
            match closed_form_povm(p) {
                Ok(povm) => Ok(ResolvedMeasurement {
                    povm,
                    kind,
                    degenerate: false,
                }),
                Err(Error::DegenerateAngle) => canonical(),
                Err(e) => Err(e),
            }
        }
        MeasurementKind::Helstrom | MeasurementKind::PrincipalAxis => {
            let (rho_x, rho_y) = pp.eve_states()?;
            let diff = &rho_x - &rho_y;
            if diff.max_abs_diff(&Operator::zeros(diff.dim())?) <= ANGLE_EPS {
                return canonical();
            }
            if kind == MeasurementKind::PrincipalAxis {
                match principal_axis_povm(&rho_x, &rho_y, 0.5, 0.5) {
                    Ok(povm) => {
                        return Ok(ResolvedMeasurement {
                            povm,
                            kind,
                            degenerate: false,
                        })
                    }
                    Err(Error::DegenerateAngle) => {
                        return Ok(ResolvedMeasurement {
                            povm: helstrom_povm(&rho_x, &rho_y, 0.5, 0.5)?,
                            kind: MeasurementKind::Helstrom,
                            degenerate: true,
                        })
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(ResolvedMeasurement {
                povm: helstrom_povm(&rho_x, &rho_y, 0.5, 0.5)?,
                kind,
                degenerate: false,
            })
        }
    }
}

/// Largest entrywise distance between the projectors of two binary
/// measurements, matching elements in order.
pub fn povm_distance(a: &Povm, b: &Povm) -> f64 {
    a.elements()
        .iter()
        .zip(b.elements())
        .map(|(x, y)| x.max_abs_diff(y))
        .fold(0.0, f64::max)
}

/// Whether the two measurements agree within the iterative tolerance.
pub fn povm_close(a: &Povm, b: &Povm) -> bool {
    a.len() == b.len() && povm_distance(a, b) <= ITER_TOL
}
