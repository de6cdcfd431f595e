//! Eve's information gain, the Alice–Eve mutual information, and the
//! disturbance Bob sees in the conjugate basis.
//!
//! Gains come in two forms: the closed form for the one-qubit probe and a
//! Born-rule form that works for any probe and binary measurement. The
//! disturbance is always the Born-rule conditional error rate, weighted by
//! Eve's outcome probabilities `q_λ = ½ Tr[(ρx + ρy) E_λ]`.

use crate::error::{Error, Result};
use crate::measurement::{meas_angle, resolve_measurement, MeasurementKind, Povm};
use crate::probes::{conjugate_signals, OneQubitProbeParams, ProbePair, ProbeParams};
use crate::qstate::{Ket, Operator, EXACT_TOL};

/// Outcomes with probability below this are excluded from information sums.
pub const OUTCOME_EPS: f64 = 1e-14;
/// Conditioning probabilities below this make a conditional error undefined.
pub const CONDITIONING_EPS: f64 = 1e-13;

/// `φ(z) = (1+z) log2(1+z) + (1-z) log2(1-z)` on `[0, 1]`, with `0 log 0 = 0`.
pub fn phi(z: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::InvalidParams(format!(
            "phi argument {z} outside [0, 1]"
        )));
    }
    Ok(xlog2x(1.0 + z) + xlog2x(1.0 - z))
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// `φ` for values that are in `[0, 1]` up to rounding.
fn phi_clamped(z: f64) -> f64 {
    phi(z.clamp(0.0, 1.0)).expect("clamped argument")
}

/// Eve's outcome statistics and information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainReport {
    pub q: [f64; 2],
    pub g: [f64; 2],
    /// Average gain `G = q0 G0 + q1 G1`.
    pub gain: f64,
    /// Mutual information `½[q0 φ(G0) + q1 φ(G1)]` in bits.
    pub iae: f64,
    /// Set when Eve's conditional states coincide and the report is the
    /// zero-information one.
    pub degenerate: bool,
}

impl GainReport {
    fn from_parts(q: [f64; 2], g: [f64; 2], degenerate: bool) -> Self {
        GainReport {
            q,
            g,
            gain: q[0] * g[0] + q[1] * g[1],
            iae: 0.5 * (q[0] * phi_clamped(g[0]) + q[1] * phi_clamped(g[1])),
            degenerate,
        }
    }
}

/// Gain of the one-qubit probe under the closed-form measurement.
///
/// When the measurement angle is undefined the conditional states coincide;
/// the report then has `G = 0` and the outcome probabilities of the
/// computational-basis measurement (`cos φ = 1`).
pub fn gain_closed_form(p: &OneQubitProbeParams) -> GainReport {
    let (a, b, c, d) = (p.a(), p.b(), p.c(), p.d());
    let dl = p.delta();
    let dc = p.delta_complement();
    let sum_diff = a * a - b * b + c * c - d * d;
    let cross = (a * c - b * d).abs();

    let (cos_phi, sin_phi, degenerate) = match meas_angle(p) {
        Ok(ang) => (ang.cos_phi, ang.sin_phi, false),
        Err(_) => (1.0, 0.0, true),
    };

    let tilt = 0.25 * (1.0 - dl * dl) * sum_diff * cos_phi - 0.5 * dl * dc * cross * sin_phi;
    let q = [0.5 + tilt, 0.5 - tilt];
    if degenerate {
        return GainReport::from_parts(q, [0.0, 0.0], true);
    }
    let spread = ((a * a - b * b - c * c + d * d) + dl * dl * sum_diff) * cos_phi
        + 2.0 * dl * dc * cross * sin_phi;
    let g = q.map(|qk| {
        if qk < OUTCOME_EPS {
            0.0
        } else {
            (spread.abs() / (4.0 * qk)).min(1.0)
        }
    });
    GainReport::from_parts(q, g, false)
}

fn check_binary(pp: &ProbePair, m: &Povm) -> Result<()> {
    if m.len() != 2 {
        return Err(Error::InvalidParams(format!(
            "expected a two-outcome measurement, got {} outcomes",
            m.len()
        )));
    }
    if m.dim() != pp.eve_dim() {
        return Err(Error::InvalidDimension(format!(
            "measurement acts on dimension {}, probe has dimension {}",
            m.dim(),
            pp.eve_dim()
        )));
    }
    Ok(())
}

/// Born-rule gain: `q_λ = ½ Tr[(ρx + ρy) E_λ]`,
/// `G_λ = |Tr[ρx E_λ] - Tr[ρy E_λ]| / (2 q_λ)`.
pub fn gain_generic(pp: &ProbePair, m: &Povm) -> Result<GainReport> {
    check_binary(pp, m)?;
    let (rho_x, rho_y) = pp.eve_states()?;
    let mut q = [0.0; 2];
    let mut g = [0.0; 2];
    for (k, e) in m.elements().iter().enumerate() {
        let tx = rho_x.matmul(e)?.trace().re;
        let ty = rho_y.matmul(e)?.trace().re;
        q[k] = 0.5 * (tx + ty);
        g[k] = if q[k] < OUTCOME_EPS {
            0.0
        } else {
            ((tx - ty).abs() / (2.0 * q[k])).min(1.0)
        };
    }
    Ok(GainReport::from_parts(q, g, false))
}

/// Bob's error probabilities conditioned on Alice's conjugate-basis signal
/// and Eve's outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalErrors {
    pub du: [f64; 2],
    pub dv: [f64; 2],
}

/// `d_λu = 1 - <U|(|u><u| ⊗ E_λ)|U> / <U|(1 ⊗ E_λ)|U>` and the `v` analog.
///
/// An outcome that neither `|U>` nor `|V>` can produce is given `d = 0`;
/// it carries no weight in any average. If only one of the two conditioning
/// probabilities vanishes the conditional error is undefined and
/// [`Error::DegenerateConditioning`] is returned.
pub fn conditional_errors(pp: &ProbePair, m: &Povm) -> Result<ConditionalErrors> {
    check_binary(pp, m)?;
    let sig = conjugate_signals(pp);
    let id = Operator::identity(pp.bob_dim())?;
    let mut out = ConditionalErrors {
        du: [0.0; 2],
        dv: [0.0; 2],
    };
    for (k, e) in m.elements().iter().enumerate() {
        let cond = id.kron(e)?;
        let den_u = cond.expectation(&sig.big_u)?.re;
        let den_v = cond.expectation(&sig.big_v)?.re;
        if den_u < CONDITIONING_EPS && den_v < CONDITIONING_EPS {
            continue;
        }
        out.du[k] = conditional_error(&sig.u, &sig.big_u, e, den_u, k, 'u')?;
        out.dv[k] = conditional_error(&sig.v, &sig.big_v, e, den_v, k, 'v')?;
    }
    Ok(out)
}

fn conditional_error(
    signal: &Ket,
    output: &Ket,
    e: &Operator,
    den: f64,
    outcome: usize,
    label: char,
) -> Result<f64> {
    if den < CONDITIONING_EPS {
        return Err(Error::DegenerateConditioning {
            outcome,
            signal: label,
        });
    }
    let num = signal.projector().kron(e)?.expectation(output)?.re;
    Ok(1.0 - num / den)
}

/// Conditional, per-signal and averaged disturbance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisturbanceReport {
    pub du: [f64; 2],
    pub dv: [f64; 2],
    /// `D_u = Σ_λ q_λ d_λu`
    pub big_du: f64,
    /// `D_v = Σ_λ q_λ d_λv`
    pub big_dv: f64,
    pub pu: f64,
    pub pv: f64,
    /// `D = p_u D_u + p_v D_v`
    pub d: f64,
}

/// Averages the conditional errors with the gain report's `q_λ` and the
/// signal priors `pu`, `pv`.
pub fn disturbance(
    pp: &ProbePair,
    m: &Povm,
    gr: &GainReport,
    pu: f64,
    pv: f64,
) -> Result<DisturbanceReport> {
    if !(pu >= 0.0 && pv >= 0.0 && (pu + pv - 1.0).abs() <= EXACT_TOL) {
        return Err(Error::InvalidParams(format!(
            "signal priors {pu}, {pv} do not sum to 1"
        )));
    }
    let ce = conditional_errors(pp, m)?;
    let big_du = snap_unit(gr.q[0] * ce.du[0] + gr.q[1] * ce.du[1]);
    let big_dv = snap_unit(gr.q[0] * ce.dv[0] + gr.q[1] * ce.dv[1]);
    Ok(DisturbanceReport {
        du: ce.du.map(snap_unit),
        dv: ce.dv.map(snap_unit),
        big_du,
        big_dv,
        pu,
        pv,
        d: snap_unit(pu * big_du + pv * big_dv),
    })
}

/// Pulls rounding-level excursions outside `[0, 1]` back onto the interval;
/// anything further out is left for the caller to reject.
fn snap_unit(x: f64) -> f64 {
    if (-EXACT_TOL..0.0).contains(&x) {
        0.0
    } else if x > 1.0 && x <= 1.0 + EXACT_TOL {
        1.0
    } else {
        x
    }
}

/// Average error rate of the undisturbed-angle family, `(1 - ac - bd)/2`.
pub fn disturbance_delta0(p: &OneQubitProbeParams) -> Result<f64> {
    if p.delta() != 0.0 {
        return Err(Error::InvalidParams(format!(
            "closed-form disturbance needs delta = 0, got {}",
            p.delta()
        )));
    }
    Ok(0.5 * (1.0 - p.a() * p.c() - p.b() * p.d()))
}

/// Largest Alice–Eve mutual information compatible with disturbance `d`:
/// `½ φ(2 sqrt(D(1 - D)))`.
pub fn optimal_bound(d: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&d) {
        return Err(Error::InvalidParams(format!(
            "disturbance {d} outside [0, 1/2]"
        )));
    }
    Ok(0.5 * phi_clamped(2.0 * (d * (1.0 - d)).sqrt()))
}

/// [`optimal_bound`] for a computed disturbance: rounding below zero is
/// clamped and `D > ½` is folded to `1 - D` (the expression is symmetric).
/// `None` outside `[-1e-12, 1 + 1e-12]`.
pub fn bound_for_computed(d: f64) -> Option<f64> {
    if !(-EXACT_TOL..=1.0 + EXACT_TOL).contains(&d) {
        return None;
    }
    let d = d.clamp(0.0, 1.0);
    let folded = if d > 0.5 { 1.0 - d } else { d };
    optimal_bound(folded).ok()
}

/// Everything computed at one strategy point.
#[derive(Debug, Clone)]
pub struct PointReport {
    pub gain: GainReport,
    pub disturbance: DisturbanceReport,
    /// `optimal_bound` at this point's `D`.
    pub bound: f64,
    /// Measurement that produced the numbers.
    pub measurement: MeasurementKind,
    pub degenerate: bool,
}

/// Evaluates gain, disturbance and bound for one strategy with equiprobable
/// conjugate signals.
///
/// One-qubit points under the closed-form measurement use
/// [`gain_closed_form`]; everything else goes through [`gain_generic`].
pub fn evaluate(params: &ProbeParams, kind: MeasurementKind) -> Result<PointReport> {
    let pp = params.build()?;
    let resolved = resolve_measurement(params, &pp, kind)?;
    let gain = match (params, resolved.kind) {
        (ProbeParams::OneQubit(p), MeasurementKind::ClosedForm) => gain_closed_form(p),
        _ => {
            let mut g = gain_generic(&pp, &resolved.povm)?;
            if resolved.degenerate && g.gain == 0.0 {
                g.degenerate = true;
            }
            g
        }
    };
    let dist = disturbance(&pp, &resolved.povm, &gain, 0.5, 0.5)?;
    let bound = bound_for_computed(dist.d)
        .ok_or_else(|| Error::InvalidState(format!("disturbance {} outside [0, 1]", dist.d)))?;
    Ok(PointReport {
        gain,
        disturbance: dist,
        bound,
        measurement: resolved.kind,
        degenerate: resolved.degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{closed_form_povm, helstrom_povm};
    use crate::probes::{build_one_qubit_probe, build_two_qubit_probe, TwoQubitProbeParams};

    fn one(a: f64, c: f64, d: f64) -> OneQubitProbeParams {
        OneQubitProbeParams::new(a, c, d).unwrap()
    }

    fn binary_entropy(p: f64) -> f64 {
        -xlog2x(p) - xlog2x(1.0 - p)
    }

    #[test]
    fn phi_anchors() {
        assert_eq!(phi(0.0).unwrap(), 0.0);
        assert_eq!(phi(1.0).unwrap(), 2.0);
        let z = 0.28;
        let via_entropy = 2.0 * (1.0 - binary_entropy((1.0 + z) / 2.0));
        assert!((phi(z).unwrap() - via_entropy).abs() < 1e-14);
        assert!((phi(z).unwrap() - 0.11463).abs() < 5e-6);
        assert!(phi(1.01).is_err());
        assert!(phi(-0.01).is_err());
    }

    #[test]
    fn phi_is_monotone() {
        let vals: Vec<f64> = (0..=100).map(|i| phi(i as f64 / 100.0).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn gain_full_information_attack() {
        let g = gain_closed_form(&one(1.0, 0.0, 0.0));
        assert_eq!(g.q, [0.5, 0.5]);
        assert_eq!(g.g, [1.0, 1.0]);
        assert_eq!(g.gain, 1.0);
        assert_eq!(g.iae, 1.0);
        assert!(!g.degenerate);
    }

    #[test]
    fn gain_degenerate_point() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let g = gain_closed_form(&one(h, h, 0.0));
        assert!(g.degenerate);
        assert_eq!(g.gain, 0.0);
        assert_eq!(g.iae, 0.0);
    }

    #[test]
    fn gain_closed_form_worked_values() {
        let g = gain_closed_form(&one(0.6, 0.9, 0.0));
        assert!((g.q[0] - 0.415).abs() < EXACT_TOL);
        assert!((g.q[1] - 0.585).abs() < EXACT_TOL);
        assert!((g.g[0] - 0.90 / (4.0 * 0.415)).abs() < EXACT_TOL);
        assert!((g.g[1] - 0.90 / (4.0 * 0.585)).abs() < EXACT_TOL);
        let pp = build_one_qubit_probe(&one(0.6, 0.9, 0.0)).unwrap();
        let generic = gain_generic(&pp, &closed_form_povm(&one(0.6, 0.9, 0.0)).unwrap()).unwrap();
        for k in 0..2 {
            assert!((generic.q[k] - g.q[k]).abs() < 1e-10);
            assert!((generic.g[k] - g.g[k]).abs() < 1e-10);
        }
        assert!((generic.iae - g.iae).abs() < 1e-10);
    }

    #[test]
    fn uninformative_measurement_gives_no_gain() {
        let half = Operator::diag(&[0.5, 0.5]).unwrap();
        let m = Povm::new(vec![half.clone(), half]).unwrap();
        let pp = build_one_qubit_probe(&one(0.3, 0.7, 0.2)).unwrap();
        let g = gain_generic(&pp, &m).unwrap();
        assert!(g.gain.abs() < EXACT_TOL);
        assert!(g.iae.abs() < EXACT_TOL);
    }

    #[test]
    fn gain_generic_checks_dimensions() {
        let pp =
            build_two_qubit_probe(&TwoQubitProbeParams::new(0.9, 0.9, 0.5, 0.0).unwrap()).unwrap();
        let m = closed_form_povm(&one(1.0, 0.0, 0.0)).unwrap();
        assert!(matches!(
            gain_generic(&pp, &m),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn two_qubit_helstrom_respects_bound() {
        let pp =
            build_two_qubit_probe(&TwoQubitProbeParams::new(0.9, 0.9, 0.5, 0.0).unwrap()).unwrap();
        let (rx, ry) = pp.eve_states().unwrap();
        let m = helstrom_povm(&rx, &ry, 0.5, 0.5).unwrap();
        let g = gain_generic(&pp, &m).unwrap();
        let d = disturbance(&pp, &m, &g, 0.5, 0.5).unwrap();
        assert!(g.iae <= optimal_bound(d.d).unwrap() + 1e-9);
    }

    #[test]
    fn conditional_errors_product_state() {
        // Bob holds |0> in every branch: half the conjugate-basis outcomes are wrong
        let pp = build_one_qubit_probe(&one(1.0, 0.0, 0.0)).unwrap();
        let m = closed_form_povm(&one(1.0, 0.0, 0.0)).unwrap();
        let ce = conditional_errors(&pp, &m).unwrap();
        for k in 0..2 {
            assert!((ce.du[k] - 0.5).abs() < EXACT_TOL);
            assert!((ce.dv[k] - 0.5).abs() < EXACT_TOL);
        }
    }

    #[test]
    fn delta_zero_symmetry() {
        let p = one(0.35, 0.8, 0.0);
        let pp = build_one_qubit_probe(&p).unwrap();
        let ce = conditional_errors(&pp, &closed_form_povm(&p).unwrap()).unwrap();
        for k in 0..2 {
            assert!((ce.du[k] - ce.dv[k]).abs() < EXACT_TOL);
        }
    }

    #[test]
    fn disturbance_matches_delta0_closed_form() {
        for (a, c) in [(1.0, 0.0), (0.6, 0.9), (0.5, 0.6), (0.2, 0.25)] {
            let p = one(a, c, 0.0);
            let pp = build_one_qubit_probe(&p).unwrap();
            let m = closed_form_povm(&p).unwrap();
            let g = gain_closed_form(&p);
            let d = disturbance(&pp, &m, &g, 0.5, 0.5).unwrap();
            assert!((d.d - disturbance_delta0(&p).unwrap()).abs() < 1e-10);
        }
        let d = disturbance_delta0(&one(0.6, 0.9, 0.0)).unwrap();
        // 0.8·sqrt(0.19) = 0.3487119..., so D = 0.05564404...
        assert!((d - 0.055_644_04).abs() < 1e-8);
        let d = disturbance_delta0(&one(0.5, 0.6, 0.0)).unwrap();
        assert!((d - 0.003590).abs() < 1e-6);
        assert_eq!(disturbance_delta0(&one(1.0, 0.0, 0.0)).unwrap(), 0.5);
        assert!(disturbance_delta0(&one(0.4, 0.4, 0.0)).unwrap().abs() < EXACT_TOL);
        assert!(matches!(
            disturbance_delta0(&one(0.4, 0.4, 0.1)),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn disturbance_report_consistency() {
        let p = one(0.5, 0.52, 0.05);
        let pp = build_one_qubit_probe(&p).unwrap();
        let m = closed_form_povm(&p).unwrap();
        let g = gain_closed_form(&p);
        let r = disturbance(&pp, &m, &g, 0.3, 0.7).unwrap();
        assert!((r.big_du - (g.q[0] * r.du[0] + g.q[1] * r.du[1])).abs() < EXACT_TOL);
        assert!((r.d - (0.3 * r.big_du + 0.7 * r.big_dv)).abs() < EXACT_TOL);
        assert!(disturbance(&pp, &m, &g, 0.3, 0.3).is_err());
    }

    #[test]
    fn bound_anchors() {
        assert_eq!(optimal_bound(0.0).unwrap(), 0.0);
        assert_eq!(optimal_bound(0.5).unwrap(), 1.0);
        assert!((optimal_bound(0.1).unwrap() - 0.5 * phi(0.6).unwrap()).abs() < EXACT_TOL);
        assert!(optimal_bound(0.09).unwrap() < optimal_bound(0.1).unwrap());
        assert!(optimal_bound(0.1).unwrap() < optimal_bound(0.11).unwrap());
        assert!(optimal_bound(0.51).is_err());
        assert!(optimal_bound(-0.01).is_err());
        assert_eq!(bound_for_computed(-1e-16), Some(0.0));
        assert!((bound_for_computed(0.7).unwrap() - optimal_bound(0.3).unwrap()).abs() < EXACT_TOL);
        assert_eq!(bound_for_computed(1.5), None);
    }

    #[test]
    fn evaluate_records_measurement() {
        let r = evaluate(
            &ProbeParams::OneQubit(one(0.5, 0.6, 0.05)),
            MeasurementKind::ClosedForm,
        )
        .unwrap();
        assert_eq!(r.measurement, MeasurementKind::ClosedForm);
        assert!(!r.degenerate);
        assert!(r.gain.iae <= r.bound + 1e-9);

        let two = ProbeParams::TwoQubit(TwoQubitProbeParams::new(0.85, 0.95, 0.5, 0.05).unwrap());
        let r = evaluate(&two, MeasurementKind::PrincipalAxis).unwrap();
        assert_eq!(r.measurement, MeasurementKind::PrincipalAxis);
        assert!(r.gain.iae <= r.bound + 1e-9);
    }
}
