//! Brute-force recomputation of every reported quantity from the full joint
//! distribution of Alice's signal, Bob's outcome and Eve's outcome.
//!
//! Only [`crate::qstate`] arithmetic is used here, plus the probe kets and
//! POVM operators handed in by the caller. Nothing in this module calls the
//! measurement constructors or the gain/disturbance formulas, so agreement
//! with them is a genuine cross-check.

use crate::error::{Error, Result};
use crate::measurement::Povm;
use crate::probes::ProbePair;
use crate::qstate::{eigh, partial_trace, Keep, Ket, Operator, C64};

/// Basis shared by Alice's preparation and Bob's measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BobBasis {
    /// Signals `|x> = |0>`, `|y> = |1>`, channel outputs `|X>`, `|Y>`.
    Xy,
    /// Signals `|u>, |v> = (|0> ± |1>)/√2`, channel outputs `(|X> ± |Y>)/√2`.
    Uv,
}

/// `P(signal, bob, eve)` with equal signal priors.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    pub basis: BobBasis,
    eve_outcomes: usize,
    p: Vec<f64>,
}

impl JointTable {
    pub fn eve_outcomes(&self) -> usize {
        self.eve_outcomes
    }

    /// Signal and Bob outcome are indexed 0 for `x`/`u`, 1 for `y`/`v`.
    pub fn get(&self, signal: usize, bob: usize, eve: usize) -> f64 {
        self.p[(signal * 2 + bob) * self.eve_outcomes + eve]
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn min_entry(&self) -> f64 {
        self.p.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `P(signal, eve)`, summed over Bob.
    pub fn signal_eve(&self, signal: usize, eve: usize) -> f64 {
        self.get(signal, 0, eve) + self.get(signal, 1, eve)
    }

    /// `P(eve)`.
    pub fn eve(&self, eve: usize) -> f64 {
        self.signal_eve(0, eve) + self.signal_eve(1, eve)
    }
}

fn basis_kets(basis: BobBasis) -> [[f64; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match basis {
        BobBasis::Xy => [[1.0, 0.0], [0.0, 1.0]],
        BobBasis::Uv => [[h, h], [h, -h]],
    }
}

/// Born-rule joint statistics of the channel outputs for `basis`.
pub fn joint_statistics(pp: &ProbePair, m: &Povm, basis: BobBasis) -> Result<JointTable> {
    let eve_dim = pp.eve_dim();
    if m.dim() != eve_dim {
        return Err(Error::InvalidDimension(format!(
            "measurement acts on dimension {} but the probe has dimension {eve_dim}",
            m.dim()
        )));
    }
    let kets = basis_kets(basis);
    // channel output for each signal, as a plain amplitude vector
    let outputs: Vec<Vec<C64>> = kets
        .iter()
        .map(|s| {
            pp.x()
                .amplitudes()
                .iter()
                .zip(pp.y().amplitudes())
                .map(|(&x, &y)| x * s[0] + y * s[1])
                .collect()
        })
        .collect();
    let n = m.len();
    let mut p = vec![0.0; 4 * n];
    for (s, out) in outputs.iter().enumerate() {
        for (k, bob) in kets.iter().enumerate() {
            // Eve's unnormalized state after Bob finds `bob`: (<bob| ⊗ 1)|out>
            let w: Vec<C64> = (0..eve_dim)
                .map(|e| out[e] * bob[0] + out[eve_dim + e] * bob[1])
                .collect();
            let w = Ket::new(w)?;
            for (l, el) in m.elements().iter().enumerate() {
                p[(s * 2 + k) * n + l] = 0.5 * el.expectation(&w)?.re;
            }
        }
    }
    Ok(JointTable {
        basis,
        eve_outcomes: n,
        p,
    })
}

/// Everything the pipeline reports, rebuilt from joint tables.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub q: Vec<f64>,
    pub g: Vec<f64>,
    pub gain: f64,
    /// `I(A; Λ)` in bits from Shannon entropies.
    pub iae: f64,
    pub du: Vec<f64>,
    pub dv: Vec<f64>,
    pub big_du: f64,
    pub big_dv: f64,
    pub d: f64,
}

/// Conditional errors whose conditioning probability is below this are set to 0.
pub const ORACLE_CONDITIONING_EPS: f64 = 1e-13;

fn entropy(ps: impl IntoIterator<Item = f64>) -> f64 {
    ps.into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

pub fn oracle_report(pp: &ProbePair, m: &Povm) -> Result<OracleReport> {
    let xy = joint_statistics(pp, m, BobBasis::Xy)?;
    let uv = joint_statistics(pp, m, BobBasis::Uv)?;
    let n = xy.eve_outcomes();

    let q: Vec<f64> = (0..n).map(|l| xy.eve(l)).collect();
    let g: Vec<f64> = (0..n)
        .map(|l| {
            if q[l] > 0.0 {
                (xy.signal_eve(0, l) - xy.signal_eve(1, l)).abs() / q[l]
            } else {
                0.0
            }
        })
        .collect();
    let gain = q.iter().zip(&g).map(|(q, g)| q * g).sum();

    let h_a = entropy([0, 1].map(|s| (0..n).map(|l| xy.signal_eve(s, l)).sum::<f64>()));
    let h_l = entropy(q.iter().copied());
    let h_al = entropy(
        (0..2)
            .flat_map(|s| (0..n).map(move |l| (s, l)))
            .map(|(s, l)| xy.signal_eve(s, l)),
    );
    let iae = h_a + h_l - h_al;

    // Bob errs when his outcome differs from the signal
    let cond = |s: usize| -> Vec<f64> {
        (0..n)
            .map(|l| {
                let den = uv.signal_eve(s, l);
                if den < ORACLE_CONDITIONING_EPS {
                    0.0
                } else {
                    uv.get(s, 1 - s, l) / den
                }
            })
            .collect()
    };
    let du = cond(0);
    let dv = cond(1);
    let big_du = q.iter().zip(&du).map(|(q, d)| q * d).sum();
    let big_dv = q.iter().zip(&dv).map(|(q, d)| q * d).sum();
    Ok(OracleReport {
        q,
        g,
        gain,
        iae,
        du,
        dv,
        big_du,
        big_dv,
        d: 0.5 * (big_du + big_dv),
    })
}

/// Minimum-error measurement rebuilt directly: `E0` projects onto the
/// positive eigenspace of `ρx - ρy`, `E1 = 1 - E0`.
pub fn oracle_helstrom(pp: &ProbePair) -> Result<Povm> {
    let dims = (pp.bob_dim(), pp.eve_dim());
    let rx = partial_trace(&pp.x().projector(), dims, Keep::Second)?;
    let ry = partial_trace(&pp.y().projector(), dims, Keep::Second)?;
    let mut e0 = Operator::zeros(pp.eve_dim())?;
    for pair in eigh(&(&rx - &ry))? {
        if pair.value > 0.0 {
            e0 = &e0 + &pair.vector.projector();
        }
    }
    let e1 = &Operator::identity(pp.eve_dim())? - &e0;
    Povm::new(vec![e0, e1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probes::{build_one_qubit_probe, OneQubitProbeParams};

    fn canonical(dim: usize) -> Povm {
        let half: Vec<f64> = (0..dim)
            .map(|i| if i < dim / 2 { 1.0 } else { 0.0 })
            .collect();
        let e0 = Operator::diag(&half).unwrap();
        let e1 = &Operator::identity(dim).unwrap() - &e0;
        Povm::new(vec![e0, e1]).unwrap()
    }

    #[test]
    fn product_states() {
        let pp = ProbePair::new(Ket::basis(4, 0).unwrap(), Ket::basis(4, 3).unwrap()).unwrap();
        let t = joint_statistics(&pp, &canonical(2), BobBasis::Xy).unwrap();
        assert_eq!(t.get(0, 0, 0), 0.5);
        assert_eq!(t.get(1, 1, 1), 0.5);
        assert_eq!(t.total(), 1.0);
        assert_eq!(t.min_entry(), 0.0);

        // |00>, |01>: Bob always finds 0 while Eve holds the signal
        let pp = ProbePair::new(Ket::basis(4, 0).unwrap(), Ket::basis(4, 1).unwrap()).unwrap();
        let t = joint_statistics(&pp, &canonical(2), BobBasis::Xy).unwrap();
        assert_eq!(t.get(0, 0, 0), 0.5);
        assert_eq!(t.get(1, 0, 1), 0.5);
        assert_eq!(t.total(), 1.0);
    }

    #[test]
    fn full_information_attack() {
        let pp = build_one_qubit_probe(&OneQubitProbeParams::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        let m = oracle_helstrom(&pp).unwrap();
        let r = oracle_report(&pp, &m).unwrap();
        assert!((r.iae - 1.0).abs() < 1e-12);
        assert!((r.gain - 1.0).abs() < 1e-12);
        assert!((r.d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tables_are_distributions() {
        let pp = build_one_qubit_probe(&OneQubitProbeParams::new(0.6, 0.9, 0.3).unwrap()).unwrap();
        let m = oracle_helstrom(&pp).unwrap();
        for basis in [BobBasis::Xy, BobBasis::Uv] {
            let t = joint_statistics(&pp, &m, basis).unwrap();
            assert!((t.total() - 1.0).abs() < 1e-12);
            assert!(t.min_entry() >= -1e-14);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let pp = build_one_qubit_probe(&OneQubitProbeParams::new(0.6, 0.9, 0.0).unwrap()).unwrap();
        assert!(joint_statistics(&pp, &canonical(4), BobBasis::Xy).is_err());
    }
}
