//! Eve's probe families: the outputs `|X>`, `|Y>` of the channel after the
//! probe has interacted with Alice's `|x>` or `|y>`.
//!
//! All kets are laid out Bob-qubit first, probe after.

use crate::error::{Error, Result};
use crate::qstate::{inner, partial_trace, tensor, Keep, Ket, Operator, EXACT_TOL};

/// Bob's qubit is always a single qubit.
pub const BOB_DIM: usize = 2;

fn check_unit(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "{name} = {value} is outside [0, 1]"
        )))
    }
}

/// Strategy parameters of the one-qubit probe. `b` and `d` are the
/// nonnegative completions `sqrt(1 - a^2)` and `sqrt(1 - c^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneQubitProbeParams {
    a: f64,
    c: f64,
    delta: f64,
}

impl OneQubitProbeParams {
    pub fn new(a: f64, c: f64, delta: f64) -> Result<Self> {
        check_unit("a", a)?;
        check_unit("c", c)?;
        check_unit("delta", delta)?;
        Ok(OneQubitProbeParams { a, c, delta })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        (1.0 - self.a * self.a).max(0.0).sqrt()
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d(&self) -> f64 {
        (1.0 - self.c * self.c).max(0.0).sqrt()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `sqrt(1 - delta^2)`
    pub fn delta_complement(&self) -> f64 {
        (1.0 - self.delta * self.delta).max(0.0).sqrt()
    }
}

/// Strategy parameters of the two-qubit probe family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitProbeParams {
    pub alpha2: f64,
    pub beta2: f64,
    pub s: f64,
    pub delta: f64,
}

impl TwoQubitProbeParams {
    pub fn new(alpha2: f64, beta2: f64, s: f64, delta: f64) -> Result<Self> {
        check_unit("alpha2", alpha2)?;
        check_unit("beta2", beta2)?;
        check_unit("s", s)?;
        check_unit("delta", delta)?;
        Ok(TwoQubitProbeParams {
            alpha2,
            beta2,
            s,
            delta,
        })
    }
}

/// Either probe family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeParams {
    OneQubit(OneQubitProbeParams),
    TwoQubit(TwoQubitProbeParams),
}

impl ProbeParams {
    pub fn build(&self) -> Result<ProbePair> {
        match self {
            ProbeParams::OneQubit(p) => build_one_qubit_probe(p),
            ProbeParams::TwoQubit(p) => build_two_qubit_probe(p),
        }
    }

    pub fn delta(&self) -> f64 {
        match self {
            ProbeParams::OneQubit(p) => p.delta(),
            ProbeParams::TwoQubit(p) => p.delta,
        }
    }
}

/// Channel outputs `|X>` and `|Y>` for Alice's `|x>` and `|y>`.
#[derive(Debug, Clone)]
pub struct ProbePair {
    x: Ket,
    y: Ket,
    eve_dim: usize,
}

impl ProbePair {
    /// Checks normalization and `<X|Y> = 0` within [`EXACT_TOL`].
    pub fn new(x: Ket, y: Ket) -> Result<Self> {
        if x.dim() != y.dim() || !x.dim().is_multiple_of(BOB_DIM) || x.dim() < 4 {
            return Err(Error::InvalidDimension(format!(
                "probe kets must share a Bob ⊗ probe dimension, got {} and {}",
                x.dim(),
                y.dim()
            )));
        }
        for (name, k) in [("X", &x), ("Y", &y)] {
            let n = k.norm_sqr();
            if (n - 1.0).abs() > EXACT_TOL {
                return Err(Error::InvalidState(format!("<{name}|{name}> = {n}")));
            }
        }
        let overlap = inner(&x, &y)?.norm();
        if overlap > EXACT_TOL {
            return Err(Error::InvalidState(format!("|<X|Y>| = {overlap:.3e}")));
        }
        let eve_dim = x.dim() / BOB_DIM;
        Ok(ProbePair { x, y, eve_dim })
    }

    pub fn x(&self) -> &Ket {
        &self.x
    }

    pub fn y(&self) -> &Ket {
        &self.y
    }

    pub fn eve_dim(&self) -> usize {
        self.eve_dim
    }

    pub fn bob_dim(&self) -> usize {
        BOB_DIM
    }

    /// Eve's reduced states `(ρx, ρy)`: the Bob qubit traced out of
    /// `|X><X|` and `|Y><Y|`.
    pub fn eve_states(&self) -> Result<(Operator, Operator)> {
        let dims = (BOB_DIM, self.eve_dim);
        Ok((
            partial_trace(&self.x.projector(), dims, Keep::Second)?,
            partial_trace(&self.y.projector(), dims, Keep::Second)?,
        ))
    }
}

/// One-qubit probe:
/// `|X> = a|00> + b|11>`,
/// `|Y> = δ(-b|00> + a|11>) + sqrt(1-δ²)(c|10> + d|01>)`.
pub fn build_one_qubit_probe(p: &OneQubitProbeParams) -> Result<ProbePair> {
    let (a, b, c, d) = (p.a(), p.b(), p.c(), p.d());
    let (dl, dc) = (p.delta(), p.delta_complement());
    // index = 2·bob + eve
    let x = Ket::from_real(&[a, 0.0, 0.0, b])?;
    let y = Ket::from_real(&[-dl * b, dc * d, dc * c, dl * a])?;
    ProbePair::new(x, y)
}

/// The Bell basis of two qubits.
#[derive(Debug, Clone)]
pub struct BellBasis {
    pub phi_plus: Ket,
    pub phi_minus: Ket,
    pub psi_plus: Ket,
    pub psi_minus: Ket,
}

impl BellBasis {
    pub fn to_array(&self) -> [&Ket; 4] {
        [
            &self.phi_plus,
            &self.phi_minus,
            &self.psi_plus,
            &self.psi_minus,
        ]
    }
}

pub fn bell_basis() -> BellBasis {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let k = |v: [f64; 4]| Ket::from_real(&v).expect("dimension 4");
    BellBasis {
        phi_plus: k([h, 0.0, 0.0, h]),
        phi_minus: k([h, 0.0, 0.0, -h]),
        psi_plus: k([0.0, h, h, 0.0]),
        psi_minus: k([0.0, h, -h, 0.0]),
    }
}

fn combo(terms: &[(f64, &Ket)]) -> Ket {
    let (first, rest) = terms.split_first().expect("non-empty");
    rest.iter()
        .fold(first.0 * first.1, |acc, (w, k)| &acc + &(*w * *k))
}

/// Two-qubit probe family built on the Bell basis of the probe:
///
/// `|X> = sqrt(s)|x>|ξx> + sqrt(1-s)|y>|ζx>`
///
/// `|Y> = sqrt(s)|y>[sqrt(1-δ²)|ξy> + δ(-sqrt(1-β)|Ψ+> + sqrt(β)|Ψ->)]
///      + sqrt(1-s)|x>[sqrt(1-δ²)|ζy> + δ(-sqrt(1-α)|Φ+> + sqrt(α)|Φ->)]`
///
/// with `ξx,y = sqrt(α)|Φ+> ± sqrt(1-α)|Φ->` and
/// `ζx,y = sqrt(β)|Ψ+> ± sqrt(1-β)|Ψ->`.
///
/// `ζ` carries the same sign pattern as `ξ`. With the opposite pattern the
/// `δ` term on the `|y>` branch overlaps `ζx` and `<X|Y> = -2δ sqrt(s(1-s)β(1-β))`,
/// so the map would not be unitary; with this one the `δ` terms are exactly
/// the components orthogonal to `ξx` and `ζx` and `<X|Y> = 0` for every `δ`.
pub fn build_two_qubit_probe(p: &TwoQubitProbeParams) -> Result<ProbePair> {
    let bell = bell_basis();
    let (al, be) = (p.alpha2, p.beta2);
    let (sa, sa_c) = (al.sqrt(), (1.0 - al).sqrt());
    let (sb, sb_c) = (be.sqrt(), (1.0 - be).sqrt());
    let dl = p.delta;
    let dc = (1.0 - dl * dl).max(0.0).sqrt();

    let xi_x = combo(&[(sa, &bell.phi_plus), (sa_c, &bell.phi_minus)]);
    let xi_y = combo(&[(sa, &bell.phi_plus), (-sa_c, &bell.phi_minus)]);
    let zeta_x = combo(&[(sb, &bell.psi_plus), (sb_c, &bell.psi_minus)]);
    let zeta_y = combo(&[(sb, &bell.psi_plus), (-sb_c, &bell.psi_minus)]);

    let eve_y_on_y = combo(&[
        (dc, &xi_y),
        (-dl * sb_c, &bell.psi_plus),
        (dl * sb, &bell.psi_minus),
    ]);
    let eve_y_on_x = combo(&[
        (dc, &zeta_y),
        (-dl * sa_c, &bell.phi_plus),
        (dl * sa, &bell.phi_minus),
    ]);

    let kx = Ket::basis(2, 0)?;
    let ky = Ket::basis(2, 1)?;
    let (ss, ss_c) = (p.s.sqrt(), (1.0 - p.s).sqrt());

    let x = &(ss * &tensor(&kx, &xi_x)?) + &(ss_c * &tensor(&ky, &zeta_x)?);
    let y = &(ss * &tensor(&ky, &eve_y_on_y)?) + &(ss_c * &tensor(&kx, &eve_y_on_x)?);
    ProbePair::new(x, y)
}

/// Conjugate-basis signals `|u>, |v>` and the matching channel outputs
/// `|U> = (|X> + |Y>)/√2`, `|V> = (|X> - |Y>)/√2`.
#[derive(Debug, Clone)]
pub struct ConjugateSignals {
    pub u: Ket,
    pub v: Ket,
    pub big_u: Ket,
    pub big_v: Ket,
}

pub fn conjugate_signals(pp: &ProbePair) -> ConjugateSignals {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ConjugateSignals {
        u: Ket::from_real(&[h, h]).expect("dimension 2"),
        v: Ket::from_real(&[h, -h]).expect("dimension 2"),
        big_u: h * &(pp.x() + pp.y()),
        big_v: h * &(pp.x() - pp.y()),
    }
}
