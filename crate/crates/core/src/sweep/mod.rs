//! One-dimensional strategy sweeps, resonance-peak detection, attenuation of
//! the peaks with `δ`, and a grid search for the best one-qubit strategy.

mod csv;
mod peaks;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::infodist::{disturbance_delta0, evaluate, gain_closed_form, optimal_bound};
use crate::measurement::MeasurementKind;
use crate::par::{map_indexed, Execution};
use crate::probes::{OneQubitProbeParams, ProbeParams, TwoQubitProbeParams};
use crate::qstate::EXACT_TOL;

pub use self::csv::{format_sig12, write_csv, CSV_HEADER};
pub use self::peaks::{find_peaks, find_peaks_in, Peak, PeakReport};

/// Probe family being swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    OneQubit,
    TwoQubit,
}

impl Family {
    pub fn params(&self) -> &'static [Param] {
        match self {
            Family::OneQubit => &[Param::A, Param::C, Param::Delta],
            Family::TwoQubit => &[Param::Alpha2, Param::Beta2, Param::S, Param::Delta],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::OneQubit => "one-qubit",
            Family::TwoQubit => "two-qubit",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-qubit" => Ok(Family::OneQubit),
            "two-qubit" => Ok(Family::TwoQubit),
            other => Err(Error::InvalidParams(format!("unknown family '{other}'"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A strategy parameter of either family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    A,
    C,
    Delta,
    Alpha2,
    Beta2,
    S,
}

impl Param {
    pub fn name(&self) -> &'static str {
        match self {
            Param::A => "a",
            Param::C => "c",
            Param::Delta => "delta",
            Param::Alpha2 => "alpha2",
            Param::Beta2 => "beta2",
            Param::S => "s",
        }
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(Param::A),
            "c" => Ok(Param::C),
            "delta" => Ok(Param::Delta),
            "alpha2" => Ok(Param::Alpha2),
            "beta2" => Ok(Param::Beta2),
            "s" => Ok(Param::S),
            other => Err(Error::InvalidParams(format!("unknown parameter '{other}'"))),
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Linear tie `target = constant + coefficient · source`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tie {
    pub target: Param,
    pub constant: f64,
    pub coefficient: f64,
    pub source: Param,
}

impl Tie {
    pub fn apply(&self, source_value: f64) -> f64 {
        self.constant + self.coefficient * source_value
    }
}

impl FromStr for Tie {
    type Err = Error;

    /// Parses `target=K-source`, `target=K+source` or `target=K+m*source`
    /// (also `target=K-m*source`).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("cannot parse tie '{s}'"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (target, rhs) = compact.split_once('=').ok_or_else(bad)?;
        let target: Param = target.parse()?;
        // the sign separating constant and term is the last +/- that is not
        // part of an exponent or leading sign
        let split = rhs
            .char_indices()
            .skip(1)
            .filter(|&(i, ch)| {
                (ch == '+' || ch == '-') && !matches!(rhs.as_bytes()[i - 1], b'e' | b'E')
            })
            .map(|(i, _)| i)
            .last()
            .ok_or_else(bad)?;
        let constant: f64 = rhs[..split].parse().map_err(|_| bad())?;
        let sign = if &rhs[split..split + 1] == "-" {
            -1.0
        } else {
            1.0
        };
        let term = &rhs[split + 1..];
        let (coefficient, source) = match term.split_once('*') {
            Some((m, src)) => (m.parse::<f64>().map_err(|_| bad())?, src),
            None => (1.0, term),
        };
        Ok(Tie {
            target,
            constant,
            coefficient: sign * coefficient,
            source: source.parse()?,
        })
    }
}

impl fmt::Display for Tie {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (sign, m) = if self.coefficient < 0.0 {
            ('-', -self.coefficient)
        } else {
            ('+', self.coefficient)
        };
        if m == 1.0 {
            write!(
                f,
                "{}={}{}{}",
                self.target, self.constant, sign, self.source
            )
        } else {
            write!(
                f,
                "{}={}{}{}*{}",
                self.target, self.constant, sign, m, self.source
            )
        }
    }
}

/// A uniform one-dimensional sweep, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: Family,
    pub param: Param,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub fixed: BTreeMap<Param, f64>,
    pub tie: Option<Tie>,
    /// `None` selects the family default (see [`MeasurementKind::default_for`]).
    pub measurement: Option<MeasurementKind>,
}

/// Default number of grid points per sweep.
pub const DEFAULT_STEPS: usize = 2001;

impl SweepSpec {
    pub fn new(family: Family, param: Param, from: f64, to: f64, steps: usize) -> Self {
        SweepSpec {
            family,
            param,
            from,
            to,
            steps,
            fixed: BTreeMap::new(),
            tie: None,
            measurement: None,
        }
    }

    pub fn with(mut self, param: Param, value: f64) -> Self {
        self.fixed.insert(param, value);
        self
    }

    pub fn with_tie(mut self, tie: Tie) -> Self {
        self.tie = Some(tie);
        self
    }

    pub fn with_measurement(mut self, kind: MeasurementKind) -> Self {
        self.measurement = Some(kind);
        self
    }

    /// c-dependence of the one-qubit probe at `a = 0.5`, `δ = 0.05`.
    pub fn one_qubit_resonance() -> Self {
        SweepSpec::new(Family::OneQubit, Param::C, 0.01, 0.99, 1961)
            .with(Param::A, 0.5)
            .with(Param::Delta, 0.05)
    }

    /// α-dependence of the two-qubit probe with `β = 1.8 - α`, `s = 0.5`,
    /// `δ = 0.05`.
    pub fn two_qubit_resonance() -> Self {
        SweepSpec::new(Family::TwoQubit, Param::Alpha2, 0.8, 1.0, DEFAULT_STEPS)
            .with(Param::S, 0.5)
            .with(Param::Delta, 0.05)
            .with_tie(Tie {
                target: Param::Beta2,
                constant: 1.8,
                coefficient: -1.0,
                source: Param::Alpha2,
            })
    }

    /// Mutual information against disturbance for the `δ = 0`, `a = 0.01`
    /// one-qubit family, sweeping `c` over `[0, 1]`.
    pub fn one_qubit_tradeoff() -> Self {
        SweepSpec::new(Family::OneQubit, Param::C, 0.0, 1.0, 1001)
            .with(Param::A, 0.01)
            .with(Param::Delta, 0.0)
    }

    pub fn measurement_kind(&self) -> MeasurementKind {
        self.measurement.unwrap_or(match self.family {
            Family::OneQubit => MeasurementKind::ClosedForm,
            Family::TwoQubit => MeasurementKind::PrincipalAxis,
        })
    }

    /// Swept parameter value at grid index `i`; the last point is exactly `to`.
    pub fn grid_value(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            self.to
        } else {
            self.from + (self.to - self.from) * (i as f64) / ((self.steps - 1) as f64)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        let family_params = self.family.params();
        if !family_params.contains(&self.param) {
            return bad(format!(
                "parameter {} does not belong to the {} family",
                self.param, self.family
            ));
        }
        if !(self.from.is_finite() && self.to.is_finite() && self.from < self.to) {
            return bad(format!("sweep range [{}, {}] is empty", self.from, self.to));
        }
        if !(0.0..=1.0).contains(&self.from) || !(0.0..=1.0).contains(&self.to) {
            return bad(format!(
                "sweep range [{}, {}] leaves [0, 1]",
                self.from, self.to
            ));
        }
        if self.steps < 2 {
            return bad(format!("steps = {} (need at least 2)", self.steps));
        }
        for p in self.fixed.keys() {
            if !family_params.contains(p) {
                return bad(format!(
                    "parameter {p} does not belong to the {} family",
                    self.family
                ));
            }
        }
        if self.fixed.contains_key(&self.param) {
            return bad(format!("swept parameter {} is also fixed", self.param));
        }
        if let Some(tie) = &self.tie {
            if !family_params.contains(&tie.target) || !family_params.contains(&tie.source) {
                return bad(format!(
                    "tie {tie} names a parameter outside the {} family",
                    self.family
                ));
            }
            if tie.target == self.param || self.fixed.contains_key(&tie.target) {
                return bad(format!("tie target {} is already determined", tie.target));
            }
            if tie.source == tie.target {
                return bad(format!("tie {tie} is circular"));
            }
            if tie.source != self.param && !self.fixed.contains_key(&tie.source) {
                return bad(format!("tie source {} is not set", tie.source));
            }
        }
        for p in family_params {
            let determined = *p == self.param
                || self.fixed.contains_key(p)
                || self.tie.is_some_and(|t| t.target == *p);
            if !determined {
                return bad(format!("parameter {p} is not set"));
            }
        }
        if self.measurement == Some(MeasurementKind::ClosedForm) && self.family == Family::TwoQubit
        {
            return bad("the closed-form measurement applies to the one-qubit probe only".into());
        }
        Ok(())
    }

    /// Full parameter assignment at grid index `i`.
    fn point(&self, i: usize) -> Result<(f64, ProbeParams)> {
        let x = self.grid_value(i);
        let mut values = self.fixed.clone();
        values.insert(self.param, x);
        if let Some(tie) = &self.tie {
            let v = tie.apply(values[&tie.source]);
            if !(-EXACT_TOL..=1.0 + EXACT_TOL).contains(&v) {
                return Err(Error::InvalidParams(format!(
                    "grid point {i} ({} = {x}): tie {tie} gives {} = {v}, outside [0, 1]",
                    self.param, tie.target
                )));
            }
            values.insert(tie.target, v.clamp(0.0, 1.0));
        }
        let at = |msg: Error| {
            Error::InvalidParams(format!("grid point {i} ({} = {x}): {msg}", self.param))
        };
        let params = match self.family {
            Family::OneQubit => ProbeParams::OneQubit(
                OneQubitProbeParams::new(
                    values[&Param::A],
                    values[&Param::C],
                    values[&Param::Delta],
                )
                .map_err(at)?,
            ),
            Family::TwoQubit => ProbeParams::TwoQubit(
                TwoQubitProbeParams::new(
                    values[&Param::Alpha2],
                    values[&Param::Beta2],
                    values[&Param::S],
                    values[&Param::Delta],
                )
                .map_err(at)?,
            ),
        };
        Ok((x, params))
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub d: f64,
    pub du: f64,
    pub dv: f64,
    pub q0: f64,
    pub q1: f64,
    pub g: f64,
    pub iae: f64,
    pub bound: f64,
    pub degenerate: bool,
    /// Measurement that produced this row.
    pub measurement: MeasurementKind,
}

/// Numeric columns of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Column {
    D,
    Du,
    Dv,
    Q0,
    Q1,
    G,
    Iae,
    Bound,
}

impl Column {
    pub const ALL: [Column; 8] = [
        Column::D,
        Column::Du,
        Column::Dv,
        Column::Q0,
        Column::Q1,
        Column::G,
        Column::Iae,
        Column::Bound,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Column::D => "D",
            Column::Du => "Du",
            Column::Dv => "Dv",
            Column::Q0 => "q0",
            Column::Q1 => "q1",
            Column::G => "G",
            Column::Iae => "IAE",
            Column::Bound => "bound",
        }
    }
}

impl FromStr for Column {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Column::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown column '{s}'")))
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl SweepRow {
    pub fn get(&self, column: Column) -> f64 {
        match column {
            Column::D => self.d,
            Column::Du => self.du,
            Column::Dv => self.dv,
            Column::Q0 => self.q0,
            Column::Q1 => self.q1,
            Column::G => self.g,
            Column::Iae => self.iae,
            Column::Bound => self.bound,
        }
    }
}

/// [`run_sweep_with`] on the default executor.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    run_sweep_with(spec, Execution::Auto)
}

/// Evaluates every grid point of `spec`. Rows come back in grid order and
/// are identical for every [`Execution`]. Points where the requested
/// measurement is undefined are kept and flagged `degenerate`.
pub fn run_sweep_with(spec: &SweepSpec, exec: Execution) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    // parameter errors are reported before any evaluation, lowest index first
    let points = (0..spec.steps)
        .map(|i| spec.point(i))
        .collect::<Result<Vec<_>>>()?;
    let kind = spec.measurement_kind();
    let rows = map_indexed(points.len(), exec, |i| {
        let (x, params) = &points[i];
        evaluate(params, kind)
            .map(|r| SweepRow {
                value: *x,
                d: r.disturbance.d,
                du: r.disturbance.big_du,
                dv: r.disturbance.big_dv,
                q0: r.gain.q[0],
                q1: r.gain.q[1],
                g: r.gain.gain,
                iae: r.gain.iae,
                bound: r.bound,
                degenerate: r.degenerate,
                measurement: r.measurement,
            })
            .map_err(|e| match e {
                Error::DegenerateConditioning { .. } => {
                    Error::InvalidState(format!("grid point {i} ({} = {x}): {e}", spec.param))
                }
                other => other,
            })
    });
    rows.into_iter().collect()
}

/// Largest D-column peak prominence of a sweep at one `δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttenuationRow {
    pub delta: f64,
    /// `0` when the D column has no interior maximum.
    pub max_prominence: f64,
}

/// Re-runs `template` at each `δ` and reports the most prominent D peak.
pub fn attenuation(
    template: &SweepSpec,
    deltas: &[f64],
    exec: Execution,
) -> Result<Vec<AttenuationRow>> {
    if template.param == Param::Delta {
        return Err(Error::InvalidParams(
            "attenuation needs a template that does not sweep delta".into(),
        ));
    }
    deltas
        .iter()
        .map(|&delta| {
            let spec = template.clone().with(Param::Delta, delta);
            let rows = run_sweep_with(&spec, exec)?;
            let report = find_peaks(&rows, Column::D, 0.0)?;
            Ok(AttenuationRow {
                delta,
                max_prominence: report.max_prominence().unwrap_or(0.0),
            })
        })
        .collect()
}

/// Outcome of [`best_single_qubit_strategy`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestStrategy {
    pub params: OneQubitProbeParams,
    pub iae: f64,
    /// Disturbance of the chosen point, within the grid tolerance below the target.
    pub d: f64,
    /// `optimal_bound(target) - IAE`.
    pub gap: f64,
    /// `optimal_bound(d) - IAE` at the chosen point's own disturbance.
    pub gap_at_point: f64,
}

/// Grid search over `(a, c)` at `δ = 0` for the largest mutual information
/// whose disturbance lies in `(target - 1/resolution, target]`.
pub fn best_single_qubit_strategy(
    target_d: f64,
    resolution: usize,
    exec: Execution,
) -> Result<BestStrategy> {
    if !(target_d > 0.0 && target_d <= 0.5) {
        return Err(Error::InvalidParams(format!(
            "target disturbance {target_d} outside (0, 1/2]"
        )));
    }
    if resolution < 2 {
        return Err(Error::InvalidParams(format!(
            "grid resolution {resolution} (need at least 2)"
        )));
    }
    let tol = 1.0 / resolution as f64;
    let grid = |i: usize| {
        if i + 1 == resolution {
            1.0
        } else {
            i as f64 / (resolution - 1) as f64
        }
    };
    // best (iae, d, a, c) per a-row; strict > keeps the lowest index on ties
    let per_row = map_indexed(resolution, exec, |i| {
        let a = grid(i);
        let mut best: Option<(f64, f64, f64, f64)> = None;
        for j in 0..resolution {
            let c = grid(j);
            let p = OneQubitProbeParams::new(a, c, 0.0).expect("grid inside [0, 1]");
            let d = disturbance_delta0(&p).expect("delta = 0");
            if !(d > target_d - tol && d <= target_d) {
                continue;
            }
            let iae = gain_closed_form(&p).iae;
            if best.is_none_or(|b| iae > b.0) {
                best = Some((iae, d, a, c));
            }
        }
        best
    });
    let (iae, d, a, c) = per_row
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(f64, f64, f64, f64)>, x| match acc {
            Some(b) if b.0 >= x.0 => Some(b),
            _ => Some(x),
        })
        .ok_or_else(|| {
            Error::NoFeasiblePoint(format!(
                "no (a, c) on a {resolution}x{resolution} grid has D in ({}, {target_d}]",
                target_d - tol
            ))
        })?;
    Ok(BestStrategy {
        params: OneQubitProbeParams::new(a, c, 0.0)?,
        iae,
        d,
        gap: optimal_bound(target_d)? - iae,
        gap_at_point: optimal_bound(d.clamp(0.0, 0.5))? - iae,
    })
}
