//! Dense complex linear algebra over the small Hilbert spaces used here
//! (dimension 2, 4 or 8).
//!
//! Basis order is the usual Kronecker order: in a product space the first
//! factor is the slowest-varying index. For Bob-plus-probe states the Bob
//! qubit is always the first factor, so `|10>` means Bob in `|1>` and the
//! probe in `|0>`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for exact-structure checks (Hermiticity, normalization, completeness).
pub const EXACT_TOL: f64 = 1e-12;
/// Tolerance for results of the iterative eigensolver.
pub const ITER_TOL: f64 = 1e-10;

const ALLOWED_DIMS: [usize; 3] = [2, 4, 8];
const MAX_JACOBI_SWEEPS: usize = 64;

fn check_dim(dim: usize) -> Result<()> {
    if ALLOWED_DIMS.contains(&dim) {
        Ok(())
    } else {
        Err(Error::InvalidDimension(format!(
            "dimension {dim} not in {{2, 4, 8}}"
        )))
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// A state vector in the computational basis.
#[derive(Clone, PartialEq)]
pub struct Ket {
    amps: Vec<C64>,
}

impl Ket {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        check_dim(amps.len())?;
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        Ok(Ket { amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Ket::new(amps.iter().map(|&a| c(a)).collect())
    }

    /// The computational basis vector `|index>`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::InvalidDimension(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![C64::default(); dim];
        amps[index] = c(1.0);
        Ok(Ket { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amp(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, factor: C64) -> Ket {
        Ket {
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// `|self><other|`
    pub fn outer(&self, other: &Ket) -> Result<Operator> {
        if self.dim() != other.dim() {
            return Err(dim_mismatch(self.dim(), other.dim()));
        }
        let dim = self.dim();
        let mut data = Vec::with_capacity(dim * dim);
        for a in &self.amps {
            for b in &other.amps {
                data.push(a * b.conj());
            }
        }
        Ok(Operator { dim, data })
    }

    /// `|self><self|`
    pub fn projector(&self) -> Operator {
        self.outer(self).expect("same dimension")
    }

    /// Largest absolute amplitude difference to `other`.
    pub fn max_abs_diff(&self, other: &Ket) -> f64 {
        assert_eq!(self.dim(), other.dim(), "ket dimension mismatch");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.amps.iter()).finish()
    }
}

impl Add for &Ket {
    type Output = Ket;

    fn add(self, rhs: &Ket) -> Ket {
        assert_eq!(self.dim(), rhs.dim(), "ket dimension mismatch");
        Ket {
            amps: self
                .amps
                .iter()
                .zip(&rhs.amps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Ket {
    type Output = Ket;

    fn sub(self, rhs: &Ket) -> Ket {
        assert_eq!(self.dim(), rhs.dim(), "ket dimension mismatch");
        Ket {
            amps: self
                .amps
                .iter()
                .zip(&rhs.amps)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul<&Ket> for f64 {
    type Output = Ket;

    fn mul(self, rhs: &Ket) -> Ket {
        rhs.scale(c(self))
    }
}

fn dim_mismatch(a: usize, b: usize) -> Error {
    Error::InvalidDimension(format!("dimension mismatch: {a} vs {b}"))
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &Ket, b: &Ket) -> Result<Ket> {
    let dim = a.dim() * b.dim();
    if dim > 8 {
        return Err(Error::InvalidDimension(format!(
            "tensor product dimension {dim} exceeds 8"
        )));
    }
    let mut amps = Vec::with_capacity(dim);
    for x in &a.amps {
        for y in &b.amps {
            amps.push(x * y);
        }
    }
    Ok(Ket { amps })
}

/// `<a|b>`, conjugate-linear in `a`.
pub fn inner(a: &Ket, b: &Ket) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(dim_mismatch(a.dim(), b.dim()));
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<C64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Operator {
            dim,
            data: vec![C64::default(); dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut op = Operator::zeros(dim)?;
        for i in 0..dim {
            op.data[i * dim + i] = c(1.0);
        }
        Ok(op)
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        check_dim(dim)?;
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidDimension(
                "operator rows are not square".into(),
            ));
        }
        let data: Vec<C64> = rows.iter().flatten().copied().collect();
        if data.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidState("non-finite operator entry".into()));
        }
        Ok(Operator { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c(x)).collect())
            .collect();
        Operator::from_rows(&rows)
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let mut op = Operator::zeros(values.len())?;
        for (i, &v) in values.iter().enumerate() {
            op.data[i * op.dim + i] = c(v);
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Operator {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = self.data[j * n + i].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: C64) -> Operator {
        Operator {
            dim: self.dim,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Operator) -> Result<Operator> {
        if self.dim != rhs.dim {
            return Err(dim_mismatch(self.dim, rhs.dim));
        }
        let n = self.dim;
        let mut data = vec![C64::default(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::default() {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        Ok(Operator { dim: n, data })
    }

    /// `self ⊗ rhs`
    pub fn kron(&self, rhs: &Operator) -> Result<Operator> {
        let n = self.dim * rhs.dim;
        if n > 8 {
            return Err(Error::InvalidDimension(format!(
                "operator tensor dimension {n} exceeds 8"
            )));
        }
        let (m, r) = (self.dim, rhs.dim);
        let mut data = vec![C64::default(); n * n];
        for i1 in 0..m {
            for j1 in 0..m {
                let a = self.data[i1 * m + j1];
                for i2 in 0..r {
                    for j2 in 0..r {
                        data[(i1 * r + i2) * n + (j1 * r + j2)] = a * rhs.data[i2 * r + j2];
                    }
                }
            }
        }
        Ok(Operator { dim: n, data })
    }

    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        if self.dim != ket.dim() {
            return Err(dim_mismatch(self.dim, ket.dim()));
        }
        let n = self.dim;
        let amps = (0..n)
            .map(|i| (0..n).map(|j| self.data[i * n + j] * ket.amps[j]).sum())
            .collect();
        Ok(Ket { amps })
    }

    /// `<psi|self|psi>`
    pub fn expectation(&self, psi: &Ket) -> Result<C64> {
        inner(psi, &self.apply(psi)?)
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Frobenius norm of `self - other`.
    pub fn frobenius_dist(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.dim)).finish()
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        Operator {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        Operator {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul<&Operator> for f64 {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        rhs.scale(c(self))
    }
}

/// Which factor of a bipartite space `partial_trace` keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Reduced operator of `rho` on a `d1 × d2` bipartite space.
pub fn partial_trace(rho: &Operator, dims: (usize, usize), keep: Keep) -> Result<Operator> {
    let (d1, d2) = dims;
    if d1 * d2 != rho.dim() {
        return Err(Error::InvalidDimension(format!(
            "operator of dimension {} is not a {d1}x{d2} bipartite operator",
            rho.dim()
        )));
    }
    let n = rho.dim();
    let kept = match keep {
        Keep::First => d1,
        Keep::Second => d2,
    };
    let mut out = Operator::zeros(kept)?;
    match keep {
        Keep::First => {
            for i in 0..d1 {
                for j in 0..d1 {
                    let s: C64 = (0..d2)
                        .map(|k| rho.data[(i * d2 + k) * n + (j * d2 + k)])
                        .sum();
                    out.set(i, j, s);
                }
            }
        }
        Keep::Second => {
            for i in 0..d2 {
                for j in 0..d2 {
                    let s: C64 = (0..d1)
                        .map(|k| rho.data[(k * d2 + i) * n + (k * d2 + j)])
                        .sum();
                    out.set(i, j, s);
                }
            }
        }
    }
    Ok(out)
}

/// One eigenpair of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Ket,
}

/// Eigendecomposition of a Hermitian operator by cyclic complex Jacobi
/// rotations. Eigenvalues come back in descending order; each eigenvector
/// has its largest-magnitude component real and positive.
pub fn eigh(h: &Operator) -> Result<Vec<EigenPair>> {
    let defect = h.hermiticity_defect();
    if defect > EXACT_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.dim;
    // symmetrize so rounding noise below the tolerance does not leak in
    let mut a = &h.scale(c(0.5)) + &h.adjoint().scale(c(0.5));
    let mut v = Operator::identity(n)?;

    let scale = a.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let threshold = f64::EPSILON * scale.max(f64::MIN_POSITIVE) * 1e-2;

    for _ in 0..MAX_JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let mag = apq.norm();
                if mag <= threshold / (n as f64) {
                    continue;
                }
                let phase = apq / mag;
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // G = diag(1, conj(phase)) · [[c, s], [-s, c]] on the (p, q) plane
                let g_pp = c(cs);
                let g_pq = c(sn);
                let g_qp = -phase.conj() * sn;
                let g_qq = phase.conj() * cs;
                rotate(&mut a, &mut v, p, q, [g_pp, g_pq, g_qp, g_qq]);
            }
        }
    }

    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|k| {
            let mut amps: Vec<C64> = (0..n).map(|i| v.get(i, k)).collect();
            canonical_phase(&mut amps);
            EigenPair {
                value: a.get(k, k).re,
                vector: Ket { amps },
            }
        })
        .collect();
    pairs.sort_by(|x, y| y.value.total_cmp(&x.value));
    Ok(pairs)
}

/// `A <- G† A G`, `V <- V G` for a unitary `G` acting on the (p, q) plane.
fn rotate(a: &mut Operator, v: &mut Operator, p: usize, q: usize, g: [C64; 4]) {
    let n = a.dim;
    let [g_pp, g_pq, g_qp, g_qq] = g;
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * g_pp + akq * g_qp);
        a.set(k, q, akp * g_pq + akq * g_qq);
    }
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, g_pp.conj() * apk + g_qp.conj() * aqk);
        a.set(q, k, g_pq.conj() * apk + g_qq.conj() * aqk);
    }
    a.set(p, q, C64::default());
    a.set(q, p, C64::default());
    let (app, aqq) = (a.get(p, p).re, a.get(q, q).re);
    a.set(p, p, c(app));
    a.set(q, q, c(aqq));
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * g_pp + vkq * g_qp);
        v.set(k, q, vkp * g_pq + vkq * g_qq);
    }
}

fn canonical_phase(amps: &mut [C64]) {
    let mut best = 0;
    for (i, a) in amps.iter().enumerate() {
        if a.norm() > amps[best].norm() + 1e-12 {
            best = i;
        }
    }
    let pivot = amps[best];
    if pivot.norm() > 0.0 {
        let rot = pivot.conj() / pivot.norm();
        for a in amps.iter_mut() {
            *a *= rot;
        }
    }
}
