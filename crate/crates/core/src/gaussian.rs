//! Gaussian states as labelled covariance matrices.
//!
//! Conventions used throughout the crate:
//!
//! * shot-noise units: the vacuum has quadrature variance 1;
//! * quadrature ordering `(x1, p1, x2, p2, ...)`, following `labels`;
//! * entropies in bits.
//!
//! Every operation takes `&self` and returns a new state, so values can be
//! shared freely between threads.

use alloc::borrow::Cow;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{ensure, Error};
use crate::linalg::Matrix;
use crate::math;
use crate::Result;

/// Relative tolerance for the symmetry invariant.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Symplectic eigenvalues below `1 - PHYSICAL_TOL` violate the uncertainty principle.
pub const PHYSICAL_TOL: f64 = 1e-9;
/// Entropy evaluation clamps `ν ∈ [1 - ENTROPY_CLAMP, 1)` to 1 and rejects anything lower.
pub const ENTROPY_CLAMP: f64 = 1e-6;

/// Opaque mode identifier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeId(Cow<'static, str>);

impl ModeId {
    pub const fn from_static(s: &'static str) -> Self {
        ModeId(Cow::Borrowed(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&'static str> for ModeId {
    fn from(s: &'static str) -> Self {
        ModeId(Cow::Borrowed(s))
    }
}

impl From<String> for ModeId {
    fn from(s: String) -> Self {
        ModeId(Cow::Owned(s))
    }
}

impl From<&ModeId> for ModeId {
    fn from(m: &ModeId) -> Self {
        m.clone()
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    fn offset(self) -> usize {
        match self {
            Quadrature::X => 0,
            Quadrature::P => 1,
        }
    }
}

/// The symplectic form `⊕ [[0, 1], [-1, 0]]` for `n_modes` modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticForm {
    n_modes: usize,
}

impl SymplecticForm {
    pub fn new(n_modes: usize) -> Self {
        SymplecticForm { n_modes }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> Matrix {
        let mut omega = Matrix::zeros(2 * self.n_modes, 2 * self.n_modes);
        for i in 0..self.n_modes {
            omega[(2 * i, 2 * i + 1)] = 1.0;
            omega[(2 * i + 1, 2 * i)] = -1.0;
        }
        omega
    }

    /// Whether `S Ω Sᵀ = Ω` holds to `tol`.
    pub fn preserved_by(&self, transform: &Matrix, tol: f64) -> bool {
        let omega = self.matrix();
        transform.congruence(&omega).max_abs_diff(&omega) <= tol
    }
}

/// Binary-entropy kernel of a thermal mode with symplectic eigenvalue `nu`:
/// `g(ν) = ((ν+1)/2) log₂((ν+1)/2) - ((ν-1)/2) log₂((ν-1)/2)`, `g(1) = 0`.
pub fn entropy_g(nu: f64) -> f64 {
    if nu <= 1.0 {
        return 0.0;
    }
    let a = 0.5 * (nu + 1.0);
    let b = 0.5 * (nu - 1.0);
    a * math::log2(a) - b * math::log2(b)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    labels: Vec<ModeId>,
    cm: Matrix,
    mean: Vec<f64>,
}

impl Default for GaussianState {
    fn default() -> Self {
        GaussianState::empty()
    }
}

impl GaussianState {
    /// The zero-mode state.
    pub fn empty() -> Self {
        GaussianState {
            labels: Vec::new(),
            cm: Matrix::zeros(0, 0),
            mean: Vec::new(),
        }
    }

    /// Wraps an existing covariance matrix (zero mean). Checks dimensions,
    /// label uniqueness and symmetry; physicality is left to
    /// [`check_physical`](Self::check_physical).
    pub fn from_covariance<L: Into<ModeId>>(labels: impl IntoIterator<Item = L>, cm: Matrix) -> Result<Self> {
        let labels: Vec<ModeId> = labels.into_iter().map(Into::into).collect();
        if !cm.is_square() || cm.rows() != 2 * labels.len() {
            return Err(Error::Dimension(format!(
                "{} labels need a {}x{} matrix, got {}x{}",
                labels.len(),
                2 * labels.len(),
                2 * labels.len(),
                cm.rows(),
                cm.cols()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateMode(l.clone()));
            }
        }
        if !cm.is_finite() {
            return Err(Error::Unphysical("non-finite covariance entry".into()));
        }
        if cm.asymmetry() > SYMMETRY_TOL {
            return Err(Error::Unphysical(format!("covariance not symmetric ({:e})", cm.asymmetry())));
        }
        let n = cm.rows();
        Ok(GaussianState {
            labels,
            cm: cm.symmetrized(),
            mean: vec![0.0; n],
        })
    }

    pub fn n_modes(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[ModeId] {
        &self.labels
    }

    pub fn covariance(&self) -> &Matrix {
        &self.cm
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn contains(&self, mode: &ModeId) -> bool {
        self.labels.contains(mode)
    }

    pub fn index_of(&self, mode: &ModeId) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == mode)
            .ok_or_else(|| Error::UnknownMode(mode.clone()))
    }

    fn row_of(&self, mode: &ModeId, q: Quadrature) -> Result<usize> {
        Ok(2 * self.index_of(mode)? + q.offset())
    }

    pub fn variance(&self, mode: impl Into<ModeId>, q: Quadrature) -> Result<f64> {
        let r = self.row_of(&mode.into(), q)?;
        Ok(self.cm[(r, r)])
    }

    pub fn covariance_between(
        &self,
        a: impl Into<ModeId>,
        qa: Quadrature,
        b: impl Into<ModeId>,
        qb: Quadrature,
    ) -> Result<f64> {
        let ra = self.row_of(&a.into(), qa)?;
        let rb = self.row_of(&b.into(), qb)?;
        Ok(self.cm[(ra, rb)])
    }

    /// Appends independent modes described by `block` (size `2·labels.len()`).
    pub fn attach_block(&self, labels: &[ModeId], block: &Matrix) -> Result<Self> {
        if block.rows() != 2 * labels.len() || !block.is_square() {
            return Err(Error::Dimension(format!("block {}x{} for {} modes", block.rows(), block.cols(), labels.len())));
        }
        for (i, l) in labels.iter().enumerate() {
            if self.contains(l) || labels[..i].contains(l) {
                return Err(Error::DuplicateMode(l.clone()));
            }
        }
        let n = self.cm.rows();
        let m = block.rows();
        let mut cm = Matrix::zeros(n + m, n + m);
        for i in 0..n {
            for j in 0..n {
                cm[(i, j)] = self.cm[(i, j)];
            }
        }
        for i in 0..m {
            for j in 0..m {
                cm[(n + i, n + j)] = block[(i, j)];
            }
        }
        let mut labels_out = self.labels.clone();
        labels_out.extend(labels.iter().cloned());
        let mut mean = self.mean.clone();
        mean.extend(core::iter::repeat(0.0).take(m));
        Ok(GaussianState {
            labels: labels_out,
            cm,
            mean,
        })
    }

    pub fn attach_vacuum(&self, label: impl Into<ModeId>) -> Result<Self> {
        self.attach_block(&[label.into()], &Matrix::identity(2))
    }

    /// Thermal mode `diag(v, v)`, `v ≥ 1`.
    pub fn attach_thermal(&self, label: impl Into<ModeId>, v: f64) -> Result<Self> {
        ensure(v >= 1.0 && v.is_finite(), "thermal variance", v, ">= 1")?;
        self.attach_block(&[label.into()], &Matrix::diag(&[v, v]))
    }

    /// Pure squeezed mode `diag(v_x, 1/v_x)`.
    pub fn attach_squeezed(&self, label: impl Into<ModeId>, v_x: f64) -> Result<Self> {
        ensure(v_x > 0.0 && v_x.is_finite(), "squeezed variance", v_x, "> 0")?;
        self.attach_block(&[label.into()], &Matrix::diag(&[v_x, 1.0 / v_x]))
    }

    /// Two-mode squeezed vacuum with per-mode variance `v`: x-correlation
    /// `+√(v²-1)`, p-correlation `-√(v²-1)`.
    pub fn attach_epr(&self, a: impl Into<ModeId>, b: impl Into<ModeId>, v: f64) -> Result<Self> {
        ensure(v >= 1.0 && v.is_finite(), "EPR variance", v, ">= 1")?;
        let c = math::sqrt(v * v - 1.0);
        let block = Matrix::from_rows(&[[v, 0.0, c, 0.0], [0.0, v, 0.0, -c], [c, 0.0, v, 0.0], [0.0, -c, 0.0, v]]);
        self.attach_block(&[a.into(), b.into()], &block)
    }

    fn apply_symplectic(&self, s: &Matrix) -> Self {
        let cm = s.congruence(&self.cm).symmetrized();
        let mean = (0..s.rows())
            .map(|i| (0..s.cols()).map(|j| s[(i, j)] * self.mean[j]).sum())
            .collect();
        GaussianState {
            labels: self.labels.clone(),
            cm,
            mean,
        }
    }

    /// Beam splitter with transmittance `t`:
    /// `a' = √t a + √(1-t) b`, `b' = -√(1-t) a + √t b` on both quadratures.
    pub fn apply_beamsplitter(&self, a: impl Into<ModeId>, b: impl Into<ModeId>, t: f64) -> Result<Self> {
        ensure((0.0..=1.0).contains(&t), "beam splitter transmittance", t, "[0, 1]")?;
        let (a, b) = (a.into(), b.into());
        let ia = self.index_of(&a)?;
        let ib = self.index_of(&b)?;
        if ia == ib {
            return Err(Error::DuplicateMode(a));
        }
        let n = self.cm.rows();
        let mut s = Matrix::identity(n);
        let (tt, rr) = (math::sqrt(t), math::sqrt(1.0 - t));
        for q in 0..2 {
            let (ra, rb) = (2 * ia + q, 2 * ib + q);
            s[(ra, ra)] = tt;
            s[(ra, rb)] = rr;
            s[(rb, ra)] = -rr;
            s[(rb, rb)] = tt;
        }
        Ok(self.apply_symplectic(&s))
    }

    /// Single-mode squeezer: x scaled by `e^{-r}`, p by `e^{r}`.
    pub fn apply_squeezer(&self, mode: impl Into<ModeId>, r: f64) -> Result<Self> {
        ensure(r.is_finite(), "squeezing parameter", r, "finite")?;
        let i = self.index_of(&mode.into())?;
        let mut s = Matrix::identity(self.cm.rows());
        s[(2 * i, 2 * i)] = math::exp(-r);
        s[(2 * i + 1, 2 * i + 1)] = math::exp(r);
        Ok(self.apply_symplectic(&s))
    }

    /// Adds a classical Gaussian displacement of variance `variance` applied
    /// with weight `coeff` to each listed quadrature: `γ += V·a·aᵀ`.
    ///
    /// This is how Gaussian modulation appears in the ensemble-averaged state.
    pub fn modulate(&self, pattern: &[(ModeId, Quadrature, f64)], variance: f64) -> Result<Self> {
        ensure(variance >= 0.0 && variance.is_finite(), "modulation variance", variance, ">= 0")?;
        let mut a = vec![0.0; self.cm.rows()];
        for (mode, q, coeff) in pattern {
            a[self.row_of(mode, *q)?] += coeff;
        }
        let mut cm = self.cm.clone();
        for i in 0..a.len() {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..a.len() {
                cm[(i, j)] += variance * a[i] * a[j];
            }
        }
        Ok(GaussianState {
            labels: self.labels.clone(),
            cm,
            mean: self.mean.clone(),
        })
    }

    /// Lossy, noisy channel on one mode without purification:
    /// `γ_mode → t·γ_mode + added·I`, cross terms scaled by `√t`.
    pub fn apply_attenuation(&self, mode: impl Into<ModeId>, t: f64, added_noise: f64) -> Result<Self> {
        ensure((0.0..=1.0).contains(&t), "transmittance", t, "[0, 1]")?;
        ensure(added_noise >= 0.0, "added noise", added_noise, ">= 0")?;
        let i = self.index_of(&mode.into())?;
        let n = self.cm.rows();
        let mut x = Matrix::identity(n);
        x[(2 * i, 2 * i)] = math::sqrt(t);
        x[(2 * i + 1, 2 * i + 1)] = math::sqrt(t);
        let mut cm = x.congruence(&self.cm);
        cm[(2 * i, 2 * i)] += added_noise;
        cm[(2 * i + 1, 2 * i + 1)] += added_noise;
        let mut mean = self.mean.clone();
        mean[2 * i] *= math::sqrt(t);
        mean[2 * i + 1] *= math::sqrt(t);
        Ok(GaussianState {
            labels: self.labels.clone(),
            cm: cm.symmetrized(),
            mean,
        })
    }

    /// Reduced state on `keep`, in the order given.
    pub fn partial_trace<L: Into<ModeId> + Clone>(&self, keep: &[L]) -> Result<Self> {
        let keep: Vec<ModeId> = keep.iter().cloned().map(Into::into).collect();
        let mut rows = Vec::with_capacity(2 * keep.len());
        for (i, m) in keep.iter().enumerate() {
            if keep[..i].contains(m) {
                return Err(Error::DuplicateMode(m.clone()));
            }
            let k = self.index_of(m)?;
            rows.push(2 * k);
            rows.push(2 * k + 1);
        }
        Ok(GaussianState {
            cm: self.cm.select(&rows, &rows),
            mean: rows.iter().map(|&r| self.mean[r]).collect(),
            labels: keep,
        })
    }

    fn split_rows(&self, measured: &[usize]) -> Vec<usize> {
        (0..self.cm.rows()).filter(|r| !measured.contains(r)).collect()
    }

    fn remaining_labels(&self, removed: usize) -> Vec<ModeId> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != removed)
            .map(|(_, l)| l.clone())
            .collect()
    }

    /// Homodyne measurement of one quadrature of `mode` (zero outcome);
    /// the measured mode is removed:
    /// `γ_rest − σ (X γ_m X)^{MP} σᵀ`.
    pub fn homodyne_condition(&self, mode: impl Into<ModeId>, q: Quadrature) -> Result<Self> {
        let mode = mode.into();
        let k = self.index_of(&mode)?;
        let measured_row = 2 * k + q.offset();
        let v = self.cm[(measured_row, measured_row)];
        if v < 0.0 || v.is_nan() {
            return Err(Error::Unphysical(format!("measured variance {v} of `{mode}`")));
        }
        let rest = self.split_rows(&[2 * k, 2 * k + 1]);
        let mut cm = self.cm.select(&rest, &rest);
        // Moore–Penrose: the pseudoinverse of a zero variance is zero.
        if v > 0.0 {
            let sigma: Vec<f64> = rest.iter().map(|&r| self.cm[(r, measured_row)]).collect();
            for i in 0..rest.len() {
                for j in 0..rest.len() {
                    cm[(i, j)] -= sigma[i] * sigma[j] / v;
                }
            }
        }
        Ok(GaussianState {
            labels: self.remaining_labels(k),
            cm: cm.symmetrized(),
            mean: rest.iter().map(|&r| self.mean[r]).collect(),
        })
    }

    /// Heterodyne measurement of `mode`: `γ_rest − σ (γ_m + I)^{-1} σᵀ`.
    pub fn heterodyne_condition(&self, mode: impl Into<ModeId>) -> Result<Self> {
        let mode = mode.into();
        let k = self.index_of(&mode)?;
        let m = [2 * k, 2 * k + 1];
        let gm = self.cm.select(&m, &m).add(&Matrix::identity(2));
        let det = gm.determinant();
        if !(det > 0.0) || gm[(0, 0)] <= 0.0 {
            return Err(Error::Unphysical(format!("heterodyne on `{mode}` with singular kernel")));
        }
        let inv = Matrix::from_rows(&[[gm[(1, 1)] / det, -gm[(0, 1)] / det], [-gm[(1, 0)] / det, gm[(0, 0)] / det]]);
        let rest = self.split_rows(&m);
        let sigma = self.cm.select(&rest, &m);
        let cm = self.cm.select(&rest, &rest).sub(&sigma.congruence(&inv));
        Ok(GaussianState {
            labels: self.remaining_labels(k),
            cm: cm.symmetrized(),
            mean: rest.iter().map(|&r| self.mean[r]).collect(),
        })
    }

    /// Symplectic eigenvalues in descending order.
    ///
    /// Computed from `Kᵀ K` with `K = γ^{1/2} Ω γ^{1/2}`: `K` is real
    /// antisymmetric with eigenvalues `±iν`, so `KᵀK` has each `ν²` twice.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let n = self.n_modes();
        if n == 0 {
            return Vec::new();
        }
        let root = self.cm.sqrt_psd();
        let omega = SymplecticForm::new(n).matrix();
        let k = &(&root * &omega) * &root;
        let ktk = &k.transpose() * &k;
        let mut sq = ktk.symmetric_eigen().values;
        sq.sort_by(|a, b| b.total_cmp(a));
        (0..n)
            .map(|i| math::sqrt((0.5 * (sq[2 * i] + sq[2 * i + 1])).max(0.0)))
            .collect()
    }

    /// Largest `|ν - 1|`; zero for a pure state.
    pub fn purity_defect(&self) -> f64 {
        self.symplectic_eigenvalues()
            .iter()
            .fold(0.0, |m, nu| m.max((nu - 1.0).abs()))
    }

    /// Checks symmetry and the uncertainty principle `ν ≥ 1 - 1e-9`.
    pub fn check_physical(&self) -> Result<()> {
        if self.cm.asymmetry() > SYMMETRY_TOL {
            return Err(Error::Unphysical(format!("asymmetry {:e}", self.cm.asymmetry())));
        }
        if let Some(nu) = self.symplectic_eigenvalues().last() {
            if *nu < 1.0 - PHYSICAL_TOL {
                return Err(Error::Unphysical(format!("symplectic eigenvalue {nu} < 1")));
            }
        }
        Ok(())
    }

    /// Von Neumann entropy in bits, `Σ g(ν_i)`.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        self.von_neumann_entropy_with(entropy_g)
    }

    /// Same as [`von_neumann_entropy`](Self::von_neumann_entropy) with a
    /// caller-supplied kernel (used by the validation canaries).
    pub fn von_neumann_entropy_with(&self, g: fn(f64) -> f64) -> Result<f64> {
        let mut total = 0.0;
        for nu in self.symplectic_eigenvalues() {
            if nu < 1.0 - ENTROPY_CLAMP || nu.is_nan() {
                return Err(Error::Unphysical(format!("symplectic eigenvalue {nu} < 1")));
            }
            total += g(nu.max(1.0));
        }
        Ok(total)
    }
}
