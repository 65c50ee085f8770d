//! States and operators on truncated Fock spaces.
//!
//! A cutoff of `N` keeps the number states `|0⟩ … |N⟩`; a [`FockVector`]
//! stores the `N + 1` complex amplitudes of a pure single-mode state and a
//! [`MultiModeState`] stores the amplitude tensor of a pure `M`-mode state
//! with independent per-mode cutoffs.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{ln_factorial, powi};
use crate::tolerances;

/// Rule for choosing a safe truncation for a displaced state.
///
/// A displacement of size `|α|` pushes population up to mean photon number
/// `|α|²` with a spread of order `|α|`, so the cutoff must sit several
/// standard deviations above `n_max + |α|²`.
#[derive(Debug, Clone, Copy)]
pub struct CutoffPolicy {
    /// Extra padding on top of the displacement headroom.
    pub base_pad: usize,
    /// Probability mass allowed past the truncation edge.
    pub tail_tol: f64,
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        Self { base_pad: 10, tail_tol: tolerances::TAIL_TOL }
    }
}

impl CutoffPolicy {
    pub fn with_base_pad(base_pad: usize) -> Self {
        Self { base_pad, ..Self::default() }
    }

    /// Minimum cutoff for working with `|n_max, α⟩`-type states.
    /// Monotone in both arguments.
    ///
    /// The classical support of `|n, α⟩` ends near `(√n + |α|)²`, so the
    /// headroom carries a `2|α|√n` spreading term on top of the
    /// `|α|² + 6|α|` displacement budget.
    pub fn required_cutoff(&self, alpha_abs: f64, n_max: usize) -> usize {
        let spread = 2.0 * alpha_abs * (n_max as f64).sqrt();
        let headroom = (alpha_abs * alpha_abs + 6.0 * alpha_abs + spread).ceil() as usize;
        headroom + n_max + self.base_pad
    }

    /// Largest `n` for which `cutoff` satisfies the policy at `|α|`; the
    /// truncated displacement operator is unitary to tolerance on the block
    /// of this size.
    pub fn max_interior(&self, cutoff: usize, alpha_abs: f64) -> usize {
        let mut n = 0;
        while self.required_cutoff(alpha_abs, n + 1) <= cutoff {
            n += 1;
        }
        n + 1
    }

    /// Errors unless `cutoff` satisfies the policy.
    pub fn check(&self, cutoff: usize, alpha_abs: f64, n_max: usize) -> Result<()> {
        let required = self.required_cutoff(alpha_abs, n_max);
        if cutoff < required {
            return Err(Error::InsufficientCutoff { required, got: cutoff });
        }
        Ok(())
    }
}

/// Pure single-mode state on a truncated number basis.
///
/// Entry `n` of the amplitude list is the coefficient of `|n⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
}

impl FockVector {
    pub fn new(amps: Vec<Complex64>) -> Self {
        assert!(!amps.is_empty(), "FockVector needs at least the vacuum slot");
        Self { amps }
    }

    pub fn zeros(cutoff: usize) -> Self {
        Self { amps: vec![Complex64::new(0.0, 0.0); cutoff + 1] }
    }

    /// `|n⟩` on a space truncated at `cutoff`.
    pub fn basis_state(n: usize, cutoff: usize) -> Self {
        assert!(n <= cutoff, "basis index past cutoff");
        let mut v = Self::zeros(cutoff);
        v.amps[n] = Complex64::new(1.0, 0.0);
        v
    }

    /// Coherent state `|0, α⟩` from the closed form
    /// `e^{−|α|²/2} αⁿ/√(n!)`. Used as an independent check on the
    /// displacement-operator route.
    pub fn coherent(alpha: Complex64, cutoff: usize) -> Self {
        let pref = (-0.5 * alpha.norm_sqr()).exp();
        let amps = (0..=cutoff)
            .map(|n| powi(alpha, n) * (pref.ln() - 0.5 * ln_factorial(n)).exp())
            .collect();
        Self { amps }
    }

    /// Normalized superposition `Σ wᵢ |0, zᵢ⟩` of coherent components.
    pub fn coherent_superposition(components: &[(Complex64, Complex64)], cutoff: usize) -> Self {
        let mut v = Self::zeros(cutoff);
        for &(weight, z) in components {
            let part = Self::coherent(z, cutoff);
            for (acc, a) in v.amps.iter_mut().zip(part.amps.iter()) {
                *acc += weight * a;
            }
        }
        v.normalize();
        v
    }

    pub fn cutoff(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn amp(&self, n: usize) -> Complex64 {
        self.amps[n]
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            for a in &mut self.amps {
                *a /= norm;
            }
        }
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    /// Probability mass sitting on the last retained number state.
    pub fn tail_mass(&self) -> f64 {
        self.amps.last().map(|a| a.norm_sqr()).unwrap_or(0.0)
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.len() != other.len() {
            return Err(Error::ShapeMismatch(format!(
                "cutoffs {} vs {}",
                self.cutoff(),
                other.cutoff()
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |⟨self|other⟩|² for two normalized states.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        for v in [self, other] {
            if !v.is_normalized(1e-6) {
                return Err(Error::NotNormalized { norm_sqr: v.norm_sqr() });
            }
        }
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Σ n·|amp(n)|², the mean energy above vacuum.
    pub fn mean_photon_number(&self) -> Result<f64> {
        if !self.is_normalized(tolerances::NORM_TOL.max(1e-8)) {
            return Err(Error::NotNormalized { norm_sqr: self.norm_sqr() });
        }
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(n, a)| n as f64 * a.norm_sqr())
            .sum())
    }
}

/// Dense complex operator on a truncated single-mode space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    mat: ndarray::Array2<Complex64>,
}

impl OperatorMatrix {
    pub fn from_array(mat: ndarray::Array2<Complex64>) -> Self {
        assert_eq!(mat.nrows(), mat.ncols(), "operator must be square");
        Self { mat }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { mat: ndarray::Array2::zeros((dim, dim)) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: ndarray::Array2::from_diag_elem(dim, Complex64::new(1.0, 0.0)) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn cutoff(&self) -> usize {
        self.dim() - 1
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.mat[[row, col]]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.mat[[row, col]] = value;
    }

    pub fn array(&self) -> &ndarray::Array2<Complex64> {
        &self.mat
    }

    pub fn dagger(&self) -> Self {
        Self { mat: self.mat.t().mapv(|z| z.conj()) }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim(), rhs.dim());
        Self { mat: self.mat.dot(&rhs.mat) }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { mat: self.mat.mapv(|z| z * factor) }
    }

    /// Column `n`, as a state vector.
    pub fn column(&self, n: usize) -> FockVector {
        FockVector::new(self.mat.column(n).to_vec())
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        if v.len() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "operator dim {} vs state dim {}",
                self.dim(),
                v.len()
            )));
        }
        let arr = ndarray::ArrayView1::from(v.amps());
        Ok(FockVector::new(self.mat.dot(&arr).to_vec()))
    }

    /// Keep only the upper-left `dim × dim` block.
    pub fn crop(&self, dim: usize) -> Self {
        assert!(dim <= self.dim());
        Self { mat: self.mat.slice(ndarray::s![..dim, ..dim]).to_owned() }
    }

    /// Max-entry deviation of `M†M` from the identity, restricted to the
    /// first `interior` rows and columns. Truncated unitaries are only
    /// unitary away from the cutoff edge.
    pub fn max_unitarity_deviation(&self, interior: usize) -> f64 {
        let product = self.dagger().mat.dot(&self.mat);
        let mut worst = 0.0f64;
        for i in 0..interior.min(self.dim()) {
            for j in 0..interior.min(self.dim()) {
                let expect = if i == j { 1.0 } else { 0.0 };
                let dev = (product[[i, j]] - Complex64::new(expect, 0.0)).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }
}

/// Pure `M`-mode state as a flat amplitude tensor, row-major with the last
/// mode fastest. Per-mode cutoffs may differ.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiModeState {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

impl MultiModeState {
    pub fn zeros(dims: &[usize]) -> Self {
        assert!(!dims.is_empty() && dims.iter().all(|&d| d > 0));
        let total: usize = dims.iter().product();
        Self { dims: dims.to_vec(), amps: vec![Complex64::new(0.0, 0.0); total] }
    }

    /// All modes in vacuum.
    pub fn vacuum(dims: &[usize]) -> Self {
        let mut s = Self::zeros(dims);
        s.amps[0] = Complex64::new(1.0, 0.0);
        s
    }

    /// Tensor product of single-mode states.
    pub fn from_modes(modes: &[FockVector]) -> Self {
        assert!(!modes.is_empty());
        let dims: Vec<usize> = modes.iter().map(|m| m.len()).collect();
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for mode in modes {
            let mut next = Vec::with_capacity(amps.len() * mode.len());
            for a in &amps {
                for b in mode.amps() {
                    next.push(a * b);
                }
            }
            amps = next;
        }
        Self { dims, amps }
    }

    pub fn mode_count(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn cutoffs(&self) -> Vec<usize> {
        self.dims.iter().map(|d| d - 1).collect()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn stride(&self, mode: usize) -> usize {
        self.dims[mode + 1..].iter().product()
    }

    /// Flat offset of a multi-index.
    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.dims.len());
        let mut off = 0;
        for (i, (&ix, &d)) in index.iter().zip(self.dims.iter()).enumerate() {
            debug_assert!(ix < d, "index {ix} out of range for mode {i}");
            off = off * d + ix;
        }
        off
    }

    pub fn amp(&self, index: &[usize]) -> Complex64 {
        self.amps[self.offset(index)]
    }

    pub fn set_amp(&mut self, index: &[usize], value: Complex64) {
        let off = self.offset(index);
        self.amps[off] = value;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            for a in &mut self.amps {
                *a /= norm;
            }
        }
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    pub fn scale(&mut self, factor: Complex64) {
        for a in &mut self.amps {
            *a *= factor;
        }
    }

    /// Tensor product `self ⊗ other`, modes of `other` appended.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self { dims, amps }
    }

    /// `self += factor · other`, shapes must match.
    pub fn add_scaled(&mut self, factor: Complex64, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::ShapeMismatch(format!(
                "dims {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        for (a, b) in self.amps.iter_mut().zip(other.amps.iter()) {
            *a += factor * b;
        }
        Ok(())
    }

    /// Probability mass on the top retained number state of one mode.
    pub fn mode_tail_mass(&self, mode: usize) -> f64 {
        let top = self.dims[mode] - 1;
        let mut mass = 0.0;
        self.for_each_mode_index(mode, |n, amp| {
            if n == top {
                mass += amp.norm_sqr();
            }
        });
        mass
    }

    /// Visits every amplitude together with its occupation of `mode`.
    pub fn for_each_mode_index(&self, mode: usize, mut f: impl FnMut(usize, Complex64)) {
        let stride = self.stride(mode);
        let dim = self.dims[mode];
        for (flat, amp) in self.amps.iter().enumerate() {
            let n = (flat / stride) % dim;
            f(n, *amp);
        }
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dims != other.dims {
            return Err(Error::ShapeMismatch(format!(
                "dims {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |⟨self|other⟩|² for two normalized states.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        for s in [self, other] {
            if !s.is_normalized(1e-6) {
                return Err(Error::NotNormalized { norm_sqr: s.norm_sqr() });
            }
        }
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Contracts one mode against `⟨bra|`, dropping that mode. The result is
    /// not renormalized.
    pub fn project_mode(&self, mode: usize, bra: &FockVector) -> Result<Self> {
        if bra.len() != self.dims[mode] {
            return Err(Error::ShapeMismatch(format!(
                "bra dim {} vs mode dim {}",
                bra.len(),
                self.dims[mode]
            )));
        }
        let mut out_dims = self.dims.clone();
        out_dims.remove(mode);
        if out_dims.is_empty() {
            out_dims.push(1);
        }
        let mut out = Self::zeros(&out_dims);

        let stride = self.stride(mode);
        let dim = self.dims[mode];
        let outer = self.amps.len() / (stride * dim);
        for o in 0..outer {
            for s in 0..stride {
                let mut acc = Complex64::new(0.0, 0.0);
                for n in 0..dim {
                    let flat = (o * dim + n) * stride + s;
                    acc += bra.amp(n).conj() * self.amps[flat];
                }
                out.amps[o * stride + s] = acc;
            }
        }
        Ok(out)
    }

    /// Applies a single-mode operator to one mode in place.
    pub fn apply_single_mode(&mut self, mode: usize, op: &OperatorMatrix) -> Result<()> {
        let dim = self.dims[mode];
        if op.dim() != dim {
            return Err(Error::ShapeMismatch(format!(
                "operator dim {} vs mode dim {}",
                op.dim(),
                dim
            )));
        }
        let stride = self.stride(mode);
        let outer = self.amps.len() / (stride * dim);
        let mut scratch = vec![Complex64::new(0.0, 0.0); dim];
        for o in 0..outer {
            for s in 0..stride {
                for (n, slot) in scratch.iter_mut().enumerate() {
                    *slot = self.amps[(o * dim + n) * stride + s];
                }
                for m in 0..dim {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (n, value) in scratch.iter().enumerate() {
                        acc += op.entry(m, n) * value;
                    }
                    self.amps[(o * dim + m) * stride + s] = acc;
                }
            }
        }
        Ok(())
    }
}
