//! Ladder, displacement, and squeezing operators on truncated Fock spaces.
//!
//! `displacement_operator` is the workhorse oracle: every closed-form matrix
//! element elsewhere in the crate is tested against it. It uses the factored
//! form
//!
//! ```text
//! D(α) = e^{−|α|²/2} · exp(α a⁺) · exp(−α* a)
//! ```
//!
//! whose triangular factors terminate exactly on a truncated space (a⁺ and a
//! are nilpotent there), built on a padded space and cropped. The direct
//! anti-Hermitian exponential `exp(α a⁺ − α* a)` is kept as a cross-check.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{CutoffPolicy, FockVector, MultiModeState, OperatorMatrix};
use crate::math::powi;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Annihilation and creation matrices `(a, a⁺)` with
/// `a|n⟩ = √n |n−1⟩` and `a⁺|n⟩ = √(n+1) |n+1⟩`.
pub fn ladder_matrices(cutoff: usize) -> (OperatorMatrix, OperatorMatrix) {
    let dim = cutoff + 1;
    let mut lower = Array2::<Complex64>::zeros((dim, dim));
    for n in 1..dim {
        lower[[n - 1, n]] = c((n as f64).sqrt());
    }
    let a = OperatorMatrix::from_array(lower);
    let a_dag = a.dagger();
    (a, a_dag)
}

/// Padding used when a displacement is built on an enlarged space before
/// cropping.
pub fn displacement_pad(alpha_abs: f64) -> usize {
    CutoffPolicy::default().base_pad + (4.0 * alpha_abs).ceil() as usize
}

/// Truncated series of `exp(z · shift)` where `shift` is a pure raising
/// (`raise = true`) or lowering ladder matrix. The series terminates because
/// the shift is nilpotent on the truncated space; entries come out as
/// `z^{m−n} √(m!/n!) / (m−n)!` on the corresponding triangle.
fn ladder_exponential(z: Complex64, dim: usize, raise: bool) -> Array2<Complex64> {
    let mut out = Array2::<Complex64>::zeros((dim, dim));
    for n in 0..dim {
        // climb the triangle from the diagonal, multiplying one series term
        // at a time: factor for step k is z·√(n+k)/k going up
        let mut term = Complex64::new(1.0, 0.0);
        for k in 0..dim - n {
            if k > 0 {
                term = term * z * c(((n + k) as f64).sqrt() / k as f64);
            }
            let (row, col) = if raise { (n + k, n) } else { (n, n + k) };
            out[[row, col]] = term;
        }
    }
    out
}

/// Displacement operator `D(α) = exp(α a⁺ − α* a)` as a truncated matrix,
/// via the factored triangular form on a padded space, cropped to
/// `cutoff + 1`. Unitary on the interior block.
pub fn displacement_operator(alpha: Complex64, cutoff: usize) -> Result<OperatorMatrix> {
    CutoffPolicy::default().check(cutoff, alpha.norm(), 0)?;
    Ok(displacement_operator_unchecked(alpha, cutoff))
}

/// Same construction without the cutoff-policy gate; internal callers that
/// manage their own headroom use this.
pub fn displacement_operator_unchecked(alpha: Complex64, cutoff: usize) -> OperatorMatrix {
    if alpha == Complex64::new(0.0, 0.0) {
        return OperatorMatrix::identity(cutoff + 1);
    }
    let dim = cutoff + 1 + displacement_pad(alpha.norm());
    let raise = ladder_exponential(alpha, dim, true);
    let lower = ladder_exponential(-alpha.conj(), dim, false);
    let mut product = raise.dot(&lower);
    let pref = c((-0.5 * alpha.norm_sqr()).exp());
    product.mapv_inplace(|z| z * pref);
    OperatorMatrix::from_array(product).crop(cutoff + 1)
}

/// Cross-check construction: scaling-and-squaring series exponential of the
/// anti-Hermitian generator `α a⁺ − α* a` on a padded space, cropped. The
/// series needs roughly twice the factored form's padding for edge-row
/// accuracy.
pub fn displacement_operator_direct_exp(alpha: Complex64, cutoff: usize) -> OperatorMatrix {
    let dim = cutoff + 1 + 2 * displacement_pad(alpha.norm());
    let (a, a_dag) = ladder_matrices(dim - 1);
    let gen = a_dag.array() * alpha - a.array() * alpha.conj();
    OperatorMatrix::from_array(matrix_exp(&gen)).crop(cutoff + 1)
}

/// `|n, α⟩ = D(α)|n⟩`: column `n` of the displacement operator.
pub fn displaced_number_state(n: usize, alpha: Complex64, cutoff: usize) -> Result<FockVector> {
    CutoffPolicy::default().check(cutoff, alpha.norm(), n)?;
    Ok(displacement_operator_unchecked(alpha, cutoff).column(n))
}

/// Single-mode squeezing operator `S(r) = exp(r (a⁺² − a²)/2)`, series
/// exponential on a padded space, cropped. Unitary on the interior block.
///
/// Squeezing stretches number-state support by roughly `e^{2r}`, so the
/// working space scales with the squeeze strength before cropping.
pub fn single_mode_squeeze(r: f64, cutoff: usize) -> Result<OperatorMatrix> {
    if !r.is_finite() {
        return Err(Error::InvalidParameter("squeeze parameter must be finite".into()));
    }
    let pad = 2 * CutoffPolicy::default().base_pad;
    let dim = ((cutoff + 1) as f64 * (2.0 * r.abs()).exp()).ceil() as usize + pad;
    let (a, a_dag) = ladder_matrices(dim - 1);
    let a2 = a.array().dot(a.array());
    let adag2 = a_dag.array().dot(a_dag.array());
    let gen = (adag2 - a2) * c(0.5 * r);
    Ok(OperatorMatrix::from_array(matrix_exp(&gen)).crop(cutoff + 1))
}

/// Squeezed vacuum `S(r)|0⟩` from the standard hyperbolic expansion
/// `√(sech r) Σ (tanh r)ⁿ √((2n)!) / (2ⁿ n!) |2n⟩`; the independent check
/// on the operator route.
pub fn squeezed_vacuum(r: f64, cutoff: usize) -> FockVector {
    let t = r.tanh();
    let mut v = FockVector::zeros(cutoff);
    let ln_sech_half = -0.5 * r.cosh().ln();
    for m in 0..=cutoff / 2 {
        let ln_mag = ln_sech_half
            + 0.5 * crate::math::ln_factorial(2 * m)
            - (m as f64) * std::f64::consts::LN_2
            - crate::math::ln_factorial(m);
        v.amps_mut()[2 * m] = powi(c(t), m) * ln_mag.exp();
    }
    v
}

/// Squeezed single photon `S(r)|1⟩` from the matching closed expansion.
pub fn squeezed_single_photon(r: f64, cutoff: usize) -> FockVector {
    let t = r.tanh();
    let mut v = FockVector::zeros(cutoff);
    let ln_sech32 = -1.5 * r.cosh().ln();
    for m in 0..=(cutoff.saturating_sub(1)) / 2 {
        let ln_mag = ln_sech32
            + 0.5 * crate::math::ln_factorial(2 * m + 1)
            - (m as f64) * std::f64::consts::LN_2
            - crate::math::ln_factorial(m);
        v.amps_mut()[2 * m + 1] = powi(c(t), m) * ln_mag.exp();
    }
    v
}

/// Two-mode squeezed vacuum `(1/cosh r) Σ (tanh r)ⁿ |n⟩|n⟩`, built from the
/// Schmidt form. Errors when the cutoffs cannot reach the configured tail
/// tolerance; the message carries the minimal sufficient cutoff.
pub fn tmsv_state(r: f64, cutoffs: (usize, usize)) -> Result<MultiModeState> {
    if r < 0.0 {
        return Err(Error::InvalidParameter("squeezing must be nonnegative".into()));
    }
    let policy = CutoffPolicy::default();
    let shared = cutoffs.0.min(cutoffs.1);
    if r > 0.0 {
        // norm deficit of the truncated Schmidt series is exactly tanh(r)^{2(N+1)}
        let required = (policy.tail_tol.ln() / (2.0 * r.tanh().ln())).ceil() as usize;
        let required = required.max(1) - 1;
        if shared < required {
            return Err(Error::InsufficientCutoff { required, got: shared });
        }
    }
    let mut state = MultiModeState::zeros(&[cutoffs.0 + 1, cutoffs.1 + 1]);
    let inv_cosh = 1.0 / r.cosh();
    let t = r.tanh();
    for n in 0..=shared {
        state.set_amp(&[n, n], powi(c(t), n) * inv_cosh);
    }
    Ok(state)
}

/// Matrix exponential by scaling and squaring with a run-to-convergence
/// Taylor series on the scaled matrix.
pub fn matrix_exp(m: &Array2<Complex64>) -> Array2<Complex64> {
    let dim = m.nrows();
    assert_eq!(dim, m.ncols());
    let norm = one_norm(m);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = c(1.0 / (2.0f64.powi(squarings as i32)));
    let scaled = m * scale;

    let mut result = Array2::<Complex64>::from_diag_elem(dim, c(1.0));
    let mut term = Array2::<Complex64>::from_diag_elem(dim, c(1.0));
    for k in 1..200 {
        term = term.dot(&scaled) / c(k as f64);
        result += &term;
        if one_norm(&term) < 1e-18 * one_norm(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

fn one_norm(m: &Array2<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for col in m.columns() {
        let s: f64 = col.iter().map(|z| z.norm()).sum();
        worst = worst.max(s);
    }
    worst
}
