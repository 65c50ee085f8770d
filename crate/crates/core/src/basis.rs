//! The basis-change matrix between displaced number bases and the
//! α-representation of pure states.
//!
//! Two displaced bases `{|n, α⟩}` and `{|n, α′⟩}` are connected by a unitary
//! whose row `l` expands `|l, α′⟩` over `{|k, α⟩}`. Every entry reduces to a
//! single displacement matrix element through
//!
//! ```text
//! ⟨k, α | l, α′⟩ = e^{i·Im(α′ α*)} ⟨k| D(α′ − α) |l⟩
//! ```
//!
//! and `⟨m|D(β)|n⟩` carries the closed form
//!
//! ```text
//! e^{−|β|²/2} √(m! n!) Σ_k  β^{m−k} (−β*)^{n−k} / (k! (m−k)! (n−k)!)
//! ```
//!
//! with `k` running to `min(m, n)`. The `Fock → displaced` coefficients
//! `c_ln` are the `α′ = 0` specialization of these entries; the operator
//! oracle pins the convention, and the tests enforce the match.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{CutoffPolicy, FockVector};
use crate::math::{cis, ln_factorial};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Table of matrix elements `⟨m|D(β)|n⟩` for `m, n < dim`.
///
/// Column 0 is the coherent expansion `e^{−|β|²/2} β^m/√(m!)`; columns grow
/// by the ladder recurrence
///
/// ```text
/// √(n+1) ⟨m|D|n+1⟩ = √m ⟨m−1|D|n⟩ − β* ⟨m|D|n⟩
/// ```
///
/// which follows from `D a⁺ = (a⁺ − β*) D`. The direct alternating sum
/// cancels catastrophically at large `m ≈ n`; the recurrence does not.
pub fn displacement_table(beta: Complex64, dim: usize) -> ndarray::Array2<Complex64> {
    let mut d = ndarray::Array2::<Complex64>::zeros((dim, dim));
    if beta == Complex64::new(0.0, 0.0) {
        for i in 0..dim {
            d[[i, i]] = c(1.0);
        }
        return d;
    }
    let ln_b = beta.norm().ln();
    let arg_b = beta.arg();
    let half = -0.5 * beta.norm_sqr();
    for m in 0..dim {
        let ln_mag = half + m as f64 * ln_b - 0.5 * ln_factorial(m);
        d[[m, 0]] = cis(arg_b * m as f64) * ln_mag.exp();
    }
    let beta_conj = beta.conj();
    for n in 0..dim - 1 {
        let scale = 1.0 / ((n + 1) as f64).sqrt();
        d[[0, n + 1]] = -beta_conj * d[[0, n]] * scale;
        for m in 1..dim {
            d[[m, n + 1]] =
                (c((m as f64).sqrt()) * d[[m - 1, n]] - beta_conj * d[[m, n]]) * scale;
        }
    }
    d
}

/// Single matrix element `⟨m|D(β)|n⟩`, by running the recurrence up to the
/// requested indices.
pub fn displacement_matrix_element(m: usize, n: usize, beta: Complex64) -> Complex64 {
    if beta == Complex64::new(0.0, 0.0) {
        return if m == n { c(1.0) } else { c(0.0) };
    }
    let ln_b = beta.norm().ln();
    let arg_b = beta.arg();
    let half = -0.5 * beta.norm_sqr();
    // column 0 up to m, then walk columns keeping one column in memory
    let mut col: Vec<Complex64> = (0..=m)
        .map(|k| {
            let ln_mag = half + k as f64 * ln_b - 0.5 * ln_factorial(k);
            cis(arg_b * k as f64) * ln_mag.exp()
        })
        .collect();
    let beta_conj = beta.conj();
    for j in 0..n {
        let scale = 1.0 / ((j + 1) as f64).sqrt();
        let mut prev_row = Complex64::new(0.0, 0.0);
        for (k, slot) in col.iter_mut().enumerate() {
            let new = (c((k as f64).sqrt()) * prev_row - beta_conj * *slot) * scale;
            prev_row = *slot;
            *slot = new;
        }
    }
    col[m]
}

/// `⟨m|D(β)|n⟩` with the `e^{−|β|²/2}` prefactor divided out.
pub fn displacement_poly(m: usize, n: usize, beta: Complex64) -> Complex64 {
    displacement_matrix_element(m, n, beta) * c((0.5 * beta.norm_sqr()).exp())
}

/// Expansion coefficient `c_ln(α)` of a number state over the displaced
/// basis: `|l⟩ = e^{−|α|²/2} Σ_n c_ln |n, α⟩`, so that
/// `c_ln e^{−|α|²/2} = ⟨n, α|l⟩ = ⟨n|D(−α)|l⟩`.
pub fn coefficient_c(l: usize, n: usize, alpha: Complex64) -> Complex64 {
    displacement_poly(n, l, -alpha)
}

/// Unitary connecting the displaced basis of size `alpha_from` to the basis
/// of size `alpha_to`: row `l` holds `|l, α_from⟩` expanded over
/// `{|k, α_to⟩}`. The scalar prefactor `F` of the factored form is fused
/// into the entries and also kept separately.
#[derive(Debug, Clone)]
pub struct TransformMatrix {
    pub alpha_to: Complex64,
    pub alpha_from: Complex64,
    pub prefactor: Complex64,
    entries: ndarray::Array2<Complex64>,
}

impl TransformMatrix {
    pub fn cutoff(&self) -> usize {
        self.entries.nrows() - 1
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `⟨k, α_to | l, α_from⟩`, prefactor included.
    pub fn entry(&self, l: usize, k: usize) -> Complex64 {
        self.entries[[l, k]]
    }

    pub fn array(&self) -> &ndarray::Array2<Complex64> {
        &self.entries
    }

    /// Max-entry deviation of `U†U` from the identity on the leading
    /// `interior × interior` block.
    pub fn max_unitarity_deviation(&self, interior: usize) -> f64 {
        let dag = self.entries.t().mapv(|z| z.conj());
        let product = dag.dot(&self.entries);
        let mut worst = 0.0f64;
        for i in 0..interior.min(self.dim()) {
            for j in 0..interior.min(self.dim()) {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((product[[i, j]] - c(expect)).norm());
            }
        }
        worst
    }
}

/// Builds the basis-change matrix from `alpha_from` to `alpha_to` on a space
/// truncated at `cutoff`.
pub fn transform_matrix(
    alpha_to: Complex64,
    alpha_from: Complex64,
    cutoff: usize,
) -> Result<TransformMatrix> {
    let policy = CutoffPolicy::default();
    policy.check(cutoff, alpha_to.norm().max(alpha_from.norm()), 0)?;
    let dim = cutoff + 1;
    let beta = alpha_from - alpha_to;
    let phase = cis((alpha_from * alpha_to.conj()).im);
    let table = displacement_table(beta, dim);
    let mut entries = ndarray::Array2::<Complex64>::zeros((dim, dim));
    for l in 0..dim {
        for k in 0..dim {
            entries[[l, k]] = phase * table[[k, l]];
        }
    }
    let prefactor = c((-0.5 * (alpha_to.norm_sqr() + alpha_from.norm_sqr())).exp())
        * (alpha_from * alpha_to.conj()).exp();
    Ok(TransformMatrix { alpha_to, alpha_from, prefactor, entries })
}

/// Amplitude vector of a state over the displaced basis `{|n, α⟩}`.
#[derive(Debug, Clone)]
pub struct AlphaRepresentation {
    pub alpha: Complex64,
    amps: Vec<Complex64>,
}

impl AlphaRepresentation {
    pub fn cutoff(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn amp(&self, n: usize) -> Complex64 {
        self.amps[n]
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Reinterprets the amplitudes as a plain vector (useful for feeding the
    /// inverse transform).
    pub fn to_fock_vector(&self) -> FockVector {
        FockVector::new(self.amps.clone())
    }
}

/// Re-expands a state given in the displaced basis `alpha_from` over the
/// displaced basis `alpha_to`. Refuses transforms that would silently lose
/// more than the tail tolerance.
pub fn change_basis(
    state: &FockVector,
    alpha_from: Complex64,
    alpha_to: Complex64,
) -> Result<AlphaRepresentation> {
    if !state.is_normalized(1e-6) {
        return Err(Error::NotNormalized { norm_sqr: state.norm_sqr() });
    }
    if alpha_from == alpha_to {
        return Ok(AlphaRepresentation { alpha: alpha_to, amps: state.amps().to_vec() });
    }
    let transform = transform_matrix(alpha_to, alpha_from, state.cutoff())?;
    let dim = state.len();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    for (k, slot) in amps.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for l in 0..dim {
            acc += transform.entry(l, k) * state.amp(l);
        }
        *slot = acc;
    }
    let rep = AlphaRepresentation { alpha: alpha_to, amps };
    let lost = 1.0 - rep.norm_sqr();
    if lost > CutoffPolicy::default().tail_tol {
        let required = CutoffPolicy::default()
            .required_cutoff((alpha_from - alpha_to).norm(), state.cutoff());
        return Err(Error::InsufficientCutoff { required, got: state.cutoff() });
    }
    Ok(rep)
}

/// α-representation of a state given in the number (Fock) basis.
pub fn to_alpha_representation(state: &FockVector, alpha: Complex64) -> Result<AlphaRepresentation> {
    change_basis(state, Complex64::new(0.0, 0.0), alpha)
}

/// Probabilities `P_n = |⟨n, α|ψ⟩|²` for `n ≤ n_max`, for a state given in
/// the Fock basis. Direct evaluation, no cutoff bookkeeping.
pub fn displaced_distribution(state: &FockVector, alpha: Complex64, n_max: usize) -> Vec<f64> {
    let dim = state.len().max(n_max + 1);
    let table = displacement_table(-alpha, dim);
    (0..=n_max)
        .map(|n| {
            let mut overlap = Complex64::new(0.0, 0.0);
            for l in 0..state.len() {
                overlap += state.amp(l) * table[[n, l]];
            }
            overlap.norm_sqr()
        })
        .collect()
}

/// Number of local maxima of a sampled distribution; endpoints count when
/// they strictly dominate their single neighbor.
pub fn count_local_maxima(values: &[f64]) -> usize {
    let n = values.len();
    (0..n)
        .filter(|&i| {
            let left_ok = i == 0 || values[i] > values[i - 1];
            let right_ok = i + 1 == n || values[i] > values[i + 1];
            left_ok && right_ok
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{displacement_operator, displacement_operator_unchecked};
    use crate::tolerances;

    #[test]
    fn coefficient_reduces_to_kronecker_at_zero() {
        for l in 0..6 {
            for n in 0..6 {
                let expect = if l == n { 1.0 } else { 0.0 };
                assert!((coefficient_c(l, n, c(0.0)) - c(expect)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn coefficient_row_zero_is_coherent_expansion() {
        // c_0n = (−α)ⁿ/√(n!) against the oracle column ⟨n, α|0⟩
        let alpha = c(0.7);
        let d = displacement_operator(-alpha, 60).unwrap();
        let pref = (-0.5 * alpha.norm_sqr()).exp();
        for n in 0..=15 {
            let oracle = d.entry(n, 0);
            let closed = coefficient_c(0, n, alpha) * pref;
            assert!((closed - oracle).norm() < 1e-12, "l=0 disagrees at n={n}");
        }
    }

    #[test]
    fn coefficients_match_oracle_for_many_indices() {
        for alpha in [c(0.3), c(0.7), c(1.5), Complex64::new(0.4, 0.8)] {
            let d = displacement_operator_unchecked(-alpha, 60);
            let pref = (-0.5 * alpha.norm_sqr()).exp();
            for l in 0..=15 {
                for n in 0..=15 {
                    let oracle = d.entry(n, l);
                    let closed = coefficient_c(l, n, alpha) * pref;
                    assert!(
                        (closed - oracle).norm() < tolerances::ORACLE_TOL,
                        "c_ln oracle mismatch at l={l}, n={n}, α={alpha}"
                    );
                }
            }
        }
    }

    #[test]
    fn magic_amplitude_balances_single_photon_rows() {
        let alpha = c((5.0f64.sqrt() - 1.0) / 2.0);
        let into_zero = coefficient_c(1, 0, alpha).norm();
        let into_one = coefficient_c(1, 1, alpha).norm();
        assert!((into_zero - into_one).abs() < 1e-12);
        // negative control, well away from the root
        let off = c(0.5);
        assert!((coefficient_c(1, 0, off).norm() - coefficient_c(1, 1, off).norm()).abs() >= 1e-2);
    }

    #[test]
    fn transform_identity_when_bases_coincide() {
        let alpha = Complex64::new(0.4, -0.2);
        let t = transform_matrix(alpha, alpha, 20).unwrap();
        for l in 0..=20 {
            for k in 0..=20 {
                let expect = if l == k { 1.0 } else { 0.0 };
                assert!((t.entry(l, k) - c(expect)).norm() < 1e-12);
            }
        }
        assert!((t.prefactor - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn transform_rows_reproduce_displaced_states() {
        // alpha_to = 0: row l is the Fock expansion of |l, α⟩, i.e. column l
        // of D(α)
        let alpha = c(0.8);
        let t = transform_matrix(c(0.0), alpha, 40).unwrap();
        let d = displacement_operator(alpha, 40).unwrap();
        for l in 0..=12 {
            for k in 0..=30 {
                assert!(
                    (t.entry(l, k) - d.entry(k, l)).norm() < 1e-10,
                    "row {l} deviates at {k}"
                );
            }
        }
    }

    #[test]
    fn transform_unitary_and_inverse_consistent() {
        let a = c(0.5);
        let b = c(-0.5);
        let t_ab = transform_matrix(a, b, 80).unwrap();
        // columns are unitary where the policy says the cutoff can hold the
        // displaced states
        let interior = CutoffPolicy::default().max_interior(80, 1.0);
        assert!(interior >= 45, "policy interior {interior}");
        let dev = t_ab.max_unitarity_deviation(interior);
        assert!(dev < 1e-9, "unitarity dev {dev:.3e} on interior {interior}");

        let t_ba = transform_matrix(b, a, 80).unwrap();
        let product = t_ab.array().dot(t_ba.array());
        for i in 0..interior {
            for j in 0..interior {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (product[[i, j]] - c(expect)).norm() < 1e-9,
                    "inverse composition fails at ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn transform_factored_prefactor() {
        // entries = F · (polynomial part): dividing out F must leave the
        // bare c-style coefficients at α_to = 0... verified through c_ln.
        let alpha = c(0.9);
        let t = transform_matrix(alpha, c(0.0), 40).unwrap();
        for l in 0..=10 {
            for n in 0..=10 {
                let bare = t.entry(l, n) / t.prefactor;
                // F at α_from = 0 equals e^{−|α|²/2}; entries/F = c_ln
                assert!(
                    (bare - coefficient_c(l, n, alpha)).norm() < 1e-10,
                    "prefactor factoring fails at ({l},{n})"
                );
            }
        }
    }

    #[test]
    fn zero_representation_is_identity() {
        let state = FockVector::coherent(c(0.4), 20);
        let rep = to_alpha_representation(&state, c(0.0)).unwrap();
        for n in 0..=20 {
            assert!((rep.amp(n) - state.amp(n)).norm() < 1e-14);
        }
    }

    #[test]
    fn vacuum_alpha_representation_is_poissonian() {
        let alpha = c(0.9);
        let cutoff = CutoffPolicy::default().required_cutoff(alpha.norm(), 0) + 10;
        let vacuum = FockVector::basis_state(0, cutoff);
        let rep = to_alpha_representation(&vacuum, alpha).unwrap();
        for n in 0..=10 {
            let expect = (-alpha.norm_sqr()).exp() * alpha.norm_sqr().powi(n as i32)
                / (crate::math::ln_factorial(n)).exp();
            assert!(
                (rep.amp(n).norm_sqr() - expect).abs() < 1e-10,
                "Poisson weight deviates at {n}"
            );
        }
    }

    #[test]
    fn round_trip_recovers_state() {
        let mut state = FockVector::zeros(60);
        state.amps_mut()[0] = c(0.6);
        state.amps_mut()[1] = Complex64::new(0.0, 0.5);
        state.amps_mut()[3] = c(-0.624499799839839);
        let state = state.normalized();
        let alpha = Complex64::new(0.7, 0.3);
        let rep = to_alpha_representation(&state, alpha).unwrap();
        let back = change_basis(&rep.to_fock_vector(), alpha, c(0.0)).unwrap();
        for n in 0..=60 {
            assert!((back.amp(n) - state.amp(n)).norm() < 1e-9, "round trip fails at {n}");
        }
    }

    #[test]
    fn lossy_transform_refused() {
        // A cutoff-9 state pushed to a large displacement cannot hold its
        // α-representation.
        let state = FockVector::basis_state(0, 9);
        assert!(matches!(
            to_alpha_representation(&state, c(2.5)),
            Err(Error::InsufficientCutoff { .. })
        ));
    }

    #[test]
    fn distribution_of_fock_state_at_zero_alpha() {
        let state = FockVector::basis_state(3, 10);
        let p = displaced_distribution(&state, c(0.0), 8);
        for (n, &prob) in p.iter().enumerate() {
            let expect = if n == 3 { 1.0 } else { 0.0 };
            assert!((prob - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn single_photon_distribution_normalizes_and_peaks() {
        let state = FockVector::basis_state(1, 2);
        let p = displaced_distribution(&state, c(1.0), 80);
        let total: f64 = p.iter().sum();
        assert!((total - 1.0).abs() < 1e-10, "sum = {total}");

        let p3 = displaced_distribution(&state, c(3.0), 40);
        assert_eq!(count_local_maxima(&p3), 2);
    }

    #[test]
    fn peak_counts_follow_photon_number() {
        for l in 1..=3usize {
            let state = FockVector::basis_state(l, l + 1);
            let p = displaced_distribution(&state, c(3.0), 45);
            assert_eq!(count_local_maxima(&p), l + 1, "peak count wrong for l={l}");
        }
    }
}
