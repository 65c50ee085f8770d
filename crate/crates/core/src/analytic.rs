//! Closed-form α-representations and the special amplitudes used by the
//! gate pipelines.
//!
//! Covers the balanced vacuum/single-photon superpositions
//! `|Δ±⟩ = (|0⟩ ± |1⟩)/√2`, the non-Schmidt decomposition of the two-mode
//! squeezed vacuum over a displaced basis, and the amplitudes at which the
//! heralded gates balance.

use num_complex::Complex64;

use crate::basis::coefficient_c;
use crate::error::{Error, Result};
use crate::fock::{CutoffPolicy, FockVector};
use crate::math::{falling, ln_factorial, powi};
use crate::operators::{squeezed_single_photon, squeezed_vacuum};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Sign of the vacuum/single-photon superposition `(|0⟩ ± |1⟩)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaSign {
    Plus,
    Minus,
}

impl DeltaSign {
    fn factor(self) -> f64 {
        match self {
            DeltaSign::Plus => 1.0,
            DeltaSign::Minus => -1.0,
        }
    }
}

/// α-representation of `(|0⟩ ± |1⟩)/√2` with its displaced photon-number
/// distribution.
#[derive(Debug, Clone)]
pub struct DeltaSuperposition {
    pub sign: DeltaSign,
    pub alpha: Complex64,
    amps: Vec<Complex64>,
}

impl DeltaSuperposition {
    pub fn amp(&self, n: usize) -> Complex64 {
        self.amps[n]
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn cutoff(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Single closed-form amplitude of the `(|0⟩ ± |1⟩)/√2` superposition over
/// the displaced basis `{|n, α⟩}`:
///
/// ```text
/// b₀± = e^{−|α|²/2} (1 ± α*) / √2
/// bₙ± = e^{−|α|²/2} (−1)ⁿ α^{n−1} (α ∓ (n − |α|²)) / √(2 n!)    n ≥ 1
/// ```
pub fn delta_amplitude(sign: DeltaSign, alpha: Complex64, n: usize) -> Complex64 {
    let pref = (-0.5 * alpha.norm_sqr()).exp() / 2.0f64.sqrt();
    if n == 0 {
        return (c(1.0) + c(sign.factor()) * alpha.conj()) * pref;
    }
    let parity = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let poly = alpha - c(sign.factor()) * (c(n as f64) - c(alpha.norm_sqr()));
    powi(alpha, n - 1) * poly * c(parity * pref * (-0.5 * ln_factorial(n)).exp())
}

/// α-representation of `(|0⟩ ± |1⟩)/√2`, all amplitudes up to `cutoff`.
pub fn delta_superposition(
    sign: DeltaSign,
    alpha: Complex64,
    cutoff: usize,
) -> Result<DeltaSuperposition> {
    CutoffPolicy::default().check(cutoff, alpha.norm(), 1)?;
    let amps = (0..=cutoff).map(|n| delta_amplitude(sign, alpha, n)).collect();
    Ok(DeltaSuperposition { sign, alpha, amps })
}

/// Displacement-asymmetry parameter of the TMSV α-representation,
/// `δ = α*(1 − tanh²r)/tanh r`.
pub fn delta_parameter(alpha: Complex64, r: f64) -> Complex64 {
    alpha.conj() * c((1.0 - r.tanh() * r.tanh()) / r.tanh())
}

/// Decomposition coefficient `a_nk` of the displaced-basis reduction of the
/// TMSV: `falling(n,k) α^{n−k} (tanh r)^k (tanh²r − 1)^{n−k} / (√k! √n!)`.
pub fn tmsv_a_coefficient(n: usize, k: usize, alpha: Complex64, r: f64) -> Complex64 {
    if k > n {
        return c(0.0);
    }
    let t = r.tanh();
    let fall = falling(n, k);
    let scale = (-0.5 * (ln_factorial(k) + ln_factorial(n))).exp();
    powi(alpha, n - k) * powi(c(t * t - 1.0), n - k) * c(t.powi(k as i32) * fall * scale)
}

/// Ratio coefficient `b_nk = a_nk / a_n0 = falling(n,k) γ^k / √k!` with
/// `γ = tanh r / (α (tanh²r − 1))`.
pub fn tmsv_b_coefficient(n: usize, k: usize, alpha: Complex64, r: f64) -> Complex64 {
    let gamma = tmsv_gamma(alpha, r);
    powi(gamma, k) * c(falling(n, k) * (-0.5 * ln_factorial(k)).exp())
}

/// `γ = tanh r / (α (tanh²r − 1))`
pub fn tmsv_gamma(alpha: Complex64, r: f64) -> Complex64 {
    let t = r.tanh();
    c(t) / (alpha * c(t * t - 1.0))
}

/// The TMSV expanded over `{|Ψ_n⟩ ⊗ |n, α⟩}`: per-index normalized partner
/// states `Ψ_n ∝ (a⁺ − δ*)ⁿ|0⟩`, their normalization factors, and the
/// heralding amplitudes/probabilities.
#[derive(Debug, Clone)]
pub struct TmsvAlphaRep {
    pub r: f64,
    pub alpha: Complex64,
    pub delta: Complex64,
    /// N_n ≥ 1
    pub normalization: Vec<f64>,
    /// Ψ_n, normalized, one per retained index.
    pub partner_states: Vec<FockVector>,
    /// b_n of the expansion; |b_n|² = P_n.
    pub amplitudes: Vec<f64>,
    /// Heralding probabilities P_n.
    pub probabilities: Vec<f64>,
}

/// Heralding probability `P_n(δ, r) = (tanh r)^{2n} N_n² e^{−sinh²r·|δ|²} / cosh²r`.
pub fn tmsv_probability(n: usize, delta_abs: f64, r: f64) -> f64 {
    let nn = tmsv_normalization(n, delta_abs);
    let t = r.tanh();
    (2.0 * (n as f64) * t.ln() - r.sinh().powi(2) * delta_abs * delta_abs).exp() * nn * nn
        / r.cosh().powi(2)
}

/// Normalization factor `N_n = ‖(a⁺ − δ*)ⁿ|0⟩‖ / √n!`, in closed form
/// `√(Σ_l falling(n,l) |δ|^{2l} / (l!)²)` — the squared `l!` is what the
/// term-by-term norm of the expansion requires. Terms in log magnitude so
/// large `n` cannot overflow.
pub fn tmsv_normalization(n: usize, delta_abs: f64) -> f64 {
    if delta_abs == 0.0 {
        return 1.0;
    }
    let ln_d2 = 2.0 * delta_abs.ln();
    let mut sum = 0.0;
    for l in 0..=n {
        let ln_term = ln_factorial(n) - ln_factorial(n - l) + l as f64 * ln_d2
            - 2.0 * ln_factorial(l);
        sum += ln_term.exp();
    }
    sum.sqrt()
}

/// Builds `Ψ_n ∝ (a⁺ − δ*)ⁿ|0⟩`, normalized numerically.
pub fn tmsv_partner_state(n: usize, delta: Complex64, cutoff: usize) -> FockVector {
    assert!(n <= cutoff, "partner state index past cutoff");
    let mut v = FockVector::basis_state(0, cutoff);
    for _ in 0..n {
        let mut next = FockVector::zeros(cutoff);
        for m in 0..cutoff {
            // a⁺ contribution into slot m+1, then the −δ* shift
            let up = v.amp(m) * c(((m + 1) as f64).sqrt());
            next.amps_mut()[m + 1] += up;
        }
        for m in 0..=cutoff {
            next.amps_mut()[m] -= delta.conj() * v.amp(m);
        }
        v = next;
    }
    v.normalized()
}

/// α-representation of the two-mode squeezed vacuum, with all intermediate
/// quantities exposed.
pub fn tmsv_alpha_rep(
    r: f64,
    alpha: Complex64,
    n_max: usize,
    cutoff: usize,
) -> Result<TmsvAlphaRep> {
    if r <= 0.0 {
        return Err(Error::InvalidParameter(
            "tmsv_alpha_rep needs r > 0; the asymmetry parameter divides by tanh r".into(),
        ));
    }
    let policy = CutoffPolicy::default();
    if n_max + policy.base_pad > cutoff {
        return Err(Error::InsufficientCutoff {
            required: n_max + policy.base_pad,
            got: cutoff,
        });
    }
    let delta = delta_parameter(alpha, r);
    let pref = (-0.5 * r.sinh().powi(2) * delta.norm_sqr()).exp() / r.cosh();
    let t = r.tanh();

    let mut normalization = Vec::with_capacity(n_max + 1);
    let mut partner_states = Vec::with_capacity(n_max + 1);
    let mut amplitudes = Vec::with_capacity(n_max + 1);
    let mut probabilities = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let nn = tmsv_normalization(n, delta.norm());
        let b_n = pref * t.powi(n as i32) * nn;
        normalization.push(nn);
        partner_states.push(tmsv_partner_state(n, delta, cutoff));
        amplitudes.push(b_n);
        probabilities.push(b_n * b_n);
    }
    Ok(TmsvAlphaRep { r, alpha, delta, normalization, partner_states, amplitudes, probabilities })
}

/// Numerical check report for the intermediate TMSV identities.
#[derive(Debug, Clone)]
pub struct TmsvIdentityReport {
    /// max over k of |Σ_k b_nk|k⟩ − (1 + γa⁺)ⁿ|0⟩| amplitudes
    pub operator_form_dev: f64,
    /// |a_n0 γⁿ − (tanh r)ⁿ/√n!|
    pub leading_coefficient_dev: f64,
    /// max over l ≤ l_max of |c_ln(α)(tanh r)^l − Σ_k a_nk c*_lk(β)|
    pub decomposition_dev: f64,
}

/// Verifies, numerically, the identities behind the TMSV reduction at one
/// `(r, α, n)`:
///
/// 1. `Σ_k b_nk |k⟩ = (1 + γ a⁺)ⁿ |0⟩`
/// 2. `a_n0 γⁿ = (tanh r)ⁿ / √n!`
/// 3. `c_ln(α) (tanh r)^l = Σ_k a_nk c*_lk(β)` with `β = α* tanh r`
pub fn tmsv_intermediate_identities(
    r: f64,
    alpha: Complex64,
    n: usize,
    l_max: usize,
) -> TmsvIdentityReport {
    let gamma = tmsv_gamma(alpha, r);
    let t = r.tanh();

    // identity 1: binomial expansion of (1 + γa⁺)ⁿ|0⟩ against b_nk
    let mut operator_form_dev = 0.0f64;
    for k in 0..=n {
        let binom = crate::math::binomial(n, k);
        let expansion = powi(gamma, k) * c(binom * (0.5 * ln_factorial(k)).exp());
        let b_nk = tmsv_b_coefficient(n, k, alpha, r);
        operator_form_dev = operator_form_dev.max((expansion - b_nk).norm());
    }

    // identity 2
    let lhs = tmsv_a_coefficient(n, 0, alpha, r) * powi(gamma, n);
    let rhs = c(t.powi(n as i32) * (-0.5 * ln_factorial(n)).exp());
    let leading_coefficient_dev = (lhs - rhs).norm();

    // identity 3, both sides from independent closed forms
    let beta = alpha.conj() * c(t);
    let mut decomposition_dev = 0.0f64;
    for l in 0..=l_max {
        let lhs = coefficient_c(l, n, alpha) * c(t.powi(l as i32));
        let mut rhs = c(0.0);
        for k in 0..=n {
            rhs += tmsv_a_coefficient(n, k, alpha, r) * coefficient_c(l, k, beta).conj();
        }
        decomposition_dev = decomposition_dev.max((lhs - rhs).norm());
    }

    TmsvIdentityReport { operator_form_dev, leading_coefficient_dev, decomposition_dev }
}

/// The displacement amplitude at which the two lowest rows of the displaced
/// single photon balance in magnitude: the positive root of `α² + α − 1`.
pub fn magic_alpha() -> f64 {
    (5.0f64.sqrt() - 1.0) / 2.0
}

/// Displacement amplitude realizing `δ = 1` at squeezing `s`:
/// `α = sinh s · cosh s`.
pub fn hadamard_alpha(s: f64) -> Result<f64> {
    if s <= 0.0 {
        return Err(Error::InvalidParameter("hadamard_alpha needs s > 0".into()));
    }
    Ok(s.sinh() * s.cosh())
}

/// Parity selector for the squeezed-state approximation of cat states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatParity {
    Even,
    Odd,
}

/// Fidelity between a squeezed number state and the matching normalized cat:
/// `S(r)|0⟩` vs `N₊(|0,α⟩ + |0,−α⟩)` for even parity, `S(r)|1⟩` vs
/// `N₋(|0,α⟩ − |0,−α⟩)` for odd.
pub fn scs_approx_fidelity(r: f64, alpha: f64, parity: CatParity) -> f64 {
    if alpha == 0.0 && parity == CatParity::Odd {
        // odd cat degenerates to the zero vector at α = 0
        return 0.0;
    }
    let a = c(alpha);
    // squeezed tails decay as (tanh r)^n; size the space for both states
    let squeeze_reach = if r > 0.05 {
        ((-30.0 / r.tanh().ln()).ceil() as usize).min(600)
    } else {
        8
    };
    let cutoff = CutoffPolicy::default().required_cutoff(alpha, 2) + squeeze_reach;
    let (squeezed, cat) = match parity {
        CatParity::Even => (
            squeezed_vacuum(r, cutoff).normalized(),
            FockVector::coherent_superposition(&[(c(1.0), a), (c(1.0), -a)], cutoff),
        ),
        CatParity::Odd => (
            squeezed_single_photon(r, cutoff).normalized(),
            FockVector::coherent_superposition(&[(c(1.0), a), (c(-1.0), -a)], cutoff),
        ),
    };
    squeezed.fidelity(&cat).expect("both states normalized by construction")
}

/// Maximizes [`scs_approx_fidelity`] over the squeeze parameter by golden
/// section on `r ∈ (0, 2]` after a coarse bracketing scan. Returns
/// `(r_best, fidelity)`.
pub fn scs_optimal_fidelity(alpha: f64, parity: CatParity) -> (f64, f64) {
    let eval = |r: f64| scs_approx_fidelity(r, alpha, parity);
    let mut best_r = 1e-3;
    let mut best_f = eval(best_r);
    let coarse = 80;
    for i in 1..=coarse {
        let r = 2.0 * i as f64 / coarse as f64;
        let f = eval(r);
        if f > best_f {
            best_f = f;
            best_r = r;
        }
    }
    let mut lo = (best_r - 0.05).max(1e-4);
    let mut hi = (best_r + 0.05).min(2.0);
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if eval(m1) < eval(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let r = 0.5 * (lo + hi);
    (r, eval(r))
}
