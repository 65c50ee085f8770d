//! Multimode linear-optical circuit engine: beam splitters, phase shifters,
//! exact and beam-splitter-approximated displacement, and heralded
//! photon-number / click detection.
//!
//! Beam splitters act per total-photon-number sector of the two coupled
//! modes; a coherent pair of amplitudes `(z_i, z_j)` transforms classically
//! as `z → B z` with
//!
//! ```text
//! B = | t        −r e^{−iφ} |
//!     | r e^{iφ}  t         |
//! ```
//!
//! Circuits serialize to a JSON document (see the repository README for the
//! schema): an ordered list of `{"type": ..., ...}` elements.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{CutoffPolicy, FockVector, MultiModeState};
use crate::math::{cis, ln_factorial};
use crate::operators::displacement_operator_unchecked;
use crate::tolerances;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Two-mode beam splitter with real transmittance/reflectivity amplitudes
/// and a reflection phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitter {
    pub t: f64,
    pub r: f64,
    pub phi: f64,
    pub modes: (usize, usize),
}

impl BeamSplitter {
    pub fn new(t: f64, r: f64, phi: f64, modes: (usize, usize)) -> Result<Self> {
        if (t * t + r * r - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "beam splitter amplitudes must satisfy t² + r² = 1, got {}",
                t * t + r * r
            )));
        }
        if modes.0 == modes.1 {
            return Err(Error::InvalidParameter("beam splitter needs two distinct modes".into()));
        }
        Ok(Self { t, r, phi, modes })
    }

    /// Balanced splitter, zero phase.
    pub fn balanced(modes: (usize, usize)) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { t: h, r: h, phi: 0.0, modes }
    }

    /// The 2×2 mode matrix.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [
            [c(self.t), -c(self.r) * cis(-self.phi)],
            [c(self.r) * cis(self.phi), c(self.t)],
        ]
    }
}

/// Single-mode phase shifter `e^{iθ a⁺a}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseShifter {
    pub theta: f64,
    pub mode: usize,
}

/// Post-measurement state together with the heralding probability.
///
/// Photon-number projections and APD no-click outcomes remove the measured
/// mode; an APD click leaves the mode in place, because the surviving
/// non-vacuum superposition stays entangled with the rest.
#[derive(Debug, Clone)]
pub struct ConditionalResult {
    pub state: MultiModeState,
    pub probability: f64,
}

/// APD outcome: vacuum or not-vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApdOutcome {
    Click,
    NoClick,
}

/// One element of a serialized circuit document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CircuitElement {
    Bs { modes: [usize; 2], t: f64, r: f64, phi: f64 },
    Phase { mode: usize, theta: f64 },
    Displace { mode: usize, beta: [f64; 2] },
    MeasurePnrd { mode: usize, n: usize },
    MeasureApd { mode: usize, outcome: ApdOutcome },
}

/// Precomputed per-sector transfer coefficients for one beam splitter on a
/// pair of mode dimensions.
struct SectorTables {
    /// tables[m_total] is a (valid_out × valid_in) matrix in row-major order
    tables: Vec<Vec<Complex64>>,
    dim_a: usize,
    dim_b: usize,
}

impl SectorTables {
    fn build(bs: &BeamSplitter, dim_a: usize, dim_b: usize) -> Self {
        let b = bs.matrix();
        let max_total = dim_a + dim_b - 2;
        let mut tables = Vec::with_capacity(max_total + 1);
        for total in 0..=max_total {
            let m_lo = total.saturating_sub(dim_b - 1);
            let m_hi = total.min(dim_a - 1);
            let width = m_hi + 1 - m_lo;
            let mut table = vec![Complex64::new(0.0, 0.0); width * width];
            for (row, m_out) in (m_lo..=m_hi).enumerate() {
                for (col, m_in) in (m_lo..=m_hi).enumerate() {
                    table[row * width + col] =
                        sector_coefficient(&b, total, m_out, m_in);
                }
            }
            tables.push(table);
        }
        Self { tables, dim_a, dim_b }
    }

    fn bounds(&self, total: usize) -> (usize, usize) {
        let m_lo = total.saturating_sub(self.dim_b - 1);
        let m_hi = total.min(self.dim_a - 1);
        (m_lo, m_hi)
    }
}

/// `⟨m_out, total − m_out| U_B |m_in, total − m_in⟩` from the binomial
/// expansion of the transformed creation operators; summands are evaluated
/// in log magnitude.
fn sector_coefficient(
    b: &[[Complex64; 2]; 2],
    total: usize,
    m_out: usize,
    m_in: usize,
) -> Complex64 {
    let n_in = total - m_in;
    let n_out = total - m_out;
    let ln_out = 0.5 * (ln_factorial(m_out) + ln_factorial(n_out));
    let ln_in = 0.5 * (ln_factorial(m_in) + ln_factorial(n_in));

    // entry magnitudes and phases; zero entries get a flag
    let comp = |z: Complex64| -> Option<(f64, f64)> {
        if z.norm() == 0.0 {
            None
        } else {
            Some((z.norm().ln(), z.arg()))
        }
    };
    let b00 = comp(b[0][0]);
    let b10 = comp(b[1][0]);
    let b01 = comp(b[0][1]);
    let b11 = comp(b[1][1]);

    let mut sum = Complex64::new(0.0, 0.0);
    // k photons of the first input mode end in the first output mode,
    // l = m_out − k photons of the second input mode end there too
    let k_lo = m_out.saturating_sub(n_in);
    let k_hi = m_out.min(m_in);
    for k in k_lo..=k_hi {
        let l = m_out - k;
        let powers = [(b00, k), (b10, m_in - k), (b01, l), (b11, n_in - l)];
        let mut ln_mag = ln_out - ln_in - ln_factorial(k) - ln_factorial(m_in - k)
            - ln_factorial(l)
            - ln_factorial(n_in - l)
            + ln_factorial(m_in)
            + ln_factorial(n_in);
        let mut phase = 0.0;
        let mut zero = false;
        for (entry, power) in powers {
            if power == 0 {
                continue;
            }
            match entry {
                None => {
                    zero = true;
                    break;
                }
                Some((ln_e, arg_e)) => {
                    ln_mag += power as f64 * ln_e;
                    phase += power as f64 * arg_e;
                }
            }
        }
        if !zero {
            sum += cis(phase) * ln_mag.exp();
        }
    }
    sum
}

/// Applies a beam splitter to two modes of a state. Photon number is
/// conserved exactly; amplitude that a sector transform would push past
/// either mode cutoff is dropped, and the operation fails when that dropped
/// mass exceeds the tail tolerance.
pub fn apply_beam_splitter(state: &MultiModeState, bs: &BeamSplitter) -> Result<MultiModeState> {
    apply_beam_splitter_with_budget(state, bs, CutoffPolicy::default().tail_tol)
}

/// [`apply_beam_splitter`] with an explicit truncation budget.
pub fn apply_beam_splitter_with_budget(
    state: &MultiModeState,
    bs: &BeamSplitter,
    budget: f64,
) -> Result<MultiModeState> {
    let (p, q) = bs.modes;
    let mode_count = state.mode_count();
    if p >= mode_count || q >= mode_count || p == q {
        return Err(Error::InvalidParameter(format!(
            "beam splitter modes ({p}, {q}) invalid on {mode_count} modes"
        )));
    }
    let dim_a = state.dims()[p];
    let dim_b = state.dims()[q];
    let tables = SectorTables::build(bs, dim_a, dim_b);

    let mut out = MultiModeState::zeros(state.dims());
    let stride_p = state.stride(p);
    let stride_q = state.stride(q);
    let dims = state.dims().to_vec();
    let total_len = state.amps().len();

    // iterate over all flat indices with (m, n) = (0, 0) in the two coupled
    // modes; each such base index addresses one two-mode block
    let mut lost = 0.0f64;
    let mut in_block = vec![Complex64::new(0.0, 0.0); dim_a.max(dim_b) + 1];
    for flat in 0..total_len {
        let m = (flat / stride_p) % dims[p];
        let n = (flat / stride_q) % dims[q];
        if m != 0 || n != 0 {
            continue;
        }
        // gather, transform, scatter per sector
        for total in 0..tables.tables.len() {
            let (m_lo, m_hi) = tables.bounds(total);
            if m_lo > m_hi {
                continue;
            }
            let width = m_hi + 1 - m_lo;
            let mut block_norm_in = 0.0f64;
            for (col, m_in) in (m_lo..=m_hi).enumerate() {
                let idx = flat + m_in * stride_p + (total - m_in) * stride_q;
                in_block[col] = state.amps()[idx];
                block_norm_in += state.amps()[idx].norm_sqr();
            }
            if block_norm_in == 0.0 {
                continue;
            }
            let table = &tables.tables[total];
            let mut block_norm_out = 0.0f64;
            for (row, m_out) in (m_lo..=m_hi).enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for col in 0..width {
                    acc += table[row * width + col] * in_block[col];
                }
                let idx = flat + m_out * stride_p + (total - m_out) * stride_q;
                out.amps_mut()[idx] = acc;
                block_norm_out += acc.norm_sqr();
            }
            lost += (block_norm_in - block_norm_out).max(0.0);
        }
    }
    if lost > budget {
        return Err(Error::Headroom { lost, tol: budget });
    }
    Ok(out)
}

/// Multiplies each photon-number component of one mode by `e^{iθn}`.
pub fn apply_phase_shift(state: &MultiModeState, ps: &PhaseShifter) -> MultiModeState {
    let mut out = state.clone();
    let stride = state.stride(ps.mode);
    let dim = state.dims()[ps.mode];
    for (flat, amp) in out.amps_mut().iter_mut().enumerate() {
        let n = (flat / stride) % dim;
        *amp *= cis(ps.theta * n as f64);
    }
    out
}

/// Exact displacement of one mode by `beta`, through the truncated
/// displacement operator. Fails when the displacement walks population past
/// the mode cutoff.
pub fn displace_mode(
    state: &MultiModeState,
    mode: usize,
    beta: Complex64,
) -> Result<MultiModeState> {
    let dim = state.dims()[mode];
    CutoffPolicy::default().check(dim - 1, beta.norm(), 0)?;
    let op = displacement_operator_unchecked(beta, dim - 1);
    let mut out = state.clone();
    out.apply_single_mode(mode, &op)?;
    let drift = (out.norm_sqr() - state.norm_sqr()).abs();
    if drift > CutoffPolicy::default().tail_tol {
        return Err(Error::Headroom { lost: drift, tol: CutoffPolicy::default().tail_tol });
    }
    Ok(out)
}

/// Displacement realized physically: mixes the target mode with a coherent
/// ancilla `|0, z⟩` on a transmittance-`T` beam splitter. The ancilla mode
/// is appended (last index) and retained. As `T → 1` with `z·√(1−T)` held
/// fixed, the action on the target approaches `displace_mode` by that
/// amount.
pub fn displace_via_ubs(
    state: &MultiModeState,
    mode: usize,
    ancilla_amplitude: Complex64,
    transmittance: f64,
) -> Result<MultiModeState> {
    if !(0.0..=1.0).contains(&transmittance) {
        return Err(Error::InvalidParameter("transmittance must lie in [0, 1]".into()));
    }
    let t = transmittance.sqrt();
    let r = (1.0 - transmittance).sqrt();
    let policy = CutoffPolicy::default();
    let anc_cutoff = policy.required_cutoff(ancilla_amplitude.norm(), 0);
    let ancilla = FockVector::coherent(ancilla_amplitude, anc_cutoff);

    // widen into a new state with the ancilla appended
    let mut dims = state.dims().to_vec();
    dims.push(anc_cutoff + 1);
    let mut joint = MultiModeState::zeros(&dims);
    let anc_dim = anc_cutoff + 1;
    for (flat, amp) in state.amps().iter().enumerate() {
        for k in 0..anc_dim {
            joint.amps_mut()[flat * anc_dim + k] = amp * ancilla.amp(k);
        }
    }
    let anc_index = dims.len() - 1;
    // reflected-into-target amplitude is +r·z: matrix entry [target←ancilla]
    // must be +r, so the ancilla sits first with φ = 0
    let bs = BeamSplitter::new(t, r, 0.0, (anc_index, mode))?;
    apply_beam_splitter(&joint, &bs)
}

/// Projects one mode onto `|n⟩`, removes it, renormalizes. The probability
/// is the squared norm before renormalization.
pub fn project_pnrd(state: &MultiModeState, mode: usize, n: usize) -> Result<ConditionalResult> {
    let dim = state.dims()[mode];
    if n >= dim {
        return Err(Error::InvalidParameter(format!(
            "photon count {n} not representable on mode of dim {dim}"
        )));
    }
    let bra = FockVector::basis_state(n, dim - 1);
    let reduced = state.project_mode(mode, &bra)?;
    let probability = reduced.norm_sqr();
    if probability < tolerances::UNDERFLOW_TOL {
        return Err(Error::ImprobableOutcome {
            probability,
            threshold: tolerances::UNDERFLOW_TOL,
        });
    }
    Ok(ConditionalResult { state: reduced.normalized(), probability })
}

/// Binary vacuum / not-vacuum detection. `NoClick` projects onto `|0⟩` and
/// removes the mode; `Click` keeps the mode, zeroing its vacuum slice and
/// renormalizing (valid for the pure states this crate works with).
pub fn measure_apd(
    state: &MultiModeState,
    mode: usize,
    outcome: ApdOutcome,
) -> Result<ConditionalResult> {
    match outcome {
        ApdOutcome::NoClick => project_pnrd(state, mode, 0),
        ApdOutcome::Click => {
            let mut clicked = state.clone();
            let stride = clicked.stride(mode);
            let dim = clicked.dims()[mode];
            for (flat, amp) in clicked.amps_mut().iter_mut().enumerate() {
                if (flat / stride).is_multiple_of(dim) {
                    *amp = Complex64::new(0.0, 0.0);
                }
            }
            let probability = clicked.norm_sqr();
            if probability < tolerances::UNDERFLOW_TOL {
                return Err(Error::ImprobableOutcome {
                    probability,
                    threshold: tolerances::UNDERFLOW_TOL,
                });
            }
            Ok(ConditionalResult { state: clicked.normalized(), probability })
        }
    }
}

/// Scales the coherent amplitudes of a coherent-component list by `1/A`,
/// the action of an absorbing medium on such a superposition. Weights are
/// untouched.
pub fn attenuate_coherent(
    components: &[(Complex64, Complex64)],
    absorption: f64,
) -> Result<Vec<(Complex64, Complex64)>> {
    if absorption < 1.0 {
        return Err(Error::InvalidParameter("absorption coefficient must be ≥ 1".into()));
    }
    Ok(components.iter().map(|&(w, z)| (w, z / absorption)).collect())
}

/// Runs a serialized circuit document against a state. Returns the final
/// state and the cumulative probability of every conditional outcome along
/// the way.
pub fn run_circuit(
    state: &MultiModeState,
    elements: &[CircuitElement],
) -> Result<(MultiModeState, f64)> {
    let mut current = state.clone();
    let mut probability = 1.0;
    for element in elements {
        match element {
            CircuitElement::Bs { modes, t, r, phi } => {
                let bs = BeamSplitter::new(*t, *r, *phi, (modes[0], modes[1]))?;
                current = apply_beam_splitter(&current, &bs)?;
            }
            CircuitElement::Phase { mode, theta } => {
                current = apply_phase_shift(&current, &PhaseShifter { theta: *theta, mode: *mode });
            }
            CircuitElement::Displace { mode, beta } => {
                current = displace_mode(&current, *mode, Complex64::new(beta[0], beta[1]))?;
            }
            CircuitElement::MeasurePnrd { mode, n } => {
                let result = project_pnrd(&current, *mode, *n)?;
                probability *= result.probability;
                current = result.state;
            }
            CircuitElement::MeasureApd { mode, outcome } => {
                let result = measure_apd(&current, *mode, *outcome)?;
                probability *= result.probability;
                current = result.state;
            }
        }
    }
    Ok((current, probability))
}

/// Parses a circuit document from JSON.
pub fn circuit_from_json(doc: &str) -> Result<Vec<CircuitElement>> {
    serde_json::from_str(doc)
        .map_err(|e| Error::InvalidParameter(format!("bad circuit document: {e}")))
}

/// Serializes a circuit document to JSON.
pub fn circuit_to_json(elements: &[CircuitElement]) -> String {
    serde_json::to_string_pretty(elements).expect("circuit elements always serialize")
}
