//! Log-factorials, falling factorials, and stable factorial-ratio helpers.
//!
//! Raw factorials overflow `f64` near `n = 171`, so every factorial ratio in
//! the crate goes through `ln_factorial` or a running product.

use std::sync::LazyLock;

use num_complex::Complex64;

const LN_FACT_LEN: usize = 4096;

static LN_FACT: LazyLock<Vec<f64>> = LazyLock::new(|| {
    let mut table = vec![0.0f64; LN_FACT_LEN];
    // Compensated running sum of ln(k); drift stays below 1e-13 over the
    // whole table.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for (k, slot) in table.iter_mut().enumerate().skip(2) {
        let term = (k as f64).ln() - comp;
        let next = sum + term;
        comp = (next - sum) - term;
        sum = next;
        *slot = sum;
    }
    table
});

/// ln(n!)
pub fn ln_factorial(n: usize) -> f64 {
    assert!(n < LN_FACT_LEN, "ln_factorial: n = {n} exceeds table");
    LN_FACT[n]
}

/// sqrt(a! / b!) evaluated in log space.
pub fn sqrt_factorial_ratio(a: usize, b: usize) -> f64 {
    (0.5 * (ln_factorial(a) - ln_factorial(b))).exp()
}

/// Falling factorial n·(n−1)···(n−k+1), as a running product.
pub fn falling(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut acc = 1.0f64;
    for j in 0..k {
        acc *= (n - j) as f64;
    }
    acc
}

/// Binomial coefficient C(n, k) as a running product.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc
}

/// z^n for integer n ≥ 0 through polar form, so large exponents do not
/// accumulate multiplication roundoff.
pub fn powi(z: Complex64, n: usize) -> Complex64 {
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if z == Complex64::new(0.0, 0.0) {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar((z.norm().ln() * n as f64).exp(), z.arg() * n as f64)
}

/// e^{iθ}
pub fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}
