//! Ramanujan-type series for `1/π` and the quadratic and quintic AGM-type
//! iterations, on a hand-rolled multiprecision real type.

mod iteration;
mod real;
mod series;

pub use iteration::{
    b_ratio_check, branch_map, check_digits, eval_rational_at, pi_reference, run_init,
    run_quadratic, run_quintic, solve_branch_root, BranchRoot, Init, IterationRun, IterationState,
    Scheme, StepRecord,
};
pub use real::{PrecisionReal, MIN_PREC};
pub use series::{eval_series, Limit, SeriesKind, SeriesMethod, SeriesTarget, SeriesValue};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AgmError {
    #[error("negative radicand {0}")]
    NegativeRadicand(String),
    #[error("series diverges: |x| = {x} against radius {radius}")]
    DivergentTarget { x: String, radius: String },
    #[error("Newton iteration did not converge after {steps} steps")]
    NoConvergence { steps: usize },
    #[error("branch root not certified: {0}")]
    AmbiguousBranch(String),
    #[error("{requested} digits requested but {available} bits give about {usable} digits")]
    PrecisionExhausted {
        requested: u32,
        available: u32,
        usable: u32,
    },
    #[error("b_0 = 0: ratio identity undefined")]
    ZeroB,
    #[error("map must vanish at 0 with odd valuation: {0}")]
    InvalidMap(String),
    #[error("unknown initial data {0}; expected ic, n21a, n21, bauer, n3 or n7")]
    UnknownInit(String),
}

/// Working bits for `digits` decimal digits plus guard bits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 32
}

/// Decimal digits represented by `bits`.
pub fn digits_for_bits(bits: u32) -> u32 {
    (bits as f64 * std::f64::consts::LOG10_2).floor() as u32
}

#[cfg(test)]
pub(crate) mod oracle {
    use super::PrecisionReal;
    use num_bigint::BigInt;
    use num_traits::Zero;

    /// `arctan(1/k) · 2^bits` in fixed point.
    fn arctan_inv(k: u64, bits: usize) -> BigInt {
        let one = BigInt::from(1) << bits;
        let k2 = BigInt::from(k * k);
        let mut pw = &one / BigInt::from(k);
        let mut sum = BigInt::zero();
        let mut n = 0u64;
        while !pw.is_zero() {
            let t = &pw / BigInt::from(2 * n + 1);
            if n.is_multiple_of(2) {
                sum += t;
            } else {
                sum -= t;
            }
            pw /= &k2;
            n += 1;
        }
        sum
    }

    /// π by Machin's formula, independent of everything under test.
    pub fn machin_pi(prec: u32) -> PrecisionReal {
        let bits = prec as usize + 64;
        let v = arctan_inv(5, bits) * 16 - arctan_inv(239, bits) * 4;
        PrecisionReal::new(v, -(bits as i64), prec)
    }
}
