//! Independent oracle: the exact CDF of `X_N = Σ_{n=1..N} 2^-n U_n`.
//!
//! `f` is the distribution function of the infinite series, so the
//! truncated CDF brackets it: the dropped tail lies in `[0, 2^-N]`, hence
//! `F_N(x - 2^-N) <= f(x) <= F_N(x)`.
//!
//! `F_N` is built by repeated exact convolution with scaled uniforms,
//! `F_next(x) = (1/w) ∫_{x-w}^{x} F(t) dt`. A full build has `2^N` pieces, so
//! brackets only build the CDF on the narrow window they read from.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::OracleError;
use crate::number::{DyadicRational, ExactRational};

pub const MAX_ORACLE_LEVEL: u32 = 24;

/// Exact piecewise polynomial on `[breakpoints[0], breakpoints.last()]`.
///
/// `pieces[i]` holds the coefficients of `Σ c_k (t - breakpoints[i])^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewisePolynomialCDF {
    breakpoints: Vec<ExactRational>,
    pieces: Vec<Vec<ExactRational>>,
    level: u32,
}

fn poly_eval(coeffs: &[ExactRational], s: &ExactRational) -> ExactRational {
    coeffs.iter().rev().fold(ExactRational::zero(), |acc, c| acc * s + c)
}

/// Coefficients of `p(u + delta)` given those of `p(u)`.
fn taylor_shift(coeffs: &[ExactRational], delta: &ExactRational) -> Vec<ExactRational> {
    let mut c = coeffs.to_vec();
    if delta.is_zero() {
        return c;
    }
    let deg = c.len().saturating_sub(1);
    for i in 0..deg {
        for j in (i..deg).rev() {
            let carry = &c[j + 1] * delta;
            c[j] = &c[j] + &carry;
        }
    }
    c
}

fn trim(mut c: Vec<ExactRational>) -> Vec<ExactRational> {
    while c.len() > 1 && c.last().is_some_and(ExactRational::is_zero) {
        c.pop();
    }
    c
}

impl PiecewisePolynomialCDF {
    pub fn breakpoints(&self) -> &[ExactRational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Vec<ExactRational>] {
        &self.pieces
    }

    /// Number of uniforms convolved.
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn left(&self) -> &ExactRational {
        &self.breakpoints[0]
    }

    pub fn right(&self) -> &ExactRational {
        self.breakpoints.last().expect("at least one piece")
    }

    pub fn degree(&self) -> usize {
        self.pieces.iter().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0)
    }

    fn piece_index(&self, t: &ExactRational) -> usize {
        let idx = self.breakpoints.partition_point(|b| b <= t);
        idx.saturating_sub(1).min(self.pieces.len() - 1)
    }

    /// Value at `t`, clamped to the covered window.
    pub fn eval(&self, t: &ExactRational) -> ExactRational {
        let t = t.clone().max(self.left().clone()).min(self.right().clone());
        let i = self.piece_index(&t);
        poly_eval(&self.pieces[i], &(&t - &self.breakpoints[i]))
    }

    /// Value of piece `i` at its right end.
    pub fn piece_end_value(&self, i: usize) -> ExactRational {
        poly_eval(&self.pieces[i], &(&self.breakpoints[i + 1] - &self.breakpoints[i]))
    }

    /// Distribution of the point mass at zero, on `[lo, hi]`.
    fn step_at_zero(lo: &ExactRational, hi: &ExactRational) -> Self {
        let zero = ExactRational::zero();
        let (breakpoints, pieces) = if *hi <= zero {
            (vec![lo.clone(), hi.clone()], vec![vec![zero]])
        } else if *lo >= zero {
            (vec![lo.clone(), hi.clone()], vec![vec![ExactRational::one()]])
        } else {
            (vec![lo.clone(), zero.clone(), hi.clone()], vec![vec![zero], vec![ExactRational::one()]])
        };
        Self { breakpoints, pieces, level: 0 }
    }

    /// `G(x) = (1/w) ∫_{x-w}^{x} F(t) dt` on `[lo, hi]`; `self` must cover `[lo - w, hi]`.
    fn convolve_uniform(&self, w: &ExactRational, lo: &ExactRational, hi: &ExactRational) -> Self {
        debug_assert!(*self.left() <= lo - w && self.right() >= hi);
        // antiderivative, zero at the left end of the window
        let mut anti: Vec<Vec<ExactRational>> = Vec::with_capacity(self.pieces.len());
        let mut offset = ExactRational::zero();
        for (i, p) in self.pieces.iter().enumerate() {
            let mut a = Vec::with_capacity(p.len() + 1);
            a.push(offset.clone());
            for (k, c) in p.iter().enumerate() {
                a.push(c.checked_div(&ExactRational::from(k as i64 + 1)).expect("nonzero"));
            }
            offset = poly_eval(&a, &(&self.breakpoints[i + 1] - &self.breakpoints[i]));
            anti.push(a);
        }

        let mut cuts: Vec<ExactRational> = vec![lo.clone(), hi.clone()];
        for b in &self.breakpoints {
            let shifted = b + w;
            for c in [b.clone(), shifted] {
                if c > *lo && c < *hi {
                    cuts.push(c);
                }
            }
        }
        cuts.sort();
        cuts.dedup();

        let inv_w = w.recip().expect("positive width");
        let mut pieces = Vec::with_capacity(cuts.len() - 1);
        for start in &cuts[..cuts.len() - 1] {
            let a = self.piece_index(start);
            let back = start - w;
            let c = self.piece_index(&back);
            let upper = taylor_shift(&anti[a], &(start - &self.breakpoints[a]));
            let lower = taylor_shift(&anti[c], &(&back - &self.breakpoints[c]));
            let len = upper.len().max(lower.len());
            let zero = ExactRational::zero();
            let diff: Vec<ExactRational> = (0..len)
                .map(|k| {
                    let u = upper.get(k).unwrap_or(&zero);
                    let l = lower.get(k).unwrap_or(&zero);
                    (u - l) * &inv_w
                })
                .collect();
            pieces.push(trim(diff));
        }
        Self { breakpoints: cuts, pieces, level: self.level + 1 }
    }

    /// CDF of `Σ w_i U_i` on `[lo, hi]`, convolving the widths in the given order.
    pub fn convolve_widths_on(widths: &[ExactRational], lo: &ExactRational, hi: &ExactRational) -> Self {
        // window needed after each stage, walking backwards from the last
        let mut windows = vec![(lo.clone(), hi.clone())];
        for w in widths.iter().rev() {
            let (l, h) = windows.last().unwrap().clone();
            windows.push((l - w, h));
        }
        windows.reverse();
        let (l0, h0) = &windows[0];
        let mut cdf = Self::step_at_zero(l0, h0);
        for (w, (l, h)) in widths.iter().zip(&windows[1..]) {
            cdf = cdf.convolve_uniform(w, l, h);
        }
        cdf
    }

    /// CDF of `Σ w_i U_i` over its support `[0, Σ w_i]`, normalized.
    pub fn from_widths(widths: &[ExactRational]) -> Self {
        let total: ExactRational = widths.iter().cloned().sum();
        Self::convolve_widths_on(widths, &ExactRational::zero(), &total).normalized()
    }

    /// Merges adjacent pieces that are the same polynomial.
    pub fn normalized(&self) -> Self {
        let mut breakpoints = vec![self.breakpoints[0].clone()];
        let mut pieces: Vec<Vec<ExactRational>> = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            if let Some(prev) = pieces.last() {
                let start = breakpoints[breakpoints.len() - 2].clone();
                let continued = trim(taylor_shift(prev, &(&self.breakpoints[i] - &start)));
                if continued == trim(p.clone()) {
                    *breakpoints.last_mut().unwrap() = self.breakpoints[i + 1].clone();
                    continue;
                }
            }
            pieces.push(trim(p.clone()));
            breakpoints.push(self.breakpoints[i + 1].clone());
        }
        Self { breakpoints, pieces, level: self.level }
    }
}

fn check_level(n: u32) -> Result<(), OracleError> {
    if (1..=MAX_ORACLE_LEVEL).contains(&n) {
        Ok(())
    } else {
        Err(OracleError::LevelOutOfRange(n))
    }
}

fn scales(n: u32) -> Vec<ExactRational> {
    (1..=n as i64).map(|i| ExactRational::pow2(-i)).collect()
}

/// Exact CDF of `X_N` on its full support `[0, 1 - 2^-N]`.
///
/// The piece count is `2^N`; levels beyond about 14 are better served by
/// [`truncated_cdf_window`].
pub fn truncated_cdf(n: u32) -> Result<PiecewisePolynomialCDF, OracleError> {
    check_level(n)?;
    Ok(PiecewisePolynomialCDF::from_widths(&scales(n)))
}

/// Exact CDF of `X_N` restricted to `[lo, hi]`.
pub fn truncated_cdf_window(
    n: u32,
    lo: &ExactRational,
    hi: &ExactRational,
) -> Result<PiecewisePolynomialCDF, OracleError> {
    check_level(n)?;
    Ok(PiecewisePolynomialCDF::convolve_widths_on(&scales(n), lo, hi))
}

/// `(F_N(x - 2^-N), F_N(x))`, which encloses `f(x)`.
pub fn bracket(x: &DyadicRational, n: u32) -> Result<(ExactRational, ExactRational), OracleError> {
    check_level(n)?;
    if x.is_zero() {
        return Ok((ExactRational::zero(), ExactRational::zero()));
    }
    let hi = x.to_rational();
    let lo = &hi - &ExactRational::pow2(-(n as i64));
    let cdf = truncated_cdf_window(n, &lo, &hi)?;
    let lower = if lo.is_negative() { ExactRational::zero() } else { cdf.eval(&lo) };
    Ok((lower, cdf.eval(&hi)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Empirical `P(Σ_{n<=40} 2^-n U_n <= x)` from a seeded ChaCha stream.
pub fn monte_carlo_estimate(x: &ExactRational, samples: u64, seed: u64) -> MonteCarloEstimate {
    let samples = samples.max(1);
    let threshold = x.to_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let mut sum = 0.0f64;
        let mut scale = 0.5f64;
        for _ in 0..40 {
            sum += scale * rng.random::<f64>();
            scale *= 0.5;
        }
        if sum <= threshold {
            hits += 1;
        }
    }
    let mean = hits as f64 / samples as f64;
    let std_error = (mean * (1.0 - mean) / samples as f64).sqrt();
    MonteCarloEstimate { mean, std_error, samples }
}

/// Right end of the support of `X_N`.
pub fn support_end(n: u32) -> ExactRational {
    ExactRational::one() - ExactRational::pow2(-(n as i64))
}

/// Dyadic grid `j/2^m`, `j = 0..=2^m`.
pub fn unit_grid(m: u64) -> Vec<DyadicRational> {
    let top: u64 = 1 << m;
    (0..=top).map(|j| DyadicRational::new(BigUint::from(j), m)).collect()
}
