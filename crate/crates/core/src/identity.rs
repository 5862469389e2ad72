//! Scaled sum and difference identities.
//!
//! For each level `n >= 1` and `0 <= x <= 1`:
//!
//! ```text
//! S_n(x) = 2^(2n²-2n+1) · (f((1+x)/2^(2n-1)) + f((1-x)/2^(2n-1)))   even polynomial
//! D_n(x) = 2^(2n²)      · (f((1+x)/2^(2n))   - f((1-x)/2^(2n)))     odd polynomial
//! ```
//!
//! Level 1 is seeded with `S_1 = 2`, `D_1 = 2x`. Each further level follows
//! from the previous difference identity alone, see [`step`].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{NumberError, TableError};
use crate::number::ExactRational;

/// `2n² - 2n + 1`
pub fn sum_sigma(n: u32) -> u64 {
    let n = n as u64;
    2 * n * n - 2 * n + 1
}

/// `2n²`
pub fn diff_sigma(n: u32) -> u64 {
    let n = n as u64;
    2 * n * n
}

/// Even polynomial `S_n`; `coeffs[k]` multiplies `x^(2k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumIdentity {
    pub n: u32,
    pub sigma: u64,
    pub coeffs: Vec<ExactRational>,
}

/// Odd polynomial `D_n`; `coeffs[k]` multiplies `x^(2k+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffIdentity {
    pub n: u32,
    pub sigma: u64,
    pub coeffs: Vec<ExactRational>,
}

fn check_unit(x: &ExactRational) -> Result<(), NumberError> {
    if x.is_negative() || *x > ExactRational::one() {
        return Err(NumberError::OutOfDomain(format!("identity argument {x} outside [0, 1]")));
    }
    Ok(())
}

/// Horner evaluation of `Σ coeffs[k] · y^k`.
fn horner(coeffs: &[ExactRational], y: &ExactRational) -> ExactRational {
    coeffs
        .iter()
        .rev()
        .fold(ExactRational::zero(), |acc, c| acc * y + c)
}

impl SumIdentity {
    pub fn eval(&self, x: &ExactRational) -> Result<ExactRational, NumberError> {
        check_unit(x)?;
        Ok(horner(&self.coeffs, &(x * x)))
    }

    /// `S_n(0)`
    pub fn constant(&self) -> &ExactRational {
        &self.coeffs[0]
    }

    /// `S_n(1)`
    pub fn at_one(&self) -> ExactRational {
        self.coeffs.iter().cloned().sum()
    }
}

impl DiffIdentity {
    pub fn eval(&self, x: &ExactRational) -> Result<ExactRational, NumberError> {
        check_unit(x)?;
        Ok(horner(&self.coeffs, &(x * x)) * x)
    }

    pub fn at_one(&self) -> ExactRational {
        self.coeffs.iter().cloned().sum()
    }
}

pub fn eval_sum(s: &SumIdentity, x: &ExactRational) -> Result<ExactRational, NumberError> {
    s.eval(x)
}

pub fn eval_diff(d: &DiffIdentity, x: &ExactRational) -> Result<ExactRational, NumberError> {
    d.eval(x)
}

/// The level-1 identities `S_1(x) = 2` and `D_1(x) = 2x`.
pub fn seed() -> (SumIdentity, DiffIdentity) {
    let two = ExactRational::from(2);
    (
        SumIdentity { n: 1, sigma: sum_sigma(1), coeffs: vec![two.clone()] },
        DiffIdentity { n: 1, sigma: diff_sigma(1), coeffs: vec![two] },
    )
}

/// `C_n = (Σ_k a_(2k-1) / (k(2k+1))) / (2^(2n) - 1)`, the shared constant
/// coefficient of `S_(n+1)` and `D_(n+1)`.
fn step_constant(d: &DiffIdentity) -> ExactRational {
    let total: ExactRational = d
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let k = i as i64 + 1;
            a.checked_div(&ExactRational::from(k * (2 * k + 1))).expect("nonzero")
        })
        .sum();
    let denom = (BigInt::from(1) << (2 * d.n as usize)) - 1;
    total.checked_div(&ExactRational::from_integer(denom)).expect("nonzero")
}

/// Builds `S_(n+1)` and `D_(n+1)` from `D_n`.
pub fn step(d: &DiffIdentity) -> (SumIdentity, DiffIdentity) {
    let constant = step_constant(d);
    let n = d.n + 1;
    let mut s = Vec::with_capacity(n as usize);
    let mut dd = Vec::with_capacity(n as usize);
    s.push(constant.clone());
    dd.push(constant);
    for (i, a) in d.coeffs.iter().enumerate() {
        let k = i as i64 + 1;
        s.push(a.checked_div(&ExactRational::from(k)).expect("nonzero"));
        dd.push(a.checked_div(&ExactRational::from(k * (2 * k + 1))).expect("nonzero"));
    }
    (
        SumIdentity { n, sigma: sum_sigma(n), coeffs: s },
        DiffIdentity { n, sigma: diff_sigma(n), coeffs: dd },
    )
}

/// `f(1/2^(2n+1))` from the level-`n` difference identity; level 0 gives `f(1/2)`.
pub fn small_odd_value(d: Option<&DiffIdentity>) -> ExactRational {
    match d {
        None => ExactRational::ratio(1, 2),
        Some(d) => {
            let n = d.n as u64;
            step_constant(d).scale_pow2(-((2 * n * n + 2 * n + 2) as i64))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityLevel {
    pub sum: SumIdentity,
    pub diff: DiffIdentity,
}

/// Identities for levels `1..=max_n` plus the constants `f(1/2^(2n+1))`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdentityTable {
    levels: Vec<IdentityLevel>,
    small_odd_values: BTreeMap<u64, ExactRational>,
}

impl IdentityTable {
    /// An empty table (`max_n = 0`).
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_max_n(max_n: u32) -> Self {
        let mut t = Self::new();
        t.extend_to(max_n);
        t
    }

    pub fn max_n(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn levels(&self) -> &[IdentityLevel] {
        &self.levels
    }

    /// Level `n` (1-based).
    pub fn level(&self, n: u32) -> Option<&IdentityLevel> {
        self.levels.get((n as usize).checked_sub(1)?)
    }

    pub fn sum(&self, n: u32) -> Option<&SumIdentity> {
        self.level(n).map(|l| &l.sum)
    }

    pub fn diff(&self, n: u32) -> Option<&DiffIdentity> {
        self.level(n).map(|l| &l.diff)
    }

    /// Known values of `f(1/2^e)` for odd `e`, keyed by `e`.
    pub fn small_odd_values(&self) -> &BTreeMap<u64, ExactRational> {
        &self.small_odd_values
    }

    fn push(&mut self, level: IdentityLevel) {
        let n = level.sum.n as u64;
        // S_n(0) = 2^(2n²-2n+2) · f(1/2^(2n-1))
        let value = level.sum.constant().scale_pow2(-((sum_sigma(level.sum.n) + 1) as i64));
        self.small_odd_values.insert(2 * n - 1, value);
        self.levels.push(level);
    }

    /// Grows the table in place to `new_max_n` levels; a no-op if already there.
    /// Returns the number of levels computed.
    pub fn extend_to(&mut self, new_max_n: u32) -> u32 {
        let before = self.max_n();
        while self.max_n() < new_max_n {
            let (sum, diff) = match self.levels.last() {
                None => seed(),
                Some(last) => step(&last.diff),
            };
            self.push(IdentityLevel { sum, diff });
        }
        self.max_n() - before
    }

    /// Value-semantics variant of [`extend_to`](Self::extend_to).
    pub fn extend_table(&self, new_max_n: u32) -> IdentityTable {
        let mut t = self.clone();
        t.extend_to(new_max_n);
        t
    }

    pub fn to_file(&self) -> TableFile {
        TableFile {
            max_n: self.max_n(),
            levels: self
                .levels
                .iter()
                .map(|l| LevelRecord {
                    n: l.sum.n,
                    sigma_s: l.sum.sigma,
                    s: l.sum.coeffs.clone(),
                    sigma_d: l.diff.sigma,
                    d: l.diff.coeffs.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, TableError> {
        let file: TableFile = serde_json::from_str(text)?;
        Self::from_file(file)
    }

    /// Rebuilds a table from its serialized form, rejecting it unless every
    /// level satisfies the seed, recurrence, sign and cross-check relations.
    pub fn from_file(file: TableFile) -> Result<Self, TableError> {
        if file.levels.len() != file.max_n as usize {
            return Err(invalid(0, format!(
                "max_n is {} but {} levels are present",
                file.max_n,
                file.levels.len()
            )));
        }
        let mut table = Self::new();
        for (i, rec) in file.levels.into_iter().enumerate() {
            let n = i as u32 + 1;
            let level = IdentityLevel {
                sum: SumIdentity { n: rec.n, sigma: rec.sigma_s, coeffs: rec.s },
                diff: DiffIdentity { n: rec.n, sigma: rec.sigma_d, coeffs: rec.d },
            };
            validate_level(n, &level, table.levels.last())?;
            table.push(level);
        }
        Ok(table)
    }
}

fn invalid(level: usize, reason: String) -> TableError {
    TableError::Invalid { level, reason }
}

fn validate_level(n: u32, level: &IdentityLevel, prev: Option<&IdentityLevel>) -> Result<(), TableError> {
    let at = n as usize;
    let (s, d) = (&level.sum, &level.diff);
    if s.n != n || d.n != n {
        return Err(invalid(at, format!("level index {} where {n} was expected", s.n)));
    }
    if s.sigma != sum_sigma(n) || d.sigma != diff_sigma(n) {
        return Err(invalid(at, format!(
            "scale exponents ({}, {}) where ({}, {}) were expected",
            s.sigma,
            d.sigma,
            sum_sigma(n),
            diff_sigma(n)
        )));
    }
    if s.coeffs.len() != n as usize || d.coeffs.len() != n as usize {
        return Err(invalid(at, "coefficient count differs from the level".into()));
    }
    if s.coeffs.iter().chain(&d.coeffs).any(|c| !c.is_positive()) {
        return Err(invalid(at, "non-positive coefficient".into()));
    }
    // D_n(1)/2^(2n²) and S_n(0)/2^(2n²-2n+2) both equal f(1/2^(2n-1))
    let lhs = d.at_one().scale_pow2(-(d.sigma as i64));
    let rhs = s.constant().scale_pow2(-(s.sigma as i64 + 1));
    if lhs != rhs {
        return Err(invalid(at, "D_n(1) and S_n(0) disagree on f(1/2^(2n-1))".into()));
    }
    match prev {
        None => {
            let (s1, d1) = seed();
            if *s != s1 || *d != d1 {
                return Err(invalid(at, "level 1 differs from the seed identities".into()));
            }
        }
        Some(prev) => {
            if s.constant() >= prev.sum.constant() {
                return Err(invalid(at, "constant coefficient does not decrease".into()));
            }
            if s.coeffs[0] != d.coeffs[0] {
                return Err(invalid(at, "S_n and D_n constants differ".into()));
            }
            let mut weighted = ExactRational::zero();
            for (i, a) in prev.diff.coeffs.iter().enumerate() {
                let k = i as i64 + 1;
                let sk = &s.coeffs[i + 1];
                let dk = &d.coeffs[i + 1];
                if sk * &ExactRational::from(k) != *a || dk * &ExactRational::from(k * (2 * k + 1)) != *a {
                    return Err(invalid(at, format!("coefficient {} breaks the recurrence", i + 1)));
                }
                weighted = weighted + dk;
            }
            let scale = ExactRational::from_integer((BigInt::from(1) << (2 * (n as usize - 1))) - 1);
            if &s.coeffs[0] * &scale != weighted {
                return Err(invalid(at, "constant coefficient breaks the recurrence".into()));
            }
        }
    }
    Ok(())
}

/// Serialized table: `{"max_n", "levels": [{"n", "sigma_s", "s", "sigma_d", "d"}]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TableFile {
    pub max_n: u32,
    pub levels: Vec<LevelRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LevelRecord {
    pub n: u32,
    pub sigma_s: u64,
    pub s: Vec<ExactRational>,
    pub sigma_d: u64,
    pub d: Vec<ExactRational>,
}
