//! Exact evaluation of the Fabius function at dyadic rationals.
//!
//! On `[0, 1]` values come from pairing descent: `k/2^M` with `k = 2^q + p`
//! is written as `(1 + x)/2^m` with `x = p/2^q`, and the sum or difference
//! identity of the matching level trades it for the partner `(1 - x)/2^m`,
//! whose odd numerator `2^q - p` is strictly smaller. Powers `1/2^M` are
//! read directly off `S_n(0)` or `S_n(1)`.
//!
//! Beyond `[0, 1]` the function is a bell on `[0, 2]` repeated with signs
//! `(-1)^t(M)` on `[2M, 2M + 2]`, `t` being the Thue–Morse sequence.

use std::collections::HashMap;
use std::sync::{RwLock, RwLockReadGuard};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::NumberError;
use crate::identity::IdentityTable;
use crate::number::{normalize_dyadic, DyadicRational, ExactRational};

/// Default memo capacity in entries.
pub const DEFAULT_CACHE_CAPACITY: usize = 1 << 16;

/// An exact value `f(argument)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FabiusValue {
    pub argument: DyadicRational,
    pub value: ExactRational,
}

/// Certified approximation: `|f(query) - value| <= error_bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxResult {
    pub query: ExactRational,
    pub anchor: DyadicRational,
    pub value: ExactRational,
    pub error_bound: ExactRational,
}

/// Bounded memo of exact values. Inserts past capacity are dropped.
#[derive(Debug)]
pub struct MemoCache {
    entries: RwLock<HashMap<DyadicRational, ExactRational>>,
    capacity: usize,
}

impl MemoCache {
    pub fn new(capacity: usize) -> Self {
        Self { entries: RwLock::new(HashMap::new()), capacity }
    }

    pub fn get(&self, key: &DyadicRational) -> Option<ExactRational> {
        self.entries.read().unwrap().get(key).cloned()
    }

    /// Returns false when the entry was rejected for lack of room.
    pub fn insert(&self, key: DyadicRational, value: ExactRational) -> bool {
        let mut entries = self.entries.write().unwrap();
        if entries.len() >= self.capacity && !entries.contains_key(&key) {
            return false;
        }
        entries.insert(key, value);
        true
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }
}

/// Parity of the number of set bits of `m`.
pub fn thue_morse(m: u64) -> u8 {
    (m.count_ones() & 1) as u8
}

pub fn thue_morse_big(m: &BigUint) -> u8 {
    (m.count_ones() & 1) as u8
}

/// Evaluator over an identity table that grows on demand.
///
/// Safe to share between threads; concurrent callers may duplicate work on a
/// cache miss but always agree on values.
#[derive(Debug)]
pub struct Evaluator {
    table: RwLock<IdentityTable>,
    memo: Option<MemoCache>,
    reflect_first: bool,
}

impl Default for Evaluator {
    fn default() -> Self {
        Self::new()
    }
}

impl Evaluator {
    /// Memoizing evaluator that reflects arguments above 1/2.
    pub fn new() -> Self {
        Self::with_table(IdentityTable::new())
    }

    pub fn with_table(table: IdentityTable) -> Self {
        Self {
            table: RwLock::new(table),
            memo: Some(MemoCache::new(DEFAULT_CACHE_CAPACITY)),
            reflect_first: true,
        }
    }

    pub fn with_cache_capacity(mut self, capacity: Option<usize>) -> Self {
        self.memo = capacity.map(MemoCache::new);
        self
    }

    pub fn with_reflection(mut self, reflect_first: bool) -> Self {
        self.reflect_first = reflect_first;
        self
    }

    pub fn cache(&self) -> Option<&MemoCache> {
        self.memo.as_ref()
    }

    /// Snapshot of the current identity table.
    pub fn table(&self) -> IdentityTable {
        self.table.read().unwrap().clone()
    }

    /// Read access to the table after growing it to at least `n` levels.
    pub fn table_at_least(&self, n: u32) -> RwLockReadGuard<'_, IdentityTable> {
        {
            let guard = self.table.read().unwrap();
            if guard.max_n() >= n {
                return guard;
            }
        }
        self.table.write().unwrap().extend_to(n);
        self.table.read().unwrap()
    }

    /// Exact `f(d)` for `d` in `[0, 1]`.
    pub fn eval_unit(&self, d: &DyadicRational) -> Result<ExactRational, NumberError> {
        if !d.in_unit_interval() {
            return Err(NumberError::OutOfDomain(format!("{d} is outside [0, 1]")));
        }
        if self.reflect_first && d.exp() > 1 && d.numer().bits() == d.exp() {
            // d > 1/2
            let mirrored = d.one_minus()?;
            return Ok(ExactRational::one() - self.descend(&mirrored));
        }
        Ok(self.descend(d))
    }

    /// `1 - f(1 - d)`, an alternative route to `f(d)` on `[0, 1]`.
    pub fn eval_reflected(&self, d: &DyadicRational) -> Result<ExactRational, NumberError> {
        let mirrored = d.one_minus()?;
        Ok(ExactRational::one() - self.eval_unit(&mirrored)?)
    }

    fn descend(&self, d: &DyadicRational) -> ExactRational {
        // every level touched while descending from k/2^M is at most (M+2)/2
        let table = self.table_at_least(((d.exp() + 2) / 2) as u32);
        let mut chain: Vec<(DyadicRational, ExactRational, bool)> = Vec::new();
        let mut current = d.clone();
        let base = loop {
            if let Some(v) = self.memo.as_ref().and_then(|m| m.get(&current)) {
                break v;
            }
            if let Some(v) = base_value(&table, &current) {
                break v;
            }
            let split = current.split_leading_bit().expect("numerator above one inside (0, 1)");
            let x = split.x.to_rational();
            let (term, subtract) = if split.m_inner % 2 == 1 {
                let s = table.sum(split.m_inner.div_ceil(2) as u32).expect("level present");
                (s.eval(&x).expect("x in [0,1]").scale_pow2(-(s.sigma as i64)), true)
            } else {
                let dd = table.diff((split.m_inner / 2) as u32).expect("level present");
                (dd.eval(&x).expect("x in [0,1]").scale_pow2(-(dd.sigma as i64)), false)
            };
            chain.push((current, term, subtract));
            current = split.partner;
        };
        drop(table);
        if let Some(memo) = &self.memo {
            memo.insert(current, base.clone());
        }
        let mut value = base;
        for (node, term, subtract) in chain.into_iter().rev() {
            value = if subtract { term - value } else { term + value };
            if let Some(memo) = &self.memo {
                memo.insert(node, value.clone());
            }
        }
        value
    }

    /// Exact `f(d)` for any `d >= 0`.
    pub fn eval_extended(&self, d: &DyadicRational) -> ExactRational {
        let (period, r) = split_period(d);
        let bell = if r.in_unit_interval() {
            self.eval_unit(&r)
        } else {
            // r in (1, 2)
            let two_minus = normalize_dyadic((BigUint::from(2u32) << r.exp()) - r.numer(), r.exp());
            self.eval_unit(&two_minus)
        }
        .expect("bell argument in [0, 1]");
        if thue_morse_big(&period) == 1 {
            -bell
        } else {
            bell
        }
    }

    /// Certified approximation of `f(x)` for a real `x >= 0` to within `eps`.
    ///
    /// Dyadic inputs are evaluated exactly. Otherwise `x` is rounded to the
    /// nearest multiple of `2^-(m+1)` with `2^-m <= eps`, and the bound is
    /// twice the rounding distance since `|f'| <= 2`.
    pub fn approx_eval(&self, x: &ExactRational, eps: &ExactRational) -> Result<ApproxResult, NumberError> {
        if x.is_negative() {
            return Err(NumberError::OutOfDomain(format!("{x} is negative")));
        }
        if !eps.is_positive() {
            return Err(NumberError::OutOfDomain(format!("tolerance {eps} is not positive")));
        }
        let anchor = match DyadicRational::try_from(x) {
            Ok(exact) => exact,
            Err(_) => {
                let bits = precision_for(eps) + 1;
                let scaled = x.scale_pow2(bits as i64) + ExactRational::ratio(1, 2);
                let k = scaled.floor().to_biguint().expect("nonnegative");
                normalize_dyadic(k, bits)
            }
        };
        let value = self.eval_extended(&anchor);
        let error_bound = (x - &anchor.to_rational()).abs().scale_pow2(1);
        Ok(ApproxResult { query: x.clone(), anchor, value, error_bound })
    }

    /// Iterator over `f(j/2^m)` for `j = 0..=2^m`, computed lazily.
    pub fn values_iter(&self, m: u64) -> impl Iterator<Item = FabiusValue> + '_ {
        let top = BigUint::one() << m;
        let mut j = BigUint::zero();
        std::iter::from_fn(move || {
            if j > top {
                return None;
            }
            let argument = normalize_dyadic(j.clone(), m);
            j += 1u32;
            let value = self.eval_unit(&argument).expect("grid point in [0, 1]");
            Some(FabiusValue { argument, value })
        })
    }

    pub fn values_at_denominator(&self, m: u64) -> Vec<FabiusValue> {
        self.values_iter(m).collect()
    }
}

/// Values that need no descent: 0, 1 and the powers 1/2^M.
fn base_value(table: &IdentityTable, d: &DyadicRational) -> Option<ExactRational> {
    if d.is_zero() {
        return Some(ExactRational::zero());
    }
    if !d.numer().is_one() {
        return None;
    }
    let m = d.exp();
    if m == 0 {
        return Some(ExactRational::one());
    }
    if m % 2 == 1 {
        // 1/2^(2n-1) = S_n(0) / 2^(2n²-2n+2)
        let s = table.sum(m.div_ceil(2) as u32)?;
        Some(s.constant().scale_pow2(-(s.sigma as i64 + 1)))
    } else {
        // 1/2^(2n-2) = S_n(1) / 2^(2n²-2n+1)
        let s = table.sum(((m + 2) / 2) as u32)?;
        Some(s.at_one().scale_pow2(-(s.sigma as i64)))
    }
}

/// Writes `d = 2M + r` with `r` in `[0, 2)`.
fn split_period(d: &DyadicRational) -> (BigUint, DyadicRational) {
    let period = d.numer() >> (d.exp() + 1);
    let rest = d.numer() - (&period << (d.exp() + 1));
    (period, normalize_dyadic(rest, d.exp()))
}

/// Smallest `m >= 0` with `2^-m <= eps`.
fn precision_for(eps: &ExactRational) -> u64 {
    let mut m = 0u64;
    // start from the bit-length estimate, then correct
    let ratio = eps.denom().bits() as i64 - eps.numer().bits() as i64;
    if ratio > 1 {
        m = (ratio - 1) as u64;
    }
    while eps.scale_pow2(m as i64) < ExactRational::one() {
        m += 1;
    }
    m
}

/// `Σ_{m<count} (-1)^t(m)`.
pub fn thue_morse_prefix_sum(count: u64) -> BigInt {
    (0..count).map(|m| if thue_morse(m) == 1 { -1 } else { 1 }).sum::<i64>().into()
}
