//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion fails. Run with `--nocapture` to see the lines.

use std::time::{Duration, Instant};

use fabius_core::evaluator::{thue_morse, thue_morse_prefix_sum};
use fabius_core::golden::{GOLDEN_DIFF, GOLDEN_SUM, GOLDEN_VALUES};
use fabius_core::identity::small_odd_value;
use fabius_core::oracle::{bracket, unit_grid};
use fabius_core::{
    verify_golden, verify_identities, verify_oracle, DyadicRational, Evaluator, ExactRational, IdentityTable,
};

fn r(n: i64, d: i64) -> ExactRational {
    ExactRational::ratio(n, d)
}

fn dy(k: u64, m: u64) -> DyadicRational {
    DyadicRational::new(k, m)
}

struct Outcome {
    id: u32,
    name: &'static str,
    result: Result<(), String>,
    elapsed: Duration,
}

fn run(id: u32, name: &'static str, limit: Option<Duration>, body: impl FnOnce() -> Result<(), String>) -> Outcome {
    let start = Instant::now();
    let mut result = body();
    let elapsed = start.elapsed();
    if let (Ok(()), Some(limit)) = (&result, limit) {
        if elapsed > limit {
            result = Err(format!("took {elapsed:?}, limit {limit:?}"));
        }
    }
    let status = if result.is_ok() { "PASS" } else { "FAIL" };
    let detail = result.as_ref().err().map(|e| format!(": {e}")).unwrap_or_default();
    println!("[{status}] criterion {id:>2} {name} ({:.3}s){detail}", elapsed.as_secs_f64());
    Outcome { id, name, result, elapsed }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden_values() -> Result<(), String> {
    let e = Evaluator::new();
    let report = verify_golden(&e);
    ensure(report.pass && report.cases == 31, || format!("{:?}", report.failures))?;
    // also through the descent alone
    let plain = Evaluator::new().with_reflection(false).with_cache_capacity(None);
    for &(j, m, num, den) in &GOLDEN_VALUES {
        let got = plain.eval_unit(&dy(j, m)).map_err(|e| e.to_string())?;
        ensure(got == r(num, den), || format!("f({j}/2^{m}) = {got}"))?;
    }
    Ok(())
}

fn golden_polynomials() -> Result<(), String> {
    let table = IdentityTable::with_max_n(5);
    let sigmas: Vec<u64> = table.levels().iter().flat_map(|l| [l.sum.sigma, l.diff.sigma]).collect();
    ensure(sigmas == [1, 2, 5, 8, 13, 18, 25, 32, 41, 50], || format!("sigmas {sigmas:?}"))?;
    for (i, level) in table.levels().iter().enumerate() {
        let (sigma_s, s) = GOLDEN_SUM[i];
        let (sigma_d, d) = GOLDEN_DIFF[i];
        let want_s: Vec<_> = s.iter().map(|&(n, d)| r(n, d)).collect();
        let want_d: Vec<_> = d.iter().map(|&(n, d)| r(n, d)).collect();
        ensure(level.sum.sigma == sigma_s && level.sum.coeffs == want_s, || {
            format!("S_{} = {:?}", i + 1, level.sum.coeffs)
        })?;
        ensure(level.diff.sigma == sigma_d && level.diff.coeffs == want_d, || {
            format!("D_{} = {:?}", i + 1, level.diff.coeffs)
        })?;
    }
    let d5 = &table.levels()[4].diff.coeffs;
    ensure(d5[0] == r(132809, 40989847500) && d5[4] == r(1, 11340), || "D_5 ends".into())
}

fn small_value_constants() -> Result<(), String> {
    let table = IdentityTable::with_max_n(2);
    let descent = Evaluator::new().with_reflection(false).with_cache_capacity(None);
    let cases = [(1u32, 3u64, r(1, 288)), (2, 5, r(19, 33177600))];
    for (n, m, want) in cases {
        let formula = small_odd_value(table.diff(n));
        let descended = descent.eval_unit(&dy(1, m)).map_err(|e| e.to_string())?;
        ensure(formula == want && descended == want, || {
            format!("f(1/2^{m}): formula {formula}, descent {descended}")
        })?;
    }
    ensure(small_odd_value(None) == r(1, 2), || "f(1/2)".into())
}

fn reflection_suite() -> Result<(), String> {
    let e = Evaluator::new();
    let m = 10;
    for j in 0..=(1u64 << m) {
        let a = e.eval_unit(&dy(j, m)).map_err(|e| e.to_string())?;
        let b = e.eval_unit(&dy((1 << m) - j, m)).map_err(|e| e.to_string())?;
        ensure(&a + &b == ExactRational::one(), || format!("j = {j}: {a} + {b}"))?;
    }
    Ok(())
}

fn path_independence() -> Result<(), String> {
    let e = Evaluator::new().with_reflection(false).with_cache_capacity(None);
    let m = 12;
    for j in 0..=(1u64 << m) {
        let d = dy(j, m);
        let direct = e.eval_unit(&d).map_err(|e| e.to_string())?;
        let reflected = e.eval_reflected(&d).map_err(|e| e.to_string())?;
        ensure(direct == reflected, || format!("{d}: {direct} vs {reflected}"))?;
    }
    Ok(())
}

fn identity_consistency() -> Result<(), String> {
    let report = verify_identities(&Evaluator::new(), 5, &unit_grid(4));
    ensure(report.pass, || format!("{:?}", report.failures))
}

fn oracle_brackets() -> Result<(), String> {
    let e = Evaluator::new();
    let grid = unit_grid(4);
    let report = verify_oracle(&e, 20, &grid);
    ensure(report.pass && report.cases == 17, || format!("{:?}", report.failures))?;
    let limit = ExactRational::pow2(-18);
    for x in &grid {
        let (lo, hi) = bracket(x, 20).map_err(|e| e.to_string())?;
        let value = e.eval_unit(x).map_err(|e| e.to_string())?;
        ensure(lo <= value && value <= hi && &hi - &lo <= limit, || {
            format!("{x}: [{lo}, {hi}] vs {value}")
        })?;
    }
    Ok(())
}

fn integral_decomposition() -> Result<(), String> {
    let e = Evaluator::new();
    for j in 0..=512u64 {
        // X = j/64, 2X = 2M + r, r/2 = X - M
        let x = dy(j, 6);
        let whole = j / 64;
        let half_r = dy(j % 64, 6);
        let sign = if thue_morse(whole) == 1 { -1 } else { 1 };
        let rhs = ExactRational::from_integer(thue_morse_prefix_sum(whole))
            + ExactRational::from(sign) * e.eval_extended(&half_r);
        let lhs = e.eval_extended(&x);
        ensure(lhs == rhs, || format!("X = {x}: {lhs} vs {rhs}"))?;
    }
    Ok(())
}

fn smoothness_bound() -> Result<(), String> {
    let e = Evaluator::new();
    let h = ExactRational::pow2(-8);
    let bound = (&h * &h * r(64, 6)).abs();
    let two_h = h.scale_pow2(1);
    for j in 1..64u64 {
        let x = dy(j, 6).to_rational();
        let up = DyadicRational::try_from(&(&x + &h)).unwrap();
        let down = DyadicRational::try_from(&(&x - &h)).unwrap();
        let double = DyadicRational::try_from(&x.scale_pow2(1)).unwrap();
        let slope = (e.eval_unit(&up).unwrap() - e.eval_unit(&down).unwrap())
            .checked_div(&two_h)
            .unwrap();
        let gap = (slope - e.eval_extended(&double).scale_pow2(1)).abs();
        ensure(gap <= bound, || format!("x = {x}: gap {gap} > {bound}"))?;
    }
    Ok(())
}

fn scale_tables() -> Result<(), String> {
    let table = IdentityTable::with_max_n(25);
    ensure(table.max_n() == 25, || "table size".into())
}

fn scale_values() -> Result<(), String> {
    let e = Evaluator::new();
    let values: Vec<_> = e.values_at_denominator(10).into_iter().map(|v| v.value).collect();
    ensure(values.len() == 1025, || "row count".into())?;
    for j in 0..=1024usize {
        ensure(&values[j] + &values[1024 - j] == ExactRational::one(), || format!("j = {j}"))?;
    }
    ensure(values.windows(2).all(|w| w[0] < w[1]), || "not increasing".into())
}

#[test]
fn acceptance_criteria() {
    let secs = Duration::from_secs;
    let outcomes = vec![
        run(1, "golden values", Some(secs(1)), golden_values),
        run(2, "golden polynomials", Some(secs(1)), golden_polynomials),
        run(3, "small-value constants", None, small_value_constants),
        run(4, "reflection suite j/2^10", Some(secs(5)), reflection_suite),
        run(5, "path independence j/2^12", Some(secs(60)), path_independence),
        run(6, "identity consistency n<=5, x=j/16", None, identity_consistency),
        run(7, "oracle brackets N=20, x=j/16", Some(secs(60)), oracle_brackets),
        run(8, "integral decomposition X=j/64<=8", None, integral_decomposition),
        run(9, "smoothness bound h=2^-8", None, smoothness_bound),
        run(10, "scale: identity tables to n=25", Some(secs(10)), scale_tables),
        run(10, "scale: f(j/1024) with reflection", Some(secs(10)), scale_values),
    ];
    let failed: Vec<_> = outcomes.iter().filter(|o| o.result.is_err()).collect();
    let total: Duration = outcomes.iter().map(|o| o.elapsed).sum();
    println!("{} of {} criteria passed in {:.3}s", outcomes.len() - failed.len(), outcomes.len(), total.as_secs_f64());
    assert!(
        failed.is_empty(),
        "failed: {:?}",
        failed.iter().map(|o| (o.id, o.name)).collect::<Vec<_>>()
    );
}
