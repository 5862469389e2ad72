//! Verification suites producing serializable reports.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::evaluator::Evaluator;
use crate::golden::GOLDEN_VALUES;
use crate::number::{DyadicRational, ExactRational};
use crate::oracle::bracket;

/// Describes where the bracket oracle's values come from.
pub const ORACLE_PROVENANCE: &str = "brackets are exact CDF values of the truncated random series \
     sum_{n<=N} 2^-n U_n, built by repeated uniform convolution and independent of the identity tables";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub input: String,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub cases: usize,
    pub failures: Vec<Failure>,
    pub pass: bool,
}

impl VerificationReport {
    fn from_outcomes(suite: &str, outcomes: Vec<Option<Failure>>) -> Self {
        let cases = outcomes.len();
        let failures: Vec<Failure> = outcomes.into_iter().flatten().collect();
        Self { suite: suite.to_string(), cases, pass: failures.is_empty(), failures }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn check(input: String, expected: &ExactRational, got: &ExactRational) -> Option<Failure> {
    (expected != got).then(|| Failure { input, expected: expected.to_string(), got: got.to_string() })
}

/// Compares `eval_unit` with the 31 published values.
pub fn verify_golden(evaluator: &Evaluator) -> VerificationReport {
    verify_values(evaluator, &golden_cases(&GOLDEN_VALUES))
}

/// Converts `(j, m, numerator, denominator)` rows into exact pairs.
pub fn golden_cases(rows: &[(u64, u64, i64, i64)]) -> Vec<(DyadicRational, ExactRational)> {
    rows.iter()
        .map(|&(j, m, num, den)| (DyadicRational::new(j, m), ExactRational::ratio(num, den)))
        .collect()
}

/// Compares `eval_extended` with caller-supplied reference values.
pub fn verify_values(evaluator: &Evaluator, cases: &[(DyadicRational, ExactRational)]) -> VerificationReport {
    let outcomes = cases
        .iter()
        .map(|(d, expected)| {
            let got = evaluator.eval_extended(d);
            check(format!("f({})", d.to_rational()), expected, &got)
        })
        .collect();
    VerificationReport::from_outcomes("golden", outcomes)
}

/// `(1 ± x) / 2^shift` as dyadics.
fn mirrored_pair(x: &ExactRational, shift: u64) -> (DyadicRational, DyadicRational) {
    let one = ExactRational::one();
    let plus = (&one + x).scale_pow2(-(shift as i64));
    let minus = (&one - x).scale_pow2(-(shift as i64));
    (
        DyadicRational::try_from(&plus).expect("dyadic"),
        DyadicRational::try_from(&minus).expect("dyadic"),
    )
}

/// Checks every `S_n`, `D_n` with `n <= max_n` against evaluator values at
/// each sample point, plus the cross-identities
/// `D_n(1)/2^(2n²) = S_n(0)/2^(2n²-2n+2)` and `S_n(1)/2^(2n²-2n+1) = f(1/2^(2n-2))`.
pub fn verify_identities(evaluator: &Evaluator, max_n: u32, xs: &[DyadicRational]) -> VerificationReport {
    let table = evaluator.table_at_least(max_n).clone();
    let mut jobs: Vec<(u32, Option<&DyadicRational>)> = Vec::new();
    for n in 1..=max_n {
        jobs.push((n, None));
        jobs.extend(xs.iter().map(|x| (n, Some(x))));
    }
    let outcomes: Vec<Vec<Option<Failure>>> = jobs
        .par_iter()
        .map(|&(n, x)| {
            let s = table.sum(n).expect("level present");
            let d = table.diff(n).expect("level present");
            match x {
                None => {
                    let from_diff = d.at_one().scale_pow2(-(d.sigma as i64));
                    let from_sum = s.constant().scale_pow2(-(s.sigma as i64 + 1));
                    let power = DyadicRational::new(1u32, 2 * n as u64 - 2);
                    let at_power = evaluator.eval_unit(&power).expect("in range");
                    vec![
                        check(format!("D_{n}(1)/2^{} vs S_{n}(0)/2^{}", d.sigma, s.sigma + 1), &from_sum, &from_diff),
                        check(
                            format!("S_{n}(1)/2^{} vs f({power})", s.sigma),
                            &at_power,
                            &s.at_one().scale_pow2(-(s.sigma as i64)),
                        ),
                    ]
                }
                Some(x) => {
                    let xr = x.to_rational();
                    let (a, b) = mirrored_pair(&xr, 2 * n as u64 - 1);
                    let lhs = (evaluator.eval_unit(&a).expect("in range") + evaluator.eval_unit(&b).expect("in range"))
                        .scale_pow2(s.sigma as i64);
                    let sum_check = check(format!("S_{n}({x})"), &s.eval(&xr).expect("x in [0,1]"), &lhs);
                    let (a, b) = mirrored_pair(&xr, 2 * n as u64);
                    let lhs = (evaluator.eval_unit(&a).expect("in range") - evaluator.eval_unit(&b).expect("in range"))
                        .scale_pow2(d.sigma as i64);
                    let diff_check = check(format!("D_{n}({x})"), &d.eval(&xr).expect("x in [0,1]"), &lhs);
                    vec![sum_check, diff_check]
                }
            }
        })
        .collect();
    VerificationReport::from_outcomes("identities", outcomes.into_iter().flatten().collect())
}

/// Checks that the level-`n` CDF bracket encloses `eval_unit(x)` for each
/// `x`, and that its width is at most `2^(1-n)`.
pub fn verify_oracle(evaluator: &Evaluator, n: u32, xs: &[DyadicRational]) -> VerificationReport {
    let width_limit = ExactRational::pow2(1 - n as i64);
    let outcomes: Vec<Option<Failure>> = xs
        .par_iter()
        .map(|x| {
            let value = evaluator.eval_unit(x).expect("grid point in [0, 1]");
            let (lo, hi) = match bracket(x, n) {
                Ok(b) => b,
                Err(e) => {
                    return Some(Failure {
                        input: format!("bracket({x}, N={n})"),
                        expected: "a bracket".into(),
                        got: e.to_string(),
                    })
                }
            };
            let contains = lo <= value && value <= hi;
            let narrow = &hi - &lo <= width_limit;
            (!(contains && narrow)).then(|| Failure {
                input: format!("bracket({x}, N={n})"),
                expected: format!("{value} within width {width_limit}"),
                got: format!("[{lo}, {hi}]"),
            })
        })
        .collect();
    VerificationReport::from_outcomes("oracle", outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identity::IdentityTable;
    use crate::oracle::unit_grid;

    #[test]
    fn golden_passes_from_empty_table() {
        let e = Evaluator::with_table(IdentityTable::new());
        let report = verify_golden(&e);
        assert!(report.pass, "{:?}", report.failures);
        assert_eq!(report.cases, 31);
    }

    #[test]
    fn golden_detects_an_injected_error() {
        let mut rows = GOLDEN_VALUES;
        rows[9].2 += 1;
        let report = verify_values(&Evaluator::new(), &golden_cases(&rows));
        assert!(!report.pass);
        assert_eq!(report.failures.len(), 1);
        assert_eq!(report.failures[0].input, "f(5/16)");
        assert_eq!(report.failures[0].got, "305857/2073600");
    }

    #[test]
    fn identity_examples() {
        let e = Evaluator::new();
        let report = verify_identities(&e, 5, &unit_grid(4));
        assert!(report.pass, "{:?}", report.failures);
        assert_eq!(report.cases, 5 * (2 + 2 * 17));

        let report = verify_identities(&e, 1, &[DyadicRational::zero()]);
        assert!(report.pass);

        let half = DyadicRational::new(1u32, 1);
        let report = verify_identities(&e, 2, std::slice::from_ref(&half));
        assert!(report.pass);
        let s2 = e.table().sum(2).unwrap().eval(&half.to_rational()).unwrap();
        assert_eq!(s2, ExactRational::ratio(13, 18));
    }

    #[test]
    fn oracle_suite_small() {
        let report = verify_oracle(&Evaluator::new(), 8, &unit_grid(4));
        assert!(report.pass, "{:?}", report.failures);
        assert_eq!(report.cases, 17);
    }

    #[test]
    fn report_json_shape() {
        let report = VerificationReport {
            suite: "golden".into(),
            cases: 1,
            failures: vec![Failure { input: "f(1/2)".into(), expected: "1/2".into(), got: "1/3".into() }],
            pass: false,
        };
        assert_eq!(
            report.to_json(),
            r#"{"suite":"golden","cases":1,"failures":[{"input":"f(1/2)","expected":"1/2","got":"1/3"}],"pass":false}"#
        );
    }
}
