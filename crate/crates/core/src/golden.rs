//! Published reference values: `f(j/2^m)` for `m <= 5` and the coefficient
//! lists of `S_n`, `D_n` for `n <= 5`.

/// `(j, m, numerator, denominator)` with `f(j/2^m) = numerator/denominator`.
pub const GOLDEN_VALUES: [(u64, u64, i64, i64); 31] = [
    (1, 1, 1, 2),
    (1, 2, 5, 72),
    (3, 2, 67, 72),
    (1, 3, 1, 288),
    (3, 3, 73, 288),
    (5, 3, 215, 288),
    (7, 3, 287, 288),
    (1, 4, 143, 2073600),
    (3, 4, 46657, 2073600),
    (5, 4, 305857, 2073600),
    (7, 4, 777743, 2073600),
    (9, 4, 1295857, 2073600),
    (11, 4, 1767743, 2073600),
    (13, 4, 2026943, 2073600),
    (15, 4, 2073457, 2073600),
    (1, 5, 19, 33177600),
    (3, 5, 25219, 33177600),
    (5, 5, 334781, 33177600),
    (7, 5, 1396781, 33177600),
    (9, 5, 3470381, 33177600),
    (11, 5, 6555581, 33177600),
    (13, 5, 10393219, 33177600),
    (15, 5, 14515219, 33177600),
    (17, 5, 18662381, 33177600),
    (19, 5, 22784381, 33177600),
    (21, 5, 26622019, 33177600),
    (23, 5, 29707219, 33177600),
    (25, 5, 31780819, 33177600),
    (27, 5, 32842819, 33177600),
    (29, 5, 33152381, 33177600),
    (31, 5, 33177581, 33177600),
];

/// Sum identities `S_1..S_5`: `(sigma, coefficients of x^0, x^2, ...)`.
pub const GOLDEN_SUM: [(u64, &[(i64, i64)]); 5] = [
    (1, &[(2, 1)]),
    (5, &[(2, 9), (2, 1)]),
    (13, &[(19, 2025), (2, 9), (1, 3)]),
    (25, &[(583, 2679075), (19, 2025), (1, 27), (1, 45)]),
    (41, &[(132809, 40989847500), (583, 2679075), (19, 12150), (1, 405), (1, 1260)]),
];

/// Difference identities `D_1..D_5`: `(sigma, coefficients of x^1, x^3, ...)`.
pub const GOLDEN_DIFF: [(u64, &[(i64, i64)]); 5] = [
    (2, &[(2, 1)]),
    (8, &[(2, 9), (2, 3)]),
    (18, &[(19, 2025), (2, 27), (1, 15)]),
    (32, &[(583, 2679075), (19, 6075), (1, 135), (1, 315)]),
    (50, &[(132809, 40989847500), (583, 8037225), (19, 60750), (1, 2835), (1, 11340)]),
];
