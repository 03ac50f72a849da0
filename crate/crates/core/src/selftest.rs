//! Built-in consistency checks wired to the `selftest` subcommand.
//!
//! Each case is deterministic and quick; together they cross-check the
//! arithmetic layer, the series identities, both membership oracles, the
//! witness pipeline, and the counting ceiling.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith;
use crate::engine::{
    brute_member, count_members, find_witness, is_member, solve_exponents, verify_witness, Limits,
};
use crate::series::{cyclotomic_exact, cyclotomic_trunc, one_minus_pow, IntPoly, TruncSeries};

/// One named check with its outcome.
#[derive(Clone, Debug)]
pub struct SelfTestCase {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Runs every check and reports one case per suite.
pub fn run() -> Vec<SelfTestCase> {
    vec![
        mobius_divisor_sums(),
        cyclotomic_product_identity(),
        truncation_matches_exact(),
        exponent_roundtrip(),
        membership_oracles_agree(),
        witness_roundtrip(),
        counting_upper_bound(),
    ]
}

fn case(name: &'static str, passed: bool, detail: String) -> SelfTestCase {
    SelfTestCase {
        name,
        passed,
        detail,
    }
}

fn mobius_divisor_sums() -> SelfTestCase {
    for n in 1..=500u64 {
        let sum: i32 = arith::divisors(n)
            .unwrap()
            .into_iter()
            .map(|d| arith::mobius(d).unwrap())
            .sum();
        let expected = i32::from(n == 1);
        if sum != expected {
            return case(
                "mobius_divisor_sums",
                false,
                format!("sum over divisors of {n} came out {sum}, expected {expected}"),
            );
        }
    }
    case("mobius_divisor_sums", true, "500 cases".into())
}

fn cyclotomic_product_identity() -> SelfTestCase {
    for n in 1..=60u64 {
        let mut product = IntPoly::one();
        for d in arith::divisors(n).unwrap() {
            product = product.mul(&cyclotomic_exact(d).unwrap());
        }
        let expected = IntPoly::x_pow_minus_one(n).unwrap();
        if product != expected {
            return case(
                "cyclotomic_product_identity",
                false,
                format!("product over divisors of {n} is not x^{n} - 1"),
            );
        }
    }
    case("cyclotomic_product_identity", true, "n up to 60".into())
}

fn truncation_matches_exact() -> SelfTestCase {
    let order = 6;
    for n in 1..=60u64 {
        let truncated = cyclotomic_trunc(n, order).unwrap();
        let exact = cyclotomic_exact(n).unwrap();
        let delta = arith::delta(n).unwrap();
        let mut expected: Vec<BigInt> = exact.truncated(order).coeffs().to_vec();
        if delta < 0 {
            for c in &mut expected {
                *c = -(c.clone());
            }
        }
        if truncated.coeffs() != expected.as_slice() {
            return case(
                "truncation_matches_exact",
                false,
                format!("truncated cyclotomic at {n} disagrees with the exact polynomial"),
            );
        }
    }
    case("truncation_matches_exact", true, "n up to 60, order 6".into())
}

fn exponent_roundtrip() -> SelfTestCase {
    let mut rng = SplitMix(0x5eed_cafe_f00d_0001);
    for trial in 0..50 {
        let order = 1 + (rng.below(5) as usize);
        let seq: Vec<BigInt> = (0..order)
            .map(|_| BigInt::from(rng.below(11) as i64 - 5))
            .collect();
        let exponents = solve_exponents(&seq);
        let mut product = TruncSeries::one(order);
        for (i, e) in exponents.iter().enumerate() {
            if !e.is_zero() {
                let factor = one_minus_pow(i as u64 + 1, e, order).unwrap();
                product = product.mul(&factor).unwrap();
            }
        }
        let target = TruncSeries::from_initial_coeffs(&seq, order).unwrap();
        if product != target {
            return case(
                "exponent_roundtrip",
                false,
                format!("trial {trial}: exponents fail to reproduce {seq:?}"),
            );
        }
    }
    case("exponent_roundtrip", true, "50 random sequences".into())
}

fn membership_oracles_agree() -> SelfTestCase {
    let limits = Limits::default();
    for seq in [vec![0i64, 1], vec![2, 1], vec![-1, 0, 1]] {
        let seq: Vec<BigInt> = seq.into_iter().map(BigInt::from).collect();
        for n in 1..=30u64 {
            let fast = is_member(&n.into(), &seq, &limits).unwrap();
            let slow = brute_member(n, &seq, &limits).unwrap();
            if fast.member != slow.member {
                return case(
                    "membership_oracles_agree",
                    false,
                    format!("oracles split on n = {n}"),
                );
            }
        }
    }
    case("membership_oracles_agree", true, "3 sequences, n up to 30".into())
}

fn witness_roundtrip() -> SelfTestCase {
    let limits = Limits::default();
    for seq in [vec![0i64, 1], vec![2, 1], vec![-1], vec![1, 1]] {
        let seq: Vec<BigInt> = seq.into_iter().map(BigInt::from).collect();
        let cert = match find_witness(&seq, &limits) {
            Ok(cert) => cert,
            Err(e) => {
                return case(
                    "witness_roundtrip",
                    false,
                    format!("construction failed for {seq:?}: {e}"),
                )
            }
        };
        match verify_witness(&cert, &seq, &limits, true) {
            Ok(report) if report.valid() => {}
            Ok(report) => {
                return case(
                    "witness_roundtrip",
                    false,
                    format!("witness for {seq:?} judged invalid: {:?}", report.defects),
                )
            }
            Err(e) => {
                return case(
                    "witness_roundtrip",
                    false,
                    format!("verification failed for {seq:?}: {e}"),
                )
            }
        }
        match is_member(&cert.n, &seq, &limits) {
            Ok(result) if result.member => {}
            Ok(_) => {
                return case(
                    "witness_roundtrip",
                    false,
                    format!("constructed n = {} rejected for {seq:?}", cert.n),
                )
            }
            Err(e) => {
                return case(
                    "witness_roundtrip",
                    false,
                    format!("membership of witness failed for {seq:?}: {e}"),
                )
            }
        }
    }
    case("witness_roundtrip", true, "4 sequences".into())
}

fn counting_upper_bound() -> SelfTestCase {
    let limits = Limits::default();
    let seq: Vec<BigInt> = vec![BigInt::from(0), BigInt::from(1)];
    let rows = match count_members(&seq, 200, &[50, 100, 200], &limits) {
        Ok(rows) => rows,
        Err(e) => return case("counting_upper_bound", false, format!("sweep failed: {e}")),
    };
    let mut last = 0;
    for row in &rows {
        if row.members > row.bound {
            return case(
                "counting_upper_bound",
                false,
                format!("count {} above ceiling {} at x = {}", row.members, row.bound, row.x),
            );
        }
        if row.members < last {
            return case(
                "counting_upper_bound",
                false,
                format!("count decreased at x = {}", row.x),
            );
        }
        last = row.members;
    }
    case("counting_upper_bound", true, "3 checkpoints".into())
}

struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}
