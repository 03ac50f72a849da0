//! Acceptance gate: one test per shipping criterion. Each test asserts
//! the mathematical outcome and, where a budget applies, that the run
//! stayed inside it, so a pass line here is a pass on the criterion.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_traits::{ToPrimitive, Zero};

use common::SplitMix;
use cyclodens::engine::{
    brute_member, count_members, find_witness, is_member, solve_exponents, verify_witness,
    ExactOutcome, Limits,
};
use cyclodens::series::{cyclotomic_exact, cyclotomic_trunc, one_minus_pow, IntPoly, TruncSeries};
use cyclodens::{arith, BigInt, BigRational, BigUint};

fn ints(values: &[i64]) -> Vec<BigInt> {
    values.iter().map(|&v| BigInt::from(v)).collect()
}

/// The prescribed series `1 + n_1 x + ... + n_r x^r`.
fn target_series(seq: &[BigInt]) -> TruncSeries {
    let mut coeffs = Vec::with_capacity(seq.len() + 1);
    coeffs.push(BigInt::from(1));
    coeffs.extend_from_slice(seq);
    TruncSeries::from_coeffs(coeffs).unwrap()
}

/// `prod_i (1 - x^i)^{k_i}` truncated at the length of `k`.
fn power_product(exponents: &[BigInt], order: usize) -> TruncSeries {
    let mut acc = TruncSeries::one(order);
    for (idx, e) in exponents.iter().enumerate() {
        if !e.is_zero() {
            let factor = one_minus_pow(idx as u64 + 1, e, order).unwrap();
            acc = acc.mul(&factor).unwrap();
        }
    }
    acc
}

#[test]
fn acceptance_1_exponent_vectors_roundtrip_and_are_unique() {
    let start = Instant::now();
    let mut rng = SplitMix(0xacce_97ed_0000_0001);
    for _ in 0..1000 {
        let order = rng.below(7) as usize;
        let seq: Vec<BigInt> = (0..order).map(|_| BigInt::from(rng.coeff(9))).collect();
        let exponents = solve_exponents(&seq);
        let target = target_series(&seq);
        assert_eq!(power_product(&exponents, order), target, "roundtrip for {seq:?}");

        for position in 0..order {
            for delta in [1i64, -1] {
                let mut perturbed = exponents.clone();
                perturbed[position] += BigInt::from(delta);
                let product = power_product(&perturbed, order);
                for degree in 0..=position {
                    assert_eq!(
                        product.coeff(degree),
                        target.coeff(degree),
                        "perturbing k_{} must not reach degree {degree}",
                        position + 1
                    );
                }
                assert_ne!(
                    product.coeff(position + 1),
                    target.coeff(position + 1),
                    "perturbing k_{} must show at degree {}",
                    position + 1,
                    position + 1
                );
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
}

#[test]
fn acceptance_2_cyclotomic_products_reassemble_x_n_minus_one() {
    let start = Instant::now();
    for n in 1..=200u64 {
        let mut product = IntPoly::one();
        for d in 1..=n {
            if n % d == 0 {
                product = product.mul(&cyclotomic_exact(d).unwrap());
            }
        }
        assert_eq!(product, IntPoly::x_pow_minus_one(n).unwrap(), "n = {n}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
}

/// Truncation of the sign-normalized exact cyclotomic of `d`.
fn normalized_truncation(d: u64, order: usize) -> TruncSeries {
    let truncated = cyclotomic_exact(d).unwrap().truncated(order);
    if arith::delta(d).unwrap() == 1 {
        return truncated;
    }
    let negated: Vec<BigInt> = truncated.coeffs().iter().map(|c| -c).collect();
    TruncSeries::from_coeffs(negated).unwrap()
}

#[test]
fn acceptance_3_truncations_ignore_large_prime_decorations() {
    let start = Instant::now();
    let primes: Vec<u64> = (2..=50).filter(|&p| arith::is_prime(p)).collect();

    // Replacing the large prime pair never changes the truncation, for any
    // exponent pattern.
    for order in 0..=6usize {
        for d in 1..=6u64 {
            let pool: Vec<u64> = primes
                .iter()
                .copied()
                .filter(|&p| p > order as u64 && d % p != 0)
                .collect();
            for e1 in 1..=2u32 {
                for e2 in 1..=2u32 {
                    let mut reference: Option<TruncSeries> = None;
                    for &p1 in &pool {
                        for &p2 in &pool {
                            if p1 == p2 {
                                continue;
                            }
                            let ct = cyclotomic_trunc(d * p1.pow(e1) * p2.pow(e2), order).unwrap();
                            match &reference {
                                None => reference = Some(ct),
                                Some(first) => assert_eq!(
                                    &ct, first,
                                    "d={d} order={order} e=({e1},{e2}) primes=({p1},{p2})"
                                ),
                            }
                        }
                    }
                }
            }
        }
    }

    // Decorating with one squarefree pair collapses to the normalized
    // cyclotomic of the bare index.
    for order in 1..=6usize {
        for d in 1..=order as u64 {
            let expected = normalized_truncation(d, order);
            let pool: Vec<u64> = primes.iter().copied().filter(|&p| p > order as u64).collect();
            for &p1 in &pool {
                for &p2 in &pool {
                    if p1 == p2 {
                        continue;
                    }
                    let ct = cyclotomic_trunc(d * p1 * p2, order).unwrap();
                    assert_eq!(ct, expected, "d={d} order={order} primes=({p1},{p2})");
                }
            }
        }
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
}

#[test]
fn acceptance_4_fast_oracle_matches_brute_force() {
    let start = Instant::now();
    let limits = Limits::default();

    let mut battery: Vec<Vec<BigInt>> = vec![Vec::new()];
    for a in -2..=2i64 {
        battery.push(ints(&[a]));
    }
    for a in -2..=2i64 {
        for b in -2..=2i64 {
            battery.push(ints(&[a, b]));
        }
    }
    let mut rng = SplitMix(0xacce_97ed_0000_0004);
    for _ in 0..50 {
        battery.push((0..3).map(|_| BigInt::from(rng.coeff(1))).collect());
    }
    assert_eq!(battery.len(), 81);

    let mut pairs = 0u64;
    for seq in &battery {
        for n in 1..=60u64 {
            let fast = is_member(&BigUint::from(n), seq, &limits).unwrap();
            let brute = brute_member(n, seq, &limits).unwrap();
            assert_eq!(
                fast.member, brute.member,
                "oracles disagree at n = {n}, seq = {seq:?}"
            );
            pairs += 1;
        }
    }
    assert_eq!(pairs, 4860);

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
}

#[test]
fn acceptance_5_witnesses_verify_and_have_the_advertised_shape() {
    let start = Instant::now();
    let limits = Limits::default();
    let mut rng = SplitMix(0xacce_97ed_0000_0005);
    let mut exact_passes = 0usize;

    for _ in 0..200 {
        let order = rng.below(5) as usize;
        let seq: Vec<BigInt> = (0..order).map(|_| BigInt::from(rng.coeff(3))).collect();

        let certificate = find_witness(&seq, &limits).unwrap();
        let report = verify_witness(&certificate, &seq, &limits, true).unwrap();
        assert!(
            report.valid(),
            "witness for {seq:?} has defects {:?}",
            report.defects
        );
        match report.exact {
            ExactOutcome::Passed => exact_passes += 1,
            ExactOutcome::Skipped => {}
            other => panic!("exact check came back {other:?} for {seq:?}"),
        }

        let decision = is_member(&certificate.n, &seq, &limits).unwrap();
        assert!(
            decision.member,
            "witness n = {} rejected for {seq:?}",
            certificate.n
        );

        // n must be the modulus times pairwise distinct primes above the
        // truncation order.
        let mut seen = BTreeSet::new();
        let mut product = BigUint::from(1u32);
        for group in &certificate.groups {
            for label in &group.labels {
                let small = label.to_u64().expect("witness labels stay machine sized");
                for (p, e) in arith::factor(small).unwrap() {
                    assert_eq!(e, 1, "label {small} is not squarefree");
                    assert!(p > order as u64, "label prime {p} too small");
                    assert!(seen.insert(p), "label prime {p} reused");
                    product *= BigUint::from(p);
                }
            }
        }
        assert_eq!(
            certificate.n,
            certificate.modulus.clone() * product,
            "n is not modulus times fresh primes for {seq:?}"
        );
    }
    assert!(exact_passes > 0, "the exact check never ran");

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
}

fn has_odd_prime_factor(n: u64) -> bool {
    let mut m = n;
    while m % 2 == 0 {
        m /= 2;
    }
    m > 1
}

#[test]
fn acceptance_6_exact_counts_match_structural_predictions() {
    let start = Instant::now();
    let limits = Limits::default();
    let seq_01 = ints(&[0, 1]);
    let seq_1 = ints(&[1]);

    // Structural certificates fix the small-scale ground truth: {4} covers
    // multiples of 4, {p, 2p} covers even n with an odd prime factor, and
    // {p} covers any n with a prime factor at all.
    for n in 1..=200u64 {
        let brute = brute_member(n, &seq_01, &limits).unwrap().member;
        let structural = n % 4 == 0 || (n % 2 == 0 && has_odd_prime_factor(n));
        assert_eq!(brute, structural, "[0,1] disagrees at n = {n}");

        let brute = brute_member(n, &seq_1, &limits).unwrap().member;
        assert_eq!(brute, n >= 2, "[1] disagrees at n = {n}");
    }

    let rows = count_members(&seq_01, 10_000, &[10_000], &limits).unwrap();
    assert_eq!(rows[0].members, 4999);
    let rows = count_members(&seq_1, 10_000, &[10_000], &limits).unwrap();
    assert_eq!(rows[0].members, 9999);

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
}

/// Members of the [2,1] class, in closed form: writing n = 2^j * m with m
/// odd, n belongs exactly when j >= 2 and m > 1, or j = 1 and m has at
/// least two distinct prime factors. Certificates: {2, p, 4p} for the
/// first shape, {2, 2pq} for the second; the excluded 2^j and 2*(prime
/// power) cases cannot pay for the two degree-2 contributions the target
/// needs.
fn in_class_2_1(n: u64) -> bool {
    if n % 2 != 0 {
        return false;
    }
    let mut m = n;
    let mut twos = 0;
    while m % 2 == 0 {
        twos += 1;
        m /= 2;
    }
    if twos >= 2 {
        return m > 1;
    }
    let mut distinct = 0;
    let mut p = 3;
    while p * p <= m {
        if m % p == 0 {
            distinct += 1;
            while m % p == 0 {
                m /= p;
            }
        }
        p += 2;
    }
    if m > 1 {
        distinct += 1;
    }
    distinct >= 2
}

#[test]
fn acceptance_7_densities_approach_their_limits_from_below() {
    let start = Instant::now();
    let limits = Limits::default();
    let low = BigRational::new(BigInt::from(95), BigInt::from(100));
    let one = BigRational::from_integer(BigInt::from(1));

    // Upper bound at every checkpoint, for every sequence.
    let cases: &[(&[i64], u64)] = &[(&[0, 1], 2), (&[0, 0, 1], 3), (&[2, 1], 2)];
    let mut tables = Vec::new();
    for &(raw, modulus) in cases {
        let seq = ints(raw);
        let rows = count_members(&seq, 10_000, &[100, 1_000, 10_000], &limits).unwrap();
        for row in &rows {
            assert!(
                row.members <= row.bound,
                "count exceeds the ceiling at x = {} for {raw:?}",
                row.x
            );
            assert_eq!(row.bound, row.x / modulus);
        }
        tables.push(rows);
    }

    // [0,1] and [0,0,1] exclude only a vanishing set beyond the modulus
    // filter, so their ratios are already within 5% of the density here.
    for table in &tables[..2] {
        let ratio = &table.last().unwrap().ratio;
        assert!(
            *ratio >= low && *ratio <= one,
            "ratio {ratio} left [0.95, 1] too early"
        );
    }

    // [2,1] converges only logarithmically: the even numbers 2^j and
    // 2*(prime power) all fall outside the class, which keeps the ratio
    // near 0.86 at this scale. The sharper statement available at desk
    // scale is the exact count, pinned by the closed form (itself checked
    // against the exhaustive oracle below).
    for n in 1..=200u64 {
        let brute = brute_member(n, &ints(&[2, 1]), &limits).unwrap().member;
        assert_eq!(brute, in_class_2_1(n), "[2,1] closed form disagrees at n = {n}");
    }
    let counts: Vec<u64> = tables[2].iter().map(|row| row.members).collect();
    assert_eq!(counts, vec![26, 385, 4288]);
    let ratios: Vec<&BigRational> = tables[2].iter().map(|row| &row.ratio).collect();
    assert!(
        ratios.windows(2).all(|pair| pair[0] < pair[1]) && *ratios[2] <= one,
        "[2,1] ratios {ratios:?} fail to climb toward the density"
    );

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
}

fn invoke(raw: &[&str]) -> (String, i32) {
    let args: Vec<String> = raw.iter().map(|s| s.to_string()).collect();
    let mut out = Vec::new();
    let code = cyclodens_cli::run(&args, &mut out);
    (String::from_utf8(out).unwrap(), code)
}

#[test]
fn acceptance_8_cli_output_is_byte_stable_against_goldens() {
    let cases: &[(&[&str], &str)] = &[
        (
            &["exponents", "--seq", "2,1"],
            include_str!("golden/exponents_seq_2_1.txt"),
        ),
        (
            &["witness", "--seq", "0,1", "--format", "json"],
            include_str!("golden/witness_seq_0_1.json"),
        ),
        (
            &["count", "--seq", "0,1", "--limit", "1000", "--format", "csv"],
            include_str!("golden/count_seq_0_1_limit_1000.csv"),
        ),
    ];
    for (raw, golden) in cases {
        let (first_body, first_code) = invoke(raw);
        let (second_body, _) = invoke(raw);
        assert_eq!(first_code, 0, "nonzero exit for {raw:?}");
        assert_eq!(first_body, second_body, "two runs differ for {raw:?}");
        assert_eq!(first_body, *golden, "golden drift for {raw:?}");
    }
}
