//! Integer routines behind the factoring pipeline: gcd, modular
//! exponentiation, order finding, factor extraction from a period candidate,
//! and the built-in catalog of benchmark moduli N = 3 * (2^e + 1).

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest modulus for which `multiplicative_order` falls back to the naive
/// multiply-until-one loop.
const BRUTE_FORCE_LIMIT: u64 = 1 << 20;

/// Greatest common divisor. Errors if both arguments are zero.
pub fn gcd(a: &BigUint, b: &BigUint) -> Result<BigUint> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::Domain("gcd(0, 0) is undefined".into()));
    }
    Ok(a.gcd(b))
}

/// `base^exponent mod modulus` for modulus >= 2.
///
/// Arguments that all fit in u64 take a machine-word square-and-multiply
/// path; arbitrary-precision `modpow` handles everything else.
pub fn mod_pow(base: &BigUint, exponent: &BigUint, modulus: &BigUint) -> Result<BigUint> {
    if *modulus < BigUint::from(2u32) {
        return Err(Error::Domain(format!(
            "mod_pow requires modulus >= 2, got {modulus}"
        )));
    }
    if let (Some(b), Some(e), Some(m)) = (base.to_u64(), exponent.to_u64(), modulus.to_u64()) {
        return Ok(BigUint::from(mod_pow_u64(b, e, m)));
    }
    Ok(base.modpow(exponent, modulus))
}

fn mod_pow_u64(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut result = 1u128;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    result as u64
}

/// `Some(i)` when `m == 2^i`, `None` for any other positive integer.
pub fn pow2_exponent(m: &BigUint) -> Result<Option<u64>> {
    if m.is_zero() {
        return Err(Error::Domain("pow2_exponent(0) is undefined".into()));
    }
    if m.count_ones() == 1 {
        Ok(m.trailing_zeros())
    } else {
        Ok(None)
    }
}

/// Multiplicative order of `a` modulo `n`: the least `d >= 1` with
/// `a^d = 1 (mod n)`.
///
/// Two strategies are supported: a naive loop for small `n`, and a
/// divisor scan for moduli of the benchmark form `n = 3 * (2^e + 1)`,
/// where the order of 2 always divides `2e`. Inputs matching neither
/// strategy are rejected rather than risking an unbounded search.
pub fn multiplicative_order(a: &BigUint, n: &BigUint) -> Result<BigUint> {
    let two = BigUint::from(2u32);
    if *n < two {
        return Err(Error::Domain(format!(
            "multiplicative_order requires n >= 2, got {n}"
        )));
    }
    let a = a % n;
    if gcd(&a, n)? != BigUint::one() {
        return Err(Error::Domain(format!(
            "multiplicative_order requires gcd(a, n) = 1, got a = {a}, n = {n}"
        )));
    }

    if let Some(small) = n.to_u64_digits().first().filter(|_| n.bits() <= 63) {
        if *small < BRUTE_FORCE_LIMIT {
            let mut acc = a.clone();
            let mut d = 1u64;
            while !acc.is_one() {
                acc = &acc * &a % n;
                d += 1;
            }
            return Ok(BigUint::from(d));
        }
    }

    // Structured form: n = 3q with q = 2^e + 1 and gcd(q, 3) = 1. Then
    // 2^e = -1 both mod 3 and mod q, so ord(2, n) divides 2e; the smallest
    // divisor d of 2e with a^d = 1 is the order. No divisor hitting 1 means
    // the order does not divide 2e and this strategy cannot conclude.
    let three = BigUint::from(3u32);
    if (n % &three).is_zero() {
        let q = n / &three;
        let q_minus_1 = &q - BigUint::one();
        if !q_minus_1.is_zero() && q_minus_1.count_ones() == 1 {
            let e = q_minus_1.trailing_zeros().unwrap();
            for d in sorted_divisors(2 * e) {
                if mod_pow(&a, &BigUint::from(d), n)?.is_one() {
                    return Ok(BigUint::from(d));
                }
            }
        }
    }

    Err(Error::Domain(format!(
        "no supported order-finding strategy for n = {n} (not small, not of the form 3 * (2^e + 1))"
    )))
}

/// Divisors of `m` in ascending order, via trial-division factoring.
fn sorted_divisors(m: u64) -> Vec<u64> {
    let mut rest = m;
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut mult = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                mult += 1;
            }
            factors.push((p, mult));
        }
        p += 1;
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    let mut divisors = vec![1u64];
    for (p, mult) in factors {
        let prev = divisors.clone();
        let mut power = 1u64;
        for _ in 0..mult {
            power *= p;
            divisors.extend(prev.iter().map(|d| d * power));
        }
    }
    divisors.sort_unstable();
    divisors
}

/// A nontrivial factorization `n = p * q` with `1 < p <= q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorPair {
    pub p: BigUint,
    pub q: BigUint,
}

impl FactorPair {
    /// Orders the two divisors so `p <= q`.
    pub fn ordered(d1: BigUint, d2: BigUint) -> Self {
        if d1 <= d2 {
            FactorPair { p: d1, q: d2 }
        } else {
            FactorPair { p: d2, q: d1 }
        }
    }
}

/// Tries to split `n` using a period candidate `r` for the order of `a`.
///
/// Odd `r` cannot be used and yields `None`. For even `r` this computes
/// `h = a^(r/2) mod n` and inspects `gcd(h - 1, n)` then `gcd(h + 1, n)`;
/// the first nontrivial divisor wins and is completed to a full pair.
/// Assumes `gcd(a, n) = 1`.
pub fn extract_factors(a: &BigUint, r: u64, n: &BigUint) -> Result<Option<FactorPair>> {
    if r == 0 {
        return Err(Error::Domain("extract_factors requires r >= 1".into()));
    }
    if *n < BigUint::from(3u32) {
        return Err(Error::Domain(format!(
            "extract_factors requires n >= 3, got {n}"
        )));
    }
    if r % 2 == 1 {
        return Ok(None);
    }
    let h = mod_pow(a, &BigUint::from(r / 2), n)?;
    let candidates = [&h - BigUint::one(), &h + BigUint::one()];
    for c in candidates {
        if c.is_zero() {
            continue;
        }
        let g = gcd(&c, n)?;
        if g > BigUint::one() && g < *n {
            let other = n / &g;
            return Ok(Some(FactorPair::ordered(g, other)));
        }
    }
    Ok(None)
}

/// One benchmark modulus `n = 3 * (2^e + 1)` with its precomputed run
/// parameters.
#[derive(Debug, Clone)]
pub struct FactoringCase {
    /// 1-based position in the catalog.
    pub index: u32,
    /// Exponent in `q = 2^e + 1`.
    pub e: u32,
    pub n: BigUint,
    pub p: BigUint,
    pub q: BigUint,
    /// Counting-register width for the shortcut-based method.
    pub k_proposed: usize,
    /// Counting-register width for the swap-cascade baseline (2e).
    pub k_sota: usize,
    /// True multiplicative order of 2 modulo n (always 2e here).
    pub expected_r: u64,
    /// Bit length of n.
    pub bits_of_n: u64,
    /// Bits needed to label distinct work-register values (2e).
    pub label_bits: u64,
}

/// Counting-register widths for the shortcut method, one per catalog case.
const K_PROPOSED: [usize; 12] = [4, 8, 12, 12, 12, 12, 12, 12, 12, 12, 12, 13];

/// The twelve benchmark cases, e = 2, 4, 8, ..., 4096.
pub fn case_catalog() -> Vec<FactoringCase> {
    (0..12u32)
        .map(|i| {
            let e = 2u32 << i;
            let q = (BigUint::one() << e) + BigUint::one();
            let p = BigUint::from(3u32);
            let n = &p * &q;
            FactoringCase {
                index: i + 1,
                e,
                bits_of_n: n.bits(),
                n,
                p,
                q,
                k_proposed: K_PROPOSED[i as usize],
                k_sota: 2 * e as usize,
                expected_r: 2 * e as u64,
                label_bits: 2 * e as u64,
            }
        })
        .collect()
}

/// Finds the catalog case with modulus `n`, if any.
pub fn catalog_lookup(n: &BigUint) -> Option<FactoringCase> {
    case_catalog().into_iter().find(|c| c.n == *n)
}

/// Serializes cases as a JSON array, every numeric field rendered as a
/// decimal string so arbitrary-precision values survive any JSON reader.
pub fn catalog_to_json(cases: &[FactoringCase]) -> String {
    let arr: Vec<serde_json::Value> = cases
        .iter()
        .map(|c| {
            serde_json::json!({
                "index": c.index.to_string(),
                "e": c.e.to_string(),
                "n": c.n.to_string(),
                "p": c.p.to_string(),
                "q": c.q.to_string(),
                "k_proposed": c.k_proposed.to_string(),
                "k_sota": c.k_sota.to_string(),
                "expected_r": c.expected_r.to_string(),
                "bits_of_n": c.bits_of_n.to_string(),
                "label_bits": c.label_bits.to_string(),
            })
        })
        .collect();
    serde_json::to_string_pretty(&serde_json::Value::Array(arr)).expect("static structure")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn gcd_known_values() {
        assert_eq!(gcd(&big(3), &big(15)).unwrap(), big(3));
        assert_eq!(gcd(&big(255), &big(771)).unwrap(), big(3));
        assert_eq!(gcd(&big(257), &big(771)).unwrap(), big(257));
        assert_eq!(gcd(&big(0), &big(5)).unwrap(), big(5));
        assert_eq!(gcd(&big(5), &big(0)).unwrap(), big(5));
        assert!(gcd(&big(0), &big(0)).is_err());
    }

    #[test]
    fn mod_pow_known_values() {
        assert_eq!(mod_pow(&big(2), &big(4), &big(15)).unwrap(), big(1));
        assert_eq!(mod_pow(&big(2), &big(2), &big(15)).unwrap(), big(4));
        // Powers of 2 mod 771 wrap to 1 at exponent 16.
        assert_eq!(mod_pow(&big(2), &big(10), &big(771)).unwrap(), big(253));
        assert_eq!(mod_pow(&big(2), &big(12), &big(771)).unwrap(), big(241));
        assert_eq!(mod_pow(&big(2), &big(15), &big(771)).unwrap(), big(386));
        assert_eq!(mod_pow(&big(2), &big(16), &big(771)).unwrap(), big(1));
        assert_eq!(mod_pow(&big(7), &big(0), &big(10)).unwrap(), big(1));
    }

    #[test]
    fn mod_pow_rejects_tiny_modulus() {
        assert!(mod_pow(&big(2), &big(3), &big(1)).is_err());
        assert!(mod_pow(&big(2), &big(3), &big(0)).is_err());
    }

    #[test]
    fn pow2_exponent_known_values() {
        assert_eq!(pow2_exponent(&big(1)).unwrap(), Some(0));
        assert_eq!(pow2_exponent(&big(2)).unwrap(), Some(1));
        assert_eq!(pow2_exponent(&big(256)).unwrap(), Some(8));
        assert_eq!(pow2_exponent(&big(6)).unwrap(), None);
        assert_eq!(pow2_exponent(&big(255)).unwrap(), None);
        assert!(pow2_exponent(&big(0)).is_err());
    }

    proptest! {
        #[test]
        fn word_size_mod_pow_matches_arbitrary_precision(
            b in 0u64..=u64::MAX,
            e in 0u64..=u64::MAX,
            m in 2u64..=u64::MAX,
        ) {
            // The u64 fast path and BigUint::modpow must be the same function.
            let got = mod_pow(&big(b), &big(e), &big(m)).unwrap();
            prop_assert_eq!(got, big(b).modpow(&big(e), &big(m)));
        }

        #[test]
        fn pow2_exponent_matches_popcount(m in 1u64..=u64::MAX) {
            let got = pow2_exponent(&big(m)).unwrap();
            if m.count_ones() == 1 {
                prop_assert_eq!(got, Some(m.trailing_zeros() as u64));
            } else {
                prop_assert_eq!(got, None);
            }
        }

        #[test]
        fn gcd_divides_both(a in 0u64..5000, b in 1u64..5000) {
            let g = gcd(&big(a), &big(b)).unwrap();
            prop_assert!((big(a) % &g).is_zero());
            prop_assert!((big(b) % &g).is_zero());
        }
    }

    #[test]
    fn order_known_values() {
        assert_eq!(multiplicative_order(&big(2), &big(15)).unwrap(), big(4));
        assert_eq!(multiplicative_order(&big(2), &big(51)).unwrap(), big(8));
        assert_eq!(multiplicative_order(&big(2), &big(771)).unwrap(), big(16));
        assert_eq!(multiplicative_order(&big(4), &big(15)).unwrap(), big(2));
        assert_eq!(multiplicative_order(&big(2), &big(9)).unwrap(), big(6));
        assert_eq!(multiplicative_order(&big(1), &big(7)).unwrap(), big(1));
    }

    #[test]
    fn order_rejects_shared_factor() {
        assert!(multiplicative_order(&big(2), &big(12)).is_err());
        assert!(multiplicative_order(&big(3), &big(15)).is_err());
    }

    #[test]
    fn order_on_large_structured_modulus() {
        // e = 64 case: n = 3 * (2^64 + 1), order of 2 is 2e = 128.
        let n: BigUint = "55340232221128654851".parse().unwrap();
        assert_eq!(multiplicative_order(&big(2), &n).unwrap(), big(128));
    }

    #[test]
    fn order_rejects_unstructured_large_modulus() {
        // Large prime-ish modulus with no supported structure.
        let n = (BigUint::one() << 90u32) + big(7);
        assert!(multiplicative_order(&big(2), &n).is_err());
    }

    proptest! {
        #[test]
        fn order_is_minimal_exponent(n in 3u64..600, a in 2u64..600) {
            let n_big = big(n);
            let a_big = big(a % n);
            prop_assume!(a % n >= 1);
            prop_assume!(gcd(&a_big, &n_big).unwrap().is_one());
            let d = multiplicative_order(&a_big, &n_big).unwrap();
            prop_assert!(mod_pow(&a_big, &d, &n_big).unwrap().is_one());
            // No smaller exponent reaches 1.
            let mut acc = a_big.clone();
            let mut i = BigUint::one();
            while i < d {
                prop_assert!(!acc.is_one());
                acc = acc * &a_big % &n_big;
                i += BigUint::one();
            }
        }
    }

    #[test]
    fn sorted_divisors_small() {
        assert_eq!(sorted_divisors(1), vec![1]);
        assert_eq!(sorted_divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(sorted_divisors(8192), (0..=13).map(|i| 1u64 << i).collect::<Vec<_>>());
    }

    #[test]
    fn extract_factors_known_values() {
        let got = extract_factors(&big(2), 4, &big(15)).unwrap().unwrap();
        assert_eq!((got.p, got.q), (big(3), big(5)));

        // Even non-order candidates still split 15: 2^1 = 2, gcd(1, 15) = 1,
        // gcd(3, 15) = 3.
        let got = extract_factors(&big(2), 2, &big(15)).unwrap().unwrap();
        assert_eq!((got.p, got.q), (big(3), big(5)));

        let got = extract_factors(&big(2), 8, &big(51)).unwrap().unwrap();
        assert_eq!((got.p, got.q), (big(3), big(17)));

        let got = extract_factors(&big(2), 16, &big(771)).unwrap().unwrap();
        assert_eq!((got.p, got.q), (big(3), big(257)));
    }

    #[test]
    fn extract_factors_odd_candidate_is_none() {
        assert_eq!(extract_factors(&big(2), 3, &big(15)).unwrap(), None);
    }

    #[test]
    fn extract_factors_full_period_multiple_is_none() {
        // r = 8 is twice the order of 2 mod 15, so h = 1 and both gcds are
        // trivial.
        assert_eq!(extract_factors(&big(2), 8, &big(15)).unwrap(), None);
    }

    #[test]
    fn extract_factors_rejects_bad_inputs() {
        assert!(extract_factors(&big(2), 0, &big(15)).is_err());
        assert!(extract_factors(&big(2), 4, &big(2)).is_err());
    }

    #[test]
    fn extract_factors_orders_pair() {
        let pair = FactorPair::ordered(big(17), big(3));
        assert_eq!((pair.p, pair.q), (big(3), big(17)));
    }

    #[test]
    fn catalog_shape_and_small_cases() {
        let cat = case_catalog();
        assert_eq!(cat.len(), 12);

        let c1 = &cat[0];
        assert_eq!((c1.index, c1.e), (1, 2));
        assert_eq!(c1.n, big(15));
        assert_eq!((c1.p.clone(), c1.q.clone()), (big(3), big(5)));
        assert_eq!((c1.k_proposed, c1.k_sota), (4, 4));
        assert_eq!((c1.expected_r, c1.bits_of_n, c1.label_bits), (4, 4, 4));

        let c2 = &cat[1];
        assert_eq!(c2.n, big(51));
        assert_eq!((c2.k_proposed, c2.k_sota), (8, 8));

        let c3 = &cat[2];
        assert_eq!(c3.n, big(771));
        assert_eq!(c3.q, big(257));
        assert_eq!((c3.k_proposed, c3.k_sota), (12, 16));
        assert_eq!((c3.expected_r, c3.bits_of_n), (16, 10));
    }

    #[test]
    fn catalog_case_6_matches_published_value() {
        let cat = case_catalog();
        let c6 = &cat[5];
        assert_eq!(c6.e, 64);
        assert_eq!(c6.n.to_string(), "55340232221128654851");
        assert_eq!(c6.q.to_string(), "18446744073709551617");
    }

    #[test]
    fn catalog_invariants_hold_for_all_cases() {
        for c in case_catalog() {
            assert_eq!(c.n, &c.p * &c.q, "case {}", c.index);
            assert_eq!(c.q, (BigUint::one() << c.e) + BigUint::one());
            assert_eq!(c.bits_of_n, c.n.bits());
            assert_eq!(c.bits_of_n, c.e as u64 + 2);
            assert_eq!(c.k_sota, 2 * c.e as usize);
            assert_eq!(c.label_bits, 2 * c.e as u64);
            assert!(c.k_proposed <= c.k_sota);
        }
    }

    #[test]
    fn catalog_expected_r_is_true_order_everywhere() {
        for c in case_catalog() {
            let ord = multiplicative_order(&big(2), &c.n).unwrap();
            assert_eq!(ord, big(c.expected_r), "case {}", c.index);
        }
    }

    #[test]
    fn catalog_lookup_by_modulus() {
        assert_eq!(catalog_lookup(&big(771)).unwrap().index, 3);
        assert!(catalog_lookup(&big(21)).is_none());
    }

    #[test]
    fn catalog_json_uses_decimal_strings() {
        let json = catalog_to_json(&case_catalog());
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 12);
        assert_eq!(arr[2]["n"], serde_json::json!("771"));
        assert_eq!(arr[2]["k_sota"], serde_json::json!("16"));
        assert_eq!(arr[5]["n"], serde_json::json!("55340232221128654851"));
        // Strings everywhere, even for small fields.
        assert!(arr[0]["index"].is_string());
        assert!(arr[0]["bits_of_n"].is_string());
    }
}
