//! Numeric side of the construction: choosing q, the absolute constant C,
//! the main and refined upper bounds on s_r(K_k), the failure-probability
//! bound of the random partition argument, and the quadratic threshold in q.
//!
//! Two indexings of k appear. Bounds on s_r(K_k) take the clique size k;
//! the packing argument works with P_r(k') = s_r(K_{k'+1}), so the
//! constructive path uses k' = k − 1 internally.

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative tolerance for the floating-point inequalities asserted here.
pub const REL_TOL: f64 = 1e-9;

/// c = (7 + 6 ln 2) / (3√2), the smallest constant for which q ≥ c·k·√r
/// forces q − 1 ≥ 2k(1 + ln r) at r = 2, k = 3.
pub fn constant_c() -> f64 {
    (7.0 + 6.0 * std::f64::consts::LN_2) / (3.0 * std::f64::consts::SQRT_2)
}

/// C = ⌈(2c)⁵⌉.
#[allow(non_snake_case)]
pub fn constant_C() -> u64 {
    (2.0 * constant_c()).powi(5).ceil() as u64
}

/// Deterministic Miller–Rabin for u64 inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut a: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Returns `(p, e)` with n = p^e and p prime, or `None`.
pub fn is_prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    // The smallest prime factor is at most n^(1/e) for e ≥ 2, so trial
    // division up to the cube root plus a square check covers everything.
    let mut d = 2u64;
    while d.saturating_mul(d).saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut m = n;
            let mut e = 0;
            while m.is_multiple_of(d) {
                m /= d;
                e += 1;
            }
            return (m == 1).then_some((d, e));
        }
        d += 1;
    }
    if is_prime(n) {
        return Some((n, 1));
    }
    let root = integer_sqrt(n);
    if root * root == n && is_prime(root) {
        return Some((root, 2));
    }
    None
}

fn integer_sqrt(n: u64) -> u64 {
    let mut x = (n as f64).sqrt() as u64;
    while x.saturating_mul(x) > n {
        x -= 1;
    }
    while (x + 1).saturating_mul(x + 1) <= n {
        x += 1;
    }
    x
}

fn at_least(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs - REL_TOL * rhs.abs().max(1.0)
}

/// The prime power chosen for given r and k (packing index), with the
/// inequalities the choice must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QChoice {
    pub q: u64,
    pub p: u64,
    pub e: u32,
    /// c·k·√r, the lower limit q was scanned from.
    pub target: f64,
}

/// Smallest prime power q ≥ c·k·√r, asserting q² − 1 ≥ 2rk·ln k,
/// q − 1 ≥ 2k(1 + ln r) and q ≤ 2ck√r.
///
/// `k` is the packing index (cliques K_k inside K_{k+1}-free graphs). The
/// scan is explicit; the upper limit is checked, not assumed.
pub fn choose_q(r: u64, k: u64) -> Result<QChoice> {
    if r < 2 || k < 3 {
        return Err(Error::InvalidArgument(format!("choose_q needs r ≥ 2 and k ≥ 3, got r = {r}, k = {k}")));
    }
    let (rf, kf) = (r as f64, k as f64);
    let target = constant_c() * kf * rf.sqrt();
    let mut q = target.ceil() as u64;
    let (p, e) = loop {
        if let Some(pe) = is_prime_power(q) {
            break pe;
        }
        q += 1;
    };
    let qf = q as f64;
    let s_needed = 2.0 * rf * kf * kf.ln();
    if !at_least(qf * qf - 1.0, s_needed) {
        return Err(Error::AssertionFailure(format!("q² − 1 = {} < 2rk ln k = {s_needed}", qf * qf - 1.0)));
    }
    let t_needed = 2.0 * kf * (1.0 + rf.ln());
    if !at_least(qf - 1.0, t_needed) {
        return Err(Error::AssertionFailure(format!("q − 1 = {} < 2k(1 + ln r) = {t_needed}", qf - 1.0)));
    }
    if !at_least(2.0 * target, qf) {
        return Err(Error::AssertionFailure(format!("q = {q} > 2ck√r = {}", 2.0 * target)));
    }
    Ok(QChoice { q, p, e, target })
}

/// Natural log of the failure bound:
/// |P|·((1 + ln r)/r + (t+1)/(s+1)·ln k − (t+1)/(rk)).
pub fn failure_bound_exponent(s: u64, t: u64, r: u64, k: u64, num_points: u64) -> f64 {
    let (s1, t1, rf, kf) = ((s + 1) as f64, (t + 1) as f64, r as f64, k as f64);
    let per_point = (1.0 + rf.ln()) / rf + t1 / s1 * kf.ln() - t1 / (rf * kf);
    num_points as f64 * per_point
}

/// Upper bound on the probability that some ⌊|P|/r⌋-set of one colour class
/// contains no K_k, for random equitable partitions of PLS lines of order
/// (s, t). Returns a value in [0, ∞]; overflow saturates to +∞.
pub fn estimate_failure_bound(s: u64, t: u64, r: u64, k: u64, num_points: u64) -> f64 {
    failure_bound_exponent(s, t, r, k, num_points).exp().max(0.0)
}

/// Formula value and constructive value for s_r(K_k).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MainBound {
    /// C·(k−1)⁵·r^{5/2}.
    pub formula: f64,
    /// q chosen for packing index k − 1; absent when k − 1 < 3, where the
    /// choice of q is not covered by the argument.
    pub q: Option<u64>,
    /// q⁵ = |P|, an upper bound on P_r(k−1) = s_r(K_k).
    pub constructive: Option<u128>,
}

/// Bound on s_r(K_k) for clique size k.
pub fn main_bound(r: u64, k: u64) -> Result<MainBound> {
    if r < 2 || k < 3 {
        return Err(Error::InvalidArgument(format!("main_bound needs r ≥ 2 and k ≥ 3, got r = {r}, k = {k}")));
    }
    let formula = constant_C() as f64 * ((k - 1) as f64).powi(5) * (r as f64).powf(2.5);
    let (q, constructive) = if k > 3 {
        let choice = choose_q(r, k - 1)?;
        (Some(choice.q), Some((choice.q as u128).pow(5)))
    } else {
        (None, None)
    };
    Ok(MainBound { formula, q, constructive })
}

/// q²/(rk) − q(1 + ln r)/r − ln k.
pub fn quadratic_in_q(q: f64, r: u64, k: u64) -> f64 {
    let (rf, kf) = (r as f64, k as f64);
    q * q / (rf * kf) - q * (1.0 + rf.ln()) / rf - kf.ln()
}

/// Closed-form q₀ = k(1 + ln r) + √(rk ln k), above which the quadratic is positive.
pub fn quadratic_sufficient_q(r: u64, k: u64) -> f64 {
    let (rf, kf) = (r as f64, k as f64);
    kf * (1.0 + rf.ln()) + (rf * kf * kf.ln()).sqrt()
}

/// Positive root of [`quadratic_in_q`].
pub fn quadratic_threshold(r: u64, k: u64) -> Result<f64> {
    if r < 2 || k < 2 {
        return Err(Error::InvalidArgument(format!("quadratic_threshold needs r ≥ 2 and k ≥ 2, got r = {r}, k = {k}")));
    }
    let (rf, kf) = (r as f64, k as f64);
    // rk·(quadratic) = q² − k(1 + ln r)q − rk ln k
    let b = kf * (1.0 + rf.ln());
    let c = rf * kf * kf.ln();
    let root = (b + (b * b + 4.0 * c).sqrt()) / 2.0;
    let q0 = quadratic_sufficient_q(r, k);
    if quadratic_in_q(q0, r, k) <= 0.0 {
        return Err(Error::AssertionFailure(format!("quadratic not positive at q0 = {q0}")));
    }
    Ok(root)
}

/// 2⁹[(k−1)⁵ ln⁵ r + (k−1)^{5/2} r^{5/2} ln^{5/2}(k−1)].
pub fn refined_bound(r: u64, k: u64) -> Result<f64> {
    if r < 2 || k < 2 {
        return Err(Error::InvalidArgument(format!("refined_bound needs r ≥ 2 and k ≥ 2, got r = {r}, k = {k}")));
    }
    let (rf, km1) = (r as f64, (k - 1) as f64);
    let first = km1.powi(5) * rf.ln().powi(5);
    let second = km1.powf(2.5) * rf.powf(2.5) * km1.ln().powf(2.5);
    Ok(512.0 * (first + second))
}

/// Flags for the hypotheses of the packing argument at the chosen q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Conditions {
    /// s = q² − 1 ≥ 2rk' ln k'.
    pub s_condition: bool,
    /// t = q − 1 ≥ 2k'(1 + ln r).
    pub t_condition: bool,
    /// q ≤ 2ck'√r.
    pub bertrand_condition: bool,
    /// The failure bound at (q² − 1, q − 1, r, k', q⁵) is below 1.
    pub failure_bound_below_one: bool,
}

/// Everything `bound` reports for a pair (r, k) with k the clique size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub version: &'static str,
    pub r: u64,
    pub k: u64,
    #[serde(serialize_with = "serialize_15_digits")]
    pub c: f64,
    #[serde(rename = "C")]
    pub big_c: u64,
    pub q_star: Option<u64>,
    pub num_points: Option<u128>,
    pub main_bound: f64,
    pub refined_bound: f64,
    pub conditions: Option<Conditions>,
}

fn serialize_15_digits<S: serde::Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rounded: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
    s.serialize_f64(rounded)
}

pub fn bound_report(r: u64, k: u64) -> Result<BoundReport> {
    let main = main_bound(r, k)?;
    let refined = refined_bound(r, k)?;
    let conditions = main.q.map(|q| {
        let kp = k - 1;
        let (qf, rf, kf) = (q as f64, r as f64, kp as f64);
        Conditions {
            s_condition: at_least(qf * qf - 1.0, 2.0 * rf * kf * kf.ln()),
            t_condition: at_least(qf - 1.0, 2.0 * kf * (1.0 + rf.ln())),
            bertrand_condition: at_least(2.0 * constant_c() * kf * rf.sqrt(), qf),
            failure_bound_below_one: failure_bound_exponent(q * q - 1, q - 1, r, kp, q.pow(5)) < 0.0,
        }
    });
    Ok(BoundReport {
        version: env!("CARGO_PKG_VERSION"),
        r,
        k,
        c: constant_c(),
        big_c: constant_C(),
        q_star: main.q,
        num_points: main.constructive,
        main_bound: main.formula,
        refined_bound: refined,
        conditions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn constants() {
        assert!((constant_c() - 2.64).abs() < 0.01);
        assert!(rel_close(constant_c(), 2.630_173_966_237_158, 1e-12));
        let five = (2.0 * constant_c()).powi(5);
        assert!(five > 4027.0 && five <= 4028.0);
        assert!(rel_close(five, 4_027.841_313_068_371, 1e-12));
        assert_eq!(constant_C(), 4028);
    }

    #[test]
    fn prime_powers() {
        assert_eq!(is_prime_power(9), Some((3, 2)));
        assert_eq!(is_prime_power(12), None);
        assert_eq!(is_prime_power(2), Some((2, 1)));
        assert_eq!(is_prime_power(1), None);
        assert_eq!(is_prime_power(1 << 20), Some((2, 20)));
        assert_eq!(is_prime_power(169), Some((13, 2)));
        assert_eq!(is_prime_power(1_000_003), Some((1_000_003, 1)));
        assert_eq!(is_prime_power(999_983 * 999_983), Some((999_983, 2)));
        assert_eq!(is_prime_power(999_983 * 1_000_003), None);
    }

    #[test]
    fn choose_q_at_two_three() {
        let choice = choose_q(2, 3).unwrap();
        assert!(rel_close(choice.target, 11.158_883_083_359_672, 1e-12));
        assert_eq!(choice.q, 13);
        assert_eq!((choice.p, choice.e), (13, 1));
        assert_eq!(choice.q.pow(5), 371_293);
    }

    #[test]
    fn choose_q_rejects_small_arguments() {
        assert!(choose_q(1, 3).is_err());
        assert!(choose_q(2, 2).is_err());
    }

    #[test]
    fn main_bound_examples() {
        let b = main_bound(2, 3).unwrap();
        assert!(rel_close(b.formula, 729_145.885_342_569_8, 1e-9));
        assert_eq!(b.constructive, None);
        let b = main_bound(2, 4).unwrap();
        assert!(rel_close(b.formula, 5_536_951.566_820_14, 1e-9));
        assert_eq!(b.q, Some(13));
        assert_eq!(b.constructive, Some(371_293));
        assert!(371_293_f64 <= main_bound(2, 3).unwrap().formula);
    }

    #[test]
    fn quadratic_root_k2_r2() {
        let root = quadratic_threshold(2, 2).unwrap();
        assert!(rel_close(root, 4.067_875_817_115_683, 1e-12));
        assert!(quadratic_in_q(root, 2, 2).abs() < 1e-9);
    }

    #[test]
    fn refined_examples() {
        for r in [2u64, 3, 10, 1000] {
            let v = refined_bound(r, 2).unwrap();
            assert!(rel_close(v, 512.0 * (r as f64).ln().powi(5), 1e-12));
        }
        assert!(rel_close(refined_bound(2, 3).unwrap(), 9_175.139_449_886_368, 1e-9));
        assert!(rel_close(refined_bound(2, 4).unwrap(), 77_023.084_161_602_15, 1e-9));
    }

    #[test]
    fn failure_bound_degenerate() {
        // r = 1, k = 1: exponent per point is 1 − (t + 1)
        for t in 1..10u64 {
            let e = failure_bound_exponent(5, t, 1, 1, 1);
            assert!(rel_close(e, 1.0 - (t + 1) as f64, 1e-12));
            assert!(estimate_failure_bound(5, t, 1, 1, 1) < 1.0);
        }
        // q = 3, r = 2, k = 2: positive exponent, bound useless
        let e = failure_bound_exponent(8, 2, 2, 2, 1);
        assert!(rel_close(e, 0.327_622_650_466_621_1, 1e-12));
    }

    #[test]
    fn report_serializes() {
        let rep = bound_report(2, 4).unwrap();
        assert_eq!(rep.q_star, Some(13));
        let conds = rep.conditions.unwrap();
        assert!(conds.s_condition && conds.t_condition && conds.bertrand_condition && conds.failure_bound_below_one);
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["c"].as_f64().unwrap(), 2.63017396623716);
        assert_eq!(json["C"], 4028);
        assert_eq!(json["num_points"], 371_293);
        let rep3 = bound_report(2, 3).unwrap();
        assert!(rep3.q_star.is_none() && rep3.conditions.is_none());
    }
}
