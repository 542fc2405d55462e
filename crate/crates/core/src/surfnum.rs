//! Numerics of line bundles on the quadric surface `P¹×P¹` and of bundles
//! on surfaces pushed forward to the plane.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

fn p(n: i64) -> u64 {
    (n + 1).max(0) as u64
}

fn q(n: i64) -> u64 {
    (-n - 1).max(0) as u64
}

/// Cohomology dimensions of a sheaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Cohomology {
    pub h0: u64,
    pub h1: u64,
    pub h2: u64,
}

impl Cohomology {
    pub fn euler(&self) -> i64 {
        self.h0 as i64 - self.h1 as i64 + self.h2 as i64
    }
}

/// `h^i(O(a, b))` on `P¹×P¹` by Künneth.
pub fn p1xp1_cohomology(a: i64, b: i64) -> Cohomology {
    Cohomology { h0: p(a) * p(b), h1: p(a) * q(b) + q(a) * p(b), h2: q(a) * q(b) }
}

/// `(k+1)(2s-k-2)` on `0 ≤ k ≤ 2s-3`, zero elsewhere.
pub fn quadric_h1_closed_form(s: i64, k: i64) -> u64 {
    if (0..=2 * s - 3).contains(&k) {
        ((k + 1) * (2 * s - k - 2)) as u64
    } else {
        0
    }
}

/// `k ↦ h^1(E_s(-s+k))` for `E_s = O(s, 1-s)`, over `-2 ≤ k ≤ 2s`.
pub fn quadric_h1_table(s: i64) -> BTreeMap<i64, u64> {
    assert!(s >= 2, "table is defined for s >= 2");
    (-2..=2 * s).map(|k| (k, p1xp1_cohomology(k, 1 - 2 * s + k).h1)).collect()
}

/// `i ↦ h^1(O(a+i, b+i))` for `lo ≤ i ≤ hi`.
pub fn quadric_h1_sequence(a: i64, b: i64, lo: i64, hi: i64) -> BTreeMap<i64, u64> {
    (lo..=hi).map(|i| (i, p1xp1_cohomology(a + i, b + i).h1)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum UlrichClass {
    NotDeltaUlrich,
    DeltaUlrich,
    Ulrich,
}

/// A line bundle `O(a, b)` restricts to `O(a+b)` on a smooth conic section;
/// it is δ-Ulrich iff that is `O(1)`, and Ulrich iff moreover `h^0 = 2`.
pub fn quadric_delta_ulrich_test(a: i64, b: i64) -> UlrichClass {
    if a + b != 1 {
        UlrichClass::NotDeltaUlrich
    } else if p1xp1_cohomology(a, b).h0 == 2 {
        UlrichClass::Ulrich
    } else {
        UlrichClass::DeltaUlrich
    }
}

/// Result of [`wlp_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WlpReport {
    pub increasing_up_to_minus_two: bool,
    pub decreasing_from_minus_two: bool,
    /// First `i` at which one of the chains breaks.
    pub first_violation: Option<i64>,
    pub max: u64,
    pub peak_at_minus_one_or_two: bool,
}

impl WlpReport {
    pub fn passed(&self) -> bool {
        self.increasing_up_to_minus_two && self.decreasing_from_minus_two
    }
}

/// `h(i) ≤ h(i+1)` for `i ≤ -2` and `h(i) ≥ h(i+1)` for `i ≥ -2`, with
/// missing entries read as zero.
pub fn wlp_check(h1: &BTreeMap<i64, u64>) -> WlpReport {
    let get = |i: i64| h1.get(&i).copied().unwrap_or(0);
    let lo = h1.keys().next().copied().unwrap_or(-2).min(-2) - 1;
    let hi = h1.keys().next_back().copied().unwrap_or(-2).max(-2) + 1;
    let mut inc = true;
    let mut dec = true;
    let mut first_violation = None;
    for i in lo..hi {
        if i <= -2 && get(i) > get(i + 1) {
            inc = false;
            first_violation.get_or_insert(i);
        }
        if i >= -2 && get(i) < get(i + 1) {
            dec = false;
            first_violation.get_or_insert(i);
        }
    }
    let max = h1.values().copied().max().unwrap_or(0);
    WlpReport {
        increasing_up_to_minus_two: inc,
        decreasing_from_minus_two: dec,
        first_violation,
        max,
        peak_at_minus_one_or_two: max == get(-1) || max == get(-2),
    }
}

/// Rank `r`, degree `d` of the surface, and `m = h^1(E(-1))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BundleNumerics {
    pub rank: u64,
    pub degree: u64,
    pub m: u64,
    pub h0: Option<u64>,
}

/// Ranks of `O(-1)^m -> O^{rd+2m} -> O(1)^m` and `χ` of the rank-`rd` pushforward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MonadShape {
    pub left: u64,
    pub middle: u64,
    pub right: u64,
    pub euler: i64,
}

pub fn monad_shape(n: &BundleNumerics) -> MonadShape {
    assert!(n.rank >= 1 && n.degree >= 1, "rank and degree must be positive");
    let rd = n.rank * n.degree;
    MonadShape { left: n.m, middle: rd + 2 * n.m, right: n.m, euler: rd as i64 - n.m as i64 }
}

/// `χ(E ⊗ F) = rk F (χ(E) + 3 rk E)` for `F` with trivial restriction to lines.
pub fn ec_tensor(chi_e: i64, r_e: i64, r_f: i64) -> i64 {
    assert!(r_e >= 1 && r_f >= 1, "ranks must be positive");
    r_f * (chi_e + 3 * r_e)
}

/// `β_m = β_{m-1}/4 + 3/4` for `m = 0..=steps`.
pub fn beta_sequence(beta0: &BigRational, steps: usize) -> Vec<BigRational> {
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    let three_quarters = BigRational::new(BigInt::from(3), BigInt::from(4));
    let mut out = Vec::with_capacity(steps + 1);
    out.push(beta0.clone());
    for _ in 0..steps {
        let next = out.last().expect("nonempty") * &quarter + &three_quarters;
        out.push(next);
    }
    out
}

/// `1 - (1 - β_0)/4^m`.
pub fn beta_closed_form(beta0: &BigRational, m: u32) -> BigRational {
    let one = BigRational::one();
    let denom = BigRational::from_integer(BigInt::from(4).pow(m));
    &one - (&one - beta0) / denom
}

/// Checks on a computed β sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BetaReport {
    pub steps: usize,
    pub closed_form: bool,
    /// `|1 - β_m| = |1 - β_0| / 4^m` for every `m`.
    pub gap_shrinks_by_four: bool,
    /// `β_0 ≤ 1` implies `β_m ≤ 1` (the upper half of `β_m ≤ α(E_m) ≤ 1`).
    pub bounded_by_one: bool,
    /// Strictly increasing when `β_0 < 1`.
    pub monotone: bool,
}

impl BetaReport {
    pub fn passed(&self) -> bool {
        self.closed_form && self.gap_shrinks_by_four && self.bounded_by_one && self.monotone
    }
}

pub fn beta_report(beta0: &BigRational, steps: usize) -> BetaReport {
    let one = BigRational::one();
    let seq = beta_sequence(beta0, steps);
    let gap0 = (&one - beta0).abs();
    let closed_form = seq.iter().enumerate().all(|(m, b)| *b == beta_closed_form(beta0, m as u32));
    let gap_shrinks_by_four = seq.iter().enumerate().all(|(m, b)| (&one - b).abs() * BigRational::from_integer(BigInt::from(4).pow(m as u32)) == gap0);
    let bounded_by_one = *beta0 > one || seq.iter().all(|b| *b <= one);
    let monotone = *beta0 >= one || seq.windows(2).all(|w| w[1] > w[0]);
    BetaReport { steps, closed_form, gap_shrinks_by_four, bounded_by_one, monotone }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn cohomology_examples() {
        assert_eq!(p1xp1_cohomology(0, 0), Cohomology { h0: 1, h1: 0, h2: 0 });
        assert_eq!(p1xp1_cohomology(0, -3), Cohomology { h0: 0, h1: 2, h2: 0 });
        assert_eq!(p1xp1_cohomology(-2, -2), Cohomology { h0: 0, h1: 0, h2: 1 });
    }

    #[test]
    fn h1_tables() {
        let t2 = quadric_h1_table(2);
        assert_eq!((t2[&0], t2[&1], t2[&2], t2[&-1]), (2, 2, 0, 0));
        let t3 = quadric_h1_table(3);
        assert_eq!((t3[&0], t3[&1], t3[&2], t3[&3], t3[&4]), (4, 6, 6, 4, 0));
    }

    #[test]
    fn ulrich_classes() {
        assert_eq!(quadric_delta_ulrich_test(1, 0), UlrichClass::Ulrich);
        assert_eq!(quadric_delta_ulrich_test(0, 1), UlrichClass::Ulrich);
        assert_eq!(quadric_delta_ulrich_test(2, -1), UlrichClass::DeltaUlrich);
        assert_eq!(quadric_delta_ulrich_test(1, 1), UlrichClass::NotDeltaUlrich);
    }

    #[test]
    fn wlp_examples() {
        assert!(wlp_check(&quadric_h1_sequence(2, -1, -6, 4)).passed());
        let increasing: BTreeMap<i64, u64> = (-4..=2).map(|i| (i, (i + 5) as u64)).collect();
        let r = wlp_check(&increasing);
        assert!(r.increasing_up_to_minus_two && !r.decreasing_from_minus_two);
        assert!(wlp_check(&BTreeMap::new()).passed());
    }

    #[test]
    fn monad_examples() {
        assert_eq!(monad_shape(&BundleNumerics { rank: 3, degree: 2, m: 0, h0: None }), MonadShape { left: 0, middle: 6, right: 0, euler: 6 });
        assert_eq!(monad_shape(&BundleNumerics { rank: 1, degree: 2, m: 2, h0: None }), MonadShape { left: 2, middle: 6, right: 2, euler: 0 });
        assert_eq!(monad_shape(&BundleNumerics { rank: 2, degree: 1, m: 1, h0: None }), MonadShape { left: 1, middle: 4, right: 1, euler: 1 });
    }

    #[test]
    fn ec_examples() {
        assert_eq!(ec_tensor(1, 1, 2), 8);
        assert_eq!(ec_tensor(-3, 1, 1), 0);
    }

    #[test]
    fn beta_examples() {
        assert!(beta_sequence(&r(1, 1), 5).iter().all(|b| *b == r(1, 1)));
        assert_eq!(beta_sequence(&r(0, 1), 3), vec![r(0, 1), r(3, 4), r(15, 16), r(63, 64)]);
        assert_eq!(beta_sequence(&r(-3, 1), 2)[2], r(3, 4));
        assert_eq!(beta_closed_form(&r(-3, 1), 2), r(3, 4));
        for b0 in [r(0, 1), r(-3, 1), r(1, 1), r(7, 3)] {
            assert!(beta_report(&b0, 10).passed());
        }
    }
}
