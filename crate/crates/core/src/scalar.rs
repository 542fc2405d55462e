//! Exact scalars: rationals and elements of cyclotomic fields `Q(ζ_e)`.
//!
//! An element of order `e` is stored as a residue modulo the cyclotomic
//! polynomial `Φ_e`, i.e. as `φ(e)` rational coefficients on the power basis
//! `1, ζ, …, ζ^{φ(e)-1}`. Values that happen to be rational are always stored
//! in the rational form, so equality and zero tests are cheap on the common
//! path. Mixed-order arithmetic embeds both operands into `Q(ζ_lcm)`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::ScalarError;

/// Element of `Q(ζ_e)`.
#[derive(Clone)]
pub struct CycScalar(Repr);

#[derive(Clone)]
enum Repr {
    Rat(BigRational),
    Cyc { order: u32, coeffs: Box<[BigRational]> },
}

/// Euler's totient.
pub fn euler_phi(n: u32) -> u32 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn cyclotomic_cache() -> &'static Mutex<HashMap<u32, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Integer coefficients of `Φ_e`, lowest degree first.
pub fn cyclotomic_polynomial(e: u32) -> Arc<Vec<BigInt>> {
    assert!(e >= 1, "cyclotomic order must be positive");
    if let Some(p) = cyclotomic_cache().lock().unwrap().get(&e) {
        return p.clone();
    }
    // x^e - 1 divided by Φ_d for every proper divisor d of e.
    let mut num: Vec<BigInt> = vec![BigInt::zero(); e as usize + 1];
    num[0] = -BigInt::one();
    num[e as usize] = BigInt::one();
    for d in 1..e {
        if e.is_multiple_of(d) {
            let div = cyclotomic_polynomial(d);
            num = exact_monic_div(&num, &div);
        }
    }
    let arc = Arc::new(num);
    cyclotomic_cache().lock().unwrap().insert(e, arc.clone());
    arc
}

fn exact_monic_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![BigInt::zero(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dc) in den.iter().enumerate() {
            rem[i + j] -= &c * dc;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quot
}

/// Reduce a dense polynomial (lowest first) modulo `Φ_e`; result has length `φ(e)`.
fn reduce_mod_cyclotomic(mut p: Vec<BigRational>, e: u32) -> Vec<BigRational> {
    let phi = cyclotomic_polynomial(e);
    let n = phi.len() - 1;
    if p.len() < n {
        p.resize(n, BigRational::zero());
        return p;
    }
    for i in (n..p.len()).rev() {
        let c = std::mem::replace(&mut p[i], BigRational::zero());
        if c.is_zero() {
            continue;
        }
        // x^i = x^{i-n} * x^n and x^n = -(phi_0 + ... + phi_{n-1} x^{n-1})
        for (j, pc) in phi[..n].iter().enumerate() {
            if !pc.is_zero() {
                p[i - n + j] -= &c * BigRational::from_integer(pc.clone());
            }
        }
    }
    p.truncate(n);
    p
}

impl CycScalar {
    pub fn zero() -> Self {
        CycScalar(Repr::Rat(BigRational::zero()))
    }

    pub fn one() -> Self {
        CycScalar(Repr::Rat(BigRational::one()))
    }

    pub fn from_rational(q: BigRational) -> Self {
        CycScalar(Repr::Rat(q))
    }

    pub fn from_int(n: i64) -> Self {
        CycScalar(Repr::Rat(BigRational::from_integer(BigInt::from(n))))
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        CycScalar(Repr::Rat(BigRational::new(BigInt::from(n), BigInt::from(d))))
    }

    /// Builds `Σ coeffs[k] ζ_e^k`, reducing modulo `Φ_e`. Any length is accepted.
    pub fn from_coeffs(order: u32, coeffs: Vec<BigRational>) -> Result<Self, ScalarError> {
        if order == 0 {
            return Err(ScalarError::ZeroOrder);
        }
        Ok(Self::canonical(order, reduce_mod_cyclotomic(coeffs, order)))
    }

    fn canonical(order: u32, coeffs: Vec<BigRational>) -> Self {
        debug_assert_eq!(coeffs.len(), euler_phi(order) as usize);
        if order <= 2 || coeffs[1..].iter().all(|c| c.is_zero()) {
            let c0 = coeffs.into_iter().next().unwrap_or_else(BigRational::zero);
            return CycScalar(Repr::Rat(c0));
        }
        CycScalar(Repr::Cyc { order, coeffs: coeffs.into_boxed_slice() })
    }

    /// A primitive `e`-th root of unity `ζ_e`.
    pub fn make_root(e: u32) -> Self {
        assert!(e >= 1, "root of unity order must be positive");
        match e {
            1 => Self::one(),
            2 => Self::from_int(-1),
            _ => {
                let mut c = vec![BigRational::zero(); euler_phi(e) as usize];
                c[1] = BigRational::one();
                Self::canonical(e, c)
            }
        }
    }

    /// The field order `e` this value is expressed in (`1` for rationals).
    pub fn order(&self) -> u32 {
        match &self.0 {
            Repr::Rat(_) => 1,
            Repr::Cyc { order, .. } => *order,
        }
    }

    /// Power-basis coefficients in `Q(ζ_order)`, length `φ(order)`.
    pub fn coeffs(&self) -> Vec<BigRational> {
        match &self.0 {
            Repr::Rat(q) => vec![q.clone()],
            Repr::Cyc { coeffs, .. } => coeffs.to_vec(),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Rat(q) => Some(q),
            Repr::Cyc { .. } => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.0, Repr::Rat(_))
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Rat(q) => q.is_zero(),
            Repr::Cyc { .. } => false,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Rat(q) => q.is_one(),
            Repr::Cyc { .. } => false,
        }
    }

    /// Coefficients of `self` embedded in `Q(ζ_target)`; `order()` must divide `target`.
    fn embed(&self, target: u32) -> Vec<BigRational> {
        let n = euler_phi(target) as usize;
        match &self.0 {
            Repr::Rat(q) => {
                let mut v = vec![BigRational::zero(); n];
                v[0] = q.clone();
                v
            }
            Repr::Cyc { order, coeffs } => {
                if *order == target {
                    return coeffs.to_vec();
                }
                let step = (target / order) as usize;
                let mut dense = vec![BigRational::zero(); (coeffs.len() - 1) * step + 1];
                for (k, c) in coeffs.iter().enumerate() {
                    dense[k * step] = c.clone();
                }
                reduce_mod_cyclotomic(dense, target)
            }
        }
    }

    fn common_order(&self, other: &Self) -> u32 {
        self.order().lcm(&other.order())
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        match &self.0 {
            Repr::Rat(q) => {
                if q.is_zero() {
                    None
                } else {
                    Some(CycScalar(Repr::Rat(q.recip())))
                }
            }
            Repr::Cyc { order, coeffs } => {
                let modulus: Vec<BigRational> = cyclotomic_polynomial(*order)
                    .iter()
                    .map(|c| BigRational::from_integer(c.clone()))
                    .collect();
                let inv = univariate_inverse(coeffs, &modulus)?;
                Some(Self::canonical(*order, reduce_mod_cyclotomic(inv, *order)))
            }
        }
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        let inv = rhs.inv().ok_or(ScalarError::DivisionByZero)?;
        Ok(self * &inv)
    }

    fn binary(&self, rhs: &Self, op: impl Fn(&[BigRational], &[BigRational]) -> Vec<BigRational>) -> Self {
        let e = self.common_order(rhs);
        let a = self.embed(e);
        let b = rhs.embed(e);
        Self::canonical(e, reduce_mod_cyclotomic(op(&a, &b), e))
    }
}

fn trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(&mut out);
    out
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    trim(&mut rem);
    let mut den = b.to_vec();
    trim(&mut den);
    if rem.len() < den.len() {
        return (Vec::new(), rem);
    }
    let lead = den.last().unwrap().clone();
    let mut quot = vec![BigRational::zero(); rem.len() - den.len() + 1];
    while rem.len() >= den.len() && !rem.is_empty() {
        let shift = rem.len() - den.len();
        let c = rem.last().unwrap() / &lead;
        for (j, d) in den.iter().enumerate() {
            rem[shift + j] -= &c * d;
        }
        quot[shift] = c;
        rem.pop();
        trim(&mut rem);
    }
    (quot, rem)
}

/// Inverse of `a` modulo an irreducible `m` by the extended Euclidean algorithm.
fn univariate_inverse(a: &[BigRational], m: &[BigRational]) -> Option<Vec<BigRational>> {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    trim(&mut r1);
    if r1.is_empty() {
        return None;
    }
    let mut s0: Vec<BigRational> = Vec::new();
    let mut s1: Vec<BigRational> = vec![BigRational::one()];
    while !r1.is_empty() {
        let (q, r) = poly_divrem(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    // r0 is a nonzero constant gcd
    if r0.len() != 1 {
        return None;
    }
    let c = r0[0].recip();
    Some(s0.into_iter().map(|x| x * &c).collect())
}

impl PartialEq for CycScalar {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Rat(a), Repr::Rat(b)) => a == b,
            (Repr::Rat(_), Repr::Cyc { .. }) | (Repr::Cyc { .. }, Repr::Rat(_)) => false,
            (Repr::Cyc { order: e1, coeffs: c1 }, Repr::Cyc { order: e2, coeffs: c2 }) => {
                if e1 == e2 {
                    c1 == c2
                } else {
                    let e = self.common_order(other);
                    self.embed(e) == other.embed(e)
                }
            }
        }
    }
}

impl Eq for CycScalar {}

impl Default for CycScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for CycScalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigRational> for CycScalar {
    fn from(q: BigRational) -> Self {
        Self::from_rational(q)
    }
}

impl<'a> Add<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn add(self, rhs: &CycScalar) -> CycScalar {
        if let (Repr::Rat(a), Repr::Rat(b)) = (&self.0, &rhs.0) {
            return CycScalar(Repr::Rat(a + b));
        }
        self.binary(rhs, |a, b| a.iter().zip(b).map(|(x, y)| x + y).collect())
    }
}

impl<'a> Sub<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn sub(self, rhs: &CycScalar) -> CycScalar {
        if let (Repr::Rat(a), Repr::Rat(b)) = (&self.0, &rhs.0) {
            return CycScalar(Repr::Rat(a - b));
        }
        self.binary(rhs, |a, b| a.iter().zip(b).map(|(x, y)| x - y).collect())
    }
}

impl<'a> Mul<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn mul(self, rhs: &CycScalar) -> CycScalar {
        match (&self.0, &rhs.0) {
            (Repr::Rat(a), Repr::Rat(b)) => CycScalar(Repr::Rat(a * b)),
            (Repr::Rat(a), Repr::Cyc { order, coeffs }) | (Repr::Cyc { order, coeffs }, Repr::Rat(a)) => {
                if a.is_zero() {
                    return CycScalar::zero();
                }
                let c: Vec<BigRational> = coeffs.iter().map(|c| c * a).collect();
                CycScalar(Repr::Cyc { order: *order, coeffs: c.into_boxed_slice() })
            }
            _ => self.binary(rhs, poly_mul),
        }
    }
}

impl Neg for &CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        match &self.0 {
            Repr::Rat(q) => CycScalar(Repr::Rat(-q)),
            Repr::Cyc { order, coeffs } => CycScalar(Repr::Cyc {
                order: *order,
                coeffs: coeffs.iter().map(|c| -c).collect(),
            }),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycScalar> for CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: CycScalar) -> CycScalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        -&self
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Rat(q) => f.write_str(&fmt_rational(q)),
            Repr::Cyc { order, coeffs } => {
                write!(f, "poly({order};")?;
                for (i, c) in coeffs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, " {}", fmt_rational(c))?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// True when the scalar is negative rational; used for sign-aware printing.
pub(crate) fn is_negative_rational(s: &CycScalar) -> bool {
    s.as_rational().is_some_and(|q| q.is_negative())
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational, ScalarError> {
    let s = s.trim();
    let bad = || ScalarError::Parse(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(ScalarError::DivisionByZero);
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl FromStr for CycScalar {
    type Err = ScalarError;

    /// Accepts `p`, `p/q`, or `poly(e; c0, c1, ...)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Some(inner) = t.strip_prefix("poly(").and_then(|r| r.strip_suffix(')')) {
            let (e, rest) = inner.split_once(';').ok_or_else(|| ScalarError::Parse(t.to_string()))?;
            let e: u32 = e.trim().parse().map_err(|_| ScalarError::Parse(t.to_string()))?;
            let coeffs = rest
                .split(',')
                .filter(|c| !c.trim().is_empty())
                .map(parse_rational)
                .collect::<Result<Vec<_>, _>>()?;
            return Self::from_coeffs(e, coeffs);
        }
        parse_rational(t).map(Self::from_rational)
    }
}

impl serde::Serialize for CycScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for CycScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials_small() {
        let as_i64 = |e| cyclotomic_polynomial(e).iter().map(|c| i64::try_from(c).unwrap()).collect::<Vec<_>>();
        assert_eq!(as_i64(1), vec![-1, 1]);
        assert_eq!(as_i64(2), vec![1, 1]);
        assert_eq!(as_i64(3), vec![1, 1, 1]);
        assert_eq!(as_i64(4), vec![1, 0, 1]);
        assert_eq!(as_i64(6), vec![1, -1, 1]);
        assert_eq!(as_i64(12), vec![1, 0, -1, 0, 1]);
        for e in 1..=30 {
            assert_eq!(cyclotomic_polynomial(e).len() - 1, euler_phi(e) as usize);
        }
    }

    #[test]
    fn roots_trivial_cases() {
        assert_eq!(CycScalar::make_root(1), CycScalar::one());
        assert_eq!(CycScalar::make_root(2), CycScalar::from_int(-1));
        let z = CycScalar::make_root(3);
        let s = &(&CycScalar::one() + &z) + &z.pow(2);
        assert!(s.is_zero());
    }

    #[test]
    fn roots_are_primitive() {
        for e in 1..=12u32 {
            let z = CycScalar::make_root(e);
            assert!(z.pow(e as u64).is_one(), "order {e}");
            for k in 1..e {
                assert!(!z.pow(k as u64).is_one(), "order {e} power {k}");
            }
        }
    }

    #[test]
    fn arithmetic_examples() {
        let i = CycScalar::make_root(4);
        assert_eq!(&i * &i, CycScalar::from_int(-1));
        let z3 = CycScalar::make_root(3);
        assert_eq!(z3.checked_div(&z3).unwrap(), CycScalar::one());
        // (1+ζ6)(1+ζ6^{-1}) = 2 + ζ6 + ζ6^{-1} = 2 + 2 Re ζ6 = 3
        let z6 = CycScalar::make_root(6);
        let one = CycScalar::one();
        let lhs = &(&one + &z6) * &(&one + &z6.inv().unwrap());
        assert_eq!(lhs, CycScalar::from_int(3));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(CycScalar::one().checked_div(&CycScalar::zero()), Err(ScalarError::DivisionByZero));
        assert!(CycScalar::zero().inv().is_none());
    }

    #[test]
    fn mixed_orders_embed_into_lcm() {
        // ζ_3 = ζ_12^4 and ζ_4 = ζ_12^3
        let z12 = CycScalar::make_root(12);
        assert_eq!(CycScalar::make_root(3), z12.pow(4));
        assert_eq!(CycScalar::make_root(4), z12.pow(3));
        let prod = &CycScalar::make_root(3) * &CycScalar::make_root(4);
        assert_eq!(prod, z12.pow(7));
        assert_eq!(prod.order(), 12);
    }

    #[test]
    fn display_and_parse() {
        let q = CycScalar::from_frac(-3, 6);
        assert_eq!(q.to_string(), "-1/2");
        let z = CycScalar::make_root(5);
        let w = &z * &CycScalar::from_frac(2, 3);
        assert_eq!(w.to_string(), "poly(5; 0, 2/3, 0, 0)");
        assert_eq!(w.to_string().parse::<CycScalar>().unwrap(), w);
        assert_eq!("7".parse::<CycScalar>().unwrap(), CycScalar::from_int(7));
        // a reducible representative is canonicalised on parse
        assert_eq!("poly(3; 1, 1, 1)".parse::<CycScalar>().unwrap(), CycScalar::zero());
    }

    #[test]
    fn inverse_in_larger_fields() {
        for e in [5u32, 7, 8, 9, 12] {
            let z = CycScalar::make_root(e);
            let a = &(&z + &CycScalar::from_int(2)) * &z.pow(2);
            let b = a.inv().unwrap();
            assert!((&a * &b).is_one(), "order {e}");
        }
    }
}
