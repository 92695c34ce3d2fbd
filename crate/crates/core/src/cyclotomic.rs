//! Exact arithmetic in the cyclotomic field Q(ζ_r).
//!
//! Elements are stored in the power basis `1, ζ, …, ζ^{φ(r)-1}` modulo the
//! r-th cyclotomic polynomial, so two elements are equal exactly when their
//! coefficient vectors are equal.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::expr::{self, ParseError};

/// Exact rational number, always kept in lowest terms with a positive denominator.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycError {
    #[error("root order must be positive")]
    ZeroOrder,
    #[error("cannot mix elements of Q(zeta_{left}) and Q(zeta_{right})")]
    OrderMismatch { left: u32, right: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Euler's totient.
pub fn euler_phi(r: u32) -> usize {
    let mut n = r as u64;
    let mut result = n;
    let mut p = 2u64;
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
    result as usize
}

fn divisors(r: u32) -> Vec<u32> {
    (1..=r).filter(|d| r.is_multiple_of(*d)).collect()
}

type PolyTable = RwLock<HashMap<u32, Arc<Vec<BigInt>>>>;

fn poly_table() -> &'static PolyTable {
    static TABLE: OnceLock<PolyTable> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Exact division of `num` by the monic polynomial `den` (coefficients low to high).
fn div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return vec![BigInt::zero()];
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for shift in (0..quot.len()).rev() {
        let c = rem[shift + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (i, d) in den.iter().enumerate() {
            rem[shift + i] -= &c * d;
        }
        quot[shift] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "division was not exact");
    quot
}

/// The r-th cyclotomic polynomial Φ_r with integer coefficients, lowest degree first.
///
/// Computed by dividing `x^r - 1` by Φ_d for every proper divisor d of r, and
/// memoized for the lifetime of the process.
pub fn cyclotomic_polynomial(r: u32) -> Result<Arc<Vec<BigInt>>, CycError> {
    if r == 0 {
        return Err(CycError::ZeroOrder);
    }
    if let Some(p) = poly_table().read().expect("poly table poisoned").get(&r) {
        return Ok(Arc::clone(p));
    }
    let mut p = vec![BigInt::zero(); r as usize + 1];
    p[0] = -BigInt::one();
    p[r as usize] = BigInt::one();
    for d in divisors(r) {
        if d < r {
            let phi_d = cyclotomic_polynomial(d)?;
            p = div_monic(&p, &phi_d);
        }
    }
    let p = Arc::new(p);
    let mut table = poly_table().write().expect("poly table poisoned");
    Ok(Arc::clone(table.entry(r).or_insert(p)))
}

/// Renders an integer polynomial in `x`, highest degree first.
pub fn format_int_poly(coeffs: &[BigInt], var: &str) -> String {
    let mut out = String::new();
    for (deg, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let abs = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = match deg {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{deg}"),
        };
        if mono.is_empty() {
            out.push_str(&abs.to_string());
        } else if abs.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{abs}{mono}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

// Dense rational polynomials, lowest degree first, used for reduction and inversion.

fn trim(p: &mut Vec<Rat>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
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
    trim(&mut out);
    out
}

fn poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(&mut out);
    out
}

fn poly_divrem(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut rem = a.to_vec();
    trim(&mut rem);
    let db = b.len() - 1;
    let lead = &b[db];
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![Rat::zero(); rem.len() - db];
    for shift in (0..quot.len()).rev() {
        let c = &rem[shift + db] / lead;
        if c.is_zero() {
            continue;
        }
        for (i, d) in b.iter().enumerate() {
            rem[shift + i] -= &c * d;
        }
        quot[shift] = c;
    }
    trim(&mut rem);
    trim(&mut quot);
    (quot, rem)
}

/// An element of Q(ζ_r) in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNum {
    order: u32,
    coeffs: Vec<Rat>,
}

impl CycNum {
    /// Builds an element from an arbitrary-length coefficient list in powers of ζ,
    /// reducing it modulo Φ_r.
    pub fn from_coeffs(order: u32, coeffs: Vec<Rat>) -> Result<Self, CycError> {
        let modulus = cyclotomic_polynomial(order)?;
        Ok(Self::reduce(order, coeffs, &modulus))
    }

    fn reduce(order: u32, mut coeffs: Vec<Rat>, modulus: &[BigInt]) -> Self {
        let deg = modulus.len() - 1;
        if coeffs.len() > deg {
            for top in (deg..coeffs.len()).rev() {
                let c = std::mem::take(&mut coeffs[top]);
                if c.is_zero() {
                    continue;
                }
                for (i, m) in modulus.iter().enumerate().take(deg) {
                    if !m.is_zero() {
                        let t = &c * Rat::from_integer(m.clone());
                        coeffs[top - deg + i] -= t;
                    }
                }
            }
            coeffs.truncate(deg);
        }
        coeffs.resize(deg, Rat::zero());
        CycNum { order, coeffs }
    }

    pub fn zero(order: u32) -> Result<Self, CycError> {
        if order == 0 {
            return Err(CycError::ZeroOrder);
        }
        Ok(CycNum {
            order,
            coeffs: vec![Rat::zero(); euler_phi(order)],
        })
    }

    pub fn one(order: u32) -> Result<Self, CycError> {
        Self::from_rat(order, Rat::one())
    }

    pub fn from_rat(order: u32, value: Rat) -> Result<Self, CycError> {
        let mut z = Self::zero(order)?;
        z.coeffs[0] = value;
        Ok(z)
    }

    pub fn from_int(order: u32, value: i64) -> Result<Self, CycError> {
        Self::from_rat(order, Rat::from_integer(value.into()))
    }

    /// ζ^k for the fixed primitive r-th root of unity ζ.
    pub fn zeta_pow(order: u32, k: i64) -> Result<Self, CycError> {
        if order == 0 {
            return Err(CycError::ZeroOrder);
        }
        let e = k.rem_euclid(order as i64) as usize;
        let mut coeffs = vec![Rat::zero(); e + 1];
        coeffs[e] = Rat::one();
        Self::from_coeffs(order, coeffs)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Coefficients in the basis `1, ζ, …, ζ^{φ(r)-1}`.
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, if this element lies in Q.
    pub fn as_rational(&self) -> Option<&Rat> {
        self.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| &self.coeffs[0])
    }

    fn check_order(&self, other: &Self) -> Result<(), CycError> {
        if self.order != other.order {
            return Err(CycError::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, CycError> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CycNum {
            order: self.order,
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, CycError> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CycNum {
            order: self.order,
            coeffs,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, CycError> {
        self.check_order(other)?;
        if self.coeffs.len() == 1 {
            return Ok(CycNum {
                order: self.order,
                coeffs: vec![&self.coeffs[0] * &other.coeffs[0]],
            });
        }
        let modulus = cyclotomic_polynomial(self.order)?;
        let prod = poly_mul(&self.coeffs, &other.coeffs);
        Ok(Self::reduce(self.order, prod, &modulus))
    }

    /// Multiplicative inverse, via the extended Euclidean algorithm against Φ_r.
    pub fn inv(&self) -> Result<Self, CycError> {
        if self.is_zero() {
            return Err(CycError::DivisionByZero);
        }
        if self.coeffs.len() == 1 {
            return Ok(CycNum {
                order: self.order,
                coeffs: vec![self.coeffs[0].recip()],
            });
        }
        let modulus = cyclotomic_polynomial(self.order)?;
        let m: Vec<Rat> = modulus.iter().map(|c| Rat::from_integer(c.clone())).collect();
        let mut a = self.coeffs.clone();
        trim(&mut a);
        // Invariant: s_i * self ≡ r_i (mod Φ_r).
        let (mut r0, mut r1) = (m, a);
        let (mut s0, mut s1): (Vec<Rat>, Vec<Rat>) = (Vec::new(), vec![Rat::one()]);
        while !r1.is_empty() {
            let (q, rem) = poly_divrem(&r0, &r1);
            let s_next = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s_next);
        }
        // Φ_r is irreducible, so the last nonzero remainder is a unit.
        debug_assert_eq!(r0.len(), 1);
        let scale = r0[0].recip();
        let coeffs = s0.into_iter().map(|c| c * &scale).collect();
        Ok(Self::reduce(self.order, coeffs, &modulus))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, CycError> {
        self.check_order(other)?;
        self.checked_mul(&other.inv()?)
    }

    pub fn scale(&self, factor: &Rat) -> Self {
        CycNum {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Parses the textual form produced by `Display`, plus `z^k` shorthand.
    pub fn parse(order: u32, text: &str) -> Result<Self, CycError> {
        if order == 0 {
            return Err(CycError::ZeroOrder);
        }
        Ok(expr::parse_constant(order, text)?)
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }
}

fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{i}"),
            };
            if mono.is_empty() {
                out.push_str(&fmt_rat(&abs));
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{}*{mono}", fmt_rat(&abs)));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum[{}]({})", self.order, self)
    }
}

// Operator impls panic on mixed orders; use the `checked_*` methods when the
// operands are not known to agree.

impl Add for &CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        self.checked_add(rhs).expect("CycNum addition")
    }
}

impl Sub for &CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        self.checked_sub(rhs).expect("CycNum subtraction")
    }
}

impl Mul for &CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        self.checked_mul(rhs).expect("CycNum multiplication")
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_poly(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    fn z(r: u32, k: i64) -> CycNum {
        CycNum::zeta_pow(r, k).unwrap()
    }

    fn rat(p: i64, q: i64) -> Rat {
        Rat::new(p.into(), q.into())
    }

    /// x^r - 1 = ∏_{d | r} Φ_d, checked by multiplying the memoized factors back.
    fn product_of_divisor_polys(r: u32) -> Vec<BigInt> {
        let mut acc = vec![BigInt::one()];
        for d in divisors(r) {
            let p = cyclotomic_polynomial(d).unwrap();
            let mut out = vec![BigInt::zero(); acc.len() + p.len() - 1];
            for (i, a) in acc.iter().enumerate() {
                for (j, b) in p.iter().enumerate() {
                    out[i + j] += a * b;
                }
            }
            acc = out;
        }
        acc
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1).unwrap(), int_poly(&[-1, 1]));
        assert_eq!(*cyclotomic_polynomial(2).unwrap(), int_poly(&[1, 1]));
        assert_eq!(*cyclotomic_polynomial(3).unwrap(), int_poly(&[1, 1, 1]));
        assert_eq!(*cyclotomic_polynomial(4).unwrap(), int_poly(&[1, 0, 1]));
        assert_eq!(*cyclotomic_polynomial(6).unwrap(), int_poly(&[1, -1, 1]));
        assert_eq!(
            *cyclotomic_polynomial(12).unwrap(),
            int_poly(&[1, 0, -1, 0, 1])
        );
        assert_eq!(format_int_poly(&cyclotomic_polynomial(1).unwrap(), "x"), "x - 1");
        assert_eq!(format_int_poly(&cyclotomic_polynomial(4).unwrap(), "x"), "x^2 + 1");
    }

    #[test]
    fn cyclotomic_polynomials_multiply_back_to_x_pow_r_minus_one() {
        for r in 1..=24u32 {
            let phi = cyclotomic_polynomial(r).unwrap();
            assert_eq!(phi.len() - 1, euler_phi(r), "degree of Phi_{r}");
            assert!(phi.last().unwrap().is_one(), "Phi_{r} is monic");
            let mut expected = vec![BigInt::zero(); r as usize + 1];
            expected[0] = -BigInt::one();
            expected[r as usize] = BigInt::one();
            assert_eq!(product_of_divisor_polys(r), expected);
        }
    }

    #[test]
    fn zero_order_is_rejected() {
        assert_eq!(cyclotomic_polynomial(0).unwrap_err(), CycError::ZeroOrder);
        assert_eq!(CycNum::zeta_pow(0, 1).unwrap_err(), CycError::ZeroOrder);
    }

    #[test]
    fn concurrent_first_access_agrees() {
        let handles: Vec<_> = (0..8)
            .map(|_| std::thread::spawn(|| cyclotomic_polynomial(30).unwrap()))
            .collect();
        let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        assert!(results.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn zeta_powers() {
        assert_eq!(z(2, 1), CycNum::from_int(2, -1).unwrap());
        assert_eq!(z(3, 3), CycNum::one(3).unwrap());
        assert_eq!(z(4, 2), CycNum::from_int(4, -1).unwrap());
        assert_eq!(z(5, 0), CycNum::one(5).unwrap());
        assert_eq!(z(5, -1), z(5, 4));
        assert_eq!(z(1, 7), CycNum::one(1).unwrap());
    }

    #[test]
    fn zeta_is_primitive() {
        for r in 1..=12u32 {
            for k in 1..r as i64 {
                assert!(!z(r, k).is_one(), "zeta_{r}^{k} should not be 1");
            }
            assert!(z(r, r as i64).is_one());
        }
    }

    #[test]
    fn field_examples() {
        assert_eq!(z(5, 1).inv().unwrap(), z(5, 4));
        let sum = &(&z(3, 0) + &z(3, 1)) + &z(3, 2);
        assert!(sum.is_zero());
        let a = &CycNum::from_int(4, 2).unwrap() + &z(4, 1);
        // (2 + i)^{-1} = (2 - i)/5
        let expected = CycNum::from_coeffs(4, vec![rat(2, 5), rat(-1, 5)]).unwrap();
        assert_eq!(a.inv().unwrap(), expected);
        assert!((&a * &a.inv().unwrap()).is_one());
    }

    #[test]
    fn errors() {
        assert_eq!(CycNum::zero(3).unwrap().inv().unwrap_err(), CycError::DivisionByZero);
        assert_eq!(
            z(3, 1).checked_add(&z(4, 1)).unwrap_err(),
            CycError::OrderMismatch { left: 3, right: 4 }
        );
    }

    #[test]
    fn display_and_parse() {
        let a = CycNum::from_coeffs(5, vec![rat(1, 2), rat(-3, 1), Rat::zero(), Rat::one()]).unwrap();
        assert_eq!(a.to_string(), "1/2 - 3*z + z^3");
        assert_eq!(CycNum::parse(5, &a.to_string()).unwrap(), a);
        assert_eq!(CycNum::parse(3, "z^4").unwrap(), z(3, 1));
        assert_eq!(CycNum::parse(2, "-z^1").unwrap(), CycNum::one(2).unwrap());
        assert_eq!(CycNum::zero(7).unwrap().to_string(), "0");
        assert!(CycNum::parse(3, "1 +").is_err());
        assert!(CycNum::parse(3, "x1").is_err());
    }

    #[test]
    fn reduction_is_idempotent() {
        let a = CycNum::from_coeffs(6, (0..9).map(|i| rat(i - 4, 3)).collect()).unwrap();
        assert_eq!(CycNum::from_coeffs(6, a.coeffs().to_vec()).unwrap(), a);
    }
}
