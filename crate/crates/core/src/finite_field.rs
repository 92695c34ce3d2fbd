//! Point counts of arrangement complements over F_q, by exhaustive enumeration.
//!
//! ζ is sent to `g^((q-1)/r)` for the smallest primitive root `g` mod q, which
//! has multiplicative order exactly r.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::arrangement::Arrangement;
use crate::cyclotomic::{CycNum, Rat};

pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiniteFieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("F_{q} has no element of multiplicative order {r} (need q = 1 mod r)")]
    NoRootOfUnity { q: u64, r: u32 },
    #[error("{q} divides a coefficient denominator")]
    BadPrime { q: u64 },
    #[error("enumerating {q}^{n} points exceeds the cap of {cap}")]
    TooLarge { q: u64, n: usize, cap: u64 },
}

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1u64 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % q as u128) as u64;
        }
        base = (base as u128 * base as u128 % q as u128) as u64;
        exp >>= 1;
    }
    acc
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            out.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Smallest generator of the multiplicative group of F_q.
pub fn smallest_primitive_root(q: u64) -> u64 {
    if q == 2 {
        return 1;
    }
    let factors = prime_factors(q - 1);
    (2..q)
        .find(|&g| factors.iter().all(|&p| pow_mod(g, (q - 1) / p, q) != 1))
        .expect("prime fields are cyclic")
}

/// Image of ζ_r in F_q.
pub fn root_of_unity(q: u64, r: u32) -> Result<u64, FiniteFieldError> {
    if !is_prime(q) {
        return Err(FiniteFieldError::NotPrime(q));
    }
    if !(q - 1).is_multiple_of(r as u64) {
        return Err(FiniteFieldError::NoRootOfUnity { q, r });
    }
    Ok(pow_mod(smallest_primitive_root(q), (q - 1) / r as u64, q))
}

fn rat_mod(c: &Rat, q: u64) -> Result<u64, FiniteFieldError> {
    let qb = BigInt::from(q);
    let den = c.denom().mod_floor(&qb);
    if den.is_zero() {
        return Err(FiniteFieldError::BadPrime { q });
    }
    let num = c.numer().mod_floor(&qb).to_u64().expect("reduced mod q");
    let den = den.to_u64().expect("reduced mod q");
    Ok((num as u128 * pow_mod(den, q - 2, q) as u128 % q as u128) as u64)
}

fn cyc_mod(c: &CycNum, q: u64, omega: u64) -> Result<u64, FiniteFieldError> {
    let mut acc = 0u64;
    let mut power = 1u64;
    for coeff in c.coeffs() {
        let v = rat_mod(coeff, q)?;
        acc = ((acc as u128 + v as u128 * power as u128) % q as u128) as u64;
        power = (power as u128 * omega as u128 % q as u128) as u64;
    }
    Ok(acc)
}

/// Number of points of F_q^n on none of the hyperplanes.
pub fn complement_count_mod_q(arr: &Arrangement, q: u64, cap: u64) -> Result<u64, FiniteFieldError> {
    let omega = root_of_unity(q, arr.root_order())?;
    let n = arr.ambient_dim();
    let total = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > cap as u128 {
        return Err(FiniteFieldError::TooLarge { q, n, cap });
    }
    let forms: Vec<Vec<u64>> = arr
        .hyperplanes()
        .iter()
        .map(|h| h.coeffs().iter().map(|c| cyc_mod(c, q, omega)).collect())
        .collect::<Result<_, _>>()?;
    let count = (0..q)
        .into_par_iter()
        .map(|first| {
            let mut point = vec![0u64; n];
            point[0] = first;
            let mut count = 0u64;
            loop {
                let off_all = forms.iter().all(|f| {
                    f.iter()
                        .zip(&point)
                        .fold(0u128, |acc, (&a, &x)| (acc + a as u128 * x as u128) % q as u128)
                        != 0
                });
                if off_all {
                    count += 1;
                }
                // odometer over coordinates 1..n
                let mut i = 1;
                while i < n {
                    point[i] += 1;
                    if point[i] < q {
                        break;
                    }
                    point[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
            count
        })
        .sum();
    Ok(count)
}

/// Smallest prime `q >= floor` with `q = 1 mod r` that does not divide any
/// coefficient denominator of the arrangement.
pub fn smallest_good_prime(arr: &Arrangement, floor: u64) -> u64 {
    let r = arr.root_order() as u64;
    let dens: Vec<BigInt> = arr
        .hyperplanes()
        .iter()
        .flat_map(|h| h.coeffs().iter().map(CycNum::denominator_lcm))
        .collect();
    (floor.max(2)..)
        .find(|&q| {
            is_prime(q) && (q - 1) % r == 0 && dens.iter().all(|d| !(d % BigInt::from(q)).is_zero())
        })
        .expect("infinitely many primes are 1 mod r")
}
