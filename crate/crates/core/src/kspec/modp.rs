//! Arithmetic in `F_p` for a prime `p = 1 mod 4`, with `Z[i]` mapped through a
//! fixed square root of `-1`. Used only for evaluation ranks at random points.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use crate::exactlin::Scalar;

pub const P: u64 = 4_611_686_018_427_387_817;
/// A square root of `-1` mod `P`.
pub const SQRT_MINUS_ONE: u64 = 4_490_822_397_581_186_023;

pub fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

pub fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

pub fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

pub fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

pub fn inv(a: u64) -> u64 {
    assert!(a != 0, "inverse of zero mod p");
    pow(a, P - 2)
}

fn reduce(n: &BigInt) -> u64 {
    let r = n.mod_floor(&BigInt::from(P));
    debug_assert!(!r.is_negative());
    r.to_u64().expect("reduced below p")
}

/// Image of a Gaussian rational; `None` when a denominator vanishes mod `p`.
pub fn from_scalar(s: &Scalar) -> Option<u64> {
    let part = |q: &num_rational::BigRational| -> Option<u64> {
        let d = reduce(q.denom());
        if d == 0 {
            return None;
        }
        Some(mul(reduce(q.numer()), inv(d)))
    };
    Some(add(part(s.re())?, mul(part(s.im())?, SQRT_MINUS_ONE)))
}

/// Incremental row echelon form over `F_p`.
#[derive(Clone, Debug)]
pub struct Echelon {
    cols: usize,
    rows: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Echelon { cols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.cols
    }

    pub fn insert(&mut self, mut v: Vec<u64>) -> bool {
        for (p, row) in &self.rows {
            let f = v[*p];
            if f == 0 {
                continue;
            }
            for k in *p..self.cols {
                if row[k] != 0 {
                    v[k] = sub(v[k], mul(row[k], f));
                }
            }
        }
        let Some(p) = v.iter().position(|&x| x != 0) else { return false };
        let iv = inv(v[p]);
        for x in v.iter_mut().skip(p) {
            *x = mul(*x, iv);
        }
        self.rows.push((p, v));
        true
    }
}
