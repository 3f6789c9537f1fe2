//! Slow ground truth. Nothing in here uses word-size tricks: no wrapping,
//! no shifts standing in for division, and an inverse routine of its own so
//! that it shares no code with the kernels it is used to check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact integer type for oracle arithmetic. 128 bits covers `4n` for every
/// supported word size.
pub type WideInt = i128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignMode {
    /// `[0, p)`
    Unsigned,
    /// `[-p/2, p/2)`
    Centered,
}

/// Which power-of-two factor to apply before reducing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    One,
    RInv,
    NegRInv,
}

pub fn inverse_mod(a: WideInt, m: WideInt) -> Option<WideInt> {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1 as WideInt, 0 as WideInt);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m))
}

/// `a * factor mod p`, canonicalised per `sign_mode`.
pub fn reference_residue(a: WideInt, p: u64, r: u128, sign_mode: SignMode, factor: Factor) -> WideInt {
    let p = p as WideInt;
    let r_inv = inverse_mod((r % p as u128) as WideInt, p).expect("p odd, r a power of two");
    let f = match factor {
        Factor::One => 1,
        Factor::RInv => r_inv,
        Factor::NegRInv => p - r_inv,
    };
    let v = (a.rem_euclid(p) * f).rem_euclid(p);
    match sign_mode {
        SignMode::Unsigned => v,
        SignMode::Centered => {
            if 2 * v >= p {
                v - p
            } else {
                v
            }
        }
    }
}

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    let mut b = base % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

/// Evaluates `f` at `1, w, w^2, ...` by Horner's rule. Index `i` holds `f(w^i)`.
pub fn naive_dft(f: &[u64], omega: u64, p: u64) -> Vec<u64> {
    let n = f.len();
    let mut out = Vec::with_capacity(n);
    let mut x = 1 % p;
    for _ in 0..n {
        let mut acc = 0u64;
        for &c in f.iter().rev() {
            acc = (mul_mod(acc, x, p) + c % p) % p;
        }
        out.push(acc);
        x = mul_mod(x, omega, p);
    }
    out
}

/// `c_k = sum over i + j == k (mod N) of a_i * b_j (mod p)`.
pub fn schoolbook_cyclic_convolution(a: &[u64], b: &[u64], p: u64) -> Result<Vec<u64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let n = a.len();
    let mut acc = vec![0u128; n];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            let k = (i + j) % n;
            acc[k] = (acc[k] + ai as u128 * bj as u128) % p as u128;
        }
    }
    Ok(acc.into_iter().map(|v| v as u64).collect())
}
