//! Two-modulus Chinese remainder identities.
//!
//! Everything here runs on 128-bit integers so that the exact identity
//! `p_inv * p + r_inv * r == 1 + p * r` can be evaluated for a 64-bit radix
//! without wrapping. These functions back the precomputation of the
//! reduction constants and serve as test oracles; they are not hot paths.

use crate::error::{out_of_range, Error, Result};

/// An odd modulus `p > 1` paired with a power-of-two radix `r = 2^e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModulusPair {
    p: u128,
    r: u128,
}

impl ModulusPair {
    /// `r` may be at most `2^64` and `p` below `2^63` so that `p * r` fits.
    pub fn new(p: u128, r: u128) -> Result<Self> {
        if p <= 1 || p.is_multiple_of(2) {
            return Err(Error::InvalidModulus(format!("p = {p} must be odd and > 1")));
        }
        if p >= 1 << 63 {
            return Err(Error::InvalidModulus(format!("p = {p} must be below 2^63")));
        }
        if r <= 1 || !r.is_power_of_two() || r > 1 << 64 {
            return Err(Error::InvalidModulus(format!(
                "r = {r} must be a power of two in [2, 2^64]"
            )));
        }
        Ok(Self { p, r })
    }

    pub fn p(&self) -> u128 {
        self.p
    }

    pub fn r(&self) -> u128 {
        self.r
    }

    pub fn product(&self) -> u128 {
        self.p * self.r
    }
}

/// Positive inverses `p^{-1} mod r` and `r^{-1} mod p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QinWitness {
    pub p_inv: u128,
    pub r_inv: u128,
}

/// Returns `x` in `[1, m)` with `a * x == 1 (mod m)`.
///
/// Power-of-two moduli use Newton lifting, which doubles the number of
/// correct low bits per step; any other modulus goes through extended Euclid.
pub fn mod_inverse(a: u128, m: u128) -> Result<u128> {
    if m <= 1 {
        return Err(Error::InvalidModulus(format!("m = {m} must be > 1")));
    }
    if m.is_power_of_two() {
        if a.is_multiple_of(2) {
            return Err(Error::NotInvertible { value: a, modulus: m });
        }
        let bits = m.trailing_zeros();
        // a * a == 1 (mod 8) for odd a, so a is already correct to 3 bits.
        let mut x = a;
        let mut good = 3;
        while good < bits {
            x = x.wrapping_mul(2u128.wrapping_sub(a.wrapping_mul(x)));
            good *= 2;
        }
        return Ok(x & (m - 1));
    }
    let (g, x) = ext_gcd(a % m, m);
    if g != 1 {
        return Err(Error::NotInvertible { value: a, modulus: m });
    }
    Ok(x)
}

/// Returns `(gcd(a, m), a^{-1} mod m)`; the second component is only
/// meaningful when the gcd is 1.
fn ext_gcd(a: u128, m: u128) -> (u128, u128) {
    // Bezout coefficients tracked modulo m to stay unsigned.
    let (mut old_r, mut r) = (a, m);
    let (mut old_s, mut s) = (1u128, 0u128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        let qs = mul_mod(q % m, s, m);
        (old_s, s) = (s, (old_s + m - qs) % m);
    }
    (old_r, old_s % m)
}

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if let Some(v) = a.checked_mul(b) {
        return v % m;
    }
    // Double-and-add; only reached for moduli above 2^64.
    let (mut acc, mut base, mut e) = (0u128, a % m, b);
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc + base) % m;
        }
        base = (base + base) % m;
        e >>= 1;
    }
    acc
}

/// Computes both positive inverses for a modulus pair. The returned witness
/// satisfies `p_inv * p + r_inv * r == 1 + p * r` exactly.
pub fn qin_identity(p: u128, r: u128) -> Result<QinWitness> {
    let pair = ModulusPair::new(p, r)?;
    Ok(witness(&pair))
}

fn witness(pair: &ModulusPair) -> QinWitness {
    let p_inv = mod_inverse(pair.p % pair.r, pair.r).expect("odd p is a unit mod 2^e");
    let r_inv = mod_inverse(pair.r % pair.p, pair.p).expect("2^e is a unit mod odd p");
    debug_assert_eq!(p_inv * pair.p + r_inv * pair.r, 1 + pair.p * pair.r);
    QinWitness { p_inv, r_inv }
}

/// Solves `x == r_p (mod p)`, `x == r_r (mod r)` for `x` in `[0, p*r)` as
/// `r_r * p_inv * p + r_p * r_inv * r (mod p*r)`.
pub fn crt_recombine(r_p: u128, r_r: u128, pair: &ModulusPair) -> Result<u128> {
    if r_p >= pair.p {
        return Err(out_of_range("r_p", r_p as i128, format!("[0, {})", pair.p)));
    }
    if r_r >= pair.r {
        return Err(out_of_range("r_r", r_r as i128, format!("[0, {})", pair.r)));
    }
    let w = witness(pair);
    // Each term is reduced by its own cofactor first so the sum stays below 2pr.
    let lhs = mul_mod(r_r, w.p_inv, pair.r) * pair.p;
    let rhs = (r_p * w.r_inv % pair.p) * pair.r;
    Ok((lhs + rhs) % pair.product())
}

/// Representative of `x mod m` in `[-m/2, m/2)`; `m` must be even.
pub fn centered_mod(x: i128, m: u128) -> i128 {
    assert!(m >= 2 && m.is_multiple_of(2), "centered_mod needs an even modulus >= 2");
    let m = m as i128;
    let r = x.rem_euclid(m);
    if r >= m / 2 {
        r - m
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_inverse(a: u128, m: u128) -> Option<u128> {
        (1..m).find(|x| a * x % m == 1)
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(13, 65536).unwrap(), 20165);
        assert_eq!(13 * 20165, 4 * 65536 + 1);
        assert_eq!(mod_inverse(17, 32).unwrap(), 17);
        assert_eq!(mod_inverse(1, 97).unwrap(), 1);
        assert_eq!(mod_inverse(1, 1 << 20).unwrap(), 1);
    }

    #[test]
    fn inverse_rejects_non_units() {
        assert!(matches!(mod_inverse(6, 64), Err(Error::NotInvertible { .. })));
        assert!(matches!(mod_inverse(6, 9), Err(Error::NotInvertible { .. })));
        assert!(matches!(mod_inverse(0, 7), Err(Error::NotInvertible { .. })));
        assert!(matches!(mod_inverse(3, 1), Err(Error::InvalidModulus(_))));
    }

    #[test]
    fn inverse_matches_brute_force_scan() {
        for m in 2..=4096u128 {
            let step = if m > 512 { 37 } else { 1 };
            for a in (0..m).step_by(step) {
                assert_eq!(mod_inverse(a, m).ok(), brute_inverse(a, m), "a={a} m={m}");
            }
        }
    }

    #[test]
    fn inverse_for_wide_power_of_two() {
        let m = 1u128 << 64;
        for a in [3u128, 12289, 7681, (1 << 63) + 1] {
            let x = mod_inverse(a, m).unwrap();
            assert_eq!(a.wrapping_mul(x) % m, 1);
        }
    }

    #[test]
    fn qin_examples() {
        let w = qin_identity(31, 4096).unwrap();
        assert_eq!((w.p_inv, w.r_inv), (3039, 8));
        assert_eq!(3039 * 31 + 8 * 4096, 126977);
        assert_eq!(qin_identity(3, 4).unwrap(), QinWitness { p_inv: 3, r_inv: 1 });
        assert_eq!(qin_identity(3, 2).unwrap(), QinWitness { p_inv: 1, r_inv: 2 });
        assert!(qin_identity(4, 8).is_err());
        assert!(qin_identity(5, 12).is_err());
    }

    #[test]
    fn qin_identity_holds_over_grid() {
        for p in (3..=255u128).step_by(2) {
            for e in 2..=16 {
                let r = 1u128 << e;
                let w = qin_identity(p, r).unwrap();
                assert_eq!(w.p_inv * p + w.r_inv * r, 1 + p * r);
                assert!(w.p_inv >= 1 && w.p_inv < r);
                assert!(w.r_inv >= 1 && w.r_inv < p);
            }
        }
    }

    #[test]
    fn recombine_examples() {
        let pair = ModulusPair::new(3, 4).unwrap();
        assert_eq!(crt_recombine(2, 1, &pair).unwrap(), 5);
        assert_eq!(crt_recombine(0, 0, &pair).unwrap(), 0);
        assert!(crt_recombine(3, 0, &pair).is_err());
        assert!(crt_recombine(0, 4, &pair).is_err());
    }

    #[test]
    fn recombine_inverts_split() {
        let pair = ModulusPair::new(31, 64).unwrap();
        for t in 0..31 * 64 {
            assert_eq!(crt_recombine(t % 31, t % 64, &pair).unwrap(), t);
        }
        let wide = ModulusPair::new(12289, 1 << 64).unwrap();
        for t in [0u128, 1, 12288, (1 << 64) + 5, 12289 * (1 << 64) - 1] {
            assert_eq!(crt_recombine(t % 12289, t % (1 << 64), &wide).unwrap(), t);
        }
    }

    #[test]
    fn centered_examples() {
        assert_eq!(centered_mod(612, 64), -28);
        assert_eq!(centered_mod(-1057, 4096), -1057);
        assert_eq!(centered_mod(0, 64), 0);
        assert_eq!(centered_mod(32, 64), -32);
        assert_eq!(centered_mod(31, 64), 31);
        for x in -300i128..300 {
            let d = centered_mod(x, 64) - x.rem_euclid(64);
            assert!(d == 0 || d == -64);
        }
    }
}
