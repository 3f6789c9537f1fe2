//! Montgomery-type reductions and the Plantard multiplications.
//!
//! All algorithms share one [`ReductionContext`] holding the modulus, the
//! word size `n` (`beta = 2^n`) and every precomputed inverse. Each checked
//! entry point validates its own input ranges and the algorithm-specific
//! bound on `p`; the `*_unchecked` variants skip validation and are what the
//! butterflies and transform drivers call.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::crt;
use crate::error::{out_of_range, Error, Result};
use crate::ops::{Native, WordOps};

/// Number of times the `r == p` correction of [`ReductionContext::plantard_redc`]
/// has fired in this process.
static PLANTARD_CORRECTIONS: AtomicU64 = AtomicU64::new(0);

pub fn plantard_correction_hits() -> u64 {
    PLANTARD_CORRECTIONS.load(Ordering::Relaxed)
}

/// How a right shift of a negative value is rounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftSemantics {
    /// `sgn(x) * floor(|x| / 2^e)`: rounds toward zero.
    SignedFloor,
    /// `floor(x / 2^e)`: two's-complement arithmetic shift, rounds toward -inf.
    ArithmeticFloor,
}

impl ShiftSemantics {
    pub fn shift(self, x: i128, e: u32) -> i128 {
        match self {
            ShiftSemantics::SignedFloor => x / (1i128 << e),
            ShiftSemantics::ArithmeticFloor => x >> e,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ShiftSemantics::SignedFloor => "signed-floor",
            ShiftSemantics::ArithmeticFloor => "arithmetic-floor",
        }
    }
}

/// Modulus, word size and derived constants for every reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionContext {
    p: u64,
    n: u32,
    beta: u64,
    beta_mask: u64,
    wide_mask: u64,
    /// `p^{-1} mod beta`
    mont_p_inv: u64,
    /// `beta - p^{-1} mod beta`, i.e. `-p^{-1} mod beta`
    mont_k: u64,
    /// `p^{-1} mod 2^{2n}`
    mu: u64,
    /// `p^{-1} mod ±2^{2n}`
    mu_centered: i64,
    /// `beta mod p`
    mont_factor: u64,
    /// `-2^{2n} mod p`
    plantard_factor: u64,
    alpha: u32,
    ell: u32,
}

impl ReductionContext {
    pub const MIN_WORD_BITS: u32 = 2;
    pub const MAX_WORD_BITS: u32 = 32;

    /// Builds a context for odd `1 < p < 2^n`, `2 <= n <= 32`.
    pub fn new(p: u64, word_bits: u32) -> Result<Self> {
        if !(Self::MIN_WORD_BITS..=Self::MAX_WORD_BITS).contains(&word_bits) {
            return Err(Error::InvalidModulus(format!(
                "word size n = {word_bits} must lie in [{}, {}]",
                Self::MIN_WORD_BITS,
                Self::MAX_WORD_BITS
            )));
        }
        let beta = 1u64 << word_bits;
        if p <= 1 || p.is_multiple_of(2) || p >= beta {
            return Err(Error::InvalidModulus(format!(
                "p = {p} must be odd with 1 < p < 2^{word_bits}"
            )));
        }
        let wide = 1u128 << (2 * word_bits);
        let mont_p_inv = crt::mod_inverse(p as u128, beta as u128)? as u64;
        let mu = crt::mod_inverse(p as u128, wide)? as u64;
        let mu_centered = crt::centered_mod(mu as i128, wide) as i64;
        let wide_mod_p = (wide % p as u128) as u64;
        Ok(Self {
            p,
            n: word_bits,
            beta,
            beta_mask: beta - 1,
            wide_mask: (wide - 1) as u64,
            mont_p_inv,
            mont_k: (beta - mont_p_inv) & (beta - 1),
            mu,
            mu_centered,
            mont_factor: beta % p,
            plantard_factor: (p - wide_mod_p) % p,
            alpha: 0,
            ell: 0,
        })
    }

    /// Slack exponent of the signed Plantard reduction.
    pub fn with_alpha(mut self, alpha: u32) -> Self {
        self.alpha = alpha;
        self
    }

    /// `log2` of the transform size, bounding lazy inputs of the modified
    /// Plantard multiplication to `2^ell * p`.
    pub fn with_ell(mut self, ell: u32) -> Self {
        self.ell = ell;
        self
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn word_bits(&self) -> u32 {
        self.n
    }
    pub fn beta(&self) -> u64 {
        self.beta
    }
    pub fn beta_mask(&self) -> u64 {
        self.beta_mask
    }
    pub fn wide_mask(&self) -> u64 {
        self.wide_mask
    }
    /// `p^{-1} mod beta`.
    pub fn mont_p_inv(&self) -> u64 {
        self.mont_p_inv
    }
    /// `-p^{-1} mod beta`.
    pub fn mont_k(&self) -> u64 {
        self.mont_k
    }
    pub fn mu(&self) -> u64 {
        self.mu
    }
    pub fn mu_centered(&self) -> i64 {
        self.mu_centered
    }
    pub fn alpha(&self) -> u32 {
        self.alpha
    }
    pub fn ell(&self) -> u32 {
        self.ell
    }

    // ---- preconditions -------------------------------------------------

    pub fn check_signed_montgomery(&self) -> Result<()> {
        if 2 * self.p >= self.beta {
            return Err(Error::Precondition(format!(
                "signed Montgomery needs 2p < beta: 2*{} >= 2^{}",
                self.p, self.n
            )));
        }
        Ok(())
    }

    /// `p < 2^n / phi` with `phi = (1 + sqrt 5) / 2`, decided exactly as
    /// `5p^2 < (2^{n+1} - p)^2`.
    pub fn check_plantard(&self) -> Result<()> {
        let p = self.p as u128;
        let two_beta = 2 * self.beta as u128;
        if p < two_beta && 5 * p * p < (two_beta - p) * (two_beta - p) {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "Plantard needs p < 2^n/phi: p = {} with n = {}",
                self.p, self.n
            )))
        }
    }

    pub fn check_signed_plantard(&self) -> Result<()> {
        if self.alpha + 1 >= self.n || self.p >= 1u64 << (self.n - self.alpha - 1) {
            return Err(Error::Precondition(format!(
                "signed Plantard needs p < 2^(n-alpha-1): p = {}, n = {}, alpha = {}",
                self.p, self.n, self.alpha
            )));
        }
        Ok(())
    }

    pub fn check_modified_plantard(&self) -> Result<()> {
        if self.ell + 2 >= self.n || self.p >= 1u64 << (self.n - self.ell - 2) {
            return Err(Error::Precondition(format!(
                "modified Plantard needs p < 2^(n-ell-2): p = {}, n = {}, ell = {}",
                self.p, self.n, self.ell
            )));
        }
        Ok(())
    }

    // ---- Montgomery ----------------------------------------------------

    /// `T * 2^{-n} mod p` for `0 <= T < p^2`, result in `[0, p)`.
    pub fn mont_redc(&self, t: u64) -> Result<u64> {
        let p2 = self.p as u128 * self.p as u128;
        if t as u128 >= p2 {
            return Err(out_of_range("T", t, format!("[0, {p2})")));
        }
        Ok(self.mont_redc_unchecked(t))
    }

    #[inline]
    pub fn mont_redc_unchecked(&self, t: u64) -> u64 {
        let m = ((t & self.beta_mask) as u128 * self.mont_k as u128) as u64 & self.beta_mask;
        let sum = t as u128 + m as u128 * self.p as u128;
        debug_assert_eq!(sum & self.beta_mask as u128, 0, "T + mp must be divisible by R");
        let t = (sum >> self.n) as u64;
        debug_assert!(t < 2 * self.p);
        if t >= self.p {
            t - self.p
        } else {
            t
        }
    }

    /// `A * beta^{-1} mod p` in `(-p, p)` for `-p*beta/2 < A < p*beta/2`.
    pub fn signed_mont_redc(&self, a: i64) -> Result<i64> {
        self.check_signed_montgomery()?;
        let half = (self.p as i128 * self.beta as i128) / 2;
        if (a as i128) <= -half || (a as i128) >= half {
            return Err(out_of_range("A", a, format!("(-{half}, {half})")));
        }
        Ok(self.signed_mont_redc_unchecked(a))
    }

    #[inline]
    pub fn signed_mont_redc_unchecked(&self, a: i64) -> i64 {
        let a1 = a >> self.n;
        let a0 = (a as u64) & self.beta_mask;
        let m_low = a0.wrapping_mul(self.mont_p_inv) & self.beta_mask;
        // Sign-extend the low n bits: m = a0 * p^{-1} mod ±beta.
        let shift = 64 - self.n;
        let m = ((m_low << shift) as i64) >> shift;
        let mp = m * self.p as i64;
        debug_assert_eq!((a - mp) & self.beta_mask as i64, 0, "A - mp must be divisible by beta");
        let r = a1 - (mp >> self.n);
        debug_assert!(r.unsigned_abs() < self.p);
        r
    }

    // ---- Plantard ------------------------------------------------------

    /// `W * T * (-2^{-2n}) mod p` in `[0, p)` for `0 <= W, T <= p`, including
    /// the `r == p -> 0` correction.
    pub fn plantard_redc(&self, w: u64, t: u64) -> Result<u64> {
        self.check_plantard()?;
        let range = || format!("[0, {}]", self.p);
        if w > self.p {
            return Err(out_of_range("W", w, range()));
        }
        if t > self.p {
            return Err(out_of_range("T", t, range()));
        }
        let h = w.wrapping_mul(t).wrapping_mul(self.mu) & self.wide_mask;
        let r = ((h >> self.n) + 1).wrapping_mul(self.p) >> self.n;
        if r == self.p {
            PLANTARD_CORRECTIONS.fetch_add(1, Ordering::Relaxed);
            return Ok(0);
        }
        Ok(r)
    }

    /// The signed Plantard reduction exactly as published:
    /// `r = sfloor((sfloor((W T mu mod ±2^{2n}) / 2^n) + 2^alpha) p / 2^n)`
    /// with `sfloor` chosen by `sem`.
    ///
    /// This formula is **not** a correct reduction; compare its output with
    /// [`crate::analysis::crt_predicted_value`]. It is kept out of all
    /// transform paths.
    pub fn signed_plantard_redc(&self, w: i64, t: i64, sem: ShiftSemantics) -> Result<i64> {
        self.check_signed_plantard()?;
        self.check_signed_plantard_inputs(w, t)?;
        let h = self.signed_plantard_h(w as i128 * t as i128);
        let q = sem.shift(h, self.n);
        let r = sem.shift((q + (1i128 << self.alpha)) * self.p as i128, self.n);
        Ok(r as i64)
    }

    pub(crate) fn check_signed_plantard_inputs(&self, w: i64, t: i64) -> Result<()> {
        let lim = (self.p as i64) << self.alpha;
        let range = || format!("[-{lim}, {lim}]");
        if w.abs() > lim {
            return Err(out_of_range("W", w, range()));
        }
        if t.abs() > lim {
            return Err(out_of_range("T", t, range()));
        }
        Ok(())
    }

    /// `A * mu mod ±2^{2n}`.
    pub(crate) fn signed_plantard_h(&self, a: i128) -> i128 {
        let wide = 1u128 << (2 * self.n);
        crt::centered_mod(a * self.mu_centered as i128, wide)
    }

    /// `W * T * (-2^{-2n}) mod p` in `[0, p)` for `0 <= W < p`,
    /// `0 <= T < 2^ell p`, without any correction step.
    pub fn modified_plantard_mul(&self, w: u64, t: u64) -> Result<u64> {
        self.check_modified_plantard()?;
        if w >= self.p {
            return Err(out_of_range("W", w, format!("[0, {})", self.p)));
        }
        let t_max = self.p << self.ell;
        if t >= t_max {
            return Err(out_of_range("T", t, format!("[0, {t_max})")));
        }
        Ok(self.modified_plantard_mul_unchecked(w, t))
    }

    #[inline(always)]
    pub fn modified_plantard_mul_unchecked(&self, w: u64, t: u64) -> u64 {
        self.modified_plantard_with(&Native, w, t)
    }

    #[inline(always)]
    pub(crate) fn modified_plantard_with<O: WordOps>(&self, o: &O, w: u64, t: u64) -> u64 {
        let h = o.and(o.mul(o.mul(w, t), self.mu), self.wide_mask);
        let r = o.shr(o.mul(o.add(o.shr(h, self.n), 1), self.p), self.n);
        debug_assert!(r < self.p, "modified Plantard output {r} not below p = {}", self.p);
        r
    }

    /// `h = W T mu mod 2^{2n}` of the modified Plantard multiplication.
    pub fn modified_plantard_h(&self, w: u64, t: u64) -> u64 {
        w.wrapping_mul(t).wrapping_mul(self.mu) & self.wide_mask
    }

    // ---- domain conversions --------------------------------------------

    /// `w * (-2^{2n}) mod p`, so that `modified_plantard_mul(ŵ, T) == w * T (mod p)`.
    pub fn to_plantard_domain(&self, w: u64) -> Result<u64> {
        if w >= self.p {
            return Err(out_of_range("w", w, format!("[0, {})", self.p)));
        }
        Ok(self.to_plantard_domain_unchecked(w))
    }

    pub(crate) fn to_plantard_domain_unchecked(&self, w: u64) -> u64 {
        (w as u128 * self.plantard_factor as u128 % self.p as u128) as u64
    }

    /// `w * 2^n mod p`.
    pub fn to_montgomery_domain(&self, w: u64) -> Result<u64> {
        if w >= self.p {
            return Err(out_of_range("w", w, format!("[0, {})", self.p)));
        }
        Ok(self.to_montgomery_domain_unchecked(w))
    }

    pub(crate) fn to_montgomery_domain_unchecked(&self, w: u64) -> u64 {
        (w as u128 * self.mont_factor as u128 % self.p as u128) as u64
    }
}
