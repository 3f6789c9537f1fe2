//! Validated transform parameters and twiddle tables.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::butterflies::{MontTwiddle, NtlTwiddle, PlantardTwiddle, ScottConfig};
use crate::error::{Error, Result};
use crate::oracle::{inverse_mod, mul_mod, pow_mod};
use crate::reductions::ReductionContext;

/// The butterfly family a whole transform is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Ntl,
    Harvey,
    Scott,
    Improved,
}

impl TransformKind {
    pub const ALL: [TransformKind; 4] = [
        TransformKind::Ntl,
        TransformKind::Harvey,
        TransformKind::Scott,
        TransformKind::Improved,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Ntl => "ntl",
            TransformKind::Harvey => "harvey",
            TransformKind::Scott => "scott",
            TransformKind::Improved => "improved",
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TransformKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

/// Twiddles for one kind in its own encoding.
///
/// `forward` is in the forward driver's access order, `inverse` holds
/// `omega^{-brv(k)}` for `k < N/2`, and `n_inv` encodes `N^{-1}`.
#[derive(Debug, Clone)]
pub struct KindTables<T> {
    pub forward: Vec<T>,
    pub inverse: Vec<T>,
    pub n_inv: T,
}

/// Plantard-domain tables plus the two constants the improved path needs:
/// an encoded one (`modified_plantard_mul(one, x) == x mod p`) and the
/// encoder (`modified_plantard_mul(encode, x) == x (-2^{2n}) mod p`).
#[derive(Debug, Clone)]
pub struct ImprovedTables {
    pub tables: KindTables<PlantardTwiddle>,
    pub one: PlantardTwiddle,
    pub encode: PlantardTwiddle,
}

#[derive(Debug, Clone)]
pub struct NttParams {
    p: u64,
    size: usize,
    ell: u32,
    omega: u64,
    omega_inv: u64,
    n_inv: u64,
    ctx: ReductionContext,
    scott_cfg: Option<ScottConfig>,
    kinds: Vec<TransformKind>,
    ntl: Option<KindTables<NtlTwiddle>>,
    harvey: Option<KindTables<MontTwiddle>>,
    scott: Option<KindTables<MontTwiddle>>,
    improved: Option<ImprovedTables>,
}

impl NttParams {
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn size(&self) -> usize {
        self.size
    }
    pub fn ell(&self) -> u32 {
        self.ell
    }
    pub fn word_bits(&self) -> u32 {
        self.ctx.word_bits()
    }
    pub fn beta(&self) -> u64 {
        self.ctx.beta()
    }
    pub fn omega(&self) -> u64 {
        self.omega
    }
    pub fn omega_inv(&self) -> u64 {
        self.omega_inv
    }
    pub fn n_inv(&self) -> u64 {
        self.n_inv
    }
    pub fn ctx(&self) -> &ReductionContext {
        &self.ctx
    }
    pub fn kinds(&self) -> &[TransformKind] {
        &self.kinds
    }
    pub fn supports(&self, kind: TransformKind) -> bool {
        self.kinds.contains(&kind)
    }
    pub fn scott_config(&self) -> Option<&ScottConfig> {
        self.scott_cfg.as_ref()
    }
    pub fn ntl_tables(&self) -> Option<&KindTables<NtlTwiddle>> {
        self.ntl.as_ref()
    }
    pub fn harvey_tables(&self) -> Option<&KindTables<MontTwiddle>> {
        self.harvey.as_ref()
    }
    pub fn scott_tables(&self) -> Option<&KindTables<MontTwiddle>> {
        self.scott.as_ref()
    }
    pub fn improved_tables(&self) -> Option<&ImprovedTables> {
        self.improved.as_ref()
    }

    pub(crate) fn require(&self, kind: TransformKind) -> Result<()> {
        if self.supports(kind) {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "parameters (p = {}, N = {}, n = {}) were not built for kind `{kind}`",
                self.p,
                self.size,
                self.word_bits()
            )))
        }
    }

    /// Plain residues of a kind's forward and inverse tables.
    pub fn decoded_tables(&self, kind: TransformKind) -> Option<(Vec<u64>, Vec<u64>)> {
        let ctx = &self.ctx;
        match kind {
            TransformKind::Ntl => self.ntl.as_ref().map(|t| {
                (
                    t.forward.iter().map(|w| w.plain()).collect(),
                    t.inverse.iter().map(|w| w.plain()).collect(),
                )
            }),
            TransformKind::Harvey | TransformKind::Scott => {
                let t = if kind == TransformKind::Harvey {
                    &self.harvey
                } else {
                    &self.scott
                };
                t.as_ref().map(|t| {
                    (
                        t.forward.iter().map(|w| w.decode(ctx)).collect(),
                        t.inverse.iter().map(|w| w.decode(ctx)).collect(),
                    )
                })
            }
            TransformKind::Improved => self.improved.as_ref().map(|t| {
                (
                    t.tables.forward.iter().map(|w| w.decode(ctx)).collect(),
                    t.tables.inverse.iter().map(|w| w.decode(ctx)).collect(),
                )
            }),
        }
    }
}

/// Reverses the low `bits` bits of `i`.
pub fn bit_reverse(i: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS - bits)
    }
}

/// `omega^{brv(k)}` for `k < N/2` (`brv` over `log2(N) - 1` bits).
pub(crate) fn bitrev_powers(omega: u64, size: usize, p: u64) -> Vec<u64> {
    let half = size / 2;
    let bits = half.trailing_zeros();
    (0..half)
        .map(|k| pow_mod(omega, bit_reverse(k, bits) as u64, p))
        .collect()
}

/// Decimation-in-frequency twiddles in loop order: for half-length
/// `m = N/2, N/4, ..., 1`, the powers `omega^{j N / 2m}` for `j < m`.
pub(crate) fn dif_powers(omega: u64, size: usize, p: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(size.saturating_sub(1));
    let mut m = size / 2;
    while m >= 1 {
        let step = pow_mod(omega, (size / (2 * m)) as u64, p);
        let mut w = 1;
        for _ in 0..m {
            out.push(w);
            w = mul_mod(w, step, p);
        }
        m /= 2;
    }
    out
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest `omega` of multiplicative order exactly `size` modulo prime `p`.
pub fn find_primitive_root(p: u64, size: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::InvalidModulus(format!("p = {p} is not prime")));
    }
    if size == 0 || !(p - 1).is_multiple_of(size) {
        return Err(Error::Precondition(format!(
            "N = {size} does not divide p - 1 = {}",
            p - 1
        )));
    }
    if size == 1 {
        return Ok(1);
    }
    let group_factors = prime_factors(p - 1);
    let generator = (2..p)
        .find(|&g| group_factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("the multiplicative group of a prime field is cyclic");
    // Elements of order exactly N are base^k with gcd(k, N) = 1.
    let base = pow_mod(generator, (p - 1) / size, p);
    let mut best = u64::MAX;
    let mut acc = 1;
    for k in 1..=size {
        acc = mul_mod(acc, base, p);
        if gcd(k, size) == 1 {
            best = best.min(acc);
        }
    }
    Ok(best)
}

/// Builds parameters for prime `p`, transform size `N = 2^ell` and word size
/// `n`, with twiddle tables for each requested kind. Every violated bound is
/// reported, not just the first.
pub fn build_params(p: u64, size: usize, word_bits: u32, kinds: &[TransformKind]) -> Result<NttParams> {
    let mut bad = Vec::new();
    if !(4..=32).contains(&word_bits) {
        bad.push(format!("word size n = {word_bits} must lie in [4, 32]"));
    }
    if p.is_multiple_of(2) || p < 3 {
        bad.push(format!("p = {p} must be an odd prime"));
    } else if !is_prime(p) {
        bad.push(format!("p = {p} is composite"));
    }
    if !size.is_power_of_two() || size < 2 {
        bad.push(format!("N = {size} must be a power of two >= 2"));
    } else if p > 1 && !(p - 1).is_multiple_of(size as u64) {
        bad.push(format!("N = {size} must divide p - 1 = {}", p.saturating_sub(1)));
    }
    if !bad.is_empty() {
        return Err(Error::InvalidParams(bad));
    }
    if p >= 1u64 << word_bits {
        bad.push(format!("p < 2^n violated: {p} >= 2^{word_bits}"));
        return Err(Error::InvalidParams(bad));
    }

    let ell = size.trailing_zeros();
    let n = word_bits;
    let beta = 1u128 << n;
    let p128 = p as u128;
    let mut kinds: Vec<TransformKind> = kinds.to_vec();
    kinds.sort();
    kinds.dedup();
    let ctx = ReductionContext::new(p, n)?.with_ell(ell);

    let mut scott_cfg = None;
    for &kind in &kinds {
        match kind {
            TransformKind::Ntl if 2 * p128 >= beta => {
                bad.push(format!("ntl: p < beta/2 violated: {p} >= 2^{n}/2"));
            }
            TransformKind::Harvey if 4 * p128 >= beta => {
                bad.push(format!("harvey: p < beta/4 violated: {p} >= 2^{n}/4"));
            }
            TransformKind::Scott => match ScottConfig::new(size as u64, &ctx) {
                Ok(cfg) if cfg.is_guard_free() => scott_cfg = Some(cfg),
                Ok(cfg) => bad.push(format!(
                    "scott: guard-free regime 2Np < beta/2 violated: 2*{size}*{p} >= 2^{n}/2 (L = {})",
                    cfg.l()
                )),
                Err(e) => bad.push(format!("scott: {e}")),
            },
            TransformKind::Improved if ell + 2 >= n || p >= 1u64 << (n - ell - 2) => {
                bad.push(format!(
                    "improved: p < 2^(n-ell-2) violated: {p} >= 2^({n}-{ell}-2) = {}",
                    if ell + 2 >= n { 1 } else { 1u64 << (n - ell - 2) }
                ));
            }
            _ => {}
        }
    }
    if !bad.is_empty() {
        return Err(Error::InvalidParams(bad));
    }

    let omega = find_primitive_root(p, size as u64)?;
    let omega_inv = inverse_mod(omega as i128, p as i128).expect("root is a unit") as u64;
    let n_inv = inverse_mod(size as i128, p as i128).expect("N is a unit mod odd p") as u64;
    debug_assert_eq!(mul_mod(omega, omega_inv, p), 1);

    let dif = dif_powers(omega, size, p);
    let brv = bitrev_powers(omega, size, p);
    let brv_inv = bitrev_powers(omega_inv, size, p);

    let mont = |seq: &[u64]| seq.iter().map(|&w| MontTwiddle::new(w, &ctx)).collect::<Vec<_>>();
    let mont_tables = || KindTables {
        forward: mont(&dif),
        inverse: mont(&brv_inv),
        n_inv: MontTwiddle::new(n_inv, &ctx),
    };

    let mut params = NttParams {
        p,
        size,
        ell,
        omega,
        omega_inv,
        n_inv,
        ctx: ctx.clone(),
        scott_cfg,
        kinds: kinds.clone(),
        ntl: None,
        harvey: None,
        scott: None,
        improved: None,
    };
    for kind in kinds {
        match kind {
            TransformKind::Ntl => {
                let enc = |seq: &[u64]| seq.iter().map(|&w| NtlTwiddle::new(w, &ctx)).collect();
                params.ntl = Some(KindTables {
                    forward: enc(&dif),
                    inverse: enc(&brv_inv),
                    n_inv: NtlTwiddle::new(n_inv, &ctx),
                });
            }
            TransformKind::Harvey => params.harvey = Some(mont_tables()),
            TransformKind::Scott => params.scott = Some(mont_tables()),
            TransformKind::Improved => {
                let enc = |seq: &[u64]| seq.iter().map(|&w| PlantardTwiddle::new(w, &ctx)).collect();
                let one = PlantardTwiddle::new(1, &ctx);
                params.improved = Some(ImprovedTables {
                    tables: KindTables {
                        forward: enc(&brv),
                        inverse: enc(&brv_inv),
                        n_inv: PlantardTwiddle::new(n_inv, &ctx),
                    },
                    one,
                    encode: PlantardTwiddle::new(one.encoded(), &ctx),
                });
            }
        }
    }
    Ok(params)
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 9] = [
    "kyber256",
    "kcl256",
    "newhope512",
    "falcon512",
    "remblem512",
    "newhope1024",
    "falcon1024",
    "hila5-1024",
    "toy13",
];

/// `(p, N, n)` for a preset name.
pub fn preset_dims(name: &str) -> Result<(u64, usize, u32)> {
    Ok(match name {
        "kyber256" | "kcl256" => (7681, 256, 32),
        "newhope512" | "falcon512" | "remblem512" => (12289, 512, 32),
        "newhope1024" | "falcon1024" | "hila5-1024" => (12289, 1024, 32),
        "toy13" => (13, 4, 8),
        _ => return Err(Error::UnknownPreset(name.to_string())),
    })
}

/// Lattice-scheme parameter sets at a 32-bit word, plus an 8-bit toy set
/// small enough for exhaustive checks. Tables for all four kinds are built.
pub fn preset(name: &str) -> Result<NttParams> {
    let (p, size, n) = preset_dims(name)?;
    build_params(p, size, n, &TransformKind::ALL)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_root(p: u64, size: u64) -> Option<u64> {
        let factors = prime_factors(size);
        (1..p).find(|&w| pow_mod(w, size, p) == 1 && factors.iter().all(|&q| pow_mod(w, size / q, p) != 1))
    }

    #[test]
    fn root_examples() {
        assert_eq!(find_primitive_root(17, 4).unwrap(), 4);
        assert_eq!(find_primitive_root(17, 1).unwrap(), 1);
        let w = find_primitive_root(7681, 256).unwrap();
        assert_eq!(pow_mod(w, 256, 7681), 1);
        assert_ne!(pow_mod(w, 128, 7681), 1);
        assert!(find_primitive_root(17, 3).is_err());
        assert!(find_primitive_root(15, 2).is_err());
    }

    #[test]
    fn root_is_smallest_for_small_primes() {
        for p in (3..1 << 13).filter(|&p| is_prime(p)) {
            let mut size = 2;
            while (p - 1) % size == 0 {
                assert_eq!(find_primitive_root(p, size).ok(), brute_root(p, size), "p={p} N={size}");
                size *= 2;
            }
            if (p - 1) % 3 == 0 {
                assert_eq!(find_primitive_root(p, 3).ok(), brute_root(p, 3));
            }
        }
    }

    #[test]
    fn build_examples() {
        let k = build_params(7681, 256, 32, &[TransformKind::Improved]).unwrap();
        assert_eq!(k.ell(), 8);
        let f = build_params(12289, 1024, 32, &[TransformKind::Improved]).unwrap();
        assert_eq!(f.ell(), 10);
        let err = build_params(7681, 256, 16, &[TransformKind::Improved]).unwrap_err();
        let Error::InvalidParams(v) = err else { panic!() };
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("p < 2^(n-ell-2)") && v[0].contains("= 64"), "{v:?}");
    }

    #[test]
    fn build_reports_every_violation() {
        let Error::InvalidParams(v) = build_params(7681, 256, 16, &TransformKind::ALL).unwrap_err() else {
            panic!()
        };
        // scott (2Np >= beta/2) and improved fail; ntl and harvey fit a 16-bit word.
        assert_eq!(v.len(), 2, "{v:?}");
        assert!(v[0].starts_with("scott") && v[1].starts_with("improved"));
        let Error::InvalidParams(v) = build_params(7680, 3, 32, &[]).unwrap_err() else {
            panic!()
        };
        assert_eq!(v.len(), 2);
        assert!(build_params(7681 * 3, 2, 32, &[]).is_err());
        assert!(build_params(17, 32, 32, &[]).is_err());
    }

    #[test]
    fn presets() {
        for name in PRESET_NAMES {
            let params = preset(name).unwrap();
            assert_eq!(params.kinds(), &TransformKind::ALL);
            let w = params.omega();
            let n = params.size() as u64;
            assert_eq!(pow_mod(w, n, params.p()), 1);
            assert_ne!(pow_mod(w, n / 2, params.p()), 1);
            assert_eq!(mul_mod(n % params.p(), params.n_inv(), params.p()), 1);
        }
        let k = preset("kyber256").unwrap();
        assert_eq!((k.p(), k.size()), (7681, 256));
        let h = preset("hila5-1024").unwrap();
        assert_eq!((h.p(), h.size()), (12289, 1024));
        let t = preset("toy13").unwrap();
        assert_eq!((t.p(), t.size(), t.word_bits()), (13, 4, 8));
        assert!(matches!(preset("kyber512"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn tables_decode_consistently() {
        for name in ["toy13", "kyber256", "falcon512"] {
            let params = preset(name).unwrap();
            let (p, n) = (params.p(), params.size());
            let dif = dif_powers(params.omega(), n, p);
            let brv = bitrev_powers(params.omega(), n, p);
            let brv_inv = bitrev_powers(params.omega_inv(), n, p);
            for kind in TransformKind::ALL {
                let (fwd, inv) = params.decoded_tables(kind).unwrap();
                assert_eq!(inv, brv_inv, "{name} {kind}");
                let want = if kind == TransformKind::Improved { &brv } else { &dif };
                assert_eq!(&fwd, want, "{name} {kind}");
            }
            for (a, b) in brv.iter().zip(&brv_inv) {
                assert_eq!(mul_mod(*a, *b, p), 1);
            }
        }
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("improved".parse::<TransformKind>().unwrap(), TransformKind::Improved);
        assert!("fast".parse::<TransformKind>().is_err());
    }
}
