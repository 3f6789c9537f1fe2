//! The five butterfly kernels.
//!
//! GS-form kernels (NTL, Harvey, Scott, improved GS) compute
//! `(X + Y, w (X - Y))`; the improved CT kernel computes `(X + wY, X - wY)`.
//! Each kernel consumes the twiddle encoding it was designed for, and the
//! encodings are distinct types so a table cannot be wired to the wrong
//! kernel.

use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::ops::{Native, WordOps};
use crate::reductions::ReductionContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ButterflyKind {
    Ntl,
    Harvey,
    Scott,
    ImprovedCt,
    ImprovedGs,
}

impl ButterflyKind {
    pub const ALL: [ButterflyKind; 5] = [
        ButterflyKind::Ntl,
        ButterflyKind::Harvey,
        ButterflyKind::Scott,
        ButterflyKind::ImprovedCt,
        ButterflyKind::ImprovedGs,
    ];
}

/// Plain twiddle `w` with Shoup's precomputed quotient `floor(w beta / p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NtlTwiddle {
    w: u64,
    w_quot: u64,
}

impl NtlTwiddle {
    pub fn new(w: u64, ctx: &ReductionContext) -> Self {
        debug_assert!(w < ctx.p());
        let w_quot = ((w as u128) << ctx.word_bits()) / ctx.p() as u128;
        Self {
            w,
            w_quot: w_quot as u64,
        }
    }
    pub fn plain(&self) -> u64 {
        self.w
    }
    pub fn quotient(&self) -> u64 {
        self.w_quot
    }
}

/// Twiddle in Montgomery form, `w beta mod p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MontTwiddle(u64);

impl MontTwiddle {
    pub fn new(w: u64, ctx: &ReductionContext) -> Self {
        Self(ctx.to_montgomery_domain_unchecked(w))
    }
    pub fn from_encoded(v: u64) -> Self {
        Self(v)
    }
    pub fn encoded(&self) -> u64 {
        self.0
    }
    pub fn decode(&self, ctx: &ReductionContext) -> u64 {
        let inv = crate::crt::mod_inverse(ctx.beta() as u128 % ctx.p() as u128, ctx.p() as u128)
            .expect("beta is a unit mod odd p");
        (self.0 as u128 * inv % ctx.p() as u128) as u64
    }
}

/// Twiddle in Plantard form, `w (-2^{2n}) mod p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlantardTwiddle(u64);

impl PlantardTwiddle {
    pub fn new(w: u64, ctx: &ReductionContext) -> Self {
        Self(ctx.to_plantard_domain_unchecked(w))
    }
    pub fn from_encoded(v: u64) -> Self {
        Self(v)
    }
    pub fn encoded(&self) -> u64 {
        self.0
    }
    pub fn decode(&self, ctx: &ReductionContext) -> u64 {
        let p = ctx.p() as u128;
        let wide = 1u128 << (2 * ctx.word_bits());
        let f = (p - wide % p) % p;
        let inv = crate::crt::mod_inverse(f, p).expect("-2^{2n} is a unit mod odd p");
        (self.0 as u128 * inv % p) as u64
    }
}

/// Scott's lazy-reduction parameters.
#[derive(Debug, Clone, Copy)]
pub struct ScottConfig {
    size: u64,
    l: u64,
    guard: Option<fn(ScottSite) -> bool>,
}

/// Loop position handed to a Scott guard predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScottSite {
    pub layer: u32,
    pub block: usize,
    pub j: usize,
}

impl ScottConfig {
    /// Picks `L` as the smallest power of two with `(2N/L) p < beta/2`.
    pub fn new(size: u64, ctx: &ReductionContext) -> Result<Self> {
        if !size.is_power_of_two() {
            return Err(Error::Precondition(format!("N = {size} must be a power of two")));
        }
        let half_beta = ctx.beta() as u128 / 2;
        let mut l = 1u64;
        while (2 * size as u128 / l as u128) * ctx.p() as u128 >= half_beta {
            if l >= size {
                return Err(Error::Precondition(format!(
                    "no L <= N = {size} satisfies (2N/L) p < beta/2 for p = {}",
                    ctx.p()
                )));
            }
            l *= 2;
        }
        Ok(Self { size, l, guard: None })
    }

    pub fn with_guard(mut self, guard: fn(ScottSite) -> bool) -> Self {
        self.guard = Some(guard);
        self
    }

    pub fn size(&self) -> u64 {
        self.size
    }
    pub fn l(&self) -> u64 {
        self.l
    }
    /// `(N / L) p`, the lazy bound on Scott inputs.
    pub fn lazy_bound(&self, p: u64) -> u64 {
        self.size / self.l * p
    }
    /// `L == 1`: the guard can never fire.
    pub fn is_guard_free(&self) -> bool {
        self.l == 1
    }
    pub fn should_reduce(&self, site: ScottSite) -> bool {
        !self.is_guard_free() && self.guard.is_some_and(|g| g(site))
    }
}

/// A butterfly result together with the exclusive upper bounds its kernel
/// guarantees for these inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ButterflyOut {
    pub x_out: u64,
    pub y_out: u64,
    pub bound_x: u64,
    pub bound_y: u64,
}

impl ButterflyOut {
    fn new(x_out: u64, y_out: u64, bound_x: u64, bound_y: u64) -> Self {
        debug_assert!(x_out < bound_x && y_out < bound_y);
        Self {
            x_out,
            y_out,
            bound_x,
            bound_y,
        }
    }
}

fn check_below(what: &'static str, v: u64, bound: u64) -> Result<()> {
    if v >= bound {
        return Err(out_of_range(what, v, format!("[0, {bound})")));
    }
    Ok(())
}

// ---- NTL -------------------------------------------------------------------

/// `(X + Y mod p, W (X - Y) mod p)` with Shoup's quotient estimate.
pub fn ntl_butterfly(x: u64, y: u64, tw: NtlTwiddle, ctx: &ReductionContext) -> Result<ButterflyOut> {
    let p = ctx.p();
    if 2 * p >= ctx.beta() {
        return Err(Error::Precondition(format!("NTL needs p < beta/2, p = {p}")));
    }
    if tw.w == 0 {
        return Err(out_of_range("W", 0, format!("(0, {p})")));
    }
    check_below("W", tw.w, p)?;
    check_below("X", x, p)?;
    check_below("Y", y, p)?;
    let (a, b) = ntl_kernel(&Native, x, y, tw, ctx);
    Ok(ButterflyOut::new(a, b, p, p))
}

#[inline(always)]
pub fn ntl_kernel<O: WordOps>(o: &O, x: u64, y: u64, tw: NtlTwiddle, ctx: &ReductionContext) -> (u64, u64) {
    let p = ctx.p();
    let mut xs = o.add(x, y);
    if o.branch(xs >= p) {
        xs = o.sub(xs, p);
    }
    let mut t = o.sub(x, y);
    if o.branch(x < y) {
        t = o.add(t, p);
    }
    (xs, ntl_mul(o, t, tw, ctx))
}

/// `w t mod p` for `t < p` via the precomputed quotient.
#[inline(always)]
fn ntl_mul<O: WordOps>(o: &O, t: u64, tw: NtlTwiddle, ctx: &ReductionContext) -> u64 {
    let p = ctx.p();
    let q = o.shr(o.mul(tw.w_quot, t), ctx.word_bits());
    let mut y = o.and(o.sub(o.mul(tw.w, t), o.mul(q, p)), ctx.beta_mask());
    if o.branch(y >= p) {
        y = o.sub(y, p);
    }
    debug_assert!(y < p);
    y
}

/// `w t mod p` in `[0, p)` for `t < p`.
#[inline(always)]
pub fn ntl_scale(t: u64, tw: NtlTwiddle, ctx: &ReductionContext) -> u64 {
    ntl_mul(&Native, t, tw, ctx)
}

// ---- Harvey ----------------------------------------------------------------

/// `(X + Y, W (X - Y))` on lazy inputs in `[0, 2p)`, outputs in `[0, 2p)`.
pub fn harvey_butterfly(x: u64, y: u64, tw: MontTwiddle, ctx: &ReductionContext) -> Result<ButterflyOut> {
    let p = ctx.p();
    if 4 * p >= ctx.beta() {
        return Err(Error::Precondition(format!("Harvey needs p < beta/4, p = {p}")));
    }
    if tw.0 == 0 {
        return Err(out_of_range("W'", 0, format!("(0, {p})")));
    }
    check_below("W'", tw.0, p)?;
    check_below("X", x, 2 * p)?;
    check_below("Y", y, 2 * p)?;
    let (a, b) = harvey_kernel(&Native, x, y, tw, ctx);
    debug_assert_eq!((a, b), harvey_reference(&Native, x, y, tw, ctx));
    Ok(ButterflyOut::new(a, b, 2 * p, 2 * p))
}

/// Production form: the `X' >= 2p` correction is a masked subtract.
#[inline(always)]
pub fn harvey_kernel<O: WordOps>(o: &O, x: u64, y: u64, tw: MontTwiddle, ctx: &ReductionContext) -> (u64, u64) {
    let two_p = 2 * ctx.p();
    let xs = o.cond_sub(o.add(x, y), two_p);
    let t = o.add(o.sub(x, y), two_p);
    (xs, harvey_mul(o, t, tw, ctx))
}

/// Reference form with the published conditional branch.
#[inline(always)]
pub fn harvey_reference<O: WordOps>(o: &O, x: u64, y: u64, tw: MontTwiddle, ctx: &ReductionContext) -> (u64, u64) {
    let two_p = 2 * ctx.p();
    let mut xs = o.add(x, y);
    if o.branch(xs >= two_p) {
        xs = o.sub(xs, two_p);
    }
    let t = o.add(o.sub(x, y), two_p);
    (xs, harvey_mul(o, t, tw, ctx))
}

/// Signed-Montgomery product `W' T beta^{-1}` shifted into `(0, 2p)`; needs `T < 4p`.
#[inline(always)]
fn harvey_mul<O: WordOps>(o: &O, t: u64, tw: MontTwiddle, ctx: &ReductionContext) -> u64 {
    let p = ctx.p();
    let n = ctx.word_bits();
    let prod = o.mul(tw.0, t);
    let r1 = o.shr(prod, n);
    let r0 = o.and(prod, ctx.beta_mask());
    let q = o.and(o.mul(ctx.mont_p_inv(), r0), ctx.beta_mask());
    let h = o.shr(o.mul(q, p), n);
    let y = o.sub(o.add(r1, p), h);
    debug_assert!(y < 2 * p);
    y
}

/// `w t mod p` in `[0, p)` for `t < 4p`.
#[inline(always)]
pub fn harvey_scale(t: u64, tw: MontTwiddle, ctx: &ReductionContext) -> u64 {
    Native.cond_sub(harvey_mul(&Native, t, tw, ctx), ctx.p())
}

// ---- Scott -----------------------------------------------------------------

/// `(X + Y, W (X - Y))` with inputs below `(N/L) p` and no reduction of `X'`.
/// When `apply_guard` is set both inputs are first reduced mod `p`.
pub fn scott_butterfly(
    x: u64,
    y: u64,
    tw: MontTwiddle,
    ctx: &ReductionContext,
    cfg: &ScottConfig,
    apply_guard: bool,
) -> Result<ButterflyOut> {
    let p = ctx.p();
    if 4 * cfg.size as u128 * p as u128 >= ctx.beta() as u128 * cfg.l as u128 {
        return Err(Error::Precondition(format!(
            "Scott needs p < beta L / (4N): p = {p}, N = {}, L = {}",
            cfg.size, cfg.l
        )));
    }
    if tw.0 == 0 {
        return Err(out_of_range("W", 0, format!("(0, {p})")));
    }
    check_below("W", tw.0, p)?;
    let lazy = cfg.lazy_bound(p);
    check_below("X", x, lazy)?;
    check_below("Y", y, lazy)?;
    let (a, b) = scott_kernel(&Native, x, y, tw, ctx, lazy, apply_guard);
    Ok(ButterflyOut::new(a, b, 2 * lazy, 2 * p))
}

#[inline(always)]
pub fn scott_kernel<O: WordOps>(
    o: &O,
    mut x: u64,
    mut y: u64,
    tw: MontTwiddle,
    ctx: &ReductionContext,
    lazy: u64,
    apply_guard: bool,
) -> (u64, u64) {
    if apply_guard {
        x %= ctx.p();
        y %= ctx.p();
    }
    let xs = o.add(x, y);
    let t = o.add(o.sub(x, y), lazy);
    (xs, scott_mul(o, t, tw, ctx))
}

/// Montgomery product `(W T + Q p) / beta` with `Q = -p^{-1} (W T mod beta)`.
#[inline(always)]
fn scott_mul<O: WordOps>(o: &O, t: u64, tw: MontTwiddle, ctx: &ReductionContext) -> u64 {
    let p = ctx.p();
    let wt = o.mul(tw.0, t);
    let q = o.and(o.mul(ctx.mont_k(), o.and(wt, ctx.beta_mask())), ctx.beta_mask());
    let sum = o.add(wt, o.mul(q, p));
    debug_assert_eq!(sum & ctx.beta_mask(), 0, "WT + Qp must be divisible by beta");
    let y = o.shr(sum, ctx.word_bits());
    debug_assert!(y < 2 * p);
    y
}

/// `w t mod p` in `[0, p)` for `t < 2 (N/L) p`.
#[inline(always)]
pub fn scott_scale(t: u64, tw: MontTwiddle, ctx: &ReductionContext) -> u64 {
    Native.cond_sub(scott_mul(&Native, t, tw, ctx), ctx.p())
}

// ---- improved CT / GS ------------------------------------------------------

fn check_improved(ctx: &ReductionContext, w_hat: PlantardTwiddle) -> Result<()> {
    ctx.check_modified_plantard()?;
    check_below("W", w_hat.0, ctx.p())
}

/// `(X + wY, X - wY + p)` built on the modified Plantard product; inputs
/// below `2^ell p / 2`.
pub fn improved_ct_butterfly(x: u64, y: u64, w_hat: PlantardTwiddle, ctx: &ReductionContext) -> Result<ButterflyOut> {
    check_improved(ctx, w_hat)?;
    let half = (ctx.p() << ctx.ell()) / 2;
    check_below("X", x, half)?;
    check_below("Y", y, half)?;
    let (a, b) = improved_ct_kernel(&Native, x, y, w_hat, ctx);
    Ok(ButterflyOut::new(a, b, x + ctx.p(), x + ctx.p() + 1))
}

#[inline(always)]
pub fn improved_ct_kernel<O: WordOps>(
    o: &O,
    x: u64,
    y: u64,
    w_hat: PlantardTwiddle,
    ctx: &ReductionContext,
) -> (u64, u64) {
    let r = ctx.modified_plantard_with(o, w_hat.0, y);
    (o.add(x, r), o.add(o.sub(x, r), ctx.p()))
}

/// `(X + Y, w (X - Y))` at INTT depth `layer` (1-based); inputs below
/// `2^{layer-1} p`, `Y'` canonical.
pub fn improved_gs_butterfly(
    x: u64,
    y: u64,
    w_hat: PlantardTwiddle,
    ctx: &ReductionContext,
    layer: u32,
) -> Result<ButterflyOut> {
    check_improved(ctx, w_hat)?;
    if layer == 0 || layer > ctx.ell() {
        return Err(out_of_range("layer", layer, format!("[1, {}]", ctx.ell())));
    }
    let lim = ctx.p() << (layer - 1);
    check_below("X", x, lim)?;
    check_below("Y", y, lim)?;
    let (a, b) = improved_gs_kernel(&Native, x, y, w_hat, ctx, lim);
    Ok(ButterflyOut::new(a, b, 2 * lim, ctx.p()))
}

/// `offset` is `2^{layer-1} p`.
#[inline(always)]
pub fn improved_gs_kernel<O: WordOps>(
    o: &O,
    x: u64,
    y: u64,
    w_hat: PlantardTwiddle,
    ctx: &ReductionContext,
    offset: u64,
) -> (u64, u64) {
    let t = o.add(o.sub(x, y), offset);
    (o.add(x, y), ctx.modified_plantard_with(o, w_hat.0, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::Tracing;
    use crate::oracle::mul_mod;

    fn ctx13() -> ReductionContext {
        ReductionContext::new(13, 8).unwrap().with_ell(2)
    }

    fn plantard_plain(w_hat: u64, ctx: &ReductionContext) -> u64 {
        PlantardTwiddle(w_hat).decode(ctx)
    }

    #[test]
    fn ntl_examples() {
        let c = ctx13();
        let tw = NtlTwiddle::new(3, &c);
        assert_eq!(tw.quotient(), 59);
        let out = ntl_butterfly(5, 9, tw, &c).unwrap();
        assert_eq!((out.x_out, out.y_out), (1, 1));
        let out = ntl_butterfly(7, 7, tw, &c).unwrap();
        assert_eq!((out.x_out, out.y_out), (1, 0));
        assert!(ntl_butterfly(13, 0, tw, &c).is_err());
        assert!(ntl_butterfly(0, 0, NtlTwiddle::new(0, &c), &c).is_err());
    }

    #[test]
    fn ntl_exhaustive() {
        let c = ctx13();
        for w in 1..13 {
            let tw = NtlTwiddle::new(w, &c);
            for x in 0..13 {
                for y in 0..13 {
                    let out = ntl_butterfly(x, y, tw, &c).unwrap();
                    assert_eq!(out.x_out, (x + y) % 13);
                    assert_eq!(out.y_out, mul_mod(w, (x + 13 - y) % 13, 13));
                }
            }
        }
    }

    #[test]
    fn harvey_example() {
        let c = ReductionContext::new(7681, 16).unwrap();
        assert_eq!(c.mont_p_inv(), 57857);
        let tw = MontTwiddle::new(3, &c);
        assert_eq!(tw.encoded(), 4583);
        let out = harvey_butterfly(100, 4000, tw, &c).unwrap();
        assert_eq!((out.x_out, out.y_out), (4100, 3662));
        let zero = harvey_butterfly(0, 0, tw, &c).unwrap();
        assert_eq!(zero.x_out, 0);
        assert_eq!(zero.y_out % 7681, 0);
        assert!(harvey_butterfly(2 * 7681, 0, tw, &c).is_err());
    }

    #[test]
    fn harvey_exhaustive_small() {
        let c = ReductionContext::new(13, 8).unwrap();
        for w in 1..13 {
            let tw = MontTwiddle::new(w, &c);
            for x in 0..26 {
                for y in 0..26 {
                    let out = harvey_butterfly(x, y, tw, &c).unwrap();
                    assert!(out.x_out < 26 && out.y_out < 26);
                    assert_eq!(out.x_out % 13, (x + y) % 13);
                    assert_eq!(out.y_out % 13, mul_mod(w, (x + 26 - y) % 13, 13));
                    assert_eq!(
                        harvey_kernel(&Native, x, y, tw, &c),
                        harvey_reference(&Native, x, y, tw, &c)
                    );
                }
            }
        }
    }

    #[test]
    fn scott_example() {
        let c = ctx13();
        let cfg = ScottConfig::new(4, &c).unwrap();
        assert_eq!(cfg.l(), 1);
        assert_eq!(c.mont_k(), 59);
        let tw = MontTwiddle::from_encoded(3);
        let out = scott_butterfly(5, 9, tw, &c, &cfg, false).unwrap();
        assert_eq!((out.x_out, out.y_out), (14, 3));
        let zero = scott_butterfly(0, 0, MontTwiddle::from_encoded(1), &c, &cfg, false).unwrap();
        assert_eq!(zero.x_out, 0);
        assert_eq!(zero.y_out % 13, 0);
    }

    #[test]
    fn scott_exhaustive() {
        let c = ctx13();
        let cfg = ScottConfig::new(4, &c).unwrap();
        for w in 1..13 {
            let tw = MontTwiddle::new(w, &c);
            for x in 0..52 {
                for y in 0..52 {
                    for guard in [false, true] {
                        let out = scott_butterfly(x, y, tw, &c, &cfg, guard).unwrap();
                        assert!(out.y_out < 26);
                        assert_eq!(out.x_out % 13, (x + y) % 13);
                        assert_eq!(out.y_out % 13, mul_mod(w, (x + 52 - y) % 13, 13));
                    }
                }
            }
        }
    }

    #[test]
    fn scott_picks_smallest_l() {
        let c = ReductionContext::new(13, 8).unwrap();
        // 2 * 8 * 13 = 208 >= 128, 2 * 4 * 13 = 104 < 128
        assert_eq!(ScottConfig::new(8, &c).unwrap().l(), 2);
        assert_eq!(ScottConfig::new(4, &c).unwrap().l(), 1);
        let guarded = ScottConfig::new(8, &c).unwrap().with_guard(|s| s.layer == 1);
        assert!(guarded.should_reduce(ScottSite {
            layer: 1,
            block: 0,
            j: 0
        }));
        assert!(!ScottConfig::new(4, &c)
            .unwrap()
            .with_guard(|_| true)
            .should_reduce(ScottSite {
                layer: 1,
                block: 0,
                j: 0
            }));
    }

    #[test]
    fn improved_ct_examples() {
        let c = ctx13();
        let out = improved_ct_butterfly(3, 20, PlantardTwiddle(5), &c).unwrap();
        assert_eq!((out.x_out, out.y_out), (13, 6));
        assert_eq!(plantard_plain(5, &c), 7);
        let out = improved_ct_butterfly(9, 0, PlantardTwiddle(5), &c).unwrap();
        assert_eq!((out.x_out, out.y_out), (9, 22));
        assert!(improved_ct_butterfly(26, 0, PlantardTwiddle(5), &c).is_err());
    }

    #[test]
    fn improved_ct_exhaustive() {
        let c = ctx13();
        for w_hat in 0..13 {
            let w = plantard_plain(w_hat, &c);
            for x in 0..26 {
                for y in 0..26 {
                    let out = improved_ct_butterfly(x, y, PlantardTwiddle(w_hat), &c).unwrap();
                    let wy = mul_mod(w, y, 13);
                    assert_eq!(out.x_out % 13, (x + wy) % 13);
                    assert_eq!(out.y_out % 13, (x + 13 - wy) % 13);
                    assert!(out.x_out < x + 13 && out.y_out <= x + 13);
                }
            }
        }
    }

    #[test]
    fn improved_gs_examples() {
        let c = ctx13();
        let out = improved_gs_butterfly(5, 9, PlantardTwiddle(5), &c, 1).unwrap();
        assert_eq!((out.x_out, out.y_out), (14, 11));
        let out = improved_gs_butterfly(20, 20, PlantardTwiddle(5), &c, 2).unwrap();
        assert_eq!((out.x_out, out.y_out), (40, 0));
        assert!(improved_gs_butterfly(0, 0, PlantardTwiddle(5), &c, 0).is_err());
        assert!(improved_gs_butterfly(0, 0, PlantardTwiddle(5), &c, 3).is_err());
        assert!(improved_gs_butterfly(13, 0, PlantardTwiddle(5), &c, 1).is_err());
    }

    #[test]
    fn improved_gs_exhaustive() {
        let c = ctx13();
        for layer in 1..=2u32 {
            let lim = 13u64 << (layer - 1);
            for w_hat in 0..13 {
                let w = plantard_plain(w_hat, &c);
                for x in 0..lim {
                    for y in 0..lim {
                        let out = improved_gs_butterfly(x, y, PlantardTwiddle(w_hat), &c, layer).unwrap();
                        assert_eq!(out.x_out, x + y);
                        assert!(out.y_out < 13);
                        assert_eq!(out.y_out, mul_mod(w, (x + 2 * lim - y) % 13, 13));
                    }
                }
            }
        }
    }

    fn trace_of(f: impl Fn(&Tracing)) -> Vec<crate::ops::Op> {
        let t = Tracing::new();
        f(&t);
        t.take()
    }

    #[test]
    fn improved_kernels_have_input_independent_control_flow() {
        let c = ctx13();
        let mut ct = std::collections::HashSet::new();
        let mut gs = std::collections::HashSet::new();
        for w_hat in 0..13 {
            for x in 0..26 {
                for y in 0..26 {
                    let tw = PlantardTwiddle(w_hat);
                    ct.insert(trace_of(|t| {
                        improved_ct_kernel(t, x, y, tw, &c);
                    }));
                    gs.insert(trace_of(|t| {
                        improved_gs_kernel(t, x, y, tw, &c, 26);
                    }));
                }
            }
        }
        assert_eq!(ct.len(), 1);
        assert_eq!(gs.len(), 1);
        assert!(!ct
            .iter()
            .next()
            .unwrap()
            .iter()
            .any(|op| matches!(op, crate::ops::Op::Branch(_))));
    }

    #[test]
    fn tracing_detects_branchy_kernels() {
        let c = ctx13();
        let tw = NtlTwiddle::new(3, &c);
        let a = trace_of(|t| {
            ntl_kernel(t, 0, 0, tw, &c);
        });
        let b = trace_of(|t| {
            ntl_kernel(t, 12, 1, tw, &c);
        });
        assert_ne!(a, b);
        let m = MontTwiddle::new(3, &c);
        let prod: std::collections::HashSet<_> = (0..26)
            .map(|x| {
                trace_of(|t| {
                    harvey_kernel(t, x, 25 - x, m, &c);
                })
            })
            .collect();
        assert_eq!(prod.len(), 1);
    }

    #[test]
    fn twiddle_decoding_round_trips() {
        let c = ReductionContext::new(12289, 32).unwrap();
        for w in [1u64, 2, 3, 4096, 12288] {
            assert_eq!(MontTwiddle::new(w, &c).decode(&c), w);
            assert_eq!(PlantardTwiddle::new(w, &c).decode(&c), w);
            assert_eq!(NtlTwiddle::new(w, &c).plain(), w);
        }
    }
}
