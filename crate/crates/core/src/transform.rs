//! Reference recursive FFTs and the iterative NTT/INTT drivers.
//!
//! Ordering: every forward driver takes natural-order coefficients and
//! leaves `f(omega^{brv(i)})` at index `i`; every inverse driver takes that
//! bit-reversed spectrum back to natural-order coefficients. The improved
//! kind runs the forward pass as Cooley-Tukey butterflies over the
//! `x^N - 1` remainder tree; the NTL, Harvey and Scott kernels are all of the
//! `(X + Y, w (X - Y))` shape and run the forward pass as a
//! decimation-in-frequency sweep. All four share the same Gentleman-Sande
//! inverse schedule, and the `N^{-1}` scaling is a final pass that also
//! canonicalises the output.

use serde::{Deserialize, Serialize};

use crate::butterflies::{
    harvey_kernel, harvey_scale, improved_ct_kernel, improved_gs_kernel, ntl_kernel, ntl_scale, scott_kernel,
    scott_scale, ScottSite,
};
use crate::error::{out_of_range, Error, Result};
use crate::ops::{Native, Op, Tracing, WordOps};
use crate::params::{NttParams, TransformKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Order {
    Natural,
    BitReversed,
}

/// Coefficients `a_0 .. a_{N-1}` of `f = sum a_j x^j`; `N` is a power of two.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<u64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<u64>) -> Result<Self> {
        if !coeffs.len().is_power_of_two() {
            return Err(Error::Precondition(format!(
                "polynomial length {} is not a power of two",
                coeffs.len()
            )));
        }
        Ok(Self { coeffs })
    }

    /// The polynomial `x^k` of length `size`.
    pub fn monomial(size: usize, k: usize) -> Result<Self> {
        let mut coeffs = vec![0; size];
        *coeffs
            .get_mut(k)
            .ok_or_else(|| out_of_range("k", k as i128, format!("[0, {size})")))? = 1;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
    pub fn into_coeffs(self) -> Vec<u64> {
        self.coeffs
    }
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn is_canonical(&self, p: u64) -> bool {
        self.coeffs.iter().all(|&c| c < p)
    }
}

/// Transform values with their ordering and an exclusive upper bound.
/// Values may be lazy (`>= p`); only their residues mod `p` matter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<u64>,
    order: Order,
    bound: u64,
}

impl Spectrum {
    pub fn new(values: Vec<u64>, order: Order) -> Self {
        let bound = values.iter().max().map_or(1, |m| m + 1);
        Self { values, order, bound }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }
    pub fn order(&self) -> Order {
        self.order
    }
    /// Every value is strictly below this.
    pub fn bound(&self) -> u64 {
        self.bound
    }
    pub fn canonical(&self, p: u64) -> Vec<u64> {
        self.values.iter().map(|v| v % p).collect()
    }
}

// ---- recursive references ---------------------------------------------

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    acc
}

fn check_root(omega: u64, size: usize, p: u64) -> Result<()> {
    let n = size as u64;
    if powmod(omega, n, p) != 1 || (n > 1 && powmod(omega, n / 2, p) == 1) {
        return Err(Error::Precondition(format!(
            "omega = {omega} does not have order {size} mod {p}"
        )));
    }
    Ok(())
}

/// Even/odd split: `f(w^j) = f_e(w^{2j}) + w^j f_o(w^{2j})`. Natural order.
pub fn fft1_recursive(f: &Polynomial, omega: u64, p: u64) -> Result<Spectrum> {
    check_root(omega, f.len(), p)?;
    let coeffs: Vec<u64> = f.coeffs.iter().map(|c| c % p).collect();
    Ok(Spectrum::new(fft1(&coeffs, omega, p), Order::Natural))
}

fn fft1(a: &[u64], omega: u64, p: u64) -> Vec<u64> {
    let n = a.len();
    if n == 1 {
        return a.to_vec();
    }
    let even: Vec<u64> = a.iter().step_by(2).copied().collect();
    let odd: Vec<u64> = a.iter().skip(1).step_by(2).copied().collect();
    let w2 = mulmod(omega, omega, p);
    let fe = fft1(&even, w2, p);
    let fo = fft1(&odd, w2, p);
    let mut out = vec![0; n];
    let mut wj = 1;
    for j in 0..n / 2 {
        let t = mulmod(wj, fo[j], p);
        out[j] = (fe[j] + t) % p;
        out[j + n / 2] = (fe[j] + p - t) % p;
        wj = mulmod(wj, omega, p);
    }
    out
}

/// Half split: `f_p = sum (a_j + a_{j+N/2}) x^j` gives the even powers,
/// `f_m = sum (a_j - a_{j+N/2}) w^j x^j` the odd ones, and the two
/// sub-results are interleaved. See [`fft2_output_exponents`] for the
/// resulting order, which is natural.
pub fn fft2_recursive(f: &Polynomial, omega: u64, p: u64) -> Result<Spectrum> {
    check_root(omega, f.len(), p)?;
    let coeffs: Vec<u64> = f.coeffs.iter().map(|c| c % p).collect();
    Ok(Spectrum::new(fft2(&coeffs, omega, p), Order::Natural))
}

fn fft2(a: &[u64], omega: u64, p: u64) -> Vec<u64> {
    let n = a.len();
    if n == 1 {
        return a.to_vec();
    }
    let h = n / 2;
    let mut plus = Vec::with_capacity(h);
    let mut minus = Vec::with_capacity(h);
    let mut wj = 1;
    for j in 0..h {
        plus.push((a[j] + a[j + h]) % p);
        minus.push(mulmod((a[j] + p - a[j + h]) % p, wj, p));
        wj = mulmod(wj, omega, p);
    }
    let w2 = mulmod(omega, omega, p);
    let fp = fft2(&plus, w2, p);
    let fm = fft2(&minus, w2, p);
    fp.into_iter().zip(fm).flat_map(|(x, y)| [x, y]).collect()
}

/// For each output index of [`fft2_recursive`], the exponent `e` such that
/// the entry holds `f(omega^e)`. Derived from the interleaving recursion
/// `E_N(2i) = 2 E_{N/2}(i)`, `E_N(2i+1) = 2 E_{N/2}(i) + 1`, which
/// collapses to the identity.
pub fn fft2_output_exponents(size: usize) -> Vec<usize> {
    if size <= 1 {
        return vec![0; size];
    }
    fft2_output_exponents(size / 2)
        .into_iter()
        .flat_map(|e| [2 * e, 2 * e + 1])
        .collect()
}

// ---- iterative drivers --------------------------------------------------

/// Forward sweep over halves `m = N/2, ..., 1` with `(X + Y, w (X - Y))`.
#[inline(always)]
fn dif_sweep<T: Copy>(
    a: &mut [u64],
    table: &[T],
    mut bf: impl FnMut(u64, u64, T, ScottSite) -> (u64, u64),
    mut after_layer: impl FnMut(u32, &[u64]),
) {
    let n = a.len();
    let mut offset = 0;
    let mut m = n / 2;
    let mut layer = 1;
    while m >= 1 {
        let tw = &table[offset..offset + m];
        for (block, chunk) in a.chunks_exact_mut(2 * m).enumerate() {
            let (lo, hi) = chunk.split_at_mut(m);
            for j in 0..m {
                let site = ScottSite { layer, block, j };
                (lo[j], hi[j]) = bf(lo[j], hi[j], tw[j], site);
            }
        }
        after_layer(layer, a);
        offset += m;
        m /= 2;
        layer += 1;
    }
}

/// Forward Cooley-Tukey sweep: at depth `d`, node `k` splits by `table[k]`.
#[inline(always)]
fn ct_sweep<T: Copy>(
    a: &mut [u64],
    table: &[T],
    mut bf: impl FnMut(u64, u64, T) -> (u64, u64),
    mut after_layer: impl FnMut(u32, &[u64]),
) {
    let n = a.len();
    let mut m = n / 2;
    let mut layer = 1;
    while m >= 1 {
        for (node, chunk) in a.chunks_exact_mut(2 * m).enumerate() {
            let w = table[node];
            let (lo, hi) = chunk.split_at_mut(m);
            for j in 0..m {
                (lo[j], hi[j]) = bf(lo[j], hi[j], w);
            }
        }
        after_layer(layer, a);
        m /= 2;
        layer += 1;
    }
}

/// Inverse Gentleman-Sande sweep: layer `s` pairs elements `2^{s-1}` apart.
#[inline(always)]
fn gs_sweep<T: Copy>(
    a: &mut [u64],
    table: &[T],
    mut bf: impl FnMut(u64, u64, T, ScottSite) -> (u64, u64),
    mut after_layer: impl FnMut(u32, &[u64]),
) {
    let n = a.len();
    let mut m = 1;
    let mut layer = 1;
    while m < n {
        for (node, chunk) in a.chunks_exact_mut(2 * m).enumerate() {
            let w = table[node];
            let (lo, hi) = chunk.split_at_mut(m);
            for j in 0..m {
                let site = ScottSite { layer, block: node, j };
                (lo[j], hi[j]) = bf(lo[j], hi[j], w, site);
            }
        }
        after_layer(layer, a);
        m *= 2;
        layer += 1;
    }
}

fn tables_missing(kind: TransformKind) -> Error {
    Error::Precondition(format!("no `{kind}` tables in these parameters"))
}

/// Runs the forward transform for `kind` with primitive ops `o`, calling
/// `after_layer` after every layer. Returns the exclusive output bound.
fn forward_with<O: WordOps>(
    o: &O,
    a: &mut [u64],
    params: &NttParams,
    kind: TransformKind,
    after_layer: impl FnMut(u32, &[u64]),
) -> Result<u64> {
    params.require(kind)?;
    let ctx = params.ctx();
    let p = params.p();
    match kind {
        TransformKind::Ntl => {
            let t = params.ntl_tables().ok_or_else(|| tables_missing(kind))?;
            dif_sweep(a, &t.forward, |x, y, w, _| ntl_kernel(o, x, y, w, ctx), after_layer);
            Ok(p)
        }
        TransformKind::Harvey => {
            let t = params.harvey_tables().ok_or_else(|| tables_missing(kind))?;
            dif_sweep(a, &t.forward, |x, y, w, _| harvey_kernel(o, x, y, w, ctx), after_layer);
            Ok(2 * p)
        }
        TransformKind::Scott => {
            let t = params.scott_tables().ok_or_else(|| tables_missing(kind))?;
            let cfg = params.scott_config().ok_or_else(|| tables_missing(kind))?;
            let lazy = cfg.lazy_bound(p);
            dif_sweep(
                a,
                &t.forward,
                |x, y, w, site| scott_kernel(o, x, y, w, ctx, lazy, cfg.should_reduce(site)),
                after_layer,
            );
            Ok(lazy.max(2 * p))
        }
        TransformKind::Improved => {
            let t = params.improved_tables().ok_or_else(|| tables_missing(kind))?;
            ct_sweep(
                a,
                &t.tables.forward,
                |x, y, w| improved_ct_kernel(o, x, y, w, ctx),
                after_layer,
            );
            Ok((params.ell() as u64 + 1) * p)
        }
    }
}

/// Largest input each kind's inverse driver accepts (exclusive).
fn inverse_input_limit(params: &NttParams, kind: TransformKind) -> u64 {
    match kind {
        TransformKind::Harvey => 2 * params.p(),
        _ => params.p(),
    }
}

fn inverse_with<O: WordOps>(
    o: &O,
    a: &mut [u64],
    bound: u64,
    params: &NttParams,
    kind: TransformKind,
    after_layer: impl FnMut(u32, &[u64]),
) -> Result<()> {
    params.require(kind)?;
    let ctx = params.ctx();
    let p = params.p();
    if bound > inverse_input_limit(params, kind) {
        let plantard_one = params.improved_tables().map(|t| t.one);
        match (kind, plantard_one) {
            (TransformKind::Improved, Some(one)) if bound <= p << params.ell() => {
                for v in a.iter_mut() {
                    *v = ctx.modified_plantard_with(o, one.encoded(), *v);
                }
            }
            _ => a.iter_mut().for_each(|v| *v %= p),
        }
    }
    match kind {
        TransformKind::Ntl => {
            let t = params.ntl_tables().ok_or_else(|| tables_missing(kind))?;
            gs_sweep(a, &t.inverse, |x, y, w, _| ntl_kernel(o, x, y, w, ctx), after_layer);
            a.iter_mut().for_each(|v| *v = ntl_scale(*v, t.n_inv, ctx));
        }
        TransformKind::Harvey => {
            let t = params.harvey_tables().ok_or_else(|| tables_missing(kind))?;
            gs_sweep(a, &t.inverse, |x, y, w, _| harvey_kernel(o, x, y, w, ctx), after_layer);
            a.iter_mut().for_each(|v| *v = harvey_scale(*v, t.n_inv, ctx));
        }
        TransformKind::Scott => {
            let t = params.scott_tables().ok_or_else(|| tables_missing(kind))?;
            let cfg = params.scott_config().ok_or_else(|| tables_missing(kind))?;
            let lazy = cfg.lazy_bound(p);
            gs_sweep(
                a,
                &t.inverse,
                |x, y, w, site| scott_kernel(o, x, y, w, ctx, lazy, cfg.should_reduce(site)),
                after_layer,
            );
            a.iter_mut().for_each(|v| *v = scott_scale(*v, t.n_inv, ctx));
        }
        TransformKind::Improved => {
            let t = params.improved_tables().ok_or_else(|| tables_missing(kind))?;
            gs_sweep(
                a,
                &t.tables.inverse,
                |x, y, w, site| improved_gs_kernel(o, x, y, w, ctx, p << (site.layer - 1)),
                after_layer,
            );
            let n_inv = t.tables.n_inv.encoded();
            a.iter_mut().for_each(|v| *v = ctx.modified_plantard_with(o, n_inv, *v));
        }
    }
    Ok(())
}

fn check_len(len: usize, params: &NttParams) -> Result<()> {
    if len != params.size() {
        return Err(Error::LengthMismatch {
            expected: params.size(),
            actual: len,
        });
    }
    Ok(())
}

/// In-place forward transform of canonical input; returns the exclusive
/// bound on the (possibly lazy) outputs.
pub fn forward_in_place(a: &mut [u64], params: &NttParams, kind: TransformKind) -> Result<u64> {
    check_len(a.len(), params)?;
    forward_with(&Native, a, params, kind, |_, _| {})
}

/// In-place inverse transform of a bit-reversed spectrum whose values are
/// below `bound`; leaves canonical coefficients.
pub fn inverse_in_place(a: &mut [u64], bound: u64, params: &NttParams, kind: TransformKind) -> Result<()> {
    check_len(a.len(), params)?;
    inverse_with(&Native, a, bound, params, kind, |_, _| {})
}

pub fn ntt_forward(f: &Polynomial, params: &NttParams, kind: TransformKind) -> Result<Spectrum> {
    check_len(f.len(), params)?;
    if let Some(&c) = f.coeffs.iter().find(|&&c| c >= params.p()) {
        return Err(out_of_range("coefficient", c, format!("[0, {})", params.p())));
    }
    let mut values = f.coeffs.clone();
    let bound = forward_with(&Native, &mut values, params, kind, |_, _| {})?;
    debug_assert!(values.iter().all(|&v| v < bound));
    Ok(Spectrum {
        values,
        order: Order::BitReversed,
        bound,
    })
}

pub fn intt_inverse(s: &Spectrum, params: &NttParams, kind: TransformKind) -> Result<Polynomial> {
    if s.order != Order::BitReversed {
        return Err(Error::Precondition(
            "inverse transform expects a bit-reversed spectrum".into(),
        ));
    }
    check_len(s.values.len(), params)?;
    let mut coeffs = s.values.clone();
    inverse_with(&Native, &mut coeffs, s.bound, params, kind, |_, _| {})?;
    debug_assert!(coeffs.iter().all(|&c| c < params.p()));
    Ok(Polynomial { coeffs })
}

/// Forward transform calling `observer(layer, values)` after every layer
/// (layers are 1-based).
pub fn ntt_forward_observed(
    f: &Polynomial,
    params: &NttParams,
    kind: TransformKind,
    observer: impl FnMut(u32, &[u64]),
) -> Result<Spectrum> {
    check_len(f.len(), params)?;
    let mut values = f.coeffs.clone();
    let bound = forward_with(&Native, &mut values, params, kind, observer)?;
    Ok(Spectrum {
        values,
        order: Order::BitReversed,
        bound,
    })
}

/// Inverse transform calling `observer(layer, values)` after every
/// butterfly layer; the final scaling happens after the last call.
pub fn intt_inverse_observed(
    s: &Spectrum,
    params: &NttParams,
    kind: TransformKind,
    observer: impl FnMut(u32, &[u64]),
) -> Result<Polynomial> {
    check_len(s.values.len(), params)?;
    let mut coeffs = s.values.clone();
    inverse_with(&Native, &mut coeffs, s.bound, params, kind, observer)?;
    Ok(Polynomial { coeffs })
}

/// Maximum value present after each forward layer (index 0 is the input).
pub fn forward_layer_maxima(f: &Polynomial, params: &NttParams, kind: TransformKind) -> Result<Vec<u64>> {
    let mut maxima = vec![f.coeffs.iter().copied().max().unwrap_or(0)];
    ntt_forward_observed(f, params, kind, |_, v| {
        maxima.push(v.iter().copied().max().unwrap_or(0))
    })?;
    Ok(maxima)
}

/// Maximum value after each inverse layer, before the final scaling.
pub fn inverse_layer_maxima(s: &Spectrum, params: &NttParams, kind: TransformKind) -> Result<Vec<u64>> {
    let mut maxima = Vec::new();
    intt_inverse_observed(s, params, kind, |_, v| {
        maxima.push(v.iter().copied().max().unwrap_or(0))
    })?;
    Ok(maxima)
}

/// Sequence of primitive operations (and branch outcomes) executed by a
/// forward then inverse transform of `f`.
pub fn control_flow_trace(f: &Polynomial, params: &NttParams, kind: TransformKind) -> Result<Vec<Op>> {
    check_len(f.len(), params)?;
    let tracer = Tracing::new();
    let mut a = f.coeffs.clone();
    let bound = forward_with(&tracer, &mut a, params, kind, |_, _| {})?;
    let limit = inverse_input_limit(params, kind);
    // Keep the input-dependent pre-reduction decision out of the trace.
    let bound = bound.max(limit + 1);
    inverse_with(&tracer, &mut a, bound, params, kind, |_, _| {})?;
    Ok(tracer.take())
}

/// `a * b mod (x^N - 1, p)` through the improved transform; the pointwise
/// products use the modified Plantard multiplication with one factor moved
/// into the Plantard domain.
pub fn cyclic_convolution_via_ntt(a: &Polynomial, b: &Polynomial, params: &NttParams) -> Result<Polynomial> {
    cyclic_convolution_with(a, b, params, TransformKind::Improved)
}

pub fn cyclic_convolution_with(
    a: &Polynomial,
    b: &Polynomial,
    params: &NttParams,
    kind: TransformKind,
) -> Result<Polynomial> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let fa = ntt_forward(a, params, kind)?;
    let fb = ntt_forward(b, params, kind)?;
    let p = params.p();
    let values = match (kind, params.improved_tables()) {
        (TransformKind::Improved, Some(t)) => {
            let ctx = params.ctx();
            fa.values
                .iter()
                .zip(&fb.values)
                .map(|(&x, &y)| {
                    let x_hat = ctx.modified_plantard_mul_unchecked(t.encode.encoded(), x);
                    ctx.modified_plantard_mul_unchecked(x_hat, y)
                })
                .collect()
        }
        _ => fa
            .values
            .iter()
            .zip(&fb.values)
            .map(|(&x, &y)| mulmod(x % p, y % p, p))
            .collect(),
    };
    intt_inverse(&Spectrum::new(values, Order::BitReversed), params, kind)
}
