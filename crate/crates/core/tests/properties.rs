use ntt_kernel::butterflies::{
    harvey_butterfly, improved_ct_butterfly, improved_gs_butterfly, ntl_butterfly, scott_butterfly, MontTwiddle,
    NtlTwiddle, PlantardTwiddle, ScottConfig,
};
use ntt_kernel::crt::{centered_mod, crt_recombine, qin_identity, ModulusPair};
use ntt_kernel::oracle::{mul_mod, naive_dft, reference_residue, schoolbook_cyclic_convolution, Factor, SignMode};
use ntt_kernel::params::bit_reverse;
use ntt_kernel::transform::{cyclic_convolution_with, fft1_recursive, fft2_recursive};
use ntt_kernel::{intt_inverse, ntt_forward, preset, NttParams, Polynomial, ReductionContext, TransformKind};
use proptest::prelude::*;
use std::sync::OnceLock;

fn kyber() -> &'static NttParams {
    static P: OnceLock<NttParams> = OnceLock::new();
    P.get_or_init(|| preset("kyber256").unwrap())
}

fn kind() -> impl Strategy<Value = TransformKind> {
    prop::sample::select(TransformKind::ALL.to_vec())
}

fn poly(p: u64, size: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(0..p, size).prop_map(|v| Polynomial::new(v).unwrap())
}

fn odd_below(limit: u64) -> impl Strategy<Value = u64> {
    (1..limit / 2).prop_map(|k| 2 * k + 1)
}

proptest! {
    #[test]
    fn qin_identity_exact(p in odd_below(1 << 30), k in 1u32..=64) {
        let r = 1u128 << k;
        let w = qin_identity(p as u128, r).unwrap();
        prop_assert_eq!(w.p_inv * p as u128 + w.r_inv * r, 1 + p as u128 * r);
    }

    #[test]
    fn crt_split_recombine(p in odd_below(1 << 20), k in 1u32..=32, x in any::<u64>()) {
        let pair = ModulusPair::new(p as u128, 1u128 << k).unwrap();
        let x = x as u128 % pair.product();
        prop_assert_eq!(crt_recombine(x % pair.p(), x % pair.r(), &pair).unwrap(), x);
    }

    #[test]
    fn centered_mod_offset(x in any::<i64>(), k in 1u32..=62) {
        let m = 1u128 << k;
        let d = centered_mod(x as i128, m) - (x as i128).rem_euclid(m as i128);
        prop_assert!(d == 0 || d == -(m as i128));
    }

    #[test]
    fn montgomery_matches_oracle(p in odd_below(1 << 31), t in any::<u64>()) {
        let ctx = ReductionContext::new(p, 32).unwrap();
        let t = t % (p * p);
        let r = ctx.mont_redc(t).unwrap();
        prop_assert!(r < p);
        prop_assert_eq!(r as i128, reference_residue(t as i128, p, 1 << 32, SignMode::Unsigned, Factor::RInv));
    }

    #[test]
    fn signed_montgomery_contract(p in prop::sample::select(vec![7681u64, 12289]), a in any::<i64>()) {
        let ctx = ReductionContext::new(p, 16).unwrap();
        let half = (p as i64) << 15;
        let a = a.rem_euclid(2 * half - 1) - (half - 1);
        let r = ctx.signed_mont_redc(a).unwrap();
        prop_assert!(r.abs() < p as i64);
        let want = reference_residue(a as i128, p, 1 << 16, SignMode::Unsigned, Factor::RInv);
        prop_assert_eq!((r as i128).rem_euclid(p as i128), want);
    }

    #[test]
    fn modified_plantard_contract(
        (p, ell) in prop::sample::select(vec![(7681u64, 8u32), (12289, 10)]),
        w in any::<u64>(),
        t in any::<u64>(),
    ) {
        let ctx = ReductionContext::new(p, 32).unwrap().with_ell(ell);
        let (w, t) = (w % p, t % (p << ell));
        let r = ctx.modified_plantard_mul(w, t).unwrap();
        prop_assert!(r < p);
        let want = reference_residue((w * t) as i128, p, 1 << 64, SignMode::Unsigned, Factor::NegRInv);
        prop_assert_eq!(r as i128, want);
        let h = ctx.modified_plantard_h(w, t);
        prop_assert_eq!(h.wrapping_mul(p).wrapping_sub(w * t), 0);
    }

    #[test]
    fn butterflies_agree_with_schoolbook(w in 1u64..7681, x in 0u64..7681, y in 0u64..7681) {
        let params = kyber();
        let ctx = params.ctx();
        let p = 7681;
        let sum = (x + y) % p;
        let diff_w = mul_mod(w, (x + p - y) % p, p);
        let wy = mul_mod(w, y, p);

        let o = ntl_butterfly(x, y, NtlTwiddle::new(w, ctx), ctx).unwrap();
        prop_assert_eq!((o.x_out, o.y_out), (sum, diff_w));
        let o = harvey_butterfly(x, y, MontTwiddle::new(w, ctx), ctx).unwrap();
        prop_assert!(o.x_out < 2 * p && o.y_out < 2 * p);
        prop_assert_eq!((o.x_out % p, o.y_out % p), (sum, diff_w));
        let cfg = ScottConfig::new(256, ctx).unwrap();
        let o = scott_butterfly(x, y, MontTwiddle::new(w, ctx), ctx, &cfg, false).unwrap();
        prop_assert_eq!((o.x_out % p, o.y_out % p), (sum, diff_w));
        let o = improved_ct_butterfly(x, y, PlantardTwiddle::new(w, ctx), ctx).unwrap();
        prop_assert_eq!((o.x_out % p, o.y_out % p), ((x + wy) % p, (x + p - wy) % p));
        let o = improved_gs_butterfly(x, y, PlantardTwiddle::new(w, ctx), ctx, 1).unwrap();
        prop_assert!(o.y_out < p);
        prop_assert_eq!((o.x_out % p, o.y_out), (sum, diff_w));
    }

    #[test]
    fn ct_chain_grows_additively(w in 1u64..7681, x0 in 0u64..7681, ys in prop::collection::vec(any::<u64>(), 7)) {
        let ctx = kyber().ctx();
        let p = 7681;
        let mut x = x0;
        for (s, y) in ys.into_iter().enumerate() {
            // the partner input is itself a depth-s value
            let y = y % ((s as u64 + 1) * p);
            x = improved_ct_butterfly(x, y, PlantardTwiddle::new(w, ctx), ctx).unwrap().x_out;
            prop_assert!(x < (s as u64 + 2) * p);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ntt_is_linear(k in kind(), f in poly(7681, 256), g in poly(7681, 256), alpha in 0u64..7681) {
        let params = kyber();
        let p = 7681;
        let mix = Polynomial::new(
            f.coeffs().iter().zip(g.coeffs()).map(|(a, b)| (mul_mod(alpha, *a, p) + b) % p).collect(),
        ).unwrap();
        let lhs = ntt_forward(&mix, params, k).unwrap().canonical(p);
        let ff = ntt_forward(&f, params, k).unwrap().canonical(p);
        let fg = ntt_forward(&g, params, k).unwrap().canonical(p);
        for i in 0..256 {
            prop_assert_eq!(lhs[i], (mul_mod(alpha, ff[i], p) + fg[i]) % p);
        }
    }

    #[test]
    fn round_trip(k in kind(), f in poly(7681, 256)) {
        let params = kyber();
        let s = ntt_forward(&f, params, k).unwrap();
        prop_assert!(s.values().iter().all(|&v| v < s.bound()));
        prop_assert_eq!(intt_inverse(&s, params, k).unwrap(), f);
    }

    #[test]
    fn convolution_theorem(k in kind(), a in poly(7681, 256), b in poly(7681, 256)) {
        let params = kyber();
        let c = cyclic_convolution_with(&a, &b, params, k).unwrap();
        prop_assert_eq!(c.coeffs(), &schoolbook_cyclic_convolution(a.coeffs(), b.coeffs(), 7681).unwrap()[..]);
        let fa = ntt_forward(&a, params, k).unwrap().canonical(7681);
        let fb = ntt_forward(&b, params, k).unwrap().canonical(7681);
        let fc = ntt_forward(&c, params, k).unwrap().canonical(7681);
        for i in 0..256 {
            prop_assert_eq!(fc[i], mul_mod(fa[i], fb[i], 7681));
        }
    }

    #[test]
    fn forward_output_is_bit_reversed_dft(k in kind(), f in poly(7681, 256)) {
        let params = kyber();
        let dft = naive_dft(f.coeffs(), params.omega(), 7681);
        let s = ntt_forward(&f, params, k).unwrap().canonical(7681);
        for (i, v) in s.iter().enumerate() {
            prop_assert_eq!(*v, dft[bit_reverse(i, 8)]);
        }
    }

    #[test]
    fn recursive_ffts_agree(log in 1u32..=10, seed in any::<u64>()) {
        let size = 1usize << log;
        let p = 12289u64;
        let omega = ntt_kernel::params::find_primitive_root(p, size as u64).unwrap();
        let coeffs: Vec<u64> = (0..size as u64).map(|i| (seed ^ i.wrapping_mul(0x9e37_79b9_7f4a_7c15)) % p).collect();
        let f = Polynomial::new(coeffs.clone()).unwrap();
        let dft = naive_dft(&coeffs, omega, p);
        prop_assert_eq!(fft1_recursive(&f, omega, p).unwrap().values().to_vec(), dft.clone());
        prop_assert_eq!(fft2_recursive(&f, omega, p).unwrap().values().to_vec(), dft.clone());
    }
}
