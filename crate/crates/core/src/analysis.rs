//! Refutation of the published signed Plantard reduction.
//!
//! For `A = W T` let `h = A mu mod ±2^{2n}`. Then `h p - A` is divisible by
//! `2^{2n}` and `K = (h p - A) / 2^{2n}` is the correctly reduced value
//! `A (-2^{-2n}) mod ±p`. The published formula approximates `K` with two
//! floored shifts and the `+ 2^alpha` rounding term; these helpers compare
//! the two case by case.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reductions::{ReductionContext, ShiftSemantics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Match,
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseReport {
    pub w: i64,
    pub t: i64,
    pub a: i64,
    pub h: i64,
    pub k: i64,
    pub alg_output: i64,
    pub semantics: ShiftSemantics,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchSpace {
    /// Every `(W, T)` with `|W|, |T| <= p 2^alpha`.
    Exhaustive,
    Random {
        count: u64,
        seed: u64,
    },
    Explicit(Vec<(i64, i64)>),
}

impl SearchSpace {
    /// Number of cases the search would evaluate.
    pub fn size(&self, ctx: &ReductionContext) -> u128 {
        match self {
            SearchSpace::Exhaustive => {
                let side = 2 * ((ctx.p() as u128) << ctx.alpha()) + 1;
                side * side
            }
            SearchSpace::Random { count, .. } => *count as u128,
            SearchSpace::Explicit(cases) => cases.len() as u128,
        }
    }
}

/// `(h, K)` for the product `A = W T`.
fn h_and_k(w: i64, t: i64, ctx: &ReductionContext) -> (i128, i128) {
    let a = w as i128 * t as i128;
    let h = ctx.signed_plantard_h(a);
    let num = h * ctx.p() as i128 - a;
    let shift = 2 * ctx.word_bits();
    debug_assert_eq!(num & ((1i128 << shift) - 1), 0, "h p - A not divisible by 2^2n");
    (h, num >> shift)
}

/// Residue of `h p - A` modulo `2^{2n}`; zero for every input.
pub fn exactness_residue(w: i64, t: i64, ctx: &ReductionContext) -> Result<u64> {
    ctx.check_signed_plantard()?;
    ctx.check_signed_plantard_inputs(w, t)?;
    let a = w as i128 * t as i128;
    let h = ctx.signed_plantard_h(a);
    let m = 1i128 << (2 * ctx.word_bits());
    Ok((h * ctx.p() as i128 - a).rem_euclid(m) as u64)
}

pub fn crt_predicted_value(w: i64, t: i64, ctx: &ReductionContext) -> Result<i64> {
    ctx.check_signed_plantard()?;
    ctx.check_signed_plantard_inputs(w, t)?;
    Ok(h_and_k(w, t, ctx).1 as i64)
}

pub fn verify_alg6_case(w: i64, t: i64, ctx: &ReductionContext, sem: ShiftSemantics) -> Result<CaseReport> {
    let alg_output = ctx.signed_plantard_redc(w, t, sem)?;
    let (h, k) = h_and_k(w, t, ctx);
    Ok(CaseReport {
        w,
        t,
        a: w * t,
        h: h as i64,
        k: k as i64,
        alg_output,
        semantics: sem,
        verdict: if alg_output as i128 == k {
            Verdict::Match
        } else {
            Verdict::Mismatch
        },
    })
}

/// Mismatching cases in `space`, sorted by `(W, T)` without duplicates.
/// Fails with [`Error::BudgetExceeded`] before doing any work when the space
/// holds more than `budget` cases.
pub fn search_counterexamples(
    ctx: &ReductionContext,
    sem: ShiftSemantics,
    space: &SearchSpace,
    budget: u64,
) -> Result<Vec<CaseReport>> {
    ctx.check_signed_plantard()?;
    let needed = space.size(ctx);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let lim = (ctx.p() as i64) << ctx.alpha();
    let mut found = Vec::new();
    let mut visit = |w: i64, t: i64| -> Result<()> {
        let report = verify_alg6_case(w, t, ctx, sem)?;
        if report.verdict == Verdict::Mismatch {
            found.push(report);
        }
        Ok(())
    };
    match space {
        SearchSpace::Exhaustive => {
            for w in -lim..=lim {
                for t in -lim..=lim {
                    visit(w, t)?;
                }
            }
        }
        SearchSpace::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for _ in 0..*count {
                let w = rng.random_range(-lim..=lim);
                let t = rng.random_range(-lim..=lim);
                visit(w, t)?;
            }
        }
        SearchSpace::Explicit(cases) => {
            for &(w, t) in cases {
                visit(w, t)?;
            }
        }
    }
    found.sort_by_key(|r| (r.w, r.t));
    found.dedup_by_key(|r| (r.w, r.t));
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{reference_residue, Factor, SignMode};
    use ShiftSemantics::*;

    fn ctx31() -> ReductionContext {
        ReductionContext::new(31, 6).unwrap()
    }

    #[test]
    fn published_case() {
        let ctx = ctx31();
        assert_eq!(crt_predicted_value(19, -5, &ctx).unwrap(), -15);
        let s = verify_alg6_case(19, -5, &ctx, SignedFloor).unwrap();
        assert_eq!((s.alg_output, s.k, s.verdict), (-14, -15, Verdict::Mismatch));
        let a = verify_alg6_case(19, -5, &ctx, ArithmeticFloor).unwrap();
        assert_eq!((a.alg_output, a.k, a.verdict), (-16, -15, Verdict::Mismatch));
        assert_eq!(a.a, -95);
    }

    #[test]
    fn unit_case() {
        let ctx = ctx31();
        let a = verify_alg6_case(1, 1, &ctx, ArithmeticFloor).unwrap();
        assert_eq!((a.h, a.k, a.alg_output, a.verdict), (-1057, -8, -8, Verdict::Match));
        let s = verify_alg6_case(1, 1, &ctx, SignedFloor).unwrap();
        assert_eq!((s.alg_output, s.verdict), (-7, Verdict::Mismatch));
        assert_eq!(crt_predicted_value(0, 17, &ctx).unwrap(), 0);
    }

    #[test]
    fn out_of_range_rejected() {
        let ctx = ctx31();
        assert!(crt_predicted_value(32, 0, &ctx).is_err());
        assert!(verify_alg6_case(0, -32, &ctx, SignedFloor).is_err());
    }

    #[test]
    fn exhaustive_exactness_and_soundness() {
        let ctx = ctx31();
        for w in -31..=31 {
            for t in -31..=31 {
                assert_eq!(exactness_residue(w, t, &ctx).unwrap(), 0);
                let k = crt_predicted_value(w, t, &ctx).unwrap();
                assert!(2 * k.abs() < 31, "K = {k} at ({w}, {t})");
                let want = reference_residue((w * t) as i128, 31, 4096, SignMode::Centered, Factor::NegRInv);
                assert_eq!(k as i128, want, "({w}, {t})");
            }
        }
    }

    #[test]
    fn exhaustive_search_finds_both_cases() {
        let ctx = ctx31();
        let arith = search_counterexamples(&ctx, ArithmeticFloor, &SearchSpace::Exhaustive, 1 << 20).unwrap();
        assert!(arith.iter().any(|r| (r.w, r.t) == (19, -5)));
        assert!(arith.windows(2).all(|p| (p[0].w, p[0].t) < (p[1].w, p[1].t)));
        let signed = search_counterexamples(&ctx, SignedFloor, &SearchSpace::Exhaustive, 1 << 20).unwrap();
        assert!(signed.iter().any(|r| (r.w, r.t) == (1, 1) && r.alg_output == -7));
    }

    #[test]
    fn search_edge_cases() {
        let ctx = ctx31();
        let zero = SearchSpace::Explicit(vec![(0, 0)]);
        assert!(search_counterexamples(&ctx, SignedFloor, &zero, 10).unwrap().is_empty());
        assert!(matches!(
            search_counterexamples(&ctx, SignedFloor, &SearchSpace::Exhaustive, 0),
            Err(Error::BudgetExceeded {
                needed: 3969,
                budget: 0
            })
        ));
        let r1 = SearchSpace::Random { count: 500, seed: 9 };
        let a = search_counterexamples(&ctx, ArithmeticFloor, &r1, 1000).unwrap();
        let b = search_counterexamples(&ctx, ArithmeticFloor, &r1, 1000).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn report_round_trips_through_json() {
        let r = verify_alg6_case(19, -5, &ctx31(), ArithmeticFloor).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"semantics\":\"arithmetic-floor\""));
        assert_eq!(serde_json::from_str::<CaseReport>(&s).unwrap(), r);
    }
}
