//! Timing harness: whole forward transforms per kind on identical seeded
//! inputs, with pairwise relative speedups.

use std::fmt::Write as _;
use std::hint::black_box;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::butterflies::{harvey_kernel, improved_ct_kernel, ntl_kernel, scott_kernel};
use crate::error::{Error, Result};
use crate::ops::Native;
use crate::params::{preset, NttParams, TransformKind};
use crate::transform::forward_in_place;

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "preset,kind,iters,mean_us,std_us";
const INPUT_POOL: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchMode {
    /// One sample is a full forward transform.
    Transform,
    /// One sample is `N/2` forward butterflies on the same twiddle.
    Butterfly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchConfig {
    pub preset: String,
    pub kinds: Vec<TransformKind>,
    pub iters: u64,
    pub warmup: u64,
    pub seed: u64,
    pub mode: BenchMode,
}

impl BenchConfig {
    pub fn new(preset: impl Into<String>, iters: u64, seed: u64) -> Self {
        Self {
            preset: preset.into(),
            kinds: TransformKind::ALL.to_vec(),
            iters,
            warmup: (iters / 10).clamp(1, 10_000),
            seed,
            mode: BenchMode::Transform,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iters == 0 {
            return Err(Error::Precondition("iterations must be positive".into()));
        }
        if self.kinds.is_empty() {
            return Err(Error::Precondition("no kinds selected".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindTiming {
    pub kind: TransformKind,
    pub mean_us: f64,
    pub std_us: f64,
}

/// `percent = (mean_baseline - mean_kind) / mean_baseline * 100`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Speedup {
    pub kind: TransformKind,
    pub baseline: TransformKind,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema: u32,
    pub preset: String,
    pub p: u64,
    pub size: usize,
    pub word_bits: u32,
    pub mode: BenchMode,
    pub iters: u64,
    pub warmup: u64,
    pub seed: u64,
    pub machine: String,
    pub build: String,
    pub timings: Vec<KindTiming>,
    pub speedups: Vec<Speedup>,
}

impl BenchReport {
    pub fn timing(&self, kind: TransformKind) -> Option<&KindTiming> {
        self.timings.iter().find(|t| t.kind == kind)
    }

    pub fn speedup(&self, kind: TransformKind, baseline: TransformKind) -> Option<f64> {
        let k = self.timing(kind)?.mean_us;
        let b = self.timing(baseline)?.mean_us;
        Some(speedup_percent(b, k))
    }

    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for t in &self.timings {
            let _ = writeln!(
                out,
                "{},{},{},{:.4},{:.4}",
                self.preset, t.kind, self.iters, t.mean_us, t.std_us
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "preset {} (p = {}, N = {}, n = {}), {:?} mode, {} iterations, seed {}",
            self.preset, self.p, self.size, self.word_bits, self.mode, self.iters, self.seed
        );
        let _ = writeln!(out, "machine: {}", self.machine);
        let _ = writeln!(out, "build: {}", self.build);
        for t in &self.timings {
            let _ = writeln!(
                out,
                "  {:<9} {:>10.3} us  (sd {:.3})",
                t.kind.name(),
                t.mean_us,
                t.std_us
            );
        }
        for s in &self.speedups {
            let _ = writeln!(
                out,
                "  {:<9} vs {:<9} {:>+8.2}%",
                s.kind.name(),
                s.baseline.name(),
                s.percent
            );
        }
        out
    }
}

pub fn speedup_percent(baseline_mean: f64, kind_mean: f64) -> f64 {
    (baseline_mean - kind_mean) / baseline_mean * 100.0
}

pub fn machine_descriptor() -> String {
    let model = std::fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|s| {
            s.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split_once(':'))
                .map(|(_, v)| v.trim().to_string())
        })
        .unwrap_or_else(|| "unknown cpu".into());
    format!("{model} ({}-{})", std::env::consts::ARCH, std::env::consts::OS)
}

pub fn build_descriptor() -> String {
    format!(
        "debug_assertions={}, avx2={}, bmi2={}",
        cfg!(debug_assertions),
        cfg!(target_feature = "avx2"),
        cfg!(target_feature = "bmi2")
    )
}

fn mean_std(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn input_pool(params: &NttParams, seed: u64) -> Vec<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..INPUT_POOL)
        .map(|_| (0..params.size()).map(|_| rng.random_range(0..params.p())).collect())
        .collect()
}

fn time_transform(params: &NttParams, kind: TransformKind, pool: &[Vec<u64>], cfg: &BenchConfig) -> Result<Vec<f64>> {
    let mut buf = vec![0u64; params.size()];
    let mut samples = Vec::with_capacity(cfg.iters as usize);
    for i in 0..cfg.warmup + cfg.iters {
        buf.copy_from_slice(&pool[i as usize % pool.len()]);
        let start = Instant::now();
        forward_in_place(black_box(&mut buf), params, kind)?;
        let dt = start.elapsed();
        black_box(&buf);
        if i >= cfg.warmup {
            samples.push(dt.as_secs_f64() * 1e6);
        }
    }
    Ok(samples)
}

fn time_butterflies(params: &NttParams, kind: TransformKind, pool: &[Vec<u64>], cfg: &BenchConfig) -> Result<Vec<f64>> {
    params
        .kinds()
        .contains(&kind)
        .then_some(())
        .ok_or_else(|| Error::Precondition(format!("no `{kind}` tables in these parameters")))?;
    let ctx = params.ctx();
    let half = params.size() / 2;
    let o = Native;
    let mut samples = Vec::with_capacity(cfg.iters as usize);
    let mut out = vec![0u64; params.size()];
    for i in 0..cfg.warmup + cfg.iters {
        let src = &pool[i as usize % pool.len()];
        let (xs, ys) = src.split_at(half);
        let start = Instant::now();
        match kind {
            TransformKind::Ntl => {
                let w = params.ntl_tables().map(|t| t.forward[1 % t.forward.len()]).unwrap();
                for j in 0..half {
                    (out[j], out[j + half]) = ntl_kernel(&o, xs[j], ys[j], black_box(w), ctx);
                }
            }
            TransformKind::Harvey => {
                let w = params.harvey_tables().map(|t| t.forward[1 % t.forward.len()]).unwrap();
                for j in 0..half {
                    (out[j], out[j + half]) = harvey_kernel(&o, xs[j], ys[j], black_box(w), ctx);
                }
            }
            TransformKind::Scott => {
                let w = params.scott_tables().map(|t| t.forward[1 % t.forward.len()]).unwrap();
                let lazy = params.scott_config().map(|c| c.lazy_bound(params.p())).unwrap();
                for j in 0..half {
                    (out[j], out[j + half]) = scott_kernel(&o, xs[j], ys[j], black_box(w), ctx, lazy, false);
                }
            }
            TransformKind::Improved => {
                let w = params
                    .improved_tables()
                    .map(|t| t.tables.forward[1 % t.tables.forward.len()])
                    .unwrap();
                for j in 0..half {
                    (out[j], out[j + half]) = improved_ct_kernel(&o, xs[j], ys[j], black_box(w), ctx);
                }
            }
        }
        let dt = start.elapsed();
        black_box(&out);
        if i >= cfg.warmup {
            samples.push(dt.as_secs_f64() * 1e6);
        }
    }
    Ok(samples)
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let params = preset(&cfg.preset)?;
    run_bench_with(cfg, &params)
}

pub fn run_bench_with(cfg: &BenchConfig, params: &NttParams) -> Result<BenchReport> {
    cfg.validate()?;
    let pool = input_pool(params, cfg.seed);
    let mut timings = Vec::with_capacity(cfg.kinds.len());
    for &kind in &cfg.kinds {
        let samples = match cfg.mode {
            BenchMode::Transform => time_transform(params, kind, &pool, cfg)?,
            BenchMode::Butterfly => time_butterflies(params, kind, &pool, cfg)?,
        };
        let (mean_us, std_us) = mean_std(&samples);
        // Clock granularity can round a sample to zero; the mean never is.
        let mean_us = mean_us.max(f64::MIN_POSITIVE);
        timings.push(KindTiming { kind, mean_us, std_us });
    }
    let mut speedups = Vec::new();
    for (i, base) in timings.iter().enumerate() {
        for t in &timings[i + 1..] {
            speedups.push(Speedup {
                kind: t.kind,
                baseline: base.kind,
                percent: speedup_percent(base.mean_us, t.mean_us),
            });
        }
    }
    Ok(BenchReport {
        schema: SCHEMA_VERSION,
        preset: cfg.preset.clone(),
        p: params.p(),
        size: params.size(),
        word_bits: params.word_bits(),
        mode: cfg.mode,
        iters: cfg.iters,
        warmup: cfg.warmup,
        seed: cfg.seed,
        machine: machine_descriptor(),
        build: build_descriptor(),
        timings,
        speedups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn speedup_arithmetic() {
        assert!((speedup_percent(16.744, 13.700) - 18.18).abs() < 0.01);
        assert_eq!(speedup_percent(3.0, 3.0), 0.0);
    }

    #[test]
    fn report_shape() {
        let r = run_bench(&BenchConfig::new("toy13", 50, 1)).unwrap();
        assert_eq!(r.schema, 1);
        assert_eq!(r.timings.len(), 4);
        assert_eq!(r.speedups.len(), 6);
        assert!(r.timings.iter().all(|t| t.mean_us > 0.0));
        assert_eq!(r.speedup(TransformKind::Harvey, TransformKind::Harvey), Some(0.0));
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<BenchReport>(&json).unwrap(), r);
        assert_eq!(r.csv_rows().lines().count(), 4);
        let mut tricky = r.clone();
        tricky.timings[0].std_us = 0.020760539492026706;
        let json = serde_json::to_string(&tricky).unwrap();
        assert_eq!(serde_json::from_str::<BenchReport>(&json).unwrap(), tricky);
    }

    #[test]
    fn micro_mode_and_validation() {
        let mut cfg = BenchConfig::new("kyber256", 20, 3);
        cfg.mode = BenchMode::Butterfly;
        assert_eq!(run_bench(&cfg).unwrap().timings.len(), 4);
        cfg.iters = 0;
        assert!(run_bench(&cfg).is_err());
        assert!(run_bench(&BenchConfig::new("nope", 1, 0)).is_err());
    }
}
