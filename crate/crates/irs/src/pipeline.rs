//! Experiment pipelines: pure functions of their configuration and seed.

use std::collections::{BTreeMap, BTreeSet};

use irs_core::coxeter::{enumerate_word_ball, Ball, Letter, TriangleGroup};
use irs_core::envelope::{
    contains_ball, conv_envelope, envelope_bound, envelope_excess, is_convex, removable_octagons, Envelope, RaoGroup,
};
use irs_core::field::{ratio_to_f64, Rational};
use irs_core::irs::{
    check_radius, conjugate_fingerprint, exact_fingerprint_law, fingerprint, required_radius, ball_depth,
    sample_subgroup, sample_subgroup_unweighted, Fingerprint, SubgroupHandle,
};
use irs_core::polygon::BlockSet;
use irs_core::shift::{reweight, sample_stream, uniform_index, ReweightedMeasure, ShiftMeasure};
use serde::{Deserialize, Serialize};

use crate::error::PipelineError;
use crate::harness::Harness;
use crate::io::{ball_hash, word_from_string, word_to_string, EnvelopeChecks, FingerprintRecord, Report, StatRow};
use crate::stats::{chi_square, linear_fit, paired_permutation_test, proportion_stderr, tv_between_laws, LinearFit};

pub const GENERATOR_NAMES: [&str; 3] = ["s1", "s2", "s3"];

/// A seed for a sub-experiment, mixed from the run seed and a tag.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Shared state: the group, its blocks and a worker pool.
pub struct Context {
    pub group: TriangleGroup,
    pub blocks: BlockSet,
    pub harness: Harness,
}

impl Context {
    pub fn new(threads: usize) -> Self {
        let group = TriangleGroup::new();
        let blocks = BlockSet::new(&group).expect("block templates satisfy their constraints");
        Context { group, blocks, harness: Harness::new(threads) }
    }

    pub fn reweighted(&self, m: &ShiftMeasure) -> Result<ReweightedMeasure, PipelineError> {
        let (n1, n2) = self.blocks.weights();
        Ok(reweight(m.clone(), n1 as u64, n2 as u64)?)
    }
}

#[derive(Clone, Debug)]
pub struct SampleConfig {
    pub measure: ShiftMeasure,
    /// Window radius k: the window is a[−k..=k].
    pub radius: usize,
    pub samples: u64,
    pub seed: u64,
    /// Draw windows from ν instead of ν′ (negative control).
    pub unweighted: bool,
}

/// Smallest window radius that supports fingerprints of `ball` and of its
/// conjugates by one generator.
pub fn window_radius_for(ctx: &Context, ball: &Ball) -> usize {
    required_radius(&ctx.blocks, ball_depth(ball) + 2)
}

pub fn sample(ctx: &Context, cfg: &SampleConfig, ball: &Ball) -> Result<Vec<FingerprintRecord>, PipelineError> {
    check_radius(&ctx.blocks, cfg.radius, ball, 1)?;
    let m = ctx.reweighted(&cfg.measure)?;
    let hash = ball_hash(ball);
    let records = ctx.harness.try_map(cfg.samples, |i| {
        let mut rng = sample_stream(cfg.seed, i);
        let h = if cfg.unweighted {
            sample_subgroup_unweighted(&ctx.blocks, &cfg.measure, cfg.radius, &mut rng)?
        } else {
            sample_subgroup(&ctx.blocks, &m, cfg.radius, &mut rng)?
        };
        let fp = fingerprint(&h, ball)?;
        Ok::<_, PipelineError>(FingerprintRecord {
            sample_id: i,
            seed: cfg.seed,
            window: word_to_string(&h.window),
            marked_tile_index: h.marked_in_block,
            ball_hash: hash.clone(),
            members: fp.members(),
        })
    })?;
    Ok(records)
}

/// Handles rebuilt from fingerprint records, with each stored fingerprint
/// checked against a recomputation.
pub fn rebuild_handles(
    ctx: &Context,
    records: &[FingerprintRecord],
    ball: &Ball,
) -> Result<Vec<SubgroupHandle>, PipelineError> {
    let hash = ball_hash(ball);
    ctx.harness.try_map(records.len() as u64, |i| {
        let r = &records[i as usize];
        if r.ball_hash != hash {
            return Err(PipelineError::Usage(format!("sample {} was fingerprinted on a different ball", r.sample_id)));
        }
        let h = SubgroupHandle::new(&ctx.blocks, word_from_string(&r.window)?, r.marked_tile_index)?;
        if fingerprint(&h, ball)?.members() != r.members {
            return Err(PipelineError::Verification(format!("stored fingerprint of sample {} is wrong", r.sample_id)));
        }
        Ok(h)
    })
}

/// Paired permutation tests of `law(H) = law(s H s)` for each generator s.
pub fn invariance_test(
    ctx: &Context,
    records: &[FingerprintRecord],
    ball: &Ball,
    shuffles: usize,
    seed: u64,
) -> Result<Vec<Report>, PipelineError> {
    if records.len() < 100 {
        return Err(PipelineError::Usage("invariance test needs at least 100 samples".into()));
    }
    let handles = rebuild_handles(ctx, records, ball)?;
    for h in &handles {
        check_radius(&ctx.blocks, h.radius, ball, 1)?;
    }
    let base: Vec<Fingerprint> = ctx.harness.try_map(handles.len() as u64, |i| fingerprint(&handles[i as usize], ball))?;
    let mut reports = Vec::new();
    for k in 0..3u8 {
        let moved: Vec<Fingerprint> = ctx
            .harness
            .try_map(handles.len() as u64, |i| conjugate_fingerprint(&handles[i as usize], &[k], ball))?;
        let (tv, p) = paired_permutation_test(&base, &moved, shuffles, derive_seed(seed, u64::from(k)));
        reports.push(Report { generator: GENERATOR_NAMES[k as usize].into(), tv, p_value: p, n_samples: base.len() });
    }
    Ok(reports)
}

/// Every exhaustively enumerated conjugate of Γ_{P_b} for a periodic word b,
/// with the probability the IRS gives it at this ball.
pub fn periodic_conjugates(
    ctx: &Context,
    word: &[u8],
    ball: &Ball,
) -> Result<BTreeMap<Fingerprint, Rational>, PipelineError> {
    let radius = window_radius_for(ctx, ball);
    let n = word.len();
    let total: usize = word.iter().map(|&s| ctx.blocks.for_symbol(s).tile_count()).sum();
    let share = Rational::new(1.into(), (total as i64).into());
    let mut law = BTreeMap::new();
    for phase in 0..n {
        let window: Vec<u8> = (0..2 * radius + 1).map(|i| word[(phase + n * (radius / n + 1) + i - radius) % n]).collect();
        for t in 0..ctx.blocks.for_symbol(window[radius]).tile_count() {
            let h = SubgroupHandle::new(&ctx.blocks, window.clone(), t)?;
            *law.entry(fingerprint(&h, ball)?).or_insert_with(|| Rational::new(0.into(), 1.into())) += &share;
        }
    }
    Ok(law)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicReport {
    pub word: String,
    pub conjugates: usize,
    pub observed: usize,
    pub support_match: bool,
    pub chi_square: f64,
    pub df: usize,
    pub p_value: f64,
    pub n_samples: u64,
}

/// Sampled fingerprints of μ for a periodic measure against the uniform law
/// on the enumerated conjugates.
pub fn periodic_check(
    ctx: &Context,
    word: &[u8],
    ball: &Ball,
    samples: u64,
    seed: u64,
) -> Result<PeriodicReport, PipelineError> {
    let law = periodic_conjugates(ctx, word, ball)?;
    let cfg = SampleConfig {
        measure: ShiftMeasure::periodic(word.to_vec())?,
        radius: window_radius_for(ctx, ball),
        samples,
        seed,
        unweighted: false,
    };
    let records = sample(ctx, &cfg, ball)?;
    let mut counts: BTreeMap<Fingerprint, u64> = BTreeMap::new();
    for r in &records {
        *counts.entry(Fingerprint::from_members(ball.len(), &r.members)).or_insert(0) += 1;
    }
    let support_match = counts.keys().collect::<BTreeSet<_>>() == law.keys().collect::<BTreeSet<_>>();
    let observed: Vec<u64> = law.keys().map(|f| counts.get(f).copied().unwrap_or(0)).collect();
    let expected: Vec<f64> = law.values().map(ratio_to_f64).collect();
    let (stat, df, p) = chi_square(&observed, &expected);
    Ok(PeriodicReport {
        word: word_to_string(word),
        conjugates: law.len(),
        observed: counts.len(),
        support_match,
        chi_square: stat,
        df,
        p_value: if support_match { p } else { 0.0 },
        n_samples: samples,
    })
}

fn cylinder_tv(a: &ShiftMeasure, b: &ShiftMeasure, len: usize) -> Rational {
    let mut d = Rational::new(0.into(), 1.into());
    for bits in 0..1u32 << len {
        let w: Vec<u8> = (0..len).map(|i| if bits >> i & 1 == 1 { 2 } else { 1 }).collect();
        let x = a.cylinder(&w) - b.cylinder(&w);
        d += if x < Rational::new(0.into(), 1.into()) { -x } else { x };
    }
    d / Rational::new(2.into(), 1.into())
}

/// The periodic word of period `n` whose orbit measure best matches `target`
/// on cylinders: lexicographically smallest vector of cylinder distances for
/// lengths 1..=n, ties to the smallest word.
pub fn periodic_approximant(target: &ShiftMeasure, n: usize) -> Vec<u8> {
    let mut best: Option<(Vec<Rational>, Vec<u8>)> = None;
    for bits in 0..1u32 << n {
        let w: Vec<u8> = (0..n).map(|i| if bits >> (n - 1 - i) & 1 == 1 { 2 } else { 1 }).collect();
        let m = ShiftMeasure::Periodic(w.clone());
        let key: Vec<Rational> = (1..=n).map(|l| cylinder_tv(target, &m, l)).collect();
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, w));
        }
    }
    best.expect("n ≥ 1").1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakLimitRow {
    pub order: usize,
    pub word: String,
    /// Longest cylinder length on which the approximant agrees with the target.
    pub agreement: usize,
    /// TV between the sampled fingerprint histograms.
    pub tv: f64,
    /// TV between the exact fingerprint laws.
    pub exact_tv: f64,
    pub n_samples: u64,
}

fn empirical_law(records: &[FingerprintRecord]) -> BTreeMap<Vec<usize>, f64> {
    let mut h: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for r in records {
        *h.entry(r.members.clone()).or_insert(0.0) += 1.0 / records.len() as f64;
    }
    h
}

/// Fingerprint laws of μ for periodic approximants against the target.
pub fn weak_limit(
    ctx: &Context,
    target: &ShiftMeasure,
    orders: &[usize],
    ball: &Ball,
    samples: u64,
    seed: u64,
) -> Result<Vec<WeakLimitRow>, PipelineError> {
    let radius = window_radius_for(ctx, ball);
    let exact = |m: &ShiftMeasure| -> Result<BTreeMap<Vec<usize>, f64>, PipelineError> {
        let law = exact_fingerprint_law(&ctx.blocks, &ctx.reweighted(m)?, radius, ball, &[])?;
        Ok(law.into_iter().map(|(f, p)| (f.members(), ratio_to_f64(&p))).collect())
    };
    let run = |m: &ShiftMeasure, tag: u64| {
        let cfg = SampleConfig { measure: m.clone(), radius, samples, seed: derive_seed(seed, tag), unweighted: false };
        sample(ctx, &cfg, ball).map(|r| empirical_law(&r))
    };
    let target_sampled = run(target, 0)?;
    let target_exact = exact(target)?;
    let mut rows = Vec::new();
    for &n in orders {
        if n == 0 || n > 16 {
            return Err(PipelineError::Usage("approximation orders must be in 1..=16".into()));
        }
        let word = periodic_approximant(target, n);
        let m = ShiftMeasure::periodic(word.clone())?;
        let zero = Rational::new(0.into(), 1.into());
        let agreement = (1..=n).take_while(|&l| cylinder_tv(target, &m, l) == zero).count();
        let sampled = run(&m, n as u64)?;
        rows.push(WeakLimitRow {
            order: n,
            word: word_to_string(&word),
            agreement,
            tv: tv_between_laws(&sampled, &target_sampled),
            exact_tv: tv_between_laws(&exact(&m)?, &target_exact),
            n_samples: samples,
        });
    }
    Ok(rows)
}

/// Word-length ball of Γ_O.
pub fn octagon_ball(rao: &RaoGroup, len: usize, max_elements: usize) -> Result<Ball, PipelineError> {
    Ok(enumerate_word_ball(&rao.group, rao.generators.clone(), len, max_elements)?)
}

/// Checks that `ball` is a ball of Γ_O on the generators r_k.
pub fn require_octagon_ball(rao: &RaoGroup, ball: &Ball) -> Result<(), PipelineError> {
    if ball.generators() != rao.generators.as_slice() {
        return Err(PipelineError::Usage("ball is not built on the octagon reflections (use ball --octagon-group)".into()));
    }
    Ok(())
}

/// The sub-balls of word length 0, 1, … of a BFS-ordered ball.
pub fn word_length_layers(ball: &Ball) -> Vec<Ball> {
    let depth = ball_depth(ball);
    (0..=depth)
        .map(|l| {
            let idx: Vec<usize> = (0..ball.len()).filter(|&i| ball.word(i).len() <= l).collect();
            Ball::from_parts(
                irs_core::coxeter::BallCap::WordLength(l),
                ball.generators().to_vec(),
                idx.iter().map(|&i| ball.word(i).to_vec()).collect(),
                idx.iter().map(|&i| ball.element(i).clone()).collect(),
            )
            .expect("sub-ball of a valid ball")
        })
        .collect()
}

pub fn envelope_checks(rao: &RaoGroup, env: &Envelope) -> EnvelopeChecks {
    EnvelopeChecks {
        convex: is_convex(rao, &env.octagons),
        contains_ball: contains_ball(rao, &env.octagons, env.n),
        removable: removable_octagons(rao, env),
        max_excess: envelope_excess(rao, env),
        bound: envelope_bound(rao),
    }
}

pub fn build_envelope(rao: &RaoGroup, n: f64, max_octagons: usize) -> Result<Envelope, PipelineError> {
    if n.is_nan() || n < 0.0 {
        return Err(PipelineError::Usage("envelope radius must be nonnegative".into()));
    }
    Ok(conv_envelope(rao, n, max_octagons)?)
}

/// Uniformly marked octagons of an envelope, one per sample index.
pub fn sample_markings(ctx: &Context, env: &Envelope, samples: u64, seed: u64) -> Vec<usize> {
    ctx.harness.map(samples, |i| uniform_index(&mut sample_stream(seed, i), env.len()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanningFit {
    pub side_type: usize,
    /// Radii with a positive complement, used in the fit.
    pub points: usize,
    pub slope: Option<f64>,
    pub r_squared: Option<f64>,
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpanningResult {
    pub rows: Vec<StatRow>,
    pub fits: Vec<SpanningFit>,
}

/// For each side type s and word-length radius R: the fraction of samples in
/// which some g with |g| ≤ R has g r_s g⁻¹ ∈ H.
pub fn spanning_test(
    ctx: &Context,
    env: &Envelope,
    ball: &Ball,
    samples: u64,
    seed: u64,
) -> Result<SpanningResult, PipelineError> {
    let layers = word_length_layers(ball);
    let table: Vec<Vec<[bool; 8]>> = ctx
        .harness
        .map(env.len() as u64, |o| layers.iter().map(|b| env.spanning_types(o as usize, b)).collect());
    let marks = sample_markings(ctx, env, samples, seed);
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for s in 0..8 {
        let fractions: Vec<f64> = (0..layers.len())
            .map(|r| marks.iter().filter(|&&o| table[o][r][s]).count() as f64 / samples as f64)
            .collect();
        for (r, &f) in fractions.iter().enumerate() {
            rows.push(StatRow {
                key: format!("r{s}"),
                radius: r,
                fraction: f,
                stderr: proportion_stderr(f, samples as usize),
                n_samples: samples as usize,
            });
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = fractions
            .iter()
            .enumerate()
            .filter(|(_, &f)| f < 1.0)
            .map(|(r, &f)| (r as f64, (1.0 - f).ln()))
            .unzip();
        let fit: Option<LinearFit> = linear_fit(&xs, &ys);
        fits.push(SpanningFit {
            side_type: s,
            points: xs.len(),
            slope: fit.map(|f| f.slope),
            r_squared: fit.map(|f| f.r_squared),
            monotone: fractions.windows(2).all(|w| w[0] <= w[1]),
        });
    }
    Ok(SpanningResult { rows, fits })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FaithfulResult {
    /// One row per ball element: the fraction of samples with x ∉ H.
    pub rows: Vec<StatRow>,
    /// Ball elements that no sample excluded.
    pub kernel_witness: Vec<usize>,
}

pub fn faithful_test(
    ctx: &Context,
    env: &Envelope,
    ball: &Ball,
    samples: u64,
    seed: u64,
) -> Result<FaithfulResult, PipelineError> {
    let fps: Vec<Fingerprint> = ctx.harness.map(env.len() as u64, |o| env.fingerprint(o as usize, ball));
    let marks = sample_markings(ctx, env, samples, seed);
    let mut excluded = vec![0u64; ball.len()];
    for &o in &marks {
        for (i, e) in excluded.iter_mut().enumerate() {
            if !fps[o].contains(i) {
                *e += 1;
            }
        }
    }
    let rows = (0..ball.len())
        .map(|i| {
            let f = excluded[i] as f64 / samples as f64;
            StatRow {
                key: word_key(ball.word(i)),
                radius: ball.word(i).len(),
                fraction: f,
                stderr: proportion_stderr(f, samples as usize),
                n_samples: samples as usize,
            }
        })
        .collect();
    let kernel_witness = (0..ball.len()).filter(|&i| excluded[i] == 0).collect();
    Ok(FaithfulResult { rows, kernel_witness })
}

/// Exact kernel on a ball: elements contained in the conjugate of every marking.
pub fn exact_kernel(env: &Envelope, ball: &Ball) -> Vec<usize> {
    let fps: Vec<Fingerprint> = (0..env.len()).map(|o| env.fingerprint(o, ball)).collect();
    (0..ball.len()).filter(|&i| fps.iter().all(|f| f.contains(i))).collect()
}

/// `r0.r3.r5`-style label of a word in the octagon reflections.
pub fn word_key(w: &[Letter]) -> String {
    if w.is_empty() {
        return "id".into();
    }
    w.iter().map(|l| format!("r{l}")).collect::<Vec<_>>().join(".")
}
