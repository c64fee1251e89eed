//! Quick invariant suite across all modules, reported as JSON lines.

use std::io::Write;

use irs_core::coxeter::{enumerate_ball, BallCap};
use irs_core::envelope::RaoGroup;
use irs_core::field::{Mat3, Rational};
use irs_core::irs::exact_fingerprint_law;
use irs_core::polygon::{angle_sequence, glue_blocks, iso_check, reconstruct_word, Calibration, Ends};
use irs_core::shift::{shift_equivalent, ShiftMeasure};
use serde::Serialize;

use crate::error::PipelineError;
use crate::io::{format_angles, parse_angles};
use crate::pipeline::{build_envelope, envelope_checks, window_radius_for, Context};
use crate::stats::paired_permutation_test;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckLine {
    pub check: &'static str,
    pub ok: bool,
    pub detail: String,
}

type Check = fn(&Context) -> Result<String, String>;

const CHECKS: [(&str, Check); 10] = [
    ("coxeter_relations", coxeter_relations),
    ("ball_inverse_closed", ball_inverse_closed),
    ("block_geometry", block_geometry),
    ("calibration", calibration),
    ("window_roundtrip", window_roundtrip),
    ("angle_text_roundtrip", angle_text_roundtrip),
    ("reweighted_marginal", reweighted_marginal),
    ("exact_conjugation_invariance", exact_conjugation_invariance),
    ("envelope_n1", envelope_n1),
    ("permutation_test_null", permutation_test_null),
];

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn coxeter_relations(ctx: &Context) -> Result<String, String> {
    let g = ctx.group.generator_matrices();
    let id = Mat3::identity();
    for i in 0..3 {
        ensure(g[i] != id && g[i].mul(&g[i]) == id, format!("s{} is not an involution", i + 1))?;
        for j in 0..3 {
            if i == j {
                continue;
            }
            let p = g[i].mul(&g[j]);
            let mut q = p.clone();
            for k in 1..4 {
                ensure(q != id, format!("(s{}s{})^{k} = id", i + 1, j + 1))?;
                q = q.mul(&p);
            }
            ensure(q == id, format!("(s{}s{})^4 != id", i + 1, j + 1))?;
        }
    }
    Ok("s_i^2 = (s_i s_j)^4 = id, no shorter power".into())
}

fn ball_inverse_closed(ctx: &Context) -> Result<String, String> {
    let ball = enumerate_ball(&ctx.group, BallCap::WordLength(5), 10_000).map_err(|e| e.to_string())?;
    for i in 0..ball.len() {
        let inv = ctx.group.invert_matrix(ball.element(i));
        ensure(ball.contains(&inv), format!("inverse of element {i} missing"))?;
        ensure(ball.element(i) == &ctx.group.word_matrix(ball.word(i)), format!("word {i} does not match"))?;
    }
    Ok(format!("{} elements of length <= 5", ball.len()))
}

fn block_geometry(ctx: &Context) -> Result<String, String> {
    let b = &ctx.blocks;
    let angles = |c| angle_sequence(c).map_err(|e| e.to_string());
    let o = angles(&b.octagon.complex)?;
    ensure(b.octagon.tile_count() == 8 && o.count(2) == 8 && o.count(4) == 0, "octagon")?;
    let q = angles(&b.half_octagon.complex)?;
    ensure(b.half_octagon.tile_count() == 4 && q.count(4) == 2, "half-octagon")?;
    let p = angles(&b.phat2.complex)?;
    ensure(b.phat2.tile_count() == 28 && p.count(4) == 2, "P2")?;
    Ok("O: 8 tiles, Q: 4 tiles, P2: 28 tiles".into())
}

fn calibration(ctx: &Context) -> Result<String, String> {
    let cal = Calibration::measure(&ctx.blocks).map_err(|e| e.to_string())?;
    ensure(cal.window_len == [0, 4, 13] && cal.closed_len == [4, 4, 13], "length laws")?;
    ensure((cal.gap_base, cal.gap_step) == (5, 2), "gap law")?;
    Ok("window 4a+13b, closed 4+4a+13b, gap 5+2k".into())
}

fn window_roundtrip(ctx: &Context) -> Result<String, String> {
    let cal = Calibration::measure(&ctx.blocks).map_err(|e| e.to_string())?;
    let mut n = 0;
    for len in 1..=3 {
        for bits in 0..1u32 << len {
            let w: Vec<u8> = (0..len).map(|i| if bits >> i & 1 == 1 { 2 } else { 1 }).collect();
            let c = glue_blocks(&ctx.blocks, &w, Ends::Cut).map_err(|e| e.to_string())?;
            let s = angle_sequence(&c).map_err(|e| e.to_string())?;
            let r = reconstruct_word(&ctx.blocks, &cal, &s).map_err(|e| e.to_string())?;
            ensure(shift_equivalent(&r, &w), format!("{w:?} reconstructed as {r:?}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} windows"))
}

fn angle_text_roundtrip(ctx: &Context) -> Result<String, String> {
    let c = glue_blocks(&ctx.blocks, &[1, 2, 1], Ends::Closed).map_err(|e| e.to_string())?;
    let s = angle_sequence(&c).map_err(|e| e.to_string())?;
    let back = parse_angles(&format_angles(&s)).map_err(|e| e.to_string())?;
    ensure(back == s && iso_check(&s, &back), "text form changes the sequence")?;
    Ok(format_angles(&s))
}

fn reweighted_marginal(ctx: &Context) -> Result<String, String> {
    let m = ctx.reweighted(&"bernoulli:1/2".parse().expect("valid measure")).map_err(|e| e.to_string())?;
    let expected = Rational::new(2.into(), 9.into());
    ensure(m.marginal_one() == expected, format!("P(a0 = 1) = {}", m.marginal_one()))?;
    Ok("P(a0 = 1) = 2/9".into())
}

fn exact_conjugation_invariance(ctx: &Context) -> Result<String, String> {
    let ball = enumerate_ball(&ctx.group, BallCap::WordLength(2), 1000).map_err(|e| e.to_string())?;
    let m = ctx.reweighted(&ShiftMeasure::periodic(vec![1, 2]).expect("word")).map_err(|e| e.to_string())?;
    let radius = window_radius_for(ctx, &ball);
    let law = |g: &[u8]| exact_fingerprint_law(&ctx.blocks, &m, radius, &ball, g).map_err(|e| e.to_string());
    let base = law(&[])?;
    for k in 0..3u8 {
        ensure(law(&[k])? == base, format!("law moves under s{}", k + 1))?;
    }
    Ok(format!("periodic (1,2): {} fingerprints", base.len()))
}

fn envelope_n1(ctx: &Context) -> Result<String, String> {
    let rao = RaoGroup::new(&ctx.group);
    let env = build_envelope(&rao, 1.0, 10_000).map_err(|e| e.to_string())?;
    let c = envelope_checks(&rao, &env);
    ensure(c.convex && c.contains_ball && c.removable.is_empty(), "envelope of B(o, 1)")?;
    ensure(c.max_excess <= c.bound + 1e-6, format!("excess {} above {}", c.max_excess, c.bound))?;
    Ok(format!("{} octagons", env.len()))
}

fn permutation_test_null(_: &Context) -> Result<String, String> {
    let x: Vec<u8> = (0..200).map(|i| (i % 5) as u8).collect();
    let (tv, p) = paired_permutation_test(&x, &x, 99, 0);
    ensure(tv == 0.0 && p == 1.0, "identical samples rejected")?;
    Ok("p = 1 on identical samples".into())
}

/// Runs every check, writing one JSON line each; stops at the first failure.
pub fn run(ctx: &Context, out: &mut impl Write) -> Result<usize, PipelineError> {
    for (name, check) in CHECKS.iter() {
        let line = match check(ctx) {
            Ok(detail) => CheckLine { check: name, ok: true, detail },
            Err(detail) => CheckLine { check: name, ok: false, detail },
        };
        writeln!(out, "{}", serde_json::to_string(&line).expect("plain struct"))?;
        if !line.ok {
            return Err(PipelineError::Verification(format!("{name}: {}", line.detail)));
        }
    }
    Ok(CHECKS.len())
}
