//! Recover the glued word from an angle sequence.
//!
//! Every P̂₂ block shows one consecutive pair of π/4 vertices, so the number of
//! pairs counts the 2s, and the total length is affine in the two symbol
//! counts. Consecutive blocks are mirror images, so the pair of a P̂₂ lies on
//! the same side as the previous one exactly when an odd number of octagons
//! separates them; the π/2 run between two such pairs is affine in that
//! number. All constants are measured on short words rather than assumed.
//!
//! Decoding walks the word left to right. A window's boundary consists of a
//! component read forwards and one read backwards, so every prefix of the word
//! must produce a prefix of one and a suffix of the other. A closed polygon
//! contains both components of every prefix window as cyclic factors.

use alloc::vec;
use alloc::vec::Vec;

use super::angles::{angle_sequence, AngleSequence};
use super::blocks::{glue_blocks, BlockSet, Ends};
use super::complex::ComplexError;

/// Measured affine laws. Gaps count π/2 vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Calibration {
    /// Same-side gap between the pairs of 2·1^k·2 is `gap_base + gap_step·k`
    /// for odd k.
    pub gap_base: usize,
    pub gap_step: usize,
    /// Window entries: constant, per block 1, per block 2.
    pub window_len: [usize; 3],
    /// Closed polygon entries: constant, per block 1, per block 2.
    pub closed_len: [usize; 3],
}

fn quarter_pairs(e: &[u8]) -> Vec<usize> {
    (0..e.len().saturating_sub(1)).filter(|&i| e[i] == 4 && e[i + 1] == 4).collect()
}

fn fit(l1: usize, l11: usize, l2: usize) -> Option<[usize; 3]> {
    let per1 = l11.checked_sub(l1)?;
    let c = l1.checked_sub(per1)?;
    Some([c, per1, l2.checked_sub(c)?])
}

fn affine(law: &[usize; 3], w: &[u8]) -> usize {
    let ones = w.iter().filter(|&&a| a == 1).count();
    law[0] + law[1] * ones + law[2] * (w.len() - ones)
}

/// Recover the symbol counts `(ones, twos)` from a length and a pair count.
fn counts(law: &[usize; 3], len: usize, twos: usize) -> Option<(usize, usize)> {
    let rest = len.checked_sub(law[0] + law[2] * twos)?;
    if law[1] == 0 || rest % law[1] != 0 {
        return None;
    }
    Some((rest / law[1], twos))
}

impl Calibration {
    /// Fit the length laws on the shortest words and the gap law on 2·1·2 and
    /// 2·1·1·1·2, then check every law on all words of length at most 4 and
    /// the gap law on 2·1^k·2 for k ≤ 5.
    pub fn measure(blocks: &BlockSet) -> Result<Self, ComplexError> {
        let seq = |w: &[u8], e: Ends| angle_sequence(&glue_blocks(blocks, w, e)?);
        let len = |w: &[u8], e: Ends| seq(w, e).map(|s| s.entries().count());
        let bad = ComplexError::Constraint;
        let window_len = fit(len(&[1], Ends::Cut)?, len(&[1, 1], Ends::Cut)?, len(&[2], Ends::Cut)?)
            .ok_or(bad("window length is not affine"))?;
        let closed_len =
            fit(len(&[1], Ends::Closed)?, len(&[1, 1], Ends::Closed)?, len(&[2], Ends::Closed)?)
                .ok_or(bad("closed length is not affine"))?;
        let same_side_gap = |k: usize| -> Result<Option<usize>, ComplexError> {
            let mut w = vec![2];
            w.extend(core::iter::repeat_n(1, k));
            w.push(2);
            let s = seq(&w, Ends::Cut)?;
            Ok(s.components.iter().find_map(|c| match quarter_pairs(&c.entries)[..] {
                [a, b] => Some(b - a - 2),
                _ => None,
            }))
        };
        let g1 = same_side_gap(1)?.ok_or(bad("pairs of 2·1·2 are on different sides"))?;
        let g3 = same_side_gap(3)?.ok_or(bad("pairs of 2·1·1·1·2 are on different sides"))?;
        let gap_step = (g3.checked_sub(g1).ok_or(bad("gap does not grow with octagons"))?) / 2;
        let gap_base = g1.checked_sub(gap_step).ok_or(bad("negative gap base"))?;
        let cal = Calibration { gap_base, gap_step, window_len, closed_len };
        for k in 0..=5 {
            let expect = (k % 2 == 1).then(|| gap_base + gap_step * k);
            if same_side_gap(k)? != expect {
                return Err(bad("gap law fails"));
            }
        }
        for n in 1..=4 {
            for w in all_words(n) {
                let win = seq(&w, Ends::Cut)?;
                let pairs: usize =
                    win.components.iter().map(|c| quarter_pairs(&c.entries).len()).sum();
                let twos = w.iter().filter(|&&a| a == 2).count();
                if win.entries().count() != affine(&window_len, &w) || pairs != twos {
                    return Err(bad("window law fails"));
                }
                if len(&w, Ends::Closed)? != affine(&closed_len, &w) {
                    return Err(bad("closed length law fails"));
                }
            }
        }
        Ok(cal)
    }
}

/// Every word over {1, 2} of the given length, in lexicographic order.
pub fn all_words(len: usize) -> Vec<Vec<u8>> {
    (0..1usize << len)
        .map(|bits| (0..len).map(|i| if bits >> (len - 1 - i) & 1 == 1 { 2 } else { 1 }).collect())
        .collect()
}

fn is_cyclic_factor(hay: &[u8], needle: &[u8]) -> bool {
    if needle.len() > hay.len() {
        return false;
    }
    (0..hay.len()).any(|s| needle.iter().enumerate().all(|(i, &x)| hay[(s + i) % hay.len()] == x))
}

/// Whether a prefix window is compatible with the target sequence.
fn prefix_fits(target: &AngleSequence, prefix: &AngleSequence) -> bool {
    let p = &prefix.components;
    let t = &target.components;
    if p.len() != 2 {
        return false;
    }
    if t.len() == 1 {
        return p.iter().all(|c| is_cyclic_factor(&t[0].entries, &c.entries));
    }
    let fits = |x: &[u8], y: &[u8], a: &[u8], b: &[u8]| a.starts_with(x) && b.ends_with(y);
    let (x, y) = (&p[0].entries, &p[1].entries);
    let (a, b) = (&t[0].entries, &t[1].entries);
    fits(x, y, a, b) || fits(x, y, b, a) || fits(y, x, a, b) || fits(y, x, b, a)
}

/// Reconstruct a word from a window sequence or a closed sequence.
///
/// The result `w` satisfies `angle_sequence(glue_blocks(w)) = s`. Windows are
/// recovered exactly. Straight vertices carry no entry, so a closed sequence
/// forgets side lengths and may come from several words; the first one in
/// lexicographic order is returned.
pub fn reconstruct_word(
    blocks: &BlockSet,
    cal: &Calibration,
    s: &AngleSequence,
) -> Result<Vec<u8>, ComplexError> {
    let closed = match s.components.as_slice() {
        [c] if c.cyclic => true,
        [a, b] if !a.cyclic && !b.cyclic => false,
        _ => return Err(ComplexError::Unrecognized),
    };
    let twos = s.components.iter().map(|c| {
        let mut e = c.entries.clone();
        if c.cyclic {
            if let Some(&f) = e.first() {
                e.push(f);
            }
        }
        quarter_pairs(&e).len()
    });
    let twos: usize = twos.sum();
    let (law, ends) = if closed { (&cal.closed_len, Ends::Closed) } else { (&cal.window_len, Ends::Cut) };
    let (ones, twos) = counts(law, s.entries().count(), twos).ok_or(ComplexError::Unrecognized)?;
    if ones + twos == 0 {
        return Err(ComplexError::Unrecognized);
    }
    let mut word = Vec::with_capacity(ones + twos);
    search(blocks, s, ends, [ones, twos], &mut word)?.ok_or(ComplexError::Unrecognized)
}

fn search(
    blocks: &BlockSet,
    target: &AngleSequence,
    ends: Ends,
    left: [usize; 2],
    word: &mut Vec<u8>,
) -> Result<Option<Vec<u8>>, ComplexError> {
    if left == [0, 0] {
        let s = angle_sequence(&glue_blocks(blocks, word, ends)?)?;
        return Ok((s == *target).then(|| word.clone()));
    }
    for sym in [1u8, 2] {
        let i = usize::from(sym - 1);
        if left[i] == 0 {
            continue;
        }
        word.push(sym);
        let prefix = angle_sequence(&glue_blocks(blocks, word, Ends::Cut)?)?;
        if prefix_fits(target, &prefix) {
            let mut rest = left;
            rest[i] -= 1;
            if let Some(w) = search(blocks, target, ends, rest, word)? {
                return Ok(Some(w));
            }
        }
        word.pop();
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::TriangleGroup;

    fn setup() -> (BlockSet, Calibration) {
        let g = TriangleGroup::new();
        let b = BlockSet::new(&g).unwrap();
        let c = Calibration::measure(&b).unwrap();
        (b, c)
    }

    #[test]
    fn calibration_values() {
        let (_, c) = setup();
        assert_eq!((c.gap_base, c.gap_step), (5, 2));
        assert_eq!(c.window_len, [0, 4, 13]);
        assert_eq!(c.closed_len, [4, 4, 13]);
    }

    #[test]
    fn single_block_roundtrip() {
        let (b, c) = setup();
        let s = angle_sequence(&glue_blocks(&b, &[2], Ends::Closed).unwrap()).unwrap();
        assert_eq!(reconstruct_word(&b, &c, &s).unwrap(), vec![2]);
    }

    #[test]
    fn bogus_sequence_rejected() {
        let (b, c) = setup();
        let s = AngleSequence {
            components: vec![super::super::angles::Component { cyclic: true, entries: vec![2, 4, 2] }],
        };
        assert_eq!(reconstruct_word(&b, &c, &s), Err(ComplexError::Unrecognized));
    }
}
