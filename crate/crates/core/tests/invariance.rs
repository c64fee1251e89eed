//! Exact conjugation invariance of the fingerprint law, by enumerating every
//! window and marked tile with rational weights.

use std::collections::BTreeMap;

use irs_core::coxeter::{enumerate_ball, Ball, BallCap, TriangleGroup};
use irs_core::field::Rational;
use irs_core::irs::*;
use irs_core::polygon::BlockSet;
use irs_core::shift::{reweight, ShiftMeasure};

fn setup(len: usize) -> (BlockSet, Ball, usize) {
    let g = TriangleGroup::new();
    let b = BlockSet::new(&g).unwrap();
    let ball = enumerate_ball(&g, BallCap::WordLength(len), 100_000).unwrap();
    let radius = required_radius(&b, len + 2);
    (b, ball, radius)
}

fn law(b: &BlockSet, base: &str, w: [u64; 2], radius: usize, ball: &Ball, g: &[u8]) -> BTreeMap<Fingerprint, Rational> {
    let m = reweight(base.parse::<ShiftMeasure>().unwrap(), w[0], w[1]).unwrap();
    exact_fingerprint_law(b, &m, radius, ball, g).unwrap()
}

fn total(l: &BTreeMap<Fingerprint, Rational>) -> Rational {
    l.values().sum()
}

#[test]
fn reweighted_law_is_conjugation_invariant() {
    let (b, ball, radius) = setup(4);
    for base in ["bernoulli:1/2", "bernoulli:1/3", "markov:1/4,3/4;2/3,1/3"] {
        let h = law(&b, base, [8, 28], radius, &ball, &[]);
        assert_eq!(total(&h), Rational::from_integer(1.into()));
        for k in 0..3u8 {
            assert_eq!(law(&b, base, [8, 28], radius, &ball, &[k]), h, "{base} conjugated by σ{k}");
        }
    }
}

/// Law of the symbol of the block holding the identity tile of σ_k H σ_k (or
/// of H when `k` is None). H determines this block: it is the region of the
/// base tile cut out by the walls of H.
fn centre_symbol_law(b: &BlockSet, base: &str, w: [u64; 2], k: Option<u8>) -> [Rational; 2] {
    let m = reweight(base.parse::<ShiftMeasure>().unwrap(), w[0], w[1]).unwrap();
    let mut out = [Rational::from_integer(0.into()), Rational::from_integer(0.into())];
    for window in [[1, 1, 1], [1, 1, 2], [1, 2, 1], [1, 2, 2], [2, 1, 1], [2, 1, 2], [2, 2, 1], [2, 2, 2]] {
        let p = m.window_probability(&window);
        let n = b.for_symbol(window[1]).tile_count();
        for t in 0..n {
            let h = SubgroupHandle::new(b, window.to_vec(), t).unwrap();
            let tile = match k {
                None => h.marked,
                Some(k) => h.complex.step(h.marked, k).unwrap(),
            };
            let sym = window[h.complex.block_of(tile)];
            out[usize::from(sym - 1)] += &p / Rational::from_integer((n as i64).into());
        }
    }
    out
}

#[test]
fn unweighted_law_is_not_invariant() {
    let b = BlockSet::new(&TriangleGroup::new()).unwrap();
    let h = centre_symbol_law(&b, "bernoulli:1/2", [1, 1], None);
    assert_eq!(h[0], Rational::new(1.into(), 2.into()));
    let across = centre_symbol_law(&b, "bernoulli:1/2", [1, 1], Some(2));
    assert_ne!(across, h);
    for base in ["bernoulli:1/2", "markov:1/4,3/4;2/3,1/3"] {
        let h = centre_symbol_law(&b, base, [8, 28], None);
        for k in 0..3u8 {
            assert_eq!(centre_symbol_law(&b, base, [8, 28], Some(k)), h, "{base} σ{k}");
        }
    }
}

#[test]
fn periodic_law_is_uniform_on_the_conjugates() {
    let (b, ball, radius) = setup(6);
    let h = law(&b, "periodic:12", [8, 28], radius, &ball, &[]);
    // Pushforward of the uniform tile of one period, built directly.
    let mut direct: BTreeMap<Fingerprint, Rational> = BTreeMap::new();
    for phase in [1u8, 2] {
        let window: Vec<u8> = (0..2 * radius + 1).map(|i| if (i + radius) % 2 == 0 { phase } else { 3 - phase }).collect();
        for t in 0..b.for_symbol(phase).tile_count() {
            let f = fingerprint(&SubgroupHandle::new(&b, window.clone(), t).unwrap(), &ball).unwrap();
            *direct.entry(f).or_insert_with(|| Rational::from_integer(0.into())) += Rational::new(1.into(), 36.into());
        }
    }
    assert_eq!(h, direct);
    for k in 0..3u8 {
        assert_eq!(law(&b, "periodic:12", [8, 28], radius, &ball, &[k]), h);
    }
}
