//! Exhaustive checks of gluing, angle sequences, reconstruction and symmetry.

use std::collections::HashMap;

use irs_core::coxeter::TriangleGroup;
use irs_core::polygon::angles::canonical_component;
use irs_core::polygon::reconstruct::all_words;
use irs_core::polygon::symmetry::{block_shift_isometry, isometries_between, self_isometries};
use irs_core::polygon::*;
use irs_core::shift::shift_equivalent;
use proptest::prelude::*;

fn setup() -> (BlockSet, Calibration) {
    let g = TriangleGroup::new();
    let b = BlockSet::new(&g).unwrap();
    let c = Calibration::measure(&b).unwrap();
    (b, c)
}

fn seq(b: &BlockSet, w: &[u8], ends: Ends) -> AngleSequence {
    angle_sequence(&glue_blocks(b, w, ends).unwrap()).unwrap()
}

#[test]
fn gluing_embeds_for_all_words_up_to_length_6() {
    let (b, _) = setup();
    for len in 1..=6 {
        for w in all_words(len) {
            for ends in [Ends::Closed, Ends::Cut] {
                let c = glue_blocks(&b, &w, ends).unwrap();
                let expected: usize = w.iter().map(|&a| if a == 1 { 8 } else { 28 }).sum();
                assert_eq!(c.len(), expected, "{w:?}");
                c.verify_embedding().unwrap_or_else(|e| panic!("{w:?}: {e}"));
            }
        }
    }
}

#[test]
fn every_window_with_a_two_has_a_quarter_pair() {
    let (b, _) = setup();
    for len in 1..=5 {
        for w in all_words(len) {
            let s = seq(&b, &w, Ends::Cut);
            assert_eq!(s.has_quarter_pair(), w.contains(&2), "{w:?}");
            assert!(s.entries().all(|m| m == 2 || m == 4));
        }
    }
}

#[test]
fn reconstruction_roundtrip_length_4() {
    let (b, c) = setup();
    for w in all_words(4) {
        let window = reconstruct_word(&b, &c, &seq(&b, &w, Ends::Cut)).unwrap();
        assert_eq!(window, w);
        let s = seq(&b, &w, Ends::Closed);
        let closed = reconstruct_word(&b, &c, &s).unwrap_or_else(|e| panic!("{w:?}: {e}"));
        assert_eq!(seq(&b, &closed, Ends::Closed), s, "{w:?}");
    }
}

#[test]
fn window_sequences_separate_words_of_length_6() {
    let (b, _) = setup();
    let mut seen: HashMap<AngleSequence, Vec<u8>> = HashMap::new();
    for w in all_words(6) {
        if let Some(prev) = seen.insert(seq(&b, &w, Ends::Cut), w.clone()) {
            panic!("{prev:?} and {w:?} share an angle sequence");
        }
    }
}

#[test]
fn closed_polygons_do_not_determine_the_word() {
    let (b, c) = setup();
    let (u, v) = ([1, 1, 1, 2, 2, 1], [1, 1, 2, 1, 1, 2]);
    assert!(!shift_equivalent(&u, &v));
    assert_eq!(seq(&b, &u, Ends::Closed), seq(&b, &v, Ends::Closed));
    let (cu, cv) = (glue_blocks(&b, &u, Ends::Closed).unwrap(), glue_blocks(&b, &v, Ends::Closed).unwrap());
    assert!(isometries_between(&cu, &cv).is_empty());
    let r = reconstruct_word(&b, &c, &seq(&b, &u, Ends::Closed)).unwrap();
    assert_eq!(seq(&b, &r, Ends::Closed), seq(&b, &u, Ends::Closed));
}

#[test]
fn random_length_10_roundtrip() {
    let (b, c) = setup();
    let mut x: u64 = 0x9e37_79b9_7f4a_7c15;
    for _ in 0..20 {
        let w: Vec<u8> = (0..10)
            .map(|_| {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                1 + (x & 1) as u8
            })
            .collect();
        assert_eq!(reconstruct_word(&b, &c, &seq(&b, &w, Ends::Cut)).unwrap(), w);
        let s = seq(&b, &w, Ends::Closed);
        let closed = reconstruct_word(&b, &c, &s).unwrap();
        assert_eq!(seq(&b, &closed, Ends::Closed), s, "{w:?}");
    }
}

#[test]
fn window_symmetry_requires_a_constant_word() {
    let (b, _) = setup();
    for len in 1..=4 {
        for w in all_words(len) {
            let c = glue_blocks(&b, &w, Ends::Cut).unwrap();
            if self_isometries(&c).len() > 1 {
                assert!(w.iter().all(|&a| a == w[0]), "{w:?}");
            }
        }
    }
}

#[test]
fn block_shifts_exist_exactly_for_periods() {
    let (b, _) = setup();
    for len in 2..=5 {
        for w in all_words(len) {
            let c = glue_blocks(&b, &w, Ends::Cut).unwrap();
            for p in 1..len {
                let periodic = (0..len - p).all(|i| w[i] == w[i + p]);
                assert_eq!(block_shift_isometry(&c, len, p).is_some(), periodic, "{w:?} p={p}");
            }
        }
    }
}

fn component() -> impl Strategy<Value = Component> {
    (any::<bool>(), prop::collection::vec(prop_oneof![Just(2u8), Just(4u8)], 0..12))
        .prop_map(|(cyclic, entries)| Component { cyclic, entries })
}

proptest! {
    #[test]
    fn iso_check_ignores_rotation_and_mirror(c in component(), r in 0usize..12, flip: bool) {
        let mut d = c.clone();
        if d.cyclic && !d.entries.is_empty() {
            let k = r % d.entries.len();
            d.entries.rotate_left(k);
        }
        if flip {
            d.entries.reverse();
        }
        let s1 = AngleSequence { components: vec![c] };
        let s2 = AngleSequence { components: vec![d] };
        prop_assert!(iso_check(&s1, &s2));
        prop_assert!(iso_check(&s2, &s1));
    }

    #[test]
    fn iso_check_agrees_with_canonical_forms(a in component(), b in component()) {
        let s1 = AngleSequence { components: vec![a.clone()] };
        let s2 = AngleSequence { components: vec![b.clone()] };
        prop_assert_eq!(iso_check(&s1, &s2), canonical_component(&a) == canonical_component(&b));
    }
}
