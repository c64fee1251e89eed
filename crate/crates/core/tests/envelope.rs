//! Octagon group, convex envelopes and the IRSs μ_n.

use std::collections::BTreeMap;

use irs_core::coxeter::{enumerate_ball, enumerate_word_ball, Ball, BallCap, TriangleGroup};
use irs_core::envelope::*;
use irs_core::field::Mat3;
use irs_core::irs::Fingerprint;
use irs_core::polygon::blocks::OCTAGON_WORDS;

fn rao() -> RaoGroup {
    RaoGroup::new(&TriangleGroup::new())
}

fn rao_ball(r: &RaoGroup, len: usize) -> Ball {
    enumerate_word_ball(&r.group, r.generators.clone(), len, 1_000_000).unwrap()
}

#[test]
fn octagon_group_relations() {
    let r = rao();
    for j in 0..8 {
        assert!(r.generators[j].mul(&r.generators[j]).is_identity());
        assert_eq!(r.adjacent[j].iter().filter(|&&a| a).count(), 2);
        for k in 0..8 {
            if j == k {
                continue;
            }
            let p = r.generators[j].mul(&r.generators[k]);
            let mut q = p.clone();
            let mut order = None;
            for m in 1..=12 {
                if q.is_identity() {
                    order = Some(m);
                    break;
                }
                q = q.mul(&p);
            }
            assert_eq!(order, r.adjacent[j][k].then_some(2), "r{j} r{k}");
        }
    }
}

#[test]
fn octagon_translates_tile_the_plane() {
    // Every triangle tile near the base lies in exactly one translate g·O.
    let r = rao();
    let g = &r.group;
    let tiles: Vec<Mat3> = OCTAGON_WORDS.iter().map(|w| g.word_matrix(w)).collect();
    let octagons = rao_ball(&r, 3);
    let mut owner: BTreeMap<String, usize> = BTreeMap::new();
    for i in 0..octagons.len() {
        for t in &tiles {
            let key = format!("{:?}", octagons.element(i).mul(t));
            assert!(owner.insert(key, i).is_none(), "translates overlap");
        }
    }
    let triangles = enumerate_ball(g, BallCap::WordLength(5), 100_000).unwrap();
    for i in 0..triangles.len() {
        assert!(owner.contains_key(&format!("{:?}", triangles.element(i))), "tile {:?} uncovered", triangles.word(i));
    }
}

#[test]
fn envelope_of_a_point_is_the_base_octagon() {
    let r = rao();
    let e = conv_envelope(&r, 0.0, 100).unwrap();
    assert_eq!(e.len(), 1);
    assert_eq!(e.boundary().len(), 8);
}

#[test]
fn envelopes_are_convex_minimal_and_bounded() {
    let r = rao();
    let bound = envelope_bound(&r);
    let mut sizes = Vec::new();
    for n in 0..=3 {
        let e = conv_envelope(&r, n as f64, 10_000).unwrap();
        assert!(is_convex(&r, &e.octagons), "n = {n}");
        assert!(contains_ball(&r, &e.octagons, n as f64), "n = {n}");
        if n <= 2 {
            assert!(removable_octagons(&r, &e).is_empty(), "n = {n}");
        }
        assert!(envelope_excess(&r, &e) <= bound + 1e-6, "n = {n}");
        sizes.push(e.len());
    }
    assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn non_convex_and_non_minimal_sets_are_detected() {
    let r = rao();
    let e = conv_envelope(&r, 2.0, 10_000).unwrap();
    // Two octagons across a corner, without the ones between them.
    let corner = vec![Mat3::identity(), r.generators[0].mul(&r.generators[1])];
    assert!(!is_convex(&r, &corner));
    // Adding one outside neighbour breaks convexity; dropping O loses o.
    let (i, k) = e.boundary()[0];
    let mut bigger = e.octagons.clone();
    bigger.push(e.octagons[i].mul(&r.generators[k]));
    assert!(!is_convex(&r, &bigger));
    assert!(!contains_ball(&r, &e.octagons[1..], 2.0));
}

#[test]
fn envelope_is_idempotent() {
    let r = rao();
    for n in 1..=3 {
        let e = conv_envelope(&r, n as f64, 10_000).unwrap();
        let centres: Vec<_> = e.octagons.iter().map(|g| g.apply(&r.centre)).collect();
        let again = conv_of_points(&r, &centres, 10_000).unwrap();
        let mut a: Vec<String> = e.octagons.iter().map(|m| format!("{m:?}")).collect();
        let mut b: Vec<String> = again.octagons.iter().map(|m| format!("{m:?}")).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b, "n = {n}");
    }
}

fn multiset(fps: impl Iterator<Item = Fingerprint>) -> BTreeMap<Fingerprint, usize> {
    let mut m = BTreeMap::new();
    for f in fps {
        *m.entry(f).or_insert(0) += 1;
    }
    m
}

#[test]
fn mu_n_is_exactly_invariant() {
    let r = rao();
    let ball = rao_ball(&r, 3);
    for n in 0..=1 {
        let e = conv_envelope(&r, n as f64, 10_000).unwrap();
        let law = multiset((0..e.len()).map(|t| e.fingerprint(t, &ball)));
        for k in 0..8 {
            let moved = multiset((0..e.len()).map(|t| e.fingerprint(e.sides[t][k].unwrap_or(t), &ball)));
            assert_eq!(moved, law, "n = {n}, r{k}");
        }
    }
    // n = 0: the only conjugate is Γ_O itself.
    let e = conv_envelope(&r, 0.0, 10).unwrap();
    assert_eq!(e.fingerprint(0, &ball).count(), ball.len());
}

fn kernel(e: &Envelope, ball: &Ball) -> Vec<usize> {
    let fps: Vec<Fingerprint> = (0..e.len()).map(|t| e.fingerprint(t, ball)).collect();
    (0..ball.len()).filter(|&i| fps.iter().all(|f| f.contains(i))).collect()
}

#[test]
fn kernel_becomes_trivial_at_n_3() {
    let r = rao();
    let ball = rao_ball(&r, 4);
    // A side type that is a wall of every octagon puts its reflection in every
    // conjugate.
    for (n, always_wall) in [(1, vec![2, 3, 4, 5, 6]), (2, vec![4])] {
        let e = conv_envelope(&r, n as f64, 10_000).unwrap();
        let walls: Vec<usize> = (0..8).filter(|&s| e.sides.iter().all(|o| o[s].is_none())).collect();
        assert_eq!(walls, always_wall, "n = {n}");
        let k = kernel(&e, &ball);
        for s in walls {
            assert!(k.contains(&ball.index_of(&r.generators[s]).unwrap()));
        }
    }
    assert_eq!(kernel(&conv_envelope(&r, 2.0, 10_000).unwrap(), &ball).len(), 17);
    assert_eq!(kernel(&conv_envelope(&r, 3.0, 10_000).unwrap(), &ball), vec![0]);
}

#[test]
fn spanning_at_the_identity_counts_adjacent_walls() {
    let r = rao();
    let identity = rao_ball(&r, 0);
    let e = conv_envelope(&r, 1.0, 10_000).unwrap();
    for t in 0..e.len() {
        let hits = e.spanning_types(t, &identity);
        for s in 0..8 {
            assert_eq!(hits[s], e.sides[t][s].is_none());
        }
    }
    // Spanning is monotone in the ball.
    let (b1, b2) = (rao_ball(&r, 1), rao_ball(&r, 2));
    for t in 0..e.len() {
        let (h1, h2) = (e.spanning_types(t, &b1), e.spanning_types(t, &b2));
        assert!((0..8).all(|s| !h1[s] || h2[s]));
    }
}

#[test]
fn interior_markings_exclude_the_whole_ball() {
    let r = rao();
    let ball = rao_ball(&r, 1);
    assert!((0..14).all(|t| !conv_envelope(&r, 2.0, 10_000).unwrap().ball_is_interior(t, &ball)));
    let e = conv_envelope(&r, 3.0, 10_000).unwrap();
    let mut interior = 0;
    for t in 0..e.len() {
        if e.ball_is_interior(t, &ball) {
            interior += 1;
            assert_eq!(e.fingerprint(t, &ball).members(), vec![0]);
        }
    }
    assert!(interior > 0);
}

#[test]
fn deep_points() {
    let r = rao();
    let c = deep_point_constant(&r);
    let e = conv_envelope(&r, 2.0, 10_000).unwrap();
    assert!(deep_point_check(&r, &e, 1.0, c));
    assert!(!deep_point_check(&r, &e, 2.0 + c + 1.0, c));
}
