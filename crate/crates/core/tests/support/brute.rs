//! Independent membership oracle: BFS over products of the wall reflections
//! of a subgroup handle's polygon.

use std::collections::{BTreeSet, HashSet, VecDeque};

use irs_core::coxeter::{Ball, TriangleGroup};
use irs_core::field::Mat3;
use irs_core::irs::FoldingDomain;

/// ⟨boundary-wall reflections⟩ ∩ ball, by BFS over products of wall
/// reflections. Reflecting h in a wall of P separating o from h·o lowers the
/// displacement of h, so every member of the ball is reached through products
/// no farther out than the ball itself.
pub fn brute_force_members(g: &TriangleGroup, dom: &FoldingDomain, ball: &Ball) -> BTreeSet<usize> {
    let max_cosh = (0..ball.len()).map(|i| g.cosh_distance(ball.element(i))).max_by(|a, b| a.cmp_value(b)).unwrap();
    let walls: Vec<&Mat3> = dom.walls.iter().filter(|w| !w.cut).map(|w| &w.reflection).collect();
    let mut seen: HashSet<Mat3> = HashSet::from([Mat3::identity()]);
    let mut queue = VecDeque::from([Mat3::identity()]);
    while let Some(m) = queue.pop_front() {
        for r in &walls {
            let n = r.mul(&m);
            if g.cosh_distance(&n).cmp_value(&max_cosh).is_gt() || seen.contains(&n) {
                continue;
            }
            seen.insert(n.clone());
            queue.push_back(n);
        }
    }
    (0..ball.len()).filter(|&i| seen.contains(ball.element(i))).collect()
}
