//! Symbolic ShortLex normal forms of the (4,4,4) Coxeter group.

use std::collections::{BTreeSet, VecDeque};

/// Words braid-equivalent to `w` (all m_ij = 4: `ijij ↔ jiji`).
fn braid_class(w: &[u8]) -> BTreeSet<Vec<u8>> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(w.to_vec());
    queue.push_back(w.to_vec());
    while let Some(v) = queue.pop_front() {
        for p in 0..v.len().saturating_sub(3) {
            let (a, b) = (v[p], v[p + 1]);
            if a != b && v[p + 2] == a && v[p + 3] == b {
                let mut u = v.clone();
                u[p] = b;
                u[p + 1] = a;
                u[p + 2] = b;
                u[p + 3] = a;
                if seen.insert(u.clone()) {
                    queue.push_back(u);
                }
            }
        }
    }
    seen
}

/// ShortLex normal forms by length, using the Tits solution of the word
/// problem: a word is reduced iff no braid-equivalent word has a square `ss`.
pub fn shortlex_normal_forms(max_len: usize) -> Vec<Vec<Vec<u8>>> {
    let mut layers = vec![vec![Vec::new()]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in layers.last().unwrap() {
            for s in 0..3u8 {
                let mut v = w.clone();
                v.push(s);
                let class = braid_class(&v);
                let reduced = class.iter().all(|u| u.windows(2).all(|p| p[0] != p[1]));
                if reduced && class.iter().next() == Some(&v) {
                    next.push(v);
                }
            }
        }
        next.sort();
        layers.push(next);
    }
    layers
}
