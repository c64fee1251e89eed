//! The (4,4,4) triangle group in its geometric representation.
//!
//! Generators act on the root space spanned by `e_1, e_2, e_3` and preserve the
//! Gram form. Group elements are compared by exact matrix equality.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::field::{GramForm, Mat3, QSqrt2, Rational, Vec3};

/// Generator letters are `0..rank` internally and `1..=rank` in serialized words.
pub type Letter = u8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoxeterError {
    /// Enumeration stopped at the cap; `partial` elements were found so far.
    ResourceCap { partial: usize, cap: usize },
    BadGenerator(usize),
}

impl fmt::Display for CoxeterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoxeterError::ResourceCap { partial, cap } => {
                write!(f, "ball enumeration exceeded cap of {cap} elements ({partial} found)")
            }
            CoxeterError::BadGenerator(i) => write!(f, "generator index {i} out of range"),
        }
    }
}

/// A group element, optionally remembering a word that produced it.
///
/// Equality is matrix equality; the witness word is ignored.
#[derive(Clone, Debug)]
pub struct Isometry {
    pub m: Mat3,
    pub word: Option<Vec<Letter>>,
}

impl PartialEq for Isometry {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
    }
}
impl Eq for Isometry {}

impl Isometry {
    pub fn identity() -> Self {
        Isometry { m: Mat3::identity(), word: Some(Vec::new()) }
    }

    pub fn from_matrix(m: Mat3) -> Self {
        Isometry { m, word: None }
    }

    pub fn compose(&self, other: &Isometry) -> Isometry {
        let word = match (&self.word, &other.word) {
            (Some(a), Some(b)) => Some(a.iter().chain(b.iter()).copied().collect()),
            _ => None,
        };
        Isometry { m: self.m.mul(&other.m), word }
    }

    pub fn is_identity(&self) -> bool {
        self.m.is_identity()
    }
}

/// Everything fixed about Γ_{T₄}: form, generators, basepoint.
#[derive(Clone, Debug)]
pub struct TriangleGroup {
    gram: GramForm,
    gram_inv: Mat3,
    generators: [Mat3; 3],
    basepoint: Vec3,
    base_norm: QSqrt2,
}

impl Default for TriangleGroup {
    fn default() -> Self {
        Self::new()
    }
}

impl TriangleGroup {
    pub fn new() -> Self {
        let gram = GramForm::triangle_444();
        let gram_inv = gram.matrix().inverse().expect("Gram matrix is nondegenerate");
        let generators = core::array::from_fn(|i| reflection_matrix(&gram, i));
        // Solution of B(o, e_i) = −1 for all i.
        let c = QSqrt2::from_ints(1, 1);
        let basepoint = Vec3([c.clone(), c.clone(), c]);
        let base_norm = gram.eval(&basepoint, &basepoint);
        TriangleGroup { gram, gram_inv, generators, basepoint, base_norm }
    }

    pub fn gram(&self) -> &GramForm {
        &self.gram
    }

    pub fn gram_inverse(&self) -> &Mat3 {
        &self.gram_inv
    }

    pub fn basepoint(&self) -> &Vec3 {
        &self.basepoint
    }

    /// `B(o, o)`, negative.
    pub fn basepoint_norm(&self) -> &QSqrt2 {
        &self.base_norm
    }

    /// Generator σ_{i+1} (zero-based `i`).
    pub fn generator(&self, i: usize) -> Result<Isometry, CoxeterError> {
        let m = self.generators.get(i).ok_or(CoxeterError::BadGenerator(i))?.clone();
        Ok(Isometry { m, word: Some(vec![i as Letter]) })
    }

    pub fn generator_matrix(&self, i: usize) -> &Mat3 {
        &self.generators[i]
    }

    pub fn generator_matrices(&self) -> &[Mat3] {
        &self.generators
    }

    /// Matrix of a word over the generators.
    pub fn word_matrix(&self, word: &[Letter]) -> Mat3 {
        let mut m = Mat3::identity();
        for &l in word {
            m = right_mul_generator(&m, l as usize);
        }
        m
    }

    pub fn element(&self, word: &[Letter]) -> Isometry {
        Isometry { m: self.word_matrix(word), word: Some(word.to_vec()) }
    }

    /// Inverse computed as `G⁻¹ gᵀ G`.
    pub fn invert(&self, g: &Isometry) -> Isometry {
        let m = self.gram_inv.mul(&g.m.transpose()).mul(self.gram.matrix());
        let word = g.word.as_ref().map(|w| w.iter().rev().copied().collect());
        Isometry { m, word }
    }

    pub fn invert_matrix(&self, m: &Mat3) -> Mat3 {
        self.gram_inv.mul(&m.transpose()).mul(self.gram.matrix())
    }

    /// `cosh d(o, g·o) = B(o, g o) / B(o, o)`.
    pub fn cosh_distance(&self, g: &Mat3) -> QSqrt2 {
        let go = g.apply(&self.basepoint);
        let num = self.gram.eval(&self.basepoint, &go);
        num.checked_div(&self.base_norm).expect("B(o,o) is nonzero")
    }

    /// Vertex of the base tile opposite side `k` (zero-based), scaled so that it
    /// lies in the closed base chamber.
    pub fn tile_vertex(&self, k: usize) -> Vec3 {
        self.gram_inv.column(k).neg()
    }
}

/// Reflection `x ↦ x − 2 B(x, e_i) e_i` in the root basis.
pub fn reflection_matrix(gram: &GramForm, i: usize) -> Mat3 {
    let g = gram.matrix();
    Mat3::from_fn(|r, c| {
        let delta = if r == c { QSqrt2::one() } else { QSqrt2::zero() };
        if r == i {
            let two_g = &g.0[i][c] + &g.0[i][c];
            delta - two_g
        } else {
            delta
        }
    })
}

/// `m · σ_k` without a full matrix product: column `k` flips sign and every
/// other column gains `√2` times column `k`.
pub fn right_mul_generator(m: &Mat3, k: usize) -> Mat3 {
    let mut out = m.clone();
    for r in 0..3 {
        let ck = &m.0[r][k];
        for c in 0..3 {
            if c == k {
                out.0[r][c] = -ck;
            } else if !ck.is_zero() {
                out.0[r][c] = &m.0[r][c] + &ck.mul_sqrt2();
            }
        }
    }
    out
}

/// Enumeration cap for a ball.
#[derive(Clone, Debug)]
pub enum BallCap {
    /// All elements of word length at most `L`.
    WordLength(usize),
    /// All elements with `cosh d(o, g o) < threshold`.
    CoshBelow(Rational),
    /// The identity and the reflections in the sides of every tile g·T with
    /// word length of g at most `L`.
    WallReflections(usize),
}

/// A finite, inverse-closed set of group elements in deterministic order.
#[derive(Clone, Debug)]
pub struct Ball {
    pub cap: BallCap,
    /// Generator matrices used to build the ball; words index into these.
    generators: Vec<Mat3>,
    elements: Vec<Mat3>,
    words: Vec<Vec<Letter>>,
    /// BFS parent inside the ball and the letter appended to reach this element.
    parents: Vec<Option<(usize, Letter)>>,
    index: HashMap<Mat3, usize>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Mat3] {
        &self.generators
    }

    pub fn element(&self, i: usize) -> &Mat3 {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[Mat3] {
        &self.elements
    }

    pub fn word(&self, i: usize) -> &[Letter] {
        &self.words[i]
    }

    pub fn parent(&self, i: usize) -> Option<(usize, Letter)> {
        self.parents[i]
    }

    pub fn index_of(&self, m: &Mat3) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn contains(&self, m: &Mat3) -> bool {
        self.index.contains_key(m)
    }

    /// Rebuild a ball from serialized words and matrices, checking that every
    /// matrix equals the product of its word.
    pub fn from_parts(
        cap: BallCap,
        generators: Vec<Mat3>,
        words: Vec<Vec<Letter>>,
        elements: Vec<Mat3>,
    ) -> Result<Ball, usize> {
        let mut index = HashMap::new();
        for (i, (w, m)) in words.iter().zip(&elements).enumerate() {
            let mut p = Mat3::identity();
            for &l in w {
                p = p.mul(generators.get(l as usize).ok_or(i)?);
            }
            if &p != m || index.insert(m.clone(), i).is_some() {
                return Err(i);
            }
        }
        let word_index: HashMap<&[Letter], usize> =
            words.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
        let parents = words
            .iter()
            .map(|w| {
                let (last, prefix) = w.split_last()?;
                word_index.get(prefix).map(|&p| (p, *last))
            })
            .collect();
        drop(word_index);
        Ok(Ball { cap, generators, elements, words, parents, index })
    }
}

/// BFS over generator right-multiplication with exact deduplication.
///
/// Layers are processed in order and within a layer by discovery order, so the
/// first word found for an element is its ShortLex-minimal word.
pub fn enumerate_ball(
    group: &TriangleGroup,
    cap: BallCap,
    max_elements: usize,
) -> Result<Ball, CoxeterError> {
    let gens: Vec<Mat3> = group.generator_matrices().to_vec();
    match &cap {
        BallCap::WordLength(l) => bfs(gens, cap.clone(), *l, None, group, max_elements, true),
        BallCap::WallReflections(l) => {
            let tiles = bfs(gens.clone(), BallCap::WordLength(*l), *l, None, group, max_elements, true)?;
            let mut words: Vec<Vec<Letter>> = vec![Vec::new()];
            let mut elements = vec![Mat3::identity()];
            let mut seen: HashMap<Mat3, ()> = HashMap::new();
            seen.insert(Mat3::identity(), ());
            for i in 0..tiles.len() {
                let p = tiles.element(i);
                let inv = group.invert_matrix(p);
                for k in 0..3u8 {
                    let m = p.mul(&gens[k as usize]).mul(&inv);
                    if seen.insert(m.clone(), ()).is_some() {
                        continue;
                    }
                    if elements.len() >= max_elements {
                        return Err(CoxeterError::ResourceCap { partial: elements.len(), cap: max_elements });
                    }
                    let mut w = tiles.word(i).to_vec();
                    w.push(k);
                    w.extend(tiles.word(i).iter().rev());
                    words.push(w);
                    elements.push(m);
                }
            }
            Ok(Ball::from_parts(cap, gens, words, elements).expect("reflection words match their matrices"))
        }
        BallCap::CoshBelow(c) => {
            let threshold = QSqrt2::new(c.clone(), Rational::from_integer(0.into()));
            // Galleries along the geodesic o → g·o stay within cosh(R + diam T₄)
            // ≤ e^{diam T₄}·cosh R < 5·cosh R.
            let explore = threshold.scale(&Rational::from_integer(5.into()));
            bfs(gens, cap.clone(), usize::MAX, Some((threshold, explore)), group, max_elements, true)
        }
    }
}

/// Word-length ball for an arbitrary finite set of involutive generators
/// (used for the octagon reflection group).
pub fn enumerate_word_ball(
    group: &TriangleGroup,
    generators: Vec<Mat3>,
    max_len: usize,
    max_elements: usize,
) -> Result<Ball, CoxeterError> {
    bfs(generators, BallCap::WordLength(max_len), max_len, None, group, max_elements, false)
}

fn bfs(
    gens: Vec<Mat3>,
    cap: BallCap,
    max_len: usize,
    cosh: Option<(QSqrt2, QSqrt2)>,
    group: &TriangleGroup,
    max_elements: usize,
    simple_generators: bool,
) -> Result<Ball, CoxeterError> {
    let mut elements = vec![Mat3::identity()];
    let mut words: Vec<Vec<Letter>> = vec![Vec::new()];
    let mut index: HashMap<Mat3, usize> = HashMap::new();
    index.insert(Mat3::identity(), 0);
    let mut layer = vec![0usize];
    let mut len = 0;
    while !layer.is_empty() && len < max_len {
        let mut next = Vec::new();
        for &i in &layer {
            for (k, gen) in gens.iter().enumerate() {
                let m = if simple_generators {
                    right_mul_generator(&elements[i], k)
                } else {
                    elements[i].mul(gen)
                };
                if index.contains_key(&m) {
                    continue;
                }
                if let Some((_, explore)) = &cosh {
                    if group.cosh_distance(&m).cmp_value(explore).is_ge() {
                        continue;
                    }
                }
                if elements.len() >= max_elements {
                    return Err(CoxeterError::ResourceCap { partial: elements.len(), cap: max_elements });
                }
                let mut w = words[i].clone();
                w.push(k as Letter);
                index.insert(m.clone(), elements.len());
                next.push(elements.len());
                elements.push(m);
                words.push(w);
            }
        }
        layer = next;
        len += 1;
    }
    let keep: Vec<usize> = match &cosh {
        None => (0..elements.len()).collect(),
        Some((threshold, _)) => (0..elements.len())
            .filter(|&i| group.cosh_distance(&elements[i]).cmp_value(threshold).is_lt())
            .collect(),
    };
    let kept_words: Vec<Vec<Letter>> = keep.iter().map(|&i| words[i].clone()).collect();
    let kept: Vec<Mat3> = keep.iter().map(|&i| elements[i].clone()).collect();
    let ball = Ball::from_parts(cap, gens, kept_words, kept).expect("BFS words match their matrices");
    Ok(ball)
}
