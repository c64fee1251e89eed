//! Shift-invariant measures on {1,2}^Z, the block-size reweighting, and exact
//! window sampling.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::field::{ratio_to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasureError {
    Parse(String),
    /// Probability outside [0, 1], rows not summing to 1, empty word, ...
    Invalid(&'static str),
}

impl fmt::Display for MeasureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureError::Parse(s) => write!(f, "cannot parse measure: {s}"),
            MeasureError::Invalid(s) => write!(f, "invalid measure: {s}"),
        }
    }
}

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parse `0.25`, `1/4` or `1` as an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, MeasureError> {
    let err = || MeasureError::Parse(s.to_string());
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = alloc::format!("{whole}{frac}");
    let n = BigInt::from_str(&digits).map_err(|_| err())?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    Ok(Rational::new(n, d))
}

fn check_probability(p: &Rational) -> Result<(), MeasureError> {
    if p.is_negative() || *p > Rational::one() {
        return Err(MeasureError::Invalid("probability outside [0, 1]"));
    }
    Ok(())
}

/// A shift-invariant probability measure on bi-infinite words over {1, 2}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShiftMeasure {
    /// i.i.d. with `P(1) = p`.
    Bernoulli { p: Rational },
    /// Stationary Markov chain; `p[i][j]` is the probability of `i+1 → j+1`.
    Markov { p: [[Rational; 2]; 2], stationary: [Rational; 2] },
    /// Uniform measure on the shift orbit of the periodic word `…bbb…`.
    Periodic(Vec<u8>),
}

impl ShiftMeasure {
    pub fn bernoulli(p: Rational) -> Result<Self, MeasureError> {
        check_probability(&p)?;
        Ok(ShiftMeasure::Bernoulli { p })
    }

    /// Chain with transition matrix rows `[p11, p12]`, `[p21, p22]`. The
    /// stationary vector must be unique.
    pub fn markov(p: [[Rational; 2]; 2]) -> Result<Self, MeasureError> {
        for row in &p {
            for x in row {
                check_probability(x)?;
            }
            if &row[0] + &row[1] != Rational::one() {
                return Err(MeasureError::Invalid("transition rows must sum to 1"));
            }
        }
        let flow = &p[0][1] + &p[1][0];
        if flow.is_zero() {
            return Err(MeasureError::Invalid("chain has no unique stationary vector"));
        }
        let pi1 = &p[1][0] / &flow;
        let pi2 = Rational::one() - &pi1;
        Ok(ShiftMeasure::Markov { p, stationary: [pi1, pi2] })
    }

    pub fn periodic(word: Vec<u8>) -> Result<Self, MeasureError> {
        if word.is_empty() {
            return Err(MeasureError::Invalid("periodic word must be nonempty"));
        }
        if word.iter().any(|&a| a != 1 && a != 2) {
            return Err(MeasureError::Invalid("symbols must be 1 or 2"));
        }
        Ok(ShiftMeasure::Periodic(word))
    }

    /// `P(a₀ = 1)`.
    pub fn t_nu(&self) -> Rational {
        match self {
            ShiftMeasure::Bernoulli { p } => p.clone(),
            ShiftMeasure::Markov { stationary, .. } => stationary[0].clone(),
            ShiftMeasure::Periodic(b) => {
                let ones = b.iter().filter(|&&a| a == 1).count();
                Rational::new(BigInt::from(ones), BigInt::from(b.len()))
            }
        }
    }

    fn marginal(&self, symbol: u8) -> Rational {
        let t = self.t_nu();
        if symbol == 1 {
            t
        } else {
            Rational::one() - t
        }
    }

    /// Probability of the cylinder `a[j..j+len] = w` (any `j`).
    pub fn cylinder(&self, w: &[u8]) -> Rational {
        if w.is_empty() {
            return Rational::one();
        }
        match self {
            ShiftMeasure::Bernoulli { .. } => w.iter().map(|&a| self.marginal(a)).product(),
            ShiftMeasure::Markov { p, stationary } => {
                let mut r = stationary[(w[0] - 1) as usize].clone();
                for pair in w.windows(2) {
                    r *= &p[(pair[0] - 1) as usize][(pair[1] - 1) as usize];
                }
                r
            }
            ShiftMeasure::Periodic(b) => {
                let n = b.len();
                let hits = (0..n).filter(|&ph| w.iter().enumerate().all(|(i, &a)| b[(ph + i) % n] == a)).count();
                Rational::new(BigInt::from(hits), BigInt::from(n))
            }
        }
    }

    /// Window `a[−k..=k]` of a ν-random sequence (index `k` is coordinate 0).
    pub fn sample_window(&self, k: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
        let a0 = if bernoulli_draw(rng, &self.t_nu()) { 1 } else { 2 };
        self.extend(a0, k, rng)
    }

    /// Extend a given `a₀` by the conditional law of the other coordinates.
    fn extend(&self, a0: u8, k: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
        let mut w = vec![0u8; 2 * k + 1];
        w[k] = a0;
        match self {
            ShiftMeasure::Bernoulli { p } => {
                for (i, x) in w.iter_mut().enumerate() {
                    if i != k {
                        *x = if bernoulli_draw(rng, p) { 1 } else { 2 };
                    }
                }
            }
            ShiftMeasure::Markov { p, stationary } => {
                for i in k + 1..w.len() {
                    let row = &p[(w[i - 1] - 1) as usize];
                    w[i] = if bernoulli_draw(rng, &row[0]) { 1 } else { 2 };
                }
                // Reversed chain: P(a₋₁ = j | a₀ = i) = π_j p_ji / π_i.
                for i in (0..k).rev() {
                    let s = (w[i + 1] - 1) as usize;
                    let back = &stationary[0] * &p[0][s] / &stationary[s];
                    w[i] = if bernoulli_draw(rng, &back) { 1 } else { 2 };
                }
            }
            ShiftMeasure::Periodic(b) => {
                let n = b.len();
                let phases: Vec<usize> = (0..n).filter(|&ph| b[ph] == a0).collect();
                let ph = phases[uniform_index(rng, phases.len())];
                for (i, x) in w.iter_mut().enumerate() {
                    *x = b[(ph + n * (k / n + 1) + i - k) % n];
                }
            }
        }
        w
    }
}

impl fmt::Display for ShiftMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShiftMeasure::Bernoulli { p } => write!(f, "bernoulli:{p}"),
            ShiftMeasure::Markov { p, .. } => {
                write!(f, "markov:{},{};{},{}", p[0][0], p[0][1], p[1][0], p[1][1])
            }
            ShiftMeasure::Periodic(b) => {
                write!(f, "periodic:")?;
                b.iter().try_for_each(|a| write!(f, "{a}"))
            }
        }
    }
}

/// Measure spec strings: `bernoulli:0.5`, `markov:a,b;c,d`, `periodic:1121`.
impl FromStr for ShiftMeasure {
    type Err = MeasureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || MeasureError::Parse(s.to_string());
        let (kind, body) = s.trim().split_once(':').ok_or_else(err)?;
        match kind {
            "bernoulli" => ShiftMeasure::bernoulli(parse_rational(body)?),
            "markov" => {
                let rows: Vec<&str> = body.split(';').collect();
                if rows.len() != 2 {
                    return Err(err());
                }
                let mut p: [[Rational; 2]; 2] = Default::default();
                for (i, row) in rows.iter().enumerate() {
                    let cells: Vec<&str> = row.split(',').collect();
                    if cells.len() != 2 {
                        return Err(err());
                    }
                    for (j, c) in cells.iter().enumerate() {
                        p[i][j] = parse_rational(c)?;
                    }
                }
                ShiftMeasure::markov(p)
            }
            "periodic" => {
                let word = body
                    .trim()
                    .chars()
                    .map(|c| match c {
                        '1' => Ok(1),
                        '2' => Ok(2),
                        _ => Err(err()),
                    })
                    .collect::<Result<Vec<u8>, _>>()?;
                ShiftMeasure::periodic(word)
            }
            _ => Err(err()),
        }
    }
}

/// ν′: the measure with density `n_{a₀} / (t n₁ + (1−t) n₂)` against ν.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReweightedMeasure {
    pub base: ShiftMeasure,
    pub weights: [u64; 2],
    pub t_nu: Rational,
}

pub fn reweight(base: ShiftMeasure, n1: u64, n2: u64) -> Result<ReweightedMeasure, MeasureError> {
    if n1 == 0 || n2 == 0 {
        return Err(MeasureError::Invalid("block weights must be positive"));
    }
    let t_nu = base.t_nu();
    Ok(ReweightedMeasure { base, weights: [n1, n2], t_nu })
}

impl ReweightedMeasure {
    fn weight(&self, symbol: u8) -> Rational {
        int(self.weights[(symbol - 1) as usize] as i64)
    }

    /// Normalizing constant `t n₁ + (1−t) n₂`.
    pub fn normalizer(&self) -> Rational {
        &self.t_nu * self.weight(1) + (Rational::one() - &self.t_nu) * self.weight(2)
    }

    /// `P_{ν′}(a₀ = 1)`.
    pub fn marginal_one(&self) -> Rational {
        &self.t_nu * self.weight(1) / self.normalizer()
    }

    /// Probability of `a[−k..=k] = w` where `w` has length `2k+1`.
    pub fn window_probability(&self, w: &[u8]) -> Rational {
        let k = w.len() / 2;
        self.base.cylinder(w) * self.weight(w[k]) / self.normalizer()
    }

    /// Exact sampling: `a₀` from the reweighted marginal, then the base
    /// measure's conditional law given `a₀`.
    pub fn sample_window(&self, k: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
        let a0 = if bernoulli_draw(rng, &self.marginal_one()) { 1 } else { 2 };
        self.base.extend(a0, k, rng)
    }

    /// Rejection sampler kept as an independent cross-check: draw from ν and
    /// accept with probability `n_{a₀} / max(n₁, n₂)`.
    pub fn sample_window_rejection(&self, k: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
        let max = int(*self.weights.iter().max().unwrap() as i64);
        loop {
            let w = self.base.sample_window(k, rng);
            if bernoulli_draw(rng, &(self.weight(w[k]) / &max)) {
                return w;
            }
        }
    }
}

/// Independent random stream for one sample.
pub fn sample_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform float in [0, 1) with 53 random bits.
pub fn unit_float(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform index in `0..n` (rejection-free multiply-shift; bias < 2⁻³²·n).
pub fn uniform_index(rng: &mut ChaCha8Rng, n: usize) -> usize {
    (((rng.next_u64() >> 32) * n as u64) >> 32) as usize
}

fn bernoulli_draw(rng: &mut ChaCha8Rng, p: &Rational) -> bool {
    if p.is_zero() {
        return false;
    }
    if p.is_one() {
        return true;
    }
    unit_float(rng) < ratio_to_f64(p)
}

/// Are two cyclic words rotations of each other?
pub fn shift_equivalent(w1: &[u8], w2: &[u8]) -> bool {
    w1.len() == w2.len() && (w1.is_empty() || (0..w1.len()).any(|r| w1[r..].iter().chain(&w1[..r]).eq(w2.iter())))
}

/// Least proper period of a cyclic word, if it has one.
pub fn is_periodic(w: &[u8]) -> Option<usize> {
    let n = w.len();
    (1..n).find(|&p| n.is_multiple_of(p) && (0..n).all(|i| w[i] == w[(i + p) % n]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn t_nu_examples() {
        assert_eq!("bernoulli:0.5".parse::<ShiftMeasure>().unwrap().t_nu(), r(1, 2));
        assert_eq!("periodic:112".parse::<ShiftMeasure>().unwrap().t_nu(), r(2, 3));
        // Stationary (1/4, 3/4): π₁ = p21 / (p12 + p21).
        let m: ShiftMeasure = "markov:0.7,0.3;0.1,0.9".parse().unwrap();
        assert_eq!(m.t_nu(), r(1, 4));
    }

    #[test]
    fn stationary_vector_is_fixed() {
        let m: ShiftMeasure = "markov:1/3,2/3;1/5,4/5".parse().unwrap();
        if let ShiftMeasure::Markov { p, stationary } = &m {
            for j in 0..2 {
                let s = &stationary[0] * &p[0][j] + &stationary[1] * &p[1][j];
                assert_eq!(s, stationary[j]);
            }
        }
    }

    #[test]
    fn reweighted_marginal() {
        let m = reweight(ShiftMeasure::bernoulli(r(1, 2)).unwrap(), 8, 28).unwrap();
        assert_eq!(m.marginal_one(), r(2, 9));
        let same = reweight(ShiftMeasure::bernoulli(r(1, 3)).unwrap(), 5, 5).unwrap();
        assert_eq!(same.marginal_one(), r(1, 3));
        let ones = reweight(ShiftMeasure::periodic(vec![1]).unwrap(), 8, 28).unwrap();
        assert_eq!(ones.marginal_one(), Rational::one());
    }

    #[test]
    fn window_probabilities_sum_to_one() {
        for spec in ["bernoulli:0.3", "markov:0.7,0.3;0.1,0.9", "periodic:1121"] {
            let m = reweight(spec.parse().unwrap(), 8, 28).unwrap();
            let mut total = Rational::zero();
            for bits in 0..8u32 {
                let w: Vec<u8> = (0..3).map(|i| if bits >> i & 1 == 1 { 2 } else { 1 }).collect();
                total += m.window_probability(&w);
            }
            assert_eq!(total, Rational::one(), "{spec}");
        }
    }

    #[test]
    fn parse_errors() {
        assert!("bernoulli:1.5".parse::<ShiftMeasure>().is_err());
        assert!("markov:0.5,0.4;0.1,0.9".parse::<ShiftMeasure>().is_err());
        assert!("markov:1,0;0,1".parse::<ShiftMeasure>().is_err());
        assert!("periodic:".parse::<ShiftMeasure>().is_err());
        assert!("periodic:123".parse::<ShiftMeasure>().is_err());
        assert!("poisson:1".parse::<ShiftMeasure>().is_err());
    }

    #[test]
    fn display_roundtrip() {
        for s in ["bernoulli:1/2", "markov:7/10,3/10;1/10,9/10", "periodic:1121"] {
            let m: ShiftMeasure = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
    }

    #[test]
    fn periods_and_rotations() {
        assert_eq!(is_periodic(&[1, 2, 1, 2]), Some(2));
        assert_eq!(is_periodic(&[1, 1, 2]), None);
        assert!(shift_equivalent(&[1, 1, 2], &[1, 2, 1]));
        assert!(!shift_equivalent(&[1, 1, 2, 2], &[1, 2, 1, 2]));
    }

    #[test]
    fn sampling_is_deterministic_and_consistent() {
        let m = reweight("periodic:12".parse().unwrap(), 8, 28).unwrap();
        let a = m.sample_window(3, &mut sample_stream(7, 11));
        let b = m.sample_window(3, &mut sample_stream(7, 11));
        assert_eq!(a, b);
        assert!(a.windows(2).all(|p| p[0] != p[1]));
        let ones = ShiftMeasure::bernoulli(Rational::one()).unwrap();
        assert_eq!(ones.sample_window(4, &mut sample_stream(1, 0)), vec![1; 9]);
    }
}
