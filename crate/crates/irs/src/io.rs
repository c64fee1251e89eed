//! JSON, JSON-lines and CSV formats for balls, complexes, envelopes,
//! fingerprints and reports.

use std::fmt;
use std::io::{BufRead, Write};

use irs_core::coxeter::{Ball, BallCap, Letter};
use irs_core::envelope::{Envelope, RaoGroup};
use irs_core::field::{Mat3, QSqrt2};
use irs_core::polygon::angles::min_rotation;
use irs_core::polygon::{boundary_walks, AngleSequence, Component, Side, TileComplex};
use irs_core::shift::parse_rational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug)]
pub enum FormatError {
    Io(std::io::Error),
    Json(serde_json::Error),
    Csv(csv::Error),
    Invalid(String),
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Io(e) => write!(f, "{e}"),
            FormatError::Json(e) => write!(f, "malformed JSON: {e}"),
            FormatError::Csv(e) => write!(f, "CSV: {e}"),
            FormatError::Invalid(s) => write!(f, "{s}"),
        }
    }
}

impl std::error::Error for FormatError {}

impl From<std::io::Error> for FormatError {
    fn from(e: std::io::Error) -> Self {
        FormatError::Io(e)
    }
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json(e)
    }
}

impl From<csv::Error> for FormatError {
    fn from(e: csv::Error) -> Self {
        FormatError::Csv(e)
    }
}

fn invalid(s: impl Into<String>) -> FormatError {
    FormatError::Invalid(s.into())
}

pub type MatrixStrings = [[String; 3]; 3];

pub fn matrix_to_strings(m: &Mat3) -> MatrixStrings {
    m.0.each_ref().map(|row| row.each_ref().map(|x| x.to_string()))
}

pub fn matrix_from_strings(s: &MatrixStrings) -> Result<Mat3, FormatError> {
    let mut rows = Vec::with_capacity(3);
    for row in s {
        let mut out = Vec::with_capacity(3);
        for x in row {
            out.push(x.parse::<QSqrt2>().map_err(|e| invalid(e.to_string()))?);
        }
        rows.push([out[0].clone(), out[1].clone(), out[2].clone()]);
    }
    Ok(Mat3([rows[0].clone(), rows[1].clone(), rows[2].clone()]))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapRecord {
    WordLength(usize),
    /// cosh R as a rational `p/q`.
    CoshBelow(String),
    WallReflections(usize),
}

impl CapRecord {
    pub fn from_cap(cap: &BallCap) -> Self {
        match cap {
            BallCap::WordLength(l) => CapRecord::WordLength(*l),
            BallCap::CoshBelow(c) => CapRecord::CoshBelow(format!("{}/{}", c.numer(), c.denom())),
            BallCap::WallReflections(l) => CapRecord::WallReflections(*l),
        }
    }

    pub fn to_cap(&self) -> Result<BallCap, FormatError> {
        Ok(match self {
            CapRecord::WordLength(l) => BallCap::WordLength(*l),
            CapRecord::CoshBelow(c) => BallCap::CoshBelow(parse_rational(c).map_err(|e| invalid(e.to_string()))?),
            CapRecord::WallReflections(l) => BallCap::WallReflections(*l),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ElementRecord {
    pub word: Vec<Letter>,
    pub matrix: MatrixStrings,
}

/// A ball on disk. `hash` is the SHA-256 of the canonical JSON of the other
/// fields and is what fingerprint records refer to.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BallFile {
    pub cap: CapRecord,
    pub generators: Vec<MatrixStrings>,
    pub elements: Vec<ElementRecord>,
    pub hash: String,
}

#[derive(Serialize)]
struct BallBody<'a> {
    cap: &'a CapRecord,
    generators: &'a [MatrixStrings],
    elements: &'a [ElementRecord],
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl BallFile {
    pub fn from_ball(ball: &Ball) -> Self {
        let cap = CapRecord::from_cap(&ball.cap);
        let generators: Vec<MatrixStrings> = ball.generators().iter().map(matrix_to_strings).collect();
        let elements: Vec<ElementRecord> = (0..ball.len())
            .map(|i| ElementRecord { word: ball.word(i).to_vec(), matrix: matrix_to_strings(ball.element(i)) })
            .collect();
        let hash = body_hash(&cap, &generators, &elements);
        BallFile { cap, generators, elements, hash }
    }

    /// Rebuild the ball, checking the hash and every word against its matrix.
    pub fn to_ball(&self) -> Result<Ball, FormatError> {
        if body_hash(&self.cap, &self.generators, &self.elements) != self.hash {
            return Err(invalid("ball file hash does not match its contents"));
        }
        let generators = self.generators.iter().map(matrix_from_strings).collect::<Result<Vec<_>, _>>()?;
        let words = self.elements.iter().map(|e| e.word.clone()).collect();
        let elements = self.elements.iter().map(|e| matrix_from_strings(&e.matrix)).collect::<Result<Vec<_>, _>>()?;
        Ball::from_parts(self.cap.to_cap()?, generators, words, elements)
            .map_err(|i| invalid(format!("ball element {i} does not match its word")))
    }
}

fn body_hash(cap: &CapRecord, generators: &[MatrixStrings], elements: &[ElementRecord]) -> String {
    let body = serde_json::to_vec(&BallBody { cap, generators, elements }).expect("serializable");
    hex(&Sha256::digest(&body))
}

/// Hash of a ball as written by [`BallFile::from_ball`].
pub fn ball_hash(ball: &Ball) -> String {
    BallFile::from_ball(ball).hash
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileRecord {
    pub block_index: usize,
    pub matrix: MatrixStrings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    /// Disk coordinates of the edge's two ends, counter-clockwise.
    pub edge_endpoints: [[f64; 2]; 2],
    pub tile: usize,
    pub side: usize,
    /// Angle π/m at the counter-clockwise end; absent for straight vertices
    /// and at the end of a run.
    pub angle_denominator: Option<u8>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub kind: String,
    pub blocks: Vec<u8>,
    pub tiles: Vec<TileRecord>,
    /// Truncation faces `(tile, side)` of window complexes.
    pub cuts: Vec<(usize, usize)>,
    pub boundary: Vec<Vec<BoundaryEdge>>,
}

impl ComplexFile {
    pub fn new(
        group: &irs_core::coxeter::TriangleGroup,
        kind: &str,
        blocks: &[u8],
        c: &TileComplex,
    ) -> Result<Self, FormatError> {
        let mats = c.verify_embedding().map_err(|e| invalid(e.to_string()))?;
        let frame = irs_core::disk::DiskFrame::new(group);
        let tiles = mats
            .iter()
            .enumerate()
            .map(|(t, m)| TileRecord { block_index: c.block_of(t), matrix: matrix_to_strings(m) })
            .collect();
        let cuts = c.boundary_sides().into_iter().filter(|&(t, k)| c.side(t, k) == Side::Cut).collect();
        let walks = boundary_walks(c).map_err(|e| invalid(e.to_string()))?;
        let boundary = walks
            .iter()
            .map(|w| {
                w.edges
                    .iter()
                    .zip(&w.angles)
                    .map(|(&(t, k), &a)| {
                        let v = frame.tile_vertices(group, &mats[t]);
                        let ends = if c.is_odd(t) { [(k + 2) % 3, (k + 1) % 3] } else { [(k + 1) % 3, (k + 2) % 3] };
                        BoundaryEdge { edge_endpoints: ends.map(|i| v[i]), tile: t, side: k, angle_denominator: a }
                    })
                    .collect()
            })
            .collect();
        Ok(ComplexFile { kind: kind.to_string(), blocks: blocks.to_vec(), tiles, cuts, boundary })
    }

    pub fn matrices(&self) -> Result<Vec<Mat3>, FormatError> {
        self.tiles.iter().map(|t| matrix_from_strings(&t.matrix)).collect()
    }

    /// The stored tile complex, with adjacency recomputed from the matrices.
    pub fn to_complex(&self) -> Result<TileComplex, FormatError> {
        let mats = self.matrices()?;
        let blocks = self.tiles.iter().map(|t| t.block_index).collect();
        TileComplex::from_stored(&mats, blocks, &self.cuts).map_err(|e| invalid(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallRecord {
    pub octagon: usize,
    pub side: usize,
    /// Distance from o to the wall.
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeChecks {
    pub convex: bool,
    pub contains_ball: bool,
    pub removable: Vec<usize>,
    pub max_excess: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeFile {
    pub n: f64,
    /// Γ_O element of each octagon.
    pub tiles: Vec<MatrixStrings>,
    pub words: Vec<Vec<Letter>>,
    pub walls: Vec<WallRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<EnvelopeChecks>,
}

impl EnvelopeFile {
    pub fn new(rao: &RaoGroup, env: &Envelope, checks: Option<EnvelopeChecks>) -> Self {
        let walls = env
            .boundary()
            .into_iter()
            .map(|(i, k)| WallRecord {
                octagon: i,
                side: k,
                distance: rao.wall_distance(&rao.origin, &env.octagons[i].apply(&rao.roots[k])),
            })
            .collect();
        EnvelopeFile {
            n: env.n,
            tiles: env.octagons.iter().map(matrix_to_strings).collect(),
            words: env.words.clone(),
            walls,
            checks,
        }
    }
}

/// One sampled subgroup: its window, marked tile and fingerprint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintRecord {
    pub sample_id: u64,
    pub seed: u64,
    /// a[−k..=k] as a string over {1, 2}.
    pub window: String,
    /// Index of the marked tile within the block of a₀.
    pub marked_tile_index: usize,
    pub ball_hash: String,
    pub members: Vec<usize>,
}

pub fn word_to_string(w: &[u8]) -> String {
    w.iter().map(|d| char::from(b'0' + d)).collect()
}

pub fn word_from_string(s: &str) -> Result<Vec<u8>, FormatError> {
    s.chars()
        .filter(|c| !matches!(c, ',' | ' '))
        .map(|c| match c {
            '1' => Ok(1),
            '2' => Ok(2),
            _ => Err(invalid(format!("word symbols are 1 and 2, got {c:?}"))),
        })
        .collect()
}

pub fn write_jsonl<T: Serialize>(out: &mut impl Write, records: &[T]) -> Result<(), FormatError> {
    for r in records {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl<T: for<'de> Deserialize<'de>>(input: impl BufRead) -> Result<Vec<T>, FormatError> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

/// Permutation-test result for one conjugating generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub generator: String,
    pub tv: f64,
    pub p_value: f64,
    pub n_samples: usize,
}

/// A row of a statistics table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatRow {
    pub key: String,
    pub radius: usize,
    pub fraction: f64,
    pub stderr: f64,
    pub n_samples: usize,
}

pub fn write_csv<T: Serialize>(out: impl Write, rows: &[T]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(input: impl std::io::Read) -> Result<Vec<T>, FormatError> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(FormatError::from)).collect()
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Text form of an angle sequence: components separated by `|`, a cyclic
/// component in parentheses, entries separated by commas. For example the
/// octagon is `(2,2,2,2,2,2,2,2)` and a window `2,4,4,2|2,2`.
pub fn format_angles(s: &AngleSequence) -> String {
    s.components
        .iter()
        .map(|c| {
            let body = c.entries.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",");
            if c.cyclic {
                format!("({body})")
            } else {
                body
            }
        })
        .collect::<Vec<_>>()
        .join("|")
}

pub fn parse_angles(text: &str) -> Result<AngleSequence, FormatError> {
    let mut components = Vec::new();
    for part in text.split('|') {
        let part = part.trim();
        let (cyclic, body) = match part.strip_prefix('(').and_then(|p| p.strip_suffix(')')) {
            Some(b) => (true, b),
            None => (false, part),
        };
        let entries = body
            .split(',')
            .map(str::trim)
            .filter(|e| !e.is_empty())
            .map(|e| match e.parse::<u8>() {
                Ok(m @ (2 | 4)) => Ok(m),
                _ => Err(invalid(format!("angle entries are 2 or 4, got {e:?}"))),
            })
            .collect::<Result<Vec<u8>, _>>()?;
        let entries = if cyclic { min_rotation(&entries) } else { entries };
        components.push(Component { cyclic, entries });
    }
    components.sort();
    Ok(AngleSequence { components })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub cyclic: bool,
    pub entries: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleSeqFile {
    pub text: String,
    pub components: Vec<ComponentRecord>,
}

impl AngleSeqFile {
    pub fn new(s: &AngleSequence) -> Self {
        AngleSeqFile {
            text: format_angles(s),
            components: s
                .components
                .iter()
                .map(|c| ComponentRecord { cyclic: c.cyclic, entries: c.entries.clone() })
                .collect(),
        }
    }

    pub fn to_sequence(&self) -> AngleSequence {
        let mut components: Vec<Component> =
            self.components.iter().map(|c| Component { cyclic: c.cyclic, entries: c.entries.clone() }).collect();
        components.sort();
        AngleSequence { components }
    }
}
