use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use irs_core::coxeter::{enumerate_ball, Ball, BallCap};
use irs_core::envelope::RaoGroup;
use irs_core::polygon::{angle_sequence, glue_blocks, iso_check, reconstruct_word, Calibration, Ends};
use irs_core::shift::{parse_rational, ShiftMeasure};
use serde::Serialize;

use irs::config;
use irs::harness::thread_count;
use irs::io::{
    parse_angles, read_jsonl, to_json, word_from_string, word_to_string, write_csv, write_jsonl, AngleSeqFile,
    BallFile, ComplexFile, EnvelopeFile, FingerprintRecord,
};
use irs::pipeline::{self, Context, SampleConfig};
use irs::stats::{ALPHA, CONTROL_ALPHA, SHUFFLES};
use irs::{selftest, svg, PipelineError};

#[derive(Parser)]
#[command(name = "irs", version, about = "Invariant random subgroups of the (4,4,4) triangle group")]
struct Cli {
    /// Run seed; every output is a function of the arguments and this seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: IRS_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (default: stdout).
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// key=value file of default flags; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Largest ball to enumerate.
    #[arg(long, global = true, default_value_t = 2_000_000)]
    max_ball: usize,
    /// Largest tile complex or envelope (in tiles) to build.
    #[arg(long, global = true, default_value_t = 100_000)]
    max_tiles: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    #[value(name = "T")]
    T,
    #[value(name = "O")]
    O,
    #[value(name = "Q")]
    Q,
    #[value(name = "P1")]
    P1,
    #[value(name = "P2")]
    P2,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate a ball of group elements.
    #[command(group(ArgGroup::new("cap").required(true).args(["max_word_len", "cosh_radius", "wall_reflections"])))]
    Ball {
        #[arg(long)]
        max_word_len: Option<usize>,
        /// Keep g with cosh d(o, g o) below this rational.
        #[arg(long)]
        cosh_radius: Option<String>,
        /// Identity plus the wall reflections of all tiles within this word length.
        #[arg(long)]
        wall_reflections: Option<usize>,
        /// Use the reflections in the octagon's sides as generators (word length only).
        #[arg(long, requires = "max_word_len")]
        octagon_group: bool,
    },
    /// Build a block template.
    Block {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Also write a picture next to the output file.
        #[arg(long)]
        svg: bool,
        #[arg(long)]
        label_angles: bool,
    },
    /// Glue blocks along a word over {1, 2}.
    Glue {
        #[arg(long)]
        word: String,
        /// Cut the outer faces instead of closing them.
        #[arg(long)]
        window: bool,
        #[arg(long)]
        svg: bool,
        #[arg(long)]
        label_angles: bool,
    },
    /// Boundary angle sequence of a stored complex.
    AngleSeq {
        #[arg(long)]
        complex: PathBuf,
    },
    /// Recover a word from its angle sequence.
    #[command(group(ArgGroup::new("input").required(true).args(["angles", "angles_file"])))]
    Reconstruct {
        /// Text form, e.g. `(2,2,4,4,2)` or `2,4,4|2,2`.
        #[arg(long)]
        angles: Option<String>,
        /// JSON written by angle-seq.
        #[arg(long)]
        angles_file: Option<PathBuf>,
    },
    /// Decide whether two angle sequences agree up to shift and mirror.
    IsoCheck {
        #[arg(long)]
        seq1: String,
        #[arg(long)]
        seq2: String,
    },
    /// Sample subgroups and write their fingerprints as JSON lines.
    Sample {
        /// bernoulli:p, markov:a,b;c,d or periodic:w.
        #[arg(long)]
        measure: String,
        /// Window radius k (window a[-k..k]); default: the smallest that suffices.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        ball: PathBuf,
        /// Draw windows from the shift measure itself, without reweighting.
        #[arg(long)]
        unweighted: bool,
    },
    /// Permutation tests of conjugation invariance per generator.
    InvarianceTest {
        #[arg(long)]
        fingerprints: PathBuf,
        /// Ball the fingerprints were taken on.
        #[arg(long)]
        ball: PathBuf,
        /// The samples are unweighted; succeed only if invariance is rejected.
        #[arg(long)]
        negative_control: bool,
        #[arg(long, default_value_t = SHUFFLES)]
        shuffles: usize,
    },
    /// Fingerprint distance between periodic approximants and a target.
    WeakLimit {
        #[arg(long)]
        target: String,
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 8])]
        orders: Vec<usize>,
        /// Default: wall reflections of tiles within word length 8.
        #[arg(long)]
        ball: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
    /// Convex envelope of the ball B(o, n) in the octagon tiling.
    Envelope {
        #[arg(long)]
        n: f64,
        #[arg(long)]
        check_bound: bool,
        #[arg(long)]
        svg: bool,
    },
    /// Coverage of conjugates of each side reflection by radius.
    SpanningTest {
        #[arg(long)]
        n: f64,
        /// Ball of the octagon group (ball --octagon-group).
        #[arg(long)]
        ball: PathBuf,
        #[arg(long)]
        samples: u64,
    },
    /// Fraction of samples excluding each ball element.
    FaithfulTest {
        #[arg(long)]
        n: f64,
        #[arg(long)]
        ball: PathBuf,
        #[arg(long)]
        samples: u64,
    },
    /// Quick invariant suite.
    Selftest,
}

struct Out {
    path: Option<PathBuf>,
}

impl Out {
    fn write(&self, bytes: &[u8]) -> Result<(), PipelineError> {
        match &self.path {
            Some(p) => fs::write(p, bytes)?,
            None => io::stdout().write_all(bytes)?,
        }
        Ok(())
    }

    fn svg(&self, text: &str) -> Result<PathBuf, PipelineError> {
        let p = self
            .path
            .as_ref()
            .ok_or_else(|| PipelineError::Usage("--svg needs --output to place the picture".into()))?
            .with_extension("svg");
        fs::write(&p, text)?;
        Ok(p)
    }
}

fn load_ball(path: &Path) -> Result<Ball, PipelineError> {
    Ok(load_json::<BallFile>(path)?.to_ball()?)
}

fn load_json<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<T, PipelineError> {
    serde_json::from_str(&fs::read_to_string(path)?).map_err(|e| PipelineError::Usage(format!("{}: {e}", path.display())))
}

fn measure(text: &str) -> Result<ShiftMeasure, PipelineError> {
    Ok(text.parse::<ShiftMeasure>()?)
}

fn verdict(ok: bool, what: impl Into<String>) -> Result<(), PipelineError> {
    if ok {
        Ok(())
    } else {
        Err(PipelineError::Verification(what.into()))
    }
}

#[derive(Serialize)]
struct InvarianceReport {
    reports: Vec<irs::io::Report>,
    negative_control: bool,
    /// Per-generator level: ALPHA / 3, or CONTROL_ALPHA for the control.
    level: f64,
    passed: bool,
}

#[derive(Serialize)]
struct Reconstruction {
    word: String,
    closed: bool,
}

#[derive(Serialize)]
struct IsoResult {
    isomorphic: bool,
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let out = Out { path: cli.output.clone() };
    let ctx = Context::new(thread_count(cli.threads));
    match cli.command {
        Command::Ball { max_word_len, cosh_radius, wall_reflections, octagon_group } => {
            let ball = if octagon_group {
                let rao = RaoGroup::new(&ctx.group);
                pipeline::octagon_ball(&rao, max_word_len.expect("required by clap"), cli.max_ball)?
            } else {
                let cap = match (max_word_len, cosh_radius, wall_reflections) {
                    (Some(l), _, _) => BallCap::WordLength(l),
                    (_, Some(c), _) => BallCap::CoshBelow(parse_rational(&c)?),
                    (_, _, Some(l)) => BallCap::WallReflections(l),
                    _ => unreachable!("clap requires one cap"),
                };
                enumerate_ball(&ctx.group, cap, cli.max_ball)?
            };
            out.write(to_json(&BallFile::from_ball(&ball)).as_bytes())
        }
        Command::Block { kind, svg: want_svg, label_angles } => {
            let (block, name, symbols): (_, &str, &[u8]) = match kind {
                Kind::T => (&ctx.blocks.triangle, "T", &[]),
                Kind::O => (&ctx.blocks.octagon, "O", &[]),
                Kind::Q => (&ctx.blocks.half_octagon, "Q", &[]),
                Kind::P1 => (&ctx.blocks.octagon, "P1", &[1]),
                Kind::P2 => (&ctx.blocks.phat2, "P2", &[2]),
            };
            let file = ComplexFile::new(&ctx.group, name, symbols, &block.complex)?;
            out.write(to_json(&file).as_bytes())?;
            if want_svg {
                out.svg(&svg::render_complex(&ctx.group, &file, label_angles))?;
            }
            Ok(())
        }
        Command::Glue { word, window, svg: want_svg, label_angles } => {
            let w = word_from_string(&word)?;
            let total: usize = w.iter().map(|&s| ctx.blocks.for_symbol(s).tile_count()).sum();
            if total > cli.max_tiles {
                return Err(PipelineError::ResourceCap(format!("{total} tiles exceed --max-tiles {}", cli.max_tiles)));
            }
            let (ends, kind) = if window { (Ends::Cut, "window") } else { (Ends::Closed, "closed") };
            let c = glue_blocks(&ctx.blocks, &w, ends)?;
            let file = ComplexFile::new(&ctx.group, kind, &w, &c)?;
            out.write(to_json(&file).as_bytes())?;
            if want_svg {
                out.svg(&svg::render_complex(&ctx.group, &file, label_angles))?;
            }
            Ok(())
        }
        Command::AngleSeq { complex } => {
            let file: ComplexFile = load_json(&complex)?;
            let s = angle_sequence(&file.to_complex()?)?;
            out.write(to_json(&AngleSeqFile::new(&s)).as_bytes())
        }
        Command::Reconstruct { angles, angles_file } => {
            let s = match (angles, angles_file) {
                (Some(text), _) => parse_angles(&text)?,
                (_, Some(p)) => load_json::<AngleSeqFile>(&p)?.to_sequence(),
                _ => unreachable!("clap requires one input"),
            };
            let cal = Calibration::measure(&ctx.blocks)?;
            let w = reconstruct_word(&ctx.blocks, &cal, &s)?;
            let closed = s.components.len() == 1;
            let ends = if closed { Ends::Closed } else { Ends::Cut };
            verdict(angle_sequence(&glue_blocks(&ctx.blocks, &w, ends)?)? == s, "reconstructed word has another sequence")?;
            out.write(to_json(&Reconstruction { word: word_to_string(&w), closed }).as_bytes())
        }
        Command::IsoCheck { seq1, seq2 } => {
            let isomorphic = iso_check(&parse_angles(&seq1)?, &parse_angles(&seq2)?);
            out.write(to_json(&IsoResult { isomorphic }).as_bytes())
        }
        Command::Sample { measure: m, window, samples, ball, unweighted } => {
            let ball = load_ball(&ball)?;
            let radius = window.unwrap_or_else(|| pipeline::window_radius_for(&ctx, &ball));
            let cfg = SampleConfig { measure: measure(&m)?, radius, samples, seed: cli.seed, unweighted };
            let records = pipeline::sample(&ctx, &cfg, &ball)?;
            let mut buf = Vec::new();
            write_jsonl(&mut buf, &records)?;
            out.write(&buf)
        }
        Command::InvarianceTest { fingerprints, ball, negative_control, shuffles } => {
            let ball = load_ball(&ball)?;
            let records: Vec<FingerprintRecord> = read_jsonl(BufReader::new(fs::File::open(&fingerprints)?))?;
            let reports = pipeline::invariance_test(&ctx, &records, &ball, shuffles, cli.seed)?;
            let min_p = reports.iter().map(|r| r.p_value).fold(f64::INFINITY, f64::min);
            let (level, passed) = if negative_control {
                (CONTROL_ALPHA, min_p < CONTROL_ALPHA)
            } else {
                let level = ALPHA / reports.len() as f64;
                (level, min_p > level)
            };
            out.write(to_json(&InvarianceReport { reports, negative_control, level, passed }).as_bytes())?;
            if negative_control {
                verdict(passed, format!("negative control not rejected: min p = {min_p}"))
            } else {
                verdict(passed, format!("invariance rejected: min p = {min_p} <= {level}"))
            }
        }
        Command::WeakLimit { target, orders, ball, samples } => {
            let ball = match ball {
                Some(p) => load_ball(&p)?,
                None => enumerate_ball(&ctx.group, BallCap::WallReflections(8), cli.max_ball)?,
            };
            let rows = pipeline::weak_limit(&ctx, &measure(&target)?, &orders, &ball, samples, cli.seed)?;
            let mut buf = Vec::new();
            write_csv(&mut buf, &rows)?;
            out.write(&buf)?;
            let decreasing = rows.windows(2).all(|w| w[1].tv < w[0].tv);
            eprintln!("strictly decreasing: {decreasing}");
            Ok(())
        }
        Command::Envelope { n, check_bound, svg: want_svg } => {
            let rao = RaoGroup::new(&ctx.group);
            let env = pipeline::build_envelope(&rao, n, cli.max_tiles / 8)?;
            let checks = check_bound.then(|| pipeline::envelope_checks(&rao, &env));
            out.write(to_json(&EnvelopeFile::new(&rao, &env, checks.clone())).as_bytes())?;
            if want_svg {
                out.svg(&svg::render_envelope(&rao, &env))?;
            }
            if let Some(c) = checks {
                verdict(c.convex, "envelope is not convex")?;
                verdict(c.contains_ball, "envelope misses part of the ball")?;
                verdict(c.removable.is_empty(), format!("removable octagons {:?}", c.removable))?;
                verdict(c.max_excess <= c.bound + 1e-6, format!("excess {} above bound {}", c.max_excess, c.bound))?;
            }
            Ok(())
        }
        Command::SpanningTest { n, ball, samples } => {
            let rao = RaoGroup::new(&ctx.group);
            let ball = load_ball(&ball)?;
            pipeline::require_octagon_ball(&rao, &ball)?;
            let env = pipeline::build_envelope(&rao, n, cli.max_tiles / 8)?;
            let res = pipeline::spanning_test(&ctx, &env, &ball, samples, cli.seed)?;
            let mut buf = Vec::new();
            write_csv(&mut buf, &res.rows)?;
            out.write(&buf)?;
            for f in &res.fits {
                eprintln!("{}", serde_json::to_string(f).expect("plain struct"));
            }
            verdict(res.fits.iter().all(|f| f.monotone), "coverage is not monotone in the radius")?;
            verdict(
                res.fits.iter().all(|f| f.slope.is_none_or(|s| s < 0.0)),
                "complement of coverage does not decay",
            )
        }
        Command::FaithfulTest { n, ball, samples } => {
            let rao = RaoGroup::new(&ctx.group);
            let ball = load_ball(&ball)?;
            pipeline::require_octagon_ball(&rao, &ball)?;
            let env = pipeline::build_envelope(&rao, n, cli.max_tiles / 8)?;
            let res = pipeline::faithful_test(&ctx, &env, &ball, samples, cli.seed)?;
            let mut buf = Vec::new();
            write_csv(&mut buf, &res.rows)?;
            out.write(&buf)?;
            let witness: Vec<String> = res.kernel_witness.iter().map(|&i| pipeline::word_key(ball.word(i))).collect();
            eprintln!("kernel witness: {}", witness.join(" "));
            Ok(())
        }
        Command::Selftest => {
            let mut buf = Vec::new();
            let res = selftest::run(&ctx, &mut buf);
            out.write(&buf)?;
            res.map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    let mut args: Vec<String> = std::env::args().collect();
    let config_path = args
        .iter()
        .position(|a| a == "--config")
        .and_then(|i| args.get(i + 1).cloned())
        .or_else(|| args.iter().find_map(|a| a.strip_prefix("--config=").map(str::to_string)));
    if let Some(p) = config_path {
        let parsed = fs::read_to_string(&p)
            .map_err(|e| e.to_string())
            .and_then(|text| config::parse(&text).map_err(|e| e.to_string()));
        match parsed {
            Ok(c) => args = config::merge_into_args(&args, &c),
            Err(e) => {
                eprintln!("error: config {p}: {e}");
                return ExitCode::from(1);
            }
        }
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
