use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use quadlabel::pnm::{read_pbm, write_pbm, write_pgm16, write_table_dump};
use quadlabel::{
    equivalent_up_to_relabeling, generate, label_reference, realtime_check, BinaryImage, Engine,
    EngineConfig, Error as EngineError, FrameFailure, FrameStats, Pattern,
};

const SEED_VAR: &str = "QUADLABEL_SEED";

#[derive(Parser)]
#[command(
    name = "quadlabel",
    version,
    about = "Streaming four-pixel connected component labelling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Label a PBM image and write the final labels as 16-bit PGM.
    Label {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = EngineConfig::DEFAULT_LABEL_BITS)]
        bits: u32,
        /// Write the final equivalence table as `address data` lines.
        #[arg(long)]
        dump_table: Option<PathBuf>,
        #[arg(long)]
        stats: bool,
        #[arg(long)]
        json: bool,
    },
    /// Label a PBM image and check it against the reference labelling.
    Compare {
        input: PathBuf,
        #[arg(long, default_value_t = 16)]
        bits: u32,
    },
    /// Label random frames and check every one against the reference.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        frames: u64,
        #[arg(long, num_args = 2, value_names = ["W", "H"], default_values_t = [256, 256])]
        max_size: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        bits: u32,
        /// Where the reproducer of a failing frame goes.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run one pattern frame and report cycles against the frame budget.
    Bench {
        #[arg(long, default_value_t = 3840)]
        width: usize,
        #[arg(long, default_value_t = 2160)]
        height: usize,
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long, default_value_t = EngineConfig::DEFAULT_CLOCK_HZ)]
        clock: u64,
        #[arg(long, default_value_t = EngineConfig::DEFAULT_FPS)]
        fps: u64,
        #[arg(long, default_value_t = EngineConfig::DEFAULT_LABEL_BITS)]
        bits: u32,
        #[arg(long)]
        json: bool,
    },
    /// Write a pattern as PBM.
    Gen {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long, default_value_t = 64)]
        width: usize,
        #[arg(long, default_value_t = 64)]
        height: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct PatternArgs {
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(Pattern::NAMES))]
    pattern: String,
    /// Foreground probability for `random`.
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// Seed for `random`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Chain length for `ascending_chain`.
    #[arg(long, default_value_t = 4)]
    links: usize,
    /// Tooth count for `comb`.
    #[arg(long, default_value_t = 1023)]
    labels: usize,
    /// Component count for `max_labels`.
    #[arg(long, default_value_t = 1023)]
    components: usize,
}

impl PatternArgs {
    fn pattern(&self) -> Pattern {
        match self.pattern.as_str() {
            "blank" => Pattern::Blank,
            "double_merger" => Pattern::DoubleMerger,
            "ascending_chain" => Pattern::AscendingChain { links: self.links },
            "group_chain" => Pattern::GroupChain,
            "comb" => Pattern::Comb {
                labels: self.labels,
            },
            "checkerboard_pairs" => Pattern::CheckerboardPairs,
            "spiral" => Pattern::Spiral,
            "random" => Pattern::Random {
                density: self.density,
                seed: self.seed,
            },
            "max_labels" => Pattern::MaxLabels {
                components: self.components,
            },
            other => unreachable!("clap accepted unknown pattern {other}"),
        }
    }
}

/// Bad input maps to exit code 2, a failed check or frame to 1.
enum Failure {
    Usage(anyhow::Error),
    Violation(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Violation(e)) => {
            eprintln!("failure: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Label {
            input,
            output,
            bits,
            dump_table,
            stats,
            json,
        } => label(
            &input,
            &output,
            bits,
            dump_table.as_deref(),
            stats || json,
            json,
        ),
        Command::Compare { input, bits } => compare(&input, bits),
        Command::Fuzz {
            frames,
            max_size,
            seed,
            bits,
            out_dir,
            json,
        } => {
            let seed = seed_override(seed)?;
            fuzz(
                frames,
                (max_size[0], max_size[1]),
                seed,
                bits,
                &out_dir,
                json,
            )
        }
        Command::Bench {
            width,
            height,
            pattern,
            clock,
            fps,
            bits,
            json,
        } => {
            let cfg = EngineConfig {
                clock_hz: clock,
                fps,
                ..EngineConfig::new(width, height)
            }
            .with_label_bits(bits);
            bench(cfg, &pattern, json)
        }
        Command::Gen {
            pattern,
            width,
            height,
            output,
        } => {
            let img = generate(&pattern.pattern(), width, height).map_err(anyhow::Error::from)?;
            write_pbm(&output, &img).with_context(|| format!("writing {}", output.display()))?;
            Ok(())
        }
    }
}

fn seed_override(flag: u64) -> anyhow::Result<u64> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{SEED_VAR}={v} is not an integer")),
        Err(_) => Ok(flag),
    }
}

fn engine_for(img: &BinaryImage, bits: u32) -> anyhow::Result<Engine> {
    Ok(Engine::new(
        EngineConfig::for_image(img).with_label_bits(bits),
    )?)
}

fn load(path: &Path) -> anyhow::Result<BinaryImage> {
    read_pbm(path).with_context(|| format!("reading {}", path.display()))
}

fn frame_failed(f: FrameFailure) -> Failure {
    Failure::Violation(anyhow!(f.error))
}

fn label(
    input: &Path,
    output: &Path,
    bits: u32,
    dump: Option<&Path>,
    stats: bool,
    json: bool,
) -> CmdResult {
    let img = load(input)?;
    let mut engine = engine_for(&img, bits)?;
    let cfg = *engine.config();
    let res = engine.process_frame(&img).map_err(frame_failed)?;
    write_pgm16(output, &res.final_image)
        .with_context(|| format!("writing {}", output.display()))?;
    if let Some(path) = dump {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut out = BufWriter::new(file);
        write_table_dump(&mut out, &res.final_table)
            .and_then(|()| out.flush())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if stats {
        let mut fields = stat_fields(&res.stats, &cfg);
        fields.push(("components", json!(count_labels(&res))));
        emit(&fields, json);
    }
    Ok(())
}

fn count_labels(res: &quadlabel::FrameResult) -> u32 {
    let mut seen: Vec<u32> = res
        .final_image
        .data()
        .iter()
        .copied()
        .filter(|&l| l != 0)
        .collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len() as u32
}

fn compare(input: &Path, bits: u32) -> CmdResult {
    let img = load(input)?;
    let res = engine_for(&img, bits)?
        .process_frame(&img)
        .map_err(frame_failed)?;
    let same = equivalent_up_to_relabeling(&res.final_image, &label_reference(&img))
        .map_err(anyhow::Error::from)?;
    println!("equivalent={same}");
    if same {
        Ok(())
    } else {
        Err(Failure::Violation(anyhow!(
            "labels differ from the reference; reproducer {}",
            input.display()
        )))
    }
}

enum Outcome {
    Pass {
        max_group_mergers: usize,
        pauses: u64,
    },
    Exhausted,
    Fail(String),
}

fn fuzz_frame(seed: u64, index: u64, max: (usize, usize)) -> BinaryImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let width = 4 * rng.random_range(1..=(max.0 / 4).max(1));
    let height = rng.random_range(1..=max.1.max(1));
    let density = rng.random_range(0.05..=0.95);
    generate(
        &Pattern::Random {
            density,
            seed: rng.random(),
        },
        width,
        height,
    )
    .expect("width is a positive multiple of 4")
}

fn fuzz(
    frames: u64,
    max: (usize, usize),
    seed: u64,
    bits: u32,
    out_dir: &Path,
    json: bool,
) -> CmdResult {
    if max.0 < 4 || max.1 < 1 {
        return Err(anyhow!("--max-size must be at least 4 1").into());
    }
    EngineConfig::new(4, 1)
        .with_label_bits(bits)
        .validate()
        .map_err(anyhow::Error::from)?;

    let outcomes: Vec<Outcome> = (0..frames)
        .into_par_iter()
        .map(|i| {
            let img = fuzz_frame(seed, i, max);
            let res = match engine_for(&img, bits).map(|mut e| e.process_frame(&img)) {
                Ok(Ok(res)) => res,
                Ok(Err(f)) if matches!(f.error, EngineError::LabelExhausted { .. }) => {
                    return Outcome::Exhausted
                }
                Ok(Err(f)) => return Outcome::Fail(f.error.to_string()),
                Err(e) => return Outcome::Fail(e.to_string()),
            };
            let t = &res.final_table;
            if t.first_non_idempotent().is_some() || t.first_upward().is_some() {
                return Outcome::Fail("final table is not a downward one-level table".into());
            }
            if res.stats.max_group_mergers > 2 {
                return Outcome::Fail(format!(
                    "{} mergers in one group",
                    res.stats.max_group_mergers
                ));
            }
            match equivalent_up_to_relabeling(&res.final_image, &label_reference(&img)) {
                Ok(true) => Outcome::Pass {
                    max_group_mergers: res.stats.max_group_mergers,
                    pauses: res.stats.pause_cycles,
                },
                _ => Outcome::Fail("labels differ from the reference".into()),
            }
        })
        .collect();

    let passed = outcomes
        .iter()
        .filter(|o| matches!(o, Outcome::Pass { .. }))
        .count();
    let exhausted = outcomes
        .iter()
        .filter(|o| matches!(o, Outcome::Exhausted))
        .count();
    let (max_mergers, pauses) = outcomes.iter().fold((0, 0), |(m, p), o| match o {
        Outcome::Pass {
            max_group_mergers,
            pauses,
        } => (m.max(*max_group_mergers), p + pauses),
        _ => (m, p),
    });
    let first_failure = outcomes.iter().enumerate().find_map(|(i, o)| match o {
        Outcome::Fail(why) => Some((i as u64, why.clone())),
        _ => None,
    });

    let mut fields = vec![
        ("frames", json!(frames)),
        ("seed", json!(seed)),
        ("passed", json!(passed)),
        ("exhausted", json!(exhausted)),
        ("failed", json!(frames as usize - passed - exhausted)),
        ("max_group_mergers", json!(max_mergers)),
        ("pause_cycles", json!(pauses)),
    ];
    let Some((index, why)) = first_failure else {
        emit(&fields, json);
        return Ok(());
    };
    let path = out_dir.join(format!("fuzz-{seed}-{index}.pbm"));
    write_pbm(&path, &fuzz_frame(seed, index, max))
        .with_context(|| format!("writing reproducer {}", path.display()))?;
    fields.push(("first_failure", json!(index)));
    fields.push(("reproducer", json!(path.display().to_string())));
    emit(&fields, json);
    Err(Failure::Violation(anyhow!(
        "frame {index}: {why}; reproducer {}",
        path.display()
    )))
}

fn bench(cfg: EngineConfig, pattern: &PatternArgs, json: bool) -> CmdResult {
    let img = generate(&pattern.pattern(), cfg.width, cfg.height).map_err(anyhow::Error::from)?;
    let mut engine = Engine::new(cfg).map_err(anyhow::Error::from)?;
    let mut fields = vec![
        ("pattern", json!(pattern.pattern)),
        ("width", json!(cfg.width)),
        ("height", json!(cfg.height)),
    ];
    match engine.process_frame(&img) {
        Ok(res) => {
            fields.extend(stat_fields(&res.stats, &cfg));
            emit(&fields, json);
            Ok(())
        }
        Err(f) => {
            // Partial stats of an abandoned frame; it cannot meet the budget.
            fields.extend(stat_fields(&f.stats, &cfg));
            if let Some(verdict) = fields.iter_mut().find(|(k, _)| *k == "verdict") {
                verdict.1 = json!("fail");
            }
            fields.push(("error", json!(f.error.to_string())));
            emit(&fields, json);
            Err(frame_failed(f))
        }
    }
}

fn stat_fields(s: &FrameStats, cfg: &EngineConfig) -> Vec<(&'static str, Value)> {
    let v = realtime_check(s, cfg);
    vec![
        ("label_bits", json!(cfg.label_bits)),
        ("consumed_groups", json!(s.consumed_groups)),
        ("active_cycles", json!(s.active_cycles)),
        ("pause_cycles", json!(s.pause_cycles)),
        ("drain_cycles", json!(s.drain_cycles)),
        ("chain_entries", json!(s.chain_entries)),
        ("idle_cycles", json!(s.idle_cycles)),
        ("total_cycles", json!(v.total)),
        ("interframe_cycles", json!(v.interframe)),
        ("budget", json!(v.budget)),
        ("slack", json!(v.slack)),
        ("peak_label", json!(s.peak_label)),
        ("groups_0_mergers", json!(s.conflict_histogram[0])),
        ("groups_1_merger", json!(s.conflict_histogram[1])),
        ("groups_2_mergers", json!(s.conflict_histogram[2])),
        ("bank_ready", json!(v.bank_ready)),
        ("verdict", json!(if v.pass { "pass" } else { "fail" })),
    ]
}

/// Prints `key=value` lines, or one JSON object with the same keys.
fn emit(fields: &[(&str, Value)], json: bool) {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if json {
        let map: Map<String, Value> = fields
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect();
        let _ = writeln!(out, "{}", Value::Object(map));
        return;
    }
    for (k, v) in fields {
        let _ = match v {
            Value::String(s) => writeln!(out, "{k}={s}"),
            other => writeln!(out, "{k}={other}"),
        };
    }
}
