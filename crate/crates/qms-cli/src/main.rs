//! `qms` — deterministic command-line front end for the message-space
//! simulator. Every invocation echoes its seed (when one is used) and prints
//! floats with 17 significant digits so outputs are byte-reproducible.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use qms::freegroup::{ball, Word};
use qms::harmonic::{orthogonal_polys, projector_coeffs, quadrature_rule};
use qms::hilbert::Complex64;
use qms::io::{
    self, channel_from_json, density_from_json, density_to_json, fmt_f64, vector_from_json,
    vector_to_json, MeasurementRecord,
};
use qms::observables::{
    entropies, max_entropy_source, measure, measure_state_as_observable, truncated_source_entropy,
    MeasurementKind,
};
use qms::protocols::{alicebob_run, memcell_read, memcell_write, shift_register_step, ShiftDirection};
use qms::quantum_ops::success_probability;
use qms::{LinOp, QmsError, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::fs;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qms", version, about = "Quantum message space toolkit", disable_help_subcommand = true)]
struct Cli {
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Free-group word arithmetic: reduce, multiply, invert.
    Word {
        #[command(subcommand)]
        op: WordOp,
    },
    /// Convolve two vectors given as JSON files.
    Conv { lhs: String, rhs: String },
    /// Entropies: of a stored state, or of the maximum-entropy source.
    Entropy(EntropyArgs),
    /// Sample a measurement on a stored state.
    Measure(MeasureArgs),
    /// Run a protocol: memory-cell read/write, shift register, or Alice→Bob.
    Protocol {
        #[command(subcommand)]
        proto: ProtocolCmd,
    },
    /// Emit the orthogonal polynomials p_0..p_nmax as TSV.
    Poly {
        #[arg(long)]
        nmax: usize,
    },
    /// Emit the spectral quadrature grid as TSV (node, weight).
    Quad {
        #[arg(long)]
        nodes: usize,
    },
    /// Radial coefficients G_n(B) of the band spectral projector.
    Projector(ProjectorArgs),
    /// Fourier transform of a stored vector, exported as TSV.
    Fourier {
        input: String,
        #[arg(long, default_value_t = 64)]
        nodes: usize,
    },
    /// Plancherel check on a seeded random vector.
    Plancherel {
        #[arg(long, default_value_t = 3)]
        ball: usize,
        #[arg(long, default_value_t = 2048)]
        nodes: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Apply a Kraus channel (JSON spec) to a stored state.
    Channel {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        state: String,
    },
}

#[derive(Subcommand)]
enum WordOp {
    Reduce { word: String },
    Mul { lhs: String, rhs: String },
    Inv { word: String },
}

#[derive(Args)]
struct EntropyArgs {
    /// Density operator JSON file.
    #[arg(long, conflicts_with_all = ["mu", "depth"])]
    state: Option<String>,
    /// Average message length of the maximum-entropy source.
    #[arg(long)]
    mu: Option<f64>,
    /// Truncation depth for the source series.
    #[arg(long, default_value_t = 12)]
    depth: usize,
    /// Also list the truncated weights (word, weight) as TSV rows.
    #[arg(long)]
    weights: bool,
}

#[derive(Args)]
struct MeasureArgs {
    /// Density operator JSON file.
    #[arg(long)]
    state: String,
    /// message | length | positive | x<j> | q<j> | spectral
    #[arg(long)]
    kind: String,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    samples: usize,
}

#[derive(Subcommand)]
enum ProtocolCmd {
    /// Non-destructive memory-cell read.
    Read {
        #[arg(long)]
        cell: String,
        #[arg(long)]
        seed: u64,
    },
    /// Memory-cell write of a bit.
    Write {
        #[arg(long)]
        bit: u8,
        #[arg(long)]
        cell: String,
        #[arg(long)]
        seed: u64,
    },
    /// One shift-register step: push a bit or pop one.
    Shift {
        /// in0 | in1 | out
        #[arg(long)]
        op: String,
        #[arg(long)]
        register: String,
        #[arg(long)]
        seed: u64,
    },
    /// Alice→Bob message runs through a Kraus channel.
    Alicebob {
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long)]
        channel: String,
        /// Encoder operator spec (JSON); identity if omitted.
        #[arg(long)]
        encoder: Option<String>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        runs: usize,
    },
}

#[derive(Args)]
struct ProjectorArgs {
    /// Spectral interval `a:b`; repeatable for a union of bands.
    #[arg(long = "interval", required = true)]
    intervals: Vec<String>,
    #[arg(long, default_value_t = 30)]
    nmax: usize,
    #[arg(long, default_value_t = 256)]
    nodes: usize,
}

fn read_file(path: &str) -> Result<String, QmsError> {
    fs::read_to_string(path).map_err(|e| QmsError::Validation(format!("cannot read {path}: {e}")))
}

fn random_vector(rng: &mut ChaCha12Rng, radius: usize) -> Result<StateVector, QmsError> {
    Ok(StateVector::from_terms(ball(radius)?.into_iter().map(|x| {
        (
            x,
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        )
    })))
}

fn parse_kind(s: &str) -> Result<Option<MeasurementKind>, QmsError> {
    Ok(Some(match s {
        "message" => MeasurementKind::Message,
        "length" => MeasurementKind::Length,
        "positive" => MeasurementKind::Positive,
        "spectral" => return Ok(None),
        other => {
            let (head, idx) = other.split_at(1);
            let j: usize = idx
                .parse()
                .map_err(|_| QmsError::Validation(format!("unknown measurement kind {other}")))?;
            match head {
                "x" => MeasurementKind::X { j },
                "q" => MeasurementKind::Q { j },
                _ => return Err(QmsError::Validation(format!("unknown measurement kind {other}"))),
            }
        }
    }))
}

fn parse_interval(s: &str) -> Result<(f64, f64), QmsError> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| QmsError::Validation(format!("interval must be a:b, got {s}")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| QmsError::Validation(format!("bad interval bound {t}")))
    };
    Ok((parse(a)?, parse(b)?))
}

fn run(cli: Cli) -> Result<String, QmsError> {
    match cli.command {
        Command::Word { op } => Ok(match op {
            WordOp::Reduce { word } => format!("{}\n", Word::parse(&word)?),
            WordOp::Mul { lhs, rhs } => format!("{}\n", Word::parse(&lhs)?.mul(&Word::parse(&rhs)?)),
            WordOp::Inv { word } => format!("{}\n", Word::parse(&word)?.inv()),
        }),
        Command::Conv { lhs, rhs } => {
            let f = vector_from_json(&read_file(&lhs)?)?;
            let g = vector_from_json(&read_file(&rhs)?)?;
            Ok(format!("{}\n", vector_to_json(&f.convolve(&g))))
        }
        Command::Entropy(args) => {
            if let Some(path) = args.state {
                let rho = density_from_json(&read_file(&path)?)?;
                let e = entropies(&rho);
                return Ok(format!(
                    "source\t{}\nvon_neumann\t{}\n",
                    fmt_f64(e.source),
                    fmt_f64(e.von_neumann)
                ));
            }
            let mu = args
                .mu
                .ok_or_else(|| QmsError::Validation("entropy needs --state or --mu".into()))?;
            let src = max_entropy_source(mu, args.depth)?;
            let (series, tail) = truncated_source_entropy(mu, args.depth)?;
            let mut out = format!(
                "mu\t{}\np\t{}\ndepth\t{}\nclosed_form_entropy\t{}\ntruncated_entropy\t{}\ntail_mass\t{}\n",
                fmt_f64(mu),
                fmt_f64(src.p),
                args.depth,
                fmt_f64(src.closed_form_entropy),
                fmt_f64(series),
                fmt_f64(tail)
            );
            if args.weights {
                for (x, w) in &src.weights {
                    out.push_str(&format!("w\t{x}\t{}\n", fmt_f64(*w)));
                }
            }
            Ok(out)
        }
        Command::Measure(args) => {
            let rho = density_from_json(&read_file(&args.state)?)?;
            let mut rng = ChaCha12Rng::seed_from_u64(args.seed);
            let mut out = String::new();
            for _ in 0..args.samples {
                let outcome = match parse_kind(&args.kind)? {
                    Some(kind) => measure(kind, &rho, &mut rng)?,
                    None => measure_state_as_observable(&rho, &mut rng)?,
                };
                let record = MeasurementRecord {
                    kind: args.kind.clone(),
                    value: Some(outcome.value),
                    probability: Some(outcome.probability),
                    trace_before: rho.trace(),
                    trace_after: outcome.posterior.trace(),
                    seed: args.seed,
                };
                out.push_str(&serde_json::to_string(&record).expect("record serializes"));
                out.push('\n');
            }
            Ok(out)
        }
        Command::Protocol { proto } => match proto {
            ProtocolCmd::Read { cell, seed } => {
                let rho = density_from_json(&read_file(&cell)?)?;
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                let (bit, restored, transcript) = memcell_read(&rho, &mut rng)?;
                Ok(format!(
                    "{}bit\t{bit}\nrestored\t{}\n",
                    io::transcript_to_json_lines(&transcript, seed),
                    density_to_json(&restored)
                ))
            }
            ProtocolCmd::Write { bit, cell, seed } => {
                let rho = density_from_json(&read_file(&cell)?)?;
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                let (out, transcript) = memcell_write(bit, &rho, &mut rng)?;
                Ok(format!(
                    "{}written\t{}\n",
                    io::transcript_to_json_lines(&transcript, seed),
                    density_to_json(&out)
                ))
            }
            ProtocolCmd::Shift { op, register, seed } => {
                let rho = density_from_json(&read_file(&register)?)?;
                let direction = match op.as_str() {
                    "in0" => ShiftDirection::In(0),
                    "in1" => ShiftDirection::In(1),
                    "out" => ShiftDirection::Out,
                    other => {
                        return Err(QmsError::Validation(format!(
                            "shift op must be in0, in1, or out, got {other}"
                        )))
                    }
                };
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                let (bit, next, transcript) = shift_register_step(direction, &rho, &mut rng)?;
                let bit_line = match bit {
                    Some(b) => format!("bit\t{b}\n"),
                    None => String::new(),
                };
                Ok(format!(
                    "{}{}register\t{}\n",
                    io::transcript_to_json_lines(&transcript, seed),
                    bit_line,
                    density_to_json(&next)
                ))
            }
            ProtocolCmd::Alicebob {
                mu,
                depth,
                channel,
                encoder,
                seed,
                runs,
            } => {
                let e = channel_from_json(&read_file(&channel)?)?;
                let g = match encoder {
                    Some(path) => {
                        let spec: io::OpSpec = serde_json::from_str(&read_file(&path)?)
                            .map_err(|err| QmsError::Parse(format!("encoder JSON: {err}")))?;
                        spec.to_linop()?
                    }
                    None => LinOp::Identity,
                };
                let rho = max_entropy_source(mu, depth)?.mixed_state();
                let exact = success_probability(&g, &e, &rho, depth)?;
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                let mut out = String::new();
                let mut hits = 0usize;
                for _ in 0..runs {
                    let run = alicebob_run(&rho, &g, &e, &mut rng)?;
                    if run.success {
                        hits += 1;
                    }
                    out.push_str(&format!(
                        "{{\"sent\":\"{}\",\"received\":\"{}\",\"success\":{},\"completed\":{},\"seed\":{seed}}}\n",
                        run.sent, run.received, run.success, run.completed
                    ));
                }
                out.push_str(&format!(
                    "success_rate\t{}\nclosed_form\t{}\n",
                    fmt_f64(hits as f64 / runs.max(1) as f64),
                    fmt_f64(exact)
                ));
                Ok(out)
            }
        },
        Command::Poly { nmax } => Ok(io::poly_tsv(&orthogonal_polys(nmax)?)),
        Command::Quad { nodes } => Ok(io::grid_tsv(&quadrature_rule(nodes)?)),
        Command::Projector(args) => {
            let mut intervals = Vec::with_capacity(args.intervals.len());
            for s in &args.intervals {
                intervals.push(parse_interval(s)?);
            }
            let grid = quadrature_rule(args.nodes)?;
            let g = projector_coeffs(&intervals, args.nmax, &grid)?;
            let mut out = String::new();
            for n in 0..=args.nmax {
                out.push_str(&format!("{n}\t{}\n", fmt_f64(g.value(n).re)));
            }
            Ok(out)
        }
        Command::Fourier { input, nodes } => {
            let f = vector_from_json(&read_file(&input)?)?;
            let grid = quadrature_rule(nodes)?;
            Ok(io::field_tsv(&qms::boundary::fourier_forward(&f, &grid)?))
        }
        Command::Plancherel { ball, nodes, seed } => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let f = random_vector(&mut rng, ball)?;
            let grid = quadrature_rule(nodes)?;
            let field = qms::boundary::fourier_forward(&f, &grid)?;
            let norm = f.norm_l2_sq();
            let spectral = field.norm_sq();
            Ok(format!(
                "seed\t{seed}\nnorm_sq\t{}\nspectral_norm_sq\t{}\ndiff\t{}\n",
                fmt_f64(norm),
                fmt_f64(spectral),
                fmt_f64((norm - spectral).abs())
            ))
        }
        Command::Channel { spec, state } => {
            let channel = channel_from_json(&read_file(&spec)?)?;
            let rho = density_from_json(&read_file(&state)?)?;
            let out = channel.apply(&rho)?;
            Ok(format!(
                "trace_before\t{}\ntrace_after\t{}\n{}\n",
                fmt_f64(rho.trace()),
                fmt_f64(out.trace()),
                density_to_json(&out)
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(64);
        }
    };
    let output = cli.output.clone();
    match run(cli) {
        Ok(text) => {
            match output {
                Some(path) => {
                    if let Err(e) = fs::write(&path, text) {
                        eprintln!("error: cannot write {path}: {e}");
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                QmsError::Budget(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
