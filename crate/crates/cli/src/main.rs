//! `eds`: batch front end for the ellseq library.
//!
//! Exit codes: 0 on success, 2 when a check finds violations or a replay
//! fails, 1 on usage, ring or parse errors.

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ellseq::classify::{
    automaton_dot, automaton_transitions, classify, dead_states, initial_states, simple_loops, unreachable_states,
};
use ellseq::derive::{derive_from_even_odd, derive_from_somos, replay, ReplayMode};
use ellseq::relations::{eval_relation, nilpotency_probe, symbolic_relation, Half, RelationId, SymbolicSeqRing};
use ellseq::sequences::{check_window, family_relations, Family};
use ellseq::std_eds::{invariant_d, invariant_n, translation_invariant_cross_check, universal};
use ellseq::{EllipticSeq, Ring, RingElement, TermOracle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "eds", version, about = "Exact elliptic sequences: generate, check, derive, classify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print terms h1..hN of a sequence.
    Gen {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, default_value_t = 20)]
        upto: i64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Check a window of elliptic relations; exit 2 on violations.
    Check {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, default_value_t = 14)]
        window: i64,
        #[arg(long, default_value = "full")]
        family: Family,
        /// Instead of one sequence, check this many even-odd sequences with
        /// random small initials drawn from `--seed`.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Derive E(a,b,c,d) from a base family and optionally replay the tree.
    Derive {
        #[arg(allow_negative_numbers = true)]
        a: Half,
        #[arg(allow_negative_numbers = true)]
        b: Half,
        #[arg(allow_negative_numbers = true)]
        c: Half,
        #[arg(allow_negative_numbers = true)]
        d: Half,
        #[arg(long, value_enum, default_value_t = BaseArg::EvenOdd)]
        base: BaseArg,
        #[arg(long, value_enum, default_value_t = ReplayArg::None)]
        replay: ReplayArg,
        /// Sequence for numeric replay.
        #[command(flatten)]
        seq: SeqArgs,
    },
    /// Divisibility witness q with q h(m) = h(nm) in Z[X2,X3,X4].
    Witness {
        m: i64,
        n: i64,
        /// Also map the witness into EDS(b,c,d) over `--ring`.
        #[arg(long, num_args = 3, allow_negative_numbers = true, value_names = ["B", "C", "D"])]
        specialize: Option<Vec<String>>,
        #[arg(long, default_value = "Z")]
        ring: String,
    },
    /// Somos translation invariant N(n,s)/D(n,s) over a window, or the
    /// universal invariant identity at `--swart m`.
    Invariant {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, default_value_t = 1)]
        s: i64,
        #[arg(long, default_value_t = 12)]
        upto: i64,
        #[arg(long)]
        swart: Option<i64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Classify a field-valued sequence from its first terms.
    Classify {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, default_value_t = 60)]
        bound: i64,
    },
    /// The transition diagram of type (110) zero patterns.
    Automaton {
        #[arg(long, value_enum, default_value_t = AutomatonFormat::Dot)]
        format: AutomatonFormat,
    },
    /// Smallest power of the defect of E(a,b,c,d) in the ideal of a relation
    /// family over Q[h1..hK].
    Probe {
        #[arg(allow_negative_numbers = true)]
        a: Half,
        #[arg(allow_negative_numbers = true)]
        b: Half,
        #[arg(allow_negative_numbers = true)]
        c: Half,
        #[arg(allow_negative_numbers = true)]
        d: Half,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "mnr0")]
        family: Family,
        #[arg(long, default_value_t = 4)]
        max_exponent: u32,
    },
}

/// Where the terms come from. At most one generator flag may be given.
#[derive(Args, Clone, Default)]
struct SeqArgs {
    /// Ring spec: Z, Q, Zmod:n, Fp:p, Poly:Z[x,y], Frac:<spec>.
    #[arg(long, default_value = "Q")]
    ring: String,
    /// Standard sequence EDS(b,c,d).
    #[arg(long, num_args = 3, allow_negative_numbers = true, value_names = ["B", "C", "D"])]
    std: Option<Vec<String>>,
    /// Even-odd recurrence from h1..h4.
    #[arg(long, num_args = 4, allow_negative_numbers = true)]
    even_odd: Option<Vec<String>>,
    /// Somos-4 recurrence from h1..h4.
    #[arg(long, num_args = 4, allow_negative_numbers = true)]
    somos: Option<Vec<String>>,
    /// A * ES_{r,s}(B,D).
    #[arg(long, num_args = 5, allow_negative_numbers = true, value_names = ["R", "S", "A", "B", "D"])]
    es: Option<Vec<String>>,
    /// Explicit terms h1,h2,... separated by commas.
    #[arg(long, allow_hyphen_values = true)]
    terms: Option<String>,
    /// The universal sequence over Z[X2,X3,X4]; ignores --ring.
    #[arg(long)]
    universal: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Jsonl,
    Tsv,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum AutomatonFormat {
    Dot,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum BaseArg {
    EvenOdd,
    Somos,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ReplayArg {
    None,
    Symbolic,
    Numeric,
}

/// A usage-level failure, reported on stderr with exit code 1.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Usage {
        Usage(e.to_string())
    }
}

type CmdResult = Result<ExitCode, Usage>;

fn elements(ring: &Ring, raw: &[String]) -> Result<Vec<RingElement>, Usage> {
    raw.iter()
        .map(|s| ring.parse_element(s).map_err(|e| Usage(format!("bad element {s:?}: {e}"))))
        .collect()
}

fn four(ring: &Ring, raw: &[String]) -> Result<[RingElement; 4], Usage> {
    let v = elements(ring, raw)?;
    v.try_into().map_err(|_| Usage("expected four initial terms".into()))
}

impl SeqArgs {
    fn given(&self) -> usize {
        [self.std.is_some(), self.even_odd.is_some(), self.somos.is_some(), self.es.is_some(), self.terms.is_some(), self.universal]
            .iter()
            .filter(|&&b| b)
            .count()
    }

    fn build(&self) -> Result<EllipticSeq, Usage> {
        match self.given() {
            0 => return Err(Usage("no sequence given: use --std, --even-odd, --somos, --es, --terms or --universal".into())),
            1 => {}
            _ => return Err(Usage("give exactly one sequence generator".into())),
        }
        if self.universal {
            return Ok(universal().seq().clone());
        }
        let ring = Ring::parse_spec(&self.ring)?;
        if let Some(v) = &self.std {
            let [b, c, d]: [RingElement; 3] = elements(&ring, v)?.try_into().map_err(|_| Usage("--std takes B C D".into()))?;
            return Ok(EllipticSeq::std_eds(b, c, d)?);
        }
        if let Some(v) = &self.even_odd {
            return Ok(EllipticSeq::even_odd(four(&ring, v)?)?);
        }
        if let Some(v) = &self.somos {
            return Ok(EllipticSeq::somos4(four(&ring, v)?)?);
        }
        if let Some(v) = &self.es {
            let r: u64 = v[0].parse().map_err(|_| Usage(format!("bad r {:?}", v[0])))?;
            let s: u64 = v[1].parse().map_err(|_| Usage(format!("bad s {:?}", v[1])))?;
            let [a, b, d]: [RingElement; 3] = elements(&ring, &v[2..])?.try_into().map_err(|_| Usage("--es takes R S A B D".into()))?;
            return Ok(EllipticSeq::es(r, s, a, b, d)?);
        }
        let raw: Vec<String> = self.terms.as_deref().unwrap_or("").split(',').map(|s| s.trim().to_string()).collect();
        Ok(EllipticSeq::from_terms(&ring, elements(&ring, &raw)?)?)
    }
}

fn relation_json(r: &RelationId) -> Value {
    json!({ "relation": r.to_string(), "doubled": [r.a2, r.b2, r.c2, r.d2] })
}

fn emit(out: &mut impl Write, v: &Value) -> io::Result<()> {
    writeln!(out, "{}", serde_json::to_string(v).expect("serializable"))
}

fn cmd_gen(seq: &SeqArgs, upto: i64, format: Format, out: &mut impl Write) -> CmdResult {
    let s = seq.build()?;
    let mut terms = Vec::new();
    for n in 1..=upto {
        let t = s.term(n)?;
        match format {
            Format::Jsonl => emit(out, &json!({ "n": n, "value": t.to_string() }))?,
            Format::Tsv => writeln!(out, "{n}\t{t}")?,
            Format::Json => terms.push(json!({ "n": n, "value": t.to_string() })),
        }
    }
    if format == Format::Json {
        emit(out, &json!({ "ring": s.ring().to_string(), "generator": s.describe(), "terms": terms }))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn violations_of(s: &dyn TermOracle, window: i64, family: Family) -> Result<Vec<Value>, Usage> {
    let bad = check_window(s, window, family)?;
    bad.iter()
        .map(|r| {
            let mut v = relation_json(r);
            v["defect"] = json!(eval_relation(s, r)?.defect.to_string());
            Ok(v)
        })
        .collect()
}

fn cmd_check(seq: &SeqArgs, window: i64, family: Family, random: Option<usize>, seed: u64, format: Format, out: &mut impl Write) -> CmdResult {
    let mut runs: Vec<EllipticSeq> = Vec::new();
    match random {
        Some(count) => {
            if seq.given() > 0 {
                return Err(Usage("--random replaces the sequence flags".into()));
            }
            let ring = Ring::parse_spec(&seq.ring)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let h: [RingElement; 4] = std::array::from_fn(|i| {
                    let lo = if i < 2 { 1 } else { -5 };
                    ring.from_int(rng.gen_range(lo..=5))
                });
                runs.push(EllipticSeq::even_odd(h)?);
            }
        }
        None => runs.push(seq.build()?),
    }
    let mut any = false;
    for s in &runs {
        let checked = family_relations(family, window).len();
        let (violations, failure) = match violations_of(s, window, family) {
            Ok(v) => (v, None),
            Err(Usage(e)) if random.is_some() => (Vec::new(), Some(e)),
            Err(e) => return Err(e),
        };
        any |= !violations.is_empty();
        let head = json!({
            "ring": s.ring().to_string(),
            "generator": s.describe(),
            "window": window,
            "family": family.to_string(),
            "checked": checked,
        });
        match format {
            Format::Json => {
                let mut v = head;
                v["violations"] = Value::Array(violations);
                if let Some(f) = failure {
                    v["generation_failure"] = json!(f);
                }
                emit(out, &v)?;
            }
            Format::Jsonl => {
                for v in violations {
                    emit(out, &v)?;
                }
            }
            Format::Tsv => {
                for v in violations {
                    writeln!(out, "{}\t{}", v["relation"].as_str().unwrap_or(""), v["defect"].as_str().unwrap_or(""))?;
                }
            }
        }
    }
    Ok(if any { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn cmd_derive(goal: RelationId, base: BaseArg, mode: ReplayArg, seq: &SeqArgs, out: &mut impl Write) -> CmdResult {
    let tree = match base {
        BaseArg::EvenOdd => derive_from_even_odd(goal)?,
        BaseArg::Somos => derive_from_somos(goal)?,
    };
    emit(out, &serde_json::to_value(&*tree)?)?;
    let result = match mode {
        ReplayArg::None => return Ok(ExitCode::SUCCESS),
        ReplayArg::Symbolic => replay(&tree, ReplayMode::Symbolic(tree.max_index() as usize)),
        ReplayArg::Numeric => {
            let s = seq.build()?;
            replay(&tree, ReplayMode::Numeric(&s))
        }
    };
    match result {
        Ok(()) => {
            writeln!(out, "replay: ok")?;
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            writeln!(out, "replay: failed: {e}")?;
            Ok(ExitCode::from(2))
        }
    }
}

fn cmd_witness(m: i64, n: i64, specialize: Option<&[String]>, ring: &str, out: &mut impl Write) -> CmdResult {
    if m < 1 || n < 1 {
        return Err(Usage("m and n must be positive".into()));
    }
    let w = universal().divisibility_witness(m, n);
    let mut v = serde_json::to_value(&w)?;
    v["verified"] = json!(w.verify());
    if let Some(raw) = specialize {
        let ring = Ring::parse_spec(ring)?;
        let [b, c, d]: [RingElement; 3] = elements(&ring, raw)?.try_into().map_err(|_| Usage("--specialize takes B C D".into()))?;
        v["specialized"] = json!(w.specialize(&b, &c, &d).to_string());
    }
    emit(out, &v)?;
    Ok(if w.verify() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn cmd_invariant(seq: &SeqArgs, s: i64, upto: i64, swart: Option<i64>, format: Format, out: &mut impl Write) -> CmdResult {
    if let Some(m) = swart {
        if m < 2 {
            return Err(Usage("--swart needs m >= 2".into()));
        }
        let holds = universal().swart_invariant_identity_check(m);
        emit(out, &json!({ "m": m, "holds": holds }))?;
        return Ok(if holds { ExitCode::SUCCESS } else { ExitCode::from(2) });
    }
    if s < 1 {
        return Err(Usage("--s must be positive".into()));
    }
    let seq = seq.build()?;
    let first = s + 1;
    let mut rows = Vec::new();
    let mut consistent = true;
    for n in first..=upto {
        let (num, den) = (invariant_n(&seq, n, s)?, invariant_d(&seq, n, s)?);
        let agrees = translation_invariant_cross_check(&seq, n, first, s)?;
        consistent &= agrees;
        let row = json!({ "n": n, "N": num.to_string(), "D": den.to_string(), "agrees": agrees });
        match format {
            Format::Jsonl => emit(out, &row)?,
            Format::Tsv => writeln!(out, "{n}\t{num}\t{den}\t{agrees}")?,
            Format::Json => rows.push(row),
        }
    }
    if format == Format::Json {
        emit(out, &json!({ "generator": seq.describe(), "s": s, "rows": rows, "consistent": consistent }))?;
    }
    Ok(if consistent { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn cmd_automaton(format: AutomatonFormat, out: &mut impl Write) -> CmdResult {
    match format {
        AutomatonFormat::Dot => write!(out, "{}", automaton_dot())?,
        AutomatonFormat::Json => {
            let edges: Vec<Value> =
                automaton_transitions().iter().map(|(a, b)| json!([a.to_string(), b.to_string()])).collect();
            emit(
                out,
                &json!({
                    "initial": initial_states(),
                    "edges": edges,
                    "loops": simple_loops(),
                    "unreachable": unreachable_states(),
                    "dead": dead_states(),
                }),
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_probe(goal: RelationId, k: usize, family: Family, max_exponent: u32, out: &mut impl Write) -> CmdResult {
    if k == 0 {
        return Err(Usage("--k must be positive".into()));
    }
    let s = SymbolicSeqRing::new(k);
    let e = symbolic_relation(&s, &goal)?;
    let rels: Vec<RelationId> = family_relations(family, k as i64);
    let outcome = nilpotency_probe(&s, &e, &rels, max_exponent)?;
    emit(
        out,
        &json!({
            "goal": goal.to_string(),
            "k": k,
            "family": family.to_string(),
            "generators": rels.len(),
            "result": outcome,
        }),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn relation(a: Half, b: Half, c: Half, d: Half) -> Result<RelationId, Usage> {
    Ok(RelationId::from_halves([a, b, c, d])?)
}

fn run(cli: Cli, out: &mut impl Write) -> CmdResult {
    match cli.command {
        Command::Gen { seq, upto, format } => cmd_gen(&seq, upto, format, out),
        Command::Check { seq, window, family, random, seed, format } => {
            cmd_check(&seq, window, family, random, seed, format, out)
        }
        Command::Derive { a, b, c, d, base, replay, seq } => cmd_derive(relation(a, b, c, d)?, base, replay, &seq, out),
        Command::Witness { m, n, specialize, ring } => cmd_witness(m, n, specialize.as_deref(), &ring, out),
        Command::Invariant { seq, s, upto, swart, format } => cmd_invariant(&seq, s, upto, swart, format, out),
        Command::Classify { seq, bound } => {
            let s = seq.build()?;
            emit(out, &serde_json::to_value(classify(&s, bound)?)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Automaton { format } => cmd_automaton(format, out),
        Command::Probe { a, b, c, d, k, family, max_exponent } => {
            cmd_probe(relation(a, b, c, d)?, k, family, max_exponent, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = match run(cli, &mut out) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            let _ = out.flush();
            eprintln!("eds: {msg}");
            ExitCode::from(1)
        }
    };
    let _ = out.flush();
    code
}
