use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use twist_torsion::certificate::claims::claim_threshold;
use twist_torsion::certificate::{
    bn_certificate, bn_inverse_certificate, identity_certificate, verify_by_trace, verify_certificate, verify_claim,
    CertificateRecord, RepEvidence, UnknownCause, VerificationResult, Verifier,
};
use twist_torsion::presentation::{eliminate_a, knot_group, twist_presentation, GroupPresentation, TwistKnotParams};
use twist_torsion::rep::{residual_threshold, solve_in, solve_representation, RepScalar, COMMUTATOR_FLOOR, DEFAULT_PRECISION};
use twist_torsion::rewrite::{knuth_bendix, KbLimits, TrivialityVerdict};
use twist_torsion::search::{search_with, transport, SearchBounds, SearchOptions};
use twist_torsion::word::bt::d;
use twist_torsion::word::{Alphabet, Scope, Word};

const CONFIRMED: u8 = 0;
const REFUTED: u8 = 1;
const UNKNOWN: u8 = 2;
const USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "twist-torsion", version, about = "Generalized torsion certificates for negative twist knot groups")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Word macro `NAME=expr`, usable in later macros and word arguments.
    #[arg(long = "let", global = true, value_name = "NAME=EXPR")]
    lets: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the presentation of the knot group.
    Present {
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        /// Eliminate `a` to get the one-relator presentation on `b t`.
        #[arg(long)]
        eliminate_a: bool,
    },
    /// Build a certificate and verify it.
    Cert {
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[arg(long, value_enum, default_value_t = TargetArg::Identity)]
        target: TargetArg,
        #[arg(long, value_enum, default_value_t = VerifyArg::Trace)]
        verify: VerifyArg,
        /// Include the proof trace in the output.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        rep: RepArgs,
    },
    /// Check the free-group claims for every n in a range.
    Claims {
        /// Inclusive range `A..B`.
        #[arg(long)]
        range: String,
    },
    /// Solve for a parabolic representation and test `D` against it.
    Rep {
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[command(flatten)]
        rep: RepArgs,
    },
    /// Search for a trivial product of conjugates of a candidate.
    Search {
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[arg(long, allow_hyphen_values = true)]
        candidate: String,
        /// Defaults to 2, or to the size of the transported certificate.
        #[arg(long)]
        max_conjugates: Option<usize>,
        /// Defaults to 3, or to the longest transported conjugator.
        #[arg(long)]
        max_length: Option<usize>,
        /// Do not try the transported identity certificate first.
        #[arg(long)]
        no_transport: bool,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Seed of the representation that ranks retry candidates.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        budget: Budget,
    },
    /// Reduce a word, and with `--n` decide it in the knot group.
    Word {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_negative_numbers = true)]
        n: Option<i64>,
        #[command(flatten)]
        budget: Budget,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TargetArg {
    Bn,
    Bninv,
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VerifyArg {
    Trace,
    Kb,
    Rep,
    All,
}

#[derive(Args, Debug, Clone, Copy)]
struct Budget {
    /// Rewrite budget: rules kept during completion.
    #[arg(long, default_value_t = KbLimits::default().max_rules)]
    max_rules: usize,
    /// Rewrite budget: longest rule left-hand side.
    #[arg(long, default_value_t = KbLimits::default().max_lhs_len)]
    max_lhs: usize,
    /// Rewrite budget: critical-pair iterations.
    #[arg(long, default_value_t = KbLimits::default().max_iterations)]
    max_iterations: usize,
}

impl Budget {
    fn limits(self) -> KbLimits {
        KbLimits { max_rules: self.max_rules, max_lhs_len: self.max_lhs, max_iterations: self.max_iterations }
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct RepArgs {
    /// Working precision in bits.
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Error, Debug)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

/// What a command prints and how it exits.
struct Outcome {
    code: u8,
    text: String,
    json: Value,
}

fn params(n: i64) -> Result<TwistKnotParams, CliError> {
    TwistKnotParams::new(n).map_err(usage)
}

fn scope<'a>(alphabet: &'a Alphabet, lets: &[String]) -> Result<Scope<'a>, CliError> {
    let mut scope = Scope::new(alphabet);
    // `D` is predefined unless the user rebinds it.
    if alphabet.is_bt() && !lets.iter().any(|l| l.trim_start().starts_with("D=") || l.trim_start().starts_with("D =")) {
        scope.define("D", d()).map_err(usage)?;
    }
    for l in lets {
        scope.define_binding(l).map_err(usage)?;
    }
    Ok(scope)
}

fn present(n: i64, eliminate: bool) -> Result<Outcome, CliError> {
    let p = params(n)?;
    let pres = if eliminate { eliminate_a(p).0 } else { twist_presentation(p) };
    let mut json = serde_json::to_value(pres.to_record()).expect("records serialize");
    json["n"] = json!(n);
    Ok(Outcome { code: CONFIRMED, text: pres.to_text(), json })
}

fn verdict_name(v: &VerificationResult) -> &'static str {
    match v {
        VerificationResult::Confirmed(_) => "confirmed",
        VerificationResult::Unknown(UnknownCause::Evidence(_)) => "evidence",
        VerificationResult::Unknown(UnknownCause::Rewrite(_)) => "unknown",
    }
}

fn evidence_json(e: &RepEvidence) -> Value {
    json!({
        "deviation": format!("{:e}", e.deviation),
        "bound": format!("{:e}", e.bound),
        "consistent": e.consistent,
    })
}

fn cert(n: i64, target: TargetArg, verify: VerifyArg, with_trace: bool, limits: KbLimits, rep: RepArgs) -> Result<Outcome, CliError> {
    let p = params(n)?;
    let cert = match target {
        TargetArg::Bn => bn_certificate(p),
        TargetArg::Bninv => bn_inverse_certificate(p),
        TargetArg::Identity => identity_certificate(p),
    };
    let record = CertificateRecord::from_certificate(&cert, with_trace);
    let bt = Alphabet::bt();
    let mut text = format!(
        "n = {n}, target {}: {} conjugates of D\nconjugators: {}\n",
        bt.format(&cert.target_word()),
        cert.product.len(),
        record.conjugators.join(" ")
    );
    let mut verdicts = serde_json::Map::new();
    let mut refuted = false;
    let mut unknown = false;

    if matches!(verify, VerifyArg::Trace | VerifyArg::All) {
        let (name, detail) = match verify_by_trace(&cert) {
            Ok(v) => (verdict_name(&v), format!("{} steps, {} base moves", cert.trace.len(), cert.trace.base_moves())),
            Err(e) => {
                refuted = true;
                ("failed", e.to_string())
            }
        };
        text += &format!("trace: {name} ({detail})\n");
        verdicts.insert("trace".into(), json!({ "verdict": name, "detail": detail }));
    }
    if matches!(verify, VerifyArg::Kb | VerifyArg::All) {
        let pres = knot_group(p);
        let system = knuth_bendix(&pres, limits);
        let v = verify_certificate::<f64>(&cert.product, &cert.target_word(), Verifier::Rewrite { system: &system })
            .expect("rewrite verification does not fail");
        unknown |= !v.is_confirmed();
        let name = verdict_name(&v);
        text += &format!("kb: {name} ({} rules, {:?})\n", system.rules().len(), system.status());
        verdicts.insert(
            "kb".into(),
            json!({ "verdict": name, "rules": system.rules().len(), "confluent": system.is_confluent() }),
        );
    }
    if matches!(verify, VerifyArg::Rep | VerifyArg::All) {
        let r = solve_representation(p, rep.precision, rep.seed).map_err(|e| CliError::Failed(e.to_string()))?;
        let v = verify_certificate(&cert.product, &cert.target_word(), Verifier::Representation { rep: &r })
            .expect("representation verification does not fail");
        if let VerificationResult::Unknown(UnknownCause::Evidence(e)) = &v {
            refuted |= !e.consistent;
            text += &format!(
                "rep: evidence, deviation {:e} against bound {:e} (seed {}, {} bits)\n",
                e.deviation, e.bound, rep.seed, rep.precision
            );
            let mut j = evidence_json(e);
            j["seed"] = json!(rep.seed);
            j["precision_bits"] = json!(rep.precision);
            verdicts.insert("rep".into(), j);
        }
    }
    let code = if refuted {
        REFUTED
    } else if unknown {
        UNKNOWN
    } else {
        CONFIRMED
    };
    let mut json = serde_json::to_value(&record).expect("records serialize");
    json["verification"] = Value::Object(verdicts);
    Ok(Outcome { code, text, json })
}

fn parse_range(s: &str) -> Result<(i64, i64), CliError> {
    let (a, b) = s.split_once("..").ok_or_else(|| usage(format!("range `{s}` is not of the form A..B")))?;
    let a: i64 = a.trim().parse().map_err(|_| usage(format!("bad range start `{a}`")))?;
    let b: i64 = b.trim().parse().map_err(|_| usage(format!("bad range end `{b}`")))?;
    if a > b || b < 1 {
        return Err(usage(format!("range `{s}` is empty")));
    }
    Ok((a.max(1), b))
}

fn claims(range: &str) -> Result<Outcome, CliError> {
    let (lo, hi) = parse_range(range)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut all = true;
    for n in lo..=hi {
        let mut line = format!("n = {n}:");
        for id in 1..=4u8 {
            if n < claim_threshold(id).expect("claims 1 to 4 exist") {
                continue;
            }
            let ok = verify_claim(id, n).expect("threshold checked");
            all &= ok;
            line += &format!(" claim {id} {}", if ok { "holds" } else { "FAILS" });
            rows.push(json!({ "n": n, "claim": id, "holds": ok }));
        }
        text += &line;
        text.push('\n');
    }
    let code = if all { CONFIRMED } else { REFUTED };
    Ok(Outcome { code, text, json: json!({ "range": [lo, hi], "results": rows, "all_hold": all }) })
}

fn rep(n: i64, args: RepArgs) -> Result<Outcome, CliError> {
    let p = params(n)?;
    let r = match solve_representation(p, args.precision, args.seed) {
        Ok(r) => r,
        Err(twist_torsion::rep::RepError::Precision(b)) => return Err(usage(format!("precision {b} is below 128 bits"))),
        Err(e) => {
            let text = format!("no representation: {e} (seed {})\n", args.seed);
            return Ok(Outcome { code: UNKNOWN, text, json: json!({ "n": n, "seed": args.seed, "error": e.to_string() }) });
        }
    };
    let threshold = residual_threshold(args.precision);
    let witnessed = r.distinguish_from_identity(&d(), COMMUTATOR_FLOOR).map_err(|e| CliError::Failed(e.to_string()))?;
    let dev = r.evaluate(&d()).distance_from_identity();
    let mut text = format!(
        "n = {n}, seed {}, {} bits\nresidual {:e} (threshold {threshold:e})\n|rho(D) - I| = {:e}\n",
        args.seed,
        r.precision_bits,
        r.residual_f64(),
        dev.to_f64()
    );
    text += if witnessed { "D is distinguished from the identity: D != 1\n" } else { "inconclusive\n" };
    let mut json = serde_json::to_value(r.to_record()).expect("records serialize");
    json["threshold"] = json!(format!("{threshold:e}"));
    json["d_deviation"] = json!(dev.to_decimal());
    json["d_nontrivial"] = json!(witnessed);
    let code = if witnessed && r.residual_f64() < threshold { CONFIRMED } else { UNKNOWN };
    Ok(Outcome { code, text, json })
}

#[allow(clippy::too_many_arguments)]
fn search_cmd(
    n: i64,
    candidate: &str,
    (m, len): (Option<usize>, Option<usize>),
    use_transport: bool,
    workers: usize,
    seed: u64,
    limits: KbLimits,
    lets: &[String],
) -> Result<Outcome, CliError> {
    let p = params(n)?;
    let pres: GroupPresentation = knot_group(p);
    let bt = Alphabet::bt();
    let cand = scope(&bt, lets)?.parse(candidate).map_err(usage)?;
    if cand.is_empty() {
        return Err(usage("candidate must be a nontrivial word"));
    }
    let hints = if use_transport { vec![identity_certificate(p).product] } else { Vec::new() };
    // Without explicit bounds, the box is the one the transported certificate needs.
    let fitted = hints.first().and_then(|h| transport(h, &cand)).map(|cp| {
        (cp.len(), cp.conjugators().iter().map(Word::len).max().unwrap_or(0))
    });
    let (m, len) = match fitted {
        Some((fm, fl)) => (m.unwrap_or(fm), len.unwrap_or(fl.max(1))),
        None => (m.unwrap_or(2), len.unwrap_or(3)),
    };
    let bounds = SearchBounds::new(m, len, limits).map_err(usage)?;
    let rank_with = solve_in::<f64>(p, 53, seed).ok();
    let result = search_with(&pres, &cand, &bounds, &SearchOptions { workers, rank_with, hints });
    let r = &result.report;
    let mut text = format!("candidate {} in <b, t | r({n})>\n", r.candidate);
    let code = if r.obstructed {
        text += "pruned: nonzero abelianized image, no product of conjugates is trivial\n";
        REFUTED
    } else if let Some(c) = &r.conjugators {
        let how = if r.transported { "transported" } else { "enumerated" };
        text += &format!("certificate found ({how}): conjugators {}\n", c.join(" "));
        CONFIRMED
    } else {
        text += "bounds exhausted without a certificate (inconclusive)\n";
        UNKNOWN
    };
    text += &format!(
        "tested {}, pruned {}, retried {}, {} s\n",
        r.tuples_tested, r.tuples_pruned, r.retried, r.elapsed_seconds
    );
    let mut json = serde_json::to_value(r).expect("reports serialize");
    json["n"] = json!(n);
    json["ranking_seed"] = json!(seed);
    Ok(Outcome { code, text, json })
}

fn word(expr: &str, n: Option<i64>, limits: KbLimits, lets: &[String]) -> Result<Outcome, CliError> {
    let bt = Alphabet::bt();
    let w: Word = scope(&bt, lets)?.parse(expr).map_err(usage)?;
    let shown = bt.format(&w);
    let mut text = format!("{shown}\nlength {}, exponent sums b {} t {}\n", w.len(), w.exponent_sum(0), w.exponent_sum(1));
    let mut json = json!({ "word": shown, "length": w.len(), "exponent_sums": [w.exponent_sum(0), w.exponent_sum(1)] });
    let mut code = CONFIRMED;
    if let Some(n) = n {
        let system = knuth_bendix(&knot_group(params(n)?), limits);
        let nf = system.normal_form(&w);
        let trivial = matches!(system.is_trivial(&w), TrivialityVerdict::Confirmed(_));
        text += &format!("normal form in <b, t | r({n})>: {}\n", bt.format(&nf));
        text += if trivial { "trivial in the group\n" } else { "not shown trivial (unknown)\n" };
        json["normal_form"] = json!(bt.format(&nf));
        json["trivial"] = json!(trivial);
        code = if trivial { CONFIRMED } else { UNKNOWN };
    }
    Ok(Outcome { code, text, json })
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    // Bad macros are usage errors even for commands that take no words.
    scope(&Alphabet::bt(), &cli.lets)?;
    match cli.command {
        Command::Present { n, eliminate_a } => present(n, eliminate_a),
        Command::Cert { n, target, verify, trace, budget, rep } => cert(n, target, verify, trace, budget.limits(), rep),
        Command::Claims { range } => claims(&range),
        Command::Rep { n, rep: args } => rep(n, args),
        Command::Search { n, candidate, max_conjugates, max_length, no_transport, workers, seed, budget } => {
            let box_ = (max_conjugates, max_length);
            search_cmd(n, &candidate, box_, !no_transport, workers, seed, budget.limits(), &cli.lets)
        }
        Command::Word { expr, n, budget } => word(&expr, n, budget.limits(), &cli.lets),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { CONFIRMED });
        }
    };
    let format = cli.format;
    match run(cli) {
        Ok(out) => {
            match format {
                Format::Text => print!("{}", out.text),
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("json values print")),
            }
            ExitCode::from(out.code)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(UNKNOWN)
        }
    }
}

