use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use chebknot::engine::{probability, ExactProbability, ProbabilityRecord};
use chebknot::rational::{move_free_words, profile};
use chebknot::report::{write_distribution_csv, write_sample_csv, KnotClassRecord, TraceRecord};
use chebknot::sampler::{compare, exact_for, exact_from_distribution, sample_distribution};
use chebknot::{classify, enumerate_distribution, parse_word, reduce, verify_engine, KnotClass, KnotError, NameTable};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "chebknot",
    version,
    about = "Random 2-bridge knots on Chebyshev billiard diagrams T(3, n+1)"
)]
struct Cli {
    /// Output format (defaults to csv for enumerate, sample and table, text otherwise)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Suppress notes on stderr
    #[arg(long, global = true)]
    quiet: bool,

    /// Knot name table ("alpha beta_min name" lines) replacing the bundled one
    #[arg(long, global = true)]
    names: Option<PathBuf>,

    /// Worker threads for enumeration and sampling (0 = one per core)
    #[arg(long, env = "CHEBKNOT_THREADS", default_value_t = 0, hide_env_values = true)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a sign word such as "+-+-"
    Classify {
        #[arg(allow_hyphen_values = true)]
        word: String,
    },
    /// Show the reduction trace of a sign word
    Reduce {
        #[arg(allow_hyphen_values = true)]
        word: String,
    },
    /// Reduced lengths, multiplicities, crossing number and move-free words of a knot
    KnotInfo {
        #[arg(allow_hyphen_values = true)]
        knot: String,
    },
    /// Exact probability of a knot for one n or an inclusive range "A..B"
    Prob {
        #[arg(long, allow_hyphen_values = true)]
        knot: String,
        #[arg(long)]
        n: String,
    },
    /// Probabilities for n = 3i and 3i+1, i <= i_max
    Table {
        /// Comma-separated knot specs
        #[arg(long, value_delimiter = ',', default_value = "unknot,3_1,4_1,5_1,5_2,6_1,6_2,6_3")]
        knots: Vec<String>,
        #[arg(long, default_value_t = 24)]
        i_max: usize,
    },
    /// Exact distribution of knot classes over all 2^n words
    Enumerate {
        #[arg(long)]
        n: usize,
    },
    /// Monte Carlo distribution with z-scores against exact values
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Compare engine, enumeration and filtration identities for all n <= n_max
    Check {
        #[arg(long, default_value_t = 18)]
        n_max: usize,
    },
}

enum Failure {
    Input(String),
    Check(String),
}

impl From<KnotError> for Failure {
    fn from(e: KnotError) -> Self {
        if e.is_internal() {
            Failure::Check(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

struct Output {
    body: String,
    /// Set when a check ran to completion but found a discrepancy.
    failed: bool,
}

impl Output {
    fn ok(body: String) -> Self {
        Output { body, failed: false }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Only fails if a global pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out.body) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("internal check failed: {msg}");
            ExitCode::from(1)
        }
    }
}

fn emit(cli: &Cli, body: &str) -> std::io::Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, body),
        None => std::io::stdout().write_all(body.as_bytes()),
    }
}

fn note(cli: &Cli, msg: &str) {
    if !cli.quiet {
        eprintln!("{msg}");
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let names = match &cli.names {
        Some(path) => NameTable::load(path)?,
        None => NameTable::bundled(),
    };
    let text_default = cli.format.unwrap_or(Format::Text);
    let csv_default = cli.format.unwrap_or(Format::Csv);
    match &cli.command {
        Command::Classify { word } => cmd_classify(word, &names, text_default).map(Output::ok),
        Command::Reduce { word } => cmd_reduce(word, text_default).map(Output::ok),
        Command::KnotInfo { knot } => cmd_knot_info(knot, &names, text_default).map(Output::ok),
        Command::Prob { knot, n } => cmd_prob(knot, n, &names, text_default).map(Output::ok),
        Command::Table { knots, i_max } => cmd_table(cli, knots, *i_max, &names, csv_default).map(Output::ok),
        Command::Enumerate { n } => cmd_enumerate(*n, &names, csv_default).map(Output::ok),
        Command::Sample { n, trials, seed } => cmd_sample(cli, *n, *trials, *seed, &names, csv_default),
        Command::Check { n_max } => cmd_check(*n_max, text_default),
    }
}

fn json_string(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn csv_line(fields: &[String]) -> String {
    let quoted: Vec<String> = fields
        .iter()
        .map(|f| {
            if f.contains([',', '"', '\n']) {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.clone()
            }
        })
        .collect();
    format!("{}\n", quoted.join(","))
}

fn class_label(k: &KnotClass, names: &NameTable) -> String {
    match names.name(k) {
        Some(name) => format!("{name} ({k})"),
        None => k.to_string(),
    }
}

fn trace_text(t: &chebknot::ReductionTrace) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "initial  {}", display_word(&t.initial.to_string()));
    for step in &t.steps {
        let _ = writeln!(
            s,
            "  {:<10} -> {}",
            step.mv.to_string(),
            display_word(&step.result.to_string())
        );
    }
    let _ = writeln!(
        s,
        "final    {} ({} moves)",
        display_word(&t.fin.to_string()),
        t.steps.len()
    );
    s
}

fn display_word(w: &str) -> String {
    if w.is_empty() {
        "(empty)".to_string()
    } else {
        w.to_string()
    }
}

fn cmd_classify(word: &str, names: &NameTable, format: Format) -> Result<String, Failure> {
    let w = parse_word(word)?;
    let k = classify(&w)?;
    let trace = reduce(&w);
    Ok(match format {
        Format::Text => format!("class    {}\n{}", class_label(&k, names), trace_text(&trace)),
        Format::Json => json_string(&json!({
            "word": word,
            "class": KnotClassRecord::new(&k, names),
            "trace": TraceRecord::from(&trace),
        })),
        Format::Csv => {
            csv_line(&["word", "alpha", "beta", "name", "final"].map(String::from))
                + &csv_line(&[
                    word.to_string(),
                    k.alpha.to_string(),
                    k.beta.to_string(),
                    names.name(&k).unwrap_or("").to_string(),
                    trace.fin.to_string(),
                ])
        }
    })
}

fn cmd_reduce(word: &str, format: Format) -> Result<String, Failure> {
    let trace = reduce(&parse_word(word)?);
    Ok(match format {
        Format::Text => trace_text(&trace),
        Format::Json => json_string(&serde_json::to_value(TraceRecord::from(&trace)).expect("serializable")),
        Format::Csv => {
            let rec = TraceRecord::from(&trace);
            let mut s = csv_line(&["step", "kind", "position", "result"].map(String::from));
            for (i, st) in rec.steps.iter().enumerate() {
                s += &csv_line(&[
                    (i + 1).to_string(),
                    st.kind.to_string(),
                    st.position.to_string(),
                    st.result.clone(),
                ]);
            }
            s
        }
    })
}

fn cmd_knot_info(spec: &str, names: &NameTable, format: Format) -> Result<String, Failure> {
    let k = names.resolve(spec)?;
    let p = profile(&k)?;
    let words = move_free_words(&k)?;
    Ok(match format {
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "knot     {}", class_label(&k, names));
            let _ = writeln!(s, "N        {}", p.crossing_number);
            let _ = writeln!(s, "ell0     {}  r = {}", p.ell0, p.r0);
            let _ = writeln!(s, "ell1     {}  r = {}", p.ell1, p.r1);
            for (len, ws) in &words {
                let list: Vec<String> = ws.iter().map(|w| display_word(&w.to_string())).collect();
                let _ = writeln!(s, "words({len}) {}", list.join(" "));
            }
            s
        }
        Format::Json => {
            let words: serde_json::Map<String, serde_json::Value> = words
                .iter()
                .map(|(l, ws)| {
                    (
                        l.to_string(),
                        json!(ws.iter().map(|w| w.to_string()).collect::<Vec<_>>()),
                    )
                })
                .collect();
            json_string(&json!({
                "class": KnotClassRecord::new(&k, names),
                "crossing_number": p.crossing_number,
                "ell0": p.ell0,
                "ell1": p.ell1,
                "r0": p.r0,
                "r1": p.r1,
                "move_free_words": words,
            }))
        }
        Format::Csv => {
            csv_line(&["alpha", "beta", "name", "crossing_number", "ell0", "r0", "ell1", "r1"].map(String::from))
                + &csv_line(&[
                    k.alpha.to_string(),
                    k.beta.to_string(),
                    names.name(&k).unwrap_or("").to_string(),
                    p.crossing_number.to_string(),
                    p.ell0.to_string(),
                    p.r0.to_string(),
                    p.ell1.to_string(),
                    p.r1.to_string(),
                ])
        }
    })
}

/// `"N"` or an inclusive range `"A..B"`; lengths `≡ 2 (mod 3)` are skipped in ranges.
fn parse_n_spec(spec: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Input(format!("invalid n {spec:?}: expected N or A..B"));
    if let Some((a, b)) = spec.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        Ok((a..=b).filter(|n| n % 3 != 2).collect())
    } else {
        Ok(vec![spec.trim().parse().map_err(|_| bad())?])
    }
}

fn prob_csv_header() -> String {
    csv_line(&["knot", "alpha", "beta", "n", "numerator", "log2_denominator", "value"].map(String::from))
}

fn prob_csv_row(p: &ExactProbability, names: &NameTable) -> String {
    csv_line(&[
        names.label(&p.knot),
        p.knot.alpha.to_string(),
        p.knot.beta.to_string(),
        p.n.to_string(),
        p.numerator.to_string(),
        p.n.to_string(),
        format!("{:e}", p.value),
    ])
}

fn prob_text_row(p: &ExactProbability, names: &NameTable) -> String {
    let denom = num_bigint_pow2(p.n);
    format!(
        "{:<8} n={:<4} {}/{}  {:.12e}\n",
        names.label(&p.knot),
        p.n,
        p.numerator,
        denom,
        p.value
    )
}

fn num_bigint_pow2(n: usize) -> String {
    // 2^n as a decimal string without pulling num-bigint into this crate
    let mut digits = vec![1u8];
    for _ in 0..n {
        let mut carry = 0;
        for d in digits.iter_mut() {
            let v = *d * 2 + carry;
            *d = v % 10;
            carry = v / 10;
        }
        if carry > 0 {
            digits.push(carry);
        }
    }
    digits.iter().rev().map(|d| char::from(b'0' + d)).collect()
}

fn cmd_prob(spec: &str, n_spec: &str, names: &NameTable, format: Format) -> Result<String, Failure> {
    let k = names.resolve(spec)?;
    let p = profile(&k)?;
    let ns = parse_n_spec(n_spec)?;
    let single = !n_spec.contains("..");
    let rows = ns.iter().map(|&n| probability(&p, n)).collect::<Result<Vec<_>, _>>()?;
    Ok(match format {
        Format::Text => rows.iter().map(|r| prob_text_row(r, names)).collect(),
        Format::Csv => prob_csv_header() + &rows.iter().map(|r| prob_csv_row(r, names)).collect::<String>(),
        Format::Json => {
            let recs: Vec<ProbabilityRecord> = rows.iter().map(|r| r.record(names)).collect();
            if single {
                json_string(&serde_json::to_value(&recs[0]).expect("serializable"))
            } else {
                json_string(&serde_json::to_value(&recs).expect("serializable"))
            }
        }
    })
}

/// Word lengths `3i` (i >= 1) and `3i + 1` (i >= 0) up to `i_max`, paired with `i`.
fn table_lengths(i_max: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..=i_max {
        if i > 0 {
            out.push((i, 3 * i));
        }
        out.push((i, 3 * i + 1));
    }
    out
}

fn cmd_table(cli: &Cli, specs: &[String], i_max: usize, names: &NameTable, format: Format) -> Result<String, Failure> {
    let mut results: Vec<(usize, ExactProbability)> = Vec::new();
    let mut decay = String::new();
    for spec in specs {
        let k = names.resolve(spec)?;
        let p = profile(&k)?;
        let mut engine = chebknot::ExactEngine::new(p.clone());
        let mut first_below = [None::<usize>; 2];
        for (i, n) in table_lengths(i_max) {
            let prob = if n >= 6 {
                ExactProbability::new(k.clone(), n, engine.numerator(n)?)?
            } else {
                probability(&p, n)?
            };
            for (slot, threshold) in first_below.iter_mut().zip([1e-1, 1e-2]) {
                if slot.is_none() && prob.value > 0.0 && prob.value < threshold {
                    *slot = Some(n);
                }
            }
            results.push((i, prob));
        }
        let show = |v: Option<usize>| v.map_or("not reached".to_string(), |n| format!("n={n}"));
        let _ = writeln!(
            decay,
            "# {}: first P < 1e-1 at {}, first P < 1e-2 at {}",
            names.label(&k),
            show(first_below[0]),
            show(first_below[1])
        );
    }
    Ok(match format {
        Format::Csv => {
            note(cli, decay.trim_end());
            let mut s = csv_line(
                &[
                    "knot",
                    "alpha",
                    "beta",
                    "i",
                    "n",
                    "numerator",
                    "log2_denominator",
                    "value",
                ]
                .map(String::from),
            );
            for (i, p) in &results {
                s += &csv_line(&[
                    names.label(&p.knot),
                    p.knot.alpha.to_string(),
                    p.knot.beta.to_string(),
                    i.to_string(),
                    p.n.to_string(),
                    p.numerator.to_string(),
                    p.n.to_string(),
                    format!("{:e}", p.value),
                ]);
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (i, p) in &results {
                let _ = writeln!(
                    s,
                    "{:<8} i={:<3} n={:<4} {:.12e}",
                    names.label(&p.knot),
                    i,
                    p.n,
                    p.value
                );
            }
            s + &decay
        }
        Format::Json => {
            let recs: Vec<serde_json::Value> = results
                .iter()
                .map(|(i, p)| {
                    let mut v = serde_json::to_value(p.record(names)).expect("serializable");
                    v["i"] = json!(i);
                    v
                })
                .collect();
            json_string(&json!(recs))
        }
    })
}

fn cmd_enumerate(n: usize, names: &NameTable, format: Format) -> Result<String, Failure> {
    let d = enumerate_distribution(n)?;
    Ok(match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_distribution_csv(&d, names, &mut buf)?;
            String::from_utf8(buf).expect("CSV is UTF-8")
        }
        Format::Text => {
            let mut s = format!("n = {n}, {} words, {} classes\n", d.total(), d.counts.len());
            for (k, c) in &d.counts {
                let _ = writeln!(s, "{:<16} {c}", class_label(k, names));
            }
            s
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = d
                .counts
                .iter()
                .map(|(k, c)| json!({"class": KnotClassRecord::new(k, names), "count": c.to_string()}))
                .collect();
            json_string(&json!({"n": n, "counts": rows}))
        }
    })
}

fn cmd_sample(
    cli: &Cli,
    n: usize,
    trials: u64,
    seed: u64,
    names: &NameTable,
    format: Format,
) -> Result<Output, Failure> {
    let e = sample_distribution(n, trials, seed)?;
    let exact = if n <= 18 {
        exact_from_distribution(&enumerate_distribution(n)?)
    } else {
        exact_for(&e, &[])?
    };
    let cmp = compare(&e, &exact);
    let body = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_sample_csv(&e, &cmp, names, &mut buf)?;
            String::from_utf8(buf).expect("CSV is UTF-8")
        }
        Format::Text => {
            let mut s = format!("n = {n}, trials = {trials}, seed = {seed}\n");
            for r in &cmp.rows {
                let _ = writeln!(
                    s,
                    "{:<16} count={:<9} phat={:.6} p={:.6} z={:+.3}{}",
                    class_label(&r.knot, names),
                    r.count,
                    r.phat,
                    r.p,
                    r.z,
                    if r.flagged { "  FLAGGED" } else { "" }
                );
            }
            s
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = cmp
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "class": KnotClassRecord::new(&r.knot, names),
                        "count": r.count, "p": r.p, "phat": r.phat,
                        "z": if r.z.is_finite() { json!(r.z) } else { json!(r.z.to_string()) },
                        "flagged": r.flagged,
                    })
                })
                .collect();
            json_string(&json!({"n": n, "trials": trials, "seed": seed, "rows": rows}))
        }
    };
    let flagged = cmp.flagged().count();
    if flagged > 0 {
        note(cli, &format!("{flagged} class(es) beyond |z| > 4"));
    }
    Ok(Output {
        body,
        failed: flagged > 0,
    })
}

fn cmd_check(n_max: usize, format: Format) -> Result<Output, Failure> {
    let report = verify_engine(n_max)?;
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    let body = match format {
        Format::Json => json_string(&json!({
            "n_max": n_max,
            "lines": report.lines,
            "mismatches": report.mismatches,
            "result": verdict,
        })),
        Format::Text | Format::Csv => {
            let mut s = String::new();
            for l in report.lines.iter().chain(&report.mismatches) {
                let _ = writeln!(s, "{l}");
            }
            let _ = writeln!(s, "{verdict}");
            s
        }
    };
    Ok(Output {
        body,
        failed: !report.passed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_specs() {
        assert_eq!(parse_n_spec("6").ok(), Some(vec![6]));
        assert_eq!(parse_n_spec("6..10").ok(), Some(vec![6, 7, 9, 10]));
        assert!(parse_n_spec("10..6").is_err());
        assert!(parse_n_spec("x").is_err());
    }

    #[test]
    fn powers_of_two() {
        assert_eq!(num_bigint_pow2(0), "1");
        assert_eq!(num_bigint_pow2(6), "64");
        assert_eq!(num_bigint_pow2(70), "1180591620717411303424");
    }

    #[test]
    fn table_lengths_skip_zero() {
        assert_eq!(table_lengths(2), vec![(0, 1), (1, 3), (1, 4), (2, 6), (2, 7)]);
    }
}
