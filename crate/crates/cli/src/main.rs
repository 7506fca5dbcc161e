//! `normtower` — batch queries against iterated wreath-product towers:
//! config validation, element evaluation, membership / normalizer / quotient
//! queries, the brute-force oracle, randomized property suites, and
//! strict-growth reports.
//!
//! Exit codes: 0 success, 1 domain errors (bad configs, precondition
//! failures, failed checks), 2 usage errors.

use clap::{Parser, Subcommand};
use normtower_core::normtheory::{
    self, member_h, quotient, quotient_section, witness_non_normalizing,
};
use normtower_core::oracle::{run_oracle_suite, OracleMode, OracleOptions};
use normtower_core::ordinal::parse_ordinal;
use normtower_core::report::build_report;
use normtower_core::suite::{run_suite, SuiteOptions};
use normtower_core::tower::{format_element, TowerConfig, TowerElement};
use normtower_core::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "normtower",
    version,
    about = "Normalizer towers of iterated wreath products"
)]
struct Cli {
    /// Tower configuration file (JSON)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Emit machine-readable JSON on stdout
    #[arg(long, global = true)]
    json: bool,

    /// Include the membership trace in `member` output
    #[arg(long, global = true)]
    explain: bool,

    /// Seed for randomized commands
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Iteration count for randomized commands
    #[arg(long, global = true, value_name = "N")]
    iters: Option<u64>,

    /// Enumeration cap for the oracle
    #[arg(long, global = true, value_name = "N")]
    cap: Option<u128>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the configuration file and print its shape
    CheckConfig,
    /// Evaluate an element expression: literals combined with `*`, postfix
    /// `^-1`, and parentheses
    Eval { expr: String },
    /// Decide membership of an element in H_beta
    Member {
        #[arg(long, value_name = "ORD")]
        beta: String,
        element: String,
    },
    /// Decide whether an element normalizes H_beta
    Normalizes {
        #[arg(long, value_name = "ORD")]
        beta: String,
        element: String,
    },
    /// Produce a verified witness that an element fails to normalize H_beta
    Witness {
        #[arg(long, value_name = "ORD")]
        beta: String,
        element: String,
    },
    /// Map a member of H_{beta+1} to its image in G_beta
    Quotient {
        #[arg(long, value_name = "ORD")]
        beta: String,
        element: String,
    },
    /// Enumerate a finite tower and run the brute-force checks
    Oracle {
        /// Force sampled conjugation checks instead of the full double loop
        #[arg(long)]
        sampled: bool,
        /// Restrict the inner conjugation loop to a generating set of H_beta
        #[arg(long)]
        generators_only: bool,
    },
    /// Run the randomized property suites against the configuration
    Fuzz,
    /// Emit the strict-growth report over the probe set of levels
    Report,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load_config(cli: &Cli) -> Result<TowerConfig, Error> {
    let Some(path) = &cli.config else {
        // missing --config is a usage problem, not a domain failure
        eprintln!("error: --config <PATH> is required for this command");
        std::process::exit(2);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    TowerConfig::from_json_str(&text)
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::CheckConfig => {
            if cli.json {
                println!("{}", cfg.to_json());
            } else {
                println!("ok: alpha = {}, base = {}", cfg.alpha(), cfg.base());
                for iv in cfg.assignment() {
                    println!("  [{}, {}) -> {}", iv.lo, iv.hi, iv.group);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval { expr } => {
            let value = eval_expr(&cfg, expr)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "element": format_element(&value),
                        "level": value.level().to_string(),
                    })
                );
            } else {
                println!("{}", format_element(&value));
                println!("level: {}", value.level());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Member { beta, element } => {
            let beta = parse_ordinal(beta)?;
            let x = cfg.parse_element(element)?;
            let (verdict, trace) = member_h(&cfg, &beta, &x)?;
            if cli.json {
                let mut out = serde_json::json!({ "beta": beta.to_string(), "member": verdict });
                if cli.explain {
                    out["trace"] =
                        serde_json::to_value(&trace).map_err(|e| Error::Config(e.to_string()))?;
                }
                println!("{out}");
            } else {
                println!("{verdict}");
                if cli.explain {
                    for step in &trace.steps {
                        println!("  level {}: {}", step.level, step.rule);
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Normalizes { beta, element } => {
            let beta = parse_ordinal(beta)?;
            let x = cfg.parse_element(element)?;
            let verdict = normtheory::is_normalizing(&cfg, &beta, &x)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({ "beta": beta.to_string(), "normalizes": verdict })
                );
            } else {
                println!("{verdict}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Witness { beta, element } => {
            let beta = parse_ordinal(beta)?;
            let x = cfg.parse_element(element)?;
            let w = witness_non_normalizing(&cfg, &beta, &x)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "beta": w.beta.to_string(),
                        "x": format_element(&w.x),
                        "l": format_element(&w.l),
                        "conjugate": format_element(&w.conjugate),
                        "verdicts": {
                            "x_outside_next": w.x_outside_next,
                            "l_in_h": w.l_in_h,
                            "conjugate_outside_h": w.conjugate_outside_h,
                        },
                    })
                );
            } else {
                println!("beta: {}", w.beta);
                println!("x: {}", format_element(&w.x));
                println!("l: {}", format_element(&w.l));
                println!("conjugate: {}", format_element(&w.conjugate));
                println!(
                    "verdicts: x outside H_{}: {}; l in H_{}: {}; conjugate outside H_{}: {}",
                    w.beta.succ(),
                    w.x_outside_next,
                    w.beta,
                    w.l_in_h,
                    w.beta,
                    w.conjugate_outside_h
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Quotient { beta, element } => {
            let beta = parse_ordinal(beta)?;
            let x = cfg.parse_element(element)?;
            let image = quotient(&cfg, &beta, &x)?;
            let group = cfg.group_at(&beta)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "beta": beta.to_string(),
                        "group": group.to_string(),
                        "quotient": normtower_core::basegroup::format_base_value(&image),
                        "section": format_element(&quotient_section(&cfg, &beta, &image)?),
                    })
                );
            } else {
                println!("{}", normtower_core::basegroup::format_base_value(&image));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle {
            sampled,
            generators_only,
        } => {
            let mode = if *sampled {
                OracleMode::Sampled {
                    seed: cli.seed.unwrap_or(42),
                    iterations: cli.iters.unwrap_or(10_000),
                }
            } else {
                OracleMode::Auto
            };
            let opts = OracleOptions {
                cap: cli.cap.unwrap_or(normtower_core::oracle::DEFAULT_CAP),
                mode,
                generators_only: *generators_only,
            };
            let report = run_oracle_suite(&cfg, &opts)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_value(&report).map_err(|e| Error::Config(e.to_string()))?
                );
            } else {
                println!(
                    "oracle: alpha = {}, |K| = {}, mode = {}{}",
                    report.alpha,
                    report.k_order,
                    report.mode,
                    if report.generators_only {
                        ", generators-only"
                    } else {
                        ""
                    }
                );
                for b in &report.per_beta {
                    let normalizer = match b.normalizer_size {
                        Some(n) => format!("N_K(H_{}) has {n} elements", b.beta),
                        None => format!(
                            "{} sampled pairs, {} witnesses",
                            b.sampled_pairs.unwrap_or(0),
                            b.witnesses_verified.unwrap_or(0)
                        ),
                    };
                    println!(
                        "  beta = {}: |H| = {} (expected {}), {normalizer}, match: {}, quotient: {} cosets, isomorphic: {}",
                        b.beta,
                        b.h_size,
                        b.h_size_expected,
                        b.normalizer_match,
                        b.quotient_cosets,
                        b.quotient_iso
                    );
                    for m in &b.mismatch_examples {
                        println!("    mismatch: {m}");
                    }
                }
                println!(
                    "  mul cross-check: {} pairs ({}), failures: {}",
                    report.mul_check.pairs,
                    if report.mul_check.exhaustive {
                        "exhaustive"
                    } else {
                        "sampled"
                    },
                    report.mul_check.failures.len()
                );
                for (stage, ms) in &report.timings_ms {
                    eprintln!("  timing {stage}: {ms} ms");
                }
                println!(
                    "result: {}",
                    if report.all_passed() { "PASS" } else { "FAIL" }
                );
            }
            Ok(if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Fuzz => {
            let opts = SuiteOptions {
                seed: cli.seed.unwrap_or(42),
                iterations: cli.iters.unwrap_or(1000),
                ..SuiteOptions::default()
            };
            let summary = run_suite(&cfg, &opts)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_value(&summary).map_err(|e| Error::Config(e.to_string()))?
                );
            } else {
                println!(
                    "fuzz: seed = {}, iterations = {}",
                    summary.seed, summary.iterations
                );
                for p in &summary.properties {
                    if p.failure_count == 0 {
                        println!("  {:<28} {} ok", p.name, p.runs);
                    } else {
                        println!("  {:<28} {} FAILURES", p.name, p.failure_count);
                        for f in &p.failures {
                            println!("    {f}");
                        }
                    }
                }
            }
            Ok(if summary.is_clean() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Report => {
            let report = build_report(&cfg, 3)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_value(&report).map_err(|e| Error::Config(e.to_string()))?
                );
            } else {
                println!("tower report: alpha = {}", report.alpha);
                for row in &report.rows {
                    println!(
                        "  beta = {}: G = {}, witness = {}, in H_{}: {}, outside H_{}: {}, quotient roundtrip: {} [{}]",
                        row.beta,
                        row.group,
                        row.witness,
                        row.beta.succ(),
                        row.in_next,
                        row.beta,
                        row.outside_current,
                        row.quotient_roundtrip,
                        if row.strict { "strict" } else { "NOT STRICT" }
                    );
                }
                println!(
                    "group-level length: {} ({} probes{})",
                    report.alpha,
                    report.probes,
                    if report.length_is_alpha {
                        ", all strict"
                    } else {
                        ", growth gaps found"
                    }
                );
            }
            Ok(if report.length_is_alpha {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

// --- element expressions --------------------------------------------------
//
// expr   := factor ("*" factor)*
// factor := primary ("^-1")*
// primary := "(" expr ")" | element-literal
//
// Element literals start with `b` or `{` and run to their matching closing
// bracket; they are handed to the element grammar verbatim.

struct ExprParser<'a> {
    cfg: &'a TowerConfig,
    text: &'a str,
    pos: usize,
}

fn eval_expr(cfg: &TowerConfig, text: &str) -> Result<TowerElement, Error> {
    let mut p = ExprParser { cfg, text, pos: 0 };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.text.len() {
        return Err(Error::Syntax(format!(
            "trailing input in expression at byte {}",
            p.pos
        )));
    }
    Ok(v)
}

impl<'a> ExprParser<'a> {
    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(|c: char| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn expr(&mut self) -> Result<TowerElement, Error> {
        let mut acc = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = self.cfg.mul(&acc, &rhs)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<TowerElement, Error> {
        let mut v = self.primary()?;
        loop {
            self.skip_ws();
            if self.text[self.pos..].starts_with("^-1") {
                self.pos += 3;
                v = self.cfg.inv(&v)?;
            } else {
                return Ok(v);
            }
        }
    }

    fn primary(&mut self) -> Result<TowerElement, Error> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(Error::Syntax(format!("expected ')' at byte {}", self.pos)));
                }
                self.pos += 1;
                Ok(v)
            }
            Some('b') | Some('{') => {
                let lit = self.take_literal()?;
                self.cfg.parse_element(lit)
            }
            _ => Err(Error::Syntax(format!(
                "expected an element literal or '(' at byte {}",
                self.pos
            ))),
        }
    }

    /// Slice out one balanced element literal starting at the cursor.
    fn take_literal(&mut self) -> Result<&'a str, Error> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.text.as_bytes();
        let mut stack: Vec<u8> = Vec::new();
        let mut i = self.pos;
        while i < bytes.len() {
            match bytes[i] {
                b'(' | b'[' | b'{' => stack.push(bytes[i]),
                b')' | b']' | b'}' => {
                    let expected = match bytes[i] {
                        b')' => b'(',
                        b']' => b'[',
                        _ => b'{',
                    };
                    if stack.pop() != Some(expected) {
                        return Err(Error::Syntax(format!(
                            "unbalanced brackets in element literal at byte {i}"
                        )));
                    }
                }
                _ => {}
            }
            i += 1;
            if stack.is_empty() && i > start + 1 {
                break;
            }
        }
        if !stack.is_empty() {
            return Err(Error::Syntax(
                "unterminated element literal in expression".into(),
            ));
        }
        self.pos = i;
        Ok(&self.text[start..i])
    }
}
