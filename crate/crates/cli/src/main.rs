//! `radixlab`: radix sort tree chains from the command line. Construction,
//! exact transition laws, harmonic quantities, seeded simulation, and the
//! brute-force verification suite.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain error (bad tree, measure,
//! or bounds), 3 verification failure.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use radixlab_core::laws;
use radixlab_core::oracle::{self, Scope};
use radixlab_core::prob::{rat_to_string, Rat};
use radixlab_core::rng::replica_rng;
use radixlab_core::simulate::{self, ChainPath};
use radixlab_core::strings::DEFAULT_PROBE_DEPTH;
use radixlab_core::{
    build_radix_tree, EventuallyPeriodic, Prob, RadixTree, SourceMeasure, Word,
};

#[derive(Parser)]
#[command(
    name = "radixlab",
    version,
    about = "Radix sort tree chains: exact laws, bridges, killed chains, verification"
)]
struct Cli {
    /// RNG seed (falls back to RADIXLAB_SEED, then 0)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Replica worker threads (default: one per core); results do not
    /// depend on this
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write output to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format (tabular commands emit CSV in text mode)
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the radix sort tree of eventually periodic strings
    Build {
        /// Comma-separated strings in `pre(period)` form, e.g. "0(0),01(1),1(1)"
        #[arg(long)]
        strings: String,
        /// Probe depth before two inputs are declared duplicates
        #[arg(long, default_value_t = DEFAULT_PROBE_DEPTH)]
        probe_cap: usize,
    },
    /// Exact transition laws
    Laws {
        #[command(subcommand)]
        law: LawCmd,
    },
    /// Harmonic/excessive quantities of a measure at a tree
    Harmonic {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        tree: String,
        /// Split-depth cap for the enumerated harmonicity deficit
        #[arg(long, default_value_t = 8)]
        split_cap: usize,
    },
    /// Sample forward chains (CSV: replica,step,tree)
    Simulate {
        #[arg(long)]
        measure: Option<String>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        replicas: u64,
        /// Also emit leaf labels by input index (CSV gains a labels column)
        #[arg(long)]
        labels: bool,
    },
    /// Sample bridges conditioned to end at a tree (CSV: replica,step,tree)
    Bridge {
        #[arg(long)]
        tree: String,
        #[arg(long, default_value_t = 1)]
        replicas: u64,
    },
    /// Run the killed chain for a measure with atoms (cemetery row: `+`)
    Killed {
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 1)]
        replicas: u64,
        #[arg(long, default_value_t = 64)]
        max_n: usize,
    },
    /// Kernel statistics K(s, R_k) along simulated chains (CSV: k,mean,sd)
    Convergence {
        #[arg(long)]
        measure: Option<String>,
        #[arg(long)]
        tree: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        replicas: u64,
        /// Comma-separated checkpoints (default: powers of two up to n)
        #[arg(long)]
        checkpoints: Option<String>,
    },
    /// Estimate cylinder masses from leaf frequencies
    /// (CSV: cylinder,estimate,exact,abs_error)
    Recover {
        #[arg(long)]
        measure: Option<String>,
        #[arg(long, default_value_t = 5000)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        replicas: u64,
        /// All cylinders up to this depth
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// List all tree shapes with n leaves and bounded depth
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        depth_cap: usize,
    },
    /// Run the definitional recheck (exit 3 on any mismatch)
    Verify {
        /// Measure to verify (default: fair coin, bernoulli(1/3), and the
        /// two-atom 1/3-2/3 measure)
        #[arg(long)]
        measure: Option<String>,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long, default_value_t = 4)]
        depth_max: usize,
    },
    /// Demonstrate the four two-atom measures with identical killed chains
    Counterexample {
        /// Monte-Carlo replicas confirming the exact path laws (0 = skip)
        #[arg(long, default_value_t = 10_000)]
        replicas: u64,
    },
}

#[derive(Subcommand)]
enum LawCmd {
    /// P{R_n = tree}
    Marginal {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        measure: Option<String>,
    },
    /// P{R_{n+1} = to | R_n = from}
    Forward {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        measure: Option<String>,
    },
    /// P{R_n = from | R_{n+1} = to} (measure-free)
    Backward {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// The ratio kernel K(from, to)
    Kernel {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Green kernel G(from, to) under the fair coin
    Green {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        depth_cap: Option<usize>,
    },
}

struct Outcome {
    output: String,
    code: i32,
}

fn ok(output: String) -> anyhow::Result<Outcome> {
    Ok(Outcome { output, code: 0 })
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match dispatch(&cli) {
        Ok(outcome) => {
            let result = match &cli.out {
                Some(path) => fs::write(path, outcome.output.as_bytes())
                    .with_context(|| format!("writing {}", path.display())),
                None => {
                    print!("{}", outcome.output);
                    Ok(())
                }
            };
            match result {
                Ok(()) => outcome.code,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    2
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn seed_of(cli: &Cli) -> u64 {
    cli.seed
        .or_else(|| {
            std::env::var("RADIXLAB_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0)
}

fn parse_measure(spec: &str) -> anyhow::Result<SourceMeasure> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        fs::read_to_string(spec).with_context(|| format!("reading measure file {spec}"))?
    };
    serde_json::from_str(&text).with_context(|| "parsing measure JSON")
}

fn measure_or_fair_coin(spec: &Option<String>) -> anyhow::Result<SourceMeasure> {
    match spec {
        Some(s) => parse_measure(s),
        None => Ok(SourceMeasure::fair_coin()),
    }
}

fn parse_tree(spec: &str) -> anyhow::Result<RadixTree> {
    spec.parse::<RadixTree>()
        .with_context(|| format!("parsing tree {spec:?}"))
}

/// Floats are printed with up to 12 significant digits.
fn fmt_f64(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp10 = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp10) {
        let decimals = (11 - exp10).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// A scalar result: plain value in text mode, {"value": ...} in JSON.
fn scalar(format: Format, value: &Rat) -> anyhow::Result<Outcome> {
    match format {
        Format::Json => ok(format!(
            "{}\n",
            serde_json::json!({ "value": rat_to_string(value) })
        )),
        _ => ok(format!("{}\n", rat_to_string(value))),
    }
}

fn paths_output(format: Format, paths: &[ChainPath], with_labels: bool) -> anyhow::Result<Outcome> {
    if format == Format::Json {
        let arr: Vec<serde_json::Value> = paths
            .iter()
            .map(|p| {
                serde_json::json!({
                    "trees": p.trees().iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                    "killed": p.killed(),
                    "labels": p.labels().map(|ls| ls
                        .iter()
                        .map(|step| step.iter().map(|w| w.to_string()).collect::<Vec<_>>())
                        .collect::<Vec<_>>()),
                })
            })
            .collect();
        return ok(format!("{}\n", serde_json::json!({ "paths": arr })));
    }
    let mut out = String::new();
    if with_labels {
        out.push_str("replica,step,tree,labels\n");
    } else {
        out.push_str("replica,step,tree\n");
    }
    for (r, path) in paths.iter().enumerate() {
        for (i, t) in path.trees().iter().enumerate() {
            let tree = csv_field(&t.to_string());
            if with_labels {
                let labels = path.labels().map_or(String::new(), |ls| {
                    ls[i].iter()
                        .map(|w| w.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                });
                writeln!(out, "{r},{},{tree},{}", i + 1, csv_field(&labels)).unwrap();
            } else {
                writeln!(out, "{r},{},{tree}", i + 1).unwrap();
            }
        }
        if path.killed() {
            if with_labels {
                writeln!(out, "{r},{},+,", path.len() + 1).unwrap();
            } else {
                writeln!(out, "{r},{},+", path.len() + 1).unwrap();
            }
        }
    }
    ok(out)
}

fn dispatch(cli: &Cli) -> anyhow::Result<Outcome> {
    let seed = seed_of(cli);
    let format = cli.format;
    match &cli.cmd {
        Cmd::Build { strings, probe_cap } => {
            let inputs = strings
                .split(',')
                .map(|s| s.trim().parse::<EventuallyPeriodic>())
                .collect::<Result<Vec<_>, _>>()?;
            let tree = build_radix_tree(&inputs, *probe_cap)?;
            match format {
                Format::Json => ok(format!("{}\n", serde_json::to_string(&tree)?)),
                _ => ok(format!("{tree}\n")),
            }
        }
        Cmd::Laws { law } => run_law(law, format),
        Cmd::Harmonic {
            measure,
            tree,
            split_cap,
        } => {
            let nu = parse_measure(measure)?;
            let s = parse_tree(tree)?;
            let h = laws::h_nu(&nu, &s);
            let deficit = laws::harmonic_deficit(&nu, &s, *split_cap);
            let eta = laws::riesz_eta(&nu, &s);
            let th = laws::theta(&nu, &s);
            let total = laws::theta_total_mass(&nu).ok();
            if format == Format::Json {
                return ok(format!(
                    "{}\n",
                    serde_json::json!({
                        "tree": s.to_string(),
                        "h": rat_to_string(&h),
                        "deficit": rat_to_string(&deficit),
                        "split_cap": split_cap,
                        "eta": rat_to_string(&eta),
                        "theta": rat_to_string(&th),
                        "theta_total": total.map(|t| t.to_string()),
                        "diffuse": nu.is_diffuse(),
                    })
                ));
            }
            let mut out = String::new();
            writeln!(out, "tree: {s}").unwrap();
            writeln!(out, "h: {}", rat_to_string(&h)).unwrap();
            writeln!(
                out,
                "deficit (splits <= {split_cap}): {}",
                rat_to_string(&deficit)
            )
            .unwrap();
            writeln!(out, "eta: {}", rat_to_string(&eta)).unwrap();
            writeln!(out, "theta: {}", rat_to_string(&th)).unwrap();
            match total {
                Some(t) => writeln!(out, "theta total mass: {t}").unwrap(),
                None => writeln!(out, "theta total mass: n/a (measure has a diffuse part)").unwrap(),
            }
            ok(out)
        }
        Cmd::Simulate {
            measure,
            n,
            replicas,
            labels,
        } => {
            let nu = measure_or_fair_coin(measure)?;
            let mut paths = Vec::new();
            for r in 0..*replicas {
                let rng = &mut replica_rng(seed, r);
                let path = if *labels {
                    simulate::sample_labeled_chain_with(&nu, *n, rng)?.0
                } else {
                    simulate::sample_chain_with(&nu, *n, rng)?
                };
                paths.push(path);
            }
            paths_output(format, &paths, *labels)
        }
        Cmd::Bridge { tree, replicas } => {
            let t = parse_tree(tree)?;
            let mut paths = Vec::new();
            for r in 0..*replicas {
                paths.push(simulate::sample_bridge_with(&t, &mut replica_rng(seed, r))?);
            }
            paths_output(format, &paths, false)
        }
        Cmd::Killed {
            measure,
            replicas,
            max_n,
        } => {
            let nu = parse_measure(measure)?;
            let mut paths = Vec::new();
            for r in 0..*replicas {
                paths.push(simulate::sample_killed_chain_with(
                    &nu,
                    *max_n,
                    &mut replica_rng(seed, r),
                )?);
            }
            paths_output(format, &paths, false)
        }
        Cmd::Convergence {
            measure,
            tree,
            n,
            replicas,
            checkpoints,
        } => {
            let nu = measure_or_fair_coin(measure)?;
            let s = parse_tree(tree)?;
            let ks = match checkpoints {
                Some(list) => list
                    .split(',')
                    .map(|x| x.trim().parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .with_context(|| "parsing checkpoints")?,
                None => simulate::default_checkpoints(*n),
            };
            let rows = simulate::kernel_convergence(&nu, &s, *n, *replicas, seed, &ks)?;
            if format == Format::Json {
                let arr: Vec<serde_json::Value> = rows
                    .iter()
                    .map(|r| serde_json::json!({ "k": r.k, "mean": r.mean, "sd": r.sd }))
                    .collect();
                return ok(format!("{}\n", serde_json::json!({ "points": arr })));
            }
            let mut out = String::from("k,mean,sd\n");
            for r in rows {
                writeln!(out, "{},{},{}", r.k, fmt_f64(r.mean), fmt_f64(r.sd)).unwrap();
            }
            ok(out)
        }
        Cmd::Recover {
            measure,
            n,
            replicas,
            depth,
        } => {
            let nu = measure_or_fair_coin(measure)?;
            let ys = words_to_depth(*depth);
            let rows = simulate::estimate_cylinders(&nu, *n, *replicas, seed, &ys)?;
            if format == Format::Json {
                let arr: Vec<serde_json::Value> = rows
                    .iter()
                    .map(|e| {
                        serde_json::json!({
                            "cylinder": e.y.to_string(),
                            "estimate": e.estimate,
                            "exact": e.exact,
                        })
                    })
                    .collect();
                return ok(format!("{}\n", serde_json::json!({ "estimates": arr })));
            }
            let mut out = String::from("cylinder,estimate,exact,abs_error\n");
            for e in rows {
                writeln!(
                    out,
                    "{},{},{},{}",
                    e.y,
                    fmt_f64(e.estimate),
                    fmt_f64(e.exact),
                    fmt_f64((e.estimate - e.exact).abs())
                )
                .unwrap();
            }
            ok(out)
        }
        Cmd::Enumerate { n, depth_cap } => {
            let shapes = oracle::enumerate_shapes(*n, *depth_cap)?;
            if format == Format::Json {
                let arr: Vec<String> = shapes.iter().map(|t| t.to_string()).collect();
                return ok(format!("{}\n", serde_json::json!({ "trees": arr })));
            }
            let mut out = String::new();
            for t in shapes {
                writeln!(out, "{t}").unwrap();
            }
            ok(out)
        }
        Cmd::Verify {
            measure,
            n_max,
            depth_max,
        } => {
            let scope = Scope {
                n_max: *n_max,
                depth_max: *depth_max,
            };
            let measures = match measure {
                Some(spec) => vec![parse_measure(spec)?],
                None => vec![
                    SourceMeasure::fair_coin(),
                    SourceMeasure::bernoulli(Prob::from_ratio(1, 3)).unwrap(),
                    radixlab_core::measure::two_atom_measure(
                        "(0)",
                        Prob::from_ratio(1, 3),
                        "(1)",
                    ),
                ],
            };
            let mut all_passed = true;
            let mut reports = Vec::new();
            for nu in &measures {
                let report = oracle::definitional_recheck(nu, scope)?;
                all_passed &= report.passed;
                reports.push(report);
            }
            let output = if format == Format::Json {
                format!("{}\n", serde_json::to_string_pretty(&reports)?)
            } else {
                let mut out = String::new();
                for report in &reports {
                    writeln!(out, "measure: {}", report.measure).unwrap();
                    for id in &report.identities {
                        writeln!(
                            out,
                            "  {}: {} instances, {} mismatches [{}]",
                            id.identity,
                            id.instances,
                            id.mismatches,
                            if id.mismatches == 0 { "pass" } else { "FAIL" }
                        )
                        .unwrap();
                    }
                    for m in &report.mismatches {
                        writeln!(
                            out,
                            "  MISMATCH {} at {}: expected {}, got {}",
                            m.identity, m.instance, m.expected, m.actual
                        )
                        .unwrap();
                    }
                }
                writeln!(
                    out,
                    "verification {}",
                    if all_passed { "passed" } else { "FAILED" }
                )
                .unwrap();
                out
            };
            Ok(Outcome {
                output,
                code: if all_passed { 0 } else { 3 },
            })
        }
        Cmd::Counterexample { replicas } => counterexample(format, seed, *replicas),
    }
}

fn run_law(law: &LawCmd, format: Format) -> anyhow::Result<Outcome> {
    match law {
        LawCmd::Marginal { tree, measure } => {
            let nu = measure_or_fair_coin(measure)?;
            let t = parse_tree(tree)?;
            scalar(format, &laws::marginal_law(&nu, &t).into_rat())
        }
        LawCmd::Forward { from, to, measure } => {
            let nu = measure_or_fair_coin(measure)?;
            scalar(
                format,
                &laws::forward_prob(&nu, &parse_tree(from)?, &parse_tree(to)?).into_rat(),
            )
        }
        LawCmd::Backward { from, to } => scalar(
            format,
            &laws::backward_prob(&parse_tree(from)?, &parse_tree(to)?).into_rat(),
        ),
        LawCmd::Kernel { from, to } => scalar(
            format,
            &laws::dm_kernel(&parse_tree(from)?, &parse_tree(to)?),
        ),
        LawCmd::Green {
            from,
            to,
            depth_cap,
        } => {
            let s = parse_tree(from)?;
            let t = parse_tree(to)?;
            let cap = depth_cap.unwrap_or_else(|| s.max_leaf_depth().max(t.max_leaf_depth()));
            scalar(format, &laws::green_kernel(&s, &t, cap)?.into_rat())
        }
    }
}

fn words_to_depth(depth: usize) -> Vec<Word> {
    let mut out = vec![Word::root()];
    let mut level = vec![Word::root()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &level {
            next.push(w.child(0));
            next.push(w.child(1));
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// The four two-atom measures with identical killed chains: exact path laws,
/// shared transform values, and an optional Monte-Carlo confirmation.
fn counterexample(format: Format, seed: u64, replicas: u64) -> anyhow::Result<Outcome> {
    use radixlab_core::measure::two_atom_measure;

    let measures = [
        ("1/3 at (0), 2/3 at (1)", two_atom_measure("(0)", Prob::from_ratio(1, 3), "(1)")),
        ("1/3 at 0(1), 2/3 at 1(0)", two_atom_measure("0(1)", Prob::from_ratio(1, 3), "1(0)")),
        ("2/3 at (0), 1/3 at (1)", two_atom_measure("(0)", Prob::from_ratio(2, 3), "(1)")),
        ("2/3 at 0(1), 1/3 at 1(0)", two_atom_measure("0(1)", Prob::from_ratio(2, 3), "1(0)")),
    ];
    let root = RadixTree::trivial();
    let pair: RadixTree = "0,1".parse().unwrap();

    let mut rows = Vec::new();
    for (i, (name, nu)) in measures.iter().enumerate() {
        let short = laws::killed_path_law(nu, std::slice::from_ref(&root))?;
        let long = laws::killed_path_law(nu, &[root.clone(), pair.clone()])?;
        let h_pair = laws::h_nu(nu, &pair);
        let total = laws::theta_total_mass(nu)?;
        let (mc_short, mc_long) = if replicas > 0 {
            let freqs =
                simulate::killed_path_frequencies(nu, replicas, seed.wrapping_add(i as u64), 8)?;
            let f = |key: &str| {
                freqs
                    .iter()
                    .find(|(k, _)| k == key)
                    .map(|(_, v)| *v)
                    .unwrap_or(0.0)
            };
            (Some(f("e+")), Some(f("e|0,1+")))
        } else {
            (None, None)
        };
        rows.push((name, short, long, h_pair, total, mc_short, mc_long));
    }

    if format == Format::Json {
        let arr: Vec<serde_json::Value> = rows
            .iter()
            .map(|(name, short, long, h, total, mc_s, mc_l)| {
                serde_json::json!({
                    "measure": name,
                    "p_die_at_2": short.to_string(),
                    "p_pair_then_die": long.to_string(),
                    "h_pair": rat_to_string(h),
                    "theta_total": total.to_string(),
                    "mc_die_at_2": mc_s,
                    "mc_pair_then_die": mc_l,
                })
            })
            .collect();
        return ok(format!(
            "{}\n",
            serde_json::json!({ "replicas": replicas, "seed": seed, "measures": arr })
        ));
    }

    let mut out = String::new();
    writeln!(
        out,
        "measure,p_die_at_2,p_pair_then_die,h_pair,theta_total,mc_die_at_2,mc_pair_then_die"
    )
    .unwrap();
    for (name, short, long, h, total, mc_s, mc_l) in &rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            csv_field(name),
            short,
            long,
            rat_to_string(h),
            total,
            mc_s.map_or(String::new(), fmt_f64),
            mc_l.map_or(String::new(), fmt_f64),
        )
        .unwrap();
    }
    ok(out)
}
