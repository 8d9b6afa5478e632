//! Command-line front end: parse shift documents, run analyses, emit
//! deterministic JSON/CSV reports.
//!
//! Exit codes: 0 = all verdicts hold (or none), 1 = some verdict fails,
//! 2 = some verdict inconclusive, 3 = usage/input error, 4 = internal error.

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use subshift::alphabet::Word;
use subshift::analysis::{
    build_spanning_set, check_almost_spec, check_specification, hamming_ball, min_mistakes_left,
    AlmostSpecMode, Horizon,
};
use subshift::cache::CountCache;
use subshift::counterexample::{
    audit_counterexample, build_counterexample, check_ras_loglog, greedy_spanning_source,
    verify_constructive_witnesses, SCALE_CAVEAT,
};
use subshift::doc::ShiftSpecDocument;
use subshift::entropy::{
    bound_audit, empirical_measure, entropy_report, periodic_orbit_measure, periodic_points,
    sft_mme, transfer_matrix, MeasureValue,
};
use subshift::report::{
    bound_audit_table, counterexample_table, entropy_table, fmt_f64, obstruction_table, Report,
    Table,
};
use subshift::structure::{
    build_gluing, check_closure_conditions, check_irreducible, core_length_gcd,
    measure_center_approx, obstruction_report,
};
use subshift::{make_shift, MistakeFunction, Shift};

#[derive(Parser)]
#[command(name = "subshift", version, about = "Finite-horizon symbolic dynamics workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Thread count for parallel sweeps (default: all cores). Reports are
    /// byte-identical regardless.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Count-cache directory (or set SUBSHIFT_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,

    /// Include wall-clock timing in the report (breaks byte-for-byte
    /// reproducibility across runs).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate L_n and report counts (optionally the words).
    Enumerate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        /// Include the word list in the report (and the cache).
        #[arg(long)]
        words: bool,
    },
    /// Entropy estimate sweep with subadditivity audit.
    Entropy {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        n_max: usize,
    },
    /// Specification check at a fixed gap length.
    CheckSpec {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        tau: usize,
        #[arg(long, value_parser = parse_horizon)]
        horizon: Horizon,
    },
    /// Almost specification (all segments perturbed).
    CheckAs {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_parser = parse_g)]
        g: MistakeFunction,
        #[arg(long, value_parser = parse_horizon)]
        horizon: Horizon,
        #[arg(long, default_value_t = 3)]
        segments: usize,
    },
    /// Left almost specification (perturb the left word).
    CheckLas {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_parser = parse_g)]
        g: MistakeFunction,
        #[arg(long, value_parser = parse_horizon)]
        horizon: Horizon,
    },
    /// Right almost specification (perturb the right word).
    CheckRas {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_parser = parse_g)]
        g: MistakeFunction,
        #[arg(long, value_parser = parse_horizon)]
        horizon: Horizon,
    },
    /// Minimal left-perturbation radius joining two words.
    MinMistakes {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Hamming ball of a word within the language.
    Ball {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long)]
        radius: usize,
    },
    /// Build the gluing data and verify the gluing law and closure
    /// conditions.
    Glue {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        horizon: usize,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Classification sweep: obstruction collections and their growth.
    Decompose {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        n_max: usize,
    },
    /// Finite-horizon measure-center approximation.
    MeasureCenter {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_parser = parse_g)]
        g: MistakeFunction,
        #[arg(long)]
        search_len: usize,
        #[arg(long)]
        n_max: usize,
    },
    /// Irreducibility with per-pair witness gaps.
    Irreducible {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        gap_bound: usize,
    },
    /// Periodic points, the periodic-orbit measure, and (for SFTs) the TV
    /// distance to the Parry measure.
    Periodic {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        period: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Transfer matrix and Parry measure of an irreducible SFT.
    Mme {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Counting-bound audits (polynomial upper bound, suffix counts, Gibbs
    /// fit).
    AuditBounds {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n_max: usize,
        /// Suffix word for the lower-bound sweep.
        #[arg(long)]
        word: Option<String>,
        /// Entropy override; defaults to the exact SFT value or the running
        /// infimum estimate (flagged).
        #[arg(long)]
        entropy: Option<f64>,
    },
    /// Greedy Hamming covering code over the full word cube.
    Spanning {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        radius: usize,
    },
    /// The double-log coded construction.
    Counterexample {
        #[command(subcommand)]
        action: CounterexampleAction,
    },
}

#[derive(Subcommand)]
enum CounterexampleAction {
    /// Build generators and report their sizes.
    Build {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
    /// Audit every counting inequality with achieved values.
    Audit {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
    /// One-sided almost specification with the double-log budget.
    Ras {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, value_parser = parse_horizon, default_value = "6,6")]
        horizon: Horizon,
    },
}

fn parse_horizon(s: &str) -> Result<Horizon, String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => {
            let left = a.trim().parse().map_err(|e| format!("bad horizon: {e}"))?;
            let right = b.trim().parse().map_err(|e| format!("bad horizon: {e}"))?;
            Ok(Horizon::new(left, right))
        }
        [a] => {
            let n = a.trim().parse().map_err(|e| format!("bad horizon: {e}"))?;
            Ok(Horizon::new(n, n))
        }
        _ => Err("horizon must be N or N,M".into()),
    }
}

fn parse_g(s: &str) -> Result<MistakeFunction, String> {
    MistakeFunction::parse(s).map_err(|e| e.to_string())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            std::process::exit(3);
        }
    }
    let started = std::time::Instant::now();
    match run(&cli) {
        Ok(mut report) => {
            if cli.timings {
                report.timing_ms = Some(started.elapsed().as_millis());
            }
            let text = match cli.format {
                Format::Json => report.to_json(),
                Format::Csv => {
                    let mut out = String::new();
                    for t in &report.tables {
                        out.push_str(&format!("# table: {}\n", t.name));
                        out.push_str(&t.to_csv());
                        out.push('\n');
                    }
                    out
                }
            };
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: {e}");
                    std::process::exit(4);
                }
            } else {
                print!("{text}");
            }
            std::process::exit(report.exit_code());
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = if e.to_string().contains("internal") { 4 } else { 3 };
            std::process::exit(code);
        }
    }
}

fn load_shift(path: &Path) -> anyhow::Result<Shift> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let doc = ShiftSpecDocument::parse(&text)?;
    Ok(make_shift(doc.to_spec()?)?)
}

fn parse_word(shift: &Shift, s: &str) -> anyhow::Result<Word> {
    let a = shift.alphabet();
    if a.single_char() {
        Ok(a.word_from_str(s)?)
    } else {
        let symbols: Vec<String> = s.split(',').map(|t| t.trim().to_string()).collect();
        Ok(a.word_from_symbols(&symbols)?)
    }
}

fn cache_for(cli: &Cli) -> anyhow::Result<Option<CountCache>> {
    let dir = cli
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("SUBSHIFT_CACHE_DIR").map(PathBuf::from));
    Ok(match dir {
        Some(d) => Some(CountCache::with_dir(&d)?),
        None => None,
    })
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    match &cli.command {
        Command::Enumerate { spec, n, words } => {
            let shift = load_shift(spec)?;
            let cache = cache_for(cli)?;
            let mut report = Report::new("enumerate");
            report.fingerprint = Some(shift.fingerprint().to_string());
            report.param("n", n);
            let slice = subshift::language::enumerate(&shift, *n)?;
            if let Some(cache) = &cache {
                cache.count(&shift, *n)?;
                if *words {
                    cache.store_words(&shift, *n, slice.words())?;
                }
            }
            let mut t = Table::new("counts", &["n", "certain", "possible", "approximate"]);
            t.push_row(vec![
                n.to_string(),
                slice.count_certain().to_string(),
                slice.count_possible().to_string(),
                slice.approximate().to_string(),
            ]);
            report.tables.push(t);
            if *words {
                let mut wt = Table::new("words", &["word"]);
                for w in slice.words() {
                    wt.push_row(vec![shift.alphabet().render(w)]);
                }
                report.tables.push(wt);
            }
            if slice.approximate() {
                report.note("counts are a lower approximation; oracle is horizon-limited");
            }
            Ok(report)
        }
        Command::Entropy { spec, n_max } => {
            let shift = load_shift(spec)?;
            let cache = cache_for(cli)?;
            let mut report = Report::new("entropy");
            report.fingerprint = Some(shift.fingerprint().to_string());
            report.param("n_max", n_max);
            let er = entropy_report(&shift, *n_max, cache.as_ref())?;
            if let Some(exact) = er.exact {
                report.param("exact_entropy", fmt_f64(exact));
            }
            report.param("subadditive_ok", er.subadditive_ok);
            if er.approximate {
                report.note("estimates built from certain counts only");
            }
            report.tables.push(entropy_table(&er));
            Ok(report)
        }
        Command::CheckSpec { spec, tau, horizon } => {
            let shift = load_shift(spec)?;
            let mut report = Report::new("check-spec");
            report.fingerprint = Some(shift.fingerprint().to_string());
            let v = check_specification(&shift, *tau, *horizon)?;
            report.verdicts.push(v);
            Ok(report)
        }
        Command::CheckAs {
            spec,
            g,
            horizon,
            segments,
        } => {
            let shift = load_shift(spec)?;
            let mut report = Report::new("check-as");
            report.fingerprint = Some(shift.fingerprint().to_string());
            let v = check_almost_spec(&shift, g, AlmostSpecMode::As { segments: *segments }, *horizon)?;
            report.verdicts.push(v);
            Ok(report)
        }
        Command::CheckLas { spec, g, horizon } => {
            let shift = load_shift(spec)?;
            let mut report = Report::new("check-las");
            report.fingerprint = Some(shift.fingerprint().to_string());
            let v = check_almost_spec(&shift, g, AlmostSpecMode::Las, *horizon)?;
            report.verdicts.push(v);
            Ok(report)
        }
        Command::CheckRas { spec, g, horizon } => {
            let shift = load_shift(spec)?;
            let mut report = Report::new("check-ras");
            report.fingerprint = Some(shift.fingerprint().to_string());
            let v = check_almost_spec(&shift, g, AlmostSpecMode::Ras, *horizon)?;
            report.verdicts.push(v);
            Ok(report)
        }
        Command::MinMistakes { spec, left, right } => {
            let shift = load_shift(spec)?;
            let l = parse_word(&shift, left)?;
            let r = parse_word(&shift, right)?;
            let mut report = Report::new("min-mistakes");
            report.fingerprint = Some(shift.fingerprint().to_string());
            let m = min_mistakes_left(&shift, &l, &r)?;
            let mut t = Table::new("min-mistakes", &["left", "right", "mistakes", "witness"]);
            t.push_row(vec![
                left.clone(),
                right.clone(),
                m.mistakes.map(|v| v.to_string()).unwrap_or("none".into()),
                m.witness
                    .map(|w| shift.alphabet().render(&w))
                    .unwrap_or_default(),
            ]);
            report.tables.push(t);
            Ok(report)
        }
        Command::Ball { spec, word, radius } => {
            let shift = load_shift(spec)?;
            let w = parse_word(&shift, word)?;
            let mut report = Report::new("ball");
            report.fingerprint = Some(shift.fingerprint().to_string());
            report.param("radius", radius);
            let ball = hamming_ball(&shift, &w, *radius)?;
            let mut t = Table::new("ball", &["word", "distance"]);
            for v in &ball {
                t.push_row(vec![shift.alphabet().render(v), v.hamming(&w).to_string()]);
            }
            report.tables.push(t);
            Ok(report)
        }
        Command::Glue {
            spec,
            horizon,
            samples,
            seed,
        } => {
            let shift = load_shift(spec)?;
            let mut report = Report::new("glue");
            report.fingerprint = Some(shift.fingerprint().to_string());
            report.param("horizon", horizon);
            let glue = build_gluing(&shift, *horizon)?;
            let a = shift.alphabet();
            let mut t = Table::new("gluing", &["field", "value"]);
            t.push_row(vec!["mistakes".into(), glue.mistakes.to_string()]);
            t.push_row(vec!["tail".into(), a.render(&glue.tail)]);
            t.push_row(vec!["anchor0".into(), a.render(&glue.anchor0)]);
            t.push_row(vec!["stem".into(), a.render(&glue.stem)]);
            t.push_row(vec!["anchor".into(), a.render(&glue.anchor)]);
            t.push_row(vec!["probe".into(), a.render(&glue.probe)]);
            t.push_row(vec!["bridge".into(), a.render(&glue.bridge)]);
            t.push_row(vec![
                "candidates".into(),
                glue.candidates
                    .iter()
                    .map(|w| a.render(w))
                    .collect::<Vec<_>>()
                    .join(" "),
            ]);
            t.push_row(vec![
                "chain_sizes".into(),
                glue.chain
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
            ]);
            report.tables.push(t);
            let law_ok = glue.verify_glue_law(&shift, *horizon, *horizon)?;
            report.param("glue_law_ok", law_ok);
            if !law_ok {
                return Err(anyhow!("internal: gluing law failed verification"));
            }
            let closure = check_closure_conditions(&shift, &glue, *samples, *seed)?;
            report.verdicts.push(closure);
            if let Some(g) = core_length_gcd(&shift, &glue, *horizon * 2)? {
                report.param("core_length_gcd", g);
            }
            Ok(report)
        }
        Command::Decompose { spec, horizon, n_max } => {
            let shift = load_shift(spec)?;
            let mut report = Report::new("decompose");
            report.fingerprint = Some(shift.fingerprint().to_string());
            report.param("horizon", horizon);
            report.param("n_max", n_max);
            let glue = build_gluing(&shift, *horizon)?;
            let or = obstruction_report(&shift, &glue, *n_max)?;
            let partition_ok = or.rows.iter().all(|r| r.core + r.split + r.blocked == r.total);
            let bounds_ok = or.rows.iter().all(|r| r.convolution_bound_ok);
            report.param("partition_ok", partition_ok);
            report.param("convolution_bounds_ok", bounds_ok);
            report.param("union_estimate", fmt_f64(or.union_estimate));
            report.param("language_estimate", fmt_f64(or.language_estimate));
            report.tables.push(obstruction_table(&or));
            if !partition_ok || !bounds_ok {
                return Err(anyhow!("internal: decomposition identities failed"));
            }
            Ok(report)
        }
        Command::MeasureCenter {
            spec,
            g,
            search_len,
            n_max,
        } => {
            let shift = load_shift(spec)?;
            let mut report = Report::new("measure-center");
            report.fingerprint = Some(shift.fingerprint().to_string());
            report.param("g", g.describe());
            report.param("search_len", search_len);
            let mc = measure_center_approx(&shift, g, *search_len, *n_max)?;
            let mut t = Table::new("measure-center", &["n", "kept", "flagged", "kept_words"]);
            for (i, (kept, flagged)) in mc.kept.iter().zip(mc.flagged.iter()).enumerate() {
                let shown = if kept.len() <= 16 {
                    kept.iter()
                        .map(|w| shift.alphabet().render(w))
                        .collect::<Vec<_>>()
                        .join(" ")
                } else {
                    String::new()
                };
                t.push_row(vec![
                    (i + 1).to_string(),
                    kept.len().to_string(),
                    flagged.len().to_string(),
                    shown,
                ]);
            }
            report.tables.push(t);
            report.note("kept sets approximate the measure-center language; short searches over-flag obstructions");
            Ok(report)
        }
        Command::Irreducible {
            spec,
            horizon,
            gap_bound,
        } => {
            let shift = load_shift(spec)?;
            let mut report = Report::new("irreducible");
            report.fingerprint = Some(shift.fingerprint().to_string());
            let r = check_irreducible(&shift, *horizon, *gap_bound)?;
            let mut t = Table::new("witness-gaps", &["left", "right", "gap", "connector"]);
            for (u, v, c) in &r.witnesses {
                t.push_row(vec![
                    shift.alphabet().render(u),
                    shift.alphabet().render(v),
                    c.len().to_string(),
                    shift.alphabet().render(c),
                ]);
            }
            report.tables.push(t);
            report.verdicts.push(r.verdict);
            Ok(report)
        }
        Command::Periodic { spec, period, depth } => {
            let shift = load_shift(spec)?;
            let mut report = Report::new("periodic");
            report.fingerprint = Some(shift.fingerprint().to_string());
            report.param("period", period);
            let pts = periodic_points(&shift, *period)?;
            report.param("count", pts.words.len());
            report.param("exact", pts.exact);
            if !pts.exact {
                report.note("periodization is horizon-limited for this family");
            }
            let mut t = Table::new("periodic-words", &["word"]);
            for w in &pts.words {
                t.push_row(vec![shift.alphabet().render(w)]);
            }
            report.tables.push(t);
            if !pts.words.is_empty() {
                let mu = periodic_orbit_measure(&shift, *period)?;
                let mut mt = Table::new("orbit-measure", &["cylinder", "probability"]);
                for n in 1..=*depth {
                    let slice = subshift::language::enumerate(&shift, n)?;
                    for w in slice.words() {
                        let value = match mu.eval(w)? {
                            MeasureValue::Exact(r) => format!("{}/{}", r.numer(), r.denom()),
                            MeasureValue::Float(x) => fmt_f64(x),
                        };
                        mt.push_row(vec![shift.alphabet().render(w), value]);
                    }
                }
                report.tables.push(mt);
                if let Ok(mme) = sft_mme(&shift) {
                    let tv = mu.tv_distance(&mme.measure, &shift, *depth)?;
                    report.param("tv_to_parry", fmt_f64(tv));
                }
            }
            Ok(report)
        }
        Command::Mme { spec, depth } => {
            let shift = load_shift(spec)?;
            let mut report = Report::new("mme");
            report.fingerprint = Some(shift.fingerprint().to_string());
            let mme = sft_mme(&shift)?;
            report.param("lambda", fmt_f64(mme.transfer.lambda));
            report.param("entropy", fmt_f64(mme.transfer.lambda.ln()));
            report.param("markov_entropy", fmt_f64(mme.markov_entropy));
            report.param("residual", fmt_f64(mme.transfer.residual));
            let mut t = Table::new("cylinders", &["word", "probability"]);
            for n in 1..=*depth {
                let slice = subshift::language::enumerate(&shift, n)?;
                for w in slice.words() {
                    t.push_row(vec![
                        shift.alphabet().render(w),
                        fmt_f64(mme.measure.eval_f64(w)?),
                    ]);
                }
            }
            report.tables.push(t);
            // cross-oracle: empirical window frequencies of a long slice
            let n = (4 * *depth).clamp(12, 20);
            let slice = subshift::language::enumerate(&shift, n)?;
            let emp = empirical_measure(slice.words(), *depth.min(&(n / 2)))?;
            let tv = emp.tv_distance(&mme.measure, &shift, *depth.min(&(n / 2)))?;
            report.param("empirical_tv", fmt_f64(tv));
            Ok(report)
        }
        Command::AuditBounds {
            spec,
            m,
            n_max,
            word,
            entropy,
        } => {
            let shift = load_shift(spec)?;
            let cache = cache_for(cli)?;
            let mut report = Report::new("audit-bounds");
            report.fingerprint = Some(shift.fingerprint().to_string());
            let (h, exact) = match entropy {
                Some(h) => (*h, false),
                None => match transfer_matrix(&shift) {
                    Ok(t) => (t.lambda.ln(), true),
                    Err(_) => {
                        let er = entropy_report(&shift, *n_max, cache.as_ref())?;
                        let h = er.rows.last().map(|r| r.inf_so_far).unwrap_or(0.0);
                        (h, false)
                    }
                },
            };
            report.param("entropy", fmt_f64(h));
            report.param("entropy_exact", exact);
            if !exact {
                report.note("entropy is a running-infimum estimate; bound checks are evidence only");
            }
            let w = word
                .as_ref()
                .map(|s| parse_word(&shift, s))
                .transpose()?;
            let measure = sft_mme(&shift).ok().map(|m| m.measure);
            let audit = bound_audit(
                &shift,
                *m,
                h,
                exact,
                *n_max,
                w.as_ref(),
                measure.as_ref(),
                cache.as_ref(),
            )?;
            report.param("violations", audit.violations);
            if let Some(s) = &audit.suffix {
                report.param("suffix_epsilon", fmt_f64(s.epsilon));
                let mut st = Table::new("suffix-counts", &["n", "count"]);
                for (n, c) in &s.rows {
                    st.push_row(vec![n.to_string(), c.to_string()]);
                }
                report.tables.push(st);
            }
            if let Some(gb) = &audit.gibbs {
                report.param("gibbs_q1", fmt_f64(gb.q1));
            }
            report.tables.insert(0, bound_audit_table(&audit));
            Ok(report)
        }
        Command::Spanning { spec, n, radius } => {
            let shift = load_shift(spec)?;
            let mut report = Report::new("spanning");
            report.fingerprint = Some(shift.fingerprint().to_string());
            let s = build_spanning_set(shift.alphabet(), *n, *radius)?;
            report.param("achieved", s.words.len());
            report.param("bound", fmt_f64(s.bound));
            report.param("verified_exhaustive", s.verified_exhaustive);
            let mut t = Table::new("spanning-words", &["word"]);
            for w in &s.words {
                t.push_row(vec![shift.alphabet().render(w)]);
            }
            report.tables.push(t);
            Ok(report)
        }
        Command::Counterexample { action } => run_counterexample(action),
    }
}

fn run_counterexample(action: &CounterexampleAction) -> anyhow::Result<Report> {
    match action {
        CounterexampleAction::Build { n, n_max } => {
            let mut source = greedy_spanning_source(*n);
            let spec = build_counterexample(*n, *n_max, &mut source)?;
            let mut report = Report::new("counterexample-build");
            report.fingerprint = Some(spec.shift.fingerprint().to_string());
            report.param("half_alphabet", n);
            report.param("n_max", n_max);
            report.param("generator_depth", spec.generator_depth);
            report.note(SCALE_CAVEAT);
            let mut t = Table::new("generators", &["n", "positive", "negative"]);
            for i in 0..spec.generator_depth {
                t.push_row(vec![
                    (i + 1).to_string(),
                    spec.pos_generators[i].len().to_string(),
                    spec.neg_generators[i].len().to_string(),
                ]);
            }
            report.tables.push(t);
            Ok(report)
        }
        CounterexampleAction::Audit { n, n_max } => {
            let mut source = greedy_spanning_source(*n);
            let spec = build_counterexample(*n, *n_max, &mut source)?;
            let audit = audit_counterexample(&spec, *n_max)?;
            let mut report = Report::new("counterexample-audit");
            report.fingerprint = Some(spec.shift.fingerprint().to_string());
            report.param("half_alphabet", n);
            report.param("generator_mass", fmt_f64(audit.generator_mass));
            report.param("generator_mass_below_one", audit.generator_mass_below_one);
            report.param("sign_symmetric", audit.sign_symmetric);
            report.param("log_half_alphabet", fmt_f64(audit.log_half_alphabet));
            report.note(SCALE_CAVEAT);
            report.tables.push(counterexample_table(&audit));
            let all_ok = audit.rows.iter().all(|r| {
                r.counts_match_formula && r.crude_bound_ok && r.spanning_ok && r.prefix_closed && r.embed_ok
            });
            if !all_ok {
                return Err(anyhow!("internal: counterexample audit failed"));
            }
            Ok(report)
        }
        CounterexampleAction::Ras { n, n_max, horizon } => {
            let mut source = greedy_spanning_source(*n);
            let spec = build_counterexample(*n, *n_max, &mut source)?;
            let mut report = Report::new("counterexample-ras");
            report.fingerprint = Some(spec.shift.fingerprint().to_string());
            report.note(SCALE_CAVEAT);
            let exercised =
                verify_constructive_witnesses(&spec, horizon.left.min(3), horizon.right.min(3))?;
            report.param("constructive_witnesses", exercised);
            let v = check_ras_loglog(&spec, *horizon)?;
            report.verdicts.push(v);
            Ok(report)
        }
    }
}
