use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use spacelab::detect::{
    find_delta_chain, find_ip_generator, find_ip_ip_generator, intersective_refute, syndetic_gap,
    thick_run, verify, verify_intersective_hit, Certificate, SearchReport, StructureWitness,
    WitnessKind,
};
use spacelab::dynamics::{
    f_statistic, named_points, periodic_point_check, proximal_probe, random_point, OrbitPoint,
    PeriodicOutcome,
};
use spacelab::harness::{run_all, run_experiment, write_report};
use spacelab::language::{
    count_words, entropy_profile, greedy_point, max_ones, transitive_gap_check, CountMode,
};
use spacelab::pset::{default_n0, density_report};
use spacelab::rational::to_pq;
use spacelab::{build_pset, corpus, Error, PSetSpec, PSetView, Result, BUDGET_ENV, DEFAULT_BUDGET};

#[derive(Parser)]
#[command(
    name = "spacelab",
    version,
    about = "Spacing shifts: languages, structure and experiments"
)]
struct Cli {
    #[command(subcommand)]
    group: Group,
}

#[derive(Subcommand)]
enum Group {
    /// Operations on P itself.
    #[command(subcommand)]
    Pset(PsetCmd),
    /// Structure witnesses in P.
    #[command(subcommand)]
    Detect(DetectCmd),
    /// The language of the spacing shift.
    #[command(subcommand)]
    Lang(LangCmd),
    /// Orbit-level probes.
    #[command(name = "dyn", subcommand)]
    Dyn(DynCmd),
    /// Named experiments.
    #[command(subcommand)]
    Exp(ExpCmd),
    /// The shipped corpus.
    #[command(subcommand)]
    Corpus(CorpusCmd),
}

#[derive(Args, Clone)]
struct Common {
    /// Path to a spec file, inline JSON, or `corpus:<name>`.
    #[arg(long)]
    spec: String,
    /// Membership horizon H.
    #[arg(long)]
    horizon: Option<usize>,
    #[command(flatten)]
    run: RunOpts,
}

#[derive(Args, Clone)]
struct RunOpts {
    /// Node budget per search; overrides SPACELAB_BUDGET.
    #[arg(long)]
    budget: Option<u64>,
    /// Output directory; a manifest.json is written next to the outputs.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG line plots (requires --out).
    #[arg(long)]
    plot: bool,
}

#[derive(Subcommand)]
enum PsetCmd {
    /// Prefix densities and window densities.
    Density {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n0: Option<usize>,
        /// Window sizes for the Banach profile.
        #[arg(long, value_delimiter = ',', default_value = "10,50,100")]
        windows: Vec<usize>,
    },
}

#[derive(Subcommand)]
enum DetectCmd {
    /// Δ-chain of the given depth.
    Delta(SearchArgs),
    /// IP generator.
    Ip(SearchArgs),
    /// IP−IP generator.
    Ipip(SearchArgs),
    /// Longest interior gap.
    Syndetic(Common),
    /// Longest run of members.
    Thick(Common),
    /// Least element of E in A − A; `--spec` is E.
    Intersect {
        #[command(flatten)]
        common: Common,
        /// The set A.
        #[arg(long)]
        against: String,
        /// Re-check a witness file instead of searching.
        #[arg(long)]
        verify: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    bound: Option<usize>,
    /// Re-check a witness file instead of searching.
    #[arg(long)]
    verify: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Naive,
    Optimized,
}

#[derive(Subcommand)]
enum LangCmd {
    /// Number of admissible words of length n.
    Count {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "optimized")]
        mode: Mode,
    },
    /// c(n), h_n and ω(n) over a grid.
    Entropy {
        #[command(flatten)]
        common: Common,
        #[arg(long = "n-grid", value_delimiter = ',', required = true)]
        n_grid: Vec<usize>,
    },
    /// ω(n) with its lexicographically least witness.
    Maxones {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
    },
    /// The greedy point on [0, H).
    Greedy(Common),
    /// Zero-gap joinability of short words.
    Transitive {
        #[command(flatten)]
        common: Common,
        #[arg(long = "word-len")]
        word_len: usize,
        #[arg(long)]
        gap: usize,
    },
}

#[derive(Args)]
struct PairArgs {
    #[command(flatten)]
    common: Common,
    /// Point name from the generator family, or `random`.
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    /// Seed for `random` points.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum DynCmd {
    /// F_n(x, y) over a grid.
    Fstat {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 0)]
        l: usize,
        #[arg(long = "n-grid", value_delimiter = ',', required = true)]
        n_grid: Vec<usize>,
    },
    /// Least start of an agreement block.
    Proximal {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        block: usize,
    },
    /// The period-k point, if admissible.
    Periodic {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum ExpCmd {
    /// Run one experiment.
    Run {
        id: String,
        /// Parameter overrides as inline JSON or a file path.
        #[arg(long)]
        params: Option<String>,
        #[command(flatten)]
        run: RunOpts,
    },
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// Run every experiment and write a report directory.
    RunAll {
        #[command(flatten)]
        run: RunOpts,
    },
}

/// Everything needed to write the manifest for one invocation.
struct Ctx {
    command: &'static str,
    run: RunOpts,
    budget: u64,
    budget_source: &'static str,
    params: serde_json::Map<String, Value>,
}

impl Ctx {
    fn new(command: &'static str, run: &RunOpts) -> Result<Self> {
        let (budget, budget_source) = match run.budget {
            Some(b) => (b, "flag"),
            None => match std::env::var(BUDGET_ENV) {
                Ok(v) => (
                    v.trim().parse().map_err(|_| Error::Validation {
                        node: BUDGET_ENV.into(),
                        reason: format!("not a node count: {v:?}"),
                    })?,
                    "env",
                ),
                Err(_) => (DEFAULT_BUDGET, "default"),
            },
        };
        if run.plot && run.out.is_none() {
            return Err(Error::Validation {
                node: "--plot".into(),
                reason: "requires --out".into(),
            });
        }
        Ok(Ctx {
            command,
            run: run.clone(),
            budget,
            budget_source,
            params: serde_json::Map::new(),
        })
    }

    fn param(&mut self, key: &str, value: impl serde::Serialize) {
        self.params.insert(key.to_string(), json!(value));
    }

    /// Loads the spec and builds its view; the horizon falls back to
    /// `fallback` when the flag is absent.
    fn view(&mut self, common: &Common, fallback: Option<usize>) -> Result<(PSetSpec, PSetView)> {
        let spec = load_spec(&common.spec)?;
        let (horizon, source) = match (common.horizon, fallback) {
            (Some(h), _) => (h, "flag"),
            (None, Some(h)) => (h, "derived"),
            (None, None) => {
                return Err(Error::Validation {
                    node: "--horizon".into(),
                    reason: "required for this command".into(),
                })
            }
        };
        let view = build_pset(&spec, horizon)?;
        self.param("spec", &spec);
        self.param("spec_digest", spec.digest());
        self.param("horizon", horizon);
        self.param("horizon_source", source);
        Ok((spec, view))
    }

    /// Prints `text` and, with `--out`, saves it as `file` plus a manifest.
    fn emit(&self, file: &str, text: &str) -> Result<()> {
        print!("{text}");
        if !text.ends_with('\n') {
            println!();
        }
        if let Some(dir) = &self.run.out {
            fs::create_dir_all(dir)?;
            let body = if text.ends_with('\n') {
                text.to_string()
            } else {
                format!("{text}\n")
            };
            fs::write(dir.join(file), body)?;
            self.manifest(dir)?;
        }
        Ok(())
    }

    fn write_extra(&self, file: &str, text: &str) -> Result<()> {
        if let Some(dir) = &self.run.out {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(file), text)?;
        }
        Ok(())
    }

    fn manifest(&self, dir: &Path) -> Result<()> {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        let doc = json!({
            "tool": "spacelab",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "corpus_version": corpus::CORPUS_VERSION,
            "budget": self.budget,
            "budget_source": self.budget_source,
            "params": self.params,
            "timestamp": timestamp,
        });
        fs::write(
            dir.join("manifest.json"),
            serde_json::to_string_pretty(&doc)? + "\n",
        )?;
        Ok(())
    }
}

fn load_spec(arg: &str) -> Result<PSetSpec> {
    if let Some(name) = arg.strip_prefix("corpus:") {
        return corpus::member(name)
            .map(|m| m.spec)
            .ok_or_else(|| Error::Validation {
                node: "--spec".into(),
                reason: format!("unknown corpus member {name:?}"),
            });
    }
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg)?
    };
    PSetSpec::from_json(&text)
}

fn load_json_arg(arg: &str) -> Result<Value> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg)?
    };
    serde_json::from_str(&text).map_err(|e| Error::Validation {
        node: "--params".into(),
        reason: e.to_string(),
    })
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.render().to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ")
                .to_string();
            eprintln!("{}", json!({"error": "usage", "message": first}));
            return ExitCode::from(2);
        }
    };
    match dispatch(cli.group) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", json!({"error": e.kind(), "message": e.to_string()}));
            ExitCode::from(match e {
                Error::Validation { .. }
                | Error::OutOfRange { .. }
                | Error::UnknownExperiment(_)
                | Error::Json(_) => 2,
                Error::BudgetExhausted { .. } => 3,
                _ => 1,
            })
        }
    }
}

fn dispatch(group: Group) -> Result<ExitCode> {
    match group {
        Group::Pset(PsetCmd::Density {
            common,
            n0,
            windows,
        }) => {
            let mut ctx = Ctx::new("pset density", &common.run)?;
            let (_, view) = ctx.view(&common, None)?;
            let n0 = n0.unwrap_or_else(|| default_n0(view.horizon()));
            ctx.param("n0", n0);
            ctx.param("windows", &windows);
            let report = density_report(&view, n0, &windows)?;
            let mut csv = String::from("n,prefix_density\n");
            for (n, r) in &report.prefix_densities {
                csv.push_str(&format!("{n},{}\n", to_pq(r)));
            }
            let summary = json!({
                "horizon": report.horizon,
                "n0": report.n0,
                "lower_est": to_pq(&report.lower_est),
                "upper_est": to_pq(&report.upper_est),
                "banach_profile": report.banach_profile.iter().map(|(w, r)| (w, to_pq(r))).collect::<Vec<_>>(),
            });
            ctx.write_extra("prefix_density.csv", &csv)?;
            ctx.emit("density.json", &pretty(&summary))?;
        }
        Group::Detect(cmd) => return detect(cmd),
        Group::Lang(cmd) => lang(cmd)?,
        Group::Dyn(cmd) => dynamics(cmd)?,
        Group::Exp(ExpCmd::Run { id, params, run }) => {
            let mut ctx = Ctx::new("exp run", &run)?;
            let params = params
                .as_deref()
                .map(load_json_arg)
                .transpose()?
                .unwrap_or(Value::Null);
            ctx.param("id", &id);
            ctx.param("overrides", &params);
            let report = run_experiment(&id, &params, ctx.budget)?;
            print!("{}", report.to_json() + "\n");
            if let Some(dir) = &run.out {
                write_report(dir, &report, run.plot)?;
                ctx.manifest(dir)?;
            }
        }
        Group::Corpus(CorpusCmd::RunAll { run }) => {
            let ctx = Ctx::new("corpus run-all", &run)?;
            let dir = run.out.clone().ok_or_else(|| Error::Validation {
                node: "--out".into(),
                reason: "required for corpus run-all".into(),
            })?;
            fs::create_dir_all(&dir)?;
            let index = run_all(&dir, ctx.budget, run.plot)?;
            ctx.manifest(&dir)?;
            for entry in &index {
                println!("{} {}", entry.id, entry.verdict.as_str());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify_file(path: &Path, check: impl FnOnce(&StructureWitness) -> bool) -> Result<ExitCode> {
    let witness = StructureWitness::from_json(&fs::read_to_string(path)?)?;
    if check(&witness) {
        println!("verified");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("not verified");
        Ok(ExitCode::from(1))
    }
}

fn detect(cmd: DetectCmd) -> Result<ExitCode> {
    match cmd {
        DetectCmd::Delta(args) => search(
            args,
            "detect delta",
            WitnessKind::DeltaChain,
            find_delta_chain,
        ),
        DetectCmd::Ip(args) => search(
            args,
            "detect ip",
            WitnessKind::IpGenerator,
            find_ip_generator,
        ),
        DetectCmd::Ipip(args) => search(
            args,
            "detect ipip",
            WitnessKind::IpMinusIp,
            find_ip_ip_generator,
        ),
        DetectCmd::Syndetic(common) => {
            let mut ctx = Ctx::new("detect syndetic", &common.run)?;
            let (_, view) = ctx.view(&common, None)?;
            let out = match syndetic_gap(&view) {
                Some(g) => {
                    json!({"kind": "syndetic_gap", "value": g.gap, "censored_tail": g.censored_tail})
                }
                None => Value::Null,
            };
            ctx.emit("syndetic.json", &pretty(&out))?;
            Ok(ExitCode::SUCCESS)
        }
        DetectCmd::Thick(common) => {
            let mut ctx = Ctx::new("detect thick", &common.run)?;
            let (_, view) = ctx.view(&common, None)?;
            ctx.emit(
                "thick.json",
                &pretty(&json!({"kind": "thick_run", "value": thick_run(&view)})),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        DetectCmd::Intersect {
            common,
            against,
            verify,
        } => {
            let mut ctx = Ctx::new("detect intersect", &common.run)?;
            let (_, e_view) = ctx.view(&common, None)?;
            let a_spec = load_spec(&against)?;
            let a_view = build_pset(&a_spec, e_view.horizon())?;
            ctx.param("against", &a_spec);
            if let Some(path) = verify {
                return verify_file(&path, |w| {
                    w.kind == WitnessKind::IntersectiveHit
                        && matches!(w.certificate, Certificate::Value(e) if verify_intersective_hit(&e_view, &a_view, e))
                });
            }
            let hit = intersective_refute(&e_view, &a_view)?;
            let text = hit.map_or_else(|| "null\n".to_string(), |w| w.to_json() + "\n");
            ctx.emit("witness.json", &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn search(
    args: SearchArgs,
    command: &'static str,
    kind: WitnessKind,
    find: fn(&PSetView, usize, usize, u64) -> Result<SearchReport>,
) -> Result<ExitCode> {
    let mut ctx = Ctx::new(command, &args.common.run)?;
    if let Some(path) = &args.verify {
        let (_, view) = ctx.view(&args.common, args.bound)?;
        return verify_file(path, |w| w.kind == kind && verify(&view, w));
    }
    let need = |v: Option<usize>, flag: &str| {
        v.ok_or_else(|| Error::Validation {
            node: flag.into(),
            reason: "required".into(),
        })
    };
    let depth = need(args.depth, "--depth")?;
    let bound = need(args.bound, "--bound")?;
    let (_, view) = ctx.view(&args.common, Some(bound))?;
    ctx.param("depth", depth);
    ctx.param("bound", bound);
    let report = find(&view, depth, bound, ctx.budget)?;
    ctx.write_extra("search.json", &pretty(&report))?;
    let text = report
        .witness
        .map_or_else(|| "null\n".to_string(), |w| w.to_json() + "\n");
    ctx.emit("witness.json", &text)?;
    Ok(ExitCode::SUCCESS)
}

fn lang(cmd: LangCmd) -> Result<()> {
    match cmd {
        LangCmd::Count { common, n, mode } => {
            let mut ctx = Ctx::new("lang count", &common.run)?;
            let (_, view) = ctx.view(&common, Some(n.max(1)))?;
            let mode = match mode {
                Mode::Naive => CountMode::Naive,
                Mode::Optimized => CountMode::Optimized,
            };
            ctx.param("n", n);
            ctx.param(
                "mode",
                if mode == CountMode::Naive {
                    "naive"
                } else {
                    "optimized"
                },
            );
            let c = count_words(&view, n, mode, ctx.budget)?;
            ctx.emit("count.txt", &c.to_string())
        }
        LangCmd::Entropy { common, n_grid } => {
            let fallback = n_grid.iter().max().copied();
            let mut ctx = Ctx::new("lang entropy", &common.run)?;
            let (_, view) = ctx.view(&common, fallback)?;
            ctx.param("n_grid", &n_grid);
            let profile = entropy_profile(&view, &n_grid, ctx.budget)?;
            let mut csv = Vec::new();
            profile.write_csv(&mut csv)?;
            if ctx.run.plot {
                use spacelab::plot::{line_chart, Series};
                let h: Vec<(f64, f64)> = profile
                    .records
                    .iter()
                    .map(|r| (r.n as f64, r.h_n))
                    .collect();
                let g: Vec<(f64, f64)> = profile
                    .records
                    .iter()
                    .map(|r| (r.n as f64, r.omega_n as f64 / r.n as f64))
                    .collect();
                let series = [
                    Series {
                        label: "h_n".into(),
                        points: h,
                    },
                    Series {
                        label: "omega/n".into(),
                        points: g,
                    },
                ];
                ctx.write_extra(
                    "entropy.svg",
                    &line_chart("h_n and omega(n)/n", "n", "value", &series),
                )?;
            }
            ctx.emit("entropy.csv", &String::from_utf8(csv).expect("utf8 csv"))
        }
        LangCmd::Maxones { common, n } => {
            let mut ctx = Ctx::new("lang maxones", &common.run)?;
            let (_, view) = ctx.view(&common, Some(n.max(1)))?;
            ctx.param("n", n);
            let (omega, witness) = max_ones(&view, n, ctx.budget)?;
            ctx.emit(
                "maxones.json",
                &pretty(&json!({"n": n, "omega": omega, "witness": witness.to_string()})),
            )
        }
        LangCmd::Greedy(common) => {
            let mut ctx = Ctx::new("lang greedy", &common.run)?;
            let (_, view) = ctx.view(&common, None)?;
            let point = greedy_point(&view, view.horizon())?;
            ctx.emit("greedy.txt", &point.to_string())
        }
        LangCmd::Transitive {
            common,
            word_len,
            gap,
        } => {
            let mut ctx = Ctx::new("lang transitive", &common.run)?;
            let (_, view) = ctx.view(&common, Some(2 * word_len + gap))?;
            ctx.param("word_len", word_len);
            ctx.param("gap", gap);
            let report = transitive_gap_check(&view, word_len, gap)?;
            ctx.emit("transitive.json", &pretty(&report))
        }
    }
}

fn pick_point(view: &PSetView, name: &str, seed: Option<u64>, budget: u64) -> Result<OrbitPoint> {
    let h = view.horizon();
    if name == "random" {
        let seed = seed.ok_or_else(|| Error::Validation {
            node: "--seed".into(),
            reason: "required for random points".into(),
        })?;
        return random_point(view, h, seed);
    }
    named_points(view, h, budget)?
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::Validation {
            node: "point".into(),
            reason: format!("unknown point {name:?}"),
        })
}

fn dynamics(cmd: DynCmd) -> Result<()> {
    match cmd {
        DynCmd::Fstat { pair, l, n_grid } => {
            let mut ctx = Ctx::new("dyn fstat", &pair.common.run)?;
            let (_, view) = ctx.view(&pair.common, None)?;
            let x = pick_point(&view, &pair.x, pair.seed, ctx.budget)?;
            let y = pick_point(&view, &pair.y, pair.seed, ctx.budget)?;
            ctx.param("x", &pair.x);
            ctx.param("y", &pair.y);
            ctx.param("seed", pair.seed);
            ctx.param("l", l);
            ctx.param("n_grid", &n_grid);
            let report = f_statistic(&x, &y, l, &n_grid)?;
            let mut csv = Vec::new();
            report.write_csv(&mut csv)?;
            if ctx.run.plot {
                use spacelab::plot::{line_chart, Series};
                let points = report
                    .values
                    .iter()
                    .map(|v| (v.n as f64, v.hits as f64 / v.n as f64))
                    .collect();
                let title = format!("F_n({}, {}), l = {l}", x.name, y.name);
                ctx.write_extra(
                    "fstat.svg",
                    &line_chart(
                        &title,
                        "n",
                        "F_n",
                        &[Series {
                            label: "F_n".into(),
                            points,
                        }],
                    ),
                )?;
            }
            ctx.emit("fstat.csv", &String::from_utf8(csv).expect("utf8 csv"))
        }
        DynCmd::Proximal { pair, block } => {
            let mut ctx = Ctx::new("dyn proximal", &pair.common.run)?;
            let (_, view) = ctx.view(&pair.common, None)?;
            let x = pick_point(&view, &pair.x, pair.seed, ctx.budget)?;
            let y = pick_point(&view, &pair.y, pair.seed, ctx.budget)?;
            ctx.param("x", &pair.x);
            ctx.param("y", &pair.y);
            ctx.param("seed", pair.seed);
            ctx.param("block", block);
            let m = proximal_probe(&x, &y, block)?;
            ctx.emit(
                "proximal.json",
                &pretty(&json!({"x": x.name, "y": y.name, "block": block, "m": m})),
            )
        }
        DynCmd::Periodic { common, k } => {
            let mut ctx = Ctx::new("dyn periodic", &common.run)?;
            let (_, view) = ctx.view(&common, None)?;
            ctx.param("k", k);
            let out = match periodic_point_check(&view, k, view.horizon())? {
                PeriodicOutcome::Periodic(p) => json!({
                    "k": k, "admissible": p.admissible, "point": p.config.to_string(),
                }),
                PeriodicOutcome::Missing {
                    least_failing_multiple,
                } => json!({
                    "k": k, "admissible": false, "least_failing_multiple": least_failing_multiple,
                }),
            };
            ctx.emit("periodic.json", &pretty(&out))
        }
    }
}
