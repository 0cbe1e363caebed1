mod config;

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use minmodlab_core::classify::{
    characteristic_t, compute_genus, counting_n, decay_ray_scan, defect_zero, estimate_order,
    DEFAULT_QUADRATURE_PANELS, DEFAULT_ZERO_EXCLUSION,
};
use minmodlab_core::escape::{export_grid, render_escape, Rectangle};
use minmodlab_core::families::{
    build_construction51, build_construction51_exploratory, family_registry, find_family, verify_construction51,
    ConstructionVariant, FamilyParams,
};
use minmodlab_core::format::{read_spec, to_text, write_spec};
use minmodlab_core::lemmas::{prodl_sequence, prodl_tight, ray_profile, symmetric_grid, theta_candidates};
use minmodlab_core::modulus::{circle_profile_log, tilde_min_log_detail, write_summary_csv, ProfileOptions, TildeGrid};
use minmodlab_core::numeric::geometric_grid;
use minmodlab_core::orbit::{
    check_equivalences, classify_property, iterate_min_modulus_log, status_name, OrbitOptions, OrbitRecord,
    PropertyOptions, PropertyVerdict,
};
use minmodlab_core::schedule::{build_schedule, find_schedule, schedule_registry, ScheduleParams};
use minmodlab_core::{Complex64, EntireFunctionSpec, Error, Evaluator};

#[derive(Parser)]
#[command(name = "minmodlab", version, about = "Minimum modulus and escape computations for real entire functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in families or print one as a spec file.
    Family(FamilyCmd),
    /// Evaluate log f(z).
    Eval(EvalCmd),
    /// Minimum and maximum modulus on circles.
    Modulus(ModulusCmd),
    /// Iterate r -> m(r), search for a witness seed, or test the equivalent conditions.
    Orbit(OrbitCmd),
    /// Order, genus, N(r), T(r), the defect of zero and decay rays.
    Classify(ClassifyCmd),
    /// Numerical checks of the product and primary-factor lemmas.
    Lemmas(LemmasCmd),
    /// Per-k checks of the recursive zero construction.
    Verify51(Verify51Cmd),
    /// Escape grid against a threshold schedule.
    Escape(EscapeCmd),
}

#[derive(Args, Clone, Default)]
struct SpecArgs {
    /// Built-in family name (see `family --list`).
    #[arg(long)]
    family: Option<String>,
    /// Spec file in the key = value format.
    #[arg(long, conflicts_with = "family")]
    spec_file: Option<PathBuf>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    symmetric: bool,
}

#[derive(Args, Clone)]
struct NumArgs {
    /// Absolute log-modulus tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    /// Angular samples per circle.
    #[arg(long, default_value_t = 256)]
    samples: usize,
}

#[derive(Args)]
struct FamilyCmd {
    #[arg(long)]
    list: bool,
    #[command(flatten)]
    spec: SpecArgs,
    /// Write the spec file here.
    #[arg(long)]
    out_spec: Option<PathBuf>,
}

#[derive(Args)]
struct EvalCmd {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    num: NumArgs,
    /// Real part of z.
    #[arg(long, allow_negative_numbers = true)]
    z: f64,
    /// Imaginary part of z.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    z_im: f64,
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Args)]
struct ModulusCmd {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    num: NumArgs,
    /// Single radius.
    #[arg(long, conflicts_with_all = ["r_min", "r_max"])]
    r: Option<f64>,
    #[arg(long, requires = "r_max")]
    r_min: Option<f64>,
    #[arg(long, requires = "r_min")]
    r_max: Option<f64>,
    /// Radii in the geometric grid.
    #[arg(long, default_value_t = 10)]
    points: usize,
    /// Also report log of max_{s <= r} m(s).
    #[arg(long)]
    tilde: bool,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Args)]
struct OrbitCmd {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    num: NumArgs,
    /// Seed radius.
    #[arg(long, conflicts_with_all = ["log_seed", "auto_seed", "check_equivalences"])]
    seed: Option<f64>,
    /// Seed as log r.
    #[arg(long, conflicts_with_all = ["auto_seed", "check_equivalences"])]
    log_seed: Option<f64>,
    /// Search for a seed whose orbit increases strictly and escapes.
    #[arg(long, conflicts_with = "check_equivalences")]
    auto_seed: bool,
    /// Test the equivalent conditions on [t, t-max].
    #[arg(long)]
    check_equivalences: bool,
    #[arg(long, default_value_t = 1e4)]
    t: f64,
    #[arg(long, default_value_t = 1e6)]
    t_max: f64,
    /// Search range for --auto-seed.
    #[arg(long, default_value_t = 10.0)]
    r_min: f64,
    #[arg(long, default_value_t = 1e6)]
    r_max: f64,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyCmd {
    #[command(flatten)]
    spec: SpecArgs,
    /// Order estimate range.
    #[arg(long, default_value_t = 1e2)]
    r_min: f64,
    #[arg(long, default_value_t = 1e6)]
    r_max: f64,
    /// Radius for N(r) and T(r).
    #[arg(long, default_value_t = 100.0)]
    r: f64,
    /// Defect grid range (at least three decades).
    #[arg(long, default_value_t = 1.0)]
    defect_r_min: f64,
    #[arg(long, default_value_t = 1e3)]
    defect_r_max: f64,
    /// Decay ray scan range.
    #[arg(long, default_value_t = 10.0)]
    ray_r_min: f64,
    #[arg(long, default_value_t = 100.0)]
    ray_r_max: f64,
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Args)]
struct LemmasCmd {
    #[command(subcommand)]
    which: LemmaCmd,
}

#[derive(Subcommand)]
enum LemmaCmd {
    /// L_n recurrence: the tight instance or explicit log radii.
    Prodl {
        #[arg(long, conflicts_with_all = ["log_r", "subsequence"])]
        tight: bool,
        /// Subsequence length of the tight instance.
        #[arg(long, default_value_t = 20)]
        k: usize,
        #[arg(long, value_delimiter = ',')]
        log_r: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        subsequence: Vec<usize>,
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
    /// Angles where log|E(T e^{iθ}, m)| decays.
    Candidates {
        #[arg(long)]
        m: u32,
    },
    /// log|E(T e^{iθ}, m)| along a ray through the origin.
    Ray {
        #[arg(long)]
        m: u32,
        /// Defaults to the first candidate angle.
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 100.0)]
        t_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Verify51Cmd {
    #[arg(long, conflicts_with = "order1")]
    rho: Option<f64>,
    /// The variant with [a_k^{1 - 1/k}] zeros at a_k.
    #[arg(long)]
    order1: bool,
    #[arg(long, default_value_t = 5)]
    k_max: u32,
    /// Allow rho < 1/2; values are listed without verdicts.
    #[arg(long)]
    exploratory: bool,
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Args)]
struct EscapeCmd {
    #[command(flatten)]
    spec: SpecArgs,
    /// Schedule rule (see `escape --list-schedules`).
    #[arg(long, required_unless_present = "list_schedules")]
    schedule: Option<String>,
    #[arg(long)]
    list_schedules: bool,
    /// Base radius of the schedule.
    #[arg(long)]
    radius: Option<f64>,
    /// Index shift N of the min-modulus schedule.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    exponent: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Log thresholds of a custom schedule.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Option<Vec<f64>>,
    /// Iterates skipped before the first comparison.
    #[arg(long, default_value_t = 0)]
    offset: usize,
    #[arg(long, default_value_t = 8)]
    max_iter: usize,
    /// x_min,x_max,y_min,y_max
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-2.0, 2.0, -2.0, 2.0])]
    rect: Vec<f64>,
    #[arg(long, default_value_t = 64)]
    width: usize,
    #[arg(long, default_value_t = 64)]
    height: usize,
    #[arg(long, requires = "out_csv")]
    out_image: Option<PathBuf>,
    #[arg(long, requires = "out_image")]
    out_csv: Option<PathBuf>,
    /// Write the schedule as JSON.
    #[arg(long)]
    out_json: Option<PathBuf>,
}

/// Exit status 2: the configuration is invalid; 1: the computation failed.
enum Failure {
    Config(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::InvalidSpec(_)
            | Error::ParameterOutOfRange(_)
            | Error::InvalidInstance(_)
            | Error::BadAngle { .. }
            | Error::MixedSignZeros(_) => Failure::Config(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn config_err<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Config(msg.into()))
}

fn kv(key: &str, value: impl std::fmt::Display) {
    println!("{key} = {value}");
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn write_json<T: serde::Serialize>(path: &Option<PathBuf>, value: &T) -> Outcome {
    if let Some(p) = path {
        serde_json::to_writer_pretty(BufWriter::new(File::create(p)?), value)?;
    }
    Ok(())
}

fn load_spec(args: &SpecArgs) -> Result<EntireFunctionSpec, Failure> {
    if let Some(path) = &args.spec_file {
        return Ok(read_spec(path)?);
    }
    let Some(name) = &args.family else {
        return config_err("a spec is required: pass --family or --spec-file");
    };
    let Some(builder) = find_family(name) else {
        let names: Vec<_> = family_registry().iter().map(|b| b.name()).collect();
        return config_err(format!("unknown family `{name}`; known: {}", names.join(", ")));
    };
    let params = FamilyParams {
        sigma: args.sigma,
        alpha: args.alpha,
        rho: args.rho,
        s: args.s,
        symmetric: args.symmetric,
    };
    Ok(builder.build(&params)?)
}

fn profile_options(num: &NumArgs) -> Result<ProfileOptions, Failure> {
    if num.samples < 3 {
        return config_err(format!("--samples must be at least 3, got {}", num.samples));
    }
    if !(num.tolerance > 0.0) {
        return config_err(format!("--tolerance must be positive, got {}", num.tolerance));
    }
    Ok(ProfileOptions {
        n_samples: num.samples,
        tolerance: num.tolerance,
        ..ProfileOptions::default()
    })
}

fn positive(name: &str, v: f64) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        config_err(format!("--{name} must be a positive number, got {v}"))
    }
}

fn run_family(cmd: FamilyCmd) -> Outcome {
    if cmd.list || (cmd.spec.family.is_none() && cmd.spec.spec_file.is_none()) {
        for b in family_registry() {
            println!("{:<20} {}", b.name(), b.summary());
        }
        return Ok(());
    }
    let spec = load_spec(&cmd.spec)?;
    print!("{}", to_text(&spec));
    kv("genus", compute_genus(&spec)?.genus);
    if let Some(p) = &cmd.out_spec {
        write_spec(&spec, p)?;
    }
    Ok(())
}

fn run_eval(cmd: EvalCmd) -> Outcome {
    let spec = load_spec(&cmd.spec)?;
    let opts = profile_options(&cmd.num)?;
    let z = Complex64::new(cmd.z, cmd.z_im);
    if !(z.re.is_finite() && z.im.is_finite()) {
        return config_err("z must be finite");
    }
    let v = Evaluator::new(&spec, z.norm().ln(), opts.tolerance)?.eval(z);
    kv("log_modulus", v.log_modulus);
    kv("argument", v.argument);
    write_json(&cmd.out_json, &v)
}

fn run_modulus(cmd: ModulusCmd) -> Outcome {
    let spec = load_spec(&cmd.spec)?;
    let opts = profile_options(&cmd.num)?;
    let radii = match (cmd.r, cmd.r_min, cmd.r_max) {
        (Some(r), _, _) => vec![positive("r", r)?],
        (None, Some(a), Some(b)) => {
            let (a, b) = (positive("r-min", a)?, positive("r-max", b)?);
            if !(b > a) || cmd.points < 2 {
                return config_err("need r-min < r-max and at least 2 points");
            }
            (0..cmd.points)
                .map(|i| a * (b / a).powf(i as f64 / (cmd.points - 1) as f64))
                .collect()
        }
        _ => return config_err("pass --r or --r-min with --r-max"),
    };
    let mut profiles = Vec::with_capacity(radii.len());
    println!("r log_min argmin log_max argmax");
    for &r in &radii {
        let p = circle_profile_log(&spec, r.ln(), &opts)?;
        println!("{} {} {} {} {}", r, p.min_log, p.argmin_theta, p.max_log, p.argmax_theta);
        if cmd.tilde {
            let t = tilde_min_log_detail(&spec, r.ln(), TildeGrid::default(), &opts)?;
            println!("  log_tilde_m = {} at log s = {}", t.log_value, t.argmax_log_radius);
        }
        profiles.push(p);
    }
    if let Some(p) = &cmd.out_csv {
        write_summary_csv(&profiles, BufWriter::new(File::create(p)?))?;
    }
    write_json(&cmd.out_json, &profiles)
}

fn print_orbit(o: &OrbitRecord) {
    kv("log_seed", o.log_seed);
    for (n, v) in o.values.iter().enumerate() {
        println!("step {n}: log_radius = {v}");
    }
    kv("status", status_name(&o.status));
    kv("strictly_increasing", o.strictly_increasing);
}

fn run_orbit(cmd: OrbitCmd) -> Outcome {
    let spec = load_spec(&cmd.spec)?;
    let profile = profile_options(&cmd.num)?;
    if cmd.check_equivalences {
        let (t, t_max) = (positive("t", cmd.t)?, positive("t-max", cmd.t_max)?);
        let rep = check_equivalences(&spec, t, t_max, &profile)?;
        kv("escaping_orbit", rep.escaping_orbit);
        kv("unbounded_orbit", rep.unbounded_orbit);
        kv("tilde_dominates", rep.tilde_dominates);
        kv("chain_exists", rep.chain_exists);
        if let Some(u) = rep.dominance_from {
            kv("dominance_from_log_radius", u);
        }
        if let Some(s) = rep.strict_seed {
            kv("strict_seed_log_radius", s);
        }
        kv("consistency", if rep.inconsistent { "INCONSISTENT" } else { "consistent" });
        kv("all_agree", rep.all_agree);
        return write_json(&cmd.out_json, &rep);
    }
    if cmd.auto_seed {
        let opts = PropertyOptions {
            r_min: positive("r-min", cmd.r_min)?,
            r_max: positive("r-max", cmd.r_max)?,
            profile,
            ..PropertyOptions::default()
        };
        let verdict = classify_property(&spec, &opts)?;
        match &verdict {
            PropertyVerdict::Holds { witness } => {
                kv("verdict", "Holds");
                kv("witness_seed", witness.seed());
                print_orbit(witness);
                if let Some(p) = &cmd.out_csv {
                    witness.write_csv(BufWriter::new(File::create(p)?))?;
                }
            }
            PropertyVerdict::FailsEvidence { max_ratio_log } => {
                kv("verdict", "FailsEvidence");
                kv("max_log_ratio", max_ratio_log);
            }
            PropertyVerdict::Inconclusive => kv("verdict", "Inconclusive"),
        }
        return write_json(&cmd.out_json, &verdict);
    }
    let log_seed = match (cmd.seed, cmd.log_seed) {
        (Some(r), _) => positive("seed", r)?.ln(),
        (None, Some(u)) if u.is_finite() => u,
        _ => return config_err("pass --seed, --log-seed, --auto-seed or --check-equivalences"),
    };
    let opts = OrbitOptions {
        max_iter: cmd.max_iter,
        profile,
        ..OrbitOptions::default()
    };
    let o = iterate_min_modulus_log(&spec, log_seed, &opts)?;
    print_orbit(&o);
    if let Some(p) = &cmd.out_csv {
        o.write_csv(BufWriter::new(File::create(p)?))?;
    }
    write_json(&cmd.out_json, &o)
}

fn run_classify(cmd: ClassifyCmd) -> Outcome {
    let spec = load_spec(&cmd.spec)?;
    let mut report = serde_json::Map::new();
    let genus = compute_genus(&spec)?;
    kv("genus", genus.genus);
    kv("factor_index", genus.factor_index);
    kv("poly_degree", genus.poly_degree);
    report.insert("genus".into(), serde_json::to_value(&genus)?);
    match estimate_order(&spec, cmd.r_min, cmd.r_max, 1.25) {
        Ok(g) => {
            kv("order_estimate", g.order_estimate);
            report.insert("order".into(), serde_json::to_value(&g)?);
        }
        Err(Error::DegenerateGrowth(why)) => kv("order_estimate", format!("n/a ({why})")),
        Err(e) => return Err(e.into()),
    }
    let r = positive("r", cmd.r)?;
    kv("counting_n", counting_n(&spec, r)?);
    let t = characteristic_t(&spec, r, DEFAULT_QUADRATURE_PANELS, DEFAULT_ZERO_EXCLUSION)?;
    kv("characteristic_t", t.t);
    kv("characteristic_t_error", t.error_bound);
    report.insert("characteristic".into(), serde_json::to_value(&t)?);
    let grid = geometric_grid(
        positive("defect-r-min", cmd.defect_r_min)?,
        positive("defect-r-max", cmd.defect_r_max)?.max(cmd.defect_r_min),
        10f64.powf(0.25),
    );
    let d = defect_zero(&spec, &grid)?;
    kv("defect_estimate", d.defect_estimate);
    report.insert("defect".into(), serde_json::to_value(&d)?);
    match decay_ray_scan(&spec, cmd.ray_r_min, cmd.ray_r_max, 20) {
        Ok(scans) => {
            for s in &scans {
                println!(
                    "decay_ray theta = {} exponent = {} flagged = {}",
                    s.theta, s.exponent, s.flagged
                );
            }
            report.insert("decay_rays".into(), serde_json::to_value(&scans)?);
        }
        Err(Error::NoCandidates(why)) => kv("decay_rays", format!("none ({why})")),
        Err(e) => return Err(e.into()),
    }
    write_json(&cmd.out_json, &report)
}

fn run_lemmas(cmd: LemmasCmd) -> Outcome {
    match cmd.which {
        LemmaCmd::Prodl {
            tight,
            k,
            log_r,
            subsequence,
            out_json,
        } => {
            let inst = if tight || log_r.is_empty() {
                prodl_tight(k)?
            } else {
                prodl_sequence(log_r, subsequence)?
            };
            kv("terms", inst.l_sequence.len());
            kv("min_l", inst.min_l);
            kv("lower_bound", inst.lower_bound);
            kv("result", pass(inst.holds));
            write_json(&out_json, &inst)
        }
        LemmaCmd::Candidates { m } => {
            for t in theta_candidates(m)? {
                println!("{t}");
            }
            Ok(())
        }
        LemmaCmd::Ray {
            m,
            theta,
            t_max,
            points,
            out_csv,
        } => {
            let theta = match theta {
                Some(t) => t,
                None => theta_candidates(m)?[0],
            };
            let p = ray_profile(m, theta, &symmetric_grid(positive("t-max", t_max)?, points))?;
            kv("theta", p.theta);
            kv("power", p.power);
            kv("fitted_c", p.fitted_c);
            kv("fitted_t0", p.fitted_t0);
            kv("bounded_by_one", pass(p.bounded_by_one));
            kv("sign_pattern", pass(p.sign_pattern_ok));
            if let Some(path) = &out_csv {
                p.write_csv(BufWriter::new(File::create(path)?))?;
            }
            Ok(())
        }
    }
}

fn run_verify51(cmd: Verify51Cmd) -> Outcome {
    if cmd.k_max == 0 {
        return config_err("--k-max must be at least 1");
    }
    let data = match (cmd.rho, cmd.order1) {
        (_, true) => build_construction51(ConstructionVariant::Order1, cmd.k_max + 1)?,
        (Some(rho), false) if cmd.exploratory && rho < 0.5 => build_construction51_exploratory(rho, cmd.k_max + 1)?,
        (Some(rho), false) => build_construction51(ConstructionVariant::Rho { rho }, cmd.k_max + 1)?,
        (None, false) => return config_err("pass --rho or --order1"),
    };
    if data.exploratory {
        println!("exploratory: no verdicts");
        for (k, (z, lr)) in data.zeros.iter().zip(&data.log_r).enumerate() {
            println!("k={} log_a={} log_multiplicity={} log_r={}", k + 1, z.log_a, z.log_mult, lr);
        }
        return Ok(());
    }
    let checks = verify_construction51(&data, 1..=cmd.k_max)?;
    for c in &checks {
        println!(
            "k={} tail_sum={} tail_at_most_half={} log_min_modulus={} claimed_bound={} bound_margin={} bound={} exceeds_next_radius={}",
            c.k,
            c.tail_sum,
            pass(c.tail_at_most_half),
            c.log_min_modulus,
            c.claimed_lower_bound,
            c.bound_margin,
            pass(c.bound_holds),
            pass(c.exceeds_next_radius)
        );
    }
    write_json(&cmd.out_json, &checks)
}

fn run_escape(cmd: EscapeCmd) -> Outcome {
    if cmd.list_schedules {
        for r in schedule_registry() {
            println!("{:<20} {}", r.name(), r.summary());
        }
        return Ok(());
    }
    let spec = load_spec(&cmd.spec)?;
    let name = cmd.schedule.as_deref().unwrap_or_default();
    let Some(rule) = find_schedule(name) else {
        let names: Vec<_> = schedule_registry().iter().map(|r| r.name()).collect();
        return config_err(format!("unknown schedule `{name}`; known: {}", names.join(", ")));
    };
    let kind = rule.kind(&ScheduleParams {
        radius: cmd.radius,
        n: cmd.n,
        exponent: cmd.exponent,
        epsilon: cmd.epsilon,
        values: cmd.values.clone(),
    })?;
    if cmd.max_iter == 0 {
        return config_err("--max-iter must be at least 1");
    }
    if cmd.rect.len() != 4 {
        return config_err(format!("--rect takes four numbers, got {}", cmd.rect.len()));
    }
    let rect = Rectangle::new(cmd.rect[0], cmd.rect[1], cmd.rect[2], cmd.rect[3])?;
    let schedule = build_schedule(&spec, kind, cmd.max_iter, cmd.offset)?;
    let grid = render_escape(&spec, rect, cmd.width, cmd.height, &schedule, cmd.max_iter)?;
    for (n, v) in schedule.values.iter().enumerate() {
        println!("threshold {n}: log = {v}");
    }
    for (n, c) in grid.histogram().iter().enumerate() {
        println!("survived {n}: {c}");
    }
    if let (Some(img), Some(csv)) = (&cmd.out_image, &cmd.out_csv) {
        export_grid(&grid, img, csv)?;
    }
    write_json(&cmd.out_json, &schedule)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("MINMODLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = match v.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => return config_err(format!("MINMODLAB_THREADS must be a positive integer, got `{v}`")),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Compute(e.to_string()))
}

fn main() -> ExitCode {
    let (args, origins) = match config::expand(std::env::args().collect()) {
        Ok(x) => x,
        Err(config::ConfigError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::{ContextKind, ContextValue, ErrorKind};
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            if let Some(ContextValue::String(arg)) = e.get(ContextKind::InvalidArg) {
                let flag = arg.split([' ', '=']).next().unwrap_or(arg);
                if let Some(o) = origins.get(flag) {
                    eprintln!("{}:{}: field `{}`:", o.path, o.line, o.key);
                }
            }
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Family(c) => run_family(c),
        Command::Eval(c) => run_eval(c),
        Command::Modulus(c) => run_modulus(c),
        Command::Orbit(c) => run_orbit(c),
        Command::Classify(c) => run_classify(c),
        Command::Lemmas(c) => run_lemmas(c),
        Command::Verify51(c) => run_verify51(c),
        Command::Escape(c) => run_escape(c),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
