//! Command-line front end. `run` returns the process exit code: 0 on
//! success, 1 on usage errors, 2 when inputs fail to load or validate.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::response::{
    admissibility_check, best_response_det, best_response_mix, cheap_set, expensive_set, gaming_set,
    half_positive_set, joint_gaming_set, nonsimultaneous_set, PointSet, ResponseMap,
};
use crate::risk::{decompose_deterministic, decompose_pair_mixture, empirical_strategic_risk, lemma1_check, risk_report};
use crate::scenario::{gen_annulus, gen_redundant, AnnulusConfig, RedundantConfig};
use crate::serm::{serm_deterministic, serm_randomised, SearchSpace, DEFAULT_RESOLUTION};
use crate::theory::{
    bound_table, bound_table_csv, excess_risk_experiment, rademacher_estimate, sup_rademacher, theorem1_check,
    BoundParams, ConvergenceConfig, SigmaMode, DEFAULT_SIGMA_DRAWS,
};
use crate::world::{parse_world, sample_dataset, serialize_world, validate_world, Dataset, Mixture, Problem, World};

#[derive(Parser, Debug)]
#[command(name = "stratlab", version, about = "Strategic classification with randomised classifiers on finite worlds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a world document and report every violation.
    Validate(WorldOut),
    /// Best response to a hypothesis or mixture.
    Respond(RespondArgs),
    /// Gaming sets of one hypothesis, or of a pair.
    Sets(PairArgs),
    /// Clean and strategic risk, plus empirical risk when a dataset is given.
    Risk(RiskArgs),
    /// Risk decomposition of one hypothesis, or of the uniform pair mixture.
    Decompose(PairArgs),
    /// Strategic ERM over the hypotheses.
    Serm(DataArgs),
    /// Strategic ERM over mixtures on a simplex grid.
    SermRand(SermRandArgs),
    /// Conditions under which mixing two optimal hypotheses helps.
    CheckThm1(GridArgs),
    /// Rademacher complexity of the strategic loss class.
    Rademacher(RademacherArgs),
    /// Excess-risk convergence experiment.
    Converge(ConvergeArgs),
    /// Closed-form generalisation bounds.
    Bounds(BoundsArgs),
    /// Generate a scenario world.
    Scenario(ScenarioArgs),
    /// Draw a dataset from a world.
    Sample(SampleArgs),
    /// Plot a 2-D world with point sets overlaid.
    Render(RenderArgs),
}

#[derive(Args, Debug)]
struct WorldOut {
    #[arg(long)]
    world: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Classifier {
    /// Hypothesis name.
    #[arg(long, conflicts_with = "mixture")]
    hypothesis: Option<String>,
    /// Comma-separated mixture weights in class order.
    #[arg(long, value_delimiter = ',')]
    mixture: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct RespondArgs {
    #[command(flatten)]
    io: WorldOut,
    #[command(flatten)]
    classifier: Classifier,
}

#[derive(Args, Debug)]
struct PairArgs {
    #[command(flatten)]
    io: WorldOut,
    /// First hypothesis.
    #[arg(long)]
    f: String,
    /// Optional second hypothesis.
    #[arg(long)]
    g: Option<String>,
}

#[derive(Args, Debug)]
struct RiskArgs {
    #[command(flatten)]
    io: WorldOut,
    #[command(flatten)]
    classifier: Classifier,
    #[arg(long)]
    dataset: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DataArgs {
    #[command(flatten)]
    io: WorldOut,
    #[arg(long)]
    dataset: PathBuf,
}

#[derive(Args, Debug)]
struct SermRandArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    grid_k: u32,
    /// Search point masses and uniform pairs only.
    #[arg(long)]
    pairs_only: bool,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[command(flatten)]
    io: WorldOut,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    grid_k: u32,
}

#[derive(Args, Debug)]
struct RademacherArgs {
    #[command(flatten)]
    io: WorldOut,
    /// Response map: best response to this classifier; identity when omitted.
    #[command(flatten)]
    classifier: Classifier,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_SIGMA_DRAWS)]
    sigma_draws: usize,
    #[arg(long, default_value_t = 20)]
    dataset_draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Enumerate all sign vectors (n <= 20).
    #[arg(long)]
    exact: bool,
    /// Report the supremum over a grid of mixtures at this resolution instead.
    #[arg(long)]
    grid_k: Option<u32>,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    #[command(flatten)]
    io: WorldOut,
    #[arg(long)]
    grid_k: Option<u32>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sigma_draws: Option<usize>,
    #[arg(long)]
    dataset_draws: Option<usize>,
    /// Learn over hypotheses instead of mixtures.
    #[arg(long)]
    deterministic: bool,
    /// JSON document overriding the flags above.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 1.0)]
    d: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[arg(long, default_value_t = 1.0)]
    x: f64,
    #[arg(long, default_value_t = 1.0)]
    u_star: f64,
    #[arg(long, default_value_t = 2)]
    class_size: usize,
    /// Absolute constant of the strategic VC rate.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    #[arg(value_enum)]
    kind: ScenarioKind,
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON document overriding the scenario flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    inner_radius: Option<f64>,
    #[arg(long)]
    gap_radius: Option<f64>,
    #[arg(long)]
    outer_radius: Option<f64>,
    #[arg(long)]
    angular_bins: Option<usize>,
    #[arg(long)]
    radial_bins: Option<usize>,
    #[arg(long)]
    cost_scale: Option<f64>,
    #[arg(long)]
    class_balance: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    extra_rotations: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    cost_scale_a: Option<f64>,
    #[arg(long)]
    cost_scale_b: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ScenarioKind {
    Annulus,
    Redundant,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    io: WorldOut,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[arg(long)]
    world: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overlay `ROLE:f` (G, C, E) or `ROLE:f,g` (GJOINT, N, HHALF); repeatable.
    #[arg(long = "set")]
    sets: Vec<String>,
}

/// Runs the CLI on `argv` (including the program name).
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            2
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Validate(io) => validate(&io),
        Command::Respond(a) => {
            let p = load(&a.io.world)?;
            let delta = response_for(&p, &a.classifier)?;
            emit_json(a.io.out.as_deref(), &delta.to_json(&p.world))
        }
        Command::Sets(a) => sets(&a),
        Command::Risk(a) => risk(&a),
        Command::Decompose(a) => decompose(&a),
        Command::Serm(a) => {
            let (p, d) = load_with_data(&a)?;
            emit_json(a.io.out.as_deref(), &serm_deterministic(&d, &p.world, &p.class)?)
        }
        Command::SermRand(a) => {
            let (p, d) = load_with_data(&a.data)?;
            let space = if a.pairs_only { SearchSpace::PairsOnly } else { SearchSpace::Grid(a.grid_k) };
            emit_json(a.data.io.out.as_deref(), &serm_randomised(&d, &p.world, &p.class, space)?)
        }
        Command::CheckThm1(a) => {
            let p = load(&a.io.world)?;
            emit_json(a.io.out.as_deref(), &theorem1_check(&p.world, &p.class, a.grid_k)?)
        }
        Command::Rademacher(a) => rademacher(&a),
        Command::Converge(a) => converge(&a),
        Command::Bounds(a) => {
            let params = BoundParams {
                n: a.n,
                delta: a.delta,
                d: a.d,
                b: a.b,
                x: a.x,
                u_star: a.u_star,
                class_size: a.class_size,
                c: a.c,
            };
            let rows = bound_table(&params)?;
            if is_json(a.out.as_deref()) {
                emit_json(a.out.as_deref(), &rows)
            } else {
                emit(a.out.as_deref(), &bound_table_csv(&rows))
            }
        }
        Command::Scenario(a) => scenario(&a),
        Command::Sample(a) => {
            let p = load(&a.io.world)?;
            let d = sample_dataset(&p.world, a.n, a.seed)?;
            emit(a.io.out.as_deref(), &d.to_csv(&p.world)?)
        }
        Command::Render(a) => {
            let p = load(&a.world)?;
            let sets = a.sets.iter().map(|s| parse_set(&p, s)).collect::<Result<Vec<_>>>()?;
            crate::render::render_regions(&p.world, &sets, &a.out)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(Error::from)
}

fn load(path: &Path) -> Result<Problem> {
    parse_world(&read(path)?)
}

fn load_with_data(a: &DataArgs) -> Result<(Problem, Dataset)> {
    let p = load(&a.io.world)?;
    let d = Dataset::from_csv(&read(&a.dataset)?, &p.world)?;
    Ok((p, d))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialise");
    text.push('\n');
    emit(out, &text)
}

fn is_json(out: Option<&Path>) -> bool {
    out.and_then(|p| p.extension()).is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn validate(io: &WorldOut) -> Result<()> {
    match load(&io.world) {
        Ok(p) => {
            let report = validate_world(&p.world);
            emit_json(io.out.as_deref(), &json!({ "valid": true, "violations": report.violations }))
        }
        Err(Error::InvalidWorld(report)) => {
            emit_json(io.out.as_deref(), &json!({ "valid": false, "violations": report.violations }))?;
            Err(Error::InvalidWorld(report))
        }
        Err(e) => Err(e),
    }
}

fn mixture_for(p: &Problem, c: &Classifier) -> Result<Mixture> {
    match (&c.hypothesis, &c.mixture) {
        (Some(name), _) => Mixture::point_mass(p.hypothesis_index(name)?, p.class.len()),
        (None, Some(w)) => {
            let q = Mixture::new(w.clone())?;
            q.check_class(&p.class)?;
            Ok(q)
        }
        (None, None) => Err(Error::InvalidArgument("give --hypothesis or --mixture".into())),
    }
}

fn response_for(p: &Problem, c: &Classifier) -> Result<ResponseMap> {
    match &c.hypothesis {
        Some(name) => best_response_det(&p.world, p.class.get(p.hypothesis_index(name)?)),
        None => best_response_mix(&p.world, &p.class, &mixture_for(p, c)?),
    }
}

fn sets(a: &PairArgs) -> Result<()> {
    let p = load(&a.io.world)?;
    let w = &p.world;
    let f = p.class.get(p.hypothesis_index(&a.f)?);
    let mut doc = serde_json::Map::new();
    doc.insert("G".into(), gaming_set(w, f)?.to_json(w));
    doc.insert("C".into(), cheap_set(w, f)?.to_json(w));
    doc.insert("E".into(), expensive_set(w, f)?.to_json(w));
    if let Some(g) = &a.g {
        let g = p.class.get(p.hypothesis_index(g)?);
        doc.insert("G_prime".into(), gaming_set(w, g)?.to_json(w));
        doc.insert("C_prime".into(), cheap_set(w, g)?.to_json(w));
        doc.insert("E_prime".into(), expensive_set(w, g)?.to_json(w));
        doc.insert("G_JOINT".into(), joint_gaming_set(w, f, g)?.to_json(w));
        doc.insert("N".into(), nonsimultaneous_set(w, f, g)?.to_json(w));
        doc.insert("H_HALF".into(), half_positive_set(w, f, g)?.to_json(w));
        let adm = admissibility_check(w, f, g)?;
        let violations: Vec<Value> = adm
            .violating_points
            .iter()
            .map(|(i, r)| json!({ "point": w.points()[*i].id, "reason": r }))
            .collect();
        doc.insert("admissible".into(), json!(adm.admissible));
        doc.insert("violations".into(), Value::Array(violations));
    }
    emit_json(a.io.out.as_deref(), &Value::Object(doc))
}

fn risk(a: &RiskArgs) -> Result<()> {
    let p = load(&a.io.world)?;
    let q = mixture_for(&p, &a.classifier)?;
    let report = risk_report(&p.world, &p.class, &q)?;
    let mut doc = serde_json::to_value(&report).expect("risk report serialises");
    if let Some(path) = &a.dataset {
        let d = Dataset::from_csv(&read(path)?, &p.world)?;
        let delta = best_response_mix(&p.world, &p.class, &q)?;
        doc["empirical_strategic_risk"] = json!(empirical_strategic_risk(&d, &p.class, &q, &delta)?);
        doc["dataset_size"] = json!(d.len());
    }
    emit_json(a.io.out.as_deref(), &doc)
}

fn decompose(a: &PairArgs) -> Result<()> {
    let p = load(&a.io.world)?;
    let f = p.class.get(p.hypothesis_index(&a.f)?);
    let doc = match &a.g {
        None => serde_json::to_value(decompose_deterministic(&p.world, f)?),
        Some(g) => {
            let g = p.class.get(p.hypothesis_index(g)?);
            Ok(json!({
                "pair": decompose_pair_mixture(&p.world, f, g)?,
                "lemma1": lemma1_check(&p.world, f, g)?,
            }))
        }
    }
    .expect("decomposition serialises");
    emit_json(a.io.out.as_deref(), &doc)
}

fn rademacher(a: &RademacherArgs) -> Result<()> {
    let p = load(&a.io.world)?;
    let sigma = if a.exact { SigmaMode::Exact } else { SigmaMode::MonteCarlo(a.sigma_draws) };
    if let Some(k) = a.grid_k {
        let sup = sup_rademacher(&p.world, &p.class, k, a.n, sigma, a.dataset_draws, a.seed)?;
        return emit_json(a.io.out.as_deref(), &sup);
    }
    let delta = if a.classifier.hypothesis.is_some() || a.classifier.mixture.is_some() {
        response_for(&p, &a.classifier)?
    } else {
        ResponseMap::identity(p.world.len())
    };
    let est = rademacher_estimate(&p.world, &p.class, &delta, a.n, sigma, a.dataset_draws, a.seed)?;
    emit_json(a.io.out.as_deref(), &est)
}

/// Serialises `base`, overlays the keys of the JSON document at `path`,
/// and deserialises the result.
fn overlay<T: Serialize + serde::de::DeserializeOwned>(base: T, path: Option<&Path>) -> Result<T> {
    let Some(path) = path else { return Ok(base) };
    let text = read(path)?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let Value::Object(over) = doc else {
        return Err(Error::Config(format!("{}: expected a JSON object", path.display())));
    };
    let mut merged = serde_json::to_value(base).expect("configs serialise");
    for (k, v) in over {
        merged[k] = v;
    }
    serde_json::from_value(merged).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn converge(a: &ConvergeArgs) -> Result<()> {
    let p = load(&a.io.world)?;
    let d = ConvergenceConfig::default();
    let cfg = ConvergenceConfig {
        grid_k: a.grid_k.unwrap_or(d.grid_k),
        n_list: a.n.clone().unwrap_or(d.n_list),
        trials: a.trials.unwrap_or(d.trials),
        delta: a.delta.unwrap_or(d.delta),
        seed: a.seed.unwrap_or(d.seed),
        deterministic: a.deterministic,
        sigma_draws: a.sigma_draws.unwrap_or(d.sigma_draws),
        dataset_draws: a.dataset_draws.unwrap_or(d.dataset_draws),
    };
    let cfg = overlay(cfg, a.config.as_deref())?;
    let report = excess_risk_experiment(&p.world, &p.class, &cfg)?;
    if a.io.out.as_deref().and_then(|p| p.extension()).is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        emit(a.io.out.as_deref(), &report.to_csv())
    } else {
        emit_json(a.io.out.as_deref(), &report)
    }
}

fn scenario(a: &ScenarioArgs) -> Result<()> {
    let problem = match a.kind {
        ScenarioKind::Annulus => {
            let d = AnnulusConfig::default();
            let cfg = AnnulusConfig {
                inner_radius: a.inner_radius.unwrap_or(d.inner_radius),
                gap_radius: a.gap_radius.unwrap_or(d.gap_radius),
                outer_radius: a.outer_radius.unwrap_or(d.outer_radius),
                angular_bins: a.angular_bins.unwrap_or(d.angular_bins),
                radial_bins: a.radial_bins.unwrap_or(d.radial_bins),
                cost_scale: a.cost_scale.unwrap_or(d.cost_scale),
                class_balance: a.class_balance.unwrap_or(d.class_balance),
                a: a.a.unwrap_or(d.a),
                b: a.b.unwrap_or(d.b),
                extra_rotations: a.extra_rotations.unwrap_or(d.extra_rotations),
            };
            gen_annulus(&overlay(cfg, a.config.as_deref())?)?
        }
        ScenarioKind::Redundant => {
            let d = RedundantConfig::default();
            let cfg = RedundantConfig {
                grid: a.grid.unwrap_or(d.grid),
                cost_scale_a: a.cost_scale_a.or(a.cost_scale).unwrap_or(d.cost_scale_a),
                cost_scale_b: a.cost_scale_b.or(a.cost_scale).unwrap_or(d.cost_scale_b),
                class_balance: a.class_balance.unwrap_or(d.class_balance),
            };
            gen_redundant(&overlay(cfg, a.config.as_deref())?)?
        }
    };
    emit(a.out.as_deref(), &serialize_world(&problem))
}

fn parse_set(p: &Problem, arg: &str) -> Result<(String, PointSet)> {
    let bad = || Error::InvalidArgument(format!("cannot parse set overlay '{arg}'; expected ROLE:f or ROLE:f,g"));
    let (role, names) = arg.split_once(':').ok_or_else(bad)?;
    let names: Vec<&str> = names.split(',').collect();
    let w: &World = &p.world;
    let h = |k: usize| -> Result<_> { Ok(p.class.get(p.hypothesis_index(names.get(k).ok_or_else(bad)?)?)) };
    let set = match (role.to_ascii_uppercase().as_str(), names.len()) {
        ("G", 1) => gaming_set(w, h(0)?)?,
        ("C", 1) => cheap_set(w, h(0)?)?,
        ("E", 1) => expensive_set(w, h(0)?)?,
        ("GJOINT" | "G_JOINT", 2) => joint_gaming_set(w, h(0)?, h(1)?)?,
        ("N", 2) => nonsimultaneous_set(w, h(0)?, h(1)?)?,
        ("HHALF" | "H_HALF", 2) => half_positive_set(w, h(0)?, h(1)?)?,
        _ => return Err(bad()),
    };
    Ok((arg.to_string(), set))
}
