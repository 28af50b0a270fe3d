//! `k3attr`: runs attractor, mirror and stability checks on a scenario file
//! and prints a JSON report.
//!
//! Exit codes: 0 success, 1 parse or usage error, 2 the charge has no
//! attractor point, 3 a check failed with a counterexample, 4 the Kähler
//! search ran out of candidates, 5 a precondition of the computation failed.

mod report;
mod scenario_file;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use k3_attractor::attractor::{solve_attractor, verify_attractor, AttractorError};
use k3_attractor::forms::{enumerate_reduced, gauss_reduce, sl2_equivalent, BinaryEvenForm};
use k3_attractor::lattice::LatticeError;
use k3_attractor::mirror::{mirror_involution_check, MirrorError};
use k3_attractor::scenario::{verify_threefold, Scenario, ScenarioError};
use k3_attractor::stability::{
    central_charge, class_charges, is_positive_plane, kahler_search, ns_of_mirror, p0_falsifier, pairwise_walls,
    plane_gram, type4_certificate, verify_reality, verify_wall_intersection, KahlerReport,
    MukaiVector, StabilityError, Type4Outcome,
};
use serde_json::{json, Value};

use report::{render, value};
use scenario_file::{omega0, ScenarioFile};

const BOUND_NOTE: &str = "no (-2)-class found up to the bound; classes beyond it are not certified";

#[derive(Debug)]
pub enum Failure {
    Parse(String),
    Attractor(String),
    Counterexample(Value),
    Exhausted(Value),
    Precondition(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 1,
            Failure::Attractor(_) => 2,
            Failure::Counterexample(_) => 3,
            Failure::Exhausted(_) => 4,
            Failure::Precondition(_) => 5,
        }
    }
}

impl From<AttractorError> for Failure {
    fn from(e: AttractorError) -> Self {
        match e {
            AttractorError::DegenerateCharge(_) | AttractorError::NotAttractor(_) => {
                Failure::Attractor(e.to_string())
            }
            AttractorError::Lattice(_) => Failure::Parse(e.to_string()),
            _ => Failure::Precondition(e.to_string()),
        }
    }
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        Failure::Parse(e.to_string())
    }
}

impl From<MirrorError> for Failure {
    fn from(e: MirrorError) -> Self {
        Failure::Precondition(e.to_string())
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Attractor(a) => a.into(),
            ScenarioError::Stability(s) => (*s).into(),
            other => Failure::Precondition(other.to_string()),
        }
    }
}

impl From<StabilityError> for Failure {
    fn from(e: StabilityError) -> Self {
        match e {
            StabilityError::Scenario(s) => (*s).into(),
            StabilityError::SearchExhausted { tried, best } => Failure::Exhausted(json!({
                "status": "exhausted",
                "tried": tried,
                "best": value(&best),
            })),
            other => Failure::Precondition(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "k3attr", version, about = "Exact certificates for K3 attractor mirrors")]
struct Cli {
    /// Scenario file (JSON).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Shorthand for a scenario with the standard realization of a form, e.g. "2,0,8".
    #[arg(long, global = true, value_parser = parse_form_triple, allow_hyphen_values = true)]
    form: Option<[i64; 3]>,
    /// Coefficient box for the (-2)-class enumeration.
    #[arg(long, global = true)]
    bound: Option<u32>,
    /// Number of Kähler search candidates.
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Add decimal renderings next to exact values.
    #[arg(long, global = true)]
    float: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the attractor equation for the charge.
    Attractor,
    /// Binary even forms.
    Forms {
        #[command(subcommand)]
        op: FormsOp,
    },
    /// Mirror period, Kähler class and B-field.
    Mirror,
    /// Central charges of the mirror classes of the Picard basis.
    Charge,
    /// Pairwise generalized walls after sign normalization.
    Walls,
    /// Run one of the certificate checks.
    Verify {
        #[arg(value_enum)]
        check: Check,
    },
}

#[derive(Subcommand)]
enum FormsOp {
    /// Gauss reduction with its witness.
    Reduce {
        #[arg(value_parser = parse_form, allow_hyphen_values = true)]
        input: BinaryEvenForm,
    },
    /// Proper equivalence of two forms.
    Equiv {
        #[arg(value_parser = parse_form, allow_hyphen_values = true)]
        first: BinaryEvenForm,
        #[arg(value_parser = parse_form, allow_hyphen_values = true)]
        second: BinaryEvenForm,
    },
    /// Every reduced form of a discriminant.
    Enumerate { discriminant: i64 },
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    /// Threefold central charges of the Picard classes are real.
    #[value(name = "5.1", alias = "threefold-reality")]
    ThreefoldReality,
    /// Mirror central charges of the Picard classes are real.
    #[value(name = "6.2", alias = "mirror-reality")]
    MirrorReality,
    /// The mirror stability point avoids every (-2)-class.
    #[value(name = "6.3", alias = "p0")]
    P0Membership,
    /// The stability point lies on every pairwise generalized wall.
    #[value(name = "6.4", alias = "walls")]
    WallIntersection,
}

impl Check {
    fn id(self) -> &'static str {
        match self {
            Check::ThreefoldReality => "5.1",
            Check::MirrorReality => "6.2",
            Check::P0Membership => "6.3",
            Check::WallIntersection => "6.4",
        }
    }
}

fn parse_form_triple(s: &str) -> Result<[i64; 3], String> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    let parts: Vec<i64> = inner
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    <[i64; 3]>::try_from(parts).map_err(|_| "expected three integers a,b,c".to_string())
}

fn parse_form(s: &str) -> Result<BinaryEvenForm, String> {
    let [a, b, c] = parse_form_triple(s)?;
    BinaryEvenForm::new(a, b, c).map_err(|e| e.to_string())
}

struct Context {
    file: ScenarioFile,
    bound: Option<u32>,
    max_iter: Option<usize>,
}

/// A scenario at its final Kähler representative.
struct Built {
    scenario: Scenario,
    search: Option<KahlerReport>,
    bound: u32,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self, Failure> {
        let file = match (&cli.scenario, cli.form) {
            (Some(path), None) => ScenarioFile::read(path)?,
            (None, Some(form)) => ScenarioFile::from_form(form),
            (Some(_), Some(_)) => return Err(Failure::Parse("give --scenario or --form, not both".into())),
            (None, None) => return Err(Failure::Parse("this command needs --scenario or --form".into())),
        };
        Ok(Context {
            file,
            bound: cli.bound,
            max_iter: cli.max_iter,
        })
    }

    fn bound(&self) -> u32 {
        self.bound.or(self.file.bound).unwrap_or(3)
    }

    /// `field` is the library's tag, with 0 for the rationals; files may say 1.
    fn check_field(&self, field: u64) -> Result<(), Failure> {
        let name = |m: u64| if m <= 1 { "Q".to_string() } else { format!("Q(sqrt {m})") };
        match self.file.field {
            Some(m) if name(m) != name(field) => Err(Failure::Precondition(format!(
                "scenario expects {} but the attractor lives in {}",
                name(m),
                name(field)
            ))),
            _ => Ok(()),
        }
    }

    fn build(&self) -> Result<Built, Failure> {
        let split = self.file.split()?;
        let charge = self.file.charge()?;
        let b = self.file.b_field()?;
        let bound = self.bound();
        let explicit = self.file.explicit_omega(&split)?;
        let start = explicit.clone().unwrap_or_else(|| omega0(&split));
        let base = Scenario::assemble(charge, split, &start, &b)?;
        self.check_field(base.attractor.field)?;
        if explicit.is_some() {
            return Ok(Built {
                scenario: base,
                search: None,
                bound,
            });
        }
        let mut params = self.file.params(&base)?;
        params.bound = bound;
        if let Some(n) = self.max_iter {
            params.max_iter = n;
        }
        match kahler_search(&base, &params) {
            Ok(report) => Ok(Built {
                scenario: base.with_omega_j(&report.omega_j)?,
                search: Some(report),
                bound,
            }),
            Err(StabilityError::Obstructed { delta }) => {
                let type4 = type4_certificate(&base.charge, &base.split)?;
                Err(Failure::Counterexample(json!({
                    "status": "fail",
                    "reason": "a (-2)-class is orthogonal to the stability point for every Kähler class",
                    "delta": value(&delta),
                    "type4": value(&type4),
                })))
            }
            Err(e) => Err(e.into()),
        }
    }

    fn echo(&self) -> Value {
        value(&self.file)
    }
}

fn scenario_head(ctx: &Context, built: &Built) -> Value {
    let s = &built.scenario;
    json!({
        "scenario": ctx.echo(),
        "omega_j": value(&s.attractor.omega_j),
        "search": built.search.as_ref().map(|r| json!({
            "candidate_index": r.candidate_index,
            "candidates_examined": r.candidates_examined,
        })),
    })
}

fn merge(mut head: Value, extra: Value) -> Value {
    if let (Value::Object(h), Value::Object(e)) = (&mut head, extra) {
        h.extend(e);
    }
    head
}

fn cmd_attractor(ctx: &Context) -> Result<Value, Failure> {
    let charge = ctx.file.charge()?;
    let (tau, period) = solve_attractor(&charge)?;
    let lambda = verify_attractor(&charge, &tau, &period)?;
    let field = tau.field();
    ctx.check_field(field)?;
    Ok(json!({
        "scenario": ctx.echo(),
        "status": "pass",
        "p": value(&charge.p),
        "q": value(&charge.q),
        "discriminant": charge.discriminant().to_string(),
        "field": field,
        "tau": tau.to_string(),
        "period": value(&period),
        "lambda": lambda.to_string(),
    }))
}

fn cmd_forms(op: &FormsOp) -> Result<Value, Failure> {
    Ok(match op {
        FormsOp::Reduce { input } => {
            let (reduced, witness) = gauss_reduce(input);
            json!({
                "form": value(input),
                "discriminant": input.discriminant(),
                "reduced": value(&reduced),
                "witness": value(&witness),
                "relation": "form = witness^T reduced witness",
            })
        }
        FormsOp::Equiv { first, second } => {
            let witness = sl2_equivalent(first, second);
            json!({
                "first": value(first),
                "second": value(second),
                "equivalent": witness.is_some(),
                "witness": value(&witness),
                "relation": "first = witness^T second witness",
            })
        }
        FormsOp::Enumerate { discriminant } => {
            let forms = enumerate_reduced(*discriminant);
            json!({
                "discriminant": discriminant,
                "count": forms.len(),
                "forms": value(&forms),
            })
        }
    })
}

fn cmd_mirror(ctx: &Context) -> Result<Value, Failure> {
    let built = ctx.build()?;
    let s = &built.scenario;
    let involution = mirror_involution_check(
        &s.split,
        &s.attractor.period_i(),
        &s.attractor.omega_i,
        &s.b_field,
    )?;
    Ok(merge(
        scenario_head(ctx, &built),
        json!({
            "status": "pass",
            "tau": s.attractor.tau.to_string(),
            "period_i": value(&s.attractor.period_i()),
            "omega_i": value(&s.attractor.omega_i),
            "normalized": s.attractor.is_normalized,
            "mirror": value(&s.mirror),
            "psi": value(&s.psi),
            "involution": value(&involution),
        }),
    ))
}

fn cmd_charge(ctx: &Context) -> Result<Value, Failure> {
    let built = ctx.build()?;
    let charges = class_charges(&built.scenario)?;
    let real = charges.iter().filter(|c| c.z.is_real()).count();
    Ok(merge(
        scenario_head(ctx, &built),
        json!({
            "status": "pass",
            "real": format!("{real}/{}", charges.len()),
            "charges": value(&charges),
        }),
    ))
}

/// Sign-normalized wall table without a verdict.
fn cmd_walls(ctx: &Context) -> Result<Value, Failure> {
    let built = ctx.build()?;
    let mut charges = class_charges(&built.scenario)?;
    let mut flipped = Vec::new();
    for c in charges.iter_mut() {
        let flip = c.z.re.is_negative();
        if flip {
            c.class = -&c.class;
            c.mukai = c.mukai.neg();
            c.z = -&c.z;
        }
        flipped.push(flip);
    }
    let classes: Vec<MukaiVector> = charges.iter().map(|c| c.mukai.clone()).collect();
    let walls = pairwise_walls(&built.scenario.psi, &classes)?;
    let members = walls.iter().filter(|w| w.member).count();
    Ok(merge(
        scenario_head(ctx, &built),
        json!({
            "summary": format!("{members}/{} walls after {} sign flips", walls.len(),
                flipped.iter().filter(|f| **f).count()),
            "flipped": flipped,
            "charges": value(&charges),
            "walls": value(&walls),
        }),
    ))
}

fn verify_walls(ctx: &Context) -> Result<Value, Failure> {
    let built = ctx.build()?;
    let s = &built.scenario;
    let head = scenario_head(ctx, &built);
    let check_id = Check::WallIntersection.id();
    match verify_wall_intersection(s) {
        Ok(r) => Ok(merge(
            head,
            json!({
                "check": check_id,
                "status": "pass",
                "summary": format!("{}/{} walls after {} sign flips", r.members, r.walls.len(),
                    r.flipped.iter().filter(|f| **f).count()),
                "flipped": r.flipped,
                "charges": value(&r.charges),
                "walls": value(&r.walls),
            }),
        )),
        Err(StabilityError::WallFailure { i, j }) => {
            let charges = class_charges(s)?;
            Err(Failure::Counterexample(merge(
                head,
                json!({
                    "check": check_id,
                    "status": "fail",
                    "pair": [i, j],
                    "z1": value(&charges[i].z),
                    "z2": value(&charges[j].z),
                    "charges": value(&charges),
                }),
            )))
        }
        Err(StabilityError::RealityViolation { index, value: z }) => Err(Failure::Counterexample(merge(
            head,
            json!({"check": check_id, "status": "fail", "class": index, "z": z}),
        ))),
        Err(e) => Err(e.into()),
    }
}

fn verify_threefold_reality(ctx: &Context) -> Result<Value, Failure> {
    let built = ctx.build()?;
    let head = scenario_head(ctx, &built);
    match verify_threefold(&built.scenario) {
        Ok(rows) => Ok(merge(
            head,
            json!({
                "check": Check::ThreefoldReality.id(),
                "status": "pass",
                "summary": format!("{} real charges", rows.len()),
                "charges": value(&rows),
            }),
        )),
        Err(ScenarioError::ThreefoldMismatch { index, value: z, expected }) => {
            Err(Failure::Counterexample(merge(
                head,
                json!({
                    "check": Check::ThreefoldReality.id(),
                    "status": "fail",
                    "class": index,
                    "z": z,
                    "expected": expected,
                }),
            )))
        }
        Err(e) => Err(e.into()),
    }
}

fn verify_mirror_reality(ctx: &Context) -> Result<Value, Failure> {
    let built = ctx.build()?;
    let head = scenario_head(ctx, &built);
    match verify_reality(&built.scenario) {
        Ok(r) => Ok(merge(
            head,
            json!({
                "check": Check::MirrorReality.id(),
                "status": "pass",
                "summary": format!("{} real charges", r.charges.len()),
                "charges": value(&r.charges),
            }),
        )),
        Err(StabilityError::RealityViolation { index, value: z }) => Err(Failure::Counterexample(merge(
            head,
            json!({"check": Check::MirrorReality.id(), "status": "fail", "class": index, "z": z}),
        ))),
        Err(e) => Err(e.into()),
    }
}

fn obstruction(psi_pairing: String, delta: &MukaiVector, source: &str) -> Value {
    json!({
        "status": "fail",
        "source": source,
        "delta": value(delta),
        "pairing": psi_pairing,
    })
}

fn verify_p0(ctx: &Context) -> Result<Value, Failure> {
    let id = Check::P0Membership.id();
    let built = match ctx.build() {
        Err(Failure::Counterexample(v)) => {
            return Err(Failure::Counterexample(merge(
                json!({"scenario": ctx.echo(), "check": id, "source": "type4"}),
                v,
            )))
        }
        other => other?,
    };
    let s = &built.scenario;
    let head = merge(scenario_head(ctx, &built), json!({"check": id, "bound": built.bound}));
    let type4 = type4_certificate(&s.charge, &s.split)?;
    let falsifier = p0_falsifier(&s.psi, &ns_of_mirror(&s.mirror.period), built.bound)?;
    let gram = plane_gram(&s.psi);
    let details = json!({
        "type4": value(&type4),
        "falsifier": value(&falsifier),
        "plane_gram": value(&gram),
    });
    let fail = |delta: &MukaiVector, source: &str| -> Result<Value, Failure> {
        let z = central_charge(&s.psi, delta)?;
        Err(Failure::Counterexample(merge(
            merge(head.clone(), details.clone()),
            obstruction(z.to_string(), delta, source),
        )))
    };
    if let Type4Outcome::Counterexample { delta, .. } = &type4 {
        return fail(delta, "type4");
    }
    if let Some(delta) = &falsifier.hit {
        return fail(delta, "falsifier");
    }
    if let Some(delta) = falsifier.first_complete_hit() {
        return fail(delta, "falsifier");
    }
    if !is_positive_plane(&s.psi) {
        return Err(Failure::Counterexample(merge(
            merge(head, details),
            json!({"status": "fail", "reason": "Re and Im of Psi do not span a positive plane"}),
        )));
    }
    Ok(merge(
        merge(head, details),
        json!({"status": "pass", "note": BOUND_NOTE}),
    ))
}

fn run(cli: &Cli) -> Result<Value, Failure> {
    if let Command::Forms { op } = &cli.command {
        return cmd_forms(op);
    }
    let ctx = Context::new(cli)?;
    match &cli.command {
        Command::Attractor => cmd_attractor(&ctx),
        Command::Forms { .. } => unreachable!("handled above"),
        Command::Mirror => cmd_mirror(&ctx),
        Command::Charge => cmd_charge(&ctx),
        Command::Walls => cmd_walls(&ctx),
        Command::Verify { check } => match check {
            Check::ThreefoldReality => verify_threefold_reality(&ctx),
            Check::MirrorReality => verify_mirror_reality(&ctx),
            Check::P0Membership => verify_p0(&ctx),
            Check::WallIntersection => verify_walls(&ctx),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(v) => {
            println!("{}", render(v, cli.float));
            ExitCode::SUCCESS
        }
        Err(f) => {
            let code = f.code();
            match f {
                Failure::Counterexample(v) | Failure::Exhausted(v) => {
                    println!("{}", render(v, cli.float));
                }
                Failure::Parse(m) | Failure::Attractor(m) | Failure::Precondition(m) => {
                    eprintln!("error: {m}");
                }
            }
            ExitCode::from(code)
        }
    }
}
