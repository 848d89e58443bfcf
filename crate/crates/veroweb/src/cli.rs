//! Batch commands behind the `veroweb` binary. Exit status 0 means the
//! checked property holds, 1 that it verifiably fails, 2 that the input
//! was malformed or violated a precondition.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::exact::jet::JetSeries;
use crate::exact::scalar::{Field, Q, QI};
use crate::exterior::MultiVector;
use crate::io::{self, At, Doc, SchemaError};
use crate::pencil::{self, BivectorPair, PencilInvariants};
use crate::sample;
use crate::solver::{self, ProblemFrame};
use crate::tensor::{self, FoliationSpec, JetForm, WebReport};
use crate::veronese::{self, AdmissibleCouple};

pub const REPORT_SCHEMA: &str = "veroweb/report@1";
pub const DEFAULT_SEED: u64 = 20240915;

#[derive(Parser, Debug)]
#[command(name = "veroweb", version, about = "Exact checks for Veronese webs, bivector pencils and versal models")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub group: Group,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Jet truncation order.
    #[arg(long, global = true, default_value_t = solver::default_order())]
    pub order: i32,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, value_enum, default_value_t = FieldMode::Rational)]
    pub field: FieldMode,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldMode {
    Rational,
    QuadraticExtension,
}

impl FieldMode {
    fn name(self) -> &'static str {
        match self {
            FieldMode::Rational => Q::MODE,
            FieldMode::QuadraticExtension => QI::MODE,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Group {
    /// Veronese curves of admissible couples.
    #[command(subcommand)]
    Curve(CurveCmd),
    /// Normal form of admissible couples.
    #[command(subcommand)]
    Couple(CoupleCmd),
    /// Pairs of skew forms.
    #[command(subcommand)]
    Pencil(PencilCmd),
    /// Formal webs on jets.
    #[command(subcommand)]
    Web(WebCmd),
    /// Versal models of codimension-one webs.
    #[command(subcommand)]
    Versal(VersalCmd),
}

#[derive(Subcommand, Debug)]
pub enum CurveCmd {
    /// Build γ(t) from {"J": matrix, "W": subspace, "top"?: multivector}.
    Build {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum CoupleCmd {
    /// Block normal form of {"J", "W"}.
    Normalize {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum PencilCmd {
    /// Invariants of {"lambda": skew matrix, "lambda1": skew matrix}.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Genericity of one pair (--in) or of seeded random pairs.
    GenericTest {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Odd dimensions to sample.
        #[arg(long, value_delimiter = ',', default_values_t = vec![3usize, 5, 7])]
        dims: Vec<usize>,
        /// Pairs per dimension; passes when at least 95% are generic.
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum WebCmd {
    /// {"J", "beta"?, "foliation"} or {"curve": [r-forms]}.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Parameter values for the involutivity check (raised to the minimum needed).
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// {"alphas": [1-forms], "J", "omega": 2-form}.
    Compat {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum VersalCmd {
    /// Solve for a germ {"germ": [series in (s, y)]}; --a lists a₁..a_{n−1} then a.
    Solve {
        #[arg(long)]
        germ: PathBuf,
        /// Distinct rationals, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        a: Vec<String>,
    },
    /// Homothety b with other(s, y) = germ(bs, by), if any.
    Equiv {
        #[arg(long)]
        germ: PathBuf,
        #[arg(long)]
        other: PathBuf,
    },
}

#[derive(Debug)]
pub enum CliError {
    Schema(SchemaError),
    Precondition(String),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Schema(e) => write!(f, "schema error at {e}"),
            CliError::Precondition(e) => write!(f, "precondition failed: {e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<SchemaError> for CliError {
    fn from(e: SchemaError) -> Self {
        CliError::Schema(e)
    }
}

fn pre(e: impl std::fmt::Display) -> CliError {
    CliError::Precondition(e.to_string())
}

/// A finished command: exit status and report body.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub ok: bool,
    pub body: Map<String, Value>,
}

impl Outcome {
    fn new(ok: bool) -> Self {
        Outcome { ok, body: Map::new() }
    }

    fn put(&mut self, k: &str, v: impl Into<Value>) -> &mut Self {
        self.body.insert(k.to_string(), v.into());
        self
    }
}

fn read(path: &PathBuf) -> Result<Doc, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(Doc::parse(&text)?)
}

fn usizes(v: &[usize]) -> Value {
    json!(v)
}

fn default_top<F: Field>(c: &AdmissibleCouple<F>) -> MultiVector<F> {
    let n = c.n();
    c.w.basis().iter().fold(MultiVector::scalar(n, F::one()), |acc, b| acc.wedge(&MultiVector::from_vector(b)))
}

fn couple<F: Field>(root: &At) -> Result<Result<AdmissibleCouple<F>, veronese::VeroneseError>, CliError> {
    root.check_schema("veroweb/couple")?;
    let jat = root.get("J")?;
    let j = jat.square::<F>()?;
    let wat = root.get("W")?;
    let w = wat.subspace::<F>()?;
    if w.ambient() != j.rows() {
        return Err(SchemaError {
            pointer: format!("{}/ambient", wat.ptr),
            message: format!("ambient dimension must be {}", j.rows()),
        }
        .into());
    }
    Ok(AdmissibleCouple::new(j, w))
}

fn curve_build<F: Field>(root: &At) -> Result<Outcome, CliError> {
    let c = match couple::<F>(root)? {
        Ok(c) => c,
        Err(e) => {
            let mut o = Outcome::new(false);
            o.put("admissible", false).put("reason", e.to_string());
            return Ok(o);
        }
    };
    let top = match root.opt("top")? {
        Some(t) => t.multivector::<F>()?,
        None => default_top(&c),
    };
    let vc = veronese::build_curve(&c, &top).map_err(pre)?;
    let (n, r) = (c.n(), c.r());
    let degree = vc.curve.degree().unwrap_or(0);
    let leading = vc.curve.coeff(n - r);
    let indep = veronese::derivatives_independent(&vc.curve, n, r);
    let ok = degree == n - r && leading == top && indep;
    let mut o = Outcome::new(ok);
    o.put("admissible", true)
        .put("n", n)
        .put("r", r)
        .put("chain", usizes(&c.chain()))
        .put("char_numbers", usizes(&vc.char_numbers))
        .put("degree", degree)
        .put("leading_equals_top", leading == top)
        .put("derivatives_independent", indep)
        .put("curve", io::poly_multivector(&vc.curve));
    Ok(o)
}

fn couple_normalize<F: Field>(root: &At) -> Result<Outcome, CliError> {
    let c = match couple::<F>(root)? {
        Ok(c) => c,
        Err(e) => {
            let mut o = Outcome::new(false);
            o.put("admissible", false).put("reason", e.to_string());
            return Ok(o);
        }
    };
    let nf = veronese::normalize_couple(&c).map_err(pre)?;
    let check = veronese::check_normal_form(&c, &nf);
    let mut o = Outcome::new(check.is_ok());
    o.put("admissible", true)
        .put("chain", usizes(&c.chain()))
        .put("dims", usizes(&nf.dims))
        .put("h", io::matrix(&nf.h))
        .put("e", Value::Array(nf.e.iter().map(|v| io::vector(v)).collect()))
        .put("blocks", Value::Array(nf.blocks.iter().map(io::subspace).collect()))
        .put("invariants_hold", check.is_ok());
    if let Err(e) = check {
        o.put("violation", e);
    }
    Ok(o)
}

fn pair(root: &At) -> Result<BivectorPair, CliError> {
    root.check_schema("veroweb/pair")?;
    let l = root.get("lambda")?;
    let b = l.square::<Q>()?;
    let l1 = root.get("lambda1")?;
    let b1 = l1.square::<Q>()?;
    if b1.rows() != b.rows() {
        return l1.err(format!("expected a {0}×{0} matrix", b.rows()))?;
    }
    BivectorPair::from_skew(&b, &b1)
        .map_err(|e| SchemaError { pointer: root.ptr.clone(), message: e.to_string() }.into())
}

pub fn invariants_json(inv: &PencilInvariants) -> Value {
    json!({
        "dim": inv.dim,
        "rank": inv.rank,
        "corank": inv.corank,
        "is_maximal": inv.is_maximal,
        "l0": io::subspace(&inv.l0),
        "l1": io::subspace(&inv.l1),
        "k_bar": io::matrix(&inv.k_bar),
        "symplectic_charpoly": io::poly(&inv.symplectic_charpoly),
        "symplectic_dim": inv.symplectic_dim(),
        "invariant_factors": inv.invariant_factors.iter().map(io::poly).collect::<Vec<_>>(),
        "elementary_divisors": inv.elementary_divisors.iter().map(|d| json!({
            "base": io::poly(&d.base), "exponent": d.exponent, "count": d.count
        })).collect::<Vec<_>>(),
        "factorization_complete": inv.factorization_complete,
        "web_char_numbers": inv.web_char_numbers,
        "exceptional_values": {
            "rational": inv.exceptional_values.rational.iter().map(io::q).collect::<Vec<_>>(),
            "irrational_factors": inv.exceptional_values.irrational_factors.iter().map(io::poly).collect::<Vec<_>>(),
        },
        "trace": inv.trace.iter().map(|s| json!({
            "t": io::q(&s.t), "corank": s.corank, "admissible": s.admissible, "core_dim": s.core_dim
        })).collect::<Vec<_>>(),
    })
}

fn pencil_classify(root: &At) -> Result<Outcome, CliError> {
    let p = pair(root)?;
    let inv = pencil::classify(&p).map_err(pre)?;
    let mut o = Outcome::new(true);
    o.put("invariants", invariants_json(&inv));
    Ok(o)
}

fn generic_test(common: &Common, input: &Option<PathBuf>, dims: &[usize], count: usize) -> Result<Outcome, CliError> {
    if let Some(path) = input {
        let doc = read(path)?;
        let p = pair(&doc.root())?;
        let g = pencil::is_generic(&p).map_err(pre)?;
        let mut o = Outcome::new(g);
        o.put("is_generic", g);
        return Ok(o);
    }
    if dims.is_empty() || count == 0 {
        return Err(pre("need at least one dimension and a positive count"));
    }
    if let Some(d) = dims.iter().find(|&&d| d < 2) {
        return Err(pre(format!("dimension {d} is below 2")));
    }
    let mut rng = sample::rng(common.seed);
    let mut generic = 0;
    let mut per_dim = Map::new();
    for k in 0..count {
        let n = dims[k % dims.len()];
        let g = pencil::is_generic(&sample::random_pair(&mut rng, n)).map_err(pre)?;
        if g {
            generic += 1;
        }
        let e = per_dim.entry(n.to_string()).or_insert(json!([0, 0]));
        e[0] = json!(e[0].as_u64().unwrap() + g as u64);
        e[1] = json!(e[1].as_u64().unwrap() + 1);
    }
    // at least 95% generic
    let ok = generic * 100 >= count * 95;
    let mut o = Outcome::new(ok);
    o.put("count", count).put("generic", generic).put("by_dim", Value::Object(per_dim));
    Ok(o)
}

fn forms(at: &At) -> Result<Vec<JetForm>, CliError> {
    Ok(at.items()?.iter().map(|f| f.form()).collect::<Result<_, _>>()?)
}

fn same_vars(
    items: &[(&At, &std::sync::Arc<Vec<String>>)],
    vars: &std::sync::Arc<Vec<String>>,
) -> Result<(), CliError> {
    for (at, v) in items {
        if *v != vars {
            return Err(at.err::<()>("variables differ from the tensor's").unwrap_err().into());
        }
    }
    Ok(())
}

fn order_check(order: i32) -> Result<(), CliError> {
    if order < 2 {
        return Err(pre(format!("order {order} below 2")));
    }
    Ok(())
}

pub fn web_report_json(rep: &WebReport) -> Value {
    json!({
        "input_order": rep.input_order,
        "span_ok": rep.span_ok,
        "beta_matches_foliation": rep.beta_matches_foliation,
        "nijenhuis_on_foliation": rep.nijenhuis_on_foliation,
        "nijenhuis_order": rep.nijenhuis_order,
        "closure_condition": rep.closure_condition,
        "closure_order": rep.closure_order,
        "base_char_numbers": rep.base_char_numbers,
        "height": rep.height,
        "frobenius": frobenius_json(&rep.frobenius),
        "curve_closed": rep.curve_closed,
        "curve_closed_order": rep.curve_closed_order,
        "curve": rep.curve.iter().map(io::form).collect::<Vec<_>>(),
        "passes": rep.passes,
    })
}

fn frobenius_json(s: &[tensor::FrobeniusSample]) -> Value {
    Value::Array(s.iter().map(|x| json!({"t": io::q(&x.t), "involutive": x.involutive, "order": x.order})).collect())
}

fn web_verify(common: &Common, root: &At, samples: usize) -> Result<Outcome, CliError> {
    root.check_schema("veroweb/web")?;
    order_check(common.order)?;
    if let Some(c) = root.opt("curve")? {
        let curve: Vec<JetForm> = forms(&c)?.iter().map(|f| f.truncate(common.order.min(f.order()))).collect();
        if curve.is_empty() {
            return c.err::<Outcome>("empty curve").map_err(Into::into);
        }
        let rep = tensor::verify_curve(&curve, samples).map_err(pre)?;
        let mut o = Outcome::new(rep.passes);
        o.put(
            "curve_report",
            json!({
                "base_char_numbers": rep.base_char_numbers,
                "height": rep.height,
                "frobenius": frobenius_json(&rep.frobenius),
                "curve_closed": rep.curve_closed,
                "curve_closed_order": rep.curve_closed_order,
                "passes": rep.passes,
            }),
        );
        return Ok(o);
    }
    let jat = root.get("J")?;
    let j = jat.tensor()?;
    let j = j.truncate(common.order.min(j.order()));
    let fat = root.get("foliation")?;
    let covs = forms(&fat)?;
    let items: Vec<_> = fat.items()?;
    same_vars(&items.iter().zip(&covs).map(|(a, f)| (a, f.vars())).collect::<Vec<_>>(), j.vars())?;
    let beta = match root.opt("beta")? {
        Some(b) => {
            let f = b.form()?;
            same_vars(&[(&b, f.vars())], j.vars())?;
            Some(f)
        }
        None => None,
    };
    let fol = FoliationSpec::new("F", covs).map_err(pre)?;
    let rep = tensor::verify_web(&j, beta.as_ref(), &fol, samples).map_err(pre)?;
    let mut o = Outcome::new(rep.passes);
    o.put("web_report", web_report_json(&rep));
    Ok(o)
}

fn web_compat(common: &Common, root: &At) -> Result<Outcome, CliError> {
    root.check_schema("veroweb/compat")?;
    order_check(common.order)?;
    let j = root.get("J")?.tensor()?;
    let aat = root.get("alphas")?;
    let alphas = forms(&aat)?;
    let oat = root.get("omega")?;
    let omega = oat.form()?;
    let items = aat.items()?;
    let mut check: Vec<_> = items.iter().zip(&alphas).map(|(a, f)| (a, f.vars())).collect();
    check.push((&oat, omega.vars()));
    same_vars(&check, j.vars())?;
    let fol = FoliationSpec::new("alpha", alphas).map_err(pre)?;
    let rep = tensor::compatibility(&fol, &j, &omega).map_err(pre)?;
    let mut o = Outcome::new(rep.compatible);
    o.put("compatible", rep.compatible).put("residual_order", rep.order);
    Ok(o)
}

fn germ(root: &At) -> Result<Vec<JetSeries>, CliError> {
    root.check_schema("veroweb/germ")?;
    let g = root.get("germ")?;
    let items = g.items()?;
    if items.is_empty() {
        return g.err::<Vec<JetSeries>>("empty germ").map_err(Into::into);
    }
    let out: Vec<JetSeries> = items.iter().map(|x| x.series()).collect::<Result<_, _>>()?;
    for (at, s) in items.iter().zip(&out) {
        if s.nvars() != 2 {
            return Err(at.get("vars")?.err::<()>("germs live on the two coordinates (s, y)").unwrap_err().into());
        }
    }
    Ok(out)
}

fn versal_solve(common: &Common, path: &PathBuf, a: &[String]) -> Result<Outcome, CliError> {
    order_check(common.order)?;
    let scalars: Vec<Q> = a.iter().map(|s| <Q as Field>::parse(s).map_err(pre)).collect::<Result<_, _>>()?;
    if scalars.len() < 2 {
        return Err(pre("--a needs a₁..a_{n−1} and a"));
    }
    let (ax, last) = scalars.split_at(scalars.len() - 1);
    let frame = ProblemFrame::new(ax, &last[0], 1, common.order).map_err(pre)?;
    let doc = read(path)?;
    let raw = germ(&doc.root())?;
    if raw.len() != frame.m() {
        return Err(SchemaError {
            pointer: "/germ".into(),
            message: format!("need {} components for {} scalars", frame.m(), scalars.len()),
        }
        .into());
    }
    // germs are read on the frame's (s, y) names at the requested order
    let g: Vec<JetSeries> = raw
        .iter()
        .map(|s| {
            let mut out = JetSeries::zero(frame.s_vars(), common.order);
            for (m, c) in s.terms() {
                if m.degree() as i32 <= common.order {
                    out.add_term(m.clone(), c.clone());
                }
            }
            out
        })
        .collect();
    if raw.iter().any(|s| s.order() < common.order) {
        return Err(pre(format!("germ order is below --order {}", common.order)));
    }
    let sol = solver::solve_versal(&frame, &g).map_err(pre)?;
    let torsion_free = solver::versal_torsion_free(&frame, &sol).map_err(pre)?;
    let (j, curve) = solver::versal_to_web(&frame, &sol).map_err(pre)?;
    let curve_ok = solver::versal_curve_matches(&frame, &j, &curve).map_err(pre)?;
    let dy = JetForm::dx(frame.vars(), j.order(), frame.m());
    let fol = FoliationSpec::new("w(inf)", vec![dy.clone()]).map_err(pre)?;
    let rep = tensor::verify_web(&j, Some(&dy), &fol, 0).map_err(pre)?;
    let ram = solver::ramification_polynomial(ax).ok();
    let ok = torsion_free && curve_ok && rep.passes;
    let mut o = Outcome::new(ok);
    o.put("a", Value::Array(scalars.iter().map(io::q).collect()))
        .put("f", Value::Array(sol.f.iter().map(io::series).collect()))
        .put("residual_order", sol.residual_order)
        .put(
            "certificates",
            Value::Array(
                sol.certificates
                    .iter()
                    .map(|c| json!({"degree": c.degree, "unknowns": c.unknowns, "equations": c.equations, "rank": c.rank}))
                    .collect(),
            ),
        )
        .put("torsion_free", torsion_free)
        .put("gamma", Value::Array(curve.iter().map(io::form).collect()))
        .put("gamma_matches_representative", curve_ok)
        .put("web_passes", rep.passes)
        .put("web_closure_order", rep.closure_order);
    if let Some(r) = ram {
        o.put(
            "ramification",
            json!({"poly": io::poly(&r.poly), "degree": r.degree, "discriminant": io::q(&r.discriminant)}),
        );
    }
    Ok(o)
}

fn versal_equiv(common: &Common, a: &PathBuf, b: &PathBuf) -> Result<Outcome, CliError> {
    let da = read(a)?;
    let db = read(b)?;
    let ga = germ(&da.root())?;
    let gb = germ(&db.root())?;
    if ga.len() != gb.len() {
        return Err(pre("germs have different lengths"));
    }
    let order = common.order.min(ga.iter().chain(&gb).map(|s| s.order()).min().unwrap());
    let found = solver::germ_equiv(&ga, &gb, order);
    let mut o = Outcome::new(found.is_some());
    o.put("equivalent", found.is_some())
        .put("b", found.as_ref().map(io::q).unwrap_or(Value::Null))
        .put("compared_to_order", order);
    Ok(o)
}

fn command_name(g: &Group) -> &'static str {
    match g {
        Group::Curve(CurveCmd::Build { .. }) => "curve build",
        Group::Couple(CoupleCmd::Normalize { .. }) => "couple normalize",
        Group::Pencil(PencilCmd::Classify { .. }) => "pencil classify",
        Group::Pencil(PencilCmd::GenericTest { .. }) => "pencil generic-test",
        Group::Web(WebCmd::Verify { .. }) => "web verify",
        Group::Web(WebCmd::Compat { .. }) => "web compat",
        Group::Versal(VersalCmd::Solve { .. }) => "versal solve",
        Group::Versal(VersalCmd::Equiv { .. }) => "versal equiv",
    }
}

fn rational_only(c: &Common) -> Result<(), CliError> {
    if c.field != FieldMode::Rational {
        return Err(pre("this command works over the rationals only"));
    }
    Ok(())
}

/// Commands whose whole input is one JSON document.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DocCommand {
    CurveBuild,
    CoupleNormalize,
    PencilClassify,
    WebVerify { samples: usize },
    WebCompat,
}

impl DocCommand {
    pub fn name(self) -> &'static str {
        match self {
            DocCommand::CurveBuild => "curve build",
            DocCommand::CoupleNormalize => "couple normalize",
            DocCommand::PencilClassify => "pencil classify",
            DocCommand::WebVerify { .. } => "web verify",
            DocCommand::WebCompat => "web compat",
        }
    }

    /// Looks up a command by its report name; `samples` only matters for web verify.
    pub fn from_name(name: &str, samples: usize) -> Option<Self> {
        Some(match name {
            "curve build" => DocCommand::CurveBuild,
            "couple normalize" => DocCommand::CoupleNormalize,
            "pencil classify" => DocCommand::PencilClassify,
            "web verify" => DocCommand::WebVerify { samples },
            "web compat" => DocCommand::WebCompat,
            _ => return None,
        })
    }
}

impl Default for Common {
    fn default() -> Self {
        Common {
            order: solver::default_order(),
            seed: DEFAULT_SEED,
            format: Format::Json,
            field: FieldMode::Rational,
            out: None,
        }
    }
}

fn doc_outcome(cmd: DocCommand, c: &Common, root: &At) -> Result<Outcome, CliError> {
    match cmd {
        DocCommand::CurveBuild => match c.field {
            FieldMode::Rational => curve_build::<Q>(root),
            FieldMode::QuadraticExtension => curve_build::<QI>(root),
        },
        DocCommand::CoupleNormalize => match c.field {
            FieldMode::Rational => couple_normalize::<Q>(root),
            FieldMode::QuadraticExtension => couple_normalize::<QI>(root),
        },
        DocCommand::PencilClassify => {
            rational_only(c)?;
            pencil_classify(root)
        }
        DocCommand::WebVerify { samples } => {
            rational_only(c)?;
            web_verify(c, root, samples)
        }
        DocCommand::WebCompat => {
            rational_only(c)?;
            web_compat(c, root)
        }
    }
}

fn assemble(name: &str, c: &Common, outcome: Outcome) -> (i32, Value) {
    let mut report = Map::new();
    report.insert("schema".into(), json!(REPORT_SCHEMA));
    report.insert("command".into(), json!(name));
    report.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    report.insert("field".into(), json!(c.field.name()));
    report.insert("order".into(), json!(c.order));
    report.insert("seed".into(), json!(c.seed));
    report.insert("verdict".into(), json!(if outcome.ok { "pass" } else { "fail" }));
    report.extend(outcome.body);
    (if outcome.ok { 0 } else { 1 }, Value::Object(report))
}

/// Runs a document command on JSON text held in memory.
pub fn run_document(cmd: DocCommand, common: &Common, text: &str) -> Result<(i32, Value), CliError> {
    let doc = Doc::parse(text)?;
    let outcome = doc_outcome(cmd, common, &doc.root())?;
    Ok(assemble(cmd.name(), common, outcome))
}

/// Run a parsed command and assemble the full report.
pub fn execute(cli: &Cli) -> Result<(i32, Value), CliError> {
    let c = &cli.common;
    let on_file = |cmd: DocCommand, path: &PathBuf| doc_outcome(cmd, c, &read(path)?.root());
    let outcome = match &cli.group {
        Group::Curve(CurveCmd::Build { input }) => on_file(DocCommand::CurveBuild, input)?,
        Group::Couple(CoupleCmd::Normalize { input }) => on_file(DocCommand::CoupleNormalize, input)?,
        Group::Pencil(PencilCmd::Classify { input }) => {
            rational_only(c)?;
            on_file(DocCommand::PencilClassify, input)?
        }
        Group::Pencil(PencilCmd::GenericTest { input, dims, count }) => {
            rational_only(c)?;
            generic_test(c, input, dims, *count)?
        }
        Group::Web(WebCmd::Verify { input, samples }) => {
            rational_only(c)?;
            on_file(DocCommand::WebVerify { samples: *samples }, input)?
        }
        Group::Web(WebCmd::Compat { input }) => {
            rational_only(c)?;
            on_file(DocCommand::WebCompat, input)?
        }
        Group::Versal(VersalCmd::Solve { germ, a }) => {
            rational_only(c)?;
            versal_solve(c, germ, a)?
        }
        Group::Versal(VersalCmd::Equiv { germ, other }) => {
            rational_only(c)?;
            versal_equiv(c, germ, other)?
        }
    };
    Ok(assemble(command_name(&cli.group), c, outcome))
}

pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("serialisable");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            if let Some(obj) = report.as_object() {
                for (k, v) in obj {
                    let shown = match v {
                        Value::String(x) => x.clone(),
                        other => other.to_string(),
                    };
                    let _ = writeln!(s, "{k}: {shown}");
                }
            }
            s
        }
    }
}

/// Parse arguments, run, write the report; returns the exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok((code, report)) => {
            let text = render(&report, cli.common.format);
            match &cli.common.out {
                Some(p) => {
                    if let Err(e) = std::fs::write(p, text) {
                        eprintln!("error: {}: {e}", p.display());
                        return 2;
                    }
                }
                None => print!("{text}"),
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
