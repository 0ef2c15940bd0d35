//! Front end for the `transvect` binary: generator files, job dispatch, reports.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use transvect::cayley::{bfs_explore, bidirectional_distance, transvection_length_profile, CayleyError};
use transvect::classify::{
    build_monomial_group, build_symmetric_rep, certify, classical_transvections, classify, verify_certificate,
    ClassicalKind, ClassifyError, ClassifyOptions,
};
use transvect::forms::{
    detect_invariant_form, is_transvective, recover_quadratic, transvective_split, ClassicalSpace, FormDetection,
    FormError, QuadraticOutcome, Twist,
};
use transvect::gf::{Field, GfError};
use transvect::group::{GroupError, DEFAULT_ELEMENT_CAP};
use transvect::linalg::{Matrix, Subspace, Vector};
use transvect::tgraph::{GraphError, TransvectionGraph, DEFAULT_PROJECTIVE_BUDGET};
use transvect::transvection::{standard_full_field_set, FullFieldKind, Transvection, TransvectionJson};
use transvect::word::{signed_word, Letter};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const BUDGET_ENV: &str = "TRANSVECT_BUDGET_ELEMENTS";

#[derive(Debug, Error)]
pub enum InputError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("generator {index} is not a transvection: {reason}")]
    NotTransvection { index: usize, reason: String },
    #[error("bad field: {0}")]
    Field(#[from] GfError),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

#[derive(Debug, Error)]
pub enum JobError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("invalid request: {0}")]
    Invalid(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("{0}")]
    Failed(String),
}

impl JobError {
    pub fn exit_code(&self) -> i32 {
        match self {
            JobError::Budget(_) => 2,
            _ => 1,
        }
    }
}

impl From<ClassifyError> for JobError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::CapExceeded(_)
            | ClassifyError::CertificateTooLarge(_)
            | ClassifyError::Group(GroupError::CapExceeded { .. })
            | ClassifyError::Graph(GraphError::CapExceeded(_)) => JobError::Budget(e.to_string()),
            ClassifyError::NotIrreducible | ClassifyError::Graph(_) | ClassifyError::NotClassical(_) => {
                JobError::Invalid(e.to_string())
            }
            _ => JobError::Failed(e.to_string()),
        }
    }
}

impl From<CayleyError> for JobError {
    fn from(e: CayleyError) -> Self {
        match e {
            CayleyError::CapExceeded { .. } | CayleyError::Group(GroupError::CapExceeded { .. }) => {
                JobError::Budget(e.to_string())
            }
            _ => JobError::Invalid(e.to_string()),
        }
    }
}

impl From<GraphError> for JobError {
    fn from(e: GraphError) -> Self {
        ClassifyError::from(e).into()
    }
}

impl From<FormError> for JobError {
    fn from(e: FormError) -> Self {
        match e {
            FormError::Graph(g) => g.into(),
            e => JobError::Invalid(e.to_string()),
        }
    }
}

/// On-disk generator list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorFile {
    pub field: String,
    pub generators: Vec<TransvectionJson>,
}

#[derive(Deserialize)]
struct RawFile {
    field: String,
    generators: Vec<Value>,
}

pub fn parse_str(text: &str) -> Result<(Field, Vec<Transvection>), InputError> {
    let raw: RawFile = serde_json::from_str(text)
        .map_err(|e| InputError::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    let field = Field::parse(&raw.field)?;
    let mut out = Vec::with_capacity(raw.generators.len());
    for (index, g) in raw.generators.into_iter().enumerate() {
        let j: TransvectionJson = serde_json::from_value(g).map_err(|e| {
            InputError::Parse(format!("generator {index}: expected {{\"v\", \"phi\"}} or {{\"matrix\"}}: {e}"))
        })?;
        let t = j.to_transvection(&field).map_err(|e| InputError::NotTransvection {
            index,
            reason: e.to_string(),
        })?;
        if let Some(first) = out.first() {
            let first: &Transvection = first;
            if first.dim() != t.dim() {
                return Err(InputError::Parse(format!(
                    "generator {index}: dimension {} but generator 0 has {}",
                    t.dim(),
                    first.dim()
                )));
            }
        }
        out.push(t);
    }
    if out.is_empty() {
        return Err(InputError::Parse("no generators".into()));
    }
    Ok((field, out))
}

pub fn parse_input(path: &Path) -> Result<(Field, Vec<Transvection>), InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    parse_str(&text)
}

pub fn field_spec(f: &Field) -> String {
    format!("{}^{}", f.p(), f.degree())
}

pub fn generator_file(field: &Field, ts: &[Transvection]) -> GeneratorFile {
    GeneratorFile {
        field: field_spec(field),
        generators: ts.iter().map(TransvectionJson::from_transvection).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    Full,
    Transvections,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    Sl,
    Su3,
    Sp,
    O,
    FullSl,
    FullSp,
    FullSu,
    FullOPlus,
    FullOMinus,
    Monomial,
    Symmetric,
}

impl GenKind {
    pub fn parse(s: &str) -> Result<GenKind, JobError> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "sl" => GenKind::Sl,
            "su3" => GenKind::Su3,
            "sp" => GenKind::Sp,
            "o" => GenKind::O,
            "full-sl" => GenKind::FullSl,
            "full-sp" => GenKind::FullSp,
            "full-su" => GenKind::FullSu,
            "full-o+" => GenKind::FullOPlus,
            "full-o-" => GenKind::FullOMinus,
            "monomial" => GenKind::Monomial,
            "symmetric" => GenKind::Symmetric,
            _ => return Err(JobError::Invalid(format!("unknown kind {s:?}"))),
        })
    }
}

#[derive(Clone, Debug)]
pub enum Command {
    Analyze,
    Classify,
    Certify,
    Diameter {
        profile: Profile,
        /// Matrix rows, as JSON.
        witness: Option<String>,
        bidirectional: bool,
    },
    Gen {
        kind: GenKind,
        n: Option<usize>,
        a: Option<u64>,
        m: Option<usize>,
    },
    Decompose {
        vector: Option<String>,
        element: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Classify => "classify",
            Command::Certify => "certify",
            Command::Diameter { .. } => "diameter",
            Command::Gen { .. } => "gen",
            Command::Decompose { .. } => "decompose",
        }
    }
}

#[derive(Clone, Debug)]
pub struct JobConfig {
    /// "p^f"; required by `gen`, otherwise read from the input file.
    pub field: Option<String>,
    pub input: Option<PathBuf>,
    pub command: Command,
    pub budget_elements: Option<usize>,
    pub budget_projective: Option<u64>,
    pub format: Format,
    pub seed: u64,
    pub timing: bool,
}

impl JobConfig {
    pub fn new(command: Command) -> JobConfig {
        JobConfig {
            field: None,
            input: None,
            command,
            budget_elements: None,
            budget_projective: None,
            format: Format::Json,
            seed: 0,
            timing: false,
        }
    }

    /// The flag, then the environment variable, then the default.
    pub fn element_budget(&self) -> Result<usize, JobError> {
        let b = match self.budget_elements {
            Some(b) => b,
            None => match std::env::var(BUDGET_ENV) {
                Ok(s) => s
                    .trim()
                    .parse()
                    .map_err(|_| JobError::Invalid(format!("{BUDGET_ENV}={s:?} is not a positive integer")))?,
                Err(_) => DEFAULT_ELEMENT_CAP,
            },
        };
        if b == 0 {
            return Err(JobError::Invalid("element budget must be positive".into()));
        }
        Ok(b)
    }

    pub fn projective_budget(&self) -> Result<u64, JobError> {
        match self.budget_projective {
            Some(0) => Err(JobError::Invalid("projective budget must be positive".into())),
            Some(b) => Ok(b),
            None => Ok(DEFAULT_PROJECTIVE_BUDGET),
        }
    }

    fn options(&self) -> Result<ClassifyOptions, JobError> {
        Ok(ClassifyOptions {
            element_cap: self.element_budget()?,
            projective_budget: self.projective_budget()?,
            ..ClassifyOptions::default()
        })
    }
}

/// Output of a job: JSON always, plus CSV text for histograms when requested.
#[derive(Clone, Debug)]
pub struct Report {
    pub json: Value,
    pub csv: Option<String>,
}

impl Report {
    pub fn render(&self) -> String {
        match &self.csv {
            Some(c) => c.clone(),
            None => serde_json::to_string_pretty(&self.json).expect("reports serialize") + "\n",
        }
    }
}

fn load(job: &JobConfig) -> Result<(Field, Vec<Transvection>), JobError> {
    let path = job
        .input
        .as_ref()
        .ok_or_else(|| JobError::Invalid(format!("{} needs --input", job.command.name())))?;
    let (f, t) = parse_input(path)?;
    if let Some(spec) = &job.field {
        let g = Field::parse(spec).map_err(InputError::from)?;
        if g != f {
            return Err(JobError::Invalid(format!("--field {spec} differs from the file's field")));
        }
    }
    Ok((f, t))
}

fn parse_matrix(field: &Field, s: &str) -> Result<Matrix, JobError> {
    let rows: Vec<Vec<u32>> =
        serde_json::from_str(s).map_err(|e| InputError::Parse(format!("matrix {s:?}: {e}")))?;
    if rows.iter().flatten().any(|&x| x >= field.order()) {
        return Err(InputError::Parse(format!("matrix {s:?} has entries outside GF({})", field.order())).into());
    }
    Matrix::from_raw_rows(field, &rows).map_err(|e| InputError::Parse(e.to_string()).into())
}

fn parse_vector(field: &Field, n: usize, s: &str) -> Result<Vector, JobError> {
    let raw: Vec<u32> = serde_json::from_str(s).map_err(|e| InputError::Parse(format!("vector {s:?}: {e}")))?;
    if raw.len() != n || raw.iter().any(|&x| x >= field.order()) {
        return Err(InputError::Parse(format!("vector {s:?} is not in GF({})^{n}", field.order())).into());
    }
    Ok(Vector::from_raw(field, &raw))
}

/// Runs a job. The report carries a `meta` block with the version, field,
/// budgets and seed; wall time only when `timing` is set, so identical inputs
/// give identical output.
pub fn run(job: &JobConfig) -> Result<Report, JobError> {
    let start = Instant::now();
    let (field, mut report) = match &job.command {
        Command::Gen { kind, n, a, m } => gen(job, *kind, *n, *a, *m)?,
        Command::Analyze => {
            let (f, t) = load(job)?;
            (f.clone(), Report { json: analyze(&t, job)?, csv: None })
        }
        Command::Classify => {
            let (f, t) = load(job)?;
            let r = classify(&t, &job.options()?)?;
            (f, Report { json: serde_json::to_value(r).unwrap(), csv: None })
        }
        Command::Certify => {
            let (f, t) = load(job)?;
            let opts = job.options()?;
            let cert = certify(&t, &opts)?;
            let fails = verify_certificate(&t, &cert, &opts)?;
            let json = json!({ "certificate": cert, "verified": fails.is_empty(), "verification_failures": fails });
            (f, Report { json, csv: None })
        }
        Command::Diameter {
            profile,
            witness,
            bidirectional,
        } => {
            let (f, t) = load(job)?;
            (f.clone(), diameter(&f, &t, job, *profile, witness.as_deref(), *bidirectional)?)
        }
        Command::Decompose { vector, element } => {
            let (f, t) = load(job)?;
            (f.clone(), decompose(&f, &t, job, vector.as_deref(), element.as_deref())?)
        }
    };
    let mut meta = json!({
        "tool": "transvect",
        "version": VERSION,
        "command": job.command.name(),
        "field": field_spec(&field),
        "budgets": {
            "elements": job.element_budget()?,
            "projective": job.projective_budget()?,
        },
        "seed": job.seed,
    });
    if job.timing {
        meta["wall_time_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    if let Value::Object(map) = &mut report.json {
        map.insert("meta".into(), meta);
    }
    Ok(report)
}

fn analyze(t: &[Transvection], job: &JobConfig) -> Result<Value, JobError> {
    let g = TransvectionGraph::new(t.to_vec())?;
    let irr = g.irreducibility();
    let scc = g.scc();
    let mut out = json!({
        "dim": g.dim(),
        "generators": g.len(),
        "edges": g.edge_count(),
        "components": scc,
        "strongly_connected": scc.len() == 1,
        "irreducible": irr.irreducible,
        "failed_condition": irr.failed,
        "invariant_subspace": irr.invariant_subspace.map(|s| s.basis().iter().map(|v| v.raw()).collect::<Vec<_>>()),
        "dim_v": g.v_space().dim(),
        "dim_vstar": g.vstar_space().dim(),
        "left_kernel": g.left_kernel().dim(),
        "right_kernel": g.right_kernel().dim(),
        "diameter": g.diameter(),
    });
    match g.is_dense(job.projective_budget()?) {
        Ok(d) => {
            out["dense"] = json!(d.dense);
            out["density_counterexample"] = json!(d.counterexample.map(|(v, phi)| (v.raw(), phi.raw())));
        }
        Err(GraphError::CapExceeded(m)) => out["dense"] = json!(format!("skipped: {m}")),
        Err(e) => return Err(e.into()),
    }
    if irr.irreducible {
        let fld = g.exact_defining_field()?;
        out["field_degree"] = json!(fld.degree);
        out["field_witnesses"] = json!(fld.witnesses);
        let mut forms = serde_json::Map::new();
        let mut twists = vec![("symplectic", Twist::Identity)];
        if g.field().has_involution() {
            twists.push(("unitary", Twist::Theta));
        }
        for (name, tw) in twists {
            let v = match detect_invariant_form(&g, tw)? {
                FormDetection::Form(s) => json!({ "gram": s.gram().to_raw_rows() }),
                FormDetection::Obstruction(o) => json!({ "obstruction": o }),
            };
            forms.insert(name.into(), v);
        }
        out["forms"] = Value::Object(forms);
    }
    Ok(out)
}

fn gen(
    job: &JobConfig,
    kind: GenKind,
    n: Option<usize>,
    a: Option<u64>,
    m: Option<usize>,
) -> Result<(Field, Report), JobError> {
    let need_field = || -> Result<Field, JobError> {
        let spec = job.field.as_ref().ok_or_else(|| JobError::Invalid("gen needs --field".into()))?;
        Ok(Field::parse(spec).map_err(InputError::from)?)
    };
    let bad = |e: String| JobError::Invalid(e);
    let ts: Vec<Transvection> = match kind {
        GenKind::Sl | GenKind::Su3 | GenKind::Sp | GenKind::O => {
            let f = need_field()?;
            let (k, dflt) = match kind {
                GenKind::Sl => (FullFieldKind::SL, 2),
                GenKind::Su3 => (FullFieldKind::SU3, 3),
                GenKind::Sp => (FullFieldKind::SP, 2),
                _ => (FullFieldKind::O, 4),
            };
            standard_full_field_set(k, &f, n.unwrap_or(dflt)).map_err(|e| bad(e.to_string()))?
        }
        GenKind::FullSl | GenKind::FullSp | GenKind::FullSu | GenKind::FullOPlus | GenKind::FullOMinus => {
            let f = need_field()?;
            let (k, dflt) = match kind {
                GenKind::FullSl => (ClassicalKind::Linear, 2),
                GenKind::FullSp => (ClassicalKind::Symplectic, 4),
                GenKind::FullSu => (ClassicalKind::Unitary, 3),
                GenKind::FullOPlus => (ClassicalKind::OrthogonalPlus, 6),
                _ => (ClassicalKind::OrthogonalMinus, 4),
            };
            classical_transvections(k, &f, n.unwrap_or(dflt)).map_err(|e| bad(e.to_string()))?
        }
        GenKind::Monomial => {
            let f = need_field()?;
            let a = a.ok_or_else(|| bad("monomial needs --a".into()))?;
            build_monomial_group(n.unwrap_or(3), a, &f).map_err(|e| bad(e.to_string()))?
        }
        GenKind::Symmetric => {
            let m = m.ok_or_else(|| bad("symmetric needs --m".into()))?;
            build_symmetric_rep(m).map_err(|e| bad(e.to_string()))?
        }
    };
    let f = ts[0].field().clone();
    let file = generator_file(&f, &ts);
    Ok((f, Report { json: serde_json::to_value(file).unwrap(), csv: None }))
}

fn histogram_csv(h: &[usize]) -> String {
    let mut s = String::from("distance,count\n");
    for (d, c) in h.iter().enumerate() {
        s.push_str(&format!("{d},{c}\n"));
    }
    s
}

fn diameter(
    f: &Field,
    t: &[Transvection],
    job: &JobConfig,
    profile: Profile,
    witness: Option<&str>,
    bidirectional: bool,
) -> Result<Report, JobError> {
    let cap = job.element_budget()?;
    let n = t[0].dim();
    let gens: Vec<Matrix> = t.iter().map(|x| x.matrix()).collect();
    let (order, diam, hist, ex) = match profile {
        Profile::Full => {
            let ex = bfs_explore(f, n, &gens, cap, None)?;
            (ex.order(), ex.diameter, ex.histogram.clone(), Some(ex))
        }
        Profile::Transvections => {
            let p = transvection_length_profile(t, cap)?;
            (p.order, p.max, p.histogram, None)
        }
    };
    let mut json = json!({ "order": order, "diameter": diam, "histogram": hist });
    if let Some(w) = witness {
        let g = parse_matrix(f, w)?;
        let word = match (&ex, bidirectional) {
            (Some(ex), false) => Some(ex.word_recover(&g).map_err(|_| JobError::Invalid("witness is not in the group".into()))?),
            _ => bidirectional_distance(f, n, &gens, &g, cap)?.map(|(_, w)| w),
        };
        let word = word.ok_or_else(|| JobError::Invalid("witness is not in the group".into()))?;
        json["witness"] = json!({ "length": word.len(), "word": signed_word(&word) });
    }
    let csv = (job.format == Format::Csv).then(|| histogram_csv(&hist));
    Ok(Report { json, csv })
}

/// The classical space preserved by ⟨T⟩, for transvective splitting.
fn space_of(g: &TransvectionGraph) -> Result<ClassicalSpace, JobError> {
    if let FormDetection::Form(s) = detect_invariant_form(g, Twist::Identity)? {
        if g.field().p() == 2 {
            if let QuadraticOutcome::Form { form, .. } = recover_quadratic(g, &s)? {
                return Ok(ClassicalSpace::Orthogonal(form));
            }
        }
        return Ok(ClassicalSpace::Symplectic(s));
    }
    if g.field().has_involution() {
        if let FormDetection::Form(s) = detect_invariant_form(g, Twist::Theta)? {
            return Ok(ClassicalSpace::Unitary(s));
        }
    }
    Ok(ClassicalSpace::Linear)
}

fn decompose(
    f: &Field,
    t: &[Transvection],
    job: &JobConfig,
    vector: Option<&str>,
    element: Option<&str>,
) -> Result<Report, JobError> {
    let n = t[0].dim();
    let mut json = json!({});
    if vector.is_none() && element.is_none() {
        return Err(JobError::Invalid("decompose needs --vector or --element".into()));
    }
    if let Some(vs) = vector {
        let g = TransvectionGraph::new(t.to_vec())?;
        if !g.is_irreducible() {
            return Err(ClassifyError::NotIrreducible.into());
        }
        let space = space_of(&g)?;
        let v = parse_vector(f, n, vs)?;
        if !is_transvective(&v, &space) {
            return Err(JobError::Invalid(format!("{vs} is not transvective for the preserved geometry")));
        }
        let mut basis = Vec::new();
        let mut span = Subspace::zero(f, n);
        for x in t {
            if !span.contains(x.v()).unwrap() {
                span = span.sum(&Subspace::span(f, n, &[x.v().clone()])).unwrap();
                basis.push(x.v().clone());
            }
        }
        let parts = transvective_split(&v, &basis, &space)?;
        let name = match space {
            ClassicalSpace::Linear => "linear",
            ClassicalSpace::Symplectic(_) => "symplectic",
            ClassicalSpace::Unitary(_) => "unitary",
            ClassicalSpace::Orthogonal(_) => "orthogonal",
        };
        json["split"] = json!({
            "space": name,
            "basis": basis.iter().map(|b| b.raw()).collect::<Vec<_>>(),
            "parts": parts.iter().map(|p| p.raw()).collect::<Vec<_>>(),
        });
    }
    if let Some(es) = element {
        let g = parse_matrix(f, es)?;
        let gens: Vec<Matrix> = t.iter().map(|x| x.matrix()).collect();
        let found = bidirectional_distance(f, n, &gens, &g, job.element_budget()?)?;
        let (d, w) = found.ok_or_else(|| JobError::Invalid("element is not in the group".into()))?;
        let letters: Vec<Letter> = w;
        json["word"] = json!({ "length": d, "word": signed_word(&letters) });
    }
    Ok(Report { json, csv: None })
}
