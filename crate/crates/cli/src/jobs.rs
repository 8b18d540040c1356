use serde_json::{json, Map, Value};
use zhufusion::exactla::{format_rational, parse_rational, Matrix, Rational};
use zhufusion::intertwine::{
    brute_force_hom_dimension, build_constraints, candidate_instances, check_borcherds_residual,
    check_derivative_relation, fusion_dim_hom, instance_rows, solve_mode_families, Params, TruncatedModeFamily,
};
use zhufusion::logtransform::{
    derivation_consistent, from_z_graded, l1_recursion, to_z_graded, Direction, GradedBlocks, GradedOperatorData,
};
use zhufusion::virasoro::{ModuleElement, ModuleId, ModuleKind};
use zhufusion::zhumod::{
    circle, reduce_vacuum_with, reduce_verma_with, residue_element, star, AVModule, ReduceConfig, Side,
};
use zhufusion::Error;

/// Failure of a job: either a library error or a check that came out false.
#[derive(Debug)]
pub enum JobError {
    Library(Error),
    Usage(String),
    Failed(Value),
}

impl From<Error> for JobError {
    fn from(e: Error) -> Self {
        JobError::Library(e)
    }
}

impl JobError {
    pub fn code(&self) -> &'static str {
        match self {
            JobError::Library(e) => e.code(),
            JobError::Usage(_) => "usage",
            JobError::Failed(_) => "check-failed",
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            JobError::Library(e) => json!({"error": {"code": self.code(), "message": e.to_string()}}),
            JobError::Usage(m) => json!({"error": {"code": self.code(), "message": m}}),
            JobError::Failed(report) => json!({"error": {"code": self.code(), "report": report}}),
        }
    }
}

type JobResult = Result<Value, JobError>;

fn field<'a>(job: &'a Value, key: &str) -> Result<&'a Value, JobError> {
    job.get(key).ok_or_else(|| JobError::Usage(format!("job needs \"{key}\"")))
}

fn rational(job: &Value, key: &str) -> Result<Rational, JobError> {
    match field(job, key)? {
        Value::String(s) => Ok(parse_rational(s)?),
        Value::Number(n) => Ok(parse_rational(&n.to_string())?),
        other => Err(JobError::Usage(format!("\"{key}\" must be a rational string, got {other}"))),
    }
}

fn rational_or(job: &Value, key: &str, default: Rational) -> Result<Rational, JobError> {
    if job.get(key).is_some_and(|v| !v.is_null()) {
        rational(job, key)
    } else {
        Ok(default)
    }
}

fn uint(job: &Value, key: &str) -> Result<u64, JobError> {
    field(job, key)?.as_u64().ok_or_else(|| JobError::Usage(format!("\"{key}\" must be a nonnegative integer")))
}

fn uint_or(job: &Value, key: &str, default: u64) -> Result<u64, JobError> {
    if job.get(key).is_some_and(|v| !v.is_null()) {
        uint(job, key)
    } else {
        Ok(default)
    }
}

fn flag(job: &Value, key: &str) -> bool {
    job.get(key).and_then(Value::as_bool).unwrap_or(false)
}

fn module(job: &Value) -> Result<ModuleId, JobError> {
    let kind = field(job, "module")?
        .as_str()
        .ok_or_else(|| JobError::Usage("\"module\" must be vacuum or verma".into()))?;
    let kind = ModuleKind::parse(kind)?;
    let c = rational(job, "c")?;
    let h = rational_or(job, "h", Rational::from_integer(0.into()))?;
    Ok(ModuleId::new(kind, c, h)?)
}

/// An element is either a full element object or a bare term list for `module`.
fn element(v: &Value, module: &ModuleId) -> Result<ModuleElement, JobError> {
    let e = if v.is_array() {
        ModuleElement::terms_from_json(module, v)?
    } else if v.get("module").is_some() {
        ModuleElement::from_json(v)?
    } else {
        ModuleElement::terms_from_json(module, v.get("terms").unwrap_or(&Value::Null))?
    };
    if e.module() != module {
        return Err(Error::ModuleMismatch(format!("element lives in {:?}, job names {module:?}", e.module())).into());
    }
    Ok(e)
}

fn reduce_config(job: &Value) -> Result<ReduceConfig, JobError> {
    let default = ReduceConfig::default();
    Ok(ReduceConfig {
        window: job.get("window").and_then(Value::as_u64).map(|w| w as u32),
        general_cap: uint_or(job, "general-cap", default.general_cap as u64)? as u32,
    })
}

fn normal_form(e: &ModuleElement, cfg: &ReduceConfig) -> JobResult {
    let nf = match e.module().kind() {
        ModuleKind::Vacuum => reduce_vacuum_with(e, cfg)?,
        ModuleKind::Verma => reduce_verma_with(e, cfg)?,
        ModuleKind::DualVerma => return Err(JobError::Usage("normal forms exist for vacuum and verma modules".into())),
    };
    Ok(nf.to_json())
}

fn zhu_reduce(job: &Value) -> JobResult {
    let m = module(job)?;
    let e = element(field(job, "element")?, &m)?;
    normal_form(&e, &reduce_config(job)?)
}

fn zhu_product(job: &Value) -> JobResult {
    let m = module(job)?;
    let vac = ModuleId::vacuum(m.c().clone());
    let a = element(field(job, "a")?, &vac)?;
    let u = element(field(job, "u")?, &m)?;
    let op = job.get("op").and_then(Value::as_str).unwrap_or("star-left");
    let product = match op {
        "circle" => circle(&a, &u)?,
        "star-left" => star(&a, &u, Side::Left)?,
        "star-right" => star(&a, &u, Side::Right)?,
        "residue" => {
            let k = field(job, "k")?.as_i64().ok_or_else(|| JobError::Usage("\"k\" must be an integer".into()))?;
            residue_element(&a, &u, k)?
        }
        other => return Err(JobError::Usage(format!("unknown product \"{other}\""))),
    };
    let mut out = Map::new();
    out.insert("product".into(), product.to_json());
    if op != "residue" && !product.is_zero() {
        out.insert("normal_form".into(), normal_form(&product, &reduce_config(job)?)?);
    }
    Ok(Value::Object(out))
}

fn jordan_module(dim: usize, eig: &Rational) -> Result<AVModule, JobError> {
    let mut m = Matrix::scalar(dim, eig);
    for i in 1..dim {
        m.set(i - 1, i, Rational::from_integer(1.into()));
    }
    Ok(AVModule::new(m)?)
}

fn av_module(job: &Value, which: &str) -> Result<AVModule, JobError> {
    if let Some(m) = job.get(&format!("t{which}")) {
        return Ok(AVModule::new(Matrix::from_json(m)?)?);
    }
    let dim = uint(job, &format!("dim{which}"))? as usize;
    if dim == 0 {
        return Err(JobError::Usage("module dimension must be positive".into()));
    }
    let eig = rational_or(job, &format!("h{which}"), Rational::from_integer(0.into()))?;
    jordan_module(dim, &eig)
}

fn fusion_hom_dim(job: &Value) -> JobResult {
    let second = av_module(job, "2")?;
    let third = av_module(job, "3")?;
    let (dim, _) = fusion_dim_hom(&second, &third);
    let mut out = json!({"dimension": dim});
    if let Some(d) = job.get("verify-degree").and_then(Value::as_u64) {
        let brute = brute_force_hom_dimension(&second, &third, d as u32)?;
        out["brute_force"] = json!(brute);
        if brute != dim {
            return Err(JobError::Failed(out));
        }
    }
    Ok(out)
}

fn params(job: &Value) -> Result<Params, JobError> {
    Ok(Params::new(rational(job, "c")?, rational(job, "h1")?, rational(job, "h2")?, rational(job, "h3")?))
}

fn solve_at(p: &Params, depth: u32, cap: u32, pin: bool) -> (usize, usize, usize, Vec<TruncatedModeFamily>) {
    let mut sys = build_constraints(p, depth, cap);
    if pin {
        sys.pin_degree_zero_blocks();
    }
    let sol = solve_mode_families(&sys);
    (sol.dimension, sys.rows(), sys.unknowns(), sol.basis)
}

fn intertwine_solve(job: &Value) -> JobResult {
    let p = params(job)?;
    let depth = uint(job, "depth")? as u32;
    let cap = uint_or(job, "weight-cap", 4)? as u32;
    let pin = flag(job, "pin-ophi-zero");
    let (dimension, rows, unknowns, basis) = solve_at(&p, depth, cap, pin);
    let stabilized = depth > 0 && solve_at(&p, depth - 1, cap, pin).0 == dimension;
    let mut out = json!({"dimension": dimension, "rows": rows, "unknowns": unknowns, "stabilized": stabilized});
    if flag(job, "families") {
        out["families"] = Value::Array(basis.iter().map(TruncatedModeFamily::to_json).collect());
    }
    Ok(out)
}

fn intertwine_check(job: &Value) -> JobResult {
    let family = TruncatedModeFamily::from_json(field(job, "family")?)?;
    let cap = uint_or(job, "weight-cap", 4)? as u32;
    let layout = family.layout();
    let mut report = Vec::new();
    let mut failures = 0;
    for inst in candidate_instances(layout, cap) {
        if instance_rows(layout, &inst).is_none() {
            continue;
        }
        let ok = check_borcherds_residual(&family, &inst)?;
        if !ok {
            failures += 1;
        }
        let mut entry = inst.to_json();
        entry["ok"] = json!(ok);
        report.push(entry);
    }
    let derivative = match check_derivative_relation(&family) {
        Ok(n) => json!({"ok": true, "checked": n}),
        Err(e) => json!({"ok": false, "message": e.to_string()}),
    };
    let passed = failures == 0 && derivative["ok"] == json!(true);
    let out = json!({
        "instances": report.len(),
        "failures": failures,
        "residuals": report,
        "derivative_relation": derivative,
        "passed": passed,
    });
    if passed {
        Ok(out)
    } else {
        Err(JobError::Failed(out))
    }
}

fn log_roundtrip(job: &Value) -> JobResult {
    let g1 = GradedOperatorData::from_json(field(job, "first")?)?;
    let g2 = GradedOperatorData::from_json(field(job, "second")?)?;
    let g3 = GradedOperatorData::from_json(field(job, "third")?)?;
    let phi = GradedBlocks::from_json(field(job, "family")?)?;
    let j = from_z_graded(&phi, &g1, &g2, &g3)?;
    let round_trip = to_z_graded(&j) == phi;
    let bound = g1.nilpotency_index() + g2.nilpotency_index() + g3.nilpotency_index() - 2;
    let log_bound = j.log_length() as u32 <= bound;
    let mut derivation = true;
    for g in [&g1, &g2, &g3] {
        for d in 0..=g.depth() {
            for k in 0..g.dim(d) {
                let unit: Vec<Rational> =
                    (0..g.dim(d)).map(|i| Rational::from_integer(((i == k) as i64).into())).collect();
                for dir in [Direction::Plus, Direction::Minus] {
                    derivation &= derivation_consistent(g, dir, d, &unit)?;
                }
            }
        }
    }
    let recursion = match job.get("raise") {
        Some(r) => {
            let raise = r
                .as_array()
                .ok_or_else(|| JobError::Usage("\"raise\" must be a list of matrices".into()))?
                .iter()
                .map(Matrix::from_json)
                .collect::<Result<Vec<_>, _>>()?;
            json!(l1_recursion(&j, &raise)?)
        }
        None => Value::Null,
    };
    let passed = round_trip && log_bound && derivation && recursion != json!(false);
    let out = json!({
        "round_trip": round_trip,
        "log_length": j.log_length(),
        "log_bound": log_bound,
        "derivation": derivation,
        "l1_recursion": recursion,
        "shift": format_rational(j.shift()),
        "passed": passed,
    });
    if passed {
        Ok(out)
    } else {
        Err(JobError::Failed(out))
    }
}

/// Runs one job described by a JSON object with a `cmd` field.
pub fn run(job: &Value) -> JobResult {
    let cmd = field(job, "cmd")?.as_str().ok_or_else(|| JobError::Usage("\"cmd\" must be a string".into()))?;
    match cmd {
        "zhu reduce" => zhu_reduce(job),
        "zhu product" => zhu_product(job),
        "fusion hom-dim" => fusion_hom_dim(job),
        "intertwine solve" => intertwine_solve(job),
        "intertwine check" => intertwine_check(job),
        "log roundtrip" => log_roundtrip(job),
        other => Err(JobError::Usage(format!("unknown command \"{other}\""))),
    }
}
