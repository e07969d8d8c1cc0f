//! The end-to-end run over a fixture: classification, the polynomial
//! objects, Hilbert data of `C`, cohomology tables, line correspondences
//! and fiber checks, collected into a deterministic JSON report.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cohomology::{
    charge2_instanton_table, exceptional_pair_check_y, line_ideal_membership, theta_window_table, CohomologyTable,
};
use crate::correspondence::{
    c_ideal, classify, find_c_points, fv_rank_profile, lines_on_y, net_over, pfaffian_hypersurface, phi_fiber,
    point_text, psi_fiber, q_quartic, rank_two_locus, splitting_type_on_line, x_ideal, CPointSearch, CSearchOptions,
    FieldCheckStatus, NetClassification, PhiFiber, PsiFiber, Tri,
};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::grassmann;
use crate::ideals::{fit_hilbert_polynomial, HilbertConfig, ALTERNATE_PRIME, DEFAULT_DEGREE_CAP, DEFAULT_PRIME};
use crate::multipoly::MultiPoly;
use crate::net::ANet;
use crate::verify::{jw1_section_check, jw_pointwise, FiberReport, SamplePlan};

pub const SCHEMA_VERSION: &str = "skewnet-report/1";

/// Field of the exhaustive fiber checks and of the line enumeration on `Y`.
const SMALL_FIELD: u32 = 3;
/// Field of the rank profile of `f_v`.
const RANK_PROFILE_FIELD: u32 = 7;

pub const CHECK_NAMES: &[&str] = &[
    "regularity",
    "y-smooth",
    "x-smooth",
    "singularity-sets",
    "pfaffian",
    "q-quartic",
    "hilbert-C",
    "rank-profile",
    "theta-table",
    "charge2-table",
    "cohomology-consistency",
    "exceptional-pair",
    "c-points",
    "line-correspondences",
    "lines-on-y",
    "jw",
    "jw1",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl From<Tri> for Status {
    fn from(t: Tri) -> Self {
        match t {
            Tri::Yes => Status::Pass,
            Tri::No => Status::Fail,
            Tri::Inconclusive => Status::Inconclusive,
        }
    }
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }

    fn combine(items: impl IntoIterator<Item = Status>) -> Status {
        let mut out = Status::Pass;
        for s in items {
            match s {
                Status::Fail => return Status::Fail,
                Status::Inconclusive => out = Status::Inconclusive,
                Status::Pass => {}
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub name: String,
    pub status: Status,
    pub witness: String,
    pub detail: Value,
}

impl StageReport {
    fn new(name: &str, status: impl Into<Status>, witness: impl Into<String>, detail: Value) -> Self {
        StageReport { name: name.into(), status: status.into(), witness: witness.into(), detail }
    }

    fn from_error(name: &str, e: &Error) -> Self {
        let status = match e {
            Error::Inconclusive(_)
            | Error::LimitExceeded { .. }
            | Error::NoStabilization { .. }
            | Error::RetryCapExceeded { .. } => Status::Inconclusive,
            _ => Status::Fail,
        };
        StageReport::new(name, status, format!("error: {e}"), Value::Null)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineOptions {
    /// Small fields for the singularity-set enumeration.
    pub fields: Vec<Field>,
    pub prime: u32,
    pub alt_prime: u32,
    pub degree_cap: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            fields: vec![Field::Prime(2), Field::Prime(3)],
            prime: DEFAULT_PRIME,
            alt_prime: ALTERNATE_PRIME,
            degree_cap: DEFAULT_DEGREE_CAP,
            samples: 1000,
            seed: 0,
        }
    }
}

impl PipelineOptions {
    pub fn hilbert_config(&self) -> HilbertConfig {
        HilbertConfig { prime: self.prime, alt_prime: self.alt_prime, degree_cap: self.degree_cap }
    }

    /// Both working primes must be distinct odd primes.
    pub fn validate(&self) -> Result<()> {
        for p in [self.prime, self.alt_prime] {
            if p == 2 || !crate::field::is_prime(p as u64) {
                return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
            }
        }
        if self.prime == self.alt_prime {
            return Err(Error::InvalidInput("the two working primes coincide".into()));
        }
        if self.degree_cap == 0 {
            return Err(Error::InvalidInput("degree cap must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetShape {
    pub n: usize,
    pub two_m: usize,
    pub field: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub schema: String,
    pub fingerprint: String,
    pub net: NetShape,
    pub options: PipelineOptions,
    pub status: Status,
    /// Why later stages did not run, if they did not.
    pub halted: Option<String>,
    pub stages: Vec<StageReport>,
}

impl PipelineReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn stage(&self, name: &str) -> Option<&StageReport> {
        self.stages.iter().find(|s| s.name == name)
    }
}

struct Ctx<'a> {
    net: &'a ANet,
    opts: &'a PipelineOptions,
    cfg: HilbertConfig,
}

fn is_v14(net: &ANet) -> bool {
    (net.n(), net.two_m()) == (5, 6)
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).unwrap_or(Value::Null)
}

fn leading_text(p: &MultiPoly) -> String {
    match p.leading_term() {
        Some((m, c)) => MultiPoly::from_terms(p.field(), p.nvars(), [(m.0.clone(), c.clone())])
            .map(|t| t.to_text())
            .unwrap_or_default(),
        None => "0".into(),
    }
}

fn poly_digest(p: &MultiPoly) -> Value {
    json!({
        "degree": p.degree(),
        "terms": p.len(),
        "leading": leading_text(p),
        "polynomial": p.to_text(),
    })
}

// ---------------------------------------------------------------------------
// Stages

fn classification_stages(c: &NetClassification) -> Vec<StageReport> {
    let mut out = vec![
        StageReport::new("regularity", c.regular.verdict, &c.regular.witness, Value::Null),
        StageReport::new("y-smooth", c.y_smooth.verdict, &c.y_smooth.witness, Value::Null),
        StageReport::new("x-smooth", c.x_smooth.verdict, &c.x_smooth.witness, Value::Null),
    ];
    let checked: Vec<_> = c.consistency.iter().filter(|f| f.status == FieldCheckStatus::Checked).collect();
    let (status, witness) = if c.regular.verdict != Tri::Yes {
        (Status::Inconclusive, "not run: the net is not regular".to_string())
    } else if checked.is_empty() {
        (Status::Inconclusive, "no field with good reduction was enumerated".to_string())
    } else if checked.iter().all(|f| f.sets_equal) {
        let parts: Vec<String> = checked.iter().map(|f| format!("{} ({} points)", f.field, f.singular_x)).collect();
        (Status::Pass, format!("sing(X) = X ∩ κ(Y) over {}", parts.join(", ")))
    } else {
        let bad = checked.iter().find(|f| !f.sets_equal).expect("some field differs");
        (
            Status::Fail,
            format!("over {}: {} singular points, {} points of X ∩ κ(Y)", bad.field, bad.singular_x, bad.kappa_on_x),
        )
    };
    out.push(StageReport::new("singularity-sets", status, witness, to_value(&c.consistency)));
    out
}

fn stage_pfaffian(ctx: &Ctx) -> Result<StageReport> {
    let pf = pfaffian_hypersurface(ctx.net)?;
    let expected = ctx.net.two_m() / 2;
    let deg = pf.degree().unwrap_or(0);
    let status = if deg == expected { Status::Pass } else { Status::Fail };
    Ok(StageReport::new("pfaffian", status, format!("degree {deg}, expected {expected}"), poly_digest(&pf)))
}

fn stage_quartic(ctx: &Ctx) -> Result<StageReport> {
    let q = q_quartic(ctx.net)?;
    let expected = ctx.net.two_m() - 2;
    let deg = q.degree().unwrap_or(0);
    let status = if deg == expected { Status::Pass } else { Status::Fail };
    let witness = format!("degree {deg}, expected {expected}; all {} minor quotients agree", ctx.net.two_m());
    Ok(StageReport::new("q-quartic", status, witness, poly_digest(&q)))
}

fn stage_hilbert_c(ctx: &Ctx) -> Result<StageReport> {
    let ideal = c_ideal(ctx.net)?;
    let expected = ["-25".to_string(), "25".to_string()];
    let mut fits = Vec::new();
    let mut statuses = Vec::new();
    for p in [ctx.opts.prime, ctx.opts.alt_prime] {
        let field = Field::prime(p as u64)?;
        let local = if ideal.field() == &field { ideal.clone() } else { ideal.map_field(&field)? };
        let h = fit_hilbert_polynomial(&local, 1, &ctx.cfg)?;
        statuses.push(if h.polynomial == expected { Status::Pass } else { Status::Fail });
        fits.push(json!({ "field": field.to_string(), "hilbert": h }));
    }
    let status = Status::combine(statuses);
    let witness = match status {
        Status::Pass => format!("HP(t) = 25t - 25 modulo {} and {}", ctx.opts.prime, ctx.opts.alt_prime),
        _ => "Hilbert polynomial differs from 25t - 25".into(),
    };
    Ok(StageReport::new("hilbert-C", status, witness, Value::Array(fits)))
}

fn stage_rank_profile(ctx: &Ctx) -> Result<StageReport> {
    let field = Field::Prime(RANK_PROFILE_FIELD);
    let profile = fv_rank_profile(ctx.net, &field, grassmann::DEFAULT_ENUMERATION_LIMIT)?;
    let locus = rank_two_locus(ctx.net, &ctx.cfg)?;
    let enumerated = if profile.min_rank >= 3 { Status::Pass } else { Status::Fail };
    let status = Status::combine([enumerated, locus.verdict.into()]);
    let witness =
        format!("min rank f_v = {} over {} ({} points); {}", profile.min_rank, field, profile.points, locus.witness);
    Ok(StageReport::new("rank-profile", status, witness, json!({ "profile": profile, "rank-two-locus": locus })))
}

fn table_stage(name: &str, t: &CohomologyTable) -> StageReport {
    let off: Vec<String> = t
        .cells
        .iter()
        .filter(|c| c.verdict != Tri::Yes)
        .map(|c| format!("(p,t) = ({},{}): {:?} vs {:?}", c.p, c.t, c.computed, c.expected))
        .collect();
    let witness = if off.is_empty() {
        format!("{}: all {} cells match", t.name, t.cells.len())
    } else {
        format!("{}: {}", t.name, off.join("; "))
    };
    StageReport::new(name, t.verdict, witness, to_value(t))
}

fn cohomology_tables(net: &ANet, cfg: &HilbertConfig) -> Result<Vec<CohomologyTable>> {
    let mut out = vec![theta_window_table(net, cfg)?];
    if is_v14(net) {
        out.push(charge2_instanton_table(net, cfg)?);
    }
    Ok(out)
}

fn stage_consistency(ctx: &Ctx) -> Result<StageReport> {
    let base = cohomology_tables(ctx.net, &ctx.cfg)?;
    let mut rows = Vec::new();
    let mut all_equal = true;
    for p in [ctx.opts.prime, ctx.opts.alt_prime] {
        let field = Field::prime(p as u64)?;
        let reduced = net_over(ctx.net, &field)?;
        let tables = cohomology_tables(&reduced, &ctx.cfg)?;
        let equal = tables.len() == base.len()
            && tables.iter().zip(&base).all(|(a, b)| {
                a.cells.iter().map(|c| c.computed).eq(b.cells.iter().map(|c| c.computed))
            });
        all_equal &= equal;
        rows.push(json!({ "field": field.to_string(), "equal": equal }));
    }
    let status = if all_equal { Status::Pass } else { Status::Fail };
    let witness = format!(
        "cohomology over {} {} modulo {} and {}",
        ctx.net.field(),
        if all_equal { "agrees with the tables" } else { "differs from the tables" },
        ctx.opts.prime,
        ctx.opts.alt_prime
    );
    Ok(StageReport::new("cohomology-consistency", status, witness, Value::Array(rows)))
}

fn stage_exceptional(ctx: &Ctx) -> Result<StageReport> {
    let d = pfaffian_hypersurface(ctx.net)?.degree().unwrap_or(0);
    let r = exceptional_pair_check_y(d, ctx.net.n())?;
    let witness = format!("Ext rows of (O, O(1)) on a degree-{d} hypersurface");
    Ok(StageReport::new("exceptional-pair", r.verdict, witness, to_value(&r)))
}

fn search_options(ctx: &Ctx) -> CSearchOptions {
    CSearchOptions { seed: ctx.opts.seed, ..CSearchOptions::default() }
}

fn stage_c_points(search: &CPointSearch) -> StageReport {
    let (status, witness) = match &search.field {
        Some(f) if !search.points.is_empty() => {
            (Status::Pass, format!("{} point(s) of C over {f}, e.g. {}", search.points.len(), point_text(&search.points[0])))
        }
        _ => (Status::Inconclusive, "no point of C found on the search ladder".into()),
    };
    StageReport::new("c-points", status, witness, to_value(search))
}

/// Parameters `(1:0)` and `(x:1)` for the first few field elements.
fn pencil_parameters(field: &Field) -> Vec<(FieldElement, FieldElement)> {
    let mut out = vec![(field.one(), field.zero())];
    let q = field.size().unwrap_or(u128::MAX).min(3);
    for i in 0..q {
        out.push((field.element(i), field.one()));
    }
    out
}

fn check_c_point(net: &ANet, c: &[FieldElement]) -> Result<(Status, Value)> {
    let field = net.field().clone();
    let mut statuses = Vec::new();
    let xi = x_ideal(net)?;
    let l_c = match phi_fiber(net, c)? {
        PhiFiber::Line(line) => {
            let params = pencil_parameters(&field);
            let mut on_x = true;
            for (s, t) in &params {
                let u = line.point(s, t)?;
                for g in xi.generators() {
                    on_x &= g.evaluate(u.coords())?.is_zero();
                }
            }
            statuses.push(if on_x { Status::Pass } else { Status::Fail });
            json!({ "span": [line.span[0].to_string(), line.span[1].to_string()], "on-x": on_x, "points-checked": params.len() })
        }
        PhiFiber::Point(p) => {
            statuses.push(Status::Fail);
            json!({ "point": p.to_string(), "on-x": false })
        }
    };
    let m_c = match psi_fiber(net, c)? {
        PsiFiber::Line([a0, a1]) => {
            let splitting = splitting_type_on_line(net, &a0, &a1)?;
            let membership = line_ideal_membership(net, &a0, &a1)?;
            statuses.push(if splitting == (1, 3) { Status::Pass } else { Status::Fail });
            statuses.push(membership.verdict.into());
            json!({
                "span": [point_text(&a0), point_text(&a1)],
                "splitting": [splitting.0, splitting.1],
                "ideal-sheaf": membership,
            })
        }
        PsiFiber::Point(a) => {
            statuses.push(Status::Fail);
            json!({ "point": point_text(&a) })
        }
    };
    Ok((Status::combine(statuses), json!({ "c": point_text(c), "l_c": l_c, "m_c": m_c })))
}

fn stage_lines(ctx: &Ctx, search: &CPointSearch) -> Result<StageReport> {
    let Some(field) = &search.field else {
        return Ok(StageReport::new("line-correspondences", Status::Inconclusive, "no point of C to test", Value::Null));
    };
    let net = net_over(ctx.net, field)?;
    let mut statuses = Vec::new();
    let mut rows = Vec::new();
    for c in &search.points {
        let (s, v) = check_c_point(&net, c)?;
        statuses.push(s);
        rows.push(v);
    }
    let status = Status::combine(statuses);
    let witness = format!(
        "{} point(s) over {field}: L_c ⊂ X, M_c ⊂ Y of splitting type (1,3), I_M orthogonal to O and O(1)",
        search.points.len()
    );
    Ok(StageReport::new("line-correspondences", status, witness, Value::Array(rows)))
}

fn stage_lines_on_y(ctx: &Ctx) -> Result<StageReport> {
    let field = Field::Prime(SMALL_FIELD);
    let net = net_over(ctx.net, &field)?;
    let lines = lines_on_y(&net, grassmann::DEFAULT_ENUMERATION_LIMIT)?;
    let jumping: Vec<_> = lines.iter().filter(|l| l.c.is_some()).collect();
    let bad: Vec<_> = lines
        .iter()
        .filter(|l| l.splitting != if l.c.is_some() { (1, 3) } else { (2, 2) })
        .collect();
    let status = if bad.is_empty() { Status::Pass } else { Status::Fail };
    let witness = match bad.first() {
        None => format!(
            "{} lines on Y over {field}: {} of type (1,3), each an M_c, the rest of type (2,2)",
            lines.len(),
            jumping.len()
        ),
        Some(l) => format!(
            "line through {} and {} has type {:?}",
            point_text(&l.a0),
            point_text(&l.a1),
            l.splitting
        ),
    };
    let detail = json!({
        "field": field.to_string(),
        "lines": lines.len(),
        "jumping": jumping.len(),
        "jumping-lines": jumping,
    });
    Ok(StageReport::new("lines-on-y", status, witness, detail))
}

fn fiber_plans(ctx: &Ctx) -> Vec<SamplePlan> {
    let mut small: Vec<u32> = ctx
        .opts
        .fields
        .iter()
        .filter_map(|f| match f {
            Field::Prime(p) if *p <= SMALL_FIELD => Some(*p),
            _ => None,
        })
        .collect();
    small.push(SMALL_FIELD);
    small.sort_unstable();
    small.dedup();
    let mut plans: Vec<SamplePlan> = small.into_iter().map(|p| SamplePlan::enumerate(Field::Prime(p))).collect();
    plans.push(SamplePlan::random(Field::Prime(ctx.opts.prime), ctx.opts.samples, ctx.opts.seed));
    plans
}

fn stage_fibers(ctx: &Ctx, name: &str) -> Result<StageReport> {
    let run = if name == "jw" { jw_pointwise } else { jw1_section_check };
    let reports: Vec<FiberReport> =
        fiber_plans(ctx).iter().map(|p| run(ctx.net, p, &ctx.cfg)).collect::<Result<_>>()?;
    let status = Status::combine(reports.iter().map(|r| Status::from(r.verdict)));
    let witness = match reports.iter().find_map(|r| r.first_failure.as_ref()) {
        Some(e) => e.clone(),
        None => {
            let parts: Vec<String> =
                reports.iter().map(|r| format!("{} {} on W, {} off W", r.field, r.on_w, r.off_w)).collect();
            parts.join("; ")
        }
    };
    Ok(StageReport::new(name, status, witness, to_value(&reports)))
}

fn guarded(name: &str, r: Result<StageReport>) -> StageReport {
    r.unwrap_or_else(|e| StageReport::from_error(name, &e))
}

// ---------------------------------------------------------------------------
// Drivers

fn report(net: &ANet, opts: &PipelineOptions, stages: Vec<StageReport>, halted: Option<String>) -> Result<PipelineReport> {
    Ok(PipelineReport {
        schema: SCHEMA_VERSION.into(),
        fingerprint: net.fingerprint()?,
        net: NetShape { n: net.n(), two_m: net.two_m(), field: net.field().to_string() },
        options: opts.clone(),
        status: Status::combine(stages.iter().map(|s| s.status)),
        halted,
        stages,
    })
}

/// Every applicable stage, in schema order. Stops after classification
/// when the net is not smooth and regular.
pub fn run_pipeline(net: &ANet, opts: &PipelineOptions) -> Result<PipelineReport> {
    opts.validate()?;
    let ctx = Ctx { net, opts, cfg: opts.hilbert_config() };
    let c = classify(net, &opts.fields, &ctx.cfg)?;
    let mut stages = classification_stages(&c);
    if !(c.regular.is_yes() && c.y_smooth.is_yes() && c.x_smooth.is_yes()) {
        let why = if c.regular.is_yes() { "X or Y is not smooth" } else { "the net is not regular" };
        return report(net, opts, stages, Some(why.into()));
    }
    stages.push(guarded("pfaffian", stage_pfaffian(&ctx)));
    if is_v14(net) {
        stages.push(guarded("q-quartic", stage_quartic(&ctx)));
        stages.push(guarded("hilbert-C", stage_hilbert_c(&ctx)));
        stages.push(guarded("rank-profile", stage_rank_profile(&ctx)));
    }
    match cohomology_tables(net, &ctx.cfg) {
        Ok(tables) => {
            stages.push(table_stage("theta-table", &tables[0]));
            if let Some(t) = tables.get(1) {
                stages.push(table_stage("charge2-table", t));
            }
        }
        Err(e) => stages.push(StageReport::from_error("theta-table", &e)),
    }
    stages.push(guarded("cohomology-consistency", stage_consistency(&ctx)));
    if is_v14(net) {
        stages.push(guarded("exceptional-pair", stage_exceptional(&ctx)));
        match find_c_points(net, &search_options(&ctx), &ctx.cfg) {
            Ok(search) => {
                stages.push(stage_c_points(&search));
                stages.push(guarded("line-correspondences", stage_lines(&ctx, &search)));
            }
            Err(e) => stages.push(StageReport::from_error("c-points", &e)),
        }
        stages.push(guarded("lines-on-y", stage_lines_on_y(&ctx)));
        stages.push(guarded("jw", stage_fibers(&ctx, "jw")));
        stages.push(guarded("jw1", stage_fibers(&ctx, "jw1")));
    }
    report(net, opts, stages, None)
}

/// One named stage. Shape-specific checks on other shapes are input errors.
pub fn run_check(net: &ANet, name: &str, opts: &PipelineOptions) -> Result<StageReport> {
    opts.validate()?;
    let ctx = Ctx { net, opts, cfg: opts.hilbert_config() };
    if !CHECK_NAMES.contains(&name) {
        return Err(Error::UnknownCheck(name.into()));
    }
    let v14_only = [
        "q-quartic",
        "hilbert-C",
        "rank-profile",
        "charge2-table",
        "exceptional-pair",
        "c-points",
        "line-correspondences",
        "lines-on-y",
        "jw",
        "jw1",
    ];
    if v14_only.contains(&name) && !is_v14(net) {
        return Err(Error::InvalidInput(format!("check `{name}` needs n = 5, 2m = 6")));
    }
    Ok(match name {
        "regularity" | "y-smooth" | "x-smooth" | "singularity-sets" => {
            let c = classify(net, &opts.fields, &ctx.cfg)?;
            classification_stages(&c).into_iter().find(|s| s.name == name).expect("listed stage")
        }
        "pfaffian" => guarded(name, stage_pfaffian(&ctx)),
        "q-quartic" => guarded(name, stage_quartic(&ctx)),
        "hilbert-C" => guarded(name, stage_hilbert_c(&ctx)),
        "rank-profile" => guarded(name, stage_rank_profile(&ctx)),
        "theta-table" => guarded(name, theta_window_table(net, &ctx.cfg).map(|t| table_stage(name, &t))),
        "charge2-table" => guarded(name, charge2_instanton_table(net, &ctx.cfg).map(|t| table_stage(name, &t))),
        "cohomology-consistency" => guarded(name, stage_consistency(&ctx)),
        "exceptional-pair" => guarded(name, stage_exceptional(&ctx)),
        "c-points" => guarded(name, find_c_points(net, &search_options(&ctx), &ctx.cfg).map(|s| stage_c_points(&s))),
        "line-correspondences" => guarded(
            name,
            find_c_points(net, &search_options(&ctx), &ctx.cfg).and_then(|s| stage_lines(&ctx, &s)),
        ),
        "lines-on-y" => guarded(name, stage_lines_on_y(&ctx)),
        _ => guarded(name, stage_fibers(&ctx, name)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDiff {
    pub identical: bool,
    /// JSON paths whose values differ, at most [`DIFF_LIMIT`].
    pub differences: Vec<String>,
}

pub const DIFF_LIMIT: usize = 50;

fn diff_values(path: &str, a: &Value, b: &Value, out: &mut Vec<String>) {
    if out.len() >= DIFF_LIMIT || a == b {
        return;
    }
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            let mut keys: Vec<&String> = x.keys().chain(y.keys()).collect();
            keys.sort();
            keys.dedup();
            for k in keys {
                let p = format!("{path}.{k}");
                match (x.get(k), y.get(k)) {
                    (Some(u), Some(v)) => diff_values(&p, u, v, out),
                    _ => out.push(p),
                }
            }
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            for (i, (u, v)) in x.iter().zip(y).enumerate() {
                let key = u.get("name").and_then(Value::as_str).map(str::to_string).unwrap_or_else(|| i.to_string());
                diff_values(&format!("{path}[{key}]"), u, v, out);
            }
        }
        _ => out.push(path.to_string()),
    }
}

/// Byte comparison of two reports, with the differing paths when they
/// are not identical.
pub fn report_diff(a: &str, b: &str) -> Result<ReportDiff> {
    if a == b {
        return Ok(ReportDiff { identical: true, differences: Vec::new() });
    }
    let va: Value = serde_json::from_str(a)?;
    let vb: Value = serde_json::from_str(b)?;
    let mut differences = Vec::new();
    diff_values("$", &va, &vb, &mut differences);
    if differences.is_empty() {
        differences.push("$ (formatting only)".into());
    }
    Ok(ReportDiff { identical: false, differences })
}
