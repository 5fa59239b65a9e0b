//! Command-line front end: reads germ, `h` and map files, runs the pipeline
//! and prints a report.
//!
//! Exit status: 0 success, 1 parse error, 2 precondition violation, 3
//! invariant violation (including failed `--check` items).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::central::{self, CentralHypersurface};
use crate::equivalence::{self, central_map_alphabet, CentralEquivalence};
use crate::error::{Error, ErrorKind, Result};
use crate::jet::{Alphabet, Gauss, Jet};
use crate::marson;
use crate::report::{jet_from_input, jet_to_json, matrix_to_json, CoeffJson, TermsOrLiteral};
use crate::segre;
use crate::structure::{self, germ_alphabet, StructureGerm};

#[derive(Parser, Debug)]
#[command(
    name = "lis-germ",
    version,
    about = "Exact jet computations for locally integrable structures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Truncation order, overriding the one in the input file.
    #[arg(long, global = true)]
    pub order: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Run the invariant checks for the command and report their residuals.
    #[arg(long, global = true)]
    pub check: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Levi form at ds|0.
    Levi { file: PathBuf },
    /// Central manifold and straightening.
    Central { file: PathBuf },
    /// Morse normal form phi0 + sum c_l t_l^2.
    Normalize { file: PathBuf },
    /// Φ-function of the central hypersurface by both routes.
    Phi { file: PathBuf },
    /// External CR lift and its Levi form.
    External { file: PathBuf },
    /// w-independence of Φ for rigid germs.
    RigidCheck { file: PathBuf },
    /// psi with xi^2 h'' = psi(xi h').
    Ode { file: PathBuf },
    /// Lift a central equivalence to the full structures.
    Lift {
        source: PathBuf,
        target: PathBuf,
        map: PathBuf,
    },
}

/// Germ input: `phi` is a list of terms or a polynomial literal over
/// `z1.., zb1.., s, t1..`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GermFile {
    pub nu: usize,
    pub nprime: usize,
    pub order: u32,
    pub phi: TermsOrLiteral,
    /// Optional base point `(a, b)` on the central hypersurface, used by
    /// `phi` and `rigid-check`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<BasePoint>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasePoint {
    pub a: Vec<CoeffJson>,
    pub b: CoeffJson,
}

/// `h` over the single variable `xi`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HFile {
    pub order: u32,
    pub h: TermsOrLiteral,
}

/// Central map `(z, w) -> (f(z, w), g(z, w))` over `z1.., w`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub f: Vec<TermsOrLiteral>,
    pub g: TermsOrLiteral,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<String>,
    pub order: u32,
    pub results: Value,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckItem>,
    #[serde(skip)]
    text: Vec<String>,
}

impl Report {
    fn new(command: &str, inputs: &[&Path], order: u32) -> Self {
        Report {
            command: command.into(),
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            order,
            results: json!({}),
            warnings: Vec::new(),
            checks: Vec::new(),
            text: Vec::new(),
        }
    }

    fn put(&mut self, key: &str, value: Value, text: impl Into<String>) {
        self.results[key] = value;
        self.text.push(format!("{key}: {}", text.into()));
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckItem {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            Format::Text => {
                let mut out = String::new();
                let _ = writeln!(
                    out,
                    "{} ({}) at order {}",
                    self.command,
                    self.inputs.join(", "),
                    self.order
                );
                for line in &self.text {
                    let _ = writeln!(out, "  {line}");
                }
                for c in &self.checks {
                    let _ = writeln!(
                        out,
                        "  check {}: {} {}",
                        c.name,
                        if c.passed { "ok" } else { "FAILED" },
                        c.detail
                    );
                }
                for w in &self.warnings {
                    let _ = writeln!(out, "  warning: {w}");
                }
                out
            }
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&src).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn load_germ(path: &Path, order: Option<u32>) -> Result<(StructureGerm, GermFile)> {
    let file: GermFile = read_json(path)?;
    let k = order.unwrap_or(file.order);
    let alpha = germ_alphabet(file.nu, file.nprime);
    let phi = jet_from_input(&file.phi, &alpha, k)?;
    Ok((StructureGerm::new(file.nu, file.nprime, k, phi)?, file))
}

fn base_point(file: &GermFile) -> Result<Option<(Vec<Gauss>, Gauss)>> {
    file.base_point
        .as_ref()
        .map(|bp| {
            Ok((
                bp.a.iter()
                    .map(CoeffJson::to_gauss)
                    .collect::<Result<Vec<_>>>()?,
                bp.b.to_gauss()?,
            ))
        })
        .transpose()
}

fn jet_value(j: &Jet) -> Value {
    serde_json::to_value(jet_to_json(j)).expect("jet serializes")
}

fn jets_value(js: &[Jet]) -> Value {
    Value::Array(js.iter().map(jet_value).collect())
}

fn jets_text(js: &[Jet]) -> String {
    js.iter()
        .map(|j| j.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

fn residual_detail(j: &Jet) -> String {
    if j.is_zero() {
        format!("zero to order {}", j.order())
    } else {
        format!("nonzero: {j}")
    }
}

fn cmd_levi(path: &Path, order: Option<u32>, check: bool) -> Result<Report> {
    let (g, _) = load_germ(path, order)?;
    let mut r = Report::new("levi", &[path], g.order());
    let l = structure::levi_form(&g);
    r.put(
        "matrix",
        json!(matrix_to_json(&l.matrix)),
        format!("{}", l.matrix).replace('\n', " "),
    );
    r.put(
        "signature",
        json!(l.signature),
        format!(
            "({}, {}) with {} zero",
            l.signature.positive, l.signature.negative, l.signature.zero
        ),
    );
    r.put(
        "nondegenerate",
        json!(l.nondegenerate),
        l.nondegenerate.to_string(),
    );
    r.put("definite", json!(l.definite), l.definite.to_string());
    r.put(
        "positive",
        json!(l.is_positive()),
        l.is_positive().to_string(),
    );
    if check {
        r.check("hermitian", structure::levi_is_hermitian(&l), "");
        let frame = structure::build_frame(&g);
        let mut all = true;
        for f in &frame.fields {
            for j in 0..g.nu() {
                all &= f.apply(&g.z(j)).is_zero();
            }
            all &= f.apply(&g.w()).is_zero();
        }
        r.check(
            "frame_annihilates_first_integrals",
            all,
            format!("to order {}", g.order() - 1),
        );
    }
    Ok(r)
}

fn cmd_central(path: &Path, order: Option<u32>, check: bool) -> Result<Report> {
    let (g, _) = load_germ(path, order)?;
    let mut r = Report::new("central", &[path], g.order());
    let chart = central::central_manifold(&g)?;
    r.put("F", jets_value(&chart.f), jets_text(&chart.f));
    r.put(
        "sigma_phi",
        jet_value(&chart.sigma_phi),
        chart.sigma_phi.to_string(),
    );
    r.put(
        "straightened_phi",
        jet_value(chart.straightened.phi()),
        chart.straightened.phi().to_string(),
    );
    let curve = g.nu() == 0;
    r.put("curve_case", json!(curve), curve.to_string());
    if curve {
        r.warnings
            .push("nu = 0: the central manifold is a curve with trivial CR structure".into());
    }
    if check {
        let eqs: Vec<Jet> = g
            .vars()
            .t
            .iter()
            .map(|&t| {
                chart
                    .straightened
                    .phi()
                    .derive(t)
                    .restrict_zero(&g.vars().t)
            })
            .collect();
        let zero = eqs.iter().all(Jet::is_zero);
        r.check(
            "straightened_phi_t_vanishes",
            zero,
            format!("to order {}", g.order() - 1),
        );
        let again = central::central_manifold(&chart.straightened)?;
        r.check("idempotent", again.f.iter().all(Jet::is_zero), "");
    }
    Ok(r)
}

fn cmd_normalize(path: &Path, order: Option<u32>, check: bool) -> Result<Report> {
    let (g, _) = load_germ(path, order)?;
    let mut r = Report::new("normalize", &[path], g.order());
    let chart = central::central_manifold(&g)?;
    let sg = chart.straightened.clone();
    let nf = central::morse_normalize(&sg)?;
    r.put("F", jets_value(&chart.f), jets_text(&chart.f));
    r.put("base", jet_value(&nf.base), nf.base.to_string());
    r.put(
        "quad",
        json!(nf
            .quad
            .iter()
            .map(CoeffJson::from_gauss)
            .collect::<Vec<_>>()),
        nf.quad
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(", "),
    );
    r.put("G", jets_value(&nf.g), jets_text(&nf.g));
    r.put(
        "signature_m",
        json!(nf.signature_m),
        nf.signature_m.to_string(),
    );
    r.put(
        "sign_pattern",
        json!(nf.sign_pattern()),
        format!("{:?}", nf.sign_pattern()),
    );
    r.warnings.push("signature_m counts the positive c_l; it is the same at every point of the central manifold".into());
    if check {
        let res = nf.reconstruction_residual(&sg);
        r.check("reconstruction", res.is_zero(), residual_detail(&res));
        let sig = central::t_block_signature(&g);
        r.check(
            "signature_matches_t_block",
            sig.positive == nf.signature_m,
            format!("t-block {:?}", sig),
        );
    }
    Ok(r)
}

fn central_of(g: &StructureGerm, file: &GermFile) -> Result<(CentralHypersurface, bool)> {
    let chart = central::central_manifold(g)?;
    let mut cs = central::central_cr_hypersurface(&chart)?;
    if cs.is_curve() {
        return Err(Error::CurveCase);
    }
    let recentered = match base_point(file)? {
        Some((a, b)) => {
            cs = segre::recenter(&cs, &a, &b)?;
            true
        }
        None => false,
    };
    Ok((cs, recentered))
}

fn phi_entries_value(p: &segre::PhiJet) -> Value {
    serde_json::to_value(p).expect("phi serializes")
}

fn phi_text(p: &segre::PhiJet) -> String {
    let mut parts = Vec::new();
    for k in 0..p.nu {
        for l in k..p.nu {
            parts.push(format!("Phi{}{} = {}", k + 1, l + 1, p.entries[k][l]));
        }
    }
    parts.join("; ")
}

fn cmd_phi(path: &Path, order: Option<u32>, check: bool) -> Result<Report> {
    let (g, file) = load_germ(path, order)?;
    let mut r = Report::new("phi", &[path], g.order());
    let (cs, recentered) = central_of(&g, &file)?;
    let cd = segre::complexify_defining(&cs)?;
    let elim = segre::phi_elimination(&cd)?;
    let det = segre::phi_determinant(&cd)?;
    let agree = elim.agrees_with(&det);
    if !agree {
        return Err(Error::Invariant("the two Φ routes disagree".into()));
    }
    r.put("rho", jet_value(&cd.rho), cd.rho.to_string());
    r.put("phi", phi_entries_value(&elim), phi_text(&elim));
    r.put(
        "reliable_order",
        json!(elim.reliable_order),
        elim.reliable_order.to_string(),
    );
    r.put(
        "rho_w_at_zero",
        json!(det.rho_w_at_zero.as_ref().map(CoeffJson::from_gauss)),
        det.rho_w_at_zero
            .as_ref()
            .map(|c| c.to_string())
            .unwrap_or_default(),
    );
    r.put("routes_agree", json!(agree), agree.to_string());
    r.put(
        "all_zero",
        json!(elim.is_zero()),
        elim.is_zero().to_string(),
    );
    if recentered {
        r.warnings
            .push("Φ is expressed in coordinates centered at the given base point".into());
    }
    if check {
        let bs = cd.back_substitution_residual()?;
        r.check("back_substitution", bs.is_zero(), residual_detail(&bs));
        r.check("symmetric", elim.is_symmetric() && det.is_symmetric(), "");
        r.check(
            "routes_agree",
            agree,
            format!("to order {}", elim.reliable_order),
        );
    }
    Ok(r)
}

fn cmd_external(path: &Path, order: Option<u32>, check: bool) -> Result<Report> {
    let (g, _) = load_germ(path, order)?;
    let mut r = Report::new("external", &[path], g.order());
    let lift = marson::external_lift(&g)?;
    let e = marson::external_levi(&lift);
    r.put(
        "defining",
        jet_value(&lift.defining),
        lift.defining.to_string(),
    );
    r.put(
        "levi",
        json!(e.levi),
        format!("{}", e.levi.matrix).replace('\n', " "),
    );
    r.put(
        "relation_holds",
        json!(e.relation_holds),
        e.relation_holds.to_string(),
    );
    r.put(
        "strictly_pseudoconvex",
        json!(e.strictly_pseudoconvex),
        e.strictly_pseudoconvex.to_string(),
    );
    let (before, after) = lift.first_integral_ranks();
    r.put(
        "first_integral_rank",
        json!([before, after]),
        format!("{before} -> {after}"),
    );
    r.warnings.push(marson::CHART_NOTE.into());
    if check {
        let back = lift.restrict_to_source()?;
        r.check("restores_source", back == *g.phi(), "");
        r.check("levi_relation", e.relation_holds, "");
        r.check("direct_levi_matches_blocks", e.direct_matches, "");
        if e.source_levi.definite {
            r.check("definite_source_gives_definite_lift", e.levi.definite, "");
        }
    }
    Ok(r)
}

fn cmd_rigid(path: &Path, order: Option<u32>, check: bool) -> Result<Report> {
    let (g, file) = load_germ(path, order)?;
    let mut r = Report::new("rigid-check", &[path], g.order());
    let bp = base_point(&file)?;
    let v = segre::rigid_phi_test(&g, bp.as_ref().map(|(a, b)| (a.as_slice(), b)))?;
    r.put(
        "analytic_consistent",
        json!(v.analytic_consistent),
        v.analytic_consistent.to_string(),
    );
    r.put(
        "offending",
        json!(v.offending),
        format!("{:?}", v.offending),
    );
    r.put(
        "reliable_order",
        json!(v.reliable_order),
        v.reliable_order.to_string(),
    );
    r.put("phi", phi_entries_value(&v.phi), phi_text(&v.phi));
    r.warnings.push(
        "a positive verdict is necessary-condition evidence on truncated jets, not a proof of analyticity".into(),
    );
    if check {
        r.check("symmetric", v.phi.is_symmetric(), "");
    }
    Ok(r)
}

fn cmd_ode(path: &Path, order: Option<u32>, check: bool) -> Result<Report> {
    let file: HFile = read_json(path)?;
    let k = order.unwrap_or(file.order);
    let xa = Alphabet::plain(&["xi"])?;
    let h = jet_from_input(&file.h, &xa, k)?;
    let mut r = Report::new("ode", &[path], k);
    let p = segre::example_psi(&h, k)?;
    r.put("h2", json!(CoeffJson::from_gauss(&p.h2)), p.h2.to_string());
    r.put("Psi_r", jet_value(&p.psi_r), p.psi_r.to_string());
    match &p.psi_u {
        Some(u) => r.put("psi", jet_value(u), u.to_string()),
        None => {
            r.put(
                "psi",
                Value::Null,
                "not a power series in u (odd powers of sqrt(u / 2 h2))",
            );
            r.warnings
                .push("psi is a series in u^(1/2): psi(u) = Psi(sqrt(u / (2 h2)))".into());
        }
    }
    if check {
        let res = segre::psi_residual(&h, &p, k)?;
        r.check("residual", res.is_zero(), residual_detail(&res));
    }
    Ok(r)
}

fn load_map(path: &Path, nu: usize, k: u32) -> Result<(Vec<Jet>, Jet)> {
    let file: MapFile = read_json(path)?;
    let ma = central_map_alphabet(nu);
    let f = file
        .f
        .iter()
        .map(|t| jet_from_input(t, &ma, k))
        .collect::<Result<Vec<_>>>()?;
    let g = jet_from_input(&file.g, &ma, k)?;
    Ok((f, g))
}

fn central_from_germ(g: &StructureGerm) -> Result<CentralHypersurface> {
    CentralHypersurface::new(g.nu(), g.phi_at_t_zero().embed(&germ_alphabet(g.nu(), 0))?)
}

fn cmd_lift(
    source: &Path,
    target: &Path,
    map: &Path,
    order: Option<u32>,
    check: bool,
) -> Result<Report> {
    let (gs, _) = load_germ(source, order)?;
    let (gt, _) = load_germ(target, order)?;
    let k = gs.order().min(gt.order());
    let (f, g) = load_map(map, gs.nu(), k)?;
    let mut r = Report::new("lift", &[source, target, map], k);
    let ce = CentralEquivalence::new(f, g, central_from_germ(&gs)?, central_from_germ(&gt)?)?;
    let le = equivalence::lift_equivalence(&ce, &gs, &gt)?;
    let rep = equivalence::verify_lift(&le, &ce, &gs, &gt)?;
    r.put("lambda", jet_value(&le.lambda), le.lambda.to_string());
    r.put(
        "sqrt_lambda0",
        json!(CoeffJson::from_gauss(&le.sqrt_lambda0)),
        le.sqrt_lambda0.to_string(),
    );
    r.put("Z", jets_value(&le.z), jets_text(&le.z));
    r.put("S", jet_value(&le.s), le.s.to_string());
    r.put("T", jets_value(&le.t), jets_text(&le.t));
    r.put("verified", json!(rep.ok), rep.ok.to_string());
    r.put(
        "reliable_order",
        json!(rep.reliable_order),
        rep.reliable_order.to_string(),
    );
    if !rep.ok {
        return Err(Error::Invariant("lifted map fails verification".into()));
    }
    if check {
        for (idx, p) in rep.pullbacks.iter().enumerate() {
            let detail = p
                .first_failure
                .as_ref()
                .map(|(_, j)| residual_detail(j))
                .unwrap_or_default();
            r.check(
                &format!("pullback_{idx}_is_solution"),
                p.is_solution,
                detail,
            );
        }
        r.check(
            "w_pullback_equals_g",
            rep.w_mismatch.is_zero(),
            residual_detail(&rep.w_mismatch),
        );
        r.check("restriction_to_central_manifold", rep.restriction_ok, "");
        let again = equivalence::extract_lambda(&ce)?;
        r.check("lambda_consistent", again == le.lambda, "");
    }
    Ok(r)
}

/// Runs one parsed command.
pub fn run(cli: &Cli) -> Result<Report> {
    let (o, c) = (cli.order, cli.check);
    match &cli.command {
        Command::Levi { file } => cmd_levi(file, o, c),
        Command::Central { file } => cmd_central(file, o, c),
        Command::Normalize { file } => cmd_normalize(file, o, c),
        Command::Phi { file } => cmd_phi(file, o, c),
        Command::External { file } => cmd_external(file, o, c),
        Command::RigidCheck { file } => cmd_rigid(file, o, c),
        Command::Ode { file } => cmd_ode(file, o, c),
        Command::Lift {
            source,
            target,
            map,
        } => cmd_lift(source, target, map, o, c),
    }
}

pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Parse => 1,
        ErrorKind::Precondition => 2,
        ErrorKind::Invariant => 3,
    }
}

/// Parses `args`, runs, writes to the given streams and returns the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            if code == 0 {
                let _ = write!(out, "{}", e.render());
            } else {
                let _ = write!(err, "{}", e.render());
            }
            return code;
        }
    };
    match run(&cli) {
        Ok(report) => {
            let _ = write!(out, "{}", report.render(cli.format));
            if report.checks_passed() {
                0
            } else {
                3
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(e.kind())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_check_is_reported() {
        let mut r = Report::new("levi", &[Path::new("x.json")], 4);
        r.put("definite", json!(true), "true");
        r.check("hermitian", true, "");
        assert!(r.checks_passed());
        r.check("frame", false, "nonzero: z1");
        assert!(!r.checks_passed());
        assert!(r
            .render(Format::Text)
            .contains("check frame: FAILED nonzero: z1"));
        let v: Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(v["checks"][1]["passed"], json!(false));
    }

    #[test]
    fn germ_file_accepts_terms_and_literals() {
        let dir = std::env::temp_dir().join(format!("lis-germ-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let a = dir.join("a.json");
        let b = dir.join("b.json");
        std::fs::write(&a, r#"{"nu":1,"nprime":0,"order":4,"phi":"z1*zb1"}"#).unwrap();
        std::fs::write(
            &b,
            r#"{"nu":1,"nprime":0,"order":4,"phi":[{"exponents":{"z1":1,"zb1":1},"coeff":"1"}]}"#,
        )
        .unwrap();
        let (ga, _) = load_germ(&a, None).unwrap();
        let (gb, _) = load_germ(&b, Some(4)).unwrap();
        assert_eq!(ga.phi(), gb.phi());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
