//! Invariant checks over framework and complex documents.

use std::collections::BTreeMap;
use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::framework::{self_stress_basis, self_stress_defect, Framework, Stress, VertexId};
use crate::grassmann::{grassmann_lifting, AffineFlat, GrassmannPath};
use crate::homotopy::{elementary_forms, recover_stress_nd, vertex_monodromy};
use crate::io::{parse_complex, parse_framework};
use crate::lifting2d::{differential_lifting_2d, integrate, recover_stress};
use crate::linalg::Vector;
use crate::polytopal::{facet_monodromy, forceload_basis, forceload_defect, stress_to_forceload, ForceLoad, PolytopalComplex};
use crate::tol::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub exit_code: i32,
}

impl VerifyReport {
    fn new(checks: Vec<Check>) -> Self {
        let exit_code = if checks.iter().all(|c| c.status == Status::Pass) { 0 } else { 1 };
        Self { checks, exit_code }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            writeln!(out, "{tag} {} max_residual={:.3e}", c.name, c.max_residual).unwrap();
        }
        let passed = self.checks.iter().filter(|c| c.status == Status::Pass).count();
        writeln!(out, "{passed}/{} checks passed", self.checks.len()).unwrap();
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    pub tol: Tolerances,
    /// Also compare Grassmannian liftings along random paths.
    pub grassmann: bool,
    pub grassmann_trials: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            tol: Tolerances::default(),
            grassmann: false,
            grassmann_trials: 5,
        }
    }
}

/// Run the checks on every `(name, text)` document. Documents with an
/// `ambient_dim` key are read as polytopal complexes, the rest as
/// frameworks. Any parse error aborts the run.
pub fn run_verify(docs: &[(String, String)], opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut parsed = Vec::new();
    for (name, text) in docs {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("{name}: line {}: {e}", e.line())))?;
        let doc = if value.get("ambient_dim").is_some() {
            Doc::Complex(parse_complex(text, &opts.tol).map_err(|e| Error::Parse(format!("{name}: {e}")))?)
        } else {
            Doc::Framework(parse_framework(text, &opts.tol).map_err(|e| Error::Parse(format!("{name}: {e}")))?)
        };
        parsed.push((name, doc));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = Vec::new();
    for (name, doc) in parsed {
        match doc {
            Doc::Framework((fw, s)) => framework_checks(name, &fw, s, opts, &mut rng, &mut checks),
            Doc::Complex((c, w)) => complex_checks(name, &c, w, opts, &mut rng, &mut checks),
        }
    }
    Ok(VerifyReport::new(checks))
}

enum Doc {
    Framework((Framework, Option<Stress>)),
    Complex((PolytopalComplex, Option<ForceLoad>)),
}

fn push(checks: &mut Vec<Check>, name: String, outcome: Result<(f64, f64)>) {
    let (status, max_residual) = match outcome {
        Ok((r, limit)) if r <= limit => (Status::Pass, r),
        Ok((r, _)) => (Status::Fail, r),
        Err(e) => (Status::Fail, residual_of(&e)),
    };
    checks.push(Check {
        name,
        status,
        max_residual,
    });
}

fn residual_of(e: &Error) -> f64 {
    match e {
        Error::NotSelfStress(r) | Error::NotEquilibrium(r) => *r,
        Error::Consistency { residual, .. } | Error::NotParallel { residual, .. } => *residual,
        Error::Continuity { mismatch, .. } => *mismatch,
        _ => f64::MAX,
    }
}

fn framework_checks(name: &str, fw: &Framework, s: Option<Stress>, opts: &VerifyOptions, rng: &mut ChaCha8Rng, checks: &mut Vec<Check>) {
    let tol = &opts.tol;
    let s = s.unwrap_or_else(|| self_stress_basis(fw, tol).into_iter().next().unwrap_or_default());
    let scale = s.iter().map(|(e, w)| w.abs() * fw.difference(e.a(), e.b()).map_or(0.0, |d| d.norm())).fold(1.0, f64::max);
    let limit = tol.eps_form * scale;

    push(checks, format!("{name}: equilibrium"), self_stress_defect(fw, &s, tol));

    let monodromy = (|| {
        let mut worst = 0.0f64;
        for v in fw.vertex_ids() {
            worst = worst.max(vertex_monodromy(fw, &s, v)?.max_abs());
        }
        Ok((worst, limit))
    })();
    push(checks, format!("{name}: monodromy"), monodromy);

    if fw.dim() == 2 {
        let dl = differential_lifting_2d(fw, &s, tol);
        push(checks, format!("{name}: lifting-consistency"), dl.as_ref().map(|_| (0.0, limit)).map_err(Clone::clone));
        if let Ok(dl) = &dl {
            if dl.complex().is_crossing_free() {
                let polyhedral = integrate(fw, dl, tol).and_then(|pl| {
                    let r = pl.continuity_defect().max(pl.normal_relation_defect(fw, &s)?);
                    Ok((r, limit))
                });
                push(checks, format!("{name}: polyhedral-lifting"), polyhedral);
            }
            let round_trip = recover_stress(fw, dl, tol).map(|back| (back.max_diff(&s), limit));
            push(checks, format!("{name}: bijection"), round_trip);
        }
    } else {
        let round_trip = elementary_forms(fw, &s).and_then(|forms| {
            let oriented: BTreeMap<(VertexId, VertexId), _> = forms.into_iter().map(|(e, f)| ((e.a(), e.b()), f)).collect();
            let back = recover_stress_nd(fw, &oriented, tol)?;
            Ok((back.max_diff(&s), limit))
        });
        push(checks, format!("{name}: bijection"), round_trip);
    }

    if opts.grassmann {
        if let Some(fw3) = lift_to_space(fw, tol) {
            if let Ok((c, _)) = PolytopalComplex::from_framework(&fw3, tol) {
                let w = c
                    .associated_mframework(tol)
                    .and_then(|mf| ForceLoad::new(&mf, stress_to_forceload(&fw3, &s, &c, tol)?));
                match w {
                    Ok(w) => grassmann_check(name, &c, &w, opts, rng, checks),
                    Err(e) => push(checks, format!("{name}: grassmann-path-independence"), Err(e)),
                }
            }
        }
    }
}

/// The framework itself in ℝ³, or its copy in the plane z = 0.
fn lift_to_space(fw: &Framework, tol: &Tolerances) -> Option<Framework> {
    match fw.dim() {
        3 => Some(fw.clone()),
        2 => Framework::new(
            3,
            fw.vertices().map(|(id, p)| (id, Vector::from_column_slice(&[p[0], p[1], 0.0]))),
            fw.edges().map(|e| (e.a(), e.b())),
            tol,
        )
        .ok(),
        _ => None,
    }
}

fn complex_checks(name: &str, c: &PolytopalComplex, w: Option<ForceLoad>, opts: &VerifyOptions, rng: &mut ChaCha8Rng, checks: &mut Vec<Check>) {
    let tol = &opts.tol;
    let mf = match c.associated_mframework(tol) {
        Ok(mf) => mf,
        Err(e) => return push(checks, format!("{name}: complex"), Err(e)),
    };
    let loads = match w {
        Some(w) => vec![w],
        None => forceload_basis(&mf, tol),
    };
    checks.push(Check {
        name: format!("{name}: forceload-present"),
        status: if loads.is_empty() { Status::Fail } else { Status::Pass },
        max_residual: 0.0,
    });
    for (k, w) in loads.iter().enumerate() {
        push(checks, format!("{name}: equilibrium[{k}]"), forceload_defect(&mf, w, tol));
        let monodromy = (|| {
            let mut worst = 0.0f64;
            for e in 0..mf.edges().len() {
                worst = worst.max(facet_monodromy(&mf, w, e)?.max_abs());
            }
            Ok((worst, tol.eps_form * 1f64.max(w.max_abs())))
        })();
        push(checks, format!("{name}: monodromy[{k}]"), monodromy);
    }
    if opts.grassmann && c.ambient_dim() == 3 {
        if let Some(w) = loads.first() {
            grassmann_check(name, c, w, opts, rng, checks);
        }
    }
}

fn grassmann_check(name: &str, c: &PolytopalComplex, w: &ForceLoad, opts: &VerifyOptions, rng: &mut ChaCha8Rng, checks: &mut Vec<Check>) {
    let outcome = (|| {
        let mut worst = 0.0f64;
        let mut size = 1.0f64;
        for _ in 0..opts.grassmann_trials {
            let target = random_flat(rng, c, 1.0)?;
            let a = lifting_along_random_path(rng, c, w, &target, &opts.tol)?;
            let b = lifting_along_random_path(rng, c, w, &target, &opts.tol)?;
            worst = worst.max((a - b).abs());
            size = size.max(a.abs());
        }
        Ok((worst, opts.tol.eps_form * size))
    })();
    push(checks, format!("{name}: grassmann-path-independence"), outcome);
}

fn bounding_ball(c: &PolytopalComplex) -> (Vector, f64) {
    let pts = c.points();
    let centre = pts.iter().fold(Vector::zeros(c.ambient_dim()), |acc, p| acc + p) / pts.len() as f64;
    let radius = pts.iter().map(|p| (p - &centre).norm()).fold(0.0, f64::max);
    (centre, radius.max(1e-3))
}

/// A random flat of the dimension complementary to the faces, with spanning
/// points in the ball `reach` times the bounding ball of the complex.
pub fn random_flat(rng: &mut ChaCha8Rng, c: &PolytopalComplex, reach: f64) -> Result<AffineFlat> {
    let (centre, radius) = bounding_ball(c);
    let n = c.ambient_dim();
    let count = n - c.face_dim();
    let tol = Tolerances::default();
    for _ in 0..100 {
        let pts = (0..count)
            .map(|_| &centre + Vector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0)) * (reach * radius))
            .collect();
        if let Ok(f) = AffineFlat::new(pts, &tol) {
            return Ok(f);
        }
    }
    Err(Error::DegenerateFlat)
}

/// Lifting of `target` along a random path: a start flat beyond the
/// bounding ball, one to three random flats near the complex, then `target`.
/// Paths that hit a face non-transversally are redrawn.
pub fn lifting_along_random_path(rng: &mut ChaCha8Rng, c: &PolytopalComplex, w: &ForceLoad, target: &AffineFlat, tol: &Tolerances) -> Result<f64> {
    let (_, radius) = bounding_ball(c);
    let n = c.ambient_dim();
    for _ in 0..100 {
        let mut dir = Vector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        if dir.norm() < 0.1 {
            continue;
        }
        dir *= (4.0 * radius + 1.0) / dir.norm();
        let mut samples = vec![random_flat(rng, c, 0.3)?.translated(&dir)];
        for _ in 0..rng.gen_range(1..4) {
            samples.push(random_flat(rng, c, 1.5)?);
        }
        samples.push(target.clone());
        let Ok(path) = GrassmannPath::new(samples) else { continue };
        match grassmann_lifting(&path, c, w, tol) {
            Ok(v) => return Ok(v),
            Err(Error::NonSimplePath(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NonSimplePath("no simple random path found".into()))
}
