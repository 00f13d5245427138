//! `stresslift` command-line tool.
//!
//! Exit codes: 0 on success, 1 when a check fails or a computation is
//! rejected (for example a stress that is not in equilibrium), 2 for usage,
//! I/O and parse errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;
use serde::Deserialize;
use serde_json::{json, Value};

use stresslift::arrangement::build_chamber_complex;
use stresslift::export::{export_obj, export_svg};
use stresslift::framework::{self_stress_basis, Edge};
use stresslift::grassmann::{grassmann_lifting, path_crossings};
use stresslift::homotopy::{elementary_forms, lifting_of_loop, lifting_of_word, CrossingWord, PolygonalLoop};
use stresslift::io::{parse_complex, parse_framework, parse_path};
use stresslift::lifting2d::{differential_lifting_2d, integrate};
use stresslift::polytopal::{facet_monodromy, forceload_basis, forceload_defect, lifting_of_word_m};
use stresslift::verify::{run_verify, VerifyOptions};
use stresslift::{Error, Framework, Stress, Tolerances};

#[derive(Debug, Parser)]
#[command(name = "stresslift", version, about = "Self-stresses and liftings of frameworks and polytopal complexes")]
struct Cli {
    /// Geometric tolerance (collinearity, coincidence, equilibrium).
    #[arg(long, global = true, default_value_t = 1e-9)]
    eps_geom: f64,
    /// Tolerance for comparing forms.
    #[arg(long, global = true, default_value_t = 1e-8)]
    eps_form: f64,
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Orthonormal basis of the self-stresses of a framework.
    StressBasis { framework: PathBuf },
    /// Chamber forms of a planar framework, plus the integrated lifting when
    /// the framework is crossing-free.
    Lift2d {
        framework: PathBuf,
        /// Use this basis self-stress instead of the document's stresses.
        #[arg(long)]
        basis_index: Option<usize>,
    },
    /// Elementary forms of a framework in any dimension, and optionally the
    /// lifting of a crossing word or of a polygonal loop.
    LiftNd {
        framework: PathBuf,
        #[arg(long)]
        basis_index: Option<usize>,
        /// Crossing word such as "1-2:+1,2-4:+1".
        #[arg(long)]
        word: Option<String>,
        /// JSON file {"points": [[x, y, z], ...]} describing a closed loop.
        #[arg(long = "loop")]
        loop_file: Option<PathBuf>,
        /// Cone apex for the loop, "x,y,z".
        #[arg(long, default_value = "5,5,5")]
        apex: String,
    },
    /// Force-loads and facet monodromy of a polytopal complex.
    LiftComplex {
        complex: PathBuf,
        /// Face crossing word such as "0:+1,3:-1".
        #[arg(long)]
        word: Option<String>,
    },
    /// Lifting of the final flat of a path of flats.
    GrassmannLift { complex: PathBuf, path: PathBuf },
    /// Run the invariant checks on framework and complex documents.
    Verify {
        #[arg(required = true)]
        docs: Vec<PathBuf>,
        /// Also compare Grassmannian liftings along random paths.
        #[arg(long)]
        grassmann: bool,
    },
    /// OBJ mesh of the polyhedral lifting of a crossing-free framework.
    ExportObj {
        framework: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// SVG drawing of the chambers with their forms.
    ExportSvg {
        framework: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Input(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(m) => Failure::Input(m),
            e => Failure::Check(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(String, u8), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_framework(path: &Path, tol: &Tolerances) -> Result<(Framework, Option<Stress>), Failure> {
    parse_framework(&read(path)?, tol).map_err(|e| match e {
        Error::Parse(m) => Failure::Input(format!("{}: {m}", path.display())),
        e => Failure::Input(format!("{}: {e}", path.display())),
    })
}

/// The stress to work with: a basis element when asked for, else the
/// document's own stress, else the first basis element.
fn pick_stress(fw: &Framework, s: Option<Stress>, index: Option<usize>, tol: &Tolerances) -> Result<Stress, Failure> {
    if let Some(k) = index {
        let basis = self_stress_basis(fw, tol);
        let n = basis.len();
        return basis
            .into_iter()
            .nth(k)
            .ok_or_else(|| Failure::Input(format!("basis index {k} out of range (dimension {n})")));
    }
    match s {
        Some(s) => Ok(s),
        None => self_stress_basis(fw, tol)
            .into_iter()
            .next()
            .ok_or_else(|| Failure::Check("document has no stresses and the framework has no self-stress".into())),
    }
}

fn stress_json(s: &Stress) -> Value {
    Value::Array(s.iter().map(|(e, w)| json!({"i": e.a().0, "j": e.b().0, "stress": w})).collect())
}

fn parse_word(text: &str) -> Result<Vec<(String, i32)>, Failure> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (lhs, sign) = t
                .trim()
                .rsplit_once(':')
                .ok_or_else(|| Failure::Input(format!("word entry `{t}` needs a `:sign`")))?;
            let sign = match sign.trim() {
                "+1" | "1" | "+" => 1,
                "-1" | "-" => -1,
                other => return Err(Failure::Input(format!("bad sign `{other}`"))),
            };
            Ok((lhs.trim().to_string(), sign))
        })
        .collect()
}

fn parse_floats(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| Failure::Input(format!("bad number `{x}`: {e}"))))
        .collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LoopDoc {
    points: Vec<[f64; 3]>,
}

fn stress_basis(cli: &Cli, path: &Path, tol: &Tolerances) -> Outcome {
    let (fw, _) = load_framework(path, tol)?;
    let basis = self_stress_basis(&fw, tol);
    let out = match cli.format {
        Format::Json => json!({"dimension": basis.len(), "basis": basis.iter().map(stress_json).collect::<Vec<_>>()}).to_string(),
        Format::Text => {
            let mut out = format!("self-stress space dimension {}\n", basis.len());
            for (k, s) in basis.iter().enumerate() {
                writeln!(out, "basis {k}:").unwrap();
                for (e, w) in s.iter() {
                    writeln!(out, "  {e} {w:.12}").unwrap();
                }
            }
            out
        }
    };
    Ok((out, 0))
}

fn lift2d(cli: &Cli, path: &Path, index: Option<usize>, tol: &Tolerances) -> Outcome {
    let (fw, s) = load_framework(path, tol)?;
    let s = pick_stress(&fw, s, index, tol)?;
    let dl = differential_lifting_2d(&fw, &s, tol)?;
    let cc = dl.complex();
    let pl = if cc.is_crossing_free() { Some(integrate(&fw, &dl, tol)?) } else { None };
    let mut chambers = Vec::new();
    let mut text = format!("{} chambers, {} crossings\n", cc.len(), cc.num_crossings());
    for (id, form) in dl.forms() {
        let ch = cc.chamber(id);
        let point = cc.interior_point(id);
        let mut entry = json!({
            "id": id,
            "bounded": ch.bounded,
            "point": [point[0], point[1]],
            "form": form.to_vector().map(|v| vec![v[0], v[1]]),
        });
        let label = if ch.bounded { format!("C{id}") } else { "C∞".into() };
        write!(text, "{label} at ({:.6}, {:.6}): {form}", point[0], point[1]).unwrap();
        if let Some(pl) = &pl {
            let g = pl.gradient(id);
            entry["gradient"] = json!([g[0], g[1]]);
            entry["offset"] = json!(pl.offset(id));
            write!(text, "   L = {:.9} x {:+.9} y {:+.9}", g[0], g[1], pl.offset(id)).unwrap();
        }
        text.push('\n');
        chambers.push(entry);
    }
    if let Some(pl) = &pl {
        writeln!(text, "continuity defect {:.3e}", pl.continuity_defect()).unwrap();
    }
    let out = match cli.format {
        Format::Json => json!({
            "chambers": chambers,
            "crossings": cc.num_crossings(),
            "continuity_defect": pl.as_ref().map(|pl| pl.continuity_defect()),
        })
        .to_string(),
        Format::Text => text,
    };
    Ok((out, 0))
}

fn lift_nd(cli: &Cli, path: &Path, index: Option<usize>, word: Option<&str>, loop_file: Option<&Path>, apex: &str, tol: &Tolerances) -> Outcome {
    let (fw, s) = load_framework(path, tol)?;
    let s = pick_stress(&fw, s, index, tol)?;
    let forms = elementary_forms(&fw, &s)?;
    let mut text = String::from("elementary forms (crossing p_i p_j, i < j, sign +1):\n");
    let mut table = Vec::new();
    for (e, f) in &forms {
        writeln!(text, "  {e}: {f}").unwrap();
        table.push(json!({"i": e.a().0, "j": e.b().0, "form": f.to_vector().map(|v| v.iter().copied().collect::<Vec<_>>())}));
    }
    let mut result = json!({"elementary_forms": table});
    if let Some(word) = word {
        let mut entries = Vec::new();
        for (lhs, sign) in parse_word(word)? {
            let (i, j) = lhs
                .split_once('-')
                .ok_or_else(|| Failure::Input(format!("edge `{lhs}` should look like `1-2`")))?;
            let parse = |x: &str| x.trim().parse::<u32>().map_err(|e| Failure::Input(format!("bad vertex `{x}`: {e}")));
            let (i, j) = (parse(i)?, parse(j)?);
            Edge::new(i, j)?;
            entries.push((i, j, sign));
        }
        let value = lifting_of_word(&fw, &s, &CrossingWord::new(&entries), tol)?;
        writeln!(text, "word {word}: {value}").unwrap();
        result["word"] = json!(value.to_vector().map(|v| v.iter().copied().collect::<Vec<_>>()));
    }
    if let Some(lp) = loop_file {
        let doc: LoopDoc = serde_json::from_str(&read(lp)?).map_err(|e| Failure::Input(format!("{}: line {}: {e}", lp.display(), e.line())))?;
        let lp = PolygonalLoop::new(doc.points.iter().map(|p| Vector3::from(*p)).collect())?;
        let a = parse_floats(apex)?;
        if a.len() != 3 {
            return Err(Failure::Input("apex needs three coordinates".into()));
        }
        let value = lifting_of_loop(&fw, &s, &lp, &Vector3::new(a[0], a[1], a[2]), tol)?;
        writeln!(text, "loop: {value}").unwrap();
        result["loop"] = json!(value.to_vector().map(|v| v.iter().copied().collect::<Vec<_>>()));
    }
    let out = match cli.format {
        Format::Json => result.to_string(),
        Format::Text => text,
    };
    Ok((out, 0))
}

fn lift_complex(cli: &Cli, path: &Path, word: Option<&str>, tol: &Tolerances) -> Outcome {
    let (c, w) = parse_complex(&read(path)?, tol).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let mf = c.associated_mframework(tol)?;
    let loads = match w {
        Some(w) => vec![w],
        None => forceload_basis(&mf, tol),
    };
    let mut text = format!(
        "{} polytopes, {} facets, {} force-load(s)\n",
        c.polytopes().len(),
        c.facets().len(),
        loads.len()
    );
    let mut entries = Vec::new();
    let mut code = 0;
    for (k, w) in loads.iter().enumerate() {
        let (defect, limit) = forceload_defect(&mf, w, tol)?;
        let mut worst = 0.0f64;
        for e in 0..mf.edges().len() {
            worst = worst.max(facet_monodromy(&mf, w, e)?.max_abs());
        }
        if defect > limit {
            code = 1;
        }
        writeln!(text, "load {k}: equilibrium residual {defect:.3e}, max facet monodromy {worst:.3e}").unwrap();
        let mut entry = json!({"values": w.values(), "equilibrium_residual": defect, "max_facet_monodromy": worst});
        if let Some(word) = word {
            let mut faces = Vec::new();
            for (lhs, sign) in parse_word(word)? {
                faces.push((lhs.parse::<usize>().map_err(|e| Failure::Input(format!("bad face `{lhs}`: {e}")))?, sign));
            }
            match lifting_of_word_m(&mf, w, &faces, tol) {
                Ok(form) => {
                    writeln!(text, "  word {word}: {form}").unwrap();
                    entry["word"] = json!(form.to_string());
                }
                Err(e) => {
                    code = 1;
                    writeln!(text, "  word {word}: {e}").unwrap();
                }
            }
        }
        entries.push(entry);
    }
    let out = match cli.format {
        Format::Json => json!({"polytopes": c.polytopes().len(), "facets": c.facets().len(), "loads": entries}).to_string(),
        Format::Text => text,
    };
    Ok((out, code))
}

fn grassmann_lift(cli: &Cli, complex: &Path, path: &Path, tol: &Tolerances) -> Outcome {
    let (c, w) = parse_complex(&read(complex)?, tol).map_err(|e| Failure::Input(format!("{}: {e}", complex.display())))?;
    let w = match w {
        Some(w) => w,
        None => forceload_basis(&c.associated_mframework(tol)?, tol)
            .into_iter()
            .next()
            .ok_or_else(|| Failure::Check("complex has no force-load".into()))?,
    };
    let p = parse_path(&read(path)?, tol).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let events = path_crossings(&p, &c, tol)?;
    let value = grassmann_lifting(&p, &c, &w, tol)?;
    let out = match cli.format {
        Format::Json => json!({
            "value": value,
            "events": events.iter().map(|e| json!({"face": e.face, "t": e.t, "mu": e.mu})).collect::<Vec<_>>(),
        })
        .to_string(),
        Format::Text => {
            let mut out = String::new();
            for e in &events {
                writeln!(out, "crossing face {} at t = {:.9} with sign {:+}", e.face, e.t, e.mu).unwrap();
            }
            writeln!(out, "lifting {value:.12}").unwrap();
            out
        }
    };
    Ok((out, 0))
}

fn verify(cli: &Cli, docs: &[PathBuf], grassmann: bool, tol: &Tolerances) -> Outcome {
    let mut texts = Vec::new();
    for d in docs {
        texts.push((d.display().to_string(), read(d)?));
    }
    let opts = VerifyOptions {
        seed: cli.seed,
        tol: *tol,
        grassmann,
        ..Default::default()
    };
    let report = run_verify(&texts, &opts)?;
    let out = match cli.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    Ok((out, report.exit_code as u8))
}

fn write_or_return(output: Option<&Path>, body: String) -> Outcome {
    match output {
        Some(p) => {
            std::fs::write(p, body).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            Ok((String::new(), 0))
        }
        None => Ok((body, 0)),
    }
}

fn run(cli: &Cli) -> Outcome {
    let tol = Tolerances::new(cli.eps_geom, cli.eps_form, Tolerances::default().eps_rank)
        .ok_or_else(|| Failure::Input("tolerances must be positive and finite".into()))?;
    match &cli.command {
        Command::StressBasis { framework } => stress_basis(cli, framework, &tol),
        Command::Lift2d { framework, basis_index } => lift2d(cli, framework, *basis_index, &tol),
        Command::LiftNd {
            framework,
            basis_index,
            word,
            loop_file,
            apex,
        } => lift_nd(cli, framework, *basis_index, word.as_deref(), loop_file.as_deref(), apex, &tol),
        Command::LiftComplex { complex, word } => lift_complex(cli, complex, word.as_deref(), &tol),
        Command::GrassmannLift { complex, path } => grassmann_lift(cli, complex, path, &tol),
        Command::Verify { docs, grassmann } => verify(cli, docs, *grassmann, &tol),
        Command::ExportObj { framework, output } => {
            let (fw, s) = load_framework(framework, &tol)?;
            let s = pick_stress(&fw, s, None, &tol)?;
            let dl = differential_lifting_2d(&fw, &s, &tol)?;
            let pl = integrate(&fw, &dl, &tol)?;
            write_or_return(output.as_deref(), export_obj(&pl, &tol))
        }
        Command::ExportSvg { framework, output } => {
            let (fw, s) = load_framework(framework, &tol)?;
            let svg = match s {
                Some(s) => {
                    let dl = differential_lifting_2d(&fw, &s, &tol)?;
                    export_svg(dl.complex(), Some(&dl))
                }
                None => export_svg(&build_chamber_complex(&fw, &tol)?, None),
            };
            write_or_return(output.as_deref(), svg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, code)) => {
            print!("{out}");
            if cli.format == Format::Json && !out.is_empty() && !out.ends_with('\n') {
                println!();
            }
            ExitCode::from(code)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
