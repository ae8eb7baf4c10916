use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use omcs::arrangements::{named_instance, om_from_vectors, InstanceStructure, RationalMatrix};
use omcs::axioms::{classify_system, rank, OrientedStructure};
use omcs::compression::{build_scheme, export_scheme, import_scheme, verify_scheme};
use omcs::extensions::{com_corner_peeling, covectors_from_topes, find_corner};
use omcs::program::{cocircuit_digraph, polyhedron, solve_program, AffineOM};
use omcs::reconstruct::BuildSession;
use omcs::sign::{parse_system, serialize_system};
use omcs::tope_graph::{vc_dimension, TopeGraph, DEFAULT_MAX_UNIVERSE};
use omcs::{Error, GroundSet, Sign, SignSystem, SignVector};

#[derive(Parser)]
#[command(
    name = "omcs",
    version,
    about = "Oriented matroids, tope graphs and sample compression schemes"
)]
struct Cli {
    /// Largest ground set accepted by exponential enumerations.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_UNIVERSE)]
    max_universe: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Axiom report and verdict (OM, COM_NOT_OM, NEITHER).
    Classify { input: PathBuf },
    /// Topes of the system.
    Topes { input: PathBuf },
    /// Cocircuits (minimal nonzero vectors).
    Cocircuits { input: PathBuf },
    /// Rank of an OM.
    Rank { input: PathBuf },
    /// VC-dimension of the tope set and a largest shattered set.
    Vc { input: PathBuf },
    /// Optimal cocircuit of the program on the affine OM (input, g) in direction f.
    ProgramSolve {
        input: PathBuf,
        #[arg(long)]
        g: String,
        #[arg(long)]
        f: String,
        /// Constraints as `e=+,h=-` (element names or 1-based ids).
        #[arg(long, default_value = "")]
        constraints: String,
    },
    /// A corner of an OM from the first general-position lexicographic extension.
    Corner { input: PathBuf },
    /// Corner peeling of an OM or COM, or NO_PEELING.
    Peel { input: PathBuf },
    /// Builds a proper unlabeled compression scheme for the class.
    SchemeBuild {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks a scheme document against a class; exits 0 iff it passes.
    SchemeVerify {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long)]
        size: usize,
    },
    /// Writes a named instance (paper4, cycle(n), cube(n), unif(3,n), tri, path(k)).
    Gen {
        key: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write only the topes.
        #[arg(long)]
        topes: bool,
        /// For affine instances, write the underlying OM instead of the halfspace.
        #[arg(long)]
        base: bool,
    },
}

enum Failure {
    Usage(String),
    Core(Error),
    /// A legitimate negative answer, printed on stdout.
    Negative(String),
    Rejected(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = std::result::Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Negative(msg)) => {
            println!("{msg}");
            ExitCode::from(4)
        }
        Err(Failure::Rejected(report)) => {
            print!("{report}");
            ExitCode::from(3)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::EmptySystem => 2,
        Error::UnknownKey(_) | Error::InvalidArgument(_) | Error::ElementNotFound(_) => 1,
        Error::NoPeelingFound | Error::EmptyPolyhedron | Error::Unbounded { .. } | Error::NoOptimum => 4,
        _ => 3,
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Reads an `.sv` document, or a rational matrix when the extension is `.mat`.
fn load(path: &Path, cap: usize) -> std::result::Result<SignSystem, Failure> {
    let text = read(path)?;
    let system = if path.extension().is_some_and(|e| e == "mat") {
        om_from_vectors(&RationalMatrix::parse(&text)?)?.system().clone()
    } else {
        let (system, warnings) = parse_system(&text)?;
        for w in warnings {
            eprintln!("warning: line {}: {}", w.line, w.message);
        }
        system
    };
    if system.ground_len() > cap {
        return Err(Error::UniverseTooLarge {
            size: system.ground_len(),
            cap,
        }
        .into());
    }
    Ok(system)
}

/// Covectors of the input: the system itself, or those recovered when only topes are given.
fn covectors(system: SignSystem) -> Result<SignSystem, Failure> {
    if system.vectors().iter().all(SignVector::is_tope) {
        Ok(covectors_from_topes(&system)?)
    } else {
        Ok(system)
    }
}

fn element(ground: &GroundSet, key: &str) -> std::result::Result<usize, Failure> {
    ground
        .lookup(key.trim())
        .ok_or_else(|| Failure::Usage(format!("unknown element {key:?}")))
}

fn lines(vectors: &[SignVector], ground: &GroundSet) -> String {
    let system = SignSystem::new(ground.clone(), vectors.iter().copied()).expect("vectors share the ground set");
    serialize_system(&system)
}

fn write_out(out: &Option<PathBuf>, text: String) -> Outcome {
    match out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn run(cli: &Cli) -> Outcome {
    let cap = cli.max_universe;
    match &cli.command {
        Command::Classify { input } => {
            let system = load(input, cap)?;
            let c = classify_system(&system)?;
            Ok(format!(
                "verdict: {}\ncomposition: {}\nstrong_elimination: {}\nsymmetry: {}\nface_symmetry: {}\nsimple: {}\nelements: {}\nvectors: {}\n",
                c.verdict,
                c.composition,
                c.strong_elimination,
                c.symmetry,
                c.face_symmetry,
                c.is_simple,
                system.ground_len(),
                system.len()
            ))
        }
        Command::Topes { input } => {
            let system = load(input, cap)?;
            Ok(lines(&system.topes(), system.ground()))
        }
        Command::Cocircuits { input } => {
            let system = covectors(load(input, cap)?)?;
            let s = OrientedStructure::new(system)?;
            Ok(lines(s.cocircuits(), s.system().ground()))
        }
        Command::Rank { input } => {
            let system = covectors(load(input, cap)?)?;
            let om = OrientedStructure::om(system)?;
            Ok(format!("{}\n", rank(om.system())?))
        }
        Command::Vc { input } => {
            let system = load(input, cap)?;
            let graph = TopeGraph::new(&system.topes())?;
            let record = vc_dimension(&graph);
            let witness = record.shattered.last().copied().unwrap_or_default();
            Ok(format!("{}\nshattered: {}\n", record.vc, witness.display_one_based()))
        }
        Command::ProgramSolve {
            input,
            g,
            f,
            constraints,
        } => {
            let system = covectors(load(input, cap)?)?;
            let ground = system.ground().clone();
            let g = element(&ground, g)?;
            let f = element(&ground, f)?;
            let mut s = SignVector::zero(ground.len());
            for part in constraints.split(',').filter(|p| !p.trim().is_empty()) {
                let (key, sign) = part
                    .split_once('=')
                    .ok_or_else(|| Failure::Usage(format!("constraint {part:?} is not of the form e=+")))?;
                let sign = match sign.trim() {
                    "+" => Sign::Plus,
                    "-" => Sign::Minus,
                    other => return Err(Failure::Usage(format!("constraint sign {other:?} must be + or -"))),
                };
                s.set(element(&ground, key)?, sign);
            }
            let affine = AffineOM::new(OrientedStructure::om(system)?, g)?;
            let digraph = cocircuit_digraph(&affine, f)?;
            let p = polyhedron(&affine, &s)?;
            match solve_program(&digraph, &p) {
                Ok(sol) => Ok(format!(
                    "solution: {}\nsources: {}\npolyhedron: {}\n",
                    sol.solution,
                    sol.sources.len(),
                    p.members().len()
                )),
                Err(Error::EmptyPolyhedron) => Err(Failure::Negative("EMPTY".into())),
                Err(Error::Unbounded { node, infinity }) => {
                    Err(Failure::Negative(format!("UNBOUNDED at {node} towards {infinity}")))
                }
                Err(Error::NoOptimum) => Err(Failure::Negative("NO_OPTIMUM".into())),
                Err(e) => Err(e.into()),
            }
        }
        Command::Corner { input } => {
            let om = OrientedStructure::om(covectors(load(input, cap)?)?)?;
            let corner = find_corner(&om)?;
            let mut out = format!(
                "new_element: {}\nside: {}\nsize: {}\n",
                corner.new_element + 1,
                corner.side.to_char(),
                corner.len()
            );
            out.push_str("topes:\n");
            for t in &corner.topes {
                out.push_str(&format!("{t}\n"));
            }
            Ok(out)
        }
        Command::Peel { input } => {
            let system = covectors(load(input, cap)?)?;
            match com_corner_peeling(&system) {
                Ok(steps) => {
                    let mut out = format!("steps: {}\n", steps.len());
                    for (i, step) in steps.iter().enumerate() {
                        let removed: Vec<String> = step.removed.iter().map(|t| t.to_token()).collect();
                        out.push_str(&format!(
                            "step {}: cell={} removed={}\n",
                            i + 1,
                            step.cell_base,
                            removed.join(",")
                        ));
                    }
                    Ok(out)
                }
                Err(Error::NoPeelingFound) => Err(Failure::Negative("NO_PEELING".into())),
                Err(e) => Err(e.into()),
            }
        }
        Command::SchemeBuild { class, out } => {
            let system = covectors(load(class, cap)?)?;
            let mut session = BuildSession::new(cap);
            let c = classify_system(&system)?;
            let map = if c.is_om() {
                session.om_map(&OrientedStructure::om(system.clone())?)?
            } else {
                session.com_map(&system)?
            };
            let scheme = build_scheme(&map, system.ground().clone())?;
            write_out(out, export_scheme(&scheme))
        }
        Command::SchemeVerify { class, scheme, size } => {
            let system = load(class, cap)?;
            let scheme = import_scheme(&read(scheme)?)?;
            let report = verify_scheme(&system.topes(), &scheme, *size);
            let mut out = format!(
                "samples: {}\nbeta_entries: {}\nmax_image: {}\n",
                report.samples, report.beta_entries, report.max_image
            );
            for v in &report.violations {
                out.push_str(&format!("violation: {v}\n"));
            }
            if report.passed() {
                out.push_str("PASS\n");
                Ok(out)
            } else {
                out.push_str("FAIL\n");
                Err(Failure::Rejected(out))
            }
        }
        Command::Gen { key, out, topes, base } => {
            let inst = named_instance(key)?;
            let system = match (&inst.structure, base) {
                (InstanceStructure::Affine(a), true) => a.base().system().clone(),
                _ => inst.system(),
            };
            let text = if *topes {
                lines(&system.topes(), system.ground())
            } else {
                serialize_system(&system)
            };
            write_out(out, format!("# {}\n{text}", inst.notes))
        }
    }
}
