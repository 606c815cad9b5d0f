//! Command-line front end: reproducible experiment pipelines with JSON
//! I/O. Exit codes: 0 success, 2 validation, 3 solver failure, 4
//! inconclusive algebra.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use dehnkit::error::Error;
use dehnkit::fatpoly::{self, FatnessParams, FatnessReport};
use dehnkit::h3::Isometry;
use dehnkit::lattice::{enumerate_congruence_classes, DenominatorTuple, Slope, SlopeTuple};
use dehnkit::normal_form::{self, AmalgamWord, NormalFormStatus, NumericOracle};
use dehnkit::presentation::{
    dehn_extension, dehn_filling, extended_filling, figure_eight, DehnExtension,
    MarkedPresentation, Word,
};
use dehnkit::repvar::{self, Representation, WordVerdict};
use dehnkit::solver::{self, HolonomyState, SolverOptions};

#[derive(Parser)]
#[command(
    name = "dehnkit",
    version,
    about = "Dehn fillings and Dehn extensions of one-cusped hyperbolic groups"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Serialize)]
struct Common {
    /// marked presentation JSON; the bundled group when omitted
    #[arg(long)]
    group: Option<PathBuf>,
    /// seed matrices for the complete-structure solve (JSON list of 2x2
    /// row-major complex entries); the bundled seed when omitted
    #[arg(long)]
    seed_file: Option<PathBuf>,
    /// output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// RNG seed recorded in the config hash
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Newton acceptance residual
    #[arg(long = "tol-newton", default_value_t = solver::NEWTON_TOL)]
    tol_newton: f64,
    /// triviality tolerance for word kills
    #[arg(long = "tol-trivial", default_value_t = repvar::TRIVIAL_TOL)]
    tol_trivial: f64,
    /// nontriviality floor for word kills
    #[arg(long = "tol-nontrivial-floor", default_value_t = repvar::NONTRIVIAL_FLOOR)]
    tol_nontrivial_floor: f64,
}

#[derive(Subcommand, Clone, Serialize)]
enum Cmd {
    /// Construct the Dehn extension and list its congruence classes
    Extend {
        #[command(flatten)]
        common: Common,
        /// extension slope "p,q"
        #[arg(long)]
        slope: String,
        /// root order m
        #[arg(long)]
        denominator: i64,
    },
    /// Solve the complete structure and one Dehn filling
    Fill {
        #[command(flatten)]
        common: Common,
        /// filling slope "p,q"
        #[arg(long)]
        slope: String,
    },
    /// Solve the filling sequence base + k m direction, k = 1..count
    Sequence {
        #[command(flatten)]
        common: Common,
        /// sequence base slope "p,q"
        #[arg(long)]
        slope: String,
        /// congruence denominator m (step scale)
        #[arg(long)]
        denominator: i64,
        /// sequence direction "a,b"
        #[arg(long)]
        direction: String,
        #[arg(long)]
        count: i64,
    },
    /// Classify word stability across a congruent filling sequence
    Stability {
        #[command(flatten)]
        common: Common,
        /// extension slope "p,q"
        #[arg(long)]
        slope: String,
        #[arg(long)]
        denominator: i64,
        /// sequence base slope "p,q" (congruent to the extension slope)
        #[arg(long)]
        base: String,
        #[arg(long)]
        direction: String,
        #[arg(long)]
        count: i64,
        /// JSON file: array of extension words (arrays of signed indices)
        #[arg(long)]
        words: PathBuf,
    },
    /// Reduce amalgam words to cyclically reduced normal form
    Reduce {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        slope: String,
        #[arg(long)]
        denominator: i64,
        /// JSON file: array of amalgam words (tagged factor lists)
        #[arg(long)]
        words: PathBuf,
    },
    /// Lift killed words to polygons and compute fatness reports
    Polygons {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        slope: String,
        #[arg(long)]
        denominator: i64,
        #[arg(long)]
        base: String,
        #[arg(long)]
        direction: String,
        #[arg(long)]
        count: i64,
        /// JSON file: array of amalgam words (tagged factor lists)
        #[arg(long)]
        words: PathBuf,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        theta: f64,
        #[arg(long, default_value_t = 2.0 * dehnkit::h3::delta())]
        l: f64,
    },
    /// Run the bundled end-to-end experiment and write a summary
    Report {
        #[command(flatten)]
        common: Common,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.cmd) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoConvergence(_) | Error::ExceptionalSlope(..) => 3,
        Error::Inconclusive(_) => 4,
        _ => 2,
    }
}

fn parse_pair(s: &str) -> Result<(i64, i64), Error> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Validation(format!("expected \"p,q\", got {s:?}")));
    }
    let p = parts[0].trim().parse().map_err(|_| {
        Error::Validation(format!("bad integer {:?}", parts[0]))
    })?;
    let q = parts[1].trim().parse().map_err(|_| {
        Error::Validation(format!("bad integer {:?}", parts[1]))
    })?;
    Ok((p, q))
}

fn load_group(common: &Common) -> Result<MarkedPresentation, Error> {
    let pres = match &common.group {
        None => figure_eight(),
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
    };
    pres.validate()?;
    Ok(pres)
}

fn load_seed(common: &Common, group: &MarkedPresentation) -> Result<Vec<Isometry>, Error> {
    match &common.seed_file {
        Some(path) => Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?),
        None => {
            if *group == figure_eight() {
                Ok(solver::figure_eight_seed())
            } else {
                Err(Error::Validation(
                    "a custom group needs --seed-file with complete-structure seed matrices".into(),
                ))
            }
        }
    }
}

fn config_hash(cmd: &Cmd) -> String {
    let s = serde_json::to_string(cmd).unwrap_or_default();
    let mut h = DefaultHasher::new();
    s.hash(&mut h);
    format!("{:016x}", h.finish())
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<PathBuf, Error> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value)?)?;
    Ok(path)
}

fn solver_options(common: &Common) -> SolverOptions {
    SolverOptions {
        tol: common.tol_newton,
        ..SolverOptions::default()
    }
}

fn load_extension_words(path: &Path) -> Result<Vec<Word>, Error> {
    let raw: Vec<Vec<i32>> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if raw.is_empty() {
        return Err(Error::Validation("no words".into()));
    }
    Ok(raw.into_iter().map(Word::new).collect())
}

fn load_amalgam_words(path: &Path) -> Result<Vec<AmalgamWord>, Error> {
    let raw: Vec<AmalgamWord> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if raw.is_empty() {
        return Err(Error::Validation("no words".into()));
    }
    Ok(raw)
}

/// Solve the congruent filling sequence and pair each state with its
/// extended-filling map.
fn solved_congruent_sequence(
    group: &MarkedPresentation,
    ext: &DehnExtension,
    base: (i64, i64),
    m: i64,
    direction: (i64, i64),
    count: i64,
    common: &Common,
) -> Result<Vec<(Slope, HolonomyState, dehnkit::presentation::PresentationMap)>, Error> {
    let opts = solver_options(common);
    let complete = solver::solve_complete(group, &load_seed(common, group)?, &opts)?;
    let entries = solver::filling_sequence(&complete, base, m, direction, count, &opts)?;
    let mut out = Vec::new();
    for e in entries {
        let Some(state) = e.state else {
            eprintln!(
                "sequence: slope ({}, {}) skipped: {}",
                e.slope.0,
                e.slope.1,
                e.failure.as_deref().unwrap_or("unknown")
            );
            continue;
        };
        let slope = Slope::new(e.slope.0, e.slope.1)?;
        let map = extended_filling(ext, &SlopeTuple::single(slope))?;
        out.push((slope, state, map));
    }
    if out.is_empty() {
        return Err(Error::NoConvergence(f64::INFINITY));
    }
    Ok(out)
}

fn run(cmd: Cmd) -> Result<(), Error> {
    let hash = config_hash(&cmd);
    match cmd {
        Cmd::Extend {
            common,
            slope,
            denominator,
        } => {
            let group = load_group(&common)?;
            let (p, q) = parse_pair(&slope)?;
            let z = SlopeTuple::single(Slope::new(p, q)?);
            let m = DenominatorTuple::single(denominator)?;
            let ext = dehn_extension(&group, &z, &m)?;
            let classes = enumerate_congruence_classes(&m, true);
            let class_count = classes.len();
            let out = json!({
                "config_hash": hash,
                "extension": &ext,
                "congruence_classes": classes,
                "class_count": class_count,
            });
            let path = write_json(&common.out, "extend.json", &out)?;
            println!(
                "extend: {} generators, {} relators, {} congruence classes -> {}",
                ext.presentation.generators.len(),
                ext.presentation.relators.len(),
                class_count,
                path.display()
            );
        }
        Cmd::Fill { common, slope } => {
            let group = load_group(&common)?;
            let opts = solver_options(&common);
            let complete = solver::solve_complete(&group, &load_seed(&common, &group)?, &opts)?;
            let (p, q) = parse_pair(&slope)?;
            let filled = solver::solve_filling(&complete, (p, q), &opts)?;
            let (filled_pres, _) = dehn_filling(&group, &SlopeTuple::single(Slope::new(p, q)?))?;
            let out = json!({
                "config_hash": hash,
                "complete": complete,
                "filled": filled,
                "filled_presentation": filled_pres,
            });
            let path = write_json(&common.out, "fill.json", &out)?;
            println!(
                "fill ({p}, {q}): u = {:.6} + {:.6}i, residual {:.3e} -> {}",
                filled.u.re,
                filled.u.im,
                filled.final_residual(),
                path.display()
            );
        }
        Cmd::Sequence {
            common,
            slope,
            denominator,
            direction,
            count,
        } => {
            let group = load_group(&common)?;
            let opts = solver_options(&common);
            let complete = solver::solve_complete(&group, &load_seed(&common, &group)?, &opts)?;
            let base = parse_pair(&slope)?;
            let dir = parse_pair(&direction)?;
            let entries =
                solver::filling_sequence(&complete, base, denominator, dir, count, &opts)?;
            for e in &entries {
                match (&e.state, &e.failure) {
                    (Some(s), _) => println!(
                        "k={}: ({}, {}) solved, |u| = {:.6}, dist-to-complete {:.6}",
                        e.k,
                        e.slope.0,
                        e.slope.1,
                        s.u.norm(),
                        e.distance_to_complete.unwrap_or(f64::NAN)
                    ),
                    (None, Some(msg)) => println!("k={}: ({}, {}) {}", e.k, e.slope.0, e.slope.1, msg),
                    _ => {}
                }
            }
            let out = json!({ "config_hash": hash, "entries": entries });
            let path = write_json(&common.out, "sequence.json", &out)?;
            println!("sequence -> {}", path.display());
        }
        Cmd::Stability {
            common,
            slope,
            denominator,
            base,
            direction,
            count,
            words,
        } => {
            let group = load_group(&common)?;
            let (p, q) = parse_pair(&slope)?;
            let ext = dehn_extension(
                &group,
                &SlopeTuple::single(Slope::new(p, q)?),
                &DenominatorTuple::single(denominator)?,
            )?;
            let word_list = load_extension_words(&words)?;
            let solved = solved_congruent_sequence(
                &group,
                &ext,
                parse_pair(&base)?,
                denominator,
                parse_pair(&direction)?,
                count,
                &common,
            )?;
            let reps: Vec<Representation> = solved
                .iter()
                .map(|(_, state, map)| repvar::extension_image(&state.representation, map))
                .collect::<Result<_, _>>()?;
            let verdict = repvar::classify_stability_with(
                &reps,
                &word_list,
                0..reps.len(),
                common.tol_trivial,
                common.tol_nontrivial_floor,
            )?;
            for (w, v) in word_list.iter().zip(&verdict.per_word) {
                println!("{:?}: {:?}", w.letters(), v);
            }
            let kernel = verdict.stable_kernel();
            println!(
                "stable kernel estimate: {} of {} words, margin {:.3e}",
                kernel.len(),
                word_list.len(),
                verdict.margin
            );
            let out = json!({ "config_hash": hash, "verdict": verdict, "stable_kernel": kernel });
            let path = write_json(&common.out, "stability.json", &out)?;
            println!("stability -> {}", path.display());
        }
        Cmd::Reduce {
            common,
            slope,
            denominator,
            words,
        } => {
            let group = load_group(&common)?;
            let (p, q) = parse_pair(&slope)?;
            let ext = dehn_extension(
                &group,
                &SlopeTuple::single(Slope::new(p, q)?),
                &DenominatorTuple::single(denominator)?,
            )?;
            let opts = solver_options(&common);
            let complete = solver::solve_complete(&group, &load_seed(&common, &group)?, &opts)?;
            let oracle = NumericOracle::new(&complete.representation, &group);
            let word_list = load_amalgam_words(&words)?;
            let mut results = Vec::new();
            let mut inconclusive = 0usize;
            for w in &word_list {
                let r = normal_form::reduce(w, &ext, &oracle)?;
                if r.status == NormalFormStatus::Inconclusive {
                    inconclusive += 1;
                }
                println!("s = {}, status {:?}", r.syllable_length, r.status);
                results.push(r);
            }
            let out = json!({ "config_hash": hash, "results": results });
            let path = write_json(&common.out, "reduce.json", &out)?;
            println!("reduce -> {}", path.display());
            if inconclusive > 0 {
                return Err(Error::Inconclusive(format!(
                    "{inconclusive} of {} words unresolved by the membership oracle",
                    word_list.len()
                )));
            }
        }
        Cmd::Polygons {
            common,
            slope,
            denominator,
            base,
            direction,
            count,
            words,
            theta,
            l,
        } => {
            let group = load_group(&common)?;
            let (p, q) = parse_pair(&slope)?;
            let ext = dehn_extension(
                &group,
                &SlopeTuple::single(Slope::new(p, q)?),
                &DenominatorTuple::single(denominator)?,
            )?;
            let word_list = load_amalgam_words(&words)?;
            let opts = solver_options(&common);
            let complete = solver::solve_complete(&group, &load_seed(&common, &group)?, &opts)?;
            let oracle = NumericOracle::new(&complete.representation, &group);
            let solved = solved_congruent_sequence(
                &group,
                &ext,
                parse_pair(&base)?,
                denominator,
                parse_pair(&direction)?,
                count,
                &common,
            )?;
            let params = FatnessParams { theta, l };
            let anchors = fatpoly::default_anchors(&ext);
            let mut reports: Vec<(String, FatnessReport)> = Vec::new();
            let mut skipped = 0usize;
            for (slope, state, map) in &solved {
                for (wi, w) in word_list.iter().enumerate() {
                    let (sp, sq) = slope.coefficients();
                    let tag = format!("slope ({sp}, {sq}) word {wi}");
                    let nf = normal_form::reduce(w, &ext, &oracle)?;
                    if nf.status == NormalFormStatus::Inconclusive || nf.syllable_length == 0 {
                        println!("{tag}: skipped (s = {}, {:?})", nf.syllable_length, nf.status);
                        skipped += 1;
                        continue;
                    }
                    let poly =
                        fatpoly::lift_polygon(&state.representation, &nf, &ext, map, &anchors)?;
                    if !poly.is_closed() {
                        println!("{tag}: skipped (open polygon, gap {:.3e})", poly.closure_gap);
                        skipped += 1;
                        continue;
                    }
                    let insc = fatpoly::inscribe(&poly)?;
                    let report = fatpoly::fatness_report(&poly, &insc, params)?;
                    println!(
                        "{tag}: min side {:.4}, min angle {:.4}, obstruction {:?}",
                        report.min_side,
                        report.min_angle,
                        std::mem::discriminant(&report.obstruction)
                    );
                    reports.push((tag, report));
                }
            }
            let csv: String = std::iter::once(FatnessReport::csv_header().to_string())
                .chain(reports.iter().map(|(_, r)| r.csv_row()))
                .collect::<Vec<_>>()
                .join("\n");
            std::fs::create_dir_all(&common.out)?;
            std::fs::write(common.out.join("polygons.csv"), csv)?;
            let out = json!({ "config_hash": hash, "reports": reports, "skipped": skipped });
            let path = write_json(&common.out, "polygons.json", &out)?;
            println!("polygons -> {} ({} reports, {} skipped)", path.display(), reports.len(), skipped);
        }
        Cmd::Report { common } => {
            let group = load_group(&common)?;
            let ext = dehn_extension(
                &group,
                &SlopeTuple::single(Slope::new(1, 0)?),
                &DenominatorTuple::single(2)?,
            )?;
            let opts = solver_options(&common);
            let complete = solver::solve_complete(&group, &load_seed(&common, &group)?, &opts)?;
            let entries = solver::filling_sequence(&complete, (1, 2), 2, (1, 0), 5, &opts)?;
            let t = ext.root_generators[0].expect("nontrivial extension") as i32;
            // bundled word set: root powers, lattice words, mixed
            let word_list: Vec<Word> = vec![
                Word::new(vec![t]),
                Word::new(vec![t, t]),
                Word::new(vec![1]),
                Word::new(vec![2]),
                Word::new(vec![t, 1, 2]),
                Word::new(vec![2, t, -2, t]),
            ];
            let mut reps = Vec::new();
            for e in &entries {
                if let Some(state) = &e.state {
                    let map = extended_filling(
                        &ext,
                        &SlopeTuple::single(Slope::new(e.slope.0, e.slope.1)?),
                    )?;
                    reps.push(repvar::extension_image(&state.representation, &map)?);
                }
            }
            let verdict = repvar::classify_stability_with(
                &reps,
                &word_list,
                0..reps.len(),
                common.tol_trivial,
                common.tol_nontrivial_floor,
            )?;
            let kernel = verdict.stable_kernel();
            let undetermined = verdict
                .per_word
                .iter()
                .any(|v| *v == WordVerdict::Undetermined);
            let word_count = verdict.per_word.len();
            let out = json!({
                "config_hash": hash,
                "group": group,
                "extension": ext,
                "sequence": entries,
                "stability": verdict,
                "stable_kernel": kernel.clone(),
            });
            let path = write_json(&common.out, "report.json", &out)?;
            println!(
                "report: {} sequence states, {} words, kernel estimate {} -> {}",
                reps.len(),
                word_count,
                kernel.len(),
                path.display()
            );
            if undetermined {
                return Err(Error::Inconclusive(
                    "undetermined stability verdicts in the bundled experiment".into(),
                ));
            }
        }
    }
    Ok(())
}
