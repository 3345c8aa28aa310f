//! Command implementations behind the `teachopt` binary.
//!
//! Exit-code contract: 0 success, 2 configuration error, 3 domain failure
//! (unreachable trajectory, singular configuration, insufficient front).

use crate::archive::{
    final_front_doc, load_final_front, load_snapshot, ArchiveWriter, FinalFrontDoc, Snapshot,
    FINAL_FRONT_JSON, STATE_JSON,
};
use crate::balance::DesignVector;
use crate::config::AppConfig;
use crate::innovization::{build_report, Provenance, RuleReport};
use crate::moea::{self, GenStats, OptState};
use crate::problem::Problem;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Domain(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) | CliError::Io(_) => 3,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn domain_err(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

/// CLI overrides applied on top of the config file.
#[derive(Debug, Default, Clone, Copy)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub pop: Option<usize>,
    pub gens: Option<usize>,
}

pub fn load_config(path: Option<&Path>, ov: &Overrides, quiet: bool) -> Result<AppConfig, CliError> {
    let mut cfg = match path {
        Some(p) => AppConfig::load(p).map_err(config_err)?,
        None => AppConfig::default(),
    };
    if let Some(seed) = ov.seed {
        cfg.run.seed = seed;
    }
    if let Some(pop) = ov.pop {
        cfg.run.pop_size = pop;
    }
    if let Some(gens) = ov.gens {
        cfg.run.generations = gens;
    }
    cfg.run.validate().map_err(config_err)?;
    if !quiet {
        for w in cfg.gap_warnings() {
            eprintln!("{w}");
        }
    }
    Ok(cfg)
}

/// Parse a design file: one `name = value` line per variable, `#` comments.
pub fn parse_design(text: &str) -> Result<DesignVector, CliError> {
    let mut values = [f64::NAN; 9];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("design line {}: `{raw}`", lineno + 1)))?;
        let idx = DesignVector::NAMES
            .iter()
            .position(|n| *n == key.trim())
            .ok_or_else(|| CliError::Config(format!("unknown design variable `{}`", key.trim())))?;
        values[idx] = value
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("bad value for {}: `{}`", key.trim(), value.trim())))?;
    }
    if let Some(i) = values.iter().position(|v| v.is_nan()) {
        return Err(CliError::Config(format!(
            "design file missing variable {}",
            DesignVector::NAMES[i]
        )));
    }
    Ok(DesignVector::from_array(values))
}

/// `teachopt evaluate`: score one design and print the objectives and
/// constraint residuals.
pub fn cmd_evaluate(
    cfg: &AppConfig,
    design: &DesignVector,
    profile_csv: Option<&Path>,
) -> Result<String, CliError> {
    let problem = Problem::new(cfg.constants, cfg.bounds, cfg.trajectory).map_err(domain_err)?;
    let eval = problem.evaluate(design);
    if let Some(failure) = &eval.failure {
        return Err(CliError::Domain(failure.clone()));
    }
    let mut out = String::new();
    writeln!(out, "design:").unwrap();
    for (name, v) in DesignVector::NAMES.iter().zip(design.as_array()) {
        writeln!(out, "  {name:<3} = {v}").unwrap();
    }
    writeln!(out, "objectives:").unwrap();
    writeln!(out, "  f1 (total mass)   = {:.6} kg", eval.f[0]).unwrap();
    writeln!(out, "  f2 (max force)    = {:.6} N", eval.f[1]).unwrap();
    writeln!(out, "  f3 (force spread) = {:.6} N", eval.f[2]).unwrap();
    writeln!(out, "constraints (residual N*m):").unwrap();
    writeln!(out, "  joint5 = {:.6}", eval.g[0]).unwrap();
    writeln!(out, "  joint3 = {:.6}", eval.g[1]).unwrap();
    writeln!(out, "  joint2 = {:.6}", eval.g[2]).unwrap();
    writeln!(out, "feasible: {}", eval.feasible).unwrap();
    if let Some(path) = profile_csv {
        let profile = problem.table().profile(design);
        std::fs::write(path, profile.to_csv())?;
        writeln!(out, "profile written to {}", path.display()).unwrap();
    }
    Ok(out)
}

/// `teachopt check-trajectory`: sweep the trajectory and report
/// reachability, conditioning and IK residuals.
pub fn cmd_check_trajectory(cfg: &AppConfig) -> Result<String, CliError> {
    let kin = cfg.constants.kinematics();
    let table = crate::force::TrajectoryTable::build(&kin, &cfg.trajectory).map_err(domain_err)?;
    let rotation =
        crate::force::resolve_trajectory_rotation(&cfg.trajectory.euler).map_err(domain_err)?;
    let mut min_rcond = f64::INFINITY;
    let mut worst_residual: f64 = 0.0;
    for s in &table.samples {
        min_rcond = min_rcond.min(s.rcond);
        let target = crate::force::trajectory_point(s.t, &rotation);
        let reached = kin.forward(&s.q);
        let pos_err = (reached.position - target.position).norm();
        let ang_err = (target.rotation * reached.rotation.inverse()).angle();
        worst_residual = worst_residual.max(pos_err.max(ang_err));
    }
    let mut out = String::new();
    writeln!(out, "samples evaluated: {}", table.samples.len()).unwrap();
    writeln!(out, "all samples reachable").unwrap();
    writeln!(out, "min rcond(J^T): {min_rcond:.3e}").unwrap();
    writeln!(out, "worst IK residual: {worst_residual:.3e}").unwrap();
    Ok(out)
}

fn progress_line(stats: &GenStats) -> String {
    format!(
        "gen {:>5}  feasible {:>5.1}%  best f = ({:.3}, {:.3}, {:.3})  hv {:.4e}",
        stats.generation,
        stats.feasible_fraction * 100.0,
        stats.best_f[0],
        stats.best_f[1],
        stats.best_f[2],
        stats.hypervolume
    )
}

/// `teachopt optimize`: full archived run, optionally resuming from a
/// snapshot directory.
pub fn cmd_optimize(
    cfg: &AppConfig,
    out_dir: &Path,
    resume: Option<&Path>,
    quiet: bool,
) -> Result<PathBuf, CliError> {
    let started = Instant::now();
    let problem = Problem::new(cfg.constants, cfg.bounds, cfg.trajectory).map_err(domain_err)?;
    let reference = problem.evaluate(&DesignVector::EXPERT).f;

    let (writer, mut state, mut stats) = match resume {
        Some(dir) => {
            let snap_path = if dir.is_dir() { dir.join(STATE_JSON) } else { dir.to_path_buf() };
            let snap = load_snapshot(&snap_path).map_err(config_err)?;
            if snap.config_hash != cfg.hash() {
                return Err(CliError::Config(format!(
                    "snapshot config hash {} does not match current config {}",
                    snap.config_hash,
                    cfg.hash()
                )));
            }
            let archive_dir = snap_path.parent().unwrap_or(Path::new(".")).to_path_buf();
            let writer = ArchiveWriter::reopen(&archive_dir, &snap).map_err(domain_err)?;
            (writer, snap.state, snap.stats)
        }
        None => {
            let writer = ArchiveWriter::create(out_dir, cfg).map_err(domain_err)?;
            let state = moea::init_state(&cfg.run, &problem).map_err(config_err)?;
            let stats = vec![moea::generation_stats(&state, &reference)];
            record(&writer, cfg, &state, &stats)?;
            if !quiet {
                println!("{}", progress_line(&stats[0]));
            }
            (writer, state, stats)
        }
    };

    while state.generation < cfg.run.generations {
        moea::step(&mut state, &cfg.run, &problem);
        let s = moea::generation_stats(&state, &reference);
        stats.push(s);
        record(&writer, cfg, &state, &stats)?;
        if !quiet && (state.generation % 100 == 0 || state.generation == cfg.run.generations) {
            println!("{}", progress_line(&s));
        }
    }

    let archive = moea::ParetoArchive {
        config: cfg.run,
        stats: stats.clone(),
        front: moea::final_front(&state.population),
    };
    let doc = final_front_doc(cfg, &archive);
    writer.write_final_front(&doc).map_err(domain_err)?;
    writer
        .log(&format!(
            "completed {} generations in {:.1} s ({} front members)",
            state.generation,
            started.elapsed().as_secs_f64(),
            doc.front.len()
        ))
        .map_err(domain_err)?;
    Ok(writer.dir().join(FINAL_FRONT_JSON))
}

fn record(
    writer: &ArchiveWriter,
    cfg: &AppConfig,
    state: &OptState,
    stats: &[GenStats],
) -> Result<(), CliError> {
    let snap = Snapshot {
        config_hash: cfg.hash(),
        run: cfg.run,
        constants: cfg.constants,
        bounds: cfg.bounds,
        trajectory: cfg.trajectory,
        state: state.clone(),
        stats: stats.to_vec(),
    };
    writer
        .record_generation(&snap, stats.last().expect("stats recorded per generation"))
        .map_err(domain_err)
}

/// `teachopt innovize`: mine a final-front archive for design rules.
pub fn cmd_innovize(archive_path: &Path, out_dir: &Path) -> Result<RuleReport, CliError> {
    let path = if archive_path.is_dir() {
        archive_path.join(FINAL_FRONT_JSON)
    } else {
        archive_path.to_path_buf()
    };
    let doc: FinalFrontDoc = load_final_front(&path).map_err(config_err)?;
    let provenance = Provenance {
        seed: doc.seed,
        generations: doc.run.generations,
        pop_size: doc.run.pop_size,
    };
    let report =
        build_report(&doc.front, &doc.bounds, Some(provenance)).map_err(domain_err)?;
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("report.txt"), report.to_text())?;
    std::fs::write(
        out_dir.join("report.json"),
        serde_json::to_string_pretty(&report).map_err(domain_err)?,
    )?;
    write_scatter_files(&doc, out_dir)?;
    Ok(report)
}

/// One CSV per studied pair for external plotting.
fn write_scatter_files(doc: &FinalFrontDoc, out_dir: &Path) -> Result<(), CliError> {
    let pairs: [(&str, &str); 8] = [
        ("f1", "f2"),
        ("f1", "f3"),
        ("f1", "mB"),
        ("f1", "LB"),
        ("f2", "T3"),
        ("f2", "T2"),
        ("f1", "kHb"),
        ("f3", "T1"),
    ];
    let col = |ind: &moea::Individual, name: &str| -> f64 {
        match name {
            "f1" => ind.eval.f[0],
            "f2" => ind.eval.f[1],
            "f3" => ind.eval.f[2],
            "mB" => ind.x.m_b,
            "LB" => ind.x.l_b,
            "T1" => ind.x.t1,
            "T2" => ind.x.t2,
            "T3" => ind.x.t3,
            "kHb" => ind.x.k * ind.x.h_b,
            _ => unreachable!(),
        }
    };
    for (xn, yn) in pairs {
        let mut text = format!("# config_hash={} seed={}\n{xn},{yn}\n", doc.config_hash, doc.seed);
        for ind in &doc.front {
            text.push_str(&format!("{:.17e},{:.17e}\n", col(ind, xn), col(ind, yn)));
        }
        std::fs::write(out_dir.join(format!("scatter_{yn}_vs_{xn}.csv")), text)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_design_round_trip() {
        let mut text = String::new();
        for (name, v) in DesignVector::NAMES.iter().zip(DesignVector::EXPERT.as_array()) {
            text.push_str(&format!("{name} = {v}\n"));
        }
        assert_eq!(parse_design(&text).unwrap(), DesignVector::EXPERT);
    }

    #[test]
    fn parse_design_rejects_missing_and_unknown() {
        assert!(matches!(parse_design("mA = 1\n"), Err(CliError::Config(_))));
        assert!(matches!(parse_design("bogus = 1\n"), Err(CliError::Config(_))));
        assert!(matches!(parse_design("mA - 1\n"), Err(CliError::Config(_))));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Domain("x".into()).exit_code(), 3);
    }
}
