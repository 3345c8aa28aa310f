//! Run archives: per-generation CSV, per-generation stats, resumable
//! snapshots and the final-front JSON document.
//!
//! Every file starts with a provenance comment line carrying the config hash
//! and seed. CSV values use 17 significant digits so archived runs replay
//! bit-exactly. Wall-clock timing lives in a separate log so the final-front
//! JSON stays byte-reproducible across interrupted and uninterrupted runs.

use crate::config::AppConfig;
use crate::constants::ManipulatorConstants;
use crate::force::TrajectorySpec;
use crate::moea::{GenStats, Individual, OptState, ParetoArchive, RunConfig};
use crate::problem::Bounds;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const GENERATIONS_CSV: &str = "generations.csv";
pub const STATS_CSV: &str = "stats.csv";
pub const STATE_JSON: &str = "state.json";
pub const FINAL_FRONT_JSON: &str = "final_front.json";
pub const RUN_LOG: &str = "run_log.txt";

/// Resumable snapshot: optimizer state plus everything needed to rebuild the
/// problem identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub config_hash: String,
    pub run: RunConfig,
    pub constants: ManipulatorConstants,
    pub bounds: Bounds,
    pub trajectory: TrajectorySpec,
    pub state: OptState,
    pub stats: Vec<GenStats>,
}

/// The final-front document written at the end of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalFrontDoc {
    pub config_hash: String,
    pub seed: u64,
    pub run: RunConfig,
    pub constants: ManipulatorConstants,
    pub bounds: Bounds,
    pub trajectory: TrajectorySpec,
    pub front: Vec<Individual>,
}

pub struct ArchiveWriter {
    dir: PathBuf,
    config_hash: String,
    seed: u64,
}

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

impl ArchiveWriter {
    pub fn create(dir: &Path, cfg: &AppConfig) -> Result<ArchiveWriter, ArchiveError> {
        fs::create_dir_all(dir)?;
        let w = ArchiveWriter {
            dir: dir.to_path_buf(),
            config_hash: cfg.hash(),
            seed: cfg.run.seed,
        };
        w.write_header(GENERATIONS_CSV, GENERATION_COLUMNS)?;
        w.write_header(STATS_CSV, STATS_COLUMNS)?;
        Ok(w)
    }

    /// Reopen an archive directory for resuming: truncates both CSVs to rows
    /// at or before the snapshot generation, dropping any partially written
    /// generation.
    pub fn reopen(dir: &Path, snapshot: &Snapshot) -> Result<ArchiveWriter, ArchiveError> {
        let w = ArchiveWriter {
            dir: dir.to_path_buf(),
            config_hash: snapshot.config_hash.clone(),
            seed: snapshot.run.seed,
        };
        for name in [GENERATIONS_CSV, STATS_CSV] {
            let path = w.dir.join(name);
            if path.exists() {
                let text = fs::read_to_string(&path)?;
                let kept: Vec<&str> = text
                    .lines()
                    .filter(|l| {
                        if l.starts_with('#') || !l.chars().next().is_some_and(|c| c.is_ascii_digit())
                        {
                            return true;
                        }
                        l.split(',')
                            .next()
                            .and_then(|g| g.parse::<usize>().ok())
                            .is_some_and(|g| g <= snapshot.state.generation)
                    })
                    .collect();
                fs::write(&path, kept.join("\n") + "\n")?;
            }
        }
        Ok(w)
    }

    fn write_header(&self, name: &str, columns: &str) -> Result<(), ArchiveError> {
        let path = self.dir.join(name);
        let mut f = fs::File::create(path)?;
        writeln!(f, "# config_hash={} seed={}", self.config_hash, self.seed)?;
        writeln!(f, "{columns}")?;
        Ok(())
    }

    fn append(&self, name: &str, text: &str) -> Result<(), ArchiveError> {
        let mut f = fs::OpenOptions::new().append(true).open(self.dir.join(name))?;
        f.write_all(text.as_bytes())?;
        f.flush()?;
        Ok(())
    }

    /// Append one generation's population rows and stats row, then overwrite
    /// the snapshot. Called once per generation so an interruption loses at
    /// most one generation.
    pub fn record_generation(
        &self,
        snapshot: &Snapshot,
        stats: &GenStats,
    ) -> Result<(), ArchiveError> {
        let mut rows = String::new();
        for (id, ind) in snapshot.state.population.iter().enumerate() {
            rows.push_str(&generation_row(snapshot.state.generation, id, ind));
        }
        self.append(GENERATIONS_CSV, &rows)?;
        self.append(STATS_CSV, &stats_row(stats))?;
        let tmp = self.dir.join(format!("{STATE_JSON}.tmp"));
        fs::write(&tmp, serde_json::to_string(snapshot)?)?;
        fs::rename(&tmp, self.dir.join(STATE_JSON))?;
        Ok(())
    }

    pub fn write_final_front(&self, doc: &FinalFrontDoc) -> Result<(), ArchiveError> {
        let json = serde_json::to_string_pretty(doc)?;
        fs::write(self.dir.join(FINAL_FRONT_JSON), json)?;
        Ok(())
    }

    pub fn log(&self, line: &str) -> Result<(), ArchiveError> {
        let mut f = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.dir.join(RUN_LOG))?;
        writeln!(f, "{line}")?;
        Ok(())
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

pub const GENERATION_COLUMNS: &str =
    "gen,id,mA,mB,LA,LB,k,Hb,T1,T2,T3,f1,f2,f3,cv,rank,crowding";
pub const STATS_COLUMNS: &str =
    "gen,feasible_fraction,best_f1,best_f2,best_f3,median_cv,hypervolume";

fn generation_row(gen: usize, id: usize, ind: &Individual) -> String {
    let v = ind.x.as_array();
    let mut row = format!("{gen},{id}");
    for x in v {
        row.push(',');
        row.push_str(&fmt(x));
    }
    for f in ind.eval.f {
        row.push(',');
        row.push_str(&fmt(f));
    }
    row.push(',');
    row.push_str(&fmt(ind.eval.cv));
    row.push_str(&format!(",{},{}\n", ind.rank, fmt(ind.crowding)));
    row
}

fn stats_row(s: &GenStats) -> String {
    format!(
        "{},{},{},{},{},{},{}\n",
        s.generation,
        fmt(s.feasible_fraction),
        fmt(s.best_f[0]),
        fmt(s.best_f[1]),
        fmt(s.best_f[2]),
        fmt(s.median_cv),
        fmt(s.hypervolume)
    )
}

pub fn load_snapshot(path: &Path) -> Result<Snapshot, ArchiveError> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn load_final_front(path: &Path) -> Result<FinalFrontDoc, ArchiveError> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Assemble the final document from a finished run.
pub fn final_front_doc(cfg: &AppConfig, archive: &ParetoArchive) -> FinalFrontDoc {
    FinalFrontDoc {
        config_hash: cfg.hash(),
        seed: cfg.run.seed,
        run: archive.config,
        constants: cfg.constants,
        bounds: cfg.bounds,
        trajectory: cfg.trajectory,
        front: archive.front.clone(),
    }
}

#[derive(Debug, Error)]
pub enum ArchiveError {
    #[error("archive I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("archive serialization error: {0}")]
    Json(#[from] serde_json::Error),
}
