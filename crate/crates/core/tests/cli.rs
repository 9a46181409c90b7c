//! The `gapspec` binary end to end: exit codes, file layout, caching and
//! byte-level reproducibility.

use std::path::{Path, PathBuf};
use std::process::Output;

use gapspec::operators::OperatorModel;
use gapspec::oracle::secular_roots;
use gapspec::pipeline::convergence_study;
use tempfile::TempDir;

const B1_HEADER: &str = "version = 1\n\n[model]\nkind = \"fourier-b1\"\n";

struct Run {
    dir: TempDir,
}

impl Run {
    fn new(config: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("run.toml"), config).unwrap();
        Self { dir }
    }

    fn out(&self) -> PathBuf {
        self.dir.path().join("out")
    }

    fn exec(&self, command: &str, extra: &[&str]) -> Output {
        std::process::Command::new(env!("CARGO_BIN_EXE_gapspec"))
            .arg(command)
            .arg("--config")
            .arg(self.dir.path().join("run.toml"))
            .arg("--out")
            .arg(self.out())
            .args(extra)
            .output()
            .unwrap()
    }

    fn read(&self, rel: &str) -> Vec<u8> {
        std::fs::read(self.out().join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
    }
}

fn files_under(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    if let Ok(entries) = std::fs::read_dir(dir) {
        for e in entries.flatten() {
            let p = e.path();
            if p.is_dir() {
                out.extend(files_under(&p));
            } else {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

fn csv_rows(bytes: &[u8]) -> Vec<Vec<String>> {
    let text = String::from_utf8(bytes.to_vec()).unwrap();
    assert!(!text.contains('\r'));
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn solve_writes_spectrum_enclosures_and_nearest() {
    let run = Run::new(&format!("{B1_HEADER}\n[solve]\nn = 10\ntargets = [\"lambda-minus\", 0.5]\n"));
    let out = run.exec("solve", &["--threads", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let spectrum = csv_rows(&run.read("spectrum.csv"));
    assert_eq!(spectrum[0], ["re", "im", "residual"]);
    assert_eq!(spectrum.len(), 1 + 2 * 21);
    let nearest = csv_rows(&run.read("nearest.csv"));
    assert_eq!(nearest[0], ["target", "re", "im", "err"]);
    let target: f64 = nearest[1][0].parse().unwrap();
    assert_eq!(target, secular_roots().unwrap().lambda_minus);
    assert_eq!(csv_rows(&run.read("enclosures.csv"))[0], ["lo", "hi", "witness_re", "witness_im"]);
    assert!(!files_under(&run.out()).is_empty());
    assert!(files_under(&run.out()).iter().all(|p| p.extension().unwrap() != "partial"));
}

#[test]
fn converge_round_trips_the_library_values() {
    let run = Run::new(&format!(
        "{B1_HEADER}\n[converge]\nstart = 8\nstop = 32\nstep = 8\nreference = \"lambda-plus\"\n"
    ));
    let out = run.exec("converge", &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&run.read("convergence.csv"));
    assert_eq!(rows[0], ["n", "err", "log_err", "log_n", "slope"]);
    let lib = convergence_study(&OperatorModel::FourierB1, secular_roots().unwrap().lambda_plus, &[8, 16, 24, 32]).unwrap();
    assert_eq!(rows.len(), 1 + lib.len());
    for (row, rec) in rows[1..].iter().zip(&lib) {
        assert_eq!(row[0].parse::<usize>().unwrap(), rec.n);
        assert_eq!(row[1].parse::<f64>().unwrap().to_bits(), rec.err.to_bits());
        assert_eq!(row[2].parse::<f64>().unwrap().to_bits(), rec.log_err.to_bits());
        match rec.slope {
            Some(s) => assert_eq!(row[4].parse::<f64>().unwrap().to_bits(), s.to_bits()),
            None => assert_eq!(row[4], ""),
        }
    }
    // the secular oracle was cached next to the outputs
    let cached = files_under(&run.out().join("oracle-cache"));
    assert_eq!(cached.len(), 1);
}

#[test]
fn oracle_output_is_byte_identical_to_its_cache_entry() {
    let run = Run::new(&format!("{B1_HEADER}\n[oracle]\nkind = \"secular\"\n"));
    assert!(run.exec("oracle", &[]).status.success());
    let first = run.read("oracle.json");
    let cached = files_under(&run.out().join("oracle-cache"));
    assert_eq!(cached.len(), 1);
    assert_eq!(std::fs::read(&cached[0]).unwrap(), first);
    assert!(run.exec("oracle", &[]).status.success());
    assert_eq!(run.read("oracle.json"), first);
    let doc: serde_json::Value = serde_json::from_slice(&first).unwrap();
    let lm = doc.pointer("/secular/lambda_minus").unwrap().as_f64().unwrap();
    assert_eq!(lm, secular_roots().unwrap().lambda_minus);
    assert!(first.ends_with(b"\n"));
}

#[test]
fn pseudospec_grid_and_membership() {
    let run = Run::new(&format!(
        "{B1_HEADER}\n[pseudospec]\nn = 6\nre_min = -4.0\nre_max = 4.0\nim_min = -1.0\nim_max = 1.0\nnx = 8\nny = 4\neps = 0.1\nweights = [1.0, 1.0, 1.0]\n"
    ));
    let out = run.exec("pseudospec", &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&run.read("pseudospec.csv"));
    assert_eq!(rows[0], ["i", "j", "re", "im", "sigma", "member"]);
    assert_eq!(rows.len(), 1 + 32);
    // cell centres
    assert_eq!(rows[1][2].parse::<f64>().unwrap(), -3.5);
    assert_eq!(rows[1][3].parse::<f64>().unwrap(), -0.75);
    let meta: serde_json::Value = serde_json::from_slice(&run.read("pseudospec_meta.json")).unwrap();
    assert_eq!(meta["nx"], 8);
}

#[test]
fn perturb_seed_flag_overrides_config_and_is_reproducible() {
    let run = Run::new(&format!(
        "{B1_HEADER}\n[perturb]\nn = 12\nreference = \"lambda-minus\"\ndelta = 0.05\nw0 = 1.0\nw1 = 1.0\ntrials = 4\nseed = 3\n"
    ));
    assert!(run.exec("perturb", &["--seed", "11"]).status.success());
    let a = run.read("perturbation.json");
    let doc: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(doc["seed"], 11);
    assert_eq!(doc["trials"], 4);
    assert_eq!(doc["asymptotic_guarantee_only"], true);
    assert!(run.exec("perturb", &["--seed", "11", "--threads", "3"]).status.success());
    assert_eq!(run.read("perturbation.json"), a);
}

#[test]
fn configuration_errors_exit_with_2_and_write_nothing() {
    let cases = [
        format!("{B1_HEADER}colour = 1\n[solve]\nn = 4\n"),
        "version = 2\n\n[model]\nkind = \"fourier-b1\"\n[solve]\nn = 4\n".to_string(),
        format!("{B1_HEADER}\n[solve]\nn = 4\ntargets = [\"fd-0\"]\n"),
        format!("{B1_HEADER}\n[solve]\nn = 4\ntargets = [\"lambda-middle\"]\n"),
        format!("{B1_HEADER}\n[converge]\nstart = 8\nstop = 4\nstep = 1\nreference = 0.0\n"),
        "version = 1\n\n[model]\nkind = \"shift-fixture\"\n[solve]\nn = 0\n".to_string(),
        format!("{B1_HEADER}\n[pseudospec]\nn = 4\nre_min = 1.0\nre_max = -1.0\nim_min = 0.0\nim_max = 1.0\nnx = 4\nny = 4\n"),
        format!("{B1_HEADER}\n[perturb]\nn = 12\nreference = \"lambda-minus\"\ndelta = 0.2\nw0 = 1.0\nw1 = 1.0\ntrials = 4\n"),
    ];
    let command = ["solve", "solve", "solve", "solve", "converge", "solve", "pseudospec", "perturb"];
    for (cfg, cmd) in cases.iter().zip(command) {
        let run = Run::new(cfg);
        let out = run.exec(cmd, &[]);
        assert_eq!(out.status.code(), Some(2), "{cfg}\n{}", String::from_utf8_lossy(&out.stderr));
        assert!(files_under(&run.out()).is_empty(), "{cfg}");
    }
    let run = Run::new(B1_HEADER);
    assert_eq!(run.exec("solve", &[]).status.code(), Some(2), "missing section");
    assert_eq!(run.exec("solve", &["--threads", "0"]).status.code(), Some(2));
    let missing = std::process::Command::new(env!("CARGO_BIN_EXE_gapspec"))
        .args(["solve", "--config", "/nonexistent/run.toml", "--out", "/tmp/never"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
    let usage = std::process::Command::new(env!("CARGO_BIN_EXE_gapspec")).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_3_and_write_nothing() {
    // a window far too narrow for the well: the finite-difference gate fails
    let run = Run::new(
        "version = 1\n\n[model]\nkind = \"schrodinger-hermite\"\n\n[model.potential]\nkind = \"well-plus-periodic\"\ndepth = 8.0\nwidth = 1.0\namplitude = 1.0\nfrequency = 1.0\n\n[solve]\nn = 6\ntargets = [\"fd-0\"]\n\n[oracle]\nkind = \"finite-difference\"\nhalf_width = 1.0\ngrid_points = 100\ncount = 1\n",
    );
    let out = run.exec("solve", &[]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(files_under(&run.out()).is_empty());
}
