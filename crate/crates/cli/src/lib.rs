//! Command-line workflows over `suzuki-core`: parameters, the basis of regular
//! differentials, the Cartier matrix and its rank profile, Ekedahl-Oort
//! constraints, point counts, and an end-to-end `verify`.

pub mod cache;
mod report;

use std::cell::OnceCell;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde_json::{json, Map, Value};

use suzuki_core::eo::{self, FinalTypeConstraints};
use suzuki_core::structured::{build_cartier_matrix, enumerate_basis, CartierPath};
use suzuki_core::{gf2n, params, Basis, BitMatrix, RankProfile, SuzukiParams};

pub use report::Report;

/// Largest `m` the matrix family accepts without `--allow-large-m`.
pub const MATRIX_M_LIMIT: u32 = 4;
/// Oracle comparison is skipped above this `m` unless forced.
pub const ORACLE_M_LIMIT: u32 = 2;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Params,
    ANumber,
    Basis,
    Matrix,
    RankProfile,
    EoConstraints,
    EoEnumerate,
    Points,
    Verify,
    All,
}

impl Command {
    fn needs_matrix(self) -> bool {
        !matches!(self, Command::Params | Command::Basis | Command::Points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Pretty,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "suzuki",
    version,
    about = "Cartier operator and a-number of the Suzuki curves S_m"
)]
pub struct Cli {
    /// What to compute.
    #[arg(value_enum)]
    pub command: Command,

    /// Curve index: q0 = 2^m, q = 2^(2m+1).
    #[arg(long)]
    pub m: u32,

    #[arg(long, value_enum, default_value_t = Format::Pretty)]
    pub format: Format,

    /// Directory for cached Cartier matrices.
    #[arg(long, env = "SUZUKI_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Cross-check the table-driven matrix against the definition-level one.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub verify_oracle: bool,

    /// Run the oracle cross-check even when m > 2.
    #[arg(long)]
    pub force_oracle: bool,

    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,

    /// Extension degrees for `points`.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1u32, 2, 4])]
    pub k: Vec<u32>,

    /// Maximum number of final types `eo-enumerate` lists.
    #[arg(long, default_value_t = eo::DEFAULT_CAP)]
    pub cap: usize,

    /// Allow the matrix family for m > 4.
    #[arg(long)]
    pub allow_large_m: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub m: u32,
    pub command: Command,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
    pub verify_oracle: bool,
    pub force_oracle: bool,
    pub parallelism: Option<usize>,
    pub ks: Vec<u32>,
    pub cap: usize,
    pub allow_large_m: bool,
}

impl RunConfig {
    pub fn new(m: u32, command: Command) -> Self {
        Self {
            m,
            command,
            format: Format::Json,
            cache_dir: None,
            verify_oracle: true,
            force_oracle: false,
            parallelism: None,
            ks: vec![1, 2, 4],
            cap: eo::DEFAULT_CAP,
            allow_large_m: false,
        }
    }
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        Self {
            m: c.m,
            command: c.command,
            format: c.format,
            cache_dir: c.cache_dir,
            verify_oracle: c.verify_oracle,
            force_oracle: c.force_oracle,
            parallelism: c.jobs,
            ks: c.k,
            cap: c.cap,
            allow_large_m: c.allow_large_m,
        }
    }
}

/// Exit status and the two output streams of one run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: String) -> Self {
        Self {
            status: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

pub fn run(cfg: &RunConfig) -> Outcome {
    let p = match SuzukiParams::new(cfg.m) {
        Ok(p) => p,
        Err(e) => return Outcome::usage(format!("--m {}: {e}", cfg.m)),
    };
    if cfg.command.needs_matrix() && cfg.m > MATRIX_M_LIMIT && !cfg.allow_large_m {
        return Outcome::usage(format!(
            "m = {} gives genus {}; matrix commands stop at m = {MATRIX_M_LIMIT} unless --allow-large-m is given",
            cfg.m, p.g
        ));
    }
    if cfg.ks.contains(&0) {
        return Outcome::usage("--k values must be at least 1".into());
    }
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => return Outcome::usage(format!("cannot start {:?} workers: {e}", cfg.parallelism)),
    };
    pool.install(|| Session::new(cfg, p).execute())
}

/// Lazily computed artifacts shared by the commands of one run.
struct Session<'a> {
    cfg: &'a RunConfig,
    p: SuzukiParams,
    basis: OnceCell<Basis>,
    matrix: OnceCell<BitMatrix>,
    profile: OnceCell<RankProfile>,
    stderr: String,
}

type CmdResult<T> = Result<T, String>;

/// Index of the first column where the two matrices differ.
pub fn first_differing_column(a: &BitMatrix, b: &BitMatrix) -> Option<usize> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Some(0);
    }
    (0..a.cols()).find(|&j| a.column(j) != b.column(j))
}

fn big(v: i128) -> Value {
    match u64::try_from(v) {
        Ok(u) => json!(u),
        Err(_) => json!(v.to_string()),
    }
}

impl<'a> Session<'a> {
    fn new(cfg: &'a RunConfig, p: SuzukiParams) -> Self {
        Self {
            cfg,
            p,
            basis: OnceCell::new(),
            matrix: OnceCell::new(),
            profile: OnceCell::new(),
            stderr: String::new(),
        }
    }

    fn warn(&mut self, msg: impl AsRef<str>) {
        self.stderr.push_str("warning: ");
        self.stderr.push_str(msg.as_ref());
        self.stderr.push('\n');
    }

    fn basis(&self) -> CmdResult<&Basis> {
        if self.basis.get().is_none() {
            let b = enumerate_basis(&self.p).map_err(|e| e.to_string())?;
            let _ = self.basis.set(b);
        }
        Ok(self.basis.get().unwrap())
    }

    fn matrix(&mut self) -> CmdResult<&BitMatrix> {
        if self.matrix.get().is_none() {
            let m = self.load_or_build()?;
            let _ = self.matrix.set(m);
        }
        Ok(self.matrix.get().unwrap())
    }

    fn load_or_build(&mut self) -> CmdResult<BitMatrix> {
        let path = self.cfg.cache_dir.as_ref().map(|d| cache::cache_path(d, self.cfg.m));
        if let Some(path) = path.as_ref().filter(|p| p.exists()) {
            match cache::load_matrix(path) {
                Ok((m, matrix)) if m == self.cfg.m => return Ok(matrix),
                Ok((m, _)) => self.warn(format!("{} holds m = {m}; recomputing", path.display())),
                Err(e) => self.warn(format!("ignoring cache {}: {e}", path.display())),
            }
        }
        let basis = self.basis()?;
        let matrix = build_cartier_matrix(&self.p, basis, CartierPath::Structured).map_err(|e| e.to_string())?;
        if let Some(path) = path {
            if let Err(e) = cache::cache_matrix(&path, self.cfg.m, &matrix) {
                self.warn(format!("could not write cache {}: {e}", path.display()));
            }
        }
        Ok(matrix)
    }

    fn profile(&mut self) -> CmdResult<&RankProfile> {
        if self.profile.get().is_none() {
            let rp = self.matrix()?.rank_profile().map_err(|e| e.to_string())?;
            let _ = self.profile.set(rp);
        }
        Ok(self.profile.get().unwrap())
    }

    fn constraints(&mut self) -> CmdResult<FinalTypeConstraints> {
        let rp = self.profile()?.clone();
        eo::derive_constraints(&rp).map_err(|e| e.to_string())
    }

    fn oracle_enabled(&mut self) -> bool {
        if !self.cfg.verify_oracle {
            return false;
        }
        if self.cfg.m > ORACLE_M_LIMIT && !self.cfg.force_oracle {
            self.warn(format!(
                "oracle cross-check skipped for m = {} > {ORACLE_M_LIMIT}; pass --force-oracle to run it",
                self.cfg.m
            ));
            return false;
        }
        true
    }

    fn execute(mut self) -> Outcome {
        let mut report = Report::new(&self.p);
        let result = match self.cfg.command {
            Command::Params => self.params(&mut report),
            Command::ANumber => self.a_number(&mut report),
            Command::Basis => self.basis_listing(&mut report),
            Command::Matrix => self.matrix_listing(&mut report),
            Command::RankProfile => self.rank_profile(&mut report),
            Command::EoConstraints => self.eo_constraints(&mut report),
            Command::EoEnumerate => self.eo_enumerate(&mut report),
            Command::Points => self.points(&mut report),
            Command::Verify => self.verify(&mut report),
            Command::All => self.all(&mut report),
        };
        let mut out = Outcome::default();
        match result {
            Ok(()) => {
                out.status = if report.verified() == Some(false) {
                    EXIT_VERIFY_FAILED
                } else {
                    EXIT_OK
                };
                out.stdout = report.render(self.cfg.format, self.cfg.command);
            }
            Err(e) => {
                out.status = EXIT_VERIFY_FAILED;
                self.stderr.push_str(&format!("error: {e}\n"));
            }
        }
        out.stderr = self.stderr;
        out
    }

    fn params(&mut self, r: &mut Report) -> CmdResult<()> {
        let p = self.p;
        let m = self.cfg.m;
        let e = |x: suzuki_core::Error| x.to_string();
        r.put("pole_orders", json!({ "y": p.vy, "z": p.vz, "h1": p.vh1, "h2": p.vh2 }));
        r.put("semigroup_generators", json!(p.sg_generators()));
        r.put("canonical_degree", json!(p.canonical_degree()));
        r.put("a_number_formula", json!(params::a_number_formula(m).map_err(e)?));
        r.put("nu_g_formula", json!(params::nu_g_formula(m).map_err(e)?));
        r.put("superspecial", json!(eo::superspecial_check(m).map_err(e)?));
        Ok(())
    }

    fn a_number(&mut self, r: &mut Report) -> CmdResult<()> {
        let a = eo::a_number_from_matrix(self.matrix()?).map_err(|e| e.to_string())?;
        let formula = params::a_number_formula(self.cfg.m).map_err(|e| e.to_string())?;
        r.put("a_number", json!(a));
        r.put("a_number_formula", json!(formula));
        r.put(
            "decomposition_bound",
            json!(eo::decomposition_bound(a).map_err(|e| e.to_string())?),
        );
        Ok(())
    }

    fn basis_listing(&mut self, r: &mut Report) -> CmdResult<()> {
        let p = self.p;
        let basis = self.basis()?;
        let rows: Vec<Value> = basis
            .elements()
            .iter()
            .enumerate()
            .map(|(i, m)| {
                json!({ "index": i, "a": m.a, "b": m.b, "c": m.c, "d": m.d,
                        "pole_order": m.pole_order(&p), "form": format!("{m} dy") })
            })
            .collect();
        r.put("basis_size", json!(basis.len()));
        r.put("basis", Value::Array(rows));
        Ok(())
    }

    fn matrix_listing(&mut self, r: &mut Report) -> CmdResult<()> {
        let matrix = self.matrix()?.clone();
        let columns: Vec<Value> = (0..matrix.cols())
            .map(|j| json!(matrix.column(j).iter_ones().collect::<Vec<_>>()))
            .collect();
        r.put("rank", json!(matrix.rank()));
        r.put("columns", Value::Array(columns));
        if self.oracle_enabled() {
            let ok = self.dual_path_check()?;
            r.put("verified", json!(ok));
        }
        Ok(())
    }

    fn rank_profile(&mut self, r: &mut Report) -> CmdResult<()> {
        let rp = self.profile()?.clone();
        r.put("rank_profile", json!(rp.ranks));
        r.put("nilpotency", json!(rp.nilpotency));
        r.put("a_number", json!(rp.a_number()));
        Ok(())
    }

    fn nu_payload(&mut self, r: &mut Report) -> CmdResult<FinalTypeConstraints> {
        let fc = self.constraints()?;
        let mut fixed = Map::new();
        for (i, v) in &fc.fixed {
            fixed.insert(i.to_string(), json!(v));
        }
        r.put("nu_fixed", Value::Object(fixed));
        r.put("free_gaps", json!(fc.free_gaps()));
        // nu_(r_k) = r_(k+1) is only established for the genus 14 curve
        r.put("heuristic", json!(self.cfg.m != 1));
        Ok(fc)
    }

    fn eo_constraints(&mut self, r: &mut Report) -> CmdResult<()> {
        let rp = self.profile()?.clone();
        r.put("rank_profile", json!(rp.ranks));
        self.nu_payload(r)?;
        Ok(())
    }

    fn final_types(&mut self, r: &mut Report, fc: &FinalTypeConstraints) -> CmdResult<()> {
        let count = fc.count();
        r.put("final_type_count", big(count.min(i128::MAX as u128) as i128));
        match eo::enumerate_compatible_final_types(fc, self.cfg.cap) {
            Ok(types) => r.put("final_types", json!(types)),
            Err(suzuki_core::Error::CapExceeded { cap, free_gaps }) => {
                self.warn(format!(
                    "{count} compatible final types exceed the cap {cap}; {free_gaps} free gaps"
                ));
                r.put("final_types", Value::Null);
            }
            Err(e) => return Err(e.to_string()),
        }
        Ok(())
    }

    fn eo_enumerate(&mut self, r: &mut Report) -> CmdResult<()> {
        let fc = self.nu_payload(r)?;
        self.final_types(r, &fc)
    }

    fn points(&mut self, r: &mut Report) -> CmdResult<()> {
        let m = self.cfg.m;
        let (mut zeta, mut naive, mut maximal) = (Map::new(), Map::new(), Map::new());
        for &k in &self.cfg.ks {
            let key = k.to_string();
            zeta.insert(
                key.clone(),
                big(params::point_count_zeta(m, k).map_err(|e| e.to_string())?),
            );
            maximal.insert(
                key.clone(),
                json!(params::is_maximal_over(m, k).map_err(|e| e.to_string())?),
            );
            let brute = match gf2n::point_count_naive(m, k) {
                Ok(n) => json!(n),
                Err(suzuki_core::Error::FieldTooLarge { .. }) => Value::Null,
                Err(e) => return Err(e.to_string()),
            };
            naive.insert(key, brute);
        }
        r.put("points", Value::Object(zeta));
        r.put("points_naive", Value::Object(naive));
        r.put("maximal", Value::Object(maximal));
        Ok(())
    }

    /// Compares the structured matrix with the oracle; reports the first
    /// differing column on stderr.
    fn dual_path_check(&mut self) -> CmdResult<bool> {
        let p = self.p;
        let structured = self.matrix()?.clone();
        let basis = self.basis()?;
        let oracle = build_cartier_matrix(&p, basis, CartierPath::Oracle).map_err(|e| e.to_string())?;
        match first_differing_column(&structured, &oracle) {
            None => Ok(true),
            Some(j) => {
                let elem = basis.get(j.min(basis.len().saturating_sub(1)));
                let s: Vec<usize> = structured.column(j).iter_ones().collect();
                let o: Vec<usize> = oracle.column(j).iter_ones().collect();
                self.stderr.push_str(&format!(
                    "mismatch: structured and oracle matrices first differ in column {j} ({elem} dy): \
                     structured rows {s:?}, oracle rows {o:?}\n"
                ));
                Ok(false)
            }
        }
    }

    fn verify(&mut self, r: &mut Report) -> CmdResult<()> {
        let p = self.p;
        let m = self.cfg.m;
        let mut checks = Vec::new();
        let mut check = |name: &str, passed: bool, detail: String| {
            checks.push(json!({ "check": name, "passed": passed, "detail": detail }));
            passed
        };
        let mut ok = true;

        let n = self.basis()?.len() as u64;
        ok &= check("basis_count", n == p.g, format!("{n} basis forms, genus {}", p.g));
        let sg = params::semigroup_count(m).map_err(|e| e.to_string())?;
        ok &= check(
            "semigroup_count",
            sg == p.g,
            format!("{sg} semigroup elements in [0, 2g-2]"),
        );

        if self.oracle_enabled() {
            let same = self.dual_path_check()?;
            ok &= check(
                "dual_path",
                same,
                format!("structured vs oracle on {} entries", p.g * p.g),
            );
        }

        let a = eo::a_number_from_matrix(self.matrix()?).map_err(|e| e.to_string())? as u64;
        let formula = params::a_number_formula(m).map_err(|e| e.to_string())?;
        ok &= check(
            "a_number_formula",
            a == formula,
            format!("g - rank = {a}, formula = {formula}"),
        );

        let rp = self.profile()?.clone();
        let nilpotent = eo::validate_profile(&rp).is_ok();
        ok &= check("nilpotent", nilpotent, format!("ranks {:?}", rp.ranks));
        if nilpotent {
            let derived = eo::derive_constraints(&rp);
            ok &= check(
                "final_type_constraints",
                derived.is_ok(),
                "step condition satisfiable".into(),
            );
        }

        for k in [1u32, 2, 4] {
            let Ok(brute) = gf2n::point_count_naive(m, k) else {
                continue;
            };
            let zeta = params::point_count_zeta(m, k).map_err(|e| e.to_string())?;
            ok &= check(
                &format!("points_k{k}"),
                brute as i128 == zeta,
                format!("naive {brute}, zeta {zeta}"),
            );
        }

        r.put("a_number", json!(a));
        r.put("checks", Value::Array(checks));
        r.put("verified", json!(ok));
        if !ok {
            self.stderr.push_str("verification failed\n");
        }
        Ok(())
    }

    fn all(&mut self, r: &mut Report) -> CmdResult<()> {
        self.params(r)?;
        self.rank_profile(r)?;
        let fc = self.nu_payload(r)?;
        self.final_types(r, &fc)?;
        self.points(r)?;
        self.verify(r)
    }
}
