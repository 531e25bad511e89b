//! Solver backends: an external process speaking DIMACS, or varisat in-process.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use super::dimacs::{emit, parse_solver_output, Cnf, SolverAnswer};
use crate::error::{Error, Result};

pub trait SatBackend: Send + Sync {
    fn name(&self) -> String;
    fn solve(&self, f: &Cnf) -> Result<SolverAnswer>;

    /// Models that differ on the first `keep` variables, at most `limit` of
    /// them; the flag tells whether the list is complete. The default
    /// re-solves with one blocking clause per model found.
    fn enumerate(&self, f: &Cnf, keep: usize, limit: usize) -> Result<(Vec<Vec<bool>>, bool)> {
        let mut cnf = f.clone();
        let mut out = Vec::new();
        while out.len() < limit {
            match self.solve(&cnf)? {
                SolverAnswer::Sat(model) => {
                    if keep == 0 {
                        out.push(model);
                        return Ok((out, true));
                    }
                    cnf.add(blocking(&model, keep));
                    out.push(model);
                }
                SolverAnswer::Unsat => return Ok((out, true)),
                SolverAnswer::Unknown(why) => return Err(Error::Solver(why)),
            }
        }
        Ok((out, false))
    }
}

fn blocking(model: &[bool], keep: usize) -> Vec<i32> {
    (0..keep).map(|i| if model[i] { -(i as i32 + 1) } else { i as i32 + 1 }).collect()
}

fn varisat_lits(c: &[i32]) -> Vec<varisat::Lit> {
    c.iter().map(|&l| varisat::Lit::from_dimacs(l as isize)).collect()
}

fn varisat_model(solver: &varisat::Solver, vars: usize) -> Vec<bool> {
    let mut model = vec![false; vars];
    for l in solver.model().unwrap_or_default() {
        let v = l.var().to_dimacs() as usize;
        if v >= 1 && v <= vars {
            model[v - 1] = l.is_positive();
        }
    }
    model
}

/// varisat, linked in.
#[derive(Clone, Copy, Debug, Default)]
pub struct InProcess;

impl SatBackend for InProcess {
    fn name(&self) -> String {
        "varisat".into()
    }

    fn solve(&self, f: &Cnf) -> Result<SolverAnswer> {
        use varisat::{ExtendFormula, Solver};
        if f.clauses.iter().any(Vec::is_empty) {
            return Ok(SolverAnswer::Unsat);
        }
        let mut solver = Solver::new();
        for c in &f.clauses {
            solver.add_clause(&varisat_lits(c));
        }
        match solver.solve() {
            Ok(true) => Ok(SolverAnswer::Sat(varisat_model(&solver, f.vars))),
            Ok(false) => Ok(SolverAnswer::Unsat),
            Err(e) => Err(Error::Solver(e.to_string())),
        }
    }

    /// One solver kept alive across models, so learnt clauses carry over.
    fn enumerate(&self, f: &Cnf, keep: usize, limit: usize) -> Result<(Vec<Vec<bool>>, bool)> {
        use varisat::{ExtendFormula, Solver};
        if f.clauses.iter().any(Vec::is_empty) {
            return Ok((Vec::new(), true));
        }
        let mut solver = Solver::new();
        for c in &f.clauses {
            solver.add_clause(&varisat_lits(c));
        }
        let mut out = Vec::new();
        while out.len() < limit {
            match solver.solve() {
                Ok(true) => {
                    let model = varisat_model(&solver, f.vars);
                    if keep == 0 {
                        out.push(model);
                        return Ok((out, true));
                    }
                    solver.add_clause(&varisat_lits(&blocking(&model, keep)));
                    out.push(model);
                }
                Ok(false) => return Ok((out, true)),
                Err(e) => return Err(Error::Solver(e.to_string())),
            }
        }
        Ok((out, false))
    }
}

/// Any solver binary that takes a DIMACS file as its last argument and
/// prints `s`/`v` lines (exit codes 10 and 20 are understood as well).
#[derive(Clone, Debug)]
pub struct External {
    pub path: PathBuf,
    pub args: Vec<String>,
    pub timeout: Option<Duration>,
}

impl External {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        External { path: path.into(), args: Vec::new(), timeout: None }
    }
}

impl SatBackend for External {
    fn name(&self) -> String {
        self.path.display().to_string()
    }

    fn solve(&self, f: &Cnf) -> Result<SolverAnswer> {
        let mut file = tempfile::Builder::new()
            .suffix(".cnf")
            .tempfile()
            .map_err(|e| Error::io(std::path::Path::new("<tempfile>"), e))?;
        file.write_all(emit(f).as_bytes()).map_err(|e| Error::io(file.path(), e))?;
        file.flush().map_err(|e| Error::io(file.path(), e))?;
        let mut child = Command::new(&self.path)
            .args(&self.args)
            .arg(file.path())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| Error::Solver(format!("cannot start {}: {e}", self.path.display())))?;
        let mut stdout = child.stdout.take().expect("piped");
        let reader = std::thread::spawn(move || {
            let mut s = String::new();
            let _ = stdout.read_to_string(&mut s);
            s
        });
        let start = Instant::now();
        let status = loop {
            if let Some(st) = child.try_wait().map_err(|e| Error::Solver(e.to_string()))? {
                break st;
            }
            if self.timeout.is_some_and(|t| start.elapsed() > t) {
                let _ = child.kill();
                let _ = child.wait();
                return Ok(SolverAnswer::Unknown("timeout".into()));
            }
            std::thread::sleep(Duration::from_millis(5));
        };
        let text = reader.join().map_err(|_| Error::Solver("output reader panicked".into()))?;
        let answer = parse_solver_output(&text, f.vars)?;
        match (answer, status.code()) {
            (SolverAnswer::Unknown(_), Some(20)) => Ok(SolverAnswer::Unsat),
            (SolverAnswer::Unknown(why), Some(10)) => Err(Error::Solver(format!("exit 10 without a model ({why})"))),
            (SolverAnswer::Unknown(why), code) => Ok(SolverAnswer::Unknown(format!("{why}; exit {code:?}"))),
            (a, _) => Ok(a),
        }
    }
}
