//! DIMACS CNF text: writing, parsing, and solver output.

use crate::error::{Error, Result};

/// A formula in DIMACS conventions: variables `1..=vars`, literals as
/// signed integers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    pub vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn add(&mut self, clause: Vec<i32>) {
        debug_assert!(clause.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= self.vars));
        self.clauses.push(clause);
    }

    pub fn fresh(&mut self) -> i32 {
        self.vars += 1;
        self.vars as i32
    }
}

pub fn emit(f: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", f.vars, f.clauses.len());
    for c in &f.clauses {
        for l in c {
            out.push_str(&l.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

pub fn parse(text: &str) -> Result<Cnf> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut cur = Vec::new();
    let mut offset = 0;
    for line in text.lines() {
        let here = offset;
        offset += line.len() + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p ") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            match parts.as_slice() {
                ["cnf", v, c] => {
                    let v = v.parse().map_err(|_| Error::Parse { offset: here, msg: "bad variable count".into() })?;
                    let c = c.parse().map_err(|_| Error::Parse { offset: here, msg: "bad clause count".into() })?;
                    header = Some((v, c));
                }
                _ => return Err(Error::Parse { offset: here, msg: "expected `p cnf <vars> <clauses>`".into() }),
            }
            continue;
        }
        let (vars, _) = header.ok_or(Error::Parse { offset: here, msg: "clause before header".into() })?;
        for tok in line.split_whitespace() {
            let l: i32 = tok.parse().map_err(|_| Error::Parse { offset: here, msg: format!("bad literal `{tok}`") })?;
            if l == 0 {
                clauses.push(std::mem::take(&mut cur));
            } else if l.unsigned_abs() as usize > vars {
                return Err(Error::Parse { offset: here, msg: format!("literal {l} exceeds {vars} variables") });
            } else {
                cur.push(l);
            }
        }
    }
    let (vars, count) = header.ok_or(Error::Parse { offset: 0, msg: "missing header".into() })?;
    if !cur.is_empty() {
        clauses.push(cur);
    }
    if clauses.len() != count {
        return Err(Error::Parse { offset, msg: format!("header says {count} clauses, found {}", clauses.len()) });
    }
    Ok(Cnf { vars, clauses })
}

/// What a solver said about a formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolverAnswer {
    /// `model[v - 1]` is the value of variable `v`.
    Sat(Vec<bool>),
    Unsat,
    Unknown(String),
}

/// Reads competition-style output: an `s` line and `v` lines.
pub fn parse_solver_output(text: &str, vars: usize) -> Result<SolverAnswer> {
    let mut status = None;
    let mut model = vec![false; vars];
    for line in text.lines() {
        let line = line.trim();
        if let Some(s) = line.strip_prefix("s ") {
            status = Some(s.trim().to_string());
        } else if let Some(v) = line.strip_prefix("v ") {
            for tok in v.split_whitespace() {
                let l: i64 = tok.parse().map_err(|_| Error::Solver(format!("bad model literal `{tok}`")))?;
                let idx = l.unsigned_abs() as usize;
                if l != 0 && idx <= vars {
                    model[idx - 1] = l > 0;
                }
            }
        }
    }
    match status.as_deref() {
        Some("SATISFIABLE") => Ok(SolverAnswer::Sat(model)),
        Some("UNSATISFIABLE") => Ok(SolverAnswer::Unsat),
        Some(other) => Ok(SolverAnswer::Unknown(other.to_string())),
        None => Ok(SolverAnswer::Unknown("no status line".into())),
    }
}

/// Competition-style output for an answer.
pub fn format_solver_output(answer: &SolverAnswer) -> String {
    match answer {
        SolverAnswer::Sat(model) => {
            let mut out = String::from("s SATISFIABLE\nv");
            for (i, &b) in model.iter().enumerate() {
                let v = i as i64 + 1;
                out.push_str(&format!(" {}", if b { v } else { -v }));
            }
            out.push_str(" 0\n");
            out
        }
        SolverAnswer::Unsat => "s UNSATISFIABLE\n".into(),
        SolverAnswer::Unknown(why) => format!("c {why}\ns UNKNOWN\n"),
    }
}
