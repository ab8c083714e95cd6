//! Text format: any number of `atom <theta> <weight>` lines, or a single
//! `cantor <ratio> <depth> <mass> <arc_start> <arc_length>` line.

use super::atomic::{Atom, AtomicMeasure, CantorApproxMeasure};
use crate::circle_sets::Angle;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// A parsed measure description, kept symbolic until rendered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MeasureSpec {
    Atomic(AtomicMeasure),
    Cantor(CantorApproxMeasure),
}

impl MeasureSpec {
    pub fn to_atomic(&self) -> Result<AtomicMeasure> {
        match self {
            MeasureSpec::Atomic(m) => Ok(m.clone()),
            MeasureSpec::Cantor(c) => c.render(),
        }
    }
}

pub fn parse_measure(text: &str) -> Result<MeasureSpec> {
    let mut atoms = Vec::new();
    let mut cantor = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let f: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| -> Result<f64> { s.parse::<f64>().map_err(|e| err(format!("bad number {s:?}: {e}"))) };
        match f[0] {
            "atom" if f.len() == 3 => {
                let angle = Angle::new(num(f[1])?).map_err(|e| err(e.to_string()))?;
                atoms.push(Atom { angle, weight: num(f[2])? });
            }
            "cantor" if f.len() == 6 => {
                if cantor.is_some() {
                    return Err(err("only one cantor line is allowed".into()));
                }
                let depth: u32 = f[2].parse().map_err(|e| err(format!("bad depth: {e}")))?;
                let start = Angle::new(num(f[4])?).map_err(|e| err(e.to_string()))?;
                let c = CantorApproxMeasure::new(num(f[1])?, depth, num(f[3])?, start, num(f[5])?)
                    .map_err(|e| err(e.to_string()))?;
                cantor = Some((line_no, c));
            }
            kw @ ("atom" | "cantor") => return Err(err(format!("wrong number of fields for {kw}"))),
            kw => return Err(err(format!("unknown measure component {kw:?}"))),
        }
    }
    match cantor {
        Some((line, _)) if !atoms.is_empty() => {
            Err(Error::Parse { line, msg: "a cantor line cannot be mixed with atoms".into() })
        }
        Some((_, c)) => Ok(MeasureSpec::Cantor(c)),
        None => Ok(MeasureSpec::Atomic(AtomicMeasure::new(atoms)?)),
    }
}

pub fn format_measure(spec: &MeasureSpec) -> String {
    let mut out = String::new();
    match spec {
        MeasureSpec::Atomic(m) => {
            for a in m.atoms() {
                let _ = writeln!(out, "atom {} {}", a.angle.radians(), a.weight);
            }
        }
        MeasureSpec::Cantor(c) => {
            let _ = writeln!(
                out,
                "cantor {} {} {} {} {}",
                c.ratio,
                c.depth,
                c.mass,
                c.arc_start.radians(),
                c.arc_length
            );
        }
    }
    out
}
