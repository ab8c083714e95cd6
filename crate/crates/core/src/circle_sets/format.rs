//! Line-oriented text format: `point <theta>` and
//! `cluster <limit_theta> <ratio> <scale> <sign> <start_index>`, with `#`
//! starting a comment.

use super::angle::Angle;
use super::cluster::{GeometricCluster, Sign};
use super::set::SymbolicCircleSet;
use crate::error::{Error, Result};
use std::fmt::Write;

pub fn parse_set(text: &str) -> Result<SymbolicCircleSet> {
    let mut points = Vec::new();
    let mut clusters = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| -> Result<f64> { s.parse::<f64>().map_err(|e| err(format!("bad number {s:?}: {e}"))) };
        match fields[0] {
            "point" if fields.len() == 2 => {
                points.push(Angle::new(num(fields[1])?).map_err(|e| err(e.to_string()))?);
            }
            "cluster" if fields.len() == 6 => {
                let sign = match fields[4] {
                    "1" | "+1" | "+" => Sign::Plus,
                    "-1" | "-" => Sign::Minus,
                    s => return Err(err(format!("bad sign {s:?}"))),
                };
                let j: u32 = fields[5].parse().map_err(|e| err(format!("bad start index: {e}")))?;
                let limit = Angle::new(num(fields[1])?).map_err(|e| err(e.to_string()))?;
                let c = GeometricCluster::new(limit, num(fields[2])?, num(fields[3])?, sign, j)
                    .map_err(|e| err(e.to_string()))?;
                clusters.push(c);
            }
            kw @ ("point" | "cluster") => return Err(err(format!("wrong number of fields for {kw}"))),
            kw => return Err(err(format!("unknown component {kw:?}"))),
        }
    }
    SymbolicCircleSet::new(points, clusters)
}

pub fn format_set(set: &SymbolicCircleSet) -> String {
    let mut out = String::new();
    for p in set.points() {
        let _ = writeln!(out, "point {}", p.radians());
    }
    for c in set.clusters() {
        let sign = match c.sign() {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        };
        let _ = writeln!(
            out,
            "cluster {} {} {} {} {}",
            c.limit().radians(),
            c.ratio(),
            c.scale(),
            sign,
            c.start_index()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "# two atoms and a cluster\npoint 1.5\npoint 3   # trailing\ncluster 0.1111111111111111 0.1 0.1111111111111111 +1 1\n";
        let s = parse_set(text).unwrap();
        assert_eq!(s.points().len(), 2);
        assert_eq!(s.clusters().len(), 1);
        assert_eq!(parse_set(&format_set(&s)).unwrap(), s);
    }

    #[test]
    fn reports_line_numbers() {
        match parse_set("point 1\nbogus 2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_set("cluster 0 0.5 1 2 1").is_err());
        assert!(parse_set("point x").is_err());
    }
}
