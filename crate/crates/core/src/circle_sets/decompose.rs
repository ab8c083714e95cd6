use super::angle::{Angle, ANGLE_TOL};
use super::set::SymbolicCircleSet;
use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Splitting of a set into thin pieces plus finitely many exceptional points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub exceptional: Vec<Angle>,
    pub pieces: Vec<SymbolicCircleSet>,
    /// For every split cluster, the last index represented explicitly.
    /// Deeper points are closer to the exceptional limit than the angle
    /// tolerance can resolve.
    pub truncation: Vec<SplitCluster>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitCluster {
    pub cluster: usize,
    pub last_index: u64,
}

/// Separates every cluster with `1/log(1/a) > delta` into its limit point and
/// finite blocks of indices `n − j + 1 ∈ [2^m, 2^{m+1})`; atoms and the other
/// clusters are packed into pieces whose thinness sums stay within `delta`.
pub fn decompose(set: &SymbolicCircleSet, delta: f64) -> Result<Decomposition> {
    if !(delta > 0.0) || !delta.is_finite() {
        return invalid(format!("delta {delta} must be positive and finite"));
    }
    let mut exceptional = Vec::new();
    let mut pieces = Vec::new();
    let mut truncation = Vec::new();

    let mut light_points = set.points().to_vec();
    let mut light_clusters = Vec::new();
    let mut light_alpha = 0.0;
    let flush = |points: &mut Vec<Angle>, clusters: &mut Vec<_>, pieces: &mut Vec<SymbolicCircleSet>| -> Result<()> {
        if !points.is_empty() || !clusters.is_empty() {
            pieces.push(SymbolicCircleSet::new(std::mem::take(points), std::mem::take(clusters))?);
        }
        Ok(())
    };

    for (ci, c) in set.clusters().iter().enumerate() {
        let alpha = c.alpha();
        if alpha <= delta {
            if light_alpha + alpha > delta {
                flush(&mut light_points, &mut light_clusters, &mut pieces)?;
                light_alpha = 0.0;
            }
            light_clusters.push(*c);
            light_alpha += alpha;
            continue;
        }
        exceptional.push(c.limit());
        let j = c.start_index() as u64;
        // Keep indices whose points stay resolvable from their neighbours.
        let resolvable = |n: u64| c.offset(n) * (1.0 - c.ratio()) > 2.0 * ANGLE_TOL;
        let mut last = j - 1;
        let mut m = 0u32;
        loop {
            let first = j + (1u64 << m) - 1;
            if !resolvable(first) {
                break;
            }
            let block_end = j + (1u64 << (m + 1)) - 2;
            let block: Vec<Angle> = (first..=block_end).take_while(|&n| resolvable(n)).map(|n| c.point(n)).collect();
            last = first + block.len() as u64 - 1;
            pieces.push(SymbolicCircleSet::from_points(block)?);
            m += 1;
        }
        truncation.push(SplitCluster { cluster: ci, last_index: last });
    }
    flush(&mut light_points, &mut light_clusters, &mut pieces)?;
    Ok(Decomposition { exceptional, pieces, truncation })
}

#[cfg(test)]
mod tests {
    use super::super::cluster::{GeometricCluster, Sign};
    use super::*;

    fn half() -> SymbolicCircleSet {
        let c = GeometricCluster::new(Angle::new(0.0).unwrap(), 0.5, 1.0, Sign::Plus, 1).unwrap();
        SymbolicCircleSet::new(vec![], vec![c]).unwrap()
    }

    #[test]
    fn finite_set_is_one_piece() {
        let s = SymbolicCircleSet::from_points(vec![Angle::new(1.0).unwrap(), Angle::new(2.0).unwrap()]).unwrap();
        let d = decompose(&s, 0.1).unwrap();
        assert!(d.exceptional.is_empty());
        assert_eq!(d.pieces, vec![s]);
    }

    #[test]
    fn light_cluster_stays_whole() {
        let d = decompose(&half(), 2.0).unwrap();
        assert!(d.exceptional.is_empty());
        assert_eq!(d.pieces, vec![half()]);
    }

    #[test]
    fn heavy_cluster_is_split_dyadically() {
        let d = decompose(&half(), 0.5).unwrap();
        assert_eq!(d.exceptional.len(), 1);
        assert_eq!(d.pieces[0].points().len(), 1);
        assert_eq!(d.pieces[1].points().len(), 2);
        assert_eq!(d.pieces[2].points().len(), 4);
        assert!(d.pieces.iter().all(|p| p.alpha_analytic() <= 0.5));
        assert!(decompose(&half(), 0.0).is_err());
    }
}
