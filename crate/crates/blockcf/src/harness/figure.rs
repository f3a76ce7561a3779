//! Analytic curve table over a range of uniform cluster sides: for every
//! side `n0` the fill-error sandwich bounds at block area `n0^2`, the
//! clustering split/merge bounds with `n/n0` value clusters, and the
//! constant recovery threshold. No simulation is involved.

use crate::bounds::{binary_report, clustering_bound};
use crate::error::{Error, Result};
use crate::harness::output::SweepRow;

#[derive(Clone, Debug)]
pub struct FigureParams {
    pub m: u64,
    pub n: u64,
    pub p: f64,
    pub epsilon: f64,
    /// Clustering threshold; defaults to `(d_lb + 2 d_ub) / 3` of the BSC.
    pub d0: Option<f64>,
    pub r1: f64,
    pub r2: f64,
    pub n0_min: u64,
    pub n0_max: u64,
    pub master_seed: u64,
}

pub fn figure_curves(params: &FigureParams) -> Result<Vec<SweepRow>> {
    if params.n0_min == 0 || params.n0_min > params.n0_max {
        return Err(Error::ParamRange(format!(
            "need 1 <= n0_min <= n0_max, got {}..{}",
            params.n0_min, params.n0_max
        )));
    }
    let mu = 2.0 * params.p * (1.0 - params.p);
    let d0 = params.d0.unwrap_or((mu + 1.0) / 3.0);

    let mut rows = Vec::with_capacity((params.n0_max - params.n0_min + 1) as usize);
    for n0 in params.n0_min..=params.n0_max {
        let area = n0 * n0;
        let mut row = SweepRow {
            n0,
            m0: n0,
            area,
            trials: 0,
            master_seed: params.master_seed,
            ..Default::default()
        };

        match binary_report(params.p, params.epsilon, params.m, params.n, area, area) {
            Ok(report) => {
                row.threshold_area = Some(report.threshold_area);
                row.fill_lb = Some(report.fill_lower);
                row.fill_ub = report.fill_upper;
                if report.fill_upper.is_none() {
                    row.flags.push("fill_ub_hypothesis_violated".into());
                }
            }
            Err(err) => row.flags.push(format!("bounds_error:{err}")),
        }

        // value clusters per axis as a real number, so sides that do not
        // divide n keep a consistent meaning
        let t = params.n as f64 / n0 as f64;
        match clustering_bound(
            params.n,
            t,
            n0,
            params.p,
            params.epsilon,
            d0,
            params.r1,
            params.r2,
        ) {
            Ok(report) => {
                row.clust_same_ub = Some(report.split_bound);
                row.clust_diff_p1 = Some(report.merge_bound);
            }
            Err(err) => row.flags.push(format!("clustering_bound_error:{err}")),
        }

        rows.push(row);
    }
    Ok(rows)
}
