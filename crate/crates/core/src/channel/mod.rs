//! Line-of-sight channel between two QF-UCAs: element gains, the
//! block-circulant channel, its mode-domain form and the diagonal Bessel
//! approximation used for detection.

mod link;
mod modes;
mod params;

use std::io::Write;

pub use link::{ApproxDistance, BlockChannel, FresnelTerms, GainModel, Link};
pub use modes::{
    exact_lambda, matrix_gap, signed_mode, ApproxOptions, BesselOrder, GainPath, GapScope,
    LambdaPath, ModeChannel,
};
pub use params::{PropagationParams, SPEED_OF_LIGHT};

use crate::error::Result;

/// Writes every entry of the assembled channel as `m,n,v,k,re,im`.
pub fn write_channel_csv<W: Write>(ch: &BlockChannel, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["m", "n", "v", "k", "re", "im"])?;
    let nc = ch.n_cells();
    for m in 0..nc {
        for n in 0..nc {
            let b = ch.block(m, n);
            for v in 0..b.rows() {
                for k in 0..b.cols() {
                    let h = b[(v, k)];
                    w.write_record([
                        m.to_string(),
                        n.to_string(),
                        v.to_string(),
                        k.to_string(),
                        h.re.to_string(),
                        h.im.to_string(),
                    ])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// One row of a gap table. `mode == None` marks the all-modes aggregate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRow {
    pub distance: f64,
    pub elems: usize,
    pub mode: Option<usize>,
    pub epsilon: f64,
}

pub fn write_gap_csv<W: Write>(rows: &[GapRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["D_m", "K", "p", "epsilon"])?;
    for r in rows {
        w.write_record([
            r.distance.to_string(),
            r.elems.to_string(),
            r.mode.map_or_else(|| "all".to_string(), |p| p.to_string()),
            r.epsilon.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests;
