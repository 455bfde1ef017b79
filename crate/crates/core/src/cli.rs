//! Experiment commands behind the `qfoam` binary. Each writes CSV files into
//! an output directory and returns a short summary.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{write_channel_csv, write_gap_csv, GapRow, GapScope};
use crate::error::{Error, Result};
use crate::geometry::write_layout_csv;
use crate::metrics::{run_sweep, SweepSpec};
use crate::scenario::Scenario;
use crate::txrx::{NoiseModel, SymbolGrid, Transceiver};

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let f = File::create(&path)?;
    Ok((path, BufWriter::new(f)))
}

/// Writes `geometry.csv` for the transmit layout.
pub fn cmd_geometry(sc: &Scenario, out: &Path) -> Result<PathBuf> {
    let (path, w) = create(out, "geometry.csv")?;
    write_layout_csv(&sc.tx_layout()?, w)?;
    Ok(path)
}

/// Writes `gap.csv`: per-mode and aggregate gaps for every `(K, D)` pair,
/// with `K` used at both ends.
pub fn cmd_gap(sc: &Scenario, distances: &[f64], elems: &[usize]) -> Result<Vec<GapRow>> {
    let mut rows = Vec::new();
    for &k in elems {
        for &d in distances {
            let s = Scenario {
                tx_elems: k,
                rx_elems: k,
                distance_m: d,
                ..sc.clone()
            };
            let link = s.link()?;
            let opts = s.approx_options();
            for p in 0..s.n_cells {
                rows.push(GapRow {
                    distance: d,
                    elems: k,
                    mode: Some(p),
                    epsilon: link.approx_gap(GapScope::Mode(p), &opts)?,
                });
            }
            rows.push(GapRow {
                distance: d,
                elems: k,
                mode: None,
                epsilon: link.approx_gap(GapScope::Total, &opts)?,
            });
        }
    }
    Ok(rows)
}

pub fn cmd_gap_to_dir(
    sc: &Scenario,
    distances: &[f64],
    elems: &[usize],
    out: &Path,
) -> Result<PathBuf> {
    let rows = cmd_gap(sc, distances, elems)?;
    let (path, w) = create(out, "gap.csv")?;
    write_gap_csv(&rows, w)?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopbackSummary {
    pub frames: usize,
    pub symbols: usize,
    pub errors: usize,
}

impl LoopbackSummary {
    pub fn ser(&self) -> f64 {
        if self.symbols == 0 {
            0.0
        } else {
            self.errors as f64 / self.symbols as f64
        }
    }
}

/// Random constellation indices for one frame.
pub fn frame_indices(seed: u64, frame: u64, n: usize, order: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(
        seed.rotate_left(32) ^ frame.wrapping_mul(0xA076_1D64_78BD_642F) ^ 0x5EED,
    );
    (0..n).map(|_| rng.random_range(0..order)).collect()
}

/// Runs `frames` random frames through the full chain. Writes
/// `loopback.csv` (per frame), `modes.csv` (per mode, from the first frame)
/// and `channel.csv`.
pub fn cmd_loopback(
    sc: &Scenario,
    frames: usize,
    noiseless: bool,
    out: &Path,
) -> Result<LoopbackSummary> {
    let link = sc.link()?;
    let constellation = sc.constellation()?;
    let noise = if noiseless {
        NoiseModel::new(0.0, sc.seed)?
    } else {
        sc.noise()?
    };
    let trx = Transceiver::new(link.clone(), sc.lambda_path, &sc.approx_options(), noise)?;
    let (n, k) = (sc.n_cells, sc.tx_elems);

    let (_, w) = create(out, "loopback.csv")?;
    let mut frame_csv = csv::Writer::from_writer(w);
    frame_csv.write_record(["frame", "symbols", "errors", "ser"])?;
    let (_, w) = create(out, "modes.csv")?;
    let mut mode_csv = csv::Writer::from_writer(w);
    mode_csv.write_record([
        "p",
        "l",
        "lambda_re",
        "lambda_im",
        "signal",
        "interference",
        "noise",
        "snr",
        "sinr",
    ])?;

    let mut summary = LoopbackSummary {
        frames,
        symbols: 0,
        errors: 0,
    };
    for f in 0..frames {
        let idx = frame_indices(sc.seed, f as u64, n * k, constellation.len());
        let grid =
            SymbolGrid::from_indices(n, k, &idx, &constellation, sc.total_power, &sc.power_alloc)?;
        let r = trx.run(&grid, &constellation, f as u64)?;
        summary.symbols += n * k;
        summary.errors += r.symbol_errors;
        frame_csv.write_record([
            f.to_string(),
            (n * k).to_string(),
            r.symbol_errors.to_string(),
            (r.symbol_errors as f64 / (n * k) as f64).to_string(),
        ])?;
        if f == 0 {
            for m in &r.modes {
                let lam = trx.lambda()[(m.p, m.l)];
                mode_csv.write_record([
                    m.p.to_string(),
                    m.l.to_string(),
                    lam.re.to_string(),
                    lam.im.to_string(),
                    m.signal.to_string(),
                    m.interference.to_string(),
                    m.noise.to_string(),
                    m.snr.to_string(),
                    m.sinr.to_string(),
                ])?;
            }
        }
    }
    frame_csv.flush()?;
    mode_csv.flush()?;
    let (_, w) = create(out, "channel.csv")?;
    write_channel_csv(&link.build_block_channel()?, w)?;
    Ok(summary)
}

/// Writes `sweep.csv`.
pub fn cmd_sweep(spec: &SweepSpec, out: &Path) -> Result<PathBuf> {
    let result = run_sweep(spec)?;
    let (path, w) = create(out, "sweep.csv")?;
    result.write_csv(w)?;
    Ok(path)
}

/// Comma-separated list; an empty string gives an empty list.
pub fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::InvalidArgument(format!("cannot parse list item '{s}'")))
        })
        .collect()
}

pub fn load_scenario(path: Option<&Path>) -> Result<Scenario> {
    match path {
        Some(p) => Scenario::parse(&fs::read_to_string(p)?),
        None => Ok(Scenario::default()),
    }
}
