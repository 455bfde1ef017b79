use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::grid::{Constellation, SymbolGrid};
use crate::channel::Link;
use crate::error::{Error, Result};
use crate::geometry::{superpose_operators, Layout, SharingMatrix};
use crate::linalg::{cis, idft_matrix, ComplexMatrix, C64};

fn check_grid(grid: &SymbolGrid, layout: &Layout) -> Result<()> {
    if grid.n_inter() != layout.n_cells() || grid.n_inner() != layout.elems_per_cell() {
        return Err(Error::InvalidArgument(format!(
            "grid {}x{} does not match a layout of {} cells with {} elements",
            grid.n_inter(),
            grid.n_inner(),
            layout.n_cells(),
            layout.elems_per_cell()
        )));
    }
    Ok(())
}

/// Logical slot signals `x_{n,k}` by direct summation over all modes.
pub fn tom_logical(grid: &SymbolGrid) -> Vec<C64> {
    let (n, k) = (grid.n_inter(), grid.n_inner());
    let s = grid.symbols();
    let norm = 1.0 / ((n * k) as f64).sqrt();
    let mut x = vec![C64::new(0.0, 0.0); n * k];
    for ni in 0..n {
        for ki in 0..k {
            let mut acc = C64::new(0.0, 0.0);
            for pi in 0..n {
                for li in 0..k {
                    let ph = 2.0
                        * PI
                        * (((ki * li) % k) as f64 / k as f64 + ((ni * pi) % n) as f64 / n as f64);
                    acc += s[pi * k + li] * cis(ph);
                }
            }
            x[ni * k + ki] = acc * norm;
        }
    }
    x
}

/// Logical slot signals as `W_N S W_K^T`, flattened row-major.
pub fn tom_logical_matrix(grid: &SymbolGrid) -> Result<Vec<C64>> {
    let (n, k) = (grid.n_inter(), grid.n_inner());
    let s = ComplexMatrix::from_row_major(n, k, grid.symbols())?;
    let x = idft_matrix(n)?
        .matmul(&s)?
        .matmul(&idft_matrix(k)?.transpose())?;
    Ok(x.as_slice().to_vec())
}

/// Physical transmit element signals: logical signals summed per element.
pub fn tom_modulate(grid: &SymbolGrid, tx: &Layout) -> Result<Vec<C64>> {
    check_grid(grid, tx)?;
    let (t, _) = superpose_operators(tx);
    t.combine(&tom_logical(grid))
}

/// Element-to-element free-space channel between physical elements.
#[derive(Debug, Clone)]
pub struct PhysicalChannel {
    gains: ComplexMatrix,
}

impl PhysicalChannel {
    pub fn new(link: &Link) -> Result<Self> {
        let tx_rep = representatives(link.tx());
        let rx_rep = representatives(link.rx());
        let mut gains = ComplexMatrix::zeros(rx_rep.len(), tx_rep.len());
        for (r, &(m, v)) in rx_rep.iter().enumerate() {
            for (c, &(n, k)) in tx_rep.iter().enumerate() {
                gains[(r, c)] = link.physical_gain(m, v, n, k)?;
            }
        }
        Ok(PhysicalChannel { gains })
    }

    pub fn gains(&self) -> &ComplexMatrix {
        &self.gains
    }
}

/// First `(cell, elem)` slot of every physical element.
fn representatives(layout: &Layout) -> Vec<(usize, usize)> {
    let k = layout.elems_per_cell();
    let mut rep = vec![None; layout.n_physical()];
    for (slot, &g) in layout.slot_groups().iter().enumerate() {
        rep[g].get_or_insert((slot / k, slot % k));
    }
    rep.into_iter()
        .map(|r| r.expect("every group has a slot"))
        .collect()
}

/// Circular complex Gaussian noise per physical receive element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub element_variance: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(element_variance: f64, seed: u64) -> Result<Self> {
        if !(element_variance >= 0.0 && element_variance.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise variance must be non-negative, got {element_variance}"
            )));
        }
        Ok(NoiseModel {
            element_variance,
            seed,
        })
    }

    pub fn noiseless() -> Self {
        NoiseModel {
            element_variance: 0.0,
            seed: 0,
        }
    }

    /// Deterministic noise samples for one frame.
    pub fn sample(&self, len: usize, frame: u64) -> Vec<C64> {
        if self.element_variance == 0.0 {
            return vec![C64::new(0.0, 0.0); len];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix(self.seed ^ splitmix(frame)));
        let sd = (self.element_variance / 2.0).sqrt();
        (0..len)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(re * sd, im * sd)
            })
            .collect()
    }

    /// Noise variance `σ²_{p,l}` after the receive chain, rows `p`, columns `l`.
    pub fn per_mode_variance(&self, rx: &Layout) -> Result<Vec<Vec<f64>>> {
        let (n, v) = (rx.n_cells(), rx.elems_per_cell());
        let sharing = crate::geometry::sharing_matrix(rx);
        let mut acc = vec![vec![0.0; v]; n];
        let mut unit = vec![C64::new(0.0, 0.0); rx.n_physical()];
        for e in 0..rx.n_physical() {
            unit[e] = C64::new(1.0, 0.0);
            let x = tod_split_compensate(&unit, rx)?;
            for (p, xp) in x.iter().enumerate() {
                for (l, s) in tod_inner_demodulate(xp, &sharing)?.iter().enumerate() {
                    acc[p][l] += s.norm_sqr();
                }
            }
            unit[e] = C64::new(0.0, 0.0);
        }
        for row in &mut acc {
            for x in row.iter_mut() {
                *x *= self.element_variance;
            }
        }
        Ok(acc)
    }
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Received physical signals: channel output plus frame noise.
pub fn propagate(
    ch: &PhysicalChannel,
    tx_signals: &[C64],
    noise: &NoiseModel,
    frame: u64,
) -> Result<Vec<C64>> {
    let mut y = ch.gains.matvec(tx_signals)?;
    for (yi, w) in y.iter_mut().zip(noise.sample(ch.gains.rows(), frame)) {
        *yi += w;
    }
    Ok(y)
}

/// Splits physical signals into logical slots (scaled by `1/L_v`) and
/// removes the inter-cell phase, returning `x̃_p` for every outer mode `p`.
pub fn tod_split_compensate(rx_signals: &[C64], rx: &Layout) -> Result<Vec<Vec<C64>>> {
    let logical = split(rx_signals, rx)?;
    let (n, v) = (rx.n_cells(), rx.elems_per_cell());
    let norm = 1.0 / (n as f64).sqrt();
    Ok((0..n)
        .map(|p| {
            (0..v)
                .map(|vi| {
                    (0..n)
                        .map(|m| {
                            logical[m * v + vi] * cis(-2.0 * PI * ((m * p) % n) as f64 / n as f64)
                        })
                        .sum::<C64>()
                        * norm
                })
                .collect()
        })
        .collect())
}

/// Matrix form of [`tod_split_compensate`]: `(W_N^H ⊗ I_V)` applied to the split signals.
pub fn tod_split_compensate_matrix(rx_signals: &[C64], rx: &Layout) -> Result<Vec<Vec<C64>>> {
    let logical = split(rx_signals, rx)?;
    let (n, v) = (rx.n_cells(), rx.elems_per_cell());
    let r = ComplexMatrix::from_row_major(n, v, logical)?;
    let x = idft_matrix(n)?.conj_transpose().matmul(&r)?;
    Ok((0..n).map(|p| x.row(p).to_vec()).collect())
}

fn split(rx_signals: &[C64], rx: &Layout) -> Result<Vec<C64>> {
    let (_, r) = superpose_operators(rx);
    let sizes = rx.group_sizes();
    let dup = r.spread(rx_signals)?;
    Ok(dup
        .iter()
        .zip(rx.slot_groups())
        .map(|(x, &g)| x / sizes[g] as f64)
        .collect())
}

/// `s̃_p = W^H L x̃_p`.
pub fn tod_inner_demodulate(x_p: &[C64], sharing: &SharingMatrix) -> Result<Vec<C64>> {
    if x_p.len() != sharing.len() {
        return Err(Error::InvalidArgument(format!(
            "{} samples for {} sharing entries",
            x_p.len(),
            sharing.len()
        )));
    }
    let scaled: Vec<C64> = x_p
        .iter()
        .zip(sharing.diag())
        .map(|(x, &l)| x * l as f64)
        .collect();
    idft_matrix(x_p.len())?.conj_transpose().matvec(&scaled)
}

/// Mode-wise ML decisions for one outer mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Chosen constellation index per mode.
    pub indices: Vec<usize>,
    /// Set where the effective gain is zero and the decision is the tie-break.
    pub degenerate: Vec<bool>,
}

/// Picks, per mode `l`, the point `s` minimising `|s̃(l) − g(l)·s|`, where
/// `g` is the effective gain (detection coefficient times amplitude).
/// Ties go to the lowest index.
pub fn ml_detect(
    received: &[C64],
    gains: &[C64],
    constellation: &Constellation,
) -> Result<Detection> {
    if received.len() != gains.len() {
        return Err(Error::InvalidArgument(format!(
            "{} samples for {} gains",
            received.len(),
            gains.len()
        )));
    }
    if gains
        .iter()
        .any(|g| !(g.re.is_finite() && g.im.is_finite()))
    {
        return Err(Error::InvalidArgument(
            "detection gains must be finite".into(),
        ));
    }
    let mut indices = Vec::with_capacity(received.len());
    let mut degenerate = Vec::with_capacity(received.len());
    for (r, g) in received.iter().zip(gains) {
        if *g == C64::new(0.0, 0.0) {
            indices.push(0);
            degenerate.push(true);
            continue;
        }
        let mut best = (0, f64::INFINITY);
        for (i, s) in constellation.points().iter().enumerate() {
            let d = (r - g * s).norm_sqr();
            if d < best.1 {
                best = (i, d);
            }
        }
        indices.push(best.0);
        degenerate.push(false);
    }
    Ok(Detection {
        indices,
        degenerate,
    })
}
