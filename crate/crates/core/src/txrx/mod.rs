//! Transceiver chain: two-dimensional mode modulation, propagation over the
//! physical elements, split/compensate/demodulate at the receiver and
//! mode-wise ML detection.

mod chain;
mod grid;

pub use chain::{
    ml_detect, propagate, tod_inner_demodulate, tod_split_compensate, tod_split_compensate_matrix,
    tom_logical, tom_logical_matrix, tom_modulate, Detection, NoiseModel, PhysicalChannel,
};
pub use grid::{mode_range, Constellation, PowerAlloc, SymbolGrid};

use crate::channel::{ApproxOptions, LambdaPath, Link};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

/// Per-mode power budget of one loopback frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDiagnostics {
    pub p: usize,
    pub l: usize,
    /// `|Λ|² P`.
    pub signal: f64,
    /// Power leaking in from the other inner modes of the same `p`.
    pub interference: f64,
    pub noise: f64,
    /// Signal over noise only.
    pub snr: f64,
    pub sinr: f64,
}

/// Outcome of one frame through the full chain.
#[derive(Debug, Clone)]
pub struct EndToEnd {
    /// Demodulated `s̃` in storage order.
    pub received: Vec<C64>,
    pub detected: Vec<usize>,
    pub detected_symbols: Vec<C64>,
    pub degenerate: Vec<bool>,
    pub symbol_errors: usize,
    pub modes: Vec<ModeDiagnostics>,
}

/// A link prepared for repeated frames.
#[derive(Debug, Clone)]
pub struct Transceiver {
    link: Link,
    physical: PhysicalChannel,
    lambda: ComplexMatrix,
    mode_channels: Vec<ComplexMatrix>,
    noise: NoiseModel,
    mode_noise: Vec<Vec<f64>>,
}

impl Transceiver {
    pub fn new(
        link: Link,
        lambda_path: LambdaPath,
        opts: &ApproxOptions,
        noise: NoiseModel,
    ) -> Result<Self> {
        let (k, v) = (link.tx().elems_per_cell(), link.rx().elems_per_cell());
        if k != v {
            return Err(Error::UnsupportedConfiguration(format!(
                "mode-wise detection needs K = V, got K={k}, V={v}"
            )));
        }
        let lambda = match lambda_path {
            LambdaPath::Exact => crate::channel::exact_lambda(&link.build_block_channel()?)?,
            LambdaPath::Bessel => link.detection_coeffs(lambda_path, opts)?.lambda,
        };
        let ch = link.build_block_channel()?;
        let mode_channels = (0..link.n_cells())
            .map(|p| ch.transformed(p))
            .collect::<Result<_>>()?;
        let mode_noise = noise.per_mode_variance(link.rx())?;
        Ok(Transceiver {
            physical: PhysicalChannel::new(&link)?,
            link,
            lambda,
            mode_channels,
            noise,
            mode_noise,
        })
    }

    pub fn link(&self) -> &Link {
        &self.link
    }

    pub fn lambda(&self) -> &ComplexMatrix {
        &self.lambda
    }

    /// Exact mode-domain channel `G_p`.
    pub fn mode_channel(&self, p: usize) -> &ComplexMatrix {
        &self.mode_channels[p]
    }

    pub fn mode_noise(&self) -> &[Vec<f64>] {
        &self.mode_noise
    }

    /// Runs modulate → propagate → split/compensate → demodulate → detect.
    pub fn run(
        &self,
        grid: &SymbolGrid,
        constellation: &Constellation,
        frame: u64,
    ) -> Result<EndToEnd> {
        let (n, k) = (grid.n_inter(), grid.n_inner());
        let x = tom_modulate(grid, self.link.tx())?;
        let y = propagate(&self.physical, &x, &self.noise, frame)?;
        let xt = tod_split_compensate(&y, self.link.rx())?;
        let sharing = self.link.sharing();
        let mut received = Vec::with_capacity(n * k);
        for xp in &xt {
            received.extend(tod_inner_demodulate(xp, sharing)?);
        }
        let mut detected = Vec::with_capacity(n * k);
        let mut degenerate = Vec::with_capacity(n * k);
        for p in 0..n {
            let gains: Vec<C64> = (0..k)
                .map(|l| self.lambda[(p, l)] * grid.powers()[p * k + l].sqrt())
                .collect();
            let d = ml_detect(&received[p * k..(p + 1) * k], &gains, constellation)?;
            detected.extend(d.indices);
            degenerate.extend(d.degenerate);
        }
        let detected_symbols: Vec<C64> = detected
            .iter()
            .map(|&i| constellation.points()[i])
            .collect();
        let symbol_errors = detected_symbols
            .iter()
            .zip(grid.data())
            .filter(|(a, b)| a != b)
            .count();
        let mut modes = Vec::with_capacity(n * k);
        for p in 0..n {
            let g = &self.mode_channels[p];
            for l in 0..k {
                let pw = grid.powers();
                let signal = self.lambda[(p, l)].norm_sqr() * pw[p * k + l];
                let interference: f64 = (0..k)
                    .filter(|&j| j != l)
                    .map(|j| g[(l, j)].norm_sqr() * pw[p * k + j])
                    .sum();
                let noise = self.mode_noise[p][l];
                let ratio = |den: f64| if signal == 0.0 { 0.0 } else { signal / den };
                modes.push(ModeDiagnostics {
                    p,
                    l,
                    signal,
                    interference,
                    noise,
                    snr: ratio(noise),
                    sinr: ratio(interference + noise),
                });
            }
        }
        Ok(EndToEnd {
            received,
            detected,
            detected_symbols,
            degenerate,
            symbol_errors,
            modes,
        })
    }
}

/// One-shot loopback of a single frame with exact detection coefficients.
pub fn end_to_end(
    link: &Link,
    grid: &SymbolGrid,
    constellation: &Constellation,
    noise: &NoiseModel,
    frame: u64,
) -> Result<EndToEnd> {
    Transceiver::new(
        link.clone(),
        LambdaPath::Exact,
        &ApproxOptions::default(),
        *noise,
    )?
    .run(grid, constellation, frame)
}
