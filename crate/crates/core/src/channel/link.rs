use std::f64::consts::PI;

use super::params::PropagationParams;
use crate::error::{Error, Result};
use crate::geometry::{sharing_matrix, Layout, SharingMatrix};
use crate::linalg::{cis, idft_matrix, BlockMatrix, ComplexMatrix, C64};

/// Which distance enters an element gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GainModel {
    /// Exact distance in amplitude and phase.
    #[default]
    Exact,
    /// `D` in the amplitude and the second-order expansion in the phase.
    Fresnel,
}

/// Second-order expansion terms for receive element `v` against transmit cell `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelTerms {
    /// Offset `w` from the transmit cell centre to the receive element, in
    /// the receive cell frame.
    pub w: C64,
    /// Amplitude `B = R_t |w| / D` of the cosine term.
    pub b: f64,
    /// Phase offset `α = φ_v - arg w`.
    pub alpha: f64,
    /// Set when `|w|` vanishes and `α` is undefined (reported as 0).
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxDistance {
    pub distance: f64,
    pub terms: FresnelTerms,
}

/// A transmit/receive QF-UCA pair facing each other across distance `D`,
/// both centred on the link axis.
#[derive(Debug, Clone)]
pub struct Link {
    tx: Layout,
    rx: Layout,
    params: PropagationParams,
    sharing: SharingMatrix,
}

impl Link {
    pub fn new(tx: Layout, rx: Layout, params: PropagationParams) -> Result<Self> {
        if tx.n_cells() != rx.n_cells() {
            return Err(Error::UnsupportedConfiguration(format!(
                "{} transmit cells vs {} receive cells",
                tx.n_cells(),
                rx.n_cells()
            )));
        }
        let sharing = sharing_matrix(&rx);
        Ok(Link {
            tx,
            rx,
            params,
            sharing,
        })
    }

    pub fn tx(&self) -> &Layout {
        &self.tx
    }

    pub fn rx(&self) -> &Layout {
        &self.rx
    }

    pub fn params(&self) -> &PropagationParams {
        &self.params
    }

    /// Receive-side sharing frequencies.
    pub fn sharing(&self) -> &SharingMatrix {
        &self.sharing
    }

    pub fn n_cells(&self) -> usize {
        self.tx.n_cells()
    }

    /// Same link at another distance.
    pub fn with_params(&self, params: PropagationParams) -> Self {
        Link {
            params,
            ..self.clone()
        }
    }

    /// Receive cell 0 centre minus transmit cell `q` centre, in cell 0's frame.
    pub fn centre_offset(&self, q: usize) -> C64 {
        let phi_q = 2.0 * PI * q as f64 / self.n_cells() as f64;
        C64::new(self.rx.qf_radius(), 0.0) - cis(phi_q) * self.tx.qf_radius()
    }

    fn check(&self, q: usize, v: usize, k: usize) -> Result<()> {
        if q >= self.n_cells() || v >= self.rx.elems_per_cell() || k >= self.tx.elems_per_cell() {
            return Err(Error::InvalidArgument(format!(
                "index (q={q}, v={v}, k={k}) out of range for N={}, V={}, K={}",
                self.n_cells(),
                self.rx.elems_per_cell(),
                self.tx.elems_per_cell()
            )));
        }
        Ok(())
    }

    /// Exact distance between receive slot `(m, v)` and transmit slot `(n, k)`.
    pub fn slot_distance(&self, m: usize, v: usize, n: usize, k: usize) -> Result<f64> {
        if m >= self.n_cells() || n >= self.n_cells() {
            return Err(Error::InvalidArgument(format!(
                "cell index out of range ({m}, {n})"
            )));
        }
        self.check(0, v, k)?;
        let r = self.rx.position(m, v);
        let t = self.tx.position(n, k);
        let d = self.params.distance();
        Ok((d * d + (r[0] - t[0]).powi(2) + (r[1] - t[1]).powi(2)).sqrt())
    }

    /// Exact distance for cell offset `q`, evaluated with `m = 0`, `n = q`.
    pub fn exact_distance(&self, q: usize, v: usize, k: usize) -> Result<f64> {
        self.check(q, v, k)?;
        self.slot_distance(0, v, q, k)
    }

    pub fn fresnel_terms(&self, q: usize, v: usize) -> Result<FresnelTerms> {
        self.check(q, v, 0)?;
        let phi_v = self.rx.elem_azimuth(v);
        let w = cis(phi_v) * self.rx.cell_radius() + self.centre_offset(q);
        let scale = self.rx.cell_radius().max(self.tx.qf_radius());
        let degenerate = w.norm() <= 1e-12 * scale;
        let alpha = if degenerate {
            0.0
        } else {
            wrap(phi_v - w.arg())
        };
        Ok(FresnelTerms {
            w,
            b: self.tx.cell_radius() * w.norm() / self.params.distance(),
            alpha,
            degenerate,
        })
    }

    /// Second-order (Fresnel) expansion of the distance.
    pub fn approx_distance(&self, q: usize, v: usize, k: usize) -> Result<ApproxDistance> {
        self.check(q, v, k)?;
        let t = self.fresnel_terms(q, v)?;
        let d = self.params.distance();
        let rt = self.tx.cell_radius();
        let phi_q = 2.0 * PI * q as f64 / self.n_cells() as f64;
        let phi_v = self.rx.elem_azimuth(v);
        let psi_k = self.tx.elem_azimuth(k);
        let distance = d + (t.w.norm_sqr() + rt * rt) / (2.0 * d)
            - t.b * (psi_k + phi_q + t.alpha - phi_v).cos();
        Ok(ApproxDistance { distance, terms: t })
    }

    /// Gain from transmit slot `(q, k)` to receive slot `(0, v)`, including
    /// the receive splitter factor `1/L_v`.
    pub fn element_gain(&self, q: usize, v: usize, k: usize, model: GainModel) -> Result<C64> {
        let lam = self.params.wavelength();
        let c = self.params.beta() * lam / (4.0 * PI) / self.sharing.diag()[v] as f64;
        match model {
            GainModel::Exact => {
                let d = self.exact_distance(q, v, k)?;
                free_space(c, d, lam)
            }
            GainModel::Fresnel => {
                let d = self.approx_distance(q, v, k)?.distance;
                Ok(cis(-2.0 * PI * phase_cycles(d, lam)) * (c / self.params.distance()))
            }
        }
    }

    /// Gain between arbitrary slots without the splitter factor.
    pub fn physical_gain(&self, m: usize, v: usize, n: usize, k: usize) -> Result<C64> {
        let lam = self.params.wavelength();
        let d = self.slot_distance(m, v, n, k)?;
        free_space(self.params.beta() * lam / (4.0 * PI), d, lam)
    }

    pub fn build_block_channel(&self) -> Result<BlockChannel> {
        self.build_block_channel_with(GainModel::Exact)
    }

    pub fn build_block_channel_with(&self, model: GainModel) -> Result<BlockChannel> {
        let (v, k) = (self.rx.elems_per_cell(), self.tx.elems_per_cell());
        let mut subchannels = Vec::with_capacity(self.n_cells());
        for q in 0..self.n_cells() {
            let mut h = ComplexMatrix::zeros(v, k);
            for vi in 0..v {
                for ki in 0..k {
                    h[(vi, ki)] = self.element_gain(q, vi, ki, model)?;
                }
            }
            subchannels.push(h);
        }
        Ok(BlockChannel {
            subchannels,
            sharing: self.sharing.as_f64(),
        })
    }
}

/// `e^{-j2πd/λ}` computed on the fractional number of wavelengths.
fn phase_cycles(d: f64, lam: f64) -> f64 {
    (d / lam).fract()
}

fn free_space(c: f64, d: f64, lam: f64) -> Result<C64> {
    if d <= 0.0 {
        return Err(Error::SingularGeometry(
            "colocated transmit and receive elements".into(),
        ));
    }
    Ok(cis(-2.0 * PI * phase_cycles(d, lam)) * (c / d))
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Per-offset subchannels `H_q` (`V x K`) of a block-circulant channel.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockChannel {
    subchannels: Vec<ComplexMatrix>,
    sharing: Vec<f64>,
}

impl BlockChannel {
    pub fn from_subchannels(
        subchannels: Vec<ComplexMatrix>,
        sharing: &SharingMatrix,
    ) -> Result<Self> {
        let first = subchannels
            .first()
            .ok_or_else(|| Error::InvalidDimension("need at least one subchannel".into()))?;
        let (v, k) = (first.rows(), first.cols());
        if subchannels.iter().any(|h| h.rows() != v || h.cols() != k) || sharing.len() != v {
            return Err(Error::InvalidDimension(
                "inconsistent subchannel shapes".into(),
            ));
        }
        Ok(BlockChannel {
            subchannels,
            sharing: sharing.as_f64(),
        })
    }

    pub fn n_cells(&self) -> usize {
        self.subchannels.len()
    }

    pub fn subchannels(&self) -> &[ComplexMatrix] {
        &self.subchannels
    }

    pub fn subchannel(&self, q: usize) -> &ComplexMatrix {
        &self.subchannels[q]
    }

    pub fn rx_elems(&self) -> usize {
        self.subchannels[0].rows()
    }

    pub fn tx_elems(&self) -> usize {
        self.subchannels[0].cols()
    }

    pub fn sharing(&self) -> &[f64] {
        &self.sharing
    }

    /// Block `(m, n)`, i.e. `H_q` with `q = (n - m) mod N`.
    pub fn block(&self, m: usize, n: usize) -> &ComplexMatrix {
        let nc = self.n_cells();
        &self.subchannels[(n + nc - m) % nc]
    }

    pub fn assembled(&self) -> BlockMatrix {
        let n = self.n_cells();
        BlockMatrix::from_fn(n, n, |m, c| self.block(m, c).clone())
            .expect("subchannels share one shape")
    }

    /// `Σ_q e^{j2πpq/N} H_q`.
    pub fn mode_block(&self, p: usize) -> ComplexMatrix {
        let n = self.n_cells();
        let mut acc = ComplexMatrix::zeros(self.rx_elems(), self.tx_elems());
        for (q, h) in self.subchannels.iter().enumerate() {
            let ph = cis(2.0 * PI * ((p * q) % n) as f64 / n as f64);
            acc = acc.add(&h.scale(ph)).expect("same shape");
        }
        acc
    }

    /// `W_V^H L X W_K` for a `V x K` matrix `X`.
    pub fn transform(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let wv = idft_matrix(self.rx_elems())?;
        let wk = idft_matrix(self.tx_elems())?;
        wv.conj_transpose()
            .matmul(&x.scale_rows(&self.sharing)?)?
            .matmul(&wk)
    }

    /// Mode-domain channel `G_p = W^H L 𝓗_p W` seen by outer mode `p`.
    pub fn transformed(&self, p: usize) -> Result<ComplexMatrix> {
        self.transform(&self.mode_block(p))
    }

    /// `W^H L H_q W`.
    pub fn transformed_subchannel(&self, q: usize) -> Result<ComplexMatrix> {
        self.transform(&self.subchannels[q])
    }
}
