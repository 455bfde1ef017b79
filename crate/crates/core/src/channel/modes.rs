use std::f64::consts::PI;

use super::link::{GainModel, Link};
use crate::error::{Error, Result};
use crate::linalg::{bessel_j, cis, ComplexMatrix, C64};

/// Bessel order used in the diagonal approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BesselOrder {
    /// `J_l` for mode `l`.
    #[default]
    ModeIndex,
    /// `J_1` for every mode.
    First,
}

/// Knobs of the diagonal (Bessel) approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxOptions {
    /// Average the residual Fresnel phase over the receive ring numerically
    /// instead of keeping only its leading term.
    pub correction: bool,
    pub order: BesselOrder,
    /// Quadrature nodes for the ring average.
    pub nodes: usize,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions {
            correction: true,
            order: BesselOrder::ModeIndex,
            nodes: 4096,
        }
    }
}

/// How an equivalent mode gain is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GainPath {
    /// Direct sum over transmit elements of the exact element gains.
    #[default]
    Exact,
    /// Closed form with a Bessel factor per receive element.
    Bessel,
    /// Closed form with one Bessel argument per cell offset.
    BesselCellAveraged,
}

/// Source of the per-mode detection coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LambdaPath {
    /// Diagonal of the exact mode-domain channel.
    #[default]
    Exact,
    /// Sum of the diagonal approximation blocks.
    Bessel,
}

/// Gap scope between the mode-domain channel and its diagonal approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapScope {
    /// All outer modes together.
    Total,
    /// One outer mode `p`.
    Mode(usize),
    /// One offset block `(p, q)`.
    Block(usize, usize),
}

/// Per-mode detection coefficients and approximation diagnostics.
#[derive(Debug, Clone)]
pub struct ModeChannel {
    /// `Λ_{p,l}`, rows `p`, columns `l` (storage order).
    pub lambda: ComplexMatrix,
    /// Diagonal approximation blocks, indexed `[p][q]`.
    pub approx_blocks: Vec<Vec<ComplexMatrix>>,
    /// Gap per outer mode `p`.
    pub gap: Vec<f64>,
    /// Gap over all outer modes.
    pub total_gap: f64,
}

/// Signed mode index for storage index `li` of a `k`-point transform.
pub fn signed_mode(li: usize, k: usize) -> i64 {
    if li <= k / 2 {
        li as i64
    } else {
        li as i64 - k as i64
    }
}

fn j_pow(l: i64) -> C64 {
    cis(PI / 2.0 * l.rem_euclid(4) as f64)
}

impl Link {
    fn offset_angle(&self, q: usize) -> f64 {
        2.0 * PI * q as f64 / self.n_cells() as f64
    }

    /// `e^{j2π qp/N}` with the product reduced modulo `N`.
    fn inter_phase(&self, q: usize, p: i64) -> C64 {
        let n = self.n_cells() as i64;
        cis(2.0 * PI * (q as i64 * p).rem_euclid(n) as f64 / n as f64)
    }

    /// `(βλ/4πD) e^{-j2π(D + R_t²/2D)/λ}`.
    fn far_field_constant(&self) -> C64 {
        let p = self.params();
        let d = p.distance();
        let rt = self.tx().cell_radius();
        let cycles = (d / p.wavelength()).fract() + rt * rt / (2.0 * d * p.wavelength());
        cis(-2.0 * PI * cycles) * p.far_field_gain()
    }

    /// Gain from transmit mode `(p, l)` into receive element `(m, v)`.
    pub fn equivalent_mode_gain(
        &self,
        m: usize,
        p: i64,
        v: usize,
        l: i64,
        path: GainPath,
    ) -> Result<C64> {
        let n = self.n_cells();
        let k = self.tx().elems_per_cell();
        if m >= n || v >= self.rx().elems_per_cell() {
            return Err(Error::InvalidArgument(format!(
                "receive slot ({m}, {v}) out of range"
            )));
        }
        let mut acc = C64::new(0.0, 0.0);
        for q in 0..n {
            let phi_q = self.offset_angle(q);
            let inner = match path {
                GainPath::Exact => {
                    let mut s = C64::new(0.0, 0.0);
                    for ki in 0..k {
                        let ph =
                            2.0 * PI * ((ki as i64 * l).rem_euclid(k as i64)) as f64 / k as f64;
                        s += cis(ph) * self.element_gain(q, v, ki, GainModel::Exact)?;
                    }
                    s
                }
                GainPath::Bessel | GainPath::BesselCellAveraged => {
                    let t = self.fresnel_terms(q, v)?;
                    let lam = self.params().wavelength();
                    let d = self.params().distance();
                    let rt = self.tx().cell_radius();
                    let arg = match path {
                        GainPath::Bessel => 2.0 * PI * t.b / lam,
                        _ => 2.0 * PI * rt * self.mean_offset_radius(q) / (lam * d),
                    };
                    let phi_v = self.rx().elem_azimuth(v);
                    let lf = l as f64;
                    k as f64
                        * j_pow(l)
                        * bessel_j(bessel_order(l)?, arg)?
                        * cis(-lf * (phi_q + t.alpha - phi_v) - lf * self.tx().elem_phase())
                        * self.far_field_constant()
                        * cis(-PI * t.w.norm_sqr() / (lam * d))
                        / self.sharing().diag()[v] as f64
                }
            };
            acc += self.inter_phase(q, p) * inner;
        }
        Ok(acc * self.inter_phase(m, p) / ((k * n) as f64).sqrt())
    }

    /// RMS over the receive ring of the offset from transmit cell `q`'s centre.
    fn mean_offset_radius(&self, q: usize) -> f64 {
        let r = self.rx().cell_radius();
        (self.centre_offset(q).norm_sqr() + r * r).sqrt()
    }

    /// Diagonal approximation `H̃_{p,q}` of `e^{j2πpq/N} W^H L H_q W`.
    pub fn diag_approx_block(
        &self,
        p: usize,
        q: usize,
        opts: &ApproxOptions,
    ) -> Result<ComplexMatrix> {
        let n = self.n_cells();
        let k = self.tx().elems_per_cell();
        let v = self.rx().elems_per_cell();
        if k != v {
            return Err(Error::UnsupportedConfiguration(format!(
                "diagonal approximation needs K = V, got K={k}, V={v}"
            )));
        }
        if q >= n || p >= n {
            return Err(Error::InvalidArgument(format!(
                "offset ({p}, {q}) out of range"
            )));
        }
        if opts.nodes == 0 {
            return Err(Error::InvalidArgument(
                "quadrature needs at least one node".into(),
            ));
        }
        let lam = self.params().wavelength();
        let d = self.params().distance();
        let rt = self.tx().cell_radius();
        let rr = self.rx().cell_radius();
        let s = self.centre_offset(q);
        let phi_q = self.offset_angle(q);
        let arg = 2.0 * PI * rt * self.mean_offset_radius(q) / (lam * d);
        let lead = self.far_field_constant() * ((k * v) as f64).sqrt() * cis(phi_q * p as f64);
        let shift = self.tx().elem_phase() + phi_q - self.rx().elem_phase();

        // Ring samples of the residual Fresnel phase and the local angle offset.
        let ring: Vec<(C64, f64)> = if opts.correction {
            (0..opts.nodes)
                .map(|i| {
                    let phi = 2.0 * PI * i as f64 / opts.nodes as f64;
                    let w = cis(phi) * rr + s;
                    (cis(-PI * w.norm_sqr() / (lam * d)), phi - w.arg())
                })
                .collect()
        } else {
            Vec::new()
        };
        let o_r = self.rx().elem_phase();
        let w0 = cis(o_r) * rr + s;
        let alpha0 = if w0.norm() > 0.0 { o_r - w0.arg() } else { 0.0 };
        let leading = cis(-PI * (s.norm_sqr() + rr * rr) / (lam * d))
            * bessel_j(0, 2.0 * PI * rr * s.norm() / (lam * d))?;

        let mut out = ComplexMatrix::zeros(k, k);
        for li in 0..k {
            let l = signed_mode(li, k);
            let lf = l as f64;
            let avg = if opts.correction {
                ring.iter().map(|(a, al)| a * cis(-lf * al)).sum::<C64>() / opts.nodes as f64
            } else {
                leading * cis(-alpha0 * lf)
            };
            let order = match opts.order {
                BesselOrder::ModeIndex => bessel_order(l)?,
                BesselOrder::First => 1,
            };
            out[(li, li)] = lead * j_pow(l) * bessel_j(order, arg)? * cis(-lf * shift) * avg;
        }
        Ok(out)
    }

    /// `Σ_q H̃_{p,q}`, the approximation of the mode-domain channel `G_p`.
    pub fn diag_approx_mode(&self, p: usize, opts: &ApproxOptions) -> Result<ComplexMatrix> {
        let mut acc = self.diag_approx_block(p, 0, opts)?;
        for q in 1..self.n_cells() {
            acc = acc.add(&self.diag_approx_block(p, q, opts)?)?;
        }
        Ok(acc)
    }

    /// Relative squared-Frobenius gap between the exact mode-domain channel
    /// and its diagonal approximation.
    pub fn approx_gap(&self, scope: GapScope, opts: &ApproxOptions) -> Result<f64> {
        let ch = self.build_block_channel()?;
        let n = self.n_cells();
        let (num, den) = match scope {
            GapScope::Total => {
                let mut num = 0.0;
                let mut den = 0.0;
                for q in 0..n {
                    let g = ch.transformed_subchannel(q)?;
                    num += g.sub(&self.diag_approx_block(0, q, opts)?)?.frobenius_sqr();
                    den += g.frobenius_sqr();
                }
                (num, den)
            }
            GapScope::Mode(p) => {
                if p >= n {
                    return Err(Error::InvalidArgument(format!("mode {p} out of range")));
                }
                let g = ch.transformed(p)?;
                (
                    g.sub(&self.diag_approx_mode(p, opts)?)?.frobenius_sqr(),
                    g.frobenius_sqr(),
                )
            }
            GapScope::Block(p, q) => {
                if p >= n || q >= n {
                    return Err(Error::InvalidArgument(format!(
                        "block ({p}, {q}) out of range"
                    )));
                }
                let ph = cis(2.0 * PI * ((p * q) % n) as f64 / n as f64);
                let g = ch.transformed_subchannel(q)?.scale(ph);
                (
                    g.sub(&self.diag_approx_block(p, q, opts)?)?.frobenius_sqr(),
                    g.frobenius_sqr(),
                )
            }
        };
        relative_gap(num, den)
    }

    /// Detection coefficients `Λ_{p,l}` with approximation diagnostics.
    pub fn detection_coeffs(&self, path: LambdaPath, opts: &ApproxOptions) -> Result<ModeChannel> {
        let ch = self.build_block_channel()?;
        let n = self.n_cells();
        let k = self.tx().elems_per_cell();
        let mut lambda = ComplexMatrix::zeros(n, k);
        let mut approx_blocks = Vec::with_capacity(n);
        let mut gap = Vec::with_capacity(n);
        let (mut num, mut den) = (0.0, 0.0);
        for p in 0..n {
            let blocks: Vec<ComplexMatrix> = (0..n)
                .map(|q| self.diag_approx_block(p, q, opts))
                .collect::<Result<_>>()?;
            let mut approx = blocks[0].clone();
            for b in &blocks[1..] {
                approx = approx.add(b)?;
            }
            let g = ch.transformed(p)?;
            let e = g.sub(&approx)?.frobenius_sqr();
            num += e;
            den += g.frobenius_sqr();
            gap.push(relative_gap(e, g.frobenius_sqr())?);
            let source = match path {
                LambdaPath::Exact => &g,
                LambdaPath::Bessel => &approx,
            };
            for li in 0..k {
                lambda[(p, li)] = source[(li, li)];
            }
            approx_blocks.push(blocks);
        }
        Ok(ModeChannel {
            lambda,
            approx_blocks,
            gap,
            total_gap: relative_gap(num, den)?,
        })
    }
}

fn bessel_order(l: i64) -> Result<i32> {
    i32::try_from(l).map_err(|_| Error::Domain(format!("mode {l} too large for a Bessel order")))
}

fn relative_gap(num: f64, den: f64) -> Result<f64> {
    if den == 0.0 {
        return Err(Error::DegenerateChannel(
            "mode-domain channel is identically zero".into(),
        ));
    }
    Ok(num / den)
}

/// Exact detection coefficients `Λ_{p,l} = G_p(l, l)` straight from a block channel.
pub fn exact_lambda(ch: &super::BlockChannel) -> Result<ComplexMatrix> {
    let n = ch.n_cells();
    let k = ch.tx_elems().min(ch.rx_elems());
    let mut out = ComplexMatrix::zeros(n, k);
    for p in 0..n {
        let g = ch.transformed(p)?;
        for l in 0..k {
            out[(p, l)] = g[(l, l)];
        }
    }
    Ok(out)
}

/// `‖exact − approx‖²_F / ‖exact‖²_F`.
pub fn matrix_gap(exact: &ComplexMatrix, approx: &ComplexMatrix) -> Result<f64> {
    relative_gap(exact.sub(approx)?.frobenius_sqr(), exact.frobenius_sqr())
}
