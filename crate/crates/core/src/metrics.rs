//! Spectrum efficiency of QF-UCA links and their baselines, plus sweeps.

use std::io::Write;
use std::str::FromStr;

use crate::channel::{exact_lambda, GapScope, LambdaPath, Link, PropagationParams};
use crate::error::{Error, Result};
use crate::geometry::Layout;
use crate::linalg::ComplexMatrix;
use crate::scenario::{noise_variance_for_snr, Scenario};
use crate::txrx::{NoiseModel, PowerAlloc};

/// `Σ_{p,l} log2(1 + |Λ_{p,l}|² P_{p,l} / σ²_{p,l})`.
///
/// `powers` is in storage order (rows `p`), `mode_noise` is indexed `[p][l]`.
pub fn se_qf(lambda: &ComplexMatrix, powers: &[f64], mode_noise: &[Vec<f64>]) -> Result<f64> {
    let (n, k) = (lambda.rows(), lambda.cols());
    if powers.len() != n * k || mode_noise.len() != n || mode_noise.iter().any(|r| r.len() != k) {
        return Err(Error::InvalidDimension(format!(
            "SE inputs do not match a {n}x{k} coefficient grid"
        )));
    }
    let mut se = 0.0;
    for p in 0..n {
        for l in 0..k {
            let signal = lambda[(p, l)].norm_sqr() * powers[p * k + l];
            let noise = mode_noise[p][l];
            if signal == 0.0 {
                continue;
            }
            if noise == 0.0 {
                return Err(Error::InfiniteSe(format!(
                    "mode ({p}, {l}) has signal but no noise"
                )));
            }
            se += (1.0 + signal / noise).log2();
        }
    }
    Ok(se)
}

/// Power budget shared by every system in a comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub params: PropagationParams,
    pub total_power: f64,
    pub noise_variance: f64,
}

/// SE of a link with exact detection coefficients and equal power per mode.
pub fn se_link(link: &Link, budget: &Budget, alloc: &PowerAlloc) -> Result<f64> {
    let lambda = match link.rx().elems_per_cell() == link.tx().elems_per_cell() {
        true => exact_lambda(&link.build_block_channel()?)?,
        false => {
            return Err(Error::UnsupportedConfiguration(
                "spectrum efficiency needs matching element counts".into(),
            ))
        }
    };
    let powers = alloc.powers(lambda.rows() * lambda.cols(), budget.total_power)?;
    let noise = NoiseModel::new(budget.noise_variance, 0)?.per_mode_variance(link.rx())?;
    se_qf(&lambda, &powers, &noise)
}

/// SE of a single ring of `n_elements` elements at `radius` on both ends.
pub fn se_single_loop_uca(n_elements: usize, radius: f64, budget: &Budget) -> Result<f64> {
    let ring = Layout::single_ring(n_elements, radius)?;
    let link = Link::new(ring.clone(), ring, budget.params)?;
    se_link(&link, budget, &PowerAlloc::Equal)
}

/// `n` independent single-antenna links at linear SNR `snr`.
pub fn se_siso_times(n: usize, snr: f64) -> f64 {
    n as f64 * (1.0 + snr).log2()
}

pub fn se_gain(se_a: f64, se_b: f64) -> Result<f64> {
    if se_b == 0.0 {
        return Err(Error::Domain("SE gain against a zero baseline".into()));
    }
    Ok(se_a / se_b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    SnrDb,
    DistanceM,
    FreqHz,
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "snr_db" => Ok(SweepAxis::SnrDb),
            "distance_m" => Ok(SweepAxis::DistanceM),
            "freq_hz" => Ok(SweepAxis::FreqHz),
            other => Err(Error::InvalidArgument(format!(
                "unknown sweep axis '{other}'"
            ))),
        }
    }
}

/// A system evaluated in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    /// The scenario's QF-UCA.
    QfUca,
    /// Single ring with as many elements as the QF-UCA has physically.
    UcaN,
    /// Single ring with one element per logical slot (`N K`).
    UcaBigger,
    /// `n` parallel single-antenna links; `None` means one per physical element.
    SisoTimes(Option<usize>),
}

impl FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "qf_uca" => Ok(SystemKind::QfUca),
            "uca_n" => Ok(SystemKind::UcaN),
            "uca_bigger" => Ok(SystemKind::UcaBigger),
            "siso_xN" | "siso_xn" => Ok(SystemKind::SisoTimes(None)),
            _ => match s.strip_prefix("siso_x").map(str::parse::<usize>) {
                Some(Ok(n)) if n >= 1 => Ok(SystemKind::SisoTimes(Some(n))),
                _ => Err(Error::InvalidArgument(format!("unknown system '{s}'"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    /// Everything not swept. Noise power is fixed by this scenario unless
    /// the SNR itself is swept.
    pub base: Scenario,
    pub systems: Vec<SystemKind>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub system: String,
    pub se: f64,
    /// Approximation gap for QF-UCA rows.
    pub aux: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["axis", "system", "se_bps_hz", "aux"])?;
        for r in &self.rows {
            w.write_record([
                r.axis_value.to_string(),
                r.system.clone(),
                r.se.to_string(),
                r.aux.map(|x| x.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// SE values of one system in axis order.
    pub fn series(&self, system: &str) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.system == system)
            .map(|r| (r.axis_value, r.se))
            .collect()
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    if spec
        .values
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::InvalidArgument(
            "sweep values must be strictly increasing".into(),
        ));
    }
    let base_noise = spec.base.noise_variance()?;
    let mut rows = Vec::new();
    for &x in &spec.values {
        let mut sc = spec.base.clone();
        match spec.axis {
            SweepAxis::SnrDb => sc.snr_db = x,
            SweepAxis::DistanceM => sc.distance_m = x,
            SweepAxis::FreqHz => sc.freq_hz = x,
        }
        let params = sc.params()?;
        let noise_variance = match spec.axis {
            SweepAxis::SnrDb => sc.noise_variance()?,
            _ => base_noise,
        };
        let budget = Budget {
            params,
            total_power: sc.total_power,
            noise_variance,
        };
        let link = sc.link()?;
        let n_phys = link.tx().n_physical();
        let n_logical = link.tx().n_slots();
        for sys in &spec.systems {
            let (label, se, aux) = match *sys {
                SystemKind::QfUca => {
                    let se = se_link(&link, &budget, &sc.power_alloc)?;
                    let eps = match link.approx_gap(GapScope::Total, &sc.approx_options()) {
                        Ok(e) => Some(e),
                        Err(Error::UnsupportedConfiguration(_)) => None,
                        Err(e) => return Err(e),
                    };
                    ("qf_uca".to_string(), se, eps)
                }
                SystemKind::UcaN => (
                    format!("uca_{n_phys}"),
                    se_single_loop_uca(n_phys, sc.qf_radius_m, &budget)?,
                    None,
                ),
                SystemKind::UcaBigger => (
                    format!("uca_{n_logical}"),
                    se_single_loop_uca(n_logical, sc.qf_radius_m, &budget)?,
                    None,
                ),
                SystemKind::SisoTimes(n) => {
                    let n = n.unwrap_or(n_phys);
                    let snr = budget.total_power * params.far_field_gain().powi(2)
                        / budget.noise_variance;
                    (format!("siso_x{n}"), se_siso_times(n, snr), None)
                }
            };
            rows.push(SweepRow {
                axis_value: x,
                system: label,
                se,
                aux,
            });
        }
    }
    rows.sort_by(|a, b| {
        a.axis_value
            .total_cmp(&b.axis_value)
            .then_with(|| a.system.cmp(&b.system))
    });
    rows.dedup_by(|a, b| a.axis_value == b.axis_value && a.system == b.system);
    Ok(SweepResult { rows })
}

/// Exact detection coefficients for a scenario, honouring its coefficient path.
pub fn scenario_lambda(sc: &Scenario) -> Result<ComplexMatrix> {
    let link = sc.link()?;
    match sc.lambda_path {
        LambdaPath::Exact => exact_lambda(&link.build_block_channel()?),
        LambdaPath::Bessel => Ok(link
            .detection_coeffs(LambdaPath::Bessel, &sc.approx_options())?
            .lambda),
    }
}

/// Budget of a scenario at its own SNR.
pub fn scenario_budget(sc: &Scenario) -> Result<Budget> {
    let params = sc.params()?;
    Ok(Budget {
        params,
        total_power: sc.total_power,
        noise_variance: noise_variance_for_snr(sc.total_power, &params, sc.snr_db),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    fn one_mode(snr: f64) -> (ComplexMatrix, Vec<f64>, Vec<Vec<f64>>) {
        let mut l = ComplexMatrix::zeros(2, 2);
        l[(0, 1)] = C64::new(snr.sqrt(), 0.0);
        (l, vec![1.0; 4], vec![vec![1.0; 2]; 2])
    }

    #[test]
    fn se_trivial_values() {
        let (l, p, n) = one_mode(0.0);
        assert_eq!(se_qf(&l, &p, &n).unwrap(), 0.0);
        let (l, p, n) = one_mode(3.0);
        assert!((se_qf(&l, &p, &n).unwrap() - 2.0).abs() < 1e-12);
        let (l, p, _) = one_mode(3.0);
        assert!(matches!(
            se_qf(&l, &p, &vec![vec![0.0; 2]; 2]),
            Err(Error::InfiniteSe(_))
        ));
        assert!(se_qf(&l, &p[..3], &vec![vec![1.0; 2]; 2]).is_err());
    }

    #[test]
    fn siso_and_gain() {
        assert_eq!(se_siso_times(9, 0.0), 0.0);
        assert_eq!(se_siso_times(9, 1.0), 9.0);
        let snr = 10f64.powf(1.5);
        assert!((se_siso_times(25, snr) - 25.0 * (1.0 + snr).log2()).abs() < 1e-12);
        assert_eq!(se_gain(3.0, 3.0).unwrap(), 1.0);
        assert_eq!(se_gain(4.0, 2.0).unwrap(), 2.0);
        assert!(matches!(se_gain(1.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn single_ring_equals_general_formula() {
        let sc = Scenario::default();
        let budget = scenario_budget(&sc).unwrap();
        let ring = Layout::single_ring(9, 1.0).unwrap();
        let link = Link::new(ring.clone(), ring, budget.params).unwrap();
        let lambda = exact_lambda(&link.build_block_channel().unwrap()).unwrap();
        let noise = NoiseModel::new(budget.noise_variance, 0)
            .unwrap()
            .per_mode_variance(link.rx())
            .unwrap();
        let direct = se_qf(&lambda, &vec![1.0 / 9.0; 9], &noise).unwrap();
        assert_eq!(se_single_loop_uca(9, 1.0, &budget).unwrap(), direct);
    }

    #[test]
    fn system_labels() {
        assert_eq!(
            "siso_x9".parse::<SystemKind>().unwrap(),
            SystemKind::SisoTimes(Some(9))
        );
        assert_eq!(
            "siso_xN".parse::<SystemKind>().unwrap(),
            SystemKind::SisoTimes(None)
        );
        assert!("siso_x0".parse::<SystemKind>().is_err());
        assert!("mimo".parse::<SystemKind>().is_err());
        assert!("time".parse::<SweepAxis>().is_err());
    }

    #[test]
    fn empty_sweep() {
        let spec = SweepSpec {
            axis: SweepAxis::SnrDb,
            values: vec![],
            base: Scenario::default(),
            systems: vec![SystemKind::QfUca],
        };
        assert!(run_sweep(&spec).unwrap().rows.is_empty());
        let bad = SweepSpec {
            values: vec![2.0, 1.0],
            ..spec
        };
        assert!(run_sweep(&bad).is_err());
    }
}
