//! Flat `key = value` scenario files.
//!
//! Unknown keys are rejected, missing keys take the defaults below, `#`
//! starts a comment. Every error names the offending line.
//!
//! | key | default | meaning |
//! |---|---|---|
//! | `n_cells` | 4 | cells per array (same at both ends) |
//! | `tx_elems`, `rx_elems` | 4 | elements per cell |
//! | `tx_ratio`, `rx_ratio` | 1 | cell radius over array radius, in (0, 1] |
//! | `qf_radius_m` | 1 | array radius, shared by both ends |
//! | `distance_m` | 100 | link distance |
//! | `freq_hz` | 5.8e9 | carrier |
//! | `beta` | 1 | path-loss constant |
//! | `constellation` | qpsk | `bpsk`, `qpsk` or `qam16` |
//! | `total_power` | 1 | transmit power over all modes |
//! | `snr_db` | 15 | `P (βλ/4πD)² / σ²` |
//! | `seed` | 0 | noise seed |
//! | `lambda_path` | exact | `exact` or `bessel` detection coefficients |
//! | `gap_correction` | true | numerically averaged Fresnel residual in the approximation |
//! | `bessel_order` | l | `l` or `one` |
//! | `power_alloc` | equal | `equal` or comma-separated weights |

use std::fmt::Write as _;

use crate::channel::{ApproxOptions, BesselOrder, LambdaPath, Link, PropagationParams};
use crate::error::{Error, Result};
use crate::geometry::{build_layout, Layout};
use crate::txrx::{Constellation, NoiseModel, PowerAlloc};

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub n_cells: usize,
    pub tx_elems: usize,
    pub rx_elems: usize,
    pub tx_ratio: f64,
    pub rx_ratio: f64,
    pub qf_radius_m: f64,
    pub distance_m: f64,
    pub freq_hz: f64,
    pub beta: f64,
    pub constellation: String,
    pub total_power: f64,
    pub snr_db: f64,
    pub seed: u64,
    pub lambda_path: LambdaPath,
    pub gap_correction: bool,
    pub bessel_order: BesselOrder,
    pub power_alloc: PowerAlloc,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            n_cells: 4,
            tx_elems: 4,
            rx_elems: 4,
            tx_ratio: 1.0,
            rx_ratio: 1.0,
            qf_radius_m: 1.0,
            distance_m: 100.0,
            freq_hz: 5.8e9,
            beta: 1.0,
            constellation: "qpsk".into(),
            total_power: 1.0,
            snr_db: 15.0,
            seed: 0,
            lambda_path: LambdaPath::Exact,
            gap_correction: true,
            bessel_order: BesselOrder::ModeIndex,
            power_alloc: PowerAlloc::Equal,
        }
    }
}

fn positive(v: f64) -> std::result::Result<f64, String> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>()
        .map_err(|_| format!("'{s}' is not a number"))
}

fn parse_count(s: &str, min: usize) -> std::result::Result<usize, String> {
    let v = s
        .parse::<usize>()
        .map_err(|_| format!("'{s}' is not a whole number"))?;
    if v < min {
        return Err(format!("must be at least {min}, got {v}"));
    }
    Ok(v)
}

fn parse_ratio(s: &str) -> std::result::Result<f64, String> {
    let v = positive(parse_f64(s)?)?;
    if v > 1.0 {
        return Err(format!("must not exceed 1, got {v}"));
    }
    Ok(v)
}

impl Scenario {
    /// Parses scenario text, filling unspecified keys with defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut sc = Scenario::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line, message };
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| err(format!("expected 'key = value', got '{body}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(err(format!("duplicate key '{key}'")));
            }
            sc.set(key, value).map_err(|m| err(format!("{key}: {m}")))?;
        }
        Ok(sc)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "n_cells" => self.n_cells = parse_count(value, 3)?,
            "tx_elems" => self.tx_elems = parse_count(value, 1)?,
            "rx_elems" => self.rx_elems = parse_count(value, 1)?,
            "tx_ratio" => self.tx_ratio = parse_ratio(value)?,
            "rx_ratio" => self.rx_ratio = parse_ratio(value)?,
            "qf_radius_m" => self.qf_radius_m = positive(parse_f64(value)?)?,
            "distance_m" => self.distance_m = positive(parse_f64(value)?)?,
            "freq_hz" => self.freq_hz = positive(parse_f64(value)?)?,
            "beta" => self.beta = positive(parse_f64(value)?)?,
            "constellation" => {
                let c: Constellation = value.parse().map_err(|e: Error| e.to_string())?;
                self.constellation = c.name().to_string();
            }
            "total_power" => {
                let v = parse_f64(value)?;
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(format!("must be non-negative, got {v}"));
                }
                self.total_power = v;
            }
            "snr_db" => {
                let v = parse_f64(value)?;
                if !v.is_finite() {
                    return Err("must be finite".into());
                }
                self.snr_db = v;
            }
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| format!("'{value}' is not a u64"))?
            }
            "lambda_path" => {
                self.lambda_path = match value.to_ascii_lowercase().as_str() {
                    "exact" => LambdaPath::Exact,
                    "bessel" => LambdaPath::Bessel,
                    _ => return Err(format!("expected 'exact' or 'bessel', got '{value}'")),
                }
            }
            "gap_correction" => {
                self.gap_correction = value
                    .parse()
                    .map_err(|_| format!("expected true or false, got '{value}'"))?
            }
            "bessel_order" => {
                self.bessel_order = match value.to_ascii_lowercase().as_str() {
                    "l" => BesselOrder::ModeIndex,
                    "one" | "1" => BesselOrder::First,
                    _ => return Err(format!("expected 'l' or 'one', got '{value}'")),
                }
            }
            "power_alloc" => {
                self.power_alloc = if value.eq_ignore_ascii_case("equal") {
                    PowerAlloc::Equal
                } else {
                    let w = value
                        .split(',')
                        .map(|x| parse_f64(x.trim()))
                        .collect::<std::result::Result<Vec<_>, _>>()?;
                    if w.iter().any(|x| !(*x >= 0.0 && x.is_finite()))
                        || w.iter().sum::<f64>() == 0.0
                    {
                        return Err("weights must be non-negative and not all zero".into());
                    }
                    PowerAlloc::Weights(w)
                }
            }
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Writes every key, so the result reparses to the same scenario.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n_cells = {}", self.n_cells);
        let _ = writeln!(s, "tx_elems = {}", self.tx_elems);
        let _ = writeln!(s, "rx_elems = {}", self.rx_elems);
        let _ = writeln!(s, "tx_ratio = {}", self.tx_ratio);
        let _ = writeln!(s, "rx_ratio = {}", self.rx_ratio);
        let _ = writeln!(s, "qf_radius_m = {}", self.qf_radius_m);
        let _ = writeln!(s, "distance_m = {}", self.distance_m);
        let _ = writeln!(s, "freq_hz = {}", self.freq_hz);
        let _ = writeln!(s, "beta = {}", self.beta);
        let _ = writeln!(s, "constellation = {}", self.constellation);
        let _ = writeln!(s, "total_power = {}", self.total_power);
        let _ = writeln!(s, "snr_db = {}", self.snr_db);
        let _ = writeln!(s, "seed = {}", self.seed);
        let path = match self.lambda_path {
            LambdaPath::Exact => "exact",
            LambdaPath::Bessel => "bessel",
        };
        let _ = writeln!(s, "lambda_path = {path}");
        let _ = writeln!(s, "gap_correction = {}", self.gap_correction);
        let order = match self.bessel_order {
            BesselOrder::ModeIndex => "l",
            BesselOrder::First => "one",
        };
        let _ = writeln!(s, "bessel_order = {order}");
        let alloc = match &self.power_alloc {
            PowerAlloc::Equal => "equal".to_string(),
            PowerAlloc::Weights(w) => w
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(","),
        };
        let _ = writeln!(s, "power_alloc = {alloc}");
        s
    }

    pub fn tx_layout(&self) -> Result<Layout> {
        build_layout(self.n_cells, self.tx_elems, self.tx_ratio, self.qf_radius_m)
    }

    pub fn rx_layout(&self) -> Result<Layout> {
        build_layout(self.n_cells, self.rx_elems, self.rx_ratio, self.qf_radius_m)
    }

    pub fn params(&self) -> Result<PropagationParams> {
        PropagationParams::from_frequency(self.distance_m, self.freq_hz, self.beta)
    }

    pub fn link(&self) -> Result<Link> {
        Link::new(self.tx_layout()?, self.rx_layout()?, self.params()?)
    }

    pub fn constellation(&self) -> Result<Constellation> {
        self.constellation.parse()
    }

    pub fn approx_options(&self) -> ApproxOptions {
        ApproxOptions {
            correction: self.gap_correction,
            order: self.bessel_order,
            ..ApproxOptions::default()
        }
    }

    /// Per-element noise variance implied by `snr_db` at this scenario's
    /// distance and carrier.
    pub fn noise_variance(&self) -> Result<f64> {
        Ok(noise_variance_for_snr(
            self.total_power,
            &self.params()?,
            self.snr_db,
        ))
    }

    pub fn noise(&self) -> Result<NoiseModel> {
        NoiseModel::new(self.noise_variance()?, self.seed)
    }
}

/// `σ² = P (βλ/4πD)² / SNR`, so a single antenna pair sees exactly `SNR`.
pub fn noise_variance_for_snr(total_power: f64, params: &PropagationParams, snr_db: f64) -> f64 {
    total_power * params.far_field_gain().powi(2) / 10f64.powf(snr_db / 10.0)
}
