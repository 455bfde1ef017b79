use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Finite symbol alphabet with unit mean energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    name: String,
    points: Vec<C64>,
}

impl Constellation {
    pub fn bpsk() -> Self {
        Constellation {
            name: "bpsk".into(),
            points: vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)],
        }
    }

    pub fn qpsk() -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        Constellation {
            name: "qpsk".into(),
            points: vec![
                C64::new(a, a),
                C64::new(-a, a),
                C64::new(-a, -a),
                C64::new(a, -a),
            ],
        }
    }

    pub fn qam16() -> Self {
        let s = 1.0 / 10f64.sqrt();
        let levels = [-3.0, -1.0, 1.0, 3.0];
        let points = levels
            .iter()
            .flat_map(|&i| levels.iter().map(move |&q| C64::new(i * s, q * s)))
            .collect();
        Constellation {
            name: "qam16".into(),
            points,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mean_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    /// Smallest distance between two distinct points.
    pub fn min_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                best = best.min((a - b).norm());
            }
        }
        best
    }
}

impl Default for Constellation {
    fn default() -> Self {
        Self::qpsk()
    }
}

impl FromStr for Constellation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bpsk" => Ok(Self::bpsk()),
            "qpsk" => Ok(Self::qpsk()),
            "qam16" | "16qam" | "16-qam" => Ok(Self::qam16()),
            other => Err(Error::InvalidArgument(format!(
                "unknown constellation '{other}'"
            ))),
        }
    }
}

/// How total transmit power is split across the `N x K` modes.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum PowerAlloc {
    #[default]
    Equal,
    /// Relative weights in storage order, normalised to the total.
    Weights(Vec<f64>),
}

impl PowerAlloc {
    /// Per-mode powers summing to `total`.
    pub fn powers(&self, n_modes: usize, total: f64) -> Result<Vec<f64>> {
        if !(total >= 0.0 && total.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "total power must be non-negative, got {total}"
            )));
        }
        match self {
            PowerAlloc::Equal => Ok(vec![total / n_modes as f64; n_modes]),
            PowerAlloc::Weights(w) => {
                if w.len() != n_modes {
                    return Err(Error::InvalidArgument(format!(
                        "{} power weights for {n_modes} modes",
                        w.len()
                    )));
                }
                if w.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
                    return Err(Error::InvalidArgument(
                        "power weights must be non-negative".into(),
                    ));
                }
                let sum: f64 = w.iter().sum();
                if sum == 0.0 {
                    return Err(Error::InvalidArgument("power weights sum to zero".into()));
                }
                let mut p: Vec<f64> = w.iter().map(|x| x / sum * total).collect();
                // Put the rounding residue on the largest entry.
                let resid = total - p.iter().sum::<f64>();
                let imax = (0..p.len()).fold(0, |b, i| if p[i] > p[b] { i } else { b });
                p[imax] += resid;
                Ok(p)
            }
        }
    }
}

/// Symbols `s_{p,l}` for outer modes `p` and inner modes `l`.
///
/// Mode indices run over `1 - ⌊N/2⌋ ..= ⌊N/2⌋` (and likewise for `l`);
/// storage uses the non-negative residue. Each entry keeps its unit-energy
/// data symbol and its power, and transmits `√P · data`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolGrid {
    n_inter: usize,
    n_inner: usize,
    data: Vec<C64>,
    power: Vec<f64>,
}

impl SymbolGrid {
    pub fn new(n_inter: usize, n_inner: usize, data: Vec<C64>, power: Vec<f64>) -> Result<Self> {
        let n = n_inter * n_inner;
        if n == 0 || data.len() != n || power.len() != n {
            return Err(Error::InvalidArgument(format!(
                "grid {n_inter}x{n_inner} needs {n} symbols and powers, got {} and {}",
                data.len(),
                power.len()
            )));
        }
        if power.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return Err(Error::InvalidArgument(
                "mode powers must be non-negative".into(),
            ));
        }
        Ok(SymbolGrid {
            n_inter,
            n_inner,
            data,
            power,
        })
    }

    /// All-zero data with powers from `alloc`.
    pub fn zeros(
        n_inter: usize,
        n_inner: usize,
        total_power: f64,
        alloc: &PowerAlloc,
    ) -> Result<Self> {
        let n = n_inter * n_inner;
        Self::new(
            n_inter,
            n_inner,
            vec![C64::new(0.0, 0.0); n],
            alloc.powers(n, total_power)?,
        )
    }

    /// Data drawn from constellation indices (storage order).
    pub fn from_indices(
        n_inter: usize,
        n_inner: usize,
        indices: &[usize],
        constellation: &Constellation,
        total_power: f64,
        alloc: &PowerAlloc,
    ) -> Result<Self> {
        let data = indices
            .iter()
            .map(|&i| {
                constellation.points().get(i).copied().ok_or_else(|| {
                    Error::InvalidArgument(format!("symbol index {i} outside the constellation"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let n = n_inter * n_inner;
        Self::new(n_inter, n_inner, data, alloc.powers(n, total_power)?)
    }

    pub fn n_inter(&self) -> usize {
        self.n_inter
    }

    pub fn n_inner(&self) -> usize {
        self.n_inner
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn p_range(&self) -> std::ops::RangeInclusive<i64> {
        mode_range(self.n_inter)
    }

    pub fn l_range(&self) -> std::ops::RangeInclusive<i64> {
        mode_range(self.n_inner)
    }

    /// Storage offset of signed mode `(p, l)`.
    pub fn index(&self, p: i64, l: i64) -> Result<usize> {
        if !self.p_range().contains(&p) || !self.l_range().contains(&l) {
            return Err(Error::InvalidArgument(format!(
                "mode ({p}, {l}) outside the grid"
            )));
        }
        Ok(self.storage(p, l))
    }

    fn storage(&self, p: i64, l: i64) -> usize {
        let pi = p.rem_euclid(self.n_inter as i64) as usize;
        let li = l.rem_euclid(self.n_inner as i64) as usize;
        pi * self.n_inner + li
    }

    /// Transmitted symbol `√P · data` at storage offset `i`.
    pub fn symbol_at(&self, i: usize) -> C64 {
        self.data[i] * self.power[i].sqrt()
    }

    pub fn symbol(&self, p: i64, l: i64) -> Result<C64> {
        Ok(self.symbol_at(self.index(p, l)?))
    }

    pub fn set_data(&mut self, p: i64, l: i64, value: C64) -> Result<()> {
        let i = self.index(p, l)?;
        self.data[i] = value;
        Ok(())
    }

    /// Transmitted symbols in storage order (rows `p`, columns `l`).
    pub fn symbols(&self) -> Vec<C64> {
        (0..self.data.len()).map(|i| self.symbol_at(i)).collect()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn powers(&self) -> &[f64] {
        &self.power
    }

    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }
}

/// Signed mode range `⌊n/2⌋ + 1 - n ..= ⌊n/2⌋`, `n` values in total.
pub fn mode_range(n: usize) -> std::ops::RangeInclusive<i64> {
    let h = (n / 2) as i64;
    (h + 1 - n as i64).min(0)..=h
}
