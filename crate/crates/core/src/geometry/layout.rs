use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Relative tolerance (in units of the layout scale) for two slots to count
/// as the same physical element.
pub const COINCIDENCE_TOL: f64 = 1e-9;

/// A QF-UCA: `n_cells` rings of `elems_per_cell` slots, ring centres on a
/// circle of radius `qf_radius`. Slots are indexed `cell * elems_per_cell + elem`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    n_cells: usize,
    elems_per_cell: usize,
    cell_radius: f64,
    qf_radius: f64,
    elem_phase: f64,
    positions: Vec<[f64; 2]>,
    slot_group: Vec<usize>,
    group_sizes: Vec<u32>,
}

impl Layout {
    fn assemble(
        n_cells: usize,
        elems_per_cell: usize,
        cell_radius: f64,
        qf_radius: f64,
        elem_phase: f64,
    ) -> Self {
        let mut positions = Vec::with_capacity(n_cells * elems_per_cell);
        for n in 0..n_cells {
            for v in 0..elems_per_cell {
                positions.push(slot_position(
                    n_cells,
                    elems_per_cell,
                    cell_radius,
                    qf_radius,
                    elem_phase,
                    n,
                    v,
                ));
            }
        }
        let scale = if qf_radius > 0.0 {
            qf_radius
        } else {
            cell_radius
        };
        let tol = COINCIDENCE_TOL * scale;
        let mut slot_group = vec![usize::MAX; positions.len()];
        let mut group_sizes = Vec::new();
        for i in 0..positions.len() {
            if slot_group[i] != usize::MAX {
                continue;
            }
            let id = group_sizes.len();
            let mut size = 0;
            for j in i..positions.len() {
                if slot_group[j] == usize::MAX && dist(positions[i], positions[j]) <= tol {
                    slot_group[j] = id;
                    size += 1;
                }
            }
            group_sizes.push(size);
        }
        Layout {
            n_cells,
            elems_per_cell,
            cell_radius,
            qf_radius,
            elem_phase,
            positions,
            slot_group,
            group_sizes,
        }
    }

    /// A plain UCA of `n_elems` elements on a circle of `radius` about the origin.
    pub fn single_ring(n_elems: usize, radius: f64) -> Result<Self> {
        if n_elems == 0 {
            return Err(Error::InvalidArgument(
                "a ring needs at least one element".into(),
            ));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "ring radius must be positive, got {radius}"
            )));
        }
        Ok(Self::assemble(1, n_elems, radius, 0.0, 0.0))
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn elems_per_cell(&self) -> usize {
        self.elems_per_cell
    }

    pub fn n_slots(&self) -> usize {
        self.positions.len()
    }

    pub fn cell_radius(&self) -> f64 {
        self.cell_radius
    }

    pub fn qf_radius(&self) -> f64 {
        self.qf_radius
    }

    /// Angular offset of element 0 from its cell's radial axis.
    pub fn elem_phase(&self) -> f64 {
        self.elem_phase
    }

    pub fn cell_azimuth(&self, n: usize) -> f64 {
        2.0 * PI * n as f64 / self.n_cells as f64
    }

    /// Element azimuth within its own cell frame.
    pub fn elem_azimuth(&self, v: usize) -> f64 {
        2.0 * PI * v as f64 / self.elems_per_cell as f64 + self.elem_phase
    }

    pub fn cell_azimuths(&self) -> Vec<f64> {
        (0..self.n_cells).map(|n| self.cell_azimuth(n)).collect()
    }

    pub fn elem_azimuths(&self) -> Vec<f64> {
        (0..self.elems_per_cell)
            .map(|v| self.elem_azimuth(v))
            .collect()
    }

    pub fn cell_center(&self, n: usize) -> [f64; 2] {
        let t = self.cell_azimuth(n);
        [self.qf_radius * t.cos(), self.qf_radius * t.sin()]
    }

    pub fn position(&self, n: usize, v: usize) -> [f64; 2] {
        self.positions[n * self.elems_per_cell + v]
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    /// Physical element id of every logical slot.
    pub fn slot_groups(&self) -> &[usize] {
        &self.slot_group
    }

    pub fn physical_id(&self, n: usize, v: usize) -> usize {
        self.slot_group[n * self.elems_per_cell + v]
    }

    pub fn n_physical(&self) -> usize {
        self.group_sizes.len()
    }

    /// Number of logical slots mapped onto each physical element.
    pub fn group_sizes(&self) -> &[u32] {
        &self.group_sizes
    }

    /// Number of physical elements shared by cells `a` and `b`.
    pub fn shared_between(&self, a: usize, b: usize) -> usize {
        let k = self.elems_per_cell;
        let ga: Vec<usize> = self.slot_group[a * k..(a + 1) * k].to_vec();
        let mut gb: Vec<usize> = self.slot_group[b * k..(b + 1) * k].to_vec();
        gb.sort_unstable();
        gb.dedup();
        let mut ga = ga;
        ga.sort_unstable();
        ga.dedup();
        ga.iter().filter(|g| gb.binary_search(g).is_ok()).count()
    }
}

fn slot_position(
    n_cells: usize,
    elems: usize,
    cell_radius: f64,
    qf_radius: f64,
    phase: f64,
    n: usize,
    v: usize,
) -> [f64; 2] {
    let theta = 2.0 * PI * n as f64 / n_cells as f64;
    let a = 2.0 * PI * v as f64 / elems as f64 + phase + theta;
    [
        qf_radius * theta.cos() + cell_radius * a.cos(),
        qf_radius * theta.sin() + cell_radius * a.sin(),
    ]
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn validate(n_cells: usize, elems: usize, ratio: f64, qf_radius: f64) -> Result<()> {
    if n_cells < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 cells, got {n_cells}"
        )));
    }
    if elems == 0 {
        return Err(Error::InvalidArgument(
            "need at least one element per cell".into(),
        ));
    }
    if !(qf_radius > 0.0 && qf_radius.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "qf radius must be positive, got {qf_radius}"
        )));
    }
    if !ratio.is_finite() || ratio <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "radius ratio must be positive, got {ratio}"
        )));
    }
    if ratio > 1.0 {
        return Err(Error::InvalidGeometry(format!(
            "radius ratio {ratio} exceeds 1"
        )));
    }
    Ok(())
}

/// Builds a layout with cell radius `ratio * qf_radius`.
///
/// Element 0 of every cell sits on the cell's radial axis, or half an
/// element step off it when that placement shares more elements.
pub fn build_layout(
    n_cells: usize,
    elems_per_cell: usize,
    ratio: f64,
    qf_radius: f64,
) -> Result<Layout> {
    validate(n_cells, elems_per_cell, ratio, qf_radius)?;
    let radial = Layout::assemble(n_cells, elems_per_cell, ratio * qf_radius, qf_radius, 0.0);
    let shifted = Layout::assemble(
        n_cells,
        elems_per_cell,
        ratio * qf_radius,
        qf_radius,
        PI / elems_per_cell as f64,
    );
    Ok(if shifted.n_physical() < radial.n_physical() {
        shifted
    } else {
        radial
    })
}

/// Builds a layout with an explicit element-0 phase offset.
pub fn build_layout_with_phase(
    n_cells: usize,
    elems_per_cell: usize,
    ratio: f64,
    qf_radius: f64,
    elem_phase: f64,
) -> Result<Layout> {
    validate(n_cells, elems_per_cell, ratio, qf_radius)?;
    if !elem_phase.is_finite() {
        return Err(Error::InvalidArgument(
            "element phase must be finite".into(),
        ));
    }
    Ok(Layout::assemble(
        n_cells,
        elems_per_cell,
        ratio * qf_radius,
        qf_radius,
        elem_phase,
    ))
}

/// Rotation of cell `n` relative to cell `m` for `q = (n - m) mod N`, plus
/// the centre displacement `(a_q, b_q)` expressed in cell `m`'s frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationShift {
    pub angle: f64,
    pub a: f64,
    pub b: f64,
}

pub fn rotation_shift(q: usize, n_cells: usize, qf_radius: f64) -> Result<RotationShift> {
    if q >= n_cells {
        return Err(Error::InvalidArgument(format!(
            "offset {q} out of range for {n_cells} cells"
        )));
    }
    let angle = 2.0 * PI * q as f64 / n_cells as f64;
    Ok(RotationShift {
        angle,
        a: -qf_radius * angle.sin(),
        b: -qf_radius * (1.0 - angle.cos()),
    })
}
