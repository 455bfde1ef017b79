use std::f64::consts::PI;
use std::str::FromStr;

use super::layout::{build_layout, Layout};
use crate::error::{Error, Result};

/// Per-cell sharing frequencies `L_v`, in element-index order of cell 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharingMatrix {
    diag: Vec<u32>,
}

impl SharingMatrix {
    pub fn new(diag: Vec<u32>) -> Result<Self> {
        if diag.is_empty() || diag.contains(&0) {
            return Err(Error::InvalidArgument(
                "sharing frequencies must be a non-empty list of positive integers".into(),
            ));
        }
        Ok(SharingMatrix { diag })
    }

    pub fn identity(n: usize) -> Self {
        SharingMatrix { diag: vec![1; n] }
    }

    pub fn diag(&self) -> &[u32] {
        &self.diag
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.diag.iter().map(|&x| x as f64).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.diag.iter().all(|&x| x == 1)
    }

    /// True if `other` is a cyclic rotation of this vector.
    pub fn cyclic_equivalent(&self, other: &[u32]) -> bool {
        let n = self.diag.len();
        n == other.len() && (0..n).any(|s| (0..n).all(|i| self.diag[(i + s) % n] == other[i]))
    }

    pub fn sorted(&self) -> Vec<u32> {
        let mut d = self.diag.clone();
        d.sort_unstable();
        d
    }
}

/// Sharing frequencies of a layout: how many logical slots land on each
/// element of cell 0.
pub fn sharing_matrix(layout: &Layout) -> SharingMatrix {
    let sizes = layout.group_sizes();
    SharingMatrix {
        diag: (0..layout.elems_per_cell())
            .map(|v| sizes[layout.physical_id(0, v)])
            .collect(),
    }
}

/// How neighbouring cells meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometricCase {
    /// Adjacent cells touch at a single element.
    Tangent,
    /// Adjacent cells intersect at two elements.
    Overlapped,
    /// Every cell passes through the array centre.
    ThroughCenter,
}

impl FromStr for GeometricCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tangent" => Ok(GeometricCase::Tangent),
            "overlapped" => Ok(GeometricCase::Overlapped),
            "through-center" | "through_center" | "throughcenter" => {
                Ok(GeometricCase::ThroughCenter)
            }
            other => Err(Error::InvalidArgument(format!(
                "unknown geometric case '{other}'"
            ))),
        }
    }
}

/// Element counts `V <= max_v` for which the given case yields a regular
/// sharing pattern.
pub fn admissible_elem_counts(
    n_cells: usize,
    case: GeometricCase,
    max_v: usize,
) -> Result<Vec<usize>> {
    if n_cells < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 cells, got {n_cells}"
        )));
    }
    let n = n_cells;
    Ok(match case {
        GeometricCase::Tangent | GeometricCase::ThroughCenter => (1..=max_v)
            .filter(|v| (v * (n - 2)).is_multiple_of(2 * n))
            .collect(),
        GeometricCase::Overlapped => (1..=max_v)
            .filter(|&v| !overlapped_ratios(n, v).unwrap_or_default().is_empty())
            .collect(),
    })
}

/// Radius ratios strictly between the tangent and through-centre cases at
/// which every adjacent pair shares exactly two elements and no other pair
/// shares any.
pub fn overlapped_ratios(n_cells: usize, elems_per_cell: usize) -> Result<Vec<f64>> {
    if n_cells < 3 || elems_per_cell == 0 {
        return Err(Error::InvalidArgument(
            "need at least 3 cells and 1 element".into(),
        ));
    }
    let (n, v) = (n_cells, elems_per_cell);
    // Both intersection points can only land on the element grid when
    // V/2 + V/N is an integer.
    if (v * (n + 2)) % (2 * n) != 0 {
        return Ok(Vec::new());
    }
    let tangent = (PI / n as f64).sin();
    let mut out = Vec::new();
    for m in 1..v {
        let ratio = tangent / (m as f64 * PI / v as f64).cos();
        if !(ratio > tangent * (1.0 + 1e-12) && ratio < 1.0 - 1e-12) {
            continue;
        }
        let layout = build_layout(n, v, ratio, 1.0)?;
        if has_overlapped_pattern(&layout) {
            out.push(ratio);
        }
    }
    Ok(out)
}

fn has_overlapped_pattern(layout: &Layout) -> bool {
    let n = layout.n_cells();
    for a in 0..n {
        for b in a + 1..n {
            let adjacent = b == a + 1 || (a == 0 && b == n - 1);
            let want = if adjacent { 2 } else { 0 };
            if layout.shared_between(a, b) != want {
                return false;
            }
        }
    }
    true
}

/// Closed-form sharing vector for the tangent case:
/// `[2, 1 x (i-1), 2, 1 x (V-i-1)]` with `i = V(N-2)/(2N)`.
pub fn closed_form_sharing_tangent(n_cells: usize, elems_per_cell: usize) -> Result<Vec<u32>> {
    let (n, v) = (n_cells, elems_per_cell);
    if n < 3 || v == 0 || (v * (n - 2)) % (2 * n) != 0 {
        return Err(Error::InvalidArgument(format!(
            "{v} elements is not admissible for {n} tangent cells"
        )));
    }
    let i = v * (n - 2) / (2 * n);
    let mut out = vec![1; v];
    out[0] = 2;
    out[i] = 2;
    Ok(out)
}
