//! QF-UCA layouts: element positions, shared-element detection, sharing
//! frequencies and the superposition operators that follow from them.

mod layout;
mod sharing;
mod superpose;

use std::io::Write;

pub use layout::{
    build_layout, build_layout_with_phase, rotation_shift, Layout, RotationShift, COINCIDENCE_TOL,
};
pub use sharing::{
    admissible_elem_counts, closed_form_sharing_tangent, overlapped_ratios, sharing_matrix,
    GeometricCase, SharingMatrix,
};
pub use superpose::{superpose_operators, SuperposeKind, SuperposeOperator};

use crate::error::Result;

/// Writes one CSV row per physical element, located at the first logical
/// slot that maps onto it.
pub fn write_layout_csv<W: Write>(layout: &Layout, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "cell_index",
        "elem_index",
        "x_m",
        "y_m",
        "physical_id",
        "sharing_freq",
    ])?;
    let k = layout.elems_per_cell();
    let mut seen = vec![false; layout.n_physical()];
    for (slot, &g) in layout.slot_groups().iter().enumerate() {
        if seen[g] {
            continue;
        }
        seen[g] = true;
        let p = layout.positions()[slot];
        w.write_record([
            (slot / k).to_string(),
            (slot % k).to_string(),
            p[0].to_string(),
            p[1].to_string(),
            g.to_string(),
            layout.group_sizes()[g].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
