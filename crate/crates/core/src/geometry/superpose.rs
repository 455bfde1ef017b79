use super::layout::Layout;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperposeKind {
    /// Logical -> logical: every slot carries the sum over its group.
    Transmit,
    /// Physical -> logical: every slot receives its element's value.
    Receive,
}

/// Group-sum or duplication map between logical slots and physical elements.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperposeOperator {
    kind: SuperposeKind,
    slot_group: Vec<usize>,
    n_physical: usize,
}

impl SuperposeOperator {
    pub fn kind(&self) -> SuperposeKind {
        self.kind
    }

    pub fn n_slots(&self) -> usize {
        self.slot_group.len()
    }

    pub fn n_physical(&self) -> usize {
        self.n_physical
    }

    /// Sums logical slot signals into one signal per physical element.
    pub fn combine(&self, logical: &[C64]) -> Result<Vec<C64>> {
        self.check(logical, self.slot_group.len())?;
        let mut out = vec![C64::new(0.0, 0.0); self.n_physical];
        for (x, &g) in logical.iter().zip(&self.slot_group) {
            out[g] += x;
        }
        Ok(out)
    }

    /// Copies each physical value into all of its logical slots.
    pub fn spread(&self, physical: &[C64]) -> Result<Vec<C64>> {
        self.check(physical, self.n_physical)?;
        Ok(self.slot_group.iter().map(|&g| physical[g]).collect())
    }

    /// Applies the operator in its natural dimensions.
    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        match self.kind {
            SuperposeKind::Transmit => self.spread(&self.combine(x)?),
            SuperposeKind::Receive => self.spread(x),
        }
    }

    /// Dense form: `NK x NK` for transmit, `NK x N_phys` for receive.
    pub fn as_matrix(&self) -> ComplexMatrix {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let g = &self.slot_group;
        match self.kind {
            SuperposeKind::Transmit => {
                ComplexMatrix::from_fn(
                    g.len(),
                    g.len(),
                    |r, c| if g[r] == g[c] { one } else { zero },
                )
            }
            SuperposeKind::Receive => {
                ComplexMatrix::from_fn(
                    g.len(),
                    self.n_physical,
                    |r, c| if g[r] == c { one } else { zero },
                )
            }
        }
    }

    fn check(&self, x: &[C64], want: usize) -> Result<()> {
        if x.len() != want {
            return Err(Error::InvalidDimension(format!(
                "expected {want} values, got {}",
                x.len()
            )));
        }
        Ok(())
    }
}

/// Transmit and receive superposition operators of a layout.
pub fn superpose_operators(layout: &Layout) -> (SuperposeOperator, SuperposeOperator) {
    let make = |kind| SuperposeOperator {
        kind,
        slot_group: layout.slot_groups().to_vec(),
        n_physical: layout.n_physical(),
    };
    (make(SuperposeKind::Transmit), make(SuperposeKind::Receive))
}
