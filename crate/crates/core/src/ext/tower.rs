//! Iterated extensions by line bundles over a fixed left term.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::graded::HomogeneousForm;
use crate::monad::Monad;

use super::{certify, extend_by_line};

/// A base monad and the rows `(kᵢ, fᵢ)` stacked onto it in order.
#[derive(Debug, Clone)]
pub struct TowerSpec<F> {
    pub base: Monad<F>,
    pub steps: Vec<(i64, Vec<HomogeneousForm<F>>)>,
}

/// All stages `E₀ = base, E₁, …`; stage `i` adds `O(kᵢ)` to the middle and
/// `fᵢ` as a new row of `A`. Each stage must validate.
pub fn build_tower<F: Field>(spec: &TowerSpec<F>) -> Result<Vec<Monad<F>>> {
    let mut out = vec![spec.base.clone()];
    for (i, (k, f)) in spec.steps.iter().enumerate() {
        let stage = i + 1;
        let wrap = |e: Error| Error::TowerStage {
            stage,
            source: Box::new(e),
        };
        let prev = out.last().expect("nonempty");
        let next = extend_by_line(prev, *k, f).map_err(wrap)?;
        if !certify(&next, stage as u64) {
            return Err(wrap(Error::Uncertified(
                "the validator could not confirm the rank conditions".into(),
            )));
        }
        out.push(next);
    }
    Ok(out)
}
