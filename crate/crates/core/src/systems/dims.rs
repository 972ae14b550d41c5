use serde::{Deserialize, Serialize};

use super::lie::LieAlgebraData;
use crate::error::{Error, Result};

/// Complex dimensions attached to a genus and a reductive Lie algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub genus: usize,
    pub algebra: String,
    /// dim [g, g]
    pub d: usize,
    /// dim of the center
    pub c: usize,
    pub dim_character_variety: usize,
    pub dim_syst: usize,
    pub dim_teichmuller: usize,
    /// Dimension of the adjoint action of constant gauge transformations, `d`.
    pub gauge_dimension: usize,
}

pub fn dimension_report(g: usize, lie: &LieAlgebraData) -> Result<DimensionReport> {
    if g < 2 {
        return Err(Error::GenusTooSmall(g));
    }
    let d = lie.derived_dimension();
    let c = lie.center_dimension();
    let dim_character_variety = 2 * (g - 1) * d + 2 * g * c;
    let dim_syst = (g - 1) * (d + 3) + g * c;
    let dim_teichmuller = 3 * g - 3;
    if dim_syst + d != dim_teichmuller + g * lie.dimension() {
        return Err(Error::LieAlgebra(format!(
            "dimension identity fails for {} at genus {g}",
            lie.name()
        )));
    }
    Ok(DimensionReport {
        genus: g,
        algebra: lie.name().to_string(),
        d,
        c,
        dim_character_variety,
        dim_syst,
        dim_teichmuller,
        gauge_dimension: d,
    })
}
