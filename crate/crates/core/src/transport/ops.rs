use super::{MonotoneCurve, RANGE_SLACK};
use crate::error::{AtmError, Result};

/// `x ↦ f(g(x))` on `g`'s grid.
pub fn compose(f: &MonotoneCurve, g: &MonotoneCurve) -> Result<MonotoneCurve> {
    let dom = f.domain();
    let slack = RANGE_SLACK * dom.width().max(1.0);
    if !g.range().within(&dom, slack) {
        return Err(AtmError::Domain {
            x: if g.range().lo < dom.lo { g.range().lo } else { g.range().hi },
            lo: dom.lo,
            hi: dom.hi,
        });
    }
    let values = g.values().iter().map(|&y| f.eval_clamped(y)).collect();
    Ok(MonotoneCurve::projected(*g.grid(), values, f.range()))
}

/// The α-contraction `[α ⊙ T]`:
/// `x + α(T(x) − x)` for `α > 0`, the identity for `α = 0`, and
/// `x + α(x − T⁻¹(x))` for `α < 0`.
pub fn alpha_contract(alpha: f64, t: &MonotoneCurve) -> Result<MonotoneCurve> {
    contract_with_inverse(alpha, t, None)
}

/// [`alpha_contract`] reusing a precomputed `T⁻¹` for negative `α`.
pub(crate) fn contract_with_inverse(
    alpha: f64,
    t: &MonotoneCurve,
    inverse: Option<&MonotoneCurve>,
) -> Result<MonotoneCurve> {
    if !(-1.0..=1.0).contains(&alpha) {
        return Err(AtmError::Param(format!("contraction parameter {alpha} outside [-1, 1]")));
    }
    if !t.is_transport() {
        return Err(AtmError::Param("α-contraction needs a map with range equal to its domain".into()));
    }
    let grid = *t.grid();
    if alpha == 0.0 {
        return Ok(MonotoneCurve::identity(grid));
    }
    if alpha == 1.0 {
        return Ok(t.clone());
    }
    let values = if alpha > 0.0 {
        t.values()
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let x = grid.node(j);
                x + alpha * (v - x)
            })
            .collect()
    } else {
        let owned;
        let inv = match inverse {
            Some(inv) => inv,
            None => {
                owned = t.invert();
                &owned
            }
        };
        inv.values()
            .iter()
            .enumerate()
            .map(|(j, &w)| {
                let x = grid.node(j);
                x + alpha * (x - w)
            })
            .collect()
    };
    Ok(MonotoneCurve::projected(grid, values, grid.domain()))
}
