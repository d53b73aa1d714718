//! Discrete spatial operators: the nonlocal horizon operator and the local
//! five-point Laplacian.
//!
//! Sign convention: [`apply_nonlocal`] returns the operator that annihilates
//! constants and is positive semi-definite — i.e. the discrete analog of
//! `u ↦ ∫ J_δ(x−y)[u(x)−u(y)] dy`, which approaches `−Δu` as `δ → 0`. The
//! stepper composes signs explicitly at its two call sites, so there is one
//! canonical operator and no double-negation to keep straight.

use crate::grid::{Field, Grid2D, NeighborTable};

/// Discrete nonlocal operator `(𝓛u)(i,j) = K h² Σ_neighbors [u(i,j) − u(k,l)]`.
///
/// The sum runs over the precomputed horizon offsets, truncated to in-domain
/// nodes near the outer boundary (no ghost values). Truncation keeps the
/// pairwise structure symmetric — a pair is either fully inside or not a pair
/// — so the operator still annihilates constants exactly, stays symmetric
/// positive semi-definite, and sums to zero over the grid (exact pairwise
/// cancellation; this is what makes the concentration update conservative).
///
/// Nodes at least `m` cells from every edge take a branch-free fast path over
/// precomputed flat-index shifts; both paths visit neighbors in identical
/// order, so results do not depend on which path ran.
pub fn apply_nonlocal(field: &Field, table: &NeighborTable) -> Field {
    assert_eq!(
        (field.nx, field.ny),
        (table.nx, table.ny),
        "neighbor table built for a different grid"
    );
    let (nx, ny) = (field.nx, field.ny);
    let m = table.m as usize;
    let vals = &field.values[..];
    let mut out = vec![0.0; vals.len()];
    for j in 0..ny {
        let row_interior = j >= m && j + m < ny;
        for i in 0..nx {
            let base = j * nx + i;
            let u0 = vals[base];
            let mut acc = 0.0;
            if row_interior && i >= m && i + m < nx {
                for &s in &table.shifts {
                    acc += u0 - vals[(base as isize + s) as usize];
                }
            } else {
                for &(di, dj) in &table.offsets {
                    let ii = i as i64 + di;
                    let jj = j as i64 + dj;
                    if ii >= 0 && ii < nx as i64 && jj >= 0 && jj < ny as i64 {
                        acc += u0 - vals[jj as usize * nx + ii as usize];
                    }
                }
            }
            out[base] = acc * table.pair_weight;
        }
    }
    Field { values: out, nx, ny }
}

/// Standard five-point Laplacian with homogeneous Neumann boundaries.
///
/// Out-of-domain stencil arms are closed with mirror ghosts: the missing
/// neighbor takes the value of the in-domain node opposite the center, which
/// is the second-order discretization of a zero normal derivative.
pub fn apply_local_laplacian(field: &Field, grid: &Grid2D) -> Field {
    assert_eq!(
        (field.nx, field.ny),
        (grid.nx, grid.ny),
        "field does not match grid"
    );
    let (nx, ny) = (grid.nx, grid.ny);
    let inv_h2 = 1.0 / (grid.h * grid.h);
    let vals = &field.values[..];
    let mut out = vec![0.0; vals.len()];
    for j in 0..ny {
        let jm = if j == 0 { 1 } else { j - 1 };
        let jp = if j == ny - 1 { ny - 2 } else { j + 1 };
        for i in 0..nx {
            let im = if i == 0 { 1 } else { i - 1 };
            let ip = if i == nx - 1 { nx - 2 } else { i + 1 };
            let u = vals[j * nx + i];
            out[j * nx + i] = (vals[j * nx + im] + vals[j * nx + ip] + vals[jm * nx + i]
                + vals[jp * nx + i]
                - 4.0 * u)
                * inv_h2;
        }
    }
    Field { values: out, nx, ny }
}
