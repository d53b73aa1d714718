//! Uniform Cartesian grid, flat field storage, pit mask, and the precomputed
//! horizon neighbor table used by the nonlocal operator.

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;

/// Node-centered uniform grid on `[x0, x0+Lx] × [y0, y0+Ly]`.
///
/// Both boundaries are grid nodes: `nx = Lx/h + 1`, `ny = Ly/h + 1`.
/// Node `(i, j)` sits at `(x0 + i·h, y0 + j·h)` and maps to flat index
/// `j·nx + i` (row-major; the x-index `i` is the fast one).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    /// Grid spacing, identical in both axes.
    pub h: f64,
    pub origin: (f64, f64),
    pub extent: (f64, f64),
}

/// Count nodes along one axis, requiring the extent to be an integer
/// multiple of `h` to within 1e-12 relative.
fn axis_nodes(extent: f64, h: f64, axis: &str) -> Result<usize> {
    let ratio = extent / h;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-12 * ratio.max(1.0) {
        return Err(Error::config(format!(
            "grid extent along {axis} ({extent}) is not an integer multiple of grid.h = {h}"
        )));
    }
    if n < 1.0 {
        return Err(Error::config(format!(
            "grid extent along {axis} ({extent}) must be at least grid.h = {h}"
        )));
    }
    Ok(n as usize + 1)
}

impl Grid2D {
    /// Build a grid; errors name the offending axis if `h` does not divide it.
    ///
    /// ```
    /// use pitfield::grid::Grid2D;
    /// let g = Grid2D::build(50.0, 50.0, 1.0, (0.0, 0.0)).unwrap();
    /// assert_eq!((g.nx, g.ny), (51, 51));
    /// assert_eq!(Grid2D::build(50.0, 50.0, 0.25, (0.0, 0.0)).unwrap().nx, 201);
    /// assert!(Grid2D::build(50.0, 50.0, 0.3, (0.0, 0.0)).is_err());
    /// ```
    pub fn build(lx: f64, ly: f64, h: f64, origin: (f64, f64)) -> Result<Grid2D> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::config(format!("grid.h must be positive and finite, got {h}")));
        }
        let nx = axis_nodes(lx, h, "x")?;
        let ny = axis_nodes(ly, h, "y")?;
        Ok(Grid2D { nx, ny, h, origin, extent: (lx, ly) })
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.origin.0 + i as f64 * self.h
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.origin.1 + j as f64 * self.h
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.nx * self.ny
    }

    /// Node-centered quadrature cell area (one-point rule: every node owns h²).
    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.h * self.h
    }
}

/// One scalar per grid node, flat row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub values: Vec<f64>,
    pub nx: usize,
    pub ny: usize,
}

impl Field {
    pub fn zeros(grid: &Grid2D) -> Field {
        Field { values: vec![0.0; grid.n_nodes()], nx: grid.nx, ny: grid.ny }
    }

    pub fn constant(grid: &Grid2D, v: f64) -> Field {
        Field { values: vec![v; grid.n_nodes()], nx: grid.nx, ny: grid.ny }
    }

    /// Sample `f(x, y)` at every node.
    pub fn from_fn(grid: &Grid2D, f: impl Fn(f64, f64) -> f64) -> Field {
        let mut values = Vec::with_capacity(grid.n_nodes());
        for j in 0..grid.ny {
            let y = grid.y(j);
            for i in 0..grid.nx {
                values.push(f(grid.x(i), y));
            }
        }
        Field { values, nx: grid.nx, ny: grid.ny }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[j * self.nx + i] = v;
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Circular pit mask: nodes within distance `radius` of `center` (boundary
/// included) are clamped to fixed values each step.
#[derive(Debug, Clone, PartialEq)]
pub struct PitMask {
    pub center: (f64, f64),
    pub radius: f64,
    /// One flag per node, same layout as `Field`.
    pub clamped: Vec<bool>,
    pub n_clamped: usize,
}

impl PitMask {
    /// Disabled pit: nothing clamped.
    pub fn none(grid: &Grid2D) -> PitMask {
        PitMask {
            center: (0.0, 0.0),
            radius: 0.0,
            clamped: vec![false; grid.n_nodes()],
            n_clamped: 0,
        }
    }

    /// ```
    /// use pitfield::grid::{Grid2D, PitMask};
    /// let g = Grid2D::build(50.0, 50.0, 1.0, (0.0, 0.0)).unwrap();
    /// let pit = PitMask::build(&g, (25.0, 25.0), 2.0).unwrap();
    /// assert_eq!(pit.n_clamped, 13); // integer points with di²+dj² ≤ 4
    /// ```
    pub fn build(grid: &Grid2D, center: (f64, f64), radius: f64) -> Result<PitMask> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::config(format!(
                "pit.radius must be nonnegative and finite, got {radius}"
            )));
        }
        let r2 = radius * radius;
        let mut clamped = Vec::with_capacity(grid.n_nodes());
        let mut n_clamped = 0;
        for j in 0..grid.ny {
            let dy = grid.y(j) - center.1;
            for i in 0..grid.nx {
                let dx = grid.x(i) - center.0;
                let inside = dx * dx + dy * dy <= r2;
                n_clamped += inside as usize;
                clamped.push(inside);
            }
        }
        Ok(PitMask { center, radius, clamped, n_clamped })
    }

    /// Overwrite every clamped node with `value`. Idempotent.
    pub fn apply_clamp(&self, field: &mut Field, value: f64) {
        assert_eq!(
            field.values.len(),
            self.clamped.len(),
            "pit mask applied to a field from a different grid"
        );
        for (v, &c) in field.values.iter_mut().zip(&self.clamped) {
            if c {
                *v = value;
            }
        }
    }
}

/// Precomputed horizon neighborhood for the nonlocal operator.
///
/// Offsets are every integer displacement `(di, dj) ≠ (0, 0)` with
/// `‖(di·h, dj·h)‖ ≤ δ` (support boundary included), enumerated by scanning
/// the square `[−m, m]²` with `di` in the outer loop and `dj` in the inner —
/// a fixed order so sums are bitwise reproducible. `pair_weight = c_δ · h²`
/// is the one-point quadrature weight shared by all neighbors (the top-hat
/// kernel is constant on its support).
#[derive(Debug, Clone)]
pub struct NeighborTable {
    /// Horizon ratio `m = ⌊δ/h⌋`.
    pub m: i64,
    pub offsets: Vec<(i64, i64)>,
    /// Flat-index shifts `dj·nx + di`, aligned with `offsets`, for the
    /// interior fast path.
    pub shifts: Vec<isize>,
    /// `c_δ · h²`.
    pub pair_weight: f64,
    pub delta: f64,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl NeighborTable {
    /// ```
    /// use pitfield::grid::{Grid2D, NeighborTable};
    /// use pitfield::kernel::make_tophat_kernel;
    /// let g = Grid2D::build(50.0, 50.0, 1.0, (0.0, 0.0)).unwrap();
    /// let t1 = NeighborTable::build(&g, &make_tophat_kernel(1.0, 2).unwrap()).unwrap();
    /// let t2 = NeighborTable::build(&g, &make_tophat_kernel(2.0, 2).unwrap()).unwrap();
    /// let t3 = NeighborTable::build(&g, &make_tophat_kernel(3.0, 2).unwrap()).unwrap();
    /// assert_eq!(t1.offsets.len(), 4);  // (±1,0),(0,±1)
    /// assert_eq!(t2.offsets.len(), 12);
    /// assert_eq!(t3.offsets.len(), 28);
    /// ```
    pub fn build(grid: &Grid2D, kernel: &KernelSpec) -> Result<NeighborTable> {
        if kernel.dim != 2 {
            return Err(Error::config(format!(
                "neighbor table requires a 2-d kernel, got dim = {}",
                kernel.dim
            )));
        }
        let (h, delta) = (grid.h, kernel.delta);
        if delta < h {
            return Err(Error::config(format!(
                "horizon delta = {delta} is smaller than grid.h = {h}: empty neighborhood"
            )));
        }
        // The 1e-9 nudges absorb one-ulp roundoff when delta/h is not exactly
        // representable (e.g. 0.3/0.1). They cannot admit a wrong neighbor:
        // the nearest lattice point beyond the horizon is at least a factor
        // (m²+1)/m² away in squared distance.
        let m = (delta / h + 1e-9).floor() as i64;
        let r2_max = delta * delta * (1.0 + 1e-9);
        let mut offsets = Vec::new();
        let mut shifts = Vec::new();
        for di in -m..=m {
            for dj in -m..=m {
                if di == 0 && dj == 0 {
                    continue;
                }
                let r2 = ((di * di + dj * dj) as f64) * h * h;
                if r2 <= r2_max {
                    offsets.push((di, dj));
                    shifts.push(dj as isize * grid.nx as isize + di as isize);
                }
            }
        }
        debug_assert!(!offsets.is_empty());
        let pair_weight = kernel.c_delta * h * h;
        Ok(NeighborTable {
            m,
            offsets,
            shifts,
            pair_weight,
            delta,
            h,
            nx: grid.nx,
            ny: grid.ny,
        })
    }
}
