//! KKS free-energy density and material parameters.
//!
//! The bulk density couples the phase field `φ` (1 = solid, 0 = dissolved)
//! to the normalized metal concentration `c`:
//!
//! ```text
//! f(φ, c) = A (c − h(φ)(1 − c_L) − c_L)² + ω g(φ)
//! ```
//!
//! with the smoothstep interpolation `h(φ) = φ²(3 − 2φ)` and the double well
//! `g(φ) = φ²(1 − φ)²` on `[0, 1]`. Outside `[0, 1]` both are continued
//! *quadratically* so that values, first and second derivatives match at the
//! splice points; the continuation keeps `f` bounded below (every piece is a
//! sum of squares) while letting transient over/undershoots relax back.
//! Note the continued `h'` grows linearly without bound, so far-out-of-range
//! states feel a strong restoring drive — harmless for healthy runs, which
//! stay within a few percent of `[0, 1]`, and moot once the blow-up detector
//! trips at |φ| > 10.
//!
//! The two bulk equilibria are `(φ, c) = (1, 1)` (intact solid at saturation)
//! and `(0, c_L)` (electrolyte at the dilute limit), both with `f = 0`.

/// Material and mobility parameters.
///
/// Defaults are the stainless-steel pitting benchmark set (nondimensionalized
/// with length scale 50 µm, time scale 1 s, saturation concentration 1):
/// `L = 0.23529`, `A = 25.7211`, `c_L = 0.0357`, `ω = 1`,
/// `α_φ = 7.2115e-7`, `M = 1.945`, `α_c = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// Free-energy curvature `A` (chemical part).
    pub a: f64,
    /// Double-well height `ω`.
    pub omega: f64,
    /// Dilute equilibrium concentration `c_L`.
    pub c_l: f64,
    /// Allen–Cahn mobility `L`.
    pub l_mob: f64,
    /// Cahn–Hilliard mobility `M`.
    pub m_mob: f64,
    /// Phase-field interface coefficient `α_φ`.
    pub alpha_phi: f64,
    /// Concentration regularization coefficient `α_c` (0 in the benchmark:
    /// the concentration equation runs without the fourth-order-like term).
    pub alpha_c: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        MaterialParams {
            a: 25.7211,
            omega: 1.0,
            c_l: 0.0357,
            l_mob: 0.23529,
            m_mob: 1.945,
            alpha_phi: 7.2115e-7,
            alpha_c: 0.0,
        }
    }
}

/// Interpolation function `h`: smoothstep on `[0,1]`, quadratic outside.
///
/// `h(0) = 0`, `h(1) = 1`, `h'(0) = h'(1) = 0`, and the continuation is C²
/// at both splice points.
pub fn interp_h(phi: f64) -> f64 {
    if phi < 0.0 {
        3.0 * phi * phi
    } else if phi > 1.0 {
        1.0 - 3.0 * (phi - 1.0) * (phi - 1.0)
    } else {
        phi * phi * (3.0 - 2.0 * phi)
    }
}

/// Derivative of [`interp_h`].
pub fn interp_h_prime(phi: f64) -> f64 {
    if phi < 0.0 {
        6.0 * phi
    } else if phi > 1.0 {
        -6.0 * (phi - 1.0)
    } else {
        6.0 * phi * (1.0 - phi)
    }
}

/// Double-well potential `g`: `φ²(1−φ)²` on `[0,1]`, quadratic outside.
///
/// Nonnegative everywhere; zero exactly at `φ = 0` and `φ = 1`.
pub fn well_g(phi: f64) -> f64 {
    if phi < 0.0 {
        phi * phi
    } else if phi > 1.0 {
        (phi - 1.0) * (phi - 1.0)
    } else {
        let q = phi * (1.0 - phi);
        q * q
    }
}

/// Derivative of [`well_g`].
pub fn well_g_prime(phi: f64) -> f64 {
    if phi < 0.0 {
        2.0 * phi
    } else if phi > 1.0 {
        2.0 * (phi - 1.0)
    } else {
        2.0 * phi * (1.0 - phi) * (1.0 - 2.0 * phi)
    }
}

impl MaterialParams {
    /// The chemical driving residual `c − h(φ)(1 − c_L) − c_L`.
    ///
    /// Zero along the KKS equilibrium line interpolating between
    /// `(0, c_L)` and `(1, 1)`.
    #[inline]
    pub fn residual(&self, phi: f64, c: f64) -> f64 {
        c - interp_h(phi) * (1.0 - self.c_l) - self.c_l
    }

    /// Bulk free-energy density `f(φ, c)`.
    ///
    /// The dilute equilibrium `(0, c_L)` is an exact floating-point zero of
    /// `f`. The solid equilibrium `(1, 1)` is not quite: `1 - c_L` is rounded
    /// on construction, so `1 - (1 - c_L) - c_L` leaves a residue of order
    /// 1e-17 and `f(1, 1) = A·residue² ≈ 6e-32`. Harmless, but don't assert
    /// bitwise zero there.
    ///
    /// ```
    /// use pitfield::material::MaterialParams;
    /// let p = MaterialParams::default();
    /// assert_eq!(p.f_density(0.0, p.c_l), 0.0); // dilute equilibrium, exactly
    /// assert!(p.f_density(1.0, 1.0) < 1e-30); // solid equilibrium, rounding residue
    /// assert!(p.f_density(0.4, 0.7) > 0.0);
    /// ```
    #[inline]
    pub fn f_density(&self, phi: f64, c: f64) -> f64 {
        let r = self.residual(phi, c);
        self.a * r * r + self.omega * well_g(phi)
    }

    /// `∂f/∂c = 2A (c − h(φ)(1 − c_L) − c_L)` — affine in `c` with slope `2A`.
    #[inline]
    pub fn df_dc(&self, phi: f64, c: f64) -> f64 {
        2.0 * self.a * self.residual(phi, c)
    }

    /// `∂f/∂φ = −2A (c − h(φ)(1 − c_L) − c_L) h'(φ)(1 − c_L) + ω g'(φ)`.
    #[inline]
    pub fn df_dphi(&self, phi: f64, c: f64) -> f64 {
        -2.0 * self.a * self.residual(phi, c) * interp_h_prime(phi) * (1.0 - self.c_l)
            + self.omega * well_g_prime(phi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_defaults() {
        let p = MaterialParams::default();
        assert_eq!(p.l_mob, 0.23529);
        assert_eq!(p.a, 25.7211);
        assert_eq!(p.c_l, 0.0357);
        assert_eq!(p.omega, 1.0);
        assert_eq!(p.alpha_phi, 7.2115e-7);
        assert_eq!(p.m_mob, 1.945);
        assert_eq!(p.alpha_c, 0.0);
    }

    #[test]
    fn splice_continuity() {
        // Value, first and second derivative agree across both splice points.
        let eps = 1e-7;
        for x in [0.0_f64, 1.0] {
            for f in [interp_h, interp_h_prime, well_g, well_g_prime] {
                let below = f(x - eps);
                let above = f(x + eps);
                assert!(
                    (below - above).abs() < 1e-5,
                    "discontinuity at {x}: {below} vs {above}"
                );
            }
            // second derivative via centered difference of the primes
            for fp in [interp_h_prime, well_g_prime] {
                let d_below = (fp(x) - fp(x - eps)) / eps;
                let d_above = (fp(x + eps) - fp(x)) / eps;
                assert!(
                    (d_below - d_above).abs() < 1e-4,
                    "kink in derivative at {x}: {d_below} vs {d_above}"
                );
            }
        }
    }

    #[test]
    fn equilibria_are_exact_zeros() {
        let p = MaterialParams::default();
        // Dilute equilibrium: c_l - h(0)*(1-c_l) - c_l cancels exactly.
        assert_eq!(p.f_density(0.0, p.c_l), 0.0);
        assert_eq!(p.df_dc(0.0, p.c_l), 0.0);
        assert_eq!(p.df_dphi(0.0, p.c_l), 0.0);
        // Solid equilibrium: 1 - (1 - c_l) - c_l leaves the rounding error of
        // fl(1 - c_l), about 5e-17, so f(1,1) = A*residue^2 ~ 6e-32 rather
        // than a bitwise zero. The phi-derivative is still exactly zero
        // because h'(1) = g'(1) = 0 in floating point, for any c.
        assert!(p.f_density(1.0, 1.0) < 1e-30, "{}", p.f_density(1.0, 1.0));
        assert!(p.residual(1.0, 1.0).abs() < 1e-16);
        assert_eq!(p.df_dphi(1.0, 1.0), 0.0);
        assert_eq!(p.df_dphi(1.0, 0.123), 0.0);
    }

    #[test]
    fn df_dc_affine_with_slope_2a() {
        let p = MaterialParams::default();
        for phi in [-0.3, 0.0, 0.5, 1.0, 1.2] {
            let d = p.df_dc(phi, 0.9) - p.df_dc(phi, 0.4);
            let expect = 2.0 * p.a * 0.5;
            assert!((d - expect).abs() <= 1e-13 * expect.abs(), "{d} vs {expect}");
        }
    }
}
