//! Radial potentials `Φ(r, ξ)` for the gradient term of the energy.

use serde::{Deserialize, Serialize};

/// `Φ(r, ξ)` with `(α/p)|ξ|^p ≤ Φ ≤ (β/p)|ξ|^p`, `Φ(r, 0) = 0`, strictly
/// convex in `ξ`.
pub trait Potential: Sync {
    fn phi(&self, r: f64, xi: f64) -> f64;
    /// `∂Φ/∂ξ`
    fn dphi(&self, r: f64, xi: f64) -> f64;
    /// `∂²Φ/∂ξ²`, used only to scale search directions.
    fn d2phi(&self, r: f64, xi: f64) -> f64 {
        let h = 1e-6 * (1.0 + xi.abs());
        (self.dphi(r, xi + h) - self.dphi(r, xi - h)) / (2.0 * h)
    }
    fn exponent(&self) -> f64;
    /// `(α, β)`
    fn bounds(&self) -> (f64, f64);
}

/// `Φ = |ξ|^p / p`, the p-Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PLaplacePotential {
    pub p: f64,
}

impl Potential for PLaplacePotential {
    fn phi(&self, _r: f64, xi: f64) -> f64 {
        if self.p == 2.0 {
            0.5 * xi * xi
        } else {
            xi.abs().powf(self.p) / self.p
        }
    }

    fn dphi(&self, _r: f64, xi: f64) -> f64 {
        if self.p == 2.0 {
            xi
        } else {
            xi.signum() * xi.abs().powf(self.p - 1.0)
        }
    }

    fn d2phi(&self, _r: f64, xi: f64) -> f64 {
        if self.p == 2.0 {
            1.0
        } else {
            (self.p - 1.0) * xi.abs().powf(self.p - 2.0)
        }
    }

    fn exponent(&self) -> f64 {
        self.p
    }

    fn bounds(&self) -> (f64, f64) {
        (1.0, 1.0)
    }
}

/// `Φ = a(r) |ξ|^p / p` with `a(r) = a0 + a1 r/R`, a radially varying
/// coefficient between `min(a0, a0 + a1)` and `max(…)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialWeightPotential {
    pub p: f64,
    pub a0: f64,
    pub a1: f64,
    pub radius: f64,
}

impl RadialWeightPotential {
    fn coefficient(&self, r: f64) -> f64 {
        self.a0 + self.a1 * r / self.radius
    }
}

impl Potential for RadialWeightPotential {
    fn phi(&self, r: f64, xi: f64) -> f64 {
        self.coefficient(r) * xi.abs().powf(self.p) / self.p
    }

    fn dphi(&self, r: f64, xi: f64) -> f64 {
        self.coefficient(r) * xi.signum() * xi.abs().powf(self.p - 1.0)
    }

    fn exponent(&self) -> f64 {
        self.p
    }

    fn bounds(&self) -> (f64, f64) {
        let (a, b) = (self.a0, self.a0 + self.a1);
        (a.min(b), a.max(b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub growth_bounds_ok: bool,
    pub vanishes_at_zero: bool,
    pub midpoint_convex: bool,
}

impl HypothesisReport {
    pub fn all_ok(&self) -> bool {
        self.growth_bounds_ok && self.vanishes_at_zero && self.midpoint_convex
    }
}

/// Sampled check of the growth bounds, `Φ(r, 0) = 0` and strict midpoint
/// convexity on `r ∈ [0, R]`, `ξ ∈ [−ξ_max, ξ_max]`.
pub fn check_hypotheses<P: Potential + ?Sized>(pot: &P, radius: f64, xi_max: f64, samples: usize) -> HypothesisReport {
    let p = pot.exponent();
    let (alpha, beta) = pot.bounds();
    let mut rep = HypothesisReport {
        growth_bounds_ok: alpha > 0.0 && alpha <= beta,
        vanishes_at_zero: true,
        midpoint_convex: true,
    };
    let n = samples.max(2);
    for i in 0..n {
        let r = radius * i as f64 / (n - 1) as f64;
        if pot.phi(r, 0.0) != 0.0 {
            rep.vanishes_at_zero = false;
        }
        for k in 0..n {
            let xi = xi_max * (2.0 * k as f64 / (n - 1) as f64 - 1.0);
            let v = pot.phi(r, xi);
            let m = xi.abs().powf(p) / p;
            let slack = 1e-12 * (1.0 + m);
            if v < alpha * m - slack || v > beta * m + slack {
                rep.growth_bounds_ok = false;
            }
            let eta = xi_max * (1.0 - 2.0 * ((k * 7 + 3) % n) as f64 / (n - 1) as f64);
            if (xi - eta).abs() > 1e-9 * xi_max {
                let mid = pot.phi(r, 0.5 * (xi + eta));
                if !(mid < 0.5 * (v + pot.phi(r, eta))) {
                    rep.midpoint_convex = false;
                }
            }
        }
    }
    rep
}
