use crate::geometry::Sphere;
use crate::{Error, Result};

/// Polynomial `Σ_k c_k r^k` in the distance from the common center.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPoly {
    pub coeffs: Vec<f64>,
}

impl RadialPoly {
    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, c)| acc * r + k as f64 * c)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let at = |p: &Self, k: usize| p.coeffs.get(k).copied().unwrap_or(0.0);
        Self {
            coeffs: (0..n).map(|k| f(at(self, k), at(other, k))).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }
}

/// One hole-filled function `v_α`: supported on the ball `r < outer_radius`
/// (everything for the outermost region), equal to `on_region` on its own
/// shell and to `fill` inside its hole. Shells are closed on the inside,
/// `hole_radius <= r < outer_radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct HoleFilled {
    pub region: usize,
    pub outer_radius: Option<f64>,
    pub hole_radius: Option<f64>,
    pub on_region: RadialPoly,
    pub fill: Option<RadialPoly>,
}

impl HoleFilled {
    pub fn value(&self, r: f64) -> f64 {
        if let Some(outer) = self.outer_radius {
            if r >= outer {
                return 0.0;
            }
        }
        match (self.hole_radius, &self.fill) {
            (Some(h), Some(fill)) if r < h => fill.eval(r),
            _ => self.on_region.eval(r),
        }
    }
}

/// Fill of a ball of radius `rho` matching value and radial derivative of
/// `p` at `r = rho`: the `l = 0` right inverse `c1 + c2 (r/ρ)²` applied to
/// the flipped trace.
fn fill_hole(p: &RadialPoly, rho: f64) -> RadialPoly {
    let v = p.eval(rho);
    let dv = p.derivative(rho);
    // value v, radial slope dv at the hole boundary
    let c2 = rho * dv / 2.0;
    let c1 = v - c2;
    RadialPoly {
        coeffs: vec![c1, 0.0, c2 / (rho * rho)],
    }
}

/// Decomposes a tuple of radially symmetric functions on concentric regions
/// into hole-filled pieces whose sum reproduces the tuple.
///
/// `interfaces` are the spheres separating the regions, radii increasing
/// and all with the same center. `regions` lists the data from the outermost
/// region inwards, so `regions.len() == interfaces.len() + 1`.
pub fn layered_decomposition(
    regions: &[RadialPoly],
    interfaces: &[Sphere],
) -> Result<Vec<HoleFilled>> {
    if regions.len() != interfaces.len() + 1 {
        return Err(Error::InvalidInput(format!(
            "{} regions need {} interfaces, got {}",
            regions.len(),
            regions.len().saturating_sub(1),
            interfaces.len()
        )));
    }
    for w in interfaces.windows(2) {
        if (w[0].center - w[1].center).norm() > 1e-12 * (1.0 + w[0].center.norm()) {
            return Err(Error::GeometryUnsupported(
                "layered decomposition needs concentric interfaces".into(),
            ));
        }
        if !(w[0].radius < w[1].radius) {
            return Err(Error::GeometryUnsupported(
                "interface radii must be strictly increasing".into(),
            ));
        }
    }
    if interfaces.iter().any(|s| !(s.radius > 0.0)) {
        return Err(Error::GeometryUnsupported(
            "interface radii must be positive".into(),
        ));
    }
    let n = interfaces.len();
    let radius_at = |k: isize| -> Option<f64> {
        if k < 0 || k as usize >= n {
            None
        } else {
            Some(interfaces[k as usize].radius)
        }
    };
    let mut out = Vec::with_capacity(regions.len());
    // Σ of the fills of all previous pieces, valid inside the current region
    let mut below = RadialPoly::constant(0.0);
    for (alpha, data) in regions.iter().enumerate() {
        let outer_radius = radius_at(n as isize - alpha as isize);
        let hole_radius = radius_at(n as isize - 1 - alpha as isize);
        let on_region = data.sub(&below);
        let fill = hole_radius.map(|h| fill_hole(&on_region, h));
        if let Some(f) = &fill {
            below = below.add(f);
        }
        out.push(HoleFilled {
            region: alpha,
            outer_radius,
            hole_radius,
            on_region,
            fill,
        });
    }
    Ok(out)
}

/// `Σ_α v_α(r)`, summed in region order.
pub fn reassemble(pieces: &[HoleFilled], r: f64) -> f64 {
    pieces.iter().fold(0.0, |acc, p| acc + p.value(r))
}
