//! Unit cells with non-overlapping atomic spheres.

use std::f64::consts::PI;

use nalgebra::Matrix3;

use crate::{Error, Result};

pub type Vec3 = nalgebra::Vector3<f64>;

/// Label of the layout assumption checked by [`MuffinTinGeometry::new`]:
/// disjoint regions whose closures tile the cell.
pub const LAYOUT_ASSUMPTION: &str = "(A')";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
}

impl Sphere {
    pub fn new(center: Vec3, radius: f64) -> Self {
        Self { center, radius }
    }
}

/// Parallelepiped cell `D = {Σ c_i a_i : 0 < c_i < 1}` with spheres whose
/// closures are pairwise disjoint and lie strictly inside `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct MuffinTinGeometry {
    cell: [Vec3; 3],
    spheres: Vec<Sphere>,
    reciprocal: [Vec3; 3],
    volume: f64,
}

impl MuffinTinGeometry {
    pub fn new(cell: [Vec3; 3], spheres: Vec<Sphere>) -> Result<Self> {
        let invalid = |detail: String| Error::InvalidGeometry {
            assumption: LAYOUT_ASSUMPTION,
            detail,
        };
        for v in &cell {
            if !v.iter().all(|c| c.is_finite()) {
                return Err(Error::InvalidInput("cell vectors must be finite".into()));
            }
        }
        let a = Matrix3::from_columns(&cell);
        let det = a.determinant();
        let scale = cell[0].norm() * cell[1].norm() * cell[2].norm();
        if scale == 0.0 || det.abs() <= 1e-12 * scale {
            return Err(invalid("cell vectors are linearly dependent".into()));
        }
        let inv_t = a.try_inverse().expect("nonsingular cell").transpose();
        let reciprocal = [
            inv_t.column(0) * (2.0 * PI),
            inv_t.column(1) * (2.0 * PI),
            inv_t.column(2) * (2.0 * PI),
        ];
        let geom = Self {
            cell,
            spheres,
            reciprocal,
            volume: det.abs(),
        };

        for (i, s) in geom.spheres.iter().enumerate() {
            if !(s.radius > 0.0 && s.radius.is_finite()) || !s.center.iter().all(|c| c.is_finite())
            {
                return Err(invalid(format!(
                    "sphere {i} has a non-positive or non-finite radius/center"
                )));
            }
            let frac = geom.fractional(&s.center);
            for d in 0..3 {
                // distance between parallel faces c_d = 0 and c_d = 1
                let width = 2.0 * PI / geom.reciprocal[d].norm();
                let gap = frac[d].min(1.0 - frac[d]) * width;
                if gap <= s.radius {
                    return Err(invalid(format!(
                        "closed sphere {i} (radius {}) is not strictly inside the cell: distance to face {} is {gap}",
                        s.radius,
                        d + 1
                    )));
                }
            }
        }
        for i in 0..geom.spheres.len() {
            for j in (i + 1)..geom.spheres.len() {
                let (si, sj) = (&geom.spheres[i], &geom.spheres[j]);
                let dist = (si.center - sj.center).norm();
                if dist <= si.radius + sj.radius {
                    return Err(invalid(format!(
                        "closed spheres {i} and {j} intersect (center distance {dist}, radii {} + {})",
                        si.radius, sj.radius
                    )));
                }
            }
        }
        Ok(geom)
    }

    /// Cube of side `side` spanned by the coordinate axes.
    pub fn cubic(side: f64, spheres: Vec<Sphere>) -> Result<Self> {
        Self::new(
            [
                Vec3::new(side, 0.0, 0.0),
                Vec3::new(0.0, side, 0.0),
                Vec3::new(0.0, 0.0, side),
            ],
            spheres,
        )
    }

    pub fn cell(&self) -> &[Vec3; 3] {
        &self.cell
    }

    pub fn spheres(&self) -> &[Sphere] {
        &self.spheres
    }

    /// `b_i` with `b_i · a_j = 2π δ_ij`.
    pub fn reciprocal(&self) -> &[Vec3; 3] {
        &self.reciprocal
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Coordinates `c` with `x = Σ c_i a_i`.
    pub fn fractional(&self, x: &Vec3) -> Vec3 {
        Vec3::new(
            self.reciprocal[0].dot(x),
            self.reciprocal[1].dot(x),
            self.reciprocal[2].dot(x),
        ) / (2.0 * PI)
    }

    pub fn in_closed_cell(&self, x: &Vec3) -> bool {
        let c = self.fractional(x);
        c.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v))
    }

    /// Index of the closed sphere containing `x`, if any.
    pub fn sphere_containing(&self, x: &Vec3) -> Option<usize> {
        self.spheres
            .iter()
            .position(|s| (x - s.center).norm() <= s.radius)
    }

    /// Reciprocal lattice vector `Σ n_i b_i`.
    pub fn g_vector(&self, n: [i64; 3]) -> Vec3 {
        self.reciprocal[0] * n[0] as f64
            + self.reciprocal[1] * n[1] as f64
            + self.reciprocal[2] * n[2] as f64
    }

    /// Integer coordinates of `g` if it is a reciprocal lattice vector.
    pub fn reciprocal_indices(&self, g: &Vec3) -> Result<[i64; 3]> {
        let mut n = [0i64; 3];
        for (i, a) in self.cell.iter().enumerate() {
            let t = a.dot(g) / (2.0 * PI);
            let r = t.round();
            if (t - r).abs() > 1e-8 * (1.0 + t.abs()) {
                return Err(Error::InvalidReciprocal {
                    x: g[0],
                    y: g[1],
                    z: g[2],
                });
            }
            n[i] = r as i64;
        }
        Ok(n)
    }

    /// The `count` reciprocal lattice vectors with the smallest `|k + G|`,
    /// ties broken by integer coordinates so the selection is deterministic.
    pub fn shortest_g_vectors(&self, k: &Vec3, count: usize) -> Vec<Vec3> {
        if count == 0 {
            return Vec::new();
        }
        let mut nmax = ((count as f64).cbrt().ceil() as i64).max(1);
        loop {
            let mut cand: Vec<(f64, [i64; 3])> = Vec::new();
            for i in -nmax..=nmax {
                for j in -nmax..=nmax {
                    for l in -nmax..=nmax {
                        let n = [i, j, l];
                        cand.push(((k + self.g_vector(n)).norm_squared(), n));
                    }
                }
            }
            cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let radius = cand[count - 1].0.sqrt();
            // every G with |k+G| <= radius has |n_i| <= (radius + |k|) |a_i| / 2π
            let needed = self
                .cell
                .iter()
                .map(|a| ((radius + k.norm()) * a.norm() / (2.0 * PI)).ceil() as i64)
                .max()
                .unwrap();
            if needed <= nmax {
                return cand[..count]
                    .iter()
                    .map(|(_, n)| self.g_vector(*n))
                    .collect();
            }
            nmax = needed;
        }
    }
}

/// Polar and azimuthal angles of `v`; the zero vector maps to `(0, 0)`.
pub fn angles(v: &Vec3) -> (f64, f64) {
    let r = v.norm();
    if r == 0.0 {
        return (0.0, 0.0);
    }
    let theta = (v[2] / r).clamp(-1.0, 1.0).acos();
    let phi = v[1].atan2(v[0]);
    (theta, phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocal_vectors_are_dual() {
        let cell = [
            Vec3::new(1.0, 0.2, 0.0),
            Vec3::new(0.1, 1.3, 0.0),
            Vec3::new(0.0, 0.4, 0.9),
        ];
        let g = MuffinTinGeometry::new(cell, vec![]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 2.0 * PI } else { 0.0 };
                assert!((g.reciprocal()[i].dot(&cell[j]) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn overlapping_spheres_name_the_assumption() {
        let s = vec![
            Sphere::new(Vec3::new(3.0, 5.0, 5.0), 1.5),
            Sphere::new(Vec3::new(5.5, 5.0, 5.0), 1.5),
        ];
        let err = MuffinTinGeometry::cubic(10.0, s).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidGeometry {
                assumption: "(A')",
                ..
            }
        ));
    }

    #[test]
    fn touching_the_face_is_rejected() {
        let s = vec![Sphere::new(Vec3::new(1.0, 5.0, 5.0), 1.0)];
        assert!(MuffinTinGeometry::cubic(10.0, s).is_err());
        let s = vec![Sphere::new(Vec3::new(1.0, 5.0, 5.0), 0.999)];
        assert!(MuffinTinGeometry::cubic(10.0, s).is_ok());
    }

    #[test]
    fn dependent_cell_rejected() {
        let cell = [
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(2.0, 0.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
        ];
        assert!(MuffinTinGeometry::new(cell, vec![]).is_err());
    }

    #[test]
    fn first_shells_of_cubic_lattice() {
        let g = MuffinTinGeometry::cubic(2.0 * PI, vec![]).unwrap();
        let gs = g.shortest_g_vectors(&Vec3::zeros(), 27);
        let mut n2: Vec<i64> = gs.iter().map(|v| v.norm_squared().round() as i64).collect();
        n2.sort();
        assert_eq!(n2.iter().filter(|&&v| v == 0).count(), 1);
        assert_eq!(n2.iter().filter(|&&v| v == 1).count(), 6);
        assert_eq!(n2.iter().filter(|&&v| v == 2).count(), 12);
        assert_eq!(n2.iter().filter(|&&v| v == 3).count(), 8);
    }

    #[test]
    fn reciprocal_membership() {
        let g = MuffinTinGeometry::cubic(2.0, vec![]).unwrap();
        assert_eq!(
            g.reciprocal_indices(&Vec3::new(PI, -2.0 * PI, 0.0))
                .unwrap(),
            [1, -2, 0]
        );
        assert!(g.reciprocal_indices(&Vec3::new(1.0, 0.0, 0.0)).is_err());
    }
}
