//! JSON configuration files and the numeric literal syntax shared with the
//! command-line flags.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use apw_core::geometry::{MuffinTinGeometry, Sphere, Vec3};
use apw_core::secular::PotentialSpec;
use apw_core::Complex64;
use serde::de::{DeserializeOwned, Error as _};
use serde::{Deserialize, Deserializer};

use crate::CliError;

/// Parses a real number, also accepting products and quotients of numbers
/// and `pi`: `pi`, `-pi`, `2*pi`, `pi/2`, `1.5*pi/4`.
pub fn parse_real(text: &str) -> Result<f64, String> {
    let s = text.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let mut value = 1.0;
    let mut divide = false;
    let mut rest = s;
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let factor = rest[..end].trim();
        let f = match factor {
            "pi" => PI,
            "-pi" => -PI,
            _ => factor
                .parse::<f64>()
                .map_err(|_| format!("cannot parse `{text}` as a number"))?,
        };
        value = if divide { value / f } else { value * f };
        if end == rest.len() {
            break;
        }
        divide = rest.as_bytes()[end] == b'/';
        rest = &rest[end + 1..];
    }
    if !value.is_finite() {
        return Err(format!("`{text}` is not finite"));
    }
    Ok(value)
}

/// A real number in a config file: a JSON number or a string accepted by
/// [`parse_real`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(Real(v)),
            Raw::Text(t) => parse_real(&t).map(Real).map_err(D::Error::custom),
        }
    }
}

/// A complex number: a real or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cplx(pub Complex64);

impl<'de> Deserialize<'de> for Cplx {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Real(Real),
            Pair([Real; 2]),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Real(r) => Cplx(Complex64::new(r.0, 0.0)),
            Raw::Pair([re, im]) => Cplx(Complex64::new(re.0, im.0)),
        })
    }
}

pub fn vec3(v: &[Real; 3]) -> Vec3 {
    Vec3::new(v[0].0, v[1].0, v[2].0)
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum CellConfig {
    /// Side length of a cubic cell.
    Cubic(Real),
    /// Three primitive vectors, one per row.
    Vectors([[Real; 3]; 3]),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereConfig {
    pub center: [Real; 3],
    pub radius: Real,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub cell: CellConfig,
    pub spheres: Vec<SphereConfig>,
}

impl GeometryConfig {
    pub fn build(&self) -> Result<Arc<MuffinTinGeometry>, CliError> {
        let spheres = self
            .spheres
            .iter()
            .map(|s| Sphere::new(vec3(&s.center), s.radius.0))
            .collect();
        let geom = match &self.cell {
            CellConfig::Cubic(side) => MuffinTinGeometry::cubic(side.0, spheres)?,
            CellConfig::Vectors(rows) => {
                MuffinTinGeometry::new([vec3(&rows[0]), vec3(&rows[1]), vec3(&rows[2])], spheres)?
            }
        };
        Ok(Arc::new(geom))
    }
}

/// The potential, defaulting to zero everywhere.
pub fn potential_or_zero(
    p: Option<PotentialSpec>,
    geom: &MuffinTinGeometry,
) -> Result<PotentialSpec, CliError> {
    let p = p.unwrap_or_else(|| PotentialSpec::zero(geom.spheres().len()));
    if p.spheres.len() != geom.spheres().len() {
        return Err(CliError::Config(format!(
            "potential lists {} spheres, geometry has {}",
            p.spheres.len(),
            geom.spheres().len()
        )));
    }
    for v in &p.spheres {
        v.validate()?;
    }
    Ok(p)
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            CliError::Config(format!("config not found: {}", path.display()))
        } else {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        }
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_literals() {
        assert_eq!(parse_real("pi").unwrap(), PI);
        assert_eq!(parse_real(" 2*pi ").unwrap(), 2.0 * PI);
        assert_eq!(parse_real("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_real("-pi").unwrap(), -PI);
        assert_eq!(parse_real("1.5*pi/4").unwrap(), 1.5 * PI / 4.0);
        assert_eq!(parse_real("-0.25").unwrap(), -0.25);
        assert!(parse_real("tau").is_err());
        assert!(parse_real("1/0").is_err());
        assert!(parse_real("2**pi").is_err());
    }

    #[test]
    fn reals_and_complex_in_json() {
        let v: Vec<Real> = serde_json::from_str(r#"[1, "pi", "2*pi"]"#).unwrap();
        assert_eq!(v, vec![Real(1.0), Real(PI), Real(2.0 * PI)]);
        let c: Vec<Cplx> = serde_json::from_str(r#"[0.5, [1, -2]]"#).unwrap();
        assert_eq!(c[0].0, Complex64::new(0.5, 0.0));
        assert_eq!(c[1].0, Complex64::new(1.0, -2.0));
    }
}
