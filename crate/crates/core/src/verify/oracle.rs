use num_complex::Complex64;

use crate::error::{HusError, Result};
use crate::mobius::MobiusMap;
use crate::regions::{circumcircle, sample_boundary, DiskSpec};

/// Circle fitted through sampled images, with its worst sample residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCircle {
    pub disk: DiskSpec,
    pub residual: f64,
}

/// Fits the image of `∂spec` under `m` by averaging circumcircles of
/// sample triples spaced a third of the circle apart.
pub fn oracle_circle_image(m: &MobiusMap, spec: &DiskSpec, n: usize) -> Result<OracleCircle> {
    if n < 16 {
        return Err(HusError::InvalidParameter(format!("need at least 16 samples, got {n}")));
    }
    let samples = sample_boundary(&DiskSpec::circle(spec.center, spec.radius), n);
    let mut images = Vec::with_capacity(n);
    for z in samples {
        if let Some(pole) = m.pole() {
            if (z - pole).norm() <= 1e-9 {
                return Err(HusError::ImageIsLine);
            }
        }
        images.push(m.apply_finite(z).as_finite().ok_or(HusError::ImageIsLine)?);
    }
    let third = n / 3;
    let (mut center, mut radius, mut count) = (Complex64::new(0.0, 0.0), 0.0, 0usize);
    for j in 0..third {
        let (p, q, r) = (images[j], images[j + third], images[j + 2 * third]);
        if let Some((c, rad)) = circumcircle(p, q, r) {
            center += c;
            radius += rad;
            count += 1;
        }
    }
    if count == 0 {
        return Err(HusError::ImageIsLine);
    }
    center /= count as f64;
    radius /= count as f64;
    let residual = images
        .iter()
        .map(|w| ((w - center).norm() - radius).abs())
        .fold(0.0, f64::max);
    Ok(OracleCircle {
        disk: DiskSpec::circle(center, radius),
        residual,
    })
}
