//! JSON export of every region of a profile, with boundary polylines.

use num_complex::Complex64;
use serde::Serialize;

use super::*;
use crate::extended::ExtendedComplex;
use crate::verify::oracle_circle_image;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PieceExport {
    pub id: String,
    pub frame: Frame,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_center: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_residual: Option<f64>,
    pub polyline: Vec<ExtendedComplex>,
    /// The same outline pulled back to the z-plane through `h^{-1}`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_polyline: Option<Vec<ExtendedComplex>>,
}

impl PieceExport {
    fn plain(id: &str, frame: Frame, polyline: Vec<ExtendedComplex>) -> Self {
        PieceExport {
            id: id.into(),
            frame,
            center: None,
            radius: None,
            width: None,
            oracle_center: None,
            oracle_radius: None,
            oracle_residual: None,
            polyline,
            z_polyline: None,
        }
    }

    fn disk(id: &str, frame: Frame, disk: &DiskSpec, samples: usize) -> Self {
        PieceExport {
            center: Some(complex_pair(disk.center)),
            radius: Some(disk.radius),
            ..Self::plain(id, frame, polyline(disk, samples))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionExport {
    pub id: String,
    pub frame: Frame,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sense: Option<Sense>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pieces: Vec<PieceExport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub polyline: Vec<ExtendedComplex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nesting_margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothesis_violated: Option<bool>,
}

impl RegionExport {
    fn disk(id: &str, frame: Frame, disk: &DiskSpec, samples: usize) -> Self {
        RegionExport {
            id: id.into(),
            frame,
            kind: "disk",
            center: Some(complex_pair(disk.center)),
            radius: Some(disk.radius),
            sense: Some(disk.sense),
            pieces: Vec::new(),
            polyline: polyline(disk, samples),
            nesting_margin: None,
            hypothesis_violated: None,
        }
    }

    fn union(id: &str, frame: Frame, pieces: Vec<PieceExport>) -> Self {
        RegionExport {
            id: id.into(),
            frame,
            kind: "union",
            center: None,
            radius: None,
            sense: None,
            pieces,
            polyline: Vec::new(),
            nesting_margin: None,
            hypothesis_violated: None,
        }
    }
}

fn polyline(disk: &DiskSpec, samples: usize) -> Vec<ExtendedComplex> {
    sample_boundary(disk, samples)
        .into_iter()
        .map(ExtendedComplex::Finite)
        .collect()
}

/// `∂S(r)`, `∂T(r)`, the two closed-form image circles, the avoided region,
/// `D_ε̃` and `E_f`, in that order.
pub fn export_regions(p: &HyperbolicProfile, r: f64, delta: f64, samples: usize) -> Result<Vec<RegionExport>> {
    if samples < 3 {
        return Err(HusError::InvalidParameter(format!("need at least 3 samples, got {samples}")));
    }
    if !(r > 0.0) {
        return Err(HusError::InvalidParameter(format!("r must be positive, got {r}")));
    }
    let avoided = AvoidedRegionW::standard(p.k(), delta)?;
    let et = epsilon_tilde(p, delta)?;

    let s_region = RegionExport::disk("s_r", Frame::Z, &s_disk(p, r), samples);
    let mut t_region = RegionExport::disk("t_r", Frame::Z, &t_disk(p, r), samples);
    match closure_nesting_margin(p, r) {
        Ok(m) => {
            t_region.nesting_margin = Some(m);
            t_region.hypothesis_violated = Some(false);
        }
        Err(_) => t_region.hypothesis_violated = Some(true),
    }

    let oracle_n = samples.max(16);
    let circles = [
        (
            "h_boundary_s_inv_sqrt_k",
            DiskSpec::circle(p.pole(), 1.0 / (p.sqrt_k() * p.c_abs())),
            image_circle_sqrtk(p),
        ),
        (
            "h_boundary_s_one_plus_half_tau",
            DiskSpec::circle(p.pole(), (1.0 + 0.5 * p.tau()) / p.c_abs()),
            image_circle_tau_half(p),
        ),
    ];
    let mut image_pieces = Vec::with_capacity(2);
    for (id, z_circle, closed) in circles {
        let oracle = oracle_circle_image(p.h(), &z_circle, oracle_n)?;
        let mut piece = PieceExport::disk(id, Frame::W, &closed, samples);
        piece.oracle_center = Some(complex_pair(oracle.disk.center));
        piece.oracle_radius = Some(oracle.disk.radius);
        piece.oracle_residual = Some(
            (oracle.disk.center - closed.center)
                .norm()
                .max((oracle.disk.radius - closed.radius).abs())
                .max(oracle.residual),
        );
        image_pieces.push(piece);
    }

    let avoided_pieces = [
        ("r1", AvoidedPiece::LeftHalfDisk),
        ("r2", AvoidedPiece::Strip),
        ("r3", AvoidedPiece::RightHalfDisk),
    ]
    .into_iter()
    .zip(avoided.widths())
    .map(|((id, piece), width)| {
        let outline: Vec<Complex64> = avoided.piece_outline(piece, samples);
        let mut out = PieceExport::plain(
            id,
            Frame::W,
            outline.iter().copied().map(ExtendedComplex::Finite).collect(),
        );
        out.width = Some(width);
        out.z_polyline = Some(
            outline
                .into_iter()
                .map(|w| p.h_inv_raw(ExtendedComplex::Finite(w)))
                .collect(),
        );
        out
    })
    .collect();

    let d_eps = DiskSpec {
        center: p.pole(),
        radius: et,
        sense: Sense::Interior,
    };
    let outer = image_circle_tau_half(p).with_sense(Sense::Interior);
    let hole = DiskSpec {
        center: Complex64::new(0.0, 0.0),
        radius: escape_inner_radius(p.k(), delta),
        sense: Sense::Exterior,
    };

    Ok(vec![
        s_region,
        t_region,
        RegionExport::union("h_images", Frame::W, image_pieces),
        RegionExport::union("avoided_region", Frame::W, avoided_pieces),
        RegionExport::disk("d_eps_tilde", Frame::Z, &d_eps, samples),
        RegionExport::union(
            "escape_region",
            Frame::W,
            vec![
                PieceExport::disk("outer_disk", Frame::W, &outer, samples),
                PieceExport::disk("removed_ball", Frame::W, &hole, samples),
            ],
        ),
    ])
}
