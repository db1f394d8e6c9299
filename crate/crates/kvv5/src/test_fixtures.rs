//! Shared construction of the main characteristic-5 surface for unit tests.
//!
//! Integration tests build the same surface through scenario files; unit
//! tests build it directly through the lattice API so the two spellings
//! check each other.

use crate::contraction::{plan_contraction, ContractionModel};
use crate::lattice::{BlowUpRecord, SurfaceModel};

/// Contraction order used throughout: the two four-curve chains, then the
/// two middle cusp curves, then the cuspidal cubic itself.
pub const CONTRACTED: [&str; 11] = [
    "E_a", "L_ad", "L_bc", "E_c", "E_d", "L_cd", "L_ab", "E_b", "G_1", "G_2", "D",
];

/// The rank-12 surface: plane with four points in general position, six
/// connecting lines, a cuspidal cubic through all four points, eight
/// infinitely-near blow-ups, then three more along the cusp.
pub fn char5_surface() -> SurfaceModel {
    let mut p2 = SurfaceModel::projective_plane();
    for line in ["L_ab", "L_ac", "L_ad", "L_bc", "L_bd", "L_cd"] {
        p2.register_plane_curve(line, 1).unwrap();
    }
    p2.register_plane_curve("D", 3).unwrap();

    let records = [
        BlowUpRecord::new("E_a", &[("L_ab", 1), ("L_ac", 1), ("L_ad", 1), ("D", 1)]),
        BlowUpRecord::new("E_b", &[("L_ab", 1), ("L_bc", 1), ("L_bd", 1), ("D", 1)]),
        BlowUpRecord::new("E_c", &[("L_ac", 1), ("L_bc", 1), ("L_cd", 1), ("D", 1)]),
        BlowUpRecord::new("E_d", &[("L_ad", 1), ("L_bd", 1), ("L_cd", 1), ("D", 1)]),
        BlowUpRecord::new("F_a", &[("E_a", 1), ("L_ab", 1), ("D", 1)]),
        BlowUpRecord::new("F_b", &[("E_b", 1), ("L_bc", 1), ("D", 1)]),
        BlowUpRecord::new("F_c", &[("E_c", 1), ("L_cd", 1), ("D", 1)]),
        BlowUpRecord::new("F_d", &[("E_d", 1), ("L_ad", 1), ("D", 1)]),
        BlowUpRecord::new("G_1", &[("D", 2)]),
        BlowUpRecord::new("G_2", &[("D", 1), ("G_1", 1)]),
        BlowUpRecord::new("G_3", &[("D", 1), ("G_1", 1), ("G_2", 1)]),
    ];
    let mut s = p2;
    for r in &records {
        s = s.blow_up(r).unwrap();
    }
    s
}

/// The eleven-curve contraction down to the rank-one target.
pub fn char5_contraction() -> ContractionModel {
    plan_contraction(&char5_surface(), &CONTRACTED).unwrap()
}
