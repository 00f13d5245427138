//! Reference frameworks with known self-stresses.

use crate::framework::{Framework, Stress};

const S3: f64 = 1.732_050_807_568_877_2;

/// K4 realised without crossings: a centre vertex joined to an equilateral
/// triangle. Spokes carry stress 3, rim edges -1.
pub fn k4_planar() -> (Framework, Stress) {
    let fw = Framework::from_slices(
        2,
        &[
            (1, &[0.0, 0.0]),
            (2, &[1.0, 0.0]),
            (3, &[-0.5, S3 / 2.0]),
            (4, &[-0.5, -S3 / 2.0]),
        ],
        &[(1, 2), (1, 3), (1, 4), (2, 3), (3, 4), (2, 4)],
    )
    .expect("valid framework");
    let s = Stress::from_pairs(
        &fw,
        &[
            ((1, 2), 3.0),
            ((1, 3), 3.0),
            ((1, 4), 3.0),
            ((2, 3), -1.0),
            ((3, 4), -1.0),
            ((2, 4), -1.0),
        ],
    )
    .expect("valid stress");
    (fw, s)
}

/// K4 on the square `(±1, 0), (0, ±1)`; the diagonals cross at the origin.
pub fn k4_nonplanar() -> (Framework, Stress) {
    let fw = Framework::from_slices(
        2,
        &[
            (1, &[1.0, 0.0]),
            (2, &[0.0, 1.0]),
            (3, &[-1.0, 0.0]),
            (4, &[0.0, -1.0]),
        ],
        &[(1, 2), (2, 3), (3, 4), (1, 4), (1, 3), (2, 4)],
    )
    .expect("valid framework");
    let s = Stress::from_pairs(
        &fw,
        &[
            ((1, 2), -1.0),
            ((2, 3), -1.0),
            ((3, 4), -1.0),
            ((1, 4), -1.0),
            ((1, 3), 1.0),
            ((2, 4), 1.0),
        ],
    )
    .expect("valid stress");
    (fw, s)
}

/// Triangular prism drawn in the plane: a 4×2 rectangle with an inner
/// segment. The stress on the inner segment `p5 p6` is fixed to 4 by
/// equilibrium at either of its endpoints.
pub fn prism() -> (Framework, Stress) {
    let fw = Framework::from_slices(
        2,
        &[
            (1, &[-1.0, -1.0]),
            (2, &[3.0, -1.0]),
            (3, &[3.0, 1.0]),
            (4, &[-1.0, 1.0]),
            (5, &[0.0, 0.0]),
            (6, &[2.0, 0.0]),
        ],
        &[
            (1, 2),
            (2, 3),
            (3, 4),
            (1, 4),
            (1, 5),
            (4, 5),
            (2, 6),
            (3, 6),
            (5, 6),
        ],
    )
    .expect("valid framework");
    let s = Stress::from_pairs(
        &fw,
        &[
            ((1, 2), -1.0),
            ((3, 4), -1.0),
            ((2, 3), -2.0),
            ((1, 4), -2.0),
            ((1, 5), 4.0),
            ((4, 5), 4.0),
            ((2, 6), 4.0),
            ((3, 6), 4.0),
            ((5, 6), 4.0),
        ],
    )
    .expect("valid stress");
    (fw, s)
}

/// K5 in space on the unit simplex plus `(1, 1, 1)`.
pub fn k5() -> (Framework, Stress) {
    let fw = Framework::from_slices(
        3,
        &[
            (1, &[0.0, 0.0, 0.0]),
            (2, &[1.0, 0.0, 0.0]),
            (3, &[0.0, 1.0, 0.0]),
            (4, &[0.0, 0.0, 1.0]),
            (5, &[1.0, 1.0, 1.0]),
        ],
        &[
            (1, 2),
            (1, 3),
            (1, 4),
            (1, 5),
            (2, 3),
            (2, 4),
            (2, 5),
            (3, 4),
            (3, 5),
            (4, 5),
        ],
    )
    .expect("valid framework");
    let s = Stress::from_pairs(&fw, &K5_STRESS).expect("valid stress");
    (fw, s)
}

/// Upper triangle of the K5 stress matrix.
pub const K5_STRESS: [((u32, u32), f64); 10] = [
    ((1, 2), 2.0),
    ((1, 3), 2.0),
    ((1, 4), 2.0),
    ((1, 5), -2.0),
    ((2, 3), -1.0),
    ((2, 4), -1.0),
    ((2, 5), 1.0),
    ((3, 4), -1.0),
    ((3, 5), 1.0),
    ((4, 5), 1.0),
];
