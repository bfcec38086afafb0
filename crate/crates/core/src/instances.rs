//! Small named triangulations used by tests, examples and the CLI.
//!
//! Every instance has exterior `(0, 1, 2)`.

use crate::drawing::Drawing;
use crate::triangulation::Triangulation;

/// `K4`: one interior vertex 3.
pub fn k4() -> Triangulation {
    Triangulation::build(4, [0, 1, 2], vec![[3, 1, 0], [3, 2, 1], [3, 0, 2]]).unwrap()
}

/// `K4` with vertex 4 stacked into face `(3, 2, 1)`.
pub fn stacked_t5() -> Triangulation {
    Triangulation::build(5, [0, 1, 2], vec![[3, 1, 0], [3, 0, 2], [4, 3, 2], [4, 2, 1], [4, 1, 3]]).unwrap()
}

/// `stacked_t5` with vertex 5 stacked into face `(4, 3, 2)`.
pub fn doubly_stacked_k4() -> Triangulation {
    Triangulation::build(6, [0, 1, 2], vec![[3, 1, 0], [3, 0, 2], [4, 2, 1], [4, 1, 3], [5, 4, 3], [5, 3, 2], [5, 2, 4]]).unwrap()
}

/// The octahedron: inner triangle 3, 4, 5 with 3 opposite 0, 4 opposite 1, 5 opposite 2.
pub fn octahedron() -> Triangulation {
    Triangulation::build(6, [0, 1, 2], vec![[3, 5, 4], [2, 1, 3], [0, 5, 1], [0, 2, 4], [0, 4, 5], [1, 5, 3], [2, 3, 4]]).unwrap()
}

/// The octahedron with vertex 6 stacked into its central face `(3, 5, 4)`.
pub fn stacked_octahedron() -> Triangulation {
    Triangulation::build(
        7,
        [0, 1, 2],
        vec![[6, 3, 5], [6, 5, 4], [6, 4, 3], [2, 1, 3], [0, 5, 1], [0, 2, 4], [0, 4, 5], [1, 5, 3], [2, 3, 4]],
    )
    .unwrap()
}

/// Seven vertices: `x = 3`, `z = 5`, `y = 6` and one more vertex 4, with
/// `R_1(x)` inside `R_1(y)` in every wood.
pub fn nonpositive_witness() -> Triangulation {
    Triangulation::build(
        7,
        [0, 1, 2],
        vec![[0, 2, 5], [0, 4, 1], [0, 5, 4], [1, 3, 2], [1, 4, 6], [1, 6, 3], [2, 3, 5], [3, 6, 5], [4, 5, 6]],
    )
    .unwrap()
}

/// The hand-placed Cartesian points drawn for [`nonpositive_witness`], as decimal strings.
pub const WITNESS_POINTS: [[&str; 2]; 7] =
    [["-1.22", "12.70"], ["9.15", "-4.05"], ["-11.30", "-4.37"], ["-0.61", "0.71"], ["0.50", "2.86"], ["-0.66", "2.28"], ["6.51", "-2.38"]];

/// A planar drawing of [`nonpositive_witness`] whose edges sit in their cones but whose
/// face 7 needs weight -1.
pub fn witness_nonpositive_drawing() -> Drawing {
    Drawing::new(24, vec![[24, 0, 0], [0, 24, 0], [0, 0, 24], [3, 16, 5], [14, 8, 2], [8, 6, 10], [9, 12, 3]])
}
