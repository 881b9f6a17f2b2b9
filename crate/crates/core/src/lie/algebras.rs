//! The concrete algebras: the principal algebra on (x, y, z, u), the
//! twelve-dimensional equivalence algebra on (x, y, z, u, f) and its
//! eight-dimensional projection onto (x, y, z, f).

use super::{BaseSpace, LieBasis, VectorField};

fn basis(name: &str, base: BaseSpace, prefix: &str, fields: &[&[(&str, &str)]]) -> LieBasis {
    let labels = (1..=fields.len()).map(|i| format!("{prefix}{i}")).collect();
    let fields = fields
        .iter()
        .map(|pairs| VectorField::parse(base, pairs).expect("catalog fields are valid"))
        .collect();
    LieBasis::new(name, labels, fields).expect("catalog fields are independent")
}

/// `V1..V4`: `∂u, x∂u, y∂u, z∂u`, admitted for every right-hand side.
pub fn principal() -> LieBasis {
    basis(
        "g",
        BaseSpace::E4,
        "V",
        &[&[("u", "1")], &[("u", "x")], &[("u", "y")], &[("u", "z")]],
    )
}

pub const G12_FIELDS: [&[(&str, &str)]; 12] = [
    &[("x", "1")],
    &[("y", "1")],
    &[("z", "1")],
    &[("u", "1")],
    &[("u", "x")],
    &[("u", "y")],
    &[("u", "z")],
    &[("x", "z"), ("z", "-x")],
    &[("x", "y"), ("y", "-x")],
    &[("y", "z"), ("z", "-y")],
    &[("u", "u"), ("f", "2*f")],
    &[("x", "x"), ("y", "y"), ("z", "z"), ("f", "-4*f")],
];

/// `Y1..Y12`, the equivalence algebra.
pub fn g12() -> LieBasis {
    basis("g12", BaseSpace::E5, "Y", &G12_FIELDS)
}

/// For each `Z_i`, the index (1-based) of the `Y` it projects from.
pub const Z_TO_Y: [usize; 8] = [1, 2, 3, 8, 9, 10, 11, 12];

/// `Z1..Z8`, the nonzero projections of `g12` onto (x, y, z, f).
pub fn g8() -> LieBasis {
    let labels = (1..=8).map(|i| format!("Z{i}")).collect();
    let fields = Z_TO_Y
        .iter()
        .map(|&y| {
            VectorField::parse(BaseSpace::E5, G12_FIELDS[y - 1])
                .expect("catalog fields are valid")
                .project(BaseSpace::P4)
        })
        .collect();
    LieBasis::new("g8", labels, fields).expect("catalog fields are independent")
}

/// The printed commutator table: row `i`, column `j` is `[Z_i, Z_j]`.
pub const TABLE1: [[&str; 8]; 8] = [
    ["0", "0", "0", "-Z3", "-Z2", "0", "0", "Z1"],
    ["0", "0", "0", "0", "Z1", "-Z3", "0", "Z2"],
    ["0", "0", "0", "Z1", "0", "Z2", "0", "Z3"],
    ["Z3", "0", "-Z1", "0", "-Z6", "Z5", "0", "0"],
    ["Z2", "-Z1", "0", "Z6", "0", "-Z4", "0", "0"],
    ["0", "Z3", "-Z2", "-Z5", "Z4", "0", "0", "0"],
    ["0", "0", "0", "0", "0", "0", "0", "0"],
    ["-Z1", "-Z2", "-Z3", "0", "0", "0", "0", "0"],
];

/// The printed adjoint table: row `i`, column `j` is `Ad(exp(eps Z_i)) Z_j`.
pub const TABLE2: [[&str; 8]; 8] = [
    ["Z1", "Z2", "Z3", "eps*Z3 + Z4", "eps*Z2 + Z5", "Z6", "Z7", "-eps*Z1 + Z8"],
    ["Z1", "Z2", "Z3", "Z4", "-eps*Z1 + Z5", "eps*Z3 + Z6", "Z7", "-eps*Z2 + Z8"],
    ["Z1", "Z2", "Z3", "-eps*Z1 + Z4", "Z5", "-eps*Z2 + Z6", "Z7", "-eps*Z3 + Z8"],
    [
        "cos(eps)*Z1 - sin(eps)*Z3",
        "Z2",
        "sin(eps)*Z1 + cos(eps)*Z3",
        "Z4",
        "cos(eps)*Z5 + sin(eps)*Z6",
        "-sin(eps)*Z5 + cos(eps)*Z6",
        "Z7",
        "Z8",
    ],
    [
        "cos(eps)*Z1 - sin(eps)*Z2",
        "sin(eps)*Z1 + cos(eps)*Z2",
        "Z3",
        "cos(eps)*Z4 - sin(eps)*Z6",
        "Z5",
        "sin(eps)*Z4 + cos(eps)*Z6",
        "Z7",
        "Z8",
    ],
    [
        "Z1",
        "cos(eps)*Z2 - sin(eps)*Z3",
        "sin(eps)*Z2 + cos(eps)*Z3",
        "cos(eps)*Z4 + sin(eps)*Z5",
        "-sin(eps)*Z4 + cos(eps)*Z5",
        "Z6",
        "Z7",
        "Z8",
    ],
    ["Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8"],
    ["exp(eps)*Z1", "exp(eps)*Z2", "exp(eps)*Z3", "Z4", "Z5", "Z6", "Z7", "Z8"],
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;

    #[test]
    fn projection_of_y11_is_z7() {
        let g = g8();
        assert_eq!(g.field(6).coeff("f"), Expr::int(2) * Expr::var("f"));
        assert!(g.field(6).coeff("u").is_zero());
    }

    #[test]
    fn sizes() {
        assert_eq!(principal().len(), 4);
        assert_eq!(g12().len(), 12);
        assert_eq!(g8().len(), 8);
    }
}
