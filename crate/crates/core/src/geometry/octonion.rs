//! The octonion multiplication table and the induced cross product on R^7.
//!
//! Imaginary units are `ε1..ε7` (0-based index `i` means `ε_{i+1}`). The table
//! is generated by seven oriented Fano lines: for a line `(a, b, c)`,
//! `ε_a ε_b = ε_c` and cyclically, with anticommutation for the reversed order.

use std::sync::OnceLock;

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

pub type Vec7 = SVector<f64, 7>;
pub type Mat7 = SMatrix<f64, 7, 7>;

/// Oriented Fano lines, 1-based.
pub const FANO_LINES: [(usize, usize, usize); 7] = [
    (1, 2, 3),
    (1, 4, 5),
    (1, 7, 6),
    (2, 4, 6),
    (2, 5, 7),
    (3, 4, 7),
    (3, 6, 5),
];

/// `table[i][j] = (sign, k)` with `ε_i ε_j = sign · ε_k` (0-based, `i != j`).
fn table() -> &'static [[(i8, usize); 7]; 7] {
    static TABLE: OnceLock<[[(i8, usize); 7]; 7]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[(0i8, usize::MAX); 7]; 7];
        for &(a, b, c) in &FANO_LINES {
            let (a, b, c) = (a - 1, b - 1, c - 1);
            for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                t[x][y] = (1, z);
                t[y][x] = (-1, z);
            }
        }
        t
    })
}

/// Product of two imaginary units: `Some((sign, k))`, or `None` when `i == j`
/// (then `ε_i ε_i = -1`).
pub fn unit_product(i: usize, j: usize) -> Option<(i8, usize)> {
    if i == j {
        None
    } else {
        Some(table()[i][j])
    }
}

/// The 7-dimensional cross product `a × b = Im(ab)`.
pub fn cross(a: &Vec7, b: &Vec7) -> Vec7 {
    let t = table();
    let mut out = Vec7::zeros();
    for i in 0..7 {
        if a[i] == 0.0 {
            continue;
        }
        for j in 0..7 {
            if i == j {
                continue;
            }
            let (s, k) = t[i][j];
            out[k] += f64::from(s) * a[i] * b[j];
        }
    }
    out
}

/// Matrix of `v ↦ u × v`.
pub fn cross_matrix(u: &Vec7) -> Mat7 {
    let mut m = Mat7::zeros();
    for j in 0..7 {
        let col = cross(u, &Vec7::from_fn(|r, _| if r == j { 1.0 } else { 0.0 }));
        m.set_column(j, &col);
    }
    m
}

/// The associative three-form `φ(a, b, c) = ⟨a × b, c⟩`.
pub fn phi(a: &Vec7, b: &Vec7, c: &Vec7) -> f64 {
    cross(a, b).dot(c)
}

/// Full octonion product on `(real, imaginary)` pairs.
pub fn octonion_mul(x: (f64, Vec7), y: (f64, Vec7)) -> (f64, Vec7) {
    let (a0, a) = x;
    let (b0, b) = y;
    let real = a0 * b0 - a.dot(&b);
    let imag = b * a0 + a * b0 + cross(&a, &b);
    (real, imag)
}

/// Machine-readable form of the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OctonionTable {
    pub schema: String,
    pub convention: String,
    /// 1-based oriented lines `(a, b, c)` meaning `ε_a ε_b = ε_c`.
    pub lines: Vec<[usize; 3]>,
    /// `table[i][j] = ±k` (1-based) for `ε_{i+1} ε_{j+1} = ±ε_k`; the diagonal
    /// holds 0 and stands for `ε_i ε_i = -1`.
    pub table: Vec<Vec<i32>>,
}

impl OctonionTable {
    pub fn current() -> Self {
        let t = table();
        let rows = (0..7)
            .map(|i| {
                (0..7)
                    .map(|j| {
                        if i == j {
                            0
                        } else {
                            let (s, k) = t[i][j];
                            i32::from(s) * (k as i32 + 1)
                        }
                    })
                    .collect()
            })
            .collect();
        OctonionTable {
            schema: "nk6-octonion/1".into(),
            convention: "Fano lines e_a e_b = e_c, cyclic; reversed order flips sign; \
                         diagonal 0 means e_i e_i = -1"
                .into(),
            lines: FANO_LINES.iter().map(|&(a, b, c)| [a, b, c]).collect(),
            table: rows,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

/// Published copy of the table shipped with the crate.
pub const PUBLISHED_TABLE_JSON: &str = include_str!("../../data/octonion_table.json");

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(i: usize) -> Vec7 {
        Vec7::from_fn(|r, _| if r == i { 1.0 } else { 0.0 })
    }

    fn random(rng: &mut ChaCha8Rng) -> Vec7 {
        Vec7::from_fn(|_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn declared_entries() {
        assert_eq!(cross(&e(0), &e(1)), e(2));
        assert_eq!(cross(&e(0), &e(3)), e(4));
        assert_eq!(cross(&e(1), &e(3)), e(5));
        assert_eq!(cross(&e(2), &e(3)), e(6));
        assert_eq!(cross(&e(1), &e(4)), e(6));
        assert_eq!(cross(&e(1), &e(0)), -e(2));
    }

    #[test]
    fn every_pair_is_covered_once() {
        let t = table();
        for i in 0..7 {
            for j in 0..7 {
                if i != j {
                    assert!(t[i][j].1 < 7);
                    assert_ne!(t[i][j].1, i);
                    assert_ne!(t[i][j].1, j);
                }
            }
        }
    }

    #[test]
    fn octonions_are_alternative_and_normed() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let x = (rng.random_range(-1.0..1.0), random(&mut rng));
            let y = (rng.random_range(-1.0..1.0), random(&mut rng));
            let xx = octonion_mul(x, x);
            let lhs = octonion_mul(x, octonion_mul(x, y));
            let rhs = octonion_mul(xx, y);
            assert!((lhs.0 - rhs.0).abs() < 1e-12);
            assert!((lhs.1 - rhs.1).norm() < 1e-12);
            let n = |z: (f64, Vec7)| z.0 * z.0 + z.1.norm_squared();
            assert!((n(octonion_mul(x, y)) - n(x) * n(y)).abs() < 1e-12);
        }
    }

    #[test]
    fn cross_product_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let (a, b, c) = (random(&mut rng), random(&mut rng), random(&mut rng));
            let ab = cross(&a, &b);
            assert!(ab.dot(&a).abs() < 1e-13);
            let lagrange = a.norm_squared() * b.norm_squared() - a.dot(&b).powi(2);
            assert!((ab.norm_squared() - lagrange).abs() < 1e-12);
            let double = cross(&a, &ab);
            assert!((double - (a * a.dot(&b) - b * a.norm_squared())).norm() < 1e-12);
            assert!((phi(&a, &b, &c) - phi(&b, &c, &a)).abs() < 1e-13);
            assert!((phi(&a, &b, &c) + phi(&b, &a, &c)).abs() < 1e-13);
            assert!((cross_matrix(&a) * b - ab).norm() < 1e-14);
        }
    }

    #[test]
    fn published_json_matches_code() {
        let published: OctonionTable = serde_json::from_str(PUBLISHED_TABLE_JSON).unwrap();
        assert_eq!(published, OctonionTable::current());
        let table = &published.table;
        assert_eq!(table.len(), 7);
        assert!(table.iter().all(|row| row.len() == 7));
    }
}
