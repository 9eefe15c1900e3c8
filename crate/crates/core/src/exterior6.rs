//! Exterior algebra on the model space (R^6, g0, J0).
//!
//! The model basis is ordered `e1, Je1, e2, Je2, e3, Je3` (indices `0..6`), so
//! `J0` swaps the pairs `(0,1)`, `(2,3)`, `(4,5)` with `J0 e_{2k} = e_{2k+1}` and
//! `J0 e_{2k+1} = -e_{2k}`. Orientation is fixed by
//! `vol = e1 ∧ Je1 ∧ e2 ∧ Je2 ∧ e3 ∧ Je3`.
//!
//! A [`KForm`] stores one coefficient per strictly increasing index tuple, in
//! lexicographic order. Coefficients are generic so that integer model forms
//! can be manipulated exactly (`KForm<i64>`), while everything sampled from a
//! manifold lives in `KForm<f64>`.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub const DIM: usize = 6;

/// Ring of coefficients a form may carry.
pub trait Coefficient:
    Copy
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + AddAssign
    + Send
    + Sync
{
}

impl<T> Coefficient for T where
    T: Copy
        + Debug
        + PartialEq
        + Zero
        + One
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + AddAssign
        + Send
        + Sync
{
}

/// A vector of the model space in the basis `e1, Je1, e2, Je2, e3, Je3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vector6(pub [f64; DIM]);

impl Vector6 {
    pub fn basis(i: usize) -> Self {
        let mut v = [0.0; DIM];
        v[i] = 1.0;
        Vector6(v)
    }

    /// `J0` applied to this vector.
    pub fn j0(&self) -> Self {
        let mut out = [0.0; DIM];
        for k in 0..3 {
            out[2 * k + 1] = self.0[2 * k];
            out[2 * k] = -self.0[2 * k + 1];
        }
        Vector6(out)
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }
}

/// Image of basis vector `i` under `J0`, as `(sign, index)`.
#[inline]
pub fn j0_basis(i: usize) -> (i8, usize) {
    if i % 2 == 0 {
        (1, i + 1)
    } else {
        (-1, i - 1)
    }
}

struct Tables {
    /// Bitmasks of the increasing tuples of each degree, lexicographic.
    masks: [Vec<u8>; DIM + 1],
    /// Position of a mask inside its degree's list.
    index_of: [usize; 64],
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut masks: [Vec<u8>; DIM + 1] = Default::default();
        let mut index_of = [usize::MAX; 64];
        for (k, list) in masks.iter_mut().enumerate() {
            let mut tuple = Vec::with_capacity(k);
            combos(0, k, &mut tuple, list);
            for (pos, &m) in list.iter().enumerate() {
                index_of[m as usize] = pos;
            }
        }
        Tables { masks, index_of }
    })
}

fn combos(start: usize, k: usize, tuple: &mut Vec<usize>, out: &mut Vec<u8>) {
    if tuple.len() == k {
        out.push(tuple.iter().fold(0u8, |m, &i| m | (1 << i)));
        return;
    }
    for i in start..DIM {
        tuple.push(i);
        combos(i + 1, k, tuple, out);
        tuple.pop();
    }
}

fn mask_indices(mask: u8) -> impl Iterator<Item = usize> {
    (0..DIM).filter(move |i| mask & (1 << i) != 0)
}

/// Sign of `e^I ∧ e^J` relative to `e^{I ∪ J}`; zero when the sets meet.
fn merge_sign(a: u8, b: u8) -> i8 {
    if a & b != 0 {
        return 0;
    }
    let mut inversions = 0u32;
    for i in mask_indices(a) {
        // elements of b smaller than i must move past i
        inversions += (b & ((1u8 << i) - 1)).count_ones();
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Sorts `idx` in place and returns the permutation sign, or 0 on a repeat.
fn sort_sign(idx: &mut [usize]) -> i8 {
    let mut sign = 1i8;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        0
    } else {
        sign
    }
}

fn signed<T: Coefficient>(sign: i8, value: T) -> T {
    match sign {
        1 => value,
        -1 => -value,
        _ => T::zero(),
    }
}

/// A degree-k alternating form on the model space.
#[derive(Debug, Clone, PartialEq)]
pub struct KForm<T = f64> {
    degree: usize,
    coeffs: Vec<T>,
}

impl<T: Coefficient> KForm<T> {
    pub fn zero(degree: usize) -> Self {
        assert!(degree <= DIM, "form degree {degree} exceeds {DIM}");
        KForm {
            degree,
            coeffs: vec![T::zero(); binomial(DIM, degree)],
        }
    }

    pub fn scalar(value: T) -> Self {
        KForm {
            degree: 0,
            coeffs: vec![value],
        }
    }

    /// The volume form `e1 ∧ Je1 ∧ ... ∧ Je3`.
    pub fn vol() -> Self {
        KForm {
            degree: DIM,
            coeffs: vec![T::one()],
        }
    }

    /// Builds a form from coefficients given in lexicographic tuple order.
    pub fn from_coeffs(degree: usize, coeffs: Vec<T>) -> Result<Self> {
        if degree > DIM {
            return Err(Error::UnsupportedDegree(degree, "0..=6"));
        }
        if coeffs.len() != binomial(DIM, degree) {
            return Err(Error::Config(format!(
                "degree {degree} form needs {} coefficients, got {}",
                binomial(DIM, degree),
                coeffs.len()
            )));
        }
        Ok(KForm { degree, coeffs })
    }

    /// Builds a form whose coefficient on each increasing tuple is `f(tuple)`.
    pub fn from_fn(degree: usize, mut f: impl FnMut(&[usize]) -> T) -> Self {
        let masks = &tables().masks[degree];
        let coeffs = masks
            .iter()
            .map(|&m| {
                let idx: Vec<usize> = mask_indices(m).collect();
                f(&idx)
            })
            .collect();
        KForm { degree, coeffs }
    }

    /// The basis form `e^{i1} ∧ ... ∧ e^{ik}` (indices in any order).
    pub fn basis(indices: &[usize]) -> Self {
        let mut form = Self::zero(indices.len());
        let mut idx = indices.to_vec();
        let sign = sort_sign(&mut idx);
        if sign != 0 {
            form.set(&idx, signed(sign, T::one()));
        }
        form
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Increasing index tuples matching [`Self::coeffs`].
    pub fn tuples(degree: usize) -> Vec<Vec<usize>> {
        tables().masks[degree]
            .iter()
            .map(|&m| mask_indices(m).collect())
            .collect()
    }

    /// Coefficient on an arbitrary index tuple, with the antisymmetry sign.
    pub fn component(&self, indices: &[usize]) -> T {
        assert_eq!(indices.len(), self.degree);
        let mut idx = indices.to_vec();
        let sign = sort_sign(&mut idx);
        if sign == 0 {
            return T::zero();
        }
        let mask = idx.iter().fold(0u8, |m, &i| m | (1 << i));
        signed(sign, self.coeffs[tables().index_of[mask as usize]])
    }

    /// Sets the coefficient of an increasing tuple.
    pub fn set(&mut self, increasing: &[usize], value: T) {
        assert_eq!(increasing.len(), self.degree);
        let mask = increasing.iter().fold(0u8, |m, &i| m | (1 << i));
        self.coeffs[tables().index_of[mask as usize]] = value;
    }

    pub fn scale(&self, factor: T) -> Self {
        KForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|&c| c * factor).collect(),
        }
    }

    pub fn map<U: Coefficient>(&self, f: impl Fn(T) -> U) -> KForm<U> {
        KForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    /// Exterior product; fails when the degrees add up past 6.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        let degree = self.degree + other.degree;
        if degree > DIM {
            return Err(Error::DegreeOverflow {
                left: self.degree,
                right: other.degree,
            });
        }
        let t = tables();
        let mut out = Self::zero(degree);
        for (i, &a) in t.masks[self.degree].iter().enumerate() {
            let ca = self.coeffs[i];
            if ca == T::zero() {
                continue;
            }
            for (j, &b) in t.masks[other.degree].iter().enumerate() {
                let sign = merge_sign(a, b);
                if sign == 0 {
                    continue;
                }
                let cb = other.coeffs[j];
                out.coeffs[t.index_of[(a | b) as usize]] += signed(sign, ca * cb);
            }
        }
        Ok(out)
    }

    /// Hodge star for the model metric and orientation.
    pub fn hodge_star(&self) -> Self {
        let t = tables();
        let mut out = Self::zero(DIM - self.degree);
        for (i, &a) in t.masks[self.degree].iter().enumerate() {
            let complement = !a & 0b11_1111;
            let sign = merge_sign(a, complement);
            out.coeffs[t.index_of[complement as usize]] = signed(sign, self.coeffs[i]);
        }
        out
    }

    /// Induced inner product: coefficient dot product over the orthonormal
    /// tuple basis. Forms of different degree are orthogonal.
    pub fn inner(&self, other: &Self) -> T {
        if self.degree != other.degree {
            return T::zero();
        }
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    /// Value on basis vectors each given as `(sign, index)`.
    fn on_signed_basis(&self, args: &[(i8, usize)]) -> T {
        let sign = args.iter().fold(1i8, |s, &(si, _)| s * si);
        let idx: Vec<usize> = args.iter().map(|&(_, i)| i).collect();
        signed(sign, self.component(&idx))
    }

    /// The `J`-action on forms used to split Λ² and Λ³ by type:
    /// `β ↦ β(J·,J·)` on degree 2 and the sum over the three two-slot
    /// insertions `β(JX,JY,Z) + β(X,JY,JZ) + β(JX,Y,JZ)` on degree 3.
    pub fn j_action(&self) -> Result<Self> {
        match self.degree {
            2 => Ok(Self::from_fn(2, |idx| {
                self.on_signed_basis(&[j0_basis(idx[0]), j0_basis(idx[1])])
            })),
            3 => Ok(Self::from_fn(3, |idx| {
                let (x, y, z) = (idx[0], idx[1], idx[2]);
                let (jx, jy, jz) = (j0_basis(x), j0_basis(y), j0_basis(z));
                self.on_signed_basis(&[jx, jy, (1, z)])
                    + self.on_signed_basis(&[(1, x), jy, jz])
                    + self.on_signed_basis(&[jx, (1, y), jz])
            })),
            d => Err(Error::UnsupportedDegree(d, "2 or 3")),
        }
    }

    /// Natural action of `J` on forms: `(J·β)(X1..Xk) = β(J⁻¹X1, .., J⁻¹Xk)`.
    /// With this action `ψ₋ = −J·ψ₊` on the model forms.
    pub fn j_pullback(&self) -> Self {
        // J^{-1} = -J0
        Self::from_fn(self.degree, |idx| {
            let args: Vec<(i8, usize)> = idx
                .iter()
                .map(|&i| {
                    let (s, j) = j0_basis(i);
                    (-s, j)
                })
                .collect();
            self.on_signed_basis(&args)
        })
    }

    /// `β(X, .., JZ)`: J inserted in the last slot, evaluated on increasing
    /// tuples. The result is only a form when `β` has the right type; callers
    /// compare against it componentwise.
    pub fn j_last_slot(&self) -> Self {
        Self::from_fn(self.degree, |idx| {
            let mut args: Vec<(i8, usize)> = idx.iter().map(|&i| (1, i)).collect();
            if let Some(last) = args.last_mut() {
                *last = j0_basis(last.1);
            }
            self.on_signed_basis(&args)
        })
    }
}

impl KForm<f64> {
    /// Evaluates the form on `degree` vectors (determinant expansion).
    pub fn eval(&self, vectors: &[Vector6]) -> f64 {
        assert_eq!(vectors.len(), self.degree);
        let t = tables();
        let mut total = 0.0;
        for (i, &m) in t.masks[self.degree].iter().enumerate() {
            let c = self.coeffs[i];
            if c == 0.0 {
                continue;
            }
            let idx: Vec<usize> = mask_indices(m).collect();
            let minor = DMatrix::from_fn(self.degree, self.degree, |r, s| vectors[s].0[idx[r]]);
            total += c * minor.determinant();
        }
        total
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// Decomposition into the `+1` and `-1` eigenspaces of [`KForm::j_action`].
    pub fn split2(&self) -> Result<TypeSplit2> {
        if self.degree != 2 {
            return Err(Error::UnsupportedDegree(self.degree, "2"));
        }
        let j = self.j_action()?;
        Ok(TypeSplit2 {
            part_11: (self + &j).scale(0.5),
            part_20: (self - &j).scale(0.5),
        })
    }

    /// Decomposition into the `-3` and `+1` eigenspaces of [`KForm::j_action`].
    pub fn split3(&self) -> Result<TypeSplit3> {
        if self.degree != 3 {
            return Err(Error::UnsupportedDegree(self.degree, "3"));
        }
        let j = self.j_action()?;
        Ok(TypeSplit3 {
            part_30: (self - &j).scale(0.25),
            part_21: (&self.scale(3.0) + &j).scale(0.25),
        })
    }
}

impl From<&KForm<i64>> for KForm<f64> {
    fn from(form: &KForm<i64>) -> Self {
        form.map(|c| c as f64)
    }
}

impl<T: Coefficient> Add for &KForm<T> {
    type Output = KForm<T>;
    fn add(self, rhs: Self) -> KForm<T> {
        assert_eq!(self.degree, rhs.degree, "adding forms of different degree");
        KForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Coefficient> Sub for &KForm<T> {
    type Output = KForm<T>;
    fn sub(self, rhs: Self) -> KForm<T> {
        assert_eq!(self.degree, rhs.degree, "subtracting forms of different degree");
        KForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Coefficient> Neg for &KForm<T> {
    type Output = KForm<T>;
    fn neg(self) -> KForm<T> {
        self.map(|c| -c)
    }
}

/// `Λ² = [Λ^{1,1}] ⊕ [[Λ^{2,0}]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeSplit2 {
    pub part_11: KForm,
    pub part_20: KForm,
}

/// `Λ³ = [[Λ^{3,0}]] ⊕ [[Λ^{2,1}]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeSplit3 {
    pub part_30: KForm,
    pub part_21: KForm,
}

/// The canonical SU(3) forms of the model space.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelForms<T = i64> {
    pub sigma: KForm<T>,
    pub psi_plus: KForm<T>,
    pub psi_minus: KForm<T>,
    pub vol: KForm<T>,
}

const E1: usize = 0;
const JE1: usize = 1;
const E2: usize = 2;
const JE2: usize = 3;
const E3: usize = 4;
const JE3: usize = 5;

/// `σ₀ = e¹∧Je¹ + e²∧Je² + e³∧Je³` and the real and imaginary parts of
/// `2√2 f¹∧f²∧f³` with `fᵏ = (eᵏ + iJeᵏ)/√2`, as exact integer forms.
pub fn model_su3_forms() -> ModelForms<i64> {
    let mut sigma = KForm::zero(2);
    for (a, b) in [(E1, JE1), (E2, JE2), (E3, JE3)] {
        sigma.set(&[a, b], 1);
    }

    let mut psi_plus = KForm::zero(3);
    psi_plus.set(&[E1, E2, E3], 1);
    psi_plus.set(&[JE1, JE2, E3], -1);
    psi_plus.set(&[E1, JE2, JE3], -1);
    psi_plus.set(&[JE1, E2, JE3], -1);

    let mut psi_minus = KForm::zero(3);
    psi_minus.set(&[E1, E2, JE3], 1);
    psi_minus.set(&[JE1, JE2, JE3], -1);
    psi_minus.set(&[E1, JE2, E3], 1);
    psi_minus.set(&[JE1, E2, E3], 1);

    ModelForms {
        sigma,
        psi_plus,
        psi_minus,
        vol: KForm::vol(),
    }
}

/// Matrix of a linear operator on Λᵏ in the tuple basis.
pub fn operator_matrix(degree: usize, op: impl Fn(&KForm) -> KForm) -> DMatrix<f64> {
    let n = binomial(DIM, degree);
    let mut m = DMatrix::zeros(n, n);
    for col in 0..n {
        let mut coeffs = vec![0.0; n];
        coeffs[col] = 1.0;
        let image = op(&KForm { degree, coeffs });
        for row in 0..n {
            m[(row, col)] = image.coeffs[row];
        }
    }
    m
}

/// Numerical rank via singular values above `tol`.
pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > tol)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(form: &KForm<i64>) -> KForm<f64> {
        form.into()
    }

    #[test]
    fn basis_wedge() {
        let a = KForm::<i64>::basis(&[E1, JE1]);
        let b = KForm::<i64>::basis(&[E2, JE2]);
        assert_eq!(a.wedge(&b).unwrap(), KForm::basis(&[E1, JE1, E2, JE2]));
        // reordering picks up the permutation sign
        assert_eq!(KForm::<i64>::basis(&[JE1, E1]), a.scale(-1));
        assert_eq!(KForm::<i64>::basis(&[E1, E1]), KForm::zero(2));
    }

    #[test]
    fn wedge_overflow_is_an_error() {
        let a = KForm::<i64>::basis(&[0, 1, 2, 3]);
        let b = KForm::<i64>::basis(&[4, 5, 0]);
        assert!(matches!(a.wedge(&b), Err(Error::DegreeOverflow { left: 4, right: 3 })));
    }

    #[test]
    fn model_form_products() {
        let m = model_su3_forms();
        let s2 = m.sigma.wedge(&m.sigma).unwrap();
        assert_eq!(s2.wedge(&m.sigma).unwrap(), m.vol.scale(6));
        assert_eq!(m.sigma.wedge(&m.psi_plus).unwrap(), KForm::zero(5));
        assert_eq!(m.sigma.wedge(&m.psi_minus).unwrap(), KForm::zero(5));
        assert_eq!(m.psi_plus.wedge(&m.psi_minus).unwrap(), m.vol.scale(4));
        assert_eq!(m.psi_plus.inner(&m.psi_plus), 4);
        assert_eq!(m.psi_minus.component(&[E1, E2, JE3]), 1);
    }

    #[test]
    fn hodge_examples() {
        let m = model_su3_forms();
        assert_eq!(KForm::<i64>::scalar(1).hodge_star(), m.vol);
        assert_eq!(m.psi_plus.hodge_star(), m.psi_minus);
        assert_eq!(
            KForm::<i64>::basis(&[E1, JE1]).hodge_star(),
            KForm::basis(&[E2, JE2, E3, JE3])
        );
    }

    #[test]
    fn j_action_on_model_forms() {
        let m = model_su3_forms();
        assert_eq!(m.sigma.j_action().unwrap(), m.sigma);
        assert_eq!(m.psi_plus.j_action().unwrap(), m.psi_plus.scale(-3));
        assert_eq!(m.psi_minus.j_action().unwrap(), m.psi_minus.scale(-3));
        assert_eq!(m.psi_minus, -&m.psi_plus.j_last_slot());
        assert_eq!(m.psi_minus, -&m.psi_plus.j_pullback());
        assert!(matches!(
            m.vol.j_action(),
            Err(Error::UnsupportedDegree(6, _))
        ));
    }

    #[test]
    fn j_action_matches_brute_force_evaluation() {
        // β(Jx, Jy) evaluated directly through the determinant expansion
        let beta = KForm::from_fn(2, |idx| (idx[0] * 7 + idx[1] * 3) as f64 - 9.5);
        let jb = beta.j_action().unwrap();
        for a in 0..DIM {
            for b in 0..DIM {
                let (x, y) = (Vector6::basis(a), Vector6::basis(b));
                let direct = beta.eval(&[x.j0(), y.j0()]);
                assert!((jb.eval(&[x, y]) - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn split_examples_and_ranks() {
        let m = model_su3_forms();
        let s = f(&m.sigma).split2().unwrap();
        assert_eq!(s.part_11, f(&m.sigma));
        assert_eq!(s.part_20.max_abs(), 0.0);
        let p = f(&m.psi_plus).split3().unwrap();
        assert_eq!(p.part_30, f(&m.psi_plus));
        assert_eq!(p.part_21.max_abs(), 0.0);

        let p11 = operator_matrix(2, |b| b.split2().unwrap().part_11);
        let p20 = operator_matrix(2, |b| b.split2().unwrap().part_20);
        assert_eq!(numerical_rank(&p11, 1e-9), 9);
        assert_eq!(numerical_rank(&p20, 1e-9), 6);
        let p30 = operator_matrix(3, |b| b.split3().unwrap().part_30);
        let p21 = operator_matrix(3, |b| b.split3().unwrap().part_21);
        assert_eq!(numerical_rank(&p30, 1e-9), 2);
        assert_eq!(numerical_rank(&p21, 1e-9), 18);
        for p in [&p11, &p20, &p30, &p21] {
            assert!((p * p - p).abs().max() < 1e-12);
        }
        assert!((&p11 + &p20 - DMatrix::identity(15, 15)).abs().max() < 1e-15);
        assert!((&p30 + &p21 - DMatrix::identity(20, 20)).abs().max() < 1e-15);
    }

    #[test]
    fn eval_is_determinant_of_components() {
        let vol = KForm::<f64>::vol();
        let basis: Vec<Vector6> = (0..DIM).map(Vector6::basis).collect();
        assert_eq!(vol.eval(&basis), 1.0);
        let sigma = f(&model_su3_forms().sigma);
        // σ(X, Y) = g(JX, Y)
        let x = Vector6([0.3, -1.0, 2.0, 0.5, 0.1, 0.7]);
        let y = Vector6([1.1, 0.2, -0.4, 0.9, -1.3, 0.0]);
        assert!((sigma.eval(&[x, y]) - x.j0().dot(&y)).abs() < 1e-14);
    }
}
