//! Scalar and vector fields on a rectangular pixel grid, plus the discrete
//! differential operators every solver is built on.
//!
//! Layout is row-major with `(i, j) = (row, column)`. The first vector
//! component lives on the row axis, the second on the column axis.
//!
//! The gradient uses forward differences with a Neumann boundary (the last
//! difference along each axis is zero). The divergence is defined as the
//! exact negative adjoint of that gradient, so `<grad u, p> = -<u, div p>`
//! holds up to rounding for every pair of fields.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl ScalarField {
    /// Zero field of the given size. Panics if either dimension is zero.
    pub fn zeros(height: usize, width: usize) -> Self {
        Self::filled(height, width, 0.0)
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Self {
        assert!(height > 0 && width > 0, "field dimensions must be positive");
        Self {
            height,
            width,
            data: vec![value; height * width],
        }
    }

    pub fn from_vec(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidDimensions(height, width));
        }
        if data.len() != height * width {
            return Err(Error::LengthMismatch {
                height,
                width,
                len: data.len(),
            });
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(height > 0 && width > 0, "field dimensions must be positive");
        let mut data = Vec::with_capacity(height * width);
        for i in 0..height {
            for j in 0..width {
                data.push(f(i, j));
            }
        }
        Self {
            height,
            width,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn same_dims(&self, other: &ScalarField) -> bool {
        self.dims() == other.dims()
    }

    pub(crate) fn check_dims(&self, other: &ScalarField) -> Result<()> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(
                self.height,
                self.width,
                other.height,
                other.width,
            ))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Largest absolute elementwise difference.
    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        debug_assert!(self.same_dims(other));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()))
    }

    /// `||self - other||_2 / max(||other||_2, eps)`.
    pub fn relative_l2_diff(&self, other: &ScalarField, eps: f64) -> f64 {
        debug_assert!(self.same_dims(other));
        let diff = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        diff / norm_l2(other).max(eps)
    }
}

impl Index<(usize, usize)> for ScalarField {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.height && j < self.width);
        &self.data[i * self.width + j]
    }
}

impl IndexMut<(usize, usize)> for ScalarField {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.height && j < self.width);
        &mut self.data[i * self.width + j]
    }
}

fn zip_with(a: &ScalarField, b: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
    assert!(
        a.same_dims(b),
        "dimension mismatch: {:?} vs {:?}",
        a.dims(),
        b.dims()
    );
    ScalarField {
        height: a.height,
        width: a.width,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;

    fn add(self, rhs: &ScalarField) -> ScalarField {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;

    fn sub(self, rhs: &ScalarField) -> ScalarField {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;

    fn mul(self, rhs: f64) -> ScalarField {
        self.map(|v| v * rhs)
    }
}

/// A pair of equally sized scalar fields: `comp1` along rows, `comp2` along columns.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub comp1: ScalarField,
    pub comp2: ScalarField,
}

impl VectorField {
    pub fn zeros(height: usize, width: usize) -> Self {
        Self {
            comp1: ScalarField::zeros(height, width),
            comp2: ScalarField::zeros(height, width),
        }
    }

    pub fn new(comp1: ScalarField, comp2: ScalarField) -> Result<Self> {
        comp1.check_dims(&comp2)?;
        Ok(Self { comp1, comp2 })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.comp1.dims()
    }

    pub fn is_finite(&self) -> bool {
        self.comp1.is_finite() && self.comp2.is_finite()
    }

    /// Per-pixel Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        zip_with(&self.comp1, &self.comp2, f64::hypot)
    }

    pub fn max_abs_diff(&self, other: &VectorField) -> f64 {
        self.comp1
            .max_abs_diff(&other.comp1)
            .max(self.comp2.max_abs_diff(&other.comp2))
    }

    pub fn norm_l2(&self) -> f64 {
        (inner_product(&self.comp1, &self.comp1) + inner_product(&self.comp2, &self.comp2)).sqrt()
    }

    pub fn inner_product(&self, other: &VectorField) -> f64 {
        inner_product(&self.comp1, &other.comp1) + inner_product(&self.comp2, &other.comp2)
    }
}

impl Add for &VectorField {
    type Output = VectorField;

    fn add(self, rhs: &VectorField) -> VectorField {
        VectorField {
            comp1: &self.comp1 + &rhs.comp1,
            comp2: &self.comp2 + &rhs.comp2,
        }
    }
}

impl Sub for &VectorField {
    type Output = VectorField;

    fn sub(self, rhs: &VectorField) -> VectorField {
        VectorField {
            comp1: &self.comp1 - &rhs.comp1,
            comp2: &self.comp2 - &rhs.comp2,
        }
    }
}

/// Forward differences with Neumann boundary.
pub fn gradient(u: &ScalarField) -> VectorField {
    let (h, w) = u.dims();
    let src = u.data();
    let mut g1 = vec![0.0; h * w];
    let mut g2 = vec![0.0; h * w];
    for i in 0..h {
        let row = i * w;
        for j in 0..w {
            let k = row + j;
            if i + 1 < h {
                g1[k] = src[k + w] - src[k];
            }
            if j + 1 < w {
                g2[k] = src[k + 1] - src[k];
            }
        }
    }
    VectorField {
        comp1: ScalarField {
            height: h,
            width: w,
            data: g1,
        },
        comp2: ScalarField {
            height: h,
            width: w,
            data: g2,
        },
    }
}

/// Backward differences; the negative adjoint of [`gradient`].
///
/// Components on the last row (for `comp1`) and last column (for `comp2`)
/// do not contribute, matching the zero entries the gradient writes there.
pub fn divergence(p: &VectorField) -> ScalarField {
    let (h, w) = p.dims();
    let mut out = vec![0.0; h * w];
    divergence_into(p, &mut out);
    ScalarField {
        height: h,
        width: w,
        data: out,
    }
}

/// [`divergence`] written into a caller-provided row-major buffer.
pub fn divergence_into(p: &VectorField, out: &mut [f64]) {
    let (h, w) = p.dims();
    let n = h * w;
    assert_eq!(out.len(), n);
    let p1 = p.comp1.data();
    let p2 = p.comp2.data();
    // Row axis: +p1 on all but the last row, -p1 shifted down one row.
    out[..n - w].copy_from_slice(&p1[..n - w]);
    out[n - w..].fill(0.0);
    for (o, prev) in out[w..].iter_mut().zip(&p1[..n - w]) {
        *o -= prev;
    }
    // Column axis, row by row.
    for (orow, prow) in out.chunks_exact_mut(w).zip(p2.chunks_exact(w)) {
        for (o, cur) in orow[..w - 1].iter_mut().zip(prow) {
            *o += cur;
        }
        for (o, prev) in orow[1..].iter_mut().zip(prow) {
            *o -= prev;
        }
    }
}

/// Neumann Laplacian, `div(grad u)`.
pub fn laplacian(u: &ScalarField) -> ScalarField {
    divergence(&gradient(u))
}

pub fn inner_product(a: &ScalarField, b: &ScalarField) -> f64 {
    assert!(a.same_dims(b), "dimension mismatch");
    a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum()
}

pub fn norm_l2(a: &ScalarField) -> f64 {
    inner_product(a, a).sqrt()
}

/// Isotropic discrete total variation: sum of per-pixel gradient magnitudes.
pub fn tv_energy(u: &ScalarField) -> f64 {
    let g = gradient(u);
    g.comp1
        .data()
        .iter()
        .zip(g.comp2.data())
        .map(|(a, b)| a.hypot(*b))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(rng: &mut ChaCha8Rng, h: usize, w: usize) -> ScalarField {
        ScalarField::from_fn(h, w, |_, _| rng.gen_range(-1.0..1.0))
    }

    // Plain nested-loop references, written against 2D indexing.
    fn naive_gradient(u: &ScalarField) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let (h, w) = u.dims();
        let mut g1 = vec![vec![0.0; w]; h];
        let mut g2 = vec![vec![0.0; w]; h];
        for i in 0..h {
            for j in 0..w {
                if i < h - 1 {
                    g1[i][j] = u[(i + 1, j)] - u[(i, j)];
                }
                if j < w - 1 {
                    g2[i][j] = u[(i, j + 1)] - u[(i, j)];
                }
            }
        }
        (g1, g2)
    }

    fn naive_tv(u: &ScalarField) -> f64 {
        let (g1, g2) = naive_gradient(u);
        let mut total = 0.0;
        for i in 0..u.height() {
            for j in 0..u.width() {
                total += (g1[i][j] * g1[i][j] + g2[i][j] * g2[i][j]).sqrt();
            }
        }
        total
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        for (h, w) in [(1, 1), (3, 7), (9, 4)] {
            let g = gradient(&ScalarField::filled(h, w, 0.37));
            assert!(g.comp1.data().iter().all(|&v| v == 0.0));
            assert!(g.comp2.data().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn gradient_single_row() {
        let u = ScalarField::from_vec(1, 3, vec![0.0, 1.0, 3.0]).unwrap();
        let g = gradient(&u);
        assert_eq!(g.comp2.data(), &[1.0, 2.0, 0.0]);
        assert_eq!(g.comp1.data(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn gradient_matches_naive_loops() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_field(&mut rng, 5, 5);
        let g = gradient(&u);
        let (g1, g2) = naive_gradient(&u);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(g.comp1[(i, j)], g1[i][j]);
                assert_eq!(g.comp2[(i, j)], g2[i][j]);
            }
        }
    }

    #[test]
    fn divergence_of_zero_is_zero() {
        let d = divergence(&VectorField::zeros(4, 5));
        assert!(d.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn divergence_adjoint_on_4x6() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_field(&mut rng, 4, 6);
        let p = VectorField {
            comp1: random_field(&mut rng, 4, 6),
            comp2: random_field(&mut rng, 4, 6),
        };
        let lhs = gradient(&u).inner_product(&p);
        let rhs = inner_product(&u, &divergence(&p));
        assert!((lhs + rhs).abs() <= 1e-12 * (lhs.abs() + 1.0));
    }

    #[test]
    fn laplacian_edge_cases() {
        assert_eq!(laplacian(&ScalarField::filled(1, 1, 5.0)).data(), &[0.0]);
        let c = laplacian(&ScalarField::filled(6, 3, -2.0));
        assert!(c.data().iter().all(|&v| v == 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_field(&mut rng, 5, 5);
        let composed = divergence(&gradient(&u));
        assert!(laplacian(&u).max_abs_diff(&composed) <= 1e-14);
    }

    #[test]
    fn laplacian_interior_stencil() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = random_field(&mut rng, 5, 5);
        let l = laplacian(&u);
        let five_point = u[(1, 2)] + u[(3, 2)] + u[(2, 1)] + u[(2, 3)] - 4.0 * u[(2, 2)];
        assert!((l[(2, 2)] - five_point).abs() < 1e-14);
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_energy(&ScalarField::filled(4, 4, 1.5)), 0.0);
        let u = ScalarField::from_vec(1, 2, vec![0.0, -0.75]).unwrap();
        assert_eq!(tv_energy(&u), 0.75);
    }

    #[test]
    fn tv_of_disk_matches_naive_loops() {
        let disk = ScalarField::from_fn(8, 8, |i, j| {
            let (di, dj) = (i as f64 - 3.5, j as f64 - 3.5);
            if di * di + dj * dj <= 9.0 {
                1.0
            } else {
                0.0
            }
        });
        assert!((tv_energy(&disk) - naive_tv(&disk)).abs() <= 1e-12);
        assert!(tv_energy(&disk) > 0.0);
    }

    #[test]
    fn from_vec_rejects_bad_lengths() {
        assert!(matches!(
            ScalarField::from_vec(2, 2, vec![0.0; 3]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            ScalarField::from_vec(0, 2, vec![]),
            Err(Error::InvalidDimensions(0, 2))
        ));
    }

    fn field_strategy() -> impl Strategy<Value = (ScalarField, VectorField)> {
        (1usize..12, 1usize..12).prop_flat_map(|(h, w)| {
            let n = h * w;
            (
                prop::collection::vec(-10.0f64..10.0, n),
                prop::collection::vec(-10.0f64..10.0, n),
                prop::collection::vec(-10.0f64..10.0, n),
            )
                .prop_map(move |(a, b, c)| {
                    (
                        ScalarField::from_vec(h, w, a).unwrap(),
                        VectorField {
                            comp1: ScalarField::from_vec(h, w, b).unwrap(),
                            comp2: ScalarField::from_vec(h, w, c).unwrap(),
                        },
                    )
                })
        })
    }

    proptest! {
        #[test]
        fn adjointness((u, p) in field_strategy()) {
            let lhs = gradient(&u).inner_product(&p);
            let rhs = inner_product(&u, &divergence(&p));
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            prop_assert!((lhs + rhs).abs() <= 1e-12 * scale);
        }

        #[test]
        fn divergence_sums_to_zero((_u, p) in field_strategy()) {
            let d = divergence(&p);
            let budget = 1e-10 * (d.len() as f64 / 1e4).max(1.0);
            prop_assert!(d.sum().abs() <= budget);
        }

        #[test]
        fn tv_is_one_homogeneous((u, _p) in field_strategy(), alpha in -5.0f64..5.0) {
            let scaled = &u * alpha;
            let expected = alpha.abs() * tv_energy(&u);
            prop_assert!((tv_energy(&scaled) - expected).abs() <= 1e-12 * expected.max(1.0));
        }
    }
}
