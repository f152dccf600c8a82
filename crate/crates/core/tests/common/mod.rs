//! Reference implementations and seeded inputs shared by the integration tests.
//! Nothing here calls the library's operators or solvers.

#![allow(dead_code)]

use cartoon_texture::ScalarField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Forward differences with a zero last difference, as nested vectors.
pub fn naive_grad(u: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let (h, w) = (u.len(), u[0].len());
    let mut g1 = vec![vec![0.0; w]; h];
    let mut g2 = vec![vec![0.0; w]; h];
    for i in 0..h {
        for j in 0..w {
            if i + 1 < h {
                g1[i][j] = u[i + 1][j] - u[i][j];
            }
            if j + 1 < w {
                g2[i][j] = u[i][j + 1] - u[i][j];
            }
        }
    }
    (g1, g2)
}

pub fn to_rows(f: &ScalarField) -> Vec<Vec<f64>> {
    f.data().chunks(f.width()).map(|r| r.to_vec()).collect()
}

pub fn from_rows(rows: &[Vec<f64>]) -> ScalarField {
    ScalarField::from_vec(rows.len(), rows[0].len(), rows.concat()).unwrap()
}

pub fn naive_tv(u: &[Vec<f64>]) -> f64 {
    let (g1, g2) = naive_grad(u);
    let mut s = 0.0;
    for (r1, r2) in g1.iter().zip(&g2) {
        for (a, b) in r1.iter().zip(r2) {
            s += (a * a + b * b).sqrt();
        }
    }
    s
}

pub fn naive_rof_energy(u: &[Vec<f64>], f: &[Vec<f64>], lambda: f64) -> f64 {
    let mut fid = 0.0;
    for (ru, rf) in u.iter().zip(f) {
        for (a, b) in ru.iter().zip(rf) {
            fid += (b - a) * (b - a);
        }
    }
    naive_tv(u) + 0.5 * lambda * fid
}

/// Projected subgradient descent on the ROF energy.
///
/// The minimizer lies in `[min f, max f]`, so iterates are clipped to that
/// box. Steps are `2 / (lambda (k + 2))` with `(k + 1)`-weighted averaging,
/// the usual scheme for a `lambda`-strongly convex objective. Runs in blocks
/// until the best energy seen stops improving by more than `1e-8` relative,
/// and returns that energy.
pub fn subgradient_rof_energy(f: &ScalarField, lambda: f64) -> f64 {
    let (h, w) = f.dims();
    let fv = f.data();
    let lo = fv.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = fv.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let energy = |u: &[f64]| {
        let rows: Vec<Vec<f64>> = u.chunks(w).map(|r| r.to_vec()).collect();
        naive_rof_energy(&rows, &to_rows(f), lambda)
    };

    let mut u = fv.to_vec();
    let mut avg = u.clone();
    let mut n1 = vec![0.0; h * w];
    let mut n2 = vec![0.0; h * w];
    let mut weight_sum = 0.0;
    let mut best = energy(&u);
    let block = 5000;
    let mut k = 0usize;
    loop {
        let best_before = best;
        for _ in 0..block {
            // Unit gradient directions; zero where the gradient vanishes.
            for i in 0..h {
                for j in 0..w {
                    let idx = i * w + j;
                    let g1 = if i + 1 < h { u[idx + w] - u[idx] } else { 0.0 };
                    let g2 = if j + 1 < w { u[idx + 1] - u[idx] } else { 0.0 };
                    let m = (g1 * g1 + g2 * g2).sqrt();
                    (n1[idx], n2[idx]) = if m > 0.0 {
                        (g1 / m, g2 / m)
                    } else {
                        (0.0, 0.0)
                    };
                }
            }
            let step = 2.0 / (lambda * (k as f64 + 2.0));
            let wk = k as f64 + 1.0;
            weight_sum += wk;
            for i in 0..h {
                for j in 0..w {
                    let idx = i * w + j;
                    // Backward-difference divergence, the adjoint of the forward gradient.
                    let mut div = 0.0;
                    if i + 1 < h {
                        div += n1[idx];
                    }
                    if i > 0 {
                        div -= n1[idx - w];
                    }
                    if j + 1 < w {
                        div += n2[idx];
                    }
                    if j > 0 {
                        div -= n2[idx - 1];
                    }
                    let g = -div + lambda * (u[idx] - fv[idx]);
                    u[idx] = (u[idx] - step * g).clamp(lo, hi);
                    avg[idx] += wk / weight_sum * (u[idx] - avg[idx]);
                }
            }
            k += 1;
        }
        best = best.min(energy(&u)).min(energy(&avg));
        if best_before - best <= 1e-8 * best.abs() || k >= 2_000_000 {
            return best;
        }
    }
}

/// Uniform noise in `[0, 1)`.
pub fn random_field(rng: &mut ChaCha8Rng, h: usize, w: usize) -> ScalarField {
    ScalarField::from_fn(h, w, |_, _| rng.gen::<f64>())
}

/// Two random rectangles on a random background plus uniform noise, clipped to `[0, 1]`.
pub fn blocky_image(seed: u64, h: usize, w: usize) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut img = vec![vec![rng.gen_range(0.1..0.4); w]; h];
    for _ in 0..2 {
        let (i0, j0) = (rng.gen_range(0..h / 2), rng.gen_range(0..w / 2));
        let (i1, j1) = (rng.gen_range(i0 + 2..=h), rng.gen_range(j0 + 2..=w));
        let level = rng.gen_range(0.3..0.9);
        for row in img.iter_mut().take(i1).skip(i0) {
            for x in row.iter_mut().take(j1).skip(j0) {
                *x = level;
            }
        }
    }
    for x in img.iter_mut().flatten() {
        *x = (*x + rng.gen_range(-0.1f64..0.1)).clamp(0.0, 1.0);
    }
    from_rows(&img)
}

pub fn rel_l2(a: &ScalarField, reference: &ScalarField) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in a.data().iter().zip(reference.data()) {
        num += (x - y) * (x - y);
        den += y * y;
    }
    num.sqrt() / den.sqrt().max(1e-12)
}

pub fn correlation(a: &ScalarField, b: &ScalarField) -> f64 {
    let n = a.len() as f64;
    let ma = a.data().iter().sum::<f64>() / n;
    let mb = b.data().iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.data().iter().zip(b.data()) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}
