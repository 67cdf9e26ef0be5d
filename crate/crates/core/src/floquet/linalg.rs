use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// Dense 3×3 real matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        Mat3([[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Sum of the three principal 2×2 minors.
    pub fn minor_sum(&self) -> f64 {
        let m = &self.0;
        (m[0][0] * m[1][1] - m[0][1] * m[1][0])
            + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
            + (m[1][1] * m[2][2] - m[1][2] * m[2][1])
    }

    pub fn scale(&self, k: f64) -> Mat3 {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|x| *x *= k);
        out
    }

    pub fn mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
    }

    /// Solves `self · x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: [f64; 3]) -> Option<[f64; 3]> {
        let mut a = self.0;
        let mut b = b;
        for col in 0..3 {
            let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
            if a[piv][col].abs() < 1e-300 {
                return None;
            }
            a.swap(col, piv);
            b.swap(col, piv);
            for row in col + 1..3 {
                let f = a[row][col] / a[col][col];
                for k in col..3 {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = [0.0; 3];
        for i in (0..3).rev() {
            let s: f64 = (i + 1..3).map(|k| a[i][k] * x[k]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        Some(x)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn entries(&self) -> [f64; 9] {
        let m = &self.0;
        [
            m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2],
        ]
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, o: Mat3) -> Mat3 {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Mat3(out)
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(mut self, o: Mat3) -> Mat3 {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] += o.0[i][j];
            }
        }
        self
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, o: Mat3) -> Mat3 {
        self + o.scale(-1.0)
    }
}

/// Roots of `λ² + b λ + c` with complex arithmetic.
fn quadratic(b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let q = -0.5 * (b + disc.sqrt().copysign(b));
        if q == 0.0 {
            [Complex64::new(0.0, 0.0); 2]
        } else {
            [Complex64::new(q, 0.0), Complex64::new(c / q, 0.0)]
        }
    } else {
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(-0.5 * b, im), Complex64::new(-0.5 * b, -im)]
    }
}

/// One real root of `λ³ + a λ² + b λ + c` from Cardano's formula, polished
/// by Newton's method.
fn real_cubic_root(a: f64, b: f64, c: f64) -> f64 {
    // depressed cubic t³ + p t + q with λ = t - a/3
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = q * q / 4.0 + p * p * p / 27.0;
    let t = if disc >= 0.0 {
        let s = disc.sqrt();
        (-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt()
    } else {
        // three real roots: trigonometric form, take the largest
        let r = (-p / 3.0).sqrt();
        let phi = (-q / (2.0 * r * r * r)).clamp(-1.0, 1.0).acos();
        2.0 * r * (phi / 3.0).cos()
    };
    let mut x = t - a / 3.0;
    for _ in 0..6 {
        let f = ((x + a) * x + b) * x + c;
        let df = (3.0 * x + 2.0 * a) * x + b;
        if df == 0.0 {
            break;
        }
        let dx = f / df;
        x -= dx;
        if dx.abs() <= 1e-16 * x.abs() {
            break;
        }
    }
    x
}

/// Eigenvalues of a 3×3 real matrix from its characteristic polynomial:
/// one real root in closed form, the remaining pair from the deflated
/// quadratic. Sorted by decreasing modulus.
pub fn eig3(m: &Mat3) -> [Complex64; 3] {
    let (a, b, c) = (-m.trace(), m.minor_sum(), -m.det());
    let r = real_cubic_root(a, b, c);
    // λ³ + aλ² + bλ + c = (λ - r)(λ² + (a + r)λ + (b + r(a + r)))
    let b1 = a + r;
    let [l2, l3] = quadratic(b1, b + r * b1);
    let mut out = [Complex64::new(r, 0.0), l2, l3];
    out.sort_by(|x, y| y.norm().total_cmp(&x.norm()));
    out
}

/// `‖M v - λ v‖ / ‖v‖` for the best eigenvector estimate obtained from cross
/// products of the rows of `M - λ I`.
pub fn eigen_residual(m: &Mat3, lambda: Complex64) -> f64 {
    let rows: [[Complex64; 3]; 3] = [0, 1, 2].map(|i| {
        [0, 1, 2].map(|j| {
            let d = if i == j {
                lambda
            } else {
                Complex64::new(0.0, 0.0)
            };
            Complex64::new(m.0[i][j], 0.0) - d
        })
    });
    let cross = |u: &[Complex64; 3], v: &[Complex64; 3]| {
        [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]
    };
    let norm = |v: &[Complex64; 3]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut best = f64::INFINITY;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let v = cross(&rows[i], &rows[j]);
        let n = norm(&v);
        if n == 0.0 {
            continue;
        }
        let res: [Complex64; 3] =
            [0, 1, 2].map(|k| rows[k][0] * v[0] + rows[k][1] * v[1] + rows[k][2] * v[2]);
        best = best.min(norm(&res) / n);
    }
    if best.is_infinite() {
        // every pair of rows is parallel: λ has a two-dimensional eigenspace
        0.0
    } else {
        best
    }
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(m: &Mat3) -> f64 {
    eig3(m)[0].norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trivial_radii() {
        assert!((spectral_radius(&Mat3::IDENTITY) - 1.0).abs() < 1e-12);
        assert!((spectral_radius(&Mat3::diag(0.5, 0.2, 1.5)) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn known_spectra() {
        // rotation by 90 degrees in the first plane, scaled
        let m = Mat3([[0.0, -2.0, 0.0], [2.0, 0.0, 0.0], [0.0, 0.0, 0.5]]);
        let ev = eig3(&m);
        assert!((ev[0].norm() - 2.0).abs() < 1e-12 && ev[0].im.abs() > 1.9);
        assert!((ev[2] - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        // companion matrix of (λ-1)(λ-2)(λ-3)
        let m = Mat3([[6.0, -11.0, 6.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let ev = eig3(&m);
        for (z, want) in ev.iter().zip([3.0, 2.0, 1.0]) {
            assert!((z - Complex64::new(want, 0.0)).norm() < 1e-9, "{z}");
        }
    }

    #[test]
    fn random_matrices_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let mut m = Mat3::default();
            m.0.iter_mut()
                .flatten()
                .for_each(|x| *x = rng.gen_range(-2.0..2.0));
            let ev = eig3(&m);
            let prod = ev[0] * ev[1] * ev[2];
            let sum = ev[0] + ev[1] + ev[2];
            assert!((prod.re - m.det()).abs() < 1e-9 && prod.im.abs() < 1e-9);
            assert!((sum.re - m.trace()).abs() < 1e-9);
            for z in ev {
                assert!(eigen_residual(&m, z) < 1e-8, "{m:?} {z}");
            }
        }
    }

    #[test]
    fn solve_and_products() {
        let m = Mat3([[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]]);
        let x = m.solve([1.0, 2.0, 3.0]).unwrap();
        let back = m.mul_vec(x);
        for (a, b) in back.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(m * Mat3::IDENTITY, m);
        assert!(((m * m).det() - m.det() * m.det()).abs() < 1e-10);
        assert!(Mat3::diag(1.0, 0.0, 1.0).solve([1.0, 1.0, 1.0]).is_none());
    }
}
