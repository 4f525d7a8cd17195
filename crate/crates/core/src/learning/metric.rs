//! Mahalanobis metric learning: pseudo-distances
//! `D_M(x, x') = (x - x')ᵀ M (x - x')` with `M` in the PSD cone, the hinge
//! risk kernel, its subgradient, and the PSD-cone projection.
//!
//! The hinge here is `[u]_+ = max(0, 1 - u)` applied to
//! `u = y·(b - D_M(x, x'))` with `y = +1` for same-label pairs and `-1`
//! otherwise, so a same-label pair is penalized when it is farther than
//! `b - 1` and a different-label pair when it is closer than `b + 1`.

use crate::error::{Error, Result};
use crate::index::IndexTuple;
use crate::kernel::Kernel;
use crate::linalg::Matrix;
use crate::samples::SampleSet;

use super::sgd::{Parameter, SgdObjective};

/// A PSD-cone metric parameterization: symmetric matrix plus the decision
/// threshold `b >= 0`. Construction symmetrizes the matrix; positivity is
/// the job of [`project_psd`].
#[derive(Debug, Clone)]
pub struct MetricModel {
    matrix: Matrix,
    threshold: f64,
}

impl MetricModel {
    pub fn new(matrix: Matrix, threshold: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(
                "metric matrix must be square".into(),
            ));
        }
        if !(threshold >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "threshold must be nonnegative, got {threshold}"
            )));
        }
        Ok(MetricModel {
            matrix: matrix.symmetrized(),
            threshold,
        })
    }

    pub fn identity(dim: usize, threshold: f64) -> Self {
        MetricModel {
            matrix: Matrix::identity(dim),
            threshold,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// `D_M(x, x') = (x - x')ᵀ M (x - x')`.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let diff: Vec<f64> = x.iter().zip(y.iter()).map(|(a, b)| a - b).collect();
        self.matrix.quadratic_form(&diff)
    }
}

#[inline]
fn pair_sign(ya: i64, yb: i64) -> f64 {
    if ya == yb {
        1.0
    } else {
        -1.0
    }
}

/// Hinge loss of one labeled pair under the model.
#[inline]
pub fn hinge_loss(matrix: &Matrix, threshold: f64, diff: &[f64], ya: i64, yb: i64) -> f64 {
    let y = pair_sign(ya, yb);
    let u = y * (threshold - matrix.quadratic_form(diff));
    (1.0 - u).max(0.0)
}

/// Subgradient of the hinge loss with respect to the matrix:
/// `y·(x - x')(x - x')ᵀ` where the hinge is active, the zero matrix on the
/// flat region and at the kink.
pub fn metric_hinge_gradient(
    model: &MetricModel,
    xa: &[f64],
    ya: i64,
    xb: &[f64],
    yb: i64,
) -> Matrix {
    let mut out = Matrix::zeros(model.dim(), model.dim());
    let diff: Vec<f64> = xa.iter().zip(xb.iter()).map(|(a, b)| a - b).collect();
    accumulate_hinge_gradient(&model.matrix, model.threshold, &diff, ya, yb, 1.0, &mut out);
    out
}

/// Accumulate `weight · ∂H/∂M` for one pair into `into`; the shared inner
/// loop of every gradient estimator here.
#[inline]
pub fn accumulate_hinge_gradient(
    matrix: &Matrix,
    threshold: f64,
    diff: &[f64],
    ya: i64,
    yb: i64,
    weight: f64,
    into: &mut Matrix,
) {
    let y = pair_sign(ya, yb);
    let u = y * (threshold - matrix.quadratic_form(diff));
    if 1.0 - u > 0.0 {
        into.add_scaled_outer(weight * y, diff);
    }
}

/// The metric-learning risk kernel (one sample, degree 2, labeled data).
pub struct MetricHingeKernel {
    model: MetricModel,
    degrees: [usize; 1],
}

pub fn metric_hinge_kernel(model: MetricModel) -> MetricHingeKernel {
    MetricHingeKernel {
        model,
        degrees: [2],
    }
}

impl MetricHingeKernel {
    pub fn model(&self) -> &MetricModel {
        &self.model
    }
}

impl Kernel for MetricHingeKernel {
    fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    fn evaluate(&self, samples: &SampleSet, tuple: &IndexTuple) -> f64 {
        let block = samples.block(0);
        let [i, j] = [tuple.block(0)[0], tuple.block(0)[1]];
        let (xa, xb) = (block.features(i), block.features(j));
        let diff: Vec<f64> = xa.iter().zip(xb.iter()).map(|(a, b)| a - b).collect();
        let ya = block.label(i).expect("labeled data");
        let yb = block.label(j).expect("labeled data");
        hinge_loss(&self.model.matrix, self.model.threshold, &diff, ya, yb)
    }

    fn validate(&self, samples: &SampleSet) -> Result<()> {
        if samples.block_count() != 1 {
            return Err(Error::DimensionMismatch(
                "metric hinge kernel is one-sample".into(),
            ));
        }
        let block = samples.block(0);
        if !block.has_labels() {
            return Err(Error::InvalidArgument(
                "metric hinge kernel requires labeled observations".into(),
            ));
        }
        if block.dim() != self.model.dim() {
            return Err(Error::DimensionMismatch(format!(
                "model dimension {} vs data dimension {}",
                self.model.dim(),
                block.dim()
            )));
        }
        Ok(())
    }
}

/// Frobenius-nearest PSD matrix to the symmetrized input: symmetric
/// eigendecomposition with negative eigenvalues clipped to zero.
/// Idempotent.
pub fn project_psd(matrix: &Matrix) -> Matrix {
    let sym = matrix.symmetrized();
    // Already inside the cone: eigen-clipping would be the identity.
    if sym.cholesky_feasible() {
        return sym;
    }
    let (mut vals, vecs) = sym.symmetric_eigen();
    for v in &mut vals {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Matrix::from_eigen(&vals, &vecs)
}

/// SGD objective for the metric-learning risk at a fixed threshold; the
/// parameter is the metric matrix.
pub struct MetricHingeObjective {
    pub threshold: f64,
}

impl SgdObjective for MetricHingeObjective {
    type Theta = Matrix;

    fn degrees(&self) -> Vec<usize> {
        vec![2]
    }

    fn accumulate_gradient(
        &self,
        theta: &Matrix,
        samples: &SampleSet,
        tuple: &IndexTuple,
        into: &mut Matrix,
        weight: f64,
    ) {
        let block = samples.block(0);
        let [i, j] = [tuple.block(0)[0], tuple.block(0)[1]];
        let (xa, xb) = (block.features(i), block.features(j));
        let diff: Vec<f64> = xa.iter().zip(xb.iter()).map(|(a, b)| a - b).collect();
        let ya = block.label(i).expect("labeled data");
        let yb = block.label(j).expect("labeled data");
        accumulate_hinge_gradient(theta, self.threshold, &diff, ya, yb, weight, into);
    }

    fn project(&self, theta: &mut Matrix) {
        *theta = project_psd(theta);
    }
}

impl Parameter for Matrix {
    fn zeroed(&self) -> Self {
        Matrix::zeros(self.rows(), self.cols())
    }

    fn scale(&mut self, a: f64) {
        Matrix::scale(self, a)
    }

    fn add_scaled(&mut self, a: f64, other: &Self) {
        Matrix::add_scaled(self, a, other)
    }

    fn norm(&self) -> f64 {
        self.frobenius_norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitRng;
    use rand::Rng as _;

    #[test]
    fn hinge_kernel_examples() {
        // same class, D_M = 0, b = 2: max(0, 1 - 2) = 0
        let m = MetricModel::identity(2, 2.0);
        let k = metric_hinge_kernel(m);
        let d = [0.0, 0.0];
        assert_eq!(hinge_loss(&k.model.matrix, 2.0, &d, 1, 1), 0.0);

        // different class at distance exactly b: u = 0, loss 1
        let model = MetricModel::identity(1, 4.0);
        let diff = [2.0]; // D = 4 = b
        assert_eq!(hinge_loss(&model.matrix, 4.0, &diff, 0, 1), 1.0);

        // zero matrix, b = 0: every pair costs 1
        let zero = MetricModel::new(Matrix::zeros(2, 2), 0.0).unwrap();
        let diff = [1.0, -3.0];
        assert_eq!(hinge_loss(&zero.matrix, 0.0, &diff, 1, 1), 1.0);
        assert_eq!(hinge_loss(&zero.matrix, 0.0, &diff, 0, 1), 1.0);
    }

    #[test]
    fn gradient_zero_on_flat_region() {
        // same class, close pair, generous threshold: hinge inactive
        let model = MetricModel::identity(2, 5.0);
        let g = metric_hinge_gradient(&model, &[0.1, 0.0], 1, &[0.0, 0.1], 1);
        assert_eq!(g.frobenius_norm(), 0.0);
    }

    #[test]
    fn gradient_active_same_class_is_outer_product() {
        // same class far apart: gradient = +(x - x')(x - x')ᵀ
        let model = MetricModel::identity(2, 1.0);
        let (xa, xb) = ([3.0, 0.0], [0.0, 1.0]);
        let g = metric_hinge_gradient(&model, &xa, 1, &xb, 1);
        let d = [3.0, -1.0];
        for i in 0..2 {
            for j in 0..2 {
                assert!((g.get(i, j) - d[i] * d[j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        // central differences at 100 random non-kink points, h = 1e-5,
        // relative error <= 1e-4
        let mut rng = SplitRng::new(99);
        let dim = 3;
        let mut checked = 0;
        while checked < 100 {
            let mut base = Matrix::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    base.set(i, j, rng.random::<f64>() - 0.5);
                }
            }
            let model = MetricModel::new(base, 1.5).unwrap();
            let xa: Vec<f64> = (0..dim).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
            let xb: Vec<f64> = (0..dim).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
            let (ya, yb) = (rng.below(3) as i64, rng.below(3) as i64);
            let diff: Vec<f64> = xa.iter().zip(xb.iter()).map(|(a, b)| a - b).collect();
            let y = pair_sign(ya, yb);
            let margin = 1.0 - y * (1.5 - model.matrix.quadratic_form(&diff));
            if margin.abs() < 1e-3 {
                continue; // too near the kink for finite differences
            }
            checked += 1;
            let grad = metric_hinge_gradient(&model, &xa, ya, &xb, yb);
            let h = 1e-5;
            for i in 0..dim {
                for j in 0..dim {
                    // symmetric perturbation, matching the symmetrized
                    // parameterization
                    let mut up = model.matrix.clone();
                    up.set(i, j, up.get(i, j) + h);
                    let mut down = model.matrix.clone();
                    down.set(i, j, down.get(i, j) - h);
                    let fd = (hinge_loss(&up, 1.5, &diff, ya, yb)
                        - hinge_loss(&down, 1.5, &diff, ya, yb))
                        / (2.0 * h);
                    let g = grad.get(i, j);
                    let denom = g.abs().max(fd.abs()).max(1e-8);
                    assert!(
                        (g - fd).abs() / denom <= 1e-4,
                        "entry ({i},{j}): analytic {g} vs fd {fd}"
                    );
                }
            }
        }
    }

    #[test]
    fn project_psd_examples() {
        // identity unchanged
        let id = Matrix::identity(3);
        assert!((project_psd(&id).frobenius_norm() - id.frobenius_norm()).abs() < 1e-12);

        // diag(1, -2) -> diag(1, 0)
        let m = Matrix::diagonal(&[1.0, -2.0]);
        let p = project_psd(&m);
        assert!((p.get(0, 0) - 1.0).abs() < 1e-12);
        assert!(p.get(1, 1).abs() < 1e-12);
        assert!(p.get(0, 1).abs() < 1e-12);

        // a PSD Gram matrix is a fixed point
        let mut rng = SplitRng::new(12);
        let mut a = Matrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                a.set(i, j, rng.random::<f64>() - 0.5);
            }
        }
        let mut gram = Matrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                let mut s = 0.0;
                for k in 0..4 {
                    s += a.get(k, i) * a.get(k, j);
                }
                gram.set(i, j, s);
            }
        }
        let p = project_psd(&gram);
        let mut diff = p.clone();
        diff.add_scaled(-1.0, &gram);
        assert!(diff.frobenius_norm() < 1e-10 * gram.frobenius_norm().max(1.0));
    }

    #[test]
    fn project_psd_idempotent() {
        let mut rng = SplitRng::new(13);
        for _ in 0..20 {
            let n = 5;
            let mut m = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, 2.0 * rng.random::<f64>() - 1.0);
                }
            }
            let once = project_psd(&m);
            let twice = project_psd(&once);
            let mut diff = twice.clone();
            diff.add_scaled(-1.0, &once);
            assert!(diff.frobenius_norm() <= 1e-12 * once.frobenius_norm().max(1.0));
            // output is PSD
            let (vals, _) = once.symmetric_eigen();
            assert!(vals.iter().all(|&v| v >= -1e-10));
        }
    }
}
