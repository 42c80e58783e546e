//! Least-squares growth models for byte counts against input size.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// `α·n + β`
    Linear,
    /// `α·n·log2(n)`
    NLogN,
    /// `α·n² + β·n + γ`
    Quadratic,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::Linear, Model::NLogN, Model::Quadratic];

    fn basis(self, n: f64) -> Vec<f64> {
        match self {
            Model::Linear => vec![n, 1.0],
            Model::NLogN => vec![n * n.log2()],
            Model::Quadratic => vec![n * n, n, 1.0],
        }
    }

    pub fn formula(self) -> &'static str {
        match self {
            Model::Linear => "a*n + b",
            Model::NLogN => "a*n*log2(n)",
            Model::Quadratic => "a*n^2 + b*n + c",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fit {
    pub model: Model,
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

impl Fit {
    pub fn predict(&self, n: f64) -> f64 {
        self.model
            .basis(n)
            .iter()
            .zip(&self.coefficients)
            .map(|(x, c)| x * c)
            .sum()
    }
}

/// Ordinary least squares. `None` when there are fewer points than
/// coefficients.
pub fn fit(model: Model, xs: &[f64], ys: &[f64]) -> Option<Fit> {
    assert_eq!(xs.len(), ys.len(), "paired samples");
    let cols = model.basis(1.0).len();
    if xs.len() < cols {
        return None;
    }
    let design = DMatrix::from_fn(xs.len(), cols, |r, c| model.basis(xs[r])[c]);
    let target = DVector::from_column_slice(ys);
    let coef = design.clone().svd(true, true).solve(&target, 1e-12).ok()?;
    let predicted = &design * &coef;
    let residuals: Vec<f64> = ys
        .iter()
        .zip(predicted.iter())
        .map(|(y, p)| y - p)
        .collect();
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Some(Fit {
        model,
        coefficients: coef.iter().copied().collect(),
        r_squared,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_models() {
        let xs = [4.0, 8.0, 16.0, 32.0, 64.0];
        let lin: Vec<f64> = xs.iter().map(|n| 3.0 * n + 7.0).collect();
        let f = fit(Model::Linear, &xs, &lin).unwrap();
        assert!((f.coefficients[0] - 3.0).abs() < 1e-9 && (f.coefficients[1] - 7.0).abs() < 1e-9);
        assert!((f.r_squared - 1.0).abs() < 1e-12);

        let quad: Vec<f64> = xs.iter().map(|n| 0.5 * n * n + 2.0).collect();
        let f = fit(Model::Quadratic, &xs, &quad).unwrap();
        assert!((f.coefficients[0] - 0.5).abs() < 1e-9);
        assert!((f.predict(10.0) - 52.0).abs() < 1e-6);

        let nl: Vec<f64> = xs.iter().map(|n| 1.5 * n * n.log2()).collect();
        let f = fit(Model::NLogN, &xs, &nl).unwrap();
        assert!((f.coefficients[0] - 1.5).abs() < 1e-9);
    }

    #[test]
    fn linear_model_misfits_quadratic_data() {
        let xs: Vec<f64> = (1..=10).map(|n| n as f64 * 10.0).collect();
        let ys: Vec<f64> = xs.iter().map(|n| n * n).collect();
        let lin = fit(Model::Linear, &xs, &ys).unwrap();
        let quad = fit(Model::Quadratic, &xs, &ys).unwrap();
        assert!(quad.r_squared > lin.r_squared);
        assert!(lin.r_squared < 0.99);
    }

    #[test]
    fn too_few_points() {
        assert!(fit(Model::Quadratic, &[1.0, 2.0], &[1.0, 2.0]).is_none());
    }
}
