use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::connection::Connection;
use crate::forms::{ChartGrid, MatrixForm};
use crate::{Error, Result, C64};

/// Shape of a random smooth connection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomConnectionSpec {
    pub rank: usize,
    /// Fourier modes per potential component.
    pub modes: usize,
    /// Bound on each real and imaginary matrix entry of a mode.
    pub amplitude: f64,
    pub seed: u64,
    /// Leading axes the coefficients depend on; `None` for all of them.
    pub active_axes: Option<usize>,
}

struct Mode {
    wave: Vec<f64>,
    phase: f64,
    /// Anti-hermitian `rank × rank` coefficient, row-major.
    coeff: Vec<C64>,
}

/// Unitary connection `A = Σ_k Σ_j M_kj cos(2π n_j · s + φ_j) dx_k` with
/// `s` the coordinates rescaled to `[0, 1)` per axis, wave vectors in
/// `{−1, 0, 1}^dim \ 0` supported on the active axes, and anti-hermitian `M`.
///
/// The same seed gives the same connection on every grid with the same
/// axis extents, so it can be resampled across resolutions.
pub fn random_connection(grid: &Arc<ChartGrid>, spec: RandomConnectionSpec) -> Result<Connection> {
    if spec.rank == 0 || spec.modes == 0 || !(spec.amplitude > 0.0 && spec.amplitude.is_finite()) {
        return Err(Error::InvalidParameter("random connection needs rank, modes and amplitude > 0".into()));
    }
    let dim = grid.dim();
    let active = spec.active_axes.unwrap_or(dim);
    if active == 0 || active > dim {
        return Err(Error::InvalidParameter(alloc::format!("{active} active axes on a {dim}-dimensional chart")));
    }
    let n = spec.rank;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<Mode> {
        (0..spec.modes)
            .map(|_| {
                let mut wave: Vec<f64> =
                    (0..dim).map(|k| if k < active { rng.gen_range(-1i32..=1) as f64 } else { 0.0 }).collect();
                if wave.iter().all(|&w| w == 0.0) {
                    wave[rng.gen_range(0..active)] = 1.0;
                }
                let phase = rng.gen_range(0.0..2.0 * PI);
                let mut coeff = alloc::vec![C64::new(0.0, 0.0); n * n];
                for i in 0..n {
                    coeff[i * n + i] = C64::new(0.0, rng.gen_range(-spec.amplitude..spec.amplitude));
                    for j in (i + 1)..n {
                        let z = C64::new(
                            rng.gen_range(-spec.amplitude..spec.amplitude),
                            rng.gen_range(-spec.amplitude..spec.amplitude),
                        );
                        coeff[i * n + j] = z;
                        coeff[j * n + i] = -z.conj();
                    }
                }
                Mode { wave, phase, coeff }
            })
            .collect()
    };
    let per_axis: Vec<Vec<Mode>> = (0..dim).map(|_| draw(&mut rng)).collect();
    let axes: Vec<_> = grid.axes().to_vec();
    let pot = MatrixForm::from_fn(grid.clone(), 1, n, |x, m, out| {
        let k = m.trailing_zeros() as usize;
        for mode in &per_axis[k] {
            let arg: f64 = mode.wave.iter().zip(x).zip(&axes).map(|((w, xi), a)| w * (xi - a.lo) / a.length()).sum();
            let c = (2.0 * PI * arg + mode.phase).cos();
            for (o, z) in out.iter_mut().zip(&mode.coeff) {
                *o += z * c;
            }
        }
    });
    Connection::from_potential(pot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Axis;

    #[test]
    fn seeded_potentials_are_anti_hermitian_and_reproducible() {
        let grid = Arc::new(ChartGrid::new(alloc::vec![Axis::periodic(8, 0.0, 1.0); 2]).unwrap());
        let spec = RandomConnectionSpec { rank: 2, modes: 3, amplitude: 0.5, seed: 7, active_axes: None };
        let a = random_connection(&grid, spec).unwrap();
        let b = random_connection(&grid, spec).unwrap();
        assert_eq!(a, b);
        let p = a.potential().unwrap();
        for node in 0..grid.len() {
            for m in [1u32, 2] {
                let c = p.coeff(node, m);
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((c[i * 2 + j] + c[j * 2 + i].conj()).norm() < 1e-15);
                    }
                }
            }
        }
        let other = random_connection(&grid, RandomConnectionSpec { seed: 8, ..spec }).unwrap();
        assert!(other.potential().unwrap().distance(p).unwrap() > 1e-3);
    }
}
