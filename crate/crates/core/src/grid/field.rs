//! Real scalar fields sampled on uniform periodic grids in 1–3 dimensions.

use rand::Rng;

use super::GridError;

/// Samples of a real scalar on the uniform periodic grid with `dims[a]`
/// points and period `lengths[a]` along axis a; node coordinates are
/// x_a = i·h_a with h_a = L_a / N_a.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicScalarField {
    dims: Vec<usize>,
    lengths: Vec<f64>,
    data: Vec<f64>,
}

impl PeriodicScalarField {
    pub fn constant(dims: &[usize], lengths: &[f64], value: f64) -> Result<Self, GridError> {
        if dims.is_empty() || dims.len() > 3 || dims.len() != lengths.len() {
            return Err(GridError::BadShape {
                dims: dims.to_vec(),
                lengths: lengths.to_vec(),
            });
        }
        if dims.contains(&0) || !lengths.iter().all(|&l| l > 0.0) {
            return Err(GridError::BadShape {
                dims: dims.to_vec(),
                lengths: lengths.to_vec(),
            });
        }
        let len = dims.iter().product();
        Ok(PeriodicScalarField {
            dims: dims.to_vec(),
            lengths: lengths.to_vec(),
            data: vec![value; len],
        })
    }

    /// Sample `f` at the grid nodes.
    pub fn from_fn(
        dims: &[usize],
        lengths: &[f64],
        mut f: impl FnMut(&[f64]) -> f64,
    ) -> Result<Self, GridError> {
        let mut field = Self::constant(dims, lengths, 0.0)?;
        let mut coords = vec![0usize; dims.len()];
        let mut x = vec![0.0f64; dims.len()];
        for i in 0..field.data.len() {
            field.decode(i, &mut coords);
            for a in 0..dims.len() {
                x[a] = coords[a] as f64 * field.spacing(a);
            }
            field.data[i] = f(&x);
        }
        Ok(field)
    }

    /// Smooth random periodic field: a few low Fourier modes per axis with
    /// seeded amplitudes, scaled to max amplitude `amp`.
    pub fn random_smooth<R: Rng>(
        dims: &[usize],
        lengths: &[f64],
        amp: f64,
        modes: usize,
        rng: &mut R,
    ) -> Result<Self, GridError> {
        let d = dims.len();
        let mut terms: Vec<(Vec<i32>, f64, f64)> = Vec::new();
        let mut wave = vec![0i32; d];
        // enumerate small wave vectors, skip zero mode
        fn walk(
            axis: usize,
            modes: i32,
            wave: &mut Vec<i32>,
            out: &mut Vec<(Vec<i32>, f64, f64)>,
            rng: &mut impl Rng,
        ) {
            if axis == wave.len() {
                if wave.iter().any(|&k| k != 0) {
                    out.push((
                        wave.clone(),
                        rng.random_range(-1.0..1.0),
                        rng.random_range(0.0..std::f64::consts::TAU),
                    ));
                }
                return;
            }
            for k in 0..=modes {
                wave[axis] = k;
                walk(axis + 1, modes, wave, out, rng);
            }
            wave[axis] = 0;
        }
        walk(0, modes as i32, &mut wave, &mut terms, rng);
        let mut field = Self::from_fn(dims, lengths, |x| {
            let mut v = 0.0;
            for (k, a, phase) in &terms {
                let mut arg = *phase;
                for (axis, &kk) in k.iter().enumerate() {
                    arg += std::f64::consts::TAU * kk as f64 * x[axis] / lengths[axis];
                }
                v += a * arg.sin();
            }
            v
        })?;
        let max = field.max_abs().max(1e-300);
        for v in &mut field.data {
            *v *= amp / max;
        }
        Ok(field)
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn lengths(&self) -> &[f64] {
        &self.lengths
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
    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.dims[axis] as f64
    }
    pub fn min_spacing(&self) -> f64 {
        (0..self.ndim()).map(|a| self.spacing(a)).fold(f64::INFINITY, f64::min)
    }
    /// Total volume of the torus.
    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }
    /// Volume of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        (0..self.ndim()).map(|a| self.spacing(a)).product()
    }

    /// Row-major strides.
    pub fn strides(&self) -> Vec<usize> {
        let d = self.dims.len();
        let mut s = vec![1usize; d];
        for a in (0..d.saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.dims[a + 1];
        }
        s
    }

    pub fn decode(&self, mut idx: usize, coords: &mut [usize]) {
        for a in (0..self.dims.len()).rev() {
            coords[a] = idx % self.dims[a];
            idx /= self.dims[a];
        }
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.dims == other.dims && self.lengths == other.lengths
    }

    pub fn zeros_like(&self) -> Self {
        PeriodicScalarField {
            dims: self.dims.clone(),
            lengths: self.lengths.clone(),
            data: vec![0.0; self.data.len()],
        }
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Midpoint (= trapezoid) quadrature on the periodic grid: mean × volume.
    pub fn integral(&self) -> f64 {
        self.mean() * self.volume()
    }

    /// Quadrature of f(u) pointwise.
    pub fn integral_of(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.data.iter().map(|&v| f(v)).sum::<f64>() / self.data.len() as f64 * self.volume()
    }

    pub fn min_with_index(&self) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0usize);
        for (i, &v) in self.data.iter().enumerate() {
            if v < best.0 {
                best = (v, i);
            }
        }
        best
    }

    pub fn max_with_index(&self) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (i, &v) in self.data.iter().enumerate() {
            if v > best.0 {
                best = (v, i);
            }
        }
        best
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// self += s·other
    pub fn axpy(&mut self, s: f64, other: &Self) {
        debug_assert!(self.same_shape(other));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for a in &mut self.data {
            *a *= s;
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = f(*v);
        }
        out
    }
}
