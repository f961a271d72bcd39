//! Centered finite-difference operators on periodic fields: Laplacian
//! (2nd or 4th order), first derivatives, Hessians and their determinants.

use super::field::PeriodicScalarField;
use super::GridError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StencilOrder {
    Two,
    Four,
}

/// Wrapped neighbor tables for one axis: index offsets at ±1 and ±2.
struct AxisWrap {
    stride: usize,
    n: usize,
}

impl AxisWrap {
    #[inline]
    fn shift(&self, coord: usize, off: i64) -> usize {
        let n = self.n as i64;
        (((coord as i64 + off) % n + n) % n) as usize
    }
}

fn axes(f: &PeriodicScalarField) -> Vec<AxisWrap> {
    let strides = f.strides();
    f.dims()
        .iter()
        .zip(strides)
        .map(|(&n, stride)| AxisWrap { stride, n })
        .collect()
}

/// Apply a 1-d symmetric stencil along every axis and sum; the core of the
/// Laplacian. Taps are written as weights on (f_neighbor − f_center) so
/// constants are annihilated exactly in floating point.
fn apply_axis_stencil(
    f: &PeriodicScalarField,
    out: &mut PeriodicScalarField,
    taps: &[(i64, f64)],
    scale_per_axis: &[f64],
) {
    let ax = axes(f);
    let d = f.ndim();
    let dims = f.dims().to_vec();
    let data = f.data();
    let out_data = out.data_mut();
    out_data.fill(0.0);
    let mut coords = vec![0usize; d];
    for (i, out_v) in out_data.iter_mut().enumerate() {
        let center = data[i];
        let mut acc = 0.0;
        for a in 0..d {
            let base = i - coords[a] * ax[a].stride;
            let mut axis_acc = 0.0;
            for &(off, w) in taps {
                axis_acc +=
                    w * (data[base + ax[a].shift(coords[a], off) * ax[a].stride] - center);
            }
            acc += axis_acc * scale_per_axis[a];
        }
        *out_v = acc;
        // odometer advance, row-major
        for a in (0..d).rev() {
            coords[a] += 1;
            if coords[a] < dims[a] {
                break;
            }
            coords[a] = 0;
        }
    }
}

/// Discrete Laplacian Δf = Σ_a ∂²f/∂x_a², centered differences of the given
/// order. Annihilates constants exactly and is symmetric with respect to the
/// grid inner product.
pub fn laplacian(
    f: &PeriodicScalarField,
    order: StencilOrder,
    out: &mut PeriodicScalarField,
) {
    let d = f.ndim();
    let scale: Vec<f64> = (0..d).map(|a| 1.0 / (f.spacing(a) * f.spacing(a))).collect();
    match order {
        StencilOrder::Two => {
            apply_axis_stencil(f, out, &[(-1, 1.0), (1, 1.0)], &scale);
        }
        StencilOrder::Four => {
            apply_axis_stencil(
                f,
                out,
                &[
                    (-2, -1.0 / 12.0),
                    (-1, 16.0 / 12.0),
                    (1, 16.0 / 12.0),
                    (2, -1.0 / 12.0),
                ],
                &scale,
            );
        }
    }
}

pub fn laplacian_new(f: &PeriodicScalarField, order: StencilOrder) -> PeriodicScalarField {
    let mut out = f.zeros_like();
    laplacian(f, order, &mut out);
    out
}

/// Centered first derivative along one axis, O(h²).
pub fn derivative_axis(f: &PeriodicScalarField, axis: usize) -> PeriodicScalarField {
    let ax = axes(f);
    let d = f.ndim();
    let dims = f.dims().to_vec();
    let inv2h = 1.0 / (2.0 * f.spacing(axis));
    let mut out = f.zeros_like();
    let data = f.data();
    let mut coords = vec![0usize; d];
    for (i, out_v) in out.data_mut().iter_mut().enumerate() {
        let base = i - coords[axis] * ax[axis].stride;
        let up = base + ax[axis].shift(coords[axis], 1) * ax[axis].stride;
        let dn = base + ax[axis].shift(coords[axis], -1) * ax[axis].stride;
        *out_v = (data[up] - data[dn]) * inv2h;
        for a in (0..d).rev() {
            coords[a] += 1;
            if coords[a] < dims[a] {
                break;
            }
            coords[a] = 0;
        }
    }
    out
}

/// Centered second derivative ∂²f/∂x_a∂x_b, O(h²). Pure second difference on
/// the diagonal, four-point cross stencil off it.
pub fn second_derivative(f: &PeriodicScalarField, a: usize, b: usize) -> PeriodicScalarField {
    let ax = axes(f);
    let d = f.ndim();
    let dims = f.dims().to_vec();
    let data = f.data();
    let mut out = f.zeros_like();
    let mut coords = vec![0usize; d];
    if a == b {
        let inv_h2 = 1.0 / (f.spacing(a) * f.spacing(a));
        for (i, out_v) in out.data_mut().iter_mut().enumerate() {
            let base = i - coords[a] * ax[a].stride;
            let up = base + ax[a].shift(coords[a], 1) * ax[a].stride;
            let dn = base + ax[a].shift(coords[a], -1) * ax[a].stride;
            *out_v = (data[up] - 2.0 * data[i] + data[dn]) * inv_h2;
            for axis in (0..d).rev() {
                coords[axis] += 1;
                if coords[axis] < dims[axis] {
                    break;
                }
                coords[axis] = 0;
            }
        }
    } else {
        let inv = 1.0 / (4.0 * f.spacing(a) * f.spacing(b));
        for (i, out_v) in out.data_mut().iter_mut().enumerate() {
            let base_a = i - coords[a] * ax[a].stride;
            let pa = base_a + ax[a].shift(coords[a], 1) * ax[a].stride;
            let ma = base_a + ax[a].shift(coords[a], -1) * ax[a].stride;
            let rebase = |idx: usize| idx - coords[b] * ax[b].stride;
            let pp = rebase(pa) + ax[b].shift(coords[b], 1) * ax[b].stride;
            let pm = rebase(pa) + ax[b].shift(coords[b], -1) * ax[b].stride;
            let mp = rebase(ma) + ax[b].shift(coords[b], 1) * ax[b].stride;
            let mm = rebase(ma) + ax[b].shift(coords[b], -1) * ax[b].stride;
            *out_v = (data[pp] - data[pm] - data[mp] + data[mm]) * inv;
            for axis in (0..d).rev() {
                coords[axis] += 1;
                if coords[axis] < dims[axis] {
                    break;
                }
                coords[axis] = 0;
            }
        }
    }
    out
}

/// All Hessian components of a field, row-major upper triangle expanded to
/// the full symmetric set: [(0,0), (0,1), …, (d−1,d−1)] indexed [a][b].
#[allow(clippy::needless_range_loop)] // mirror access rows[b][a] during construction
pub fn hessian(f: &PeriodicScalarField) -> Vec<Vec<PeriodicScalarField>> {
    let d = f.ndim();
    let mut rows: Vec<Vec<PeriodicScalarField>> = Vec::with_capacity(d);
    for a in 0..d {
        let mut row = Vec::with_capacity(d);
        for b in 0..d {
            if b < a {
                row.push(rows[b][a].clone());
            } else {
                row.push(second_derivative(f, a, b));
            }
        }
        rows.push(row);
    }
    rows
}

/// Pointwise determinant of `shift·I + ∇²f`.
pub fn hessian_det_shifted(
    f: &PeriodicScalarField,
    shift: f64,
) -> Result<PeriodicScalarField, GridError> {
    let d = f.ndim();
    if d > 3 {
        return Err(GridError::BadShape {
            dims: f.dims().to_vec(),
            lengths: f.lengths().to_vec(),
        });
    }
    let h = hessian(f);
    let mut out = f.zeros_like();
    let n = f.len();
    match d {
        1 => {
            for i in 0..n {
                out.data_mut()[i] = shift + h[0][0].data()[i];
            }
        }
        2 => {
            for i in 0..n {
                let a = shift + h[0][0].data()[i];
                let b = h[0][1].data()[i];
                let c = shift + h[1][1].data()[i];
                out.data_mut()[i] = a * c - b * b;
            }
        }
        3 => {
            for i in 0..n {
                let a00 = shift + h[0][0].data()[i];
                let a11 = shift + h[1][1].data()[i];
                let a22 = shift + h[2][2].data()[i];
                let a01 = h[0][1].data()[i];
                let a02 = h[0][2].data()[i];
                let a12 = h[1][2].data()[i];
                out.data_mut()[i] = a00 * (a11 * a22 - a12 * a12)
                    - a01 * (a01 * a22 - a12 * a02)
                    + a02 * (a01 * a12 - a11 * a02);
            }
        }
        _ => unreachable!(),
    }
    Ok(out)
}

/// Pointwise determinant of the centered-difference Hessian of f.
pub fn hessian_det(f: &PeriodicScalarField) -> Result<PeriodicScalarField, GridError> {
    hessian_det_shifted(f, 0.0)
}

/// Discrete Dirichlet energy through the Laplacian quadratic form:
/// I(u) = −½ ⟨u, Δu⟩ · cell volume. Nonnegative and exactly nonincreasing
/// under u̇ = c(u)·Δu with c ≥ 0 at the semi-discrete level.
pub fn dirichlet_energy(f: &PeriodicScalarField, order: StencilOrder) -> f64 {
    let lap = laplacian_new(f, order);
    let dot: f64 = f.data().iter().zip(lap.data()).map(|(a, b)| a * b).sum();
    -0.5 * dot * f.cell_volume()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn laplacian_annihilates_constants() {
        let f = PeriodicScalarField::constant(&[16, 16], &[1.0, 2.0], 3.7).unwrap();
        for order in [StencilOrder::Two, StencilOrder::Four] {
            let lap = laplacian_new(&f, order);
            assert_eq!(lap.max_abs(), 0.0);
        }
    }

    #[test]
    fn laplacian_eigenfunction() {
        // f = sin(2πx/L) on N = 64: Δf ≈ −(2π/L)² f, relative error < 1e−3
        let l = 2.5;
        let f = PeriodicScalarField::from_fn(&[64], &[l], |x| (TAU * x[0] / l).sin()).unwrap();
        let lap = laplacian_new(&f, StencilOrder::Two);
        let k2 = (TAU / l).powi(2);
        let mut rel = 0.0f64;
        for i in 0..f.len() {
            rel = rel.max((lap.data()[i] + k2 * f.data()[i]).abs());
        }
        assert!(rel / k2 < 1e-3, "rel {rel}");
    }

    #[test]
    fn laplacian_refinement_ratios() {
        // order 2 → error ratio ≈ 4 between N and 2N; order 4 → ≈ 16
        let l = 1.0;
        let err = |n: usize, order: StencilOrder| {
            let f =
                PeriodicScalarField::from_fn(&[n], &[l], |x| (TAU * x[0] / l).sin()).unwrap();
            let lap = laplacian_new(&f, order);
            let k2 = (TAU / l).powi(2);
            let mut worst = 0.0f64;
            for i in 0..f.len() {
                worst = worst.max((lap.data()[i] + k2 * f.data()[i]).abs());
            }
            worst
        };
        let r2 = err(32, StencilOrder::Two) / err(64, StencilOrder::Two);
        assert!((r2 - 4.0).abs() < 0.3, "order-2 ratio {r2}");
        let r4 = err(32, StencilOrder::Four) / err(64, StencilOrder::Four);
        assert!((r4 - 16.0).abs() < 2.0, "order-4 ratio {r4}");
    }

    #[test]
    fn laplacian_is_symmetric() {
        // ⟨Δf, g⟩ = ⟨f, Δg⟩ to round-off
        let mut rng = {
            use rand::SeedableRng;
            rand_chacha::ChaCha8Rng::seed_from_u64(5)
        };
        let f =
            PeriodicScalarField::random_smooth(&[16, 12], &[1.0, 1.3], 1.0, 2, &mut rng).unwrap();
        let g =
            PeriodicScalarField::random_smooth(&[16, 12], &[1.0, 1.3], 1.0, 2, &mut rng).unwrap();
        for order in [StencilOrder::Two, StencilOrder::Four] {
            let lf = laplacian_new(&f, order);
            let lg = laplacian_new(&g, order);
            let a: f64 = lf.data().iter().zip(g.data()).map(|(x, y)| x * y).sum();
            let b: f64 = f.data().iter().zip(lg.data()).map(|(x, y)| x * y).sum();
            assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn hessian_det_dimension_collapse() {
        // d = 1: det = f''
        let f = PeriodicScalarField::from_fn(&[64], &[1.0], |x| (TAU * x[0]).cos()).unwrap();
        let det = hessian_det(&f).unwrap();
        let dxx = second_derivative(&f, 0, 0);
        assert_eq!(det.data(), dxx.data());
    }

    #[test]
    fn hessian_det_identity_background() {
        // flat potential → det(I + ∇²0) = 1
        let f = PeriodicScalarField::constant(&[8, 8, 8], &[1.0; 3], 0.0).unwrap();
        let det = hessian_det_shifted(&f, 1.0).unwrap();
        assert!(det.data().iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn hessian_det_matches_analytic_oracle() {
        // φ = a sin(2πx)sin(2πy): analytic Hessian known; O(h²) agreement
        let a = 0.01;
        let phi = PeriodicScalarField::from_fn(&[48, 48], &[1.0, 1.0], |x| {
            a * (TAU * x[0]).sin() * (TAU * x[1]).sin()
        })
        .unwrap();
        let det = hessian_det_shifted(&phi, 1.0).unwrap();
        let mut worst = 0.0f64;
        let mut coords = [0usize; 2];
        for i in 0..phi.len() {
            phi.decode(i, &mut coords);
            let (x, y) = (
                coords[0] as f64 * phi.spacing(0),
                coords[1] as f64 * phi.spacing(1),
            );
            let pxx = -a * TAU * TAU * (TAU * x).sin() * (TAU * y).sin();
            let pyy = pxx;
            let pxy = a * TAU * TAU * (TAU * x).cos() * (TAU * y).cos();
            let exact = (1.0 + pxx) * (1.0 + pyy) - pxy * pxy;
            worst = worst.max((det.data()[i] - exact).abs());
        }
        // h² (2π)⁴ a ≈ 0.68·a·h²-scale error budget
        assert!(worst < 5.0 * a * (TAU / 48.0).powi(2) * TAU * TAU, "worst {worst}");
    }

    #[test]
    fn dirichlet_energy_nonnegative() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        let f =
            PeriodicScalarField::random_smooth(&[32, 32], &[1.0, 1.0], 0.5, 2, &mut rng).unwrap();
        assert!(dirichlet_energy(&f, StencilOrder::Two) > 0.0);
    }
}
