//! Pointwise Hermitian data: metric, torsion tensor and free jet surrogates,
//! plus the torsion contractions that feed the identity checks.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use crate::forms::{
    lefschetz_lambda, scalar_value, FormsError, HermitianMetricPoint, MultiDegreeForm,
};

/// Torsion coefficients T_{k̄jl}, antisymmetric in (j,l).
#[derive(Clone, Debug)]
pub struct TorsionTensor {
    n: u8,
    /// t[(k*n + j)*n + l] = T_{k̄jl}
    t: Vec<Complex64>,
}

impl TorsionTensor {
    pub fn zero(n: u8) -> Self {
        TorsionTensor {
            n,
            t: vec![Complex64::ZERO; (n as usize).pow(3)],
        }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn get(&self, k: usize, j: usize, l: usize) -> Complex64 {
        self.t[(k * self.n as usize + j) * self.n as usize + l]
    }

    /// Set T_{k̄jl} = v and T_{k̄lj} = −v.
    pub fn set_antisymmetric(&mut self, k: usize, j: usize, l: usize, v: Complex64) {
        assert_ne!(j, l, "diagonal entries vanish by antisymmetry");
        let n = self.n as usize;
        self.t[(k * n + j) * n + l] = v;
        self.t[(k * n + l) * n + j] = -v;
    }

    pub fn random<R: Rng>(n: u8, rng: &mut R) -> Self {
        let mut t = Self::zero(n);
        for k in 0..n as usize {
            for j in 0..n as usize {
                for l in j + 1..n as usize {
                    let v =
                        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    t.set_antisymmetric(k, j, l, v);
                }
            }
        }
        t
    }

    /// The (2,1)-form T = ½ T_{k̄jl} dz^l ∧ dz^j ∧ dz̄^k. On the increasing
    /// pair (a,b) with a < b the coefficient is T_{k̄ba}.
    pub fn form(&self) -> MultiDegreeForm {
        let n = self.n;
        let mut f = MultiDegreeForm::zero(n, 2, 1).expect("valid");
        let mut ri = 0usize;
        for a in 0..n {
            for b in a + 1..n {
                for k in 0..n {
                    f.set(ri, k as usize, self.get(k as usize, b as usize, a as usize));
                }
                ri += 1;
            }
        }
        f
    }

    /// τ_l = g^{jk̄} T_{k̄jl}.
    pub fn tau(&self, m: &HermitianMetricPoint) -> Vec<Complex64> {
        let n = self.n as usize;
        let mut tau = vec![Complex64::ZERO; n];
        for (l, t) in tau.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for j in 0..n {
                for k in 0..n {
                    acc += m.g_upper(j, k) * self.get(k, j, l);
                }
            }
            *t = acc;
        }
        tau
    }
}

/// Pointwise data for the identity suite: metric, torsion, and free tensors
/// standing in for the Chern-Ricci form and i∂∂̄ω (which need metric jets a
/// single point cannot provide).
#[derive(Clone, Debug)]
pub struct HermitianPointData {
    pub metric: HermitianMetricPoint,
    pub torsion: TorsionTensor,
    /// free real (1,1)-form surrogate for ρ = 2i∂∂̄ log‖Ω‖
    pub rho: MultiDegreeForm,
    /// free real (2,2)-form surrogate for i∂∂̄ω
    pub ddbar_omega: MultiDegreeForm,
}

impl HermitianPointData {
    pub fn random<R: Rng>(n: u8, rng: &mut R) -> Self {
        let metric = HermitianMetricPoint::random(n, rng);
        let torsion = TorsionTensor::random(n, rng);
        let rho = MultiDegreeForm::random_real(n, 1, rng).expect("valid");
        let ddbar_omega = MultiDegreeForm::random_real(n, 2, rng).expect("valid");
        HermitianPointData {
            metric,
            torsion,
            rho,
            ddbar_omega,
        }
    }

    pub fn n(&self) -> u8 {
        self.metric.n()
    }

    /// ∂ω = −i T as a (2,1)-form.
    pub fn del_omega(&self) -> MultiDegreeForm {
        self.torsion.form().scaled(-Complex64::I)
    }

    /// ∂̄ω = conj(∂ω) = i T̄.
    pub fn dbar_omega(&self) -> MultiDegreeForm {
        self.del_omega().conj()
    }

    /// τ as a (1,0)-form.
    pub fn tau_form(&self) -> MultiDegreeForm {
        let tau = self.torsion.tau(&self.metric);
        let mut f = MultiDegreeForm::zero(self.n(), 1, 0).expect("valid");
        for (l, v) in tau.iter().enumerate() {
            f.set(l, 0, *v);
        }
        f
    }

    /// Pointwise codifferential ∂̄*ω = −i τ (torsion-algebraic; see the
    /// conventions table).
    pub fn dbar_star_omega(&self) -> MultiDegreeForm {
        self.tau_form().scaled(-Complex64::I)
    }

    /// Pointwise codifferential ∂*ω = i τ̄.
    pub fn del_star_omega(&self) -> MultiDegreeForm {
        self.dbar_star_omega().conj()
    }
}

/// The torsion contractions of the identity block.
#[derive(Clone, Debug)]
pub struct TorsionContractions {
    /// τ_l = g^{jk̄} T_{k̄jl}
    pub tau: Vec<Complex64>,
    /// iT⊡T̄ as a real (1,1)-form
    pub box_form: MultiDegreeForm,
    /// iT∘T̄ as a real (1,1)-form
    pub circ_form: MultiDegreeForm,
    /// ‖T‖² = T_{k̄st} conj(T_{j̄uv}) g^{jk̄} g^{sū} g^{tv̄}
    pub norm_t2: f64,
    /// ‖τ‖² = g^{lm̄} τ_l conj(τ_m)
    pub norm_tau2: f64,
}

/// Build iT⊡T̄, iT∘T̄, τ, ‖T‖², ‖τ‖² by direct index contraction.
pub fn build_contractions(d: &HermitianPointData) -> TorsionContractions {
    let n = d.n() as usize;
    let m = &d.metric;
    let t = &d.torsion;

    // box_{ūs} = T_{k̄st} conj(T_{j̄uv}) g^{jk̄} g^{tv̄}
    let mut box_mat = DMatrix::<Complex64>::zeros(n, n);
    // circ_{k̄j} = T_{k̄st} conj(T_{j̄uv}) g^{sū} g^{tv̄}
    let mut circ_mat = DMatrix::<Complex64>::zeros(n, n);
    for s in 0..n {
        for u in 0..n {
            let mut acc = Complex64::ZERO;
            for k in 0..n {
                for j in 0..n {
                    let gjk = m.g_upper(j, k);
                    if gjk == Complex64::ZERO {
                        continue;
                    }
                    for tt in 0..n {
                        for v in 0..n {
                            acc += t.get(k, s, tt)
                                * t.get(j, u, v).conj()
                                * gjk
                                * m.g_upper(tt, v);
                        }
                    }
                }
            }
            box_mat[(u, s)] = acc;
        }
    }
    for k in 0..n {
        for j in 0..n {
            let mut acc = Complex64::ZERO;
            for s in 0..n {
                for u in 0..n {
                    let gsu = m.g_upper(s, u);
                    if gsu == Complex64::ZERO {
                        continue;
                    }
                    for tt in 0..n {
                        for v in 0..n {
                            acc += t.get(k, s, tt)
                                * t.get(j, u, v).conj()
                                * gsu
                                * m.g_upper(tt, v);
                        }
                    }
                }
            }
            circ_mat[(k, j)] = acc;
        }
    }

    // ‖T‖² = full contraction; equals tr_g of either matrix
    let mut norm_t2 = Complex64::ZERO;
    for k in 0..n {
        for j in 0..n {
            norm_t2 += m.g_upper(j, k) * circ_mat[(k, j)];
        }
    }

    let tau = t.tau(m);
    let mut norm_tau2 = Complex64::ZERO;
    for l in 0..n {
        for mm in 0..n {
            norm_tau2 += m.g_upper(l, mm) * tau[l] * tau[mm].conj();
        }
    }

    let to_form = |mat: &DMatrix<Complex64>| {
        // real (1,1)-form i h_{k̄j} dz^j ∧ dz̄^k from the Hermitian matrix h
        let mut f = MultiDegreeForm::zero(d.n(), 1, 1).expect("valid");
        for j in 0..n {
            for k in 0..n {
                f.set(j, k, Complex64::I * mat[(k, j)]);
            }
        }
        f
    };

    TorsionContractions {
        tau,
        box_form: to_form(&box_mat),
        circ_form: to_form(&circ_mat),
        norm_t2: norm_t2.re,
        norm_tau2: norm_tau2.re,
    }
}

/// Smallest eigenvalue of the Hermitian coefficient matrix of a real
/// (1,1)-form; nonnegative for positive semidefinite forms.
pub fn min_eigenvalue_11(f: &MultiDegreeForm) -> f64 {
    let n = f.n() as usize;
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            h[(k, j)] = -Complex64::I * f.get(j, k);
        }
    }
    let eig = SymmetricEigen::new(h);
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Λ of a real (1,1)-form as a real scalar.
pub fn lambda_scalar(f: &MultiDegreeForm, m: &HermitianMetricPoint) -> f64 {
    scalar_value(&lefschetz_lambda(f, m)).re
}

/// iτ∧τ̄ as a real (1,1)-form.
pub fn i_tau_wedge_taubar(d: &HermitianPointData) -> Result<MultiDegreeForm, FormsError> {
    let tau = d.tau_form();
    Ok(tau.wedge(&tau.conj())?.scaled(Complex64::I))
}
