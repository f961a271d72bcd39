//! Machine verification of the displayed pointwise identities: the star
//! formulas for contracted (1,1)/(2,2)/(3,3) blocks, the Λ-calculus ladder,
//! the three-dimensional codifferential identity, and the star/trace
//! inversion that turns the flow of (n−1,n−1)-forms into a metric flow.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::forms::reference::star_by_pairing_solve;
use crate::forms::{
    hodge_star, lambda_pow, lefschetz_l, lefschetz_lambda, primitive_decompose, scalar_value,
    trace_11_complex, FormsError, HermitianMetricPoint, MultiDegreeForm,
};

use super::point_data::{
    build_contractions, i_tau_wedge_taubar, lambda_scalar, HermitianPointData,
};

fn factorial(k: i16) -> f64 {
    let mut f = 1.0;
    for i in 2..=k.max(0) as u64 {
        f *= i as f64;
    }
    f
}

fn rel_distance(a: &MultiDegreeForm, b: &MultiDegreeForm) -> f64 {
    a.distance(b) / (1.0 + a.norm_max().max(b.norm_max()))
}

/// *(A ∧ ω^{n−2}) = −(n−2)!·A + (n−2)!·(ΛA)·ω for a real (1,1)-form A,
/// with the left side evaluated by the brute-force pairing-solve star.
/// `sign` multiplies the right side (−1 is the negative-control hook).
pub fn check_star_formula_a(
    a: &MultiDegreeForm,
    m: &HermitianMetricPoint,
    sign: f64,
) -> Result<f64, FormsError> {
    let n = m.n();
    let lhs = star_by_pairing_solve(&a.wedge(&m.omega().wedge_pow(n - 2)?)?, m)?;
    let fac = factorial(n as i16 - 2);
    let lam_a = scalar_value(&lefschetz_lambda(a, m));
    let rhs = a
        .scaled(Complex64::new(-fac, 0.0))
        .add(&m.omega().scaled(Complex64::new(fac, 0.0) * lam_a))?
        .scaled(Complex64::new(sign, 0.0));
    Ok(rel_distance(&lhs, &rhs))
}

/// *(B ∧ ω^{n−3}) = −(n−3)!·ΛB + (n−3)!·(Λ²B/2)·ω for a real (2,2)-form B.
pub fn check_star_formula_b(
    b: &MultiDegreeForm,
    m: &HermitianMetricPoint,
    sign: f64,
) -> Result<f64, FormsError> {
    let n = m.n();
    let lhs = star_by_pairing_solve(&b.wedge(&m.omega().wedge_pow(n - 3)?)?, m)?;
    let fac = factorial(n as i16 - 3);
    let lam_b = lefschetz_lambda(b, m);
    let lam2_b_half = scalar_value(&lefschetz_lambda(&lam_b, m)) * 0.5;
    let rhs = lam_b
        .scaled(Complex64::new(-fac, 0.0))
        .add(&m.omega().scaled(Complex64::new(fac, 0.0) * lam2_b_half))?
        .scaled(Complex64::new(sign, 0.0));
    Ok(rel_distance(&lhs, &rhs))
}

/// *(C ∧ ω^{n−4}) = (n−4)!·((Λ³C/6)·ω − Λ²C/2) for a real (3,3)-form C.
pub fn check_star_formula_c(
    c: &MultiDegreeForm,
    m: &HermitianMetricPoint,
    sign: f64,
) -> Result<f64, FormsError> {
    let n = m.n();
    let lhs = star_by_pairing_solve(&c.wedge(&m.omega().wedge_pow(n - 4)?)?, m)?;
    let fac = factorial(n as i16 - 4);
    let lam2_half = lambda_pow(c, m, 2).scaled(Complex64::new(0.5, 0.0));
    let lam3_sixth = scalar_value(&lambda_pow(c, m, 3)) / 6.0;
    let rhs = m
        .omega()
        .scaled(Complex64::new(fac, 0.0) * lam3_sixth)
        .sub(&lam2_half.scaled(Complex64::new(fac, 0.0)))?
        .scaled(Complex64::new(sign, 0.0));
    Ok(rel_distance(&lhs, &rhs))
}

/// tr *(C ∧ ω^{n−4}) = (n−3)!·Λ³C/6.
pub fn check_star_trace_c(
    c: &MultiDegreeForm,
    m: &HermitianMetricPoint,
    sign: f64,
) -> Result<f64, FormsError> {
    let n = m.n();
    let star = star_by_pairing_solve(&c.wedge(&m.omega().wedge_pow(n - 4)?)?, m)?;
    let lhs = trace_11_complex(&star, m)?;
    let rhs = Complex64::new(sign * factorial(n as i16 - 3), 0.0)
        * (scalar_value(&lambda_pow(c, m, 3)) / 6.0);
    Ok((lhs - rhs).norm() / (1.0 + lhs.norm().max(rhs.norm())))
}

/// Λ ladder for C = iT∧T̄ through the primitive decomposition:
/// ΛC = Σ_j j(n−k_j−j+1)·ω^{j−1}∧P_j with k_j = deg P_j. The displayed
/// version of this ladder carries (n−2)P⁴ as the first coefficient; the sl₂
/// commutator gives (n−4), and the two agree only where the P⁴ term vanishes
/// (n = 4). The suite asserts the sl₂ value.
pub fn check_lambda_ladder_c_decomposition(
    d: &HermitianPointData,
    sign: f64,
) -> Result<f64, FormsError> {
    let m = &d.metric;
    let t_form = d.torsion.form();
    let c = t_form.wedge(&t_form.conj())?.scaled(Complex64::I);
    let lhs = lefschetz_lambda(&c, m);
    let decomp = primitive_decompose(&c, m)?;
    let n = m.n() as f64;
    let mut rhs = MultiDegreeForm::zero(m.n(), lhs.p(), lhs.q())?;
    for (j, prim) in &decomp.components {
        if *j == 0 {
            continue;
        }
        let k = prim.degree() as f64;
        let coeff = *j as f64 * (n - k - *j as f64 + 1.0);
        if coeff == 0.0 {
            continue;
        }
        let mut term = prim.clone();
        for _ in 0..(*j - 1) {
            term = lefschetz_l(&term, m)?;
        }
        rhs = rhs.add(&term.scaled(Complex64::new(coeff, 0.0)))?;
    }
    Ok(rel_distance(&lhs, &rhs.scaled(Complex64::new(sign, 0.0))))
}

/// ΛA = R/(n−1) + 4(n−2)/(n−1)²·‖τ‖² with A = ρ/(n−1) + 4i(n−2)/(n−1)²·τ∧τ̄
/// and R = Λρ (ρ enters as a free surrogate).
pub fn check_lambda_ladder_a(d: &HermitianPointData, sign: f64) -> Result<f64, FormsError> {
    let m = &d.metric;
    let n = m.n() as f64;
    let con = build_contractions(d);
    let coef = 4.0 * (n - 2.0) / ((n - 1.0) * (n - 1.0));
    let a = d
        .rho
        .scaled(Complex64::new(1.0 / (n - 1.0), 0.0))
        .add(&i_tau_wedge_taubar(d)?.scaled(Complex64::new(coef, 0.0)))?;
    let lhs = lambda_scalar(&a, m);
    let r = lambda_scalar(&d.rho, m);
    let rhs = sign * (r / (n - 1.0) + coef * con.norm_tau2);
    Ok((lhs - rhs).abs() / (1.0 + lhs.abs().max(rhs.abs())))
}

/// The torsion part of the ΛB line: with B = (2n−4)/(n−1)·(T∧τ̄ + T̄∧τ) + i∂∂̄ω,
/// ΛB − Λ(i∂∂̄ω) = (2n−4)/(n−1)·Λ(∂ω∧∂*ω + ∂̄ω∧∂̄*ω). The i∂∂̄ω surrogate's
/// contraction is returned as an opaque magnitude, never asserted.
pub fn check_lambda_ladder_b_torsion(
    d: &HermitianPointData,
    sign: f64,
) -> Result<(f64, f64), FormsError> {
    let m = &d.metric;
    let n = m.n() as f64;
    let coef = (2.0 * n - 4.0) / (n - 1.0);
    let t_form = d.torsion.form();
    let tbar = t_form.conj();
    let tau = d.tau_form();
    let taubar = tau.conj();
    let b_tors = t_form
        .wedge(&taubar)?
        .add(&tbar.wedge(&tau)?)?
        .scaled(Complex64::new(coef, 0.0));
    let b_full = b_tors.add(&d.ddbar_omega)?;
    let lhs = lefschetz_lambda(&b_full, m).sub(&lefschetz_lambda(&d.ddbar_omega, m))?;
    let rhs = lefschetz_lambda(
        &d.del_omega()
            .wedge(&d.del_star_omega())?
            .add(&d.dbar_omega().wedge(&d.dbar_star_omega())?)?,
        m,
    )
    .scaled(Complex64::new(sign * coef, 0.0));
    let opaque = lefschetz_lambda(&d.ddbar_omega, m).norm_max();
    Ok((rel_distance(&lhs, &rhs), opaque))
}

/// Λ²C/2 = −Λ(∂ω∧∂*ω + ∂̄ω∧∂̄*ω) − iτ∧τ̄ − iT⊡T̄ − ½ iT∘T̄.
pub fn check_lambda_ladder_c2(d: &HermitianPointData, sign: f64) -> Result<f64, FormsError> {
    let m = &d.metric;
    let con = build_contractions(d);
    let t_form = d.torsion.form();
    let c = t_form.wedge(&t_form.conj())?.scaled(Complex64::I);
    let lhs = lambda_pow(&c, m, 2).scaled(Complex64::new(0.5, 0.0));
    let mixed = lefschetz_lambda(
        &d.del_omega()
            .wedge(&d.del_star_omega())?
            .add(&d.dbar_omega().wedge(&d.dbar_star_omega())?)?,
        m,
    );
    let rhs = mixed
        .scaled(Complex64::new(-1.0, 0.0))
        .sub(&i_tau_wedge_taubar(d)?)?
        .sub(&con.box_form)?
        .sub(&con.circ_form.scaled(Complex64::new(0.5, 0.0)))?
        .scaled(Complex64::new(sign, 0.0));
    Ok(rel_distance(&lhs, &rhs))
}

/// Λ³C/6 = ‖τ‖² − ‖T‖²/2.
pub fn check_lambda_ladder_c3(d: &HermitianPointData, sign: f64) -> Result<f64, FormsError> {
    let m = &d.metric;
    let con = build_contractions(d);
    let t_form = d.torsion.form();
    let c = t_form.wedge(&t_form.conj())?.scaled(Complex64::I);
    let lhs = scalar_value(&lambda_pow(&c, m, 3)).re / 6.0;
    let rhs = sign * (con.norm_tau2 - 0.5 * con.norm_t2);
    Ok((lhs - rhs).abs() / (1.0 + lhs.abs().max(rhs.abs())))
}

/// The n = 3 identity:
/// Λ(∂*ω∧∂ω + ∂̄*ω∧∂̄ω) = iT⊡T̄ + ½ iT∘T̄ − ½‖T‖² ω + ‖τ‖² ω + iτ∧τ̄.
pub fn check_prop_3_1(d: &HermitianPointData, sign: f64) -> Result<f64, FormsError> {
    assert_eq!(d.n(), 3, "the identity is specific to complex dimension 3");
    let m = &d.metric;
    let con = build_contractions(d);
    let lhs = lefschetz_lambda(
        &d.del_star_omega()
            .wedge(&d.del_omega())?
            .add(&d.dbar_star_omega().wedge(&d.dbar_omega())?)?,
        m,
    );
    let omega = m.omega();
    let rhs = con
        .box_form
        .add(&con.circ_form.scaled(Complex64::new(0.5, 0.0)))?
        .add(&omega.scaled(Complex64::new(con.norm_tau2 - 0.5 * con.norm_t2, 0.0)))?
        .add(&i_tau_wedge_taubar(d)?)?
        .scaled(Complex64::new(sign, 0.0));
    Ok(rel_distance(&lhs, &rhs))
}

/// Pointwise codifferential formula ∂̄*ω = −iτ against the star route
/// −*(∂ω ∧ ω^{n−2}/(n−2)!) = −*(∂(ω^{n−1}/(n−1)!)).
pub fn check_codifferential_formula(
    d: &HermitianPointData,
    sign: f64,
) -> Result<f64, FormsError> {
    let m = &d.metric;
    let n = m.n();
    let fac = factorial(n as i16 - 2);
    let star_route = hodge_star(
        &d.del_omega()
            .wedge(&m.omega().wedge_pow(n - 2)?)?
            .scaled(Complex64::new(1.0 / fac, 0.0)),
        m,
    )?
    .scaled(Complex64::new(-1.0, 0.0));
    let formula = d.dbar_star_omega().scaled(Complex64::new(sign, 0.0));
    Ok(rel_distance(&star_route, &formula))
}

/// Both routes of the metric-flow rewrite for a free real (n−1,n−1)-form Φ
/// and a free positive dilaton value:
///   route 1: ω̇ = (−*Φ + tr(*Φ)/(n−2)·ω) / ((n−1)!·‖Ω‖)
///   route 2: dense linear solve of
///            ‖Ω‖·(−½ tr(ω̇)·ω^{n−1} + (n−1)·ω̇∧ω^{n−2}) = Φ.
pub fn check_flow_rewrite(
    phi: &MultiDegreeForm,
    omega_norm: f64,
    m: &HermitianMetricPoint,
    sign: f64,
) -> Result<f64, FormsError> {
    let by_star = flow_rewrite_star_route(phi, omega_norm, m)?;
    let by_solve = flow_rewrite_solve_route(phi, omega_norm, m)?;
    Ok(rel_distance(&by_star, &by_solve.scaled(Complex64::new(sign, 0.0))))
}

pub fn flow_rewrite_star_route(
    phi: &MultiDegreeForm,
    omega_norm: f64,
    m: &HermitianMetricPoint,
) -> Result<MultiDegreeForm, FormsError> {
    let n = m.n();
    let star_phi = hodge_star(phi, m)?;
    let tr = trace_11_complex(&star_phi, m)?;
    let scale = 1.0 / (factorial(n as i16 - 1) * omega_norm);
    star_phi
        .scaled(Complex64::new(-1.0, 0.0))
        .add(&m.omega().scaled(tr / Complex64::new(n as f64 - 2.0, 0.0)))?
        .scaled(Complex64::new(scale, 0.0))
        .add(&MultiDegreeForm::zero(n, 1, 1)?)
}

pub fn flow_rewrite_solve_route(
    phi: &MultiDegreeForm,
    omega_norm: f64,
    m: &HermitianMetricPoint,
) -> Result<MultiDegreeForm, FormsError> {
    use nalgebra::{DMatrix, DVector};
    let n = m.n();
    let dim = (n as usize) * (n as usize);
    let omega_pow_n1 = m.omega().wedge_pow(n - 1)?;
    let omega_pow_n2 = m.omega().wedge_pow(n - 2)?;
    let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
    for c in 0..dim {
        let mut e = MultiDegreeForm::zero(n, 1, 1)?;
        e.coeffs_mut()[c] = Complex64::ONE;
        let tr_e = trace_11_complex(&e, m)?;
        let img = omega_pow_n1
            .scaled(-0.5 * tr_e)
            .add(&e.wedge(&omega_pow_n2)?.scaled(Complex64::new(n as f64 - 1.0, 0.0)))?
            .scaled(Complex64::new(omega_norm, 0.0));
        for (r, v) in img.coeffs().iter().enumerate() {
            mat[(r, c)] = *v;
        }
    }
    let rhs = DVector::from_column_slice(phi.coeffs());
    let sol = mat.lu().solve(&rhs).ok_or(FormsError::DecompositionFailed {
        reason: "flow-rewrite linear system singular".into(),
    })?;
    let mut out = MultiDegreeForm::zero(n, 1, 1)?;
    out.coeffs_mut().copy_from_slice(sol.as_slice());
    Ok(out)
}

/// Compose Φ = −(n−2)·‖Ω‖^{2(n−2)/(n−1)}·(A∧ω^{n−2} + B∧ω^{n−3} + (n−3)·C∧ω^{n−4})
/// from free real blocks, then compare the star-route metric velocity with
/// the contracted form
/// ω̇ = −‖Ω‖^{(n−3)/(n−1)}/(n−1)·((n−2)A + ΛB + Λ²C/2 + (ΛA − Λ³C/(6(n−2)))·ω).
/// C is dropped for n = 3.
pub fn check_flow_rewrite_composite(
    a: &MultiDegreeForm,
    b: &MultiDegreeForm,
    c: Option<&MultiDegreeForm>,
    omega_norm: f64,
    m: &HermitianMetricPoint,
    sign: f64,
) -> Result<f64, FormsError> {
    let n = m.n();
    let nf = n as f64;
    let omega = m.omega();
    let mut phi = a
        .wedge(&omega.wedge_pow(n - 2)?)?
        .add(&b.wedge(&omega.wedge_pow(n - 3)?)?)?;
    if let Some(c) = c {
        phi = phi.add(
            &c.wedge(&omega.wedge_pow(n - 4)?)?
                .scaled(Complex64::new(nf - 3.0, 0.0)),
        )?;
    }
    let dil_pow = omega_norm.powf(2.0 * (nf - 2.0) / (nf - 1.0));
    let phi = phi.scaled(Complex64::new(-(nf - 2.0) * dil_pow, 0.0));

    let by_star = flow_rewrite_star_route(&phi, omega_norm, m)?;

    let lam_a = scalar_value(&lefschetz_lambda(a, m));
    let lam_b = lefschetz_lambda(b, m);
    let (lam2_c_half, lam3_c_sixth) = match c {
        Some(c) => (
            lambda_pow(c, m, 2).scaled(Complex64::new(0.5, 0.0)),
            scalar_value(&lambda_pow(c, m, 3)) / 6.0,
        ),
        None => (MultiDegreeForm::zero(n, 1, 1)?, Complex64::ZERO),
    };
    let bracket = a
        .scaled(Complex64::new(nf - 2.0, 0.0))
        .add(&lam_b)?
        .add(&lam2_c_half)?
        .add(&omega.scaled(lam_a - lam3_c_sixth / Complex64::new(nf - 2.0, 0.0)))?;
    let prefac = -omega_norm.powf((nf - 3.0) / (nf - 1.0)) / (nf - 1.0);
    let by_half = bracket.scaled(Complex64::new(sign * prefac, 0.0));

    Ok(rel_distance(&by_star, &by_half))
}

// ---------------------------------------------------------------------------
// suite runner
// ---------------------------------------------------------------------------

/// One verified identity: worst residual over the seed sweep.
#[derive(Clone, Debug)]
pub struct IdentityOutcome {
    pub name: String,
    pub n: u8,
    pub seeds: u32,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// magnitude of terms reported but not asserted (opaque jet surrogates)
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub outcomes: Vec<IdentityOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn first_failure(&self) -> Option<&IdentityOutcome> {
        self.outcomes.iter().find(|o| !o.passed)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub n_list: Vec<u8>,
    pub seeds: u32,
    pub tolerance: f64,
    /// negative-control hook: flips the named identity's right-hand side
    pub flip: Option<String>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            n_list: vec![3, 4, 5, 6],
            seeds: 200,
            tolerance: 1e-10,
            flip: None,
        }
    }
}

/// Run the full identity suite over seeded random data. Each (identity, n)
/// pair reports its worst residual over `seeds` draws.
pub fn run_identity_suite(opts: &SuiteOptions) -> Result<SuiteReport, FormsError> {
    let mut outcomes = Vec::new();
    let tol = opts.tolerance;
    let sign_for = |name: &str| -> f64 {
        if opts.flip.as_deref() == Some(name) {
            -1.0
        } else {
            1.0
        }
    };

    for &n in &opts.n_list {
        let mut rng = ChaCha8Rng::seed_from_u64(0x00da_f1ab ^ (n as u64));
        let mut star_a = 0.0f64;
        let mut star_b = 0.0f64;
        let mut star_c = 0.0f64;
        let mut trace_c = 0.0f64;
        let mut ladder_a = 0.0f64;
        let mut ladder_b = 0.0f64;
        let mut ladder_c2 = 0.0f64;
        let mut ladder_c3 = 0.0f64;
        let mut ladder_dec = 0.0f64;
        let mut codiff = 0.0f64;
        let mut prop31 = 0.0f64;
        let mut rewrite = 0.0f64;
        let mut composite = 0.0f64;
        let mut opaque_max = 0.0f64;

        for _ in 0..opts.seeds {
            let d = HermitianPointData::random(n, &mut rng);
            let m = &d.metric;
            let a = MultiDegreeForm::random_real(n, 1, &mut rng)?;
            star_a = star_a.max(check_star_formula_a(&a, m, sign_for("star_formula_a"))?);
            if n >= 3 {
                let b = MultiDegreeForm::random_real(n, 2, &mut rng)?;
                star_b = star_b.max(check_star_formula_b(&b, m, sign_for("star_formula_b"))?);
            }
            if n >= 4 {
                let c = MultiDegreeForm::random_real(n, 3, &mut rng)?;
                star_c = star_c.max(check_star_formula_c(&c, m, sign_for("star_formula_c"))?);
                trace_c = trace_c.max(check_star_trace_c(&c, m, sign_for("star_trace_c"))?);
            }
            ladder_a = ladder_a.max(check_lambda_ladder_a(&d, sign_for("lambda_ladder_a"))?);
            let (res_b, opaque) =
                check_lambda_ladder_b_torsion(&d, sign_for("lambda_ladder_b_torsion"))?;
            ladder_b = ladder_b.max(res_b);
            opaque_max = opaque_max.max(opaque);
            ladder_c2 = ladder_c2.max(check_lambda_ladder_c2(&d, sign_for("lambda_ladder_c2"))?);
            ladder_c3 = ladder_c3.max(check_lambda_ladder_c3(&d, sign_for("lambda_ladder_c3"))?);
            ladder_dec = ladder_dec.max(check_lambda_ladder_c_decomposition(
                &d,
                sign_for("lambda_ladder_c_decomposition"),
            )?);
            codiff = codiff.max(check_codifferential_formula(
                &d,
                sign_for("codifferential_formula"),
            )?);
            if n == 3 {
                prop31 = prop31.max(check_prop_3_1(&d, sign_for("prop_3_1"))?);
            }
            if (3..=5).contains(&n) {
                let phi = MultiDegreeForm::random_real(n, n - 1, &mut rng)?;
                let dil = rng.random_range(0.5..2.0);
                rewrite = rewrite.max(check_flow_rewrite(
                    &phi,
                    dil,
                    m,
                    sign_for("flow_rewrite"),
                )?);
                let ca = MultiDegreeForm::random_real(n, 1, &mut rng)?;
                let cb = MultiDegreeForm::random_real(n, 2, &mut rng)?;
                let cc = if n >= 4 {
                    Some(MultiDegreeForm::random_real(n, 3, &mut rng)?)
                } else {
                    None
                };
                composite = composite.max(check_flow_rewrite_composite(
                    &ca,
                    &cb,
                    cc.as_ref(),
                    dil,
                    m,
                    sign_for("flow_rewrite_composite"),
                )?);
            }
        }

        let mut push = |name: &str, residual: f64, active: bool, note: Option<String>| {
            if active {
                outcomes.push(IdentityOutcome {
                    name: name.to_string(),
                    n,
                    seeds: opts.seeds,
                    max_residual: residual,
                    tolerance: tol,
                    passed: residual < tol,
                    note,
                });
            }
        };
        push("star_formula_a", star_a, true, None);
        push("star_formula_b", star_b, n >= 3, None);
        push("star_formula_c", star_c, n >= 4, None);
        push("star_trace_c", trace_c, n >= 4, None);
        push("lambda_ladder_a", ladder_a, true, None);
        push(
            "lambda_ladder_b_torsion",
            ladder_b,
            true,
            Some(format!(
                "unverified jet term |Λ(i∂∂̄ω)| up to {opaque_max:.3e} reported opaque"
            )),
        );
        push("lambda_ladder_c2", ladder_c2, true, None);
        push("lambda_ladder_c3", ladder_c3, true, None);
        push("lambda_ladder_c_decomposition", ladder_dec, true, None);
        push("codifferential_formula", codiff, true, None);
        push("prop_3_1", prop31, n == 3, None);
        push("flow_rewrite", rewrite, (3..=5).contains(&n), None);
        push(
            "flow_rewrite_composite",
            composite,
            (3..=5).contains(&n),
            None,
        );
    }
    Ok(SuiteReport { outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::point_data::TorsionTensor;
    use rand::Rng;

    fn tau_only_data() -> HermitianPointData {
        // g = I, T_{1̄12} pattern: only the trace part of the torsion is nonzero
        let metric = HermitianMetricPoint::identity(3);
        let mut torsion = TorsionTensor::zero(3);
        torsion.set_antisymmetric(0, 0, 1, Complex64::ONE); // T_{1̄12} = 1
        HermitianPointData {
            metric,
            torsion,
            rho: MultiDegreeForm::zero(3, 1, 1).unwrap(),
            ddbar_omega: MultiDegreeForm::zero(3, 2, 2).unwrap(),
        }
    }

    #[test]
    fn prop_3_1_zero_torsion() {
        let d = HermitianPointData {
            metric: HermitianMetricPoint::identity(3),
            torsion: TorsionTensor::zero(3),
            rho: MultiDegreeForm::zero(3, 1, 1).unwrap(),
            ddbar_omega: MultiDegreeForm::zero(3, 2, 2).unwrap(),
        };
        assert!(check_prop_3_1(&d, 1.0).unwrap() < 1e-14);
    }

    #[test]
    fn prop_3_1_tau_only_pattern() {
        let d = tau_only_data();
        assert!(check_prop_3_1(&d, 1.0).unwrap() < 1e-12);
    }

    #[test]
    fn prop_3_1_five_hundred_seeds() {
        let mut rng = ChaCha8Rng::seed_from_u64(301);
        let mut worst = 0.0f64;
        for _ in 0..500 {
            let d = HermitianPointData::random(3, &mut rng);
            worst = worst.max(check_prop_3_1(&d, 1.0).unwrap());
        }
        assert!(worst < 1e-10, "max residual {worst:.3e}");
    }

    #[test]
    fn ladder_a_with_zero_torsion() {
        // T = 0 → ΛA = tr(ρ)/(n−1)
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for n in [3u8, 4, 5] {
            let d = HermitianPointData {
                metric: HermitianMetricPoint::random(n, &mut rng),
                torsion: TorsionTensor::zero(n),
                rho: MultiDegreeForm::random_real(n, 1, &mut rng).unwrap(),
                ddbar_omega: MultiDegreeForm::zero(n, 2, 2).unwrap(),
            };
            assert!(check_lambda_ladder_a(&d, 1.0).unwrap() < 1e-12);
        }
    }

    #[test]
    fn ladder_c3_brute_force_oracle_n5() {
        // Λ³C/6 against the triple Gram-adjoint contraction
        use crate::forms::reference::lambda_pow_by_gram_adjoint;
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let d = HermitianPointData::random(5, &mut rng);
        let m = &d.metric;
        let con = build_contractions(&d);
        let t_form = d.torsion.form();
        let c = t_form.wedge(&t_form.conj()).unwrap().scaled(Complex64::I);
        let brute = scalar_value(&lambda_pow_by_gram_adjoint(&c, m, 3).unwrap()).re / 6.0;
        let direct = con.norm_tau2 - 0.5 * con.norm_t2;
        assert!((brute - direct).abs() < 1e-10 * (1.0 + direct.abs()));
        assert!(check_lambda_ladder_c3(&d, 1.0).unwrap() < 1e-12);
    }

    #[test]
    fn flow_rewrite_zero_and_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let m = HermitianMetricPoint::random(3, &mut rng);
        let zero = MultiDegreeForm::zero(3, 2, 2).unwrap();
        let w = flow_rewrite_star_route(&zero, 1.3, &m).unwrap();
        assert!(w.norm_max() < 1e-14);
    }

    #[test]
    fn flow_rewrite_omega_power_source() {
        // Φ = ω^{n−1}, g arbitrary: ω̇ = 2/((n−2)·‖Ω‖)·ω, read off by trying
        // the ansatz ω̇ = λω in the wedge equation.
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for n in [3u8, 4, 5] {
            let m = HermitianMetricPoint::random(n, &mut rng);
            let phi = m.omega().wedge_pow(n - 1).unwrap();
            let dil = rng.random_range(0.5..2.0);
            let w = flow_rewrite_star_route(&phi, dil, &m).unwrap();
            let expect = m
                .omega()
                .scaled(Complex64::new(2.0 / ((n as f64 - 2.0) * dil), 0.0));
            assert!(w.distance(&expect) < 1e-10 * (1.0 + expect.norm_max()), "n={n}");
            let res = check_flow_rewrite(&phi, dil, &m, 1.0).unwrap();
            assert!(res < 1e-10);
        }
    }

    #[test]
    fn suite_negative_control_flags_flipped_identity() {
        let opts = SuiteOptions {
            n_list: vec![3],
            seeds: 2,
            flip: Some("prop_3_1".into()),
            ..Default::default()
        };
        let report = run_identity_suite(&opts).unwrap();
        assert!(!report.passed());
        assert_eq!(report.first_failure().unwrap().name, "prop_3_1");
    }

    #[test]
    fn suite_small_smoke_passes() {
        let opts = SuiteOptions {
            n_list: vec![3, 4],
            seeds: 3,
            ..Default::default()
        };
        let report = run_identity_suite(&opts).unwrap();
        for o in &report.outcomes {
            assert!(o.passed, "{} n={} residual {:.3e}", o.name, o.n, o.max_residual);
        }
    }
}
