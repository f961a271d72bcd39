//! Right-hand sides, guards and per-kind diagnostics for every reduction.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::grid::{hessian, laplacian, laplacian_new, PeriodicScalarField, StencilOrder};

use super::ReductionError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionKind {
    InverseMa,
    CalabiGray,
    ProductFibration,
    Iwasawa,
    Sl2c,
    AnomalyCkSemiflat,
    DualAnomalySemiflat,
}

impl ReductionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReductionKind::InverseMa => "inverse_ma",
            ReductionKind::CalabiGray => "calabi_gray",
            ReductionKind::ProductFibration => "product_fibration",
            ReductionKind::Iwasawa => "iwasawa",
            ReductionKind::Sl2c => "sl2c",
            ReductionKind::AnomalyCkSemiflat => "anomaly_ck_semiflat",
            ReductionKind::DualAnomalySemiflat => "dual_anomaly_semiflat",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "inverse_ma" => ReductionKind::InverseMa,
            "calabi_gray" => ReductionKind::CalabiGray,
            "product_fibration" => ReductionKind::ProductFibration,
            "iwasawa" => ReductionKind::Iwasawa,
            "sl2c" => ReductionKind::Sl2c,
            "anomaly_ck_semiflat" => ReductionKind::AnomalyCkSemiflat,
            "dual_anomaly_semiflat" => ReductionKind::DualAnomalySemiflat,
            _ => return None,
        })
    }

    /// Flows governed by the dual evolution law obey the lower dilaton bound;
    /// the remaining (direct) flow obeys the upper one.
    pub fn is_dual_flow(&self) -> bool {
        !matches!(self, ReductionKind::AnomalyCkSemiflat)
    }
}

/// Parameters selecting and sizing one reduction run.
#[derive(Clone, Debug)]
pub struct ReductionSpec {
    pub kind: ReductionKind,
    /// ambient complex dimension (3 for every worked example)
    pub ambient_n: u8,
    /// grid points per axis; ODE kinds ignore it
    pub grid_n: usize,
    /// spatial dimensions; defaults per kind
    pub grid_dims: usize,
    /// periods per axis; kind-specific defaults when empty
    pub lengths: Vec<f64>,
    /// initial-data amplitude (perturbation kinds)
    pub amplitude: f64,
    /// initial scalar value (iwasawa u₀, sl2c ρ₀)
    pub initial_value: f64,
    /// RNG seed for randomized initial data
    pub seed: u64,
}

impl ReductionSpec {
    pub fn defaults(kind: ReductionKind) -> Self {
        let (grid_n, grid_dims, amplitude, initial_value) = match kind {
            ReductionKind::InverseMa => (128, 1, 0.5, 0.0),
            ReductionKind::CalabiGray => (64, 2, 0.2, 1.0),
            ReductionKind::ProductFibration => (64, 2, 1.0, 2.0),
            ReductionKind::Iwasawa => (1, 1, 0.0, 0.0),
            ReductionKind::Sl2c => (1, 1, 0.0, 2.0),
            ReductionKind::AnomalyCkSemiflat | ReductionKind::DualAnomalySemiflat => {
                (24, 3, 0.05, 0.0)
            }
        };
        ReductionSpec {
            kind,
            ambient_n: 3,
            grid_n,
            grid_dims,
            lengths: Vec::new(),
            amplitude,
            initial_value,
            seed: 0,
        }
    }

    fn lengths_or_default(&self) -> Vec<f64> {
        if !self.lengths.is_empty() {
            return self.lengths.clone();
        }
        match self.kind {
            // period tuned so the first Fourier mode is a discrete
            // eigenfunction of Δ with eigenvalue exactly −2 (κ ≡ −1 data)
            ReductionKind::CalabiGray => {
                let n = self.grid_n as f64;
                let l = std::f64::consts::SQRT_2 * n * (std::f64::consts::PI / n).sin();
                vec![l; self.grid_dims]
            }
            ReductionKind::ProductFibration => {
                vec![std::f64::consts::TAU; self.grid_dims]
            }
            _ => vec![1.0; self.grid_dims],
        }
    }

    pub fn validate(&self) -> Result<(), ReductionError> {
        let bad = |reason: &str| {
            Err(ReductionError::BadParameter {
                kind: self.kind,
                reason: reason.to_string(),
            })
        };
        match self.kind {
            ReductionKind::Iwasawa => {
                if self.grid_n != 1 {
                    return bad("scalar ODE runs on a single cell");
                }
            }
            ReductionKind::Sl2c => {
                if self.initial_value <= 0.0 {
                    return bad("initial metric scale must be positive");
                }
            }
            ReductionKind::ProductFibration | ReductionKind::CalabiGray => {
                if self.initial_value <= 0.0 && self.kind == ReductionKind::ProductFibration {
                    return bad("initial field must be positive");
                }
                if self.grid_n < 8 {
                    return bad("grid too coarse (n >= 8)");
                }
            }
            _ => {
                if self.grid_n < 8 {
                    return bad("grid too coarse (n >= 8)");
                }
            }
        }
        if self.ambient_n < 3 {
            return bad("ambient complex dimension must be at least 3");
        }
        Ok(())
    }

    /// Build the reduction together with its initial field.
    pub fn build(&self) -> Result<(Reduction, PeriodicScalarField), ReductionError> {
        self.validate()?;
        let lengths = self.lengths_or_default();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        match self.kind {
            ReductionKind::InverseMa => {
                let dims = vec![self.grid_n; self.grid_dims];
                let mut phi0 = PeriodicScalarField::random_smooth(
                    &dims,
                    &lengths,
                    1.0,
                    2,
                    &mut rng,
                )?;
                // normalize so ‖Δφ₀‖∞ = amplitude: positivity of 1 + Δφ is
                // what the flow needs, not smallness of φ itself
                let lap_max = laplacian_new(&phi0, StencilOrder::Two).max_abs();
                phi0.scale(self.amplitude / lap_max.max(1e-300));
                let rho0 = phi0.zeros_like(); // flat reference density
                let flow = InverseMaFlow::new(self.ambient_n, rho0)?;
                Ok((Reduction::InverseMa(flow), phi0))
            }
            ReductionKind::CalabiGray => {
                let data = CalabiGrayData::eigen_tuned(self.grid_n, self.grid_dims, &lengths)?;
                // u₀ = 1/(0.5 + amplitude·α): positive, correlates with the
                // eigen-direction so the conserved vector is nonzero
                let mut u0 = data.alpha[0].clone();
                let amp = self.amplitude;
                for v in u0.data_mut() {
                    *v = 1.0 / (0.5 + amp * *v);
                }
                let flow = CalabiGrayFlow::new(data)?;
                Ok((Reduction::CalabiGray(flow), u0))
            }
            ReductionKind::ProductFibration => {
                let dims = vec![self.grid_n; self.grid_dims];
                let base = self.initial_value;
                let amp = self.amplitude;
                let l0 = lengths[0];
                let u0 = PeriodicScalarField::from_fn(&dims, &lengths, |x| {
                    base + amp * (std::f64::consts::TAU * x[0] / l0).cos()
                })?;
                if u0.min_with_index().0 <= 0.0 {
                    return Err(ReductionError::BadParameter {
                        kind: self.kind,
                        reason: "initial field must stay positive".into(),
                    });
                }
                let flow = ProductFlow::new(&u0);
                Ok((Reduction::Product(flow), u0))
            }
            ReductionKind::Iwasawa => {
                let u0 = PeriodicScalarField::constant(&[1], &[1.0], self.initial_value)?;
                Ok((Reduction::Iwasawa(IwasawaFlow::new(self.initial_value)), u0))
            }
            ReductionKind::Sl2c => {
                let rho0 = PeriodicScalarField::constant(&[1], &[1.0], self.initial_value)?;
                Ok((Reduction::Sl2c(Sl2cFlow::new(self.initial_value)), rho0))
            }
            ReductionKind::AnomalyCkSemiflat | ReductionKind::DualAnomalySemiflat => {
                let dims = vec![self.grid_n; self.grid_dims];
                // Hessian-normalized separable seed keeps I + ∇²φ ≻ 0
                let tau = std::f64::consts::TAU;
                let amp = self.amplitude;
                let lens = lengths.clone();
                let phi0 = PeriodicScalarField::from_fn(&dims, &lengths, move |x| {
                    let mut v = 0.0;
                    for (a, &xa) in x.iter().enumerate() {
                        let k = tau / lens[a];
                        v += amp * ((k * xa) + a as f64).sin() / (k * k);
                    }
                    v
                })?;
                let dual = self.kind == ReductionKind::DualAnomalySemiflat;
                let flow = SemiflatPotentialFlow::new(self.ambient_n, dual);
                Ok((Reduction::Semiflat(flow), phi0))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// per-kind flows
// ---------------------------------------------------------------------------

/// Conformally-Kähler reduction at desk scale: the potential flow
/// φ̇ = 1 − e^{ρ₀+c}/(1 + Δφ) with c normalizing the reference density.
pub struct InverseMaFlow {
    pub ambient_n: u8,
    pub rho0: PeriodicScalarField,
    pub c: f64,
}

impl InverseMaFlow {
    pub fn new(ambient_n: u8, rho0: PeriodicScalarField) -> Result<Self, ReductionError> {
        // c = −log((1/V)∫e^{ρ₀})
        let mean = rho0.integral_of(f64::exp) / rho0.volume();
        Ok(InverseMaFlow {
            ambient_n,
            rho0,
            c: -mean.ln(),
        })
    }

    /// w = 1 + Δφ, the metric-ratio field.
    pub fn ratio_field(&self, phi: &PeriodicScalarField) -> PeriodicScalarField {
        let mut w = laplacian_new(phi, StencilOrder::Two);
        for v in w.data_mut() {
            *v += 1.0;
        }
        w
    }

    /// Fixed-point target e^{ρ₀+c}.
    pub fn target_density(&self) -> PeriodicScalarField {
        let c = self.c;
        self.rho0.map(|r| (r + c).exp())
    }
}

/// Synthetic curvature-coupled data: κ ≡ −1 and a unit-norm map built from a
/// discrete eigenmode pair (sin, cos, 0) with Δα = 2κα exactly on the grid.
pub struct CalabiGrayData {
    pub kappa: PeriodicScalarField,
    pub alpha: [PeriodicScalarField; 3],
    /// max‖Δα_i − 2κα_i‖∞ on the grid
    pub eigen_residual: f64,
}

impl CalabiGrayData {
    pub fn eigen_tuned(
        grid_n: usize,
        grid_dims: usize,
        lengths: &[f64],
    ) -> Result<Self, ReductionError> {
        let dims = vec![grid_n; grid_dims];
        let k = std::f64::consts::TAU / lengths[0];
        let a = PeriodicScalarField::from_fn(&dims, lengths, |x| (k * x[0]).sin())?;
        let b = PeriodicScalarField::from_fn(&dims, lengths, |x| (k * x[0]).cos())?;
        let g = PeriodicScalarField::constant(&dims, lengths, 0.0)?;
        let kappa = PeriodicScalarField::constant(&dims, lengths, -1.0)?;
        let mut worst = 0.0f64;
        for f in [&a, &b] {
            let lap = laplacian_new(f, StencilOrder::Two);
            for i in 0..f.len() {
                worst = worst.max((lap.data()[i] + 2.0 * f.data()[i]).abs());
            }
        }
        Ok(CalabiGrayData {
            kappa,
            alpha: [a, b, g],
            eigen_residual: worst,
        })
    }

    /// Pointwise unit-norm defect of (α, β, γ).
    pub fn unit_norm_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.alpha[0].len() {
            let s: f64 = self.alpha.iter().map(|f| f.data()[i] * f.data()[i]).sum();
            worst = worst.max((s - 1.0).abs());
        }
        worst
    }
}

/// ∂_t u = (u²/4)(Δu − 2κu) on the surface grid.
pub struct CalabiGrayFlow {
    pub data: CalabiGrayData,
}

impl CalabiGrayFlow {
    pub fn new(data: CalabiGrayData) -> Result<Self, ReductionError> {
        if data.kappa.max_with_index().0 > 0.0 {
            return Err(ReductionError::BadParameter {
                kind: ReductionKind::CalabiGray,
                reason: "curvature field must be nonpositive".into(),
            });
        }
        if data.unit_norm_defect() > 1e-12 {
            return Err(ReductionError::BadParameter {
                kind: ReductionKind::CalabiGray,
                reason: "map components must have pointwise unit norm".into(),
            });
        }
        Ok(CalabiGrayFlow { data })
    }

    /// Conserved vector V = ∫u⁻¹(α, β, γ).
    pub fn conserved_vector(&self, u: &PeriodicScalarField) -> [f64; 3] {
        let mut out = [0.0f64; 3];
        let cell = u.cell_volume();
        for (c, comp) in self.data.alpha.iter().enumerate() {
            let mut acc = 0.0;
            for i in 0..u.len() {
                acc += comp.data()[i] / u.data()[i];
            }
            out[c] = acc * cell;
        }
        out
    }
}

/// ∂_t u = (u²/4)Δu on the flat torus.
pub struct ProductFlow {
    pub initial_min: f64,
    pub initial_max: f64,
}

impl ProductFlow {
    pub fn new(u0: &PeriodicScalarField) -> Self {
        ProductFlow {
            initial_min: u0.min_with_index().0,
            initial_max: u0.max_with_index().0,
        }
    }
}

/// Shrinking-base collapse: u̇ = −e^{−2u}/2, e^u = (R − t)^{1/2}.
///
/// The fibered ansatz e^u·(base metric) + fiber term is preserved by this
/// flow only when the conformal factor is spatially constant, which is what
/// reduces it to a single ODE; for general twisted torus fibrations the
/// ansatz does not close and no PDE reduction is attempted here.
pub struct IwasawaFlow {
    pub extinction_time: f64,
}

impl IwasawaFlow {
    pub fn new(u0: f64) -> Self {
        IwasawaFlow {
            extinction_time: (2.0 * u0).exp(),
        }
    }

    pub fn closed_form(&self, t: f64) -> f64 {
        0.5 * (self.extinction_time - t).ln()
    }
}

/// Homogeneous collapse: ρ̇ = −1, ω(t) = (R − t)·ω̂.
pub struct Sl2cFlow {
    pub extinction_time: f64,
    /// reference volume V̂ = ∫ ω̂³/3!
    pub vhat: f64,
}

impl Sl2cFlow {
    pub fn new(rho0: f64) -> Self {
        Sl2cFlow {
            extinction_time: rho0,
            vhat: 1.0,
        }
    }

    pub fn closed_form(&self, t: f64) -> f64 {
        self.extinction_time - t
    }
}

/// Potential-level semi-flat flows: the direct flow
/// φ̇ = (det(I+∇²φ) − mean)/(2(n−1)) and its dual
/// ψ̇ = −(det(I+∇²ψ)⁻¹ − mean)/(2(n−1)); the mean subtraction preserves
/// periodicity and leaves the metric evolution unchanged.
pub struct SemiflatPotentialFlow {
    pub ambient_n: u8,
    pub dual: bool,
}

impl SemiflatPotentialFlow {
    pub fn new(ambient_n: u8, dual: bool) -> Self {
        SemiflatPotentialFlow { ambient_n, dual }
    }

    fn prefactor(&self) -> f64 {
        1.0 / (2.0 * (self.ambient_n as f64 - 1.0))
    }

    /// det(I + ∇²φ) and a Gershgorin lower bound on the eigenvalues of
    /// I + ∇²φ over the grid.
    #[allow(clippy::needless_range_loop)] // dense d×d block assembly
    pub fn det_and_floor(&self, phi: &PeriodicScalarField) -> (PeriodicScalarField, f64) {
        let d = phi.ndim();
        let hess = hessian(phi);
        let mut det = phi.zeros_like();
        let mut floor = f64::INFINITY;
        let n = phi.len();
        for i in 0..n {
            let mut block = [[0.0f64; 3]; 3];
            for a in 0..d {
                for b in 0..d {
                    block[a][b] = hess[a][b].data()[i] + if a == b { 1.0 } else { 0.0 };
                }
            }
            for a in 0..d {
                let mut off = 0.0;
                for b in 0..d {
                    if a != b {
                        off += block[a][b].abs();
                    }
                }
                floor = floor.min(block[a][a] - off);
            }
            det.data_mut()[i] = match d {
                1 => block[0][0],
                2 => block[0][0] * block[1][1] - block[0][1] * block[1][0],
                3 => {
                    block[0][0] * (block[1][1] * block[2][2] - block[1][2] * block[2][1])
                        - block[0][1] * (block[1][0] * block[2][2] - block[1][2] * block[2][0])
                        + block[0][2] * (block[1][0] * block[2][1] - block[1][1] * block[2][0])
                }
                _ => unreachable!(),
            };
        }
        (det, floor)
    }
}

/// One reduction instance; dispatches the flow interface per kind.
#[allow(clippy::large_enum_variant)] // a handful of long-lived instances per process
pub enum Reduction {
    InverseMa(InverseMaFlow),
    CalabiGray(CalabiGrayFlow),
    Product(ProductFlow),
    Iwasawa(IwasawaFlow),
    Sl2c(Sl2cFlow),
    Semiflat(SemiflatPotentialFlow),
}

impl Reduction {
    pub fn kind(&self) -> ReductionKind {
        match self {
            Reduction::InverseMa(_) => ReductionKind::InverseMa,
            Reduction::CalabiGray(_) => ReductionKind::CalabiGray,
            Reduction::Product(_) => ReductionKind::ProductFibration,
            Reduction::Iwasawa(_) => ReductionKind::Iwasawa,
            Reduction::Sl2c(_) => ReductionKind::Sl2c,
            Reduction::Semiflat(f) => {
                if f.dual {
                    ReductionKind::DualAnomalySemiflat
                } else {
                    ReductionKind::AnomalyCkSemiflat
                }
            }
        }
    }

    pub fn ambient_n(&self) -> u8 {
        match self {
            Reduction::InverseMa(f) => f.ambient_n,
            Reduction::Semiflat(f) => f.ambient_n,
            _ => 3,
        }
    }

    /// Pointwise dilaton ‖Ω‖ as a field over the grid.
    pub fn dilaton_field(&self, f: &PeriodicScalarField) -> PeriodicScalarField {
        match self {
            Reduction::InverseMa(flow) => {
                // ‖Ω‖_ω = ‖Ω‖_{α_u}^{2(n−1)/(n−2)} with ‖Ω‖_{α_u} = w^{−1/2}
                let n = flow.ambient_n as f64;
                let p = -(n - 1.0) / (n - 2.0);
                flow.ratio_field(f).map(|w| w.powf(p))
            }
            Reduction::CalabiGray(_) | Reduction::Product(_) => f.map(|u| u * u),
            Reduction::Iwasawa(_) => f.map(|u| (-u).exp()),
            Reduction::Sl2c(_) => f.map(|r| r.powf(-1.5)),
            Reduction::Semiflat(flow) => {
                let (det, _) = flow.det_and_floor(f);
                det.map(|v| v.powf(-0.5))
            }
        }
    }

    /// Density of ω^n/n! against the grid measure, as a field.
    pub fn volume_density(&self, f: &PeriodicScalarField) -> PeriodicScalarField {
        match self {
            Reduction::InverseMa(flow) => {
                let n = flow.ambient_n as f64;
                let p = (2.0 * n - 2.0) / (n - 2.0);
                flow.ratio_field(f).map(|w| w.powf(p))
            }
            Reduction::CalabiGray(_) | Reduction::Product(_) => f.map(|u| u.powi(-4)),
            Reduction::Iwasawa(_) => f.map(|u| (2.0 * u).exp()),
            Reduction::Sl2c(flow) => {
                let vhat = flow.vhat;
                f.map(move |r| r.powi(3) * vhat)
            }
            Reduction::Semiflat(flow) => flow.det_and_floor(f).0,
        }
    }

    pub fn conservation_names(&self) -> Vec<String> {
        match self {
            Reduction::CalabiGray(_) => vec![
                "u_inv_alpha".into(),
                "u_inv_beta".into(),
                "u_inv_gamma".into(),
                "u_inv".into(),
            ],
            Reduction::Product(_) => vec!["u_inv".into()],
            _ => Vec::new(),
        }
    }

    pub fn conservation_values(&self, f: &PeriodicScalarField) -> Vec<f64> {
        match self {
            Reduction::CalabiGray(flow) => {
                let v = flow.conserved_vector(f);
                let total = f.integral_of(|u| 1.0 / u);
                vec![v[0], v[1], v[2], total]
            }
            Reduction::Product(_) => vec![f.integral_of(|u| 1.0 / u)],
            _ => Vec::new(),
        }
    }

    /// Closed-form value of the evolved scalar, where one exists.
    pub fn closed_form(&self, t: f64) -> Option<f64> {
        match self {
            Reduction::Iwasawa(flow) => Some(flow.closed_form(t)),
            Reduction::Sl2c(flow) => Some(flow.closed_form(t)),
            _ => None,
        }
    }

    pub fn max_principle_bounds(&self) -> Option<(f64, f64)> {
        match self {
            Reduction::Product(flow) => Some((flow.initial_min, flow.initial_max)),
            _ => None,
        }
    }

    pub fn dirichlet_applicable(&self) -> bool {
        matches!(self, Reduction::Product(_))
    }

    pub fn is_dual_flow(&self) -> bool {
        self.kind().is_dual_flow()
    }

    /// Flat-limit defect of a converged state: the discrete surrogate of the
    /// stationary (Ricci-flat) condition for this reduction.
    pub fn stationary_residual(&self, f: &PeriodicScalarField) -> f64 {
        match self {
            Reduction::InverseMa(flow) => {
                let w = flow.ratio_field(f);
                let target = flow.target_density();
                let mut worst = 0.0f64;
                for i in 0..w.len() {
                    worst = worst.max((w.data()[i] - target.data()[i]).abs());
                }
                worst
            }
            Reduction::Product(_) | Reduction::CalabiGray(_) => {
                let mean = f.mean();
                f.data().iter().fold(0.0f64, |m, &v| m.max((v - mean).abs()))
            }
            Reduction::Iwasawa(_) | Reduction::Sl2c(_) => 0.0,
            Reduction::Semiflat(flow) => {
                let (det, _) = flow.det_and_floor(f);
                let mean = det.mean();
                det.data()
                    .iter()
                    .fold(0.0f64, |m, &v| m.max((v - mean).abs()))
            }
        }
    }
}

impl crate::grid::FlowSystem for Reduction {
    fn rhs(&self, f: &PeriodicScalarField, out: &mut PeriodicScalarField) {
        match self {
            Reduction::InverseMa(flow) => {
                laplacian(f, StencilOrder::Two, out);
                let rho0 = flow.rho0.data();
                let c = flow.c;
                for (o, r) in out.data_mut().iter_mut().zip(rho0) {
                    *o = 1.0 - (r + c).exp() / (1.0 + *o);
                }
            }
            Reduction::CalabiGray(flow) => {
                laplacian(f, StencilOrder::Two, out);
                let kappa = flow.data.kappa.data();
                for ((o, &u), &k) in out.data_mut().iter_mut().zip(f.data()).zip(kappa) {
                    *o = 0.25 * u * u * (*o - 2.0 * k * u);
                }
            }
            Reduction::Product(_) => {
                laplacian(f, StencilOrder::Two, out);
                for (o, &u) in out.data_mut().iter_mut().zip(f.data()) {
                    *o *= 0.25 * u * u;
                }
            }
            Reduction::Iwasawa(_) => {
                for (o, &u) in out.data_mut().iter_mut().zip(f.data()) {
                    *o = -0.5 * (-2.0 * u).exp();
                }
            }
            Reduction::Sl2c(_) => {
                for o in out.data_mut() {
                    *o = -1.0;
                }
            }
            Reduction::Semiflat(flow) => {
                let (det, _) = flow.det_and_floor(f);
                let pre = flow.prefactor();
                if flow.dual {
                    let inv = det.map(|v| 1.0 / v);
                    let mean = inv.mean();
                    for (o, &v) in out.data_mut().iter_mut().zip(inv.data()) {
                        *o = -pre * (v - mean);
                    }
                } else {
                    let mean = det.mean();
                    for (o, &v) in out.data_mut().iter_mut().zip(det.data()) {
                        *o = pre * (v - mean);
                    }
                }
            }
        }
    }

    fn diffusivity(&self, f: &PeriodicScalarField) -> f64 {
        match self {
            Reduction::InverseMa(flow) => {
                // linearized coefficient e^{ρ₀+c}/w²
                let w = flow.ratio_field(f);
                let mut worst = 0.0f64;
                for (i, &wv) in w.data().iter().enumerate() {
                    let num = (flow.rho0.data()[i] + flow.c).exp();
                    worst = worst.max(num / (wv * wv).max(1e-12));
                }
                worst
            }
            Reduction::CalabiGray(_) | Reduction::Product(_) => {
                let (max, _) = f.max_with_index();
                0.25 * max * max
            }
            Reduction::Iwasawa(_) => (-2.0 * f.data()[0]).exp(),
            Reduction::Sl2c(_) => 1.0 / f.data()[0].max(1e-12),
            Reduction::Semiflat(flow) => {
                let (det, floor) = flow.det_and_floor(f);
                let dmax = det.max_with_index().0;
                let lam = floor.max(0.05);
                if flow.dual {
                    flow.prefactor() * (1.0 / det.min_with_index().0.max(1e-12)) / lam
                } else {
                    flow.prefactor() * dmax / lam
                }
            }
        }
    }

    fn guard_min(&self, f: &PeriodicScalarField) -> (f64, usize) {
        match self {
            Reduction::InverseMa(flow) => flow.ratio_field(f).min_with_index(),
            Reduction::Iwasawa(_) => (f.data()[0].exp(), 0),
            Reduction::Semiflat(flow) => {
                let (_, floor) = flow.det_and_floor(f);
                (floor, 0)
            }
            _ => f.min_with_index(),
        }
    }

    fn guard_max(&self, f: &PeriodicScalarField) -> (f64, usize) {
        match self {
            Reduction::Iwasawa(_) => (f.data()[0].exp(), 0),
            _ => {
                let (v, i) = f.max_with_index();
                (v.abs(), i)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{integrate, FlowSystem, IntegrateOptions, StepController};

    fn quick_opts(t_end: f64) -> IntegrateOptions {
        IntegrateOptions::to_time(t_end)
    }

    #[test]
    fn kind_roundtrip_and_duality_split() {
        for kind in [
            ReductionKind::InverseMa,
            ReductionKind::CalabiGray,
            ReductionKind::ProductFibration,
            ReductionKind::Iwasawa,
            ReductionKind::Sl2c,
            ReductionKind::AnomalyCkSemiflat,
            ReductionKind::DualAnomalySemiflat,
        ] {
            assert_eq!(ReductionKind::parse(kind.as_str()), Some(kind));
        }
        assert!(!ReductionKind::AnomalyCkSemiflat.is_dual_flow());
        assert!(ReductionKind::DualAnomalySemiflat.is_dual_flow());
    }

    #[test]
    fn inverse_ma_flat_background_is_stationary() {
        // ρ₀ const, φ ≡ 0: the normalization makes e^{ρ₀+c} = 1 exactly
        let rho0 = PeriodicScalarField::constant(&[32], &[1.0], 0.7).unwrap();
        let flow = InverseMaFlow::new(3, rho0).unwrap();
        let phi = PeriodicScalarField::constant(&[32], &[1.0], 0.0).unwrap();
        let red = Reduction::InverseMa(flow);
        let mut out = phi.zeros_like();
        red.rhs(&phi, &mut out);
        assert!(out.max_abs() < 1e-14);
    }

    #[test]
    fn inverse_ma_small_data_decays_at_heat_rate() {
        use std::f64::consts::TAU;
        let n = 64;
        let rho0 = PeriodicScalarField::constant(&[n], &[1.0], 0.0).unwrap();
        let red = Reduction::InverseMa(InverseMaFlow::new(3, rho0).unwrap());
        let eps = 1e-4;
        let phi0 =
            PeriodicScalarField::from_fn(&[n], &[1.0], |x| eps * (TAU * x[0]).sin()).unwrap();
        let t_end = 0.01;
        let traj = integrate(&red, &phi0, &quick_opts(t_end), vec![], &mut |_, _, _| vec![]);
        // linearization is the heat equation: discrete first-mode rate
        let h = 1.0 / n as f64;
        let mu = 4.0 / (h * h) * (std::f64::consts::PI * h).sin().powi(2);
        let expect = eps * (-mu * t_end).exp();
        let got = traj.final_field.data()[n / 4];
        assert!(
            (got - expect).abs() < 2e-3 * expect,
            "got {got:.6e} expect {expect:.6e}"
        );
    }

    #[test]
    fn calabi_gray_eigen_data_is_discrete_exact() {
        let spec = ReductionSpec::defaults(ReductionKind::CalabiGray);
        let lengths = spec.lengths_or_default();
        let data = CalabiGrayData::eigen_tuned(spec.grid_n, spec.grid_dims, &lengths).unwrap();
        assert!(data.eigen_residual < 1e-10, "residual {}", data.eigen_residual);
        assert!(data.unit_norm_defect() < 1e-14);
    }

    #[test]
    fn calabi_gray_constant_kappa_zero_is_stationary_for_constants() {
        // κ ≡ 0, u ≡ c → u̇ = 0
        let dims = [16usize, 16];
        let lengths = [1.0, 1.0];
        let data = CalabiGrayData {
            kappa: PeriodicScalarField::constant(&dims, &lengths, 0.0).unwrap(),
            alpha: [
                PeriodicScalarField::constant(&dims, &lengths, 1.0).unwrap(),
                PeriodicScalarField::constant(&dims, &lengths, 0.0).unwrap(),
                PeriodicScalarField::constant(&dims, &lengths, 0.0).unwrap(),
            ],
            eigen_residual: 0.0,
        };
        let red = Reduction::CalabiGray(CalabiGrayFlow::new(data).unwrap());
        let u = PeriodicScalarField::constant(&dims, &lengths, 1.3).unwrap();
        let mut out = u.zeros_like();
        red.rhs(&u, &mut out);
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn product_constant_state_is_stationary() {
        let u = PeriodicScalarField::constant(&[16, 16], &[1.0, 1.0], 2.0).unwrap();
        let red = Reduction::Product(ProductFlow::new(&u));
        let mut out = u.zeros_like();
        red.rhs(&u, &mut out);
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn ode_closed_forms() {
        // u₀ = 0: u(0.9) = ½ log 0.1 to 1e−7; ρ₀ = 2: ρ(1) = 1 to 1e−9
        let (red, u0) = ReductionSpec::defaults(ReductionKind::Iwasawa).build().unwrap();
        let opts = IntegrateOptions {
            t_end: 0.9,
            controller: StepController {
                cfl: 0.25,
                max_dt: 5e-4,
                min_dt: 1e-14,
            },
            floor: 1e-6,
            ceiling: 1e9,
        };
        let traj = integrate(&red, &u0, &opts, vec![], &mut |_, _, _| vec![]);
        assert!(traj.singularity.is_none());
        let exact = red.closed_form(0.9).unwrap();
        assert!(
            (traj.final_field.data()[0] - exact).abs() < 1e-7,
            "iwasawa err {}",
            (traj.final_field.data()[0] - exact).abs()
        );

        let (red, rho0) = ReductionSpec::defaults(ReductionKind::Sl2c).build().unwrap();
        let traj = integrate(&red, &rho0, &opts, vec![], &mut |_, _, _| vec![]);
        assert!((traj.final_field.data()[0] - 1.1).abs() < 1e-9); // ρ(0.9) = 2 − 0.9
    }

    #[test]
    fn iwasawa_extinction_detected_near_r() {
        let (red, u0) = ReductionSpec::defaults(ReductionKind::Iwasawa).build().unwrap();
        let opts = IntegrateOptions {
            t_end: 2.0,
            controller: StepController {
                cfl: 0.25,
                max_dt: 5e-4,
                min_dt: 1e-14,
            },
            floor: 1e-6,
            ceiling: 1e9,
        };
        let traj = integrate(&red, &u0, &opts, vec![], &mut |_, _, _| vec![]);
        let sing = traj.singularity.expect("collapse expected");
        assert!((sing.t_star - 1.0).abs() < 1e-6, "t* {}", sing.t_star);
    }

    #[test]
    fn semiflat_flat_start_is_stationary() {
        for dual in [false, true] {
            let flow = SemiflatPotentialFlow::new(3, dual);
            let red = Reduction::Semiflat(flow);
            let phi = PeriodicScalarField::constant(&[8, 8, 8], &[1.0; 3], 0.0).unwrap();
            let mut out = phi.zeros_like();
            red.rhs(&phi, &mut out);
            assert_eq!(out.max_abs(), 0.0);
        }
    }

    #[test]
    fn semiflat_linearization_decays_at_heat_rate() {
        use std::f64::consts::TAU;
        // linearized flow is Δφ/(2(n−1)) = Δφ/4: first-mode rate to 5%
        let n = 24;
        let eps = 1e-5;
        let phi0 = PeriodicScalarField::from_fn(&[n, n, n], &[1.0; 3], |x| {
            eps * (TAU * x[0]).sin()
        })
        .unwrap();
        let red = Reduction::Semiflat(SemiflatPotentialFlow::new(3, false));
        let t_end = 0.02;
        let traj = integrate(&red, &phi0, &quick_opts(t_end), vec![], &mut |_, _, _| vec![]);
        let rate = -(traj.final_field.data()[n * n * (n / 4)] / eps).ln() / t_end;
        let expect = 0.25 * TAU * TAU;
        assert!(
            (rate - expect).abs() / expect < 0.05,
            "rate {rate:.3} expect {expect:.3}"
        );
    }

    #[test]
    fn spec_validation_rejects_bad_parameters() {
        let mut spec = ReductionSpec::defaults(ReductionKind::Sl2c);
        spec.initial_value = -1.0;
        assert!(spec.validate().is_err());
        let mut spec = ReductionSpec::defaults(ReductionKind::ProductFibration);
        spec.grid_n = 4;
        assert!(spec.validate().is_err());
    }
}
