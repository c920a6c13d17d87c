use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::moments::{moment_matrix, scalar_deviation};
use crate::error::{Error, Result};
use crate::norms::{lorentz_quasinorm, LorentzParams};
use crate::scalar::Real;
use crate::solver::lift_force;
use crate::spectral::{FracParams, Grid, SpectralVectorField};

/// Shape family of a generated force.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForceKind {
    AnnulusRing,
    GaussianBump,
    PlaneWavePair,
}

/// Parameters of a generated force.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceSpec {
    pub kind: ForceKind,
    /// Target weak-`L^{3/(α−1)}` norm `η` of the lifted force.
    pub amplitude: f64,
    /// Spectral support `r0 ≤ |ξ| ≤ r1`; defaults to `(π/L, 0.9·dealias radius)`.
    #[serde(default)]
    pub annulus: Option<(f64, f64)>,
    /// Physical width of the Gaussian envelope; defaults to `2.8·spacing`.
    #[serde(default)]
    pub width: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "unit_weights")]
    pub anisotropy: [f64; 3],
    /// Average over the 24 rotations of the cube.
    #[serde(default)]
    pub symmetrize: bool,
}

fn unit_weights() -> [f64; 3] {
    [1.0; 3]
}

impl ForceSpec {
    pub fn annulus_ring(amplitude: f64, seed: u64) -> Self {
        Self {
            kind: ForceKind::AnnulusRing,
            amplitude,
            annulus: None,
            width: None,
            seed,
            anisotropy: unit_weights(),
            symmetrize: false,
        }
    }

    pub fn is_isotropic(&self) -> bool {
        self.anisotropy == unit_weights()
    }

    fn resolved_annulus<T: Real>(&self, grid: &Grid<T>) -> Result<(T, T)> {
        let (r0, r1) = match self.annulus {
            Some((a, b)) => (T::lit(a), T::lit(b)),
            None => {
                let r1 = T::lit(0.9) * grid.dealias_radius();
                (T::PI() / grid.box_length(), r1)
            }
        };
        if !(r0 > T::zero() && r1 > r0) {
            return Err(Error::InvalidAnnulus(format!("need 0 < r0 < r1, got ({r0}, {r1})")));
        }
        if !(r1 < grid.dealias_radius()) {
            return Err(Error::InvalidAnnulus(format!(
                "r1 = {r1} must stay below the dealiasing radius {}",
                grid.dealias_radius()
            )));
        }
        Ok((r0, r1))
    }

    fn resolved_width<T: Real>(&self, grid: &Grid<T>) -> T {
        self.width.map_or(T::lit(2.8) * grid.spacing(), T::lit)
    }

    /// [`ForceSpec::validate`] plus the annulus bounds on `grid`.
    pub fn validate_on<T: Real>(&self, grid: &Grid<T>) -> Result<()> {
        self.validate()?;
        self.resolved_annulus(grid).map(|_| ())
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(w) = self.width {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter(format!("force width must be positive, got {w}")));
            }
        }
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::InvalidParameter(format!("force amplitude must be positive, got {}", self.amplitude)));
        }
        if self.anisotropy.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter("anisotropy weights must be positive".into()));
        }
        Ok(())
    }
}

/// The 24 proper rotations of the cube, as signed permutation matrices.
pub fn cube_rotations() -> Vec<[[i32; 3]; 3]> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(24);
    for perm in PERMS {
        for signs in 0..8u32 {
            let mut m = [[0i32; 3]; 3];
            for (row, &col) in perm.iter().enumerate() {
                m[row][col] = if signs >> row & 1 == 1 { -1 } else { 1 };
            }
            let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
            if det == 1 {
                out.push(m);
            }
        }
    }
    out
}

/// Smooth step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
fn smooth_step<T: Real>(t: T) -> T {
    if t <= T::zero() {
        return T::zero();
    }
    if t >= T::one() {
        return T::one();
    }
    let a = (-T::one() / t).exp();
    let b = (-T::one() / (T::one() - t)).exp();
    a / (a + b)
}

/// Radial taper supported in `[r0, r1]`: rises on `[r0, 2r0]`, falls on `[0.85 r1, r1]`.
fn radial_taper<T: Real>(s: T, r0: T, r1: T) -> T {
    if s < r0 || s > r1 {
        return T::zero();
    }
    let third = (r1 - r0) / T::lit(3.0);
    let inner = r0.min(third);
    let outer = (T::lit(0.15) * r1).min(third);
    smooth_step((s - r0) / inner) * (T::one() - smooth_step((s - (r1 - outer)) / outer))
}

/// Polynomial vector potential: an even part `c₀ + Σ c_{lm} ξ_l ξ_m` and an odd cubic part.
struct Potential<T> {
    constant: [T; 3],
    quadratic: [[[T; 3]; 3]; 3],
    cubic: [[T; 3]; 3],
}

impl<T: Real> Potential<T> {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let mut draw = || T::lit(rng.gen_range(-1.0..1.0));
        let constant = [draw(), draw(), draw()];
        let mut quadratic = [[[T::zero(); 3]; 3]; 3];
        for q in quadratic.iter_mut() {
            for l in 0..3 {
                for m in l..3 {
                    let v = draw();
                    q[l][m] = v;
                    q[m][l] = v;
                }
            }
        }
        let mut cubic = [[T::zero(); 3]; 3];
        cubic.iter_mut().flatten().for_each(|c| *c = draw());
        Self {
            constant,
            quadratic,
            cubic,
        }
    }

    /// Odd part `Σ_l c_{dl} ξ_l³`, in units of `1/width³`.
    fn eval_odd(&self, xi: [T; 3], width: T) -> [T; 3] {
        let w3 = width * width * width;
        [0, 1, 2].map(|d| (0..3).map(|l| self.cubic[d][l] * xi[l] * xi[l] * xi[l]).sum::<T>() * w3)
    }

    /// Value at `ξ`, with quadratic terms measured in units of `1/width²`.
    fn eval(&self, xi: [T; 3], width: T) -> [T; 3] {
        let w2 = width * width;
        [0, 1, 2].map(|d| {
            let mut q = T::zero();
            for l in 0..3 {
                for m in 0..3 {
                    q += self.quadratic[d][l][m] * xi[l] * xi[m];
                }
            }
            self.constant[d] + q * w2
        })
    }
}

fn cross<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn apply<T: Real>(r: &[[i32; 3]; 3], v: [T; 3]) -> [T; 3] {
    [0, 1, 2].map(|i| (0..3).map(|j| T::lit(f64::from(r[i][j])) * v[j]).sum())
}

fn apply_transpose<T: Real>(r: &[[i32; 3]; 3], v: [T; 3]) -> [T; 3] {
    [0, 1, 2].map(|i| (0..3).map(|j| T::lit(f64::from(r[j][i])) * v[j]).sum())
}

/// Scales `f` so that its lift has weak-`L^{3/(α−1)}` norm `η`.
fn normalize<T: Real>(f: SpectralVectorField<T>, eta: T, params: &FracParams<T>) -> Result<SpectralVectorField<T>> {
    let u0 = lift_force(&f, params)?.to_physical();
    let norm = lorentz_quasinorm(&u0, &LorentzParams::weak(params.critical_exponent())?);
    if !(norm > T::zero()) {
        return Err(Error::InvalidAnnulus("force vanishes on every admissible mode".into()));
    }
    Ok(f.scaled(eta / norm))
}

fn annulus_candidate<T: Real>(
    spec: &ForceSpec,
    grid: &Grid<T>,
    params: &FracParams<T>,
    seed: u64,
) -> Result<SpectralVectorField<T>> {
    let (r0, r1) = spec.resolved_annulus(grid)?;
    let width = spec.resolved_width(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let potential = Potential::<T>::random(&mut rng);
    let w = spec.anisotropy;
    // a larger w_d enlarges the d-th velocity component
    let weights = [w[1] * w[2], w[0] * w[2], w[0] * w[1]].map(T::lit);
    let rotations = if spec.symmetrize {
        cube_rotations()
    } else {
        vec![[[1, 0, 0], [0, 1, 0], [0, 0, 1]]]
    };
    let inv_count = T::one() / T::from_count(rotations.len());
    let g = *grid;
    let mut f = SpectralVectorField::zeros(g);
    let mut modes = 0usize;
    for flat in 1..g.len() {
        if g.touches_nyquist(flat) {
            continue;
        }
        let xi = g.wavevector(flat);
        let s2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        let s = s2.sqrt();
        if s < r0 || s > r1 {
            continue;
        }
        modes += 1;
        let taper = radial_taper(s, r0, r1);
        if taper == T::zero() {
            continue;
        }
        let radial = taper * (-width * width * s2 / T::lit(2.0)).exp() * s.powf(params.alpha);
        let mut acc = [T::zero(); 3];
        let mut acc_odd = [T::zero(); 3];
        for r in &rotations {
            let rxi = apply_transpose(r, xi);
            let a = potential.eval(rxi, width);
            let a = [0, 1, 2].map(|d| a[d] * weights[d]);
            let v = apply(r, cross(rxi, a));
            // the even part averages to zero over the cube group
            let v_odd = if spec.symmetrize {
                apply(r, cross(rxi, potential.eval_odd(rxi, width)))
            } else {
                [T::zero(); 3]
            };
            for d in 0..3 {
                acc[d] += v[d];
                acc_odd[d] += v_odd[d];
            }
        }
        for d in 0..3 {
            f.components[d][flat] = Complex::new(radial * acc_odd[d], radial * acc[d]) * inv_count;
        }
    }
    if modes == 0 {
        return Err(Error::InvalidAnnulus(format!("no lattice mode with {r0} ≤ |ξ| ≤ {r1}")));
    }
    Ok(f)
}

/// Annulus-supported, divergence-free, odd force normalized by its lift.
///
/// Anisotropic, non-symmetrized specs are checked to produce a lifted moment
/// matrix with relative deviation at least 0.05 from a multiple of the identity;
/// up to eight consecutive seeds are tried.
pub fn make_annulus_force<T: Real>(
    spec: &ForceSpec,
    grid: &Grid<T>,
    params: &FracParams<T>,
) -> Result<SpectralVectorField<T>> {
    spec.validate()?;
    let eta = T::lit(spec.amplitude);
    let must_be_anisotropic = !spec.is_isotropic() && !spec.symmetrize;
    let mut worst = T::zero();
    for k in 0..8u64 {
        let seed = spec.seed.wrapping_add(k);
        let f = normalize(annulus_candidate(spec, grid, params, seed)?, eta, params)?;
        if !must_be_anisotropic {
            return Ok(f);
        }
        let m = moment_matrix(&lift_force(&f, params)?.to_physical());
        let dev = scalar_deviation(&m);
        if dev >= T::lit(0.05) {
            if k > 0 {
                log::info!("annulus force accepted with seed {seed} after {k} retries");
            }
            return Ok(f);
        }
        worst = worst.max(dev);
    }
    Err(Error::ScalarMomentMatrix {
        deviation: worst.as_f64(),
    })
}

/// `(−Δ)^{α/2}` of the curl of `c·exp(−|x|²/(2a²))`, band-limited to `|ξ| ≤ r1`.
fn gaussian_bump<T: Real>(spec: &ForceSpec, grid: &Grid<T>, params: &FracParams<T>) -> Result<SpectralVectorField<T>> {
    let (_, r1) = spec.resolved_annulus(grid)?;
    let width = spec.resolved_width(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let c: [T; 3] = [0, 1, 2].map(|d| T::lit(rng.gen_range(-1.0..1.0) * spec.anisotropy[d]));
    let g = *grid;
    let mut f = SpectralVectorField::zeros(g);
    for flat in 1..g.len() {
        if g.touches_nyquist(flat) {
            continue;
        }
        let xi = g.wavevector(flat);
        let s2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if s2 > r1 * r1 {
            continue;
        }
        let e = (-width * width * s2 / T::lit(2.0)).exp() * s2.sqrt().powf(params.alpha);
        let v = cross(xi, c);
        for d in 0..3 {
            f.components[d][flat] = Complex::new(T::zero(), v[d] * e);
        }
    }
    Ok(f)
}

/// `a cos(k·x)` with `k` the first lattice vector along `e₁` of length at least `r0`.
fn plane_wave_pair<T: Real>(spec: &ForceSpec, grid: &Grid<T>) -> Result<SpectralVectorField<T>> {
    let (r0, r1) = spec.resolved_annulus(grid)?;
    let g = *grid;
    let dk = T::lit(2.0) * T::PI() / g.box_length();
    let m = (r0 / dk).ceil().max(T::one());
    if m * dk > r1 {
        return Err(Error::InvalidAnnulus(format!("no axis mode inside ({r0}, {r1})")));
    }
    let m = m.to_usize().unwrap_or(1);
    let amp = [T::zero(), T::lit(spec.anisotropy[1]), T::lit(spec.anisotropy[2])];
    let half = T::lit(0.5);
    let mut f = SpectralVectorField::zeros(g);
    for flat in [g.index(m, 0, 0), g.index(g.n() - m, 0, 0)] {
        for d in 0..3 {
            f.components[d][flat] = Complex::new(amp[d] * half, T::zero());
        }
    }
    Ok(f)
}

/// Builds the force described by `spec`, normalized by its lift.
pub fn make_force<T: Real>(spec: &ForceSpec, grid: &Grid<T>, params: &FracParams<T>) -> Result<SpectralVectorField<T>> {
    spec.validate()?;
    match spec.kind {
        ForceKind::AnnulusRing => make_annulus_force(spec, grid, params),
        ForceKind::GaussianBump => normalize(gaussian_bump(spec, grid, params)?, T::lit(spec.amplitude), params),
        ForceKind::PlaneWavePair => normalize(plane_wave_pair(spec, grid)?, T::lit(spec.amplitude), params),
    }
}
