//! Closed-form least-squares fitting of the four standard path-loss models:
//!
//! * CI  - close-in free-space reference model, one exponent anchored at
//!   `FSPL(f, d0)` with `d0` = 1 m by default;
//! * FI  - floating-intercept (alpha-beta) log-distance regression;
//! * CIF - CI with a linear frequency-dependent exponent term around an
//!   anchor frequency `f0`;
//! * ABG - three-parameter model with separate distance and frequency
//!   exponents plus an offset.
//!
//! All fits minimize the sum of squared dB residuals and report sigma as the
//! RMS residual with no degrees-of-freedom correction. Degenerate sample
//! geometries fail loudly instead of being regularized, so model comparisons
//! never silently mix identifiable and unidentifiable fits.

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use crate::error::{Error, Result};
use crate::rfmath::fspl_db;
use crate::rng::index_below;
use crate::scalar::Scalar;

/// Default close-in reference distance in m.
pub const DEFAULT_D0_M: f64 = 1.0;

/// Frequency reference of the ABG model in Hz (1 GHz).
pub const ABG_FREQ_REF_HZ: f64 = 1e9;

// ---------------------------------------------------------------------------
// Samples and parameter types
// ---------------------------------------------------------------------------

/// One path-loss observation with antenna gains already removed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlSample<T> {
    pub frequency_hz: T,
    pub distance_m: T,
    pub path_loss_db: T,
}

impl<T: Scalar> PlSample<T> {
    pub fn new(frequency_hz: T, distance_m: T, path_loss_db: T) -> Result<Self> {
        if !(frequency_hz.is_finite() && frequency_hz > T::zero()) {
            return Err(Error::Domain(format!(
                "sample frequency must be > 0 Hz, got {frequency_hz}"
            )));
        }
        if !(distance_m.is_finite() && distance_m > T::zero()) {
            return Err(Error::Domain(format!(
                "sample distance must be > 0 m, got {distance_m}"
            )));
        }
        if !path_loss_db.is_finite() {
            return Err(Error::Domain(format!(
                "sample path loss must be finite, got {path_loss_db}"
            )));
        }
        Ok(Self {
            frequency_hz,
            distance_m,
            path_loss_db,
        })
    }
}

/// Close-in model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiParams<T> {
    /// Path loss exponent n.
    pub ple: T,
    /// Shadow-fading RMS residual in dB.
    pub sigma_db: T,
    /// Reference distance in m.
    pub d0_m: T,
}

/// Floating-intercept model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiParams<T> {
    /// Intercept in dB.
    pub alpha_db: T,
    /// Slope against 10*log10(d).
    pub beta: T,
    pub sigma_db: T,
}

/// CI-with-frequency-term model parameters (1 m reference distance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CifParams<T> {
    /// Path loss exponent at the anchor frequency.
    pub ple_at_f0: T,
    /// Linear frequency-dependence of the exponent.
    pub b: T,
    /// Anchor frequency in Hz.
    pub f0_hz: T,
    pub sigma_db: T,
}

/// Alpha-beta-gamma model parameters (1 m / 1 GHz references).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbgParams<T> {
    /// Distance exponent.
    pub alpha: T,
    /// Offset in dB.
    pub beta_db: T,
    /// Frequency exponent.
    pub gamma: T,
    pub sigma_db: T,
}

// ---------------------------------------------------------------------------
// Model evaluation
// ---------------------------------------------------------------------------

fn ten_log10<T: Scalar>(x: T) -> T {
    T::of(10.0) * x.log10()
}

/// CI model: `FSPL(f, d0) + 10 * n * log10(d / d0)`.
pub fn eval_ci<T: Scalar>(params: &CiParams<T>, frequency_hz: T, distance_m: T) -> Result<T> {
    if distance_m < params.d0_m {
        return Err(Error::Domain(format!(
            "CI model needs distance >= d0 ({} m), got {distance_m} m",
            params.d0_m
        )));
    }
    let anchor = fspl_db(frequency_hz, params.d0_m)?;
    Ok(anchor + params.ple * ten_log10(distance_m / params.d0_m))
}

/// FI model: `alpha + beta * 10 * log10(d)`.
pub fn eval_fi<T: Scalar>(params: &FiParams<T>, distance_m: T) -> Result<T> {
    if !(distance_m.is_finite() && distance_m > T::zero()) {
        return Err(Error::Domain(format!(
            "FI model needs distance > 0 m, got {distance_m}"
        )));
    }
    Ok(params.alpha_db + params.beta * ten_log10(distance_m))
}

/// CIF model: `FSPL(f, 1 m) + 10 * n * (1 + b * (f - f0) / f0) * log10(d)`.
pub fn eval_cif<T: Scalar>(params: &CifParams<T>, frequency_hz: T, distance_m: T) -> Result<T> {
    let d0 = T::of(DEFAULT_D0_M);
    if distance_m < d0 {
        return Err(Error::Domain(format!(
            "CIF model needs distance >= 1 m, got {distance_m} m"
        )));
    }
    let anchor = fspl_db(frequency_hz, d0)?;
    let slope = params.ple_at_f0
        * (T::one() + params.b * (frequency_hz - params.f0_hz) / params.f0_hz);
    Ok(anchor + slope * ten_log10(distance_m))
}

/// ABG model: `10 * alpha * log10(d / 1 m) + beta + 10 * gamma * log10(f / 1 GHz)`.
pub fn eval_abg<T: Scalar>(params: &AbgParams<T>, frequency_hz: T, distance_m: T) -> Result<T> {
    if !(distance_m.is_finite() && distance_m > T::zero()) {
        return Err(Error::Domain(format!(
            "ABG model needs distance > 0 m, got {distance_m}"
        )));
    }
    if !(frequency_hz.is_finite() && frequency_hz > T::zero()) {
        return Err(Error::Domain(format!(
            "ABG model needs frequency > 0 Hz, got {frequency_hz}"
        )));
    }
    Ok(params.alpha * ten_log10(distance_m)
        + params.beta_db
        + params.gamma * ten_log10(frequency_hz / T::of(ABG_FREQ_REF_HZ)))
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

fn rms<T: Scalar>(residuals: &[T]) -> T {
    let n = T::of(residuals.len() as f64);
    (residuals.iter().map(|&r| r * r).sum::<T>() / n).sqrt()
}

/// Fit the CI model with the default 1 m reference distance.
pub fn fit_ci<T: Scalar>(samples: &[PlSample<T>]) -> Result<CiParams<T>> {
    fit_ci_with_d0(samples, T::of(DEFAULT_D0_M))
}

/// Fit the CI model against an explicit reference distance.
///
/// The single free parameter has the closed form `n = sum(A*B) / sum(B^2)`
/// with `A = PL - FSPL(f, d0)` and `B = 10 * log10(d / d0)`.
pub fn fit_ci_with_d0<T: Scalar>(samples: &[PlSample<T>], d0_m: T) -> Result<CiParams<T>> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("CI fit needs at least one sample".into()));
    }
    if !(d0_m.is_finite() && d0_m > T::zero()) {
        return Err(Error::Domain(format!("d0 must be > 0 m, got {d0_m}")));
    }
    let mut sum_ab = T::zero();
    let mut sum_bb = T::zero();
    let mut detrended = Vec::with_capacity(samples.len());
    for s in samples {
        if s.distance_m < d0_m {
            return Err(Error::Domain(format!(
                "CI fit needs every distance >= d0 ({d0_m} m), got {} m",
                s.distance_m
            )));
        }
        let a = s.path_loss_db - fspl_db(s.frequency_hz, d0_m)?;
        let b = ten_log10(s.distance_m / d0_m);
        sum_ab += a * b;
        sum_bb += b * b;
        detrended.push((a, b));
    }
    if sum_bb == T::zero() {
        return Err(Error::DegenerateGeometry(
            "all samples at the reference distance; the exponent is unidentifiable".into(),
        ));
    }
    let ple = sum_ab / sum_bb;
    let residuals: Vec<T> = detrended.iter().map(|&(a, b)| a - ple * b).collect();
    Ok(CiParams {
        ple,
        sigma_db: rms(&residuals),
        d0_m,
    })
}

/// Fit the FI model: ordinary least squares of PL on `10 * log10(d)`.
pub fn fit_fi<T: Scalar>(samples: &[PlSample<T>]) -> Result<FiParams<T>> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "FI fit needs at least two samples, got {}",
            samples.len()
        )));
    }
    let n = T::of(samples.len() as f64);
    let xs: Vec<T> = samples.iter().map(|s| ten_log10(s.distance_m)).collect();
    let ys: Vec<T> = samples.iter().map(|s| s.path_loss_db).collect();
    let x_mean = xs.iter().copied().sum::<T>() / n;
    let y_mean = ys.iter().copied().sum::<T>() / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (&x, &y) in xs.iter().zip(&ys) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    if sxx == T::zero() {
        return Err(Error::DegenerateGeometry(
            "all samples at one distance; the slope is unidentifiable".into(),
        ));
    }
    let beta = sxy / sxx;
    let alpha_db = y_mean - beta * x_mean;
    let residuals: Vec<T> = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| y - alpha_db - beta * x)
        .collect();
    Ok(FiParams {
        alpha_db,
        beta,
        sigma_db: rms(&residuals),
    })
}

/// Fit the CIF model.
///
/// `f0` defaults to the sample-count-weighted mean frequency unless
/// overridden. The two-parameter least squares solves for `(n, n*b)` on the
/// basis `{log-distance, log-distance * normalized frequency offset}`.
pub fn fit_cif<T: Scalar>(
    samples: &[PlSample<T>],
    f0_override_hz: Option<T>,
) -> Result<CifParams<T>> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("CIF fit needs at least one sample".into()));
    }
    let d0 = T::of(DEFAULT_D0_M);
    let n_samples = T::of(samples.len() as f64);
    let f0_hz = match f0_override_hz {
        Some(f0) if f0.is_finite() && f0 > T::zero() => f0,
        Some(f0) => {
            return Err(Error::Domain(format!("f0 override must be > 0 Hz, got {f0}")));
        }
        None => samples.iter().map(|s| s.frequency_hz).sum::<T>() / n_samples,
    };

    let mut s11 = T::zero();
    let mut s12 = T::zero();
    let mut s22 = T::zero();
    let mut s1y = T::zero();
    let mut s2y = T::zero();
    let mut rows = Vec::with_capacity(samples.len());
    for s in samples {
        if s.distance_m < d0 {
            return Err(Error::Domain(format!(
                "CIF fit needs every distance >= 1 m, got {} m",
                s.distance_m
            )));
        }
        let y = s.path_loss_db - fspl_db(s.frequency_hz, d0)?;
        let x1 = ten_log10(s.distance_m);
        let x2 = x1 * (s.frequency_hz - f0_hz) / f0_hz;
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        s1y += x1 * y;
        s2y += x2 * y;
        rows.push((x1, x2, y));
    }

    let det = s11 * s22 - s12 * s12;
    let scale = s11 * s22;
    if scale == T::zero() || det.abs() <= T::of(1e-12) * scale.abs() {
        let n_freqs = count_distinct(samples.iter().map(|s| s.frequency_hz));
        let n_dists = count_distinct(samples.iter().map(|s| s.distance_m));
        let cause = if n_freqs < 2 {
            "single frequency"
        } else if n_dists < 2 {
            "single distance"
        } else {
            "collinear basis"
        };
        return Err(Error::DegenerateGeometry(format!(
            "CIF basis is singular ({cause}); n and b cannot be separated"
        )));
    }
    let ple_at_f0 = (s1y * s22 - s2y * s12) / det;
    let nb = (s11 * s2y - s12 * s1y) / det;
    let b = if ple_at_f0 == T::zero() {
        T::zero()
    } else {
        nb / ple_at_f0
    };
    let residuals: Vec<T> = rows
        .iter()
        .map(|&(x1, x2, y)| y - ple_at_f0 * x1 - nb * x2)
        .collect();
    Ok(CifParams {
        ple_at_f0,
        b,
        f0_hz,
        sigma_db: rms(&residuals),
    })
}

/// Fit the ABG model by three-parameter linear least squares.
pub fn fit_abg<T: Scalar>(samples: &[PlSample<T>]) -> Result<AbgParams<T>> {
    if samples.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "ABG fit needs at least three samples, got {}",
            samples.len()
        )));
    }
    let n_dists = count_distinct(samples.iter().map(|s| s.distance_m));
    if n_dists < 2 {
        return Err(Error::DegenerateGeometry(
            "ABG design is rank-deficient in distance (all samples at one distance)".into(),
        ));
    }
    let n_freqs = count_distinct(samples.iter().map(|s| s.frequency_hz));
    if n_freqs < 2 {
        return Err(Error::DegenerateGeometry(
            "ABG design is rank-deficient in frequency (all samples at one frequency)".into(),
        ));
    }

    // Normal equations over the basis [10*log10(d), 1, 10*log10(f/1GHz)].
    let mut ata = [[T::zero(); 3]; 3];
    let mut aty = [T::zero(); 3];
    let mut rows = Vec::with_capacity(samples.len());
    for s in samples {
        let x = [
            ten_log10(s.distance_m),
            T::one(),
            ten_log10(s.frequency_hz / T::of(ABG_FREQ_REF_HZ)),
        ];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += x[i] * x[j];
            }
            aty[i] += x[i] * s.path_loss_db;
        }
        rows.push((x, s.path_loss_db));
    }
    let solution = solve_3x3(ata, aty).ok_or_else(|| {
        Error::DegenerateGeometry(
            "ABG design is rank-deficient: log-distance and log-frequency are collinear".into(),
        )
    })?;
    let [alpha, beta_db, gamma] = solution;
    let residuals: Vec<T> = rows
        .iter()
        .map(|&(x, y)| y - alpha * x[0] - beta_db * x[1] - gamma * x[2])
        .collect();
    Ok(AbgParams {
        alpha,
        beta_db,
        gamma,
        sigma_db: rms(&residuals),
    })
}

fn count_distinct<T: Scalar>(values: impl Iterator<Item = T>) -> usize {
    let mut seen: Vec<T> = Vec::new();
    for v in values {
        if !seen.contains(&v) {
            seen.push(v);
        }
    }
    seen.len()
}

/// Gaussian elimination with partial pivoting on a 3x3 system.
/// Returns `None` when a pivot collapses relative to the matrix scale.
fn solve_3x3<T: Scalar>(a: [[T; 3]; 3], y: [T; 3]) -> Option<[T; 3]> {
    let mut m = [[T::zero(); 4]; 3];
    let mut scale = T::zero();
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = a[i][j];
            scale = scale.max(a[i][j].abs());
        }
        m[i][3] = y[i];
    }
    if scale == T::zero() {
        return None;
    }
    let tol = T::of(1e-10) * scale;
    for col in 0..3 {
        let pivot_row = (col..3)
            .max_by(|&r1, &r2| {
                m[r1][col]
                    .abs()
                    .partial_cmp(&m[r2][col].abs())
                    .expect("finite pivots")
            })
            .expect("non-empty range");
        if m[pivot_row][col].abs() <= tol {
            return None;
        }
        m.swap(col, pivot_row);
        for row in (col + 1)..3 {
            let factor = m[row][col] / m[col][col];
            let (pivot_rows, rest) = m.split_at_mut(col + 1);
            let pivot_row_vals = pivot_rows[col];
            for (k, cell) in rest[row - col - 1].iter_mut().enumerate().skip(col) {
                *cell -= factor * pivot_row_vals[k];
            }
        }
    }
    let mut x = [T::zero(); 3];
    for row in (0..3).rev() {
        let mut acc = m[row][3];
        for k in (row + 1)..3 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

// ---------------------------------------------------------------------------
// Model comparison
// ---------------------------------------------------------------------------

/// The four supported path-loss models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Ci,
    Fi,
    Cif,
    Abg,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Ci, ModelKind::Fi, ModelKind::Cif, ModelKind::Abg];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Ci => "CI",
            ModelKind::Fi => "FI",
            ModelKind::Cif => "CIF",
            ModelKind::Abg => "ABG",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name.trim().to_ascii_uppercase().as_str() {
            "CI" => Ok(ModelKind::Ci),
            "FI" | "AB" => Ok(ModelKind::Fi),
            "CIF" => Ok(ModelKind::Cif),
            "ABG" => Ok(ModelKind::Abg),
            other => Err(Error::Schema(format!("unknown path-loss model `{other}`"))),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Fitted parameters for any of the four models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FittedModel<T> {
    Ci(CiParams<T>),
    Fi(FiParams<T>),
    Cif(CifParams<T>),
    Abg(AbgParams<T>),
}

impl<T: Scalar> FittedModel<T> {
    pub fn kind(&self) -> ModelKind {
        match self {
            FittedModel::Ci(_) => ModelKind::Ci,
            FittedModel::Fi(_) => ModelKind::Fi,
            FittedModel::Cif(_) => ModelKind::Cif,
            FittedModel::Abg(_) => ModelKind::Abg,
        }
    }

    pub fn sigma_db(&self) -> T {
        match self {
            FittedModel::Ci(p) => p.sigma_db,
            FittedModel::Fi(p) => p.sigma_db,
            FittedModel::Cif(p) => p.sigma_db,
            FittedModel::Abg(p) => p.sigma_db,
        }
    }

    /// The model's distance exponent (PLE or slope).
    pub fn distance_exponent(&self) -> T {
        match self {
            FittedModel::Ci(p) => p.ple,
            FittedModel::Fi(p) => p.beta,
            FittedModel::Cif(p) => p.ple_at_f0,
            FittedModel::Abg(p) => p.alpha,
        }
    }

    /// Human-readable parameter summary, full precision.
    pub fn describe(&self) -> String {
        match self {
            FittedModel::Ci(p) => format!("n={} d0={} m", p.ple, p.d0_m),
            FittedModel::Fi(p) => format!("alpha={} dB beta={}", p.alpha_db, p.beta),
            FittedModel::Cif(p) => {
                format!("n={} b={} f0={} GHz", p.ple_at_f0, p.b, p.f0_hz / T::of(1e9))
            }
            FittedModel::Abg(p) => {
                format!("alpha={} beta={} dB gamma={}", p.alpha, p.beta_db, p.gamma)
            }
        }
    }
}

/// Options shared by [`compare_models`].
#[derive(Debug, Clone, Copy)]
pub struct FitOptions<T> {
    /// CI reference distance.
    pub d0_m: T,
    /// Optional CIF anchor frequency override.
    pub f0_override_hz: Option<T>,
}

impl<T: Scalar> Default for FitOptions<T> {
    fn default() -> Self {
        Self {
            d0_m: T::of(DEFAULT_D0_M),
            f0_override_hz: None,
        }
    }
}

/// One row of a model comparison.
#[derive(Debug, Clone)]
pub struct ComparisonRow<T> {
    pub model: FittedModel<T>,
}

/// Comparison of every requested model over one dataset.
#[derive(Debug, Clone)]
pub struct ModelComparison<T> {
    /// Fitted rows sorted by sigma ascending.
    pub rows: Vec<ComparisonRow<T>>,
    /// Models that could not be fitted, with the reason.
    pub skipped: Vec<(ModelKind, String)>,
}

/// Fit every requested model; unfittable models are reported as skipped
/// rather than failing the whole comparison. Fails only when no model fits.
pub fn compare_models<T: Scalar>(
    samples: &[PlSample<T>],
    requested: &[ModelKind],
    options: &FitOptions<T>,
) -> Result<ModelComparison<T>> {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &kind in requested {
        match fit_one(samples, kind, options) {
            Ok(model) => rows.push(ComparisonRow { model }),
            Err(err) => skipped.push((kind, err.to_string())),
        }
    }
    if rows.is_empty() {
        return Err(Error::DegenerateGeometry(format!(
            "no requested model could be fitted: {}",
            skipped
                .iter()
                .map(|(k, e)| format!("{k}: {e}"))
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }
    rows.sort_by(|a, b| {
        a.model
            .sigma_db()
            .partial_cmp(&b.model.sigma_db())
            .expect("finite sigmas")
    });
    Ok(ModelComparison { rows, skipped })
}

fn fit_one<T: Scalar>(
    samples: &[PlSample<T>],
    kind: ModelKind,
    options: &FitOptions<T>,
) -> Result<FittedModel<T>> {
    Ok(match kind {
        ModelKind::Ci => FittedModel::Ci(fit_ci_with_d0(samples, options.d0_m)?),
        ModelKind::Fi => FittedModel::Fi(fit_fi(samples)?),
        ModelKind::Cif => FittedModel::Cif(fit_cif(samples, options.f0_override_hz)?),
        ModelKind::Abg => FittedModel::Abg(fit_abg(samples)?),
    })
}

/// Bootstrap stability of the distance exponent for one model.
#[derive(Debug, Clone)]
pub struct BootstrapRow<T> {
    pub model: ModelKind,
    /// Resamples in which the fit succeeded.
    pub fitted: usize,
    /// Standard deviation of the distance exponent across successful fits.
    pub ple_std: T,
}

/// Resample the dataset with replacement and report the spread of each
/// model's distance exponent, the stability figure the multi-frequency
/// models are expected to win.
pub fn bootstrap_ple_std<T: Scalar>(
    samples: &[PlSample<T>],
    requested: &[ModelKind],
    resamples: usize,
    seed: u64,
    options: &FitOptions<T>,
) -> Result<Vec<BootstrapRow<T>>> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("bootstrap needs samples".into()));
    }
    if resamples < 2 {
        return Err(Error::Domain(format!(
            "bootstrap needs at least 2 resamples, got {resamples}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut exponents: Vec<Vec<T>> = vec![Vec::new(); requested.len()];
    let mut resample = Vec::with_capacity(samples.len());
    for _ in 0..resamples {
        resample.clear();
        for _ in 0..samples.len() {
            resample.push(samples[index_below(&mut rng, samples.len())]);
        }
        for (slot, &kind) in exponents.iter_mut().zip(requested) {
            if let Ok(model) = fit_one(&resample, kind, options) {
                slot.push(model.distance_exponent());
            }
        }
    }
    Ok(requested
        .iter()
        .zip(exponents)
        .map(|(&model, ples)| {
            let fitted = ples.len();
            let ple_std = if fitted < 2 {
                T::zero()
            } else {
                let n = T::of(fitted as f64);
                let mean = ples.iter().copied().sum::<T>() / n;
                (ples.iter().map(|&p| (p - mean) * (p - mean)).sum::<T>() / n).sqrt()
            };
            BootstrapRow {
                model,
                fitted,
                ple_std,
            }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
