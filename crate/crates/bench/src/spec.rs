//! Declarative experiment descriptions.
//!
//! A spec is a single JSON document. Unknown keys are rejected. Omitted
//! optional fields take defaults, and [`ExperimentSpec::resolve`] fills every
//! field so the serialized form written next to results is complete.

use std::fmt;

use amop::{AmopConfig, MeasurementEnsemble, SignalModel};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{BenchError, Result};
use crate::table::format_g9;

/// What an experiment produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Exact-recovery percentage over an `(S, m)` grid.
    RecoveryPercentage,
    /// Relative-error quantiles over an `(SNR, m)` grid.
    NoiseSweep,
    /// Support detection on the spatial-temporal dictionary.
    StapSupport,
    /// Guaranteed energy share `p_min(K, T)`.
    PminTable,
    /// Smallest admissible magnitude versus sparsity.
    DynamicRangeCurve,
}

impl ExperimentKind {
    pub fn is_monte_carlo(self) -> bool {
        matches!(self, Self::RecoveryPercentage | Self::NoiseSweep | Self::StapSupport)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Amop,
    Omp,
    Cosamp,
}

impl Algorithm {
    pub fn label(self) -> &'static str {
        match self {
            Self::Amop => "amop",
            Self::Omp => "omp",
            Self::Cosamp => "cosamp",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Signal-to-noise ratio in dB; serialized as a number or `"noiseless"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Snr {
    Noiseless,
    Db(f64),
}

impl Snr {
    /// The ratio in dB, with `+inf` for the noiseless case.
    pub fn db(self) -> f64 {
        match self {
            Self::Noiseless => f64::INFINITY,
            Self::Db(v) => v,
        }
    }

    pub fn label(self) -> String {
        match self {
            Self::Noiseless => "noiseless".into(),
            Self::Db(v) => format_g9(v),
        }
    }
}

impl Serialize for Snr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Self::Noiseless => s.serialize_str("noiseless"),
            Self::Db(v) => s.serialize_f64(v),
        }
    }
}

impl<'de> Deserialize<'de> for Snr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) if v.is_finite() => Ok(Self::Db(v)),
            Raw::Num(v) => Err(serde::de::Error::custom(format!("snr_db must be finite, got {v}"))),
            Raw::Text(t) if t == "noiseless" => Ok(Self::Noiseless),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "snr_db entries must be numbers or \"noiseless\", got {t:?}"
            ))),
        }
    }
}

/// Per-field replacements for the benchmark AMOP configuration. Absent
/// fields keep the defaults of [`AmopConfig::for_measurements`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmopOverrides {
    pub threshold: Option<f64>,
    pub halt_eps: Option<f64>,
    pub cap_k: Option<usize>,
    pub beta_floor: Option<f64>,
    pub beta_decay: Option<f64>,
    pub max_iters: Option<usize>,
    pub lin_dep_tol: Option<f64>,
}

impl AmopOverrides {
    pub fn apply(&self, m: usize, snr: Snr) -> AmopConfig {
        let d = AmopConfig::for_measurements(m, snr.db());
        AmopConfig {
            threshold: self.threshold.unwrap_or(d.threshold),
            halt_eps: self.halt_eps.unwrap_or(d.halt_eps),
            cap_k: self.cap_k.unwrap_or(d.cap_k),
            beta_floor: self.beta_floor.unwrap_or(d.beta_floor),
            beta_decay: self.beta_decay.unwrap_or(d.beta_decay),
            max_iters: self.max_iters.unwrap_or(d.max_iters),
            lin_dep_tol: self.lin_dep_tol.unwrap_or(d.lin_dep_tol),
            fixed_k: None,
        }
    }
}

/// Axes of the closed-form tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSpec {
    pub k_max: usize,
    pub t_values: Vec<f64>,
    pub s_max: usize,
    pub noise_bounds: Vec<f64>,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        Self {
            k_max: 50,
            t_values: (1..=9).map(|i| i as f64 / 10.0).collect(),
            s_max: 100,
            noise_bounds: vec![0.0, 0.1],
        }
    }
}

/// Support-detection settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StapSpec {
    /// Estimated entries below this fraction of the largest estimated
    /// magnitude are not reported as detections.
    pub detect_threshold: f64,
    pub tolerances: Vec<usize>,
}

impl Default for StapSpec {
    fn default() -> Self {
        Self {
            detect_threshold: 1e-3,
            tolerances: vec![0, 1, 2],
        }
    }
}

fn default_sparsity() -> Vec<usize> {
    vec![4]
}

fn default_snr() -> Vec<Snr> {
    vec![Snr::Noiseless]
}

fn default_trials() -> usize {
    100
}

fn default_algorithms() -> Vec<Algorithm> {
    vec![Algorithm::Amop, Algorithm::Cosamp]
}

fn default_exact_tol() -> f64 {
    amop::metrics::EXACT_RECOVERY_TOL
}

fn default_ensemble() -> MeasurementEnsemble {
    MeasurementEnsemble::Gaussian
}

fn default_signal() -> SignalModel {
    SignalModel::Flat
}

/// Default ambient dimension outside the spatial-temporal ensemble.
pub const DEFAULT_N: usize = 256;

/// One experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    #[serde(default = "default_ensemble")]
    pub ensemble: MeasurementEnsemble,
    #[serde(default = "default_signal")]
    pub signal: SignalModel,
    /// Ambient dimension; implied by the grid for the spatial-temporal
    /// ensemble.
    #[serde(default, rename = "N")]
    pub n: Option<usize>,
    #[serde(default = "default_sparsity")]
    pub sparsity: Vec<usize>,
    /// Measurement counts; implied by the grid for the spatial-temporal
    /// ensemble.
    #[serde(default)]
    pub m: Option<Vec<usize>>,
    #[serde(default = "default_snr")]
    pub snr_db: Vec<Snr>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub amop: AmopOverrides,
    /// CoSaMP iteration limit; `null` means `m`.
    #[serde(default)]
    pub cosamp_max_iters: Option<usize>,
    /// Relative error below which a recovery counts as exact.
    #[serde(default = "default_exact_tol")]
    pub exact_tol: f64,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    #[serde(default)]
    pub stap: StapSpec,
    #[serde(default)]
    pub output: Option<String>,
}

/// Tagged-enum fields whose unit variants would otherwise accept stray
/// keys silently.
fn reject_stray_variant_keys(raw: &serde_json::Value) -> Result<()> {
    let unit_variants: [(&str, &[&str]); 2] = [
        ("ensemble", &["gaussian", "bernoulli", "fourier"]),
        ("signal", &["flat"]),
    ];
    for (field, units) in unit_variants {
        let Some(obj) = raw.get(field).and_then(|v| v.as_object()) else {
            continue;
        };
        let ty = obj.get("type").and_then(|t| t.as_str()).unwrap_or_default();
        if units.contains(&ty) {
            if let Some(extra) = obj.keys().find(|k| k.as_str() != "type") {
                return Err(BenchError::spec(format!("{field}: unknown field `{extra}` for type `{ty}`")));
            }
        }
    }
    Ok(())
}

impl ExperimentSpec {
    /// Parses and validates a JSON spec.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: serde_json::Value =
            serde_json::from_str(text).map_err(|e| BenchError::spec(format!("malformed JSON: {e}")))?;
        reject_stray_variant_keys(&raw)?;
        let spec: Self = serde_json::from_value(raw).map_err(|e| BenchError::spec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Compact JSON of every field.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn n(&self) -> usize {
        match self.ensemble {
            MeasurementEnsemble::SpatialTemporal(g) => g.cols(),
            _ => self.n.unwrap_or(DEFAULT_N),
        }
    }

    pub fn m_values(&self) -> Vec<usize> {
        match (&self.m, self.ensemble) {
            (Some(m), _) => m.clone(),
            (None, MeasurementEnsemble::SpatialTemporal(g)) => vec![g.rows()],
            (None, _) => vec![64],
        }
    }

    pub fn amop_config(&self, m: usize, snr: Snr) -> AmopConfig {
        self.amop.apply(m, snr)
    }

    pub fn cosamp_iters(&self, m: usize) -> usize {
        self.cosamp_max_iters.unwrap_or(m)
    }

    /// Copy with every defaulted field written out and the seed optionally
    /// replaced.
    pub fn resolve(&self, seed_override: Option<u64>) -> Self {
        let mut out = self.clone();
        out.n = Some(self.n());
        out.m = Some(self.m_values());
        if let Some(seed) = seed_override {
            out.base_seed = seed;
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(BenchError::spec(msg));
        if self.trials == 0 {
            return bad("trials: must be at least 1".into());
        }
        match self.kind {
            ExperimentKind::PminTable => {
                if self.analysis.k_max == 0 {
                    return bad("analysis.k_max: must be at least 1".into());
                }
                if self.analysis.t_values.is_empty() {
                    return bad("analysis.t_values: must not be empty".into());
                }
                if let Some(t) = self.analysis.t_values.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
                    return bad(format!("analysis.t_values: {t} is outside (0, 1]"));
                }
                return Ok(());
            }
            ExperimentKind::DynamicRangeCurve => {
                if self.analysis.s_max < 2 {
                    return bad("analysis.s_max: must be at least 2".into());
                }
                if self.analysis.noise_bounds.is_empty() {
                    return bad("analysis.noise_bounds: must not be empty".into());
                }
                if let Some(e) = self.analysis.noise_bounds.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
                    return bad(format!("analysis.noise_bounds: {e} must be finite and nonnegative"));
                }
                return Ok(());
            }
            _ => {}
        }

        self.ensemble_checks()?;
        self.signal.validate().map_err(|e| BenchError::spec(format!("signal: {e}")))?;
        let n = self.n();
        let ms = self.m_values();
        if n == 0 {
            return bad("N: must be positive".into());
        }
        for (name, empty) in [
            ("sparsity", self.sparsity.is_empty()),
            ("m", ms.is_empty()),
            ("snr_db", self.snr_db.is_empty()),
            ("algorithms", self.algorithms.is_empty()),
        ] {
            if empty {
                return bad(format!("{name}: must not be empty"));
            }
        }
        if let Some(&s) = self.sparsity.iter().find(|&&s| s == 0 || s > n) {
            return bad(format!("sparsity: {s} is outside 1..={n}"));
        }
        if let Some(&m) = ms.iter().find(|&&m| m == 0 || m > n) {
            return bad(format!("m: {m} is outside 1..={n}"));
        }
        for (i, a) in self.algorithms.iter().enumerate() {
            if self.algorithms[..i].contains(a) {
                return bad(format!("algorithms: {a} is listed twice"));
            }
        }
        if !(self.exact_tol > 0.0) {
            return bad("exact_tol: must be positive".into());
        }
        for &m in &ms {
            for &snr in &self.snr_db {
                self.amop_config(m, snr)
                    .validate()
                    .map_err(|e| BenchError::spec(format!("amop: {e}")))?;
            }
        }
        if self.cosamp_max_iters == Some(0) {
            return bad("cosamp_max_iters: must be positive".into());
        }

        match self.kind {
            ExperimentKind::RecoveryPercentage if self.snr_db.len() != 1 => {
                bad("snr_db: recovery_percentage takes exactly one SNR".into())
            }
            ExperimentKind::NoiseSweep if self.sparsity.len() != 1 => {
                bad("sparsity: noise_sweep takes exactly one sparsity".into())
            }
            ExperimentKind::StapSupport => {
                if !matches!(self.ensemble, MeasurementEnsemble::SpatialTemporal(_)) {
                    return bad("ensemble: stap_support needs the spatial_temporal ensemble".into());
                }
                if self.sparsity.len() != 1 || self.snr_db.len() != 1 {
                    return bad("stap_support takes exactly one sparsity and one SNR".into());
                }
                if self.stap.tolerances.is_empty() {
                    return bad("stap.tolerances: must not be empty".into());
                }
                if !(0.0..1.0).contains(&self.stap.detect_threshold) {
                    return bad("stap.detect_threshold: must lie in [0, 1)".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn ensemble_checks(&self) -> Result<()> {
        if let MeasurementEnsemble::SpatialTemporal(g) = self.ensemble {
            g.validate().map_err(|e| BenchError::spec(format!("ensemble: {e}")))?;
            if let Some(n) = self.n.filter(|&n| n != g.cols()) {
                return Err(BenchError::spec(format!(
                    "N: {n} conflicts with the {}-column spatial-temporal grid",
                    g.cols()
                )));
            }
            if let Some(m) = self.m.as_ref().filter(|m| m.as_slice() != [g.rows()]) {
                return Err(BenchError::spec(format!(
                    "m: {m:?} conflicts with the {}-row spatial-temporal dictionary",
                    g.rows()
                )));
            }
            if g.rows() > g.cols() {
                return Err(BenchError::spec("ensemble: dictionary must have at least as many columns as rows"));
            }
        }
        Ok(())
    }
}
