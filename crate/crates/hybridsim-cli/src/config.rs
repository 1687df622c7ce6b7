//! Scenario configuration: a single TOML document per run, with unknown
//! keys rejected and scenario-specific required sections validated before
//! any numerics.

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Spectrum,
    Avoided,
    Dispersive,
    Rabi,
    Modesplit,
    Numbersplit,
    Encode,
    Cat,
    Force,
    Transduce,
    Cool,
}

impl Scenario {
    pub const ALL: [Scenario; 11] = [
        Scenario::Spectrum,
        Scenario::Avoided,
        Scenario::Dispersive,
        Scenario::Rabi,
        Scenario::Modesplit,
        Scenario::Numbersplit,
        Scenario::Encode,
        Scenario::Cat,
        Scenario::Force,
        Scenario::Transduce,
        Scenario::Cool,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Spectrum => "spectrum",
            Scenario::Avoided => "avoided",
            Scenario::Dispersive => "dispersive",
            Scenario::Rabi => "rabi",
            Scenario::Modesplit => "modesplit",
            Scenario::Numbersplit => "numbersplit",
            Scenario::Encode => "encode",
            Scenario::Cat => "cat",
            Scenario::Force => "force",
            Scenario::Transduce => "transduce",
            Scenario::Cool => "cool",
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Scenario::Spectrum => "qubit eigenvalue sweep over flux or gate charge",
            Scenario::Avoided => "qubit-mechanics dressed spectrum and avoided-crossing gap",
            Scenario::Dispersive => "Schrieffer-Wolff Lamb and dispersive shift table",
            Scenario::Rabi => "vacuum Rabi exchange traces with entanglement",
            Scenario::Modesplit => "semiclassical mode-splitting spectroscopy",
            Scenario::Numbersplit => "dispersive phonon-number splitting spectrum",
            Scenario::Encode => "conditional-displacement encoding trajectory",
            Scenario::Cat => "cat-state preparation with Wigner maps",
            Scenario::Force => "geometric-phase force sensing sweeps",
            Scenario::Transduce => "double-swap transduction or coherent optical readout",
            Scenario::Cool => "cold-bath cooling check and golden-rule rates",
        }
    }
}

fn default_n_charge() -> usize {
    20
}
fn default_n_fock() -> usize {
    60
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TransmonConfig {
    pub e_j1: f64,
    pub e_j2: f64,
    pub e_c: f64,
    #[serde(default = "default_n_charge")]
    pub n_charge: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FluxoniumConfig {
    pub e_j: f64,
    pub e_c: f64,
    pub e_l: f64,
    #[serde(default = "default_n_fock")]
    pub n_fock: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct QubitConfig {
    pub transmon: Option<TransmonConfig>,
    pub fluxonium: Option<FluxoniumConfig>,
}

impl QubitConfig {
    pub fn to_spec(&self) -> Result<hybridsim::circuits::QubitSpec, CliError> {
        match (&self.transmon, &self.fluxonium) {
            (Some(t), None) => Ok(hybridsim::circuits::QubitSpec::Transmon(
                hybridsim::circuits::TransmonParams {
                    e_j1: t.e_j1,
                    e_j2: t.e_j2,
                    e_c: t.e_c,
                    n_charge: t.n_charge,
                },
            )),
            (None, Some(f)) => Ok(hybridsim::circuits::QubitSpec::Fluxonium(
                hybridsim::circuits::FluxoniumParams {
                    e_j: f.e_j,
                    e_c: f.e_c,
                    e_l: f.e_l,
                    n_fock: f.n_fock,
                },
            )),
            (Some(_), Some(_)) => Err(CliError::Config(
                "qubit must specify exactly one of transmon/fluxonium, found both".into(),
            )),
            (None, None) => Err(CliError::Config(
                "qubit must specify one of transmon/fluxonium".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// "flux" or "gate_charge"
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub levels: Option<usize>,
    #[serde(default)]
    pub flux: f64,
    #[serde(default)]
    pub gate_charge: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CavityConfig {
    pub omega: f64,
    pub g: f64,
    #[serde(default)]
    pub level_cutoff: Option<usize>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MechConfig {
    pub omega_b: f64,
    pub dim: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    /// Charge-channel coupling in GHz.
    pub g: f64,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RatesConfig {
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub gamma_phi: f64,
    #[serde(default)]
    pub gamma_m: f64,
    #[serde(default)]
    pub n_th: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RabiConfig {
    pub flux_values: Vec<f64>,
    pub t_max: f64,
    pub points: usize,
    #[serde(default)]
    pub omega_r: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSplitConfig {
    pub omega_b: f64,
    pub omega_q: f64,
    pub g: f64,
    pub gamma_m: f64,
    pub gamma: f64,
    #[serde(default)]
    pub gamma_phi: f64,
    pub omega_r: f64,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SteadyConfig {
    #[serde(default)]
    pub step: Option<f64>,
    pub window: f64,
    pub tol: f64,
    pub max_time: f64,
    pub min_time: f64,
}

impl SteadyConfig {
    pub fn to_options(&self) -> hybridsim::dynamics::SteadyOptions {
        hybridsim::dynamics::SteadyOptions {
            step: self.step,
            window: self.window,
            tol: self.tol,
            max_time: self.max_time,
            min_time: self.min_time,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NumberSplitConfig {
    pub chi: f64,
    #[serde(default)]
    pub delta_m: f64,
    #[serde(default)]
    pub epsilon: f64,
    pub omega_r: f64,
    pub gamma: f64,
    pub gamma_b: f64,
    pub mech_dim: usize,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub steady: SteadyConfig,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct WignerConfig {
    pub half_extent: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EncodeConfig {
    pub g0: f64,
    pub t_max: f64,
    pub samples: usize,
    pub mech_dim: usize,
    #[serde(default)]
    pub wigner: Option<WignerConfig>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CatConfig {
    pub g0: f64,
    pub t: f64,
    pub mech_dim: usize,
    pub wigner: WignerConfig,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ForceConfig {
    pub g0: f64,
    pub seg_time: f64,
    pub eta_values: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TransduceConfig {
    /// "double_swap" or "coherent_readout"
    pub flavor: String,
    #[serde(default)]
    pub g_tm: f64,
    pub g_alpha: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub gamma_m: f64,
    #[serde(default)]
    pub kappa: f64,
    pub mech_dim: usize,
    pub cav_dim: usize,
    /// Encoded amplitude magnitude for the coherent_readout flavour.
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CoolConfig {
    pub omega_b: f64,
    pub g: f64,
    pub omega_rabi: f64,
    pub gamma: f64,
    pub gamma_m: f64,
    pub n_th: f64,
    pub mech_dim: usize,
    #[serde(default)]
    pub step: Option<f64>,
    /// Golden-rule rate table inputs.
    pub qubit_linewidth: f64,
    pub cavity_linewidth: f64,
    pub g_l: f64,
    pub g_o: f64,
    pub rate_points: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// Reserved for randomized property checks; all scenarios are
    /// deterministic.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub qubit: Option<QubitConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub cavity: Option<CavityConfig>,
    #[serde(default)]
    pub mech: Option<MechConfig>,
    #[serde(default)]
    pub coupling: Option<CouplingConfig>,
    #[serde(default)]
    pub rates: Option<RatesConfig>,
    #[serde(default)]
    pub rabi: Option<RabiConfig>,
    #[serde(default)]
    pub modesplit: Option<ModeSplitConfig>,
    #[serde(default)]
    pub numbersplit: Option<NumberSplitConfig>,
    #[serde(default)]
    pub encode: Option<EncodeConfig>,
    #[serde(default)]
    pub cat: Option<CatConfig>,
    #[serde(default)]
    pub force: Option<ForceConfig>,
    #[serde(default)]
    pub transduce: Option<TransduceConfig>,
    #[serde(default)]
    pub cool: Option<CoolConfig>,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| CliError::Config(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical serialized form used for fingerprinting.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn fingerprint(&self) -> String {
        // FNV-1a 64
        let mut hash: u64 = 0xcbf29ce484222325;
        for b in self.canonical().bytes() {
            hash ^= b as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
        format!("{hash:016x}")
    }

    fn require<'a, T>(
        opt: &'a Option<T>,
        field: &str,
        scenario: Scenario,
    ) -> Result<&'a T, CliError> {
        opt.as_ref().ok_or_else(|| {
            CliError::Config(format!(
                "missing required field [{field}] for scenario={}",
                scenario.name()
            ))
        })
    }

    fn check_nonneg(pairs: &[(&str, f64)]) -> Result<(), CliError> {
        for (name, v) in pairs {
            if *v < 0.0 || !v.is_finite() {
                return Err(CliError::Config(format!(
                    "field {name} = {v} must be finite and >= 0"
                )));
            }
        }
        Ok(())
    }

    fn check_positive(pairs: &[(&str, f64)]) -> Result<(), CliError> {
        for (name, v) in pairs {
            if !(*v > 0.0) || !v.is_finite() {
                return Err(CliError::Config(format!("field {name} = {v} must be > 0")));
            }
        }
        Ok(())
    }

    /// Scenario-specific required sections and physical-validity checks.
    pub fn validate(&self) -> Result<(), CliError> {
        let s = self.scenario;
        match s {
            Scenario::Spectrum => {
                let q = Self::require(&self.qubit, "qubit", s)?;
                q.to_spec()?;
                let sweep = Self::require(&self.sweep, "sweep", s)?;
                Self::validate_sweep(sweep)?;
            }
            Scenario::Avoided => {
                let q = Self::require(&self.qubit, "qubit", s)?;
                q.to_spec()?;
                let sweep = Self::require(&self.sweep, "sweep", s)?;
                Self::validate_sweep(sweep)?;
                let mech = Self::require(&self.mech, "mech", s)?;
                Self::check_positive(&[("mech.omega_b", mech.omega_b)])?;
                if mech.dim < 2 {
                    return Err(CliError::Config("mech.dim must be >= 2".into()));
                }
                let c = Self::require(&self.coupling, "coupling", s)?;
                Self::check_nonneg(&[("coupling.g", c.g)])?;
            }
            Scenario::Dispersive => {
                let q = Self::require(&self.qubit, "qubit", s)?;
                q.to_spec()?;
                let sweep = Self::require(&self.sweep, "sweep", s)?;
                Self::validate_sweep(sweep)?;
                let cav = Self::require(&self.cavity, "cavity", s)?;
                Self::check_positive(&[("cavity.omega", cav.omega)])?;
                Self::check_nonneg(&[("cavity.g", cav.g)])?;
            }
            Scenario::Rabi => {
                let q = Self::require(&self.qubit, "qubit", s)?;
                q.to_spec()?;
                let mech = Self::require(&self.mech, "mech", s)?;
                Self::check_positive(&[("mech.omega_b", mech.omega_b)])?;
                let c = Self::require(&self.coupling, "coupling", s)?;
                Self::check_nonneg(&[("coupling.g", c.g)])?;
                let r = Self::require(&self.rabi, "rabi", s)?;
                Self::check_positive(&[("rabi.t_max", r.t_max)])?;
                if r.flux_values.is_empty() {
                    return Err(CliError::Config(
                        "rabi.flux_values must be non-empty".into(),
                    ));
                }
                if let Some(rates) = &self.rates {
                    Self::check_nonneg(&[
                        ("rates.gamma", rates.gamma),
                        ("rates.gamma_phi", rates.gamma_phi),
                        ("rates.gamma_m", rates.gamma_m),
                        ("rates.n_th", rates.n_th),
                    ])?;
                }
            }
            Scenario::Modesplit => {
                let m = Self::require(&self.modesplit, "modesplit", s)?;
                Self::check_positive(&[
                    ("modesplit.omega_b", m.omega_b),
                    ("modesplit.omega_q", m.omega_q),
                    ("modesplit.omega_r", m.omega_r),
                ])?;
                Self::check_nonneg(&[
                    ("modesplit.g", m.g),
                    ("modesplit.gamma", m.gamma),
                    ("modesplit.gamma_m", m.gamma_m),
                    ("modesplit.gamma_phi", m.gamma_phi),
                ])?;
                if m.points < 2 {
                    return Err(CliError::Config("modesplit.points must be >= 2".into()));
                }
            }
            Scenario::Numbersplit => {
                let n = Self::require(&self.numbersplit, "numbersplit", s)?;
                Self::check_nonneg(&[
                    ("numbersplit.chi", n.chi),
                    ("numbersplit.epsilon", n.epsilon),
                    ("numbersplit.gamma", n.gamma),
                    ("numbersplit.gamma_b", n.gamma_b),
                ])?;
                if n.mech_dim < 2 {
                    return Err(CliError::Config("numbersplit.mech_dim must be >= 2".into()));
                }
            }
            Scenario::Encode => {
                let e = Self::require(&self.encode, "encode", s)?;
                Self::check_positive(&[("encode.t_max", e.t_max)])?;
                Self::check_nonneg(&[("encode.g0", e.g0)])?;
                if e.mech_dim < 2 {
                    return Err(CliError::Config("encode.mech_dim must be >= 2".into()));
                }
            }
            Scenario::Cat => {
                let c = Self::require(&self.cat, "cat", s)?;
                Self::check_positive(&[("cat.t", c.t), ("cat.g0", c.g0)])?;
                if c.mech_dim < 2 {
                    return Err(CliError::Config("cat.mech_dim must be >= 2".into()));
                }
            }
            Scenario::Force => {
                let f = Self::require(&self.force, "force", s)?;
                Self::check_positive(&[("force.g0", f.g0), ("force.seg_time", f.seg_time)])?;
                if f.eta_values.is_empty() {
                    return Err(CliError::Config(
                        "force.eta_values must be non-empty".into(),
                    ));
                }
            }
            Scenario::Transduce => {
                let t = Self::require(&self.transduce, "transduce", s)?;
                match t.flavor.as_str() {
                    "double_swap" => {
                        Self::check_positive(&[
                            ("transduce.g_tm", t.g_tm),
                            ("transduce.g_alpha", t.g_alpha),
                        ])?;
                    }
                    "coherent_readout" => {
                        Self::check_positive(&[
                            ("transduce.g_alpha", t.g_alpha),
                            ("transduce.amplitude", t.amplitude),
                        ])?;
                    }
                    other => {
                        return Err(CliError::Config(format!(
                            "transduce.flavor must be double_swap or coherent_readout, got {other}"
                        )))
                    }
                }
                Self::check_nonneg(&[
                    ("transduce.gamma", t.gamma),
                    ("transduce.gamma_m", t.gamma_m),
                    ("transduce.kappa", t.kappa),
                ])?;
                if t.mech_dim < 2 || t.cav_dim < 2 {
                    return Err(CliError::Config("transduce dims must be >= 2".into()));
                }
            }
            Scenario::Cool => {
                let c = Self::require(&self.cool, "cool", s)?;
                Self::check_positive(&[
                    ("cool.omega_b", c.omega_b),
                    ("cool.qubit_linewidth", c.qubit_linewidth),
                    ("cool.cavity_linewidth", c.cavity_linewidth),
                ])?;
                Self::check_nonneg(&[
                    ("cool.g", c.g),
                    ("cool.omega_rabi", c.omega_rabi),
                    ("cool.gamma", c.gamma),
                    ("cool.gamma_m", c.gamma_m),
                    ("cool.n_th", c.n_th),
                    ("cool.g_l", c.g_l),
                    ("cool.g_o", c.g_o),
                ])?;
                if c.mech_dim < 2 {
                    return Err(CliError::Config("cool.mech_dim must be >= 2".into()));
                }
            }
        }
        Ok(())
    }

    fn validate_sweep(sweep: &SweepConfig) -> Result<(), CliError> {
        match sweep.parameter.as_str() {
            "flux" | "gate_charge" => {}
            other => {
                return Err(CliError::Config(format!(
                    "sweep.parameter must be flux or gate_charge, got {other}"
                )))
            }
        }
        if sweep.points < 2 {
            return Err(CliError::Config("sweep.points must be >= 2".into()));
        }
        if let Some(levels) = sweep.levels {
            if levels == 0 {
                return Err(CliError::Config("sweep.levels must be >= 1".into()));
            }
        }
        Ok(())
    }
}
