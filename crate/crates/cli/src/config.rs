//! Flat JSON run configuration; command-line flags override file values.

use serde::Deserialize;

use pt_fano::DimerParams;

/// Every key the config file may carry. Unknown keys are rejected so typos
/// fail loudly instead of silently running defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(rename = "E")]
    pub e: Option<f64>,
    pub gamma0: Option<f64>,
    pub gamma2: Option<f64>,
    pub chi: Option<f64>,
    #[serde(rename = "V")]
    pub v: Option<f64>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub seed: Option<u64>,
    pub n_starts: Option<usize>,
    pub omega: Option<f64>,
    pub pin: Option<f64>,
    pub eps: Option<f64>,
    pub n_sites: Option<usize>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub ramp_time: Option<f64>,
    pub absorber_width: Option<usize>,
    pub absorber_max: Option<f64>,
    pub sample_stride: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &str) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {path}: {e}"))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {path}: {e}"))
    }
}

/// Dimer constants after merging defaults, config file, and flags.
#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub e: f64,
    pub gamma0: f64,
    pub gamma2: f64,
    pub chi: f64,
    pub v: f64,
    pub c: f64,
}

impl Default for ParamSpec {
    /// The side-coupled dimer of the headline intensity sweeps.
    fn default() -> Self {
        Self {
            e: 0.1,
            gamma0: 0.01,
            gamma2: 1e-4,
            chi: 0.0,
            v: 0.2,
            c: 1.0,
        }
    }
}

impl ParamSpec {
    pub fn apply_file(&mut self, f: &FileConfig) {
        if let Some(x) = f.e {
            self.e = x;
        }
        if let Some(x) = f.gamma0 {
            self.gamma0 = x;
        }
        if let Some(x) = f.gamma2 {
            self.gamma2 = x;
        }
        if let Some(x) = f.chi {
            self.chi = x;
        }
        if let Some(x) = f.v {
            self.v = x;
        }
        if let Some(x) = f.c {
            self.c = x;
        }
    }

    pub fn build(&self) -> Result<DimerParams, pt_fano::Error> {
        DimerParams::new(self.e, self.gamma0, self.gamma2, self.chi, self.v, self.c)
    }
}

/// Seed precedence: explicit flag, then config file, then PT_FANO_SEED, then 0.
pub fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> u64 {
    flag.or(file)
        .or_else(|| {
            std::env::var("PT_FANO_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0)
}
