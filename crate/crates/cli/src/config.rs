//! Job configuration: JSON in, validated config out. Unknown keys are
//! rejected and every error names the offending field.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use momidx_core::{
    geometric_symbol, GridSpec, LimitConfig, MatrixOracle, MeasureSpec, QuadratureConfig,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToeplitzSpec {
    /// Explicit symbol coefficients, order -> [re, im].
    #[serde(default)]
    pub coeffs: Option<BTreeMap<i64, [f64; 2]>>,
    /// Shortcut for the geometric family coeff(d) = (-a)^{|d|}, generated out
    /// to the order the job needs.
    #[serde(default)]
    pub geometric: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default)]
    pub zero_tol: Option<f64>,
    #[serde(default)]
    pub rel_stall_tol: Option<f64>,
    #[serde(default)]
    pub window: Option<usize>,
    #[serde(default)]
    pub quad_rel_tol: Option<f64>,
    #[serde(default)]
    pub initial_nodes: Option<usize>,
    #[serde(default)]
    pub max_nodes: Option<usize>,
}

impl Tolerances {
    pub fn limits(&self) -> LimitConfig {
        let mut cfg = LimitConfig::default();
        if let Some(v) = self.zero_tol {
            cfg.zero_tol = v;
        }
        if let Some(v) = self.rel_stall_tol {
            cfg.rel_stall_tol = v;
        }
        if let Some(v) = self.window {
            cfg.window = v;
        }
        cfg
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        let mut cfg = QuadratureConfig::default();
        if let Some(v) = self.quad_rel_tol {
            cfg.rel_tol = v;
        }
        if let Some(v) = self.initial_nodes {
            cfg.initial_nodes = v;
        }
        if let Some(v) = self.max_nodes {
            cfg.max_nodes = v;
        }
        cfg
    }
}

/// One job: a command, one matrix source, and command-specific knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    /// Optional; must agree with the CLI subcommand when present.
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default)]
    pub measure: Option<MeasureSpec>,
    #[serde(default)]
    pub toeplitz: Option<ToeplitzSpec>,
    /// Path to an explicit Hermitian matrix JSON file.
    #[serde(default)]
    pub matrix: Option<PathBuf>,
    /// Maximum truncation order.
    #[serde(default, alias = "N")]
    pub n: Option<usize>,
    #[serde(default)]
    pub z0: Option<[f64; 2]>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub alpha: Option<[f64; 2]>,
    #[serde(default)]
    pub beta: Option<[f64; 2]>,
    /// Max degree for the `moments` command (falls back to `n`).
    #[serde(default)]
    pub degrees: Option<usize>,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Accept density verdicts outside the verified curve hypothesis.
    #[serde(default)]
    pub applicability_override: Option<bool>,
    /// For `bpe`: also run the conjugation cross-check.
    #[serde(default)]
    pub crosscheck: Option<bool>,
}

impl JobConfig {
    pub fn parse(text: &str) -> anyhow::Result<JobConfig> {
        let cfg: JobConfig = serde_json::from_str(text).context("config error")?;
        Ok(cfg)
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances.clone().unwrap_or_default()
    }

    pub fn z0_complex(&self) -> Option<Complex64> {
        self.z0.map(|[re, im]| Complex64::new(re, im))
    }

    /// The truncation order for a command, after CLI override.
    pub fn order(&self, cli_max_order: Option<usize>, command: &str) -> anyhow::Result<usize> {
        match cli_max_order.or(self.n) {
            Some(n) if n >= 1 => Ok(n),
            Some(n) => bail!("config error at 'n': order must be >= 1, got {n}"),
            None => bail!("config error: '{command}' requires field 'n' (or --max-order)"),
        }
    }

    /// Build the matrix oracle from whichever source the config names.
    pub fn build_oracle(&self, order: usize) -> anyhow::Result<MatrixOracle> {
        let sources = [
            self.measure.is_some(),
            self.toeplitz.is_some(),
            self.matrix.is_some(),
        ]
        .iter()
        .filter(|x| **x)
        .count();
        if sources == 0 {
            bail!("config error: provide one of 'measure', 'toeplitz' or 'matrix'");
        }
        if sources > 1 {
            bail!("config error: fields 'measure', 'toeplitz' and 'matrix' are mutually exclusive");
        }
        if let Some(m) = &self.measure {
            return MatrixOracle::moment(m.clone(), self.tolerances().quadrature())
                .context("config error at 'measure'");
        }
        if let Some(t) = &self.toeplitz {
            let coeffs = match (&t.coeffs, t.geometric) {
                (Some(_), Some(_)) => {
                    bail!("config error at 'toeplitz': 'coeffs' and 'geometric' are mutually exclusive")
                }
                (Some(map), None) => map
                    .iter()
                    .map(|(&d, &[re, im])| (d, Complex64::new(re, im)))
                    .collect(),
                (None, Some(a)) => {
                    if !(a.abs() < 1.0) {
                        bail!("config error at 'toeplitz.geometric': |a| must be < 1");
                    }
                    geometric_symbol(a, order as i64)
                }
                (None, None) => {
                    bail!("config error at 'toeplitz': provide 'coeffs' or 'geometric'")
                }
            };
            return MatrixOracle::toeplitz_symbol(coeffs).context("config error at 'toeplitz'");
        }
        let path = self.matrix.as_ref().expect("checked above");
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("config error at 'matrix': cannot read {}", path.display()))?;
        MatrixOracle::explicit_from_json(&text).context("config error at 'matrix'")
    }

    /// The measure, for commands that require one.
    pub fn require_measure(&self, command: &str) -> anyhow::Result<&MeasureSpec> {
        self.measure
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("config error: '{command}' requires field 'measure'"))
    }

    pub fn require_z0(&self, command: &str) -> anyhow::Result<Complex64> {
        self.z0_complex()
            .ok_or_else(|| anyhow::anyhow!("config error: '{command}' requires field 'z0'"))
    }

    pub fn require_grid(&self, command: &str) -> anyhow::Result<&GridSpec> {
        self.grid
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("config error: '{command}' requires field 'grid'"))
    }

    pub fn require_affine(&self, command: &str) -> anyhow::Result<(Complex64, Complex64)> {
        let alpha = self
            .alpha
            .map(|[re, im]| Complex64::new(re, im))
            .ok_or_else(|| anyhow::anyhow!("config error: '{command}' requires field 'alpha'"))?;
        let beta = self.beta.map(|[re, im]| Complex64::new(re, im)).unwrap_or(Complex64::ZERO);
        Ok((alpha, beta))
    }
}
