//! JSON run configuration and the operators it names.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use gradcon_core::fock::{ladder_ops, number_op, shifted_hamiltonian, TruncOp};
use gradcon_core::seminorm::{Panel, SeminormIndex, Weight};

use crate::CliError;

/// One weight `s * x^i * e^(-p x)` of the seminorm panel.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub p: f64,
    #[serde(default)]
    pub i: u32,
    #[serde(default = "one")]
    pub s: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// `scale * N`.
    Number,
    /// `shift + N`.
    Shifted,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PanelConfig {
    pub generator: GeneratorKind,
    pub shift: f64,
    pub scale: f64,
    pub weights: Vec<WeightConfig>,
    pub grades: Vec<u32>,
}

impl Default for PanelConfig {
    fn default() -> Self {
        PanelConfig {
            generator: GeneratorKind::Shifted,
            shift: 4.0,
            scale: 1.0,
            weights: vec![
                WeightConfig { p: 0.5, i: 0, s: 1.0 },
                WeightConfig { p: 1.0, i: 0, s: 1.0 },
                WeightConfig { p: 2.0, i: 0, s: 1.0 },
            ],
            grades: vec![0, 1, 2, 3],
        }
    }
}

impl PanelConfig {
    pub fn generator_op(&self, dim: usize) -> TruncOp {
        match self.generator {
            GeneratorKind::Number => number_op(dim).scale(Complex64::new(self.scale, 0.0)),
            GeneratorKind::Shifted => shifted_hamiltonian(dim, self.shift),
        }
    }

    pub fn build(&self, dim: usize) -> Result<Panel, CliError> {
        let mut indices = Vec::new();
        for w in &self.weights {
            let weight = Weight::new(w.p, w.i, w.s)
                .map_err(|e| CliError::Config(format!("bad weight: {e}")))?;
            for &k in &self.grades {
                indices.push(SeminormIndex::new(weight, k));
            }
        }
        Panel::new(self.generator_op(dim), indices)
            .map_err(|e| CliError::Config(format!("bad panel: {e}")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum MapConfig {
    /// `x -> alpha G^left x G^right`.
    Sandwich {
        alpha: f64,
        #[serde(default)]
        left: u32,
        #[serde(default)]
        right: u32,
    },
    /// `x -> [G^power, x]`.
    Commutator { power: u32 },
}

impl Default for MapConfig {
    fn default() -> Self {
        MapConfig::Sandwich {
            alpha: 0.5,
            left: 0,
            right: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsKind {
    /// `phi(t) * 1`.
    ScalarIdentity,
    /// `phi(t) * X` for the configured probe.
    ScalarProbe,
    /// `phi(t) * G^lift * X`.
    LiftedProbe,
    /// `i [H, x]`.
    Heisenberg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    Annihilation,
    /// `a + a^dag`.
    Position,
    Number,
    Identity,
    Random,
    HermitianRandom,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub dim: usize,
    pub delta: f64,
    pub nodes: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub panel: PanelConfig,
    pub map: MapConfig,
    pub rhs: RhsKind,
    pub lift: u32,
    pub probe: ProbeKind,
    pub cutoffs: Vec<usize>,
    /// Real coefficients for the start-point construction; empty means the
    /// uniform choice `1 / #eligible`.
    pub coeffs: Vec<f64>,
    pub m: f64,
    pub l: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            dim: 32,
            delta: 1.0,
            nodes: 101,
            tol: 1e-8,
            max_iter: 200,
            panel: PanelConfig::default(),
            map: MapConfig::default(),
            rhs: RhsKind::Heisenberg,
            lift: 1,
            probe: ProbeKind::Annihilation,
            cutoffs: vec![8, 16, 32, 48],
            coeffs: Vec::new(),
            m: 1.0,
            l: 1.0,
        }
    }
}

impl Config {
    pub fn load(path: Option<&std::path::Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Config::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("invalid config: {e}")))
            }
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.dim < 2 {
            return Err(CliError::Config("dim must be at least 2".into()));
        }
        if !(self.delta > 0.0) {
            return Err(CliError::Config("delta must be positive".into()));
        }
        if self.nodes < 2 {
            return Err(CliError::Config("nodes must be at least 2".into()));
        }
        if !(self.tol > 0.0) {
            return Err(CliError::Config("tol must be positive".into()));
        }
        if self.panel.weights.is_empty() || self.panel.grades.is_empty() {
            return Err(CliError::Config("panel must have weights and grades".into()));
        }
        Ok(())
    }

    /// Materializes the configured probe; random kinds draw from the
    /// seeded generator, entries uniform in the complex unit disk.
    pub fn probe_op(&self, rng: &mut ChaCha8Rng) -> TruncOp {
        let dim = self.dim;
        match self.probe {
            ProbeKind::Annihilation => ladder_ops(dim).0,
            ProbeKind::Position => {
                let (a, adag) = ladder_ops(dim);
                a.add(&adag).expect("same dimension")
            }
            ProbeKind::Number => number_op(dim),
            ProbeKind::Identity => TruncOp::identity(dim),
            ProbeKind::Random => random_op(dim, rng),
            ProbeKind::HermitianRandom => {
                let x = random_op(dim, rng);
                let half = Complex64::new(0.5, 0.0);
                x.add(&x.adjoint()).expect("same dimension").scale(half)
            }
        }
    }
}

/// Dense operator with entries uniform in the complex unit disk.
pub fn random_op(dim: usize, rng: &mut ChaCha8Rng) -> TruncOp {
    let entries: Vec<Complex64> = (0..dim * dim)
        .map(|_| {
            let r = rng.gen_range(0.0f64..1.0).sqrt();
            let theta = rng.gen_range(0.0..core::f64::consts::TAU);
            Complex64::from_polar(r, theta)
        })
        .collect();
    TruncOp::new(dim, entries).expect("finite entries")
}
