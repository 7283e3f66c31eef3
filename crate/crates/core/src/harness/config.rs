//! Experiment configuration: flat `key = value` text with one section per
//! experiment, overridable from the command line.

use crate::error::{Error, Result};
use crate::physics::FluxMode;
use crate::refelem::QuadMode;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// The experiment catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentId {
    OpsCheck,
    FluxCheck,
    EntropyWave,
    Pulse1d,
    Sod,
    SineShock,
    Pulse2d,
    Vortex,
    Riemann2d,
    ProjectionStudy,
    BurgersEquivalence,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 11] = [
        ExperimentId::OpsCheck,
        ExperimentId::FluxCheck,
        ExperimentId::EntropyWave,
        ExperimentId::Pulse1d,
        ExperimentId::Sod,
        ExperimentId::SineShock,
        ExperimentId::Pulse2d,
        ExperimentId::Vortex,
        ExperimentId::Riemann2d,
        ExperimentId::ProjectionStudy,
        ExperimentId::BurgersEquivalence,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentId::OpsCheck => "ops-check",
            ExperimentId::FluxCheck => "flux-check",
            ExperimentId::EntropyWave => "entropy-wave",
            ExperimentId::Pulse1d => "pulse-1d",
            ExperimentId::Sod => "sod",
            ExperimentId::SineShock => "sine-shock",
            ExperimentId::Pulse2d => "pulse-2d",
            ExperimentId::Vortex => "vortex",
            ExperimentId::Riemann2d => "riemann-2d",
            ExperimentId::ProjectionStudy => "projection-study",
            ExperimentId::BurgersEquivalence => "burgers-equivalence",
        }
    }
}

impl FromStr for ExperimentId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .iter()
            .find(|e| e.name() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// A fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub id: ExperimentId,
    pub n_values: Vec<usize>,
    pub k_values: Vec<usize>,
    pub cfl_values: Vec<f64>,
    pub quads: Vec<QuadMode>,
    pub flux: FluxMode,
    pub t_final: f64,
    pub eps_log: f64,
    pub output_every: usize,
    pub out_dir: PathBuf,
    pub threads: usize,
    pub dump: bool,
}

impl ExperimentSpec {
    /// Documented defaults of each experiment (gamma = 1.4 is a physics
    /// constant; eps_log = 1e-4 and CFL = 0.125 are the global defaults).
    pub fn defaults(id: ExperimentId) -> Self {
        let base = ExperimentSpec {
            id,
            n_values: vec![4],
            k_values: vec![16],
            cfl_values: vec![0.125],
            quads: vec![QuadMode::GaussNp2],
            flux: FluxMode::EntropyStableLf,
            t_final: 0.0,
            eps_log: 1e-4,
            output_every: 10,
            out_dir: PathBuf::from("out"),
            threads: 1,
            dump: false,
        };
        match id {
            ExperimentId::OpsCheck | ExperimentId::FluxCheck => base,
            ExperimentId::EntropyWave => ExperimentSpec {
                n_values: (1..=5).collect(),
                k_values: vec![4, 8, 16, 32, 64],
                quads: vec![QuadMode::Gll, QuadMode::GaussNp2],
                t_final: 0.7,
                ..base
            },
            ExperimentId::Pulse1d => ExperimentSpec {
                n_values: vec![4],
                k_values: vec![16],
                cfl_values: vec![0.5, 0.25, 0.125, 0.0625],
                flux: FluxMode::EntropyConservative,
                t_final: 2.0,
                output_every: 1,
                ..base
            },
            ExperimentId::Sod => ExperimentSpec {
                k_values: vec![32],
                t_final: 0.2,
                output_every: 20,
                ..base
            },
            ExperimentId::SineShock => ExperimentSpec {
                k_values: vec![40],
                cfl_values: vec![0.05],
                t_final: 1.8,
                output_every: 50,
                ..base
            },
            ExperimentId::Pulse2d => ExperimentSpec {
                n_values: vec![3, 4],
                k_values: vec![8],
                cfl_values: vec![0.5, 0.25, 0.125],
                quads: vec![QuadMode::Tri2N],
                flux: FluxMode::EntropyConservative,
                t_final: 2.0,
                output_every: 5,
                ..base
            },
            ExperimentId::Vortex => ExperimentSpec {
                n_values: vec![1, 2],
                k_values: vec![8, 16, 32],
                quads: vec![QuadMode::Tri2N],
                t_final: 5.0,
                output_every: 100,
                ..base
            },
            ExperimentId::Riemann2d => ExperimentSpec {
                n_values: vec![3],
                k_values: vec![32],
                cfl_values: vec![0.0625],
                quads: vec![QuadMode::Tri2N],
                t_final: 0.25,
                output_every: 20,
                ..base
            },
            ExperimentId::ProjectionStudy => ExperimentSpec {
                n_values: (1..=5).collect(),
                k_values: vec![8, 16, 32, 64, 128],
                ..base
            },
            ExperimentId::BurgersEquivalence => ExperimentSpec {
                n_values: (1..=5).collect(),
                k_values: vec![8],
                quads: vec![QuadMode::Gll, QuadMode::GaussNp1],
                ..base
            },
        }
    }

    /// Canonical `key = value` emission; re-parsing it reproduces the spec.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("[{}]\n", self.id.name()));
        let join_usize = |v: &[usize]| {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        };
        s.push_str(&format!("n = {}\n", join_usize(&self.n_values)));
        s.push_str(&format!("k = {}\n", join_usize(&self.k_values)));
        s.push_str(&format!(
            "cfl = {}\n",
            self.cfl_values
                .iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(",")
        ));
        s.push_str(&format!(
            "quad = {}\n",
            self.quads.iter().map(|q| q.label()).collect::<Vec<_>>().join(",")
        ));
        s.push_str(&format!("flux = {}\n", self.flux.label()));
        s.push_str(&format!("t-final = {}\n", self.t_final));
        s.push_str(&format!("eps-log = {}\n", self.eps_log));
        s.push_str(&format!("output-every = {}\n", self.output_every));
        s.push_str(&format!("out = {}\n", self.out_dir.display()));
        s.push_str(&format!("threads = {}\n", self.threads));
        s.push_str(&format!("dump = {}\n", self.dump));
        s
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let parse_list_usize = |v: &str| -> Result<Vec<usize>> {
            v.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Config(format!("bad integer `{t}` for key `{key}`")))
                })
                .collect()
        };
        match key {
            "n" => self.n_values = parse_list_usize(value)?,
            "k" => self.k_values = parse_list_usize(value)?,
            "cfl" => {
                self.cfl_values = value
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Config(format!("bad number `{t}` for key `cfl`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
            }
            "quad" => {
                self.quads = value
                    .split(',')
                    .map(|t| t.trim().parse::<QuadMode>())
                    .collect::<Result<Vec<_>>>()?;
            }
            "flux" => self.flux = value.trim().parse()?,
            "t-final" => {
                self.t_final = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad number `{value}` for key `t-final`")))?;
            }
            "eps-log" => {
                self.eps_log = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad number `{value}` for key `eps-log`")))?;
            }
            "output-every" => {
                self.output_every = value.trim().parse().map_err(|_| {
                    Error::Config(format!("bad integer `{value}` for key `output-every`"))
                })?;
            }
            "out" => self.out_dir = PathBuf::from(value.trim()),
            "threads" => {
                self.threads = value.trim().parse().map_err(|_| {
                    Error::Config(format!("bad integer `{value}` for key `threads`"))
                })?;
            }
            "dump" => {
                self.dump = value.trim().parse().map_err(|_| {
                    Error::Config(format!("bad boolean `{value}` for key `dump`"))
                })?;
            }
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Range validation shared by file and flag input.
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() || self.k_values.is_empty() || self.cfl_values.is_empty() {
            return Err(Error::Config("sweep lists must be non-empty".into()));
        }
        if self.n_values.iter().any(|&n| n == 0 || n > 6) {
            return Err(Error::Config("polynomial degree must be in 1..=6".into()));
        }
        if self.k_values.iter().any(|&k| k == 0) {
            return Err(Error::Config("element counts must be positive".into()));
        }
        if self.cfl_values.iter().any(|&c| !(c > 0.0)) {
            return Err(Error::Config("CFL values must be positive".into()));
        }
        if !(self.t_final >= 0.0) {
            return Err(Error::Config("t-final must be nonnegative".into()));
        }
        if !(self.eps_log > 0.0) {
            return Err(Error::Config("eps-log must be positive".into()));
        }
        if self.threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }
}

/// Parse a config file. Sections name experiments; keys before any section
/// apply to every experiment. Returns the spec of `experiment`, seeded from
/// its defaults.
pub fn parse_config(path: &Path, experiment: ExperimentId) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text, experiment)
}

/// Parse config text (see [`parse_config`]).
pub fn parse_config_str(text: &str, experiment: ExperimentId) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::defaults(experiment);
    let mut in_section: Option<String> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            // validate the section name even when it is not ours
            let _ = name.trim().parse::<ExperimentId>()?;
            in_section = Some(name.trim().to_string());
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected `key = value`, got `{line}`",
                lineno + 1
            )));
        };
        let applies = match &in_section {
            None => true,
            Some(name) => name == experiment.name(),
        };
        if applies {
            spec.apply(key.trim(), value.trim())?;
        } else {
            // still validate keys in other sections so typos surface early
            let mut scratch = ExperimentSpec::defaults(experiment);
            scratch.apply(key.trim(), value.trim())?;
        }
    }
    spec.validate()?;
    Ok(spec)
}
