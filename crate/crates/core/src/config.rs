//! Declarative run configuration (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem1d::{Boundary, FemSpace};
use crate::operators::{OperatorSuite, PotentialGraph, PotentialKind, ProblemKind, ScalarLaw};
use crate::rothe::{Field, LoadSpec};
use crate::stepper::SolverConfig;
use crate::study::{ManufacturedCase, Setup, StudyKind, StudyPlan};
use crate::timegrid::{GridKind, TimeGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProblemChoice {
    P1,
    P2,
    #[serde(rename = "manufactured")]
    Manufactured,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub kind: PotentialKind,
    #[serde(default = "one")]
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub elements: usize,
    pub boundary: Option<Boundary>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridChoice {
    Uniform,
    Geometric,
    Random,
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub kind: GridChoice,
    /// Number of steps; studies take theirs from `study.levels`.
    pub n: Option<usize>,
    #[serde(default = "one")]
    pub horizon: f64,
    pub ratio: Option<f64>,
    pub seed: Option<u64>,
    /// Ratio bound `τ_max ≤ D τ_min` of the refinement family.
    pub d: Option<f64>,
    pub steps: Option<Vec<f64>>,
}

impl GridConfig {
    /// Generator for the non-explicit grid kinds.
    pub fn kind(&self) -> Result<Option<GridKind>> {
        let forbid = |name: &str, set: bool| {
            if set {
                Err(Error::Config(format!("grid.{name} does not apply to grid kind {:?}", self.kind)))
            } else {
                Ok(())
            }
        };
        let need = |name: &str| Error::Config(format!("grid kind {:?} requires grid.{name}", self.kind));
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!("grid.horizon must be positive, got {}", self.horizon)));
        }
        Ok(match self.kind {
            GridChoice::Uniform => {
                forbid("ratio", self.ratio.is_some())?;
                forbid("seed", self.seed.is_some())?;
                forbid("steps", self.steps.is_some())?;
                Some(GridKind::Uniform)
            }
            GridChoice::Geometric => {
                forbid("seed", self.seed.is_some())?;
                forbid("steps", self.steps.is_some())?;
                Some(GridKind::Geometric { ratio: self.ratio.ok_or_else(|| need("ratio"))? })
            }
            GridChoice::Random => {
                forbid("ratio", self.ratio.is_some())?;
                forbid("steps", self.steps.is_some())?;
                Some(GridKind::Random { seed: self.seed.ok_or_else(|| need("seed"))?, d: self.d.ok_or_else(|| need("d"))? })
            }
            GridChoice::Explicit => {
                forbid("ratio", self.ratio.is_some())?;
                forbid("seed", self.seed.is_some())?;
                forbid("n", self.n.is_some())?;
                if self.steps.is_none() {
                    return Err(need("steps"));
                }
                None
            }
        })
    }

    pub fn build(&self) -> Result<TimeGrid> {
        match self.kind()? {
            Some(kind) => {
                let n = self.n.ok_or_else(|| Error::Config("missing field `grid.n`".into()))?;
                TimeGrid::build(&kind, n, self.horizon)
            }
            None => {
                let steps = self.steps.as_ref().expect("checked by kind");
                let grid = TimeGrid::from_steps(steps)?;
                if (grid.horizon() - self.horizon).abs() > 1e-12 * self.horizon {
                    return Err(Error::Config(format!(
                        "grid.steps sum to {} but grid.horizon is {}",
                        grid.horizon(),
                        self.horizon
                    )));
                }
                Ok(grid)
            }
        }
    }
}

/// A file holding at least a `[grid]` table; other tables are ignored.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct GridFile {
    pub grid: GridConfig,
}

impl GridFile {
    pub fn load(path: &Path) -> Result<TimeGrid> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let f: GridFile = toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        f.grid.build()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default)]
    pub u0: Field,
    #[serde(default)]
    pub v0: Field,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyChoice {
    Order,
    Cauchy,
    Audit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub kind: StudyChoice,
    pub levels: Vec<usize>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { samples: default_samples(), seed: 0 }
    }
}

fn one() -> f64 {
    1.0
}

fn default_samples() -> usize {
    200
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemChoice,
    pub p: Option<f64>,
    pub delta: Option<f64>,
    pub alpha: f64,
    pub g: Option<ScalarLaw>,
    pub potential: Option<PotentialConfig>,
    pub mesh: MeshConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    pub initial: Option<InitialConfig>,
    pub load: Option<LoadSpec>,
    pub output_dir: Option<PathBuf>,
    pub study: Option<StudyConfig>,
    #[serde(default)]
    pub check: CheckConfig,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Runs every constructor check without doing any numerical work.
    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        self.setup()?;
        self.grid_kind()?;
        if let Some(s) = &self.study {
            self.study_plan_for(s)?.validate()?;
        } else {
            self.time_grid()?;
        }
        Ok(())
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn setup(&self) -> Result<Setup> {
        if self.problem == ProblemChoice::Manufactured {
            let extra = [
                ("p", self.p.is_some()),
                ("delta", self.delta.is_some()),
                ("g", self.g.is_some()),
                ("potential", self.potential.is_some()),
                ("initial", self.initial.is_some()),
                ("load", self.load.is_some()),
                ("mesh.boundary", self.mesh.boundary.is_some()),
            ];
            if let Some((k, _)) = extra.iter().find(|(_, set)| *set) {
                return Err(Error::Config(format!("field `{k}` is fixed by the manufactured problem")));
            }
            let mut setup = ManufacturedCase::new(self.alpha, self.mesh.elements, self.solver.clone())?.setup;
            setup.horizon = self.grid.horizon;
            setup.d = self.ledger_d();
            return Ok(setup);
        }
        let need = |name: &str| Error::Config(format!("missing field `{name}`"));
        let p = self.p.ok_or_else(|| need("p"))?;
        let (kind, default_boundary) = match self.problem {
            ProblemChoice::P1 => (ProblemKind::Boundary, Boundary::LeftClamped),
            _ => (ProblemKind::Domain, Boundary::BothClamped),
        };
        let space = FemSpace::uniform(self.mesh.elements, p, self.mesh.boundary.unwrap_or(default_boundary))?;
        let pot = self.potential.as_ref().ok_or_else(|| need("potential"))?;
        if !(pot.scale > 0.0 && pot.scale.is_finite()) {
            return Err(Error::Config(format!("potential.scale must be positive, got {}", pot.scale)));
        }
        let suite = OperatorSuite::new(
            kind,
            space,
            self.alpha,
            self.g.ok_or_else(|| need("g"))?,
            self.delta.unwrap_or(0.0),
            PotentialGraph::builtin(pot.kind).scaled(pot.scale),
        )?;
        let init = self.initial.clone().unwrap_or_default();
        let setup = Setup {
            suite,
            u0: init.u0,
            v0: init.v0,
            load: self.load.unwrap_or_default(),
            solver: self.solver.clone(),
            horizon: self.grid.horizon,
            d: self.ledger_d(),
        };
        setup.u0.interpolate(&setup.suite.space)?;
        setup.v0.interpolate(&setup.suite.space)?;
        Ok(setup)
    }

    fn ledger_d(&self) -> f64 {
        self.grid.d.unwrap_or(1.0)
    }

    pub fn grid_kind(&self) -> Result<Option<GridKind>> {
        self.grid.kind()
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        self.grid.build()
    }

    pub fn study_plan(&self) -> Result<StudyPlan> {
        let s = self.study.as_ref().ok_or_else(|| Error::Config("missing [study] block".into()))?;
        self.study_plan_for(s)
    }

    fn study_plan_for(&self, s: &StudyConfig) -> Result<StudyPlan> {
        let grid = self
            .grid_kind()?
            .ok_or_else(|| Error::Config("studies need a generated grid kind, not explicit steps".into()))?;
        if self.grid.n.is_some() {
            return Err(Error::Config("grid.n is set by study.levels".into()));
        }
        let kind = match s.kind {
            StudyChoice::Order => StudyKind::Order,
            StudyChoice::Cauchy => StudyKind::Cauchy,
            StudyChoice::Audit => StudyKind::Audit,
        };
        if kind == StudyKind::Order && self.problem != ProblemChoice::Manufactured {
            return Err(Error::Config("order studies need problem = \"manufactured\"".into()));
        }
        let plan = StudyPlan {
            kind,
            levels: s.levels.clone(),
            grid,
            setup: self.setup()?,
            alpha: self.alpha,
            samples: s.samples,
            seed: s.seed,
        };
        plan.validate()?;
        Ok(plan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P1: &str = r#"
problem = "P1"
p = 3.0
delta = 0.2
alpha = 2.0
g = { kind = "arctan" }
potential = { kind = "jump" }
mesh = { elements = 20 }
grid = { kind = "uniform", n = 8 }
"#;

    #[test]
    fn minimal_p1_parses() {
        let c = RunConfig::parse(P1).unwrap();
        let s = c.setup().unwrap();
        assert_eq!(s.suite.space.boundary(), Boundary::LeftClamped);
        assert_eq!(c.time_grid().unwrap().len(), 8);
        assert_eq!(c.solver, SolverConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let err = RunConfig::parse(&format!("{P1}\nbogus = 1\n")).unwrap_err().to_string();
        assert!(err.contains("bogus"), "{err}");
        let err = RunConfig::parse(&P1.replace("n = 8", "n = 8, foo = 2")).unwrap_err().to_string();
        assert!(err.contains("foo") && err.contains("line"), "{err}");
    }

    #[test]
    fn precondition_failures_are_config_errors() {
        for bad in [
            P1.replace("delta = 0.2", "delta = 0.9"),
            P1.replace("alpha = 2.0", "alpha = -1.0"),
            P1.replace("elements = 20", "elements = 20, boundary = \"both_clamped\""),
            P1.replace("n = 8", "n = 8, ratio = 2.0"),
            P1.replace("kind = \"uniform\", n = 8", "kind = \"random\", n = 8"),
            P1.replace("g = { kind = \"arctan\" }", "g = { kind = \"identity\" }"),
        ] {
            assert!(matches!(RunConfig::parse(&bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn manufactured_fixes_the_laws() {
        let m = "problem = \"manufactured\"\nalpha = 1.0\nmesh = { elements = 10 }\ngrid = { kind = \"uniform\", n = 4 }\n";
        let c = RunConfig::parse(m).unwrap();
        assert_eq!(c.setup().unwrap().suite.g, ScalarLaw::Identity);
        assert!(RunConfig::parse(&format!("p = 2.0\n{m}")).is_err());
    }

    #[test]
    fn explicit_steps_must_reach_horizon() {
        let e = P1.replace("grid = { kind = \"uniform\", n = 8 }", "grid = { kind = \"explicit\", steps = [0.1, 0.2, 0.3], horizon = 0.6 }");
        assert!((RunConfig::parse(&e).unwrap().time_grid().unwrap().sigma() - 0.04 / 1.5).abs() < 1e-12);
        assert!(RunConfig::parse(&e.replace("0.6", "1.0")).is_err());
    }

    #[test]
    fn study_block_takes_levels() {
        let s = P1.replace(", n = 8", "") + "study = { kind = \"cauchy\", levels = [4, 8] }\n";
        let plan = RunConfig::parse(&s).unwrap().study_plan().unwrap();
        assert_eq!(plan.levels, vec![4, 8]);
        assert!(RunConfig::parse(&(P1.to_string() + "study = { kind = \"cauchy\", levels = [4, 8] }\n")).is_err());
        assert!(RunConfig::parse(&P1.replace(", n = 8", "")).is_err());
    }
}
