//! Experiment configuration files (TOML).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use num_complex::Complex64 as C64;
use polya_core::domains::{CompactFamily, CompactSet, FamilyDirection};
use polya_core::functionals::{coeffs_closed_form, coeffs_from_contour, coeffs_from_measure, ClosedForm, Germ, GermCoefficients};
use polya_core::measures::{Measure, Precision};
use polya_core::vandermonde::SearchStrategy;
use polya_core::Point;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Tdiam,
    Fekete,
    Hankel,
    PolyaCheck,
    Sharpness,
    Stability,
    BmRatio,
    ZsCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Tdiam => "tdiam",
            ExperimentKind::Fekete => "fekete",
            ExperimentKind::Hankel => "hankel",
            ExperimentKind::PolyaCheck => "polya-check",
            ExperimentKind::Sharpness => "sharpness",
            ExperimentKind::Stability => "stability",
            ExperimentKind::BmRatio => "bm-ratio",
            ExperimentKind::ZsCheck => "zs-check",
        }
    }
}

/// A complex number written either as a real number or as `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cx {
    Real(f64),
    Pair([f64; 2]),
}

impl Default for Cx {
    fn default() -> Self {
        Cx::Real(0.0)
    }
}

impl Cx {
    pub fn value(self) -> C64 {
        match self {
            Cx::Real(x) => C64::new(x, 0.0),
            Cx::Pair([re, im]) => C64::new(re, im),
        }
    }
}

fn point(p: &[Cx]) -> Point {
    p.iter().map(|z| z.value()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SetSpec {
    Interval { a: f64, b: f64 },
    Circle { #[serde(default)] center: Cx, radius: f64 },
    Disk { #[serde(default)] center: Cx, radius: f64 },
    Finite { points: Vec<Vec<Cx>> },
    Box { bounds: Vec<[f64; 2]> },
    Polydisk { discs: Vec<Disc> },
    Product { factors: Vec<SetSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disc {
    #[serde(default)]
    pub center: Cx,
    pub radius: f64,
}

impl SetSpec {
    pub fn build(&self) -> anyhow::Result<CompactSet> {
        Ok(match self {
            SetSpec::Interval { a, b } => CompactSet::interval(*a, *b)?,
            SetSpec::Circle { center, radius } => CompactSet::circle(center.value(), *radius)?,
            SetSpec::Disk { center, radius } => CompactSet::disk(center.value(), *radius)?,
            SetSpec::Finite { points } => CompactSet::finite(points.iter().map(|p| point(p)).collect())?,
            SetSpec::Box { bounds } => CompactSet::real_box(&bounds.iter().map(|b| (b[0], b[1])).collect::<Vec<_>>())?,
            SetSpec::Polydisk { discs } => {
                CompactSet::polydisk(&discs.iter().map(|d| (d.center.value(), d.radius)).collect::<Vec<_>>())?
            }
            SetSpec::Product { factors } => {
                CompactSet::product(factors.iter().map(|f| f.build()).collect::<anyhow::Result<_>>()?)?
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasureSpec {
    Arcsine { a: f64, b: f64 },
    UniformCircle { #[serde(default)] center: Cx, radius: f64 },
    LebesgueInterval { a: f64, b: f64 },
    LebesgueDisk { #[serde(default)] center: Cx, radius: f64 },
    LebesgueBox { bounds: Vec<[f64; 2]> },
    Product { factors: Vec<MeasureSpec> },
    Discrete { atoms: Vec<Vec<Cx>>, weights: Vec<f64> },
    PointMass { at: Vec<Cx> },
}

impl MeasureSpec {
    pub fn build(&self) -> anyhow::Result<Measure> {
        Ok(match self {
            MeasureSpec::Arcsine { a, b } => Measure::arcsine(*a, *b)?,
            MeasureSpec::UniformCircle { center, radius } => Measure::uniform_circle(center.value(), *radius)?,
            MeasureSpec::LebesgueInterval { a, b } => Measure::lebesgue_interval(*a, *b)?,
            MeasureSpec::LebesgueDisk { center, radius } => Measure::lebesgue_disk(center.value(), *radius)?,
            MeasureSpec::LebesgueBox { bounds } => {
                Measure::lebesgue_box(&bounds.iter().map(|b| (b[0], b[1])).collect::<Vec<_>>())?
            }
            MeasureSpec::Product { factors } => {
                Measure::product(factors.iter().map(|f| f.build()).collect::<anyhow::Result<_>>()?)?
            }
            MeasureSpec::Discrete { atoms, weights } => {
                Measure::discrete(atoms.iter().map(|p| point(p)).collect(), weights.clone())?
            }
            MeasureSpec::PointMass { at } => Measure::point_mass(point(at))?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GermSpec {
    /// `∏ 1/(z_ν - c_ν)`.
    Geometric { center: Vec<Cx> },
    /// Cauchy transform of a discrete measure.
    Cauchy { atoms: Vec<Vec<Cx>>, weights: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionalSpec {
    PointMass { at: Vec<Cx> },
    Geometric { center: Vec<Cx> },
    Measure { measure: MeasureSpec },
    Contour { germ: GermSpec, radius: f64, order: usize },
}

impl FunctionalSpec {
    pub fn build(&self) -> anyhow::Result<GermCoefficients> {
        Ok(match self {
            FunctionalSpec::PointMass { at } => coeffs_closed_form(ClosedForm::PointMass(point(at))),
            FunctionalSpec::Geometric { center } => coeffs_closed_form(ClosedForm::Geometric(point(center))),
            FunctionalSpec::Measure { measure } => coeffs_from_measure(measure.build()?),
            FunctionalSpec::Contour { germ, radius, order } => {
                let germ = match germ {
                    GermSpec::Geometric { center } => Germ::Geometric { center: point(center) },
                    GermSpec::Cauchy { atoms, weights } => {
                        Germ::Cauchy { atoms: atoms.iter().map(|p| point(p)).collect(), weights: weights.clone() }
                    }
                };
                coeffs_from_contour(germ, *radius, *order)?
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Outer,
    Inner,
    Constant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub direction: Direction,
    /// First member; inner families of small sets need `j_min > 1`.
    #[serde(default = "one")]
    pub j_min: u32,
    #[serde(default = "default_j_max")]
    pub j_max: u32,
}

fn default_j_max() -> u32 {
    64
}

impl FamilySpec {
    pub fn build(&self, base: CompactSet) -> CompactFamily {
        let direction = match self.direction {
            Direction::Outer => FamilyDirection::Outer,
            Direction::Inner => FamilyDirection::Inner,
            Direction::Constant => FamilyDirection::Constant,
        };
        CompactFamily::new(base, direction)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Degrees {
    #[serde(default = "one")]
    pub min: u32,
    #[serde(default = "default_max_degree")]
    pub max: u32,
    /// Explicit list; overrides `min..=max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<u32>>,
}

fn one() -> u32 {
    1
}

fn default_max_degree() -> u32 {
    6
}

impl Default for Degrees {
    fn default() -> Self {
        Self { min: 1, max: default_max_degree(), values: None }
    }
}

impl Degrees {
    pub fn list(&self) -> Vec<u32> {
        match &self.values {
            Some(v) => v.clone(),
            None => (self.min..=self.max).collect(),
        }
    }

    pub fn top(&self) -> u32 {
        self.list().into_iter().max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    pub greedy_leja: bool,
    pub exchange: bool,
    pub restarts: usize,
    pub pool_size: usize,
    pub max_passes: usize,
    pub tol: f64,
    pub refine: bool,
}

impl Default for SearchSpec {
    fn default() -> Self {
        let s = SearchStrategy::default();
        Self {
            greedy_leja: s.greedy_leja,
            exchange: s.exchange,
            restarts: s.restarts,
            pool_size: s.pool_size,
            max_passes: s.max_passes,
            tol: s.tol,
            refine: s.refine,
        }
    }
}

impl SearchSpec {
    pub fn strategy(&self) -> SearchStrategy {
        SearchStrategy {
            greedy_leja: self.greedy_leja,
            exchange: self.exchange,
            restarts: self.restarts,
            pool_size: self.pool_size,
            max_passes: self.max_passes,
            tol: self.tol,
            refine: self.refine,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrecisionSpec {
    #[default]
    Auto,
    Float,
    Exact,
}

impl PrecisionSpec {
    pub fn precision(self) -> Precision {
        match self {
            PrecisionSpec::Auto => Precision::Auto,
            PrecisionSpec::Float => Precision::Float,
            PrecisionSpec::Exact => Precision::Exact,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: default_out_dir(), format: OutputFormat::Both }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed excess of `D_i` over the `d_s` estimate.
    pub slack: f64,
    /// Allowed gap between the Gram and Hankel routes to `log Z_s`.
    pub identity: f64,
    /// Allowed gap between a stability row and its scaling-law prediction.
    pub stability: f64,
    /// Monte Carlo agreement in standard errors.
    pub sigmas: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { slack: 0.05, identity: 1e-10, stability: 1e-3, sigmas: 3.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub id: String,
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    pub set: SetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<FunctionalSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub degrees: Degrees,
    /// Largest Hankel size; defaults to `m_s` for the top degree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i_max: Option<usize>,
    /// Degrees above this use the moment estimate of `d_s` instead of a
    /// Fekete search.
    #[serde(default = "default_fekete_s_max")]
    pub fekete_s_max: u32,
    #[serde(default)]
    pub search: SearchSpec,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Grid points per parameter axis for the Bernstein–Markov ratio;
    /// defaults to about 4096 points in total.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_per_axis: Option<usize>,
    #[serde(default)]
    pub precision: PrecisionSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_fekete_s_max() -> u32 {
    30
}

fn default_samples() -> usize {
    100_000
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            bail!("unsupported schema_version {} (expected {SCHEMA_VERSION})", self.schema_version);
        }
        if self.id.is_empty() || self.id.contains(['/', '\\']) {
            bail!("id must be a non-empty file stem, got {:?}", self.id);
        }
        let degrees = self.degrees.list();
        if degrees.is_empty() {
            bail!("degree range is empty");
        }
        let k = self.set.build()?;
        if let Some(m) = &self.measure {
            let m = m.build()?;
            if m.dim() != k.dim() {
                bail!("measure has dimension {} but the set has dimension {}", m.dim(), k.dim());
            }
        }
        if let Some(f) = &self.functional {
            let f = f.build()?;
            if f.dim() != k.dim() {
                bail!("functional has dimension {} but the set has dimension {}", f.dim(), k.dim());
            }
        }
        let needs = |what: &str, ok: bool| if ok { Ok(()) } else { Err(anyhow::anyhow!("{} needs {what}", self.experiment.name())) };
        match self.experiment {
            ExperimentKind::Tdiam | ExperimentKind::Fekete => {
                if degrees.contains(&0) {
                    bail!("degree 0 has no transfinite-diameter estimate");
                }
            }
            ExperimentKind::Hankel | ExperimentKind::PolyaCheck => {
                needs("a functional or a measure", self.functional.is_some() || self.measure.is_some())?
            }
            ExperimentKind::Sharpness | ExperimentKind::BmRatio | ExperimentKind::ZsCheck => needs("a measure", self.measure.is_some())?,
            ExperimentKind::Stability => {
                needs("a family", self.family.is_some())?;
                let f = self.family.as_ref().unwrap();
                if f.j_min == 0 || f.j_min > f.j_max {
                    bail!("family range {}..={} is empty or starts at 0", f.j_min, f.j_max);
                }
            }
        }
        if self.samples == 0 {
            bail!("samples must be positive");
        }
        Ok(())
    }

    pub fn compact_set(&self) -> anyhow::Result<CompactSet> {
        self.set.build()
    }

    pub fn measure(&self) -> anyhow::Result<Option<Measure>> {
        self.measure.as_ref().map(|m| m.build()).transpose()
    }

    /// The functional under test: the configured one, else the measure.
    pub fn coefficients(&self) -> anyhow::Result<GermCoefficients> {
        match (&self.functional, &self.measure) {
            (Some(f), _) => f.build(),
            (None, Some(m)) => Ok(coeffs_from_measure(m.build()?)),
            (None, None) => bail!("no functional or measure configured"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
id = "demo"
experiment = "polya-check"
seed = 3

[set]
kind = "circle"
radius = 1

[functional]
kind = "contour"
radius = 2.0
order = 64
germ = { kind = "geometric", center = [0.3] }

[degrees]
max = 4
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(cfg.degrees.list(), vec![1, 2, 3, 4]);
        assert_eq!(cfg.tolerances.slack, 0.05);
        let again = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn complex_values() {
        let cfg = ExperimentConfig::from_toml(&SAMPLE.replace("center = [0.3]", "center = [[0.3, -0.5]]")).unwrap();
        let Some(FunctionalSpec::Contour { germ: GermSpec::Geometric { center }, .. }) = &cfg.functional else { panic!() };
        assert_eq!(center[0].value(), C64::new(0.3, -0.5));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_toml(&SAMPLE.replace("seed = 3", "seed = 3\nbogus = 1")).is_err());
        assert!(ExperimentConfig::from_toml(&SAMPLE.replace("radius = 1\n", "radius = -1\n")).is_err());
        assert!(ExperimentConfig::from_toml(&SAMPLE.replace("center = [0.3]", "center = [0.3, 0.1]")).is_err());
        assert!(ExperimentConfig::from_toml(&SAMPLE.replace("polya-check", "sharpness")).is_err());
    }
}
