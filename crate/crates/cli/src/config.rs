//! Run configuration from a flat `key = value` file overlaid with flags.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};

use o3flow::benchmarks::{default_weissenberg_grid, MeshResolution, Method, ProblemKind, ProblemSpec};
use o3flow::forms::{Model, ModelParams};
use o3flow::mesh::BoundaryTag;

/// Keys accepted in a config file; flags use the same names.
pub const KEYS: &[&str] = &[
    "problem",
    "method",
    "eta0",
    "lambda1",
    "mu1",
    "model",
    "a",
    "U",
    "n",
    "h",
    "mesh-file",
    "tol",
    "max-iter",
    "supg",
    "out",
    "refined",
    "meshes",
    "grid",
    "lambdas",
    "repeats",
    "stop-after",
];

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<o3flow::Error> for ConfigError {
    fn from(e: o3flow::Error) -> Self {
        ConfigError(e.to_string())
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError(msg.into()))
}

/// Where the mesh comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum MeshSource {
    Generated(MeshResolution),
    File(PathBuf),
}

/// How λ₁ and μ₁ relate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Relaxation {
    Mu1(f64),
    Model(Model),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub method: Method,
    pub eta0: f64,
    pub lambda1: f64,
    pub relaxation: Relaxation,
    pub speed: f64,
    pub mesh: MeshSource,
    /// Physical group id to boundary tag for MSH input.
    pub physical_tags: HashMap<i64, BoundaryTag>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub supg: Option<bool>,
    pub out: PathBuf,
    /// Also export fields on the once-refined mesh.
    pub refined: bool,
    pub meshes: Vec<MeshResolution>,
    /// Relaxation times for a sweep.
    pub grid: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub repeats: usize,
    pub stop_after: Option<usize>,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return err(format!("config line {}: expected key = value", i + 1));
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) && !k.starts_with("tag.") {
            return err(format!("config line {}: unknown key {k:?}", i + 1));
        }
        map.insert(k.to_string(), v.to_string());
    }
    Ok(map)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| ConfigError(format!("{key}: cannot parse {v:?}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => err(format!("{key}: expected true or false, got {v:?}")),
    }
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| parse_num(key, s.trim())).collect()
}

/// An integer is a number of divisions, anything else a mesh size.
pub fn parse_resolution(v: &str) -> Result<MeshResolution> {
    let v = v.trim();
    if let Ok(n) = v.parse::<usize>() {
        if n == 0 {
            return err("mesh divisions must be positive");
        }
        return Ok(MeshResolution::Divisions(n));
    }
    let h: f64 = parse_num("mesh size", v)?;
    if !(h > 0.0 && h.is_finite()) {
        return err(format!("mesh size {v} must be positive"));
    }
    Ok(MeshResolution::Size(h))
}

fn default_meshes(kind: ProblemKind) -> Vec<MeshResolution> {
    match kind {
        ProblemKind::JournalBearing => [0.2, 0.1, 0.05, 0.025].map(MeshResolution::Size).to_vec(),
        _ => [10, 20, 40, 80].map(MeshResolution::Divisions).to_vec(),
    }
}

impl RunConfig {
    /// Builds a configuration from the merged key map.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| map.get(k).map(String::as_str);
        let problem = ProblemKind::parse(get("problem").unwrap_or("ldc"))?;
        let method = Method::parse(get("method").unwrap_or("srtd"))?;
        let num = |k: &str, d: f64| -> Result<f64> { get(k).map_or(Ok(d), |v| parse_num(k, v)) };
        let eta0 = num("eta0", 1.0)?;
        let lambda1 = num("lambda1", 0.0)?;
        let speed = num("U", 1.0)?;

        let given: Vec<&str> = ["mu1", "model", "a"]
            .into_iter()
            .filter(|k| map.contains_key(*k))
            .collect();
        if given.len() > 1 {
            return err(format!("give only one of mu1, model and a (got {})", given.join(", ")));
        }
        let relaxation = if let Some(v) = get("mu1") {
            Relaxation::Mu1(parse_num("mu1", v)?)
        } else if let Some(v) = get("a") {
            Relaxation::Model(Model::Slip(parse_num("a", v)?))
        } else {
            Relaxation::Model(Model::parse(get("model").unwrap_or("ucm"))?)
        };

        let sources = ["n", "h", "mesh-file"].iter().filter(|k| map.contains_key(**k)).count();
        if sources > 1 {
            return err("give only one of n, h and mesh-file");
        }
        let mesh = if let Some(v) = get("mesh-file") {
            MeshSource::File(PathBuf::from(v))
        } else if let Some(v) = get("n") {
            let n: usize = parse_num("n", v)?;
            if n == 0 {
                return err("n must be positive");
            }
            MeshSource::Generated(MeshResolution::Divisions(n))
        } else if let Some(v) = get("h") {
            match parse_resolution(v)? {
                MeshResolution::Divisions(_) => return err(format!("h = {v} must be a fraction below 1")),
                r => MeshSource::Generated(r),
            }
        } else {
            MeshSource::Generated(match problem {
                ProblemKind::JournalBearing => MeshResolution::Size(0.05),
                _ => MeshResolution::Divisions(40),
            })
        };

        let mut physical_tags = HashMap::new();
        for (k, v) in map.iter().filter(|(k, _)| k.starts_with("tag.")) {
            let id: i64 = parse_num(k, &k[4..])?;
            let tag =
                BoundaryTag::from_name(v).ok_or_else(|| ConfigError(format!("{k}: unknown boundary tag {v:?}")))?;
            physical_tags.insert(id, tag);
        }

        let meshes = match get("meshes") {
            Some(v) => v.split(',').map(parse_resolution).collect::<Result<Vec<_>>>()?,
            None => default_meshes(problem),
        };
        let spec = ProblemSpec::build(problem, speed, eta0)?;
        let grid = match get("grid") {
            Some(v) => parse_list("grid", v)?,
            None => default_weissenberg_grid()
                .into_iter()
                .map(|wi| spec.lambda1_for_wi(wi))
                .collect(),
        };
        let lambdas = match get("lambdas") {
            Some(v) => parse_list("lambdas", v)?,
            None => vec![1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2],
        };

        let cfg = RunConfig {
            problem,
            method,
            eta0,
            lambda1,
            relaxation,
            speed,
            mesh,
            physical_tags,
            tol: get("tol").map(|v| parse_num("tol", v)).transpose()?,
            max_iter: get("max-iter").map(|v| parse_num("max-iter", v)).transpose()?,
            supg: get("supg").map(|v| parse_bool("supg", v)).transpose()?,
            out: PathBuf::from(get("out").unwrap_or("o3flow-out")),
            refined: get("refined")
                .map(|v| parse_bool("refined", v))
                .transpose()?
                .unwrap_or(false),
            meshes,
            grid,
            lambdas,
            repeats: get("repeats")
                .map(|v| parse_num("repeats", v))
                .transpose()?
                .unwrap_or(3),
            stop_after: get("stop-after").map(|v| parse_num("stop-after", v)).transpose()?,
        };
        cfg.params()?;
        Ok(cfg)
    }

    pub fn problem_spec(&self) -> Result<ProblemSpec> {
        Ok(ProblemSpec::build(self.problem, self.speed, self.eta0)?)
    }

    pub fn model(&self) -> Model {
        match self.relaxation {
            Relaxation::Model(m) => m,
            Relaxation::Mu1(mu1) if self.lambda1 > 0.0 => Model::Slip(mu1 / self.lambda1),
            Relaxation::Mu1(_) => Model::Slip(0.0),
        }
    }

    pub fn params(&self) -> Result<ModelParams> {
        if self.method == Method::Nse {
            return Ok(ModelParams::newtonian(self.eta0)?);
        }
        Ok(match self.relaxation {
            Relaxation::Mu1(mu1) => ModelParams::new(self.eta0, self.lambda1, mu1)?,
            Relaxation::Model(m) => ModelParams::from_model(self.eta0, self.lambda1, m)?,
        })
    }
}
