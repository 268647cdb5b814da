//! Flat `key = value` experiment configuration.
//!
//! Every experiment has a fixed key schema with defaults and ranges. Files
//! may hold `#` comments and blank lines; unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use gplab_core::strichartz::Exponent;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    SymbolCheck,
    StrichartzScan,
    KernelDecay,
    BesselCheck,
    Evolve,
    NormalformVerify,
    Scatter,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::SymbolCheck,
        Experiment::StrichartzScan,
        Experiment::KernelDecay,
        Experiment::BesselCheck,
        Experiment::Evolve,
        Experiment::NormalformVerify,
        Experiment::Scatter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::SymbolCheck => "symbol-check",
            Experiment::StrichartzScan => "strichartz-scan",
            Experiment::KernelDecay => "kernel-decay",
            Experiment::BesselCheck => "bessel-check",
            Experiment::Evolve => "evolve",
            Experiment::NormalformVerify => "normalform-verify",
            Experiment::Scatter => "scatter",
        }
    }

    pub fn schema(self) -> &'static [Key] {
        match self {
            Experiment::SymbolCheck => SYMBOL_CHECK,
            Experiment::StrichartzScan => STRICHARTZ_SCAN,
            Experiment::KernelDecay => KERNEL_DECAY,
            Experiment::BesselCheck => BESSEL_CHECK,
            Experiment::Evolve => EVOLVE,
            Experiment::NormalformVerify => NORMALFORM_VERIFY,
            Experiment::Scatter => SCATTER,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| anyhow!("unknown experiment `{s}`"))
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Kind {
    Int { min: i64, max: i64 },
    Float { min: f64, max: f64 },
    /// `none` or a float in range.
    OptFloat { min: f64, max: f64 },
    Choice(&'static [&'static str]),
    /// Comma-separated floats, possibly empty.
    Floats,
    /// Comma-separated `q:r` pairs.
    Pairs,
}

#[derive(Clone, Copy, Debug)]
pub struct Key {
    pub name: &'static str,
    pub kind: Kind,
    pub default: &'static str,
}

const fn key(name: &'static str, kind: Kind, default: &'static str) -> Key {
    Key { name, kind, default }
}

const SYMBOLS: &[&str] = &["gp", "schrodinger", "klein_gordon", "beam", "fourth_order"];

const SYMBOL_CHECK: &[Key] = &[
    key("name", Kind::Choice(SYMBOLS), "gp"),
    key("param", Kind::Floats, ""),
    key("kmin", Kind::Int { min: -30, max: 30 }, "-8"),
    key("kmax", Kind::Int { min: -30, max: 30 }, "8"),
    key("grid_points", Kind::Int { min: 64, max: 1 << 16 }, "256"),
];

const STRICHARTZ_SCAN: &[Key] = &[
    key("symbol", Kind::Choice(&["gp"]), "gp"),
    key("kmin", Kind::Int { min: -8, max: 8 }, "0"),
    key("kmax", Kind::Int { min: -8, max: 8 }, "5"),
    key("qr", Kind::Pairs, "2:5"),
    key("profile", Kind::Choice(&["band_indicator", "band_gaussian"]), "band_gaussian"),
    key("samples", Kind::Int { min: 32, max: 1 << 16 }, "512"),
    key("window", Kind::OptFloat { min: 1e-6, max: 1e6 }, "none"),
];

const KERNEL_DECAY: &[Key] = &[
    key("symbol", Kind::Choice(SYMBOLS), "gp"),
    key("param", Kind::Floats, ""),
    key("k", Kind::Int { min: -12, max: 12 }, "2"),
    key("tmin", Kind::Float { min: 1e-3, max: 1e6 }, "10"),
    key("tmax", Kind::Float { min: 1e-3, max: 1e6 }, "1000"),
    key("points", Kind::Int { min: 8, max: 512 }, "16"),
];

const BESSEL_CHECK: &[Key] = &[
    key("numax", Kind::Float { min: 0.5, max: 200.0 }, "50"),
    key("rmax", Kind::Float { min: 2.0, max: 1e5 }, "10000"),
    key("points", Kind::Int { min: 8, max: 10_000 }, "200"),
];

const EVOLVE: &[Key] = &[
    key("n", Kind::Int { min: 16, max: 1 << 20 }, "1024"),
    key("rmax", Kind::Float { min: 1e-3, max: 1e6 }, "100"),
    key("dt", Kind::Float { min: 1e-9, max: 10.0 }, "0.0005"),
    key("steps", Kind::Int { min: 0, max: 100_000_000 }, "2000"),
    key("delta", Kind::Float { min: 0.0, max: 1.0 }, "0.05"),
    key("scheme", Kind::Choice(&["strang", "rk4_full", "linear"]), "strang"),
    key("snapshot_every", Kind::Int { min: 0, max: 100_000_000 }, "0"),
    key("energy_every", Kind::Int { min: 1, max: 100_000_000 }, "100"),
];

const NORMALFORM_VERIFY: &[Key] = &[
    key("trials", Kind::Int { min: 1, max: 1000 }, "4"),
    key("n", Kind::Int { min: 64, max: 1 << 14 }, "512"),
    key("rmax", Kind::Float { min: 1.0, max: 1e4 }, "40"),
    key("amplitude", Kind::Float { min: 1e-4, max: 0.5 }, "0.3"),
];

const SCATTER: &[Key] = &[
    key("delta", Kind::Float { min: 0.0, max: 0.1 }, "0.01"),
    key("tmin", Kind::Float { min: 0.0, max: 1e4 }, "5"),
    key("tmax", Kind::Float { min: 1e-3, max: 1e4 }, "50"),
    key("dt", Kind::Float { min: 1e-6, max: 1.0 }, "0.01"),
    key("n", Kind::Int { min: 64, max: 1 << 18 }, "2048"),
    key("rmax", Kind::Float { min: 1.0, max: 1e5 }, "200"),
    key("sample_every", Kind::Int { min: 1, max: 1_000_000 }, "100"),
];

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    OptFloat(Option<f64>),
    Text(String),
    Floats(Vec<f64>),
    Pairs(Vec<(Exponent, Exponent)>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write!(f, "{x}"),
            Value::OptFloat(None) => f.write_str("none"),
            Value::OptFloat(Some(x)) => write!(f, "{x}"),
            Value::Text(s) => f.write_str(s),
            Value::Floats(v) => f.write_str(&join(v)),
            Value::Pairs(v) => {
                let s: Vec<String> = v.iter().map(|(q, r)| format!("{q}:{r}")).collect();
                f.write_str(&s.join(","))
            }
        }
    }
}

fn parse_float(raw: &str, min: f64, max: f64) -> Result<f64> {
    let x: f64 = raw.parse().map_err(|_| anyhow!("`{raw}` is not a number"))?;
    if !(x >= min && x <= max) {
        bail!("{x} outside [{min}, {max}]");
    }
    Ok(x)
}

impl Kind {
    fn parse(&self, raw: &str) -> Result<Value> {
        let raw = raw.trim();
        Ok(match *self {
            Kind::Int { min, max } => {
                let i: i64 = raw.parse().map_err(|_| anyhow!("`{raw}` is not an integer"))?;
                if i < min || i > max {
                    bail!("{i} outside [{min}, {max}]");
                }
                Value::Int(i)
            }
            Kind::Float { min, max } => Value::Float(parse_float(raw, min, max)?),
            Kind::OptFloat { min, max } => {
                Value::OptFloat(if raw == "none" { None } else { Some(parse_float(raw, min, max)?) })
            }
            Kind::Choice(choices) => {
                if !choices.contains(&raw) {
                    bail!("`{raw}` is not one of {}", choices.join(", "));
                }
                Value::Text(raw.to_string())
            }
            Kind::Floats => Value::Floats(
                raw.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_float(s, f64::MIN, f64::MAX))
                    .collect::<Result<_>>()?,
            ),
            Kind::Pairs => {
                let pairs: Vec<(Exponent, Exponent)> = raw
                    .split(',')
                    .map(|p| {
                        let (q, r) = p.split_once(':').ok_or_else(|| anyhow!("`{p}` is not q:r"))?;
                        Ok((q.parse()?, r.parse()?))
                    })
                    .collect::<Result<_>>()?;
                if pairs.is_empty() {
                    bail!("no (q, r) pairs");
                }
                Value::Pairs(pairs)
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub output_dir: PathBuf,
    params: BTreeMap<&'static str, Value>,
}

pub const DEFAULT_SEED: u64 = 20240101;

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let params = experiment
            .schema()
            .iter()
            .map(|k| (k.name, k.kind.parse(k.default).expect("schema default")))
            .collect();
        Self { experiment, seed: DEFAULT_SEED, output_dir: PathBuf::from("out"), params }
    }

    /// Sets one key from its text form, validating type and range.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        match key {
            "experiment" => {
                let e: Experiment = raw.trim().parse()?;
                if e != self.experiment {
                    bail!("key `experiment`: config is for {e}, not {}", self.experiment);
                }
            }
            "seed" => self.seed = raw.trim().parse().with_context(|| format!("key `seed`: `{raw}` is not a u64"))?,
            "output_dir" => self.output_dir = PathBuf::from(raw.trim()),
            _ => {
                let spec = self
                    .experiment
                    .schema()
                    .iter()
                    .find(|k| k.name == key)
                    .ok_or_else(|| anyhow!("unknown key `{key}` for {}", self.experiment))?;
                let v = spec.kind.parse(raw).with_context(|| format!("key `{key}`"))?;
                self.params.insert(spec.name, v);
            }
        }
        Ok(())
    }

    /// Applies the `key = value` lines of `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", i + 1))?;
            self.set(k.trim(), v).with_context(|| format!("line {}", i + 1))?;
        }
        self.check()
    }

    /// Parses a complete config; the `experiment` key selects the schema.
    pub fn parse(text: &str) -> Result<Self> {
        let exp = text
            .lines()
            .filter_map(|l| l.split_once('='))
            .find(|(k, _)| k.trim() == "experiment")
            .ok_or_else(|| anyhow!("missing key `experiment`"))?
            .1
            .trim()
            .parse()?;
        let mut c = Self::defaults(exp);
        c.apply_text(text)?;
        Ok(c)
    }

    pub fn serialize(&self) -> String {
        let mut s = format!(
            "experiment = {}\nseed = {}\noutput_dir = {}\n",
            self.experiment,
            self.seed,
            self.output_dir.display()
        );
        for k in self.experiment.schema() {
            s.push_str(&format!("{} = {}\n", k.name, self.params[k.name]));
        }
        s
    }

    /// Cross-key constraints.
    pub fn check(&self) -> Result<()> {
        let lo_hi = |a: &str, b: &str| -> Result<()> {
            let (x, y) = (self.float(a), self.float(b));
            if x > y {
                bail!("key `{a}`: {x} exceeds `{b}` = {y}");
            }
            Ok(())
        };
        match self.experiment {
            Experiment::SymbolCheck | Experiment::StrichartzScan => {
                if self.int("kmin") > self.int("kmax") {
                    bail!("key `kmin`: {} exceeds `kmax` = {}", self.int("kmin"), self.int("kmax"));
                }
            }
            Experiment::KernelDecay => lo_hi("tmin", "tmax")?,
            Experiment::Scatter => lo_hi("tmin", "tmax")?,
            _ => {}
        }
        Ok(())
    }

    /// `(key, value)` pairs in schema order, for the report.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut v = vec![
            ("experiment".to_string(), self.experiment.to_string()),
            ("seed".to_string(), self.seed.to_string()),
            ("output_dir".to_string(), self.output_dir.display().to_string()),
        ];
        v.extend(self.experiment.schema().iter().map(|k| (k.name.to_string(), self.params[k.name].to_string())));
        v
    }

    fn get(&self, key: &str) -> &Value {
        self.params.get(key).unwrap_or_else(|| panic!("{} has no key `{key}`", self.experiment))
    }

    pub fn int(&self, key: &str) -> i64 {
        match self.get(key) {
            Value::Int(i) => *i,
            v => panic!("key `{key}` is {v:?}, not an integer"),
        }
    }

    pub fn usize(&self, key: &str) -> usize {
        self.int(key) as usize
    }

    pub fn float(&self, key: &str) -> f64 {
        match self.get(key) {
            Value::Float(x) => *x,
            Value::Int(i) => *i as f64,
            v => panic!("key `{key}` is {v:?}, not a float"),
        }
    }

    pub fn opt_float(&self, key: &str) -> Option<f64> {
        match self.get(key) {
            Value::OptFloat(x) => *x,
            v => panic!("key `{key}` is {v:?}, not optional"),
        }
    }

    pub fn text(&self, key: &str) -> &str {
        match self.get(key) {
            Value::Text(s) => s,
            v => panic!("key `{key}` is {v:?}, not text"),
        }
    }

    pub fn floats(&self, key: &str) -> &[f64] {
        match self.get(key) {
            Value::Floats(v) => v,
            v => panic!("key `{key}` is {v:?}, not a list"),
        }
    }

    pub fn pairs(&self, key: &str) -> &[(Exponent, Exponent)] {
        match self.get(key) {
            Value::Pairs(v) => v,
            v => panic!("key `{key}` is {v:?}, not q:r pairs"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_every_default() {
        for e in Experiment::ALL {
            let c = ExperimentConfig::defaults(e);
            assert_eq!(ExperimentConfig::parse(&c.serialize()).unwrap(), c);
        }
    }

    #[test]
    fn errors_name_the_key() {
        let mut c = ExperimentConfig::defaults(Experiment::Evolve);
        let e = c.set("dtt", "0.1").unwrap_err().to_string();
        assert!(e.contains("dtt"), "{e}");
        let e = format!("{:#}", c.set("dt", "-1").unwrap_err());
        assert!(e.contains("dt") && e.contains("outside"), "{e}");
        let e = format!("{:#}", c.apply_text("experiment = scatter").unwrap_err());
        assert!(e.contains("experiment"), "{e}");
    }

    #[test]
    fn pairs_and_lists() {
        let mut c = ExperimentConfig::defaults(Experiment::StrichartzScan);
        c.set("qr", "2:5, 2:6,inf:2").unwrap();
        assert_eq!(c.pairs("qr").len(), 3);
        assert_eq!(c.serialize().lines().find(|l| l.starts_with("qr")).unwrap(), "qr = 2:5,2:6,inf:2");
        assert!(c.set("qr", "2-5").is_err());
        let mut s = ExperimentConfig::defaults(Experiment::SymbolCheck);
        s.set("param", "1.5").unwrap();
        assert_eq!(s.floats("param"), &[1.5]);
    }
}
