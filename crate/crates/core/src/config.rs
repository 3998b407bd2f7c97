//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, keys are unique. All values are in
//! recoil units. Required keys:
//!
//! | key | meaning |
//! |---|---|
//! | `mode` | `mirror` or `splitter` |
//! | `target` | target rung `n` (splitter: magnitude of `±n`) |
//! | `alpha`, `t_c` | chirp rate and centre time |
//! | `omega0` | peak effective Rabi frequency |
//! | `pulse_start`, `ramp_up`, `plateau`, `ramp_down` | envelope timing |
//!
//! Optional keys: `n_max` (default `|target| + 8`), `q`, `sigma_q`, `q_points` (21),
//! `delta0`, `chirp_sign` (`auto`, `positive`, `negative`), `shape` (`sin-squared`,
//! `linear`), `frame` (`rotating` for the mirror, `bare` for the splitter), `method`
//! (`rk4` with `dt`, or `adaptive` with `tolerance`), `record_stride`, `t_start`,
//! `t_end`, `trajectory_out`, `summary_out`, `keep_amplitudes` (`true` to record complex
//! amplitudes alongside populations).
//!
//! Splitter mode additionally requires the second chirp `alpha2`, `t_c2` and accepts
//! `delta0_2`, `chirp_sign2` and `omega0_2` (peak of the second field, default `omega0`).

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::ladder::{ChirpProfile, ChirpSign, Drive, EnvelopeShape, Frame, LadderConfig, Mode, PulseEnvelope};
use crate::propagator::{IntegratorSpec, Method};
use crate::scenarios::{Experiment, MirrorParams, SplitterParams, DEFAULT_MARGIN};

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_STRIDE: usize = 100;
pub const DEFAULT_Q_POINTS: usize = 21;

const REQUIRED: [&str; 9] = [
    "mode",
    "target",
    "alpha",
    "t_c",
    "omega0",
    "pulse_start",
    "ramp_up",
    "plateau",
    "ramp_down",
];
const OPTIONAL: [&str; 17] = [
    "n_max",
    "q",
    "sigma_q",
    "q_points",
    "delta0",
    "chirp_sign",
    "shape",
    "frame",
    "method",
    "dt",
    "tolerance",
    "record_stride",
    "t_start",
    "t_end",
    "trajectory_out",
    "summary_out",
    "keep_amplitudes",
];
const SPLITTER_REQUIRED: [&str; 2] = ["alpha2", "t_c2"];
const SPLITTER_OPTIONAL: [&str; 3] = ["delta0_2", "chirp_sign2", "omega0_2"];

/// Second standing wave of the splitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondChirp {
    pub alpha: f64,
    pub t_c: f64,
    pub delta0: f64,
    pub chirp_sign: Option<ChirpSign>,
    pub omega0: Option<f64>,
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub mode: Mode,
    pub target: i64,
    pub n_max: Option<usize>,
    pub q: f64,
    pub sigma_q: f64,
    pub q_points: usize,
    pub omega0: f64,
    pub pulse_start: f64,
    pub ramp_up: f64,
    pub plateau: f64,
    pub ramp_down: f64,
    pub shape: EnvelopeShape,
    pub alpha: f64,
    pub t_c: f64,
    pub delta0: f64,
    /// `None` means the climbing convention.
    pub chirp_sign: Option<ChirpSign>,
    pub second: Option<SecondChirp>,
    pub frame: Option<Frame>,
    pub method: Method,
    pub record_stride: usize,
    pub keep_amplitudes: bool,
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub trajectory_out: Option<String>,
    pub summary_out: Option<String>,
}

fn sign_name(s: Option<ChirpSign>) -> &'static str {
    match s {
        None => "auto",
        Some(ChirpSign::Positive) => "positive",
        Some(ChirpSign::Negative) => "negative",
    }
}

fn parse_sign(v: &str) -> Option<Option<ChirpSign>> {
    match v {
        "auto" => Some(None),
        "positive" | "+1" | "1" => Some(Some(ChirpSign::Positive)),
        "negative" | "-1" => Some(Some(ChirpSign::Negative)),
        _ => None,
    }
}

/// Collects every violation instead of stopping at the first.
struct Reader<'a> {
    raw: &'a BTreeMap<String, String>,
    errors: Vec<String>,
}

impl Reader<'_> {
    fn get(&self, key: &str) -> Option<&str> {
        self.raw.get(key).map(String::as_str)
    }

    fn float(&mut self, key: &str) -> Option<f64> {
        let v = self.get(key)?;
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Some(x),
            _ => {
                self.errors.push(format!("{key}: expected a finite number, got `{v}`"));
                None
            }
        }
    }

    fn float_in(&mut self, key: &str, ok: impl Fn(f64) -> bool, range: &str) -> Option<f64> {
        let x = self.float(key)?;
        if ok(x) {
            Some(x)
        } else {
            self.errors.push(format!("{key}: {x} out of range ({range})"));
            None
        }
    }

    fn int(&mut self, key: &str) -> Option<i64> {
        let v = self.get(key)?;
        match v.parse::<i64>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.errors.push(format!("{key}: expected an integer, got `{v}`"));
                None
            }
        }
    }

    fn choice<T>(&mut self, key: &str, parse: impl Fn(&str) -> Option<T>, allowed: &str) -> Option<T> {
        let v = self.get(key)?;
        let out = parse(v);
        if out.is_none() {
            self.errors.push(format!("{key}: `{v}` is not one of {allowed}"));
        }
        out
    }

    fn chirp_rate(&mut self, key: &str) -> Option<f64> {
        let x = self.float(key)?;
        if x == 0.0 {
            self.errors.push(format!("{key}: chirp rate must be nonzero"));
            return None;
        }
        Some(x)
    }
}

/// Split text into raw assignments, reporting malformed and duplicate lines.
fn assignments(text: &str, errors: &mut Vec<String>) -> BTreeMap<String, String> {
    let mut raw = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            errors.push(format!("line {}: expected `key = value`", i + 1));
            continue;
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            errors.push(format!("line {}: empty key or value", i + 1));
            continue;
        }
        if raw.insert(k.to_string(), v.to_string()).is_some() {
            errors.push(format!("line {}: duplicate key `{k}`", i + 1));
        }
    }
    raw
}

/// Parse and validate configuration text.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    let mut errors = Vec::new();
    let raw = assignments(text, &mut errors);
    let mode = raw.get("mode").and_then(|m| Mode::parse(m));

    let mut known: Vec<&str> = REQUIRED.iter().chain(OPTIONAL.iter()).copied().collect();
    known.extend(SPLITTER_REQUIRED.iter().chain(SPLITTER_OPTIONAL.iter()));
    for key in raw.keys() {
        if !known.contains(&key.as_str()) {
            errors.push(format!("unknown key `{key}`"));
        } else if mode == Some(Mode::Mirror)
            && (SPLITTER_REQUIRED.contains(&key.as_str()) || SPLITTER_OPTIONAL.contains(&key.as_str()))
        {
            errors.push(format!("{key}: only valid in splitter mode"));
        }
    }
    let missing: Vec<&str> = REQUIRED.iter().copied().filter(|k| !raw.contains_key(*k)).collect();
    if !missing.is_empty() {
        errors.push(format!("missing required keys: {}", missing.join(", ")));
    }
    if mode == Some(Mode::Splitter) {
        let missing: Vec<&str> = SPLITTER_REQUIRED
            .iter()
            .copied()
            .filter(|k| !raw.contains_key(*k))
            .collect();
        if !missing.is_empty() {
            errors.push(format!(
                "splitter mode requires the second chirp: missing {}",
                missing.join(", ")
            ));
        }
    }

    let mut r = Reader { raw: &raw, errors };
    let mode = r.choice("mode", Mode::parse, "mirror, splitter");
    let target = r.int("target");
    match (mode, target) {
        (_, Some(0)) => r.errors.push("target: must be nonzero".into()),
        (Some(Mode::Splitter), Some(t)) if t < 0 => r
            .errors
            .push(format!("target: splitter target is the magnitude of ±n, got {t}")),
        _ => {}
    }
    let n_max = r.int("n_max");
    if let (Some(n), Some(t)) = (n_max, target) {
        if n <= t.abs() {
            r.errors
                .push(format!("n_max: {n} out of range (must exceed |target| = {})", t.abs()));
        }
    }
    if matches!(n_max, Some(n) if n < 1) {
        r.errors.push("n_max: must be >= 1".into());
    }
    let q = r.float_in("q", |x| x.abs() <= 1.0, "|q| <= 1");
    let sigma_q = r.float_in("sigma_q", |x| x >= 0.0, ">= 0");
    let q_points = r.int("q_points");
    if matches!(q_points, Some(m) if m < 1 || m % 2 == 0) {
        r.errors
            .push(format!("q_points: {} out of range (odd and >= 1)", q_points.unwrap()));
    }
    let omega0 = r.float_in("omega0", |x| x >= 0.0, ">= 0");
    let pulse_start = r.float("pulse_start");
    let ramp_up = r.float_in("ramp_up", |x| x >= 0.0, ">= 0");
    let plateau = r.float_in("plateau", |x| x >= 0.0, ">= 0");
    let ramp_down = r.float_in("ramp_down", |x| x >= 0.0, ">= 0");
    let shape = r.choice("shape", EnvelopeShape::parse, "sin-squared, linear");
    let alpha = r.chirp_rate("alpha");
    let t_c = r.float("t_c");
    let delta0 = r.float("delta0");
    let chirp_sign = r.choice("chirp_sign", parse_sign, "auto, positive, negative");
    let frame = r.choice("frame", Frame::parse, "bare, rotating");

    let second = if mode == Some(Mode::Splitter) {
        let alpha2 = r.chirp_rate("alpha2");
        let t_c2 = r.float("t_c2");
        let delta0_2 = r.float("delta0_2");
        let sign2 = r.choice("chirp_sign2", parse_sign, "auto, positive, negative");
        let omega0_2 = r.float_in("omega0_2", |x| x >= 0.0, ">= 0");
        match (alpha2, t_c2) {
            (Some(alpha), Some(t_c)) => Some(SecondChirp {
                alpha,
                t_c,
                delta0: delta0_2.unwrap_or(0.0),
                chirp_sign: sign2.flatten(),
                omega0: omega0_2,
            }),
            _ => None,
        }
    } else {
        None
    };

    let method_name = r.get("method").unwrap_or("rk4").to_string();
    let method = match method_name.as_str() {
        "rk4" => {
            if r.get("tolerance").is_some() {
                r.errors.push("tolerance: only applies to method = adaptive".into());
            }
            let dt = r.float_in("dt", |x| x > 0.0, "> 0").unwrap_or(DEFAULT_DT);
            Some(Method::Rk4Fixed { dt })
        }
        "adaptive" => {
            if r.get("dt").is_some() {
                r.errors.push("dt: only applies to method = rk4".into());
            }
            let tolerance = r.float_in("tolerance", |x| x > 0.0, "> 0").unwrap_or(DEFAULT_TOLERANCE);
            Some(Method::RkAdaptive { tolerance })
        }
        other => {
            r.errors.push(format!("method: `{other}` is not one of rk4, adaptive"));
            None
        }
    };
    let record_stride = r.int("record_stride");
    if matches!(record_stride, Some(s) if s < 1) {
        r.errors.push("record_stride: must be >= 1".into());
    }
    let keep_amplitudes = r.choice("keep_amplitudes", |v| v.parse::<bool>().ok(), "true, false");
    let t_start = r.float("t_start");
    let t_end = r.float("t_end");
    if let (Some(a), Some(b)) = (t_start, t_end) {
        if b <= a {
            r.errors
                .push(format!("t_end: {b} out of range (must exceed t_start = {a})"));
        }
    }
    let trajectory_out = r.get("trajectory_out").map(str::to_string);
    let summary_out = r.get("summary_out").map(str::to_string);

    if !r.errors.is_empty() {
        return Err(Error::Config(r.errors));
    }
    let need = "validated above";
    Ok(SimConfig {
        mode: mode.expect(need),
        target: target.expect(need),
        n_max: n_max.map(|n| n as usize),
        q: q.unwrap_or(0.0),
        sigma_q: sigma_q.unwrap_or(0.0),
        q_points: q_points.map_or(DEFAULT_Q_POINTS, |m| m as usize),
        omega0: omega0.expect(need),
        pulse_start: pulse_start.expect(need),
        ramp_up: ramp_up.expect(need),
        plateau: plateau.expect(need),
        ramp_down: ramp_down.expect(need),
        shape: shape.unwrap_or(EnvelopeShape::SinSquared),
        alpha: alpha.expect(need),
        t_c: t_c.expect(need),
        delta0: delta0.unwrap_or(0.0),
        chirp_sign: chirp_sign.flatten(),
        second,
        frame,
        method: method.expect(need),
        record_stride: record_stride.map_or(DEFAULT_STRIDE, |s| s as usize),
        keep_amplitudes: keep_amplitudes.unwrap_or(false),
        t_start,
        t_end,
        trajectory_out,
        summary_out,
    })
}

/// Read and parse a configuration file.
pub fn load_config(path: &Path) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

impl SimConfig {
    /// Every set key with its value, in canonical order.
    pub fn entries(&self) -> Vec<(&'static str, Value)> {
        let mut out: Vec<(&'static str, Value)> =
            vec![("mode", self.mode.name().into()), ("target", self.target.into())];
        if let Some(n) = self.n_max {
            out.push(("n_max", n.into()));
        }
        out.extend([
            ("q", num(self.q)),
            ("sigma_q", num(self.sigma_q)),
            ("q_points", self.q_points.into()),
            ("omega0", num(self.omega0)),
            ("pulse_start", num(self.pulse_start)),
            ("ramp_up", num(self.ramp_up)),
            ("plateau", num(self.plateau)),
            ("ramp_down", num(self.ramp_down)),
            ("shape", self.shape.name().into()),
            ("alpha", num(self.alpha)),
            ("t_c", num(self.t_c)),
            ("delta0", num(self.delta0)),
            ("chirp_sign", sign_name(self.chirp_sign).into()),
        ]);
        if let Some(s) = &self.second {
            out.extend([
                ("alpha2", num(s.alpha)),
                ("t_c2", num(s.t_c)),
                ("delta0_2", num(s.delta0)),
                ("chirp_sign2", sign_name(s.chirp_sign).into()),
            ]);
            if let Some(o) = s.omega0 {
                out.push(("omega0_2", num(o)));
            }
        }
        if let Some(f) = self.frame {
            out.push(("frame", f.name().into()));
        }
        match self.method {
            Method::Rk4Fixed { dt } => out.extend([("method", "rk4".into()), ("dt", num(dt))]),
            Method::RkAdaptive { tolerance } => {
                out.extend([("method", "adaptive".into()), ("tolerance", num(tolerance))])
            }
        }
        out.push(("record_stride", self.record_stride.into()));
        out.push(("keep_amplitudes", self.keep_amplitudes.into()));
        if let Some(t) = self.t_start {
            out.push(("t_start", num(t)));
        }
        if let Some(t) = self.t_end {
            out.push(("t_end", num(t)));
        }
        if let Some(p) = &self.trajectory_out {
            out.push(("trajectory_out", p.as_str().into()));
        }
        if let Some(p) = &self.summary_out {
            out.push(("summary_out", p.as_str().into()));
        }
        out
    }

    /// Config snapshot for result documents (keys sorted).
    pub fn snapshot(&self) -> Value {
        Value::Object(
            self.entries()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect::<Map<_, _>>(),
        )
    }

    /// Canonical text form; `parse_config(&cfg.emit())` reproduces `cfg`.
    pub fn emit(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            let v = match v {
                Value::String(x) => x,
                other => other.to_string(),
            };
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }

    /// Replace one numeric key and re-validate (used by parameter scans).
    pub fn with_value(&self, key: &str, value: f64) -> Result<SimConfig> {
        let text = self.emit();
        let mut lines: Vec<String> = text
            .lines()
            .filter(|l| l.split('=').next().map(str::trim) != Some(key))
            .map(str::to_string)
            .collect();
        lines.push(format!("{key} = {value}"));
        parse_config(&lines.join("\n"))
    }

    pub fn integrator(&self) -> IntegratorSpec {
        IntegratorSpec {
            method: self.method,
            record_stride: self.record_stride,
            keep_amplitudes: self.keep_amplitudes,
        }
    }

    pub fn envelope(&self) -> Result<PulseEnvelope> {
        PulseEnvelope::new(
            self.omega0,
            self.pulse_start,
            self.ramp_up,
            self.plateau,
            self.ramp_down,
            self.shape,
        )
    }

    pub fn experiment(&self) -> Result<Experiment> {
        let env = self.envelope()?;
        let sign = |s: Option<ChirpSign>| s.unwrap_or_else(ChirpSign::climbing);
        let chirp = ChirpProfile::with_sign(self.alpha, self.t_c, self.delta0, sign(self.chirp_sign));
        let n_max = self
            .n_max
            .unwrap_or(self.target.unsigned_abs() as usize + DEFAULT_MARGIN);
        let ladder = match (self.mode, &self.second) {
            (Mode::Mirror, _) => LadderConfig::mirror(n_max, Drive::new(env, chirp))?,
            (Mode::Splitter, Some(s)) => {
                let c2 = ChirpProfile::with_sign(s.alpha, s.t_c, s.delta0, sign(s.chirp_sign));
                let e2 = env.with_peak(s.omega0.unwrap_or(self.omega0));
                LadderConfig::splitter(n_max, Drive::new(env, chirp), Drive::new(e2, c2))?
            }
            (Mode::Splitter, None) => return Err(Error::Config(vec!["splitter mode requires alpha2 and t_c2".into()])),
        };
        let ladder = match self.frame {
            Some(f) => ladder.with_frame(f),
            None => ladder,
        }
        .with_q(self.q)?;
        let t0 = self.t_start.unwrap_or(env.start().min(0.0));
        Ok(Experiment {
            ladder,
            integrator: self.integrator(),
            t_span: (t0, self.t_end.unwrap_or(env.end())),
            target: self.target,
            initial_level: 0,
        })
    }

    fn from_experiment(exp: &Experiment, omega0_2: Option<f64>) -> Self {
        let primary = exp.ladder.primary_drive();
        let env = primary.envelope;
        let chirp = primary.chirp;
        let second = match *exp.ladder.drives() {
            crate::ladder::Drives::Splitter { minus, .. } => Some(SecondChirp {
                alpha: minus.chirp.alpha,
                t_c: minus.chirp.t_c,
                delta0: minus.chirp.delta0,
                chirp_sign: None,
                omega0: omega0_2,
            }),
            _ => None,
        };
        let (method, stride) = (exp.integrator.method, exp.integrator.record_stride);
        SimConfig {
            mode: exp.ladder.mode(),
            target: exp.target,
            n_max: Some(exp.ladder.n_max()),
            q: exp.ladder.q(),
            sigma_q: 0.0,
            q_points: DEFAULT_Q_POINTS,
            omega0: env.peak(),
            pulse_start: env.start(),
            ramp_up: env.ramp_up(),
            plateau: env.plateau(),
            ramp_down: env.ramp_down(),
            shape: env.shape(),
            alpha: chirp.alpha,
            t_c: chirp.t_c,
            delta0: chirp.delta0,
            chirp_sign: None,
            second,
            frame: Some(exp.ladder.frame()),
            method,
            record_stride: stride,
            keep_amplitudes: exp.integrator.keep_amplitudes,
            t_start: None,
            t_end: None,
            trajectory_out: None,
            summary_out: None,
        }
    }

    /// Explicit configuration equivalent to a mirror scenario.
    pub fn from_mirror(p: &MirrorParams) -> Result<Self> {
        let mut cfg = Self::from_experiment(&p.experiment()?, None);
        cfg.chirp_sign = p.sign;
        Ok(cfg)
    }

    /// Explicit configuration equivalent to a splitter scenario.
    pub fn from_splitter(p: &SplitterParams) -> Result<Self> {
        let mut cfg = Self::from_experiment(&p.experiment()?, p.omega0_2);
        cfg.chirp_sign = p.sign;
        if let Some(s) = cfg.second.as_mut() {
            s.chirp_sign = p.sign;
        }
        Ok(cfg)
    }
}
