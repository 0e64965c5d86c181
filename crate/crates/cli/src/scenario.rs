//! Scenario documents: TOML with `[operator]`, `[function]`, `[analysis]`
//! and `[outputs]` sections. Parsing walks the whole document and reports
//! every problem it finds, one error per offending key.

use std::fmt;
use std::path::PathBuf;

use specframe::holocalc::{HoloFunction, Polynomial, PowerSeries, SeriesRule, TailBound};
use specframe::operators::{make_operator, ClosedForm, OperatorSpec, SequenceRule, TailRule};
use specframe::C64;
use toml::{Table, Value};

pub const DEFAULT_N_LIST: [usize; 4] = [250, 500, 1000, 2000];
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_PROBE_TOL: f64 = 1e-2;
pub const DEFAULT_DECAY_THRESHOLD: f64 = 1e-4;
pub const DEFAULT_GRID_SIZE: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: Option<String>,
    pub description: Option<String>,
    pub operator: OperatorSpec,
    /// Use the adjoint of the described operator.
    pub adjoint: bool,
    pub function: HoloFunction,
    pub analysis: Analysis,
    pub outputs: Outputs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub n_list: Vec<usize>,
    /// Relative band of the zero-in-image test.
    pub tol: f64,
    /// Tolerance of the numerical probes and of cross-validation.
    pub probe_tol: f64,
    pub decay_threshold: f64,
    pub grid_size: usize,
}

impl Default for Analysis {
    fn default() -> Self {
        Self {
            n_list: DEFAULT_N_LIST.to_vec(),
            tol: DEFAULT_TOL,
            probe_tol: DEFAULT_PROBE_TOL,
            decay_threshold: DEFAULT_DECAY_THRESHOLD,
            grid_size: DEFAULT_GRID_SIZE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Verbosity {
    Quiet,
    #[default]
    Normal,
    Verbose,
}

impl Verbosity {
    fn as_str(self) -> &'static str {
        match self {
            Verbosity::Quiet => "quiet",
            Verbosity::Normal => "normal",
            Verbosity::Verbose => "verbose",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outputs {
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub verbosity: Verbosity,
    /// Wall-clock timings make reports non-reproducible, so they are opt-in.
    pub timings: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioError {
    /// Dotted key path, or `document` for syntax errors.
    pub key: String,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ScenarioErrors(pub Vec<ScenarioError>);

impl fmt::Display for ScenarioErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.0.len();
        writeln!(f, "{n} scenario error{}:", if n == 1 { "" } else { "s" })?;
        for e in &self.0 {
            writeln!(f, "  {e}")?;
        }
        Ok(())
    }
}

/// Collects errors while a section's keys are consumed.
struct Section<'a> {
    path: &'a str,
    table: Table,
    errors: &'a mut Vec<ScenarioError>,
}

impl<'a> Section<'a> {
    fn new(path: &'a str, table: Table, errors: &'a mut Vec<ScenarioError>) -> Self {
        Self { path, table, errors }
    }

    fn key(&self, name: &str) -> String {
        if self.path.is_empty() {
            name.to_string()
        } else {
            format!("{}.{name}", self.path)
        }
    }

    fn error(&mut self, name: &str, message: impl Into<String>) {
        let key = self.key(name);
        self.errors.push(ScenarioError { key, message: message.into() });
    }

    fn take(&mut self, name: &str) -> Option<Value> {
        self.table.remove(name)
    }

    fn has(&self, name: &str) -> bool {
        self.table.contains_key(name)
    }

    fn convert<T>(&mut self, name: &str, f: impl FnOnce(&Value) -> Result<T, String>) -> Option<T> {
        let v = self.take(name)?;
        match f(&v) {
            Ok(x) => Some(x),
            Err(msg) => {
                self.error(name, msg);
                None
            }
        }
    }

    fn required<T>(&mut self, name: &str, f: impl FnOnce(&Value) -> Result<T, String>) -> Option<T> {
        if !self.has(name) {
            self.error(name, "missing required field");
            return None;
        }
        self.convert(name, f)
    }

    /// Remaining keys are unknown.
    fn finish(self, context: &str) {
        for k in self.table.keys() {
            let key = if self.path.is_empty() { k.clone() } else { format!("{}.{k}", self.path) };
            self.errors.push(ScenarioError {
                key,
                message: format!("unknown key{context}"),
            });
        }
    }
}

fn as_f64(v: &Value) -> Result<f64, String> {
    let x = match v {
        Value::Float(x) => *x,
        Value::Integer(i) => *i as f64,
        other => return Err(format!("expected a number, found {}", other.type_str())),
    };
    if x.is_nan() {
        return Err("NaN is not allowed".into());
    }
    Ok(x)
}

fn finite_f64(v: &Value) -> Result<f64, String> {
    let x = as_f64(v)?;
    if !x.is_finite() {
        return Err("must be finite".into());
    }
    Ok(x)
}

fn positive_f64(v: &Value) -> Result<f64, String> {
    let x = finite_f64(v)?;
    if x <= 0.0 {
        return Err(format!("must be positive, got {x}"));
    }
    Ok(x)
}

fn positive_usize(v: &Value) -> Result<usize, String> {
    match v {
        Value::Integer(i) if *i > 0 => Ok(*i as usize),
        Value::Integer(i) => Err(format!("must be positive, got {i}")),
        other => Err(format!("expected an integer, found {}", other.type_str())),
    }
}

fn as_bool(v: &Value) -> Result<bool, String> {
    v.as_bool().ok_or_else(|| format!("expected a boolean, found {}", v.type_str()))
}

fn as_string(v: &Value) -> Result<String, String> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| format!("expected a string, found {}", v.type_str()))
}

/// A complex number: a bare number or `[re, im]`.
fn as_complex(v: &Value) -> Result<C64, String> {
    match v {
        Value::Array(parts) => {
            if parts.len() != 2 {
                return Err(format!("complex number needs [re, im], found {} entries", parts.len()));
            }
            Ok(C64::new(finite_f64(&parts[0])?, finite_f64(&parts[1])?))
        }
        other => Ok(C64::new(finite_f64(other)?, 0.0)),
    }
}

fn complex_list(v: &Value) -> Result<Vec<C64>, String> {
    let items = v
        .as_array()
        .ok_or_else(|| format!("expected an array, found {}", v.type_str()))?;
    items
        .iter()
        .enumerate()
        .map(|(i, x)| as_complex(x).map_err(|e| format!("entry {i}: {e}")))
        .collect()
}

fn nonempty_complex_list(v: &Value) -> Result<Vec<C64>, String> {
    let out = complex_list(v)?;
    if out.is_empty() {
        return Err("must not be empty".into());
    }
    Ok(out)
}

fn n_list(v: &Value) -> Result<Vec<usize>, String> {
    let items = v
        .as_array()
        .ok_or_else(|| format!("expected an array, found {}", v.type_str()))?;
    if items.is_empty() {
        return Err("must not be empty".into());
    }
    let out = items
        .iter()
        .enumerate()
        .map(|(i, x)| positive_usize(x).map_err(|e| format!("entry {i}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if out.windows(2).any(|w| w[1] <= w[0]) {
        return Err("N_list not increasing".into());
    }
    Ok(out)
}

fn table_of(v: Value) -> Result<Table, String> {
    match v {
        Value::Table(t) => Ok(t),
        other => Err(format!("expected a table, found {}", other.type_str())),
    }
}

/// Parse and validate a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioErrors> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| {
        ScenarioErrors(vec![ScenarioError {
            key: "document".into(),
            message: e.message().to_string(),
        }])
    })?;
    let mut errors = Vec::new();
    let mut top = Section::new("", root, &mut errors);
    let name = top.convert("name", as_string);
    let description = top.convert("description", as_string);
    let operator = top.take("operator");
    let function = top.take("function");
    let analysis = top.take("analysis");
    let outputs = top.take("outputs");
    top.finish("");

    let operator = match operator {
        None => {
            errors.push(ScenarioError { key: "operator".into(), message: "missing required field".into() });
            None
        }
        Some(v) => parse_operator(v, &mut errors),
    };
    let function = match function {
        None => {
            errors.push(ScenarioError { key: "function".into(), message: "missing required field".into() });
            None
        }
        Some(v) => parse_function(v, &mut errors),
    };
    let analysis = parse_analysis(analysis, &mut errors);
    let outputs = parse_outputs(outputs, &mut errors);

    match (operator, function) {
        (Some((operator, adjoint)), Some(function)) if errors.is_empty() => Ok(Scenario {
            name,
            description,
            operator,
            adjoint,
            function,
            analysis,
            outputs,
        }),
        _ => Err(ScenarioErrors(errors)),
    }
}

fn parse_operator(v: Value, errors: &mut Vec<ScenarioError>) -> Option<(OperatorSpec, bool)> {
    let table = match v {
        // Shorthand: `operator = "right_shift"`.
        Value::String(kind) => Table::from_iter([("kind".to_string(), Value::String(kind))]),
        other => match table_of(other) {
            Ok(t) => t,
            Err(msg) => {
                errors.push(ScenarioError { key: "operator".into(), message: msg });
                return None;
            }
        },
    };
    let mut s = Section::new("operator", table, errors);
    let adjoint = s.convert("adjoint", as_bool).unwrap_or(false);
    let kind = s.required("kind", as_string)?;
    let before = s.errors.len();
    let spec = match kind.as_str() {
        "right_shift" => Some(OperatorSpec::RightShift),
        "left_shift" => Some(OperatorSpec::LeftShift),
        "toeplitz" => {
            let offsets = s.required("offsets", |v| {
                let items = v.as_array().ok_or_else(|| format!("expected an array, found {}", v.type_str()))?;
                items
                    .iter()
                    .enumerate()
                    .map(|(i, x)| x.as_integer().ok_or_else(|| format!("entry {i}: expected an integer")))
                    .collect::<Result<Vec<i64>, _>>()
            });
            let coefficients = s.required("coefficients", nonempty_complex_list);
            match (offsets, coefficients) {
                (Some(o), Some(c)) if o.len() == c.len() => Some(OperatorSpec::BandedToeplitz(o.into_iter().zip(c).collect())),
                (Some(o), Some(c)) => {
                    s.error(
                        "coefficients",
                        format!("has {} entries but offsets has {}", c.len(), o.len()),
                    );
                    None
                }
                _ => None,
            }
        }
        "diagonal" => parse_sequence(&mut s).map(OperatorSpec::Diagonal),
        "weighted_shift" => parse_sequence(&mut s).map(OperatorSpec::WeightedShift),
        other => {
            s.error(
                "kind",
                format!("unknown operator kind `{other}` (expected right_shift, left_shift, toeplitz, diagonal or weighted_shift)"),
            );
            s.table.clear();
            return None;
        }
    };
    let clean = s.errors.len() == before;
    s.finish(&format!(" for operator kind {kind}"));
    let spec = spec.filter(|_| clean)?;
    // Let the library reject what it cannot model (mixed Toeplitz, ...).
    if let Err(e) = make_operator(&spec) {
        errors.push(ScenarioError { key: "operator".into(), message: e.to_string() });
        return None;
    }
    Some((spec, adjoint))
}

fn parse_sequence(s: &mut Section<'_>) -> Option<SequenceRule> {
    const PARAMS: [&str; 6] = ["value", "start", "ratio", "scale", "offset", "cycle"];
    let prefix = s.convert("prefix", complex_list).unwrap_or_default();
    let Some(tail_kind) = s.required("tail", as_string) else {
        // Without a tail the parameters cannot be judged.
        for k in PARAMS {
            s.take(k);
        }
        return None;
    };
    let tail = match tail_kind.as_str() {
        "constant" => s.required("value", as_complex).map(TailRule::Constant),
        "geometric" => {
            let start = s.required("start", as_complex);
            let ratio = s.required("ratio", as_complex);
            Some(TailRule::Geometric { start: start?, ratio: ratio? })
        }
        "reciprocal" => {
            let scale = s.convert("scale", as_complex).unwrap_or(C64::new(1.0, 0.0));
            let offset = s.convert("offset", finite_f64).unwrap_or(1.0);
            Some(TailRule::Reciprocal { scale, offset })
        }
        "periodic" => s.required("cycle", nonempty_complex_list).map(TailRule::Periodic),
        "inv_sqrt" => Some(TailRule::ClosedForm(ClosedForm::InvSqrt)),
        "alt_reciprocal" => Some(TailRule::ClosedForm(ClosedForm::AltReciprocal)),
        other => {
            s.error(
                "tail",
                format!(
                    "unknown tail `{other}` (expected constant, geometric, reciprocal, periodic, inv_sqrt or alt_reciprocal)"
                ),
            );
            for k in PARAMS {
                s.take(k);
            }
            return None;
        }
    }?;
    match SequenceRule::new(prefix, tail) {
        Ok(rule) => Some(rule),
        Err(e) => {
            s.error("tail", e.to_string());
            None
        }
    }
}

fn parse_function(v: Value, errors: &mut Vec<ScenarioError>) -> Option<HoloFunction> {
    let table = match v {
        // Shorthand: `function = [1, 1]`.
        v @ Value::Array(_) => Table::from_iter([("coefficients".to_string(), v)]),
        other => match table_of(other) {
            Ok(t) => t,
            Err(msg) => {
                errors.push(ScenarioError { key: "function".into(), message: msg });
                return None;
            }
        },
    };
    let mut s = Section::new("function", table, errors);
    let kind = s.convert("kind", as_string).unwrap_or_else(|| "polynomial".into());
    let before = s.errors.len();
    let f = match kind.as_str() {
        "polynomial" => s
            .required("coefficients", nonempty_complex_list)
            .and_then(|c| match Polynomial::new(c) {
                Ok(p) => Some(HoloFunction::Polynomial(p)),
                Err(e) => {
                    s.error("coefficients", e.to_string());
                    None
                }
            }),
        "series" => parse_series(&mut s),
        other => {
            s.error("kind", format!("unknown function kind `{other}` (expected polynomial or series)"));
            s.table.clear();
            return None;
        }
    };
    let clean = s.errors.len() == before;
    s.finish(&format!(" for function kind {kind}"));
    f.filter(|_| clean)
}

fn parse_series(s: &mut Section<'_>) -> Option<HoloFunction> {
    let rule_name = s.required("rule", as_string);
    let rule = match rule_name.as_deref() {
        Some("exp") => Some(SeriesRule::Exp { rate: s.convert("rate", as_complex).unwrap_or(C64::new(1.0, 0.0)) }),
        Some("geometric") => Some(SeriesRule::Geometric {
            ratio: s.convert("ratio", as_complex).unwrap_or(C64::new(1.0, 0.0)),
        }),
        Some(other) => {
            s.error("rule", format!("unknown series rule `{other}` (expected exp or geometric)"));
            s.take("rate");
            s.take("ratio");
            None
        }
        None => None,
    };
    let radius = s.convert("radius", |v| {
        let x = as_f64(v)?;
        if x <= 0.0 {
            return Err(format!("must be positive, got {x}"));
        }
        Ok(x)
    });
    let tail = if s.has("tail") {
        s.convert("tail", |v| {
            let t = v.as_table().ok_or_else(|| format!("expected a table, found {}", v.type_str()))?;
            let mut problems = Vec::new();
            let kind = t.get("kind").and_then(Value::as_str);
            let tail = match kind {
                Some("factorial") => t.get("rate").map(positive_f64).map(|r| r.map(|rate| TailBound::Factorial { rate })),
                Some("geometric") => t.get("ratio").map(positive_f64).map(|r| r.map(|ratio| TailBound::Geometric { ratio })),
                Some(other) => return Err(format!("unknown tail kind `{other}` (expected factorial or geometric)")),
                None => return Err("tail needs kind = \"factorial\" or \"geometric\"".into()),
            };
            let param = if kind == Some("factorial") { "rate" } else { "ratio" };
            for k in t.keys() {
                if k != "kind" && k != param {
                    problems.push(format!("unknown key `{k}`"));
                }
            }
            let tail = match tail {
                None => return Err(format!("tail of kind {} needs `{param}`", kind.unwrap_or_default())),
                Some(Err(e)) => return Err(format!("{param}: {e}")),
                Some(Ok(t)) => t,
            };
            if !problems.is_empty() {
                return Err(problems.join(", "));
            }
            Ok(tail)
        })
    } else {
        s.error("tail", "tail bound required");
        None
    };
    let (rule, tail) = (rule?, tail?);
    let radius = radius.unwrap_or(match rule {
        SeriesRule::Exp { .. } => f64::INFINITY,
        SeriesRule::Geometric { ratio } => 1.0 / ratio.norm(),
    });
    match PowerSeries::new(rule, radius, tail) {
        Ok(ps) => Some(HoloFunction::PowerSeries(ps)),
        Err(e) => {
            s.error("rule", e.to_string());
            None
        }
    }
}

fn parse_analysis(v: Option<Value>, errors: &mut Vec<ScenarioError>) -> Analysis {
    let mut a = Analysis::default();
    let Some(v) = v else { return a };
    let table = match table_of(v) {
        Ok(t) => t,
        Err(msg) => {
            errors.push(ScenarioError { key: "analysis".into(), message: msg });
            return a;
        }
    };
    let mut s = Section::new("analysis", table, errors);
    if let Some(x) = s.convert("N_list", n_list) {
        a.n_list = x;
    }
    if let Some(x) = s.convert("tol", positive_f64) {
        a.tol = x;
    }
    if let Some(x) = s.convert("probe_tol", positive_f64) {
        a.probe_tol = x;
    }
    if let Some(x) = s.convert("decay_threshold", positive_f64) {
        a.decay_threshold = x;
    }
    if let Some(x) = s.convert("grid_size", positive_usize) {
        a.grid_size = x;
    }
    s.finish("");
    a
}

fn parse_outputs(v: Option<Value>, errors: &mut Vec<ScenarioError>) -> Outputs {
    let mut o = Outputs::default();
    let Some(v) = v else { return o };
    let table = match table_of(v) {
        Ok(t) => t,
        Err(msg) => {
            errors.push(ScenarioError { key: "outputs".into(), message: msg });
            return o;
        }
    };
    let mut s = Section::new("outputs", table, errors);
    o.report = s.convert("report", as_string).map(PathBuf::from);
    o.csv = s.convert("csv", as_string).map(PathBuf::from);
    if let Some(v) = s.convert("verbosity", |v| match as_string(v)?.as_str() {
        "quiet" => Ok(Verbosity::Quiet),
        "normal" => Ok(Verbosity::Normal),
        "verbose" => Ok(Verbosity::Verbose),
        other => Err(format!("unknown verbosity `{other}` (expected quiet, normal or verbose)")),
    }) {
        o.verbosity = v;
    }
    if let Some(t) = s.convert("timings", as_bool) {
        o.timings = t;
    }
    s.finish("");
    o
}

fn complex_value(z: C64) -> Value {
    if z.im == 0.0 {
        Value::Float(z.re)
    } else {
        Value::Array(vec![Value::Float(z.re), Value::Float(z.im)])
    }
}

fn complex_array(zs: &[C64]) -> Value {
    Value::Array(zs.iter().copied().map(complex_value).collect())
}

fn sequence_entries(t: &mut Table, rule: &SequenceRule) {
    if !rule.prefix().is_empty() {
        t.insert("prefix".into(), complex_array(rule.prefix()));
    }
    let (name, params): (&str, Vec<(&str, Value)>) = match rule.tail() {
        TailRule::Constant(c) => ("constant", vec![("value", complex_value(*c))]),
        TailRule::Geometric { start, ratio } => {
            ("geometric", vec![("start", complex_value(*start)), ("ratio", complex_value(*ratio))])
        }
        TailRule::Reciprocal { scale, offset } => {
            ("reciprocal", vec![("scale", complex_value(*scale)), ("offset", Value::Float(*offset))])
        }
        TailRule::Periodic(cycle) => ("periodic", vec![("cycle", complex_array(cycle))]),
        TailRule::ClosedForm(ClosedForm::InvSqrt) => ("inv_sqrt", vec![]),
        TailRule::ClosedForm(ClosedForm::AltReciprocal) => ("alt_reciprocal", vec![]),
    };
    t.insert("tail".into(), Value::String(name.into()));
    for (k, v) in params {
        t.insert(k.into(), v);
    }
}

impl Scenario {
    /// Canonical document with every default written out. Parsing it gives
    /// back an equal scenario.
    pub fn to_toml(&self) -> String {
        let mut root = Table::new();
        if let Some(n) = &self.name {
            root.insert("name".into(), Value::String(n.clone()));
        }
        if let Some(d) = &self.description {
            root.insert("description".into(), Value::String(d.clone()));
        }

        let mut op = Table::new();
        let kind = match &self.operator {
            OperatorSpec::RightShift => "right_shift",
            OperatorSpec::LeftShift => "left_shift",
            OperatorSpec::BandedToeplitz(entries) => {
                op.insert(
                    "offsets".into(),
                    Value::Array(entries.iter().map(|(k, _)| Value::Integer(*k)).collect()),
                );
                op.insert(
                    "coefficients".into(),
                    Value::Array(entries.iter().map(|(_, c)| complex_value(*c)).collect()),
                );
                "toeplitz"
            }
            OperatorSpec::Diagonal(rule) => {
                sequence_entries(&mut op, rule);
                "diagonal"
            }
            OperatorSpec::WeightedShift(rule) => {
                sequence_entries(&mut op, rule);
                "weighted_shift"
            }
        };
        op.insert("kind".into(), Value::String(kind.into()));
        op.insert("adjoint".into(), Value::Boolean(self.adjoint));
        root.insert("operator".into(), Value::Table(op));

        let mut f = Table::new();
        match &self.function {
            HoloFunction::Polynomial(p) => {
                f.insert("kind".into(), Value::String("polynomial".into()));
                f.insert("coefficients".into(), complex_array(p.coeffs()));
            }
            HoloFunction::PowerSeries(ps) => {
                f.insert("kind".into(), Value::String("series".into()));
                match ps.rule() {
                    SeriesRule::Exp { rate } => {
                        f.insert("rule".into(), Value::String("exp".into()));
                        f.insert("rate".into(), complex_value(*rate));
                    }
                    SeriesRule::Geometric { ratio } => {
                        f.insert("rule".into(), Value::String("geometric".into()));
                        f.insert("ratio".into(), complex_value(*ratio));
                    }
                }
                f.insert("radius".into(), Value::Float(ps.radius()));
                let mut tail = Table::new();
                match ps.tail() {
                    TailBound::Factorial { rate } => {
                        tail.insert("kind".into(), Value::String("factorial".into()));
                        tail.insert("rate".into(), Value::Float(rate));
                    }
                    TailBound::Geometric { ratio } => {
                        tail.insert("kind".into(), Value::String("geometric".into()));
                        tail.insert("ratio".into(), Value::Float(ratio));
                    }
                }
                f.insert("tail".into(), Value::Table(tail));
            }
        }
        root.insert("function".into(), Value::Table(f));

        let a = &self.analysis;
        let mut at = Table::new();
        at.insert(
            "N_list".into(),
            Value::Array(a.n_list.iter().map(|&n| Value::Integer(n as i64)).collect()),
        );
        at.insert("tol".into(), Value::Float(a.tol));
        at.insert("probe_tol".into(), Value::Float(a.probe_tol));
        at.insert("decay_threshold".into(), Value::Float(a.decay_threshold));
        at.insert("grid_size".into(), Value::Integer(a.grid_size as i64));
        root.insert("analysis".into(), Value::Table(at));

        let o = &self.outputs;
        let mut ot = Table::new();
        if let Some(p) = &o.report {
            ot.insert("report".into(), Value::String(p.display().to_string()));
        }
        if let Some(p) = &o.csv {
            ot.insert("csv".into(), Value::String(p.display().to_string()));
        }
        ot.insert("verbosity".into(), Value::String(o.verbosity.as_str().into()));
        ot.insert("timings".into(), Value::Boolean(o.timings));
        root.insert("outputs".into(), Value::Table(ot));

        toml::to_string(&root).expect("scenario tables always serialize")
    }

    /// Apply command-line overrides: a new zero-test band and a cap on `N`.
    pub fn with_overrides(mut self, tol: Option<f64>, max_n: Option<usize>) -> Result<Self, ScenarioErrors> {
        let mut errors = Vec::new();
        if let Some(t) = tol {
            if t > 0.0 && t.is_finite() {
                self.analysis.tol = t;
            } else {
                errors.push(ScenarioError { key: "--tol".into(), message: format!("must be positive, got {t}") });
            }
        }
        if let Some(m) = max_n {
            self.analysis.n_list.retain(|&n| n <= m);
            if self.analysis.n_list.is_empty() {
                errors.push(ScenarioError {
                    key: "--max-n".into(),
                    message: format!("no N_list entry is <= {m}"),
                });
            }
        }
        if errors.is_empty() {
            Ok(self)
        } else {
            Err(ScenarioErrors(errors))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keys(e: ScenarioErrors) -> Vec<String> {
        e.0.into_iter().map(|e| e.key).collect()
    }

    #[test]
    fn minimal_document_gets_defaults() {
        let s = parse_scenario("operator = \"right_shift\"\nfunction = [1, 1]\n").unwrap();
        assert_eq!(s.operator, OperatorSpec::RightShift);
        assert!(!s.adjoint);
        assert_eq!(s.analysis, Analysis::default());
        assert_eq!(s.outputs, Outputs::default());
        assert_eq!(s.function, HoloFunction::Polynomial(Polynomial::from_real(&[1.0, 1.0]).unwrap()));
    }

    #[test]
    fn n_list_must_increase() {
        let e = parse_scenario("operator = \"right_shift\"\nfunction = [1, 1]\n[analysis]\nN_list = [100, 50]\n")
            .unwrap_err();
        assert_eq!(e.0.len(), 1);
        assert_eq!(e.0[0].key, "analysis.N_list");
        assert_eq!(e.0[0].message, "N_list not increasing");
    }

    #[test]
    fn series_needs_tail() {
        let e = parse_scenario("operator = \"right_shift\"\n[function]\nkind = \"series\"\nrule = \"exp\"\n").unwrap_err();
        assert_eq!(e.0.len(), 1);
        assert_eq!(e.0[0].message, "tail bound required");
    }

    #[test]
    fn all_errors_are_collected() {
        let doc = r#"
            colour = "blue"
            [operator]
            kind = "toeplitz"
            offsets = [0, 1]
            [function]
            coefficients = []
            [analysis]
            tol = -1
            grid_size = 0
            N_list = [3, 2]
            [outputs]
            verbosity = "loud"
        "#;
        let mut k = keys(parse_scenario(doc).unwrap_err());
        k.sort();
        assert_eq!(
            k,
            [
                "analysis.N_list",
                "analysis.grid_size",
                "analysis.tol",
                "colour",
                "function.coefficients",
                "operator.coefficients",
                "outputs.verbosity"
            ]
        );
    }

    #[test]
    fn keys_foreign_to_the_kind_are_unknown() {
        let e = parse_scenario("function = [1]\n[operator]\nkind = \"right_shift\"\noffsets = [1]\n").unwrap_err();
        assert_eq!(keys(e), ["operator.offsets"]);
    }

    #[test]
    fn library_rejections_are_reported() {
        let doc = "function = [1]\n[operator]\nkind = \"toeplitz\"\noffsets = [-1, 1]\ncoefficients = [1, 1]\n";
        assert_eq!(keys(parse_scenario(doc).unwrap_err()), ["operator"]);
    }

    #[test]
    fn canonical_document_round_trips() {
        let docs = [
            "operator = \"right_shift\"\nfunction = [1, [0, 1]]\n",
            "function = [1, 2]\n[operator]\nkind = \"diagonal\"\nprefix = [3, [1, 1]]\ntail = \"reciprocal\"\n",
            "function = [1]\n[operator]\nkind = \"weighted_shift\"\ntail = \"periodic\"\ncycle = [4, 1]\nadjoint = true\n",
            "function = [1]\n[operator]\nkind = \"toeplitz\"\noffsets = [0, 2]\ncoefficients = [1, [0, -1.5]]\n",
            "operator = \"left_shift\"\n[function]\nkind = \"series\"\nrule = \"exp\"\ntail = { kind = \"factorial\", rate = 1 }\n",
            "operator = \"left_shift\"\n[function]\nkind = \"series\"\nrule = \"geometric\"\nratio = 0.5\ntail = { kind = \"geometric\", ratio = 0.5 }\n[outputs]\ncsv = \"x.csv\"\ntimings = true\n",
        ];
        for doc in docs {
            let s = parse_scenario(doc).unwrap();
            let again = parse_scenario(&s.to_toml()).unwrap_or_else(|e| panic!("{e}\n{}", s.to_toml()));
            assert_eq!(again, s);
            assert_eq!(again.to_toml(), s.to_toml());
        }
    }

    #[test]
    fn overrides() {
        let s = parse_scenario("operator = \"right_shift\"\nfunction = [1, 1]\n").unwrap();
        let t = s.clone().with_overrides(Some(1e-6), Some(600)).unwrap();
        assert_eq!(t.analysis.tol, 1e-6);
        assert_eq!(t.analysis.n_list, [250, 500]);
        assert!(s.clone().with_overrides(None, Some(10)).is_err());
        assert!(s.with_overrides(Some(0.0), None).is_err());
    }
}
