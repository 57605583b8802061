//! JSON model files.
//!
//! Every document carries `kind` and `version` (currently 1). Tables are
//! nested arrays in declared axis order:
//!
//! - `bell-model`: `settings.{a,b}`, `outcomes.{a,b}`, `lambdas`,
//!   `prior[a][b][λ]` (or a flat `prior[λ]` shared by all pairs) and
//!   `kernels[a][b][λ][A][B]`. Alternatively an `angles` block
//!   `{ "a": [...], "b": [...] }` describes the singlet measured at those
//!   angles; numbers are radians and strings may carry a `deg` or `°`
//!   suffix.
//! - `phenomenology`: `settings`, `outcomes` and `tables[a][b][A][B]`.
//! - `stat-family`: `thetas`, `outcomes` and `distributions[θ][x]`.
//! - `statistic`: `domain`, `codomain` and `map`, the value of each domain
//!   symbol in order.
//!
//! Diagnostics name the offending location as a JSON path such as
//! `$.kernels[0][1][0]`.

use crate::fisher::{StatFamily, Statistic};
use crate::prob::{ProbTable, Tolerance};
use crate::scenario::{build_singlet, BellModel, Phenomenology, Scenario};
use serde_json::{json, Map, Value};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("normalization error at {path}: {message}")]
    Normalization { path: String, message: String },
}

impl ParseError {
    pub fn path(&self) -> String {
        match self {
            ParseError::Syntax { line, column, .. } => format!("{line}:{column}"),
            ParseError::Schema { path, .. } | ParseError::Normalization { path, .. } => {
                path.clone()
            }
        }
    }
}

/// Any object a model file can hold.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelFile {
    BellModel(BellModel),
    Phenomenology(Phenomenology),
    StatFamily(StatFamily),
    Statistic(Statistic),
}

impl ModelFile {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelFile::BellModel(_) => "bell-model",
            ModelFile::Phenomenology(_) => "phenomenology",
            ModelFile::StatFamily(_) => "stat-family",
            ModelFile::Statistic(_) => "statistic",
        }
    }
}

type Parsed<T> = std::result::Result<T, ParseError>;

/// A JSON value together with its path from the document root.
#[derive(Clone, Copy)]
struct Node<'a> {
    value: &'a Value,
    path: &'a str,
}

struct Owned<'a> {
    value: &'a Value,
    path: String,
}

impl<'a> Owned<'a> {
    fn node(&self) -> Node<'_> {
        Node {
            value: self.value,
            path: &self.path,
        }
    }
}

fn schema<T>(path: &str, message: impl Into<String>) -> Parsed<T> {
    Err(ParseError::Schema {
        path: path.to_string(),
        message: message.into(),
    })
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

impl<'a> Node<'a> {
    fn object(self) -> Parsed<&'a Map<String, Value>> {
        self.value.as_object().map_or_else(
            || {
                schema(
                    self.path,
                    format!("expected an object, found {}", type_name(self.value)),
                )
            },
            Ok,
        )
    }

    /// Rejects keys outside `allowed`.
    fn keys(self, allowed: &[&str]) -> Parsed<()> {
        for key in self.object()?.keys() {
            if !allowed.contains(&key.as_str()) {
                return schema(self.path, format!("unexpected key '{key}'"));
            }
        }
        Ok(())
    }

    fn field(self, key: &str) -> Parsed<Owned<'a>> {
        match self.object()?.get(key) {
            Some(value) => Ok(Owned {
                value,
                path: format!("{}.{key}", self.path),
            }),
            None => schema(self.path, format!("missing key '{key}'")),
        }
    }

    fn optional(self, key: &str) -> Parsed<Option<Owned<'a>>> {
        Ok(self.object()?.get(key).map(|value| Owned {
            value,
            path: format!("{}.{key}", self.path),
        }))
    }

    fn items(self) -> Parsed<Vec<Owned<'a>>> {
        match self.value.as_array() {
            Some(xs) => Ok(xs
                .iter()
                .enumerate()
                .map(|(i, value)| Owned {
                    value,
                    path: format!("{}[{i}]", self.path),
                })
                .collect()),
            None => schema(
                self.path,
                format!("expected an array, found {}", type_name(self.value)),
            ),
        }
    }

    fn items_len(self, n: usize, what: &str) -> Parsed<Vec<Owned<'a>>> {
        let items = self.items()?;
        if items.len() != n {
            return schema(
                self.path,
                format!(
                    "expected {n} entries (one per {what}), found {}",
                    items.len()
                ),
            );
        }
        Ok(items)
    }

    fn string(self) -> Parsed<String> {
        match self.value.as_str() {
            Some(s) => Ok(s.to_string()),
            None => schema(
                self.path,
                format!("expected a string, found {}", type_name(self.value)),
            ),
        }
    }

    fn strings(self) -> Parsed<Vec<String>> {
        self.items()?.iter().map(|o| o.node().string()).collect()
    }

    fn number(self) -> Parsed<f64> {
        match self.value.as_f64() {
            Some(x) => Ok(x),
            None => schema(
                self.path,
                format!("expected a number, found {}", type_name(self.value)),
            ),
        }
    }

    /// A nested array of the given shape, flattened row-major.
    fn tensor(self, shape: &[(usize, &str)], out: &mut Vec<f64>) -> Parsed<()> {
        match shape.split_first() {
            None => {
                out.push(self.number()?);
                Ok(())
            }
            Some((&(n, what), rest)) => {
                for item in self.items_len(n, what)? {
                    item.node().tensor(rest, out)?;
                }
                Ok(())
            }
        }
    }

    fn angle(self) -> Parsed<f64> {
        if let Some(x) = self.value.as_f64() {
            return Ok(x);
        }
        let Some(s) = self.value.as_str() else {
            return schema(
                self.path,
                "expected an angle (number of radians or string like \"90deg\")",
            );
        };
        let s = s.trim();
        let (digits, degrees) = if let Some(d) = s.strip_suffix("deg") {
            (d, true)
        } else if let Some(d) = s.strip_suffix('°') {
            (d, true)
        } else if let Some(d) = s.strip_suffix("rad") {
            (d, false)
        } else {
            (s, false)
        };
        match digits.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(if degrees { x.to_radians() } else { x }),
            _ => schema(self.path, format!("cannot read '{s}' as an angle")),
        }
    }
}

fn syntax(e: serde_json::Error) -> ParseError {
    ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Parses a model file, checking every table against `tol.norm`.
pub fn parse_model(text: &str, tol: &Tolerance) -> Parsed<ModelFile> {
    let doc: Value = serde_json::from_str(text).map_err(syntax)?;
    let root = Node {
        value: &doc,
        path: "$",
    };
    let kind = root.field("kind")?.node().string()?;
    let version = root.field("version")?;
    match version.value.as_u64() {
        Some(FORMAT_VERSION) => {}
        _ => {
            return schema(
                &version.path,
                format!(
                    "unsupported version {}, expected {FORMAT_VERSION}",
                    version.value
                ),
            )
        }
    }
    match kind.as_str() {
        "bell-model" => parse_bell_model(root, tol).map(ModelFile::BellModel),
        "phenomenology" => parse_phenomenology(root, tol).map(ModelFile::Phenomenology),
        "stat-family" => parse_family(root, tol).map(ModelFile::StatFamily),
        "statistic" => parse_statistic(root).map(ModelFile::Statistic),
        other => schema(
            "$.kind",
            format!("unknown kind '{other}' (expected bell-model, phenomenology, stat-family or statistic)"),
        ),
    }
}

fn pair_of_lists(node: Node<'_>) -> Parsed<(Vec<String>, Vec<String>)> {
    node.keys(&["a", "b"])?;
    Ok((
        node.field("a")?.node().strings()?,
        node.field("b")?.node().strings()?,
    ))
}

fn parse_scenario(root: Node<'_>) -> Parsed<Scenario> {
    let settings = root.field("settings")?;
    let outcomes = root.field("outcomes")?;
    let (sa, sb) = pair_of_lists(settings.node())?;
    let (oa, ob) = pair_of_lists(outcomes.node())?;
    Scenario::new(&sa, &sb, &oa, &ob).or_else(|e| schema(&settings.path, e.to_string()))
}

fn table(
    axes: Vec<crate::prob::Axis>,
    values: Vec<f64>,
    tol: &Tolerance,
    path: &str,
    at: &str,
) -> Parsed<ProbTable> {
    ProbTable::new(axes, values, tol).map_err(|e| ParseError::Normalization {
        path: path.to_string(),
        message: format!("{at}: {e}"),
    })
}

fn parse_bell_model(root: Node<'_>, tol: &Tolerance) -> Parsed<BellModel> {
    if let Some(angles) = root.optional("angles")? {
        root.keys(&["kind", "version", "angles"])?;
        let node = angles.node();
        node.keys(&["a", "b"])?;
        let read = |key: &str| -> Parsed<Vec<f64>> {
            node.field(key)?
                .node()
                .items()?
                .iter()
                .map(|o| o.node().angle())
                .collect()
        };
        let (a, b) = (read("a")?, read("b")?);
        return build_singlet(&a, &b).or_else(|e| schema(&angles.path, e.to_string()));
    }
    root.keys(&[
        "kind", "version", "settings", "outcomes", "lambdas", "prior", "kernels",
    ])?;
    let s = parse_scenario(root)?;
    let lambdas_node = root.field("lambdas")?;
    let lambdas = lambdas_node.node().strings()?;
    let lambda_axis = vec![crate::prob::Axis::new(
        crate::scenario::AXIS_LAMBDA,
        lambdas.clone(),
    )];
    let (na, nb, nl) = (s.settings_a.len(), s.settings_b.len(), lambdas.len());
    let (ka, kb) = (s.outcomes_a.len(), s.outcomes_b.len());

    let prior = root.field("prior")?;
    let flat = prior
        .value
        .as_array()
        .is_some_and(|xs| xs.first().is_some_and(Value::is_number));
    let mut priors = Vec::with_capacity(na * nb);
    if flat {
        let mut w = Vec::new();
        prior.node().tensor(&[(nl, "hidden state")], &mut w)?;
        let t = table(lambda_axis.clone(), w, tol, &prior.path, "shared prior")?;
        priors = vec![t; na * nb];
    } else {
        for (ia, row) in prior
            .node()
            .items_len(na, "Alice setting")?
            .iter()
            .enumerate()
        {
            for (ib, cell) in row.node().items_len(nb, "Bob setting")?.iter().enumerate() {
                let mut w = Vec::new();
                cell.node().tensor(&[(nl, "hidden state")], &mut w)?;
                let at = format!("prior at (a={}, b={})", s.settings_a[ia], s.settings_b[ib]);
                priors.push(table(lambda_axis.clone(), w, tol, &cell.path, &at)?);
            }
        }
    }

    let kernels_node = root.field("kernels")?;
    let mut kernels = Vec::with_capacity(na * nb);
    for (ia, row) in kernels_node
        .node()
        .items_len(na, "Alice setting")?
        .iter()
        .enumerate()
    {
        for (ib, cell) in row.node().items_len(nb, "Bob setting")?.iter().enumerate() {
            let mut family = Vec::with_capacity(nl);
            for (l, k) in cell
                .node()
                .items_len(nl, "hidden state")?
                .iter()
                .enumerate()
            {
                let mut w = Vec::new();
                k.node()
                    .tensor(&[(ka, "Alice outcome"), (kb, "Bob outcome")], &mut w)?;
                let at = format!(
                    "kernel at (a={}, b={}, lambda={})",
                    s.settings_a[ia], s.settings_b[ib], lambdas[l]
                );
                family.push(table(s.outcome_axes(), w, tol, &k.path, &at)?);
            }
            kernels.push(family);
        }
    }
    BellModel::new(s, lambdas, priors, kernels)
        .or_else(|e| schema(&lambdas_node.path, e.to_string()))
}

fn parse_phenomenology(root: Node<'_>, tol: &Tolerance) -> Parsed<Phenomenology> {
    root.keys(&["kind", "version", "settings", "outcomes", "tables"])?;
    let s = parse_scenario(root)?;
    let (ka, kb) = (s.outcomes_a.len(), s.outcomes_b.len());
    let node = root.field("tables")?;
    let mut tables = Vec::with_capacity(s.n_pairs());
    for (ia, row) in node
        .node()
        .items_len(s.settings_a.len(), "Alice setting")?
        .iter()
        .enumerate()
    {
        for (ib, cell) in row
            .node()
            .items_len(s.settings_b.len(), "Bob setting")?
            .iter()
            .enumerate()
        {
            let mut w = Vec::new();
            cell.node()
                .tensor(&[(ka, "Alice outcome"), (kb, "Bob outcome")], &mut w)?;
            let at = format!("table at (a={}, b={})", s.settings_a[ia], s.settings_b[ib]);
            tables.push(table(s.outcome_axes(), w, tol, &cell.path, &at)?);
        }
    }
    Phenomenology::new(s, tables).or_else(|e| schema(&node.path, e.to_string()))
}

fn parse_family(root: Node<'_>, tol: &Tolerance) -> Parsed<StatFamily> {
    root.keys(&["kind", "version", "thetas", "outcomes", "distributions"])?;
    let thetas_node = root.field("thetas")?;
    let thetas = thetas_node.node().strings()?;
    let outcomes = root.field("outcomes")?.node().strings()?;
    let node = root.field("distributions")?;
    let mut rows = Vec::with_capacity(thetas.len());
    for (th, item) in node
        .node()
        .items_len(thetas.len(), "parameter")?
        .iter()
        .enumerate()
    {
        let mut w = Vec::new();
        item.node().tensor(&[(outcomes.len(), "outcome")], &mut w)?;
        let axes = vec![crate::prob::Axis::new(
            crate::fisher::AXIS_X,
            outcomes.clone(),
        )];
        table(
            axes,
            w.clone(),
            tol,
            &item.path,
            &format!("distribution at theta={}", thetas[th]),
        )?;
        rows.push(w);
    }
    StatFamily::new(thetas, outcomes, rows, tol)
        .or_else(|e| schema(&thetas_node.path, e.to_string()))
}

fn parse_statistic(root: Node<'_>) -> Parsed<Statistic> {
    root.keys(&["kind", "version", "domain", "codomain", "map"])?;
    let domain = root.field("domain")?.node().strings()?;
    let codomain_node = root.field("codomain")?;
    let codomain = codomain_node.node().strings()?;
    let map_node = root.field("map")?;
    let mut map = Vec::with_capacity(domain.len());
    for item in map_node.node().items_len(domain.len(), "domain symbol")? {
        let v = item.node().string()?;
        match codomain.iter().position(|c| *c == v) {
            Some(i) => map.push(i),
            None => return schema(&item.path, format!("'{v}' is not in the codomain")),
        }
    }
    let stat = Statistic::new(domain, codomain.clone(), map)
        .or_else(|e| schema(&map_node.path, e.to_string()))?;
    if stat.codomain().len() != codomain.len() {
        return schema(
            &codomain_node.path,
            "codomain lists values the map never takes",
        );
    }
    Ok(stat)
}

fn scenario_json(s: &Scenario) -> (Value, Value) {
    (
        json!({ "a": s.settings_a, "b": s.settings_b }),
        json!({ "a": s.outcomes_a, "b": s.outcomes_b }),
    )
}

fn outcome_grid(s: &Scenario, t: &ProbTable) -> Value {
    let kb = s.outcomes_b.len();
    Value::Array(t.values().chunks(kb).map(|row| json!(row)).collect())
}

/// Serializes to pretty JSON; floats are written in shortest round-trip
/// form, so parsing the output yields an equal object.
pub fn write_model(m: &ModelFile) -> String {
    let body = match m {
        ModelFile::BellModel(m) => {
            let s = m.scenario();
            let (settings, outcomes) = scenario_json(s);
            let nb = s.settings_b.len();
            let grid = |f: &dyn Fn(usize, usize) -> Value| -> Value {
                Value::Array(
                    (0..s.settings_a.len())
                        .map(|ia| Value::Array((0..nb).map(|ib| f(ia, ib)).collect()))
                        .collect(),
                )
            };
            json!({
                "kind": "bell-model",
                "version": FORMAT_VERSION,
                "settings": settings,
                "outcomes": outcomes,
                "lambdas": m.lambdas(),
                "prior": grid(&|ia, ib| json!(m.prior(ia, ib).values())),
                "kernels": grid(&|ia, ib| Value::Array(
                    (0..m.lambdas().len()).map(|l| outcome_grid(s, m.kernel(ia, ib, l))).collect()
                )),
            })
        }
        ModelFile::Phenomenology(ph) => {
            let s = ph.scenario();
            let (settings, outcomes) = scenario_json(s);
            let tables: Vec<Value> = (0..s.settings_a.len())
                .map(|ia| {
                    Value::Array(
                        (0..s.settings_b.len())
                            .map(|ib| outcome_grid(s, ph.table(ia, ib)))
                            .collect(),
                    )
                })
                .collect();
            json!({
                "kind": "phenomenology",
                "version": FORMAT_VERSION,
                "settings": settings,
                "outcomes": outcomes,
                "tables": tables,
            })
        }
        ModelFile::StatFamily(f) => json!({
            "kind": "stat-family",
            "version": FORMAT_VERSION,
            "thetas": f.thetas(),
            "outcomes": f.outcomes(),
            "distributions": (0..f.thetas().len()).map(|th| f.table(th).values().to_vec()).collect::<Vec<_>>(),
        }),
        ModelFile::Statistic(t) => json!({
            "kind": "statistic",
            "version": FORMAT_VERSION,
            "domain": t.domain(),
            "codomain": t.codomain(),
            "map": t.map().iter().map(|&i| t.codomain()[i].clone()).collect::<Vec<_>>(),
        }),
    };
    let mut text = serde_json::to_string_pretty(&body).expect("JSON values always serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{build_deterministic_local, build_pr_box};
    use std::collections::BTreeMap;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn round_trip(m: ModelFile) {
        let text = write_model(&m);
        assert_eq!(parse_model(&text, &tol()).unwrap(), m, "{text}");
    }

    #[test]
    fn deterministic_local_round_trips() {
        let s = Scenario::chsh();
        let ra: BTreeMap<String, String> = [("0", "+1"), ("1", "-1")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let rb: BTreeMap<String, String> = [("0", "-1"), ("1", "-1")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        round_trip(ModelFile::BellModel(
            build_deterministic_local(&s, &ra, &rb).unwrap(),
        ));
    }

    #[test]
    fn singlet_and_pr_box_round_trip() {
        let singlet = build_singlet(&[0.0, 0.3], &[1.1, 2.9]).unwrap();
        round_trip(ModelFile::Phenomenology(singlet.predict()));
        round_trip(ModelFile::BellModel(singlet));
        round_trip(ModelFile::BellModel(build_pr_box()));
    }

    #[test]
    fn family_and_statistic_round_trip() {
        let f = StatFamily::bernoulli(&[0.1, 0.35]).unwrap();
        round_trip(ModelFile::Statistic(
            Statistic::identity(f.outcomes()).unwrap(),
        ));
        round_trip(ModelFile::StatFamily(f));
    }

    #[test]
    fn angles_shorthand_matches_builder() {
        let text = r#"{"kind":"bell-model","version":1,
            "angles":{"a":[0,"90°"],"b":["45deg","135deg"]}}"#;
        let parsed = parse_model(text, &tol()).unwrap();
        let q = std::f64::consts::FRAC_PI_4;
        let built = build_singlet(
            &[0.0, 90f64.to_radians()],
            &[45f64.to_radians(), 135f64.to_radians()],
        )
        .unwrap();
        assert_eq!(parsed, ModelFile::BellModel(built.clone()));
        let close = build_singlet(&[0.0, 2.0 * q], &[q, 3.0 * q]).unwrap();
        for (x, y) in built
            .predict()
            .tables()
            .iter()
            .zip(close.predict().tables())
        {
            assert!(crate::table_close(x, y, &tol()).unwrap().close);
        }
    }

    #[test]
    fn flat_prior_shorthand() {
        let text = r#"{"kind":"bell-model","version":1,
            "settings":{"a":["x"],"b":["y"]},"outcomes":{"a":["0","1"],"b":["0"]},
            "lambdas":["l0","l1"],"prior":[0.25,0.75],
            "kernels":[[[[[1],[0]],[[0.5],[0.5]]]]]}"#;
        let ModelFile::BellModel(m) = parse_model(text, &tol()).unwrap() else {
            panic!("expected a bell model")
        };
        assert_eq!(m.prior(0, 0).values(), &[0.25, 0.75]);
    }

    #[test]
    fn syntax_errors_give_a_location() {
        let e = parse_model("{\"kind\": \"bell-model\",\n  \"version\": }", &tol()).unwrap_err();
        assert!(matches!(e, ParseError::Syntax { line: 2, .. }), "{e}");
        assert!(e.to_string().contains("line 2"));
    }

    #[test]
    fn schema_errors_name_the_path() {
        let text = r#"{"kind":"phenomenology","version":1,
            "settings":{"a":["0"],"b":["0"]},"outcomes":{"a":["u","d"],"b":["u","d"]},
            "tables":[[[[0.5,0.5],[0.0]]]]}"#;
        let e = parse_model(text, &tol()).unwrap_err();
        assert_eq!(e.path(), "$.tables[0][0][1]", "{e}");
        let e = parse_model(r#"{"kind":"bell-model","version":2}"#, &tol()).unwrap_err();
        assert_eq!(e.path(), "$.version");
        let e = parse_model(r#"{"kind":"teapot","version":1}"#, &tol()).unwrap_err();
        assert_eq!(e.path(), "$.kind");
        let text = r#"{"kind":"bell-model","version":1,"angles":{"a":["ninety"],"b":[0]}}"#;
        assert_eq!(
            parse_model(text, &tol()).unwrap_err().path(),
            "$.angles.a[0]"
        );
    }

    #[test]
    fn normalization_errors_name_the_index() {
        let text = r#"{"kind":"bell-model","version":1,
            "settings":{"a":["a0","a1"],"b":["b0"]},"outcomes":{"a":["+","-"],"b":["+"]},
            "lambdas":["l0"],"prior":[[[1]],[[1]]],
            "kernels":[[[[[0.5],[0.5]]]],[[[[0.5],[0.4]]]]]}"#;
        let e = parse_model(text, &tol()).unwrap_err();
        assert!(matches!(e, ParseError::Normalization { .. }), "{e}");
        assert_eq!(e.path(), "$.kernels[1][0][0]");
        assert!(e.to_string().contains("a=a1, b=b0, lambda=l0"), "{e}");
    }

    #[test]
    fn statistic_map_must_hit_codomain() {
        let text = r#"{"kind":"statistic","version":1,"domain":["x","y"],"codomain":["u"],"map":["u","v"]}"#;
        assert_eq!(parse_model(text, &tol()).unwrap_err().path(), "$.map[1]");
        let text =
            r#"{"kind":"statistic","version":1,"domain":["x"],"codomain":["u","v"],"map":["u"]}"#;
        assert_eq!(parse_model(text, &tol()).unwrap_err().path(), "$.codomain");
    }
}
