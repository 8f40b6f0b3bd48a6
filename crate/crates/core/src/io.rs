//! JSON input and output.
//!
//! Rationals travel as strings (`"2/3"`, `"-1"`, `"0.25"`); plain JSON
//! numbers are accepted on input when they have no exponent. Node-keyed
//! objects use the decimal node id as key.
//!
//! ```text
//! tree:     {"horizon": T, "nodes": [{"id": 0, "parent": null}, {"id": 1, "parent": 0, "prob": "1/3"}, ...]}
//! market:   {"tree": <tree>, "assets": d, "prices": {"0": ["1", "2", "7"], ...}}
//! strategy: {"assets": d, "holdings": {"0": ["3", "2", "-1"], ...}}
//! deflator: {"kind": "supermartingale", "z": {"0": "1", ...}}
//! sequence: {"strategies": [<strategy>, ...], "xi": {"1": "0", ...}, "epsilon": "1/100"}
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::ser::{SerializeMap, SerializeSeq, SerializeStruct};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{json, Value};

use crate::deflator::{Deflator, DeflatorKind};
use crate::market::{Market, MarketError, Strategy};
use crate::rational::{self, Rational};
use crate::scenario_tree::{NodeId, NodeValues, ScenarioTree, TreeError};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Missing { path: PathBuf, source: std::io::Error },
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Market(#[from] MarketError),
}

impl InputError {
    fn field(field: impl Into<String>, message: impl ToString) -> Self {
        InputError::Field {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

impl From<serde_json::Error> for InputError {
    fn from(e: serde_json::Error) -> Self {
        InputError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

pub fn read_file(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|source| InputError::Missing {
        path: path.to_path_buf(),
        source,
    })
}

// ---- serialization helpers -------------------------------------------------

pub fn serialize_rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational::to_string(r))
}

pub fn serialize_opt_rational<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => serialize_rational(r, s),
        None => s.serialize_none(),
    }
}

pub fn serialize_rationals<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&rational::to_string(x))?;
    }
    seq.end()
}

pub fn serialize_opt_rationals<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => serialize_rationals(v, s),
        None => s.serialize_none(),
    }
}

pub fn serialize_rational_rows<S: Serializer>(rows: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
    let strings: Vec<Vec<String>> = rows.iter().map(|r| strings(r)).collect();
    strings.serialize(s)
}

/// Dense node-indexed values as a node-keyed object.
pub fn serialize_node_values<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(v.len()))?;
    for (k, x) in v.iter().enumerate() {
        map.serialize_entry(&k.to_string(), &rational::to_string(x))?;
    }
    map.end()
}

pub fn serialize_strategy<S: Serializer>(strategy: &Strategy, s: S) -> Result<S::Ok, S::Error> {
    let holdings: BTreeMap<usize, Vec<String>> = strategy.iter().map(|(n, h)| (n.0, strings(h))).collect();
    let mut st = s.serialize_struct("Strategy", 2)?;
    st.serialize_field("assets", &strategy.assets())?;
    st.serialize_field("holdings", &holdings)?;
    st.end()
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(rational::to_string).collect()
}

// ---- emitters ----------------------------------------------------------------

pub fn tree_to_json(tree: &ScenarioTree) -> Value {
    let nodes: Vec<Value> = tree
        .node_ids()
        .map(|n| match tree.parent(n) {
            None => json!({"id": n.0, "parent": null}),
            Some(p) => json!({"id": n.0, "parent": p.0, "prob": rational::to_string(tree.transition_prob(n))}),
        })
        .collect();
    json!({"horizon": tree.horizon(), "nodes": nodes})
}

pub fn market_to_json(market: &Market) -> Value {
    let prices: serde_json::Map<String, Value> = market
        .tree()
        .node_ids()
        .map(|n| (n.0.to_string(), json!(strings(market.price(n)))))
        .collect();
    json!({"tree": tree_to_json(market.tree()), "assets": market.assets(), "prices": prices})
}

pub fn strategy_to_json(strategy: &Strategy) -> Value {
    serialize_strategy(strategy, serde_json::value::Serializer).expect("in-memory serialization")
}

pub fn deflator_to_json(deflator: &Deflator) -> Value {
    serde_json::to_value(deflator).expect("in-memory serialization")
}

// ---- parsers -----------------------------------------------------------------

/// A rational given as a string or an exponent-free JSON number.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Literal {
    Text(String),
    Number(serde_json::Number),
}

impl Literal {
    fn value(&self, field: &str) -> Result<Rational, InputError> {
        let text = match self {
            Literal::Text(s) => s.clone(),
            Literal::Number(n) => n.to_string(),
        };
        rational::parse(&text).map_err(|e| InputError::field(field, e))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeDoc {
    horizon: Option<usize>,
    nodes: Vec<NodeDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: usize,
    parent: Option<usize>,
    prob: Option<Literal>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarketDoc {
    tree: TreeDoc,
    assets: usize,
    prices: BTreeMap<String, Vec<Literal>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyDoc {
    assets: usize,
    holdings: BTreeMap<String, Vec<Literal>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeflatorDoc {
    #[serde(default = "default_kind")]
    kind: DeflatorKind,
    z: BTreeMap<String, Literal>,
}

fn default_kind() -> DeflatorKind {
    DeflatorKind::Supermartingale
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceDoc {
    strategies: Vec<StrategyDoc>,
    xi: BTreeMap<String, Literal>,
    epsilon: Literal,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    Many(Vec<StrategyDoc>),
    One(StrategyDoc),
}

fn node_key(key: &str, field: &str) -> Result<NodeId, InputError> {
    key.trim()
        .parse::<usize>()
        .map(NodeId)
        .map_err(|_| InputError::field(field, format!("node key {key:?} is not a node id")))
}

fn vector(values: &[Literal], field: &str) -> Result<Vec<Rational>, InputError> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| v.value(&format!("{field}[{i}]")))
        .collect()
}

fn build_tree(doc: TreeDoc, prefix: &str) -> Result<ScenarioTree, InputError> {
    let n = doc.nodes.len();
    let mut parents: Vec<Option<(Option<NodeId>, Rational)>> = vec![None; n];
    for (k, node) in doc.nodes.into_iter().enumerate() {
        let field = format!("{prefix}nodes[{k}]");
        if node.id >= n {
            return Err(InputError::field(
                format!("{field}.id"),
                format!("id {} out of range for {n} nodes", node.id),
            ));
        }
        if parents[node.id].is_some() {
            return Err(InputError::field(format!("{field}.id"), format!("duplicate id {}", node.id)));
        }
        let prob = match (&node.parent, node.prob) {
            (_, Some(p)) => p.value(&format!("{field}.prob"))?,
            (None, None) => rational::one(),
            (Some(_), None) => return Err(InputError::field(format!("{field}.prob"), "missing transition probability")),
        };
        parents[node.id] = Some((node.parent.map(NodeId), prob));
    }
    let parents = parents.into_iter().map(|s| s.expect("ids are a permutation")).collect();
    Ok(ScenarioTree::new(doc.horizon, parents)?)
}

pub fn parse_tree(text: &str) -> Result<ScenarioTree, InputError> {
    build_tree(serde_json::from_str(text)?, "")
}

pub fn parse_market(text: &str) -> Result<Market, InputError> {
    let doc: MarketDoc = serde_json::from_str(text)?;
    let tree = build_tree(doc.tree, "tree.")?;
    let mut prices: Vec<Option<Vec<Rational>>> = vec![None; tree.len()];
    for (key, values) in &doc.prices {
        let field = format!("prices.{key}");
        let node = node_key(key, &field)?;
        if !tree.contains(node) {
            return Err(InputError::field(field, format!("unknown node {node}")));
        }
        if values.len() != doc.assets {
            return Err(InputError::field(
                field,
                format!("expected {} prices, found {}", doc.assets, values.len()),
            ));
        }
        prices[node.0] = Some(vector(values, &field)?);
    }
    let prices = prices
        .into_iter()
        .enumerate()
        .map(|(k, p)| p.ok_or_else(|| InputError::field(format!("prices.{k}"), "missing price vector")))
        .collect::<Result<Vec<_>, _>>()?;
    if doc.assets == 0 {
        return Err(InputError::field("assets", MarketError::NoAssets));
    }
    Ok(Market::new(tree, prices)?)
}

fn build_strategy(doc: StrategyDoc, market: &Market, prefix: &str) -> Result<Strategy, InputError> {
    if doc.assets != market.assets() {
        return Err(InputError::field(
            format!("{prefix}assets"),
            format!("strategy has {} assets, market has {}", doc.assets, market.assets()),
        ));
    }
    let mut holdings = BTreeMap::new();
    for (key, values) in &doc.holdings {
        let field = format!("{prefix}holdings.{key}");
        let node = node_key(key, &field)?;
        holdings.insert(node, vector(values, &field)?);
    }
    Ok(Strategy::new(market.tree(), doc.assets, holdings)?)
}

pub fn parse_strategy(text: &str, market: &Market) -> Result<Strategy, InputError> {
    build_strategy(serde_json::from_str(text)?, market, "")
}

/// A single strategy object or an array of them.
pub fn parse_strategies(text: &str, market: &Market) -> Result<Vec<Strategy>, InputError> {
    match serde_json::from_str(text)? {
        OneOrMany::One(doc) => Ok(vec![build_strategy(doc, market, "")?]),
        OneOrMany::Many(docs) => docs
            .into_iter()
            .enumerate()
            .map(|(k, d)| build_strategy(d, market, &format!("[{k}].")))
            .collect(),
    }
}

pub fn parse_deflator(text: &str, market: &Market) -> Result<Deflator, InputError> {
    let doc: DeflatorDoc = serde_json::from_str(text)?;
    let tree = market.tree();
    let mut z: Vec<Option<Rational>> = vec![None; tree.len()];
    for (key, value) in &doc.z {
        let field = format!("z.{key}");
        let node = node_key(key, &field)?;
        if !tree.contains(node) {
            return Err(InputError::field(field, format!("unknown node {node}")));
        }
        z[node.0] = Some(value.value(&field)?);
    }
    let z = z
        .into_iter()
        .enumerate()
        .map(|(k, v)| v.ok_or_else(|| InputError::field(format!("z.{k}"), "missing deflator value")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Deflator::new(z, doc.kind))
}

pub struct SequenceInput {
    pub strategies: Vec<Strategy>,
    pub xi: NodeValues,
    pub epsilon: Rational,
}

pub fn parse_sequence(text: &str, market: &Market) -> Result<SequenceInput, InputError> {
    let doc: SequenceDoc = serde_json::from_str(text)?;
    let strategies = doc
        .strategies
        .into_iter()
        .enumerate()
        .map(|(k, d)| build_strategy(d, market, &format!("strategies[{k}].")))
        .collect::<Result<Vec<_>, _>>()?;
    let mut xi = NodeValues::new();
    for (key, value) in &doc.xi {
        let field = format!("xi.{key}");
        xi.insert(node_key(key, &field)?, value.value(&field)?);
    }
    let epsilon = doc.epsilon.value("epsilon")?;
    Ok(SequenceInput { strategies, xi, epsilon })
}
