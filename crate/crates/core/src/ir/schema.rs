use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Schemas at or beyond this depth are flagged for compact YAML rendering.
pub const YAML_DEPTH_THRESHOLD: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemaKind {
    Object,
    Array,
    String,
    Number,
    Integer,
    Boolean,
    Null,
}

impl SchemaKind {
    pub fn parse(text: &str) -> Option<Self> {
        Some(match text {
            "object" => SchemaKind::Object,
            "array" => SchemaKind::Array,
            "string" => SchemaKind::String,
            "number" => SchemaKind::Number,
            "integer" => SchemaKind::Integer,
            "boolean" => SchemaKind::Boolean,
            "null" => SchemaKind::Null,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SchemaKind::Object => "object",
            SchemaKind::Array => "array",
            SchemaKind::String => "string",
            SchemaKind::Number => "number",
            SchemaKind::Integer => "integer",
            SchemaKind::Boolean => "boolean",
            SchemaKind::Null => "null",
        }
    }

    pub fn is_container(self) -> bool {
        matches!(self, SchemaKind::Object | SchemaKind::Array)
    }
}

impl fmt::Display for SchemaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The subset of JSON Schema the IR models: a type, optional description,
/// object properties, array items and string enums.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaNode {
    #[serde(rename = "type")]
    pub kind: SchemaKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub properties: IndexMap<String, SchemaNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub items: Option<Box<SchemaNode>>,
    #[serde(rename = "enum", default, skip_serializing_if = "Option::is_none")]
    pub enum_values: Option<Vec<String>>,
}

impl SchemaNode {
    pub fn scalar(kind: SchemaKind) -> Self {
        SchemaNode {
            kind,
            description: None,
            properties: IndexMap::new(),
            items: None,
            enum_values: None,
        }
    }

    pub fn object<I, K>(props: I) -> Self
    where
        I: IntoIterator<Item = (K, SchemaNode)>,
        K: Into<String>,
    {
        SchemaNode {
            properties: props.into_iter().map(|(k, v)| (k.into(), v)).collect(),
            ..Self::scalar(SchemaKind::Object)
        }
    }

    pub fn array(items: SchemaNode) -> Self {
        SchemaNode {
            items: Some(Box::new(items)),
            ..Self::scalar(SchemaKind::Array)
        }
    }

    pub fn with_description(mut self, text: impl Into<String>) -> Self {
        self.description = Some(text.into());
        self
    }

    pub fn with_enum<I: IntoIterator<Item = S>, S: Into<String>>(mut self, values: I) -> Self {
        self.enum_values = Some(values.into_iter().map(Into::into).collect());
        self
    }

    /// Paths (dotted, `[]` for array items) of nodes whose shape contradicts
    /// their kind: properties on a non-object, items on a non-array.
    pub fn shape_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_shape_violations("", &mut out);
        out
    }

    fn collect_shape_violations(&self, path: &str, out: &mut Vec<String>) {
        let here = if path.is_empty() { "(root)" } else { path };
        if !self.properties.is_empty() && self.kind != SchemaKind::Object {
            out.push(format!("{here}: `properties` on a {} node", self.kind));
        }
        if self.items.is_some() && self.kind != SchemaKind::Array {
            out.push(format!("{here}: `items` on a {} node", self.kind));
        }
        for (name, child) in &self.properties {
            let p = if path.is_empty() {
                name.clone()
            } else {
                format!("{path}.{name}")
            };
            child.collect_shape_violations(&p, out);
        }
        if let Some(items) = &self.items {
            items.collect_shape_violations(&format!("{path}[]"), out);
        }
    }
}

/// Depth of the schema tree. A scalar is 1; an object is one more than its
/// deepest property (1 when it has none); an array is one more than its
/// items (1 when items are absent).
pub fn max_nesting_depth(schema: &SchemaNode) -> usize {
    let below = schema
        .properties
        .values()
        .map(max_nesting_depth)
        .chain(schema.items.as_deref().map(max_nesting_depth))
        .max()
        .unwrap_or(0);
    1 + below
}

pub fn detect_yaml_optimization(schema: Option<&SchemaNode>) -> bool {
    schema.is_some_and(|s| max_nesting_depth(s) >= YAML_DEPTH_THRESHOLD)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemaParseError {
    MissingType { path: String },
    UnknownType { path: String, found: String },
    NotAnObject { path: String },
}

impl fmt::Display for SchemaParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemaParseError::MissingType { path } => {
                write!(f, "schema node `{path}` has no string `type`")
            }
            SchemaParseError::UnknownType { path, found } => {
                write!(f, "schema node `{path}` has unknown type `{found}`")
            }
            SchemaParseError::NotAnObject { path } => {
                write!(f, "schema node `{path}` must be a JSON object")
            }
        }
    }
}

/// Converts a parsed JSON value into a [`SchemaNode`]. Keywords outside the
/// modelled subset are ignored; shape consistency is checked separately.
pub fn schema_from_json(value: &Value) -> Result<SchemaNode, SchemaParseError> {
    from_json_at(value, "(root)")
}

fn from_json_at(value: &Value, path: &str) -> Result<SchemaNode, SchemaParseError> {
    let obj = value
        .as_object()
        .ok_or_else(|| SchemaParseError::NotAnObject {
            path: path.to_owned(),
        })?;
    let kind = match obj.get("type") {
        Some(Value::String(t)) => {
            SchemaKind::parse(t).ok_or_else(|| SchemaParseError::UnknownType {
                path: path.to_owned(),
                found: t.clone(),
            })?
        }
        Some(other) => {
            return Err(SchemaParseError::UnknownType {
                path: path.to_owned(),
                found: other.to_string(),
            })
        }
        None => {
            return Err(SchemaParseError::MissingType {
                path: path.to_owned(),
            })
        }
    };
    let child_path = |name: &str| {
        if path == "(root)" {
            name.to_owned()
        } else {
            format!("{path}.{name}")
        }
    };
    let mut properties = IndexMap::new();
    if let Some(props) = obj.get("properties") {
        let props = props
            .as_object()
            .ok_or_else(|| SchemaParseError::NotAnObject {
                path: child_path("properties"),
            })?;
        for (name, child) in props {
            properties.insert(name.clone(), from_json_at(child, &child_path(name))?);
        }
    }
    let items = match obj.get("items") {
        Some(v) => {
            let items_path = if path == "(root)" {
                "[]".to_owned()
            } else {
                format!("{path}[]")
            };
            Some(Box::new(from_json_at(v, &items_path)?))
        }
        None => None,
    };
    let enum_values = obj.get("enum").and_then(Value::as_array).map(|vals| {
        vals.iter()
            .map(|v| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .collect()
    });
    Ok(SchemaNode {
        kind,
        description: obj
            .get("description")
            .and_then(Value::as_str)
            .map(str::to_owned),
        properties,
        items,
        enum_values,
    })
}
