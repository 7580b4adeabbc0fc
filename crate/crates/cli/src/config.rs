//! Parameter maps and their precedence: command line over config file over defaults.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

pub type Params = Map<String, Value>;

/// Parse a config document. Either a flat parameter object or a previous output
/// document `{config, version, rows}`, whose `config` is used.
pub fn parse_document(text: &str) -> Result<Params> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        CliError::Validation(format!("config is not valid JSON at line {} column {}: {e}", e.line(), e.column()))
    })?;
    let Value::Object(mut map) = value else {
        return Err(CliError::Validation("config must be a JSON object".into()));
    };
    if map.contains_key("rows") && map.contains_key("version") {
        return match map.remove("config") {
            Some(Value::Object(c)) => Ok(c),
            _ => Err(CliError::Validation("output document has no `config` object".into())),
        };
    }
    Ok(map)
}

/// Pull the `command` key out of a file map and check it names `expected`.
pub fn take_command(map: &mut Params, expected: &str) -> Result<()> {
    match map.remove("command") {
        None => Ok(()),
        Some(Value::String(s)) if s == expected => Ok(()),
        Some(other) => Err(CliError::Validation(format!("field `command`: config is for {other}, not `{expected}`"))),
    }
}

pub fn to_params<T: Serialize>(value: &T) -> Params {
    match serde_json::to_value(value) {
        Ok(Value::Object(m)) => m,
        _ => Params::new(),
    }
}

/// Later layers win.
pub fn merge(layers: &[&Params]) -> Params {
    let mut out = Params::new();
    for layer in layers {
        for (k, v) in layer.iter() {
            out.insert(k.clone(), v.clone());
        }
    }
    out
}

pub fn typed<T: DeserializeOwned>(map: &Params) -> Result<T> {
    serde_json::from_value(Value::Object(map.clone())).map_err(|e| CliError::Validation(format!("config: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn later_layers_win() {
        let a: Params = serde_json::from_str(r#"{"x": 1, "y": 2}"#).unwrap();
        let b: Params = serde_json::from_str(r#"{"y": 3}"#).unwrap();
        let m = merge(&[&a, &b]);
        assert_eq!(m["x"], 1);
        assert_eq!(m["y"], 3);
    }

    #[test]
    fn output_documents_are_configs() {
        let m = parse_document(r#"{"config": {"eta": 0.1}, "version": "x", "rows": []}"#).unwrap();
        assert_eq!(m["eta"], 0.1);
        let e = parse_document("{\n\"eta\": }").unwrap_err();
        assert!(e.to_string().contains("line 2"));
    }
}
