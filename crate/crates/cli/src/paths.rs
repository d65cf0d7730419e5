//! Dotted parameter paths into a JSON config, e.g. `links.0.v` or
//! `filters.middle.0.1`.

use serde_json::Value;

use crate::error::{CliError, CliResult};

fn segments(path: &str) -> CliResult<Vec<&str>> {
    let segs: Vec<&str> = path.split('.').collect();
    if segs.iter().any(|s| s.is_empty()) {
        return Err(CliError::config(format!(
            "malformed parameter path `{path}`"
        )));
    }
    Ok(segs)
}

fn step<'a>(value: &'a Value, seg: &str, path: &str) -> CliResult<&'a Value> {
    let next = match value {
        Value::Object(map) => map.get(seg),
        Value::Array(items) => seg.parse::<usize>().ok().and_then(|i| items.get(i)),
        _ => None,
    };
    next.ok_or_else(|| {
        CliError::config(format!(
            "parameter path `{path}` does not exist in the config"
        ))
    })
}

pub fn get_number(root: &Value, path: &str) -> CliResult<f64> {
    let mut cur = root;
    for seg in segments(path)? {
        cur = step(cur, seg, path)?;
    }
    cur.as_f64().ok_or_else(|| {
        CliError::config(format!(
            "parameter path `{path}` does not point to a number"
        ))
    })
}

/// Overwrites an existing numeric leaf.
pub fn set_number(root: &mut Value, path: &str, x: f64) -> CliResult<()> {
    get_number(root, path)?;
    let mut cur = root;
    for seg in segments(path)? {
        cur = match cur {
            Value::Object(map) => map.get_mut(seg),
            Value::Array(items) => seg.parse::<usize>().ok().and_then(|i| items.get_mut(i)),
            _ => None,
        }
        .expect("path checked above");
    }
    *cur = serde_json::Number::from_f64(x)
        .map(Value::Number)
        .ok_or_else(|| CliError::config(format!("cannot set `{path}` to non-finite value {x}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn get_and_set() {
        let mut v = json!({"links": [{"v": 0.1}], "filters": {"middle": [[0.8, 0.97]]}});
        assert_eq!(get_number(&v, "links.0.v").unwrap(), 0.1);
        assert_eq!(get_number(&v, "filters.middle.0.1").unwrap(), 0.97);
        set_number(&mut v, "filters.middle.0.0", 0.5).unwrap();
        assert_eq!(v["filters"]["middle"][0][0], json!(0.5));
    }

    #[test]
    fn missing_paths_are_config_errors() {
        let mut v = json!({"links": [{"v": 0.1}]});
        for p in ["links.1.v", "links.0.x", "links..v", "links.0"] {
            assert!(matches!(get_number(&v, p), Err(CliError::Config(_))), "{p}");
        }
        assert!(set_number(&mut v, "seed", 1.0).is_err());
        assert!(set_number(&mut v, "links.0.v", f64::NAN).is_err());
    }
}
