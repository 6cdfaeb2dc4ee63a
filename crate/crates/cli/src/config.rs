//! Config files mirror command-line flags. Top-level keys set the global
//! flags (`jobs`, `format`, `output`); a table named after a subcommand sets
//! that subcommand's flags. Flags given on the command line win.

use std::path::Path;

use serde_json::Value;

use crate::CliError;

pub const SUBCOMMANDS: &[&str] = &[
    "gen",
    "verify-feq",
    "congruence",
    "search",
    "guess",
    "modular",
    "legendre",
    "agm",
    "series",
    "paper-map",
];

const GLOBAL_KEYS: &[&str] = &["jobs", "format", "output"];

const SHORT: &[(&str, &str)] = &[("--jobs", "-j"), ("--format", "-f"), ("--output", "-o")];

const VALUE_FLAGS: &[&str] = &[
    "--jobs", "-j", "--config", "--format", "-f", "--output", "-o",
];

pub fn load(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let is_toml = path.extension().is_some_and(|e| e == "toml");
    let v: Value = if is_toml {
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?
    } else {
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?
    };
    if !v.is_object() {
        return Err(CliError::Usage("config must be a table".into()));
    }
    Ok(v)
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn subcommand_index(args: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = args[i].as_str();
        if VALUE_FLAGS.contains(&a) {
            i += 2;
            continue;
        }
        if SUBCOMMANDS.contains(&a) {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn render(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Array(items) => Some(
            items
                .iter()
                .filter_map(render)
                .collect::<Vec<_>>()
                .join(","),
        ),
        _ => None,
    }
}

fn flags_from(table: &serde_json::Map<String, Value>, present: &[String], out: &mut Vec<String>) {
    for (key, v) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        let short = SHORT
            .iter()
            .find(|(long, _)| *long == flag)
            .map(|(_, s)| *s);
        if present
            .iter()
            .any(|a| a == &flag || a.starts_with(&format!("{flag}=")) || Some(a.as_str()) == short)
        {
            continue;
        }
        match v {
            Value::Bool(true) => out.push(flag),
            Value::Bool(false) | Value::Null | Value::Object(_) => {}
            other => {
                if let Some(s) = render(other) {
                    out.push(format!("{flag}={s}"));
                }
            }
        }
    }
}

/// `args` with the config file's entries spliced in after the subcommand.
pub fn expand_args(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let Some(idx) = subcommand_index(&args) else {
        return Ok(args);
    };
    let cfg = load(Path::new(&path))?;
    let table = cfg.as_object().expect("checked");
    let sub = args[idx].clone();
    let mut extra = Vec::new();
    if let Some(Value::Object(t)) = table.get(&sub) {
        flags_from(t, &args, &mut extra);
    }
    let mut globals = serde_json::Map::new();
    for (k, v) in table {
        if SUBCOMMANDS.contains(&k.as_str()) {
            continue;
        }
        if !GLOBAL_KEYS.contains(&k.as_str()) {
            return Err(CliError::Usage(format!(
                "config key `{k}` is not a global flag or subcommand table"
            )));
        }
        globals.insert(k.clone(), v.clone());
    }
    let mut seen = args.clone();
    seen.extend(extra.iter().cloned());
    flags_from(&globals, &seen, &mut extra);
    let mut out = args;
    let tail = out.split_off(idx + 1);
    out.extend(extra);
    out.extend(tail);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn splices_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(
            &path,
            "format = \"json\"\n[gen]\nfamily = \"u7\"\nterms = 4\n",
        )
        .unwrap();
        let args = argv(&format!(
            "selfrep --config {} gen --terms 2",
            path.display()
        ));
        let out = expand_args(args).unwrap();
        assert!(out.contains(&"--family=u7".to_string()));
        assert!(out.contains(&"--format=json".to_string()));
        assert!(!out.iter().any(|a| a == "--terms=4"));
        assert_eq!(out[3], "gen");
    }

    #[test]
    fn json_arrays_join() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(
            &path,
            r#"{"search": {"lambda": [-3, 3], "lucas": true, "holonomic_probe": false}}"#,
        )
        .unwrap();
        let out =
            expand_args(argv(&format!("selfrep search --config {}", path.display()))).unwrap();
        assert!(out.contains(&"--lambda=-3,3".to_string()));
        assert!(out.contains(&"--lucas".to_string()));
        assert!(!out.iter().any(|a| a.starts_with("--holonomic-probe")));
    }

    #[test]
    fn unknown_top_level_key_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "terms = 3\n").unwrap();
        assert!(matches!(
            expand_args(argv(&format!("selfrep gen --config {}", path.display()))),
            Err(CliError::Usage(_))
        ));
    }
}
