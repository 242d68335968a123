//! Plain-text CSV serialization of cubature rules.
//!
//! ```text
//! # starquad-rule v1
//! # d=2
//! # n=4
//! # h_n=0.25
//! # mesQ_inner=1
//! # mesQ_outer=1
//! # sum_weights=1
//! # ...
//! # columns=x1,x2,weight,provenance
//! 0.75,0.75,0.25,S1-center
//! ```
//!
//! Floats are written in shortest round-trip form, so loading a saved rule
//! reproduces it exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::JordanBracket;
use crate::nodes::{NodeSet, Provenance};
use crate::partition::CubatureRule;

const MAGIC: &str = "# starquad-rule v1";

pub fn write_rule(rule: &CubatureRule) -> String {
    let d = rule.dim();
    let set = &rule.nodes;
    let mut s = String::new();
    let anchor: Vec<String> = set.anchor.iter().map(|a| a.to_string()).collect();
    let columns: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    let _ = writeln!(s, "{MAGIC}");
    let _ = writeln!(s, "# d={d}");
    let _ = writeln!(s, "# n={}", set.n_requested);
    let _ = writeln!(s, "# h_n={}", set.h_n);
    let _ = writeln!(s, "# mesQ_inner={}", rule.bracket.inner);
    let _ = writeln!(s, "# mesQ_outer={}", rule.bracket.outer);
    let _ = writeln!(s, "# sum_weights={}", rule.sum_weights);
    let _ = writeln!(s, "# mesQ_resolution={}", rule.bracket.resolution);
    let _ = writeln!(s, "# anchor={}", anchor.join(","));
    let _ = writeln!(s, "# subgrid={}", rule.subgrid);
    let _ = writeln!(s, "# remainder={}", rule.remainder);
    let _ = writeln!(s, "# unassigned={}", rule.unassigned);
    let _ = writeln!(s, "# max_assigned_linf={}", rule.max_assigned_linf);
    let _ = writeln!(s, "# inner_cells={}", set.inner_cells);
    let _ = writeln!(s, "# columns={},weight,provenance", columns.join(","));
    for (node, w) in set.nodes.iter().zip(&rule.weights) {
        for x in &node.point {
            let _ = write!(s, "{x},");
        }
        let _ = writeln!(s, "{w},{}", node.provenance);
    }
    s
}

pub fn parse_rule(text: &str) -> Result<CubatureRule> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == MAGIC => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected `{MAGIC}`"),
            })
        }
    }
    let mut header: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut rows: Vec<(usize, &str)> = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if let Some(h) = l.strip_prefix('#') {
            if !rows.is_empty() {
                return Err(Error::Parse {
                    line,
                    msg: "header line after data rows".into(),
                });
            }
            let (k, v) = h.split_once('=').ok_or_else(|| Error::Parse {
                line,
                msg: format!("malformed header `{l}`"),
            })?;
            header.insert(k.trim().to_string(), (line, v.trim().to_string()));
        } else {
            rows.push((line, l));
        }
    }
    let eof = text.lines().count() + 1;
    let get = |key: &str| -> Result<(usize, &str)> {
        header
            .get(key)
            .map(|(l, v)| (*l, v.as_str()))
            .ok_or_else(|| Error::Parse {
                line: eof,
                msg: format!("missing header `{key}`"),
            })
    };
    let num = |key: &str| -> Result<f64> {
        let (line, v) = get(key)?;
        v.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("`{key}`: bad number `{v}`"),
        })
    };
    let int = |key: &str| -> Result<usize> {
        let (line, v) = get(key)?;
        v.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("`{key}`: bad integer `{v}`"),
        })
    };

    let d = int("d")?;
    let n = int("n")?;
    let h_n = num("h_n")?;
    let (anchor_line, anchor_text) = get("anchor")?;
    let anchor = parse_floats(anchor_text, anchor_line)?;
    if anchor.len() != d {
        return Err(Error::Parse {
            line: anchor_line,
            msg: format!("anchor has {} coordinates, expected {d}", anchor.len()),
        });
    }
    let bracket = JordanBracket {
        inner: num("mesQ_inner")?,
        outer: num("mesQ_outer")?,
        resolution: int("mesQ_resolution")?,
    };

    let mut nodes = Vec::with_capacity(rows.len());
    let mut weights = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != d + 2 {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields, found {}", d + 2, fields.len()),
            });
        }
        let values = parse_floats(&fields[..=d].join(","), line)?;
        let provenance: Provenance = fields[d + 1].parse().map_err(|e: Error| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
        weights.push(values[d]);
        nodes.push((values[..d].to_vec(), provenance));
    }
    let mut set = NodeSet::from_nodes(h_n, anchor, n, nodes)?;
    set.inner_cells = int("inner_cells")?;
    Ok(CubatureRule {
        nodes: set,
        weights,
        subgrid: int("subgrid")?,
        bracket,
        sum_weights: num("sum_weights")?,
        remainder: num("remainder")?,
        unassigned: num("unassigned")?,
        max_assigned_linf: num("max_assigned_linf")?,
    })
}

fn parse_floats(s: &str, line: usize) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim().parse::<f64>().map_err(|_| Error::Parse {
                line,
                msg: format!("bad number `{}`", t.trim()),
            })
        })
        .collect()
}

pub fn save_rule(rule: &CubatureRule, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path.as_ref(), write_rule(rule))
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))
}

pub fn load_rule(path: impl AsRef<Path>) -> Result<CubatureRule> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_rule(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubature::{build_rule, RuleOptions};
    use crate::geometry::StarDomain;

    fn square_rule() -> CubatureRule {
        let opts = RuleOptions {
            measure_resolution: Some(24),
            ..RuleOptions::default()
        };
        build_rule(&StarDomain::unit_square(), 4, &opts).unwrap()
    }

    #[test]
    fn square_rule_text() {
        let rule = square_rule();
        let text = write_rule(&rule);
        assert!(text.starts_with("# starquad-rule v1\n# d=2\n# n=4\n# h_n=0.25\n"));
        assert!(text.contains("\n0.75,0.75,0.25,S1-center\n"));
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
        assert_eq!(parse_rule(&text).unwrap(), rule);
    }

    #[test]
    fn star_rule_round_trips_exactly() {
        let star = StarDomain::star_polygon(5, 0.5, 1.0, 0.3).unwrap();
        let rule = build_rule(&star, 777, &RuleOptions::default()).unwrap();
        let back = parse_rule(&write_rule(&rule)).unwrap();
        assert_eq!(back, rule);
        let f = |x: &[f64]| (x[0] * 3.0).sin() + x[1] * x[1];
        assert_eq!(back.apply(f).to_bits(), rule.apply(f).to_bits());
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(parse_rule("hello"), Err(Error::Parse { line: 1, .. })));
        let rule = square_rule();
        let text = write_rule(&rule).replace("0.25,S2", "0.25,S9");
        assert!(matches!(parse_rule(&text), Err(Error::Parse { .. })));
        let text = write_rule(&rule).replace("# subgrid=8\n", "");
        assert!(matches!(parse_rule(&text), Err(Error::Parse { ref msg, .. }) if msg.contains("subgrid")));
    }
}
