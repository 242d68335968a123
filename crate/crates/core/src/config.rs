//! Line-oriented `key = value` domain descriptions.
//!
//! ```text
//! # the cross used throughout the tests
//! dim = 2
//! center = 0, 0
//! ball_radius = 0.5
//! shape = cross
//! arm_halfwidth = 1
//! arm_halflength = 3
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Shape, StarDomain};

struct Entry {
    value: String,
    line: usize,
}

/// Parses a domain description.
pub fn parse_domain(text: &str) -> Result<StarDomain> {
    let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            msg: format!("expected `key = value`, found `{content}`"),
        })?;
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(Error::Parse {
                line,
                msg: "empty key".into(),
            });
        }
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::Parse {
                line,
                msg: format!("unknown key `{key}`"),
            });
        }
        if let Some(prev) = entries.get(&key) {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate key `{key}` (first set on line {})", prev.line),
            });
        }
        entries.insert(
            key,
            Entry {
                value: value.trim().to_string(),
                line,
            },
        );
    }

    let cfg = Lookup {
        entries: &entries,
        eof: last_line + 1,
    };
    let dim = cfg.usize("dim")?;
    let center = cfg.floats("center")?;
    if center.len() != dim {
        return Err(Error::Parse {
            line: cfg.line_of("center"),
            msg: format!("center has {} coordinates, expected {dim}", center.len()),
        });
    }
    let ball_radius = cfg.float("ball_radius")?;
    let kind = cfg.string("shape")?;
    let shape = match kind.as_str() {
        "cube" => Shape::Cube {
            side: cfg.float("side")?,
        },
        "ball" => Shape::Ball {
            radius: cfg.float("radius")?,
        },
        "cross" => Shape::Cross {
            arm_halfwidth: cfg.float("arm_halfwidth")?,
            arm_halflength: cfg.float("arm_halflength")?,
        },
        "star-polygon" => Shape::StarPolygon {
            spikes: cfg.usize("spikes")?,
            r_in: cfg.float("r_in")?,
            r_out: cfg.float("r_out")?,
        },
        "fourier-radial" => Shape::FourierRadial {
            base: cfg.float("radius")?,
            cos: cfg.floats_or_empty("fourier_cos")?,
            sin: cfg.floats_or_empty("fourier_sin")?,
        },
        "tabulated" => Shape::Tabulated {
            rho: cfg.floats("rho_samples")?,
        },
        other => {
            return Err(Error::Parse {
                line: cfg.line_of("shape"),
                msg: format!("unknown shape `{other}`"),
            })
        }
    };
    StarDomain::new(dim, center, ball_radius, shape).map_err(|e| match e {
        Error::Domain(msg) => Error::Parse {
            line: cfg.line_of("shape"),
            msg,
        },
        other => other,
    })
}

pub fn load_domain(path: impl AsRef<Path>) -> Result<StarDomain> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_domain(&text)
}

/// Serializes a domain in the format accepted by [`parse_domain`].
pub fn format_domain(dom: &StarDomain) -> String {
    let join = |v: &[f64]| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    let mut s = format!(
        "dim = {}\ncenter = {}\nball_radius = {}\nshape = {}\n",
        dom.dim(),
        join(dom.center()),
        dom.ball_radius(),
        dom.shape().kind()
    );
    match dom.shape() {
        Shape::Cube { side } => s += &format!("side = {side}\n"),
        Shape::Ball { radius } => s += &format!("radius = {radius}\n"),
        Shape::Cross {
            arm_halfwidth,
            arm_halflength,
        } => {
            s += &format!("arm_halfwidth = {arm_halfwidth}\narm_halflength = {arm_halflength}\n")
        }
        Shape::StarPolygon { spikes, r_in, r_out } => {
            s += &format!("spikes = {spikes}\nr_in = {r_in}\nr_out = {r_out}\n")
        }
        Shape::FourierRadial { base, cos, sin } => {
            s += &format!("radius = {base}\n");
            if !cos.is_empty() {
                s += &format!("fourier_cos = {}\nfourier_sin = {}\n", join(cos), join(sin));
            }
        }
        Shape::Tabulated { rho } => s += &format!("rho_samples = {}\n", join(rho)),
    }
    s
}

const KNOWN_KEYS: &[&str] = &[
    "dim",
    "center",
    "ball_radius",
    "shape",
    "side",
    "radius",
    "arm_halfwidth",
    "arm_halflength",
    "spikes",
    "r_in",
    "r_out",
    "rho_samples",
    "fourier_cos",
    "fourier_sin",
];

struct Lookup<'a> {
    entries: &'a BTreeMap<String, Entry>,
    eof: usize,
}

impl Lookup<'_> {
    fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map_or(self.eof, |e| e.line)
    }

    fn string(&self, key: &str) -> Result<String> {
        self.entries
            .get(key)
            .map(|e| e.value.clone())
            .ok_or_else(|| Error::Parse {
                line: self.eof,
                msg: format!("missing required key `{key}`"),
            })
    }

    fn float(&self, key: &str) -> Result<f64> {
        let v = self.string(key)?;
        parse_float(&v).ok_or_else(|| Error::Parse {
            line: self.line_of(key),
            msg: format!("`{key}`: expected a number, found `{v}`"),
        })
    }

    fn usize(&self, key: &str) -> Result<usize> {
        let v = self.string(key)?;
        v.parse().map_err(|_| Error::Parse {
            line: self.line_of(key),
            msg: format!("`{key}`: expected a non-negative integer, found `{v}`"),
        })
    }

    fn floats(&self, key: &str) -> Result<Vec<f64>> {
        let v = self.string(key)?;
        v.split(',')
            .map(|s| {
                parse_float(s.trim()).ok_or_else(|| Error::Parse {
                    line: self.line_of(key),
                    msg: format!("`{key}`: bad number `{}`", s.trim()),
                })
            })
            .collect()
    }

    fn floats_or_empty(&self, key: &str) -> Result<Vec<f64>> {
        if self.entries.contains_key(key) {
            self.floats(key)
        } else {
            Ok(Vec::new())
        }
    }
}

fn parse_float(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    const CROSS: &str = "# cross\ndim = 2\ncenter = 0, 0\nball_radius = 0.5\nshape = cross\narm_halfwidth = 1 # w\narm_halflength = 3\n";

    #[test]
    fn parses_cross() {
        let d = parse_domain(CROSS).unwrap();
        assert_eq!(
            d.shape(),
            &Shape::Cross {
                arm_halfwidth: 1.0,
                arm_halflength: 3.0
            }
        );
        assert_eq!(d.ball_radius(), 0.5);
    }

    #[test]
    fn round_trips_through_format() {
        for dom in [
            parse_domain(CROSS).unwrap(),
            StarDomain::unit_square(),
            StarDomain::star_polygon(5, 0.5, 1.0, 0.3).unwrap(),
            StarDomain::new(
                2,
                vec![0.1, -0.2],
                0.2,
                Shape::FourierRadial {
                    base: 1.0,
                    cos: vec![0.0, 0.1],
                    sin: vec![0.05, 0.0],
                },
            )
            .unwrap(),
        ] {
            assert_eq!(parse_domain(&format_domain(&dom)).unwrap(), dom);
        }
    }

    #[test]
    fn reports_line_numbers() {
        let bad = CROSS.replace("arm_halflength = 3", "arm_halflength = three");
        assert_eq!(
            parse_domain(&bad).unwrap_err(),
            Error::Parse {
                line: 7,
                msg: "`arm_halflength`: expected a number, found `three`".into()
            }
        );
        let e = parse_domain("dim = 2\ncenter 0, 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e:?}");
        let e = parse_domain("dim = 2\ncenter = 0,0\nshape = ball\nradius = 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 5, ref msg } if msg.contains("ball_radius")));
        let e = parse_domain("dim = 2\ncolour = red\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_domain(&CROSS.replace("center = 0, 0", "center = 0, 0, 0")).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        let e = parse_domain(&CROSS.replace("shape = cross", "shape = blob")).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 5, .. }));
    }
}
