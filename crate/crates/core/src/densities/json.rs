//! The density-spec JSON format `{"family": ..., "dim": n, "params": {...}}`.
//!
//! Bodies are written `{"kind": "ball", "radius": r}`, `{"kind": "box",
//! "half_widths": [...]}`, `{"kind": "polygon", "vertices": [[x, y], ...]}`
//! or `{"kind": "regular-polygon", "sides": k, "circumradius": r}`. An
//! optional top-level `"concavity"` (`"log-concave"`, `"unknown"` or a
//! number `s`) overrides the class implied by the family.

use serde_json::{json, Map, Value};

use super::{Concavity, DensitySpec, Family, GridDensity};
use crate::bodies::SupportBody;
use crate::error::{Error, Result};

fn spec_err(field: &str, reason: impl Into<String>) -> Error {
    Error::Spec { field: field.to_string(), reason: reason.into() }
}

/// Re-labels a construction error with the path of the object that produced it.
fn at<T>(field: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Spec { .. } => e,
        other => spec_err(field, other.to_string()),
    })
}

struct Obj<'a> {
    path: String,
    map: &'a Map<String, Value>,
}

impl<'a> Obj<'a> {
    fn new(path: &str, v: &'a Value) -> Result<Self> {
        match v.as_object() {
            Some(map) => Ok(Self { path: path.to_string(), map }),
            None => Err(spec_err(path, "expected an object")),
        }
    }

    fn field(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn get(&self, key: &str) -> Result<&'a Value> {
        self.map.get(key).ok_or_else(|| spec_err(&self.field(key), "missing"))
    }

    fn opt(&self, key: &str) -> Option<&'a Value> {
        self.map.get(key).filter(|v| !v.is_null())
    }

    fn num(&self, key: &str) -> Result<f64> {
        number(&self.field(key), self.get(key)?)
    }

    fn num_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.opt(key) {
            Some(v) => number(&self.field(key), v),
            None => Ok(default),
        }
    }

    fn count(&self, key: &str) -> Result<usize> {
        let v = self.get(key)?;
        v.as_u64().map(|n| n as usize).ok_or_else(|| spec_err(&self.field(key), "expected a non-negative integer"))
    }

    fn vec(&self, key: &str) -> Result<Vec<f64>> {
        numbers(&self.field(key), self.get(key)?)
    }
}

fn number(field: &str, v: &Value) -> Result<f64> {
    v.as_f64().ok_or_else(|| spec_err(field, "expected a number"))
}

fn numbers(field: &str, v: &Value) -> Result<Vec<f64>> {
    let arr = v.as_array().ok_or_else(|| spec_err(field, "expected an array of numbers"))?;
    arr.iter().enumerate().map(|(i, x)| number(&format!("{field}[{i}]"), x)).collect()
}

fn parse_body(path: &str, v: &Value, dim: usize) -> Result<SupportBody> {
    let o = Obj::new(path, v)?;
    let kind = o.get("kind")?.as_str().ok_or_else(|| spec_err(&o.field("kind"), "expected a string"))?;
    let body = match kind {
        "ball" => at(path, SupportBody::ball(dim, o.num("radius")?))?,
        "box" => at(path, SupportBody::boxed(o.vec("half_widths")?))?,
        "polygon" => {
            let field = o.field("vertices");
            let arr = o.get("vertices")?.as_array().ok_or_else(|| spec_err(&field, "expected an array"))?;
            let pts = arr
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let f = format!("{field}[{i}]");
                    match numbers(&f, p)?.as_slice() {
                        [x, y] => Ok([*x, *y]),
                        _ => Err(spec_err(&f, "expected a pair")),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            at(path, SupportBody::polygon(&pts))?
        }
        "regular-polygon" => at(path, SupportBody::regular_polygon(o.count("sides")?, o.num("circumradius")?))?,
        other => return Err(spec_err(&o.field("kind"), format!("unknown body kind `{other}`"))),
    };
    if body.dim() != dim {
        return Err(spec_err(path, format!("body has dimension {}, spec declares {dim}", body.dim())));
    }
    Ok(body)
}

fn body_json(body: &SupportBody) -> Value {
    match body {
        SupportBody::Ball { radius, .. } => json!({"kind": "ball", "radius": radius}),
        SupportBody::Box { half_widths } => json!({"kind": "box", "half_widths": half_widths}),
        SupportBody::Polygon { vertices } => json!({"kind": "polygon", "vertices": vertices}),
    }
}

fn parse_concavity(field: &str, v: &Value) -> Result<Concavity> {
    match v {
        Value::String(s) if s == "log-concave" => Ok(Concavity::LogConcave),
        Value::String(s) if s == "unknown" => Ok(Concavity::Unknown),
        Value::Number(_) => Ok(Concavity::SConcave(number(field, v)?)),
        _ => Err(spec_err(field, "expected \"log-concave\", \"unknown\" or a number")),
    }
}

fn concavity_json(c: Concavity) -> Value {
    match c {
        Concavity::LogConcave => json!("log-concave"),
        Concavity::Unknown => json!("unknown"),
        Concavity::SConcave(s) => json!(s),
    }
}

fn parse_at(path: &str, v: &Value) -> Result<DensitySpec> {
    let o = Obj::new(path, v)?;
    let family = o.get("family")?.as_str().ok_or_else(|| spec_err(&o.field("family"), "expected a string"))?;
    let dim = o.count("dim")?;
    if dim == 0 {
        return Err(spec_err(&o.field("dim"), "must be at least 1"));
    }
    let empty = Value::Object(Map::new());
    let params_path = o.field("params");
    let p = Obj::new(&params_path, o.opt("params").unwrap_or(&empty))?;
    let spec = match family {
        "gaussian" => {
            let mean = match p.opt("mean") {
                Some(m) => numbers(&p.field("mean"), m)?,
                None => vec![0.0; dim],
            };
            let cov = match (p.opt("covariance"), p.opt("sigma")) {
                (Some(c), _) => {
                    let field = p.field("covariance");
                    let rows = c.as_array().ok_or_else(|| spec_err(&field, "expected a matrix"))?;
                    rows.iter()
                        .enumerate()
                        .map(|(i, r)| numbers(&format!("{field}[{i}]"), r))
                        .collect::<Result<Vec<_>>>()?
                }
                (None, s) => {
                    let sigma = match s {
                        Some(s) => number(&p.field("sigma"), s)?,
                        None => 1.0,
                    };
                    (0..dim).map(|i| (0..dim).map(|j| if i == j { sigma * sigma } else { 0.0 }).collect()).collect()
                }
            };
            at(&params_path, DensitySpec::gaussian(mean, cov))?
        }
        "uniform" => {
            if dim == 1 && p.opt("body").is_none() {
                at(&params_path, DensitySpec::uniform_interval(p.num("a")?, p.num("b")?))?
            } else {
                let body = parse_body(&p.field("body"), p.get("body")?, dim)?;
                let center = match p.opt("center") {
                    Some(c) => numbers(&p.field("center"), c)?,
                    None => vec![0.0; dim],
                };
                at(&params_path, DensitySpec::uniform_at(body, center))?
            }
        }
        "exponential" => {
            let mut spec = at(&params_path, DensitySpec::exponential(p.num("rate")?))?;
            if let Some(r) = p.opt("reflected") {
                let field = p.field("reflected");
                if r.as_bool().ok_or_else(|| spec_err(&field, "expected a boolean"))? {
                    spec = at(&params_path, spec.reflect())?;
                }
            }
            spec
        }
        "exponential-power" => {
            at(&params_path, DensitySpec::exponential_power(p.num("shape")?, p.num_or("scale", 1.0)?))?
        }
        "generalized-gaussian" => {
            at(&params_path, DensitySpec::generalized_gaussian(p.num("beta")?, dim, p.num_or("scale", 1.0)?))?
        }
        "product" => {
            let field = p.field("factors");
            let arr = p.get("factors")?.as_array().ok_or_else(|| spec_err(&field, "expected an array"))?;
            let factors =
                arr.iter().enumerate().map(|(i, f)| parse_at(&format!("{field}[{i}]"), f)).collect::<Result<_>>()?;
            at(&params_path, DensitySpec::product(factors))?
        }
        "piecewise-linear" => at(&params_path, DensitySpec::piecewise_linear(p.vec("knots")?, p.vec("values")?))?,
        "grid" => {
            let shape_field = p.field("shape");
            let shape = p
                .get("shape")?
                .as_array()
                .ok_or_else(|| spec_err(&shape_field, "expected an array"))?
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    s.as_u64()
                        .map(|n| n as usize)
                        .ok_or_else(|| spec_err(&format!("{shape_field}[{i}]"), "expected an integer"))
                })
                .collect::<Result<Vec<_>>>()?;
            let grid =
                at(&params_path, GridDensity::new(p.vec("origin")?, p.vec("spacing")?, shape, p.vec("values")?))?;
            at(&params_path, DensitySpec::grid(grid))?
        }
        "covariogram" => {
            let body = parse_body(&p.field("body"), p.get("body")?, dim)?;
            at(&params_path, DensitySpec::covariogram(body))?
        }
        other => return Err(spec_err(&o.field("family"), format!("unknown family `{other}`"))),
    };
    if spec.dim() != dim {
        return Err(spec_err(&o.field("dim"), format!("declared {dim}, parameters give {}", spec.dim())));
    }
    match o.opt("concavity") {
        Some(c) => Ok(spec.with_concavity(parse_concavity(&o.field("concavity"), c)?)),
        None => Ok(spec),
    }
}

impl DensitySpec {
    pub fn from_json_value(v: &Value) -> Result<Self> {
        parse_at("", v)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| spec_err("<root>", e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn to_json_value(&self) -> Value {
        let params = match &self.family {
            Family::Gaussian(g) => json!({"mean": g.mean(), "covariance": g.covariance()}),
            Family::Uniform { body, center } => json!({"body": body_json(body), "center": center}),
            Family::Exponential { rate, reflected } => json!({"rate": rate, "reflected": reflected}),
            Family::ExponentialPower { shape, scale } => json!({"shape": shape, "scale": scale}),
            Family::GeneralizedGaussian(g) => json!({"beta": g.beta(), "scale": g.scale()}),
            Family::Product(fs) => json!({"factors": fs.iter().map(|f| f.to_json_value()).collect::<Vec<_>>()}),
            Family::PiecewiseLinear(pl) => json!({"knots": pl.knots(), "values": pl.values()}),
            Family::Grid(g) => json!({
                "origin": g.origin,
                "spacing": g.spacing,
                "shape": g.shape,
                "values": g.values,
            }),
            Family::Covariogram { body } => json!({"body": body_json(body)}),
        };
        json!({
            "family": self.family_name(),
            "dim": self.dim,
            "params": params,
            "concavity": concavity_json(self.concavity),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("density specs serialise")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let specs = vec![
            DensitySpec::isotropic_gaussian(2, 1.5).unwrap(),
            DensitySpec::uniform(SupportBody::regular_polygon(6, 1.0).unwrap()).unwrap(),
            DensitySpec::exponential(2.0).unwrap().reflect().unwrap(),
            DensitySpec::laplace(0.5).unwrap(),
            DensitySpec::generalized_gaussian(0.5, 1, 1.0).unwrap(),
            DensitySpec::product(vec![
                DensitySpec::uniform_interval(-1.0, 1.0).unwrap(),
                DensitySpec::laplace(1.0).unwrap(),
            ])
            .unwrap(),
            DensitySpec::triangle(0.0, 1.0).unwrap(),
            DensitySpec::covariogram(SupportBody::ball(2, 1.0).unwrap()).unwrap(),
        ];
        for s in specs {
            let back = DensitySpec::from_json(&s.to_json()).unwrap();
            assert_eq!(back.to_json(), s.to_json());
        }
    }

    #[test]
    fn reports_field_paths() {
        let bad = r#"{"family": "uniform", "dim": 2, "params": {"body": {"kind": "ball"}}}"#;
        match DensitySpec::from_json(bad) {
            Err(Error::Spec { field, .. }) => assert_eq!(field, "params.body.radius"),
            other => panic!("unexpected {other:?}"),
        }
        let nested = r#"{"family": "product", "dim": 2, "params": {"factors": [
            {"family": "laplace", "dim": 1}, {"family": "exponential", "dim": 1, "params": {"rate": 1}}]}}"#;
        match DensitySpec::from_json(nested) {
            Err(Error::Spec { field, .. }) => assert_eq!(field, "params.factors[0].family"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn disk_shorthand() {
        let disk = DensitySpec::from_json(
            r#"{"family": "uniform", "dim": 2, "params": {"body": {"kind": "ball", "radius": 1}}}"#,
        )
        .unwrap();
        assert!((disk.sup() - 1.0 / std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn rejects_dimension_conflicts() {
        let s = r#"{"family": "gaussian", "dim": 3, "params": {"mean": [0, 0]}}"#;
        assert!(matches!(DensitySpec::from_json(s), Err(Error::Spec { .. })));
    }
}
