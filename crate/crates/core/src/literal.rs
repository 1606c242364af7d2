//! Text and JSON literals for sets, measures, functions and scenario files.
//!
//! Set literals:
//!
//! ```text
//! empty | all | evens | odds
//! finite:[0,2,5]            {0,2,5}
//! mod:k:r                   residue class r mod k
//! tail:k                    {k, k+1, ..}
//! range:a..b                {a, .., b-1}
//! upset:N=3;prefix=101;p=2;R={0}
//! ```
//!
//! The last form is what [`UPSet`]'s `Display` prints for infinite sets.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value as Json};

use crate::error::{Error, Result};
use crate::exact::{q_from_json, q_to_json, Q};
use crate::integrals::FuncSpec;
use crate::measures::{CardClass, Concave, Family, GeomTail, MeasureSpec, PointMass};
use crate::setalg::{GroundModel, UPSet};

pub const SCENARIO_VERSION: u32 = 1;

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_usize(s: &str, what: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| perr(format!("{what}: expected a natural number, got {s:?}")))
}

fn parse_elems(body: &str) -> Result<Vec<usize>> {
    body.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_usize(s, "element"))
        .collect()
}

impl FromStr for UPSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "empty" => return Ok(UPSet::empty()),
            "all" => return Ok(UPSet::all()),
            "evens" => return Ok(UPSet::evens()),
            "odds" => return Ok(UPSet::odds()),
            _ => {}
        }
        if let Some(body) = s.strip_prefix('{').and_then(|b| b.strip_suffix('}')) {
            return Ok(UPSet::from_elements(parse_elems(body)?));
        }
        if let Some(body) = s.strip_prefix("finite:") {
            let body = body
                .trim()
                .strip_prefix('[')
                .and_then(|b| b.strip_suffix(']'))
                .ok_or_else(|| perr(format!("finite set needs [..]: {s:?}")))?;
            return Ok(UPSet::from_elements(parse_elems(body)?));
        }
        if let Some(body) = s.strip_prefix("mod:") {
            let (k, r) = body
                .split_once(':')
                .ok_or_else(|| perr(format!("expected mod:k:r, got {s:?}")))?;
            let (k, r) = (parse_usize(k, "modulus")?, parse_usize(r, "residue")?);
            if k == 0 || r >= k {
                return Err(perr(format!("need 0 <= r < k in {s:?}")));
            }
            return Ok(UPSet::residue_class(k, r));
        }
        if let Some(body) = s.strip_prefix("tail:") {
            return Ok(UPSet::tail(parse_usize(body, "tail start")?));
        }
        if let Some(body) = s.strip_prefix("range:") {
            let (a, b) = body
                .split_once("..")
                .ok_or_else(|| perr(format!("expected range:a..b, got {s:?}")))?;
            return Ok(UPSet::range(
                parse_usize(a, "range start")?,
                parse_usize(b, "range end")?,
            ));
        }
        if let Some(body) = s.strip_prefix("upset:") {
            return parse_upset_body(body, s);
        }
        Err(perr(format!("unknown set literal {s:?}")))
    }
}

fn parse_upset_body(body: &str, whole: &str) -> Result<UPSet> {
    let mut fields = BTreeMap::new();
    for part in body.split(';') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| perr(format!("expected key=value in {whole:?}")))?;
        if fields.insert(k.trim(), v.trim()).is_some() {
            return Err(perr(format!("duplicate key {k:?} in {whole:?}")));
        }
    }
    let get = |k: &str| {
        fields
            .get(k)
            .copied()
            .ok_or_else(|| perr(format!("missing {k} in {whole:?}")))
    };
    let n = parse_usize(get("N")?, "N")?;
    let bits = get("prefix")?;
    if bits.len() != n || !bits.chars().all(|c| c == '0' || c == '1') {
        return Err(perr(format!("prefix must be {n} bits in {whole:?}")));
    }
    let p = parse_usize(get("p")?, "p")?;
    let r = get("R")?
        .strip_prefix('{')
        .and_then(|b| b.strip_suffix('}'))
        .ok_or_else(|| perr(format!("R needs {{..}} in {whole:?}")))?;
    if fields.len() != 4 {
        return Err(perr(format!("unexpected keys in {whole:?}")));
    }
    let prefix = bits.chars().map(|c| c == '1').collect();
    UPSet::new(prefix, p, &parse_elems(r)?)
}

/// A set literal checked against the ground. `all` means the whole ground.
pub fn parse_set(s: &str, ground: GroundModel) -> Result<UPSet> {
    if s.trim() == "all" {
        return Ok(ground.full_set());
    }
    let a: UPSet = s.parse()?;
    ground.check(&a)?;
    Ok(a)
}

/// `"omega"`, `"finite:n"` or `{"finite": n}`.
pub fn ground_from_json(v: &Json) -> Result<GroundModel> {
    match v {
        Json::String(s) if s == "omega" => Ok(GroundModel::Omega),
        Json::String(s) => match s.strip_prefix("finite:") {
            Some(n) => GroundModel::finite(parse_usize(n, "ground size")?),
            None => Err(perr(format!("unknown ground {s:?}"))),
        },
        Json::Object(o) if o.len() == 1 && o.contains_key("finite") => {
            let n = o["finite"]
                .as_u64()
                .ok_or_else(|| perr("finite ground size must be a natural number"))?;
            GroundModel::finite(n as usize)
        }
        other => Err(perr(format!("bad ground {other}"))),
    }
}

pub fn ground_to_json(g: GroundModel) -> Json {
    match g {
        GroundModel::Omega => json!("omega"),
        GroundModel::Finite(n) => json!({ "finite": n }),
    }
}

fn object<'a>(v: &'a Json, what: &str, allowed: &[&str]) -> Result<&'a Map<String, Json>> {
    let o = v
        .as_object()
        .ok_or_else(|| perr(format!("{what}: expected an object, found {v}")))?;
    if let Some(k) = o.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(perr(format!("{what}: unknown field {k:?}")));
    }
    Ok(o)
}

/// The single `{"kind": body}` entry of a tagged literal.
fn tagged<'a>(v: &'a Json, what: &str) -> Result<(&'a str, &'a Json)> {
    match v.as_object() {
        Some(o) if o.len() == 1 => {
            let (k, b) = o.iter().next().expect("one entry");
            Ok((k.as_str(), b))
        }
        _ => Err(perr(format!(
            "{what}: expected {{\"kind\": ..}}, found {v}"
        ))),
    }
}

fn q_list(v: &Json, what: &str) -> Result<Vec<Q>> {
    v.as_array()
        .ok_or_else(|| perr(format!("{what}: expected an array")))?
        .iter()
        .map(q_from_json)
        .collect()
}

fn point_mass_from_json(v: &Json) -> Result<PointMass> {
    let o = object(v, "pointmass", &["weights", "tail"])?;
    let weights = match o.get("weights") {
        Some(w) => q_list(w, "pointmass weights")?,
        None => Vec::new(),
    };
    let tail = match o.get("tail") {
        Some(t) => {
            let t = object(t, "pointmass tail", &["c", "r"])?;
            let field = |k: &str| {
                t.get(k)
                    .ok_or_else(|| perr(format!("pointmass tail needs {k}")))
                    .and_then(q_from_json)
            };
            Some(GeomTail {
                c: field("c")?,
                r: field("r")?,
            })
        }
        None => None,
    };
    Ok(PointMass { weights, tail })
}

fn point_mass_to_json(pm: &PointMass) -> Json {
    let mut o = Map::new();
    if !pm.weights.is_empty() {
        o.insert("weights".into(), pm.weights.iter().map(q_to_json).collect());
    }
    if let Some(t) = &pm.tail {
        o.insert(
            "tail".into(),
            json!({ "c": q_to_json(&t.c), "r": q_to_json(&t.r) }),
        );
    }
    Json::Object(o)
}

fn concave_from_json(v: &Json) -> Result<Concave> {
    match v {
        Json::String(s) if s == "sqrt" => Ok(Concave::Sqrt),
        Json::String(s) if s == "identity" => Ok(Concave::identity()),
        Json::Object(_) => match tagged(v, "distortion g")? {
            ("cap", c) => Ok(Concave::cap(q_from_json(c)?)),
            ("min_affine", lines) => {
                let lines = lines
                    .as_array()
                    .ok_or_else(|| perr("min_affine needs [[slope, intercept], ..]"))?
                    .iter()
                    .map(|l| match q_list(l, "min_affine line")?.as_slice() {
                        [a, b] => Ok((a.clone(), b.clone())),
                        _ => Err(perr("min_affine line needs [slope, intercept]")),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Concave::MinAffine(lines))
            }
            (k, _) => Err(perr(format!("unknown distortion g {k:?}"))),
        },
        other => Err(perr(format!("bad distortion g {other}"))),
    }
}

fn concave_to_json(g: &Concave) -> Json {
    match g {
        Concave::Sqrt => json!("sqrt"),
        Concave::MinAffine(lines) => json!({
            "min_affine": lines.iter().map(|(a, b)| json!([q_to_json(a), q_to_json(b)])).collect::<Vec<_>>()
        }),
    }
}

fn mask_key(key: &str) -> Result<u64> {
    let body = key
        .trim()
        .strip_prefix('{')
        .and_then(|b| b.strip_suffix('}'))
        .ok_or_else(|| perr(format!("table key must look like {{0,2}}, got {key:?}")))?;
    let mut mask = 0u64;
    for e in parse_elems(body)? {
        if e >= 64 || mask >> e & 1 == 1 {
            return Err(perr(format!("bad table key {key:?}")));
        }
        mask |= 1 << e;
    }
    Ok(mask)
}

/// Rewrites `{"family": kind, ..}` into the tagged `{kind: body}` form.
fn untag_family(v: &Json) -> Result<Option<Json>> {
    let Some(o) = v.as_object() else {
        return Ok(None);
    };
    let Some(kind) = o.get("family") else {
        return Ok(None);
    };
    let kind = kind
        .as_str()
        .ok_or_else(|| perr("measure family must be a string"))?;
    let mut rest = o.clone();
    rest.remove("family");
    let single = |key: &str| match rest.get(key) {
        Some(b) if rest.len() == 1 => Ok(b.clone()),
        _ => Err(perr(format!("{kind} measure takes exactly {key:?}"))),
    };
    let body = match kind {
        "cardclass" => single("theta")?,
        "table" => single("values")?,
        "sum" => single("terms")?,
        _ => Json::Object(rest),
    };
    Ok(Some(json!({ kind: body })))
}

fn family_from_json(v: &Json, ground: GroundModel) -> Result<Family> {
    if let Some(t) = untag_family(v)? {
        return family_from_json(&t, ground);
    }
    let (kind, body) = tagged(v, "measure")?;
    Ok(match kind {
        "pointmass" => Family::PointMass(point_mass_from_json(body)?),
        "cardclass" => {
            let o = body
                .as_object()
                .ok_or_else(|| perr("cardclass needs {\"0\": .., \"inf\": ..}"))?;
            let mut finite = Vec::new();
            while let Some(x) = o.get(&finite.len().to_string()) {
                finite.push(q_from_json(x)?);
            }
            let infinite = match o.get("inf") {
                Some(x) => q_from_json(x)?,
                None if ground.is_finite() => Q::from_integer(0.into()),
                None => return Err(perr("cardclass on omega needs \"inf\"")),
            };
            if finite.is_empty() || o.len() != finite.len() + o.contains_key("inf") as usize {
                return Err(perr(
                    "cardclass keys must be 0..K without gaps, plus \"inf\"",
                ));
            }
            Family::CardinalityClass(CardClass { finite, infinite })
        }
        "distortion" => {
            let o = object(body, "distortion", &["g", "base"])?;
            let need = |k: &str| {
                o.get(k)
                    .ok_or_else(|| perr(format!("distortion needs {k}")))
            };
            Family::Distortion {
                g: concave_from_json(need("g")?)?,
                base: point_mass_from_json(need("base")?)?,
            }
        }
        "table" => match body {
            Json::Array(_) => Family::Table(q_list(body, "table")?),
            Json::Object(o) => {
                let n = ground
                    .size()
                    .ok_or_else(|| perr("tables need a finite ground"))?;
                if n > crate::measures::TABLE_LIMIT {
                    return Err(Error::LimitExceeded {
                        n,
                        limit: crate::measures::TABLE_LIMIT,
                    });
                }
                let mut values: Vec<Option<Q>> = vec![None; 1 << n];
                for (k, x) in o {
                    let mask = mask_key(k)?;
                    let slot = values
                        .get_mut(mask as usize)
                        .ok_or_else(|| perr(format!("table key {k} leaves the ground")))?;
                    if slot.replace(q_from_json(x)?).is_some() {
                        return Err(perr(format!("duplicate table key {k}")));
                    }
                }
                values[0].get_or_insert_with(|| Q::from_integer(0.into()));
                let values = values
                    .into_iter()
                    .enumerate()
                    .map(|(mask, v)| {
                        v.ok_or_else(|| {
                            perr(format!("table misses {}", UPSet::from_mask(mask as u64)))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Family::Table(values)
            }
            _ => return Err(perr("table needs an array or an object")),
        },
        "sum" => match body.as_array().map(Vec::as_slice) {
            Some([a, b]) => Family::Sum(
                Box::new(family_from_json(a, ground)?),
                Box::new(family_from_json(b, ground)?),
            ),
            _ => return Err(perr("sum needs [measure, measure]")),
        },
        "scale" => {
            let o = object(body, "scale", &["by", "measure"])?;
            let by = o.get("by").ok_or_else(|| perr("scale needs by"))?;
            let inner = o
                .get("measure")
                .ok_or_else(|| perr("scale needs measure"))?;
            Family::Scale(q_from_json(by)?, Box::new(family_from_json(inner, ground)?))
        }
        other => return Err(perr(format!("unknown measure kind {other:?}"))),
    })
}

pub fn measure_from_json(v: &Json, ground: GroundModel) -> Result<MeasureSpec> {
    MeasureSpec::new(ground, family_from_json(v, ground)?)
}

fn family_to_json(f: &Family) -> Json {
    match f {
        Family::Table(values) => {
            json!({ "table": values.iter().map(q_to_json).collect::<Vec<_>>() })
        }
        Family::PointMass(pm) => json!({ "pointmass": point_mass_to_json(pm) }),
        Family::CardinalityClass(cc) => {
            let mut o = Map::new();
            for (i, x) in cc.finite.iter().enumerate() {
                o.insert(i.to_string(), q_to_json(x));
            }
            o.insert("inf".into(), q_to_json(&cc.infinite));
            json!({ "cardclass": o })
        }
        Family::Distortion { g, base } => json!({
            "distortion": { "g": concave_to_json(g), "base": point_mass_to_json(base) }
        }),
        Family::Sum(a, b) => json!({ "sum": [family_to_json(a), family_to_json(b)] }),
        Family::Scale(k, inner) => {
            json!({ "scale": { "by": q_to_json(k), "measure": family_to_json(inner) } })
        }
    }
}

pub fn measure_to_json(m: &MeasureSpec) -> Json {
    family_to_json(m.family())
}

fn rows(v: &Json, what: &str) -> Result<Vec<Vec<Q>>> {
    v.as_array()
        .ok_or_else(|| perr(format!("{what}: expected an array of rows")))?
        .iter()
        .map(|r| match r {
            Json::Array(_) => q_list(r, what),
            scalar => Ok(vec![q_from_json(scalar)?]),
        })
        .collect()
}

/// `{"table": rows}`, `{"prefix": rows, "cycle": rows}`, `{"constant": row}`
/// or `{"indicator": set}`. A scalar row means dimension 1.
pub fn func_from_json(v: &Json, ground: GroundModel) -> Result<FuncSpec> {
    let o = object(
        v,
        "function",
        &["table", "prefix", "cycle", "constant", "indicator"],
    )?;
    let f = if let Some(t) = o.get("table") {
        if o.len() != 1 {
            return Err(perr("function table takes no other fields"));
        }
        let f = FuncSpec::table(rows(t, "function table")?)?;
        if f.ground() != ground {
            return Err(Error::GroundMismatch(format!(
                "function table has {} rows, ground is {ground}",
                f.ground().size().unwrap_or(0)
            )));
        }
        f
    } else if let Some(c) = o.get("constant") {
        if o.len() != 1 {
            return Err(perr("constant function takes no other fields"));
        }
        let row = match c {
            Json::Array(_) => q_list(c, "constant")?,
            scalar => vec![q_from_json(scalar)?],
        };
        if row.is_empty() {
            return Err(perr("constant needs at least one coordinate"));
        }
        FuncSpec::constant(ground, row)
    } else if let Some(s) = o.get("indicator") {
        if o.len() != 1 {
            return Err(perr("indicator takes no other fields"));
        }
        let s = s
            .as_str()
            .ok_or_else(|| perr("indicator needs a set literal"))?;
        FuncSpec::indicator(ground, &parse_set(s, ground)?)
    } else {
        let cycle = rows(
            o.get("cycle")
                .ok_or_else(|| perr("function needs table, constant, indicator or cycle"))?,
            "cycle",
        )?;
        let prefix = match o.get("prefix") {
            Some(p) => rows(p, "prefix")?,
            None => Vec::new(),
        };
        let f = FuncSpec::periodic(prefix, cycle)?;
        FuncSpec::from_comps(ground, f.comps().to_vec())?
    };
    Ok(f)
}

pub fn func_to_json(f: &FuncSpec) -> Json {
    let row = |r: &Vec<Q>| Json::Array(r.iter().map(q_to_json).collect());
    let (prefix, cycle) = f.to_rows();
    if f.ground().is_finite() {
        json!({ "table": prefix.iter().map(row).collect::<Vec<_>>() })
    } else {
        json!({
            "prefix": prefix.iter().map(row).collect::<Vec<_>>(),
            "cycle": cycle.iter().map(row).collect::<Vec<_>>(),
        })
    }
}

/// Command defaults stored in a scenario file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// On-disk scenario, before the literals are interpreted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub ground: Json,
    pub measure: Json,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<Json>,
    /// Second function for two-function checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Json>,
    /// Second measure for two-measure checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure2: Option<Json>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<ScenarioOptions>,
}

/// A scenario file with every literal interpreted.
#[derive(Clone, Debug)]
pub struct LoadedScenario {
    pub name: Option<String>,
    pub ground: GroundModel,
    pub m: MeasureSpec,
    pub f: Option<FuncSpec>,
    pub g: Option<FuncSpec>,
    pub m2: Option<MeasureSpec>,
    pub options: ScenarioOptions,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<ScenarioFile> {
        serde_json::from_str(text).map_err(|e| perr(format!("scenario: {e}")))
    }

    pub fn load(&self) -> Result<LoadedScenario> {
        if self.version != SCENARIO_VERSION {
            return Err(perr(format!(
                "scenario version {} is not supported (expected {SCENARIO_VERSION})",
                self.version
            )));
        }
        let ground = ground_from_json(&self.ground)?;
        let options = self.options.clone().unwrap_or_default();
        if let Some(s) = &options.set {
            parse_set(s, ground)?;
        }
        Ok(LoadedScenario {
            name: self.name.clone(),
            ground,
            m: measure_from_json(&self.measure, ground)?,
            f: self
                .function
                .as_ref()
                .map(|f| func_from_json(f, ground))
                .transpose()?,
            g: self
                .g
                .as_ref()
                .map(|f| func_from_json(f, ground))
                .transpose()?,
            m2: self
                .measure2
                .as_ref()
                .map(|m| measure_from_json(m, ground))
                .transpose()?,
            options,
        })
    }
}

impl LoadedScenario {
    pub fn to_file(&self) -> ScenarioFile {
        let opts = (self.options != ScenarioOptions::default()).then(|| self.options.clone());
        ScenarioFile {
            version: SCENARIO_VERSION,
            name: self.name.clone(),
            description: None,
            ground: ground_to_json(self.ground),
            measure: measure_to_json(&self.m),
            function: self.f.as_ref().map(func_to_json),
            g: self.g.as_ref().map(func_to_json),
            measure2: self.m2.as_ref().map(measure_to_json),
            options: opts,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};

    #[test]
    fn set_literals() {
        let cases = [
            ("empty", UPSet::empty()),
            ("evens", UPSet::evens()),
            ("{3, 1}", UPSet::from_elements([1, 3])),
            ("finite:[]", UPSet::empty()),
            ("mod:3:2", UPSet::residue_class(3, 2)),
            ("tail:4", UPSet::tail(4)),
            ("range:2..5", UPSet::range(2, 5)),
        ];
        for (s, want) in cases {
            assert_eq!(s.parse::<UPSet>().unwrap(), want, "{s}");
        }
        for bad in [
            "mod:0:0",
            "mod:2:2",
            "range:1",
            "upset:N=1;prefix=10;p=1;R={0}",
            "nope",
            "{a}",
        ] {
            assert!(bad.parse::<UPSet>().is_err(), "{bad}");
        }
        assert!(parse_set("evens", GroundModel::Finite(4)).is_err());
        assert_eq!(
            parse_set("all", GroundModel::Finite(3)).unwrap(),
            GroundModel::Finite(3).full_set()
        );
    }

    #[test]
    fn display_round_trips() {
        let sets = [
            UPSet::residue_class(4, 1).union(&UPSet::from_elements([0, 2])),
            UPSet::tail(3),
            UPSet::from_elements([5, 9]),
            UPSet::all(),
            UPSet::empty(),
        ];
        for a in sets {
            assert_eq!(a.to_string().parse::<UPSet>().unwrap(), a);
        }
    }

    #[test]
    fn measure_literals_round_trip() {
        let lits = [
            (json!({"cardclass": {"0": 0, "inf": 1}}), GroundModel::Omega),
            (
                json!({"pointmass": {"weights": [1, "1/4"], "tail": {"c": "1/2", "r": "1/2"}}}),
                GroundModel::Omega,
            ),
            (
                json!({"distortion": {"g": "sqrt", "base": {"tail": {"c": "1/4", "r": "1/4"}}}}),
                GroundModel::Omega,
            ),
            (
                json!({"distortion": {"g": {"cap": "1/2"}, "base": {"weights": [1, 1]}}}),
                GroundModel::Finite(2),
            ),
            (json!({"table": [0, 1, 1, 3]}), GroundModel::Finite(2)),
            (
                json!({"sum": [{"cardclass": {"0": 0, "inf": 1}}, {"scale": {"by": 2, "measure": {"pointmass": {"tail": {"c": 1, "r": "1/3"}}}}}]}),
                GroundModel::Omega,
            ),
        ];
        for (lit, g) in lits {
            let m = measure_from_json(&lit, g).unwrap();
            let again = measure_from_json(&measure_to_json(&m), g).unwrap();
            assert_eq!(m, again);
        }
    }

    #[test]
    fn family_form_matches_tagged() {
        let pairs = [
            (
                json!({"family": "cardclass", "theta": {"0": 0, "inf": 1}}),
                json!({"cardclass": {"0": 0, "inf": 1}}),
            ),
            (
                json!({"family": "pointmass", "weights": [1], "tail": {"c": 1, "r": "1/2"}}),
                json!({"pointmass": {"weights": [1], "tail": {"c": 1, "r": "1/2"}}}),
            ),
            (
                json!({"family": "distortion", "g": "sqrt", "base": {"tail": {"c": 1, "r": "1/4"}}}),
                json!({"distortion": {"g": "sqrt", "base": {"tail": {"c": 1, "r": "1/4"}}}}),
            ),
            (
                json!({"family": "scale", "by": 3, "measure": {"family": "cardclass", "theta": {"0": 0, "inf": 1}}}),
                json!({"scale": {"by": 3, "measure": {"cardclass": {"0": 0, "inf": 1}}}}),
            ),
        ];
        for (flat, tagged) in pairs {
            assert_eq!(
                measure_from_json(&flat, GroundModel::Omega).unwrap(),
                measure_from_json(&tagged, GroundModel::Omega).unwrap()
            );
        }
        let t = json!({"family": "table", "values": {"{0}": 1, "{1}": 2, "{0,1}": 3}});
        assert!(measure_from_json(&t, GroundModel::Finite(2)).is_ok());
        let extra = json!({"family": "cardclass", "theta": {"0": 0, "inf": 1}, "x": 1});
        assert!(measure_from_json(&extra, GroundModel::Omega).is_err());
    }

    #[test]
    fn table_map_form() {
        let lit = json!({"table": {"{0}": 1, "{1}": 2, "{0,1}": 3}});
        let m = measure_from_json(&lit, GroundModel::Finite(2)).unwrap();
        assert_eq!(m.family(), &Family::Table(vec![qi(0), qi(1), qi(2), qi(3)]));
        let missing = json!({"table": {"{0}": 1}});
        assert!(measure_from_json(&missing, GroundModel::Finite(2)).is_err());
        let gap = json!({"cardclass": {"0": 0, "2": 1, "inf": 1}});
        assert!(measure_from_json(&gap, GroundModel::Omega).is_err());
    }

    #[test]
    fn function_literals() {
        let f = func_from_json(
            &json!({"prefix": [[2]], "cycle": [1, "-1/2"]}),
            GroundModel::Omega,
        )
        .unwrap();
        assert_eq!(f.at(1), vec![qi(1)]);
        assert_eq!(f.at(2), vec![q(-1, 2)]);
        assert_eq!(
            func_from_json(&func_to_json(&f), GroundModel::Omega).unwrap(),
            f
        );
        let t =
            func_from_json(&json!({"table": [[1, 0], [2, 1]]}), GroundModel::Finite(2)).unwrap();
        assert_eq!(t.dim(), 2);
        assert!(func_from_json(&json!({"table": [1, 2, 3]}), GroundModel::Finite(2)).is_err());
        assert!(func_from_json(&json!({"cycle": [1], "extra": 1}), GroundModel::Omega).is_err());
    }

    #[test]
    fn scenario_files() {
        let text = r#"{"version": 1, "ground": "omega",
            "measure": {"cardclass": {"0": 0, "inf": 1}},
            "function": {"constant": 1}, "options": {"engine": "gould"}}"#;
        let s = ScenarioFile::parse(text).unwrap().load().unwrap();
        assert_eq!(s.m, MeasureSpec::finite_null_example());
        let back = s.to_file();
        assert_eq!(back.load().unwrap().f, s.f);
        assert!(ScenarioFile::parse(&text.replace("\"options\"", "\"opts\"")).is_err());
        assert!(
            ScenarioFile::parse(&text.replace("\"version\": 1", "\"version\": 2"))
                .unwrap()
                .load()
                .is_err()
        );
    }
}
