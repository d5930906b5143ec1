//! JSON form of a result (`"schema": "solvquot/1"`), and decoding back
//! into a `QuotientPresentation` for re-verification.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::action::ActionSpec;
use crate::dsl::{format_localized, parse_character, parse_localized, parse_poly_with, ParseError, ParseErrorKind};
use crate::error::{Error, Result};
use crate::localize::{Denominator, Localized, UnitWitness};
use crate::pipeline::{Presentation, QuotientPresentation, StageInfo, StageKind};
use crate::poly::{Poly, VarKind};
use crate::verify::{Report, SpotReport};

pub const SCHEMA: &str = "solvquot/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDoc {
    pub schema: String,
    pub field: String,
    pub c: String,
    pub weight: String,
    pub b: String,
    pub b_images: Vec<String>,
    pub slices: SlicesDoc,
    pub stages: Vec<StageDoc>,
    pub kernel: Vec<String>,
    pub presentation: PresentationDoc,
    pub checks: ChecksDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlicesDoc {
    pub u: Vec<String>,
    pub s: Vec<String>,
    pub s_inverse: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageDoc {
    /// `"additive"` or `"torus"`.
    pub kind: String,
    pub group_var: String,
    /// Index into `slices.u` or `slices.s`.
    pub slice: usize,
    pub degree: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationDoc {
    pub vars: Vec<String>,
    pub relations: Vec<String>,
}

/// `null` entries mean the check was not run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksDoc {
    pub invariance: Option<bool>,
    pub semi_invariance: Option<bool>,
    pub kernel: Option<bool>,
    pub reconstruction: Option<bool>,
    pub counting: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spotcheck: Option<SpotcheckDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpotcheckDoc {
    pub seed: u64,
    pub trials: usize,
    pub agreed: usize,
    pub skipped: usize,
    pub passed: bool,
}

impl ChecksDoc {
    pub fn from_reports(report: Option<&Report>, spot: Option<&SpotReport>) -> ChecksDoc {
        let get = |name| report.and_then(|r| r.get(name));
        ChecksDoc {
            invariance: get("invariance").zip(get("idempotence")).map(|(a, b)| a && b),
            semi_invariance: get("semi_invariance"),
            kernel: get("kernel"),
            reconstruction: get("reconstruction"),
            counting: get("counting"),
            spotcheck: spot.map(|s| SpotcheckDoc {
                seed: s.seed,
                trials: s.trials,
                agreed: s.agreed,
                skipped: s.skipped,
                passed: s.passed(),
            }),
        }
    }
}

pub fn to_doc(q: &QuotientPresentation, checks: ChecksDoc) -> ResultDoc {
    let spec = &q.spec;
    let table = spec.table();
    let fmt_all = |xs: &[Localized]| xs.iter().map(format_localized).collect::<Vec<_>>();
    let stages = q
        .stages
        .iter()
        .map(|st| {
            let (kind, var) = match st.kind {
                StageKind::Additive(i) => ("additive", spec.additive()[i]),
                StageKind::Torus(j) => ("torus", spec.torus()[j]),
            };
            StageDoc { kind: kind.into(), group_var: table.name(var).into(), slice: st.slice, degree: st.degree }
        })
        .collect();
    let s: Vec<Localized> = q.s.iter().map(|w| w.elem.clone()).collect();
    let s_inverse: Vec<Localized> = q.s.iter().map(|w| w.inverse.clone()).collect();
    ResultDoc {
        schema: SCHEMA.into(),
        field: spec.field().to_string(),
        c: q.c.to_string(),
        weight: q.weight.display(spec),
        b: format_localized(&q.b),
        b_images: fmt_all(&q.b_images),
        slices: SlicesDoc { u: fmt_all(&q.u), s: fmt_all(&s), s_inverse: fmt_all(&s_inverse) },
        stages,
        kernel: q.kernel.iter().map(|p| p.to_string()).collect(),
        presentation: PresentationDoc {
            vars: q.presentation.vars.clone(),
            relations: q.presentation.relations.iter().map(|p| p.to_string()).collect(),
        },
        checks,
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn emit_json(q: &QuotientPresentation, checks: ChecksDoc) -> String {
    let mut out = serde_json::to_string_pretty(&to_doc(q, checks)).expect("serializable");
    out.push('\n');
    out
}

fn value_err(what: &str, e: ParseError) -> Error {
    Error::Parse(ParseError { kind: ParseErrorKind::Value(format!("{what}: {}", e.kind)), ..e })
}

fn schema_err(msg: impl Into<String>) -> Error {
    Error::Parse(ParseError { line: 1, column: 1, kind: ParseErrorKind::Value(msg.into()) })
}

/// Rebuilds a result from its JSON form against the spec it came from.
/// Stage records are not stored and come back empty.
pub fn decode_result(spec: &ActionSpec, text: &str) -> Result<QuotientPresentation> {
    let doc: ResultDoc = serde_json::from_str(text).map_err(|e| {
        Error::Parse(ParseError {
            line: e.line(),
            column: e.column(),
            kind: ParseErrorKind::Value(format!("invalid result file: {e}")),
        })
    })?;
    from_doc(spec, &doc)
}

pub fn from_doc(spec: &ActionSpec, doc: &ResultDoc) -> Result<QuotientPresentation> {
    if doc.schema != SCHEMA {
        return Err(schema_err(format!("unsupported schema {:?}", doc.schema)));
    }
    if doc.field != spec.field().to_string() {
        return Err(schema_err(format!("result is over {} but the spec over {}", doc.field, spec.field())));
    }
    let table = spec.table();
    let base_only = |k: VarKind| k == VarKind::Base;
    let c = parse_poly_with(table, &doc.c, &base_only).map_err(|e| value_err("c", e))?;
    if c.is_zero() {
        return Err(schema_err("c is zero"));
    }
    let c: Denominator = Arc::new(c);
    let weight = parse_character(table, spec.torus(), &doc.weight).map_err(|e| value_err("weight", e))?;
    let loc = |what: &str, s: &str| parse_localized(&c, s).map_err(|e| value_err(what, e));
    let locs = |what: &str, xs: &[String]| xs.iter().map(|s| loc(what, s)).collect::<Result<Vec<_>>>();
    let b = loc("b", &doc.b)?;
    let b_images = locs("b_images", &doc.b_images)?;
    if b_images.len() != spec.n() {
        return Err(schema_err(format!("{} b_images for {} variables", b_images.len(), spec.n())));
    }
    let u = locs("u", &doc.slices.u)?;
    let s_elem = locs("s", &doc.slices.s)?;
    let s_inv = locs("s_inverse", &doc.slices.s_inverse)?;
    if u.len() > spec.l() || s_elem.len() > spec.m() || s_elem.len() != s_inv.len() {
        return Err(schema_err("slice counts do not fit the group"));
    }
    let s: Vec<UnitWitness> = s_elem.into_iter().zip(s_inv).map(|(elem, inverse)| UnitWitness { elem, inverse }).collect();
    let mut stages = Vec::new();
    for st in &doc.stages {
        let var = table.lookup(&st.group_var);
        let kind = match (st.kind.as_str(), var) {
            ("additive", Some(v)) => spec.additive().iter().position(|&z| z == v).map(StageKind::Additive),
            ("torus", Some(v)) => spec.torus().iter().position(|&t| t == v).map(StageKind::Torus),
            _ => None,
        }
        .ok_or_else(|| schema_err(format!("bad stage {} {}", st.kind, st.group_var)))?;
        let count = if matches!(kind, StageKind::Additive(_)) { u.len() } else { s.len() };
        if st.slice >= count {
            return Err(schema_err(format!("stage slice index {} out of range", st.slice)));
        }
        stages.push(StageInfo { kind, slice: st.slice, degree: st.degree });
    }
    let kernel = doc
        .kernel
        .iter()
        .map(|p| parse_poly_with(table, p, &base_only).map_err(|e| value_err("kernel", e)))
        .collect::<Result<Vec<_>>>()?;
    let pres_var = spec.pres_var();
    let pres_allowed = |k: VarKind| k == VarKind::Base || k == VarKind::Auxiliary;
    let relations = doc
        .presentation
        .relations
        .iter()
        .map(|p| {
            let r = parse_poly_with(table, p, &pres_allowed).map_err(|e| value_err("relation", e))?;
            let foreign = table.ids_of_kind(VarKind::Auxiliary).into_iter().any(|v| v != pres_var && r.involves(v));
            if foreign {
                return Err(schema_err(format!("relation {p} uses an unknown variable")));
            }
            Ok(r)
        })
        .collect::<Result<Vec<Poly>>>()?;
    Ok(QuotientPresentation {
        spec: spec.clone(),
        c,
        weight,
        b,
        b_images,
        u,
        s,
        stages,
        records: Vec::new(),
        kernel,
        presentation: Presentation { vars: doc.presentation.vars.clone(), relations },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_spec;
    use crate::gallery;
    use crate::pipeline::{solvable_invariants, Options};
    use crate::verify::verify_output;

    fn run(text: &str) -> QuotientPresentation {
        solvable_invariants(&parse_spec(text).unwrap(), &Options::default()).unwrap()
    }

    #[test]
    fn weitzenboeck_fields() {
        let q = run(gallery::WEITZENBOECK);
        let doc = to_doc(&q, ChecksDoc::default());
        assert_eq!(doc.c, "y");
        assert_eq!(doc.weight, "1");
        assert_eq!(doc.b_images, ["0", "y", "(-x^2 + 2*y*w)/(2*y)"]);
        assert_eq!(doc.slices.u, ["x"]);
        assert_eq!(doc.presentation.vars, ["x", "y", "w", "v"]);
        let json = emit_json(&q, ChecksDoc::default());
        assert!(json.contains("\"invariance\": null"));
        assert!(!json.contains("spotcheck"));
    }

    #[test]
    fn scaling_fields() {
        let doc = to_doc(&run(gallery::SCALING), ChecksDoc::default());
        assert_eq!(doc.slices.s, ["1/x1"]);
        assert_eq!(doc.slices.s_inverse, ["x1"]);
        assert_eq!(doc.weight, "t1");
    }

    #[test]
    fn trivial_kernel_is_empty() {
        let doc = to_doc(&run("field Q\nvars x\nmap x = x\n"), ChecksDoc::default());
        assert!(doc.kernel.is_empty());
        assert_eq!(doc.presentation.relations, ["w - 1"]);
    }

    #[test]
    fn round_trip_and_reverify() {
        for (name, text) in gallery::EXAMPLES {
            let q = run(text);
            let report = verify_output(&q);
            let json = emit_json(&q, ChecksDoc::from_reports(Some(&report), None));
            let back = decode_result(&q.spec, &json).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(verify_output(&back).passed(), "{name}");
            assert_eq!(emit_json(&back, ChecksDoc::from_reports(Some(&report), None)), json, "{name}");
        }
    }

    #[test]
    fn edited_result_fails_verification() {
        let q = run(gallery::WEITZENBOECK);
        let mut doc = to_doc(&q, ChecksDoc::default());
        doc.b_images[2] = "w".into();
        let back = from_doc(&q.spec, &doc).unwrap();
        assert_eq!(verify_output(&back).get("invariance"), Some(false));
        doc.slices.u[0] = "y".into();
        let back = from_doc(&q.spec, &doc).unwrap();
        assert_eq!(verify_output(&back).get("reconstruction"), Some(false));
    }

    #[test]
    fn schema_mismatch_is_a_parse_error() {
        let q = run(gallery::SHEAR);
        let json = emit_json(&q, ChecksDoc::default()).replace(SCHEMA, "solvquot/0");
        assert!(matches!(decode_result(&q.spec, &json), Err(Error::Parse(_))));
        assert!(matches!(decode_result(&q.spec, "{}"), Err(Error::Parse(_))));
        assert!(matches!(decode_result(&q.spec, "not json"), Err(Error::Parse(_))));
    }
}
