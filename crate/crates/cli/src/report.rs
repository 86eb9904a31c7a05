use std::collections::BTreeSet;

use explograph_core::explosion::{
    refine_by_fan, rend_components, ExplodedComplex, Fan, NcConfiguration, RendComponent,
};
use explograph_core::gluing::{CountingProblem, LedgerEntry, Mark, ProblemSpec, RigidCurve};
use explograph_core::rational::{format_rational, parse_rational, rat};
use explograph_core::tropcurve::TropicalCurve;
use explograph_core::Rational;
use serde::{Deserialize, Serialize};

use crate::fail::{CliResult, Failure};
use crate::io::Input;

pub const TOOL: &str = concat!("explograph ", env!("CARGO_PKG_VERSION"));

pub const COMPLEX: &str = "explograph/complex/v1";
pub const REND: &str = "explograph/rend/v1";
pub const ENUMERATION: &str = "explograph/enumeration/v1";
pub const COUNT: &str = "explograph/count-report/v1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanFile {
    pub fan: Fan,
}

#[derive(Serialize, Deserialize)]
pub struct ComplexFile {
    pub schema: String,
    pub tool: String,
    pub seed: Option<u64>,
    pub complex: ExplodedComplex,
}

impl ComplexFile {
    pub fn new(complex: ExplodedComplex) -> Self {
        Self { schema: COMPLEX.into(), tool: TOOL.into(), seed: None, complex }
    }
}

#[derive(Serialize, Deserialize)]
pub struct RendFile {
    pub schema: String,
    pub tool: String,
    pub seed: Option<u64>,
    pub max_order: u64,
    pub configuration: NcConfiguration,
    pub components: Vec<RendComponent>,
}

#[derive(Serialize, Deserialize)]
pub struct TypedCurve {
    pub type_hash: String,
    pub curve: TropicalCurve,
    pub marks: Vec<Mark>,
    /// Product of vertex weights; set when only the direct pipeline ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ledger: Option<LedgerEntry>,
}

impl TypedCurve {
    pub fn new(rc: RigidCurve) -> Self {
        Self { type_hash: rc.type_hash(), curve: rc.curve, marks: rc.marks, multiplicity: None, ledger: None }
    }

    pub fn rigid(&self) -> RigidCurve {
        RigidCurve { curve: self.curve.clone(), marks: self.marks.clone() }
    }
}

#[derive(Serialize, Deserialize)]
pub struct EnumerationFile {
    pub schema: String,
    pub tool: String,
    pub seed: Option<u64>,
    #[serde(default)]
    pub reseeds: u32,
    pub problem: CountingProblem,
    pub types: usize,
    pub curves: Vec<TypedCurve>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Direct,
    Glued,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Equal,
    Mismatch,
}

#[derive(Serialize, Deserialize)]
pub struct CountFile {
    pub schema: String,
    pub tool: String,
    pub seed: Option<u64>,
    #[serde(default)]
    pub reseeds: u32,
    pub problem: CountingProblem,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub glued: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    pub curves: Vec<TypedCurve>,
}

fn q(s: &str) -> CliResult<Rational> {
    Ok(parse_rational(s)?)
}

fn bad(msg: impl Into<String>) -> Failure {
    Failure::schema(msg)
}

fn ratio(n: u64, d: u64) -> Rational {
    rat(n as i64) / rat(d as i64)
}

fn check_curve(tc: &TypedCurve, prob: &CountingProblem) -> CliResult<()> {
    let rc = tc.rigid();
    rc.curve.validate()?;
    if !rc.curve.check_balanced() {
        return Err(bad(format!("curve {} is not balanced", tc.type_hash)));
    }
    if rc.curve.genus()? != prob.genus {
        return Err(bad(format!("curve {} has the wrong genus", tc.type_hash)));
    }
    if rc.type_hash() != tc.type_hash {
        return Err(bad(format!("type hash {} does not match its curve", tc.type_hash)));
    }
    let mut ends: Vec<Vec<i64>> = rc.curve.ends.iter().map(|e| e.d.clone()).collect();
    let mut want: Vec<Vec<i64>> = prob.ends.iter().map(|e| e.to_vec()).collect();
    ends.sort();
    want.sort();
    if ends != want {
        return Err(bad(format!("curve {} has the wrong ends", tc.type_hash)));
    }
    let marked: BTreeSet<Vec<Rational>> = rc.marks.iter().map(|m| m.point.clone()).collect();
    let points: BTreeSet<Vec<Rational>> = prob.points.iter().map(|p| p.to_vec()).collect();
    if marked != points {
        return Err(bad(format!("curve {} is not marked at the problem points", tc.type_hash)));
    }
    Ok(())
}

fn check_ledger(l: &LedgerEntry) -> CliResult<()> {
    let ok = l.k_gamma > 0
        && l.aut > 0
        && l.matching == ratio(l.labeled_gluings, l.k_gamma)
        && l.contribution == ratio(l.k_gamma, l.aut) * &l.matching * &l.multiplicity
        && l.direct == l.multiplicity;
    if ok {
        Ok(())
    } else {
        Err(bad(format!("ledger for {} is inconsistent", l.type_hash)))
    }
}

fn check_envelope(schema: &str, tool: &str) -> CliResult<()> {
    if !tool.starts_with("explograph ") {
        return Err(bad(format!("{schema}: unknown producing tool {tool:?}")));
    }
    Ok(())
}

/// Re-validates an emitted report or an input file; returns what it was.
pub fn check(input: &Input) -> CliResult<String> {
    match input.schema() {
        Some(COMPLEX) => {
            let f: ComplexFile = input.parse()?;
            check_envelope(&f.schema, &f.tool)?;
            f.complex.validate()?;
        }
        Some(REND) => {
            let f: RendFile = input.parse()?;
            check_envelope(&f.schema, &f.tool)?;
            if rend_components(&f.configuration, f.max_order)? != f.components {
                return Err(bad("rend components do not match the configuration"));
            }
        }
        Some(ENUMERATION) => {
            let f: EnumerationFile = input.parse()?;
            check_envelope(&f.schema, &f.tool)?;
            if f.types != f.curves.len() {
                return Err(bad("type count does not match the curve list"));
            }
            for c in &f.curves {
                check_curve(c, &f.problem)?;
            }
        }
        Some(COUNT) => {
            let f: CountFile = input.parse()?;
            check_envelope(&f.schema, &f.tool)?;
            let mut direct = rat(0);
            let mut glued = rat(0);
            for c in &f.curves {
                check_curve(c, &f.problem)?;
                if let Some(l) = &c.ledger {
                    check_ledger(l)?;
                    if l.type_hash != c.type_hash {
                        return Err(bad("ledger attached to the wrong curve"));
                    }
                    direct += &l.direct;
                    glued += &l.contribution;
                } else if let Some(m) = &c.multiplicity {
                    direct += q(m)?;
                } else {
                    return Err(bad(format!("curve {} carries no weight", c.type_hash)));
                }
            }
            if let Some(d) = &f.direct {
                if q(d)? != direct {
                    return Err(bad("direct total does not match the curves"));
                }
            }
            if let Some(g) = &f.glued {
                if q(g)? != glued {
                    return Err(bad("glued total does not match the ledger"));
                }
            }
            if let (Some(v), Some(d), Some(g)) = (f.verdict, &f.direct, &f.glued) {
                let eq = q(d)? == q(g)?;
                if (v == Verdict::Equal) != eq {
                    return Err(bad("verdict does not match the totals"));
                }
            }
        }
        Some(other) => return Err(bad(format!("unknown schema {other:?}"))),
        None if input.has_key("fan") => {
            let f: FanFile = input.parse()?;
            refine_by_fan(&f.fan)?.validate()?;
            return Ok("fan".into());
        }
        None if input.has_key("nerve") => {
            let c: NcConfiguration = input.parse()?;
            c.normalized_nerve()?;
            return Ok("nc-configuration".into());
        }
        None if input.has_key("vertices") => {
            let c: TropicalCurve = input.parse()?;
            c.validate()?;
            return Ok("curve".into());
        }
        None if input.has_key("degree") || input.has_key("ends") => {
            let p: ProblemSpec = input.parse()?;
            if p.points.is_some() {
                CountingProblem::try_from(p)?;
            }
            return Ok("problem".into());
        }
        None => return Err(bad("unrecognized file: no schema field")),
    }
    Ok(input.schema().unwrap_or_default().to_string())
}

pub fn fmt_q(x: &Rational) -> String {
    format_rational(x)
}
