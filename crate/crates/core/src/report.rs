//! Machine-readable report rendering.
//!
//! Every rational and big integer crosses the wire as a decimal string, so
//! reports are exact and byte-stable; plain counts stay JSON numbers. Text
//! rendering gives one-line summaries for humans.

use num_bigint::BigInt;
use serde::Serialize;

use crate::bhw::{BhwReport, QValues};
use crate::campaign::{CampaignConfig, CampaignRecord, CampaignResult};
use crate::enumeration::{LambdaSq, MinimaProfile};
use crate::rat::{format_rat, Rat};
use crate::slicing::{ResidueStep, SliceMeta, StrongReport, TranslationStep, ViaStrongReport};
use crate::translation::{PairCheck, SampleCheck, TranslationReport, TranslationResult};

fn s(r: &Rat) -> String {
    format_rat(r)
}

fn si(x: &BigInt) -> String {
    x.to_string()
}

fn svec(v: &[Rat]) -> Vec<String> {
    v.iter().map(s).collect()
}

fn sivec(v: &[BigInt]) -> Vec<String> {
    v.iter().map(si).collect()
}

fn lambda_str(l: &LambdaSq) -> String {
    match l {
        LambdaSq::Finite(r) => s(r),
        LambdaSq::Infinite => "infinite".into(),
    }
}

#[derive(Serialize, Debug)]
pub struct CountJson {
    pub counts: Vec<u64>,
    pub total: u64,
}

#[derive(Serialize, Debug)]
pub struct MinimaJson {
    pub lambda_sq: Vec<String>,
    pub witnesses: Vec<Option<Vec<String>>>,
}

impl From<&MinimaProfile> for MinimaJson {
    fn from(p: &MinimaProfile) -> MinimaJson {
        MinimaJson {
            lambda_sq: p.lambda_sq.iter().map(lambda_str).collect(),
            witnesses: p
                .witnesses
                .iter()
                .map(|w| w.as_ref().map(|z| sivec(z)))
                .collect(),
        }
    }
}

#[derive(Serialize, Debug)]
pub struct QValuesJson {
    pub q: Vec<String>,
    pub product: String,
    pub first_power: String,
}

impl From<&QValues> for QValuesJson {
    fn from(q: &QValues) -> QValuesJson {
        QValuesJson {
            q: sivec(q.values()),
            product: si(&q.product()),
            first_power: si(&q.first_power()),
        }
    }
}

#[derive(Serialize, Debug)]
pub struct BhwJson {
    pub count: u64,
    pub minima: MinimaJson,
    pub q: Vec<String>,
    pub bound: String,
    pub first_theorem_bound: String,
    pub holds: bool,
    pub holds_first: bool,
}

impl From<&BhwReport> for BhwJson {
    fn from(r: &BhwReport) -> BhwJson {
        BhwJson {
            count: r.count,
            minima: (&r.minima).into(),
            q: sivec(r.q.values()),
            bound: si(&r.bound),
            first_theorem_bound: si(&r.first_theorem_bound),
            holds: r.holds,
            holds_first: r.holds_first,
        }
    }
}

#[derive(Serialize, Debug)]
pub struct SampleJson {
    pub t: String,
    pub dt_sq: String,
    pub monotone: bool,
    pub separated: bool,
}

impl From<&SampleCheck> for SampleJson {
    fn from(c: &SampleCheck) -> SampleJson {
        SampleJson {
            t: s(&c.t),
            dt_sq: s(&c.dt_sq),
            monotone: c.monotone,
            separated: c.separated,
        }
    }
}

#[derive(Serialize, Debug)]
pub struct PairJson {
    pub i: usize,
    pub j: usize,
    pub d_sq: String,
    pub certified: bool,
    pub samples: Vec<SampleJson>,
    pub passed: bool,
}

impl From<&PairCheck> for PairJson {
    fn from(c: &PairCheck) -> PairJson {
        PairJson {
            i: c.i,
            j: c.j,
            d_sq: s(&c.d_sq),
            certified: c.certified,
            samples: c.samples.iter().map(Into::into).collect(),
            passed: c.passed,
        }
    }
}

#[derive(Serialize, Debug)]
pub struct TranslationJson {
    pub u: Vec<Vec<String>>,
    pub d_sq: Vec<Vec<String>>,
    pub certified_all_t: bool,
    pub pairs: Vec<PairJson>,
    pub passed: bool,
}

pub fn translation_json(result: &TranslationResult, report: &TranslationReport) -> TranslationJson {
    TranslationJson {
        u: result.u.iter().map(|v| svec(v)).collect(),
        d_sq: result.d_sq.iter().map(|v| svec(v)).collect(),
        certified_all_t: result.certified_all_t,
        pairs: report.pairs.iter().map(Into::into).collect(),
        passed: report.passed && result.certified_all_t,
    }
}

#[derive(Serialize, Debug)]
pub struct TranslationStepJson {
    pub scale: String,
    pub certified_all_t: bool,
    pub count_invariant: bool,
    pub c1_invariant: bool,
    pub strengthened_c2: bool,
}

impl From<&TranslationStep> for TranslationStepJson {
    fn from(t: &TranslationStep) -> TranslationStepJson {
        TranslationStepJson {
            scale: si(&t.scale),
            certified_all_t: t.certified_all_t,
            count_invariant: t.count_invariant,
            c1_invariant: t.c1_invariant,
            strengthened_c2: t.strengthened_c2,
        }
    }
}

#[derive(Serialize, Debug)]
pub struct SliceJson {
    pub parent: usize,
    pub height: String,
    pub radius_sq: String,
    pub count: u64,
}

impl From<&SliceMeta> for SliceJson {
    fn from(m: &SliceMeta) -> SliceJson {
        SliceJson {
            parent: m.parent,
            height: si(&m.height),
            radius_sq: s(&m.radius_sq),
            count: m.count,
        }
    }
}

#[derive(Serialize, Debug)]
pub struct ResidueJson {
    pub residue: String,
    pub slices: Vec<SliceJson>,
    pub sum: u64,
    pub bound: String,
    pub within_bound: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sub: Option<Box<StrongJson>>,
}

impl From<&ResidueStep> for ResidueJson {
    fn from(r: &ResidueStep) -> ResidueJson {
        ResidueJson {
            residue: si(&r.residue),
            slices: r.slices.iter().map(Into::into).collect(),
            sum: r.sum,
            bound: si(&r.bound),
            within_bound: r.within_bound,
            sub: r.sub.as_deref().map(|s| Box::new(s.into())),
        }
    }
}

#[derive(Serialize, Debug)]
pub struct StrongJson {
    pub dim: usize,
    pub q: Vec<String>,
    pub sphere_counts: Vec<u64>,
    pub total: u64,
    pub bound: String,
    pub c1_ok: bool,
    pub c2_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub translation: Option<TranslationStepJson>,
    pub residues: Vec<ResidueJson>,
    pub partition_ok: bool,
    pub bound_ok: bool,
    pub passed: bool,
    pub failures: Vec<String>,
}

impl From<&StrongReport> for StrongJson {
    fn from(r: &StrongReport) -> StrongJson {
        StrongJson {
            dim: r.dim,
            q: sivec(&r.q),
            sphere_counts: r.sphere_counts.clone(),
            total: r.total,
            bound: si(&r.bound),
            c1_ok: r.c1_ok,
            c2_ok: r.c2_ok,
            translation: r.translation.as_ref().map(Into::into),
            residues: r.residues.iter().map(Into::into).collect(),
            partition_ok: r.partition_ok,
            bound_ok: r.bound_ok,
            passed: r.passed,
            failures: r.failures.clone(),
        }
    }
}

#[derive(Serialize, Debug)]
pub struct ViaStrongJson {
    pub count: u64,
    pub q: QValuesJson,
    pub bound: String,
    pub bound_holds: bool,
    pub strong: StrongJson,
    pub count_matches: bool,
    pub passed: bool,
}

impl From<&ViaStrongReport> for ViaStrongJson {
    fn from(r: &ViaStrongReport) -> ViaStrongJson {
        ViaStrongJson {
            count: r.count,
            q: (&r.q).into(),
            bound: si(&r.bound),
            bound_holds: r.bound_holds,
            strong: (&r.strong).into(),
            count_matches: r.count_matches,
            passed: r.passed,
        }
    }
}

#[derive(Serialize, Debug)]
pub struct OracleDiffJson {
    pub enumerated: u64,
    pub oracle: u64,
    pub equal: bool,
}

#[derive(Serialize, Debug)]
pub struct CampaignConfigJson {
    pub seed: u64,
    pub count: usize,
    pub dim_lo: usize,
    pub dim_hi: usize,
    pub entry_bound: u32,
    pub radius_bound: u32,
    pub mode: String,
}

impl From<&CampaignConfig> for CampaignConfigJson {
    fn from(c: &CampaignConfig) -> CampaignConfigJson {
        CampaignConfigJson {
            seed: c.seed,
            count: c.count,
            dim_lo: c.dims.0,
            dim_hi: c.dims.1,
            entry_bound: c.entry_bound,
            radius_bound: c.radius_bound,
            mode: c.mode.as_str().into(),
        }
    }
}

#[derive(Serialize, Debug)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CampaignResultJson {
    Theorem1(BhwJson),
    Strong(ViaStrongJson),
    Translation(TranslationJson),
    OracleDiff(OracleDiffJson),
}

#[derive(Serialize, Debug)]
pub struct CampaignRecordJson {
    pub index: usize,
    pub seed: u64,
    pub dim: usize,
    pub instance: serde_json::Value,
    pub passed: bool,
    pub result: CampaignResultJson,
}

impl From<&CampaignRecord> for CampaignRecordJson {
    fn from(r: &CampaignRecord) -> CampaignRecordJson {
        let result = match &r.result {
            CampaignResult::Theorem1(x) => CampaignResultJson::Theorem1(x.into()),
            CampaignResult::Strong(x) => CampaignResultJson::Strong(x.into()),
            CampaignResult::Translation { result, report } => {
                CampaignResultJson::Translation(translation_json(result, report))
            }
            CampaignResult::OracleDiff { enumerated, oracle } => {
                CampaignResultJson::OracleDiff(OracleDiffJson {
                    enumerated: *enumerated,
                    oracle: *oracle,
                    equal: enumerated == oracle,
                })
            }
        };
        CampaignRecordJson {
            index: r.index,
            seed: r.seed,
            dim: r.instance.dim,
            instance: serde_json::from_str(&r.instance.to_json())
                .expect("instance serialization is valid json"),
            passed: r.passed,
            result,
        }
    }
}

#[derive(Serialize, Debug)]
pub struct CampaignJson {
    pub config: CampaignConfigJson,
    pub records: Vec<CampaignRecordJson>,
    pub passed_count: usize,
    pub all_passed: bool,
}

pub fn campaign_json(config: &CampaignConfig, records: &[CampaignRecord]) -> CampaignJson {
    CampaignJson {
        config: config.into(),
        records: records.iter().map(Into::into).collect(),
        passed_count: records.iter().filter(|r| r.passed).count(),
        all_passed: records.iter().all(|r| r.passed),
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serialization cannot fail")
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn count_text(c: &CountJson) -> String {
    if c.counts.len() == 1 {
        format!("count: {}\n", c.total)
    } else {
        let per: Vec<String> = c.counts.iter().map(|x| x.to_string()).collect();
        format!("counts: [{}]\ntotal: {}\n", per.join(", "), c.total)
    }
}

pub fn minima_text(m: &MinimaJson) -> String {
    let mut out = String::new();
    for (i, (l, w)) in m.lambda_sq.iter().zip(&m.witnesses).enumerate() {
        let witness = match w {
            Some(z) => format!("({})", z.join(", ")),
            None => "-".into(),
        };
        out.push_str(&format!("lambda_{}^2 = {l}  witness {witness}\n", i + 1));
    }
    out
}

pub fn qvalues_text(q: &QValuesJson) -> String {
    format!(
        "q: [{}]\nproduct bound: {}\nfirst-theorem bound: {}\n",
        q.q.join(", "),
        q.product,
        q.first_power
    )
}

pub fn bhw_text(r: &BhwJson) -> String {
    format!(
        "count: {}\nq: [{}]\nbound: {}  [{}]\nfirst-theorem bound: {}  [{}]\n",
        r.count,
        r.q.join(", "),
        r.bound,
        pass(r.holds),
        r.first_theorem_bound,
        pass(r.holds_first),
    )
}

pub fn translation_text(t: &TranslationJson) -> String {
    let mut out = String::new();
    for (i, u) in t.u.iter().enumerate() {
        out.push_str(&format!("u_{} = ({})\n", i + 1, u.join(", ")));
    }
    for p in &t.pairs {
        out.push_str(&format!(
            "pair ({}, {}): d^2 = {}  certificate {}  [{}]\n",
            p.i + 1,
            p.j + 1,
            p.d_sq,
            if p.certified { "holds" } else { "FAILS" },
            pass(p.passed),
        ));
    }
    out.push_str(&format!("translation: [{}]\n", pass(t.passed)));
    out
}

pub fn strong_text(r: &StrongJson) -> String {
    let mut out = String::new();
    strong_text_level(r, 0, &mut out);
    out.push_str(&format!("verify-strong: [{}]\n", pass(r.passed)));
    out
}

fn strong_text_level(r: &StrongJson, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    out.push_str(&format!(
        "{pad}dim {}: total {} <= bound {} [{}], C1 [{}], C2 [{}], partition [{}]\n",
        r.dim,
        r.total,
        r.bound,
        pass(r.bound_ok),
        pass(r.c1_ok),
        pass(r.c2_ok),
        pass(r.partition_ok),
    ));
    for residue in &r.residues {
        out.push_str(&format!(
            "{pad}  residue {}: {} slices, sum {} <= {} [{}]\n",
            residue.residue,
            residue.slices.len(),
            residue.sum,
            residue.bound,
            pass(residue.within_bound),
        ));
        if let Some(sub) = &residue.sub {
            strong_text_level(sub, depth + 2, out);
        }
    }
    for f in &r.failures {
        out.push_str(&format!("{pad}  failure: {f}\n"));
    }
}

pub fn via_strong_text(r: &ViaStrongJson) -> String {
    format!(
        "count: {} (recursion total {}, {})\nbound: {} [{}]\n{}",
        r.count,
        r.strong.total,
        if r.count_matches {
            "matches"
        } else {
            "MISMATCH"
        },
        r.bound,
        pass(r.bound_holds),
        strong_text(&r.strong),
    )
}

pub fn oracle_diff_text(o: &OracleDiffJson) -> String {
    format!(
        "enumerated: {}\noracle: {}\n[{}]\n",
        o.enumerated,
        o.oracle,
        pass(o.equal)
    )
}

pub fn campaign_text(c: &CampaignJson) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "campaign mode={} seed={} count={} dims={}..{}\n",
        c.config.mode, c.config.seed, c.config.count, c.config.dim_lo, c.config.dim_hi
    ));
    for r in &c.records {
        out.push_str(&format!(
            "instance {:>4}  dim {}  [{}]\n",
            r.index,
            r.dim,
            pass(r.passed)
        ));
    }
    out.push_str(&format!(
        "passed {}/{} [{}]\n",
        c.passed_count,
        c.records.len(),
        pass(c.all_passed)
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bhw::verify_theorem1;
    use crate::campaign::{run_campaign, CampaignConfig, Mode};
    use crate::rat::rat_int;
    use crate::slicing::verify_theorem1_via_strong;
    use crate::types::{Ball, InnerProductSpace, Lattice};

    fn unit_disk_report() -> BhwReport {
        let l = Lattice::standard(2);
        let ball = Ball::new(
            InnerProductSpace::euclidean(2),
            vec![rat_int(0), rat_int(0)],
            rat_int(1),
        )
        .unwrap();
        verify_theorem1(&l, &ball).unwrap()
    }

    #[test]
    fn bhw_json_uses_strings_for_big_values() {
        let json = to_json_string(&BhwJson::from(&unit_disk_report()));
        assert!(json.contains("\"count\": 5"));
        assert!(json.contains("\"bound\": \"9\""));
        assert!(json.contains("\"1\""), "lambda strings present: {json}");
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["holds"], serde_json::Value::Bool(true));
    }

    #[test]
    fn strong_json_keeps_the_whole_recursion() {
        let l = Lattice::standard(2);
        let ball = Ball::new(
            InnerProductSpace::euclidean(2),
            vec![rat_int(0), rat_int(0)],
            rat_int(1),
        )
        .unwrap();
        let report = verify_theorem1_via_strong(&l, &ball).unwrap();
        let json = to_json_string(&ViaStrongJson::from(&report));
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        let residues = parsed["strong"]["residues"].as_array().unwrap();
        assert_eq!(residues.len(), 3);
        assert!(residues[0]["sub"]["dim"].as_u64().unwrap() == 1);
        let text = via_strong_text(&(&report).into());
        assert!(text.contains("residue 0"));
        assert!(text.contains("[pass]"));
    }

    #[test]
    fn campaign_json_is_reproducible_text() {
        let cfg = CampaignConfig::new(7, 3, (2, 2), 2, 2, Mode::Theorem1).unwrap();
        let records = run_campaign(&cfg).unwrap();
        let a = to_json_string(&campaign_json(&cfg, &records));
        let b = to_json_string(&campaign_json(&cfg, &run_campaign(&cfg).unwrap()));
        assert_eq!(a, b);
        let text = campaign_text(&campaign_json(&cfg, &records));
        assert!(text.contains("passed 3/3"));
    }
}
