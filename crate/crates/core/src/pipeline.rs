//! Pipeline runs (analyze, normalize, certify) recorded as ordered stages with JSON payloads.

use serde::Serialize;
use serde_json::{json, Value};

use crate::basis::{build_reduced_basis, BasisSummary, ClassifiedBasis, Mode};
use crate::certificate::Certificate;
use crate::classify::classify_all;
use crate::gamma::{build_gamma, check_gamma_conditions, ArrowGraph};
use crate::poset::{build_poset, Poset};
use crate::presentation::{Document, FieldDoc, Presentation, PresentationError};
use crate::rescale::{apply_rescaling, exponent_system, ObstructionCertificate, RescaleError};
use crate::scalar::Field;
use crate::triangular::{radical_filtration, rebase, triangular_bases};
use crate::verify::{verify_basis, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageStatus {
    Ok,
    CertifiedViolation,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    pub name: String,
    pub status: StageStatus,
    pub payload: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizedBasis {
    pub presentation: Document,
    #[serde(flatten)]
    pub basis: BasisSummary,
    pub verification: VerificationReport,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Final {
    Basis(Box<NormalizedBasis>),
    Certificates {
        certificates: Vec<Certificate>,
        #[serde(skip_serializing_if = "Vec::is_empty")]
        obstructions: Vec<ObstructionCertificate>,
    },
    Obstruction { obstructions: Vec<ObstructionCertificate> },
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub stages: Vec<Stage>,
    #[serde(rename = "final", skip_serializing_if = "Option::is_none")]
    pub final_: Option<Final>,
}

impl RunReport {
    fn new(command: &str) -> Self {
        RunReport { command: command.into(), stages: Vec::new(), final_: None }
    }

    fn push(&mut self, name: &str, status: StageStatus, payload: Value) {
        self.stages.push(Stage { name: name.into(), status, payload });
    }

    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }

    /// 1 on any error stage, 2 on any certified violation, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.stages.iter().any(|s| s.status == StageStatus::Error) {
            1
        } else if self.stages.iter().any(|s| s.status == StageStatus::CertifiedViolation) {
            2
        } else {
            0
        }
    }

    pub fn certificates(&self) -> Vec<Certificate> {
        self.stages
            .iter()
            .filter(|s| s.status == StageStatus::CertifiedViolation)
            .filter_map(|s| s.payload.get("certificates"))
            .filter_map(|c| serde_json::from_value::<Vec<Certificate>>(c.clone()).ok())
            .flatten()
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Parses a presentation document, optionally reading its entries over another field.
pub fn load_presentation(text: &str, field: Option<Field>) -> Result<Presentation, PresentationError> {
    let p = Presentation::parse(text)?;
    match field {
        Some(f) if f != p.field => {
            let mut doc = p.to_document();
            doc.field = FieldDoc::of(f);
            doc.into_presentation()
        }
        _ => Ok(p),
    }
}

fn certs(c: &[Certificate]) -> Value {
    json!({ "certificates": c })
}

/// State after the analysis stages; `basis` is None when an earlier stage halted synthesis.
pub struct Analysis {
    pub report: RunReport,
    pub basis: Option<ClassifiedBasis>,
    pub poset: Option<Poset>,
    pub gamma: Option<ArrowGraph>,
    pub violations: Vec<Certificate>,
}

pub fn analyze(p: &Presentation, mode: Mode) -> Analysis {
    run_checks("analyze", p, mode)
}

fn run_checks(command: &str, p: &Presentation, mode: Mode) -> Analysis {
    let mut report = RunReport::new(command);
    let out = |report: RunReport, basis, poset, gamma, violations| Analysis { report, basis, poset, gamma, violations };

    let v = p.validate();
    if !v.is_valid() {
        report.push("validate", StageStatus::Error, serde_json::to_value(&v).unwrap());
        return out(report, None, None, None, Vec::new());
    }
    report.push("validate", StageStatus::Ok, serde_json::to_value(&v).unwrap());

    let bases = match triangular_bases(p) {
        Ok(b) => {
            let payload: Vec<Value> = b
                .iter()
                .map(|t| {
                    json!({
                        "object": p.name(t.object),
                        "dims": radical_filtration(p, t.object).dims(),
                        "vectors": t.vectors.iter().map(|v| v.iter().map(|x| x.entry_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            report.push("filtration", StageStatus::Ok, json!({ "bases": payload }));
            b
        }
        Err(c) => {
            report.push("filtration", StageStatus::CertifiedViolation, certs(&c));
            return out(report, None, None, None, c);
        }
    };
    let q = rebase(p, &bases);

    let cls = match classify_all(&q) {
        Ok(c) => c,
        Err(c) => {
            report.push("classification", StageStatus::CertifiedViolation, certs(&c));
            return out(report, None, None, None, c);
        }
    };
    let homs: Vec<&_> = cls.homs.values().collect();
    let endo: Vec<Value> = cls.endo.iter().enumerate().map(|(a, e)| json!({ "object": q.name(a), "endo": e })).collect();
    report.push("classification", StageStatus::Ok, json!({ "endomorphisms": endo, "homs": homs }));

    let basis = build_reduced_basis(&q, bases, cls, mode);
    let mut violations = Vec::new();

    let cond = basis.check_conditions();
    // d) is established by rescaling, the rest must already hold
    let structural = cond.a.pass && cond.b.pass && cond.c.pass && (cond.e.pass || basis.field().characteristic() == 2);
    report.push(
        "conditions",
        if structural { StageStatus::Ok } else { StageStatus::CertifiedViolation },
        json!({ "conditions": cond, "notices": basis.notices }),
    );
    if !structural {
        violations.push(Certificate::new("conditions", Vec::new()).with_detail("basis conditions a)-c), e) fail"));
    }

    let poset = match build_poset(&basis) {
        Ok(poset) => {
            let c = poset.check_conditions();
            let status = if c.is_empty() { StageStatus::Ok } else { StageStatus::CertifiedViolation };
            report.push("poset", status, json!({ "poset": poset.summary(), "certificates": c }));
            violations.extend(c);
            Some(poset)
        }
        Err(c) => {
            report.push("poset", StageStatus::CertifiedViolation, certs(std::slice::from_ref(&c)));
            violations.push(c);
            None
        }
    };

    let gamma = poset.as_ref().map(|poset| {
        let g = build_gamma(&basis);
        let c = check_gamma_conditions(&g, poset, &basis);
        let status = if c.is_empty() { StageStatus::Ok } else { StageStatus::CertifiedViolation };
        report.push(
            "gamma",
            status,
            json!({ "graph": g.summary(poset), "dot": g.to_dot(poset), "certificates": c }),
        );
        violations.extend(c);
        g
    });
    out(report, Some(basis), poset, gamma, violations)
}

pub fn normalize(p: &Presentation, mode: Mode) -> RunReport {
    let a = run_checks("normalize", p, mode);
    let mut report = a.report;
    let (Some(basis), Some(poset), Some(gamma)) = (a.basis, a.poset, a.gamma) else {
        report.final_ = Some(Final::Certificates { certificates: a.violations, obstructions: Vec::new() });
        return report;
    };
    let sys = exponent_system(&basis, &poset, &gamma);
    if !a.violations.is_empty() {
        let obstructions = sys.obstructions();
        if !obstructions.is_empty() {
            report.push("obstruction", StageStatus::CertifiedViolation, json!({ "obstructions": obstructions }));
        }
        report.final_ = Some(Final::Certificates { certificates: a.violations, obstructions });
        return report;
    }
    let sol = match sys.solve() {
        Ok(sol) => sol,
        Err(RescaleError::Obstructed(o)) => {
            let all = sys.obstructions();
            report.push("rescale", StageStatus::CertifiedViolation, json!({ "obstruction": o, "obstructions": all }));
            report.final_ = Some(Final::Obstruction { obstructions: all });
            return report;
        }
        Err(e @ RescaleError::UnsolvableRoot { .. }) => {
            report.push("rescale", StageStatus::CertifiedViolation, json!({ "error": e.to_string(), "detail": e }));
            report.final_ = Some(Final::Certificates {
                certificates: vec![Certificate::new("root", Vec::new()).with_detail(e.to_string())],
                obstructions: Vec::new(),
            });
            return report;
        }
    };
    report.push(
        "rescale",
        StageStatus::Ok,
        json!({ "rows": sys.rows, "vertices": sys.labels, "solution": sol.x }),
    );
    let rescaled = apply_rescaling(&basis, &poset, &sol);
    let verification = verify_basis(&rescaled);
    let ok = verification.accepted && verification.conditions.all_pass();
    report.push(
        "verify",
        if ok { StageStatus::Ok } else { StageStatus::Error },
        serde_json::to_value(&verification).unwrap(),
    );
    report.final_ = Some(Final::Basis(Box::new(NormalizedBasis {
        presentation: p.to_document(),
        basis: rescaled.summary(),
        verification,
    })));
    report
}

pub fn certify(p: &Presentation, mode: Mode) -> RunReport {
    let a = run_checks("certify", p, mode);
    let mut report = a.report;
    let (Some(basis), Some(poset), Some(gamma)) = (a.basis, a.poset, a.gamma) else {
        report.final_ = Some(Final::Certificates { certificates: a.violations, obstructions: Vec::new() });
        return report;
    };
    let sys = exponent_system(&basis, &poset, &gamma);
    let generators: Vec<Value> = sys
        .weight_kernel()
        .into_iter()
        .map(|(z, w, r)| json!({ "kernel": z, "weights": w.z, "residual": r, "obstructs": !r.is_one() }))
        .collect();
    let obstructions = sys.obstructions();
    report.push(
        "certify",
        if obstructions.is_empty() { StageStatus::Ok } else { StageStatus::CertifiedViolation },
        json!({ "rows": sys.rows, "vertices": sys.labels, "generators": generators }),
    );
    report.final_ = Some(Final::Obstruction { obstructions });
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Presentation {
        Presentation::parse(text).unwrap()
    }

    #[test]
    fn analyze_stage_order() {
        let a = analyze(&load(include_str!("../corpus/two_step.json")), Mode::Numeric);
        let names: Vec<&str> = a.report.stages.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["validate", "filtration", "classification", "conditions", "poset", "gamma"]);
        assert_eq!(a.report.exit_code(), 0);
        assert!(a.violations.is_empty());
    }

    #[test]
    fn invalid_presentation_halts() {
        let a = analyze(&load(include_str!("../fixtures/not_closed.json")), Mode::Numeric);
        assert_eq!(a.report.stages.len(), 1);
        assert_eq!(a.report.exit_code(), 1);
        assert!(a.basis.is_none());
    }

    #[test]
    fn violation_halts_synthesis() {
        let r = normalize(&load(include_str!("../fixtures/mut_lemma6.json")), Mode::Numeric);
        assert_eq!(r.exit_code(), 2);
        assert!(r.stage("rescale").is_none());
        assert!(r.stage("gamma").is_some());
        assert_eq!(r.certificates()[0].lemma, "lemma6");
        assert!(matches!(r.final_, Some(Final::Certificates { .. })));
    }

    #[test]
    fn normalize_then_verify() {
        let r = normalize(&load(include_str!("../corpus/diag_one_double.json")), Mode::Numeric);
        assert_eq!(r.exit_code(), 0);
        let Some(Final::Basis(b)) = &r.final_ else { panic!("no basis") };
        assert!(b.verification.accepted);
        let (_, again) = crate::verify::verify_document(&r.to_json(), None).unwrap();
        assert!(again.accepted);
    }

    #[test]
    fn certify_lists_generators() {
        let r = certify(&load(include_str!("../fixtures/obstructed.json")), Mode::Numeric);
        let payload = &r.stage("certify").unwrap().payload;
        assert_eq!(payload["generators"].as_array().unwrap().len(), 1);
        assert_eq!(payload["generators"][0]["obstructs"], true);
    }

    #[test]
    fn field_override() {
        let text = include_str!("../corpus/two_step.json");
        let p = load_presentation(text, Some(Field::prime(3).unwrap())).unwrap();
        assert_eq!(p.field, Field::Prime(3));
        // λ = 2 over F_3 is a square root away from 1
        assert_eq!(normalize(&p, Mode::Numeric).exit_code(), 0);
    }
}
