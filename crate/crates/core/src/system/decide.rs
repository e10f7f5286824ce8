//! The hypoellipticity decision.
//!
//! The system is hypoelliptic exactly when (I) some `b_j` keeps a sign
//! without vanishing identically, or (II) the set `J` of real fields is
//! non-empty and the vector `a_{J0}` is neither rational nor exponential
//! Liouville of order `s` (Liouville in smooth mode).
//!
//! The vector status is derived from the components when that is sound:
//! one irrational component that is not (exp-)Liouville already rules out
//! the vector, and a single (exp-)Liouville component next to rational ones
//! makes the vector (exp-)Liouville. Two or more (exp-)Liouville components
//! say nothing about the vector, so the decision is then `Unknown` unless
//! a vector claim is supplied.

use serde::{Deserialize, Serialize};

use crate::constant::RealConstant;
use crate::diophantine::{DiophantineVerdict, WitnessCheck, DEFAULT_HORIZON};

use super::analyze::SystemAnalysis;
use super::sign::SignProfile;
use super::spec::{DiophantineClaim, Order, SystemSpec};
use super::SystemError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Hypoelliptic,
    NotHypoelliptic,
    Unknown,
}

/// Status of one average `a_{j0}` in the requested regularity class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentStatus {
    Rational,
    /// Irrational and not (exp-)Liouville.
    Diophantine,
    /// Irrational and (exp-)Liouville.
    Liouvillean,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentEvidence {
    /// 1-based tube index.
    pub j: usize,
    pub value: RealConstant,
    pub status: ComponentStatus,
    /// How the status was obtained: `tag`, `trend` or `claim`.
    pub basis: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<DiophantineVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorEvidence {
    pub components: Vec<ComponentEvidence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vector_claim: Option<DiophantineClaim>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_checks: Option<Vec<WitnessCheck>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Witness {
    ConditionI { j: usize, profile: SignProfile },
    ConditionII { evidence: VectorEvidence },
    FailureBothConditions { reasons: Vec<String>, evidence: Option<VectorEvidence> },
    MissingClassification { reasons: Vec<String>, evidence: Option<VectorEvidence> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub decision: Decision,
    pub witness: Witness,
    pub order: Order,
    pub explanation: String,
}

impl Verdict {
    pub fn decision_str(&self) -> &'static str {
        match self.decision {
            Decision::Hypoelliptic => "Hypoelliptic",
            Decision::NotHypoelliptic => "NotHypoelliptic",
            Decision::Unknown => "Unknown",
        }
    }
}

/// Options for [`decide`].
#[derive(Debug, Clone, Copy)]
pub struct DecideOptions {
    /// Convergents examined per continued-fraction constant.
    pub horizon: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        Self { horizon: DEFAULT_HORIZON }
    }
}

fn check_order(order: Order) -> Result<(), SystemError> {
    match order {
        Order::Gevrey(s) if s > 1.0 && s.is_finite() => Ok(()),
        Order::Gevrey(s) => Err(SystemError::OrderRejected(format!("Gevrey order must exceed 1, got {s}"))),
        Order::Analytic => Err(SystemError::OrderRejected("the analytic case is not decided here".into())),
        Order::Smooth => Ok(()),
    }
}

fn component(j: usize, value: &RealConstant, claim: Option<&DiophantineClaim>, order: Order, horizon: usize) -> Result<ComponentEvidence, SystemError> {
    let claimed = claim.and_then(|c| match order {
        Order::Gevrey(s) => c.exp_liouville_at(s),
        Order::Smooth => c.liouville,
        Order::Analytic => None,
    });
    let make = |status, basis: &str, verdict| ComponentEvidence { j, value: value.clone(), status, basis: basis.into(), verdict };
    match value.is_rational() {
        Some(true) => return Ok(make(ComponentStatus::Rational, "tag", None)),
        _ if claimed.is_some() => {
            let status = if claimed == Some(true) { ComponentStatus::Liouvillean } else { ComponentStatus::Diophantine };
            return Ok(make(status, "claim", None));
        }
        Some(false) => {}
        None => return Ok(make(ComponentStatus::Unknown, "tag", None)),
    }
    let verdict = value.classify(order.gevrey_s(), horizon)?;
    let status = match order {
        Order::Gevrey(s) if verdict.not_exp_liouville(s) => ComponentStatus::Diophantine,
        Order::Gevrey(s) if verdict.exp_liouville(s) => ComponentStatus::Liouvillean,
        Order::Smooth if verdict.has(crate::diophantine::VerdictKind::NotLiouvilleTrend) => ComponentStatus::Diophantine,
        Order::Smooth if verdict.has(crate::diophantine::VerdictKind::LiouvilleTrend) => ComponentStatus::Liouvillean,
        _ => ComponentStatus::Unknown,
    };
    Ok(make(status, "trend", Some(verdict)))
}

/// Component-wise evidence for `a_{J0}`.
pub fn vector_evidence(analysis: &SystemAnalysis, spec: &SystemSpec, order: Order, opts: DecideOptions) -> Result<VectorEvidence, SystemError> {
    let components = analysis
        .j
        .iter()
        .map(|&j| component(j, &analysis.averages[j - 1].a0, spec.tubes[j - 1].a_claim.as_ref(), order, opts.horizon))
        .collect::<Result<Vec<_>, _>>()?;
    let mut witness_checks = None;
    if let (Some(claim), Order::Gevrey(s)) = (&spec.vector_claim, order) {
        if let Some(w) = &claim.witness {
            let alphas: Vec<RealConstant> = components.iter().map(|c| c.value.clone()).collect();
            witness_checks = w.verify(&alphas, s).ok();
        }
    }
    Ok(VectorEvidence { components, vector_claim: spec.vector_claim.clone(), witness_checks })
}

fn class_word(order: Order) -> &'static str {
    match order {
        Order::Smooth => "Liouville",
        _ => "exponential Liouville",
    }
}

/// Decides global hypoellipticity in the class given by `order`.
pub fn decide(analysis: &SystemAnalysis, spec: &SystemSpec, order: Order, opts: DecideOptions) -> Result<Verdict, SystemError> {
    check_order(order)?;
    let verdict = |decision, witness, explanation: String| Verdict { decision, witness, order, explanation };

    if let Some(idx) = analysis.signs.iter().position(|r| r.profile.is_definite()) {
        let profile = analysis.signs[idx].profile;
        let j = idx + 1;
        return Ok(verdict(
            Decision::Hypoelliptic,
            Witness::ConditionI { j, profile },
            format!("b_{j} does not change sign and is not identically zero ({profile:?})"),
        ));
    }
    let unknown_signs: Vec<usize> =
        analysis.signs.iter().enumerate().filter(|(_, r)| r.profile == SignProfile::Unknown).map(|(i, _)| i + 1).collect();
    if !unknown_signs.is_empty() {
        let reasons = vec![format!("the sign of b_j could not be certified for j in {unknown_signs:?}")];
        return Ok(verdict(
            Decision::Unknown,
            Witness::MissingClassification { reasons: reasons.clone(), evidence: None },
            reasons[0].clone(),
        ));
    }
    if analysis.j.is_empty() {
        let reasons = vec!["every b_j changes sign, so condition (I) fails".to_string(), "J is empty, so condition (II) fails".to_string()];
        return Ok(verdict(
            Decision::NotHypoelliptic,
            Witness::FailureBothConditions { reasons: reasons.clone(), evidence: None },
            reasons.join("; "),
        ));
    }

    let evidence = vector_evidence(analysis, spec, order, opts)?;
    let word = class_word(order);
    let statuses: Vec<ComponentStatus> = evidence.components.iter().map(|c| c.status).collect();
    let j_list = format!("{:?}", analysis.j);
    let no_sign = "no b_j has a fixed sign".to_string();

    if statuses.iter().all(|s| *s == ComponentStatus::Rational) {
        let reasons = vec![no_sign, format!("a_J0 over J = {j_list} is rational")];
        return Ok(verdict(
            Decision::NotHypoelliptic,
            Witness::FailureBothConditions { reasons: reasons.clone(), evidence: Some(evidence) },
            reasons.join("; "),
        ));
    }

    let claimed = spec.vector_claim.as_ref().and_then(|c| match order {
        Order::Gevrey(s) => c.exp_liouville_at(s),
        Order::Smooth => c.liouville,
        Order::Analytic => None,
    });
    match claimed {
        Some(false) => {
            let text = format!("a_J0 over J = {j_list} is irrational and, by the supplied vector claim, not {word}");
            return Ok(verdict(Decision::Hypoelliptic, Witness::ConditionII { evidence }, text));
        }
        Some(true) => {
            let reasons = vec![no_sign, format!("a_J0 over J = {j_list} is {word} by the supplied vector claim")];
            return Ok(verdict(
                Decision::NotHypoelliptic,
                Witness::FailureBothConditions { reasons: reasons.clone(), evidence: Some(evidence) },
                reasons.join("; "),
            ));
        }
        None => {}
    }

    if let Some(c) = evidence.components.iter().find(|c| c.status == ComponentStatus::Diophantine) {
        let text = format!("a_{}0 = {} is irrational and not {word}, so a_J0 over J = {j_list} is not {word} either", c.j, c.value);
        return Ok(verdict(Decision::Hypoelliptic, Witness::ConditionII { evidence }, text));
    }

    let irrational: Vec<&ComponentEvidence> = evidence.components.iter().filter(|c| c.status != ComponentStatus::Rational).collect();
    if irrational.len() == 1 && irrational[0].status == ComponentStatus::Liouvillean {
        let c = irrational[0];
        let reasons = vec![
            no_sign,
            format!("a_{}0 = {} is {word} and the other averages in J are rational, so a_J0 is {word}", c.j, c.value),
        ];
        return Ok(verdict(
            Decision::NotHypoelliptic,
            Witness::FailureBothConditions { reasons: reasons.clone(), evidence: Some(evidence) },
            reasons.join("; "),
        ));
    }

    let mut reasons = Vec::new();
    let unknown: Vec<usize> = irrational.iter().filter(|c| c.status == ComponentStatus::Unknown).map(|c| c.j).collect();
    if !unknown.is_empty() {
        reasons.push(format!("the averages a_j0 for j in {unknown:?} could not be classified from finite data"));
    }
    if irrational.iter().filter(|c| c.status == ComponentStatus::Liouvillean).count() >= 2 {
        reasons.push(format!("several {word} components do not determine whether the vector a_J0 is {word}; supply a vector claim"));
    }
    let text = reasons.join("; ");
    Ok(verdict(Decision::Unknown, Witness::MissingClassification { reasons, evidence: Some(evidence) }, text))
}

/// Analysis and decision in one call.
pub fn classify_system(spec: &SystemSpec, order: Order, opts: DecideOptions) -> Result<(SystemAnalysis, Verdict), SystemError> {
    let analysis = super::analyze(spec)?;
    let verdict = decide(&analysis, spec, order, opts)?;
    Ok((analysis, verdict))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::DigitSpec;
    use crate::gevrey::RealTrig;
    use crate::system::spec::{Coefficient, Tube};

    fn trig(c0: &str, cos: &[&str], sin: &[&str]) -> RealTrig {
        RealTrig::from_strs(c0, cos, sin).unwrap()
    }

    fn constant(c: RealConstant, b: RealTrig) -> Tube {
        Tube::new(Coefficient::Constant(c), b)
    }

    fn run(spec: &SystemSpec, order: Order) -> Verdict {
        classify_system(spec, order, DecideOptions::default()).unwrap().1
    }

    fn alpha() -> RealConstant {
        RealConstant::Cf(DigitSpec::FactorialPow10)
    }

    #[test]
    fn condition_one() {
        let spec = SystemSpec::new(
            Order::Gevrey(2.0),
            vec![constant(RealConstant::zero(), trig("1", &["1"], &[])), constant(RealConstant::zero(), trig("0", &[], &["1"]))],
        );
        let v = run(&spec, Order::Gevrey(2.0));
        assert_eq!(v.decision, Decision::Hypoelliptic);
        assert!(matches!(v.witness, Witness::ConditionI { j: 1, .. }));
    }

    #[test]
    fn rational_real_field() {
        let spec = SystemSpec::new(
            Order::Gevrey(2.0),
            vec![constant(RealConstant::from_ratio(1, 2), RealTrig::zero()), constant(RealConstant::zero(), trig("0", &[], &["1"]))],
        );
        assert_eq!(run(&spec, Order::Gevrey(2.0)).decision, Decision::NotHypoelliptic);
    }

    #[test]
    fn factorial_constant_with_rational_partner() {
        let spec = SystemSpec::new(
            Order::Gevrey(2.0),
            vec![constant(alpha(), RealTrig::zero()), constant(RealConstant::zero(), RealTrig::zero())],
        );
        for s in [1.5, 2.0, 3.0] {
            assert_eq!(run(&spec, Order::Gevrey(s)).decision, Decision::Hypoelliptic, "s={s}");
        }
        assert_eq!(run(&spec, Order::Smooth).decision, Decision::NotHypoelliptic);
    }

    #[test]
    fn all_fields_change_sign() {
        let spec = SystemSpec::new(Order::Gevrey(2.0), vec![constant(alpha(), trig("0", &[], &["1"]))]);
        assert_eq!(run(&spec, Order::Gevrey(2.0)).decision, Decision::NotHypoelliptic);
    }

    #[test]
    fn opaque_average_is_unknown() {
        let spec = SystemSpec::new(Order::Gevrey(2.0), vec![constant(RealConstant::Opaque("x".into()), RealTrig::zero())]);
        let v = run(&spec, Order::Gevrey(2.0));
        assert_eq!(v.decision, Decision::Unknown);
    }

    #[test]
    fn rejects_low_order() {
        let spec = SystemSpec::new(Order::Gevrey(1.0), vec![constant(alpha(), RealTrig::zero())]);
        assert!(classify_system(&spec, Order::Gevrey(1.0), DecideOptions::default()).is_err());
        assert!(classify_system(&spec, Order::Analytic, DecideOptions::default()).is_err());
    }
}
