//! Averages, sign profiles and the set `J` of real fields.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constant::RealConstant;

use super::sign::{sign_analysis, SignProfile, SignReport};
use super::spec::{Coefficient, SystemSpec};
use super::SystemError;

/// Averages of one tube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubeAverages {
    pub a0: RealConstant,
    pub b0: RealConstant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemAnalysis {
    pub averages: Vec<TubeAverages>,
    pub signs: Vec<SignReport>,
    /// 1-based indices of the tubes with `b_j = 0`.
    #[serde(rename = "J")]
    pub j: Vec<usize>,
}

impl SystemAnalysis {
    pub fn profiles(&self) -> Vec<SignProfile> {
        self.signs.iter().map(|r| r.profile).collect()
    }

    /// `ell = |J|`.
    pub fn ell(&self) -> usize {
        self.j.len()
    }

    /// The averages `a_{J0}` in order.
    pub fn a_j0(&self) -> Vec<RealConstant> {
        self.j.iter().map(|&j| self.averages[j - 1].a0.clone()).collect()
    }
}

/// Mean value of a coefficient.
pub fn average(p: &Coefficient) -> RealConstant {
    p.average()
}

pub fn analyze(spec: &SystemSpec) -> Result<SystemAnalysis, SystemError> {
    spec.validate()?;
    let signs: Vec<SignReport> = spec.tubes.par_iter().map(|t| sign_analysis(&t.b)).collect();
    let averages = spec
        .tubes
        .iter()
        .zip(&signs)
        .map(|(t, r)| TubeAverages {
            a0: t.a.average(),
            b0: if r.profile == SignProfile::IdenticallyZero { RealConstant::zero() } else { t.b.mean() },
        })
        .collect();
    let j = signs
        .iter()
        .enumerate()
        .filter(|(_, r)| r.profile == SignProfile::IdenticallyZero)
        .map(|(i, _)| i + 1)
        .collect();
    Ok(SystemAnalysis { averages, signs, j })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gevrey::RealTrig;
    use crate::system::spec::{Order, Tube};

    fn tube(b: RealTrig) -> Tube {
        Tube::new(Coefficient::Constant(RealConstant::zero()), b)
    }

    fn sin() -> RealTrig {
        RealTrig::from_strs("0", &[], &["1"]).unwrap()
    }

    #[test]
    fn examples() {
        let spec = SystemSpec::new(Order::Gevrey(2.0), vec![tube(sin()), tube(RealTrig::zero())]);
        let a = analyze(&spec).unwrap();
        assert_eq!(a.j, vec![2]);
        assert_eq!(a.profiles(), vec![SignProfile::ChangesSign, SignProfile::IdenticallyZero]);

        let spec = SystemSpec::new(Order::Gevrey(2.0), vec![tube(RealTrig::from_strs("1", &["1"], &[]).unwrap())]);
        assert!(analyze(&spec).unwrap().j.is_empty());

        let spec = SystemSpec::new(Order::Smooth, vec![tube(RealTrig::zero()); 3]);
        let a = analyze(&spec).unwrap();
        assert_eq!((a.j.clone(), a.ell()), (vec![1, 2, 3], 3));
    }

    #[test]
    fn averages() {
        assert!(average(&Coefficient::Trig(sin())).is_exact_zero());
        let a = Coefficient::Trig(RealTrig::from_strs("1/2", &["1"], &[]).unwrap());
        assert_eq!(average(&a), RealConstant::from_ratio(1, 2));
        let c = RealConstant::Cf(crate::diophantine::DigitSpec::FactorialPow10);
        assert_eq!(average(&Coefficient::Constant(c.clone())), c);
    }
}
