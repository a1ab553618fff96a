use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::svm::{train_classifier, Classifier, SvmParams};
use crate::descriptors::{Descriptor, FeatureKind};
use crate::error::{Error, Result};

/// One classifier per feature kind over a shared class set; the combined
/// score of a class is the mean of member scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleClassifier {
    pub classes: Vec<String>,
    pub members: BTreeMap<FeatureKind, Classifier>,
}

impl EnsembleClassifier {
    /// `features[kind][i]` is the input of sample `i` for that member.
    pub fn train(
        features: &BTreeMap<FeatureKind, Vec<Vec<f64>>>,
        labels: &[usize],
        classes: &[String],
        params: &SvmParams,
    ) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Invalid("ensemble needs at least one feature kind".into()));
        }
        let members = features
            .iter()
            .map(|(&k, x)| Ok((k, train_classifier(x, labels, classes, params)?)))
            .collect::<Result<_>>()?;
        Ok(EnsembleClassifier {
            classes: classes.to_vec(),
            members,
        })
    }

    pub fn kinds(&self) -> Vec<FeatureKind> {
        self.members.keys().copied().collect()
    }

    pub fn classify(&self, descriptors: &BTreeMap<FeatureKind, Descriptor>) -> Result<(String, Vec<f64>)> {
        ensemble_classify(&self.classes, &self.members, descriptors)
    }
}

/// Mean of member scores per class and the winning label; exact ties go to
/// the lexicographically smallest label.
pub fn combine_scores(classes: &[String], member_scores: &[Vec<f64>]) -> (String, Vec<f64>) {
    let k = classes.len();
    let mut mean = vec![0.0; k];
    for s in member_scores {
        for (m, v) in mean.iter_mut().zip(s) {
            *m += v;
        }
    }
    let n = member_scores.len().max(1) as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    let mut best = 0;
    for c in 1..k {
        if mean[c] > mean[best] || (mean[c] == mean[best] && classes[c] < classes[best]) {
            best = c;
        }
    }
    (classes[best].clone(), mean)
}

pub fn ensemble_classify(
    classes: &[String],
    members: &BTreeMap<FeatureKind, Classifier>,
    descriptors: &BTreeMap<FeatureKind, Descriptor>,
) -> Result<(String, Vec<f64>)> {
    if members.is_empty() {
        return Err(Error::UntrainedClassifier("ensemble has no members".into()));
    }
    let scores = members
        .iter()
        .map(|(kind, m)| {
            let d = descriptors.get(kind).ok_or(Error::MissingFeatureKind(*kind))?;
            m.scores(&d.values)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(combine_scores(classes, &scores))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Vec<String> {
        vec!["A".into(), "B".into()]
    }

    #[test]
    fn unanimity() {
        let (l, s) = combine_scores(&ab(), &[vec![0.9, 0.1], vec![0.9, 0.1]]);
        assert_eq!(l, "A");
        assert_eq!(s[0], 0.9);
    }

    #[test]
    fn exact_tie_goes_to_smallest_label() {
        let classes: Vec<String> = vec!["TDT".into(), "SHDT".into()];
        let (l, _) = combine_scores(&classes, &[vec![0.6, 0.4], vec![0.4, 0.6]]);
        assert_eq!(l, "SHDT");
    }

    #[test]
    fn hand_average() {
        let (l, s) = combine_scores(&ab(), &[vec![0.9, 0.1], vec![0.6, 0.4]]);
        assert_eq!(l, "A");
        assert!((s[0] - 0.75).abs() < 1e-15 && (s[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn missing_member_feature() {
        let x = vec![vec![0.0], vec![1.0], vec![0.1], vec![0.9]];
        let mut f = BTreeMap::new();
        f.insert(FeatureKind::Lbptop, x);
        let e = EnsembleClassifier::train(&f, &[0, 1, 0, 1], &ab(), &SvmParams::default()).unwrap();
        let mut d = BTreeMap::new();
        d.insert(FeatureKind::Scopdt, Descriptor::new(FeatureKind::Scopdt, vec![0.0]));
        assert!(matches!(
            e.classify(&d),
            Err(Error::MissingFeatureKind(FeatureKind::Lbptop))
        ));
        d.insert(FeatureKind::Lbptop, Descriptor::new(FeatureKind::Lbptop, vec![0.95]));
        assert_eq!(e.classify(&d).unwrap().0, "B");
    }
}
