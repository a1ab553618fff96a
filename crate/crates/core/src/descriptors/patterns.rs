use crate::tos::{TreeOfShapes, ATTRIBUTE_DIM};

/// Attributes of a chain of `order` shapes read from a shape up through its
/// ancestors.
#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrencePattern {
    pub order: usize,
    pub values: Vec<f64>,
}

/// One pattern per shape that has at least `order - 1` ancestors.
pub fn extract_patterns(tree: &TreeOfShapes, order: usize) -> Vec<CooccurrencePattern> {
    let mut out = Vec::new();
    for_each_pattern(tree, order, |values| {
        out.push(CooccurrencePattern {
            order,
            values: values.to_vec(),
        })
    });
    out
}

/// Calls `f` with the concatenated attributes of every chain of `order`
/// shapes, child first.
pub(crate) fn for_each_pattern(tree: &TreeOfShapes, order: usize, mut f: impl FnMut(&[f64])) {
    assert!(order >= 1, "pattern order must be at least 1");
    let mut buf = vec![0.0; order * ATTRIBUTE_DIM];
    for (i, s) in tree.shapes().iter().enumerate() {
        if s.depth + 1 < order {
            continue;
        }
        let mut node = i;
        for link in 0..order {
            let a = tree.shape(node).attributes.to_array();
            buf[link * ATTRIBUTE_DIM..(link + 1) * ATTRIBUTE_DIM].copy_from_slice(&a);
            if link + 1 < order {
                node = tree.shape(node).parent.expect("depth counts ancestors");
            }
        }
        f(&buf);
    }
}
