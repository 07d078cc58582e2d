use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// Two predictions sharing a true value: one accurate, one far off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CasePair {
    pub accurate: usize,
    pub deviated: usize,
}

/// First row with error below `accurate_below` that has a row with error
/// above `deviated_above` and the same true value; the earliest such
/// deviated row is paired with it.
pub fn select_case_pair(
    y_true: &[f64],
    y_pred: &[f64],
    accurate_below: f64,
    deviated_above: f64,
) -> Option<CasePair> {
    let mut first_deviated: HashMap<u64, usize> = HashMap::new();
    for (j, (t, p)) in y_true.iter().zip(y_pred).enumerate() {
        if (t - p).abs() > deviated_above {
            first_deviated.entry(t.to_bits()).or_insert(j);
        }
    }
    y_true.iter().zip(y_pred).enumerate().find_map(|(i, (t, p))| {
        if (t - p).abs() < accurate_below {
            first_deviated.get(&t.to_bits()).map(|&j| CasePair {
                accurate: i,
                deviated: j,
            })
        } else {
            None
        }
    })
}
