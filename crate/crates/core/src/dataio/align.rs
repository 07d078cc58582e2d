use chrono::{DateTime, Utc};

use crate::error::{Error, Result};

/// Samples a state-change event stream onto a grid, carrying the most recent
/// value forward.
pub fn align_state_change(
    events: &[(DateTime<Utc>, f64)],
    grid: &[DateTime<Utc>],
) -> Result<Vec<f64>> {
    if events.windows(2).any(|p| p[1].0 < p[0].0) {
        return Err(Error::Input("state-change events must be sorted by instant".into()));
    }
    let Some(&first_grid) = grid.first() else {
        return Ok(Vec::new());
    };
    match events.first() {
        Some((t, _)) if *t <= first_grid => {}
        _ => {
            return Err(Error::Coverage(format!(
                "no state-change event at or before {}",
                first_grid.to_rfc3339()
            )))
        }
    }
    let mut out = Vec::with_capacity(grid.len());
    let mut next = 0;
    let mut current = f64::NAN;
    for &instant in grid {
        while next < events.len() && events[next].0 <= instant {
            current = events[next].1;
            next += 1;
        }
        out.push(current);
    }
    Ok(out)
}
