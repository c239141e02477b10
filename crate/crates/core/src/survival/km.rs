use crate::error::{Error, Result};

use super::{record, SurvivalRecords};

/// Product-limit survival curve for `samples`.
///
/// Starts at `(0, 1)` and adds one point per distinct event time `t` with
/// `S(t) = S(t-) * (1 - d_t / n_t)`; subjects censored at `t` still count in
/// `n_t`.
pub fn km_curve<S: AsRef<str>>(samples: &[S], surv: &SurvivalRecords) -> Result<Vec<(f64, f64)>> {
    if samples.is_empty() {
        return Err(Error::Validation("Kaplan-Meier curve needs at least one sample".into()));
    }
    let mut obs = samples
        .iter()
        .map(|s| record(surv, s.as_ref()).map(|r| (r.time, r.event)))
        .collect::<Result<Vec<_>>>()?;
    obs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut curve = vec![(0.0, 1.0)];
    let mut at_risk = obs.len();
    let mut s = 1.0;
    let mut i = 0;
    while i < obs.len() {
        let t = obs[i].0;
        let mut j = i;
        let mut deaths = 0;
        while j < obs.len() && obs[j].0 == t {
            deaths += usize::from(obs[j].1);
            j += 1;
        }
        if deaths > 0 {
            s *= 1.0 - deaths as f64 / at_risk as f64;
            curve.push((t, s));
        }
        at_risk -= j - i;
        i = j;
    }
    Ok(curve)
}
