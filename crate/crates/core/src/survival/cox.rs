use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

use super::{record, StratifiedCohort, SurvivalRecords};

/// Cap applied to the log-hazard coefficient when the likelihood is monotone.
pub const MAX_ABS_BETA: f64 = 20.0;
const MAX_ITER: usize = 50;
const TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoxFit {
    pub beta: f64,
    pub hr: f64,
    pub se: f64,
    /// Two-sided Wald p-value.
    pub p: f64,
    pub n_events: usize,
    pub converged: bool,
    pub iterations: usize,
}

struct Subject {
    time: f64,
    event: bool,
    x: f64,
}

// Breslow log partial likelihood with score and information.
fn partial(subjects: &[Subject], beta: f64) -> (f64, f64, f64) {
    // subjects sorted by descending time; risk sets accumulate as time decreases
    let mut loglik = 0.0;
    let mut score = 0.0;
    let mut info = 0.0;
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    let mut i = 0;
    while i < subjects.len() {
        let t = subjects[i].time;
        let mut j = i;
        let mut d = 0.0;
        let mut xsum = 0.0;
        while j < subjects.len() && subjects[j].time == t {
            let s = &subjects[j];
            let e = (beta * s.x).exp();
            s0 += e;
            s1 += s.x * e;
            s2 += s.x * s.x * e;
            if s.event {
                d += 1.0;
                xsum += s.x;
            }
            j += 1;
        }
        if d > 0.0 {
            let mean = s1 / s0;
            loglik += beta * xsum - d * s0.ln();
            score += xsum - d * mean;
            info += d * (s2 / s0 - mean * mean);
        }
        i = j;
    }
    (loglik, score, info)
}

/// Univariable Cox model over `(time, event, covariate)` triples, fitted by
/// Newton's method with step halving and Breslow ties.
pub fn cox_fit(data: &[(f64, bool, f64)]) -> Result<CoxFit> {
    let n_events = data.iter().filter(|d| d.1).count();
    if n_events == 0 {
        return Err(Error::Fit("no observed events".into()));
    }
    if let Some(d) = data.iter().find(|d| !(d.0 > 0.0) || !d.0.is_finite() || !d.2.is_finite()) {
        return Err(Error::Fit(format!("invalid subject (time {}, covariate {})", d.0, d.2)));
    }
    let mut subjects: Vec<Subject> = data
        .iter()
        .map(|&(time, event, x)| Subject { time, event, x })
        .collect();
    subjects.sort_by(|a, b| b.time.total_cmp(&a.time));

    let mut beta = 0.0;
    let (mut ll, mut u, mut info) = partial(&subjects, beta);
    let mut converged = false;
    let mut capped = false;
    let mut iterations = 0;
    while iterations < MAX_ITER {
        iterations += 1;
        if !(info > 0.0) {
            break;
        }
        let mut step = u / info;
        let mut next = beta + step;
        let (mut ll_next, mut u_next, mut info_next) = partial(&subjects, next);
        let mut halvings = 0;
        // a drop within rounding noise of ll is not a real decrease
        let floor = ll - 1e-12 * ll.abs().max(1.0);
        while !(ll_next >= floor) && halvings < 30 {
            step /= 2.0;
            next = beta + step;
            (ll_next, u_next, info_next) = partial(&subjects, next);
            halvings += 1;
        }
        if next.abs() > MAX_ABS_BETA {
            beta = MAX_ABS_BETA.copysign(next);
            (ll, u, info) = partial(&subjects, beta);
            capped = true;
            break;
        }
        let delta = (next - beta).abs();
        beta = next;
        (ll, u, info) = (ll_next, u_next, info_next);
        if delta < TOL {
            converged = true;
            break;
        }
    }
    let _ = (ll, u);
    if capped {
        log::warn!("monotone partial likelihood: coefficient capped at {beta}");
    } else if !converged {
        log::warn!("Cox fit did not converge in {iterations} iterations");
    }
    let se = if info > 0.0 { 1.0 / info.sqrt() } else { f64::INFINITY };
    let z = beta / se;
    let p = if se.is_finite() { erfc(z.abs() / std::f64::consts::SQRT_2) } else { 1.0 };
    Ok(CoxFit {
        beta,
        hr: beta.exp(),
        se,
        p: p.clamp(0.0, 1.0),
        n_events,
        converged: converged && !capped,
        iterations,
    })
}

/// Fits `x = 1` for the high group against `x = 0` for the low group.
pub fn cox_univariable(c: &StratifiedCohort, surv: &SurvivalRecords) -> Result<CoxFit> {
    let mut data = Vec::with_capacity(c.high.len() + c.low.len());
    for (group, x) in [(&c.high, 1.0), (&c.low, 0.0)] {
        for s in group {
            let r = record(surv, s)?;
            data.push((r.time, r.event, x));
        }
    }
    cox_fit(&data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_groups_give_unit_hazard() {
        let times = [3.0, 5.0, 8.0, 8.0, 12.0];
        let events = [true, false, true, true, false];
        let mut data = Vec::new();
        for x in [0.0, 1.0] {
            for (t, e) in times.iter().zip(events) {
                data.push((*t, e, x));
            }
        }
        let fit = cox_fit(&data).unwrap();
        assert!(fit.beta.abs() < 1e-12, "{}", fit.beta);
        assert!((fit.hr - 1.0).abs() < 1e-12);
        assert!(fit.converged);
    }

    #[test]
    fn no_events_is_an_error() {
        assert!(matches!(cox_fit(&[(1.0, false, 1.0), (2.0, false, 0.0)]), Err(Error::Fit(_))));
    }

    #[test]
    fn complete_separation_is_capped() {
        // every high subject dies before any low subject
        let data = [
            (1.0, true, 1.0),
            (2.0, true, 1.0),
            (3.0, true, 1.0),
            (4.0, true, 0.0),
            (5.0, false, 0.0),
            (6.0, false, 0.0),
        ];
        let fit = cox_fit(&data).unwrap();
        assert!(!fit.converged);
        assert!(fit.beta > 0.0 && fit.beta.abs() <= MAX_ABS_BETA);
    }

    #[test]
    fn time_rescaling_is_exact() {
        let data = [(2.0, true, 1.0), (3.0, true, 0.0), (5.0, true, 1.0), (7.0, false, 0.0), (11.0, true, 0.0)];
        let scaled: Vec<_> = data.iter().map(|&(t, e, x)| (t * 10.0, e, x)).collect();
        assert_eq!(cox_fit(&data).unwrap().beta, cox_fit(&scaled).unwrap().beta);
    }
}
