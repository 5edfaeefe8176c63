use std::fmt;

use serde::{Deserialize, Serialize};

use super::AnalysisError;

/// Which part of the solution a series measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    Theta,
    Momentum,
    Pair,
}

/// Frequency band a series was computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Band {
    Full,
    Low,
    High,
}

/// How a sample is formed from the fields at one time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "order")]
pub enum NormKind {
    /// `||grad^j U||_q`
    Derivative(u32),
    /// `||theta||_{W^3_q} + ||m||_{W^2_q}`
    Regularity,
    /// `||d_t theta||_{W^1_q} + ||d_t m||_{L_q}`
    Rate,
    /// `||d^j U||_{W^{1,0}_q}`, i.e. `||d^j theta||_{W^1_q} + ||d^j m||_{L_q}`
    Energy(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesDescriptor {
    pub component: Component,
    pub kind: NormKind,
    /// Lebesgue exponent; `f64::INFINITY` for the sup norm.
    pub q: f64,
    pub band: Band,
}

impl SeriesDescriptor {
    pub fn new(component: Component, kind: NormKind, q: f64, band: Band) -> Self {
        Self {
            component,
            kind,
            q,
            band,
        }
    }

    /// Stable file-name friendly label, e.g. `pair_d1_q2.5_full`.
    pub fn label(&self) -> String {
        let comp = match self.component {
            Component::Theta => "theta",
            Component::Momentum => "m",
            Component::Pair => "pair",
        };
        let kind = match self.kind {
            NormKind::Derivative(j) => format!("d{j}"),
            NormKind::Regularity => "w32".to_string(),
            NormKind::Rate => "rate".to_string(),
            NormKind::Energy(j) => format!("w10d{j}"),
        };
        let band = match self.band {
            Band::Full => "full",
            Band::Low => "low",
            Band::High => "high",
        };
        format!("{comp}_{kind}_q{}_{band}", format_exponent(self.q))
    }
}

impl fmt::Display for SeriesDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub fn format_exponent(q: f64) -> String {
    if q.is_infinite() {
        "inf".to_string()
    } else {
        format!("{q}")
    }
}

/// Time samples of one norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub descriptor: SeriesDescriptor,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl NormSeries {
    pub fn new(descriptor: SeriesDescriptor) -> Self {
        Self {
            descriptor,
            times: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_samples(
        descriptor: SeriesDescriptor,
        times: Vec<f64>,
        values: Vec<f64>,
    ) -> Result<Self, AnalysisError> {
        if times.len() != values.len() {
            return Err(AnalysisError::InvalidSample("times and values differ in length"));
        }
        let mut s = Self::new(descriptor);
        for (t, v) in times.into_iter().zip(values) {
            s.push(t, v)?;
        }
        Ok(s)
    }

    /// Appends a sample; times must increase strictly and values be non-negative.
    pub fn push(&mut self, t: f64, value: f64) -> Result<(), AnalysisError> {
        if !t.is_finite() || self.times.last().is_some_and(|&last| t <= last) {
            return Err(AnalysisError::InvalidSample("sample times must increase strictly"));
        }
        if !(value >= 0.0) {
            return Err(AnalysisError::InvalidSample("norm samples must be non-negative"));
        }
        self.times.push(t);
        self.values.push(value);
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn covers(series: &NormSeries, a: f64, t: f64) -> bool {
    let slack = 1e-12 * t.abs().max(1.0);
    match (series.times.first(), series.times.last()) {
        (Some(&first), Some(&last)) => first <= a + slack && last >= t - slack && a <= t,
        _ => false,
    }
}

/// `max_{a <= s <= t} (1 + s)^ell * value(s)` over the recorded samples.
pub fn weighted_sup(series: &NormSeries, ell: f64, a: f64, t: f64) -> Result<f64, AnalysisError> {
    if !covers(series, a, t) {
        return Err(AnalysisError::WindowUncovered {
            series: series.descriptor.label(),
            start: a,
            end: t,
        });
    }
    let slack = 1e-12 * t.abs().max(1.0);
    Ok(series
        .times
        .iter()
        .zip(&series.values)
        .filter(|(&s, _)| s >= a - slack && s <= t + slack)
        .map(|(&s, &v)| (1.0 + s).powf(ell) * v)
        .fold(0.0, f64::max))
}

/// `|| (1 + s)^ell value(s) ||_{L_p(0, t)}` with the composite trapezoid rule;
/// the integrand is linearly interpolated at `t` when `t` falls between samples.
pub fn weighted_time_norm(series: &NormSeries, ell: f64, p: f64, t: f64) -> Result<f64, AnalysisError> {
    if !covers(series, 0.0, t) {
        return Err(AnalysisError::WindowUncovered {
            series: series.descriptor.label(),
            start: 0.0,
            end: t,
        });
    }
    if p.is_infinite() {
        return weighted_sup(series, ell, 0.0, t);
    }
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for (&s, &v) in series.times.iter().zip(&series.values) {
        if s <= t {
            pts.push((s, v));
        } else {
            let (s0, v0) = *pts.last().expect("coverage checked");
            if s0 < t {
                let w = (t - s0) / (s - s0);
                pts.push((t, v0 + w * (v - v0)));
            }
            break;
        }
    }
    let f = |(s, v): (f64, f64)| ((1.0 + s).powf(ell) * v).powf(p);
    let integral: f64 = pts
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (f(w[0]) + f(w[1])))
        .sum();
    Ok(integral.powf(1.0 / p))
}

/// A set of series sampled on the same run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesBundle {
    pub series: Vec<NormSeries>,
}

impl SeriesBundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, series: NormSeries) {
        if let Some(slot) = self
            .series
            .iter_mut()
            .find(|s| s.descriptor == series.descriptor)
        {
            *slot = series;
        } else {
            self.series.push(series);
        }
    }

    pub fn get(&self, descriptor: &SeriesDescriptor) -> Option<&NormSeries> {
        self.series.iter().find(|s| &s.descriptor == descriptor)
    }

    pub fn get_mut(&mut self, descriptor: &SeriesDescriptor) -> Option<&mut NormSeries> {
        self.series.iter_mut().find(|s| &s.descriptor == descriptor)
    }

    /// Every `stride`-th sample of each series, always keeping the last one.
    pub fn thinned(&self, stride: usize) -> SeriesBundle {
        let stride = stride.max(1);
        let series = self
            .series
            .iter()
            .map(|s| {
                let last = s.len().saturating_sub(1);
                let keep: Vec<usize> = (0..s.len()).filter(|i| i % stride == 0 || *i == last).collect();
                NormSeries {
                    descriptor: s.descriptor,
                    times: keep.iter().map(|&i| s.times[i]).collect(),
                    values: keep.iter().map(|&i| s.values[i]).collect(),
                }
            })
            .collect();
        SeriesBundle { series }
    }
}

/// Exponents of the global weighted norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AggregateExponents {
    /// Time integrability exponent.
    pub p: f64,
    pub q1: f64,
    pub q2: f64,
    /// Weight loss in the time-integral terms.
    pub tau: f64,
}

impl AggregateExponents {
    /// Admissible choice for three dimensions.
    pub const DEFAULT_3D: AggregateExponents = AggregateExponents {
        p: 4.0,
        q1: 2.5,
        q2: 15.0,
        tau: 0.35,
    };

    /// Every series the aggregate reads.
    pub fn constituents(&self) -> Vec<SeriesDescriptor> {
        let mut out = Vec::new();
        for j in 0..=1 {
            for q in [f64::INFINITY, self.q1, self.q2] {
                out.push(SeriesDescriptor::new(
                    Component::Pair,
                    NormKind::Derivative(j),
                    q,
                    Band::Full,
                ));
            }
        }
        for q in [self.q1, self.q2] {
            out.push(SeriesDescriptor::new(Component::Pair, NormKind::Regularity, q, Band::Full));
            out.push(SeriesDescriptor::new(Component::Pair, NormKind::Rate, q, Band::Full));
        }
        out
    }
}

/// The global weighted norm at time `t`.
///
/// The sup terms depend on `j` only and the integral terms on `i` only, so
/// each distinct term is counted once.
pub fn aggregate_n(
    bundle: &SeriesBundle,
    dim: usize,
    exps: &AggregateExponents,
    t: f64,
) -> Result<f64, AnalysisError> {
    let wanted = exps.constituents();
    let missing: Vec<String> = wanted
        .iter()
        .filter(|d| bundle.get(d).is_none())
        .map(|d| d.label())
        .collect();
    if !missing.is_empty() {
        return Err(AnalysisError::MissingConstituent(missing));
    }
    let n = dim as f64;
    let series = |d: &SeriesDescriptor| bundle.get(d).expect("checked above");
    let mut total = 0.0;
    for j in 0..=1u32 {
        let half_j = j as f64 / 2.0;
        let weights = [
            (f64::INFINITY, n / exps.q1 + half_j),
            (exps.q1, n / (2.0 * exps.q1) + half_j),
            (exps.q2, n / (2.0 * exps.q2) + 1.0 + half_j),
        ];
        for (q, ell) in weights {
            let d = SeriesDescriptor::new(Component::Pair, NormKind::Derivative(j), q, Band::Full);
            total += weighted_sup(series(&d), ell, 0.0, t)?;
        }
    }
    let ells = [
        (exps.q1, n / (2.0 * exps.q1) - exps.tau),
        (exps.q2, n / (2.0 * exps.q2) + 1.0 - exps.tau),
    ];
    for (q, ell) in ells {
        for kind in [NormKind::Regularity, NormKind::Rate] {
            let d = SeriesDescriptor::new(Component::Pair, kind, q, Band::Full);
            total += weighted_time_norm(series(&d), ell, exps.p, t)?;
        }
    }
    Ok(total)
}
