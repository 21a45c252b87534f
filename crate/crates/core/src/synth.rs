//! Synthetic EventStream courses with grade labels.
//!
//! Each student follows one behavioural archetype. Every reading session is
//! in one mode (close reading, browsing, ...) that fixes its operation mix
//! and pacing; the archetype sets how often each mode occurs, the number and
//! length of sessions, and the grade distribution. Gaps are drawn from a
//! mixture with one log-normal component inside each interval regime (short,
//! medium, long) plus sub-second bursts, so the tokenizer sees every symbol,
//! capped units and action splits.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng as _;
use rand_distr::{Distribution, LogNormal};

use crate::classify::Grade;
use crate::event::{Event, Timestamp};
use crate::rng;
use crate::tokenizer::Primitive;
use crate::{Error, Result};

/// 2022-04-06 00:00:00.
pub const DEFAULT_START: Timestamp = Timestamp(1_649_203_200);

/// Names used for operations outside the named set.
pub const OTHER_OPERATIONS: [&str; 4] = ["BOOKMARK", "MEMO", "SEARCH", "DELETE MARKER"];

/// Behaviour inside one session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionMode {
    /// Relative frequency among the archetype's sessions.
    pub weight: f64,
    /// Weights over `Primitive::OPERATIONS`.
    pub operations: [f64; 8],
    /// Probabilities of a sub-second, short, medium and long gap.
    pub gaps: [f64; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Archetype {
    pub name: String,
    /// Relative share of the student population.
    pub share: f64,
    pub modes: Vec<SessionMode>,
    /// Reading sessions per material, inclusive range.
    pub sessions: (u32, u32),
    /// Median operations per session (log-normal, spread 0.4).
    pub session_ops: f64,
    /// Probabilities over grades A, B, C, D, F.
    pub grades: [f64; 5],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub archetypes: Vec<Archetype>,
    /// One material per week.
    pub materials: u32,
    pub start: Timestamp,
    pub user_prefix: String,
}

/// Generated course: events in per-student time order and final grades.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthCourse {
    pub events: Vec<Event>,
    pub grades: Vec<(String, Grade)>,
    /// Archetype index of each student, aligned with `grades`.
    pub archetypes: Vec<usize>,
}

fn check_distribution(name: &str, what: &str, w: &[f64]) -> Result<()> {
    let sum: f64 = w.iter().sum();
    if w.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("archetype {name}: {what} must be a probability distribution")));
    }
    Ok(())
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.archetypes.len() < 2 {
            return Err(Error::Config("need at least two archetypes".into()));
        }
        if self.materials == 0 {
            return Err(Error::Config("need at least one material".into()));
        }
        for a in &self.archetypes {
            check_distribution(&a.name, "grades", &a.grades)?;
            if a.modes.is_empty() || a.modes.iter().any(|m| !(m.weight > 0.0)) {
                return Err(Error::Config(format!("archetype {}: needs session modes with positive weight", a.name)));
            }
            for m in &a.modes {
                check_distribution(&a.name, "gaps", &m.gaps)?;
                if m.operations.iter().any(|&x| !(x >= 0.0)) || m.operations.iter().sum::<f64>() <= 0.0 {
                    return Err(Error::Config(format!("archetype {}: operation weights are degenerate", a.name)));
                }
            }
            let covers = |i: usize| a.modes.iter().any(|m| m.gaps[i] > 0.0);
            if !(covers(1) && covers(2) && covers(3)) {
                return Err(Error::Config(format!("archetype {}: gap mixture must cover s, m and l", a.name)));
            }
            if a.sessions.1 == 0 || a.sessions.0 > a.sessions.1 {
                return Err(Error::Config(format!("archetype {}: zero sessions", a.name)));
            }
            if !(a.session_ops >= 1.0) {
                return Err(Error::Config(format!("archetype {}: sessions need operations", a.name)));
            }
            if !(a.share > 0.0) {
                return Err(Error::Config(format!("archetype {}: share must be positive", a.name)));
            }
        }
        let first = &self.archetypes[0].grades;
        if self.archetypes.iter().all(|a| &a.grades == first) {
            return Err(Error::Config("archetypes need differing grade distributions".into()));
        }
        Ok(())
    }

    /// Desk-scale course: two archetypes, about 250 events per student.
    pub fn small() -> Self {
        SynthConfig {
            archetypes: alloc::vec![Archetype::diligent_reader(), Archetype::skimmer()],
            materials: 8,
            start: DEFAULT_START,
            user_prefix: "s".into(),
        }
    }

    /// Course-scale preset: several thousand events per student.
    pub fn full() -> Self {
        let mut cfg = SynthConfig::small();
        for a in &mut cfg.archetypes {
            a.sessions = (a.sessions.0 + 2, a.sessions.1 + 3);
            a.session_ops *= 3.0;
        }
        cfg
    }
}

impl SessionMode {
    /// Slow page turning with markers and memos.
    pub fn close_reading(weight: f64) -> Self {
        SessionMode {
            weight,
            operations: [0.52, 0.10, 0.01, 0.18, 0.01, 0.02, 0.09, 0.07],
            gaps: [0.03, 0.12, 0.79, 0.06],
        }
    }

    /// Rapid flipping and jumping through the material.
    pub fn browsing(weight: f64) -> Self {
        SessionMode {
            weight,
            operations: [0.62, 0.20, 0.01, 0.01, 0.01, 0.12, 0.01, 0.02],
            gaps: [0.30, 0.60, 0.07, 0.03],
        }
    }
}

impl Archetype {
    /// Mostly close reading; mostly passing grades.
    pub fn diligent_reader() -> Self {
        Archetype {
            name: "diligent_reader".into(),
            share: 0.5,
            modes: alloc::vec![SessionMode::close_reading(0.8), SessionMode::browsing(0.2)],
            sessions: (1, 2),
            session_ops: 16.0,
            grades: [0.55, 0.33, 0.06, 0.04, 0.02],
        }
    }

    /// Mostly browsing; mostly at-risk grades.
    pub fn skimmer() -> Self {
        Archetype {
            name: "skimmer".into(),
            share: 0.5,
            modes: alloc::vec![SessionMode::close_reading(0.2), SessionMode::browsing(0.8)],
            sessions: (1, 2),
            session_ops: 16.0,
            grades: [0.03, 0.07, 0.25, 0.25, 0.40],
        }
    }
}

fn pick(weights: &[f64], r: &mut rng::Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = r.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if x < w {
            return i;
        }
        x -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

fn lognormal(median: f64, sigma: f64) -> LogNormal<f64> {
    LogNormal::new(libm::log(median), sigma).expect("valid log-normal parameters")
}

struct GapSampler {
    short: LogNormal<f64>,
    medium: LogNormal<f64>,
    long: LogNormal<f64>,
}

impl GapSampler {
    fn new() -> Self {
        GapSampler {
            short: lognormal(4.0, 0.5),
            medium: lognormal(70.0, 0.6),
            long: lognormal(900.0, 0.5),
        }
    }

    /// Gap in whole seconds, clamped into the drawn regime.
    fn sample(&self, mix: &[f64; 4], r: &mut rng::Rng) -> i64 {
        let secs = match pick(mix, r) {
            0 => 0.0,
            1 => self.short.sample(r).clamp(1.0, 10.0),
            2 => self.medium.sample(r).clamp(11.0, 300.0),
            _ => self.long.sample(r).clamp(301.0, 7200.0),
        };
        secs as i64
    }
}

fn operation_name(sym: Primitive, r: &mut rng::Rng) -> String {
    match sym.operation_name() {
        Some(n) => n.into(),
        None => OTHER_OPERATIONS[r.random_range(0..OTHER_OPERATIONS.len())].into(),
    }
}

const PAGES: u32 = 40;

/// Page shown after `operation`. Jumps are a fixed function of the current
/// page so that page numbers draw nothing from the random stream.
fn next_page(operation: &str, page: u32) -> u32 {
    match operation {
        "NEXT" => (page + 1).min(PAGES),
        "PREV" => page.saturating_sub(1).max(1),
        "PAGE JUMP" => (page * 7 + 3) % PAGES + 1,
        "OPEN" => 1,
        _ => page,
    }
}

/// Generates `n_students` students. Output is a pure function of the
/// config, the count and the seed.
pub fn generate(config: &SynthConfig, n_students: usize, seed: u64) -> Result<SynthCourse> {
    config.validate()?;
    if n_students == 0 {
        return Err(Error::Config("need at least one student".into()));
    }
    let shares: Vec<f64> = config.archetypes.iter().map(|a| a.share).collect();
    let gaps = GapSampler::new();
    let between_sessions = lognormal(6.0 * 3600.0, 0.8);
    const WEEK: i64 = 7 * 24 * 3600;

    let mut course = SynthCourse {
        events: Vec::new(),
        grades: Vec::new(),
        archetypes: Vec::new(),
    };
    for s in 0..n_students {
        let mut r = rng::stream(seed, s as u64);
        let kind = pick(&shares, &mut r);
        let arch = &config.archetypes[kind];
        let user = format!("{}{s:03}", config.user_prefix);
        let grade = Grade::ALL[pick(&arch.grades, &mut r)];
        let ops_per_session = lognormal(arch.session_ops, 0.4);
        let mode_weights: Vec<f64> = arch.modes.iter().map(|m| m.weight).collect();

        let mut clock = config.start.0;
        for m in 0..config.materials {
            let content = format!("c{:02}", m + 1);
            clock = clock.max(config.start.0 + i64::from(m) * WEEK);
            let sessions = r.random_range(arch.sessions.0..=arch.sessions.1);
            for _ in 0..sessions {
                clock += between_sessions.sample(&mut r).clamp(1800.0, 3.0 * 86400.0) as i64;
                let mode = &arch.modes[pick(&mode_weights, &mut r)];
                let n_ops = (ops_per_session.sample(&mut r) as usize).max(1);
                let mut page = 1u32;
                let mut push = |name: String, t: i64| {
                    page = next_page(&name, page);
                    let mut e = Event::new(&user, &content, &name, Timestamp(t));
                    e.page_no = page;
                    e.device_code = "pc".into();
                    match name.as_str() {
                        "ADD MARKER" => e.marker = Some("marked text".into()),
                        "MEMO" => e.memo_length = 12,
                        _ => {}
                    }
                    course.events.push(e);
                };
                push("OPEN".into(), clock);
                for _ in 0..n_ops {
                    clock += gaps.sample(&mode.gaps, &mut r);
                    let sym = Primitive::OPERATIONS[pick(&mode.operations, &mut r)];
                    push(operation_name(sym, &mut r), clock);
                }
                if r.random::<f64>() < 0.6 {
                    clock += gaps.sample(&mode.gaps, &mut r);
                    push("CLOSE".into(), clock);
                }
            }
        }
        course.grades.push((user, grade));
        course.archetypes.push(kind);
    }
    Ok(course)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = generate(&SynthConfig::small(), 6, 42).unwrap();
        let b = generate(&SynthConfig::small(), 6, 42).unwrap();
        assert_eq!(a, b);
        let c = generate(&SynthConfig::small(), 6, 43).unwrap();
        assert_ne!(a.events, c.events);
    }

    #[test]
    fn timestamps_non_decreasing_per_student() {
        let c = generate(&SynthConfig::small(), 10, 1).unwrap();
        for w in c.events.windows(2) {
            if w[0].user_id == w[1].user_id {
                assert!(w[0].event_time <= w[1].event_time);
            }
        }
    }

    #[test]
    fn rejects_degenerate_configs() {
        let mut cfg = SynthConfig::small();
        cfg.archetypes[0].sessions = (0, 0);
        assert!(generate(&cfg, 5, 1).is_err());

        let mut cfg = SynthConfig::small();
        cfg.archetypes[1].grades = cfg.archetypes[0].grades;
        assert!(cfg.validate().is_err());

        let mut cfg = SynthConfig::small();
        cfg.archetypes.pop();
        assert!(cfg.validate().is_err());

        assert!(generate(&SynthConfig::small(), 0, 1).is_err());
    }

    #[test]
    fn diligent_readers_mark_more() {
        let c = generate(&SynthConfig::small(), 60, 42).unwrap();
        let mut markers = [0usize; 2];
        let mut totals = [0usize; 2];
        let kind_of: alloc::collections::BTreeMap<&str, usize> = c
            .grades
            .iter()
            .zip(&c.archetypes)
            .map(|((u, _), &k)| (u.as_str(), k))
            .collect();
        for e in &c.events {
            let k = kind_of[e.user_id.as_str()];
            totals[k] += 1;
            if e.operation_name == "ADD MARKER" {
                markers[k] += 1;
            }
        }
        let rate = |k: usize| markers[k] as f64 / totals[k] as f64;
        assert!(rate(0) > 3.0 * rate(1));
    }
}
