//! Events, sites and light cones in units where c = 1.
//!
//! Coordinates are taken in the rest frame of Bob's reference site `B0`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack on light-cone and worldline comparisons.
pub const CAUSAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub x: [f64; 3],
}

impl Event {
    pub fn new(t: f64, x: [f64; 3]) -> Result<Self> {
        if !t.is_finite() || x.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("event", "coordinates must be finite"));
        }
        Ok(Self { t, x })
    }

    /// Event on the x axis.
    pub const fn on_line(t: f64, x: f64) -> Self {
        Self { t, x: [x, 0.0, 0.0] }
    }

    pub fn spatial_distance(&self, other: &Event) -> f64 {
        norm(sub(self.x, other.x))
    }

    /// Boost into a frame moving with speed `beta` along `axis`.
    pub fn boosted(&self, beta: f64, axis: usize) -> Event {
        let gamma = 1.0 / (1.0 - beta * beta).sqrt();
        let mut x = self.x;
        let t = gamma * (self.t - beta * self.x[axis]);
        x[axis] = gamma * (self.x[axis] - beta * self.t);
        Event { t, x }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(t={}, x=[{}, {}, {}])", self.t, self.x[0], self.x[1], self.x[2])
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// True iff `q` lies in the closed past light cone of `p`.
///
/// The lightlike boundary counts as inside. The complement is the region
/// where actions at `q` are independent of everything that has reached `p`.
pub fn in_past_cone(q: &Event, p: &Event) -> bool {
    p.t - q.t >= q.spatial_distance(p) - CAUSAL_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SiteId(pub u16);

/// A laboratory moving on a straight timelike worldline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub id: SiteId,
    pub name: String,
    pub party: Party,
    /// Position at t = 0.
    pub origin: [f64; 3],
    pub velocity: [f64; 3],
}

impl Site {
    pub fn new(id: SiteId, name: impl Into<String>, party: Party, origin: [f64; 3], velocity: [f64; 3]) -> Result<Self> {
        if origin.iter().chain(&velocity).any(|c| !c.is_finite()) {
            return Err(Error::param("site", "coordinates must be finite"));
        }
        if norm(velocity) >= 1.0 {
            return Err(Error::param("site.velocity", format!("|v| = {} is not timelike", norm(velocity))));
        }
        Ok(Self { id, name: name.into(), party, origin, velocity })
    }

    pub fn at_rest(id: SiteId, name: impl Into<String>, party: Party, x: f64) -> Self {
        Self { id, name: name.into(), party, origin: [x, 0.0, 0.0], velocity: [0.0; 3] }
    }

    pub fn position_at(&self, t: f64) -> [f64; 3] {
        [
            self.origin[0] + self.velocity[0] * t,
            self.origin[1] + self.velocity[1] * t,
            self.origin[2] + self.velocity[2] * t,
        ]
    }

    pub fn event_at(&self, t: f64) -> Event {
        Event { t, x: self.position_at(t) }
    }

    /// Spatial distance between `e` and this site's position at `e.t`.
    pub fn worldline_deviation(&self, e: &Event) -> f64 {
        norm(sub(e.x, self.position_at(e.t)))
    }

    /// Earliest time at which this worldline is in the causal future of `emit`.
    pub fn arrival_time(&self, emit: &Event) -> f64 {
        // Solve τ = |d + vτ| for τ ≥ 0, d the site's offset from emit at emit.t.
        let d = sub(self.position_at(emit.t), emit.x);
        let v2 = dot(self.velocity, self.velocity);
        let dv = dot(d, self.velocity);
        let tau = (dv + (dv * dv + (1.0 - v2) * dot(d, d)).sqrt()) / (1.0 - v2);
        emit.t + tau
    }
}

/// Sites taking part in a run; `sites[0]` is Bob's reference site `B0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub sites: Vec<Site>,
}

impl Layout {
    /// `B0` at rest at the origin, then `pairs` Alice/Bob site pairs alternating
    /// outward on the x axis at unit `spacing`, mirrored left and right:
    /// `A1` at +1, `B1` at +2, `A2` at −1, `B2` at −2, `A3` at +3, …
    pub fn default_line(pairs: usize, spacing: f64) -> Result<Self> {
        if pairs == 0 {
            return Err(Error::param("spacetime.pairs", "at least one Alice/Bob site pair is required"));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::param("spacetime.spacing", "spacing must be positive"));
        }
        let mut sites = vec![Site::at_rest(SiteId(0), "B0", Party::Bob, 0.0)];
        for i in 0..pairs {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let level = (i / 2) as f64;
            let a = Site::at_rest(SiteId((2 * i + 1) as u16), format!("A{}", i + 1), Party::Alice, sign * (2.0 * level + 1.0) * spacing);
            let b = Site::at_rest(SiteId((2 * i + 2) as u16), format!("B{}", i + 1), Party::Bob, sign * (2.0 * level + 2.0) * spacing);
            sites.push(a);
            sites.push(b);
        }
        Ok(Self { sites })
    }

    /// Validates ids, velocities and the `B0` convention.
    pub fn new(sites: Vec<Site>) -> Result<Self> {
        if sites.first().map(|s| s.party) != Some(Party::Bob) {
            return Err(Error::param("spacetime.sites", "first site must be Bob's reference site"));
        }
        for (i, s) in sites.iter().enumerate() {
            if s.id != SiteId(i as u16) {
                return Err(Error::param("spacetime.sites", format!("site {} has id {} at position {i}", s.name, s.id.0)));
            }
            Site::new(s.id, s.name.clone(), s.party, s.origin, s.velocity)?;
        }
        let layout = Self { sites };
        if layout.pairs() == 0 {
            return Err(Error::param("spacetime.sites", "need at least one Alice site and one further Bob site"));
        }
        Ok(layout)
    }

    pub fn observer(&self) -> &Site {
        &self.sites[0]
    }

    pub fn site(&self, id: SiteId) -> Option<&Site> {
        self.sites.get(id.0 as usize)
    }

    pub fn alice_sites(&self) -> impl Iterator<Item = &Site> {
        self.sites.iter().filter(|s| s.party == Party::Alice)
    }

    /// Bob's sites other than `B0`.
    pub fn bob_sites(&self) -> impl Iterator<Item = &Site> {
        self.sites.iter().skip(1).filter(|s| s.party == Party::Bob)
    }

    /// Number of (Alice, Bob) site pairs that host oracle sessions.
    pub fn pairs(&self) -> usize {
        self.alice_sites().count().min(self.bob_sites().count())
    }
}

/// One transmission between two sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub from: SiteId,
    pub to: SiteId,
    pub emit: Event,
    pub receive: Event,
    pub tag: String,
}

/// Timed message exchange with its distinguished instants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub layout: Layout,
    pub messages: Vec<Message>,
    /// Event at which B0 considers Alice committed to the final bit.
    pub commitment_point: Event,
    /// Time after which the oracle commitments are known complete at B0.
    pub t_c: f64,
    /// Time by which the tested reveals have reached B0.
    pub t_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Endpoint {
    Emit,
    Receive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    /// Receive event outside the causal future of the emit event.
    Superluminal { message: usize, tag: String, shortfall: f64 },
    OffWorldline { message: usize, tag: String, endpoint: Endpoint, deviation: f64 },
    UnknownSite { message: usize, tag: String, site: SiteId },
    Ordering { t_c: f64, t_r: f64 },
    /// A transmission that must follow `t_c` was emitted at or before it.
    BeforeCommitment { message: usize, tag: String, emit_t: f64, t_c: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Superluminal { message, tag, shortfall } => {
                write!(f, "message #{message} ({tag}) arrives {shortfall:.6} before light could")
            }
            Violation::OffWorldline { message, tag, endpoint, deviation } => {
                write!(f, "message #{message} ({tag}) {endpoint:?} event is {deviation:e} off its site's worldline")
            }
            Violation::UnknownSite { message, tag, site } => write!(f, "message #{message} ({tag}) names unknown site {}", site.0),
            Violation::Ordering { t_c, t_r } => write!(f, "reveal deadline t_r = {t_r} is not after t_c = {t_c}"),
            Violation::BeforeCommitment { message, tag, emit_t, t_c } => {
                write!(f, "message #{message} ({tag}) emitted at t = {emit_t}, not after t_c = {t_c}")
            }
        }
    }
}

/// Every causal defect of `s`; empty means the schedule is valid.
pub fn validate_schedule(s: &Schedule) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, m) in s.messages.iter().enumerate() {
        let ends = [(m.from, &m.emit, Endpoint::Emit), (m.to, &m.receive, Endpoint::Receive)];
        for (id, e, endpoint) in ends {
            match s.layout.site(id) {
                None => out.push(Violation::UnknownSite { message: i, tag: m.tag.clone(), site: id }),
                Some(site) => {
                    let deviation = site.worldline_deviation(e);
                    if deviation > CAUSAL_TOL {
                        out.push(Violation::OffWorldline { message: i, tag: m.tag.clone(), endpoint, deviation });
                    }
                }
            }
        }
        if !in_past_cone(&m.emit, &m.receive) {
            let shortfall = m.emit.spatial_distance(&m.receive) - (m.receive.t - m.emit.t);
            out.push(Violation::Superluminal { message: i, tag: m.tag.clone(), shortfall });
        }
    }
    if s.t_r <= s.t_c {
        out.push(Violation::Ordering { t_c: s.t_c, t_r: s.t_r });
    }
    out
}

/// Smallest `t` such that every confirmation lies in the past cone of `observer` at `t`.
pub fn earliest_commitment_time(observer: &Site, confirmations: &[Event]) -> f64 {
    confirmations.iter().map(|e| observer.arrival_time(e)).fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin(t: f64) -> Event {
        Event::on_line(t, 0.0)
    }

    #[test]
    fn cone_examples() {
        assert!(in_past_cone(&origin(0.0), &origin(1.0)));
        assert!(!in_past_cone(&origin(0.0), &Event::on_line(1.0, 2.0)));
        assert!(in_past_cone(&origin(0.0), &Event::on_line(1.0, 1.0)));
        assert!(!in_past_cone(&origin(1.0), &origin(0.0)));
    }

    #[test]
    fn rejects_superluminal_site() {
        assert!(Site::new(SiteId(0), "X", Party::Bob, [0.0; 3], [0.6, 0.8, 0.0]).is_err());
        assert!(Event::new(f64::NAN, [0.0; 3]).is_err());
    }

    #[test]
    fn arrival_at_moving_site() {
        let s = Site::new(SiteId(0), "B0", Party::Bob, [2.0, 0.0, 0.0], [0.5, 0.0, 0.0]).unwrap();
        let t = s.arrival_time(&origin(0.0));
        // Chasing at 1 vs receding at 0.5 from 2: t = 2 + 0.5 t.
        assert!((t - 4.0).abs() < 1e-12);
        assert!(in_past_cone(&origin(0.0), &s.event_at(t)));
    }

    #[test]
    fn commitment_time_examples() {
        let b0 = Site::at_rest(SiteId(0), "B0", Party::Bob, 0.0);
        let local: Vec<Event> = [1.0, 5.0, 3.0].iter().map(|&t| origin(t)).collect();
        assert_eq!(earliest_commitment_time(&b0, &local), 5.0);
        let far = [Event::on_line(2.0, 3.0)];
        assert!(earliest_commitment_time(&b0, &far) >= 5.0);
        // Four sites at unit distance, all confirming at t = 1.
        let ring: Vec<Event> = [1.0, -1.0].iter().flat_map(|&x| [Event::on_line(1.0, x), Event::new(1.0, [0.0, x, 0.0]).unwrap()]).collect();
        assert_eq!(earliest_commitment_time(&b0, &ring), 2.0);
    }

    #[test]
    fn default_layout_positions() {
        let l = Layout::default_line(2, 1.0).unwrap();
        let xs: Vec<(String, f64)> = l.sites.iter().map(|s| (s.name.clone(), s.origin[0])).collect();
        assert_eq!(
            xs,
            vec![("B0".into(), 0.0), ("A1".into(), 1.0), ("B1".into(), 2.0), ("A2".into(), -1.0), ("B2".into(), -2.0)]
        );
        assert_eq!(l.pairs(), 2);
        assert!(Layout::default_line(0, 1.0).is_err());
    }

    #[test]
    fn validation_reports_each_defect() {
        let layout = Layout::default_line(1, 1.0).unwrap();
        let good = Message { from: SiteId(1), to: SiteId(0), emit: Event::on_line(0.0, 1.0), receive: origin(1.0), tag: "ok".into() };
        let fast = Message { receive: origin(0.5), tag: "fast".into(), ..good.clone() };
        let off = Message { emit: Event::on_line(0.0, 1.5), receive: origin(3.0), tag: "off".into(), ..good.clone() };
        let mut s = Schedule { layout, messages: vec![good], commitment_point: origin(1.0), t_c: 1.0, t_r: 2.0 };
        assert!(validate_schedule(&s).is_empty());

        s.messages.push(fast);
        let v = validate_schedule(&s);
        assert_eq!(v.len(), 1);
        assert!(matches!(&v[0], Violation::Superluminal { message: 1, tag, .. } if tag == "fast"));

        s.messages.pop();
        s.messages.push(off);
        assert!(matches!(&validate_schedule(&s)[..], [Violation::OffWorldline { endpoint: Endpoint::Emit, .. }]));

        s.messages.pop();
        s.t_r = s.t_c;
        assert!(matches!(&validate_schedule(&s)[..], [Violation::Ordering { .. }]));
    }
}
