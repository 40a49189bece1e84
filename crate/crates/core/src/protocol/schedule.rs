//! Message timetable of one reduction run on a site layout.

use serde::{Deserialize, Serialize};

use super::ProtocolParams;
use crate::error::{Error, Result};
use crate::spacetime::{earliest_commitment_time, Event, Layout, Message, Schedule, Site, SiteId};

/// Delays, in units of light-time per unit distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    /// Gap between `t_c` and the spin emission.
    pub spin_delay: f64,
    /// Local processing time added before each reply.
    pub processing: f64,
    pub heartbeat_interval: f64,
}

impl Default for Timing {
    fn default() -> Self {
        Self { spin_delay: 0.5, processing: 0.0, heartbeat_interval: 1.0 }
    }
}

/// Deliberate causal defect, for exercising the validator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectedFault {
    /// Tag of the message to corrupt.
    pub tag: String,
    /// Receive delay as a fraction of the light delay; below 1 is superluminal.
    pub speed_factor: f64,
}

/// Geometry, timing and optional fault for a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub layout: Layout,
    pub timing: Timing,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<InjectedFault>,
}

impl Scenario {
    /// Two site pairs on a line at unit spacing, default timing, no fault.
    pub fn default_line() -> Self {
        Self { layout: Layout::default_line(2, 1.0).expect("valid default layout"), timing: Timing::default(), fault: None }
    }
}

/// Message indices into [`Schedule::messages`] for each protocol step.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Steps {
    pub oracle_commit: Vec<usize>,
    pub oracle_confirm: Vec<usize>,
    pub spins: usize,
    pub challenge: usize,
    pub reveal_request: Vec<usize>,
    pub oracle_open: Vec<usize>,
    pub oracle_revealed: Vec<usize>,
    pub test_result: usize,
    pub declarations: usize,
    pub heartbeats: Vec<usize>,
    pub reveal: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedSchedule {
    pub schedule: Schedule,
    pub steps: Steps,
    /// Oracle sessions handled by each site pair, in pair order.
    pub sessions_by_pair: Vec<Vec<usize>>,
}

impl PlannedSchedule {
    pub fn message(&self, index: usize) -> &Message {
        &self.schedule.messages[index]
    }

    /// Events at which Bob's outlying sites confirm oracle commitments.
    pub fn confirmation_events(&self) -> Vec<Event> {
        self.steps.oracle_commit.iter().map(|&i| self.schedule.messages[i].receive).collect()
    }

    pub fn verdict_event(&self) -> Event {
        self.message(self.steps.reveal).receive
    }
}

struct Builder<'a> {
    layout: &'a Layout,
    processing: f64,
    messages: Vec<Message>,
}

impl Builder<'_> {
    fn site(&self, id: SiteId) -> &Site {
        self.layout.site(id).expect("builder only uses layout sites")
    }

    fn send(&mut self, from: SiteId, to: SiteId, at: f64, tag: String) -> usize {
        let emit = self.site(from).event_at(at);
        let receiver = self.site(to);
        let receive = receiver.event_at(receiver.arrival_time(&emit) + self.processing);
        self.messages.push(Message { from, to, emit, receive, tag });
        self.messages.len() - 1
    }

    fn receive_time(&self, i: usize) -> f64 {
        self.messages[i].receive.t
    }
}

/// Lays out every message of one run; oracle session `j` is handled by pair `j mod pairs`.
pub fn plan_schedule(params: &ProtocolParams, scenario: &Scenario) -> Result<PlannedSchedule> {
    let layout = &scenario.layout;
    let timing = scenario.timing;
    if !(timing.spin_delay > 0.0 && timing.processing >= 0.0 && timing.heartbeat_interval > 0.0) {
        return Err(Error::param("spacetime.timing", "spin_delay and heartbeat_interval must be positive, processing non-negative"));
    }
    let alice: Vec<SiteId> = layout.alice_sites().map(|s| s.id).collect();
    let bob: Vec<SiteId> = layout.bob_sites().map(|s| s.id).collect();
    let pairs = layout.pairs();
    if pairs == 0 {
        return Err(Error::param("spacetime.sites", "layout has no Alice/Bob site pair"));
    }
    let b0 = layout.observer().id;
    let a1 = alice[0];
    let sessions = 2 * params.n0;
    let sessions_by_pair: Vec<Vec<usize>> = (0..pairs).map(|p| (p..sessions).step_by(pairs).collect()).collect();

    let mut b = Builder { layout, processing: timing.processing, messages: Vec::new() };
    let mut steps = Steps::default();

    for p in 0..pairs {
        let name = format!("oracle-commit/{}", b.site(alice[p]).name);
        steps.oracle_commit.push(b.send(alice[p], bob[p], 0.0, name));
    }
    let confirmations: Vec<Event> = steps.oracle_commit.iter().map(|&i| b.messages[i].receive).collect();
    for (p, e) in confirmations.iter().enumerate() {
        let name = format!("oracle-confirm/{}", b.site(bob[p]).name);
        steps.oracle_confirm.push(b.send(bob[p], b0, e.t, name));
    }
    let t_c = earliest_commitment_time(layout.observer(), &confirmations);

    steps.spins = b.send(a1, b0, t_c + timing.spin_delay, "spins".into());
    steps.challenge = b.send(b0, a1, b.receive_time(steps.spins), "challenge".into());
    let challenge_at = b.receive_time(steps.challenge);

    for p in 0..pairs {
        let open_at = if alice[p] == a1 {
            challenge_at
        } else {
            let name = format!("reveal-request/{}", b.site(alice[p]).name);
            let r = b.send(a1, alice[p], challenge_at, name);
            steps.reveal_request.push(r);
            b.receive_time(r)
        };
        let name = format!("oracle-open/{}", b.site(alice[p]).name);
        let o = b.send(alice[p], bob[p], open_at, name);
        steps.oracle_open.push(o);
        let name = format!("oracle-revealed/{}", b.site(bob[p]).name);
        let at = b.receive_time(o);
        steps.oracle_revealed.push(b.send(bob[p], b0, at, name));
    }
    let t_r = steps.oracle_revealed.iter().map(|&i| b.receive_time(i)).fold(f64::NEG_INFINITY, f64::max);

    steps.test_result = b.send(b0, a1, t_r, "test-result".into());
    let declare_at = b.receive_time(steps.test_result);
    steps.declarations = b.send(a1, b0, declare_at, "declarations".into());
    let commitment_point = b.messages[steps.declarations].receive;
    for r in 0..params.suspension_rounds {
        let at = declare_at + f64::from(r + 1) * timing.heartbeat_interval;
        steps.heartbeats.push(b.send(a1, b0, at, format!("heartbeat/{}", r + 1)));
    }
    let reveal_at = declare_at + f64::from(params.suspension_rounds + 1) * timing.heartbeat_interval;
    steps.reveal = b.send(a1, b0, reveal_at, "reveal".into());

    let mut messages = b.messages;
    if let Some(fault) = &scenario.fault {
        let m = messages
            .iter_mut()
            .find(|m| m.tag == fault.tag)
            .ok_or_else(|| Error::param("spacetime.fault.tag", format!("no message tagged `{}`", fault.tag)))?;
        let receiver = layout.site(m.to).expect("layout site");
        let light = receiver.arrival_time(&m.emit) - m.emit.t;
        m.receive = receiver.event_at(m.emit.t + fault.speed_factor * light);
    }

    Ok(PlannedSchedule {
        schedule: Schedule { layout: layout.clone(), messages, commitment_point, t_c, t_r },
        steps,
        sessions_by_pair,
    })
}
