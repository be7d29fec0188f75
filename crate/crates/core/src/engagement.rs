//! Planar salvo against a stationary target at the origin.
//!
//! Two interceptor models are supported. The constant-speed model integrates
//! the polar kinematics `(r, θ, γ)` directly. The realistic model is a point
//! mass in the vertical plane with thrust, zero-lift and induced drag and
//! gravity, integrated in Cartesian coordinates; `y` doubles as altitude.
//!
//! Each step every missile's command is computed from the current states and
//! held for the whole RK4 step.

use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::guidance::{
    accel_command, collision_margin, los_rate, EdgeMargin, GuidanceConfig, LosHistory,
    PolarEngagementState,
};
use crate::synth::{synthesize, SynthesisRequest};

/// Spread of the LOS rates below which the salvo counts as in consensus.
pub const CONSENSUS_RATE_BAND: f64 = 1e-5;

/// Post-consensus statistics start this long after the rates first agree.
/// The band is entered a few milliseconds before the last merge completes,
/// while the final pair still pulls a full `r·w` command.
pub const CONSENSUS_SETTLE: f64 = 0.05;

pub const DEFAULT_DT: f64 = 1e-3;

pub const STANDARD_GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    ConstantSpeed,
    Realistic,
}

/// Boost, sustain and coast schedule; propellant burns at a constant rate
/// within each powered phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Propulsion {
    pub initial_mass: f64,
    pub boost_end: f64,
    pub boost_thrust: f64,
    pub boost_propellant: f64,
    pub sustain_end: f64,
    pub sustain_thrust: f64,
    pub sustain_propellant: f64,
}

impl Default for Propulsion {
    fn default() -> Self {
        Self {
            initial_mass: 227.0,
            boost_end: 1.5,
            boost_thrust: 52_000.0,
            boost_propellant: 30.0,
            sustain_end: 8.0,
            sustain_thrust: 13_000.0,
            sustain_propellant: 35.0,
        }
    }
}

impl Propulsion {
    pub fn thrust(&self, t: f64) -> f64 {
        if t < self.boost_end {
            self.boost_thrust
        } else if t < self.sustain_end {
            self.sustain_thrust
        } else {
            0.0
        }
    }

    pub fn mass(&self, t: f64) -> f64 {
        let boost = self.boost_propellant * (t / self.boost_end).clamp(0.0, 1.0);
        let sustain_len = self.sustain_end - self.boost_end;
        let sustain = if sustain_len > 0.0 {
            self.sustain_propellant * ((t - self.boost_end) / sustain_len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        self.initial_mass - boost - sustain
    }

    fn validate(&self) -> Result<()> {
        if !(self.initial_mass > self.boost_propellant + self.sustain_propellant) {
            return Err(usage("propellant must weigh less than the missile"));
        }
        if self.boost_propellant < 0.0 || self.sustain_propellant < 0.0 {
            return Err(usage("propellant masses must be non-negative"));
        }
        if self.boost_thrust < 0.0 || self.sustain_thrust < 0.0 {
            return Err(usage("thrust must be non-negative"));
        }
        if !(0.0 < self.boost_end && self.boost_end <= self.sustain_end) {
            return Err(usage("need 0 < boost_end <= sustain_end"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DragParams {
    pub c_d0: f64,
    pub aspect_ratio: f64,
    pub efficiency: f64,
    /// Reference area in m².
    pub ref_area: f64,
}

impl Default for DragParams {
    fn default() -> Self {
        Self {
            c_d0: 0.3,
            aspect_ratio: 3.0,
            efficiency: 0.8,
            ref_area: 0.0324,
        }
    }
}

impl DragParams {
    /// Induced drag factor `K = 1/(π·A_r·e)`.
    pub fn induced_factor(&self) -> f64 {
        1.0 / (std::f64::consts::PI * self.aspect_ratio * self.efficiency)
    }

    fn validate(&self) -> Result<()> {
        if !(self.ref_area > 0.0) {
            return Err(usage("ref_area must be positive"));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(usage("efficiency must lie in (0, 1]"));
        }
        if !(self.aspect_ratio > 0.0) || self.c_d0 < 0.0 {
            return Err(usage("aspect_ratio must be positive and c_d0 non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MissileModel {
    pub kind: ModelKind,
    pub propulsion: Propulsion,
    pub drag: DragParams,
    pub gravity: f64,
    /// Commands are zero before this time.
    pub guidance_start: f64,
    /// Add `g·cos γ` to every command, before and after guidance closes, so
    /// the flight path only turns when commanded.
    pub gravity_compensation: bool,
    /// A realistic missile slower than this is aborted.
    pub speed_floor: f64,
}

impl MissileModel {
    pub fn constant_speed() -> Self {
        Self {
            kind: ModelKind::ConstantSpeed,
            propulsion: Propulsion::default(),
            drag: DragParams::default(),
            gravity: 0.0,
            guidance_start: 0.0,
            gravity_compensation: false,
            speed_floor: 0.0,
        }
    }

    /// Boost/sustain/coast interceptor; guidance closes at boost end.
    pub fn realistic() -> Self {
        let propulsion = Propulsion::default();
        Self {
            kind: ModelKind::Realistic,
            propulsion,
            drag: DragParams::default(),
            gravity: STANDARD_GRAVITY,
            guidance_start: propulsion.boost_end,
            gravity_compensation: true,
            speed_floor: 10.0,
        }
    }

    /// Lateral acceleration pulled for a guidance command at flight-path angle `gamma`.
    pub fn applied_accel(&self, command: f64, gamma: f64) -> f64 {
        if self.gravity_compensation {
            command + self.gravity * gamma.cos()
        } else {
            command
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == ModelKind::Realistic {
            self.propulsion.validate()?;
            self.drag.validate()?;
        }
        if !(self.guidance_start >= 0.0) || self.gravity < 0.0 {
            return Err(usage("guidance_start and gravity must be non-negative"));
        }
        Ok(())
    }
}

/// International Standard Atmosphere density in kg/m³; altitude in m,
/// clamped at sea level.
pub fn air_density(altitude: f64) -> f64 {
    let h = altitude.max(0.0);
    if h <= 11_000.0 {
        1.225 * (1.0 - 2.255_77e-5 * h).powf(4.255_9)
    } else {
        0.363_92 * (-(h - 11_000.0) / 6_341.6).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DragForce {
    pub total: f64,
    pub zero_lift: f64,
    pub induced: f64,
}

pub fn drag_force(v: f64, a_m: f64, altitude: f64, mass: f64, drag: &DragParams) -> DragForce {
    let q = 0.5 * air_density(altitude) * v * v;
    let qs = q * drag.ref_area;
    let zero_lift = drag.c_d0 * qs;
    let induced = if qs > 0.0 {
        drag.induced_factor() * mass * mass * a_m * a_m / qs
    } else {
        0.0
    };
    DragForce {
        total: zero_lift + induced,
        zero_lift,
        induced,
    }
}

/// Position, speed and flight-path angle of a realistic missile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianState {
    pub x: f64,
    pub y: f64,
    pub v: f64,
    pub gamma: f64,
}

impl CartesianState {
    pub fn from_polar(p: &PolarEngagementState) -> Self {
        let (x, y) = p.position();
        Self {
            x,
            y,
            v: p.v,
            gamma: p.gamma,
        }
    }

    pub fn to_polar(&self) -> PolarEngagementState {
        PolarEngagementState::from_position(self.x, self.y, self.gamma, self.v)
    }
}

fn polar_rate(s: &PolarEngagementState, a_m: f64) -> [f64; 3] {
    let hm = s.gamma - s.theta;
    [-s.v * hm.cos(), -s.v * hm.sin() / s.r, a_m / s.v]
}

/// One RK4 step of the constant-speed polar kinematics.
pub fn step_constant_speed(
    state: &PolarEngagementState,
    a_m: f64,
    dt: f64,
) -> Result<PolarEngagementState> {
    if !(dt > 0.0) || !(state.r > 0.0) {
        return Err(usage("step needs dt > 0 and r > 0"));
    }
    let at = |base: &PolarEngagementState, k: &[f64; 3], h: f64| PolarEngagementState {
        r: base.r + h * k[0],
        theta: base.theta + h * k[1],
        gamma: base.gamma + h * k[2],
        v: base.v,
    };
    let k1 = polar_rate(state, a_m);
    let k2 = polar_rate(&at(state, &k1, 0.5 * dt), a_m);
    let k3 = polar_rate(&at(state, &k2, 0.5 * dt), a_m);
    let k4 = polar_rate(&at(state, &k3, dt), a_m);
    let mut sum = [0.0; 3];
    for c in 0..3 {
        sum[c] = (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]) / 6.0;
    }
    Ok(at(state, &sum, dt))
}

fn cartesian_rate(s: &CartesianState, a_m: f64, t: f64, model: &MissileModel) -> [f64; 4] {
    let mass = model.propulsion.mass(t);
    let drag = drag_force(s.v, a_m, s.y, mass, &model.drag).total;
    let (sin_g, cos_g) = s.gamma.sin_cos();
    [
        s.v * cos_g,
        s.v * sin_g,
        (model.propulsion.thrust(t) - drag) / mass - model.gravity * sin_g,
        (a_m - model.gravity * cos_g) / s.v,
    ]
}

/// One RK4 step of the point-mass equations with thrust, drag and gravity.
/// `a_m` is the lateral acceleration actually pulled.
pub fn step_realistic(
    cart: &CartesianState,
    a_m: f64,
    t: f64,
    dt: f64,
    model: &MissileModel,
) -> Result<CartesianState> {
    if !(dt > 0.0) {
        return Err(usage("step needs dt > 0"));
    }
    let at = |k: &[f64; 4], h: f64| CartesianState {
        x: cart.x + h * k[0],
        y: cart.y + h * k[1],
        v: cart.v + h * k[2],
        gamma: cart.gamma + h * k[3],
    };
    let k1 = cartesian_rate(cart, a_m, t, model);
    let k2 = cartesian_rate(&at(&k1, 0.5 * dt), a_m, t + 0.5 * dt, model);
    let k3 = cartesian_rate(&at(&k2, 0.5 * dt), a_m, t + 0.5 * dt, model);
    let k4 = cartesian_rate(&at(&k3, dt), a_m, t + dt, model);
    let mut sum = [0.0; 4];
    for c in 0..4 {
        sum[c] = (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]) / 6.0;
    }
    Ok(at(&sum, dt))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngagementScenario {
    pub missiles: Vec<PolarEngagementState>,
    pub model: MissileModel,
    pub guidance: GuidanceConfig,
    pub dt: f64,
    /// Hard stop for the run.
    pub t_max: f64,
    /// Keep every `record_every`-th step in the histories.
    pub record_every: usize,
}

impl EngagementScenario {
    /// Defaults around a set of initial states and gains. The boundary layer
    /// is set from the gains and step so the held command does not chatter
    /// once the rates agree.
    pub fn new(missiles: Vec<PolarEngagementState>, model: MissileModel, gains: Vec<f64>) -> Self {
        let mut guidance = GuidanceConfig::new(gains);
        guidance.boundary_time = default_boundary_time(DEFAULT_DT);
        Self {
            missiles,
            model,
            guidance,
            dt: DEFAULT_DT,
            t_max: 120.0,
            record_every: 10,
        }
    }

    /// Change the step and rescale the default boundary layer with it.
    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self.guidance.boundary_time = default_boundary_time(dt);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_flight()?;
        self.guidance.validate(self.missiles.len())
    }

    /// Everything except the guidance gains.
    fn validate_flight(&self) -> Result<()> {
        if self.missiles.len() < 2 {
            return Err(usage("an engagement needs at least two missiles"));
        }
        self.model.validate()?;
        if !(self.dt > 0.0 && self.t_max > self.dt) {
            return Err(usage("need dt > 0 and t_max > dt"));
        }
        for (i, m) in self.missiles.iter().enumerate() {
            if !(m.r > 0.0 && m.v > 0.0) || !m.theta.is_finite() || !m.gamma.is_finite() {
                return Err(usage(format!(
                    "missile {i}: need r > 0, v > 0, finite angles"
                )));
            }
        }
        Ok(())
    }
}

/// Two steps. Inside the layer the held command then removes about half of
/// each `σ` per step, which settles the cycle without overshoot.
pub fn default_boundary_time(dt: f64) -> f64 {
    2.0 * dt
}

/// One recorded sample of a missile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub theta_dot: f64,
    pub gamma: f64,
    pub v: f64,
    pub a_m: f64,
    pub sigma: f64,
    pub drag: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissileOutcome {
    pub intercepted: bool,
    /// Closest approach to the target.
    pub miss_distance: f64,
    pub intercept_time: Option<f64>,
    pub peak_accel: f64,
    pub aborted: Option<String>,
    pub final_state: PolarEngagementState,
}

/// Worst values seen from [`CONSENSUS_SETTLE`] after the LOS rates first agree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PostConsensus {
    pub max_abs_rate: f64,
    pub max_rate_spread: f64,
    pub max_abs_accel: f64,
    /// Largest `|γ − θ|` (impact angle against LOS angle).
    pub max_heading_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngagementResult {
    pub dt: f64,
    pub steps: usize,
    pub missiles: Vec<MissileOutcome>,
    pub consensus_time: Option<f64>,
    pub consensus_value: Option<f64>,
    pub post_consensus: Option<PostConsensus>,
    pub min_pairwise_separation: f64,
    pub margins: Vec<EdgeMargin>,
    /// Per missile, on one grid shared by all missiles.
    pub histories: Vec<Vec<Sample>>,
}

impl EngagementResult {
    pub fn all_intercepted(&self) -> bool {
        self.missiles.iter().all(|m| m.intercepted)
    }

    pub fn any_aborted(&self) -> bool {
        self.missiles.iter().any(|m| m.aborted.is_some())
    }

    pub fn peak_accel(&self) -> f64 {
        self.missiles.iter().fold(0.0, |m, o| m.max(o.peak_accel))
    }
}

enum Body {
    Polar(PolarEngagementState),
    Cart(CartesianState),
}

impl Body {
    fn polar(&self) -> PolarEngagementState {
        match self {
            Body::Polar(p) => *p,
            Body::Cart(c) => c.to_polar(),
        }
    }
}

struct Track {
    body: Body,
    active: bool,
    prev_r: [f64; 2],
    outcome: MissileOutcome,
}

fn wrap_pi(a: f64) -> f64 {
    let w = a.rem_euclid(std::f64::consts::TAU);
    if w > std::f64::consts::PI {
        w - std::f64::consts::TAU
    } else {
        w
    }
}

/// Straight-line closest approach from the current state.
fn projected_miss(p: &PolarEngagementState) -> f64 {
    let hm = p.heading_error();
    if hm.cos() > 0.0 {
        p.r * hm.sin().abs()
    } else {
        p.r
    }
}

/// Minimum of the parabola through three equally spaced samples.
fn parabolic_min(r0: f64, r1: f64, r2: f64) -> f64 {
    let curv = r0 - 2.0 * r1 + r2;
    if curv <= 0.0 {
        return r1.min(r2);
    }
    let s = 0.5 * (r0 - r2) / curv;
    (r1 - 0.25 * (r0 - r2) * s).clamp(0.0, r1)
}

/// Propagate all missiles with zero commands up to `t_end` and return their
/// polar states; used to read the LOS rates at which guidance takes over.
pub fn propagate_unguided(
    scenario: &EngagementScenario,
    t_end: f64,
) -> Result<Vec<PolarEngagementState>> {
    scenario.validate_flight()?;
    let steps = (t_end / scenario.dt).round() as usize;
    let mut out = Vec::with_capacity(scenario.missiles.len());
    for m in &scenario.missiles {
        let mut p = *m;
        let mut c = CartesianState::from_polar(m);
        for k in 0..steps {
            match scenario.model.kind {
                ModelKind::ConstantSpeed => p = step_constant_speed(&p, 0.0, scenario.dt)?,
                ModelKind::Realistic => {
                    let a = scenario.model.applied_accel(0.0, c.gamma);
                    c = step_realistic(&c, a, k as f64 * scenario.dt, scenario.dt, &scenario.model)?
                }
            }
        }
        out.push(match scenario.model.kind {
            ModelKind::ConstantSpeed => p,
            ModelKind::Realistic => c.to_polar(),
        });
    }
    Ok(out)
}

/// Gains that bring the LOS rates to `x_f` a time `t_f` after guidance
/// closes. The design uses the rates at guidance start and treats the
/// missiles as constant-speed, whatever the model.
pub fn design_gains(
    scenario: &EngagementScenario,
    x_f: f64,
    t_f: f64,
    margin: f64,
) -> Result<Vec<f64>> {
    let states = propagate_unguided(scenario, scenario.model.guidance_start)?;
    let rates = states.iter().map(los_rate).collect::<Result<Vec<_>>>()?;
    synthesize(&SynthesisRequest::new(rates, x_f, t_f).with_margin(margin))
}

/// Fly the salvo until every missile has intercepted, passed the target,
/// aborted, or `t_max` is reached.
pub fn run_engagement(scenario: &EngagementScenario) -> Result<EngagementResult> {
    scenario.validate()?;
    let n = scenario.missiles.len();
    let model = &scenario.model;
    let cfg = &scenario.guidance;
    let dt = scenario.dt;
    let max_steps = (scenario.t_max / dt).ceil() as usize;

    let mut tracks: Vec<Track> = scenario
        .missiles
        .iter()
        .map(|m| Track {
            body: match model.kind {
                ModelKind::ConstantSpeed => Body::Polar(*m),
                ModelKind::Realistic => Body::Cart(CartesianState::from_polar(m)),
            },
            active: true,
            prev_r: [m.r, m.r],
            outcome: MissileOutcome {
                intercepted: false,
                miss_distance: m.r,
                intercept_time: None,
                peak_accel: 0.0,
                aborted: None,
                final_state: *m,
            },
        })
        .collect();

    let mut histories: Vec<Vec<Sample>> = vec![Vec::new(); n];
    let mut los: Vec<LosHistory> = vec![LosHistory::default(); n];
    let mut consensus_time = None;
    let mut consensus_value = None;
    let mut post: Option<PostConsensus> = None;
    let mut min_sep = f64::INFINITY;
    let mut rates = vec![0.0; n];
    let mut commands = vec![0.0; n];
    let mut steps = 0;

    for step in 0..=max_steps {
        let t = step as f64 * dt;
        let polar: Vec<PolarEngagementState> = tracks.iter().map(|k| k.body.polar()).collect();
        for i in 0..n {
            if tracks[i].active {
                rates[i] = los_rate(&polar[i])?;
            }
        }
        let guided = t >= model.guidance_start - 1e-12;
        for i in 0..n {
            commands[i] = if tracks[i].active && guided {
                accel_command(&polar[i], rates[(i + 1) % n], cfg.gains[i], cfg)?
            } else {
                0.0
            };
            let o = &mut tracks[i].outcome;
            o.peak_accel = o.peak_accel.max(commands[i].abs());
        }

        let hi = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = rates.iter().copied().fold(f64::INFINITY, f64::min);
        if guided && consensus_time.is_none() && hi - lo < CONSENSUS_RATE_BAND {
            consensus_time = Some(t);
            consensus_value = Some(rates.iter().sum::<f64>() / n as f64);
            post = Some(PostConsensus {
                max_abs_rate: 0.0,
                max_rate_spread: 0.0,
                max_abs_accel: 0.0,
                max_heading_error: 0.0,
            });
        }
        let settled = consensus_time.is_some_and(|tc| t >= tc + CONSENSUS_SETTLE - 1e-12);
        if let Some(pc) = post.as_mut().filter(|_| settled) {
            pc.max_rate_spread = pc.max_rate_spread.max(hi - lo);
            for i in (0..n).filter(|&i| tracks[i].active) {
                pc.max_abs_rate = pc.max_abs_rate.max(rates[i].abs());
                pc.max_abs_accel = pc.max_abs_accel.max(commands[i].abs());
                pc.max_heading_error = pc
                    .max_heading_error
                    .max(wrap_pi(polar[i].heading_error()).abs());
            }
        }

        for i in 0..n {
            for j in (i + 1)..n {
                if tracks[i].active && tracks[j].active {
                    let (xi, yi) = polar[i].position();
                    let (xj, yj) = polar[j].position();
                    min_sep = min_sep.min((xi - xj).hypot(yi - yj));
                }
            }
        }

        for i in 0..n {
            let p = &polar[i];
            los[i].time.push(t);
            los[i].theta.push(p.theta);
            los[i].theta_dot.push(rates[i]);
            if step % scenario.record_every.max(1) == 0 {
                let drag = match model.kind {
                    ModelKind::Realistic if tracks[i].active => {
                        drag_force(
                            p.v,
                            model.applied_accel(commands[i], p.gamma),
                            p.position().1,
                            model.propulsion.mass(t),
                            &model.drag,
                        )
                        .total
                    }
                    _ => 0.0,
                };
                histories[i].push(Sample {
                    t,
                    r: p.r,
                    theta: p.theta,
                    theta_dot: rates[i],
                    gamma: p.gamma,
                    v: p.v,
                    a_m: commands[i],
                    sigma: rates[i] - rates[(i + 1) % n],
                    drag,
                });
            }
        }

        steps = step;
        if step == max_steps || tracks.iter().all(|k| !k.active) {
            break;
        }

        for (i, track) in tracks.iter_mut().enumerate() {
            if !track.active {
                continue;
            }
            let next = match &track.body {
                Body::Polar(p) => Body::Polar(step_constant_speed(p, commands[i], dt)?),
                Body::Cart(c) => {
                    let applied = model.applied_accel(commands[i], c.gamma);
                    Body::Cart(step_realistic(c, applied, t, dt, model)?)
                }
            };
            let np = next.polar();
            let [r_before, r_now] = track.prev_r;
            let t_next = t + dt;
            track.body = next;
            track.outcome.final_state = np;
            if !(np.v > model.speed_floor) || !np.r.is_finite() {
                track.active = false;
                track.outcome.aborted = Some(format!("speed {:.3} m/s at t = {t_next:.3} s", np.v));
                continue;
            }
            if np.r < cfg.lethal_radius {
                track.active = false;
                track.outcome.intercepted = true;
                track.outcome.intercept_time = Some(t_next);
                track.outcome.miss_distance = projected_miss(&np);
            } else if np.r > r_now && r_now < r_before {
                let miss = parabolic_min(r_before, r_now, np.r);
                track.active = false;
                track.outcome.miss_distance = miss;
                track.outcome.intercepted = miss < cfg.lethal_radius;
                track.outcome.intercept_time = Some(t);
            } else {
                track.outcome.miss_distance = track.outcome.miss_distance.min(np.r);
            }
            track.prev_r = [r_now, np.r];
        }
    }

    let margins = collision_margin(&los)?;
    Ok(EngagementResult {
        dt,
        steps,
        missiles: tracks.into_iter().map(|k| k.outcome).collect(),
        consensus_time,
        consensus_value,
        post_consensus: post,
        min_pairwise_separation: min_sep,
        margins,
        histories,
    })
}

fn salvo(r: f64, v: f64, thetas_deg: &[f64], gammas_deg: &[f64]) -> Vec<PolarEngagementState> {
    thetas_deg
        .iter()
        .zip(gammas_deg)
        .map(|(th, g)| PolarEngagementState {
            r,
            theta: th.to_radians(),
            gamma: g.to_radians(),
            v,
        })
        .collect()
}

/// Five constant-speed missiles at 15 km and 400 m/s.
pub fn scenario_one() -> EngagementScenario {
    EngagementScenario::new(
        salvo(
            15_000.0,
            400.0,
            &[-170.0, -110.0, -25.0, 45.0, 105.0],
            &[-90.0, -180.0, -90.0, 0.0, 45.0],
        ),
        MissileModel::constant_speed(),
        vec![1.315e-3, 1.255e-3, 4.900e-3, 2.700e-3, 2.000e-3],
    )
}

/// Scenario one with the gains of agents 3 and 4 lowered.
pub fn scenario_two() -> EngagementScenario {
    let mut s = scenario_one();
    s.guidance.gains = vec![1.315e-3, 1.255e-3, 1.685e-3, 1.800e-3, 2.000e-3];
    s
}

/// Five boosted interceptors released 15 km from a ground target.
pub fn realistic_scenario() -> EngagementScenario {
    EngagementScenario::new(
        salvo(
            15_000.0,
            400.0,
            &[-90.0, -50.0, -30.0, -145.0, -100.0],
            &[-125.0, -20.0, -10.0, -160.0, -70.0],
        ),
        MissileModel::realistic(),
        vec![3.3208e-3, 6.8490e-3, 4.1900e-3, 3.3320e-3, 2.8778e-3],
    )
}
