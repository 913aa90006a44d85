use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::SimConfig;
use crate::model::{ModelParams, State};

/// Receives the piecewise-constant trajectory of one path.
pub trait PathObserver {
    /// The path sat in `state` during `[start, end)`.
    fn on_interval(&mut self, state: State, start: f64, end: f64);

    fn on_jump(&mut self, _time: f64, _to: State) {}
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSummary {
    pub events: u64,
    pub final_state: State,
    /// Time at which the path stopped: `t_end` unless the event cap was hit.
    pub final_time: f64,
}

/// Runs one Gillespie path from `initial` up to `config.t_end`.
///
/// Holding times are exponential with the total outflow of
/// [`ModelParams::out_rates`]; the jump is drawn proportionally to the
/// individual rates. Replication `replication` uses its own RNG stream.
pub fn simulate_path<O: PathObserver + ?Sized>(
    params: &ModelParams,
    config: &SimConfig,
    initial: State,
    replication: u64,
    observer: &mut O,
) -> PathSummary {
    let mut rng = config.rng(replication);
    let cap = config.max_events.unwrap_or(u64::MAX);
    let mut state = initial;
    let mut t = 0.0;
    let mut events = 0u64;
    while events < cap {
        let r = params.out_rates(state.n, state.m);
        let total = r.total();
        if total <= 0.0 {
            observer.on_interval(state, t, config.t_end);
            t = config.t_end;
            break;
        }
        let hold: f64 = Exp1.sample(&mut rng);
        let next_t = t + hold / total;
        if next_t >= config.t_end {
            observer.on_interval(state, t, config.t_end);
            t = config.t_end;
            break;
        }
        observer.on_interval(state, t, next_t);
        t = next_t;
        let pick = rng.random::<f64>() * total;
        state = if pick < r.patient_arrival {
            State::new(state.n + 1, state.m)
        } else if pick < r.patient_arrival + r.impatient_arrival {
            State::new(state.n, state.m + 1)
        } else if pick < r.patient_arrival + r.impatient_arrival + r.patient_departure {
            State::new(state.n - 1, state.m)
        } else if state.m > 0 {
            State::new(state.n, state.m - 1)
        } else if state.n > 0 {
            // rounding put `pick` past the last non-zero rate
            State::new(state.n - 1, state.m)
        } else if r.impatient_arrival > 0.0 {
            State::new(state.n, state.m + 1)
        } else {
            State::new(state.n + 1, state.m)
        };
        events += 1;
        observer.on_jump(t, state);
    }
    PathSummary {
        events,
        final_state: state,
        final_time: t,
    }
}

/// Time spent in each state within `[burn_in, t_end]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OccupancyAccumulator {
    burn_in: f64,
    /// `time[n][m]`, grown on demand.
    time: Vec<Vec<f64>>,
    total: f64,
    weighted_n: f64,
    weighted_m: f64,
}

impl OccupancyAccumulator {
    pub fn new(burn_in: f64) -> Self {
        OccupancyAccumulator {
            burn_in,
            ..Default::default()
        }
    }

    pub fn total_time(&self) -> f64 {
        self.total
    }

    pub fn mean_n(&self) -> f64 {
        self.weighted_n / self.total
    }

    pub fn mean_m(&self) -> f64 {
        self.weighted_m / self.total
    }

    pub fn time_in(&self, n: usize, m: usize) -> f64 {
        self.time
            .get(n)
            .and_then(|row| row.get(m))
            .copied()
            .unwrap_or(0.0)
    }

    /// Largest `n` and `m` visited after burn-in.
    pub fn extent(&self) -> (usize, usize) {
        let n_max = self.time.len().saturating_sub(1);
        let m_max = self
            .time
            .iter()
            .map(|row| row.len())
            .max()
            .unwrap_or(1)
            .saturating_sub(1);
        (n_max, m_max)
    }

    pub fn merge(&mut self, other: &OccupancyAccumulator) {
        for (n, row) in other.time.iter().enumerate() {
            for (m, &dt) in row.iter().enumerate() {
                if dt > 0.0 {
                    self.add(n, m, dt);
                }
            }
        }
        self.total += other.total;
        self.weighted_n += other.weighted_n;
        self.weighted_m += other.weighted_m;
    }

    fn add(&mut self, n: usize, m: usize, dt: f64) {
        if self.time.len() <= n {
            self.time.resize_with(n + 1, Vec::new);
        }
        let row = &mut self.time[n];
        if row.len() <= m {
            row.resize(m + 1, 0.0);
        }
        row[m] += dt;
    }
}

impl PathObserver for OccupancyAccumulator {
    fn on_interval(&mut self, state: State, start: f64, end: f64) {
        let dt = end - start.max(self.burn_in);
        if dt > 0.0 {
            self.add(state.n as usize, state.m as usize, dt);
            self.total += dt;
            self.weighted_n += state.n as f64 * dt;
            self.weighted_m += state.m as f64 * dt;
        }
    }
}

/// Jump epochs and post-jump states.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TraceRecorder {
    pub jumps: Vec<(f64, State)>,
}

impl PathObserver for TraceRecorder {
    fn on_interval(&mut self, _state: State, _start: f64, _end: f64) {}

    fn on_jump(&mut self, time: f64, to: State) {
        self.jumps.push((time, to));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drains_without_arrivals() {
        let p = ModelParams::new(0.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        let c = SimConfig::new(7, 1e3, 0.0, 1).unwrap();
        let mut trace = TraceRecorder::default();
        let s = simulate_path(&p, &c, State::new(6, 9), 0, &mut trace);
        assert_eq!(s.final_state, State::ORIGIN);
        assert_eq!(s.events, 15);
        let mut last_n = 6;
        for (_, st) in &trace.jumps {
            assert!(st.n <= last_n);
            last_n = st.n;
        }
    }

    #[test]
    fn same_seed_same_trace() {
        let p = ModelParams::new(0.5, 5.0, 1.0, 1.0, 1.0).unwrap();
        let c = SimConfig::new(99, 200.0, 0.0, 1).unwrap();
        let run = |rep| {
            let mut t = TraceRecorder::default();
            simulate_path(&p, &c, State::ORIGIN, rep, &mut t);
            t.jumps
        };
        assert_eq!(run(0), run(0));
        assert_ne!(run(0), run(1));
    }

    #[test]
    fn occupancy_clips_burn_in() {
        let mut acc = OccupancyAccumulator::new(2.0);
        acc.on_interval(State::new(1, 1), 0.0, 3.0);
        acc.on_interval(State::new(0, 2), 3.0, 5.0);
        assert_eq!(acc.total_time(), 3.0);
        assert_eq!(acc.time_in(1, 1), 1.0);
        assert_eq!(acc.time_in(0, 2), 2.0);
        assert!((acc.mean_m() - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(acc.extent(), (1, 2));
    }

    #[test]
    fn event_cap_stops_early() {
        let p = ModelParams::new(0.5, 5.0, 1.0, 1.0, 1.0).unwrap();
        let c = SimConfig::new(3, 1e9, 0.0, 1)
            .unwrap()
            .with_max_events(1000);
        let mut acc = OccupancyAccumulator::new(0.0);
        let s = simulate_path(&p, &c, State::ORIGIN, 0, &mut acc);
        assert_eq!(s.events, 1000);
        assert!((acc.total_time() - s.final_time).abs() < 1e-9 * s.final_time);
    }
}
