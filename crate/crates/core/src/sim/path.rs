use std::fmt;

/// Source of a demand event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mark {
    /// Noise buy.
    ZB,
    /// Noise sell.
    ZS,
    /// Insider buy.
    XBB,
    /// Insider buy cancelling a noise sell.
    XBS,
    /// Insider sell.
    XSS,
    /// Insider sell cancelling a noise buy.
    XSB,
}

impl Mark {
    /// Change of the demand level caused by the event.
    pub fn shift(self) -> i64 {
        match self {
            Mark::ZB | Mark::XBB => 1,
            Mark::ZS | Mark::XSS => -1,
            Mark::XBS | Mark::XSB => 0,
        }
    }

    pub fn is_insider(self) -> bool {
        !matches!(self, Mark::ZB | Mark::ZS)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mark::ZB => "ZB",
            Mark::ZS => "ZS",
            Mark::XBB => "XBB",
            Mark::XBS => "XBS",
            Mark::XSS => "XSS",
            Mark::XSB => "XSB",
        }
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub level_before: i64,
    pub mark: Mark,
    /// Insider profit booked at this event; zero for noise events.
    pub profit: f64,
}

/// Time spent at each level, stored densely around the visited range.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Occupation {
    base: i64,
    times: Vec<f64>,
}

impl Occupation {
    pub fn add(&mut self, level: i64, dt: f64) {
        if self.times.is_empty() {
            self.base = level;
            self.times.push(0.0);
        }
        if level < self.base {
            let pad = (self.base - level) as usize;
            self.times.splice(0..0, std::iter::repeat_n(0.0, pad));
            self.base = level;
        }
        let idx = (level - self.base) as usize;
        if idx >= self.times.len() {
            self.times.resize(idx + 1, 0.0);
        }
        self.times[idx] += dt;
    }

    pub fn time_at(&self, level: i64) -> f64 {
        if level < self.base {
            return 0.0;
        }
        self.times.get((level - self.base) as usize).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        crate::stats::compensated_sum(&self.times)
    }

    /// `(level, time)` pairs with positive time.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.times
            .iter()
            .enumerate()
            .filter(|(_, &t)| t > 0.0)
            .map(move |(i, &t)| (self.base + i as i64, t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PathFlags {
    pub runaway: bool,
    pub terminal_miss: bool,
    pub stranded: bool,
}

impl PathFlags {
    pub fn clean(&self) -> bool {
        !(self.runaway || self.terminal_miss || self.stranded)
    }
}

/// One simulated market path on `[0, 1]` started from level 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub bin: usize,
    pub events: Vec<Event>,
    pub terminal_level: i64,
    pub occupation: Occupation,
    pub realized_profit: Option<f64>,
    pub flags: PathFlags,
    /// Proposals drawn (rejection sampling) or majorant refinements (constructive).
    pub attempts: u64,
}

impl PathRecord {
    /// Assembles a record from time-ordered events, filling occupation and the terminal level.
    pub fn from_events(bin: usize, events: Vec<Event>) -> Self {
        let mut occupation = Occupation::default();
        let mut level = 0i64;
        let mut last = 0.0;
        for e in &events {
            occupation.add(level, e.time - last);
            level += e.mark.shift();
            last = e.time;
        }
        occupation.add(level, 1.0 - last);
        PathRecord {
            bin,
            events,
            terminal_level: level,
            occupation,
            realized_profit: None,
            flags: PathFlags::default(),
            attempts: 0,
        }
    }

    /// Level `Y_t` (right-continuous).
    pub fn level_at(&self, t: f64) -> i64 {
        let n = self.events.partition_point(|e| e.time <= t);
        if n == 0 {
            0
        } else {
            let e = &self.events[n - 1];
            e.level_before + e.mark.shift()
        }
    }

    /// Number of upward demand jumps.
    pub fn up_jumps(&self) -> usize {
        self.events.iter().filter(|e| e.mark.shift() > 0).count()
    }

    pub fn insider_events(&self) -> usize {
        self.events.iter().filter(|e| e.mark.is_insider()).count()
    }

    /// Maximal intervals `(start, end, level)` of constant demand covering `[0, 1]`.
    pub fn intervals(&self) -> Vec<(f64, f64, i64)> {
        let mut out = Vec::with_capacity(self.events.len() + 1);
        let (mut level, mut last) = (0i64, 0.0);
        for e in &self.events {
            if e.mark.shift() != 0 {
                if e.time > last {
                    out.push((last, e.time, level));
                }
                level += e.mark.shift();
                last = e.time;
            }
        }
        out.push((last, 1.0, level));
        out
    }

    /// Time spent at `level` before `t`.
    pub fn occupation_until(&self, level: i64, t: f64) -> f64 {
        self.intervals()
            .into_iter()
            .filter(|iv| iv.2 == level && iv.0 < t)
            .map(|(a, b, _)| b.min(t) - a)
            .sum()
    }
}
