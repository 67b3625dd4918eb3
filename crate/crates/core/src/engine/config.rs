use crate::bucketing::BucketStrategy;
use crate::sampler::SamplingParams;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Default local queue capacity for online peeling.
pub const DEFAULT_VGC: usize = 128;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeelKind {
    Offline,
    #[default]
    Online,
}

impl FromStr for PeelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "offline" => Ok(PeelKind::Offline),
            "online" => Ok(PeelKind::Online),
            _ => Err(Error::Parameter(format!("unknown peel strategy {s:?}; expected offline or online"))),
        }
    }
}

impl fmt::Display for PeelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PeelKind::Offline => "offline",
            PeelKind::Online => "online",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeelConfig {
    pub peel: PeelKind,
    /// `None` disables sampling.
    pub sampling: Option<SamplingParams>,
    /// Local queue capacity; 0 disables local search.
    pub vgc: usize,
    pub bucketing: BucketStrategy,
    /// Worker threads; 0 means one per hardware thread.
    pub threads: usize,
    pub seed: u64,
}

impl Default for PeelConfig {
    fn default() -> Self {
        PeelConfig {
            peel: PeelKind::Online,
            sampling: Some(SamplingParams::default()),
            vgc: DEFAULT_VGC,
            bucketing: BucketStrategy::default(),
            threads: 0,
            seed: 0,
        }
    }
}

impl PeelConfig {
    /// Offline peeling with no extras.
    pub fn offline(bucketing: BucketStrategy) -> Self {
        PeelConfig { peel: PeelKind::Offline, sampling: None, vgc: 0, bucketing, ..Default::default() }
    }

    pub fn online(vgc: usize, sampling: Option<SamplingParams>, bucketing: BucketStrategy) -> Self {
        PeelConfig { peel: PeelKind::Online, sampling, vgc, bucketing, ..Default::default() }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.peel == PeelKind::Offline && self.sampling.is_some() {
            return Err(Error::Config("sampling requires online peeling".into()));
        }
        if self.peel == PeelKind::Offline && self.vgc > 0 {
            return Err(Error::Config("vgc requires online peeling".into()));
        }
        if let BucketStrategy::Fixed(0) = self.bucketing {
            return Err(Error::Config("fixed bucketing needs b >= 1".into()));
        }
        if let Some(p) = &self.sampling {
            if !(p.r > 0.0 && p.r < 1.0) {
                return Err(Error::Config(format!("sampling r must lie in (0, 1), got {}", p.r)));
            }
            if p.c.is_nan() || p.c <= 0.0 {
                return Err(Error::Config(format!("sampling c must be positive, got {}", p.c)));
            }
        }
        Ok(())
    }

    /// Short label such as `online:vgc128:sampling:auto`.
    pub fn label(&self) -> String {
        let mut s = self.peel.to_string();
        if self.peel == PeelKind::Online {
            s += &format!(":vgc{}", self.vgc);
        }
        if self.sampling.is_some() {
            s += ":sampling";
        }
        s + ":" + &self.bucketing.to_string()
    }

    /// Parses a label as produced by [`label`](Self::label). Tokens may appear
    /// in any order; missing ones keep their defaults, except that sampling is
    /// off unless named.
    pub fn from_label(label: &str) -> Result<Self> {
        let mut cfg = PeelConfig { sampling: None, ..Default::default() };
        let mut tokens = label.split(':').peekable();
        while let Some(t) = tokens.next() {
            match t {
                "offline" | "online" => {
                    cfg.peel = t.parse()?;
                    if cfg.peel == PeelKind::Offline {
                        cfg.vgc = 0;
                    }
                }
                "sampling" => cfg.sampling = Some(SamplingParams::default()),
                "nosampling" => cfg.sampling = None,
                "single" | "hbs" | "auto" => cfg.bucketing = t.parse()?,
                "fixed" => {
                    let b = match tokens.peek().and_then(|b| b.parse::<u32>().ok()) {
                        Some(b) => {
                            tokens.next();
                            b
                        }
                        None => crate::bucketing::THETA,
                    };
                    cfg.bucketing = BucketStrategy::Fixed(b);
                }
                _ => match t.strip_prefix("vgc").map(str::parse::<usize>) {
                    Some(Ok(v)) => cfg.vgc = v,
                    _ => return Err(Error::Parameter(format!("unknown config token {t:?} in {label:?}"))),
                },
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Every legal combination of peel strategy, local queue, sampling and
    /// bucketing (20 in total).
    pub fn matrix() -> Vec<PeelConfig> {
        let buckets = [BucketStrategy::Single, BucketStrategy::Fixed(16), BucketStrategy::Hbs, BucketStrategy::default()];
        let mut out = Vec::new();
        for &b in &buckets {
            out.push(PeelConfig::offline(b));
        }
        for vgc in [0, DEFAULT_VGC] {
            for sampling in [None, Some(SamplingParams::default())] {
                for &b in &buckets {
                    out.push(PeelConfig::online(vgc, sampling, b));
                }
            }
        }
        out
    }
}
