use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::PassError;

macro_rules! stage_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $label:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn name(self) -> &'static str {
                match self {
                    $($name::$variant => $label),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $name {
            type Err = PassError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let key = s.trim().to_ascii_lowercase().replace('-', "_");
                $name::ALL
                    .iter()
                    .copied()
                    .find(|v| v.name() == key)
                    .ok_or_else(|| PassError::UnknownOption {
                        stage: stringify!($name).to_ascii_lowercase(),
                        value: s.to_string(),
                    })
            }
        }
    };
}

stage_enum!(
    /// Initial placement of virtual qubits.
    Mapper {
        Dense => "dense",
        NoiseAdaptive => "noise_adaptive",
        Sabre => "sabre",
        Trivial => "trivial",
    }
);

stage_enum!(
    /// SWAP insertion strategy.
    Router {
        Basic => "basic",
        Stochastic => "stochastic",
        Sabre => "sabre",
        Lookahead => "lookahead",
    }
);

stage_enum!(
    Scheduler {
        Alap => "alap",
        Asap => "asap",
    }
);

impl Mapper {
    /// Options searched by default; trivial mapping is available but not searched.
    pub const SEARCHED: &'static [Mapper] = &[Mapper::Dense, Mapper::NoiseAdaptive, Mapper::Sabre];
}

impl Router {
    /// Options searched by default; lookahead routing is available but not searched.
    pub const SEARCHED: &'static [Router] = &[Router::Basic, Router::Stochastic, Router::Sabre];
}

/// One choice per pipeline stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PassCombination {
    pub mapper: Mapper,
    pub router: Router,
    pub scheduler: Scheduler,
    pub trios: bool,
    pub dd: bool,
}

impl Default for PassCombination {
    /// SABRE mapping and routing with ALAP scheduling, no optional passes.
    fn default() -> Self {
        PassCombination {
            mapper: Mapper::Sabre,
            router: Router::Sabre,
            scheduler: Scheduler::Alap,
            trios: false,
            dd: false,
        }
    }
}

impl PassCombination {
    pub fn new(mapper: Mapper, router: Router, scheduler: Scheduler, trios: bool, dd: bool) -> Self {
        PassCombination {
            mapper,
            router,
            scheduler,
            trios,
            dd,
        }
    }

    pub fn in_default_space(&self) -> bool {
        Mapper::SEARCHED.contains(&self.mapper) && Router::SEARCHED.contains(&self.router)
    }
}

impl fmt::Display for PassCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}-{}", self.mapper, self.router, self.scheduler)?;
        if self.trios {
            f.write_str("+trios")?;
        }
        if self.dd {
            f.write_str("+dd")?;
        }
        Ok(())
    }
}

impl FromStr for PassCombination {
    type Err = PassError;

    /// Parses the `Display` form, e.g. `sabre-sabre-alap+trios`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.trim().split('+');
        let head = parts.next().unwrap_or_default();
        let stages: Vec<&str> = head.split('-').collect();
        let [m, r, sch] = stages[..] else {
            return Err(PassError::UnknownOption {
                stage: "combination".into(),
                value: s.to_string(),
            });
        };
        let mut combo = PassCombination::new(m.parse()?, r.parse()?, sch.parse()?, false, false);
        for flag in parts {
            match flag {
                "trios" => combo.trios = true,
                "dd" => combo.dd = true,
                other => {
                    return Err(PassError::UnknownOption {
                        stage: "flag".into(),
                        value: other.to_string(),
                    })
                }
            }
        }
        Ok(combo)
    }
}
