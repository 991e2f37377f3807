//! Built-in sweeps reproducing the four figure families.
//!
//! Fixed values: `r = s = 15`, `p = 0.5`, except the `m/n -> 0` family,
//! which fixes `s = 16`. Exponent sweeps run over the integers 1..=30,
//! `p` sweeps over 21 points of [0, 1] (endpoints clipped), and size sweeps
//! over 11 evenly spaced points of the stated range.

use super::{Grid, Param, SweepSpec};
use crate::divergence::DEFAULT_BINS;
use crate::model::{ModelParams, RegimeKind};

pub const PRESET_NAMES: [&str; 20] = [
    "fig1a", "fig1b", "fig1c", "fig1d", "fig1e", //
    "fig2a", "fig2b", "fig2c", "fig2d", "fig2e", //
    "fig3a", "fig3b", "fig3c", "fig3d", "fig3e", //
    "fig4a", "fig4b", "fig4c", "fig4d", "fig4e",
];

pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_MASTER_SEED: u64 = 20_250_601;

#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub spec: SweepSpec,
    /// Set when the stored range is known to be questionable.
    pub warning: Option<&'static str>,
}

struct Family {
    regime: RegimeKind,
    n: u64,
    m: u64,
    s: f64,
    m_range: (f64, f64),
    n_range: (f64, f64),
}

fn family(fig: u8) -> Option<Family> {
    Some(match fig {
        1 => Family {
            regime: RegimeKind::Collapse,
            n: 200_000,
            m: 2_000_000_000,
            s: 15.0,
            m_range: (2.0e9, 2.001e9),
            n_range: (2.0e5, 1.2e6),
        },
        2 => Family {
            regime: RegimeKind::CaseI,
            n: 3_800_000,
            m: 1_100_000_000,
            s: 15.0,
            m_range: (1.1e9, 1.101e9),
            n_range: (3.8e6, 4.8e6),
        },
        3 => Family {
            regime: RegimeKind::CaseII,
            n: 1_000_000,
            m: 1_000_000,
            s: 15.0,
            m_range: (1.0e6, 2.0e6),
            n_range: (1.0e6, 2.0e6),
        },
        4 => Family {
            regime: RegimeKind::CaseIII,
            n: 1_100_000_000,
            m: 3_800_000,
            s: 16.0,
            // kept verbatim: descending, and below the fixed m
            m_range: (2.8e6, 1.2e6),
            n_range: (1.1e9, 1.101e9),
        },
        _ => return None,
    })
}

const FIG4D_WARNING: &str = "fig4d stores its m range verbatim (2.8e6 down to 1.2e6); \
     it is descending and excludes the fixed m = 3.8e6 used elsewhere in that family";

pub fn preset(name: &str) -> Option<Preset> {
    let name = *PRESET_NAMES.iter().find(|&&p| p == name)?;
    let bytes = name.as_bytes();
    let fig = bytes[3] - b'0';
    let panel = bytes[4];
    let fam = family(fig)?;
    let base = ModelParams::new(fam.n, fam.m, 0.5, fam.s, 15.0).expect("preset parameters are valid");
    let (vary, grid) = match panel {
        b'a' => (
            Param::P,
            Grid::Range {
                lo: 0.0,
                hi: 1.0,
                steps: 21,
            },
        ),
        b'b' => (
            Param::S,
            Grid::Range {
                lo: 1.0,
                hi: 30.0,
                steps: 30,
            },
        ),
        b'c' => (
            Param::R,
            Grid::Range {
                lo: 1.0,
                hi: 30.0,
                steps: 30,
            },
        ),
        b'd' => (
            Param::M,
            Grid::Range {
                lo: fam.m_range.0,
                hi: fam.m_range.1,
                steps: 11,
            },
        ),
        b'e' => (
            Param::N,
            Grid::Range {
                lo: fam.n_range.0,
                hi: fam.n_range.1,
                steps: 11,
            },
        ),
        _ => return None,
    };
    Some(Preset {
        name,
        spec: SweepSpec {
            base,
            regime: fam.regime,
            alpha: None,
            vary,
            grid,
            replicates_per_point: 1,
            samples: DEFAULT_SAMPLES,
            bins: DEFAULT_BINS,
            direction: Default::default(),
            master_seed: DEFAULT_MASTER_SEED,
        },
        warning: (name == "fig4d").then_some(FIG4D_WARNING),
    })
}
