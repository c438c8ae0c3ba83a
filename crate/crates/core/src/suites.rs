//! Built-in scenario grids.
//!
//! Each grid comes in a full variant (200 replicates) and a desk variant
//! (50 replicates); the desk variant is named with a `_desk` suffix.

use crate::harness::{Profile, RingSpec, ScenarioSpec};
use crate::sbm::{WeakPair, WeightDistribution};

pub const DEFAULT_MASTER_SEED: u64 = 20_251_016;
pub const FULL_REPLICATES: usize = 200;
pub const DESK_REPLICATES: usize = 50;
pub const DEFAULT_K_MAX: usize = 20;

/// Link-probability grid for unweighted networks: `(p_win, [p_btw...])`.
pub const UNWEIGHTED_GRID: [(f64, &[f64]); 4] = [
    (0.3, &[0.05, 0.1, 0.15]),
    (0.4, &[0.1, 0.15, 0.2, 0.25]),
    (0.5, &[0.1, 0.15, 0.2, 0.25, 0.3, 0.35]),
    (0.6, &[0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45]),
];

/// Weak-pair designs: `(p_win, [p_tilde...])`, other pairs at 0.05.
pub const WEAK_PAIR_GRID: [(f64, &[f64]); 2] = [(0.3, &[0.1, 0.15, 0.2]), (0.6, &[0.3, 0.35, 0.4, 0.45])];
pub const WEAK_PAIR_P_BTW: f64 = 0.05;

/// Weighted designs: `(p_win, [p_btw...])`.
pub const WEIGHTED_GRID: [(f64, &[f64]); 2] = [(0.3, &[0.1, 0.2]), (0.6, &[0.1, 0.5])];

pub const W_WIN: WeightDistribution = WeightDistribution { lo: 0.5, hi: 1.0 };
pub const W_BTW_WEIGHTED: [WeightDistribution; 3] = [
    WeightDistribution { lo: 0.0, hi: 0.2 },
    WeightDistribution { lo: 0.3, hi: 0.5 },
    WeightDistribution { lo: 0.5, hi: 0.7 },
];
pub const W_BTW_FULLY_CONNECTED: [WeightDistribution; 4] = [
    WeightDistribution { lo: 0.0, hi: 0.2 },
    WeightDistribution { lo: 0.3, hi: 0.5 },
    WeightDistribution { lo: 0.5, hi: 0.7 },
    WeightDistribution { lo: 0.6, hi: 0.8 },
];

const SIZES: [usize; 2] = [240, 600];
const PROFILES: [Profile; 2] = [Profile::Eq, Profile::Ne];

fn base(id: String, n: usize, k_true: usize, p_win: f64, p_btw: f64, profile: Profile, replicates: usize) -> ScenarioSpec {
    ScenarioSpec {
        id,
        n,
        k_true,
        p_win,
        p_btw,
        weak_pair: None,
        w_win: None,
        w_btw: None,
        fully_connected: false,
        profile,
        replicates,
        master_seed: DEFAULT_MASTER_SEED,
        k_max: DEFAULT_K_MAX,
        rings: None,
    }
}

fn dist_tag(d: &WeightDistribution) -> String {
    format!("{}-{}", d.lo, d.hi)
}

/// Unweighted grid over n, K_true, probabilities and size profile.
pub fn unweighted(replicates: usize) -> Vec<ScenarioSpec> {
    let mut out = Vec::new();
    for (p_win, btws) in UNWEIGHTED_GRID {
        for &n in &SIZES {
            for k in [3, 8] {
                for &p_btw in btws {
                    for profile in PROFILES {
                        let id = format!("unw_n{n}_k{k}_pw{p_win}_pb{p_btw}_{profile}");
                        out.push(base(id, n, k, p_win, p_btw, profile, replicates));
                    }
                }
            }
        }
    }
    out
}

/// Weak-pair grid. Under EQ the pair is blocks (0, 1); under NE it joins
/// the two smaller clusters (1, 2).
pub fn weak_pair(replicates: usize) -> Vec<ScenarioSpec> {
    let mut out = Vec::new();
    for (p_win, tildes) in WEAK_PAIR_GRID {
        for &n in &SIZES {
            for &p in tildes {
                for profile in PROFILES {
                    let id = format!("weak_n{n}_pw{p_win}_pt{p}_{profile}");
                    let mut s = base(id, n, 3, p_win, WEAK_PAIR_P_BTW, profile, replicates);
                    s.weak_pair = Some(match profile {
                        Profile::Eq => WeakPair { a: 0, b: 1, p },
                        Profile::Ne => WeakPair { a: 1, b: 2, p },
                    });
                    out.push(s);
                }
            }
        }
    }
    out
}

/// Weighted sparse grid (K_true = 3).
pub fn weighted(replicates: usize) -> Vec<ScenarioSpec> {
    let mut out = Vec::new();
    for (p_win, btws) in WEIGHTED_GRID {
        for &n in &SIZES {
            for &p_btw in btws {
                for w_btw in &W_BTW_WEIGHTED {
                    for profile in PROFILES {
                        let id = format!("wtd_n{n}_pw{p_win}_pb{p_btw}_wb{}_{profile}", dist_tag(w_btw));
                        let mut s = base(id, n, 3, p_win, p_btw, profile, replicates);
                        s.w_win = Some(W_WIN);
                        s.w_btw = Some(*w_btw);
                        out.push(s);
                    }
                }
            }
        }
    }
    out
}

/// Fully connected weighted grid (K_true = 3). Link probabilities are
/// recorded as 1.
pub fn fully_connected(replicates: usize) -> Vec<ScenarioSpec> {
    let mut out = Vec::new();
    for &n in &SIZES {
        for w_btw in &W_BTW_FULLY_CONNECTED {
            for profile in PROFILES {
                let id = format!("fc_n{n}_wb{}_{profile}", dist_tag(w_btw));
                let mut s = base(id, n, 3, 1.0, 1.0, profile, replicates);
                s.fully_connected = true;
                s.w_win = Some(W_WIN);
                s.w_btw = Some(*w_btw);
                out.push(s);
            }
        }
    }
    out
}

pub const RING_COUNTS: [usize; 3] = [200, 200, 200];
pub const RING_RADII: [f64; 3] = [1.0, 2.0, 3.0];

/// Three concentric rings of 200 points each.
pub fn rings(replicates: usize) -> Vec<ScenarioSpec> {
    let mut s = base("rings_n600".into(), 600, 3, 1.0, 1.0, Profile::Eq, replicates);
    s.rings = Some(RingSpec {
        counts: RING_COUNTS.to_vec(),
        radii: RING_RADII.to_vec(),
    });
    vec![s]
}

/// Names of all built-in suites.
pub fn builtin_names() -> Vec<String> {
    builtin_suites().into_iter().map(|(name, _)| name).collect()
}

/// Every built-in suite as `(name, scenarios)`.
pub fn builtin_suites() -> Vec<(String, Vec<ScenarioSpec>)> {
    let grids: [(&str, fn(usize) -> Vec<ScenarioSpec>); 5] = [
        ("table2", unweighted),
        ("table3", weak_pair),
        ("weighted", weighted),
        ("fully_connected", fully_connected),
        ("rings", rings),
    ];
    let mut out = Vec::new();
    for (name, grid) in grids {
        out.push((name.to_string(), grid(FULL_REPLICATES)));
        out.push((format!("{name}_desk"), grid(DESK_REPLICATES)));
    }
    out
}

pub fn builtin_suite(name: &str) -> Option<Vec<ScenarioSpec>> {
    builtin_suites().into_iter().find(|(n, _)| n == name).map(|(_, s)| s)
}
