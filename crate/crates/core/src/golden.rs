//! Frozen reference values. Each fixture is computed by an oracle from
//! [`crate::oracle`] when blessed and by the production code when checked.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::oracle::{plane_integral_polar, polynomial_roots, real_segment_period};
use crate::periods::{hyperelliptic_period, Cycle};
use crate::poly::Poly;
use crate::quad2d::{integrate_plane, k_direct_gl2, k_direct_n1, k_direct_sl2, PlaneDensity};
use crate::riemann::HyperellipticCurve;

pub const GOLDEN_FORMAT: u32 = 1;
const PLANE_ORACLE_TOL: f64 = 1e-10;
const IMPL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldenEntry {
    pub value: C64,
    /// Relative tolerance for comparisons against `value`.
    pub tolerance: f64,
    pub oracle: String,
    pub created: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldenStore {
    pub format: u32,
    pub entries: BTreeMap<String, GoldenEntry>,
}

impl GoldenStore {
    pub fn default_path() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("goldens").join("goldens.json")
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let store: GoldenStore =
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        if store.format != GOLDEN_FORMAT {
            return Err(format!("unsupported golden format {}", store.format));
        }
        Ok(store)
    }

    pub fn save(&self, path: &Path) -> Result<(), String> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
        }
        let mut text = serde_json::to_string_pretty(self).map_err(|e| e.to_string())?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn get(&self, id: &str) -> Option<&GoldenEntry> {
        self.entries.get(id)
    }
}

/// Branch points `+-1, +-2, +-3`, in the order `1, 2, 3, -1, -2, -3`.
pub fn pm123() -> HyperellipticCurve {
    HyperellipticCurve::from_real(&[1.0, 2.0, 3.0, -1.0, -2.0, -3.0]).expect("distinct points")
}

/// `(D, P)` for the seeded rank-2 fixture.
pub fn seeded_gl2_sections(seed: u64) -> (Poly, Poly) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let d = Poly(vec![c(), c()]);
    let p = Poly(vec![c(), c(), c()]);
    (d, p)
}

struct Fixture {
    id: &'static str,
    tolerance: f64,
    oracle: &'static str,
    reference: fn() -> Result<C64, String>,
    implementation: fn() -> Result<C64, String>,
}

fn abs_f(curve: &HyperellipticCurve, z: C64) -> f64 {
    curve.branch_points().iter().map(|b| (z - b).norm()).product()
}

fn polar(
    curve: &HyperellipticCurve,
    extra: &[C64],
    density: impl Fn(C64) -> f64 + Sync,
) -> Result<C64, String> {
    let mut centers = curve.branch_points().to_vec();
    for z in extra {
        if centers.iter().all(|c| (c - z).norm() > 1e-9 * curve.scale()) {
            centers.push(*z);
        }
    }
    Ok(C64::new(plane_integral_polar(density, &centers, PLANE_ORACLE_TOL)?.value, 0.0))
}

fn real(v: Result<crate::quad2d::QuadResult, crate::quad2d::QuadError>) -> Result<C64, String> {
    v.map(|r| C64::new(r.value, 0.0)).map_err(|e| e.to_string())
}

const GL2_SEED: u64 = 2024;

fn fixtures() -> Vec<Fixture> {
    vec![
        Fixture {
            id: "quad2d.inverse-abs-f.pm123",
            tolerance: 1e-8,
            oracle: "polar partition of unity about each branch point, trapezoid x Gauss-Legendre, levels agree to 1e-10",
            reference: || {
                let c = pm123();
                polar(&c, &[], |z| 1.0 / abs_f(&c, z))
            },
            implementation: || {
                let c = pm123();
                let cc = c.clone();
                let d = PlaneDensity::new(move |z| 1.0 / abs_f(&cc, z), 6)
                    .with_points(c.branch_points(), -1);
                real(integrate_plane(&d, IMPL_TOL))
            },
        },
        Fixture {
            id: "quad2d.sl2.pm123.p=(z-1)(z-2)",
            tolerance: 1e-8,
            oracle: "polar partition of unity about each branch point applied to 2|P|/|f|, levels agree to 1e-10",
            reference: || {
                let c = pm123();
                let p = Poly::from_real(&[2.0, -3.0, 1.0]);
                polar(&c, &[], |z| 2.0 * p.eval(z).norm() / abs_f(&c, z))
            },
            implementation: || {
                real(k_direct_sl2(&pm123(), &Poly::from_real(&[2.0, -3.0, 1.0]), IMPL_TOL))
            },
        },
        Fixture {
            id: "quad2d.n1.pm123.g=1",
            tolerance: 1e-8,
            oracle: "polar partition of unity about each branch point applied to |g|^2/|f|, levels agree to 1e-10",
            reference: || {
                let c = pm123();
                polar(&c, &[], |z| 1.0 / abs_f(&c, z))
            },
            implementation: || real(k_direct_n1(&pm123(), &Poly::from_real(&[1.0]), IMPL_TOL)),
        },
        Fixture {
            id: "quad2d.n1.pm123.g=0.5-z",
            tolerance: 1e-8,
            oracle: "polar partition of unity about each branch point applied to |g|^2/|f|, levels agree to 1e-10",
            reference: || {
                let c = pm123();
                let g = Poly::from_real(&[0.5, -1.0]);
                polar(&c, &[], |z| g.eval(z).norm_sqr() / abs_f(&c, z))
            },
            implementation: || real(k_direct_n1(&pm123(), &Poly::from_real(&[0.5, -1.0]), IMPL_TOL)),
        },
        Fixture {
            id: "quad2d.gl2.pm123.seed-2024",
            tolerance: 1e-8,
            oracle: "polar partition of unity about branch points and roots of D^2-4P (Aberth), levels agree to 1e-10",
            reference: || {
                let c = pm123();
                let (d, p) = seeded_gl2_sections(GL2_SEED);
                let disc = &(&d * &d) - &p.scale(C64::new(4.0, 0.0));
                let roots = polynomial_roots(&disc);
                polar(&c, &roots, |z| {
                    0.5 * (d.eval(z).norm_sqr() + disc.eval(z).norm()) / abs_f(&c, z)
                })
            },
            implementation: || {
                let (d, p) = seeded_gl2_sections(GL2_SEED);
                real(k_direct_gl2(&pm123(), &d, &p, IMPL_TOL))
            },
        },
        Fixture {
            id: "periods.pm123.segment-1-2.g=1",
            tolerance: 1e-9,
            oracle: "real-segment integral with square-root endpoint substitution, adaptive Simpson to 1e-14",
            reference: || real_segment_period(&pm123(), &Poly::from_real(&[1.0]), 0, 1, 1, 1e-14),
            implementation: || {
                hyperelliptic_period(&pm123(), &Poly::from_real(&[1.0]), &Cycle::straight(0, 1))
                    .map_err(|e| e.to_string())
            },
        },
        Fixture {
            id: "periods.pm123.segment-(-1)-(-2).g=z",
            tolerance: 1e-9,
            oracle: "real-segment integral with square-root endpoint substitution, adaptive Simpson to 1e-14",
            reference: || real_segment_period(&pm123(), &Poly::from_real(&[0.0, 1.0]), 3, 4, 1, 1e-14),
            implementation: || {
                hyperelliptic_period(&pm123(), &Poly::from_real(&[0.0, 1.0]), &Cycle::straight(3, 4))
                    .map_err(|e| e.to_string())
            },
        },
    ]
}

/// Recomputes every fixture with its oracle.
pub fn bless() -> Result<GoldenStore, String> {
    let created = format!("spectral-sk {} --bless", env!("CARGO_PKG_VERSION"));
    let mut entries = BTreeMap::new();
    for f in fixtures() {
        let value = (f.reference)().map_err(|e| format!("{}: {e}", f.id))?;
        entries.insert(
            f.id.to_string(),
            GoldenEntry {
                value,
                tolerance: f.tolerance,
                oracle: f.oracle.to_string(),
                created: created.clone(),
            },
        );
    }
    Ok(GoldenStore {
        format: GOLDEN_FORMAT,
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenCheck {
    pub id: String,
    pub expected: Option<C64>,
    pub actual: Option<C64>,
    pub rel_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub note: Option<String>,
}

/// Compares the production code against the stored values.
pub fn check_goldens(store: &GoldenStore) -> Vec<GoldenCheck> {
    fixtures()
        .into_iter()
        .map(|f| {
            let Some(entry) = store.get(f.id) else {
                return GoldenCheck {
                    id: f.id.into(),
                    expected: None,
                    actual: None,
                    rel_error: f64::INFINITY,
                    tolerance: f.tolerance,
                    passed: false,
                    note: Some("missing from the golden store".into()),
                };
            };
            match (f.implementation)() {
                Ok(actual) => {
                    let rel = (actual - entry.value).norm() / entry.value.norm().max(f64::MIN_POSITIVE);
                    GoldenCheck {
                        id: f.id.into(),
                        expected: Some(entry.value),
                        actual: Some(actual),
                        rel_error: rel,
                        tolerance: entry.tolerance,
                        passed: rel <= entry.tolerance,
                        note: None,
                    }
                }
                Err(e) => GoldenCheck {
                    id: f.id.into(),
                    expected: Some(entry.value),
                    actual: None,
                    rel_error: f64::INFINITY,
                    tolerance: entry.tolerance,
                    passed: false,
                    note: Some(e),
                },
            }
        })
        .collect()
}

pub fn fixture_ids() -> Vec<&'static str> {
    fixtures().into_iter().map(|f| f.id).collect()
}
