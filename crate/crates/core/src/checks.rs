//! Seeded invariant suites over sampled points of the universal space.
//!
//! Each suite draws its samples from a [`Sampler`] seeded with the given
//! seed and returns a [`SuiteReport`]; reports contain no timings or other
//! ambient data, so reruns are byte-identical.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::pieces::Family;
use crate::report::{AxiomReport, SuiteReport};
use crate::sample::Sampler;
use crate::scalar::Scalar;
use crate::stretch::StretchContext;
use crate::structure::check_axioms;
use crate::to_canonical_json;
use crate::universal::{dist, dist_rewritten, separation, Capacity, ExplicitGeodesic, UPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Metric,
    Geodesic,
    Projections,
    Stretch,
    RealTree,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Metric,
        Suite::Geodesic,
        Suite::Projections,
        Suite::Stretch,
        Suite::RealTree,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Metric => "metric",
            Suite::Geodesic => "geodesic",
            Suite::Projections => "projections",
            Suite::Stretch => "stretch",
            Suite::RealTree => "realtree",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown suite {s:?}")))
    }
}

fn wit(p: &UPoint) -> serde_json::Value {
    serde_json::from_str(&to_canonical_json(p)).expect("round trip")
}

/// Runs `suite`. The stretch suite uses `stretch` when given and a uniform
/// `Scale(3/2)` on every piece otherwise.
pub fn run_suite(
    suite: Suite,
    family: &Family,
    capacity: Capacity,
    stretch: Option<&StretchContext>,
    samples: usize,
    seed: u64,
) -> Result<SuiteReport> {
    let mut sampler = Sampler::new(family, capacity, seed);
    let mut stats = BTreeMap::new();
    let results = match suite {
        Suite::Metric => metric(&mut sampler, samples, &mut stats)?,
        Suite::Geodesic => geodesics(&mut sampler, samples)?,
        Suite::Projections => check_axioms(&mut sampler, samples)?,
        Suite::Stretch => {
            let default;
            let ctx = match stretch {
                Some(c) => c,
                None => {
                    default = StretchContext::uniform_scale(family, Scalar::ratio(3, 2))?;
                    &default
                }
            };
            stretch_suite(&mut sampler, ctx, samples)?
        }
        Suite::RealTree => {
            if !family.all_trees() {
                return Err(Error::Precondition(
                    "the realtree suite needs a family of tree pieces only".into(),
                ));
            }
            real_tree(&mut sampler, samples)?
        }
    };
    Ok(SuiteReport {
        suite: suite.name().to_string(),
        seed,
        samples,
        results,
        stats,
    })
}

/// Three points with varied relative position: independent, chained, or
/// all branching off the same point.
fn triple(sampler: &mut Sampler<'_>) -> [UPoint; 3] {
    let f = sampler.point();
    match sampler.rng().gen_range(0..4) {
        0 => [f, sampler.point(), sampler.point()],
        1 => {
            let g = sampler.near(&f);
            let h = sampler.near(&g);
            [f, g, h]
        }
        _ => {
            let g = sampler.near(&f);
            let h = sampler.near(&f);
            [f, g, h]
        }
    }
}

fn metric(
    sampler: &mut Sampler<'_>,
    samples: usize,
    stats: &mut BTreeMap<String, u64>,
) -> Result<Vec<AxiomReport>> {
    let family = sampler.family();
    let mut symmetry = AxiomReport::new("symmetry");
    let mut identity = AxiomReport::new("identity");
    let mut triangle = AxiomReport::new("triangle");
    let mut rewritten = AxiomReport::new("rewritten-form");
    let mut sandwich = AxiomReport::new("sandwich");
    let mut transport = AxiomReport::new("separation-transport");
    let mut bump = |key: &str| *stats.entry(key.to_string()).or_insert(0) += 1;

    for _ in 0..samples {
        let pts = triple(sampler);
        let mut d = [
            [Scalar::zero(), Scalar::zero(), Scalar::zero()],
            [Scalar::zero(), Scalar::zero(), Scalar::zero()],
            [Scalar::zero(), Scalar::zero(), Scalar::zero()],
        ];
        for i in 0..3 {
            for j in 0..3 {
                d[i][j] = dist(family, &pts[i], &pts[j])?;
            }
        }
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let (f, g) = (&pts[i], &pts[j]);
            symmetry.record(d[i][j] == d[j][i], || {
                json!({"f": wit(f), "g": wit(g), "d_fg": d[i][j].to_string(), "d_gf": d[j][i].to_string()})
            });
            let zero_iff_equal =
                d[i][j].is_zero() == (f == g) && d[i][i].is_zero() && !d[i][j].is_negative();
            identity.record(
                zero_iff_equal,
                || json!({"f": wit(f), "g": wit(g), "d": d[i][j].to_string()}),
            );

            let sep = separation(f, g);
            let lower = (f.rho() - &sep.u) + (g.rho() - &sep.v);
            let upper = (f.rho() - &sep.s) + (g.rho() - &sep.s);
            let ordered = sep.s <= sep.u && sep.u <= f.rho() && sep.s <= sep.v && sep.v <= g.rho();
            sandwich.record(ordered && lower <= d[i][j] && d[i][j] <= upper, || {
                json!({"f": wit(f), "g": wit(g), "d": d[i][j].to_string(), "lower": lower.to_string(), "upper": upper.to_string()})
            });
            if sep.is_same_piece() {
                bump("case_a_pairs");
                let alt = dist_rewritten(family, f, g)?;
                rewritten.record(alt == d[i][j], || {
                    json!({"f": wit(f), "g": wit(g), "d": d[i][j].to_string(), "rewritten": alt.to_string()})
                });
            } else {
                bump("case_b_pairs");
            }
        }
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            let ok = d[i][k] <= &d[i][j] + &d[j][k];
            triangle.record(
                ok,
                || json!({"x": wit(&pts[i]), "y": wit(&pts[j]), "z": wit(&pts[k])}),
            );
        }
        let s = |a: usize, b: usize| separation(&pts[a], &pts[b]).s;
        let moments = [s(0, 1), s(1, 2), s(0, 2)];
        if moments[0] == moments[1] && moments[1] == moments[2] {
            bump("disjoint_prefix_triples");
        } else {
            bump("nested_triples");
        }
        for (x, y, z) in [
            (0, 1, 2),
            (0, 2, 1),
            (1, 0, 2),
            (1, 2, 0),
            (2, 0, 1),
            (2, 1, 0),
        ] {
            let (sxy, syz) = (s(x, y), s(y, z));
            if sxy < syz {
                let sxz = s(x, z);
                transport.record(
                    sxz == sxy,
                    || json!({"f": wit(&pts[x]), "g": wit(&pts[y]), "h": wit(&pts[z])}),
                );
            }
        }
    }
    Ok(vec![
        symmetry, identity, triangle, rewritten, sandwich, transport,
    ])
}

fn geodesics(sampler: &mut Sampler<'_>, samples: usize) -> Result<Vec<AxiomReport>> {
    let family = sampler.family();
    let mut length = AxiomReport::new("length");
    let mut endpoints = AxiomReport::new("endpoints");
    let mut arc = AxiomReport::new("arc-length");
    for _ in 0..samples {
        let f = sampler.point();
        let g = if sampler.rng().gen_bool(0.7) {
            sampler.near(&f)
        } else {
            sampler.point()
        };
        let d = dist(family, &f, &g)?;
        let geo = ExplicitGeodesic::new(family, &f, &g)?;
        let sep = geo.separation().clone();
        let phases =
            (f.rho() - &sep.u) + (geo.traverse_end() - geo.descend_end()) + (g.rho() - &sep.v);
        length.record(*geo.length() == d && phases == d, || {
            json!({"f": wit(&f), "g": wit(&g), "d": d.to_string(), "phases": phases.to_string()})
        });
        let start = to_canonical_json(&geo.eval(&Scalar::zero())?);
        let end = to_canonical_json(&geo.eval(&d)?);
        endpoints.record(
            start == to_canonical_json(&f) && end == to_canonical_json(&g),
            || json!({"f": wit(&f), "g": wit(&g)}),
        );
        if d.is_zero() {
            continue;
        }
        let marks = [geo.descend_end().clone(), geo.traverse_end()];
        for _ in 0..5 {
            let (a, b) = sampler.param_pair(&d, &marks);
            let ea = geo.eval(&a)?;
            let eb = geo.eval(&b)?;
            let got = dist(family, &ea, &eb)?;
            let want = &b - &a;
            arc.record(got == want, || {
                json!({"f": wit(&f), "g": wit(&g), "a": a.to_string(), "b": b.to_string(), "d": got.to_string()})
            });
        }
    }
    Ok(vec![length, endpoints, arc])
}

fn stretch_suite(
    sampler: &mut Sampler<'_>,
    ctx: &StretchContext,
    samples: usize,
) -> Result<Vec<AxiomReport>> {
    let source = ctx.source();
    let k = ctx.k().clone();
    let mut bilip_s = AxiomReport::new("s-bilipschitz");
    let mut pattern = AxiomReport::new("pattern-preservation");
    let mut bilip_psi = AxiomReport::new("psi-bilipschitz");
    let mut isometry = AxiomReport::new("identity-isometry");
    let identity = StretchContext::identity(source);

    for _ in 0..samples {
        let g = sampler.pgeodesic(4);
        let l = g.length();
        let marks: Vec<Scalar> = g.bounds().into_iter().map(|(p, _)| p).collect();
        let (t1, t2) = sampler.param_pair(&l, &marks);
        let gap = ctx.stretch_function(&g, &t2)? - ctx.stretch_function(&g, &t1)?;
        let dt = &t2 - &t1;
        let ok = &dt / &k <= gap && gap <= &k * &dt;
        bilip_s.record(ok, || {
            json!({"g": serde_json::to_value(&g).expect("json"), "t1": t1.to_string(), "t2": t2.to_string()})
        });

        let h = if sampler.rng().gen_bool(0.5) {
            let mut steps = vec![sampler.segment_in(g.steps()[0].piece, 0).step()];
            steps.extend(sampler.pgeodesic(3).into_steps());
            crate::pgeodesic::PGeodesic::from_steps(steps)
        } else {
            sampler.pgeodesic(4)
        };
        if g.same_initial_pattern(&h) {
            let kept = ctx.psi(&g)?.same_initial_pattern(&ctx.psi(&h)?);
            pattern.record(kept, || {
                json!({"g": serde_json::to_value(&g).expect("json"), "h": serde_json::to_value(&h).expect("json")})
            });
        }

        let f = sampler.point();
        let e = if sampler.rng().gen_bool(0.7) {
            sampler.near(&f)
        } else {
            sampler.point()
        };
        let d = dist(source, &f, &e)?;
        let d_psi = dist(ctx.target(), &ctx.psi_point(&f)?, &ctx.psi_point(&e)?)?;
        bilip_psi.record(
            &d / &k <= d_psi && d_psi <= &k * &d,
            || json!({"f": wit(&f), "g": wit(&e), "d": d.to_string(), "d_psi": d_psi.to_string()}),
        );
        let d_id = dist(source, &identity.psi_point(&f)?, &identity.psi_point(&e)?)?;
        isometry.record(d_id == d, || json!({"f": wit(&f), "g": wit(&e)}));
    }
    Ok(vec![bilip_s, pattern, bilip_psi, isometry])
}

fn real_tree(sampler: &mut Sampler<'_>, samples: usize) -> Result<Vec<AxiomReport>> {
    let family = sampler.family();
    let mut four = AxiomReport::new("four-point");
    for _ in 0..samples {
        let x = sampler.point();
        let y = sampler.near(&x);
        let z = sampler.near(&x);
        let w = if sampler.rng().gen_bool(0.5) {
            sampler.near(&y)
        } else {
            sampler.point()
        };
        let d = |a: &UPoint, b: &UPoint| dist(family, a, b);
        let mut sums = [
            d(&x, &y)? + d(&z, &w)?,
            d(&x, &z)? + d(&y, &w)?,
            d(&x, &w)? + d(&y, &z)?,
        ];
        sums.sort();
        four.record(sums[1] == sums[2], || {
            json!({"points": [wit(&x), wit(&y), wit(&z), wit(&w)], "sums": sums.iter().map(|s| s.to_string()).collect::<Vec<_>>()})
        });
    }
    Ok(vec![four])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pieces::Piece;

    fn mixed() -> Family {
        Family::new([Piece::tree(0), Piece::line(1), Piece::l1(2, 2)]).unwrap()
    }

    #[test]
    fn suite_names_parse() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_runs_are_clean() {
        let f = mixed();
        for s in [
            Suite::Metric,
            Suite::Geodesic,
            Suite::Projections,
            Suite::Stretch,
        ] {
            let r = run_suite(s, &f, Capacity::Infinite, None, 60, 1).unwrap();
            assert!(r.is_clean(), "{s}: {:?}", r.results);
        }
    }

    #[test]
    fn realtree_refuses_non_trees() {
        let r = run_suite(Suite::RealTree, &mixed(), Capacity::Infinite, None, 10, 1);
        assert!(matches!(r, Err(Error::Precondition(_))));
        let trees = Family::new([Piece::tree(0)]).unwrap();
        assert!(
            run_suite(Suite::RealTree, &trees, Capacity::Infinite, None, 50, 1)
                .unwrap()
                .is_clean()
        );
    }
}
