//! Acceptance gate for the whole crate: ten end-to-end checks covering
//! region and face counting, relation derivations, image dimensions,
//! decision round-trips, the image subdivision, cell counts, fibers, and
//! gauge invariance.  Each check prints exactly one pass/fail line
//! (visible with `--nocapture`, and always on failure).

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use tropbip::arrangement::{
    count_acyclic_orientations_brute, enumerate_faces, enumerate_regions, Letter, RegionLabel,
};
use tropbip::cells::{barvinok2_decide, count_cells, verify_subdivision, Decision};
use tropbip::counts::{crosscheck, face_egf, large_egf, region_egf, small_formula};
use tropbip::diagram::{
    diagram_of, image_dimension, relations_v1, relations_v2, SizeClass,
};
use tropbip::morphism::{eval_g, generic_fiber, linearization_rank, MorphismError, ParamPoint};
use tropbip::ratcore::{rat, ratio, Rat, RatMatrix};

fn conclude(name: &str, limit: Option<Duration>, work: impl FnOnce() -> Result<String, String>) {
    let start = Instant::now();
    let mut outcome = work();
    let elapsed = start.elapsed();
    if let (Ok(_), Some(limit)) = (&outcome, limit) {
        if elapsed > limit {
            outcome = Err(format!(
                "finished correct but took {elapsed:.2?}, over the {limit:.0?} limit"
            ));
        }
    }
    match outcome {
        Ok(detail) => println!("acceptance {name}: pass ({detail}; {elapsed:.2?})"),
        Err(detail) => {
            println!("acceptance {name}: FAIL ({detail})");
            panic!("acceptance {name} failed: {detail}");
        }
    }
}

fn sample_rat(rng: &mut ChaCha8Rng) -> Rat {
    ratio(rng.gen_range(-40..=40), rng.gen_range(1..=5))
}

fn sample_param(rng: &mut ChaCha8Rng, m: usize, n: usize) -> ParamPoint {
    let draw = |rng: &mut ChaCha8Rng, len: usize| (0..len).map(|_| sample_rat(rng)).collect();
    ParamPoint::new(
        draw(rng, m),
        draw(rng, m),
        draw(rng, n),
        draw(rng, n),
    )
    .expect("sampled vectors have the requested lengths")
}

#[test]
fn a01_region_counts_agree_across_enumeration_bruteforce_and_series() {
    conclude("region-counts", Some(Duration::from_secs(10)), || {
        let series = region_egf(16, 16);
        let shapes: Vec<(usize, usize)> =
            (1..=16usize).flat_map(|m| (1..=(16 / m)).map(move |n| (m, n))).collect();
        shapes.par_iter().try_for_each(|&(m, n)| {
            let enumerated = enumerate_regions(m, n).count() as u64;
            let brute = count_acyclic_orientations_brute(m, n);
            let coeff = series.coeff(0, m, n);
            if enumerated != brute {
                return Err(format!(
                    "{m}x{n}: enumeration found {enumerated} regions, brute force {brute}"
                ));
            }
            if *coeff != rat(enumerated as i64) {
                return Err(format!(
                    "{m}x{n}: enumeration found {enumerated} regions, series says {coeff}"
                ));
            }
            Ok(())
        })?;
        for (m, n, want) in [(1, 1, 2u64), (1, 2, 4), (2, 2, 14), (2, 3, 46)] {
            let got = enumerate_regions(m, n).count() as u64;
            if got != want {
                return Err(format!("{m}x{n}: anchor expects {want} regions, got {got}"));
            }
        }
        Ok(format!(
            "{} shapes agree three ways, anchors 2/4/14/46",
            shapes.len()
        ))
    });
}

#[test]
fn a02_face_tallies_match_the_face_series() {
    conclude("face-counts", Some(Duration::from_secs(60)), || {
        let series = face_egf(6, 5, 5);
        let mut shapes = 0usize;
        for m in 1..=5usize {
            for n in 1..=(6 - m).min(5) {
                let mut tally: BTreeMap<usize, u64> = BTreeMap::new();
                for f in enumerate_faces(m, n) {
                    *tally.entry(f.dimension()).or_default() += 1;
                }
                for k in 0..=(m + n) {
                    let counted = rat(tally.get(&k).copied().unwrap_or(0) as i64);
                    let coeff = series.coeff(k, m, n);
                    if *coeff != counted {
                        return Err(format!(
                            "{m}x{n}: {counted} faces of dimension {k} enumerated, series says {coeff}"
                        ));
                    }
                }
                if (m, n) == (1, 1) {
                    let want: BTreeMap<usize, u64> = [(1, 1), (2, 2)].into();
                    if tally != want {
                        return Err(format!("1x1 anchor tally is {tally:?}"));
                    }
                }
                shapes += 1;
            }
        }
        Ok(format!(
            "{shapes} shapes tally exactly, 1x1 anchor has 2 regions and 1 wall"
        ))
    });
}

#[test]
fn a03_relation_derivations_agree_on_every_region() {
    conclude("relation-versions", Some(Duration::from_secs(30)), || {
        let mut regions = 0u64;
        for m in 1..=3usize {
            for n in 1..=3usize {
                for r in enumerate_regions(m, n) {
                    regions += 1;
                    let v1 = relations_v1(&r);
                    let v2 = relations_v2(&diagram_of(&r));
                    if v1 != v2 {
                        return Err(format!("derivations disagree on {r}"));
                    }
                }
            }
        }
        Ok(format!("{regions} regions, both derivations identical"))
    });
}

#[test]
fn a04_image_dimension_matches_the_linearization_rank() {
    conclude("image-dimensions", Some(Duration::from_secs(60)), || {
        let mut regions = 0u64;
        for m in 1..=3usize {
            for n in 1..=3usize {
                for r in enumerate_regions(m, n) {
                    regions += 1;
                    let dim = image_dimension(&r);
                    let rank = linearization_rank(&r);
                    if dim != rank {
                        return Err(format!("{r}: dimension {dim} but linearization rank {rank}"));
                    }
                }
                let letters: Vec<Letter> = (1..=m)
                    .map(Letter::pos)
                    .chain((1..=n).map(Letter::neg))
                    .collect();
                let all_pos_first =
                    RegionLabel::new(m, n, letters).expect("two sorted runs form a region label");
                for r in [all_pos_first.negate(), all_pos_first] {
                    if image_dimension(&r) != m + n - 1 {
                        return Err(format!(
                            "{r} should have the exceptional dimension {}",
                            m + n - 1
                        ));
                    }
                }
            }
        }
        Ok(format!(
            "{regions} regions match, one-sided regions drop to m+n-1"
        ))
    });
}

#[test]
fn a05_decide_round_trips_seeded_points_and_rejects_the_cocircuit() {
    conclude("decision-round-trip", Some(Duration::from_secs(120)), || {
        let mut rng = ChaCha8Rng::seed_from_u64(1005);
        let mut decided = 0u64;
        for (m, n) in [(2, 2), (2, 3), (3, 3), (3, 4)] {
            for _ in 0..1000 {
                let p = sample_param(&mut rng, m, n);
                let g = eval_g(&p);
                match barvinok2_decide(&g, None).map_err(|e| e.to_string())? {
                    Decision::Yes { preimage, .. } => {
                        if eval_g(&preimage) != g {
                            return Err(format!(
                                "{m}x{n}: certificate does not evaluate back to the input"
                            ));
                        }
                    }
                    Decision::No => {
                        return Err(format!("{m}x{n}: an image point was declared outside"))
                    }
                }
                decided += 1;
            }
        }
        let cocircuit = RatMatrix::from_i64(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]);
        match barvinok2_decide(&cocircuit, None).map_err(|e| e.to_string())? {
            Decision::No => {}
            Decision::Yes { witness_region, .. } => {
                return Err(format!(
                    "the cocircuit matrix was accepted with witness {witness_region}"
                ))
            }
        }
        Ok(format!(
            "{decided} seeded points certified exactly, cocircuit rejected"
        ))
    });
}

#[test]
fn a06_subdivision_checks_pass_at_three_shapes() {
    conclude("subdivision", Some(Duration::from_secs(300)), || {
        let mut cells = (0usize, 0usize);
        for (m, n) in [(2, 2), (2, 3), (3, 3)] {
            let report =
                verify_subdivision(m, n, 500, 1006, None).map_err(|e| e.to_string())?;
            if let Some(check) = report.checks.iter().find(|c| !c.passed) {
                return Err(format!(
                    "{m}x{n} {}: {}{}",
                    check.name,
                    check.detail,
                    check
                        .witness
                        .as_deref()
                        .map(|w| format!(" [{w}]"))
                        .unwrap_or_default()
                ));
            }
            cells = (cells.0 + report.small_cells, cells.1 + report.large_cells);
        }
        Ok(format!(
            "all five checks at three shapes, 500 samples each, {} small and {} large cells",
            cells.0, cells.1
        ))
    });
}

#[test]
fn a07_small_cell_counts_match_the_closed_formula() {
    conclude("small-cell-formula", None, || {
        for (m, n) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let counted = count_cells(m, n, SizeClass::Small, None)
                .map_err(|e| e.to_string())?
                .distinct_images;
            let formula = small_formula(m, n);
            if counted != formula {
                return Err(format!(
                    "{m}x{n}: {counted} distinct small images but the formula gives {formula}"
                ));
            }
        }
        let report = crosscheck(3, 3, None).map_err(|e| e.to_string())?;
        if !report.is_clean() {
            let d = &report.discrepancies[0];
            return Err(format!(
                "crosscheck surfaced {} at m={} n={}: {}",
                d.quantity, d.m, d.n, d.detail
            ));
        }
        Ok("four shapes match, 2x2 anchor is 2, crosscheck clean".into())
    });
}

#[test]
fn a08_large_cell_counts_match_the_series() {
    conclude("large-cell-series", None, || {
        let series = large_egf(3, 3);
        let mut images = Vec::new();
        for (m, n) in [(2, 2), (2, 3), (3, 3)] {
            let counts = count_cells(m, n, SizeClass::Large, None).map_err(|e| e.to_string())?;
            let coeff = series.coeff(0, m, n);
            if *coeff != rat(counts.positive_regions as i64) {
                return Err(format!(
                    "{m}x{n}: {} positive large regions but the series says {coeff}",
                    counts.positive_regions
                ));
            }
            images.push(format!("{m}x{n}:{}", counts.distinct_images));
        }
        Ok(format!(
            "positive-region counts match the series, 2x2 anchor is 2; distinct images {}",
            images.join(" ")
        ))
    });
}

#[test]
fn a09_fibers_have_four_quadrants_that_evaluate_back() {
    conclude("fiber-structure", Some(Duration::from_secs(120)), || {
        let mut rng = ChaCha8Rng::seed_from_u64(1009);
        for (m, n) in [(3, 3), (3, 4)] {
            let mut generic = 0;
            let mut attempts = 0;
            while generic < 100 {
                attempts += 1;
                if attempts > 3000 {
                    return Err(format!(
                        "{m}x{n}: only {generic} generic matrices in {attempts} attempts"
                    ));
                }
                let g = eval_g(&sample_param(&mut rng, m, n));
                let fiber = match generic_fiber(&g, None) {
                    Ok(fiber) => fiber,
                    Err(MorphismError::NotGeneric) => continue,
                    Err(e) => return Err(e.to_string()),
                };
                check_fiber(&fiber, &g, m, n)?;
                generic += 1;
            }
        }

        let anchor = RatMatrix::from_i64(&[&[3, 1], &[0, 2]]);
        let fiber = generic_fiber(&anchor, None).map_err(|e| e.to_string())?;
        if !fiber.degenerate {
            return Err("the 2x2 anchor should be flagged degenerate".into());
        }
        for (name, want) in [("a_2", 2i64), ("b_1", 2), ("B_2", 2), ("A_1", 3)] {
            let got = &fiber
                .apex
                .iter()
                .find(|(apex_name, _)| apex_name == name)
                .ok_or_else(|| format!("anchor apex has no coordinate {name}"))?
                .1;
            if *got != rat(want) {
                return Err(format!("anchor apex {name} is {got}, expected {want}"));
            }
        }
        check_fiber(&fiber, &anchor, 2, 2)?;
        Ok("200 generic fibers and the degenerate anchor all check out".into())
    });
}

fn check_fiber(
    fiber: &tropbip::morphism::FiberDescription,
    g: &RatMatrix,
    m: usize,
    n: usize,
) -> Result<(), String> {
    if fiber.regions.len() != 4 {
        return Err(format!(
            "{m}x{n}: fiber has {} regions instead of four",
            fiber.regions.len()
        ));
    }
    // The four quadrant colorings must agree everywhere except the two
    // tied corner entries, where all four color combinations appear.
    let coloring = |r: &RegionLabel| -> Vec<bool> {
        let mut colors = Vec::with_capacity(m * n);
        for i in 1..=m {
            for j in 1..=n {
                colors.push(r.precedes(Letter::pos(i), Letter::neg(j)));
            }
        }
        colors
    };
    let grids: Vec<Vec<bool>> = fiber.regions.iter().map(|q| coloring(&q.label)).collect();
    let differing: Vec<usize> = (0..m * n)
        .filter(|&e| grids.iter().any(|grid| grid[e] != grids[0][e]))
        .collect();
    if differing.len() != 2 {
        return Err(format!(
            "{m}x{n}: quadrant diagrams differ at {} entries instead of two",
            differing.len()
        ));
    }
    let mut combos: Vec<(bool, bool)> = grids
        .iter()
        .map(|grid| (grid[differing[0]], grid[differing[1]]))
        .collect();
    combos.sort();
    combos.dedup();
    if combos.len() != 4 {
        return Err(format!(
            "{m}x{n}: the corner entries take {} color combinations instead of four",
            combos.len()
        ));
    }
    for quadrant in &fiber.regions {
        for t in 1..=10i64 {
            let mut p = quadrant.witness.clone();
            for (slot, free) in quadrant.free.iter().enumerate() {
                let value = free.lower_bound.clone() + ratio(t + slot as i64, 3);
                let coords = match free.family {
                    'a' => &mut p.a,
                    'A' => &mut p.big_a,
                    'b' => &mut p.b,
                    'B' => &mut p.big_b,
                    other => return Err(format!("unknown free family {other:?}")),
                };
                coords[free.index - 1] = value;
            }
            if eval_g(&p) != *g {
                return Err(format!(
                    "{m}x{n}: a sampled point of quadrant {} leaves the fiber",
                    quadrant.label
                ));
            }
        }
    }
    Ok(())
}

#[test]
fn a10_gauge_shifts_leave_evaluation_unchanged() {
    conclude("gauge-invariance", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(1010);
        let mut shifts = 0u64;
        for (m, n) in [(2, 2), (2, 3), (3, 3), (3, 4)] {
            for _ in 0..1000 {
                let p = sample_param(&mut rng, m, n);
                let g = eval_g(&p);
                let (s, t) = (sample_rat(&mut rng), sample_rat(&mut rng));
                let shifted = ParamPoint::new(
                    p.a.iter().map(|v| v + &s).collect(),
                    p.big_a.iter().map(|v| v + &t).collect(),
                    p.b.iter().map(|v| v - &s).collect(),
                    p.big_b.iter().map(|v| v - &t).collect(),
                )
                .expect("shifting preserves lengths");
                if eval_g(&shifted) != g {
                    return Err(format!("{m}x{n}: a gauge shift changed the evaluation"));
                }
                shifts += 1;
            }
        }
        Ok(format!("{shifts} random shifts left every matrix unchanged"))
    });
}
