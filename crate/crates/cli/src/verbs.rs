use std::path::Path;

use serde_json::{json, Value};
use theta_core::kspec::{self, Irrep, KSeries};
use theta_core::lift::{self, OrbitDatum};
use theta_core::moment;
use theta_core::orbits::{self, Orbit};
use theta_core::pairs::{DualPairSpec, Side};

use crate::Opts;

pub struct Report {
    pub json: Value,
    pub text: String,
    pub counterexample: bool,
}

impl Report {
    fn ok(json: Value, text: String) -> Self {
        Report { json, text, counterexample: false }
    }
}

type Res = Result<Report, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn status(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// `--orbit` on the given side, or every orbit of that side.
fn orbits_on(pair: &DualPairSpec, side: Side, o: &Opts) -> Result<Vec<Orbit>, String> {
    match &o.orbit {
        Some(d) => Ok(vec![Orbit::parse(*pair, side, d).map_err(err)?]),
        None => orbits::enumerate_orbits(pair, side).map_err(err),
    }
}

fn one_orbit(pair: &DualPairSpec, side: Side, o: &Opts) -> Result<Orbit, String> {
    let d = o.orbit.as_deref().ok_or("--orbit is required")?;
    Orbit::parse(*pair, side, d).map_err(err)
}

fn require_g(o: &Opts) -> Result<(), String> {
    if o.side == Side::G {
        Ok(())
    } else {
        Err("this verb works on side G only".into())
    }
}

fn datum_json(d: &OrbitDatum) -> Value {
    json!({
        "pair": d.orbit.pair.to_string(),
        "side": d.orbit.side.to_string(),
        "orbit": d.orbit.diagram.to_string(),
        "dim": d.character.dim,
        "weight": d.character.base_weight.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "label": d.character.label,
        "varsigma_twists": d.character.varsigma_twists,
    })
}

fn datum_text(d: &OrbitDatum) -> String {
    let w: Vec<String> = d.character.base_weight.iter().map(|s| s.to_string()).collect();
    format!("{} {} {} dim={} weight=[{}]", d.orbit.pair, d.orbit.side, d.orbit.diagram, d.character.dim, w.join(", "))
}

fn irrep_text(irr: &Irrep) -> String {
    let par: String = irr.parity.iter().map(|(f, p)| format!(" {f}:{}", if *p == 0 { '+' } else { '-' })).collect();
    format!("{:?}{par}", irr.weight)
}

pub fn list_orbits(pair: &DualPairSpec, o: &Opts) -> Res {
    let list = orbits::enumerate_orbits(pair, o.side).map_err(err)?;
    let names: Vec<String> = list.iter().map(|x| x.diagram.to_string()).collect();
    let text = names.iter().map(|n| format!("{n}\n")).collect();
    Ok(Report::ok(json!({ "pair": pair.to_string(), "side": o.side.to_string(), "orbits": names }), text))
}

pub fn lift(pair: &DualPairSpec, o: &Opts) -> Res {
    require_g(o)?;
    let orbit = one_orbit(pair, Side::G, o)?;
    let rule = lift::lift_orbit(&orbit).map_err(err)?;
    let by_moment = lift::lift_orbit_by_moment(&orbit).map_err(err)?;
    let agree = rule == by_moment;
    let json = json!({
        "pair": pair.to_string(),
        "orbit": orbit.diagram.to_string(),
        "lift": rule.diagram.to_string(),
        "by_moment": by_moment.diagram.to_string(),
        "status": status(agree),
    });
    let text = format!("{} -> {} (moment map: {}) {}\n", orbit.diagram, rule.diagram, by_moment.diagram, status(agree));
    Ok(Report { json, text, counterexample: !agree })
}

pub fn lift_cycle(pair: &DualPairSpec, cycle: &str, o: &Opts) -> Res {
    require_g(o)?;
    let c = orbits::parse_cycle(*pair, Side::G, cycle).map_err(err)?;
    let l = lift::lift_cycle(&c).map_err(err)?;
    let json = json!({ "pair": pair.to_string(), "cycle": c.to_string(), "lift": l.to_string() });
    Ok(Report::ok(json, format!("{c} -> {l}\n")))
}

pub fn lift_datum(pair: &DualPairSpec, datum: &str, o: &Opts) -> Res {
    require_g(o)?;
    let d = lift::parse_datum(*pair, Side::G, datum).map_err(err)?;
    let before = lift::is_admissible(&d).map_err(err)?;
    let l = lift::lift_datum(&d).map_err(err)?;
    let after = lift::is_admissible(&l).map_err(err)?;
    // Admissibility must be carried along; a non-admissible input proves nothing.
    let broken = before && !after;
    let json = json!({
        "input": datum_json(&d),
        "input_admissible": before,
        "lift": datum_json(&l),
        "lift_admissible": after,
        "status": status(!broken),
    });
    let text = format!(
        "{} admissible={before}\n{} admissible={after}\n{}\n",
        datum_text(&d),
        datum_text(&l),
        status(!broken)
    );
    Ok(Report { json, text, counterexample: broken })
}

pub fn closure(pair: &DualPairSpec, o: &Opts) -> Res {
    let all = orbits::enumerate_orbits(pair, o.side).map_err(err)?;
    let tops = match &o.orbit {
        Some(_) => vec![one_orbit(pair, o.side, o)?],
        None => all.clone(),
    };
    let mut rows = Vec::new();
    let mut text = String::new();
    for top in &tops {
        let mut below = Vec::new();
        for x in &all {
            if orbits::closure_leq(x, top).map_err(err)? {
                below.push(x.diagram.to_string());
            }
        }
        text.push_str(&format!("{}: {}\n", top.diagram, below.join(" ")));
        rows.push(json!({ "orbit": top.diagram.to_string(), "closure": below }));
    }
    Ok(Report::ok(json!({ "pair": pair.to_string(), "side": o.side.to_string(), "orbits": rows }), text))
}

pub fn verify_moment(pair: &DualPairSpec, o: &Opts) -> Res {
    require_g(o)?;
    let seed = o.seed()?;
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut all_ok = true;
    for orbit in orbits_on(pair, Side::G, o)? {
        // With no samples the report is vacuous: nothing is computed.
        let mut free = None;
        let mut fiber = None;
        if o.samples > 0 {
            let sm = moment::construct_w(&orbit).map_err(err)?;
            free = Some(moment::k_acts_freely(&sm.w));
            fiber = Some(moment::verify_fiber_single_orbit(&orbit, o.samples, seed).map_err(err)?);
        }
        let ok = free != Some(false) && fiber.as_ref().map_or(true, |f| f.passed());
        all_ok &= ok;
        let drawn = fiber.as_ref().map_or(0, |f| f.samples);
        let free_text = free.map_or("-".to_string(), |f| f.to_string());
        text.push_str(&format!("{} free={free_text} samples={drawn} {}\n", orbit.diagram, status(ok)));
        rows.push(json!({
            "orbit": orbit.diagram.to_string(),
            "free": free,
            "fiber": fiber,
            "status": status(ok),
        }));
    }
    text.push_str(&format!("{}\n", status(all_ok)));
    let json = json!({
        "pair": pair.to_string(),
        "samples": o.samples,
        "seed": seed,
        "orbits": rows,
        "status": status(all_ok),
    });
    Ok(Report { json, text, counterexample: !all_ok })
}

pub fn verify_tangent(pair: &DualPairSpec, o: &Opts) -> Res {
    require_g(o)?;
    let mut reports = Vec::new();
    let mut text = String::new();
    let mut all_ok = true;
    for orbit in orbits_on(pair, Side::G, o)? {
        let r = lift::tangent_identity_check(&orbit).map_err(err)?;
        all_ok &= r.passed;
        text.push_str(&format!("{} rows={} {}\n", orbit.diagram, r.rows.len(), status(r.passed)));
        reports.push(r);
    }
    text.push_str(&format!("{}\n", status(all_ok)));
    let json = json!({ "pair": pair.to_string(), "reports": reports, "status": status(all_ok) });
    Ok(Report { json, text, counterexample: !all_ok })
}

pub fn dims(pair: &DualPairSpec, o: &Opts) -> Res {
    require_g(o)?;
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut all_ok = true;
    for orbit in orbits_on(pair, Side::G, o)? {
        let (lhs, rhs) = moment::theta_dim_identity(&orbit).map_err(err)?;
        let codim = moment::codim_boundary(&orbit).map_err(err)?;
        all_ok &= lhs == rhs;
        let codim_text = codim.map_or("-".to_string(), |c| c.to_string());
        text.push_str(&format!(
            "{} dim={} dim_lift={lhs} expected={rhs} codim_boundary={codim_text} {}\n",
            orbit.diagram,
            orbits::dim_orbit(&orbit),
            status(lhs == rhs)
        ));
        rows.push(json!({
            "orbit": orbit.diagram.to_string(),
            "dim_orbit": orbits::dim_orbit(&orbit),
            "dim_lift": lhs,
            "expected": rhs,
            "codim_boundary": codim,
            "status": status(lhs == rhs),
        }));
    }
    let json = json!({
        "pair": pair.to_string(),
        "dim_w": pair.dim_w(),
        "codim_one_excluded": pair.excluded_ddagger(),
        "orbits": rows,
        "status": status(all_ok),
    });
    Ok(Report { json, text, counterexample: !all_ok })
}

/// Tower file: one pair literal per line, optionally a line `datum: {..}` for
/// the start on the first smaller member; `#` starts a comment.
pub fn tower(path: &Path, _o: &Opts) -> Res {
    let src = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut pairs = Vec::new();
    let mut datum = None;
    for (i, line) in src.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("datum:") {
            datum = Some(rest.trim().to_string());
        } else {
            let p: DualPairSpec = line.parse().map_err(|e| format!("line {}: {e}", i + 1))?;
            pairs.push(p);
        }
    }
    let first = *pairs.first().ok_or("tower file lists no pairs")?;
    let d0 = match datum {
        Some(t) => lift::parse_datum(first, Side::G, &t).map_err(err)?,
        None => OrbitDatum::trivial(Orbit::zero(first, Side::G)),
    };
    match lift::tower(&pairs, &d0) {
        Ok(steps) => {
            let text = steps.iter().map(|d| format!("{}\n", datum_text(d))).collect::<String>() + "PASS\n";
            let json = json!({ "steps": steps.iter().map(datum_json).collect::<Vec<_>>(), "status": "PASS" });
            Ok(Report::ok(json, text))
        }
        Err(lift::LiftError::NotAdmissible(k)) => {
            let json = json!({ "status": "FAIL", "failed_step": k });
            Ok(Report { json, text: format!("step {k}: lifted datum is not admissible\nFAIL\n"), counterexample: true })
        }
        Err(e) => Err(e.to_string()),
    }
}

fn series_report(s: &KSeries) -> (Value, String) {
    (s.to_json(), s.to_text())
}

pub fn cw_series(pair: &DualPairSpec, o: &Opts) -> Res {
    let s = kspec::cw_series(pair, o.max_deg).map_err(err)?;
    let (json, text) = series_report(&s);
    Ok(Report::ok(json, text))
}

/// The `K`-series being transferred: the orbit ring of `--orbit`, else `S(p)`.
fn source_series(pair: &DualPairSpec, o: &Opts) -> Result<(String, KSeries), String> {
    require_g(o)?;
    match &o.orbit {
        Some(_) => {
            let orbit = one_orbit(pair, Side::G, o)?;
            let s = kspec::orbit_ring_series(&orbit, o.max_deg, o.seed()?).map_err(err)?;
            Ok((orbit.diagram.to_string(), s))
        }
        None => Ok(("S(p)".into(), kspec::sp_series(pair.side_member(Side::G), o.max_deg).map_err(err)?)),
    }
}

pub fn transfer(pair: &DualPairSpec, o: &Opts) -> Res {
    let (name, a) = source_series(pair, o)?;
    let b = kspec::transfer_series(pair, &a, o.max_deg).map_err(err)?;
    let json = json!({ "pair": pair.to_string(), "source": name, "input": a.to_json(), "output": b.to_json() });
    let text = format!("source {name}\n{}transfer\n{}", a.to_text(), b.to_text());
    Ok(Report::ok(json, text))
}

/// Candidate `K`-types are those occurring in `S(p)` up to `--max-deg`.
pub fn induced(pair: &DualPairSpec, datum: &str, o: &Opts) -> Res {
    let d = lift::parse_datum(*pair, o.side, datum).map_err(err)?;
    let member = pair.side_member(o.side);
    let sp = kspec::sp_series(member, o.max_deg).map_err(err)?;
    let mut candidates: Vec<&Irrep> = sp.degrees.iter().flat_map(|t| t.keys()).collect();
    candidates.sort();
    candidates.dedup();
    let mut ctx = kspec::InducedContext::new(member, &d.k_x(), &d.character.base_weight).map_err(err)?;
    let mut rows = Vec::new();
    let mut text = format!("{}\n", datum_text(&d));
    for sigma in candidates {
        let m = ctx.multiplicity(sigma).map_err(err)?;
        text.push_str(&format!("{} mult={m}\n", irrep_text(sigma)));
        rows.push(json!({ "sigma": sigma, "mult": m }));
    }
    Ok(Report::ok(json!({ "datum": datum_json(&d), "group": sp.group_name(), "rows": rows }), text))
}

pub fn check_l3(pair: &DualPairSpec, o: &Opts) -> Res {
    require_g(o)?;
    let seed = o.seed()?;
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut all_ok = true;
    for orbit in orbits_on(pair, Side::G, o)? {
        let a = kspec::orbit_ring_series(&orbit, o.max_deg, seed).map_err(err)?;
        let b = kspec::transfer_series(pair, &a, o.max_deg).map_err(err)?;
        let lifted = lift::lift_orbit(&orbit).map_err(err)?;
        // A second seed keeps the two oracle runs independent.
        let c = kspec::orbit_ring_series(&lifted, o.max_deg, seed.wrapping_add(1)).map_err(err)?;
        let ok = kspec::series_equal_upto(&b, &c, o.max_deg);
        all_ok &= ok;
        text.push_str(&format!(
            "{} -> {} transferred={:?} lifted={:?} {}\n",
            orbit.diagram,
            lifted.diagram,
            b.dims(),
            c.dims(),
            status(ok)
        ));
        rows.push(json!({
            "orbit": orbit.diagram.to_string(),
            "lift": lifted.diagram.to_string(),
            "transferred": b.to_json(),
            "lifted": c.to_json(),
            "status": status(ok),
        }));
    }
    text.push_str(&format!("{}\n", status(all_ok)));
    let json = json!({ "pair": pair.to_string(), "max_deg": o.max_deg, "seed": seed, "orbits": rows, "status": status(all_ok) });
    Ok(Report { json, text, counterexample: !all_ok })
}

/// On the pair excluded for one-dimensional characters the comparison is
/// reported but does not count as a counterexample.
pub fn check_tf(pair: &DualPairSpec, o: &Opts) -> Res {
    require_g(o)?;
    let excluded = pair.excluded_dagger(true);
    let mut reports = Vec::new();
    let mut text = String::new();
    let mut all_ok = true;
    for orbit in orbits_on(pair, Side::G, o)? {
        let r = kspec::tf_check(&orbit, 2 * o.max_deg).map_err(err)?;
        all_ok &= r.passed;
        let bad = r.rows.iter().filter(|x| x.transferred != x.induced).count();
        text.push_str(&format!("{} rows={} mismatches={bad} {}\n", orbit.diagram, r.rows.len(), status(r.passed)));
        reports.push(r);
    }
    let overall = if all_ok {
        "PASS"
    } else if excluded {
        "REPORTED"
    } else {
        "FAIL"
    };
    text.push_str(&format!("{overall}\n"));
    let json = json!({ "pair": pair.to_string(), "excluded": excluded, "reports": reports, "status": overall });
    Ok(Report { json, text, counterexample: overall == "FAIL" })
}

pub fn check_p4(pair: &DualPairSpec, o: &Opts) -> Res {
    let (name, a) = source_series(pair, o)?;
    let b = kspec::transfer_series(pair, &a, o.max_deg).map_err(err)?;
    let mut targets: Vec<&Irrep> = b.degrees.iter().flat_map(|t| t.keys()).collect();
    targets.sort();
    targets.dedup();
    let mut rows = Vec::new();
    let mut text = format!("source {name}\n");
    let mut all_ok = true;
    for sp in targets {
        let (lhs, rhs) = kspec::p4_multiplicity_check(pair, &a, sp, o.max_deg).map_err(err)?;
        all_ok &= lhs == rhs;
        text.push_str(&format!("{} lhs={lhs} rhs={rhs} {}\n", irrep_text(sp), status(lhs == rhs)));
        rows.push(json!({ "sigma_prime": sp, "lhs": lhs, "rhs": rhs }));
    }
    text.push_str(&format!("{}\n", status(all_ok)));
    let json = json!({ "pair": pair.to_string(), "source": name, "rows": rows, "status": status(all_ok) });
    Ok(Report { json, text, counterexample: !all_ok })
}
