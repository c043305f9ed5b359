use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use serde::Deserialize;

use super::output::{Cell, Report};
use super::{CohomologyCommand, Command, Config, HeightArgs, SzpiroCommand, TiltCommand};
use crate::adelic::{
    beltrami_at, distance, global_frobenius, hyperplane_check, lstar_act,
    mutate_tate_parameters, normalization_coordinate, Alpha, Arithmeticoid, ArithmeticoidJson,
    TateSymbol,
};
use crate::arith::{format_rational, parse_rational};
use crate::cohomology::{
    collate, kummer_class, tate_class, AdelicClass, AdelicClassJson, Transform,
};
use crate::error::{Error, Result};
use crate::heights::{
    arithmetic_degree, default_sample, height, principal_divisor, stabilized_height, Frobenioid,
    Ideloid, ProjectivePoint,
};
use crate::numfield::{places_up_to, product_formula_check, FieldElement, NumberField, Place};
use crate::rng::seeded;
use crate::szpiro::{
    cor312_experiment, height_q, lift, log_theta_lattice, schottky, theta_exponents,
    theta_values, UnivCoverElt,
};
use crate::tilt::{
    artin_hasse, artin_hasse_rational, evaluate_series, parse_exponent, teichmueller_lift,
    FiniteField, HahnSeries,
};

pub fn execute(cmd: &Command, cfg: &Config) -> Result<Report> {
    match cmd {
        Command::Places { bound } => places(cfg, *bound),
        Command::Height(a) => height_cmd(cfg, a),
        Command::StabilizedHeight(a) => stabilized_cmd(cfg, a),
        Command::Orbit {
            x,
            m_min,
            m_max,
            bound,
        } => orbit(cfg, x.as_deref(), *m_min, *m_max, *bound),
        Command::ProductFormula { x } => product_formula(cfg, x),
        Command::Distance {
            m1,
            m2,
            x1,
            x2,
            a,
            b,
        } => distance_cmd(cfg, (*m1, x1.as_deref(), a.as_deref()), (*m2, x2.as_deref(), b.as_deref())),
        Command::PeriodMap {
            frobenius,
            bound,
            x,
        } => period_map_cmd(cfg, *frobenius, *bound, x),
        Command::Frobenioid { x, frobenius } => frobenioid_cmd(cfg, x, *frobenius),
        Command::Degree {
            place,
            order,
            x,
            frobenius,
        } => degree_cmd(cfg, place.as_deref(), order, x.as_deref(), *frobenius),
        Command::Cohomology(c) => cohomology_cmd(cfg, c),
        Command::Tilt(c) => tilt_cmd(cfg, c),
        Command::Szpiro(c) => szpiro_cmd(cfg, c),
        Command::Mutate { params, r } => mutate_cmd(params, *r),
    }
}

fn element(field: NumberField, text: &str) -> Result<FieldElement> {
    FieldElement::parse(field, text)
}

fn field_meta(r: Report, cfg: &Config) -> Report {
    r.meta("field", cfg.field.spec_string())
}

fn read_arithmeticoid(path: &Path) -> Result<Arithmeticoid> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Arithmeticoid::from_json(&serde_json::from_str::<ArithmeticoidJson>(&text)?)
}

/// `φ^m(x · y₀)`, or the arithmeticoid stored at `path`.
fn build_point(
    cfg: &Config,
    m: i64,
    act: Option<&str>,
    path: Option<&Path>,
) -> Result<Arithmeticoid> {
    let base = match path {
        Some(p) => {
            let y = read_arithmeticoid(p)?;
            if y.field() != cfg.field {
                return Err(Error::FieldMismatch(format!("{} vs {}", y.field(), cfg.field)));
            }
            y
        }
        None => Arithmeticoid::standard(cfg.field),
    };
    let mut label = base.label().to_string();
    let acted = match act {
        Some(x) => {
            label = format!("({x})*{label}");
            lstar_act(&element(cfg.field, x)?, &base)?
        }
        None => base,
    };
    if m != 0 {
        label = format!("phi^{m}({label})");
    }
    Ok(global_frobenius(&acted, m).with_label(label))
}

fn places(cfg: &Config, bound: u64) -> Result<Report> {
    let mut r = field_meta(Report::new("places", &["place", "p", "e", "f"]), cfg)
        .meta("bound", bound);
    for v in places_up_to(cfg.field, bound)? {
        r.push(vec![
            v.label().into(),
            v.prime().map_or(Cell::from("-"), Cell::from),
            (v.e() as u64).into(),
            (v.f() as u64).into(),
        ]);
    }
    Ok(r)
}

fn height_cmd(cfg: &Config, a: &HeightArgs) -> Result<Report> {
    let y = build_point(cfg, a.frobenius, a.act.as_deref(), a.arithmeticoid.as_deref())?;
    let coords = a
        .z
        .iter()
        .map(|s| element(cfg.field, s))
        .collect::<Result<Vec<_>>>()?;
    let point = if coords.len() == 1 {
        ProjectivePoint::scalar(&coords[0])
    } else {
        ProjectivePoint::new(coords)?
    };
    let rep = height(&y, &point)?;
    let mut r = field_meta(
        Report::new("height", &["place", "alpha", "log_abs", "exponent", "contribution"]),
        cfg,
    )
    .meta("arithmeticoid", y.label().to_string())
    .meta("point", a.z.join(":"))
    .meta("total", rep.total);
    for c in &rep.contributions {
        r.push(vec![
            c.place.label().into(),
            c.alpha.clone().into(),
            c.log_abs.into(),
            c.exponent.clone().unwrap_or_else(|| "-".into()).into(),
            c.contribution.into(),
        ]);
    }
    Ok(r)
}

fn stabilized_cmd(cfg: &Config, a: &HeightArgs) -> Result<Report> {
    let y = build_point(cfg, a.frobenius, a.act.as_deref(), a.arithmeticoid.as_deref())?;
    if a.z.len() != 1 {
        return Err(Error::InvalidArgument("stabilized height takes one --z".into()));
    }
    let z = element(cfg.field, &a.z[0])?;
    let s = stabilized_height(&y, &z, &default_sample(cfg.field))?;
    let mut r = field_meta(Report::new("stabilized-height", &["quantity", "value"]), cfg)
        .meta("arithmeticoid", y.label().to_string())
        .meta("z", a.z[0].clone())
        .meta("sample_size", s.sample_size)
        .meta("argmax", s.argmax.clone())
        .meta("strict", s.strict);
    r.push(vec!["height".into(), s.base.into()]);
    r.push(vec!["stabilized".into(), s.value.into()]);
    r.require(s.value >= s.base);
    Ok(r)
}

fn orbit(cfg: &Config, x: Option<&str>, m_min: i64, m_max: i64, bound: u64) -> Result<Report> {
    if m_min > m_max {
        return Err(Error::InvalidArgument("m-min exceeds m-max".into()));
    }
    let start = build_point(cfg, 0, x, None)?;
    let mut r = field_meta(
        Report::new("orbit", &["m", "place", "beltrami", "alpha", "distance_to_start"]),
        cfg,
    )
    .meta("start", x.unwrap_or("1").to_string());
    let places = places_up_to(cfg.field, bound)?;
    for m in m_min..=m_max {
        let y = global_frobenius(&start, m);
        let d = distance(&start, &y)?;
        let alpha = normalization_coordinate(&y);
        for v in &places {
            let (belt, a) = match v {
                Place::Archimedean => (
                    Cell::Float(crate::adelic::s_at(&y)),
                    Cell::Float(alpha.archimedean()),
                ),
                _ => (
                    format_rational(&beltrami_at(&y, *v)).into(),
                    match alpha.alpha(*v) {
                        Alpha::Exact(q) => format_rational(&q).into(),
                        Alpha::Real(f) => f.into(),
                    },
                ),
            };
            r.push(vec![m.into(), v.label().into(), belt, a, d.into()]);
        }
    }
    Ok(r)
}

fn product_formula(cfg: &Config, x: &str) -> Result<Report> {
    let xe = element(cfg.field, x)?;
    let rep = product_formula_check(&xe)?;
    let mut r = field_meta(
        Report::new("product-formula", &["p", "finite_exponent_sum", "archimedean_exponent"]),
        cfg,
    )
    .meta("x", x.to_string())
    .meta("archimedean_log", rep.archimedean_log)
    .meta("exact_cancellation", rep.exact_cancellation)
    .meta("residual", rep.residual);
    let primes: std::collections::BTreeSet<u64> = rep
        .finite_exponent_sum
        .keys()
        .chain(rep.archimedean_exponents.keys())
        .copied()
        .collect();
    for p in primes {
        let f = rep.finite_exponent_sum.get(&p).cloned().unwrap_or_else(BigRational::zero);
        let a = rep.archimedean_exponents.get(&p).cloned().unwrap_or_else(BigRational::zero);
        r.push(vec![p.into(), format_rational(&f).into(), format_rational(&a).into()]);
    }
    r.require(rep.exact_cancellation && rep.residual < 1e-9);
    Ok(r)
}

type PointSpec<'a> = (i64, Option<&'a str>, Option<&'a Path>);

fn distance_cmd(cfg: &Config, a: PointSpec, b: PointSpec) -> Result<Report> {
    let y1 = build_point(cfg, a.0, a.1, a.2)?;
    let y2 = build_point(cfg, b.0, b.1, b.2)?;
    let d = distance(&y1, &y2)?;
    let mut r = field_meta(Report::new("distance", &["first", "second", "distance"]), cfg);
    r.push(vec![y1.label().to_string().into(), y2.label().to_string().into(), d.into()]);
    Ok(r)
}

fn period_map_cmd(cfg: &Config, m: i64, bound: u64, xs: &[String]) -> Result<Report> {
    let y = global_frobenius(&Arithmeticoid::standard(cfg.field), m);
    let pm = crate::adelic::period_map(&y);
    let mut r = field_meta(
        Report::new("period-map", &["place", "alpha"]),
        cfg,
    )
    .meta("arithmeticoid", y.label().to_string())
    .meta("all_ones", pm.is_all_ones());
    let alpha = pm.coordinate();
    for v in places_up_to(cfg.field, bound)? {
        let a = match alpha.alpha(v) {
            Alpha::Exact(q) => format_rational(&q).into(),
            Alpha::Real(f) => f.into(),
        };
        r.push(vec![v.label().into(), a]);
    }
    for x in xs {
        let h = hyperplane_check(&y, &element(cfg.field, x)?)?;
        r = r
            .meta(&format!("hyperplane[{x}].exact"), h.exact_cancellation)
            .meta(&format!("hyperplane[{x}].residual"), h.residual);
        r.require(h.exact_cancellation);
    }
    Ok(r)
}

fn frobenioid_cmd(cfg: &Config, x: &str, m: i64) -> Result<Report> {
    let xe = element(cfg.field, x)?;
    let y = global_frobenius(&Arithmeticoid::standard(cfg.field), m);
    let div = principal_divisor(&xe)?;
    let val = Frobenioid::value_divisor(&y, &xe)?;
    let mut r = field_meta(
        Report::new("frobenioid", &["place", "ord", "value_coefficient"]),
        cfg,
    )
    .meta("x", x.to_string())
    .meta("arithmeticoid", y.label().to_string())
    .meta("effective", div.is_effective());
    for (v, k) in div.entries() {
        r.push(vec![
            v.label().into(),
            k.to_string().into(),
            format_rational(&val.coefficient(v)).into(),
        ]);
    }
    Ok(r)
}

fn degree_cmd(
    cfg: &Config,
    place: Option<&str>,
    order: &str,
    x: Option<&str>,
    m: i64,
) -> Result<Report> {
    let y = global_frobenius(&Arithmeticoid::standard(cfg.field), m);
    let mut ideloid = match place {
        Some(label) => Ideloid::at_place(
            cfg.field,
            Place::parse_label(cfg.field, label)?,
            parse_rational(order)?,
        )?,
        None => Ideloid::trivial(cfg.field),
    };
    if let Some(x) = x {
        ideloid = Ideloid::principal(&element(cfg.field, x)?)?.mul(&ideloid)?;
    }
    let d = arithmetic_degree(&y, &ideloid)?;
    let mut r = field_meta(Report::new("degree", &["p", "log_p_coefficient"]), cfg)
        .meta("arithmeticoid", y.label().to_string())
        .meta("archimedean", d.archimedean)
        .meta("total", d.total);
    for (p, c) in d.net_exponents() {
        r.push(vec![p.into(), format_rational(&c).into()]);
    }
    Ok(r)
}

fn parse_pair(text: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || Error::Parse(format!("expected `re,im`, got {text:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    Ok((
        parts[0].parse().map_err(|_| bad())?,
        parts[1].parse().map_err(|_| bad())?,
    ))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CollateInput {
    classes: BTreeMap<String, AdelicClassJson>,
    transforms: Vec<Transform>,
}

fn class_rows(r: &mut Report, index: usize, c: &AdelicClass) {
    for k in c.classes().values() {
        let (a, b) = k.unit_tag().coords();
        r.push(vec![
            index.into(),
            k.place().label().into(),
            k.order_part().to_string().into(),
            format!("{a}+{b}w").into(),
        ]);
    }
}

fn cohomology_cmd(cfg: &Config, c: &CohomologyCommand) -> Result<Report> {
    let cols = ["class", "place", "order_part", "unit_tag"];
    match c {
        CohomologyCommand::Kummer { x, place, n } => {
            let v = Place::parse_label(cfg.field, place)?;
            let k = kummer_class(&element(cfg.field, x)?, &v, *n)?;
            let mut r = field_meta(Report::new("cohomology kummer", &cols), cfg)
                .meta("x", x.clone())
                .meta("n", *n as u64)
                .meta("trivial", k.is_trivial());
            let c = AdelicClass::trivial(cfg.field).with_class(k.clone());
            class_rows(&mut r, 0, &c);
            if c.classes().is_empty() {
                r.push(vec![0usize.into(), place.clone().into(), "0".into(), "1+0w".into()]);
            }
            Ok(r)
        }
        CohomologyCommand::TateClass { params, tau, n } => {
            let (re, im) = parse_pair(tau)?;
            let tau = Complex64::new(re, im);
            let q = schottky(tau)?;
            let mut semistable = Vec::new();
            for p in params {
                let (label, value) = p
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("expected place=q, got {p:?}")))?;
                semistable.push((
                    Place::parse_label(cfg.field, label)?,
                    element(cfg.field, value)?,
                ));
            }
            let c = tate_class(cfg.field, &semistable, q, *n)?;
            let mut r = field_meta(Report::new("cohomology tate-class", &cols), cfg)
                .meta("n", *n as u64)
                .meta("schottky_re", q.re)
                .meta("schottky_im", q.im)
                .meta("integral", crate::cohomology::bloch_kato_member(&c));
            class_rows(&mut r, 0, &c);
            Ok(r)
        }
        CohomologyCommand::Collate { input } => {
            let text = std::fs::read_to_string(input)
                .map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
            let parsed: CollateInput = serde_json::from_str(&text)?;
            let mut classes = BTreeMap::new();
            for (label, j) in &parsed.classes {
                classes.insert(label.clone(), AdelicClass::from_json(j)?);
            }
            let out = collate(&classes, &parsed.transforms)?;
            let mut r = Report::new("cohomology collate", &cols).meta("count", out.len());
            for (i, c) in out.iter().enumerate() {
                class_rows(&mut r, i, c);
            }
            Ok(r)
        }
    }
}

/// `c*t^e + …` with integer `c` read in the prime field; a bare `t^e` has
/// coefficient one and a bare integer has exponent zero.
fn parse_hahn(field: std::sync::Arc<FiniteField>, text: &str, cap: crate::tilt::Exponent) -> Result<HahnSeries> {
    let mut terms = Vec::new();
    for raw in text.split('+') {
        let term: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
        if term.is_empty() {
            return Err(Error::Parse(format!("empty term in {text:?}")));
        }
        let (coeff, exp) = match term.split_once('t') {
            None => (term.as_str(), "0"),
            Some((c, rest)) => {
                let c = c.strip_suffix('*').unwrap_or(c);
                let e = match rest.strip_prefix('^') {
                    Some(e) => e,
                    None if rest.is_empty() => "1",
                    None => return Err(Error::Parse(format!("bad term {term:?}"))),
                };
                (if c.is_empty() { "1" } else { c }, e)
            }
        };
        let c: i64 = coeff
            .parse()
            .map_err(|_| Error::Parse(format!("bad coefficient {coeff:?}")))?;
        terms.push((parse_exponent(exp)?, field.from_int(c)));
    }
    Ok(HahnSeries::from_terms(field, terms, cap))
}

fn tilt_cmd(cfg: &Config, c: &TiltCommand) -> Result<Report> {
    match c {
        TiltCommand::Eval { p, a } => {
            let field = FiniteField::get(*p, cfg.coeff_degree)?;
            let x = parse_hahn(field, a, cfg.hahn_cap)?;
            let v = x
                .valuation()
                .ok_or_else(|| Error::InvalidArgument("AH(0) = 1 needs no evaluation".into()))?;
            let degree = (cfg.hahn_cap / v).ceil().to_integer().max(1) as usize;
            let ah = artin_hasse(*p, degree, cfg.padic_precision)?;
            let y = evaluate_series(&ah, &x)?;
            let mut r = Report::new("tilt eval", &["exponent", "coefficient"])
                .meta("p", *p)
                .meta("k", cfg.coeff_degree)
                .meta("cap", y.cap().to_string())
                .meta("input", a.clone());
            for (e, c) in y.terms() {
                let coeffs: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                r.push(vec![e.to_string().into(), format!("[{}]", coeffs.join(" ")).into()]);
            }
            let one = HahnSeries::one(y.field().clone(), y.cap());
            let diff = y.sub(&one)?;
            r.require(diff.valuation() == x.valuation());
            Ok(r)
        }
        TiltCommand::ArtinHasse { p, degree } => {
            let exact = artin_hasse_rational(*p, *degree);
            let reduced = artin_hasse(*p, *degree, cfg.padic_precision);
            let mut r = Report::new("tilt artin-hasse", &["n", "exact", "mod_p^N"])
                .meta("p", *p)
                .meta("N", cfg.padic_precision as u64);
            let integral = reduced.is_ok();
            for (n, q) in exact.iter().enumerate() {
                let red = match &reduced {
                    Ok(s) => s.coeff(n).to_string(),
                    Err(_) => "-".into(),
                };
                r.push(vec![n.into(), format_rational(q).into(), red.into()]);
            }
            r.require(integral);
            Ok(r)
        }
        TiltCommand::WittCheck { p, count } => {
            let field = FiniteField::get(*p, cfg.coeff_degree)?;
            let n = cfg.witt_length;
            let mut rng = seeded(cfg.seed);
            let mut r = Report::new("tilt witt-check", &["identity", "samples", "failures"])
                .meta("seed", cfg.seed)
                .meta("p", *p)
                .meta("witt_length", n);
            let (mut mult, mut comm, mut dist) = (0usize, 0usize, 0usize);
            for _ in 0..*count {
                let mut draw = || {
                    HahnSeries::random_positive(field.clone(), &mut rng, cfg.hahn_cap, 3, &[1, 2, 3])
                };
                let (a, b, c) = (draw(), draw(), draw());
                let (ta, tb, tc) = (
                    teichmueller_lift(&a, n)?,
                    teichmueller_lift(&b, n)?,
                    teichmueller_lift(&c, n)?,
                );
                let tab = teichmueller_lift(&a.mul(&b)?.truncate(cfg.hahn_cap), n)?;
                if !ta.mul(&tb)?.eq_within_precision(&tab) {
                    mult += 1;
                }
                if !ta.add(&tb)?.eq_within_precision(&tb.add(&ta)?) {
                    comm += 1;
                }
                let lhs = ta.mul(&tb.add(&tc)?)?;
                let rhs = ta.mul(&tb)?.add(&ta.mul(&tc)?)?;
                if !lhs.eq_within_precision(&rhs) {
                    dist += 1;
                }
            }
            for (name, f) in [
                ("teichmueller_multiplicative", mult),
                ("addition_commutative", comm),
                ("distributive", dist),
            ] {
                r.push(vec![name.into(), (*count).into(), f.into()]);
            }
            r.require(mult + comm + dist == 0);
            Ok(r)
        }
    }
}

fn parse_matrix(text: &str) -> Result<[[f64; 2]; 2]> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse(format!("expected `a,b,c,d`, got {text:?}")))?;
    if v.len() != 4 {
        return Err(Error::Parse(format!("expected four entries, got {}", v.len())));
    }
    Ok([[v[0], v[1]], [v[2], v[3]]])
}

fn random_sl2(rng: &mut crate::rng::LabRng) -> [[f64; 2]; 2] {
    let (theta, s, x): (f64, f64, f64) = (
        rng.gen_range(0.0..std::f64::consts::TAU),
        rng.gen_range(-1.5..1.5),
        rng.gen_range(-2.0..2.0),
    );
    let k = crate::szpiro::rotation(theta);
    let a = [[s.exp(), 0.0], [0.0, (-s).exp()]];
    let n = [[1.0, x], [0.0, 1.0]];
    crate::szpiro::mat_mul(&k, &crate::szpiro::mat_mul(&a, &n))
}

fn szpiro_cmd(cfg: &Config, c: &SzpiroCommand) -> Result<Report> {
    match c {
        SzpiroCommand::Height { matrix, winding } => {
            let e = lift(parse_matrix(matrix)?, *winding)?;
            let h = height_q(&e, cfg.grid)?;
            let mut r = Report::new("szpiro height", &["quantity", "value"])
                .meta("matrix", matrix.clone())
                .meta("winding", *winding)
                .meta("grid", cfg.grid);
            r.push(vec!["lift0".into(), e.lift0.into()]);
            r.push(vec!["height".into(), h.value.into()]);
            r.push(vec!["error".into(), h.error.into()]);
            Ok(r)
        }
        SzpiroCommand::Subadd { count } => {
            let mut rng = seeded(cfg.seed);
            let mut r = Report::new("szpiro subadd", &["i", "h12", "h1_plus_h2", "tolerance", "ok"])
                .meta("seed", cfg.seed)
                .meta("grid", cfg.grid);
            let mut all = true;
            for i in 0..*count {
                let w1 = rng.gen_range(-2..=2);
                let w2 = rng.gen_range(-2..=2);
                let e1 = lift(random_sl2(&mut rng), w1)?;
                let e2 = lift(random_sl2(&mut rng), w2)?;
                let h1 = height_q(&e1, cfg.grid)?;
                let h2 = height_q(&e2, cfg.grid)?;
                let h12 = height_q(&e1.compose(&e2), cfg.grid)?;
                let tol = h1.error + h2.error + 1e-12;
                let ok = h12.value <= h1.value + h2.value + tol;
                all &= ok;
                r.push(vec![
                    i.into(),
                    h12.value.into(),
                    (h1.value + h2.value).into(),
                    tol.into(),
                    ok.into(),
                ]);
            }
            r.require(all);
            Ok(r)
        }
        SzpiroCommand::Theta { tau, ell } => {
            let (re, im) = parse_pair(tau)?;
            let tau = Complex64::new(re, im);
            let q = schottky(tau)?;
            let mut r = Report::new("szpiro theta", &["j", "exponent", "re", "im", "abs"])
                .meta("tau", format!("{re},{im}"))
                .meta("ell", *ell)
                .meta("q_re", q.re)
                .meta("q_im", q.im);
            let exps = theta_exponents(*ell)?;
            for (j, (e, v)) in exps.iter().zip(theta_values(tau, *ell)?).enumerate() {
                r.push(vec![
                    (j + 1).into(),
                    e.to_string().into(),
                    v.re.into(),
                    v.im.into(),
                    v.norm().into(),
                ]);
            }
            Ok(r)
        }
        SzpiroCommand::Cor312 {
            ell,
            punctures,
            genus,
            count,
        } => {
            let mut r = Report::new("szpiro cor312", &["seed", "lhs", "mid", "rhs", "pass"])
                .meta("seed", cfg.seed)
                .meta("ell", *ell)
                .meta("genus", *genus)
                .meta("punctures", *punctures)
                .meta("grid", cfg.grid);
            let mut all = true;
            for i in 0..*count {
                let (row, _) = cor312_experiment(cfg.seed + i, *ell, *genus, *punctures, cfg.grid)?;
                all &= row.pass;
                r.push(vec![
                    row.seed.into(),
                    row.lhs.into(),
                    row.mid.into(),
                    row.rhs.into(),
                    row.pass.into(),
                ]);
            }
            r.require(all);
            Ok(r)
        }
        SzpiroCommand::Lattice {
            n_min,
            n_max,
            m_min,
            m_max,
            ell,
        } => {
            let lat = log_theta_lattice(*n_min..=*n_max, *m_min..=*m_max, *ell, cfg.seed)?;
            let mut r = Report::new("szpiro lattice", &["label", "base", "n", "m", "height_sum"])
                .meta("seed", cfg.seed)
                .meta("ell", *ell)
                .meta("grid", cfg.grid);
            for e in &lat {
                let h: f64 = e
                    .elements
                    .iter()
                    .map(|x: &UnivCoverElt| height_q(x, cfg.grid).map(|h| h.value))
                    .sum::<Result<f64>>()?;
                r.push(vec![
                    e.label.clone().into(),
                    e.project().to_string().into(),
                    e.n.into(),
                    e.m.into(),
                    h.into(),
                ]);
            }
            Ok(r)
        }
    }
}

fn mutate_cmd(params: &[String], r: usize) -> Result<Report> {
    let symbols = params
        .iter()
        .map(|p| {
            let (label, abs) = p
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected label=|q|, got {p:?}")))?;
            Ok(TateSymbol {
                label: label.trim().to_string(),
                abs: parse_rational(abs)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rep = mutate_tate_parameters(&symbols, r)?;
    let mut out = Report::new("mutate", &["label", "abs_before", "abs_after", "mutated", "admissible"])
        .meta("r", r)
        .meta("inadmissible", rep.inadmissible_count)
        .meta("requires_fresh_parameters", rep.requires_fresh_parameters);
    for e in &rep.entries {
        out.push(vec![
            e.label.clone().into(),
            format_rational(&e.abs_before).into(),
            format_rational(&e.abs_after).into(),
            e.mutated.into(),
            e.admissible.into(),
        ]);
    }
    Ok(out)
}
