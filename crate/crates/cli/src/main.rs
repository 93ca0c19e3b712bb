use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gfc_core::autgroup::{
    certify_artin_schreier, check_catalog, frobenius_orbit_action, g_orbits, g_orbits_at,
    generator_catalog,
};
use gfc_core::curves::{
    count_rational_places, curve_json, genus_report, make_curve, place_count_oracle,
    singular_locus, Family,
};
use gfc_core::equiv::{mainpgroup_identity, overlap_identity, quadrex_normalize};
use gfc_core::moebius::dickson_audit;
use gfc_core::quotients::{certify_quotient, nonsplit_quotient, split_quotient, QuotientKind};
use gfc_core::verify::{field_for_q, verify_suite, Suite, VerifyConfig};
use gfc_core::{Elem, Field, GfcError, Tower};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "gfc",
    version,
    about = "Generalized Fermat curves over finite fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    output: Output,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Markdown,
}

#[derive(Subcommand)]
enum Command {
    /// Field construction and arithmetic self-checks.
    FieldAudit {
        #[arg(long)]
        q: u64,
    },
    /// Exhaustive cyclic-subgroup audit of PGL(2, q).
    Dickson {
        #[arg(long)]
        q: u64,
    },
    /// Invariant function of the order-n cyclic action.
    Quotient {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
    Curve {
        #[command(subcommand)]
        action: CurveAction,
    },
    /// Automorphism generators and group checks (IIb1).
    Aut(CurveArgs),
    /// Orbits of <sigma1, sigma2> on the special places.
    Orbits {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long = "L")]
        l: Option<usize>,
    },
    Equiv {
        #[command(subcommand)]
        action: EquivAction,
    },
    /// Grid verification.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, value_delimiter = ',', default_value = "5,7,9,11,13")]
        qset: Vec<u64>,
        #[arg(long, default_value_t = 10)]
        max_exp: u64,
        #[arg(long, default_value_t = 3)]
        samples: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Split,
    Nonsplit,
}

#[derive(Subcommand)]
enum CurveAction {
    /// Closed-form and Riemann-Hurwitz genus.
    Genus(CurveArgs),
    /// Kummer model, genus and plane singularities.
    Show(CurveArgs),
    /// Rational place count against the brute-force oracle.
    Places {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long = "L", default_value_t = 1)]
        l: usize,
    },
}

#[derive(Subcommand)]
enum EquivAction {
    Overlap {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u64,
    },
    Mainpgroup {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        r: usize,
    },
    ArtinSchreier {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        r: usize,
    },
    Quadrex(CurveArgs),
}

/// Parameters are canonical element indices in `0..q`.
#[derive(Args, Clone)]
struct CurveArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    m: u64,
    #[arg(long)]
    a: Option<u128>,
    #[arg(long)]
    b: Option<u128>,
    #[arg(long)]
    c: Option<u128>,
    #[arg(long)]
    d: Option<u128>,
}

impl CurveArgs {
    fn build(&self) -> gfc_core::Result<gfc_core::curves::CurveSpec> {
        let family: Family = self.family.parse()?;
        let f = field_for_q(self.q)?;
        let given = [self.a, self.b, self.c, self.d];
        let k = family.arity();
        if given[..k].iter().any(Option::is_none) || given[k..].iter().any(Option::is_some) {
            let names = ["--a", "--b", "--c", "--d"];
            return Err(GfcError::InvalidParameter(format!(
                "family {family} takes exactly {}",
                names[..k].join(" ")
            )));
        }
        let params: Vec<Elem> = given[..k]
            .iter()
            .map(|v| elem(&f, v.unwrap()))
            .collect::<Result<_, _>>()?;
        make_curve(family, &f, self.n, self.m, &params)
    }
}

fn elem(f: &Arc<Field>, v: u128) -> gfc_core::Result<Elem> {
    if v >= f.order() {
        return Err(GfcError::InvalidParameter(format!(
            "element index {v} is not below q = {}",
            f.order()
        )));
    }
    Ok(f.element_at(v))
}

fn exit_code(e: &GfcError) -> u8 {
    match e {
        GfcError::DeskScaleExceeded(_)
        | GfcError::RaiseExtension(_)
        | GfcError::BoundExceeded(_) => 3,
        GfcError::InvalidParameter(_)
        | GfcError::WrongFamily { .. }
        | GfcError::ReducibleOrSingular(_)
        | GfcError::TamenessViolation(_)
        | GfcError::UnsupportedNormalForm(_)
        | GfcError::NoSuchRoot { .. }
        | GfcError::NoSuchSubgroup { .. } => 2,
        _ => 1,
    }
}

fn field_audit(q: u64) -> gfc_core::Result<(Value, bool)> {
    let f = field_for_q(q)?;
    let order = f.order();
    let g = f.primitive_root();
    let mut inverses = true;
    let mut fermat = true;
    for a in f.elements() {
        fermat &= f.pow(&a, order) == a;
        if !a.is_zero() {
            inverses &= f.mul(&a, &f.inv(&a)?) == f.one();
        }
    }
    let primitive = f.mult_order(&g)? == order - 1;
    let frob_order =
        (1..=f.degree() as u32).find(|&e| f.elements().all(|a| f.frobenius(&a, e) == a));
    let frobenius = frob_order == Some(f.degree() as u32);
    let pass = inverses && fermat && primitive && frobenius;
    Ok((
        json!({
            "field": f.descriptor(),
            "order": order,
            "primitive_root": f.rel_coords_flat(&g),
            "checks": {"inverses": inverses, "a^q = a": fermat, "primitive_root_order": primitive, "frobenius_order": frobenius},
            "pass": pass,
        }),
        pass,
    ))
}

fn quotient(q: u64, n: u64, kind: Option<Kind>) -> gfc_core::Result<(Value, bool)> {
    let f = field_for_q(q)?;
    let t = Tower::new(&f)?;
    let kind = match kind {
        Some(Kind::Split) => QuotientKind::Split,
        Some(Kind::Nonsplit) => QuotientKind::Nonsplit,
        None if (q - 1).is_multiple_of(n) => QuotientKind::Split,
        None => QuotientKind::Nonsplit,
    };
    let datum = match kind {
        QuotientKind::Split => split_quotient(&f, n)?,
        QuotientKind::Nonsplit => nonsplit_quotient(&t, n)?,
    };
    let cert = certify_quotient(&t, n, kind)?;
    let pass = cert.pass();
    Ok((
        json!({"quotient": datum.to_json(&f), "certificate": cert, "pass": pass}),
        pass,
    ))
}

fn dispatch(cmd: &Command) -> gfc_core::Result<(Value, bool, Option<String>)> {
    let plain = |(v, ok): (Value, bool)| (v, ok, None);
    Ok(match cmd {
        Command::FieldAudit { q } => plain(field_audit(*q)?),
        Command::Dickson { q } => {
            let r = dickson_audit(*q)?;
            let ok = r.pass;
            plain((serde_json::to_value(r).unwrap(), ok))
        }
        Command::Quotient { q, n, kind } => plain(quotient(*q, *n, *kind)?),
        Command::Curve { action } => match action {
            CurveAction::Genus(a) => {
                let c = a.build()?;
                let g = genus_report(&c)?;
                let ok = g.closed_form == g.rh_oracle;
                plain((
                    json!({"family": c.family, "q": c.q(), "n": c.n, "m": c.m, "closed": g.closed_form, "rh": g.rh_oracle, "pass": ok}),
                    ok,
                ))
            }
            CurveAction::Show(a) => {
                let c = a.build()?;
                let j = curve_json(&c)?;
                let ok = j.genus.closed == j.genus.rh;
                let sing: Vec<Value> = singular_locus(&c)?
                    .iter()
                    .map(|s| json!({"point": s.point, "multiplicity": s.multiplicity, "ordinary": s.ordinary}))
                    .collect();
                plain((json!({"curve": j, "plane_singularities": sing}), ok))
            }
            CurveAction::Places { curve, l } => {
                let c = curve.build()?;
                let count = count_rational_places(&c, *l)?;
                let oracle = place_count_oracle(&c, *l)?;
                plain((
                    json!({"L": l, "places": count, "oracle": oracle, "pass": count == oracle}),
                    count == oracle,
                ))
            }
        },
        Command::Aut(a) => {
            let c = a.build()?;
            let cat = generator_catalog(&c)?;
            let check = check_catalog(&c)?;
            let ok = check.pass();
            let gens: Vec<Value> = cat
                .gens
                .iter()
                .map(|(n, g)| serde_json::to_value(g.to_json(n, &cat.field)).unwrap())
                .collect();
            plain((
                json!({"working_field": cat.field.descriptor(), "generators": gens, "check": check, "pass": ok}),
                ok,
            ))
        }
        Command::Orbits { curve, l } => {
            let c = curve.build()?;
            let r = match l {
                Some(l) => g_orbits_at(&c, *l)?,
                None => g_orbits(&c)?,
            };
            let case = frobenius_orbit_action(&c, &r);
            let ok = case.is_ok()
                && r.census
                    .as_ref()
                    .is_none_or(|k| k.short_orbits_match && k.long_orbit_law);
            plain((
                json!({"report": r, "frobenius_consistent": case.is_ok()}),
                ok,
            ))
        }
        Command::Equiv { action } => match action {
            EquivAction::Overlap { q, n } => {
                let c = overlap_identity(&field_for_q(*q)?, *n)?;
                let ok = c.pass();
                plain((serde_json::to_value(c).unwrap(), ok))
            }
            EquivAction::Mainpgroup { p, r } => {
                let c = mainpgroup_identity(*p, *r)?;
                let ok = c.pass();
                plain((serde_json::to_value(c).unwrap(), ok))
            }
            EquivAction::ArtinSchreier { p, r } => {
                let c = certify_artin_schreier(*p, *r)?;
                let ok = c.pass();
                plain((serde_json::to_value(c).unwrap(), ok))
            }
            EquivAction::Quadrex(a) => {
                let r = quadrex_normalize(&a.build()?)?;
                let ok = r.pass();
                plain((serde_json::to_value(r.to_json()).unwrap(), ok))
            }
        },
        Command::Verify {
            suite,
            qset,
            max_exp,
            samples,
        } => {
            let mut cfg = VerifyConfig::new(qset.clone(), *max_exp, Suite::parse_list(suite)?);
            cfg.samples = *samples;
            let report = verify_suite(&cfg)?;
            let ok = report.pass();
            let md = report.to_markdown();
            (serde_json::to_value(&report).unwrap(), ok, Some(md))
        }
    })
}

fn value_markdown(v: &Value) -> String {
    let mut s = String::from("| key | value |\n|---|---|\n");
    if let Value::Object(map) = v {
        for (k, x) in map {
            s.push_str(&format!(
                "| {k} | {} |\n",
                x.to_string().replace('|', "\\|")
            ));
        }
    }
    s
}

fn run(cli: Cli) -> ExitCode {
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    let result = pool.install(|| dispatch(&cli.command));
    let (value, ok, md) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = match cli.output {
        Output::Json => serde_json::to_string_pretty(&value).unwrap() + "\n",
        Output::Markdown => md.unwrap_or_else(|| value_markdown(&value)),
    };
    print!("{text}");
    let _ = std::io::stdout().flush();
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    eprintln!("wall time: {:.2}s", start.elapsed().as_secs_f64());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    run(Cli::parse())
}
