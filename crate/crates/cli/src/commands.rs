use num_complex::Complex64;
use rayon::prelude::*;

use lhsphere::decay::{self, DecayRequest, DecayResult};
use lhsphere::figures::{self, closed_grid, GridPoint, Preset};
use lhsphere::mie::coefficient;
use lhsphere::rays::{focusing_metric, trace_fan, Vec2};
use lhsphere::resonance::{
    asymptotic_z, default_orders, n_max, scan_order, ModeKind, ScanDiagnostic, ScanSpec, ORDER_CAP,
};
use lhsphere::{AtomSite, Medium, Orientation, Polarization, SphereSystem, Transition};

use crate::args::{
    FigureArgs, FigureName, KaRange, KindFilter, MediaArgs, MieArgs, ModesArgs, Quantity, RatesArgs, RaysArgs, Vary,
};
use crate::error::CliError;
use crate::output::{Cell, Meta, Table};
use crate::svg;

pub const MAX_STEPS: usize = 10_000_000;

pub struct Output {
    pub table: Table,
    pub svg: Option<String>,
}

impl From<Table> for Output {
    fn from(table: Table) -> Self {
        Output { table, svg: None }
    }
}

fn warn(msg: impl std::fmt::Display) {
    eprintln!("warning: {msg}");
}

pub fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("{}{}{}j", c.re, if c.im < 0.0 { "-" } else { "+" }, c.im.abs())
    }
}

fn media(m: &MediaArgs) -> Result<(Medium, Medium), CliError> {
    Ok((Medium::new(m.eps1, m.mu1)?, Medium::new(m.eps2, m.mu2)?))
}

fn echo_media(meta: &mut Meta, interior: &Medium, exterior: &Medium) {
    meta.push("eps1", fmt_complex(interior.epsilon()));
    meta.push("mu1", fmt_complex(interior.mu()));
    meta.push("eps2", fmt_complex(exterior.epsilon()));
    meta.push("mu2", fmt_complex(exterior.mu()));
}

fn ka_grid(k: &KaRange) -> Result<Vec<f64>, CliError> {
    if k.steps > MAX_STEPS {
        return Err(CliError::Usage(format!(
            "--steps must be at most {MAX_STEPS}, got {}",
            k.steps
        )));
    }
    if !(k.ka_min > 0.0) {
        return Err(CliError::Usage(format!("--ka-min must be positive, got {}", k.ka_min)));
    }
    Ok(closed_grid(k.ka_min, k.ka_max, k.steps)?)
}

fn center_label(c: Option<(Polarization, u32)>) -> String {
    c.map(|(pol, n)| format!("{}{n}", pol.label())).unwrap_or_default()
}

struct RateJob {
    quantities: Vec<Quantity>,
    rel_tol: f64,
    n_cap: u32,
}

impl RateJob {
    fn eval(&self, q: Quantity, sys: &SphereSystem, rho: f64) -> lhsphere::Result<DecayResult> {
        let (transition, orientation, average) = match q {
            Quantity::E1Radial => (Transition::E1, Orientation::Radial, false),
            Quantity::E1Tangential => (Transition::E1, Orientation::Tangential, false),
            Quantity::M1Radial => (Transition::M1, Orientation::Radial, false),
            Quantity::M1Tangential => (Transition::M1, Orientation::Tangential, false),
            Quantity::E1Average => (Transition::E1, Orientation::Radial, true),
            Quantity::M1Average => (Transition::M1, Orientation::Radial, true),
        };
        let mut req = DecayRequest::new(*sys, AtomSite::new(rho, transition, orientation)?);
        req.rel_tol = self.rel_tol;
        req.n_cap = self.n_cap;
        if average {
            decay::orientation_averaged(&req)
        } else {
            decay::decay_rate(&req)
        }
    }

    /// `[ka, rho, quantities.., n_used, resonant]`; failures become NaN cells.
    fn row(&self, interior: &Medium, exterior: &Medium, ka: f64, rho: f64) -> (Vec<Cell>, Vec<String>) {
        let mut cells = vec![Cell::Num(ka), Cell::Num(rho)];
        let mut warnings = Vec::new();
        let mut n_used = 0;
        let mut resonant: Vec<(Polarization, u32)> = Vec::new();
        let sys = SphereSystem::new(*interior, *exterior, ka);
        for &q in &self.quantities {
            match sys.as_ref().map_err(Clone::clone).and_then(|s| self.eval(q, s, rho)) {
                Ok(r) => {
                    cells.push(Cell::Num(r.ratio));
                    n_used = n_used.max(r.n_used);
                    for t in r.resonant_terms {
                        if !resonant.contains(&t) {
                            resonant.push(t);
                        }
                    }
                }
                Err(e) => {
                    cells.push(Cell::Num(f64::NAN));
                    warnings.push(format!("ka = {ka}, rho = {rho}: {}: {e}", q.column()));
                }
            }
        }
        resonant.sort();
        let resonant: Vec<String> = resonant.into_iter().map(|c| center_label(Some(c))).collect();
        cells.push(Cell::from(n_used));
        cells.push(Cell::Text(resonant.join(";")));
        (cells, warnings)
    }

    fn columns(&self) -> Vec<&'static str> {
        let mut cols = vec!["ka", "rho"];
        cols.extend(self.quantities.iter().map(Quantity::column));
        cols.extend(["n_used", "resonant"]);
        cols
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= decay::MAX_REL_TOL) {
            return Err(CliError::Usage(format!(
                "--rel-tol must lie in (0, {:e}], got {}",
                decay::MAX_REL_TOL,
                self.rel_tol
            )));
        }
        if self.n_cap == 0 {
            return Err(CliError::Usage("--n-cap must be at least 1".into()));
        }
        Ok(())
    }
}

fn lossy_notice(interior: &Medium, exterior: &Medium) {
    if !(interior.is_lossless() && exterior.is_lossless()) {
        warn("absorbing media: ratios include non-radiative losses and the host normalization is nominal");
    }
}

fn emit(warnings: Vec<Vec<String>>) {
    for w in warnings.into_iter().flatten() {
        warn(w);
    }
}

pub fn rates(a: &RatesArgs) -> Result<Output, CliError> {
    let (interior, exterior) = media(&a.media)?;
    let mut quantities = Vec::new();
    let wanted = if a.only.is_empty() {
        vec![
            Quantity::E1Radial,
            Quantity::E1Tangential,
            Quantity::M1Radial,
            Quantity::M1Tangential,
        ]
    } else {
        a.only.clone()
    };
    for q in wanted {
        if !quantities.contains(&q) {
            quantities.push(q);
        }
    }
    let job = RateJob {
        quantities,
        rel_tol: a.rel_tol,
        n_cap: a.n_cap,
    };
    job.validate()?;

    let points: Vec<(f64, f64)> = match a.vary {
        Vary::Ka => {
            AtomSite::new(a.rho, Transition::E1, Orientation::Radial)?;
            ka_grid(&a.ka)?.into_iter().map(|x| (x, a.rho)).collect()
        }
        Vary::Rho => {
            if a.ka.steps > MAX_STEPS {
                return Err(CliError::Usage(format!("--steps must be at most {MAX_STEPS}")));
            }
            SphereSystem::new(interior, exterior, a.ka_fixed)?;
            AtomSite::new(a.rho_min, Transition::E1, Orientation::Radial)?;
            closed_grid(a.rho_min, a.rho_max, a.ka.steps)?
                .into_iter()
                .map(|r| (a.ka_fixed, r))
                .collect()
        }
    };

    let mut meta = Meta::new("rates");
    echo_media(&mut meta, &interior, &exterior);
    match a.vary {
        Vary::Ka => {
            meta.push("vary", "ka");
            meta.num("ka_min", a.ka.ka_min);
            meta.num("ka_max", a.ka.ka_max);
            meta.num("rho", a.rho);
        }
        Vary::Rho => {
            meta.push("vary", "rho");
            meta.num("rho_min", a.rho_min);
            meta.num("rho_max", a.rho_max);
            meta.num("ka", a.ka_fixed);
        }
    }
    meta.push("steps", a.ka.steps);
    meta.num("rel_tol", a.rel_tol);
    meta.push("n_cap", a.n_cap);
    lossy_notice(&interior, &exterior);

    let results: Vec<(Vec<Cell>, Vec<String>)> = points
        .par_iter()
        .map(|&(ka, rho)| job.row(&interior, &exterior, ka, rho))
        .collect();
    let mut table = Table::new(meta, &job.columns());
    let mut warnings = Vec::new();
    for (cells, w) in results {
        table.rows.push(cells);
        warnings.push(w);
    }
    emit(warnings);
    Ok(table.into())
}

fn mie_cells(interior: &Medium, exterior: &Medium, pol: Polarization, n: u32, ka: f64) -> (Vec<Cell>, Option<String>) {
    match SphereSystem::new(*interior, *exterior, ka).and_then(|s| coefficient(pol, n, &s)) {
        Ok(c) => (
            vec![
                Cell::Num(c.value.re),
                Cell::Num(c.value.im),
                Cell::Num(c.value.norm()),
                Cell::Num(c.denominator_abs()),
                Cell::Int(c.resonant as i64),
            ],
            None,
        ),
        Err(e) => (
            vec![
                Cell::Num(f64::NAN),
                Cell::Num(f64::NAN),
                Cell::Num(f64::NAN),
                Cell::Num(f64::NAN),
                Cell::Int(0),
            ],
            Some(format!("ka = {ka}: {} n = {n}: {e}", pol.label())),
        ),
    }
}

pub fn mie(a: &MieArgs) -> Result<Output, CliError> {
    let (interior, exterior) = media(&a.media)?;
    if a.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let grid = ka_grid(&a.ka)?;
    let pol: Polarization = a.pol.into();
    let mut meta = Meta::new("mie");
    echo_media(&mut meta, &interior, &exterior);
    meta.push("polarization", pol.label());
    meta.push("n", a.n);
    meta.num("ka_min", a.ka.ka_min);
    meta.num("ka_max", a.ka.ka_max);
    meta.push("steps", a.ka.steps);

    let results: Vec<_> = grid
        .par_iter()
        .map(|&ka| mie_cells(&interior, &exterior, pol, a.n, ka))
        .collect();
    let mut table = Table::new(meta, &["ka", "re", "im", "abs", "den_abs", "resonant"]);
    for (ka, (cells, w)) in grid.iter().zip(results) {
        let mut row = vec![Cell::Num(*ka)];
        row.extend(cells);
        table.rows.push(row);
        if let Some(w) = w {
            warn(w);
        }
    }
    Ok(table.into())
}

pub fn modes(a: &ModesArgs) -> Result<Output, CliError> {
    let (interior, exterior) = media(&a.media)?;
    if !(a.ka_min > 0.0 && a.ka_max > a.ka_min && a.ka_max.is_finite()) {
        return Err(CliError::Usage(format!(
            "mode window needs 0 < --ka-min < --ka-max, got [{}, {}]",
            a.ka_min, a.ka_max
        )));
    }
    if a.grid < 3 {
        return Err(CliError::Usage("--grid must be at least 3".into()));
    }
    let (defaults, diagnostic) = default_orders(&interior, &exterior);
    let lo = a.n_min.unwrap_or(*defaults.start()).max(1);
    let mut hi = match a.n_max {
        Some(v) => v,
        None => {
            if let Some(ScanDiagnostic::CapReached { requested }) = diagnostic {
                let requested = if requested == u32::MAX {
                    "unbounded".to_string()
                } else {
                    requested.to_string()
                };
                warn(format!("order range clamped at {ORDER_CAP} (wanted {requested})"));
            }
            *defaults.end()
        }
    };
    if hi > ORDER_CAP {
        warn(format!("order range clamped at {ORDER_CAP} (wanted {hi})"));
        hi = ORDER_CAP;
    }
    let mut pols: Vec<Polarization> = a.pol.iter().map(|&p| p.into()).collect();
    pols.sort();
    pols.dedup();
    let left_handed = interior.handedness().is_left_handed();
    let filter = match a.kind {
        KindFilter::Auto if left_handed => KindFilter::Surface,
        KindFilter::Auto => KindFilter::All,
        k => k,
    };

    let mut meta = Meta::new("modes");
    echo_media(&mut meta, &interior, &exterior);
    meta.num("ka_min", a.ka_min);
    meta.num("ka_max", a.ka_max);
    meta.push("grid", a.grid);
    meta.push("orders", format!("{lo}..={hi}"));
    meta.push(
        "polarizations",
        pols.iter().map(Polarization::label).collect::<Vec<_>>().join(","),
    );
    meta.push(
        "kind",
        match filter {
            KindFilter::Surface => "surface",
            KindFilter::Volume => "volume",
            _ => "all",
        },
    );
    for pol in [Polarization::Tm, Polarization::Te] {
        let value = match n_max(pol, &interior, &exterior) {
            Ok(v) => format!("{v}"),
            Err(_) => "diverges".into(),
        };
        meta.push(&format!("n_max_{}", pol.label().to_lowercase()), value);
    }

    let mut spec = ScanSpec::new(interior, exterior, a.ka_min, a.ka_max);
    spec.grid_points = a.grid;
    spec.polarizations = pols.clone();
    let jobs: Vec<(Polarization, u32)> = pols.iter().flat_map(|&p| (lo..=hi).map(move |n| (p, n))).collect();
    let found: Vec<_> = jobs.par_iter().map(|&(pol, n)| scan_order(&spec, pol, n)).collect();

    let mut table = Table::new(
        meta,
        &[
            "pol",
            "n",
            "kind",
            "asym_re_z",
            "asym_q",
            "re_z",
            "im_z",
            "q",
            "residual",
            "iterations",
        ],
    );
    for (modes, diagnostics) in found {
        for d in diagnostics {
            if let ScanDiagnostic::SignViolation {
                polarization,
                order,
                z_root,
            } = d
            {
                warn(format!(
                    "{}{order} root at {} has the wrong sign of Im z for this handedness",
                    polarization.label(),
                    fmt_complex(z_root)
                ));
            }
        }
        for m in modes {
            let keep = match filter {
                KindFilter::Surface => m.kind == ModeKind::Surface,
                KindFilter::Volume => m.kind == ModeKind::Volume,
                _ => true,
            };
            if !keep {
                continue;
            }
            let asym = asymptotic_z(m.polarization, m.order, &interior, &exterior);
            table.rows.push(vec![
                Cell::from(m.polarization.label()),
                Cell::from(m.order),
                Cell::from(m.kind.label()),
                Cell::Num(asym.map_or(f64::NAN, |e| e.re_z)),
                Cell::Num(asym.map_or(f64::NAN, |e| e.q_factor())),
                Cell::Num(m.z_root.re),
                Cell::Num(m.z_root.im),
                Cell::Num(m.q_factor.unwrap_or(f64::NAN)),
                Cell::Num(m.residual),
                Cell::from(m.iterations),
            ]);
        }
    }
    Ok(table.into())
}

fn ray_output(
    command: &str,
    interior: &Medium,
    exterior: &Medium,
    source: Vec2,
    fan: u32,
    bounces: u32,
) -> Result<Output, CliError> {
    let paths = trace_fan(source, interior, exterior, fan, bounces)?;
    let mut meta = Meta::new(command);
    echo_media(&mut meta, interior, exterior);
    meta.num("source_x", source.x);
    meta.num("source_y", source.y);
    meta.push("fan", fan);
    meta.push("bounces", bounces);
    meta.push(
        "focusing_metric",
        focusing_metric(&paths).map_or("undefined".to_string(), |m| format!("{m:.16e}")),
    );
    let svg = svg::render(&paths, source, &meta);
    let mut table = Table::new(meta, &["ray", "vertex", "x", "y", "termination"]);
    for (i, path) in paths.iter().enumerate() {
        for (j, p) in path.points.iter().enumerate() {
            table.rows.push(vec![
                Cell::Int(i as i64),
                Cell::Int(j as i64),
                Cell::Num(p.x),
                Cell::Num(p.y),
                Cell::from(path.termination.label()),
            ]);
        }
    }
    Ok(Output { table, svg: Some(svg) })
}

pub fn rays(a: &RaysArgs) -> Result<Output, CliError> {
    let (interior, exterior) = media(&a.media)?;
    ray_output(
        "rays",
        &interior,
        &exterior,
        Vec2::new(a.source_x, a.source_y),
        a.fan,
        a.bounces,
    )
}

fn preset(name: FigureName) -> Preset {
    match name {
        FigureName::Fig2 => Preset::Fig2,
        FigureName::Fig3 => Preset::Fig3,
        FigureName::Fig4 => Preset::Fig4,
        FigureName::Fig5 => Preset::Fig5,
        FigureName::Fig6 => Preset::Fig6,
    }
}

pub fn is_ray_figure(name: FigureName) -> bool {
    matches!(name, FigureName::Fig2 | FigureName::Fig3)
}

pub fn figure(a: &FigureArgs) -> Result<Output, CliError> {
    let p = preset(a.name);
    let command = format!("figure {}", p.name());
    match p {
        Preset::Fig2 | Preset::Fig3 => {
            let r = figures::ray_preset(p).expect("ray preset");
            ray_output(&command, &r.interior, &r.exterior, r.source, r.fan_count, r.max_bounces)
        }
        Preset::Fig4 => fig4(&command),
        Preset::Fig5 | Preset::Fig6 => rate_figure(&command, p),
    }
}

fn grid_meta(meta: &mut Meta, points: &[GridPoint]) {
    meta.num("ka_min", figures::KA_MIN);
    meta.num("ka_max", figures::KA_MAX);
    meta.push("ka_steps", figures::KA_STEPS);
    meta.push("centers", points.iter().filter(|g| g.center.is_some()).count());
}

fn fig4(command: &str) -> Result<Output, CliError> {
    let curves = figures::fig4_curves()?;
    let mut meta = Meta::new(command);
    for c in &curves {
        meta.push(&format!("{}_eps1", c.label), fmt_complex(c.interior.epsilon()));
        meta.push(&format!("{}_mu1", c.label), fmt_complex(c.interior.mu()));
    }
    meta.push("eps2", 1);
    meta.push("mu2", 1);
    meta.push("polarization", "TE");
    meta.push("n", 8);
    grid_meta(&mut meta, &curves[0].points);
    let mut table = Table::new(meta, &["curve", "ka", "p_re", "p_im", "p_abs", "center"]);
    for c in &curves {
        let results: Vec<_> = c
            .points
            .par_iter()
            .map(|g| mie_cells(&c.interior, &c.exterior, c.polarization, c.order, g.x))
            .collect();
        for (g, (cells, w)) in c.points.iter().zip(results) {
            let mut row = vec![Cell::from(c.label), Cell::Num(g.x)];
            row.extend(cells.into_iter().take(3));
            row.push(Cell::Text(center_label(g.center)));
            table.rows.push(row);
            if let Some(w) = w {
                warn(w);
            }
        }
    }
    Ok(table.into())
}

fn rate_figure(command: &str, p: Preset) -> Result<Output, CliError> {
    let sweep = figures::rate_sweep(p)?;
    let quantities = match sweep.transition {
        Transition::E1 => vec![Quantity::E1Radial, Quantity::E1Tangential],
        Transition::M1 => vec![Quantity::M1Radial, Quantity::M1Tangential],
    };
    let job = RateJob {
        quantities,
        rel_tol: decay::DEFAULT_REL_TOL,
        n_cap: decay::DEFAULT_ORDER_CAP,
    };
    let mut meta = Meta::new(command);
    echo_media(&mut meta, &sweep.interior, &sweep.exterior);
    meta.num("rho", sweep.rho);
    grid_meta(&mut meta, &sweep.points);
    meta.num("rel_tol", job.rel_tol);
    meta.push("n_cap", job.n_cap);
    let results: Vec<_> = sweep
        .points
        .par_iter()
        .map(|g| job.row(&sweep.interior, &sweep.exterior, g.x, sweep.rho))
        .collect();
    let mut columns = job.columns();
    columns.push("center");
    let mut table = Table::new(meta, &columns);
    let mut warnings = Vec::new();
    for (g, (mut cells, w)) in sweep.points.iter().zip(results) {
        cells.push(Cell::Text(center_label(g.center)));
        table.rows.push(cells);
        warnings.push(w);
    }
    emit(warnings);
    Ok(table.into())
}
