//! Report rendering. Every reported number carries 12 significant digits;
//! `state --emit` keeps full precision so the output re-parses exactly.

use clap::ValueEnum;
use entgeo::clifford::{HopfImage, MapImage2, MapImage3, Permutation};
use entgeo::measures::MeasureReport;
use entgeo::probes::{PairProbeMatrix, ProbeKind};
use entgeo::roof::{RoofOptions, RoofResult};
use entgeo::states::{state_to_json, State};
use entgeo::C64;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Rounds to 12 significant digits.
pub(crate) fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn num(x: f64) -> Value {
    json!(sig12(x))
}

fn complex(z: C64) -> Value {
    json!([sig12(z.re), sig12(z.im)])
}

fn csv_num(x: f64) -> String {
    let r = sig12(x);
    if r != 0.0 && r.abs() < 1e-4 {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn render_csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
}

fn strings<const N: usize>(items: [&str; N]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn pair_columns(pm: &PairProbeMatrix) -> Vec<String> {
    pm.pairs()
        .map(|(a, b, _)| format!("p{}_{}", a + 1, b + 1))
        .collect()
}

pub fn measure(report: &MeasureReport, format: Format) -> String {
    match format {
        Format::Json => {
            let pairs: Vec<Value> = report
                .pairs
                .pairs()
                .map(|(a, b, v)| json!({"a": a + 1, "b": b + 1, "value": num(v)}))
                .collect();
            render_json(&json!({
                "n_qubits": report.n_qubits(),
                "probe": report.probe().short_name(),
                "pairs": pairs,
                "m": num(report.m),
                "g": num(report.g),
                "normalization": num(report.normalization),
                "class": report.classification.as_str(),
                "homogeneity": report.homogeneity.as_str(),
                "tolerance": report.tolerance,
                "exceeds_unit_bound": report.exceeds_unit_bound,
            }))
        }
        Format::Csv => {
            let mut header = strings(["n_qubits", "probe"]);
            header.extend(pair_columns(&report.pairs));
            header.extend(strings([
                "m",
                "g",
                "normalization",
                "class",
                "homogeneity",
                "tolerance",
                "exceeds_unit_bound",
            ]));
            let mut row = vec![
                report.n_qubits().to_string(),
                report.probe().short_name().to_string(),
            ];
            row.extend(report.pairs.values().iter().map(|&v| csv_num(v)));
            row.extend([
                csv_num(report.m),
                csv_num(report.g),
                csv_num(report.normalization),
                report.classification.as_str().to_string(),
                report.homogeneity.as_str().to_string(),
                format!("{:e}", report.tolerance),
                report.exceeds_unit_bound.to_string(),
            ]);
            render_csv(&header, &[row])
        }
    }
}

pub enum ImageRow {
    Two(Permutation, MapImage2),
    Three(Permutation, MapImage3),
}

impl ImageRow {
    fn label(&self) -> String {
        match self {
            ImageRow::Two(p, _) | ImageRow::Three(p, _) => p.label(),
        }
    }

    fn coefficients(&self) -> Vec<(&'static str, C64)> {
        match self {
            ImageRow::Two(_, img) => vec![("c_off", img.c_off), ("c_conc", img.c_conc)],
            ImageRow::Three(_, img) => {
                vec![
                    ("c1", img.c1),
                    ("c2", img.c2),
                    ("c3", img.c3),
                    ("c4", img.c4),
                ]
            }
        }
    }

    fn z_and_k(&self) -> (f64, f64) {
        match self {
            ImageRow::Two(_, img) => (img.z, img.k_invariant()),
            ImageRow::Three(_, img) => (img.z, img.k_invariant()),
        }
    }
}

pub struct HopfOutput {
    pub n_qubits: usize,
    pub images: Vec<ImageRow>,
    pub k_invariants: Vec<f64>,
    pub meyer_wallach: f64,
    pub permutation_average: Option<f64>,
}

pub fn hopf(h: &HopfOutput, format: Format) -> String {
    match format {
        Format::Json => {
            let images: Vec<Value> = h
                .images
                .iter()
                .map(|row| {
                    let mut obj = Map::new();
                    obj.insert("permutation".into(), json!(row.label()));
                    for (name, c) in row.coefficients() {
                        obj.insert(name.into(), complex(c));
                    }
                    let (z, k) = row.z_and_k();
                    obj.insert("z".into(), num(z));
                    obj.insert("k".into(), num(k));
                    Value::Object(obj)
                })
                .collect();
            let ks: Vec<Value> = h
                .k_invariants
                .iter()
                .enumerate()
                .map(|(q, &k)| json!({"qubit": q + 1, "k": num(k)}))
                .collect();
            render_json(&json!({
                "n_qubits": h.n_qubits,
                "images": images,
                "k_invariants": ks,
                "meyer_wallach": num(h.meyer_wallach),
                "meyer_wallach_permutation_average": h.permutation_average.map(num),
            }))
        }
        Format::Csv if h.images.is_empty() => {
            let rows: Vec<Vec<String>> = h
                .k_invariants
                .iter()
                .enumerate()
                .map(|(q, &k)| vec![(q + 1).to_string(), csv_num(k)])
                .collect();
            render_csv(&strings(["qubit", "k"]), &rows)
        }
        Format::Csv => {
            let mut header = strings(["permutation"]);
            for (name, _) in h.images[0].coefficients() {
                header.push(format!("{name}_re"));
                header.push(format!("{name}_im"));
            }
            header.extend(strings(["z", "k"]));
            let rows: Vec<Vec<String>> = h
                .images
                .iter()
                .map(|row| {
                    let mut r = vec![row.label()];
                    for (_, c) in row.coefficients() {
                        r.push(csv_num(c.re));
                        r.push(csv_num(c.im));
                    }
                    let (z, k) = row.z_and_k();
                    r.push(csv_num(z));
                    r.push(csv_num(k));
                    r
                })
                .collect();
            render_csv(&header, &rows)
        }
    }
}

pub fn scott(n_qubits: usize, m: usize, q: f64, format: Format) -> String {
    match format {
        Format::Json => render_json(&json!({"n_qubits": n_qubits, "m": m, "q": num(q)})),
        Format::Csv => render_csv(
            &strings(["n_qubits", "m", "q"]),
            &[vec![n_qubits.to_string(), m.to_string(), csv_num(q)]],
        ),
    }
}

pub fn roof(n_qubits: usize, options: &RoofOptions, r: &RoofResult, format: Format) -> String {
    match format {
        Format::Json => render_json(&json!({
            "n_qubits": n_qubits,
            "probe": options.probe.short_name(),
            "average": options.average.to_string(),
            "value": num(r.value),
            "bound_kind": r.bound_kind.as_str(),
            "k": r.k,
            "restarts_used": r.restarts_used,
            "converged": r.converged,
            "initial_value": num(r.initial_value),
            "seed": options.seed,
        })),
        Format::Csv => render_csv(
            &strings([
                "n_qubits",
                "probe",
                "average",
                "value",
                "bound_kind",
                "k",
                "restarts_used",
                "converged",
                "initial_value",
                "seed",
            ]),
            &[vec![
                n_qubits.to_string(),
                options.probe.short_name().to_string(),
                options.average.to_string(),
                csv_num(r.value),
                r.bound_kind.as_str().to_string(),
                r.k.to_string(),
                r.restarts_used.to_string(),
                r.converged.to_string(),
                csv_num(r.initial_value),
                options.seed.to_string(),
            ]],
        ),
    }
}

pub fn emit_state(state: &State) -> String {
    render_json(&state_to_json(state))
}

pub fn state_summary(state: &State) -> String {
    let rho = state.density();
    let kind = match state {
        State::Pure(_) => "pure",
        State::Mixed(_) => "mixed",
    };
    render_json(&json!({
        "n_qubits": state.n_qubits(),
        "kind": kind,
        "purity": num(rho.purity()),
        "entropy": num(rho.von_neumann_entropy()),
    }))
}

pub struct SweepRow {
    pub x: f64,
    pub pairs: PairProbeMatrix,
    pub m: f64,
    pub g: f64,
}

pub fn sweep(family: &str, probe: ProbeKind, rows: &[SweepRow], format: Format) -> String {
    match format {
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let pairs: Vec<Value> = r
                        .pairs
                        .pairs()
                        .map(|(a, b, v)| json!({"a": a + 1, "b": b + 1, "value": num(v)}))
                        .collect();
                    json!({"x": num(r.x), "pairs": pairs, "m": num(r.m), "g": num(r.g)})
                })
                .collect();
            render_json(&json!({"family": family, "probe": probe.short_name(), "rows": rows}))
        }
        Format::Csv => {
            let mut header = strings(["x"]);
            if let Some(first) = rows.first() {
                header.extend(pair_columns(&first.pairs));
            }
            header.extend(strings(["m", "g"]));
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut row = vec![csv_num(r.x)];
                    row.extend(r.pairs.values().iter().map(|&v| csv_num(v)));
                    row.push(csv_num(r.m));
                    row.push(csv_num(r.g));
                    row
                })
                .collect();
            render_csv(&header, &body)
        }
    }
}
