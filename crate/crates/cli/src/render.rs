//! Plain-text tables drawn from the JSON document.

use serde_json::Value;

fn cell(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => if *b { "yes" } else { "no" }.into(),
        Value::Array(items) => {
            let inner: Vec<String> = items.iter().map(cell).collect();
            format!("[{}]", inner.join(","))
        }
        Value::Object(map) => {
            let inner: Vec<String> = map
                .iter()
                .map(|(k, v)| format!("{k}:{}", cell(v)))
                .collect();
            inner.join(" ")
        }
        other => other.to_string(),
    }
}

fn grid(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let header: Vec<String> = header.iter().map(|h| h.to_string()).collect();
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    let mut out = line(&header) + &line(&rule);
    for row in rows {
        out += &line(row);
    }
    out
}

fn status(v: &Value) -> String {
    match v.get("error") {
        Some(Value::Object(e)) => format!("ERROR {}", cell(&e["message"])),
        _ => if v["pass"] == Value::Bool(true) {
            "PASS"
        } else {
            "FAIL"
        }
        .into(),
    }
}

fn verify(cases: &[Value]) -> String {
    let rows: Vec<Vec<String>> = cases
        .iter()
        .map(|c| {
            let checks = c["checks"]
                .as_object()
                .map(|m| {
                    m.iter()
                        .filter(|(_, s)| *s != "pass")
                        .map(|(k, s)| format!("{k}={}", cell(s)))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .unwrap_or_default();
            vec![
                cell(&c["key"]),
                cell(&c["window"]),
                cell(&c["top_classes"]),
                cell(&c["multiplicity"]),
                cell(&c["levi_total"]),
                cell(&c["adlv_dimension"]),
                cell(&c["max_v"]),
                cell(&c["identity_checked"]),
                checks,
                status(c),
            ]
        })
        .collect();
    grid(
        &[
            "case",
            "B",
            "top",
            "mult",
            "levi",
            "dim",
            "max|V|",
            "ordered",
            "not passed",
            "status",
        ],
        &rows,
    )
}

fn dims(cases: &[Value]) -> String {
    let rows: Vec<Vec<String>> = cases
        .iter()
        .map(|c| {
            vec![
                cell(&c["key"]),
                cell(&c["adlv_dimension"]),
                cell(&c["max_v"]),
                cell(&c["top_semimodules"]),
                cell(&c["histogram"]),
                status(c),
            ]
        })
        .collect();
    grid(
        &["case", "dim", "max|V|", "#top", "|V| histogram", "status"],
        &rows,
    )
}

fn enumerate(cases: &[Value]) -> String {
    let mut out = String::new();
    for c in cases {
        out += &format!(
            "{}  B={}  dim={}  {} semi-modules\n",
            cell(&c["key"]),
            cell(&c["window"]),
            cell(&c["adlv_dimension"]),
            c["rows"].as_array().map_or(0, Vec::len)
        );
        if let Some(Value::Object(e)) = c.get("error") {
            out += &format!("ERROR {}\n\n", cell(&e["message"]));
            continue;
        }
        let rows: Vec<Vec<String>> = c["rows"]
            .as_array()
            .into_iter()
            .flatten()
            .map(|r| {
                vec![
                    cell(&r["abar"]),
                    cell(&r["v"]),
                    cell(&r["w"]),
                    cell(&r["ordered"]),
                    cell(&r["rigid"]),
                    cell(&r["top"]),
                    cell(&r["lambda_a"]),
                ]
            })
            .collect();
        out += &grid(
            &["Ā", "|V|", "|W|", "ordered", "rigid", "top", "λ_A"],
            &rows,
        );
        out += "\n";
    }
    out
}

fn mult(cases: &[Value]) -> String {
    let rows: Vec<Vec<String>> = cases
        .iter()
        .map(|c| {
            vec![
                cell(&c["key"]),
                cell(&c["fundamentals"]),
                cell(&c["lambda"]),
                cell(&c["lhs"]),
                cell(&c["rhs"]),
                status(c),
            ]
        })
        .collect();
    grid(
        &[
            "case",
            "fundamentals",
            "λ",
            "direct",
            "decomposed",
            "status",
        ],
        &rows,
    )
}

fn lattice(cases: &[Value]) -> String {
    let mut out = String::new();
    for c in cases {
        out += &format!(
            "{}  mu={}  {}\n",
            cell(&c["key"]),
            cell(&c["mu"]),
            status(c)
        );
        let mut rows = Vec::new();
        for r in c["rows"].as_array().into_iter().flatten() {
            let head = vec![
                cell(&r["abar"]),
                cell(&r["iota"]),
                cell(&r["v"]),
                cell(&r["w"]),
                cell(&r["field_degree"]),
                cell(&r["precision"]),
                cell(&r["expected_fiber"]),
            ];
            let samples = r["samples"].as_array().cloned().unwrap_or_default();
            if samples.is_empty() {
                rows.push(
                    [
                        head.clone(),
                        vec!["-".into(), "-".into(), "-".into(), status(r)],
                    ]
                    .concat(),
                );
            }
            for s in samples {
                let ok = [
                    "semimodule_matches",
                    "criterion",
                    "membership",
                    "round_trip",
                    "json_round_trip",
                ]
                .iter()
                .all(|k| s[*k] == Value::Bool(true));
                rows.push(
                    [
                        head.clone(),
                        vec![
                            cell(&s["v_coords"]),
                            cell(&s["fiber"]),
                            cell(&s["inv"]),
                            if ok { status(r) } else { "FAIL".into() },
                        ],
                    ]
                    .concat(),
                );
            }
        }
        out += &grid(
            &[
                "Ā", "ι", "|V|", "|W|", "r", "N", "expected", "v", "fibre", "inv", "status",
            ],
            &rows,
        );
        out += "\n";
    }
    out
}

pub fn table(document: &Value) -> String {
    let report = &document["report"];
    let empty = Vec::new();
    let cases = report["cases"].as_array().unwrap_or(&empty);
    let body = match document["command"].as_str() {
        Some("verify") => verify(cases),
        Some("dims") => dims(cases),
        Some("enumerate") => enumerate(cases),
        Some("mult") => mult(cases),
        Some("lattice-check") => lattice(cases),
        _ => String::new(),
    };
    let verdict = if report["pass"] == Value::Bool(true) {
        "PASS"
    } else {
        "FAIL"
    };
    format!("{body}{} case(s): {verdict}\n", cases.len())
}
