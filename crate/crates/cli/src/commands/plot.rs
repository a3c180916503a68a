//! `plot`: turns a report into one tab-separated series file per curve and
//! an SVG chart.
//!
//! Series files have the header `x  y  ci_low  ci_high`, except gender
//! files, which have `x  member_pct  speech_char_pct`. For pair series `x`
//! is `slice_a:slice_b`; for stability it is `k`. Vocabulary overlap has no
//! interval, so both bounds equal `y`.

use std::collections::HashSet;
use std::io::Write;

use serde_json::Value;

use crate::args::{PlotArgs, PlotKind};
use crate::context::{read_text, Context};
use crate::error::{CliError, Result};
use crate::svg::{line_chart, Curve, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub file: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

fn bad(msg: impl std::fmt::Display) -> CliError {
    CliError::input(format!("malformed report: {msg}"))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing field {key:?}")))
}

fn array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    field(v, key)?
        .as_array()
        .ok_or_else(|| bad(format!("{key:?} is not a list")))
}

fn string(v: &Value, key: &str) -> Result<String> {
    field(v, key)?
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| bad(format!("{key:?} is not a string")))
}

fn number(v: &Value, key: &str) -> Result<f64> {
    let f = field(v, key)?;
    // Non-finite floats serialize as null.
    if f.is_null() {
        return Ok(f64::NAN);
    }
    f.as_f64().ok_or_else(|| bad(format!("{key:?} is not a number")))
}

fn num(x: f64) -> String {
    format!("{x:.6}")
}

/// File-name-safe form of a curve name.
fn file_stem(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '-' { c } else { '_' })
        .collect();
    let s = s.trim_matches('_').to_string();
    if s.is_empty() {
        "series".into()
    } else {
        s
    }
}

struct Builder {
    kind: PlotKind,
    used: HashSet<String>,
    series: Vec<Series>,
    curves: Vec<Curve>,
}

impl Builder {
    fn new(kind: PlotKind) -> Self {
        Self {
            kind,
            used: HashSet::new(),
            series: Vec::new(),
            curves: Vec::new(),
        }
    }

    fn file_name(&mut self, name: &str) -> String {
        let stem = format!("{}_{}", self.kind.name(), file_stem(name));
        let mut file = format!("{stem}.tsv");
        let mut n = 2;
        while !self.used.insert(file.clone()) {
            file = format!("{stem}_{n}.tsv");
            n += 1;
        }
        file
    }

    /// A curve with interval columns.
    fn banded(&mut self, name: &str, points: Vec<(String, f64, f64, f64)>) {
        let file = self.file_name(name);
        let group = self.curves.len();
        self.series.push(Series {
            file,
            header: vec!["x", "y", "ci_low", "ci_high"],
            rows: points
                .iter()
                .map(|(x, y, lo, hi)| vec![x.clone(), num(*y), num(*lo), num(*hi)])
                .collect(),
        });
        self.curves.push(Curve {
            name: name.to_string(),
            points: points
                .into_iter()
                .map(|(x, y, lo, hi)| Point {
                    x,
                    y,
                    band: (lo != hi).then_some((lo, hi)),
                })
                .collect(),
            dashed: false,
            group,
        });
    }
}

fn stability(report: &Value, b: &mut Builder) -> Result<()> {
    for r in array(report, "reports")? {
        let method = string(r, "method")?;
        let mut points = Vec::new();
        for row in array(r, "rows")? {
            let k = field(row, "k")?.as_u64().ok_or_else(|| bad("k is not an integer"))?;
            points.push((
                k.to_string(),
                number(row, "mean")?,
                number(row, "ci_low")?,
                number(row, "ci_high")?,
            ));
        }
        b.banded(&method, points);
    }
    Ok(())
}

fn pair_series(report: &Value, b: &mut Builder) -> Result<()> {
    let rows = array(field(report, "report")?, "rows")?;
    let mut words: Vec<String> = Vec::new();
    for w in array(report, "words")? {
        words.push(w.as_str().ok_or_else(|| bad("word is not a string"))?.to_string());
    }
    for word in words {
        let mut points = Vec::new();
        for row in rows {
            if string(row, "word")? != word {
                continue;
            }
            let x = format!("{}:{}", string(row, "slice_a")?, string(row, "slice_b")?);
            points.push((x, number(row, "mean")?, number(row, "ci_low")?, number(row, "ci_high")?));
        }
        if points.is_empty() {
            log::warn!("{word}: no pair to plot");
            continue;
        }
        b.banded(&word, points);
    }
    Ok(())
}

fn gender(report: &Value, b: &mut Builder) -> Result<()> {
    type PeriodShares = Vec<(String, f64, f64)>;
    let mut parties: Vec<(String, PeriodShares)> = Vec::new();
    for row in array(report, "gender")? {
        let party = string(row, "party")?;
        let point = (
            string(row, "period")?,
            number(row, "member_pct")?,
            number(row, "speech_char_pct")?,
        );
        match parties.iter_mut().find(|(p, _)| *p == party) {
            Some((_, pts)) => pts.push(point),
            None => parties.push((party, vec![point])),
        }
    }
    for (group, (party, points)) in parties.into_iter().enumerate() {
        let label = if party.is_empty() {
            "unknown party".to_string()
        } else {
            party
        };
        let file = b.file_name(&label);
        b.series.push(Series {
            file,
            header: vec!["x", "member_pct", "speech_char_pct"],
            rows: points
                .iter()
                .map(|(x, m, s)| vec![x.clone(), num(*m), num(*s)])
                .collect(),
        });
        for (dashed, suffix) in [(false, "members"), (true, "speech")] {
            b.curves.push(Curve {
                name: format!("{label} {suffix}"),
                points: points
                    .iter()
                    .map(|(x, m, s)| Point {
                        x: x.clone(),
                        y: if dashed { *s } else { *m },
                        band: None,
                    })
                    .collect(),
                dashed,
                group,
            });
        }
    }
    Ok(())
}

fn vocab_overlap(report: &Value, b: &mut Builder) -> Result<()> {
    let rows = array(report, "vocab_overlap")?;
    for stage in ["raw", "preprocessed"] {
        let mut points = Vec::new();
        for row in rows {
            let x = format!("{}:{}", string(row, "slice_a")?, string(row, "slice_b")?);
            let y = number(row, stage)?;
            points.push((x, y, y, y));
        }
        b.banded(stage, points);
    }
    Ok(())
}

/// Builds the series and chart curves of a parsed report.
pub fn build(report: &Value, kind: PlotKind) -> Result<(Vec<Series>, Vec<Curve>)> {
    let found = report.get("kind").and_then(Value::as_str).unwrap_or("unknown");
    if found != kind.report_kind() {
        return Err(CliError::input(format!(
            "plot kind {kind} needs a {} report, got a {found} report",
            kind.report_kind()
        )));
    }
    let mut b = Builder::new(kind);
    match kind {
        PlotKind::Stability => stability(report, &mut b)?,
        PlotKind::Topic | PlotKind::Party => pair_series(report, &mut b)?,
        PlotKind::Gender => gender(report, &mut b)?,
        PlotKind::VocabOverlap => vocab_overlap(report, &mut b)?,
    }
    Ok((b.series, b.curves))
}

fn labels(kind: PlotKind) -> (&'static str, &'static str) {
    match kind {
        PlotKind::Stability => ("Average intersection@k across run pairs", "intersection@k"),
        PlotKind::Topic => ("Topic similarity across consecutive slices", "cosine similarity"),
        PlotKind::Party => ("Party tag similarity across consecutive slices", "cosine similarity"),
        PlotKind::Gender => ("Female members and their share of speech", "percent"),
        PlotKind::VocabOverlap => ("Shared vocabulary of consecutive slices", "shared words"),
    }
}

pub fn plot_cmd(ctx: &Context, args: PlotArgs) -> Result<()> {
    let input = ctx.input()?;
    let kind = ctx.settings.required("kind", args.kind)?;
    let text = read_text(&input)?;
    let report: Value = serde_json::from_str(&text).map_err(|e| CliError::read(&input, e))?;
    let (series, curves) = build(&report, kind)?;
    if series.is_empty() {
        return Err(CliError::input("report has nothing to plot"));
    }
    let inputs = vec![input];
    let out = ctx.output(&inputs)?;
    for s in &series {
        out.write_with(&s.file, |w| {
            writeln!(w, "{}", s.header.join("\t"))?;
            for row in &s.rows {
                writeln!(w, "{}", row.join("\t"))?;
            }
            Ok(())
        })?;
    }
    let (title, y_label) = labels(kind);
    let svg = line_chart(title, y_label, &curves);
    out.write_with(&format!("{}.svg", kind.name()), |w| w.write_all(svg.as_bytes()))?;
    ctx.finish(&out, &inputs, false)
}
