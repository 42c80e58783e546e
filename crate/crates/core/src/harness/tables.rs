use num_bigint::BigInt;
use serde::Serialize;

use crate::bitcore::to_bits_u64;
use crate::fixtures::{
    self, SAMPLE_GAPS, SAMPLE_MAPS, SAMPLE_VALUES, TABLE1_CUMULATIVE, TABLE1_MAPS, TABLE2_VALUES,
};
use crate::opf::{eval, eval_point, validate_general, GapKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Right-aligned plain text.
    pub fn render(&self) -> String {
        let cols = self.header.len();
        let widths: Vec<usize> = (0..cols)
            .map(|c| {
                std::iter::once(&self.header)
                    .chain(&self.rows)
                    .map(|r| r[c].len())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let mut out = format!("{}\n{}\n", self.title, line(&self.header));
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellDiff {
    pub table: String,
    pub row: String,
    pub column: String,
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TablesReport {
    pub tables: Vec<Table>,
    pub diffs: Vec<CellDiff>,
}

impl TablesReport {
    pub fn identical(&self) -> bool {
        self.diffs.is_empty()
    }
}

struct Builder {
    table: Table,
    diffs: Vec<CellDiff>,
}

impl Builder {
    fn new(title: &str, header: &[&str]) -> Self {
        Builder {
            table: Table {
                title: title.into(),
                header: header.iter().map(|s| s.to_string()).collect(),
                rows: vec![],
            },
            diffs: vec![],
        }
    }

    /// Adds a row; each cell is `(got, Some(expected))` or a plain label.
    fn row(&mut self, cells: Vec<(String, Option<String>)>) {
        let key = cells[0].0.clone();
        for (i, (got, expected)) in cells.iter().enumerate() {
            if let Some(e) = expected {
                if e != got {
                    self.diffs.push(CellDiff {
                        table: self.table.title.clone(),
                        row: key.clone(),
                        column: self.table.header[i].clone(),
                        expected: e.clone(),
                        got: got.clone(),
                    });
                }
            }
        }
        self.table
            .rows
            .push(cells.into_iter().map(|(g, _)| g).collect());
    }
}

fn label(s: impl ToString) -> (String, Option<String>) {
    (s.to_string(), None)
}

fn checked<T: ToString, U: ToString>(got: T, expected: U) -> (String, Option<String>) {
    (got.to_string(), Some(expected.to_string()))
}

fn or_error<T: ToString, E: ToString>(r: Result<T, E>) -> String {
    r.map_or_else(|e| format!("error: {}", e.to_string()), |v| v.to_string())
}

fn x4(x: u64) -> String {
    format!("{x:04b}")
}

/// Regenerates the reference tables and diffs them against the stored values.
pub fn tables() -> TablesReport {
    let mut out = Vec::new();

    let f = fixtures::table1();
    let valid = validate_general(&f).is_valid();
    let cumulative = f.cumulative_gaps().unwrap_or_default();
    let mut t1 = Builder::new(
        "Per-bit maps f_i",
        &["i", "f_i(0)", "f_i(1)", "f_i(1)-f_i(0)", "sum of gaps"],
    );
    for (i, m) in f.maps().iter().enumerate() {
        let (z, o) = TABLE1_MAPS[i];
        t1.row(vec![
            label(i + 1),
            label(m.zero_val),
            label(m.one_val),
            checked(or_error(m.gap()), o - z),
            checked(
                cumulative.get(i).map_or("-".into(), |v| v.to_string()),
                TABLE1_CUMULATIVE[i],
            ),
        ]);
    }
    t1.row(vec![
        label("valid"),
        label(""),
        label(""),
        label(""),
        checked(valid, true),
    ]);
    out.push(t1);

    let mut t2 = Builder::new("F(x) over the per-bit maps", &["x", "F(x)"]);
    for (x, expected) in TABLE2_VALUES.iter().enumerate() {
        let got = eval(&f, &to_bits_u64(x as u64, Some(4)).expect("4 bits"));
        t2.row(vec![label(x4(x as u64)), checked(or_error(got), expected)]);
    }
    out.push(t2);

    let mut t3 = Builder::new(
        "Point function anchored at 1001",
        &["i", "b_i", "f_i(0)", "f_i(1)", "kind", "gap"],
    );
    let mut t4 = Builder::new("F(x) for the point function", &["x", "F(x)"]);
    match fixtures::sample_point() {
        Ok(p) => {
            let gaps = p.gaps().unwrap_or_default();
            for (i, m) in p.maps().iter().enumerate() {
                let (pos, kind, amount) = SAMPLE_GAPS[i];
                let (kind_got, amount_got) = gaps
                    .get(i)
                    .map(|g| (g.kind, g.amount.clone()))
                    .unwrap_or((GapKind::Rise, BigInt::from(0)));
                let kind_name = |k: GapKind| if k == GapKind::Rise { "rise" } else { "fall" };
                t3.row(vec![
                    label(pos),
                    label(p.anchor().bit(i + 1) as u8),
                    checked(&m.zero_val, SAMPLE_MAPS[i].0),
                    checked(&m.one_val, SAMPLE_MAPS[i].1),
                    checked(kind_name(kind_got), kind_name(kind)),
                    checked(amount_got.magnitude(), amount),
                ]);
            }
            for (x, expected) in SAMPLE_VALUES.iter().enumerate() {
                let got = eval_point(&p, &to_bits_u64(x as u64, Some(4)).expect("4 bits"));
                t4.row(vec![label(x4(x as u64)), checked(or_error(got), expected)]);
            }
        }
        Err(e) => {
            t3.row(vec![
                label("-"),
                label(""),
                label(""),
                label(""),
                label(""),
                checked(e, "ok"),
            ]);
        }
    }
    out.push(t3);
    out.push(t4);

    let diffs = out.iter().flat_map(|b| b.diffs.clone()).collect();
    TablesReport {
        tables: out.into_iter().map(|b| b.table).collect(),
        diffs,
    }
}
