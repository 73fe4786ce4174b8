//! Survey CSV ingestion and emission.
//!
//! Fixed header `id,salary,t_2.5,t_4,t_10,t_20,B_0.05,...,B_1,
//! detention_hours`; times in hours, `inf` marks a refusal in the delay
//! columns, and an empty cell is a missing answer. Malformed rows are
//! collected into an error report rather than silently dropped.

use std::io::{Read, Write};

use deterrence_core::estimate::{DelayAnswer, SurveyResponse};

use crate::CliError;

pub const SURVEY_HEADER: [&str; 16] = [
    "id",
    "salary",
    "t_2.5",
    "t_4",
    "t_10",
    "t_20",
    "B_0.05",
    "B_0.1",
    "B_0.25",
    "B_0.5",
    "B_0.75",
    "B_0.9",
    "B_0.95",
    "B_0.98",
    "B_1",
    "detention_hours",
];

#[derive(Clone, Debug, serde::Serialize)]
pub struct RowError {
    /// 1-based data row number (excluding the header).
    pub row: usize,
    pub message: String,
}

/// Parses the survey CSV, returning valid responses and per-row errors.
pub fn parse_survey<R: Read>(reader: R) -> Result<(Vec<SurveyResponse>, Vec<RowError>), CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    {
        let headers = rdr
            .headers()
            .map_err(|e| CliError::Validation(format!("survey header: {e}")))?;
        let got: Vec<&str> = headers.iter().collect();
        if got != SURVEY_HEADER {
            return Err(CliError::Validation(format!(
                "survey header mismatch: expected {:?}, got {:?}",
                SURVEY_HEADER, got
            )));
        }
    }
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let row_no = idx + 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                errors.push(RowError {
                    row: row_no,
                    message: format!("unreadable row: {e}"),
                });
                continue;
            }
        };
        match parse_row(&record) {
            Ok(resp) => match resp.validate() {
                Ok(()) => rows.push(resp),
                Err(e) => errors.push(RowError {
                    row: row_no,
                    message: e.to_string(),
                }),
            },
            Err(message) => errors.push(RowError {
                row: row_no,
                message,
            }),
        }
    }
    Ok((rows, errors))
}

fn parse_row(record: &csv::StringRecord) -> Result<SurveyResponse, String> {
    if record.len() != SURVEY_HEADER.len() {
        return Err(format!(
            "expected {} fields, got {}",
            SURVEY_HEADER.len(),
            record.len()
        ));
    }
    let field = |i: usize| record.get(i).unwrap_or("");
    let opt_f64 = |i: usize| -> Result<Option<f64>, String> {
        let raw = field(i);
        if raw.is_empty() {
            return Ok(None);
        }
        raw.parse::<f64>()
            .map(Some)
            .map_err(|_| format!("column `{}`: not a number: {raw:?}", SURVEY_HEADER[i]))
    };

    let id = field(0).to_string();
    if id.is_empty() {
        return Err("empty id".into());
    }
    let salary = opt_f64(1)?;

    // the delay section is either fully answered (with `inf` refusals) or
    // fully skipped
    let mut delay_cells = Vec::with_capacity(4);
    #[allow(clippy::needless_range_loop)]
    for i in 2..6 {
        let raw = field(i);
        if raw.is_empty() {
            delay_cells.push(None);
        } else if raw.eq_ignore_ascii_case("inf") {
            delay_cells.push(Some(DelayAnswer::Infinite));
        } else {
            let t = raw.parse::<f64>().map_err(|_| {
                format!(
                    "column `{}`: not a number or `inf`: {raw:?}",
                    SURVEY_HEADER[i]
                )
            })?;
            delay_cells.push(Some(DelayAnswer::Finite(t)));
        }
    }
    let delays = if delay_cells.iter().all(Option::is_none) {
        None
    } else if delay_cells.iter().all(Option::is_some) {
        let mut arr = [DelayAnswer::Infinite; 4];
        for (slot, cell) in arr.iter_mut().zip(&delay_cells) {
            *slot = cell.unwrap();
        }
        Some(arr)
    } else {
        return Err("delay section must be fully answered or fully empty".into());
    };

    let mut fines = [None; 9];
    for (j, slot) in fines.iter_mut().enumerate() {
        *slot = opt_f64(6 + j)?;
    }
    let detention_hours = opt_f64(15)?;

    Ok(SurveyResponse {
        id,
        salary,
        delays,
        fines,
        detention_hours,
    })
}

/// Writes responses back out in the canonical format; inverse of
/// [`parse_survey`] for valid rows.
pub fn write_survey<W: Write>(responses: &[SurveyResponse], writer: W) -> Result<(), CliError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(SURVEY_HEADER)
        .map_err(|e| CliError::Validation(format!("csv write: {e}")))?;
    for resp in responses {
        let mut fields: Vec<String> = Vec::with_capacity(16);
        fields.push(resp.id.clone());
        fields.push(fmt_opt(resp.salary));
        match &resp.delays {
            None => fields.extend(std::iter::repeat_n(String::new(), 4)),
            Some(delays) => {
                for d in delays {
                    fields.push(match d {
                        DelayAnswer::Finite(t) => format!("{t}"),
                        DelayAnswer::Infinite => "inf".into(),
                    });
                }
            }
        }
        for b in &resp.fines {
            fields.push(fmt_opt(*b));
        }
        fields.push(fmt_opt(resp.detention_hours));
        wtr.write_record(&fields)
            .map_err(|e| CliError::Validation(format!("csv write: {e}")))?;
    }
    wtr.flush()?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}
