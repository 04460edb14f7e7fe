//! Heatmap matrices and the Granger table.

use std::io::Write;

use super::cell::DependenceCell;
use crate::series::ScoreKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeatmapStatistic {
    R,
    U,
}

impl HeatmapStatistic {
    pub const ALL: [HeatmapStatistic; 2] = [HeatmapStatistic::R, HeatmapStatistic::U];

    pub fn tag(&self) -> &'static str {
        match self {
            HeatmapStatistic::R => "r",
            HeatmapStatistic::U => "u",
        }
    }

    fn value(&self, cell: &DependenceCell) -> Option<f64> {
        match self {
            HeatmapStatistic::R => cell.r,
            HeatmapStatistic::U => cell.valid_u(),
        }
    }
}

pub fn heatmap_file_name(stat: HeatmapStatistic, kind: ScoreKind) -> String {
    format!("heatmap_{}_{}.csv", stat.tag(), kind.tag())
}

/// Row and column labels in first-appearance order.
pub fn axes(cells: &[DependenceCell]) -> (Vec<String>, Vec<String>) {
    let mut aspects: Vec<String> = Vec::new();
    let mut tickers: Vec<String> = Vec::new();
    for c in cells {
        if !aspects.contains(&c.aspect) {
            aspects.push(c.aspect.clone());
        }
        if !tickers.contains(&c.ticker) {
            tickers.push(c.ticker.clone());
        }
    }
    (aspects, tickers)
}

/// Writes an aspect × ticker matrix of one statistic for one score kind.
/// Values have 3 decimals; nulls and invalid `u` are empty.
pub fn emit_heatmap<W: Write>(
    out: W,
    cells: &[DependenceCell],
    stat: HeatmapStatistic,
    kind: ScoreKind,
    aspects: &[String],
    tickers: &[String],
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["aspect".to_string()];
    header.extend(tickers.iter().cloned());
    w.write_record(&header)?;
    for aspect in aspects {
        let mut row = vec![aspect.clone()];
        for ticker in tickers {
            let v = cells
                .iter()
                .find(|c| c.kind == kind && &c.aspect == aspect && &c.ticker == ticker)
                .and_then(|c| stat.value(c));
            row.push(v.map(|v| format!("{v:.3}")).unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Causal cells grouped by ticker (in `tickers` order), each group sorted by
/// p-value, then aspect, then kind.
pub fn emit_granger_table<W: Write>(out: W, cells: &[DependenceCell], tickers: &[String]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["ticker", "aspect", "kind", "f_stat", "p_value"])?;
    for ticker in tickers {
        let mut rows: Vec<&DependenceCell> =
            cells.iter().filter(|c| &c.ticker == ticker && c.granger_causal == Some(true)).collect();
        rows.sort_by(|a, b| {
            let (pa, pb) = (a.granger_p.unwrap_or(1.0), b.granger_p.unwrap_or(1.0));
            pa.total_cmp(&pb).then_with(|| a.aspect.cmp(&b.aspect)).then_with(|| a.kind.cmp(&b.kind))
        });
        for c in rows {
            let f = c.granger_f.map(|v| v.to_string()).unwrap_or_default();
            let p = c.granger_p.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([ticker.as_str(), c.aspect.as_str(), c.kind.tag(), f.as_str(), p.as_str()])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<DependenceCell> {
        let mut cells = Vec::new();
        for a in ["inflation", "economy"] {
            for k in ScoreKind::ALL {
                for t in ["SHEL", "NEE"] {
                    cells.push(DependenceCell::empty(a, k, t));
                }
            }
        }
        cells
    }

    #[test]
    fn injected_value_renders_in_place() {
        let mut cells = grid();
        let c = cells
            .iter_mut()
            .find(|c| c.aspect == "inflation" && c.ticker == "NEE" && c.kind == ScoreKind::AbsPositive)
            .unwrap();
        c.r = Some(-0.731);
        let (aspects, tickers) = axes(&cells);
        let mut buf = Vec::new();
        emit_heatmap(&mut buf, &cells, HeatmapStatistic::R, ScoreKind::AbsPositive, &aspects, &tickers).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "aspect,SHEL,NEE\ninflation,,-0.731\neconomy,,\n");
    }

    #[test]
    fn invalid_u_is_blank() {
        let mut cells = grid();
        cells[0].u = Some(0.5);
        cells[0].u_valid = Some(false);
        cells[1].u = Some(0.159);
        cells[1].u_valid = Some(true);
        let (aspects, tickers) = axes(&cells);
        let mut buf = Vec::new();
        emit_heatmap(&mut buf, &cells, HeatmapStatistic::U, ScoreKind::AbsPositive, &aspects, &tickers).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "aspect,SHEL,NEE\ninflation,,0.159\neconomy,,\n");
    }

    #[test]
    fn granger_table_sorting() {
        let mut cells = grid();
        let mut set = |aspect: &str, kind: ScoreKind, ticker: &str, p: f64| {
            let c = cells.iter_mut().find(|c| c.aspect == aspect && c.kind == kind && c.ticker == ticker).unwrap();
            c.granger_causal = Some(true);
            c.granger_p = Some(p);
            c.granger_f = Some(9.5);
        };
        set("inflation", ScoreKind::AbsNegative, "NEE", 0.01);
        set("economy", ScoreKind::AbsPositive, "NEE", 0.01);
        set("inflation", ScoreKind::AbsPositive, "NEE", 0.001);
        set("economy", ScoreKind::NormNegative, "SHEL", 0.04);
        let mut buf = Vec::new();
        emit_granger_table(&mut buf, &cells, &["SHEL".into(), "NEE".into()]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "ticker,aspect,kind,f_stat,p_value\n\
             SHEL,economy,nfn,9.5,0.04\n\
             NEE,inflation,fp,9.5,0.001\n\
             NEE,economy,fp,9.5,0.01\n\
             NEE,inflation,fn,9.5,0.01\n"
        );
    }

    #[test]
    fn no_causal_cells_gives_header_only() {
        let mut buf = Vec::new();
        emit_granger_table(&mut buf, &grid(), &["SHEL".into()]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "ticker,aspect,kind,f_stat,p_value\n");
    }
}
