//! Quantities of interest of a network and its tissue fields, running means
//! over repeated runs, histograms and CSV tables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::FlowState;
use crate::geometry::DomainBox;
use crate::network::VascularNetwork;
use crate::oxygen::OxygenState;
use crate::tissue_grid::TissueGrid;
use crate::units::pa_to_mmhg;

/// Total length (m), lateral area (m²), volume (m³) and segment count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NetworkCharacteristics {
    pub length: f64,
    pub area: f64,
    pub volume: f64,
    pub segments: usize,
}

pub fn network_characteristics(net: &VascularNetwork) -> NetworkCharacteristics {
    let mut c = NetworkCharacteristics::default();
    for s in net.segments() {
        let l = net.segment_length(s.id);
        c.length += l;
        c.area += 2.0 * std::f64::consts::PI * s.radius * l;
        c.volume += std::f64::consts::PI * s.radius * s.radius * l;
    }
    c.segments = net.segment_count();
    c
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub bin_width: f64,
    /// Bin index k covers `[k·w, (k+1)·w)`.
    pub bins: BTreeMap<i64, usize>,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator); 0 for one value.
    pub std: f64,
}

impl Histogram {
    pub fn lower_edge(&self, bin: i64) -> f64 {
        bin as f64 * self.bin_width
    }
}

pub fn histogram(values: &[f64], bin_width: f64) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::Validation("histogram of an empty sample".into()));
    }
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::Validation(format!("bin width must be positive, got {bin_width}")));
    }
    let mut bins = BTreeMap::new();
    for &v in values {
        if !v.is_finite() {
            return Err(Error::Validation("histogram of non-finite value".into()));
        }
        *bins.entry((v / bin_width).floor() as i64).or_insert(0) += 1;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(Histogram { bin_width, bins, mean, std })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TissueAverages {
    /// mmHg.
    pub po2_roi: f64,
    /// mmHg.
    pub p_t_roi: f64,
    /// µg/s.
    pub f_tv: f64,
}

pub fn tissue_averages(grid: &TissueGrid, flow: &FlowState, oxy: &OxygenState, roi: &DomainBox) -> TissueAverages {
    TissueAverages {
        po2_roi: grid.region_average(&oxy.po2_t, roi),
        p_t_roi: pa_to_mmhg(grid.region_average(&flow.p_t, roi)),
        f_tv: flow.f_tv,
    }
}

/// The eight reported quantities of one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStatistics {
    pub length: f64,
    pub area: f64,
    pub volume: f64,
    pub segments: usize,
    pub po2_roi: f64,
    pub p_t_roi: f64,
    pub f_tv: f64,
    pub iterations: usize,
}

pub const QUANTITY_NAMES: [&str; 8] = ["L", "A", "V", "N_seg", "PO2_roi", "p_t_roi", "F_tv", "N_it"];

impl RunStatistics {
    pub fn new(net: &VascularNetwork, tissue: TissueAverages, iterations: usize) -> Self {
        let c = network_characteristics(net);
        Self {
            length: c.length,
            area: c.area,
            volume: c.volume,
            segments: c.segments,
            po2_roi: tissue.po2_roi,
            p_t_roi: tissue.p_t_roi,
            f_tv: tissue.f_tv,
            iterations,
        }
    }

    pub fn values(&self) -> [f64; 8] {
        [
            self.length,
            self.area,
            self.volume,
            self.segments as f64,
            self.po2_roi,
            self.p_t_roi,
            self.f_tv,
            self.iterations as f64,
        ]
    }

    fn cells(&self) -> [String; 8] {
        let v = self.values();
        std::array::from_fn(|q| match q {
            3 => self.segments.to_string(),
            7 => self.iterations.to_string(),
            _ => format!("{:e}", v[q]),
        })
    }
}

/// Prefix means `q_{m_i}` for every quantity; row i − 1 holds `q_{m_i}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunningMeans {
    pub rows: Vec<[f64; 8]>,
}

pub fn running_means(samples: &[RunStatistics]) -> Result<RunningMeans> {
    if samples.is_empty() {
        return Err(Error::Validation("running means need at least one sample".into()));
    }
    let mut rows = Vec::with_capacity(samples.len());
    let mut m = [0.0; 8];
    for (i, s) in samples.iter().enumerate() {
        let v = s.values();
        for q in 0..8 {
            m[q] += (v[q] - m[q]) / (i + 1) as f64;
        }
        rows.push(m);
    }
    Ok(RunningMeans { rows })
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// One row per run: `label,L,A,V,N_seg,PO2_roi,p_t_roi,F_tv,N_it`.
pub fn statistics_csv(rows: &[(String, RunStatistics)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["run"];
    header.extend(QUANTITY_NAMES);
    w.write_record(&header).map_err(csv_err)?;
    for (label, s) in rows {
        let mut rec = vec![label.clone()];
        rec.extend(s.cells());
        w.write_record(&rec).map_err(csv_err)?;
    }
    finish(w)
}

/// Quantities as rows, one column per labelled run.
pub fn table_csv(columns: &[(String, RunStatistics)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["quantity".to_string()];
    header.extend(columns.iter().map(|c| c.0.clone()));
    w.write_record(&header).map_err(csv_err)?;
    let cells: Vec<[String; 8]> = columns.iter().map(|c| c.1.cells()).collect();
    for (q, name) in QUANTITY_NAMES.iter().enumerate() {
        let mut rec = vec![name.to_string()];
        rec.extend(cells.iter().map(|c| c[q].clone()));
        w.write_record(&rec).map_err(csv_err)?;
    }
    finish(w)
}

pub fn running_means_csv(means: &RunningMeans) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["i"];
    header.extend(QUANTITY_NAMES);
    w.write_record(&header).map_err(csv_err)?;
    for (i, row) in means.rows.iter().enumerate() {
        let mut rec = vec![(i + 1).to_string()];
        rec.extend(row.iter().map(|v| format!("{v:e}")));
        w.write_record(&rec).map_err(csv_err)?;
    }
    finish(w)
}

pub fn histogram_csv(h: &Histogram) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["lower", "upper", "count"]).map_err(csv_err)?;
    for (&k, &c) in &h.bins {
        let lo = h.lower_edge(k);
        w.write_record([format!("{lo:e}"), format!("{:e}", lo + h.bin_width), c.to_string()])
            .map_err(csv_err)?;
    }
    finish(w)
}

pub fn characteristics_csv(c: &NetworkCharacteristics) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["quantity", "value", "unit"]).map_err(csv_err)?;
    w.write_record(["L", &format!("{:e}", c.length), "m"]).map_err(csv_err)?;
    w.write_record(["A", &format!("{:e}", c.area), "m^2"]).map_err(csv_err)?;
    w.write_record(["V", &format!("{:e}", c.volume), "m^3"]).map_err(csv_err)?;
    w.write_record(["N_seg", &c.segments.to_string(), ""]).map_err(csv_err)?;
    finish(w)
}

/// The PO2_roi value of every solving growth step.
pub fn trace_csv(steps: &[crate::growth::StepRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for s in steps {
        w.serialize(s).map_err(csv_err)?;
    }
    finish(w)
}
