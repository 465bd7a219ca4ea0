//! Text format for discrete maps.
//!
//! ```text
//! #format=reflectlab-map-1
//! #source=chyp_ball:1
//! #target=euclidean_r:1
//! #region=disk:0.9
//! #axes=-0.9:0.9:41;-0.9:0.9:41
//! #tolerance=1e-8            (optional extra keys)
//! index,boundary,x0,x1,h0
//! 20,1,0,-0.9,0.0
//! ...
//! ```
//!
//! Only active nodes are listed. Numbers use the shortest representation
//! that reads back to the same `f64`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::geometry::ModelSpace;

use super::{DiscreteMap, GridDomain, Region, SolverError};

const FORMAT: &str = "reflectlab-map-1";

pub fn write_map<W: Write>(h: &DiscreteMap, extra: &BTreeMap<String, String>, out: W) -> Result<(), SolverError> {
    let mut out = std::io::BufWriter::new(out);
    let g = h.domain();
    writeln!(out, "#format={FORMAT}")?;
    writeln!(out, "#source={}", g.source())?;
    writeln!(out, "#target={}", h.target())?;
    writeln!(out, "#region={}", g.region())?;
    writeln!(out, "#axes={}", g.describe_axes())?;
    for (k, v) in extra {
        writeln!(out, "#{k}={v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["index".to_string(), "boundary".to_string()];
    header.extend((0..g.dim()).map(|i| format!("x{i}")));
    header.extend((0..h.target_dim()).map(|a| format!("h{a}")));
    w.write_record(&header)?;
    for n in g.active_nodes() {
        let mut row = vec![n.to_string(), (g.is_boundary(n) as u8).to_string()];
        row.extend(g.coords_vec(n).iter().map(|v| v.to_string()));
        row.extend(h.value(n).iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a map written by [`write_map`], returning it with the header keys.
pub fn read_map<R: BufRead>(input: R) -> Result<(DiscreteMap, BTreeMap<String, String>), SolverError> {
    let mut header = BTreeMap::new();
    let mut body = String::new();
    for line in input.lines() {
        let line = line?;
        if let Some(kv) = line.strip_prefix('#') {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| SolverError::Format(format!("header line without `=`: {line}")))?;
            header.insert(k.trim().to_string(), v.trim().to_string());
        } else if !line.trim().is_empty() {
            body.push_str(&line);
            body.push('\n');
        }
    }
    let get = |k: &str| header.get(k).ok_or_else(|| SolverError::Format(format!("missing header key `{k}`")));
    if get("format")? != FORMAT {
        return Err(SolverError::Format(format!("unsupported format {}", get("format")?)));
    }
    let source = ModelSpace::from_descriptor(get("source")?)?;
    let target = ModelSpace::from_descriptor(get("target")?)?;
    let region = Region::parse(get("region")?).ok_or_else(|| SolverError::Format("bad region".into()))?;
    let mut bounds = Vec::new();
    let mut res = Vec::new();
    for axis in get("axes")?.split(';') {
        let parts: Vec<&str> = axis.split(':').collect();
        let bad = || SolverError::Format(format!("bad axis `{axis}`"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].parse().map_err(|_| bad())?;
        let r: usize = parts[2].parse().map_err(|_| bad())?;
        bounds.push((lo, hi));
        res.push(r);
    }
    let domain = GridDomain::new(source, bounds, res, region)?;
    let m = target.real_dim();
    let d = domain.dim();
    let mut values = vec![0.0; domain.len() * m];
    let mut seen = 0usize;
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != 2 + d + m {
            return Err(SolverError::Format(format!("row has {} fields, want {}", rec.len(), 2 + d + m)));
        }
        let bad = |s: &str| SolverError::Format(format!("bad number `{s}`"));
        let n: usize = rec[0].parse().map_err(|_| bad(&rec[0]))?;
        if n >= domain.len() || !domain.is_active(n) {
            return Err(SolverError::Format(format!("node {n} is not active on this grid")));
        }
        for a in 0..m {
            let s = &rec[2 + d + a];
            values[n * m + a] = s.parse().map_err(|_| bad(s))?;
        }
        seen += 1;
    }
    if seen != domain.active_nodes().count() {
        return Err(SolverError::Format(format!("expected one row per active node, got {seen}")));
    }
    let mut extra = header;
    for k in ["format", "source", "target", "region", "axes"] {
        extra.remove(k);
    }
    Ok((DiscreteMap::from_values(Arc::new(domain), target, values)?, extra))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn maps_round_trip(a in -0.5f64..0.5, b in -0.5f64..0.5, res in 5usize..12, half in any::<bool>()) {
            let region = if half { Region::HalfDisk { radius: 0.9 } } else { Region::Disk { radius: 0.9 } };
            let g = Arc::new(GridDomain::centered(ModelSpace::ball(1), 0.9, res, region).unwrap());
            let h = DiscreteMap::from_fn(g, ModelSpace::ball(1), |x| vec![a * x[0] + 0.1 * x[1], b * x[0] * x[1]]).unwrap();
            let mut extra = BTreeMap::new();
            extra.insert("tolerance".to_string(), "1e-6".to_string());
            let mut buf = Vec::new();
            write_map(&h, &extra, &mut buf).unwrap();
            let (back, extra_back) = read_map(buf.as_slice()).unwrap();
            prop_assert_eq!(back, h);
            prop_assert_eq!(extra_back, extra);
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_map("#format=other\n".as_bytes()).is_err());
        assert!(read_map("index,boundary\n".as_bytes()).is_err());
    }
}
