//! Structured-grid field files.
//!
//! Binary layout:
//!
//! ```text
//! magic      8 bytes   b"CARTANFF"
//! hdr_len    u32 LE    length of the JSON header in bytes
//! header     hdr_len   UTF-8 JSON (see `FieldHeader`)
//! data       f64 LE    frame slot, then basis component, then grid samples in C order
//! ```
//!
//! The CSV export has one row per grid sample: coordinates, then every
//! coefficient channel in storage order.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::basis::{basis_masks, label};
use super::field::{FormField, ValueType};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, AXIS_NAMES};

pub const MAGIC: &[u8; 8] = b"CARTANFF";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub version: u32,
    pub name: String,
    pub dim: usize,
    pub degree: usize,
    pub value_type: ValueType,
    pub extents: Vec<[f64; 2]>,
    pub resolution: Vec<usize>,
    /// Frame slot labels in storage order.
    pub frame_slots: Vec<String>,
    /// Basis component labels in storage order.
    pub components: Vec<String>,
    pub sample_location: String,
    pub byte_order: String,
}

impl FieldHeader {
    pub fn describe(name: &str, f: &FormField) -> Self {
        let g = f.grid();
        FieldHeader {
            version: FORMAT_VERSION,
            name: name.to_string(),
            dim: g.dim(),
            degree: f.degree(),
            value_type: f.value_type(),
            extents: g.extents.clone(),
            resolution: g.resolution.clone(),
            frame_slots: f.value_type().slot_labels(),
            components: basis_masks(g.dim(), f.degree()).into_iter().map(label).collect(),
            sample_location: "cell_center".into(),
            byte_order: "little_endian_f64".into(),
        }
    }
}

pub fn write_field<W: Write>(mut w: W, name: &str, f: &FormField) -> Result<()> {
    let header = serde_json::to_vec(&FieldHeader::describe(name, f))?;
    w.write_all(MAGIC)?;
    w.write_all(&(header.len() as u32).to_le_bytes())?;
    w.write_all(&header)?;
    let mut buf = Vec::with_capacity(f.data().len() * 8);
    for v in f.data() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<(FieldHeader, FormField)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let mut header = vec![0u8; u32::from_le_bytes(len) as usize];
    r.read_exact(&mut header)?;
    let header: FieldHeader = serde_json::from_slice(&header)?;
    if header.version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {}", header.version)));
    }
    let grid = GridSpec::new(header.extents.clone(), header.resolution.clone())?;
    if grid.dim() != header.dim {
        return Err(Error::Format("dim disagrees with extents".into()));
    }
    let mut raw = Vec::new();
    r.read_to_end(&mut raw)?;
    if raw.len() % 8 != 0 {
        return Err(Error::Format("trailing bytes".into()));
    }
    let data = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let field = FormField::from_data(&grid, header.degree, header.value_type, data)?;
    Ok((header, field))
}

/// Column names of the CSV export, e.g. `x,y,z,T3_xy,...`.
pub fn csv_columns(prefix: &str, f: &FormField) -> Vec<String> {
    let mut cols: Vec<String> = AXIS_NAMES[..f.dim()].iter().map(|s| s.to_string()).collect();
    let comps: Vec<String> = basis_masks(f.dim(), f.degree()).into_iter().map(label).collect();
    for slot in f.value_type().slot_labels() {
        for c in &comps {
            cols.push(format!("{prefix}{slot}_{c}"));
        }
    }
    cols
}

pub fn write_csv<W: Write>(w: W, prefix: &str, f: &FormField) -> Result<()> {
    write_rows(w, prefix, f, |_| true)
}

/// CSV export of the samples with index `index` along `axis`, e.g. the
/// mid-height plane of a 3D field.
pub fn write_csv_slice<W: Write>(w: W, prefix: &str, f: &FormField, axis: usize, index: usize) -> Result<()> {
    let g = f.grid();
    if axis >= g.dim() || index >= g.resolution[axis] {
        return Err(Error::Degenerate(format!("slice {index} along axis {axis} is outside the grid")));
    }
    let stride = g.strides()[axis];
    let n = g.resolution[axis];
    write_rows(w, prefix, f, |p| (p / stride) % n == index)
}

fn write_rows<W: Write>(w: W, prefix: &str, f: &FormField, keep: impl Fn(usize) -> bool) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(csv_columns(prefix, f))?;
    let np = f.n_points();
    let channels = f.channels();
    let mut row: Vec<String> = Vec::with_capacity(f.dim() + channels);
    for p in (0..np).filter(|&p| keep(p)) {
        row.clear();
        row.extend(f.grid().point(p).iter().map(|v| v.to_string()));
        row.extend((0..channels).map(|ch| f.data()[ch * np + p].to_string()));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_field(seed: f64, vt: ValueType, degree: usize) -> FormField {
        let g = GridSpec::new(vec![[-1.0, 1.0], [0.0, 2.0], [0.0, 0.5]], vec![5, 4, 4]).unwrap();
        FormField::from_fn(&g, degree, vt, |x, o| {
            for (i, v) in o.iter_mut().enumerate() {
                *v = (seed + i as f64 * 0.7 + x[0] * 1.3 - x[1] * x[2]).sin() * 1e3;
            }
        })
        .unwrap()
    }

    proptest! {
        #[test]
        fn binary_round_trip_is_bit_exact(seed in -10.0f64..10.0, kind in 0usize..3, degree in 0usize..=3) {
            let vt = [ValueType::Scalar, ValueType::FrameVector(3), ValueType::FrameMatrixAntisym(3)][kind];
            let f = sample_field(seed, vt, degree);
            let mut buf = Vec::new();
            write_field(&mut buf, "f", &f).unwrap();
            let (h, back) = read_field(buf.as_slice()).unwrap();
            prop_assert_eq!(h.degree, degree);
            prop_assert_eq!(back, f);
        }
    }

    #[test]
    fn header_lists_components_lexicographically() {
        let f = sample_field(0.0, ValueType::FrameMatrixAntisym(3), 2);
        let h = FieldHeader::describe("R", &f);
        assert_eq!(h.components, ["xy", "xz", "yz"]);
        assert_eq!(h.frame_slots, ["21", "31", "32"]);
    }

    #[test]
    fn data_block_is_little_endian_c_order() {
        let f = sample_field(1.0, ValueType::Scalar, 0);
        let mut buf = Vec::new();
        write_field(&mut buf, "f", &f).unwrap();
        let hlen = u32::from_le_bytes(buf[8..12].try_into().unwrap()) as usize;
        let data = &buf[12 + hlen..];
        assert_eq!(data.len(), 8 * f.n_points());
        let third = f64::from_le_bytes(data[16..24].try_into().unwrap());
        assert_eq!(third, f.component(0, 0)[2]);
    }

    #[test]
    fn rejects_corrupt_input() {
        assert!(read_field(&b"NOTAFILE\0\0\0\0"[..]).is_err());
        let f = sample_field(1.0, ValueType::Scalar, 1);
        let mut buf = Vec::new();
        write_field(&mut buf, "f", &f).unwrap();
        buf.truncate(buf.len() - 8);
        assert!(read_field(buf.as_slice()).is_err());
    }

    #[test]
    fn csv_has_one_row_per_sample() {
        let f = sample_field(2.0, ValueType::FrameVector(3), 1);
        let mut buf = Vec::new();
        write_csv(&mut buf, "e", &f).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x,y,z,e1_x,e1_y,e1_z,e2_x,e2_y,e2_z,e3_x,e3_y,e3_z");
        assert_eq!(lines.count(), f.n_points());
    }

    #[test]
    fn slice_export_keeps_one_plane() {
        let f = sample_field(0.3, ValueType::Scalar, 1);
        let mut buf = Vec::new();
        write_csv_slice(&mut buf, "a", &f, 2, 1).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 5 * 4);
        let z = f.grid().coord(2, 1).to_string();
        assert!(text.lines().skip(1).all(|l| l.split(',').nth(2) == Some(z.as_str())));
        assert!(write_csv_slice(Vec::new(), "a", &f, 2, 4).is_err());
    }
}
