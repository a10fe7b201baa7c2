use super::FeatureMap;
use crate::{Error, Result};

/// Corner-aligned source coordinate for output index `i` of `out` samples over
/// an input axis of `len` samples. Returns the lower index and the fraction.
fn source_coord(i: usize, out: usize, len: usize) -> (usize, f64) {
    if len == 1 || out == 1 {
        return (0, 0.0);
    }
    let pos = i as f64 * (len - 1) as f64 / (out - 1) as f64;
    let lo = (pos.floor() as usize).min(len - 2);
    (lo, pos - lo as f64)
}

// Exact at both endpoints.
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    if t == 0.0 {
        a
    } else if t == 1.0 {
        b
    } else {
        a + t * (b - a)
    }
}

/// Channel-wise bilinear upsampling with corner-aligned sampling: the four
/// output corners reproduce the input corners exactly. A unit-length input
/// axis is replicated.
pub fn upsample_bilinear(fm: &FeatureMap, out_h: usize, out_w: usize) -> Result<FeatureMap> {
    if out_h < fm.height || out_w < fm.width {
        return Err(Error::invalid(format!(
            "upsampling target {out_h}x{out_w} is smaller than input {}x{}",
            fm.height, fm.width
        )));
    }
    let d = fm.dim;
    let cols: Vec<(usize, f64)> = (0..out_w).map(|c| source_coord(c, out_w, fm.width)).collect();
    let mut data = Vec::with_capacity(out_h * out_w * d);
    for r in 0..out_h {
        let (r0, fy) = source_coord(r, out_h, fm.height);
        let r1 = (r0 + 1).min(fm.height - 1);
        for &(c0, fx) in &cols {
            let c1 = (c0 + 1).min(fm.width - 1);
            let (a, b) = (fm.at(r0, c0), fm.at(r0, c1));
            let (c, e) = (fm.at(r1, c0), fm.at(r1, c1));
            for ch in 0..d {
                let top = lerp(a[ch], b[ch], fx);
                let bottom = lerp(c[ch], e[ch], fx);
                data.push(lerp(top, bottom, fy));
            }
        }
    }
    Ok(FeatureMap { height: out_h, width: out_w, dim: d, data })
}
