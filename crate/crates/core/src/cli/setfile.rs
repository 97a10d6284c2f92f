//! Set files: `n=<int>` followed by one hex point per line, or by a single
//! `hexbits=<digits>` bitmap. Blank lines and `#` comments are ignored.

use crate::error::{Error, Result};
use crate::group::GroupDim;
use crate::sets::PointSet;

pub fn parse_setfile(text: &str, dim_cap: u32) -> Result<PointSet> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::BadInput("empty set file".into()))?;
    let n: u32 = header
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::BadInput(format!("expected 'n=<int>', got '{header}'")))?;
    let dim = GroupDim::with_cap(n, dim_cap)?;

    let rest: Vec<&str> = lines.collect();
    if let Some(first) = rest.first() {
        if let Some(hex) = first.strip_prefix("hexbits=") {
            if rest.len() > 1 {
                return Err(Error::BadInput("hexbits must be the only body line".into()));
            }
            return PointSet::from_hexbits(dim, hex);
        }
    }
    let points = rest
        .iter()
        .map(|l| {
            let digits = l.strip_prefix("0x").unwrap_or(l);
            u32::from_str_radix(digits, 16)
                .map_err(|_| Error::BadInput(format!("bad hex point '{l}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    PointSet::from_points(dim, &points)
}

/// Canonical form: header plus bitmap.
pub fn write_setfile(set: &PointSet) -> String {
    format!("n={}\nhexbits={}\n", set.dim().n(), set.to_hexbits())
}
