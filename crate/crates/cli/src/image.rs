use std::io::{self, Write};
use std::path::Path;

use fracmap_core::RasterField;

use crate::palette::Palette;

/// Binary PPM (P6, maxval 255) bytes of a painted field.
pub fn encode_ppm(field: &RasterField, palette: Palette) -> Vec<u8> {
    let g = field.grid();
    let mut out = format!("P6\n{} {}\n255\n", g.px_w(), g.px_h()).into_bytes();
    out.extend(palette.paint(field));
    out
}

pub fn write_image(field: &RasterField, palette: Palette, path: &Path) -> io::Result<()> {
    let mut f = io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(&encode_ppm(field, palette))?;
    f.flush()
}
