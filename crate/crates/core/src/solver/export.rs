use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{ensure, Result};
use crate::solver::grid::Field;

/// One row per inside node: coordinates then value, header `x0,…,value`.
pub fn field_to_csv(field: &Field) -> String {
    let g = field.grid();
    let mut out = String::new();
    for a in 0..g.dim() {
        let _ = write!(out, "x{a},");
    }
    out.push_str("value\n");
    for (i, v) in field.values().iter().enumerate() {
        for x in g.inside_coords(i) {
            let _ = write!(out, "{x:.17e},");
        }
        let _ = writeln!(out, "{v:.17e}");
    }
    out
}

/// Plain (P2) greyscale heatmap of a 2-D field, or of the central slice of a
/// 3-D field. Masked-out pixels are 0; the value range maps to 1..=255 and is
/// recorded in a `# min=… max=…` comment.
pub fn field_to_pgm(field: &Field) -> Result<String> {
    let g = field.grid();
    ensure!(
        g.dim() == 2 || g.dim() == 3,
        Unsupported,
        "heatmaps need a 2-D or 3-D field"
    );
    let (nx, ny) = (g.extents()[0], g.extents()[1]);
    let slice = if g.dim() == 3 { g.extents()[2] / 2 } else { 0 };
    let (min, max) = (field.min(), field.max());
    let span = if max > min { max - min } else { 1.0 };
    let values = field.box_values();
    let mut out = format!("P2\n# min={min:.17e} max={max:.17e}\n{nx} {ny}\n255\n");
    for row in (0..ny).rev() {
        let line: Vec<String> = (0..nx)
            .map(|col| {
                let id = g.box_index(&[col, row, slice][..g.dim()]);
                match g.inside_index(id) {
                    Some(_) => (1.0 + 254.0 * (values[id] - min) / span).round() as u32,
                    None => 0,
                }
                .to_string()
            })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}

pub fn write_csv(field: &Field, path: &Path) -> Result<()> {
    fs::write(path, field_to_csv(field))?;
    Ok(())
}

pub fn write_pgm(field: &Field, path: &Path) -> Result<()> {
    fs::write(path, field_to_pgm(field)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::geometry::{make_profile, ProfileShape};
    use crate::solver::grid::MaskedGrid;

    fn field() -> Field {
        let d = make_profile(
            ProfileShape::Ball {
                center: vec![0.0, 0.0],
                radius: 1.0,
            },
            Some(32.0),
        )
        .unwrap();
        let g = Arc::new(MaskedGrid::covering(&d, 0.125).unwrap());
        let v = (0..g.inside_count()).map(|i| g.inside_coords(i)[0]).collect();
        Field::new(g, v).unwrap()
    }

    #[test]
    fn csv_has_one_row_per_inside_node() {
        let f = field();
        let csv = field_to_csv(&f);
        assert_eq!(csv.lines().count(), f.grid().inside_count() + 1);
        assert!(csv.starts_with("x0,x1,value\n"));
    }

    #[test]
    fn pgm_annotation_matches_extrema() {
        let f = field();
        let pgm = field_to_pgm(&f).unwrap();
        let comment = pgm.lines().nth(1).unwrap();
        let nums: Vec<f64> = comment
            .trim_start_matches("# ")
            .split(' ')
            .map(|kv| kv.split('=').nth(1).unwrap().parse().unwrap())
            .collect();
        assert_eq!(nums, vec![f.min(), f.max()]);
        let pixels: Vec<u32> = pgm
            .lines()
            .skip(4)
            .flat_map(|l| l.split(' ').map(|t| t.parse::<u32>().unwrap()))
            .collect();
        assert_eq!(pixels.len(), 21 * 21);
        assert_eq!(*pixels.iter().max().unwrap(), 255);
    }
}
