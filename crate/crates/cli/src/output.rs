//! CSV and SVG emitters. Output is byte-identical across runs: floats use the
//! shortest round-trip formatting and cell geometry is integer arithmetic.

use std::io::Write;

use agd_rc::RegionScan;

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes a scan as `alpha,beta,stable,margin,route,detail` rows, row major
/// with `alpha` varying fastest.
pub fn write_region_csv<W: Write>(scan: &RegionScan, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "alpha,beta,stable,margin,route,detail")?;
    for (bi, beta) in scan.betas.iter().enumerate() {
        for (ai, alpha) in scan.alphas.iter().enumerate() {
            let cell = scan.cell(ai, bi);
            writeln!(
                out,
                "{alpha},{beta},{},{},{},{}",
                u8::from(cell.stable),
                cell.margin,
                cell.route.as_str(),
                csv_field(&cell.detail)
            )?;
        }
    }
    Ok(())
}

/// Minimal SVG heatmap: one filled rect per stable cell on a white canvas,
/// beta increasing upward.
pub fn write_region_svg<W: Write>(scan: &RegionScan, out: &mut W) -> std::io::Result<()> {
    let nx = scan.alphas.len();
    let ny = scan.betas.len();
    let cell = (800 / nx.max(ny)).max(1);
    let (w, h) = (nx * cell, ny * cell);
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    )?;
    writeln!(out, "<rect width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>")?;
    for bi in 0..ny {
        let y = (ny - 1 - bi) * cell;
        for ai in 0..nx {
            if scan.cell(ai, bi).stable {
                let x = ai * cell;
                writeln!(
                    out,
                    "<rect x=\"{x}\" y=\"{y}\" width=\"{cell}\" height=\"{cell}\" fill=\"#2e6db4\"/>"
                )?;
            }
        }
    }
    writeln!(out, "</svg>")
}
