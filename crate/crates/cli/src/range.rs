//! Grid and interval syntax: `lo:hi:step` ranges and comma lists.

/// A parsed `lo:hi:step` grid (newtype so clap treats it as one value).
#[derive(Clone, Debug)]
pub struct Grid(pub Vec<f64>);

pub fn parse_grid_arg(s: &str) -> Result<Grid, String> {
    parse_grid(s).map(Grid)
}

/// Parses `lo:hi:step` into an inclusive grid.
///
/// The grid starts at `lo` and advances by integer multiples of `step`
/// (index arithmetic, so decimal steps do not drift), keeping every point
/// below `hi + step/2`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected lo:hi:step, got '{s}'"));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| format!("bad number '{}'", parts[0]))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| format!("bad number '{}'", parts[1]))?;
    let step: f64 = parts[2]
        .parse()
        .map_err(|_| format!("bad number '{}'", parts[2]))?;
    if !step.is_finite() || step <= 0.0 {
        return Err(format!("step must be positive, got {step}"));
    }
    if hi < lo {
        return Err(format!("empty range {lo}:{hi}"));
    }
    let n = ((hi - lo) / step + 0.5).floor() as usize + 1;
    Ok((0..n).map(|i| lo + i as f64 * step).collect())
}

/// Parses `lo:hi` into an interval.
pub fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 2 {
        return Err(format!("expected lo:hi, got '{s}'"));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| format!("bad number '{}'", parts[0]))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| format!("bad number '{}'", parts[1]))?;
    if hi <= lo {
        return Err(format!("empty interval {lo}:{hi}"));
    }
    Ok((lo, hi))
}
