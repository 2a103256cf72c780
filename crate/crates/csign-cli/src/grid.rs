use std::str::FromStr;

/// Inclusive `start:stop:step` range, or a single value.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
        match parts.as_slice() {
            [v] => Ok(Grid(vec![num(v)?])),
            [a, b, c] => {
                let (start, stop, step) = (num(a)?, num(b)?, num(c)?);
                if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
                    return Err(format!("grid '{s}' needs a positive step and finite bounds"));
                }
                if stop < start {
                    return Err(format!("grid '{s}' has stop below start"));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                if count > 1_000_000 {
                    return Err(format!("grid '{s}' has more than 10^6 points"));
                }
                // integer multiples keep values free of accumulated drift
                Ok(Grid((0..count).map(|i| start + i as f64 * step).collect()))
            }
            _ => Err(format!("grid '{s}' must be start:stop:step or a single value")),
        }
    }
}

impl Grid {
    pub fn counts(&self) -> Result<Vec<u64>, String> {
        self.0
            .iter()
            .map(|&x| {
                if x >= 0.0 && x.fract() == 0.0 {
                    Ok(x as u64)
                } else {
                    Err(format!("source count {x} must be a nonnegative integer"))
                }
            })
            .collect()
    }
}
