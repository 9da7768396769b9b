//! Grid literals: `start:step:stop` (endpoints inclusive within 1e-9) or a
//! comma-separated list of values.

pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        3 => {
            let start: f64 = parts[0]
                .parse()
                .map_err(|_| format!("bad grid start `{}`", parts[0]))?;
            let step: f64 = parts[1]
                .parse()
                .map_err(|_| format!("bad grid step `{}`", parts[1]))?;
            let stop: f64 = parts[2]
                .parse()
                .map_err(|_| format!("bad grid stop `{}`", parts[2]))?;
            if step.is_nan() || step <= 0.0 {
                return Err(format!("grid step must be positive, got {step}"));
            }
            if stop < start {
                return Err(format!("grid stop {stop} lies before start {start}"));
            }
            let mut values = Vec::new();
            let mut k = 0u64;
            loop {
                let v = start + k as f64 * step;
                if v > stop + 1e-9 {
                    break;
                }
                values.push(v);
                k += 1;
            }
            Ok(values)
        }
        1 => {
            let values: Result<Vec<f64>, _> = s
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| format!("bad grid value `{v}`"))
                })
                .collect();
            let values = values?;
            if values.is_empty() {
                return Err("empty grid".to_string());
            }
            Ok(values)
        }
        _ => Err(format!(
            "expected `start:step:stop` or a comma list, got `{s}`"
        )),
    }
}
