//! Value parsers for angles, ranges and dimension triples.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

/// Angle in radians. Accepts plain radians (`0.5236`), multiples of pi
/// (`pi/6`, `3pi/8`, `-pi/4`, `0.5*pi`) and degrees (`30deg`).
pub fn angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    if t.is_empty() {
        return Err("empty angle".into());
    }
    if let Some(deg) = t.strip_suffix("deg").or_else(|| t.strip_suffix('°')) {
        return Ok(number(deg)? * PI / 180.0);
    }
    if let Some((coef, rest)) = t.split_once("pi") {
        let coef = coef.trim().trim_end_matches('*').trim();
        let k = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => number(c)?,
        };
        let den = match rest.trim() {
            "" => 1.0,
            r => {
                let d = r.strip_prefix('/').ok_or_else(|| format!("malformed angle `{s}`"))?;
                let d = number(d)?;
                if d == 0.0 {
                    return Err(format!("zero denominator in `{s}`"));
                }
                d
            }
        };
        return Ok(k * PI / den);
    }
    number(&t).map_err(|_| format!("malformed angle `{s}` (use radians, `pi/6` or `30deg`)"))
}

/// `a..b`, `a..=b`, `a-b` or a single `a`; both ends inclusive.
pub fn range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let t = s.trim();
    let (lo, hi) = if let Some((a, b)) = t.split_once("..") {
        (a, b.trim_start_matches('='))
    } else if let Some((a, b)) = t.split_once('-') {
        (a, b)
    } else {
        (t, t)
    };
    let lo: usize = lo.trim().parse().map_err(|_| format!("malformed range `{s}`"))?;
    let hi: usize = hi.trim().parse().map_err(|_| format!("malformed range `{s}`"))?;
    if lo == 0 || hi < lo {
        return Err(format!("range `{s}` must be nonempty and start at 1 or more"));
    }
    Ok(lo..=hi)
}

/// `a,b,u` or `aXbXu`.
pub fn dims(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split([',', 'x', 'X']).collect();
    if parts.len() != 3 {
        return Err(format!("dims `{s}` must have three entries, e.g. 2,2,2"));
    }
    let mut out = [0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.trim().parse().map_err(|_| format!("malformed dimension `{p}`"))?;
    }
    Ok(out)
}

/// `start:stop:count`, evenly spaced with both ends included.
pub fn grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("grid `{s}` must be start:stop:count"));
    };
    let (a, b) = (angle(a)?, angle(b)?);
    let n: usize = n.trim().parse().map_err(|_| format!("malformed count in `{s}`"))?;
    Ok(match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(angle("pi/6").unwrap(), PI / 6.0);
        assert_eq!(angle("3pi/8").unwrap(), 3.0 * PI / 8.0);
        assert_eq!(angle("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(angle("pi").unwrap(), PI);
        assert!((angle("30deg").unwrap() - PI / 6.0).abs() < 1e-15);
        assert_eq!(angle("0.25").unwrap(), 0.25);
        for bad in ["", "abc", "pi/0", "pi6", "nan", "1/2"] {
            assert!(angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn ranges_and_dims() {
        assert_eq!(range("1..3").unwrap(), 1..=3);
        assert_eq!(range("2..=4").unwrap(), 2..=4);
        assert_eq!(range("1-2").unwrap(), 1..=2);
        assert_eq!(range("5").unwrap(), 5..=5);
        assert!(range("3..1").is_err() && range("0..2").is_err());
        assert_eq!(dims("2,3,1").unwrap(), [2, 3, 1]);
        assert_eq!(dims("2x2x2").unwrap(), [2, 2, 2]);
        assert!(dims("2,2").is_err());
        assert_eq!(grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(grid("0:1:0").unwrap().is_empty());
    }
}
