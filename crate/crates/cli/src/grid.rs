use crate::CliError;

/// Parses `a` or `a..b` (inclusive) into the listed integers.
pub fn parse(flag: &str, s: &str) -> Result<Vec<i64>, CliError> {
    let bad = || CliError::Usage(format!("--{flag} expects `a` or `a..b`, got `{s}`"));
    let s = s.trim();
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: i64 = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    Ok(vec![s.parse().map_err(|_| bad())?])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse("l", "2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse("l", "2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse("l", "7").unwrap(), vec![7]);
        assert!(parse("l", "5..2").is_err());
        assert!(parse("l", "x").is_err());
    }
}
