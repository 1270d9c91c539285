//! Profile CSV export and atomic file writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use qew_core::cohomogeneity::Profile;

use crate::error::CliError;

pub const CSV_HEADER: &str = "r,w,wp,f,fp,R,mu_pointwise";

/// 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn profile_csv(profile: &Profile) -> Result<Vec<u8>, CliError> {
    if profile.is_empty() {
        return Err(CliError::Numerical("cannot export an empty profile".into()));
    }
    let mut out = String::with_capacity(profile.len() * 170);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (i, s) in profile.states.iter().enumerate() {
        let row = [s.r, s.w, s.wp, s.f, s.fp, profile.scalar_curvature(i), profile.mu_pointwise(i)];
        let cells: Vec<String> = row.iter().map(|&v| num(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    let _ = writeln!(out, "# classification={}", profile.classification);
    Ok(out.into_bytes())
}

/// Writes to a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn emit_csv(profile: &Profile, path: &Path) -> Result<(), CliError> {
    write_atomic(path, &profile_csv(profile)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qew_core::cohomogeneity::{shoot, QuasiEinsteinSpec, ShootOptions};
    use qew_core::Weight;

    #[test]
    fn trivial_profile_rows() {
        let spec = QuasiEinsteinSpec::new(3, Weight::Finite(2.0), 0.0).unwrap();
        let mut p = shoot(&spec, 0.0, 1.0, &ShootOptions::default()).unwrap();
        p.states.truncate(3);
        p.accelerations.truncate(3);
        let text = String::from_utf8(profile_csv(&p).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[4], "# classification=trivial");
        let f: Vec<&str> = lines[1..4].iter().map(|l| l.split(',').nth(3).unwrap()).collect();
        assert!(f.iter().all(|v| *v == f[0]));
        p.states.clear();
        p.accelerations.clear();
        assert!(profile_csv(&p).is_err());
    }

    #[test]
    fn unwritable_path_is_io() {
        let spec = QuasiEinsteinSpec::new(1, Weight::Finite(2.0), 0.0).unwrap();
        let p = shoot(&spec, 0.0, 1.0, &ShootOptions::default()).unwrap();
        let err = emit_csv(&p, Path::new("/nonexistent-dir/x/profile.csv")).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }
}
