use std::fs;
use std::io::{self, Write};
use std::path::Path;

use fracns_core::asymptotics::RadialProfile;

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(name);
    let mut file = fs::File::create(&tmp)?;
    file.write_all(bytes)?;
    file.sync_all()?;
    drop(file);
    fs::rename(&tmp, path)
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders a CSV with the given header and rows.
pub fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(format_number).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// `r,value,fit_lo,fit_hi` per bin. The band is the fitted law with its exponent
/// moved by one standard error, pivoting at the geometric center of the window.
pub fn radial_csv(profile: &RadialProfile) -> String {
    let pivot = (profile.window.0 * profile.window.1).sqrt();
    let rows = profile.bin_centers.iter().zip(&profile.bin_values).map(|(&r, &v)| {
        let fit = profile.fitted_value(r);
        let spread = (r / pivot).powf(profile.fit_stderr);
        let (a, b) = (fit * spread, fit / spread);
        vec![r, v, a.min(b), a.max(b)]
    });
    csv_text(&["r", "value", "fit_lo", "fit_hi"], rows)
}

pub fn emit_radial_csv(profile: &RadialProfile, path: &Path) -> io::Result<()> {
    write_atomic(path, radial_csv(profile).as_bytes())
}
