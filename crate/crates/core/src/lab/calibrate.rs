//! Fixes the open signs of the conventions from operator experiments and
//! persists them as a small JSON ledger.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{thm2_defect, thm3_residual, tuynman_defect, fit_rate, ConvergenceRow, LabSettings, TUYNMAN_TOLERANCE};
use crate::error::{Error, Result};
use crate::geometry::{C1Ordering, KahlerConventions, LaplaceSign};
use crate::symbol::Symbol;

const POISSON_LEVELS: [u32; 2] = [16, 64];
const LAPLACE_LEVEL: u32 = 4;
const C1_LEVELS: [u32; 4] = [16, 32, 64, 128];
const SECOND_ORDER_BAND: (f64, f64) = (1.8, 2.2);

/// Outcome of a calibration with the evidence for each choice.
#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    pub conventions: KahlerConventions,
    /// Commutator defects at levels 16 and 64 for structure constants `+2` and `-2`.
    pub poisson_defects: [(f64, [f64; 2]); 2],
    /// Tuynman defect for `x3` at level 4 for each Laplacian sign.
    pub laplace_defects: [(LaplaceSign, f64); 2],
    /// Second-order residual slope for `(x1, x2)` under each ordering.
    pub c1_slopes: [(C1Ordering, f64); 2],
}

/// [`calibrate_with`] on default settings.
pub fn calibrate() -> Result<Calibration> {
    calibrate_with(&LabSettings::default())
}

/// Determines, in order, the sign of the Poisson structure, the sign of the
/// Laplacian and the ordering of the first cochain.
///
/// Each step keeps the candidate whose experiment passes; anything other than
/// exactly one passing candidate is reported as ambiguous.
pub fn calibrate_with(base: &LabSettings) -> Result<Calibration> {
    let (x1, x2, x3) = (Symbol::x1(), Symbol::x2(), Symbol::x3());
    let mut conv = base.conventions;
    let magnitude = conv.poisson_structure_constant.abs();

    let mut poisson = Vec::new();
    for sign in [1.0, -1.0] {
        let s = base.clone().with_conventions(conv.with_poisson_sign(sign));
        let d: Vec<f64> = POISSON_LEVELS
            .iter()
            .map(|&m| thm2_defect(&x1, &x2, m, &s))
            .collect::<Result<_>>()?;
        poisson.push((sign * magnitude, [d[0], d[1]]));
    }
    // a decaying defect drops by about the level ratio
    let decays = |d: &[f64; 2]| d[1] < 0.5 * d[0];
    conv = conv.with_poisson_sign(pick(&poisson, |(_, d)| decays(d), "Poisson structure sign")?.0.signum());

    let mut laplace = Vec::new();
    for sign in [LaplaceSign::Plus, LaplaceSign::Minus] {
        let s = base.clone().with_conventions(conv.with_laplace_sign(sign));
        let (defect, qnorm) = tuynman_defect(&x3, LAPLACE_LEVEL, &s)?;
        laplace.push((sign, defect, defect <= TUYNMAN_TOLERANCE * (1.0 + qnorm)));
    }
    conv = conv.with_laplace_sign(pick(&laplace, |l| l.2, "Laplacian sign")?.0);

    let mut c1 = Vec::new();
    for ordering in [C1Ordering::AntiholomorphicFirst, C1Ordering::HolomorphicFirst] {
        let s = base.clone().with_conventions(conv);
        let rows: Vec<ConvergenceRow> = C1_LEVELS
            .iter()
            .map(|&m| thm3_residual(&x1, &x2, m, 2, ordering, &s).map(|r| ConvergenceRow::with_gap(m, r, 0.0, r)))
            .collect::<Result<_>>()?;
        let slope = fit_rate(&rows, &C1_LEVELS)?.slope;
        c1.push((ordering, slope));
    }
    let in_band = |&(_, slope): &(C1Ordering, f64)| (SECOND_ORDER_BAND.0..=SECOND_ORDER_BAND.1).contains(&slope);
    conv = conv.with_c1_ordering(pick(&c1, in_band, "first cochain ordering")?.0);

    Ok(Calibration {
        conventions: conv,
        poisson_defects: [poisson[0], poisson[1]],
        laplace_defects: [(laplace[0].0, laplace[0].1), (laplace[1].0, laplace[1].1)],
        c1_slopes: [c1[0], c1[1]],
    })
}

fn pick<'a, T: std::fmt::Debug>(candidates: &'a [T], pass: impl Fn(&T) -> bool, what: &str) -> Result<&'a T> {
    let passing: Vec<&T> = candidates.iter().filter(|c| pass(c)).collect();
    match passing.as_slice() {
        [one] => Ok(one),
        _ => Err(Error::CalibrationAmbiguous(format!(
            "{what}: {} of {} candidates pass ({candidates:?})",
            passing.len(),
            candidates.len()
        ))),
    }
}

/// Writes the ledger atomically through a temporary sibling file.
pub fn save_ledger(path: &Path, conventions: &KahlerConventions) -> Result<()> {
    let mut text = serde_json::to_string_pretty(conventions)?;
    text.push('\n');
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::Invalid(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(text.as_bytes())?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

pub fn load_ledger(path: &Path) -> Result<KahlerConventions> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("convention ledger {}: {e}", path.display())))
}
