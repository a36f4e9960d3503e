//! Plain-text serialization of grids and reconstruction exports.
//!
//! Both formats are tab-separated UTF-8 with `#`-prefixed header lines.
//! Floats are printed with Rust's shortest round-trip formatting, so
//! write → read is exact and identical inputs produce identical bytes.
//!
//! Grid rows (column order is part of the format):
//!
//! * exact mode:   `k  theta  re_chi  im_chi`
//! * sampled mode: `k  theta  prep_id  shots  count  p_hat` (two rows per
//!   point; `prep_id` 0 = cos probe, 1 = sin probe)
//!
//! Reconstruction rows: `row  col  re  im`.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::dynamics::DriveParams;
use crate::fock::{IonState, Space};
use crate::{Error, Result};

use super::chi::{CharFnGrid, GridMode, GridPoint, PointValue, ScanMeta};
use super::control::ControlPoint;
use super::reconstruct::ReconstructionResult;

/// Write a grid. `extra_header` lines (without the leading `#`) are emitted
/// after the format header; callers use them to embed their configuration.
pub fn write_grid<W: Write>(grid: &CharFnGrid, extra_header: &[String], out: &mut W) -> Result<()> {
    writeln!(out, "# iontomo charfn grid v1")?;
    let mode = match grid.mode {
        GridMode::Exact => "exact",
        GridMode::Sampled => "sampled",
    };
    writeln!(out, "# mode = {mode}")?;
    writeln!(out, "# eta = {}", grid.meta.eta)?;
    writeln!(out, "# tau = {}", grid.meta.tau)?;
    if let Some(seed) = grid.meta.seed {
        writeln!(out, "# seed = {seed}")?;
    }
    if let Some(shots) = grid.meta.shots {
        writeln!(out, "# shots = {shots}")?;
    }
    match grid.mode {
        GridMode::Exact => writeln!(out, "# columns = k theta re_chi im_chi")?,
        GridMode::Sampled => writeln!(out, "# columns = k theta prep_id shots count p_hat")?,
    }
    for line in extra_header {
        writeln!(out, "# {line}")?;
    }
    for p in &grid.points {
        let (k, th) = (p.control.k, p.control.theta);
        match p.value {
            PointValue::Exact(chi) => {
                writeln!(out, "{k}\t{th}\t{}\t{}", chi.re, chi.im)?;
            }
            PointValue::Sampled { counts, shots } => {
                for (prep, count) in counts.iter().enumerate() {
                    let p_hat = *count as f64 / shots as f64;
                    writeln!(out, "{k}\t{th}\t{prep}\t{shots}\t{count}\t{p_hat}")?;
                }
            }
        }
    }
    Ok(())
}

fn header_value(line: &str) -> Option<(&str, &str)> {
    let body = line.strip_prefix('#')?.trim();
    let (key, value) = body.split_once('=')?;
    Some((key.trim(), value.trim()))
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Parse { line, msg: format!("cannot parse {s:?}") })
}

/// Read a grid written by [`write_grid`].
pub fn read_grid<R: BufRead>(input: R) -> Result<CharFnGrid> {
    let mut mode: Option<GridMode> = None;
    let mut eta: Option<f64> = None;
    let mut tau: Option<f64> = None;
    let mut seed: Option<u64> = None;
    let mut shots_meta: Option<u64> = None;
    let mut points: Vec<GridPoint> = Vec::new();
    // sampled rows arrive one per prep; pair them up by (k, θ)
    let mut pending: Option<(f64, f64, u64, [Option<u64>; 2])> = None;

    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            if let Some((key, value)) = header_value(trimmed) {
                match key {
                    "mode" => {
                        mode = Some(match value {
                            "exact" => GridMode::Exact,
                            "sampled" => GridMode::Sampled,
                            other => {
                                return Err(Error::Parse {
                                    line: lineno,
                                    msg: format!("unknown mode {other:?}"),
                                })
                            }
                        })
                    }
                    "eta" => eta = Some(parse_field(value, lineno)?),
                    "tau" => tau = Some(parse_field(value, lineno)?),
                    "seed" => seed = Some(parse_field(value, lineno)?),
                    "shots" => shots_meta = Some(parse_field(value, lineno)?),
                    _ => {}
                }
            }
            continue;
        }

        let mode = mode.ok_or(Error::Parse { line: lineno, msg: "mode header missing".into() })?;
        let eta = eta.ok_or(Error::Parse { line: lineno, msg: "eta header missing".into() })?;
        let cols: Vec<&str> = trimmed.split('\t').collect();
        let params = DriveParams::resonant(eta, 1.0)
            .map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })?;
        match mode {
            GridMode::Exact => {
                if cols.len() != 4 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("expected 4 columns, got {}", cols.len()),
                    });
                }
                let k: f64 = parse_field(cols[0], lineno)?;
                let theta: f64 = parse_field(cols[1], lineno)?;
                let re: f64 = parse_field(cols[2], lineno)?;
                let im: f64 = parse_field(cols[3], lineno)?;
                let control = ControlPoint::from_kt(&params, k, theta, f64::INFINITY)
                    .map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })?;
                points.push(GridPoint { control, value: PointValue::Exact(C64::new(re, im)) });
            }
            GridMode::Sampled => {
                if cols.len() != 6 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("expected 6 columns, got {}", cols.len()),
                    });
                }
                let k: f64 = parse_field(cols[0], lineno)?;
                let theta: f64 = parse_field(cols[1], lineno)?;
                let prep: usize = parse_field(cols[2], lineno)?;
                let shots: u64 = parse_field(cols[3], lineno)?;
                let count: u64 = parse_field(cols[4], lineno)?;
                if prep > 1 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("prep_id must be 0 or 1, got {prep}"),
                    });
                }
                let flush = |pending: &mut Option<(f64, f64, u64, [Option<u64>; 2])>,
                             points: &mut Vec<GridPoint>|
                 -> Result<()> {
                    if let Some((pk, pth, pshots, counts)) = pending.take() {
                        let counts = [
                            counts[0].ok_or(Error::Parse {
                                line: lineno,
                                msg: "missing cos-probe row".into(),
                            })?,
                            counts[1].ok_or(Error::Parse {
                                line: lineno,
                                msg: "missing sin-probe row".into(),
                            })?,
                        ];
                        let control = ControlPoint::from_kt(&params, pk, pth, f64::INFINITY)
                            .map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })?;
                        points.push(GridPoint {
                            control,
                            value: PointValue::Sampled { counts, shots: pshots },
                        });
                    }
                    Ok(())
                };
                match &mut pending {
                    Some((pk, pth, _, counts)) if *pk == k && *pth == theta => {
                        counts[prep] = Some(count);
                    }
                    _ => {
                        flush(&mut pending, &mut points)?;
                        let mut counts = [None, None];
                        counts[prep] = Some(count);
                        pending = Some((k, theta, shots, counts));
                    }
                }
                // fall through; trailing pair flushed after the loop
            }
        }
    }
    if let Some((pk, pth, pshots, counts)) = pending {
        let eta = eta.ok_or(Error::Parse { line: 0, msg: "eta header missing".into() })?;
        let params = DriveParams::resonant(eta, 1.0)
            .map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
        let counts = [
            counts[0].ok_or(Error::Parse { line: 0, msg: "missing cos-probe row".into() })?,
            counts[1].ok_or(Error::Parse { line: 0, msg: "missing sin-probe row".into() })?,
        ];
        let control = ControlPoint::from_kt(&params, pk, pth, f64::INFINITY)
            .map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
        points.push(GridPoint { control, value: PointValue::Sampled { counts, shots: pshots } });
    }

    let mode = mode.ok_or(Error::Parse { line: 0, msg: "mode header missing".into() })?;
    let grid = CharFnGrid {
        mode,
        meta: ScanMeta {
            eta: eta.ok_or(Error::Parse { line: 0, msg: "eta header missing".into() })?,
            tau: tau.ok_or(Error::Parse { line: 0, msg: "tau header missing".into() })?,
            seed,
            shots: shots_meta,
        },
        points,
    };
    Ok(grid)
}

/// Write a reconstruction export: metadata header plus one
/// `row col re im` quadruple per matrix entry.
pub fn write_reconstruction<W: Write>(
    result: &ReconstructionResult,
    extra_header: &[String],
    out: &mut W,
) -> Result<()> {
    let rho = result.rho.to_density();
    let n = rho.nrows();
    writeln!(out, "# iontomo reconstruction v1")?;
    writeln!(out, "# n_out = {n}")?;
    writeln!(out, "# k_max = {}", result.quad.k_max)?;
    writeln!(out, "# dk = {}", result.quad.dk)?;
    writeln!(out, "# n_theta = {}", result.quad.n_theta)?;
    writeln!(out, "# trace_error = {}", result.trace_error)?;
    writeln!(out, "# hermiticity_error = {}", result.hermiticity_error)?;
    writeln!(out, "# min_eigenvalue = {}", result.min_eigenvalue)?;
    writeln!(out, "# psd_repaired = {}", result.psd_repaired)?;
    if let Some(f) = result.fidelity_vs_truth {
        writeln!(out, "# fidelity_vs_truth = {f}")?;
    }
    if let Some(w) = &result.quad_warning {
        writeln!(out, "# quad_warning = {w}")?;
    }
    writeln!(out, "# columns = row col re im")?;
    for line in extra_header {
        writeln!(out, "# {line}")?;
    }
    for i in 0..n {
        for j in 0..n {
            let z = rho[(i, j)];
            writeln!(out, "{i}\t{j}\t{}\t{}", z.re, z.im)?;
        }
    }
    Ok(())
}

/// Read the density matrix part of a reconstruction export (also accepts
/// any `row col re im` table with an `n_out` header).
pub fn read_density_matrix<R: BufRead>(input: R) -> Result<IonState> {
    let mut n: Option<usize> = None;
    let mut entries: Vec<(usize, usize, C64)> = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            if let Some(("n_out", value)) = header_value(trimmed) {
                n = Some(parse_field(value, lineno)?);
            }
            continue;
        }
        let cols: Vec<&str> = trimmed.split('\t').collect();
        if cols.len() != 4 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected 4 columns, got {}", cols.len()),
            });
        }
        entries.push((
            parse_field(cols[0], lineno)?,
            parse_field(cols[1], lineno)?,
            C64::new(parse_field(cols[2], lineno)?, parse_field(cols[3], lineno)?),
        ));
    }
    let n = n.ok_or(Error::Parse { line: 0, msg: "n_out header missing".into() })?;
    let mut m = DMatrix::<C64>::zeros(n, n);
    for (i, j, z) in entries {
        if i >= n || j >= n {
            return Err(Error::Parse { line: 0, msg: format!("index ({i}, {j}) out of range") });
        }
        m[(i, j)] = z;
    }
    IonState::density(Space::Vibrational(n), m)
}
