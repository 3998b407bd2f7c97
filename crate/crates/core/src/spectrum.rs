//! Dressed (adiabatic) spectra of the ladder, avoided crossings and adiabaticity checks.
//!
//! Spectra are always taken in the rotating frame, where the chirp shows up as linearly
//! moving quasi-energies and the field couplings open gaps at their crossings.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::{quasi_energy, Frame, HamiltonianSource, LadderConfig, TridiagonalH};

/// Successive-overlap threshold below which the tracker refines the grid.
pub const TRACK_OVERLAP_THRESHOLD: f64 = 0.9;
const MAX_REFINEMENTS: usize = 16;
const GOLDEN_TOL: f64 = 1e-6;

/// Eigen-decomposition of a Hermitian tridiagonal matrix, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// `vectors[i]` is the normalised eigenvector of `values[i]`.
    pub vectors: Option<Vec<Vec<Complex64>>>,
}

/// Implicit QL iteration with Wilkinson-type shifts on a real symmetric tridiagonal matrix.
///
/// `e[i]` couples `i` and `i + 1`; on return `d` holds the (unsorted) eigenvalues and, if
/// given, column `i` of the row-major `z` holds the eigenvector of `d[i]`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) {
    let n = d.len();
    if n < 2 {
        return;
    }
    debug_assert_eq!(e.len(), n);
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 200, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let f = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * f;
                        z[k * n + i] = c * z[k * n + i] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Eigenvalues (and optionally eigenvectors) of a Hermitian tridiagonal matrix.
///
/// The complex couplings are first rotated to `|H[j+1][j]|` by a diagonal unitary,
/// leaving a real symmetric problem.
pub fn instantaneous_spectrum(h: &TridiagonalH, with_vectors: bool) -> Spectrum {
    let n = h.dim();
    let mut d = h.diag.clone();
    let mut e: Vec<f64> = h.offdiag.iter().map(|c| c.norm()).collect();
    e.push(0.0);
    let mut z = with_vectors.then(|| {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        z
    });
    tridiagonal_ql(&mut d, &mut e, z.as_deref_mut());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = z.map(|z| {
        // Undo the phase rotation: H = U S U^†, U = diag(u), u_{j+1} = u_j h_j / |h_j|.
        let mut u = vec![Complex64::new(1.0, 0.0); n];
        for j in 0..n.saturating_sub(1) {
            let c = h.offdiag[j];
            let phase = if c.norm() > 0.0 {
                c / c.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            u[j + 1] = u[j] * phase;
        }
        order
            .iter()
            .map(|&i| (0..n).map(|k| u[k] * z[k * n + i]).collect())
            .collect()
    });
    Spectrum { values, vectors }
}

fn rotating(cfg: &LadderConfig) -> LadderConfig {
    cfg.with_frame(Frame::Rotating)
}

/// Dressed-state energies of the ladder at `t`.
pub fn dressed_energies(cfg: &LadderConfig, t: f64) -> Vec<f64> {
    instantaneous_spectrum(&rotating(cfg).hamiltonian(t), false).values
}

/// Landau-Zener transition time `Ω_e(t) / |α|` of the primary chirp.
pub fn lz_time(cfg: &LadderConfig, t: f64) -> f64 {
    cfg.rabi(t) / cfg.primary_drive().chirp.slope().abs()
}

/// One avoided crossing between adjacent ladder states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingRecord {
    /// Diabatic pair `(n, n + 1)`.
    pub pair: (i64, i64),
    /// Time of minimum adiabatic gap.
    pub t_cross: f64,
    pub gap: f64,
    /// Where the diabatic quasi-energies are degenerate.
    pub t_diabatic: f64,
    pub rabi: f64,
    pub t_lz: f64,
    /// Time to the next located crossing.
    pub spacing: Option<f64>,
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Locate every adjacent-pair avoided crossing of the primary chirp inside `window`.
///
/// Each diabatic degeneracy predicted from the affine phase rate is bracketed on a grid
/// of 1/50 of the crossing period and refined by golden-section search on the gap of the
/// adiabatic pair that straddles the crossing energy.
pub fn locate_crossings(cfg: &LadderConfig, window: (f64, f64)) -> Result<Vec<CrossingRecord>> {
    let chirp = cfg.primary_drive().chirp;
    let slope = chirp.slope();
    if slope == 0.0 {
        return Err(Error::invalid(
            "alpha",
            "chirp rate must be nonzero to sweep through crossings",
        ));
    }
    let (t0, t1) = window;
    if !(t1 > t0) {
        return Ok(Vec::new());
    }
    let rot = rotating(cfg);
    let q = cfg.q();
    let period = 2.0 / slope.abs();
    let n_max = cfg.n_max() as i64;
    let mut records = Vec::new();
    for n in -n_max..n_max {
        let Some(t_star) = chirp.time_of_rate(-(2.0 * n as f64 + 1.0 + q)) else {
            continue;
        };
        if t_star < t0 || t_star > t1 {
            continue;
        }
        let e_star = quasi_energy(n, chirp.rate(t_star), q);
        let vals = instantaneous_spectrum(&rot.hamiltonian(t_star), false).values;
        let k = (0..vals.len() - 1)
            .min_by(|&a, &b| {
                let da = (0.5 * (vals[a] + vals[a + 1]) - e_star).abs();
                let db = (0.5 * (vals[b] + vals[b + 1]) - e_star).abs();
                da.total_cmp(&db)
            })
            .expect("ladder has at least three levels");
        let gap = |t: f64| {
            let v = instantaneous_spectrum(&rot.hamiltonian(t), false).values;
            v[k + 1] - v[k]
        };
        let lo = (t_star - 0.5 * period).max(t0);
        let hi = (t_star + 0.5 * period).min(t1);
        let h = period / 50.0;
        let count = ((hi - lo) / h).ceil().max(1.0) as usize;
        let grid: Vec<f64> = (0..=count).map(|i| lo + (hi - lo) * i as f64 / count as f64).collect();
        let gaps: Vec<f64> = grid.iter().map(|&t| gap(t)).collect();
        let best = (0..gaps.len()).min_by(|&a, &b| gaps[a].total_cmp(&gaps[b])).unwrap();
        let a = grid[best.saturating_sub(1)];
        let b = grid[(best + 1).min(grid.len() - 1)];
        let (t_cross, g) = golden_min(gap, a, b, GOLDEN_TOL);
        let rabi = cfg.rabi(t_cross);
        records.push(CrossingRecord {
            pair: (n, n + 1),
            t_cross,
            gap: g.max(0.0),
            t_diabatic: t_star,
            rabi,
            t_lz: rabi / slope.abs(),
            spacing: None,
        });
    }
    records.sort_by(|a, b| a.t_cross.total_cmp(&b.t_cross));
    for i in 0..records.len().saturating_sub(1) {
        records[i].spacing = Some(records[i + 1].t_cross - records[i].t_cross);
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticityRow {
    pub pair: (i64, i64),
    pub t_cross: f64,
    pub t_lz: f64,
    pub spacing: f64,
    /// `t_lz / spacing`; adiabatic sequential transfer needs this below one.
    pub ratio: f64,
    pub flagged: bool,
}

/// Landau-Zener time against crossing spacing for every crossing under the pulse.
pub fn adiabaticity_report(cfg: &LadderConfig) -> Result<Vec<AdiabaticityRow>> {
    let records = locate_crossings(cfg, cfg.pulse_support())?;
    Ok(adiabaticity_rows(cfg, &records))
}

/// The spacing is taken between diabatic degeneracies: under strong coupling neighbouring
/// gap minima merge and their located times stop measuring the time between crossings.
pub fn adiabaticity_rows(cfg: &LadderConfig, records: &[CrossingRecord]) -> Vec<AdiabaticityRow> {
    let nominal = 2.0 / cfg.primary_drive().chirp.slope().abs();
    records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let spacing = records
                .get(i + 1)
                .map_or(nominal, |next| (next.t_diabatic - r.t_diabatic).abs());
            let ratio = r.t_lz / spacing;
            AdiabaticityRow {
                pair: r.pair,
                t_cross: r.t_cross,
                t_lz: r.t_lz,
                spacing,
                ratio,
                flagged: ratio >= 1.0,
            }
        })
        .collect()
}

/// One adiabatic level followed through time by eigenvector continuity.
#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticTrack {
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    /// Sorted-spectrum index occupied by the tracked level at each time.
    pub indices: Vec<usize>,
    /// `|<v(t_k-1)|v(t_k)>|` for k >= 1.
    pub overlaps: Vec<f64>,
    /// Dominant diabatic label at the first and last sample.
    pub start_label: i64,
    pub end_label: i64,
    pub vectors: Vec<Vec<Complex64>>,
}

fn overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm()
}

fn dominant_label(v: &[Complex64], n_max: usize) -> i64 {
    let j = (0..v.len())
        .max_by(|&a, &b| v[a].norm_sqr().total_cmp(&v[b].norm_sqr()))
        .unwrap_or(0);
    j as i64 - n_max as i64
}

/// Follow the adiabatic level starting at sorted index `level_index` across `window`.
///
/// Matching is by maximal overlap with the previous eigenvector, not by sorted index.
/// When the best overlap drops below [`TRACK_OVERLAP_THRESHOLD`] the interval is bisected;
/// tracking fails if repeated refinement does not recover it.
pub fn adiabatic_track(
    cfg: &LadderConfig,
    window: (f64, f64),
    level_index: usize,
    samples: usize,
) -> Result<AdiabaticTrack> {
    let rot = rotating(cfg);
    if level_index >= rot.dim() {
        return Err(Error::invalid("level_index", format!("must be < {}", rot.dim())));
    }
    if samples < 2 || !(window.1 > window.0) {
        return Err(Error::invalid(
            "window",
            "need at least two samples over a non-empty window",
        ));
    }
    let eig = |t: f64| instantaneous_spectrum(&rot.hamiltonian(t), true);
    let (t0, t1) = window;
    let first = eig(t0);
    let mut current = first.vectors.as_ref().unwrap()[level_index].clone();
    let mut track = AdiabaticTrack {
        times: vec![t0],
        energies: vec![first.values[level_index]],
        indices: vec![level_index],
        overlaps: Vec::new(),
        start_label: dominant_label(&current, cfg.n_max()),
        end_label: 0,
        vectors: vec![current.clone()],
    };
    let step = (t1 - t0) / (samples - 1) as f64;
    let mut t_prev = t0;
    for k in 1..samples {
        let target = if k + 1 == samples { t1 } else { t0 + k as f64 * step };
        // Advance towards `target`, halving the sub-step whenever matching is ambiguous.
        let mut sub = target - t_prev;
        let mut refinements = 0;
        while t_prev < target {
            let t = (t_prev + sub).min(target);
            let spec = eig(t);
            let vecs = spec.vectors.as_ref().unwrap();
            let (best, ov) = vecs
                .iter()
                .enumerate()
                .map(|(i, v)| (i, overlap(&current, v)))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            if ov < TRACK_OVERLAP_THRESHOLD {
                refinements += 1;
                if refinements > MAX_REFINEMENTS {
                    return Err(Error::TrackingLost {
                        time: t,
                        overlap: ov,
                        threshold: TRACK_OVERLAP_THRESHOLD,
                    });
                }
                sub *= 0.5;
                continue;
            }
            current = vecs[best].clone();
            t_prev = t;
            if t == target {
                track.times.push(t);
                track.energies.push(spec.values[best]);
                track.indices.push(best);
                track.overlaps.push(ov);
                track.vectors.push(current.clone());
            }
        }
    }
    track.end_label = dominant_label(&current, cfg.n_max());
    Ok(track)
}

/// Rows of `(t, dressed energies)` on a uniform grid, for dressed-state plots.
pub fn dressed_table(cfg: &LadderConfig, window: (f64, f64), samples: usize) -> Vec<(f64, Vec<f64>)> {
    let samples = samples.max(2);
    (0..samples)
        .map(|i| {
            let t = window.0 + (window.1 - window.0) * i as f64 / (samples - 1) as f64;
            (t, dressed_energies(cfg, t))
        })
        .collect()
}
