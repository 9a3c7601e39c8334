use super::grid::PhaseSpaceGrid;

/// Cubic Lagrange weights on nodes -1, 0, 1, 2 at offset `s` in [0, 1).
#[inline]
fn cubic_weights(s: f64) -> [f64; 4] {
    [
        -s * (s - 1.0) * (s - 2.0) / 6.0,
        (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
        -(s + 1.0) * s * (s - 2.0) / 2.0,
        (s + 1.0) * s * (s - 1.0) / 6.0,
    ]
}

/// Value at fractional index `j + s` from four samples, written relative to
/// the base node so constant data is reproduced exactly.
#[inline]
fn interpolate(samples: [f64; 4], w: [f64; 4]) -> f64 {
    let f0 = samples[1];
    f0 + w[0] * (samples[0] - f0) + w[2] * (samples[2] - f0) + w[3] * (samples[3] - f0)
}

/// Base offset and weights for the departure point `i - shift`.
#[inline]
fn departure(shift: f64) -> (isize, [f64; 4]) {
    let base = (-shift).floor();
    (base as isize, cubic_weights(-shift - base))
}

/// Shift a periodic line by `shift` cells: `out[i] = line(i - shift)`.
fn shift_periodic(line: &[f64], shift: f64, out: &mut [f64]) {
    let n = line.len() as isize;
    let (j0, w) = departure(shift);
    for (i, o) in out.iter_mut().enumerate() {
        let j = i as isize + j0;
        let at = |k: isize| line[(j + k).rem_euclid(n) as usize];
        *o = interpolate([at(-1), at(0), at(1), at(2)], w);
    }
}

/// Same as [`shift_periodic`] with zero values outside the line.
fn shift_open(line: &[f64], shift: f64, out: &mut [f64]) {
    let n = line.len() as isize;
    let (j0, w) = departure(shift);
    for (i, o) in out.iter_mut().enumerate() {
        let j = i as isize + j0;
        let at = |k: isize| {
            let m = j + k;
            if (0..n).contains(&m) {
                line[m as usize]
            } else {
                0.0
            }
        };
        *o = interpolate([at(-1), at(0), at(1), at(2)], w);
    }
}

/// Free streaming `f(x, v) <- f(x - v dt, v)`, periodic in x.
pub fn advect_x(grid: &mut PhaseSpaceGrid, dt: f64) {
    let (nx, nv) = (grid.nx, grid.nv);
    let mut line = vec![0.0; nx];
    let mut out = vec![0.0; nx];
    for iv in 0..nv {
        let shift = grid.v(iv) * dt / grid.dx;
        if shift == 0.0 {
            continue;
        }
        for ix in 0..nx {
            line[ix] = grid.f[ix * nv + iv];
        }
        shift_periodic(&line, shift, &mut out);
        for ix in 0..nx {
            grid.f[ix * nv + iv] = out[ix];
        }
    }
}

/// Acceleration `f(x, v) <- f(x, v - (q/m) E dt)` with no inflow at the
/// velocity bounds.
pub fn advect_v(grid: &mut PhaseSpaceGrid, e_field: &[f64], dt: f64) {
    let nv = grid.nv;
    let qm = grid.charge / grid.mass;
    let mut out = vec![0.0; nv];
    for (ix, e) in e_field.iter().enumerate().take(grid.nx) {
        let shift = qm * e * dt / grid.dv;
        if shift == 0.0 {
            continue;
        }
        let row = &mut grid.f[ix * nv..(ix + 1) * nv];
        shift_open(row, shift, &mut out);
        row.copy_from_slice(&out);
    }
}
