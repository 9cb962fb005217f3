//! Plain-text field snapshots.
//!
//! ```text
//! # spinor field snapshot
//! n_x,n_y,n_z,ell,n_star,x_min,y_min,z_min,components
//! 3,0,0,1e-1,1,0e0,0e0,0e0,phi1|phi2|chi1|chi2
//! re,im
//! 1.25e-1,0e0
//! ...
//! ```
//!
//! Amplitudes follow in component-major order. Floats use the shortest representation
//! that round-trips, so a write/read cycle is exact.

use std::io::{BufRead, Write};

use num_complex::Complex64 as C64;

use super::{LatticeSpec, SpinorField};
use crate::{Error, Result};

const COMPONENTS: &str = "phi1|phi2|chi1|chi2";

pub fn write_csv<W: Write>(field: &SpinorField, mut out: W) -> Result<()> {
    let s = field.spec();
    let [nx, ny, nz] = s.qubits();
    let [x0, y0, z0] = s.origin();
    writeln!(out, "# spinor field snapshot")?;
    writeln!(out, "n_x,n_y,n_z,ell,n_star,x_min,y_min,z_min,components")?;
    writeln!(
        out,
        "{nx},{ny},{nz},{:e},{},{x0:e},{y0:e},{z0:e},{COMPONENTS}",
        s.ell(),
        s.n_star()
    )?;
    writeln!(out, "re,im")?;
    for z in field.amplitudes() {
        writeln!(out, "{:e},{:e}", z.re, z.im)?;
    }
    Ok(())
}

pub fn read_csv<R: BufRead>(input: R) -> Result<SpinorField> {
    let mut lines = input.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(l) if l.trim().is_empty() || l.starts_with('#') => None,
        other => Some((i + 1, other)),
    });
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((i, Ok(l))) => Ok((i, l)),
            Some((_, Err(e))) => Err(e.into()),
            None => Err(Error::Parse {
                line: 0,
                message: format!("missing {what}"),
            }),
        }
    };
    let (line, head) = next("header")?;
    if !head.starts_with("n_x,") {
        return Err(Error::Parse {
            line,
            message: "expected header line".into(),
        });
    }
    let (line, values) = next("geometry")?;
    let fields: Vec<&str> = values.split(',').collect();
    if fields.len() != 9 || fields[8] != COMPONENTS {
        return Err(Error::Parse {
            line,
            message: "malformed geometry line".into(),
        });
    }
    let perr = |m: String| Error::Parse { line, message: m };
    let q = |i: usize| fields[i].parse::<u32>().map_err(|e| perr(e.to_string()));
    let f = |i: usize| fields[i].parse::<f64>().map_err(|e| perr(e.to_string()));
    let spec =
        LatticeSpec::new([q(0)?, q(1)?, q(2)?], f(3)?, f(4)?)?.with_origin([f(5)?, f(6)?, f(7)?]);
    let (line, cols) = next("column header")?;
    if cols.trim() != "re,im" {
        return Err(Error::Parse {
            line,
            message: "expected re,im".into(),
        });
    }
    let mut amps = Vec::with_capacity(4 * spec.sites());
    for (line, l) in lines {
        let l = l?;
        let (re, im) = l.split_once(',').ok_or(Error::Parse {
            line,
            message: "expected re,im pair".into(),
        })?;
        let p = |s: &str| {
            s.trim().parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })
        };
        amps.push(C64::new(p(re)?, p(im)?));
    }
    SpinorField::from_amplitudes(spec, amps)
}
