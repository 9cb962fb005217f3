//! Flat `key = value` run configuration. See `docs/config.md` for the keys.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use dirac_qwalk::lattice::{
    LatticeSpec, Potentials, ScalarPotential, SpinorField, VectorPotential,
};
use dirac_qwalk::splitting::SplittingScheme;
use dirac_qwalk::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MAX_REFINEMENT: u32 = 3;

#[derive(Clone, Debug, PartialEq)]
pub enum VectorKind {
    Zero,
    Constant([f64; 3]),
    Oscillating {
        amplitude: [f64; 3],
        omega: f64,
        phase: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScalarKind {
    Zero,
    Constant(f64),
    Linear { field: [f64; 3], omega: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Initial {
    Gaussian {
        center: Option<[f64; 3]>,
        width: f64,
        momentum: [f64; 3],
        spinor: [f64; 4],
    },
    Spike {
        site: [usize; 3],
        component: usize,
    },
    Random,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub grid: [u32; 3],
    pub ell: f64,
    pub n_star: f64,
    pub light_speed: f64,
    pub mass: f64,
    pub charge: f64,
    pub order: u32,
    pub vector: VectorKind,
    pub scalar: ScalarKind,
    pub initial: Initial,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid: [0, 0, 6],
            ell: 1.0,
            n_star: 1.0,
            light_speed: 1.0,
            mass: 1.0,
            charge: -1.0,
            order: 2,
            vector: VectorKind::Zero,
            scalar: ScalarKind::Zero,
            initial: Initial::Gaussian {
                center: None,
                width: 4.0,
                momentum: [0.0; 3],
                spinor: [1.0, 0.0, 0.0, 0.0],
            },
            seed: 0,
        }
    }
}

fn number(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| anyhow!("{key}: '{v}' is not a number"))?;
    if !x.is_finite() {
        bail!("{key}: '{v}' is not finite");
    }
    Ok(x)
}

fn list<const N: usize>(key: &str, v: &str) -> Result<[f64; N]> {
    let parts: Vec<&str> = v.split(',').collect();
    if parts.len() != N {
        bail!("{key}: expected {N} comma-separated numbers, got '{v}'");
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = number(key, p)?;
    }
    Ok(out)
}

fn integers<const N: usize, T>(key: &str, v: &str) -> Result<[T; N]>
where
    T: std::str::FromStr + Copy + Default,
{
    let parts: Vec<&str> = v.split(',').collect();
    if parts.len() != N {
        bail!("{key}: expected {N} comma-separated integers, got '{v}'");
    }
    let mut out = [T::default(); N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p
            .trim()
            .parse()
            .map_err(|_| anyhow!("{key}: '{p}' is not a non-negative integer"))?;
    }
    Ok(out)
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key=value, got '{line}'", i + 1))?;
            let k = k.trim().to_string();
            if raw.insert(k.clone(), v.trim().to_string()).is_some() {
                bail!("line {}: duplicate key '{k}'", i + 1);
            }
        }
        // Echoed by `header`; derived, so it only has to agree.
        let refined = raw.remove("refined_levels");
        let cfg = Self::from_map(&mut raw)?;
        if let Some(k) = raw.keys().next() {
            bail!("unknown key '{k}'");
        }
        cfg.validate()?;
        if let Some(r) = refined {
            let levels = cfg.refinement()?;
            if r.parse::<u32>().ok() != Some(levels) {
                bail!("refined_levels={r} disagrees with the computed {levels}");
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.spec().map(|_| ())
    }

    /// Refinements of the configured lattice needed before every streaming step moves
    /// whole sites; each one doubles the points per axis at the same time step.
    pub fn refinement(&self) -> Result<u32> {
        let coarse = self.requested_spec()?;
        let scheme = self.scheme()?;
        for levels in 0..=MAX_REFINEMENT {
            let spec = coarse.refine(levels)?;
            if scheme
                .streaming_coefficients()
                .all(|c| spec.shift_sites(c).is_ok())
            {
                return Ok(levels);
            }
        }
        bail!(
            "order {} cannot stream whole sites at n_star={} even after refinement",
            self.order,
            self.n_star
        )
    }

    fn from_map(raw: &mut BTreeMap<String, String>) -> Result<Self> {
        let mut take = |k: &str| raw.remove(k);
        let mut c = RunConfig::default();
        if let Some(v) = take("grid") {
            c.grid = integers::<3, u32>("grid", &v)?;
        }
        if let Some(v) = take("ell") {
            c.ell = number("ell", &v)?;
        }
        if let Some(v) = take("n_star") {
            c.n_star = number("n_star", &v)?;
        }
        if let Some(v) = take("light_speed") {
            c.light_speed = number("light_speed", &v)?;
        }
        if let Some(v) = take("mass") {
            c.mass = number("mass", &v)?;
        }
        if let Some(v) = take("charge") {
            c.charge = number("charge", &v)?;
        }
        if let Some(v) = take("order") {
            c.order = v
                .parse()
                .map_err(|_| anyhow!("order: '{v}' is not 2 or 3"))?;
            SplittingScheme::by_order(c.order)?;
        }
        if let Some(v) = take("seed") {
            c.seed = v
                .parse()
                .map_err(|_| anyhow!("seed: '{v}' is not a non-negative integer"))?;
        }

        let amplitude = take("vector_amplitude");
        let omega = take("vector_omega");
        let phase = take("vector_phase");
        c.vector = match take("vector").as_deref().unwrap_or("zero") {
            "zero" => VectorKind::Zero,
            "constant" => VectorKind::Constant(list(
                "vector_amplitude",
                amplitude.as_deref().unwrap_or("0,0,0"),
            )?),
            "oscillating" => VectorKind::Oscillating {
                amplitude: list("vector_amplitude", amplitude.as_deref().unwrap_or("0,0,0"))?,
                omega: number("vector_omega", omega.as_deref().unwrap_or("0"))?,
                phase: number("vector_phase", phase.as_deref().unwrap_or("0"))?,
            },
            other => bail!("vector: unknown kind '{other}' (zero, constant, oscillating)"),
        };

        let value = take("scalar_value");
        let field = take("scalar_field");
        let s_omega = take("scalar_omega");
        c.scalar = match take("scalar").as_deref().unwrap_or("zero") {
            "zero" => ScalarKind::Zero,
            "constant" => {
                ScalarKind::Constant(number("scalar_value", value.as_deref().unwrap_or("0"))?)
            }
            "linear" => ScalarKind::Linear {
                field: list("scalar_field", field.as_deref().unwrap_or("0,0,0"))?,
                omega: number("scalar_omega", s_omega.as_deref().unwrap_or("0"))?,
            },
            other => bail!("scalar: unknown kind '{other}' (zero, constant, linear)"),
        };

        let center = take("center");
        let width = take("width");
        let momentum = take("momentum");
        let spinor = take("spinor");
        let site = take("site");
        let component = take("component");
        c.initial = match take("initial").as_deref().unwrap_or("gaussian") {
            "gaussian" => {
                let width = number("width", width.as_deref().unwrap_or("4"))?;
                if width <= 0.0 {
                    bail!("width: must be positive, got {width}");
                }
                let spinor: [f64; 4] = list("spinor", spinor.as_deref().unwrap_or("1,0,0,0"))?;
                if spinor.iter().all(|&s| s == 0.0) {
                    bail!("spinor: all components are zero");
                }
                Initial::Gaussian {
                    center: center.as_deref().map(|v| list("center", v)).transpose()?,
                    width,
                    momentum: list("momentum", momentum.as_deref().unwrap_or("0,0,0"))?,
                    spinor,
                }
            }
            "spike" => {
                let component: usize = component
                    .as_deref()
                    .unwrap_or("0")
                    .parse()
                    .map_err(|_| anyhow!("component: expected 0..=3"))?;
                if component > 3 {
                    bail!("component: expected 0..=3, got {component}");
                }
                Initial::Spike {
                    site: integers::<3, usize>("site", site.as_deref().unwrap_or("0,0,0"))?,
                    component,
                }
            }
            "random" => Initial::Random,
            other => bail!("initial: unknown kind '{other}' (gaussian, spike, random)"),
        };
        Ok(c)
    }

    pub fn requested_spec(&self) -> Result<LatticeSpec> {
        let spec = LatticeSpec::new(self.grid, self.ell, self.n_star).context("invalid lattice")?;
        spec.with_light_speed(self.light_speed)
            .context("invalid light speed")
    }

    /// The lattice the solvers run on: the configured one, refined if needed.
    pub fn spec(&self) -> Result<LatticeSpec> {
        Ok(self.requested_spec()?.refine(self.refinement()?)?)
    }

    pub fn scheme(&self) -> Result<SplittingScheme> {
        Ok(SplittingScheme::by_order(self.order)?)
    }

    pub fn potentials(&self) -> Potentials {
        let vector = match self.vector {
            VectorKind::Zero => VectorPotential::Zero,
            VectorKind::Constant(a) => VectorPotential::Constant(a),
            VectorKind::Oscillating {
                amplitude,
                omega,
                phase,
            } => VectorPotential::Oscillating {
                amplitude,
                omega,
                phase,
            },
        };
        let scalar = match self.scalar {
            ScalarKind::Zero => ScalarPotential::Zero,
            ScalarKind::Constant(v) => ScalarPotential::Constant(v),
            ScalarKind::Linear { field, omega } => ScalarPotential::Linear { field, omega },
        };
        Potentials::free(self.mass)
            .with_charge(self.charge)
            .with_vector(vector)
            .with_scalar(scalar)
    }

    /// True when the step operator changes from one step to the next.
    pub fn time_dependent(&self) -> bool {
        matches!(self.vector, VectorKind::Oscillating { omega, .. } if omega != 0.0)
            || matches!(self.scalar, ScalarKind::Linear { omega, .. } if omega != 0.0)
    }

    pub fn initial_field(&self) -> Result<SpinorField> {
        let spec = self.spec()?;
        let field = match &self.initial {
            Initial::Gaussian {
                center,
                width,
                momentum,
                spinor,
            } => {
                let center = match center {
                    Some(c) => *c,
                    None => spec.centroid(spec.points().map(|p| p / 2))?,
                };
                let (w, k, s) = (*width, *momentum, *spinor);
                SpinorField::from_fn(spec, move |x| {
                    let mut r2 = 0.0;
                    let mut phase = 0.0;
                    for a in 0..3 {
                        r2 += (x[a] - center[a]).powi(2);
                        phase += k[a] * x[a];
                    }
                    let env = C64::from_polar((-r2 / (2.0 * w * w)).exp(), phase);
                    s.map(|c| env * c)
                })
            }
            Initial::Spike { site, component } => {
                SpinorField::spike(spec, *component, *site, C64::new(1.0, 0.0))?
            }
            Initial::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let amps = (0..4 * spec.sites())
                    .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                SpinorField::from_amplitudes(spec, amps)?
            }
        };
        field
            .normalized()
            .context("initial field has zero norm on this lattice")
    }

    /// Every key with its resolved value, one `# key=value` line each.
    pub fn header(&self) -> String {
        let mut kv: Vec<(&str, String)> = vec![
            (
                "grid",
                format!("{},{},{}", self.grid[0], self.grid[1], self.grid[2]),
            ),
            ("ell", self.ell.to_string()),
            ("n_star", self.n_star.to_string()),
            ("light_speed", self.light_speed.to_string()),
            ("mass", self.mass.to_string()),
            ("charge", self.charge.to_string()),
            ("order", self.order.to_string()),
        ];
        match &self.vector {
            VectorKind::Zero => kv.push(("vector", "zero".into())),
            VectorKind::Constant(a) => {
                kv.push(("vector", "constant".into()));
                kv.push(("vector_amplitude", join(a)));
            }
            VectorKind::Oscillating {
                amplitude,
                omega,
                phase,
            } => {
                kv.push(("vector", "oscillating".into()));
                kv.push(("vector_amplitude", join(amplitude)));
                kv.push(("vector_omega", omega.to_string()));
                kv.push(("vector_phase", phase.to_string()));
            }
        }
        match &self.scalar {
            ScalarKind::Zero => kv.push(("scalar", "zero".into())),
            ScalarKind::Constant(v) => {
                kv.push(("scalar", "constant".into()));
                kv.push(("scalar_value", v.to_string()));
            }
            ScalarKind::Linear { field, omega } => {
                kv.push(("scalar", "linear".into()));
                kv.push(("scalar_field", join(field)));
                kv.push(("scalar_omega", omega.to_string()));
            }
        }
        match &self.initial {
            Initial::Gaussian {
                center,
                width,
                momentum,
                spinor,
            } => {
                kv.push(("initial", "gaussian".into()));
                if let Some(c) = center {
                    kv.push(("center", join(c)));
                }
                kv.push(("width", width.to_string()));
                kv.push(("momentum", join(momentum)));
                kv.push(("spinor", join(spinor)));
            }
            Initial::Spike { site, component } => {
                kv.push(("initial", "spike".into()));
                kv.push(("site", format!("{},{},{}", site[0], site[1], site[2])));
                kv.push(("component", component.to_string()));
            }
            Initial::Random => kv.push(("initial", "random".into())),
        }
        kv.push(("seed", self.seed.to_string()));
        if let Ok(levels) = self.refinement() {
            if levels > 0 {
                kv.push(("refined_levels", levels.to_string()));
            }
        }
        let mut out = String::new();
        for (k, v) in kv {
            let _ = writeln!(out, "# {k}={v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_round_trips() {
        let text = "grid=2,0,3\nell=0.5\nn_star=0.5\nvector=oscillating\nvector_amplitude=0.1,0,0.3\nvector_omega=2\n\
                    scalar=linear\nscalar_field=0,0,0.2\ninitial=spike\nsite=1,0,5\ncomponent=2\nseed=9\n";
        let c = RunConfig::parse(text).unwrap();
        let echoed: String = c
            .header()
            .lines()
            .map(|l| l.trim_start_matches("# ").to_string() + "\n")
            .collect();
        assert_eq!(RunConfig::parse(&echoed).unwrap(), c);
    }

    #[test]
    fn diagnostics_name_the_problem() {
        let err = |t: &str| format!("{:#}", RunConfig::parse(t).unwrap_err());
        assert!(err("n_star=0.3").contains("CFL"));
        assert!(err("colour=red").contains("unknown key 'colour'"));
        assert!(err("grid=1,2").contains("grid"));
        assert!(err("mass=1\nmass=2").contains("duplicate"));
        assert!(err("order=5").contains("order"));
        assert!(err("grid=0,0,128\nn_star=0.5").contains("invalid lattice"));
    }

    #[test]
    fn fractional_shifts_refine_the_lattice() {
        let c = RunConfig::parse("grid=0,0,4\nell=1\nn_star=0.5").unwrap();
        assert_eq!(c.refinement().unwrap(), 1);
        let spec = c.spec().unwrap();
        assert_eq!(spec.qubits(), [0, 0, 5]);
        assert_eq!((spec.ell(), spec.dt()), (0.5, 0.5));
        assert!(c.header().contains("# refined_levels=1\n"));
        let third = RunConfig::parse("order=3\nn_star=1").unwrap();
        assert_eq!(third.refinement().unwrap(), 1);
        assert_eq!(
            RunConfig::parse("order=3\nn_star=2")
                .unwrap()
                .refinement()
                .unwrap(),
            0
        );
    }
}
