//! CNOT noise families: depolarizing (with a measurement-error fraction `r`),
//! Knill, forward and independent noise.
//!
//! Model strings look like `depolarizing:p=0.08,r=1`, `knill:p=0.069`,
//! `forward:pf=0.048` or `independent:pf=0.04,pb=0.01,pm=0.02`. A family
//! string is the same without the swept parameter, e.g. `depolarizing:r=0.5`.

use std::fmt;
use std::str::FromStr;

use crate::pauli::TwoPauli;
use crate::pauli_algebra::TwoQubitDiagonalNoise;
use crate::{Error, Result, VALIDITY_TOL};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseModel {
    Depolarizing { p: f64, r: f64 },
    Knill { p: f64 },
    Forward { pf: f64 },
    Independent { pf: f64, pb: f64, pm: f64 },
}

/// Sixteen outcome probabilities indexed by [`TwoPauli`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitPauliDist(pub [f64; 16]);

impl TwoQubitPauliDist {
    pub fn get(&self, l: TwoPauli) -> f64 {
        self.0[l.index()]
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

fn check_prob(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} = {v} is not a probability"
        )))
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::Depolarizing { p, r } => {
                check_prob("p", p)?;
                if !r.is_finite() || r < 0.0 || 4.0 * r * p / 15.0 > 1.0 {
                    return Err(Error::InvalidParameter(format!("r = {r}")));
                }
                Ok(())
            }
            NoiseModel::Knill { p } => check_prob("p", p),
            NoiseModel::Forward { pf } => check_prob("pf", pf),
            NoiseModel::Independent { pf, pb, pm } => {
                check_prob("pf", pf)?;
                check_prob("pb", pb)?;
                check_prob("pm", pm)
            }
        }
    }

    /// Depolarizing `(p, r)` or independent `(pf, pb, pm)` form.
    fn canonical(&self) -> NoiseModel {
        match *self {
            NoiseModel::Knill { p } => NoiseModel::Depolarizing { p, r: 1.0 },
            NoiseModel::Forward { pf } => NoiseModel::Independent {
                pf,
                pb: 0.0,
                pm: 0.0,
            },
            other => other,
        }
    }

    /// The swept parameter (`p` or `pf`).
    pub fn parameter(&self) -> f64 {
        match *self {
            NoiseModel::Depolarizing { p, .. } | NoiseModel::Knill { p } => p,
            NoiseModel::Forward { pf } | NoiseModel::Independent { pf, .. } => pf,
        }
    }

    pub fn family(&self) -> NoiseFamily {
        match *self {
            NoiseModel::Depolarizing { r, .. } => NoiseFamily::Depolarizing { r },
            NoiseModel::Knill { .. } => NoiseFamily::Knill,
            NoiseModel::Forward { .. } => NoiseFamily::Forward,
            NoiseModel::Independent { pb, pm, .. } => NoiseFamily::Independent { pb, pm },
        }
    }
}

/// Probability of each two-qubit Pauli error after a noisy CNOT.
pub fn two_qubit_dist(m: &NoiseModel) -> TwoQubitPauliDist {
    let mut d = [0.0; 16];
    match m.canonical() {
        NoiseModel::Depolarizing { p, .. } => {
            d.iter_mut().for_each(|v| *v = p / 15.0);
            d[0] = 1.0 - p;
        }
        NoiseModel::Independent { pf, pb, .. } => {
            // forward errors: phase on the source, bit on the destination;
            // backward errors: bit on the source, phase on the destination
            let f = |hit: bool, q: f64| if hit { q } else { 1.0 - q };
            for l in TwoPauli::all() {
                d[l.index()] = f(l.source.z_bit(), pf)
                    * f(l.dest.x_bit(), pf)
                    * f(l.source.x_bit(), pb)
                    * f(l.dest.z_bit(), pb);
            }
        }
        _ => unreachable!(),
    }
    TwoQubitPauliDist(d)
}

/// Diagonal entries `Q_{σσ'}` obtained as commutation-signed sums of
/// [`two_qubit_dist`].
pub fn diagonal_q(m: &NoiseModel) -> Result<TwoQubitDiagonalNoise> {
    m.validate()?;
    TwoQubitDiagonalNoise::from_error_probabilities(&two_qubit_dist(m).0)
}

/// `m = 1 - 2 p_m`.
pub fn measurement_m(m: &NoiseModel) -> f64 {
    match m.canonical() {
        NoiseModel::Depolarizing { p, r } => 1.0 - 8.0 * r * p / 15.0,
        NoiseModel::Independent { pm, .. } => 1.0 - 2.0 * pm,
        _ => unreachable!(),
    }
}

/// A noise family with one free parameter (`p` for depolarizing/Knill, `p_f`
/// otherwise).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseFamily {
    Depolarizing { r: f64 },
    Knill,
    Forward,
    Independent { pb: f64, pm: f64 },
}

impl NoiseFamily {
    pub fn at(&self, p: f64) -> NoiseModel {
        match *self {
            NoiseFamily::Depolarizing { r } => NoiseModel::Depolarizing { p, r },
            NoiseFamily::Knill => NoiseModel::Knill { p },
            NoiseFamily::Forward => NoiseModel::Forward { pf: p },
            NoiseFamily::Independent { pb, pm } => NoiseModel::Independent { pf: p, pb, pm },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseFamily::Depolarizing { .. } => "depolarizing",
            NoiseFamily::Knill => "knill",
            NoiseFamily::Forward => "forward",
            NoiseFamily::Independent { .. } => "independent",
        }
    }
}

fn parse_kv(body: &str, allowed: &[&str]) -> Result<Vec<(String, f64)>> {
    let mut out: Vec<(String, f64)> = Vec::new();
    if body.is_empty() {
        return Ok(out);
    }
    for part in body.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{part}`")))?;
        let k = k.trim();
        if !allowed.contains(&k) {
            return Err(Error::Parse(format!("unknown key `{k}`")));
        }
        if out.iter().any(|(seen, _)| seen == k) {
            return Err(Error::Parse(format!("duplicate key `{k}`")));
        }
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("`{v}` is not a number")))?;
        out.push((k.to_string(), v));
    }
    Ok(out)
}

fn lookup(kv: &[(String, f64)], key: &str) -> Option<f64> {
    kv.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
}

fn split_spec(s: &str) -> (&str, &str) {
    s.split_once(':').unwrap_or((s, ""))
}

impl FromStr for NoiseFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, body) = split_spec(s.trim());
        match name {
            "depolarizing" => {
                let kv = parse_kv(body, &["r"])?;
                Ok(NoiseFamily::Depolarizing {
                    r: lookup(&kv, "r").unwrap_or(0.0),
                })
            }
            "knill" => {
                parse_kv(body, &[])?;
                Ok(NoiseFamily::Knill)
            }
            "forward" => {
                parse_kv(body, &[])?;
                Ok(NoiseFamily::Forward)
            }
            "independent" => {
                let kv = parse_kv(body, &["pb", "pm"])?;
                Ok(NoiseFamily::Independent {
                    pb: lookup(&kv, "pb").unwrap_or(0.0),
                    pm: lookup(&kv, "pm").unwrap_or(0.0),
                })
            }
            other => Err(Error::Parse(format!("unknown noise model `{other}`"))),
        }
    }
}

impl FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, body) = split_spec(s.trim());
        let need = |kv: &[(String, f64)], key: &str| {
            lookup(kv, key).ok_or_else(|| Error::Parse(format!("missing `{key}` for {name}")))
        };
        let model = match name {
            "depolarizing" => {
                let kv = parse_kv(body, &["p", "r"])?;
                NoiseModel::Depolarizing {
                    p: need(&kv, "p")?,
                    r: lookup(&kv, "r").unwrap_or(0.0),
                }
            }
            "knill" => {
                let kv = parse_kv(body, &["p"])?;
                NoiseModel::Knill { p: need(&kv, "p")? }
            }
            "forward" => {
                let kv = parse_kv(body, &["pf"])?;
                NoiseModel::Forward {
                    pf: need(&kv, "pf")?,
                }
            }
            "independent" => {
                let kv = parse_kv(body, &["pf", "pb", "pm"])?;
                NoiseModel::Independent {
                    pf: need(&kv, "pf")?,
                    pb: lookup(&kv, "pb").unwrap_or(0.0),
                    pm: lookup(&kv, "pm").unwrap_or(0.0),
                }
            }
            other => return Err(Error::Parse(format!("unknown noise model `{other}`"))),
        };
        model.validate()?;
        Ok(model)
    }
}

impl fmt::Display for NoiseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseFamily::Depolarizing { r } if *r != 0.0 => write!(f, "depolarizing:r={r}"),
            NoiseFamily::Independent { pb, pm } => write!(f, "independent:pb={pb},pm={pm}"),
            other => write!(f, "{}", other.name()),
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NoiseModel::Depolarizing { p, r } => write!(f, "depolarizing:p={p},r={r}"),
            NoiseModel::Knill { p } => write!(f, "knill:p={p}"),
            NoiseModel::Forward { pf } => write!(f, "forward:pf={pf}"),
            NoiseModel::Independent { pf, pb, pm } => {
                write!(f, "independent:pf={pf},pb={pb},pm={pm}")
            }
        }
    }
}

/// Checks that a 16-outcome distribution is a probability vector.
pub fn validate_dist(d: &TwoQubitPauliDist) -> Result<()> {
    if d.0.iter().any(|v| *v < -VALIDITY_TOL) || (d.total() - 1.0).abs() > VALIDITY_TOL {
        return Err(Error::InvalidDistribution(format!(
            "16-outcome total {}",
            d.total()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;
    use proptest::prelude::*;

    fn lbl(s: &str) -> TwoPauli {
        TwoPauli::parse(s).unwrap()
    }

    #[test]
    fn depolarizing_entries() {
        let d = two_qubit_dist(&NoiseModel::Depolarizing { p: 0.15, r: 0.0 });
        assert!((d.get(lbl("XY")) - 0.01).abs() < 1e-15);
        assert!((d.get(lbl("II")) - 0.85).abs() < 1e-15);
        let zero = two_qubit_dist(&NoiseModel::Depolarizing { p: 0.0, r: 1.0 });
        assert_eq!(zero.0[0], 1.0);
        assert!(zero.0[1..].iter().all(|v| *v == 0.0));

        let p = 0.07;
        let q = diagonal_q(&NoiseModel::Depolarizing { p, r: 0.0 }).unwrap();
        for l in TwoPauli::all().skip(1) {
            assert!((q.get(l.source, l.dest) - (1.0 - 16.0 * p / 15.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn independent_entries() {
        let (pf, pb) = (0.04, 0.013);
        let d = two_qubit_dist(&NoiseModel::Independent { pf, pb, pm: 0.0 });
        assert!((d.get(lbl("ZX")) - pf * pf * (1.0 - pb).powi(2)).abs() < 1e-15);
        assert!((d.get(lbl("XI")) - (1.0 - pf).powi(2) * (1.0 - pb) * pb).abs() < 1e-15);
        let f = two_qubit_dist(&NoiseModel::Forward { pf });
        assert!((f.get(lbl("IX")) - (1.0 - pf) * pf).abs() < 1e-15);
        validate_dist(&d).unwrap();
    }

    #[test]
    fn forward_q_by_brute_force() {
        let pf = 0.05;
        let d = two_qubit_dist(&NoiseModel::Forward { pf });
        let target = lbl("ZI");
        let mut expect = 0.0;
        for t in TwoPauli::all() {
            // sign from explicit anticommutation count per qubit
            let anti =
                (!t.source.commutes(target.source)) as u8 + (!t.dest.commutes(target.dest)) as u8;
            expect += d.get(t) * if anti % 2 == 0 { 1.0 } else { -1.0 };
        }
        let q = diagonal_q(&NoiseModel::Forward { pf }).unwrap();
        assert!((q.get(Pauli::Z, Pauli::I) - expect).abs() < 1e-15);
        // forward noise never flips the source bit, so ZI is untouched
        assert!((expect - 1.0).abs() < 1e-15);
        assert!((q.get(Pauli::X, Pauli::I) - (1.0 - 2.0 * pf)).abs() < 1e-12);
    }

    #[test]
    fn zero_parameters_are_noiseless() {
        for m in [
            NoiseModel::Depolarizing { p: 0.0, r: 0.7 },
            NoiseModel::Knill { p: 0.0 },
            NoiseModel::Forward { pf: 0.0 },
            NoiseModel::Independent {
                pf: 0.0,
                pb: 0.0,
                pm: 0.0,
            },
        ] {
            assert_eq!(diagonal_q(&m).unwrap(), TwoQubitDiagonalNoise::NOISELESS);
            assert_eq!(measurement_m(&m), 1.0);
        }
    }

    #[test]
    fn measurement_parameter() {
        assert_eq!(measurement_m(&NoiseModel::Forward { pf: 0.3 }), 1.0);
        assert!((measurement_m(&NoiseModel::Knill { p: 0.069024 }) - 0.9631872).abs() < 1e-12);
        assert_eq!(
            measurement_m(&NoiseModel::Depolarizing { p: 0.08, r: 0.0 }),
            1.0
        );
        assert!(
            (measurement_m(&NoiseModel::Independent {
                pf: 0.0,
                pb: 0.0,
                pm: 0.1
            }) - 0.8)
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn parsing() {
        assert_eq!(
            "depolarizing:p=0.08,r=1".parse::<NoiseModel>().unwrap(),
            NoiseModel::Depolarizing { p: 0.08, r: 1.0 }
        );
        assert_eq!(
            "forward:pf=0.048".parse::<NoiseModel>().unwrap(),
            NoiseModel::Forward { pf: 0.048 }
        );
        assert_eq!(
            "independent:pf=0.01,pb=0.02,pm=0.03"
                .parse::<NoiseModel>()
                .unwrap(),
            NoiseModel::Independent {
                pf: 0.01,
                pb: 0.02,
                pm: 0.03
            }
        );
        assert!("forward:p=0.1".parse::<NoiseModel>().is_err());
        assert!("knill:p=0.1,q=2".parse::<NoiseModel>().is_err());
        assert!("knill:p=1.5".parse::<NoiseModel>().is_err());
        assert!("gaussian:p=0.1".parse::<NoiseModel>().is_err());
        assert_eq!("knill".parse::<NoiseFamily>().unwrap(), NoiseFamily::Knill);
        assert_eq!(
            "depolarizing:r=0.5".parse::<NoiseFamily>().unwrap(),
            NoiseFamily::Depolarizing { r: 0.5 }
        );
        assert!("forward:pf=0.1".parse::<NoiseFamily>().is_err());
        let m = NoiseModel::Independent {
            pf: 0.01,
            pb: 0.02,
            pm: 0.03,
        };
        assert_eq!(m.to_string().parse::<NoiseModel>().unwrap(), m);
    }

    proptest! {
        #[test]
        fn signed_sum_agrees(p in 0.0..0.5f64, pb in 0.0..0.2f64, pm in 0.0..0.2f64, r in 0.0..2.0f64) {
            for m in [
                NoiseModel::Depolarizing { p, r },
                NoiseModel::Forward { pf: p },
                NoiseModel::Independent { pf: p, pb, pm },
            ] {
                let d = two_qubit_dist(&m);
                validate_dist(&d).unwrap();
                let q = diagonal_q(&m).unwrap();
                let back = q.error_probabilities();
                for i in 0..16 {
                    prop_assert!((back[i] - d.0[i]).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn aliases_agree(p in 0.0..0.5f64) {
            let k = NoiseModel::Knill { p };
            let d = NoiseModel::Depolarizing { p, r: 1.0 };
            prop_assert_eq!(two_qubit_dist(&k), two_qubit_dist(&d));
            prop_assert_eq!(diagonal_q(&k).unwrap(), diagonal_q(&d).unwrap());
            prop_assert_eq!(measurement_m(&k), measurement_m(&d));
            let f = NoiseModel::Forward { pf: p };
            let i = NoiseModel::Independent { pf: p, pb: 0.0, pm: 0.0 };
            prop_assert_eq!(two_qubit_dist(&f), two_qubit_dist(&i));
            prop_assert_eq!(diagonal_q(&f).unwrap(), diagonal_q(&i).unwrap());
            prop_assert_eq!(measurement_m(&f), measurement_m(&i));
        }
    }
}
