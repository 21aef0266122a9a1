use serde::Serialize;

use crate::error::{Error, Result};
use crate::symplectic::Quadrature;

/// Odd steps use `H = kappa x_L p_A`, even steps `H = -kappa p_L x_A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Odd,
    Even,
}

/// Which QND interaction a step uses, with the implied measurement and
/// feedback quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Coupling {
    /// `x_A += kappa x_L`, `p_L -= kappa p_A`; measure `p_L`, displace `p_A`.
    XLightPAtom,
    /// `p_A += kappa p_L`, `x_L -= kappa x_A`; measure `x_L`, displace `x_A`.
    PLightXAtom,
}

impl Coupling {
    pub fn measured(self) -> Quadrature {
        match self {
            Coupling::XLightPAtom => Quadrature::P,
            Coupling::PLightXAtom => Quadrature::X,
        }
    }

    pub fn displaced(self) -> Quadrature {
        self.measured()
    }
}

impl From<Parity> for Coupling {
    fn from(p: Parity) -> Self {
        match p {
            Parity::Odd => Coupling::XLightPAtom,
            Parity::Even => Coupling::PLightXAtom,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Step {
    /// 1-based step number.
    pub index: usize,
    pub coupling: Coupling,
    pub kappa: f64,
    pub gain: f64,
}

impl Step {
    pub fn parity(&self) -> Parity {
        if self.index % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

/// Coupling strengths and gains of the alternating protocol together with
/// the squeezing factors `C_0 ... C_M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule {
    pub steps: Vec<Step>,
    pub c_seq: Vec<f64>,
}

impl Schedule {
    pub fn c0(&self) -> f64 {
        self.c_seq[0]
    }

    pub fn c_final(&self) -> f64 {
        *self.c_seq.last().expect("schedule always holds C_0")
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `C_M / C_0` for every `M = 0..=len`.
    pub fn ratios(&self) -> Vec<f64> {
        self.c_seq.iter().map(|c| c / self.c0()).collect()
    }

    /// Running sums of `kappa_j^2`.
    pub fn coupling_partial_sums(&self) -> Vec<f64> {
        self.steps
            .iter()
            .scan(0.0, |acc, s| {
                *acc += s.kappa * s.kappa;
                Some(*acc)
            })
            .collect()
    }
}

/// Builds the `M`-step alternating schedule preserving the structure
/// `x_A,M = C_M/sqrt(M+1) (x_A/C_0 + sum x_L)`,
/// `p_A,M = 1/(C_M sqrt(M+1)) (C_0 p_A + sum p_L)`.
pub fn coupling_sequence(m: usize, c0: f64) -> Result<Schedule> {
    if m == 0 {
        return Err(Error::InvalidParameter("schedule needs at least one step".into()));
    }
    if !(c0 > 0.0) || !c0.is_finite() {
        return Err(Error::InvalidParameter(format!("C_0 must be positive, got {c0}")));
    }
    let mut c_seq = Vec::with_capacity(m + 1);
    c_seq.push(c0);
    let mut steps = Vec::with_capacity(m);
    for j in 1..=m {
        let c_prev = c_seq[j - 1];
        let jf = j as f64;
        let (coupling, kappa, gain, c_next) = if j % 2 == 1 {
            (
                Coupling::XLightPAtom,
                c_prev / jf.sqrt(),
                jf.sqrt() / ((jf + 1.0) * c_prev),
                ((jf + 1.0) / jf).sqrt() * c_prev,
            )
        } else {
            (
                Coupling::PLightXAtom,
                1.0 / (c_prev * jf.sqrt()),
                jf.sqrt() * c_prev / (jf + 1.0),
                (jf / (jf + 1.0)).sqrt() * c_prev,
            )
        };
        steps.push(Step { index: j, coupling, kappa, gain });
        c_seq.push(c_next);
    }
    Ok(Schedule { steps, c_seq })
}

/// `M` repetitions of `kappa = 1` with gains `g_k = 1/(k+1)`.
pub fn fixed_kappa_steps(m: usize) -> Vec<Step> {
    (1..=m)
        .map(|k| Step {
            index: k,
            coupling: Coupling::XLightPAtom,
            kappa: 1.0,
            gain: 1.0 / (k as f64 + 1.0),
        })
        .collect()
}

/// `M` repetitions of `kappa = 1/sqrt(M)`; gains `g_k = sqrt(M)/k` make
/// `p_A,M = sum p_L / sqrt(M)`.
pub fn herec_steps(m: usize) -> Vec<Step> {
    let root = (m as f64).sqrt();
    (1..=m)
        .map(|k| Step {
            index: k,
            coupling: Coupling::XLightPAtom,
            kappa: 1.0 / root,
            gain: root / k as f64,
        })
        .collect()
}

/// `K_tot^2 = sum kappa_j^2`.
pub fn total_coupling(steps: &[Step]) -> f64 {
    steps.iter().map(|s| s.kappa * s.kappa).sum()
}
