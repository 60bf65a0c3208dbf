//! Recursive qupit circuit for the Fourier transform over `G`.
//!
//! Wires are ordered `(z, x_n, .., x_1, y_n, .., y_1)` with wire 0 the most
//! significant digit of the dense index, which puts the circuit on the same
//! basis as [`crate::reps::qft_dense`].
//!
//! Each level `i` adds four gates: a Fourier transform on `x_i` controlled
//! on `z = 0`, a Fourier transform on `y_i`, the relabelling `P_k` on `y_i`
//! controlled by `z = k`, and the adder `V` writing `x_i + y_i` into `x_i`
//! when `z ≠ 0`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{HspError, Result};
use crate::group::GroupParams;
use crate::reps::{ComplexMatrix, Omega, DENSE_MATRIX_CAP};
use crate::zp::{inv_mod, Fp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    /// `|s⟩ ↦ p^{-1/2} Σ_t ω^{st} |t⟩`.
    QftZp { wire: usize },
    /// `|s⟩ ↦ p^{-1/2} Σ_t ω^{kst} |t⟩`.
    QftZpK { wire: usize, k: u32 },
    /// Fourier transform on `target` when `control` holds 0.
    QftZpZeroControlled { control: usize, target: usize },
    /// `|k, t⟩ ↦ |k, t/k⟩` for `k ≠ 0`, identity for `k = 0`.
    PkControlled { control: usize, target: usize },
    /// `V : |u, v⟩ ↦ |u + v, v⟩` on `(target, source)`.
    AdderV { target: usize, source: usize },
    /// `V` on `(target, source)` when `control` is nonzero.
    ControlledAdderV { control: usize, target: usize, source: usize },
}

impl Gate {
    pub fn wires(&self) -> Vec<usize> {
        match *self {
            Gate::QftZp { wire } | Gate::QftZpK { wire, .. } => vec![wire],
            Gate::QftZpZeroControlled { control, target } | Gate::PkControlled { control, target } => {
                vec![control, target]
            }
            Gate::AdderV { target, source } => vec![target, source],
            Gate::ControlledAdderV { control, target, source } => vec![control, target, source],
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Gate::QftZp { .. } => "QFT",
            Gate::QftZpK { .. } => "QFTK",
            Gate::QftZpZeroControlled { .. } => "QFT0C",
            Gate::PkControlled { .. } => "PKC",
            Gate::AdderV { .. } => "ADDV",
            Gate::ControlledAdderV { .. } => "CADDV",
        }
    }

    fn remap(&self, perm: &[usize]) -> Gate {
        match *self {
            Gate::QftZp { wire } => Gate::QftZp { wire: perm[wire] },
            Gate::QftZpK { wire, k } => Gate::QftZpK { wire: perm[wire], k },
            Gate::QftZpZeroControlled { control, target } => {
                Gate::QftZpZeroControlled { control: perm[control], target: perm[target] }
            }
            Gate::PkControlled { control, target } => Gate::PkControlled { control: perm[control], target: perm[target] },
            Gate::AdderV { target, source } => Gate::AdderV { target: perm[target], source: perm[source] },
            Gate::ControlledAdderV { control, target, source } => Gate::ControlledAdderV {
                control: perm[control],
                target: perm[target],
                source: perm[source],
            },
        }
    }

    /// Maps one basis state to its image as `(amplitude, digits)` pairs.
    fn act(&self, field: Fp, omega: &Omega, digits: &[u32]) -> Vec<(Complex64, Vec<u32>)> {
        let p = field.p();
        let fourier = |wire: usize, k: u32| -> Vec<(Complex64, Vec<u32>)> {
            let norm = (p as f64).sqrt().recip();
            (0..p)
                .map(|t| {
                    let mut d = digits.to_vec();
                    d[wire] = t;
                    (omega.pow(field.mul(k, field.mul(digits[wire], t))) * norm, d)
                })
                .collect()
        };
        let one = Complex64::new(1.0, 0.0);
        match *self {
            Gate::QftZp { wire } => fourier(wire, 1),
            Gate::QftZpK { wire, k } => fourier(wire, k),
            Gate::QftZpZeroControlled { control, target } => {
                if digits[control] == 0 {
                    fourier(target, 1)
                } else {
                    vec![(one, digits.to_vec())]
                }
            }
            Gate::PkControlled { control, target } => {
                let k = digits[control];
                let mut d = digits.to_vec();
                if k != 0 {
                    let kinv = inv_mod(k, field).expect("nonzero control");
                    d[target] = field.mul(kinv, digits[target]);
                }
                vec![(one, d)]
            }
            Gate::AdderV { target, source } => {
                let mut d = digits.to_vec();
                d[target] = field.add(digits[target], digits[source]);
                vec![(one, d)]
            }
            Gate::ControlledAdderV { control, target, source } => {
                let mut d = digits.to_vec();
                if digits[control] != 0 {
                    d[target] = field.add(digits[target], digits[source]);
                }
                vec![(one, d)]
            }
        }
    }
}

impl fmt::Display for Gate {
    /// `KIND wire[,wire..] [param]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wires: Vec<String> = self.wires().iter().map(|w| w.to_string()).collect();
        write!(f, "{} {}", self.kind(), wires.join(","))?;
        if let Gate::QftZpK { k, .. } = self {
            write!(f, " {k}")?;
        }
        Ok(())
    }
}

impl FromStr for Gate {
    type Err = HspError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || HspError::Parse(format!("bad gate line `{s}`"));
        let mut parts = s.split_whitespace();
        let kind = parts.next().ok_or_else(bad)?;
        let wires: Vec<usize> = parts
            .next()
            .ok_or_else(bad)?
            .split(',')
            .map(|w| w.parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let param = parts.next();
        if parts.next().is_some() {
            return Err(bad());
        }
        let gate = match (kind, wires.as_slice(), param) {
            ("QFT", &[wire], None) => Gate::QftZp { wire },
            ("QFTK", &[wire], Some(k)) => Gate::QftZpK { wire, k: k.parse().map_err(|_| bad())? },
            ("QFT0C", &[control, target], None) => Gate::QftZpZeroControlled { control, target },
            ("PKC", &[control, target], None) => Gate::PkControlled { control, target },
            ("ADDV", &[target, source], None) => Gate::AdderV { target, source },
            ("CADDV", &[control, target, source], None) => Gate::ControlledAdderV { control, target, source },
            _ => return Err(bad()),
        };
        Ok(gate)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    field: Fp,
    wires: usize,
    gates: Vec<Gate>,
}

/// Wire holding `x_i` (1-based `i`).
pub fn x_wire(n: usize, i: usize) -> usize {
    n - i + 1
}

/// Wire holding `y_i` (1-based `i`).
pub fn y_wire(n: usize, i: usize) -> usize {
    2 * n - i + 1
}

/// Circuit with `n` levels; `n = 0` is the transform over the center.
pub fn build_levels(field: Fp, n: usize) -> Circuit {
    let mut gates = vec![Gate::QftZp { wire: 0 }];
    for i in 1..=n {
        let (x, y) = (x_wire(n, i), y_wire(n, i));
        gates.push(Gate::QftZpZeroControlled { control: 0, target: x });
        gates.push(Gate::QftZp { wire: y });
        gates.push(Gate::PkControlled { control: 0, target: y });
        gates.push(Gate::ControlledAdderV { control: 0, target: x, source: y });
    }
    Circuit { field, wires: 2 * n + 1, gates }
}

pub fn build_circuit(params: &GroupParams) -> Circuit {
    build_levels(params.field(), params.n())
}

impl Circuit {
    pub fn new(field: Fp, wires: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            let ws = g.wires();
            let mut sorted = ws.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != ws.len() || ws.iter().any(|&w| w >= wires) {
                return Err(HspError::ConfigInvalid(format!("gate `{g}` has invalid wires")));
            }
        }
        Ok(Circuit { field, wires, gates })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn wires(&self) -> usize {
        self.wires
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    /// Relabels wire `w` as `perm[w]`. Used as a negative control.
    pub fn permute_wires(&self, perm: &[usize]) -> Circuit {
        assert_eq!(perm.len(), self.wires);
        Circuit { field: self.field, wires: self.wires, gates: self.gates.iter().map(|g| g.remap(perm)).collect() }
    }

    /// One gate per line.
    pub fn dump(&self) -> String {
        self.gates.iter().map(|g| format!("{g}\n")).collect()
    }

    pub fn parse_dump(field: Fp, wires: usize, text: &str) -> Result<Circuit> {
        let gates = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(Gate::from_str)
            .collect::<Result<Vec<_>>>()?;
        Circuit::new(field, wires, gates)
    }

    fn dim(&self) -> Result<usize> {
        let dim = (self.field.p() as u64).checked_pow(self.wires as u32).unwrap_or(u64::MAX);
        if dim > DENSE_MATRIX_CAP {
            return Err(HspError::TooLarge { dim, cap: DENSE_MATRIX_CAP });
        }
        Ok(dim as usize)
    }

    fn digits(&self, mut idx: usize) -> Vec<u32> {
        let p = self.field.p() as usize;
        let mut d = vec![0u32; self.wires];
        for w in (0..self.wires).rev() {
            d[w] = (idx % p) as u32;
            idx /= p;
        }
        d
    }

    fn index(&self, digits: &[u32]) -> usize {
        digits.iter().fold(0usize, |acc, &d| acc * self.field.p() as usize + d as usize)
    }

    fn apply_gate(&self, gate: &Gate, omega: &Omega, state: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
        for (i, amp) in state.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            for (c, d) in gate.act(self.field, omega, &self.digits(i)) {
                out[self.index(&d)] += c * amp;
            }
        }
        out
    }

    /// Dense matrix of a single gate embedded on this register.
    pub fn gate_unitary(&self, gate: &Gate) -> Result<ComplexMatrix> {
        let dim = self.dim()?;
        let omega = Omega::new(self.field.p());
        let mut m = ComplexMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut e = vec![Complex64::new(0.0, 0.0); dim];
            e[col] = Complex64::new(1.0, 0.0);
            for (row, v) in self.apply_gate(gate, &omega, &e).into_iter().enumerate() {
                m[(row, col)] = v;
            }
        }
        Ok(m)
    }

    /// Ordered product of all gates, first gate applied first.
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        let dim = self.dim()?;
        let omega = Omega::new(self.field.p());
        let mut m = ComplexMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut e = vec![Complex64::new(0.0, 0.0); dim];
            e[col] = Complex64::new(1.0, 0.0);
            for g in &self.gates {
                e = self.apply_gate(g, &omega, &e);
            }
            for (row, v) in e.into_iter().enumerate() {
                m[(row, col)] = v;
            }
        }
        Ok(m)
    }
}

pub fn circuit_unitary(c: &Circuit) -> Result<ComplexMatrix> {
    c.unitary()
}
