//! Deterministic benchmark circuit generators in the U3 + RZ + CNOT gate
//! set. These stand in for externally compiled benchmark corpora: they
//! reproduce the coarse structure of transverse-field Ising evolution,
//! ring-coupled QAOA, and unstructured random circuits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use super::{Circuit, CircuitError, LocatedGate};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchmarkFamily {
    Tfim,
    QaoaRing,
    Random,
}

impl std::str::FromStr for BenchmarkFamily {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tfim" => Ok(BenchmarkFamily::Tfim),
            "qaoa_ring" => Ok(BenchmarkFamily::QaoaRing),
            "random" => Ok(BenchmarkFamily::Random),
            other => Err(CircuitError::UnknownFamily(other.to_string())),
        }
    }
}

impl std::fmt::Display for BenchmarkFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BenchmarkFamily::Tfim => "tfim",
            BenchmarkFamily::QaoaRing => "qaoa_ring",
            BenchmarkFamily::Random => "random",
        })
    }
}

/// Generates a deterministic benchmark circuit.
///
/// Gate counts are closed-form in (n, depth):
/// - `tfim`: depth layers of n single-qubit U3 rotations followed by a
///   CNOT·RZ·CNOT pair coupling on each of the n-1 nearest-neighbor bonds,
///   so `depth · (n + 3(n-1)) = depth · (4n - 3)` gates.
/// - `qaoa_ring`: depth layers of CNOT·RZ·CNOT cost terms on each ring edge
///   (n edges for n ≥ 3, one for n = 2) plus n U3 mixers, so
///   `depth · (3·edges + n)` gates.
/// - `random`: `n · depth` gates, each a U3 on a uniform qubit or a CNOT on
///   a uniform ordered pair with equal probability.
///
/// All angles are drawn uniformly from (-π, π) from a stream seeded by
/// `seed`, so equal arguments always produce identical circuits.
pub fn gen_benchmark(
    family: BenchmarkFamily,
    n: usize,
    depth: usize,
    seed: u64,
) -> Result<Circuit, CircuitError> {
    if n < 2 {
        return Err(CircuitError::BadGeneratorParams(format!(
            "need at least 2 qubits, got {n}"
        )));
    }
    if depth < 1 {
        return Err(CircuitError::BadGeneratorParams("depth must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut angle = move || -> f64 { rng.gen_range(-PI..PI) };
    let mut c = Circuit::new(n);
    match family {
        BenchmarkFamily::Tfim => {
            for _ in 0..depth {
                for q in 0..n {
                    c.push(LocatedGate::u3(q, angle(), angle(), angle())).unwrap();
                }
                for q in 0..n - 1 {
                    c.push(LocatedGate::cnot(q, q + 1).unwrap()).unwrap();
                    c.push(LocatedGate::rz(q + 1, angle())).unwrap();
                    c.push(LocatedGate::cnot(q, q + 1).unwrap()).unwrap();
                }
            }
        }
        BenchmarkFamily::QaoaRing => {
            let edges: Vec<(usize, usize)> = if n == 2 {
                vec![(0, 1)]
            } else {
                (0..n).map(|q| (q, (q + 1) % n)).collect()
            };
            for _ in 0..depth {
                for &(a, b) in &edges {
                    c.push(LocatedGate::cnot(a, b).unwrap()).unwrap();
                    c.push(LocatedGate::rz(b, angle())).unwrap();
                    c.push(LocatedGate::cnot(a, b).unwrap()).unwrap();
                }
                for q in 0..n {
                    c.push(LocatedGate::u3(q, angle(), angle(), angle())).unwrap();
                }
            }
        }
        BenchmarkFamily::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..n * depth {
                if rng.gen_bool(0.5) {
                    let q = rng.gen_range(0..n);
                    let (t, p, l) = (
                        rng.gen_range(-PI..PI),
                        rng.gen_range(-PI..PI),
                        rng.gen_range(-PI..PI),
                    );
                    c.push(LocatedGate::u3(q, t, p, l)).unwrap();
                } else {
                    let a = rng.gen_range(0..n);
                    let mut b = rng.gen_range(0..n);
                    while b == a {
                        b = rng.gen_range(0..n);
                    }
                    c.push(LocatedGate::cnot(a, b).unwrap()).unwrap();
                }
            }
        }
    }
    Ok(c)
}
