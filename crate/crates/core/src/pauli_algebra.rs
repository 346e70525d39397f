//! Density vectors, diagonal Pauli channels and the algebra of a noisy CNOT
//! followed by a measurement of the destination qubit.
//!
//! Channels are kept diagonal in the Pauli basis: a one-qubit channel is the
//! triple `(x, y, z) = (N_XX, N_YY, N_ZZ)` with `N_II = 1` implicit. Two-qubit
//! diagonal quantities are 16-vectors in source-major order (see
//! [`crate::pauli`]). The dense [`Superoperator`] type only exists to
//! cross-check the diagonal formulas.

use num_complex::Complex64;

use crate::pauli::{Pauli, TwoPauli};
use crate::{Error, Result, VALIDITY_TOL};

/// `v(ρ) = (1, c_X, c_Y, c_Z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityVector {
    c: [f64; 4],
}

impl DensityVector {
    pub fn new(cx: f64, cy: f64, cz: f64) -> Result<Self> {
        let norm2 = cx * cx + cy * cy + cz * cz;
        if !norm2.is_finite() || norm2 > 1.0 + VALIDITY_TOL {
            return Err(Error::InvalidParameter(format!(
                "Bloch vector norm² {norm2} exceeds 1"
            )));
        }
        Ok(DensityVector {
            c: [1.0, cx, cy, cz],
        })
    }

    pub fn maximally_mixed() -> Self {
        DensityVector {
            c: [1.0, 0.0, 0.0, 0.0],
        }
    }

    /// The `+1` (`plus = true`) or `-1` eigenstate of a non-identity Pauli.
    pub fn eigenstate(axis: Pauli, plus: bool) -> Self {
        let mut c = [1.0, 0.0, 0.0, 0.0];
        if axis != Pauli::I {
            c[axis.index()] = if plus { 1.0 } else { -1.0 };
        }
        DensityVector { c }
    }

    pub fn components(&self) -> [f64; 4] {
        self.c
    }

    pub fn is_pure(&self) -> bool {
        let n = self.c[1] * self.c[1] + self.c[2] * self.c[2] + self.c[3] * self.c[3];
        (n - 1.0).abs() < 1e-9
    }
}

/// Probability of finding `rho` in the pure state `nu`, i.e. half the inner
/// product of the two density vectors. `nu` must be pure.
pub fn fidelity(rho: &DensityVector, nu: &DensityVector) -> f64 {
    0.5 * rho
        .c
        .iter()
        .zip(nu.c.iter())
        .map(|(a, b)| a * b)
        .sum::<f64>()
}

/// One-qubit diagonal channel `[1, x, y, z]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagonalChannel {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl DiagonalChannel {
    pub const IDENTITY: DiagonalChannel = DiagonalChannel {
        x: 1.0,
        y: 1.0,
        z: 1.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        DiagonalChannel { x, y, z }
    }

    /// Diagonal entry for a Pauli label; `I` maps to 1.
    pub fn get(&self, p: Pauli) -> f64 {
        match p {
            Pauli::I => 1.0,
            Pauli::X => self.x,
            Pauli::Y => self.y,
            Pauli::Z => self.z,
        }
    }

    pub fn as_vector(&self) -> [f64; 4] {
        [1.0, self.x, self.y, self.z]
    }

    /// Exchange bit- and phase-flip sectors (conjugation by Hadamard).
    pub fn hadamard(&self) -> Self {
        DiagonalChannel::new(self.z, self.y, self.x)
    }

    pub fn validate(&self) -> Result<()> {
        channel_to_dist(*self).map(|_| ())
    }

    pub fn max_abs_diff(&self, other: &DiagonalChannel) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }
}

/// Probabilities `(p_I, p_X, p_Y, p_Z)` of each one-qubit Pauli error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliDist {
    p: [f64; 4],
}

impl PauliDist {
    pub const PERFECT: PauliDist = PauliDist {
        p: [1.0, 0.0, 0.0, 0.0],
    };

    pub fn new(pi: f64, px: f64, py: f64, pz: f64) -> Result<Self> {
        Self::from_array([pi, px, py, pz])
    }

    pub fn from_array(p: [f64; 4]) -> Result<Self> {
        for (i, v) in p.iter().enumerate() {
            if !v.is_finite() || *v < -VALIDITY_TOL || *v > 1.0 + VALIDITY_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "p_{} = {v} outside [0, 1]",
                    Pauli::from_index(i)
                )));
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > VALIDITY_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
        }
        Ok(PauliDist {
            p: p.map(|v| v.clamp(0.0, 1.0)),
        })
    }

    /// Build from nonnegative weights, normalising them.
    pub fn from_weights(w: [f64; 4]) -> Result<Self> {
        let total: f64 = w.iter().sum();
        if total <= 0.0 || !total.is_finite() {
            return Err(Error::InvalidDistribution(format!("total weight {total}")));
        }
        Self::from_array(w.map(|v| v / total))
    }

    /// `(1 - p, 0, 0, p)`: phase flips only.
    pub fn phase_flip(p: f64) -> Result<Self> {
        Self::new(1.0 - p, 0.0, 0.0, p)
    }

    pub fn get(&self, p: Pauli) -> f64 {
        self.p[p.index()]
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.p
    }

    /// `p_I`.
    pub fn fidelity(&self) -> f64 {
        self.p[0]
    }

    /// Probability of a bit flip (`X` or `Y`).
    pub fn bit_flip(&self) -> f64 {
        self.p[1] + self.p[2]
    }

    /// Probability of a phase flip (`Z` or `Y`).
    pub fn phase_flip_prob(&self) -> f64 {
        self.p[3] + self.p[2]
    }
}

/// `x = 1 - 2(p_Y + p_Z)`, `y = 1 - 2(p_X + p_Z)`, `z = 1 - 2(p_X + p_Y)`.
pub fn dist_to_channel(d: PauliDist) -> DiagonalChannel {
    let [_, px, py, pz] = d.p;
    DiagonalChannel::new(
        1.0 - 2.0 * (py + pz),
        1.0 - 2.0 * (px + pz),
        1.0 - 2.0 * (px + py),
    )
}

/// ¼ times the Hadamard-pattern matrix applied to a diagonal vector `[1, x, y, z]`.
pub fn hadamard_pattern(v: [f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (i, o) in out.iter_mut().enumerate() {
        let row = Pauli::from_index(i);
        *o = 0.25
            * Pauli::ALL
                .iter()
                .map(|&col| row.sign(col) * v[col.index()])
                .sum::<f64>();
    }
    out
}

/// Inverse of [`dist_to_channel`]. Fails if any induced probability is
/// below `-1e-12`.
pub fn channel_to_dist(c: DiagonalChannel) -> Result<PauliDist> {
    let p = hadamard_pattern(c.as_vector());
    for (i, v) in p.iter().enumerate() {
        if !v.is_finite() || *v < -VALIDITY_TOL {
            return Err(Error::InvalidChannel {
                label: Pauli::from_index(i).to_string(),
                value: *v,
            });
        }
    }
    PauliDist::from_array(p.map(|v| v.max(0.0)))
}

/// Sequential application of two diagonal channels.
pub fn compose(a: DiagonalChannel, b: DiagonalChannel) -> DiagonalChannel {
    DiagonalChannel::new(a.x * b.x, a.y * b.y, a.z * b.z)
}

/// Sixteen diagonal entries indexed by [`TwoPauli`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diag16(pub [f64; 16]);

impl Diag16 {
    pub const ONES: Diag16 = Diag16([1.0; 16]);

    pub fn get(&self, s: Pauli, d: Pauli) -> f64 {
        self.0[TwoPauli::new(s, d).index()]
    }

    pub fn at(&self, l: TwoPauli) -> f64 {
        self.0[l.index()]
    }

    pub fn max_abs_diff(&self, other: &Diag16) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Diagonal entries `Q_{σσ'}` of the noise a CNOT gate adds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitDiagonalNoise {
    q: Diag16,
}

impl TwoQubitDiagonalNoise {
    pub const NOISELESS: TwoQubitDiagonalNoise = TwoQubitDiagonalNoise { q: Diag16::ONES };

    pub fn new(q: [f64; 16]) -> Result<Self> {
        if (q[0] - 1.0).abs() > VALIDITY_TOL {
            return Err(Error::InvalidParameter(format!(
                "Q_II = {} must be 1",
                q[0]
            )));
        }
        if let Some(v) = q
            .iter()
            .find(|v| !v.is_finite() || v.abs() > 1.0 + VALIDITY_TOL)
        {
            return Err(Error::InvalidParameter(format!("|Q| = {v} exceeds 1")));
        }
        let noise = TwoQubitDiagonalNoise { q: Diag16(q) };
        let p = noise.error_probabilities();
        for (i, v) in p.iter().enumerate() {
            if *v < -VALIDITY_TOL {
                return Err(Error::InvalidChannel {
                    label: TwoPauli::from_index(i).to_string(),
                    value: *v,
                });
            }
        }
        Ok(noise)
    }

    /// `Q_{σσ'} = Σ_τ p_τ · sign(τ, σσ')`.
    pub fn from_error_probabilities(p: &[f64; 16]) -> Result<Self> {
        let mut q = [0.0; 16];
        for (i, qi) in q.iter_mut().enumerate() {
            let l = TwoPauli::from_index(i);
            *qi = TwoPauli::all().map(|t| p[t.index()] * t.sign(l)).sum();
        }
        Self::new(q)
    }

    /// Inverse transform: `p_τ = (1/16) Σ_σ sign(τ, σ) Q_σ`.
    pub fn error_probabilities(&self) -> [f64; 16] {
        let mut p = [0.0; 16];
        for (i, pi) in p.iter_mut().enumerate() {
            let t = TwoPauli::from_index(i);
            *pi = TwoPauli::all()
                .map(|l| t.sign(l) * self.q.at(l))
                .sum::<f64>()
                / 16.0;
        }
        p
    }

    pub fn get(&self, s: Pauli, d: Pauli) -> f64 {
        self.q.get(s, d)
    }

    pub fn entries(&self) -> &Diag16 {
        &self.q
    }
}

/// Image of a two-qubit Pauli label under conjugation by CNOT (source is the
/// control). Bit flips propagate forward, phase flips backward.
pub fn cnot_image(l: TwoPauli) -> TwoPauli {
    let (sx, sz) = (l.source.x_bit(), l.source.z_bit());
    let (dx, dz) = (l.dest.x_bit(), l.dest.z_bit());
    TwoPauli::new(Pauli::from_bits(sx, sz ^ dz), Pauli::from_bits(dx ^ sx, dz))
}

/// Diagonal of `O(CNOT) ∘ (S ⊗ D) ∘ O(CNOT)`.
pub fn cnot_conjugate(s: DiagonalChannel, d: DiagonalChannel) -> Diag16 {
    let mut r = [0.0; 16];
    for l in TwoPauli::all() {
        let c = cnot_image(l);
        r[l.index()] = s.get(c.source) * d.get(c.dest);
    }
    Diag16(r)
}

/// `N_{σσ'} = Q_{σσ'} · R_{σσ'}`.
pub fn total_cnot_noise(
    q: &TwoQubitDiagonalNoise,
    s: DiagonalChannel,
    d: DiagonalChannel,
) -> Diag16 {
    let r = cnot_conjugate(s, d);
    let mut n = [0.0; 16];
    for (i, v) in n.iter_mut().enumerate() {
        *v = r.0[i] * q.q.0[i];
    }
    Diag16(n)
}

/// Accept (`G^II`) and reject (`G^IX`) branches after measuring the
/// destination in the `Z` basis. Component 0 of each branch is its
/// unnormalised weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementBranches {
    pub accept: [f64; 4],
    pub reject: [f64; 4],
}

impl MeasurementBranches {
    pub fn accept_weight(&self) -> f64 {
        self.accept[0]
    }

    pub fn reject_weight(&self) -> f64 {
        self.reject[0]
    }

    /// Source channel conditioned on no detected error.
    pub fn accept_channel(&self) -> DiagonalChannel {
        let w = self.accept[0];
        DiagonalChannel::new(self.accept[1] / w, self.accept[2] / w, self.accept[3] / w)
    }

    /// Source channel conditioned on a detected error, after the `IX` recovery.
    pub fn reject_channel(&self) -> Option<DiagonalChannel> {
        let w = self.reject[0];
        (w > 0.0).then(|| {
            DiagonalChannel::new(self.reject[1] / w, self.reject[2] / w, self.reject[3] / w)
        })
    }
}

/// Trace out the destination of the total noise `n` after a `Z` measurement
/// with measurement noise `m = 1 - 2 p_m`.
pub fn measure_traceout(n: &Diag16, m: f64) -> Result<MeasurementBranches> {
    if !(-1.0..=1.0).contains(&m) {
        return Err(Error::InvalidParameter(format!(
            "measurement noise m = {m}"
        )));
    }
    let mut accept = [0.0; 4];
    let mut reject = [0.0; 4];
    for s in Pauli::ALL {
        let a = n.get(s, Pauli::I);
        let b = n.get(s, Pauli::Z);
        accept[s.index()] = 0.5 * (a + m * b);
        reject[s.index()] = 0.5 * (a - m * b);
    }
    if accept[0] <= 0.0 {
        return Err(Error::DegenerateAcceptance(accept[0]));
    }
    Ok(MeasurementBranches { accept, reject })
}

/// Probability that measuring in the `axis` basis returns the correct
/// eigenvalue: `(1 + N_σσ)/2`.
pub fn measurement_correct_prob(c: DiagonalChannel, axis: Pauli) -> Result<f64> {
    if axis == Pauli::I {
        return Err(Error::InvalidParameter(
            "measurement axis must be X, Y or Z".into(),
        ));
    }
    Ok(0.5 * (1.0 + c.get(axis)))
}

/// Dense real superoperator on `n` qubits in the Pauli basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    n: usize,
    m: Vec<f64>,
}

impl Superoperator {
    pub fn identity(n: usize) -> Self {
        let dim = 1 << (2 * n);
        let mut m = vec![0.0; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = 1.0;
        }
        Superoperator { n, m }
    }

    pub fn from_diagonal(n: usize, diag: &[f64]) -> Self {
        let dim = 1 << (2 * n);
        assert_eq!(diag.len(), dim);
        let mut s = Self::zeros(n);
        for (i, v) in diag.iter().enumerate() {
            s.m[i * dim + i] = *v;
        }
        s
    }

    fn zeros(n: usize) -> Self {
        let dim = 1 << (2 * n);
        Superoperator {
            n,
            m: vec![0.0; dim * dim],
        }
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << (2 * self.n)
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.m[r * self.dim() + c]
    }

    /// `self ∘ rhs`: apply `rhs` first.
    pub fn compose(&self, rhs: &Superoperator) -> Superoperator {
        assert_eq!(self.n, rhs.n);
        let dim = self.dim();
        let mut out = Self::zeros(self.n);
        for i in 0..dim {
            for k in 0..dim {
                let a = self.m[i * dim + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..dim {
                    out.m[i * dim + j] += a * rhs.m[k * dim + j];
                }
            }
        }
        out
    }

    /// `S ⊗ D` of two diagonal one-qubit channels, source-major.
    pub fn tensor_diagonal(s: DiagonalChannel, d: DiagonalChannel) -> Superoperator {
        let diag: Vec<f64> = TwoPauli::all()
            .map(|l| s.get(l.source) * d.get(l.dest))
            .collect();
        Self::from_diagonal(2, &diag)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i)).collect()
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                if i != j {
                    worst = worst.max(self.get(i, j).abs());
                }
            }
        }
        worst
    }

    /// `M_{στ} = 2^{-n} Re Tr(σ U τ U†)` for a unitary `U` given row-major.
    pub fn from_unitary(n: usize, u: &[Complex64]) -> Superoperator {
        let hdim = 1 << n;
        assert_eq!(u.len(), hdim * hdim);
        let paulis: Vec<Vec<Complex64>> = (0..(1usize << (2 * n)))
            .map(|idx| pauli_matrix(n, idx))
            .collect();
        let udag = dagger(u, hdim);
        let mut out = Self::zeros(n);
        let dim = out.dim();
        for (t, tau) in paulis.iter().enumerate() {
            let conj = matmul(&matmul(u, tau, hdim), &udag, hdim);
            for (s, sigma) in paulis.iter().enumerate() {
                let tr: Complex64 = (0..hdim)
                    .map(|i| {
                        (0..hdim)
                            .map(|k| sigma[i * hdim + k] * conj[k * hdim + i])
                            .sum::<Complex64>()
                    })
                    .sum();
                out.m[s * dim + t] = tr.re / hdim as f64;
            }
        }
        out
    }
}

fn pauli_1q(p: Pauli) -> [Complex64; 4] {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match p {
        Pauli::I => [one, o, o, one],
        Pauli::X => [o, one, one, o],
        Pauli::Y => [o, -i, i, o],
        Pauli::Z => [one, o, o, -one],
    }
}

/// Pauli matrix for a label index over `n` qubits (first qubit most significant).
fn pauli_matrix(n: usize, idx: usize) -> Vec<Complex64> {
    let mut m = vec![Complex64::new(1.0, 0.0)];
    let mut dim = 1;
    for q in (0..n).rev() {
        let p = pauli_1q(Pauli::from_index(idx >> (2 * q)));
        let nd = dim * 2;
        let mut next = vec![Complex64::new(0.0, 0.0); nd * nd];
        for r in 0..dim {
            for c in 0..dim {
                for pr in 0..2 {
                    for pc in 0..2 {
                        next[(r * 2 + pr) * nd + c * 2 + pc] = m[r * dim + c] * p[pr * 2 + pc];
                    }
                }
            }
        }
        m = next;
        dim = nd;
    }
    m
}

fn matmul(a: &[Complex64], b: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            for j in 0..dim {
                out[i * dim + j] += a[i * dim + k] * b[k * dim + j];
            }
        }
    }
    out
}

fn dagger(a: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            out[j * dim + i] = a[i * dim + j].conj();
        }
    }
    out
}

/// Superoperator of CNOT (qubit 0 controls qubit 1) in the Pauli basis.
pub fn build_cnot_superoperator() -> Superoperator {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    #[rustfmt::skip]
    let u = [
        o, z, z, z,
        z, o, z, z,
        z, z, z, o,
        z, z, o, z,
    ];
    Superoperator::from_unitary(2, &u)
}

/// Encoder of the two-qubit code `{|00⟩, |10⟩}` with stabilizer `{II, IZ}`:
/// column `σ` is `σI + σZ`.
fn c2_encoder() -> Vec<[f64; 4]> {
    let mut e = vec![[0.0; 4]; 16];
    for s in Pauli::ALL {
        e[TwoPauli::new(s, Pauli::I).index()][s.index()] = 1.0;
        e[TwoPauli::new(s, Pauli::Z).index()][s.index()] = 1.0;
    }
    e
}

/// `2^{-(n-k)} Eᵗ ∘ map ∘ E` for a 16×4 encoder.
fn logical_map(e: &[[f64; 4]], map: &Superoperator) -> [[f64; 4]; 4] {
    let mut g = [[0.0; 4]; 4];
    for (r, row) in g.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..16 {
                if e[i][r] == 0.0 {
                    continue;
                }
                for j in 0..16 {
                    acc += e[i][r] * map.get(i, j) * e[j][c];
                }
            }
            *v = 0.5 * acc;
        }
    }
    g
}

fn recovery_superop(r: TwoPauli) -> Superoperator {
    let diag: Vec<f64> = TwoPauli::all().map(|l| r.sign(l)).collect();
    Superoperator::from_diagonal(2, &diag)
}

/// Dense noise `Q ∘ O(CNOT) ∘ (S ⊗ D) ∘ O(CNOT)`, followed by a bit flip
/// channel `[1, 1, m, m]` on the destination that models a faulty `Z`
/// measurement.
pub fn dense_total_noise(
    s: DiagonalChannel,
    d: DiagonalChannel,
    q: &TwoQubitDiagonalNoise,
    m: f64,
) -> Superoperator {
    let cnot = build_cnot_superoperator();
    let qd = Superoperator::from_diagonal(2, &q.entries().0);
    let sd = Superoperator::tensor_diagonal(s, d);
    let meas =
        Superoperator::tensor_diagonal(DiagonalChannel::IDENTITY, DiagonalChannel::new(1.0, m, m));
    meas.compose(&qd).compose(&cnot).compose(&sd).compose(&cnot)
}

/// Maximum deviation between the code-formalism maps `G^{II}`, `G^{IX}`
/// and the branches from [`measure_traceout`], with faulty measurement `m`.
pub fn dense_crosscheck_with_measurement(
    s: DiagonalChannel,
    d: DiagonalChannel,
    q: &TwoQubitDiagonalNoise,
    m: f64,
) -> Result<f64> {
    let dense = dense_total_noise(s, d, q, m);
    let e = c2_encoder();
    let branches = measure_traceout(&total_cnot_noise(q, s, d), m)?;
    let mut worst: f64 = 0.0;
    for (r, expect) in [
        (TwoPauli::new(Pauli::I, Pauli::I), branches.accept),
        (TwoPauli::new(Pauli::I, Pauli::X), branches.reject),
    ] {
        let g = logical_map(&e, &recovery_superop(r).compose(&dense));
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { expect[i] } else { 0.0 };
                worst = worst.max((g[i][j] - want).abs());
            }
        }
    }
    Ok(worst)
}

/// [`dense_crosscheck_with_measurement`] with a perfect measurement.
pub fn dense_crosscheck(
    s: DiagonalChannel,
    d: DiagonalChannel,
    q: &TwoQubitDiagonalNoise,
) -> Result<f64> {
    dense_crosscheck_with_measurement(s, d, q, 1.0)
}

/// Maximum deviation between the logical maps computed in the repetition
/// code frame (CNOT applied at the end) and in the `{II, IZ}` frame.
pub fn c1_c2_frame_deviation(
    s: DiagonalChannel,
    d: DiagonalChannel,
    q: &TwoQubitDiagonalNoise,
) -> f64 {
    let cnot = build_cnot_superoperator();
    let qd = Superoperator::from_diagonal(2, &q.entries().0);
    let sd = Superoperator::tensor_diagonal(s, d);
    let n_c2 = qd.compose(&cnot).compose(&sd).compose(&cnot);
    let n_c1 = cnot.compose(&qd).compose(&cnot).compose(&sd);
    let e2 = c2_encoder();
    // E1 = O(CNOT) E2, column by column
    let mut e1 = vec![[0.0; 4]; 16];
    for (i, row) in e1.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = (0..16).map(|j| cnot.get(i, j) * e2[j][c]).sum();
        }
    }
    let mut worst: f64 = 0.0;
    for r in [
        TwoPauli::new(Pauli::I, Pauli::I),
        TwoPauli::new(Pauli::I, Pauli::X),
    ] {
        let g2 = logical_map(&e2, &recovery_superop(r).compose(&n_c2));
        let g1 = logical_map(&e1, &recovery_superop(cnot_image(r)).compose(&n_c1));
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((g1[i][j] - g2[i][j]).abs());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    fn random_channel() -> impl Strategy<Value = DiagonalChannel> {
        (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64).prop_map(|(a, b, c, d)| {
            let t = a + b + c + d + 1e-9;
            dist_to_channel(
                PauliDist::from_array([a / t, b / t, c / t, 1.0 - (a + b + c) / t]).unwrap(),
            )
        })
    }

    fn random_q() -> impl Strategy<Value = TwoQubitDiagonalNoise> {
        proptest::collection::vec(0.0..1.0f64, 16).prop_map(|w| {
            // most of the mass on II so the noise looks like a gate
            let mut p = [0.0; 16];
            p[0] = 7.0;
            for (i, v) in w.iter().enumerate() {
                p[i] += v;
            }
            let t: f64 = p.iter().sum();
            TwoQubitDiagonalNoise::from_error_probabilities(&p.map(|v| v / t)).unwrap()
        })
    }

    #[test]
    fn dist_to_channel_examples() {
        let id = dist_to_channel(PauliDist::PERFECT);
        assert_eq!(id, DiagonalChannel::IDENTITY);
        let dep = dist_to_channel(PauliDist::new(0.25, 0.25, 0.25, 0.25).unwrap());
        assert!(close(dep.x, 0.0) && close(dep.y, 0.0) && close(dep.z, 0.0));
        let p = 0.13;
        let xflip = dist_to_channel(PauliDist::new(1.0 - p, p, 0.0, 0.0).unwrap());
        assert!(
            close(xflip.x, 1.0) && close(xflip.y, 1.0 - 2.0 * p) && close(xflip.z, 1.0 - 2.0 * p)
        );
    }

    #[test]
    fn channel_to_dist_examples() {
        assert_eq!(
            channel_to_dist(DiagonalChannel::IDENTITY).unwrap(),
            PauliDist::PERFECT
        );
        let d = channel_to_dist(DiagonalChannel::new(0.0, 0.0, 0.0)).unwrap();
        for v in d.as_array() {
            assert!(close(v, 0.25));
        }
        // x = y = z = -1 has p_I = -½
        assert!(matches!(
            channel_to_dist(DiagonalChannel::new(-1.0, -1.0, -1.0)),
            Err(Error::InvalidChannel { .. })
        ));
    }

    #[test]
    fn compose_scalar_formula() {
        let (p1, p2) = (0.1, 0.07);
        let a = DiagonalChannel::new(1.0 - 2.0 * p1, 1.0, 1.0);
        let b = DiagonalChannel::new(1.0 - 2.0 * p2, 1.0, 1.0);
        let c = compose(a, b);
        assert!(close(c.x, 1.0 - 2.0 * (p1 + p2 - 2.0 * p1 * p2)));
        assert_eq!(compose(a, DiagonalChannel::IDENTITY), a);
    }

    #[test]
    fn cnot_conjugate_matches_printed_table() {
        let s = DiagonalChannel::new(0.9, 0.8, 0.7);
        let d = DiagonalChannel::new(0.6, 0.5, 0.4);
        let r = cnot_conjugate(s, d);
        assert!(close(r.get(Pauli::I, Pauli::Y), 0.35));
        // rows σ = I, X, Y, Z; columns I, X, Y, Z as (source, dest) factors
        use Pauli::*;
        let table = [
            [(I, I), (I, X), (Z, Y), (Z, Z)],
            [(X, X), (X, I), (Y, Z), (Y, Y)],
            [(Y, X), (Y, I), (X, Z), (X, Y)],
            [(Z, I), (Z, X), (I, Y), (I, Z)],
        ];
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                let (fs, fd) = table[a.index()][b.index()];
                assert!(close(r.get(a, b), s.get(fs) * d.get(fd)), "{a}{b}");
            }
        }
        assert_eq!(
            cnot_conjugate(DiagonalChannel::IDENTITY, DiagonalChannel::IDENTITY),
            Diag16::ONES
        );
    }

    #[test]
    fn cnot_superoperator_structure() {
        let c = build_cnot_superoperator();
        let cc = c.compose(&c);
        assert_eq!(cc.max_off_diagonal(), 0.0);
        assert!(cc.diagonal().iter().all(|v| close(*v, 1.0)));
        let idx = |s: &str| TwoPauli::parse(s).unwrap().index();
        for (a, b) in [("XI", "XX"), ("IZ", "ZZ"), ("IY", "ZY"), ("YI", "YX")] {
            assert!(close(c.get(idx(b), idx(a)).abs(), 1.0));
            assert!(close(c.get(idx(a), idx(b)).abs(), 1.0));
        }
        for fixed in ["II", "IX", "ZI", "ZX"] {
            assert!(close(c.get(idx(fixed), idx(fixed)), 1.0));
        }
        // the label map agrees with the dense matrix
        for l in TwoPauli::all() {
            assert!(close(c.get(cnot_image(l).index(), l.index()).abs(), 1.0));
        }
        let ones = Superoperator::from_diagonal(2, &[1.0; 16]);
        assert_eq!(c.compose(&ones).compose(&c).diagonal(), vec![1.0; 16]);
    }

    #[test]
    fn total_noise_entries() {
        let s = DiagonalChannel::new(0.9, 0.8, 0.7);
        let d = DiagonalChannel::new(0.6, 0.5, 0.4);
        assert_eq!(
            total_cnot_noise(&TwoQubitDiagonalNoise::NOISELESS, s, d),
            cnot_conjugate(s, d)
        );
        let mut probs = [0.004; 16];
        probs[0] = 0.94;
        probs[TwoPauli::parse("ZZ").unwrap().index()] = 0.0;
        probs[TwoPauli::parse("IX").unwrap().index()] = 0.008;
        let q = TwoQubitDiagonalNoise::from_error_probabilities(&probs).unwrap();
        let n = total_cnot_noise(&q, s, d);
        assert!(close(
            n.get(Pauli::Z, Pauli::Z),
            d.z * q.get(Pauli::Z, Pauli::Z)
        ));
        assert!(close(
            n.get(Pauli::X, Pauli::Z),
            s.y * d.y * q.get(Pauli::X, Pauli::Z)
        ));
    }

    #[test]
    fn traceout_noiseless_and_structure() {
        let b = measure_traceout(&Diag16::ONES, 1.0).unwrap();
        assert!(close(b.accept_weight(), 1.0));
        assert_eq!(b.accept_channel(), DiagonalChannel::IDENTITY);
        assert!(close(b.reject_weight(), 0.0));

        let s = DiagonalChannel::new(0.9, 0.8, 0.7);
        let d = DiagonalChannel::new(0.6, 0.5, 0.4);
        let mut qv = [0.97; 16];
        qv[0] = 1.0;
        let q = TwoQubitDiagonalNoise::new(qv).unwrap();
        let n = total_cnot_noise(&q, s, d);
        let a = [1.0, s.x * d.x * 0.97, s.y * d.x * 0.97, s.z * 0.97];
        let bb = [
            s.z * d.z * 0.97,
            s.y * d.y * 0.97,
            s.x * d.y * 0.97,
            d.z * 0.97,
        ];
        let m = 0.9;
        let br = measure_traceout(&n, m).unwrap();
        for i in 0..4 {
            assert!(close(br.accept[i], 0.5 * (a[i] + m * bb[i])));
            assert!(close(br.reject[i], 0.5 * (a[i] - m * bb[i])));
        }
    }

    #[test]
    fn degenerate_acceptance_is_an_error() {
        let mut n = Diag16::ONES;
        n.0[TwoPauli::parse("IZ").unwrap().index()] = -1.0;
        assert!(matches!(
            measure_traceout(&n, 1.0),
            Err(Error::DegenerateAcceptance(_))
        ));
    }

    #[test]
    fn measurement_probabilities() {
        assert!(close(
            measurement_correct_prob(DiagonalChannel::IDENTITY, Pauli::Z).unwrap(),
            1.0
        ));
        let c = DiagonalChannel::new(0.6, 0.7, 0.8);
        assert!(close(measurement_correct_prob(c, Pauli::Z).unwrap(), 0.9));
        assert!(measurement_correct_prob(c, Pauli::I).is_err());
        // average over the four initial/measured eigenvalue cases of a diagonal channel
        for axis in [Pauli::X, Pauli::Y, Pauli::Z] {
            let nss = c.get(axis);
            let mut correct = 0.0;
            for li in [1.0, -1.0] {
                for lm in [1.0, -1.0] {
                    if li == lm {
                        correct += 0.5 * (1.0 + li * lm * nss) / 2.0;
                    }
                }
            }
            assert!(close(correct, measurement_correct_prob(c, axis).unwrap()));
        }
    }

    #[test]
    fn fidelity_examples() {
        let zero = DensityVector::eigenstate(Pauli::Z, true);
        let one = DensityVector::eigenstate(Pauli::Z, false);
        assert!(close(fidelity(&zero, &zero), 1.0));
        assert!(close(fidelity(&one, &zero), 0.0));
        assert!(close(
            fidelity(
                &DensityVector::maximally_mixed(),
                &DensityVector::eigenstate(Pauli::X, true)
            ),
            0.5
        ));
        assert!(zero.is_pure());
        assert!(DensityVector::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn dense_crosscheck_noiseless() {
        let dev = dense_crosscheck(
            DiagonalChannel::IDENTITY,
            DiagonalChannel::IDENTITY,
            &TwoQubitDiagonalNoise::NOISELESS,
        )
        .unwrap();
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn two_qubit_noise_validation() {
        let mut q = [1.0; 16];
        q[0] = 0.9;
        assert!(TwoQubitDiagonalNoise::new(q).is_err());
        let mut q = [1.0; 16];
        q[3] = -1.0; // only IZ flipped: not a probability mixture
        assert!(TwoQubitDiagonalNoise::new(q).is_err());
    }

    proptest! {
        #[test]
        fn channel_dist_roundtrip(c in random_channel()) {
            let back = dist_to_channel(channel_to_dist(c).unwrap());
            prop_assert!(back.max_abs_diff(&c) < 1e-12);
        }

        #[test]
        fn compose_commutes_and_associates(a in random_channel(), b in random_channel(), c in random_channel()) {
            prop_assert!(compose(a, b).max_abs_diff(&compose(b, a)) < 1e-15);
            prop_assert!(compose(compose(a, b), c).max_abs_diff(&compose(a, compose(b, c))) < 1e-15);
            prop_assert!(compose(a, b).validate().is_ok());
        }

        #[test]
        fn diagonal_noise_matches_dense_product(s in random_channel(), d in random_channel(), q in random_q()) {
            let dense = dense_total_noise(s, d, &q, 1.0);
            let n = total_cnot_noise(&q, s, d);
            prop_assert!(dense.max_off_diagonal() < 1e-12);
            for (i, v) in dense.diagonal().iter().enumerate() {
                prop_assert!((v - n.0[i]).abs() < 1e-12);
            }
            let r = cnot_conjugate(s, d);
            let c = build_cnot_superoperator();
            let rd = c.compose(&Superoperator::tensor_diagonal(s, d)).compose(&c);
            for (i, v) in rd.diagonal().iter().enumerate() {
                prop_assert!((v - r.0[i]).abs() < 1e-12);
            }
        }

        #[test]
        fn branches_conserve_probability(s in random_channel(), d in random_channel(), q in random_q(), m in 0.0..1.0f64) {
            let b = measure_traceout(&total_cnot_noise(&q, s, d), m).unwrap();
            prop_assert!((b.accept_weight() + b.reject_weight() - 1.0).abs() < 1e-12);
            prop_assert!(b.accept_channel().validate().is_ok());
            if let Some(r) = b.reject_channel() {
                if b.reject_weight() > 1e-9 {
                    prop_assert!(r.validate().is_ok());
                }
            }
        }

        #[test]
        fn dense_crosscheck_agrees(s in random_channel(), d in random_channel(), q in random_q(), m in 0.0..1.0f64) {
            prop_assert!(dense_crosscheck_with_measurement(s, d, &q, m).unwrap() < 1e-12);
            prop_assert!(c1_c2_frame_deviation(s, d, &q) < 1e-12);
        }
    }
}
