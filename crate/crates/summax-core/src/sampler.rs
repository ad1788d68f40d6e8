//! Seeded random generation: one-sided β-stable summands, Fréchet maxima,
//! the dependent-pair construction (W, J) attracted to a given sum-max
//! stable law, rescaled sum/max aggregates, and compound-Poisson
//! accompanying laws.
//!
//! All sampling flows through [`RandomStream`], a ChaCha-backed generator
//! addressed by (seed, stream_id). Identical addresses reproduce identical
//! draw sequences bit for bit on the same build; distinct stream ids give
//! independent streams, which is how parallel Monte Carlo stays
//! reproducible.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Open01, Poisson, StandardNormal};

use crate::measures::{MixingKind, MixingMeasure, SumMaxStableParams};
use crate::special::gamma_fn;

/// One draw of the pair construction: `w` the nonnegative summand, `j` the
/// (possibly negative) max component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSample {
    pub w: f64,
    pub j: f64,
}

// x^e on the sampler hot paths; halves and thirds cover the common
// dilation exponents β/α and 1/γ and are several times cheaper than powf.
// The squared form is only safe away from overflow.
#[inline]
fn fast_pow(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else if e == 0.5 {
        x.sqrt()
    } else if e == 1.0 / 3.0 {
        x.cbrt()
    } else if e == 2.0 / 3.0 && x < 1e150 {
        (x * x).cbrt()
    } else {
        x.powf(e)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn derive_stream_id(parent: u64, child: u64) -> u64 {
    splitmix64(parent ^ splitmix64(child.wrapping_add(0x6A09_E667_F3BC_C909)))
}

/// Seeded, splittable pseudo-random source.
///
/// A stream is single-owner: it must not be shared across threads. Parallel
/// work splits substreams by index *before* distribution, so the result of a
/// job depends only on (seed, stream_id, index scheme), never on scheduling.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Child stream `child` of this stream's address, at its start position.
    /// The derivation is a fixed splitmix64 hash, so substream layouts are
    /// part of the reproducibility contract.
    pub fn substream(&self, child: u64) -> Self {
        Self::new(self.seed, derive_stream_id(self.stream_id, child))
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
}

/// Exact sampler for the one-sided β-stable law with Laplace transform
/// E e^{−sD} = exp(−K Γ(1−β) s^β), via Kanter's representation
/// S = (A(θ)/E)^{(1−β)/β} with θ uniform on (0, π) and E unit exponential,
/// rescaled by (K Γ(1−β))^{1/β}. No series truncation is involved.
#[derive(Debug, Clone, Copy)]
pub struct StableSampler {
    beta: f64,
    scale: f64,
}

impl StableSampler {
    pub fn new(beta: f64, k: f64) -> Self {
        assert!(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
        assert!(k > 0.0, "K must be positive");
        let scale = (k * gamma_fn(1.0 - beta).expect("1-beta in (0,1)")).powf(1.0 / beta);
        Self { beta, scale }
    }

    /// Draw with E e^{−s·draw} = exp(−K Γ(1−β) s^β); strictly positive.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        let theta = std::f64::consts::PI * u;
        let e: f64 = rng.sample::<f64, _>(Exp1).max(f64::MIN_POSITIVE);
        let beta = self.beta;
        let s = if beta == 0.5 {
            // A(θ) reduces to 1/(4 cos²(θ/2)) at β = 1/2.
            let c = (0.5 * theta).cos();
            1.0 / (4.0 * e * c * c)
        } else {
            let log_s = (beta * theta).sin().ln()
                + ((1.0 - beta) / beta) * (((1.0 - beta) * theta).sin().ln() - e.ln())
                - theta.sin().ln() / beta;
            log_s.exp()
        };
        self.scale * s
    }
}

/// Inverse-CDF sampler for the α-Fréchet law P(X ≤ x) = exp(−C x^{−α}).
#[derive(Debug, Clone, Copy)]
struct FrechetSampler {
    inv_alpha: f64,
    c: f64,
}

impl FrechetSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let e: f64 = rng.sample::<f64, _>(Exp1).max(f64::MIN_POSITIVE);
        (self.c / e).powf(self.inv_alpha)
    }
}

#[derive(Debug, Clone)]
enum OmegaSampler {
    Point(f64),
    Discrete { positions: Vec<f64>, cumulative: Vec<f64> },
    Frechet { inv_gamma: f64, scale: f64 },
    StdNormal,
}

impl OmegaSampler {
    fn new(omega: &MixingMeasure) -> Self {
        match omega.kind() {
            MixingKind::PointMass { u } => Self::Point(*u),
            MixingKind::Discrete { atoms } => {
                let positions = atoms.iter().map(|a| a.u).collect();
                let mut cumulative = Vec::with_capacity(atoms.len());
                let mut acc = 0.0;
                for a in atoms {
                    acc += a.w;
                    cumulative.push(acc);
                }
                Self::Discrete {
                    positions,
                    cumulative,
                }
            }
            MixingKind::Frechet { gamma, scale } => Self::Frechet {
                inv_gamma: 1.0 / gamma,
                scale: *scale,
            },
            MixingKind::StdNormal => Self::StdNormal,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Point(u) => *u,
            Self::Discrete {
                positions,
                cumulative,
            } => {
                let v: f64 = rng.random();
                let idx = cumulative
                    .iter()
                    .position(|c| v < *c)
                    .unwrap_or(positions.len() - 1);
                positions[idx]
            }
            Self::Frechet { inv_gamma, scale } => {
                let e: f64 = rng.sample::<f64, _>(Exp1).max(f64::MIN_POSITIVE);
                fast_pow(scale / e, *inv_gamma)
            }
            Self::StdNormal => rng.sample(StandardNormal),
        }
    }
}

/// Prepared sampler for the dependent pair (W, J) of the constructive
/// attraction theorem: W exactly β-stable, J̄ = W^{β/α}·Z with Z ~ ω, and
/// (when C > 0) J = J̄ ∨ J̃ with J̃ independent α-Fréchet. The output lies in
/// the strict sum-max domain of normal attraction of the law `params`, with
/// norming a_n = n^{−1/β}, b_n = n^{−1/α}.
#[derive(Debug, Clone)]
pub struct PairSampler {
    stable: StableSampler,
    omega: OmegaSampler,
    dilation_exp: f64,
    frechet: Option<FrechetSampler>,
}

impl PairSampler {
    pub fn new(params: &SumMaxStableParams) -> Self {
        let frechet = (params.c() > 0.0).then(|| FrechetSampler {
            inv_alpha: 1.0 / params.alpha(),
            c: params.c(),
        });
        Self {
            stable: StableSampler::new(params.beta(), params.k()),
            omega: OmegaSampler::new(params.omega()),
            dilation_exp: params.beta() / params.alpha(),
            frechet,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PairSample {
        let w = self.stable.sample(rng);
        let z = self.omega.sample(rng);
        let j_bar = fast_pow(w, self.dilation_exp) * z;
        let j = match &self.frechet {
            Some(f) => j_bar.max(f.sample(rng)),
            None => j_bar,
        };
        PairSample { w, j }
    }
}

/// Prepared sampler for the rescaled aggregate
/// (n^{−1/β} Σ W_i, n^{−1/α} ⋁ J_i) over n pair draws.
#[derive(Debug, Clone)]
pub struct SumMaxSampler {
    pair: PairSampler,
    n: u64,
    a_n: f64,
    b_n: f64,
}

impl SumMaxSampler {
    pub fn new(params: &SumMaxStableParams, n: u64) -> Self {
        assert!(n >= 1, "aggregate size must be at least 1");
        Self {
            pair: PairSampler::new(params),
            n,
            a_n: (n as f64).powf(-1.0 / params.beta()),
            b_n: (n as f64).powf(-1.0 / params.alpha()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PairSample {
        let mut sum = 0.0;
        let mut max = f64::NEG_INFINITY;
        for _ in 0..self.n {
            let p = self.pair.sample(rng);
            sum += p.w;
            if p.j > max {
                max = p.j;
            }
        }
        PairSample {
            w: self.a_n * sum,
            j: self.b_n * max,
        }
    }
}

/// One draw D with E e^{−sD} = exp(−K Γ(1−β) s^β).
pub fn sample_one_sided_stable(beta: f64, k: f64, stream: &mut RandomStream) -> f64 {
    StableSampler::new(beta, k).sample(stream)
}

/// One draw of the α-Fréchet law P(X ≤ x) = exp(−C x^{−α}).
pub fn sample_frechet(alpha: f64, c: f64, stream: &mut RandomStream) -> f64 {
    assert!(alpha > 0.0 && c > 0.0, "alpha and C must be positive");
    FrechetSampler {
        inv_alpha: 1.0 / alpha,
        c,
    }
    .sample(stream)
}

/// One draw of the dependent pair (W, J); see [`PairSampler`].
pub fn sample_pair(params: &SumMaxStableParams, stream: &mut RandomStream) -> PairSample {
    PairSampler::new(params).sample(stream)
}

/// One draw of (n^{−1/β} S(n), n^{−1/α} M(n)) over n independent pairs.
pub fn sample_sum_max(
    params: &SumMaxStableParams,
    n: u64,
    stream: &mut RandomStream,
) -> PairSample {
    SumMaxSampler::new(params, n).sample(stream)
}

/// One draw of the accompanying compound-Poisson law Π(c, μ): N ~ Poisson(c)
/// sum-max convolution powers of the pair law, with the empty convolution
/// ε_{(0, x₀)}.
pub fn sample_compound_poisson(
    c: f64,
    params: &SumMaxStableParams,
    x0: f64,
    stream: &mut RandomStream,
) -> PairSample {
    assert!(c > 0.0, "Poisson intensity must be positive");
    let n = Poisson::new(c).expect("valid intensity").sample(stream) as u64;
    if n == 0 {
        return PairSample { w: 0.0, j: x0 };
    }
    let pair = PairSampler::new(params);
    let mut sum = 0.0;
    let mut max = f64::NEG_INFINITY;
    for _ in 0..n {
        let p = pair.sample(stream);
        sum += p.w;
        if p.j > max {
            max = p.j;
        }
    }
    PairSample { w: sum, j: max }
}
