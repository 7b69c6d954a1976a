//! Shared test helpers: a direct-evaluation PDA reference and statistical
//! comparisons.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stbc_pda::channel::{apply_channel, sample_iid_channel, SnrSpec};
use stbc_pda::sim::BerRecord;
use stbc_pda::stbc::{
    bits_to_symbol_vector, linearize, realify_received, BitLinearModel, QamSpec, StbcCode, StbcParams,
};
use stbc_pda::Bit;

/// PDA evaluated term by term: conditional means as explicit sums over the
/// other bits, the conditional covariance summed from scratch and inverted
/// by LU, and `log beta` as a difference of quadratic forms.
pub struct DirectPda {
    pub pplus: Vec<f64>,
    pub llr: Vec<f64>,
    pub clamp: f64,
}

impl DirectPda {
    pub fn new(bits: usize, clamp: f64) -> Self {
        Self { pplus: vec![0.5; bits], llr: vec![0.0; bits], clamp }
    }

    pub fn from_probabilities(pplus: Vec<f64>, clamp: f64) -> Self {
        let llr = pplus.iter().map(|&p| (p / (1.0 - p)).ln()).collect();
        Self { pplus, llr, clamp }
    }

    pub fn means(&self, m: &BitLinearModel, col: usize) -> (DVector<f64>, DVector<f64>) {
        let rows = m.h.nrows();
        let mut rest = DVector::zeros(rows);
        for s in 0..m.h.ncols() {
            if s == col {
                continue;
            }
            let w = self.pplus[s] - (1.0 - self.pplus[s]);
            for r in 0..rows {
                rest[r] += w * m.h[(r, s)];
            }
        }
        let h = m.h.column(col);
        (&rest + h, &rest - h)
    }

    pub fn conditional_cov(&self, m: &BitLinearModel, col: usize) -> DMatrix<f64> {
        let rows = m.h.nrows();
        let mut c = DMatrix::identity(rows, rows) * m.sigma2;
        for s in 0..m.h.ncols() {
            if s == col {
                continue;
            }
            let v = 4.0 * self.pplus[s] * (1.0 - self.pplus[s]);
            for a in 0..rows {
                for b in 0..rows {
                    c[(a, b)] += v * m.h[(a, s)] * m.h[(b, s)];
                }
            }
        }
        c
    }

    pub fn full_cov(&self, m: &BitLinearModel) -> DMatrix<f64> {
        let rows = m.h.nrows();
        let mut c = DMatrix::identity(rows, rows) * m.sigma2;
        for s in 0..m.h.ncols() {
            let v = 4.0 * self.pplus[s] * (1.0 - self.pplus[s]);
            let h = m.h.column(s);
            c += h * h.transpose() * v;
        }
        c
    }

    pub fn conditional_cov_inverse(&self, m: &BitLinearModel, col: usize) -> DMatrix<f64> {
        self.conditional_cov(m, col)
            .lu()
            .try_inverse()
            .expect("conditional covariance is invertible")
    }

    pub fn log_beta(&self, m: &BitLinearModel, col: usize) -> f64 {
        let (mp, mm) = self.means(m, col);
        let cinv = self.conditional_cov_inverse(m, col);
        let ep = &m.y - mp;
        let em = &m.y - mm;
        let qp = (ep.transpose() * &cinv * &ep)[(0, 0)];
        let qm = (em.transpose() * &cinv * &em)[(0, 0)];
        qm - qp
    }

    pub fn update_bit(&mut self, m: &BitLinearModel, col: usize) -> f64 {
        let lb = self.log_beta(m, col);
        let llr = (self.llr[col] + lb).clamp(-self.clamp, self.clamp);
        self.llr[col] = llr;
        self.pplus[col] = 1.0 / (1.0 + (-llr).exp());
        lb
    }

    pub fn sweep(&mut self, m: &BitLinearModel) {
        for col in 0..m.h.ncols() {
            self.update_bit(m, col);
        }
    }

    pub fn interference_mean(&self, m: &BitLinearModel) -> DVector<f64> {
        let mut u = DVector::zeros(m.h.nrows());
        for (s, p) in self.pplus.iter().enumerate() {
            u += m.h.column(s) * (2.0 * p - 1.0);
        }
        u
    }

    pub fn decode(m: &BitLinearModel, iters: usize, clamp: f64) -> Vec<Bit> {
        let mut d = Self::new(m.h.ncols(), clamp);
        for _ in 0..iters {
            d.sweep(m);
        }
        d.llr.iter().map(|&l| if l >= 0.0 { 1 } else { -1 }).collect()
    }
}

/// Transmitted bits and the linear model of one random channel use.
pub struct Instance {
    pub bits: Vec<Bit>,
    pub model: BitLinearModel,
}

pub fn random_bits(n: usize, rng: &mut impl Rng) -> Vec<Bit> {
    (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()
}

pub fn random_instance(params: StbcParams, order: usize, nr: usize, snr_db: f64, rng: &mut ChaCha8Rng) -> Instance {
    let code = StbcCode::new(params);
    let qam = QamSpec::new(order).unwrap();
    let n = params.n;
    let hc = sample_iid_channel(nr, n, rng).hc;
    let eff = linearize(&hc, &code, &qam).unwrap();
    let bits = random_bits(eff.dims.bits(), rng);
    let x = code.encode(&bits_to_symbol_vector(&bits, &qam).unwrap()).unwrap();
    let snr = SnrSpec::from_db(snr_db, qam.es(), n).unwrap();
    let y = apply_channel(&x, &hc, &snr, rng).unwrap();
    let model = eff.model(realify_received(&y), snr.sigma2()).unwrap();
    Instance { bits, model }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

pub fn vec_diff(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).amax()
}

pub fn identity_error(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    (a * b - DMatrix::<f64>::identity(n, n)).amax()
}

pub fn errors(a: &[Bit], b: &[Bit]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Standard error of a BER estimate.
pub fn std_error(errors: u64, bits: u64) -> f64 {
    let p = errors as f64 / bits as f64;
    (p * (1.0 - p) / bits as f64).sqrt()
}

/// `a <= b` up to two standard errors of the difference.
pub fn le_2sigma(a: f64, sa: f64, b: f64, sb: f64) -> bool {
    a <= b + 2.0 * (sa * sa + sb * sb).sqrt()
}

pub fn records_le(a: &BerRecord, b: &BerRecord) -> bool {
    le_2sigma(a.ber, a.std_error(), b.ber, b.std_error())
}
