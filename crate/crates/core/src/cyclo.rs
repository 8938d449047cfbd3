//! Cyclotomic integers `Σ c_j ζ_n^j` and their exact evaluation.
//!
//! Values are never reduced to a canonical basis. Instead, every
//! computation is carried out simultaneously modulo two primes `p ≡ 1
//! (mod e)` (sending `ζ_e` to a fixed primitive `e`-th root of unity mod
//! `p`) and in floating point (sending `ζ_e` to `exp(2πi/e)`). Rational
//! integer results are recovered by Chinese remaindering and must agree
//! with the floating value; equality tests must agree in all three images.

use serde::{Deserialize, Serialize};

use crate::arith::{crt2, inv_mod, mul_mod, pow_mod, prime_one_mod, primitive_root};
use crate::error::{Error, Result};

/// `Σ coeffs[j] · ζ^j` with `ζ = exp(2πi / conductor)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cyclo {
    conductor: u32,
    coeffs: Vec<i64>,
}

impl Cyclo {
    pub fn new(conductor: u32, coeffs: Vec<i64>) -> Cyclo {
        assert!(conductor >= 1 && coeffs.len() == conductor as usize);
        Cyclo { conductor, coeffs }
    }

    pub fn integer(n: i64) -> Cyclo {
        Cyclo {
            conductor: 1,
            coeffs: vec![n],
        }
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Complex conjugate: `ζ^j ↦ ζ^{-j}`.
    pub fn conj(&self) -> Cyclo {
        let n = self.conductor as usize;
        let mut c = vec![0; n];
        for (j, &v) in self.coeffs.iter().enumerate() {
            c[(n - j) % n] = v;
        }
        Cyclo::new(self.conductor, c)
    }

    /// The value when every power of `ζ` collapses to 1 (the degree, for a
    /// character value written as eigenvalue multiplicities).
    pub fn coeff_sum(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    /// The rational integer this value equals if only `ζ^0` is used.
    pub fn as_plain_integer(&self) -> Option<i64> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> (f64, f64) {
        let n = self.conductor as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                let t = std::f64::consts::TAU * j as f64 / n;
                re += c as f64 * t.cos();
                im += c as f64 * t.sin();
            }
        }
        (re, im)
    }
}

/// A value carried in the three images used for exact decisions.
#[derive(Clone, Copy, Debug)]
pub struct Num {
    r: [u64; 2],
    re: f64,
    im: f64,
    /// Upper bound on the magnitude of everything summed so far, for the
    /// floating tolerance.
    scale: f64,
}

/// Relative floating tolerance for consistency checks.
pub const FLOAT_TOL: f64 = 1e-9;

/// Evaluates cyclotomic values whose conductors divide `e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluator {
    e: u64,
    primes: [u64; 2],
    roots: [u64; 2],
}

impl Evaluator {
    /// Uses the two least primes `p ≡ 1 (mod e)` above `2^30`.
    pub fn new(e: u64) -> Result<Evaluator> {
        let p1 = prime_one_mod(e, 1 << 30);
        let p2 = prime_one_mod(e, p1);
        if p2 >= 1 << 32 {
            return Err(Error::SizeCapExceeded {
                what: "verification prime",
                value: p2 as u128,
                cap: 1 << 32,
            });
        }
        let root = |p: u64| pow_mod(primitive_root(p), (p - 1) / e, p);
        Ok(Evaluator {
            e,
            primes: [p1, p2],
            roots: [root(p1), root(p2)],
        })
    }

    pub fn exponent(&self) -> u64 {
        self.e
    }

    pub fn primes(&self) -> [u64; 2] {
        self.primes
    }

    pub fn int(&self, n: i128) -> Num {
        let r = self.primes.map(|p| n.rem_euclid(p as i128) as u64);
        Num {
            r,
            re: n as f64,
            im: 0.0,
            scale: (n as f64).abs(),
        }
    }

    pub fn num(&self, c: &Cyclo) -> Num {
        let n = c.conductor as u64;
        assert!(self.e % n == 0, "conductor {n} does not divide {}", self.e);
        let mut r = [0u64; 2];
        for s in 0..2 {
            let p = self.primes[s];
            let z = pow_mod(self.roots[s], self.e / n, p);
            let mut acc = 0u64;
            let mut zj = 1u64;
            for &coef in &c.coeffs {
                let cm = coef.rem_euclid(p as i64) as u64;
                acc = (acc + mul_mod(cm, zj, p)) % p;
                zj = mul_mod(zj, z, p);
            }
            r[s] = acc;
        }
        let (re, im) = c.to_complex();
        let scale = c.coeffs.iter().map(|x| x.unsigned_abs() as f64).sum();
        Num { r, re, im, scale }
    }

    pub fn zero(&self) -> Num {
        self.int(0)
    }

    pub fn add(&self, a: Num, b: Num) -> Num {
        Num {
            r: [0, 1].map(|s| (a.r[s] + b.r[s]) % self.primes[s]),
            re: a.re + b.re,
            im: a.im + b.im,
            scale: a.scale + b.scale,
        }
    }

    pub fn sub(&self, a: Num, b: Num) -> Num {
        Num {
            r: [0, 1].map(|s| (a.r[s] + self.primes[s] - b.r[s]) % self.primes[s]),
            re: a.re - b.re,
            im: a.im - b.im,
            scale: a.scale + b.scale,
        }
    }

    pub fn mul(&self, a: Num, b: Num) -> Num {
        Num {
            r: [0, 1].map(|s| mul_mod(a.r[s], b.r[s], self.primes[s])),
            re: a.re * b.re - a.im * b.im,
            im: a.re * b.im + a.im * b.re,
            scale: a.scale * b.scale,
        }
    }

    /// Division by a nonzero rational integer; exactness is checked only
    /// when the result is converted back.
    pub fn div_int(&self, a: Num, d: i128) -> Num {
        assert!(d != 0);
        let r = [0, 1].map(|s| {
            let p = self.primes[s];
            mul_mod(a.r[s], inv_mod(d.rem_euclid(p as i128) as u64, p), p)
        });
        let df = d as f64;
        Num {
            r,
            re: a.re / df,
            im: a.im / df,
            scale: a.scale / df.abs(),
        }
    }

    fn tolerance(&self, n: &Num) -> f64 {
        FLOAT_TOL * n.scale.max(1.0)
    }

    /// The rational integer `n` must equal; errors when the modular and
    /// floating images disagree (for example a non-integral quotient).
    pub fn to_integer(&self, n: Num) -> Result<i128> {
        let v = crt2(n.r[0], self.primes[0], n.r[1], self.primes[1]);
        let tol = self.tolerance(&n);
        if (n.re - v as f64).abs() > tol || n.im.abs() > tol {
            return Err(Error::Internal(format!(
                "value is not the integer {v}: floating image {} + {}i",
                n.re, n.im
            )));
        }
        Ok(v)
    }

    /// Exact equality of two values.
    pub fn equal(&self, a: Num, b: Num) -> Result<bool> {
        let d = self.sub(a, b);
        let modular = d.r == [0, 0];
        let tol = self.tolerance(&d);
        let float = d.re.abs() <= tol && d.im.abs() <= tol;
        if modular != float {
            return Err(Error::Internal(
                "modular and floating equality tests disagree".into(),
            ));
        }
        Ok(modular)
    }

    pub fn cyclo_equal(&self, a: &Cyclo, b: &Cyclo) -> Result<bool> {
        self.equal(self.num(a), self.num(b))
    }
}
