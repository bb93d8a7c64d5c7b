//! Exact rational polynomial arithmetic used as an independent oracle.
#![allow(dead_code)]

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

/// Dense polynomial, coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<BigRational>);

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl Poly {
    pub fn constant(c: BigRational) -> Poly {
        Poly(vec![c]).trim()
    }

    /// `(a + b t)`
    pub fn linear(a: i64, b: i64) -> Poly {
        Poly(vec![int(a), int(b)]).trim()
    }

    pub fn trim(mut self) -> Poly {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly(vec![]);
        }
        let mut out = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).trim()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let out = (0..n)
            .map(|i| {
                let a = self.0.get(i).cloned().unwrap_or_else(BigRational::zero);
                let b = o.0.get(i).cloned().unwrap_or_else(BigRational::zero);
                a + b
            })
            .collect();
        Poly(out).trim()
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        Poly(self.0.iter().map(|a| a * c).collect()).trim()
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::constant(BigRational::one()), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
        .trim()
    }

    pub fn nth_derivative(&self, k: u32) -> Poly {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * t + c)
    }

    /// Remainder of polynomial division.
    pub fn rem(&self, d: &Poly) -> Poly {
        let mut r = self.clone();
        let lead = d.0.last().expect("nonzero divisor").clone();
        while !r.is_zero() && r.degree() >= d.degree() {
            let shift = r.degree() - d.degree();
            let q = r.0.last().unwrap() / &lead;
            let mut sub = vec![BigRational::zero(); shift];
            sub.extend(d.0.iter().map(|c| c * &q));
            r = r.add(&Poly(sub).scale(&int(-1)));
        }
        r
    }

    /// Number of distinct real roots in the open interval (a, b), via a
    /// Sturm sequence. Endpoints must not be roots.
    pub fn distinct_roots_in(&self, a: &BigRational, b: &BigRational) -> usize {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]).scale(&int(-1));
            seq.push(r);
        }
        seq.pop();
        let changes = |t: &BigRational| {
            let signs: Vec<bool> = seq
                .iter()
                .map(|p| p.eval(t))
                .filter(|v| !v.is_zero())
                .map(|v| v.is_positive())
                .collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        changes(a) - changes(b)
    }
}

/// Exact rational for an f64.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("representable")
}

pub fn factorial(n: u32) -> BigRational {
    (1..=n as i64).fold(BigRational::one(), |acc, i| acc * int(i))
}

pub fn binomial(n: u32, k: u32) -> BigRational {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Rodrigues form of the normalized 3-dimensional Legendre polynomial:
/// `(-1)^k / (2^k k!) · (d/dt)^k (1 - t²)^k`.
pub fn rodrigues_p3(k: u32) -> Poly {
    let base = Poly(vec![int(1), int(0), int(-1)]).pow(k);
    let sign = if k % 2 == 0 { int(1) } else { int(-1) };
    let c = sign / (int(2).pow(k as i32) * factorial(k));
    base.nth_derivative(k).scale(&c)
}

/// Normalized 5-dimensional Legendre polynomial from
/// `(-1)^k / (2^k (k+1)!) · (1 - t²)^{-1} (d/dt)^k (1 - t²)^{k+1}`.
pub fn rodrigues_p5(k: u32) -> Poly {
    let one_minus = Poly(vec![int(1), int(0), int(-1)]);
    let top = one_minus.pow(k + 1).nth_derivative(k);
    let sign = if k % 2 == 0 { int(1) } else { int(-1) };
    let c = sign / (int(2).pow(k as i32) * factorial(k + 1));
    // exact division by (1 - t²) = -(t - 1)(t + 1)
    let q = divide_exact(&top, &one_minus);
    q.scale(&c)
}

/// Chebyshev `T_k = Σ_m C(k, 2m) t^{k-2m} (t² - 1)^m`, the normalized
/// 2-dimensional Legendre polynomial.
pub fn chebyshev(k: u32) -> Poly {
    let t = Poly::linear(0, 1);
    let t2m1 = Poly(vec![int(-1), int(0), int(1)]);
    (0..=k / 2).fold(Poly(vec![]), |acc, m| {
        acc.add(&t.pow(k - 2 * m).mul(&t2m1.pow(m)).scale(&binomial(k, 2 * m)))
    })
}

pub fn divide_exact(num: &Poly, den: &Poly) -> Poly {
    let mut r = num.clone();
    let lead = den.0.last().unwrap().clone();
    let mut q = vec![BigRational::zero(); num.degree().saturating_sub(den.degree()) + 1];
    while !r.is_zero() && r.degree() >= den.degree() {
        let shift = r.degree() - den.degree();
        let c = r.0.last().unwrap() / &lead;
        q[shift] = c.clone();
        let mut sub = vec![BigRational::zero(); shift];
        sub.extend(den.0.iter().map(|d| d * &c));
        r = r.add(&Poly(sub).scale(&int(-1)));
    }
    assert!(r.is_zero(), "division not exact");
    Poly(q).trim()
}
