//! Exact values of `𝒭(n, d) = d(3d − 3)^{n−1}` and the exponents built from it.
//!
//! `𝒭` grows fast enough that exponents such as `1 − 1/𝒭` round to `1` in
//! double precision, so certificates keep the exponent as an exact rational
//! and apply it in the log domain.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{input, Error, Result};
use crate::polynomial::Rational;

/// `𝒭(n, d)`: `d(3d − 3)^{n−1}` for `d ≥ 2` and `1` for `d = 1`.
pub fn r_function(n: u64, d: u64) -> Result<BigUint> {
    if n < 1 || d < 1 {
        return input(format!("r_function needs n, d >= 1, got n = {n}, d = {d}"));
    }
    if d == 1 {
        return Ok(BigUint::one());
    }
    let exp = u32::try_from(n - 1).map_err(|_| Error::Capacity(format!("exponent n - 1 = {} too large", n - 1)))?;
    Ok(BigUint::from(d) * BigUint::from(3 * d - 3).pow(exp))
}

/// Natural logarithm of a positive big integer, accurate for any size.
pub fn ln_biguint(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().map(f64::ln).unwrap_or(f64::INFINITY);
    }
    let shift = bits - 64;
    let top = (v >> shift).to_f64().expect("64-bit mantissa fits in f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CertificateKind {
    GradientLocal,
    ErrorBoundLocal,
    Separation,
    GlobalSeparation,
    GlobalKollar,
    GlobalHolder,
    EigenspaceStability,
    Factorization,
}

impl CertificateKind {
    pub const ALL: [CertificateKind; 8] = [
        CertificateKind::GradientLocal,
        CertificateKind::ErrorBoundLocal,
        CertificateKind::Separation,
        CertificateKind::GlobalSeparation,
        CertificateKind::GlobalKollar,
        CertificateKind::GlobalHolder,
        CertificateKind::EigenspaceStability,
        CertificateKind::Factorization,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CertificateKind::GradientLocal => "gradient-local",
            CertificateKind::ErrorBoundLocal => "error-bound-local",
            CertificateKind::Separation => "separation",
            CertificateKind::GlobalSeparation => "global-separation",
            CertificateKind::GlobalKollar => "global-kollar",
            CertificateKind::GlobalHolder => "global-holder",
            CertificateKind::EigenspaceStability => "eigenspace-stability",
            CertificateKind::Factorization => "factorization",
        }
    }

    /// Whether the kind needs the order `q` of a second matrix (`r` for factorization).
    pub fn needs_second_order(self) -> bool {
        matches!(self, CertificateKind::Separation | CertificateKind::GlobalSeparation | CertificateKind::Factorization)
    }
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CertificateKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CertificateKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown certificate kind '{s}'")))
    }
}

/// How the exponent is built from `R = 𝒭(·, ·)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExponentForm {
    /// `1 − 1/R`.
    Gradient,
    /// `1/R`.
    Root,
    /// `R`.
    Power,
}

impl ExponentForm {
    pub fn name(self) -> &'static str {
        match self {
            ExponentForm::Gradient => "1 - 1/R",
            ExponentForm::Root => "1/R",
            ExponentForm::Power => "R",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateInputs {
    pub n: u64,
    pub p: u64,
    pub d: u64,
    /// Order of the second matrix (`q`), or of `H` (`r`) for factorization.
    pub q: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentCertificate {
    pub kind: CertificateKind,
    pub inputs: CertificateInputs,
    /// Arguments `(n', d')` of `𝒭(n', d')`.
    pub r_args: (u64, u64),
    pub r_value: BigUint,
    pub form: ExponentForm,
    /// The exponent as an exact rational.
    pub theta: Rational,
    /// `ln θ`.
    pub theta_log: f64,
    /// `ln R`.
    pub r_log: f64,
}

/// Builds the exponent certificate for `kind` with matrix data `(n, p, d)`.
pub fn certificate(kind: CertificateKind, n: u64, p: u64, d: u64, q: Option<u64>) -> Result<ExponentCertificate> {
    if n < 1 || p < 1 || d < 1 {
        return input(format!("certificate needs n, p, d >= 1, got n = {n}, p = {p}, d = {d}"));
    }
    let second = if kind.needs_second_order() {
        match q {
            Some(q) if q >= 1 => q,
            Some(_) => return input("second matrix order must be at least 1"),
            None => return input(format!("{kind} needs the order of the second matrix")),
        }
    } else {
        0
    };
    let (args, form) = match kind {
        CertificateKind::GradientLocal => ((2 * n + p * (n + 1), d + 3), ExponentForm::Gradient),
        CertificateKind::ErrorBoundLocal | CertificateKind::GlobalHolder => ((2 * n + p * (n + 1), d + 3), ExponentForm::Root),
        CertificateKind::Separation | CertificateKind::Factorization => ((2 * n + (p + second) * (n + 1), d + 3), ExponentForm::Root),
        CertificateKind::GlobalSeparation => ((2 * n + (p + second) * (n + 1), d + 3), ExponentForm::Power),
        CertificateKind::GlobalKollar => ((2 * (n + 1) + (p + 2) * (n + 2), d + 3), ExponentForm::Power),
        CertificateKind::EigenspaceStability => ((p, 4), ExponentForm::Root),
    };
    let r_value = r_function(args.0, args.1)?;
    let r_int = BigInt::from(r_value.clone());
    let theta = match form {
        ExponentForm::Gradient => Rational::new(&r_int - BigInt::one(), r_int.clone()),
        ExponentForm::Root => Rational::new(BigInt::one(), r_int.clone()),
        ExponentForm::Power => Rational::from_integer(r_int.clone()),
    };
    let r_log = ln_biguint(&r_value);
    let theta_log = match form {
        ExponentForm::Gradient => (-(-r_log).exp()).ln_1p(),
        ExponentForm::Root => -r_log,
        ExponentForm::Power => r_log,
    };
    Ok(ExponentCertificate {
        kind,
        inputs: CertificateInputs { n, p, d, q },
        r_args: args,
        r_value,
        form,
        theta,
        theta_log,
        r_log,
    })
}

impl ExponentCertificate {
    /// `θ` rounded to double precision.
    pub fn theta_f64(&self) -> f64 {
        match self.form {
            ExponentForm::Gradient => -(-self.r_log).exp_m1(),
            _ => self.theta_log.exp(),
        }
    }

    /// `θ · ln v` for `ln v` given, exact enough when `θ` is within `1/R` of `1`.
    pub fn scale_log(&self, log_v: f64) -> f64 {
        if log_v == 0.0 {
            return 0.0;
        }
        let inv_r = (-self.r_log).exp();
        match self.form {
            ExponentForm::Gradient => log_v - log_v * inv_r,
            ExponentForm::Root => log_v * inv_r,
            ExponentForm::Power => log_v * self.r_log.exp(),
        }
    }

    /// `ln(|v|^θ)`; `−∞` for `v = 0`.
    pub fn log_pow(&self, v: f64) -> f64 {
        if v == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.scale_log(v.abs().ln())
    }

    /// `|v|^θ` evaluated as `exp(θ ln|v|)`.
    pub fn pow(&self, v: f64) -> f64 {
        self.log_pow(v).exp()
    }

    /// Decimal rendering of `θ` with `digits` significant digits after the point.
    pub fn theta_decimal(&self, digits: usize) -> String {
        rational_decimal(&self.theta, digits)
    }
}

/// Truncated decimal expansion of a nonnegative rational.
pub fn rational_decimal(r: &Rational, digits: usize) -> String {
    let (num, den) = (r.numer().clone(), r.denom().clone());
    let neg = num < BigInt::zero();
    let num = if neg { -num } else { num };
    let int_part = &num / &den;
    let mut rem = &num % &den;
    let mut s = format!("{}{}", if neg { "-" } else { "" }, int_part);
    if digits > 0 && !rem.is_zero() {
        s.push('.');
        let ten = BigInt::from(10);
        for _ in 0..digits {
            rem *= &ten;
            s.push_str(&(&rem / &den).to_string());
            rem %= &den;
            if rem.is_zero() {
                break;
            }
        }
    }
    s
}

/// Digits after the point in serialized decimal renderings of `θ`.
pub const DECIMAL_DIGITS: usize = 40;

impl Serialize for ExponentCertificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("ExponentCertificate", 10)?;
        st.serialize_field("kind", self.kind.name())?;
        st.serialize_field("n", &self.inputs.n)?;
        st.serialize_field("p", &self.inputs.p)?;
        st.serialize_field("d", &self.inputs.d)?;
        st.serialize_field("q", &self.inputs.q)?;
        st.serialize_field("r_args", &[self.r_args.0, self.r_args.1])?;
        st.serialize_field("r_value", &self.r_value.to_string())?;
        st.serialize_field("form", self.form.name())?;
        st.serialize_field("theta_exact", &self.theta.to_string())?;
        st.serialize_field("theta_decimal", &self.theta_decimal(DECIMAL_DIGITS))?;
        st.serialize_field("theta_f64", &self.theta_f64())?;
        st.serialize_field("ln_r", &self.r_log)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn small_values() {
        for n in 1..=10 {
            assert_eq!(r_function(n, 1).unwrap(), big(1));
        }
        assert_eq!(r_function(2, 2).unwrap(), big(6));
        assert_eq!(r_function(4, 4).unwrap(), big(2916));
        assert_eq!(r_function(1, 5).unwrap(), big(5));
        assert!(r_function(0, 2).is_err());
        assert!(r_function(2, 0).is_err());
    }

    #[test]
    fn certificate_examples() {
        let c = certificate(CertificateKind::GradientLocal, 1, 1, 1, None).unwrap();
        assert_eq!(c.r_value, big(2916));
        assert_eq!(c.theta, Rational::new(BigInt::from(2915), BigInt::from(2916)));
        let e = certificate(CertificateKind::EigenspaceStability, 1, 2, 1, None).unwrap();
        assert_eq!(e.theta, Rational::new(BigInt::from(1), BigInt::from(36)));
        let g = certificate(CertificateKind::GradientLocal, 1, 2, 1, None).unwrap();
        assert_eq!(g.r_value, big(236196));
        assert!(certificate(CertificateKind::Separation, 1, 1, 1, None).is_err());
        assert!(certificate(CertificateKind::Factorization, 1, 1, 1, Some(1)).is_ok());
    }

    /// Formula templates read off the inequalities, written independently of `certificate`.
    fn template(kind: CertificateKind, n: u64, p: u64, d: u64, q: u64) -> (u64, u64, &'static str) {
        use CertificateKind::*;
        match kind {
            GradientLocal => (2 * n + p * (n + 1), d + 3, "1 - 1/R"),
            ErrorBoundLocal | GlobalHolder => (2 * n + p * (n + 1), d + 3, "1/R"),
            Separation | Factorization => (2 * n + (p + q) * (n + 1), d + 3, "1/R"),
            GlobalSeparation => (2 * n + (p + q) * (n + 1), d + 3, "R"),
            GlobalKollar => (2 * (n + 1) + (p + 2) * (n + 2), d + 3, "R"),
            EigenspaceStability => (p, 4, "1/R"),
        }
    }

    #[test]
    fn all_kinds_match_templates() {
        for kind in CertificateKind::ALL {
            for (n, p, d, q) in [(1, 1, 1, 1), (2, 3, 2, 2), (3, 1, 4, 3)] {
                let c = certificate(kind, n, p, d, Some(q)).unwrap();
                let (a, b, form) = template(kind, n, p, d, q);
                assert_eq!(c.r_args, (a, b), "{kind}");
                assert_eq!(c.form.name(), form, "{kind}");
                let r = Rational::from_integer(BigInt::from(r_function(a, b).unwrap()));
                let expected = match form {
                    "1 - 1/R" => Rational::one() - r.recip(),
                    "1/R" => r.recip(),
                    _ => r,
                };
                assert_eq!(c.theta, expected);
                assert_eq!(kind.name().parse::<CertificateKind>().unwrap(), kind);
            }
        }
    }

    #[test]
    fn log_consistency_for_huge_r() {
        // A certificate whose 𝒭 has thousands of digits.
        let c = certificate(CertificateKind::GlobalKollar, 40, 20, 20, None).unwrap();
        let digits = c.r_value.to_string();
        assert!(digits.len() > 1000);
        let lead: f64 = digits[..17].parse().unwrap();
        let oracle = lead.ln() + (digits.len() - 17) as f64 * std::f64::consts::LN_10;
        assert!((c.r_log - oracle).abs() <= 1e-15 * oracle);
        let root = certificate(CertificateKind::GlobalHolder, 40, 20, 20, None).unwrap();
        let rd = root.r_value.to_string();
        let lead: f64 = rd[..17].parse().unwrap();
        let oracle = -(lead.ln() + (rd.len() - 17) as f64 * std::f64::consts::LN_10);
        assert!((root.theta_log - oracle).abs() <= 1e-15 * oracle.abs());
        // ln(1 − 1/R) ≈ −1/R stays representable while R < 1e300.
        let grad = certificate(CertificateKind::GradientLocal, 50, 1, 20, None).unwrap();
        assert!(grad.r_value.to_string().len() > 250);
        let inv = (-grad.r_log).exp();
        assert!(inv > 0.0);
        assert!(((grad.theta_log + inv) / inv).abs() <= 1e-15);
    }

    #[test]
    fn log_consistency_moderate_r() {
        for (n, p, d) in [(1, 1, 1), (1, 2, 1), (2, 1, 2)] {
            let c = certificate(CertificateKind::GradientLocal, n, p, d, None).unwrap();
            // ln(1 − u) = −Σ u^k / k with u = 1/R.
            let u = 1.0 / c.theta.denom().to_f64().unwrap();
            let oracle: f64 = -(1..=12).map(|k| u.powi(k) / k as f64).sum::<f64>();
            assert!((c.theta_log - oracle).abs() <= 1e-15 * oracle.abs());
            assert!((c.theta_f64() - (1.0 - u)).abs() <= 1e-16);
        }
    }

    #[test]
    fn log_domain_power() {
        let c = certificate(CertificateKind::ErrorBoundLocal, 1, 1, 1, None).unwrap();
        assert!((c.pow(0.5) - 0.5f64.powf(1.0 / 2916.0)).abs() < 1e-15);
        assert_eq!(c.pow(0.0), 0.0);
        assert_eq!(rational_decimal(&c.theta, 6), "0.000342");
    }

    proptest! {
        #[test]
        fn strictly_increasing(n in 1u64..8, d in 2u64..8) {
            let r = r_function(n, d).unwrap();
            prop_assert!(r_function(n + 1, d).unwrap() > r);
            prop_assert!(r_function(n, d + 1).unwrap() > r);
        }
    }
}
