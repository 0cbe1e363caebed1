//! Exact log-moduli for specs with a known closed form.

use num_complex::Complex64;

use crate::spec::ClosedForm;

/// `log |cos w|`, stable for large imaginary parts.
pub fn log_abs_cos(w: Complex64) -> f64 {
    let (x, y) = (w.re, w.im.abs());
    if y > 20.0 {
        y - std::f64::consts::LN_2 + 0.5 * (2.0 * (2.0 * x).cos() * (-2.0 * y).exp() + (-4.0 * y).exp()).ln_1p()
    } else {
        let c = x.cos();
        let sh = y.sinh();
        0.5 * (c * c + sh * sh).ln()
    }
}

/// `log |sin w|`, stable for large imaginary parts.
pub fn log_abs_sin(w: Complex64) -> f64 {
    let (x, y) = (w.re, w.im.abs());
    if y > 20.0 {
        y - std::f64::consts::LN_2 + 0.5 * (-2.0 * (2.0 * x).cos() * (-2.0 * y).exp() + (-4.0 * y).exp()).ln_1p()
    } else {
        let s = x.sin();
        let sh = y.sinh();
        0.5 * (s * s + sh * sh).ln()
    }
}

/// `log |sin(πw)/(πw)|`.
fn log_abs_sinc_pi(w: Complex64) -> f64 {
    let pw = w * std::f64::consts::PI;
    if pw.norm() < 1e-4 {
        return (Complex64::new(1.0, 0.0) - pw * pw / 6.0).norm().ln();
    }
    log_abs_sin(pw) - pw.norm().ln()
}

/// `log |f(z)|` for the closed form `form`.
pub fn log_modulus(form: ClosedForm, z: Complex64) -> f64 {
    let ln_abs = || z.norm().ln();
    match form {
        ClosedForm::CosSqrt => log_abs_cos(z.sqrt()),
        ClosedForm::TwoZCosSqrt => std::f64::consts::LN_2 + ln_abs() + log_abs_cos(z.sqrt()),
        ClosedForm::SinePiSqrt => log_abs_sinc_pi(z.sqrt()),
        ClosedForm::Cosine => log_abs_cos(z),
        ClosedForm::TwoZSquaredCos => std::f64::consts::LN_2 + 2.0 * ln_abs() + log_abs_cos(z),
        ClosedForm::SincPi => log_abs_sinc_pi(z),
    }
}
