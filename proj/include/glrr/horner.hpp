#ifndef GLRR_HORNER_HPP
#define GLRR_HORNER_HPP

#include <cmath>
#include <complex>

#include <Eigen/Core>

namespace glrr
{

using Complex = std::complex<double>;

namespace eft
{

/// s + e == a + b exactly (Knuth).
inline void two_sum(double a, double b, double& s, double& e) noexcept
{
    s             = a + b;
    const double z = s - a;
    e             = (a - (s - z)) + (b - z);
}

/// p + e == a * b exactly, using a fused multiply-add.
inline void two_prod(double a, double b, double& p, double& e) noexcept
{
    p = a * b;
    e = std::fma(a, b, -p);
}

/// Complex product and sum s*z + c with the rounding error of every real
/// operation captured: value + err == s*z + c up to second-order terms.
inline void complex_mul_add(Complex s, Complex z, Complex c, Complex& value, Complex& err) noexcept
{
    double p1, e1, p2, e2, p3, e3, p4, e4;
    two_prod(s.real(), z.real(), p1, e1);
    two_prod(s.imag(), z.imag(), p2, e2);
    two_prod(s.real(), z.imag(), p3, e3);
    two_prod(s.imag(), z.real(), p4, e4);

    double re, f1, re2, f2, im, f3, im2, f4;
    two_sum(p1, -p2, re, f1);
    two_sum(re, c.real(), re2, f2);
    two_sum(p3, p4, im, f3);
    two_sum(im, c.imag(), im2, f4);

    value = Complex(re2, im2);
    err   = Complex((e1 - e2) + (f1 + f2), (e3 + e4) + (f3 + f4));
}

} // namespace eft

/// g(z) = sum_k coeffs[k] z^k by Horner's rule.
template <typename Derived>
Complex horner(const Eigen::MatrixBase<Derived>& coeffs, Complex z)
{
    const Eigen::Index n = coeffs.size();
    if (n == 0)
    {
        return Complex(0.0);
    }
    Complex s = Complex(coeffs[n - 1]);
    for (Eigen::Index k = n - 2; k >= 0; --k)
    {
        s = s * z + Complex(coeffs[k]);
    }
    return s;
}

///
/// Compensated Horner scheme for complex arguments (and real or complex
/// coefficients). The rounding errors of each Horner step are recovered
/// exactly by error-free transformations and accumulated in a second,
/// plain Horner recurrence that is added back at the end; the result is as
/// accurate as plain Horner carried out in twice the working precision.
///
template <typename Derived>
Complex horner_compensated(const Eigen::MatrixBase<Derived>& coeffs, Complex z)
{
    const Eigen::Index n = coeffs.size();
    if (n == 0)
    {
        return Complex(0.0);
    }
    Complex s = Complex(coeffs[n - 1]);
    Complex c(0.0);
    for (Eigen::Index k = n - 2; k >= 0; --k)
    {
        Complex err;
        eft::complex_mul_add(s, z, Complex(coeffs[k]), s, err);
        c = c * z + err;
    }
    return s + c;
}

} // namespace glrr

#endif
