#pragma once

#include <vector>

#include "rsv/common.hpp"

namespace rsv {

/// Truncated Taylor series: coeffs[j] is the coefficient of x^j.
using Series = std::vector<Complex>;

inline Series series_add(const Series& a, const Series& b) {
    Series r(std::max(a.size(), b.size()), Complex(0.0));
    for (size_t j = 0; j < a.size(); ++j) r[j] += a[j];
    for (size_t j = 0; j < b.size(); ++j) r[j] += b[j];
    return r;
}

inline Series series_scale(Series a, Complex c) {
    for (auto& v : a) v *= c;
    return a;
}

inline Series series_mul(const Series& a, const Series& b, size_t K) {
    Series r(K + 1, Complex(0.0));
    for (size_t i = 0; i < a.size() && i <= K; ++i)
        for (size_t j = 0; j < b.size() && i + j <= K; ++j)
            r[i + j] += a[i] * b[j];
    return r;
}

/// a / b with b[0] != 0, truncated at order K.
inline Series series_div(const Series& a, const Series& b, size_t K) {
    if (b.empty() || std::abs(b[0]) == 0.0)
        throw SingularBlock("series division by a series with vanishing constant term");
    Series r(K + 1, Complex(0.0));
    for (size_t j = 0; j <= K; ++j) {
        Complex acc = j < a.size() ? a[j] : Complex(0.0);
        for (size_t i = 1; i <= j && i < b.size(); ++i) acc -= b[i] * r[j - i];
        r[j] = acc / b[0];
    }
    return r;
}

/// Termwise derivative.
inline Series series_deriv(const Series& a) {
    if (a.size() <= 1) return {Complex(0.0)};
    Series r(a.size() - 1);
    for (size_t j = 1; j < a.size(); ++j) r[j - 1] = static_cast<double>(j) * a[j];
    return r;
}

inline Complex series_eval(const Series& a, Complex x) {
    Complex r = 0.0;
    for (size_t j = a.size(); j-- > 0;) r = r * x + a[j];
    return r;
}

}  // namespace rsv
