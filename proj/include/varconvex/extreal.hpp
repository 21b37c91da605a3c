#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace varconvex {

/// Extended real value in (-inf, +inf]. NaN and -inf are rejected at
/// construction; arithmetic saturates at +inf.
class ExtReal {
public:
    ExtReal() : v_(0.0) {}
    ExtReal(double v) : v_(v) {
        if (std::isnan(v))
            throw std::invalid_argument("ExtReal: NaN is not a value");
        if (v == -std::numeric_limits<double>::infinity())
            throw std::invalid_argument("ExtReal: -inf is not a value");
    }

    static ExtReal infinity() {
        ExtReal r;
        r.v_ = std::numeric_limits<double>::infinity();
        return r;
    }

    bool finite() const { return std::isfinite(v_); }
    bool is_infinite() const { return !finite(); }

    /// Finite value; throws if +inf.
    double value() const {
        if (!finite())
            throw std::domain_error("ExtReal: value() on +inf");
        return v_;
    }

    /// Raw double, +inf allowed. Safe for comparisons and printing.
    double raw() const { return v_; }

    friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
    friend bool operator!=(ExtReal a, ExtReal b) { return a.v_ != b.v_; }
    friend bool operator<(ExtReal a, ExtReal b) { return a.v_ < b.v_; }
    friend bool operator<=(ExtReal a, ExtReal b) { return a.v_ <= b.v_; }
    friend bool operator>(ExtReal a, ExtReal b) { return a.v_ > b.v_; }
    friend bool operator>=(ExtReal a, ExtReal b) { return a.v_ >= b.v_; }

private:
    double v_;
};

/// Saturating addition: finite + finite is float addition (overflow goes to
/// +inf), anything + inf is inf.
inline ExtReal ext_add(ExtReal a, ExtReal b) {
    if (a.is_infinite() || b.is_infinite()) return ExtReal::infinity();
    double s = a.value() + b.value();
    if (s == -std::numeric_limits<double>::infinity())
        throw std::overflow_error("ext_add: sum underflowed to -inf");
    return std::isfinite(s) ? ExtReal(s) : ExtReal::infinity();
}

/// Scale by c > 0 (c * inf = inf). c <= 0 with an infinite operand is an
/// error since the codomain excludes -inf.
inline ExtReal ext_scale(double c, ExtReal a) {
    if (a.is_infinite()) {
        if (c <= 0.0)
            throw std::domain_error("ext_scale: c*inf needs c > 0");
        return ExtReal::infinity();
    }
    return ExtReal(c * a.value());
}

inline ExtReal ext_min(ExtReal a, ExtReal b) { return a <= b ? a : b; }
inline ExtReal ext_max(ExtReal a, ExtReal b) { return a >= b ? a : b; }

}  // namespace varconvex
