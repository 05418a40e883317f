#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace chb {

/// Raised when inputs are well formed but outside the model's domain of
/// validity (e.g. no lower state exists). The CLI maps it to exit code 2.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Spatial dimension d >= 2.
class Dimension {
public:
    explicit Dimension(int d) : d_(d) {
        if (d < 2) throw std::invalid_argument("dimension must be >= 2, got " + std::to_string(d));
    }
    int value() const noexcept { return d_; }
    double as_double() const noexcept { return static_cast<double>(d_); }
    friend bool operator==(Dimension a, Dimension b) noexcept { return a.d_ == b.d_; }

private:
    int d_;
};

/// Critical-scaling parameter xi, or the off-critical tag (xi = +infinity).
class Xi {
public:
    static Xi finite(double value) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw std::invalid_argument("xi must be a positive finite number");
        }
        return Xi(value);
    }
    static Xi infinite() noexcept { return Xi(); }

    bool is_infinite() const noexcept { return infinite_; }
    double value() const noexcept {
        return infinite_ ? std::numeric_limits<double>::infinity() : value_;
    }
    /// xi^{-(d+1)}, exactly zero for the infinite tag.
    double inverse_power(Dimension d) const;

private:
    Xi() : value_(0.0), infinite_(true) {}
    explicit Xi(double v) : value_(v), infinite_(false) {}
    double value_;
    bool infinite_;
};

}  // namespace chb
