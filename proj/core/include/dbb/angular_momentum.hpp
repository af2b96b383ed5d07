#pragma once

#include <string>
#include <string_view>

namespace dbb {

/// Half-integer total angular momentum j (in units of hbar), stored as the
/// odd integer 2j so that comparisons are exact.
class AngularMomentum {
public:
    /// Throws DomainError unless twice_j is odd.
    explicit AngularMomentum(int twice_j);

    /// Accepts "5/2", "-3/2" or "2.5".
    static AngularMomentum parse(std::string_view text);

    int twice() const { return twice_; }
    double value() const { return 0.5 * twice_; }

    /// Bessel order j - 1/2 of the upper spinor component.
    int lower_order() const { return (twice_ - 1) / 2; }
    /// Bessel order j + 1/2 of the lower spinor component.
    int upper_order() const { return (twice_ + 1) / 2; }

    /// "5/2" form.
    std::string str() const;

    friend bool operator==(const AngularMomentum&, const AngularMomentum&) = default;

private:
    int twice_;
};

}  // namespace dbb
