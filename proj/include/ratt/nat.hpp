#ifndef RATT_NAT_HPP
#define RATT_NAT_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace ratt {

// Arbitrary-precision natural number. Little-endian base 2^32 limbs,
// no leading zero limb; zero is the empty limb vector.
class Nat {
public:
    Nat() = default;
    Nat(std::uint64_t v);

    static Nat from_string(const std::string& decimal);
    std::string to_string() const;

    Nat operator+(const Nat& o) const;
    Nat operator*(const Nat& o) const;
    // Truncated subtraction: a - b is 0 when b >= a.
    Nat monus(const Nat& o) const;

    bool operator==(const Nat& o) const { return limbs_ == o.limbs_; }
    bool operator!=(const Nat& o) const { return limbs_ != o.limbs_; }
    bool operator<(const Nat& o) const;
    bool operator<=(const Nat& o) const;

    bool is_zero() const { return limbs_.empty(); }
    // Value as uint64 if it fits, for small-number plumbing; callers check fits_u64.
    bool fits_u64() const { return limbs_.size() <= 2; }
    std::uint64_t as_u64() const;

private:
    std::vector<std::uint32_t> limbs_;
    void trim();
};

} // namespace ratt

#endif
