#include "ratt/nat.hpp"

#include <algorithm>
#include <stdexcept>

namespace ratt {

void Nat::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

Nat::Nat(std::uint64_t v) {
    if (v) {
        limbs_.push_back(static_cast<std::uint32_t>(v));
        if (v >> 32) limbs_.push_back(static_cast<std::uint32_t>(v >> 32));
    }
}

std::uint64_t Nat::as_u64() const {
    std::uint64_t v = 0;
    if (limbs_.size() > 0) v = limbs_[0];
    if (limbs_.size() > 1) v |= static_cast<std::uint64_t>(limbs_[1]) << 32;
    return v;
}

Nat Nat::operator+(const Nat& o) const {
    Nat r;
    const auto& a = limbs_;
    const auto& b = o.limbs_;
    std::size_t n = std::max(a.size(), b.size());
    r.limbs_.reserve(n + 1);
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t s = carry;
        if (i < a.size()) s += a[i];
        if (i < b.size()) s += b[i];
        r.limbs_.push_back(static_cast<std::uint32_t>(s));
        carry = s >> 32;
    }
    if (carry) r.limbs_.push_back(static_cast<std::uint32_t>(carry));
    return r;
}

Nat Nat::operator*(const Nat& o) const {
    if (is_zero() || o.is_zero()) return Nat();
    Nat r;
    r.limbs_.assign(limbs_.size() + o.limbs_.size(), 0);
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        std::uint64_t carry = 0;
        for (std::size_t j = 0; j < o.limbs_.size(); ++j) {
            std::uint64_t cur = r.limbs_[i + j] + carry +
                static_cast<std::uint64_t>(limbs_[i]) * o.limbs_[j];
            r.limbs_[i + j] = static_cast<std::uint32_t>(cur);
            carry = cur >> 32;
        }
        std::size_t k = i + o.limbs_.size();
        while (carry) {
            std::uint64_t cur = r.limbs_[k] + carry;
            r.limbs_[k] = static_cast<std::uint32_t>(cur);
            carry = cur >> 32;
            ++k;
        }
    }
    r.trim();
    return r;
}

Nat Nat::monus(const Nat& o) const {
    if (*this <= o) return Nat();
    Nat r;
    r.limbs_ = limbs_;
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < r.limbs_.size(); ++i) {
        std::int64_t cur = static_cast<std::int64_t>(r.limbs_[i]) - borrow -
            (i < o.limbs_.size() ? static_cast<std::int64_t>(o.limbs_[i]) : 0);
        borrow = 0;
        if (cur < 0) {
            cur += (1ll << 32);
            borrow = 1;
        }
        r.limbs_[i] = static_cast<std::uint32_t>(cur);
    }
    r.trim();
    return r;
}

bool Nat::operator<(const Nat& o) const {
    if (limbs_.size() != o.limbs_.size()) return limbs_.size() < o.limbs_.size();
    for (std::size_t i = limbs_.size(); i-- > 0;) {
        if (limbs_[i] != o.limbs_[i]) return limbs_[i] < o.limbs_[i];
    }
    return false;
}

bool Nat::operator<=(const Nat& o) const { return !(o < *this); }

Nat Nat::from_string(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty numeral");
    Nat r;
    Nat ten(10);
    for (char c : s) {
        if (c < '0' || c > '9') throw std::invalid_argument("bad digit in numeral");
        r = r * ten + Nat(static_cast<std::uint64_t>(c - '0'));
    }
    return r;
}

std::string Nat::to_string() const {
    if (is_zero()) return "0";
    // Repeated divmod by 10^9 over the limbs.
    std::vector<std::uint32_t> work = limbs_;
    std::vector<std::uint32_t> chunks;
    while (!work.empty()) {
        std::uint64_t rem = 0;
        for (std::size_t i = work.size(); i-- > 0;) {
            std::uint64_t cur = (rem << 32) | work[i];
            work[i] = static_cast<std::uint32_t>(cur / 1000000000u);
            rem = cur % 1000000000u;
        }
        while (!work.empty() && work.back() == 0) work.pop_back();
        chunks.push_back(static_cast<std::uint32_t>(rem));
    }
    std::string out = std::to_string(chunks.back());
    for (std::size_t i = chunks.size() - 1; i-- > 0;) {
        std::string part = std::to_string(chunks[i]);
        out += std::string(9 - part.size(), '0') + part;
    }
    return out;
}

} // namespace ratt
