#ifndef HYPERFORGE_COMMON_HPP
#define HYPERFORGE_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyperforge {

// Error hierarchy. Every failure carries a short machine-parsable code that
// the CLI maps onto exit status and stderr diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t pos)
        : Error("parse", msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
    std::size_t position;
};
struct SemanticError : Error {
    explicit SemanticError(const std::string& msg) : Error("semantic", msg) {}
};
struct ResourceLimit : Error {
    explicit ResourceLimit(const std::string& msg) : Error("resource-limit", msg) {}
};
struct OutOfRange : Error {
    explicit OutOfRange(const std::string& msg) : Error("out-of-range", msg) {}
};
struct InstanceNotAlive : Error {
    explicit InstanceNotAlive(const std::string& msg) : Error("instance-not-alive", msg) {}
};
struct UnknownNode : Error {
    explicit UnknownNode(const std::string& msg) : Error("unknown-node", msg) {}
};
struct InvalidBeta : Error {
    explicit InvalidBeta(const std::string& msg) : Error("invalid-beta", msg) {}
};
struct WindowTooLarge : Error {
    explicit WindowTooLarge(const std::string& msg) : Error("window-too-large", msg) {}
};
struct Disconnected : Error {
    explicit Disconnected(const std::string& msg) : Error("disconnected", msg) {}
};
struct UnsupportedFormat : Error {
    explicit UnsupportedFormat(const std::string& msg) : Error("unsupported-format", msg) {}
};
struct BudgetExhausted : Error {
    explicit BudgetExhausted(const std::string& msg) : Error("budget-exhausted", msg) {}
};
struct FitRejected : Error {
    explicit FitRejected(const std::string& msg) : Error("fit-rejected", msg) {}
};

// SplitMix64. Fixed algorithm so seeded runs are reproducible across
// platforms and standard library implementations.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Unbiased bounded draw (rejection sampling).
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 12) + (h >> 4);
    return h * 0x100000001b3ull;
}

inline std::uint64_t hash_range(const std::uint32_t* data, std::size_t n, std::uint64_t seed = 1469598103934665603ull) {
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < n; ++i) h = hash_combine(h, data[i]);
    return h;
}

} // namespace hyperforge

#endif
