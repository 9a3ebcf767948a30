#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <variant>

#include "lpq/error.hpp"

namespace lpq {

enum class ScalarType : uint8_t { Int64, Float64, Text };

const char* to_string(ScalarType t);
ScalarType scalar_type_from_string(std::string_view s);

/// A single attribute value. Comparison and equality are defined only
/// between scalars of the same type; mixing types raises a Type error
/// instead of coercing. Float64 values are always finite.
class Scalar {
  public:
    Scalar() : value_(int64_t{0}) {}

    static Scalar of_int(int64_t v) { return Scalar(v); }
    static Scalar of_float(double v);  // rejects NaN/Inf
    static Scalar of_text(std::string v) { return Scalar(std::move(v)); }

    ScalarType type() const { return static_cast<ScalarType>(value_.index()); }

    int64_t as_int() const;
    double as_float() const;
    const std::string& as_text() const;

    /// Three-way comparison: -1, 0, +1. Text compares byte-wise.
    friend int compare(const Scalar& a, const Scalar& b);
    friend bool operator==(const Scalar& a, const Scalar& b) { return compare(a, b) == 0; }
    friend bool operator<(const Scalar& a, const Scalar& b) { return compare(a, b) < 0; }

    /// Exact textual form; floats use shortest round-trip decimals.
    std::string to_display() const;

    size_t hash() const;

  private:
    explicit Scalar(int64_t v) : value_(v) {}
    explicit Scalar(double v) : value_(v) {}
    explicit Scalar(std::string v) : value_(std::move(v)) {}

    std::variant<int64_t, double, std::string> value_;
};

struct ScalarHash {
    size_t operator()(const Scalar& s) const { return s.hash(); }
};

}  // namespace lpq
