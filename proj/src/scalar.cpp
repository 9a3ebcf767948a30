#include "lpq/scalar.hpp"

#include <charconv>
#include <cmath>
#include <cstring>

namespace lpq {

const char* to_string(ScalarType t) {
    switch (t) {
        case ScalarType::Int64: return "int64";
        case ScalarType::Float64: return "float64";
        case ScalarType::Text: return "text";
    }
    return "?";
}

ScalarType scalar_type_from_string(std::string_view s) {
    if (s == "int64") return ScalarType::Int64;
    if (s == "float64") return ScalarType::Float64;
    if (s == "text") return ScalarType::Text;
    raise(ErrorKind::Schema, "unknown scalar type: " + std::string(s));
}

Scalar Scalar::of_float(double v) {
    if (!std::isfinite(v))
        raise(ErrorKind::Type, "non-finite float64 value");
    return Scalar(v);
}

int64_t Scalar::as_int() const {
    if (type() != ScalarType::Int64)
        raise(ErrorKind::Type, "scalar is not int64");
    return std::get<int64_t>(value_);
}

double Scalar::as_float() const {
    if (type() != ScalarType::Float64)
        raise(ErrorKind::Type, "scalar is not float64");
    return std::get<double>(value_);
}

const std::string& Scalar::as_text() const {
    if (type() != ScalarType::Text)
        raise(ErrorKind::Type, "scalar is not text");
    return std::get<std::string>(value_);
}

int compare(const Scalar& a, const Scalar& b) {
    if (a.type() != b.type())
        raise(ErrorKind::Type,
              std::string("cannot compare ") + to_string(a.type()) + " with " +
                  to_string(b.type()));
    switch (a.type()) {
        case ScalarType::Int64: {
            auto x = std::get<int64_t>(a.value_), y = std::get<int64_t>(b.value_);
            return (x < y) ? -1 : (x > y) ? 1 : 0;
        }
        case ScalarType::Float64: {
            auto x = std::get<double>(a.value_), y = std::get<double>(b.value_);
            return (x < y) ? -1 : (x > y) ? 1 : 0;
        }
        case ScalarType::Text: {
            int c = std::get<std::string>(a.value_).compare(std::get<std::string>(b.value_));
            return (c < 0) ? -1 : (c > 0) ? 1 : 0;
        }
    }
    return 0;
}

std::string Scalar::to_display() const {
    switch (type()) {
        case ScalarType::Int64: return std::to_string(std::get<int64_t>(value_));
        case ScalarType::Float64: {
            char buf[64];
            auto r = std::to_chars(buf, buf + sizeof(buf), std::get<double>(value_));
            return std::string(buf, r.ptr);
        }
        case ScalarType::Text: return std::get<std::string>(value_);
    }
    return {};
}

size_t Scalar::hash() const {
    size_t h = 0;
    switch (type()) {
        case ScalarType::Int64:
            h = std::hash<int64_t>{}(std::get<int64_t>(value_));
            break;
        case ScalarType::Float64:
            h = std::hash<double>{}(std::get<double>(value_));
            break;
        case ScalarType::Text:
            h = std::hash<std::string>{}(std::get<std::string>(value_));
            break;
    }
    // fold in the tag so equal bit patterns of different types differ
    return h ^ (static_cast<size_t>(type()) << 1);
}

}  // namespace lpq
