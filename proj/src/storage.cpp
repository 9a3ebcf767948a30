#include "lpq/storage.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace lpq {

namespace {

// mt19937_64 with fixed scaling maps, so the byte streams are identical
// on every platform (std distributions are not portable).
struct Rng {
    explicit Rng(uint64_t seed) : eng(seed) {}

    uint64_t next() { return eng(); }

    int64_t uniform_int(int64_t lo, int64_t hi) {  // inclusive range
        auto span = static_cast<uint64_t>(hi - lo) + 1;
        auto scaled = static_cast<uint64_t>(
            (static_cast<unsigned __int128>(next()) * span) >> 64);
        return lo + static_cast<int64_t>(scaled);
    }

    double uniform_real(double lo, double hi) {  // [lo, hi)
        double unit = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * unit;
    }

    std::mt19937_64 eng;
};

size_t scaled_rows(double scale, double baseline) {
    return static_cast<size_t>(std::llround(baseline * scale));
}

void check_scale(double scale) {
    if (!(scale > 0))
        raise(ErrorKind::Usage, "scale must be positive");
}

}  // namespace

ColumnTable generate_part(const GenSpec& spec) {
    check_scale(spec.scale);
    size_t n = scaled_rows(spec.scale, 200000.0);
    Rng rng(spec.seed);
    std::vector<int64_t> partkey(n), size(n);
    std::vector<double> retailprice(n);
    for (size_t i = 0; i < n; ++i) {
        partkey[i] = static_cast<int64_t>(i) + 1;
        retailprice[i] = rng.uniform_real(900.0, 1900.0);
        size[i] = rng.uniform_int(1, 50);
    }
    return ColumnTable("part", {Column("partkey", std::move(partkey)),
                                Column("retailprice", std::move(retailprice)),
                                Column("size", std::move(size))});
}

ColumnTable generate_lineitem(const GenSpec& spec) {
    check_scale(spec.scale);
    size_t n = scaled_rows(spec.scale, 6000000.0);
    int64_t suppkey_max =
        std::max<int64_t>(100, static_cast<int64_t>(std::llround(10000.0 * spec.scale)));
    // distinct stream from part for any seed
    Rng rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<int64_t> suppkey(n), quantity(n);
    std::vector<double> extendedprice(n), discount(n), tax(n);
    for (size_t i = 0; i < n; ++i) {
        suppkey[i] = rng.uniform_int(1, suppkey_max);
        extendedprice[i] = rng.uniform_real(901.0, 104950.0);
        discount[i] = rng.uniform_real(0.0, 0.10);
        tax[i] = rng.uniform_real(0.0, 0.08);
        quantity[i] = rng.uniform_int(1, 50);
    }
    return ColumnTable("lineitem", {Column("suppkey", std::move(suppkey)),
                                    Column("extendedprice", std::move(extendedprice)),
                                    Column("discount", std::move(discount)),
                                    Column("tax", std::move(tax)),
                                    Column("quantity", std::move(quantity))});
}

const std::vector<ColumnSpec>& part_schema() {
    static const std::vector<ColumnSpec> s = {{"partkey", ScalarType::Int64},
                                              {"retailprice", ScalarType::Float64},
                                              {"size", ScalarType::Int64}};
    return s;
}

const std::vector<ColumnSpec>& lineitem_schema() {
    static const std::vector<ColumnSpec> s = {{"suppkey", ScalarType::Int64},
                                              {"extendedprice", ScalarType::Float64},
                                              {"discount", ScalarType::Float64},
                                              {"tax", ScalarType::Float64},
                                              {"quantity", ScalarType::Int64}};
    return s;
}

// ------------------------------------------------------------------ csv

namespace {

bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\n") != std::string::npos;
}

void write_cell(std::ostream& os, const std::string& s) {
    if (!needs_quoting(s)) {
        os << s;
        return;
    }
    os << '"';
    for (char c : s) {
        if (c == '"') os << '"';
        os << c;
    }
    os << '"';
}

std::vector<std::string> split_csv_line(const std::string& line, size_t lineno) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    i++;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"' && cell.empty()) {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    if (quoted)
        raise(ErrorKind::Data, "line " + std::to_string(lineno) + ": unterminated quote");
    cells.push_back(std::move(cell));
    return cells;
}

int64_t parse_int_cell(const std::string& s, size_t lineno) {
    int64_t v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        raise(ErrorKind::Data, "line " + std::to_string(lineno) + ": bad int64 value '" + s + "'");
    return v;
}

double parse_float_cell(const std::string& s, size_t lineno) {
    double v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        raise(ErrorKind::Data,
              "line " + std::to_string(lineno) + ": bad float64 value '" + s + "'");
    return v;
}

bool looks_like_int(const std::string& s) {
    int64_t v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool looks_like_float(const std::string& s) {
    double v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

ColumnTable load_csv_impl(const std::filesystem::path& path, const std::string& tableName,
                          const std::vector<ColumnSpec>* schema) {
    std::ifstream in(path);
    if (!in)
        raise(ErrorKind::Data, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line))
        raise(ErrorKind::Data, "empty file " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_csv_line(line, 1);

    std::vector<ColumnSpec> specs;
    if (schema) {
        if (header.size() != schema->size())
            raise(ErrorKind::Data, path.string() + ": header has " +
                                       std::to_string(header.size()) + " columns, schema expects " +
                                       std::to_string(schema->size()));
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] != (*schema)[i].name)
                raise(ErrorKind::Data, path.string() + ": header column '" + header[i] +
                                           "' does not match schema column '" +
                                           (*schema)[i].name + "'");
        specs = *schema;
    }

    std::vector<std::vector<std::string>> raw(header.size());
    size_t lineno = 1;
    while (std::getline(in, line)) {
        lineno++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
        auto cells = split_csv_line(line, lineno);
        if (cells.size() != header.size())
            raise(ErrorKind::Data, "line " + std::to_string(lineno) + ": expected " +
                                       std::to_string(header.size()) + " cells, got " +
                                       std::to_string(cells.size()));
        for (size_t i = 0; i < cells.size(); ++i) raw[i].push_back(std::move(cells[i]));
    }

    if (!schema) {
        for (size_t i = 0; i < header.size(); ++i) {
            ScalarType t = ScalarType::Text;
            if (!raw[i].empty()) {
                if (looks_like_int(raw[i][0])) t = ScalarType::Int64;
                else if (looks_like_float(raw[i][0])) t = ScalarType::Float64;
            }
            specs.push_back({header[i], t});
        }
    }

    std::vector<Column> cols;
    for (size_t i = 0; i < specs.size(); ++i) {
        switch (specs[i].type) {
            case ScalarType::Int64: {
                std::vector<int64_t> v(raw[i].size());
                for (size_t j = 0; j < raw[i].size(); ++j)
                    v[j] = parse_int_cell(raw[i][j], j + 2);
                cols.emplace_back(specs[i].name, std::move(v));
                break;
            }
            case ScalarType::Float64: {
                std::vector<double> v(raw[i].size());
                for (size_t j = 0; j < raw[i].size(); ++j)
                    v[j] = parse_float_cell(raw[i][j], j + 2);
                cols.emplace_back(specs[i].name, std::move(v));
                break;
            }
            case ScalarType::Text:
                cols.emplace_back(specs[i].name, std::move(raw[i]));
                break;
        }
    }
    return ColumnTable(tableName, std::move(cols));
}

}  // namespace

void save_csv(const ColumnTable& table, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os)
        raise(ErrorKind::Data, "cannot write " + path.string());
    const auto& cols = table.columns();
    for (size_t i = 0; i < cols.size(); ++i) {
        if (i) os << ',';
        write_cell(os, cols[i].name());
    }
    os << '\n';
    for (size_t row = 0; row < table.row_count(); ++row) {
        for (size_t i = 0; i < cols.size(); ++i) {
            if (i) os << ',';
            write_cell(os, cols[i].at(static_cast<RowPos>(row)).to_display());
        }
        os << '\n';
    }
    if (!os)
        raise(ErrorKind::Data, "write failed for " + path.string());
}

ColumnTable load_csv(const std::filesystem::path& path, const std::string& tableName,
                     const std::vector<ColumnSpec>& schema) {
    return load_csv_impl(path, tableName, &schema);
}

ColumnTable load_csv_infer(const std::filesystem::path& path, const std::string& tableName) {
    return load_csv_impl(path, tableName, nullptr);
}

uint64_t table_checksum(const ColumnTable& table) {
    uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        h ^= 0x1f;
        h *= 1099511628211ULL;
    };
    for (const auto& c : table.columns()) mix(c.name());
    for (size_t row = 0; row < table.row_count(); ++row)
        for (const auto& c : table.columns()) mix(c.at(static_cast<RowPos>(row)).to_display());
    return h;
}

}  // namespace lpq
