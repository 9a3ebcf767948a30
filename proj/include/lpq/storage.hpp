#pragma once

#include <filesystem>
#include <vector>

#include "lpq/table.hpp"

namespace lpq {

/// Synthetic data parameters. The same (scale, seed) always produces
/// byte-identical tables; see the README for the fixed PRNG recipe.
struct GenSpec {
    double scale = 1.0;
    uint64_t seed = 0;
};

/// `part`: partkey 1..n, retailprice uniform [900,1900), size uniform
/// [1,50]. Rows = round(200000 * scale).
ColumnTable generate_part(const GenSpec& spec);

/// `lineitem`: suppkey uniform [1, max(100, round(10000*scale))],
/// extendedprice uniform [901,104950), discount uniform [0,0.10],
/// tax uniform [0,0.08], quantity uniform [1,50].
/// Rows = round(6000000 * scale).
ColumnTable generate_lineitem(const GenSpec& spec);

struct ColumnSpec {
    std::string name;
    ScalarType type;
};

const std::vector<ColumnSpec>& part_schema();
const std::vector<ColumnSpec>& lineitem_schema();

/// Header line of column names, one row per line, UTF-8. Floats are
/// written as shortest round-trip decimals so reload is exact. Text is
/// quoted only when it contains a comma, quote, or newline.
void save_csv(const ColumnTable& table, const std::filesystem::path& path);

/// Load errors name the offending 1-based line.
ColumnTable load_csv(const std::filesystem::path& path, const std::string& tableName,
                     const std::vector<ColumnSpec>& schema);

/// Variant that infers column types from the first data row
/// (int64 / float64 / text). Header-only files load as all-text.
ColumnTable load_csv_infer(const std::filesystem::path& path, const std::string& tableName);

/// FNV-1a over the displayed cell values; used by determinism checks.
uint64_t table_checksum(const ColumnTable& table);

}  // namespace lpq
