#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lpq/scalar.hpp"

namespace lpq {

/// 0-based dense row index into a base table.
using RowPos = uint32_t;

/// One named, typed column backed by a dense native array.
class Column {
  public:
    Column(std::string name, std::vector<int64_t> values)
        : name_(std::move(name)), data_(std::move(values)) {}
    Column(std::string name, std::vector<double> values);
    Column(std::string name, std::vector<std::string> values)
        : name_(std::move(name)), data_(std::move(values)) {}

    const std::string& name() const { return name_; }
    ScalarType type() const { return static_cast<ScalarType>(data_.index()); }
    size_t size() const;

    Scalar at(RowPos pos) const;

    const std::vector<int64_t>& ints() const;
    const std::vector<double>& floats() const;
    const std::vector<std::string>& texts() const;

  private:
    std::string name_;
    std::variant<std::vector<int64_t>, std::vector<double>, std::vector<std::string>> data_;
};

/// Immutable columnar relation: equal-length uniquely named columns.
/// Safe to share across concurrent readers once constructed.
class ColumnTable {
  public:
    ColumnTable(std::string name, std::vector<Column> columns);

    const std::string& name() const { return name_; }
    size_t row_count() const { return rows_; }
    const std::vector<Column>& columns() const { return cols_; }

    bool has_column(std::string_view col) const { return find_column(col) != nullptr; }
    const Column* find_column(std::string_view col) const;
    const Column& column(std::string_view col) const;  // Schema error if missing

  private:
    std::string name_;
    std::vector<Column> cols_;
    size_t rows_;
};

/// A block of ascending row positions into one table; the positional
/// intermediate flowing between operators. A block is owned by exactly
/// one operator at a time.
struct PositionBlock {
    const ColumnTable* table = nullptr;
    std::vector<RowPos> positions;

    size_t size() const { return positions.size(); }
    bool empty() const { return positions.empty(); }
};

/// Throws an Invariant error unless positions are strictly ascending.
void check_ascending(std::span<const RowPos> positions, const char* who);

/// Splits an ascending position sequence into blocks of at most
/// `capacity` positions; every block except possibly the last is full.
std::vector<PositionBlock> block_slice(const ColumnTable& table,
                                       std::span<const RowPos> positions,
                                       size_t capacity);

/// Value lookup for one (table, column) pair over position blocks.
class Reader {
  public:
    Reader(const ColumnTable& table, std::string_view column);

    const ColumnTable& table() const { return *table_; }
    const Column& column() const { return *col_; }

    /// output[i] = column[block.positions[i]]
    std::vector<Scalar> read(const PositionBlock& block) const;

    // typed gathers used by the vectorized evaluator
    void gather(const PositionBlock& block, std::vector<int64_t>& out) const;
    void gather(const PositionBlock& block, std::vector<double>& out) const;
    void gather(const PositionBlock& block, std::vector<std::string>& out) const;

  private:
    void check_block(const PositionBlock& block) const;

    const ColumnTable* table_;
    const Column* col_;
};

}  // namespace lpq
